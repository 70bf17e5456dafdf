#pragma once

#include <algorithm>
#include <cmath>

namespace eepred {

// Logistic function, evaluated on the side that cannot overflow.
inline double sigmoid(double z) {
  if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

inline double relu(double z) { return z > 0.0 ? z : 0.0; }

// Subgradient convention: 0 at the kink.
inline double relu_grad(double z) { return z > 0.0 ? 1.0 : 0.0; }

}  // namespace eepred
