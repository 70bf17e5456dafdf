"""Python interface to the eepred core.

Configurations are plain dicts shaped like the JSON run configuration; any
subset of keys may be given and the rest take their defaults.
"""

import copy
import json

from . import _core
from ._core import DomainError, IoError, omega_cap_sq

__version__ = _core.__version__

__all__ = [
    "DomainError",
    "IoError",
    "classify",
    "config_digest",
    "default_config",
    "desk_config",
    "generate_dataset",
    "metrics",
    "omega_cap_sq",
    "predict",
    "qualify",
    "run_experiment",
    "simulate",
    "train",
    "with_point",
]


def _dump(config):
    return json.dumps(config or {})


def default_config():
    return json.loads(_core.default_config())


def desk_config():
    return json.loads(_core.desk_config())


def config_digest(config=None):
    return _core.config_digest(_dump(config))


def with_point(config=None, f=None, epsilon=None, delta=None):
    """Copy of `config` with the system's bifurcation parameters replaced."""
    out = copy.deepcopy(config or {})
    system = out.setdefault("system", {})
    for key, value in (("f", f), ("epsilon", epsilon), ("delta", delta)):
        if value is not None:
            system[key] = value
    return out


def simulate(config=None, **point):
    """Integrate one point; returns numpy arrays t, x, v and the transient cut."""
    return _core.simulate(_dump(with_point(config, **point)))


def classify(config=None, **point):
    return json.loads(_core.classify(_dump(with_point(config, **point))))


def qualify(series, min_peak=1e-6):
    return json.loads(_core.qualify(list(map(float, series)), min_peak))


def metrics(tn, fp, fn, tp):
    return json.loads(_core.metrics(tn, fp, fn, tp))


def generate_dataset(config=None, workers=1):
    """Dataset CSV text, byte-identical for identical config."""
    return _core.generate_dataset_csv(_dump(config), workers)


def run_experiment(dataset_csv, config=None, workers=1):
    return json.loads(_core.run_experiment(dataset_csv, _dump(config), workers))


def train(kind, X, y, config=None):
    """Trained model as a dict in the model-file envelope format."""
    rows = [list(map(float, r)) for r in X]
    return json.loads(_core.train(kind, rows, [int(v) for v in y], _dump(config)))


def predict(model, X):
    """(scores, labels) for each row of X."""
    rows = [list(map(float, r)) for r in X]
    scores, labels = _core.predict(json.dumps(model), rows)
    return scores, list(labels)
