"""Self-describing JSON documents for trained models and ensembles.

Floats are written with ``repr`` precision, so a save/load round trip gives
bit-identical predictions.
"""

from __future__ import annotations

import json

import numpy as np

from . import __version__
from .ensemble import BootstrapPlan, VotingEnsemble
from .fsutil import atomic_write_text
from .learners import ESTIMATORS, LearnerSpec, TrainedModel

FORMAT_VERSION = 1
MODEL_FORMAT = "pdmvote/model"
ENSEMBLE_FORMAT = "pdmvote/ensemble"


def _encode(obj):
    if isinstance(obj, np.ndarray):
        return {"__ndarray__": str(obj.dtype), "shape": list(obj.shape), "data": obj.ravel().tolist()}
    if isinstance(obj, dict):
        return {str(k): _encode(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_encode(v) for v in obj]
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, np.floating):
        return float(obj)
    if isinstance(obj, np.bool_):
        return bool(obj)
    return obj


def _decode(obj):
    if isinstance(obj, dict):
        if "__ndarray__" in obj:
            return np.array(obj["data"], dtype=obj["__ndarray__"]).reshape(obj["shape"])
        return {k: _decode(v) for k, v in obj.items()}
    if isinstance(obj, list):
        return [_decode(v) for v in obj]
    return obj


def model_document(model: TrainedModel) -> dict:
    return {
        "format": MODEL_FORMAT,
        "version": FORMAT_VERSION,
        "package_version": __version__,
        "learner_id": model.spec.learner_id,
        "hyperparams": dict(model.spec.hyperparams),
        "seed": model.seed,
        "n_features": model.n_features,
        "state": _encode(model.estimator.get_state()),
    }


def model_from_document(doc: dict) -> TrainedModel:
    if doc.get("format") != MODEL_FORMAT:
        raise ValueError(f"not a model document: format={doc.get('format')!r}")
    if doc.get("version") != FORMAT_VERSION:
        raise ValueError(f"unsupported model document version {doc.get('version')!r}")
    spec = LearnerSpec(doc["learner_id"], dict(doc["hyperparams"]))
    est = ESTIMATORS[spec.learner_id](**spec.hyperparams)
    est.set_state(_decode(doc["state"]))
    return TrainedModel(spec, int(doc["seed"]), int(doc["n_features"]), est)


def ensemble_document(ens: VotingEnsemble) -> dict:
    return {
        "format": ENSEMBLE_FORMAT,
        "version": FORMAT_VERSION,
        "package_version": __version__,
        "seed": ens.seed,
        "plan": ens.plan.to_dict(),
        "members": [model_document(m) for m in ens.members],
    }


def ensemble_from_document(doc: dict) -> VotingEnsemble:
    if doc.get("format") != ENSEMBLE_FORMAT:
        raise ValueError(f"not an ensemble document: format={doc.get('format')!r}")
    members = tuple(model_from_document(m) for m in doc["members"])
    return VotingEnsemble(members, BootstrapPlan.from_dict(doc["plan"]), int(doc["seed"]))


def to_document(model):
    return ensemble_document(model) if isinstance(model, VotingEnsemble) else model_document(model)


def from_document(doc):
    if doc.get("format") == ENSEMBLE_FORMAT:
        return ensemble_from_document(doc)
    return model_from_document(doc)


def dumps(model) -> str:
    return json.dumps(to_document(model), separators=(",", ":")) + "\n"


def loads(text):
    return from_document(json.loads(text))


def save(model, path):
    atomic_write_text(path, dumps(model))


def load(path):
    with open(path, encoding="utf-8") as fh:
        return loads(fh.read())
