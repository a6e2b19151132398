"""Run configuration: a TOML file plus ``--set key=value`` overrides.

Every section seed falls back to the top-level ``seed``. Unknown keys are
rejected.
"""

from __future__ import annotations

import json
import sys
from dataclasses import asdict, dataclass, field, fields, replace
from pathlib import Path

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

from .errors import ConfigError
from .learners import DEFAULT_HYPERPARAMS, make_spec
from .metrics import METRIC_KEYS

DEFAULT_CONFIG_PATH = Path(__file__).with_name("default.toml")


@dataclass(frozen=True)
class SplitSection:
    train_fraction: float = 0.7
    stratified: bool = True
    seed: int | None = None


@dataclass(frozen=True)
class ScalerSection:
    # "full": fit on all rows before splitting; "train": fit on the train partition only
    fit_on: str = "full"


@dataclass(frozen=True)
class SmoteSection:
    k_neighbors: int = 5
    seed: int | None = None


@dataclass(frozen=True)
class EnsembleSection:
    seed: int | None = None
    n_jobs: int = 1


@dataclass(frozen=True)
class CvSection:
    k: int = 5
    repetitions: int = 5
    seed: int | None = None
    n_jobs: int = 1
    pipeline: str = "ensemble"
    # 0 = use every row; otherwise a stratified subset of this many rows
    max_rows: int = 0


@dataclass(frozen=True)
class TopsisSection:
    weights: tuple[float, ...] = (0.2, 0.2, 0.2, 0.2, 0.2)


@dataclass(frozen=True)
class RunConfig:
    dataset: str = "data/ai4i2020.csv"
    out: str = "runs/default"
    seed: int = 42
    n_jobs: int = 1
    split: SplitSection = field(default_factory=SplitSection)
    scaler: ScalerSection = field(default_factory=ScalerSection)
    smote: SmoteSection = field(default_factory=SmoteSection)
    ensemble: EnsembleSection = field(default_factory=EnsembleSection)
    cv: CvSection = field(default_factory=CvSection)
    topsis: TopsisSection = field(default_factory=TopsisSection)
    learners: dict = field(default_factory=dict)

    def seed_for(self, section):
        s = getattr(self, section).seed
        return self.seed if s is None else s

    def learner_spec(self, learner_id):
        return make_spec(learner_id, **self.learners.get(learner_id, {}))

    def to_dict(self, include_out=True):
        d = asdict(self)
        d["topsis"]["weights"] = list(self.topsis.weights)
        if not include_out:
            d.pop("out")
        return d


_SECTIONS = {
    "split": SplitSection,
    "scaler": ScalerSection,
    "smote": SmoteSection,
    "ensemble": EnsembleSection,
    "cv": CvSection,
    "topsis": TopsisSection,
}


def _check_type(where, value, annotation):
    ann = str(annotation)
    if value is None:
        if "None" in ann:
            return value
        raise ConfigError(f"{where} must not be null")
    if ann.startswith("int"):
        if isinstance(value, bool) or not isinstance(value, int):
            raise ConfigError(f"{where} must be an integer, got {value!r}")
        if value < 0:
            raise ConfigError(f"{where} must be non-negative")
    elif ann == "float":
        if isinstance(value, bool) or not isinstance(value, (int, float)):
            raise ConfigError(f"{where} must be a number, got {value!r}")
        value = float(value)
    elif ann == "bool" and not isinstance(value, bool):
        raise ConfigError(f"{where} must be true or false, got {value!r}")
    elif ann == "str" and not isinstance(value, str):
        raise ConfigError(f"{where} must be a string, got {value!r}")
    elif ann.startswith("tuple"):
        if not isinstance(value, (list, tuple)):
            raise ConfigError(f"{where} must be a list")
        value = tuple(float(v) for v in value)
    return value


def _build(cls, data, where):
    if not isinstance(data, dict):
        raise ConfigError(f"[{where}] must be a table")
    known = {f.name: f for f in fields(cls)}
    unknown = set(data) - set(known)
    if unknown:
        raise ConfigError(f"unknown key(s) in [{where}]: {', '.join(sorted(unknown))}")
    kwargs = {k: _check_type(f"{where}.{k}", v, known[k].type) for k, v in data.items()}
    return cls(**kwargs)


def from_dict(data: dict) -> RunConfig:
    data = dict(data)
    kwargs = {}
    for name, cls in _SECTIONS.items():
        if name in data:
            kwargs[name] = _build(cls, data.pop(name), name)
    learners = data.pop("learners", {})
    if not isinstance(learners, dict):
        raise ConfigError("[learners] must be a table")
    for lid, overrides in learners.items():
        if lid not in DEFAULT_HYPERPARAMS:
            raise ConfigError(f"unknown learner [learners.{lid}]")
        try:
            make_spec(lid, **overrides)
        except ValueError as exc:
            raise ConfigError(str(exc)) from None
    top = _build(RunConfig, data, "top-level") if data else RunConfig()
    cfg = replace(top, learners={k: dict(v) for k, v in learners.items()}, **kwargs)
    validate(cfg)
    return cfg


def validate(cfg: RunConfig):
    if not 0 < cfg.split.train_fraction < 1:
        raise ConfigError("split.train_fraction must be in (0, 1)")
    if cfg.scaler.fit_on not in ("full", "train"):
        raise ConfigError("scaler.fit_on must be 'full' or 'train'")
    if cfg.smote.k_neighbors < 1:
        raise ConfigError("smote.k_neighbors must be >= 1")
    if cfg.cv.k < 2 or cfg.cv.repetitions < 1:
        raise ConfigError("cv.k must be >= 2 and cv.repetitions >= 1")
    if cfg.cv.pipeline != "ensemble" and cfg.cv.pipeline not in DEFAULT_HYPERPARAMS:
        raise ConfigError(f"cv.pipeline must be 'ensemble' or a learner id, got {cfg.cv.pipeline!r}")
    w = cfg.topsis.weights
    if len(w) != len(METRIC_KEYS) or any(x < 0 for x in w) or abs(sum(w) - 1.0) > 1e-12:
        raise ConfigError(f"topsis.weights needs {len(METRIC_KEYS)} non-negative values summing to 1")


def parse_override(text):
    """``a.b.c=value`` -> (["a", "b", "c"], value); value parsed as a TOML literal."""
    if "=" not in text:
        raise ConfigError(f"--set expects key=value, got {text!r}")
    key, raw = text.split("=", 1)
    path = [p for p in key.strip().split(".") if p]
    if not path:
        raise ConfigError(f"--set: empty key in {text!r}")
    try:
        value = tomllib.loads(f"v = {raw.strip()}")["v"]
    except tomllib.TOMLDecodeError:
        value = raw.strip()
    return path, value


def apply_overrides(data: dict, overrides):
    data = json.loads(json.dumps(data))
    for text in overrides:
        path, value = parse_override(text)
        node = data
        for p in path[:-1]:
            node = node.setdefault(p, {})
            if not isinstance(node, dict):
                raise ConfigError(f"--set {text!r}: {p} is not a table")
        node[path[-1]] = value
    return data


def read_config_file(path) -> dict:
    path = Path(path)
    if not path.exists():
        raise ConfigError(f"config file not found: {path}")
    text = path.read_text(encoding="utf-8")
    if path.suffix == ".json":
        doc = json.loads(text)
        # a run manifest embeds the resolved config
        return doc["config"] if "config" in doc else doc
    try:
        return tomllib.loads(text)
    except tomllib.TOMLDecodeError as exc:
        raise ConfigError(f"{path}: {exc}") from None


def _strip_nulls(d):
    if isinstance(d, dict):
        return {k: _strip_nulls(v) for k, v in d.items() if v is not None}
    return d


def load_config(path=None, overrides=(), seed=None, out=None) -> RunConfig:
    data = read_config_file(path or DEFAULT_CONFIG_PATH)
    data = apply_overrides(_strip_nulls(data), overrides)
    if seed is not None:
        data["seed"] = seed
    if out is not None:
        data["out"] = str(out)
    return from_dict(data)
