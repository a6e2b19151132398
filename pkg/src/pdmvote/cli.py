"""Batch experiment runner: ``pdmvote prepare|train|evaluate|cv|rank``.

Every subcommand reads the run config (TOML, or a previous ``manifest.json``),
works inside the output directory and records what it did in the manifest.
Failures print one JSON object on stderr and exit nonzero.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import __version__, dataio, persist, pipeline, synth
from .config import RunConfig, load_config
from .errors import ConfigError, MissingModel, PdmError, TooFewModels
from .fsutil import atomic_path, atomic_write_text
from .learners import DISPLAY_NAMES
from .metrics import MetricsReport, evaluate, repeated_cv, write_cv_grid
from .plots import confusion_svg, cv_svg
from .preprocess import read_encoded_csv, write_encoded_csv
from .topsis import matrix_from_reports, topsis_rank

MANIFEST = "manifest.json"
ENCODED, TRAIN, TEST, SCALER = "encoded.csv", "train.csv", "test.csv", "scaler.json"


def _json(obj):
    return json.dumps(obj, sort_keys=True, indent=2) + "\n"


class Run:
    """Output-directory layout plus manifest bookkeeping."""

    def __init__(self, cfg: RunConfig):
        self.cfg = cfg
        self.out = Path(cfg.out)

    def path(self, *parts):
        return self.out.joinpath(*parts)

    def model_path(self, name):
        return self.path("models", f"{name}.model.json")

    def metrics_path(self, name):
        return self.path(f"{name}.metrics.json")

    def read_manifest(self):
        p = self.path(MANIFEST)
        return json.loads(p.read_text(encoding="utf-8")) if p.exists() else {}

    def update_manifest(self, section, payload):
        doc = self.read_manifest()
        doc["pdmvote"] = __version__
        doc["config"] = self.cfg.to_dict(include_out=False)
        doc[section] = payload
        atomic_write_text(self.path(MANIFEST), _json(doc))

    def require(self, name):
        p = self.path(name)
        if not p.exists():
            raise MissingModel(f"{p} not found; run `pdmvote prepare` first")
        return p


def _write_encoded(em, path):
    with atomic_path(path) as tmp:
        write_encoded_csv(em, tmp)


def cmd_prepare(run: Run, args):
    cfg = run.cfg
    ds = dataio.load_csv(cfg.dataset)
    report = dataio.validate(ds)
    prep = pipeline.prepare(ds, cfg)
    _write_encoded(prep.encoded, run.path(ENCODED))
    _write_encoded(prep.balanced, run.path(TRAIN))
    _write_encoded(prep.test, run.path(TEST))
    atomic_write_text(run.path(SCALER), _json(prep.scaler.to_dict()))
    counts = prep.counts()
    run.update_manifest(
        "prepare",
        {
            "dataset_digest": ds.source_digest,
            "n_rows": report.n_rows,
            "class_counts": {str(k): v for k, v in sorted(report.class_counts.items())},
            "violations": len(report.violations),
            "counts": counts,
            "seeds": {"split": cfg.seed_for("split"), "smote": cfg.seed_for("smote")},
        },
    )
    print(json.dumps(counts, sort_keys=True))
    return 0


def cmd_train(run: Run, args):
    train = read_encoded_csv(run.require(TRAIN))
    names = pipeline.expand_selector(args.model)
    trained = {}
    for name in names:
        try:
            model = pipeline.fit_model(name, run.cfg, train.X, train.y)
        except PdmError as exc:
            raise type(exc)(f"training {name}: {exc}") from exc
        with atomic_path(run.model_path(name)) as tmp:
            persist.save(model, tmp)
        trained[name] = {"seed": int(model.seed)}
        print(f"trained {name}")
    doc = run.read_manifest().get("train", {})
    doc.update(trained)
    run.update_manifest("train", dict(sorted(doc.items())))
    return 0


def _available_models(run: Run):
    return sorted(p.name[: -len(".model.json")] for p in run.path("models").glob("*.model.json"))


def cmd_evaluate(run: Run, args):
    test = read_encoded_csv(run.require(TEST))
    if args.model == "all":
        names = _available_models(run)
        if not names:
            raise MissingModel(f"no model documents under {run.path('models')}")
    else:
        names = pipeline.expand_selector(args.model)
    results = {}
    for name in names:
        p = run.model_path(name)
        if not p.exists():
            raise MissingModel(f"{p} not found; run `pdmvote train {name}` first")
        report, cm = evaluate(persist.load(p), test.X, test.y)
        atomic_write_text(run.metrics_path(name), _json(report.to_dict()))
        if name == "ensemble":
            atomic_write_text(run.path("confusion.svg"), confusion_svg(cm))
        results[name] = report.to_dict()
        print(f"{name}: " + " ".join(f"{k}={v:.4f}" for k, v in report.to_dict().items()))
    doc = run.read_manifest().get("evaluate", {})
    doc.update(results)
    run.update_manifest("evaluate", dict(sorted(doc.items())))
    return 0


def cmd_cv(run: Run, args):
    cfg = run.cfg
    data = pipeline.cv_data(read_encoded_csv(run.require(ENCODED)), cfg)
    cv_cfg = pipeline.cv_config(cfg)
    result = repeated_cv(pipeline.cv_trainer(cfg), data, cv_cfg, pipeline.smote_config(cfg))
    with atomic_path(run.path("cv_grid.csv")) as tmp:
        write_cv_grid(result.grid, tmp)
    atomic_write_text(run.path("cv.svg"), cv_svg(result.grid))
    run.update_manifest(
        "cv",
        {"pipeline": cfg.cv.pipeline, "rows": len(data), "seed": cv_cfg.seed, "mean_accuracy": result.mean},
    )
    print(json.dumps({"mean_accuracy": result.mean, "shape": list(result.grid.shape)}))
    return 0


def cmd_rank(run: Run, args):
    files = sorted(run.out.glob("*.metrics.json"))
    if len(files) < 2:
        raise TooFewModels(f"need metrics for at least 2 models in {run.out}, found {len(files)}")
    reports = {
        f.name[: -len(".metrics.json")]: MetricsReport.from_dict(json.loads(f.read_text(encoding="utf-8")))
        for f in files
    }
    ranking = topsis_rank(matrix_from_reports(reports, run.cfg.topsis.weights))
    with atomic_path(run.path("ranking.csv")) as tmp:
        ranking.to_csv(tmp)
    run.update_manifest("rank", {"models": sorted(reports), "weights": list(run.cfg.topsis.weights)})
    for name, score, rank in ranking.table():
        print(f"{rank:>3}  {score:.4f}  {DISPLAY_NAMES.get(name, name)}")
    return 0


def cmd_make_replica(run: Run, args):
    ds = synth.generate(args.rows, args.replica_seed)
    with atomic_path(args.path) as tmp:
        dataio.write_csv(ds, tmp)
    print(json.dumps({"path": str(args.path), "rows": len(ds.records), "positives": int(ds.labels().sum())}))
    return 0


def _global_flags(parser, suppress):
    default = argparse.SUPPRESS if suppress else None
    g = parser.add_argument_group("global options")
    g.add_argument("--config", default=default, help="TOML config or a previous manifest.json")
    g.add_argument("--seed", type=int, default=default, help="master seed (overrides the config)")
    g.add_argument("--out", default=default, help="output directory (overrides the config)")
    g.add_argument(
        "--set",
        dest="overrides",
        action="append",
        default=argparse.SUPPRESS if suppress else [],
        metavar="KEY=VALUE",
        help="override a config key, e.g. --set cv.repetitions=2 (repeatable)",
    )


def build_parser():
    parser = argparse.ArgumentParser(prog="pdmvote", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"pdmvote {__version__}")
    _global_flags(parser, suppress=False)
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name, fn, help_):
        p = sub.add_parser(name, help=help_)
        _global_flags(p, suppress=True)
        p.set_defaults(func=fn)
        return p

    add("prepare", cmd_prepare, "load, validate, scale, split and balance the dataset")
    p = add("train", cmd_train, "fit one learner, the ensemble, or all of them")
    p.add_argument("model", choices=pipeline.SELECTORS)
    p = add("evaluate", cmd_evaluate, "score trained models on the held-out test split")
    p.add_argument("model", nargs="?", default="all", choices=pipeline.SELECTORS)
    add("cv", cmd_cv, "repeated k-fold accuracy of the configured pipeline")
    add("rank", cmd_rank, "TOPSIS ranking over the metrics files")
    p = add("make-replica", cmd_make_replica, "write a synthetic stand-in for the AI4I file")
    p.add_argument("path", type=Path)
    p.add_argument("--rows", type=int, default=10000)
    p.add_argument("--replica-seed", type=int, default=2020)
    return parser


def _error_line(exc):
    doc = {"error": type(exc).__name__, "message": str(exc)}
    for attr in ("row", "column", "repetition", "fold"):
        if getattr(exc, attr, None) is not None:
            doc[attr] = getattr(exc, attr)
    return json.dumps(doc, sort_keys=True, default=str)


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        cfg = load_config(args.config, args.overrides, args.seed, args.out)
        return args.func(Run(cfg), args)
    except ConfigError as exc:
        print(_error_line(exc), file=sys.stderr)
        return 2
    except (PdmError, OSError, ValueError) as exc:
        print(_error_line(exc), file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
