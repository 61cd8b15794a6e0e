"""Command-line entry point: ``tlda <subcommand> ...``.

Exit codes: 0 success, 1 usage error, 2 data or numerical error.
"""

import argparse
import contextlib
import csv
import json
import logging
import os
import sys

import numpy as np

from . import io
from .classify import fit_model, kfold_cv, nn_classify
from .discriminant import LabeledTensorDataset, Method, project, scatter_slices
from .errors import TldaError
from .robust import DEFAULT_ENERGY, RobustParams, robust_scatter_slices
from .synth import SynthSpec, synthesize
from .tl_algebra import DEFAULT_KAPPA_THRESHOLD
from .transforms import TransformKind, make_spec

log = logging.getLogger("tlda")

TRANSFORMS = [k.value for k in TransformKind]
METHODS = [m.value for m in Method]


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


def _dims(text):
    try:
        dims = tuple(int(x) for x in text.split(",") if x.strip())
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad dimension list {text!r}") from None
    if not dims or min(dims) < 1:
        raise argparse.ArgumentTypeError(f"bad dimension list {text!r}")
    return dims


def _thread_limit():
    raw = os.environ.get("TLDA_THREADS", "0").strip() or "0"
    try:
        n = int(raw)
    except ValueError:
        raise UsageError(f"TLDA_THREADS must be an integer, got {raw!r}") from None
    if n < 0:
        raise UsageError("TLDA_THREADS must be >= 0")
    if n == 0:
        return contextlib.nullcontext()
    from threadpoolctl import threadpool_limits

    return threadpool_limits(limits=n)


def _load_dataset(args):
    data = io.read_tensor(args.data)
    labels = io.read_labels(args.labels)
    return LabeledTensorDataset(data, labels)


def _params(args):
    return RobustParams(kappa_threshold=args.kappa_threshold, energy=args.energy)


def _fmt(x):
    return repr(float(x))


def _write_metrics(path, rows, mean, std):
    with open(path, "w", newline="") as f:
        w = csv.writer(f, lineterminator="\n")
        w.writerow(["fold", "accuracy"])
        for fold, acc in rows:
            w.writerow([fold, _fmt(acc)])
        w.writerow(["mean", _fmt(mean)])
        w.writerow(["std", _fmt(std)])


def _write_json(path, blob):
    with open(path, "w") as f:
        json.dump(blob, f, indent=2, sort_keys=True)
        f.write("\n")


def cmd_synth(args):
    spec = SynthSpec(args.classes, args.per_class, args.dims, args.sep, args.sigma, args.seed)
    ds = synthesize(spec, force_singular=args.force_singular)
    io.write_tensor(args.out + ".tnsr", ds.data)
    io.write_labels(args.out + ".labels.csv", ds.labels)
    log.info("wrote %s.tnsr and %s.labels.csv", args.out, args.out)


def cmd_train(args):
    ds = _load_dataset(args)
    model = fit_model(ds, args.method, args.p, args.transform, _params(args))
    io.save_model(model, args.model_out)
    log.info("trained %s model with p=%d", model.method.value, model.p)


def cmd_evaluate(args):
    model = io.load_model(args.model)
    ds = _load_dataset(args)
    predicted = nn_classify(model, ds.data)
    acc = float(np.mean([a == b for a, b in zip(predicted, ds.labels)])) if ds.labels else 0.0
    _write_metrics(args.metrics_out, [(1, acc)], acc, 0.0)


def cmd_cv(args):
    ds = _load_dataset(args)
    params = _params(args) if args.method == Method.RHOMLDA.value else None
    report = kfold_cv(ds, args.folds, args.method, args.p, args.transform, params, args.seed)
    rows = list(enumerate(report.accuracies, start=1))
    _write_metrics(args.metrics_out, rows, report.mean, report.std)
    _write_json(
        args.metrics_out + ".json",
        {
            "method": report.method,
            "transform": report.transform,
            "folds": args.folds,
            "seed": args.seed,
            "p": args.p,
            "kappa_threshold": args.kappa_threshold,
            "energy": args.energy,
            "class_ids": list(report.class_ids),
            "fold_assignment": report.assignment.tolist(),
            "confusion_matrices": [c.tolist() for c in report.confusions],
        },
    )
    if args.figure:
        from .plotting import plot_fold_accuracies

        plot_fold_accuracies(report, args.figure)
    log.info("mean accuracy %.4f +/- %.4f", report.mean, report.std)


def cmd_project(args):
    model = io.load_model(args.model)
    io.write_tensor(args.out, project(model, io.read_tensor(args.data)))


def cmd_condition_report(args):
    ds = _load_dataset(args)
    spec = make_spec(args.transform, ds.data.shape[2:])
    params = _params(args)
    W, _ = scatter_slices(ds, spec)
    _, report = robust_scatter_slices(W, spec, params)
    with open(args.out, "w", newline="") as f:
        w = csv.writer(f, lineterminator="\n")
        w.writerow(
            ["multi_index", "kappa_pre", "log10_kappa_pre", "kappa_post", "log10_kappa_post", "ill_flag"]
        )
        for idx, pre, post, ill in zip(
            report.pre.indices, report.pre.kappa, report.post.kappa, report.pre.ill
        ):
            w.writerow(
                [
                    ":".join(str(i + 1) for i in idx),
                    _fmt(pre),
                    _fmt(np.log10(pre)),
                    _fmt(post),
                    _fmt(np.log10(post)),
                    "true" if ill else "false",
                ]
            )
    _write_json(
        args.out + ".json",
        {
            "transform": spec.kind.value,
            "original_dims": list(spec.original_dims),
            "padded_dims": list(spec.padded_dims),
            "kappa_threshold": params.kappa_threshold,
            "energy": params.energy,
            "slices": len(report.pre),
            "ill_slices": int(report.pre.ill.sum()),
        },
    )
    if args.figure:
        from .plotting import plot_condition_report

        plot_condition_report(
            report.pre.kappa, report.post.kappa, params.kappa_threshold, args.figure,
            title=f"{spec.kind.value} within-class scatter",
        )


def _robust_flags(p):
    p.add_argument("--kappa-threshold", type=float, default=DEFAULT_KAPPA_THRESHOLD)
    p.add_argument("--energy", type=float, default=DEFAULT_ENERGY)


def build_parser():
    parser = _Parser(prog="tlda", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("synth", help="generate a synthetic labeled dataset")
    p.add_argument("--classes", type=int, required=True)
    p.add_argument("--per-class", type=int, required=True)
    p.add_argument("--dims", type=_dims, required=True, help="sample dims, e.g. 4,3,2")
    p.add_argument("--sep", type=float, default=10.0)
    p.add_argument("--sigma", type=float, default=1.0)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True, help="output prefix")
    p.add_argument("--force-singular", action="store_true")
    p.set_defaults(func=cmd_synth)

    p = sub.add_parser("train", help="fit a model and save it")
    p.add_argument("--data", required=True)
    p.add_argument("--labels", required=True)
    p.add_argument("--method", choices=METHODS, default="homlda")
    p.add_argument("--transform", choices=TRANSFORMS, default="dft")
    p.add_argument("--p", type=int, default=None)
    _robust_flags(p)
    p.add_argument("--model-out", required=True)
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("evaluate", help="nearest-neighbor accuracy of a saved model")
    p.add_argument("--model", required=True)
    p.add_argument("--data", required=True)
    p.add_argument("--labels", required=True)
    p.add_argument("--metrics-out", required=True)
    p.set_defaults(func=cmd_evaluate)

    p = sub.add_parser("cv", help="stratified k-fold cross-validation")
    p.add_argument("--data", required=True)
    p.add_argument("--labels", required=True)
    p.add_argument("--folds", type=int, default=5)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--method", choices=METHODS, default="homlda")
    p.add_argument("--transform", choices=TRANSFORMS, default="dft")
    p.add_argument("--p", type=int, default=None)
    _robust_flags(p)
    p.add_argument("--metrics-out", required=True)
    p.add_argument("--figure", help="also render per-fold accuracies to this image")
    p.set_defaults(func=cmd_cv)

    p = sub.add_parser("project", help="project samples with a saved model")
    p.add_argument("--model", required=True)
    p.add_argument("--data", required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_project)

    p = sub.add_parser("condition-report", help="per-slice condition numbers of W")
    p.add_argument("--data", required=True)
    p.add_argument("--labels", required=True)
    p.add_argument("--transform", choices=TRANSFORMS, default="dft")
    _robust_flags(p)
    p.add_argument("--out", required=True)
    p.add_argument("--figure", help="also render log10(kappa) per slice to this image")
    p.set_defaults(func=cmd_condition_report)
    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(
        level=logging.INFO if args.verbose else logging.WARNING,
        format="%(levelname)s %(message)s",
    )
    try:
        with _thread_limit():
            args.func(args)
    except UsageError as exc:
        print(f"tlda: error: {exc}", file=sys.stderr)
        return 1
    except (TldaError, OSError, ValueError) as exc:
        print(f"tlda: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
