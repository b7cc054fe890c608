"""Command line entry point: ``bdloss <subcommand> ...``.

Exit codes: 0 success, 2 parse/validation error, 3 numerical failure.
"""
import argparse
import logging
import sys

import numpy as np

from . import experiments as ex
from .data import Dataset, SyntheticSpec, gen_synthetic, load_dataset, save_dataset
from .errors import BdlossError, IoError, NumericalError, ValidationError
from .ldl import load_ldl_model, predict_ldl, save_ldl_model
from .le import recover, save_le_model
from .metrics import METRICS, evaluate_all
from .report import EvalReport, ReportRow, emit_report, to_json, write_text

log = logging.getLogger("bdloss")


def _floats(text):
    return [float(t) for t in text.split(",") if t.strip()]


def _add_shared(p, data=True):
    if data:
        p.add_argument("--data", required=True, help="dataset file")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--folds", type=int, default=10)
    p.add_argument("--output", default="-", help="output path ('-' for stdout)")
    p.add_argument("--format", choices=("json", "csv"), default="json")


def _add_ldl(p):
    p.add_argument("--lambda1", type=float, default=1e-3)
    p.add_argument("--lambda2", type=float, default=1e-2)
    p.add_argument("--bias", action="store_true", help="append a constant feature")
    p.add_argument("--standardize", action="store_true", help="z-score features")


def _add_le(p):
    p.add_argument("--alpha", type=float, default=1e-3)
    p.add_argument("--lambda", dest="lam", type=float, default=1e-3)
    p.add_argument("--knn", type=int, default=None, help="neighbours (default c+1)")
    p.add_argument("--map", choices=("linear", "egk"), default="egk")


def build_parser():
    parser = argparse.ArgumentParser(prog="bdloss", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="cmd", required=True)

    p = sub.add_parser("gen", help="write a synthetic dataset")
    _add_shared(p, data=False)
    p.add_argument("--n", type=int, default=300)
    p.add_argument("--m", type=int, default=24)
    p.add_argument("--c", type=int, default=4)
    p.add_argument("--noise", type=float, default=0.05)
    p.add_argument("--clusters", type=int, default=3)
    p.add_argument("--force", action="store_true")

    p = sub.add_parser("train-ldl", help="fit an LDL model and save it")
    _add_shared(p)
    _add_ldl(p)
    p.add_argument("--method", choices=ex.LDL_METHODS, default="bd-ldl")
    p.add_argument("--lambda", dest="lam", type=float, default=None, help="ud-ldl ridge weight")

    p = sub.add_parser("predict-ldl", help="predict distributions with a saved model")
    _add_shared(p)
    p.add_argument("--model", required=True)
    p.add_argument("--force", action="store_true")

    p = sub.add_parser("enhance", help="recover distributions from logical labels")
    _add_shared(p)
    _add_le(p)
    p.add_argument("--method", choices=ex.LE_METHODS, default="bd-le")
    p.add_argument("--model-out", default=None, help="also save the LE model here")
    p.add_argument("--report", default=None, help="evaluation report path (needs true D)")
    p.add_argument("--force", action="store_true")

    p = sub.add_parser("eval", help="score predicted distributions against the truth")
    _add_shared(p)
    p.add_argument("--pred", required=True, help="dataset file holding predictions")

    p = sub.add_parser("cv", help="k-fold cross-validation of an LDL method")
    _add_shared(p)
    _add_ldl(p)
    p.add_argument("--method", choices=ex.LDL_METHODS, default="bd-ldl")
    p.add_argument("--lambda", dest="lam", type=float, default=None)

    for name, helptext in (("grid", "grid search"), ("sweep", "two-parameter sweep (CSV)")):
        p = sub.add_parser(name, help=helptext)
        _add_shared(p)
        _add_ldl(p)
        _add_le(p)
        p.add_argument("--method", choices=ex.LDL_METHODS + ex.LE_METHODS, default="bd-ldl")
        p.add_argument("--metric", choices=METRICS, default="chebyshev")
        if name == "grid":
            p.add_argument("--param", action="append", default=[],
                           help="NAME=v1,v2,... grid axis; repeatable (default: 10^-4..10^3 per tunable)")
        else:
            p.add_argument("--range1", type=_floats, default=list(ex.POWERS))
            p.add_argument("--range2", type=_floats, default=list(ex.POWERS))

    p = sub.add_parser("pipeline", help="LE -> LDL comparison against ground truth")
    _add_shared(p)
    _add_ldl(p)
    _add_le(p)
    return parser


def _ldl_params(args):
    out = {"lambda1": args.lambda1, "lambda2": args.lambda2,
           "bias": args.bias, "standardize": args.standardize}
    if getattr(args, "lam", None) is not None:
        out["lambda"] = args.lam
    return out


def _le_params(args):
    return {"alpha": args.alpha, "lambda": args.lam, "knn": args.knn, "map": args.map}


def _method_params(args):
    if args.method in ex.LDL_METHODS:
        p = _ldl_params(args)
        if args.method == "ud-ldl" and "lambda" not in p:
            p["lambda"] = ex.DEFAULTS["ud-ldl"]["lambda"]
        return p
    return _le_params(args)


def _check_output(path, force):
    import os

    if path not in (None, "-") and os.path.exists(path) and not force:
        raise IoError(f"{path} exists (use --force to overwrite)")


def cmd_gen(args):
    spec = SyntheticSpec(args.n, args.m, args.c, args.noise, args.seed, args.clusters)
    ds = gen_synthetic(spec)
    if args.output == "-":
        raise ValidationError("gen needs --output")
    save_dataset(ds, args.output, force=args.force)


def cmd_train_ldl(args):
    ds = load_dataset(args.data)
    if ds.D is None:
        raise ValidationError("training needs distributions (LDL or BOTH dataset)")
    params = _ldl_params(args)
    if args.method == "ud-ldl":
        params.setdefault("lambda", ex.DEFAULTS["ud-ldl"]["lambda"])
    model = ex.fit_ldl(args.method, params, ds.X, ds.D)
    if args.output == "-":
        raise ValidationError("train-ldl needs --output")
    save_ldl_model(model, args.output)


def cmd_predict_ldl(args):
    ds = load_dataset(args.data)
    model = load_ldl_model(args.model)
    pred = Dataset(ds.name, ds.X, predict_ldl(model, ds.X))
    _check_output(args.output, args.force)
    if args.output == "-":
        raise ValidationError("predict-ldl needs --output")
    save_dataset(pred, args.output, force=True)


def cmd_enhance(args):
    ds = load_dataset(args.data).with_logical()
    model = ex.fit_le(args.method, _le_params(args), ds.X, ds.L)
    Dhat = recover(model, ds.X)
    _check_output(args.output, args.force)
    if args.output == "-":
        raise ValidationError("enhance needs --output")
    save_dataset(Dataset(ds.name, ds.X, Dhat, ds.L), args.output, force=True)
    if args.model_out:
        save_le_model(model, args.model_out)
    if args.report:
        if ds.D is None:
            raise ValidationError("--report needs ground-truth distributions in --data")
        rows = [ReportRow(args.method, ds.name, [evaluate_all(ds.D, Dhat)]),
                ReportRow("normalized_logical", ds.name,
                          [evaluate_all(ds.D, ex.normalized_logical(ds.L))])]
        meta = {"protocol": "single-pass", "method": args.method,
                "params": ex.resolve_params(args.method, _le_params(args)), "folds": 1,
                "n_iter": model.info["n_iter"], "converged": model.info["converged"]}
        emit_report(EvalReport(rows, meta), args.format, args.report)


def cmd_eval(args):
    truth = load_dataset(args.data)
    pred = load_dataset(args.pred)
    if truth.D is None or pred.D is None:
        raise ValidationError("both files need distributions")
    if truth.D.shape != pred.D.shape:
        raise ValidationError(f"shape mismatch {truth.D.shape} vs {pred.D.shape}")
    rep = EvalReport([ReportRow(pred.name, truth.name, [evaluate_all(truth.D, pred.D)])],
                     {"protocol": "eval", "folds": 1})
    emit_report(rep, args.format, args.output)


def cmd_cv(args):
    ds = load_dataset(args.data)
    rep = ex.run_cv(ds, args.method, _method_params(args), args.folds, args.seed)
    emit_report(rep, args.format, args.output)


def _parse_grid(specs):
    grid = {}
    for s in specs:
        name, _, vals = s.partition("=")
        if not vals:
            raise ValidationError(f"bad --param {s!r}; expected NAME=v1,v2,...")
        grid[name.strip()] = _floats(vals)
    return grid or None


def cmd_grid(args):
    ds = load_dataset(args.data)
    res = ex.grid_search(ds, args.method, _parse_grid(args.param), args.folds, args.seed,
                         args.metric, fixed=_method_params(args))
    text = to_json(res) if args.format == "json" else ex.grid_csv(res)
    write_text(text, args.output)


def cmd_sweep(args):
    ds = load_dataset(args.data)
    names, values = ex.param_sweep(ds, args.method, args.range1, args.range2, args.metric,
                                   args.folds, args.seed, fixed=_method_params(args))
    write_text(ex.sweep_csv(names, args.range1, args.range2, values), args.output)


def cmd_pipeline(args):
    ds = load_dataset(args.data)
    rep = ex.pipeline_le_ldl(ds, _le_params(args), _ldl_params(args), args.folds, args.seed)
    emit_report(rep, args.format, args.output)


COMMANDS = {
    "gen": cmd_gen,
    "train-ldl": cmd_train_ldl,
    "predict-ldl": cmd_predict_ldl,
    "enhance": cmd_enhance,
    "eval": cmd_eval,
    "cv": cmd_cv,
    "grid": cmd_grid,
    "sweep": cmd_sweep,
    "pipeline": cmd_pipeline,
}


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 2 if exc.code else 0
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        COMMANDS[args.cmd](args)
    except (ValidationError, IoError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (NumericalError, np.linalg.LinAlgError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return 3
    except BdlossError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
