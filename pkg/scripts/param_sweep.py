"""Two-parameter sensitivity sweep on a synthetic dataset, written as CSV.

    python3 scripts/param_sweep.py --method bd-ldl --metric chebyshev --output sweep.csv
    python3 scripts/param_sweep.py --method bd-le --output le_sweep.csv
"""
import argparse

from bdloss import experiments as ex
from bdloss.data import SyntheticSpec, gen_synthetic, load_dataset
from bdloss.metrics import METRICS
from bdloss.report import write_text


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--method", choices=("bd-ldl", "bd-le"), default="bd-ldl")
    ap.add_argument("--metric", choices=METRICS, default="chebyshev")
    ap.add_argument("--data", default=None, help="dataset file (default: synthetic)")
    ap.add_argument("--seed", type=int, default=1, help="generator seed")
    ap.add_argument("--folds", type=int, default=10)
    ap.add_argument("--cv-seed", type=int, default=0)
    ap.add_argument("--output", default="-")
    args = ap.parse_args(argv)

    ds = load_dataset(args.data) if args.data else gen_synthetic(SyntheticSpec(seed=args.seed))
    names, values = ex.param_sweep(ds, args.method, ex.POWERS, ex.POWERS, args.metric,
                                   args.folds, args.cv_seed)
    write_text(ex.sweep_csv(names, ex.POWERS, ex.POWERS, values), args.output)


if __name__ == "__main__":
    main()
