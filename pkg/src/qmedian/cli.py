"""Command-line surface.

Subcommands:
  gen       write a synthetic dataset with a target imbalance
  estimate  signed imbalance estimate at a threshold (JSON to stdout)
  median    binary-search median estimate (JSON to stdout)
  sweep     closed-form/simulator loop sweep (CSV to a file)
  check     numeric verification suite (report to stdout)
  baseline  classical Monte Carlo estimate (JSON to stdout)

Exit codes: 0 success, 1 usage/parameter error, 2 data or I/O error,
3 numerical failure (including a failed check).

Numbers are serialized with 17 significant digits, which round-trips
doubles exactly, so identical invocations produce byte-identical output.
The seed can also come from the QMEDIAN_SEED environment variable; an
explicit --seed wins.  Files are written atomically (temp file + rename).
"""

from __future__ import annotations

import argparse
import math
import os
import sys
from typing import List, Optional

from .adaptive import median_search_counted
from .baseline import classical_estimate
from .checks import run_checks
from .dataset import (
    Dataset,
    dataset_to_text,
    make_oracle,
    oracle_from_mask,
    rank_below,
    read_dataset,
    synth_dataset,
)
from .driver import amplification_loop, prepare
from .errors import DataError, NumericalError, ParameterError, QmedianError
from .estimator import EstimateRecord, eps_est
from .model import k_closed_form, k_small_eps_approx, predicted_fraction
from .statevector import probability_of

_MODE_ALIASES = {"exact": "exact", "sampled": "sampled", "sample": "sampled"}


# ---------------------------------------------------------------- emission

def _fmt(x) -> str:
    """One JSON token: floats at 17 significant digits."""
    if isinstance(x, bool):
        return "true" if x else "false"
    if isinstance(x, float):
        if not math.isfinite(x):
            raise NumericalError(f"cannot serialize non-finite number {x!r}")
        return format(x, ".17g")
    if isinstance(x, int):
        return str(x)
    if isinstance(x, str):
        return '"' + x.replace("\\", "\\\\").replace('"', '\\"') + '"'
    if x is None:
        return "null"
    raise TypeError(f"unsupported JSON value: {type(x)!r}")


def _json_line(d: dict) -> str:
    body = ", ".join(f'"{k}": {_fmt(v)}' for k, v in d.items())
    return "{" + body + "}\n"


def _record_dict(rec: EstimateRecord) -> dict:
    return {
        "eps_hat": rec.eps_hat,
        "sign": rec.sign if rec.sign is not None else "unknown",
        "ci_lo": rec.ci_lo,
        "ci_hi": rec.ci_hi,
        "f_hat": rec.f_hat,
        "exact_p": rec.exact_p,
        "alpha": rec.alpha,
        "beta": rec.beta,
        "theta": rec.theta,
        "kappa": rec.kappa,
        "eps0": rec.eps0,
        "mode": rec.mode,
        "seed": rec.seed,
        "n": rec.n,
        "verdict": rec.verdict,
    }


def _atomic_write(path: str, text: str) -> None:
    tmp = path + ".tmp"
    try:
        with open(tmp, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except OSError as e:
        raise DataError(f"cannot write {path}: {e}") from None


# ---------------------------------------------------------------- parsing

class _Parser(argparse.ArgumentParser):
    """argparse that reports usage problems through the exit-code map."""

    def error(self, message):
        raise ParameterError(message)


def _resolve_seed(ns) -> int:
    if ns.seed is not None:
        return ns.seed
    env = os.environ.get("QMEDIAN_SEED")
    if env is not None:
        try:
            return int(env, 0)
        except ValueError:
            raise ParameterError(
                f"QMEDIAN_SEED is not an integer: {env!r}"
            ) from None
    return 0


def _add_seed(p) -> None:
    p.add_argument(
        "--seed", type=int, default=None,
        help="master seed (default: $QMEDIAN_SEED, then 0)",
    )


def _add_mode(p) -> None:
    p.add_argument(
        "--mode", choices=sorted(_MODE_ALIASES), default="exact",
        help="exact readout or sampled measurement (default exact)",
    )


def build_parser() -> _Parser:
    parser = _Parser(prog="qmedian", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gen", help="write a synthetic dataset")
    p.add_argument("--n", type=int, required=True, help="register bits; 2^n values")
    p.add_argument("--eps", type=float, required=True, help="target imbalance")
    p.add_argument("--mu", type=float, default=0.0, help="threshold the imbalance refers to")
    p.add_argument("--out", required=True, help="output path")
    _add_seed(p)
    p.set_defaults(func=cmd_gen)

    p = sub.add_parser("estimate", help="signed imbalance estimate at a threshold")
    p.add_argument("--data", required=True, help="dataset file, one value per line")
    p.add_argument("--mu", type=float, required=True, help="threshold")
    p.add_argument("--eps0", type=float, default=0.1, help="prior magnitude bound (default 0.1)")
    p.add_argument("--theta", type=float, default=0.1, help="relative precision target (default 0.1)")
    p.add_argument("--kappa", type=float, default=3.0, help="confidence multiplier (default 3)")
    p.add_argument("--alpha", type=int, default=None, help="override repetition count")
    p.add_argument("--beta", type=int, default=None, help="override loop count")
    p.add_argument("--resimulate", action="store_true",
                   help="re-prepare the register for every sample (sampled mode)")
    _add_mode(p)
    _add_seed(p)
    p.set_defaults(func=cmd_estimate)

    p = sub.add_parser("median", help="median estimate by threshold bisection")
    p.add_argument("--data", required=True)
    p.add_argument("--min", type=float, default=None, dest="vmin",
                   help="search bracket lower end (default: dataset min)")
    p.add_argument("--max", type=float, default=None, dest="vmax",
                   help="search bracket upper end (default: dataset max)")
    p.add_argument("--resolution", type=float, default=None,
                   help="bracket width to stop at (default: span/2^20)")
    p.add_argument("--eps-min", type=float, default=0.01, dest="eps_min",
                   help="finest imbalance scale to resolve (default 0.01)")
    p.add_argument("--theta", type=float, default=0.1)
    p.add_argument("--kappa", type=float, default=3.0)
    p.add_argument("--scale-rule", choices=("halve", "estimate"), default="halve",
                   dest="scale_rule",
                   help="how the adaptive bound shrinks (default halve)")
    _add_mode(p)
    _add_seed(p)
    p.set_defaults(func=cmd_median)

    p = sub.add_parser("sweep", help="loop sweep of the closed-form amplitudes")
    p.add_argument("--eps", type=float, required=True, help="imbalance, in [-1, 1]")
    p.add_argument("--beta-max", type=int, required=True, dest="beta_max",
                   help="last loop count (rows r = 0..beta-max)")
    p.add_argument("--n", type=int, default=None,
                   help="also simulate a 2^n register (eps must sit on its grid)")
    p.add_argument("--csv", required=True, help="output CSV path")
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("check", help="numeric verification suite")
    p.add_argument("--n", type=int, default=8, help="register bits (default 8)")
    p.add_argument("--tol", type=float, default=1e-10, help="max error allowed (default 1e-10)")
    _add_seed(p)
    p.set_defaults(func=cmd_check)

    p = sub.add_parser("baseline", help="classical Monte Carlo estimate")
    p.add_argument("--data", required=True)
    p.add_argument("--mu", type=float, required=True)
    p.add_argument("--samples", type=int, required=True, help="number of draws")
    _add_seed(p)
    p.set_defaults(func=cmd_baseline)

    return parser


# ---------------------------------------------------------------- commands

def cmd_gen(ns) -> int:
    d, achieved = synth_dataset(ns.n, ns.eps, ns.mu, _resolve_seed(ns))
    _atomic_write(ns.out, dataset_to_text(d))
    sys.stdout.write(f"achieved_eps={format(achieved, '.17g')}\n")
    return 0


def cmd_estimate(ns) -> int:
    d = read_dataset(ns.data)
    rec = eps_est(
        d, ns.mu, eps0=ns.eps0, theta=ns.theta, kappa=ns.kappa,
        mode=_MODE_ALIASES[ns.mode], seed=_resolve_seed(ns),
        alpha=ns.alpha, beta=ns.beta, resimulate=ns.resimulate,
    )
    sys.stdout.write(_json_line(_record_dict(rec)))
    return 0


def cmd_median(ns) -> int:
    d = read_dataset(ns.data)
    vmin = float(d.values.min()) if ns.vmin is None else ns.vmin
    vmax = float(d.values.max()) if ns.vmax is None else ns.vmax
    if not vmin < vmax:
        raise ParameterError(f"need min < max, got {vmin} >= {vmax}")
    delta = (vmax - vmin) / 2.0 ** 20 if ns.resolution is None else ns.resolution
    sys.stderr.write(
        "note: imbalance magnitudes are assumed below 0.1 per estimation call; "
        f"the adaptive bound starts at 0.1 and shrinks by rule "
        f"'{ns.scale_rule}' down to eps-min; values equal to a threshold "
        "count as above it.\n"
    )
    mu_hat, steps, calls = median_search_counted(
        d, vmin, vmax, delta, ns.eps_min, theta=ns.theta, kappa=ns.kappa,
        mode=_MODE_ALIASES[ns.mode], seed=_resolve_seed(ns),
        update_rule=ns.scale_rule,
    )
    out = {
        "mu_hat": mu_hat,
        "rank_below": rank_below(d, mu_hat),
        "steps": steps,
        "calls": calls,
    }
    sys.stdout.write(_json_line(out))
    return 0


def cmd_sweep(ns) -> int:
    if ns.beta_max < 0:
        raise ParameterError(f"beta-max must be >= 0, got {ns.beta_max}")
    eps = ns.eps
    with_exact = ns.n is not None
    header = "r,k_re,k_im,k_abs,approx_2sqrt2,p_below_analytic"
    if with_exact:
        header += ",p_below_exact,abs_err"
        size = 1 << ns.n
        b_real = (1.0 + eps) * size / 2.0
        n_below = round(b_real)
        if abs(b_real - n_below) > 1e-9:
            raise ParameterError(
                f"eps={eps} is not on the n={ns.n} grid (nearest below-count {n_below})"
            )
        mask = [True] * n_below + [False] * (size - n_below)
        o = oracle_from_mask(ns.n, mask)
        state = prepare(o)
    lines = [header + "\n"]

    def g(x: float) -> str:
        return format(x, ".17g")

    for r in range(ns.beta_max + 1):
        k = k_closed_form(eps, r)
        p_model = predicted_fraction(eps, r)
        row = [str(r), g(k.real), g(k.imag), g(abs(k)),
               g(k_small_eps_approx(abs(eps), r)), g(p_model)]
        if with_exact:
            p_exact = probability_of(state, o.below_mask)
            row += [g(p_exact), g(abs(p_exact - p_model))]
            if r < ns.beta_max:
                amplification_loop(state, o, 1)
        lines.append(",".join(row) + "\n")
    _atomic_write(ns.csv, "".join(lines))
    return 0


def cmd_check(ns) -> int:
    results = run_checks(ns.n, _resolve_seed(ns))
    failed = False
    for res in results:
        ok = res.max_err <= ns.tol
        failed = failed or not ok
        sys.stdout.write(
            f"{res.name:<24s} max_err={format(res.max_err, '.17g')} "
            f"tol={format(ns.tol, '.17g')} {'PASS' if ok else 'FAIL'}\n"
        )
    return 3 if failed else 0


def cmd_baseline(ns) -> int:
    d = read_dataset(ns.data)
    o = make_oracle(d, ns.mu)
    f_hat, eps_hat = classical_estimate(o, ns.samples, _resolve_seed(ns))
    out = {
        "f_hat": f_hat,
        "eps_hat": eps_hat,
        "m": ns.samples,
        "stderr_model": 2.0 * math.sqrt(max(f_hat * (1.0 - f_hat), 0.0) / ns.samples),
    }
    sys.stdout.write(_json_line(out))
    return 0


# ---------------------------------------------------------------- entry

def main(argv: Optional[List[str]] = None) -> int:
    try:
        ns = build_parser().parse_args(argv)
        return ns.func(ns)
    except ParameterError as e:
        sys.stderr.write(f"error: {e}\n")
        return 1
    except (DataError, OSError) as e:
        sys.stderr.write(f"error: {e}\n")
        return 2
    except NumericalError as e:
        sys.stderr.write(f"error: {e}\n")
        return 3
    except QmedianError as e:  # any remaining package error is a data problem
        sys.stderr.write(f"error: {e}\n")
        return 2


def entrypoint() -> None:
    sys.exit(main())


if __name__ == "__main__":
    entrypoint()
