"""Command-line experiments.  Every scenario prints CSV with a header row.

Options can also come from a ``key=value`` file given with ``--config``;
command-line flags take precedence over the file.  Exit status is 0 on
success, 1 for configuration errors and 2 when a reproduction check fails.
"""

from __future__ import annotations

import argparse
import csv
import io
import sys
import time
from pathlib import Path

import numpy as np

from . import bsc, coset, exponents, gf2, lt, nested, reproduce
from .channels import BEC, parse_channel
from .degrees import DegreeDistribution, Ensemble, de_threshold, parse_polynomial, read_distribution
from .seeding import trial_rng

EXIT_OK, EXIT_CONFIG, EXIT_CHECK = 0, 1, 2


class ConfigError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise ConfigError(f"{self.prog}: {message}")


def _add(sub, name: str, help: str, required: tuple[str, ...] = ()) -> argparse.ArgumentParser:
    p = sub.add_parser(name, help=help)
    p.set_defaults(_required=required)
    p.add_argument("--config", type=Path, help="key=value file with default option values")
    p.add_argument("--output", type=Path, help="write CSV here instead of standard output")
    return p


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="wiretap", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", parser_class=_Parser, required=True)

    p = _add(sub, "threshold", "erasure threshold of an LDPC ensemble by density evolution")
    p.add_argument("--lambda", dest="lam", help="variable edge polynomial, e.g. x^2")
    p.add_argument("--rho", help="check edge polynomial, e.g. x^5")
    p.add_argument("--dist", type=Path, help="distribution file instead of --lambda/--rho")
    p.add_argument("--tol", type=float, default=1e-4)

    p = _add(sub, "simulate-ewt", "secured fraction of a coset code against erasure leaks",
             ("code", "leak", "trials", "seed"))
    p.add_argument("--code", type=Path, help="sparse generator matrix file")
    p.add_argument("--leak", type=float)
    p.add_argument("--trials", type=int)
    p.add_argument("--seed", type=int)

    p = _add(sub, "lt-bench", "build a linear-time decodable code and time its decoder",
             ("n", "profile", "trials", "seed"))
    p.add_argument("--n", type=int)
    p.add_argument("--profile", choices=sorted(PROFILES))
    p.add_argument("--trials", type=int)
    p.add_argument("--seed", type=int)

    p = _add(sub, "simulate-becbec", "nested codes over erasure main and wiretap channels",
             ("d1", "d2", "n", "eps_m", "eps_w", "trials", "seed"))
    p.add_argument("--d1", type=Path, help="distribution file of the fine code")
    p.add_argument("--d2", type=Path, help="distribution file of the coarse code")
    p.add_argument("--n", type=int)
    p.add_argument("--eps-m", dest="eps_m", type=float)
    p.add_argument("--eps-w", dest="eps_w", type=float)
    p.add_argument("--trials", type=int)
    p.add_argument("--seed", type=int)

    p = _add(sub, "bsc-security", "security sum of a code family on a BSC wiretap", ("family", "n", "p"))
    p.add_argument("--family", help="spc, hamming or file:<generator file>")
    p.add_argument("--n", type=int)
    p.add_argument("--p", type=float)

    p = _add(sub, "exponent", "random-coding exponents and the two-channel bound (rates in bits)",
             ("main", "wiretap", "r1", "r2", "n"))
    p.add_argument("--main", help="channel: bec:<e>, bsc:<p>, noiseless or dmc:<file>")
    p.add_argument("--wiretap")
    p.add_argument("--r1", type=float)
    p.add_argument("--r2", type=float)
    p.add_argument("--n", type=int)

    p = _add(sub, "paper-examples", "run every reproduction check and print a pass/fail table", ("seed",))
    p.add_argument("--seed", type=int)
    p.add_argument("--quick", action="store_true", default=None, help="smaller block lengths and trial counts")
    return parser


def read_config(path: Path) -> dict[str, str]:
    values = {}
    try:
        text = path.read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, value = line.partition("=")
        if not sep:
            raise ConfigError(f"{path}:{lineno}: expected key=value")
        values[key.strip().replace("-", "_")] = value.strip()
    return values


def _config_defaults(sub: argparse.ArgumentParser, path: Path, command: str) -> dict:
    actions = {a.dest: a for a in sub._actions if a.dest not in ("help", "config", "output")}
    defaults = {}
    for key, text in read_config(path).items():
        action = actions.get("lam" if key == "lambda" else key)
        if action is None:
            raise ConfigError(f"unknown config key {key!r} for {command}")
        if isinstance(action, argparse._StoreTrueAction):
            value = text.lower() in ("1", "true", "yes", "on")
        else:
            try:
                value = action.type(text) if action.type else text
            except (TypeError, ValueError) as exc:
                raise ConfigError(f"bad value for {key}: {text!r}") from exc
            if action.choices is not None and value not in action.choices:
                raise ConfigError(f"{key} must be one of {sorted(action.choices)}")
        defaults[action.dest] = value
    return defaults


def parse_args(argv) -> argparse.Namespace:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.config is not None:
        # config values become defaults, so explicit flags still win
        sub = parser._subparsers._group_actions[0].choices[args.command]
        sub.set_defaults(**_config_defaults(sub, args.config, args.command))
        args = parser.parse_args(argv)
    missing = [k for k in args._required if getattr(args, k) is None]
    if missing:
        raise ConfigError(f"{args.command}: missing " + ", ".join("--" + k.replace("_", "-") for k in missing))
    return args


def _csv(header, rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    w.writerows(rows)
    return buf.getvalue()


def _num(x) -> str:
    return f"{float(x):.10g}"


# -- scenarios -------------------------------------------------------------


def run_threshold(args) -> str:
    if args.dist is not None:
        d = read_distribution(args.dist)
        if isinstance(d, Ensemble):
            d = d.to_edge()
    elif args.lam and args.rho:
        d = DegreeDistribution(parse_polynomial(args.lam), parse_polynomial(args.rho))
    else:
        raise ConfigError("threshold: give --lambda and --rho, or --dist")
    value = de_threshold(d, tol=args.tol)
    return _csv(["lambda", "rho", "threshold"], [[args.lam or "", args.rho or "", f"{value:.6f}"]])


def run_simulate_ewt(args) -> str:
    code = coset.build_code(gf2.read_sparse(args.code))
    r = coset.monte_carlo_security(code, args.leak, args.trials, args.seed)
    return _csv(
        ["n", "k", "leak", "trials", "secured_fraction", "mean_equivocation", "mean_equiv_rate"],
        [[code.n, code.k, _num(args.leak), args.trials, _num(r.secured_fraction),
          _num(r.mean_equivocation), _num(r.mean_equivocation_rate)]],
    )


PROFILES = {
    "v5c6-example": reproduce.build_v5c6_example,
    "paper-ltd-example": reproduce.build_ltd_example,
}


def run_lt_bench(args) -> str:
    code = PROFILES[args.profile](args.n, args.seed)
    staged, direct = [], []
    for i in range(args.trials):
        rng = trial_rng(args.seed, i)
        s = rng.integers(0, 2, code.secret_bits, dtype=np.uint8)
        x = lt.lt_encode(code, s, rng)
        t0 = time.perf_counter_ns()
        a = lt.lt_decode(code, x, check=False)
        t1 = time.perf_counter_ns()
        b = lt.direct_decode(code, x)
        t2 = time.perf_counter_ns()
        if not (np.array_equal(a, s) and np.array_equal(b, s)):
            raise RuntimeError(f"decode mismatch on trial {i}")
        staged.append(t1 - t0)
        direct.append(t2 - t1)
    return _csv(
        ["n", "gap", "gap_fraction", "secrecy_rate", "decode_ns_mean", "direct_decode_ns_mean"],
        [[code.n, code.gap, _num(code.gap_fraction), _num(code.secrecy_rate),
          _num(np.mean(staged)) if staged else "", _num(np.mean(direct)) if direct else ""]],
    )


def run_simulate_becbec(args) -> str:
    code = nested.build_nested(read_distribution(args.d1), read_distribution(args.d2), args.n, args.seed, eps_w=args.eps_w)
    ok = 0
    for i in range(args.trials):
        rng = trial_rng(args.seed, i)
        s = rng.integers(0, 2, code.secret_bits, dtype=np.uint8)
        y = BEC(args.eps_m).transmit(nested.nested_encode(code, s, rng), rng)
        decoded = nested.nested_decode(code, y)
        ok += decoded is not None and np.array_equal(decoded, s)
    return _csv(
        ["n", "r1", "r2", "secrecy_rate", "eps_m", "decode_success", "eps_w", "equivocation_bound_rate"],
        [[code.n, _num(code.r1), _num(code.r2), _num(code.secrecy_rate), _num(args.eps_m),
          _num(ok / args.trials if args.trials else 0.0), _num(args.eps_w),
          _num(nested.nested_equivocation_bound(code, args.eps_w) / code.n)]],
    )


def _family_generator(family: str, n: int) -> gf2.BinaryMatrix:
    if family == "spc":
        return bsc.spc_generator(n)
    if family == "hamming":
        return bsc.hamming_generator(bsc.hamming_order(n))
    if family.startswith("file:"):
        G = gf2.read_sparse(family[5:])
        if G.n_cols != n:
            raise ConfigError(f"generator has {G.n_cols} columns, --n is {n}")
        return G
    raise ConfigError(f"unknown family {family!r}")


def run_bsc_security(args) -> str:
    code = coset.build_code(_family_generator(args.family, args.n))
    total = bsc.security_sum(bsc.dual_weight_enumerator(code.H), args.p)
    return _csv(
        ["n", "k", "p", "security_sum", "max_coset_deviation", "secrecy_capacity_hp", "construction_limit_-log2(1-p)"],
        [[code.n, code.k, _num(args.p), _num(total), _num(bsc.max_coset_deviation(code, args.p)),
          _num(bsc.bsc_secrecy_capacity(args.p)), _num(bsc.construction_rate_limit(args.p))]],
    )


def run_exponent(args) -> str:
    ln2 = exponents.LN2
    r = exponents.ensemble_bound_report(
        parse_channel(args.main), parse_channel(args.wiretap), args.r1 * ln2, args.r2 * ln2, args.n
    )
    return _csv(
        ["n", "r1_bits", "r2_bits", "e_main_bits", "e_wiretap_bits", "log2_bound", "bound",
         "i_main_bits", "c_wiretap_bits", "frontier_bits"],
        [[r.n, _num(args.r1), _num(args.r2), _num(r.e_main / ln2), _num(r.e_wiretap / ln2),
          _num(r.log_bound / ln2), _num(r.bound), _num(r.i_main_bits), _num(r.c_wiretap_bits),
          _num(r.frontier_bits)]],
    )


def run_reproduction(args) -> tuple[str, bool]:
    results = reproduce.run_all(seed=args.seed, quick=bool(args.quick))
    rows = [[res.number, res.name, label, "pass" if ok else "FAIL", detail]
            for res in results for label, ok, detail in res.items]
    text = _csv(["criterion", "name", "check", "result", "detail"], rows)
    return text, all(res.passed for res in results)


SCENARIOS = {
    "threshold": run_threshold,
    "simulate-ewt": run_simulate_ewt,
    "lt-bench": run_lt_bench,
    "simulate-becbec": run_simulate_becbec,
    "bsc-security": run_bsc_security,
    "exponent": run_exponent,
    "paper-examples": run_reproduction,
}


def main(argv=None) -> int:
    try:
        args = parse_args(sys.argv[1:] if argv is None else argv)
        out = SCENARIOS[args.command](args)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    passed = True
    if isinstance(out, tuple):
        out, passed = out
    if args.output is not None:
        args.output.write_text(out)
    else:
        sys.stdout.write(out)
    return EXIT_OK if passed else EXIT_CHECK


if __name__ == "__main__":
    sys.exit(main())
