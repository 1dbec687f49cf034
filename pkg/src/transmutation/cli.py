"""Command line driver: ``transmute <verb> [--config FILE] [--out DIR]``.

Exit codes: 0 success, 1 configuration/parse error, 2 numerical error
(including grid mismatch and truncation), 3 I/O error, 4 failed verification.
"""
from __future__ import annotations

import argparse
import sys
from pathlib import Path

from . import potentials
from .config import ConfigError, RunConfig
from .errors import TransmutationError, TruncationError
from .grid import Grid, fmt, read_csv, write_csv
from .kernel import build_kernel, write_kernel
from .lbase import build_slbase, solution_pair, write_slbase
from .operator import TransmutationSpec, apply_T, apply_T_inverse, apply_T_transpose, general_apply, general_inverse_apply
from .spps import find_eigenvalues, required_k_max, spps_solve, write_solution
from .verify import format_table, run_checks

EXIT_PARSE, EXIT_NUMERIC, EXIT_IO, EXIT_VERIFY = 1, 2, 3, 4
APPLY_CHOICES = ("T", "Tinv", "Ttrans", "spec", "specinv")


def _setup(cfg: RunConfig):
    grid = Grid(cfg.a, cfg.n)
    try:
        q = potentials.parse_descriptor(grid, cfg.potential)
    except TransmutationError as exc:
        if isinstance(exc.__cause__, OSError):
            raise exc.__cause__
        raise ConfigError(str(exc)) from exc
    return grid, q


def _kernel(cfg, q):
    return build_kernel(q, cfg.kernel_tol, cfg.kernel_n_max)


def _outdir(cfg) -> Path:
    out = Path(cfg.out)
    out.mkdir(parents=True, exist_ok=True)
    return out


def cmd_kernel(cfg: RunConfig, args) -> int:
    _, q = _setup(cfg)
    out = _outdir(cfg)
    try:
        K = _kernel(cfg, q)
    except TruncationError as exc:
        write_kernel(exc.partial, out / "kernel.csv")
        raise
    write_kernel(K, out / "kernel.csv")
    print(f"kernel: {K.iterations} terms, tail bound {K.tail_bound:.3e}")
    return 0


def cmd_basis(cfg: RunConfig, args) -> int:
    _, q = _setup(cfg)
    pair = solution_pair(q, cfg.spec)
    base = build_slbase(pair, cfg.k_max)
    write_slbase(base, _outdir(cfg) / "basis.csv")
    return 0


def cmd_apply(cfg: RunConfig, args) -> int:
    grid, q = _setup(cfg)
    u = read_csv(args.input)
    K = _kernel(cfg, q)
    spec = TransmutationSpec(*cfg.spec)
    ops = {
        "T": lambda: apply_T(K, u),
        "Tinv": lambda: apply_T_inverse(K, u),
        "Ttrans": lambda: apply_T_transpose(K, u),
        "spec": lambda: general_apply(spec, K, u),
        "specinv": lambda: general_inverse_apply(spec, K, u),
    }
    result = ops[args.which]()
    target = Path(args.output) if args.output else _outdir(cfg) / f"apply_{args.which}.csv"
    write_csv(result, target)
    return 0


def _base_for(cfg, q, lam_abs):
    need = max(cfg.k_max, required_k_max(lam_abs, cfg.a, cfg.spps_tol))
    return build_slbase(solution_pair(q, cfg.spec), need)


def cmd_spps(cfg: RunConfig, args) -> int:
    _, q = _setup(cfg)
    out = _outdir(cfg)
    base = _base_for(cfg, q, max(abs(l) for l in cfg.lambdas))
    for i, lam in enumerate(cfg.lambdas):
        write_solution(spps_solve(base, lam, cfg.spps_tol), out / f"spps_{i}.csv")
    return 0


def cmd_eig(cfg: RunConfig, args) -> int:
    _, q = _setup(cfg)
    lam_abs = max(abs(cfg.lambda_min), abs(cfg.lambda_max))
    base = _base_for(cfg, q, lam_abs)
    roots = find_eigenvalues(base, cfg.eig_left, cfg.eig_right, cfg.lambda_min, cfg.lambda_max,
                             cfg.eig_count, samples=cfg.eig_samples, tol=cfg.spps_tol)
    k_used = max((spps_solve(base, r, cfg.spps_tol).k_used for r in roots), default=0)
    path = _outdir(cfg) / "eigenvalues.txt"
    with path.open("w") as fh:
        fh.write(f"# interval = {fmt(cfg.eig_left)}, {fmt(cfg.eig_right)}\n")
        fh.write(f"# scan = {fmt(cfg.lambda_min)}, {fmt(cfg.lambda_max)}, {cfg.eig_samples}\n")
        fh.write(f"# tolerance = {fmt(1e-8)}\n# k_used = {k_used}\n")
        for r in roots:
            fh.write(f"{fmt(r.real)}\n")
    print("eigenvalues: " + " ".join(fmt(r.real) for r in roots))
    return 0


def cmd_verify(cfg: RunConfig, args) -> int:
    _, q = _setup(cfg)
    checks = run_checks(q, spec=cfg.spec, lambdas=cfg.lambdas, k_max=cfg.k_max,
                        family_size=cfg.weak_family_size, kernel_tol=cfg.kernel_tol,
                        kernel_n_max=cfg.kernel_n_max)
    print(format_table(checks), file=sys.stderr)
    failed = [c.name for c in checks if not c.passed]
    print(f"verify: {len(checks) - len(failed)}/{len(checks)} checks passed")
    return EXIT_VERIFY if failed else 0


COMMANDS = {
    "kernel": cmd_kernel, "basis": cmd_basis, "apply": cmd_apply,
    "spps": cmd_spps, "eig": cmd_eig, "verify": cmd_verify,
}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", default=argparse.SUPPRESS, help="key = value run configuration")
    common.add_argument("--out", default=argparse.SUPPRESS, help="output directory (overrides config)")
    parser = argparse.ArgumentParser(prog="transmute", parents=[common],
                                     description="Transmutation operators and SPPS solutions for d2/dx2 - q.")
    sub = parser.add_subparsers(dest="verb", required=True)
    sub.add_parser("kernel", parents=[common], help="solve for the Goursat kernel")
    sub.add_parser("basis", parents=[common], help="base solutions and the standard L-base")
    ap = sub.add_parser("apply", parents=[common], help="apply T, its inverse/transpose or a general spec")
    ap.add_argument("--input", required=True, help="CSV function x,value_re[,value_im]")
    ap.add_argument("--which", choices=APPLY_CHOICES, default="T")
    ap.add_argument("--output", help="output CSV path (default <out>/apply_<which>.csv)")
    sub.add_parser("spps", parents=[common], help="SPPS solutions for each lambda")
    sub.add_parser("eig", parents=[common], help="Dirichlet eigenvalues by SPPS + bisection")
    sub.add_parser("verify", parents=[common], help="run the self-consistency checks")
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = RunConfig.load(args.config) if getattr(args, "config", None) else RunConfig()
        if getattr(args, "out", None):
            cfg = cfg.with_overrides(out=args.out)
        return COMMANDS[args.verb](cfg, args)
    except ConfigError as exc:
        print(f"transmute: configuration error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except OSError as exc:
        print(f"transmute: I/O error: {exc}", file=sys.stderr)
        return EXIT_IO
    except TransmutationError as exc:
        print(f"transmute: numerical error: {exc}", file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
