"""twistlab command-line interface.

Every command writes CSV (header row first) to --output or stdout.
Exit codes: 0 success, 2 configuration error, 3 constraint violation,
4 cache error, 1 any other library error.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

import numpy as np

from . import bounds, cache, correlation, hecke, sums, trace
from .config import ExperimentConfig, load_config, with_overrides
from .errors import CacheError, ConfigError, RangeConstraintViolated, TruncationNotConverged, TwistlabError
from .experiments import Table, run_identity_suite, run_sqrtcancel_histogram, run_sweep
from .window import SmoothWindow

EXIT_OK, EXIT_ERROR, EXIT_CONFIG, EXIT_CONSTRAINT, EXIT_CACHE = 0, 1, 2, 3, 4


def _u64(text: str) -> int:
    value = int(text, 0)
    if not 0 <= value < 2**64:
        raise argparse.ArgumentTypeError("seed must fit in an unsigned 64-bit integer")
    return value


def _global_flags(suppress: bool) -> argparse.ArgumentParser:
    # shared so the flags work before or after the subcommand
    d = argparse.SUPPRESS if suppress else None
    p = argparse.ArgumentParser(add_help=False, allow_abbrev=False)
    p.add_argument("--config", type=Path, default=d, help="key=value experiment file")
    p.add_argument("--seed", type=_u64, default=d)
    p.add_argument("--threads", type=int, default=d)
    p.add_argument("--output", type=Path, default=d, help="CSV destination (default stdout)")
    p.add_argument("--cache-dir", type=Path, default=d)
    return p


class _Parser(argparse.ArgumentParser):
    # short flags such as --c and --p must not be read as prefixes of --config, --cache-dir
    def __init__(self, *args, **kwargs):
        kwargs.setdefault("allow_abbrev", False)
        super().__init__(*args, **kwargs)


def _common_sum(p):
    p.add_argument("--X", type=float, required=True)
    p.add_argument("--Z", type=float, default=1.0)
    p.add_argument("--weight", type=int, default=12)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="twistlab", parents=[_global_flags(False)], allow_abbrev=False,
                                     description="Trace functions, Hecke coefficients and twisted sums.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)
    g = [_global_flags(True)]

    p = sub.add_parser("tabulate", parents=g, help="tabulate a coefficient or trace table")
    p.add_argument("table", choices=["kloosterman", "tau", "eigenform", "sym2"])
    p.add_argument("--d", type=int, default=2, help="Kloosterman degree")
    p.add_argument("--p", type=int, help="prime modulus for kloosterman")
    p.add_argument("--N", type=int, default=100)
    p.add_argument("--weight", type=int, default=12)

    p = sub.add_parser("ft", parents=g, help="normalized Fourier transform of a trace function")
    p.add_argument("--family", default="kl:2")
    p.add_argument("--q0", type=int, required=True)
    p.add_argument("--q1", type=int, help="second prime; the table is then K0*K1 with --family1")
    p.add_argument("--family1", default="chi:1")

    p = sub.add_parser("sum", parents=g, help="twisted sum of lambda(n) K(n) V(n/X)")
    p.add_argument("--q0", type=int, required=True)
    p.add_argument("--q1", type=int, required=True)
    p.add_argument("--k0", default="kl:3")
    p.add_argument("--k1", default="chi:1")
    _common_sum(p)

    p = sub.add_parser("rs-sum", parents=g, help="sum of A(n,r) lambda(n) K(n r^2) V(n r^2/X)")
    p.add_argument("--q0", type=int, required=True)
    p.add_argument("--q1", type=int, required=True)
    p.add_argument("--k0", default="kl:3")
    p.add_argument("--k1", default="chi:1")
    _common_sum(p)

    p = sub.add_parser("ap-sum", parents=g, help="coefficient sum over an arithmetic progression")
    p.add_argument("--a", type=int, required=True)
    p.add_argument("--q", type=int, required=True)
    _common_sum(p)

    p = sub.add_parser("delta-check", parents=g, help="trivial delta expansion on |n - r| <= span p q0")
    p.add_argument("--p", type=int, required=True)
    p.add_argument("--q0", type=int, required=True)
    p.add_argument("--span", type=int, default=3)

    p = sub.add_parser("poisson-check", parents=g, help="sum K(n) V(n/X) against its Poisson dual")
    p.add_argument("--family", default="kl:2")
    p.add_argument("--q", type=int, required=True)
    p.add_argument("--X", type=float, required=True)
    p.add_argument("--Z", type=float, default=1.0)

    p = sub.add_parser("voronoi-check", parents=g, help="GL2 Voronoi summation identity")
    p.add_argument("--a", type=int, default=1)
    p.add_argument("--c", type=int, required=True)
    _common_sum(p)

    p = sub.add_parser("corr", parents=g, help="correlation sum of Khat0 along a Moebius pair")
    p.add_argument("--q0", type=int, required=True)
    p.add_argument("--family", default="kl:3")
    for name in ("r1", "r2", "p1", "p2", "n", "q1"):
        p.add_argument(f"--{name}", type=int, required=True)
    p.add_argument("--sign", type=int, choices=[1, -1], default=1)

    p = sub.add_parser("zz", parents=g, help="shifted autocorrelation of Z(v)")
    p.add_argument("--q0", type=int, required=True)
    p.add_argument("--family", default="kl:3")
    for name in ("alpha", "beta", "gamma"):
        p.add_argument(f"--{name}", type=int, required=True)
        p.add_argument(f"--{name}2", type=int)
    p.add_argument("--delta", type=int, default=0)

    p = sub.add_parser("ftq0-check", parents=g, help="q0-sum by its definition and by the Z factorization")
    p.add_argument("--q0", type=int, required=True)
    p.add_argument("--q1", type=int, required=True)
    p.add_argument("--k0", default="kl:3")
    p.add_argument("--k1", default="chi:1")
    for name in ("m", "mp", "delta"):
        p.add_argument(f"--{name}", type=int, required=True)
    for name in ("c", "cp", "r", "n1"):
        p.add_argument(f"--{name}", type=int, default=1)
    p.add_argument("--sign", type=int, choices=[1, -1], default=1)

    sub.add_parser("sweep", parents=g, help="run a sweep or identity-suite config")
    sub.add_parser("histogram", parents=g, help="run a sqrtcancel-histogram config")

    p = sub.add_parser("cache", parents=g, help="inspect cache files")
    p.add_argument("action", choices=["info", "verify"])
    p.add_argument("paths", nargs="*", type=Path, help="files; default every *.twl in --cache-dir")
    return parser


def _emit(table: Table, args) -> None:
    text = table.to_csv()
    if args.output is None:
        sys.stdout.write(text)
    else:
        args.output.parent.mkdir(parents=True, exist_ok=True)
        args.output.write_text(text, encoding="utf-8")


def _kv(**values) -> Table:
    return Table(tuple(values), [values])


def _threads(args) -> int:
    return args.threads or 1


def _gl2(args, N):
    return cache.load_or_build_gl2(args.weight, N, args.cache_dir)


def _cmd_tabulate(args) -> Table:
    if args.table == "kloosterman":
        if args.p is None:
            raise ConfigError("tabulate kloosterman needs --p")
        K = cache.load_or_build_kloosterman(args.d, args.p, args.cache_dir)
        return Table(("n", "re", "im"), [{"n": n, "re": float(v.real), "im": float(v.imag)}
                                         for n, v in enumerate(K.values)])
    weight = 12 if args.table == "tau" else args.weight
    f = cache.load_or_build_gl2(weight, args.N, args.cache_dir)
    if args.table == "sym2":
        g3 = hecke.sym_square_coefficients(f, args.N)
        return Table(("m", "A_m_1"), [{"m": m, "A_m_1": float(g3.rows[1][m])} for m in range(1, args.N + 1)])
    return Table(("n", "a", "lambda"), [{"n": n, "a": f.ints[n], "lambda": float(f.lam[n])}
                                        for n in range(1, args.N + 1)])


def _cmd_ft(args) -> Table:
    K = trace.family(args.family, args.q0)
    if args.q1 is not None:
        K = trace.crt_product(K, trace.family(args.family1, args.q1))
    h = trace.fourier_transform(K)
    return Table(("b", "re", "im"), [{"b": b, "re": float(v.real), "im": float(v.imag)}
                                     for b, v in enumerate(h.values)])


def _trace(args):
    return trace.crt_product(trace.family(args.k0, args.q0), trace.family(args.k1, args.q1))


def _cmd_sum(args) -> Table:
    K1 = trace.family(args.k1, args.q1)
    K = trace.crt_product(trace.family(args.k0, args.q0), K1)
    f = _gl2(args, int(np.ceil(2 * args.X)))
    S = sums.twisted_sum(f, K, SmoothWindow(args.Z), args.X, threads=_threads(args))
    return _kv(X=args.X, S_re=S.real, S_im=S.imag, S_abs=abs(S),
               bound_thm1=bounds.bound_thm1(args.X, args.Z, args.q0, args.q1, K1.fourier_supnorm))


def _cmd_rs_sum(args) -> Table:
    K = _trace(args)
    N = int(np.ceil(2 * args.X))
    f = _gl2(args, N)
    res = sums.rs_twisted_sum(hecke.sym_square_coefficients(f, N), f, K, SmoothWindow(args.Z), args.X,
                              threads=_threads(args))
    bound = bounds.bound_thm2(args.X, args.Z, args.q0, args.q1)
    S = res.value
    return _kv(X=args.X, S_re=S.real, S_im=S.imag, S_abs=abs(S), r_max=res.metadata["r_max"],
               full_sum_factor=res.metadata["full_sum_factor"], bound_thm2=bound)


def _cmd_ap_sum(args) -> Table:
    f = _gl2(args, int(np.ceil(2 * args.X)))
    S = sums.ap_sum(f, args.a, args.q, SmoothWindow(args.Z), args.X, threads=_threads(args))
    bound, inside = bounds.ap_corollary_bound(args.X, args.q)
    return _kv(X=args.X, a=args.a, q=args.q, S=S.real, bound=bound, within_level=inside)


def _cmd_delta(args) -> Table:
    pq = args.p * args.q0
    rows = []
    for h in range(-args.span * pq, args.span * pq + 1):
        v = sums.trivial_delta(h, 0, args.p, args.q0)
        rows.append({"n_minus_r": h, "value": v, "expected": int(h % pq == 0)})
    return Table(("n_minus_r", "value", "expected"), rows)


def _cmd_poisson(args) -> Table:
    lhs, rhs, diff = sums.poisson_check(trace.family(args.family, args.q), SmoothWindow(args.Z), args.X)
    return _kv(lhs_re=lhs.real, lhs_im=lhs.imag, rhs_re=rhs.real, rhs_im=rhs.imag, diff=diff)


def _cmd_voronoi(args) -> Table:
    W = SmoothWindow(args.Z)
    N = max(4096, int(np.ceil(2 * args.X)))
    while True:
        f = _gl2(args, N)
        try:
            lhs, rhs, rel = sums.voronoi_check(f, args.a, args.c, W, args.X)
            break
        except TruncationNotConverged:
            # the dual sum needs a longer table; give up past a few million terms
            if N > 2_000_000:
                raise
            N *= 4
    return _kv(lhs_re=lhs.real, lhs_im=lhs.imag, rhs_re=rhs.real, rhs_im=rhs.imag, rel_diff=rel)


def _cmd_corr(args) -> Table:
    khat = trace.fourier_transform(trace.family(args.family, args.q0))
    params = correlation.CorrelationParams(args.r1, args.r2, args.p1, args.p2, args.n, args.q1, args.sign)
    g1, g2 = correlation.correlation_matrices(params, args.q0)
    res = correlation.correlation_sum(khat, params)
    return _kv(re=res.value.real, im=res.value.imag, abs=abs(res.value), poles=res.skipped,
               scalar=correlation.is_scalar_pair(g1, g2))


def _cmd_zz(args) -> Table:
    K0 = trace.family(args.family, args.q0)
    a2 = args.alpha if args.alpha2 is None else args.alpha2
    b2 = args.beta if args.beta2 is None else args.beta2
    g2 = args.gamma if args.gamma2 is None else args.gamma2
    Z = correlation.z_transform(K0, args.alpha, args.beta, args.gamma)
    Zp = correlation.z_transform(K0, a2, b2, g2)
    v = correlation.zz_correlation(Z, Zp, args.delta)
    return _kv(re=v.real, im=v.imag, abs=abs(v), over_sqrt_q0=abs(v) / np.sqrt(args.q0))


def _cmd_ftq0(args) -> Table:
    res = correlation.ft_q0_sum(trace.family(args.k0, args.q0), trace.family(args.k1, args.q1), args.m, args.mp,
                                args.c, args.cp, args.r, args.n1, args.delta, args.sign)
    return _kv(route_a_re=res.route_a.real, route_a_im=res.route_a.imag, route_b_re=res.route_b.real,
               route_b_im=res.route_b.imag, rel_diff=res.rel_diff)


def _config(args) -> ExperimentConfig:
    if args.config is None:
        raise ConfigError("this command needs --config")
    cfg = load_config(args.config)
    return with_overrides(cfg, seed=args.seed, threads=args.threads,
                          cache_dir=None if args.cache_dir is None else str(args.cache_dir)).validate()


def _cmd_sweep(args) -> Table:
    cfg = _config(args)
    if cfg.kind == "sqrtcancel-histogram":
        raise ConfigError("use the histogram command for sqrtcancel-histogram configs")
    return run_identity_suite(cfg) if cfg.kind == "identity-suite" else run_sweep(cfg)


def _cmd_histogram(args) -> Table:
    cfg = _config(args)
    if cfg.kind != "sqrtcancel-histogram":
        raise ConfigError(f"histogram needs kind = sqrtcancel-histogram, got {cfg.kind}")
    return run_sqrtcancel_histogram(cfg)


def _cmd_cache(args) -> Table:
    paths = list(args.paths)
    if not paths:
        if args.cache_dir is None:
            raise ConfigError("give cache files or --cache-dir")
        paths = sorted(Path(args.cache_dir).glob("*.twl"))
    rows = []
    for path in paths:
        try:
            info = cache.cache_info(path)
        except CacheError as exc:
            if args.action == "info":
                raise
            rows.append({"path": str(path), "status": type(exc).__name__})
            continue
        except OSError as exc:
            raise CacheError(str(exc)) from None
        rows.append({"path": str(path), "kind": info.kind, "records": info.count, "bytes": info.size,
                     "status": "ok"})
    return Table(("path", "kind", "records", "bytes", "status"), rows)


COMMANDS = {
    "tabulate": _cmd_tabulate, "ft": _cmd_ft, "sum": _cmd_sum, "rs-sum": _cmd_rs_sum, "ap-sum": _cmd_ap_sum,
    "delta-check": _cmd_delta, "poisson-check": _cmd_poisson, "voronoi-check": _cmd_voronoi,
    "corr": _cmd_corr, "zz": _cmd_zz, "ftq0-check": _cmd_ftq0, "sweep": _cmd_sweep,
    "histogram": _cmd_histogram, "cache": _cmd_cache,
}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.threads is not None and args.threads < 1:
            raise ConfigError("--threads must be >= 1")
        # a config output path applies when --output is absent
        if args.output is None and args.config is not None and args.command in ("sweep", "histogram"):
            out = load_config(args.config).output
            args.output = None if out is None else Path(out)
        table = COMMANDS[args.command](args)
        _emit(table, args)
    except ConfigError as exc:
        print(f"twistlab: config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except RangeConstraintViolated as exc:
        print(f"twistlab: constraint violated: {exc}", file=sys.stderr)
        return EXIT_CONSTRAINT
    except CacheError as exc:
        print(f"twistlab: cache error: {exc}", file=sys.stderr)
        return EXIT_CACHE
    except (TwistlabError, ValueError) as exc:
        print(f"twistlab: {exc}", file=sys.stderr)
        return EXIT_ERROR
    if args.command == "cache" and any(r["status"] != "ok" for r in table.rows):
        return EXIT_CACHE
    if any(r.get("status") == "constraint-violated" for r in table.rows):
        print("twistlab: some grid points violate the range constraint and were not computed", file=sys.stderr)
        return EXIT_CONSTRAINT
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
