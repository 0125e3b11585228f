"""Experiment drivers: bound sweeps over an X grid, square-root cancellation
histograms and the identity suite. Each returns a header plus rows in a
fixed order, ready for CSV output.

Rows depend only on (config, seed). Timing lives in the final column
``wall_ms``; with ``timing = false`` it is left empty and reruns are
byte-identical.
"""

from __future__ import annotations

import csv
import io
import math
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from . import bounds, cache, correlation, hecke, sums, trace
from .config import ExperimentConfig
from .errors import RangeConstraintViolated
from .residue import FactoredModulus
from .rng import XorShift64Star
from .window import SmoothWindow

SWEEP_COLUMNS = (
    "row_type", "X", "q0", "q1", "Z", "k0", "k1", "khat1", "seed",
    "S_re", "S_im", "S_abs", "bound", "ratio", "S_over_X",
    "poles", "skips", "status", "slope", "wall_ms",
)

HISTOGRAM_COLUMNS = (
    "row_type", "q0", "draw", "seed",
    "r1", "r2", "p1", "p2", "n", "q1", "sign",
    "alpha", "beta", "gamma", "alpha2", "beta2", "gamma2", "delta",
    "value_re", "value_im", "value_abs", "normalized", "resonant",
    "poles", "skips", "count", "mean", "p50", "p90", "p99", "max",
)

IDENTITY_COLUMNS = ("row_type", "check", "parameters", "value", "tolerance", "passed", "wall_ms")


@dataclass
class Table:
    columns: tuple
    rows: list

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.DictWriter(buf, fieldnames=self.columns, lineterminator="\n", restval="")
        w.writeheader()
        for row in self.rows:
            w.writerow({k: _fmt(v) for k, v in row.items()})
        return buf.getvalue()

    def write(self, path) -> None:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            fh.write(self.to_csv())


def _fmt(v) -> str:
    if v is None:
        return ""
    if isinstance(v, bool):
        return "1" if v else "0"
    if isinstance(v, (float, np.floating)):
        return repr(float(v))
    return str(v)


def strip_timing(text: str) -> str:
    """Drop the wall_ms column from CSV text, for reproducibility comparisons."""
    rows = list(csv.reader(io.StringIO(text)))
    if not rows or "wall_ms" not in rows[0]:
        return text
    i = rows[0].index("wall_ms")
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    for r in rows:
        w.writerow(r[:i] + r[i + 1:])
    return buf.getvalue()


def _timed(fn, timing: bool):
    t0 = time.perf_counter()
    out = fn()
    return out, (round((time.perf_counter() - t0) * 1000.0, 3) if timing else None)


def _pool_map(fn, items, threads: int) -> list:
    if threads <= 1 or len(items) <= 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        # map yields in submission order, so rows stay in grid order
        return list(pool.map(fn, items))


def fit_slope(xs, ys) -> float | None:
    """Least-squares slope of log y against log x over the positive y."""
    pts = [(math.log(x), math.log(y)) for x, y in zip(xs, ys) if y > 0]
    if len(pts) < 2:
        return None
    lx, ly = np.array(pts).T
    return float(np.polyfit(lx, ly, 1)[0])


# ---------------------------------------------------------------- sweeps


def _trace_pair(cfg: ExperimentConfig, q0: int, q1: int):
    K0 = trace.family(cfg.k0, q0)
    K1 = trace.family(cfg.k1, q1)
    return K0, K1, trace.crt_product(K0, K1)


def _base_row(cfg, X, q0, q1, khat1):
    return {"row_type": "point", "X": float(X), "q0": q0, "q1": q1, "Z": float(cfg.z),
            "k0": cfg.k0, "k1": cfg.k1, "khat1": khat1, "seed": cfg.seed, "poles": 0, "skips": 0}


def _fill(row, S: complex, bound: float, X: float, status: str = "ok") -> dict:
    row.update(S_re=S.real, S_im=S.imag, S_abs=abs(S), bound=bound,
               ratio=abs(S) / bound if bound > 0 else None, S_over_X=abs(S) / X, status=status)
    return row


def run_sweep(cfg: ExperimentConfig) -> Table:
    """One row per X in the grid, then a fit row with the log-log slope of |S|."""
    cfg.validate()
    grid = cfg.x_grid()
    if not grid:
        return Table(SWEEP_COLUMNS, [])
    q0, q1 = cfg.moduli()
    q = q0 * q1
    V = SmoothWindow(cfg.z)
    top = math.ceil(2 * max(grid))
    build = not cfg.no_build

    if cfg.kind == "sweep-thm1":
        f = cache.load_or_build_gl2(cfg.weight, top, cfg.cache_dir, build=build)
        K0, K1, K = _trace_pair(cfg, q0, q1)
        khat1 = round(K1.fourier_supnorm, 12)

        def point(X):
            row = _base_row(cfg, X, q0, q1, khat1)
            S, ms = _timed(lambda: sums.twisted_sum(f, K, V, X), cfg.timing)
            return _fill(row, S, bounds.bound_thm1(X, cfg.z, q0, q1, khat1), X) | {"wall_ms": ms}

    elif cfg.kind == "sweep-thm2":
        K0, K1, K = _trace_pair(cfg, q0, q1)
        khat1 = round(K1.fourier_supnorm, 12)
        ok = [X for X in grid if X >= bounds.thm2_threshold(cfg.z, q, q0) * (1 - 1e-12)]
        if ok:
            f = cache.load_or_build_gl2(cfg.weight, top, cfg.cache_dir, build=build)
            g3 = hecke.sym_square_coefficients(f, math.ceil(2 * max(ok)))

        def point(X):
            row = _base_row(cfg, X, q0, q1, khat1)
            try:
                bound = bounds.bound_thm2(X, cfg.z, q0, q1)
            except RangeConstraintViolated:
                row.update(status="constraint-violated", wall_ms=None)
                return row
            res, ms = _timed(lambda: sums.rs_twisted_sum(g3, f, K, V, X), cfg.timing)
            return _fill(row, res.value, bound, X) | {"wall_ms": ms}

    elif cfg.kind == "sweep-ap":
        f = cache.load_or_build_gl2(cfg.weight, top, cfg.cache_dir, build=build)
        a = cfg.residue

        def point(X):
            row = _base_row(cfg, X, q0, q1, None)
            row.update(k0=f"ap:{a}", k1="")
            S, ms = _timed(lambda: sums.ap_sum(f, a, q, V, X), cfg.timing)
            bound, inside = bounds.ap_corollary_bound(X, q)
            return _fill(row, S, bound, X, "ok" if inside else "outside-level") | {"wall_ms": ms}

    else:
        raise ValueError(f"{cfg.kind} is not a sweep")

    rows = _pool_map(point, grid, cfg.threads)
    done = [r for r in rows if r["status"] != "constraint-violated"]
    slope = fit_slope([r["X"] for r in done], [r["S_abs"] for r in done])
    rows.append({"row_type": "fit", "q0": q0, "q1": q1, "Z": float(cfg.z), "k0": rows[0]["k0"],
                 "k1": rows[0]["k1"], "seed": cfg.seed, "status": "ok" if slope is not None else "insufficient",
                 "slope": slope})
    return Table(SWEEP_COLUMNS, rows)


# ---------------------------------------------------------------- histograms


def _percentiles(vals) -> dict:
    a = np.asarray(vals, dtype=np.float64)
    return {"count": len(a), "mean": float(np.mean(a)), "p50": float(np.percentile(a, 50)),
            "p90": float(np.percentile(a, 90)), "p99": float(np.percentile(a, 99)), "max": float(np.max(a))}


def _unit(rng: XorShift64Star, q0: int) -> int:
    return rng.randint(1, q0 - 1)


def _draw_params(rng: XorShift64Star, q0: int) -> tuple[correlation.CorrelationParams, int]:
    """A non-scalar parameter set, plus the number of scalar draws rejected on the way."""
    skips = 0
    while True:
        r1, r2, p1, p2, n, q1 = (_unit(rng, q0) for _ in range(6))
        sign = 1 if rng.randbelow(2) == 0 else -1
        params = correlation.CorrelationParams(r1, r2, p1, p2, n, q1, sign)
        g1, g2 = correlation.correlation_matrices(params, q0)
        if not correlation.is_scalar_pair(g1, g2):
            return params, skips
        skips += 1


def run_sqrtcancel_histogram(cfg: ExperimentConfig) -> Table:
    """Per q0: correlation-sum draws, off-resonant and resonant ZZ draws, and summary rows.

    Normalization: |c| for correlation draws, |sum Z Z'| / q0^1/2 off
    resonance and |sum Z Z'| / q0 on the resonant diagonal (delta = 0,
    equal alpha and equal beta gamma).
    """
    cfg.validate()
    rng = XorShift64Star(cfg.seed)
    rows = []
    for q0 in cfg.q0_list:
        K0 = trace.family(cfg.k0, q0)
        khat = trace.fourier_transform(K0)
        stats = {"corr": [], "zz": [], "zz-resonant": []}
        for i in range(cfg.draws):
            params, skips = _draw_params(rng, q0)
            res = correlation.correlation_sum(khat, params)
            stats["corr"].append(abs(res.value))
            rows.append({"row_type": "corr", "q0": q0, "draw": i, "seed": cfg.seed, "r1": params.r1,
                         "r2": params.r2, "p1": params.p1, "p2": params.p2, "n": params.n, "q1": params.q1,
                         "sign": params.sign, "value_re": res.value.real, "value_im": res.value.imag,
                         "value_abs": abs(res.value), "normalized": abs(res.value), "resonant": False,
                         "poles": res.skipped, "skips": skips})
        for i in range(cfg.zz_draws + cfg.resonant_draws):
            resonant = i >= cfg.zz_draws
            a, b, g = (_unit(rng, q0) for _ in range(3))
            if resonant:
                a2, b2, delta = a, _unit(rng, q0), 0
                g2 = b * g * pow(b2, -1, q0) % q0
            else:
                a2, b2, g2 = (_unit(rng, q0) for _ in range(3))
                delta = _unit(rng, q0)
            val = correlation.zz_correlation(correlation.z_transform(K0, a, b, g),
                                             correlation.z_transform(K0, a2, b2, g2), delta)
            norm = abs(val) / (q0 if resonant else math.sqrt(q0))
            stats["zz-resonant" if resonant else "zz"].append(norm)
            rows.append({"row_type": "zz", "q0": q0, "draw": i, "seed": cfg.seed, "alpha": a, "beta": b,
                         "gamma": g, "alpha2": a2, "beta2": b2, "gamma2": g2, "delta": delta,
                         "value_re": val.real, "value_im": val.imag, "value_abs": abs(val),
                         "normalized": norm, "resonant": resonant})
        for label, vals in stats.items():
            if vals:
                rows.append({"row_type": f"summary-{label}", "q0": q0, "seed": cfg.seed} | _percentiles(vals))
    return Table(HISTOGRAM_COLUMNS, rows)


# ---------------------------------------------------------------- identity suite


def _identity_checks(rng: XorShift64Star):
    """(name, parameters, callable returning the measured deviation, tolerance)."""

    def twisted_mult():
        worst = 0.0
        for q0, q1 in ((13, 7), (101, 11), (199, 193)):
            K0 = trace.family(rng.choice(["kl:2", "kl:3", "chi:1", "add:3"]), q0)
            K1 = trace.family(rng.choice(["kl:2", "chi:1", "add:1"]), q1)
            worst = max(worst, trace.verify_twisted_multiplicativity(K0, K1, FactoredModulus(q0, q1)))
        return worst

    def deligne():
        return max(float(np.max(np.abs(trace.hyper_kloosterman(d, p).values[1:]))) - d
                   for d in (2, 3, 4) for p in (101, 211))

    def hecke_exact():
        hecke.verify_hecke_relations(hecke.delta_coefficients(2000, verify=False).ints, 12)
        return 0.0

    def sym2():
        f = hecke.delta_coefficients(1000)
        g3 = hecke.sym_square_coefficients(f, 1000)
        squarefree = [n for n in range(1, 1001) if all(n % (p * p) for p in range(2, 32))]
        return max(abs(sum(g3.A(m, 1) for m in range(1, n + 1) if n % m == 0) - f.lam[n] ** 2)
                   for n in squarefree)

    def delta():
        p, q0 = 11, 13
        h = np.arange(-3 * p * q0, 3 * p * q0 + 1)
        got = np.array([sums.trivial_delta(int(x), 0, p, q0) for x in h])
        return float(np.max(np.abs(got - (h % (p * q0) == 0))))

    def poisson():
        return sums.poisson_check(trace.hyper_kloosterman(2, 13), SmoothWindow(1.0), 200)[2]

    def ftq0():
        K0, K1 = trace.hyper_kloosterman(3, 13), trace.dirichlet_char(5, 1)
        return max(correlation.ft_q0_sum(K0, K1, m, m + 1, 1, 1, 1, 1, d, 1).rel_diff
                   for m, d in ((1, 0), (2, 3), (9, 10)))

    return [
        ("twisted-multiplicativity", "q0q1 in 13*7,101*11,199*193", twisted_mult, 1e-9),
        ("deligne-bound", "d=2..4 p=101,211", deligne, 1e-9),
        ("hecke-relations", "tau N=2000", hecke_exact, 0.0),
        ("sym2-convolution", "squarefree n <= 1000", sym2, 1e-8),
        ("trivial-delta", "p=11 q0=13", delta, 1e-10),
        ("poisson", "Kl2 mod 13 X=200", poisson, 1e-6),
        ("ftq0-routes", "q0=13 q1=5", ftq0, 1e-8),
    ]


def run_identity_suite(cfg: ExperimentConfig) -> Table:
    rng = XorShift64Star(cfg.seed)
    rows = []
    for name, params, fn, tol in _identity_checks(rng):
        value, ms = _timed(fn, cfg.timing)
        rows.append({"row_type": "identity", "check": name, "parameters": params, "value": float(value),
                     "tolerance": tol, "passed": bool(value <= tol), "wall_ms": ms})
    return Table(IDENTITY_COLUMNS, rows)


def run_experiment(cfg: ExperimentConfig) -> Table:
    cfg.validate()
    if cfg.kind == "sqrtcancel-histogram":
        return run_sqrtcancel_histogram(cfg)
    if cfg.kind == "identity-suite":
        return run_identity_suite(cfg)
    return run_sweep(cfg)
