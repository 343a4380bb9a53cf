"""Experiment suites, power-law fits and machine-readable reports.

Each suite takes a flat configuration dict (suite defaults, then a config
file, then command-line flags) and returns a :class:`RunReport`.  Reports
are deterministic: no timestamps, rows ordered by (n, t).
"""
from __future__ import annotations

import csv
import io
import json
import logging
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import __version__
from .besov import (BesovParams, algebra_ratio, besov_norm, commutator_ratio, interpolation_ratio,
                    p_operator_lipschitz_ratio, paraproduct_linf_ratio, paraproduct_negative_ratio,
                    product_ratio_lemma22, remainder_ratio)
from .counterexample import (DATA_N_MIN, CounterexampleConfig, block_localization_error,
                             build_initial_data, build_profile, first_order_drift, holder_quotient,
                             inverse_square_lr, lower_bound_ratio, mode_packet, mode_wavenumber,
                             remainder_field, remainder_params, t_schedule)
from .evolution import EvolveConfig, ModelKind, SolverError, evolve
from .littlewood_paley import build_cutoffs, paraproduct, remainder_bony
from .spectral import Field, Grid, lp_norm, product, random_bandlimited

log = logging.getLogger(__name__)

__all__ = [
    "SUITE_DEFAULTS",
    "RunReport",
    "fit_power_law",
    "measure_rk4_order",
    "run_cutoff_suite",
    "run_lemma31",
    "run_error_scaling",
    "run_holder_sweep",
    "run_invariants",
    "SUITES",
    "resolve_config",
]

_COMMON_GATES = {
    "h1_tol": 1e-6,
    "mass_tol": 1e-10,
    "refine_tol": 1e-6,
    "order_target": 4.0,
    "order_tol": 0.2,
}

SUITE_DEFAULTS: dict[str, dict] = {
    "cutoffs": {
        "grid_L": 12, "grid_N": 2**20, "n_min": DATA_N_MIN, "n_max": 14, "seed": 0,
        "bony_L": 1, "bony_N": 4096, "bony_pairs": 50,
        "tol_partition": 1e-12, "tol_support": 1e-12, "tol_localization": 1e-12, "tol_bony": 1e-10,
    },
    "lemma31": {
        "s": 2.0, "p": 2.0, "r": 2.0, "grid_L": 12, "grid_N": 2**16, "n_min": DATA_N_MIN, "n_max": 10,
        "ratio_n_min": 4, "tol_norm": 1e-10, "min_median_fraction": 0.5, "max_abs_slope": 0.1,
    },
    "scaling": {
        "case": "high", "s": None, "p": None, "r": None, "model": "ch",
        "grid_L": 12, "grid_N": 2**18, "n_min": DATA_N_MIN, "n_max": 10,
        "t_min": 1e-4, "t_max": 1e-2, "t_per_decade": 8, "dt_safety": 1.0, "refine": True, "workers": 1,
        "distance_slope": 1.0, "distance_slope_tol": 0.1, "remainder_slope": 2.0,
        "remainder_slope_tol": 0.15, "low_case_slope_margin": 0.15,
        **_COMMON_GATES,
    },
    "holder": {
        "s": 2.0, "p": 2.0, "r": 2.0, "alpha": 0.9, "model": "ch",
        "grid_L": 12, "grid_N": 2**20, "n_min": 11, "n_max": 14, "truncation": "row",
        "dt_safety": 1.0, "refine": True, "workers": 1, "min_growth": 1.2,
        **_COMMON_GATES,
    },
    "invariants": {
        "grid_L": 1, "grid_N": 256, "samples": 50, "seed": 0, "s": 2.0, "p": 2.0, "r": 2.0,
        "interp_s1": 1.0, "interp_s2": 2.0, "interp_theta": 0.3, "tol_interpolation": 1e-10,
        "max_refine_growth": 0.2, "paraproduct_t": -0.5, "remainder_s1": 1.0, "remainder_s2": 1.0,
        "models": "ch,novikov",
        **_COMMON_GATES,
    },
}

SCALING_CASES = {"high": (2.0, 2.0, 2.0), "low": (1.3, 4.0, 2.0)}


def resolve_config(suite: str, *layers: dict) -> dict:
    """Suite defaults overridden by each layer in turn (None values skipped)."""
    if suite not in SUITE_DEFAULTS:
        raise ValueError(f"unknown suite {suite!r}")
    cfg = dict(SUITE_DEFAULTS[suite])
    for layer in layers:
        for key, val in (layer or {}).items():
            if val is None:
                continue
            if key not in cfg and key not in ("format", "out", "plot"):
                raise ValueError(f"unknown key {key!r} for suite {suite!r}")
            cfg[key] = val
    for key in ("s", "p", "r", "alpha", "t_min", "t_max"):
        if isinstance(cfg.get(key), str):
            cfg[key] = float(cfg[key])
    return cfg


# --- reports ---------------------------------------------------------------

def _clean(x):
    if isinstance(x, dict):
        return {k: _clean(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_clean(v) for v in x]
    if isinstance(x, (np.integer,)):
        return int(x)
    if isinstance(x, (float, np.floating)):
        x = float(x)
        if math.isnan(x):
            return None
        if math.isinf(x):
            return "inf" if x > 0 else "-inf"
        return x
    if isinstance(x, np.bool_):
        return bool(x)
    return x


def _fmt(x) -> str:
    if isinstance(x, bool) or x is None:
        return str(x)
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    if isinstance(x, (float, np.floating)):
        return format(float(x), ".17g")
    return str(x)


@dataclass
class RunReport:
    experiment: str
    config: dict
    rows: list = field(default_factory=list)
    fits: dict = field(default_factory=dict)
    checks: dict = field(default_factory=dict)
    environment: dict = field(default_factory=dict)
    csv_columns: tuple = ()

    def check(self, name: str, value, threshold, passed: bool, note: str = ""):
        entry = {"value": value, "threshold": threshold, "pass": bool(passed)}
        if note:
            entry["note"] = note
        self.checks[name] = entry
        return passed

    @property
    def passed(self) -> bool:
        return all(c["pass"] for c in self.checks.values())

    @property
    def status(self) -> dict:
        return {"overall": "pass" if self.passed else "fail", "checks": self.checks}

    def to_dict(self) -> dict:
        return _clean({
            "experiment": self.experiment,
            "config": self.config,
            "rows": self.rows,
            "fits": self.fits,
            "status": self.status,
            "environment": self.environment,
        })

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2) + "\n"

    def to_csv(self) -> str:
        cols = list(self.csv_columns) or sorted({k for row in self.rows for k in row})
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(cols)
        for row in self.rows:
            w.writerow([_fmt(row.get(c)) for c in cols])
        return buf.getvalue()

    def summary_lines(self) -> list[str]:
        out = []
        for name, c in self.checks.items():
            mark = "PASS" if c["pass"] else "FAIL"
            out.append(f"[{mark}] {self.experiment}.{name}: value={c['value']!r} threshold={c['threshold']!r}")
        return out


def _environment(extra: dict | None = None) -> dict:
    env = {"tool": "chbesov", "version": __version__, "numpy": np.__version__,
           "transform": "unnormalized forward, 1/N inverse",
           "dealias": "2/3 rule (|k| <= (N-1)//3); cubic products on a 3N/2 padded grid"}
    env.update(extra or {})
    return env


# --- fitting ---------------------------------------------------------------

def fit_power_law(points) -> tuple[float, float, float]:
    """Least-squares fit of log y = slope log x + intercept.

    Returns (slope, intercept, max absolute log-residual).
    """
    pts = [(float(x), float(y)) for x, y in points]
    if len(pts) < 3:
        raise ValueError(f"insufficient points for fit: need >= 3, got {len(pts)}")
    x = np.array([p[0] for p in pts])
    y = np.array([p[1] for p in pts])
    if np.any(x <= 0) or np.any(y <= 0) or not np.all(np.isfinite(y)):
        raise ValueError("power-law fit needs strictly positive finite values")
    lx, ly = np.log(x), np.log(y)
    slope, intercept = np.polyfit(lx, ly, 1)
    resid = float(np.abs(ly - (slope * lx + intercept)).max())
    return float(slope), float(intercept), resid


def _linear_fit(x, y) -> dict:
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    coef, cov = np.polyfit(x, y, 1, cov=True) if x.size > 3 else (np.polyfit(x, y, 1), None)
    stderr = float(np.sqrt(cov[0, 0])) if cov is not None else math.nan
    return {"slope": float(coef[0]), "intercept": float(coef[1]), "slope_stderr": stderr}


# --- solver quality --------------------------------------------------------

def measure_rk4_order(model: ModelKind, t_end: float = 0.5, steps=(8, 16, 32, 64)) -> float:
    """Global RK4 order on smooth data, errors against a 16x finer reference."""
    grid = Grid(1, 64)
    u0 = Field.from_function(grid, lambda x: 0.4 * np.cos(x) + 0.2 * np.sin(2 * x))

    def run(m):
        res = evolve(u0, t_end, model, EvolveConfig(dt_max=t_end / m))
        if res.steps != m:
            raise RuntimeError(f"expected {m} steps, took {res.steps}")
        return res.deviation

    ref = run(16 * steps[-1])
    errs = [lp_norm(run(m) - ref, 2.0) for m in steps]
    slope, _, _ = fit_power_law([(t_end / m, e) for m, e in zip(steps, errs)])
    return slope


def _solver_gates(report: RunReport, cfg: dict, rows: list, model: ModelKind):
    h1 = max(r["h1_drift"] for r in rows)
    if model.conserves_h1:
        report.check("h1_drift", h1, cfg["h1_tol"], h1 <= cfg["h1_tol"])
    if model.conserves_mass:
        mass = max(r["mass_drift"] for r in rows)
        report.check("mass_drift", mass, cfg["mass_tol"], mass <= cfg["mass_tol"])
    order = measure_rk4_order(model)
    report.fits["rk4_order"] = order
    report.check("rk4_order", order, [cfg["order_target"], cfg["order_tol"]],
                 abs(order - cfg["order_target"]) <= cfg["order_tol"])


def _refinement_gate(report: RunReport, cfg: dict, rows: list, fine_rows: list, keys):
    worst = 0.0
    for row, fine in zip(rows, fine_rows):
        for key in keys:
            a, b = row[key], fine[key]
            if a == 0 and b == 0:
                continue
            rel = abs(b - a) / max(abs(a), abs(b))
            row[f"{key}_refined"] = b
            worst = max(worst, rel)
    report.fits["refinement_max_rel_change"] = worst
    ok = worst <= cfg["refine_tol"]
    report.check("refinement", worst, cfg["refine_tol"], ok,
                 note="" if ok else "under-resolved")


def _map(fn, items, workers: int):
    if workers and workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as ex:
            return list(ex.map(fn, items))
    return [fn(item) for item in items]


# --- suites ----------------------------------------------------------------

def run_cutoff_suite(config: dict | None = None) -> RunReport:
    cfg = resolve_config("cutoffs", config)
    grid = Grid(cfg["grid_L"], cfg["grid_N"])
    report = RunReport("cutoffs", cfg, environment=_environment(grid.metadata()),
                       csv_columns=("check", "index", "value", "threshold", "pass"))
    cut = build_cutoffs(grid)
    report.fits["j_max"] = cut.j_max

    kc = grid.dealias_k
    total = cut.theta.values[: kc + 1].copy()
    for j in range(cut.j_max + 1):
        total += cut.symbol(j)[: kc + 1]
    part_err = float(np.abs(total - 1.0).max())
    report.rows.append({"check": "partition", "index": None, "value": part_err,
                        "threshold": cfg["tol_partition"], "pass": part_err <= cfg["tol_partition"]})
    report.check("partition_of_unity", part_err, cfg["tol_partition"], part_err <= cfg["tol_partition"])

    rng = np.random.default_rng(cfg["seed"])
    f = random_bandlimited(grid, rng, kmax=kc)
    scale = np.abs(f.rspec).max()
    xi = grid.xi
    worst_support = 0.0
    for j in cut.js:
        lo, hi = cut.annulus(j)
        outside = (xi < lo) | (xi > hi) if j >= 0 else xi > hi
        leak = float(np.abs(f.rspec[outside] * cut.symbol(j)[outside]).max(initial=0.0) / scale)
        worst_support = max(worst_support, leak)
        report.rows.append({"check": "support", "index": j, "value": leak,
                            "threshold": cfg["tol_support"], "pass": leak <= cfg["tol_support"]})
    report.check("block_support", worst_support, cfg["tol_support"], worst_support <= cfg["tol_support"])

    worst_loc, failure = 0.0, ""
    for n in range(cfg["n_min"], cfg["n_max"] + 1):
        if n > cut.j_max:
            failure = f"block exceeds resolved band: n={n} > j_max={cut.j_max}"
            report.rows.append({"check": "localization", "index": n, "value": None,
                                "threshold": cfg["tol_localization"], "pass": False})
            continue
        try:
            fn = mode_packet(n, grid)
        except ValueError as exc:
            failure = str(exc)
            report.rows.append({"check": "localization", "index": n, "value": None,
                                "threshold": cfg["tol_localization"], "pass": False})
            continue
        err = block_localization_error(fn, n, cut)
        worst_loc = max(worst_loc, err)
        report.rows.append({"check": "localization", "index": n, "value": err,
                            "threshold": cfg["tol_localization"], "pass": err <= cfg["tol_localization"]})
    ok = not failure and worst_loc <= cfg["tol_localization"]
    report.check("localization", worst_loc, cfg["tol_localization"], ok, note=failure)

    bgrid = Grid(cfg["bony_L"], cfg["bony_N"])
    bcut = build_cutoffs(bgrid)
    brng = np.random.default_rng(cfg["seed"] + 1)
    worst_bony = 0.0
    for i in range(cfg["bony_pairs"]):
        u = random_bandlimited(bgrid, brng)
        v = random_bandlimited(bgrid, brng)
        uv = product(u, v)
        resid = uv - paraproduct(u, v, bcut) - paraproduct(v, u, bcut) - remainder_bony(u, v, bcut)
        err = lp_norm(resid, 2.0) / lp_norm(uv, 2.0)
        worst_bony = max(worst_bony, err)
        report.rows.append({"check": "bony", "index": i, "value": err,
                            "threshold": cfg["tol_bony"], "pass": err <= cfg["tol_bony"]})
    report.check("bony_identity", worst_bony, cfg["tol_bony"], worst_bony <= cfg["tol_bony"])
    return report


def run_lemma31(config: dict | None = None) -> RunReport:
    cfg = resolve_config("lemma31", config)
    grid = Grid(cfg["grid_L"], cfg["grid_N"])
    bp = BesovParams(cfg["s"], cfg["p"], cfg["r"])
    ce = CounterexampleConfig(bp, cfg["n_max"], n_min=cfg["n_min"])
    report = RunReport("lemma31", cfg, environment=_environment(grid.metadata()),
                       csv_columns=("n", "k", "r_n", "grid_L", "grid_N"))
    cut = build_cutoffs(grid)
    u0 = build_initial_data(ce, grid)
    phi_norm = lp_norm(build_profile(grid).field, bp.p)
    norm = besov_norm(u0, bp, cut)
    bound = inverse_square_lr(DATA_N_MIN, bp.r) * phi_norm
    report.fits.update({"besov_norm_u0": norm, "norm_bound": bound, "profile_lp_norm": phi_norm,
                        "tail_bound": inverse_square_lr(cfg["n_max"] + 1, bp.r) * phi_norm,
                        "j_max": cut.j_max})
    report.check("besov_norm_bound", norm, bound * (1 + cfg["tol_norm"]), norm <= bound * (1 + cfg["tol_norm"]))

    for n in range(cfg["n_min"], cfg["n_max"] + 1):
        for k in (1, 2):
            report.rows.append({"n": n, "k": k, "r_n": lower_bound_ratio(u0, n, k, bp.s, bp.p, cut),
                                "grid_L": grid.L, "grid_N": grid.N})
    for k in (1, 2):
        sel = [r for r in report.rows if r["k"] == k and r["n"] >= cfg["ratio_n_min"]]
        positive = all(r["r_n"] > 0 for r in report.rows if r["k"] == k)
        report.check(f"k{k}_positive", positive, True, positive)
        if len(sel) < 2:
            continue
        vals = np.array([r["r_n"] for r in sel])
        med = float(np.median(vals))
        report.check(f"k{k}_uniform_positivity", float(vals.min()), cfg["min_median_fraction"] * med,
                     vals.min() >= cfg["min_median_fraction"] * med)
        slope = float(np.polyfit([r["n"] for r in sel], np.log(vals), 1)[0])
        report.fits[f"k{k}_log_slope"] = slope
        report.check(f"k{k}_no_decay", abs(slope), cfg["max_abs_slope"], abs(slope) <= cfg["max_abs_slope"])
    return report


def _scaling_row(args):
    grid_L, grid_N, bp_tuple, n_min, n_max, model_text, dt_safety, t = args
    grid = Grid(grid_L, grid_N)
    bp = BesovParams(*bp_tuple)
    model = ModelKind.parse(model_text)
    u0 = build_initial_data(CounterexampleConfig(bp, n_max, model=model, n_min=n_min), grid)
    cut = build_cutoffs(grid)
    row = {"t": t, "grid_L": grid_L, "grid_N": grid_N}
    try:
        res = evolve(u0, t, model, EvolveConfig(dt_safety=dt_safety))
    except SolverError as exc:
        row.update(error=str(exc), distance_norm=math.nan, remainder_norm=math.nan,
                   steps=0, h1_drift=math.nan, mass_drift=math.nan)
        return row
    row.update(distance_norm=besov_norm(res.deviation, bp.with_s(bp.s - 1), cut),
               remainder_norm=besov_norm(res.remainder, remainder_params(bp), cut),
               steps=res.steps, h1_drift=res.h1_drift, mass_drift=res.mass_drift)
    return row


def t_grid(t_min: float, t_max: float, per_decade: int) -> list[float]:
    count = int(round(math.log10(t_max / t_min) * per_decade)) + 1
    return [float(v) for v in np.geomspace(t_min, t_max, count)]


def run_error_scaling(config: dict | None = None) -> RunReport:
    cfg = resolve_config("scaling", config)
    case = cfg["case"]
    if case not in SCALING_CASES:
        raise ValueError(f"case must be one of {sorted(SCALING_CASES)}, got {case!r}")
    s, p, r = (cfg[k] if cfg[k] is not None else d for k, d in zip("spr", SCALING_CASES[case]))
    cfg.update(s=s, p=p, r=r)
    bp = BesovParams(s, p, r)
    if case == "high" and not bp.high_regularity:
        raise ValueError(f"case 'high' needs s > max(1+1/p, 3/2), got {bp}")
    if case == "low" and (bp.high_regularity or not bp.admissible):
        raise ValueError(f"case 'low' needs 1+1/p <= s <= 3/2 in the admissible range, got {bp}")
    model = ModelKind.parse(cfg["model"])
    times = t_grid(cfg["t_min"], cfg["t_max"], cfg["t_per_decade"])
    if len(times) < 3:
        raise ValueError(f"insufficient points for fit: t-grid has {len(times)} point(s)")
    grid = Grid(cfg["grid_L"], cfg["grid_N"])
    report = RunReport("scaling", cfg, environment=_environment(grid.metadata()),
                       csv_columns=("t", "distance_norm", "remainder_norm", "steps", "h1_drift",
                                    "mass_drift", "grid_L", "grid_N"))

    def jobs(n_grid):
        return [(cfg["grid_L"], n_grid, (s, p, r), cfg["n_min"], cfg["n_max"], str(model),
                 cfg["dt_safety"], t) for t in times]

    rows = _map(_scaling_row, jobs(cfg["grid_N"]), cfg["workers"])
    report.rows = rows
    good = [row for row in rows if "error" not in row]
    if len(good) < 3:
        report.check("fit", len(good), 3, False, note="insufficient points for fit")
        return report
    ds, di, dr = fit_power_law([(row["t"], row["distance_norm"]) for row in good])
    ws, wi, wr = fit_power_law([(row["t"], row["remainder_norm"]) for row in good])
    report.fits.update({"distance_slope": ds, "distance_intercept": di, "distance_residual": dr,
                        "remainder_slope": ws, "remainder_intercept": wi, "remainder_residual": wr,
                        "distance_norm": f"B^{s - 1:g}_{{{p:g},{r:g}}}",
                        "remainder_norm": f"B^{remainder_params(bp).s:g}_{{{p:g},{r:g}}}"})
    report.check("distance_slope", ds, [cfg["distance_slope"], cfg["distance_slope_tol"]],
                 abs(ds - cfg["distance_slope"]) <= cfg["distance_slope_tol"])
    if case == "high":
        report.check("remainder_slope", ws, [cfg["remainder_slope"], cfg["remainder_slope_tol"]],
                     abs(ws - cfg["remainder_slope"]) <= cfg["remainder_slope_tol"])
    else:
        floor = s - cfg["low_case_slope_margin"]
        report.check("remainder_slope", ws, floor, ws >= floor)
    _solver_gates(report, cfg, good, model)
    if cfg["refine"]:
        fine = _map(_scaling_row, jobs(2 * cfg["grid_N"]), cfg["workers"])
        _refinement_gate(report, cfg, rows, fine, ("distance_norm", "remainder_norm"))
    return report


def _holder_row(args):
    grid_L, grid_N, bp_tuple, alpha, model_text, n, data_n_max, dt_safety = args
    grid = Grid(grid_L, grid_N)
    bp = BesovParams(*bp_tuple)
    model = ModelKind.parse(model_text)
    cut = build_cutoffs(grid)
    u0 = build_initial_data(CounterexampleConfig(bp, data_n_max, alpha, model), grid)
    t = t_schedule(n, alpha)
    rec = holder_quotient(u0, t, alpha, bp, model, EvolveConfig(dt_safety=dt_safety), cut, n=n)
    row = rec.as_dict()
    row["t_n"] = row.pop("t")
    row["data_n_max"] = data_n_max
    row["lower_bound_ratio"] = lower_bound_ratio(u0, n, model.k_power, bp.s, bp.p, cut)
    return row


HOLDER_CSV = ("n", "t_n", "besov_distance", "quotient", "remainder_norm", "grid_L", "grid_N",
              "steps", "h1_drift")


def run_holder_sweep(config: dict | None = None) -> RunReport:
    cfg = resolve_config("holder", config)
    bp = BesovParams(cfg["s"], cfg["p"], cfg["r"])
    alpha = cfg["alpha"]
    if not 0.0 <= alpha < 1.0:
        raise ValueError(f"alpha must lie in [0, 1), got {alpha}")
    model = ModelKind.parse(cfg["model"])
    if cfg["truncation"] not in ("row", "fixed"):
        raise ValueError(f"truncation must be 'row' or 'fixed', got {cfg['truncation']!r}")
    ns = list(range(cfg["n_min"], cfg["n_max"] + 1))
    if len(ns) < 2:
        raise ValueError("holder sweep needs at least two values of n")
    grid = Grid(cfg["grid_L"], cfg["grid_N"])
    for n in ns:
        mode_wavenumber(n, grid)
    if t_schedule(ns[0], alpha) >= 1.0:
        raise ValueError(f"n_min={ns[0]} too small: t_n = {t_schedule(ns[0], alpha):.3g} is not below 1")
    report = RunReport("holder", cfg, environment=_environment(grid.metadata()), csv_columns=HOLDER_CSV)

    def jobs(n_grid):
        return [(cfg["grid_L"], n_grid, (bp.s, bp.p, bp.r), alpha, str(model), n,
                 n if cfg["truncation"] == "row" else cfg["n_max"], cfg["dt_safety"]) for n in ns]

    rows = _map(_holder_row, jobs(cfg["grid_N"]), cfg["workers"])
    report.rows = rows
    q = np.array([row["quotient"] for row in rows])
    growth = float(q[-1] / q[0])
    report.fits.update(_linear_fit(ns, q))
    report.fits["growth_ratio"] = growth
    increasing = bool(np.all(np.diff(q) > 0))
    report.check("quotient_increasing", [float(v) for v in q], "strictly increasing", increasing)
    report.check("linear_slope_positive", report.fits["slope"], 0.0, report.fits["slope"] > 0)
    if cfg["min_growth"] is not None:
        report.check("growth_ratio", growth, cfg["min_growth"], growth >= cfg["min_growth"])

    c_hat = min(row["main_term"] / row["n"] for row in rows)
    c_big = max(max((row["commutator_term"] + row["nonlocal_term"]) / (row["n"] ** 3 * 2.0 ** -row["n"]),
                    row["remainder_term"] / (row["n"] ** 6 * row["t_n"] ** alpha)) for row in rows)
    report.fits.update({"c_hat": c_hat, "C_hat": c_big})
    slack = []
    for row in rows:
        n, t = row["n"], row["t_n"]
        bound = c_hat * n - c_big * n**3 * 2.0**-n - c_big * n**6 * t**alpha
        row["chain_bound"] = bound
        slack.append(row["quotient"] - bound)
    report.check("c_hat_positive", c_hat, 0.0, c_hat > 0)
    report.check("chain_lower_bound", min(slack), 0.0, min(slack) >= 0)
    positive = all(row["lower_bound_ratio"] > 0 and row["main_term"] > 0 for row in rows)
    report.check(f"k{model.k_power}_lower_bound_positive", positive, True, positive)

    _solver_gates(report, cfg, rows, model)
    if cfg["refine"]:
        fine = _map(_holder_row, jobs(2 * cfg["grid_N"]), cfg["workers"])
        _refinement_gate(report, cfg, rows, fine, ("besov_distance", "remainder_norm", "nonlocal_term"))
    return report


def _ratio_samples(grid: Grid, cfg: dict, kmax: int) -> dict:
    """All inequality ratios on the seeded sample set, evaluated on ``grid``."""
    rng = np.random.default_rng(cfg["seed"])
    cut = build_cutoffs(grid)
    bp = BesovParams(cfg["s"], cfg["p"], cfg["r"])
    out = {k: [] for k in ("interpolation", "product", "algebra", "commutator",
                           "p_lipschitz", "paraproduct_linf", "paraproduct_negative",
                           "bony_remainder")}
    for _ in range(cfg["samples"]):
        u = random_bandlimited(grid, rng, kmax=kmax)
        v = random_bandlimited(grid, rng, kmax=kmax)
        out["interpolation"].append(interpolation_ratio(u, cfg["interp_s1"], cfg["interp_s2"],
                                                        cfg["interp_theta"], bp.p, bp.r, cut))
        out["product"].append(product_ratio_lemma22(u, v, bp, cut))
        out["algebra"].append(algebra_ratio(u, v, bp, cut))
        out["commutator"].append(commutator_ratio(v, u, bp.s, bp.p, cut))
        out["p_lipschitz"].append(p_operator_lipschitz_ratio(u, v, bp, cut))
        out["paraproduct_linf"].append(paraproduct_linf_ratio(u, v, bp, cut))
        out["paraproduct_negative"].append(
            paraproduct_negative_ratio(u, v, bp, cfg["paraproduct_t"], cut))
        out["bony_remainder"].append(remainder_ratio(u, v, cfg["remainder_s1"], cfg["remainder_s2"],
                                                        bp.p, bp.r, cut))
    return out


def run_invariants(config: dict | None = None) -> RunReport:
    cfg = resolve_config("invariants", config)
    grid = Grid(cfg["grid_L"], cfg["grid_N"])
    fine = Grid(cfg["grid_L"], 2 * cfg["grid_N"])
    kmax = grid.dealias_k // 2
    report = RunReport("invariants", cfg, environment=_environment(grid.metadata()),
                       csv_columns=("ratio", "max_N", "max_2N", "growth"))
    coarse_vals = _ratio_samples(grid, cfg, kmax)
    fine_vals = _ratio_samples(fine, cfg, kmax)
    for name in coarse_vals:
        a, b = max(coarse_vals[name]), max(fine_vals[name])
        growth = b / a - 1.0
        report.rows.append({"ratio": name, "max_N": a, "max_2N": b, "growth": growth})
        if name == "interpolation":
            top = max(a, b)
            report.check(name, top, 1 + cfg["tol_interpolation"], top <= 1 + cfg["tol_interpolation"])
        else:
            report.check(name, growth, cfg["max_refine_growth"], growth <= cfg["max_refine_growth"])

    for text in str(cfg["models"]).split(","):
        model = ModelKind.parse(text)
        order = measure_rk4_order(model)
        report.fits[f"rk4_order_{model}"] = order
        report.check(f"rk4_order_{model}", order, [cfg["order_target"], cfg["order_tol"]],
                     abs(order - cfg["order_target"]) <= cfg["order_tol"])
        u0 = Field.from_function(Grid(1, 256), lambda x: 0.3 * np.cos(x) + 0.1 * np.sin(3 * x))
        res = evolve(u0, 0.1, model)
        if model.conserves_h1:
            report.check(f"h1_drift_{model}", res.h1_drift, cfg["h1_tol"], res.h1_drift <= cfg["h1_tol"])
        if model.conserves_mass:
            report.check(f"mass_drift_{model}", res.mass_drift, cfg["mass_tol"],
                         res.mass_drift <= cfg["mass_tol"])
    return report


SUITES = {
    "cutoffs": run_cutoff_suite,
    "lemma31": run_lemma31,
    "scaling": run_error_scaling,
    "holder": run_holder_sweep,
    "invariants": run_invariants,
}
