"""Scenario drivers: survival curves, rate sweeps, thresholds, cross-validation.

Each ``run_*`` function returns a :class:`Dataset` (tables, plots and a
summary); :func:`run_scenario` writes it under an output directory together
with a manifest that is sufficient to regenerate it.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np

from . import io as dio
from ._accel import BACKEND
from .asymptotics import gamma_staircase, resonance_rate, staircase_coefficient, stark_shift_estimate
from .errors import DeltaIonError, DomainError
from .ladder import MAX_DEPTH, find_decay_pole, gamma_vs_omega_scan
from .model import DriveSpec, photon_order
from .spectrum import compute_spectrum, unitarity_defects
from .volterra import SolverConfig, cycle_average, fit_decay_rate, solve_Y

SCENARIO_IDS = ("survival_curves", "gamma_sweep", "threshold_50", "ionization_vs_r", "route_xval")
CLOCKS = ("periods", "inverse_omega")
STARK_MODES = ("none", "midpoint")
SWEEP_CHUNK = 32
VERIFY_RTOL = 1e-9
VERIFY_ATOL = 1e-12


def _grid(a: float, b: float, n: int) -> tuple[float, ...]:
    return tuple(float(round(v, 10)) for v in np.linspace(a, b, n))


_DEFAULTS: dict[str, dict] = {
    "survival_curves": {"pairs": ((2.0, 0.1), (1.5, 0.2), (0.8, 0.3), (1.5, 0.4)), "t_max": 400.0, "h": 0.01},
    "gamma_sweep": {"omegas": _grid(0.34, 2.0, 167), "rs": (0.01,)},
    "threshold_50": {
        "omegas": _grid(0.36, 1.6, 63),
        "oscillations": 700.0,
        "spot_omegas": (1.5, 1.2, 0.8),
        "h": 0.1,
    },
    "ionization_vs_r": {"omegas": (1.5, 0.75), "rs": _grid(0.0, 0.4, 9), "oscillations": 300.0, "h": 0.05},
    "route_xval": {"pairs": ((2.0, 0.1), (1.5, 0.2), (0.75, 0.1)), "h": 0.1},
}


@dataclass(frozen=True)
class ScenarioSpec:
    """Parameters of one scenario; unset ranges take the per-scenario defaults.

    ``h`` caps the time step; each run uses ``min(h, 0.1/omega)``.
    """

    id: str
    omegas: tuple[float, ...] = ()
    rs: tuple[float, ...] = ()
    pairs: tuple[tuple[float, float], ...] = ()
    t_max: float | None = None
    oscillations: float | None = None
    clock: str = "periods"
    stark: str = "none"
    h: float | None = None
    spot_omegas: tuple[float, ...] = ()
    tol_time_spectral: float = 0.10
    tol_staircase_floor: float = 0.05
    tol_staircase_r2: float = 5.0
    tol_resonance: float = 0.20
    gate_resonance: bool = False

    def __post_init__(self):
        if self.id not in SCENARIO_IDS:
            raise DomainError(f"unknown scenario id {self.id!r}; expected one of {', '.join(SCENARIO_IDS)}")
        if self.clock not in CLOCKS:
            raise DomainError(f"clock must be one of {CLOCKS}")
        if self.stark not in STARK_MODES:
            raise DomainError(f"stark must be one of {STARK_MODES}")
        if self.oscillations is not None and not self.oscillations > 0:
            raise DomainError("oscillation count must be positive")
        if self.h is not None and not self.h > 0:
            raise DomainError("h must be positive")
        if self.t_max is not None and not self.t_max > 0:
            raise DomainError("t_max must be positive")
        for w in self.omegas + tuple(p[0] for p in self.pairs) + self.spot_omegas:
            if not w > 0:
                raise DomainError(f"frequencies must be positive, got {w!r}")
        for r in self.rs + tuple(p[1] for p in self.pairs):
            if r < 0:
                raise DomainError(f"amplitudes must be non-negative, got {r!r}")

    @classmethod
    def default(cls, scenario_id: str, **overrides) -> "ScenarioSpec":
        if scenario_id not in SCENARIO_IDS:
            raise DomainError(f"unknown scenario id {scenario_id!r}")
        values = dict(_DEFAULTS[scenario_id])
        values.update({k: v for k, v in overrides.items() if v is not None})
        return cls(id=scenario_id, **values).checked()

    def checked(self) -> "ScenarioSpec":
        """Verify that the ranges this scenario reads are non-empty."""
        need = {
            "survival_curves": ("pairs",),
            "gamma_sweep": ("omegas", "rs"),
            "threshold_50": ("omegas",),
            "ionization_vs_r": ("omegas", "rs"),
            "route_xval": ("pairs",),
        }[self.id]
        for name in need:
            if not getattr(self, name):
                raise DomainError(f"scenario {self.id} needs a non-empty {name}")
        if self.id in ("threshold_50", "ionization_vs_r") and self.oscillations is None:
            raise DomainError(f"scenario {self.id} needs an oscillation count")
        return self

    def to_dict(self) -> dict:
        d = asdict(self)
        d["pairs"] = [list(p) for p in self.pairs]
        for k in ("omegas", "rs", "spot_omegas"):
            d[k] = list(d[k])
        return d

    def step_for(self, omega: float, fallback: float) -> float:
        base = self.h if self.h is not None else fallback
        return min(base, 0.1 / omega)

    def clock_time(self, omega: float, count: float) -> float:
        return count * (2.0 * math.pi / omega if self.clock == "periods" else 1.0 / omega)


@dataclass
class Dataset:
    scenario: str
    tables: dict[str, tuple[tuple[str, ...], list[tuple]]] = field(default_factory=dict)
    plots: dict[str, dict] = field(default_factory=dict)
    summary: dict = field(default_factory=dict)
    failures: list[str] = field(default_factory=list)
    ok: bool = True


def resolve_workers(workers: int | None = None) -> int:
    if workers is None:
        env = os.environ.get("DELTAION_WORKERS", "").strip()
        if env:
            try:
                workers = int(env)
            except ValueError:
                raise DomainError(f"DELTAION_WORKERS must be an integer, got {env!r}") from None
        else:
            workers = 1
    if workers < 1:
        raise DomainError("worker count must be >= 1")
    return workers


def pool_map(fn, jobs: list, workers: int = 1) -> list:
    """Apply ``fn`` to each job, in order, on at most ``workers`` processes."""
    if workers <= 1 or len(jobs) <= 1:
        return [fn(j) for j in jobs]
    with ProcessPoolExecutor(max_workers=min(workers, len(jobs))) as ex:
        return list(ex.map(fn, jobs))


def _safe(fn, job):
    try:
        return fn(job)
    except DeltaIonError as exc:
        return {"error": f"{type(exc).__name__}: {exc}"}


# ---- survival curves ----


def _survival_job(job):
    omega, r, h, t_max = job
    drive = DriveSpec.single(omega, r)
    traj = solve_Y(drive, SolverConfig(h=h, t_max=t_max))
    out = {"omega": omega, "r": r, "h": h, "traj": traj}
    if r > 0:
        pole = find_decay_pole(omega, r)
        out["gamma_spectral"] = pole.gamma_rate
        out["mean_amp"] = pole.cycle_mean_weight
    else:
        out["gamma_spectral"] = 0.0
        out["mean_amp"] = 1.0
    _, defects = unitarity_defects(traj, n_checkpoints=4)
    out["unitarity"] = float(np.max(np.abs(defects)))
    out["spectrum"] = compute_spectrum(traj)
    return out


def _survival_safe(job):
    return _safe(_survival_job, job)


def run_survival_curves(spec: ScenarioSpec, solver: SolverConfig | None = None, workers: int = 1) -> Dataset:
    solver = solver or SolverConfig()
    t_max = spec.t_max if spec.t_max is not None else solver.t_max
    jobs = [(float(w), float(r), spec.step_for(w, solver.h), float(t_max)) for w, r in spec.pairs]
    results = pool_map(_survival_safe, jobs, workers)
    ds = Dataset(spec.id)
    summary_rows = []
    series = []
    for (w, r, h, _), res in zip(jobs, results):
        tag = f"w{w:g}_r{r:g}"
        if "error" in res:
            ds.failures.append(f"{tag}: {res['error']}")
            summary_rows.append((w, r, h, math.nan, math.nan, math.nan, math.nan, "failed"))
            continue
        traj = res["traj"]
        stride = max(1, (len(traj.times) - 1) // 20000)
        ds.tables[f"trajectory_{tag}"] = (dio.TRAJECTORY_HEADER, list(dio.trajectory_rows(traj, stride)))
        sp = res["spectrum"]
        ds.tables[f"spectrum_{tag}"] = (
            dio.SPECTRUM_HEADER,
            list(zip(sp.k_grid, sp.Theta.real, sp.Theta.imag, sp.density)),
        )
        gamma_fit = math.nan
        if r > 0:
            # stay inside the exponential era: at most 12 e-foldings
            t_end = min(traj.t_max, 12.0 / res["gamma_spectral"])
            try:
                gamma_fit = fit_decay_rate(traj, min(100.0, 0.2 * t_end), t_end).gamma
            except DeltaIonError:
                pass
        summary_rows.append((w, r, h, res["gamma_spectral"], gamma_fit, res["mean_amp"], res["unitarity"], "ok"))
        with np.errstate(divide="ignore"):
            logs = np.log10(traj.survival[::stride])
        series.append((f"w={w:g} r={r:g}", traj.times[::stride], logs))
        g = res["gamma_spectral"]
        line_t = np.array([0.0, traj.t_max])
        series.append((f"spectral w={w:g}", line_t, np.log10(res["mean_amp"]) - g * line_t / math.log(10.0)))
    ds.tables["summary"] = (
        ("omega", "r", "h", "gamma_spectral", "gamma_fit", "cycle_mean_weight", "max_unitarity_defect", "status"),
        summary_rows,
    )
    ds.plots["survival"] = {"series": series, "title": "log10 survival", "xlabel": "t", "ylabel": "log10 |theta|^2"}
    ds.ok = not ds.failures
    return ds


# ---- gamma sweep ----


def _sweep_job(job):
    omegas, r, tol, max_depth = job
    return gamma_vs_omega_scan(list(omegas), r, continuation=True, tol=tol, max_depth=max_depth)


def run_gamma_sweep(
    spec: ScenarioSpec, workers: int = 1, newton_tol: float = 1e-10, max_depth: int = MAX_DEPTH
) -> Dataset:
    omegas = sorted(float(w) for w in spec.omegas)
    ds = Dataset(spec.id)
    scan, stair, series = [], [], []
    for r in spec.rs:
        chunks = [tuple(omegas[i : i + SWEEP_CHUNK]) for i in range(0, len(omegas), SWEEP_CHUNK)]
        parts = pool_map(_sweep_job, [(c, float(r), newton_tol, max_depth) for c in chunks], workers)
        results = [p for part in parts for p in part]
        scan.extend(results)
        for res in results:
            est = gamma_staircase(res.omega, r)
            stair.append((res.omega, r, est.photon_order, est.gamma, est.validity))
            if res.flag == "failed":
                ds.failures.append(f"omega={res.omega:g} r={r:g}: pole not found")
        good = [x for x in results if x.flag in ("ok", "resonance") and x.gamma_rate > 0]
        series.append((f"ladder r={r:g}", [x.omega for x in good], [math.log10(x.inv_gamma) for x in good]))
        st = [(w, g) for w, rr, _, g, _ in stair if rr == r and g > 0]
        series.append((f"staircase r={r:g}", [a for a, _ in st], [-math.log10(g) for _, g in st]))
    ds.tables["scan"] = (dio.SCAN_HEADER, list(dio.scan_rows(scan)))
    ds.tables["staircase"] = (("omega", "r", "photon_order", "gamma_staircase", "validity"), stair)
    ds.plots["inv_gamma"] = {"series": series, "title": "log10 1/Gamma", "xlabel": "omega", "ylabel": "log10 1/Gamma"}
    ds.summary = {"points": len(scan), "failed": len(ds.failures)}
    # per-point pole failures are recorded, not fatal
    ds.ok = True
    return ds


def stark_peak(r: float, lo: float = 0.98, hi: float = 1.08, n: int = 201) -> tuple[float, list]:
    """Frequency of the largest 1/Gamma near the one-photon threshold."""
    omegas = np.linspace(lo, hi, n)
    res = gamma_vs_omega_scan(omegas, r)
    inv = np.array([x.inv_gamma if x.flag != "failed" else -np.inf for x in res])
    i = int(np.argmax(inv))
    # refine on a finer grid around the coarse maximum
    a = omegas[max(i - 1, 0)]
    b = omegas[min(i + 1, n - 1)]
    fine = np.linspace(a, b, 41)
    res_f = gamma_vs_omega_scan(fine, r)
    inv_f = np.array([x.inv_gamma if x.flag != "failed" else -np.inf for x in res_f])
    return float(fine[int(np.argmax(inv_f))]), res


# ---- 50% thresholds ----


def _threshold_job(job):
    omega, t_star, tol, max_depth = job
    target = math.log(2.0) / t_star
    n = photon_order(omega)
    c = staircase_coefficient(omega, n)
    r_guess = (target / c) ** (1.0 / (2 * n)) if c > 0 else 0.3
    cache: dict[float, float] = {}
    state = {"p": None}

    def g(r):
        if r not in cache:
            pole = find_decay_pole(omega, r, state["p"], tol=tol, residue=False, max_depth=max_depth)
            state["p"] = pole.p_star
            cache[r] = pole.gamma_rate - target
        return cache[r]

    lo, hi = r_guess / 2.0, min(r_guess * 2.0, 1.5)
    try:
        for _ in range(6):
            if g(lo) < 0:
                break
            lo /= 2.0
        state["p"] = None
        for _ in range(6):
            if g(hi) > 0 or hi >= 1.5:
                break
            hi = min(hi * 2.0, 1.5)
        if not (g(lo) < 0 < g(hi)):
            return (omega, t_star, math.nan, r_guess, "bracket")
        for _ in range(30):
            mid = math.sqrt(lo * hi)
            if g(mid) < 0:
                lo = mid
            else:
                hi = mid
            if hi / lo - 1.0 < 1e-6:
                break
    except DeltaIonError:
        return (omega, t_star, math.nan, r_guess, "failed")
    return (omega, t_star, math.sqrt(lo * hi), r_guess, "ok")


def _spot_job(job):
    omega, r, h, t_star = job
    traj = solve_Y(DriveSpec.single(omega, r), SolverConfig(h=h, t_max=t_star))
    tm, avg = cycle_average(traj)
    return float(avg[-1])


def run_threshold_50(
    spec: ScenarioSpec,
    solver: SolverConfig | None = None,
    workers: int = 1,
    newton_tol: float = 1e-10,
    max_depth: int = MAX_DEPTH,
) -> Dataset:
    solver = solver or SolverConfig()
    omegas = sorted(float(w) for w in spec.omegas)
    jobs = [(w, spec.clock_time(w, spec.oscillations), newton_tol, max_depth) for w in omegas]
    rows = pool_map(_threshold_job, jobs, workers)
    ds = Dataset(spec.id)
    good = [row for row in rows if row[4] == "ok"]
    r_mid = float(np.mean([row[2] for row in good])) if good else 0.0
    shift = stark_shift_estimate(r_mid) if spec.stark == "midpoint" else 0.0
    table = []
    for w, t_star, r_thr, r_guess, flag in rows:
        r_st = math.nan
        w_eff = w - shift
        if w_eff > 0:
            n = photon_order(w_eff)
            c = staircase_coefficient(w_eff, n)
            if c > 0:
                r_st = (math.log(2.0) / (c * t_star)) ** (1.0 / (2 * n))
        table.append((w, t_star, r_thr, r_st, flag))
        if flag != "ok":
            ds.failures.append(f"omega={w:g}: {flag}")
    ds.tables["threshold"] = (("omega", "t_star", "r_threshold", "r_staircase", "flag"), table)
    spots = []
    by_omega = {row[0]: row for row in good}
    for target in spec.spot_omegas:
        if not by_omega:
            break
        w = min(by_omega, key=lambda x: (abs(x - target), x))
        spots.append((w, by_omega[w][2], spec.step_for(w, solver.h), by_omega[w][1]))
    spot_vals = pool_map(_spot_safe, spots, workers)
    ds.tables["spot_checks"] = (
        ("omega", "r_threshold", "h", "t_star", "survival_cycle_avg"),
        [(w, r, h, t, s) for (w, r, h, t), s in zip(spots, spot_vals)],
    )
    ds.plots["threshold"] = {
        "series": [
            ("ladder", [x[0] for x in table], [x[2] for x in table]),
            ("staircase", [x[0] for x in table], [x[3] for x in table]),
        ],
        "title": "50% ionization threshold",
        "xlabel": "omega",
        "ylabel": "r",
    }
    ds.summary = {"r_mid": r_mid, "stark_shift_applied": shift, "clock": spec.clock}
    ds.ok = True
    return ds


def _spot_safe(job):
    try:
        return _spot_job(job)
    except DeltaIonError:
        return math.nan


# ---- ionization fraction vs r ----


def _fraction_job(job):
    omega, r, h, t_star = job
    steps = max(1, int(round(t_star / h)))
    t_grid = steps * h
    traj = solve_Y(DriveSpec.single(omega, r), SolverConfig(h=h, t_max=t_grid))
    surv = float(traj.survival[-1])
    gamma = find_decay_pole(omega, r, residue=False).gamma_rate if r > 0 else 0.0
    return (omega, r, t_grid, 1.0 - surv, surv, gamma, -math.expm1(-gamma * t_grid))


def _fraction_safe(job):
    try:
        return _fraction_job(job)
    except DeltaIonError as exc:
        omega, r, _, t_star = job
        return (omega, r, t_star, math.nan, math.nan, math.nan, math.nan, f"failed: {exc}")


def run_ionization_vs_r(spec: ScenarioSpec, solver: SolverConfig | None = None, workers: int = 1) -> Dataset:
    solver = solver or SolverConfig()
    jobs = [
        (float(w), float(r), spec.step_for(w, solver.h), spec.clock_time(w, spec.oscillations))
        for w in spec.omegas
        for r in sorted(spec.rs)
    ]
    rows = pool_map(_fraction_safe, jobs, workers)
    ds = Dataset(spec.id)
    table = []
    for row in rows:
        if len(row) == 8:
            ds.failures.append(f"omega={row[0]:g} r={row[1]:g}: {row[7]}")
            row = row[:7]
        table.append(row)
    ds.tables["fraction"] = (("omega", "r", "t_star", "ionized", "survival", "gamma_spectral", "exp_law"), table)
    series = []
    for w in spec.omegas:
        pts = [(x[1], x[3]) for x in table if x[0] == w]
        series.append((f"w={w:g}", [a for a, _ in pts], [b for _, b in pts]))
    ds.plots["fraction"] = {"series": series, "title": "ionized fraction", "xlabel": "r", "ylabel": "1 - |theta|^2"}
    ds.ok = not ds.failures
    return ds


# ---- route cross-validation ----


def xval_time_window(omega: float, gamma: float) -> tuple[float, float]:
    """``(t_start, t_max)`` for the time-domain rate fit."""
    t_max = float(np.clip(3.0 / gamma, 200.0, 4000.0)) if gamma > 0 else 200.0
    t_start = max(50.0, 20.0 * 2.0 * math.pi / omega, 0.1 * t_max)
    return t_start, t_max


def _xval_job(job):
    omega, r, h, t_max_override, tol, max_depth = job
    out = {"omega": omega, "r": r}
    try:
        pole = find_decay_pole(omega, r, tol=tol, residue=False, max_depth=max_depth)
        out["gamma_spectral"] = pole.gamma_rate
        out["flag"] = pole.flag
    except DeltaIonError as exc:
        out["error_spectral"] = str(exc)
        return out
    est = gamma_staircase(omega, r)
    out["gamma_staircase"] = est.gamma
    out["validity"] = est.validity
    t_start, t_max = xval_time_window(omega, pole.gamma_rate)
    if t_max_override is not None:
        t_max = t_max_override
        t_start = min(t_start, 0.5 * t_max)
    out["h"] = h
    out["t_fit"] = (t_start, t_max)
    try:
        traj = solve_Y(DriveSpec.single(omega, r), SolverConfig(h=h, t_max=t_max))
        out["gamma_time"] = fit_decay_rate(traj, t_start).gamma
    except DeltaIonError as exc:
        out["error_time"] = str(exc)
    return out


XVAL_HEADER = (
    "omega",
    "r",
    "h",
    "t_fit_start",
    "t_fit_end",
    "gamma_time",
    "gamma_spectral",
    "gamma_staircase",
    "staircase_validity",
    "dev_time_spectral",
    "dev_spectral_staircase",
    "gamma_resonance_law",
    "dev_spectral_resonance",
    "status",
)


def run_route_xval(
    spec: ScenarioSpec,
    solver: SolverConfig | None = None,
    workers: int = 1,
    newton_tol: float = 1e-10,
    max_depth: int = MAX_DEPTH,
) -> Dataset:
    solver = solver or SolverConfig()
    jobs = [(float(w), float(r), spec.step_for(w, solver.h), spec.t_max, newton_tol, max_depth) for w, r in spec.pairs]
    results = pool_map(_xval_job, jobs, workers)
    ds = Dataset(spec.id)
    rows = []
    for res in results:
        w, r = res["omega"], res["r"]
        g_t = res.get("gamma_time", math.nan)
        g_s = res.get("gamma_spectral", math.nan)
        g_a = res.get("gamma_staircase", math.nan)
        validity = res.get("validity", "invalid")
        status = []
        if "error_spectral" in res:
            status.append("spectral-failed")
        if "error_time" in res:
            status.append("time-failed")
        dev_ts = abs(g_t - g_s) / g_s if g_s > 0 else math.nan
        dev_sa = abs(g_s - g_a) / g_a if g_a > 0 else math.nan
        resonant = abs(w - 1.0 - stark_shift_estimate(r)) < 0.5 * r * r
        g_res = resonance_rate(r) if resonant and r > 0 else math.nan
        dev_res = abs(g_s - g_res) / g_res if resonant and r > 0 else math.nan
        if validity == "interior":
            if not dev_ts <= spec.tol_time_spectral:
                status.append("time-spectral-exceeded")
            if not dev_sa <= max(spec.tol_staircase_floor, spec.tol_staircase_r2 * r * r):
                status.append("spectral-staircase-exceeded")
        if resonant and spec.gate_resonance and not dev_res <= spec.tol_resonance:
            status.append("resonance-law-exceeded")
        if not status:
            status.append("ok" if validity == "interior" else "ok-ungated")
        t0, t1 = res.get("t_fit", (math.nan, math.nan))
        row = (w, r, res.get("h", math.nan), t0, t1, g_t, g_s, g_a, validity, dev_ts, dev_sa, g_res, dev_res, "|".join(status))
        rows.append(row)
        if not status[0].startswith("ok"):
            ds.failures.append(f"omega={w:g} r={r:g}: {row[-1]}")
    ds.tables["xval"] = (XVAL_HEADER, rows)
    ds.ok = not ds.failures
    return ds


# ---- orchestration ----


def run_dataset(spec: ScenarioSpec, solver: SolverConfig, workers: int, newton_tol: float, max_depth: int) -> Dataset:
    if spec.id == "survival_curves":
        return run_survival_curves(spec, solver, workers)
    if spec.id == "gamma_sweep":
        return run_gamma_sweep(spec, workers, newton_tol, max_depth)
    if spec.id == "threshold_50":
        return run_threshold_50(spec, solver, workers, newton_tol, max_depth)
    if spec.id == "ionization_vs_r":
        return run_ionization_vs_r(spec, solver, workers)
    return run_route_xval(spec, solver, workers, newton_tol, max_depth)


def write_dataset(ds: Dataset, out_dir) -> list[Path]:
    out_dir = Path(out_dir)
    files = []
    for name, (header, rows) in sorted(ds.tables.items()):
        files.append(dio.write_csv(out_dir / "data" / f"{name}.csv", header, rows))
    for name, plot in sorted(ds.plots.items()):
        files.append(
            dio.svg_line_plot(
                out_dir / "plots" / f"{name}.svg",
                plot["series"],
                title=plot.get("title", ""),
                xlabel=plot.get("xlabel", ""),
                ylabel=plot.get("ylabel", ""),
            )
        )
    return files


def run_scenario(
    spec: ScenarioSpec,
    solver: SolverConfig,
    out_dir,
    *,
    workers: int = 1,
    newton_tol: float = 1e-10,
    max_depth: int = MAX_DEPTH,
    config: dict | None = None,
) -> Dataset:
    """Write the manifest, run the scenario, then write data, plots and the final manifest."""
    out_dir = Path(out_dir)
    manifest = {
        "scenario": spec.to_dict(),
        "solver": asdict(solver),
        "spectral": {"newton_tol": newton_tol, "depth_cap": max_depth},
        "config": config,
        "clock": spec.clock,
        "tolerances": {"verify_rtol": VERIFY_RTOL, "verify_atol": VERIFY_ATOL},
        "code_revision": dio.code_revision(),
        "backend": BACKEND,
        "status": "running",
    }
    dio.write_manifest(out_dir / "manifest.json", manifest)
    ds = run_dataset(spec, solver, workers, newton_tol, max_depth)
    files = write_dataset(ds, out_dir)
    manifest["status"] = "complete" if ds.ok else "failed"
    manifest["failures"] = ds.failures
    manifest["summary"] = ds.summary
    manifest["files"] = {str(f.relative_to(out_dir)): dio.file_sha256(f) for f in files if f.suffix == ".csv"}
    dio.write_manifest(out_dir / "manifest.json", manifest)
    return ds


def compare_outputs(ref_dir, new_dir, rtol: float = VERIFY_RTOL, atol: float = VERIFY_ATOL) -> list[str]:
    """Field-by-field CSV comparison; returns a list of differences."""
    ref_dir, new_dir = Path(ref_dir), Path(new_dir)
    problems = []
    for ref in sorted((ref_dir / "data").glob("*.csv")):
        new = new_dir / "data" / ref.name
        if not new.exists():
            problems.append(f"{ref.name}: missing from recomputation")
            continue
        h1, rows1 = dio.read_csv(ref)
        h2, rows2 = dio.read_csv(new)
        if h1 != h2 or len(rows1) != len(rows2):
            problems.append(f"{ref.name}: shape or header differs")
            continue
        for i, (a, b) in enumerate(zip(rows1, rows2)):
            for col, x, y in zip(h1, a, b):
                if x == y:
                    continue
                try:
                    fx, fy = float(x), float(y)
                except ValueError:
                    problems.append(f"{ref.name} row {i + 1} {col}: {x!r} != {y!r}")
                    continue
                if not abs(fx - fy) <= atol + rtol * abs(fx):
                    problems.append(f"{ref.name} row {i + 1} {col}: {x} vs {y}")
    return problems


__all__ = [
    "SCENARIO_IDS",
    "Dataset",
    "ScenarioSpec",
    "compare_outputs",
    "pool_map",
    "resolve_workers",
    "run_gamma_sweep",
    "run_ionization_vs_r",
    "run_route_xval",
    "run_scenario",
    "run_survival_curves",
    "run_threshold_50",
    "stark_peak",
    "write_dataset",
]
