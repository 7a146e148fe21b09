"""Scenario drivers: reproducible experiment runs with verdict reports.

Five scenarios:

* ``madelung-demo``          - density/current blindness to the relative
  phase of disjoint packets, versus the evolved interference pattern.
* ``continuous-aspect``      - line electron passing a flux source:
  constant velocity, no charged/neutral lag, continuously growing
  branch entanglement and phase.
* ``instantaneous-aspect``   - two-packet interferometer around the
  flux string: abrupt modular-momentum argument jump plus fringe shift,
  under both the staged and the lattice engine.
* ``gauge-invariance``       - one physical run in string and symmetric
  gauges related by a gauge transformation.
* ``flux-quantization``      - alpha = pi k sweep; observables depend
  on k mod 2 only.

Every verdict records its measured value and declared tolerance, and
every run is a pure function of its config.
"""

from __future__ import annotations

from dataclasses import dataclass, field as dc_field
from typing import Dict, List, Optional

import numpy as np
from scipy.ndimage import gaussian_filter1d

from .config import ScenarioConfig
from .errors import ScenarioError
from .fields import Grid2D, WaveField, bump_packet, gaussian_packet, make_grid, superpose
from .gauge import angle_gauge_function, gauge_transform, quantized_flux_values, string_gauge, symmetric_gauge, zero_gauge
from .observables import (current, density, expectation_canonical_momentum,
                          expectation_position, expectation_velocity,
                          modular_momentum_expectation)
from .propagators import (PropagatorConfig, disk_mask, evolve_lattice, evolve_staged,
                          free_evolution)
from .propagators import evolve_line_system, make_line_system

TWO_PI = 2.0 * np.pi


@dataclass
class Verdict:
    name: str
    passed: bool
    measured: float
    tolerance: float
    detail: str = ""


@dataclass
class ScenarioReport:
    scenario: str
    parameters: dict
    timeseries: Dict[str, np.ndarray] = dc_field(default_factory=dict)
    events: List[dict] = dc_field(default_factory=list)
    verdicts: List[Verdict] = dc_field(default_factory=list)
    arrays: Dict[str, np.ndarray] = dc_field(default_factory=dict)  # not serialized

    def add(self, name, measured, tolerance, passed=None, detail=""):
        if passed is None:
            passed = bool(measured <= tolerance)
        self.verdicts.append(Verdict(name, bool(passed), float(measured), float(tolerance), detail))

    def verdict(self, name) -> Verdict:
        for v in self.verdicts:
            if v.name == name:
                return v
        raise KeyError(name)

    def passed(self) -> bool:
        return all(v.passed for v in self.verdicts)


# ---------------------------------------------------------------------------
# shared estimators


def gaussian_sigma_t(sigma: float, t: float) -> float:
    """Free-spreading width sigma(t) = sigma sqrt(1 + (t / 2 sigma^2)^2)."""
    return sigma * np.sqrt(1.0 + (t / (2.0 * sigma ** 2)) ** 2)


def l2_density_distance(rho_a: np.ndarray, rho_b: np.ndarray, cell_area: float) -> float:
    return float(np.sqrt(np.sum((rho_a - rho_b) ** 2) * cell_area))


def circular_distance(a: float, b: float, period: float = TWO_PI) -> float:
    d = (a - b) % period
    return float(min(d, period - d))


def circular_mean_angle(phasors: np.ndarray) -> float:
    return float(np.angle(np.mean(phasors / np.abs(phasors))))


def fringe_spacing(profile: np.ndarray, dx: float) -> float:
    """Dominant fringe wavelength of a 1D density slice (quadratic-refined FFT peak)."""
    w = profile - profile.mean()
    spec = np.abs(np.fft.rfft(w))
    freqs = np.fft.rfftfreq(len(w), dx)
    lo = max(3, int(len(spec) // 200))          # skip the envelope's low-frequency bins
    k = lo + int(np.argmax(spec[lo:]))
    if 0 < k < len(spec) - 1:
        s0, s1, s2 = np.log(spec[k - 1] + 1e-300), np.log(spec[k] + 1e-300), np.log(spec[k + 1] + 1e-300)
        denom = s0 - 2 * s1 + s2
        delta = 0.0 if denom == 0 else 0.5 * (s0 - s2) / denom
    else:
        delta = 0.0
    f = freqs[k] + delta * (freqs[1] - freqs[0])
    if f <= 0:
        raise ScenarioError("no fringe structure found in the density slice")
    return float(1.0 / f)


def fringe_shift(profile_ref: np.ndarray, profile: np.ndarray, dx: float):
    """Sub-cell shift of the fringes of ``profile`` relative to ``profile_ref``.

    Envelopes are removed with a Gaussian high-pass before the
    cross-correlation; the peak is refined by quadratic interpolation.
    Returns (shift_in_fringe_spacings in [0, 1), spacing).
    """
    spacing = fringe_spacing(profile_ref, dx)
    sig = max(spacing / (4.0 * dx), 1.0)
    q_ref = profile_ref - gaussian_filter1d(profile_ref, sig)
    q = profile - gaussian_filter1d(profile, sig)
    max_lag = int(round(0.75 * spacing / dx))
    n = len(q)
    lags = np.arange(-max_lag, max_lag + 1)
    corr = np.empty(len(lags))
    for idx, s in enumerate(lags):
        if s >= 0:
            corr[idx] = float(np.dot(q[s:], q_ref[: n - s]))
        else:
            corr[idx] = float(np.dot(q[: n + s], q_ref[-s:]))
    k = int(np.argmax(corr))
    if 0 < k < len(lags) - 1:
        c0, c1, c2 = corr[k - 1], corr[k], corr[k + 1]
        denom = c0 - 2 * c1 + c2
        delta = 0.0 if denom == 0 else 0.5 * (c0 - c2) / denom
    else:
        delta = 0.0
    shift = (lags[k] + delta) * dx
    return float((shift / spacing) % 1.0), spacing


def interference_profile(rho: np.ndarray, grid: Grid2D, y_center: float, half_width: float) -> np.ndarray:
    """Density averaged over a y band around the packet centroid: fringes vs x."""
    y = grid.y
    sel = np.abs(y - y_center) <= half_width
    if not np.any(sel):
        raise ScenarioError("interference band lies outside the grid")
    return rho[sel, :].mean(axis=0)


def _series_recorder(length: float):
    """Record t, modular expectation, right-half centroid, and y<0 mass fraction."""
    data = {"t": [], "mod": [], "right_y": [], "mass_below": []}

    def cb(t: float, f: WaveField):
        data["t"].append(t)
        data["mod"].append(modular_momentum_expectation(f, length))
        rho = np.abs(f.amp) ** 2
        sel = f.grid.x > 0
        w = rho[:, sel].sum()
        data["right_y"].append(float((rho[:, sel].sum(axis=1) * f.grid.y).sum() / w))
        total = rho.sum()
        data["mass_below"].append(float(rho[f.grid.y < 0, :].sum() / total))

    return data, cb


def _zero_crossing_time(t: np.ndarray, y: np.ndarray) -> float:
    sign = y < 0
    idx = np.nonzero(sign[1:] & ~sign[:-1])[0]
    if len(idx) == 0:
        raise ScenarioError("right packet centroid never crossed y = 0")
    i = int(idx[0])
    frac = y[i] / (y[i] - y[i + 1]) if y[i] != y[i + 1] else 1.0
    return float(t[i] + frac * (t[i + 1] - t[i]))


def _jump_analysis(t: np.ndarray, mod: np.ndarray, windows, alpha: float):
    """Windowed argument statistics of the modular series.

    windows = (stage1_mask, stage3_mask) boolean arrays.  Returns dict
    with drift per stage (argument and magnitude), circular jump, and
    the detected jump interval midpoint.
    """
    w1, w3 = windows
    if not (np.any(w1) and np.any(w3)):
        raise ScenarioError("empty free-stage window; run too short for the jump analysis")
    phase = mod / np.abs(mod)
    args = np.angle(mod)

    def window_stats(w):
        ref = circular_mean_angle(phase[w])
        dev = np.angle(phase[w] * np.exp(-1j * ref))
        return ref, float(dev.max() - dev.min())

    a1, drift1 = window_stats(w1)
    a3, drift3 = window_stats(w3)
    m1 = np.abs(mod)[w1]
    m3 = np.abs(mod)[w3]
    mag_drift = float(max(m1.max() - m1.min(), m3.max() - m3.min()))
    jump = (a3 - a1) % TWO_PI

    # jump-time estimator: midpoint of the contiguous interval around the
    # steepest argument change where |d arg/dt| exceeds 10x the stage-1 rate
    dargs = np.abs(np.diff(np.unwrap(args)) / np.diff(t))
    i1 = np.nonzero(w1)[0]
    base_idx = i1[i1 < len(dargs)]
    baseline = float(np.quantile(dargs[base_idx], 0.95)) if len(base_idx) else 0.0
    thresh = max(10.0 * baseline, 1e-9)
    peak = int(np.argmax(dargs))
    if dargs[peak] <= thresh:
        t_jump = None
    else:
        lo = peak
        while lo > 0 and dargs[lo - 1] > thresh:
            lo -= 1
        hi = peak
        while hi < len(dargs) - 1 and dargs[hi + 1] > thresh:
            hi += 1
        t_jump = float(0.5 * (t[lo] + t[hi + 1]))
    return {"jump": float(jump), "arg_drift": max(drift1, drift3),
            "arg_drift_1": drift1, "arg_drift_3": drift3,
            "mag_drift": mag_drift, "t_jump": t_jump,
            "mag_before": float(m1.mean()), "mag_after": float(m3.mean())}


# ---------------------------------------------------------------------------
# scenario: madelung-demo


def run_madelung_demo(cfg: ScenarioConfig, on_snapshot=None) -> ScenarioReport:
    """Initial rho, J are blind to the packets' relative phase; the evolved
    interference pattern is not."""
    grid = make_grid(cfg.nx, cfg.ny, cfg.dx, cfg.dy, cfg.x0, cfg.y0)
    a = cfg.bump_radius
    sep = cfg.bump_separation
    if sep <= 2 * a + 4 * max(grid.dx, grid.dy):
        raise ScenarioError(
            f"bump packets are not disjoint: separation {sep} vs supports of radius {a}")
    left = bump_packet(grid, (-sep / 2.0, 0.0), a)
    right = bump_packet(grid, (+sep / 2.0, 0.0), a)
    gauge = zero_gauge(grid)
    betas = (cfg.beta_a, np.pi / 4.0, cfg.beta_b, 3.0 * np.pi / 2.0)

    report = ScenarioReport("madelung-demo", _params(cfg))
    base = superpose(left, right, 1.0, 1.0, betas[0])
    rho0 = density(base).values
    j0 = current(base, gauge)
    rho_dev = 0.0
    j_dev = 0.0
    for b in betas[1:]:
        fb = superpose(left, right, 1.0, 1.0, b)
        rho_dev = max(rho_dev, float(np.max(np.abs(density(fb).values - rho0))))
        jb = current(fb, gauge)
        j_dev = max(j_dev, float(np.max(np.abs(jb.vx - j0.vx))), float(np.max(np.abs(jb.vy - j0.vy))))
    report.add("initial_density_phase_blind", rho_dev, 1e-13,
               detail="max pointwise |rho(beta) - rho(0)| over beta grid")
    report.add("initial_current_phase_blind", j_dev, 1e-13,
               detail="max pointwise |J(beta) - J(0)| over beta grid")

    run_cfg = PropagatorConfig(dt=cfg.dt, t_end=cfg.t_end, record_dt=cfg.record_dt,
                               snapshot_times=cfg.snapshot_times)
    times: List[float] = []
    stored: List[np.ndarray] = []

    def keep(t, f):
        times.append(t)
        stored.append(np.abs(f.amp) ** 2)

    fa = superpose(left, right, 1.0, 1.0, cfg.beta_a)
    final_a = free_evolution(fa, run_cfg, on_record=keep)

    diffs: List[float] = []
    idx = {"k": 0}

    def compare(t, f):
        rho = np.abs(f.amp) ** 2
        diffs.append(l2_density_distance(rho, stored[idx["k"]], grid.cell_area))
        idx["k"] += 1

    fb = superpose(left, right, 1.0, 1.0, cfg.beta_b)
    final_b = free_evolution(fb, run_cfg, on_record=compare, on_snapshot=on_snapshot)

    final_diff = diffs[-1]
    report.add("evolved_density_distinguishes_phases", final_diff, 0.1,
               passed=final_diff > 0.1,
               detail=f"L2 distance of final densities, beta {cfg.beta_a} vs {cfg.beta_b} (must exceed 0.1)")

    rerun = free_evolution(fa, run_cfg)
    rerun_diff = l2_density_distance(np.abs(rerun.amp) ** 2, np.abs(final_a.amp) ** 2, grid.cell_area)
    report.add("identical_configs_reproduce", rerun_diff, 1e-10,
               detail="L2 distance between two runs of the same beta")

    above = [(t, d) for t, d in zip(times, diffs) if d > 0.1]
    if above:
        report.events.append({"name": "patterns-distinguishable", "time": above[0][0],
                              "value": above[0][1]})
    report.timeseries = {"t": np.array(times), "l2_density_difference": np.array(diffs)}
    report.arrays["final_density_beta_a"] = np.abs(final_a.amp) ** 2
    report.arrays["final_density_beta_b"] = np.abs(final_b.amp) ** 2
    return report


# ---------------------------------------------------------------------------
# scenario: continuous-aspect


def run_continuous_aspect(cfg: ScenarioConfig, on_snapshot=None) -> ScenarioReport:
    """Charged vs neutral line electron passing the flux source."""
    if cfg.snapshot_times:
        raise ScenarioError("continuous-aspect is one-dimensional; 2D snapshots are not available")
    report = ScenarioReport("continuous-aspect", _params(cfg))
    run_cfg = PropagatorConfig(dt=cfg.dt, t_end=cfg.t_end, record_dt=cfg.record_dt)

    def build(mu):
        return make_line_system(cfg.line_ny, cfg.line_dy, cfg.line_y0, cfg.line_center,
                                cfg.line_sigma, cfg.line_k, (cfg.n0, cfg.n1), mu,
                                offset=cfg.offset_d, cylinder_moment=cfg.i_c)

    _, charged = evolve_line_system(build(cfg.mu), run_cfg)
    _, neutral = evolve_line_system(build(0.0), run_cfg)

    t = charged["t"]
    domain = cfg.line_ny * cfg.line_dy
    v = charged["velocity"]
    v_drift = float(np.max(v.max(axis=0) - v.min(axis=0)))
    report.add("velocity_constant", v_drift, 1e-8,
               detail="max over branches of the <v_y> excursion across the run")

    w = charged["norms"]
    ybar_c = np.sum(charged["ybar"] * w, axis=1) / np.sum(w, axis=1)
    wn = neutral["norms"]
    ybar_n = np.sum(neutral["ybar"] * wn, axis=1) / np.sum(wn, axis=1)
    lag = float(np.max(np.abs(ybar_c - ybar_n)))
    report.add("no_charged_neutral_lag", lag, 1e-8 * domain,
               detail="max |<y>_charged - <y>_neutral| over the run")

    ov = charged["overlaps"][:, 0]
    ov_n = neutral["overlaps"][:, 0]
    report.add("neutral_overlap_stays_one", float(np.max(np.abs(np.abs(ov_n) - 1.0))), 1e-12,
               detail="decoupled branches stay identical")

    steps = np.abs(np.diff(np.abs(ov)))
    slopes = steps / np.diff(t)
    c_fit = 10.0 * float(np.median(slopes)) + 1e-9
    max_step = float(np.max(steps)) if len(steps) else 0.0
    report.add("overlap_changes_continuously", max_step, c_fit * float(np.max(np.diff(t))),
               detail="largest inter-record |overlap| step vs fitted C*dt bound")

    inv_r = charged["inv_r"][:, 0]
    v0 = charged["velocity"][:, 0]
    predicted = cfg.mu * (cfg.n1 - cfg.n0) * np.trapezoid(inv_r * v0, t)
    measured = float(np.angle(ov[-1] * np.conj(ov[0])))
    if np.isfinite(cfg.i_c):
        measured -= (cfg.n0 ** 2 - cfg.n1 ** 2) * cfg.t_end / (2.0 * cfg.i_c)
    report.add("branch_phase_matches_gauge_oracle", abs(measured - predicted), 1e-4,
               detail=f"arg overlap change {measured:.6e} vs mu*dn*int(<1/r> v dt) = {predicted:.6e}")

    closest = t[int(np.argmin(np.abs(ybar_c)))]
    report.events.append({"name": "closest-approach", "time": float(closest),
                          "value": float(np.min(np.abs(ybar_c)))})
    report.timeseries = {
        "t": t,
        "velocity_n0": charged["velocity"][:, 0],
        "velocity_n1": charged["velocity"][:, 1],
        "ybar_charged": ybar_c,
        "ybar_neutral": ybar_n,
        "overlap_abs": np.abs(ov),
        "overlap_arg": np.angle(ov),
        "inv_r": inv_r,
        "phi_c_displacement": charged["phi_c_displacement"],
    }
    return report


# ---------------------------------------------------------------------------
# scenario: instantaneous-aspect


def _fig2_packets(cfg: ScenarioConfig, grid: Grid2D):
    left = gaussian_packet(grid, (-cfg.packet_x, cfg.packet_y), cfg.sigma, (cfg.kx, cfg.ky))
    right = gaussian_packet(grid, (+cfg.packet_x, cfg.packet_y), cfg.sigma, (cfg.kx, cfg.ky))
    return left, right


def _band_profile(rho, grid, cfg, t_end):
    y_c = cfg.packet_y + cfg.ky * t_end
    half = 0.5 * gaussian_sigma_t(cfg.sigma, t_end)
    return interference_profile(rho, grid, y_c, half)


def run_instantaneous_aspect(cfg: ScenarioConfig, reference: Optional[dict] = None,
                             on_snapshot=None) -> ScenarioReport:
    """Modular-momentum jump and fringe shift under both engines.

    ``reference`` may carry precomputed alpha = 0 final densities
    {"staged": rho, "lattice": rho} to avoid rerunning the reference;
    otherwise they are computed here (skipped when alpha == 0, which is
    its own reference).
    """
    grid = make_grid(cfg.nx, cfg.ny, cfg.dx, cfg.dy, cfg.x0, cfg.y0)
    left, right = _fig2_packets(cfg, grid)
    alpha = float(cfg.alpha)
    length = cfg.mod_length
    report = ScenarioReport("instantaneous-aspect", _params(cfg))

    run_cfg = PropagatorConfig(dt=cfg.dt, t_end=cfg.t_end, record_dt=cfg.record_dt)

    staged_data, staged_cb = _series_recorder(length)
    staged_final, kick_event = evolve_staged(left, right, alpha, run_cfg, on_record=staged_cb)
    report.events.append(kick_event)

    mask = disk_mask(grid, cfg.mask_radius) if cfg.mask_radius > 0 else None
    lat_cfg = PropagatorConfig(dt=cfg.dt, t_end=cfg.t_end, record_dt=cfg.record_dt, mask=mask,
                               snapshot_times=cfg.snapshot_times)
    gauge = string_gauge(grid, alpha)
    initial = superpose(left, right, 1.0, 1.0, 0.0)
    lattice_data, lattice_cb = _series_recorder(length)
    lattice_final = evolve_lattice(initial, gauge, lat_cfg, on_record=lattice_cb,
                                   on_snapshot=on_snapshot)

    rho_staged = np.abs(staged_final.amp) ** 2
    rho_lattice = np.abs(lattice_final.amp) ** 2
    report.arrays["staged_final_density"] = rho_staged
    report.arrays["lattice_final_density"] = rho_lattice

    # --- windows ---------------------------------------------------------
    t_s = np.array(staged_data["t"])
    mod_s = np.array(staged_data["mod"])
    t_l = np.array(lattice_data["t"])
    mod_l = np.array(lattice_data["mod"])
    mass_l = np.array(lattice_data["mass_below"])

    t_cross_s = kick_event["zero_crossing_estimate"]
    t_cross_l = _zero_crossing_time(t_l, np.array(lattice_data["right_y"]))
    speed = abs(cfg.ky)
    window = gaussian_sigma_t(cfg.sigma, t_cross_l) / speed

    w1_s = t_s < t_cross_s - 0.5 * window
    w3_s = t_s > t_cross_s + 0.5 * window
    if kick_event["time"] > t_cross_s + 0.5 * window:
        w3_s &= t_s > kick_event["time"]
    # The lattice transition physically spans the packet's full traversal,
    # so its free stages are bounded by crossed-mass thresholds: stage 1
    # while < 1e-4 has crossed, stage 3 once the crossing is essentially
    # complete and the crossed mass has settled to within 1.5e-4 of its
    # final value (argument drift is bounded by that mass change).
    w1_l = mass_l < 1e-4
    w3_l = (mass_l > 1.0 - 5e-3) & ((mass_l[-1] - mass_l) < 1.5e-4)

    stats_s = _jump_analysis(t_s, mod_s, (w1_s, w3_s), alpha)
    stats_l = _jump_analysis(t_l, mod_l, (w1_l, w3_l), alpha)

    expected_jump = alpha % TWO_PI
    no_jump = circular_distance(expected_jump, 0.0) < 1e-12
    for tag, stats, t_cross in (("staged", stats_s, t_cross_s), ("lattice", stats_l, t_cross_l)):
        # staged free flight commutes with exp(i p_x L) exactly; the lattice
        # tolerance covers discretization
        tol = 1e-6 if tag == "staged" else 1e-3
        report.add(f"{tag}_argument_constant_in_free_stages", stats["arg_drift"], tol,
                   detail="max argument excursion inside each free-stage window")
        report.add(f"{tag}_magnitude_constant_in_free_stages", stats["mag_drift"], tol,
                   detail="max |<exp(i p_x L)>| excursion inside each free-stage window")
        report.add(f"{tag}_jump_magnitude", circular_distance(stats["jump"], expected_jump), 1e-2,
                   detail=f"jump {stats['jump']:.6f} rad vs alpha mod 2pi = {expected_jump:.6f}")
        if no_jump:
            report.add(f"{tag}_jump_time", 0.0, window, passed=True,
                       detail="alpha = 0: no jump expected, timing check skipped")
        else:
            if stats["t_jump"] is None:
                report.add(f"{tag}_jump_time", np.inf, window, passed=False,
                           detail="no argument jump detected")
            else:
                report.add(f"{tag}_jump_time", abs(stats["t_jump"] - t_cross), window,
                           detail=f"jump at t={stats['t_jump']:.4f} vs centroid crossing {t_cross:.4f}")
            report.events.append({"name": f"{tag}-argument-jump", "time": stats["t_jump"],
                                  "value": stats["jump"]})

    # --- fringe shift ----------------------------------------------------
    if reference is None and not no_jump:
        ref_cfg = _replace_alpha(cfg, 0.0)
        ref_report = run_instantaneous_aspect(ref_cfg)
        reference = {"staged": ref_report.arrays["staged_final_density"],
                     "lattice": ref_report.arrays["lattice_final_density"]}
    expected_shift = (alpha / TWO_PI) % 1.0
    shift_tol = max(0.02 * expected_shift, 0.004)
    shifts = {}
    for tag, rho, ref_key in (("staged", rho_staged, "staged"), ("lattice", rho_lattice, "lattice")):
        prof = _band_profile(rho, grid, cfg, cfg.t_end)
        if no_jump:
            ref_prof = prof
            shift, spacing = 0.0, fringe_spacing(prof, grid.dx)
        else:
            ref_prof = _band_profile(reference[ref_key], grid, cfg, cfg.t_end)
            shift, spacing = fringe_shift(ref_prof, prof, grid.dx)
        shifts[tag] = (shift, spacing)
        report.add(f"{tag}_fringe_shift", circular_distance(shift, expected_shift, 1.0), shift_tol,
                   detail=f"shift {shift:.4f} fringes vs alpha/2pi = {expected_shift:.4f}, spacing {spacing:.3f}")

    report.add("engines_final_density_agree",
               l2_density_distance(rho_staged, rho_lattice, grid.cell_area), 1e-3,
               detail="L2 distance between staged and lattice final densities")
    ds = shifts["staged"]
    dl = shifts["lattice"]
    frdist = circular_distance(ds[0], dl[0], 1.0) * ds[1]
    report.add("engines_fringe_positions_agree", frdist, grid.dx / 2.0,
               detail="fringe position difference between engines (length units)")

    report.timeseries = {
        "t": t_s,
        "staged_mod_re": mod_s.real, "staged_mod_im": mod_s.imag,
        "staged_mod_abs": np.abs(mod_s), "staged_mod_arg": np.angle(mod_s),
        "lattice_mod_re": mod_l.real, "lattice_mod_im": mod_l.imag,
        "lattice_mod_abs": np.abs(mod_l), "lattice_mod_arg": np.angle(mod_l),
        "staged_right_centroid_y": np.array(staged_data["right_y"]),
        "lattice_right_centroid_y": np.array(lattice_data["right_y"]),
        "lattice_mass_below_string": mass_l,
    }
    return report


def _replace_alpha(cfg: ScenarioConfig, alpha: float) -> ScenarioConfig:
    import dataclasses
    return dataclasses.replace(cfg, alpha=alpha)


# ---------------------------------------------------------------------------
# scenario: gauge-invariance


def run_gauge_invariance(cfg: ScenarioConfig, on_snapshot=None) -> ScenarioReport:
    """Evolve one physical state in the string and the symmetric gauge."""
    grid = make_grid(cfg.nx, cfg.ny, cfg.dx, cfg.dy, cfg.x0, cfg.y0)
    left, right = _fig2_packets(cfg, grid)
    alpha = float(cfg.alpha)
    report = ScenarioReport("gauge-invariance", _params(cfg))

    g_string = string_gauge(grid, alpha)
    g_sym = symmetric_gauge(grid, alpha, max(cfg.mask_radius, 3.0 * max(grid.dx, grid.dy)))
    psi_string = superpose(left, right, 1.0, 1.0, 0.0)
    chi = angle_gauge_function(grid, -alpha)   # exp(i chi) undoes the string-gauge phase
    psi_sym, _ = gauge_transform(psi_string, g_string, chi)

    mask = disk_mask(grid, cfg.mask_radius) if cfg.mask_radius > 0 else None
    run_cfg = PropagatorConfig(dt=cfg.dt, t_end=cfg.t_end, record_dt=cfg.record_dt, mask=mask)
    snap_cfg = PropagatorConfig(dt=cfg.dt, t_end=cfg.t_end, record_dt=cfg.record_dt, mask=mask,
                                snapshot_times=cfg.snapshot_times)

    recs: Dict[str, list] = {"t": [], "rho": [], "v": [], "p": []}

    def make_cb(gauge, store_rho):
        def cb(t, f):
            if store_rho:
                recs["t"].append(t)
                recs["rho"].append(np.abs(f.amp) ** 2)
                recs["v"].append(expectation_velocity(f, gauge))
                recs["p"].append(expectation_canonical_momentum(f))
            else:
                cb.out.append((t, np.abs(f.amp) ** 2, expectation_velocity(f, gauge),
                               expectation_canonical_momentum(f)))
        cb.out = []
        return cb

    cb_string = make_cb(g_string, True)
    evolve_lattice(psi_string, g_string, snap_cfg, on_record=cb_string, on_snapshot=on_snapshot)
    cb_sym = make_cb(g_sym, False)
    evolve_lattice(psi_sym, g_sym, run_cfg, on_record=cb_sym)

    rho_diff = 0.0
    v_diff = 0.0
    p_diff = 0.0
    for (rho_a, va, pa), (t, rho_b, vb, pb) in zip(
            zip(recs["rho"], recs["v"], recs["p"]), cb_sym.out):
        rho_diff = max(rho_diff, l2_density_distance(rho_a, rho_b, grid.cell_area))
        v_diff = max(v_diff, abs(va[0] - vb[0]), abs(va[1] - vb[1]))
        p_diff = max(p_diff, abs(pa[0] - pb[0]), abs(pa[1] - pb[1]))
    report.add("densities_gauge_invariant", rho_diff, 1e-3,
               detail="max L2 density distance across snapshots")
    report.add("velocities_gauge_invariant", v_diff, 1e-6,
               detail="max |<v>| component difference across snapshots")
    report.add("canonical_momenta_differ", p_diff, 0.0, passed=True,
               detail="reported, not a failure: canonical <p> is gauge dependent")

    # negative control: same initial field, wrong gauge, no transform
    ctrl = evolve_lattice(psi_string, g_sym, run_cfg)
    ctrl_diff = l2_density_distance(np.abs(ctrl.amp) ** 2, recs["rho"][-1], grid.cell_area)
    report.add("negative_control_detects_misuse", ctrl_diff, 1e-2,
               passed=ctrl_diff > 1e-2,
               detail="skipping the initial gauge transform must visibly change the density")

    report.timeseries = {
        "t": np.array(recs["t"]),
        "vx_string": np.array([v[0] for v in recs["v"]]),
        "vy_string": np.array([v[1] for v in recs["v"]]),
        "px_string": np.array([p[0] for p in recs["p"]]),
        "py_string": np.array([p[1] for p in recs["p"]]),
        "vx_symmetric": np.array([o[2][0] for o in cb_sym.out]),
        "vy_symmetric": np.array([o[2][1] for o in cb_sym.out]),
        "px_symmetric": np.array([o[3][0] for o in cb_sym.out]),
        "py_symmetric": np.array([o[3][1] for o in cb_sym.out]),
    }
    return report


# ---------------------------------------------------------------------------
# scenario: flux-quantization


def run_flux_quantization_sweep(cfg: ScenarioConfig, on_snapshot=None) -> ScenarioReport:
    """alpha = pi k sweep under the staged engine: k mod 2 is all that matters."""
    grid = make_grid(cfg.nx, cfg.ny, cfg.dx, cfg.dy, cfg.x0, cfg.y0)
    left, right = _fig2_packets(cfg, grid)
    report = ScenarioReport("flux-quantization", _params(cfg))
    run_cfg = PropagatorConfig(dt=cfg.dt, t_end=cfg.t_end, record_dt=cfg.record_dt)

    alphas = quantized_flux_values(cfg.k_max)
    snap_cfg = PropagatorConfig(dt=cfg.dt, t_end=cfg.t_end, record_dt=cfg.record_dt,
                                snapshot_times=cfg.snapshot_times)
    finals = []
    for k, alpha in enumerate(alphas):
        if k == 1 and on_snapshot is not None:
            out, _ = evolve_staged(left, right, alpha, snap_cfg, on_snapshot=on_snapshot)
        else:
            out, _ = evolve_staged(left, right, alpha, run_cfg)
        finals.append(np.abs(out.amp) ** 2)

    profile_ref = _band_profile(finals[0], grid, cfg, cfg.t_end)
    shifts = [0.0]
    for rho in finals[1:]:
        shifts.append(fringe_shift(profile_ref, _band_profile(rho, grid, cfg, cfg.t_end), grid.dx)[0])

    worst_even = 0.0
    worst_pair = 0.0
    worst_half = 0.0
    for k in range(len(alphas)):
        if k % 2 == 0:
            worst_even = max(worst_even, l2_density_distance(finals[k], finals[0], grid.cell_area))
        else:
            worst_half = max(worst_half, circular_distance(shifts[k], 0.5, 1.0))
            worst_pair = max(worst_pair, l2_density_distance(finals[k], finals[1], grid.cell_area))
    report.add("even_k_identical_to_zero_flux", worst_even, 1e-3,
               detail="max L2 density distance of even-k patterns from k=0")
    report.add("odd_k_identical_to_each_other", worst_pair, 1e-3,
               detail="max L2 density distance of odd-k patterns from k=1")
    report.add("odd_k_half_fringe_shift", worst_half, 0.01,
               detail="odd-k fringe shift vs the exact half fringe (2% of 0.5)")
    shift_mod = [circular_distance(s, shifts[k % 2], 1.0) for k, s in enumerate(shifts)]
    report.add("shift_depends_on_k_mod_2", float(np.max(shift_mod)), 0.01,
               detail="fringe shift of every k vs its k mod 2 representative")

    report.timeseries = {"t": np.array([float(k) for k in range(len(alphas))]),
                         "alpha": np.array(alphas),
                         "fringe_shift": np.array(shifts)}
    return report


# ---------------------------------------------------------------------------


def _params(cfg: ScenarioConfig) -> dict:
    import dataclasses
    d = dataclasses.asdict(cfg)
    d["snapshot_times"] = list(d["snapshot_times"])
    return d


SCENARIO_RUNNERS = {
    "madelung-demo": run_madelung_demo,
    "continuous-aspect": run_continuous_aspect,
    "instantaneous-aspect": run_instantaneous_aspect,
    "gauge-invariance": run_gauge_invariance,
    "flux-quantization": run_flux_quantization_sweep,
}
