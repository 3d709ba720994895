"""Exact amplitude dynamics of the trilinear pump/signal/idler interaction.

The amplitude equations are complex, but after the gauge c_n = (-i)^n x_n
(c_{n,m} = (-i)^{n+m} x_{n,m} for two pairs) they become a real linear
system x' = A x with an antisymmetric, nearest-neighbour A.  That real system
is what gets integrated.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.integrate import solve_ivp
from scipy.interpolate import CubicSpline, PchipInterpolator
from scipy.optimize import brentq
from scipy.stats import poisson

from .fock import (
    DEFAULT_POLICY,
    AmplitudeState,
    ModeSetup,
    TimeConvention,
    TruncationPolicy,
    ensemble_signal_dist,
    reduced_signal_dist,
    triangle_indices,
)
from .specfun import shannon_entropy_bits

ORACLE_MAX_NP0 = 500


@dataclass
class EvolutionConfig:
    tau_grid: np.ndarray
    convention: TimeConvention = TimeConvention.SCALED
    atol: float = 1e-15
    rtol: float = 1e-13
    policy: TruncationPolicy = DEFAULT_POLICY
    # Optional cap on the logical index; amplitude beyond it is dropped.
    index_cap: int | None = None

    def __post_init__(self):
        self.tau_grid = np.atleast_1d(np.asarray(self.tau_grid, dtype=float))
        if self.atol <= 0 or self.rtol <= 0:
            raise ValueError("integrator tolerances must be positive")
        if self.tau_grid[0] != 0.0:
            raise ValueError("tau grid must start at 0")
        if np.any(np.diff(self.tau_grid) <= 0):
            raise ValueError("tau grid must be strictly increasing")
        self.convention = TimeConvention(self.convention)

    @classmethod
    def uniform(cls, tau_max: float, dtau: float, **kw) -> "EvolutionConfig":
        n = int(round(tau_max / dtau))
        return cls(np.arange(n + 1) * dtau, **kw)


class IntegrationError(RuntimeError):
    pass


def single_pair_couplings(setup: ModeSetup, size: int | None = None) -> np.ndarray:
    """Off-diagonal couplings a_n = sqrt(n_p0 - n) sqrt((n + 1)(n_s0 + 1 + n))."""
    top = setup.n_p0 if size is None else min(size, setup.n_p0)
    n = np.arange(top, dtype=float)
    return np.sqrt(setup.n_p0 - n) * np.sqrt((n + 1.0) * (setup.n_s0 + 1.0 + n))


def _integrate(rhs, x0, t_grid, cfg: EvolutionConfig) -> np.ndarray:
    if t_grid.size == 1:
        return x0[:, None].copy()
    sol = solve_ivp(rhs, (0.0, float(t_grid[-1])), x0, method="DOP853",
                    t_eval=t_grid, rtol=cfg.rtol, atol=cfg.atol)
    if sol.status < 0 or sol.y.shape[1] != t_grid.size:
        reached = sol.t[-1] if sol.t.size else 0.0
        raise IntegrationError(f"integration failed at t'={reached:.6g}: {sol.message}")
    return sol.y


def evolve_single_pair(setup: ModeSetup, cfg: EvolutionConfig) -> list[AmplitudeState]:
    """Integrate the single-pair amplitude equations from c_n(0) = delta_{n,0}."""
    size = setup.n_p0 if cfg.index_cap is None else min(cfg.index_cap, setup.n_p0)
    a = single_pair_couplings(setup, size)

    def rhs(_t, x):
        dx = np.zeros_like(x)
        dx[:-1] -= a * x[1:]
        dx[1:] += a * x[:-1]
        return dx

    x0 = np.zeros(size + 1)
    x0[0] = 1.0
    t_grid = cfg.tau_grid / cfg.convention.factor(setup)
    y = _integrate(rhs, x0, t_grid, cfg)
    phase = (-1j) ** np.arange(size + 1)
    return [AmplitudeState(phase * y[:, j], tau=float(tau), setup=setup, convention=cfg.convention)
            for j, tau in enumerate(cfg.tau_grid)]


def propagator_oracle(setup: ModeSetup, tau: float,
                      convention: TimeConvention = TimeConvention.SCALED) -> AmplitudeState:
    """Dense exp(-i H t') applied to the initial vector, via eigendecomposition."""
    if setup.n_p0 > ORACLE_MAX_NP0:
        raise ValueError(f"propagator_oracle limited to n_p0 <= {ORACLE_MAX_NP0}")
    a = single_pair_couplings(setup)
    h = np.diag(a, 1) + np.diag(a, -1)
    evals, vecs = np.linalg.eigh(h)
    t = tau / TimeConvention(convention).factor(setup)
    c = vecs @ (np.exp(-1j * evals * t) * vecs[0])
    return AmplitudeState(c, tau=float(tau), setup=setup, convention=convention)


def evolve_two_pair(setup: ModeSetup, cfg: EvolutionConfig) -> list[AmplitudeState]:
    """Integrate the two-pair recursion on the triangle n + m <= n_p0."""
    if not setup.two_pair:
        raise ValueError("evolve_two_pair needs n_sbar0 set")
    p = setup.n_p0
    top = p if cfg.index_cap is None else min(cfg.index_cap, p)
    idx_n, idx_m = triangle_indices(p, cfg.index_cap)
    n = np.arange(top + 1, dtype=float)
    amp_n = np.sqrt((n + 1.0) * (setup.n_s0 + 1.0 + n))
    amp_m = np.sqrt((n + 1.0) * (setup.n_sbar0 + 1.0 + n))
    nn, mm = np.meshgrid(n, n, indexing="ij")
    inside = (nn + mm) <= p
    down = np.where(inside, np.sqrt(np.clip(p - nn - mm, 0.0, None)), 0.0)
    up = np.where(inside, np.sqrt(np.clip(p - nn - mm + 1.0, 0.0, None)), 0.0)
    an = amp_n[:, None]
    bm = amp_m[None, :]
    an_prev = np.concatenate([[0.0], amp_n[:-1]])[:, None]
    bm_prev = np.concatenate([[0.0], amp_m[:-1]])[None, :]
    shape = (top + 1, top + 1)

    def rhs(_t, y):
        x = np.zeros(shape)
        x[idx_n, idx_m] = y
        xp = np.zeros((top + 3, top + 3))
        xp[1:-1, 1:-1] = x
        fwd = an * xp[2:, 1:-1] + bm * xp[1:-1, 2:]
        back = an_prev * xp[:-2, 1:-1] + bm_prev * xp[1:-1, :-2]
        dx = -down * fwd + up * back
        return dx[idx_n, idx_m]

    y0 = np.zeros(idx_n.size)
    y0[0] = 1.0
    t_grid = cfg.tau_grid / cfg.convention.factor(setup)
    y = _integrate(rhs, y0, t_grid, cfg)
    phase = (-1j) ** (idx_n + idx_m)
    return [AmplitudeState(phase * y[:, j], tau=float(tau), setup=setup, convention=cfg.convention,
                           index_n=idx_n, index_m=idx_m)
            for j, tau in enumerate(cfg.tau_grid)]


# ---------------------------------------------------------------------------
# Observables


@dataclass
class ObservableSeries:
    tau_grid: np.ndarray
    nbar_s: np.ndarray
    nbar_p: np.ndarray
    nbar_ibar: np.ndarray
    var_s: np.ndarray
    var_p: np.ndarray
    entropy_s: np.ndarray
    norm_drift: np.ndarray
    mbar_sbar: np.ndarray | None = None
    var_sbar: np.ndarray | None = None
    signal_dists: list = field(default_factory=list, repr=False)

    def columns(self) -> dict:
        return {
            "tau": self.tau_grid,
            "nbar_s": self.nbar_s,
            "nbar_p": self.nbar_p,
            "var_s": self.var_s,
            "var_p": self.var_p,
            "entropy_s_bits": self.entropy_s,
            "norm_drift": self.norm_drift,
        }


def _moments(p: np.ndarray, k: np.ndarray):
    m1 = float(np.dot(k, p))
    m2 = float(np.dot(k * k, p))
    return m1, m2


def observe_single_pair(states: list[AmplitudeState]) -> ObservableSeries:
    setup = states[0].setup
    rows = []
    dists = []
    for st in states:
        p_raw = np.abs(st.values) ** 2
        norm = p_raw.sum()
        p = p_raw / norm
        k = np.arange(p.size, dtype=float)
        m1, m2 = _moments(p, k)
        var = max(m2 - m1 * m1, 0.0)
        dist = reduced_signal_dist(st)
        dists.append(dist)
        rows.append((setup.n_s0 + m1, setup.n_p0 - m1, m1, var, var,
                     shannon_entropy_bits(dist), abs(norm - 1.0)))
    cols = np.array(rows).T
    return ObservableSeries(np.array([s.tau for s in states]), *cols, signal_dists=dists)


def observe_two_pair(states: list[AmplitudeState]) -> ObservableSeries:
    setup = states[0].setup
    rows = []
    dists = []
    for st in states:
        p_raw = np.abs(st.values) ** 2
        norm = p_raw.sum()
        p = p_raw / norm
        n1, n2 = _moments(p, st.index_n.astype(float))
        m1, m2 = _moments(p, st.index_m.astype(float))
        tot = (st.index_n + st.index_m).astype(float)
        t1, t2 = _moments(p, tot)
        dist = reduced_signal_dist(st, "s")
        dists.append(dist)
        rows.append((setup.n_s0 + n1, setup.n_p0 - t1, n1, max(n2 - n1 * n1, 0.0),
                     max(t2 - t1 * t1, 0.0), shannon_entropy_bits(dist), abs(norm - 1.0),
                     setup.n_sbar0 + m1, max(m2 - m1 * m1, 0.0)))
    c = np.array(rows).T
    return ObservableSeries(np.array([s.tau for s in states]), *c[:7], mbar_sbar=c[7],
                            var_sbar=c[8], signal_dists=dists)


@dataclass
class CoherentRun:
    sectors: np.ndarray
    weights: np.ndarray
    states: list
    series: ObservableSeries
    discarded_mass: float


def coherent_sectors(alpha_sq: float, tail_epsilon: float):
    """Pump Fock sectors holding Poisson mass >= 1 - tail_epsilon, cut
    symmetrically in the two tails."""
    dist = poisson(alpha_sq)
    lo = int(dist.ppf(tail_epsilon / 2))
    hi = int(dist.isf(tail_epsilon / 2)) + 1
    sectors = np.arange(lo, hi + 1)
    w = dist.pmf(sectors)
    return sectors, w


def evolve_coherent_pump(alpha_sq: float, n_s0: int, cfg: EvolutionConfig) -> CoherentRun:
    """Evolve every Poisson-weighted pump sector independently and aggregate.

    Sectors do not couple, so the reduced signal distribution is the
    weighted mixture of the per-sector distributions.  Time is t' = r t,
    the only convention shared by all sectors.
    """
    if not alpha_sq > 0:
        raise ValueError("alpha_sq must be positive")
    if cfg.convention is not TimeConvention.RT:
        raise ValueError("coherent-pump runs use the t' = r t convention")
    sectors, w = coherent_sectors(alpha_sq, cfg.policy.tail_epsilon)
    discarded = float(1.0 - w.sum())
    w = w / w.sum()

    n_t = cfg.tau_grid.size
    nbar = np.zeros(n_t)
    nsq = np.zeros(n_t)
    pump = np.zeros(n_t)
    pump_sq = np.zeros(n_t)
    drift = np.zeros(n_t)
    all_states = []
    for k, wk in zip(sectors, w):
        if k == 0:
            traj = [AmplitudeState(np.array([1.0]), tau=float(t), n_s0=n_s0,
                                   convention=TimeConvention.RT) for t in cfg.tau_grid]
        else:
            traj = evolve_single_pair(ModeSetup(int(k), n_s0), cfg)
        all_states.append(traj)
        for j, st in enumerate(traj):
            p_raw = np.abs(st.values) ** 2
            drift[j] = max(drift[j], abs(p_raw.sum() - 1.0))
            p = p_raw / p_raw.sum()
            idx = np.arange(p.size, dtype=float)
            m1, m2 = _moments(p, idx)
            nbar[j] += wk * m1
            nsq[j] += wk * m2
            pump[j] += wk * (k - m1)
            pump_sq[j] += wk * (k * k - 2 * k * m1 + m2)

    dists, ent = [], np.zeros(n_t)
    for j in range(n_t):
        d = ensemble_signal_dist(w, [traj[j] for traj in all_states])
        dists.append(d)
        ent[j] = shannon_entropy_bits(d)
    series = ObservableSeries(
        tau_grid=cfg.tau_grid.copy(),
        nbar_s=n_s0 + nbar,
        nbar_p=pump,
        nbar_ibar=nbar.copy(),
        var_s=np.clip(nsq - nbar ** 2, 0.0, None),
        var_p=np.clip(pump_sq - pump ** 2, 0.0, None),
        entropy_s=ent,
        norm_drift=drift,
        signal_dists=dists,
    )
    return CoherentRun(sectors, w, all_states, series, discarded)


# ---------------------------------------------------------------------------
# Events


@dataclass
class EventReport:
    population_crossing: float | None = None
    variance_crossing: float | None = None
    pump_minimum: float | None = None
    depletion_at_minimum: float | None = None
    validity_horizon: float | None = None

    def as_dict(self) -> dict:
        return {
            "population_crossing": self.population_crossing,
            "variance_crossing": self.variance_crossing,
            "pump_minimum": self.pump_minimum,
            "depletion_at_minimum": self.depletion_at_minimum,
            "validity_horizon": self.validity_horizon,
        }


def _first_downcrossing(tau: np.ndarray, d: np.ndarray) -> float | None:
    """First tau where ``d`` goes from positive to nonpositive."""
    hits = np.nonzero((d[:-1] > 0) & (d[1:] <= 0))[0]
    if hits.size == 0:
        return None
    i = int(hits[0])
    if d[i + 1] == 0.0:
        return float(tau[i + 1])
    interp = PchipInterpolator(tau, d)
    return float(brentq(interp, tau[i], tau[i + 1], xtol=1e-12))


def detect_events(series: ObservableSeries) -> EventReport:
    tau = np.asarray(series.tau_grid, dtype=float)
    rep = EventReport()
    if tau.size < 3:
        return rep
    rep.population_crossing = _first_downcrossing(tau, series.nbar_p - series.nbar_s)
    # Effective dimensions 1 + dn compare through the standard deviations.
    sd_gap = np.sqrt(series.var_p) - np.sqrt(series.var_s)
    rep.variance_crossing = _first_downcrossing(tau, sd_gap)

    step = np.diff(series.nbar_p)
    turns = np.nonzero((step[:-1] < 0) & (step[1:] >= 0))[0]
    if turns.size:
        i = int(turns[0]) + 1  # grid sample at the discrete minimum
        # PCHIP pins its derivative to zero at discrete extrema, so the
        # minimum is located on a C2 spline instead
        interp = CubicSpline(tau, series.nbar_p)
        slope = interp.derivative()
        lo, hi = tau[i - 1], tau[i + 1]
        if slope(lo) < 0 < slope(hi):
            t_min = float(brentq(slope, lo, hi, xtol=1e-12))
        else:
            t_min = float(tau[i])
        rep.pump_minimum = t_min
        start = series.nbar_p[0]
        rep.depletion_at_minimum = float((start - interp(t_min)) / start)
        rep.validity_horizon = t_min
    return rep
