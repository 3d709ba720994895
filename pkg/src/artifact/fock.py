"""Logical-basis containers, distributions and truncation policy.

The logical index ``n`` counts emitted pairs.  For a single pair the
physical occupations are (pump, signal, idler) = (n_p0 - n, n_s0 + n, n).
Two-pair states carry a second index ``m`` for the (anti-signal, partner)
pair and live on the triangle n + m <= n_p0, stored row-major n-then-m.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np
from scipy.stats import nbinom

NORM_TOL = 1e-9


@dataclass(frozen=True)
class ModeSetup:
    n_p0: int
    n_s0: int = 0
    n_sbar0: int | None = None
    r: float = 1.0

    def __post_init__(self):
        if int(self.n_p0) != self.n_p0 or self.n_p0 < 1:
            raise ValueError(f"n_p0 must be an integer >= 1, got {self.n_p0}")
        if int(self.n_s0) != self.n_s0 or self.n_s0 < 0:
            raise ValueError(f"n_s0 must be an integer >= 0, got {self.n_s0}")
        if self.n_sbar0 is not None and (int(self.n_sbar0) != self.n_sbar0 or self.n_sbar0 < 0):
            raise ValueError(f"n_sbar0 must be an integer >= 0, got {self.n_sbar0}")
        if not self.r > 0:
            raise ValueError("r must be positive")

    @property
    def kappa(self) -> float:
        return (1 + self.n_s0) / 2

    @property
    def kappa_bar(self) -> float:
        return (1 + (self.n_sbar0 or 0)) / 2

    @property
    def two_pair(self) -> bool:
        return self.n_sbar0 is not None

    def tau_scale(self) -> float:
        """Factor converting t' = r t into the scaled time tau."""
        if self.two_pair:
            return math.sqrt(self.n_p0 + self.n_s0 + self.n_sbar0 + 2)
        return math.sqrt(self.n_p0 + self.n_s0 + 1)


class TimeConvention(str, enum.Enum):
    """How the dimensionless time of a state relates to r t."""

    RT = "rt"                    # t' = r t
    SCALED = "scaled"            # tau = sqrt(n_p0 + n_s0 + 1) r t
    TWO_PAIR = "two_pair"        # tau = sqrt(n_p0 + n_s0 + n_sbar0 + 2) r t

    def factor(self, setup: ModeSetup) -> float:
        if self is TimeConvention.RT:
            return 1.0
        if self is TimeConvention.SCALED:
            return math.sqrt(setup.n_p0 + setup.n_s0 + 1)
        return math.sqrt(setup.n_p0 + setup.n_s0 + (setup.n_sbar0 or 0) + 2)


def triangle_indices(n_p0: int, cap: int | None = None):
    """Index arrays (n, m) of the triangle n + m <= n_p0, row-major n then m.

    With ``cap`` the domain is further limited to n, m <= cap.
    """
    top = n_p0 if cap is None else min(cap, n_p0)
    ns, ms = [], []
    for n in range(top + 1):
        m_max = min(n_p0 - n, top)
        ns.append(np.full(m_max + 1, n))
        ms.append(np.arange(m_max + 1))
    return np.concatenate(ns), np.concatenate(ms)


@dataclass
class AmplitudeState:
    """Complex amplitudes over the logical basis at one time.

    ``setup`` may be ``None`` for analytic (undepleted pump) states, which
    have no finite pump occupation.
    """

    values: np.ndarray
    tau: float = 0.0
    setup: ModeSetup | None = None
    convention: TimeConvention = TimeConvention.SCALED
    n_s0: int = 0
    index_n: np.ndarray | None = None
    index_m: np.ndarray | None = None

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=complex)
        if self.setup is not None:
            self.n_s0 = self.setup.n_s0
        norm = float(np.sum(np.abs(self.values) ** 2))
        if abs(norm - 1.0) > NORM_TOL:
            raise ValueError(f"amplitudes not normalized (sum |c|^2 = {norm!r})")
        if self.two_pair:
            if self.index_n is None or self.index_n.shape != self.values.shape:
                raise ValueError("two-pair state needs index arrays matching values")
            if self.setup is not None and np.any(self.index_n + self.index_m > self.setup.n_p0):
                raise ValueError("two-pair indices must satisfy n + m <= n_p0")
        elif self.setup is not None and self.values.size > self.setup.n_p0 + 1:
            raise ValueError("single-pair index exceeds n_p0")

    @property
    def two_pair(self) -> bool:
        return self.index_m is not None

    @property
    def norm(self) -> float:
        return float(np.sum(np.abs(self.values) ** 2))

    def grid(self) -> np.ndarray:
        """Two-pair amplitudes as a dense (n, m) array, zero off the triangle."""
        if not self.two_pair:
            raise ValueError("grid() is only defined for two-pair states")
        out = np.zeros((self.index_n.max() + 1, self.index_m.max() + 1), dtype=complex)
        out[self.index_n, self.index_m] = self.values
        return out


@dataclass
class ProbDist:
    """Normalized distribution over an occupation number."""

    weights: np.ndarray
    origin: str = "numeric"
    discarded_mass: float = 0.0

    def __post_init__(self):
        self.weights = np.asarray(self.weights, dtype=float)
        if self.weights.ndim != 1:
            raise ValueError("weights must be one-dimensional")
        if np.any(self.weights < 0.0):
            raise ValueError("weights must be nonnegative")
        total = float(self.weights.sum())
        if abs(total - 1.0) > NORM_TOL:
            raise ValueError(f"weights not normalized (sum = {total!r})")

    def __len__(self) -> int:
        return self.weights.size

    def padded(self, length: int) -> np.ndarray:
        if length < self.weights.size:
            raise ValueError("cannot pad to a shorter length")
        out = np.zeros(length)
        out[: self.weights.size] = self.weights
        return out


@dataclass(frozen=True)
class TruncationPolicy:
    tail_epsilon: float = 1e-12
    hard_cap: int = 1_000_000
    z_max: float = 1.0 - 1e-6

    def __post_init__(self):
        if not (0.0 < self.tail_epsilon < 1.0):
            raise ValueError("tail_epsilon must lie in (0, 1)")
        if self.hard_cap < 1:
            raise ValueError("hard_cap must be >= 1")
        if not (0.0 < self.z_max < 1.0):
            raise ValueError("z_max must lie in (0, 1)")


DEFAULT_POLICY = TruncationPolicy()


def mean_and_variance(p: ProbDist) -> tuple[float, float]:
    w = p.weights if isinstance(p, ProbDist) else ProbDist(p).weights
    n = np.arange(w.size, dtype=float)
    mean = float(np.dot(n, w))
    var = float(np.dot((n - mean) ** 2, w))
    return mean, var


def truncation_length(z: float, n_s0: int = 0, policy: TruncationPolicy = DEFAULT_POLICY) -> int:
    """Smallest N such that the negative-binomial mass at indices >= N is
    below ``policy.tail_epsilon``, capped at ``policy.hard_cap``."""
    if z < 0.0:
        raise ValueError("z must be nonnegative")
    if z > policy.z_max:
        raise ValueError(f"z too close to 1: z={z!r} > policy.z_max={policy.z_max!r}")
    if z == 0.0:
        return 1
    dist = nbinom(n_s0 + 1, 1.0 - z)
    eps = policy.tail_epsilon
    k = int(dist.isf(eps))
    # isf works in floating point; walk to the exact discrete boundary.
    while k > 0 and dist.sf(k - 1) < eps:
        k -= 1
    while dist.sf(k) >= eps:
        k += 1
    return int(min(k + 1, policy.hard_cap))


def reduced_signal_dist(state: AmplitudeState, mode: str = "s") -> ProbDist:
    """Distribution of the signal occupation (or anti-signal for ``mode='sbar'``).

    Single-pair weights are |c_n|^2 placed at occupation n_s0 + n.
    """
    p = np.abs(state.values) ** 2
    p = p / p.sum()
    if not state.two_pair:
        if mode != "s":
            raise ValueError("single-pair states only have the 's' marginal")
        w = np.zeros(state.n_s0 + p.size)
        w[state.n_s0:] = p
        return ProbDist(w, origin="numeric")
    if mode == "s":
        idx, offset = state.index_n, state.n_s0
    elif mode == "sbar":
        idx = state.index_m
        offset = state.setup.n_sbar0 if state.setup is not None else 0
    else:
        raise ValueError(f"unknown mode {mode!r}")
    w = np.zeros(offset + idx.max() + 1)
    np.add.at(w, offset + idx, p)
    return ProbDist(w, origin="numeric")


def ensemble_signal_dist(weights, states) -> ProbDist:
    """Weighted signal distribution over orthogonal pump sectors.

    Summation runs in the given sector order so the result is reproducible.
    """
    dists = [reduced_signal_dist(s).weights for s in states]
    length = max(d.size for d in dists)
    total = np.zeros(length)
    for w, d in zip(weights, dists):
        total[: d.size] += w * d
    return ProbDist(total / total.sum(), origin="numeric")
