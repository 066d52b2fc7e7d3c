"""Fractional binomial distributions in log domain.

A table on {0, ..., n} carries unnormalized log-weights

    log(alpha) + log_gen_binom(alpha*n, alpha*j)
               + alpha*j*log(x) + alpha*(n-j)*log(1-x),

their log-sum-exp (the log of the normalizing constant), and exact
moments.  Weights are never exponentiated before normalization: the
generalized binomial coefficient overflows doubles near n ~ 1e3.

The companion lattice law is the binomial Bin(floor(alpha*n), x) rescaled
onto the grid k/alpha; it shares asymptotic mean and variance with the
fractional table and serves as the comparison benchmark.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.special import gammaln, logsumexp

__all__ = [
    "Params",
    "DistributionTable",
    "LatticeTable",
    "build_distribution",
    "build_nu",
    "log_normalizing_constant",
]

# snap tolerance for float products like 0.3 * 10 landing one ulp off an integer
_SNAP = 1e-9


@dataclass(frozen=True)
class Params:
    """Parameter triple of one fractional binomial distribution.

    ``alpha`` is any positive real, ``x`` lies in [0, 1], and ``n`` is a
    positive integer.  Operations that additionally need ``x`` in the open
    interval (0, 1) say so and reject the endpoints themselves.
    """

    alpha: float
    x: float
    n: int

    def __post_init__(self) -> None:
        if not (isinstance(self.alpha, (int, float)) and math.isfinite(self.alpha) and self.alpha > 0):
            raise ValueError(f"alpha must be a positive finite real, got {self.alpha!r}")
        if not (isinstance(self.x, (int, float)) and 0.0 <= self.x <= 1.0):
            raise ValueError(f"x must lie in [0, 1], got {self.x!r}")
        if not (isinstance(self.n, (int, np.integer)) and not isinstance(self.n, bool) and self.n >= 1):
            raise ValueError(f"n must be a positive integer, got {self.n!r}")
        object.__setattr__(self, "alpha", float(self.alpha))
        object.__setattr__(self, "x", float(self.x))
        object.__setattr__(self, "n", int(self.n))


def _fractional_log_weights(alpha: float, x: float, n: int) -> np.ndarray:
    """Unnormalized log-weights of the fractional binomial on {0, ..., n}.

    The 0**0 = 1 convention at x in {0, 1} is implemented by dropping the
    corresponding log-x term instead of evaluating 0 * log(0), which turns
    the endpoint distributions into exact point masses.
    """
    j = np.arange(n + 1, dtype=float)
    aj = alpha * j
    an = alpha * n
    logw = math.log(alpha) + gammaln(an + 1.0) - gammaln(aj + 1.0) - gammaln(an - aj + 1.0)
    if x == 0.0:
        logw = logw + np.where(j == 0, 0.0, -np.inf)
    else:
        logw = logw + aj * math.log(x)
    if x == 1.0:
        logw = logw + np.where(j == n, 0.0, -np.inf)
    else:
        logw = logw + alpha * (n - j) * math.log1p(-x)
    return logw


def _moments(support: np.ndarray, pmf: np.ndarray) -> tuple[float, float]:
    # two passes: center before squaring, variance ~ n would otherwise lose
    # digits to cancellation in E[S^2] - E[S]^2
    mean = math.fsum((support * pmf).tolist())
    centered = support - mean
    var = math.fsum((centered * centered * pmf).tolist())
    return mean, var


@dataclass(frozen=True)
class DistributionTable:
    """Immutable log-domain pmf over {0, ..., n} with cached moments."""

    params: Params
    log_weights: np.ndarray = field(repr=False)
    log_z: float
    mean: float
    variance: float

    def __post_init__(self) -> None:
        self.log_weights.flags.writeable = False

    @property
    def n(self) -> int:
        return self.params.n

    def _check_index(self, j: int) -> int:
        if not 0 <= j <= self.params.n:
            raise IndexError(f"j must lie in [0, {self.params.n}], got {j}")
        return int(j)

    def log_pmf(self, j: int) -> float:
        j = self._check_index(j)
        return float(self.log_weights[j] - self.log_z)

    def pmf(self, j: int) -> float:
        return math.exp(self.log_pmf(j))

    def pmf_values(self) -> np.ndarray:
        """The full normalized pmf as a fresh array."""
        return np.exp(self.log_weights - self.log_z)

    def log_upper_tail(self, j0: int) -> float:
        """log P(S >= j0)."""
        j0 = self._check_index(j0)
        return float(logsumexp(self.log_weights[j0:]) - self.log_z)

    def log_lower_tail(self, j0: int) -> float:
        """log P(S <= j0)."""
        j0 = self._check_index(j0)
        return float(logsumexp(self.log_weights[: j0 + 1]) - self.log_z)

    def sample(self, seed: int, count: int) -> np.ndarray:
        """Draw ``count`` variates by inverse-CDF lookup.

        The generator is an explicitly pinned PCG64 stream, so a given seed
        maps to the same output on every platform and release.
        """
        if count < 0:
            raise ValueError(f"count must be nonnegative, got {count}")
        rng = np.random.Generator(np.random.PCG64(seed))
        cdf = np.cumsum(self.pmf_values())
        cdf[-1] = 1.0  # guard the last bin against cumulative rounding
        u = rng.random(count)
        return np.searchsorted(cdf, u, side="right").astype(np.int64)


@dataclass(frozen=True)
class LatticeTable:
    """Binomial law rescaled onto the lattice k/alpha, k = 0..floor(alpha*n)."""

    params: Params
    support: np.ndarray = field(repr=False)
    log_pmf: np.ndarray = field(repr=False)

    def __post_init__(self) -> None:
        self.support.flags.writeable = False
        self.log_pmf.flags.writeable = False

    def pmf_values(self) -> np.ndarray:
        return np.exp(self.log_pmf)

    def mean(self) -> float:
        return _moments(self.support, self.pmf_values())[0]

    def variance(self) -> float:
        return _moments(self.support, self.pmf_values())[1]


def build_distribution(params: Params) -> DistributionTable:
    """Construct the fractional binomial table for ``params``."""
    log_weights = _fractional_log_weights(params.alpha, params.x, params.n)
    log_z = float(logsumexp(log_weights))
    support = np.arange(params.n + 1, dtype=float)
    mean, variance = _moments(support, np.exp(log_weights - log_z))
    return DistributionTable(params=params, log_weights=log_weights, log_z=log_z, mean=mean, variance=variance)


def log_normalizing_constant(params: Params) -> float:
    """log of the total unnormalized mass, by direct log-sum-exp."""
    return float(logsumexp(_fractional_log_weights(params.alpha, params.x, params.n)))


def lattice_size(alpha: float, n: int) -> int:
    """floor(alpha*n), snapping products that land one ulp under an integer."""
    an = alpha * n
    k = math.floor(an)
    if an - k > 1.0 - _SNAP:
        k += 1
    return int(k)


def build_nu(params: Params) -> LatticeTable:
    """Construct the comparison law: Bin(floor(alpha*n), x) scaled by 1/alpha."""
    size = lattice_size(params.alpha, params.n)
    log_pmf = _fractional_log_weights(1.0, params.x, size)
    log_pmf = log_pmf - logsumexp(log_pmf)
    support = np.arange(size + 1, dtype=float) / params.alpha
    return LatticeTable(params=params, support=support, log_pmf=log_pmf)
