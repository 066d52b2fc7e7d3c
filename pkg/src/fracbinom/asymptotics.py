"""Closed-form rate functions and exact finite-n verification engines.

The deviation experiments need no Monte Carlo: every probability involved
is an exact log-domain tail sum over a finite table, so the empirical
rates are deterministic and the reports reproduce bit for bit.
"""

from __future__ import annotations

import math
import statistics
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np
from scipy.special import ndtr

from .distribution import Params, build_distribution, build_nu

__all__ = [
    "RateQuery",
    "ModerateScale",
    "DeviationRow",
    "DeviationReport",
    "rate_ldp",
    "rate_mdp",
    "lambda_limit",
    "fenchel_legendre",
    "ldp_empirical",
    "mdp_empirical",
    "berry_esseen_sup",
    "sup_distance_mu_nu",
    "moment_diff",
    "berry_esseen_profile",
    "nu_distance_profile",
    "moment_diff_profile",
]

# snap tolerance when a float threshold like n*z lands one ulp off an integer
_SNAP = 1e-9


@dataclass(frozen=True)
class RateQuery:
    """Argument triple of the closed-form rate functions."""

    alpha: float
    x: float
    z: float

    def __post_init__(self) -> None:
        if not self.alpha > 0:
            raise ValueError(f"alpha must be positive, got {self.alpha}")
        if not 0.0 < self.x < 1.0:
            raise ValueError(f"x must lie strictly inside (0, 1), got {self.x}")


@dataclass(frozen=True)
class ModerateScale:
    """Moderate-deviation scaling c_n = n**beta over an increasing n-grid.

    beta is confined to (1/2, 1) so that c_n/n -> 0 while c_n/sqrt(n)
    diverges, the regime between the law of large numbers and the CLT.
    """

    beta: float
    grid: tuple[int, ...]

    def __post_init__(self) -> None:
        if not 0.5 < self.beta < 1.0:
            raise ValueError(f"beta must lie strictly inside (0.5, 1), got {self.beta}")
        grid = tuple(int(n) for n in self.grid)
        if len(grid) == 0 or any(n < 1 for n in grid):
            raise ValueError("grid must contain positive integers")
        if any(b <= a for a, b in zip(grid, grid[1:])):
            raise ValueError("grid must be strictly increasing")
        object.__setattr__(self, "grid", grid)


@dataclass(frozen=True)
class DeviationRow:
    n: int
    empirical: float
    theoretical: float
    abs_error: float


@dataclass(frozen=True)
class DeviationReport:
    """Rows of (n, empirical, theoretical, |difference|), sorted by n."""

    rows: tuple[DeviationRow, ...]

    def __post_init__(self) -> None:
        ns = [row.n for row in self.rows]
        if ns != sorted(ns) or len(set(ns)) != len(ns):
            raise ValueError("report rows must be strictly sorted by n")

    def empiricals(self) -> list[float]:
        return [row.empirical for row in self.rows]

    def abs_errors(self) -> list[float]:
        return [row.abs_error for row in self.rows]


def rate_ldp(q: RateQuery) -> float:
    """Large-deviation rate: alpha times the binary relative entropy.

    alpha * { z*log(z/x) + (1-z)*log((1-z)/(1-x)) } on [0, 1], with the
    0*log(0) = 0 limit at the endpoints, and +inf outside.
    """
    z = q.z
    if z < 0.0 or z > 1.0:
        return math.inf
    left = 0.0 if z == 0.0 else z * math.log(z / q.x)
    right = 0.0 if z == 1.0 else (1.0 - z) * math.log((1.0 - z) / (1.0 - q.x))
    return q.alpha * (left + right)


def rate_mdp(q: RateQuery) -> float:
    """Moderate-deviation rate: the quadratic alpha * z**2 / (2*x*(1-x))."""
    return q.alpha * q.z * q.z / (2.0 * q.x * (1.0 - q.x))


def lambda_limit(alpha: float, x: float, xi: float) -> float:
    """Limit of the per-step log moment generating function at speed n.

    alpha * log(1 - x + x*exp(xi/alpha)); finite for every real xi.
    """
    if not 0.0 < x < 1.0:
        raise ValueError(f"x must lie strictly inside (0, 1), got {x}")
    if not alpha > 0:
        raise ValueError(f"alpha must be positive, got {alpha}")
    s = xi / alpha
    if s > 500.0:
        # 1 - x + x*e^s = x*e^s * (1 + (1-x)/(x*e^s)); avoids exp overflow
        return xi + alpha * (math.log(x) + math.log1p((1.0 - x) / x * math.exp(-s)))
    return alpha * math.log1p(x * math.expm1(s))


def fenchel_legendre(alpha: float, x: float, z: float) -> float:
    """sup over xi of (xi*z - lambda_limit(xi)), via the stationary point.

    For z in (0, 1) the supremum is attained at
    xi* = alpha * log(z*(1-x)/(x*(1-z))); the endpoints are the xi -> +-inf
    limits and anything outside [0, 1] diverges.
    """
    if not 0.0 < x < 1.0:
        raise ValueError(f"x must lie strictly inside (0, 1), got {x}")
    if z < 0.0 or z > 1.0:
        return math.inf
    if z == 0.0:
        return -alpha * math.log1p(-x)
    if z == 1.0:
        return -alpha * math.log(x)
    xi_star = alpha * math.log(z * (1.0 - x) / (x * (1.0 - z)))
    return xi_star * z - lambda_limit(alpha, x, xi_star)


def _ceil_snap(v: float) -> int:
    return math.ceil(v - _SNAP)


def _floor_snap(v: float) -> int:
    return math.floor(v + _SNAP)


def _build_report(grid: Sequence[int], theoretical: float, empirical_at: Callable[[int], float], threads: int = 1) -> DeviationReport:
    grid = [int(n) for n in grid]
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            values = list(pool.map(empirical_at, grid))
    else:
        values = [empirical_at(n) for n in grid]
    rows = tuple(
        DeviationRow(n=n, empirical=e, theoretical=theoretical, abs_error=abs(e - theoretical))
        for n, e in zip(grid, values)
    )
    return DeviationReport(rows=rows)


def ldp_empirical(
    alpha: float,
    x: float,
    z: float,
    n_grid: Sequence[int],
    tail: str = "upper",
    threads: int = 1,
) -> DeviationReport:
    """Exact tail rates -(1/n) * log P against the closed-form rate.

    The upper-tail mode requires z in (x, 1) and measures P(S/n >= z) with
    threshold ceil(n*z), so an integer n*z stays inside the closed event;
    the lower-tail mode mirrors this for z in (0, x) with floor(n*z).
    """
    query = RateQuery(alpha=alpha, x=x, z=z)
    if tail == "upper":
        if not x < z < 1.0:
            raise ValueError(f"upper-tail mode needs z in (x, 1), got z={z}, x={x}")
    elif tail == "lower":
        if not 0.0 < z < x:
            raise ValueError(f"lower-tail mode needs z in (0, x), got z={z}, x={x}")
    else:
        raise ValueError(f"tail must be 'upper' or 'lower', got {tail!r}")

    def empirical_at(n: int) -> float:
        table = build_distribution(Params(alpha=alpha, x=x, n=n))
        if tail == "upper":
            return -table.log_upper_tail(_ceil_snap(n * z)) / n
        return -table.log_lower_tail(_floor_snap(n * z)) / n

    return _build_report(n_grid, rate_ldp(query), empirical_at, threads)


def mdp_empirical(
    alpha: float,
    x: float,
    a: float,
    scale: ModerateScale,
    threads: int = 1,
) -> DeviationReport:
    """Exact moderate-deviation rates -(n/c_n^2) * log P((S - n*x)/c_n in tail).

    Convergence here is slow by nature, O(n**(1-2*beta)) at best, so
    consumers should read the trend of the report, not a tolerance.
    """
    if a == 0.0:
        raise ValueError("a must be nonzero")
    query = RateQuery(alpha=alpha, x=x, z=a)

    def empirical_at(n: int) -> float:
        c = float(n) ** scale.beta
        threshold = n * x + c * a
        table = build_distribution(Params(alpha=alpha, x=x, n=n))
        if a > 0:
            j0 = _ceil_snap(threshold)
            if not 0 <= j0 <= n:
                raise ValueError(f"threshold {threshold} leaves the support at n={n}")
            log_p = table.log_upper_tail(j0)
        else:
            j0 = _floor_snap(threshold)
            if not 0 <= j0 <= n:
                raise ValueError(f"threshold {threshold} leaves the support at n={n}")
            log_p = table.log_lower_tail(j0)
        return -(n / (c * c)) * log_p

    return _build_report(scale.grid, rate_mdp(query), empirical_at, threads)


def berry_esseen_sup(table) -> float:
    """Exact Kolmogorov distance between the standardized table and the normal.

    Both one-sided discrepancies are scanned at every jump of the
    standardized distribution function; the normal CDF is continuous and
    monotone between jumps, so the maximum over jump points is the exact
    supremum over the whole line.
    """
    if not table.variance > 0.0:
        raise ValueError("standardization needs positive variance; x must be inside (0, 1)")
    p = table.pmf_values()
    cdf = np.cumsum(p)
    points = (np.arange(table.params.n + 1) - table.mean) / math.sqrt(table.variance)
    phi = ndtr(points)
    cdf_left = np.concatenate(([0.0], cdf[:-1]))
    return float(np.max(np.maximum(np.abs(cdf - phi), np.abs(cdf_left - phi))))


def _step_cdf_values(support: np.ndarray, cdf: np.ndarray, points: np.ndarray):
    """Right-continuous value and left limit of a step CDF at given points."""
    idx_right = np.searchsorted(support, points, side="right")
    idx_left = np.searchsorted(support, points, side="left")
    padded = np.concatenate(([0.0], cdf))
    return padded[idx_right], padded[idx_left]


def sup_distance_mu_nu(params: Params) -> float:
    """Exact Kolmogorov distance between the table and its comparison law.

    Jump points of both step functions are merged and each contributes its
    right value and left limit, which is exhaustive for piecewise-constant
    distribution functions.
    """
    if not 0.0 < params.x < 1.0:
        raise ValueError(f"x must lie strictly inside (0, 1), got {params.x}")
    table = build_distribution(params)
    nu = build_nu(params)
    support_mu = np.arange(params.n + 1, dtype=float)
    cdf_mu = np.cumsum(table.pmf_values())
    cdf_nu = np.cumsum(nu.pmf_values())
    points = np.union1d(support_mu, nu.support)
    f_right, f_left = _step_cdf_values(support_mu, cdf_mu, points)
    g_right, g_left = _step_cdf_values(nu.support, cdf_nu, points)
    return float(max(np.max(np.abs(f_right - g_right)), np.max(np.abs(f_left - g_left))))


def moment_diff(params: Params, m: int) -> float:
    """m-th moment of the table minus the m-th moment of the comparison law.

    Exact pmf-weighted sums with compensated accumulation; rejected when
    n**m would exhaust the double-precision exponent range (practical cap
    m <= 8 at n <= 1e4).
    """
    if m < 1:
        raise ValueError(f"m must be a positive integer, got {m}")
    if not 0.0 < params.x < 1.0:
        raise ValueError(f"x must lie strictly inside (0, 1), got {params.x}")
    if m * math.log10(params.n + 1) > 250.0:
        raise ValueError(f"n**m overflows the accumulator for n={params.n}, m={m}")
    table = build_distribution(params)
    nu = build_nu(params)
    support_mu = np.arange(params.n + 1, dtype=float)
    e_mu = math.fsum((support_mu**m * table.pmf_values()).tolist())
    e_nu = math.fsum((nu.support**m * nu.pmf_values()).tolist())
    return e_mu - e_nu


def _median_profile(grid: Sequence[int], empirical_at: Callable[[int], float], threads: int = 1) -> DeviationReport:
    """Report a scaled statistic against the constant median of its profile."""
    grid = [int(n) for n in grid]
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            values = list(pool.map(empirical_at, grid))
    else:
        values = [empirical_at(n) for n in grid]
    center = statistics.median(values)
    rows = tuple(
        DeviationRow(n=n, empirical=e, theoretical=center, abs_error=abs(e - center))
        for n, e in zip(grid, values)
    )
    return DeviationReport(rows=rows)


def berry_esseen_profile(alpha: float, x: float, n_grid: Sequence[int], threads: int = 1) -> DeviationReport:
    """sqrt(n)-scaled normal-approximation error over a grid of n.

    There is no closed-form limit constant, so the report centers the
    profile on its own median; boundedness of the deviations is what the
    sqrt(n) error bound predicts.
    """

    def empirical_at(n: int) -> float:
        table = build_distribution(Params(alpha=alpha, x=x, n=n))
        return berry_esseen_sup(table) * math.sqrt(n)

    return _median_profile(n_grid, empirical_at, threads)


def nu_distance_profile(alpha: float, x: float, n_grid: Sequence[int], threads: int = 1) -> DeviationReport:
    """sqrt(n)-scaled distance to the comparison law, centered on its median."""

    def empirical_at(n: int) -> float:
        return sup_distance_mu_nu(Params(alpha=alpha, x=x, n=n)) * math.sqrt(n)

    return _median_profile(n_grid, empirical_at, threads)


def moment_diff_profile(alpha: float, x: float, m: int, n_grid: Sequence[int], threads: int = 1) -> DeviationReport:
    """|moment difference| / n**(m-1) over a grid, centered on its median."""

    def empirical_at(n: int) -> float:
        return abs(moment_diff(Params(alpha=alpha, x=x, n=n), m)) / float(n) ** (m - 1)

    return _median_profile(n_grid, empirical_at, threads)
