"""Statistical battery: correlation with Bonferroni control, multiple
regression with collinearity diagnostics, power-law tail fitting, Gini
concentration, and the Mann-Whitney U test.

Test statistics are computed from their defining formulas on top of numpy;
p-values come from scipy's regularized incomplete beta / error functions.
Undefined results (zero variance, all-zero inputs) are returned as NaN with
an explicit flag where the result type has room for one, never silently.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from itertools import combinations
from typing import Optional, Sequence

import numpy as np
from scipy import special

from ._rng import stream


# -- Pearson correlation -------------------------------------------------------

@dataclass(frozen=True)
class PearsonResult:
    r: float
    t: float
    p: float
    n: int
    defined: bool = True


def pearson(x: Sequence[float], y: Sequence[float]) -> PearsonResult:
    """Pearson r with its t statistic (df = n-2) and two-sided p-value.

    Zero variance on either side leaves the correlation undefined: NaNs
    with ``defined=False``.
    """
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    n = len(x)
    if n != len(y):
        raise ValueError("length mismatch")
    if n < 3:
        raise ValueError("need at least 3 observations")
    dx = x - x.mean()
    dy = y - y.mean()
    sx = math.sqrt(float(dx @ dx))
    sy = math.sqrt(float(dy @ dy))
    if sx == 0 or sy == 0:
        return PearsonResult(math.nan, math.nan, math.nan, n, defined=False)
    r = float(dx @ dy) / (sx * sy)
    r = max(-1.0, min(1.0, r))
    if abs(r) == 1.0:
        return PearsonResult(r, math.inf if r > 0 else -math.inf, 0.0, n)
    t = r * math.sqrt((n - 2) / (1.0 - r * r))
    p = _t_sf(abs(t), n - 2) * 2.0
    return PearsonResult(r, t, p, n)


def _t_sf(t: float, df: int) -> float:
    """Survival function of Student's t via the incomplete beta function."""
    if math.isinf(t):
        return 0.0
    x = df / (df + t * t)
    return 0.5 * float(special.betainc(df / 2.0, 0.5, x))


def _f_sf(f: float, d1: int, d2: int) -> float:
    if f <= 0:
        return 1.0
    if math.isinf(f):
        return 0.0
    x = d2 / (d2 + d1 * f)
    return float(special.betainc(d2 / 2.0, d1 / 2.0, x))


def _t_ppf(q: float, df: int) -> float:
    """Two-sided t critical value helper (inverse of _t_sf at (1-q)/... )."""
    return float(special.stdtrit(df, q))


def _norm_sf(z: float) -> float:
    return 0.5 * float(special.erfc(z / math.sqrt(2.0)))


# -- Bonferroni ------------------------------------------------------------------

def bonferroni(p_values: Sequence[float], alpha: float = 0.05,
               ) -> tuple[list[bool], float]:
    """Significance flags at the family-wise threshold alpha / m."""
    if not 0 < alpha < 1:
        raise ValueError("alpha must be in (0, 1)")
    m = len(p_values)
    threshold = alpha / m if m else alpha
    return [p < threshold for p in p_values], threshold


@dataclass
class CorrelationReport:
    """Grid of action-type x metric correlations with Bonferroni control."""
    pairs: list[tuple[str, str]]
    r: list[float]
    t: list[float]
    df: list[int]
    p: list[float]
    significant: list[bool]
    threshold: float
    comparisons: int
    undefined: list[bool]


# -- multiple regression ----------------------------------------------------------

class SingularityError(ValueError):
    def __init__(self, columns: list[str]):
        self.columns = columns
        super().__init__(f"design matrix is rank-deficient; collinear columns: {columns}")


@dataclass
class FitResult:
    coefficients: np.ndarray  # standardized beta_j
    intercept: float
    std_errors: np.ndarray
    conf_low: np.ndarray  # 95% CI bounds
    conf_high: np.ndarray
    p_values: np.ndarray
    r_squared: float
    adj_r_squared: float
    f_stat: float
    f_p_value: float
    vif: np.ndarray
    n: int
    predictor_names: list[str] = field(default_factory=list)


def ols_multiple(X: np.ndarray, y: Sequence[float],
                 names: Optional[Sequence[str]] = None) -> FitResult:
    """OLS on z-score standardized predictors with full diagnostics.

    Standardization happens here: each column of X is centered and scaled
    to unit standard deviation before fitting, so coefficients are
    comparable across predictors. Reports R-squared, adjusted R-squared,
    the overall F test, 95% confidence intervals from t critical values at
    df = n - p - 1, and per-predictor variance inflation factors.
    """
    X = np.asarray(X, dtype=float)
    y = np.asarray(y, dtype=float)
    n, p = X.shape
    if names is None:
        names = [f"x{j + 1}" for j in range(p)]
    names = list(names)
    if n <= p + 1:
        raise ValueError(f"need n > p + 1 observations, got n={n}, p={p}")

    sds = X.std(axis=0)
    dead = [names[j] for j in range(p) if sds[j] == 0]
    if dead:
        raise SingularityError(dead)
    Z = (X - X.mean(axis=0)) / sds

    rank = np.linalg.matrix_rank(Z)
    if rank < p:
        # name a minimal set of columns that complete the collinearity
        _, R, piv = _qr_pivot(Z)
        culprits = sorted(names[j] for j in piv[rank:])
        raise SingularityError(culprits)

    design = np.column_stack([np.ones(n), Z])
    coef, _, _, _ = np.linalg.lstsq(design, y, rcond=None)
    fitted = design @ coef
    resid = y - fitted
    ss_res = float(resid @ resid)
    ss_tot = float(((y - y.mean()) ** 2).sum())
    r2 = 1.0 - ss_res / ss_tot if ss_tot > 0 else 0.0
    df_res = n - p - 1
    adj_r2 = 1.0 - (1.0 - r2) * (n - 1) / df_res
    sigma2 = ss_res / df_res
    cov = sigma2 * np.linalg.inv(design.T @ design)
    se = np.sqrt(np.diag(cov))
    t_stats = np.divide(coef, se, out=np.full_like(coef, np.inf), where=se > 0)
    p_values = np.array([2.0 * _t_sf(abs(t), df_res) for t in t_stats[1:]])
    t_crit = _t_ppf(0.975, df_res)
    if r2 >= 1.0:
        f_stat, f_p = math.inf, 0.0
    else:
        f_stat = (r2 / p) / ((1.0 - r2) / df_res)
        f_p = _f_sf(f_stat, p, df_res)

    # VIF_j = 1 / (1 - R_j^2) = j-th diagonal of the inverse correlation matrix
    corr = (Z.T @ Z) / n
    vif = np.diag(np.linalg.inv(corr)).copy()

    return FitResult(
        coefficients=coef[1:],
        intercept=float(coef[0]),
        std_errors=se[1:],
        conf_low=coef[1:] - t_crit * se[1:],
        conf_high=coef[1:] + t_crit * se[1:],
        p_values=p_values,
        r_squared=r2,
        adj_r_squared=adj_r2,
        f_stat=f_stat,
        f_p_value=f_p,
        vif=vif,
        n=n,
        predictor_names=names,
    )


def _qr_pivot(Z: np.ndarray):
    """Column-pivoted QR via scipy for naming collinear columns."""
    from scipy.linalg import qr

    q, r, piv = qr(Z, mode="economic", pivoting=True)
    return q, r, piv


# -- power-law fitting --------------------------------------------------------------

@dataclass
class PowerLawFit:
    alpha: float
    x_min: float
    ks: float
    p_value: float
    n_tail: int
    bootstraps: int


class InsufficientTailError(ValueError):
    pass


def _ks_distance(tail: np.ndarray, alpha: float, x_min: float) -> float:
    """KS distance between the sorted tail sample and the fitted Pareto CDF."""
    n = len(tail)
    cdf = 1.0 - (tail / x_min) ** (1.0 - alpha)
    emp_hi = np.arange(1, n + 1) / n
    emp_lo = np.arange(0, n) / n
    return float(max(np.abs(emp_hi - cdf).max(), np.abs(emp_lo - cdf).max()))


def _fit_tail(values: np.ndarray, min_tail: int,
              max_candidates: int = 100) -> tuple[float, float, float, int]:
    """Continuous MLE with x_min chosen to minimize the KS distance.

    Candidate x_min values are the unique data values, thinned to at most
    ``max_candidates`` evenly spaced quantiles when there are more.
    """
    v = np.sort(values)
    candidates = np.unique(v)
    candidates = candidates[candidates > 0]
    # keep only candidates leaving at least min_tail observations above
    candidates = [c for c in candidates if (v >= c).sum() >= min_tail]
    if not candidates:
        raise InsufficientTailError(
            f"no x_min leaves at least {min_tail} tail observations")
    if len(candidates) > max_candidates:
        idx = np.linspace(0, len(candidates) - 1, max_candidates).astype(int)
        candidates = [candidates[i] for i in idx]
    best = None
    for x_min in candidates:
        tail = v[v >= x_min]
        n = len(tail)
        log_ratio = np.log(tail / x_min).sum()
        if log_ratio <= 0:
            continue
        alpha = 1.0 + n / log_ratio
        ks = _ks_distance(tail, alpha, x_min)
        if best is None or ks < best[2]:
            best = (alpha, float(x_min), ks, n)
    if best is None:
        raise InsufficientTailError("degenerate tail (all values equal)")
    return best


def fit_power_law(values: Sequence[float], min_tail: int = 50,
                  bootstraps: int = 200, seed: int = 0) -> PowerLawFit:
    """Continuous power-law fit with a semi-parametric bootstrap KS test.

    alpha is the continuous MLE 1 + n / sum(log(x/x_min)); x_min minimizes
    the KS distance. The p-value is the fraction of bootstrap resamples
    (body resampled empirically, tail redrawn from the fitted law, then
    refitted) whose KS distance reaches the observed one. Small p rejects
    the power-law hypothesis.
    """
    v = np.asarray(values, dtype=float)
    v = v[v > 0]
    if (v >= v.min()).sum() < min_tail or len(v) < min_tail:
        raise InsufficientTailError(
            f"need at least {min_tail} positive observations, got {len(v)}")
    alpha, x_min, ks_obs, n_tail = _fit_tail(v, min_tail)

    rng = stream(seed, "powerlaw-bootstrap")
    body = v[v < x_min]
    n = len(v)
    p_tail = n_tail / n
    exceed = 0
    for _ in range(bootstraps):
        take_tail = rng.random(n) < p_tail
        k = int(take_tail.sum())
        sample = np.empty(n)
        # semi-parametric: body resampled, tail drawn from the fitted law
        if n - k:
            if len(body):
                sample[:n - k] = rng.choice(body, size=n - k, replace=True)
            else:
                sample[:n - k] = x_min
        sample[n - k:] = x_min * (1.0 - rng.random(k)) ** (-1.0 / (alpha - 1.0))
        try:
            _, _, ks_b, _ = _fit_tail(sample, min_tail)
        except InsufficientTailError:
            continue
        if ks_b >= ks_obs:
            exceed += 1
    return PowerLawFit(alpha=alpha, x_min=x_min, ks=ks_obs,
                       p_value=exceed / bootstraps, n_tail=n_tail,
                       bootstraps=bootstraps)


# -- Gini -----------------------------------------------------------------------------

def gini(values: Sequence[float]) -> float:
    """Gini coefficient by the sorted-rank formula.

    G = sum_i (2i - n - 1) x_(i) / (n * sum x) over the ascending sort.
    Equal values give exactly 0; all-zero input is undefined (NaN).
    """
    x = np.asarray(values, dtype=float)
    if (x < 0).any():
        raise ValueError("gini requires non-negative values")
    total = x.sum()
    if total == 0:
        return math.nan
    if x.max() == x.min():
        return 0.0
    xs = np.sort(x)
    n = len(xs)
    ranks = 2.0 * np.arange(1, n + 1) - n - 1
    return float((ranks @ xs) / (n * total))


# -- Mann-Whitney U -------------------------------------------------------------------

EXACT_MW_CUTOFF = 12  # combined sample size for exact enumeration


def _ranks_with_ties(pooled: np.ndarray) -> np.ndarray:
    """Midranks (1-based) of the pooled sample."""
    order = np.argsort(pooled, kind="stable")
    ranks = np.empty(len(pooled))
    i = 0
    while i < len(pooled):
        j = i
        while j + 1 < len(pooled) and pooled[order[j + 1]] == pooled[order[i]]:
            j += 1
        ranks[order[i:j + 1]] = (i + j) / 2.0 + 1.0
        i = j + 1
    return ranks


def _u_statistic(a: np.ndarray, b: np.ndarray) -> float:
    pooled = np.concatenate([a, b])
    ranks = _ranks_with_ties(pooled)
    r_a = ranks[:len(a)].sum()
    return r_a - len(a) * (len(a) + 1) / 2.0


def mann_whitney_u(sample_a: Sequence[float], sample_b: Sequence[float],
                   ) -> tuple[float, float]:
    """Mann-Whitney U (for sample_a) with a two-sided p-value.

    Small samples (combined n <= 12) use exact enumeration over all label
    assignments; larger ones use the normal approximation with tie
    correction and continuity correction.
    """
    a = np.asarray(sample_a, dtype=float)
    b = np.asarray(sample_b, dtype=float)
    if len(a) == 0 or len(b) == 0:
        raise ValueError("both samples must be non-empty")
    n1, n2 = len(a), len(b)
    u = _u_statistic(a, b)

    if n1 + n2 <= EXACT_MW_CUTOFF:
        pooled = np.concatenate([a, b])
        idx = range(n1 + n2)
        us = []
        for combo in combinations(idx, n1):
            mask = np.zeros(n1 + n2, dtype=bool)
            mask[list(combo)] = True
            us.append(_u_statistic(pooled[mask], pooled[~mask]))
        us = np.asarray(us)
        mean_u = n1 * n2 / 2.0
        # two-sided: arrangements at least as extreme (distance from mean)
        p = float((np.abs(us - mean_u) >= abs(u - mean_u) - 1e-12).mean())
        return u, min(1.0, p)

    mean_u = n1 * n2 / 2.0
    pooled = np.concatenate([a, b])
    n = n1 + n2
    _, tie_counts = np.unique(pooled, return_counts=True)
    tie_term = float(((tie_counts ** 3 - tie_counts)).sum()) / (n * (n - 1))
    var_u = n1 * n2 / 12.0 * ((n + 1) - tie_term)
    if var_u == 0:
        return u, 1.0
    z = (abs(u - mean_u) - 0.5) / math.sqrt(var_u)
    if z < 0:
        z = 0.0
    return u, min(1.0, 2.0 * _norm_sf(z))


# -- pipeline-level: action influence ---------------------------------------------------

def action_influence_analysis(action_counts: np.ndarray,
                              action_names: Sequence[str],
                              metric_vectors: dict[str, np.ndarray],
                              target_metric: str = "pagerank",
                              alpha: float = 0.05,
                              ) -> tuple[CorrelationReport, FitResult]:
    """Correlation grid of action types against centrality metrics, plus a
    multiple regression of the target metric on all action types.

    ``action_counts`` is n x k (per contributor, per action type), aligned
    with each metric vector. Bonferroni control uses m = k * number of
    metrics. Zero-variance pairs are reported undefined, not significant.
    """
    action_counts = np.asarray(action_counts, dtype=float)
    n, k = action_counts.shape
    pairs, rs, ts, dfs, ps, undef = [], [], [], [], [], []
    for metric in metric_vectors:
        mv = np.asarray(metric_vectors[metric], dtype=float)
        if len(mv) != n:
            raise ValueError(f"metric {metric} has length {len(mv)}, expected {n}")
        for j, action in enumerate(action_names):
            pairs.append((action, metric))
            res = pearson(action_counts[:, j], mv)
            rs.append(res.r)
            ts.append(res.t)
            dfs.append(res.n - 2)
            ps.append(res.p)
            undef.append(not res.defined)
    flags, threshold = bonferroni([1.0 if math.isnan(p) else p for p in ps], alpha)
    report = CorrelationReport(pairs=pairs, r=rs, t=ts, df=dfs, p=ps,
                               significant=flags, threshold=threshold,
                               comparisons=len(pairs), undefined=undef)
    fit = ols_multiple(action_counts, metric_vectors[target_metric],
                       names=list(action_names))
    return report, fit
