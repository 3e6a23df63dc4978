"""Winsorization, standardization, OLS with absorbed date fixed effects,
cluster-robust covariance, adjusted R-squared, and correlation matrices.

Conventions (fixed here, used identically by callers and by the test oracle):

* Percentiles use linear interpolation between order statistics.
* Preprocessing order: listwise deletion, winsorize, standardize, form
  interactions, demean within the fixed-effect groups.
* Winsorization covers the dependent variable and all regressors;
  standardization covers independent variables only. Interaction terms are
  products of standardized constituents and are not re-standardized.
* Fixed effects are absorbed by within-group demeaning, numerically equal to
  dummy-variable OLS on the same rows.
* Clustered covariance is the sandwich over within-cluster score sums with
  the small-sample factor G/(G-1) * (N-1)/(N-K), where K counts regressors
  plus absorbed group dummies.
* Adjusted R-squared uses residual degrees of freedom N - k - G (absorbed
  dummies counted).
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Sequence

import numpy as np
import pandas as pd
from scipy import linalg as sla
from scipy import stats as sst


class ZeroVarianceError(ValueError):
    pass


class RankDeficiencyError(ValueError):
    def __init__(self, columns: list[str]):
        super().__init__(f"collinear regressor column(s): {columns}")
        self.columns = columns


class DegenerateSampleError(ValueError):
    pass


def percentile_cuts(values, lower: float = 0.01, upper: float = 0.99) -> tuple[float, float]:
    """Empirical cut pair via linear interpolation between order statistics."""
    x = pd.Series(values, dtype=float).dropna().to_numpy()
    if x.size < 2:
        raise DegenerateSampleError("percentiles need at least two non-missing values")
    return float(np.quantile(x, lower, method="linear")), float(np.quantile(x, upper, method="linear"))


def winsorize(
    values,
    lower: float = 0.01,
    upper: float = 0.99,
    cuts: tuple[float, float] | None = None,
) -> pd.Series:
    """Clamp the tails at the empirical lower/upper percentiles.

    Missing entries are preserved and ignored when locating the cuts. Passing
    ``cuts`` clamps at those fixed values instead (re-applying the same cuts
    is then exactly idempotent). Requires at least two non-missing values.
    """
    s = pd.Series(values, dtype=float)
    if cuts is None:
        cuts = percentile_cuts(s, lower, upper)
    lo, hi = cuts
    return s.clip(lower=lo, upper=hi)


def standardize(values, name: str = "variable") -> pd.Series:
    """Scale to mean 0 and sample (ddof=1) standard deviation 1 on non-missing entries."""
    s = pd.Series(values, dtype=float)
    x = s.dropna()
    if x.size < 2:
        raise DegenerateSampleError(f"standardize needs at least two non-missing values for {name!r}")
    sd = x.std(ddof=1)
    if sd == 0.0:
        raise ZeroVarianceError(f"{name!r} has zero sample variance")
    return (s - x.mean()) / sd


@dataclass(frozen=True)
class RegressionSpec:
    """One estimation: dependent variable, regressors, optional interactions.

    ``auxiliaries`` are columns preprocessed like regressors and usable as
    interaction constituents but excluded as main-effect terms; the case for
    them is a moderator absorbed by the fixed effects (constant within every
    group), whose main effect is not identified.
    """

    dep: str
    regressors: tuple[str, ...]
    interactions: tuple[tuple[str, str], ...] = ()
    auxiliaries: tuple[str, ...] = ()
    fe: str = "announcement_date"
    cluster: str = "announcement_date"
    winsorize: bool = True
    standardize: bool = True
    spec_id: str = ""

    def __post_init__(self):
        declared = set(self.regressors) | set(self.auxiliaries)
        for a, b in self.interactions:
            if a not in declared or b not in declared:
                raise ValueError(f"interaction ({a}, {b}) references undeclared columns")

    @property
    def term_names(self) -> list[str]:
        return list(self.regressors) + [f"{a} x {b}" for a, b in self.interactions]


@dataclass
class RegressionResult:
    spec_id: str
    dep: str
    terms: list[str]
    coef: dict[str, float]
    se: dict[str, float]
    tstat: dict[str, float]
    pvalue: dict[str, float]
    adj_r2: float
    r2: float
    nobs: int
    n_clusters: int
    n_fe_groups: int
    dropped_missing: int

    def stars(self, term: str) -> str:
        p = self.pvalue[term]
        return "***" if p < 0.01 else "**" if p < 0.05 else "*" if p < 0.10 else ""

    def to_rows(self) -> list[dict]:
        return [{
            "spec_id": self.spec_id,
            "dep": self.dep,
            "term": t,
            "coef": self.coef[t],
            "se": self.se[t],
            "tstat": self.tstat[t],
            "pvalue": self.pvalue[t],
            "stars": self.stars(t),
            "adj_r2": self.adj_r2,
            "nobs": self.nobs,
            "n_clusters": self.n_clusters,
        } for t in self.terms]


def _group_demean(values: np.ndarray, codes: np.ndarray, n_groups: int) -> np.ndarray:
    """Subtract group means. values is 1-D or 2-D with rows as observations."""
    sums = np.zeros((n_groups,) + values.shape[1:], dtype=float)
    np.add.at(sums, codes, values)
    counts = np.bincount(codes, minlength=n_groups).astype(float)
    means = sums / counts.reshape((n_groups,) + (1,) * (values.ndim - 1))
    return values - means[codes]


def fit_fe_ols(spec: RegressionSpec, data: pd.DataFrame) -> RegressionResult:
    """Estimate the spec with absorbed fixed effects and clustered inference."""
    parents = sorted({c for pair in spec.interactions for c in pair})
    base_cols = list(dict.fromkeys([spec.dep, *spec.regressors, *spec.auxiliaries, *parents]))
    needed = base_cols + [spec.fe] + ([spec.cluster] if spec.cluster != spec.fe else [])
    missing_cols = [c for c in needed if c not in data.columns]
    if missing_cols:
        raise KeyError(f"column(s) {missing_cols} not in data")

    df = data[needed].copy()
    n0 = len(df)
    df = df.dropna()
    dropped = n0 - len(df)
    if df.empty:
        raise DegenerateSampleError("no complete rows after listwise deletion")

    # Deterministic row order: results are invariant to input permutation.
    df = df.sort_values(by=needed, kind="mergesort").reset_index(drop=True)

    if spec.winsorize:
        for c in base_cols:
            df[c] = winsorize(df[c])
    if spec.standardize:
        for c in base_cols:
            if c == spec.dep:
                continue
            df[c] = standardize(df[c], name=c)

    for a, b in spec.interactions:
        df[f"{a} x {b}"] = df[a] * df[b]

    terms = spec.term_names
    y = df[spec.dep].to_numpy(dtype=float)
    X = df[terms].to_numpy(dtype=float)
    n, k = X.shape

    fe_codes, fe_uniques = pd.factorize(df[spec.fe], sort=True)
    cl_codes, cl_uniques = pd.factorize(df[spec.cluster], sort=True)
    g_fe = len(fe_uniques)
    g_cl = len(cl_uniques)
    if g_cl < 2:
        raise DegenerateSampleError("clustered standard errors need at least two clusters")
    if n <= k + g_fe:
        raise DegenerateSampleError(
            f"{n} rows cannot identify {k} regressors plus {g_fe} absorbed groups"
        )

    y_t = _group_demean(y, fe_codes, g_fe)
    X_t = _group_demean(X, fe_codes, g_fe)

    # Rank check on the demeaned design; name the pivoted-out columns.
    _q, r, piv = sla.qr(X_t, mode="economic", pivoting=True)
    diag = np.abs(np.diag(r))
    tol = diag.max(initial=0.0) * max(n, k) * np.finfo(float).eps
    rank = int((diag > tol).sum())
    if rank < k:
        raise RankDeficiencyError([terms[p] for p in piv[rank:]])

    beta, *_ = np.linalg.lstsq(X_t, y_t, rcond=None)
    resid = y_t - X_t @ beta

    xtx_inv = np.linalg.inv(X_t.T @ X_t)
    meat = np.zeros((k, k))
    for g in range(g_cl):
        idx = cl_codes == g
        s_g = X_t[idx].T @ resid[idx]
        meat += np.outer(s_g, s_g)
    k_total = k + g_fe
    correction = (g_cl / (g_cl - 1)) * ((n - 1) / (n - k_total))
    vcov = correction * xtx_inv @ meat @ xtx_inv

    se = np.sqrt(np.diag(vcov))
    tstat = beta / se
    df_resid = n - k - g_fe
    pvals = 2.0 * sst.t.sf(np.abs(tstat), df=df_resid)

    ssr = float(resid @ resid)
    tss = float(((y - y.mean()) ** 2).sum())
    r2 = 1.0 - ssr / tss
    adj_r2 = 1.0 - (ssr / df_resid) / (tss / (n - 1))

    return RegressionResult(
        spec_id=spec.spec_id,
        dep=spec.dep,
        terms=terms,
        coef=dict(zip(terms, beta.tolist())),
        se=dict(zip(terms, se.tolist())),
        tstat=dict(zip(terms, tstat.tolist())),
        pvalue=dict(zip(terms, pvals.tolist())),
        adj_r2=adj_r2,
        r2=r2,
        nobs=n,
        n_clusters=g_cl,
        n_fe_groups=g_fe,
        dropped_missing=dropped,
    )


def horse_race(spec: RegressionSpec, data: pd.DataFrame) -> RegressionResult:
    """fit_fe_ols for a spec carrying two competing signal regressors."""
    if len(spec.regressors) < 2:
        raise ValueError("a horse race needs at least two regressors")
    return fit_fe_ols(spec, data)


def interaction_fit(spec: RegressionSpec, moderator: str, data: pd.DataFrame) -> RegressionResult:
    """Augment the spec with a moderator and signal-times-moderator product.

    The first regressor in the spec is the signal; the product is formed
    after the preprocessing pipeline standardizes its constituents. A
    moderator that is constant within every fixed-effect group (a period
    indicator, say) is absorbed by the group effects, so its main effect is
    dropped and only the interaction enters.
    """
    if moderator not in data.columns:
        raise KeyError(f"moderator column {moderator!r} not in data")
    signal = spec.regressors[0]
    complete = data.dropna(subset=[moderator, spec.fe])
    absorbed = bool(len(complete)) and (
        complete.groupby(spec.fe)[moderator].nunique() <= 1
    ).all()
    regressors = list(spec.regressors)
    auxiliaries = list(spec.auxiliaries)
    if absorbed:
        if moderator not in auxiliaries:
            auxiliaries.append(moderator)
    elif moderator not in regressors:
        regressors.append(moderator)
    augmented = replace(
        spec,
        regressors=tuple(regressors),
        auxiliaries=tuple(auxiliaries),
        interactions=spec.interactions + ((signal, moderator),),
    )
    return fit_fe_ols(augmented, data)


def pearson_matrix(data: pd.DataFrame, columns: Sequence[str] | None = None) -> pd.DataFrame:
    """Pairwise-complete Pearson correlations; symmetric with a unit diagonal."""
    cols = list(columns) if columns is not None else list(data.columns)
    out = pd.DataFrame(np.eye(len(cols)), index=cols, columns=cols)
    arrays = {c: data[c].to_numpy(dtype=float) for c in cols}
    for c in cols:
        x = arrays[c]
        x = x[~np.isnan(x)]
        if x.size < 2 or x.std() == 0.0:
            raise ZeroVarianceError(f"column {c!r} has no variance on its non-missing values")
    for i, a in enumerate(cols):
        for j in range(i + 1, len(cols)):
            b = cols[j]
            mask = ~(np.isnan(arrays[a]) | np.isnan(arrays[b]))
            xa, xb = arrays[a][mask], arrays[b][mask]
            if xa.size < 2 or xa.std() == 0.0 or xb.std() == 0.0:
                raise ZeroVarianceError(
                    f"pair ({a!r}, {b!r}) has no joint variance on complete observations"
                )
            r = float(np.corrcoef(xa, xb)[0, 1])
            out.iloc[i, j] = out.iloc[j, i] = r
    return out


def gap(a, b):
    """Absolute difference; missing inputs stay missing. Works on scalars and Series."""
    if isinstance(a, pd.Series) or isinstance(b, pd.Series):
        return (pd.Series(a, dtype=float) - pd.Series(b, dtype=float)).abs()
    if a is None or b is None or (isinstance(a, float) and np.isnan(a)) or (
        isinstance(b, float) and np.isnan(b)
    ):
        return None
    return abs(a - b)
