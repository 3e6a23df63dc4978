"""Independent brute-force oracles the implementation is checked against.

These deliberately avoid the library's code paths: the regression oracle
builds an explicit dummy-variable design and loops over clusters; the
percentile oracle interpolates order statistics by hand; the correlation
oracle applies the textbook sum formula.
"""

from __future__ import annotations

import math

import numpy as np


def fe_ols_dummy_oracle(y, X, groups, clusters=None):
    """Full dummy-variable OLS with a cluster sandwich.

    Returns (beta, clustered_se, adj_r2) for the X block. The design is
    [X | one dummy per group, no intercept]; the small-sample factor is
    G/(G-1) * (n-1)/(n-K) with K = all columns of the design.
    """
    y = np.asarray(y, dtype=float)
    X = np.asarray(X, dtype=float)
    groups = np.asarray(groups)
    clusters = groups if clusters is None else np.asarray(clusters)
    n, k = X.shape

    uniq = np.unique(groups)
    D = (groups[:, None] == uniq[None, :]).astype(float)
    W = np.hstack([X, D])
    K = W.shape[1]

    WtW = W.T @ W
    beta_full = np.linalg.solve(WtW, W.T @ y)
    resid = y - W @ beta_full
    WtW_inv = np.linalg.inv(WtW)

    cl_uniq = np.unique(clusters)
    G = len(cl_uniq)
    meat = np.zeros((K, K))
    for c in cl_uniq:
        idx = clusters == c
        s = W[idx].T @ resid[idx]
        meat += np.outer(s, s)
    factor = (G / (G - 1.0)) * ((n - 1.0) / (n - K))
    V = factor * WtW_inv @ meat @ WtW_inv

    se = np.sqrt(np.diag(V)[:k])
    ssr = float(resid @ resid)
    tss = float(((y - y.mean()) ** 2).sum())
    adj_r2 = 1.0 - (ssr / (n - K)) / (tss / (n - 1.0))
    return beta_full[:k], se, adj_r2


def percentile_linear_oracle(values, q):
    """Linear interpolation between order statistics, written out by hand."""
    xs = sorted(values)
    n = len(xs)
    h = (n - 1) * q
    lo = int(math.floor(h))
    hi = min(lo + 1, n - 1)
    return xs[lo] + (h - lo) * (xs[hi] - xs[lo])


def winsorize_oracle(values, lower=0.01, upper=0.99):
    finite = [v for v in values if not (isinstance(v, float) and math.isnan(v))]
    lo = percentile_linear_oracle(finite, lower)
    hi = percentile_linear_oracle(finite, upper)
    out = []
    for v in values:
        if isinstance(v, float) and math.isnan(v):
            out.append(v)
        else:
            out.append(min(max(v, lo), hi))
    return out


def pearson_oracle(x, y):
    """Textbook covariance formula on complete pairs."""
    pairs = [(a, b) for a, b in zip(x, y)
             if not (math.isnan(a) or math.isnan(b))]
    n = len(pairs)
    mx = sum(a for a, _ in pairs) / n
    my = sum(b for _, b in pairs) / n
    sxy = sum((a - mx) * (b - my) for a, b in pairs)
    sxx = sum((a - mx) ** 2 for a, _ in pairs)
    syy = sum((b - my) ** 2 for _, b in pairs)
    return sxy / math.sqrt(sxx * syy)
