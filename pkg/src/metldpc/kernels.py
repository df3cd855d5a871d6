"""Reference check-node arithmetic on LLRs.

Everything here works on floats or numpy arrays and favours clarity; the
decoders use compiled equivalents in :mod:`metldpc._loops`. Sign convention:
a positive LLR favours bit 0, and the sign of 0 is taken as +1.
"""

from __future__ import annotations

import numpy as np


def llr_sign(x):
    """Sign with ``sign(0) = +1``."""
    return np.where(np.asarray(x) < 0, -1.0, 1.0)


def decompose(x):
    """Split an LLR into ``(alpha, beta)``: sign in {-1, +1} and magnitude."""
    return llr_sign(x), np.abs(x)


def correction_term(beta1, beta2):
    """Exact correction of the box-plus over min-sum.

    ``log((1 + exp(-|b1 + b2|)) / (1 + exp(-|b1 - b2|)))``, evaluated with
    log1p of non-positive exponents so it never overflows.
    """
    beta1 = np.asarray(beta1, dtype=float)
    beta2 = np.asarray(beta2, dtype=float)
    return np.log1p(np.exp(-np.abs(beta1 + beta2))) - np.log1p(np.exp(-np.abs(beta1 - beta2)))


def correction_term_approx(beta1, beta2):
    """Closed-form approximation ``-2 b1 / (1 + exp(b2))`` for ``0 <= b1 <= b2``."""
    beta1 = np.asarray(beta1, dtype=float)
    beta2 = np.asarray(beta2, dtype=float)
    if np.any(beta1 < 0) or np.any(beta2 < beta1):
        raise ValueError("correction_term_approx requires 0 <= beta1 <= beta2")
    # 1 / (1 + e^b) written as e^-b / (1 + e^-b) to stay finite for large b
    return -2.0 * beta1 * np.exp(-beta2) / (1.0 + np.exp(-beta2))


def box_plus(l1, l2):
    """Exact box-plus of two LLRs."""
    a1, b1 = decompose(l1)
    a2, b2 = decompose(l2)
    return a1 * a2 * (np.minimum(b1, b2) + correction_term(b1, b2))


def approx_box_plus(l1, l2):
    """Box-plus with the correction replaced by its closed-form approximation.

    Equals ``sign * min(b1, b2) * tanh(max(b1, b2) / 2)``.
    """
    a1, b1 = decompose(l1)
    a2, b2 = decompose(l2)
    return a1 * a2 * np.minimum(b1, b2) * np.tanh(np.maximum(b1, b2) / 2.0)


def cn_update_box_plus(llrs) -> np.ndarray:
    """Extrinsic SPA check-node outputs by forward-backward box-plus.

    A degree-1 check emits 0.
    """
    x = np.asarray(llrs, dtype=float)
    d = len(x)
    if d == 1:
        return np.zeros(1)
    fwd = np.empty(d)
    bwd = np.empty(d)
    fwd[0] = x[0]
    for k in range(1, d):
        fwd[k] = box_plus(fwd[k - 1], x[k])
    bwd[d - 1] = x[d - 1]
    for k in range(d - 2, -1, -1):
        bwd[k] = box_plus(bwd[k + 1], x[k])
    out = np.empty(d)
    out[0] = bwd[1]
    out[d - 1] = fwd[d - 2]
    for i in range(1, d - 1):
        out[i] = box_plus(fwd[i - 1], bwd[i + 1])
    return out


def _phi(x):
    # -log tanh(x/2), its own inverse; phi(0) = inf, phi(inf) = 0
    x = np.asarray(x, dtype=float)
    with np.errstate(divide="ignore"):
        return np.log1p(2.0 / np.expm1(x))


def tanh_product(llrs, axis: int = -1):
    """``2 atanh(prod tanh(L/2))`` reduced along ``axis``.

    The product is accumulated as a sum of ``-log tanh`` terms so that
    magnitudes near saturation keep full precision. Any zero input gives 0.
    """
    x = np.asarray(llrs, dtype=float)
    sign = np.prod(llr_sign(x), axis=axis)
    out = sign * _phi(np.sum(_phi(np.abs(x)), axis=axis))
    return float(out) if np.ndim(out) == 0 else out


def cn_update_tanh_product(llrs) -> np.ndarray:
    """Extrinsic SPA check-node outputs via the tanh rule."""
    x = np.asarray(llrs, dtype=float)
    if len(x) == 1:
        return np.zeros(1)
    return np.array([tanh_product(np.delete(x, i)) for i in range(len(x))])


def cn_update_tanh_scaled(llrs) -> np.ndarray:
    """Approximate check-node outputs: minimum times a tanh scaling.

    For edge ``i`` the output is the sign product over the other edges, times
    their smallest magnitude, times ``tanh(b/2)`` of every remaining magnitude.
    Degree 1 emits 0; degree 2 passes the other message through.
    """
    x = np.asarray(llrs, dtype=float)
    d = len(x)
    if d == 1:
        return np.zeros(1)
    sign, beta = decompose(x)
    out = np.empty(d)
    for i in range(d):
        others = np.delete(np.arange(d), i)
        m = others[np.argmin(beta[others])]
        rest = others[others != m]
        out[i] = np.prod(sign[others]) * beta[m] * np.prod(np.tanh(beta[rest] / 2.0))
    return out


def cn_update_min_sum(llrs, factor: float = 1.0) -> np.ndarray:
    """Scaled min-sum check-node outputs."""
    x = np.asarray(llrs, dtype=float)
    d = len(x)
    if d == 1:
        return np.zeros(1)
    sign, beta = decompose(x)
    out = np.empty(d)
    for i in range(d):
        others = np.delete(np.arange(d), i)
        out[i] = np.prod(sign[others]) * factor * beta[others].min()
    return out
