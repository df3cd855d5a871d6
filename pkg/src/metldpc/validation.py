"""Input checks shared by the decoders, simulator and estimators."""

from __future__ import annotations

import numpy as np
from sklearn.utils.validation import check_array


def check_code(code):
    from .code import MetLdpcCode

    if not isinstance(code, MetLdpcCode):
        raise TypeError(f"expected a MetLdpcCode, got {type(code).__name__}")
    return code


def check_llr(llr, n: int) -> np.ndarray:
    """One frame of finite channel LLRs of length ``n`` as float64."""
    llr = np.asarray(llr, dtype=np.float64)
    if llr.ndim != 1 or llr.shape[0] != n:
        raise ValueError(f"expected {n} channel LLRs, got shape {llr.shape}")
    if not np.all(np.isfinite(llr)):
        raise ValueError("channel LLRs must be finite")
    return llr


def check_llr_matrix(X, n: int) -> np.ndarray:
    X = check_array(X, dtype=np.float64, ensure_2d=True)
    if X.shape[1] != n:
        raise ValueError(f"expected {n} LLR columns, got {X.shape[1]}")
    return X
