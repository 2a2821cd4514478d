"""Reference LMMSE receiver: dense Cholesky solve of W = G (G^H G + s^2 I)^-1, G = H A."""

from dataclasses import dataclass

import numpy as np
import scipy.linalg

from . import counting
from .linalg import SingularMatrixError


@dataclass
class LmmseFilter:
    W: np.ndarray
    provenance: str = "direct"


def lmmse_direct(A_dense, ch, sigma_n2, counter=None):
    """LMMSE filter for the dense modulation matrix and a circulant channel.

    The Gram matrix is factorized by Cholesky and G^H is solved against it
    (N right-hand sides); W is the conjugate transpose of that solution.
    """
    A_dense = np.asarray(A_dense, dtype=complex)
    N = A_dense.shape[0]
    if A_dense.shape != (N, N) or ch.N != N:
        raise ValueError("modulation matrix and channel sizes disagree")
    if sigma_n2 < 0:
        raise ValueError("noise variance must be >= 0")
    G = ch.dense() @ A_dense
    gram = G.conj().T @ G + sigma_n2 * np.eye(N)
    try:
        c, low = scipy.linalg.cho_factor(gram, lower=True)
    except np.linalg.LinAlgError as exc:
        raise SingularMatrixError(f"Gram matrix is not positive definite: {exc}") from exc
    piv = np.abs(np.diag(c))
    if piv.min() ** 2 <= N * np.finfo(float).eps * piv.max() ** 2:
        raise SingularMatrixError("Gram matrix is numerically singular")
    counting.charge(counter, counting.CHOLESKY, counting.cholesky_mults(N))
    S = scipy.linalg.cho_solve((c, low), G.conj().T)
    counting.charge(counter, counting.SUBSTITUTION, counting.substitution_mults(N, N))
    return LmmseFilter(S.conj().T)


def equalize_direct(filt, y):
    W = filt.W if isinstance(filt, LmmseFilter) else np.asarray(filt)
    y = np.asarray(y)
    if y.shape[0] != W.shape[0]:
        raise ValueError(f"observation has length {y.shape[0]}, filter expects {W.shape[0]}")
    return W.conj().T @ y
