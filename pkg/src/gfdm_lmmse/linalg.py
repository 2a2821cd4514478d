"""Structured complex linear algebra.

Unitary DFT and ZAK transform, block-circulant matrices and their
eigen-blocks, and a solver for Hermitian cyclic tridiagonal systems.

Block-circulant matrices are stored by their first block-column
X_s = [X_0; X_1; ...; X_{M-1}], each block K x K. The dense expansion has
block (i, j) equal to X_{(i - j) mod M}.
"""

import warnings
from dataclasses import dataclass

import numpy as np

from . import counting


class SingularMatrixError(np.linalg.LinAlgError):
    pass


class SingularBlockError(SingularMatrixError):
    def __init__(self, u, msg=None):
        self.u = u
        super().__init__(msg or f"eigen-block u={u} is singular")


class DenseFallbackWarning(RuntimeWarning):
    pass


def dft(x, inverse=False, axis=0):
    """Unitary DFT along `axis`. The inverse is the conjugate transform."""
    x = np.asarray(x, dtype=complex)
    if x.ndim == 0 or x.shape[axis] == 0:
        raise ValueError("dft needs at least one sample")
    if inverse:
        return np.fft.ifft(x, axis=axis, norm="ortho")
    return np.fft.fft(x, axis=axis, norm="ortho")


def dft_matrix(n):
    idx = np.arange(n)
    return np.exp(-2j * np.pi * np.outer(idx, idx) / n) / np.sqrt(n)


def _zak_check(x, K, M):
    x = np.asarray(x, dtype=complex)
    if x.ndim not in (1, 2):
        raise ValueError("expected a vector or a matrix of column vectors")
    if x.shape[0] != K * M:
        raise ValueError(f"length {x.shape[0]} does not match K*M = {K * M}")
    return x


def zak_forward(x, K, M):
    """(F_M kron I_K) x with unitary F_M; accepts a vector or N x C matrix.

    Output index u*K + k holds the u-th DFT bin of the polyphase
    component x[k], x[k+K], ..., x[k+(M-1)K].
    """
    x = _zak_check(x, K, M)
    tail = x.shape[1:]
    y = np.fft.fft(x.reshape((M, K) + tail), axis=0, norm="ortho")
    return y.reshape(x.shape)


def zak_inverse(y, K, M):
    y = _zak_check(y, K, M)
    tail = y.shape[1:]
    x = np.fft.ifft(y.reshape((M, K) + tail), axis=0, norm="ortho")
    return x.reshape(y.shape)


def zak_matrix(K, M):
    return np.kron(dft_matrix(M), np.eye(K))


@dataclass
class BlockCirculant:
    """N x N block-circulant matrix held as its M stacked K x K blocks."""

    blocks: np.ndarray  # shape (M, K, K)

    def __post_init__(self):
        self.blocks = np.asarray(self.blocks, dtype=complex)
        if self.blocks.ndim != 3 or self.blocks.shape[1] != self.blocks.shape[2]:
            raise ValueError("blocks must have shape (M, K, K)")

    @property
    def M(self):
        return self.blocks.shape[0]

    @property
    def K(self):
        return self.blocks.shape[1]

    @property
    def N(self):
        return self.M * self.K

    @classmethod
    def from_first_columns(cls, xs, K):
        xs = np.asarray(xs, dtype=complex)
        if xs.ndim != 2 or xs.shape[1] != K or xs.shape[0] % K:
            raise ValueError("first columns must be an (M*K) x K matrix")
        return cls(xs.reshape(-1, K, K))

    @classmethod
    def from_dense(cls, X, K):
        X = np.asarray(X)
        return cls.from_first_columns(X[:, :K], K)

    def first_columns(self):
        return self.blocks.reshape(self.N, self.K)

    def to_dense(self):
        M = self.M
        idx = (np.arange(M)[:, None] - np.arange(M)[None, :]) % M
        # (i, j, a, b) -> rows i*K + a, cols j*K + b
        return self.blocks[idx].transpose(0, 2, 1, 3).reshape(self.N, self.N)

    def matvec(self, x):
        return bc_matvec(self, x)


@dataclass
class BlockDiagonal:
    """Eigen-blocks D_{X,0..M-1} of a block-circulant matrix."""

    blocks: np.ndarray  # shape (M, K, K)

    def __post_init__(self):
        self.blocks = np.asarray(self.blocks, dtype=complex)
        if self.blocks.ndim != 3 or self.blocks.shape[1] != self.blocks.shape[2]:
            raise ValueError("blocks must have shape (M, K, K)")

    @property
    def M(self):
        return self.blocks.shape[0]

    @property
    def K(self):
        return self.blocks.shape[1]

    @property
    def N(self):
        return self.M * self.K

    def __getitem__(self, u):
        return self.blocks[u]

    def to_dense(self):
        out = np.zeros((self.N, self.N), dtype=complex)
        K = self.K
        for u, blk in enumerate(self.blocks):
            out[u * K:(u + 1) * K, u * K:(u + 1) * K] = blk
        return out


def bc_diagonalize(X, counter=None, stage=counting.DGU):
    """Eigen-blocks D_{X,u} = sum_m w^(u m) X_m, w = exp(-2j pi / M).

    Runs the ZAK transform down each of the K columns of X_s and rescales by
    sqrt(M), so that Z X Z^H = blockdiag(D_{X,u}) with the unitary Z.
    """
    K, M = X.K, X.M
    counting.charge(counter, stage, K * K * counting.dft_mults(M))
    d = np.sqrt(M) * zak_forward(X.first_columns(), K, M)
    return BlockDiagonal(d.reshape(M, K, K))


def bc_reconstruct(D, counter=None, stage=counting.ZAK_RECON):
    """Inverse of bc_diagonalize: X_m = (1/M) sum_u w^(-u m) D_{X,u}."""
    K, M = D.K, D.M
    counting.charge(counter, stage, K * K * counting.dft_mults(M))
    xs = zak_inverse(D.blocks.reshape(M * K, K), K, M) / np.sqrt(M)
    return BlockCirculant(xs.reshape(M, K, K))


def _check_compatible(X, Y):
    if (X.K, X.M) != (Y.K, Y.M):
        raise ValueError(f"block shapes differ: (K, M) = {(X.K, X.M)} vs {(Y.K, Y.M)}")


def bc_multiply(X, Y):
    _check_compatible(X, Y)
    dx, dy = bc_diagonalize(X), bc_diagonalize(Y)
    return bc_reconstruct(BlockDiagonal(dx.blocks @ dy.blocks))


def bc_add(X, Y):
    _check_compatible(X, Y)
    return BlockCirculant(X.blocks + Y.blocks)


def bc_inverse(X, rcond=1e-13):
    d = bc_diagonalize(X)
    inv = np.empty_like(d.blocks)
    for u, blk in enumerate(d.blocks):
        s = np.linalg.svd(blk, compute_uv=False)
        if s[-1] <= rcond * s[0] or s[0] == 0:
            raise SingularBlockError(u)
        inv[u] = np.linalg.inv(blk)
    return bc_reconstruct(BlockDiagonal(inv))


def bc_matvec(X, x):
    """X @ x in the ZAK domain; x may be a vector or an N x C matrix."""
    K, M = X.K, X.M
    x = _zak_check(x, K, M)
    d = bc_diagonalize(X)
    zx = zak_forward(x, K, M).reshape((M, K) + x.shape[1:])
    zy = np.einsum("uab,ub...->ua...", d.blocks, zx)
    return zak_inverse(zy.reshape(x.shape), K, M)


@dataclass
class CyclicTridiagonal:
    """K x K tridiagonal matrix with periodic corners T[0, K-1], T[K-1, 0]."""

    diag: np.ndarray
    lower: np.ndarray
    upper: np.ndarray
    corner_top_right: complex
    corner_bottom_left: complex
    hermitian: bool = False

    def __post_init__(self):
        self.diag = np.asarray(self.diag, dtype=complex)
        self.lower = np.asarray(self.lower, dtype=complex)
        self.upper = np.asarray(self.upper, dtype=complex)
        K = self.diag.shape[0]
        if K < 3:
            raise ValueError("cyclic tridiagonal structure needs K >= 3")
        if self.lower.shape != (K - 1,) or self.upper.shape != (K - 1,):
            raise ValueError("off-diagonals must have length K - 1")
        self.corner_top_right = complex(self.corner_top_right)
        self.corner_bottom_left = complex(self.corner_bottom_left)

    @property
    def K(self):
        return self.diag.shape[0]

    @classmethod
    def from_dense(cls, T, hermitian=False):
        T = np.asarray(T, dtype=complex)
        return cls(np.diag(T).copy(), np.diag(T, -1).copy(), np.diag(T, 1).copy(),
                   T[0, -1], T[-1, 0], hermitian)

    def to_dense(self):
        K = self.K
        T = np.diag(self.diag) + np.diag(self.lower, -1) + np.diag(self.upper, 1)
        T[0, K - 1] += self.corner_top_right
        T[K - 1, 0] += self.corner_bottom_left
        return T

    def is_hermitian(self, tol=1e-12):
        scale = max(np.abs(self.diag).max(), 1.0)
        return (np.all(np.abs(self.diag.imag) <= tol * scale)
                and np.allclose(self.upper, self.lower.conj(), rtol=0, atol=tol * scale)
                and abs(self.corner_top_right - np.conj(self.corner_bottom_left)) <= tol * scale)


def _thomas_factor(a, b, c, tiny):
    """Elimination for the tridiagonal (sub a, diag b, super c).

    Returns (pivots, modified super-diagonal) or None on a vanishing pivot.
    """
    n = len(b)
    piv = [b[0]]
    cp = []
    if abs(piv[0]) <= tiny:
        return None
    for i in range(n - 1):
        cp.append(c[i] / piv[i])
        p = b[i + 1] - a[i] * cp[i]
        if abs(p) <= tiny:
            return None
        piv.append(p)
    return piv, cp


def _thomas_apply(a, piv, cp, d):
    n = len(piv)
    y = [None] * n
    y[0] = d[0] / piv[0]
    for i in range(1, n):
        y[i] = (d[i] - a[i - 1] * y[i - 1]) / piv[i]
    for i in range(n - 2, -1, -1):
        y[i] = y[i] - cp[i] * y[i + 1]
    return y


def _cyclic_core(diag, lower, upper, ctr, cbl, rhs, tiny):
    """Bordered Thomas: eliminate the interior (K-1) x (K-1) tridiagonal
    block, then correct with the rank-one border carrying the corners.

    The interior block is a principal submatrix, so for Hermitian positive
    definite T its pivots stay positive without pivoting.
    """
    K = len(diag)
    n = K - 1
    fac = _thomas_factor(lower[:n - 1], diag[:n], upper[:n - 1], tiny)
    if fac is None:
        return None
    piv, cp = fac
    # last column above the diagonal: corner in row 0, super-diagonal in row n-1
    e = [0] * n
    e[0] = ctr
    e[n - 1] = upper[n - 1]
    z = _thomas_apply(lower[:n - 1], piv, cp, e)
    s = diag[n] - (cbl * z[0] + lower[n - 1] * z[n - 1])
    if abs(s) <= tiny:
        return None
    y = _thomas_apply(lower[:n - 1], piv, cp, rhs[:n])
    x_last = (rhs[n] - (cbl * y[0] + lower[n - 1] * y[n - 1])) / s
    return [yi - zi * x_last for yi, zi in zip(y, z)] + [x_last]


def cyclic_solve_executed_mults(K, nrhs):
    """Multiplications and divisions the bordered Thomas solve actually performs."""
    n = K - 1
    factor = (2 * n - 2) + (3 * n - 2) + 2
    per_rhs = (3 * n - 2) + 2 + 1 + n
    return factor + nrhs * per_rhs


def solve_cyclic_tridiagonal(T, B, counter=None, stage=counting.SOLVE, return_info=False):
    """Solve T X = B for a cyclic tridiagonal T.

    The counter is charged by the Thomas cost model: 2K for the
    factorization and 5K per right-hand side. If elimination meets a
    vanishing pivot the system is handed to a dense solver and a
    DenseFallbackWarning is issued; `return_info=True` also returns whether
    that happened.
    """
    B = np.asarray(B, dtype=complex)
    vector = B.ndim == 1
    if vector:
        B = B[:, None]
    K = T.K
    if B.shape[0] != K:
        raise ValueError(f"right-hand side has {B.shape[0]} rows, expected {K}")
    nrhs = B.shape[1]

    scale = max(np.abs(T.diag).max(), np.abs(T.lower).max(), np.abs(T.upper).max(),
                abs(T.corner_top_right), abs(T.corner_bottom_left))
    tiny = 16 * K * np.finfo(float).eps * scale
    X = None
    if scale > 0:
        rows = _cyclic_core(T.diag, T.lower, T.upper, T.corner_top_right,
                            T.corner_bottom_left, list(B), tiny)
        if rows is not None:
            X = np.array(rows)

    fallback = X is None
    if fallback:
        warnings.warn("cyclic elimination hit a vanishing pivot; using dense solve",
                      DenseFallbackWarning, stacklevel=2)
        X = _dense_solve(T.to_dense(), B)
    counting.charge(counter, stage,
                    counting.thomas_factor_mults(K) + nrhs * counting.thomas_solve_mults(K))
    if vector:
        X = X[:, 0]
    return (X, fallback) if return_info else X


def _dense_solve(A, B, rcond=1e-14):
    s = np.linalg.svd(A, compute_uv=False)
    if s[0] == 0 or s[-1] <= rcond * s[0]:
        raise SingularMatrixError("matrix is numerically singular")
    try:
        return np.linalg.solve(A, B)
    except np.linalg.LinAlgError as exc:
        raise SingularMatrixError(str(exc)) from exc
