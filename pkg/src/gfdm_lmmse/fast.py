"""Low-complexity LMMSE filter design for GFDM over a circulant channel.

G = H A is block-circulant, so W = G (G^H G + s^2 I)^-1 is too and is fixed
by its M eigen-blocks

    D_{W,u} = D_{G,u} (D_{G,u}^H D_{G,u} + s^2 I_K)^-1.

In the frequency domain every column of F_N G_s occupies 2M bins, and the
ZAK-domain selector F_N Z_u^H Z_u F_N^H equals M on the bins n = u (mod M)
and zero elsewhere. Each Gram block therefore only couples neighbouring
subcarriers: a cyclic tridiagonal K x K system per u, solved in O(K) per
right-hand side.
"""

import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from . import counting
from .linalg import (
    BlockCirculant,
    BlockDiagonal,
    CyclicTridiagonal,
    DenseFallbackWarning,
    SingularBlockError,
    SingularMatrixError,
    _dense_solve,
    bc_diagonalize,
    bc_reconstruct,
    dft,
    solve_cyclic_tridiagonal,
    zak_forward,
    zak_inverse,
)
from .model import apply_channel, modulation_matrix, window_bins, window_offsets


@dataclass
class FreqColumns:
    """N x K frequency-domain matrix stored on its per-column 2M-bin supports.

    Column k is nonzero only on rows[k] = (k*M + (-M+1..M)) mod N.
    """

    values: np.ndarray  # (K, 2M)
    rows: np.ndarray    # (K, 2M) row indices
    N: int

    @property
    def K(self):
        return self.values.shape[0]

    @property
    def M(self):
        return self.values.shape[1] // 2

    def to_dense(self):
        out = np.zeros((self.N, self.K), dtype=complex)
        for k in range(self.K):
            out[self.rows[k], k] = self.values[k]
        return out


def precompute_freq_as(params, proto):
    """F_N A_s from a single DFT: column k is column 0 rotated by k*M bins."""
    K, M, N = params.K, params.M, params.N
    rows = np.stack([window_bins(M, N, k) for k in range(K)])
    values = np.tile(proto.gfreq[window_bins(M, N)], (K, 1))
    return FreqColumns(values, rows, N)


def compute_freq_gs(freq_as, ch, counter=None):
    """F_N G_s = diag(hdiag) F_N A_s, evaluated on the supports only."""
    counting.charge(counter, counting.FREQ_GS, freq_as.values.size)
    return FreqColumns(freq_as.values * ch.hdiag[freq_as.rows], freq_as.rows, freq_as.N)


def selector_positions(M, u):
    """Window positions of the two bins n = u (mod M) inside every column's support.

    Returns (p_lo, p_hi); the upper bin of column k is the lower bin of
    column k+1.
    """
    j_hi = u if u > 0 else M
    offsets = window_offsets(M)
    p_hi = int(np.flatnonzero(offsets == j_hi)[0])
    return p_hi - M, p_hi


def build_tridiagonal(freq_gs, u, sigma_n2, counter=None):
    """T_u = (F_N G_s)^H D_u (F_N G_s) + s^2 I_K as a cyclic tridiagonal."""
    K, M = freq_gs.K, freq_gs.M
    if not 0 <= u < M:
        raise ValueError(f"block index {u} outside 0..{M - 1}")
    p_lo, p_hi = selector_positions(M, u)
    lo, hi = freq_gs.values[:, p_lo], freq_gs.values[:, p_hi]
    diag = M * (np.abs(lo) ** 2 + np.abs(hi) ** 2) + sigma_n2
    # T[k+1, k] sums over the bin shared by subcarriers k and k+1
    lower = M * lo[1:].conj() * hi[:-1]
    corner_bl = M * hi[-1].conj() * lo[0]
    counting.charge(counter, counting.TRIDIAGONAL, 3 * K)
    return CyclicTridiagonal(diag, lower, lower.conj(), np.conj(corner_bl), corner_bl,
                             hermitian=True)


def compute_dgu(gs, u):
    """D_{G,u} = sum_m w^(u m) G_m for one block index."""
    M = gs.M
    if not 0 <= u < M:
        raise ValueError(f"block index {u} outside 0..{M - 1}")
    w = np.exp(-2j * np.pi * u * np.arange(M) / M)
    return np.tensordot(w, gs.blocks, axes=1)


def gs_from_freq(freq_gs, counter=None):
    K = freq_gs.K
    counting.charge(counter, counting.DGU, K * counting.dft_mults(freq_gs.N))
    return BlockCirculant.from_first_columns(dft(freq_gs.to_dense(), inverse=True), K)


@dataclass
class FastFilter:
    """LMMSE filter kept as the first K columns W_s (M*K^2 coefficients)."""

    ws: BlockCirculant
    sigma_n2: float
    dense_fallback: bool = False

    @property
    def K(self):
        return self.ws.K

    @property
    def M(self):
        return self.ws.M

    @property
    def n_coefficients(self):
        return self.ws.blocks.size

    @property
    def dw(self):
        return bc_diagonalize(self.ws)


def _run_blocks(solve_block, M, order, workers):
    order = range(M) if order is None else list(order)
    if sorted(order) != list(range(M)):
        raise ValueError("order must be a permutation of the block indices")
    if workers and workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = dict(zip(order, pool.map(solve_block, order)))
    else:
        results = {u: solve_block(u) for u in order}
    return np.stack([results[u] for u in range(M)])


def filter_from_gs(gs, sigma_n2, counter=None, order=None, workers=None):
    """Eigen-block LMMSE with dense K x K solves; no band-limitation assumed."""
    K = gs.K
    dg = bc_diagonalize(gs, counter, counting.DGU)

    def solve_block(u):
        D = dg.blocks[u]
        T = D.conj().T @ D + sigma_n2 * np.eye(K)
        try:
            S = _dense_solve(T, D.conj().T)
        except SingularMatrixError as exc:
            raise SingularBlockError(u) from exc
        return S.conj().T

    blocks = _run_blocks(solve_block, gs.M, order, workers)
    ws = bc_reconstruct(BlockDiagonal(blocks), counter, counting.ZAK_RECON)
    return FastFilter(ws, sigma_n2, dense_fallback=True)


def compute_fast_filter(params, proto, ch, counter=None, order=None, workers=None):
    """LMMSE filter via per-block cyclic tridiagonal solves.

    `order` permutes the block processing sequence and `workers` > 1 runs
    the blocks on a thread pool; the result does not depend on either.
    A prototype whose spectrum leaves the 2M-bin window breaks the
    tridiagonal structure, so it is routed to dense per-block solves with a
    DenseFallbackWarning.
    """
    K, M, sigma_n2 = params.K, params.M, params.sigma_n2
    if not proto.is_band_limited(M):
        warnings.warn("prototype is not limited to 2M bins; using dense per-block solves",
                      DenseFallbackWarning, stacklevel=2)
        A = modulation_matrix(params, proto)
        gs = BlockCirculant.from_first_columns(apply_channel(ch, A.first_columns()), K)
        return filter_from_gs(gs, sigma_n2, counter, order, workers)

    freq_gs = compute_freq_gs(precompute_freq_as(params, proto), ch, counter)
    dg = bc_diagonalize(gs_from_freq(freq_gs, counter), counter, counting.DGU)

    def solve_block(u):
        T = build_tridiagonal(freq_gs, u, sigma_n2, counter)
        try:
            S = solve_cyclic_tridiagonal(T, dg.blocks[u].conj().T, counter)
        except SingularMatrixError as exc:
            raise SingularBlockError(u) from exc
        return S.conj().T

    blocks = _run_blocks(solve_block, M, order, workers)
    ws = bc_reconstruct(BlockDiagonal(blocks), counter, counting.ZAK_RECON)
    return FastFilter(ws, sigma_n2)


def equalize_zak(filt, y):
    """Z d = blockdiag(D_{W,u})^H Z y, then back through the inverse ZAK transform."""
    K, M = filt.K, filt.M
    y = np.asarray(y, dtype=complex)
    if y.shape[0] != K * M:
        raise ValueError(f"observation has length {y.shape[0]}, filter expects {K * M}")
    zy = zak_forward(y, K, M).reshape((M, K) + y.shape[1:])
    zd = np.einsum("uba,ub...->ua...", filt.dw.blocks.conj(), zy)
    return zak_inverse(zd.reshape(y.shape), K, M)


def filter_to_frequency_domain(filt):
    """F_N W_s, the per-subcarrier filters in the frequency domain."""
    return dft(filt.ws.first_columns())
