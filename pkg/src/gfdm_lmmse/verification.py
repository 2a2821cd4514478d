"""Dense cross-checks of the fast filter design, shared by the CLI.

Every check builds the dense N x N object it compares against, so these are
only meant for small N.
"""

import numpy as np

from .direct import equalize_direct, lmmse_direct
from .fast import (
    compute_freq_gs,
    compute_fast_filter,
    build_tridiagonal,
    equalize_zak,
    gs_from_freq,
    precompute_freq_as,
)
from .linalg import bc_diagonalize, dft_matrix, zak_matrix
from .model import modulation_matrix_dense

TOLERANCES = {
    "filter": 1e-9,
    "tridiagonal": 1e-10,
    "structure": 1e-12,
    "selector": 1e-12,
    "diagonalization": 1e-10,
    "zak_equalizer": 1e-10,
    "storage": 0.0,
}


def rel_err(a, b):
    nb = np.linalg.norm(b)
    return float(np.linalg.norm(a - b) / (nb if nb > 0 else 1.0))


def rel_err_block_circulant(X, W):
    """||X - W||_F / ||W||_F for a BlockCirculant X, one block column at a time."""
    K, cols = X.K, X.first_columns()
    sq = 0.0
    for j in range(X.M):
        sq += np.linalg.norm(np.roll(cols, j * K, axis=0) - W[:, j * K:(j + 1) * K]) ** 2
    nb = np.linalg.norm(W)
    return float(np.sqrt(sq) / (nb if nb > 0 else 1.0))


def selector_matrix(K, M, u):
    """Z_u^H Z_u with Z_u = w_u kron I_K, w_u = (1, w^u, ..., w^((M-1)u))."""
    wu = np.exp(-2j * np.pi * u * np.arange(M) / M)[None, :]
    Zu = np.kron(wu, np.eye(K))
    return Zu.conj().T @ Zu


def band_mask(K):
    idx = np.arange(K)
    dist = np.abs(idx[:, None] - idx[None, :])
    return (dist <= 1) | (dist == K - 1)


def verify_system(params, proto, ch, n_observations=10, seed=0):
    """Run every dense oracle check; returns {name: (error, tolerance)}."""
    K, M, N, s2 = params.K, params.M, params.N, params.sigma_n2
    rng = np.random.default_rng(seed)
    F = dft_matrix(N)
    A = modulation_matrix_dense(params, proto)
    G = ch.dense() @ A
    W = lmmse_direct(A, ch, s2).W
    filt = compute_fast_filter(params, proto, ch)
    out = {"filter": rel_err_block_circulant(filt.ws, W)}

    Z = zak_matrix(K, M)
    conj = Z @ G @ Z.conj().T
    freq_gs = compute_freq_gs(precompute_freq_as(params, proto), ch)
    dg = bc_diagonalize(gs_from_freq(freq_gs))
    out["diagonalization"] = rel_err(conj, dg.to_dense())

    FG = F @ G[:, :K]
    mask = band_mask(K)
    tri, struct, sel = 0.0, 0.0, 0.0
    for u in range(M):
        Du = F @ selector_matrix(K, M, u) @ F.conj().T
        off = Du - np.diag(np.diag(Du))
        sel = max(sel, np.abs(off).max() / np.linalg.norm(Du))
        gram = FG.conj().T @ Du @ FG
        struct = max(struct, np.abs(gram[~mask]).max(initial=0.0) / np.linalg.norm(gram))
        T = build_tridiagonal(freq_gs, u, s2).to_dense()
        D = dg.blocks[u]
        tri = max(tri, rel_err(T, D.conj().T @ D + s2 * np.eye(K)))
    out["tridiagonal"] = tri
    out["structure"] = float(struct)
    out["selector"] = float(sel)

    y = rng.standard_normal((N, n_observations)) + 1j * rng.standard_normal((N, n_observations))
    out["zak_equalizer"] = rel_err(equalize_zak(filt, y), equalize_direct(W, y))
    out["storage"] = float(filt.n_coefficients != M * K * K)
    return {name: (err, TOLERANCES[name]) for name, err in out.items()}
