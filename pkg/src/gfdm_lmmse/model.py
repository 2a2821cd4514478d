"""GFDM system model: prototype filter, modulation matrix, channel and noise.

Symbols are ordered d[m*K + k] = d_{k,m}, which makes the modulation matrix
block-circulant with K x K blocks.
"""

from dataclasses import dataclass, field

import numpy as np
import scipy.linalg

from .linalg import BlockCirculant, bc_diagonalize, bc_matvec, dft

# center of the raised-cosine taper, in frequency bins. Any real taper
# symmetric about bin 0 (or about bin 1/2) gives equal magnitudes on some
# pair of bins M apart and therefore a singular modulation matrix for even
# (or odd) M. A quarter-bin offset never does.
TAPER_CENTER = 0.25


class SingularModulationError(ValueError):
    pass


@dataclass(frozen=True)
class GfdmParams:
    K: int
    M: int
    sigma_n2: float = 0.0
    rolloff: float = 0.5

    def __post_init__(self):
        if self.K < 3:
            raise ValueError(f"need K >= 3 subcarriers, got {self.K}")
        if self.M < 1:
            raise ValueError(f"need M >= 1 subsymbols, got {self.M}")
        if not self.sigma_n2 >= 0:
            raise ValueError(f"noise variance must be >= 0, got {self.sigma_n2}")
        if not 0 <= self.rolloff <= 1:
            raise ValueError(f"rolloff must lie in [0, 1], got {self.rolloff}")

    @property
    def N(self):
        return self.K * self.M


def window_offsets(M):
    """The 2M frequency offsets -M+1..M a subcarrier may occupy."""
    return np.arange(-M + 1, M + 1)


def window_bins(M, N, k=0):
    return (k * M + window_offsets(M)) % N


@dataclass
class PrototypeFilter:
    g: np.ndarray
    gfreq: np.ndarray = field(default=None)

    def __post_init__(self):
        self.g = np.asarray(self.g, dtype=complex)
        if self.gfreq is None:
            self.gfreq = dft(self.g)
        self.gfreq = np.asarray(self.gfreq, dtype=complex)

    @property
    def N(self):
        return len(self.g)

    def is_band_limited(self, M, tol=0.0):
        """True if the spectrum vanishes outside the 2M-bin window of subcarrier 0."""
        outside = np.ones(self.N, dtype=bool)
        outside[window_bins(M, self.N)] = False
        if not outside.any():
            return True
        return np.abs(self.gfreq[outside]).max() <= tol * np.abs(self.gfreq).max()


def raised_cosine_taper(M, rolloff):
    """Nonnegative taper over the offsets -M+1..M.

    Flat out to (1-a)M/2 bins from the taper center, cosine roll-off to
    zero at (1+a)M/2. a = 0 is a rectangle one subcarrier (M bins) wide,
    a = 1 reaches all 2M bins.
    """
    d = np.abs(window_offsets(M) - TAPER_CENTER)
    flat = (1 - rolloff) * M / 2
    edge = (1 + rolloff) * M / 2
    taper = np.where(d <= flat, 1.0, 0.0)
    if rolloff > 0:
        roll = (d > flat) & (d < edge)
        taper[roll] = 0.5 * (1 + np.cos(np.pi * (d[roll] - flat) / (rolloff * M)))
    return taper


def build_prototype(params, min_singular=1e-8):
    K, M, N = params.K, params.M, params.N
    gfreq = np.zeros(N, dtype=complex)
    gfreq[window_bins(M, N)] = raised_cosine_taper(M, params.rolloff)
    gfreq /= np.linalg.norm(gfreq)
    proto = PrototypeFilter(dft(gfreq, inverse=True), gfreq)

    d = bc_diagonalize(modulation_matrix(params, proto))
    smin = min(np.linalg.svd(blk, compute_uv=False)[-1] for blk in d.blocks)
    if smin < min_singular:
        raise SingularModulationError(
            f"modulation matrix is singular for K={K}, M={M}, rolloff={params.rolloff} "
            f"(smallest singular value {smin:.2e}); try a different rolloff")
    return proto


def _first_block_columns(K, M, g):
    n = np.arange(K * M)
    return g[:, None] * np.exp(2j * np.pi * np.outer(n, np.arange(K)) / K)


def modulation_matrix(params, proto):
    """Modulation matrix A as a BlockCirculant (its subsymbol-0 columns)."""
    K, M = params.K, params.M
    if proto.N != params.N:
        raise ValueError(f"prototype has length {proto.N}, expected N = {params.N}")
    return BlockCirculant.from_first_columns(_first_block_columns(K, M, proto.g), K)


def modulation_matrix_dense(params, proto):
    """A built column by column: column m*K + k is g[<n - mK>] exp(2j pi k M n / N)."""
    K, M, N = params.K, params.M, params.N
    n = np.arange(N)
    A = np.empty((N, N), dtype=complex)
    for m in range(M):
        shifted = proto.g[(n - m * K) % N]
        for k in range(K):
            A[:, m * K + k] = shifted * np.exp(2j * np.pi * k * M * n / N)
    return A


def modulate(A, d):
    d = np.asarray(d, dtype=complex)
    if d.shape[0] != A.N:
        raise ValueError(f"data block has length {d.shape[0]}, expected {A.N}")
    return bc_matvec(A, d)


@dataclass
class Channel:
    """Circulant multipath channel; hdiag is the diagonal of F_N H F_N^H."""

    h: np.ndarray
    N: int
    hdiag: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        self.h = np.atleast_1d(np.asarray(self.h, dtype=complex))
        if len(self.h) == 0 or len(self.h) > self.N:
            raise ValueError(f"impulse response length must be in [1, {self.N}]")
        self.hdiag = np.fft.fft(self.h, self.N)

    def dense(self):
        hp = np.zeros(self.N, dtype=complex)
        hp[:len(self.h)] = self.h
        return scipy.linalg.circulant(hp)


def random_channel(N, length, seed=None, decay=0.5):
    """Rayleigh taps with exponential power-delay profile exp(-decay * l), unit total power.

    Lengths above N are capped at N.
    """
    length = min(length, N)
    rng = np.random.default_rng(seed)
    power = np.exp(-decay * np.arange(length))
    power /= power.sum()
    taps = (rng.standard_normal(length) + 1j * rng.standard_normal(length)) * np.sqrt(power / 2)
    return Channel(taps, N)


def apply_channel(ch, x, noise=None):
    x = np.asarray(x, dtype=complex)
    if x.shape[0] != ch.N:
        raise ValueError(f"signal has length {x.shape[0]}, channel expects {ch.N}")
    hd = ch.hdiag.reshape((-1,) + (1,) * (x.ndim - 1))
    y = np.fft.ifft(hd * np.fft.fft(x, axis=0), axis=0)
    if noise is not None:
        noise = np.asarray(noise)
        if noise.shape != x.shape:
            raise ValueError("noise and signal shapes differ")
        y = y + noise
    return y


QPSK = np.array([1 + 1j, -1 + 1j, -1 - 1j, 1 - 1j]) / np.sqrt(2)
CONSTELLATIONS = {"qpsk": QPSK}


def draw_noise(params, seed=None, size=None):
    """Circularly-symmetric complex Gaussian, variance sigma_n2 per sample."""
    rng = np.random.default_rng(seed)
    shape = params.N if size is None else size
    if params.sigma_n2 == 0:
        return np.zeros(shape, dtype=complex)
    w = rng.standard_normal(shape) + 1j * rng.standard_normal(shape)
    return w * np.sqrt(params.sigma_n2 / 2)


def draw_symbols(params, constellation="qpsk", seed=None, size=None):
    rng = np.random.default_rng(seed)
    points = CONSTELLATIONS[constellation] if isinstance(constellation, str) else np.asarray(constellation)
    shape = params.N if size is None else size
    return points[rng.integers(len(points), size=shape)]
