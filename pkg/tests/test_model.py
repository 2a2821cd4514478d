import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from gfdm_lmmse.model import (
    QPSK,
    Channel,
    GfdmParams,
    PrototypeFilter,
    SingularModulationError,
    apply_channel,
    build_prototype,
    draw_noise,
    draw_symbols,
    modulate,
    modulation_matrix,
    modulation_matrix_dense,
    random_channel,
    window_bins,
)
from gfdm_lmmse.linalg import dft
from oracles import circulant_dense, crandn, gfdm_double_sum


def test_params_validation():
    assert GfdmParams(4, 3).N == 12
    for bad in [dict(K=2, M=3), dict(K=4, M=0), dict(K=4, M=3, sigma_n2=-1),
                dict(K=4, M=3, rolloff=1.5)]:
        with pytest.raises(ValueError):
            GfdmParams(**bad)


# -- prototype ---------------------------------------------------------------

def test_zero_rolloff_is_flat_over_one_subcarrier():
    p = GfdmParams(8, 4, rolloff=0.0)
    G = build_prototype(p).gfreq
    nz = np.flatnonzero(np.abs(G) > 0)
    assert len(nz) == p.M
    np.testing.assert_allclose(np.abs(G[nz]), 1 / np.sqrt(p.M), rtol=1e-14)


@pytest.mark.parametrize("rolloff", [0.0, 0.1, 0.5, 0.9, 1.0])
@pytest.mark.parametrize("K,M", [(3, 1), (4, 3), (8, 4), (16, 5), (5, 8)])
def test_spectral_support_at_most_2m(K, M, rolloff):
    proto = build_prototype(GfdmParams(K, M, rolloff=rolloff))
    assert np.count_nonzero(proto.gfreq) <= 2 * M
    assert proto.is_band_limited(M)
    assert np.all(proto.gfreq.real >= 0) and np.all(proto.gfreq.imag == 0)


def test_full_rolloff_fills_window():
    proto = build_prototype(GfdmParams(8, 4, rolloff=1.0))
    assert np.count_nonzero(proto.gfreq) == 8


def test_unit_energy_and_exact_zeros_outside_window():
    p = GfdmParams(8, 5, rolloff=0.5)
    proto = build_prototype(p)
    assert abs(np.linalg.norm(proto.g) - 1) <= 1e-12
    outside = np.setdiff1d(np.arange(p.N), window_bins(p.M, p.N))
    assert np.abs(proto.gfreq[outside]).max() == 0.0
    np.testing.assert_allclose(dft(proto.g), proto.gfreq, atol=1e-15)


@settings(max_examples=40, deadline=None)
@given(K=st.integers(3, 16), M=st.integers(1, 12), rolloff=st.floats(0, 1))
def test_prototype_always_gives_nonsingular_modulation(K, M, rolloff):
    build_prototype(GfdmParams(K, M, rolloff=rolloff))


def test_singular_modulation_is_reported(monkeypatch):
    import gfdm_lmmse.model as model
    # a real taper symmetric about bin 0 ties |G(-M/2)| = |G(M/2)| for even M
    monkeypatch.setattr(model, "TAPER_CENTER", 0.0)
    with pytest.raises(SingularModulationError, match="rolloff"):
        build_prototype(GfdmParams(4, 4, rolloff=0.5))


def test_non_band_limited_detection():
    g = np.zeros(12, dtype=complex)
    g[0] = 1
    assert not PrototypeFilter(g).is_band_limited(3)


# -- modulation matrix -------------------------------------------------------

def test_impulse_prototype():
    K, M = 4, 3
    g = np.zeros(K * M, dtype=complex)
    g[0] = 1
    A = modulation_matrix_dense(GfdmParams(K, M), PrototypeFilter(g))
    expected = np.zeros((K * M, K * M))
    for m in range(M):
        expected[m * K, m * K:(m + 1) * K] = 1
    np.testing.assert_allclose(A, expected, atol=1e-12)


def test_dense_is_block_circulant():
    p = GfdmParams(4, 3, rolloff=0.5)
    A = modulation_matrix_dense(p, build_prototype(p))
    r = np.arange(p.N)
    shifted = A[np.ix_((r + p.K) % p.N, (r + p.K) % p.N)]
    np.testing.assert_allclose(shifted, A, atol=1e-14)


@pytest.mark.parametrize("K", range(3, 9))
@pytest.mark.parametrize("M", range(1, 7))
def test_compact_matches_dense(K, M):
    p = GfdmParams(K, M, rolloff=0.5)
    proto = build_prototype(p)
    assert np.abs(modulation_matrix(p, proto).to_dense()
                  - modulation_matrix_dense(p, proto)).max() <= 1e-12


def test_subcarrier_spectrum_centered_at_kM():
    p = GfdmParams(4, 3, rolloff=0.5)
    A = modulation_matrix_dense(p, build_prototype(p))
    for k in range(p.K):
        spec = dft(A[:, k])
        support = np.flatnonzero(np.abs(spec) > 1e-12)
        assert len(support) <= 2 * p.M
        offsets = (support - k * p.M + p.N // 2) % p.N - p.N // 2
        assert offsets.min() >= -p.M + 1 and offsets.max() <= p.M


def test_modulate_basis_and_zero(rng):
    p = GfdmParams(4, 3, rolloff=0.5)
    proto = build_prototype(p)
    A = modulation_matrix(p, proto)
    e0 = np.zeros(p.N)
    e0[0] = 1
    np.testing.assert_allclose(modulate(A, e0), proto.g, atol=1e-14)
    assert np.array_equal(modulate(A, np.zeros(p.N)), np.zeros(p.N))


def test_modulate_matches_double_sum_and_dense(rng):
    p = GfdmParams(4, 3, rolloff=0.5)
    proto = build_prototype(p)
    d = crandn(rng, p.N)
    x = modulate(modulation_matrix(p, proto), d)
    assert np.abs(x - gfdm_double_sum(d, proto.g, p.K, p.M)).max() <= 1e-12
    assert np.abs(x - modulation_matrix_dense(p, proto) @ d).max() <= 1e-12


def test_modulate_dimension_mismatch():
    p = GfdmParams(4, 3)
    A = modulation_matrix(p, build_prototype(p))
    with pytest.raises(ValueError):
        modulate(A, np.zeros(11))


# -- channel -----------------------------------------------------------------

def test_identity_channel(rng):
    x = crandn(rng, 12)
    np.testing.assert_allclose(apply_channel(Channel([1.0], 12), x, np.zeros(12)), x, atol=1e-15)


def test_unit_delay_channel(rng):
    x = crandn(rng, 12)
    np.testing.assert_allclose(apply_channel(Channel([0, 1.0], 12), x), np.roll(x, 1), atol=1e-14)


def test_channel_matches_dense_circulant(rng):
    h = crandn(rng, 4)
    x, w = crandn(rng, 12), crandn(rng, 12)
    ch = Channel(h, 12)
    y = apply_channel(ch, x, w)
    assert np.abs(y - (circulant_dense(h, 12) @ x + w)).max() <= 1e-12
    np.testing.assert_allclose(ch.dense(), circulant_dense(h, 12))


def test_hdiag_is_diagonal_of_conjugated_channel(rng):
    from oracles import unitary_dft_matrix
    h = crandn(rng, 5)
    ch = Channel(h, 16)
    F = unitary_dft_matrix(16)
    D = F @ circulant_dense(h, 16) @ F.conj().T
    np.testing.assert_allclose(np.diag(D), ch.hdiag, atol=1e-12)
    assert np.abs(D - np.diag(np.diag(D))).max() <= 1e-12


def test_channel_is_linear(rng):
    ch = random_channel(24, 6, seed=3)
    x1, x2 = crandn(rng, 24), crandn(rng, 24)
    lhs = apply_channel(ch, x1 + x2)
    rhs = apply_channel(ch, x1) + apply_channel(ch, x2)
    assert np.abs(lhs - rhs).max() <= 1e-12


def test_channel_on_columns(rng):
    ch = random_channel(12, 3, seed=1)
    X = crandn(rng, 12, 4)
    cols = np.stack([apply_channel(ch, X[:, c]) for c in range(4)], axis=1)
    np.testing.assert_allclose(apply_channel(ch, X), cols, atol=1e-14)


def test_channel_validation(rng):
    with pytest.raises(ValueError):
        Channel(np.ones(13), 12)
    with pytest.raises(ValueError):
        apply_channel(Channel([1.0], 12), np.ones(11))
    with pytest.raises(ValueError):
        apply_channel(Channel([1.0], 12), np.ones(12), np.ones(11))


def test_random_channel_is_seeded_and_capped():
    a, b = random_channel(12, 4, seed=9), random_channel(12, 4, seed=9)
    assert np.array_equal(a.h, b.h)
    assert len(random_channel(12, 16, seed=0).h) == 12


# -- noise and symbols -------------------------------------------------------

def test_zero_noise():
    assert np.array_equal(draw_noise(GfdmParams(4, 3, 0.0), seed=1), np.zeros(12))


def test_noise_variance():
    w = draw_noise(GfdmParams(4, 3, 1.0), seed=5, size=100_000)
    assert abs(np.mean(np.abs(w) ** 2) - 1) <= 0.02
    assert abs(np.var(w.real) - 0.5) <= 0.02 and abs(np.var(w.imag) - 0.5) <= 0.02


def test_draws_are_deterministic():
    p = GfdmParams(4, 3, 0.5)
    assert np.array_equal(draw_noise(p, seed=2), draw_noise(p, seed=2))
    assert np.array_equal(draw_symbols(p, seed=2), draw_symbols(p, seed=2))


def test_qpsk_unit_magnitude():
    d = draw_symbols(GfdmParams(4, 3), seed=0, size=1000)
    assert np.all(np.abs(d) == np.abs(QPSK[0]))
    np.testing.assert_allclose(np.abs(QPSK), 1, rtol=1e-15)


def test_symbol_covariance_is_identity():
    p = GfdmParams(4, 3)
    D = draw_symbols(p, seed=11, size=(20_000, p.N))
    C = D.T @ D.conj() / D.shape[0]
    assert np.abs(np.diag(C) - 1).max() <= 0.05
    assert np.abs(C - np.diag(np.diag(C))).max() <= 0.05


def test_custom_constellation():
    pts = np.array([1.0, -1.0])
    d = draw_symbols(GfdmParams(4, 3), constellation=pts, seed=0)
    assert set(np.unique(d.real)) <= {1.0, -1.0}
