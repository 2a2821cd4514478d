import numpy as np
import pytest

from gfdm_lmmse.textio import (
    dump_params,
    dumps_matrix,
    format_complex,
    load_filter_blocks,
    load_matrix,
    load_params,
    load_vector,
    loads_matrix,
    parse_params,
    save_filter_blocks,
    save_matrix,
)
from oracles import crandn


def test_token_format():
    assert format_complex(1 + 2j) == "1.0+2.0j"
    assert format_complex(1 - 2j) == "1.0-2.0j"
    assert complex(format_complex(complex(0.1, -0.0))) == complex(0.1, -0.0)


def test_matrix_round_trip_is_exact(rng, tmp_path):
    A = crandn(rng, 3, 5)
    text = dumps_matrix(A)
    assert text.splitlines()[0] == "3 5"
    assert np.array_equal(loads_matrix(text), A)
    save_matrix(tmp_path / "a.txt", A)
    assert np.array_equal(load_matrix(tmp_path / "a.txt"), A)


def test_vector(tmp_path, rng):
    h = crandn(rng, 4)
    save_matrix(tmp_path / "h.txt", h)
    assert np.array_equal(load_vector(tmp_path / "h.txt"), h)
    save_matrix(tmp_path / "m.txt", crandn(rng, 2, 2))
    with pytest.raises(ValueError):
        load_vector(tmp_path / "m.txt")


def test_matrix_errors():
    with pytest.raises(ValueError):
        loads_matrix("2 2\n1+0j 2+0j 3+0j")
    with pytest.raises(ValueError):
        loads_matrix("")


def test_params_file(tmp_path):
    text = "# system\nK=8\nM = 4\nalpha=0.5  # rolloff\nsigma_n2=0.1\nchannel_len=4\nseed=7\n"
    values = parse_params(text)
    assert values == {"K": 8, "M": 4, "alpha": 0.5, "sigma_n2": 0.1, "channel_len": 4, "seed": 7}
    (tmp_path / "p.cfg").write_text(dump_params(values))
    assert load_params(tmp_path / "p.cfg") == values


@pytest.mark.parametrize("text", ["K 8", "Q=1", "K=eight"])
def test_params_errors(text):
    with pytest.raises(ValueError):
        parse_params(text)


def test_filter_blocks_round_trip(tmp_path, rng):
    blocks = crandn(rng, 3, 4, 4)
    h = crandn(rng, 2)
    manifest = save_filter_blocks(tmp_path, blocks, 0.1, h)
    assert manifest["files"] == ["dw_000.txt", "dw_001.txt", "dw_002.txt"]
    loaded, m2 = load_filter_blocks(tmp_path)
    assert np.array_equal(loaded, blocks)
    assert m2 == manifest
    assert (m2["K"], m2["M"], m2["sigma_n2"]) == (4, 3, 0.1)
    assert len(m2["channel_sha256"]) == 64
