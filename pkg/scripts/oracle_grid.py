"""Fast filter against the direct Cholesky filter over a parameter grid.

    python scripts/oracle_grid.py
"""

import itertools
import time

import numpy as np

from gfdm_lmmse import (
    GfdmParams,
    build_prototype,
    compute_fast_filter,
    lmmse_direct,
    random_channel,
)
from gfdm_lmmse.model import modulation_matrix_dense
from gfdm_lmmse.verification import rel_err_block_circulant


def main():
    t0 = time.perf_counter()
    worst = {}
    grid = itertools.product((4, 8, 16), (3, 4, 5), (0.0, 0.5), (1, 4, 16), (1e-3, 0.1, 1.0))
    for i, (K, M, alpha, L, s2) in enumerate(grid):
        p = GfdmParams(K, M, s2, alpha)
        proto = build_prototype(p)
        ch = random_channel(p.N, L, seed=i)
        W = lmmse_direct(modulation_matrix_dense(p, proto), ch, s2).W
        err = rel_err_block_circulant(compute_fast_filter(p, proto, ch).ws, W)
        worst[(K, M)] = max(worst.get((K, M), 0.0), err)
    for (K, M), err in sorted(worst.items()):
        print(f"K={K:<3} M={M}  worst rel. error {err:.2e}")
    print(f"overall {max(worst.values()):.2e}, {time.perf_counter() - t0:.2f} s")
    return 0 if max(worst.values()) <= 1e-9 else 1


if __name__ == "__main__":
    raise SystemExit(main())
