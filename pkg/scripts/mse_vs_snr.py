"""Symbol MSE of the LMMSE receiver against SNR, fast and direct side by side.

    python scripts/mse_vs_snr.py --k 16 --m 5 --blocks 200
"""

import argparse

import numpy as np

from gfdm_lmmse import (
    GfdmParams,
    apply_channel,
    build_prototype,
    compute_fast_filter,
    draw_noise,
    draw_symbols,
    equalize_direct,
    equalize_zak,
    lmmse_direct,
    modulate,
    modulation_matrix,
    random_channel,
)
from gfdm_lmmse.model import modulation_matrix_dense


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--k", type=int, default=16)
    ap.add_argument("--m", type=int, default=5)
    ap.add_argument("--alpha", type=float, default=0.5)
    ap.add_argument("--chan-len", type=int, default=8)
    ap.add_argument("--blocks", type=int, default=200)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()

    print("snr_db,mse_fast,mse_direct")
    for snr_db in range(0, 41, 5):
        s2 = 10 ** (-snr_db / 10)
        p = GfdmParams(args.k, args.m, s2, args.alpha)
        proto = build_prototype(p)
        ch = random_channel(p.N, args.chan_len, args.seed)
        A = modulation_matrix(p, proto)
        fast = compute_fast_filter(p, proto, ch)
        direct = lmmse_direct(modulation_matrix_dense(p, proto), ch, s2)
        rng = np.random.default_rng(args.seed)
        d = draw_symbols(p, seed=rng, size=(args.blocks, p.N)).T
        y = apply_channel(ch, modulate(A, d), draw_noise(p, seed=rng, size=(args.blocks, p.N)).T)
        mse_f = np.mean(np.abs(equalize_zak(fast, y) - d) ** 2)
        mse_d = np.mean(np.abs(equalize_direct(direct, y) - d) ** 2)
        print(f"{snr_db},{mse_f:.6e},{mse_d:.6e}")


if __name__ == "__main__":
    main()
