"""Multiplication counts of the fast and direct designs over a K x M grid.

Writes the sweep CSV and prints the cDirect / cSparse ratio per point.

    python scripts/complexity_sweep.py --out sweep.csv
"""

import argparse

from gfdm_lmmse.bench import DEFAULT_GRID, emit_csv, parse_grid, run_sweep


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--grid", help='e.g. "8x4,16x8" (default: K 8..128, M 4..32)')
    ap.add_argument("--out", default="sweep.csv")
    ap.add_argument("--cap", type=int, default=1024, help="largest N checked against direct")
    ap.add_argument("--no-timing", action="store_true")
    args = ap.parse_args()

    grid = parse_grid(args.grid) if args.grid else DEFAULT_GRID
    records = run_sweep(grid, cap=args.cap, timing=not args.no_timing)
    emit_csv(records, args.out)

    print(f"{'K':>4} {'M':>3} {'N':>5} {'c_sparse':>12} {'c_direct':>12} {'ratio':>9} "
          f"{'measured':>10} {'filter_err':>10}")
    for r in records:
        if r.error:
            print(f"{r.K:>4} {r.M:>3} {r.N:>5}  {r.error}")
            continue
        err = "-" if r.filter_err is None else f"{r.filter_err:.1e}"
        print(f"{r.K:>4} {r.M:>3} {r.N:>5} {r.c_sparse:>12.4g} {r.c_direct:>12.4g} "
              f"{r.c_direct / r.c_sparse:>9.3g} {r.measured_mults:>10} {err:>10}")
    print(f"wrote {args.out}")


if __name__ == "__main__":
    main()
