"""Operation-count formulas, instrumented runs and the K/M sweep."""

import csv
import io
import math
import statistics
import time
from dataclasses import dataclass

from . import counting
from .counting import OpCounter
from .direct import lmmse_direct
from .fast import compute_fast_filter
from .model import GfdmParams, build_prototype, modulation_matrix_dense, random_channel
from .verification import rel_err_block_circulant

CSV_COLUMNS = ["K", "M", "N", "c_sparse", "c_direct", "measured_mults",
               "t_fast_ns", "t_direct_ns", "filter_err"]

DEFAULT_GRID = [(K, M) for K in (8, 16, 32, 64, 128) for M in (4, 8, 16, 32)]


def _ld(M):
    lg = math.log2(M)
    return int(lg) if lg.is_integer() else lg


def c_sparse_stages(K, M):
    """Per-stage multiplication counts (a)-(d) of the fast design."""
    return {
        counting.FREQ_GS: 2 * M * K,
        counting.TRIDIAGONAL: M * 3 * K * 4 * M,
        counting.SOLVE: M * (2 * K + 5 * K * K),
        counting.ZAK_RECON: K * K * M * _ld(M),
    }


def c_sparse(K, M):
    """2MK + M(12KM + 2K + 5K^2) + K^2 M ld M; exact integer when M is a power of two."""
    return sum(c_sparse_stages(K, M).values())


def c_sparse_closed(K, M):
    return K * K * (5 * M + M * _ld(M)) + K * (12 * M * M + 4 * M)


def c_direct(K, M):
    """N^3/3 Cholesky plus 2N^2 per right-hand side for N right-hand sides."""
    N = K * M
    return N ** 3 / 3 + N * 2 * N ** 2


@dataclass
class SweepRecord:
    K: int
    M: int
    N: int
    c_sparse: float = None
    c_direct: float = None
    measured_mults: int = None
    t_fast_ns: int = None
    t_direct_ns: int = None
    filter_err: float = None
    measured_direct_mults: int = None
    error: str = None


def _system(K, M, sigma_n2, rolloff, channel_len, seed):
    params = GfdmParams(K, M, sigma_n2, rolloff)
    proto = build_prototype(params)
    ch = random_channel(params.N, channel_len, seed)
    return params, proto, ch


def run_point(K, M, channel_seed=0, cap=1024, sigma_n2=0.1, rolloff=0.5, channel_len=4,
              timing=True):
    rec = SweepRecord(K, M, K * M)
    try:
        params, proto, ch = _system(K, M, sigma_n2, rolloff, channel_len, channel_seed)
        rec.c_sparse = c_sparse(K, M)
        rec.c_direct = c_direct(K, M)
        counter = OpCounter()
        t0 = time.perf_counter_ns()
        filt = compute_fast_filter(params, proto, ch, counter)
        t1 = time.perf_counter_ns()
        rec.measured_mults = counter.total
        if timing:
            rec.t_fast_ns = t1 - t0
        if params.N <= cap:
            A = modulation_matrix_dense(params, proto)
            dcount = OpCounter()
            t0 = time.perf_counter_ns()
            W = lmmse_direct(A, ch, sigma_n2, dcount).W
            t1 = time.perf_counter_ns()
            rec.measured_direct_mults = dcount.total
            if timing:
                rec.t_direct_ns = t1 - t0
            rec.filter_err = rel_err_block_circulant(filt.ws, W)
    except Exception as exc:  # one bad grid point must not end the sweep
        rec.error = f"{type(exc).__name__}: {exc}"
    return rec


def run_sweep(grid=DEFAULT_GRID, channel_seed=0, cap=1024, sigma_n2=0.1, rolloff=0.5,
              channel_len=4, timing=True):
    return [run_point(K, M, channel_seed, cap, sigma_n2, rolloff, channel_len, timing)
            for K, M in grid]


def _cell(v):
    if v is None:
        return ""
    if isinstance(v, float):
        return repr(v)
    return str(v)


def csv_rows(records):
    for r in records:
        row = {c: _cell(getattr(r, c)) for c in CSV_COLUMNS}
        if r.error is not None:
            row["filter_err"] = "error: " + r.error.replace("\n", " ")
        yield row


def emit_csv(records, path=None):
    """Write the sweep CSV to `path`; return the text when no path is given."""
    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=CSV_COLUMNS, lineterminator="\n")
    writer.writeheader()
    writer.writerows(csv_rows(records))
    text = buf.getvalue()
    if path is None:
        return text
    with open(path, "w", newline="") as fh:
        fh.write(text)
    return text


def parse_grid(spec):
    """'8x4,16x4' -> [(8, 4), (16, 4)]."""
    grid = []
    for item in spec.split(","):
        item = item.strip().lower()
        if not item:
            continue
        k, sep, m = item.partition("x")
        if not sep:
            raise ValueError(f"grid entry {item!r} is not of the form KxM")
        grid.append((int(k), int(m)))
    if not grid:
        raise ValueError("empty grid")
    return grid


def bench_point(K, M, sigma_n2=0.1, channel_len=4, repeats=5, seed=0, rolloff=0.5,
                direct=True):
    params, proto, ch = _system(K, M, sigma_n2, rolloff, channel_len, seed)
    counter = OpCounter()
    compute_fast_filter(params, proto, ch, counter)
    t_fast = []
    for _ in range(repeats):
        t0 = time.perf_counter_ns()
        compute_fast_filter(params, proto, ch)
        t_fast.append(time.perf_counter_ns() - t0)
    out = {
        "params": params,
        "counts": counter.as_dict(),
        "formula": c_sparse_stages(K, M),
        "c_sparse": c_sparse(K, M),
        "c_direct": c_direct(K, M),
        "t_fast_ns": statistics.median(t_fast),
    }
    if direct:
        A = modulation_matrix_dense(params, proto)
        dcount = OpCounter()
        lmmse_direct(A, ch, sigma_n2, dcount)
        t_direct = []
        for _ in range(repeats):
            t0 = time.perf_counter_ns()
            lmmse_direct(A, ch, sigma_n2)
            t_direct.append(time.perf_counter_ns() - t0)
        out["direct_counts"] = dcount.as_dict()
        out["t_direct_ns"] = statistics.median(t_direct)
    return out
