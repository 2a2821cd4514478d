"""Plain-text formats: dense complex matrices, parameter files, filter exports.

Matrix files start with a ``rows cols`` header followed by one row per line
of whitespace-separated ``re+imj`` tokens.
"""

import hashlib
import json
import math
from pathlib import Path

import numpy as np


def format_complex(z):
    re, im = float(z.real), float(z.imag)
    im_s = repr(im)
    if not im_s.startswith("-"):
        im_s = "+" + im_s
    return f"{re!r}{im_s}j"


def dumps_matrix(A):
    A = np.asarray(A, dtype=complex)
    if A.ndim == 1:
        A = A[:, None]
    if A.ndim != 2:
        raise ValueError("only vectors and matrices are serializable")
    lines = [f"{A.shape[0]} {A.shape[1]}"]
    lines += [" ".join(format_complex(z) for z in row) for row in A]
    return "\n".join(lines) + "\n"


def loads_matrix(text):
    tokens = text.split()
    if len(tokens) < 2:
        raise ValueError("missing 'rows cols' header")
    rows, cols = int(tokens[0]), int(tokens[1])
    body = tokens[2:]
    if len(body) != rows * cols:
        raise ValueError(f"expected {rows * cols} entries, found {len(body)}")
    return np.array([complex(t) for t in body], dtype=complex).reshape(rows, cols)


def save_matrix(path, A):
    Path(path).write_text(dumps_matrix(A))


def load_matrix(path):
    return loads_matrix(Path(path).read_text())


def load_vector(path):
    A = load_matrix(path)
    if 1 not in A.shape:
        raise ValueError(f"{path} holds a {A.shape} matrix, not a vector")
    return A.ravel()


PARAM_KEYS = {
    "K": int,
    "M": int,
    "alpha": float,
    "sigma_n2": float,
    "channel_len": int,
    "seed": int,
}


def parse_params(text):
    """Parse ``key=value`` lines; ``#`` starts a comment."""
    out = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ValueError(f"line {lineno}: expected key=value, got {raw!r}")
        key, value = (s.strip() for s in line.split("=", 1))
        if key not in PARAM_KEYS:
            raise ValueError(f"line {lineno}: unknown key {key!r}")
        out[key] = PARAM_KEYS[key](value)
    return out


def load_params(path):
    return parse_params(Path(path).read_text())


def dump_params(values):
    return "".join(f"{k}={values[k]}\n" for k in PARAM_KEYS if k in values)


def channel_hash(h):
    return hashlib.sha256(np.ascontiguousarray(h, dtype=complex).tobytes()).hexdigest()


def save_filter_blocks(directory, blocks, sigma_n2, h):
    """Write eigen-blocks D_{W,u} one file per u, plus manifest.json."""
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    blocks = np.asarray(blocks)
    M, K = blocks.shape[0], blocks.shape[1]
    width = max(3, len(str(M - 1)))
    files = []
    for u, blk in enumerate(blocks):
        name = f"dw_{u:0{width}d}.txt"
        save_matrix(directory / name, blk)
        files.append(name)
    manifest = {
        "K": K,
        "M": M,
        "sigma_n2": sigma_n2 if math.isfinite(sigma_n2) else repr(sigma_n2),
        "channel_sha256": channel_hash(h),
        "files": files,
    }
    (directory / "manifest.json").write_text(json.dumps(manifest, indent=2) + "\n")
    return manifest


def load_filter_blocks(directory):
    directory = Path(directory)
    manifest = json.loads((directory / "manifest.json").read_text())
    blocks = np.stack([load_matrix(directory / f) for f in manifest["files"]])
    if blocks.shape != (manifest["M"], manifest["K"], manifest["K"]):
        raise ValueError(f"block files have shape {blocks.shape}, manifest says "
                         f"M={manifest['M']}, K={manifest['K']}")
    return blocks, manifest
