"""Hilbert curve keys in 2 and 3 dimensions.

The discrete curve at resolution ``p`` bits per axis gives a bijection
between cells and keys; ``sort_key`` maps a point of the unit cube to the
center of its cell's key interval, which is the scalar ordering used to
sort walker ensembles.
"""

from dataclasses import dataclass

import numpy as np

from .backend import hilbert_decode, hilbert_encode

DEFAULT_BITS = {2: 16, 3: 10}


@dataclass(frozen=True)
class HilbertConfig:
    d: int
    p: int
    orientation: str = "skilling-xy"

    def __post_init__(self):
        if self.d not in (2, 3):
            raise ValueError("only d = 2 or 3 supported")
        if self.p < 1 or self.d * self.p > 62:
            raise ValueError("need 1 <= p and d*p <= 62")


def default_config(d):
    return HilbertConfig(d, DEFAULT_BITS[d])


def encode(cells, cfg):
    """Keys of integer cells in [0, 2^p)^d; consecutive keys are adjacent."""
    cells = np.atleast_2d(np.asarray(cells))
    if cells.min() < 0 or cells.max() >= (1 << cfg.p):
        raise ValueError("cell coordinate out of range for p=%d" % cfg.p)
    return hilbert_encode(cells.astype(np.uint64), cfg.p)


def decode(keys, cfg):
    """Cells of integer keys in [0, 2^(dp)); inverse of :func:`encode`."""
    keys = np.atleast_1d(np.asarray(keys))
    if keys.min() < 0 or keys.max() >= (1 << (cfg.d * cfg.p)):
        raise ValueError("key out of range for d=%d p=%d" % (cfg.d, cfg.p))
    return hilbert_decode(keys.astype(np.uint64), cfg.p, cfg.d)


def sort_key(z, cfg):
    """Pseudo-inverse h(z) = (encode(cell of z) + 1/2) / 2^(dp) in [0,1).

    Coordinates must lie in [0,1]; 1.0 clamps into the top cell.
    """
    z = np.atleast_2d(np.asarray(z, dtype=np.float64))
    if not np.isfinite(z).all():
        raise ValueError("non-finite coordinate passed to sort_key")
    scale = float(1 << cfg.p)
    cells = np.floor(z * scale).astype(np.int64)
    np.clip(cells, 0, (1 << cfg.p) - 1, out=cells)
    keys = hilbert_encode(cells.astype(np.uint64), cfg.p)
    return (keys.astype(np.float64) + 0.5) * 2.0 ** -(cfg.d * cfg.p)


def curve_point(t, cfg):
    """Center of the cell visited at curve position t in [0,1)."""
    t = np.atleast_1d(np.asarray(t, dtype=np.float64))
    nk = 1 << (cfg.d * cfg.p)
    keys = np.floor(t * nk).astype(np.int64)
    np.clip(keys, 0, nk - 1, out=keys)
    cells = hilbert_decode(keys.astype(np.uint64), cfg.p, cfg.d)
    return (cells.astype(np.float64) + 0.5) / float(1 << cfg.p)
