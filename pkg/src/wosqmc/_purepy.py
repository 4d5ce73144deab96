"""Pure-numpy implementations of the hot kernels.

The compiled extension ``wosqmc._kernels`` provides the same functions with
identical numerics; :mod:`wosqmc.backend` picks whichever is available.
Every function here must stay bit-for-bit compatible with the Cython one,
so formulas are written in the same operation order.
"""

import numpy as np

# primitive kind codes shared with the compiled kernel
KIND_CIRCLE = 0
KIND_ARC = 1
KIND_SEGMENT = 2

NPARAMS = 12


def sobol_fill(vectors, n):
    """Digits of the first ``n`` points of a digital net, natural order.

    vectors: uint64 array (s, nbits); column b is the direction vector for
    input bit b (bit 0 = least significant bit of the point index).
    Returns uint64 array (n, s).
    """
    vectors = np.asarray(vectors, dtype=np.uint64)
    s, nbits = vectors.shape
    idx = np.arange(n, dtype=np.uint64)
    out = np.zeros((n, s), dtype=np.uint64)
    for b in range(nbits):
        mask = ((idx >> np.uint64(b)) & np.uint64(1)) != 0
        if mask.any():
            out[mask] ^= vectors[:, b]
    return out


def hilbert_encode(cells, p):
    """Hilbert keys of integer cells, Skilling's transpose algorithm.

    cells: uint64 array (n, d) with entries in [0, 2^p). Returns (n,) uint64.
    """
    x = np.array(cells, dtype=np.uint64, copy=True)
    n, d = x.shape
    one = np.uint64(1)
    # inverse undo
    q = one << np.uint64(p - 1)
    while q > one:
        pmask = q - one
        for i in range(d):
            hi = (x[:, i] & q) != 0
            t = np.where(hi, np.uint64(0), (x[:, 0] ^ x[:, i]) & pmask)
            x[:, 0] ^= np.where(hi, pmask, t)
            x[:, i] ^= t
        q >>= one
    # Gray encode
    for i in range(1, d):
        x[:, i] ^= x[:, i - 1]
    t = np.zeros(n, dtype=np.uint64)
    q = one << np.uint64(p - 1)
    while q > one:
        t ^= np.where((x[:, d - 1] & q) != 0, q - one, np.uint64(0))
        q >>= one
    for i in range(d):
        x[:, i] ^= t
    # interleave transpose bits: x[0] carries the most significant bit of
    # each d-bit group
    key = np.zeros(n, dtype=np.uint64)
    for b in range(p):
        for i in range(d):
            bit = (x[:, i] >> np.uint64(b)) & one
            key |= bit << np.uint64(b * d + (d - 1 - i))
    return key


def hilbert_decode(keys, p, d):
    """Inverse of :func:`hilbert_encode`. Returns uint64 cells (n, d)."""
    keys = np.asarray(keys, dtype=np.uint64)
    n = keys.shape[0]
    one = np.uint64(1)
    x = np.zeros((n, d), dtype=np.uint64)
    for b in range(p):
        for i in range(d):
            bit = (keys >> np.uint64(b * d + (d - 1 - i))) & one
            x[:, i] |= bit << np.uint64(b)
    # Gray decode
    t = x[:, d - 1] >> one
    for i in range(d - 1, 0, -1):
        x[:, i] ^= x[:, i - 1]
    x[:, 0] ^= t
    # undo excess work
    q = np.uint64(2)
    top = one << np.uint64(p)
    while q != top:
        pmask = q - one
        for i in range(d - 1, -1, -1):
            hi = (x[:, i] & q) != 0
            t = np.where(hi, np.uint64(0), (x[:, 0] ^ x[:, i]) & pmask)
            x[:, 0] ^= np.where(hi, pmask, t)
            x[:, i] ^= t
        q <<= one
    return x


def nearest_primitive(points, kinds, params):
    """Distance to, and index of, the closest boundary primitive.

    points: (n, 2) float64. kinds: (m,) int32 codes. params: (m, NPARAMS)
    float64, layout per kind:
      circle:  cx cy r
      arc:     cx cy r c0 s0 cd sd wide e0x e0y e1x e1y
               (c0,s0 rotate the arc start to angle 0; (cd,sd) is the arc
               span direction; wide=1 when the span exceeds pi; e* are the
               endpoints)
      segment: ax ay vx vy inv_len2
    Returns (dist (n,), idx (n,) int64). Ties pick the lowest index.
    """
    points = np.asarray(points, dtype=np.float64)
    n = points.shape[0]
    m = kinds.shape[0]
    px = points[:, 0]
    py = points[:, 1]
    dists = np.empty((m, n), dtype=np.float64)
    for j in range(m):
        k = kinds[j]
        pr = params[j]
        if k == KIND_CIRCLE:
            dx = px - pr[0]
            dy = py - pr[1]
            dists[j] = np.abs(np.sqrt(dx * dx + dy * dy) - pr[2])
        elif k == KIND_ARC:
            dx = px - pr[0]
            dy = py - pr[1]
            ux = pr[3] * dx + pr[4] * dy
            uy = pr[3] * dy - pr[4] * dx
            cross = pr[5] * uy - pr[6] * ux
            if pr[7] != 0.0:
                inside = (uy >= 0.0) | (cross <= 0.0)
            else:
                inside = (uy >= 0.0) & (cross <= 0.0)
            don = np.abs(np.sqrt(dx * dx + dy * dy) - pr[2])
            d0x = px - pr[8]
            d0y = py - pr[9]
            d1x = px - pr[10]
            d1y = py - pr[11]
            dend = np.minimum(np.sqrt(d0x * d0x + d0y * d0y),
                              np.sqrt(d1x * d1x + d1y * d1y))
            dists[j] = np.where(inside, don, dend)
        else:
            dx = px - pr[0]
            dy = py - pr[1]
            t = (dx * pr[2] + dy * pr[3]) * pr[4]
            t = np.minimum(np.maximum(t, 0.0), 1.0)
            ex = dx - t * pr[2]
            ey = dy - t * pr[3]
            dists[j] = np.sqrt(ex * ex + ey * ey)
    idx = np.argmin(dists, axis=0)
    dist = dists[idx, np.arange(n)]
    return dist, idx.astype(np.int64)


HAVE_COMPILED = False
