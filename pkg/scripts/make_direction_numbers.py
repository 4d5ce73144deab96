#!/usr/bin/env python3
"""Regenerate the vendored Sobol' direction-number file.

Extracts the first 256 dimensions of the Joe-Kuo "new-joe-kuo-6" table
from scipy's packaged copy and writes them in the standard text format,
one line per dimension: ``d s a m_1 ... m_s``.
"""

import os

import numpy as np
import scipy.stats

OUT = os.path.join(os.path.dirname(__file__), "..", "src", "wosqmc", "data",
                   "new-joe-kuo-6.256.txt")
NDIM = 256


def main():
    path = os.path.join(os.path.dirname(scipy.stats.__file__),
                        "_sobol_direction_numbers.npz")
    data = np.load(path)
    poly = data["poly"]
    vinit = data["vinit"]
    lines = ["d       s       a       m_i"]
    for d in range(2, NDIM + 1):
        p = int(poly[d - 1])
        s = p.bit_length() - 1
        a = (p ^ (1 << s) ^ 1) >> 1
        m = [int(v) for v in vinit[d - 1][:s]]
        assert all(mj % 2 == 1 and 0 < mj < (1 << (j + 1))
                   for j, mj in enumerate(m)), (d, m)
        lines.append("%d %d %d %s" % (d, s, a, " ".join(str(v) for v in m)))
    with open(OUT, "w") as fh:
        fh.write("\n".join(lines) + "\n")
    print("wrote %s (%d dimensions)" % (OUT, NDIM))


if __name__ == "__main__":
    main()
