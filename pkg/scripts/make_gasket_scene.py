#!/usr/bin/env python3
"""Regenerate the vendored cylinder-head gasket scene file.

Chamfered rectangular outline plus 50 holes: 4 cylinder bores, 24 coolant
holes, 12 oil holes and 10 oil-return holes, each labeled with its region
temperature. The layout is validated (no overlaps, margins inside the
outline, the evaluation point interior) before freezing to JSON.
"""

import math
import os
import sys

import numpy as np

sys.path.insert(0, os.path.join(os.path.dirname(__file__), "..", "src"))

from wosqmc.scenes import Circle, Polyline, Scene  # noqa: E402

OUT = os.path.join(os.path.dirname(__file__), "..", "src", "wosqmc", "data",
                   "scenes", "gasket.json")

TEMPS = {"coolant": 90.0, "oil_return": 110.0, "outer": 120.0,
         "oil": 130.0, "bore": 160.0}
Z_STAR = (0.240999, 0.3)

OUTLINE = [(-0.30, 0.0), (0.56, 0.0), (0.61, 0.05), (0.61, 0.37),
           (0.56, 0.42), (-0.30, 0.42), (-0.35, 0.37), (-0.35, 0.05)]

BORE_X = [-0.197, 0.022, 0.241, 0.460]
BORE_Y = 0.19
BORE_R = 0.082


def build_holes():
    holes = []
    for x in BORE_X:
        holes.append(((x, BORE_Y), BORE_R, "bore"))
    # coolant ring around each bore plus a top row
    ring_r, cool_r = 0.116, 0.016
    for x in BORE_X:
        for ang in (55.0, 125.0, 235.0, 305.0):
            a = math.radians(ang)
            holes.append(((x + ring_r * math.cos(a), BORE_Y + ring_r * math.sin(a)),
                          cool_r, "coolant"))
    for x in np.linspace(-0.26, 0.50, 8):
        holes.append(((float(x), 0.37), cool_r, "coolant"))
    # oil holes along the bottom edge
    for x in np.linspace(-0.26, 0.50, 12):
        holes.append(((float(x), 0.05), 0.014, "oil"))
    # oil return columns at both ends
    for x in (-0.315, 0.575):
        for y in np.linspace(0.09, 0.33, 5):
            holes.append(((x, float(y)), 0.02, "oil_return"))
    return holes


def validate(holes):
    margin = 0.010
    for i, (c1, r1, _) in enumerate(holes):
        for c2, r2, _ in holes[i + 1:]:
            gap = math.hypot(c1[0] - c2[0], c1[1] - c2[1]) - r1 - r2
            assert gap >= margin, "holes too close: %r %r gap=%g" % (c1, c2, gap)
    outline = Polyline(OUTLINE, True, "outer")
    for c, r, _ in holes:
        pts = np.array([c])
        d = ((outline.project(pts) - pts) ** 2).sum() ** 0.5
        assert d - r >= margin, "hole %r too close to outline" % (c,)
        assert _in_poly(c), "hole %r outside outline" % (c,)
    assert _in_poly(Z_STAR)
    dmin = min(math.hypot(Z_STAR[0] - c[0], Z_STAR[1] - c[1]) - r
               for c, r, _ in holes)
    assert dmin > 0.01, "evaluation point too close to a hole (%g)" % dmin
    print("z* clearance to nearest hole: %.4f" % dmin)


def _in_poly(p):
    x, y = p
    inside = False
    n = len(OUTLINE)
    for i in range(n):
        x1, y1 = OUTLINE[i]
        x2, y2 = OUTLINE[(i + 1) % n]
        if (y1 > y) != (y2 > y) and x < (x2 - x1) * (y - y1) / (y2 - y1) + x1:
            inside = not inside
    return inside


def main():
    holes = build_holes()
    assert len(holes) == 50, len(holes)
    validate(holes)
    prims = [Polyline(OUTLINE, True, "outer")]
    prims += [Circle(c, r, label) for c, r, label in holes]
    bv = {label: {"constant": t} for label, t in TEMPS.items()}
    scene = Scene("gasket", 2, [[-0.40, -0.05], [0.66, 0.47]], prims, bv,
                  default_start=Z_STAR, default_eps=1e-3,
                  topology="outline_minus_holes")
    scene.save(OUT)
    counts = {}
    for _, _, label in holes:
        counts[label] = counts.get(label, 0) + 1
    print("wrote %s; holes by label: %s" % (OUT, counts))


if __name__ == "__main__":
    main()
