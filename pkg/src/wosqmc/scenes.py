"""Domains for the Dirichlet problems: boundary primitives with exact
distance/projection, boundary data, sources, and the five built-in scenes
(unit disk, unit ball, Pac-Man, dumbbell, gasket).

A scene can be exported to and rebuilt from a JSON document; see
``Scene.to_dict`` for the schema.
"""

import json
import math
import os

import numpy as np

from .backend import KIND_ARC, KIND_CIRCLE, KIND_SEGMENT, NPARAMS, nearest_primitive

DATA_DIR = os.path.join(os.path.dirname(__file__), "data")
GASKET_FILE = os.path.join(DATA_DIR, "scenes", "gasket.json")

TWO_PI = 2.0 * math.pi


# ---------------------------------------------------------------------------
# named boundary/source/solution formulas (referenced from scene files)

def _r2(p):
    return p[:, 0] ** 2 + p[:, 1] ** 2


def _disk_potential(p):
    return 0.5 * np.log((p[:, 0] - 2.0) ** 2 + p[:, 1] ** 2)


def _ball_potential(p):
    return ((p[:, 0] - 2.0) ** 2 + p[:, 1] ** 2 + p[:, 2] ** 2) ** -0.5


def _pacman_angle(p):
    # angle in the branch [-3*pi/2, 0] used by the Pac-Man formulas
    phi = np.arctan2(p[:, 1], p[:, 0])
    return np.where(phi > 0.0, phi - TWO_PI, phi)


def _pacman_solution(p):
    r = np.sqrt(_r2(p))
    return r ** (1.0 / 3.0) * np.sin(_pacman_angle(p) / 3.0) + np.exp(-r * r / 2.0)


def _pacman_flat_edge(p):
    return np.exp(-_r2(p) / 2.0)


def _pacman_vertical_edge(p):
    r = np.sqrt(_r2(p))
    return -r ** (1.0 / 3.0) + np.exp(-r * r / 2.0)


def _pacman_rim(p):
    return np.sin(_pacman_angle(p) / 3.0) + math.exp(-0.5)


def _pacman_source(p):
    r2 = _r2(p)
    return -(2.0 - r2) * np.exp(-r2 / 2.0)


FORMULAS = {
    "disk_potential": _disk_potential,
    "ball_potential": _ball_potential,
    "pacman_solution": _pacman_solution,
    "pacman_flat_edge": _pacman_flat_edge,
    "pacman_vertical_edge": _pacman_vertical_edge,
    "pacman_rim": _pacman_rim,
    "pacman_source": _pacman_source,
}


def _evaluate(spec, p):
    if "constant" in spec:
        return np.full(p.shape[0], float(spec["constant"]))
    return FORMULAS[spec["formula"]](p)


# ---------------------------------------------------------------------------
# primitives

class Primitive:
    """One boundary piece; subclasses fill the kernel parameter row."""

    kind_name = None

    def __init__(self, label):
        self.label = label

    def to_dict(self):
        return {"kind": self.kind_name, "params": self._params_dict(),
                "label": self.label}


class Circle(Primitive):
    kind_name = "circle"

    def __init__(self, center, radius, label):
        super().__init__(label)
        self.center = np.asarray(center, dtype=float)
        self.radius = float(radius)

    def _params_dict(self):
        return {"center": list(self.center), "radius": self.radius}

    def kernel_rows(self):
        row = np.zeros(NPARAMS)
        row[:2] = self.center
        row[2] = self.radius
        return [(KIND_CIRCLE, row)]

    def length(self):
        return TWO_PI * self.radius

    def sample(self, m):
        t = (np.arange(m) + 0.5) / m * TWO_PI
        return self.center + self.radius * np.column_stack([np.cos(t), np.sin(t)])

    def project(self, p):
        u = p - self.center
        nrm = np.sqrt((u * u).sum(axis=1))
        u = np.where(nrm[:, None] > 0.0, u / np.maximum(nrm, 1e-300)[:, None],
                     np.array([1.0, 0.0]))
        return self.center + self.radius * u


class Arc(Primitive):
    """Circular arc spanning angles [a0, a1] with 0 < a1 - a0 < 2*pi."""

    kind_name = "arc"

    def __init__(self, center, radius, a0, a1, label):
        super().__init__(label)
        if not a1 > a0 or a1 - a0 >= TWO_PI:
            raise ValueError("arc needs 0 < a1 - a0 < 2*pi")
        self.center = np.asarray(center, dtype=float)
        self.radius = float(radius)
        self.a0 = float(a0)
        self.a1 = float(a1)

    def _params_dict(self):
        return {"center": list(self.center), "radius": self.radius,
                "angles": [self.a0, self.a1]}

    def kernel_rows(self):
        span = self.a1 - self.a0
        row = np.zeros(NPARAMS)
        row[:2] = self.center
        row[2] = self.radius
        row[3] = math.cos(self.a0)
        row[4] = math.sin(self.a0)
        row[5] = math.cos(span)
        row[6] = math.sin(span)
        row[7] = 1.0 if span > math.pi else 0.0
        row[8:10] = self._endpoint(self.a0)
        row[10:12] = self._endpoint(self.a1)
        return [(KIND_ARC, row)]

    def _endpoint(self, a):
        return self.center + self.radius * np.array([math.cos(a), math.sin(a)])

    def length(self):
        return self.radius * (self.a1 - self.a0)

    def sample(self, m):
        t = self.a0 + (np.arange(m) + 0.5) / m * (self.a1 - self.a0)
        return self.center + self.radius * np.column_stack([np.cos(t), np.sin(t)])

    def project(self, p):
        u = p - self.center
        phi = np.arctan2(u[:, 1], u[:, 0])
        span = self.a1 - self.a0
        rel = np.mod(phi - self.a0, TWO_PI)
        on_arc = rel <= span
        nrm = np.sqrt((u * u).sum(axis=1))
        safe = np.maximum(nrm, 1e-300)
        radial = self.center + self.radius * u / safe[:, None]
        radial[nrm == 0.0] = self._endpoint(self.a0)
        e0 = self._endpoint(self.a0)
        e1 = self._endpoint(self.a1)
        d0 = ((p - e0) ** 2).sum(axis=1)
        d1 = ((p - e1) ** 2).sum(axis=1)
        ends = np.where(d0[:, None] <= d1[:, None], e0, e1)
        return np.where(on_arc[:, None], radial, ends)


class Segment(Primitive):
    kind_name = "segment"

    def __init__(self, a, b, label):
        super().__init__(label)
        self.a = np.asarray(a, dtype=float)
        self.b = np.asarray(b, dtype=float)
        if not (self.a != self.b).any():
            raise ValueError("segment endpoints must differ")

    def _params_dict(self):
        return {"a": list(self.a), "b": list(self.b)}

    def kernel_rows(self):
        v = self.b - self.a
        row = np.zeros(NPARAMS)
        row[:2] = self.a
        row[2:4] = v
        row[4] = 1.0 / float(v @ v)
        return [(KIND_SEGMENT, row)]

    def length(self):
        return float(np.sqrt(((self.b - self.a) ** 2).sum()))

    def sample(self, m):
        t = (np.arange(m) + 0.5) / m
        return self.a + t[:, None] * (self.b - self.a)

    def project(self, p):
        v = self.b - self.a
        t = ((p - self.a) @ v) / float(v @ v)
        t = np.clip(t, 0.0, 1.0)
        return self.a + t[:, None] * v


class Polyline(Primitive):
    """Chain of segments; ``closed`` joins the last vertex to the first."""

    kind_name = "polyline"

    def __init__(self, vertices, closed, label):
        super().__init__(label)
        self.vertices = np.asarray(vertices, dtype=float)
        self.closed = bool(closed)
        if self.vertices.shape[0] < 2:
            raise ValueError("polyline needs at least two vertices")

    def _params_dict(self):
        return {"vertices": self.vertices.tolist(), "closed": self.closed}

    def _edges(self):
        v = self.vertices
        pairs = list(zip(v[:-1], v[1:]))
        if self.closed:
            pairs.append((v[-1], v[0]))
        return pairs

    def kernel_rows(self):
        rows = []
        for a, b in self._edges():
            rows.extend(Segment(a, b, self.label).kernel_rows())
        return rows

    def length(self):
        return sum(float(np.sqrt(((b - a) ** 2).sum())) for a, b in self._edges())

    def sample(self, m):
        edges = self._edges()
        lens = np.array([float(np.sqrt(((b - a) ** 2).sum())) for a, b in edges])
        counts = np.maximum((m * lens / lens.sum()).astype(int), 1)
        return np.vstack([Segment(a, b, self.label).sample(c)
                          for (a, b), c in zip(edges, counts)])

    def project(self, p):
        best = None
        bestd = None
        for a, b in self._edges():
            proj = Segment(a, b, self.label).project(p)
            d = ((p - proj) ** 2).sum(axis=1)
            if best is None:
                best, bestd = proj, d
            else:
                take = d < bestd
                best = np.where(take[:, None], proj, best)
                bestd = np.where(take, d, bestd)
        return best


class Sphere(Primitive):
    """Sphere boundary of a 3-D ball; the only 3-D primitive needed."""

    kind_name = "sphere"

    def __init__(self, center, radius, label):
        super().__init__(label)
        self.center = np.asarray(center, dtype=float)
        self.radius = float(radius)

    def _params_dict(self):
        return {"center": list(self.center), "radius": self.radius}

    def length(self):
        return 4.0 * math.pi * self.radius ** 2

    def sample(self, m):
        rng = np.random.default_rng(12345)
        u = rng.normal(size=(m, 3))
        u /= np.sqrt((u * u).sum(axis=1))[:, None]
        return self.center + self.radius * u

    def distance(self, p):
        u = p - self.center
        return np.abs(np.sqrt((u * u).sum(axis=1)) - self.radius)

    def project(self, p):
        u = p - self.center
        nrm = np.sqrt((u * u).sum(axis=1))
        u = np.where(nrm[:, None] > 0.0, u / np.maximum(nrm, 1e-300)[:, None],
                     np.array([1.0, 0.0, 0.0]))
        return self.center + self.radius * u


_PRIM_KINDS = {c.kind_name: c for c in (Circle, Arc, Segment, Polyline, Sphere)}


def _primitive_from_dict(d):
    kind, prm, label = d["kind"], d["params"], d["label"]
    if kind == "circle":
        return Circle(prm["center"], prm["radius"], label)
    if kind == "arc":
        return Arc(prm["center"], prm["radius"], prm["angles"][0],
                   prm["angles"][1], label)
    if kind == "segment":
        return Segment(prm["a"], prm["b"], label)
    if kind == "polyline":
        return Polyline(prm["vertices"], prm["closed"], label)
    if kind == "sphere":
        return Sphere(prm["center"], prm["radius"], label)
    raise ValueError("unknown primitive kind %r" % kind)


# ---------------------------------------------------------------------------
# scenes

class Scene:
    """A bounded domain given by boundary primitives plus problem data.

    ``boundary_values`` maps primitive labels to ``{"constant": v}`` or
    ``{"formula": name}``; ``source`` is None or such a spec;
    ``source_mode`` is ``none``, ``general`` (sample the ball each step) or
    ``shortcut`` (constant source folded into r^2/2 increments);
    ``exact_solution`` optionally names a closed form valid in the domain.
    """

    def __init__(self, name, dimension, bbox, primitives, boundary_values,
                 source=None, source_mode=None, exact_solution=None,
                 default_start=None, default_eps=1e-4, topology=None,
                 contains=None):
        self.name = name
        self.d = int(dimension)
        self.bbox_lo = np.asarray(bbox[0], dtype=float)
        self.bbox_hi = np.asarray(bbox[1], dtype=float)
        self.primitives = list(primitives)
        self.boundary_values = dict(boundary_values)
        self.source = source
        if source_mode is None:
            source_mode = "none" if source is None else "general"
        self.source_mode = source_mode
        self.exact_solution_spec = exact_solution
        self.default_start = None if default_start is None else np.asarray(
            default_start, dtype=float)
        self.default_eps = float(default_eps)
        self.topology = topology
        self._contains = contains
        self._compile()

    def _compile(self):
        if self.d == 3:
            if len(self.primitives) != 1 or not isinstance(self.primitives[0], Sphere):
                raise ValueError("3-D scenes support a single sphere boundary")
            self._sphere = self.primitives[0]
            return
        kinds = []
        params = []
        owner = []
        for j, prim in enumerate(self.primitives):
            for kind, row in prim.kernel_rows():
                kinds.append(kind)
                params.append(row)
                owner.append(j)
        self._kinds = np.asarray(kinds, dtype=np.int32)
        self._params = np.asarray(params, dtype=np.float64)
        self._owner = np.asarray(owner, dtype=np.int64)

    # -- geometry queries ---------------------------------------------------

    def nearest(self, p):
        """(distance, primitive index) of the closest boundary piece."""
        p = np.atleast_2d(np.asarray(p, dtype=float))
        if self.d == 3:
            return self._sphere.distance(p), np.zeros(p.shape[0], dtype=np.int64)
        dist, row = nearest_primitive(p, self._kinds, self._params)
        return dist, self._owner[row]

    def distance(self, p):
        return self.nearest(p)[0]

    def project(self, p, idx=None):
        """A nearest boundary point for each row of p (ties: lowest index)."""
        p = np.atleast_2d(np.asarray(p, dtype=float))
        if idx is None:
            idx = self.nearest(p)[1]
        out = np.empty_like(p)
        for j in np.unique(idx):
            sel = idx == j
            out[sel] = self.primitives[j].project(p[sel])
        return out

    def boundary_value(self, p, idx=None, tol=1e-9):
        """b at boundary points; each point must lie within ``tol`` of its
        attributed primitive."""
        p = np.atleast_2d(np.asarray(p, dtype=float))
        dist, near = self.nearest(p)
        if (dist > tol).any():
            raise ValueError("point not on the boundary (off by %g)" % dist.max())
        idx = near if idx is None else idx
        out = np.empty(p.shape[0])
        for j in np.unique(idx):
            sel = idx == j
            out[sel] = _evaluate(self.boundary_values[self.primitives[j].label],
                                 p[sel])
        return out

    def boundary_value_unchecked(self, p, idx):
        """b for points produced by :meth:`project`; skips the distance check."""
        out = np.empty(p.shape[0])
        for j in np.unique(idx):
            sel = idx == j
            out[sel] = _evaluate(self.boundary_values[self.primitives[j].label],
                                 p[sel])
        return out

    def source_values(self, w):
        if self.source is None:
            raise ValueError("scene %r has no source term" % self.name)
        w = np.atleast_2d(np.asarray(w, dtype=float))
        return _evaluate(self.source, w)

    def exact_solution(self, p):
        if self.exact_solution_spec is None:
            raise ValueError("scene %r has no closed-form solution" % self.name)
        p = np.atleast_2d(np.asarray(p, dtype=float))
        return _evaluate(self.exact_solution_spec, p)

    @property
    def has_exact_solution(self):
        return self.exact_solution_spec is not None

    def to_unit_cube(self, p):
        p = np.atleast_2d(np.asarray(p, dtype=float))
        return (p - self.bbox_lo) / (self.bbox_hi - self.bbox_lo)

    def contains(self, p):
        """Interior test; available for built-in scenes and scene files with
        a declared topology."""
        p = np.atleast_2d(np.asarray(p, dtype=float))
        if self._contains is not None:
            return self._contains(p)
        if self.topology == "first_primitive_interior":
            prim = self.primitives[0]
            u = p - prim.center
            return (u * u).sum(axis=1) < prim.radius ** 2
        if self.topology == "outline_minus_holes":
            inside = _point_in_polygon(p, self.primitives[0].vertices)
            for prim in self.primitives[1:]:
                if isinstance(prim, Circle):
                    u = p - prim.center
                    inside &= (u * u).sum(axis=1) > prim.radius ** 2
            return inside
        raise ValueError("scene %r has no interior test" % self.name)

    def sample_boundary(self, m):
        """About m points spread over the boundary proportional to length."""
        lens = np.array([prim.length() for prim in self.primitives])
        counts = np.maximum((m * lens / lens.sum()).astype(int), 2)
        return np.vstack([prim.sample(c) for prim, c in
                          zip(self.primitives, counts)])

    # -- persistence ----------------------------------------------------------

    def to_dict(self):
        return {
            "name": self.name,
            "dimension": self.d,
            "bbox": [self.bbox_lo.tolist(), self.bbox_hi.tolist()],
            "primitives": [prim.to_dict() for prim in self.primitives],
            "boundary_values": self.boundary_values,
            "source": self.source,
            "source_mode": self.source_mode,
            "exact_solution": self.exact_solution_spec,
            "default_start": None if self.default_start is None
                             else self.default_start.tolist(),
            "default_eps": self.default_eps,
            "topology": self.topology,
        }

    def save(self, path):
        with open(path, "w") as fh:
            json.dump(self.to_dict(), fh, indent=1)

    @classmethod
    def from_dict(cls, doc):
        return cls(doc["name"], doc["dimension"], doc["bbox"],
                   [_primitive_from_dict(p) for p in doc["primitives"]],
                   doc["boundary_values"], source=doc.get("source"),
                   source_mode=doc.get("source_mode"),
                   exact_solution=doc.get("exact_solution"),
                   default_start=doc.get("default_start"),
                   default_eps=doc.get("default_eps", 1e-4),
                   topology=doc.get("topology"))

    @classmethod
    def load(cls, path):
        with open(path) as fh:
            return cls.from_dict(json.load(fh))


def _point_in_polygon(p, vertices):
    """Even-odd rule ray cast; vertices of a closed polygon."""
    x, y = p[:, 0], p[:, 1]
    v = np.asarray(vertices)
    inside = np.zeros(p.shape[0], dtype=bool)
    nv = v.shape[0]
    with np.errstate(divide="ignore", invalid="ignore"):
        for i in range(nv):
            x1, y1 = v[i]
            x2, y2 = v[(i + 1) % nv]
            # horizontal edges never satisfy the first clause
            crossing = ((y1 > y) != (y2 > y)) & \
                       (x < (x2 - x1) * (y - y1) / (y2 - y1) + x1)
            inside ^= crossing
    return inside


# ---------------------------------------------------------------------------
# built-in scenes

def unit_disk():
    """Harmonic potential on the unit disk; boundary and solution are
    (1/2) ln((z1-2)^2 + z2^2)."""
    return Scene(
        "disk", 2, [[-1.0, -1.0], [1.0, 1.0]],
        [Circle((0.0, 0.0), 1.0, "rim")],
        {"rim": {"formula": "disk_potential"}},
        exact_solution={"formula": "disk_potential"},
        default_start=(0.0, 0.5), default_eps=1e-4,
        topology="first_primitive_interior",
    )


def unit_ball():
    """3-D analogue with boundary and solution 1/dist to the point (2,0,0)."""
    return Scene(
        "ball", 3, [[-1.0, -1.0, -1.0], [1.0, 1.0, 1.0]],
        [Sphere((0.0, 0.0, 0.0), 1.0, "sphere")],
        {"sphere": {"formula": "ball_potential"}},
        exact_solution={"formula": "ball_potential"},
        default_start=(0.2, 0.3, -0.1), default_eps=1e-4,
        topology="first_primitive_interior",
    )


def pacman():
    """Unit disk minus the open first quadrant, with a Gaussian-bump source;
    re-entrant corner at the origin."""
    r0, t0 = 0.1244, -0.7906
    scene = Scene(
        "pacman", 2, [[-1.0, -1.0], [1.0, 1.0]],
        [Segment((0.0, 0.0), (1.0, 0.0), "flat_edge"),
         Segment((0.0, 0.0), (0.0, 1.0), "vertical_edge"),
         Arc((0.0, 0.0), 1.0, -1.5 * math.pi, 0.0, "rim")],
        {"flat_edge": {"formula": "pacman_flat_edge"},
         "vertical_edge": {"formula": "pacman_vertical_edge"},
         "rim": {"formula": "pacman_rim"}},
        source={"formula": "pacman_source"}, source_mode="general",
        exact_solution={"formula": "pacman_solution"},
        default_start=(r0 * math.cos(t0), r0 * math.sin(t0)),
        default_eps=1e-4,
        contains=lambda p: (_r2(p) < 1.0) & ~((p[:, 0] > 0) & (p[:, 1] > 0)),
    )
    return scene


def dumbbell(L=1.5, R=1.0, w=0.4, source_mode="shortcut"):
    """Two disks of radius R at (+-L, 0) joined by a bridge of half-width w;
    constant source -2 with zero boundary values."""
    if not (0 < w < R < L):
        raise ValueError("need 0 < w < R < L")
    alpha = math.asin(w / R)
    x_in = math.sqrt(R * R - w * w)
    prims = [
        Arc((-L, 0.0), R, alpha, TWO_PI - alpha, "left_cap"),
        Arc((L, 0.0), R, alpha - math.pi, math.pi - alpha, "right_cap"),
        Segment((-L + x_in, w), (L - x_in, w), "top_wall"),
        Segment((-L + x_in, -w), (L - x_in, -w), "bottom_wall"),
    ]
    bv = {p.label: {"constant": 0.0} for p in prims}

    def inside(p):
        in_left = (p[:, 0] + L) ** 2 + p[:, 1] ** 2 < R * R
        in_right = (p[:, 0] - L) ** 2 + p[:, 1] ** 2 < R * R
        in_bridge = (np.abs(p[:, 0]) < L) & (np.abs(p[:, 1]) < w)
        return in_left | in_right | in_bridge

    return Scene(
        "dumbbell", 2, [[-(L + R), -R], [L + R, R]], prims, bv,
        source={"constant": -2.0}, source_mode=source_mode,
        default_start=(L - R, 0.0), default_eps=1e-4, contains=inside,
    )


def gasket():
    """Cylinder-head gasket: outer outline plus 50 labeled holes, loaded
    from the packaged scene file."""
    return gasket_from_file(GASKET_FILE)


def gasket_from_file(path):
    scene = Scene.load(path)
    return scene


BUILTIN_SCENES = {
    "disk": unit_disk,
    "ball": unit_ball,
    "pacman": pacman,
    "dumbbell": dumbbell,
    "gasket": gasket,
}


def by_name(name):
    if name in BUILTIN_SCENES:
        return BUILTIN_SCENES[name]()
    if os.path.exists(name):
        return Scene.load(name)
    raise ValueError("unknown scene %r; built-ins: %s"
                     % (name, ", ".join(sorted(BUILTIN_SCENES))))
