"""Measure-preserving maps from cube variables to spheres and balls, and
the ball Green's functions weighting interior source samples."""

import math

import numpy as np

TWO_PI = 2.0 * math.pi
RHO_FLOOR = 1e-300  # never perturbs a realizable double, avoids log(0)


def step_layout(d, with_source):
    """(s0, s1, s): cube dimensions consumed per step for the sphere draw,
    the ball draw, and in total."""
    s0 = d - 1
    s1 = d if with_source else 0
    if with_source and d != 2:
        raise ValueError("interior source sampling is only provided for d=2")
    return s0, s1, s0 + s1


def theta(x):
    """Unit vectors (cos 2*pi*x, sin 2*pi*x) on the circle."""
    a = TWO_PI * np.asarray(x, dtype=float)
    return np.column_stack([np.cos(a), np.sin(a)])


def psi03(x1, x2):
    """Uniform points on the unit 2-sphere by the hat-box map: the height
    z = 1 - 2*x1 is uniform and x2 gives the longitude."""
    z = 1.0 - 2.0 * np.asarray(x1, dtype=float)
    rho = np.sqrt(np.maximum(1.0 - z * z, 0.0))
    a = TWO_PI * np.asarray(x2, dtype=float)
    return np.column_stack([rho * np.cos(a), rho * np.sin(a), z])


def psi12(x1, x2):
    """Area-uniform points of the unit disk: radius sqrt(x1), angle 2*pi*x2."""
    r = np.sqrt(np.asarray(x1, dtype=float))
    a = TWO_PI * np.asarray(x2, dtype=float)
    return np.column_stack([r * np.cos(a), r * np.sin(a)])


def sphere_map(d, x):
    """Rows of x (n, d-1) to uniform unit vectors in R^d."""
    if d == 2:
        return theta(x[:, 0])
    return psi03(x[:, 0], x[:, 1])


def ball_map(d, x):
    if d != 2:
        raise ValueError("ball sampling only provided for d=2")
    return psi12(x[:, 0], x[:, 1])


def green2(r, rho):
    """G of the disk of radius r at distance rho from the center."""
    rho = np.maximum(rho, RHO_FLOOR)
    return np.log(r / rho) / TWO_PI


def green3(r, rho):
    rho = np.maximum(rho, RHO_FLOOR)
    return (1.0 / rho - 1.0 / r) / (2.0 * TWO_PI)


def ball_volume(d, r):
    r = np.asarray(r, dtype=float)
    if d == 2:
        return math.pi * r * r
    return (4.0 / 3.0) * math.pi * r ** 3


def source_increment(d, r, z_center, w, g_values):
    """One summand of the source-term estimator:
    -vol(B_d(r)) * G_d(z_center, w) * g(w)."""
    z_center = np.atleast_2d(z_center)
    w = np.atleast_2d(w)
    rho = np.sqrt(((w - z_center) ** 2).sum(axis=1))
    green = green2(r, rho) if d == 2 else green3(r, rho)
    return -ball_volume(d, r) * green * np.asarray(g_values, dtype=float)


def constant_source_shortcut_increment(r):
    """Per-step term r^2/2 replacing the sampled source integral when the
    source is the constant -2."""
    r = np.asarray(r, dtype=float)
    return r * r / 2.0
