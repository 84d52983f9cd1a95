"""Coordinate maps between spatial radius and time height on the mass-s surface.

The surface with mass parameter s >= 0 is t = sqrt(|x|^2 - s^2), |x| >= s;
s = 0 degenerates to the light cone.  All radial integrals in this package
are carried out in the time variable u = psi(r, s), where the surface
measure weight r^2 / sqrt(r^2 - s^2) dr becomes the smooth phi(u, s) du.
"""
from __future__ import annotations

import numpy as np


def check_mass(s: float) -> float:
    """Validate a mass parameter (s = 0 is the cone, s > 0 a hyperboloid)."""
    s = float(s)
    if not np.isfinite(s) or s < 0.0:
        raise ValueError(f"mass parameter must be finite and >= 0, got {s}")
    return s


def psi(r, s: float):
    """Time height sqrt(r^2 - s^2) of the surface point at spatial radius r >= s."""
    r = np.asarray(r, dtype=float)
    out = np.sqrt(np.maximum(r * r - s * s, 0.0))
    return out if out.ndim else float(out)


def phi(t, s: float):
    """Spatial radius sqrt(t^2 + s^2) of the surface point at time height t >= 0."""
    t = np.asarray(t, dtype=float)
    out = np.sqrt(t * t + s * s)
    return out if out.ndim else float(out)
