"""Sliced convolution of weighted radial measures on the mass-s surface.

The time-slice of the surface at height t is a sphere of radius phi(t, s)
carrying the measure with total mass 4*pi*phi(t, s).  Convolving two such
spheres gives the density 2*pi/|x| on the annulus
||R1 - R2| <= |x| <= R1 + R2 (``sphere_pair_kernel``), which is forced by
mass conservation and validated against the Monte-Carlo pairing oracle.

Convolutions of weighted surface measures then reduce to one-dimensional
integrals over the slice times:

    self :  h(rho, tau) = int_0^tau  f(phi(t)) g(phi(tau-t)) k(phi(t), phi(tau-t), rho) dt
    cross:  h(rho, tau) = int_{t >= max(0,-tau)} f(phi(tau+t)) g(phi(t)) k(phi(tau+t), phi(t), rho) dt

where k is the sphere-pair kernel; the kernel's annulus constraint carves
an explicit window out of the time axis, computed in closed form below.
"""
from __future__ import annotations

import numpy as np

from .fields import Conv2DField
from .geometry import phi, psi
from .profiles import RadialProfile
from .quadrature import QuadratureSpec

TWO_PI = 2.0 * np.pi


def sphere_pair_kernel(R: float, R2: float, x: float) -> float:
    """Density of the product of two slice-sphere measures at distance |x|.

    Spheres of radii R, R2 with masses 4*pi*R and 4*pi*R2; the convolution
    lives on the annulus |R - R2| <= |x| <= R + R2 with density 2*pi/|x|.
    x = 0 (with R = R2) is a singular ray; only x > 0 is accepted.
    """
    if R <= 0 or R2 <= 0:
        raise ValueError("sphere radii must be positive")
    if x <= 0:
        raise ValueError("kernel defined for x > 0 only (singular ray at 0)")
    if abs(R - R2) <= x <= R + R2:
        return TWO_PI / x
    return 0.0


def self_half_width(s: float, rho, tau):
    """Half width w of the centered window {|phi(t)-phi(tau-t)| <= rho <= ...}.

    w = (rho/2) * sqrt(1 + 4 s^2/(tau^2 - rho^2)); on the inner branch the
    window is [tau/2 - w, tau/2 + w], on the outer branch its complement in
    [0, tau].
    """
    rho = np.asarray(rho, dtype=float)
    tau = np.asarray(tau, dtype=float)
    with np.errstate(divide="ignore", invalid="ignore"):
        val = 0.5 * rho * np.sqrt(np.maximum(1.0 + 4.0 * s * s / (tau * tau - rho * rho), 0.0))
    return val if val.ndim else float(val)


def rho_from_half_width(s: float, w, tau):
    """Invert the half-width map: (rho_inner, rho_outer) hitting half width w."""
    w = np.asarray(w, dtype=float)
    tau = np.asarray(tau, dtype=float)
    b = tau * tau + 4.0 * s * s + 4.0 * w * w
    disc = np.sqrt(np.maximum(b * b - 16.0 * w * w * tau * tau, 0.0))
    x_plus = 0.5 * (b + disc)
    with np.errstate(divide="ignore", invalid="ignore"):
        x_minus = np.where(x_plus > 0, (4.0 * w * w * tau * tau) / x_plus, 0.0)
    return np.sqrt(x_minus), np.sqrt(x_plus)


def self_window(s: float, rho: float, tau: float):
    """Kernel-support window in slice time for the self convolution at (rho, tau).

    Returns a list of at most two disjoint intervals inside [0, tau].
    """
    if tau <= 0 or rho < 0:
        return []
    lo = np.sqrt(tau * tau + s * s) - s
    mid = np.sqrt(tau * tau + 4.0 * s * s)
    hi = np.sqrt(tau * tau + s * s) + s
    if rho > hi:
        return []
    if lo <= rho <= mid:
        return [(0.0, tau)]
    w = self_half_width(s, rho, tau)
    if rho < lo:
        return [(0.5 * tau - w, 0.5 * tau + w)]
    return [(0.0, 0.5 * tau - w), (0.5 * tau + w, tau)]


def cross_boundary(s: float, rho, tau):
    """Slice time where the cross-window constraint becomes active.

    t_b = (rho*sqrt(1 + 4 s^2/(tau^2 - rho^2)) - tau)/2 for tau >= 0.
    """
    rho = np.asarray(rho, dtype=float)
    tau = np.asarray(tau, dtype=float)
    with np.errstate(divide="ignore", invalid="ignore"):
        d = rho * np.sqrt(np.maximum(1.0 + 4.0 * s * s / (tau * tau - rho * rho), 0.0))
    out = 0.5 * (d - tau)
    return out if out.ndim else float(out)


def cross_window(s: float, rho: float, tau: float, t_cap: float):
    """Window [lo, hi] in the lower-sheet slice time for the cross convolution.

    ``t_cap`` truncates the a priori unbounded window (profile supports make
    the integral finite).  Only tau >= 0 is handled; callers use the
    reflection symmetry for tau < 0.  Empty list when no window.
    """
    if rho <= 0 or tau < 0:
        return []
    lo_edge = np.sqrt(tau * tau + s * s) - s
    hi_edge = np.sqrt(tau * tau + s * s) + s
    if rho <= lo_edge:
        return []
    if rho < tau:
        hi = cross_boundary(s, rho, tau)
        return [(0.0, min(hi, t_cap))] if hi > 0 else []
    if rho <= hi_edge:
        return [(0.0, t_cap)]
    lo = cross_boundary(s, rho, tau)
    return [(lo, t_cap)] if lo < t_cap else []


class CellConvergenceError(RuntimeError):
    def __init__(self, cells):
        self.cells = cells
        super().__init__(f"{len(cells)} grid cells did not reach the quadrature tolerance")


_GL8 = np.polynomial.legendre.leggauss(8)


class _PairIntegrator:
    """Window integrals of t -> a(t + shift_a) * b(shift_b - or + t).

    The integrand is smooth between the interpolation kinks of the two
    profiles, so per-segment 8-point Gauss converges extremely fast; the
    per-cell error estimate compares the value against one level of segment
    halving (h-refinement of the same rule), iterating a few levels if the
    tolerance asks for more.  Cancellation-heavy (signed or complex)
    windows are judged against the integrand magnitude rather than the
    cancelled value.
    """

    def __init__(self, eval_a, eval_b, kinks: np.ndarray):
        self.eval_a = eval_a
        self.eval_b = eval_b
        self.kinks = np.sort(kinks)

    def _gl8(self, edges_list):
        total = 0.0
        scale = 0.0
        for edges in edges_list:
            mid = 0.5 * (edges[:-1] + edges[1:])
            half = 0.5 * (edges[1:] - edges[:-1])
            t = mid[:, None] + half[:, None] * _GL8[0][None, :]
            vals = self.eval_a(t) * self.eval_b(t)
            w = half[:, None] * _GL8[1][None, :]
            total += np.sum(w * vals)
            scale += np.sum(w * np.abs(vals))
        return total, scale

    @staticmethod
    def _halve(edges_list):
        out = []
        for edges in edges_list:
            mids = 0.5 * (edges[:-1] + edges[1:])
            merged = np.empty(edges.size + mids.size)
            merged[0::2] = edges
            merged[1::2] = mids
            out.append(merged)
        return out

    def integrate(self, intervals, rel_tol: float, abs_tol: float = 1e-14,
                  max_levels: int = 4):
        edges_all = []
        for lo, hi in intervals:
            if hi - lo <= 0:
                continue
            inner = self.kinks[(self.kinks > lo) & (self.kinks < hi)]
            edges_all.append(np.concatenate([[lo], inner, [hi]]))
        if not edges_all:
            return 0.0, True
        coarse, _ = self._gl8(edges_all)
        for _ in range(max_levels):
            edges_all = self._halve(edges_all)
            fine, scale = self._gl8(edges_all)
            err = abs(fine - coarse)
            if err <= rel_tol * max(abs(fine), 1e-3 * scale) + abs_tol:
                return fine, True
            coarse = fine
        return coarse, False


def hyperbolic_conv(f: RadialProfile, g: RadialProfile, grid: Conv2DField,
                    quad: QuadratureSpec) -> Conv2DField:
    """Self-sheet convolution (f mu_s * g mu_s) sampled on the grid template."""
    if f.s != g.s:
        raise ValueError("profiles must share the mass parameter")
    s = f.s
    fu, gu = f.u_support(), g.u_support()
    f_kinks = psi(f.grid, s)
    g_kinks = psi(g.grid, s)
    out = np.zeros((grid.rho_grid.size, grid.tau_grid.size),
                   dtype=complex if (f.is_complex or g.is_complex) else float)
    bad = []
    for j, tau in enumerate(grid.tau_grid):
        if tau <= 0 or tau < fu[0] + gu[0] or tau > fu[1] + gu[1]:
            continue
        pair = _PairIntegrator(f.at_time, lambda t, tau=tau: g.at_time(tau - t),
                               np.concatenate([f_kinks, tau - g_kinks]))
        support = (max(fu[0], tau - gu[1]), min(fu[1], tau - gu[0]))
        for i, rho in enumerate(grid.rho_grid):
            if rho == 0.0:
                mid = f.at_time(0.5 * tau) * g.at_time(0.5 * tau)
                out[i, j] = TWO_PI * np.sqrt(1.0 + 4.0 * s * s / (tau * tau)) * mid
                continue
            window = self_window(s, rho, tau)
            clipped = [(max(lo, support[0]), min(hi, support[1])) for lo, hi in window]
            clipped = [(lo, hi) for lo, hi in clipped if hi > lo]
            if not clipped:
                continue
            val, ok = pair.integrate(clipped, quad.rel_tol, quad.abs_tol)
            out[i, j] = TWO_PI / rho * val
            if not ok:
                bad.append((i, j))
    if bad:
        raise CellConvergenceError(bad)
    return grid.like(out)


def cross_conv(f_plus: RadialProfile, f_minus: RadialProfile, grid: Conv2DField,
               quad: QuadratureSpec) -> Conv2DField:
    """Cross-sheet convolution (f+ mu_+ * f- mu_-) sampled on the grid template.

    tau may take either sign; the field obeys
    cross(f, g)(rho, tau) = cross(g, f)(rho, -tau).
    """
    if f_plus.s != f_minus.s:
        raise ValueError("profiles must share the mass parameter")
    s = f_plus.s
    out = np.zeros((grid.rho_grid.size, grid.tau_grid.size),
                   dtype=complex if (f_plus.is_complex or f_minus.is_complex) else float)
    bad = []
    for j, tau in enumerate(grid.tau_grid):
        if tau >= 0:
            fa, fb = f_plus, f_minus
            t_abs = tau
        else:
            fa, fb = f_minus, f_plus
            t_abs = -tau
        au, bu = fa.u_support(), fb.u_support()
        support = (max(bu[0], au[0] - t_abs), min(bu[1], au[1] - t_abs))
        if support[1] <= support[0]:
            continue
        pair = _PairIntegrator(lambda t, t_abs=t_abs, fa=fa: fa.at_time(t_abs + t),
                               fb.at_time,
                               np.concatenate([psi(fa.grid, s) - t_abs,
                                               psi(fb.grid, s)]))
        for i, rho in enumerate(grid.rho_grid):
            window = cross_window(s, rho, t_abs, t_cap=support[1])
            clipped = [(max(lo, support[0]), min(hi, support[1])) for lo, hi in window]
            clipped = [(lo, hi) for lo, hi in clipped if hi > lo]
            if not clipped:
                continue
            val, ok = pair.integrate(clipped, quad.rel_tol, quad.abs_tol)
            out[i, j] = TWO_PI / rho * val
            if not ok:
                bad.append((i, j))
    if bad:
        raise CellConvergenceError(bad)
    return grid.like(out)


def profile_measure_integral(f: RadialProfile) -> float:
    """int f d(mu_s) = 4*pi * int f(r) r^2 / sqrt(r^2 - s^2) dr, segment-exact.

    Integrates in the time chart with 8-point Gauss per profile segment;
    the integrand is smooth inside each segment of the piecewise-linear
    profile, so this is exact to machine precision for the profile class.
    """
    x, w = np.polynomial.legendre.leggauss(8)
    u_nodes = psi(f.grid, f.s)
    lo, hi = u_nodes[:-1], u_nodes[1:]
    mid, half = 0.5 * (lo + hi), 0.5 * (hi - lo)
    u = mid[:, None] + half[:, None] * x[None, :]
    vals = f.at_time(u) * phi(u, f.s)
    return 4.0 * np.pi * float(np.sum(half[:, None] * w[None, :] * vals))


def field_mass(h: Conv2DField) -> float:
    """int h * 4*pi*rho^2 d rho d tau by the grid trapezoid rule."""
    w = 4.0 * np.pi * h.rho_grid[:, None] ** 2 * h.values
    inner = np.trapezoid(w, h.rho_grid, axis=0)
    return float(np.trapezoid(inner, h.tau_grid))
