"""Quadrature specs and the two 1-D integration routes used for dual checks.

Route A ("gk") wraps scipy's adaptive Gauss-Kronrod rule.  Route B
("simpson") is an in-house composite Simpson rule with panel doubling up to
a depth cap; it is deliberately independent of scipy so that closed forms
can be checked against two dissimilar integrators.  Integrands must accept
numpy arrays.
"""
from __future__ import annotations

import warnings
from dataclasses import dataclass, field, replace

import numpy as np
from scipy.integrate import IntegrationWarning
from scipy.integrate import quad as _scipy_quad

DEFAULT_SEED = 0x5EED


class QuadratureError(RuntimeError):
    """Raised when a requested tolerance is not met at the depth cap."""


@dataclass(frozen=True)
class QuadratureSpec:
    """Rule id, tolerances, truncation radius and RNG seed for all integrals."""

    rule: str = "gk"
    rel_tol: float = 1e-8
    abs_tol: float = 1e-14
    max_depth: int = 20
    r_max: float = 40.0
    seed: int = DEFAULT_SEED

    def __post_init__(self):
        if self.rel_tol <= 0:
            raise ValueError("rel_tol must be positive")
        if self.r_max <= 0:
            raise ValueError("r_max must be positive")

    def with_profile(self, profile: str) -> "QuadratureSpec":
        tol = {"fast": 1e-6, "default": 1e-8, "paranoid": 1e-10}[profile]
        return replace(self, rel_tol=tol)


@dataclass
class QuadResult:
    value: float
    error: float
    converged: bool
    depth: int = 0


def simpson_adaptive(f, a: float, b: float, rel_tol: float = 1e-8,
                     abs_tol: float = 1e-14, max_depth: int = 20,
                     min_depth: int = 2) -> QuadResult:
    """Composite Simpson with panel doubling until the doubling update is small."""
    a, b = float(a), float(b)
    if b <= a:
        return QuadResult(0.0, 0.0, True, 0)
    prev = None
    n = 2
    for depth in range(max_depth + 1):
        x = np.linspace(a, b, n + 1)
        y = np.asarray(f(x), dtype=float)
        h = (b - a) / n
        val = h / 3.0 * (y[0] + y[-1] + 4.0 * y[1:-1:2].sum() + 2.0 * y[2:-2:2].sum())
        if prev is not None and depth >= min_depth:
            err = abs(val - prev) / 15.0
            if err <= rel_tol * abs(val) + abs_tol:
                return QuadResult(val, err, True, depth)
        prev = val
        n *= 2
    return QuadResult(prev, abs(val - prev) if prev is not None else np.inf, False, max_depth)


def integrate(f, a: float, b: float, spec: QuadratureSpec,
              points=None, strict: bool = True) -> QuadResult:
    """Integrate f on [a, b] with the spec's rule; report non-convergence."""
    if b <= a:
        return QuadResult(0.0, 0.0, True)
    if spec.rule == "simpson":
        res = simpson_adaptive(f, a, b, spec.rel_tol, spec.abs_tol, spec.max_depth)
    else:
        pts = None
        if points is not None:
            pts = [p for p in points if a < p < b]
            pts = pts or None
        with warnings.catch_warnings():
            # convergence is judged from the returned error estimate below;
            # kinked piecewise-linear integrands trip the roundoff warning
            warnings.simplefilter("ignore", IntegrationWarning)
            val, err = _scipy_quad(f, a, b, epsabs=spec.abs_tol, epsrel=spec.rel_tol,
                                   limit=200, points=pts)
        res = QuadResult(val, err, err <= spec.rel_tol * abs(val) + 10 * spec.abs_tol + 1e-300)
    if strict and not res.converged:
        raise QuadratureError(
            f"integral on [{a}, {b}] did not reach rel_tol={spec.rel_tol} "
            f"(value={res.value}, err={res.error})")
    return res


def split_exp_tail(a_rate: float, scale: float = 30.0, pieces: int = 3):
    """Breakpoints [0, ..., k*scale/a_rate] for integrands damped by exp(-a*t).

    The remainder beyond the last breakpoint is below exp(-pieces*scale)
    relative to the total for polynomially bounded integrands.
    """
    if a_rate <= 0:
        raise ValueError("decay rate must be positive")
    edges = [0.0, 1.0, 10.0]
    edges += [k * scale / a_rate for k in range(1, pieces + 1)]
    out = sorted(set(e for e in edges if e >= 0.0))
    return out


def integrate_exp_decay(f, a_rate: float, spec: QuadratureSpec) -> QuadResult:
    """Integrate f over [0, inf) when |f| <= poly * exp(-a_rate * t)."""
    edges = split_exp_tail(a_rate)
    total, err = 0.0, 0.0
    ok = True
    for lo, hi in zip(edges[:-1], edges[1:]):
        if hi <= lo:
            continue
        r = integrate(f, lo, hi, spec, strict=False)
        total += r.value
        err += r.error
        ok = ok and r.converged
    if not ok:
        raise QuadratureError("exp-tail integral did not converge on every panel")
    return QuadResult(total, err, ok)


def gauss_legendre_nodes(a: float, b: float, n: int):
    """Nodes and weights of the n-point Gauss-Legendre rule on [a, b]."""
    x, w = np.polynomial.legendre.leggauss(n)
    mid, half = 0.5 * (a + b), 0.5 * (b - a)
    return mid + half * x, half * w
