"""Sampled convolution densities h(rho, tau) on a rectangular grid, with IO.

Rotational symmetry of radial inputs reduces every convolution density in
this package to a function of (rho, tau) = (|xi|, tau); the full-space L2
pairing weight is 4*pi*rho^2 d rho d tau.

Serialization: CSV with header ``rho,tau,value`` (full 17-significant-digit
decimals) and an optional little-endian binary cache with layout
``magic "H3CF" | u32 n_rho | u32 n_tau | f64 rho_grid | f64 tau_grid |
f64 values row-major (rho index varies slowest)``.
"""
from __future__ import annotations

import struct
from dataclasses import dataclass, field

import numpy as np

MAGIC = b"H3CF"


@dataclass
class Conv2DField:
    rho_grid: np.ndarray
    tau_grid: np.ndarray
    values: np.ndarray
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        self.rho_grid = np.asarray(self.rho_grid, dtype=float)
        self.tau_grid = np.asarray(self.tau_grid, dtype=float)
        self.values = np.asarray(self.values)
        if self.rho_grid.ndim != 1 or self.tau_grid.ndim != 1:
            raise ValueError("grids must be 1-D")
        if np.any(self.rho_grid < 0):
            raise ValueError("rho grid must be nonnegative")
        if not (np.all(np.diff(self.rho_grid) > 0) and np.all(np.diff(self.tau_grid) > 0)):
            raise ValueError("grids must be strictly increasing")
        if self.values.shape != (self.rho_grid.size, self.tau_grid.size):
            raise ValueError("values must have shape (n_rho, n_tau)")

    @classmethod
    def template(cls, rho_max: float, tau_min: float, tau_max: float,
                 n_rho: int, n_tau: int) -> "Conv2DField":
        return cls(np.linspace(0.0, rho_max, n_rho),
                   np.linspace(tau_min, tau_max, n_tau),
                   np.zeros((n_rho, n_tau)))

    @classmethod
    def cusp_refined_template(cls, s: float, rho_max: float, tau_min: float,
                              tau_max: float, n_rho: int, n_tau: int,
                              depth: int = 3) -> "Conv2DField":
        """Template whose rho grid resolves the square-root cusp curves.

        Self-convolution densities have a sqrt cusp in rho along
        rho = sqrt(tau^2 + 4 s^2); plain trapezoid integration across it
        stalls at O(h^{3/2}).  This grid adds, for every tau row, the cusp
        location and geometrically shrinking offsets after it, restoring
        near-O(h^2) behavior of row-wise trapezoids.
        """
        tau = np.linspace(tau_min, tau_max, n_tau)
        rho = np.linspace(0.0, rho_max, n_rho)
        h = rho[1] - rho[0]
        cusps = np.sqrt(np.maximum(tau, 0.0) ** 2 + 4.0 * s * s)
        # sqrt-spaced band after each cusp: node offsets (j/m)^2 * band widen
        # the cells quadratically, equalizing the trapezoid error against the
        # sqrt(rho - cusp) behavior; the band spans several uniform cells.
        m = 8 * (depth + 1)
        band = 6.0 * h
        offsets = band * (np.arange(m + 1) / m) ** 2
        extra = (cusps[:, None] + offsets[None, :]).ravel()
        extra = extra[(extra > 0.0) & (extra < rho_max)]
        rho = np.unique(np.concatenate([rho, extra]))
        return cls(rho, tau, np.zeros((rho.size, tau.size)))

    def like(self, values: np.ndarray) -> "Conv2DField":
        return Conv2DField(self.rho_grid, self.tau_grid, values, dict(self.meta))

    def touches_boundary(self, rel: float = 1e-9) -> bool:
        """True when the sampled support reaches the outermost grid lines."""
        v = np.abs(self.values)
        peak = v.max() if v.size else 0.0
        if peak == 0.0:
            return False
        edge = max(v[-1, :].max(), v[:, 0].max(), v[:, -1].max())
        return edge > rel * peak

    def to_csv(self, path) -> None:
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write("rho,tau,value\n")
            for i, rho in enumerate(self.rho_grid):
                for j, tau in enumerate(self.tau_grid):
                    fh.write(f"{rho:.17g},{tau:.17g},{self.values[i, j]:.17g}\n")

    @classmethod
    def from_csv(cls, path) -> "Conv2DField":
        data = np.genfromtxt(path, delimiter=",", names=True)
        rho = np.unique(data["rho"])
        tau = np.unique(data["tau"])
        vals = np.asarray(data["value"]).reshape(rho.size, tau.size)
        return cls(rho, tau, vals)

    def to_binary(self, path) -> None:
        if np.iscomplexobj(self.values):
            raise ValueError("binary cache stores real-valued fields only")
        with open(path, "wb") as fh:
            fh.write(MAGIC)
            fh.write(struct.pack("<II", self.rho_grid.size, self.tau_grid.size))
            fh.write(self.rho_grid.astype("<f8").tobytes())
            fh.write(self.tau_grid.astype("<f8").tobytes())
            fh.write(np.ascontiguousarray(self.values, dtype="<f8").tobytes())

    @classmethod
    def from_binary(cls, path) -> "Conv2DField":
        with open(path, "rb") as fh:
            if fh.read(4) != MAGIC:
                raise ValueError("not a H3CF field cache")
            n_rho, n_tau = struct.unpack("<II", fh.read(8))
            rho = np.frombuffer(fh.read(8 * n_rho), dtype="<f8")
            tau = np.frombuffer(fh.read(8 * n_tau), dtype="<f8")
            vals = np.frombuffer(fh.read(8 * n_rho * n_tau), dtype="<f8")
        return cls(rho.copy(), tau.copy(), vals.reshape(n_rho, n_tau).copy())
