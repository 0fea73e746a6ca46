"""Uniform 1-D grid, trapezoid quadrature and summation-by-parts operators.

Fields are plain ``numpy`` arrays holding one value per grid node.  The first
derivative is the diagonal-norm SBP operator of interior order two: central
differences inside, one-sided two-point differences at both ends.  Together
with trapezoid weights ``H`` it satisfies

    a @ (H * (D1 @ b)) + b @ (H * (D1 @ a)) == a[-1] * b[-1] - a[0] * b[0]

to roundoff, which is what makes the discrete energy and Casimir identities
used elsewhere in the package exact.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Literal

import numpy as np
from scipy.integrate import cumulative_trapezoid

from .errors import BcViolation, NonPositiveLength, PatchOffGrid

_SNAP_TOL = 1e-9
_BC_TOL = 1e-9


@dataclass(frozen=True)
class Grid:
    """Uniform node grid on ``[0, L]`` with an actuator patch snapped to nodes."""

    length: float
    n_cells: int
    patch_lo_idx: int
    patch_hi_idx: int
    nodes: np.ndarray = field(repr=False, compare=False)
    weights: np.ndarray = field(repr=False, compare=False)

    @property
    def dz(self) -> float:
        return self.length / self.n_cells

    @property
    def n_nodes(self) -> int:
        return self.n_cells + 1

    @property
    def z_p1(self) -> float:
        return float(self.nodes[self.patch_lo_idx])

    @property
    def z_p2(self) -> float:
        return float(self.nodes[self.patch_hi_idx])

    def sample(self, func) -> np.ndarray:
        """Evaluate ``func`` on the nodes and return it as a field."""
        return np.asarray(np.broadcast_to(func(self.nodes), self.nodes.shape), dtype=float).copy()


def _snap(coord: float, dz: float, name: str) -> int:
    ratio = coord / dz
    idx = int(round(ratio))
    if abs(ratio - idx) > _SNAP_TOL:
        raise PatchOffGrid(f"{name}={coord!r} is not a grid node (z/dz = {ratio:.12g})")
    return idx


def build_grid(length: float, n_cells: int, z_p1: float, z_p2: float) -> Grid:
    if not length > 0:
        raise NonPositiveLength(f"length must be positive, got {length!r}")
    if int(n_cells) != n_cells or n_cells < 8:
        raise ValueError(f"n_cells must be an integer >= 8, got {n_cells!r}")
    n_cells = int(n_cells)
    if not 0 < z_p1 < z_p2 < length:
        raise ValueError(f"need 0 < z_p1 < z_p2 < L, got z_p1={z_p1}, z_p2={z_p2}, L={length}")
    dz = length / n_cells
    lo = _snap(z_p1, dz, "z_p1")
    hi = _snap(z_p2, dz, "z_p2")
    nodes = np.arange(n_cells + 1) * dz
    nodes[-1] = length
    weights = np.full(n_cells + 1, dz)
    weights[0] = weights[-1] = 0.5 * dz
    return Grid(float(length), n_cells, lo, hi, nodes, weights)


def quad(f: np.ndarray, grid: Grid) -> float:
    """Composite trapezoid rule for the integral of ``f`` over ``[0, L]``.

    Returns a numpy scalar of the field's precision (``float64`` for ordinary
    fields), so extended-precision diagnostics stay extended.
    """
    return np.dot(grid.weights, f)


def d1(f: np.ndarray, grid: Grid) -> np.ndarray:
    out = np.empty_like(f, dtype=np.result_type(f, np.float64))
    dz = grid.dz
    out[1:-1] = (f[2:] - f[:-2]) / (2.0 * dz)
    out[0] = (f[1] - f[0]) / dz
    out[-1] = (f[-1] - f[-2]) / dz
    return out


def d1_matrix(grid: Grid) -> np.ndarray:
    """Dense matrix of :func:`d1`, for audits and small eigen-analyses."""
    return np.column_stack([d1(e, grid) for e in np.eye(grid.n_nodes)])


def d2(f: np.ndarray, grid: Grid, bc: Literal["clamped_free", "none"] = "none") -> np.ndarray:
    """Second difference.

    ``bc="none"`` leaves both end values at zero (they carry no information).
    ``bc="clamped_free"`` pins node 0 (its entry is 0) and closes node n with
    the mirror ghost ``f[n+1] = f[n-1]``; the resulting operator times the
    quadrature weights is symmetric, so it is the exact gradient of the
    cell-wise strain energy.
    """
    dz2 = grid.dz**2
    out = np.zeros_like(f, dtype=np.result_type(f, np.float64))
    out[1:-1] = (f[:-2] - 2.0 * f[1:-1] + f[2:]) / dz2
    if bc == "clamped_free":
        scale = float(np.max(np.abs(f))) if f.size else 0.0
        if abs(f[0]) > _BC_TOL * scale:
            raise BcViolation(f"clamped end requires f(0)=0, got {f[0]!r}")
        out[-1] = 2.0 * (f[-2] - f[-1]) / dz2
    elif bc != "none":
        raise ValueError(f"unknown bc {bc!r}")
    return out


def cumtrapz(f: np.ndarray, grid: Grid) -> np.ndarray:
    """Running trapezoid integral from ``z=0``, starting at 0."""
    return cumulative_trapezoid(f, dx=grid.dz, initial=0.0)
