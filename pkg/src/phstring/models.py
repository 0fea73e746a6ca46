"""In-domain actuated vibrating string in its two port-Hamiltonian forms.

Jet-bundle form: state ``(w, p)`` (deflection, momentum density)::

    dw/dt = p / rho
    dp/dt = T w_zz + g(z) u

Stokes-Dirac form: state ``(q, p)`` (strain, momentum density)::

    dq/dt = d/dz (p / rho)
    dp/dt = d/dz (T q) + g(z) u

Both are clamped at ``z=0`` and free at ``z=L``.  The actuator distribution
``g`` is a node indicator of the patch ``[z_p1, z_p2]`` that takes the value
1/2 on the two edge nodes, so that ``quad(g * f)`` is the trapezoid rule on
the patch.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import KinkMismatch
from .grid import Grid, build_grid, cumtrapz, d1, d2, quad

_C1_TOL = 1e-12

# Structure matrices of the Stokes-Dirac form (P0 = G0 = 0 for the string).
P1 = np.array([[0.0, 1.0], [1.0, 0.0]])
P0 = np.zeros((2, 2))
G0 = np.zeros((2, 2))
# Jet-bundle interconnection and dissipation coefficients acting on (delta_w H, delta_p H).
J_JB = np.array([[0.0, 1.0], [-1.0, 0.0]])
R_JB = np.zeros((2, 2))
# Boundary-condition matrix; W_B @ [f; e] == [p(0)/rho, T q(L)].
W_B = np.array([[-1.0, 0.0, 0.0, 1.0], [0.0, 1.0, 1.0, 0.0]]) / np.sqrt(2.0)


@dataclass(frozen=True)
class StringParams:
    T: float = 1.0
    rho: float = 1.0
    L: float = 1.0

    def __post_init__(self):
        for name in ("T", "rho", "L"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be positive, got {getattr(self, name)!r}")

    @property
    def wave_speed(self) -> float:
        return float(np.sqrt(self.T / self.rho))


@dataclass(frozen=True)
class PatchActuator:
    """Piezo-like patch on ``[z_p1, z_p2]``.

    ``edge_weight`` is the value of ``g`` on the two edge nodes.  The default
    1/2 makes ``quad(g * f)`` the trapezoid rule over the patch; 1.0 is the
    plain closed-interval indicator.
    """

    z_p1: float
    z_p2: float
    edge_weight: float = 0.5

    def __post_init__(self):
        if not self.z_p1 < self.z_p2:
            raise ValueError(f"need z_p1 < z_p2, got {self.z_p1}, {self.z_p2}")
        if not 0.0 <= self.edge_weight <= 1.0:
            raise ValueError(f"edge_weight must lie in [0, 1], got {self.edge_weight}")

    @property
    def width(self) -> float:
        return self.z_p2 - self.z_p1

    def distribution(self, grid: Grid) -> np.ndarray:
        g = np.zeros(grid.n_nodes)
        g[grid.patch_lo_idx : grid.patch_hi_idx + 1] = 1.0
        g[grid.patch_lo_idx] = g[grid.patch_hi_idx] = self.edge_weight
        return g


@dataclass(frozen=True)
class StringModel:
    """Everything the right-hand sides need: parameters, patch, grid and ``g``."""

    params: StringParams
    patch: PatchActuator
    grid: Grid
    g: np.ndarray = field(repr=False, compare=False)

    @property
    def kink_idx(self) -> tuple[int, int]:
        return self.grid.patch_lo_idx, self.grid.patch_hi_idx


def make_model(params: StringParams, patch: PatchActuator, n_cells: int) -> StringModel:
    grid = build_grid(params.L, n_cells, patch.z_p1, patch.z_p2)
    return StringModel(params, patch, grid, patch.distribution(grid))


@dataclass(frozen=True)
class JetBundleState:
    w: np.ndarray
    p: np.ndarray


@dataclass(frozen=True)
class StokesDiracState:
    q: np.ndarray
    p: np.ndarray


@dataclass(frozen=True)
class EquilibriumProfile:
    a: float
    b: float
    c: float
    w_d: np.ndarray = field(repr=False)
    q_d: np.ndarray = field(repr=False)


def equilibrium_shape(z, a: float, b: float, patch: PatchActuator):
    """Closed-form target deflection: linear, then a downward parabola, then flat."""
    z = np.asarray(z, dtype=float)
    c = b * patch.width**2 + a * patch.z_p1
    return np.where(
        z < patch.z_p1,
        a * z,
        np.where(z < patch.z_p2, -b * (z - patch.z_p2) ** 2 + c, c),
    )


def equilibrium_slope(z, a: float, b: float, patch: PatchActuator):
    z = np.asarray(z, dtype=float)
    return np.where(
        z < patch.z_p1, a, np.where(z < patch.z_p2, -2.0 * b * (z - patch.z_p2), 0.0)
    )


def equilibrium_profile(a: float, b: float, model: StringModel) -> EquilibriumProfile:
    patch = model.patch
    if a < 0 or b < 0:
        raise ValueError(f"shape parameters must be nonnegative, got a={a}, b={b}")
    if abs(a - 2.0 * b * patch.width) > _C1_TOL:
        raise KinkMismatch(
            f"C1 continuity needs a = 2 b (z_p2 - z_p1) = {2.0 * b * patch.width!r}, got a={a!r}"
        )
    c = b * patch.width**2 + a * patch.z_p1
    w_d = equilibrium_shape(model.grid.nodes, a, b, patch)
    return EquilibriumProfile(a, b, c, w_d, d1(w_d, model.grid))


def feedforward_us(b: float, T: float) -> float:
    """Constant input that holds the target profile at rest (``T w_zz + g u_s = 0``)."""
    return 2.0 * b * T


def force_balance_us(a: float, model: StringModel) -> float:
    """Feedforward balancing the left-span tension ``T a`` by the discrete patch force.

    Equals :func:`feedforward_us` whenever ``quad(g)`` is the patch width,
    i.e. for the default half-weight edges.
    """
    return model.params.T * a / quad(model.g, model.grid)


def jb_rhs(s: JetBundleState, u: float, model: StringModel) -> tuple[np.ndarray, np.ndarray]:
    prm = model.params
    dw = s.p / prm.rho
    dp = prm.T * d2(s.w, model.grid, "clamped_free") + model.g * u
    dw[0] = 0.0
    dp[0] = 0.0
    return dw, dp


def project_sd(q: np.ndarray, p: np.ndarray) -> None:
    """Impose ``p(0) = 0`` and ``T q(L) = 0`` in place."""
    p[0] = 0.0
    q[-1] = 0.0


def sd_rhs(s: StokesDiracState, u: float, model: StringModel) -> tuple[np.ndarray, np.ndarray]:
    prm, grid = model.params, model.grid
    dq = d1(s.p / prm.rho, grid)
    dp = d1(prm.T * s.q, grid) + model.g * u
    # keep the projected boundary values fixed
    project_sd(dq, dp)
    return dq, dp


def integrated_output(p: np.ndarray, model: StringModel) -> float:
    """Collocated output: the actuator current ``int g p / rho dz``."""
    return quad(model.g * p, model.grid) / model.params.rho


def strain_energy_jb(w: np.ndarray, T: float, grid: Grid) -> float:
    dw = np.diff(w)
    return 0.5 * T * float(np.dot(dw, dw)) / grid.dz


def hamiltonian_jb(s: JetBundleState, model: StringModel) -> float:
    """Kinetic energy by trapezoid, strain energy from cell-wise slopes.

    The strain part is the quadratic form whose gradient is ``-H T d2(w)``,
    so the power balance of :func:`jb_rhs` holds exactly.
    """
    prm = model.params
    kinetic = 0.5 * quad(s.p**2, model.grid) / prm.rho
    return kinetic + strain_energy_jb(s.w, prm.T, model.grid)


def hamiltonian_jb_rate(s: JetBundleState, ds: JetBundleState, model: StringModel) -> float:
    """Directional derivative of :func:`hamiltonian_jb` along ``ds``."""
    prm, grid = model.params, model.grid
    kinetic = quad(s.p * ds.p, grid) / prm.rho
    strain = prm.T * np.dot(np.diff(s.w), np.diff(ds.w)) / grid.dz
    return kinetic + strain


def hamiltonian_sd(s: StokesDiracState, model: StringModel) -> float:
    prm = model.params
    return 0.5 * quad(s.p**2 / prm.rho + prm.T * s.q**2, model.grid)


def hamiltonian_sd_rate(s: StokesDiracState, ds: StokesDiracState, model: StringModel) -> float:
    prm = model.params
    return quad(s.p * ds.p / prm.rho + prm.T * s.q * ds.q, model.grid)


@dataclass(frozen=True)
class BoundaryPorts:
    f_bnd: np.ndarray
    e_bnd: np.ndarray

    @property
    def stacked(self) -> np.ndarray:
        return np.concatenate([self.f_bnd, self.e_bnd])


def port_matrix() -> np.ndarray:
    """``R = [[P1, -P1], [I, I]] / sqrt(2)`` mapping boundary co-energies to ports."""
    eye = np.eye(2)
    return np.block([[P1, -P1], [eye, eye]]) / np.sqrt(2.0)


def coenergy(s: StokesDiracState, params: StringParams, idx: int) -> np.ndarray:
    return np.array([params.T * s.q[idx], s.p[idx] / params.rho])


def boundary_ports(s: StokesDiracState, params: StringParams) -> BoundaryPorts:
    stacked = port_matrix() @ np.concatenate([coenergy(s, params, -1), coenergy(s, params, 0)])
    return BoundaryPorts(stacked[:2], stacked[2:])


def wb_residual(bp: BoundaryPorts) -> np.ndarray:
    """Boundary-condition residual ``W_B [f; e]``; zero for admissible states."""
    return W_B @ bp.stacked


def map_jb_to_sd(s: JetBundleState, grid: Grid) -> StokesDiracState:
    return StokesDiracState(d1(s.w, grid), s.p.copy())


def map_sd_to_jb(s: StokesDiracState, grid: Grid) -> JetBundleState:
    return JetBundleState(cumtrapz(s.q, grid), s.p.copy())


__all__ = [
    "BoundaryPorts",
    "EquilibriumProfile",
    "JetBundleState",
    "PatchActuator",
    "StokesDiracState",
    "StringModel",
    "StringParams",
    "boundary_ports",
    "build_grid",
    "equilibrium_profile",
    "feedforward_us",
    "force_balance_us",
    "hamiltonian_jb",
    "hamiltonian_sd",
    "integrated_output",
    "jb_rhs",
    "make_model",
    "map_jb_to_sd",
    "map_sd_to_jb",
    "sd_rhs",
    "wb_residual",
]
