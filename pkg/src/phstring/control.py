"""Energy-Casimir dynamic controller and Casimir-condition checkers.

Jet-bundle route: the Casimir ``C = x_c - int g w dz`` ties the scalar
controller state to the plant (or observer) deflection; the total control
law is

    u = -c1 (int g w - x_c_d) - c2 y + u_s.

Stokes-Dirac route: ``C = v_c + int Psi1 q dz`` with ``d/dz Psi1 = g`` and
``Psi1(L) = 0``; the control law is

    u = -d1 (-int Psi1 q + int Psi1 q_d) - d2 y + u_s,

which coincides with the jet-bundle law after integration by parts.  On the
grid the same identity holds to roundoff when ``Psi1`` is the discrete SBP
antiderivative of ``g`` (:func:`psi1_exact`) and the integrals use the
trapezoid weights.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .grid import Grid, d1, quad
from .models import (
    G0,
    J_JB,
    P0,
    P1,
    R_JB,
    PatchActuator,
    StokesDiracState,
    StringModel,
    boundary_ports,
    port_matrix,
)


@dataclass
class ControllerState:
    """Scalar controller ``dx_c/dt = u_c`` with shaping and damping gains.

    ``c1 = 0`` is allowed for gain sweeps; the controller energy then drops
    the divergent constant ``u_s**2 / (2 c1)``.
    """

    x_c: float
    c1: float
    c2: float
    u_s: float
    x_c_d: float

    def __post_init__(self):
        if self.c1 < 0 or self.c2 < 0:
            raise ValueError(f"controller gains must be nonnegative, got c1={self.c1}, c2={self.c2}")

    def energy(self, x_c: float | None = None) -> float:
        x = self.x_c if x_c is None else x_c
        if self.c1 > 0:
            return 0.5 * self.c1 * (x - self.x_c_d - self.u_s / self.c1) ** 2
        return -self.u_s * (x - self.x_c_d)

    def output(self, x_c: float | None = None) -> float:
        """``y_c = dH_c/dx_c``."""
        x = self.x_c if x_c is None else x_c
        return self.c1 * (x - self.x_c_d) - self.u_s

    def interconnect(self, y_damp: float, x_c: float | None = None) -> float:
        """Plant input ``u = -y_c + u'`` with damping injection ``u' = -c2 y``."""
        return -self.output(x_c) - self.c2 * y_damp


def controller_step_rhs(ctrl: ControllerState, y_bar_hat: float) -> float:
    """Controller dynamics left by the Casimir conditions: ``dx_c/dt = u_c``."""
    return float(y_bar_hat)


def target_xcd(w_d: np.ndarray, model: StringModel) -> float:
    return quad(model.g * w_d, model.grid)


def casimir_value(x_c: float, w: np.ndarray, model: StringModel) -> float:
    return x_c - quad(model.g * w, model.grid)


def control_law_jb(ctrl: ControllerState, w: np.ndarray, y_bar: float, model: StringModel) -> float:
    shaping = quad(model.g * w, model.grid) - ctrl.x_c_d
    return -ctrl.c1 * shaping - ctrl.c2 * y_bar + ctrl.u_s


# -- Stokes-Dirac Casimir profile -------------------------------------------


def psi1(z, patch: PatchActuator):
    """Closed form ``Psi1(z) = -int_z^L g``: flat, linear on the patch, then zero."""
    z = np.asarray(z, dtype=float)
    return -np.clip(patch.z_p2 - np.maximum(z, patch.z_p1), 0.0, None)


def psi1_field(model: StringModel) -> np.ndarray:
    return psi1(model.grid.nodes, model.patch)


def psi1_exact(model: StringModel) -> np.ndarray:
    """Discrete ``Psi1`` with ``d1(Psi1) == g`` on nodes 1..n and ``Psi1[n] == 0``.

    With this profile, ``-quad(Psi1 * d1(w)) == quad(g * w)`` holds exactly
    for every ``w`` with ``w[0] == 0`` (SBP summation by parts).
    """
    g, dz = model.g, model.grid.dz
    n = model.grid.n_cells
    psi = np.zeros(n + 1)
    psi[n - 1] = psi[n] - dz * g[n]
    for i in range(n - 1, 0, -1):
        psi[i - 1] = psi[i + 1] - 2.0 * dz * g[i]
    return psi


def trapezoid_pairing(psi: np.ndarray, f: np.ndarray, grid: Grid) -> float:
    return quad(psi * f, grid)


def linear_product_pairing(psi: np.ndarray, f: np.ndarray, grid: Grid) -> float:
    """Exact integral of the product of the piecewise-linear interpolants."""
    a0, a1 = psi[:-1], psi[1:]
    b0, b1 = f[:-1], f[1:]
    return float(grid.dz / 6.0 * np.sum(2 * a0 * b0 + a0 * b1 + a1 * b0 + 2 * a1 * b1))


Pairing = Callable[[np.ndarray, np.ndarray, Grid], float]


def control_law_sd(
    ctrl: ControllerState,
    q: np.ndarray,
    q_d: np.ndarray,
    y_bar: float,
    psi: np.ndarray,
    grid: Grid,
    pairing: Pairing = trapezoid_pairing,
) -> float:
    v_c = -pairing(psi, q, grid)
    v_c_d = -pairing(psi, q_d, grid)
    return -ctrl.c1 * (v_c - v_c_d) - ctrl.c2 * y_bar + ctrl.u_s


def casimir_value_sd(v_c: float, q: np.ndarray, psi: np.ndarray, grid: Grid) -> float:
    return v_c + quad(psi * q, grid)


# -- Casimir-condition residuals ---------------------------------------------


@dataclass(frozen=True)
class CasimirAnsatzJB:
    """Variational derivatives of the Casimir density ``C(w, p, w_z)``."""

    dC_dw: np.ndarray
    dC_dp: np.ndarray
    boundary_coeff: np.ndarray
    G_c: float = 1.0
    J_c: float = 0.0
    R_c: float = 0.0


@dataclass(frozen=True)
class CasimirAnsatzSD:
    Gamma: float
    Psi1: np.ndarray
    Psi2: np.ndarray
    B_c: float = 1.0
    A_c: float = 0.0
    S_c: float = 0.0


@dataclass(frozen=True)
class CasimirResiduals:
    """Residuals of the four Casimir conditions (controller, domain, input, boundary).

    ``r_domain`` has one row per state component; ``excluded`` lists node
    indices left out of ``domain_norm``.
    """

    r_controller: float
    r_domain: np.ndarray = field(repr=False)
    r_input: np.ndarray = field(repr=False)
    r_boundary: float
    domain_norm: float
    input_norm: float
    excluded: tuple[int, ...] = ()

    def norms(self) -> dict[str, float]:
        return {
            "controller": abs(self.r_controller),
            "domain": self.domain_norm,
            "input": self.input_norm,
            "boundary": abs(self.r_boundary),
        }

    def passes(self, tol: float = 1e-10) -> bool:
        return all(v <= tol for v in self.norms().values())


def string_ansatz_jb(model: StringModel) -> CasimirAnsatzJB:
    n = model.grid.n_nodes
    return CasimirAnsatzJB(dC_dw=-model.g.copy(), dC_dp=np.zeros(n), boundary_coeff=np.zeros(n))


def string_ansatz_sd(model: StringModel, psi: np.ndarray | None = None) -> CasimirAnsatzSD:
    psi = psi1_field(model) if psi is None else psi
    return CasimirAnsatzSD(Gamma=1.0, Psi1=psi, Psi2=np.zeros_like(psi))


def casimir_residuals_jb(
    ansatz: CasimirAnsatzJB, model: StringModel, w_dot: np.ndarray | None = None
) -> CasimirResiduals:
    """Discrete Casimir conditions for the jet-bundle closed loop.

    The interconnection gain ``K`` is the 1x1 identity.  ``w_dot`` is the
    boundary motion probed by the boundary condition; by default a unit tip
    velocity ``z / L``.
    """
    grid = model.grid
    dC = np.vstack([ansatz.dC_dw, ansatz.dC_dp])
    G = np.vstack([np.zeros(grid.n_nodes), model.g])
    K = 1.0
    r_controller = ansatz.J_c - ansatz.R_c
    # row beta: sum_alpha dC_alpha (J - R)^{alpha beta} + G_c K G^beta
    r_domain = (J_JB - R_JB).T @ dC + ansatz.G_c * K * G
    r_input = np.sum(dC * G, axis=0) * K * ansatz.G_c
    if w_dot is None:
        w_dot = grid.nodes / grid.length
    bc = ansatz.boundary_coeff
    r_boundary = w_dot[-1] * bc[-1] - w_dot[0] * bc[0]
    return CasimirResiduals(
        r_controller=float(r_controller),
        r_domain=r_domain,
        r_input=r_input,
        r_boundary=float(r_boundary),
        domain_norm=float(np.max(np.abs(r_domain))),
        input_norm=abs(quad(r_input, grid)),
    )


def admissible_probe(model: StringModel) -> StokesDiracState:
    """A generic state meeting ``p(0) = 0`` and ``q(L) = 0``."""
    z, L = model.grid.nodes, model.grid.length
    return StokesDiracState(q=1.0 - z / L, p=model.params.rho * z / L)


def casimir_residuals_sd(
    ansatz: CasimirAnsatzSD,
    model: StringModel,
    probe: StokesDiracState | None = None,
    exclude_kinks: bool = True,
) -> CasimirResiduals:
    grid = model.grid
    Psi = np.vstack([ansatz.Psi1, ansatz.Psi2])
    dPsi = np.vstack([d1(ansatz.Psi1, grid), d1(ansatz.Psi2, grid)])
    B = np.vstack([np.zeros(grid.n_nodes), model.g])
    r_controller = (ansatz.A_c + ansatz.S_c) * ansatz.Gamma
    r_domain = P1 @ dPsi + (P0 + G0) @ Psi - B * ansatz.B_c * ansatz.Gamma
    r_input = ansatz.B_c * np.sum(B * Psi, axis=0)

    # boundary pairing [e f] R [Psi(L); Psi(0)] against an admissible state
    probe = admissible_probe(model) if probe is None else probe
    ports = boundary_ports(probe, model.params)
    psi_ports = port_matrix() @ np.concatenate([Psi[:, -1], Psi[:, 0]])
    r_boundary = float(ports.e_bnd @ psi_ports[:2] + ports.f_bnd @ psi_ports[2:])

    excluded = model.kink_idx if exclude_kinks else ()
    mask = np.ones(grid.n_nodes, dtype=bool)
    mask[list(excluded)] = False
    return CasimirResiduals(
        r_controller=float(r_controller),
        r_domain=r_domain,
        r_input=r_input,
        r_boundary=r_boundary,
        domain_norm=float(np.max(np.abs(r_domain[:, mask]))),
        input_norm=float(np.sqrt(quad(r_input**2, grid))),
        excluded=tuple(excluded),
    )
