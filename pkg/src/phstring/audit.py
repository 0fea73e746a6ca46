"""Invariant audit behind the ``check`` subcommand."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .control import (
    admissible_probe,
    casimir_residuals_jb,
    casimir_residuals_sd,
    psi1_exact,
    string_ansatz_jb,
    string_ansatz_sd,
)
from .engine import ClosedLoop, LoopFields, SimConfig, law_deviations, run_closed_loop
from .grid import build_grid, d1
from .models import boundary_ports, wb_residual


@dataclass(frozen=True)
class AuditItem:
    name: str
    value: float
    tol: float

    @property
    def passed(self) -> bool:
        return bool(np.isfinite(self.value)) and self.value <= self.tol

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        return f"{status}  {self.name:<34} {self.value:.3e} (tol {self.tol:.0e})"


def sbp_defect(n_cells: int, n_pairs: int = 100, seed: int = 0) -> float:
    """Largest relative SBP-identity defect over random field pairs."""
    rng = np.random.default_rng(seed)
    dz = 1.0 / n_cells
    grid = build_grid(1.0, n_cells, dz, 2.0 * dz)
    H = grid.weights
    worst = 0.0
    for _ in range(n_pairs):
        a, b = rng.standard_normal((2, grid.n_nodes))
        lhs = H @ (a * d1(b, grid)) + H @ (d1(a, grid) * b)
        rhs = a[-1] * b[-1] - a[0] * b[0]
        scale = np.abs(H) @ (np.abs(a * d1(b, grid)) + np.abs(d1(a, grid) * b)) + abs(rhs)
        worst = max(worst, abs(lhs - rhs) / scale)
    return worst


def stationarity_defect(cfg: SimConfig) -> tuple[float, float]:
    """At the target state: max ``|dp/dt|`` off the kink nodes, and ``|u - u_s|``."""
    loop = ClosedLoop(cfg, "jb")
    w_d = loop.equilibrium.w_d
    zero = np.zeros_like(w_d)
    X = loop.pack(LoopFields(w_d, zero, w_d.copy(), zero.copy(), loop.ctrl.x_c_d))
    ev = loop.evaluate(X)
    mask = np.ones_like(w_d, dtype=bool)
    mask[list(loop.model.kink_idx)] = False
    return float(np.max(np.abs(ev.deriv.p[mask]))), abs(ev.u - loop.ctrl.u_s)


def audit(cfg: SimConfig) -> list[AuditItem]:
    items = [AuditItem(f"sbp identity n={n}", sbp_defect(n), 1e-12) for n in (10, 50, 200)]

    model = cfg.model()
    jb = casimir_residuals_jb(string_ansatz_jb(model), model)
    sd = casimir_residuals_sd(string_ansatz_sd(model, psi1_exact(model)), model)
    items.append(AuditItem("casimir conditions (jet bundle)", max(jb.norms().values()), 1e-10))
    items.append(AuditItem("casimir conditions (stokes-dirac)", max(sd.norms().values()), 1e-10))
    ports = boundary_ports(admissible_probe(model), model.params)
    items.append(AuditItem("boundary conditions W_B", float(np.max(np.abs(wb_residual(ports)))), 1e-12))

    dp, du = stationarity_defect(cfg)
    items.append(AuditItem("target is a fixed point", dp, 1e-10))
    items.append(AuditItem("u = u_s at target", du, 1e-12))

    u_exact, _, log = law_deviations(cfg)
    Ht = log["Htilde"]
    items.append(AuditItem("casimir drift", float(np.max(np.abs(log["casimir"] - log.kappa))), 1e-6))
    items.append(AuditItem("error energy monotone", max(0.0, float(np.max(np.diff(Ht)))) / Ht[0], 1e-10))
    items.append(AuditItem("error energy rate identity", log.balance.htilde_rate, 1e-6))
    items.append(AuditItem("plant power balance rate", log.balance.plant_rate, 1e-6))
    items.append(AuditItem("control-law equivalence (exact)", u_exact, 1e-10))

    # the closed-loop dissipation identity holds for the plant-fed interconnection
    plant_fed = run_closed_loop(cfg.with_(feedback_source="plant", damping_source="plant", framework="jb"))
    Hcl = plant_fed["Hcl"]
    items.append(AuditItem("closed-loop rate (plant-fed)", plant_fed.balance.hcl_rate, 1e-6))
    increase = max(0.0, float(np.max(np.diff(Hcl)))) / float(np.max(np.abs(Hcl)))
    items.append(AuditItem("closed-loop energy monotone (plant-fed)", increase, 1e-10))
    return items
