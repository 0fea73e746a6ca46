"""Distributed-parameter observers: a copy of the plant plus output-error injection.

The observer only sees the applied input ``u`` and the measured actuator
current ``y_bar``.  The injection acts on the momentum equation through the
gain profile ``k g(z)``, which makes the error energy decay at the rate
``-k (y_bar - y_hat_bar)**2``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Literal, Union

import numpy as np

from .errors import FrameworkMismatch
from .models import (
    JetBundleState,
    StokesDiracState,
    StringModel,
    hamiltonian_jb,
    hamiltonian_sd,
    integrated_output,
    jb_rhs,
    sd_rhs,
)

State = Union[JetBundleState, StokesDiracState]


@dataclass(frozen=True)
class ObserverState:
    framework: Literal["jb", "sd"]
    x: np.ndarray  # w_hat (jb) or q_hat (sd)
    p: np.ndarray
    k: float

    def __post_init__(self):
        if self.framework not in ("jb", "sd"):
            raise ValueError(f"unknown framework {self.framework!r}")
        if self.k < 0:
            raise ValueError(f"observer gain must be nonnegative, got {self.k}")

    def as_state(self) -> State:
        if self.framework == "jb":
            return JetBundleState(self.x, self.p)
        return StokesDiracState(self.x, self.p)


@dataclass(frozen=True)
class ErrorDiagnostics:
    H_tilde: float
    dissipation_rate: float
    innovation: float


def _injection(obs: ObserverState, y_bar_meas: float, model: StringModel) -> tuple[float, np.ndarray]:
    innovation = y_bar_meas - integrated_output(obs.p, model)
    return innovation, obs.k * model.g * innovation


def observer_rhs_jb(obs: ObserverState, u: float, y_bar_meas: float, model: StringModel):
    if obs.framework != "jb":
        raise FrameworkMismatch("observer_rhs_jb needs a jet-bundle observer")
    dw, dp = jb_rhs(JetBundleState(obs.x, obs.p), u, model)
    _, inj = _injection(obs, y_bar_meas, model)
    dp += inj
    dp[0] = 0.0
    return dw, dp


def observer_rhs_sd(obs: ObserverState, u: float, y_bar_meas: float, model: StringModel):
    if obs.framework != "sd":
        raise FrameworkMismatch("observer_rhs_sd needs a Stokes-Dirac observer")
    dq, dp = sd_rhs(StokesDiracState(obs.x, obs.p), u, model)
    _, inj = _injection(obs, y_bar_meas, model)
    dp += inj
    dp[0] = 0.0
    return dq, dp


def error_energy(plant: State, obs: ObserverState, model: StringModel) -> ErrorDiagnostics:
    """Energy of the estimation error ``plant - observer`` and its decay rate.

    This is the energy of the difference, not a sum of plant and observer
    energies.
    """
    if isinstance(plant, JetBundleState) and obs.framework == "jb":
        err = JetBundleState(plant.w - obs.x, plant.p - obs.p)
        H = hamiltonian_jb(err, model)
    elif isinstance(plant, StokesDiracState) and obs.framework == "sd":
        err = StokesDiracState(plant.q - obs.x, plant.p - obs.p)
        H = hamiltonian_sd(err, model)
    else:
        raise FrameworkMismatch(
            f"plant state {type(plant).__name__} does not match observer framework {obs.framework!r}"
        )
    innovation = integrated_output(err.p, model)
    return ErrorDiagnostics(H, -obs.k * innovation**2, innovation)
