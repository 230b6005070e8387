"""Energy-shaping boundary control: internal energy, the nominal
continuous-time law, its zero-order-hold implementation, and the analytic
open-loop input sequence it is equivalent to.

The controller's single feedback quantity is the internal energy of the
error system,

    one-phase:  E(t) = (k/alpha) int_0^s (T - Tm) dx + (k/beta) (s - s_r)
    two-phase:  E(t) = (k_l/alpha_l) int_0^s (T_l - Tm) dx
                     + (k_s/alpha_s) int_s^L (T_s - Tm) dx + gamma (s - s_r)

computed with the trapezoidal rule on the solver grid so the sampled-energy
recursion E_{j+1} = (1 - c tau_j) E_j holds as tightly as the discrete
conservation law allows.  Both energies vanish at the target state; the
two-phase form absorbs the constant -gamma*s_r so this holds there too.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import (
    ContractError,
    DomainSpec,
    GainError,
    InitialData,
    MaterialParams,
    ParameterError,
    Schedule,
    TwoPhaseInitialData,
    TwoPhaseParams,
    Violation,
)


@dataclass(frozen=True)
class ControllerConfig:
    """Gain, setpoint, and phase selector of the energy-shaping law."""

    c: float
    s_r: float
    phase: str = "one-phase"

    def __post_init__(self):
        if self.c <= 0:
            raise ParameterError("controller gain must be strictly positive")
        if self.s_r <= 0:
            raise ParameterError("setpoint must be strictly positive")
        if self.phase not in ("one-phase", "two-phase"):
            raise ParameterError(f"unknown phase {self.phase!r}")


@dataclass(frozen=True)
class ControllerState:
    """Held input and sampled energy for the current hold interval."""

    j: int
    q: float
    energy: float
    t_next: float


def internal_energy(state, p, s_r: float) -> float:
    """Internal energy of the error system at the given state.

    Dispatches on the parameter type: a ``TwoPhaseParams`` adds the solid
    integral and uses the volumetric latent heat for the interface term.
    """
    if isinstance(p, TwoPhaseParams):
        pl, ps = p.liquid, p.solid
        nl = len(state.u) - 1
        ns = len(state.v) - 1
        liq = (pl.k / pl.alpha) * state.s * np.trapezoid(state.u, dx=1.0 / nl)
        sol = (ps.k / ps.alpha) * (state.L - state.s) * np.trapezoid(state.v, dx=1.0 / ns)
        return float(liq + sol + p.gamma * (state.s - s_r))
    n = len(state.u) - 1
    liq = (p.k / p.alpha) * state.s * np.trapezoid(state.u, dx=1.0 / n)
    return float(liq + (p.k / p.beta) * (state.s - s_r))


def nominal_control(state, p, cfg: ControllerConfig) -> float:
    """Continuous-time law q = -c * E(state)."""
    return -cfg.c * internal_energy(state, p, cfg.s_r)


def zoh_sample(ctrl: ControllerState | None, state, p, cfg: ControllerConfig,
               sched: Schedule) -> ControllerState:
    """Sample the state at the next scheduled instant and hold q = -c*E_j.

    Must be called exactly at a sampling instant (the solvers shorten the
    straddling step so this always holds); anything else is a contract
    violation.
    """
    j = 0 if ctrl is None else ctrl.j + 1
    if j >= len(sched.instants):
        raise ContractError("sampling past the end of the schedule")
    t_j = sched.instants[j]
    if abs(state.t - t_j) > 1e-9 * max(1.0, t_j):
        raise ContractError(
            f"zoh_sample called at t={state.t}, expected scheduled instant {t_j}"
        )
    energy = internal_energy(state, p, cfg.s_r)
    q = -cfg.c * energy
    t_next = sched.instants[j + 1] if j + 1 < len(sched.instants) else np.inf
    return ControllerState(j=j, q=q, energy=energy, t_next=t_next)


def open_loop_sequence(E0: float, c: float, sched: Schedule) -> np.ndarray:
    """Analytic input sequence q_j = q_0 prod_{i<j} (1 - c tau_i), q_0 = -c E0.

    Equivalent to the closed loop because the sampled energy obeys the exact
    recursion E_{j+1} = (1 - c tau_j) E_j; requires c*R < 1 so the products
    stay positive.
    """
    if c <= 0 or c * sched.R >= 1.0:
        raise GainError(f"need 0 < c < 1/R = {1.0 / sched.R} (got c={c})")
    taus = sched.gaps
    q = np.empty(len(taus))
    q[0] = -c * E0
    for i in range(1, len(taus)):
        q[i] = q[i - 1] * (1.0 - c * taus[i - 1])
    return q


def setpoint_lower_bound_one_phase(init: InitialData, p: MaterialParams,
                                   dom: DomainSpec) -> float:
    """Least reachable setpoint s0 + (beta/alpha) int (T0 - Tm) dx.

    Any setpoint at or below this cannot be reached without freezing, which
    the nonnegative-input law cannot do.
    """
    xs = np.linspace(0.0, init.s0, dom.N + 1)
    T = init.profile.sample(xs, 0.0, init.s0, p.Tm, interface="right")
    integral = np.trapezoid(T - p.Tm, xs)
    return float(init.s0 + (p.beta / p.alpha) * integral)


def validate_setpoint(init, cfg: ControllerConfig, p, dom: DomainSpec,
                      s_inf: float | None = None) -> list[Violation]:
    """Check setpoint reachability; empty list means valid.

    One phase requires lower_bound < s_r < L; two phase requires
    s_inf < s_r < L with the zero-input final front position s_inf (pass it
    precomputed, or it is derived from the initial data).
    """
    out: list[Violation] = []
    if cfg.s_r >= dom.L:
        out.append(Violation(
            "setpoint-above-domain",
            f"setpoint s_r={cfg.s_r} must be strictly below the domain length {dom.L}",
            {"s_r": cfg.s_r, "L": dom.L},
        ))
    if isinstance(p, TwoPhaseParams):
        if s_inf is None:
            from .two_phase import s_infinity

            s_inf = s_infinity(init, p, dom)
        if not (0.0 < s_inf < dom.L):
            out.append(Violation(
                "final-interface-outside-domain",
                f"zero-input final front s_inf={s_inf:.6g} must lie inside (0, {dom.L})",
                {"s_inf": s_inf, "L": dom.L},
            ))
        if cfg.s_r <= s_inf:
            out.append(Violation(
                "setpoint-reachability",
                "setpoint unreachable without freezing: "
                f"s_r={cfg.s_r} must exceed the zero-input final front {s_inf:.6g}",
                {"s_r": cfg.s_r, "lower_bound": s_inf},
            ))
        return out
    lower = setpoint_lower_bound_one_phase(init, p, dom)
    if cfg.s_r <= lower:
        out.append(Violation(
            "setpoint-reachability",
            "setpoint unreachable without freezing: "
            f"s_r={cfg.s_r} must exceed the energy lower bound {lower:.6g}",
            {"s_r": cfg.s_r, "lower_bound": lower},
        ))
    return out


def decay_rate_bound(cfg: ControllerConfig, p, dom: DomainSpec) -> float:
    """Guaranteed closed-loop decay rate of the squared L2 norm.

    one-phase: (1/8) min(alpha/s_r^2, c)
    two-phase: (1/8) min(alpha_l/L^2, 4 alpha_s/L^2, c)
    """
    if isinstance(p, TwoPhaseParams):
        return min(p.liquid.alpha / dom.L**2, 4.0 * p.solid.alpha / dom.L**2, cfg.c) / 8.0
    return min(p.alpha / cfg.s_r**2, cfg.c) / 8.0


class ZohController:
    """Zero-order-hold feedback source: resamples q = -c*E at each instant."""

    def __init__(self, cfg: ControllerConfig, p, sched: Schedule):
        self.cfg = cfg
        self.p = p
        self.sched = sched
        self.states: list[ControllerState] = []

    def sample(self, j: int, t: float, state) -> float:
        ctrl = self.states[-1] if self.states else None
        new = zoh_sample(ctrl, state, self.p, self.cfg, self.sched)
        assert new.j == j
        assert new.q == -self.cfg.c * new.energy
        self.states.append(new)
        return new.q


class SequenceFlux:
    """Open-loop source holding a precomputed q_j on each interval."""

    def __init__(self, q_values):
        self.q_values = np.asarray(q_values, dtype=float)

    def sample(self, j: int, t: float, state) -> float:
        if j >= len(self.q_values):
            return float(self.q_values[-1])
        return float(self.q_values[j])


class ConstantFlux:
    """Constant input, q(t) = value; value 0 gives the zero-input system."""

    def __init__(self, value: float = 0.0):
        self.value = float(value)

    def sample(self, j: int, t: float, state) -> float:
        return self.value


class TimeFlux:
    """Continuous-in-time prescribed input (no hold); for oracle runs."""

    def __init__(self, fn):
        self.fn = fn

    def __call__(self, t: float) -> float:
        return float(self.fn(t))
