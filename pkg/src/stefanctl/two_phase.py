"""Two-phase Stefan solver: liquid and solid heat equations on separate
front-fixed grids, coupled through the flux-balance front condition

    gamma sdot = -k_l dT_l/dx(s) + k_s dT_s/dx(s),  gamma = rho_l * latent_heat.

The liquid lives on xi = x/s in [0, 1] as in the one-phase solver; the solid
lives on eta = (x - s)/(L - s) with the interface node pinned at melting and
an insulated far end.  Both phases advance with the shared two-pass
predictor-corrector on s.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from . import diagnostics, kernels
from .control import internal_energy
from .core import (
    TOL_VALID,
    DomainSpec,
    DomainExhaustedError,
    NumericalError,
    Schedule,
    TwoPhaseInitialData,
    TwoPhaseParams,
)
from .trajectory import SampleRecord, Trajectory


@dataclass(frozen=True)
class TwoPhaseState:
    """Liquid profile u on xi-grid, solid profile v on eta-grid, front s."""

    t: float
    s: float
    u: np.ndarray
    v: np.ndarray
    L: float
    sdot: float = 0.0

    def __post_init__(self):
        u = np.asarray(self.u, dtype=float).copy()
        v = np.asarray(self.v, dtype=float).copy()
        u[-1] = 0.0  # liquid side of the front at melting
        v[0] = 0.0   # solid side of the front at melting
        object.__setattr__(self, "u", u)
        object.__setattr__(self, "v", v)

    @property
    def N_l(self) -> int:
        return len(self.u) - 1

    @property
    def N_s(self) -> int:
        return len(self.v) - 1


def make_state(init: TwoPhaseInitialData, dom: DomainSpec,
               p: TwoPhaseParams) -> TwoPhaseState:
    xi = np.linspace(0.0, 1.0, dom.N + 1)
    eta = np.linspace(0.0, 1.0, dom.N + 1)
    Tl = init.liquid.sample(init.s0 * xi, 0.0, init.s0, p.Tm, interface="right")
    Ts = init.solid.sample(init.s0 + (dom.L - init.s0) * eta, init.s0, dom.L,
                           p.Tm, interface="left")
    st = TwoPhaseState(t=0.0, s=init.s0, u=Tl - p.Tm, v=Ts - p.Tm, L=dom.L)
    return replace(st, sdot=stefan_velocity(st, p))


def interface_gradients(st: TwoPhaseState, p: TwoPhaseParams) -> tuple[float, float]:
    """Physical temperature gradients (liquid side, solid side) at the front."""
    dxi = 1.0 / st.N_l
    deta = 1.0 / st.N_s
    gl = (3.0 * st.u[-1] - 4.0 * st.u[-2] + st.u[-3]) / (2.0 * dxi) / st.s
    gs = (-3.0 * st.v[0] + 4.0 * st.v[1] - st.v[2]) / (2.0 * deta) / (st.L - st.s)
    return gl, gs


def stefan_velocity(st: TwoPhaseState, p: TwoPhaseParams) -> float:
    """Front speed from the flux balance across the interface."""
    gl, gs = interface_gradients(st, p)
    return (-p.liquid.k * gl + p.solid.k * gs) / p.gamma


def s_infinity(init: TwoPhaseInitialData, p: TwoPhaseParams,
               dom: DomainSpec) -> float:
    """Final front position of the zero-input system, from the initial data.

    s_inf = s0 + (k_l/(alpha_l gamma)) int_0^s0 (T_l0 - Tm) dx
              + (k_s/(alpha_s gamma)) int_s0^L (T_s0 - Tm) dx
    evaluated with the trapezoidal rule (exact for the built-in linear and
    constant profiles).
    """
    pl, ps = p.liquid, p.solid
    xl = np.linspace(0.0, init.s0, dom.N + 1)
    Tl = init.liquid.sample(xl, 0.0, init.s0, p.Tm, interface="right")
    xs = np.linspace(init.s0, dom.L, dom.N + 1)
    Ts = init.solid.sample(xs, init.s0, dom.L, p.Tm, interface="left")
    liq = np.trapezoid(Tl - p.Tm, xl)
    sol = np.trapezoid(Ts - p.Tm, xs)
    return float(init.s0 + pl.k / (pl.alpha * p.gamma) * liq
                 + ps.k / (ps.alpha * p.gamma) * sol)


def _bounds(dom: DomainSpec, n_l: int, n_s: int) -> tuple[float, float]:
    # abort before the solid thins below ~10 nominal cells (near-total melt)
    # or the liquid collapses to a vanishing sliver; the stretched-grid
    # coefficients blow up on either
    return 1e-4 * dom.L, dom.L * (1.0 - 10.0 / n_s)


def step(st: TwoPhaseState, q: float, dt: float, p: TwoPhaseParams,
         dom: DomainSpec) -> TwoPhaseState:
    """Advance one coupled Crank-Nicolson step of size dt under flux q."""
    if not np.isfinite(q):
        raise NumericalError("flux input must be finite")
    u = st.u.copy()
    v = st.v.copy()
    n = max(st.N_l, st.N_s)
    lo, dg, up, rhs, wnew, vnew = (np.empty(n + 1) for _ in range(6))
    s_min, s_max = _bounds(dom, st.N_l, st.N_s)
    pl, ps = p.liquid, p.solid
    status, s, t, sdot, *_ = kernels.advance_two_phase(
        u, v, st.s, st.t, st.t + dt, q,
        pl.alpha, pl.beta, pl.k, ps.alpha, ps.k, p.gamma, st.L,
        0.0, 0.0, np.inf, dt, s_min, s_max, 1,
        lo, dg, up, rhs, wnew, vnew)
    if status == kernels.STATUS_DOMAIN:
        raise DomainExhaustedError(
            f"phase exhausted: front left ({s_min:.4g}, {s_max:.4g}) at t={st.t}")
    if status == kernels.STATUS_NUMERICAL:
        raise NumericalError(f"non-finite state or solver breakdown at t={st.t}")
    return TwoPhaseState(t=t, s=s, u=u, v=v, L=st.L, sdot=sdot)


def simulate(init: TwoPhaseInitialData | TwoPhaseState, p: TwoPhaseParams,
             dom: DomainSpec, flux, s_r: float,
             schedule: Schedule | None = None, horizon: float | None = None,
             stride: float | None = None,
             transform: diagnostics.BacksteppingConfig | None = None) -> Trajectory:
    """Run the two-phase system under a sampled input and record it.

    Rows additionally carry the solid squared norm V2 and the per-span
    extrema of the front gradients, which the validity monitors consume.
    """
    st = init if isinstance(init, TwoPhaseState) else make_state(init, dom, p)
    if horizon is None:
        if schedule is None:
            raise ValueError("need a horizon when no schedule is given")
        horizon = schedule.horizon
    if stride is None:
        stride = horizon / 2000.0
    pl, ps = p.liquid, p.solid
    cfl_l = dom.cfl_safety * 0.5 * (1.0 / st.N_l) ** 2 / pl.alpha
    cfl_s = dom.cfl_safety * 0.5 * (1.0 / st.N_s) ** 2 / ps.alpha
    dt_cap = schedule.r / 20.0 if schedule is not None else np.inf
    dt_force = min(dom.dt, dt_cap) if dom.dt is not None else 0.0
    s_min, s_max = _bounds(dom, st.N_l, st.N_s)
    n = max(st.N_l, st.N_s)
    lo, dg, up, rhs, wnew, vnew = (np.empty(n + 1) for _ in range(6))
    u = st.u.copy()
    v = st.v.copy()
    s, t, sdot = st.s, st.t, st.sdot

    if schedule is None:
        raise ValueError("two-phase runs are schedule-driven; use ConstantFlux(0) "
                         "with a schedule for the zero-input system")

    from .one_phase import _merge_events

    rows = {k: [] for k in ("t", "s", "sdot", "q", "T_boundary", "energy",
                            "psi", "V", "valid", "V2", "grad_liq", "grad_sol")}
    samples: list[SampleRecord] = []
    status = "completed"
    n_steps = 0
    min_u_all, max_v_all, min_T0 = np.inf, -np.inf, np.inf
    meta = {"phase": "two-phase", "N_l": st.N_l, "N_s": st.N_s, "L": dom.L,
            "s_r": s_r, "horizon": horizon, "stride": stride,
            "backend": kernels.BACKEND, "gamma": p.gamma}

    def add_row(state, q, span_min_u, span_max_v, span_min_u0, gl, gs):
        nonlocal min_u_all, max_v_all, min_T0
        min_u_all = min(min_u_all, span_min_u)
        max_v_all = max(max_v_all, span_max_v)
        min_T0 = min(min_T0, p.Tm + span_min_u0)
        X = state.s - s_r
        valid = (span_min_u >= -TOL_VALID and span_max_v <= TOL_VALID
                 and 0.0 < state.s < dom.L)
        rows["t"].append(state.t)
        rows["s"].append(state.s)
        rows["sdot"].append(state.sdot)
        rows["q"].append(q)
        rows["T_boundary"].append(p.Tm + state.u[0])
        rows["energy"].append(internal_energy(state, p, s_r))
        rows["psi"].append(diagnostics.psi_norm(state.u, state.s, X,
                                                v=state.v, L=dom.L))
        if transform is not None:
            w = diagnostics.backstepping_forward(state.u, state.s, X, transform)
            rows["V"].append(diagnostics.lyapunov_V(w, state.s, X, transform))
        else:
            rows["V"].append(np.nan)
        rows["valid"].append(1.0 if valid else 0.0)
        rows["V2"].append((dom.L - state.s)
                          * np.trapezoid(state.v**2, dx=1.0 / state.N_s))
        rows["grad_liq"].append(gl)
        rows["grad_sol"].append(gs)

    instants = schedule.instants
    events = _merge_events(horizon, stride, instants)
    tol = 1e-9 * max(1.0, horizon)
    j = 0
    q = 0.0
    state = TwoPhaseState(t=t, s=s, u=u, v=v, L=dom.L, sdot=sdot)
    if abs(instants[0] - t) <= tol:
        q = flux.sample(0, t, state)
        tau = instants[1] - instants[0] if len(instants) > 1 else np.nan
        samples.append(SampleRecord(0, t, internal_energy(state, p, s_r), q, tau))
        j = 1
    gl0, gs0 = interface_gradients(state, p)
    add_row(state, q, float(np.min(u)), float(np.max(v)), float(u[0]), gl0, gs0)

    # stall insurance: no sane event span needs this many steps; a freezing
    # front chasing the dt ~ s^2 policy toward the floor would
    max_steps_per_span = 20_000_000
    for e in events[1:]:
        kst, s, t, sdot, n_, mu, mv, mu0, mgl, mgs = kernels.advance_two_phase(
            u, v, s, t, e, q, pl.alpha, pl.beta, pl.k, ps.alpha, ps.k,
            p.gamma, dom.L, cfl_l, cfl_s, dt_cap, dt_force,
            s_min, s_max, max_steps_per_span, lo, dg, up, rhs, wnew, vnew)
        n_steps += n_
        state = TwoPhaseState(t=t, s=s, u=u, v=v, L=dom.L, sdot=sdot)
        if kst != kernels.STATUS_OK:
            status = ("phase-exhausted" if kst == kernels.STATUS_DOMAIN
                      else "numerical-error")
            add_row(state, q, mu, mv, mu0, mgl, mgs)
            break
        if j < len(instants) and abs(e - instants[j]) <= tol:
            energy = internal_energy(state, p, s_r)
            q = flux.sample(j, t, state)
            tau = instants[j + 1] - instants[j] if j + 1 < len(instants) else np.nan
            samples.append(SampleRecord(j, t, energy, q, tau))
            j += 1
        add_row(state, q, mu, mv, mu0, mgl, mgs)

    meta.update(min_u=min_u_all, max_v=max_v_all, min_T_boundary=min_T0,
                n_steps=n_steps)
    arrays = {k: np.asarray(val) for k, val in rows.items()}
    return Trajectory(phase="two-phase", samples=samples, status=status,
                      meta=meta, **arrays)


def validity_monitor(traj: Trajectory, p: TwoPhaseParams, dom: DomainSpec,
                     s_inf: float, tol_valid: float = TOL_VALID) -> dict:
    """Model-validity report for a completed two-phase run.

    Per-row checks: liquid at/above melting and solid at/below melting (via
    the recorded validity flags), front inside (0, L), nonpositive front
    gradients on both sides, and the cumulative-input condition
    0 < gamma*s_inf + int_0^t q < gamma*L.
    """
    s = np.asarray(traj.s)
    t = np.asarray(traj.t)
    q = np.asarray(traj.q)
    flags_ok = bool(np.all(np.asarray(traj.valid) > 0.5))
    inside = bool(np.all((s > 0.0) & (s < dom.L)))
    # held input is constant between rows, so the left-endpoint rule is exact
    cumulative = np.concatenate([[0.0], np.cumsum(q[:-1] * np.diff(t))])
    window = p.gamma * s_inf + cumulative
    cumulative_ok = bool(np.all((window > 0.0) & (window < p.gamma * dom.L)))
    grad_tol = tol_valid * max(1.0, 1.0 / dom.L)
    flux_signs_ok = True
    if traj.grad_liq is not None:
        flux_signs_ok = bool(np.all(np.asarray(traj.grad_liq) <= grad_tol)
                             and np.all(np.asarray(traj.grad_sol) <= grad_tol))
    report = {
        "liquid_above_melting_and_solid_below": flags_ok,
        "front_inside_domain": inside,
        "cumulative_input_window": cumulative_ok,
        "front_flux_signs": flux_signs_ok,
        "max_window_fraction": float(np.max(window) / (p.gamma * dom.L)),
        "s_inf": s_inf,
    }
    report["passed"] = flags_ok and inside and cumulative_ok and flux_signs_ok
    return report
