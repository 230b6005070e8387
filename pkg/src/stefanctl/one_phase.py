"""One-phase Stefan solver on a front-fixed grid.

The moving domain [0, s(t)] is mapped to xi = x/s(t) in [0, 1]; the heat
equation becomes u_t = (alpha/s^2) u_xixi + (sdot xi / s) u_xi with the flux
condition u_xi(0) = -q s / k imposed through a ghost node and the front node
pinned at the melting temperature.  Time stepping is Crank-Nicolson with a
two-pass predictor-corrector on the front ODE sdot = -(beta/s) u_xi(1); the
hot loop lives in the kernel backends (see ``kernels``).
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from . import diagnostics, kernels
from .control import TimeFlux, internal_energy
from .core import (
    TOL_VALID,
    DomainSpec,
    DomainExhaustedError,
    InitialData,
    MaterialParams,
    NumericalError,
    Schedule,
)
from .trajectory import SampleRecord, Trajectory


@dataclass(frozen=True)
class OnePhaseState:
    """Front-fixed solver state; u[i] = T(s*xi_i) - Tm with u[-1] pinned to 0."""

    t: float
    s: float
    u: np.ndarray
    sdot: float = 0.0

    def __post_init__(self):
        u = np.asarray(self.u, dtype=float).copy()
        u[-1] = 0.0
        object.__setattr__(self, "u", u)

    @property
    def N(self) -> int:
        return len(self.u) - 1


def make_state(init: InitialData, dom: DomainSpec, p: MaterialParams) -> OnePhaseState:
    """Sample the initial profile onto the front-fixed grid."""
    xi = np.linspace(0.0, 1.0, dom.N + 1)
    T = init.profile.sample(init.s0 * xi, 0.0, init.s0, p.Tm, interface="right")
    st = OnePhaseState(t=0.0, s=init.s0, u=T - p.Tm)
    return replace(st, sdot=interface_velocity(st, p))


def interface_velocity(st: OnePhaseState, p: MaterialParams) -> float:
    """Front speed -(beta/s) u_xi(1) with the second-order one-sided stencil."""
    dxi = 1.0 / st.N
    grad = (3.0 * st.u[-1] - 4.0 * st.u[-2] + st.u[-3]) / (2.0 * dxi)
    return -(p.beta / st.s) * grad


def _work(n: int):
    return tuple(np.empty(n + 1) for _ in range(5))


def _cfl_coef(dom: DomainSpec, alpha: float) -> float:
    # dt = cfl_coef * s^2 resolves the per-cell diffusion time on the
    # stretched grid; scales out as the melt layer thickens.
    return dom.cfl_safety * 0.5 * dom.dxi**2 / alpha


def step(st: OnePhaseState, q: float, dt: float, p: MaterialParams,
         dom: DomainSpec) -> OnePhaseState:
    """Advance one Crank-Nicolson step of size dt under constant flux q."""
    if not np.isfinite(q):
        raise NumericalError("flux input must be finite")
    u = st.u.copy()
    lo, dg, up, rhs, unew = _work(st.N)
    status, s, t, sdot, nsteps, *_ = kernels.advance_one_phase(
        u, st.s, st.t, st.t + dt, q, p.alpha, p.beta, p.k,
        0.0, np.inf, dt, 0.25 * st.s, dom.L, 1, lo, dg, up, rhs, unew)
    if status == kernels.STATUS_DOMAIN:
        raise DomainExhaustedError(f"front left (0, {dom.L}) during step at t={st.t}")
    if status == kernels.STATUS_NUMERICAL:
        raise NumericalError(f"non-finite state or solver breakdown at t={st.t}")
    return OnePhaseState(t=t, s=s, u=u, sdot=sdot)


class _Recorder:
    """Accumulates trajectory rows and running whole-run extrema."""

    def __init__(self, p, s_r, transform, phase="one-phase"):
        self.p = p
        self.s_r = s_r
        self.transform = transform
        self.phase = phase
        self.rows = {k: [] for k in ("t", "s", "sdot", "q", "T_boundary",
                                     "energy", "psi", "V", "valid")}
        self.min_u = np.inf
        self.min_T_boundary = np.inf
        self.min_ds = np.inf

    def add(self, st, q, span_min_u, span_min_u0, span_min_ds, L):
        self.min_u = min(self.min_u, span_min_u)
        self.min_T_boundary = min(self.min_T_boundary, self.p.Tm + span_min_u0)
        self.min_ds = min(self.min_ds, span_min_ds)
        X = st.s - self.s_r
        valid = (span_min_u >= -TOL_VALID) and (0.0 < st.s < L)
        r = self.rows
        r["t"].append(st.t)
        r["s"].append(st.s)
        r["sdot"].append(st.sdot)
        r["q"].append(q)
        r["T_boundary"].append(self.p.Tm + st.u[0])
        r["energy"].append(internal_energy(st, self.p, self.s_r))
        r["psi"].append(diagnostics.psi_norm(st.u, st.s, X))
        if self.transform is not None:
            w = diagnostics.backstepping_forward(st.u, st.s, X, self.transform)
            r["V"].append(diagnostics.lyapunov_V(w, st.s, X, self.transform))
        else:
            r["V"].append(np.nan)
        r["valid"].append(1.0 if valid else 0.0)

    def build(self, samples, status, meta) -> Trajectory:
        meta = dict(meta)
        meta.update(min_u=self.min_u, min_T_boundary=self.min_T_boundary,
                    min_front_increment=self.min_ds)
        arrays = {k: np.asarray(v) for k, v in self.rows.items()}
        return Trajectory(phase=self.phase, samples=samples, status=status,
                          meta=meta, **arrays)


def _merge_events(horizon: float, stride: float, instants: np.ndarray) -> np.ndarray:
    grid = np.arange(0.0, horizon + 0.5 * stride, stride)
    ev = np.concatenate([grid, instants[instants <= horizon * (1 + 1e-12)],
                         [horizon]])
    ev = np.sort(ev)
    tol = 1e-9 * max(1.0, horizon)
    keep = np.concatenate([[True], np.diff(ev) > tol])
    ev = ev[keep]
    return ev[ev <= horizon + tol]


def simulate(init: InitialData | OnePhaseState, p: MaterialParams,
             dom: DomainSpec, flux, s_r: float,
             schedule: Schedule | None = None, horizon: float | None = None,
             stride: float | None = None,
             transform: diagnostics.BacksteppingConfig | None = None) -> Trajectory:
    """Run the closed- or open-loop system and record its trajectory.

    ``flux`` is sampled at schedule instants (objects with a
    ``sample(j, t, state)`` method) or evaluated continuously in time
    (``TimeFlux``) when no schedule is given.  On front escape or numerical
    breakdown the partial trajectory is returned with a non-"completed"
    status instead of raising.
    """
    st = init if isinstance(init, OnePhaseState) else make_state(init, dom, p)
    if horizon is None:
        if schedule is None:
            raise ValueError("need a horizon when no schedule is given")
        horizon = schedule.horizon
    if stride is None:
        stride = horizon / 2000.0
    rec = _Recorder(p, s_r, transform)
    cfl = _cfl_coef(dom, p.alpha)
    dt_cap = schedule.r / 20.0 if schedule is not None else np.inf
    dt_force = 0.0
    if dom.dt is not None:
        dt_force = min(dom.dt, dt_cap)
    # collapse guard: with nonnegative inputs the front never retreats, so a
    # front at a quarter of its starting thickness means the run has left the
    # regime the model covers; abort rather than chase s -> 0 with dt ~ s^2
    s_floor = 0.25 * st.s
    lo, dg, up, rhs, unew = _work(st.N)
    u = st.u.copy()
    s, t, sdot = st.s, st.t, st.sdot
    samples: list[SampleRecord] = []
    status = "completed"
    n_steps = 0
    meta = {"phase": "one-phase", "N": st.N, "L": dom.L, "s_r": s_r,
            "horizon": horizon, "stride": stride, "backend": kernels.BACKEND}

    if schedule is not None:
        instants = schedule.instants
        events = _merge_events(horizon, stride, instants)
        tol = 1e-9 * max(1.0, horizon)
        j = 0
        q = 0.0
        state = OnePhaseState(t=t, s=s, u=u, sdot=sdot)
        if abs(instants[0] - t) <= tol:
            q = flux.sample(0, t, state)
            tau = instants[1] - instants[0] if len(instants) > 1 else np.nan
            samples.append(SampleRecord(0, t, internal_energy(state, p, s_r), q, tau))
            j = 1
        rec.add(state, q, float(np.min(u)), float(u[0]), 0.0, dom.L)
        for e in events[1:]:
            kst, s, t, sdot, n, mu, mu0, mds = kernels.advance_one_phase(
                u, s, t, e, q, p.alpha, p.beta, p.k,
                cfl, dt_cap, dt_force, s_floor, dom.L, 0, lo, dg, up, rhs, unew)
            n_steps += n
            state = OnePhaseState(t=t, s=s, u=u, sdot=sdot)
            if kst in (kernels.STATUS_DOMAIN, kernels.STATUS_NUMERICAL):
                status = ("domain-exhausted" if kst == kernels.STATUS_DOMAIN
                          else "numerical-error")
                rec.add(state, q, mu, mu0, mds, dom.L)
                break
            if j < len(instants) and abs(e - instants[j]) <= tol:
                energy = internal_energy(state, p, s_r)
                q = flux.sample(j, t, state)
                tau = (instants[j + 1] - instants[j]
                       if j + 1 < len(instants) else np.nan)
                samples.append(SampleRecord(j, t, energy, q, tau))
                j += 1
            rec.add(state, q, mu, mu0, mds, dom.L)
    else:
        if not isinstance(flux, TimeFlux):
            raise ValueError("continuous-time runs need a TimeFlux input")
        grid = _merge_events(horizon, stride, np.zeros(1))
        state = OnePhaseState(t=t, s=s, u=u, sdot=sdot)
        rec.add(state, flux(t), float(np.min(u)), float(u[0]), 0.0, dom.L)
        for e in grid[1:]:
            mu, mu0, mds = np.inf, np.inf, np.inf
            aborted = False
            while t < e - 1e-12 * max(1.0, horizon):
                dt = min(cfl * s * s, dt_cap, e - t) if dt_force == 0.0 \
                    else min(dt_force, e - t)
                qbar = 0.5 * (flux(t) + flux(t + dt))
                kst, s, t, sdot, n, m1, m2, m3 = kernels.advance_one_phase(
                    u, s, t, e, qbar, p.alpha, p.beta, p.k,
                    0.0, np.inf, dt, s_floor, dom.L, 1, lo, dg, up, rhs, unew)
                n_steps += n
                mu, mu0, mds = min(mu, m1), min(mu0, m2), min(mds, m3)
                if kst in (kernels.STATUS_DOMAIN, kernels.STATUS_NUMERICAL):
                    status = ("domain-exhausted" if kst == kernels.STATUS_DOMAIN
                              else "numerical-error")
                    aborted = True
                    break
            state = OnePhaseState(t=t, s=s, u=u, sdot=sdot)
            rec.add(state, flux(t), mu, mu0, mds, dom.L)
            if aborted:
                break

    meta["n_steps"] = n_steps
    return rec.build(samples, status, meta)
