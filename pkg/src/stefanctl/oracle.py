"""Classical similarity solution of the one-phase melting problem, used as
an independent accuracy oracle for the solver.

With a hot wall held at T_hot the front follows s(t) = 2 lam sqrt(alpha t)
where lam solves lam * exp(lam^2) * erf(lam) = St / sqrt(pi) and
St = cp (T_hot - Tm) / latent_heat.  Feeding the solver the boundary heat
flux of this solution,

    q(t) = k (T_hot - Tm) / (erf(lam) sqrt(pi alpha t)),

must reproduce the front track; the comparison starts from an exact profile
snapshot at t0 > 0 because the similarity solution is singular at t = 0.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import erf, exp, pi, sqrt

import numpy as np

from .control import TimeFlux
from .core import DomainSpec, MaterialParams, ParameterError
from .one_phase import OnePhaseState, interface_velocity, simulate


def stefan_number(p: MaterialParams, T_hot: float) -> float:
    return p.cp * (T_hot - p.Tm) / p.latent_heat


def solve_lambda(St: float, tol: float = 1e-12) -> float:
    """Root of lam e^{lam^2} erf(lam) = St/sqrt(pi), by bisection.

    The left side is zero at 0 and strictly increasing, so the root is
    unique; bisection runs until the bracket is below ``tol``.
    """
    if St <= 0:
        raise ParameterError("Stefan number must be positive")
    target = St / sqrt(pi)

    def f(lam):
        return lam * exp(lam * lam) * erf(lam) - target

    lo, hi = 0.0, 1.0
    while f(hi) < 0:
        hi *= 2.0
        if hi > 1e3:
            raise ParameterError("failed to bracket the front-growth root")
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if f(mid) > 0:
            hi = mid
        else:
            lo = mid
    return 0.5 * (lo + hi)


@dataclass(frozen=True)
class SimilaritySolution:
    """Exact melting solution for a given material and hot-wall temperature."""

    p: MaterialParams
    T_hot: float
    lam: float

    @classmethod
    def build(cls, p: MaterialParams, T_hot: float) -> "SimilaritySolution":
        return cls(p=p, T_hot=T_hot, lam=solve_lambda(stefan_number(p, T_hot)))

    def front(self, t):
        return 2.0 * self.lam * np.sqrt(self.p.alpha * np.asarray(t, dtype=float))

    def time_of_front(self, s: float) -> float:
        return (s / (2.0 * self.lam)) ** 2 / self.p.alpha

    def boundary_flux(self, t: float) -> float:
        dT = self.T_hot - self.p.Tm
        return self.p.k * dT / (erf(self.lam) * sqrt(pi * self.p.alpha * t))

    def profile_u(self, x: np.ndarray, t: float) -> np.ndarray:
        """Error temperature T - Tm at positions x, valid for x <= s(t)."""
        dT = self.T_hot - self.p.Tm
        arg = np.asarray(x, dtype=float) / (2.0 * sqrt(self.p.alpha * t))
        return dT * (1.0 - np.vectorize(erf)(arg) / erf(self.lam))

    def state_at(self, t: float, N: int) -> OnePhaseState:
        s = float(self.front(t))
        xi = np.linspace(0.0, 1.0, N + 1)
        st = OnePhaseState(t=t, s=s, u=self.profile_u(s * xi, t))
        return st


def track_error(p: MaterialParams, N: int, T_hot: float = 47.0,
                s_start: float = 0.005, s_end: float = 0.012,
                L: float = 0.05, skip_fraction: float = 0.05,
                cfl_safety: float = 2.0) -> dict:
    """Drive the solver with the exact boundary flux and measure front error.

    Returns the maximum relative front error over the window past
    ``skip_fraction`` of the horizon, along with run metadata.
    """
    sol = SimilaritySolution.build(p, T_hot)
    t0 = sol.time_of_front(s_start)
    t1 = sol.time_of_front(s_end)
    dom = DomainSpec(L=L, N=N, cfl_safety=cfl_safety)
    state = sol.state_at(t0, N)
    state = OnePhaseState(t=t0, s=state.s, u=state.u,
                          sdot=interface_velocity(state, p))
    traj = simulate(state, p, dom, TimeFlux(sol.boundary_flux), s_r=s_end,
                    horizon=t1, stride=(t1 - t0) / 400.0)
    t = np.asarray(traj.t)
    s_num = np.asarray(traj.s)
    s_exact = sol.front(t)
    window = t >= t0 + skip_fraction * (t1 - t0)
    rel = np.abs(s_num[window] - s_exact[window]) / s_exact[window]
    return {
        "N": N,
        "lam": sol.lam,
        "t0": t0,
        "t1": t1,
        "max_rel_error": float(np.max(rel)),
        "status": traj.status,
    }


def convergence_table(p: MaterialParams, N_list, **kwargs) -> list[dict]:
    """Front-error refinement ladder with observed orders between levels."""
    rows = []
    for N in N_list:
        if N < 3:
            raise ParameterError("grid must have at least 3 points")
        rows.append(track_error(p, N, **kwargs))
    for i in range(1, len(rows)):
        ratio = rows[i - 1]["max_rel_error"] / rows[i]["max_rel_error"]
        h_ratio = rows[i]["N"] / rows[i - 1]["N"]
        rows[i]["observed_order"] = float(np.log(ratio) / np.log(h_ratio))
    return rows
