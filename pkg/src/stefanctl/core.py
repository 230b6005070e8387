"""Domain types, parameter derivation, and input validation shared by the
one- and two-phase solvers.

Units are SI throughout: m, s, kg, J, W; temperatures in degrees C (only
temperature *differences* matter to the dynamics, so any fixed offset works).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

# Nonnegativity monitor tolerance for temperatures (deg C).  Crank-Nicolson
# produces bounded round-off-scale undershoots that must not be flagged as
# physical-model violations.
TOL_VALID = 1e-9

# Floor for relative-error denominators (handles exactly-at-target starts).
EPS_FLOOR = 1e-30


class StefanError(Exception):
    """Base class for all package errors."""


class ParameterError(StefanError):
    """A physical parameter is out of its admissible range."""


class ScheduleError(StefanError):
    """A sampling schedule cannot be constructed as requested."""


class GainError(StefanError):
    """Controller gain incompatible with the sampling schedule (c*R >= 1)."""


class ConfigError(StefanError):
    """A run configuration failed validation; carries the violation list."""

    def __init__(self, violations: list["Violation"]):
        self.violations = violations
        super().__init__("; ".join(v.message for v in violations))


class ContractError(StefanError):
    """An operation was called outside its contract (e.g. off-schedule sampling)."""


class SolverError(StefanError):
    """Base class for time-stepping failures."""


class DomainExhaustedError(SolverError):
    """The interface left the admissible domain; the run was aborted."""


class NumericalError(SolverError):
    """Non-finite values or linear-solver breakdown during stepping."""


@dataclass(frozen=True)
class Violation:
    """One failed validation clause, identified by a stable code."""

    code: str
    message: str
    data: dict = field(default_factory=dict)


def derive_diffusivity(k: float, rho: float, cp: float) -> float:
    """Thermal diffusivity k / (rho * cp) in m^2/s."""
    if k <= 0 or rho <= 0 or cp <= 0:
        raise ParameterError(
            f"diffusivity needs positive k, rho, cp (got k={k}, rho={rho}, cp={cp})"
        )
    return k / (rho * cp)


def derive_beta(k: float, rho: float, latent_heat: float) -> float:
    """Interface response coefficient k / (rho * latent_heat) in m^2/(s*K).

    This is the factor converting the temperature gradient at the melt front
    into the front velocity.
    """
    if k <= 0 or rho <= 0 or latent_heat <= 0:
        raise ParameterError(
            "beta needs positive k, rho, latent heat "
            f"(got k={k}, rho={rho}, latent_heat={latent_heat})"
        )
    return k / (rho * latent_heat)


@dataclass(frozen=True)
class MaterialParams:
    """Physical constants of one phase.

    Parameters
    ----------
    rho : float
        Density, kg/m^3.
    cp : float
        Specific heat capacity, J/(kg K).
    k : float
        Thermal conductivity, W/(m K).
    latent_heat : float
        Latent heat of fusion, J/kg.
    Tm : float
        Melting temperature, deg C.
    """

    rho: float
    cp: float
    k: float
    latent_heat: float
    Tm: float

    def __post_init__(self):
        for name in ("rho", "cp", "k", "latent_heat"):
            if getattr(self, name) <= 0:
                raise ParameterError(f"{name} must be strictly positive")

    @property
    def alpha(self) -> float:
        """Thermal diffusivity, m^2/s."""
        return derive_diffusivity(self.k, self.rho, self.cp)

    @property
    def beta(self) -> float:
        """Front-velocity coefficient, m^2/(s K)."""
        return derive_beta(self.k, self.rho, self.latent_heat)


@dataclass(frozen=True)
class TwoPhaseParams:
    """Liquid and solid material constants sharing one melting temperature."""

    liquid: MaterialParams
    solid: MaterialParams

    def __post_init__(self):
        if self.liquid.Tm != self.solid.Tm:
            raise ParameterError("liquid and solid must share the melting temperature")

    @property
    def gamma(self) -> float:
        """Volumetric latent heat rho_l * latent_heat, J/m^3."""
        return self.liquid.rho * self.liquid.latent_heat

    @property
    def Tm(self) -> float:
        return self.liquid.Tm


@dataclass(frozen=True)
class DomainSpec:
    """Spatial domain and time-step policy.

    ``dt`` fixes the step size; leave it None to use the resolution-scaled
    policy dt = cfl_safety * 0.5 * s^2 * dxi^2 / alpha (capped at r/20 so ZOH
    switching instants stay resolved).  Both policies shorten the step that
    would straddle a sampling instant so samples are hit exactly.
    """

    L: float
    N: int
    dt: float | None = None
    cfl_safety: float = 1.0

    def __post_init__(self):
        if self.L <= 0:
            raise ParameterError("domain length must be positive")
        if self.N < 3:
            raise ParameterError("need at least 3 grid points")
        if self.dt is not None and self.dt <= 0:
            raise ParameterError("fixed time step must be positive")
        if self.cfl_safety <= 0:
            raise ParameterError("cfl_safety must be positive")

    @property
    def dxi(self) -> float:
        return 1.0 / self.N


@dataclass(frozen=True)
class Profile:
    """Initial temperature profile on a sub-interval [a, b] of the domain.

    kinds:
      linear   -- Tm + amplitude at the far end from the interface, dropping
                  linearly to Tm at the interface
      constant -- Tm + amplitude everywhere
      table    -- piecewise-linear through (x, T) pairs (absolute temps)
    """

    kind: str
    amplitude: float = 0.0
    x: tuple = ()
    T: tuple = ()

    def sample(self, xs: np.ndarray, a: float, b: float, Tm: float,
               interface: str = "right") -> np.ndarray:
        """Absolute temperatures at positions xs in [a, b].

        ``interface`` names which end of [a, b] touches the melt front (where
        the built-in shapes pin the temperature to Tm).
        """
        xs = np.asarray(xs, dtype=float)
        if self.kind == "constant":
            return np.full_like(xs, Tm + self.amplitude)
        if self.kind == "linear":
            frac = (xs - a) / (b - a)
            if interface == "right":
                return Tm + self.amplitude * (1.0 - frac)
            return Tm + self.amplitude * frac
        if self.kind == "table":
            if len(self.x) < 2:
                raise ParameterError("table profile needs at least two points")
            return np.interp(xs, np.asarray(self.x), np.asarray(self.T))
        raise ParameterError(f"unknown profile kind {self.kind!r}")


@dataclass(frozen=True)
class InitialData:
    """One-phase initial condition: front position and liquid profile on [0, s0]."""

    s0: float
    profile: Profile


@dataclass(frozen=True)
class TwoPhaseInitialData:
    """Two-phase initial condition: liquid profile on [0, s0], solid on [s0, L]."""

    s0: float
    liquid: Profile
    solid: Profile


def validate_initial_data(init: InitialData, dom: DomainSpec,
                          p: MaterialParams) -> list[Violation]:
    """Check the one-phase initial condition; empty list means valid.

    Accepts iff 0 < s0 < L and the sampled profile never drops below the
    melting temperature (within TOL_VALID-scale slack).
    """
    out: list[Violation] = []
    if not (0.0 < init.s0 < dom.L):
        out.append(Violation(
            "interface-outside-domain",
            f"initial front s0={init.s0} must lie strictly inside (0, {dom.L})",
            {"s0": init.s0, "L": dom.L},
        ))
        return out
    # The coordinate-stretched advection coefficient scales like sdot/s, so
    # absurdly thin initial layers are refused up front.
    if init.s0 < 1e-4 * dom.L:
        out.append(Violation(
            "degenerate-interface-start",
            f"initial front s0={init.s0} below 1e-4 of the domain length; "
            "the stretched-grid scheme cannot start this thin",
            {"s0": init.s0, "L": dom.L},
        ))
    xs = np.linspace(0.0, init.s0, dom.N + 1)
    T = init.profile.sample(xs, 0.0, init.s0, p.Tm, interface="right")
    if np.min(T) < p.Tm - 1e-12:
        out.append(Violation(
            "subcooled-initial-liquid",
            f"liquid profile dips {p.Tm - float(np.min(T)):.3g} deg C below melting",
            {"min_T": float(np.min(T)), "Tm": p.Tm},
        ))
    return out


def validate_two_phase_initial_data(init: TwoPhaseInitialData, dom: DomainSpec,
                                    p: TwoPhaseParams) -> list[Violation]:
    """Check the two-phase initial condition; empty list means valid."""
    out: list[Violation] = []
    if not (0.0 < init.s0 < dom.L):
        out.append(Violation(
            "interface-outside-domain",
            f"initial front s0={init.s0} must lie strictly inside (0, {dom.L})",
            {"s0": init.s0, "L": dom.L},
        ))
        return out
    if init.s0 < 1e-4 * dom.L:
        out.append(Violation(
            "degenerate-interface-start",
            f"initial front s0={init.s0} below 1e-4 of the domain length",
            {"s0": init.s0, "L": dom.L},
        ))
    xl = np.linspace(0.0, init.s0, dom.N + 1)
    Tl = init.liquid.sample(xl, 0.0, init.s0, p.Tm, interface="right")
    if np.min(Tl) < p.Tm - 1e-12:
        out.append(Violation(
            "subcooled-initial-liquid",
            f"liquid profile dips {p.Tm - float(np.min(Tl)):.3g} deg C below melting",
            {"min_T": float(np.min(Tl))},
        ))
    xs = np.linspace(init.s0, dom.L, dom.N + 1)
    Ts = init.solid.sample(xs, init.s0, dom.L, p.Tm, interface="left")
    if np.max(Ts) > p.Tm + 1e-12:
        out.append(Violation(
            "superheated-initial-solid",
            f"solid profile rises {float(np.max(Ts)) - p.Tm:.3g} deg C above melting",
            {"max_T": float(np.max(Ts))},
        ))
    return out


@dataclass(frozen=True)
class Schedule:
    """Sampling instants t_0 = 0 < t_1 < ... with gap bounds r <= tau_j <= R."""

    instants: np.ndarray
    r: float
    R: float
    kind: str = "explicit"

    def __post_init__(self):
        t = np.asarray(self.instants, dtype=float)
        object.__setattr__(self, "instants", t)
        if self.r <= 0:
            raise ScheduleError("lower sampling diameter r must be positive")
        if self.r > self.R:
            raise ScheduleError(f"need r <= R (got r={self.r}, R={self.R})")
        if t.size < 2 or t[0] != 0.0:
            raise ScheduleError("schedule must start at t=0 and contain 2+ instants")
        gaps = np.diff(t)
        slack = 1e-9 * max(self.R, 1.0)
        if np.any(gaps < self.r - slack) or np.any(gaps > self.R + slack):
            raise ScheduleError("schedule gaps violate the [r, R] diameter bounds")

    @property
    def gaps(self) -> np.ndarray:
        return np.diff(self.instants)

    @property
    def horizon(self) -> float:
        return float(self.instants[-1])


def make_schedule(kind: str, horizon: float, r: float | None = None,
                  R: float | None = None, seed: int | None = None,
                  instants: Sequence[float] | None = None) -> Schedule:
    """Build a sampling schedule covering [0, horizon].

    kinds:
      periodic -- constant gap R (r defaults to R)
      uniform  -- gaps drawn i.i.d. from U[r, R] with the given seed
      explicit -- instants given verbatim (diameters inferred if omitted)
    """
    if horizon <= 0:
        raise ScheduleError("horizon must be positive")
    if kind == "periodic":
        if R is None or R <= 0:
            raise ScheduleError("periodic schedule needs a positive period R")
        if r is None:
            r = R
        n = int(np.ceil(horizon / R - 1e-12))
        t = np.arange(n + 1, dtype=float) * R
        if t[-1] < horizon - 1e-9 * R:
            t = np.append(t, t[-1] + R)
        return Schedule(t, r=r, R=R, kind="periodic")
    if kind == "uniform":
        if r is None or R is None:
            raise ScheduleError("uniform-random schedule needs both r and R")
        if r <= 0 or r > R:
            raise ScheduleError(f"need 0 < r <= R (got r={r}, R={R})")
        rng = np.random.default_rng(seed)
        ts = [0.0]
        while ts[-1] < horizon:
            ts.append(ts[-1] + rng.uniform(r, R))
        return Schedule(np.asarray(ts), r=r, R=R, kind="uniform")
    if kind == "explicit":
        if instants is None:
            raise ScheduleError("explicit schedule needs the instants list")
        t = np.asarray(instants, dtype=float)
        gaps = np.diff(t)
        if gaps.size == 0 or np.any(gaps <= 0):
            raise ScheduleError("explicit instants must be strictly increasing")
        if r is None:
            r = float(np.min(gaps))
        if R is None:
            R = float(np.max(gaps))
        return Schedule(t, r=r, R=R, kind="explicit")
    raise ScheduleError(f"unknown schedule kind {kind!r}")


def validate_gain_vs_schedule(c: float, sched: Schedule) -> list[Violation]:
    """Require c*R < 1 strictly (at equality the held input collapses to zero
    after one sample and the setpoint is never reached)."""
    if c <= 0:
        return [Violation("gain-nonpositive", f"controller gain must be positive (got {c})",
                          {"c": c})]
    if c * sched.R >= 1.0:
        return [Violation(
            "gain-vs-schedule",
            f"gain-sampling condition violated: R={sched.R} must be < 1/c={1.0 / c}",
            {"R": sched.R, "inv_c": 1.0 / c, "cR": c * sched.R},
        )]
    return []
