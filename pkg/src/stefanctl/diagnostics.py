"""Trajectory diagnostics: squared-L2 norm, energy-conservation residuals,
the Volterra state transform pair with explicit kernels, the associated
Lyapunov value, decay-envelope fitting, and validity reporting.

The transform pair maps the error state (u, X) to a target state (w, X)
whose boundary value at the front is eps*X:

    w(x) = u(x) - (beta/alpha) int_x^s phi(x-y) u(y) dy - phi(x-s) X
    u(x) = w(x) - (beta/alpha) int_x^s psi(x-y) w(y) dy - psi(x-s) X

with phi(z) = (c/beta) z - eps and
psi(z) = exp(lam z) (p sin(om z) + eps cos(om z)),
lam = beta*eps/(2 alpha), om = sqrt((4 alpha c - (eps beta)^2)/(4 alpha^2)),
p = -(2 alpha c - (eps beta)^2)/(2 alpha beta om).  The parameter eps must
satisfy 0 < eps < 2 sqrt(alpha c)/beta so om is real.  Integrals use the
trapezoidal rule on the solver grid.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import EPS_FLOOR, TOL_VALID, MaterialParams, ParameterError


@dataclass(frozen=True)
class BacksteppingConfig:
    """Transform parameter eps plus the derived kernel constants."""

    eps: float
    alpha: float
    beta: float
    c: float

    def __post_init__(self):
        cap = 2.0 * np.sqrt(self.alpha * self.c) / self.beta
        if not (0.0 < self.eps < cap):
            raise ParameterError(
                f"transform parameter eps={self.eps} outside (0, {cap:.6g})"
            )

    @classmethod
    def from_params(cls, p: MaterialParams, c: float,
                    eps: float | None = None) -> "BacksteppingConfig":
        """Default eps sits at half the admissible cap 2*sqrt(alpha c)/beta."""
        cap = 2.0 * np.sqrt(p.alpha * c) / p.beta
        return cls(eps=0.5 * cap if eps is None else eps,
                   alpha=p.alpha, beta=p.beta, c=c)

    @property
    def lam(self) -> float:
        return self.beta * self.eps / (2.0 * self.alpha)

    @property
    def omega(self) -> float:
        return np.sqrt((4.0 * self.alpha * self.c - (self.eps * self.beta) ** 2)
                       / (4.0 * self.alpha**2))

    @property
    def p_coef(self) -> float:
        return -(2.0 * self.alpha * self.c - (self.eps * self.beta) ** 2) \
            / (2.0 * self.alpha * self.beta * self.omega)

    def phi(self, z):
        return (self.c / self.beta) * z - self.eps

    def psi_kernel(self, z):
        z = np.asarray(z, dtype=float)
        return np.exp(self.lam * z) * (self.p_coef * np.sin(self.omega * z)
                                       + self.eps * np.cos(self.omega * z))


def _volterra_apply(kernel_vals: np.ndarray, f: np.ndarray, s: float) -> np.ndarray:
    """Row-wise trapezoid of K[i, j] * f[j] over j = i..N (dx = s/N)."""
    n = len(f) - 1
    dx = s / n
    upper = np.triu(kernel_vals)
    out = upper @ f - 0.5 * (np.diag(kernel_vals) * f + kernel_vals[:, n] * f[n])
    out *= dx
    out[n] = 0.0
    return out


def _kernel_matrix(fn, s: float, n: int) -> np.ndarray:
    xi = np.linspace(0.0, 1.0, n + 1)
    return fn(s * (xi[:, None] - xi[None, :]))


def backstepping_forward(u: np.ndarray, s: float, X: float,
                         bcfg: BacksteppingConfig) -> np.ndarray:
    """Map the error profile to the target profile; w(s) = eps*X by construction."""
    u = np.asarray(u, dtype=float)
    n = len(u) - 1
    xi = np.linspace(0.0, 1.0, n + 1)
    K = _kernel_matrix(bcfg.phi, s, n)
    integral = _volterra_apply(K, u, s)
    return u - (bcfg.beta / bcfg.alpha) * integral - bcfg.phi(s * (xi - 1.0)) * X


def backstepping_inverse(w: np.ndarray, s: float, X: float,
                         bcfg: BacksteppingConfig) -> np.ndarray:
    """Map the target profile back to the error profile."""
    w = np.asarray(w, dtype=float)
    n = len(w) - 1
    xi = np.linspace(0.0, 1.0, n + 1)
    K = _kernel_matrix(bcfg.psi_kernel, s, n)
    integral = _volterra_apply(K, w, s)
    return w - (bcfg.beta / bcfg.alpha) * integral - bcfg.psi_kernel(s * (xi - 1.0)) * X


def lyapunov_V(w: np.ndarray, s: float, X: float, bcfg: BacksteppingConfig) -> float:
    """V = ||w||^2 / (2 alpha) + (eps / (2 beta)) X^2 on the target state."""
    n = len(w) - 1
    norm2 = s * np.trapezoid(np.asarray(w) ** 2, dx=1.0 / n)
    return float(norm2 / (2.0 * bcfg.alpha) + bcfg.eps / (2.0 * bcfg.beta) * X**2)


def psi_norm(u: np.ndarray, s: float, X: float,
             v: np.ndarray | None = None, L: float | None = None) -> float:
    """Squared L2 norm of the error state: int u^2 dx + X^2 (+ int v^2 dx)."""
    n = len(u) - 1
    total = s * np.trapezoid(np.asarray(u) ** 2, dx=1.0 / n) + X**2
    if v is not None:
        ns = len(v) - 1
        total += (L - s) * np.trapezoid(np.asarray(v) ** 2, dx=1.0 / ns)
    return float(total)


def energy_conservation_residual(t: np.ndarray, energy: np.ndarray,
                                 q: np.ndarray) -> dict:
    """Row-to-row defect of the conservation law dE/dt = q.

    Uses the left row's held input, so rows must not straddle sampling
    instants (the recorders guarantee this).  Residuals are reported both raw
    and relative to max(|E(0)|, floor).
    """
    t = np.asarray(t)
    energy = np.asarray(energy)
    q = np.asarray(q)
    r = energy[1:] - energy[:-1] - np.diff(t) * q[:-1]
    scale = max(abs(float(energy[0])), EPS_FLOOR)
    return {
        "residuals": r,
        "max_abs": float(np.max(np.abs(r))) if len(r) else 0.0,
        "max_rel": float(np.max(np.abs(r)) / scale) if len(r) else 0.0,
        "scale": scale,
    }


def sampled_energy_recursion_residual(samples, c: float) -> dict:
    """Defect of E_{j+1} = (1 - c tau_j) E_j over the sampled records."""
    if len(samples) < 2:
        return {"max_rel": 0.0, "residuals": np.zeros(0)}
    E = np.array([r.energy for r in samples])
    tau = np.array([r.tau for r in samples[:-1]])
    r = E[1:] - (1.0 - c * tau) * E[:-1]
    scale = max(abs(E[0]), EPS_FLOOR)
    return {
        "residuals": r,
        "max_rel": float(np.max(np.abs(r)) / scale),
        "scale": scale,
    }


@dataclass
class DecayReport:
    """Fitted exponential envelope of the squared-norm series."""

    b: float            # guaranteed rate
    M_hat: float        # smallest envelope constant: max Psi(t) e^{bt} / Psi(0)
    slope: float        # least-squares slope of log Psi over the tail window
    slope_margin: float
    passed: bool
    trivially_converged: bool
    window: tuple[float, float] | None
    psi0: float


def decay_fit(t: np.ndarray, psi: np.ndarray, b: float,
              window_start: float | None = None,
              slope_margin: float = 0.10,
              rel_floor: float = 1e-18) -> DecayReport:
    """Fit the decay of the squared norm and compare against the rate bound.

    The envelope constant is taken over all samples.  The slope is fitted on
    the last half of the samples after ``window_start`` (default: after the
    first tenth of the series), excluding values below ``rel_floor * Psi(0)``
    where the series sits on quadrature/round-off noise.
    """
    t = np.asarray(t, dtype=float)
    psi = np.asarray(psi, dtype=float)
    psi0 = float(psi[0])
    if psi0 <= EPS_FLOOR:
        return DecayReport(b=b, M_hat=0.0, slope=-np.inf, slope_margin=slope_margin,
                           passed=True, trivially_converged=True, window=None,
                           psi0=psi0)
    M_hat = float(np.max(psi * np.exp(b * t) / psi0))
    if window_start is None:
        window_start = t[0] + 0.1 * (t[-1] - t[0])
    usable = (t >= window_start) & (psi > rel_floor * psi0)
    idx = np.nonzero(usable)[0]
    if len(idx) < 3:
        # decayed to the floor almost immediately; envelope alone decides
        return DecayReport(b=b, M_hat=M_hat, slope=-np.inf, slope_margin=slope_margin,
                           passed=True, trivially_converged=False, window=None,
                           psi0=psi0)
    idx = idx[len(idx) // 2:]  # tail half
    tw = t[idx]
    lw = np.log(psi[idx])
    slope = float(np.polyfit(tw, lw, 1)[0])
    passed = slope <= -b * (1.0 - slope_margin)
    return DecayReport(b=b, M_hat=M_hat, slope=slope, slope_margin=slope_margin,
                       passed=passed, trivially_converged=False,
                       window=(float(tw[0]), float(tw[-1])), psi0=psi0)


def validity_report_one_phase(traj, L: float, s_r: float,
                              tol_valid: float = TOL_VALID,
                              s_tol: float = 1e-5,
                              mono_tol: float = 1e-9) -> dict:
    """Model-validity and closed-loop-shape monitors over a recorded run.

    Checks, per row and in aggregate: liquid at/above melting (via the
    recorded validity flags), front inside (0, L), front nondecreasing, and
    front below the setpoint (within tolerance).
    """
    s = np.asarray(traj.s)
    flags_ok = bool(np.all(np.asarray(traj.valid) > 0.5))
    inside = bool(np.all((s > 0.0) & (s < L)))
    ds = np.diff(s)
    monotone = bool(np.all(ds >= -mono_tol))
    below_setpoint = bool(np.all(s <= s_r + s_tol))
    min_T_boundary = float(np.min(np.asarray(traj.T_boundary)))
    report = {
        "temperature_above_melting": flags_ok,
        "front_inside_domain": inside,
        "front_nondecreasing": monotone,
        "front_below_setpoint": below_setpoint,
        "min_T_boundary": min_T_boundary,
        "min_front_increment": float(np.min(ds)) if len(ds) else 0.0,
        "max_front_overshoot": float(np.max(s - s_r)),
    }
    report["passed"] = flags_ok and inside and monotone and below_setpoint
    return report


def quadrature_lipschitz_bound(n: int, s: float, values: np.ndarray) -> float:
    """Lipschitz constant of the trapezoid functional int f dx wrt one node.

    Perturbing node i by delta changes the integral by w_i * delta with
    w_i <= s/n; for the squared norm the factor 2*max|f| + delta enters.
    Used by the perturbation-continuity property tests.
    """
    return s / n * (2.0 * float(np.max(np.abs(values))) + 1.0)
