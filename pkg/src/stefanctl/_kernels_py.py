"""Pure-Python / numpy twin of the compiled stepping kernels.

Selected automatically when the extension module is unavailable (see
``kernels``).  Signatures and return tuples match ``_kernels`` exactly; the
tridiagonal systems go through LAPACK's banded solver instead of the
hand-rolled Thomas sweep, so results agree with the compiled path to
round-off rather than bit-for-bit.
"""

from __future__ import annotations

import numpy as np
from scipy.linalg import solve_banded

STATUS_OK = 0
STATUS_MAXSTEPS = 1
STATUS_DOMAIN = 2
STATUS_NUMERICAL = 3


def _grad_back(u, dxi):
    return (3.0 * u[-1] - 4.0 * u[-2] + u[-3]) / (2.0 * dxi)


def _grad_fwd(v, deta):
    return (-3.0 * v[0] + 4.0 * v[1] - v[2]) / (2.0 * deta)


def _solve_liquid(u, s_old, sd_old, s_new, sd_new, q, dt, alpha, k, N):
    dxi = 1.0 / N
    idx = np.arange(1, N)
    r_new = alpha * dt / (2.0 * s_new**2 * dxi**2)
    r_old = alpha * dt / (2.0 * s_old**2 * dxi**2)
    a_new = dt * sd_new * idx / (4.0 * s_new)
    a_old = dt * sd_old * idx / (4.0 * s_old)

    ab = np.zeros((3, N + 1))
    rhs = np.empty(N + 1)
    ab[0, 2:N + 1] = -r_new - a_new          # superdiag for rows 1..N-1
    ab[1, 1:N] = 1.0 + 2.0 * r_new
    ab[2, 0:N - 1] = -r_new + a_new          # subdiag for rows 1..N-1
    rhs[1:N] = (u[1:N] + r_old * (u[2:] - 2.0 * u[1:N] + u[:-2])
                + a_old * (u[2:] - u[:-2]))
    # flux BC through a ghost node
    ab[1, 0] = 1.0 + 2.0 * r_new
    ab[0, 1] = -2.0 * r_new
    rhs[0] = (u[0] + r_old * (2.0 * u[1] - 2.0 * u[0])
              + dt * alpha * q / (k * s_old * dxi)
              + dt * alpha * q / (k * s_new * dxi))
    # pinned front node
    ab[1, N] = 1.0
    ab[2, N - 1] = 0.0
    rhs[N] = 0.0
    return solve_banded((1, 1), ab, rhs, check_finite=False)


def _solve_solid(v, l_old, sd_old, l_new, sd_new, dt, alpha_s, N):
    deta = 1.0 / N
    idx = np.arange(1, N)
    r_new = alpha_s * dt / (2.0 * l_new**2 * deta**2)
    r_old = alpha_s * dt / (2.0 * l_old**2 * deta**2)
    a_new = dt * sd_new * (1.0 - idx * deta) / (4.0 * l_new * deta)
    a_old = dt * sd_old * (1.0 - idx * deta) / (4.0 * l_old * deta)

    ab = np.zeros((3, N + 1))
    rhs = np.empty(N + 1)
    ab[0, 2:N + 1] = -r_new - a_new
    ab[1, 1:N] = 1.0 + 2.0 * r_new
    ab[2, 0:N - 1] = -r_new + a_new
    rhs[1:N] = (v[1:N] + r_old * (v[2:] - 2.0 * v[1:N] + v[:-2])
                + a_old * (v[2:] - v[:-2]))
    # pinned interface node
    ab[1, 0] = 1.0
    ab[0, 1] = 0.0
    rhs[0] = 0.0
    # insulated far end (ghost)
    ab[1, N] = 1.0 + 2.0 * r_new
    ab[2, N - 1] = -2.0 * r_new
    rhs[N] = v[N] + r_old * (2.0 * v[N - 1] - 2.0 * v[N])
    return solve_banded((1, 1), ab, rhs, check_finite=False)


def advance_one_phase(u, s, t, t_stop, q, alpha, beta, k,
                      cfl_coef, dt_cap, dt_force, s_min, s_max, max_steps,
                      lo=None, dg=None, up=None, rhs=None, unew=None):
    """See ``_kernels.advance_one_phase``; the work arrays are ignored here."""
    u = np.asarray(u)
    N = u.shape[0] - 1
    dxi = 1.0 / N
    tiny = 1e-12 * max(1.0, t_stop)
    nsteps = 0
    status = STATUS_OK
    min_u = float(np.min(u))
    min_u0 = float(u[0])
    min_ds = 0.0
    first = True
    sdot = -(beta / s) * _grad_back(u, dxi)

    while t < t_stop - tiny:
        if max_steps > 0 and nsteps >= max_steps:
            status = STATUS_MAXSTEPS
            break
        dt = dt_force if dt_force > 0.0 else min(cfl_coef * s * s, dt_cap)
        if dt >= t_stop - t - tiny:
            dt = t_stop - t

        sd0 = -(beta / s) * _grad_back(u, dxi)
        s1 = s + dt * sd0
        if not (s_min < s1 < s_max):
            status = STATUS_DOMAIN
            break
        u1 = _solve_liquid(u, s, sd0, s1, sd0, q, dt, alpha, k, N)
        sd1 = -(beta / s1) * _grad_back(u1, dxi)
        s2 = s + 0.5 * dt * (sd0 + sd1)
        if not (s_min < s2 < s_max):
            status = STATUS_DOMAIN
            break
        u2 = _solve_liquid(u, s, sd0, s2, sd1, q, dt, alpha, k, N)

        ds = s2 - s
        if first or ds < min_ds:
            min_ds = ds
            first = False
        u[:] = u2
        min_u = min(min_u, float(np.min(u)))
        min_u0 = min(min_u0, float(u[0]))
        s = s2
        t = t + dt
        nsteps += 1
        if not (np.isfinite(u[0]) and np.isfinite(s)):
            status = STATUS_NUMERICAL
            break
        sdot = -(beta / s) * _grad_back(u, dxi)

    return status, s, t, sdot, nsteps, min_u, min_u0, min_ds


def advance_two_phase(u, v, s, t, t_stop, q,
                      alpha_l, beta_l, k_l, alpha_s, k_s, gamma, L,
                      cfl_l, cfl_s, dt_cap, dt_force, s_min, s_max, max_steps,
                      lo=None, dg=None, up=None, rhs=None, wnew=None, vnew=None):
    """See ``_kernels.advance_two_phase``; the work arrays are ignored here."""
    u = np.asarray(u)
    v = np.asarray(v)
    Nl = u.shape[0] - 1
    Ns = v.shape[0] - 1
    dxi = 1.0 / Nl
    deta = 1.0 / Ns
    tiny = 1e-12 * max(1.0, t_stop)
    nsteps = 0
    status = STATUS_OK
    min_u = float(np.min(u))
    max_v = float(np.max(v))
    min_u0 = float(u[0])
    gl = _grad_back(u, dxi) / s
    gs = _grad_fwd(v, deta) / (L - s)
    max_gl, max_gs = gl, gs
    sdot = (-k_l * gl + k_s * gs) / gamma

    while t < t_stop - tiny:
        if max_steps > 0 and nsteps >= max_steps:
            status = STATUS_MAXSTEPS
            break
        l0 = L - s
        if dt_force > 0.0:
            dt = dt_force
        else:
            dt = min(cfl_l * s * s, cfl_s * l0 * l0, dt_cap)
        if dt >= t_stop - t - tiny:
            dt = t_stop - t

        gl = _grad_back(u, dxi) / s
        gs = _grad_fwd(v, deta) / l0
        sd0 = (-k_l * gl + k_s * gs) / gamma
        s1 = s + dt * sd0
        if not (s_min < s1 < s_max):
            status = STATUS_DOMAIN
            break
        l1 = L - s1
        u1 = _solve_liquid(u, s, sd0, s1, sd0, q, dt, alpha_l, k_l, Nl)
        v1 = _solve_solid(v, l0, sd0, l1, sd0, dt, alpha_s, Ns)
        gl = _grad_back(u1, dxi) / s1
        gs = _grad_fwd(v1, deta) / l1
        sd1 = (-k_l * gl + k_s * gs) / gamma
        s2 = s + 0.5 * dt * (sd0 + sd1)
        if not (s_min < s2 < s_max):
            status = STATUS_DOMAIN
            break
        l2 = L - s2
        u2 = _solve_liquid(u, s, sd0, s2, sd1, q, dt, alpha_l, k_l, Nl)
        v2 = _solve_solid(v, l0, sd0, l2, sd1, dt, alpha_s, Ns)

        u[:] = u2
        v[:] = v2
        min_u = min(min_u, float(np.min(u)))
        max_v = max(max_v, float(np.max(v)))
        min_u0 = min(min_u0, float(u[0]))
        s = s2
        t = t + dt
        nsteps += 1
        if not (np.isfinite(u[0]) and np.isfinite(v[Ns]) and np.isfinite(s)):
            status = STATUS_NUMERICAL
            break
        gl = _grad_back(u, dxi) / s
        gs = _grad_fwd(v, deta) / (L - s)
        max_gl = max(max_gl, gl)
        max_gs = max(max_gs, gs)
        sdot = (-k_l * gl + k_s * gs) / gamma

    return status, s, t, sdot, nsteps, min_u, max_v, min_u0, max_gl, max_gs
