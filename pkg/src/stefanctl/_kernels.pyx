# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled stepping kernels for the coordinate-stretched Stefan solvers.

One Crank-Nicolson step advances the stretched heat equation
    u_t = (alpha/s^2) u_xx' + (sdot*xi/s) u_xi
with a two-pass predictor-corrector on the front position: the front speed
is evaluated from the current profile, the front advanced, the tridiagonal
system solved with frozen coefficients, and the pass repeated once with the
trapezoidal front update.  The pure-Python twin of this module is
``_kernels_py``; both expose identical signatures.
"""

from libc.math cimport isfinite

DEF STATUS_OK = 0
DEF STATUS_MAXSTEPS = 1
DEF STATUS_DOMAIN = 2
DEF STATUS_NUMERICAL = 3


cdef inline double _grad_back(double[::1] u, int n, double dxi) nogil:
    # second-order one-sided gradient at the right end (the melt front)
    return (3.0 * u[n] - 4.0 * u[n - 1] + u[n - 2]) / (2.0 * dxi)


cdef inline double _grad_fwd(double[::1] v, double dxi) nogil:
    # second-order one-sided gradient at the left end
    return (-3.0 * v[0] + 4.0 * v[1] - v[2]) / (2.0 * dxi)


cdef inline int _thomas(double[::1] lo, double[::1] dg, double[::1] up,
                        double[::1] rhs, double[::1] x, int n) nogil:
    # In-place tridiagonal solve; lo[i], dg[i], up[i] belong to row i.
    cdef int i
    cdef double w
    for i in range(1, n):
        if dg[i - 1] == 0.0:
            return 1
        w = lo[i] / dg[i - 1]
        dg[i] = dg[i] - w * up[i - 1]
        rhs[i] = rhs[i] - w * rhs[i - 1]
    if dg[n - 1] == 0.0:
        return 1
    x[n - 1] = rhs[n - 1] / dg[n - 1]
    for i in range(n - 2, -1, -1):
        x[i] = (rhs[i] - up[i] * x[i + 1]) / dg[i]
    return 0


cdef int _cn_solve_liquid(double[::1] u, double[::1] unew,
                          double s_old, double sd_old, double s_new, double sd_new,
                          double q, double dt, double alpha, double k, int N,
                          double[::1] lo, double[::1] dg, double[::1] up,
                          double[::1] rhs) nogil:
    cdef double dxi = 1.0 / N
    cdef double r_new = alpha * dt / (2.0 * s_new * s_new * dxi * dxi)
    cdef double r_old = alpha * dt / (2.0 * s_old * s_old * dxi * dxi)
    # advection weight dt*sdot*xi_i/(4*s*dxi) with xi_i = i*dxi
    cdef double ca_new = dt * sd_new / (4.0 * s_new)
    cdef double ca_old = dt * sd_old / (4.0 * s_old)
    cdef double a_new, a_old, g_old, g_new
    cdef int i
    for i in range(1, N):
        a_new = ca_new * i
        a_old = ca_old * i
        lo[i] = -r_new + a_new
        dg[i] = 1.0 + 2.0 * r_new
        up[i] = -r_new - a_new
        rhs[i] = u[i] + r_old * (u[i + 1] - 2.0 * u[i] + u[i - 1]) \
            + a_old * (u[i + 1] - u[i - 1])
    # flux boundary via ghost node: u_xi(0) = -q*s/k
    g_old = dt * alpha * q / (k * s_old * dxi)
    g_new = dt * alpha * q / (k * s_new * dxi)
    lo[0] = 0.0
    dg[0] = 1.0 + 2.0 * r_new
    up[0] = -2.0 * r_new
    rhs[0] = u[0] + r_old * (2.0 * u[1] - 2.0 * u[0]) + g_old + g_new
    # front node pinned at the melting temperature
    lo[N] = 0.0
    dg[N] = 1.0
    up[N] = 0.0
    rhs[N] = 0.0
    return _thomas(lo, dg, up, rhs, unew, N + 1)


cdef int _cn_solve_solid(double[::1] v, double[::1] vnew,
                         double l_old, double sd_old, double l_new, double sd_new,
                         double dt, double alpha_s, int N,
                         double[::1] lo, double[::1] dg, double[::1] up,
                         double[::1] rhs) nogil:
    # solid grid: eta = (x - s)/(L - s); v_t = (a_s/l^2) v_ee + sdot(1-eta)/l v_e
    cdef double deta = 1.0 / N
    cdef double r_new = alpha_s * dt / (2.0 * l_new * l_new * deta * deta)
    cdef double r_old = alpha_s * dt / (2.0 * l_old * l_old * deta * deta)
    cdef double a_new, a_old
    cdef int i
    for i in range(1, N):
        a_new = dt * sd_new * (1.0 - i * deta) / (4.0 * l_new * deta)
        a_old = dt * sd_old * (1.0 - i * deta) / (4.0 * l_old * deta)
        lo[i] = -r_new + a_new
        dg[i] = 1.0 + 2.0 * r_new
        up[i] = -r_new - a_new
        rhs[i] = v[i] + r_old * (v[i + 1] - 2.0 * v[i] + v[i - 1]) \
            + a_old * (v[i + 1] - v[i - 1])
    # interface node pinned
    lo[0] = 0.0
    dg[0] = 1.0
    up[0] = 0.0
    rhs[0] = 0.0
    # insulated far end via ghost node (advection vanishes at eta = 1)
    lo[N] = -2.0 * r_new
    dg[N] = 1.0 + 2.0 * r_new
    up[N] = 0.0
    rhs[N] = v[N] + r_old * (2.0 * v[N - 1] - 2.0 * v[N])
    return _thomas(lo, dg, up, rhs, vnew, N + 1)


def advance_one_phase(double[::1] u, double s, double t, double t_stop, double q,
                      double alpha, double beta, double k,
                      double cfl_coef, double dt_cap, double dt_force,
                      double s_min, double s_max, long max_steps,
                      double[::1] lo, double[::1] dg, double[::1] up,
                      double[::1] rhs, double[::1] unew):
    """Advance the one-phase state to t_stop under a constant flux q.

    Returns (status, s, t, sdot, n_steps, min_u, min_u0, min_ds) where the
    min_* entries are running minima over every step taken (profile minimum,
    boundary-node value, and per-step front increment).
    """
    cdef int N = u.shape[0] - 1
    cdef double dxi = 1.0 / N
    cdef double tiny = 1e-12 * (1.0 if t_stop < 1.0 else t_stop)
    cdef long nsteps = 0
    cdef int status = STATUS_OK
    cdef double dt, sd0, sd1, s1, s2, ds
    cdef double min_u = u[0], min_u0 = u[0], min_ds = 0.0
    cdef int i
    cdef int first = 1
    cdef double sdot = -(beta / s) * _grad_back(u, N, dxi)

    for i in range(N + 1):
        if u[i] < min_u:
            min_u = u[i]

    while t < t_stop - tiny:
        if max_steps > 0 and nsteps >= max_steps:
            status = STATUS_MAXSTEPS
            break
        if dt_force > 0.0:
            dt = dt_force
        else:
            dt = cfl_coef * s * s
            if dt > dt_cap:
                dt = dt_cap
        if dt >= t_stop - t - tiny:
            dt = t_stop - t

        sd0 = -(beta / s) * _grad_back(u, N, dxi)
        s1 = s + dt * sd0
        if not (s_min < s1 < s_max):
            status = STATUS_DOMAIN
            break
        if _cn_solve_liquid(u, unew, s, sd0, s1, sd0, q, dt, alpha, k, N,
                            lo, dg, up, rhs):
            status = STATUS_NUMERICAL
            break
        sd1 = -(beta / s1) * _grad_back(unew, N, dxi)
        s2 = s + 0.5 * dt * (sd0 + sd1)
        if not (s_min < s2 < s_max):
            status = STATUS_DOMAIN
            break
        if _cn_solve_liquid(u, unew, s, sd0, s2, sd1, q, dt, alpha, k, N,
                            lo, dg, up, rhs):
            status = STATUS_NUMERICAL
            break
        ds = s2 - s
        if first or ds < min_ds:
            min_ds = ds
            first = 0
        for i in range(N + 1):
            u[i] = unew[i]
            if u[i] < min_u:
                min_u = u[i]
        if u[0] < min_u0:
            min_u0 = u[0]
        s = s2
        t = t + dt
        nsteps += 1
        if not (isfinite(u[0]) and isfinite(s)):
            status = STATUS_NUMERICAL
            break
        sdot = -(beta / s) * _grad_back(u, N, dxi)

    return status, s, t, sdot, nsteps, min_u, min_u0, min_ds


def advance_two_phase(double[::1] u, double[::1] v, double s, double t,
                      double t_stop, double q,
                      double alpha_l, double beta_l, double k_l,
                      double alpha_s, double k_s, double gamma, double L,
                      double cfl_l, double cfl_s, double dt_cap, double dt_force,
                      double s_min, double s_max, long max_steps,
                      double[::1] lo, double[::1] dg, double[::1] up,
                      double[::1] rhs, double[::1] wnew, double[::1] vnew):
    """Advance the coupled liquid/solid state to t_stop under constant flux q.

    Returns (status, s, t, sdot, n_steps, min_u, max_v, min_u0,
    max_grad_liq, max_grad_sol); the last two are running maxima of the
    physical temperature gradients at the front (model-validity monitors
    expect both to stay nonpositive).
    """
    cdef int Nl = u.shape[0] - 1
    cdef int Ns = v.shape[0] - 1
    cdef double dxi = 1.0 / Nl
    cdef double deta = 1.0 / Ns
    cdef double tiny = 1e-12 * (1.0 if t_stop < 1.0 else t_stop)
    cdef long nsteps = 0
    cdef int status = STATUS_OK
    cdef double dt, sd0, sd1, s1, s2, l0, l1, l2, gl, gs
    cdef double min_u = u[0], max_v = v[0], min_u0 = u[0]
    cdef double max_gl, max_gs
    cdef int i

    for i in range(Nl + 1):
        if u[i] < min_u:
            min_u = u[i]
    for i in range(Ns + 1):
        if v[i] > max_v:
            max_v = v[i]
    gl = _grad_back(u, Nl, dxi) / s
    gs = _grad_fwd(v, deta) / (L - s)
    max_gl = gl
    max_gs = gs
    cdef double sdot = (-k_l * gl + k_s * gs) / gamma

    while t < t_stop - tiny:
        if max_steps > 0 and nsteps >= max_steps:
            status = STATUS_MAXSTEPS
            break
        l0 = L - s
        if dt_force > 0.0:
            dt = dt_force
        else:
            dt = cfl_l * s * s
            if cfl_s * l0 * l0 < dt:
                dt = cfl_s * l0 * l0
            if dt > dt_cap:
                dt = dt_cap
        if dt >= t_stop - t - tiny:
            dt = t_stop - t

        gl = _grad_back(u, Nl, dxi) / s
        gs = _grad_fwd(v, deta) / l0
        sd0 = (-k_l * gl + k_s * gs) / gamma
        s1 = s + dt * sd0
        if not (s_min < s1 < s_max):
            status = STATUS_DOMAIN
            break
        l1 = L - s1
        if _cn_solve_liquid(u, wnew, s, sd0, s1, sd0, q, dt, alpha_l, k_l, Nl,
                            lo, dg, up, rhs):
            status = STATUS_NUMERICAL
            break
        if _cn_solve_solid(v, vnew, l0, sd0, l1, sd0, dt, alpha_s, Ns,
                           lo, dg, up, rhs):
            status = STATUS_NUMERICAL
            break
        gl = _grad_back(wnew, Nl, dxi) / s1
        gs = _grad_fwd(vnew, deta) / l1
        sd1 = (-k_l * gl + k_s * gs) / gamma
        s2 = s + 0.5 * dt * (sd0 + sd1)
        if not (s_min < s2 < s_max):
            status = STATUS_DOMAIN
            break
        l2 = L - s2
        if _cn_solve_liquid(u, wnew, s, sd0, s2, sd1, q, dt, alpha_l, k_l, Nl,
                            lo, dg, up, rhs):
            status = STATUS_NUMERICAL
            break
        if _cn_solve_solid(v, vnew, l0, sd0, l2, sd1, dt, alpha_s, Ns,
                           lo, dg, up, rhs):
            status = STATUS_NUMERICAL
            break
        for i in range(Nl + 1):
            u[i] = wnew[i]
            if u[i] < min_u:
                min_u = u[i]
        for i in range(Ns + 1):
            v[i] = vnew[i]
            if v[i] > max_v:
                max_v = v[i]
        if u[0] < min_u0:
            min_u0 = u[0]
        s = s2
        t = t + dt
        nsteps += 1
        if not (isfinite(u[0]) and isfinite(v[Ns]) and isfinite(s)):
            status = STATUS_NUMERICAL
            break
        gl = _grad_back(u, Nl, dxi) / s
        gs = _grad_fwd(v, deta) / (L - s)
        if gl > max_gl:
            max_gl = gl
        if gs > max_gs:
            max_gs = gs
        sdot = (-k_l * gl + k_s * gs) / gamma

    return status, s, t, sdot, nsteps, min_u, max_v, min_u0, max_gl, max_gs
