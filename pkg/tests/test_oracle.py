"""Checks of the similarity solution itself (it must be right before it can
judge the solver): the front-growth root, internal consistency between the
profile, the boundary flux, and the front law."""

from math import erf, exp, pi, sqrt

import numpy as np
import pytest

from stefanctl.core import ParameterError
from stefanctl.oracle import SimilaritySolution, solve_lambda, stefan_number


class TestLambdaRoot:
    def test_residual_at_root(self):
        for St in (0.01, 0.1133, 0.5, 2.0):
            lam = solve_lambda(St)
            assert lam * exp(lam**2) * erf(lam) == pytest.approx(St / sqrt(pi),
                                                                 abs=1e-11)

    def test_small_stefan_asymptotics(self):
        # lam -> sqrt(St/2) as St -> 0
        St = 1e-4
        assert solve_lambda(St) == pytest.approx(sqrt(St / 2.0), rel=1e-2)

    def test_monotone_in_stefan_number(self):
        lams = [solve_lambda(St) for St in (0.05, 0.1, 0.2, 0.4)]
        assert all(a < b for a, b in zip(lams, lams[1:]))

    def test_nonpositive_rejected(self):
        with pytest.raises(ParameterError):
            solve_lambda(0.0)


class TestSimilaritySolution:
    @pytest.fixture()
    def sol(self, paraffin):
        return SimilaritySolution.build(paraffin, T_hot=47.0)

    def test_profile_vanishes_at_front(self, sol):
        t = 2000.0
        s = float(sol.front(t))
        assert sol.profile_u(np.array([s]), t)[0] == pytest.approx(0.0, abs=1e-12)

    def test_boundary_flux_matches_profile_gradient(self, sol, paraffin):
        # q(t) = -k du/dx(0): compare against a one-sided fourth-order
        # finite difference of the exact profile
        t = 3000.0
        h = 1e-6
        x = np.array([0.0, h, 2 * h, 3 * h, 4 * h])
        u = sol.profile_u(x, t)
        dudx = (-25 * u[0] + 48 * u[1] - 36 * u[2] + 16 * u[3] - 3 * u[4]) / (12 * h)
        assert sol.boundary_flux(t) == pytest.approx(-paraffin.k * dudx, rel=1e-8)

    def test_front_law_consistency(self, sol, paraffin):
        # front speed lam*sqrt(alpha/t) equals beta * (interface gradient),
        # the defining balance of the melting law
        t = 5000.0
        dT = sol.T_hot - paraffin.Tm
        interface_grad = dT * exp(-sol.lam**2) / (erf(sol.lam)
                                                  * sqrt(pi * paraffin.alpha * t))
        sdot_exact = sol.lam * sqrt(paraffin.alpha / t)
        assert sdot_exact == pytest.approx(paraffin.beta * interface_grad, rel=1e-12)

    def test_front_time_inverse(self, sol):
        t = sol.time_of_front(0.004)
        assert float(sol.front(t)) == pytest.approx(0.004, rel=1e-12)

    def test_stefan_number(self, paraffin):
        assert stefan_number(paraffin, 47.0) == pytest.approx(
            2380.0 * 10.0 / 210000.0, rel=1e-12)
