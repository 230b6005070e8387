import numpy as np
import pytest

from stefanctl import control
from stefanctl.core import (
    ContractError,
    DomainSpec,
    GainError,
    InitialData,
    Profile,
    make_schedule,
)
from stefanctl.one_phase import OnePhaseState, make_state

from conftest import linear_state


def flat_state(N, s, value=0.0):
    return OnePhaseState(t=0.0, s=s, u=np.full(N + 1, value))


class TestInternalEnergy:
    def test_target_state_has_zero_energy(self, paraffin):
        st = flat_state(100, s=0.02)
        assert control.internal_energy(st, paraffin, s_r=0.02) == 0.0

    def test_pure_front_offset(self, paraffin):
        # u = 0, s = s_r - 0.01: energy is -(k/beta)*0.01 = -rho*latent*0.01
        st = flat_state(100, s=0.01)
        expected = -paraffin.rho * paraffin.latent_heat * 0.01
        got = control.internal_energy(st, paraffin, s_r=0.02)
        assert got == pytest.approx(expected, rel=1e-12)
        assert got == pytest.approx(-1.659e6, rel=1e-3)

    def test_default_initial_energy(self, paraffin, default_dom):
        # linear 1-degree profile on s0 = 1 mm, setpoint 2 cm: the sensible
        # term is the exact triangle (k/alpha)*s0/2, the latent term dominates
        init = InitialData(s0=0.001, profile=Profile(kind="linear", amplitude=1.0))
        st = make_state(init, default_dom, paraffin)
        expected = (paraffin.k / paraffin.alpha) * 0.001 / 2.0 \
            + (paraffin.k / paraffin.beta) * (0.001 - 0.02)
        got = control.internal_energy(st, paraffin, s_r=0.02)
        assert got == pytest.approx(expected, rel=1e-12)
        assert got < 0.0


class TestNominalControl:
    def test_zero_at_target(self, paraffin):
        cfg = control.ControllerConfig(c=1e-3, s_r=0.02)
        assert control.nominal_control(flat_state(50, 0.02), paraffin, cfg) == 0.0

    def test_positive_below_target(self, paraffin):
        cfg = control.ControllerConfig(c=1e-3, s_r=0.02)
        assert control.nominal_control(flat_state(50, 0.01), paraffin, cfg) > 0.0

    def test_hand_value(self, paraffin):
        cfg = control.ControllerConfig(c=1e-3, s_r=0.02)
        st = flat_state(50, 0.01)
        # E = -1.659e6 -> q = 1659 W/m^2
        assert control.nominal_control(st, paraffin, cfg) == pytest.approx(1659.0, rel=1e-3)


class TestZohSampling:
    def test_held_value_matches_energy(self, paraffin):
        sched = make_schedule("periodic", horizon=1200.0, R=600.0)
        cfg = control.ControllerConfig(c=1e-3, s_r=0.02)
        st = flat_state(50, 0.01)
        ctrl = control.zoh_sample(None, st, paraffin, cfg, sched)
        assert ctrl.q == -cfg.c * ctrl.energy
        assert ctrl.j == 0
        assert ctrl.t_next == 600.0

    def test_at_target_holds_zero(self, paraffin):
        sched = make_schedule("periodic", horizon=1200.0, R=600.0)
        cfg = control.ControllerConfig(c=1e-3, s_r=0.02)
        ctrl = control.zoh_sample(None, flat_state(50, 0.02), paraffin, cfg, sched)
        assert ctrl.q == 0.0

    def test_off_schedule_call_rejected(self, paraffin):
        sched = make_schedule("periodic", horizon=1200.0, R=600.0)
        cfg = control.ControllerConfig(c=1e-3, s_r=0.02)
        st = OnePhaseState(t=123.0, s=0.01, u=np.zeros(51))
        with pytest.raises(ContractError):
            control.zoh_sample(None, st, paraffin, cfg, sched)


class TestOpenLoopSequence:
    def test_periodic_product(self):
        # q0 = 100, c*tau = 0.6 -> factors of 0.4
        sched = make_schedule("periodic", horizon=2400.0, R=600.0)
        q = control.open_loop_sequence(E0=-1e5, c=1e-3, sched=sched)
        np.testing.assert_allclose(q, [100.0, 40.0, 16.0, 6.4], rtol=1e-12)

    def test_mixed_gaps(self):
        sched = make_schedule("explicit", horizon=900.0,
                              instants=[0.0, 300.0, 900.0, 1500.0])
        q = control.open_loop_sequence(E0=-1e5, c=1e-3, sched=sched)
        np.testing.assert_allclose(q, [100.0, 100.0 * 0.7, 100.0 * 0.7 * 0.4],
                                   rtol=1e-12)

    def test_vanishing_gain_limit(self):
        sched = make_schedule("periodic", horizon=6000.0, R=600.0)
        q = control.open_loop_sequence(E0=-1e5, c=1e-9, sched=sched)
        np.testing.assert_allclose(q, q[0], rtol=1e-5)

    def test_gain_error(self):
        sched = make_schedule("periodic", horizon=1200.0, R=600.0)
        with pytest.raises(GainError):
            control.open_loop_sequence(E0=-1e5, c=2e-3, sched=sched)

    def test_all_positive_for_negative_start(self):
        sched = make_schedule("uniform", horizon=7200.0, r=200.0, R=600.0, seed=3)
        q = control.open_loop_sequence(E0=-5e5, c=1.2e-3, sched=sched)
        assert np.all(q > 0.0)


class TestSetpointValidation:
    def test_default_config_valid(self, paraffin, default_dom):
        init = InitialData(s0=0.001, profile=Profile(kind="linear", amplitude=1.0))
        cfg = control.ControllerConfig(c=1e-3, s_r=0.02)
        assert control.validate_setpoint(init, cfg, paraffin, default_dom) == []
        lower = control.setpoint_lower_bound_one_phase(init, paraffin, default_dom)
        # s0 + (beta/alpha) * Tbar*s0/2 = 0.001 + (2380/210000)*5e-4
        assert lower == pytest.approx(0.0010057, rel=1e-4)

    def test_setpoint_at_domain_end_rejected(self, paraffin, default_dom):
        init = InitialData(s0=0.001, profile=Profile(kind="linear", amplitude=1.0))
        cfg = control.ControllerConfig(c=1e-3, s_r=default_dom.L)
        codes = [v.code for v in control.validate_setpoint(init, cfg, paraffin,
                                                           default_dom)]
        assert "setpoint-above-domain" in codes

    def test_overheated_start_rejected(self, paraffin, default_dom):
        # so much initial superheat that the front must overshoot the setpoint
        init = InitialData(s0=0.01, profile=Profile(kind="linear", amplitude=200.0))
        cfg = control.ControllerConfig(c=1e-3, s_r=0.0105)
        violations = control.validate_setpoint(init, cfg, paraffin, default_dom)
        assert any(v.code == "setpoint-reachability" for v in violations)
        assert any("freezing" in v.message for v in violations)


class TestDecayRateBound:
    def test_paraffin_value(self, paraffin, default_dom):
        cfg = control.ControllerConfig(c=1e-3, s_r=0.02)
        b = control.decay_rate_bound(cfg, paraffin, default_dom)
        # (1/8) * alpha/s_r^2 with alpha = 1.1701e-7
        assert b == pytest.approx(3.66e-5, rel=2e-3)

    def test_gain_limited_branch(self, paraffin, default_dom):
        cfg = control.ControllerConfig(c=1e-5, s_r=0.02)
        b = control.decay_rate_bound(cfg, paraffin, default_dom)
        assert b == pytest.approx(1e-5 / 8.0, rel=1e-12)

    def test_two_phase_solid_branch(self, two_phase_params):
        from stefanctl.core import MaterialParams, TwoPhaseParams

        slow_solid = MaterialParams(rho=910.0, cp=2100.0, k=1e-4,
                                    latent_heat=210000.0, Tm=37.0)
        p = TwoPhaseParams(liquid=two_phase_params.liquid, solid=slow_solid)
        dom = DomainSpec(L=0.02, N=100)
        cfg = control.ControllerConfig(c=1e-3, s_r=0.01, phase="two-phase")
        b = control.decay_rate_bound(cfg, p, dom)
        assert b == pytest.approx(4.0 * slow_solid.alpha / dom.L**2 / 8.0, rel=1e-12)
