import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from fowtctl.errors import GainSingularityError, ParameterError
from fowtctl.gains import (GainScheduler, PlatformTarget, RotorTarget,
                           kbeta_reference, kbeta_zeta_fixed, ktaug,
                           synthesize, tune_pi)
from fowtctl.model import AeroSensitivities, ControlGains, StructuralParams
from fowtctl.stability import platform_summary, rotor_summary

TARGET = RotorTarget(zeta_rot=0.6, nu_rot=0.01)


def test_pi_gains_frozen_values(params, sens_t1f):
    kp, ki = tune_pi(params, sens_t1f, TARGET)
    assert kp == pytest.approx(-0.359736733973185, rel=1e-12)
    assert ki == pytest.approx(2.0742012684134593e-4, rel=1e-12)


def test_pi_round_trip(params, sens_t1f):
    kp, ki = tune_pi(params, sens_t1f, TARGET)
    summ = rotor_summary(params, sens_t1f, kp, ki)
    assert not summ.degenerate
    assert summ.nu == pytest.approx(TARGET.nu_rot, rel=1e-12)
    assert summ.zeta == pytest.approx(TARGET.zeta_rot, rel=1e-12)


@given(tb=st.floats(-1e9, -1e6), tw=st.floats(-1e8, -1e5),
       zeta=st.floats(0.05, 2.0), nu=st.floats(1e-3, 1.0))
@settings(max_examples=200, deadline=None)
def test_pi_round_trip_property(params, tb, tw, zeta, nu):
    sens = AeroSensitivities(dta_domega=tw, dta_dv=1e6, dta_dbeta=tb,
                             dfa_domega=-1e6, dfa_dv=1e5, dfa_dbeta=-1e7)
    kp, ki = tune_pi(params, sens, RotorTarget(zeta_rot=zeta, nu_rot=nu))
    summ = rotor_summary(params, sens, kp, ki)
    assert summ.nu == pytest.approx(nu, rel=1e-9)
    assert summ.zeta == pytest.approx(zeta, rel=1e-9)


@pytest.mark.parametrize("zeta,expected", [
    (0.05, -0.6339002391721162),
    (0.10, 2.089164091413599),
    (0.25, 10.258357083170745),
    (0.50, 23.873678736099322),
])
def test_kbeta_zeta_fixed_frozen_values(params, sens_t1f, zeta, expected):
    kb = kbeta_zeta_fixed(params, sens_t1f, PlatformTarget(zeta))
    assert kb == pytest.approx(expected, rel=1e-12)


@given(zeta=st.floats(0.01, 2.0))
@settings(max_examples=100, deadline=None)
def test_kbeta_imposes_requested_damping(params, sens_t1f, zeta):
    kb = kbeta_zeta_fixed(params, sens_t1f, PlatformTarget(zeta))
    summ = platform_summary(params, sens_t1f, kb)
    assert summ.zeta == pytest.approx(zeta, rel=1e-12)
    # the natural frequency is untouched by the compensation gain
    assert summ.nu == pytest.approx(math.sqrt(params.kt / params.jt), rel=1e-14)


def test_kbeta_reference_frozen_value(params, sens_t1f):
    assert kbeta_reference(params, sens_t1f) == pytest.approx(
        -2.934961975164722, rel=1e-12)


def test_ktaug_frozen_value(params, sens_t1f):
    assert ktaug(params, sens_t1f, 1.0) == pytest.approx(-4.47135e8, rel=1e-12)
    assert ktaug(params, sens_t1f, 0.0) == 0.0
    assert ktaug(params, sens_t1f, 0.5) == pytest.approx(-2.235675e8, rel=1e-12)


def test_ktaug_fraction_bounds(params, sens_t1f):
    with pytest.raises(ParameterError):
        ktaug(params, sens_t1f, 1.5)
    with pytest.raises(ParameterError):
        ktaug(params, sens_t1f, -0.1)


def test_singular_sensitivities_rejected(params):
    sens = AeroSensitivities(dta_domega=-1.0, dta_dv=1.0, dta_dbeta=0.0,
                             dfa_domega=-1.0, dfa_dv=1.0, dfa_dbeta=0.0)
    with pytest.raises(GainSingularityError):
        tune_pi(params, sens, TARGET)
    with pytest.raises(GainSingularityError):
        kbeta_zeta_fixed(params, sens, PlatformTarget(0.1))
    with pytest.raises(GainSingularityError):
        kbeta_reference(params, sens)


def test_zero_lever_arm_rejected(sens_t1f):
    flat = StructuralParams(ng=1.0, jr=3.16e8, jt=3.0e11, dt=1.0e8,
                            kt=1.433e10, ht=0.0)
    with pytest.raises(GainSingularityError, match="ht"):
        kbeta_zeta_fixed(flat, sens_t1f, PlatformTarget(0.1))


def test_synthesize_strategies(params, sens_t1f):
    none = synthesize(params, sens_t1f, TARGET, strategy="none")
    assert none.kbeta == 0.0
    fixed = synthesize(params, sens_t1f, TARGET, strategy="zeta-fixed",
                       zeta_plt=0.1)
    assert fixed.kbeta == pytest.approx(2.089164091413599, rel=1e-12)
    ref = synthesize(params, sens_t1f, TARGET, strategy="reference")
    assert ref.kbeta == pytest.approx(-2.934961975164722, rel=1e-12)
    assert none.kp == fixed.kp == ref.kp
    assert none.ki == fixed.ki == ref.ki


def test_synthesize_validation(params, sens_t1f):
    with pytest.raises(ParameterError, match="zeta_plt"):
        synthesize(params, sens_t1f, TARGET, strategy="zeta-fixed")
    with pytest.raises(ParameterError, match="unknown strategy"):
        synthesize(params, sens_t1f, TARGET, strategy="bogus")


def test_target_validation():
    with pytest.raises(ParameterError):
        RotorTarget(zeta_rot=0.0, nu_rot=0.01)
    with pytest.raises(ParameterError):
        RotorTarget(zeta_rot=0.6, nu_rot=-0.01)
    with pytest.raises(ParameterError):
        PlatformTarget(zeta_plt=0.0)


def test_scheduler_first_update_passthrough():
    sched = GainScheduler(tau=5.0)
    raw = ControlGains(kp=-0.3, ki=1e-4, kbeta=2.0, ktaug=0.0)
    assert sched.update(raw, 0.1) is raw


def test_scheduler_smooths_towards_target():
    sched = GainScheduler(tau=5.0)
    a = ControlGains(kp=-0.3, ki=1e-4, kbeta=2.0)
    b = ControlGains(kp=-0.5, ki=2e-4, kbeta=4.0)
    sched.update(a, 0.1)
    mid = sched.update(b, 0.1)
    # strictly between the previous and the new gains
    assert a.kp > mid.kp > b.kp
    assert a.ki < mid.ki < b.ki
    for _ in range(2000):
        last = sched.update(b, 0.1)
    assert last.kp == pytest.approx(b.kp, rel=1e-6)
    assert last.kbeta == pytest.approx(b.kbeta, rel=1e-6)


def test_scheduler_requires_positive_tau():
    with pytest.raises(ParameterError):
        GainScheduler(tau=0.0)
