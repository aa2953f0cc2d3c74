import math

import pytest
from hypothesis import given, strategies as st

from selforg import (
    ConfigError,
    ModelParams,
    derive_params,
    path_b_convert,
    threshold_curve,
)

EPS_REF = 1.0 / 390.0


def test_reference_point():
    d = derive_params(ModelParams(-1.0, EPS_REF, 1.0, 50))
    assert d.beta_tilde == pytest.approx(2.0, rel=1e-15)
    assert d.nbar_c == pytest.approx(0.5, rel=1e-15)
    assert d.sigma2_p == pytest.approx(97.5, rel=1e-15)
    assert d.gamma_tilde == pytest.approx(4.0 / 390.0, rel=1e-15)


def test_detuned_point():
    d = derive_params(ModelParams(-4.0, EPS_REF, 0.0, 50))
    assert d.beta_tilde == pytest.approx(16.0 / 17.0, rel=1e-15)
    assert d.nbar_c == pytest.approx(17.0 / 64.0, rel=1e-15)
    assert d.gamma_tilde == 0.0
    assert d.sigma2_p > 0.0


@pytest.mark.parametrize(
    "kwargs",
    [
        dict(delta=0.0, eps=EPS_REF, nbar=1.0, n_atoms=10),
        dict(delta=0.5, eps=EPS_REF, nbar=1.0, n_atoms=10),
        dict(delta=-1.0, eps=0.0, nbar=1.0, n_atoms=10),
        dict(delta=-1.0, eps=-0.1, nbar=1.0, n_atoms=10),
        dict(delta=-1.0, eps=1.0, nbar=1.0, n_atoms=10),
        dict(delta=-1.0, eps=1.5, nbar=1.0, n_atoms=10),
        dict(delta=-1.0, eps=EPS_REF, nbar=-0.1, n_atoms=10),
        dict(delta=-1.0, eps=EPS_REF, nbar=1.0, n_atoms=0),
    ],
)
def test_invalid_params_rejected(kwargs):
    with pytest.raises(ConfigError):
        ModelParams(**kwargs)


def test_purity():
    p = ModelParams(-2.5, EPS_REF, 0.3, 7)
    assert derive_params(p) == derive_params(p)


def test_threshold_curve_values():
    assert threshold_curve([-1.0]) == [(-1.0, 0.5)]
    (d, nc), = threshold_curve([-4.0])
    assert nc == pytest.approx(17.0 / 64.0, rel=1e-15)
    assert threshold_curve([]) == []


def test_threshold_curve_rejects_nonnegative():
    with pytest.raises(ConfigError):
        threshold_curve([-1.0, 0.0])
    with pytest.raises(ConfigError):
        threshold_curve([1.0])


def test_path_b_fig_s1_consistency():
    # detuning quench -4 kappa -> -1 kappa at fixed amplitude turns
    # 0.44 nbar_c(-4) into about twice nbar_c(-1)
    nbar_i = 0.44 * 17.0 / 64.0
    nbar_f = path_b_convert(-4.0, nbar_i, -1.0)
    assert nbar_f == pytest.approx(0.9934375, rel=1e-12)
    assert nbar_f == pytest.approx(2 * 0.5, rel=0.01)


def test_path_b_trivial_cases():
    assert path_b_convert(-2.0, 0.37, -2.0) == pytest.approx(0.37, rel=1e-15)
    assert path_b_convert(-1.0, 0.0, -4.0) == 0.0


def test_path_b_rejects_nonnegative_detuning():
    with pytest.raises(ConfigError):
        path_b_convert(0.0, 1.0, -1.0)
    with pytest.raises(ConfigError):
        path_b_convert(-1.0, 1.0, 0.5)
    with pytest.raises(ConfigError):
        path_b_convert(-1.0, -0.2, -2.0)


finite_delta = st.floats(min_value=-50.0, max_value=-1e-3)
finite_nbar = st.floats(min_value=0.0, max_value=100.0)
finite_eps = st.floats(min_value=1e-6, max_value=0.999)


@given(delta=finite_delta, eps=finite_eps, nbar=finite_nbar)
def test_fluctuation_dissipation_identity(delta, eps, nbar):
    # noise strength nbar over friction gamma_tilde equals sigma2_p
    d = derive_params(ModelParams(delta, eps, nbar, 8))
    assert d.gamma_tilde * d.sigma2_p == pytest.approx(nbar, rel=1e-13, abs=1e-300)


@given(delta=finite_delta)
def test_threshold_bounds(delta):
    (_, nc), = threshold_curve([delta])
    assert nc >= 0.25


def test_threshold_approaches_quarter():
    (_, nc), = threshold_curve([-1e6])
    assert nc == pytest.approx(0.25, rel=1e-10)
    (_, nc1), = threshold_curve([-1.0])
    assert nc1 == 0.5


@given(delta=finite_delta, nbar=finite_nbar, delta_f=finite_delta)
def test_path_b_round_trip(delta, nbar, delta_f):
    there = path_b_convert(delta, nbar, delta_f)
    back = path_b_convert(delta_f, there, delta)
    assert back == pytest.approx(nbar, rel=1e-12, abs=1e-300)
