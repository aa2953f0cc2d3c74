import math
import time

import numpy as np
import pytest

from selforg import (
    ConfigError,
    IntegratorConfig,
    ModelParams,
    PhaseState,
    StabilityError,
    TrajectoryDivergedError,
    dissipative_drift,
    derive_params,
    energy,
    force,
    get_backend,
    load_phase_state,
    noise_amplitude,
    recording_grid,
    run_trajectory,
    sample_equilibrium,
    save_phase_state,
    step,
)
from _oracles import dense_dissipative_substep, full_step_reference, ulp_distance

EPS_REF = 1.0 / 390.0
HALF_PI = math.pi / 2.0
THREE_HALF_PI = 3.0 * math.pi / 2.0

BACKENDS = ["numba", "numpy"]


@pytest.fixture(params=BACKENDS)
def backend(request):
    return get_backend(request.param)


def test_force_single_particle_node():
    st = PhaseState(np.array([HALF_PI]), np.array([0.0]))
    p = ModelParams(-1.0, EPS_REF, 1.0, 1)
    assert force(st, p)[0] == pytest.approx(0.0, abs=1e-15)


def test_force_single_particle_hand_value():
    st = PhaseState(np.array([math.pi / 4.0]), np.array([0.0]))
    p = ModelParams(-1.0, EPS_REF, 1.0, 1)
    assert force(st, p)[0] == pytest.approx(-1.0, rel=1e-12)


def test_force_opposite_sites_cancel():
    st = PhaseState(np.array([0.0, math.pi]), np.zeros(2))
    p = ModelParams(-1.0, EPS_REF, 1.0, 2)
    np.testing.assert_allclose(force(st, p), [0.0, 0.0], atol=1e-15)


def test_dissipative_drift_antisymmetric_momenta():
    st = PhaseState(np.array([HALF_PI, HALF_PI]), np.array([1.0, -1.0]))
    p = ModelParams(-1.0, EPS_REF, 1.0, 2)
    np.testing.assert_allclose(dissipative_drift(st, p), [0.0, 0.0], atol=1e-15)


def test_dissipative_drift_hand_value():
    # gamma_tilde = 0.01 via nbar = 0.01 / (2 eps beta_tilde)
    eps = 1.0 / 390.0
    nbar = 0.01 / (2.0 * eps * 2.0)
    p = ModelParams(-1.0, eps, nbar, 2)
    assert derive_params(p).gamma_tilde == pytest.approx(0.01, rel=1e-14)
    st = PhaseState(np.array([HALF_PI, HALF_PI]), np.array([1.0, 1.0]))
    np.testing.assert_allclose(
        dissipative_drift(st, p), [-0.01, -0.01], rtol=1e-12
    )


def test_dissipative_drift_gamma_off():
    st = PhaseState(np.array([0.3, 1.2]), np.array([0.5, -2.0]))
    p = ModelParams(-1.0, EPS_REF, 1.0, 2)
    np.testing.assert_array_equal(dissipative_drift(st, p, gamma_on=False), [0.0, 0.0])


def test_step_fixed_point(backend):
    # single particle at the potential minimum with zero momentum
    st = PhaseState(np.array([0.0]), np.array([0.0]))
    p = ModelParams(-1.0, EPS_REF, 1.0, 1)
    cfg = IntegratorConfig(dt=0.05, gamma_on=False)
    backend.seed(0)
    out = step(st, p, cfg, backend)
    assert out.x[0] == 0.0
    assert out.p[0] == 0.0


# --- rank-1 dissipator vs dense-matrix oracle -------------------------------

def _exact_params(n):
    # delta=-1, eps=1/4 give beta_tilde=2; nbar = N/8 then makes
    # gamma_tilde/N = 1/8 and sqrt(2 nbar / N) = 1/2: every coefficient is a
    # power of two, so the substep arithmetic below is exact in float64.
    return ModelParams(-1.0, 0.25, n / 8.0, n)


def _dissipative_only(backend, x, p, dt, params):
    out_x, out_p = x.copy(), p.copy()
    s, c = np.sin(out_x), np.cos(out_x)
    d = derive_params(params)
    bad = backend.advance_nbody(
        out_x, out_p, s, c, 1, dt, 0.0, 0.0,
        d.gamma_tilde / params.n_atoms, noise_amplitude(params), False,
    )
    assert bad == 0
    return out_x, out_p


@pytest.mark.parametrize("n", [2, 5, 10])
def test_dense_oracle_bit_identical_on_exact_states(backend, n):
    """With sin X in {0, +1, -1} and dyadic momenta/coefficients, both the
    rank-1 update and the dense-matrix oracle evaluate exactly, so they must
    agree bit for bit for any shared Wiener increment."""
    params = _exact_params(n)
    rng = np.random.RandomState(17 + n)
    # sin(x) is exactly 0 / +1 / -1 at these double-precision arguments
    x = rng.choice([0.0, HALF_PI, THREE_HALF_PI], size=n)
    if np.all(np.sin(x) == 0.0):
        x[0] = HALF_PI
    p = 2.0 ** rng.randint(-3, 4, size=n) * rng.choice([-1.0, 1.0], size=n)
    dt = 0.25

    backend.seed(99 + n)
    z = backend.normals(1)[0]
    dw = z * math.sqrt(dt)

    backend.seed(99 + n)
    _, p_kernel = _dissipative_only(backend, x, p, dt, params)
    p_oracle = dense_dissipative_substep(x, p, dt, dw, params)
    np.testing.assert_array_equal(p_kernel, p_oracle)
    # the update must actually do something
    assert not np.array_equal(p_kernel, p)


@pytest.mark.parametrize("n", [2, 5, 10])
def test_dense_oracle_random_states_ulp_level(backend, n):
    params = ModelParams(-1.0, EPS_REF, 1.0, n)
    rng = np.random.RandomState(3 * n)
    x = rng.uniform(0.0, 2.0 * math.pi, n)
    p = rng.normal(0.0, 10.0, n)
    dt = 0.05

    backend.seed(1234 + n)
    z = backend.normals(1)[0]
    dw = z * math.sqrt(dt)

    backend.seed(1234 + n)
    _, p_kernel = _dissipative_only(backend, x, p, dt, params)
    p_oracle = dense_dissipative_substep(x, p, dt, dw, params)
    assert float(ulp_distance(p_kernel, p_oracle).max()) <= 4.0


def test_full_step_matches_reference(backend):
    n = 7
    params = ModelParams(-1.0, EPS_REF, 1.0, n)
    rng = np.random.RandomState(5)
    st = PhaseState(rng.uniform(0, 2 * math.pi, n), rng.normal(0, 10, n))
    cfg = IntegratorConfig(dt=0.05)

    backend.seed(77)
    z = backend.normals(1)[0]
    dw = z * math.sqrt(cfg.dt)

    backend.seed(77)
    out = step(st, params, cfg, backend)
    x_ref, p_ref = full_step_reference(st.x, st.p, cfg.dt, dw, params)
    np.testing.assert_allclose(out.x, x_ref, rtol=1e-12, atol=1e-12)
    np.testing.assert_allclose(out.p, p_ref, rtol=1e-12, atol=1e-12)


# --- weak order of the dissipative discretization ---------------------------

def test_dissipative_substep_weak_bias_halves_with_dt(backend):
    """Single frozen particle: the discrete update has the exact stationary
    variance amp^2 / (g (2 - dt g)), so the bias against the continuum value
    amp^2/(2g) is linear in dt; halving dt must halve it."""
    g, amp = 0.5, 1.0
    n_steps = 400_000

    def measured_var(dt):
        x = np.array([HALF_PI])
        p = np.array([0.0])
        s, c = np.sin(x), np.cos(x)
        backend.seed(2024)
        # advance in chunks, accumulating p^2 after each step
        total = 0.0
        burn = 2000
        for k in range(burn):
            backend.advance_nbody(x, p, s, c, 1, dt, 0.0, 0.0, g, amp, False)
        for k in range(n_steps):
            backend.advance_nbody(x, p, s, c, 1, dt, 0.0, 0.0, g, amp, False)
            total += p[0] * p[0]
        return total / n_steps

    continuum = amp * amp / (2.0 * g)
    for dt in (0.5, 0.25):
        analytic = amp * amp / (g * (2.0 - dt * g))
        var = measured_var(dt)
        # MC error ~ 0.5% with this chain length
        assert var == pytest.approx(analytic, rel=0.02)
        bias = analytic - continuum
        assert bias == pytest.approx(continuum * dt * g / (2.0 - dt * g), rel=1e-12)
    bias_ratio = (amp**2 / (g * (2 - 0.5 * g)) - continuum) / (
        amp**2 / (g * (2 - 0.25 * g)) - continuum
    )
    assert 1.8 < bias_ratio < 2.3


def test_em_and_strang_agree_statistically(backend):
    n = 16
    params = ModelParams(-1.0, EPS_REF, 1.0, n)
    rng = np.random.RandomState(8)
    x0 = rng.uniform(0, 2 * math.pi, n)
    p0 = rng.normal(0, math.sqrt(97.5), n)
    steps = recording_grid(200.0, 0.02, per_decade=4)

    def final_kin(scheme, seed):
        backend.seed(seed)
        cfg = IntegratorConfig(dt=0.02, scheme=scheme)
        rows, _ = run_trajectory(
            PhaseState(x0.copy(), p0.copy()), params, cfg, steps, backend
        )
        return rows[-1, 1]

    kin_strang = np.array([final_kin("strang-split", 100 + k) for k in range(24)])
    kin_em = np.array([final_kin("euler-maruyama", 100 + k) for k in range(24)])
    se = math.sqrt(kin_strang.var(ddof=1) / 24 + kin_em.var(ddof=1) / 24)
    assert abs(kin_strang.mean() - kin_em.mean()) < 3.5 * se


# --- conservation, wrapping, aborts -----------------------------------------

def test_energy_conservation_hamiltonian_mode():
    backend = get_backend()
    backend.seed(777)
    p_i = ModelParams(-1.0, EPS_REF, 0.005, 50)
    p_f = ModelParams(-1.0, EPS_REF, 1.0, 50)
    init = sample_equilibrium(p_i, backend)
    cfg = IntegratorConfig(dt=0.05, gamma_on=False)
    steps = recording_grid(1e4, 0.05, per_decade=2)
    rows, final = run_trajectory(init, p_f, cfg, steps, backend)
    e0 = energy(init, p_f)
    e1 = energy(final, p_f)
    assert abs((e1 - e0) / e0) < 1e-6


def test_theta_bounded_and_positions_wrapped(backend):
    n = 12
    params = ModelParams(-1.0, EPS_REF, 1.0, n)
    backend.seed(31)
    init = sample_equilibrium(params, backend, burn_sweeps=200)
    cfg = IntegratorConfig(dt=0.05)
    steps = recording_grid(500.0, 0.05, per_decade=16)
    rows, final = run_trajectory(init, params, cfg, steps, backend)
    assert np.all(np.abs(rows[:, 0]) <= 1.0)
    assert np.all((final.x >= 0.0) & (final.x < 2 * math.pi))


def test_horizon_zero_gives_initial_record_only(backend):
    params = ModelParams(-1.0, EPS_REF, 0.5, 4)
    backend.seed(3)
    init = sample_equilibrium(params, backend, burn_sweeps=100)
    rows, final = run_trajectory(
        init, params, IntegratorConfig(), recording_grid(0.0, 0.05), backend
    )
    assert rows.shape[0] == 1
    assert final.tau == 0.0


def test_nonfinite_state_aborts_with_time(backend):
    params = ModelParams(-1.0, EPS_REF, 1.0, 3)
    bad = PhaseState(np.array([0.1, 0.2, 0.3]), np.array([np.nan, 1.0, 2.0]))
    with pytest.raises(TrajectoryDivergedError, match="tau"):
        run_trajectory(bad, params, IntegratorConfig(), recording_grid(10.0, 0.05), backend)


def test_stability_heuristic_rejects_huge_dt():
    params = ModelParams(-1.0, 0.5, 1.0, 4)
    st = PhaseState(np.zeros(4), np.full(4, 50.0))
    with pytest.raises(StabilityError):
        run_trajectory(
            st, params, IntegratorConfig(dt=5.0), recording_grid(50.0, 5.0),
            get_backend(),
        )


def test_integrator_config_validation():
    with pytest.raises(ConfigError):
        IntegratorConfig(dt=0.0)
    with pytest.raises(ConfigError):
        IntegratorConfig(scheme="rk4")


def test_checkpoint_roundtrip(tmp_path):
    rng = np.random.RandomState(0)
    st = PhaseState(rng.uniform(0, 2 * math.pi, 17), rng.normal(size=17), tau=12.5)
    path = tmp_path / "state.bin"
    save_phase_state(st, path)
    loaded = load_phase_state(path)
    np.testing.assert_array_equal(loaded.x, st.x)
    np.testing.assert_array_equal(loaded.p, st.p)
    assert loaded.tau == 12.5


def test_run_trajectory_writes_checkpoint(tmp_path):
    backend = get_backend()
    params = ModelParams(-1.0, EPS_REF, 0.5, 6)
    backend.seed(4)
    init = sample_equilibrium(params, backend, burn_sweeps=100)
    path = tmp_path / "chk.bin"
    rows, final = run_trajectory(
        init, params, IntegratorConfig(), recording_grid(20.0, 0.05, per_decade=4),
        backend, checkpoint_path=path,
    )
    loaded = load_phase_state(path)
    np.testing.assert_array_equal(loaded.x, final.x)
    np.testing.assert_array_equal(loaded.p, final.p)
    assert loaded.tau == final.tau


# --- backend equivalence -----------------------------------------------------

def test_backends_share_random_streams():
    nb = get_backend("numba")
    np_ = get_backend("numpy")
    nb.seed(123456)
    np_.seed(123456)
    np.testing.assert_array_equal(nb.normals(7), np_.normals(7))
    np.testing.assert_array_equal(nb.uniforms(5), np_.uniforms(5))


def test_backends_agree_over_short_trajectory():
    n = 20
    params = ModelParams(-1.0, EPS_REF, 1.0, n)
    rng = np.random.RandomState(2)
    x0 = rng.uniform(0, 2 * math.pi, n)
    p0 = rng.normal(0, 10, n)
    outs = {}
    for name in BACKENDS:
        be = get_backend(name)
        be.seed(42)
        x, p = x0.copy(), p0.copy()
        s, c = np.sin(x), np.cos(x)
        bad = be.advance_nbody(
            x, p, s, c, 100, 0.05, params.eps, 2 * params.delta * params.nbar,
            derive_params(params).gamma_tilde / n, noise_amplitude(params), False,
        )
        assert bad == 0
        outs[name] = (x, p)
    np.testing.assert_allclose(outs["numba"][0], outs["numpy"][0], rtol=1e-10, atol=1e-12)
    np.testing.assert_allclose(outs["numba"][1], outs["numpy"][1], rtol=1e-10, atol=1e-10)


@pytest.mark.perf
def test_step_cost_scales_linearly():
    backend = get_backend()
    params_small = ModelParams(-1.0, EPS_REF, 1.0, 1000)

    def advance_time(n):
        rng = np.random.RandomState(1)
        x = rng.uniform(0, 2 * math.pi, n)
        p = rng.normal(0, 10, n)
        s, c = np.sin(x), np.cos(x)
        backend.seed(9)
        backend.advance_nbody(x, p, s, c, 50, 0.05, params_small.eps, -2.0,
                              1e-4, 0.01, False)  # warm up
        best = math.inf
        for _ in range(3):
            t0 = time.perf_counter()
            backend.advance_nbody(x, p, s, c, 2000, 0.05, params_small.eps,
                                  -2.0, 1e-4, 0.01, False)
            best = min(best, time.perf_counter() - t0)
        return best

    t1 = advance_time(1000)
    t2 = advance_time(2000)
    assert t2 / t1 <= 2.5
