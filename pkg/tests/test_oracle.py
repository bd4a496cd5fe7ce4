import math

import numpy as np
import pytest

from optomech.coefficients import derived_scalars, f_closed_form
from optomech.mechanics import solve_subsystem
from optomech.moments import evolve_moments
from optomech.oracle import (TruncationError, analytic_state_coefficients,
                             analytic_state_tensor, coherent_amplitudes,
                             fixed_step_propagate, mechanical_fidelity_with_coherent,
                             oracle_moments, overlap, propagate,
                             recommended_dims)
from optomech.params import Drive, InitialState, ModelSpec


def test_coherent_amplitudes_normalised():
    amps = coherent_amplitudes(1.2 + 0.4j, 60)
    assert np.sum(np.abs(amps) ** 2) == pytest.approx(1.0, abs=1e-12)


def test_free_evolution_phases_exact():
    spec = ModelSpec()
    state = InitialState.coherent(0.5, 0.5)
    st = propagate(spec, state, math.pi, (12, 12))
    psi0 = np.outer(coherent_amplitudes(0.5, 12), coherent_amplitudes(0.5, 12))
    nb = np.arange(12)
    expected = psi0 * np.exp(-1j * math.pi * nb)[None, :]
    assert np.max(np.abs(st.amplitudes - expected)) < 1e-9


def test_norm_conservation():
    spec = ModelSpec.standard(1.0)
    st = propagate(spec, InitialState.coherent(0.8, 0.0), 2 * math.pi, (14, 220))
    assert st.norm_defect < 1e-8 * 2 * math.pi


def test_photon_number_conserved():
    spec = ModelSpec.standard(1.0)
    st = propagate(spec, InitialState.coherent(1.0, 0.0), math.pi, (16, 320))
    m = oracle_moments(st)
    assert m.adag_a == pytest.approx(1.0, abs=1e-8)


def test_mechanics_returns_to_vacuum_at_two_pi():
    spec = ModelSpec.standard(1.0)
    st = propagate(spec, InitialState.coherent(1.0, 0.0), 2 * math.pi, (17, 993))
    assert mechanical_fidelity_with_coherent(st, 0.0) > 0.9999


def test_truncation_detected_as_failure_to_close():
    # dims too small: the quadrature trajectory does not return at 2 pi,
    # even though the norm stays unit (truncated H is Hermitian)
    spec = ModelSpec.standard(1.0)
    with pytest.warns(UserWarning, match="tail mass"):
        small = propagate(spec, InitialState.coherent(1.0, 0.0), 2 * math.pi,
                          (10, 10))
    assert small.norm_defect < 1e-6
    assert mechanical_fidelity_with_coherent(small, 0.0) < 0.99


def test_initial_tail_warning():
    spec = ModelSpec()
    with pytest.warns(UserWarning, match="tail mass"):
        propagate(spec, InitialState.coherent(2.0, 0.0), 0.1, (6, 6))


def test_analytic_state_coefficients_two_pi():
    weights, labels = analytic_state_coefficients(1.3, 0.4, 1.0, 0.3 + 0.1j,
                                                  2 * math.pi, 12)
    assert np.allclose(labels, 0.3 + 0.1j)


def test_analytic_state_coefficients_plug_in():
    # g0 = 1, d1 = 0, n = 2, tau = pi: phi_2 = -mu_m + 4
    mu_m = 0.37 - 0.21j
    _, labels = analytic_state_coefficients(1.0, 0.0, 1.0, mu_m, math.pi, 4)
    assert labels[2] == pytest.approx(-mu_m + 4.0, abs=1e-12)


def test_analytic_state_overlap_with_propagation():
    g0, d1 = 1.0, 1.0
    mu_c, mu_m = 1.0, 0.2
    tau = math.pi / 3
    spec = ModelSpec.gravimetry(g0, d1)
    state = InitialState.coherent(mu_c, mu_m)
    dims = recommended_dims(spec, state, tau)
    st = propagate(spec, state, tau, dims)
    psi = analytic_state_tensor(g0, d1, mu_c, mu_m, tau, dims)
    assert overlap(psi, st.amplitudes) > 1.0 - 1e-6


def test_moments_match_squeezed_case():
    spec = ModelSpec(coupling=Drive.constant(1.0),
                     squeezing=Drive.constant(0.2))
    state = InitialState.coherent(1.0, 0.0)
    tau = 1.0
    dims = recommended_dims(spec, state, tau)
    st = propagate(spec, state, tau, dims)
    mo = oracle_moments(st)
    sol = solve_subsystem(spec, tau)
    f = f_closed_form(spec, tau)
    alpha, beta = sol.bogoliubov(tau)
    d = derived_scalars(f, alpha, beta, 0.0)
    ma = evolve_moments(f, alpha, beta, 1.0, 0.0, derived=d)
    for name in ("a", "b", "a2", "b2", "adag_a", "bdag_b", "ab", "abdag"):
        assert abs(getattr(ma, name) - getattr(mo, name)) < 1e-6, name


def test_branch_propagator_matches_fixed_step_rk4():
    # small, fully resolvable case where the reference stepper is affordable
    spec = ModelSpec(coupling=Drive.offset_sinusoid(0.4, 0.5, 1.0),
                     displacement=Drive.cosine(0.3, 1.0),
                     squeezing=Drive.cosine(0.05, 2.0))
    state = InitialState.coherent(0.5, 0.2)
    dims = (11, 40)
    fast = propagate(spec, state, 1.5, dims)
    slow = fixed_step_propagate(spec, state, 1.5, dims)
    assert np.max(np.abs(fast.amplitudes - slow.amplitudes)) < 1e-5


def test_recommended_dims_rejects_out_of_envelope():
    spec = ModelSpec.standard(8.0)
    with pytest.raises(TruncationError):
        recommended_dims(spec, InitialState.coherent(2.0, 0.0), math.pi)


def test_fock_superposition_initialisation():
    spec = ModelSpec()
    state = InitialState.fock(3, 0.0)
    st = propagate(spec, state, 0.5, (6, 6))
    m = oracle_moments(st)
    assert m.adag_a == pytest.approx(1.5, abs=1e-10)
