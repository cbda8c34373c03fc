import itertools
import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from quansistor.chain import (
    ModeSpec,
    characteristic,
    chebyshev_u,
    constraint_residual,
    constraint_scale,
    dense_oracle,
    expand,
    expansion_vector,
    full_hamiltonian,
    identified_pair,
    localize_left,
    mode_decouple,
    mode_hamiltonian,
    odd_l_small_root,
    pair_splitting,
    solve_spectrum,
    survival_probability,
)
from quansistor.errors import ClassMismatch, NoPair, NotNormalized, SizeLimit
from quansistor.leads import LeadSpec, fixed_point
from quansistor.omega import OmegaParams

GRID = list(itertools.product([1, 2, 5, 10, 11], [0.05, 0.1, 0.5], [0, 1.2, -1.2, 2.5, -2.5],
                              [0, 1.2, -1.2, 2.5, -2.5]))


def _aligned(u, v):
    """Distance between two unit vectors after removing the relative phase."""
    ph = np.vdot(u, v)
    return float(np.max(np.abs(u * ph / abs(ph) - v)))


# --- Chebyshev and the constraint ----------------------------------------------

def test_chebyshev_base():
    assert chebyshev_u(0, 0.7) == 1.0
    assert chebyshev_u(1, 0.7) == pytest.approx(1.4)
    assert chebyshev_u(-1, 0.7) == 0.0


@given(st.integers(0, 40), st.floats(-1, 1))
def test_chebyshev_trigonometric(n, x):
    th = math.acos(x)
    if abs(math.sin(th)) < 1e-6:
        expected = (n + 1) * (1 if x > 0 else (-1) ** n)
    else:
        expected = math.sin((n + 1) * th) / math.sin(th)
    assert float(chebyshev_u(n, x)) == pytest.approx(expected, abs=1e-12 * max(1, n * n))


def test_constraint_l1_base_case():
    m = ModeSpec(0.3, -0.4, 0.5, 0.7, 1)
    for e in (-1.1, 0.2, 2.7):
        d, dt = (e - 0.3) / 0.25, (e + 0.4) / 0.49
        assert constraint_residual(e, m) == pytest.approx(d * dt * e - d - dt, rel=1e-13)


@pytest.mark.parametrize("L, t, lam, mu", GRID[::7])
def test_constraint_vanishes_at_oracle_roots(L, t, lam, mu):
    m = ModeSpec(lam, mu, t, t, L)
    for e in dense_oracle(m)[0]:
        assert abs(constraint_residual(e, m)) <= 1e-9 * constraint_scale(e, m) + 1e-13


@given(st.floats(-4, 4), st.floats(-3, 3), st.floats(-3, 3), st.floats(0.05, 1), st.floats(0.05, 1),
       st.integers(1, 12))
def test_characteristic_is_determinant(e, lam, mu, t1, t2, L):
    m = ModeSpec(lam, mu, t1, t2, L)
    det = np.linalg.det(e * np.eye(m.n_sites) - mode_hamiltonian(m)).real
    assert characteristic(e, m) == pytest.approx(det, rel=1e-8, abs=1e-8)
    assert characteristic(e, m) == pytest.approx(m.s1 * m.s2 * constraint_residual(e, m), rel=1e-10, abs=1e-12)


# --- dense oracle and solver ------------------------------------------------------

def test_three_site_chain():
    w, _ = dense_oracle(ModeSpec(0.0, 0.0, 1.0, 1.0, 1))
    assert np.allclose(w, [-math.sqrt(2), 0, math.sqrt(2)], atol=1e-14)
    e = [s.energy for s in solve_spectrum(ModeSpec(0.0, 0.0, 1.0, 1.0, 1))]
    assert np.allclose(e, [-math.sqrt(2), 0, math.sqrt(2)], atol=1e-14)


def test_size_limit():
    with pytest.raises(SizeLimit):
        mode_hamiltonian(ModeSpec(0, 0, 0.1, 0.1, 2000))


def test_zero_coupling_rejected():
    with pytest.raises(ValueError):
        ModeSpec(0, 0, 0.0, 0.1, 3)


@pytest.mark.parametrize("L, t, lam, mu", GRID)
def test_oracle_equivalence_grid(L, t, lam, mu):
    m = ModeSpec(lam, mu, t, t, L)
    states = solve_spectrum(m)
    w, v = dense_oracle(m)
    assert len(states) == L + 2
    assert np.allclose([s.energy for s in states], w, atol=1e-9, rtol=0)
    h = mode_hamiltonian(m)
    for k, s in enumerate(states):
        assert abs(np.linalg.norm(s.state) - 1) <= 1e-12
        assert np.linalg.norm(h @ s.state - s.energy * s.state) <= 1e-9
        if k == 0 or w[k] - w[k - 1] > 1e-6:
            if k == L + 1 or w[k + 1] - w[k] > 1e-6:
                assert _aligned(s.state, v[:, k]) <= 1e-8
        assert (s.kind == "bound") == (abs(s.energy) > 2)


def test_complex_couplings_only_magnitude_matters():
    a = solve_spectrum(ModeSpec(1.2, -0.4, 0.3 * np.exp(0.7j), 0.2j, 6))
    b = dense_oracle(ModeSpec(1.2, -0.4, 0.3, 0.2, 6))[0]
    assert np.allclose([s.energy for s in a], b, atol=1e-12)


# --- reference landmarks ----------------------------------------------------------------

def _pair(L, lam, t=0.1):
    states = solve_spectrum(ModeSpec(lam, lam, t, t, L))
    return states, identified_pair(states)


def test_l10_bound_pair():
    states, (a, s) = _pair(10, 2.5)
    assert a.kind == s.kind == "bound"
    assert a.energy == pytest.approx(2.5049765, abs=1e-6)
    assert s.energy == pytest.approx(2.5049904, abs=1e-6)
    assert a.parity == "antisymmetric" and s.parity == "symmetric"
    assert sum(x.kind == "continuum" for x in states) == 10


def test_l10_hybridized_pair():
    _, (a, s) = _pair(10, 1.4)
    assert a.kind == s.kind == "hybridized"
    assert a.energy == pytest.approx(1.4044, abs=1e-3)
    assert s.energy == pytest.approx(1.4226, abs=1e-3)
    assert a.parity == "antisymmetric" and s.parity == "symmetric"


def test_l11_pairs():
    _, (a, b) = _pair(11, 2.5)
    assert (a.energy, b.energy) == (pytest.approx(2.504980, abs=1e-6), pytest.approx(2.504987, abs=1e-6))
    _, (a, b) = _pair(11, 1.2)
    assert (a.energy, b.energy) == (pytest.approx(1.1990, abs=1e-3), pytest.approx(1.2142, abs=1e-3))
    assert a.parity == "symmetric" and b.parity == "antisymmetric"


def test_l10_continuum_states_present():
    states, _ = _pair(10, 2.5)
    e = np.array([s.energy for s in states if s.kind == "continuum"])
    # the figure labels quote three significant figures
    for target in (0.282, 0.827):
        assert np.min(np.abs(e - target)) <= 2.5e-3


def test_odd_l_small_root_reported():
    states, _ = _pair(11, 2.5)
    r = odd_l_small_root(states)
    assert abs(r) == min(abs(s.energy) for s in states)


# --- closed-form amplitude profiles --------------------------------------------------

@pytest.mark.parametrize("L, lam", [(10, 1.4), (11, 1.2), (7, 0.3)])
def test_in_band_sine_profile(L, lam):
    t = 0.1
    m = ModeSpec(lam, lam, t, t, L)
    for s in solve_spectrum(m):
        if abs(s.energy) >= 2:
            continue
        th = math.acos(s.energy / 2)
        j = np.arange(L + 2)
        prof = (s.energy - lam) / t**2 * np.sin(j * th) - np.sin((j - 1) * th)
        prof /= np.linalg.norm(prof)
        b = s.beta.real / np.linalg.norm(s.beta)
        assert min(np.max(np.abs(prof - b)), np.max(np.abs(prof + b))) <= 1e-8


@pytest.mark.parametrize("lam", [2.5, -2.5, 3.1])
def test_out_of_band_sinh_profile(lam):
    t, L = 0.1, 10
    m = ModeSpec(lam, lam, t, t, L)
    for s in solve_spectrum(m):
        if s.kind != "bound":
            continue
        sg = 1.0 if s.energy > 0 else -1.0
        xi = math.acosh(abs(s.energy) / 2)
        j = np.arange(L + 2)
        # sign flip relative to the printed form: (|E| - sgn(E) lambda)
        prof = sg**j * ((abs(s.energy) - sg * lam) / t**2 * np.sinh(j * xi) - np.sinh((j - 1) * xi))
        prof /= np.linalg.norm(prof)
        b = s.beta.real / np.linalg.norm(s.beta)
        assert min(np.max(np.abs(prof - b)), np.max(np.abs(prof + b))) <= 1e-8


# --- structural invariants ------------------------------------------------------------

@given(st.integers(1, 14), st.floats(0.05, 0.9), st.floats(-3, 3))
def test_parity(L, t, lam):
    for s in solve_spectrum(ModeSpec(lam, lam, t, t, L)):
        b = s.beta
        sc = np.max(np.abs(b))
        assert min(np.max(np.abs(b[::-1] - b)), np.max(np.abs(b[::-1] + b))) <= 1e-9 * sc
        assert s.parity in ("symmetric", "antisymmetric")


def test_parity_undefined_when_asymmetric():
    assert all(s.parity == "none" for s in solve_spectrum(ModeSpec(1.0, 0.5, 0.1, 0.1, 5)))


@pytest.mark.parametrize("lam", [2.5, -2.5, 3.0])
def test_bound_endpoint_dominance(lam):
    states = solve_spectrum(ModeSpec(lam, lam, 0.1, 0.1, 10))
    cont = [math.sqrt(s.endpoint_weight) for s in states if s.kind == "continuum"]
    for s in states:
        if s.kind == "bound":
            assert math.sqrt(s.endpoint_weight) >= 10 * np.median(cont)


@pytest.mark.parametrize("lam, t", [(2.5, 0.1), (3.0, 0.3), (-2.5, 0.2)])
def test_convergence_to_fixed_point(lam, t):
    e_star = fixed_point(lam, t).e_star.real

    def dist(L):
        _, (a, b) = _pair(L, lam, t)
        return max(abs(a.energy - e_star), abs(b.energy - e_star))

    assert dist(10) < dist(5)


# --- mode decoupling --------------------------------------------------------------------

def test_mode_decouple_example():
    modes = mode_decouple(OmegaParams(1, np.pi, 1, 2, 0), OmegaParams(0, 0, 0, 0, 0), LeadSpec(0.1, 4))
    got = sorted((m.lam, m.mu) for m in modes)
    want = sorted([(-3, 0), (3 - 2 * np.pi, 0), (1, 0), (3 + 2 * np.pi, 0)])
    assert np.allclose(got, want, atol=1e-12)


def test_identical_cores():
    p = OmegaParams(0.3, 1.1, -0.2, 0.5, 1)
    assert all(m.lam == pytest.approx(m.mu) for m in mode_decouple(p, p, LeadSpec(0.1, 3)))


def test_class_mismatch():
    with pytest.raises(ClassMismatch):
        mode_decouple(OmegaParams(0, 1, 0, 0, 0), OmegaParams(0, 1, 0, 0, 1), LeadSpec(0.1, 3))


@pytest.mark.parametrize("q", [0, 1, 2, 3])
def test_full_system_equals_mode_union(q):
    rng = np.random.default_rng(10 + q)
    c1 = OmegaParams(*rng.normal(size=4), q=q)
    c2 = OmegaParams(*rng.normal(size=4), q=q)
    leads = LeadSpec(0.1, 6)
    union = np.sort(np.concatenate([[s.energy for s in solve_spectrum(m)] for m in mode_decouple(c1, c2, leads)]))
    full = np.linalg.eigvalsh(full_hamiltonian(c1, c2, leads))
    assert np.allclose(union, full, atol=1e-9, rtol=0)


# --- memory experiment -------------------------------------------------------------------

def test_left_localization_bound():
    m = ModeSpec(2.5, 2.5, 0.1, 0.1, 10)
    psi = expansion_vector(localize_left(m))
    assert abs(psi[0]) ** 2 >= 0.9
    assert abs(psi[-1]) ** 2 <= 1e-3


def test_no_pair():
    m = ModeSpec(2.5, -2.5, 0.1, 0.1, 10)  # one bound state on each side, no mirror pair
    states = solve_spectrum(m)
    for s in states:
        s.kind = "continuum"
    with pytest.raises(NoPair):
        identified_pair(states)


def test_survival_trivial():
    m = ModeSpec(2.5, 2.5, 0.1, 0.1, 10)
    x = localize_left(m)
    assert survival_probability(x, 0.0) == pytest.approx(1.0, abs=1e-15)


def test_survival_closed_form_and_dense_evolution():
    m = ModeSpec(2.5, 2.5, 0.1, 0.1, 10)
    states = solve_spectrum(m)
    x = localize_left(m, states)
    de = pair_splitting(states)
    t = np.linspace(0, 3 / de, 301)
    p = survival_probability(x, t)
    assert np.max(np.abs(p - 0.5 * (1 + np.cos(de * t)))) <= 1e-12
    # independent route: evolve with the dense eigendecomposition
    w, v = dense_oracle(m)
    psi = expansion_vector(x)
    c = v.conj().T @ psi
    for tk in t[::50]:
        amp = np.vdot(psi, v @ (np.exp(-1j * w * tk) * c))
        assert abs(amp) ** 2 == pytest.approx(survival_probability(x, tk), abs=1e-8)


def test_survival_decoupled_limit():
    m = ModeSpec(2.5, 2.5, 1e-6, 1e-6, 10)
    x = localize_left(m)
    assert survival_probability(x, 100.0) == pytest.approx(1.0, abs=1e-9)


def test_expand_roundtrip_and_normalization():
    m = ModeSpec(1.4, 1.4, 0.1, 0.1, 10)
    states = solve_spectrum(m)
    psi = np.zeros(12, dtype=complex)
    psi[0] = 1.0
    x = expand(psi, states)
    assert np.allclose(expansion_vector(x), psi, atol=1e-12)
    with pytest.raises(NotNormalized):
        expand(2 * psi, states)


def test_escape_time_ratio():
    _, (a, b) = _pair(10, 2.5)
    _, (c, d) = _pair(10, 1.4)
    ratio = (d.energy - c.energy) / (b.energy - a.energy)
    assert 10**2.5 <= ratio <= 10**3.5
