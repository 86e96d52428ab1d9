import itertools

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.stats import unitary_group

from fermicluster import fermion as fm
from fermicluster import qstate as qs

from oracles import jw_creation_ops, random_state

R2 = 1 / np.sqrt(2)
CDAG = jw_creation_ops(4)
VAC = np.zeros(16, dtype=complex)
VAC[0] = 1
PAIR_VECTORS = [CDAG[m] @ CDAG[n] @ VAC for m, n in fm.PAIRS]


def pair(m, n):
    a = np.zeros(6, dtype=complex)
    a[fm.PAIRS.index((m, n))] = 1
    return fm.FockState(a)


def jw_scatter(f, u):
    """Oracle: transform creation operators on the full Fock space, then read pair amplitudes."""
    dressed = [sum(u[p, m] * CDAG[p] for p in range(4)) for m in range(4)]
    vec = sum(c * dressed[m] @ dressed[n] @ VAC for (m, n), c in zip(fm.PAIRS, f.amps))
    coeffs = np.array([np.vdot(b, vec) for b in PAIR_VECTORS])
    # nothing may leak outside the two-particle sector
    assert abs(np.linalg.norm(coeffs) - np.linalg.norm(vec)) < 1e-12
    return coeffs


def random_fock(rng):
    v = rng.normal(size=6) + 1j * rng.normal(size=6)
    return fm.FockState(v / np.linalg.norm(v))


# -- embedding --------------------------------------------------------------------


def test_embed_examples():
    f = fm.embed_spin_state(qs.basis_state("00"))
    np.testing.assert_array_equal(f.amps, pair(fm.A_UP, fm.B_UP).amps)
    f = fm.embed_spin_state(qs.StateVector.from_terms({"00": 1, "11": 1}))
    assert abs(f.amplitude(fm.A_UP, fm.B_UP) - R2) < 1e-15
    assert abs(f.amplitude(fm.A_DN, fm.B_DN) - R2) < 1e-15
    f = fm.embed_spin_state(qs.basis_state("01"))
    assert f.amplitude(fm.A_UP, fm.B_DN) == 1
    assert f.amplitude(fm.B_DN, fm.A_UP) == -1


def test_embed_matches_jordan_wigner(rng):
    v = random_state(rng, 2)
    f = fm.embed_spin_state(qs.StateVector(v))
    vec = sum(v[2 * s1 + s2] * CDAG[s1] @ CDAG[2 + s2] @ VAC for s1 in (0, 1) for s2 in (0, 1))
    np.testing.assert_allclose([np.vdot(b, vec) for b in PAIR_VECTORS], f.amps, atol=1e-15)


def test_embed_wrong_dimension():
    with pytest.raises(ValueError):
        fm.embed_spin_state(qs.plus_product(3))


# -- PBS and scattering --------------------------------------------------------------


def test_pbs_matrix():
    u = fm.pbs_matrix()
    np.testing.assert_array_equal(u[:, fm.A_UP], [1, 0, 0, 0])
    np.testing.assert_array_equal(u[:, fm.A_DN], [0, 0, 0, 1])
    np.testing.assert_allclose(u.conj().T @ u, np.eye(4), atol=1e-15)
    with pytest.raises(ValueError):
        fm.pbs_matrix(0.5)


def test_scattering_examples():
    f = pair(fm.A_UP, fm.B_UP)
    np.testing.assert_array_equal(fm.apply_scattering(f, np.eye(4)).amps, f.amps)
    out = fm.apply_scattering(f, fm.pbs_matrix())
    np.testing.assert_allclose(out.amps, pair(fm.A_UP, fm.B_UP).amps, atol=1e-15)
    out = fm.apply_scattering(pair(fm.A_UP, fm.B_DN), fm.pbs_matrix())
    np.testing.assert_allclose(np.abs(out.amps), np.abs(pair(fm.A_UP, fm.A_DN).amps), atol=1e-15)
    assert np.all(out.arm_occupation("A")[np.abs(out.amps) > 0] == 2)


def test_scattering_rejects_non_unitary():
    with pytest.raises(ValueError):
        fm.apply_scattering(pair(0, 1), np.ones((4, 4)))


@settings(max_examples=40, deadline=None)
@given(seed=st.integers(0, 2**32 - 1))
def test_scattering_matches_jordan_wigner_and_minors(seed):
    rng = np.random.default_rng(seed)
    u = unitary_group.rvs(4, random_state=rng)
    f = random_fock(rng)
    got = fm.apply_scattering(f, u).amps
    np.testing.assert_allclose(got, jw_scatter(f, u), atol=1e-12)
    # second compound matrix: 2x2 minors of u
    compound = np.array(
        [[np.linalg.det(u[np.ix_([p, q], [m, n])]) for (m, n) in fm.PAIRS] for (p, q) in fm.PAIRS]
    )
    np.testing.assert_allclose(got, compound @ f.amps, atol=1e-12)
    assert abs(np.linalg.norm(got) - 1) < 1e-12


# -- charge detection -----------------------------------------------------------------


def _scattered(label_or_state, r=1.0):
    s = label_or_state if isinstance(label_or_state, qs.StateVector) else qs.StateVector.from_label(label_or_state)
    return fm.apply_scattering(fm.embed_spin_state(s), fm.pbs_matrix(r))


def test_detect_plus_plus():
    outcome, p, f = fm.detect_charge(_scattered("++"), "A", forced=fm.ONE)
    assert outcome == fm.ChargeOutcome(fm.ONE, "A") and outcome.bit == 1
    assert abs(p - 0.5) < 1e-12
    _, _, spin = fm.encoder(qs.StateVector.from_label("++"), forced=fm.ONE)
    np.testing.assert_allclose(spin.amps, [R2, 0, 0, R2], atol=1e-12)


def test_detect_deterministic_cases():
    outcome, p, _ = fm.detect_charge(_scattered("00"), "A", rng=np.random.default_rng(0))
    assert outcome.value == fm.ONE and abs(p - 1) < 1e-12
    outcome, p, _ = fm.detect_charge(_scattered("01"), "A", rng=np.random.default_rng(0))
    assert outcome.value == fm.ZERO_OR_TWO and abs(p - 1) < 1e-12
    with pytest.raises(qs.BranchImpossibleError):
        fm.detect_charge(_scattered("01"), "A", forced=fm.ONE)
    with pytest.raises(ValueError):
        fm.detect_charge(_scattered("01"), "C", forced=fm.ONE)


def test_detectors_on_either_arm_agree(rng):
    f = random_fock(rng)
    _, pa, _ = fm.detect_charge(f, "A", forced=1)
    _, pb, _ = fm.detect_charge(f, "B", forced=1)
    assert abs(pa - pb) < 1e-12


# -- reduction -------------------------------------------------------------------------


def test_reduce_examples():
    np.testing.assert_array_equal(fm.reduce_to_spin(pair(fm.A_UP, fm.B_UP)).amps, [1, 0, 0, 0])
    f = fm.FockState(
        (pair(fm.A_UP, fm.B_UP).amps + pair(fm.A_DN, fm.B_DN).amps) / np.sqrt(2)
    )
    np.testing.assert_allclose(fm.reduce_to_spin(f).amps, [R2, 0, 0, R2], atol=1e-15)
    with pytest.raises(fm.BunchedError):
        fm.reduce_to_spin(pair(fm.A_UP, fm.A_DN))


def test_uncorrected_even_branch_carries_exchange_phase():
    """Both electrons swap arms on |11>, which costs -r**2 relative to |00>."""
    for r in fm.SWEEP_PHASES:
        _, _, f = fm.detect_charge(_scattered("++", r), "A", forced=fm.ONE)
        raw = fm.reduce_to_spin(f)
        assert abs(raw.amps[3] / raw.amps[0] - fm.even_branch_phase(r)) < 1e-12
    assert fm.even_branch_phase(1.0) == -1


# -- encoder equivalence ------------------------------------------------------------------


@settings(max_examples=50, deadline=None)
@given(seed=st.integers(0, 2**32 - 1), r=st.sampled_from(fm.SWEEP_PHASES))
def test_encoder_equals_even_parity_projection(seed, r):
    s = qs.StateVector(random_state(np.random.default_rng(seed), 2))
    _, p_q, s_q = qs.parity_check(s, 1, 2, "Z", forced=1)
    _, p_f, s_f = fm.encoder(s, r, forced=fm.ONE)
    assert abs(p_f - p_q) < 1e-12
    assert qs.equal_up_to_global_phase(s_f, s_q, 1e-12)
    outcome, p_odd, bunched = fm.encoder(s, r, forced=fm.ZERO_OR_TWO)
    assert abs(p_odd - (1 - p_q)) < 1e-12
    assert isinstance(bunched, fm.FockState)
    with pytest.raises(fm.BunchedError):
        fm.reduce_to_spin(bunched)


@pytest.mark.parametrize("bits, p_one", [("00", 1), ("01", 0), ("10", 0), ("11", 1)])
def test_encoder_on_basis(bits, p_one):
    _, p, _ = fm.detect_charge(_scattered(bits), "A", forced=fm.ONE if p_one else fm.ZERO_OR_TWO)
    assert abs(p - 1) < 1e-12


def test_verify_parity_povm_report():
    rep = fm.verify_parity_povm(samples=1000, seed=3)
    assert set(rep) >= {"samples", "max_prob_dev", "max_state_dev", "phase_sweep_pass"}
    assert rep["pass"] and rep["phase_sweep_pass"]
    assert rep["max_prob_dev"] < 1e-10 and rep["max_state_dev"] < 1e-10
    assert abs(rep["plus_plus"]["p_one"] - 0.5) < 1e-12


def test_verify_parity_povm_negative_control():
    h = np.array([[1, 1], [1, -1]]) / np.sqrt(2)
    rep = fm.verify_parity_povm(samples=20, scattering=np.kron(h, np.eye(2)))
    assert not rep["pass"]
    with pytest.raises(ValueError):
        fm.verify_parity_povm(samples=0)
