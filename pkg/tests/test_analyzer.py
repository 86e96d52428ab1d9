import numpy as np
import pytest

from fermicluster import analyzer as an
from fermicluster import qstate as qs

from oracles import random_state

R2 = 1 / np.sqrt(2)
FAMILIES = ("bell", "ghz3", "quad")


def ket(bits_to_amp, n):
    v = np.zeros(1 << n, dtype=complex)
    for bits, a in bits_to_amp.items():
        v[int(bits, 2)] = a
    return v


# -- labels and basis states -----------------------------------------------------


def test_basis_state_examples():
    np.testing.assert_allclose(an.basis_state("bell:phi+").amps, ket({"00": R2, "11": R2}, 2), atol=1e-15)
    np.testing.assert_allclose(an.basis_state("ghz3:g1+").amps, ket({"000": R2, "111": R2}, 3), atol=1e-15)
    np.testing.assert_allclose(
        an.basis_state("quad:viii-").amps, ket({"1001": R2, "0110": -R2}, 4), atol=1e-15
    )
    np.testing.assert_allclose(
        an.basis_state("quad:v+").amps, ket({"1000": R2, "0111": R2}, 4), atol=1e-15
    )


@pytest.mark.parametrize("family, size", [("bell", 4), ("ghz3", 8), ("quad", 16)])
def test_family_is_orthonormal_basis(family, size):
    labels, rows = an.family_basis(family)
    assert len(labels) == size == len(set(labels))
    np.testing.assert_allclose(rows.conj() @ rows.T, np.eye(size), atol=1e-15)


@pytest.mark.parametrize("bad", ["bell:chi+", "quad:ix+", "ghz3:g1", "foo:phi+", "bell:phi*"])
def test_bad_labels(bad):
    with pytest.raises(ValueError):
        an.EntangledLabel.parse(bad)


def test_label_round_trip():
    for family in FAMILIES:
        for label in an.family_labels(family):
            assert an.EntangledLabel.parse(str(label)) == label


# -- Bell analyzer -----------------------------------------------------------------


@pytest.mark.parametrize(
    "name, p1, p2",
    [("bell:phi+", 1, 1), ("bell:phi-", 1, 0), ("bell:psi+", 0, 1), ("bell:psi-", 0, 0)],
)
def test_bell_readout_mapping(name, p1, p2):
    s = an.basis_state(name)
    rep = an.classify(an.bell_analyzer(), s, true_label=name)
    (br,) = rep.branches
    assert (br.outcomes["P1"], br.outcomes["P2"]) == (p1, p2)
    assert str(br.label) == name and abs(br.probability - 1) < 1e-12
    assert qs.fidelity(br.final_state, s) > 1 - 1e-12
    assert rep.deterministic and rep.destroyed == 0


# -- GHZ3 analyzer -----------------------------------------------------------------


def test_ghz3_sign_rule_for_g1():
    tree = an.ghz3_analyzer()
    plus = an.classify(tree, an.basis_state("ghz3:g1+"))
    assert {(b.outcomes["click3"], b.outcomes["P3"]) for b in plus.branches} == {(1, 1), (0, 0)}
    minus = an.classify(tree, an.basis_state("ghz3:g1-"))
    assert {(b.outcomes["click3"], b.outcomes["P3"]) for b in minus.branches} == {(1, 0), (0, 1)}
    assert all(str(b.label) == "ghz3:g1-" for b in minus.branches)


def test_ghz3_on_computational_state():
    rep = an.classify(an.ghz3_analyzer(), qs.basis_state("000"))
    dist = rep.distribution()
    assert dist == pytest.approx({"ghz3:g1+": 0.5, "ghz3:g1-": 0.5}, abs=1e-12)
    assert not rep.deterministic


def test_ghz3_destroys_one_qubit():
    for br in qs.run_schedule(an.basis_state("ghz3:g3-"), an.ghz3_analyzer().schedule):
        assert br.measured_qubits == {3} and br.final_state.n_qubits == 2


def test_ghz3_groups_separate_as_described():
    """P1 splits {g1,g2} from {g3,g4}; P2 splits {g1,g4} from {g2,g3}."""
    table = an.derived_group_table("ghz3")["P1P2"]
    p1_even = {g for k, gs in table.items() if k[0] == "1" for g in gs}
    p2_even = {g for k, gs in table.items() if k[1] == "1" for g in gs}
    assert p1_even == {"g1", "g2"}
    assert p2_even == {"g1", "g4"}


# -- Quad analyzer -------------------------------------------------------------------


def test_quad_examples():
    tree = an.quad_analyzer()
    rep = an.classify(tree, an.basis_state("quad:i+"), true_label="quad:i+")
    assert rep.deterministic
    assert {(b.outcomes["P1"], b.outcomes["P2"], b.outcomes["P3"]) for b in rep.branches} == {(1, 1, 1)}
    s = qs.StateVector(ket({"0011": R2, "1100": -R2}, 4))
    rep = an.classify(tree, s, true_label="quad:vi-")
    assert rep.deterministic
    assert {(b.outcomes["P1"], b.outcomes["P2"], b.outcomes["P3"]) for b in rep.branches} == {(1, 1, 0)}
    for br in rep.branches:
        sign = (1 if br.outcomes["click3"] else -1) * (1 if br.outcomes["click4"] else -1)
        sign *= 1 if br.outcomes["P4"] else -1
        assert sign == -1
        assert br.final_state.n_qubits == 2


def test_quad_group_table_against_parity_oracle():
    assert an.derived_group_table("quad") == an.oracle_group_table("quad")
    assert an.oracle_group_table("quad")["P1P2"] == {
        "11": ["i", "vi"],
        "10": ["ii", "iii"],
        "01": ["iv", "v"],
        "00": ["vii", "viii"],
    }
    assert an.derived_group_table("ghz3") == an.oracle_group_table("ghz3")


# -- shared properties ---------------------------------------------------------------


@pytest.mark.parametrize("family", FAMILIES)
def test_every_basis_state_every_branch(family):
    tree = an.ANALYZERS[family]()
    for label in an.family_labels(family):
        rep = an.classify(tree, an.basis_state(label), true_label=label)
        assert rep.deterministic, str(label)
        assert abs(sum(b.probability for b in rep.branches) - 1) < 1e-12
        assert rep.destroyed == {"bell": 0, "ghz3": 1, "quad": 2}[family]


@pytest.mark.parametrize("family", FAMILIES)
def test_label_distribution_equals_overlaps(family, rng):
    tree = an.ANALYZERS[family]()
    _, rows = an.family_basis(family)
    for _ in range(100):
        v = random_state(rng, tree.n_qubits)
        got = an.classify(tree, qs.StateVector(v)).distribution()
        # oracle: direct projection onto the basis rows
        want = np.abs(rows.conj() @ v) ** 2
        for label, p in zip(an.family_labels(family), want):
            assert abs(got.get(str(label), 0.0) - p) < 1e-10


def test_sample_mode_returns_one_labelled_branch():
    tree = an.quad_analyzer()
    rep = an.classify(tree, an.basis_state("quad:vii-"), qs.Sample(7), true_label="quad:vii-")
    assert len(rep.branches) == 1 and rep.deterministic


def test_classify_dimension_mismatch():
    with pytest.raises(ValueError):
        an.classify(an.bell_analyzer(), qs.plus_product(3))


def test_report_json():
    rep = an.classify(an.bell_analyzer(), an.basis_state("bell:phi-"), true_label="bell:phi-")
    doc = rep.to_json()
    assert doc["family"] == "bell" and doc["input"] == "bell:phi-"
    assert doc["branches"] == [{"outcomes": {"P1": 1, "P2": 0}, "probability": pytest.approx(1.0), "label": "bell:phi-"}]
    assert doc["deterministic"] is True


# -- decomposition identities ------------------------------------------------------------


def test_decompositions():
    rep = an.verify_decompositions()
    assert rep["pass"]
    assert len(rep["checks"]) == 8 + 16
    for c in rep["checks"]:
        assert c.residual < 1e-12
        if c.label.startswith("ghz3"):
            assert c.constant == pytest.approx(np.sqrt(2), abs=1e-12)
        else:
            assert abs(c.constant) == pytest.approx(1, abs=1e-12)


def test_printed_expansions_by_hand():
    phi_p = an.basis_state("bell:phi+").amps
    phi_m = an.basis_state("bell:phi-").amps
    psi_p = an.basis_state("bell:psi+").amps
    psi_m = an.basis_state("bell:psi-").amps
    plus, minus = np.array([1, 1]) / np.sqrt(2), np.array([1, -1]) / np.sqrt(2)
    # (|010> + |101>)/sqrt2 written as Psi+ |+> + Psi- |-> (unnormalized)
    rhs = np.kron(psi_p, plus) + np.kron(psi_m, minus)
    np.testing.assert_allclose(rhs / np.sqrt(2), an.basis_state("ghz3:g3+").amps, atol=1e-15)
    # (|0000> + |1111>)/sqrt2 = (Phi+ Phi+ + Phi- Phi-)/sqrt2
    rhs = (np.kron(phi_p, phi_p) + np.kron(phi_m, phi_m)) / np.sqrt(2)
    np.testing.assert_allclose(rhs, an.basis_state("quad:i+").amps, atol=1e-15)
