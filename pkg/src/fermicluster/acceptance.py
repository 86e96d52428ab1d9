"""Exit criteria for the package, runnable from pytest or ``fermicluster verify``."""

from __future__ import annotations

import json
import time
from dataclasses import dataclass
from importlib import resources

import numpy as np

from . import analyzer as an
from . import cluster, fermion
from . import qstate as qs


@dataclass(frozen=True)
class CriterionResult:
    number: int
    name: str
    passed: bool
    detail: str

    def line(self) -> str:
        return f"[{'PASS' if self.passed else 'FAIL'}] {self.number:>2}. {self.name}: {self.detail}"


def load_golden(name: str) -> dict:
    return json.loads(resources.files("fermicluster").joinpath("golden", name).read_text())


def golden_vector(doc: dict) -> np.ndarray:
    n = doc["n"]
    out = np.zeros(1 << n, dtype=complex)
    for bits, value in doc["amplitudes"].items():
        out[int(bits, 2)] = value
    return out


def parity_collapse() -> CriterionResult:
    g = load_golden("parity_collapse.json")
    s = qs.plus_product(2)
    _, p, t = qs.parity_check(s, 1, 2, "Z", forced=1)
    state_dev = float(np.max(np.abs(t.amps - golden_vector(g))))
    prob_dev = abs(p - g["probability"])
    timings = []
    for _ in range(200):
        t0 = time.perf_counter()
        qs.parity_check(s, 1, 2, "Z", forced=1)
        timings.append(time.perf_counter() - t0)
    best = min(timings)
    ok = state_dev <= 1e-12 and prob_dev <= 1e-12 and best < 1e-3
    return CriterionResult(
        1, "two-qubit parity collapse", ok, f"state dev {state_dev:.1e}, prob dev {prob_dev:.1e}, {best * 1e6:.0f} us"
    )


def golden_preparations() -> CriterionResult:
    devs = {}
    for n, name in ((2, "cluster2.json"), (4, "cluster4.json")):
        (rec,) = cluster.prepare_cluster(n, qs.Forced("1" * (n - 1)))
        devs[n] = float(np.max(np.abs(rec.final_state.amps - golden_vector(load_golden(name)))))
    ok = all(d <= 1e-12 for d in devs.values())
    return CriterionResult(2, "golden cluster amplitudes", ok, f"max dev N=2 {devs[2]:.1e}, N=4 {devs[4]:.1e}")


def stabilizers_and_scale() -> CriterionResult:
    worst = 0.0
    for n in range(2, 12):
        (rec,) = cluster.prepare_cluster(n, qs.Forced("1" * (n - 1)))
        worst = max(worst, max(abs(e - 1.0) for e in rec.stabilizer_expectations))
    t0 = time.perf_counter()
    recs = cluster.prepare_cluster(12)
    elapsed = time.perf_counter() - t0
    worst = max(worst, *(abs(e - 1.0) for r in recs for e in r.stabilizer_expectations))
    all_canonical = all(r.matches_canonical for r in recs)
    ok = worst <= 1e-10 and len(recs) == 2**11 and all_canonical and elapsed < 60.0
    return CriterionResult(
        3,
        "stabilizers N=2..12, N=12 enumeration",
        ok,
        f"max |<K>-1| {worst:.1e}, {len(recs)} branches in {elapsed:.2f} s, all canonical={all_canonical}",
    )


def determinism() -> CriterionResult:
    failures = 0
    checked = 0
    for n in range(2, 9):
        recs = cluster.prepare_cluster(n)
        ref = recs[0].final_state
        for r in recs:
            checked += 1
            failures += not qs.equal_up_to_global_phase(r.final_state, ref, 1e-12)
    return CriterionResult(4, "deterministic preparation N<=8", failures == 0, f"{failures} failures / {checked} branches")


# readout mapping: P1 even -> Phi, P2 even -> "+"
BELL_EXPECTED = {"bell:phi+": (1, 1), "bell:phi-": (1, 0), "bell:psi+": (0, 1), "bell:psi-": (0, 0)}


def bell_analyzer() -> CriterionResult:
    tree = an.bell_analyzer()
    ok = True
    worst_fid = 0.0
    for name, (p1, p2) in BELL_EXPECTED.items():
        s = an.basis_state(name)
        rep = an.classify(tree, s, true_label=name)
        ok &= rep.deterministic and len(rep.branches) == 1
        br = rep.branches[0]
        ok &= (br.outcomes["P1"], br.outcomes["P2"]) == (p1, p2)
        worst_fid = max(worst_fid, 1.0 - qs.fidelity(br.final_state, s))
    ok &= worst_fid <= 1e-12
    return CriterionResult(5, "Bell analyzer mapping", ok, f"max 1-fidelity {worst_fid:.1e}")


def ghz3_analyzer() -> CriterionResult:
    tree = an.ghz3_analyzer()
    ok = True
    for label in an.family_labels("ghz3"):
        rep = an.classify(tree, an.basis_state(label), true_label=label)
        ok &= rep.deterministic and abs(sum(b.probability for b in rep.branches) - 1.0) <= 1e-12
    # click + with P3 = 1, or click - with P3 = 0, means the "+" state
    sign_rule = {"+": {(1, 1), (0, 0)}, "-": {(1, 0), (0, 1)}}
    for sign, allowed in sign_rule.items():
        rep = an.classify(tree, an.basis_state(f"ghz3:g1{sign}"))
        seen = {(b.outcomes["click3"], b.outcomes["P3"]) for b in rep.branches}
        ok &= seen == allowed
    return CriterionResult(6, "GHZ3 analyzer", ok, "8 states x all branches, g1 sign rule checked")


QUAD_TABLE_EXPECTED = {
    "P1P2": {"11": ["i", "vi"], "10": ["ii", "iii"], "01": ["iv", "v"], "00": ["vii", "viii"]},
    "P3": {"1": ["i", "ii", "v", "viii"], "0": ["iii", "iv", "vi", "vii"]},
}


def quad_analyzer() -> CriterionResult:
    tree = an.quad_analyzer()
    ok = True
    for label in an.family_labels("quad"):
        rep = an.classify(tree, an.basis_state(label), true_label=label)
        ok &= rep.deterministic and abs(sum(b.probability for b in rep.branches) - 1.0) <= 1e-12
    derived = an.derived_group_table("quad")
    table_ok = derived == an.oracle_group_table("quad") == QUAD_TABLE_EXPECTED
    return CriterionResult(7, "Quad analyzer", ok and table_ok, f"16 states x all branches, table confirmed={table_ok}")


def decompositions() -> CriterionResult:
    rep = an.verify_decompositions(atol=1e-12)
    worst = max(c.residual for c in rep["checks"])
    ok = rep["pass"] and np.allclose(rep["ghz3_constant"], [np.sqrt(2)], atol=1e-12)
    return CriterionResult(
        8,
        "decomposition identities",
        bool(ok),
        f"max residual {worst:.1e}, GHZ3 constant {rep['ghz3_constant']}, Quad constants {rep['quad_constant']}",
    )


def fermion_encoder(samples: int = 1000) -> CriterionResult:
    rep = fermion.verify_parity_povm(samples=samples, seed=2024)
    return CriterionResult(
        9,
        "fermion encoder equivalence",
        rep["pass"],
        f"max prob dev {rep['max_prob_dev']:.1e}, max state dev {rep['max_state_dev']:.1e}, sweep={rep['phase_sweep_pass']}",
    )


def measurement_semantics(per_family: int = 100, seed: int = 11) -> CriterionResult:
    rng = np.random.default_rng(seed)
    worst = 0.0
    for family, make in an.ANALYZERS.items():
        tree = make()
        dim = 1 << tree.n_qubits
        for _ in range(per_family):
            v = rng.normal(size=dim) + 1j * rng.normal(size=dim)
            s = qs.StateVector(v / np.linalg.norm(v))
            got = an.classify(tree, s).distribution()
            want = an.overlap_distribution(family, s)
            worst = max(worst, max(abs(got.get(k, 0.0) - p) for k, p in want.items()))
    return CriterionResult(10, "analyzer measurement semantics", worst <= 1e-10, f"max |dP| {worst:.1e}")


CRITERIA = (
    parity_collapse,
    golden_preparations,
    stabilizers_and_scale,
    determinism,
    bell_analyzer,
    ghz3_analyzer,
    quad_analyzer,
    decompositions,
    fermion_encoder,
    measurement_semantics,
)


def run_all(echo=print) -> list[CriterionResult]:
    results = []
    for check in CRITERIA:
        r = check()
        if echo:
            echo(r.line())
        results.append(r)
    return results
