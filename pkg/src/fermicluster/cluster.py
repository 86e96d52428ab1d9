"""Linear cluster states from parity gadgets, feedforward tables and stabilizer checks."""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import reduce

import numpy as np

from . import qstate as qs
from .config import tol
from .pauli import PauliString

STABILIZER_TOL = 1e-10


class NoCorrectionFoundError(RuntimeError):
    pass


@dataclass(frozen=True)
class GraphSpec:
    n: int
    edges: frozenset

    def __post_init__(self):
        if self.n < 1:
            raise ValueError("graph needs at least one vertex")
        norm = set()
        for a, b in self.edges:
            if a == b:
                raise ValueError(f"self-loop on vertex {a}")
            if not (1 <= a <= self.n and 1 <= b <= self.n):
                raise ValueError(f"edge ({a},{b}) outside vertices 1..{self.n}")
            norm.add((min(a, b), max(a, b)))
        object.__setattr__(self, "edges", frozenset(norm))

    @classmethod
    def chain(cls, n: int) -> "GraphSpec":
        return cls(n, frozenset((k, k + 1) for k in range(1, n)))

    @property
    def is_chain(self) -> bool:
        return self.edges == GraphSpec.chain(self.n).edges

    def neighbors(self, a: int) -> list[int]:
        return sorted({b for e in self.edges if a in e for b in e if b != a})


@dataclass(frozen=True)
class StabilizerSet:
    operators: tuple

    def pairwise_commuting(self) -> bool:
        return all(p.commutes(q) for p, q in itertools.combinations(self.operators, 2))


def stabilizers_for(g: GraphSpec) -> StabilizerSet:
    """``K(a) = X_a prod_{b ~ a} Z_b`` for every vertex ``a``."""
    ops = []
    for a in range(1, g.n + 1):
        factors = {b: "Z" for b in g.neighbors(a)}
        factors[a] = "X"
        ops.append(PauliString.from_sparse(g.n, factors))
    stab = StabilizerSet(tuple(ops))
    if not stab.pairwise_commuting():
        raise AssertionError("graph stabilizers failed to commute")
    return stab


def canonical_cluster(g: GraphSpec) -> qs.StateVector:
    """``prod_{edges} CZ |+>^n``, the reference every preparation branch must reach."""
    return reduce(lambda s, e: qs.apply_cz(s, *e), sorted(g.edges), qs.plus_product(g.n))


@dataclass(frozen=True)
class ClusterReport:
    expectations: tuple
    passed: bool


def verify_cluster(s: qs.StateVector, g: GraphSpec, atol: float = STABILIZER_TOL) -> ClusterReport:
    if s.n_qubits != g.n:
        raise ValueError(f"state has {s.n_qubits} qubits, graph has {g.n} vertices")
    exps = tuple(qs.expectation(s, k) for k in stabilizers_for(g).operators)
    return ClusterReport(exps, all(abs(e - 1.0) <= atol for e in exps))


def joint_stabilizer_projector(g: GraphSpec) -> np.ndarray:
    """Dense ``prod_a (1 + K(a)) / 2``; only sensible for small ``n``."""
    dim = 1 << g.n
    proj = np.eye(dim, dtype=complex)
    for k in stabilizers_for(g).operators:
        proj = proj @ (0.5 * (np.eye(dim) + k.to_matrix()))
    return proj


# -- the gadget --------------------------------------------------------------------


def gadget_instructions(j: int, k: int, label: str, inline_correction: bool = True) -> list:
    """Z-parity on (j, k), X on k after an odd outcome, then H on k."""
    ins = [qs.ParityCheck(j, k, "Z", label)]
    if inline_correction:
        ins.append(qs.ConditionalPauli({label: 0}, "X", k))
    ins.append(qs.Unitary(qs.H, k))
    return ins


def _assert_fresh_plus(s: qs.StateVector, k: int) -> None:
    _, p, _ = qs.measure_x(s, k, forced=1)
    if abs(p - 1.0) > 1e-10:
        raise ValueError(f"qubit {k} is not an unentangled |+> (P(+) = {p:.6g})")


def gadget(
    s: qs.StateVector, j: int, k: int, forced: int | None = None, rng=None, check_fresh: bool = False
) -> tuple[qs.ParityOutcome, qs.StateVector]:
    """Entangle a fresh ``|+>`` on qubit ``k`` with qubit ``j``.

    On the promised input the result equals ``CZ_{jk}`` applied to ``s`` for
    either detector outcome. ``check_fresh`` verifies the promise first.
    """
    if check_fresh:
        _assert_fresh_plus(s, k)
    outcome, _, t = qs.parity_check(s, j, k, "Z", forced=forced, rng=rng)
    if not outcome.even:
        t = qs.apply_gate(t, qs.X, k)
    return outcome, qs.apply_gate(t, qs.H, k)


def chain_schedule(n: int, inline_correction: bool = True) -> qs.CircuitSchedule:
    """Gadgets on (1,2), (2,3), ..., (n-1,n); detector ``P{t}`` belongs to link t."""
    ins = []
    for t in range(1, n):
        ins += gadget_instructions(t, t + 1, f"P{t}", inline_correction)
    return qs.CircuitSchedule(n, ins)


@dataclass(frozen=True, eq=False)
class PreparationRecord:
    n: int
    outcomes: str
    probability: float
    corrections: tuple
    final_state: qs.StateVector
    stabilizer_expectations: tuple
    matches_canonical: bool
    passed: bool

    def to_json(self, include_state: bool = True) -> dict:
        out = {
            "n": self.n,
            "outcomes": self.outcomes,
            "probability": self.probability,
            "corrections": [[p, q] for p, q in self.corrections],
            "stabilizer_expectations": list(self.stabilizer_expectations),
            "matches_canonical": self.matches_canonical,
            "pass": self.passed,
        }
        if include_state:
            out["amplitudes"] = self.final_state.to_pairs()
        return out


def prepare_cluster(g: GraphSpec | int, mode=qs.Enumerate()) -> list[PreparationRecord]:
    """Prepare the linear cluster from ``|+>^n``; one record per realized branch.

    ``mode`` is ``Enumerate()``, ``Sample(seed)`` or ``Forced(pattern)`` where
    ``pattern`` is a bit string over the n-1 detectors or a label->bit map.
    """
    if isinstance(g, int):
        if g < 2:
            raise ValueError("a cluster chain needs n >= 2")
        g = GraphSpec.chain(g)
    if g.n < 2:
        raise ValueError("a cluster chain needs n >= 2")
    if not g.is_chain:
        raise ValueError("preparation supports linear chains only")
    sched = chain_schedule(g.n)
    if isinstance(mode, qs.Forced) and isinstance(mode.outcomes, str):
        mode = qs.Forced(pattern_to_outcomes(mode.outcomes, g.n))
    target = canonical_cluster(g)
    records = []
    for br in qs.run_schedule(qs.plus_product(g.n), sched, mode):
        report = verify_cluster(br.final_state, g)
        corrections = tuple(("X", t + 1) for t in range(1, g.n) if br.outcomes[f"P{t}"] == 0)
        same = qs.equal_up_to_global_phase(br.final_state, target, 1e-12)
        records.append(
            PreparationRecord(
                n=g.n,
                outcomes=br.pattern,
                probability=br.probability,
                corrections=corrections,
                final_state=br.final_state,
                stabilizer_expectations=report.expectations,
                matches_canonical=same,
                passed=report.passed and same,
            )
        )
    return records


def pattern_to_outcomes(pattern: str, n: int) -> dict:
    if len(pattern) != n - 1 or set(pattern) - set("01"):
        raise ValueError(f"pattern must be {n - 1} bits, got {pattern!r}")
    return {f"P{t}": int(b) for t, b in enumerate(pattern, start=1)}


# -- deferred feedforward (the reconstructed correction table) -----------------------

# per-qubit factors in search order; "XZ" is the product Z then X (i.e. -iY)
_FACTORS = ("X", "Z", "XZ")


def _candidate_corrections(n: int):
    """Pauli frames ordered by weight, then lexicographically with I < X < Z < XZ."""
    for w in range(n + 1):
        frames = []
        for support in itertools.combinations(range(1, n + 1), w):
            for fs in itertools.product(_FACTORS, repeat=w):
                frames.append(dict(zip(support, fs)))
        order = {"I": 0, "X": 1, "Z": 2, "XZ": 3}
        frames.sort(key=lambda f: [order[f.get(q, "I")] for q in range(1, n + 1)])
        yield from frames


def apply_frame(s: qs.StateVector, frame) -> qs.StateVector:
    for q, f in sorted(dict(frame).items()):
        # "XZ" means apply Z first, then X
        for p in reversed(f):
            s = qs.apply_pauli(s, p, q)
    return s


@dataclass(frozen=True)
class CorrectionRule:
    pattern: str
    corrections: tuple
    inline_equivalent: tuple

    def to_json(self) -> dict:
        return {
            "pattern": self.pattern,
            "correction": [[p, q] for q, p in self.corrections],
            "inline_equivalent": [[p, q] for p, q in self.inline_equivalent],
        }


def derive_correction_table(n: int) -> list[CorrectionRule]:
    """Brute-force the end-of-circuit Pauli fix for every detector pattern.

    The pipeline is the chain without inline corrections. Each rule's
    ``corrections`` are ``(qubit, factor)`` pairs applied after the last
    gadget; ``inline_equivalent`` is the per-gadget X-before-Hadamard fix.
    """
    if not 2 <= n <= tol().n_table:
        raise ValueError(f"n={n} outside 2..{tol().n_table}")
    g = GraphSpec.chain(n)
    target = canonical_cluster(g)
    rules = []
    for br in qs.run_schedule(qs.plus_product(n), chain_schedule(n, inline_correction=False)):
        for frame in _candidate_corrections(n):
            if qs.equal_up_to_global_phase(apply_frame(br.final_state, frame), target, 1e-12):
                break
        else:
            raise NoCorrectionFoundError(f"no Pauli correction for pattern {br.pattern}")
        inline = tuple(("X", t + 1) for t in range(1, n) if br.outcomes[f"P{t}"] == 0)
        rules.append(CorrectionRule(br.pattern, tuple(sorted(frame.items())), inline))
    return rules


def verify_correction_table(n: int, rules: list[CorrectionRule]) -> bool:
    """Re-simulate every pattern with forced outcomes and apply its rule."""
    target = canonical_cluster(GraphSpec.chain(n))
    sched = chain_schedule(n, inline_correction=False)
    if len(rules) != 1 << (n - 1):
        return False
    for rule in rules:
        (br,) = qs.run_schedule(qs.plus_product(n), sched, qs.Forced(pattern_to_outcomes(rule.pattern, n)))
        if not qs.equal_up_to_global_phase(apply_frame(br.final_state, rule.corrections), target, 1e-12):
            return False
    return True
