"""Parity-gadget analyzers for the Bell, three-qubit GHZ-class and four-qubit basis states.

Labels print as ``family:classSign``, e.g. ``bell:phi+``, ``ghz3:g2-``,
``quad:vii+``. Each class is ``(|b> + s|~b>)/sqrt(2)`` for a representative
bit string ``b`` (the first ket as written) and its complement ``~b``; Bell
classes ``phi``/``psi`` use representatives ``00``/``01``.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Callable, Mapping

import numpy as np

from . import qstate as qs

REPRESENTATIVES = {
    "bell": {"phi": "00", "psi": "01"},
    "ghz3": {"g1": "000", "g2": "110", "g3": "010", "g4": "100"},
    "quad": {
        "i": "0000",
        "ii": "0001",
        "iii": "0010",
        "iv": "0100",
        "v": "1000",
        "vi": "0011",
        "vii": "0101",
        "viii": "1001",
    },
}
FAMILY_QUBITS = {"bell": 2, "ghz3": 3, "quad": 4}


@dataclass(frozen=True, order=True)
class EntangledLabel:
    family: str
    cls: str
    sign: str

    def __post_init__(self):
        if self.family not in REPRESENTATIVES:
            raise ValueError(f"unknown family {self.family!r}")
        if self.cls not in REPRESENTATIVES[self.family]:
            raise ValueError(f"unknown {self.family} class {self.cls!r}")
        if self.sign not in "+-" or len(self.sign) != 1:
            raise ValueError(f"sign must be '+' or '-', got {self.sign!r}")

    @classmethod
    def parse(cls, text: str) -> "EntangledLabel":
        family, _, rest = text.strip().lower().partition(":")
        if not rest or rest[-1] not in "+-":
            raise ValueError(f"malformed label {text!r}; expected family:classSign")
        return cls(family, rest[:-1], rest[-1])

    @property
    def representative(self) -> str:
        return REPRESENTATIVES[self.family][self.cls]

    def __str__(self) -> str:
        return f"{self.family}:{self.cls}{self.sign}"


def family_labels(family: str) -> list[EntangledLabel]:
    return [EntangledLabel(family, c, s) for c in REPRESENTATIVES[family] for s in "+-"]


def _complement(bits: str) -> str:
    return "".join("1" if b == "0" else "0" for b in bits)


def basis_state(label: EntangledLabel | str) -> qs.StateVector:
    if isinstance(label, str):
        label = EntangledLabel.parse(label)
    b = label.representative
    return qs.StateVector.from_terms({b: 1.0, _complement(b): 1.0 if label.sign == "+" else -1.0})


def family_basis(family: str) -> tuple[list[EntangledLabel], np.ndarray]:
    """Labels and the matrix whose rows are the corresponding state vectors."""
    labels = family_labels(family)
    return labels, np.array([basis_state(l).amps for l in labels])


def _sign(plus: bool) -> str:
    return "+" if plus else "-"


@dataclass(frozen=True)
class DecisionTree:
    family: str
    schedule: qs.CircuitSchedule
    classify: Callable[[Mapping[str, int]], EntangledLabel] = field(compare=False)
    destroyed: int = 0

    @property
    def n_qubits(self) -> int:
        return FAMILY_QUBITS[self.family]


def bell_analyzer() -> DecisionTree:
    """P1 = Z-parity(1,2) picks phi/psi, P2 = X-parity(1,2) picks the sign. Nondestructive."""
    sched = qs.CircuitSchedule(
        2,
        [qs.ParityCheck(1, 2, "Z", "P1"), qs.ParityCheck(1, 2, "X", "P2")],
    )

    def classify(o):
        return EntangledLabel("bell", "phi" if o["P1"] else "psi", _sign(o["P2"] == 1))

    return DecisionTree("bell", sched, classify, destroyed=0)


# (P1, P2) after the conditional flip -> GHZ3 group
GHZ3_GROUPS = {(1, 1): "g1", (1, 0): "g2", (0, 0): "g3", (0, 1): "g4"}


def ghz3_analyzer() -> DecisionTree:
    """Groups from P1 = Z(1,2) and P2 = Z(2,3); sign from an X click on 3 and P3 = X(1,2).

    After an odd P1 a spin flip on qubit 1 maps the pair back to even parity.
    The sign is ``+`` when the click is ``+`` with P3 = 1 or ``-`` with P3 = 0.
    """
    sched = qs.CircuitSchedule(
        3,
        [
            qs.ParityCheck(1, 2, "Z", "P1"),
            qs.ConditionalPauli({"P1": 0}, "X", 1),
            qs.ParityCheck(2, 3, "Z", "P2"),
            qs.MeasureX(3, "click3"),
            qs.ParityCheck(1, 2, "X", "P3"),
        ],
    )

    def classify(o):
        return EntangledLabel("ghz3", GHZ3_GROUPS[(o["P1"], o["P2"])], _sign(o["click3"] == o["P3"]))

    return DecisionTree("ghz3", sched, classify, destroyed=1)


# (P1, P2) -> candidate classes, then P3 splits each pair
QUAD_SETS = {
    (1, 1): ("i", "vi"),
    (1, 0): ("ii", "iii"),
    (0, 1): ("iv", "v"),
    (0, 0): ("vii", "viii"),
}
QUAD_P3_EVEN = frozenset({"i", "ii", "v", "viii"})


def quad_analyzer() -> DecisionTree:
    """P1 = Z(1,2), P2 = Z(3,4), P3 = Z(2,3) fix the class; X clicks on 3 and 4 plus
    P4 = X(1,2) fix the sign as ``click3 * click4 * (+1 if P4 else -1)``."""
    sched = qs.CircuitSchedule(
        4,
        [
            qs.ParityCheck(1, 2, "Z", "P1"),
            qs.ParityCheck(3, 4, "Z", "P2"),
            qs.ParityCheck(2, 3, "Z", "P3"),
            qs.MeasureX(3, "click3"),
            qs.MeasureX(4, "click4"),
            qs.ParityCheck(1, 2, "X", "P4"),
        ],
    )

    def classify(o):
        a, b = QUAD_SETS[(o["P1"], o["P2"])]
        cls = a if (a in QUAD_P3_EVEN) == (o["P3"] == 1) else b
        # product of three +/-1 factors; bits are 1 for +
        minus = (o["click3"] == 0) ^ (o["click4"] == 0) ^ (o["P4"] == 0)
        return EntangledLabel("quad", cls, _sign(not minus))

    return DecisionTree("quad", sched, classify, destroyed=2)


ANALYZERS = {"bell": bell_analyzer, "ghz3": ghz3_analyzer, "quad": quad_analyzer}


@dataclass(frozen=True)
class ClassifiedBranch:
    outcomes: dict
    probability: float
    label: EntangledLabel
    final_state: qs.StateVector | None = field(default=None, compare=False)


@dataclass(frozen=True)
class ClassificationReport:
    family: str
    input: str
    branches: tuple
    deterministic: bool
    destroyed: int

    def distribution(self) -> dict[str, float]:
        out: dict[str, float] = {}
        for br in self.branches:
            out[str(br.label)] = out.get(str(br.label), 0.0) + br.probability
        return out

    def to_json(self) -> dict:
        return {
            "schema": 1,
            "family": self.family,
            "input": self.input,
            "branches": [
                {"outcomes": dict(b.outcomes), "probability": b.probability, "label": str(b.label)}
                for b in self.branches
            ],
            "distribution": self.distribution(),
            "deterministic": self.deterministic,
            "destroyed_qubits": self.destroyed,
        }


def classify(
    tree: DecisionTree,
    s: qs.StateVector,
    mode=qs.Enumerate(),
    true_label: EntangledLabel | str | None = None,
) -> ClassificationReport:
    """Run ``tree`` on ``s`` and label every realized branch.

    ``deterministic`` is true when every branch carries ``true_label`` (or,
    without a true label, when all branches agree). ``Sample`` mode yields a
    report with a single branch.
    """
    if s.n_qubits != tree.n_qubits:
        raise ValueError(f"{tree.family} analyzer needs {tree.n_qubits} qubits, got {s.n_qubits}")
    if isinstance(true_label, str):
        true_label = EntangledLabel.parse(true_label)
    branches = tuple(
        ClassifiedBranch(br.outcomes, br.probability, tree.classify(br.outcomes), br.final_state)
        for br in qs.run_schedule(s, tree.schedule, mode)
    )
    labels = {b.label for b in branches}
    if true_label is not None:
        det = labels == {true_label}
    else:
        det = len(labels) == 1
    return ClassificationReport(
        tree.family, str(true_label) if true_label else "explicit", branches, det, tree.destroyed
    )


def overlap_distribution(family: str, s: qs.StateVector) -> dict[str, float]:
    """Projection oracle: ``|<L|s>|^2`` for every basis label ``L``."""
    labels, rows = family_basis(family)
    probs = np.abs(rows.conj() @ s.amps) ** 2
    return {str(l): float(p) for l, p in zip(labels, probs)}


# -- group tables --------------------------------------------------------------------


def _same(bits: str, a: int, b: int) -> int:
    return int(bits[a - 1] == bits[b - 1])


def oracle_group_table(family: str) -> dict:
    """Group tables computed from bit-string parities of the representatives alone."""
    table: dict = {"P1P2": {}}
    if family == "ghz3":
        for c, b in REPRESENTATIVES["ghz3"].items():
            p1 = _same(b, 1, 2)
            flipped = b if p1 else ("1" if b[0] == "0" else "0") + b[1:]
            key = f"{p1}{_same(flipped, 2, 3)}"
            table["P1P2"].setdefault(key, []).append(c)
    elif family == "quad":
        table["P3"] = {}
        for c, b in REPRESENTATIVES["quad"].items():
            table["P1P2"].setdefault(f"{_same(b, 1, 2)}{_same(b, 3, 4)}", []).append(c)
            table["P3"].setdefault(str(_same(b, 2, 3)), []).append(c)
    else:
        raise ValueError(f"no group table for family {family!r}")
    return _canonical_table(table)


def _canonical_table(table: dict) -> dict:
    order = list(REPRESENTATIVES["quad"]) + list(REPRESENTATIVES["ghz3"])
    return {
        k: {key: sorted(set(v), key=order.index) for key, v in sorted(sub.items(), reverse=True)}
        for k, sub in table.items()
    }


def derived_group_table(family: str) -> dict:
    """Group tables read off exhaustive simulation of every basis input."""
    tree = ANALYZERS[family]()
    table: dict = {"P1P2": {}}
    if family == "quad":
        table["P3"] = {}
    for label in family_labels(family):
        for br in qs.run_schedule(basis_state(label), tree.schedule):
            o = br.outcomes
            table["P1P2"].setdefault(f"{o['P1']}{o['P2']}", []).append(label.cls)
            if family == "quad":
                table["P3"].setdefault(str(o["P3"]), []).append(label.cls)
    return _canonical_table(table)


# -- decomposition identities ---------------------------------------------------------

_BELL = {
    "Phi+": basis_state("bell:phi+").amps,
    "Phi-": basis_state("bell:phi-").amps,
    "Psi+": basis_state("bell:psi+").amps,
    "Psi-": basis_state("bell:psi-").amps,
}
_PM = {"+": np.array([1, 1]) / np.sqrt(2), "-": np.array([1, -1]) / np.sqrt(2)}


def _ghz3_expansion(cls: str, sign: str) -> np.ndarray:
    """Right-hand side ``Bell_12 (x) |+/->_3 +/- Bell_12 (x) |-/+>_3`` as printed (no 1/sqrt(2))."""
    first, rel = {"g1": ("Phi", 1), "g2": ("Phi", -1), "g3": ("Psi", 1), "g4": ("Psi", -1)}[cls]
    flip = "-" if sign == "+" else "+"
    return np.kron(_BELL[first + "+"], _PM[sign]) + rel * np.kron(_BELL[first + "-"], _PM[flip])


# class -> (Bell on 12, Bell on 34, relative sign) for the "+" state; "-" swaps the 34 sign
_QUAD_EXPANSIONS = {
    "i": ("Phi", "Phi", 1),
    "ii": ("Phi", "Psi", 1),
    "iii": ("Phi", "Psi", -1),
    "iv": ("Psi", "Phi", 1),
    "v": ("Psi", "Phi", -1),
    "vi": ("Phi", "Phi", -1),
    "vii": ("Psi", "Psi", 1),
    "viii": ("Psi", "Psi", -1),
}


def _quad_expansion(cls: str, sign: str) -> np.ndarray:
    a, b, rel = _QUAD_EXPANSIONS[cls]
    if sign == "+":
        t1, t2 = np.kron(_BELL[a + "+"], _BELL[b + "+"]), np.kron(_BELL[a + "-"], _BELL[b + "-"])
    else:
        t1, t2 = np.kron(_BELL[a + "+"], _BELL[b + "-"]), np.kron(_BELL[a + "-"], _BELL[b + "+"])
    return (t1 + rel * t2) / np.sqrt(2)


@dataclass(frozen=True)
class DecompositionCheck:
    label: str
    constant: float
    residual: float


def verify_decompositions(atol: float = 1e-12) -> dict:
    """Check every Bell-product expansion against its defining state.

    For each label the printed right-hand side ``r`` is compared with the
    defining state ``v`` as ``r = c v``; ``c`` is reported (sqrt(2) for the
    three-qubit expansions, 1 for the four-qubit ones) and the residual
    ``|r - c v|`` must vanish.
    """
    checks = []
    for family, expand in (("ghz3", _ghz3_expansion), ("quad", _quad_expansion)):
        for label in family_labels(family):
            v = basis_state(label).amps
            r = expand(label.cls, label.sign)
            c = np.vdot(v, r)
            checks.append(DecompositionCheck(str(label), float(c.real), float(np.max(np.abs(r - c * v)))))
    gram = {}
    for family in REPRESENTATIVES:
        _, rows = family_basis(family)
        gram[family] = float(np.max(np.abs(rows.conj() @ rows.T - np.eye(len(rows)))))
    return {
        "checks": checks,
        "gram_deviation": gram,
        "ghz3_constant": sorted({round(c.constant, 12) for c in checks if c.label.startswith("ghz3")}),
        "quad_constant": sorted({round(c.constant, 12) for c in checks if c.label.startswith("quad")}),
        "pass": all(c.residual <= atol for c in checks) and all(g <= atol for g in gram.values()),
    }
