"""Dense state vectors, single-qubit gates, parity gadgets and branch enumeration.

Qubits are labelled 1..n as in ket notation: qubit 1 is the leftmost symbol of
``|q1 q2 ... qn>`` and the most significant bit of the amplitude index.

Parity outcomes use detector semantics: ``1`` means even parity, ``0`` odd.
X-basis clicks are recorded as bits too: ``1`` for ``|+>``, ``0`` for ``|->``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping, Sequence, Union

import numpy as np

from . import _kernels as K
from .config import tol
from .pauli import PauliString

__all__ = [
    "BranchImpossibleError",
    "ScheduleError",
    "StateVector",
    "GateSpec",
    "H",
    "X",
    "Y",
    "Z",
    "S",
    "ParityOutcome",
    "Unitary",
    "ParityCheck",
    "MeasureX",
    "ConditionalPauli",
    "CircuitSchedule",
    "BranchRecord",
    "Enumerate",
    "Sample",
    "Forced",
    "plus_product",
    "basis_state",
    "apply_gate",
    "apply_cz",
    "apply_pauli",
    "parity_check",
    "measure_x",
    "run_schedule",
    "expectation",
    "equal_up_to_global_phase",
    "fidelity",
]


class BranchImpossibleError(ValueError):
    """A forced measurement outcome has (numerically) zero probability."""


class ScheduleError(ValueError):
    """A circuit schedule is malformed."""


@dataclass(frozen=True, eq=False)
class StateVector:
    """Normalized pure state of ``n_qubits`` qubits. The amplitude array is read-only."""

    amps: np.ndarray

    def __post_init__(self):
        a = np.array(self.amps, dtype=np.complex128).reshape(-1)
        n = a.size.bit_length() - 1
        if a.size < 2 or a.size != 1 << n:
            raise ValueError(f"amplitude count {a.size} is not 2**n with n >= 1")
        if n > tol().n_max:
            raise ValueError(f"{n} qubits exceeds N_max={tol().n_max}")
        if not np.all(np.isfinite(a)):
            raise ValueError("amplitudes must be finite")
        norm = float(np.vdot(a, a).real)
        if abs(norm - 1.0) > tol().eps_norm:
            raise ValueError(f"state is not normalized (|psi|^2 = {norm!r})")
        a.setflags(write=False)
        object.__setattr__(self, "amps", a)

    @property
    def n_qubits(self) -> int:
        return self.amps.size.bit_length() - 1

    @classmethod
    def from_label(cls, bits: str) -> "StateVector":
        """Computational basis state, e.g. ``"0110"``; ``+``/``-`` allowed per qubit."""
        single = {
            "0": np.array([1, 0], dtype=complex),
            "1": np.array([0, 1], dtype=complex),
            "+": np.array([1, 1], dtype=complex) / np.sqrt(2),
            "-": np.array([1, -1], dtype=complex) / np.sqrt(2),
        }
        out = np.ones(1, dtype=complex)
        for ch in bits:
            out = np.kron(out, single[ch])
        return cls(out)

    @classmethod
    def from_terms(cls, terms: Mapping[str, complex]) -> "StateVector":
        """Normalize ``sum_b c_b |b>`` given as ``{"000": 1, "111": -1}``."""
        n = len(next(iter(terms)))
        a = np.zeros(1 << n, dtype=complex)
        for bits, c in terms.items():
            a[int(bits, 2)] += c
        return cls(a / np.linalg.norm(a))

    def amplitude(self, bits: str) -> complex:
        return complex(self.amps[int(bits, 2)])

    def probabilities(self) -> np.ndarray:
        return np.abs(self.amps) ** 2

    def inner(self, other: "StateVector") -> complex:
        """``<self|other>``."""
        _check_same_size(self, other)
        return complex(np.vdot(self.amps, other.amps))

    def tensor(self, other: "StateVector") -> "StateVector":
        return StateVector(np.kron(self.amps, other.amps))

    def to_pairs(self) -> list[list[float]]:
        return [[float(c.real), float(c.imag)] for c in self.amps]

    def __repr__(self) -> str:
        return f"StateVector(n_qubits={self.n_qubits})"


def _check_same_size(a: StateVector, b: StateVector) -> None:
    if a.n_qubits != b.n_qubits:
        raise ValueError(f"dimension mismatch: {a.n_qubits} vs {b.n_qubits} qubits")


def _shift(s_or_n: Union[StateVector, int], q: int) -> int:
    n = s_or_n if isinstance(s_or_n, int) else s_or_n.n_qubits
    if not isinstance(q, (int, np.integer)) or not 1 <= q <= n:
        raise IndexError(f"qubit {q} out of range 1..{n}")
    return n - int(q)


def _renormalized(amps: np.ndarray, weight: float) -> StateVector:
    return StateVector(amps / np.sqrt(weight))


# -- gates -------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class GateSpec:
    """A single-qubit unitary. Use the module constants or the constructors."""

    kind: str
    matrix: np.ndarray = field(repr=False)
    theta: float | None = None

    def __post_init__(self):
        m = np.array(self.matrix, dtype=np.complex128)
        if m.shape != (2, 2):
            raise ValueError("gate matrix must be 2x2")
        if not np.allclose(m.conj().T @ m, np.eye(2), rtol=0.0, atol=tol().eps_norm):
            raise ValueError(f"gate {self.kind} is not unitary")
        m.setflags(write=False)
        object.__setattr__(self, "matrix", m)

    @classmethod
    def rot_x(cls, theta: float) -> "GateSpec":
        """``exp(-i theta X / 2)``."""
        c, s = np.cos(theta / 2), np.sin(theta / 2)
        return cls("RotX", np.array([[c, -1j * s], [-1j * s, c]]), theta)

    @classmethod
    def rot_z(cls, theta: float) -> "GateSpec":
        """``exp(-i theta Z / 2)``."""
        return cls("RotZ", np.diag([np.exp(-0.5j * theta), np.exp(0.5j * theta)]), theta)

    @classmethod
    def custom(cls, matrix) -> "GateSpec":
        return cls("Custom", matrix)


H = GateSpec("H", np.array([[1, 1], [1, -1]]) / np.sqrt(2))
X = GateSpec("X", np.array([[0, 1], [1, 0]]))
Y = GateSpec("Y", np.array([[0, -1j], [1j, 0]]))
Z = GateSpec("Z", np.array([[1, 0], [0, -1]]))
S = GateSpec("S", np.array([[1, 0], [0, 1j]]))

_PAULI_GATES = {"X": X, "Y": Y, "Z": Z}


def plus_product(n: int) -> StateVector:
    """``|+>^n``; every amplitude is exactly ``2**(-n/2)``."""
    if not 1 <= n <= tol().n_max:
        raise ValueError(f"n={n} outside 1..{tol().n_max}")
    return StateVector(np.full(1 << n, 2.0 ** (-n / 2), dtype=np.complex128))


def basis_state(bits: str) -> StateVector:
    return StateVector.from_label(bits)


def apply_gate(s: StateVector, g: GateSpec, q: int) -> StateVector:
    return StateVector(K.apply_1q(s.amps, _shift(s, q), g.matrix))


def apply_pauli(s: StateVector, pauli: str, q: int) -> StateVector:
    return apply_gate(s, _PAULI_GATES[pauli], q)


def apply_cz(s: StateVector, q_a: int, q_b: int) -> StateVector:
    if q_a == q_b:
        raise ValueError("CZ needs two distinct qubits")
    return StateVector(K.apply_cz(s.amps, _shift(s, q_a), _shift(s, q_b)))


# -- measurements --------------------------------------------------------------


@dataclass(frozen=True)
class ParityOutcome:
    value: int
    basis: str = "Z"

    def __post_init__(self):
        if self.value not in (0, 1):
            raise ValueError("parity outcome must be 0 or 1")
        if self.basis not in ("Z", "X"):
            raise ValueError("basis must be 'Z' or 'X'")

    @property
    def even(self) -> bool:
        return self.value == 1


def _project_parity(amps: np.ndarray, sa: int, sb: int, basis: str, value: int) -> np.ndarray:
    if basis == "Z":
        return K.project_zparity(amps, sa, sb, value == 1)
    if basis == "X":
        return K.project_xparity(amps, sa, sb, value == 1)
    raise ValueError(f"unknown parity basis {basis!r}")


def parity_check(
    s: StateVector, q_a: int, q_b: int, basis: str = "Z", forced: int | None = None, rng=None
) -> tuple[ParityOutcome, float, StateVector]:
    """Nondestructive two-qubit parity measurement.

    Without ``forced`` the outcome is drawn from ``rng`` (a numpy Generator);
    one of the two must be supplied. The returned probability is the weight of
    the realized branch before collapse.
    """
    if q_a == q_b:
        raise ValueError("parity check needs two distinct qubits")
    sa, sb = _shift(s, q_a), _shift(s, q_b)
    if forced is None:
        if rng is None:
            raise ValueError("pass either forced or rng")
        even = _project_parity(s.amps, sa, sb, basis, 1)
        p_even = K.norm2(even)
        value = 1 if rng.random() < p_even else 0
    else:
        value = int(forced)
    projected = _project_parity(s.amps, sa, sb, basis, value)
    p = K.norm2(projected)
    if p <= tol().eps_prune:
        raise BranchImpossibleError(f"{basis}-parity outcome {value} on ({q_a},{q_b}) has probability {p:.3g}")
    return ParityOutcome(value, basis), p, _renormalized(projected, p)


def measure_x(
    s: StateVector, q: int, forced: int | None = None, rng=None
) -> tuple[int, float, StateVector | None]:
    """Destructive X-basis measurement of qubit ``q``.

    Returns ``(click, probability, rest)`` with ``click`` 1 for ``|+>`` and 0
    for ``|->``. ``rest`` has the measured qubit removed (qubits above ``q``
    shift down by one); it is ``None`` when the register had a single qubit.
    """
    sh = _shift(s, q)
    if forced is None:
        if rng is None:
            raise ValueError("pass either forced or rng")
        p_plus = K.norm2(K.measure_x_reduce(s.amps, sh, True))
        click = 1 if rng.random() < p_plus else 0
    else:
        click = int(forced)
        if click not in (0, 1):
            raise ValueError("click must be 1 (+) or 0 (-)")
    reduced = K.measure_x_reduce(s.amps, sh, click == 1)
    p = K.norm2(reduced)
    if p <= tol().eps_prune:
        raise BranchImpossibleError(f"X click {'+' if click else '-'} on qubit {q} has probability {p:.3g}")
    if reduced.size == 1:
        return click, p, None
    return click, p, _renormalized(reduced, p)


def expectation(s: StateVector, p: PauliString) -> float:
    """``<s|p|s>`` for a Hermitian Pauli string."""
    if p.n_qubits != s.n_qubits:
        raise ValueError(f"Pauli string on {p.n_qubits} qubits, state has {s.n_qubits}")
    x_mask, z_mask, y_count = p.masks()
    val = p.sign * (1j**y_count) * K.pauli_expectation(s.amps, x_mask, z_mask)
    return float(val.real)


def fidelity(a: StateVector, b: StateVector) -> float:
    return abs(a.inner(b)) ** 2


def equal_up_to_global_phase(a: StateVector, b: StateVector, tol_: float = 1e-12) -> bool:
    return abs(a.inner(b)) >= 1.0 - tol_


# -- schedules -------------------------------------------------------------------


@dataclass(frozen=True)
class Unitary:
    gate: GateSpec
    qubit: int


@dataclass(frozen=True)
class ParityCheck:
    q_a: int
    q_b: int
    basis: str
    label: str


@dataclass(frozen=True)
class MeasureX:
    qubit: int
    label: str


@dataclass(frozen=True)
class ConditionalPauli:
    """Apply ``pauli`` to ``qubit`` when every ``condition`` entry matches a prior outcome."""

    condition: Mapping[str, int]
    pauli: str
    qubit: int

    def __post_init__(self):
        if self.pauli not in ("X", "Z"):
            raise ValueError("feedforward Pauli must be X or Z")
        object.__setattr__(self, "condition", dict(self.condition))

    def __hash__(self):
        return hash((tuple(sorted(self.condition.items())), self.pauli, self.qubit))

    def fires(self, outcomes: Mapping[str, int]) -> bool:
        return all(outcomes[k] == v for k, v in self.condition.items())


Instruction = Union[Unitary, ParityCheck, MeasureX, ConditionalPauli]


@dataclass(frozen=True)
class CircuitSchedule:
    n_qubits: int
    instructions: tuple

    def __post_init__(self):
        object.__setattr__(self, "instructions", tuple(self.instructions))
        self.validate()

    @property
    def labels(self) -> tuple[str, ...]:
        return tuple(i.label for i in self.instructions if isinstance(i, (ParityCheck, MeasureX)))

    def validate(self) -> None:
        seen: set[str] = set()
        gone: set[int] = set()

        def live(q):
            if not 1 <= q <= self.n_qubits:
                raise ScheduleError(f"qubit {q} out of range 1..{self.n_qubits}")
            if q in gone:
                raise ScheduleError(f"qubit {q} used after destructive measurement")

        for ins in self.instructions:
            if isinstance(ins, Unitary):
                live(ins.qubit)
            elif isinstance(ins, ParityCheck):
                live(ins.q_a)
                live(ins.q_b)
                if ins.q_a == ins.q_b:
                    raise ScheduleError("parity check on a single qubit")
                if ins.basis not in ("Z", "X"):
                    raise ScheduleError(f"unknown basis {ins.basis!r}")
            elif isinstance(ins, MeasureX):
                live(ins.qubit)
                gone.add(ins.qubit)
            elif isinstance(ins, ConditionalPauli):
                live(ins.qubit)
                missing = set(ins.condition) - seen
                if missing:
                    raise ScheduleError(f"condition references unknown or later labels {sorted(missing)}")
            else:
                raise ScheduleError(f"unknown instruction {ins!r}")
            if isinstance(ins, (ParityCheck, MeasureX)):
                if ins.label in seen:
                    raise ScheduleError(f"duplicate label {ins.label!r}")
                seen.add(ins.label)


@dataclass(frozen=True, eq=False)
class BranchRecord:
    outcomes: dict
    probability: float
    final_state: StateVector | None
    measured_qubits: frozenset = frozenset()
    surviving_qubits: tuple = ()

    @property
    def pattern(self) -> str:
        return "".join(str(v) for v in self.outcomes.values())


@dataclass(frozen=True)
class Enumerate:
    pass


@dataclass(frozen=True)
class Sample:
    seed: int


@dataclass(frozen=True)
class Forced:
    outcomes: Mapping[str, int]

    def __hash__(self):
        return hash(tuple(sorted(self.outcomes.items())))


def run_schedule(
    s: StateVector, sched: CircuitSchedule | Sequence, mode=Enumerate()
) -> list[BranchRecord]:
    """Run ``sched`` on ``s``.

    ``Enumerate()`` returns every branch above the pruning threshold, depth
    first with outcome 1 (even parity / ``+`` click) before 0. ``Sample(seed)``
    and ``Forced(outcomes)`` return a single branch. Qubit labels in the
    schedule always refer to the input register, even after other qubits have
    been measured away.
    """
    if not isinstance(sched, CircuitSchedule):
        sched = CircuitSchedule(s.n_qubits, sched)
    if sched.n_qubits != s.n_qubits:
        raise ScheduleError(f"schedule for {sched.n_qubits} qubits, state has {s.n_qubits}")
    eps = tol().eps_prune
    rng = np.random.default_rng(mode.seed) if isinstance(mode, Sample) else None
    if isinstance(mode, Forced):
        unknown = set(mode.outcomes) - set(sched.labels)
        if unknown:
            raise ScheduleError(f"forced outcomes for unknown labels {sorted(unknown)}")
    elif not isinstance(mode, (Enumerate, Sample)):
        raise TypeError(f"unknown mode {mode!r}")
    out: list[BranchRecord] = []

    def choices(label, weights):
        # weights[v] = unnormalized branch weight for outcome v
        if isinstance(mode, Enumerate):
            return [v for v in (1, 0) if weights[v] > eps]
        if isinstance(mode, Forced) and label in mode.outcomes:
            v = int(mode.outcomes[label])
            if weights[v] <= eps:
                raise BranchImpossibleError(f"forced outcome {label}={v} has probability {weights[v]:.3g}")
            return [v]
        return [1 if rng.random() < weights[1] / (weights[0] + weights[1]) else 0]

    def walk(pc, amps, live, outcomes, prob):
        # live: surviving input-qubit labels, ordered most significant first
        n = len(live)
        pos = {q: n - 1 - i for i, q in enumerate(live)}
        while pc < len(sched.instructions):
            ins = sched.instructions[pc]
            pc += 1
            if isinstance(ins, Unitary):
                amps = K.apply_1q(amps, pos[ins.qubit], ins.gate.matrix)
            elif isinstance(ins, ConditionalPauli):
                if ins.fires(outcomes):
                    amps = K.apply_1q(amps, pos[ins.qubit], _PAULI_GATES[ins.pauli].matrix)
            elif isinstance(ins, ParityCheck):
                sa, sb = pos[ins.q_a], pos[ins.q_b]
                branches = {v: _project_parity(amps, sa, sb, ins.basis, v) for v in (1, 0)}
                weights = {v: K.norm2(b) for v, b in branches.items()}
                for v in choices(ins.label, weights):
                    walk(
                        pc,
                        branches[v] / np.sqrt(weights[v]),
                        live,
                        {**outcomes, ins.label: v},
                        prob * weights[v],
                    )
                return
            elif isinstance(ins, MeasureX):
                sh = pos[ins.qubit]
                branches = {v: K.measure_x_reduce(amps, sh, v == 1) for v in (1, 0)}
                weights = {v: K.norm2(b) for v, b in branches.items()}
                rest = tuple(q for q in live if q != ins.qubit)
                for v in choices(ins.label, weights):
                    walk(
                        pc,
                        branches[v] / np.sqrt(weights[v]),
                        rest,
                        {**outcomes, ins.label: v},
                        prob * weights[v],
                    )
                return
        if prob <= eps:
            return
        final = StateVector(amps) if amps.size > 1 else None
        measured = frozenset(range(1, s.n_qubits + 1)) - frozenset(live)
        out.append(BranchRecord(outcomes, prob, final, measured, tuple(live)))

    walk(0, s.amps, tuple(range(1, s.n_qubits + 1)), {}, 1.0)
    return out
