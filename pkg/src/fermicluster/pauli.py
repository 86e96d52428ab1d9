"""Signed Pauli strings and their action as bit masks."""

from __future__ import annotations

from dataclasses import dataclass
from functools import reduce
from typing import Mapping

import numpy as np

_MATRICES = {
    "I": np.eye(2, dtype=complex),
    "X": np.array([[0, 1], [1, 0]], dtype=complex),
    "Y": np.array([[0, -1j], [1j, 0]], dtype=complex),
    "Z": np.array([[1, 0], [0, -1]], dtype=complex),
}


@dataclass(frozen=True)
class PauliString:
    """A tensor product ``sign * P_1 (x) ... (x) P_n`` with ``P_k`` in I, X, Y, Z.

    ``ops[0]`` acts on qubit 1, the most significant bit of a basis index.
    """

    ops: str
    sign: int = 1

    def __post_init__(self):
        if not self.ops or set(self.ops) - set("IXYZ"):
            raise ValueError(f"invalid Pauli string {self.ops!r}")
        if self.sign not in (1, -1):
            raise ValueError("sign must be +1 or -1")

    @classmethod
    def parse(cls, text: str) -> "PauliString":
        """Parse ``"ZXZI"`` or ``"-ZXZI"``."""
        text = text.strip()
        sign = 1
        if text[:1] in "+-":
            sign = -1 if text[0] == "-" else 1
            text = text[1:]
        return cls(text.upper(), sign)

    @classmethod
    def from_sparse(cls, n: int, factors: Mapping[int, str], sign: int = 1) -> "PauliString":
        """Build from ``{qubit: "X"}`` with 1-based qubit labels."""
        ops = ["I"] * n
        for q, p in factors.items():
            if not 1 <= q <= n:
                raise IndexError(f"qubit {q} out of range 1..{n}")
            ops[q - 1] = p
        return cls("".join(ops), sign)

    @property
    def n_qubits(self) -> int:
        return len(self.ops)

    @property
    def weight(self) -> int:
        return sum(p != "I" for p in self.ops)

    def masks(self) -> tuple[int, int, int]:
        """Return ``(x_mask, z_mask, y_count)`` over basis-index bits."""
        n = len(self.ops)
        x_mask = z_mask = y_count = 0
        for pos, p in enumerate(self.ops):
            bit = 1 << (n - 1 - pos)
            if p in "XY":
                x_mask |= bit
            if p in "ZY":
                z_mask |= bit
            y_count += p == "Y"
        return x_mask, z_mask, y_count

    def commutes(self, other: "PauliString") -> bool:
        if other.n_qubits != self.n_qubits:
            raise ValueError("Pauli strings act on different register sizes")
        clashes = sum(a != "I" and b != "I" and a != b for a, b in zip(self.ops, other.ops))
        return clashes % 2 == 0

    def to_matrix(self) -> np.ndarray:
        return self.sign * reduce(np.kron, (_MATRICES[p] for p in self.ops))

    def __str__(self) -> str:
        return ("-" if self.sign < 0 else "") + self.ops
