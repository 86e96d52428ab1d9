"""Two-electron second-quantized model of the parity encoder.

Four single-particle modes in the fixed order ``A_up, A_down, B_up, B_down``
(outputs ``A'`` and ``B'`` use the same order). A two-electron state is a
vector over the six ordered pairs ``c+_m c+_n |vac>`` with ``m < n``. Spin up
encodes logical 0, spin down logical 1.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np

from . import qstate as qs
from .config import tol

A_UP, A_DN, B_UP, B_DN = range(4)
MODE_NAMES = ("A_up", "A_down", "B_up", "B_down")
PAIRS = tuple(itertools.combinations(range(4), 2))
_PAIR_INDEX = {p: i for i, p in enumerate(PAIRS)}
ARM_MODES = {"A": (A_UP, A_DN), "B": (B_UP, B_DN)}

ONE = "One"
ZERO_OR_TWO = "ZeroOrTwo"


class BunchedError(ValueError):
    """Both electrons occupy the same output arm; no dual-rail spin pair remains."""


@dataclass(frozen=True, eq=False)
class FockState:
    amps: np.ndarray

    def __post_init__(self):
        a = np.array(self.amps, dtype=np.complex128).reshape(-1)
        if a.size != len(PAIRS):
            raise ValueError(f"two-electron state needs {len(PAIRS)} amplitudes, got {a.size}")
        if abs(np.vdot(a, a).real - 1.0) > tol().eps_norm:
            raise ValueError("Fock state is not normalized")
        a.setflags(write=False)
        object.__setattr__(self, "amps", a)

    def amplitude(self, m: int, n: int) -> complex:
        """Coefficient of ``c+_m c+_n |vac>`` for any ordering of ``m, n``."""
        if m == n:
            return 0j
        sign = 1 if m < n else -1
        return sign * complex(self.amps[_PAIR_INDEX[(min(m, n), max(m, n))]])

    def arm_occupation(self, arm: str) -> np.ndarray:
        """Electron count in ``arm`` for each basis pair."""
        modes = ARM_MODES[arm]
        return np.array([(m in modes) + (n in modes) for m, n in PAIRS])


@dataclass(frozen=True)
class ChargeOutcome:
    value: str
    arm: str

    @property
    def bit(self) -> int:
        """Detector readout as a parity bit (1 = one electron = even spin parity)."""
        return 1 if self.value == ONE else 0


def _is_unitary(u: np.ndarray) -> bool:
    return np.allclose(u.conj().T @ u, np.eye(u.shape[0]), rtol=0.0, atol=tol().eps_norm)


def embed_spin_state(spin: qs.StateVector) -> FockState:
    """Electron 1 enters on path A, electron 2 on path B."""
    if spin.n_qubits != 2:
        raise ValueError("embedding needs a two-qubit spin state")
    out = np.zeros(len(PAIRS), dtype=complex)
    for s1, s2 in itertools.product((0, 1), repeat=2):
        # A modes precede B modes, so c+_{A,s1} c+_{B,s2} is already canonical
        out[_PAIR_INDEX[(A_UP + s1, B_UP + s2)]] += spin.amps[2 * s1 + s2]
    return FockState(out)


def pbs_matrix(reflection_phase: complex = 1.0) -> np.ndarray:
    """Polarizing beam splitter: spin up transmitted, spin down reflected to the other arm.

    ``U[out, in]``; the reflected amplitude is ``reflection_phase``.
    """
    if abs(abs(reflection_phase) - 1.0) > tol().eps_norm:
        raise ValueError("reflection phase must have unit modulus")
    u = np.zeros((4, 4), dtype=complex)
    u[A_UP, A_UP] = 1.0
    u[B_UP, B_UP] = 1.0
    u[B_DN, A_DN] = reflection_phase
    u[A_DN, B_DN] = reflection_phase
    return u


def apply_scattering(f: FockState, u: np.ndarray) -> FockState:
    """Lift the single-particle unitary ``u`` to the antisymmetric pair space.

    Each creation operator maps as ``c+_m -> sum_p u[p, m] c+_p``; products are
    reordered into canonical order with the fermionic sign.
    """
    u = np.asarray(u, dtype=complex)
    if u.shape != (4, 4) or not _is_unitary(u):
        raise ValueError("scattering matrix must be a 4x4 unitary")
    out = np.zeros(len(PAIRS), dtype=complex)
    for (m, n), c in zip(PAIRS, f.amps):
        if c == 0:
            continue
        for p, q in itertools.product(range(4), repeat=2):
            if p == q:
                continue
            term = c * u[p, m] * u[q, n]
            if p < q:
                out[_PAIR_INDEX[(p, q)]] += term
            else:
                out[_PAIR_INDEX[(q, p)]] -= term
    return FockState(out)


def detect_charge(
    f: FockState, arm: str = "A", forced: str | int | None = None, rng=None
) -> tuple[ChargeOutcome, float, FockState]:
    """Charge detector on output ``arm``: one electron versus zero-or-two."""
    if arm not in ARM_MODES:
        raise ValueError(f"arm must be 'A' or 'B', got {arm!r}")
    single = f.arm_occupation(arm) == 1
    p_one = float(np.sum(np.abs(f.amps[single]) ** 2))
    if forced is None:
        if rng is None:
            raise ValueError("pass either forced or rng")
        value = ONE if rng.random() < p_one else ZERO_OR_TWO
    elif forced in (ONE, 1, True):
        value = ONE
    elif forced in (ZERO_OR_TWO, 0, False):
        value = ZERO_OR_TWO
    else:
        raise ValueError(f"unknown charge outcome {forced!r}")
    keep = single if value == ONE else ~single
    p = p_one if value == ONE else 1.0 - p_one
    if p <= tol().eps_prune:
        raise qs.BranchImpossibleError(f"charge outcome {value} in arm {arm} has probability {p:.3g}")
    projected = np.where(keep, f.amps, 0.0)
    return ChargeOutcome(value, arm), p, FockState(projected / np.sqrt(np.sum(np.abs(projected) ** 2)))


def reduce_to_spin(f: FockState) -> qs.StateVector:
    """Spin state with qubit 1 the arm-A' electron and qubit 2 the arm-B' electron."""
    bunched = [_PAIR_INDEX[(A_UP, A_DN)], _PAIR_INDEX[(B_UP, B_DN)]]
    if np.any(np.abs(f.amps[bunched]) > np.sqrt(tol().eps_prune)):
        raise BunchedError("state has weight on a doubly occupied arm")
    spin = np.zeros(4, dtype=complex)
    for s1, s2 in itertools.product((0, 1), repeat=2):
        spin[2 * s1 + s2] = f.amps[_PAIR_INDEX[(A_UP + s1, B_UP + s2)]]
    return qs.StateVector(spin / np.linalg.norm(spin))


def even_branch_phase(reflection_phase: complex = 1.0) -> complex:
    """Phase the doubly reflected ``|11>`` term picks up relative to ``|00>``.

    Both electrons swap arms, so the product is the fermionic exchange sign
    times the reflection amplitude squared.
    """
    return -(reflection_phase**2)


def frame_correction(reflection_phase: complex = 1.0) -> qs.GateSpec:
    """Fixed single-spin phase on the arm-B' electron that removes ``even_branch_phase``."""
    return qs.GateSpec.custom(np.diag([1.0, 1.0 / even_branch_phase(reflection_phase)]))


def encoder(
    spin: qs.StateVector,
    reflection_phase: complex = 1.0,
    forced: str | int | None = None,
    rng=None,
    scattering: np.ndarray | None = None,
) -> tuple[ChargeOutcome, float, qs.StateVector | FockState]:
    """PBS + charge detector on arm A' + calibrated output spin frame.

    On a ``One`` click the returned spin state is frame-corrected; on
    ``ZeroOrTwo`` the bunched Fock state is returned unchanged.
    """
    u = pbs_matrix(reflection_phase) if scattering is None else scattering
    outcome, p, f = detect_charge(apply_scattering(embed_spin_state(spin), u), "A", forced, rng)
    if outcome.value != ONE:
        return outcome, p, f
    return outcome, p, qs.apply_gate(reduce_to_spin(f), frame_correction(reflection_phase), 2)


def _aligned_deviation(a: qs.StateVector, b: qs.StateVector) -> float:
    """``max |a - e^{i phi} b|`` with ``phi`` chosen to cancel the global phase."""
    ov = np.vdot(b.amps, a.amps)
    phase = ov / abs(ov) if abs(ov) > 0 else 1.0
    return float(np.max(np.abs(a.amps - phase * b.amps)))


def _random_spin_states(samples: int, seed: int) -> list[qs.StateVector]:
    rng = np.random.default_rng(seed)
    out = []
    for _ in range(samples):
        v = rng.normal(size=4) + 1j * rng.normal(size=4)
        out.append(qs.StateVector(v / np.linalg.norm(v)))
    return out


BASIS_SPIN_STATES = tuple(qs.StateVector.from_label(b) for b in ("00", "01", "10", "11"))
SWEEP_PHASES = (1.0, 1j, -1.0, -1j)


def _compare(states, reflection_phase, scattering=None) -> tuple[float, float]:
    max_p = max_s = 0.0
    for s in states:
        try:
            _, p_qubit, s_qubit = qs.parity_check(s, 1, 2, "Z", forced=1)
        except qs.BranchImpossibleError:
            p_qubit, s_qubit = 0.0, None
        try:
            _, p_f, s_f = encoder(s, reflection_phase, forced=ONE, scattering=scattering)
        except qs.BranchImpossibleError:
            p_f, s_f = 0.0, None
        max_p = max(max_p, abs(p_f - p_qubit))
        # a branch present on one side only already shows up as a probability deviation
        if s_qubit is not None and s_f is not None:
            max_s = max(max_s, _aligned_deviation(s_f, s_qubit))
    return max_p, max_s


def verify_parity_povm(
    samples: int = 1000,
    seed: int = 0,
    reflection_phase: complex = 1.0,
    scattering: np.ndarray | None = None,
    atol: float = 1e-10,
) -> dict:
    """Compare the fermionic encoder with the qubit-level even-parity projection.

    Uses the four spin basis states plus ``samples`` random states. The phase
    sweep repeats the comparison for reflection phases 1, i, -1, -i; it also
    confirms that without the frame correction the only difference is the
    expected ``|11>`` phase.
    """
    if samples < 1:
        raise ValueError("samples must be >= 1")
    states = list(BASIS_SPIN_STATES) + _random_spin_states(samples, seed)
    max_p, max_s = _compare(states, reflection_phase, scattering)

    sweep_ok = True
    sweep_states = list(BASIS_SPIN_STATES) + states[4 : 4 + min(samples, 100)]
    for r in SWEEP_PHASES:
        dp, ds = _compare(sweep_states, r, scattering)
        sweep_ok &= dp <= atol and ds <= atol
        for s in sweep_states:
            try:
                _, _, s_qubit = qs.parity_check(s, 1, 2, "Z", forced=1)
            except qs.BranchImpossibleError:
                continue
            u = pbs_matrix(r) if scattering is None else scattering
            try:
                _, _, f = detect_charge(apply_scattering(embed_spin_state(s), u), "A", forced=ONE)
            except qs.BranchImpossibleError:
                sweep_ok = False
                continue
            expected_raw = qs.apply_gate(s_qubit, qs.GateSpec.custom(np.diag([1.0, even_branch_phase(r)])), 2)
            sweep_ok &= _aligned_deviation(reduce_to_spin(f), expected_raw) <= atol

    _, p_ref, s_ref = encoder(qs.StateVector.from_label("++"), reflection_phase, forced=ONE, scattering=scattering)
    return {
        "schema": 1,
        "samples": samples,
        "seed": seed,
        "reflection_phase": [float(np.real(reflection_phase)), float(np.imag(reflection_phase))],
        "max_prob_dev": max_p,
        "max_state_dev": max_s,
        "phase_sweep_pass": bool(sweep_ok),
        "plus_plus": {"p_one": p_ref, "post_state": s_ref.to_pairs()},
        "tolerance": atol,
        "pass": bool(max_p <= atol and max_s <= atol and sweep_ok),
    }
