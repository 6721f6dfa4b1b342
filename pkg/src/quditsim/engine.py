"""Circuit representation and state-vector execution.

Gates are embedded into the ``d**n`` amplitude vector through digit/stride
index arithmetic: a gate on wires ``w`` touches, for every setting of the
remaining wires, the ``d**len(w)`` amplitudes ``base + offsets``. The hot
loop lives in :mod:`quditsim.kernels`. :func:`full_matrix_oracle` builds
the dense ``d**n`` matrix by Kronecker products instead and exists to check
the fast path.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

import numpy as np

from . import gates, kernels
from .errors import (
    BadShotCount,
    ControlTargetOverlap,
    DimensionMismatch,
    DuplicateWire,
    NormDrift,
    SchemaViolation,
    SizeMismatch,
    SizeOverflow,
    UnknownGate,
    WireOutOfRange,
)
from .state import RegisterState, index_to_digits

NORM_DRIFT_TOL = 1e-9


@dataclass(frozen=True, eq=False)
class GateInstruction:
    """One gate application.

    ``name`` is one of :data:`gates.NAMED_GATES`. ``matrix`` is required for
    ``"U"`` and ignored otherwise. ``control`` adds a single d-level control
    wire applying ``U**c`` when the control digit reads ``c``.
    """

    name: str
    targets: tuple[int, ...]
    control: Optional[int] = None
    exponent: int = 1
    p: int = 0
    q: int = 0
    matrix: Optional[np.ndarray] = None
    inverse: bool = False

    def __post_init__(self):
        object.__setattr__(self, "targets", tuple(int(t) for t in self.targets))
        if self.matrix is not None:
            m = np.array(self.matrix, dtype=np.complex128)
            m.flags.writeable = False
            object.__setattr__(self, "matrix", m)

    @property
    def wires(self) -> tuple[int, ...]:
        return self.targets if self.control is None else (self.control,) + self.targets

    def validate(self, d: int, n: int) -> None:
        if self.name not in gates.NAMED_GATES:
            raise UnknownGate(f"unknown gate {self.name!r}")
        if not self.targets:
            raise SchemaViolation("a gate needs at least one target")
        for w in self.wires:
            if not 0 <= w < n:
                raise WireOutOfRange(f"wire {w} outside [0, {n})")
        if len(set(self.targets)) != len(self.targets):
            raise DuplicateWire(f"duplicate target wires {list(self.targets)}")
        if self.control is not None and self.control in self.targets:
            raise ControlTargetOverlap(f"control wire {self.control} is also a target")
        if self.exponent < 0:
            raise SchemaViolation(f"exponent must be >= 0, got {self.exponent}")
        if d ** len(self.targets) > gates.MAX_MATRIX_SIZE:
            raise SizeOverflow(f"{self.name} on {len(self.targets)} wire(s) of dimension {d} "
                               f"exceeds the {gates.MAX_MATRIX_SIZE} matrix size limit")
        expected = gates.FAMILY_WIRES[self.name]
        if expected is not None and len(self.targets) != expected:
            raise SizeMismatch(f"{self.name} acts on {expected} wire(s), got {len(self.targets)} targets")
        if self.name == "U":
            if self.matrix is None:
                raise SchemaViolation("gate U requires a matrix")
            size = d ** len(self.targets)
            if self.matrix.shape != (size, size):
                raise SizeMismatch(f"U matrix must be {size}x{size} for {len(self.targets)} target(s)")
            gates.require_unitary(self.matrix)

    def base_matrix(self, d: int) -> np.ndarray:
        """Gate matrix on the targets, before the inverse flag and control."""
        if self.name == "U":
            m = self.matrix
            return m if self.exponent == 1 else np.linalg.matrix_power(m, self.exponent)
        return gates.named_gate(self.name, d, exponent=self.exponent, p=self.p, q=self.q, wires=len(self.targets))

    def target_matrix(self, d: int) -> np.ndarray:
        m = self.base_matrix(d)
        return m.conj().T if self.inverse else m

    def inverted(self) -> "GateInstruction":
        return GateInstruction(self.name, self.targets, self.control, self.exponent, self.p, self.q,
                               self.matrix, not self.inverse)


@dataclass
class Circuit:
    dimension: int
    qudit_count: int
    instructions: list[GateInstruction] = field(default_factory=list)

    def append(self, instruction: GateInstruction) -> "Circuit":
        instruction.validate(self.dimension, self.qudit_count)
        self.instructions.append(instruction)
        return self

    def add(self, name: str, targets: Sequence[int], **kwargs) -> "Circuit":
        return self.append(GateInstruction(name, tuple(targets), **kwargs))

    def validate(self) -> None:
        for instr in self.instructions:
            instr.validate(self.dimension, self.qudit_count)

    def inverse(self) -> "Circuit":
        """Reversed circuit with every inverse flag toggled."""
        return Circuit(self.dimension, self.qudit_count, [i.inverted() for i in reversed(self.instructions)])

    def __len__(self) -> int:
        return len(self.instructions)


@dataclass(eq=False)
class SimulationResult:
    amplitudes: np.ndarray
    marginals: np.ndarray
    samples: Optional[dict[str, int]] = None

    @property
    def dimension(self) -> int:
        return self.marginals.shape[1]

    @property
    def qudit_count(self) -> int:
        return self.marginals.shape[0]

    def state(self) -> RegisterState:
        return RegisterState(self.dimension, self.qudit_count, self.amplitudes)


def _strides(d: int, n: int) -> np.ndarray:
    return d ** np.arange(n - 1, -1, -1, dtype=np.int64)


def _offsets(d: int, n: int, wires: Sequence[int]) -> np.ndarray:
    """Flat offsets of the ``d**k`` sub-indices on ``wires`` (first wire most significant)."""
    strides = _strides(d, n)
    out = np.zeros(1, dtype=np.int64)
    for w in wires:
        out = (out[:, None] + np.arange(d, dtype=np.int64)[None, :] * strides[w]).ravel()
    return out


def _bases(d: int, n: int, exclude: Sequence[int]) -> np.ndarray:
    """Flat indices whose digits are zero on every wire in ``exclude``."""
    skip = set(exclude)
    return _offsets(d, n, [w for w in range(n) if w not in skip])


def _check_wires(n: int, wires: Sequence[int]) -> None:
    for w in wires:
        if not 0 <= w < n:
            raise WireOutOfRange(f"wire {w} outside [0, {n})")
    if len(set(wires)) != len(wires):
        raise DuplicateWire(f"duplicate wires {list(wires)}")


def _apply_inplace(psi: np.ndarray, d: int, n: int, u: np.ndarray, targets: Sequence[int],
                   control: Optional[int] = None) -> None:
    u = np.ascontiguousarray(u, dtype=np.complex128)
    offsets = _offsets(d, n, targets)
    if control is None:
        kernels.apply_matrix(psi, u, offsets, _bases(d, n, targets))
        return
    bases = _bases(d, n, tuple(targets) + (control,))
    stride = int(_strides(d, n)[control])
    power = u
    for c in range(1, d):
        kernels.apply_matrix(psi, power, offsets, bases + c * stride)
        if c < d - 1:
            power = np.ascontiguousarray(u @ power)


def _prepare(state: RegisterState, u, wires: Sequence[int]) -> np.ndarray:
    d, n = state.dimension, state.qudit_count
    _check_wires(n, wires)
    u = np.asarray(u, dtype=np.complex128)
    size = d ** len(wires)
    if u.shape != (size, size):
        raise SizeMismatch(f"expected a {size}x{size} matrix for {len(wires)} wire(s), got {u.shape}")
    return gates.require_unitary(u)


def _new_state(state: RegisterState, psi: np.ndarray) -> RegisterState:
    psi.flags.writeable = False
    return RegisterState(state.dimension, state.qudit_count, psi)


def apply_single(state: RegisterState, u, wire: int) -> RegisterState:
    u = _prepare(state, u, [wire])
    psi = np.array(state.amplitudes)
    _apply_inplace(psi, state.dimension, state.qudit_count, u, [wire])
    return _new_state(state, psi)


def apply_multi(state: RegisterState, u, wires: Sequence[int]) -> RegisterState:
    """Apply a ``d**k`` matrix to ``wires``; ``wires[0]`` is the most significant sub-digit."""
    u = _prepare(state, u, list(wires))
    psi = np.array(state.amplitudes)
    _apply_inplace(psi, state.dimension, state.qudit_count, u, list(wires))
    return _new_state(state, psi)


def apply_controlled(state: RegisterState, u, control: int, targets: Sequence[int]) -> RegisterState:
    if control in targets:
        raise ControlTargetOverlap(f"control wire {control} is also a target")
    u = _prepare(state, u, list(targets))
    _check_wires(state.qudit_count, [control])
    psi = np.array(state.amplitudes)
    _apply_inplace(psi, state.dimension, state.qudit_count, u, list(targets), control)
    return _new_state(state, psi)


def marginals(state: RegisterState) -> np.ndarray:
    """``n x d`` table of per-wire outcome probabilities."""
    psi = np.ascontiguousarray(state.amplitudes, dtype=np.complex128)
    return kernels.marginals(psi, state.dimension, state.qudit_count)


def outcome_label(digits: Sequence[int], d: int) -> str:
    """Key used in shot counts: concatenated digits, comma separated when d > 10."""
    return ("," if d > 10 else "").join(str(s) for s in digits)


def sample(state: RegisterState, shots: int, seed: int) -> dict[str, int]:
    """Draw ``shots`` joint outcomes from ``|amplitude|**2`` with a seeded PCG64 stream."""
    if isinstance(shots, bool) or int(shots) != shots or shots < 1:
        raise BadShotCount(f"shots must be a positive integer, got {shots!r}")
    probs = state.probabilities()
    probs = probs / probs.sum()
    rng = np.random.default_rng(seed)
    counts = rng.multinomial(int(shots), probs)
    d, n = state.dimension, state.qudit_count
    return {outcome_label(index_to_digits(int(j), d, n), d): int(counts[j]) for j in np.flatnonzero(counts)}


def run(circuit: Circuit, initial: RegisterState, *, shots: Optional[int] = None, seed: Optional[int] = None,
        on_step: Optional[Callable[[int, GateInstruction, np.ndarray], None]] = None) -> SimulationResult:
    """Apply ``circuit`` to ``initial`` in order and measure.

    ``on_step(i, instruction, amplitudes)`` is called after every gate with a
    read-only view of the current state. Raises :class:`NormDrift` if the
    norm moves more than 1e-9 away from one.
    """
    d, n = circuit.dimension, circuit.qudit_count
    if (initial.dimension, initial.qudit_count) != (d, n):
        raise DimensionMismatch(
            f"circuit is d={d}, n={n} but the initial state is d={initial.dimension}, n={initial.qudit_count}")
    psi = np.array(initial.amplitudes, dtype=np.complex128)
    for i, instr in enumerate(circuit.instructions):
        _apply_inplace(psi, d, n, instr.target_matrix(d), instr.targets, instr.control)
        norm = np.linalg.norm(psi)
        if abs(norm - 1.0) > NORM_DRIFT_TOL:
            raise NormDrift(f"norm {norm!r} after instruction {i} ({instr.name})")
        if on_step is not None:
            view = psi.view()
            view.flags.writeable = False
            on_step(i, instr, view)
    final = RegisterState(d, n, psi)
    psi.flags.writeable = False
    result = SimulationResult(psi, marginals(final))
    if shots is not None:
        result.samples = sample(final, shots, 0 if seed is None else seed)
    return result


def _permutation(d: int, n: int, order: Sequence[int]) -> np.ndarray:
    """Matrix sending ``|digits>`` to ``|digits reordered by order>``."""
    size = d**n
    perm = np.zeros((size, size))
    for j in range(size):
        digits = index_to_digits(j, d, n)
        k = 0
        for w in order:
            k = k * d + digits[w]
        perm[k, j] = 1.0
    return perm


def embed_full(u: np.ndarray, d: int, n: int, wires: Sequence[int]) -> np.ndarray:
    """Dense ``d**n`` matrix acting as ``u`` on ``wires`` and identity elsewhere."""
    rest = [w for w in range(n) if w not in wires]
    order = list(wires) + rest
    perm = _permutation(d, n, order)
    local = np.kron(u, np.eye(d ** len(rest)))
    return perm.T @ local @ perm


def full_matrix_oracle(circuit: Circuit) -> np.ndarray:
    """Whole-circuit unitary built from Kronecker products and permutations."""
    d, n = circuit.dimension, circuit.qudit_count
    if d**n > gates.MAX_MATRIX_SIZE:
        raise SizeOverflow(f"{d}^{n} exceeds the {gates.MAX_MATRIX_SIZE} oracle limit")
    total = np.eye(d**n, dtype=np.complex128)
    for instr in circuit.instructions:
        u = instr.target_matrix(d)
        if instr.control is not None:
            u = gates.controlled(u, d)
        total = embed_full(u, d, n, instr.wires) @ total
    return total
