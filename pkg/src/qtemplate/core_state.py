"""Dense statevector kernel: gates, projection and sampling over n qubits.

Bit convention is most-significant-first throughout the package: qubit 0
carries weight 2**(num_qubits - 1), so a basis index read as a binary string
lists the qubits in order.  Gates mutate the vector in place and return the
state to allow chaining; use :meth:`StateVector.copy` for value semantics.
"""

from __future__ import annotations

from collections.abc import Callable, Iterable

import numpy as np

from .errors import PostSelectionImpossibleError

_SQRT1_2 = 1.0 / np.sqrt(2.0)

# Renormalization is explicit (projection only), so any unitary drift beyond
# this is a kernel bug rather than float noise.
_ZERO_PROBABILITY = 1e-15


class StateVector:
    """Complex amplitude vector over ``2**num_qubits`` basis states."""

    __slots__ = ("num_qubits", "amplitudes")

    def __init__(self, num_qubits: int, amplitudes: np.ndarray):
        if num_qubits < 1:
            raise ValueError(f"need at least one qubit, got {num_qubits}")
        amplitudes = np.asarray(amplitudes, dtype=np.complex128)
        if amplitudes.shape != (1 << num_qubits,):
            raise ValueError(
                f"amplitude vector of shape {amplitudes.shape} does not match "
                f"{num_qubits} qubits (expected length {1 << num_qubits})"
            )
        self.num_qubits = num_qubits
        self.amplitudes = amplitudes

    @classmethod
    def basis_state(cls, num_qubits: int, index: int) -> "StateVector":
        """Computational basis state ``|index>``."""
        dim = 1 << num_qubits
        if not 0 <= index < dim:
            raise ValueError(f"basis index {index} out of range for {num_qubits} qubits")
        amplitudes = np.zeros(dim, dtype=np.complex128)
        amplitudes[index] = 1.0
        return cls(num_qubits, amplitudes)

    @property
    def dim(self) -> int:
        return self.amplitudes.shape[0]

    def copy(self) -> "StateVector":
        return StateVector(self.num_qubits, self.amplitudes.copy())

    def norm_squared(self) -> float:
        return float(np.vdot(self.amplitudes, self.amplitudes).real)

    def probabilities(self) -> np.ndarray:
        return np.abs(self.amplitudes) ** 2

    def _check_qubit(self, qubit: int) -> None:
        if not 0 <= qubit < self.num_qubits:
            raise ValueError(f"qubit {qubit} out of range for {self.num_qubits} qubits")

    def _pair_view(self, qubit: int) -> np.ndarray:
        """Reshape so that axis 1 is the given qubit (MSB-first ordering)."""
        return self.amplitudes.reshape(1 << qubit, 2, -1)

    def apply_hadamard(self, qubit: int) -> "StateVector":
        """Map amplitude pairs (a, b) on ``qubit`` to ((a+b), (a-b))/sqrt(2)."""
        self._check_qubit(qubit)
        view = self._pair_view(qubit)
        a = view[:, 0, :]
        b = view[:, 1, :]
        total = (a + b) * _SQRT1_2
        view[:, 1, :] = (a - b) * _SQRT1_2
        view[:, 0, :] = total
        return self

    def apply_controlled_phase(self, control: int, target: int, angle: float) -> "StateVector":
        """Multiply amplitudes with both bits set by ``exp(i*angle)``."""
        self._check_qubit(control)
        self._check_qubit(target)
        if control == target:
            raise ValueError("control and target must differ")
        view = self.amplitudes.reshape((2,) * self.num_qubits)
        sel: list[slice | int] = [slice(None)] * self.num_qubits
        sel[control] = 1
        sel[target] = 1
        view[tuple(sel)] *= np.exp(1j * angle)
        return self

    def apply_phase_flip(self, marked: Iterable[int] | np.ndarray) -> "StateVector":
        """Negate the amplitudes at the marked basis indices (self-inverse)."""
        idx = np.asarray(list(marked) if not isinstance(marked, np.ndarray) else marked,
                         dtype=np.int64)
        if idx.size == 0:
            return self
        if idx.min() < 0 or idx.max() >= self.dim:
            raise ValueError("marked index out of range")
        self.amplitudes[idx] = -self.amplitudes[idx]
        return self

    def swap_qubits(self, a: int, b: int) -> "StateVector":
        """Exchange amplitudes of basis states differing in qubits ``a`` and ``b``."""
        self._check_qubit(a)
        self._check_qubit(b)
        if a == b:
            raise ValueError("swap qubits must differ")
        view = self.amplitudes.reshape((2,) * self.num_qubits)
        self.amplitudes = np.ascontiguousarray(np.swapaxes(view, a, b)).reshape(self.dim)
        return self

    def project(
        self, keep: np.ndarray | Callable[[np.ndarray], np.ndarray]
    ) -> tuple[float, "StateVector"]:
        """Post-select on the kept basis indices.

        ``keep`` is either a boolean mask over basis indices or a vectorized
        predicate applied to ``arange(dim)``.  Returns the branch probability
        and the renormalized conditional state; raises
        :class:`PostSelectionImpossibleError` if the branch carries no weight.
        """
        if callable(keep):
            mask = np.asarray(keep(np.arange(self.dim)), dtype=bool)
        else:
            mask = np.asarray(keep, dtype=bool)
        if mask.shape != (self.dim,):
            raise ValueError("keep mask must cover every basis index")
        kept = np.where(mask, self.amplitudes, 0.0)
        probability = float(np.vdot(kept, kept).real)
        if probability < _ZERO_PROBABILITY:
            raise PostSelectionImpossibleError(
                f"post-selection branch has probability {probability:.3e}"
            )
        return probability, StateVector(self.num_qubits, kept / np.sqrt(probability))

    def inner_product(self, other: "StateVector") -> complex:
        """<self|other> with the conjugate on the left argument."""
        if other.num_qubits != self.num_qubits:
            raise ValueError(
                f"dimension mismatch: {self.num_qubits} vs {other.num_qubits} qubits"
            )
        return complex(np.vdot(self.amplitudes, other.amplitudes))

    def sample(self, rng: int | np.random.Generator) -> int:
        """Draw one basis index with Born-rule probabilities.

        ``rng`` is a seed or an existing generator; seeding is PCG64, so the
        draw is reproducible across runs for a fixed seed.
        """
        generator = np.random.default_rng(rng) if isinstance(rng, int) else rng
        probs = self.probabilities()
        cumulative = np.cumsum(probs)
        # Guard the last bin against float drift in the cumulative sum.
        cumulative[-1] = max(cumulative[-1], 1.0)
        return int(np.searchsorted(cumulative, generator.random(), side="right"))
