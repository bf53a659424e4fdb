"""Linear-optics view of the Fourier transform: the phase-shifter schedule
implied by the product factorization of the transform, the composed optical
transfer matrix built from 50/50 beamsplitter layers, and device counts.

Conventions: a beamsplitter contributes a phase of -1 when traversed
vertically on a straight line, which makes each splitter layer a Hadamard on
one path bit; the mirrors that reorder beams are applied as an index
permutation in software.  All comparisons quotient out a global phase.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from itertools import combinations

import numpy as np

_MAX_DENSE_QUBITS = 6


@dataclass(frozen=True)
class ScheduleEntry:
    """One elementary phase factor exp(2*pi*i * k_stage * x_partner / 2**index).

    ``stage`` counts output bits from the most significant (1-based);
    ``index`` runs 2..stage and fixes both the angle 2*pi/2**index and the
    partner input bit ``n + index - stage``.
    """

    stage: int
    index: int
    phase: float


@dataclass(frozen=True)
class PhaseSchedule:
    """Every phase factor of the transform's product factorization."""

    num_bits: int
    entries: tuple[ScheduleEntry, ...]
    # (stage, input bit) pairs of the (-1)**(k_stage * x_bit) sign factors.
    sign_flips: tuple[tuple[int, int], ...]

    def shifter_phases(self) -> list[float]:
        """Distinct nonzero per-path shifter settings, including combined paths.

        Within one stage the factors multiply, so a path picks up the sum of
        any subset of that stage's elementary phases.
        """
        values: dict[float, float] = {}
        by_stage: dict[int, list[float]] = {}
        for entry in self.entries:
            by_stage.setdefault(entry.stage, []).append(entry.phase)
        for phases in by_stage.values():
            for r in range(1, len(phases) + 1):
                for combo in combinations(phases, r):
                    total = sum(combo)
                    values.setdefault(round(total, 12), total)
        return sorted(values.values())

    def format_table(self) -> str:
        """Plain-text table of (stage, index, phase in units of pi)."""
        lines = ["stage index phase/pi"]
        for entry in self.entries:
            lines.append(f"{entry.stage} {entry.index} {entry.phase / math.pi:.6f}")
        return "\n".join(lines) + "\n"


def qft_phase_schedule(n: int) -> PhaseSchedule:
    """Enumerate the factorization's phase factors for an n-bit transform."""
    if n < 1:
        raise ValueError("need at least one bit")
    entries = []
    signs = []
    for stage in range(1, n + 1):
        signs.append((stage, n - stage + 1))
        for index in range(2, stage + 1):
            entries.append(ScheduleEntry(stage, index, 2 * math.pi / (1 << index)))
    return PhaseSchedule(n, tuple(entries), tuple(signs))


def _hadamard_layer(n: int, qubit: int) -> np.ndarray:
    splitter = np.array([[1.0, 1.0], [1.0, -1.0]]) / math.sqrt(2.0)
    return np.kron(
        np.kron(np.eye(1 << qubit), splitter), np.eye(1 << (n - 1 - qubit))
    ).astype(np.complex128)


def _controlled_phase_diag(n: int, bit_a: int, bit_b: int, angle: float) -> np.ndarray:
    idx = np.arange(1 << n)
    mask_a = (idx >> (n - 1 - bit_a)) & 1
    mask_b = (idx >> (n - 1 - bit_b)) & 1
    return np.where(mask_a & mask_b, np.exp(1j * angle), 1.0)


def _bit_reversal_permutation(n: int) -> np.ndarray:
    dim = 1 << n
    perm = np.zeros(dim, dtype=np.int64)
    for value in range(dim):
        reverse = int(f"{value:0{n}b}"[::-1], 2)
        perm[value] = reverse
    matrix = np.zeros((dim, dim), dtype=np.complex128)
    matrix[perm, np.arange(dim)] = 1.0
    return matrix


def compose_optical_qft(n: int, with_phases: bool = True) -> np.ndarray:
    """Transfer matrix of the beamsplitter network, with or without shifters.

    With the phase shifters in place the network realizes the exact Fourier
    transform (up to a global phase); without them the same splitter layers
    implement a Hadamard on every path bit.
    """
    if n < 1:
        raise ValueError("need at least one bit")
    if n > _MAX_DENSE_QUBITS:
        raise ValueError(f"dense verification limited to {_MAX_DENSE_QUBITS} bits, got {n}")
    dim = 1 << n
    schedule = qft_phase_schedule(n)
    matrix = np.eye(dim, dtype=np.complex128)
    for qubit in range(n):
        stage = n - qubit
        matrix = _hadamard_layer(n, qubit) @ matrix
        if with_phases:
            for entry in schedule.entries:
                if entry.stage != stage:
                    continue
                partner = qubit + entry.index - 1
                matrix = _controlled_phase_diag(n, qubit, partner, entry.phase)[:, None] * matrix
    if with_phases:
        matrix = _bit_reversal_permutation(n) @ matrix
    return matrix


def exact_qft_matrix(n: int) -> np.ndarray:
    dim = 1 << n
    x = np.arange(dim)
    return np.exp(2j * np.pi * np.outer(x, x) / dim) / math.sqrt(dim)


def hadamard_matrix(n: int) -> np.ndarray:
    matrix = np.array([[1.0, 1.0], [1.0, -1.0]]) / math.sqrt(2.0)
    out = np.array([[1.0]])
    for _ in range(n):
        out = np.kron(out, matrix)
    return out.astype(np.complex128)


def deviation_up_to_global_phase(u: np.ndarray, v: np.ndarray) -> float:
    """max |u * phase - v| over entries, with the phase aligned on the largest one."""
    anchor = np.unravel_index(np.argmax(np.abs(v)), v.shape)
    if abs(u[anchor]) == 0.0:
        return float(np.max(np.abs(u - v)))
    phase = v[anchor] / u[anchor]
    phase /= abs(phase)
    return float(np.max(np.abs(u * phase - v)))


def composition_deviation(n: int) -> tuple[float, float]:
    """Deviation of the composed network from its two reference matrices.

    Returns (deviation with shifters vs exact transform, deviation without
    shifters vs Hadamard-on-every-bit).
    """
    dev_qft = deviation_up_to_global_phase(compose_optical_qft(n, True), exact_qft_matrix(n))
    dev_h = deviation_up_to_global_phase(compose_optical_qft(n, False), hadamard_matrix(n))
    return dev_qft, dev_h


@dataclass(frozen=True)
class ResourceCounts:
    """Beamsplitter counts for state preparation and the transform network."""

    preparation_splitters: int
    qft_splitters: int


def resource_counts(n_preparation: int, n_qft: int) -> ResourceCounts:
    """N - 1 splitters to fan out over N pixels; n * 2**(n-1) for the transform."""
    if n_preparation < 1 or n_qft < 1:
        raise ValueError("bit counts must be >= 1")
    return ResourceCounts(
        preparation_splitters=(1 << n_preparation) - 1,
        qft_splitters=n_qft * (1 << (n_qft - 1)),
    )
