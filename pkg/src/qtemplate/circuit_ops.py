"""Quantum subroutines on statevectors: point-state preparation, 2-D QFT,
k-space noise filtering, and Grover rotations with their iteration count.

Both ancilla measurements of the physical protocol (photon reflection and
filter acceptance) are handled analytically as post-selection: each returns
the branch probability together with the renormalized conditional state
instead of storing extra qubits.

Grover direction naming: the *inverse* iteration (oracle phase flip followed
by the reflection about the uniform state) is the one the matching pipeline
applies; ``ceil(pi/4 * sqrt(N/M))`` of them rotate the point state of the
template onto the uniform state up to a global sign, exactly so when
``M = N/4``.  The *forward* iteration is its exact operator inverse
(reflection first, then oracle) and is used to undo a previous pass.
"""

from __future__ import annotations

import math
from collections.abc import Callable, Sequence
from dataclasses import dataclass

import numpy as np

from .core_state import StateVector
from .errors import PostSelectionImpossibleError
from .image_io import BinaryImage

ThetaFunction = Callable[[np.ndarray, np.ndarray], np.ndarray]


@dataclass(frozen=True)
class FilterSpec:
    """Noise-filter configuration in k-space.

    ``k_max`` is the radial cutoff in cycles per image.  ``remove_dc``
    removes the constant component (useful when noise changes the total
    point count); ``aliased`` maps register values above N/2 to negative
    frequencies before measuring the radius, as in classical low-pass
    filtering.  A custom ``theta`` (angles in [0, pi/2], vectorized over
    signed frequency grids) overrides the sharp cutoff.
    """

    k_max: float
    remove_dc: bool = True
    aliased: bool = True
    theta: ThetaFunction | None = None


def signed_frequencies(n_values: int, aliased: bool = True) -> np.ndarray:
    """Map register values 0..N-1 to signed frequencies (k or k - N)."""
    k = np.arange(n_values, dtype=np.float64)
    if not aliased:
        return k
    return np.where(k <= n_values / 2, k, k - n_values)


def sharp_cutoff_theta(spec: FilterSpec) -> ThetaFunction:
    """Sharp cutoff: keep radial frequencies below ``k_max``, remove the rest.

    The DC component is removed iff ``spec.remove_dc``.
    """
    if spec.k_max <= 0:
        raise ValueError(f"k_max must be positive, got {spec.k_max}")

    def theta(k_x: np.ndarray, k_y: np.ndarray) -> np.ndarray:
        radius = np.hypot(k_x, k_y)
        keep = radius < spec.k_max
        if spec.remove_dc:
            keep &= radius > 0
        return np.where(keep, 0.0, np.pi / 2)

    return theta


def filter_weights(spec: FilterSpec, n_x: int, n_y: int) -> np.ndarray:
    """cos(theta) per basis index of the (k_x, k_y) grid, x register major."""
    theta = spec.theta if spec.theta is not None else sharp_cutoff_theta(spec)
    kx = signed_frequencies(1 << n_x, spec.aliased)
    ky = signed_frequencies(1 << n_y, spec.aliased)
    angles = theta(kx[:, None], ky[None, :])
    if np.any(angles < 0) or np.any(angles > np.pi / 2 + 1e-12):
        raise ValueError("filter angles must lie in [0, pi/2]")
    return np.cos(angles).reshape(-1)


def prepare_point_state(image: BinaryImage) -> tuple[float, StateVector]:
    """Uniform superposition over the points of an image.

    Returns the reflection probability M / (N_x * N_y) of the read-out
    together with the conditional state.
    """
    indices = image.point_indices()
    m = indices.size
    if m == 0:
        raise PostSelectionImpossibleError("image has no points; photon always absorbed")
    num_qubits = image.qubits_x + image.qubits_y
    amplitudes = np.zeros(1 << num_qubits, dtype=np.complex128)
    amplitudes[indices] = 1.0 / math.sqrt(m)
    return m / (image.width * image.height), StateVector(num_qubits, amplitudes)


def qft(state: StateVector, register: Sequence[int], inverse: bool = False) -> StateVector:
    """Quantum Fourier transform on a contiguous qubit range (MSB first).

    |x> -> sum_k exp(2*pi*i*x*k/N) |k> / sqrt(N) on the register, decomposed
    into Hadamards, controlled phases and final bit-reversal swaps.
    """
    qubits = list(register)
    if not qubits:
        raise ValueError("empty QFT register")
    if qubits != list(range(qubits[0], qubits[0] + len(qubits))):
        raise ValueError("QFT register must be a contiguous ascending qubit range")
    n = len(qubits)

    if not inverse:
        for i, q in enumerate(qubits):
            state.apply_hadamard(q)
            for m in range(2, n - i + 1):
                state.apply_controlled_phase(qubits[i + m - 1], q, 2 * np.pi / (1 << m))
        for i in range(n // 2):
            state.swap_qubits(qubits[i], qubits[n - 1 - i])
    else:
        for i in range(n // 2):
            state.swap_qubits(qubits[i], qubits[n - 1 - i])
        for i in reversed(range(n)):
            q = qubits[i]
            for m in reversed(range(2, n - i + 1)):
                state.apply_controlled_phase(qubits[i + m - 1], q, -2 * np.pi / (1 << m))
            state.apply_hadamard(q)
    return state


def iqft(state: StateVector, register: Sequence[int]) -> StateVector:
    """Exact inverse of :func:`qft`."""
    return qft(state, register, inverse=True)


def qft_2d(state: StateVector, n_x: int, n_y: int, inverse: bool = False) -> StateVector:
    """Independent QFTs on the x register (first n_x qubits) and y register."""
    if n_x < 1 or n_y < 1 or n_x + n_y != state.num_qubits:
        raise ValueError(
            f"register split {n_x}+{n_y} does not match a {state.num_qubits}-qubit state"
        )
    qft(state, range(0, n_x), inverse=inverse)
    qft(state, range(n_x, n_x + n_y), inverse=inverse)
    return state


def iqft_2d(state: StateVector, n_x: int, n_y: int) -> StateVector:
    return qft_2d(state, n_x, n_y, inverse=True)


def noise_filter(
    state: StateVector, spec: FilterSpec, n_x: int, n_y: int
) -> tuple[float, StateVector]:
    """Attenuate k-space amplitudes by cos(theta) and post-select the kept branch.

    The state must already be in the k representation (after :func:`qft_2d`).
    Returns the pass probability and the renormalized filtered state; this
    equals coupling the filter ancilla and measuring it in the kept outcome.
    """
    weights = filter_weights(spec, n_x, n_y)
    filtered = state.amplitudes * weights
    p_pass = float(np.vdot(filtered, filtered).real)
    if p_pass < 1e-15:
        raise PostSelectionImpossibleError("noise filter removed the entire state")
    state.amplitudes = filtered / math.sqrt(p_pass)
    return p_pass, state


def grover_oracle(template: BinaryImage) -> Callable[[StateVector], StateVector]:
    """Phase-flip oracle marking the points of the template."""
    marked = template.point_indices()

    def oracle(state: StateVector) -> StateVector:
        return state.apply_phase_flip(marked)

    return oracle


def diffusion(state: StateVector) -> StateVector:
    """Reflection about the uniform superposition: 2|s><s| - 1.

    Implemented as Hadamards, a phase of -1 on every state except |0...0>,
    and Hadamards again.
    """
    n = state.num_qubits
    for q in range(n):
        state.apply_hadamard(q)
    state.amplitudes = -state.amplitudes
    state.amplitudes[0] = -state.amplitudes[0]
    for q in range(n):
        state.apply_hadamard(q)
    return state


def grover_step(
    state: StateVector,
    template: BinaryImage | np.ndarray,
    direction: str = "inverse",
) -> StateVector:
    """One Grover iteration with respect to the template's points.

    ``inverse`` applies the oracle first and then the diffusion (the rotation
    used by the matching pipeline); ``forward`` is the exact operator inverse.
    """
    marked = template.point_indices() if isinstance(template, BinaryImage) else template
    if direction == "inverse":
        state.apply_phase_flip(marked)
        diffusion(state)
    elif direction == "forward":
        diffusion(state)
        state.apply_phase_flip(marked)
    else:
        raise ValueError(f"unknown Grover direction {direction!r}")
    return state


def iteration_count(n_total: int, m_tp: int) -> int:
    """Number of Grover iterations, ceil(pi/4 * sqrt(N/M))."""
    if m_tp < 1 or m_tp > n_total:
        raise ValueError(f"template point count {m_tp} outside [1, {n_total}]")
    return math.ceil(math.pi / 4 * math.sqrt(n_total / m_tp))
