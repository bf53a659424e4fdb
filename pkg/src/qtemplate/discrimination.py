"""Two-state discrimination analytics: overlaps, the Helstrom minimum-error
bound, the optimal two-outcome measurement built from the weighted density
difference, naive projector baselines, and the per-noise-level error report
comparing the matching algorithm against those references.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import TYPE_CHECKING

import numpy as np

from .core_state import StateVector
from .image_io import BinaryImage

if TYPE_CHECKING:  # avoids a runtime cycle with the pipeline module
    from .pipeline import SweepTable


def overlap_amplitude(image_a: BinaryImage, image_b: BinaryImage) -> float:
    """<A|B> of two point states: |common points| / sqrt(M_A * M_B)."""
    if image_a.pixels.shape != image_b.pixels.shape:
        raise ValueError("images must share dimensions")
    m_a = image_a.point_count
    m_b = image_b.point_count
    if m_a == 0 or m_b == 0:
        raise ValueError("both images need at least one point")
    common = int((image_a.pixels & image_b.pixels).sum())
    return common / math.sqrt(m_a * m_b)


def helstrom_error(p_a: float, p_b: float, overlap: float) -> float:
    """Minimum error probability (1 - sqrt(1 - 4 p_A p_B |<A|B>|^2)) / 2."""
    if abs(p_a + p_b - 1.0) > 1e-9:
        raise ValueError(f"priors must sum to 1, got {p_a} + {p_b}")
    if not 0.0 <= overlap <= 1.0 + 1e-12:
        raise ValueError(f"overlap {overlap} outside [0, 1]")
    radicand = 1.0 - 4.0 * p_a * p_b * overlap * overlap
    if radicand < -1e-12:
        raise ValueError(f"invalid inputs: negative radicand {radicand}")
    return 0.5 * (1.0 - math.sqrt(max(radicand, 0.0)))


def optimal_two_state_error(
    state_a: StateVector, state_b: StateVector, p_a: float, p_b: float
) -> float:
    """Error of the optimal measurement discriminating two known pure states.

    Diagonalizes the weighted density difference p_A|A><A| - p_B|B><B|
    restricted to the two-dimensional span of the states (it vanishes
    outside), answers by eigenvalue sign, and returns the resulting error.
    Equals :func:`helstrom_error` analytically; degenerate identical states
    fall back to guessing the likelier one.
    """
    if abs(p_a + p_b - 1.0) > 1e-9:
        raise ValueError(f"priors must sum to 1, got {p_a} + {p_b}")
    overlap = state_a.inner_product(state_b)

    # Gram-Schmidt basis {|A>, orthogonal complement of |B>}.
    residual = state_b.amplitudes - overlap * state_a.amplitudes
    residual_norm = float(np.linalg.norm(residual))
    if residual_norm < 1e-12:
        return min(p_a, p_b)

    # Coordinates of |A> and |B> in the orthonormal span basis.
    vec_a = np.array([1.0, 0.0], dtype=np.complex128)
    vec_b = np.array([overlap, residual_norm], dtype=np.complex128)
    lam = p_a * np.outer(vec_a, vec_a.conj()) - p_b * np.outer(vec_b, vec_b.conj())
    eigenvalues, eigenvectors = np.linalg.eigh(lam)

    error = 0.0
    for value, vector in zip(eigenvalues, eigenvectors.T):
        weight_a = abs(np.vdot(vector, vec_a)) ** 2
        weight_b = abs(np.vdot(vector, vec_b)) ** 2
        if value > 0:
            error += p_b * weight_b  # outcome assigned to A, wrong for B
        elif value < 0:
            error += p_a * weight_a
        else:
            error += min(p_a * weight_a, p_b * weight_b)
    return float(error)


def naive_projector_error(
    state_a_ideal: StateVector,
    state_b_ideal: StateVector,
    input_a: StateVector,
    input_b: StateVector,
    p_a: float,
    p_b: float,
    which_projector: str = "A",
) -> float:
    """Error of classifying by one projective yes/no measurement.

    With the A projector the input is called A exactly when the measurement
    of |A_ideal><A_ideal| fires, so the error on possibly perturbed inputs is
    p_A (1 - |<A|input_A>|^2) + p_B |<A|input_B>|^2 (and symmetrically for B).
    """
    if which_projector == "A":
        ideal = state_a_ideal
        miss = 1.0 - abs(ideal.inner_product(input_a)) ** 2
        false_pos = abs(ideal.inner_product(input_b)) ** 2
        return p_a * miss + p_b * false_pos
    if which_projector == "B":
        ideal = state_b_ideal
        miss = 1.0 - abs(ideal.inner_product(input_b)) ** 2
        false_pos = abs(ideal.inner_product(input_a)) ** 2
        return p_b * miss + p_a * false_pos
    raise ValueError(f"which_projector must be 'A' or 'B', got {which_projector!r}")


@dataclass
class DiscriminationReport:
    """Error budget of one noise level against the optimal-POVM references.

    ``algorithm_error`` is the prior-weighted misclassification rate of the
    single-shot accept/reject decision, averaged over which template is
    tested first; ``extended_error`` counts only wrong *conclusive* outcomes
    of the two-stage three-outcome procedure, whose indecision probability is
    ``p_inconclusive``.
    """

    noise_level: float
    p_a: float
    p_b: float
    helstrom_bound: float
    algorithm_error: float
    naive_projector_error_a: float
    naive_projector_error_b: float
    extended_error: float
    p_inconclusive: float


def build_report(sweep: "SweepTable", p_a: float, p_b: float) -> list[DiscriminationReport]:
    """Assemble per-noise-level discrimination reports from a sweep.

    Requires all four image/template cells per level (with second-try
    statistics); the Helstrom bound uses the unperturbed template states and
    is therefore constant across levels.
    """
    if abs(p_a + p_b - 1.0) > 1e-9:
        raise ValueError(f"priors must sum to 1, got {p_a} + {p_b}")
    bound = helstrom_error(p_a, p_b, sweep.template_overlap)
    priors = {"A": p_a, "B": p_b}

    reports = []
    for level in sweep.noise_levels:
        cells = {}
        for image_label in ("A", "B"):
            for template_label in ("A", "B"):
                cells[(image_label, template_label)] = sweep.cell(
                    level, image_label, template_label
                )

        single_errors = []
        extended_errors = []
        inconclusive = []
        for first, second in (("A", "B"), ("B", "A")):
            match_cell = cells[(first, first)]
            mismatch_cell = cells[(second, first)]
            single_errors.append(
                priors[first] * (1.0 - match_cell.p_accept_mean)
                + priors[second] * mismatch_cell.p_accept_mean
            )
            # Conclusive-but-wrong: calling the matching input "second" after
            # a false rejection, or accepting the first template on the other
            # input directly.
            extended_errors.append(
                priors[first] * match_cell.second_try_unconditional_mean
                + priors[second] * mismatch_cell.p_accept_mean
            )
            inconclusive.append(
                priors[first] * match_cell.inconclusive_mean
                + priors[second] * mismatch_cell.inconclusive_mean
            )

        reports.append(
            DiscriminationReport(
                noise_level=level,
                p_a=p_a,
                p_b=p_b,
                helstrom_bound=bound,
                algorithm_error=float(np.mean(single_errors)),
                naive_projector_error_a=p_a
                * (1.0 - cells[("A", "A")].projector_overlap_mean)
                + p_b * cells[("B", "A")].projector_overlap_mean,
                naive_projector_error_b=p_b
                * (1.0 - cells[("B", "B")].projector_overlap_mean)
                + p_a * cells[("A", "B")].projector_overlap_mean,
                extended_error=float(np.mean(extended_errors)),
                p_inconclusive=float(np.mean(inconclusive)),
            )
        )
    return reports
