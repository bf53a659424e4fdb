"""End-to-end template matching runs, the second-hypothesis retry, and
seeded noise sweeps over image/template combinations.

Exact-probability mode is primary: every branch of the measurement tree
(photon reflected, filter passed, all coordinate qubits zero) is reported as
an exact probability computed from the statevector.  Sampled mode draws the
same branches from a seeded generator to model the single-photon protocol.

Acceptance is always evaluated as one projector onto basis index 0 (are all
coordinate qubits zero), never as per-qubit measurements, so the rejected
branch keeps its conditional state for the second-hypothesis stage.
"""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .circuit_ops import (
    FilterSpec,
    grover_step,
    iteration_count,
    iqft_2d,
    noise_filter,
    prepare_point_state,
    qft_2d,
)
from .core_state import StateVector
from .discrimination import overlap_amplitude
from .errors import PostSelectionImpossibleError
from .image_io import BinaryImage, invert_pixels

THREADS_ENV_VAR = "QTEMPLATE_THREADS"


@dataclass(frozen=True)
class MatchOptions:
    """Run configuration: optional k-space filter and optional sampling seed."""

    filter: FilterSpec | None = None
    sample_seed: int | None = None


@dataclass
class MatchOutcome:
    """Branch probabilities of one matching run.

    ``p_accept`` is conditional on both ancilla post-selections succeeding;
    ``post_reject_state`` is the conditional state given rejection (None when
    the rejection branch carries no probability) and feeds the second try.
    ``sampled_outcome`` is set in sampled mode only: one of ``absorbed``,
    ``filter_rejected``, ``accepted``, ``rejected``.
    """

    p_reflect: float
    p_filter: float
    p_accept: float
    post_reject_state: StateVector | None
    iterations: int
    sampled_outcome: str | None = None

    @property
    def p_reject(self) -> float:
        return 1.0 - self.p_accept


@dataclass
class SecondTryOutcome:
    """Result of testing the alternative template on the rejected branch."""

    p_accept_second: float
    classification: str | None = None  # accepted-first | accepted-second | inconclusive


def _check_same_shape(image: BinaryImage, template: BinaryImage) -> None:
    if (image.width, image.height) != (template.width, template.height):
        raise ValueError(
            f"image {image.width}x{image.height} and template "
            f"{template.width}x{template.height} differ in shape"
        )


def filtered_point_state(
    image: BinaryImage, spec: FilterSpec | None
) -> tuple[float, float, StateVector]:
    """Prepare the point state and optionally low-pass filter it in k-space.

    Returns (reflection probability, filter pass probability, state); the
    filter probability is 1 when no filter is given and the state is then the
    bare point state, identical to skipping the transform steps entirely.
    """
    p_reflect, state = prepare_point_state(image)
    if spec is None:
        return p_reflect, 1.0, state
    n_x, n_y = image.qubits_x, image.qubits_y
    qft_2d(state, n_x, n_y)
    p_filter, state = noise_filter(state, spec, n_x, n_y)
    iqft_2d(state, n_x, n_y)
    return p_reflect, p_filter, state


def overlap_probability(image: BinaryImage, template: BinaryImage) -> float:
    """Squared characteristic-function overlap |common points|^2 / (M * M')."""
    return overlap_amplitude(image, template) ** 2


def run_match(
    image: BinaryImage, template: BinaryImage, options: MatchOptions = MatchOptions()
) -> MatchOutcome:
    """Decide whether the image matches the template.

    Pipeline: point-state preparation, optional QFT / noise filter / inverse
    QFT, R inverse Grover iterations with respect to the template, Hadamards
    on every coordinate qubit, and the all-zero projector.
    """
    _check_same_shape(image, template)
    marked = template.point_indices()
    if marked.size == 0:
        raise ValueError("template has no points")

    p_reflect, p_filter, state = filtered_point_state(image, options.filter)
    rounds = iteration_count(image.width * image.height, marked.size)
    for _ in range(rounds):
        grover_step(state, marked, direction="inverse")
    for qubit in range(state.num_qubits):
        state.apply_hadamard(qubit)

    p_accept = min(float(abs(state.amplitudes[0]) ** 2), 1.0)
    try:
        _, post_reject = state.project(lambda idx: idx != 0)
    except PostSelectionImpossibleError:
        post_reject = None  # accepted with certainty; no rejection branch

    outcome = MatchOutcome(
        p_reflect=p_reflect,
        p_filter=p_filter,
        p_accept=p_accept,
        post_reject_state=post_reject,
        iterations=rounds,
    )
    if options.sample_seed is not None:
        outcome.sampled_outcome = _sample_outcome(outcome, options.sample_seed)
    return outcome


def _sample_outcome(outcome: MatchOutcome, seed: int) -> str:
    rng = np.random.default_rng(seed)
    if rng.random() >= outcome.p_reflect:
        return "absorbed"
    if rng.random() >= outcome.p_filter:
        return "filter_rejected"
    return "accepted" if rng.random() < outcome.p_accept else "rejected"


def run_second_hypothesis(
    outcome: MatchOutcome,
    template_first: BinaryImage,
    template_second: BinaryImage,
    sample_seed: int | None = None,
) -> SecondTryOutcome:
    """Test the alternative template on the rejected branch of a previous run.

    Undoes the first template's rotation (Hadamards, forward iterations with
    the first template), applies the inverse rotation for the second template
    and asks the all-zero question again.  No further photon is needed.
    """
    if outcome.post_reject_state is None:
        raise ValueError("first hypothesis was accepted with certainty; nothing to retry")
    _check_same_shape(template_first, template_second)

    state = outcome.post_reject_state.copy()
    n_total = 1 << state.num_qubits
    for qubit in range(state.num_qubits):
        state.apply_hadamard(qubit)

    marked_first = template_first.point_indices()
    for _ in range(iteration_count(n_total, marked_first.size)):
        grover_step(state, marked_first, direction="forward")

    marked_second = template_second.point_indices()
    for _ in range(iteration_count(n_total, marked_second.size)):
        grover_step(state, marked_second, direction="inverse")

    for qubit in range(state.num_qubits):
        state.apply_hadamard(qubit)

    p_second = min(float(abs(state.amplitudes[0]) ** 2), 1.0)
    result = SecondTryOutcome(p_accept_second=p_second)
    if sample_seed is not None:
        rng = np.random.default_rng(sample_seed)
        result.classification = (
            "accepted-second" if rng.random() < p_second else "inconclusive"
        )
    return result


@dataclass
class SweepRow:
    """Averaged statistics for one (noise level, image, template) cell."""

    noise_level: float
    image_label: str
    template_label: str
    filtered: bool
    p_accept_mean: float
    p_accept_stderr: float
    second_try_accept_mean: float
    inconclusive_mean: float
    projector_overlap_mean: float
    trials: int
    seed: int

    @property
    def second_try_unconditional_mean(self) -> float:
        """Mean probability of the accepted-second outcome."""
        return 1.0 - self.p_accept_mean - self.inconclusive_mean


CSV_HEADER = (
    "noise_level,image_label,template_label,filtered,p_accept_mean,"
    "p_accept_stderr,second_try_accept_mean,inconclusive_mean,trials,seed"
)


@dataclass
class SweepTable:
    """Sweep results over noise levels and all four image/template pairings."""

    rows: list[SweepRow]
    noise_levels: list[float]
    trials: int
    base_seed: int
    filtered: bool
    template_overlap: float
    labels: tuple[str, str] = ("A", "B")

    def cell(self, noise_level: float, image_label: str, template_label: str) -> SweepRow:
        for row in self.rows:
            if (
                row.noise_level == noise_level
                and row.image_label == image_label
                and row.template_label == template_label
            ):
                return row
        raise KeyError(f"no sweep cell ({noise_level}, {image_label}, {template_label})")

    def to_csv(self) -> str:
        """Locale-independent CSV (dot decimals, LF endings, repr floats)."""
        lines = [CSV_HEADER]
        for row in self.rows:
            lines.append(
                ",".join(
                    [
                        repr(row.noise_level),
                        row.image_label,
                        row.template_label,
                        "true" if row.filtered else "false",
                        repr(row.p_accept_mean),
                        repr(row.p_accept_stderr),
                        repr(row.second_try_accept_mean),
                        repr(row.inconclusive_mean),
                        str(row.trials),
                        str(row.seed),
                    ]
                )
            )
        return "\n".join(lines) + "\n"


@dataclass
class _CellStats:
    p_accept: list[float] = field(default_factory=list)
    second_try: list[float] = field(default_factory=list)
    inconclusive: list[float] = field(default_factory=list)
    projector_overlap: list[float] = field(default_factory=list)


def _sweep_trial(
    noisy: dict[str, BinaryImage],
    templates: dict[str, BinaryImage],
    ideal_states: dict[str, StateVector],
    options: MatchOptions,
) -> dict[tuple[str, str], tuple[float, float, float, float]]:
    """Evaluate all four combinations for one pair of noisy images."""
    out = {}
    labels = sorted(templates)
    for image_label in labels:
        _, prepared = prepare_point_state(noisy[image_label])
        for template_label in labels:
            other = labels[1] if template_label == labels[0] else labels[0]
            outcome = run_match(noisy[image_label], templates[template_label], options)
            if outcome.post_reject_state is None:
                p_second = 0.0
            else:
                p_second = run_second_hypothesis(
                    outcome, templates[template_label], templates[other]
                ).p_accept_second
            p_inconclusive = outcome.p_reject * (1.0 - p_second)
            proj = abs(ideal_states[template_label].inner_product(prepared)) ** 2
            out[(image_label, template_label)] = (
                outcome.p_accept,
                p_second,
                p_inconclusive,
                proj,
            )
    return out


def sweep_noise(
    image_a: BinaryImage,
    image_b: BinaryImage,
    template_a: BinaryImage,
    template_b: BinaryImage,
    noise_levels: list[float],
    trials: int,
    base_seed: int,
    options: MatchOptions = MatchOptions(),
) -> SweepTable:
    """Average exact acceptance statistics over noisy realizations.

    For every noise level, trial t flips pixels of both input images with the
    generator seeded by ``base_seed + t`` (the same seed stream couples the
    two inputs, which keeps curves comparable across levels) and runs all
    four image/template combinations plus the second-hypothesis retry.
    Parallelism over (level, trial) cells is capped by the QTEMPLATE_THREADS
    environment variable; results are independent of the worker count.
    """
    if trials < 1:
        raise ValueError("trials must be >= 1")
    templates = {"A": template_a, "B": template_b}
    images = {"A": image_a, "B": image_b}
    ideal_states = {label: prepare_point_state(tpl)[1] for label, tpl in templates.items()}

    def run_cell(level: float, trial: int):
        seed = base_seed + trial
        noisy = {label: invert_pixels(img, level, seed) for label, img in images.items()}
        return _sweep_trial(noisy, templates, ideal_states, options)

    cells = [(level, trial) for level in noise_levels for trial in range(trials)]
    workers = int(os.environ.get(THREADS_ENV_VAR, "1"))
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(lambda c: run_cell(*c), cells))
    else:
        results = [run_cell(*c) for c in cells]

    stats: dict[tuple[float, str, str], _CellStats] = {}
    for (level, _), outcome in zip(cells, results):
        for (image_label, template_label), values in outcome.items():
            cell = stats.setdefault((level, image_label, template_label), _CellStats())
            p_accept, p_second, p_inconclusive, proj = values
            cell.p_accept.append(p_accept)
            cell.second_try.append(p_second)
            cell.inconclusive.append(p_inconclusive)
            cell.projector_overlap.append(proj)

    rows = []
    for level in noise_levels:
        for image_label in ("A", "B"):
            for template_label in ("A", "B"):
                cell = stats[(level, image_label, template_label)]
                accept = np.asarray(cell.p_accept)
                stderr = (
                    float(accept.std(ddof=1) / np.sqrt(trials)) if trials > 1 else 0.0
                )
                rows.append(
                    SweepRow(
                        noise_level=level,
                        image_label=image_label,
                        template_label=template_label,
                        filtered=options.filter is not None,
                        p_accept_mean=float(accept.mean()),
                        p_accept_stderr=stderr,
                        second_try_accept_mean=float(np.mean(cell.second_try)),
                        inconclusive_mean=float(np.mean(cell.inconclusive)),
                        projector_overlap_mean=float(np.mean(cell.projector_overlap)),
                        trials=trials,
                        seed=base_seed,
                    )
                )
    return SweepTable(
        rows=rows,
        noise_levels=list(noise_levels),
        trials=trials,
        base_seed=base_seed,
        filtered=options.filter is not None,
        template_overlap=overlap_amplitude(template_a, template_b),
    )
