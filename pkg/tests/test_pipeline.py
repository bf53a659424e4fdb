import numpy as np
import pytest

from qtemplate.circuit_ops import FilterSpec, iteration_count
from qtemplate.errors import PostSelectionImpossibleError
from qtemplate.fixtures import quadrant
from qtemplate.image_io import BinaryImage
from qtemplate.pipeline import (
    CSV_HEADER,
    MatchOptions,
    overlap_probability,
    run_match,
    run_second_hypothesis,
    sweep_noise,
)

from conftest import random_image
from dense_oracles import (
    dense_match_pipeline,
    grover_matrix,
    hadamard_all,
    point_state_vector,
)


def make_image(width, height, points):
    pixels = np.zeros((height, width), dtype=bool)
    for x, y in points:
        pixels[y, x] = True
    return BinaryImage(pixels)


class TestRunMatch:
    def test_exact_rotation_quadrant(self):
        image = quadrant(16)
        outcome = run_match(image, image)
        assert outcome.p_accept == pytest.approx(1.0, abs=1e-9)
        assert outcome.p_reflect == 0.25
        assert outcome.p_filter == 1.0
        assert outcome.post_reject_state is None

    def test_identical_images_closed_form(self):
        # Rotation geometry: p_accept = sin^2((2R - 1) * theta) with
        # sin(theta) = sqrt(M/N), exact for image == template.
        for seed in range(8):
            image = random_image(4, 4, seed=seed, fill=0.4)
            m = image.point_count
            theta = np.arcsin(np.sqrt(m / 16))
            rounds = iteration_count(16, m)
            expected = np.sin((2 * rounds - 1) * theta) ** 2
            outcome = run_match(image, image)
            assert outcome.p_accept == pytest.approx(expected, abs=1e-9)
            assert outcome.iterations == rounds

    def test_disjoint_exact_rotation_rejects(self):
        template = quadrant(16)
        shifted = BinaryImage(np.roll(template.pixels, 8, axis=0))
        assert overlap_probability(shifted, template) == 0.0
        outcome = run_match(shifted, template)
        assert outcome.p_accept == pytest.approx(0.0, abs=1e-9)

    def test_dimension_mismatch(self):
        with pytest.raises(ValueError):
            run_match(random_image(4, 4, seed=0), random_image(8, 8, seed=0))

    def test_empty_template_rejected(self):
        image = random_image(4, 4, seed=1)
        with pytest.raises(ValueError):
            run_match(image, BinaryImage(np.zeros((4, 4), dtype=bool)))

    def test_branch_probability_conservation(self):
        image = random_image(8, 8, seed=2)
        template = random_image(8, 8, seed=3)
        outcome = run_match(image, template, MatchOptions(filter=FilterSpec(k_max=2.5)))
        total = (
            (1 - outcome.p_reflect)
            + outcome.p_reflect * (1 - outcome.p_filter)
            + outcome.p_reflect * outcome.p_filter * (outcome.p_accept + outcome.p_reject)
        )
        assert total == pytest.approx(1.0, abs=1e-9)
        for p in (outcome.p_reflect, outcome.p_filter, outcome.p_accept):
            assert 0.0 <= p <= 1.0

    def test_no_filter_equals_trivial_filter(self):
        # Skipping the transform stage and applying an all-pass filter are
        # the same code path result.
        image = random_image(8, 8, seed=4)
        template = random_image(8, 8, seed=5)
        plain = run_match(image, template)
        allpass = run_match(
            image, template, MatchOptions(filter=FilterSpec(k_max=1e9, remove_dc=False))
        )
        assert plain.p_filter == 1.0
        assert allpass.p_filter == pytest.approx(1.0, abs=1e-12)
        assert plain.p_accept == pytest.approx(allpass.p_accept, abs=1e-12)
        if plain.post_reject_state is not None:
            assert (
                np.max(
                    np.abs(
                        plain.post_reject_state.amplitudes
                        - allpass.post_reject_state.amplitudes
                    )
                )
                < 1e-12
            )

    @pytest.mark.parametrize("with_filter", [False, True])
    def test_dense_pipeline_equivalence(self, with_filter):
        rng = np.random.default_rng(6)
        for trial in range(10):
            image = random_image(4, 4, seed=100 + trial, fill=0.45)
            template = random_image(4, 4, seed=200 + trial, fill=0.45)
            k_max = 2.3 if with_filter else None
            options = MatchOptions(
                filter=FilterSpec(k_max=k_max) if with_filter else None
            )
            expected, _ = dense_match_pipeline(image, template, k_max=k_max)
            outcome = run_match(image, template, options)
            assert outcome.p_accept == pytest.approx(abs(expected[0]) ** 2, abs=1e-10)


class TestOverlapProbability:
    def test_identical(self):
        image = random_image(4, 4, seed=7)
        assert overlap_probability(image, image) == pytest.approx(1.0)

    def test_disjoint(self):
        a = make_image(4, 4, [(0, 0)])
        b = make_image(4, 4, [(3, 3)])
        assert overlap_probability(a, b) == 0.0

    def test_half_overlap(self):
        a = make_image(4, 4, [(0, 0), (0, 1)])
        b = make_image(4, 4, [(0, 0)])
        assert overlap_probability(a, b) == pytest.approx(0.5)

    def test_no_points_rejected(self):
        a = make_image(4, 4, [(0, 0)])
        with pytest.raises(ValueError):
            overlap_probability(a, BinaryImage(np.zeros((4, 4), dtype=bool)))


class TestSecondHypothesis:
    def test_certain_acceptance_has_no_rejection_branch(self):
        image = quadrant(16)
        outcome = run_match(image, image)
        with pytest.raises(ValueError, match="certainty"):
            run_second_hypothesis(outcome, image, image)

    def test_dense_operator_chain(self):
        # The retry is the explicit product H (G_A)^{R_A} (G_B^-1)^{R_B} H
        # applied to the renormalized rejected branch.
        template_a = make_image(4, 4, [(0, 0), (1, 0), (0, 1)])
        template_b = make_image(4, 4, [(3, 3), (2, 3), (3, 2)])
        image = template_b
        outcome = run_match(image, template_a)
        assert outcome.post_reject_state is not None

        state = outcome.post_reject_state.amplitudes.copy()
        h_all = hadamard_all(4)
        state = h_all @ state
        forward_a = grover_matrix(4, template_a.point_indices(), "forward")
        for _ in range(iteration_count(16, 3)):
            state = forward_a @ state
        inverse_b = grover_matrix(4, template_b.point_indices(), "inverse")
        for _ in range(iteration_count(16, 3)):
            state = inverse_b @ state
        state = h_all @ state

        result = run_second_hypothesis(outcome, template_a, template_b)
        assert result.p_accept_second == pytest.approx(abs(state[0]) ** 2, abs=1e-10)

    def test_rejected_true_image_prefers_second_template(self):
        # Input B rejected under hypothesis A should often be accepted as B.
        template_a = quadrant(16)
        template_b = BinaryImage(np.roll(template_a.pixels, 8, axis=1))
        outcome = run_match(template_b, template_a)
        assert outcome.p_accept == pytest.approx(0.0, abs=1e-9)
        retry = run_second_hypothesis(outcome, template_a, template_b)
        assert retry.p_accept_second > 0.9

    def test_probability_tree_sums_to_one(self):
        image = random_image(8, 8, seed=8)
        template_a = random_image(8, 8, seed=9)
        template_b = random_image(8, 8, seed=10)
        outcome = run_match(image, template_a)
        retry = run_second_hypothesis(outcome, template_a, template_b)
        p1 = outcome.p_accept
        p2 = outcome.p_reject * retry.p_accept_second
        p3 = outcome.p_reject * (1 - retry.p_accept_second)
        assert p1 + p2 + p3 == pytest.approx(1.0, abs=1e-9)

    def test_sampled_classification(self):
        image = random_image(8, 8, seed=11)
        template_a = random_image(8, 8, seed=12)
        template_b = random_image(8, 8, seed=13)
        outcome = run_match(image, template_a)
        retry = run_second_hypothesis(outcome, template_a, template_b, sample_seed=5)
        assert retry.classification in ("accepted-second", "inconclusive")


class TestSampledMode:
    def test_deterministic_given_seed(self):
        image = random_image(4, 4, seed=14)
        template = random_image(4, 4, seed=15)
        first = run_match(image, template, MatchOptions(sample_seed=77))
        second = run_match(image, template, MatchOptions(sample_seed=77))
        assert first.sampled_outcome == second.sampled_outcome

    def test_exact_mode_has_no_sampled_outcome(self):
        image = random_image(4, 4, seed=16)
        assert run_match(image, image).sampled_outcome is None

    def test_acceptance_frequency_matches_exact_probability(self):
        image = random_image(4, 4, seed=17, fill=0.4)
        template = random_image(4, 4, seed=18, fill=0.4)
        exact = run_match(image, template)
        runs = 10_000
        accepted = completed = 0
        for seed in range(runs):
            outcome = run_match(image, template, MatchOptions(sample_seed=seed))
            if outcome.sampled_outcome in ("accepted", "rejected"):
                completed += 1
                accepted += outcome.sampled_outcome == "accepted"
        freq = accepted / completed
        sigma = np.sqrt(exact.p_accept * (1 - exact.p_accept) / completed)
        assert abs(freq - exact.p_accept) < 4 * sigma + 1e-9

    def test_branch_frequencies(self):
        image = random_image(4, 4, seed=19, fill=0.3)
        template = random_image(4, 4, seed=20, fill=0.3)
        options = MatchOptions(filter=FilterSpec(k_max=2.0))
        exact = run_match(image, template, options)
        runs = 4000
        outcomes = [
            run_match(image, template, MatchOptions(filter=options.filter, sample_seed=s)).sampled_outcome
            for s in range(runs)
        ]
        absorbed = outcomes.count("absorbed") / runs
        sigma = np.sqrt(exact.p_reflect * (1 - exact.p_reflect) / runs)
        assert abs(absorbed - (1 - exact.p_reflect)) < 4 * sigma + 1e-9


class TestSweep:
    def test_zero_noise_single_trial_matches_run_match(self, letter_a_64, letter_b_64):
        options = MatchOptions(filter=FilterSpec(k_max=8.0, remove_dc=False))
        table = sweep_noise(
            letter_a_64, letter_b_64, letter_a_64, letter_b_64,
            noise_levels=[0.0], trials=1, base_seed=0, options=options,
        )
        direct = run_match(letter_a_64, letter_b_64, options)
        cell = table.cell(0.0, "A", "B")
        assert cell.p_accept_mean == pytest.approx(direct.p_accept, abs=1e-12)
        assert cell.p_accept_stderr == 0.0

    def test_full_noise_is_complement(self):
        image_a = random_image(8, 8, seed=21, fill=0.4)
        image_b = random_image(8, 8, seed=22, fill=0.4)
        table = sweep_noise(
            image_a, image_b, image_a, image_b,
            noise_levels=[1.0], trials=1, base_seed=5,
        )
        direct = run_match(image_a.complement(), image_a)
        assert table.cell(1.0, "A", "A").p_accept_mean == pytest.approx(
            direct.p_accept, abs=1e-12
        )

    def test_deterministic_given_base_seed(self, letter_a_64, letter_b_64):
        kwargs = dict(noise_levels=[0.1], trials=3, base_seed=9)
        first = sweep_noise(letter_a_64, letter_b_64, letter_a_64, letter_b_64, **kwargs)
        second = sweep_noise(letter_a_64, letter_b_64, letter_a_64, letter_b_64, **kwargs)
        assert first.to_csv() == second.to_csv()

    def test_thread_count_does_not_change_results(self, letter_a_64, letter_b_64, monkeypatch):
        kwargs = dict(noise_levels=[0.05, 0.2], trials=2, base_seed=3)
        sequential = sweep_noise(letter_a_64, letter_b_64, letter_a_64, letter_b_64, **kwargs)
        monkeypatch.setenv("QTEMPLATE_THREADS", "4")
        parallel = sweep_noise(letter_a_64, letter_b_64, letter_a_64, letter_b_64, **kwargs)
        assert sequential.to_csv() == parallel.to_csv()

    def test_csv_header_and_shape(self, letter_a_64, letter_b_64):
        table = sweep_noise(
            letter_a_64, letter_b_64, letter_a_64, letter_b_64,
            noise_levels=[0.0, 0.1], trials=2, base_seed=1,
        )
        lines = table.to_csv().splitlines()
        assert lines[0] == CSV_HEADER
        assert len(lines) == 1 + 2 * 4  # header + levels x combinations
        assert table.to_csv().endswith("\n")

    def test_trials_must_be_positive(self, letter_a_64, letter_b_64):
        with pytest.raises(ValueError):
            sweep_noise(letter_a_64, letter_b_64, letter_a_64, letter_b_64,
                        noise_levels=[0.0], trials=0, base_seed=0)
