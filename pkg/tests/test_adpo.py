import numpy as np
import pytest

from boneline.adpo import (AdpoLineDetector, average_gradient, borrow_lines, gap_sweep,
                           optimize_min_line_length, sweep_to_csv)
from boneline.errors import ConfigError, EmptyInputError
from boneline.features import line_gradients_deg
from boneline.hough import HoughParams, detect_lines_exhaustive


def clutter_image():
    """Long horizontal bone runs plus 7-pixel vertical clutter columns.

    The clutter (euclidean length 6) survives minimum lengths up to 6 and
    vanishes at 7, so the average gradient jumps upward there: the planted
    optimum is 7 under both the signed and the absolute ranking.
    """
    edges = np.zeros((64, 64), dtype=np.uint8)
    edges[5, 10:51] = 255
    edges[25, 10:51] = 255
    for x in (10, 27, 44):
        edges[40:47, x] = 255
    return edges


ADPO_PARAMS = HoughParams(threshold=1, max_line_gap=13.0)


class TestAverageGradient:
    def test_all_vertical(self):
        segs = np.array([[3, 0, 3, 9], [7, 2, 7, 30]])
        assert average_gradient(segs) == 0.0

    def test_mixed_mean(self):
        segs = np.array([[0, 0, 0, 10], [0, 0, 10, 0]])
        assert average_gradient(segs) == pytest.approx(45.0)

    def test_matches_direct_summation(self):
        rng = np.random.default_rng(0)
        segs = rng.integers(0, 200, size=(20, 4))
        grads = line_gradients_deg(segs)
        assert average_gradient(segs) == pytest.approx(sum(grads) / len(grads), abs=1e-9)

    def test_empty_rejected(self):
        with pytest.raises(EmptyInputError):
            average_gradient(np.empty((0, 4)))


class TestOptimize:
    def test_planted_jump_signed(self):
        sweep = optimize_min_line_length(clutter_image(), ADPO_PARAMS, seed=7)
        assert sweep.chosen == 7

    def test_planted_jump_absolute(self):
        sweep = optimize_min_line_length(clutter_image(), ADPO_PARAMS, seed=7, absolute=True)
        assert sweep.chosen == 7

    def test_planted_jump_exhaustive_both_variants(self):
        for absolute in (False, True):
            sweep = optimize_min_line_length(clutter_image(), ADPO_PARAMS,
                                             absolute=absolute, exhaustive=True)
            assert sweep.chosen == 7

    def test_sweep_shape(self):
        sweep = optimize_min_line_length(clutter_image(), ADPO_PARAMS, seed=7)
        assert sweep.l_min_values == list(range(1, 26))
        assert len(sweep.line_sets) == 25
        assert len(sweep.deltas) == 24

    def test_degenerate_tie_gives_two(self):
        # a single long vertical run never changes across the sweep
        edges = np.zeros((64, 64), dtype=np.uint8)
        edges[5:55, 30] = 255
        sweep = optimize_min_line_length(edges, ADPO_PARAMS, seed=0)
        assert np.allclose(sweep.deltas, 0.0)
        assert sweep.chosen == 2

    def test_fixed_gap_default_is_13(self):
        sweep = optimize_min_line_length(clutter_image(), seed=7)
        assert sweep.chosen == 7  # default base carries max_line_gap=13

    def test_zero_line_steps_carry_forward_with_warning(self):
        # one faint run that disappears early in the sweep
        edges = np.zeros((64, 64), dtype=np.uint8)
        edges[10:14, 5] = 255  # euclidean length 3
        with pytest.warns(UserWarning):
            sweep = optimize_min_line_length(edges, ADPO_PARAMS, seed=0)
        avg3 = sweep.avg_gradients[2]
        assert (sweep.avg_gradients[3:] == avg3).all()

    def test_threshold_must_be_one(self):
        with pytest.raises(ConfigError):
            optimize_min_line_length(clutter_image(), HoughParams(threshold=10), seed=0)

    def test_chosen_in_range(self):
        rng = np.random.default_rng(1)
        edges = np.zeros((64, 64), dtype=np.uint8)
        ys, xs = rng.integers(5, 59, size=(2, 40))
        edges[ys, xs] = 255
        sweep = optimize_min_line_length(edges, ADPO_PARAMS, seed=1)
        assert 2 <= sweep.chosen <= 25

    def test_exhaustive_subset_sanity(self):
        # with the deterministic detector on the clean clutter image, raising
        # the minimum length never adds lines
        sweep = optimize_min_line_length(clutter_image(), ADPO_PARAMS, exhaustive=True)
        sets = [set(map(tuple, s.tolist())) for s in sweep.line_sets]
        for smaller, larger in zip(sets[1:], sets[:-1]):
            assert smaller <= larger


class TestBorrow:
    def test_clamps_at_one(self):
        sweep = optimize_min_line_length(clutter_image(), ADPO_PARAMS, seed=7)
        sweep.chosen = 2
        borrowed = borrow_lines(sweep)
        union_12 = {tuple(r) for s in sweep.line_sets[:2] for r in s.tolist()}
        assert {tuple(r) for r in borrowed.tolist()} == union_12

    def test_identical_sets_dedupe(self):
        sweep = optimize_min_line_length(clutter_image(), ADPO_PARAMS, seed=7)
        base = sweep.line_sets[0]
        sweep.line_sets = [base.copy() for _ in sweep.line_sets]
        sweep.chosen = 5
        assert len(borrow_lines(sweep)) == len(base)

    def test_set_union_first_seen_order(self):
        a, b, c, d = (0, 0, 0, 9), (1, 0, 1, 9), (2, 0, 2, 9), (3, 0, 3, 9)
        sweep = optimize_min_line_length(clutter_image(), ADPO_PARAMS, seed=7)
        sweep.chosen = 4
        sweep.line_sets[3] = np.array([a, b])  # l_min 4
        sweep.line_sets[2] = np.array([b, c])  # l_min 3
        sweep.line_sets[1] = np.array([c, d])  # l_min 2
        assert borrow_lines(sweep).tolist() == [list(a), list(b), list(c), list(d)]

    def test_superset_and_no_duplicates(self):
        sweep = optimize_min_line_length(clutter_image(), ADPO_PARAMS, seed=7)
        borrowed = borrow_lines(sweep)
        tuples = [tuple(r) for r in borrowed.tolist()]
        assert len(tuples) == len(set(tuples))
        chosen_set = {tuple(r) for r in sweep.lines_for(sweep.chosen).tolist()}
        assert chosen_set <= set(tuples)


def test_gap_sweep_diagnostic():
    counts = gap_sweep(clutter_image(), ADPO_PARAMS, gaps=range(10, 21), seed=7)
    assert sorted(counts) == list(range(10, 21))
    assert all(v >= 0 for v in counts.values())


def test_sweep_csv_format():
    sweep = optimize_min_line_length(clutter_image(), ADPO_PARAMS, seed=7)
    text = sweep_to_csv(sweep)
    lines = text.strip().splitlines()
    assert lines[0] == "l_min,num_lines,avg_gradient_deg,delta_avg_gradient_deg,chosen"
    assert len(lines) == 26
    chosen_rows = [l for l in lines[1:] if l.endswith(",1")]
    assert len(chosen_rows) == 1
    assert chosen_rows[0].startswith("7,")


def test_estimator_transform():
    det = AdpoLineDetector(seed=7)
    borrowed = det.fit(None).transform(clutter_image())
    assert len(borrowed) > 0
    assert det.sweep_.chosen == 7
