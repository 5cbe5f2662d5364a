import csv
import io
import math

import numpy as np
import pytest

from fanoband.classify import build_estimated_map, evaluate
from fanoband.cube import GroundTruth, HyperCube, random_split
from fanoband.infotheory import entropy, histogram1d, pe_score, SymbolSequence
from fanoband.selection import (SelectionConfig, mi_curve, mi_ranking,
                                ranking_to_csv, sweep_to_csv, sweep_to_long_csv,
                                threshold_sweep, trace_to_csv, wrapper_select)


@pytest.fixture(scope="module")
def scene(small_scene):
    cube, gt, roles = small_scene
    return cube, gt, roles, random_split(gt, 0.5, seed=0)


def perfect_cube():
    """One band that exactly encodes the class, one constant band."""
    rng = np.random.default_rng(6)
    labels = 1 + rng.integers(0, 3, size=(10, 10))
    data = np.stack([labels * 100, np.full((10, 10), 7)])
    return HyperCube(data), GroundTruth(labels, 3)


class TestMiRanking:
    def test_perfect_band_first_constant_last(self):
        cube, gt = perfect_cube()
        ranking = mi_ranking(cube, gt, 256)
        assert ranking[0][0] == 0
        labeled = gt.labeled_indices()
        h_c = entropy(histogram1d(SymbolSequence(gt.labels.ravel()[labeled],
                                                 gt.n_classes + 1)))
        assert ranking[0][1] == pytest.approx(h_c, abs=1e-12)
        assert ranking[-1] == (1, 0.0)

    def test_informative_bands_outrank_noise(self, scene):
        cube, gt, roles, _ = scene
        ranking = dict(mi_ranking(cube, gt, 256))
        informative = [ranking[r.band] for r in roles if r.role == "informative"]
        noise = [ranking[r.band] for r in roles if r.role == "noise"]
        assert min(informative) > max(noise)

    def test_dimension_mismatch(self, scene):
        cube, _, _, _ = scene
        bad_gt = GroundTruth(np.ones((3, 3), dtype=int), 2)
        with pytest.raises(ValueError, match="spatial dimensions"):
            mi_ranking(cube, bad_gt, 16)

    def test_mi_curve_self_reference_ranks_that_band_first(self, scene):
        cube, _, _, _ = scene
        from fanoband.cube import quantize_band
        reference = quantize_band(cube, 2, 64)
        curve = mi_curve(cube, reference, 64)
        assert curve[0][0] == 2

    def test_band_average_reference_tracks_ground_truth_ranking(self):
        # the dashed-curve surrogate: MI against a mean-of-informative-bands
        # reference should rank-correlate with the MI against the real map
        from scipy.stats import spearmanr

        from fanoband.cube import SynthSpec, approximate_gt, quantize_map, synth_cube
        cube, gt, _ = synth_cube(SynthSpec(
            n_classes=5, rows=40, cols=40, informative_bands=6,
            copies_per_informative=0, noise_bands=6, noise_level=0.5, seed=31))
        gt_curve = dict(mi_ranking(cube, gt, 64))
        reference = quantize_map(approximate_gt(cube, 0, 5), 64)
        approx_curve = dict(mi_curve(cube, reference, 64))
        bands = sorted(gt_curve)
        rho = spearmanr([gt_curve[b] for b in bands],
                        [approx_curve[b] for b in bands]).statistic
        assert rho > 0.5


class TestWrapperSelect:
    def test_duplicate_perfect_bands_keep_only_one(self):
        labels = 1 + (np.arange(64) % 4).reshape(8, 8)
        band = labels * 50
        cube = HyperCube(np.stack([band, band, band, band]))
        gt = GroundTruth(labels, 4)
        split = random_split(gt, 0.5, seed=1)
        trace = wrapper_select(cube, gt, split,
                               SelectionConfig(threshold=0.001, max_bands=4))
        assert trace.selected == [0]
        assert trace.steps[0].pe_after == 0.0
        assert [s.accepted for s in trace.steps] == [True, False, False, False]

    def test_trace_partitions_examined_bands(self, scene):
        cube, gt, _, split = scene
        trace = wrapper_select(cube, gt, split,
                               SelectionConfig(threshold=0.005, max_bands=cube.bands))
        examined = {s.band for s in trace.steps}
        assert set(trace.selected) | set(trace.rejected) == examined
        assert not (set(trace.selected) & set(trace.rejected))

    def test_accepted_scores_drop_by_at_least_threshold(self, scene):
        cube, gt, _, split = scene
        th = 0.005
        trace = wrapper_select(cube, gt, split,
                               SelectionConfig(threshold=th, max_bands=cube.bands))
        accepted = [s.pe_after for s in trace.steps if s.accepted]
        for prev, cur in zip(accepted, accepted[1:]):
            assert cur <= prev - th

    def test_threshold_nesting_cardinality(self, scene):
        cube, gt, _, split = scene
        ranking = mi_ranking(cube, gt, 256)
        sizes = []
        for th in (0.0, 0.005, 0.02):
            trace = wrapper_select(cube, gt, split,
                                   SelectionConfig(threshold=th,
                                                   max_bands=cube.bands),
                                   ranking=ranking)
            sizes.append(len(trace.selected))
        assert sizes[0] >= sizes[1] >= sizes[2]

    def test_sufficiently_negative_threshold_degenerates_to_filter(self, scene):
        cube, gt, _, split = scene
        labeled = gt.labeled_indices()
        h_c = entropy(histogram1d(SymbolSequence(gt.labels.ravel()[labeled],
                                                 gt.n_classes + 1)))
        th = -pe_score(h_c, gt.n_classes)
        ranking = mi_ranking(cube, gt, 256)
        trace = wrapper_select(cube, gt, split,
                               SelectionConfig(threshold=th, max_bands=5),
                               ranking=ranking)
        assert trace.selected == [b for b, _ in ranking[:5]]

    def test_minus_infinity_reduces_to_mi_ranking(self, scene):
        cube, gt, _, split = scene
        ranking = mi_ranking(cube, gt, 256)
        trace = wrapper_select(cube, gt, split,
                               SelectionConfig(threshold=-math.inf,
                                               max_bands=cube.bands),
                               ranking=ranking)
        assert trace.selected == [b for b, _ in ranking]
        assert trace.rejected == []

    def test_explicit_initial_pe_gates_the_first_band(self, scene):
        cube, gt, _, split = scene
        trace = wrapper_select(cube, gt, split,
                               SelectionConfig(threshold=0.1, max_bands=3,
                                               initial_pe=0.0))
        assert trace.selected == []
        assert len(trace.steps) == cube.bands
        assert not any(s.accepted for s in trace.steps)

    def test_deterministic_trace(self, scene):
        cube, gt, _, split = scene
        config = SelectionConfig(threshold=0.01, max_bands=6)
        a = wrapper_select(cube, gt, split, config)
        b = wrapper_select(cube, gt, split, config)
        assert a == b

    def test_max_bands_validated(self, scene):
        cube, gt, _, split = scene
        with pytest.raises(ValueError, match="max bands"):
            SelectionConfig(threshold=0.0, max_bands=0)
        with pytest.raises(ValueError, match="exceeds band count"):
            wrapper_select(cube, gt, split,
                           SelectionConfig(threshold=0.0,
                                           max_bands=cube.bands + 1))


class TestThresholdSweep:
    def test_single_cell(self, scene):
        cube, gt, _, split = scene
        table = threshold_sweep(cube, gt, split, [0.0], [1])
        assert set(table.cells) == {(0.0, 1)}
        assert table.cells[(0.0, 1)] is not None

    def test_unreached_checkpoint_stays_empty(self, scene):
        cube, gt, _, split = scene
        # a huge threshold admits only the unconditional first band
        table = threshold_sweep(cube, gt, split, [10.0], [1, 5])
        assert table.cells[(10.0, 1)] is not None
        assert table.cells[(10.0, 5)] is None
        csv_text = sweep_to_csv(table)
        lines = csv_text.strip().split("\n")
        assert lines[0] == "bands_retained,10.0"
        assert lines[2] == "5,"
        long_lines = sweep_to_long_csv(table).strip().split("\n")
        assert len(long_lines) == 2  # header plus the single realized point

    def test_table_shape(self, scene):
        cube, gt, _, split = scene
        table = threshold_sweep(cube, gt, split, [0.0, 0.01], [1, 2])
        assert len(table.cells) == 4
        text = sweep_to_csv(table)
        rows = list(csv.reader(io.StringIO(text)))
        assert rows[0] == ["bands_retained", "0.0", "0.01"]
        assert len(rows) == 3

    def test_input_validation(self, scene):
        cube, gt, _, split = scene
        with pytest.raises(ValueError, match="no thresholds"):
            threshold_sweep(cube, gt, split, [], [1])
        with pytest.raises(ValueError, match="checkpoints"):
            threshold_sweep(cube, gt, split, [0.0], [0])


class TestSerializers:
    def test_ranking_csv_orders(self, scene):
        cube, gt, _, _ = scene
        ranking = mi_ranking(cube, gt, 64)
        by_band = ranking_to_csv(ranking, "band").strip().split("\n")
        assert by_band[0] == "band,mi_bits"
        assert [int(line.split(",")[0]) for line in by_band[1:]] == list(range(cube.bands))
        by_rank = ranking_to_csv(ranking, "rank").strip().split("\n")
        mis = [float(line.split(",")[1]) for line in by_rank[1:]]
        assert mis == sorted(mis, reverse=True)
        with pytest.raises(ValueError, match="unknown ordering"):
            ranking_to_csv(ranking, "mi")

    def test_trace_csv_round_trip(self, scene):
        cube, gt, _, split = scene
        trace = wrapper_select(cube, gt, split,
                               SelectionConfig(threshold=0.01, max_bands=4))
        text = trace_to_csv(trace)
        rows = list(csv.reader(io.StringIO(text)))
        assert rows[0] == ["step", "band", "mi_bits", "pe", "accepted"]
        assert len(rows) == len(trace.steps) + 1
        parsed = [(int(r[0]), int(r[1]), float(r[2]), float(r[3]), r[4] == "true")
                  for r in rows[1:]]
        for row, step in zip(parsed, trace.steps):
            assert row == (step.step, step.band, step.mi_bits,
                           step.pe_after, step.accepted)
