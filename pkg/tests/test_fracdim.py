import logging

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from hypothesis.extra.numpy import arrays

from stpetersburg import fracdim as fd
from stpetersburg import game, ifs
from stpetersburg.game import SampledPath


@pytest.fixture(scope="module")
def attractor_points():
    return ifs.chaos_game(10**6, 314159).points


@pytest.fixture(scope="module")
def y_path():
    m = 20
    return game.y_path_approx(game.simulate_partial_sums(2**m, seed=1000), m)


class TestBoxCount:
    def test_single_point(self):
        assert fd.box_count([[0.3, 0.7]], 2.0**-5) == 1

    def test_unit_interval(self):
        assert fd.box_count(np.linspace(0, 1, 1001), 1 / 16) == 17

    def test_diagonal(self):
        t = np.linspace(0, 1, 10**4)
        n = fd.box_count(np.column_stack([t, t]), 2.0**-6)
        assert 64 <= n <= 129

    def test_negative_coordinates(self):
        assert fd.box_count([[-0.1, -0.1], [0.1, 0.1]], 0.25) == 2

    def test_rejects_empty(self):
        with pytest.raises(ValueError):
            fd.box_count(np.empty((0, 2)), 0.1)

    def test_rejects_nonpositive_delta(self):
        with pytest.raises(ValueError):
            fd.box_count([[0.0, 0.0]], 0.0)

    @settings(max_examples=50, deadline=None)
    @given(arrays(np.float64, (200, 2), elements=st.floats(-2, 2)), st.integers(0, 8))
    def test_refinement_bounds(self, pts, j):
        coarse = fd.box_count(pts, 2.0**-j)
        fine = fd.box_count(pts, 2.0**-(j + 1))
        assert coarse <= fine <= 4 * coarse

    @settings(max_examples=50, deadline=None)
    @given(arrays(np.float64, 300, elements=st.floats(0, 1)), st.integers(0, 10))
    def test_refinement_bounds_1d(self, pts, j):
        coarse = fd.box_count(pts, 2.0**-j)
        assert coarse <= fd.box_count(pts, 2.0**-(j + 1)) <= 2 * coarse


class TestEstimate:
    def test_segment(self):
        t = np.linspace(0, 1, 2**21)
        rep = fd.box_dimension_estimate(np.column_stack([t, 0.5 * t]), 4, 10)
        assert rep.slope == pytest.approx(1.0, abs=0.05)

    def test_square(self):
        g = (np.arange(2**10) + 0.5) / 2**10
        xx, yy = np.meshgrid(g, g)
        rep = fd.box_dimension_estimate(np.column_stack([xx.ravel(), yy.ravel()]), 4, 10)
        assert rep.slope == pytest.approx(2.0, abs=0.05)
        assert rep.r_squared == pytest.approx(1.0)

    def test_degenerate(self):
        with pytest.raises(ValueError):
            fd.box_dimension_estimate([[0.1, 0.1]], 2, 6)

    def test_bad_window(self):
        with pytest.raises(ValueError):
            fd.box_dimension_estimate([[0.1, 0.1]], 6, 6)

    def test_sparse_warning(self, caplog):
        t = np.linspace(0, 1, 1000)
        with caplog.at_level(logging.WARNING, logger="stpetersburg"):
            fd.box_dimension_estimate(np.column_stack([t, t]), 2, 8)
        assert "fine-scale counts" in caplog.text

    def test_report_fields(self):
        t = np.linspace(0, 1, 2**16)
        rep = fd.box_dimension_estimate(t, 2, 8)
        assert list(rep.j) == list(range(2, 9))
        np.testing.assert_array_equal(rep.scales, 2.0 ** -rep.j)
        assert rep.slope_stderr >= 0


class TestWindows:
    """Fits over shifted or halved windows of the same counts."""

    @pytest.mark.parametrize("kind", ["attractor", "graph", "range"])
    def test_double_delta_grid_agrees(self, kind, attractor_points, y_path):
        pts = {"attractor": attractor_points, "graph": fd.graph_points(y_path),
               "range": fd.range_points(y_path)}[kind]
        rep = fd.box_dimension_estimate(pts, 3, 10)
        assert abs(rep.refit(4, 10).slope - rep.refit(3, 9).slope) <= 0.05

    @pytest.mark.parametrize("kind", ["attractor", "graph", "range"])
    def test_half_windows_bracket_full_fit(self, kind, attractor_points, y_path):
        pts = {"attractor": attractor_points, "graph": fd.graph_points(y_path),
               "range": fd.range_points(y_path)}[kind]
        rep = fd.box_dimension_estimate(pts, 4, 10)
        a, b = rep.refit(4, 7).slope, rep.refit(7, 10).slope
        assert min(a, b) - rep.slope_stderr <= rep.slope <= max(a, b) + rep.slope_stderr

    def test_attractor_log_corrected_slope(self, attractor_points):
        rep = fd.box_dimension_estimate(attractor_points, 4, 10)
        assert fd.log_corrected_slope(rep) == pytest.approx(1.0, abs=0.02)


class TestSojourn:
    def test_flat_path(self):
        path = SampledPath(np.array([0.25, 0.5, 0.75, 1.0]), np.zeros(4), (0.0, 1.0))
        assert fd.sojourn_time(path, 0.5) == 0.5
        assert fd.sojourn_time(path, 0.0) == 0.0
        assert fd.sojourn_time(path, 2.0) == 1.0

    def test_offset_path(self):
        path = SampledPath(np.array([0.25, 0.5, 0.75, 1.0]), np.full(4, 0.6), (0.0, 1.0))
        assert fd.sojourn_time(path, 0.5) == 0.0

    def test_nonuniform_rejected(self):
        path = SampledPath(np.array([0.25, 0.5, 1.0]), np.zeros(3), (0.0, 1.0))
        with pytest.raises(ValueError):
            fd.sojourn_time(path, 0.5)

    def test_experiment_matches_direct_count(self):
        grid = [0.5, 0.25, 0.125]
        est = fd.sojourn_bound_experiment(8, 3, grid, seed=4)
        for k, a in enumerate(grid):
            direct = [fd.sojourn_time(game.x_path_approx(game.simulate_partial_sums(256, seed=4, replica=i),
                                                         8, full=True), a) for i in range(3)]
            assert est[k].mean_time == pytest.approx(np.mean(direct), abs=1e-15)

    def test_experiment_shape(self):
        est = fd.sojourn_bound_experiment(10, 40, [2.0**-i for i in range(1, 6)], seed=2)
        times = [e.mean_time for e in est]
        assert times == sorted(times, reverse=True)
        assert all(0 <= t <= e.a for t, e in zip(times, est))
        assert all(e.ratio > 0 for e in est)

    def test_rejects_bad_radius(self):
        with pytest.raises(ValueError):
            fd.sojourn_bound_experiment(6, 2, [0.0], seed=1)


class TestPathPoints:
    def test_graph_and_range(self, y_path):
        assert fd.graph_points(y_path).shape == (len(y_path), 2)
        assert fd.range_points(y_path).shape == (len(y_path),)

    def test_path_dimension_slopes(self):
        reps = fd.path_dimension_slopes(12, [1, 2], "range", 2, 6)
        assert len(reps) == 2 and all(np.isfinite(r.slope) for r in reps)
