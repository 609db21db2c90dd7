import csv
import json
import math

import numpy as np
import pytest

from gaussfade import (
    ChannelMoments,
    DeterministicPdt,
    DomainError,
    MisuseError,
    moments_from_pdt,
)
from gaussfade.experiments import (
    SweepResult,
    displacement_contour,
    identity_suite,
    phase_region_map,
    squeezing_sweep,
)

M_16 = ChannelMoments(t_a=0.398, t_b=0.398, t_a2=0.163, t_b2=0.163, t_ab=0.158404)
M_144 = ChannelMoments(t_a=0.027, t_b=0.027, t_a2=0.001, t_b2=0.001, t_ab=0.000729)
M_16_CORR = ChannelMoments(t_a=0.398, t_b=0.398, t_a2=0.163, t_b2=0.163, t_ab=0.163)
M_144_CORR = ChannelMoments(t_a=0.027, t_b=0.027, t_a2=0.001, t_b2=0.001, t_ab=0.001)
GAMMA09 = ChannelMoments(t_a=0.9, t_b=0.9, t_a2=0.9, t_b2=0.9, t_ab=0.81)


class TestSqueezingSweep:
    @pytest.mark.parametrize("m", [M_16, M_144], ids=["1p6km", "144km"])
    def test_boundary_at_artanh_gamma(self, m):
        res = squeezing_sweep(m, n_points=101)
        assert res.metadata["range_verdict"] == "boundary found"
        assert len(res.boundary) == 1
        entry = res.boundary[0]
        gamma = m.t_ab / math.sqrt(m.t_a2 * m.t_b2)
        assert entry["xi_star"] == pytest.approx(math.atanh(gamma), abs=1e-6)
        # bracketing invariant: the root lies in its bracket and the bracket
        # endpoints carry opposite signs
        assert entry["bracket_lo"] <= entry["xi_star"] <= entry["bracket_hi"]
        assert (entry["w_lo"] < 0.0) != (entry["w_hi"] < 0.0)

    def test_deterministic_channel_entangled_everywhere(self):
        m = moments_from_pdt(DeterministicPdt(0.5, 0.5))
        res = squeezing_sweep(m, n_points=101)
        assert res.boundary == []
        assert res.metadata["range_verdict"] == "entangled on full range"
        xi = res.axes["xi"]
        assert np.all(res.values[xi > 0] < 0.0)
        assert res.values[0] == 0.0  # vacuum endpoint sits on the boundary

    def test_term_columns_present_and_consistent(self):
        res = squeezing_sweep(M_16, n_points=21)
        total = (
            res.columns["term_loss"]
            + res.columns["term_N"]
            + res.columns["term_F"]
            + res.columns["term_S"]
        )
        assert np.allclose(total, res.values, rtol=1e-10, atol=1e-12)

    def test_displacement_moves_boundary_left(self):
        # Displacement never decreases the witness on uncorrelated channels,
        # so the entangled-to-separable crossing can only move to smaller xi.
        plain = squeezing_sweep(M_144, n_points=101)
        shifted = squeezing_sweep(M_144, n_points=101, displacement=(2.0 + 1.0j, -1.0j))
        if shifted.boundary:
            assert shifted.boundary[0]["xi_star"] <= plain.boundary[0]["xi_star"] + 1e-8
        else:
            assert shifted.metadata["range_verdict"] == "no entanglement anywhere"

    def test_rerun_bit_identical(self, tmp_path):
        p1, p2 = tmp_path / "a.csv", tmp_path / "b.csv"
        squeezing_sweep(M_16, n_points=31, seed=3).to_csv(p1)
        squeezing_sweep(M_16, n_points=31, seed=3).to_csv(p2)
        assert p1.read_bytes() == p2.read_bytes()

    def test_csv_round_trip(self, tmp_path):
        res = squeezing_sweep(M_144, n_points=21)
        path = tmp_path / "sweep.csv"
        res.to_csv(path)
        with open(path, newline="") as fh:
            rows = list(csv.reader(fh))
        assert rows[0] == ["xi", "w_atm", "term_loss", "term_N", "term_F", "term_S"]
        got = np.array([float(r[1]) for r in rows[1:]])
        assert np.array_equal(got, res.values)

    def test_domain_errors(self):
        with pytest.raises(DomainError, match="xi range"):
            squeezing_sweep(M_16, xi_range=(2.0, 1.0))
        with pytest.raises(DomainError, match="xi range"):
            squeezing_sweep(M_16, xi_range=(-1.0, 2.0))
        with pytest.raises(DomainError, match="two grid points"):
            squeezing_sweep(M_16, n_points=1)

    def test_metadata_records_spec(self):
        res = squeezing_sweep(M_16, n_points=21, seed=7)
        md = res.metadata
        assert md["seed"] == 7
        assert md["channel"]["t_ab"] == M_16.t_ab
        assert md["gamma"] == pytest.approx(0.158404 / 0.163, rel=1e-12)
        assert md["spot_checked"] >= 1
        json.dumps(md)  # serializable as-is


class TestDisplacementContour:
    def test_symmetric_splitter_gives_circle(self):
        res = displacement_contour(GAMMA09, xi=1.0, t2=0.5, n_rays=16, n_radial=200, r_max=8.0)
        radii = [b["radius"] for b in res.boundary]
        assert len(radii) == 16
        assert max(radii) - min(radii) < 1e-6

    def test_asymmetric_splitter_gives_ellipse(self):
        res = displacement_contour(GAMMA09, xi=1.0, t2=0.95, n_rays=16, n_radial=200, r_max=8.0)
        radii = [b["radius"] for b in res.boundary]
        assert len(radii) == 16
        assert max(radii) > min(radii) + 1e-3

    def test_unbounded_rays_reported_not_fatal(self):
        # With a tiny r_max no ray reaches the boundary: all rays unbounded.
        res = displacement_contour(GAMMA09, xi=1.0, t2=0.5, n_rays=4, n_radial=50, r_max=0.5)
        assert res.boundary == []
        assert len(res.metadata["unbounded_rays"]) == 4

    def test_grid_validation(self):
        with pytest.raises(DomainError):
            displacement_contour(GAMMA09, n_rays=0)
        with pytest.raises(DomainError):
            displacement_contour(GAMMA09, r_max=0.0)


class TestPhaseRegionMap:
    def test_needs_perfectly_correlated_channel(self):
        with pytest.raises(MisuseError, match="correlated"):
            phase_region_map(M_16)
        with pytest.raises(DomainError):
            phase_region_map(M_16_CORR, total_power=0.0)

    def test_zero_amplitude_edges_constant_in_phase(self):
        res = phase_region_map(M_16_CORR, xi=0.5, total_power=50.0, n_power=11, n_phase=17)
        w = res.columns["w_atm"]
        # alpha^2 = 0: all displacement sits in mode b; the TMSV blocks are
        # diagonal so a single-mode displacement enters only through |beta|^2.
        assert np.ptp(w[0, :]) <= 1e-9 * max(1.0, np.max(np.abs(w[0, :])))
        # alpha^2 = total power: all displacement sits in mode a.
        assert np.ptp(w[-1, :]) <= 1e-9 * max(1.0, np.max(np.abs(w[-1, :])))

    def test_duan_overlay_channel_independent(self):
        a = phase_region_map(M_16_CORR, xi=0.5, total_power=50.0, n_power=9, n_phase=9)
        b = phase_region_map(M_144_CORR, xi=0.5, total_power=50.0, n_power=9, n_phase=9)
        assert np.array_equal(a.columns["duan_persistent"], b.columns["duan_persistent"])
        assert np.array_equal(a.columns["persistent"], b.columns["persistent"])
        # the Simon map itself does depend on the channel
        assert not np.array_equal(a.columns["w_atm"], b.columns["w_atm"])

    def test_verdict_column_matches_sign(self):
        res = phase_region_map(M_16_CORR, xi=0.5, total_power=20.0, n_power=7, n_phase=7)
        w = res.columns["w_atm"]
        assert np.array_equal(res.columns["entangled"], (w < 0.0).astype(int))


class TestSweepResultContainer:
    def test_column_shape_validation(self):
        with pytest.raises(MisuseError, match="shape"):
            SweepResult(axes={"x": np.arange(3.0)}, columns={"w_atm": np.zeros(4)})

    def test_boundary_csv_union_of_keys(self, tmp_path):
        res = SweepResult(
            axes={"x": np.arange(2.0)},
            columns={"w_atm": np.zeros(2)},
            boundary=[{"x_star": 1.0}, {"x_star": 2.0, "extra": 3.0}],
        )
        path = tmp_path / "boundary.csv"
        res.boundary_to_csv(path)
        with open(path, newline="") as fh:
            rows = list(csv.reader(fh))
        assert rows[0] == ["x_star", "extra"]
        assert rows[1][0] == "1.0" and rows[1][1] == "nan"
        assert rows[2] == ["2.0", "3.0"]


class TestSpotCheck:
    def test_detects_inconsistency(self, monkeypatch):
        import gaussfade.experiments as exp

        monkeypatch.setattr(exp, "cross_check_direct", lambda st, m: 1e9)
        with pytest.raises(RuntimeError, match="consistency"):
            squeezing_sweep(M_16, n_points=21)


class TestIdentitySuite:
    def test_report_structure_and_pass(self):
        report = identity_suite(n=300, n_psd=100, seed=1)
        assert report["pass"] is True
        assert set(report["checks"]) == {
            "det2_sum",
            "det4_block",
            "expand_full",
            "psd_damped_cross",
            "psd_block_dets",
            "psd_quadratic_forms",
            "adjugate",
            "partial_transpose_forms",
        }
        for check in report["checks"].values():
            assert check["pass"] is True
        payload = json.loads(json.dumps(report))
        assert payload["n_instances"] == 300

    def test_seeded_reproducibility(self):
        a = identity_suite(n=100, n_psd=50, seed=9)
        b = identity_suite(n=100, n_psd=50, seed=9)
        assert a == b
