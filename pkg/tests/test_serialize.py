"""Artifact round trips and deterministic formatting."""

import json

import numpy as np
import pytest

from mtsfm.ambiguity import DelayDopplerRegion, af_closed_form, delay_band
from mtsfm.optimize import OptimizeOptions, StudyConfig, minimize_isr, trial_study
from mtsfm.phasecode import barker13
from mtsfm.serialize import (acf_csv, load_indices, load_phase_code,
                             load_region, load_surface_magnitude,
                             read_csv_meta, read_series_csv, report_to_dict,
                             save_indices, save_phase_code, save_region,
                             save_report, save_study, study_csv,
                             surface_binary, waveform_csv)
from mtsfm.waveform import ModulationIndices, random_thumbtack_init, synthesize


IDX = ModulationIndices(a0=1.0, alphas=np.array([1.25, -0.5]),
                        betas=np.array([0.0, 0.75]), T=0.5)


class TestRoundTrips:
    def test_indices(self, tmp_path):
        p = tmp_path / "idx.json"
        save_indices(IDX, p)
        back = load_indices(p)
        np.testing.assert_array_equal(back.alphas, IDX.alphas)
        np.testing.assert_array_equal(back.betas, IDX.betas)
        assert back.a0 == IDX.a0 and back.T == IDX.T

    def test_region(self, tmp_path):
        p = tmp_path / "region.json"
        for reg in (delay_band(0.01, 0.2),
                    DelayDopplerRegion(kind="annulus", inner=(0.01, 1.0),
                                       outer=(0.05, 2.0))):
            save_region(reg, p)
            assert load_region(p) == reg

    def test_phase_code(self, tmp_path):
        p = tmp_path / "code.json"
        save_phase_code(barker13(), p)
        back = load_phase_code(p)
        np.testing.assert_array_equal(back.thetas, barker13().thetas)

    def test_series_csv(self, tmp_path):
        w = synthesize(IDX, fs=64.0)
        p = tmp_path / "wave.csv"
        waveform_csv(w, p)
        t, vals = read_series_csv(p)
        np.testing.assert_array_equal(t, w.t)
        np.testing.assert_array_equal(vals, w.samples)
        meta = read_csv_meta(p)
        assert meta["artifact"] == "waveform"
        assert meta["fs"] == w.fs

    def test_acf_csv_meta_merges(self, tmp_path):
        p = tmp_path / "acf.csv"
        acf_csv(np.array([0.0, 0.1]), np.array([1.0, 0.5 + 0.25j]), p,
                meta={"trial": 3})
        meta = read_csv_meta(p)
        assert meta["artifact"] == "acf"
        assert meta["trial"] == 3
        taus, vals = read_series_csv(p)
        assert vals[1] == 0.5 + 0.25j

    def test_missing_meta_line_raises(self, tmp_path):
        p = tmp_path / "bare.csv"
        p.write_text("a,b\n1,2\n")
        with pytest.raises(ValueError, match="metadata comment"):
            read_csv_meta(p)


class TestSurfaceBinary:
    def test_magnitudes_round_trip_exactly(self, tmp_path):
        tau = np.linspace(-0.4, 0.4, 17)
        nu = np.linspace(-8.0, 8.0, 9)
        surf = af_closed_form(IDX, tau, nu)
        bin_path, meta_path = surface_binary(surf, tmp_path / "af")
        assert bin_path.suffix == ".f64" and meta_path.suffix == ".json"
        t2, n2, mag = load_surface_magnitude(tmp_path / "af")
        np.testing.assert_array_equal(mag, np.abs(surf.values))
        np.testing.assert_array_equal(t2, tau)
        np.testing.assert_array_equal(n2, nu)

    def test_binary_is_little_endian_row_major(self, tmp_path):
        tau = np.array([0.0, 0.05])
        nu = np.array([0.0, 2.0, 4.0])
        surf = af_closed_form(IDX, tau, nu)
        bin_path, _ = surface_binary(surf, tmp_path / "af")
        raw = np.frombuffer(bin_path.read_bytes(), dtype="<f8")
        np.testing.assert_array_equal(raw.reshape(2, 3), np.abs(surf.values))


@pytest.fixture(scope="module")
def report():
    idx = random_thumbtack_init(3, 10.0, "even", seed=8)
    return minimize_isr(idx, options=OptimizeOptions(max_iters=40,
                                                     max_outer=3))


@pytest.fixture(scope="module")
def study():
    return trial_study(StudyConfig(
        num_tones=3, tbp=10.0, num_trials=2, seed=5,
        options=OptimizeOptions(max_iters=30, max_outer=3)))


class TestReports:
    def test_wall_time_never_serialized(self, report):
        d = report_to_dict(report)
        text = json.dumps(d)
        assert "wall_time" not in text
        assert d["kind"] == "isr"
        assert d["problem"]["region"]["kind"] == "delay_band"

    def test_saved_report_is_stable_json(self, report, tmp_path):
        p1, p2 = tmp_path / "r1.json", tmp_path / "r2.json"
        save_report(report, p1)
        save_report(report, p2)
        assert p1.read_bytes() == p2.read_bytes()
        loaded = json.loads(p1.read_text())
        assert loaded["objective_final"] <= loaded["objective_init"]


class TestStudyArtifacts:
    def test_csv_columns_and_meta(self, study, tmp_path):
        p = tmp_path / "study.csv"
        study_csv(study, p)
        meta = read_csv_meta(p)
        assert meta["num_trials"] == 2
        assert "aggregates" in meta
        header = p.read_text().splitlines()[1].split(",")
        assert header[:3] == ["trial", "seed", "area_init"]
        assert "gain_rel_best" in header
        data = np.loadtxt(p, delimiter=",", skiprows=2, usecols=(0, 1))
        assert data.shape[0] == 2

    def test_json_mirrors_rows(self, study, tmp_path):
        p = tmp_path / "study.json"
        save_study(study, p)
        d = json.loads(p.read_text())
        assert len(d["rows"]) == 2
        assert d["rows"][0]["seed"] == 5
        assert "wall_time" not in json.dumps(d)
