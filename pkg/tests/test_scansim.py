"""Tests for the scan-timing simulator."""

import numpy as np
import pytest

from tcftl.densities import ConditionalPdfBank, EmpiricalPdf
from tcftl.errors import ConfigurationError, ParameterError
from tcftl.measurements import Dataset, RssiSample
from tcftl.scansim import (
    CHUNK_WINDOWS,
    Correlation,
    RecordingPolicy,
    SamplingModel,
    ScanModel,
    cell_strata,
    censor_sensitivity,
    draw_windows,
    looks_per_window,
    simulate_window,
    simulate_windows,
)

from conftest import HAND_PAIR, gaussian_pdf


def point_pdf(value):
    return EmpiricalPdf(value, np.asarray([1.0]), sample_count=10)


def tri_pdf(lo=-70):
    """Three-bin PDF with distinct, easily checked masses."""
    return EmpiricalPdf(lo, np.asarray([0.2, 0.3, 0.5]), sample_count=100)


class TestScanModel:
    def test_default_timing(self):
        model = ScanModel()
        assert model.chirps_per_scan == 16
        assert model.scans_per_window == 6
        assert model.window_s == 900.0

    def test_chirps_per_scan_floors(self):
        assert ScanModel(chirp_rate_hz=2.5, scan_duration_s=3.0).chirps_per_scan == 7

    def test_scan_longer_than_interval_rejected(self):
        with pytest.raises(ValueError):
            ScanModel(scan_duration_s=200.0, scan_interval_s=150.0)

    def test_window_too_short_rejected(self):
        with pytest.raises(ValueError):
            ScanModel(scans_per_window=6, window_s=20.0)

    def test_chirpless_scan_rejected(self):
        with pytest.raises(ValueError):
            ScanModel(chirp_rate_hz=0.1, scan_duration_s=4.0)


class TestSamplingModel:
    def test_all_chirps_defaults_to_four(self):
        assert SamplingModel(RecordingPolicy.ALL_CHIRPS).samples_per_scan == 4

    def test_single_value_policies_default_to_one(self):
        assert SamplingModel(RecordingPolicy.FIRST_CHIRP).samples_per_scan == 1
        assert SamplingModel(RecordingPolicy.MIN_ATTENUATION).recorded_per_scan() == 1

    def test_multi_sample_single_value_policy_rejected(self):
        with pytest.raises(ConfigurationError):
            SamplingModel(RecordingPolicy.FIRST_CHIRP, samples_per_scan=3)

    def test_looks_per_window(self):
        model = ScanModel()
        assert looks_per_window(model, RecordingPolicy.FIRST_CHIRP) == 6
        assert looks_per_window(model, SamplingModel(RecordingPolicy.ALL_CHIRPS)) == 24


class TestDrawWindows:
    def test_shapes(self):
        model = ScanModel()
        strata = ((1.0, tri_pdf()),)
        first = draw_windows(strata, model, RecordingPolicy.FIRST_CHIRP, 10, seed=42)
        assert first.shape == (10, 6)
        full = draw_windows(
            strata, model, SamplingModel(RecordingPolicy.ALL_CHIRPS), 10, seed=42
        )
        assert full.shape == (10, 24)

    def test_marginal_matches_pdf(self):
        """Recorded first-chirp values reproduce the cell PDF."""
        pdf = tri_pdf()
        values = draw_windows(
            ((1.0, pdf),), ScanModel(), RecordingPolicy.FIRST_CHIRP, 20_000, seed=42
        ).ravel()
        freqs = [np.mean(values == v) for v in pdf.values()]
        # 120k draws: binomial std is at most ~0.0015 per bin.
        np.testing.assert_allclose(freqs, pdf.probabilities, atol=0.006)
        assert values.min() >= pdf.support_min
        assert values.max() <= pdf.support_max

    def test_stratum_weights_respected(self):
        strata = ((0.25, point_pdf(-90)), (0.75, point_pdf(-50)))
        values = draw_windows(strata, ScanModel(), RecordingPolicy.FIRST_CHIRP, 8_000, seed=42)
        share_strong = float(np.mean(values == -50))
        np.testing.assert_allclose(share_strong, 0.75, atol=0.01)

    def test_within_scan_correlation_holds_stratum_fixed(self):
        """Correlated scans draw every chirp from one stratum."""
        strata = ((0.5, tri_pdf(-90)), (0.5, tri_pdf(-50)))
        sampling = SamplingModel(
            RecordingPolicy.ALL_CHIRPS, samples_per_scan=16,
            correlation=Correlation.WITHIN_SCAN_CORRELATED,
        )
        values = draw_windows(strata, ScanModel(), sampling, 200, seed=42)
        per_scan = values.reshape(200, 6, 16)
        from_weak = per_scan <= -88
        mixed = np.any(from_weak, axis=2) & np.any(~from_weak, axis=2)
        assert not mixed.any()

    def test_independent_redraws_stratum_per_chirp(self):
        strata = ((0.5, tri_pdf(-90)), (0.5, tri_pdf(-50)))
        sampling = SamplingModel(
            RecordingPolicy.ALL_CHIRPS, samples_per_scan=16,
            correlation=Correlation.INDEPENDENT,
        )
        values = draw_windows(strata, ScanModel(), sampling, 200, seed=42)
        per_scan = values.reshape(200, 6, 16)
        from_weak = per_scan <= -88
        mixed = np.any(from_weak, axis=2) & np.any(~from_weak, axis=2)
        # With 16 chirps per scan at 50/50, almost every scan mixes strata.
        assert mixed.mean() > 0.99

    def test_min_attenuation_dominates_first_chirp_pathwise(self):
        """Both policies reduce the same chirp tensor under a shared seed."""
        strata = ((1.0, gaussian_pdf(-60.0)),)
        model = ScanModel()
        kw = dict(n_windows=1_000, seed=42)
        first = draw_windows(strata, model, RecordingPolicy.FIRST_CHIRP, **kw)
        best = draw_windows(strata, model, RecordingPolicy.MIN_ATTENUATION, **kw)
        assert best.shape == first.shape
        assert np.all(best >= first)

    def test_min_attenuation_tail_matches_closed_form(self):
        """P(recorded >= tau) = 1 - (1 - t)^chirps for independent chirps."""
        pdf = tri_pdf()
        sampling = SamplingModel(
            RecordingPolicy.MIN_ATTENUATION, correlation=Correlation.INDEPENDENT
        )
        model = ScanModel()
        values = draw_windows(((1.0, pdf),), model, sampling, 20_000, seed=42)
        tau = pdf.support_min + 2
        t = pdf.tail_geq(tau)
        expected = 1.0 - (1.0 - t) ** model.chirps_per_scan
        observed = float(np.mean(values >= tau))
        sigma = np.sqrt(expected * (1 - expected) / values.size)
        assert abs(observed - expected) <= max(4 * sigma, 1e-4)

    def test_deterministic_across_calls(self):
        strata = ((1.0, tri_pdf()),)
        a = draw_windows(strata, ScanModel(), RecordingPolicy.FIRST_CHIRP, 100, seed=7)
        b = draw_windows(strata, ScanModel(), RecordingPolicy.FIRST_CHIRP, 100, seed=7)
        np.testing.assert_array_equal(a, b)
        c = draw_windows(strata, ScanModel(), RecordingPolicy.FIRST_CHIRP, 100, seed=8)
        assert not np.array_equal(a, c)

    def test_chunked_generation_is_stable(self):
        """Windows beyond one chunk reuse fixed per-chunk seeds."""
        strata = ((1.0, tri_pdf()),)
        n = CHUNK_WINDOWS + 32
        a = draw_windows(strata, ScanModel(), RecordingPolicy.FIRST_CHIRP, n, seed=7)
        b = draw_windows(strata, ScanModel(), RecordingPolicy.FIRST_CHIRP, n, seed=7)
        np.testing.assert_array_equal(a, b)

    def test_sequence_seed_accepted(self):
        strata = ((1.0, tri_pdf()),)
        a = draw_windows(strata, ScanModel(), RecordingPolicy.FIRST_CHIRP, 10, seed=[3, 1])
        b = draw_windows(strata, ScanModel(), RecordingPolicy.FIRST_CHIRP, 10, seed=[3, 2])
        assert a.shape == b.shape
        assert not np.array_equal(a, b)

    def test_negative_seed_rejected(self):
        with pytest.raises(ParameterError):
            draw_windows(((1.0, tri_pdf()),), ScanModel(), RecordingPolicy.FIRST_CHIRP, 1, seed=-1)

    def test_zero_windows_rejected(self):
        with pytest.raises(ParameterError):
            draw_windows(((1.0, tri_pdf()),), ScanModel(), RecordingPolicy.FIRST_CHIRP, 0, seed=1)

    def test_samples_per_scan_beyond_chirps_rejected(self):
        model = ScanModel(chirp_rate_hz=1.0, scan_duration_s=2.0)
        sampling = SamplingModel(RecordingPolicy.ALL_CHIRPS, samples_per_scan=4)
        with pytest.raises(ConfigurationError):
            draw_windows(((1.0, tri_pdf()),), model, sampling, 4, seed=1)


class TestBankSimulation:
    def test_simulate_window_matches_single_window_batch(self, two_state_bank):
        one = simulate_window(
            ScanModel(), RecordingPolicy.FIRST_CHIRP, two_state_bank, 6.0, HAND_PAIR, seed=42
        )
        batch = simulate_windows(
            ScanModel(), RecordingPolicy.FIRST_CHIRP, two_state_bank, 6.0, HAND_PAIR, 42, 1
        )
        np.testing.assert_array_equal(one, batch[0])
        assert one.shape == (6,)

    def test_cell_strata_fallback_and_weighting(self, two_state_bank):
        strata = cell_strata(two_state_bank, 6.0, HAND_PAIR)
        assert len(strata) == 1
        assert strata[0][0] == 1.0

        def sample(rssi, angle):
            return RssiSample(
                rssi=rssi, tx_power=12, distance_ft=6.0, carriage=HAND_PAIR,
                pose_angle_user1=angle, pose_angle_user2=0,
            )

        ds = Dataset(
            (sample(-55, 0), sample(-56, 0), sample(-57, 0), sample(-80, 90)),
            provenance="t",
        )
        bank = ConditionalPdfBank.from_dataset(ds)
        strata = cell_strata(bank, 6.0, HAND_PAIR)
        weights = sorted(w for w, _ in strata)
        np.testing.assert_allclose(weights, [0.25, 0.75])


class TestCensorSensitivity:
    def test_drops_below_floor(self):
        out = censor_sensitivity([-99, -100, -101, -50], floor=-100)
        np.testing.assert_array_equal(out, [-99, -100, -50])

    def test_empty_result_allowed(self):
        assert censor_sensitivity([-120, -110]).size == 0
