"""Tests for empirical PDFs, the conditional bank, and hypothesis mixtures."""

import numpy as np
import pytest

from tcftl.densities import (
    ConditionalPdfBank,
    ContactDensity,
    EmpiricalPdf,
    HypothesisPdfs,
    align_supports,
    estimate_pdf,
    mixture_pdf,
    mixture_strata,
    range_grid,
)
from tcftl.errors import CoverageError, EstimationError, ParameterError
from tcftl.measurements import CarriagePair, CarriageState, Dataset, Holding, Posture, RssiSample

from conftest import HAND_PAIR, POCKET_PAIR, gaussian_pdf


def make_sample(rssi, distance=6.0, angle1=0, angle2=0, carriage=HAND_PAIR, **kw):
    return RssiSample(
        rssi=rssi,
        tx_power=12,
        distance_ft=distance,
        carriage=carriage,
        pose_angle_user1=angle1,
        pose_angle_user2=angle2,
        **kw,
    )


class TestEmpiricalPdf:
    def test_from_values_counts_bins(self):
        pdf = EmpiricalPdf.from_values([-62, -61, -61, -60, -60, -60])
        assert pdf.support_min == -62
        assert pdf.support_max == -60
        np.testing.assert_allclose(pdf.probabilities, [1 / 6, 2 / 6, 3 / 6])
        assert pdf.sample_count == 6

    def test_explicit_support_pads_with_zeros(self):
        pdf = EmpiricalPdf.from_values([-61], support=(-63, -60))
        np.testing.assert_allclose(pdf.probabilities, [0.0, 0.0, 1.0, 0.0])

    def test_values_outside_support_rejected(self):
        with pytest.raises(ParameterError):
            EmpiricalPdf.from_values([-59], support=(-63, -60))

    def test_constant_input_is_point_mass(self):
        pdf = EmpiricalPdf.from_values([-70, -70, -70])
        assert pdf.support_min == pdf.support_max == -70
        np.testing.assert_allclose(pdf.probabilities, [1.0])

    def test_floor_fills_empty_bins_before_renormalizing(self):
        pdf = EmpiricalPdf.from_values([-62, -60], support=(-62, -60), floor=0.1)
        # raw [0.5, 0, 0.5] -> floored [0.5, 0.1, 0.5] -> /1.1
        np.testing.assert_allclose(pdf.probabilities, [0.5 / 1.1, 0.1 / 1.1, 0.5 / 1.1])
        np.testing.assert_allclose(pdf.probabilities.sum(), 1.0, atol=1e-12)

    def test_zero_samples_rejected(self):
        with pytest.raises(EstimationError):
            EmpiricalPdf.from_values([])

    def test_unnormalized_probabilities_rejected(self):
        with pytest.raises(ValueError):
            EmpiricalPdf(-60, np.asarray([0.5, 0.4]), sample_count=1)

    def test_probabilities_are_frozen_copy(self):
        """Constructing a PDF must not freeze or alias the caller's array."""
        probs = np.asarray([0.25, 0.75])
        pdf = EmpiricalPdf(-61, probs, sample_count=4)
        probs[0] = 0.9  # caller's array stays writable
        np.testing.assert_allclose(pdf.probabilities, [0.25, 0.75])
        with pytest.raises(ValueError):
            pdf.probabilities[0] = 0.5

    def test_prob_and_tails(self):
        pdf = EmpiricalPdf(-62, np.asarray([0.2, 0.3, 0.5]), sample_count=10)
        assert pdf.prob(-61) == 0.3
        assert pdf.prob(-99) == 0.0
        assert pdf.tail_geq(-62) == 1.0
        assert pdf.tail_geq(-63) == 1.0
        np.testing.assert_allclose(pdf.tail_geq(-61), 0.8)
        assert pdf.tail_geq(-59) == 0.0

    def test_tail_geq_many_matches_scalar(self):
        rng = np.random.default_rng(42)
        probs = rng.dirichlet(np.ones(41))
        pdf = EmpiricalPdf(-90, probs, sample_count=100)
        taus = np.arange(-95, -44)
        many = pdf.tail_geq_many(taus)
        scalar = [pdf.tail_geq(int(t)) for t in taus]
        np.testing.assert_allclose(many, scalar, atol=1e-12)
        assert np.all(many <= 1.0)
        assert np.all(many >= 0.0)

    def test_mean_and_median(self):
        pdf = EmpiricalPdf(-62, np.asarray([0.2, 0.3, 0.5]), sample_count=10)
        np.testing.assert_allclose(pdf.mean(), -60.7)
        assert pdf.median() == -61

    def test_dict_round_trip(self):
        pdf = gaussian_pdf(-60.0)
        back = EmpiricalPdf.from_dict(pdf.to_dict())
        assert back.support_min == pdf.support_min
        np.testing.assert_allclose(back.probabilities, pdf.probabilities)
        assert back.sample_count == pdf.sample_count


class TestAlignSupports:
    def test_common_grid(self):
        a = EmpiricalPdf(-62, np.asarray([0.5, 0.5]), sample_count=2)
        b = EmpiricalPdf(-60, np.asarray([1.0]), sample_count=1)
        lo, mat = align_supports([a, b])
        assert lo == -62
        np.testing.assert_allclose(mat, [[0.5, 0.5, 0.0], [0.0, 0.0, 1.0]])


class TestEstimatePdf:
    def dataset(self):
        samples = [
            make_sample(-60, 6.0),
            make_sample(-61, 6.0),
            make_sample(-80, 12.0),
            make_sample(-58, 6.0, carriage=POCKET_PAIR),
            make_sample(-59, 6.0, synthetic=True),
        ]
        return Dataset(tuple(samples), provenance="test")

    def test_cell_isolation(self):
        pdf = estimate_pdf(self.dataset(), 6.0, HAND_PAIR, include_synthetic=False)
        assert pdf.sample_count == 2
        np.testing.assert_allclose(pdf.prob(-60), 0.5)
        assert pdf.prob(-58) == 0.0  # other carriage pair's sample

    def test_synthetic_included_by_default(self):
        pdf = estimate_pdf(self.dataset(), 6.0, HAND_PAIR)
        assert pdf.sample_count == 3

    def test_default_support_covers_floor_and_tx(self):
        pdf = estimate_pdf(self.dataset(), 6.0, HAND_PAIR)
        assert pdf.support_min <= -100
        assert pdf.support_max >= 12

    def test_empty_cell_raises(self):
        with pytest.raises(EstimationError):
            estimate_pdf(self.dataset(), 3.0, HAND_PAIR)


class TestConditionalPdfBank:
    def test_pairs_and_distances(self, two_state_bank):
        assert set(two_state_bank.pairs()) == {HAND_PAIR, POCKET_PAIR}
        assert two_state_bank.distances(HAND_PAIR) == (3.0, 6.0, 12.0, 30.0)

    def test_lookup_tolerates_float_noise(self, two_state_bank):
        exact = two_state_bank.pdf(6.0, HAND_PAIR)
        fuzzy = two_state_bank.pdf(6.0 + 1e-12, HAND_PAIR)
        assert fuzzy is exact

    def test_missing_cell_raises_coverage_error(self, two_state_bank):
        with pytest.raises(CoverageError):
            two_state_bank.pdf(7.5, HAND_PAIR)

    def test_from_dataset_shares_global_support(self):
        samples = [
            make_sample(-55, 3.0),
            make_sample(-75, 12.0),
        ]
        bank = ConditionalPdfBank.from_dataset(Dataset(tuple(samples), provenance="t"))
        near = bank.pdf(3.0, HAND_PAIR)
        far = bank.pdf(12.0, HAND_PAIR)
        assert near.support_min == far.support_min
        assert near.support_max == far.support_max

    def test_from_dataset_builds_pose_strata(self):
        samples = [
            make_sample(-55, 6.0, angle1=0),
            make_sample(-60, 6.0, angle1=90),
        ]
        bank = ConditionalPdfBank.from_dataset(Dataset(tuple(samples), provenance="t"))
        strata = bank.strata(6.0, HAND_PAIR)
        assert set(strata) == {(0, 0), (90, 0)}
        single = [make_sample(-55, 6.0)]
        bank2 = ConditionalPdfBank.from_dataset(Dataset(tuple(single), provenance="t"))
        assert bank2.strata(6.0, HAND_PAIR) is None

    def test_json_round_trip(self, two_state_bank):
        data = two_state_bank.to_json_dict()
        back = ConditionalPdfBank.from_json_dict(data)
        assert set(back.pairs()) == set(two_state_bank.pairs())
        for (key, pdf) in two_state_bank.cells():
            other = back.pdf(key[0], key[1])
            np.testing.assert_allclose(other.probabilities, pdf.probabilities)


class TestContactDensity:
    def test_uniform_area_is_linear_in_range(self):
        d = ContactDensity.uniform_area()
        np.testing.assert_allclose(d(np.asarray([0.0, 1.0, 6.0, 30.0])), [0.0, 1.0, 6.0, 30.0])

    def test_table_interpolation_and_clamping(self):
        d = ContactDensity.from_table([(0.0, 0.0), (10.0, 2.0), (20.0, 0.0)])
        np.testing.assert_allclose(d(5.0), 1.0)
        np.testing.assert_allclose(d(15.0), 1.0)
        np.testing.assert_allclose(d(25.0), 0.0)  # clamped beyond the table

    def test_negative_range_rejected(self):
        d = ContactDensity.uniform_area()
        with pytest.raises(ParameterError):
            d(-1.0)

    def test_short_table_rejected(self):
        with pytest.raises(ParameterError):
            ContactDensity.from_table([(0.0, 1.0)])


class TestRangeGrid:
    def test_interval_subset(self, two_state_bank):
        np.testing.assert_allclose(range_grid(two_state_bank, HAND_PAIR, 0.0, 6.0), [3.0, 6.0])
        np.testing.assert_allclose(
            range_grid(two_state_bank, HAND_PAIR, 6.0, 30.0), [6.0, 12.0, 30.0]
        )

    def test_empty_interval_raises(self, two_state_bank):
        with pytest.raises(CoverageError):
            range_grid(two_state_bank, HAND_PAIR, 15.0, 25.0)

    def test_max_gap_checks_interior_and_endpoints(self, two_state_bank):
        with pytest.raises(CoverageError):
            # [6, 30] grid is 6, 12, 30: the 12 -> 30 hole is 18 ft.
            range_grid(two_state_bank, HAND_PAIR, 6.0, 30.0, max_gap=10.0)
        with pytest.raises(CoverageError):
            # endpoint gap: grid starts at 3 ft but the interval at 0 ft.
            range_grid(two_state_bank, HAND_PAIR, 0.0, 6.0, max_gap=2.0)
        range_grid(two_state_bank, HAND_PAIR, 0.0, 6.0, max_gap=3.0)


class TestMixturePdf:
    def test_two_range_mixture_weights(self, two_state_bank, uniform_density):
        """Trapezoid x D(s) weighting on the [3, 6] ft grid, by hand.

        Node coefficients are 1.5 each; times D(s) = s gives 4.5 and 9,
        normalizing to 1/3 and 2/3.
        """
        mixed = mixture_pdf(two_state_bank, uniform_density, HAND_PAIR, 0.0, 6.0)
        p3 = two_state_bank.pdf(3.0, HAND_PAIR)
        p6 = two_state_bank.pdf(6.0, HAND_PAIR)
        lo, mat = align_supports([p3, p6])
        expected = mat[0] / 3.0 + 2.0 * mat[1] / 3.0
        assert mixed.support_min == lo
        np.testing.assert_allclose(mixed.probabilities, expected, atol=1e-12)

    def test_density_scale_invariance(self, two_state_bank):
        doubled = ContactDensity.from_table([(0.0, 0.0), (30.0, 60.0)])
        a = mixture_pdf(two_state_bank, ContactDensity.uniform_area(), HAND_PAIR, 6.0, 30.0)
        b = mixture_pdf(two_state_bank, doubled, HAND_PAIR, 6.0, 30.0)
        np.testing.assert_allclose(a.probabilities, b.probabilities, atol=1e-12)

    def test_single_range_interval_returns_cell_pdf(self, two_state_bank, uniform_density):
        mixed = mixture_pdf(two_state_bank, uniform_density, HAND_PAIR, 10.0, 14.0)
        cell = two_state_bank.pdf(12.0, HAND_PAIR)
        assert mixed.support_min == cell.support_min
        np.testing.assert_allclose(mixed.probabilities, cell.probabilities, atol=1e-12)

    def test_strata_recombine_to_mixture(self, two_state_bank, uniform_density):
        strata = mixture_strata(two_state_bank, uniform_density, HAND_PAIR, 6.0, 30.0)
        weights = np.asarray([w for w, _ in strata])
        np.testing.assert_allclose(weights.sum(), 1.0, atol=1e-12)
        lo, mat = align_supports([p for _, p in strata])
        mixed = mixture_pdf(two_state_bank, uniform_density, HAND_PAIR, 6.0, 30.0)
        np.testing.assert_allclose(weights @ mat, mixed.probabilities, atol=1e-12)

    def test_vanishing_density_rejected(self, two_state_bank):
        zero_near = ContactDensity.from_table([(0.0, 0.0), (6.0, 0.0), (6.1, 1.0), (30.0, 1.0)])
        with pytest.raises(EstimationError):
            mixture_pdf(two_state_bank, zero_near, HAND_PAIR, 0.0, 6.0)


class TestHypothesisPdfs:
    def test_boundary_range_feeds_both_hypotheses(self, two_state_bank, uniform_density):
        hyp = HypothesisPdfs.from_bank(two_state_bank, HAND_PAIR, uniform_density)
        p6 = two_state_bank.pdf(6.0, HAND_PAIR)
        # The 6 ft cell's mode should contribute visible mass to both sides.
        mode = int(p6.values()[np.argmax(p6.probabilities)])
        assert hyp.h1.prob(mode) > 0.0
        assert hyp.h0.prob(mode) > 0.0

    def test_near_hypothesis_sits_above_far(self, two_state_bank, uniform_density):
        hyp = HypothesisPdfs.from_bank(two_state_bank, HAND_PAIR, uniform_density)
        assert hyp.h1.mean() > hyp.h0.mean() + 5.0

    def test_invalid_boundary_rejected(self, two_state_bank, uniform_density):
        with pytest.raises(ParameterError):
            HypothesisPdfs.from_bank(
                two_state_bank, HAND_PAIR, uniform_density, boundary=30.0, max_range=30.0
            )

    def test_strata_attached(self, two_state_bank, uniform_density):
        hyp = HypothesisPdfs.from_bank(two_state_bank, HAND_PAIR, uniform_density)
        assert hyp.h1_strata is not None
        assert hyp.h0_strata is not None
        np.testing.assert_allclose(sum(w for w, _ in hyp.h1_strata), 1.0, atol=1e-12)
