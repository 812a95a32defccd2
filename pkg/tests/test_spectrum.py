import math

import numpy as np
import pytest

from helpers import (
    gini_mean_absolute_difference,
    lorenz_area_gini,
    random_spectrum,
    spectrum_from_counts,
)
from rankspec import (
    DataError,
    build_spectrum,
    descriptive_stats,
    gini,
    histogram,
    lorenz_curve,
    normalize,
    top_share,
)


class TestBuildSpectrum:
    def test_single_entry(self):
        s = build_spectrum([("a", 1)])
        assert s.entries == (("a", 1),)
        assert s.n == 1

    def test_sorting_with_label_tiebreak(self):
        s = build_spectrum([("x", 2), ("y", 5), ("z", 2)])
        assert s.entries == (("y", 5), ("x", 2), ("z", 2))

    def test_zero_count_rejected(self):
        with pytest.raises(DataError):
            build_spectrum([("a", 0)])

    def test_negative_count_rejected(self):
        with pytest.raises(DataError):
            build_spectrum([("a", -3)])

    def test_empty_rejected(self):
        with pytest.raises(DataError):
            build_spectrum([])

    def test_duplicate_label_rejected(self):
        with pytest.raises(DataError):
            build_spectrum([("a", 3), ("a", 4)])

    def test_idempotent_under_reranking(self):
        rng = np.random.default_rng(11)
        for _ in range(25):
            s = random_spectrum(rng)
            assert build_spectrum(s.entries).entries == s.entries


class TestNormalize:
    def test_hand_values(self):
        y = normalize(spectrum_from_counts([5, 3, 2]))
        assert y.values == (0.5, 0.3, 0.2)

    def test_single(self):
        assert normalize(spectrum_from_counts([7])).values == (1.0,)

    def test_uniform(self):
        assert normalize(spectrum_from_counts([1, 1, 1, 1])).values == (0.25,) * 4

    def test_sums_to_one_on_random_spectra(self):
        rng = np.random.default_rng(12)
        for _ in range(100):
            y = normalize(random_spectrum(rng, n=int(rng.integers(1, 400))))
            assert abs(sum(y.values) - 1.0) <= 1e-12


class TestDescriptiveStats:
    def test_single_entry(self):
        st = descriptive_stats(spectrum_from_counts([4]))
        assert st.mean == 4 and st.median == 4
        assert st.sd == 0 and st.mad == 0
        assert st.coverage_mean_sd == 1.0 and st.coverage_median_mad == 1.0

    def test_hand_computed(self):
        st = descriptive_stats(spectrum_from_counts([1, 2, 3, 4, 5]))
        assert st.mean == 3 and st.median == 3
        assert st.sd == pytest.approx(math.sqrt(2.5), abs=1e-12)
        assert st.mad == 1

    def test_even_n_median_is_midpoint(self):
        st = descriptive_stats(spectrum_from_counts([1, 2, 6, 9]))
        assert st.median == 4.0

    def test_mean_is_exact_ratio(self):
        rng = np.random.default_rng(13)
        for _ in range(50):
            s = random_spectrum(rng)
            st = descriptive_stats(s)
            assert st.mean == st.total_characters / st.n_syllables

    def test_singletons_counted(self):
        st = descriptive_stats(spectrum_from_counts([9, 1, 1, 2, 1]))
        assert st.singleton_count == 3


class TestTopShare:
    def test_third_of_three(self):
        assert top_share(spectrum_from_counts([5, 3, 2]), 1 / 3) == 0.5

    def test_full_fraction_is_one(self):
        rng = np.random.default_rng(14)
        for _ in range(20):
            assert top_share(random_spectrum(rng), 1.0) == 1.0

    def test_monotone_in_fraction(self):
        rng = np.random.default_rng(15)
        for _ in range(20):
            s = random_spectrum(rng, n=int(rng.integers(2, 80)))
            shares = [top_share(s, f) for f in (0.05, 0.2, 0.5, 0.8, 1.0)]
            assert all(a <= b + 1e-15 for a, b in zip(shares, shares[1:]))

    @pytest.mark.parametrize("fraction", [0.0, -0.2, 1.2])
    def test_fraction_out_of_range(self, fraction):
        with pytest.raises(ValueError):
            top_share(spectrum_from_counts([3, 1]), fraction)


class TestGini:
    def test_uniform_is_zero(self):
        for c in (1, 7, 40):
            assert gini(spectrum_from_counts([c] * 9)) == 0

    def test_one_two_three(self):
        assert gini(spectrum_from_counts([1, 2, 3])) == pytest.approx(2 / 9, abs=1e-12)

    def test_matches_mean_absolute_difference_oracle(self):
        rng = np.random.default_rng(16)
        for _ in range(100):
            s = random_spectrum(rng, n=int(rng.integers(1, 201)))
            assert gini(s) == pytest.approx(
                gini_mean_absolute_difference(s.counts), abs=1e-9
            )

    def test_scale_invariant_exactly(self):
        rng = np.random.default_rng(17)
        for _ in range(30):
            s = random_spectrum(rng, n=int(rng.integers(2, 60)), max_count=50)
            for k in (2, 3, 10):
                scaled = spectrum_from_counts([k * c for c in s.counts])
                assert gini(scaled) == gini(s)


class TestLorenzCurve:
    def test_two_equal_counts_on_diagonal(self):
        curve = lorenz_curve(spectrum_from_counts([1, 1]))
        assert curve.points == ((0.0, 0.0), (0.5, 0.5), (1.0, 1.0))

    def test_hand_values(self):
        curve = lorenz_curve(spectrum_from_counts([3, 1]))
        assert curve.points == ((0.0, 0.0), (0.5, 0.25), (1.0, 1.0))

    def test_area_gini_matches_formula(self):
        curve = lorenz_curve(spectrum_from_counts([1, 2, 3]))
        assert lorenz_area_gini(curve.points) == pytest.approx(2 / 9, abs=1e-9)

    def test_area_gini_matches_on_random_spectra(self):
        rng = np.random.default_rng(18)
        for _ in range(30):
            s = random_spectrum(rng, n=int(rng.integers(1, 120)))
            assert lorenz_area_gini(lorenz_curve(s).points) == pytest.approx(
                gini(s), abs=1e-9
            )

    def test_monotone_and_below_diagonal(self):
        rng = np.random.default_rng(19)
        for _ in range(20):
            pts = lorenz_curve(random_spectrum(rng)).points
            assert pts[0] == (0.0, 0.0) and pts[-1] == (1.0, 1.0)
            for (x0, y0), (x1, y1) in zip(pts, pts[1:]):
                assert x1 >= x0 and y1 >= y0
            assert all(y <= x + 1e-12 for x, y in pts)


class TestHistogram:
    def test_width_one(self):
        assert histogram(spectrum_from_counts([1, 1, 2]), 1) == [(1, 2), (2, 1)]

    def test_width_four(self):
        assert histogram(spectrum_from_counts([1, 5, 5, 9]), 4) == [
            (1, 1),
            (5, 2),
            (9, 1),
        ]

    def test_interior_empty_bins_reported(self):
        assert histogram(spectrum_from_counts([1, 5]), 1) == [
            (1, 1),
            (2, 0),
            (3, 0),
            (4, 0),
            (5, 1),
        ]

    def test_bin_counts_sum_to_n(self):
        rng = np.random.default_rng(20)
        for _ in range(30):
            s = random_spectrum(rng)
            for width in (1, 2, 7):
                assert sum(c for _, c in histogram(s, width)) == s.n

    def test_bad_width(self):
        with pytest.raises(ValueError):
            histogram(spectrum_from_counts([1]), 0)
