import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from lsgan_lab.divergence import (
    DiscreteDist, chi2_table, gan_value_at_optimum, js_divergence, kl_divergence,
    lsgan_value_at_optimum, optimal_discriminator, pearson_chi2_mix, random_pair,
)

LOG2, LOG4 = math.log(2), math.log(4)


def golden_min(f, lo, hi, tol=1e-12):
    """Golden-section search; independent of any closed form."""
    invphi = (math.sqrt(5) - 1) / 2
    a, b = lo, hi
    c, d = b - invphi * (b - a), a + invphi * (b - a)
    fc, fd = f(c), f(d)
    while b - a > tol:
        if fc < fd:
            b, d, fd = d, c, fc
            c = b - invphi * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + invphi * (b - a)
            fd = f(d)
    return 0.5 * (a + b)


def pairs(n=100, seed=123, kmax=16):
    rng = np.random.default_rng(seed)
    for i in range(n):
        yield random_pair(seed, i, int(rng.integers(2, kmax + 1)))


class TestDiscreteDist:
    def test_normalisation_enforced(self):
        with pytest.raises(ValueError):
            DiscreteDist([0.5, 0.6])
        with pytest.raises(ValueError):
            DiscreteDist([1.5, -0.5])

    def test_random_pairs_valid_with_some_zeros(self):
        zeros = 0
        for pd, pg in pairs():
            assert abs(pd.probs.sum() - 1) <= 1e-12 and pd.probs.min() >= 0
            zeros += int((pd.probs == 0).sum() + (pg.probs == 0).sum())
        assert zeros > 0


class TestOptimalDiscriminator:
    def test_equal_distributions(self):
        p = DiscreteDist([0.2, 0.3, 0.5])
        np.testing.assert_array_equal(optimal_discriminator(p, p, 0, 1), 0.5)

    def test_disjoint(self):
        np.testing.assert_array_equal(optimal_discriminator([1, 0], [0, 1], 0, 1), [1, 0])

    def test_unreachable_marked(self):
        d = optimal_discriminator([1, 0, 0], [0, 1, 0], -1, 1)
        assert np.isnan(d[2]) and not np.isnan(d[:2]).any()

    def test_length_mismatch(self):
        with pytest.raises(ValueError):
            optimal_discriminator([1.0], [0.5, 0.5])

    @pytest.mark.parametrize("a, b", [(0, 1), (-1, 1), (0, 2)])
    def test_matches_pointwise_minimiser(self, a, b):
        for pd, pg in list(pairs(20, seed=9)):
            closed = optimal_discriminator(pd, pg, a, b)
            for x in range(len(pd)):
                wd, wg = pd.probs[x], pg.probs[x]
                if wd + wg == 0:
                    continue
                s = golden_min(lambda s: 0.5 * wd * (s - b) ** 2 + 0.5 * wg * (s - a) ** 2,
                               a - 1, b + 1)
                assert abs(s - closed[x]) <= 1e-6


class TestChi2:
    def test_equal_is_zero(self):
        p = DiscreteDist([0.1, 0.4, 0.5])
        assert pearson_chi2_mix(p, p) == 0.0
        assert lsgan_value_at_optimum(p, p, -1, 1, 0) == 0.0

    def test_hand_value(self):
        # (0.5 - 0.75)^2 / 0.75 + (1.5 - 1.25)^2 / 1.25
        expected = 0.0625 / 0.75 + 0.0625 / 1.25
        assert pearson_chi2_mix([0.5, 0.5], [0.25, 0.75]) == pytest.approx(expected, abs=1e-15)
        assert expected == pytest.approx(0.133333333333333, abs=1e-14)

    def test_hand_value_matches_lsgan_optimum(self):
        v = lsgan_value_at_optimum([0.5, 0.5], [0.25, 0.75], -1, 1, 0)
        assert v == pytest.approx(pearson_chi2_mix([0.5, 0.5], [0.25, 0.75]), abs=1e-15)

    def test_disjoint(self):
        assert pearson_chi2_mix([1, 0], [0, 1]) == 2.0

    @pytest.mark.parametrize("scheme", [(-1, 1, 0), (0, 2, 1), (-3, -1, -2)])
    def test_equivalence_random_pairs(self, scheme):
        worst = max(abs(lsgan_value_at_optimum(pd, pg, *scheme) - pearson_chi2_mix(pd, pg))
                    for pd, pg in pairs())
        assert worst <= 1e-10

    def test_scheme_invariance(self):
        for pd, pg in pairs(50):
            assert lsgan_value_at_optimum(pd, pg, -1, 1, 0) == pytest.approx(
                lsgan_value_at_optimum(pd, pg, 0, 2, 1), abs=1e-12)

    def test_zero_one_scheme_is_not_chi2(self):
        pd, pg = random_pair(5, 0, 6)
        v = lsgan_value_at_optimum(pd, pg, 0, 1, 1)
        assert abs(v - pearson_chi2_mix(pd, pg)) > 1e-3

    def test_table_support_one(self):
        rows = chi2_table(10, 1, seed=0)
        assert all(r.chi2 == 0.0 and r.value == 0.0 for r in rows)


class TestJensenShannon:
    def test_equal_is_minus_log4(self):
        p = DiscreteDist([0.25, 0.25, 0.5])
        assert abs(gan_value_at_optimum(p, p) + LOG4) <= 1e-12
        assert js_divergence(p, p) == 0.0

    def test_disjoint(self):
        assert gan_value_at_optimum([1, 0], [0, 1]) == pytest.approx(0.0, abs=1e-15)
        assert js_divergence([1, 0], [0, 1]) == pytest.approx(LOG2, abs=1e-15)

    def test_equivalence_random_pairs(self):
        for pd, pg in pairs():
            assert abs(gan_value_at_optimum(pd, pg) - (2 * js_divergence(pd, pg) - LOG4)) <= 1e-10

    def test_js_bounds_and_symmetry(self):
        for pd, pg in pairs(50):
            j = js_divergence(pd, pg)
            assert -1e-15 <= j <= LOG2 + 1e-15
            assert j == pytest.approx(js_divergence(pg, pd), abs=1e-15)

    def test_kl(self):
        assert kl_divergence([1, 0], [0.5, 0.5]) == pytest.approx(LOG2)
        assert kl_divergence([0.5, 0.5], [1, 0]) == math.inf


@settings(max_examples=100, deadline=None)
@given(st.integers(1, 16), st.integers(0, 10**6))
def test_chi2_nonnegative_zero_iff_equal(K, seed):
    pd, pg = random_pair(seed, 0, K)
    v = pearson_chi2_mix(pd, pg)
    assert v >= 0
    if np.array_equal(pd.probs, pg.probs):
        assert v == 0
    else:
        assert v > 0
