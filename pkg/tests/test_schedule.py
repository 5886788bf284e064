import math
import random

import pytest

from seqrate import (CumulativeFunction, RateProfile, closed_form_curve,
                     concave_envelope, effective_crdf, majorizes,
                     min_distortion, rate_profile, segment_slopes,
                     split_rates, transmission_plan, SourceModel)

from helpers import (random_cldf, random_crdf, random_majorizing_pair,
                     random_sorted_majorizing_pair)


def F(*triples):
    return CumulativeFunction.from_knots(triples)


ERASURE_CURVE = closed_form_curve("erasure", SourceModel((0.5, 0.5)))
UNBOUNDED = CumulativeFunction.unbounded()


class TestRateProfile:
    def test_line_quarters(self):
        assert rate_profile(CumulativeFunction.line(1.0), 4).rates == (0.25,) * 4

    def test_front_loaded_step(self):
        assert rate_profile(CumulativeFunction.step(0.5, 1.0), 2).rates == (1.0, 0.0)

    def test_back_loaded_step(self):
        assert rate_profile(CumulativeFunction.step(1.0, 0.6), 2).rates == (0.0, 0.6)

    def test_total_matches_endpoint(self):
        rng = random.Random(1)
        for _ in range(50):
            g = random_crdf(rng)
            k = rng.randint(1, 9)
            assert rate_profile(g, k).total == pytest.approx(g.evaluate(1.0), abs=1e-12)

    def test_negative_rates_rejected(self):
        with pytest.raises(ValueError):
            RateProfile((0.2, -0.1))


class TestMajorizes:
    def test_front_loaded_dominates_even(self):
        assert majorizes((1.0, 0.0), (0.5, 0.5))

    def test_even_does_not_dominate_front_loaded(self):
        assert not majorizes((0.5, 0.5), (1.0, 0.0))

    def test_reflexive(self):
        assert majorizes((0.3, 0.2, 0.5), (0.3, 0.2, 0.5))

    def test_unequal_totals_fail(self):
        assert not majorizes((1.0, 0.0), (0.5, 0.4))

    def test_length_mismatch_is_an_error(self):
        with pytest.raises(ValueError):
            majorizes((1.0,), (0.5, 0.5))


class TestSplitRates:
    def test_hand_traced_front_loaded(self):
        m = split_rates((1.0, 0.0), (0.5, 0.5))
        assert m.rows == ((0.5,), (0.5, 0.0))

    def test_hand_traced_deferred(self):
        m = split_rates((0.3, 0.3), (0.0, 0.6))
        assert m.rows == ((0.0,), (0.3, 0.3))

    def test_equal_profiles_give_diagonal(self):
        m = split_rates((0.2, 0.5, 0.1), (0.2, 0.5, 0.1))
        assert m.rows == ((0.2,), (0.0, 0.5), (0.0, 0.0, 0.1))

    def test_non_majorizing_pair_rejected(self):
        with pytest.raises(ValueError):
            split_rates((0.5, 0.5), (1.0, 0.0))

    def test_reconstruction_identities(self):
        rng = random.Random(2)
        for _ in range(500):
            k = rng.randint(1, 10)
            x, y = random_majorizing_pair(rng, k)
            m = split_rates(x, y)
            assert all(v >= 0.0 for row in m.rows for v in row)
            for j, total in enumerate(m.block_totals()):
                assert total == pytest.approx(x[j], abs=1e-12)
            for i, total in enumerate(m.time_totals()):
                assert total == pytest.approx(y[i], abs=1e-12)

    def test_zero_pool_edge_case(self):
        m = split_rates((0.4, 0.0, 0.0), (0.4, 0.0, 0.0))
        assert m.rows == ((0.4,), (0.0, 0.0), (0.0, 0.0, 0.0))


class TestTransmissionPlan:
    def test_all_rate_at_the_end(self):
        g = CumulativeFunction.step(1.0, 0.6)
        plan = transmission_plan(g, UNBOUNDED, ERASURE_CURVE, 2)
        assert plan.description_rates == (0.3, 0.3)
        assert plan.transmit_rates == (0.0, 0.6)
        assert plan.split.rows == ((0.0,), (0.3, 0.3))
        assert plan.predicted_avg_distortion == pytest.approx(0.4, abs=1e-12)

    def test_worked_leakage_instance(self):
        g = CumulativeFunction.step(0.5, 1.0)
        l = F((0, 0, 0), (0.5, 0, 0.2), (1, 0.2, 1))
        plan = transmission_plan(g, l, ERASURE_CURVE, 2)
        assert plan.transmit_rates == pytest.approx((0.2, 0.0), abs=1e-12)
        assert plan.split.rows[0] == pytest.approx((0.2,), abs=1e-12)
        assert plan.split.rows[1] == (0.0, 0.0)
        assert plan.block_distortions == pytest.approx((0.6, 1.0), abs=1e-12)
        assert plan.predicted_avg_distortion == pytest.approx(0.8, abs=1e-12)

    def test_diagonal_plan_for_line(self):
        plan = transmission_plan(CumulativeFunction.line(1.0), UNBOUNDED, ERASURE_CURVE, 4)
        assert plan.description_rates == (0.25,) * 4
        for i in range(4):
            for j in range(i + 1):
                expected = 0.25 if i == j else 0.0
                assert plan.split.rows[i][j] == pytest.approx(expected, abs=1e-12)

    def test_cumulative_transmission_within_both_budgets(self):
        rng = random.Random(3)
        for _ in range(100):
            g, l = random_crdf(rng), random_cldf(rng)
            k = rng.randint(1, 8)
            plan = transmission_plan(g, l, ERASURE_CURVE, k)
            acc = 0.0
            for i, r in enumerate(plan.transmit_rates, start=1):
                acc += r
                assert acc <= g.evaluate(i / k) + 1e-9
                assert acc <= l.evaluate(i / k) + 1e-9

    def test_plan_average_equals_min_distortion_even_off_grid(self):
        # envelope kink at 0.5 while k = 3: the kink is inside block 2
        g = CumulativeFunction.step(0.5, 1.0)
        plan = transmission_plan(g, UNBOUNDED, ERASURE_CURVE, 3)
        md = min_distortion(g, UNBOUNDED, ERASURE_CURVE)
        assert plan.predicted_avg_distortion == pytest.approx(md, abs=1e-12)

    def test_plan_average_matches_min_distortion_randomly(self):
        rng = random.Random(4)
        for _ in range(100):
            g, l = random_crdf(rng), random_cldf(rng)
            k = rng.randint(1, 7)
            plan = transmission_plan(g, l, ERASURE_CURVE, k)
            md = min_distortion(g, l, ERASURE_CURVE)
            assert plan.predicted_avg_distortion == pytest.approx(md, abs=1e-9)

    def test_envelope_profile_majorizes_effective_profile(self):
        rng = random.Random(5)
        for _ in range(200):
            g, l = random_crdf(rng), random_cldf(rng)
            k = rng.randint(1, 9)
            geff = effective_crdf(g, l)
            desc = segment_slopes(concave_envelope(geff), k)
            avail = rate_profile(geff, k)
            assert majorizes(desc, avail, tol=1e-9)

    def test_json_shape(self):
        g = CumulativeFunction.step(1.0, 0.6)
        d = transmission_plan(g, UNBOUNDED, ERASURE_CURVE, 2).to_json_dict()
        assert set(d) == {"k", "blocks", "descriptions", "predicted_avg_distortion"}
        assert d["blocks"][1]["sent"] == [
            {"desc_block": 1, "rate": 0.3},
            {"desc_block": 2, "rate": 0.3},
        ]


class TestMajorizationInequality:
    def test_sorted_pairs_satisfy_convex_sums(self):
        rng = random.Random(6)
        for _ in range(500):
            k = rng.randint(1, 10)
            x, y = random_sorted_majorizing_pair(rng, k)
            assert majorizes(x, y, tol=1e-9)
            for f in (lambda t: t * t, math.exp, lambda t: max(0.0, t - 0.3)):
                assert sum(map(f, x)) >= sum(map(f, y)) - 1e-12
