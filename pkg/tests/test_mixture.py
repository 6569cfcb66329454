import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from tdamix.density import DensityEstimate, imse
from tdamix.errors import ComponentFactoryError
from tdamix.mixture import MixtureModel, build_equal_mixture, mix_evaluate, select_g

XS = np.linspace(-6, 6, 301)


def comp(center, h=0.5):
    return DensityEstimate([center - 0.3, center, center + 0.4], h)


class TestMixtureModel:
    def test_validation(self):
        c = comp(0.0)
        with pytest.raises(ValueError):
            MixtureModel([0.5, 0.4], [c, c])  # sum != 1
        with pytest.raises(ValueError):
            MixtureModel([1.0, 0.0], [c, c])  # zero proportion
        with pytest.raises(ValueError):
            MixtureModel([1.0], [c, c])
        with pytest.raises(ValueError):
            MixtureModel([], [])

    def test_weights_read_only(self):
        m = build_equal_mixture([comp(0.0), comp(1.0)])
        with pytest.raises(ValueError):
            m.weights[0] = 1.0

    def test_two_identical_components(self):
        c = comp(0.2)
        np.testing.assert_array_equal(MixtureModel([0.3, 0.7], [c, c])(XS), c(XS))

    def test_weighted_sum(self):
        a, b = comp(-1.0), comp(2.0)
        np.testing.assert_allclose(MixtureModel([0.25, 0.75], [a, b])(XS), 0.25 * a(XS) + 0.75 * b(XS),
                                   rtol=1e-15)

    def test_scalar(self):
        m = build_equal_mixture([comp(0.0), comp(1.0)])
        assert isinstance(mix_evaluate(m, 0.5), float)

    @given(st.lists(st.floats(-3, 3), min_size=1, max_size=8), st.randoms(use_true_random=False))
    def test_convexity_and_permutation(self, centers, rnd):
        comps = [comp(c) for c in centers]
        m = build_equal_mixture(comps)
        vals = np.array([c(XS) for c in comps])
        f = m(XS)
        assert np.all(f >= vals.min(0) - 1e-15) and np.all(f <= vals.max(0) + 1e-15)
        order = list(range(len(comps)))
        rnd.shuffle(order)
        assert np.max(np.abs(build_equal_mixture([comps[i] for i in order])(XS) - f)) <= 1e-12

    @pytest.mark.parametrize("g", range(1, 11))
    def test_equal_weights(self, g):
        m = build_equal_mixture([comp(float(i)) for i in range(g)])
        assert m.g == g and np.all(np.abs(m.weights - 1 / g) <= 1e-9)

    def test_seven_components(self):
        assert build_equal_mixture([comp(0.0)] * 7).weights[0] == pytest.approx(0.142857143, abs=1e-9)

    def test_g1_identity(self):
        c = comp(0.5)
        np.testing.assert_array_equal(build_equal_mixture([c])(XS), c(XS))

    def test_mixture_is_a_density(self):
        from tdamix.density import integrate

        m = build_equal_mixture([comp(-1.0), comp(1.5, 0.2)])
        assert integrate(m, -10, 10) == pytest.approx(1.0, abs=1e-6)


class TestSelectG:
    def test_degenerate_factory(self):
        ref = comp(0.0)
        rep = select_g(lambda g, run, i, rng: ref, [4, 2, 1], 3, ref, (-6, 6))
        assert rep.g_star == 1 and all(np.all(v == 0) for v in rep.raw.values())
        assert rep.g_values == [1, 2, 4]

    def test_prefers_right_component_count(self):
        # reference is an equal mix of two bumps; each component is one bump
        a, b = comp(-2.0, 0.3), comp(2.0, 0.3)
        ref = build_equal_mixture([a, b])

        def factory(g, run, i, rng):
            return a if i % 2 == 0 else b

        rep = select_g(factory, [1, 2, 3], 2, ref, (-6, 6))
        assert rep.g_star == 2 and rep.means[2] == 0.0

    def test_report_shape_and_means(self):
        ref = comp(0.0)

        def factory(g, run, i, rng):
            return comp(float(rng.normal(scale=0.5)))

        rep = select_g(factory, [1, 2, 3], 5, ref, (-6, 6), seed=3)
        for g in (1, 2, 3):
            assert rep.raw[g].shape == (5,)
            assert rep.means[g] == pytest.approx(rep.raw[g].mean())

    def test_workers_do_not_change_report(self):
        ref = comp(0.0)

        def factory(g, run, i, rng):
            return comp(float(rng.normal()))

        a = select_g(factory, range(1, 5), 4, ref, (-6, 6), seed=11, workers=1)
        b = select_g(factory, range(1, 5), 4, ref, (-6, 6), seed=11, workers=4)
        for g in a.g_values:
            assert a.raw[g].tobytes() == b.raw[g].tobytes()

    def test_factory_error_carries_context(self):
        def factory(g, run, i, rng):
            if g == 2 and run == 1:
                raise RuntimeError("boom")
            return comp(0.0)

        with pytest.raises(ComponentFactoryError, match=r"g=2, run=1"):
            select_g(factory, [1, 2], 2, comp(0.0), (-6, 6))

    @pytest.mark.parametrize("kw", [dict(g_range=[]), dict(g_range=[0, 1]), dict(runs=0)])
    def test_bad_arguments(self, kw):
        args = dict(g_range=[1], runs=1)
        args.update(kw)
        with pytest.raises(ValueError):
            select_g(lambda *a: comp(0.0), args["g_range"], args["runs"], comp(0.0), (-1, 1))

    def test_imse_against_components(self):
        ref = comp(0.0)
        other = comp(1.0)
        rep = select_g(lambda g, run, i, rng: other, [1], 1, ref, (-6, 6))
        assert rep.means[1] == pytest.approx(imse(other, ref, (-6, 6)))
