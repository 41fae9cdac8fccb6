import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from heisengeo import homs
from heisengeo.errors import HeisenbergError
from heisengeo.group import HeisPoint
from heisengeo.norms import Koranyi, Lpa

# sup error of the best uniform linear fit of sin on [-10, 10]; computed once
# with the linear program in sine_minimax and frozen here
SINE_MINIMAX = 1.0


def sine_minimax():
    """sup error of the best line c0 + c1 x against sin on [-10, 10], by linear programming."""
    from scipy.optimize import linprog

    x = np.linspace(-10, 10, 4001)
    # variables (c0, c1, e): minimize e with |sin x - c0 - c1 x| <= e
    A = np.block([[-np.ones((x.size, 1)), -x[:, None], -np.ones((x.size, 1))], [np.ones((x.size, 1)), x[:, None], -np.ones((x.size, 1))]])
    b = np.concatenate([-np.sin(x), np.sin(x)])
    res = linprog([0, 0, 1], A_ub=A, b_ub=b, bounds=[(None, None)] * 3)
    return res.x[2]


def test_sine_minimax_oracle():
    assert sine_minimax() == pytest.approx(SINE_MINIMAX, abs=1e-6)


def test_identity_is_hom():
    assert homs.check_hom(homs.HomSpec.identity(2)).residual == 0.0
    assert homs.is_injective_hom(homs.HomSpec.identity(2)).injective


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 10_000), st.integers(1, 3), st.integers(1, 3), st.booleans())
def test_random_specs_are_injective_homs(seed, m, n, negative):
    m, n = min(m, n), max(m, n)
    spec = homs.random_hom_spec(np.random.default_rng(seed), m, n, negative)
    assert homs.check_hom(spec).residual <= 1e-12
    rep = homs.is_injective_hom(spec)
    assert rep.injective, rep.reason
    assert (spec.a < 0) == negative


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 10_000))
def test_homomorphism_property(seed):
    rng = np.random.default_rng(seed)
    spec = homs.random_hom_spec(rng, 2, 3)
    p = HeisPoint(rng.normal(size=4), rng.normal())
    q = HeisPoint(rng.normal(size=4), rng.normal())
    lhs = homs.apply_hom(spec, p * q)
    rhs = homs.apply_hom(spec, p) * homs.apply_hom(spec, q)
    assert lhs.allclose(rhs, atol=1e-10)


def test_non_injective_reasons():
    T = np.zeros((2, 2))
    assert homs.is_injective_hom(homs.HomSpec(T, 0.0, homs.HEISENBERG, 1, 1)).reason == "a = 0"
    bad = homs.HomSpec(np.eye(2), 2.0, homs.HEISENBERG, 1, 1)
    assert homs.check_hom(bad).residual == 1.0
    assert not homs.is_injective_hom(bad).injective


def test_euclidean_source():
    # R^1 -> H^1 along the x axis
    spec = homs.HomSpec(np.array([[1.0], [0.0]]), None, homs.EUCLIDEAN, 1, 1)
    assert homs.check_hom(spec).residual == 0.0
    assert homs.apply_hom(spec, [2.0]) == HeisPoint([2.0, 0.0], 0.0)


def test_spec_json():
    spec = homs.random_hom_spec(np.random.default_rng(0), 1, 2)
    back = homs.HomSpec.from_dict(spec.to_dict())
    assert np.array_equal(back.T, spec.T) and back.a == spec.a
    for key in ("T", "source", "m", "n", "a"):
        data = spec.to_dict()
        del data[key]
        with pytest.raises(HeisenbergError, match=repr(key)):
            homs.HomSpec.from_dict(data)


@pytest.mark.parametrize("b", [0.3, 0.5])
def test_swap_isometry(b):
    f, src, tgt, spec = homs.swap_map(b)
    assert homs.check_hom(spec).residual == 0.0
    assert homs.isometry_probe(f, src, tgt, 10_000, seed=1).worst_defect <= 1e-12


def test_sine_embedding_isometric_not_affine():
    f, src, tgt = homs.sine_map(2, 0.5)
    assert homs.isometry_probe(f, src, tgt, 10_000).worst_defect <= 1e-12
    fit = homs.fit_affine(f, src, tgt)
    assert not fit.is_affine and fit.residual >= 0.1 * SINE_MINIMAX


@pytest.mark.parametrize("name", ["pinf", "p1"])
def test_curve_maps_isometric_not_affine(name):
    f, src, tgt = homs.builtin_map(name, 1, 0.5)
    assert homs.isometry_probe(f, src, tgt, 5000).worst_defect <= 1e-9
    assert homs.fit_affine(f, src, tgt).residual > 0.1


def test_fit_recovers_parameters():
    rng = np.random.default_rng(7)
    for _ in range(20):
        spec = homs.random_hom_spec(rng, 1, 2)
        g = HeisPoint(rng.uniform(-10, 10, 4), rng.uniform(-10, 10))
        rep = homs.fit_affine(homs.affine_map(spec, g), homs.heisenberg(Koranyi(), 1), homs.heisenberg(Koranyi(), 2))
        assert rep.translation.allclose(g, atol=1e-12)
        assert np.allclose(rep.fitted.T, spec.T, atol=1e-12)
        assert rep.fitted.a == pytest.approx(spec.a, abs=1e-12)
        # distance residual: sqrt of the rounding in t, so ~1e-7 rather than 1e-15
        assert rep.residual < 1e-5


def test_fit_affine_is_exact_for_homs_without_translation():
    spec = homs.HomSpec(np.array([[1.0, -1.0], [1.0, 1.0]]), 2.0, homs.HEISENBERG, 1, 1)
    rep = homs.fit_affine(homs.affine_map(spec), homs.heisenberg(Lpa(1.0, 0.5), 1), homs.heisenberg(Lpa(math.inf, 0.3), 1))
    assert rep.residual == 0.0 and rep.is_affine
