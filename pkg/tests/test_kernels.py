import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from aqe import kernels, specfun

compiled = pytest.mark.skipif(kernels._compiled is None, reason="compiled extension not built")


def test_backend_selection():
    assert kernels.BACKEND in ("cython", "python")
    assert kernels.backend_module("python") is kernels._kbessel_py
    with pytest.raises(ValueError):
        kernels.backend_module("fortran")


def test_python_kscaled_matches_bessel():
    x = np.array([0.5, 3.0, 12.0, 30.0])
    for t in (0.0, 9.5337, 14.0):
        got = kernels.kscaled(t, x, "python") * np.exp(-0.5 * np.pi * t)
        ref = np.array([specfun.bessel_k_it(t, v) for v in x])
        assert np.allclose(got, ref, rtol=1e-9, atol=1e-15)


@compiled
@given(st.floats(0.0, 40.0), st.lists(st.floats(1e-3, 80.0), min_size=1, max_size=20))
@settings(max_examples=60, deadline=None)
def test_kscaled_backends_agree(t, xs):
    x = np.array(xs)
    a = kernels.kscaled(t, x, "cython")
    b = kernels.kscaled(t, x, "python")
    assert np.allclose(a, b, rtol=1e-12, atol=1e-15)


@compiled
@pytest.mark.parametrize("odd", [False, True])
def test_maass_sum_backends_agree(odd):
    rng = np.random.default_rng(1)
    coeffs = rng.normal(size=80)
    x = rng.uniform(-0.5, 0.5, 200)
    y = rng.uniform(0.8, 3.0, 200)
    a = kernels.maass_sum(9.5337, coeffs, x, y, odd, backend="cython")
    b = kernels.maass_sum(9.5337, coeffs, x, y, odd, backend="python")
    assert np.allclose(a, b, rtol=1e-11, atol=1e-13)
