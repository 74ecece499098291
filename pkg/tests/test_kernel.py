import csv
import math
from pathlib import Path

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from scipy import integrate

from deltaion.errors import DomainError
from deltaion.kernel import DEFAULT_KERNEL, ROT, KernelEvaluator, eval_M, eval_M_oracle

GOLDEN = Path(__file__).parent / "data" / "kernel_golden.csv"


def load_golden():
    with open(GOLDEN) as fh:
        rows = list(csv.DictReader(fh))
    s = np.array([float(r["s"]) for r in rows])
    m = np.array([float(r["re_M"]) + 1j * float(r["im_M"]) for r in rows])
    return s, m


def test_golden_table_agreement():
    s, m = load_golden()
    assert len(s) == 50
    assert np.max(np.abs(eval_M(s) - m)) < 1e-8


def test_small_argument_limit():
    assert abs(DEFAULT_KERNEL.regular_part(1e-8) - (-1j)) < 1e-4
    assert abs(DEFAULT_KERNEL.regular_part(1e-12) - (-1j)) < 1e-5


def test_branches_agree_at_crossover():
    s = np.linspace(0.8, 3.0, 23)
    k = KernelEvaluator()
    assert np.max(np.abs(k.small(s) - k.large(s))) < 1e-13


@pytest.mark.parametrize("crossover", [0.5, 1.0, 3.0])
def test_crossover_choice_is_immaterial(crossover):
    s = np.logspace(-3, 2, 40)
    assert np.max(np.abs(KernelEvaluator(crossover)(s) - eval_M(s))) < 1e-12


def test_crossover_range_enforced():
    with pytest.raises(DomainError):
        KernelEvaluator(crossover_s=10.0)


def test_large_argument_decay():
    s = np.array([1e3, 1e4, 1e5])
    ratio = np.abs(eval_M(s)) * s**1.5 * 2 * math.sqrt(math.pi)
    np.testing.assert_allclose(ratio, 1.0, rtol=3e-3)


@pytest.mark.parametrize("s", [0.0, -1.0, float("inf"), float("nan")])
def test_domain(s):
    with pytest.raises(DomainError):
        eval_M(s)


def test_scalar_and_array_shapes():
    assert isinstance(eval_M(1.0), complex)
    assert eval_M(np.ones((2, 3))).shape == (2, 3)


@given(st.floats(1e-3, 300.0))
def test_oracle_agrees_with_closed_form(s):
    assert abs(eval_M_oracle(s) - eval_M(s)) < 1e-9


def test_primitives_differentiate_to_kernel():
    s = np.array([0.3, 1.9, 2.1, 7.0, 40.0])
    d = 1e-5
    f1p, f2p = DEFAULT_KERNEL.primitive(s + d)
    f1m, f2m = DEFAULT_KERNEL.primitive(s - d)
    m = eval_M(s)
    np.testing.assert_allclose((f1p - f1m) / (2 * d), m, rtol=1e-7, atol=1e-9)
    np.testing.assert_allclose((f2p - f2m) / (2 * d), s * m, rtol=1e-7, atol=1e-9)


def test_primitive_small_s_behaviour():
    # int_0^s M ~ 2 exp(i pi/4) sqrt(s/pi)
    s = 1e-10
    f1, _ = DEFAULT_KERNEL.primitive(s)
    assert abs(f1[0] - 2 * ROT * math.sqrt(s / math.pi)) < 1e-9


def _quad(f, a, b):
    re = integrate.quad(lambda x: f(x).real, a, b, epsabs=1e-14, epsrel=1e-13, limit=200)[0]
    im = integrate.quad(lambda x: f(x).imag, a, b, epsabs=1e-14, epsrel=1e-13, limit=200)[0]
    return re + 1j * im


@pytest.mark.parametrize("h", [0.05, 0.3])
def test_cell_moments_match_quadrature(h):
    n = int(4.0 / h)
    A, B = DEFAULT_KERNEL.cell_moments(h, n)
    for m in (1, 2, n // 2, n):
        a = (m - 1) * h
        K = lambda s: 2j + eval_M(s)  # noqa: E731
        # the s^-1/2 endpoint in the first cell is handled by quad's QAGS extrapolation
        assert abs(A[m - 1] - _quad(K, a + 1e-300, a + h)) < 1e-10
        assert abs(B[m - 1] - _quad(lambda s: (s - a) * K(s), a + 1e-300, a + h)) < 1e-10
