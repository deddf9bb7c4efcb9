import itertools

import numpy as np
import pytest

from theta_multiplier import linalg as la
from theta_multiplier import symplectic as sp

from conftest import CONFIGS, sample_member

S = [[0, -1], [1, 0]]
T = [[1, 1], [0, 1]]


def zero_count(form):
    n = form.space.dim
    return sum(sp.eval_q(form, v) == 0 for v in itertools.product((0, 1), repeat=n))


def test_make_standard_genus_one():
    space, even = sp.make_standard(1, "even")
    assert np.array_equal(space.J, la.z4([[0, 1], [-1, 0]]))
    for x, y in itertools.product((0, 1), repeat=2):
        assert sp.eval_q(even, [x, y]) == (x * y) % 2
    _, odd = sp.make_standard(1, "odd")
    for x, y in itertools.product((0, 1), repeat=2):
        assert sp.eval_q(odd, [x, y]) == (x * x + y * y + x * y) % 2


def test_make_standard_genus_two_even():
    _, form = sp.make_standard(2, "even")
    for v in itertools.product((0, 1), repeat=4):
        assert sp.eval_q(form, v) == (v[0] * v[2] + v[1] * v[3]) % 2
    assert sp.arf_parity(form) == "even"


@pytest.mark.parametrize("g, parity", CONFIGS + [(4, "even"), (4, "odd")])
def test_arf_parity_by_zero_count(g, parity):
    form = sp.standard_form(g, parity)
    zeros = zero_count(form)
    assert zeros in (2 ** (2 * g - 1) + 2 ** (g - 1), 2 ** (2 * g - 1) - 2 ** (g - 1))
    assert sp.arf_parity(form) == parity
    assert (zeros > 2 ** (2 * g - 1)) == (parity == "even")


def test_arf_genus_one_zero_sets():
    assert zero_count(sp.standard_form(1, "even")) == 3
    assert zero_count(sp.standard_form(1, "odd")) == 1


@pytest.mark.parametrize(
    "p1, p2, expected",
    [("odd", "odd", "even"), ("even", "even", "even"), ("even", "odd", "odd")],
)
def test_arf_direct_sum(p1, p2, expected):
    form = sp.direct_sum_form(sp.standard_form(1, p1), sp.standard_form(1, p2))
    assert sp.arf_parity(form) == expected
    assert zero_count(form) == (10 if expected == "even" else 6)


def test_polarization_is_psi_bar(rng):
    for g, parity in CONFIGS:
        form = sp.standard_form(g, parity)
        for _ in range(20):
            u, x = rng.integers(0, 2, size=(2, 2 * g))
            polar = (sp.eval_q(form, u + x) - sp.eval_q(form, u) - sp.eval_q(form, x)) % 2
            assert polar == form.space.psi_bar(u, x)


def test_eval_psi_alternating(rng):
    space = sp.SymplecticSpace(3)
    for _ in range(20):
        u, x = rng.integers(0, 4, size=(2, 6))
        assert sp.eval_psi(space, u, u) == 0
        assert (sp.eval_psi(space, u, x) + sp.eval_psi(space, x, u)) % 4 == 0


@pytest.mark.parametrize(
    "m, parity, member",
    [(S, "even", True), (T, "even", False), (T, "odd", True), (S, "odd", True)],
)
def test_is_member_examples(m, parity, member):
    assert sp.is_member(sp.standard_form(1, parity), m) is member


def test_is_member_rejects_non_symplectic():
    assert not sp.is_member(sp.standard_form(1, "even"), [[1, 0], [0, 3]])


def test_transvection_examples():
    even = sp.standard_form(1, "even")
    assert np.array_equal(sp.transvection(even, [1, 1]).mat, la.z4([[0, 1], [-1, 2]]))
    odd = sp.standard_form(1, "odd")
    assert np.array_equal(sp.transvection(odd, [1, 0]).mat, la.z4(T))


def test_transvection_needs_anisotropic_vector():
    with pytest.raises(sp.IsotropicVector):
        sp.transvection(sp.standard_form(1, "even"), [1, 0])


@pytest.mark.parametrize("g, parity", CONFIGS)
def test_transvection_properties(g, parity, rng):
    form = sp.standard_form(g, parity)
    I = la.eye(2 * g)
    for _ in range(20):
        v = sp.random_anisotropic(form, rng)
        t = sp.transvection(form, v)
        # t_v^2 = I + 2 v v^T J lies in Gamma(2)
        square = (t @ t).mat
        assert np.array_equal(square % 2, I % 2)
        gamma = sample_member(form, rng)
        conj = gamma @ t @ gamma.inverse()
        assert conj == sp.transvection(form, la.mul_z4(gamma.mat, v))


def test_dickson_examples(rng):
    even = sp.standard_form(1, "even")
    assert sp.dickson(even, np.eye(2, dtype=int)) == 0
    assert sp.dickson(even, [[0, 1], [1, 0]]) == 1
    for g, parity in CONFIGS:
        form = sp.standard_form(g, parity)
        v = sp.random_anisotropic(form, rng)
        assert sp.dickson(form, sp.orthogonal_transvection(form.space, v)) == 1


def test_dickson_is_a_homomorphism(rng):
    for g, parity in CONFIGS:
        form = sp.standard_form(g, parity)
        for _ in range(10):
            a, b = sample_member(form, rng), sample_member(form, rng)
            d = sp.dickson(form, (a @ b).reduce())
            assert d == (sp.dickson(form, a.reduce()) + sp.dickson(form, b.reduce())) % 2


def test_gamma2_examples():
    form = sp.standard_form(1, "even")
    assert sp.gamma2_element(form, np.zeros((2, 2), dtype=int)) == sp.identity(form)
    assert np.array_equal(sp.gamma2_element(form, [[0, 1], [1, 0]]).mat, la.z4(-np.eye(2, dtype=int)))
    elem = sp.gamma2_element(form, [[1, 0], [0, 0]])
    assert np.array_equal(elem.mat, la.z4([[1, 0], [2, 1]]))
    assert np.array_equal(elem.reduce(), la.eye(2) % 2)


def test_gamma2_rejects_asymmetric():
    with pytest.raises(sp.NotSymmetric):
        sp.gamma2_element(sp.standard_form(1, "even"), [[0, 1], [0, 0]])


@pytest.mark.parametrize("g", [1, 2, 3])
def test_gamma2_has_expected_order(g):
    # Gamma(2) is elementary abelian of rank g(2g+1)
    form = sp.standard_form(g, "even")
    n = 2 * g
    seen = set()
    basis = []
    for i in range(n):
        for j in range(i, n):
            M = np.zeros((n, n), dtype=int)
            M[i, j] = M[j, i] = 1
            basis.append(sp.gamma2_element(form, M).mat)
    for m in basis:
        assert np.array_equal(la.mul_z4(m, m), la.eye(n))
    if g <= 2:
        for coeffs in itertools.product((0, 1), repeat=len(basis)):
            m = la.eye(n)
            for c, b in zip(coeffs, basis):
                if c:
                    m = la.mul_z4(m, b)
            seen.add(m.tobytes())
        assert len(seen) == 2 ** (g * (2 * g + 1))


def test_random_element_contract():
    form = sp.standard_form(2, "odd")
    assert sp.random_element(form, 0, 5) == sp.identity(form)
    assert sp.random_element(form, 7, 11) == sp.random_element(form, 7, 11)
    with pytest.raises(ValueError):
        sp.random_element(form, -1, 0)


def test_group_closure(rng):
    for g, parity in CONFIGS:
        form = sp.standard_form(g, parity)
        a, b = sample_member(form, rng), sample_member(form, rng)
        assert sp.is_member(form, (a @ b).mat)
        assert (a @ a.inverse()) == sp.identity(form)


def test_reduction_is_a_homomorphism(rng):
    for _ in range(20):
        a, b = rng.integers(0, 4, size=(2, 4, 4))
        assert np.array_equal(la.mul_z4(a, b) % 2, la.mul_f2(a % 2, b % 2))


def test_direct_sum_is_member(rng):
    f1, f2 = sp.standard_form(1, "odd"), sp.standard_form(2, "even")
    a, b = sample_member(f1, rng), sample_member(f2, rng)
    big = sp.direct_sum(a, b)
    assert big.form == sp.direct_sum_form(f1, f2)
    assert big.form.parity == "odd"
