import itertools
import math

import mpmath
import numpy as np
import pytest

from theta_multiplier import theta as th

I2 = np.eye(2, dtype=int)
S = np.array([[0, -1], [1, 0]])
T2 = np.array([[1, 2], [0, 1]])


def jtheta(tau):
    with mpmath.workdps(30):
        return complex(mpmath.jtheta(3, 0, mpmath.exp(1j * mpmath.pi * mpmath.mpc(tau))))


def brute_theta(tau, N=12):
    # independent oracle: plain extended-precision lattice sum
    tau = mpmath.matrix(np.asarray(tau).tolist())
    g = tau.rows
    total = mpmath.mpc(0)
    with mpmath.workdps(30):
        for n in itertools.product(range(-N, N + 1), repeat=g):
            v = mpmath.matrix(n)
            total += mpmath.exp(1j * mpmath.pi * (v.T * tau * v)[0])
    return complex(total)


@pytest.mark.parametrize(
    "M, member",
    [(S, True), ([[1, 1], [0, 1]], False), (T2, True), (np.eye(4, dtype=int), True)],
)
def test_is_theta_group_int_examples(M, member):
    assert th.is_theta_group_int(th.IntSymplectic(M)) is member


def test_non_symplectic_rejected():
    with pytest.raises(th.NotSymplectic):
        th.IntSymplectic([[2, 0], [0, 1]])


def test_siegel_point_validation():
    with pytest.raises(th.NotPositiveDefinite):
        th.SiegelPoint([[1j, 0], [0, -1j]])
    p = th.SiegelPoint([[1j, 0.2], [0.2, 1j]])
    assert th.SiegelPoint.from_json(p.to_json()).tau.tolist() == p.tau.tolist()


def test_mobius_examples(rng):
    tau = th.SiegelPoint([[0.3 + 1.2j]])
    assert np.allclose(th.mobius_act(th.IntSymplectic(I2), tau).tau, tau.tau)
    assert np.allclose(th.mobius_act(th.IntSymplectic(S), th.SiegelPoint([[1j]])).tau, [[1j]])
    # block diagonal action on diagonal tau
    M1, M2 = S, T2
    M = np.zeros((4, 4), dtype=int)
    M[np.ix_([0, 2], [0, 2])] = M1
    M[np.ix_([1, 3], [1, 3])] = M2
    t1, t2 = 0.1 + 0.9j, -0.4 + 1.3j
    out = th.mobius_act(th.IntSymplectic(M), th.SiegelPoint(np.diag([t1, t2]))).tau
    assert np.allclose(out, np.diag([-1 / t1, t2 + 2]))


def test_mobius_composition(rng):
    for g in (1, 2):
        a = th.random_theta_group_element(g, 4, rng.integers(1 << 30))
        b = th.random_theta_group_element(g, 4, rng.integers(1 << 30))
        tau = th.random_siegel_point(g, rng)
        lhs = th.mobius_act(a @ b, tau).tau
        rhs = th.mobius_act(a, th.mobius_act(b, tau)).tau
        assert np.allclose(lhs, rhs, atol=1e-9)


def test_truncation_radius_examples():
    N = th.truncation_radius([[1.0]], 1e-12)
    assert N <= 4
    # direct tail summation oracle
    assert 2 * sum(math.exp(-math.pi * n * n) for n in range(N + 1, N + 40)) < 1e-12
    assert th.truncation_radius([[10.0]], 1e-12) <= N
    for tol in (1e-6, 1e-9, 1e-12):
        assert th.truncation_radius([[1.0]], tol / 2) >= th.truncation_radius([[1.0]], tol)
    with pytest.raises(ValueError):
        th.truncation_radius([[1.0]], 0)


def test_tail_bound_dominates_true_tail(rng):
    for g in (1, 2):
        Y = th.random_siegel_point(g, rng).tau.imag
        mu = th.min_eigenvalue_bound(Y)
        assert mu <= np.linalg.eigvalsh(Y)[0]
        for N in range(3):
            true_tail = sum(
                math.exp(-math.pi * float(np.array(n) @ Y @ np.array(n)))
                for n in itertools.product(range(-12, 13), repeat=g)
                if max(map(abs, n)) > N
            )
            assert true_tail <= th.tail_bound(g, mu, N)


def test_theta_at_i():
    v = th.theta_value(th.SiegelPoint([[1j]]))
    assert abs(v.value - 1.086434811213308) < 1e-14
    assert abs(v.value - jtheta(1j)) <= v.error_bound


def test_theta_at_10i():
    v = th.theta_value(th.SiegelPoint([[10j]]))
    assert abs(v.value - (1 + 2 * math.exp(-10 * math.pi))) < 1e-12
    assert round(v.value.real, 10) == 1.0


@pytest.mark.parametrize("tau", [0.3 + 0.8j, -1.7 + 0.5j, 5.25 + 2j, 0.5 + 0.3j])
def test_theta_genus_one_against_mpmath(tau):
    v = th.theta_value(th.SiegelPoint([[tau]]), tol=1e-13)
    assert abs(v.value - jtheta(tau)) <= v.error_bound + 1e-15


def test_theta_factorizes_on_diagonal(rng):
    for _ in range(5):
        t1, t2 = th.random_siegel_point(1, rng).tau[0, 0], th.random_siegel_point(1, rng).tau[0, 0]
        v = th.theta_value(th.SiegelPoint(np.diag([t1, t2])))
        a, b = th.theta_value(th.SiegelPoint([[t1]])), th.theta_value(th.SiegelPoint([[t2]]))
        bound = v.error_bound + abs(a.value) * b.error_bound + abs(b.value) * a.error_bound + 1e-14
        assert abs(v.value - a.value * b.value) <= bound


def test_theta_genus_two_against_brute_force():
    tau = np.array([[0.4 + 1.1j, 0.3 + 0.2j], [0.3 + 0.2j, -0.7 + 0.9j]])
    v = th.theta_value(th.SiegelPoint(tau))
    assert abs(v.value - brute_theta(tau)) <= v.error_bound + 1e-14


def test_truncation_stability(rng):
    for g in (1, 2):
        for _ in range(10):
            tau = th.random_siegel_point(g, rng)
            v = th.theta_value(tau, 1e-10)
            w = th.theta_value(tau, radius=2 * v.truncation_radius)
            assert abs(v.value - w.value) < v.error_bound


def test_residual_examples(rng):
    tau = th.random_siegel_point(2, rng)
    assert th.functional_equation_residual(th.IntSymplectic(np.eye(4, dtype=int)), tau) < 1e-14
    rep = th.functional_equation_report(th.IntSymplectic(S), th.SiegelPoint([[2j]]))
    assert rep.lam == 3 and rep.residual < 1e-10
    rep = th.functional_equation_report(th.IntSymplectic(T2), th.SiegelPoint([[0.3 + 0.7j]]))
    assert rep.lam == 0 and rep.residual < 1e-12


def test_genus_one_s_formula():
    # theta(-1/tau)^2 = (tau / i) theta(tau)^2
    for tau in (2j, 1 + 1j, 0.3 + 1.7j):
        lhs = th.theta_value(th.SiegelPoint([[-1 / tau]])).value ** 2
        rhs = (tau / 1j) * th.theta_value(th.SiegelPoint([[tau]])).value ** 2
        assert abs(lhs - rhs) / abs(rhs) < 1e-10


def test_residual_rejects_non_theta_group():
    with pytest.raises(th.NotInThetaGroup):
        th.functional_equation_residual(th.IntSymplectic([[1, 1], [0, 1]]), th.SiegelPoint([[1j]]))


def test_random_theta_group_element_contract():
    assert np.array_equal(th.random_theta_group_element(2, 0, 3).M, np.eye(4, dtype=int))
    a = th.random_theta_group_element(2, 8, 17)
    assert np.array_equal(a.M, th.random_theta_group_element(2, 8, 17).M)
    assert th.is_theta_group_int(a)


@pytest.mark.parametrize("g", [1, 2, 3])
def test_sweep(g, rng):
    worst = 0.0
    for _ in range(6 if g < 3 else 2):
        M = th.random_theta_group_element(g, 6, rng.integers(1 << 30))
        worst = max(worst, th.functional_equation_residual(M, th.random_siegel_point(g, rng)))
    assert worst < 1e-9
