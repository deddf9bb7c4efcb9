"""Riemann theta series on the Siegel upper half-space and the squared
functional equation ``theta(M tau)^2 = i^lambda(M) det(C tau + D) theta(tau)^2``
for M in the theta group (AB^T and CD^T with even diagonal).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .character import theta_lambda
from .symplectic import is_member, standard_form


class NotPositiveDefinite(ValueError):
    pass


class SingularDenominator(ArithmeticError):
    pass


class NotInThetaGroup(ValueError):
    pass


class ReductionNotMember(RuntimeError):
    pass


class NotSymplectic(ValueError):
    pass


@dataclass(frozen=True, eq=False)
class SiegelPoint:
    tau: np.ndarray

    def __post_init__(self):
        tau = np.atleast_2d(np.asarray(self.tau, dtype=complex))
        if tau.shape[0] != tau.shape[1]:
            raise ValueError(f"tau must be square, got shape {tau.shape}")
        tau = (tau + tau.T) / 2
        Y = tau.imag
        for k in range(1, Y.shape[0] + 1):
            if np.linalg.det(Y[:k, :k]) <= 0:
                raise NotPositiveDefinite("Im(tau) is not positive definite")
        tau.setflags(write=False)
        object.__setattr__(self, "tau", tau)

    @property
    def g(self) -> int:
        return self.tau.shape[0]

    @classmethod
    def from_json(cls, obj: dict) -> SiegelPoint:
        return cls(np.asarray(obj["re"], dtype=float) + 1j * np.asarray(obj["im"], dtype=float))

    def to_json(self) -> dict:
        return {"re": self.tau.real.tolist(), "im": self.tau.imag.tolist()}


@dataclass(frozen=True, eq=False)
class IntSymplectic:
    M: np.ndarray

    def __post_init__(self):
        M = np.asarray(self.M, dtype=object)
        n = M.shape[0]
        if M.shape != (n, n) or n % 2:
            raise ValueError("symplectic matrix must be square of even size")
        M = M.astype(np.int64) if all(abs(int(x)) < 2**31 for x in M.flat) else M
        if not np.array_equal(M.T @ int_J(n // 2) @ M, int_J(n // 2)):
            raise NotSymplectic("M^T J M != J")
        object.__setattr__(self, "M", M)

    @property
    def g(self) -> int:
        return self.M.shape[0] // 2

    @property
    def blocks(self):
        g = self.g
        M = self.M
        return M[:g, :g], M[:g, g:], M[g:, :g], M[g:, g:]

    def __matmul__(self, other: IntSymplectic) -> IntSymplectic:
        return IntSymplectic(self.M @ other.M)


def int_J(g: int) -> np.ndarray:
    J = np.zeros((2 * g, 2 * g), dtype=np.int64)
    J[:g, g:] = np.eye(g, dtype=np.int64)
    J[g:, :g] = -np.eye(g, dtype=np.int64)
    return J


def is_theta_group_int(M: IntSymplectic) -> bool:
    A, B, C, D = M.blocks
    return bool(np.all(np.diag(A @ B.T) % 2 == 0) and np.all(np.diag(C @ D.T) % 2 == 0))


def automorphy_factor(M: IntSymplectic, tau: SiegelPoint) -> complex:
    _, _, C, D = M.blocks
    return complex(np.linalg.det(C.astype(float) @ tau.tau + D.astype(float)))


def mobius_act(M: IntSymplectic, tau: SiegelPoint) -> SiegelPoint:
    """``(A tau + B)(C tau + D)^{-1}``."""
    A, B, C, D = (x.astype(float) for x in M.blocks)
    num = A @ tau.tau + B
    den = C @ tau.tau + D
    if np.linalg.cond(den) > 1e12:
        raise SingularDenominator("C tau + D is numerically singular")
    # X den = num  <=>  den^T X^T = num^T
    X = np.linalg.solve(den.T, num.T).T
    return SiegelPoint(X)


def min_eigenvalue_bound(Y: np.ndarray) -> float:
    """A lower bound for the smallest eigenvalue of the symmetric matrix Y,
    certified by a Cholesky factorization of Y - mu I."""
    Y = np.asarray(Y, dtype=float)
    n = Y.shape[0]
    radii = np.sum(np.abs(Y), axis=1) - np.abs(np.diag(Y))
    gersh = float(np.min(np.diag(Y) - radii))
    mu = float(np.linalg.eigvalsh(Y)[0]) * (1 - 1e-6)
    while mu > 0:
        try:
            np.linalg.cholesky(Y - mu * np.eye(n))
            return max(mu, gersh)
        except np.linalg.LinAlgError:
            mu /= 2
            if mu < 1e-300:
                break
    if gersh > 0:
        return gersh
    raise NotPositiveDefinite("imaginary part is not positive definite")


def tail_bound(g: int, mu: float, N: int) -> float:
    """Bound for sum over ||n||_inf > N of exp(-pi mu |n|^2) in Z^g.

    With s = sum_k exp(-pi mu k^2) <= 1 + mu^{-1/2} and b its truncation to
    |k| <= N, the box tail is s^g - b^g <= g s^{g-1} (s - b), and s - b is
    bounded by a geometric series starting at k = N + 1.
    """
    first = math.exp(-math.pi * mu * (N + 1) ** 2)
    ratio = math.exp(-math.pi * mu * (2 * N + 3))
    one_dim = 2 * first / (1 - ratio)
    s = 1 + 1 / math.sqrt(mu)
    return g * s ** (g - 1) * one_dim


def truncation_radius(im_tau, tol: float) -> int:
    if tol <= 0:
        raise ValueError("tol must be positive")
    Y = np.atleast_2d(np.asarray(im_tau, dtype=float))
    mu = min_eigenvalue_bound(Y)
    g = Y.shape[0]
    N = 0
    while tail_bound(g, mu, N) >= tol:
        N += 1
    return N


@dataclass(frozen=True)
class ThetaValue:
    value: complex
    truncation_radius: int
    error_bound: float


def _reduce_real_part(tau: np.ndarray) -> np.ndarray:
    # theta(tau + B) = theta(tau) for integral symmetric B with even diagonal
    X = tau.real.copy()
    g = X.shape[0]
    for i in range(g):
        X[i, i] -= 2 * np.round(X[i, i] / 2)
        for j in range(i + 1, g):
            shift = np.round(X[i, j])
            X[i, j] -= shift
            X[j, i] -= shift
    return X + 1j * tau.imag


def lattice_sum(tau: np.ndarray, N: int) -> tuple[complex, float]:
    """Sum of exp(pi i n^T tau n) over the box ||n||_inf <= N.

    Returns the sum and an estimate of its floating-point error: each term
    carries a relative error of about (pi |n^T tau n| + 8) ulps from the
    exponential, and pairwise summation adds log2(#terms) ulps of the
    absolute sum.
    """
    g = tau.shape[0]
    k = np.arange(-N, N + 1, dtype=float)
    if g == 1:
        rest_quad, rest_cross = np.zeros(1), np.zeros(1)
    else:
        grids = np.meshgrid(*([k] * (g - 1)), indexing="ij")
        rest = np.stack([x.ravel() for x in grids], axis=1)
        rest_quad = np.einsum("ki,ij,kj->k", rest, tau[1:, 1:], rest)
        rest_cross = 2 * rest @ tau[0, 1:]
    total = 0j
    weight = 0.0
    # one slice per value of the first coordinate keeps memory at (2N+1)^(g-1)
    for n0 in k:
        quad = tau[0, 0] * n0 * n0 + n0 * rest_cross + rest_quad
        terms = np.exp(1j * np.pi * quad)
        total += np.sum(terms)
        weight += float(np.sum(np.abs(terms) * (np.pi * np.abs(quad) + 8)))
    n_terms = (2 * N + 1) ** g
    eps = np.finfo(float).eps
    return complex(total), eps * (weight + math.log2(n_terms + 1) * weight)


def theta_value(tau: SiegelPoint, tol: float = 1e-12, radius: int | None = None) -> ThetaValue:
    """Truncated theta series.  ``error_bound`` is the tail bound of the
    discarded terms plus the rounding estimate of the retained ones."""
    t = _reduce_real_part(tau.tau)
    mu = min_eigenvalue_bound(t.imag)
    N = truncation_radius(t.imag, tol) if radius is None else radius
    value, rounding = lattice_sum(t, N)
    return ThetaValue(value, N, tail_bound(tau.g, mu, N) + rounding)


def reduce_mod4(M: IntSymplectic) -> np.ndarray:
    return np.asarray(M.M % 4, dtype=np.int64)


def theta_group_lambda(M: IntSymplectic) -> int:
    """lambda of the reduction of M into the theta group of the standard even form."""
    if not is_theta_group_int(M):
        raise NotInThetaGroup("AB^T or CD^T has an odd diagonal entry")
    form = standard_form(M.g, "even")
    mat = reduce_mod4(M)
    if not is_member(form, mat):
        raise ReductionNotMember("reduction mod 4 does not preserve the even form")
    return theta_lambda(form, mat)


@dataclass(frozen=True)
class ResidualReport:
    residual: float
    lam: int
    det_factor: complex

    def to_json(self) -> dict:
        return {
            "residual": self.residual,
            "lambda": self.lam,
            "det_factor": [self.det_factor.real, self.det_factor.imag],
        }


def functional_equation_report(M: IntSymplectic, tau: SiegelPoint, tol: float = 1e-12) -> ResidualReport:
    lam = theta_group_lambda(M)
    det = automorphy_factor(M, tau)
    lhs = theta_value(mobius_act(M, tau), tol).value ** 2
    base = det * theta_value(tau, tol).value ** 2
    residual = abs(lhs - (1j**lam) * base) / abs(base)
    return ResidualReport(float(residual), lam, det)


def functional_equation_residual(M: IntSymplectic, tau: SiegelPoint, tol: float = 1e-12) -> float:
    return functional_equation_report(M, tau, tol).residual


# --- sampling ----------------------------------------------------------------


def _generators(g: int, rng: np.random.Generator) -> np.ndarray:
    """One random theta-group generator of Sp(2g, Z)."""
    I = np.eye(g, dtype=np.int64)
    Z = np.zeros((g, g), dtype=np.int64)
    kind = rng.integers(4)
    if kind == 0:  # full swap
        return np.block([[Z, -I], [I, Z]])
    if kind == 1:  # swap in a single coordinate
        i = rng.integers(g)
        E = np.zeros((g, g), dtype=np.int64)
        E[i, i] = 1
        return np.block([[I - E, -E], [E, I - E]])
    if kind == 2:  # translation by an even-diagonal symmetric B
        B = np.triu(rng.integers(-1, 2, size=(g, g)), 1)
        B = B + B.T + np.diag(2 * rng.integers(-1, 2, size=g))
        if rng.integers(2):
            return np.block([[I, B], [Z, I]])
        return np.block([[I, Z], [B, I]])
    # GL block diag(U, U^{-T}) with U elementary
    U = I.copy()
    if g > 1:
        i, j = rng.choice(g, size=2, replace=False)
        U[i, j] = rng.choice([-1, 1])
    Uinv_T = np.round(np.linalg.inv(U)).astype(np.int64).T
    return np.block([[U, Z], [Z, Uinv_T]])


def random_theta_group_element(g: int, word_length: int, seed=None) -> IntSymplectic:
    if word_length < 0:
        raise ValueError("word_length must be nonnegative")
    rng = np.random.default_rng(seed)
    M = np.eye(2 * g, dtype=np.int64)
    for _ in range(word_length):
        while True:
            gen = IntSymplectic(_generators(g, rng))
            if is_theta_group_int(gen):
                break
        M = M @ gen.M
    return IntSymplectic(M)


def random_siegel_point(g: int, rng: np.random.Generator) -> SiegelPoint:
    X = rng.uniform(-1, 1, size=(g, g))
    X = (X + X.T) / 2
    Q = rng.normal(size=(g, g))
    Y = Q.T @ Q + 0.5 * np.eye(g)
    return SiegelPoint(X + 1j * Y)
