"""Oriented isotropic lagrangians and the Johnson-Millson pairing.

An oriented lagrangian is stored by an ordered basis, the columns of a
``2g x g`` matrix over Z/4.  Two bases of the same submodule give the same
orientation when the change of basis has determinant 1.

The pairing is ``m(L1, L2) = sigma(L1, L2) + (g - dim(L1bar & L2bar)) - 1``
(mod 4).  For transversal pairs sigma is the determinant of the pairing
matrix ``psi(w_j, v_i)`` (``v`` a basis of L1, ``w`` a basis of L2).  For
the remaining pairs sigma is obtained from a lagrangian D transversal to
both; see :func:`sigma`.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np

from .character import theta_lambda
from .linalg import (
    det_z4,
    eye,
    intersect_dim_f2,
    invert_z4,
    mul_z4,
    solve_right_z4,
    unit_minor_rows,
    z4,
)
from .symplectic import (
    QuadraticForm,
    ThetaGroupElement,
    direct_sum_form,
    direct_sum_index,
    eval_q,
    random_element,
    standard_form,
)

# Row/column order of the pairing matrix in the transversal case.  "target_first"
# means entries psi(w_j, v_i); "source_first" means psi(v_i, w_j).  The two
# differ by (-1)^g.  Fixed by calibrate_sigma_order() against lambda.
SIGMA_ORDER = "target_first"

TRANSVERSAL_SEARCH_TRIES = 200


class InvalidLagrangian(ValueError):
    pass


class ExtensionFailed(RuntimeError):
    pass


class NoCommonTransversal(RuntimeError):
    pass


def _lagrangian_problems(form: QuadraticForm, A: np.ndarray) -> str | None:
    g = form.g
    if A.shape != (2 * g, g):
        return f"basis must consist of {g} vectors of length {2 * g}"
    if unit_minor_rows(A) is None:
        return "basis does not span a rank-g direct summand"
    if np.any(mul_z4(A.T, form.space.J, A)):
        return "psi does not vanish on the basis"
    Abar = A % 2
    for coeffs in itertools.product((0, 1), repeat=g):
        if eval_q(form, Abar @ np.array(coeffs)):
            return "q does not vanish on the reduction"
    return None


def is_oriented_lagrangian(form: QuadraticForm, basis) -> bool:
    A = z4(np.asarray(basis)).T if np.ndim(basis) == 2 else None
    if A is None:
        return False
    return _lagrangian_problems(form, A) is None


@dataclass(frozen=True, eq=False)
class OrientedLagrangian:
    form: QuadraticForm
    basis: np.ndarray  # 2g x g, columns are the basis vectors

    def __post_init__(self):
        A = z4(self.basis)
        problem = _lagrangian_problems(self.form, A)
        if problem:
            raise InvalidLagrangian(problem)
        A.setflags(write=False)
        object.__setattr__(self, "basis", A)

    @classmethod
    def from_vectors(cls, form: QuadraticForm, vectors) -> OrientedLagrangian:
        return cls(form, np.asarray(vectors, dtype=np.int64).T)

    @property
    def g(self) -> int:
        return self.form.g

    def vectors(self) -> list[list[int]]:
        return self.basis.T.tolist()

    def change_of_basis(self, other: OrientedLagrangian) -> np.ndarray:
        """C with ``other.basis = self.basis @ C``; ValueError if the spans differ."""
        return solve_right_z4(self.basis, other.basis)

    def same_submodule(self, other: OrientedLagrangian) -> bool:
        try:
            self.change_of_basis(other)
        except ValueError:
            return False
        return True

    def same_orientation(self, other: OrientedLagrangian) -> bool:
        return det_z4(self.change_of_basis(other)) == 1

    def reversed(self) -> OrientedLagrangian:
        A = self.basis.copy()
        A[:, 0] = (-A[:, 0]) % 4
        return OrientedLagrangian(self.form, A)

    def rebased(self, C) -> OrientedLagrangian:
        return OrientedLagrangian(self.form, mul_z4(self.basis, C))

    def image(self, gamma: ThetaGroupElement) -> OrientedLagrangian:
        return OrientedLagrangian(self.form, mul_z4(gamma.mat, self.basis))

    def reduction(self) -> np.ndarray:
        """Spanning set of the reduction mod 2, as rows."""
        return self.basis.T % 2

    def to_json(self) -> dict:
        return {"basis": self.vectors()}


def standard_lagrangian(form: QuadraticForm, which: str = "x") -> OrientedLagrangian:
    """Span of e_1..e_g (``which="x"``) or of e_{g+1}..e_{2g} (``which="y"``)."""
    g = form.g
    cols = eye(2 * g)[:, :g] if which == "x" else eye(2 * g)[:, g:]
    return OrientedLagrangian(form, cols)


def intersection_dim(L1: OrientedLagrangian, L2: OrientedLagrangian) -> int:
    return intersect_dim_f2(L1.reduction(), L2.reduction())


def _frame(L: OrientedLagrangian) -> np.ndarray:
    """Symplectic frame [v | w] whose first half is the basis of L.

    The result lies in the theta group of the standard even form: the dual
    vectors are chosen isotropic and q-isotropic.
    """
    A = L.basis
    g = L.g
    J = L.form.space.J
    rows = unit_minor_rows(A)
    if rows is None:
        raise ExtensionFailed("basis is not part of a Z/4 basis")
    # standard basis vectors off the unit minor complete A to a Z/4 basis
    B = eye(2 * g)[:, [i for i in range(2 * g) if i not in set(rows)]]
    X = mul_z4(A.T, J, B)
    W = mul_z4(B, invert_z4(X))
    Z = mul_z4(W.T, J, W)
    W = (W + mul_z4(A, np.triu(Z, 1))) % 4
    for j in range(g):
        if eval_q(L.form, W[:, j]):
            W[:, j] = (W[:, j] + A[:, j]) % 4
    F = np.hstack([A, W]) % 4
    if not np.array_equal(mul_z4(F.T, J, F), J):
        raise ExtensionFailed("could not extend the basis to a symplectic frame")
    return F


def transport_gamma(L1: OrientedLagrangian, L2: OrientedLagrangian) -> ThetaGroupElement:
    """An element of the theta group carrying L1 onto L2, orientation included."""
    if L1.form != L2.form:
        raise ValueError("lagrangians live in different spaces")
    F1, F2 = _frame(L1), _frame(L2)
    gamma = ThetaGroupElement(L1.form, mul_z4(F2, invert_z4(F1)))
    return gamma


def _pairing_sign(L1: OrientedLagrangian, L2: OrientedLagrangian, order: str) -> int:
    J = L1.form.space.J
    if order == "target_first":
        P = mul_z4(L2.basis.T, J, L1.basis)
    else:
        P = mul_z4(L1.basis.T, J, L2.basis)
    d = det_z4(P)
    if d not in (1, 3):
        raise ValueError("lagrangians are not transversal")
    return 1 if d == 1 else -1


def find_common_transversal(
    L1: OrientedLagrangian, L2: OrientedLagrangian, seed=0
) -> OrientedLagrangian:
    form = L1.form
    base = standard_lagrangian(form, "y")
    rng = np.random.default_rng(seed)
    for attempt in range(TRANSVERSAL_SEARCH_TRIES):
        gamma = random_element(form, min(attempt, 12), rng.integers(1 << 62))
        D = base.image(gamma)
        if intersection_dim(L1, D) == 0 and intersection_dim(L2, D) == 0:
            return D
    raise NoCommonTransversal(
        f"no lagrangian transversal to both found after {TRANSVERSAL_SEARCH_TRIES} tries"
    )


def sigma(
    L1: OrientedLagrangian, L2: OrientedLagrangian, seed=0, order: str | None = None
) -> int:
    """Orientation sign in {+1, -1}.

    Transversal pairs use the pairing determinant.  Otherwise, with
    k = dim(L1bar & L2bar):

    * g - k even: pick D transversal to both and return
      ``(-1)^((g - k) / 2) * sigma(L1, D) * sigma(L2, D)`` (for k = g this is
      the usual equal-reduction rule);
    * g - k odd: no common transversal exists (L1 and L2 lie in opposite
      families), so stabilize by a hyperbolic plane H = <e> + <f> and return
      ``sigma(L1 + <e>, L2 + <f>) * sigma(<e>, <f>)``.
    """
    order = order or SIGMA_ORDER
    g = L1.g
    k = intersection_dim(L1, L2)
    if k == 0:
        return _pairing_sign(L1, L2, order)
    if (g - k) % 2 == 0:
        D = find_common_transversal(L1, L2, seed)
        sign = -1 if (g - k) % 4 == 2 else 1
        return sign * _pairing_sign(L1, D, order) * _pairing_sign(L2, D, order)
    plane = standard_form(1, "even")
    e = standard_lagrangian(plane, "x")
    f = standard_lagrangian(plane, "y")
    big1, big2 = lagrangian_sum(L1, e), lagrangian_sum(L2, f)
    return sigma(big1, big2, seed, order) * _pairing_sign(e, f, order)


def lagrangian_sum(L1: OrientedLagrangian, L2: OrientedLagrangian) -> OrientedLagrangian:
    """L1 + L2 inside the direct sum, oriented by the concatenated bases."""
    g1, g2 = L1.g, L2.g
    idx1, idx2 = direct_sum_index(g1, g2)
    A = np.zeros((2 * (g1 + g2), g1 + g2), dtype=np.int64)
    A[idx1, :g1] = L1.basis
    A[idx2, g1:] = L2.basis
    return OrientedLagrangian(direct_sum_form(L1.form, L2.form), A)


def m_jm(L1: OrientedLagrangian, L2: OrientedLagrangian, seed=0, order: str | None = None) -> int:
    g = L1.g
    return (sigma(L1, L2, seed, order) + g - intersection_dim(L1, L2) - 1) % 4


def m_transport(L1: OrientedLagrangian, L2: OrientedLagrangian) -> int:
    """lambda of any theta-group element carrying L1 to L2."""
    return theta_lambda(L1.form, transport_gamma(L1, L2))


def lambda_jm(gamma: ThetaGroupElement, L0: OrientedLagrangian, seed=0) -> int:
    return m_jm(L0, L0.image(gamma), seed)


def random_lagrangian(form: QuadraticForm, rng: np.random.Generator, word_length: int = 10):
    L = standard_lagrangian(form).image(random_element(form, word_length, rng.integers(1 << 62)))
    C = rng.integers(0, 4, size=(form.g, form.g))
    while det_z4(C) not in (1, 3):
        C = rng.integers(0, 4, size=(form.g, form.g))
    return L.rebased(C)


def calibrate_sigma_order(g: int = 3, samples: int = 20, seed: int = 0) -> str:
    """Pick the pairing-matrix order for which transversal pairs satisfy
    m_jm = lambda(transport).  Uses odd g, where the two orders disagree."""
    if g % 2 == 0:
        raise ValueError("the two orders agree for even g; calibrate at odd g")
    form = standard_form(g, "even")
    rng = np.random.default_rng(seed)
    score = {"target_first": 0, "source_first": 0}
    seen = 0
    while seen < samples:
        L1, L2 = random_lagrangian(form, rng), random_lagrangian(form, rng)
        if intersection_dim(L1, L2):
            continue
        seen += 1
        expected = m_transport(L1, L2)
        for order in score:
            score[order] += m_jm(L1, L2, order=order) == expected
    best = max(score, key=score.get)
    if score[best] != samples:
        raise RuntimeError(f"no pairing order is consistent with lambda: {score}")
    return best
