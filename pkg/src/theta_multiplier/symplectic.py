"""Symplectic 4-groups with a theta characteristic.

``V = (Z/4)^{2g}`` carries the standard pairing ``psi(u, x) = u^T J x`` with
``J = [[0, I], [-I, 0]]``; coordinates are ordered ``(x_1..x_g, y_1..y_g)``
so ``psi(e_i, e_{g+i}) = 1``.  A theta characteristic is an F2 quadratic
form ``q`` on ``V/2V`` whose polarization is ``J mod 2``.  The theta group
is the set of Z/4 matrices preserving ``psi`` whose reduction preserves
``q``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from typing import Literal

import numpy as np

from .linalg import eye, f2, invert_z4, mul_f2, mul_z4, rank_f2, z4

Parity = Literal["even", "odd"]


class IsotropicVector(ValueError):
    pass


class NotSymmetric(ValueError):
    pass


class NotMember(ValueError):
    pass


@dataclass(frozen=True)
class SymplecticSpace:
    g: int

    def __post_init__(self):
        if self.g < 1:
            raise ValueError(f"genus must be positive, got {self.g}")

    @property
    def dim(self) -> int:
        return 2 * self.g

    @cached_property
    def J(self) -> np.ndarray:
        g = self.g
        j = np.zeros((2 * g, 2 * g), dtype=np.int64)
        j[:g, g:] = eye(g)
        j[g:, :g] = 3 * eye(g)
        return j

    @cached_property
    def Jbar(self) -> np.ndarray:
        return self.J % 2

    def psi(self, u, x) -> int:
        return int(z4(u) @ self.J @ z4(x)) % 4

    def psi_bar(self, u, x) -> int:
        return int(f2(u) @ self.Jbar @ f2(x)) % 2


@dataclass(frozen=True, eq=False)
class QuadraticForm:
    """F2 quadratic form ``q(x) = x^T U x`` with ``U`` upper triangular.

    The polarization constraint ``U + U^T = Jbar`` leaves only the diagonal
    free, i.e. the values ``q(e_i)`` on the standard basis.
    """

    space: SymplecticSpace
    U: np.ndarray
    parity: Parity = field(init=False)

    def __post_init__(self):
        U = f2(self.U)
        n = self.space.dim
        if U.shape != (n, n):
            raise ValueError(f"form matrix must be {n}x{n}, got {U.shape}")
        if np.any(np.tril(U, -1)):
            raise ValueError("form matrix must be upper triangular")
        if not np.array_equal((U + U.T) % 2, self.space.Jbar):
            raise ValueError("polarization of q does not match the reduced pairing")
        U.setflags(write=False)
        object.__setattr__(self, "U", U)
        object.__setattr__(self, "parity", arf_parity(self))

    @classmethod
    def from_basis_values(cls, space: SymplecticSpace, values) -> QuadraticForm:
        """Build the form with prescribed values ``q(e_i)``."""
        U = np.triu(space.Jbar, 1) + np.diag(f2(values))
        return cls(space, U)

    @property
    def g(self) -> int:
        return self.space.g

    @cached_property
    def basis_values(self) -> np.ndarray:
        return np.diag(self.U).copy()

    @cached_property
    def key(self) -> tuple:
        return (self.g, tuple(int(b) for b in self.basis_values))

    def __eq__(self, other):
        return isinstance(other, QuadraticForm) and self.key == other.key

    def __hash__(self):
        return hash(self.key)

    def __repr__(self):
        return f"QuadraticForm(g={self.g}, q(e_i)={list(self.key[1])}, parity={self.parity!r})"

    def __call__(self, v) -> int:
        return eval_q(self, v)

    @cached_property
    def table(self) -> np.ndarray:
        """q on every vector of F2^{2g}, indexed by the bitmask sum v_i 2^i."""
        g = self.g
        idx = np.arange(1 << (2 * g), dtype=np.int64)
        vals = np.zeros_like(idx)
        # U is diagonal plus the (i, g+i) polarization entries
        for i in range(g):
            xi = (idx >> i) & 1
            yi = (idx >> (g + i)) & 1
            vals += self.basis_values[i] * xi + self.basis_values[g + i] * yi + xi * yi
        vals %= 2
        vals.setflags(write=False)
        return vals


def eval_q(form: QuadraticForm, v) -> int:
    v = f2(v)
    return int(v @ form.U @ v) % 2


def eval_psi(space: SymplecticSpace, u, x) -> int:
    return space.psi(u, x)


def make_standard(g: int, parity: Parity = "even") -> tuple[SymplecticSpace, QuadraticForm]:
    """Standard space and form: ``sum x_i y_i``, plus ``x_1^2 + y_1^2`` when odd."""
    if parity not in ("even", "odd"):
        raise ValueError(f"parity must be 'even' or 'odd', got {parity!r}")
    space = SymplecticSpace(g)
    values = np.zeros(2 * g, dtype=np.int64)
    if parity == "odd":
        values[0] = values[g] = 1
    return space, QuadraticForm.from_basis_values(space, values)


def standard_form(g: int, parity: Parity = "even") -> QuadraticForm:
    return make_standard(g, parity)[1]


def arf_parity(form: QuadraticForm) -> Parity:
    """Even iff q has exactly 2^{2g-1} + 2^{g-1} zeros."""
    g = form.g
    zeros = int((1 << (2 * g)) - form.table.sum())
    return "even" if zeros == (1 << (2 * g - 1)) + (1 << (g - 1)) else "odd"


def is_member(form: QuadraticForm, m) -> bool:
    space = form.space
    m = z4(m)
    if m.shape != (space.dim, space.dim):
        return False
    if not np.array_equal(mul_z4(m.T, space.J, m), space.J):
        return False
    mbar = m % 2
    # columns of mbar are the images of the basis vectors
    images = np.einsum("ki,ij,jk->k", mbar.T, form.U, mbar) % 2
    return bool(np.array_equal(images, form.basis_values))


@dataclass(frozen=True, eq=False)
class ThetaGroupElement:
    form: QuadraticForm
    mat: np.ndarray

    def __post_init__(self):
        m = z4(self.mat)
        if not is_member(self.form, m):
            raise NotMember("matrix is not in the theta group of the given form")
        m.setflags(write=False)
        object.__setattr__(self, "mat", m)

    @property
    def space(self) -> SymplecticSpace:
        return self.form.space

    def __matmul__(self, other: ThetaGroupElement) -> ThetaGroupElement:
        if other.form != self.form:
            raise ValueError("elements belong to different theta groups")
        return ThetaGroupElement(self.form, mul_z4(self.mat, other.mat))

    def __eq__(self, other):
        return (
            isinstance(other, ThetaGroupElement)
            and self.form == other.form
            and np.array_equal(self.mat, other.mat)
        )

    def __hash__(self):
        return hash((self.form, self.mat.tobytes()))

    def inverse(self) -> ThetaGroupElement:
        return ThetaGroupElement(self.form, invert_z4(self.mat))

    def reduce(self) -> np.ndarray:
        return self.mat % 2

    def __repr__(self):
        return f"ThetaGroupElement({self.form!r}, {self.mat.tolist()})"


def identity(form: QuadraticForm) -> ThetaGroupElement:
    return ThetaGroupElement(form, eye(form.space.dim))


def transvection_matrix(space: SymplecticSpace, v) -> np.ndarray:
    """``x -> x + psi(v, x) v`` as a Z/4 matrix (no anisotropy check)."""
    v = z4(v)
    return (eye(space.dim) + np.outer(v, v @ space.J)) % 4


def transvection(form: QuadraticForm, v) -> ThetaGroupElement:
    if eval_q(form, v) != 1:
        raise IsotropicVector(f"q({list(f2(v))}) = 0; transvection requires q(v) = 1")
    return ThetaGroupElement(form, transvection_matrix(form.space, v))


def orthogonal_transvection(space: SymplecticSpace, v) -> np.ndarray:
    """F2 map ``x -> x + psibar(v, x) v``."""
    v = f2(v)
    return (eye(space.dim) + np.outer(v, v @ space.Jbar)) % 2


def is_orthogonal(form: QuadraticForm, t) -> bool:
    t = f2(t)
    n = form.space.dim
    if t.shape != (n, n):
        return False
    if not np.array_equal(mul_f2(t.T, form.space.Jbar, t), form.space.Jbar):
        return False
    images = np.einsum("ki,ij,jk->k", t.T, form.U, t) % 2
    return bool(np.array_equal(images, form.basis_values))


def dickson(form: QuadraticForm, t) -> int:
    """Dickson invariant ``rank(I + t) mod 2`` of an orthogonal F2 map."""
    return rank_f2((eye(form.space.dim) + f2(t)) % 2) % 2


def gamma2_element(form: QuadraticForm, M) -> ThetaGroupElement:
    """Level-2 element ``I + 2 * lift(Jbar @ M)`` for a symmetric F2 matrix M."""
    M = f2(M)
    if not np.array_equal(M, M.T):
        raise NotSymmetric("gamma2 parameter must be a symmetric F2 matrix")
    beta = mul_f2(form.space.Jbar, M)
    return ThetaGroupElement(form, (eye(form.space.dim) + 2 * beta) % 4)


def random_anisotropic(form: QuadraticForm, rng: np.random.Generator) -> np.ndarray:
    n = form.space.dim
    while True:
        v = rng.integers(0, 4, size=n)
        if eval_q(form, v) == 1:
            return v


def random_symmetric_f2(n: int, rng: np.random.Generator) -> np.ndarray:
    upper = np.triu(rng.integers(0, 2, size=(n, n)))
    return (upper + np.triu(upper, 1).T) % 2


def random_element(
    form: QuadraticForm, word_length: int, seed=None
) -> ThetaGroupElement:
    """Random word in anisotropic transvections and level-2 elements."""
    if word_length < 0:
        raise ValueError("word_length must be nonnegative")
    rng = np.random.default_rng(seed)
    n = form.space.dim
    m = eye(n)
    for _ in range(word_length):
        if rng.integers(2):
            factor = transvection_matrix(form.space, random_anisotropic(form, rng))
        else:
            factor = (eye(n) + 2 * mul_f2(form.space.Jbar, random_symmetric_f2(n, rng))) % 4
        m = mul_z4(m, factor)
    return ThetaGroupElement(form, m)


def direct_sum_index(g1: int, g2: int) -> tuple[np.ndarray, np.ndarray]:
    """Positions of the coordinates of V1 and V2 inside V1 + V2.

    The sum is ordered ``(x^(1), x^(2), y^(1), y^(2))`` so its pairing is
    again the standard one.
    """
    g = g1 + g2
    idx1 = np.concatenate([np.arange(g1), g + np.arange(g1)])
    idx2 = np.concatenate([g1 + np.arange(g2), g + g1 + np.arange(g2)])
    return idx1, idx2


def direct_sum_form(form1: QuadraticForm, form2: QuadraticForm) -> QuadraticForm:
    g1, g2 = form1.g, form2.g
    idx1, idx2 = direct_sum_index(g1, g2)
    values = np.zeros(2 * (g1 + g2), dtype=np.int64)
    values[idx1] = form1.basis_values
    values[idx2] = form2.basis_values
    return QuadraticForm.from_basis_values(SymplecticSpace(g1 + g2), values)


def block_sum(m1, m2, g1: int, g2: int) -> np.ndarray:
    idx1, idx2 = direct_sum_index(g1, g2)
    n = 2 * (g1 + g2)
    out = np.zeros((n, n), dtype=np.int64)
    out[np.ix_(idx1, idx1)] = m1
    out[np.ix_(idx2, idx2)] = m2
    return out


def direct_sum(a: ThetaGroupElement, b: ThetaGroupElement) -> ThetaGroupElement:
    form = direct_sum_form(a.form, b.form)
    return ThetaGroupElement(form, block_sum(a.mat, b.mat, a.form.g, b.form.g))
