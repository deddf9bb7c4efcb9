"""The Z/4-valued theta character on the theta group.

lambda(gamma) is computed as follows:

1. write the reduction of gamma as a product of k orthogonal transvections
   ``tau_v(x) = x + psibar(v, x) v`` over F2;
2. lift each v to a {0,1}-vector and multiply the Z/4 transvections to get w;
3. ``delta = w^{-1} gamma`` lies in the level-2 subgroup, and
   ``lambda(gamma) = k + 2 * q(delta)`` where ``q(delta)`` is the linear form
   induced by q on symmetric 2-tensors.

The orthogonal factorization uses an exhaustive breadth-first search of the
Cayley graph of O(V/2V, q) for g <= 3.  For larger g a greedy reduction
fixes one hyperbolic pair at a time and hands the last three pairs to the
g = 3 search.  When transvections do not reach the element (g = 2, even
form) the element is stabilized by an extra hyperbolic plane, which leaves
lambda unchanged by direct-sum additivity.
"""

from __future__ import annotations

import threading
from collections import deque
from dataclasses import dataclass

import numpy as np

from .linalg import eye, f2, mul_f2, mul_z4, z4
from .symplectic import (
    NotMember,
    QuadraticForm,
    SymplecticSpace,
    ThetaGroupElement,
    block_sum,
    direct_sum,
    direct_sum_form,
    is_member,
    is_orthogonal,
    orthogonal_transvection,
    standard_form,
    transvection_matrix,
)

BFS_MAX_GENUS = 3


class NotOrthogonal(ValueError):
    pass


class SearchExhausted(RuntimeError):
    pass


class NotInGamma2(ValueError):
    pass


class AsymmetricTensor(ValueError):
    pass


# --- bit-packed F2 helpers -------------------------------------------------
# A vector v is the int sum v_i 2^i; a matrix is packed column by column,
# column k occupying bits [k n, (k + 1) n).


def vec_to_bits(v) -> int:
    return int(sum(int(b) << i for i, b in enumerate(f2(v))))


def bits_to_vec(b: int, n: int) -> np.ndarray:
    return np.array([(b >> i) & 1 for i in range(n)], dtype=np.int64)


def _swap_halves(z: int, g: int) -> int:
    low = (1 << g) - 1
    return (z >> g) | ((z & low) << g)


def _psi_bits(a: int, b: int, g: int) -> int:
    return (_swap_halves(a, g) & b).bit_count() & 1


def _pack(t) -> int:
    t = f2(t)
    n = t.shape[0]
    return sum(vec_to_bits(t[:, k]) << (k * n) for k in range(n))


def _unpack(key: int, n: int) -> np.ndarray:
    mask = (1 << n) - 1
    return np.stack([bits_to_vec((key >> (k * n)) & mask, n) for k in range(n)], axis=1)


def anisotropic_vectors(form: QuadraticForm) -> np.ndarray:
    return np.nonzero(form.table)[0].astype(np.int64)


@dataclass
class _CayleyTable:
    index: dict
    parent: np.ndarray
    generator: np.ndarray
    generators: np.ndarray

    def word(self, key: int) -> list[int]:
        i = self.index.get(key)
        if i is None:
            return None
        out = []
        while self.parent[i] >= 0:
            out.append(int(self.generators[self.generator[i]]))
            i = self.parent[i]
        return out

    def __len__(self):
        return len(self.index)


def _build_table(form: QuadraticForm, order_seed) -> _CayleyTable:
    g = form.g
    n = 2 * g
    mask = np.uint64((1 << n) - 1)
    gens = anisotropic_vectors(form)
    if order_seed is not None:
        gens = np.random.default_rng(order_seed).permutation(gens)
    swapped = np.array([_swap_halves(int(z), g) for z in gens], dtype=np.uint64)
    gens_u = gens.astype(np.uint64)

    root = np.uint64(_pack(eye(n)))
    keys = [np.array([root], dtype=np.uint64)]
    parents = [np.array([-1], dtype=np.int64)]
    gen_idx = [np.array([-1], dtype=np.int64)]
    seen = np.array([root], dtype=np.uint64)
    frontier = keys[0]
    frontier_start = 0
    while frontier.size:
        cand, cand_parent, cand_gen = [], [], []
        for j in range(gens.size):
            new = frontier.copy()
            for k in range(n):
                shift = np.uint64(k * n)
                col = (frontier >> shift) & mask
                hit = np.bitwise_count(col & swapped[j]) & np.uint8(1)
                new ^= (hit.astype(np.uint64) * gens_u[j]) << shift
            cand.append(new)
            cand_parent.append(frontier_start + np.arange(frontier.size))
            cand_gen.append(np.full(frontier.size, j))
        cand = np.concatenate(cand)
        cand_parent = np.concatenate(cand_parent)
        cand_gen = np.concatenate(cand_gen)
        uniq, first = np.unique(cand, return_index=True)
        fresh = ~np.isin(uniq, seen, assume_unique=True)
        uniq, first = uniq[fresh], first[fresh]
        # keep discovery order stable: sort by first occurrence
        order = np.argsort(first, kind="stable")
        uniq, first = uniq[order], first[order]
        frontier_start += frontier.size
        keys.append(uniq)
        parents.append(cand_parent[first])
        gen_idx.append(cand_gen[first])
        seen = np.union1d(seen, uniq)
        frontier = uniq
    keys = np.concatenate(keys)
    return _CayleyTable(
        index={int(k): i for i, k in enumerate(keys.tolist())},
        parent=np.concatenate(parents),
        generator=np.concatenate(gen_idx),
        generators=gens,
    )


_tables: dict = {}
_tables_lock = threading.Lock()


def cayley_table(form: QuadraticForm, order_seed=None) -> _CayleyTable:
    """BFS spanning tree of the group generated by orthogonal transvections."""
    if form.g > BFS_MAX_GENUS:
        raise ValueError(f"exhaustive search is limited to g <= {BFS_MAX_GENUS}")
    key = (form.key, order_seed)
    with _tables_lock:
        table = _tables.get(key)
        if table is None:
            table = _tables[key] = _build_table(form, order_seed)
    return table


# --- factorization ---------------------------------------------------------


def _apply_bits(r: np.ndarray, z: int, g: int) -> np.ndarray:
    """Left-multiply the F2 matrix r by tau_z."""
    zv = bits_to_vec(z, 2 * g)
    hits = (zv @ SymplecticSpace(g).Jbar @ r) % 2
    return (r + np.outer(zv, hits)) % 2


def _move_vector(form: QuadraticForm, a: int, u: int, allowed: int) -> list[int]:
    """Transvections tau_z (z anisotropic, supported in ``allowed``) taking a to u."""
    g = form.g
    if a == u:
        return []
    z = a ^ u
    if z & ~allowed == 0 and _psi_bits(a, u, g):
        return [z]
    cands = anisotropic_vectors(form)
    cands = cands[(cands & ~allowed) == 0]
    sw_a = _swap_halves(a, g)
    hit = np.bitwise_count((cands & sw_a).astype(np.uint64)) & 1
    b = a ^ cands[hit == 1]
    ok = ((b ^ u) & ~allowed) == 0
    sw_u = _swap_halves(u, g)
    ok &= (np.bitwise_count((b & sw_u).astype(np.uint64)) & 1) == 1
    if np.any(ok):
        b0 = int(b[np.argmax(ok)])
        return [a ^ b0, b0 ^ u]
    if allowed.bit_count() > 14:
        raise SearchExhausted("no transvection path of length <= 2 and space too large for BFS")
    # exhaustive BFS over vectors
    moves = [int(c) for c in cands]
    prev = {a: None}
    queue = deque([a])
    while queue:
        s = queue.popleft()
        for z in moves:
            if _psi_bits(z, s, g):
                nxt = s ^ z
                if nxt not in prev:
                    prev[nxt] = (s, z)
                    if nxt == u:
                        path = []
                        while prev[nxt] is not None:
                            nxt, zz = prev[nxt]
                            path.append(zz)
                        return path[::-1]
                    queue.append(nxt)
    raise SearchExhausted("vector is not reachable by transvections in the allowed subspace")


def _greedy_factor(form: QuadraticForm, t: np.ndarray) -> list[np.ndarray]:
    g = form.g
    n = 2 * g
    r = f2(t).copy()
    applied: list[int] = []
    for i in range(g - BFS_MAX_GENUS):
        pairs = 0
        for j in range(i, g):
            pairs |= (1 << j) | (1 << (g + j))
        # fix e_i using z in the complement of the fixed pairs, then f_i
        # using z orthogonal to e_i as well
        for u_idx, allowed in ((i, pairs), (g + i, pairs & ~(1 << (g + i)))):
            a = vec_to_bits(r[:, u_idx])
            for z in _move_vector(form, a, 1 << u_idx, allowed):
                r = _apply_bits(r, z, g)
                applied.append(z)
    tail = np.concatenate(
        [np.arange(g - BFS_MAX_GENUS, g), g + np.arange(g - BFS_MAX_GENUS, g)]
    )
    head = np.setdiff1d(np.arange(n), tail)
    if not (
        np.array_equal(r[np.ix_(head, head)], eye(head.size))
        and not r[np.ix_(head, tail)].any()
        and not r[np.ix_(tail, head)].any()
    ):
        raise SearchExhausted("greedy reduction did not split off the fixed pairs")
    sub_form = QuadraticForm.from_basis_values(
        SymplecticSpace(BFS_MAX_GENUS), form.basis_values[tail]
    )
    sub_word = cayley_table(sub_form).word(_pack(r[np.ix_(tail, tail)]))
    if sub_word is None:
        raise SearchExhausted("tail block is not generated by transvections")
    vectors = [bits_to_vec(z, n) for z in applied]
    for z in sub_word:
        v = np.zeros(n, dtype=np.int64)
        v[tail] = bits_to_vec(z, 2 * BFS_MAX_GENUS)
        vectors.append(v)
    return vectors


def factor_orthogonal(form: QuadraticForm, t, order_seed=None) -> list[np.ndarray]:
    """Anisotropic v_1..v_k with tau_{v_1} ... tau_{v_k} = t in O(V/2V, q)."""
    t = f2(t)
    if not is_orthogonal(form, t):
        raise NotOrthogonal("matrix does not preserve q")
    n = form.space.dim
    if form.g <= BFS_MAX_GENUS:
        word = cayley_table(form, order_seed).word(_pack(t))
        if word is None:
            raise SearchExhausted(
                f"element lies outside the subgroup generated by transvections "
                f"(g={form.g}, {form.parity} form)"
            )
        vectors = [bits_to_vec(z, n) for z in word]
    else:
        vectors = _greedy_factor(form, t)
    check = eye(n)
    for v in vectors:
        check = mul_f2(check, orthogonal_transvection(form.space, v))
    if not np.array_equal(check, t):
        raise SearchExhausted("factorization does not reproduce the input")
    return vectors


# --- level-2 part ----------------------------------------------------------


def qtilde(form: QuadraticForm, M) -> int:
    """Linear form on symmetric 2-tensors induced by q: ``v v^T -> q(v)``."""
    M = f2(M)
    if not np.array_equal(M, M.T):
        raise AsymmetricTensor("tensor matrix is not symmetric")
    diag = int(np.diag(M) @ form.basis_values)
    off = int(np.sum(np.triu(M * form.space.Jbar, 1)))
    return (diag + off) % 2


def lambda_gamma2(form: QuadraticForm, delta) -> int:
    delta = z4(delta)
    n = form.space.dim
    diff = (delta - eye(n)) % 4
    if np.any(diff % 2):
        raise NotInGamma2("element is not congruent to the identity mod 2")
    if not is_member(form, delta):
        raise NotMember("level-2 element does not preserve psi")
    beta = diff // 2
    M = mul_f2(beta, form.space.Jbar)
    if not np.array_equal(M, M.T):
        raise AsymmetricTensor("beta Jbar is not symmetric")
    return 2 * qtilde(form, M)


# --- the character ---------------------------------------------------------


@dataclass(frozen=True)
class LambdaReport:
    value: int
    word: list
    stabilized: bool = False

    @property
    def word_length(self) -> int:
        return len(self.word)

    def to_json(self) -> dict:
        return {
            "lambda": self.value,
            "word_length": self.word_length,
            "word": [[int(x) for x in v] for v in self.word],
        }


def _lambda_direct(form: QuadraticForm, mat: np.ndarray, order_seed) -> LambdaReport:
    vectors = factor_orthogonal(form, mat % 2, order_seed)
    delta = mat
    for v in vectors:
        # t_v^{-1} = I - v v^T J
        inv = (2 * eye(form.space.dim) - transvection_matrix(form.space, v)) % 4
        delta = mul_z4(inv, delta)
    return LambdaReport((len(vectors) + lambda_gamma2(form, delta)) % 4, vectors)


def lambda_report(form: QuadraticForm, gamma, order_seed=None) -> LambdaReport:
    if isinstance(gamma, ThetaGroupElement):
        form, mat = gamma.form, gamma.mat
    else:
        mat = z4(gamma)
        if not is_member(form, mat):
            raise NotMember("matrix is not in the theta group of the given form")
    try:
        return _lambda_direct(form, mat, order_seed)
    except SearchExhausted:
        if form.g >= BFS_MAX_GENUS:
            raise
    plane = standard_form(1, "even")
    big = direct_sum_form(form, plane)
    rep = _lambda_direct(big, block_sum(mat, eye(2), form.g, 1), order_seed)
    return LambdaReport(rep.value, rep.word, stabilized=True)


def theta_lambda(form: QuadraticForm, gamma, order_seed=None) -> int:
    """The theta character of ``gamma`` as an integer in {0, 1, 2, 3}."""
    return lambda_report(form, gamma, order_seed).value


def lambda_direct_sum(gamma1: ThetaGroupElement, gamma2: ThetaGroupElement) -> int:
    return theta_lambda(None, direct_sum(gamma1, gamma2))


# --- genus one ---------------------------------------------------------------

S = np.array([[0, 3], [1, 0]], dtype=np.int64)
T = np.array([[1, 1], [0, 1]], dtype=np.int64)
T2 = np.array([[1, 2], [0, 1]], dtype=np.int64)


def _closure(gens: list[np.ndarray]) -> list[np.ndarray]:
    n = gens[0].shape[0]
    seen = {z4(eye(n)).tobytes(): z4(eye(n))}
    queue = deque(seen.values())
    while queue:
        m = queue.popleft()
        for s in gens:
            p = mul_z4(m, s)
            k = p.tobytes()
            if k not in seen:
                seen[k] = p
                queue.append(p)
    return list(seen.values())


def genus_one_generators(parity) -> list[np.ndarray]:
    if parity == "even":
        return [S, T2, transvection_matrix(SymplecticSpace(1), [1, 1])]
    return [S, T]


def character_table_g1(parity) -> dict:
    """lambda on every element of the genus-one theta group.

    Keys are matrices as tuples of row tuples.
    """
    form = standard_form(1, parity)
    return {
        tuple(map(tuple, m.tolist())): theta_lambda(form, m)
        for m in _closure(genus_one_generators(parity))
    }
