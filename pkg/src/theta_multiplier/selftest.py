"""Invariant checks shared by the ``selftest`` subcommand.

Every check takes a numpy Generator and returns ``(passed, detail)``.
``run_selftest`` runs them in a fixed order with seeds derived from one
master seed, so the report is reproducible.
"""

from __future__ import annotations

import itertools

import numpy as np

from . import character as ch
from . import lagrangian as lg
from . import linalg as la
from . import symplectic as sp
from . import theta as th

CONFIGS = [(g, p) for g in (1, 2, 3) for p in ("even", "odd")]


def _random_invertible_z4(n, rng):
    while True:
        m = rng.integers(0, 4, size=(n, n))
        if la.rank_f2(m) == n:
            return m


def check_inverse(rng, lam):
    for _ in range(20):
        n = int(rng.integers(1, 9))
        m = _random_invertible_z4(n, rng)
        inv = la.invert_z4(m)
        if not (np.array_equal(la.mul_z4(m, inv), la.eye(n)) and np.array_equal(la.mul_z4(inv, m), la.eye(n))):
            return False, m.tolist()
    return True, ""


def check_rank_row_ops(rng, lam):
    for _ in range(20):
        m = rng.integers(0, 2, size=(6, 8))
        r = la.rank_f2(m)
        p = m[rng.permutation(6)]
        p[0] = (p[0] + p[1]) % 2
        if la.rank_f2(p) != r:
            return False, m.tolist()
    return True, ""


def check_intersection_symmetry(rng, lam):
    for _ in range(20):
        a = rng.integers(0, 2, size=(3, 6))
        b = rng.integers(0, 2, size=(2, 6))
        if la.intersect_dim_f2(a, b) != la.intersect_dim_f2(b, a):
            return False, (a.tolist(), b.tolist())
        if la.intersect_dim_f2(a, a) != la.rank_f2(a):
            return False, a.tolist()
    return True, ""


def check_reduction_homomorphism(rng, lam):
    for _ in range(20):
        a, b = rng.integers(0, 4, size=(2, 5, 5))
        if not np.array_equal(la.mul_z4(a, b) % 2, la.mul_f2(a, b)):
            return False, ""
    return True, ""


def check_transvection_square(rng, lam):
    for g, p in CONFIGS:
        form = sp.standard_form(g, p)
        for _ in range(10):
            t = sp.transvection(form, sp.random_anisotropic(form, rng))
            if not np.array_equal((t @ t).reduce(), la.eye(2 * g)):
                return False, (g, p)
    return True, ""


def check_transvection_conjugation(rng, lam):
    for g, p in CONFIGS:
        form = sp.standard_form(g, p)
        for _ in range(10):
            gamma = sp.random_element(form, 6, rng.integers(1 << 62))
            v = sp.random_anisotropic(form, rng)
            lhs = gamma @ sp.transvection(form, v) @ gamma.inverse()
            rhs = sp.transvection(form, la.mul_z4(gamma.mat, v))
            if lhs != rhs:
                return False, (g, p)
    return True, ""


def check_closure(rng, lam):
    for g, p in CONFIGS:
        form = sp.standard_form(g, p)
        for _ in range(10):
            a = sp.random_element(form, 5, rng.integers(1 << 62))
            b = sp.random_element(form, 5, rng.integers(1 << 62))
            if not (sp.is_member(form, la.mul_z4(a.mat, b.mat)) and sp.is_member(form, la.invert_z4(a.mat))):
                return False, (g, p)
    return True, ""


def check_gamma2_count(rng, lam):
    form = sp.standard_form(1, "even")
    mats = set()
    for bits in itertools.product((0, 1), repeat=3):
        M = np.array([[bits[0], bits[1]], [bits[1], bits[2]]])
        mats.add(sp.gamma2_element(form, M).mat.tobytes())
    return len(mats) == 8, f"{len(mats)} distinct"


def check_arf_direct_sum(rng, lam):
    expected = {("even", "even"): "even", ("odd", "odd"): "even", ("even", "odd"): "odd", ("odd", "even"): "odd"}
    for (p1, p2), want in expected.items():
        got = sp.direct_sum_form(sp.standard_form(1, p1), sp.standard_form(1, p2)).parity
        if got != want:
            return False, (p1, p2, got)
    return True, ""


def _pairs(rng, n):
    for g, p in CONFIGS:
        form = sp.standard_form(g, p)
        for _ in range(n):
            yield form, sp.random_element(form, 8, rng.integers(1 << 62)), sp.random_element(form, 8, rng.integers(1 << 62))


def check_homomorphism(rng, lam):
    for form, a, b in _pairs(rng, 15):
        if (lam(form, a) + lam(form, b) - lam(form, a @ b)) % 4:
            return False, (form.g, form.parity)
    return True, ""


def check_dickson_parity(rng, lam):
    for form, a, _ in _pairs(rng, 15):
        if lam(form, a) % 2 != sp.dickson(form, a.reduce()):
            return False, (form.g, form.parity)
    return True, ""


def check_conjugation_invariance(rng, lam):
    for form, a, b in _pairs(rng, 10):
        if lam(form, a @ b @ a.inverse()) != lam(form, b):
            return False, (form.g, form.parity)
    return True, ""


def check_gamma2_restriction(rng, lam):
    for g, p in CONFIGS:
        form = sp.standard_form(g, p)
        for _ in range(15):
            M = sp.random_symmetric_f2(2 * g, rng)
            if lam(form, sp.gamma2_element(form, M)) != 2 * ch.qtilde(form, M):
                return False, (g, p)
    return True, ""


def check_transvection_value(rng, lam):
    for g, p in CONFIGS:
        form = sp.standard_form(g, p)
        for _ in range(15):
            if lam(form, sp.transvection(form, sp.random_anisotropic(form, rng))) != 1:
                return False, (g, p)
    return True, ""


def check_well_defined(rng, lam):
    for form, a, _ in _pairs(rng, 5):
        values = {ch.theta_lambda(form, a, order_seed=s) for s in (None, 1, 2)}
        if len(values) != 1:
            return False, (form.g, form.parity)
    return True, ""


def check_table_g1(rng, lam):
    even = sp.standard_form(1, "even")
    odd = sp.standard_form(1, "odd")
    checks = [
        lam(even, ch.S) == 3,
        lam(even, ch.T2) == 0,
        lam(even, sp.transvection_matrix(even.space, [1, 1])) == 1,
        lam(odd, ch.S) == 1,
        lam(odd, ch.T) == 1,
    ]
    return all(checks), checks


def check_uniqueness_g1(rng, lam):
    # t -> 1 alone leaves two candidates (they differ by twice a Z/2
    # character); fixing the values on Gamma(2) as well leaves exactly one
    form = sp.standard_form(1, "even")
    loose, _ = uniqueness_search(lambda m: lam(form, m), gamma2=False)
    strict, agrees = uniqueness_search(lambda m: lam(form, m), gamma2=True)
    detail = f"{loose} homomorphisms with t -> 1, {strict} also matching 2 qtilde on Gamma(2)"
    return strict == 1 and agrees, detail


def uniqueness_search(lam_of, gamma2: bool = True):
    """Count Z/4-valued homomorphisms of the genus-one even theta group with
    t_(1,1) -> 1 (and, if ``gamma2``, equal to 2 qtilde on Gamma(2)).

    Returns the count and whether the only candidate equals ``lam_of``.
    """
    form = sp.standard_form(1, "even")
    gens = ch.genus_one_generators("even")
    elements = ch._closure(gens)
    keys = [m.tobytes() for m in elements]
    index = {k: i for i, k in enumerate(keys)}
    mult = np.empty((len(elements), len(elements)), dtype=np.int64)
    for i, a in enumerate(elements):
        for j, b in enumerate(elements):
            mult[i, j] = index[la.mul_z4(a, b).tobytes()]
    gen_idx = [index[la.z4(s).tobytes()] for s in gens]
    t_idx = gen_idx[2]
    level2 = {
        i: ch.lambda_gamma2(form, m)
        for i, m in enumerate(elements)
        if np.array_equal(m % 2, la.eye(2) % 2)
    }
    start = index[la.eye(2).tobytes()]
    found = []
    for values in itertools.product(range(4), repeat=len(gens)):
        # extend along a spanning tree of right multiplication by generators
        f = {start: 0}
        queue = [start]
        while queue:
            i = queue.pop()
            for gi, v in zip(gen_idx, values):
                j = int(mult[i, gi])
                if j not in f:
                    f[j] = (f[i] + v) % 4
                    queue.append(j)
        fv = np.array([f[i] for i in range(len(elements))])
        if not np.all((fv[:, None] + fv[None, :]) % 4 == fv[mult]) or fv[t_idx] != 1:
            continue
        if gamma2 and any(fv[i] != v for i, v in level2.items()):
            continue
        found.append(fv)
    computed = np.array([lam_of(m) for m in elements])
    agrees = len(found) == 1 and np.array_equal(found[0], computed)
    return len(found), agrees


def check_direct_sum(rng, lam):
    for _ in range(20):
        g1, g2 = rng.integers(1, 3, size=2)
        f1 = sp.standard_form(int(g1), ("even", "odd")[rng.integers(2)])
        f2_ = sp.standard_form(int(g2), ("even", "odd")[rng.integers(2)])
        a = sp.random_element(f1, 6, rng.integers(1 << 62))
        b = sp.random_element(f2_, 6, rng.integers(1 << 62))
        s = sp.direct_sum(a, b)
        if lam(s.form, s) != (lam(f1, a) + lam(f2_, b)) % 4:
            return False, (int(g1), int(g2))
    return True, ""


def check_jm_rebasing(rng, lam):
    form = sp.standard_form(2, "even")
    for _ in range(10):
        L1, L2 = lg.random_lagrangian(form, rng), lg.random_lagrangian(form, rng)
        C = rng.integers(0, 4, size=(2, 2))
        while la.det_z4(C) != 1:
            C = rng.integers(0, 4, size=(2, 2))
        if lg.m_jm(L1, L2) != lg.m_jm(L1.rebased(C), L2):
            return False, ""
    return True, ""


def check_jm_transversal_choice(rng, lam):
    form = sp.standard_form(3, "even")
    checked = 0
    while checked < 5:
        L1, L2 = lg.random_lagrangian(form, rng), lg.random_lagrangian(form, rng)
        k = lg.intersection_dim(L1, L2)
        if k == 0 or (3 - k) % 2:
            continue
        checked += 1
        if len({lg.sigma(L1, L2, seed=s) for s in range(4)}) != 1:
            return False, k
    return True, ""


def check_jm_equals_lambda(rng, lam):
    for g in (2, 3):
        form = sp.standard_form(g, "even")
        L0 = lg.standard_lagrangian(form)
        for _ in range(8):
            gamma = sp.random_element(form, 8, rng.integers(1 << 62))
            if lg.lambda_jm(gamma, L0) != lam(form, gamma):
                return False, g
    return True, ""


def check_jm_composition(rng, lam):
    form = sp.standard_form(2, "even")
    for _ in range(8):
        L1, L2, L3 = (lg.random_lagrangian(form, rng) for _ in range(3))
        if (lg.m_jm(L1, L2) + lg.m_jm(L2, L3) - lg.m_jm(L1, L3)) % 4:
            return False, ""
    return True, ""


def check_cocycle(rng, lam):
    for g in (1, 2):
        for _ in range(10):
            M1 = th.random_theta_group_element(g, 4, rng.integers(1 << 62))
            M2 = th.random_theta_group_element(g, 4, rng.integers(1 << 62))
            tau = th.random_siegel_point(g, rng)
            lhs = th.automorphy_factor(M1 @ M2, tau)
            rhs = th.automorphy_factor(M1, th.mobius_act(M2, tau)) * th.automorphy_factor(M2, tau)
            if abs(lhs - rhs) > 1e-9 * abs(lhs):
                return False, g
    return True, ""


def check_functional_equation(rng, lam):
    worst = 0.0
    for g in (1, 2):
        for _ in range(8):
            M = th.random_theta_group_element(g, 6, rng.integers(1 << 62))
            tau = th.random_siegel_point(g, rng)
            worst = max(worst, th.functional_equation_residual(M, tau))
    return worst < 1e-8, f"max residual {worst:.3e}"


def check_truncation_stability(rng, lam):
    for g in (1, 2):
        for _ in range(10):
            tau = th.random_siegel_point(g, rng)
            v = th.theta_value(tau, 1e-10)
            w = th.theta_value(tau, radius=2 * v.truncation_radius)
            if abs(v.value - w.value) > v.error_bound + w.error_bound:
                return False, f"g={g}: |difference| {abs(v.value - w.value):.3e}"
    return True, ""


def check_mobius_composition(rng, lam):
    for g in (1, 2):
        for _ in range(10):
            M1 = th.random_theta_group_element(g, 4, rng.integers(1 << 62))
            M2 = th.random_theta_group_element(g, 4, rng.integers(1 << 62))
            tau = th.random_siegel_point(g, rng)
            a = th.mobius_act(M1 @ M2, tau).tau
            b = th.mobius_act(M1, th.mobius_act(M2, tau)).tau
            if np.max(np.abs(a - b)) > 1e-10 * max(1.0, np.max(np.abs(a))):
                return False, g
    return True, ""


CHECKS = [
    ("linalg.inverse_roundtrip", check_inverse),
    ("linalg.rank_row_operations", check_rank_row_ops),
    ("linalg.intersection_symmetry", check_intersection_symmetry),
    ("linalg.reduction_homomorphism", check_reduction_homomorphism),
    ("symplectic.transvection_square_mod2", check_transvection_square),
    ("symplectic.transvection_conjugation", check_transvection_conjugation),
    ("symplectic.closure", check_closure),
    ("symplectic.gamma2_count_g1", check_gamma2_count),
    ("symplectic.arf_direct_sum", check_arf_direct_sum),
    ("character.homomorphism", check_homomorphism),
    ("character.dickson_parity", check_dickson_parity),
    ("character.conjugation_invariance", check_conjugation_invariance),
    ("character.gamma2_restriction", check_gamma2_restriction),
    ("character.transvection_value", check_transvection_value),
    ("character.well_defined", check_well_defined),
    ("character.table_g1", check_table_g1),
    ("character.uniqueness_g1", check_uniqueness_g1),
    ("character.direct_sum", check_direct_sum),
    ("lagrangian.rebasing", check_jm_rebasing),
    ("lagrangian.transversal_choice", check_jm_transversal_choice),
    ("lagrangian.lambda_jm", check_jm_equals_lambda),
    ("lagrangian.composition", check_jm_composition),
    ("theta.cocycle", check_cocycle),
    ("theta.functional_equation", check_functional_equation),
    ("theta.truncation_stability", check_truncation_stability),
    ("theta.mobius_composition", check_mobius_composition),
]


def run_selftest(seed: int, lam=ch.theta_lambda) -> list[dict]:
    seeds = np.random.SeedSequence(seed).spawn(len(CHECKS))
    report = []
    for (name, check), s in zip(CHECKS, seeds):
        try:
            passed, detail = check(np.random.default_rng(s), lam)
        except Exception as exc:  # a crash is a failed item, not a crashed report
            passed, detail = False, f"{type(exc).__name__}: {exc}"
        report.append({"item": name, "passed": bool(passed), "detail": str(detail) if not passed else ""})
    return report
