from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from secat.linalg import (ChainComplex, DegreeWindow, GradedMap, GradedSpace,
                          QMatrix, QuotientSpace, WindowViolation, echelon,
                          in_span, rank, reduce_mod_span, solve, span_rref,
                          vec_add)


def mat(rows):
    ncols = max(len(r) for r in rows)
    return QMatrix.from_rows(len(rows), ncols,
                             [[Fraction(x) for x in r] for r in rows])


def test_echelon_rank_kernel_image():
    m = mat([[1, 2], [2, 4]])
    r, ker, img = echelon(m)
    assert r == 1
    assert len(ker) == 1
    # kernel vector is (-2, 1) up to scale
    k = ker[0]
    assert k[1] * Fraction(-2) == k[0] * Fraction(1)
    assert len(img) == 1


def test_echelon_zero_and_identity():
    z = QMatrix(3, 2)
    r, ker, img = echelon(z)
    assert r == 0 and len(ker) == 2 and img == []
    r, ker, img = echelon(QMatrix.identity(3))
    assert r == 3 and ker == []


def test_solve_exact_and_unsolvable():
    m = mat([[1, 1], [0, 1]])
    x = solve(m, {0: Fraction(3), 1: Fraction(1)})
    assert m.matvec(x) == {0: Fraction(3), 1: Fraction(1)}
    m2 = mat([[1], [1]])
    assert solve(m2, {0: Fraction(1)}) is None


def test_span_and_reduction():
    vs = [{0: Fraction(1), 1: Fraction(1)}, {0: Fraction(2), 1: Fraction(2)}]
    sp = span_rref(vs)
    assert len(sp) == 1
    assert in_span({0: Fraction(3), 1: Fraction(3)}, sp)
    assert not in_span({0: Fraction(1)}, sp)
    red = reduce_mod_span({0: Fraction(1), 1: Fraction(2)}, sp)
    assert red and in_span(vec_add(red, {0: Fraction(1), 1: Fraction(2)},
                                   Fraction(-1)), sp)


def test_quotient_space_projection_and_lift():
    sub = [{0: Fraction(1), 1: Fraction(1)}]
    q = QuotientSpace(3, sub)
    assert q.qdim == 2
    v = {0: Fraction(1)}
    pv = q.project(v)
    lifted = q.lift(pv)
    assert in_span(vec_add(lifted, v, Fraction(-1)), q.basis)


rational = st.fractions(min_value=-30, max_value=30, max_denominator=7)


@settings(max_examples=60, deadline=None)
@given(st.lists(st.lists(rational, min_size=3, max_size=3),
                min_size=1, max_size=4))
def test_rank_nullity(rows):
    m = mat(rows)
    r, ker, img = echelon(m)
    assert r + len(ker) == m.ncols
    assert len(img) == r
    for k in ker:
        assert not m.matvec(k)


@settings(max_examples=60, deadline=None)
@given(st.lists(st.lists(rational, min_size=2, max_size=2),
                min_size=1, max_size=4))
def test_rref_deterministic_and_idempotent(vecs):
    vs = [{i: c for i, c in enumerate(v) if c} for v in vecs]
    sp = span_rref(vs)
    assert span_rref(sp) == sp
    assert span_rref(list(reversed(vs))) == sp


def two_sphere_complex():
    # model of S^2 as a finite complex: degrees 0..5 of L(x2, y3)/trunc
    support = {0: ["1"], 2: ["x"], 3: ["y"], 4: ["x2"], 5: ["xy"]}
    space = GradedSpace(support)
    d = GradedMap(space, space, 1)
    m = QMatrix(1, 1)
    m.set_entry(0, 0, Fraction(1))
    d.set_block(3, m)  # d(y) = x^2
    return ChainComplex(space, d, DegreeWindow(-1, 6))


def test_homology_of_truncated_sphere_model():
    C = two_sphere_complex()
    assert C.homology_at(0).dim == 1
    assert C.homology_at(2).dim == 1
    assert C.homology_at(3).dim == 0
    assert C.homology_at(4).dim == 0


def test_homology_outside_window_is_an_error():
    C = two_sphere_complex()
    with pytest.raises(WindowViolation):
        C.homology_at(6)


def test_homology_coords_reject_non_cocycle():
    C = two_sphere_complex()
    h = C.homology_at(3)
    assert h.dim == 0
    with pytest.raises(ValueError):
        C.homology_at(2).coords({0: Fraction(1), 99: Fraction(1)})


def test_matrix_compose_and_add():
    a = mat([[1, 2], [0, 1]])
    b = mat([[1, 0], [3, 1]])
    assert (a @ b).matvec({0: Fraction(1)}) == a.matvec(b.matvec({0: Fraction(1)}))
    s = a + b
    assert s.matvec({1: Fraction(1)}) == vec_add(a.matvec({1: Fraction(1)}),
                                                 b.matvec({1: Fraction(1)}))
