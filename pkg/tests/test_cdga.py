from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from secat.cdga import (CdgaMorphism, DSquaredNonzero, FreeCdga, Generator,
                        SimpleConnectivityError, augmentation_ideal,
                        augmentation_morphism, derivation_extend, ideal_power,
                        kernel_ideal, multiplication_morphism,
                        poincare_duality_generator, quotient_algebra, tensor,
                        tensor_morphism, trivial_algebra)


def sphere(n):
    if n % 2:
        return FreeCdga([Generator("x", n)], name="S%d" % n)
    return FreeCdga([Generator("x", n)], relations={(2,)}, name="S%d" % n)


def cp(n):
    return FreeCdga([Generator("x", 2)], relations={(n + 1,)}, name="CP%d" % n)


def free_s2():
    A = FreeCdga([Generator("x", 2), Generator("y", 3)], max_degree=12)
    derivation_extend(A, {"y": A.gen_element("x") * A.gen_element("x")})
    return A


def test_monomial_basis_examples():
    A = FreeCdga([Generator("x", 2), Generator("y", 3)], max_degree=10)
    assert A.dim(5) == 1 and A.label_str(5, 0) == "x*y"
    assert sphere(3).dim(3) == 1
    assert sphere(2).dim(4) == 0  # truncated by the relation


def test_koszul_sign_odd_generators():
    A = FreeCdga([Generator("x", 3), Generator("y", 3)])
    x, y = A.gen_element("x"), A.gen_element("y")
    assert y * x == (x * y).scaled(Fraction(-1))
    assert (x * x).is_zero()


def test_even_generators_commute():
    A = cp(3)
    x = A.gen_element("x")
    assert x * x == x * x
    assert A.dim(8) == 0


def test_leibniz_on_free_model():
    A = free_s2()
    x, y = A.gen_element("x"), A.gen_element("y")
    assert (x * y).d() == x * x * x
    A.check_leibniz()
    A.check_d_squared()


def test_derivation_extend_rejects_inhomogeneous():
    A = FreeCdga([Generator("x", 2), Generator("y", 3)])
    with pytest.raises(ValueError):
        A.set_differential("y", A.gen_element("x"))


def test_d_squared_violation_detected():
    A = FreeCdga([Generator("x", 2), Generator("y", 3), Generator("z", 4)],
                 max_degree=10)
    with pytest.raises(DSquaredNonzero):
        # dz = x*y, dy = x^2 gives d^2(z) = x^3 != 0 up to sign
        derivation_extend(A, {"y": A.gen_element("x") * A.gen_element("x"),
                              "z": A.gen_element("x") * A.gen_element("y")})


def test_simple_connectivity_enforced():
    with pytest.raises(SimpleConnectivityError):
        FreeCdga([Generator("x", 1)])


def test_morphism_validation():
    A = sphere(3)
    Q, eps = augmentation_morphism(A)
    eps.validate()
    with pytest.raises(ValueError):
        # x |-> x, y |-> 0 does not commute with d (phi(dy) = x^2 != 0)
        B = free_s2()
        CdgaMorphism.from_generator_images(
            B, cp(3), {"x": cp(3).gen_element("x"),
                       "y": cp(3).element(3, {})}).validate()


def test_tensor_koszul_signs():
    A = sphere(2)
    T = tensor(A, A)
    x1 = T.element(2, {T.tensor_index[(2, 0, 0, 0)]: Fraction(1)})
    x2 = T.element(2, {T.tensor_index[(0, 0, 2, 0)]: Fraction(1)})
    u = x1 - x2
    xx = T.element(4, {T.tensor_index[(2, 0, 2, 0)]: Fraction(1)})
    assert u * u == xx.scaled(Fraction(-2))


def test_tensor_odd_odd_sign():
    B = sphere(3)
    T = tensor(B, B)
    a = T.element(3, {T.tensor_index[(3, 0, 0, 0)]: Fraction(1)})  # y(x)1
    b = T.element(3, {T.tensor_index[(0, 0, 3, 0)]: Fraction(1)})  # 1(x)y
    yy = T.element(6, {T.tensor_index[(3, 0, 3, 0)]: Fraction(1)})
    assert a * b == yy
    assert b * a == yy.scaled(Fraction(-1))


def test_kernel_ideal_of_multiplication():
    A = sphere(2)
    T, mu = multiplication_morphism(A, 2)
    K = kernel_ideal(mu)
    assert {k: K.dim(k) for k in K.degrees()} == {2: 1, 4: 1}
    K2 = ideal_power(K, 2)
    assert {k: K2.dim(k) for k in K2.degrees()} == {4: 1}
    assert ideal_power(K, 3).is_zero()


def test_augmentation_ideal_is_kernel_of_augmentation():
    A = cp(2)
    Q, eps = augmentation_morphism(A)
    K = kernel_ideal(eps)
    Kp = augmentation_ideal(A)
    assert {k: K.dim(k) for k in K.degrees()} == \
        {k: Kp.dim(k) for k in Kp.degrees()}


def test_quotient_algebra_by_augmentation_ideal():
    A = sphere(3)
    Q, proj = quotient_algebra(A, augmentation_ideal(A))
    assert Q.dim(0) == 1 and all(Q.dim(k) == 0 for k in Q.degrees() if k != 0)
    proj.validate()


def test_poincare_duality_detection():
    assert poincare_duality_generator(cp(3)) == 6
    assert poincare_duality_generator(sphere(5)) == 5
    assert poincare_duality_generator(free_s2()) is None


def test_trivial_algebra_is_a_point_model():
    Q = trivial_algebra()
    assert Q.dim(0) == 1
    Q.validate()


def test_tensor_morphism_blocks():
    A, B = sphere(2), sphere(3)
    _, epsA = augmentation_morphism(A)
    _, epsB = augmentation_morphism(B)
    S, T, phi = tensor_morphism(epsA, epsB)
    phi.validate()
    assert phi.block(0).matvec({0: Fraction(1)}) == {0: Fraction(1)}
    assert not phi.block(2).matvec({0: Fraction(1)})


small_algebra = FreeCdga([Generator("x", 2), Generator("y", 3),
                          Generator("z", 3)], max_degree=9)
pairs = [(k, i) for k in small_algebra.degrees()
         for i in range(small_algebra.dim(k)) if 0 < k <= 3]


@settings(max_examples=50, deadline=None)
@given(st.sampled_from(pairs), st.sampled_from(pairs))
def test_graded_commutativity_property(p, q):
    (k1, i1), (k2, i2) = p, q
    a = small_algebra.element(k1, {i1: Fraction(1)})
    b = small_algebra.element(k2, {i2: Fraction(1)})
    sign = Fraction(-1) if (k1 % 2 and k2 % 2) else Fraction(1)
    assert a * b == (b * a).scaled(sign)


@settings(max_examples=50, deadline=None)
@given(st.sampled_from(pairs), st.sampled_from(pairs), st.sampled_from(pairs))
def test_multiplication_associativity_property(p, q, r):
    (k1, i1), (k2, i2), (k3, i3) = p, q, r
    a = small_algebra.element(k1, {i1: Fraction(1)})
    b = small_algebra.element(k2, {i2: Fraction(1)})
    c = small_algebra.element(k3, {i3: Fraction(1)})
    assert (a * b) * c == a * (b * c)
