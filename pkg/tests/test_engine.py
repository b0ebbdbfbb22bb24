from fractions import Fraction

import pytest

from secat.cdga import (Element, FreeCdga, Generator, derivation_extend,
                        ideal_power)
from secat.engine import (CriterionMismatch, RelativeModel,
                          augmentation_smodel, join_model, mcat,
                          msecat_via_join, msecat_via_quotient, mtc,
                          multiplication_smodel, product_smodel,
                          relative_model_from_smodel, verify_additivity,
                          verify_subadditivity)
from secat.semifree import resolve_dual


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


def nilpotency_index(K, cap=12):
    """Brute-force: smallest p with K^p = 0."""
    for p in range(1, cap):
        if ideal_power(K, p).is_zero():
            return p
    raise AssertionError("kernel not nilpotent within cap")


# --- join model signs ---

def test_join_single_generator_example():
    # X = {w}, d0(w) = x, no d+: d(s^{-1} w(x)w) = -x^2
    A = cp(2)
    R = RelativeModel(A, [("w", 1)], {"w": A.gen_element("x")}, {})
    R.complex_module(check=True)
    J = join_model(R, 1)
    assert (("w", "w"), 3) in J.gens
    x = A.gen_element("x")
    assert J.d0[("w", "w")] == (x * x).scaled(Fraction(-1))


def test_join_stage_zero_is_the_relative_model():
    A = sphere(3)
    S = augmentation_smodel(A)
    R = relative_model_from_smodel(S, 6)
    J = join_model(R, 0, tuple_degree_cap=6)
    assert sorted(d for _, d in J.gens) == sorted(d for _, d in R.gens)
    for (name,), deg in [(t, d) for t, d in J.gens]:
        assert J.d0[(name,)] == R.d0[name]


def test_join_d_squared_zero_up_to_m_3():
    for A in (sphere(3), sphere(2), cp(2)):
        S = augmentation_smodel(A)
        R = relative_model_from_smodel(S, 8)
        for m in range(4):
            join_model(R, m, tuple_degree_cap=8).complex_module(check=True)


def test_relative_model_d0_lands_in_kernel():
    A = cp(2)
    S = multiplication_smodel(A, 2)
    R = relative_model_from_smodel(S, 6)
    for name, _ in R.gens:
        for k, vec in R.d0[name].comps.items():
            assert S.kernel.contains(k, vec)


# --- criteria and oracle values ---

def test_known_values_match_nilpotency_oracle():
    cases = [
        (augmentation_smodel(sphere(2)), "mcat", 1),
        (augmentation_smodel(sphere(3)), "mcat", 1),
        (augmentation_smodel(cp(2)), "mcat", 2),
        (augmentation_smodel(cp(3)), "mcat", 3),
        (multiplication_smodel(sphere(3), 2), "mtc_2", 1),
        (multiplication_smodel(sphere(2), 2), "mtc_2", 2),
        (multiplication_smodel(sphere(3), 3), "mtc_3", 2),
        (multiplication_smodel(sphere(2), 3), "mtc_3", 3),
    ]
    for S, inv, expected in cases:
        rep = msecat_via_quotient(S, m_max=6, invariant=inv)
        assert rep.value == expected, (inv, rep.value)
        # zero differential + Poincare duality: closed form is nil index - 1
        assert rep.value == nilpotency_index(S.kernel) - 1
        assert rep.status == "exact"


def test_quotient_and_join_routes_agree():
    smodels = [augmentation_smodel(sphere(2)),
               augmentation_smodel(sphere(3)),
               augmentation_smodel(cp(2)),
               multiplication_smodel(sphere(2), 2),
               multiplication_smodel(sphere(3), 2)]
    for S in smodels:
        q = msecat_via_quotient(S, m_max=5)
        j = msecat_via_join(S, m_max=5)
        assert q.value == j.value


def test_monotone_verdicts_once_true_always_true():
    for S in (augmentation_smodel(cp(3)),
              multiplication_smodel(sphere(2), 2)):
        rep = msecat_via_quotient(S, m_max=6, scan_all=True)
        seen_true = False
        transitions = 0
        for v in rep.per_m:
            if v and not seen_true:
                transitions += 1
                seen_true = True
            assert v or not seen_true, "verdict flipped back to false"
        assert transitions <= 1


def test_nilpotency_shortcut_upper_bound():
    S = augmentation_smodel(sphere(3))
    rep = msecat_via_quotient(S, m_max=4, scan_all=True)
    p = nilpotency_index(S.kernel)
    assert all(rep.per_m[m] for m in range(p - 1, 5))


def test_undetermined_interval_when_m_max_too_small():
    rep = msecat_via_quotient(augmentation_smodel(cp(3)), m_max=1)
    assert rep.value is None
    assert rep.lower == 2 and rep.upper is None
    assert rep.witness is not None


def test_report_witness_reverifies():
    S = multiplication_smodel(sphere(2), 2)
    rep = msecat_via_quotient(S, m_max=4)
    assert rep.value == 2 and rep.witness is not None
    res = resolve_dual(S.algebra)
    assert rep.witness.reverify(res, ideal_power(S.kernel, rep.value))


def test_mcat_of_point_and_trivial_kernel():
    assert mcat(FreeCdga([], name="Q")).value == 0


def test_mcat_window_certified_on_truncated_model():
    rep = mcat(free_s2(), m_max=4)
    assert rep.value == 1
    assert rep.status.startswith("window-certified")


def test_mtc_rejects_n_below_2():
    with pytest.raises(ValueError):
        mtc(sphere(3), n=1)


# --- products, additivity, subadditivity ---

def test_product_of_identity_models_is_identity_like():
    A = sphere(3)
    from secat.cdga import multiplication_morphism
    _, mu1 = multiplication_morphism(A, 1)
    from secat.engine import SurjectiveModel
    S = SurjectiveModel(mu1)
    P = product_smodel(S, S)
    assert P.kernel.is_zero()
    assert msecat_via_quotient(P, m_max=2).value == 0


def test_product_kernel_crosscheck_runs():
    Sf = augmentation_smodel(sphere(2))
    Sg = augmentation_smodel(sphere(3))
    P = product_smodel(Sf, Sg)
    # kernel of the tensor augmentation is the augmentation ideal
    assert P.kernel.dim(2) == 1 and P.kernel.dim(3) == 1 and P.kernel.dim(5) == 1


def test_additivity_on_the_paper_cases():
    cases = [
        (augmentation_smodel(sphere(3)), augmentation_smodel(sphere(3)), 2),
        (augmentation_smodel(sphere(2)), augmentation_smodel(cp(2)), 3),
        (multiplication_smodel(sphere(2), 2), multiplication_smodel(sphere(3), 2), 3),
        (multiplication_smodel(sphere(3), 2), multiplication_smodel(sphere(3), 2), 2),
    ]
    for Sf, Sg, expected in cases:
        rep = verify_additivity(Sf, Sg, m_max=6)
        assert rep.equal and rep.lhs == expected
        assert rep.status == "exact"


def test_additivity_with_trivial_factor():
    from secat.cdga import multiplication_morphism
    from secat.engine import SurjectiveModel
    A = sphere(3)
    _, mu1 = multiplication_morphism(A, 1)
    rep = verify_additivity(SurjectiveModel(mu1), augmentation_smodel(cp(2)),
                            m_max=5)
    assert rep.equal and rep.lhs == 2


def test_additivity_requires_retraction_hypothesis():
    A = sphere(3)
    S = augmentation_smodel(A)
    bare = type(S)(S.phi, kernel=S.kernel, section=None)
    with pytest.raises(ValueError):
        verify_additivity(bare, bare, m_max=2)


def test_subadditivity_without_sections():
    Sf = augmentation_smodel(sphere(2))
    Sg = augmentation_smodel(sphere(3))
    bare_f = type(Sf)(Sf.phi, kernel=Sf.kernel, section=None)
    bare_g = type(Sg)(Sg.phi, kernel=Sg.kernel, section=None)
    rep = verify_subadditivity(bare_f, bare_g, m_max=5)
    assert rep.subadditive
    assert rep.lhs == 2 and rep.rhs == 2


def test_join_route_marks_single_sided_inputs():
    S = augmentation_smodel(sphere(3))
    bare = type(S)(S.phi, kernel=S.kernel, section=None)
    rep = msecat_via_join(bare, m_max=3)
    assert rep.value == 1
    assert rep.note == "definitional criterion, single-sided"
