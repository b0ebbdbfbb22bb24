"""Semifree resolutions, ideal-action quotients, the retraction criterion.

The dual A^# of a Poincare-duality basis model is free of rank one, so its
resolution is immediate.  Otherwise resolutions are built by sweeping a
degree range to a fixpoint: at each degree, generators are added to make
eta surjective on homology, then generators one degree below to kill its
kernel; a final verification pass is the authority on exactness.
"""

from fractions import Fraction

from .linalg import (DegreeWindow, GradedMap, QMatrix, echelon,
                     induced_on_homology, injective_on_homology, in_span,
                     rank, solve, span_rref, vec_add)
from .cdga import Ideal, poincare_duality_generator
from .modules import (AModule, dual_module, free_module, gv_add, gv_is_zero,
                      gv_scale, quotient_module)


class DepthExhausted(Exception):
    pass


class NoWitness(Exception):
    pass


class SemifreeResolution:
    """Free module P = A (x) W with a quasi-isomorphism eta onto the target.

    certified is the degree interval on which the quasi-isomorphism has
    been verified; outside it no claim is made.  exact means the target
    was resolved with no truncation anywhere (finite-dimensional case).
    """

    def __init__(self, algebra, P, target, eta, gens, d_gens, eta_gens,
                 certified, exact):
        self.algebra = algebra
        self.P = P
        self.target = target
        self.eta = eta
        self.gens = gens
        self.d_gens = d_gens
        self.eta_gens = eta_gens
        self.certified = certified
        self.exact = exact
        self._h_support = None

    def homology_support(self):
        """Degrees in the certified range where H(P) is nonzero."""
        if self._h_support is None:
            lo, hi = self.certified
            C = self.P.complex()
            sup = []
            for t in range(lo, hi + 1):
                if C.homology_at(t).dim:
                    sup.append(t)
            self._h_support = sup
        return self._h_support


def _eta_map(A, P, M, eta_gens, gens):
    gdeg = dict(gens)
    eta = GradedMap(P.space, M.space, 0)
    for t in P.space.degrees():
        m = QMatrix(M.space.dim(t), P.space.dim(t))
        for i, (alab, name) in enumerate(P.space.basis(t)):
            ev = eta_gens.get(name)
            if not ev or gv_is_zero(ev):
                continue
            adeg = t - gdeg[name]
            aidx = A.basis(adeg).index(alab)
            img = M.act(adeg, {aidx: Fraction(1)}, ev)
            for j, c in img.get(t, {}).items():
                m.set_entry(j, i, c)
        if not m.is_zero():
            eta.set_block(t, m)
    return eta


def build_resolution(A, M, compare_lo, compare_hi, start_gens, start_eta,
                     descending, mwindow, max_sweeps=30, normalize=None,
                     name_prefix="w"):
    """Generic degree-sweeping semifree resolution of the module M over A.

    start_gens seed the filtration (e.g. the unit stage for A/K targets).
    normalize, when given, maps (z, u) for a prospective killing generator
    with d(w) = z, eta(w) = u to an adjusted pair (used to keep d0 inside
    the kernel ideal for relative models).  Returns a SemifreeResolution
    whose certified range is the subset of [compare_lo, compare_hi] that
    verified; exactness holds when a full sweep was clean.
    """
    gens = list(start_gens)
    d_gens = {name: {} for name, _ in gens}
    eta_gens = dict(start_eta)
    counter = [0]

    def fresh(deg):
        counter[0] += 1
        return "%s%d" % (name_prefix, counter[0])

    order = list(range(compare_hi, compare_lo - 1, -1)) if descending \
        else list(range(compare_lo, compare_hi + 1))

    P = free_module(A, gens, d_gens, mwindow, check=False)
    eta = _eta_map(A, P, M, eta_gens, gens)
    CM = M.complex()
    clean = False
    for _ in range(max_sweeps):
        added = 0
        for t in order:
            CP = P.complex()
            hp = CP.homology_at(t)
            hm = CM.homology_at(t)
            F = QMatrix(hm.dim, hp.dim)
            images = []
            for j, r in enumerate(hp.reps):
                img = eta.apply(t, r)
                co = hm.coords(img)
                F.cols[j] = co
                images.append(co)
            changed = False
            # kill the kernel of H(eta) at t with generators at t-1
            _, ker, _ = echelon(F)
            for c in ker:
                z = {}
                for j, cj in c.items():
                    z = vec_add(z, hp.reps[j], cj)
                img = eta.apply(t, z)
                if img:
                    u = solve(CM.d.block(t - 1), img)
                    if u is None:
                        raise DepthExhausted(
                            "target class not exact at degree %d" % t)
                else:
                    u = {}
                zg = {t: z}
                ug = {t - 1: u} if u else {}
                if normalize is not None:
                    zg, ug = normalize(P, zg, ug)
                w = fresh(t - 1)
                gens.append((w, t - 1))
                d_gens[w] = _index_to_labels(P, zg)
                eta_gens[w] = ug
                changed = True
                added += 1
            if not changed:
                # make H(eta) surjective at t with cocycle generators at t
                img_span = span_rref(images)
                for k, _rep in enumerate(hm.reps):
                    e_k = {k: Fraction(1)}
                    if in_span(e_k, img_span):
                        continue
                    w = fresh(t)
                    gens.append((w, t))
                    d_gens[w] = {}
                    eta_gens[w] = {t: dict(hm.reps[k])}
                    img_span = span_rref(img_span + [e_k])
                    changed = True
                    added += 1
            if changed:
                P = free_module(A, gens, d_gens, mwindow, check=False)
                eta = _eta_map(A, P, M, eta_gens, gens)
        if added == 0:
            clean = True
            break
    # verification pass: the authority on the certified range
    lo, hi = _certify(P, M, eta, compare_lo, compare_hi)
    return SemifreeResolution(A, P, M, eta, gens, d_gens, eta_gens,
                              (lo, hi), exact=clean)


def _certify(P, M, eta, compare_lo, compare_hi):
    """Largest subinterval of [compare_lo, compare_hi] on which eta is an
    isomorphism in homology, by direct rank computation per degree."""
    verified = []
    CP = P.complex()
    CM = M.complex()
    for t in range(compare_lo, compare_hi + 1):
        hp = CP.homology_at(t)
        hm = CM.homology_at(t)
        if hp.dim != hm.dim:
            continue
        F = QMatrix(hm.dim, hp.dim)
        try:
            for j, r in enumerate(hp.reps):
                F.cols[j] = hm.coords(eta.apply(t, r))
        except ValueError:
            continue
        if rank(F) == hm.dim:
            verified.append(t)
    lo = compare_lo
    hi = compare_hi
    while lo <= hi and lo not in verified:
        lo += 1
    while hi >= lo and hi not in verified:
        hi -= 1
    if lo > hi:
        raise DepthExhausted("resolution did not certify any degree")
    return lo, hi


def _index_to_labels(P, gv):
    out = {}
    for t, w in gv.items():
        lab = {}
        for i, c in w.items():
            lab[P.space.basis(t)[i]] = c
        if lab:
            out[t] = lab
    return out


def resolve_dual(A, depth_slack=2, max_sweeps=30):
    """Semifree resolution P -> A^#.

    For a Poincare-duality basis model, P = A.v0 free of rank one on the
    dual of the top class (exact).  Otherwise a descending sweep builds
    generators down to -(top) - depth_slack and the result is certified
    on the degrees that verify.
    """
    M = dual_module(A, check=True)
    top = poincare_duality_generator(A)
    if top is not None:
        mwindow = DegreeWindow(-top - 1, 1)
        P = free_module(A, [("v0", -top)], {}, mwindow, check=False)
        eta_gens = {"v0": {-top: {0: Fraction(1)}}}
        eta = _eta_map(A, P, M, eta_gens, [("v0", -top)])
        res = SemifreeResolution(A, P, M, eta, [("v0", -top)], {"v0": {}},
                                 eta_gens, (-top, 0), exact=True)
        res.poincare_shortcut = True
        return res
    amax = A.window.max_degree
    atop = max(A.degrees())
    # A windowed free algebra is computed as its finite truncation A/A^{>max},
    # a genuine CDGA quotient; the resolution is exact over the truncation and
    # every verdict derived from it is reported window-certified.
    depth = -atop - depth_slack
    compare_lo = max(depth + 1, M.window.min_degree + 1)
    compare_hi = 0
    mwindow = DegreeWindow(depth - 1, compare_hi + 1)
    res = build_resolution(A, M, compare_lo, compare_hi,
                           start_gens=[], start_eta={},
                           descending=True, mwindow=mwindow,
                           max_sweeps=max_sweeps)
    if not A.finite_dimensional:
        res.exact = False
    res.poincare_shortcut = False
    return res


def tensor_resolution(T, res_f, res_g):
    """Resolution of (A (x) B)^# over T = A (x) B from factor resolutions.

    P_f (x) P_g is semifree over T and eta_f (x) eta_g lands in
    A^# (x) B^# = T^# via (phi (x) psi)(a (x) b) = (-1)^{|psi||a|}
    phi(a) psi(b).  Generic resolutions of tensor algebras can be
    exponentially larger than this, so product computations route here.
    The certification pass is the authority; a sign error above would
    fail it rather than be believed.
    """
    A, B = T.tensor_factors
    MT = dual_module(T, check=False)
    fdeg = dict(res_f.gens)
    gdeg = dict(res_g.gens)
    gens = []
    d_gens = {}
    eta_gens = {}
    for nf, df in res_f.gens:
        for ng, dg in res_g.gens:
            name = (nf, ng)
            gens.append((name, df + dg))
            dv = {}
            # d(gf (x) gg) = d(gf) (x) gg + (-1)^{|gf|} gf (x) d(gg)
            for t, w in res_f.d_gens.get(nf, {}).items():
                for (alab, nf2), c in w.items():
                    adeg = t - fdeg[nf2]
                    ia = A.basis(adeg).index(alab)
                    tlab = T.basis(adeg)[T.tensor_index[(adeg, ia, 0, 0)]]
                    key = (tlab, (nf2, ng))
                    dv.setdefault(t + dg, {})[key] = c
            for t, w in res_g.d_gens.get(ng, {}).items():
                for (blab, ng2), c in w.items():
                    bdeg = t - gdeg[ng2]
                    ib = B.basis(bdeg).index(blab)
                    # gf (x) (b.gg2) = (-1)^{|b||gf|} (1 (x) b).(gf (x) gg2)
                    sign = Fraction(-1) if (df * (1 + bdeg)) % 2 else Fraction(1)
                    tlab = T.basis(bdeg)[T.tensor_index[(0, 0, bdeg, ib)]]
                    key = (tlab, (nf, ng2))
                    cur = dv.setdefault(df + t, {})
                    cur[key] = cur.get(key, Fraction(0)) + sign * c
            d_gens[name] = {t: {k: c for k, c in w.items() if c}
                            for t, w in dv.items()}
            ev = {}
            for tf, wf in res_f.eta_gens.get(nf, {}).items():
                for tg, wg in res_g.eta_gens.get(ng, {}).items():
                    ka, kb = -tf, -tg
                    sign = Fraction(-1) if (ka * kb) % 2 else Fraction(1)
                    for i, c in wf.items():
                        for j, c2 in wg.items():
                            idx = T.tensor_index[(ka, i, kb, j)]
                            cur = ev.setdefault(tf + tg, {})
                            cur[idx] = cur.get(idx, Fraction(0)) + sign * c * c2
            eta_gens[name] = {t: {i: c for i, c in w.items() if c}
                              for t, w in ev.items()}

    lo_cand = res_f.certified[0] + res_g.certified[0]
    hi_cand = min(res_f.certified[1] + res_g.certified[1], 0)
    mwindow = DegreeWindow(lo_cand - 1, hi_cand + 1)
    P = free_module(T, gens, d_gens, mwindow, check=True)
    eta = _eta_map(T, P, MT, eta_gens, gens)
    lo, hi = _certify(P, MT, eta, lo_cand, hi_cand)
    exact = res_f.exact and res_g.exact and (lo, hi) == (lo_cand, hi_cand)
    res = SemifreeResolution(T, P, MT, eta, gens, d_gens, eta_gens, (lo, hi),
                             exact=exact)
    res.poincare_shortcut = False
    return res


def ideal_times_module(P, J):
    """Per-degree spanning vectors of J.P inside P."""
    sub = {}
    for s in J.degrees():
        for v in J.basis_at(s):
            for t in P.space.degrees():
                if s + t not in P.window or P.space.dim(s + t) == 0:
                    continue
                for midx in range(P.space.dim(t)):
                    w = P.act(s, v, {t: {midx: Fraction(1)}}).get(s + t)
                    if w:
                        sub.setdefault(s + t, []).append(w)
    return {k: span_rref(vecs) for k, vecs in sub.items()}


def quotient_by_ideal_action(P, J):
    """(P / J.P, projection, lift); projection is a chain map by construction."""
    sub = ideal_times_module(P, J)
    # the injectivity criterion and the witness construction only use the
    # quotient differential, projection and lift, never the action
    return quotient_module(P, sub, with_action=False)


class RetractionVerdict:
    def __init__(self, holds, per_degree, status, resolution, witness_input=None):
        self.holds = holds
        self.per_degree = per_degree
        self.status = status
        self.resolution = resolution
        self.witness_input = witness_input

    def __repr__(self):
        return "RetractionVerdict(holds=%r, status=%r, per_degree=%r)" % (
            self.holds, self.status, self.per_degree)


def projection_injective(res, J):
    """Is P -> P/J.P injective in homology on the support of H(P)?"""
    Q, proj, lift = quotient_by_ideal_action(res.P, J)
    support = res.homology_support()
    CP = res.P.complex()
    CQ = Q.complex()
    verdicts, overall = injective_on_homology(proj, CP, CQ, support)
    status = "exact" if res.exact else \
        "window-certified:%d..%d" % res.certified
    failing = [t for t, ok in verdicts.items() if not ok]
    witness_input = None
    if failing:
        witness_input = (failing[0], Q, proj, lift)
    return RetractionVerdict(overall, verdicts, status, res, witness_input)


def has_homotopy_retraction(phi, resolution=None, depth_slack=2):
    """Lemma-style criterion: the module projection P -> P/K.P is homology
    injective for P resolving A^#, iff phi admits a module homotopy
    retraction."""
    from .cdga import kernel_ideal
    A = phi.source
    K = kernel_ideal(phi)
    res = resolution if resolution is not None else resolve_dual(A, depth_slack)
    if K.is_zero():
        support = res.homology_support()
        return RetractionVerdict(True, {t: True for t in support},
                                 "exact" if res.exact else
                                 "window-certified:%d..%d" % res.certified, res)
    return projection_injective(res, K)


class WitnessClass:
    """Cocycle in K^m.P nontrivial in H(P), with re-verified certificate."""

    def __init__(self, degree, cocycle, certificate, theta, m):
        self.degree = degree
        self.cocycle = cocycle
        self.certificate = certificate
        self.theta = theta
        self.m = m

    def reverify(self, res, Km):
        """Independent rank checks: d(omega)=0, omega in K^m.P, [omega] != 0."""
        P = res.P
        t = self.degree
        if P.d.apply(t, self.cocycle):
            return False
        sub = ideal_times_module(P, Km)
        if not in_span(self.cocycle, sub.get(t, [])):
            return False
        hp = P.complex().homology_at(t)
        try:
            co = hp.coords(self.cocycle)
        except ValueError:
            return False
        return bool(co)


def lower_bound_witness(res, K, m):
    """From a failed criterion at m-1, produce omega in K^m.P with [omega] != 0.

    Finds a homology class of P dying in P/K^m.P, peels off a boundary to
    land the representative inside K^m.P.  Raises NoWitness when the
    criterion at m-1 in fact holds.
    """
    from .cdga import ideal_power
    Km = ideal_power(K, m) if m >= 1 else None
    if Km is None or Km.is_zero():
        raise NoWitness("K^%d = 0" % m)
    verdict = projection_injective(res, Km)
    if verdict.holds:
        raise NoWitness("projection by K^%d is injective in homology" % m)
    t, Q, proj, lift = verdict.witness_input
    CP = res.P.complex()
    CQ = Q.complex()
    F = induced_on_homology(proj, CP, CQ, t)
    _, ker, _ = echelon(F)
    c = ker[0]
    hp = CP.homology_at(t)
    z = {}
    for j, cj in c.items():
        z = vec_add(z, hp.reps[j], cj)
    # [proj z] = 0 in H(Q): solve d_Q(theta_bar) = proj z, lift, subtract
    pz = proj.apply(t, z)
    theta = {}
    if pz:
        tb = solve(CQ.d.block(t - 1), pz)
        if tb is None:
            raise NoWitness("projected class is not exact; criterion holds")
        theta = lift(t - 1, tb)
    omega = vec_add(z, res.P.d.apply(t - 1, theta), Fraction(-1)) if theta else z
    certificate = hp.coords(omega)
    w = WitnessClass(t, omega, certificate, theta, m)
    if not w.reverify(res, Km):
        raise NoWitness("witness failed re-verification")
    return w
