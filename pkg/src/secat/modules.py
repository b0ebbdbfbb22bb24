"""Modules over a CDGA: graded action, differential, quotients, duals.

Elements of a module are "graded vectors": dict degree -> sparse column
vector over that degree's basis.  The algebra is duck-typed; it must
provide basis(k), dim(k), degrees(), mul_basis(k1,i,k2,j) and
diff_basis(k,i), plus top_degree (None when not finite-dimensional).
"""

from fractions import Fraction

from .linalg import (ChainComplex, DegreeWindow, GradedMap, GradedSpace,
                     QMatrix, QuotientSpace, WindowViolation, vec_add,
                     vec_scale)


class InfiniteDimension(Exception):
    pass


def gv_add(u, v, scale=Fraction(1)):
    out = {k: dict(w) for k, w in u.items() if w}
    for k, w in v.items():
        merged = vec_add(out.get(k, {}), w, scale)
        if merged:
            out[k] = merged
        else:
            out.pop(k, None)
    return out


def gv_scale(v, c):
    if not c:
        return {}
    return {k: vec_scale(w, c) for k, w in v.items() if w}


def gv_is_zero(v):
    return all(not w for w in v.values())


class AModule:
    """Finite-per-degree module over a CDGA, with explicit action table.

    action maps ((adeg, aidx), (mdeg, midx)) to a sparse vector in module
    degree adeg + mdeg; absent entries are zero.  The differential has
    degree +1.  Degrees outside the window are not represented; callers
    own the soundness of any truncation (see certified ranges upstream).
    """

    def __init__(self, algebra, space, window, action, differential, check=True):
        self.algebra = algebra
        self.space = space
        self.window = window
        self.action = action
        self.d = differential
        self._complex = None
        if check:
            self.check_d_squared()

    def complex(self):
        if self._complex is None:
            self._complex = ChainComplex(self.space, self.d, self.window, check=False)
        return self._complex

    def check_d_squared(self):
        for k in self.space.degrees():
            if k + 2 <= self.window.max_degree:
                if not (self.d.block(k + 1) @ self.d.block(k)).is_zero():
                    raise ValueError("module d^2 != 0 at degree %d" % k)

    def act_basis(self, adeg, aidx, mdeg, midx):
        return self.action.get(((adeg, aidx), (mdeg, midx)), {})

    def act(self, adeg, avec, mvec):
        """Action of a homogeneous algebra vector on a graded module vector."""
        out = {}
        for mdeg, w in mvec.items():
            tdeg = adeg + mdeg
            for midx, mc in w.items():
                for aidx, ac in avec.items():
                    res = self.act_basis(adeg, aidx, mdeg, midx)
                    if res:
                        out[tdeg] = vec_add(out.get(tdeg, {}), res, ac * mc)
        return {k: w for k, w in out.items() if w}

    def d_apply(self, mvec):
        out = {}
        for k, w in mvec.items():
            r = self.d.apply(k, w)
            if r:
                out[k + 1] = vec_add(out.get(k + 1, {}), r)
        return {k: w for k, w in out.items() if w}

    def check_leibniz(self):
        """d(a.m) = d(a).m + (-1)^|a| a.d(m) on every stored action pair."""
        for ((adeg, aidx), (mdeg, midx)) in list(self.action):
            if adeg + mdeg + 1 > self.window.max_degree:
                continue
            am = {adeg + mdeg: self.act_basis(adeg, aidx, mdeg, midx)}
            lhs = self.d_apply(am)
            try:
                da = self.algebra.diff_basis(adeg, aidx)
            except WindowViolation:
                da = {}
            rhs = self.act(adeg + 1, da, {mdeg: {midx: Fraction(1)}})
            dm = self.d_apply({mdeg: {midx: Fraction(1)}})
            sign = Fraction(-1) if adeg % 2 else Fraction(1)
            rhs = gv_add(rhs, self.act(adeg, {aidx: Fraction(1)}, dm), sign)
            if not gv_is_zero(gv_add(lhs, rhs, Fraction(-1))):
                raise ValueError("Leibniz fails on algebra (%d,%d), module (%d,%d)"
                                 % (adeg, aidx, mdeg, midx))


def free_module(algebra, gens, d_gens, mwindow, check=True):
    """Free module A (x) W on generators gens = [(name, degree), ...].

    Basis labels at module degree t are pairs (algebra_label, gen_name).
    d_gens maps a generator name to a label-keyed graded vector
    {degree: {(algebra_label, gen_name): coeff}}.  Module degrees outside
    mwindow are cut off; that cut is the quotient by a subcomplex when the
    algebra is finite-dimensional or its window dominates mwindow, and a
    certified-range concern otherwise.
    """
    gdeg = dict(gens)

    # Out-of-window algebra products are quotiented away: A^{>cap} (x) W is
    # closed under d and the action, so dropping it is a genuine quotient
    # complex; certified ranges account for it upstream.
    def mul_b(adeg, aidx, bdeg, bidx):
        try:
            return algebra.mul_basis(adeg, aidx, bdeg, bidx)
        except WindowViolation:
            return {}

    def diff_b(adeg, aidx):
        try:
            return algebra.diff_basis(adeg, aidx)
        except WindowViolation:
            return {}

    support = {}
    for name, wdeg in gens:
        for adeg in algebra.degrees():
            t = adeg + wdeg
            if t in mwindow:
                support.setdefault(t, []).extend(
                    (lab, name) for lab in algebra.basis(adeg))
    space = GradedSpace(support)
    windex = {}
    for t, labels in space.support.items():
        for i, lab in enumerate(labels):
            windex[(t, lab)] = i

    def to_indices(gv):
        out = {}
        for t, w in gv.items():
            if t not in mwindow:
                continue
            vec = {}
            for lab, c in w.items():
                key = (t, lab)
                if key in windex and c:
                    vec[windex[key]] = vec.get(windex[key], Fraction(0)) + c
            vec = {i: c for i, c in vec.items() if c}
            if vec:
                out[t] = vec
        return out

    def left_mul(adeg, aidx, t, midx):
        """(algebra basis elt) . (module basis elt), as a label-keyed vector."""
        blab, name = space.support[t][midx]
        bdeg = t - gdeg[name]
        bidx = algebra.basis(bdeg).index(blab)
        prod = mul_b(adeg, aidx, bdeg, bidx)
        tt = t + adeg
        out = {}
        for pidx, c in prod.items():
            out[(algebra.basis(adeg + bdeg)[pidx], name)] = c
        return {tt: out} if out else {}

    action = {}
    for adeg in algebra.degrees():
        for aidx in range(algebra.dim(adeg)):
            for t in space.degrees():
                if adeg + t not in mwindow:
                    continue
                for midx in range(space.dim(t)):
                    v = to_indices(left_mul(adeg, aidx, t, midx))
                    if v.get(adeg + t):
                        action[((adeg, aidx), (t, midx))] = v[adeg + t]

    d_gens_idx = {name: to_indices(gv) for name, gv in d_gens.items()}

    def act_idx(adeg, aidx, gv):
        out = {}
        for t, w in gv.items():
            for midx, c in w.items():
                res = action.get(((adeg, aidx), (t, midx)))
                if res:
                    out[t + adeg] = vec_add(out.get(t + adeg, {}), res, c)
        return {k: w for k, w in out.items() if w}

    diff = GradedMap(space, space, 1)
    blocks = {t: QMatrix(space.dim(t + 1), space.dim(t)) for t in space.degrees()}
    for t in space.degrees():
        for midx, (alab, name) in enumerate(space.basis(t)):
            adeg = t - gdeg[name]
            aidx = algebra.basis(adeg).index(alab)
            total = {}
            for j, c in diff_b(adeg, aidx).items():
                key = (t + 1, (algebra.basis(adeg + 1)[j], name))
                if key in windex:
                    total[windex[key]] = total.get(windex[key], Fraction(0)) + c
            dw = d_gens_idx.get(name)
            if dw:
                sign = Fraction(-1) if adeg % 2 else Fraction(1)
                for j, c in act_idx(adeg, aidx, dw).get(t + 1, {}).items():
                    s = total.get(j, Fraction(0)) + sign * c
                    if s:
                        total[j] = s
                    else:
                        total.pop(j, None)
            for j, c in total.items():
                if c:
                    blocks[t].set_entry(j, midx, c)
    for t, m in blocks.items():
        if not m.is_zero():
            diff.set_block(t, m)

    mod = AModule(algebra, space, mwindow, action, diff, check=check)
    mod.generators = list(gens)
    mod.label_index = windex
    mod.to_indices = to_indices
    return mod


def quotient_module(M, sub_vectors, with_action=True):
    """Quotient of M by the span of sub_vectors (dict degree -> list of vecs).

    The span must be closed under d and the action (ideal-times-module
    subspaces are); d-closure is verified.  Returns (quotient AModule,
    projection GradedMap, lift function).  with_action=False skips the
    quotient action table for callers that only consume d, proj and lift.
    """
    quots = {t: QuotientSpace(M.space.dim(t), sub_vectors.get(t, []))
             for t in M.space.degrees()}
    support = {t: [("q", t, k) for k in range(q.qdim)]
               for t, q in quots.items() if q.qdim}
    qspace = GradedSpace(support)

    action = {}
    if with_action:
        for mdeg, q in quots.items():
            for k in range(q.qdim):
                rep = q.lift({k: Fraction(1)})
                for adeg in M.algebra.degrees():
                    if adeg + mdeg not in quots:
                        continue
                    for aidx in range(M.algebra.dim(adeg)):
                        res = M.act(adeg, {aidx: Fraction(1)}, {mdeg: rep})
                        v = quots[adeg + mdeg].project(res.get(adeg + mdeg, {}))
                        if v:
                            action[((adeg, aidx), (mdeg, k))] = v

    diff = GradedMap(qspace, qspace, 1)
    proj = GradedMap(M.space, qspace, 0)
    for t, q in quots.items():
        if q.qdim and M.space.dim(t):
            proj.set_block(t, q.projection_matrix())
    for t, q in quots.items():
        if t + 1 not in quots or not q.qdim:
            continue
        m = QMatrix(quots[t + 1].qdim, q.qdim)
        for k in range(q.qdim):
            m.cols[k] = quots[t + 1].project(M.d.apply(t, q.lift({k: Fraction(1)})))
        if not m.is_zero():
            diff.set_block(t, m)
    for t, vecs in sub_vectors.items():
        if t + 1 not in quots:
            continue
        for v in vecs:
            if quots[t + 1].project(M.d.apply(t, v)):
                raise ValueError("subspace not closed under d at degree %d" % t)

    Q = AModule(M.algebra, qspace, M.window, action, diff, check=False)

    def lift(t, qv):
        return quots[t].lift(qv) if t in quots else {}

    Q.lift = lift
    Q.quotient_spaces = quots
    return Q, proj, lift


def dual_module(algebra, check=True):
    """A^# = Hom(A, Q) with the standard sign conventions.

    Basis at degree -k is the dual basis of A^k; the action is
    (a.phi)(x) = (-1)^{|a||phi|} phi(ax) and d(phi) = -(-1)^{|phi|} phi o d.
    The minus on the differential is forced: without it the two phi(da.x)
    terms in the Leibniz identity add up instead of cancelling.
    """
    top = getattr(algebra, "top_degree", None)
    if top is None:
        top = algebra.window.max_degree
        if getattr(algebra, "finite_dimensional", False) is False and top is None:
            raise InfiniteDimension("dual module needs a finite algebra or window cap")
    support = {-k: [("dual", lab) for lab in algebra.basis(k)]
               for k in algebra.degrees()}
    space = GradedSpace(support)
    window = DegreeWindow(-top - 1, 1)

    action = {}
    for adeg in algebra.degrees():
        for aidx in range(algebra.dim(adeg)):
            for k in algebra.degrees():
                mdeg = -k
                xdeg = -(adeg + mdeg)  # (a.b^dual) is a functional on A^xdeg
                if algebra.dim(xdeg) == 0:
                    continue
                sign = Fraction(-1) if (adeg % 2) and (mdeg % 2) else Fraction(1)
                for bidx in range(algebra.dim(k)):
                    vec = {}
                    for xidx in range(algebra.dim(xdeg)):
                        c = algebra.mul_basis(adeg, aidx, xdeg, xidx).get(bidx)
                        if c:
                            vec[xidx] = sign * c
                    if vec:
                        action[((adeg, aidx), (mdeg, bidx))] = vec

    diff = GradedMap(space, space, 1)
    for k in algebra.degrees():
        mdeg = -k
        if algebra.dim(k - 1) == 0 or algebra.dim(k) == 0:
            continue
        m = QMatrix(algebra.dim(k - 1), algebra.dim(k))
        sign = Fraction(1) if mdeg % 2 else Fraction(-1)
        for bidx in range(algebra.dim(k)):
            for xidx in range(algebra.dim(k - 1)):
                c = algebra.diff_basis(k - 1, xidx).get(bidx)
                if c:
                    m.set_entry(xidx, bidx, sign * c)
        if not m.is_zero():
            diff.set_block(mdeg, m)
    mod = AModule(algebra, space, window, action, diff, check=check)
    if check:
        mod.check_leibniz()
    return mod
