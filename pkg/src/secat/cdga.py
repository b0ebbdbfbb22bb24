"""Free and basis-presented graded-commutative differential algebras over Q.

Monomials of a free presentation are exponent tuples over the canonical
generator order (degree, name); the Koszul sign of a product counts
transpositions of odd-degree factors.  Basis presentations carry an
explicit multiplication table and are what tensor products and quotient
algebras produce.
"""

from fractions import Fraction

from .linalg import (DegreeWindow, GradedMap, GradedSpace, QMatrix,
                     QuotientSpace, WindowViolation, echelon, in_span,
                     reduce_mod_span, span_rref, vec_add, rank)
from .modules import AModule, dual_module as _dual_module_raw

DEFAULT_WINDOW_MAX = 24


class DSquaredNonzero(Exception):
    pass


class NotSurjective(Exception):
    pass


class NotDifferentialIdeal(Exception):
    pass


class SimpleConnectivityError(Exception):
    pass


class Generator:
    def __init__(self, name, degree):
        if degree < 2:
            raise SimpleConnectivityError(
                "generator %s has degree %d < 2" % (name, degree))
        self.name = name
        self.degree = degree

    def __repr__(self):
        return "Generator(%r, %d)" % (self.name, self.degree)


class Element:
    """Q-linear combination of basis elements, one sparse vector per degree."""

    def __init__(self, algebra, comps=None):
        self.algebra = algebra
        self.comps = {k: dict(v) for k, v in (comps or {}).items() if v}

    def is_zero(self):
        return all(not v for v in self.comps.values())

    def __add__(self, other):
        out = {k: dict(v) for k, v in self.comps.items()}
        for k, v in other.comps.items():
            out[k] = vec_add(out.get(k, {}), v)
        return Element(self.algebra, out)

    def __sub__(self, other):
        return self + other.scaled(Fraction(-1))

    def scaled(self, c):
        c = Fraction(c)
        return Element(self.algebra, {k: {i: c * x for i, x in v.items()}
                                      for k, v in self.comps.items()} if c else {})

    def __mul__(self, other):
        A = self.algebra
        out = {}
        for k1, v1 in self.comps.items():
            for k2, v2 in other.comps.items():
                for i, c1 in v1.items():
                    for j, c2 in v2.items():
                        res = A.mul_basis(k1, i, k2, j)
                        if res:
                            out[k1 + k2] = vec_add(out.get(k1 + k2, {}), res, c1 * c2)
        return Element(A, out)

    def d(self):
        A = self.algebra
        out = {}
        for k, v in self.comps.items():
            for i, c in v.items():
                res = A.diff_basis(k, i)
                if res:
                    out[k + 1] = vec_add(out.get(k + 1, {}), res, c)
        return Element(A, out)

    def __eq__(self, other):
        return (self - other).is_zero()

    def homogeneous_part(self, k):
        return dict(self.comps.get(k, {}))

    def __repr__(self):
        A = self.algebra
        terms = []
        for k in sorted(self.comps):
            for i in sorted(self.comps[k]):
                c = self.comps[k][i]
                terms.append("%s*%s" % (c, A.label_str(k, i)))
        return " + ".join(terms) if terms else "0"


class CdgaBase:
    """Shared behaviour of free and basis presentations."""

    def dim(self, k):
        return len(self.basis(k))

    def degrees(self):
        top = self.top_degree if self.finite_dimensional else self.window.max_degree
        return [k for k in range(0, top + 1) if self.dim(k)]

    def space(self):
        return GradedSpace({k: list(self.basis(k)) for k in self.degrees()})

    def unit_index(self):
        return 0

    def one(self):
        return Element(self, {0: {0: Fraction(1)}})

    def element(self, k, vec):
        return Element(self, {k: dict(vec)})

    def differential_map(self):
        sp = self.space()
        d = GradedMap(sp, sp, 1)
        for k in self.degrees():
            m = QMatrix(self.dim(k + 1), self.dim(k))
            for i in range(self.dim(k)):
                try:
                    col = self.diff_basis(k, i)
                except WindowViolation:
                    col = {}
                for j, c in col.items():
                    m.set_entry(j, i, c)
            if not m.is_zero():
                d.set_block(k, m)
        return d

    def check_graded_commutativity(self):
        for k1 in self.degrees():
            for k2 in self.degrees():
                if k1 > k2:
                    continue
                try:
                    for i in range(self.dim(k1)):
                        for j in range(self.dim(k2)):
                            ab = self.mul_basis(k1, i, k2, j)
                            ba = self.mul_basis(k2, j, k1, i)
                            sign = Fraction(-1) if (k1 % 2 and k2 % 2) else Fraction(1)
                            if vec_add(ab, ba, -sign):
                                raise ValueError(
                                    "graded commutativity fails at (%d,%d)" % (k1, k2))
                except WindowViolation:
                    continue

    def check_leibniz(self):
        for k1 in self.degrees():
            for k2 in self.degrees():
                if k1 + k2 + 1 > self.window.max_degree and not self.finite_dimensional:
                    continue
                for i in range(self.dim(k1)):
                    for j in range(self.dim(k2)):
                        try:
                            a = self.element(k1, {i: Fraction(1)})
                            b = self.element(k2, {j: Fraction(1)})
                            lhs = (a * b).d()
                            rhs = a.d() * b + (a * b.d()).scaled(-1 if k1 % 2 else 1)
                        except WindowViolation:
                            continue
                        if not (lhs - rhs).is_zero():
                            raise ValueError("Leibniz fails at (%d,%d)" % (k1, k2))

    def check_d_squared(self):
        for k in self.degrees():
            for i in range(self.dim(k)):
                try:
                    dd = self.element(k, {i: Fraction(1)}).d().d()
                except WindowViolation:
                    continue
                if not dd.is_zero():
                    raise DSquaredNonzero("d^2 != 0 on %s" % self.label_str(k, i))

    def validate(self):
        if self.dim(0) != 1:
            raise ValueError("degree 0 must be Q.1")
        if self.dim(1) != 0:
            raise SimpleConnectivityError("degree 1 component must vanish")
        self.check_graded_commutativity()
        self.check_leibniz()
        self.check_d_squared()


class FreeCdga(CdgaBase):
    """Lambda(generators)/(monomial relations), with d given on generators.

    Without relations this is the free graded-commutative algebra; monomial
    relations carve out an explicit basis (all monomials not divisible by a
    relation monomial), which is how basis presentations are entered.
    """

    def __init__(self, generators, d_values=None, relations=None, max_degree=None,
                 name=""):
        self.name = name
        self.generators = sorted(generators, key=lambda g: (g.degree, g.name))
        names = [g.name for g in self.generators]
        if len(set(names)) != len(names):
            raise ValueError("duplicate generator names")
        self.gen_index = {g.name: i for i, g in enumerate(self.generators)}
        self.gen_degrees = [g.degree for g in self.generators]
        self.relations = [tuple(r) for r in (relations or [])]
        for r in self.relations:
            if len(r) != len(self.generators):
                raise ValueError("relation exponent tuple has wrong length")
        self.caps = []
        for i, g in enumerate(self.generators):
            if g.degree % 2:
                self.caps.append(1)
            else:
                powers = [sum(r) for r in self.relations
                          if r[i] and all(x == 0 for k, x in enumerate(r) if k != i)]
                self.caps.append(min(powers) - 1 if powers else None)
        self.finite_dimensional = all(c is not None for c in self.caps)
        self.top_degree = (sum(c * g.degree for c, g in zip(self.caps, self.generators))
                           if self.finite_dimensional else None)
        if max_degree is None:
            max_degree = self.top_degree if self.finite_dimensional else DEFAULT_WINDOW_MAX
        if self.finite_dimensional:
            max_degree = max(max_degree, self.top_degree)
        self.window = DegreeWindow(0, max_degree)
        self._basis_cache = {}
        self._d_monomial_cache = {}
        self.d_gens = {}
        if d_values:
            for nm, val in d_values.items():
                self.set_differential(nm, val)

    @property
    def presentation(self):
        return "basis" if self.relations else "free"

    def set_differential(self, gen_name, value):
        """value: Element of this algebra, or a word-dict {exptuple: coeff}."""
        if isinstance(value, Element):
            value = self._element_to_words(value)
        elif not value:
            value = {}
        g = self.generators[self.gen_index[gen_name]]
        for word, c in value.items():
            if c and self._word_degree(word) != g.degree + 1:
                raise ValueError("d(%s) is not homogeneous of degree %d"
                                 % (gen_name, g.degree + 1))
        self.d_gens[gen_name] = {w: Fraction(c) for w, c in value.items() if c}
        self._d_monomial_cache.clear()

    def _word_degree(self, word):
        return sum(e * d for e, d in zip(word, self.gen_degrees))

    def _divisible_by_relation(self, word):
        return any(all(e >= r for e, r in zip(word, rel)) for rel in self.relations)

    def _word_valid(self, word):
        for e, g, cap in zip(word, self.generators, self.caps):
            if g.degree % 2 and e > 1:
                return False
            if cap is not None and e > cap:
                return False
        return not self._divisible_by_relation(word)

    def basis(self, k):
        if k < 0:
            return []
        if k not in self._basis_cache:
            words = []

            def rec(i, remaining, acc):
                if i == len(self.generators):
                    if remaining == 0:
                        words.append(tuple(acc))
                    return
                d = self.gen_degrees[i]
                emax = remaining // d
                if self.gen_degrees[i] % 2:
                    emax = min(emax, 1)
                for e in range(emax + 1):
                    rec(i + 1, remaining - e * d, acc + [e])

            rec(0, k, [])
            words = [w for w in words if self._word_valid(w)]
            self._basis_cache[k] = sorted(words)
        return self._basis_cache[k]

    def label_str(self, k, i):
        word = self.basis(k)[i]
        if not any(word):
            return "1"
        parts = []
        for e, g in zip(word, self.generators):
            if e == 1:
                parts.append(g.name)
            elif e > 1:
                parts.append("%s^%d" % (g.name, e))
        return "*".join(parts)

    def word_mul(self, w1, w2):
        """Product of two monomial words: (sign, word) or None if zero."""
        inv = 0
        odd1 = [p for p in range(len(w1)) if w1[p] and self.gen_degrees[p] % 2]
        odd2 = [q for q in range(len(w2)) if w2[q] and self.gen_degrees[q] % 2]
        for p in odd1:
            if w1[p] + w2[p] > 1 and p in odd2:
                return None
            inv += sum(1 for q in odd2 if q < p)
        word = tuple(a + b for a, b in zip(w1, w2))
        if not self._word_valid(word):
            return None
        return (Fraction(-1) ** inv, word)

    def mul_basis(self, k1, i, k2, j):
        k = k1 + k2
        if not self.finite_dimensional and k > self.window.max_degree:
            raise WindowViolation("product degree %d beyond window max %d"
                                  % (k, self.window.max_degree))
        res = self.word_mul(self.basis(k1)[i], self.basis(k2)[j])
        if res is None:
            return {}
        sign, word = res
        return {self.basis(k).index(word): sign}

    def _poly_mul_word(self, poly, word, on_left):
        out = {}
        for t, c in poly.items():
            res = self.word_mul(t, word) if on_left else self.word_mul(word, t)
            if res is None:
                continue
            sign, w = res
            s = out.get(w, Fraction(0)) + sign * c
            if s:
                out[w] = s
            else:
                out.pop(w, None)
        return out

    def d_word(self, word):
        """Differential of a monomial word, as a word-dict (free Leibniz)."""
        word = tuple(word)
        if word in self._d_monomial_cache:
            return self._d_monomial_cache[word]
        g = next((i for i, e in enumerate(word) if e), None)
        if g is None:
            out = {}
        else:
            rest = tuple(e - 1 if i == g else e for i, e in enumerate(word))
            dg = self.d_gens.get(self.generators[g].name, {})
            out = dict(self._poly_mul_word(dg, rest, on_left=True))
            drest = self.d_word(rest)
            sign = Fraction(-1) ** self.gen_degrees[g]
            gword = tuple(1 if i == g else 0 for i in range(len(word)))
            for w, c in self._poly_mul_word(drest, gword, on_left=False).items():
                s = out.get(w, Fraction(0)) + sign * c
                if s:
                    out[w] = s
                else:
                    out.pop(w, None)
        self._d_monomial_cache[word] = out
        return out

    def diff_basis(self, k, i):
        dw = self.d_word(self.basis(k)[i])
        dw = {w: c for w, c in dw.items() if self._word_valid(w)}
        if not dw:
            return {}
        if k + 1 > self.window.max_degree and not self.finite_dimensional:
            raise WindowViolation("d lands in degree %d beyond window" % (k + 1))
        tgt = self.basis(k + 1)
        return {tgt.index(w): c for w, c in dw.items()}

    def _element_to_words(self, el):
        out = {}
        for k, vec in el.comps.items():
            for i, c in vec.items():
                out[self.basis(k)[i]] = c
        return out

    def element_from_words(self, words):
        comps = {}
        for word, c in words.items():
            word = tuple(word)
            if not self._word_valid(word) or not c:
                continue
            k = self._word_degree(word)
            comps.setdefault(k, {})[self.basis(k).index(word)] = Fraction(c)
        return Element(self, comps)

    def gen_element(self, name):
        i = self.gen_index[name]
        word = tuple(1 if j == i else 0 for j in range(len(self.generators)))
        return self.element_from_words({word: 1})


def derivation_extend(algebra, values):
    """Install d from generator values; verifies d^2 = 0 and ideal closure.

    values: dict generator name -> Element (degree |g|+1).  Raises
    DSquaredNonzero with the offending monomial.
    """
    for nm, val in values.items():
        algebra.set_differential(nm, val)
    for nm in algebra.gen_index:
        g = algebra.gen_element(nm)
        if not g.d().d().is_zero():
            raise DSquaredNonzero("d^2 != 0 on generator %s" % nm)
    for rel in algebra.relations:
        for w, c in algebra.d_word(rel).items():
            if c and not algebra._divisible_by_relation(w):
                raise DSquaredNonzero(
                    "d does not preserve the relation ideal at %s" % (rel,))
    algebra.check_d_squared()
    return algebra.differential_map()


class BasisCdga(CdgaBase):
    """Explicit finite basis per degree with a multiplication table."""

    def __init__(self, labels, table, diff, window=None, finite_dimensional=True,
                 name="", check=True):
        self.name = name
        self._labels = {k: list(v) for k, v in labels.items() if v}
        if 0 not in self._labels or len(self._labels[0]) != 1:
            raise ValueError("degree 0 must be one-dimensional")
        self.finite_dimensional = finite_dimensional
        self.top_degree = max(self._labels) if finite_dimensional else None
        if window is None:
            window = DegreeWindow(0, max(self._labels))
        self.window = window
        self.table = {}
        for key, vec in table.items():
            vec = {i: Fraction(c) for i, c in vec.items() if c}
            if vec:
                self.table[key] = vec
        self.diff = {}
        for key, vec in diff.items():
            vec = {i: Fraction(c) for i, c in vec.items() if c}
            if vec:
                self.diff[key] = vec
        # unit products
        for k, labs in self._labels.items():
            for i in range(len(labs)):
                self.table[((0, 0), (k, i))] = {i: Fraction(1)}
                self.table[((k, i), (0, 0))] = {i: Fraction(1)}
        if check:
            self.validate()

    @property
    def presentation(self):
        return "basis"

    def basis(self, k):
        return self._labels.get(k, [])

    def label_str(self, k, i):
        lab = self._labels[k][i]
        return lab if isinstance(lab, str) else repr(lab)

    def mul_basis(self, k1, i, k2, j):
        k = k1 + k2
        if self.finite_dimensional and k > self.top_degree:
            return {}
        if not self.finite_dimensional and k > self.window.max_degree:
            raise WindowViolation("product degree %d beyond window max %d"
                                  % (k, self.window.max_degree))
        return dict(self.table.get(((k1, i), (k2, j)), {}))

    def diff_basis(self, k, i):
        return dict(self.diff.get((k, i), {}))


def trivial_algebra():
    return BasisCdga({0: ["1"]}, {}, {}, name="Q")


class CdgaMorphism:
    """Degree-0 unital algebra chain map, stored as one matrix per degree."""

    def __init__(self, source, target, blocks, name="", check=True):
        self.source = source
        self.target = target
        self.blocks = {}
        self.name = name
        for k, m in blocks.items():
            if not m.is_zero():
                self.blocks[k] = m
        if check:
            self.validate()

    def block(self, k):
        m = self.blocks.get(k)
        if m is None:
            return QMatrix.zero(self.target.dim(k), self.source.dim(k))
        return m

    def apply(self, el):
        out = {}
        for k, vec in el.comps.items():
            r = self.block(k).matvec(vec)
            if r:
                out[k] = r
        return Element(self.target, out)

    def graded_map(self):
        return GradedMap(self.source.space(), self.target.space(), 0,
                         {k: m for k, m in self.blocks.items()})

    def validate(self):
        if self.block(0).entry(0, 0) != 1:
            raise ValueError("morphism does not preserve the unit")
        common = [k for k in self.source.degrees()]
        for k in common:
            for i in range(self.source.dim(k)):
                try:
                    a = self.source.element(k, {i: Fraction(1)})
                    if not (self.apply(a.d()) - self.apply(a).d()).is_zero():
                        raise ValueError("morphism is not a chain map at degree %d" % k)
                except WindowViolation:
                    continue
        for k1 in common:
            for k2 in common:
                if k1 + k2 > min(self.source.window.max_degree,
                                 self.target.window.max_degree) and not (
                        self.source.finite_dimensional
                        and self.target.finite_dimensional):
                    continue
                for i in range(self.source.dim(k1)):
                    for j in range(self.source.dim(k2)):
                        try:
                            a = self.source.element(k1, {i: Fraction(1)})
                            b = self.source.element(k2, {j: Fraction(1)})
                            if not (self.apply(a * b)
                                    - self.apply(a) * self.apply(b)).is_zero():
                                raise ValueError(
                                    "morphism is not multiplicative at (%d,%d)"
                                    % (k1, k2))
                        except WindowViolation:
                            continue

    @classmethod
    def from_generator_images(cls, source, target, images, name="", check=True):
        """Extend generator images multiplicatively (free or relation source)."""
        blocks = {}
        for k in source.degrees():
            m = QMatrix(target.dim(k), source.dim(k))
            for i, word in enumerate(source.basis(k)):
                val = target.one()
                for e, g in zip(word, source.generators):
                    for _ in range(e):
                        val = val * images[g.name]
                for j, c in val.homogeneous_part(k).items():
                    m.set_entry(j, i, c)
            blocks[k] = m
        return cls(source, target, blocks, name=name, check=check)

    @classmethod
    def from_basis_images(cls, source, target, fn, name="", check=True):
        """fn(k, i) -> Element of the target, for each source basis element."""
        blocks = {}
        for k in source.degrees():
            m = QMatrix(target.dim(k), source.dim(k))
            for i in range(source.dim(k)):
                for j, c in fn(k, i).homogeneous_part(k).items():
                    m.set_entry(j, i, c)
            blocks[k] = m
        return cls(source, target, blocks, name=name, check=check)


class Ideal:
    """Per-degree echelonized subspaces of the ambient algebra."""

    def __init__(self, ambient, vectors):
        self.ambient = ambient
        self.vectors = {}
        for k, vecs in vectors.items():
            basis = span_rref(vecs)
            if basis:
                self.vectors[k] = basis

    def degrees(self):
        return sorted(self.vectors)

    def basis_at(self, k):
        return self.vectors.get(k, [])

    def dim(self, k):
        return len(self.vectors.get(k, ()))

    def is_zero(self):
        return not self.vectors

    def contains(self, k, vec):
        return in_span(vec, self.vectors.get(k, []))

    def check_differential_closure(self):
        A = self.ambient
        for k in self.degrees():
            for v in self.basis_at(k):
                try:
                    dv = A.element(k, v).d()
                except WindowViolation:
                    continue
                for kk, w in dv.comps.items():
                    if w and not self.contains(kk, w):
                        raise NotDifferentialIdeal(
                            "ideal not closed under d at degree %d" % k)


def kernel_ideal(phi):
    """Kernel of a surjective morphism; raises NotSurjective otherwise."""
    vectors = {}
    for k in phi.source.degrees():
        block = phi.block(k)
        r, ker, _ = echelon(block)
        if r < phi.target.dim(k):
            raise NotSurjective("not surjective in degree %d" % k)
        if ker:
            vectors[k] = ker
    K = Ideal(phi.source, vectors)
    K.check_differential_closure()
    return K


def ideal_power(K, p):
    """K^p: span of all p-fold products, degreewise, within the window."""
    if p < 1:
        raise ValueError("p must be >= 1")
    A = K.ambient
    cap = A.top_degree if A.finite_dimensional else A.window.max_degree
    current = K
    for _ in range(p - 1):
        vectors = {}
        for k1 in current.degrees():
            for k2 in K.degrees():
                k = k1 + k2
                if k > cap:
                    continue
                for v1 in current.basis_at(k1):
                    for v2 in K.basis_at(k2):
                        prod = (A.element(k1, v1) * A.element(k2, v2))
                        w = prod.homogeneous_part(k)
                        if w:
                            vectors.setdefault(k, []).append(w)
        current = Ideal(A, vectors)
    return current


def augmentation_ideal(A):
    vectors = {}
    for k in A.degrees():
        if k == 0:
            continue
        vectors[k] = [{i: Fraction(1)} for i in range(A.dim(k))]
    return Ideal(A, vectors)


def quotient_algebra(A, K):
    """A/K as a basis presentation, with the projection morphism."""
    K.check_differential_closure()
    quots = {k: QuotientSpace(A.dim(k), K.basis_at(k)) for k in A.degrees()}
    labels = {}
    reps = {}
    for k, q in quots.items():
        labs = []
        for c in q.coords:
            labs.append("[%s]" % A.label_str(k, c))
        if labs:
            labels[k] = labs
        reps[k] = q
    table = {}
    diff = {}
    cap = A.top_degree if A.finite_dimensional else A.window.max_degree
    for k1, q1 in quots.items():
        for k2, q2 in quots.items():
            if k1 + k2 > cap or (k1 + k2) not in quots:
                continue
            for i in range(q1.qdim):
                for j in range(q2.qdim):
                    a = A.element(k1, q1.lift({i: Fraction(1)}))
                    b = A.element(k2, q2.lift({j: Fraction(1)}))
                    v = quots[k1 + k2].project((a * b).homogeneous_part(k1 + k2))
                    if v:
                        table[((k1, i), (k2, j))] = v
    for k, q in quots.items():
        if k + 1 not in quots:
            continue
        for i in range(q.qdim):
            try:
                da = A.element(k, q.lift({i: Fraction(1)})).d()
            except WindowViolation:
                continue
            v = quots[k + 1].project(da.homogeneous_part(k + 1))
            if v:
                diff[(k, i)] = v
    Q = BasisCdga(labels, table, diff, window=A.window,
                  finite_dimensional=A.finite_dimensional,
                  name="%s/K" % getattr(A, "name", "A"), check=False)
    blocks = {}
    for k, q in quots.items():
        if q.qdim and A.dim(k):
            blocks[k] = q.projection_matrix()
    proj = CdgaMorphism(A, Q, blocks, name="projection", check=False)
    return Q, proj


def quotient_algebra_module(A, K):
    """A/K as an (A,d)-module together with the chain projection map."""
    Q, proj = quotient_algebra(A, K)
    space = Q.space()
    window = A.window
    action = {}
    for adeg in A.degrees():
        for aidx in range(A.dim(adeg)):
            for mdeg in Q.degrees():
                if adeg + mdeg > window.max_degree:
                    continue
                for midx in range(Q.dim(mdeg)):
                    a = A.element(adeg, {aidx: Fraction(1)})
                    rep = proj_lift(proj, mdeg, {midx: Fraction(1)})
                    try:
                        prod = (a * A.element(mdeg, rep)).homogeneous_part(adeg + mdeg)
                    except WindowViolation:
                        continue
                    v = proj.block(adeg + mdeg).matvec(prod)
                    if v:
                        action[((adeg, aidx), (mdeg, midx))] = v
    mod = AModule(A, space, window, action, Q.differential_map(), check=False)
    return mod, proj


def proj_lift(proj, k, vec):
    """Representative in the source of a quotient-projection morphism."""
    from .linalg import solve
    x = solve(proj.block(k), vec)
    if x is None:
        raise ValueError("cannot lift through projection at degree %d" % k)
    return x


def tensor(A, B, name=""):
    """A (x) B with the Koszul multiplication sign and tensor differential."""
    finite = A.finite_dimensional and B.finite_dimensional

    def eff_top(X):
        return X.top_degree if X.finite_dimensional else X.window.max_degree

    # quotients by degree truncation tensor to a quotient truncated at the
    # sum of the tops; a smaller cap would silently drop basis elements
    cap = eff_top(A) + eff_top(B)
    labels = {}
    index = {}
    for ka in A.degrees():
        for kb in B.degrees():
            k = ka + kb
            if k > cap:
                continue
            for i, la in enumerate(A.basis(ka)):
                for j, lb in enumerate(B.basis(kb)):
                    labels.setdefault(k, [])
                    index[(ka, i, kb, j)] = len(labels[k])
                    labels[k].append((ka, i, kb, j))

    def lab_str(entry):
        ka, i, kb, j = entry
        return "%s(x)%s" % (A.label_str(ka, i), B.label_str(kb, j))

    str_labels = {k: [lab_str(e) for e in v] for k, v in labels.items()}

    table = {}
    for k1, l1 in labels.items():
        for k2, l2 in labels.items():
            if k1 + k2 > cap:
                continue
            for i1, (ka1, ia1, kb1, ib1) in enumerate(l1):
                for i2, (ka2, ia2, kb2, ib2) in enumerate(l2):
                    try:
                        pa = A.mul_basis(ka1, ia1, ka2, ia2)
                        pb = B.mul_basis(kb1, ib1, kb2, ib2)
                    except WindowViolation:
                        if finite:
                            raise
                        continue
                    if not pa or not pb:
                        continue
                    sign = Fraction(-1) if (kb1 % 2 and ka2 % 2) else Fraction(1)
                    vec = {}
                    for ja, ca in pa.items():
                        for jb, cb in pb.items():
                            idx = index[(ka1 + ka2, ja, kb1 + kb2, jb)]
                            vec[idx] = sign * ca * cb
                    if vec:
                        table[((k1, i1), (k2, i2))] = vec

    diff = {}
    for k, l in labels.items():
        for i, (ka, ia, kb, ib) in enumerate(l):
            vec = {}
            try:
                da = A.diff_basis(ka, ia)
            except WindowViolation:
                da = {}
            for ja, c in da.items():
                key = (ka + 1, ja, kb, ib)
                if key in index:
                    vec[index[key]] = vec.get(index[key], Fraction(0)) + c
            try:
                db = B.diff_basis(kb, ib)
            except WindowViolation:
                db = {}
            sign = Fraction(-1) if ka % 2 else Fraction(1)
            for jb, c in db.items():
                key = (ka, ia, kb + 1, jb)
                if key in index:
                    vec[index[key]] = vec.get(index[key], Fraction(0)) + sign * c
            vec = {j: c for j, c in vec.items() if c}
            if vec:
                diff[(k, i)] = vec

    T = BasisCdga(str_labels, table, diff,
                  window=DegreeWindow(0, cap),
                  finite_dimensional=finite,
                  name=name or "%s(x)%s" % (getattr(A, "name", "A"),
                                            getattr(B, "name", "B")),
                  check=False)
    T.tensor_factors = (A, B)
    T.tensor_index = index
    T.tensor_labels = labels
    return T


def tensor_inclusion_data(T):
    """(factors, index, labels) of a tensor-constructed algebra."""
    return T.tensor_factors, T.tensor_index, T.tensor_labels


def tensor_morphism(phi, psi, name="", check=True):
    """phi (x) psi on tensor-constructed source and target (degree 0 maps)."""
    S = tensor(phi.source, psi.source)
    T = tensor(phi.target, psi.target)
    blocks = {}
    for k, l in S.tensor_labels.items():
        m = QMatrix(T.dim(k), S.dim(k))
        for i, (ka, ia, kb, ib) in enumerate(l):
            fa = phi.block(ka).matvec({ia: Fraction(1)})
            fb = psi.block(kb).matvec({ib: Fraction(1)})
            for ja, ca in fa.items():
                for jb, cb in fb.items():
                    m.set_entry(T.tensor_index[(ka, ja, kb, jb)], i, ca * cb)
        blocks[k] = m
    return S, T, CdgaMorphism(S, T, blocks, name=name, check=check)


def tensor_power(A, n):
    """A^{(x)n} as left-nested tensors, plus per-factor basis bookkeeping."""
    T = A
    for _ in range(n - 1):
        T = tensor(T, A)
    return T


def multiplication_morphism(A, n, check=True):
    """mu_n: A^{(x)n} -> A, the n-fold multiplication."""
    T = tensor_power(A, n)
    if n == 1:
        blocks = {k: QMatrix.identity(A.dim(k)) for k in A.degrees()}
        return T, CdgaMorphism(A, A, blocks, name="mu_1", check=False)

    def flatten(S, k, i):
        """Element of A: product of the factors of a nested tensor basis elt."""
        if S is A:
            return A.element(k, {i: Fraction(1)})
        (L, R), index, labs = S.tensor_factors, S.tensor_index, S.tensor_labels
        ka, ia, kb, ib = labs[k][i]
        return flatten(L, ka, ia) * flatten(R, kb, ib)

    phi = CdgaMorphism.from_basis_images(
        T, A, lambda k, i: flatten(T, k, i), name="mu_%d" % n, check=check)
    return T, phi


def augmentation_morphism(A, check=True):
    Q = trivial_algebra()
    blocks = {0: QMatrix.identity(1)}
    return Q, CdgaMorphism(A, Q, blocks, name="augmentation", check=check)


def dual_module(A, check=True):
    """A^# with the paper-standard signs (see modules.dual_module)."""
    return _dual_module_raw(A, check=check)


def poincare_duality_generator(A):
    """Top-degree index if A^# is free of rank one on (top)^dual, else None.

    Requires: finite dimensional, one-dimensional top degree, nondegenerate
    multiplication pairings into the top, and d(top^dual) = 0.
    """
    if not A.finite_dimensional:
        return None
    degs = A.degrees()
    top = max(degs)
    if A.dim(top) != 1:
        return None
    for k in degs:
        kk = top - k
        if A.dim(kk) != A.dim(k):
            return None
        m = QMatrix(A.dim(kk), A.dim(k))
        for i in range(A.dim(k)):
            for j in range(A.dim(kk)):
                c = A.mul_basis(k, i, kk, j).get(0)
                if c:
                    m.set_entry(j, i, c)
        if rank(m) != A.dim(k):
            return None
    # top dual must be a cocycle of A^#: no differential hits the top
    for i in range(A.dim(top - 1)):
        if A.diff_basis(top - 1, i):
            return None
    return top
