"""Exact linear algebra over Q for integer-graded spaces and cochain complexes.

Vectors are sparse columns (dict coordinate -> Fraction).  Elimination is
fraction-free with a fixed pivoting rule (leftmost nonzero column, first
nonzero row), so every basis this module produces is deterministic.
"""

from fractions import Fraction
from math import gcd


class WindowViolation(Exception):
    pass


class NotAChainMap(Exception):
    pass


def _vec_clean(v):
    return {i: c for i, c in v.items() if c}


def vec_add(u, v, scale=Fraction(1)):
    out = dict(u)
    for i, c in v.items():
        s = out.get(i, Fraction(0)) + scale * c
        if s:
            out[i] = s
        else:
            out.pop(i, None)
    return out


def vec_scale(v, c):
    if not c:
        return {}
    return {i: c * x for i, x in v.items()}


class QMatrix:
    """Sparse exact-rational matrix, stored as coordinate lists per column."""

    def __init__(self, nrows, ncols, cols=None):
        self.nrows = nrows
        self.ncols = ncols
        self.cols = [dict() for _ in range(ncols)]
        if cols is not None:
            for j, col in enumerate(cols):
                self.cols[j] = _vec_clean({i: Fraction(c) for i, c in col.items()})

    @classmethod
    def from_rows(cls, nrows, ncols, rows):
        m = cls(nrows, ncols)
        for i, row in enumerate(rows):
            for j, c in enumerate(row):
                if c:
                    m.cols[j][i] = Fraction(c)
        return m

    @classmethod
    def identity(cls, n):
        return cls(n, n, [{i: Fraction(1)} for i in range(n)])

    @classmethod
    def zero(cls, nrows, ncols):
        return cls(nrows, ncols)

    def entry(self, i, j):
        return self.cols[j].get(i, Fraction(0))

    def set_entry(self, i, j, c):
        c = Fraction(c)
        if c:
            self.cols[j][i] = c
        else:
            self.cols[j].pop(i, None)

    def col(self, j):
        return dict(self.cols[j])

    def is_zero(self):
        return all(not c for c in self.cols)

    def matvec(self, v):
        out = {}
        for j, c in v.items():
            if c:
                out = vec_add(out, self.cols[j], c)
        return out

    def __matmul__(self, other):
        assert self.ncols == other.nrows
        return QMatrix(self.nrows, other.ncols,
                       [self.matvec(other.cols[j]) for j in range(other.ncols)])

    def __add__(self, other):
        assert (self.nrows, self.ncols) == (other.nrows, other.ncols)
        return QMatrix(self.nrows, self.ncols,
                       [vec_add(self.cols[j], other.cols[j]) for j in range(self.ncols)])

    def __sub__(self, other):
        return self + other.scaled(Fraction(-1))

    def scaled(self, c):
        return QMatrix(self.nrows, self.ncols, [vec_scale(col, c) for col in self.cols])

    def __eq__(self, other):
        if not isinstance(other, QMatrix):
            return NotImplemented
        return (self.nrows, self.ncols) == (other.nrows, other.ncols) and \
            all(self.cols[j] == other.cols[j] for j in range(self.ncols))

    def rows(self):
        out = [dict() for _ in range(self.nrows)]
        for j, col in enumerate(self.cols):
            for i, c in col.items():
                out[i][j] = c
        return out

    def __repr__(self):
        return "QMatrix(%d x %d)" % (self.nrows, self.ncols)


def _strip_content(ints):
    g = 0
    for x in ints.values():
        g = gcd(g, x)
    if g > 1:
        return {j: x // g for j, x in ints.items()}
    return ints


def _row_ints(row):
    # clear denominators and divide by content; integer arithmetic keeps
    # the elimination free of per-entry gcd normalization
    denlcm = 1
    for c in row.values():
        denlcm = denlcm * c.denominator // gcd(denlcm, c.denominator)
    ints = {}
    for j, c in row.items():
        v = int(c * denlcm)
        if v:
            ints[j] = v
    return _strip_content(ints)


def _rref_rows(rows, ncols):
    """Fraction-free forward elimination then back substitution.

    Returns (pivot_cols, rref_rows) with pivots normalized to 1; the
    reduced form is canonical, independent of the input row order.
    """
    pivrows = {}  # pivot column -> integer row with min at that column
    for r in rows:
        row = _row_ints(r)
        while row:
            pc = min(row)
            piv = pivrows.get(pc)
            if piv is None:
                pivrows[pc] = row
                break
            c, pv = row[pc], piv[pc]
            new = {}
            for j, x in row.items():
                v = x * pv - piv.get(j, 0) * c
                if v:
                    new[j] = v
            for j, y in piv.items():
                if j not in row:
                    new[j] = -y * c
            row = _strip_content(new)
    pivots = sorted(pivrows)
    done = [{j: Fraction(x) for j, x in pivrows[pc].items()} for pc in pivots]
    # back substitution into reduced echelon form
    for i in range(len(done) - 1, -1, -1):
        pc = pivots[i]
        done[i] = vec_scale(done[i], Fraction(1, 1) / done[i][pc])
        for k in range(i):
            c = done[k].get(pc)
            if c:
                done[k] = vec_add(done[k], done[i], -c)
    return pivots, done


def echelon(matrix):
    """Row-reduce a QMatrix.

    Returns (rank, kernel_basis, image_basis): kernel vectors are sparse
    columns of length ncols, image basis is the list of original pivot
    columns.  rank + len(kernel_basis) == ncols.
    """
    pivots, rref = _rref_rows(matrix.rows(), matrix.ncols)
    rank = len(pivots)
    pivset = dict(zip(pivots, range(rank)))
    kernel = []
    for j in range(matrix.ncols):
        if j in pivset:
            continue
        v = {j: Fraction(1)}
        for pc, row in zip(pivots, rref):
            c = row.get(j)
            if c:
                v[pc] = -c
        kernel.append(_vec_clean(v))
    image = [matrix.col(j) for j in pivots]
    return rank, kernel, image


def rank(matrix):
    return echelon(matrix)[0]


def solve(matrix, b):
    """One solution of matrix @ x = b, or None.  Free variables are set to 0."""
    rows = matrix.rows()
    bcol = matrix.ncols
    for i, c in b.items():
        if c:
            rows[i][bcol] = c
    pivots, rref = _rref_rows(rows, bcol + 1)
    if bcol in pivots:
        return None
    x = {}
    for pc, row in zip(pivots, rref):
        c = row.get(bcol)
        if c:
            x[pc] = c
    return x


def span_rref(vectors):
    """Canonical (RREF-row) basis of the span of sparse vectors."""
    _, rref = _rref_rows(vectors, 0)
    return rref


def reduce_mod_span(v, rref_basis):
    """Remainder of v after reduction by an RREF basis (zero iff v in span)."""
    v = _vec_clean(dict(v))
    for row in rref_basis:
        pc = min(row)
        c = v.get(pc)
        if c:
            v = vec_add(v, row, -c)
    return v


def in_span(v, rref_basis):
    return not reduce_mod_span(v, rref_basis)


class QuotientSpace:
    """V / span(subspace) with explicit projection and representative section.

    Coordinates of the quotient are the non-pivot coordinates of the RREF
    basis of the subspace; the section sends them back to unit vectors.
    """

    def __init__(self, dim, subspace_vectors):
        self.dim = dim
        self.basis = span_rref(subspace_vectors)
        piv = {min(r) for r in self.basis}
        self.coords = [i for i in range(dim) if i not in piv]
        self._index = {c: k for k, c in enumerate(self.coords)}
        self.qdim = len(self.coords)

    def project(self, v):
        red = reduce_mod_span(v, self.basis)
        return {self._index[i]: c for i, c in red.items()}

    def lift(self, qv):
        return {self.coords[k]: c for k, c in qv.items()}

    def projection_matrix(self):
        # unit vectors reduce in one step against an RREF basis: a pivot
        # column maps to minus the rest of its row, a non-pivot to itself
        m = QMatrix(self.qdim, self.dim)
        for j, k in self._index.items():
            m.cols[j] = {k: Fraction(1)}
        for r in self.basis:
            pc = min(r)
            m.cols[pc] = {self._index[i]: -c for i, c in r.items() if i != pc}
        return m


class GradedSpace:
    """Ordered basis labels per integer degree; absent degrees are zero."""

    def __init__(self, support):
        self.support = {}
        for k, labels in support.items():
            labels = list(labels)
            if len(set(labels)) != len(labels):
                raise ValueError("duplicate basis labels in degree %d" % k)
            if labels:
                self.support[k] = labels

    def basis(self, k):
        return self.support.get(k, [])

    def dim(self, k):
        return len(self.support.get(k, ()))

    def degrees(self):
        return sorted(self.support)

    def index(self, k, label):
        return self.support[k].index(label)


class DegreeWindow:
    def __init__(self, min_degree, max_degree):
        if min_degree > max_degree:
            raise ValueError("empty degree window")
        self.min_degree = min_degree
        self.max_degree = max_degree

    def __contains__(self, k):
        return self.min_degree <= k <= self.max_degree

    def check(self, k, what="degree"):
        if k not in self:
            raise WindowViolation("%s %d outside window [%d, %d]"
                                  % (what, k, self.min_degree, self.max_degree))

    def __repr__(self):
        return "DegreeWindow(%d, %d)" % (self.min_degree, self.max_degree)


class GradedMap:
    """Degree-homogeneous linear map between graded spaces, one block per degree."""

    def __init__(self, source, target, degree_shift, blocks=None):
        self.source = source
        self.target = target
        self.degree_shift = degree_shift
        self.blocks = {}
        if blocks:
            for k, m in blocks.items():
                self.set_block(k, m)

    def set_block(self, k, m):
        assert m.ncols == self.source.dim(k)
        assert m.nrows == self.target.dim(k + self.degree_shift)
        if not m.is_zero():
            self.blocks[k] = m

    def block(self, k):
        b = self.blocks.get(k)
        if b is None:
            return QMatrix.zero(self.target.dim(k + self.degree_shift), self.source.dim(k))
        return b

    def apply(self, k, v):
        return self.block(k).matvec(v)

    def compose(self, other):
        """self after other."""
        assert other.target is self.source or other.target.support == self.source.support
        shift = self.degree_shift + other.degree_shift
        out = GradedMap(other.source, self.target, shift)
        for k in other.source.degrees():
            m = self.block(k + other.degree_shift) @ other.block(k)
            if not m.is_zero():
                out.blocks[k] = m
        return out


class ChainComplex:
    """Graded space with a degree +1 differential; degrees limited to a window."""

    def __init__(self, space, differential, window, check=True):
        assert differential.degree_shift == 1
        self.space = space
        self.d = differential
        self.window = window
        self._homology = {}
        if check:
            self.check_d_squared()

    def check_d_squared(self):
        for k in self.space.degrees():
            if k in self.window and (k + 2) <= self.window.max_degree:
                m = self.d.block(k + 1) @ self.d.block(k)
                if not m.is_zero():
                    raise ValueError("d^2 != 0 at degree %d" % k)

    def homology_at(self, k):
        """Representative cocycles for H^k.  Degrees k-1 and k+1 must be in window.

        Memoized: the complex is immutable once constructed."""
        if k in self._homology:
            return self._homology[k]
        self.window.check(k)
        self.window.check(k - 1, "degree")
        self.window.check(k + 1, "degree")
        _, cocycles, _ = echelon(self.d.block(k))
        _, _, boundaries = echelon(self.d.block(k - 1))
        bnd = span_rref(boundaries)
        reps = []
        # incremental elimination: seen maps pivot column -> unit-pivot row
        seen = {min(r): r for r in bnd}
        for z in cocycles:
            r = dict(z)
            while r:
                pc = min(r)
                piv = seen.get(pc)
                if piv is None:
                    break
                r = vec_add(r, piv, -r[pc])
            if r:
                reps.append(z)
                seen[pc] = vec_scale(r, Fraction(1, 1) / r[pc])
        h = HomologyBasis(k, reps, bnd)
        self._homology[k] = h
        return h


class HomologyBasis:
    def __init__(self, degree, reps, boundary_rref):
        self.degree = degree
        self.reps = reps
        self.boundary_rref = boundary_rref

    @property
    def dim(self):
        return len(self.reps)

    def coords(self, z):
        """Coordinates of the class [z] in the representative basis.

        Raises ValueError if z is not a cocycle class in the span (never
        happens for genuine cocycles of the same complex).
        """
        cols = [dict(b) for b in self.boundary_rref] + [dict(r) for r in self.reps]
        nb = len(self.boundary_rref)
        rows = max([max(c) + 1 for c in cols if c] + [max(z) + 1 if z else 0], default=0)
        m = QMatrix(rows, len(cols), cols)
        x = solve(m, z)
        if x is None:
            raise ValueError("vector is not a cocycle of this degree")
        return {j - nb: c for j, c in x.items() if j >= nb}


def check_chain_map(F, dC, dD, degrees):
    for k in degrees:
        lhs = dD.block(k + F.degree_shift) @ F.block(k)
        rhs = F.block(k + 1) @ dC.block(k)
        if F.degree_shift % 2:
            rhs = rhs.scaled(Fraction(-1))
        if lhs != rhs:
            raise NotAChainMap("fails to commute with d at degree %d" % k)


def induced_on_homology(F, C, D, k):
    """Matrix of H^k(F) in the representative bases of C and D at degree k."""
    check_chain_map(F, C.d, D.d, [k - 1, k])
    hc = C.homology_at(k)
    hd = D.homology_at(k + F.degree_shift)
    m = QMatrix(hd.dim, hc.dim)
    for j, r in enumerate(hc.reps):
        m.cols[j] = hd.coords(F.apply(k, r))
    return m


def injective_on_homology(F, C, D, degrees):
    """Per-degree full-column-rank verdicts for H(F), plus the conjunction."""
    verdicts = {}
    for k in degrees:
        m = induced_on_homology(F, C, D, k)
        verdicts[k] = (rank(m) == m.ncols)
    return verdicts, all(verdicts.values())
