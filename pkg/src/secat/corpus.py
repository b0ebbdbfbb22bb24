"""Built-in model corpus with hand-checkable invariant values.

Spheres come in two presentations: the cohomology basis model (relation
presentation, zero differential) and, for even spheres, the free model
L(x_n, y_{2n-1}) with dy = x^2.  The free models are truncated at 6n,
which keeps the truncation quotient free of spurious homology: a class
x^k*y survives truncation only in degrees kn + 2n - 1 with N < (k+2)n,
impossible for N = 6n.
"""

from .dsl import parse_model

_SPHERE_BASIS = """algebra S%(n)d
generator x degree %(n)d
relation x*x = 0
"""

_SPHERE_FREE_EVEN = """algebra S%(n)dfree truncated %(cap)d
generator x degree %(n)d
generator y degree %(m)d
d y = x^2
"""

_SPHERE_FREE_ODD = """algebra S%(n)dfree
generator x degree %(n)d
"""

_CP = """algebra CP%(n)d
generator x degree 2
relation x^%(p)d = 0
"""

CORPUS = {}

for n in range(2, 8):
    CORPUS["s%d" % n] = _SPHERE_BASIS % {"n": n}
    if n % 2 == 0:
        CORPUS["s%d_free" % n] = _SPHERE_FREE_EVEN % {
            "n": n, "m": 2 * n - 1, "cap": 6 * n}
    else:
        CORPUS["s%d_free" % n] = _SPHERE_FREE_ODD % {"n": n}

for n in range(1, 4):
    CORPUS["cp%d" % n] = _CP % {"n": n, "p": n + 1}

# product models as single algebras (two and three sphere factors)
CORPUS["s3xs3"] = """algebra S3xS3
generator x degree 3
generator y degree 3
"""

CORPUS["s2xs3"] = """algebra S2xS3
generator x degree 2
generator y degree 3
relation x*x = 0
"""

CORPUS["s2xcp2"] = """algebra S2xCP2
generator x degree 2
generator y degree 2
relation x*x = 0
relation y^3 = 0
"""

CORPUS["s3xs3xs3"] = """algebra S3xS3xS3
generator x degree 3
generator y degree 3
generator z degree 3
"""

# the non-formal exercise model: same algebra as s2_free, kept under its
# own name so the corpus explicitly covers a nonzero differential
CORPUS["nonformal"] = """algebra NF truncated 12
generator x degree 2
generator y degree 3
d y = x^2
"""

# mcat values: cup length of the (finite or truncated) model
MCAT_EXPECTED = {
    "s2": 1, "s3": 1, "s4": 1, "s5": 1, "s6": 1, "s7": 1,
    "s2_free": 1, "s3_free": 1, "s4_free": 1, "s5_free": 1,
    "s6_free": 1, "s7_free": 1,
    "cp1": 1, "cp2": 2, "cp3": 3,
    "s3xs3": 2, "s2xs3": 2, "s2xcp2": 3, "s3xs3xs3": 3,
    "nonformal": 1,
}

# mtc values on basis presentations (kernel nilpotency oracles)
MTC_EXPECTED = {
    ("s2", 2): 2, ("s3", 2): 1, ("s2", 3): 3, ("s3", 3): 2,
    ("cp1", 2): 2, ("cp2", 2): 4, ("cp3", 2): 6,
}

# additivity cases: (left entry, right entry, invariant, expected sum)
ADDITIVITY_CASES = [
    ("s3", "s3", "mcat", 2),
    ("s2", "cp2", "mcat", 3),
    ("s2", "s3", "mtc:2", 3),
    ("s3", "s3", "mtc:2", 2),
]


def corpus_document(name):
    if name not in CORPUS:
        raise KeyError("no corpus entry %r" % name)
    return parse_model(CORPUS[name])


def corpus_algebra(name):
    return corpus_document(name).algebra()
