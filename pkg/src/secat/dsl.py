"""Line-oriented model definition language.

Grammar (one construct per line, # starts a comment):

    algebra <name> [truncated <N>]
    generator <name> degree <k>
    relation <monomial> = 0
    d <gen> = <polynomial>
    morphism <name> : <A> -> <B>
    <gen> |-> <polynomial>
    window <lo> <hi>
    depth <d>

Polynomials are Q-linear combinations of *-separated generator powers
(x^2*y, 3/2*x, -x*y).  Documents round-trip: parse -> print -> parse
yields an identical document.
"""

import re
from fractions import Fraction

from .cdga import (CdgaMorphism, DSquaredNonzero, FreeCdga, Generator,
                   SimpleConnectivityError, derivation_extend)


class ParseError(Exception):
    def __init__(self, lineno, message):
        super().__init__("line %d: %s" % (lineno, message))
        self.lineno = lineno
        self.message = message


_RAT = re.compile(r"^-?\d+(/\d+)?$")
_POW = re.compile(r"^([A-Za-z_][A-Za-z_0-9]*)(\^(\d+))?$")


class AlgebraDecl:
    def __init__(self, name, truncated=None):
        self.name = name
        self.truncated = truncated
        self.generators = []       # (name, degree) in declaration order
        self.relations = []        # dict name -> exponent
        self.d_words = {}          # gen name -> word dict of the built algebra
        self.algebra = None


class MorphismDecl:
    def __init__(self, name, source, target):
        self.name = name
        self.source = source
        self.target = target
        self.images = {}           # source gen name -> word dict in target
        self.morphism = None


class ModelDocument:
    def __init__(self):
        self.algebras = {}         # name -> AlgebraDecl, insertion ordered
        self.morphisms = {}        # name -> MorphismDecl
        self.window = None
        self.depth = None

    def algebra(self, name=None):
        if not self.algebras:
            raise ValueError("document declares no algebra")
        if name is None:
            name = next(iter(self.algebras))
        return self.algebras[name].algebra

    def morphism(self, name=None):
        if not self.morphisms:
            raise ValueError("document declares no morphism")
        if name is None:
            name = next(iter(self.morphisms))
        return self.morphisms[name].morphism


def _parse_poly(text, algebra, lineno):
    """Polynomial text -> Element of algebra; multiplication is taken in the
    written factor order, so Koszul signs come out of the algebra itself."""
    s = text.replace(" ", "")
    if not s:
        raise ParseError(lineno, "empty polynomial")
    if s == "0":
        from .cdga import Element
        return Element(algebra)
    terms = []
    # split on top-level + and -, keeping the sign with the term
    cur, sign = "", 1
    i = 0
    while i < len(s):
        c = s[i]
        if c in "+-" and cur and s[i - 1] not in "*/^+-":
            terms.append((sign, cur))
            sign = 1 if c == "+" else -1
            cur = ""
        elif c in "+-" and not cur:
            sign = sign * (1 if c == "+" else -1)
        else:
            cur += c
        i += 1
    if not cur:
        raise ParseError(lineno, "dangling sign in polynomial %r" % text)
    terms.append((sign, cur))

    from .cdga import Element
    total = Element(algebra)
    for sgn, term in terms:
        coeff = Fraction(sgn)
        factor = None
        for tok in term.split("*"):
            if _RAT.match(tok):
                coeff *= Fraction(tok)
                continue
            m = _POW.match(tok)
            if not m:
                raise ParseError(lineno, "bad factor %r" % tok)
            gname, exp = m.group(1), int(m.group(3) or 1)
            if gname not in algebra.gen_index:
                raise ParseError(lineno, "unknown generator %r" % gname)
            g = algebra.gen_element(gname)
            for _ in range(exp):
                factor = g if factor is None else factor * g
        if factor is None:
            # constant term: only the zero constant is homogeneous here
            if coeff:
                raise ParseError(lineno, "nonzero constant term %r" % term)
            continue
        total = total + factor.scaled(coeff)
    return total


def _parse_monomial(text, lineno):
    s = text.replace(" ", "")
    exps = {}
    for tok in s.split("*"):
        m = _POW.match(tok)
        if not m:
            raise ParseError(lineno, "bad monomial factor %r" % tok)
        exps[m.group(1)] = exps.get(m.group(1), 0) + int(m.group(3) or 1)
    return exps


def _finalize_algebra(decl, pending_d, lineno):
    if decl.algebra is not None:
        return
    gens = [Generator(n, k) for n, k in decl.generators]
    names = {n for n, _ in decl.generators}
    sorted_names = [g.name for g in sorted(gens, key=lambda g: (g.degree, g.name))]
    relations = set()
    for rel, rl in decl.relations:
        for n in rel:
            if n not in names:
                raise ParseError(rl, "unknown generator %r in relation" % n)
        relations.add(tuple(rel.get(n, 0) for n in sorted_names))
    try:
        A = FreeCdga(gens, relations=relations or None,
                     max_degree=decl.truncated, name=decl.name)
    except SimpleConnectivityError as exc:
        raise ParseError(lineno, str(exc))
    for gname, text, dl in pending_d:
        if gname not in A.gen_index:
            raise ParseError(dl, "d of unknown generator %r" % gname)
        A.set_differential(gname, _parse_poly(text, A, dl))
    try:
        derivation_extend(A, {})
    except DSquaredNonzero as exc:
        raise ParseError(lineno, str(exc))
    decl.algebra = A


def _finalize_morphism(doc, decl, pending_images, lineno):
    if decl.source not in doc.algebras:
        raise ParseError(lineno, "unknown source algebra %r" % decl.source)
    if decl.target not in doc.algebras:
        raise ParseError(lineno, "unknown target algebra %r" % decl.target)
    src = doc.algebras[decl.source].algebra
    tgt = doc.algebras[decl.target].algebra
    images = {}
    for gname, text, il in pending_images:
        if gname not in src.gen_index:
            raise ParseError(il, "image of unknown generator %r" % gname)
        images[gname] = _parse_poly(text, tgt, il)
    missing = [n for n in src.gen_index if n not in images]
    if missing:
        raise ParseError(lineno, "morphism %s misses images for %s"
                         % (decl.name, ", ".join(sorted(missing))))
    try:
        decl.morphism = CdgaMorphism.from_generator_images(
            src, tgt, images, name=decl.name)
        decl.morphism.validate()
    except ValueError as exc:
        raise ParseError(lineno, "morphism %s: %s" % (decl.name, exc))
    decl.images = {g: tgt._element_to_words(e) for g, e in images.items()}


def parse_model(text):
    doc = ModelDocument()
    cur_alg = None
    cur_mor = None
    pending_d = []
    pending_images = []
    last_line = 0

    def close_open(lineno):
        nonlocal cur_alg, cur_mor, pending_d, pending_images
        if cur_alg is not None:
            _finalize_algebra(cur_alg, pending_d, lineno)
            cur_alg, pending_d = None, []
        if cur_mor is not None:
            _finalize_morphism(doc, cur_mor, pending_images, lineno)
            cur_mor, pending_images = None, []

    for lineno, raw in enumerate(text.splitlines(), 1):
        last_line = lineno
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        words = line.split()
        head = words[0]
        if head == "algebra":
            close_open(lineno)
            if len(words) == 2:
                name, trunc = words[1], None
            elif len(words) == 4 and words[2] == "truncated":
                name, trunc = words[1], int(words[3])
            else:
                raise ParseError(lineno, "expected: algebra <name> [truncated <N>]")
            if name in doc.algebras:
                raise ParseError(lineno, "algebra %r redeclared" % name)
            cur_alg = AlgebraDecl(name, trunc)
            doc.algebras[name] = cur_alg
        elif head == "generator":
            if len(words) != 4 or words[2] != "degree":
                raise ParseError(lineno, "expected: generator <name> degree <k>")
            if cur_alg is None:
                # bare generator lines open an anonymous algebra
                cur_alg = AlgebraDecl("A")
                doc.algebras["A"] = cur_alg
            try:
                deg = int(words[3])
            except ValueError:
                raise ParseError(lineno, "degree must be an integer")
            if deg < 2:
                raise ParseError(
                    lineno, "generator %r has degree %d; simple connectivity "
                    "needs degree >= 2" % (words[1], deg))
            if any(n == words[1] for n, _ in cur_alg.generators):
                raise ParseError(lineno, "generator %r redeclared" % words[1])
            cur_alg.generators.append((words[1], deg))
        elif head == "relation":
            if cur_alg is None:
                raise ParseError(lineno, "relation outside an algebra block")
            body = line[len("relation"):].strip()
            if not body.endswith("= 0") and not body.endswith("=0"):
                raise ParseError(lineno, "expected: relation <monomial> = 0")
            mono = body.rsplit("=", 1)[0].strip()
            cur_alg.relations.append((_parse_monomial(mono, lineno), lineno))
        elif head == "d":
            if cur_alg is None:
                raise ParseError(lineno, "d-line outside an algebra block")
            body = line[1:].strip()
            if "=" not in body:
                raise ParseError(lineno, "expected: d <gen> = <polynomial>")
            gname, poly = body.split("=", 1)
            pending_d.append((gname.strip(), poly.strip(), lineno))
        elif head == "morphism":
            close_open(lineno)
            m = re.match(r"^morphism\s+(\w+)\s*:\s*(\w+)\s*->\s*(\w+)$", line)
            if not m:
                raise ParseError(lineno, "expected: morphism <name> : <A> -> <B>")
            if m.group(1) in doc.morphisms:
                raise ParseError(lineno, "morphism %r redeclared" % m.group(1))
            cur_mor = MorphismDecl(m.group(1), m.group(2), m.group(3))
            doc.morphisms[m.group(1)] = cur_mor
        elif head == "window":
            if len(words) != 3:
                raise ParseError(lineno, "expected: window <lo> <hi>")
            doc.window = (int(words[1]), int(words[2]))
        elif head == "depth":
            if len(words) != 2:
                raise ParseError(lineno, "expected: depth <d>")
            doc.depth = int(words[1])
        elif "|->" in line:
            if cur_mor is None:
                raise ParseError(lineno, "image line outside a morphism block")
            gname, poly = line.split("|->", 1)
            pending_images.append((gname.strip(), poly.strip(), lineno))
        else:
            raise ParseError(lineno, "unrecognized construct %r" % line)
    close_open(last_line + 1)
    return doc


def parse_file(path):
    with open(path, encoding="utf-8") as fh:
        return parse_model(fh.read())


def _word_str(A, word):
    parts = []
    for name, exp in zip([g.name for g in A.generators], word):
        if exp == 1:
            parts.append(name)
        elif exp > 1:
            parts.append("%s^%d" % (name, exp))
    return "*".join(parts) if parts else "1"


def _poly_str(A, words):
    if not words:
        return "0"
    out = ""
    for word in sorted(words):
        c = words[word]
        mono = _word_str(A, word)
        lead = "" if not out else (" + " if c > 0 else " - ")
        mag = abs(c)
        if not out and c < 0:
            lead = "-"
        body = mono if mag == 1 else "%s*%s" % (mag, mono)
        out += lead + body
    return out


def print_model(doc):
    """Canonical text form; a fixed point of parse -> print."""
    lines = []
    for decl in doc.algebras.values():
        A = decl.algebra
        head = "algebra %s" % decl.name
        if decl.truncated is not None:
            head += " truncated %d" % decl.truncated
        lines.append(head)
        for n, k in decl.generators:
            lines.append("generator %s degree %d" % (n, k))
        for rel, _ in decl.relations:
            sorted_names = [g.name for g in A.generators]
            word = tuple(rel.get(n, 0) for n in sorted_names)
            lines.append("relation %s = 0" % _word_str(A, word))
        for n, _ in decl.generators:
            if A.d_gens.get(n):
                lines.append("d %s = %s" % (n, _poly_str(A, A.d_gens[n])))
        lines.append("")
    for decl in doc.morphisms.values():
        lines.append("morphism %s : %s -> %s" % (decl.name, decl.source,
                                                 decl.target))
        src = doc.algebras[decl.source].algebra
        tgt = doc.algebras[decl.target].algebra
        for g in src.generators:
            lines.append("%s |-> %s" % (g.name, _poly_str(tgt, decl.images.get(g.name, {}))))
        lines.append("")
    if doc.window is not None:
        lines.append("window %d %d" % doc.window)
    if doc.depth is not None:
        lines.append("depth %d" % doc.depth)
    while lines and lines[-1] == "":
        lines.pop()
    return "\n".join(lines) + "\n"
