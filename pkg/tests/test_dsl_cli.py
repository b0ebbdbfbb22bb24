import json

import pytest

from secat.cli import main
from secat.corpus import CORPUS
from secat.dsl import ParseError, parse_model, print_model

S3 = """algebra S3
generator x degree 3
relation x*x = 0
"""

FREE_S2 = """algebra A truncated 12
generator x degree 2
generator y degree 3
d y = x^2
"""

WITH_MORPHISM = """algebra T
generator a degree 2
generator b degree 2
relation a*a = 0
relation b*b = 0
relation a*b = 0

algebra S2
generator x degree 2
relation x*x = 0

morphism mu : T -> S2
a |-> x
b |-> x
"""


# --- parsing ---

def test_parse_basic_algebra():
    doc = parse_model(FREE_S2)
    A = doc.algebra()
    assert A.dim(2) == 1 and A.dim(3) == 1
    x = A.gen_element("x")
    assert A.gen_element("y").d() == x * x


def test_parse_morphism_and_headers():
    doc = parse_model(WITH_MORPHISM + "window 0 10\ndepth 3\n")
    mu = doc.morphism("mu")
    mu.validate()
    assert doc.window == (0, 10) and doc.depth == 3


def test_parse_polynomial_coefficients_and_signs():
    doc = parse_model("""algebra B truncated 10
generator x degree 2
generator y degree 2
generator z degree 3
d z = 3/2*x^2 - x*y + y^2
""")
    A = doc.algebra()
    z = A.gen_element("z")
    x, y = A.gen_element("x"), A.gen_element("y")
    from fractions import Fraction
    assert z.d() == (x * x).scaled(Fraction(3, 2)) - x * y + y * y


def test_bare_generator_opens_anonymous_algebra():
    doc = parse_model("generator x degree 3\n")
    assert "A" in doc.algebras
    assert doc.algebra().dim(3) == 1


def test_comments_and_blank_lines_ignored():
    doc = parse_model("# a model\n\nalgebra S3  # odd sphere\ngenerator x degree 3\n")
    assert doc.algebra().dim(3) == 1


@pytest.mark.parametrize("text,lineno,fragment", [
    ("algebra A\ngenerator x degree 1\n", 2, "degree"),
    ("algebra A\ngenerator x degree 2\nd x = w\n", 3, "unknown generator"),
    ("algebra A\ngenerator x degree 2\nrelation x* = 0\n", 3, "bad monomial"),
    ("frobnicate\n", 1, "unrecognized"),
    ("algebra A\ngenerator x degree 2\nd x = 1\n", 3, "constant"),
    ("algebra A\ngenerator x degree 2\nd x = x +\n", 3, "dangling sign"),
    ("relation x^2 = 0\n", 1, "outside an algebra"),
    ("algebra A\ngenerator x degree 2\nalgebra A\n", 3, "redeclared"),
])
def test_parse_errors_carry_line_numbers(text, lineno, fragment):
    with pytest.raises(ParseError) as exc:
        parse_model(text)
    assert exc.value.lineno == lineno
    assert fragment in exc.value.message


def test_morphism_missing_image_is_an_error():
    bad = WITH_MORPHISM.replace("b |-> x\n", "")
    with pytest.raises(ParseError) as exc:
        parse_model(bad)
    assert "misses images" in exc.value.message


def test_morphism_chain_map_violation_is_an_error():
    bad = """algebra A truncated 12
generator x degree 2
generator y degree 3
d y = x^2

algebra CP3
generator x degree 2
relation x^4 = 0

morphism f : A -> CP3
x |-> x
y |-> 0
"""
    # f(dy) = x^2 != 0 = d(f(y)) in CP3, so f is not a chain map
    with pytest.raises(ParseError):
        parse_model(bad)


# --- round trips ---

def test_print_is_a_fixed_point_on_the_corpus():
    for name, text in CORPUS.items():
        once = print_model(parse_model(text))
        twice = print_model(parse_model(once))
        assert once == twice, name


def test_round_trip_preserves_the_model():
    doc = parse_model(WITH_MORPHISM)
    doc2 = parse_model(print_model(doc))
    assert list(doc2.algebras) == list(doc.algebras)
    A, A2 = doc.algebra("T"), doc2.algebra("T")
    assert {k: A.dim(k) for k in A.degrees()} == \
        {k: A2.dim(k) for k in A2.degrees()}
    doc2.morphism("mu").validate()


# --- CLI ---

def write(tmp_path, name, text):
    p = tmp_path / name
    p.write_text(text)
    return str(p)


def test_cli_mcat_text_output(tmp_path, capsys):
    f = write(tmp_path, "s3.cdga", S3)
    assert main(["mcat", f]) == 0
    out = capsys.readouterr().out
    assert "invariant = mcat\n" in out
    assert "value = 1\n" in out
    assert "status = exact\n" in out


def test_cli_mtc_json_with_witness(tmp_path, capsys):
    f = write(tmp_path, "s2.cdga", CORPUS["s2"])
    assert main(["mtc", f, "--n", "2", "--format", "json", "--witness"]) == 0
    rep = json.loads(capsys.readouterr().out)
    assert rep["invariant"] == "mtc_2" and rep["value"] == 2
    assert rep["witness"]["power"] == 2


def test_cli_msecat_user_morphism(tmp_path, capsys):
    f = write(tmp_path, "mu.cdga", WITH_MORPHISM)
    assert main(["msecat", f, "--model", "mu"]) == 0
    out = capsys.readouterr().out
    assert "invariant = msecat\n" in out
    assert "value = " in out


def test_cli_undetermined_exits_2(tmp_path, capsys):
    f = write(tmp_path, "cp3.cdga", CORPUS["cp3"])
    assert main(["mcat", f, "--max-m", "1"]) == 2
    out = capsys.readouterr().out
    assert "lower = 2\n" in out and "upper = inf\n" in out


def test_cli_error_exits_1(tmp_path, capsys):
    assert main(["mcat", str(tmp_path / "missing.cdga")]) == 1
    f = write(tmp_path, "bad.cdga", "generator x degree 1\n")
    assert main(["mcat", f]) == 1
    err = capsys.readouterr().err
    assert "parse error: line 1" in err


def test_cli_additivity(tmp_path, capsys):
    f = write(tmp_path, "s3.cdga", S3)
    g = write(tmp_path, "cp2.cdga", CORPUS["cp2"])
    assert main(["additivity", f, g, "--invariant", "mcat"]) == 0
    out = capsys.readouterr().out
    assert "lhs = 3\n" in out and "rhs = 3\n" in out and "equal = true\n" in out


def test_cli_reports_are_deterministic(tmp_path, capsys):
    f = write(tmp_path, "s2f.cdga", CORPUS["s2_free"])
    runs = []
    for _ in range(2):
        assert main(["mcat", f, "--format", "json", "--witness"]) == 0
        runs.append(capsys.readouterr().out)
    assert runs[0] == runs[1]
    texts = []
    for _ in range(2):
        main(["mcat", f, "--witness"])
        texts.append(capsys.readouterr().out)
    assert texts[0] == texts[1]


def test_cli_window_override(tmp_path, capsys):
    f = write(tmp_path, "s2f.cdga", CORPUS["s2_free"])
    assert main(["mcat", f, "--window", "-16", "8"]) in (0, 2)
    out = capsys.readouterr().out
    assert "status = window-certified" in out
