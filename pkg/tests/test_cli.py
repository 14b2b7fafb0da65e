import os

import pytest

from fvkit import cli
from fvkit.fv import parse_fv
from fvkit.library import GRAPH_SIGNATURE

from conftest import SAMPLES


def sample(name):
    return os.path.join(SAMPLES, name)


def run(capsys, *argv):
    code = cli.main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


SIG = sample("graph.sig.sexp")


def test_translate_writes_file(tmp_path, capsys):
    out = tmp_path / "out.sexp"
    code, _, _ = run(capsys, "translate", SIG, sample("formula.sexp"), "-o", str(out))
    assert code == 0
    assert out.read_text().startswith("(fv ")
    parse_fv(out.read_text(), GRAPH_SIGNATURE)


def test_translate_check(capsys):
    code, out, _ = run(capsys, "translate", SIG, sample("neighbours.sexp"), "--check",
                       "--max-factors", "3", "--max-size", "3")
    assert code == 0 and out.startswith("(fv ")


def test_translate_check_with_given_factors(capsys):
    code, _, _ = run(capsys, "translate", SIG, sample("formula.sexp"), "--check",
                     "--factor", sample("g2.sexp"), "--factor", sample("g3.sexp"))
    assert code == 0


def test_translate_check_failure_exits_2(capsys, monkeypatch):
    from fvkit.fv import FVNormalForm
    from fvkit.logic import BConst, Eq

    real = cli.translate

    def broken(f):
        nf = real(f)
        return FVNormalForm(nf.cells, Eq(BConst(0), BConst(1)))

    monkeypatch.setattr(cli, "translate", broken)
    code, _, err = run(capsys, "translate", SIG, sample("formula.sexp"), "--check")
    assert code == 2
    assert "check failed" in err and "assignment:" in err


def test_malformed_formula_exits_1_with_position(capsys):
    code, out, err = run(capsys, "translate", SIG, sample("bad.sexp"))
    assert code == 1 and out == ""
    assert "at 1:" in err


def test_missing_file_exits_1(capsys):
    code, _, err = run(capsys, "translate", SIG, sample("nope.sexp"))
    assert code == 1 and err.startswith("error:")


def test_decide_examples(capsys):
    assert run(capsys, "decide", "ABA:inf", sample("at3_1.sexp"))[:2] == (0, "FALSE\n")
    assert run(capsys, "decide", "ABA", sample("at3_1.sexp"))[:2] == (
        0, "INDEPENDENT (true: ABA:3; false: ABA:4, ABA:inf)\n")
    assert run(capsys, "decide", "ABAI:inf", sample("split.sexp"), "--witness")[:2] == (
        0, 'TRUE (ep "" "10")\n')


def test_decide_check_against_powerset(capsys):
    assert run(capsys, "decide", "ABA:3", sample("at3_1.sexp"), "--check")[:2] == (0, "TRUE\n")


def test_decide_open_sentence_exits_1(tmp_path, capsys):
    f = tmp_path / "open.sexp"
    f.write_text("(formula (free (v B)) (AT 1 v))")
    code, _, err = run(capsys, "decide", "ABA:inf", str(f))
    assert code == 1 and "free variable v" in err
    code, out, _ = run(capsys, "decide", "ABA:2", str(f), "--const", "v=0b01")
    assert (code, out) == (0, "TRUE\n")


def test_decide_ideal_outside_abai_exits_1(capsys):
    code, _, _ = run(capsys, "decide", "ABA", sample("split.sexp"))
    assert code == 1


def test_decide_disagreement_exits_3(capsys, monkeypatch):
    from fvkit.ba import ABAICheck, Decision, Verdict

    monkeypatch.setattr(cli, "check_abai",
                        lambda f, p, budget: ABAICheck(Decision(Verdict.TRUE), None))
    code, _, err = run(capsys, "decide", "ABAI:inf", sample("split.sexp"), "--witness")
    assert code == 3 and "flagged" in err


def test_eval_product(capsys):
    code, out, _ = run(capsys, "eval", SIG, sample("product.sexp"), sample("formula.sexp"))
    assert code == 0
    assert out.splitlines()[0] == "satisfying assignments: 2"
    assert out.splitlines()[1:] == ["x=(a0 b0)", "x=(a1 b0)"]


def test_eval_powerset(capsys):
    assert run(capsys, "eval", sample("at3_1.sexp"), "--powerset", "3")[:2] == (0, "TRUE\n")
    assert run(capsys, "eval", sample("at3_1.sexp"), "--powerset", "4")[:2] == (0, "FALSE\n")
    assert run(capsys, "eval", sample("at3_1.sexp"), "--powerset", "7")[0] == 1


def test_code(tmp_path, capsys):
    code, out, _ = run(capsys, "code", SIG, sample("product.sexp"), sample("formula.sexp"),
                       "--check")
    assert code == 0
    assert out == ("(code (gamma (0 (block a0 a1)) (1 (block b0) (block b1 b2))) "
                   "(quotient (point 0 0)))\n")


def test_usage_errors_exit_2_from_argparse(capsys):
    with pytest.raises(SystemExit) as e:
        cli.main(["translate"])
    assert e.value.code == 2
    with pytest.raises(SystemExit):
        cli.main(["selftest", "--max-size", "0"])


def test_translate_is_deterministic(capsys):
    a = run(capsys, "translate", SIG, sample("neighbours.sexp"))
    b = run(capsys, "translate", SIG, sample("neighbours.sexp"))
    assert a == b
