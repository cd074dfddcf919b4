"""Surface syntax: tokenizing, clause normalization, program validation."""

import pytest

from chcprecond.core import FALSE_PRED
from chcprecond.linarith import Var, equiv_conj, make_conj, make_constraint
from chcprecond.parser import ParseError, parse_program

from helpers import corpus_files, load


def k(coeffs, const, rel="<="):
    return make_constraint(coeffs, const, rel)


def test_fig1_file_round_trip():
    p = load("fig1.chc")
    assert [c.cid for c in p.clauses] == ["c1", "c2", "c3", "c4", "c5", "c6"]
    assert p.init_args == (Var("A"), Var("B"))
    assert p.clause_by_id("c6").head is None


def test_repeated_argument_becomes_equality():
    p = parse_program(":- initial(p/2).\nc1. p(A,A).\nc2. false :- p(A,B).\n")
    cl = p.clause_by_id("c1")
    a, b = cl.head.args
    assert a != b
    assert equiv_conj(cl.constr, make_conj([k({a: 1, b: -1}, 0, "=")]))


def test_constants_in_atom_positions():
    p = parse_program(":- initial(p/1).\nc1. p(A).\nc2. false :- p(0).\n")
    goal = p.clause_by_id("c2")
    (v,) = goal.body[0].args
    assert equiv_conj(goal.constr, make_conj([k({v: 1}, 0, "=")]))


def test_nonlinear_rejected():
    with pytest.raises(ParseError, match="nonlinear"):
        parse_program(":- initial(p/1).\nc1. p(A).\nc2. false :- A*A >= 0, p(A).\n")


def test_prolog_style_le_operator():
    p = parse_program(":- initial(p/1).\nc1. p(A) :- A =< 7.\nc2. false :- p(A).\n")
    cl = p.clause_by_id("c1")
    assert equiv_conj(cl.constr, make_conj([k({cl.head.args[0]: 1}, -7)]))


def test_missing_initial_declaration():
    with pytest.raises(ParseError, match="undeclared"):
        parse_program("c1. p(A).\nc2. false :- p(A).\n")


def test_initial_override_flag():
    p = parse_program(
        "c1. p(A).\nc2. false :- p(A).\n",
        initial="p/1",
    )
    assert p.is_initial(p.clause_by_id("c1").head.pred)


def test_initial_override_bad_spec():
    with pytest.raises(ParseError, match="bad initial spec"):
        parse_program("c1. p(A).\nc2. false :- p(A).\n", initial="p")


def test_duplicate_clause_ids_rejected():
    with pytest.raises(ParseError, match="duplicate"):
        parse_program(":- initial(p/1).\nc1. p(A).\nc1. false :- p(A).\n")


def test_initial_without_fact_rejected():
    with pytest.raises(ParseError, match="no constrained fact"):
        parse_program(
            ":- initial(p/1).\nc1. q(A).\nc2. p(A) :- q(A).\nc3. false :- p(A).\n"
        )


def test_unused_initial_rejected():
    with pytest.raises(ParseError, match="unused"):
        parse_program(":- initial(r/1).\nc1. p(A).\nc2. false :- p(A).\n", initial=None)


def test_original_init_recorded():
    p = parse_program(
        ":- initial(p/1).\nc1. p(A) :- A >= 3.\nc2. false :- p(A).\n"
    )
    (d,) = p.original_init
    assert equiv_conj(d, make_conj([k({Var("A"): -1}, 3)]))


def test_false_is_goal_not_predicate():
    p = load("fig1.chc")
    assert all(cl.head_pred() != FALSE_PRED or cl.head is None for cl in p.clauses)


def test_every_corpus_file_parses():
    for name in corpus_files():
        p = load(name)
        assert p.goal_clauses(), name
        assert p.initial_clauses(), name
