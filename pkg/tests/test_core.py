"""Program model: dependency structure, coverage, recursion detection."""

import pytest

from chcprecond.core import (
    FALSE_PRED,
    Atom,
    Pred,
    check_initial_coverage,
    dependency_graph,
    recursive_preds,
)
from chcprecond.linarith import Var
from chcprecond.parser import parse_program

from helpers import load


def test_atom_rejects_repeated_args():
    with pytest.raises(ValueError, match="repeated"):
        Atom(Pred("p", 2), (Var("A"), Var("A")))


def test_single_fact_graph():
    p = parse_program(":- initial(p/1).\nc1. p(A).\nc2. false :- p(A).\n")
    g = dependency_graph(p)
    assert g.has_edge(Pred("p", 1), FALSE_PRED)
    assert not recursive_preds(p)


def test_fig1_dependency_graph():
    p = load("fig1.chc")
    g = dependency_graph(p)
    init, if_, while_ = Pred("init", 2), Pred("if", 2), Pred("while", 2)
    assert g.has_edge(init, if_)
    assert g.has_edge(if_, while_)
    assert g.has_edge(while_, while_)
    assert g.has_edge(while_, FALSE_PRED)
    assert recursive_preds(p) == frozenset({while_})


def test_mutual_recursion_detected():
    p = parse_program(
        ":- initial(i/1).\n"
        "c1. i(A).\n"
        "c2. p(A) :- i(A).\n"
        "c3. p(A) :- q(A).\n"
        "c4. q(A) :- p(A).\n"
        "c5. false :- q(A).\n"
    )
    assert recursive_preds(p) == frozenset({Pred("p", 1), Pred("q", 1)})


def test_coverage_holds_on_corpus():
    for name in ("fig1.chc", "cs_example.chc", "example_t4.chc"):
        assert check_initial_coverage(load(name))


def test_coverage_fails_when_goal_avoids_init():
    p = parse_program(
        ":- initial(init/1).\nc1. init(A).\nc2. false :- B >= 1.\n",
    )
    assert not check_initial_coverage(p)


def test_coverage_fails_via_non_initial_fact():
    p = parse_program(
        ":- initial(init/1).\n"
        "c1. init(A).\n"
        "c2. q(B) :- B >= 1.\n"
        "c3. false :- q(B).\n"
        "c4. false :- init(A).\n"
    )
    assert not check_initial_coverage(p)


def test_initial_clauses_and_versions():
    p = load("two_inits.chc")
    assert len(p.initial_clauses()) == 2
    assert all(cl.is_fact() for cl in p.initial_clauses())
