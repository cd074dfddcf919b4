"""Query-answer transformation.

Splits every predicate p into a query version p#q (call contexts) and an
answer version p#a (derived answers), propagating queries left to right
through clause bodies.  The transformed program drives the polyhedral
analysis in the cs module; constraints are copied verbatim, so invariants
map straight back to source clauses.
"""

from __future__ import annotations

from .core import FALSE_PRED, Atom, Clause, Pred, Program, check_initial_coverage
from .linarith import TRUE_CONJ

QUERY_TAG = "#q"
ANSWER_TAG = "#a"
GOAL_ID = "goal"


def query_pred(p: Pred) -> Pred:
    return Pred(p.name + QUERY_TAG, p.arity)


def answer_pred(p: Pred) -> Pred:
    return Pred(p.name + ANSWER_TAG, p.arity)


def qa_transform(p: Program) -> Program:
    """Left-to-right QA transform with goal clause false#q <- true."""
    if not check_initial_coverage(p):
        raise ValueError("coverage check failed")
    clauses = [Clause(GOAL_ID, Atom(query_pred(FALSE_PRED), ()), TRUE_CONJ, ())]
    for cl in p.clauses:
        hpred = cl.head_pred()
        hargs = cl.head.args if cl.head is not None else ()
        hquery = Atom(query_pred(hpred), hargs)
        answers = tuple(Atom(answer_pred(b.pred), b.args) for b in cl.body)
        clauses.append(
            Clause(f"{cl.cid}_a", Atom(answer_pred(hpred), hargs), cl.constr, (hquery,) + answers)
        )
        for i, b in enumerate(cl.body):
            clauses.append(
                Clause(
                    f"{cl.cid}_q{i + 1}",
                    Atom(query_pred(b.pred), b.args),
                    cl.constr,
                    (hquery,) + answers[:i],
                )
            )
    return Program(tuple(clauses), frozenset(), p.init_args)
