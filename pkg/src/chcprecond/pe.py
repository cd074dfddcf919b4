"""Partial evaluation with property-based abstraction.

The run keeps a set S of constrained facts, seeded with false <- true.
Each element is unfolded against the program; every remaining body atom
contributes a new constrained fact, abstracted to the conjunction of the
properties it entails.  Versions are identified by the satisfied-property
subset, except for the initial predicate, whose versions are kept apart by
their projected call constraint so distinct call contexts stay distinct.
The emitted program renames every predicate occurrence to its version.

Unfolding selects body atoms that are never initial and never recursive,
and either have a single defining clause or cannot reach the initial
predicate at all.  The single-clause test counts clauses statically;
counting only context-satisfiable clauses sounds more precise but makes
the unfolding depend on the call context in ways that reorder versions.
"""

from __future__ import annotations

import itertools
import logging
from dataclasses import dataclass
from typing import Optional

import networkx as nx

from .core import (
    FALSE_PRED,
    Atom,
    Clause,
    Pred,
    Program,
    check_initial_coverage,
    dependency_graph,
    format_clause,
    recursive_preds,
    rename_atom,
)
from .linarith import (
    ConstraintConj,
    TRUE_CONJ,
    Var,
    conj_and,
    conj_vars,
    entails,
    format_conj,
    project,
    rename_conj,
    satisfiable,
    simplify,
)

logger = logging.getLogger(__name__)

VERSION_CAP = 1024


def canonical_args(p: Program) -> dict[Pred, tuple[Var, ...]]:
    """A fixed argument tuple per predicate, from its first occurrence."""
    canon: dict[Pred, tuple[Var, ...]] = {}
    for cl in p.clauses:
        if cl.head is not None and cl.head.pred not in canon:
            canon[cl.head.pred] = cl.head.args
        for a in cl.body:
            if a.pred not in canon:
                canon[a.pred] = a.args
    return canon


def gen_properties(p: Program) -> dict[Pred, tuple[ConstraintConj, ...]]:
    """Projections of each clause constraint onto atom tuples and single args."""
    canon = canonical_args(p)
    props: dict[Pred, list[ConstraintConj]] = {}

    def add(pred: Pred, c: ConstraintConj) -> None:
        if c.is_true():
            return
        bucket = props.setdefault(pred, [])
        if c not in bucket:
            bucket.append(c)

    for cl in p.clauses:
        targets = list(cl.body)
        if cl.head is not None:
            targets.append(cl.head)
        for atom in targets:
            renaming = dict(zip(atom.args, canon[atom.pred]))
            add(atom.pred, rename_conj(project(cl.constr, set(atom.args)), renaming))
            for j, v in enumerate(atom.args):
                single = project(cl.constr, {v})
                add(atom.pred, rename_conj(single, {v: canon[atom.pred][j]}))
    return {pred: tuple(cs) for pred, cs in props.items()}


def rep_psi(
    props: dict[Pred, tuple[ConstraintConj, ...]], pred: Pred, constr: ConstraintConj
) -> tuple[ConstraintConj, frozenset[int]]:
    """Abstract constr to the conjunction of the entailed properties."""
    acc = TRUE_CONJ
    sat = []
    for i, psi in enumerate(props.get(pred, ())):
        if entails(constr, psi):
            acc = conj_and(acc, psi)
            sat.append(i)
    return acc, frozenset(sat)


@dataclass(frozen=True)
class _Element:
    """One member of S: a predicate version with its stored constraint."""

    pred: Pred
    name: str
    theta: ConstraintConj
    step: int


@dataclass(frozen=True)
class PeResult:
    program: Program
    table: tuple[tuple[int, tuple[str, ...], tuple[str, ...]], ...]

    def dump(self) -> str:
        lines = []
        for step, added_s, added_r in self.table:
            lines.append(f"step {step}:")
            for s in added_s:
                lines.append(f"  S + {s}")
            for r in added_r:
                lines.append(f"  R + {r}")
        return "\n".join(lines)


def _init_reachable(p: Program) -> set[Pred]:
    graph = dependency_graph(p)
    reach: set[Pred] = set()
    for ip in p.initial_preds:
        if graph.has_node(ip):
            reach.add(ip)
            reach.update(nx.descendants(graph, ip))
    return reach


def _unfold(
    p: Program,
    pred: Pred,
    theta: ConstraintConj,
    canon: dict[Pred, tuple[Var, ...]],
    unfoldable,
    fresh,
) -> list[tuple[ConstraintConj, tuple[Atom, ...]]]:
    """Resolve a constrained fact against the program, unfolding eagerly.

    Returns the satisfiable resultants as (constraint, remaining body atoms).
    """
    if pred == FALSE_PRED:
        clauses = p.goal_clauses()
    else:
        clauses = p.clauses_for(pred)
    out: list[tuple[ConstraintConj, tuple[Atom, ...]]] = []

    def rename_clause(cl: Clause, expected: Optional[tuple[Var, ...]], taken: set[str]):
        """Map head args onto the expected tuple; keep other names when free."""
        mapping: dict[Var, Var] = {}
        if cl.head is not None and expected is not None:
            mapping.update(zip(cl.head.args, expected))
        taken = taken | {v.name for v in mapping.values()}
        rest: list[Var] = []
        if cl.head is not None:
            rest.extend(cl.head.args)
        for a in cl.body:
            rest.extend(a.args)
        rest.extend(sorted(conj_vars(cl.constr)))
        for v in rest:
            if v in mapping:
                continue
            if v.name not in taken:
                mapping[v] = v
            else:
                nv = fresh()
                while nv.name in taken:
                    nv = fresh()
                mapping[v] = nv
            taken.add(mapping[v].name)
        return rename_conj(cl.constr, mapping), tuple(rename_atom(a, mapping) for a in cl.body)

    def expand(constr: ConstraintConj, atoms: tuple[Atom, ...]) -> None:
        for i, a in enumerate(atoms):
            if unfoldable(a.pred):
                taken = {v.name for v in conj_vars(constr)}
                for at in atoms:
                    taken.update(v.name for v in at.args)
                for dcl in p.clauses_for(a.pred):
                    dconstr, dbody = rename_clause(dcl, a.args, taken)
                    merged = conj_and(constr, dconstr)
                    if satisfiable(merged):
                        expand(merged, atoms[:i] + dbody + atoms[i + 1 :])
                return
        out.append((constr, atoms))

    for cl in clauses:
        expected = canon.get(pred)
        taken = {v.name for v in expected} if expected else set()
        taken.update(v.name for v in conj_vars(theta))
        constr0, body = rename_clause(cl, expected, taken)
        merged = conj_and(theta, constr0)
        if satisfiable(merged):
            expand(merged, body)
    return out


def pe_run(p: Program) -> PeResult:
    """Iterate S to its finite limit and emit the renamed unfolded program."""
    if not check_initial_coverage(p):
        raise ValueError("coverage check failed")
    canon = canonical_args(p)
    canon[FALSE_PRED] = ()
    props = gen_properties(p)
    recursive = recursive_preds(p)
    init_reach = _init_reachable(p)

    def unfoldable(pred: Pred) -> bool:
        if p.is_initial(pred) or pred in recursive or pred == FALSE_PRED:
            return False
        if len(p.clauses_for(pred)) == 1:
            return True
        return pred not in init_reach

    counter = itertools.count(1)

    def fresh() -> Var:
        return Var(f"U{next(counter)}")

    elements: dict[object, _Element] = {}
    resultants: dict[object, list] = {}
    name_counts: dict[str, int] = {}
    capped = False

    def version_key(pred: Pred, projected: ConstraintConj):
        if pred in p.initial_preds and not capped:
            return ("init", pred, projected)
        _, subset = rep_psi(props, pred, projected)
        return ("psi", pred, subset)

    def stored_theta(pred: Pred, projected: ConstraintConj, key) -> ConstraintConj:
        if key[0] == "init":
            return projected
        abstracted, _ = rep_psi(props, pred, projected)
        return abstracted

    def new_element(pred: Pred, projected: ConstraintConj, step: int) -> _Element:
        key = version_key(pred, projected)
        if key in elements:
            return elements[key]
        nonlocal capped
        if len(elements) >= VERSION_CAP and not capped:
            capped = True
            logger.warning("version cap reached; keying initial versions by property subset")
            key = version_key(pred, projected)
            if key in elements:
                return elements[key]
        if pred == FALSE_PRED:
            name = pred.name
        else:
            k = name_counts.get(pred.name, 0) + 1
            name_counts[pred.name] = k
            name = f"{pred.name}_{k}"
        elem = _Element(pred, name, stored_theta(pred, projected, key), step)
        elements[key] = elem
        queue.append(key)
        return elem

    queue: list = []
    new_element(FALSE_PRED, TRUE_CONJ, 0)
    qi = 0
    while qi < len(queue):
        key = queue[qi]
        qi += 1
        elem = elements[key]
        rs = _unfold(p, elem.pred, elem.theta, canon, unfoldable, fresh)
        annotated = []
        for constr, atoms in rs:
            children = []
            for a in atoms:
                projected = rename_conj(
                    project(constr, set(a.args)), dict(zip(a.args, canon[a.pred]))
                )
                child = new_element(a.pred, projected, elem.step + 1)
                children.append(child.name)
            annotated.append((constr, atoms, tuple(children)))
        resultants[key] = annotated

    clauses = []
    cid = itertools.count(1)
    steps: dict[int, tuple[list[str], list[str]]] = {}
    for key, elem in elements.items():
        row = steps.setdefault(elem.step, ([], []))
        if elem.pred == FALSE_PRED:
            row[0].append("false <- true")
        else:
            row[0].append(f"{elem.name}{_args_str(canon[elem.pred])} <- {format_conj(elem.theta)}")
        for constr, atoms, children in resultants[key]:
            if elem.pred == FALSE_PRED:
                head = None
            else:
                head = Atom(Pred(elem.name, elem.pred.arity), canon[elem.pred])
            body = tuple(
                Atom(Pred(child, a.pred.arity), a.args) for a, child in zip(atoms, children)
            )
            cl = Clause(f"c{next(cid)}", head, simplify(constr), body)
            clauses.append(cl)
            row[1].append(format_clause(cl))

    initial_preds = frozenset(
        Pred(elem.name, elem.pred.arity)
        for elem in elements.values()
        if elem.pred in p.initial_preds
    )
    program = Program(tuple(clauses), initial_preds, p.init_args, p.original_init)
    table = tuple((s, tuple(steps[s][0]), tuple(steps[s][1])) for s in sorted(steps))
    return PeResult(program, table)


def _args_str(args: tuple[Var, ...]) -> str:
    if not args:
        return ""
    return "(" + ",".join(v.name for v in args) + ")"
