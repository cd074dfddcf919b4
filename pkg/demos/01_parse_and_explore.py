"""Parse a program and look around: clauses, predicates, the initial declaration."""

from pathlib import Path

from chcprecond import parse_program
from chcprecond.core import format_clause
from chcprecond.linarith import format_conj

CORPUS = Path(__file__).resolve().parents[1] / "tests" / "corpus"


def main() -> None:
    p = parse_program((CORPUS / "fig1.chc").read_text())

    init = next(iter(p.initial_preds))
    args = ", ".join(v.name for v in p.init_args)
    print(f"initial predicate: {init.name}/{init.arity} over ({args})")
    print(f"predicates: {', '.join(sorted(q.name for q in p.preds()))}")
    print(f"{len(p.clauses)} clauses, {len(p.goal_clauses())} of them goal clauses")
    print()

    for cl in p.clauses:
        print(f"  {format_clause(cl)}")
    print()

    for cl in p.initial_clauses():
        print(f"initial fact {cl.cid} constrains: {format_conj(cl.constr)}")


if __name__ == "__main__":
    main()
