"""Constraint propagation: strengthen clauses with call and answer invariants.

The invariants come from a polyhedral fixpoint over the query-answer
transformed program.  Clauses whose strengthened constraint is
unsatisfiable disappear.
"""

from pathlib import Path

from chcprecond import constraint_specialise, invariants_for, parse_program
from chcprecond.core import format_clause

CORPUS = Path(__file__).resolve().parents[1] / "tests" / "corpus"


def main() -> None:
    p = parse_program((CORPUS / "cs_example.chc").read_text())

    print("call and answer invariants:")
    print(invariants_for(p).dump())
    print()

    r = constraint_specialise(p)
    print("strengthened clauses:")
    for cl in r.program.clauses:
        print(f"  {format_clause(cl)}")
    if r.deleted:
        print(f"deleted as unreachable or useless: {', '.join(r.deleted)}")
    else:
        print("nothing was deleted")


if __name__ == "__main__":
    main()
