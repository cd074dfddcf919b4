"""Enumerate derivations of the goal and inspect the smallest counterexample.

An AND-tree pairs every node with the clause constraint, variables renamed
apart, so the conjunction over the whole tree says whether that derivation
can actually happen.
"""

from pathlib import Path

from chcprecond import find_counterexample, parse_program
from chcprecond.derivation import constr_of, initial_nodes, iter_and_trees
from chcprecond.linarith import format_conj

CORPUS = Path(__file__).resolve().parents[1] / "tests" / "corpus"


def main() -> None:
    p = parse_program((CORPUS / "fig1.chc").read_text())

    print("the five smallest goal derivations, feasible or not:")
    shown = 0
    for tree, _ in iter_and_trees(p, 12, prune=False):
        print(f"  {tree.trace()}  ({tree.size()} nodes)")
        shown += 1
        if shown == 5:
            break
    print()

    found = find_counterexample(p)
    assert found is not None
    tree, was_feasible = found
    print(f"smallest feasible counterexample: {tree.trace()}")
    print(f"feasible: {was_feasible}")
    print(f"accumulated constraint: {format_conj(constr_of(tree))}")

    leaf = initial_nodes(p, tree)[0]
    print(f"its initial node uses clause {leaf.clause_id}: {format_conj(leaf.constr)}")


if __name__ == "__main__":
    main()
