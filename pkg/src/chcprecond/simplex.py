"""Exact rational feasibility checking for linear constraint systems.

Everything here runs on `fractions.Fraction`; no floating point is involved
anywhere.  The solver is a bounds-form simplex in the style used by SMT
solvers: every constraint `sum(c_i * x_i) REL k` becomes a slack variable
defined by the pure linear part with `REL k` turned into bounds on the slack.
Bland's rule makes the pivot loop terminate.

Bound values are "delta-rationals" `(r, d)` meaning `r + d * delta` for an
infinitesimal positive delta.  They let us express strict inequalities
exactly, which the entailment check in `linarith` needs when it negates a
non-strict constraint over the rationals.  Plain tuples of Fractions compare
lexicographically, which is exactly the right order for delta-rationals.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Optional

Delta = tuple[Fraction, Fraction]

ZERO = Fraction(0)
DZERO: Delta = (ZERO, ZERO)


class Undecided(Exception):
    """Raised when the integer branch-and-bound runs out of node budget."""


class Budget:
    """Shared countdown for branch-and-bound node expansions."""

    def __init__(self, nodes: int):
        self.remaining = nodes

    def spend(self, amount: int = 1) -> None:
        self.remaining -= amount
        if self.remaining < 0:
            raise Undecided("branch-and-bound node budget exhausted")


def _dadd(a: Delta, b: Delta) -> Delta:
    return (a[0] + b[0], a[1] + b[1])


def _dsub(a: Delta, b: Delta) -> Delta:
    return (a[0] - b[0], a[1] - b[1])


def _dscale(a: Delta, f: Fraction) -> Delta:
    return (a[0] * f, a[1] * f)


class Simplex:
    """Feasibility checker for conjunctions of linear bounds.

    Usage: construct with the number of problem variables, add slack rows
    for linear combinations, tighten bounds, then call `check()`.  The
    instance is single-shot with respect to `check`; bounds may be tightened
    between checks only through fresh copies (the branch-and-bound below
    simply rebuilds, which is cheap at the sizes we deal with).
    """

    def __init__(self, nvars: int):
        self.n = nvars
        self.lb: list[Optional[Delta]] = [None] * nvars
        self.ub: list[Optional[Delta]] = [None] * nvars
        self.assign: list[Delta] = [DZERO] * nvars
        # basic var -> {nonbasic var -> coefficient}
        self.rows: dict[int, dict[int, Fraction]] = {}
        # nonbasic var -> set of basic vars whose row mentions it
        self.cols: dict[int, set[int]] = {}

    def add_var(self) -> int:
        self.lb.append(None)
        self.ub.append(None)
        self.assign.append(DZERO)
        return len(self.lb) - 1

    def add_slack(self, combo: dict[int, Fraction]) -> int:
        """Introduce s = sum(combo) as a new basic variable and return it."""
        s = self.add_var()
        row = {v: c for v, c in combo.items() if c != 0}
        val = DZERO
        for v, c in row.items():
            self.cols.setdefault(v, set()).add(s)
            val = _dadd(val, _dscale(self.assign[v], c))
        self.rows[s] = row
        self.assign[s] = val
        return s

    def tighten_lower(self, v: int, bound: Delta) -> bool:
        """Raise the lower bound of v.  Returns False on an empty interval."""
        cur = self.lb[v]
        if cur is None or bound > cur:
            self.lb[v] = bound
        if self.ub[v] is not None and self.lb[v] is not None and self.lb[v] > self.ub[v]:
            return False
        return True

    def tighten_upper(self, v: int, bound: Delta) -> bool:
        cur = self.ub[v]
        if cur is None or bound < cur:
            self.ub[v] = bound
        if self.ub[v] is not None and self.lb[v] is not None and self.lb[v] > self.ub[v]:
            return False
        return True

    # -- the solving machinery ------------------------------------------------

    def _update_nonbasic(self, v: int, value: Delta) -> None:
        delta = _dsub(value, self.assign[v])
        if delta == DZERO:
            return
        self.assign[v] = value
        for b in self.cols.get(v, ()):
            self.assign[b] = _dadd(self.assign[b], _dscale(delta, self.rows[b][v]))

    def _pivot(self, bi: int, nj: int) -> None:
        """Swap basic bi with nonbasic nj."""
        row = self.rows.pop(bi)
        a = row.pop(nj)
        self.cols[nj].discard(bi)
        # nj = (bi - sum of the rest) / a
        new_row = {bi: Fraction(1) / a}
        self.cols.setdefault(bi, set()).add(nj)
        for v, c in row.items():
            new_row[v] = -c / a
            self.cols[v].discard(bi)
            self.cols[v].add(nj)
        self.rows[nj] = new_row
        # substitute nj away in every other row
        for b in list(self.cols.get(nj, ())):
            r = self.rows[b]
            factor = r.pop(nj)
            for v, c in new_row.items():
                merged = r.get(v, ZERO) + factor * c
                if merged == 0:
                    if v in r:
                        del r[v]
                        self.cols[v].discard(b)
                else:
                    if v not in r:
                        self.cols.setdefault(v, set()).add(b)
                    r[v] = merged
        self.cols[nj] = set()

    def _pivot_and_update(self, bi: int, nj: int, target: Delta) -> None:
        a = self.rows[bi][nj]
        theta = _dscale(_dsub(target, self.assign[bi]), Fraction(1) / a)
        self.assign[bi] = target
        self.assign[nj] = _dadd(self.assign[nj], theta)
        for b in self.cols.get(nj, ()):
            if b != bi:
                self.assign[b] = _dadd(self.assign[b], _dscale(theta, self.rows[b][nj]))
        self._pivot(bi, nj)

    def check(self) -> bool:
        """True iff the bounds admit a solution.  Leaves a model in `assign`."""
        # snap nonbasic variables into their intervals first
        for v in range(len(self.assign)):
            if v in self.rows:
                continue
            lo, hi = self.lb[v], self.ub[v]
            if lo is not None and hi is not None and lo > hi:
                return False
            if lo is not None and self.assign[v] < lo:
                self._update_nonbasic(v, lo)
            elif hi is not None and self.assign[v] > hi:
                self._update_nonbasic(v, hi)
        while True:
            broken = None
            for b in sorted(self.rows):
                lo, hi = self.lb[b], self.ub[b]
                if lo is not None and self.assign[b] < lo:
                    broken = (b, lo, True)
                    break
                if hi is not None and self.assign[b] > hi:
                    broken = (b, hi, False)
                    break
            if broken is None:
                return True
            b, target, need_increase = broken
            row = self.rows[b]
            entering = None
            for v in sorted(row):
                c = row[v]
                if need_increase:
                    ok = (c > 0 and (self.ub[v] is None or self.assign[v] < self.ub[v])) or (
                        c < 0 and (self.lb[v] is None or self.assign[v] > self.lb[v])
                    )
                else:
                    ok = (c < 0 and (self.ub[v] is None or self.assign[v] < self.ub[v])) or (
                        c > 0 and (self.lb[v] is None or self.assign[v] > self.lb[v])
                    )
                if ok:
                    entering = v
                    break
            if entering is None:
                return False
            self._pivot_and_update(b, entering, target)

    def model(self) -> list[Delta]:
        return self.assign[: self.n]


# -- building solvers from constraint rows ------------------------------------

Row = tuple[tuple[tuple[int, int], ...], int, str]
# ((var_index, coeff), ...), constant, rel with rel in {"=", "<=", "<"}
# meaning: sum(coeff * x) + constant  REL  0


def _solver_for(nvars: int, rows: list[Row], extra_bounds: dict[int, tuple[Optional[Delta], Optional[Delta]]] | None = None) -> Optional[Simplex]:
    """Build a Simplex for the given rows; None means trivially unsat."""
    sx = Simplex(nvars)
    if extra_bounds:
        for v, (lo, hi) in extra_bounds.items():
            if lo is not None and not sx.tighten_lower(v, lo):
                return None
            if hi is not None and not sx.tighten_upper(v, hi):
                return None
    merged: dict[tuple[tuple[int, int], ...], int] = {}
    for combo, const, rel in rows:
        if not combo:
            # ground fact
            if rel == "=" and const != 0:
                return None
            if rel == "<=" and const > 0:
                return None
            if rel == "<" and const >= 0:
                return None
            continue
        if combo not in merged:
            merged[combo] = sx.add_slack({v: Fraction(c) for v, c in combo})
        s = merged[combo]
        k = Fraction(const)
        if rel == "=":
            if not sx.tighten_lower(s, (-k, ZERO)):
                return None
            if not sx.tighten_upper(s, (-k, ZERO)):
                return None
        elif rel == "<=":
            if not sx.tighten_upper(s, (-k, ZERO)):
                return None
        else:  # strict
            if not sx.tighten_upper(s, (-k, Fraction(-1))):
                return None
    return sx


def feasible(nvars: int, rows: list[Row], extra_bounds=None) -> bool:
    sx = _solver_for(nvars, rows, extra_bounds)
    return sx is not None and sx.check()


def _floor(f: Fraction) -> int:
    return f.numerator // f.denominator


def int_feasible(nvars: int, rows: list[Row], budget: Budget) -> bool:
    """Integer feasibility by branch-and-bound over the rational relaxation.

    All rows must be non-strict (`=` or `<=`), which is what the canonical
    constraint form guarantees.  Raises Undecided when the budget runs dry.
    """
    stack: list[dict[int, tuple[Optional[Delta], Optional[Delta]]]] = [{}]
    while stack:
        bounds = stack.pop()
        budget.spend()
        sx = _solver_for(nvars, rows, bounds)
        if sx is None or not sx.check():
            continue
        model = sx.model()
        fractional = None
        for v in range(nvars):
            r, d = model[v]
            if d != 0:
                # cannot happen for non-strict systems, but guard anyway
                raise AssertionError("delta component in integer search")
            if r.denominator != 1:
                fractional = (v, _floor(r))
                break
        if fractional is None:
            return True
        v, lo = fractional
        cur = bounds.get(v, (None, None))
        above = dict(bounds)
        above[v] = (_max_opt(cur[0], (Fraction(lo + 1), ZERO)), cur[1])
        below = dict(bounds)
        below[v] = (cur[0], _min_opt(cur[1], (Fraction(lo), ZERO)))
        stack.append(above)
        stack.append(below)
    return False


def _min_opt(a: Optional[Delta], b: Delta) -> Delta:
    return b if a is None or b < a else a


def _max_opt(a: Optional[Delta], b: Delta) -> Delta:
    return b if a is None or b > a else a
