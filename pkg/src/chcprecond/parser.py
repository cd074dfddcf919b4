"""Parser for the textual CHC format.

The format is one clause per line group, terminated by a period:

    % comment to end of line
    :- initial(init/2).
    c1. init(A,B).
    c2. if(A,B) :- A0 =< 100, A = 100 - A0, init(A0,B).
    false :- A =< 0, B = 0, while(A,B).

Heads are `false` or `name(args)`.  Bodies mix constraints and atoms freely.
Constraints relate two linear terms with `=`, `=<`, `>=`, `<` or `>`; terms
are built from integer literals, variables (leading uppercase or underscore)
and `+`, `-`, `*` with multiplication restricted to a literal on one side.
The optional leading `c1.` style label becomes the clause identifier;
unlabelled clauses get `c<k>` by position.

Parsing normalizes atoms: every argument becomes a distinct variable and the
bindings move into the clause constraint, so `p(X,X)` turns into `p(X,V1)`
with `X = V1` conjoined.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

from .core import Atom, Clause, Pred, Program, initial_constraint_dnf
from .linarith import (
    ConstraintConj,
    LinTerm,
    Var,
    constraint_of_term,
    make_conj,
    t_add,
    t_const,
    t_neg,
    t_scale,
    t_sub,
    t_var,
)


class ParseError(Exception):
    def __init__(self, message: str, line: int, col: int):
        super().__init__(f"line {line}, col {col}: {message}")
        self.message = message
        self.line = line
        self.col = col


@dataclass(frozen=True)
class Token:
    kind: str  # IDENT VAR INT PUNCT EOF
    text: str
    line: int
    col: int


_PUNCT = (":-", "=<", ">=", "(", ")", ",", ".", "=", "<", ">", "+", "-", "*", "/")


def tokenize(text: str) -> list[Token]:
    toks = []
    line, col = 1, 1
    i = 0
    n = len(text)
    while i < n:
        ch = text[i]
        if ch == "\n":
            line += 1
            col = 1
            i += 1
            continue
        if ch in " \t\r":
            i += 1
            col += 1
            continue
        if ch == "%":
            while i < n and text[i] != "\n":
                i += 1
            continue
        start_col = col
        matched = None
        for p in _PUNCT:
            if text.startswith(p, i):
                matched = p
                break
        if matched:
            toks.append(Token("PUNCT", matched, line, start_col))
            i += len(matched)
            col += len(matched)
            continue
        if ch.isdigit():
            j = i
            while j < n and text[j].isdigit():
                j += 1
            toks.append(Token("INT", text[i:j], line, start_col))
            col += j - i
            i = j
            continue
        if ch.isalpha() or ch == "_":
            j = i
            while j < n and (text[j].isalnum() or text[j] == "_"):
                j += 1
            word = text[i:j]
            kind = "VAR" if (ch == "_" or ch.isupper()) else "IDENT"
            toks.append(Token(kind, word, line, start_col))
            col += j - i
            i = j
            continue
        raise ParseError(f"unexpected character {ch!r}", line, start_col)
    toks.append(Token("EOF", "", line, col))
    return toks


class _Parser:
    def __init__(self, tokens: list[Token]):
        self.toks = tokens
        self.pos = 0

    def peek(self, ahead: int = 0) -> Token:
        return self.toks[min(self.pos + ahead, len(self.toks) - 1)]

    def next(self) -> Token:
        t = self.toks[self.pos]
        if t.kind != "EOF":
            self.pos += 1
        return t

    def expect(self, text: str) -> Token:
        t = self.next()
        if t.text != text:
            raise ParseError(f"expected {text!r}, found {t.text or 'end of input'!r}", t.line, t.col)
        return t

    def error(self, message: str) -> ParseError:
        t = self.peek()
        return ParseError(message, t.line, t.col)

    # -- items -----------------------------------------------------------

    def parse_items(self):
        directives = []
        raw_clauses = []
        while self.peek().kind != "EOF":
            if self.peek().text == ":-":
                directives.append(self.parse_directive())
            else:
                raw_clauses.append(self.parse_clause())
        return directives, raw_clauses

    def parse_directive(self) -> tuple[str, int]:
        self.expect(":-")
        t = self.next()
        if t.text != "initial":
            raise ParseError("unknown directive", t.line, t.col)
        self.expect("(")
        name = self.next()
        if name.kind != "IDENT":
            raise ParseError("predicate name expected", name.line, name.col)
        self.expect("/")
        arity = self.next()
        if arity.kind != "INT":
            raise ParseError("arity expected", arity.line, arity.col)
        self.expect(")")
        self.expect(".")
        return name.text, int(arity.text)

    def parse_clause(self):
        label = None
        if (
            self.peek().kind == "IDENT"
            and self.peek().text != "false"
            and self.peek(1).text == "."
        ):
            label = self.next().text
            self.expect(".")
        head = self.parse_head()
        body = []
        if self.peek().text == ":-":
            self.next()
            body.append(self.parse_body_elem())
            while self.peek().text == ",":
                self.next()
                body.append(self.parse_body_elem())
        self.expect(".")
        return label, head, body

    def parse_head(self):
        t = self.peek()
        if t.text == "false":
            self.next()
            return None
        if t.kind != "IDENT":
            raise ParseError("clause head expected", t.line, t.col)
        return self.parse_atom()

    def parse_atom(self):
        name = self.next()
        self.expect("(")
        args = [self.parse_term()]
        while self.peek().text == ",":
            self.next()
            args.append(self.parse_term())
        self.expect(")")
        return name.text, args, (name.line, name.col)

    def parse_body_elem(self):
        t = self.peek()
        if t.text == "true":
            self.next()
            return ("true",)
        if t.text == "false":
            raise ParseError("false in body", t.line, t.col)
        if t.kind == "IDENT" and self.peek(1).text == "(":
            return ("atom", self.parse_atom())
        # otherwise a constraint
        lhs = self.parse_term()
        rel = self.next()
        if rel.text not in ("=", "=<", ">=", "<", ">"):
            raise ParseError(f"relation expected, found {rel.text!r}", rel.line, rel.col)
        rhs = self.parse_term()
        return ("constr", lhs, rel.text, rhs)

    # -- terms -----------------------------------------------------------

    def parse_term(self) -> LinTerm:
        negate = False
        if self.peek().text == "-":
            self.next()
            negate = True
        acc = self.parse_product()
        if negate:
            acc = t_neg(acc)
        while self.peek().text in ("+", "-"):
            op = self.next().text
            rhs = self.parse_product()
            acc = t_add(acc, rhs) if op == "+" else t_sub(acc, rhs)
        return acc

    def parse_product(self) -> LinTerm:
        factors = [self.parse_factor()]
        while self.peek().text == "*":
            star = self.next()
            factors.append(self.parse_factor())
            non_const = [f for f in factors if not f.is_constant()]
            if len(non_const) > 1:
                raise ParseError("nonlinear constraint", star.line, star.col)
        acc = t_const(1)
        scale = 1
        variable: Optional[LinTerm] = None
        for f in factors:
            if f.is_constant():
                scale *= f.const
            else:
                variable = f
        acc = t_scale(variable, scale) if variable is not None else t_const(scale)
        return acc

    def parse_factor(self) -> LinTerm:
        t = self.next()
        if t.kind == "INT":
            return t_const(int(t.text))
        if t.kind == "VAR":
            return t_var(Var(t.text))
        if t.text == "-":
            return t_neg(self.parse_factor())
        raise ParseError(f"term expected, found {t.text or 'end of input'!r}", t.line, t.col)


def _normalize_clause(label, head, body, index: int):
    """Flatten atom arguments to distinct fresh variables."""
    constraints = []
    used: set[str] = set()
    for elem in body:
        if elem[0] == "constr":
            for v, _ in elem[1].coeffs + elem[3].coeffs:
                used.add(v.name)
    if head is not None:
        for arg in head[1]:
            for v, _ in arg.coeffs:
                used.add(v.name)
    for elem in body:
        if elem[0] == "atom":
            for arg in elem[1][1]:
                for v, _ in arg.coeffs:
                    used.add(v.name)
    fresh_n = 0

    def fresh() -> Var:
        nonlocal fresh_n
        while True:
            fresh_n += 1
            name = f"V{fresh_n}"
            if name not in used:
                used.add(name)
                return Var(name)

    def flatten(name: str, args: list[LinTerm], pos) -> Atom:
        out: list[Var] = []
        for arg in args:
            if len(arg.coeffs) == 1 and arg.coeffs[0][1] == 1 and arg.const == 0:
                v = arg.coeffs[0][0]
                if v not in out:
                    out.append(v)
                    continue
            v = fresh()
            constraints.append(constraint_of_term(t_sub(t_var(v), arg), "="))
            out.append(v)
        return Atom(Pred(name, len(args)), tuple(out))

    head_atom = None
    if head is not None:
        head_atom = flatten(*head)
    body_atoms = []
    for elem in body:
        if elem[0] == "true":
            continue
        if elem[0] == "constr":
            rel = "<=" if elem[2] == "=<" else elem[2]
            constraints.append(constraint_of_term(t_sub(elem[1], elem[3]), rel))
        else:
            body_atoms.append(flatten(*elem[1]))
    cid = label if label is not None else f"c{index}"
    return Clause(cid, head_atom, make_conj(constraints), tuple(body_atoms))


def parse_program(text: str, initial: Optional[str] = None) -> Program:
    """Parse CHC source into a normalized Program.

    `initial` may give the initial predicate as "name/arity", overriding any
    directive in the text.
    """
    toks = tokenize(text)
    parser = _Parser(toks)
    directives, raw = parser.parse_items()
    if len(directives) > 1:
        raise ParseError("multiple initial declarations", 1, 1)
    if initial is not None:
        try:
            name, arity_s = initial.rsplit("/", 1)
            declared = (name, int(arity_s))
        except ValueError:
            raise ParseError(f"bad initial spec {initial!r}", 0, 0) from None
    elif directives:
        declared = directives[0]
    else:
        raise ParseError("initial predicate undeclared", 1, 1)

    clauses = []
    seen_ids = set()
    for i, (label, head, body) in enumerate(raw, start=1):
        cl = _normalize_clause(label, head, body, i)
        if cl.cid in seen_ids:
            raise ParseError(f"duplicate clause id {cl.cid!r}", 1, 1)
        seen_ids.add(cl.cid)
        clauses.append(cl)

    init_pred = Pred(*declared)
    occurs = any(
        (cl.head is not None and cl.head.pred == init_pred)
        or any(a.pred == init_pred for a in cl.body)
        for cl in clauses
    )
    if not occurs:
        raise ParseError(f"initial predicate {init_pred} unused", 1, 1)
    facts = [cl for cl in clauses if cl.is_fact() and cl.head.pred == init_pred]
    if not facts:
        raise ParseError(f"initial predicate {init_pred} has no constrained fact", 1, 1)

    program = Program(
        clauses=tuple(clauses),
        initial_preds=frozenset({init_pred}),
        init_args=facts[0].head.args,
        original_init=None,
    )
    return Program(
        clauses=program.clauses,
        initial_preds=program.initial_preds,
        init_args=program.init_args,
        original_init=initial_constraint_dnf(program),
    )
