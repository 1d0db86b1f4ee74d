"""Recursive-descent parser and vectorized evaluator for coefficient expressions.

Grammar (EBNF, whitespace ignored)::

    expr       = "if" comparison "then" expr "else" expr | additive ;
    comparison = additive ( "<" | "<=" | ">" | ">=" | "≤" | "≥" ) additive ;
    additive   = term { ( "+" | "-" ) term } ;
    term       = unary { ( "*" | "/" ) unary } ;
    unary      = "-" unary | power ;
    power      = atom [ "^" unary ] ;
    atom       = number | "pi" | "x" | "y" | func "(" expr { "," expr } ")"
               | "(" expr ")" ;
    func       = "sin" | "cos" | "exp" | "ln" | "abs" | "min" | "max" ;

``^`` is right associative and binds tighter than unary minus, so ``-2^2``
is ``-4``.  Guards are evaluated lazily: a branch is only evaluated on the
points that select it, so ``if x > 0 then ln(x) else 0`` is total.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass

import numpy as np

from .errors import ArityError, EvalDomainError, ExprSyntaxError, UnknownIdentifierError

FUNCTIONS = {"sin": 1, "cos": 1, "exp": 1, "ln": 1, "abs": 1, "min": 2, "max": 2}
CONSTANTS = {"pi": math.pi}
VARIABLES = ("x", "y")
COMPARATORS = {"<": "<", "<=": "<=", ">": ">", ">=": ">=", "≤": "<=", "≥": ">="}
KEYWORDS = ("if", "then", "else")


@dataclass(frozen=True)
class Num:
    value: float


@dataclass(frozen=True)
class Var:
    name: str


@dataclass(frozen=True)
class Neg:
    arg: "Expr"


@dataclass(frozen=True)
class BinOp:
    op: str
    left: "Expr"
    right: "Expr"


@dataclass(frozen=True)
class Call:
    name: str
    args: tuple["Expr", ...]


@dataclass(frozen=True)
class Compare:
    op: str
    left: "Expr"
    right: "Expr"


@dataclass(frozen=True)
class If:
    cond: Compare
    then: "Expr"
    other: "Expr"


Expr = Num | Var | Neg | BinOp | Call | If

_TOKEN = re.compile(
    r"\s*(?:(?P<num>(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)"
    r"|(?P<name>[A-Za-z_][A-Za-z_0-9]*)"
    r"|(?P<op><=|>=|≤|≥|[-+*/^(),<>]))"
)


def _tokenize(text: str) -> list[tuple[str, str, int]]:
    """Return ``(kind, text, byte_offset)`` triples ending with an ``end`` token."""
    tokens = []
    pos = 0
    while True:
        while pos < len(text) and text[pos].isspace():
            pos += 1
        if pos >= len(text):
            break
        m = _TOKEN.match(text, pos)
        if m is None or m.end() == pos:
            raise ExprSyntaxError(f"unexpected character {text[pos]!r}", _byte_offset(text, pos))
        kind = m.lastgroup
        start = m.start(kind)
        tokens.append((kind, m.group(kind), _byte_offset(text, start)))
        pos = m.end()
    tokens.append(("end", "", _byte_offset(text, len(text))))
    return tokens


def _byte_offset(text: str, pos: int) -> int:
    return len(text[:pos].encode("utf-8"))


class _Parser:
    def __init__(self, text: str):
        self.tokens = _tokenize(text)
        self.i = 0

    @property
    def tok(self):
        return self.tokens[self.i]

    def _fail(self, what: str):
        kind, val, off = self.tok
        found = "end of input" if kind == "end" else repr(val)
        raise ExprSyntaxError(f"expected {what}, found {found}", off)

    def _accept(self, value: str) -> bool:
        if self.tok[1] == value and self.tok[0] in ("op", "name"):
            self.i += 1
            return True
        return False

    def _expect(self, value: str):
        if not self._accept(value):
            self._fail(repr(value))

    def parse(self) -> Expr:
        node = self.expr()
        if self.tok[0] != "end":
            self._fail("end of input")
        return node

    def expr(self) -> Expr:
        if self._accept("if"):
            cond = self.comparison()
            self._expect("then")
            then = self.expr()
            self._expect("else")
            return If(cond, then, self.expr())
        return self.additive()

    def comparison(self) -> Compare:
        left = self.additive()
        kind, val, _ = self.tok
        if kind != "op" or val not in COMPARATORS:
            self._fail("comparison operator")
        self.i += 1
        return Compare(COMPARATORS[val], left, self.additive())

    def additive(self) -> Expr:
        node = self.term()
        while self.tok[0] == "op" and self.tok[1] in "+-":
            op = self.tok[1]
            self.i += 1
            node = BinOp(op, node, self.term())
        return node

    def term(self) -> Expr:
        node = self.unary()
        while self.tok[0] == "op" and self.tok[1] in "*/":
            op = self.tok[1]
            self.i += 1
            node = BinOp(op, node, self.unary())
        return node

    def unary(self) -> Expr:
        if self._accept("-"):
            return Neg(self.unary())
        return self.power()

    def power(self) -> Expr:
        base = self.atom()
        if self._accept("^"):
            return BinOp("^", base, self.unary())
        return base

    def atom(self) -> Expr:
        kind, val, off = self.tok
        if kind == "num":
            self.i += 1
            return Num(float(val))
        if kind == "name":
            if val in KEYWORDS:
                self._fail("expression")
            self.i += 1
            if val in FUNCTIONS:
                self._expect("(")
                args = [self.expr()]
                while self._accept(","):
                    args.append(self.expr())
                self._expect(")")
                if len(args) != FUNCTIONS[val]:
                    raise ArityError(f"{val} takes {FUNCTIONS[val]} argument(s), got {len(args)}", off)
                return Call(val, tuple(args))
            if val in CONSTANTS:
                return Num(CONSTANTS[val])
            if val in VARIABLES:
                return Var(val)
            raise UnknownIdentifierError(f"unknown identifier {val!r}", off)
        if self._accept("("):
            node = self.expr()
            self._expect(")")
            return node
        self._fail("expression")


def parse(text: str) -> Expr:
    """Parse ``text`` into an expression tree.

    Raises
    ------
    ExprSyntaxError, UnknownIdentifierError, ArityError
        With the byte offset of the offending token in ``.offset``.
    """
    return _Parser(text).parse()


def to_text(node: Expr) -> str:
    """Canonical fully parenthesized printer; ``parse(to_text(e))`` rebuilds ``e``."""
    if isinstance(node, Num):
        return repr(float(node.value)) if node.value >= 0 else f"(-{-node.value!r})"
    if isinstance(node, Var):
        return node.name
    if isinstance(node, Neg):
        return f"(-{to_text(node.arg)})"
    if isinstance(node, BinOp):
        return f"({to_text(node.left)} {node.op} {to_text(node.right)})"
    if isinstance(node, Call):
        return f"{node.name}({', '.join(to_text(a) for a in node.args)})"
    if isinstance(node, Compare):
        return f"{to_text(node.left)} {node.op} {to_text(node.right)}"
    if isinstance(node, If):
        return f"(if {to_text(node.cond)} then {to_text(node.then)} else {to_text(node.other)})"
    raise TypeError(node)


def variables(node: Expr) -> set[str]:
    if isinstance(node, Var):
        return {node.name}
    if isinstance(node, Num):
        return set()
    if isinstance(node, Neg):
        return variables(node.arg)
    if isinstance(node, (BinOp, Compare)):
        return variables(node.left) | variables(node.right)
    if isinstance(node, Call):
        return set().union(*(variables(a) for a in node.args))
    return variables(node.cond) | variables(node.then) | variables(node.other)


def _domain_fail(msg: str, bad: np.ndarray, env: dict[str, np.ndarray]):
    k = int(np.flatnonzero(bad)[0])
    point = tuple(float(env[v][k]) for v in VARIABLES if v in env)
    raise EvalDomainError(msg, point)


def _eval(node: Expr, env: dict[str, np.ndarray], n: int) -> np.ndarray:
    if isinstance(node, Num):
        return np.full(n, node.value)
    if isinstance(node, Var):
        if node.name not in env:
            raise UnknownIdentifierError(f"variable {node.name!r} not available in this dimension")
        return env[node.name]
    if isinstance(node, Neg):
        return -_eval(node.arg, env, n)
    if isinstance(node, BinOp):
        a, b = _eval(node.left, env, n), _eval(node.right, env, n)
        if node.op == "+":
            out = a + b
        elif node.op == "-":
            out = a - b
        elif node.op == "*":
            out = a * b
        elif node.op == "/":
            bad = b == 0
            if bad.any():
                _domain_fail("division by zero", bad, env)
            out = a / b
        else:
            bad = (a < 0) & (b != np.round(b)) | (a == 0) & (b < 0)
            if bad.any():
                _domain_fail("power outside real domain", bad, env)
            out = np.power(a, b)
    elif isinstance(node, Call):
        args = [_eval(a, env, n) for a in node.args]
        if node.name == "ln":
            bad = args[0] <= 0
            if bad.any():
                _domain_fail("ln of nonpositive value", bad, env)
            out = np.log(args[0])
        elif node.name == "min":
            out = np.minimum(*args)
        elif node.name == "max":
            out = np.maximum(*args)
        else:
            out = {"sin": np.sin, "cos": np.cos, "exp": np.exp, "abs": np.abs}[node.name](args[0])
    elif isinstance(node, If):
        c = node.cond
        a, b = _eval(c.left, env, n), _eval(c.right, env, n)
        mask = {"<": a < b, "<=": a <= b, ">": a > b, ">=": a >= b}[c.op]
        out = np.empty(n)
        for sel, branch in ((mask, node.then), (~mask, node.other)):
            if sel.any():
                sub = {k: v[sel] for k, v in env.items()}
                out[sel] = _eval(branch, sub, int(sel.sum()))
        return out
    else:
        raise TypeError(node)
    bad = ~np.isfinite(out)
    if bad.any():
        _domain_fail("non-finite value", bad, env)
    return out


def evaluate(node: Expr, x=0.0, y=None) -> np.ndarray | float:
    """Evaluate at a point or at arrays of points (``y=None`` means 1D)."""
    scalar = np.ndim(x) == 0
    env = {"x": np.atleast_1d(np.asarray(x, dtype=float))}
    if y is not None:
        env["y"] = np.broadcast_to(np.asarray(y, dtype=float), env["x"].shape).copy()
    out = _eval(node, env, env["x"].shape[0])
    return float(out[0]) if scalar else out


def sample(node: Expr | str, mesh) -> np.ndarray:
    """Evaluate at the interior nodes of ``mesh``."""
    if isinstance(node, str):
        node = parse(node)
    names = VARIABLES[: mesh.dim]
    extra = variables(node) - set(names)
    if extra:
        raise UnknownIdentifierError(f"variable(s) {sorted(extra)} not defined on a {mesh.dim}D mesh")
    env = {v: mesh.coords[:, k].copy() for k, v in enumerate(names)}
    return _eval(node, env, mesh.size)
