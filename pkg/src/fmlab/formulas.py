"""Formula ASTs, the concrete text grammar, and Tarskian evaluation.

Grammar (see README for the full description):

    formula  := ("exists" | "forall") var "." formula | disj
    disj     := conj ("or" conj)*
    conj     := neg ("and" neg)*
    neg      := "not" neg | primary
    primary  := "(" formula ")" | "Q" "[" name "]" "(" vars ")"
              | name "(" vars ")" | var "=" var

Identifiers may end in primes (x') so paired variable blocks read naturally.
Quantifier application nodes are evaluated through a callback supplied by
the logic layer; everything else is the usual recursion.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from functools import lru_cache
from typing import Callable, Dict, FrozenSet, Iterable, Mapping, Optional, Tuple, Union


@dataclass(frozen=True)
class Atom:
    kind: str
    args: Tuple[str, ...]


@dataclass(frozen=True)
class Eq:
    left: str
    right: str


@dataclass(frozen=True)
class Not:
    body: "Formula"


@dataclass(frozen=True)
class And:
    left: "Formula"
    right: "Formula"


@dataclass(frozen=True)
class Or:
    left: "Formula"
    right: "Formula"


@dataclass(frozen=True)
class Exists:
    var: str
    body: "Formula"


@dataclass(frozen=True)
class Forall:
    # Shorthand for not exists not; kept as a node so text round-trips.
    var: str
    body: "Formula"


@dataclass(frozen=True)
class QApply:
    scheme: str
    params: Tuple[str, ...]


Formula = Union[Atom, Eq, Not, And, Or, Exists, Forall, QApply]

TRUE = Eq("_t", "_t")  # valid: every assignment satisfies x = x


def conj(parts: Iterable[Formula]) -> Formula:
    parts = list(parts)
    if not parts:
        return TRUE
    out = parts[0]
    for p in parts[1:]:
        out = And(out, p)
    return out


def disj(parts: Iterable[Formula]) -> Formula:
    parts = list(parts)
    if not parts:
        return Not(TRUE)
    out = parts[0]
    for p in parts[1:]:
        out = Or(out, p)
    return out


@lru_cache(maxsize=None)
def free_vars(f: Formula) -> FrozenSet[str]:
    if isinstance(f, Atom):
        return frozenset(f.args)
    if isinstance(f, Eq):
        return frozenset((f.left, f.right))
    if isinstance(f, Not):
        return free_vars(f.body)
    if isinstance(f, (And, Or)):
        return free_vars(f.left) | free_vars(f.right)
    if isinstance(f, (Exists, Forall)):
        return free_vars(f.body) - {f.var}
    if isinstance(f, QApply):
        return frozenset(f.params)
    raise TypeError(f"not a formula node: {f!r}")


def is_quantifier_free(f: Formula) -> bool:
    if isinstance(f, (Atom, Eq)):
        return True
    if isinstance(f, Not):
        return is_quantifier_free(f.body)
    if isinstance(f, (And, Or)):
        return is_quantifier_free(f.left) and is_quantifier_free(f.right)
    return False


def rename(f: Formula, mapping: Mapping[str, str]) -> Formula:
    """Rename free occurrences; binders shadow and are never renamed.

    Callers are expected to map onto fresh names (no capture check).
    """
    if isinstance(f, Atom):
        return Atom(f.kind, tuple(mapping.get(a, a) for a in f.args))
    if isinstance(f, Eq):
        return Eq(mapping.get(f.left, f.left), mapping.get(f.right, f.right))
    if isinstance(f, Not):
        return Not(rename(f.body, mapping))
    if isinstance(f, And):
        return And(rename(f.left, mapping), rename(f.right, mapping))
    if isinstance(f, Or):
        return Or(rename(f.left, mapping), rename(f.right, mapping))
    if isinstance(f, (Exists, Forall)):
        inner = {k: v for k, v in mapping.items() if k != f.var}
        body = rename(f.body, inner) if inner else f.body
        return type(f)(f.var, body)
    if isinstance(f, QApply):
        return QApply(f.scheme, tuple(mapping.get(p, p) for p in f.params))
    raise TypeError(f"not a formula node: {f!r}")


def check_atoms(f: Formula, sig) -> None:
    """Raise if an atom refers to a missing kind or has the wrong arity."""
    if isinstance(f, Atom):
        if not sig.has(f.kind):
            raise ValueError(f"atom kind {f.kind!r} not in signature {sig.ids()}")
        want = sig.kind(f.kind).arity
        if len(f.args) != want:
            raise ValueError(f"atom {f.kind}{f.args}: arity {len(f.args)} != {want}")
    elif isinstance(f, Not):
        check_atoms(f.body, sig)
    elif isinstance(f, (And, Or)):
        check_atoms(f.left, sig)
        check_atoms(f.right, sig)
    elif isinstance(f, (Exists, Forall)):
        check_atoms(f.body, sig)


# Parsing.

_TOKEN_RE = re.compile(r"\s*(?:([A-Za-z_][A-Za-z0-9_]*'*)|([()\[\],=.])|(\S))")
_KEYWORDS = {"exists", "forall", "and", "or", "not"}


class ParseError(ValueError):
    def __init__(self, message: str, position: int):
        super().__init__(f"{message} (at offset {position})")
        self.position = position


def _tokenize(text: str):
    tokens = []
    pos = 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if not m:
            break
        if m.group(3):
            raise ParseError(f"unexpected character {m.group(3)!r}", m.start(3))
        word = m.group(1) or m.group(2)
        tokens.append((word, m.start(1) if m.group(1) else m.start(2)))
        pos = m.end()
    tokens.append((None, len(text)))
    return tokens


class _Parser:
    def __init__(self, text: str):
        self.text = text
        self.tokens = _tokenize(text)
        self.idx = 0

    def peek(self):
        return self.tokens[self.idx][0]

    def pos(self):
        return self.tokens[self.idx][1]

    def take(self):
        tok = self.tokens[self.idx]
        self.idx += 1
        return tok[0]

    def expect(self, want: str):
        if self.peek() != want:
            raise ParseError(f"expected {want!r}, found {self.peek()!r}", self.pos())
        return self.take()

    def ident(self, what: str) -> str:
        tok = self.peek()
        if tok is None or not re.fullmatch(r"[A-Za-z_][A-Za-z0-9_]*'*", tok) or tok in _KEYWORDS:
            raise ParseError(f"expected {what}, found {tok!r}", self.pos())
        return self.take()

    def formula(self) -> Formula:
        if self.peek() in ("exists", "forall"):
            quant = self.take()
            var = self.ident("variable")
            self.expect(".")
            body = self.formula()
            return Exists(var, body) if quant == "exists" else Forall(var, body)
        return self.disj()

    def disj(self) -> Formula:
        out = self.conj()
        while self.peek() == "or":
            self.take()
            out = Or(out, self.conj())
        return out

    def conj(self) -> Formula:
        out = self.neg()
        while self.peek() == "and":
            self.take()
            out = And(out, self.neg())
        return out

    def neg(self) -> Formula:
        if self.peek() == "not":
            self.take()
            return Not(self.neg())
        return self.primary()

    def _var_list(self) -> Tuple[str, ...]:
        self.expect("(")
        args = []
        if self.peek() != ")":
            args.append(self.ident("variable"))
            while self.peek() == ",":
                self.take()
                args.append(self.ident("variable"))
        self.expect(")")
        return tuple(args)

    def primary(self) -> Formula:
        tok = self.peek()
        if tok == "(":
            self.take()
            inner = self.formula()
            self.expect(")")
            return inner
        if tok == "Q" and self.tokens[self.idx + 1][0] == "[":
            self.take()
            self.take()
            name = self.ident("scheme name")
            self.expect("]")
            return QApply(name, self._var_list())
        if tok in ("exists", "forall"):
            return self.formula()
        name = self.ident("atom or variable")
        if self.peek() == "(":
            return Atom(name, self._var_list())
        if self.peek() == "=":
            self.take()
            return Eq(name, self.ident("variable"))
        raise ParseError(f"expected '(' or '=' after {name!r}", self.pos())


def parse(text: str) -> Formula:
    p = _Parser(text)
    out = p.formula()
    if p.peek() is not None:
        raise ParseError(f"trailing input {p.peek()!r}", p.pos())
    return out


# Printing with minimal parentheses: or < and < not < atoms; a quantified
# formula binds weakest and is parenthesized whenever embedded.

def _pr(f: Formula, level: int) -> str:
    if isinstance(f, Atom):
        return f"{f.kind}({', '.join(f.args)})"
    if isinstance(f, Eq):
        return f"{f.left} = {f.right}"
    if isinstance(f, Not):
        return "not " + _pr(f.body, 3)
    if isinstance(f, And):
        text = f"{_pr(f.left, 2)} and {_pr(f.right, 3)}"
        return f"({text})" if level > 2 else text
    if isinstance(f, Or):
        text = f"{_pr(f.left, 1)} or {_pr(f.right, 2)}"
        return f"({text})" if level > 1 else text
    if isinstance(f, (Exists, Forall)):
        word = "exists" if isinstance(f, Exists) else "forall"
        text = f"{word} {f.var}. {_pr(f.body, 0)}"
        return f"({text})" if level > 0 else text
    if isinstance(f, QApply):
        return f"Q[{f.scheme}]({', '.join(f.params)})"
    raise TypeError(f"not a formula node: {f!r}")


def print_formula(f: Formula) -> str:
    return _pr(f, 0)


# Evaluation.

QHandler = Callable[[str, Tuple[int, ...]], bool]


def eval_formula(
    m,
    f: Formula,
    asg: Mapping[str, int],
    qapply: Optional[QHandler] = None,
    memo: Optional[Dict] = None,
) -> bool:
    """Truth of f in m under asg; asg must cover the free variables.

    memo caches (node, restriction of asg to its free variables), which keeps
    repeated sub-evaluations under nested quantifiers from exploding.
    """
    if memo is None:
        memo = {}

    def ev(node: Formula, env: Dict[str, int]) -> bool:
        if isinstance(node, Atom):
            return tuple(env[a] for a in node.args) in m.rel(node.kind)
        if isinstance(node, Eq):
            return env[node.left] == env[node.right]
        if isinstance(node, Not):
            return not ev(node.body, env)
        if isinstance(node, And):
            return ev(node.left, env) and ev(node.right, env)
        if isinstance(node, Or):
            return ev(node.left, env) or ev(node.right, env)
        if isinstance(node, (Exists, Forall, QApply)):
            key = (node, tuple(sorted((v, env[v]) for v in free_vars(node))))
            if key in memo:
                return memo[key]
            if isinstance(node, Exists):
                out = any(
                    ev(node.body, {**env, node.var: a}) for a in range(1, m.n + 1)
                )
            elif isinstance(node, Forall):
                out = all(
                    ev(node.body, {**env, node.var: a}) for a in range(1, m.n + 1)
                )
            else:
                if qapply is None:
                    raise ValueError(
                        f"formula applies Q[{node.scheme}] but no quantifier handler was given"
                    )
                out = qapply(node.scheme, tuple(env[p] for p in node.params))
            memo[key] = out
            return out
        raise TypeError(f"not a formula node: {node!r}")

    missing = free_vars(f) - set(asg)
    if missing - {"_t"}:
        raise ValueError(f"assignment misses free variables {sorted(missing)}")
    env = dict(asg)
    env.setdefault("_t", 1 if m.n >= 1 else 0)
    return ev(f, env)
