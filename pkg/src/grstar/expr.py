"""A small expression language for elements of Gr(P).

    expr    := term (("+" | "-") term)*
    term    := ["-"] factor ("*" factor)*        star product
    factor  := atom ("." atom)*                  bullet product
    atom    := NUMBER ["/" NUMBER] | "X" INT | "cup" ["^" INT]
             | "adj" "(" expr ")" | "Z" "(" "X" INT ")" | "(" expr ")"

Whitespace is ignored.  There is no implicit product.
"""

from __future__ import annotations

import random
import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Union

from .ncpoly import GrElement, bullet, cup, cup_pow, involution, star
from .ncpoly import z_normalized
from .scalars import field

__all__ = [
    "Bullet",
    "Cup",
    "CupPow",
    "Involution",
    "Letter",
    "Literal",
    "ParseError",
    "Scale",
    "Star",
    "Sum",
    "ZOf",
    "evaluate",
    "parse",
    "to_text",
]


class ParseError(ValueError):
    def __init__(self, message: str, position: int):
        super().__init__(f"{message} at position {position}")
        self.position = position


@dataclass(frozen=True)
class Literal:
    value: Fraction


@dataclass(frozen=True)
class Letter:
    index: int


@dataclass(frozen=True)
class Star:
    lhs: "Node"
    rhs: "Node"


@dataclass(frozen=True)
class Bullet:
    lhs: "Node"
    rhs: "Node"


@dataclass(frozen=True)
class Sum:
    lhs: "Node"
    rhs: "Node"
    subtract: bool = False


@dataclass(frozen=True)
class Scale:
    factor: Fraction
    child: "Node"


@dataclass(frozen=True)
class Involution:
    child: "Node"


@dataclass(frozen=True)
class Cup:
    pass


@dataclass(frozen=True)
class CupPow:
    power: int


@dataclass(frozen=True)
class ZOf:
    letter: int


Node = Union[Literal, Letter, Star, Bullet, Sum, Scale, Involution, Cup, CupPow, ZOf]

_TOKEN = re.compile(r"\s*(?:(?P<num>\d+)|(?P<name>[A-Za-z_][A-Za-z_]*)(?P<idx>\d*)|(?P<op>[-+*./^()]))")


def _tokenize(text: str) -> list[tuple[str, str, int]]:
    tokens = []
    pos = 0
    while pos < len(text):
        if text[pos].isspace():
            pos += 1
            continue
        m = _TOKEN.match(text, pos)
        if not m or m.end() == pos:
            raise ParseError(f"unexpected character {text[pos]!r}", pos)
        if m.group("num") is not None:
            tokens.append(("num", m.group("num"), m.start("num")))
        elif m.group("name") is not None:
            tokens.append(("name", m.group("name") + m.group("idx"), m.start("name")))
        else:
            tokens.append(("op", m.group("op"), m.start("op")))
        pos = m.end()
    tokens.append(("end", "", len(text)))
    return tokens


class _Parser:
    def __init__(self, text: str, letters: int | None):
        self.tokens = _tokenize(text)
        self.i = 0
        self.letters = letters

    def peek(self) -> tuple[str, str, int]:
        return self.tokens[self.i]

    def take(self) -> tuple[str, str, int]:
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def expect(self, value: str) -> None:
        kind, val, pos = self.take()
        if val != value or kind == "end":
            raise ParseError(f"expected {value!r}, found {val or 'end of input'!r}", pos)

    def at_op(self, value: str) -> bool:
        kind, val, _ = self.peek()
        return kind == "op" and val == value

    def parse(self) -> Node:
        node = self.expr()
        kind, val, pos = self.peek()
        if kind != "end":
            raise ParseError(f"unexpected {val!r}", pos)
        return node

    def expr(self) -> Node:
        node = self.term()
        while self.at_op("+") or self.at_op("-"):
            _, op, _ = self.take()
            node = Sum(node, self.term(), subtract=(op == "-"))
        return node

    def term(self) -> Node:
        if self.at_op("-"):
            self.take()
            return Scale(Fraction(-1), self.term())
        node = self.factor()
        while self.at_op("*"):
            self.take()
            node = Star(node, self.factor())
        return node

    def factor(self) -> Node:
        node = self.atom()
        while self.at_op("."):
            self.take()
            node = Bullet(node, self.atom())
        return node

    def letter_index(self, name: str, pos: int) -> int:
        idx = int(name[1:])
        if idx < 1 or (self.letters is not None and idx > self.letters):
            raise ParseError(f"letter index {idx} out of range 1..{self.letters}", pos)
        return idx

    def atom(self) -> Node:
        kind, val, pos = self.take()
        if kind == "num":
            num = int(val)
            if self.at_op("/"):
                self.take()
                k2, den, p2 = self.take()
                if k2 != "num":
                    raise ParseError("expected a denominator", p2)
                if int(den) == 0:
                    raise ParseError("zero denominator", p2)
                return Literal(Fraction(num, int(den)))
            return Literal(Fraction(num))
        if kind == "name":
            if re.fullmatch(r"X\d+", val):
                return Letter(self.letter_index(val, pos))
            if val == "cup":
                if self.at_op("^"):
                    self.take()
                    k2, power, p2 = self.take()
                    if k2 != "num":
                        raise ParseError("expected an exponent", p2)
                    return CupPow(int(power))
                return Cup()
            if val == "adj":
                self.expect("(")
                inside = self.expr()
                self.expect(")")
                return Involution(inside)
            if val == "Z":
                self.expect("(")
                k2, name, p2 = self.take()
                if k2 != "name" or not re.fullmatch(r"X\d+", name):
                    raise ParseError("Z(...) takes a single letter", p2)
                idx = self.letter_index(name, p2)
                self.expect(")")
                return ZOf(idx)
            raise ParseError(f"unknown name {val!r}", pos)
        if kind == "op" and val == "(":
            inside = self.expr()
            self.expect(")")
            return inside
        raise ParseError(f"unexpected {val or 'end of input'!r}", pos)


def parse(text: str, letters: int | None = None) -> Node:
    """Parse text; with letters given, letter indices are range-checked."""
    return _Parser(text, letters).parse()


def to_text(node: Node) -> str:
    """Fully parenthesised canonical form; parse(to_text(n)) == n."""
    if isinstance(node, Literal):
        v = node.value
        return str(v.numerator) if v.denominator == 1 else f"{v.numerator}/{v.denominator}"
    if isinstance(node, Letter):
        return f"X{node.index}"
    if isinstance(node, Star):
        return f"({to_text(node.lhs)} * {to_text(node.rhs)})"
    if isinstance(node, Bullet):
        return f"({to_text(node.lhs)} . {to_text(node.rhs)})"
    if isinstance(node, Sum):
        op = "-" if node.subtract else "+"
        return f"({to_text(node.lhs)} {op} {to_text(node.rhs)})"
    if isinstance(node, Scale):
        if node.factor != -1:
            raise ValueError("only negation has a textual form")
        return f"(-{to_text(node.child)})"
    if isinstance(node, Involution):
        return f"adj({to_text(node.child)})"
    if isinstance(node, Cup):
        return "cup"
    if isinstance(node, CupPow):
        return f"cup^{node.power}"
    if isinstance(node, ZOf):
        return f"Z(X{node.letter})"
    raise TypeError(f"not an expression node: {node!r}")


def evaluate(node: Node, letters: int) -> GrElement:
    fld = field(letters)

    def ev(n: Node) -> GrElement:
        if isinstance(n, Literal):
            return GrElement.one(letters, fld).scale(n.value)
        if isinstance(n, Letter):
            if n.index > letters:
                raise ValueError(f"letter X{n.index} needs at least {n.index} letters")
            return GrElement.letter(n.index, letters, fld)
        if isinstance(n, Star):
            return star(ev(n.lhs), ev(n.rhs))
        if isinstance(n, Bullet):
            return bullet(ev(n.lhs), ev(n.rhs))
        if isinstance(n, Sum):
            return ev(n.lhs) - ev(n.rhs) if n.subtract else ev(n.lhs) + ev(n.rhs)
        if isinstance(n, Scale):
            return ev(n.child).scale(n.factor)
        if isinstance(n, Involution):
            return involution(ev(n.child))
        if isinstance(n, Cup):
            return cup(letters, fld)
        if isinstance(n, CupPow):
            return cup_pow(n.power, letters, fld)
        if isinstance(n, ZOf):
            if n.letter > letters:
                raise ValueError(f"letter X{n.letter} needs at least {n.letter} letters")
            return z_normalized(GrElement.letter(n.letter, letters, fld))
        raise TypeError(f"not an expression node: {n!r}")

    return ev(node)


def random_ast(rng: random.Random, letters: int, depth: int = 4) -> Node:
    """Random canonical-form expression (used by the round-trip property)."""
    if depth <= 0 or rng.random() < 0.25:
        choice = rng.randrange(5)
        if choice == 0:
            return Literal(Fraction(rng.randint(0, 9), rng.randint(1, 4)))
        if choice == 1:
            return Letter(rng.randint(1, letters))
        if choice == 2:
            return Cup()
        if choice == 3:
            return CupPow(rng.randint(0, 3))
        return ZOf(rng.randint(1, letters))
    kind = rng.randrange(5)
    a = random_ast(rng, letters, depth - 1)
    if kind == 0:
        return Star(a, random_ast(rng, letters, depth - 1))
    if kind == 1:
        return Bullet(a, random_ast(rng, letters, depth - 1))
    if kind == 2:
        return Sum(a, random_ast(rng, letters, depth - 1), subtract=rng.random() < 0.5)
    if kind == 3:
        return Scale(Fraction(-1), a)
    return Involution(a)
