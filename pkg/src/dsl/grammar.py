"""pyparsing grammar for `.lad` fixture lines and polynomial expressions.

Each statement sits on its own line, so the grammar parses one line at a
time and every node remembers its offset inside that line.
"""

from dataclasses import dataclass
from typing import NamedTuple, Union

from pyparsing import (
    Forward,
    Group,
    Keyword,
    Literal,
    MatchFirst,
    OneOrMore,
    Optional,
    ParseException,
    ParserElement,
    ParseResults,
    StringEnd,
    Suppress,
    Word,
    ZeroOrMore,
    alphanums,
    alphas,
    nums,
)

ParserElement.enable_packrat()

KEYWORDS = ("field", "ring", "vars", "mod", "endo", "on", "map", "assume", "flat", "cm")
MAX_LITERAL_DIGITS = 1000


@dataclass(frozen=True)
class Ident:
    name: str
    loc: int


@dataclass(frozen=True)
class IntLit:
    value: int
    loc: int


@dataclass(frozen=True)
class Neg:
    operand: "Node"
    loc: int


@dataclass(frozen=True)
class Power:
    base: "Node"
    exponent: IntLit
    loc: int


@dataclass(frozen=True)
class BinOp:
    op: str
    lhs: "Node"
    rhs: "Node"
    loc: int


Node = Union[Ident, IntLit, Neg, Power, BinOp]


class Grammar(NamedTuple):
    statement: ParserElement
    polynomial: ParserElement
    ideal: ParserElement


def _ident(s: str, loc: int, toks: ParseResults) -> Ident:
    return Ident(toks[0], loc)


def _int(s: str, loc: int, toks: ParseResults) -> IntLit:
    if len(toks[0]) > MAX_LITERAL_DIGITS:
        raise ParseException(s, loc, "integer literal too long")
    return IntLit(int(toks[0]), loc)


def _power(s: str, loc: int, toks: ParseResults) -> Node:
    if len(toks) == 1:
        return toks[0]
    return Power(toks[0], toks[1], loc)


def _unary(s: str, loc: int, toks: ParseResults) -> Node:
    *signs, operand = toks
    for _ in signs:
        operand = Neg(operand, loc)
    return operand


def _fold(s: str, loc: int, toks: ParseResults) -> Node:
    node = toks[0]
    for index in range(1, len(toks), 2):
        node = BinOp(toks[index], node, toks[index + 1], loc)
    return node


def make_grammar() -> Grammar:
    lparen = Suppress("(")
    rparen = Suppress(")")
    comma = Suppress(",")
    arrow = Suppress("->")
    colon = Suppress(":")

    keyword = MatchFirst([Keyword(k) for k in KEYWORDS])
    name = (~keyword + Word(alphas + "_", alphanums + "_")).set_name("name")
    integer = Word(nums).set_name("integer")

    expr = Forward().set_name("polynomial")
    variable = name.copy().set_parse_action(_ident)
    literal = integer.copy().set_parse_action(_int)
    atom = literal | variable | (lparen + expr + rparen)
    power = (atom + Optional(Suppress("^") + literal)).set_parse_action(_power)
    unary = (ZeroOrMore(Literal("-")) + power).set_parse_action(_unary)
    product = (unary + ZeroOrMore(Literal("*") + unary)).set_parse_action(_fold)
    total = (product + ZeroOrMore((Literal("+") | Literal("-")) + product)).set_parse_action(_fold)
    expr <<= total

    poly_list = Group(Optional(expr + ZeroOrMore(comma + expr)))
    label = name.copy().set_parse_action(_ident)
    assignment = Group(label + arrow + expr)
    assignments = Group(assignment + ZeroOrMore(comma + assignment))

    field_stmt = Keyword("field") + literal("p")
    ring_stmt = (
        Keyword("ring")
        + label("name")
        + Keyword("vars")
        + Group(OneOrMore(label))("vars")
        + Optional(Keyword("mod") + lparen + poly_list("relations") + rparen)
    )
    endo_stmt = Keyword("endo") + label("name") + Keyword("on") + label("ring") + colon + assignments("images")
    map_stmt = (
        Keyword("map")
        + label("name")
        + colon
        + label("source")
        + arrow
        + label("target")
        + colon
        + assignments("images")
    )
    assume_stmt = Keyword("assume") + (Keyword("flat") | Keyword("cm"))("kind") + label("name")
    statement = (field_stmt | ring_stmt | endo_stmt | map_stmt | assume_stmt).set_name("statement")

    ideal = (lparen + poly_list + rparen + StringEnd()) | (poly_list + StringEnd())

    return Grammar(statement=statement, polynomial=expr, ideal=ideal)


GRAMMAR = make_grammar()
