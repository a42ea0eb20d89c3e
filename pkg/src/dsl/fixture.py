"""Fixture files: parsing `.lad` text into rings, endomorphisms and maps, and printing it back."""

import logging
from dataclasses import dataclass
from dataclasses import field as dataclass_field
from pathlib import Path
from typing import Dict, FrozenSet, Iterable, List, Optional, Tuple, Union

from pyparsing import ParseBaseException, ParseResults

from src.algebra.field import PrimeField
from src.algebra.polynomial import MAX_EXPONENT, Polynomial, PolynomialRing
from src.config import DEFAULT_LIMITS
from src.dsl.grammar import GRAMMAR, BinOp, Ident, IntLit, Neg, Node, Power
from src.dynamics import Endomorphism, RingMap
from src.exceptions import (
    FixtureSemanticError,
    FixtureSyntaxError,
    ResourceExceeded,
    ValidationFailed,
)
from src.ideals import LocalIdeal, LocalRingPresentation

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class FixtureFile:
    field: Optional[PrimeField] = None
    rings: Tuple[LocalRingPresentation, ...] = ()
    endos: Tuple[Endomorphism, ...] = ()
    maps: Tuple[RingMap, ...] = ()
    flat: FrozenSet[str] = frozenset()
    cm: FrozenSet[str] = frozenset()

    def is_empty(self) -> bool:
        return self.field is None and not (self.rings or self.endos or self.maps)

    def ring(self, name: str) -> LocalRingPresentation:
        for ring in self.rings:
            if ring.name == name:
                return ring
        raise ValidationFailed(f"No ring named {name!r} in the fixture")

    def endo(self, name: str) -> Endomorphism:
        for endo in self.endos:
            if endo.name == name:
                return endo
        raise ValidationFailed(f"No endomorphism named {name!r} in the fixture")

    def ring_map(self, name: str) -> RingMap:
        for ring_map in self.maps:
            if ring_map.name == name:
                return ring_map
        raise ValidationFailed(f"No map named {name!r} in the fixture")

    def endos_on(self, ring: LocalRingPresentation) -> List[Endomorphism]:
        return [endo for endo in self.endos if endo.ring == ring]


@dataclass
class _Builder:
    """Mutable state while reading a fixture line by line."""

    max_degree: int
    field: Optional[PrimeField] = None
    rings: Dict[str, LocalRingPresentation] = dataclass_field(default_factory=dict)
    endos: Dict[str, Endomorphism] = dataclass_field(default_factory=dict)
    maps: Dict[str, RingMap] = dataclass_field(default_factory=dict)
    flat: List[str] = dataclass_field(default_factory=list)
    cm: List[str] = dataclass_field(default_factory=list)
    line: int = 0

    def error(self, message: str, loc: int = 0, token: Optional[str] = None) -> FixtureSemanticError:
        return FixtureSemanticError(message, line=self.line, column=loc + 1, token=token)

    def claim(self, name: Ident) -> None:
        if name.name in self.rings or name.name in self.endos or name.name in self.maps:
            raise self.error(f"{name.name} is already declared", name.loc, name.name)

    def require_field(self, loc: int) -> PrimeField:
        if self.field is None:
            raise self.error("no field declared; start the file with `field <p>`", loc)
        return self.field

    def lookup_ring(self, name: Ident) -> LocalRingPresentation:
        ring = self.rings.get(name.name)
        if ring is None:
            raise self.error(f"undeclared ring {name.name}", name.loc, name.name)
        return ring

    # ------------------------------------------------------------------
    # polynomial expressions
    # ------------------------------------------------------------------
    def compile(self, node: Node, ring: PolynomialRing) -> Polynomial:
        if isinstance(node, IntLit):
            return ring.constant(node.value)
        if isinstance(node, Ident):
            if node.name not in ring.variables:
                raise self.error(f"{node.name} is not a variable of this ring", node.loc, node.name)
            return ring.variable(node.name)
        if isinstance(node, Neg):
            return -self.compile(node.operand, ring)
        if isinstance(node, Power):
            return self._power(node, ring)
        if isinstance(node, BinOp):
            lhs = self.compile(node.lhs, ring)
            rhs = self.compile(node.rhs, ring)
            try:
                if node.op == "+":
                    return lhs + rhs
                if node.op == "-":
                    return lhs - rhs
                return lhs * rhs
            except ResourceExceeded as exc:
                raise self.error(exc.message, node.loc, node.op) from exc
        raise TypeError(f"Unexpected node {node!r}")

    def _power(self, node: Power, ring: PolynomialRing) -> Polynomial:
        base = self.compile(node.base, ring)
        exponent = node.exponent.value
        token = str(exponent)
        if exponent > MAX_EXPONENT:
            raise self.error(f"exponent {exponent} exceeds 2^32-1", node.exponent.loc, token)
        if len(base) == 1:
            ((mono, coeff),) = base.terms
            exps = tuple(e * exponent for e in mono)
            if any(e > MAX_EXPONENT for e in exps):
                raise self.error(f"exponent {exponent} overflows a monomial", node.exponent.loc, token)
            return ring.monomial(exps, pow(coeff, exponent, ring.p))
        if exponent > self.max_degree:
            raise self.error(
                f"exponent {exponent} on a non-monomial exceeds the degree cap {self.max_degree}",
                node.exponent.loc,
                token,
            )
        try:
            return base**exponent
        except ResourceExceeded as exc:
            raise self.error(exc.message, node.exponent.loc, token) from exc

    # ------------------------------------------------------------------
    # statements
    # ------------------------------------------------------------------
    def statement(self, toks: ParseResults) -> None:
        kind = toks[0]
        if kind == "field":
            self._field(toks["p"])
        elif kind == "ring":
            self._ring(toks["name"], list(toks["vars"]), list(toks.get("relations", [])))
        elif kind == "endo":
            self._endo(toks["name"], toks["ring"], toks["images"])
        elif kind == "map":
            self._map(toks["name"], toks["source"], toks["target"], toks["images"])
        else:
            self._assume(toks["kind"], toks["name"])

    def _field(self, p: IntLit) -> None:
        if self.field is not None:
            raise self.error("field already declared", p.loc, str(p.value))
        try:
            self.field = PrimeField(p.value)
        except ValueError as exc:
            raise self.error(str(exc), p.loc, str(p.value)) from None

    def _ring(self, name: Ident, variables: List[Ident], relations: List[Node]) -> None:
        field_ = self.require_field(name.loc)
        self.claim(name)
        seen = set()
        for var in variables:
            if var.name in seen:
                raise self.error(f"variable {var.name} listed twice", var.loc, var.name)
            seen.add(var.name)
        ring = PolynomialRing(field_, tuple(var.name for var in variables))
        polys = tuple(self.compile(node, ring) for node in relations)
        try:
            self.rings[name.name] = LocalRingPresentation(name.name, ring, polys)
        except ValidationFailed as exc:
            raise self.error(exc.message, name.loc, name.name) from exc

    def _images(
        self,
        source: LocalRingPresentation,
        target: LocalRingPresentation,
        assignments: Iterable[ParseResults],
    ) -> Dict[str, Polynomial]:
        images: Dict[str, Polynomial] = {}
        last_loc = 0
        for var, node in assignments:
            last_loc = var.loc
            if var.name not in source.variables:
                raise self.error(f"{var.name} is not a variable of {source.name}", var.loc, var.name)
            if var.name in images:
                raise self.error(f"{var.name} is assigned twice", var.loc, var.name)
            images[var.name] = self.compile(node, target.ring)
        missing = [v for v in source.variables if v not in images]
        if missing:
            raise self.error(f"no image given for {', '.join(missing)}", last_loc)
        return images

    def _endo(self, name: Ident, ring_name: Ident, assignments: ParseResults) -> None:
        self.claim(name)
        ring = self.lookup_ring(ring_name)
        images = self._images(ring, ring, assignments)
        try:
            self.endos[name.name] = Endomorphism.on(ring, images, name.name)
        except ValidationFailed as exc:
            raise self.error(exc.message, name.loc, name.name) from exc

    def _map(self, name: Ident, source_name: Ident, target_name: Ident, assignments: ParseResults) -> None:
        self.claim(name)
        source = self.lookup_ring(source_name)
        target = self.lookup_ring(target_name)
        images = self._images(source, target, assignments)
        try:
            self.maps[name.name] = RingMap.from_mapping(source, target, images, name.name)
        except ValidationFailed as exc:
            raise self.error(exc.message, name.loc, name.name) from exc

    def _assume(self, kind: str, name: Ident) -> None:
        if kind == "flat":
            if name.name not in self.maps:
                raise self.error(f"undeclared map {name.name}", name.loc, name.name)
            self.flat.append(name.name)
        else:
            if name.name not in self.rings:
                raise self.error(f"undeclared ring {name.name}", name.loc, name.name)
            self.cm.append(name.name)

    def result(self) -> FixtureFile:
        return FixtureFile(
            field=self.field,
            rings=tuple(self.rings.values()),
            endos=tuple(self.endos.values()),
            maps=tuple(self.maps.values()),
            flat=frozenset(self.flat),
            cm=frozenset(self.cm),
        )


def _offending_token(text: str, loc: int) -> Optional[str]:
    rest = text[loc:].split()
    return rest[0] if rest else None


def _syntax_error(exc: ParseBaseException, text: str, line: int) -> FixtureSyntaxError:
    return FixtureSyntaxError(exc.msg, line=line, column=exc.loc + 1, token=_offending_token(text, exc.loc))


def parse(text: str, max_degree: int = DEFAULT_LIMITS.max_degree) -> FixtureFile:
    builder = _Builder(max_degree=max_degree)
    for number, raw in enumerate(text.splitlines(), start=1):
        builder.line = number
        content = raw.split("#", 1)[0]
        if not content.strip():
            continue
        try:
            toks = GRAMMAR.statement.parse_string(content, parse_all=True)
            builder.statement(toks)
        except ParseBaseException as exc:
            raise _syntax_error(exc, content, number) from None
        except RecursionError:
            raise FixtureSyntaxError("expression nested too deeply", line=number, column=1) from None
    fixture = builder.result()
    logger.debug(
        "Parsed fixture",
        extra={"status": f"{len(fixture.rings)} rings, {len(fixture.endos)} endos, {len(fixture.maps)} maps"},
    )
    return fixture


def parse_bytes(data: bytes, max_degree: int = DEFAULT_LIMITS.max_degree) -> FixtureFile:
    try:
        text = data.decode("utf-8")
    except UnicodeDecodeError as exc:
        before = data[: exc.start]
        line = before.count(b"\n") + 1
        column = exc.start - (before.rfind(b"\n") + 1) + 1
        raise FixtureSyntaxError("input is not valid UTF-8", line=line, column=column) from None
    return parse(text, max_degree)


def parse_file(path: Union[str, Path], max_degree: int = DEFAULT_LIMITS.max_degree) -> FixtureFile:
    return parse_bytes(Path(path).read_bytes(), max_degree)


def parse_ideal(
    text: str,
    ring: LocalRingPresentation,
    max_degree: int = DEFAULT_LIMITS.max_degree,
) -> LocalIdeal:
    """An ideal of ``ring`` written as "(g1, g2, ...)"; "()" is the zero ideal."""
    try:
        toks = GRAMMAR.ideal.parse_string(text, parse_all=True)
    except ParseBaseException as exc:
        raise _syntax_error(exc, text, 1) from None
    except RecursionError:
        raise FixtureSyntaxError("expression nested too deeply", line=1, column=1) from None
    builder = _Builder(max_degree=max_degree, field=ring.field, line=1)
    try:
        generators = tuple(builder.compile(node, ring.ring) for node in toks[0])
    except RecursionError:
        raise FixtureSyntaxError("expression nested too deeply", line=1, column=1) from None
    try:
        return LocalIdeal(ring, generators)
    except ValidationFailed as exc:
        raise FixtureSemanticError(exc.message, line=1, column=1) from exc


def _format_ring(ring: LocalRingPresentation) -> str:
    line = f"ring {ring.name} vars {' '.join(ring.variables)}"
    if ring.defining_ideal:
        line += f" mod ({', '.join(str(g) for g in ring.defining_ideal)})"
    return line


def _format_images(ring_map: RingMap) -> str:
    return ", ".join(f"{var} -> {image}" for var, image in ring_map.image_map().items())


def format_fixture(fixture: FixtureFile) -> str:
    """Canonical text that parses back to an equal FixtureFile."""
    lines: List[str] = []
    if fixture.field is not None:
        lines.append(f"field {fixture.field.p}")
    lines.extend(_format_ring(ring) for ring in fixture.rings)
    lines.extend(f"endo {endo.name} on {endo.ring.name} : {_format_images(endo)}" for endo in fixture.endos)
    lines.extend(
        f"map {m.name} : {m.source.name} -> {m.target.name} : {_format_images(m)}" for m in fixture.maps
    )
    lines.extend(f"assume flat {name}" for name in sorted(fixture.flat))
    lines.extend(f"assume cm {name}" for name in sorted(fixture.cm))
    return "\n".join(lines) + ("\n" if lines else "")
