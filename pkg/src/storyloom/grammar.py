"""Tracery-style grammar engine: parsing, expansion, and codon decoding.

A grammar document is a JSON object mapping rule names to lists of
alternative strings.  Inside an alternative:

* ``#name#`` expands the rule (or earlier binding) ``name``;
* ``#name.mod1.mod2#`` applies modifiers (``a``, ``capitalize``, ``s``,
  ``ed``) to the expanded text, leftmost first;
* ``[bound:#name#]`` expands ``name`` once, emits nothing, and freezes
  the result so later ``#bound#`` references reuse it verbatim;
* a trailing ``@TAG1,TAG2`` suffix (uppercase tag names) attaches
  feasibility tags to the alternative;
* everything else is literal text.

Expansion is depth-first left-to-right.  Alternatives are chosen either
by a seeded PRNG (:func:`expand`) or by a codon genome
(:func:`decode`); both record their choices so a derivation can be
replayed exactly.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass
from typing import Sequence, Union

from .errors import StoryloomError
from .rng import SplitMix64

DEFAULT_MAX_DEPTH = 32
DEFAULT_MAX_WRAPS = 3

MODIFIERS = ("a", "capitalize", "s", "ed")

_VOWELS = "aeiou"

# Room tags a storylet tag may appear under.  The relation is symmetric
# (if A-tagged text fits B rooms, B-tagged text fits A rooms) and every
# tag fits its own room; lush growth never shows up in snow.
DEFAULT_COMPAT: dict[str, frozenset[str]] = {
    "TUNNEL": frozenset({"TUNNEL", "CAVERN", "SNOW"}),
    "CAVERN": frozenset({"CAVERN", "TUNNEL", "STREAM", "VEGETATION"}),
    "STREAM": frozenset({"STREAM", "CAVERN", "VEGETATION"}),
    "VEGETATION": frozenset({"VEGETATION", "STREAM", "CAVERN"}),
    "SNOW": frozenset({"SNOW", "TUNNEL"}),
}

_TAG_SUFFIX_RE = re.compile(r"@([A-Z][A-Z0-9_]*(?:,[A-Z][A-Z0-9_]*)*)$")
_BINDING_RE = re.compile(r"\[([^\[\]:#\s]+):#([^#\]]+)#\]")


class ParseError(StoryloomError):
    """Malformed grammar document syntax."""

    def __init__(self, message: str, position: int | None = None):
        self.message = message
        self.position = position
        where = f" at position {position}" if position is not None else ""
        super().__init__(f"{message}{where}")


class DanglingSymbolError(StoryloomError):
    """Symbol references that resolve to neither a rule nor a binding."""

    def __init__(self, names: Sequence[str]):
        self.names = tuple(names)
        super().__init__(
            "dangling symbol reference(s): " + ", ".join(sorted(self.names))
        )


class EmptyInputError(StoryloomError):
    """A modifier was applied to empty text."""


class DepthExceededError(StoryloomError):
    """Derivation depth ran past the limit (runaway recursive grammar)."""


class InvalidMappingError(StoryloomError):
    """A genome could not be decoded within the wrap/depth limits."""


class UnknownTagError(StoryloomError):
    """A storylet tag has no entry in the compatibility table."""

    def __init__(self, tag: str):
        self.tag = tag
        super().__init__(f"tag {tag!r} is not in the compatibility table")


@dataclass(frozen=True)
class SymbolRef:
    """Reference to a rule or binding, with an optional modifier chain."""

    name: str
    modifiers: tuple[str, ...] = ()


@dataclass(frozen=True)
class Binding:
    """``[name:#ref#]`` — expand once, freeze, emit nothing."""

    name: str
    ref: SymbolRef


Part = Union[str, SymbolRef, Binding]  # str parts are literals


@dataclass(frozen=True)
class Alternative:
    parts: tuple[Part, ...]
    tags: frozenset[str] = frozenset()


@dataclass
class Grammar:
    """Parsed grammar.  Treated as immutable once constructed; safe to
    share across concurrent expansions."""

    rules: dict[str, tuple[Alternative, ...]]
    start_symbol: str = "origin"

    def symbols(self) -> tuple[str, ...]:
        return tuple(self.rules)


@dataclass(frozen=True)
class Storylet:
    """A fully expanded text plus everything needed to audit it.

    ``derivation_choices`` is the ordered (symbol, alternative-index)
    trace; replaying it through :func:`replay` reproduces ``text``
    byte for byte.
    """

    text: str
    tags: frozenset[str]
    derivation_choices: tuple[tuple[str, int], ...]


# ---------------------------------------------------------------------------
# Modifiers
# ---------------------------------------------------------------------------


def apply_modifier(text: str, modifier: str) -> str:
    """Apply one modifier to expanded text.

    ``a`` prefixes an article chosen by first letter, ``capitalize``
    uppercases the first character, ``s`` and ``ed`` build the regular
    plural / past tense.  Irregular forms are the grammar author's
    responsibility.
    """
    if not text:
        raise EmptyInputError(f"cannot apply modifier {modifier!r} to empty text")
    if modifier == "a":
        article = "an " if text[0].lower() in _VOWELS else "a "
        return article + text
    if modifier == "capitalize":
        return text[0].upper() + text[1:]
    if modifier == "s":
        if len(text) >= 2 and text.endswith("y") and text[-2].lower() not in _VOWELS:
            return text[:-1] + "ies"
        if text.endswith(("s", "x", "z", "ch", "sh")):
            return text + "es"
        return text + "s"
    if modifier == "ed":
        if text.endswith("e"):
            return text + "d"
        if len(text) >= 2 and text.endswith("y") and text[-2].lower() not in _VOWELS:
            return text[:-1] + "ied"
        return text + "ed"
    raise ValueError(f"unknown modifier {modifier!r}")


def _apply_chain(text: str, modifiers: tuple[str, ...]) -> str:
    for m in modifiers:
        text = apply_modifier(text, m)
    return text


# ---------------------------------------------------------------------------
# Parsing
# ---------------------------------------------------------------------------


def _validate_name(name: str, what: str, position: int | None = None) -> None:
    if not name:
        raise ParseError(f"empty {what}", position)
    if "#" in name or "." in name or any(c.isspace() for c in name):
        raise ParseError(
            f"{what} {name!r} may not contain '#', '.', or whitespace", position
        )


def _parse_ref(body: str, position: int) -> SymbolRef:
    """Parse the inside of ``#...#`` into a name and modifier chain."""
    head, *mods = body.split(".")
    if not head:
        raise ParseError("empty symbol name in reference", position)
    if "#" in head or any(c.isspace() for c in head):
        raise ParseError(f"bad symbol name {head!r}", position)
    for m in mods:
        if m not in MODIFIERS:
            raise ParseError(
                f"unknown modifier {m!r} (supported: {', '.join(MODIFIERS)})",
                position,
            )
    return SymbolRef(head, tuple(mods))


def parse_alternative(text: str) -> Alternative:
    """Parse one alternative string into parts and tags."""
    tags: frozenset[str] = frozenset()
    m = _TAG_SUFFIX_RE.search(text)
    if m:
        tags = frozenset(m.group(1).split(","))
        text = text[: m.start()]

    parts: list[Part] = []
    literal: list[str] = []
    i = 0
    n = len(text)
    while i < n:
        ch = text[i]
        if ch == "#":
            end = text.find("#", i + 1)
            if end < 0:
                raise ParseError("unterminated '#' reference", i)
            if literal:
                parts.append("".join(literal))
                literal = []
            parts.append(_parse_ref(text[i + 1 : end], i))
            i = end + 1
        elif ch == "[":
            bm = _BINDING_RE.match(text, i)
            if bm is None:
                # Not binding syntax; keep the bracket as literal text.
                literal.append(ch)
                i += 1
                continue
            if literal:
                parts.append("".join(literal))
                literal = []
            name = bm.group(1)
            _validate_name(name, "binding name", i)
            parts.append(Binding(name, _parse_ref(bm.group(2), i)))
            i = bm.end()
        else:
            literal.append(ch)
            i += 1
    if literal:
        parts.append("".join(literal))
    return Alternative(tuple(parts), tags)


def parse_grammar(source: str, start_symbol: str = "origin") -> Grammar:
    """Parse a grammar document (JSON text) into a :class:`Grammar`.

    All dangling symbol references are collected and reported together,
    so one pass over the error gives the full repair list.
    """
    try:
        doc = json.loads(source)
    except json.JSONDecodeError as e:
        raise ParseError(f"invalid JSON: {e.msg}", e.pos) from e
    if not isinstance(doc, dict):
        raise ParseError("grammar document must be a JSON object of rules")

    rules: dict[str, tuple[Alternative, ...]] = {}
    for name, alts in doc.items():
        _validate_name(name, "rule name")
        if not isinstance(alts, list) or not alts:
            raise ParseError(f"rule {name!r} must map to a non-empty array")
        parsed = []
        for alt in alts:
            if not isinstance(alt, str):
                raise ParseError(f"rule {name!r} has a non-string alternative")
            try:
                parsed.append(parse_alternative(alt))
            except ParseError as e:
                raise ParseError(
                    f"in rule {name!r}, alternative {alt!r}: {e.message}", e.position
                ) from e
        rules[name] = tuple(parsed)

    grammar = Grammar(rules, start_symbol)
    dangling = find_dangling(grammar)
    if dangling:
        raise DanglingSymbolError(dangling)
    return grammar


def find_dangling(grammar: Grammar) -> list[str]:
    """Names referenced anywhere that no rule or binding can supply."""
    bound = {
        part.name
        for alts in grammar.rules.values()
        for alt in alts
        for part in alt.parts
        if isinstance(part, Binding)
    }
    known = set(grammar.rules) | bound
    missing = set()
    for alts in grammar.rules.values():
        for alt in alts:
            for part in alt.parts:
                if isinstance(part, SymbolRef) and part.name not in known:
                    missing.add(part.name)
                elif isinstance(part, Binding) and part.ref.name not in known:
                    missing.add(part.ref.name)
    return sorted(missing)


# ---------------------------------------------------------------------------
# Serialization (inverse of parsing)
# ---------------------------------------------------------------------------


def _unparse_part(part: Part) -> str:
    if isinstance(part, str):
        return part
    if isinstance(part, SymbolRef):
        return "#" + ".".join((part.name, *part.modifiers)) + "#"
    inner = "#" + ".".join((part.ref.name, *part.ref.modifiers)) + "#"
    return f"[{part.name}:{inner}]"


def unparse_alternative(alt: Alternative) -> str:
    text = "".join(_unparse_part(p) for p in alt.parts)
    if alt.tags:
        text += "@" + ",".join(sorted(alt.tags))
    return text


def grammar_to_doc(grammar: Grammar) -> dict[str, list[str]]:
    return {
        name: [unparse_alternative(a) for a in alts]
        for name, alts in grammar.rules.items()
    }


def serialize_grammar(grammar: Grammar) -> str:
    """Canonical grammar-document text (sorted rule names)."""
    return json.dumps(grammar_to_doc(grammar), indent=2, sort_keys=True,
                      ensure_ascii=False) + "\n"


def load_grammar(path: str, start_symbol: str = "origin") -> Grammar:
    with open(path, encoding="utf-8") as f:
        source = f.read()
    try:
        return parse_grammar(source, start_symbol)
    except ParseError as e:
        raise ParseError(f"{path}: {e.message}", e.position) from e


def save_grammar(grammar: Grammar, path: str) -> None:
    with open(path, "w", encoding="utf-8") as f:
        f.write(serialize_grammar(grammar))


# ---------------------------------------------------------------------------
# Derivation
# ---------------------------------------------------------------------------


class _SeededChooser:
    """Choice source for expand(): one PRNG draw per choice point.

    A draw is consumed even at single-alternative points so the stream
    lines up with codon consumption in decode().
    """

    def __init__(self, seed: int):
        self._rng = SplitMix64(seed)

    def choose(self, symbol: str, n: int) -> int:
        return self._rng.below(n)


class _GenomeChooser:
    """Choice source for decode(): ``codon mod n`` per choice point.

    The cursor advances at every choice point, single-alternative ones
    included, so a point mutation shifts behavior locally rather than
    re-aligning every later choice.
    """

    def __init__(self, codons: Sequence[int], max_wraps: int):
        if len(codons) == 0:
            raise InvalidMappingError("genome must have at least one codon")
        self._codons = codons
        self._max_wraps = max_wraps
        self._cursor = 0
        self._wraps = 0

    def choose(self, symbol: str, n: int) -> int:
        if self._cursor == len(self._codons):
            if self._wraps == self._max_wraps:
                raise InvalidMappingError(
                    f"genome exhausted after {self._wraps} wrap(s)"
                )
            self._wraps += 1
            self._cursor = 0
        codon = int(self._codons[self._cursor])
        self._cursor += 1
        return codon % n


class _ReplayChooser:
    """Choice source that follows a recorded derivation trace."""

    def __init__(self, choices: Sequence[tuple[str, int]]):
        self._choices = list(choices)
        self._pos = 0

    def choose(self, symbol: str, n: int) -> int:
        if self._pos >= len(self._choices):
            raise StoryloomError("derivation trace exhausted during replay")
        name, idx = self._choices[self._pos]
        self._pos += 1
        if name != symbol or idx >= n:
            raise StoryloomError(
                f"derivation trace mismatch at {symbol!r} (recorded {name!r}/{idx})"
            )
        return idx


def _derive(grammar: Grammar, symbol: str, chooser, max_depth: int) -> Storylet:
    bindings: dict[str, str] = {}
    choices: list[tuple[str, int]] = []
    tags: set[str] = set()

    def walk(name: str, depth: int) -> str:
        if name in bindings:
            return bindings[name]
        alts = grammar.rules.get(name)
        if alts is None:
            raise DanglingSymbolError([name])
        if depth > max_depth:
            raise DepthExceededError(
                f"derivation depth exceeded {max_depth} at symbol {name!r}"
            )
        idx = chooser.choose(name, len(alts))
        choices.append((name, idx))
        alt = alts[idx]
        tags.update(alt.tags)
        out: list[str] = []
        for part in alt.parts:
            if isinstance(part, str):
                out.append(part)
            elif isinstance(part, SymbolRef):
                out.append(_apply_chain(walk(part.name, depth + 1), part.modifiers))
            else:  # Binding: expand, freeze, emit nothing
                text = _apply_chain(walk(part.ref.name, depth + 1),
                                    part.ref.modifiers)
                bindings[part.name] = text
        return "".join(out)

    text = walk(symbol, 1)
    return Storylet(text, frozenset(tags), tuple(choices))


def expand(grammar: Grammar, symbol: str, seed: int,
           max_depth: int = DEFAULT_MAX_DEPTH) -> Storylet:
    """Expand ``symbol`` with seeded-random alternative choices.

    Pure function of (grammar, symbol, seed): the same arguments always
    produce the identical storylet.
    """
    if symbol not in grammar.rules:
        raise DanglingSymbolError([symbol])
    return _derive(grammar, symbol, _SeededChooser(seed), max_depth)


def decode(grammar: Grammar, symbol: str, codons: Sequence[int],
           max_depth: int = DEFAULT_MAX_DEPTH,
           max_wraps: int = DEFAULT_MAX_WRAPS) -> Storylet:
    """Decode a codon genome into a storylet (grammatical evolution).

    Each choice point with ``n`` alternatives takes the next codon and
    selects index ``codon % n``; the genome wraps to the start at most
    ``max_wraps`` times.  Raises :class:`InvalidMappingError` when the
    genome cannot produce a finite derivation within the limits.
    """
    if symbol not in grammar.rules:
        raise DanglingSymbolError([symbol])
    chooser = _GenomeChooser(codons, max_wraps)
    try:
        return _derive(grammar, symbol, chooser, max_depth)
    except DepthExceededError as e:
        raise InvalidMappingError(str(e)) from e


def replay(grammar: Grammar, symbol: str,
           choices: Sequence[tuple[str, int]],
           max_depth: int = DEFAULT_MAX_DEPTH) -> Storylet:
    """Re-run a derivation from its recorded choices."""
    return _derive(grammar, symbol, _ReplayChooser(choices), max_depth)


# ---------------------------------------------------------------------------
# Feasibility
# ---------------------------------------------------------------------------


def check_feasibility(storylet: Storylet, room_tag: str,
                      compat: dict[str, frozenset[str]] | None = None) -> bool:
    """True iff every tag on the storylet may appear under ``room_tag``.

    Untagged storylets fit anywhere.  A storylet tag missing from the
    table is a table misconfiguration, not a mismatch, and raises
    :class:`UnknownTagError`.
    """
    if compat is None:
        compat = DEFAULT_COMPAT
    for tag in storylet.tags:
        allowed = compat.get(tag)
        if allowed is None:
            raise UnknownTagError(tag)
        if room_tag not in allowed:
            return False
    return True
