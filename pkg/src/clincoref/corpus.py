"""Documents, stand-off annotations, and the concept/chain file formats.

Text is addressed by (line, token) coordinates: line numbers are 1-based,
token indices are 0-based within their line. A token is a maximal run of
non-whitespace characters. Concept and chain files refer to the text only
through these coordinates, never through character offsets, so the raw text
is kept verbatim alongside the token grid.

File grammars (one record per line, fixed field order):

    concept line:  c="<text>" <sl>:<st> <el>:<et>||t="<type>"
    chain line:    c="<text>" <sl>:<st> <el>:<et>||c="..." ...||t="coref <type>"

Quoted concept text is compared against the spanned tokens case-insensitively
because concept files conventionally lowercase it.
"""

from __future__ import annotations

import re
from dataclasses import dataclass


class CorpusError(Exception):
    """Base class for document/annotation format errors."""


class MalformedLine(CorpusError):
    def __init__(self, line_no: int, text: str, why: str = "does not match the line grammar"):
        self.line_no = line_no
        self.text = text
        super().__init__(f"line {line_no}: {why}: {text!r}")


class SpanOutOfRange(CorpusError):
    def __init__(self, line_no: int | None, detail: str):
        self.line_no = line_no
        where = f"line {line_no}: " if line_no is not None else ""
        super().__init__(f"{where}{detail}")


class TextMismatch(CorpusError):
    def __init__(self, line_no: int, expected: str, found: str):
        self.line_no = line_no
        self.expected = expected
        self.found = found
        super().__init__(
            f"line {line_no}: annotated text {expected!r} does not match spanned tokens {found!r}"
        )


class SingletonChain(CorpusError):
    def __init__(self, line_no: int, text: str):
        self.line_no = line_no
        super().__init__(f"line {line_no}: chain has fewer than two mentions: {text!r}")


class OverlappingSpans(CorpusError):
    pass


class InvalidPosition(CorpusError):
    pass


@dataclass(frozen=True, order=True)
class Position:
    """A (line, token) address. Ordering is document order."""

    line: int
    token: int

    def __str__(self) -> str:
        return f"{self.line}:{self.token}"


@dataclass(frozen=True)
class SentenceSpan:
    start: Position
    end: Position


# Tokens that end in '.' but never end a sentence.
_NON_TERMINAL_ABBREVIATIONS = frozenset({"dr.", "mr.", "mrs.", "ms.", "m.d.", "pt."})
_SINGLE_INITIAL = re.compile(r"^[A-Z]\.$")


def _ends_sentence(token: str) -> bool:
    if not token or token[-1] not in ".!?":
        return False
    if token.lower() in _NON_TERMINAL_ABBREVIATIONS:
        return False
    if _SINGLE_INITIAL.match(token):
        return False
    return True


class Document:
    """An immutable tokenized document.

    ``lines`` holds the token grid; ``raw_text`` the original text,
    byte-for-byte. Instances are safe to share across workers: nothing is
    mutated after construction except an internal sentence cache whose
    entries are idempotent.
    """

    __slots__ = ("raw_text", "lines", "_offsets", "_n_tokens", "_sentences")

    def __init__(self, raw_text: str):
        self.raw_text = raw_text
        self.lines: tuple[tuple[str, ...], ...] = tuple(
            tuple(line.split()) for line in raw_text.split("\n")
        )
        offsets = []
        total = 0
        for line in self.lines:
            offsets.append(total)
            total += len(line)
        self._offsets: tuple[int, ...] = tuple(offsets)
        self._n_tokens = total
        self._sentences: dict[int, tuple[SentenceSpan, ...]] = {}

    @property
    def n_tokens(self) -> int:
        return self._n_tokens

    def has_position(self, pos: Position) -> bool:
        return 1 <= pos.line <= len(self.lines) and 0 <= pos.token < len(self.lines[pos.line - 1])

    def token_at(self, pos: Position) -> str:
        if not self.has_position(pos):
            raise InvalidPosition(f"no token at {pos}")
        return self.lines[pos.line - 1][pos.token]

    def global_index(self, pos: Position) -> int:
        """Rank of a position in reading order, 0-based over all tokens."""
        if not self.has_position(pos):
            raise InvalidPosition(f"no token at {pos}")
        return self._offsets[pos.line - 1] + pos.token

    def position_at(self, index: int) -> Position:
        if not 0 <= index < self._n_tokens:
            raise InvalidPosition(f"global token index {index} out of range")
        lo, hi = 0, len(self.lines) - 1
        while lo < hi:
            mid = (lo + hi + 1) // 2
            if self._offsets[mid] <= index:
                lo = mid
            else:
                hi = mid - 1
        return Position(lo + 1, index - self._offsets[lo])

    def token_at_index(self, index: int) -> str:
        pos = self.position_at(index)
        return self.lines[pos.line - 1][pos.token]

    def tokens_in_span(self, start: Position, end: Position) -> list[str]:
        if not self.has_position(start) or not self.has_position(end):
            raise SpanOutOfRange(None, f"span {start} {end} addresses a missing token")
        gs, ge = self.global_index(start), self.global_index(end)
        if gs > ge:
            raise SpanOutOfRange(None, f"span {start} {end} ends before it starts")
        return [self.token_at_index(i) for i in range(gs, ge + 1)]

    def span_text(self, start: Position, end: Position) -> str:
        return " ".join(self.tokens_in_span(start, end))

    def sentences_on_line(self, line_no: int) -> tuple[SentenceSpan, ...]:
        cached = self._sentences.get(line_no)
        if cached is not None:
            return cached
        tokens = self.lines[line_no - 1]
        spans = []
        start = 0
        for idx, token in enumerate(tokens):
            if _ends_sentence(token):
                spans.append(SentenceSpan(Position(line_no, start), Position(line_no, idx)))
                start = idx + 1
        if start < len(tokens):
            spans.append(SentenceSpan(Position(line_no, start), Position(line_no, len(tokens) - 1)))
        result = tuple(spans)
        self._sentences[line_no] = result
        return result

    def __repr__(self) -> str:  # pragma: no cover
        return f"Document(lines={len(self.lines)}, tokens={self._n_tokens})"


@dataclass(frozen=True)
class Mention:
    """A typed concept span with its annotated surface text."""

    id: int
    start: Position
    end: Position
    mtype: str
    text: str

    @property
    def is_pronoun_type(self) -> bool:
        return self.mtype.lower() == "pronoun"

    @property
    def is_person_type(self) -> bool:
        return self.mtype.lower() in ("person", "people")

    def words(self) -> list[str]:
        return self.text.split()


def mention_sort_key(m: Mention) -> tuple:
    return (m.start, m.end, m.id)


@dataclass(frozen=True)
class Chain:
    """Two or more co-referent mentions, in document order."""

    mentions: tuple[Mention, ...]
    ctype: str


def tokenize(raw_text: str) -> Document:
    """Split text into the (line, token) grid on whitespace boundaries."""
    return Document(raw_text)


_CONCEPT_RE = re.compile(r'^c="([^"]*)" (\d+):(\d+) (\d+):(\d+)\|\|t="([^"]+)"$')
_CHAIN_GROUP_RE = re.compile(r'^c="([^"]*)" (\d+):(\d+) (\d+):(\d+)$')
_CHAIN_TYPE_RE = re.compile(r'^t="coref (.+)"$')


def _resolve_span(
    doc: Document, line_no: int, text: str, sl: str, st: str, el: str, et: str
) -> tuple[Position, Position]:
    start = Position(int(sl), int(st))
    end = Position(int(el), int(et))
    if start > end:
        raise SpanOutOfRange(line_no, f"span {start} {end} ends before it starts")
    if not doc.has_position(start) or not doc.has_position(end):
        raise SpanOutOfRange(line_no, f"span {start} {end} addresses a missing token")
    spanned = doc.span_text(start, end)
    if spanned.lower() != text.lower():
        raise TextMismatch(line_no, text, spanned)
    return start, end


def _records(text: str):
    for line_no, raw in enumerate(text.split("\n"), start=1):
        line = raw.rstrip("\r")
        if line.strip():
            yield line_no, line


def parse_concepts(concept_text: str, doc: Document) -> list[Mention]:
    """Parse a concept file against ``doc``.

    Mentions get ordinal ids in file order. Every span is checked to exist
    and its quoted text to match the spanned tokens (case-insensitively).
    """
    mentions: list[Mention] = []
    for line_no, line in _records(concept_text):
        m = _CONCEPT_RE.match(line)
        if m is None:
            raise MalformedLine(line_no, line)
        text, sl, st, el, et, mtype = m.groups()
        start, end = _resolve_span(doc, line_no, text, sl, st, el, et)
        mentions.append(Mention(id=len(mentions), start=start, end=end, mtype=mtype, text=text))
    return mentions


def parse_chains(chain_text: str, doc: Document) -> list[Chain]:
    """Parse a chain file against ``doc``.

    Each chain needs at least two distinct member spans; members are
    returned sorted by position. Duplicate spans within one chain collapse
    to a single member.
    """
    chains: list[Chain] = []
    next_id = 0
    for line_no, line in _records(chain_text):
        parts = line.split("||")
        if len(parts) < 2:
            raise MalformedLine(line_no, line)
        type_match = _CHAIN_TYPE_RE.match(parts[-1])
        if type_match is None:
            raise MalformedLine(line_no, line, "missing or malformed chain type group")
        ctype = type_match.group(1)
        members: list[Mention] = []
        seen_spans: set[tuple[Position, Position]] = set()
        for part in parts[:-1]:
            g = _CHAIN_GROUP_RE.match(part)
            if g is None:
                raise MalformedLine(line_no, line, f"malformed mention group {part!r}")
            text, sl, st, el, et = g.groups()
            start, end = _resolve_span(doc, line_no, text, sl, st, el, et)
            if (start, end) in seen_spans:
                continue
            seen_spans.add((start, end))
            members.append(Mention(id=next_id, start=start, end=end, mtype=ctype, text=text))
            next_id += 1
        if len(members) < 2:
            raise SingletonChain(line_no, line)
        members.sort(key=mention_sort_key)
        chains.append(Chain(tuple(members), ctype))
    return chains


def emit_chains(chains: list[Chain], doc: Document) -> str:
    """Serialize chains, ordered by the position of each chain's first mention.

    Output is byte-deterministic and ends with a trailing newline when any
    chain is emitted; an empty chain list yields an empty string.
    """
    lines = []
    for chain in sorted(chains, key=lambda c: mention_sort_key(min(c.mentions, key=mention_sort_key))):
        members = sorted(chain.mentions, key=mention_sort_key)
        for m in members:
            if not doc.has_position(m.start) or not doc.has_position(m.end):
                raise SpanOutOfRange(None, f"chain mention span {m.start} {m.end} not in document")
        groups = [f'c="{m.text}" {m.start} {m.end}' for m in members]
        groups.append(f't="coref {chain.ctype}"')
        lines.append("||".join(groups))
    if not lines:
        return ""
    return "\n".join(lines) + "\n"


def tokens_between(a: Mention, b: Mention, doc: Document) -> int:
    """Count tokens strictly after ``a`` and strictly before ``b``.

    ``a`` must precede ``b``; the count runs across line breaks.
    """
    ga_end = doc.global_index(a.end)
    gb_start = doc.global_index(b.start)
    if gb_start <= ga_end:
        raise OverlappingSpans(f"spans {a.start}-{a.end} and {b.start}-{b.end} overlap or are out of order")
    return gb_start - ga_end - 1


def sentence_of(pos: Position, doc: Document) -> SentenceSpan:
    """The sentence containing ``pos``.

    A sentence ends at a token whose final character is '.', '!' or '?'
    (with a short abbreviation exception list) or at the end of the line;
    sentences therefore never cross lines, and every token belongs to
    exactly one sentence.
    """
    if not doc.has_position(pos):
        raise InvalidPosition(f"no token at {pos}")
    for span in doc.sentences_on_line(pos.line):
        if span.start.token <= pos.token <= span.end.token:
            return span
    raise InvalidPosition(f"no sentence covers {pos}")  # pragma: no cover


def in_sentence(m: Mention, span: SentenceSpan) -> bool:
    """True when the mention starts inside the sentence span."""
    return span.start <= m.start <= span.end
