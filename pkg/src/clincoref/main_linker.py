"""Pairwise linking rules for mentions outside the person category.

Every non-person mention is compared against every other mention of the
same type and a binary decision is recorded per pair. Rules apply in a
fixed order; all detected links are kept (no transitivity reasoning here),
and when several rules accept the same pair the first one provides the
provenance tag.

Rule order: non-personal pronoun match, be-phrase match, then the three
match-by-meaning comparisons (head/synonym, concept-code, acronym) over
conditioned mentions.
"""

from __future__ import annotations

from dataclasses import dataclass

from .corpus import Document, Mention, OverlappingSpans, mention_sort_key, tokens_between
from .lexicon import Lexicon, RuleDB, are_synonyms, strip_non_letters

RULE_NONPERSONAL_PRONOUN = "NonPersonalPronoun"
RULE_BE_PHRASE = "BePhrase"
RULE_HEAD_SYNONYM = "HeadSynonym"
RULE_CONCEPT_CODE = "ConceptCode"
RULE_ACRONYM = "Acronym"
RULE_INTRODUCTION = "Introduction"
RULE_PARTIAL_PERSON = "PartialPerson"
RULE_PRONOUN = "PronounRule"
RULE_SUBJECT_WORD = "SubjectWord"
RULE_FIRST_PERSON = "FirstPerson"
RULE_SECOND_PERSON = "SecondPerson"
RULE_THIS_WORD = "ThisWord"
RULE_WHO_WORD = "WhoWord"

MAIN_LINKER_RULES = frozenset(
    {
        RULE_NONPERSONAL_PRONOUN,
        RULE_BE_PHRASE,
        RULE_HEAD_SYNONYM,
        RULE_CONCEPT_CODE,
        RULE_ACRONYM,
    }
)

NONPERSONAL_PRONOUN_WORDS = frozenset({"which", "that"})


@dataclass(frozen=True, order=True)
class Link:
    """An unordered mention pair with the rule that produced it."""

    a: int
    b: int
    rule: str

    @staticmethod
    def make(i: int, j: int, rule: str) -> "Link":
        if i == j:
            raise ValueError(f"link cannot join mention {i} to itself")
        return Link(min(i, j), max(i, j), rule)

    @property
    def pair(self) -> tuple[int, int]:
        return (self.a, self.b)


@dataclass(frozen=True)
class ConditionedMention:
    """A mention reduced to the lowercase words that carry meaning."""

    mention_id: int
    kept_words: tuple[str, ...]


def condition(m: Mention, lexicon: Lexicon) -> ConditionedMention:
    """Strip common words, known adjectives and non-letter characters.

    Each token is lowercased and reduced to letters; tokens that become
    empty or whose letter form is a common word or adjective are dropped.
    The result may be empty (for instance a bare punctuation mention).
    """
    kept = []
    for token in m.text.split():
        word = strip_non_letters(token.lower())
        if not word:
            continue
        if word in lexicon.rules.common_words or word in lexicon.synonyms.adjectives:
            continue
        kept.append(word)
    return ConditionedMention(m.id, tuple(kept))


def _prefix_length(n: int) -> int:
    # ceil(0.8 * n) without float rounding error
    return -((-4 * n) // 5)


def prefix_match(w1: str, w2: str) -> bool:
    """True when the words share their first ceil(0.8 * shorter-length) characters.

    Words shorter than two characters never match (a single letter would
    match nearly everything).
    """
    shorter = min(len(w1), len(w2))
    if shorter < 2:
        return False
    k = _prefix_length(shorter)
    return w1[:k] == w2[:k]


def word_match(w1: str, w2: str, lex: Lexicon) -> bool:
    """Prefix match or stored synonymy; reflexive for words of length >= 2."""
    return prefix_match(w1, w2) or are_synonyms(w1, w2, lex.synonyms)


def head_synonym_match(a: ConditionedMention, b: ConditionedMention, lex: Lexicon) -> bool:
    """True when every kept word of the shorter mention has a match in the other.

    Mentions with no kept words never match: a vacuous "every word matched"
    would link all-adjective mentions to everything.
    """
    if not a.kept_words or not b.kept_words:
        return False

    def covered(words: tuple[str, ...], other: tuple[str, ...]) -> bool:
        return all(any(word_match(w, v, lex) for v in other) for w in words)

    if len(a.kept_words) < len(b.kept_words):
        return covered(a.kept_words, b.kept_words)
    if len(b.kept_words) < len(a.kept_words):
        return covered(b.kept_words, a.kept_words)
    return covered(a.kept_words, b.kept_words) or covered(b.kept_words, a.kept_words)


def concept_code_match(a: ConditionedMention, b: ConditionedMention, lex: Lexicon) -> bool:
    codes_a = lex.codes.lookup(" ".join(a.kept_words))
    codes_b = lex.codes.lookup(" ".join(b.kept_words))
    return bool(codes_a & codes_b)


def _is_ordered_subsequence(word: str, letters: str) -> bool:
    it = iter(letters)
    return all(ch in it for ch in word)


def acronym_match(a: ConditionedMention, b: ConditionedMention) -> bool:
    """Match the in-order initials of a multi-word mention against a whole word.

    The word must equal the initials or be an ordered subsequence of them;
    a floor of two letters keeps one-letter fragments from linking.
    """

    def one_way(multi: ConditionedMention, other: ConditionedMention) -> bool:
        if len(multi.kept_words) < 2:
            return False
        initials = "".join(w[0] for w in multi.kept_words)
        for word in other.kept_words:
            if len(word) < 2:
                continue
            if word == initials or _is_ordered_subsequence(word, initials):
                return True
        return False

    return one_way(a, b) or one_way(b, a)


def nonpersonal_pronoun_match(p: Mention, prev: Mention, doc: Document) -> Link | None:
    """Link "which"/"that" to the immediately preceding mention when close.

    Fires only with fewer than two tokens between the mentions. No other
    pronoun is handled here.
    """
    if not p.is_pronoun_type:
        return None
    if p.text.strip().lower() not in NONPERSONAL_PRONOUN_WORDS:
        return None
    try:
        distance = tokens_between(prev, p, doc)
    except OverlappingSpans:
        return None
    if distance <= 1:
        return Link.make(prev.id, p.id, RULE_NONPERSONAL_PRONOUN)
    return None


def _words_between(left: Mention, right: Mention, doc: Document) -> list[str]:
    start = doc.global_index(left.end) + 1
    stop = doc.global_index(right.start)
    return [doc.token_at_index(i).lower() for i in range(start, stop)]


def be_phrase_match(left: Mention, right: Mention, doc: Document, rdb: RuleDB) -> Link | None:
    """Link adjacent same-type mentions separated by a "be" word or phrase."""
    if left.mtype != right.mtype:
        return None
    if doc.global_index(right.start) <= doc.global_index(left.end):
        return None
    between = _words_between(left, right, doc)
    if not between:
        return None
    stripped = [strip_non_letters(w) for w in between]
    singles = {w for w in rdb.be_phrase_words if " " not in w}
    for raw, bare in zip(between, stripped):
        if raw in singles or bare in singles:
            return Link.make(left.id, right.id, RULE_BE_PHRASE)
    for phrase in rdb.be_phrase_words:
        words = phrase.split()
        if len(words) < 2:
            continue
        for i in range(len(stripped) - len(words) + 1):
            if stripped[i : i + len(words)] == words:
                return Link.make(left.id, right.id, RULE_BE_PHRASE)
    return None


def link_nonperson(mentions: list[Mention], doc: Document, lexicon: Lexicon) -> set[Link]:
    """Run the main rule cascade over all non-person mentions.

    Pronoun-typed mentions participate (the non-personal pronoun rule needs
    them and they occupy adjacency slots) but conditioning reduces them to
    nothing, so they never match by meaning.
    """
    seq = sorted((m for m in mentions if not m.is_person_type), key=mention_sort_key)
    links: dict[tuple[int, int], Link] = {}

    def record(link: Link | None) -> None:
        if link is not None:
            links.setdefault(link.pair, link)

    for i, m in enumerate(seq):
        if i > 0 and m.is_pronoun_type:
            record(nonpersonal_pronoun_match(m, seq[i - 1], doc))

    for left, right in zip(seq, seq[1:]):
        if left.mtype == right.mtype:
            record(be_phrase_match(left, right, doc, lexicon.rules))

    conditioned = {m.id: condition(m, lexicon) for m in seq}
    for i in range(len(seq)):
        for j in range(i + 1, len(seq)):
            a, b = seq[i], seq[j]
            if a.mtype != b.mtype:
                continue
            pair = (min(a.id, b.id), max(a.id, b.id))
            if pair in links:
                continue
            ca, cb = conditioned[a.id], conditioned[b.id]
            if head_synonym_match(ca, cb, lexicon):
                links[pair] = Link.make(a.id, b.id, RULE_HEAD_SYNONYM)
            elif concept_code_match(ca, cb, lexicon):
                links[pair] = Link.make(a.id, b.id, RULE_CONCEPT_CODE)
            elif acronym_match(ca, cb):
                links[pair] = Link.make(a.id, b.id, RULE_ACRONYM)

    return set(links.values())
