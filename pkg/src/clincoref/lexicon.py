"""File-backed word tables behind the linking rules.

Four lookup layers replace external knowledge sources with deterministic,
offline tables loaded from a lexicon directory:

* :class:`RuleDB` — hand-curated word lists (common words, be-phrase words,
  personnel titles, pronoun categories, filter keywords, date patterns).
* :class:`SynonymLexicon` — symmetric word synonymy plus an adjective set.
* :class:`ConceptCodeLexicon` — normalized phrase to concept-code lookup.
* :class:`PersonnelClassifier` — decides whether a phrase names medical
  personnel, either from a gazetteer or from stored evidence snippets
  scanned for medical keywords. Evidence lookup is pluggable so a live
  search adapter can be swapped in without touching the linkers; the
  default never leaves the local table.

Table files hold one entry per line; multi-column tables are TSV;
``#``-prefixed lines are comments. All loaded objects are immutable and
safe to share across workers.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from pathlib import Path
from typing import NamedTuple, Protocol


class LexiconError(Exception):
    pass


class MissingRequiredTable(LexiconError):
    def __init__(self, path: Path):
        self.path = path
        super().__init__(f"required lexicon table missing: {path}")


class MalformedTableLine(LexiconError):
    def __init__(self, path: Path, line_no: int, text: str):
        self.path = path
        self.line_no = line_no
        super().__init__(f"{path}:{line_no}: malformed table line: {text!r}")


_PRONOUN_CATEGORIES = ("masc", "fem", "first", "second", "neutral")

# Fallback date patterns, used when date_patterns.txt is absent.
_DEFAULT_DATE_PATTERNS = (
    r"\d{4}-\d{2}-\d{2}",
    r"\d{1,2}/\d{1,2}/\d{4}",
    r"\d{1,2}/\d{1,2}/\d{2}",
    r"\d{1,2}/\d{1,2}",
)


def strip_non_letters(word: str) -> str:
    return "".join(ch for ch in word if ch.isalpha())


def normalize_phrase(phrase: str) -> str:
    return " ".join(phrase.lower().split())


@dataclass(frozen=True)
class RuleDB:
    """The manually curated rule database.

    Word sets are stored lowercase; salutations and medical suffixes also
    keep their canonical casing since they are written that way in text.
    """

    common_words: frozenset[str]
    be_phrase_words: frozenset[str]
    medical_keywords: frozenset[str]
    personnel_titles: frozenset[str]
    family_words: frozenset[str]
    subject_words: frozenset[str]
    salutations: tuple[str, ...]
    medical_suffixes: tuple[str, ...]
    location_words: frozenset[str]
    context_trigger_words: frozenset[str]
    masculine_pronouns: frozenset[str]
    feminine_pronouns: frozenset[str]
    first_person_pronouns: frozenset[str]
    second_person_pronouns: frozenset[str]
    neutral_pronouns: frozenset[str]
    date_patterns: tuple[re.Pattern, ...] = field(default=(), repr=False)

    @property
    def salutations_lower(self) -> frozenset[str]:
        return frozenset(s.lower() for s in self.salutations)

    @property
    def suffixes_lower(self) -> frozenset[str]:
        return frozenset(s.lower() for s in self.medical_suffixes)

    @property
    def all_pronouns(self) -> frozenset[str]:
        return (
            self.masculine_pronouns
            | self.feminine_pronouns
            | self.first_person_pronouns
            | self.second_person_pronouns
            | self.neutral_pronouns
        )


@dataclass(frozen=True)
class SynonymLexicon:
    """Symmetric synonym lookup plus adjective membership."""

    synonyms: dict[str, frozenset[str]]
    adjectives: frozenset[str]

    def synonyms_of(self, word: str) -> frozenset[str]:
        return self.synonyms.get(word.lower(), frozenset())

    def is_adjective(self, word: str) -> bool:
        return word.lower() in self.adjectives


@dataclass(frozen=True)
class ConceptCodeLexicon:
    """Normalized phrase to set-of-codes lookup; unknown phrases map to {}."""

    codes: dict[str, frozenset[str]]

    def lookup(self, phrase: str) -> frozenset[str]:
        return self.codes.get(normalize_phrase(phrase), frozenset())


class EvidenceProvider(Protocol):
    """Source of descriptive evidence text about a phrase.

    The default implementation is an offline snippet table; an adapter
    backed by a live search service can implement the same method.
    """

    def evidence_for(self, phrase: str) -> str | None: ...


@dataclass(frozen=True)
class TableEvidenceProvider:
    snippets: dict[str, str]

    def evidence_for(self, phrase: str) -> str | None:
        return self.snippets.get(normalize_phrase(phrase))


@dataclass(frozen=True)
class PersonnelClassifier:
    """Deterministic, offline-by-default medical-personnel detector."""

    gazetteer: frozenset[str]
    evidence: TableEvidenceProvider
    evidence_threshold: int = 2


class Lexicon(NamedTuple):
    rules: RuleDB
    synonyms: SynonymLexicon
    codes: ConceptCodeLexicon
    personnel: PersonnelClassifier


_REQUIRED_TABLES = ("common_words.txt", "be_phrases.txt", "pronouns.tsv")


def _read_lines(path: Path, required: bool) -> list[tuple[int, str]]:
    if not path.exists():
        if required:
            raise MissingRequiredTable(path)
        return []
    out = []
    for line_no, raw in enumerate(path.read_text(encoding="utf-8").split("\n"), start=1):
        line = raw.rstrip("\r").rstrip()
        if not line or line.startswith("#"):
            continue
        out.append((line_no, line))
    return out


def _load_word_set(path: Path, required: bool = False, lower: bool = True) -> frozenset[str]:
    entries = set()
    for _, line in _read_lines(path, required):
        entries.add(line.lower() if lower else line)
    return frozenset(entries)


def _load_word_list(path: Path) -> tuple[str, ...]:
    seen: dict[str, None] = {}
    for _, line in _read_lines(path, required=False):
        seen.setdefault(line, None)
    return tuple(seen)


def _load_tsv(path: Path, columns: int, required: bool = False) -> list[tuple[int, list[str]]]:
    rows = []
    for line_no, line in _read_lines(path, required):
        fields = line.split("\t", columns - 1)
        if len(fields) != columns or any(not f.strip() for f in fields):
            raise MalformedTableLine(path, line_no, line)
        rows.append((line_no, [f.strip() for f in fields]))
    return rows


def load_lexicon(directory_path: str | Path) -> Lexicon:
    """Load every table from a lexicon directory.

    Missing optional tables default to empty; ``common_words.txt``,
    ``be_phrases.txt`` and ``pronouns.tsv`` are required. Duplicate entries
    are deduplicated and synonym symmetry is closed at load time, so a pair
    needs to be listed in one direction only.
    """
    directory = Path(directory_path)

    pronoun_sets: dict[str, set[str]] = {cat: set() for cat in _PRONOUN_CATEGORIES}
    pronouns_path = directory / "pronouns.tsv"
    for line_no, (word, category) in _load_tsv(pronouns_path, 2, required=True):
        if category not in pronoun_sets:
            raise MalformedTableLine(pronouns_path, line_no, f"{word}\t{category}")
        pronoun_sets[category].add(word.lower())

    patterns = []
    for line_no, line in _read_lines(directory / "date_patterns.txt", required=False):
        try:
            patterns.append(re.compile(line))
        except re.error:
            raise MalformedTableLine(directory / "date_patterns.txt", line_no, line)
    if not patterns:
        patterns = [re.compile(p) for p in _DEFAULT_DATE_PATTERNS]

    rules = RuleDB(
        common_words=_load_word_set(directory / "common_words.txt", required=True),
        be_phrase_words=_load_word_set(directory / "be_phrases.txt", required=True),
        medical_keywords=_load_word_set(directory / "medical_keywords.txt"),
        personnel_titles=_load_word_set(directory / "personnel_titles.txt"),
        family_words=_load_word_set(directory / "family_words.txt"),
        subject_words=_load_word_set(directory / "subject_words.txt"),
        salutations=_load_word_list(directory / "salutations.txt"),
        medical_suffixes=_load_word_list(directory / "medical_suffixes.txt"),
        location_words=_load_word_set(directory / "location_words.txt"),
        context_trigger_words=_load_word_set(directory / "context_triggers.txt"),
        masculine_pronouns=frozenset(pronoun_sets["masc"]),
        feminine_pronouns=frozenset(pronoun_sets["fem"]),
        first_person_pronouns=frozenset(pronoun_sets["first"]),
        second_person_pronouns=frozenset(pronoun_sets["second"]),
        neutral_pronouns=frozenset(pronoun_sets["neutral"]),
        date_patterns=tuple(patterns),
    )

    adjacency: dict[str, set[str]] = {}
    for _, (w1, w2) in _load_tsv(directory / "synonyms.tsv", 2):
        a, b = w1.lower(), w2.lower()
        adjacency.setdefault(a, set()).add(b)
        adjacency.setdefault(b, set()).add(a)
    synonyms = SynonymLexicon(
        synonyms={w: frozenset(s) for w, s in adjacency.items()},
        adjectives=_load_word_set(directory / "adjectives.txt"),
    )

    code_map: dict[str, set[str]] = {}
    for _, (phrase, code) in _load_tsv(directory / "concept_codes.tsv", 2):
        code_map.setdefault(normalize_phrase(phrase), set()).add(code)
    codes = ConceptCodeLexicon(codes={p: frozenset(c) for p, c in code_map.items()})

    snippets = {
        normalize_phrase(phrase): snippet
        for _, (phrase, snippet) in _load_tsv(directory / "personnel_evidence.tsv", 2)
    }
    personnel = PersonnelClassifier(
        gazetteer=rules.personnel_titles,
        evidence=TableEvidenceProvider(snippets),
    )

    return Lexicon(rules, synonyms, codes, personnel)


def default_lexicon_dir() -> Path:
    """Directory of the seed tables shipped with the package.

    The shipped tables are small fixtures sufficient for tests and demos;
    real deployments replace them with their own data.
    """
    from importlib.resources import files

    return Path(str(files("clincoref").joinpath("data", "lexicon")))


def load_default_lexicon() -> Lexicon:
    return load_lexicon(default_lexicon_dir())


def are_synonyms(w1: str, w2: str, lex: SynonymLexicon) -> bool:
    """True when either word lists the other as a synonym; reflexive."""
    a, b = w1.lower(), w2.lower()
    if a == b:
        return True
    return b in lex.synonyms_of(a) or a in lex.synonyms_of(b)


def concept_codes(phrase: str, lex: ConceptCodeLexicon) -> frozenset[str]:
    return lex.lookup(phrase)


def is_medical_personnel(text: str, pc: PersonnelClassifier, rdb: RuleDB) -> bool:
    """Classify a phrase as naming medical personnel.

    Fires when any word (or the whole phrase) appears in the gazetteer or
    the personnel-title table, or when stored evidence text for the phrase
    mentions at least ``evidence_threshold`` distinct medical keywords.
    """
    phrase = normalize_phrase(text)
    candidates = set(phrase.split())
    candidates.add(phrase)
    candidates |= {strip_non_letters(w) for w in phrase.split()}
    candidates.discard("")
    if candidates & (pc.gazetteer | rdb.personnel_titles):
        return True
    snippet = pc.evidence.evidence_for(phrase)
    if snippet is None:
        return False
    snippet_words = {strip_non_letters(w.lower()) for w in snippet.split()}
    snippet_words.discard("")
    return len(snippet_words & rdb.medical_keywords) >= pc.evidence_threshold
