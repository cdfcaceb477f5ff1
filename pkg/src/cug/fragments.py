"""Bundled grammar fragments and their judgment corpora."""

from __future__ import annotations

import re
from dataclasses import dataclass
from importlib import resources
from pathlib import Path

from .engine import Program
from .grammar import GrammarSource, parse_grammar
from .parser import lexicon_index, tokenize

FRAGMENTS = ("english-agreement", "dutch-core")


@dataclass(frozen=True)
class CorpusEntry:
    tokens: tuple[str, ...]
    grammatical: bool
    derivations: int | None = None
    readings: int | None = None
    source: str = ""
    line: int = 0

    def __post_init__(self):
        if (self.derivations is not None and self.readings is not None
                and self.readings > self.derivations):
            raise ValueError(f"line {self.line}: more readings than derivations")

    @property
    def sentence(self) -> str:
        return " ".join(self.tokens)


@dataclass
class Fragment:
    name: str
    grammar_path: Path
    corpus_path: Path
    source: GrammarSource
    program: Program
    corpus: list[CorpusEntry]


_FIELD = re.compile(r"(derivations|readings|src)\s*=\s*(\S+)\Z")


def parse_corpus(text: str) -> list[CorpusEntry]:
    entries = []
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        sign, rest = line[0], line[1:]
        if sign not in "+-−":
            raise ValueError(f"line {lineno}: expected '+' or '-', got {sign!r}")
        parts = [p.strip() for p in rest.split("|")]
        fields: dict[str, str] = {}
        for p in parts[1:]:
            m = _FIELD.match(p)
            if m is None:
                raise ValueError(f"line {lineno}: bad field {p!r}")
            fields[m.group(1)] = m.group(2)
        try:
            toks = tuple(tokenize(parts[0]))
        except ValueError:
            raise ValueError(f"line {lineno}: empty sentence") from None
        entries.append(CorpusEntry(
            toks, sign == "+",
            int(fields["derivations"]) if "derivations" in fields else None,
            int(fields["readings"]) if "readings" in fields else None,
            fields.get("src", ""), lineno))
    return entries


def data_path(filename: str) -> Path:
    return Path(str(resources.files("cug") / "data" / filename))


def load_fragment(name: str) -> Fragment:
    if name not in FRAGMENTS:
        raise ValueError(f"unknown fragment {name!r}; choose from {', '.join(FRAGMENTS)}")
    gpath = data_path(f"{name}.cug")
    cpath = data_path(f"{name}.corpus")
    source = parse_grammar(gpath.read_text(encoding="utf-8"))
    program = source.program()
    corpus = parse_corpus(cpath.read_text(encoding="utf-8"))
    problems = []
    for e in corpus:
        try:
            lexicon_index(e.tokens, program)
        except ValueError as exc:
            problems.append(f"{cpath.name}:{e.line}: {exc}")
    if problems:
        raise ValueError("; ".join(problems))
    return Fragment(name, gpath, cpath, source, program, corpus)
