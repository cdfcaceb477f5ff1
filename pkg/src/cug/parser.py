"""Tokenizing, lexical look-up and the shift-reduce parser.

All parsing runs inside one Store.  Categories on the stack are live
terms; when a parse is accepted the whole tree is copied out with
:func:`~cug.terms.resolve`, so a :class:`Derivation` stays valid after the
parser backtracks.
"""

from __future__ import annotations

import json
import string
import time
from dataclasses import dataclass, field
from typing import Iterator, Sequence

from .engine import (Clause, DepthLimitExceeded, Program, first, force_residual,
                     residual, solve)
from .grammar import SCHEMAS, apply_rule, expand_target
from .terms import Node, Record, Store, rename, render, resolve, unify


class UnknownWord(ValueError):
    def __init__(self, token: str, position: int):
        super().__init__(f"unknown word {token!r} at position {position}")
        self.token = token
        self.position = position


def tokenize(text: str) -> list[str]:
    toks = []
    for raw in text.split():
        tok = raw.lower().strip(string.punctuation)
        if tok:
            toks.append(tok)
    if not toks:
        raise ValueError("empty input")
    return toks


@dataclass
class LexEdge:
    start: int
    end: int
    tokens: tuple[str, ...]
    category: Node
    pending: list


def lexicon_index(tokens: Sequence[str], program: Program) -> dict[int, list[tuple[int, Clause]]]:
    """For each start position, the (end, clause) pairs whose key matches."""
    lexicon = program.lexicon()
    index: dict[int, list[tuple[int, Clause]]] = {i: [] for i in range(len(tokens))}
    for key, clauses in lexicon.items():
        k = len(key)
        for i in range(len(tokens) - k + 1):
            if tuple(tokens[i:i + k]) == key:
                index[i].extend((i + k, c) for c in clauses)
    covered = set()
    for i, entries in index.items():
        for end, _ in entries:
            covered.update(range(i, end))
    for i, tok in enumerate(tokens):
        if i not in covered:
            raise UnknownWord(tok, i)
    return index


def lexical_edges(tokens: Sequence[str], program: Program, s: Store) -> list[LexEdge]:
    """One edge per lexical solution, bodies solved with blocks honoured.

    The edges stay live in ``s``; callers that want a clean store should
    mark before and undo after.
    """
    out = []
    for i, entries in lexicon_index(tokens, program).items():
        for end, clause in entries:
            c = rename(clause, s)
            for pending in solve(c.body, program, s):
                out.append(LexEdge(i, end, tuple(tokens[i:end]),
                                   resolve(c.head.args[1], s), list(pending)))
    return out


@dataclass
class Derivation:
    rule: str
    start: int
    end: int
    category: Node
    children: tuple = ()
    tokens: tuple[str, ...] = ()

    def nodes(self) -> Iterator["Derivation"]:
        yield self
        for c in self.children:
            yield from c.nodes()

    def skeleton(self) -> set[tuple]:
        """(rule, from, to, daughter spans) for every node."""
        out = set()
        for n in self.nodes():
            if n.children:
                d = tuple((c.start, c.end) for c in n.children)
            else:
                d = ((n.start, n.end),)
            out.add((n.rule, n.start, n.end, d))
        return out

    def tree(self, compact: bool = True) -> str:
        lines = []

        def walk(n: Derivation, depth: int):
            lines.append(f"{'  ' * depth}{n.rule} [{n.start},{n.end}) "
                         f"{render(n.category, compact=compact)}")
            for c in n.children:
                walk(c, depth + 1)

        walk(self, 0)
        return "\n".join(lines)

    def key(self) -> str:
        return self.tree(compact=False)

    @property
    def sem(self) -> Node | None:
        cat = self.category
        if isinstance(cat, Record):
            return Store().get(cat, "sem")
        return None


@dataclass
class Reading:
    derivation: Derivation
    form: Node | None
    text: str

    @property
    def shape(self) -> str:
        return self.derivation.tree()


def logical_form(d: Derivation) -> str:
    sem = d.sem
    if sem is None:
        return "none"
    txt = render(sem)
    return "none" if txt.startswith("_") else txt


def readings(derivs) -> list[Reading]:
    out, seen = [], set()
    for d in derivs:
        text = logical_form(d)
        key = (d.tree(), text)
        if key not in seen:
            seen.add(key)
            out.append(Reading(d, d.sem if text != "none" else None, text))
    return out


class _Item:
    __slots__ = ("rule", "start", "end", "cat", "kids", "tokens")

    def __init__(self, rule, start, end, cat, kids=(), tokens=()):
        self.rule, self.start, self.end = rule, start, end
        self.cat, self.kids, self.tokens = cat, kids, tokens


def _snapshot(item: _Item, s: Store, mapping: dict) -> Derivation:
    return Derivation(item.rule, item.start, item.end,
                      resolve(item.cat, s, mapping),
                      tuple(_snapshot(k, s, mapping) for k in item.kids),
                      item.tokens)


@dataclass
class Acceptance:
    derivation: Derivation
    forced: bool
    events: list = field(default_factory=list)


class _Run:
    """Shared machinery for both strategies: lexical shifts, application,
    acceptance."""

    def __init__(self, tokens, program: Program, s: Store, target: Node | None):
        self.tokens = list(tokens)
        self.program = program
        self.s = s
        self.limit = program.limit()
        self.index = lexicon_index(self.tokens, program)
        self.target = target
        self.schemas = [SCHEMAS[n] for n in ("ba", "fa") if n in program.rules]

    def shift(self, start: int, end: int | None = None) -> Iterator[_Item]:
        s = self.s
        for stop, clause in self.index.get(start, ()):
            if end is not None and stop != end:
                continue
            cp = s.mark()
            c = rename(clause, s)
            toks = tuple(self.tokens[start:stop])
            if s.logging:
                s.log("shift", " ".join(toks))
            for _ in solve(c.body, self.program, s, limit=self.limit):
                yield _Item("lex", start, stop, c.head.args[1], (), toks)
            s.undo_to(cp)

    def combine(self, left: _Item, right: _Item, schema) -> Iterator[_Item]:
        s = self.s
        cp = s.mark()
        functor, argument = (left, right) if schema.name == "fa" else (right, left)
        if s.logging:
            s.log("reduce", f"{schema.name} [{left.start},{right.end})")
        res = apply_rule(schema, functor.cat, argument.cat, s)
        if res is not None:
            for _ in solve([], self.program, s, limit=self.limit):
                yield _Item(schema.name, left.start, right.end, res, (left, right))
        s.undo_to(cp)

    def accept(self, item: _Item) -> Iterator[Acceptance]:
        s = self.s
        cp = s.mark()
        target = self.target if self.target is not None else expand_target(self.program, s)
        if s.logging:
            s.log("target", f"[{item.start},{item.end}) {render(target, s, compact=True)}")
        if unify(item.cat, target, s):
            for pending in solve([], self.program, s, limit=self.limit):
                forced = bool(pending)
                for _ in force_residual(self.program, s, limit=self.limit):
                    if s.logging:
                        s.log("accept", f"[{item.start},{item.end})")
                    yield Acceptance(_snapshot(item, s, {}), forced, list(s.events))
                    break
        s.undo_to(cp)


def _sr(run: _Run, pos: int, stack: tuple) -> Iterator[Acceptance]:
    if len(stack) >= 2:
        left, right = stack[-2], stack[-1]
        for schema in run.schemas:
            for item in run.combine(left, right, schema):
                yield from _sr(run, pos, stack[:-2] + (item,))
    if pos < len(run.tokens):
        for item in run.shift(pos):
            yield from _sr(run, item.end, stack + (item,))
    elif len(stack) == 1:
        yield from run.accept(stack[0])


def sr_accept(tokens, program: Program, s: Store | None = None, *,
              target: Node | None = None) -> Iterator[Acceptance]:
    """Backtracking shift-reduce parse; yields every accepted analysis.

    Reduce is tried before shift, ba before fa.  This only fixes the order
    of enumeration.
    """
    s = s or Store()
    cp = s.mark()
    run = _Run(tokens, program, s, target)
    try:
        yield from _sr(run, 0, ())
    finally:
        s.undo_to(cp)


def sr_parse(tokens, program: Program, s: Store | None = None, *,
             target: Node | None = None) -> Iterator[Derivation]:
    for acc in sr_accept(tokens, program, s, target=target):
        yield acc.derivation


@dataclass
class ParseResult:
    sentence: str
    tokens: list[str]
    strategy: str
    derivations: list[Derivation]
    readings: list[Reading]
    residuals_forced: bool
    elapsed_ms: float
    events: list = field(default_factory=list)

    @property
    def grammatical(self) -> bool:
        return bool(self.derivations)

    @property
    def derivation_count(self) -> int:
        return len(self.derivations)

    def to_dict(self) -> dict:
        return {
            "sentence": self.sentence,
            "grammatical": self.grammatical,
            "derivation_count": self.derivation_count,
            "readings": [{"tree": r.shape, "sem": r.text} for r in self.readings],
            "residuals_forced": self.residuals_forced,
            "strategy": self.strategy,
            "elapsed_ms": round(self.elapsed_ms, 3),
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict())

    def text(self) -> str:
        lines = []
        for i, r in enumerate(self.readings, 1):
            lines.append(f"# reading {i}")
            lines.append(r.shape)
            lines.append(f"sem: {r.text}")
        return "\n".join(lines)


def parse(sentence, program: Program, *, strategy: str = "sr",
          max_solutions: int | None = None, log: bool = False) -> ParseResult:
    """Parse a sentence (text or token list) and collect distinct analyses.

    Derivations are deduplicated on their full canonical render.
    """
    from .forest import forest_accept  # circular at import time

    tokens = tokenize(sentence) if isinstance(sentence, str) else list(sentence)
    text = sentence if isinstance(sentence, str) else " ".join(tokens)
    s = Store(logging=log)
    if strategy == "sr":
        accepts = sr_accept(tokens, program, s)
    elif strategy == "forest":
        if program.backbone is None:
            raise ValueError("grammar has no context-free backbone")
        accepts = forest_accept(tokens, program, s)
    else:
        raise ValueError(f"unknown strategy {strategy!r}")
    t0 = time.perf_counter()
    derivs, seen, forced, events = [], set(), False, []
    try:
        for acc in accepts:
            if not derivs:
                events = acc.events
            key = acc.derivation.key()
            if key in seen:
                continue
            seen.add(key)
            derivs.append(acc.derivation)
            forced = forced or acc.forced
            if max_solutions is not None and len(derivs) >= max_solutions:
                break
    finally:
        accepts.close()
    if not derivs and log:
        events = list(s.history)
    elapsed = (time.perf_counter() - t0) * 1000
    return ParseResult(text, tokens, strategy, derivs, readings(derivs),
                       forced, elapsed, events)


__all__ = ["UnknownWord", "tokenize", "LexEdge", "lexical_edges", "Derivation",
           "Reading", "readings", "sr_parse", "sr_accept", "ParseResult", "parse",
           "DepthLimitExceeded", "logical_form", "residual", "first"]
