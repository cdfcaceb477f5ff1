"""Two-phase parsing: context-free forest first, constraints during recovery.

Phase one recognizes the string with the grammar's hand-written
context-free backbone and packs the result as :class:`ForestItem` tuples.
Phase two walks the packed forest top-down, visiting the functor (head)
daughter before its argument so that the head's constraints are as
instantiated as possible when the argument is built.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Iterator, NamedTuple, Sequence

from .engine import Program
from .grammar import SCHEMAS, Backbone
from .parser import Acceptance, _Item, _Run, sr_parse, tokenize
from .terms import Node, Store


class ForestItem(NamedTuple):
    R: str
    P0: int
    P: int
    D: tuple[tuple[int, int], ...]


def cf_parse(tokens: Sequence[str], backbone: Backbone) -> set[ForestItem]:
    """All backbone analyses of ``tokens`` reachable from the start symbol.

    Lexical items carry their own span as the single element of ``D``.
    """
    n = len(tokens)
    # (sym, i, j) -> set of (rule, daughter spans, daughter symbols)
    chart: dict[tuple[str, int, int], set] = {}
    for sym, seqs in backbone.lexical.items():
        for seq in seqs:
            k = len(seq)
            for i in range(n - k + 1):
                if tuple(tokens[i:i + k]) == seq:
                    chart.setdefault((sym, i, i + k), set()).add(
                        ("lex", ((i, i + k),), ()))
    by_span: dict[tuple[int, int], set[str]] = {}
    for sym, i, j in chart:
        by_span.setdefault((i, j), set()).add(sym)
    for width in range(2, n + 1):
        for i in range(n - width + 1):
            j = i + width
            for m in range(i + 1, j):
                left = by_span.get((i, m), ())
                right = by_span.get((m, j), ())
                if not left or not right:
                    continue
                for r in backbone.rules:
                    a, b = r.rhs
                    if a in left and b in right:
                        chart.setdefault((r.lhs, i, j), set()).add(
                            (r.rule_name, ((i, m), (m, j)), (a, b)))
                        by_span.setdefault((i, j), set()).add(r.lhs)
    items: set[ForestItem] = set()
    root = (backbone.start, 0, n)
    if backbone.start is None or root not in chart:
        return items
    seen = {root}
    stack = [root]
    while stack:
        sym, i, j = stack.pop()
        for rule, spans, syms in chart[(sym, i, j)]:
            items.add(ForestItem(rule, i, j, spans))
            for d_sym, (a, b) in zip(syms, spans):
                key = (d_sym, a, b)
                if key not in seen:
                    seen.add(key)
                    stack.append(key)
    return items


def _recover_span(run: _Run, index, span) -> Iterator[_Item]:
    for item in index.get(span, ()):
        if item.R == "lex":
            yield from run.shift(item.P0, item.P)
            continue
        schema = SCHEMAS[item.R]
        left_span, right_span = item.D
        if schema.name == "fa":
            for head in _recover_span(run, index, left_span):
                for dep in _recover_span(run, index, right_span):
                    yield from run.combine(head, dep, schema)
        else:
            for head in _recover_span(run, index, right_span):
                for dep in _recover_span(run, index, left_span):
                    yield from run.combine(dep, head, schema)


def _index(items: Iterable[ForestItem]) -> dict:
    index: dict[tuple[int, int], list[ForestItem]] = {}
    for it in sorted(items):
        index.setdefault((it.P0, it.P), []).append(it)
    return index


def recover_accept(items: Iterable[ForestItem], program: Program, tokens,
                   s: Store | None = None, *,
                   target: Node | None = None) -> Iterator[Acceptance]:
    s = s or Store()
    cp = s.mark()
    tokens = list(tokens)
    index = _index(items)
    try:
        if tokens and (0, len(tokens)) in index:
            run = _Run(tokens, program, s, target)
            for item in _recover_span(run, index, (0, len(tokens))):
                yield from run.accept(item)
    finally:
        s.undo_to(cp)


def recover(items, program: Program, target: Node | None = None, tokens=(),
            s: Store | None = None):
    """Head-driven recovery of full derivations from a packed forest."""
    for acc in recover_accept(items, program, tokens, s, target=target):
        yield acc.derivation


def forest_accept(tokens, program: Program, s: Store | None = None, *,
                  target: Node | None = None) -> Iterator[Acceptance]:
    items = cf_parse(tokens, program.backbone)
    yield from recover_accept(items, program, tokens, s, target=target)


@dataclass
class BackboneReport:
    checked: int = 0
    violations: list[tuple[str, ForestItem]] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations


def validate_backbone(program: Program, corpus: Iterable) -> BackboneReport:
    """Check that the backbone licenses every constraint-grammar derivation.

    ``corpus`` holds sentences (text or token lists) or objects with a
    ``tokens`` attribute.
    """
    report = BackboneReport()
    for entry in corpus:
        tokens = getattr(entry, "tokens", entry)
        if isinstance(tokens, str):
            tokens = tokenize(tokens)
        tokens = list(tokens)
        items = cf_parse(tokens, program.backbone) if program.backbone else set()
        report.checked += 1
        for d in sr_parse(tokens, program):
            for sk in sorted(d.skeleton()):
                fi = ForestItem(*sk)
                if fi not in items:
                    report.violations.append((" ".join(tokens), fi))
    return report
