"""Grammar files: reading, macro expansion, program assembly, application.

A grammar file holds definite clauses over feature terms plus a few
directives::

    % comment
    :- target S.
    :- block add_adj/7 blocks [6,7].
    :- external foo/2.
    :- rules fa, ba.
    lex([walks], X) :- iv(X), sv_agreement(sg3, X).
    iv(NP[case:nom]\\S).
    cfg V -> NP V : ba.
    cfg lex NP : [johan], [marie].
    cfg start V.

Term syntax: ``[f:v, ...]`` records, lowercase atoms, ``'quoted'`` atoms,
uppercase variables (``_`` is anonymous), ``f(a, b)`` compounds,
``[a, b]`` token lists, ``X^Y`` (right associative), and categorial
shorthand ``A/B`` (val A, arg B) and ``B\\A`` (val A, arg B).  ``/`` chains
to the left and ``\\`` to the right; mixing them needs parentheses.  A
postfix ``T[f:v]`` unifies ``T`` with the record, e.g. ``NP[case:nom]``.

The macros ``S``, ``NP``, ``ADJ`` and ``N`` expand, per occurrence, to a
fresh atomic category ``[cat:c, dir:none]``.  The ``dir:none`` mark keeps
atomic categories from unifying with functor categories in an open-world
record system.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from pathlib import Path as FsPath

from .engine import BUILTINS, BlockDecl, Clause, Literal, Program
from .terms import (NONE, Atom, Compound, Node, Record, Store, Var, path_get,
                    rename, resolve, unify)

MACROS = {"S": "s", "NP": "np", "ADJ": "adj", "N": "n"}
SLASH = Atom("/")
BACKSLASH = Atom("\\")


class GrammarError(Exception):
    def __init__(self, msg: str, line: int | None = None, col: int | None = None):
        where = f"line {line}, column {col}: " if line is not None else ""
        super().__init__(where + msg)
        self.line = line
        self.col = col


@dataclass(frozen=True)
class RuleSchema:
    name: str
    direction: Atom


FA = RuleSchema("fa", SLASH)
BA = RuleSchema("ba", BACKSLASH)
SCHEMAS = {"fa": FA, "ba": BA}


@dataclass(frozen=True)
class BackboneRule:
    lhs: str
    rhs: tuple[str, ...]
    rule_name: str

    def __post_init__(self):
        if self.rule_name not in SCHEMAS or len(self.rhs) != 2:
            raise ValueError(f"backbone rule {self} must be binary fa/ba")


@dataclass
class Backbone:
    rules: list[BackboneRule] = field(default_factory=list)
    lexical: dict[str, list[tuple[str, ...]]] = field(default_factory=dict)
    start: str | None = None


@dataclass
class GrammarSource:
    clauses: list[Clause] = field(default_factory=list)
    blocks: list[BlockDecl] = field(default_factory=list)
    externals: set = field(default_factory=set)
    rules: tuple[str, ...] = ("fa", "ba")
    target: Node | None = None
    backbone: Backbone | None = None

    @property
    def lexical_clauses(self) -> list[Clause]:
        return [c for c in self.clauses if c.head.key == ("lex", 2)]

    def program(self) -> Program:
        p = Program(target=self.target, rules=self.rules,
                    backbone=self.backbone, externals=set(self.externals))
        for c in self.clauses:
            p.add_clause(c)
        for b in self.blocks:
            p.add_block(b)
        return p


# -- tokenizer -------------------------------------------------------------

_TOKEN = re.compile(r"""
    (?P<ws>\s+|%[^\n]*)
  | (?P<neck>:-)
  | (?P<arrow>->)
  | (?P<quoted>'(?:[^']|'')*')
  | (?P<int>\d+)
  | (?P<name>[A-Za-z_][A-Za-z0-9_]*)
  | (?P<punct>[()\[\],.:\\/^=])
""", re.VERBOSE)


@dataclass(frozen=True)
class Tok:
    kind: str
    text: str
    line: int
    col: int


def tokenize_source(text: str) -> list[Tok]:
    toks = []
    pos, line, line_start = 0, 1, 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if m is None:
            raise GrammarError(f"unexpected character {text[pos]!r}",
                               line, pos - line_start + 1)
        kind = m.lastgroup
        chunk = m.group()
        if kind != "ws":
            if kind == "quoted":
                chunk = chunk[1:-1].replace("''", "'")
            toks.append(Tok(kind, chunk, line, m.start() - line_start + 1))
        newlines = m.group().count("\n")
        if newlines:
            line += newlines
            line_start = m.start() + m.group().rfind("\n") + 1
        pos = m.end()
    toks.append(Tok("eof", "", line, pos - line_start + 1))
    return toks


# -- parser ----------------------------------------------------------------

class _Parser:
    def __init__(self, text: str):
        self.toks = tokenize_source(text)
        self.i = 0
        self.src = GrammarSource()
        self.defined: set = set()
        self.calls: list[tuple[tuple[str, int], Tok]] = []
        self.backbone = Backbone()
        self.has_backbone = False

    # token helpers
    @property
    def tok(self) -> Tok:
        return self.toks[self.i]

    def error(self, msg: str, tok: Tok | None = None):
        tok = tok or self.tok
        raise GrammarError(msg, tok.line, tok.col)

    def at(self, text: str) -> bool:
        t = self.tok
        return t.kind in ("punct", "neck", "arrow") and t.text == text

    def accept(self, text: str) -> bool:
        if self.at(text):
            self.i += 1
            return True
        return False

    def expect(self, text: str) -> Tok:
        if not self.at(text):
            self.error(f"expected {text!r}, found {self.tok.text or 'end of input'!r}")
        t = self.tok
        self.i += 1
        return t

    def name(self) -> Tok:
        t = self.tok
        if t.kind != "name":
            self.error(f"expected a name, found {t.text!r}")
        self.i += 1
        return t

    def integer(self) -> int:
        t = self.tok
        if t.kind != "int":
            self.error(f"expected an integer, found {t.text!r}")
        self.i += 1
        return int(t.text)

    # top level
    def parse(self) -> GrammarSource:
        while self.tok.kind != "eof":
            if self.tok.kind == "name" and self.tok.text == "cfg":
                self.i += 1
                self.cfg_item()
            elif self.accept(":-"):
                self.directive()
            else:
                self.clause()
        for key, tok in self.calls:
            if key not in self.defined and key not in BUILTINS \
                    and key not in self.src.externals:
                self.error(f"undefined predicate {key[0]}/{key[1]}", tok)
        if self.src.target is None:
            raise GrammarError("no ':- target' declaration")
        if self.has_backbone:
            self.src.backbone = self.backbone
        return self.src

    def directive(self):
        t = self.name()
        if t.text == "target":
            if self.src.target is not None:
                self.error("duplicate target declaration", t)
            self.store, self.vars = Store(), {}
            term = self.expr()
            self.src.target = resolve(term, self.store)
        elif t.text == "block":
            pred = self.name().text
            self.expect("/")
            arity = self.integer()
            kw = self.name()
            if kw.text != "blocks":
                self.error("expected 'blocks'", kw)
            self.expect("[")
            pos = [self.integer()]
            while self.accept(","):
                pos.append(self.integer())
            self.expect("]")
            try:
                decl = BlockDecl(pred, arity, tuple(pos))
            except ValueError as e:
                self.error(str(e), t)
            if any(b.pred == pred and b.arity == arity for b in self.src.blocks):
                self.error(f"duplicate block declaration for {pred}/{arity}", t)
            self.src.blocks.append(decl)
        elif t.text == "external":
            pred = self.name().text
            self.expect("/")
            self.src.externals.add((pred, self.integer()))
        elif t.text == "rules":
            names = [self.name().text]
            while self.accept(","):
                names.append(self.name().text)
            for n in names:
                if n not in SCHEMAS:
                    self.error(f"unknown rule schema {n!r}", t)
            self.src.rules = tuple(names)
        else:
            self.error(f"unknown directive {t.text!r}", t)
        self.expect(".")

    def cfg_item(self):
        self.has_backbone = True
        t = self.name()
        if t.text == "lex":
            sym = self.name().text
            self.expect(":")
            seqs = [self.token_list()]
            while self.accept(","):
                seqs.append(self.token_list())
            self.backbone.lexical.setdefault(sym, []).extend(seqs)
        elif t.text == "start":
            self.backbone.start = self.name().text
        else:
            self.expect("->")
            rhs = (self.name().text, self.name().text)
            self.expect(":")
            rn = self.name()
            try:
                self.backbone.rules.append(BackboneRule(t.text, rhs, rn.text))
            except ValueError as e:
                self.error(str(e), rn)
        self.expect(".")

    def token_list(self) -> tuple[str, ...]:
        self.expect("[")
        toks = [self.name().text]
        while self.accept(","):
            toks.append(self.name().text)
        self.expect("]")
        return tuple(toks)

    def clause(self):
        self.store, self.vars = Store(), {}
        head = self.literal()
        if head.pred == "=":
            self.error("cannot define =/2")
        body = []
        if self.accept(":-"):
            body.append(self.literal(call=True))
            while self.accept(","):
                body.append(self.literal(call=True))
        self.expect(".")
        mapping: dict = {}
        clause = Clause(head.map_nodes(lambda n: resolve(n, self.store, mapping)),
                        tuple(b.map_nodes(lambda n: resolve(n, self.store, mapping))
                              for b in body))
        self.defined.add(clause.head.key)
        self.src.clauses.append(clause)

    def literal(self, call: bool = False) -> Literal:
        start = self.tok
        if start.kind == "name" and start.text[0].islower():
            if self.toks[self.i + 1].text != "=":
                self.i += 1
                args = []
                if self.accept("("):
                    args.append(self.expr())
                    while self.accept(","):
                        args.append(self.expr())
                    self.expect(")")
                lit = Literal(start.text, tuple(args))
                if call:
                    self.calls.append((lit.key, start))
                return lit
        left = self.expr()
        self.expect("=")
        return Literal("=", (left, self.expr()))

    # terms
    def expr(self) -> Node:
        left = self.slash_expr()
        if self.accept("^"):
            return Compound("^", (left, self.expr()))
        return left

    def slash_expr(self, chained: bool = False) -> Node:
        left = self.postfix()
        if self.at("/"):
            if chained:
                self.error("parenthesize mixed '/' and '\\'")
            while self.accept("/"):
                left = self.functor(left, SLASH, self.postfix())
            if self.at("\\"):
                self.error("parenthesize mixed '/' and '\\'")
            return left
        if self.accept("\\"):
            right = self.slash_expr(chained=True)
            return self.functor(right, BACKSLASH, left)
        return left

    def functor(self, val: Node, d: Atom, arg: Node) -> Record:
        return Record({"val": val, "dir": d, "arg": arg}, self.store.fresh())

    def postfix(self) -> Node:
        term = self.primary()
        while self.at("["):
            t = self.tok
            rec = self.bracket()
            if not isinstance(rec, Record):
                self.error("expected a feature record", t)
            if not unify(term, rec, self.store):
                self.error("inconsistent feature annotation", t)
        return term

    def primary(self) -> Node:
        t = self.tok
        if t.kind == "name":
            self.i += 1
            if t.text in MACROS:
                return Record({"cat": Atom(MACROS[t.text]), "dir": NONE},
                              self.store.fresh())
            if t.text == "_":
                return self.store.fresh()
            if t.text[0].isupper() or t.text[0] == "_":
                v = self.vars.get(t.text)
                if v is None:
                    v = self.vars[t.text] = self.store.fresh()
                return v
            if self.accept("("):
                args = [self.expr()]
                while self.accept(","):
                    args.append(self.expr())
                self.expect(")")
                return Compound(t.text, tuple(args))
            return Atom(t.text)
        if t.kind == "quoted":
            self.i += 1
            return Atom(t.text)
        if t.kind == "int":
            self.i += 1
            return Atom(t.text)
        if self.at("["):
            return self.bracket()
        if self.accept("("):
            e = self.expr()
            self.expect(")")
            return e
        self.error(f"unexpected {t.text or 'end of input'!r}")

    def bracket(self) -> Node:
        self.expect("[")
        if self.accept("]"):
            return Record({}, self.store.fresh())
        nxt = self.toks[self.i + 1]
        if self.tok.kind == "name" and nxt.kind == "punct" and nxt.text == ":":
            feats: dict[str, Node] = {}
            while True:
                f = self.name()
                if f.text in feats:
                    self.error(f"duplicate feature {f.text!r}", f)
                self.expect(":")
                feats[f.text] = self.expr()
                if not self.accept(","):
                    break
            self.expect("]")
            return Record(feats, self.store.fresh())
        items = [self.expr()]
        while self.accept(","):
            items.append(self.expr())
        self.expect("]")
        return Compound("[]", tuple(items))


def parse_grammar(text: str) -> GrammarSource:
    return _Parser(text).parse()


def load_grammar(path) -> Program:
    return parse_grammar(FsPath(path).read_text(encoding="utf-8")).program()


# -- writing grammars back out ---------------------------------------------

_PLAIN_ATOM = re.compile(r"[a-z][A-Za-z0-9_]*\Z")


def _atom_src(name: str) -> str:
    if _PLAIN_ATOM.match(name):
        return name
    return "'" + name.replace("'", "''") + "'"


def to_source(n: Node, s: Store | None = None) -> str:
    """Grammar-file text for a term (no macros, no shorthand)."""
    if s is None:
        s = Store()
    counts: dict = {}
    stack = [n]
    while stack:
        m = s.deref(stack.pop())
        if isinstance(m, Record):
            feats, tail = s.features(m)
            counts[tail] = counts.get(tail, 0) + 1
            if counts[tail] == 1:
                stack.extend(feats.values())
        elif isinstance(m, Compound):
            stack.extend(m.args)
    names: dict = {}
    tags: dict = {}

    def go(m: Node) -> str:
        m = s.deref(m)
        if isinstance(m, Var):
            if m not in names:
                names[m] = f"_V{len(names) + 1}"
            return names[m]
        if isinstance(m, Atom):
            return _atom_src(m.name)
        if isinstance(m, Compound):
            if m.functor == "[]":
                return "[" + ", ".join(go(a) for a in m.args) + "]"
            if m.functor == "^":
                left = go(m.args[0])
                if isinstance(s.deref(m.args[0]), Compound) and \
                        s.deref(m.args[0]).functor == "^":
                    left = f"({left})"
                return f"{left}^{go(m.args[1])}"
            return f"{_atom_src(m.functor)}(" + ", ".join(go(a) for a in m.args) + ")"
        feats, tail = s.features(m)
        body = "[" + ", ".join(f"{k}:{go(feats[k])}" for k in sorted(feats)) + "]"
        if counts.get(tail, 0) > 1:
            if tail in tags:
                return tags[tail]
            tags[tail] = f"_R{len(tags) + 1}"
            return f"{tags[tail]}{body}"
        return body

    return go(n)


def _literal_src(lit: Literal, s: Store, shared) -> str:
    if lit.key == ("=", 2):
        return f"{shared(lit.args[0])} = {shared(lit.args[1])}"
    if not lit.args:
        return lit.pred
    return f"{lit.pred}(" + ", ".join(shared(a) for a in lit.args) + ")"


def clause_source(c: Clause) -> str:
    """One clause as grammar text; variable sharing survives the round trip."""
    wrapped = Compound("clause", (Compound(c.head.pred, c.head.args),)
                       + tuple(Compound(b.pred, b.args) for b in c.body))
    text = to_source(wrapped)
    # peel the wrapper back off: clause(Head, B1, ...) -> Head :- B1, ...
    inner = text[len("clause("):-1]
    parts = _split_top(inner)
    head, body = parts[0], parts[1:]
    body = [_unwrap_eq(b) for b in body]
    if body:
        return f"{head} :- {', '.join(body)}."
    return f"{head}."


def _unwrap_eq(text: str) -> str:
    if text.startswith("'='("):
        a, b = _split_top(text[4:-1])
        return f"{a} = {b}"
    return text


def _split_top(text: str) -> list[str]:
    parts, depth, cur, quoted = [], 0, [], False
    for ch in text:
        if ch == "'" :
            quoted = not quoted
        elif not quoted:
            if ch in "([":
                depth += 1
            elif ch in ")]":
                depth -= 1
            elif ch == "," and depth == 0:
                parts.append("".join(cur).strip())
                cur = []
                continue
        cur.append(ch)
    parts.append("".join(cur).strip())
    return parts


def source_text(g: GrammarSource) -> str:
    """Serialize a GrammarSource back to parseable grammar text."""
    lines = [f":- target {to_source(g.target)}."]
    if g.rules != ("fa", "ba"):
        lines.append(f":- rules {', '.join(g.rules)}.")
    for pred, arity in sorted(g.externals):
        lines.append(f":- external {pred}/{arity}.")
    for b in g.blocks:
        lines.append(f":- block {b.pred}/{b.arity} blocks "
                     f"[{','.join(map(str, b.watched))}].")
    lines.extend(clause_source(c) for c in g.clauses)
    if g.backbone is not None:
        bb = g.backbone
        for r in bb.rules:
            lines.append(f"cfg {r.lhs} -> {r.rhs[0]} {r.rhs[1]} : {r.rule_name}.")
        for sym, seqs in bb.lexical.items():
            lines.append(f"cfg lex {sym} : "
                         + ", ".join("[" + ", ".join(t) + "]" for t in seqs) + ".")
        if bb.start:
            lines.append(f"cfg start {bb.start}.")
    return "\n".join(lines) + "\n"


# -- application -----------------------------------------------------------

def apply_rule(schema: RuleSchema, functor: Node, argument: Node,
               s: Store) -> Node | None:
    """Combine ``functor`` with ``argument``; returns the result category.

    Besides matching val/dir/arg, the result shares its ``vc`` value with
    the argument and its ``sem`` with the functor.  Returns None (store
    restored) if anything clashes.  Woken goals are left on the queue for
    the caller's next ``solve``.
    """
    cp = s.mark()
    val, arg = s.fresh(), s.fresh()
    ok = (unify(functor, Record({"val": val, "dir": schema.direction,
                                 "arg": arg}, s.fresh()), s)
          and unify(argument, arg, s))
    if ok:
        for a, b in (((val, "vc"), (argument, "vc")),
                     ((val, "sem"), (functor, "sem"))):
            x = path_get(a[0], [a[1]], s)
            y = path_get(b[0], [b[1]], s) if x is not None else None
            if y is None or not unify(x, y, s):
                ok = False
                break
    if not ok:
        s.undo_to(cp)
        return None
    return val


def expand_target(program: Program, s: Store) -> Node:
    if program.target is None:
        raise GrammarError("grammar has no target category")
    return rename(program.target, s)
