"""Feature terms and the trailed binding store.

Four kinds of node make up every category and logical form:

  - ``Var``: a logic variable.  Identity is object identity; the integer id
    is only used for display and ordering.
  - ``Atom``: a symbol such as ``np``, ``nom``, ``'\\'`` or ``'+'``.
  - ``Record``: an open attribute-value record.  A record is a set of
    features plus a *tail* variable standing for "whatever other features
    this record turns out to have".  Unifying two records binds their tails
    so that each one acquires the features it was missing; all destructive
    change is therefore a variable binding and can be undone from the trail.
  - ``Compound``: ``functor(arg, ...)`` terms, used for semantics.  The
    binary functor ``^`` pairs a variable with a body, as in ``(X^S)^S``.

The ``Store`` owns bindings, suspended goals and the wake queue, and keeps a
trail so that any sequence of changes can be rolled back to a checkpoint.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Iterator, Mapping, Sequence, Union


class Var:
    __slots__ = ("id",)

    def __init__(self, id: int):
        self.id = id

    def __repr__(self):
        return f"_G{self.id}"


@dataclass(frozen=True)
class Atom:
    name: str

    def __repr__(self):
        return f"Atom({self.name!r})"


class Record:
    __slots__ = ("features", "tail")

    def __init__(self, features: Mapping[str, "Node"], tail: Var):
        self.features = dict(features)
        self.tail = tail

    def __repr__(self):
        inner = ", ".join(f"{k}: {v!r}" for k, v in self.features.items())
        return f"Record({{{inner}}} | {self.tail!r})"


@dataclass(frozen=True)
class Compound:
    functor: str
    args: tuple

    def __repr__(self):
        return f"Compound({self.functor!r}, {self.args!r})"


Node = Union[Var, Atom, Record, Compound]
Path = Sequence[str]

NONE = Atom("none")


class UnificationError(Exception):
    pass


class StaleCheckpoint(ValueError):
    """Raised when undoing to a checkpoint that has already been undone past."""


@dataclass(frozen=True)
class Checkpoint:
    store_id: int
    position: int


_store_ids = itertools.count(1)

# trail entry tags
_BIND, _ACTIVATE, _WATCH, _DEACTIVATE, _QPUSH, _QPOP, _LOG = range(7)


class Store:
    """Bindings, suspensions and wake queue for one unit of work.

    Suspension bookkeeping lives here (rather than in the engine) because a
    binding made by ``unify`` must move watched goals onto the wake queue,
    and both must be undone together.
    """

    def __init__(self, *, logging: bool = False):
        self.uid = next(_store_ids)
        self.bindings: dict[Var, Node] = {}
        self.trail: list[tuple] = []
        self._ids = itertools.count(1)
        # suspension id -> Suspension, in creation order
        self.active: dict[int, object] = {}
        self.watchers: dict[Var, list[int]] = {}
        self.queue: list = []
        self.logging = logging
        # events on the current search path (trailed) and everything ever logged
        self.events: list[tuple[str, str]] = []
        self.history: list[tuple[str, str]] = []
        self.wake_hook = None

    # -- variables -------------------------------------------------------

    def fresh(self) -> Var:
        return Var(next(self._ids))

    def record(self, features: Mapping[str, Node] | None = None) -> Record:
        return Record(features or {}, self.fresh())

    def deref(self, n: Node) -> Node:
        bindings = self.bindings
        while isinstance(n, Var):
            nxt = bindings.get(n)
            if nxt is None:
                return n
            n = nxt
        return n

    # -- checkpoints -----------------------------------------------------

    def mark(self) -> Checkpoint:
        return Checkpoint(self.uid, len(self.trail))

    def undo_to(self, cp: Checkpoint) -> None:
        if cp.store_id != self.uid or cp.position > len(self.trail):
            raise StaleCheckpoint(f"checkpoint {cp} is not live in this store")
        trail = self.trail
        while len(trail) > cp.position:
            entry = trail.pop()
            tag = entry[0]
            if tag == _BIND:
                del self.bindings[entry[1]]
            elif tag == _ACTIVATE:
                del self.active[entry[1]]
            elif tag == _WATCH:
                self.watchers[entry[1]].pop()
            elif tag == _DEACTIVATE:
                susp = entry[1]
                self.active[susp.id] = susp
                # keep creation order for residual()
                self.active = dict(sorted(self.active.items()))
            elif tag == _QPUSH:
                self.queue.pop()
            elif tag == _QPOP:
                self.queue.insert(0, entry[1])
            elif tag == _LOG:
                self.events.pop()

    # -- events ----------------------------------------------------------

    def log(self, kind: str, detail: str = "") -> None:
        if self.logging:
            self.events.append((kind, detail))
            self.history.append((kind, detail))
            self.trail.append((_LOG,))

    # -- suspensions -----------------------------------------------------

    def suspend(self, susp, watch: Sequence[Var]) -> None:
        self.active[susp.id] = susp
        self.trail.append((_ACTIVATE, susp.id))
        for v in watch:
            self.watchers.setdefault(v, []).append(susp.id)
            self.trail.append((_WATCH, v))

    def deactivate(self, susp) -> None:
        del self.active[susp.id]
        self.trail.append((_DEACTIVATE, susp))

    def pop_woken(self):
        susp = self.queue.pop(0)
        self.trail.append((_QPOP, susp))
        return susp

    def _wake(self, v: Var) -> None:
        for sid in self.watchers.get(v, ()):
            susp = self.active.get(sid)
            if susp is None:
                continue
            self.deactivate(susp)
            self.queue.append(susp)
            self.trail.append((_QPUSH,))
            if self.wake_hook is not None:
                self.wake_hook(susp)

    def _move_watchers(self, src: Var, dst: Var) -> None:
        for sid in self.watchers.get(src, ()):
            if sid in self.active:
                self.watchers.setdefault(dst, []).append(sid)
                self.trail.append((_WATCH, dst))

    # -- binding ---------------------------------------------------------

    def bind(self, v: Var, value: Node) -> None:
        self.bindings[v] = value
        self.trail.append((_BIND, v))
        if v in self.watchers:
            if isinstance(value, Var):
                self._move_watchers(v, value)
            else:
                self._wake(v)

    def occurs(self, v: Var, n: Node) -> bool:
        stack = [n]
        while stack:
            n = self.deref(stack.pop())
            if n is v:
                return True
            if isinstance(n, Record):
                stack.append(n.tail)
                stack.extend(n.features.values())
            elif isinstance(n, Compound):
                stack.extend(n.args)
        return False

    def features(self, rec: Record) -> tuple[dict[str, Node], Var]:
        """All features of a record along its tail chain, and the open tail."""
        feats = dict(rec.features)
        tail = self.deref(rec.tail)
        while isinstance(tail, Record):
            for k, v in tail.features.items():
                feats.setdefault(k, v)
            tail = self.deref(tail.tail)
        return feats, tail

    def identity(self, rec: Record) -> Var:
        return self.features(rec)[1]

    def get(self, rec: Record, feat: str) -> Node | None:
        """Feature lookup without extending the record."""
        while True:
            val = rec.features.get(feat)
            if val is not None:
                return val
            tail = self.deref(rec.tail)
            if not isinstance(tail, Record):
                return None
            rec = tail


def unify(a: Node, b: Node, s: Store) -> bool:
    """Unify two nodes in ``s``.  On failure the store is left unchanged."""
    cp = s.mark()
    try:
        _unify(a, b, s)
    except UnificationError:
        s.undo_to(cp)
        return False
    return True


def _unify(a: Node, b: Node, s: Store) -> None:
    stack = [(a, b)]
    while stack:
        a, b = stack.pop()
        a = s.deref(a)
        b = s.deref(b)
        if a is b:
            continue
        if isinstance(a, Var):
            if isinstance(b, Var):
                # bind younger to older: keeps long-lived watchers stable
                if a.id < b.id:
                    a, b = b, a
                s.bind(a, b)
                continue
            if s.occurs(a, b):
                raise UnificationError("occurs check")
            s.bind(a, b)
        elif isinstance(b, Var):
            if s.occurs(b, a):
                raise UnificationError("occurs check")
            s.bind(b, a)
        elif isinstance(a, Atom):
            if not (isinstance(b, Atom) and a.name == b.name):
                raise UnificationError(f"{a} vs {b}")
        elif isinstance(a, Compound):
            if not (isinstance(b, Compound) and a.functor == b.functor
                    and len(a.args) == len(b.args)):
                raise UnificationError(f"{a} vs {b}")
            stack.extend(zip(a.args, b.args))
        elif isinstance(a, Record):
            if not isinstance(b, Record):
                raise UnificationError(f"record vs {b}")
            fa, ta = s.features(a)
            fb, tb = s.features(b)
            if ta is tb:
                continue
            only_a = {k: v for k, v in fa.items() if k not in fb}
            only_b = {k: v for k, v in fb.items() if k not in fa}
            shared = [(fa[k], fb[k]) for k in fa if k in fb]
            tail = s.fresh()
            ext_a = Record(only_b, tail) if only_b else tail
            ext_b = Record(only_a, tail) if only_a else tail
            if s.occurs(ta, ext_a) or s.occurs(tb, ext_b):
                raise UnificationError("occurs check")
            s.bind(ta, ext_a)
            s.bind(tb, ext_b)
            stack.extend(shared)
        else:  # pragma: no cover
            raise TypeError(f"not a node: {a!r}")


def rename(template, s: Store, mapping: dict | None = None):
    """Copy ``template`` with every variable replaced by a fresh one.

    Works on single nodes and on anything exposing ``map_nodes`` (clauses,
    literals).  Reentrancy inside the copy is preserved through ``mapping``.
    """
    if mapping is None:
        mapping = {}
    if hasattr(template, "map_nodes"):
        return template.map_nodes(lambda n: _rename(n, s, mapping))
    return _rename(template, s, mapping)


def _rename(n: Node, s: Store, mapping: dict) -> Node:
    n = s.deref(n)
    if isinstance(n, Var):
        v = mapping.get(n)
        if v is None:
            v = mapping[n] = s.fresh()
        return v
    if isinstance(n, Atom):
        return n
    if isinstance(n, Record):
        feats, tail = s.features(n)
        return Record({k: _rename(v, s, mapping) for k, v in feats.items()},
                      _rename(tail, s, mapping))
    return Compound(n.functor, tuple(_rename(a, s, mapping) for a in n.args))


def resolve(n: Node, s: Store, mapping: dict | None = None) -> Node:
    """Detach ``n`` from ``s``: a fully dereferenced copy needing no store.

    Records are flattened and shared records stay shared (keyed by their
    open tail).  Unbound variables map to fresh ``Var`` objects, so later
    bindings made in ``s`` do not show through.
    """
    if mapping is None:
        mapping = {}
    n = s.deref(n)
    if isinstance(n, Var):
        v = mapping.get(n)
        if v is None:
            v = mapping[n] = Var(n.id)
        return v
    if isinstance(n, Atom):
        return n
    if isinstance(n, Record):
        feats, tail = s.features(n)
        key = ("rec", tail)
        out = mapping.get(key)
        if out is None:
            out = mapping[key] = Record({}, resolve(tail, s, mapping))
            out.features = {k: resolve(v, s, mapping) for k, v in feats.items()}
        return out
    return Compound(n.functor, tuple(resolve(a, s, mapping) for a in n.args))


def path_get(n: Node, path: Path, s: Store) -> Node | None:
    """Walk ``path`` from ``n``, extending open records on the way.

    Returns ``None`` (store untouched) when the path runs into an atom or a
    compound term.
    """
    if not path:
        raise ValueError("empty path")
    cp = s.mark()
    for feat in path:
        n = s.deref(n)
        if isinstance(n, (Atom, Compound)):
            s.undo_to(cp)
            return None
        if isinstance(n, Record):
            val = s.get(n, feat)
            if val is not None:
                n = val
                continue
        val = s.fresh()
        if not unify(n, Record({feat: val}, s.fresh()), s):
            s.undo_to(cp)
            return None
        n = val
    return s.deref(n)


# -- rendering -----------------------------------------------------------

_SLASHES = ("/", "\\")
_FUNCTOR_FEATS = ("val", "dir", "arg")


def _is_functor(feats: dict, s: Store) -> bool:
    if not all(k in feats for k in _FUNCTOR_FEATS):
        return False
    d = s.deref(feats["dir"])
    return isinstance(d, Atom) and d.name in _SLASHES


class _Renderer:
    def __init__(self, s: Store, compact: bool):
        self.s = s
        self.compact = compact
        self.var_names: dict[Var, str] = {}
        self.counts: dict[Var, int] = {}
        self.tags: dict[Var, int] = {}

    def count(self, n: Node) -> None:
        s = self.s
        stack = [n]
        while stack:
            n = s.deref(stack.pop())
            if isinstance(n, Record):
                feats, tail = s.features(n)
                seen = self.counts.get(tail, 0)
                self.counts[tail] = seen + 1
                if not seen:
                    stack.extend(feats.values())
            elif isinstance(n, Compound):
                stack.extend(n.args)

    def render(self, n: Node) -> str:
        s = self.s
        n = s.deref(n)
        if isinstance(n, Var):
            name = self.var_names.get(n)
            if name is None:
                name = self.var_names[n] = f"_{len(self.var_names) + 1}"
            return name
        if isinstance(n, Atom):
            return n.name
        if isinstance(n, Compound):
            if n.functor == "^" and len(n.args) == 2:
                left, right = n.args
                ltxt = self.render(left)
                ld = s.deref(left)
                if isinstance(ld, Compound) and ld.functor == "^":
                    ltxt = f"({ltxt})"
                return f"{ltxt}^{self.render(right)}"
            if n.functor == "[]":
                return f"[{','.join(self.render(a) for a in n.args)}]"
            return f"{n.functor}({','.join(self.render(a) for a in n.args)})"
        feats, tail = s.features(n)
        if self.counts.get(tail, 0) > 1 and not self.compact:
            tag = self.tags.get(tail)
            if tag is not None:
                return f"#{tag}"
            tag = self.tags[tail] = len(self.tags) + 1
            return f"#{tag}={self.record_body(feats)}"
        return self.record_body(feats)

    def operand(self, n: Node) -> str:
        txt = self.render(n)
        d = self.s.deref(n)
        if isinstance(d, Record) and txt[0] != "#":
            feats, _ = self.s.features(d)
            if _is_functor(feats, self.s) and not self._extras(feats):
                return f"({txt})"
        return txt

    def _extras(self, feats: dict) -> list[str]:
        if self.compact:
            return []
        return sorted(k for k in feats if k not in _FUNCTOR_FEATS)

    def record_body(self, feats: dict) -> str:
        s = self.s
        if _is_functor(feats, s):
            slash = s.deref(feats["dir"]).name
            if slash == "/":
                core = f"{self.operand(feats['val'])}/{self.operand(feats['arg'])}"
            else:
                core = f"{self.operand(feats['arg'])}\\{self.operand(feats['val'])}"
            extras = self._extras(feats)
            if not extras:
                return core
            body = ",".join(f"{k}:{self.render(feats[k])}" for k in extras)
            return f"({core}){{{body}}}"
        if self.compact:
            cat = s.deref(feats["cat"]) if "cat" in feats else None
            if isinstance(cat, Atom):
                vals = []
                for k in sorted(feats):
                    if k == "cat":
                        continue
                    v = s.deref(feats[k])
                    if isinstance(v, Atom) and not (k == "dir" and v == NONE):
                        vals.append(v.name)
                return cat.name + (f"[{','.join(vals)}]" if vals else "")
        return "[" + ",".join(f"{k}:{self.render(feats[k])}"
                              for k in sorted(feats)) + "]"


def render(n: Node, s: Store | None = None, *, compact: bool = False) -> str:
    """Canonical text for ``n``.

    Features are sorted, variables are numbered ``_1, _2, ...`` in order of
    first occurrence, and records reachable along more than one path are
    tagged ``#k=`` on first print and ``#k`` afterwards.  Records with a
    slash-valued ``dir`` print in categorial shorthand; any features beyond
    val/dir/arg follow in braces.  Alpha-equivalent terms render equally.

    ``compact`` gives a lossy, human-oriented form (``np[nom]\\s``) used
    for derivation trees.
    """
    if s is None:
        s = Store()
    r = _Renderer(s, compact)
    r.count(n)
    return r.render(n)


def render_many(nodes: Sequence[Node], s: Store | None = None) -> list[str]:
    """Render several nodes with one shared variable numbering."""
    if s is None:
        s = Store()
    r = _Renderer(s, False)
    for n in nodes:
        r.count(n)
    return [r.render(n) for n in nodes]


def iter_vars(n: Node, s: Store) -> Iterator[Var]:
    stack = [n]
    while stack:
        n = s.deref(stack.pop())
        if isinstance(n, Var):
            yield n
        elif isinstance(n, Record):
            feats, tail = s.features(n)
            stack.append(tail)
            stack.extend(feats.values())
        elif isinstance(n, Compound):
            stack.extend(n.args)


def atom(name: str) -> Atom:
    return Atom(name)


def record(s: Store, **features: Node) -> Record:
    """Convenience constructor; plain strings become atoms."""
    return Record({k: Atom(v) if isinstance(v, str) else v
                   for k, v in features.items()}, s.fresh())
