"""Randomized checks of unification and of delayed constraint evaluation."""

import itertools

from hypothesis import given, settings
from hypothesis import strategies as st

from cug.engine import Literal, residual, solve
from cug.fragments import load_fragment
from cug.grammar import parse_grammar
from cug.parser import parse
from cug.terms import Atom, Compound, Record, Store, Var, rename, render, unify

ENGINE = settings(max_examples=1000, deadline=None)

# -- abstract terms and an independent unifier -------------------------------
#
# ('v', name) | ('a', name) | ('f', name, args) | ('r', ((feat, term), ...))

VARS = ["X", "Y", "Z", "W"]

leaf = st.one_of(st.sampled_from(VARS).map(lambda n: ("v", n)),
                 st.sampled_from(["a", "b"]).map(lambda n: ("a", n)))


def _extend(children):
    compound = st.tuples(st.sampled_from(["f", "g"]),
                         st.lists(children, min_size=1, max_size=2)).map(
        lambda t: ("f", t[0], tuple(t[1])))
    rec = st.dictionaries(st.sampled_from(["p", "q", "r"]), children, max_size=2).map(
        lambda d: ("r", tuple(sorted(d.items()))))
    return st.one_of(compound, rec)


terms = st.recursive(leaf, _extend, max_leaves=6)


def build(t, s, env):
    kind = t[0]
    if kind == "v":
        if t[1] not in env:
            env[t[1]] = s.fresh()
        return env[t[1]]
    if kind == "a":
        return Atom(t[1])
    if kind == "f":
        return Compound(t[1], tuple(build(a, s, env) for a in t[2]))
    return Record({k: build(v, s, env) for k, v in t[1]}, s.fresh())


class Oracle:
    """Functional unification over a substitution dict, with occurs check."""

    def __init__(self):
        self.sub = {}
        self.n = 0

    def fresh(self):
        self.n += 1
        return ("v", f"_t{self.n}")

    def load(self, t):
        # give each record occurrence its own open tail
        if t[0] == "f":
            return ("f", t[1], tuple(self.load(a) for a in t[2]))
        if t[0] == "r":
            return ("r", {k: self.load(v) for k, v in t[1]}, self.fresh())
        return t

    def walk(self, t):
        while t[0] == "v" and t in self.sub:
            t = self.sub[t]
        return t

    def flat(self, r):
        feats = dict(r[1])
        tail = self.walk(r[2])
        while tail[0] == "r":
            for k, v in tail[1].items():
                feats.setdefault(k, v)
            tail = self.walk(tail[2])
        return feats, tail

    def occurs(self, v, t):
        t = self.walk(t)
        if t == v:
            return True
        if t[0] == "f":
            return any(self.occurs(v, a) for a in t[2])
        if t[0] == "r":
            return any(self.occurs(v, x) for x in t[1].values()) or self.occurs(v, t[2])
        return False

    def bind(self, v, t):
        if self.occurs(v, t):
            return False
        self.sub[v] = t
        return True

    def unify(self, a, b):
        a, b = self.walk(a), self.walk(b)
        if a == b and a[0] in "va":
            return True
        if a[0] == "v":
            return self.bind(a, b)
        if b[0] == "v":
            return self.bind(b, a)
        if a[0] != b[0]:
            return False
        if a[0] == "a":
            return a == b
        if a[0] == "f":
            return (a[1] == b[1] and len(a[2]) == len(b[2])
                    and all(self.unify(x, y) for x, y in zip(a[2], b[2])))
        fa, ta = self.flat(a)
        fb, tb = self.flat(b)
        if ta == tb:
            return True
        tail = self.fresh()
        only_a = {k: v for k, v in fa.items() if k not in fb}
        only_b = {k: v for k, v in fb.items() if k not in fa}
        if not self.bind(ta, ("r", only_b, tail) if only_b else tail):
            return False
        if not self.bind(tb, ("r", only_a, tail) if only_a else tail):
            return False
        return all(self.unify(fa[k], fb[k]) for k in fa if k in fb)

    def normal(self, roots):
        names = {}

        def nf(t):
            t = self.walk(t)
            if t[0] == "v":
                return ("v", names.setdefault(t, len(names)))
            if t[0] == "a":
                return t
            if t[0] == "f":
                return ("f", t[1], tuple(nf(a) for a in t[2]))
            feats, _ = self.flat(t)
            return ("r", tuple((k, nf(feats[k])) for k in sorted(feats)))

        return [nf(r) for r in roots]


def normal(roots, s):
    """The same normal form read off a live store."""
    names = {}

    def nf(t):
        t = s.deref(t)
        if isinstance(t, Var):
            return ("v", names.setdefault(t.id, len(names)))
        if isinstance(t, Atom):
            return ("a", t.name)
        if isinstance(t, Compound):
            return ("f", t.functor, tuple(nf(a) for a in t.args))
        feats, _ = s.features(t)
        return ("r", tuple((k, nf(feats[k])) for k in sorted(feats)))

    return [nf(r) for r in roots]


def live(pairs):
    s, env = Store(), {}
    return s, [(build(a, s, env), build(b, s, env)) for a, b in pairs]


def oracle_run(pairs):
    o = Oracle()
    loaded = [(o.load(a), o.load(b)) for a, b in pairs]
    ok = all(o.unify(a, b) for a, b in loaded)
    return ok, (o.normal([x for p in loaded for x in p]) if ok else None)


def store_run(pairs):
    s, built = live(pairs)
    ok = all(unify(a, b, s) for a, b in built)
    return ok, (normal([x for p in built for x in p], s) if ok else None)


@ENGINE
@given(terms, terms)
def test_unify_agrees_with_oracle(t1, t2):
    assert store_run([(t1, t2)]) == oracle_run([(t1, t2)])


@ENGINE
@given(terms, terms)
def test_unifier_makes_terms_equal(t1, t2):
    s, [(a, b)] = live([(t1, t2)])
    if unify(a, b, s):
        assert normal([a], s) == normal([b], s)
        assert render(a, s) == render(b, s)


@ENGINE
@given(terms, terms)
def test_unify_is_symmetric(t1, t2):
    ok1, n1 = store_run([(t1, t2)])
    ok2, n2 = store_run([(t2, t1)])
    assert ok1 == ok2
    if ok1:
        assert normal_swap(n1) == normal_swap([n2[1], n2[0]])


def normal_swap(nf):
    """Renumber variables by first occurrence so lists can be compared."""
    names = {}

    def walk(t):
        if t[0] == "v":
            return ("v", names.setdefault(t[1], len(names)))
        if t[0] == "f":
            return ("f", t[1], tuple(walk(a) for a in t[2]))
        if t[0] == "r":
            return ("r", tuple((k, walk(v)) for k, v in t[1]))
        return t

    return [walk(t) for t in nf]


@ENGINE
@given(st.lists(st.tuples(terms, terms), min_size=2, max_size=3))
def test_unification_order_is_irrelevant(pairs):
    ok1, n1 = store_run(pairs)
    ok2, _ = store_run(list(reversed(pairs)))
    assert ok1 == ok2
    if ok1:
        s, built = live(list(reversed(pairs)))
        for a, b in built:
            assert unify(a, b, s)
        assert normal_swap(normal([x for p in reversed(built) for x in p], s)) \
            == normal_swap(n1)


@ENGINE
@given(terms, terms)
def test_failure_leaves_store_untouched(t1, t2):
    s, [(a, b)] = live([(t1, t2)])
    before = (render(a, s), render(b, s), len(s.trail))
    if not unify(a, b, s):
        assert (render(a, s), render(b, s), len(s.trail)) == before


@ENGINE
@given(terms, terms)
def test_undo_restores(t1, t2):
    s, [(a, b)] = live([(t1, t2)])
    before = (render(a, s), render(b, s))
    cp = s.mark()
    unify(a, b, s)
    s.undo_to(cp)
    assert (render(a, s), render(b, s)) == before
    assert s.trail == []


@ENGINE
@given(terms, terms)
def test_unify_is_idempotent(t1, t2):
    s, [(a, b)] = live([(t1, t2)])
    if unify(a, b, s):
        n = len(s.trail)
        assert unify(a, b, s) and len(s.trail) == n


@ENGINE
@given(st.sampled_from(VARS), terms)
def test_occurs_check(name, t):
    s, env = Store(), {}
    v = build(("v", name), s, env)
    body = build(t, s, env)
    wrapped = Compound("f", (body,))
    mentions = name in repr(t)
    assert unify(v, wrapped, s) == (not mentions)


# -- delayed versus eager constraint solving --------------------------------

DUTCH = load_fragment("dutch-core").program


def cat(expr, s):
    return rename(parse_grammar(f":- target {expr}.").target, s)


def solutions(goals_of, eager):
    s = Store()
    goals, out = goals_of(s)
    found = []
    for res in solve(goals, DUTCH, s, eager=eager):
        assert residual(s) == [] and res == []
        found.append(render(out, s))
    return sorted(found)


def spine(args, result="S"):
    for a in reversed(args):
        result = f"{a}\\({result})" if "\\" in result or "/" in result else f"{a}\\{result}"
    return result


@st.composite
def adjunct_frames(draw):
    """A verb frame and a candidate output with adjuncts spliced in."""
    n = draw(st.integers(1, 3))
    args = ["NP"] * n
    out = []
    for a in args:
        out.extend(["ADJ"] * draw(st.integers(0, 2)))
        out.append(a)
    if draw(st.booleans()):
        # occasionally a shape add_adjuncts cannot produce
        i = draw(st.integers(0, len(out) - 1))
        out[i] = draw(st.sampled_from(["N", "ADJ"]))
    return spine(args), spine(out)


@settings(max_examples=1000, deadline=None)
@given(adjunct_frames())
def test_delayed_adjuncts_match_eager(frame):
    verb, shape = frame

    def delayed(s):
        out = s.fresh()
        return [Literal("add_adjuncts", (out, cat(verb, s))),
                Literal("=", (out, cat(shape, s)))], out

    def eager(s):
        out = s.fresh()
        return [Literal("=", (out, cat(shape, s))),
                Literal("add_adjuncts", (out, cat(verb, s)))], out

    assert solutions(delayed, False) == solutions(eager, True)


@st.composite
def division_frames(draw):
    """A cluster-verb category and a divided candidate of random depth."""
    inner = draw(st.sampled_from(["NP\\S", "NP\\(NP\\S)"]))
    depth = draw(st.integers(0, 3))
    shared = [draw(st.sampled_from(["NP", "NP", "ADJ"])) for _ in range(depth)]
    left, right = list(shared), list(shared)
    if depth and draw(st.booleans()):
        # break the sharing on one side
        right[draw(st.integers(0, depth - 1))] = "N"
    verb = f"({inner})/(NP\\S)"
    shape = f"({spine(left, inner)})/({spine(right, 'NP' + chr(92) + 'S')})"
    return verb, shape


@settings(max_examples=1000, deadline=None)
@given(division_frames())
def test_delayed_division_matches_eager(frame):
    verb, shape = frame

    def delayed(s):
        out = s.fresh()
        return [Literal("cross_serial", (out, cat(verb, s))),
                Literal("=", (out, cat(shape, s)))], out

    def eager(s):
        out = s.fresh()
        return [Literal("=", (out, cat(shape, s))),
                Literal("cross_serial", (out, cat(verb, s)))], out

    assert solutions(delayed, False) == solutions(eager, True)


def test_division_frames_include_successes():
    # guard against a generator that only ever produces failures
    def goals(s):
        out = s.fresh()
        return [Literal("=", (out, cat("(NP\\(NP\\S))/(NP\\(NP\\S))", s))),
                Literal("cross_serial", (out, cat("(NP\\S)/(NP\\S)", s)))], out
    assert len(solutions(goals, True)) == 1


# -- adjunct scope follows word order ----------------------------------------

ADJUNCTS = {"opzettelijk": "deliberately", "volgens mij": "according_to_me",
            "de laatste tijd": "lately"}
OBJECTS = ["marie", "een ongeluk", "geen cadeau"]


def operators(term, s, wanted):
    found = []
    stack = [term]
    while stack:
        t = s.deref(stack.pop())
        if isinstance(t, Compound):
            if t.functor in wanted:
                found.append(t.functor)
            stack.extend(reversed(t.args))
    return found


@st.composite
def adjunct_sentences(draw):
    adj = draw(st.permutations(list(ADJUNCTS)))[:draw(st.integers(2, 3))]
    verb = draw(st.sampled_from(["veroorzaakt", "geeft"]))
    objs = [draw(st.sampled_from(OBJECTS)) for _ in range(1 if verb == "veroorzaakt" else 2)]
    slots = draw(st.lists(st.integers(0, len(objs)), min_size=len(adj), max_size=len(adj)))
    slots.sort()
    words, k = ["johan"], 0
    for pos in range(len(objs) + 1):
        while k < len(adj) and slots[k] == pos:
            words.append(adj[k])
            k += 1
        if pos < len(objs):
            words.append(objs[pos])
    words.append(verb)
    return " ".join(words), [ADJUNCTS[a] for a in adj]


@settings(max_examples=200, deadline=None)
@given(adjunct_sentences())
def test_adjunct_scope_follows_word_order(case):
    sentence, order = case
    r = parse(sentence, DUTCH)
    assert r.readings, sentence
    s = Store()
    for reading in r.readings:
        assert operators(reading.form, s, set(order)) == order, (sentence, reading.text)


def test_scope_generator_covers_all_orders():
    seen = set()
    for perm in itertools.permutations(ADJUNCTS, 2):
        sentence = "johan " + " ".join(perm) + " marie veroorzaakt"
        r = parse(sentence, DUTCH)
        (reading,) = r.readings
        seen.add(tuple(operators(reading.form, Store(), set(ADJUNCTS.values()))))
    assert len(seen) == 6
