import pytest

from cug.engine import Literal, solve
from cug.fragments import FRAGMENTS, data_path, load_fragment
from cug.grammar import (BA, FA, BackboneRule, GrammarError, apply_rule,
                         expand_target, parse_grammar, source_text)
from cug.terms import Atom, Compound, Record, Store, Var, path_get, rename, render, unify


def target(expr):
    return parse_grammar(f":- target {expr}.").target


def live(expr, s):
    return rename(target(expr), s)


def test_fact_with_shared_variable():
    g = parse_grammar(":- target S.\nf(X, X).\n")
    (c,) = g.clauses
    a, b = c.head.args
    assert isinstance(a, Var) and a is b
    assert c.body == ()


def test_lexical_entry_with_body():
    g = parse_grammar(":- target S.\nlex(walks, X) :- iv(X), sv_agreement(sg3, X).\n"
                      "iv(NP\\S).\nsv_agreement(_, _).\n")
    c = g.lexical_clauses[0]
    assert c.head.args[0] == Atom("walks")
    assert [b.pred for b in c.body] == ["iv", "sv_agreement"]
    assert c.body[0].args[0] is c.head.args[1] is c.body[1].args[1]


def test_shorthand_expansion():
    t = target("NP\\(NP\\S)")
    assert render(t) == ("[cat:np,dir:none]\\([cat:np,dir:none]\\[cat:s,dir:none])")
    s = Store()
    assert s.get(t, "dir") == Atom("\\")
    inner = s.get(t, "val")
    assert s.get(inner, "dir") == Atom("\\")
    assert s.get(s.get(inner, "val"), "cat") == Atom("s")


def test_slash_associativity():
    # / chains to the left, \\ to the right
    assert render(target("S/NP/N"), compact=True) == "(s/np)/n"
    assert render(target("N\\NP\\S"), compact=True) == "n\\(np\\s)"


def test_mixed_slashes_need_parentheses():
    with pytest.raises(GrammarError, match="parenthesize"):
        parse_grammar(":- target NP\\S/NP.")
    with pytest.raises(GrammarError, match="parenthesize"):
        parse_grammar(":- target S/NP\\S.")
    assert render(target("(NP\\S)/NP"), compact=True) == "(np\\s)/np"


def test_caret_is_right_associative():
    t = target("[sem:A^B^C]")
    sem = Store().get(t, "sem")
    assert isinstance(sem, Compound) and sem.functor == "^"
    assert isinstance(sem.args[1], Compound) and sem.args[1].functor == "^"


def test_macro_occurrences_are_independent():
    g = parse_grammar(":- target S.\nf(NP, NP).\n")
    a, b = g.clauses[0].head.args
    assert a is not b
    s = Store()
    x, y = rename(a, s), rename(b, s)
    assert unify(x, Record({"case": Atom("nom")}, s.fresh()), s)
    assert render(y, s) == "[cat:np,dir:none]"


def test_annotation_on_variable():
    g = parse_grammar(":- target S.\nf(X[case:nom], X).\n")
    a, b = g.clauses[0].head.args
    assert a is b
    assert render(a) == "[case:nom]"


def test_quoted_atoms_and_lists():
    g = parse_grammar(":- target S.\nlex([de, laatste, tijd], [vc:'-', dir:'\\\\']).\n")
    head = g.clauses[0].head
    assert head.args[0] == Compound("[]", (Atom("de"), Atom("laatste"), Atom("tijd")))
    assert Store().get(head.args[1], "vc") == Atom("-")


def test_directives():
    g = parse_grammar(":- target S.\n:- block p/2 blocks [2].\n:- external q/1.\n"
                      ":- rules fa.\np(X, Y) :- q(X).\n")
    assert g.blocks[0].watched == (2,)
    assert ("q", 1) in g.externals
    assert g.rules == ("fa",)


def test_backbone_section():
    g = parse_grammar(":- target S.\ncfg V -> NP V : ba.\ncfg lex NP : [an], [de, man].\n"
                      "cfg start V.\n")
    bb = g.backbone
    assert bb.rules == [BackboneRule("V", ("NP", "V"), "ba")]
    assert bb.lexical["NP"] == [("an",), ("de", "man")]
    assert bb.start == "V"
    with pytest.raises(ValueError):
        BackboneRule("V", ("NP",), "fa")


@pytest.mark.parametrize("text, message", [
    (":- target S.\nf(X :- g.\n", "line 2"),
    (":- target S.\nf(X) :- g(X).\n", "undefined predicate g/1"),
    (":- target S.\n:- target NP.\n", "duplicate target"),
    ("f(a).\n", "no ':- target'"),
    (":- target S.\n:- block p/1 blocks [2].\np(a).\n", "bad block"),
    (":- target S.\nf([a:b, a:c]).\n", "duplicate feature"),
    (":- target S.\nf(a) :- X = [a:b], X = [a:c], g.\n", "undefined"),
    (":- target S.\nf(X[a:b][a:c]).\n", "inconsistent"),
    (":- target S.\n# oops\n", "unexpected character"),
])
def test_errors(text, message):
    with pytest.raises(GrammarError, match=message.replace("(", r"\(")):
        parse_grammar(text)


def test_error_reports_position():
    with pytest.raises(GrammarError) as exc:
        parse_grammar(":- target S.\n\n  f(, a).\n")
    assert (exc.value.line, exc.value.col) == (3, 5)


@pytest.mark.parametrize("name", FRAGMENTS)
def test_round_trip(name):
    g = parse_grammar(data_path(f"{name}.cug").read_text())
    once = source_text(g)
    twice = source_text(parse_grammar(once))
    assert once == twice
    assert len(parse_grammar(once).clauses) == len(g.clauses)


def test_round_trip_preserves_reentrancy():
    g = parse_grammar(":- target S.\nf(X, [a:X, b:X]) :- X = [c:d].\n")
    g2 = parse_grammar(source_text(g))
    c = g2.clauses[0]
    s = Store()
    rec = c.head.args[1]
    assert s.get(rec, "a") is s.get(rec, "b") is c.head.args[0]


def test_english_fragment_contents():
    g = load_fragment("english-agreement").source
    heads = {(c.head.pred, render(c.head.args[0])) for c in g.clauses}
    assert ("lex", "[walks]") in heads and ("lex", "[kisses]") in heads
    sv = [c for c in g.clauses if c.head.pred == "sv_agreement"]
    assert len(sv) >= 2 and any(c.body for c in sv)


def test_dutch_fragment_contents():
    p = load_fragment("dutch-core").program
    for key in [("add_adjuncts", 2), ("add_adj", 7), ("cross_serial", 2),
                ("division", 2), ("division", 4), ("verb_cluster", 1)]:
        assert key in p.clauses
    assert ("add_adj", 7) in p.blocks
    lex = p.lexicon()
    for word in [("lijkt",), ("te", "ontwijken"), ("wil",), ("zien",), ("voornam",)]:
        assert word in lex


# -- application -----------------------------------------------------------

def test_ba_copies_argument_vc():
    s = Store()
    kussen = live("NP\\(NP\\S)", s)
    bea = live("NP[vc:'-']", s)
    res = apply_rule(BA, kussen, bea, s)
    assert render(res, s, compact=True) == "np\\s"
    assert path_get(res, ["vc"], s) == Atom("-")


def test_fa_binds_argument_vc():
    s = Store()
    wil = live("(NP\\(NP\\S))/(NP\\(NP\\S))[vc:'+']", s)
    kussen = live("NP\\(NP\\S)", s)
    res = apply_rule(FA, wil, kussen, s)
    assert res is not None
    assert path_get(kussen, ["vc"], s) == Atom("+")
    assert render(res, s, compact=True) == "np\\(np\\s)"


def test_head_semantics_is_shared():
    s = Store()
    f = live("(NP\\S)[sem:walk]", s)
    res = apply_rule(BA, f, live("NP", s), s)
    assert path_get(res, ["sem"], s) == Atom("walk")


def test_direction_mismatch():
    s = Store()
    f = live("NP\\S", s)
    before = render(f, s)
    assert apply_rule(FA, f, live("NP", s), s) is None
    assert render(f, s) == before


def test_atomic_category_is_no_functor():
    s = Store()
    assert apply_rule(FA, live("NP", s), live("NP", s), s) is None
    assert apply_rule(BA, live("NP", s), live("NP", s), s) is None


def test_apply_then_undo():
    s = Store()
    f, a = live("(NP\\S)/NP", s), live("NP[case:acc]", s)
    before = render(f, s), render(a, s)
    cp = s.mark()
    assert apply_rule(FA, f, a, s) is not None
    s.undo_to(cp)
    assert (render(f, s), render(a, s)) == before


def test_application_wakes_suspended_goals():
    p = load_fragment("dutch-core").program
    s = Store()
    verb, tv = s.fresh(), live("NP\\(NP\\S)", s)
    for _ in solve([Literal("add_adjuncts", (verb, tv))], p, s):
        res = apply_rule(BA, verb, live("NP", s), s)
        assert res is not None
        assert len(s.queue) == 1
        break


def test_expand_target():
    s = Store()
    p = load_fragment("dutch-core").program
    t = expand_target(p, s)
    assert render(t, s) == "[cat:s,dir:none]"
    assert expand_target(p, s) is not t
    g = parse_grammar(":- target NP\\S.")
    assert render(expand_target(g.program(), s), s, compact=True) == "np\\s"
    p.target, saved = None, p.target
    try:
        with pytest.raises(GrammarError):
            expand_target(p, s)
    finally:
        p.target = saved
