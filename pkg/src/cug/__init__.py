"""Categorial unification grammar with lazily evaluated recursive constraints.

Typical use::

    from cug import load_fragment, parse
    frag = load_fragment("dutch-core")
    result = parse("an bea wil kussen", frag.program)
    print(result.readings[0].text)      # want(an,kiss(an,bea))
"""

from .engine import (BlockDecl, Clause, DepthLimitExceeded, Flounder, Literal,
                     Program, force_residual, residual, should_suspend, solve)
from .forest import ForestItem, cf_parse, recover, validate_backbone
from .fragments import CorpusEntry, Fragment, load_fragment, parse_corpus
from .grammar import (BA, FA, GrammarError, GrammarSource, apply_rule,
                      expand_target, load_grammar, parse_grammar)
from .parser import (Derivation, LexEdge, ParseResult, Reading, UnknownWord,
                     lexical_edges, parse, readings, sr_parse, tokenize)
from .terms import (Atom, Compound, Record, StaleCheckpoint, Store, Var,
                    path_get, rename, render, resolve, unify)

__all__ = [
    "Atom", "BA", "BlockDecl", "Clause", "Compound", "CorpusEntry",
    "DepthLimitExceeded", "Derivation", "FA", "Flounder", "ForestItem",
    "Fragment", "GrammarError", "GrammarSource", "LexEdge", "Literal",
    "ParseResult", "Program", "Reading", "Record", "StaleCheckpoint", "Store",
    "UnknownWord", "Var", "apply_rule", "cf_parse", "expand_target",
    "force_residual", "lexical_edges", "load_fragment", "load_grammar",
    "parse", "parse_corpus", "parse_grammar", "path_get", "readings",
    "recover", "rename", "render", "residual", "resolve", "should_suspend",
    "solve", "sr_parse", "tokenize", "unify", "validate_backbone",
]
