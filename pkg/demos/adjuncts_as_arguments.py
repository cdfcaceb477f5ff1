"""
Adjuncts as arguments, evaluated late
=====================================

"""

from cug import Store, lexical_edges, load_fragment, parse, parse_grammar, render
from cug.fragments import data_path

dutch = load_fragment("dutch-core")

# looking up the verb does not enumerate its adjunct variants: the
# constraint is parked on the still-unknown argument
s = Store()
(edge,) = lexical_edges(["veroorzaakt"], dutch.program, s)
print(render(edge.category, s, compact=True))
print(len(edge.pending), "suspended goal(s)")

# each reduction on the verb binds one more argument and wakes the goal
# for exactly one step
r = parse("johan opzettelijk een ongeluk veroorzaakt", dutch.program, log=True)
for kind, detail in r.events:
    if kind in ("reduce", "wake", "target"):
        print(f"{kind:7} {detail}")
print(r.text())

# a verb whose category is left completely open still gets one when the
# surrounding derivation demands it
text = data_path("dutch-core.cug").read_text() + "\nlex([verbum], X).\n"
open_verb = parse_grammar(text).program()
r = parse("johan opzettelijk een ongeluk verbum", open_verb)
for d in r.derivations:
    (leaf,) = [n for n in d.nodes() if n.tokens == ("verbum",)]
    print(render(leaf.category, compact=True))
