"""
Subject-verb agreement with a recursive constraint
==================================================

"""

from cug import Store, lexical_edges, load_fragment, parse, path_get, render

english = load_fragment("english-agreement")

# the agreement constraint walks down the verb's result spine until it
# finds the subject slot
s = Store()
for word in ["walks", "kisses"]:
    (edge,) = lexical_edges([word], english.program, s)
    print(f"{word:8} {render(edge.category, s, compact=True)}")

# the intransitive verb carries sg3 on its argument, the transitive one a
# level further down
(walks,) = lexical_edges(["walks"], english.program, s)
(kisses,) = lexical_edges(["kisses"], english.program, s)
print(render(path_get(walks.category, ["arg", "agr"], s), s))
print(render(path_get(kisses.category, ["val", "arg", "agr"], s), s))

# judgments
for sentence in ["john walks", "they walk", "they walks", "john kisses mary"]:
    r = parse(sentence, english.program)
    print(f"{'+' if r.grammatical else '-'} {sentence}")
