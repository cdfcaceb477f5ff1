"""
Context-free forest first, constraints second
=============================================

"""

import time

from cug import cf_parse, load_fragment, parse, recover, tokenize, validate_backbone

dutch = load_fragment("dutch-core")

# the backbone packs all context-free analyses as (rule, start, end,
# daughter spans) items
tokens = tokenize("an bea cor wil zien kussen")
items = cf_parse(tokens, dutch.program.backbone)
for item in sorted(items, key=lambda i: (i.P0, -i.P)):
    print(item)

# recovery walks the forest head first and applies the constraints
for d in recover(items, dutch.program, tokens=tokens):
    print(d.tree(compact=True))

# the backbone over-generates; the constraints filter
bad = tokenize("an wil bea kussen")
print(len(cf_parse(bad, dutch.program.backbone)), "items,",
      len(list(recover(cf_parse(bad, dutch.program.backbone), dutch.program, tokens=bad))),
      "derivations")

# it must never under-generate
print(validate_backbone(dutch.program, dutch.corpus))

# both strategies on the whole corpus
for strategy in ("sr", "forest"):
    t0 = time.perf_counter()
    for e in dutch.corpus:
        parse(list(e.tokens), dutch.program, strategy=strategy)
    print(f"{strategy:6} {1000 * (time.perf_counter() - t0):.1f} ms")
