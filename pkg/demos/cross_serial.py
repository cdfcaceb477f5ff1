"""
Cross-serial verb clusters
==========================

"""

from cug import load_fragment, parse, parse_grammar
from cug.fragments import data_path

dutch = load_fragment("dutch-core")

# cluster verbs take the verbal complement with all its leftward arguments
# still pending, so the NPs line up crosswise with the verbs
for sentence in ["an bea wil kussen",
                 "an bea cor wil zien kussen",
                 "an wil bea kussen",
                 "an zich bea voornam te kussen",
                 "an zich voornam bea te kussen"]:
    r = parse(sentence, dutch.program)
    sem = r.readings[0].text if r.readings else ""
    print(f"{'+' if r.grammatical else '-'} {sentence:32} {sem}")

print(parse("an bea cor wil zien kussen", dutch.program).text())

# the cluster marking is what keeps an NP out of the cluster; drop it and
# the bad order goes through
text = data_path("dutch-core.cug").read_text()
relaxed = parse_grammar(text.replace("verb_cluster([arg:[vc:'+']]).",
                                     "verb_cluster(_).")).program()
print(parse("an wil bea kussen", relaxed).derivation_count)
