"""
Adjunct scope follows word order
================================

"""

from cug import load_fragment, parse

dutch = load_fragment("dutch-core")

# two bracketings of the raising example, two scopes
r = parse("frits marie de laatste tijd lijkt te ontwijken", dutch.program)
for reading in r.readings:
    print(reading.shape)
    print("sem:", reading.text)
    print()

# stacked adjuncts take scope left to right, over the quantified object
for sentence in ["johan opzettelijk een ongeluk veroorzaakt",
                 "johan volgens mij opzettelijk een ongeluk veroorzaakt",
                 "johan opzettelijk volgens mij marie geen cadeau geeft"]:
    (reading,) = parse(sentence, dutch.program).readings
    print(reading.text)
