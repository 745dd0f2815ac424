"""Regenerate src/geopulse/data/lexicon.csv from pattern's en-sentiment.xml.

Usage: python tools/build_lexicon.py path/to/en-sentiment.xml > src/geopulse/data/lexicon.csv

The XML ships inside the textblob wheel (textblob/en/en-sentiment.xml,
PDDL licensed). Polarity per form is the mean over its senses; forms whose
mean is zero are dropped. Forms with intensity != 1 become intensifiers
(never terms), plus a short hand-picked list of adverbs.
"""

import sys
import xml.etree.ElementTree as ET
from collections import defaultdict
from statistics import fmean

NEGATORS = [
    "not", "no", "never", "n't", "nor", "neither", "nobody", "nothing",
    "cannot", "can't", "don't", "doesn't", "didn't", "isn't", "wasn't",
    "aren't", "weren't", "won't", "wouldn't", "shouldn't", "couldn't",
]

# adverbs the XML does not mark as modifiers
EXTRA_INTENSIFIERS = {
    "extremely": 1.5, "incredibly": 1.5, "absolutely": 1.4, "totally": 1.3,
    "highly": 1.3, "so": 1.2, "too": 1.2, "quite": 1.1,
    "slightly": 0.5, "somewhat": 0.7, "barely": 0.4,
}

EMOTICONS = {
    1.0: ["<3", ">:D", ":-D", ":D", "=-D", "=D", "X-D", "x-D"],
    0.75: [">:P", ":-P", ":P", ":-p", ":p", ":-b", ":c)", ":o)", ":^)"],
    0.5: [">:)", ":-)", ":)", "=)", "=]", ":]", ":}", ":>", ":3"],
    0.25: [">;]", ";-)", ";)", ";-]", ";]", ";D", ";^)"],
    0.05: [">:o", ":-O", ":O", ":o", ":-o", "o_O", "o.O"],
    -0.25: [">:/", ":-/", ":/", ":\\", ">:\\", ":-s", ":S", ":-S"],
    -0.75: [">:[", ":-(", ":(", "=(", ":-[", ":[", ":{", ":-<", ":-c", "=/"],
    -1.0: [":'(", ":'''(", ";'("],
}


def main(path):
    polarity = defaultdict(list)
    intensity = defaultdict(list)
    for word in ET.parse(path).getroot().iter("word"):
        form = word.get("form").lower()
        if " " in form:
            continue
        polarity[form].append(float(word.get("polarity")))
        intensity[form].append(float(word.get("intensity", "1.0")))

    out = sys.stdout
    out.write("# derived from pattern en-sentiment.xml (PDDL); see tools/build_lexicon.py\n")
    out.write("kind,surface,value\n")
    boosters = dict(EXTRA_INTENSIFIERS)
    for form in intensity:
        i = round(fmean(intensity[form]), 4)
        if i != 1.0:
            boosters[form] = i
    for form in sorted(polarity):
        p = round(fmean(polarity[form]), 4)
        if p != 0.0 and form not in NEGATORS and form not in boosters:
            out.write(f"term,{form},{p}\n")
    for form in sorted(boosters):
        out.write(f"intensifier,{form},{boosters[form]}\n")
    for form in NEGATORS:
        out.write(f"negator,{form},-1\n")
    for value, faces in EMOTICONS.items():
        for face in faces:
            out.write(f'emoticon,"{face}",{value}\n' if "," in face else f"emoticon,{face},{value}\n")


if __name__ == "__main__":
    main(sys.argv[1])
