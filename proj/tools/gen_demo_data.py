#!/usr/bin/env python3
"""Regenerates the bundled demo word lists and tagged corpus under data/demo/.

Requires the `wordfreq` package (only for regeneration; the generated files
are committed). Output is deterministic.
"""
import hashlib
import pathlib
import random
import re

import wordfreq

OUT = pathlib.Path(__file__).resolve().parent.parent / "data" / "demo"
FREQ_SIZE = 12000
LEXICON_OVERLAP = 4373

TAGS = {
    "PRON": "i you we they he she me my our their it myself".split(),
    "NOUN": """dog cat house car train platform people family friend school
        university work job money time day week year morning afternoon night
        city home water food book music game film story idea ideas skills area
        change team world children child student teacher doctor office street
        road park garden tree river door window phone computer letter name
        weather coffee tea dinner lunch breakfast party holiday beach shop
        market church hospital station airport bus ticket bed room kitchen
        table chair picture photo paper news problem question answer plan
        life health history language country bank hotel restaurant""".split(),
    "VERB": """love like walk walking work make go see know want need help
        play read write eat drink cook run live buy sell open close call
        meet wait watch listen learn teach arrive leave start stop finish
        visit travel sleep drive think feel give take bring find keep
        provide build move change share enjoy remember forget""".split(),
    "ADJ": """good bad big small new old young happy sad beautiful hot cold
        busy quiet important different difficult easy great best free full
        strong early late long short cheap expensive friendly famous
        wonderful local whole open""".split(),
    "ADV": """always never often sometimes today tomorrow yesterday now soon
        together quickly slowly really very here there again already""".split(),
    "NUM": "one two three four five six seven ten twenty hundred".split(),
    "PROPN": """sunday monday friday saturday london paris john mary david
        sarah england france christmas june july""".split(),
    "DET": "the a an this that every some".split(),
    "ADP": "on in at to from with for near after before".split(),
    "AUX": "will can must should".split(),
    "CCONJ": "and but".split(),
    "PART": "not".split(),
}

TEMPLATES = [
    "PRON VERB DET NOUN ADP PROPN",
    "PRON VERB VERB ADP DET PROPN NOUN",
    "DET ADJ NOUN VERB ADV",
    "PRON AUX VERB DET ADJ NOUN ADV",
    "NUM ADJ NOUN VERB ADP DET NOUN",
    "PROPN VERB ADP DET ADJ NOUN ADP PROPN",
    "ADV PRON VERB NUM NOUN",
    "PRON VERB ADJ NOUN CCONJ ADJ NOUN",
    "DET NOUN ADP DET NOUN VERB ADJ",
    "PRON PART VERB DET NOUN ADV",
    "PROPN CCONJ PROPN VERB DET NOUN ADP NOUN",
    "PRON VERB DET ADJ NOUN ADP DET NOUN ADV",
]

EXTRA_SIGNS = """we-all we-do both-forward open-minded multiple-different
    fs_chris fs_wood fs_john""".split()


def keep_in_lexicon(word: str) -> bool:
    # Deterministic ~30% dropout: frequent words with no dictionary sign.
    h = int(hashlib.sha256(word.encode()).hexdigest()[:8], 16)
    return h % 10 >= 3


def main() -> None:
    OUT.mkdir(parents=True, exist_ok=True)
    raw = wordfreq.top_n_list("en", 40000)
    freq = []
    seen = set()
    for w in raw:
        if re.fullmatch("[a-z]+", w) and (len(w) > 1 or w in ("i", "a")) and w not in seen:
            seen.add(w)
            freq.append(w)
        if len(freq) == FREQ_SIZE:
            break

    tagged_tags = ("PRON", "NOUN", "VERB", "ADJ", "ADV", "NUM", "PROPN")
    tagged_words = {w for tag in tagged_tags for w in TAGS[tag]}
    lexicon = []
    for w in freq:
        if len(lexicon) == LEXICON_OVERLAP:
            break
        if w in tagged_words or keep_in_lexicon(w):
            lexicon.append(w)
    lexicon_sorted = sorted(set(lexicon) | set(EXTRA_SIGNS))

    vocab1500 = [w for w in freq if w in set(lexicon)][:1500]
    # The corpus only draws content words that made it into the 1500 vocabulary.
    in_vocab = set(vocab1500)
    usable = {tag: [w for w in words if tag not in tagged_tags or w in in_vocab]
              for tag, words in TAGS.items()}

    (OUT / "frequency.txt").write_text("\n".join(freq) + "\n")
    (OUT / "sign_lexicon.txt").write_text("\n".join(lexicon_sorted) + "\n")
    with open(OUT / "tag_lexicon.txt", "w") as f:
        for tag, words in TAGS.items():
            for w in words:
                f.write(f"{w} {tag}\n")

    rng = random.Random(20250101)
    lines = []
    for _ in range(300):
        template = rng.choice(TEMPLATES).split()
        toks = []
        for tag in template:
            w = rng.choice(usable[tag])
            if tag == "PROPN":
                w = w.capitalize()
            toks.append(f"{w}/{tag}")
        if toks[0].split("/")[0] == "i":
            toks[0] = "I/PRON"
        lines.append(" ".join(toks))
    (OUT / "corpus.tagged").write_text("\n".join(lines) + "\n")


if __name__ == "__main__":
    main()
