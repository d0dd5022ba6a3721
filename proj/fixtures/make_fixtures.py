#!/usr/bin/env python3
"""Regenerate the synthetic fixture corpora in this directory.

paper.jsonl is built record by record so that evaluating systems "tower" and
"mbart" yields fixed aggregate counts:

                     tower  mbart
    source M/F/A     356 / 294 / 909
    target M         544    570
    target F         210    181
    match M/F        173/104  165/88
    bias A->M/A->F   215/35   221/29
    error M->F       0      2
    error F->M       8      25

Target tags that do not correspond to a source entity (index 2 on a sentence
whose source has only entity 1) make up the remaining target tags.

Usage: python3 fixtures/make_fixtures.py [outdir]
"""

import json
import os
import sys

SOURCE = {
    "M": "he <M1> said that he was tired",
    "F": "she <F1> said that she was tired",
    "A": "they <A1> said that they were tired",
}
PLAIN = "ha detto di essere stanco"
REALISED = {
    "M": "ha detto di essere stanco <M1>",
    "F": "ha detto di essere stanca <F1>",
}
EXTRA = {
    "M": " e il vicino era contento <M2>",
    "F": " e la vicina era contenta <F2>",
}

# (source gender, count, {system: [(target gender, how many), ...]})
GROUPS = [
    ("M", 356, {"tower": [("M", 173)], "mbart": [("M", 165), ("F", 2)]}),
    ("F", 294, {"tower": [("F", 104), ("M", 8)], "mbart": [("F", 88), ("M", 25)]}),
    ("A", 909, {"tower": [("M", 215), ("F", 35)], "mbart": [("M", 221), ("F", 29)]}),
]
# Unmatched target tags, placed on ambiguous-source records after the biased ones.
UNMATCHED = {"tower": [("M", 148), ("F", 71)], "mbart": [("M", 159), ("F", 62)]}
UNMATCHED_START = 250


def expand(plan):
    out = []
    for gender, n in plan:
        out.extend([gender] * n)
    return out


def count_fixture_records():
    records = []
    for src, count, systems in GROUPS:
        realised = {name: expand(plan) for name, plan in systems.items()}
        extra = {name: expand(plan) for name, plan in UNMATCHED.items()} if src == "A" else {}
        for i in range(count):
            targets = {}
            for name in ("tower", "mbart"):
                seq = realised[name]
                text = REALISED[seq[i]] if i < len(seq) else PLAIN
                k = i - UNMATCHED_START
                if name in extra and 0 <= k < len(extra[name]):
                    text += EXTRA[extra[name][k]]
                targets[name] = text
            records.append({"id": f"{src.lower()}{i + 1:03d}", "source": SOURCE[src],
                            "targets": targets})
    return records


EXAMPLES = [
    {
        "id": "110",
        "source": "Women have been trained to think that we <F1> are overreacting or that "
                  "we <F1> ’re being too sensitive or unreasonable .",
        "targets": {
            "tower": "Alle donne è stato insegnato a pensare che siamo troppo reattive <F1> "
                     "o che siamo troppo sensibili o irragionevoli .",
            "mbart": "Le donne sono state addestrate a pensare che siamo troppo reattive <F1> "
                     "o che siamo troppo sensibili o irragionevoli .",
        },
    },
    {
        "id": "164",
        "source": "Many of the women working with me had to leave once they <F2> got married "
                  ", because their husbands wouldn’t let them <F2> work .",
        "targets": {
            "tower": "Molte delle donne che lavoravano con me hanno dovuto lasciare il lavoro "
                     "non appena si sono sposate <F2> perché i mariti non li <M2> volevano "
                     "vedere lavorare .",
            "mbart": "Molte delle donne che lavoravano con me dovevano andare via una volta "
                     "sposate <F2> perché i loro mariti non li <M2> lasciavano lavorare .",
        },
    },
    {
        "id": "125",
        "source": "And he said , “No , you <A1> ’re still dry , you <A1> ’re just being nice . ”",
        "targets": {
            "tower": "sei ancora asciutta <F1> stai solo facendo il bravo <M1>",
            "mbart": "“No, sei ancora secco <M1> , stai solo facendo bene.”",
        },
    },
    {
        "id": "526",
        "source": "Lindsay Malloy <A1> : They <A2> told Brendan <M3> that honesty would “set "
                  "him <M3> free,” but they <A2> were completely convinced of his guilt at that "
                  "point .",
        "targets": {
            "tower": "Lindsay Malloy: A Brendan dissero che l’onestà lo avrebbe “liberato” <M3> "
                     ", ma erano completamente convinti <M2> della sua colpevolezza a quel punto .",
            "mbart": "Lindsay Malloy: Hanno detto a Brendan che l’onestà lo avrebbe liberato <M3> "
                     "ma erano completamente convinti <M2> della sua colpa a quel punto .",
        },
    },
]

CLEAN = [
    {
        "id": "t1",
        "source": "Women have been trained to think that we <F1> are overreacting or that "
                  "we <F1> are being too sensitive or unreasonable .",
        "targets": {
            "tower": "Alle donne è stato insegnato a pensare che (noi) siamo troppo reattive "
                     "<F1> o che (noi) siamo troppo sensibili o irragionevoli .",
        },
    },
]

# Each record trips exactly one rule: V001 .. V005 in order.
VALIDATOR_CASES = [
    {"id": "v001", "source": "you <A1> are brave", "targets": {"tower": "sei brave <A1>"}},
    {"id": "v002", "source": "he <M1> said she <F1> left",
     "targets": {"tower": "ha detto che era partita"}},
    {"id": "v003", "source": "we <A2> won", "targets": {"tower": "abbiamo vinto"}},
    {"id": "v004", "source": "I <A1> saw them", "targets": {"tower": "li ho visti <M2>"}},
    {"id": "v005", "source": "it rained", "targets": {"tower": "pioveva"}},
]


def write_jsonl(path, records):
    with open(path, "w", encoding="utf-8", newline="\n") as f:
        for r in records:
            f.write(json.dumps(r, ensure_ascii=False, separators=(",", ":")) + "\n")


def main():
    outdir = sys.argv[1] if len(sys.argv) > 1 else os.path.dirname(os.path.abspath(__file__))
    write_jsonl(os.path.join(outdir, "paper.jsonl"), count_fixture_records())
    write_jsonl(os.path.join(outdir, "examples.jsonl"), EXAMPLES)
    write_jsonl(os.path.join(outdir, "clean.jsonl"), CLEAN)
    write_jsonl(os.path.join(outdir, "validator_cases.jsonl"), VALIDATOR_CASES)


if __name__ == "__main__":
    main()
