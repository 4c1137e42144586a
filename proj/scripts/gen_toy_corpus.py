#!/usr/bin/env python3
"""Regenerate the bundled English-Spanish toy data.

Writes data/toy_gtrans.jsonl (50 G-Trans records), data/lexicon.tsv (every
structure pair in the corpus plus a few extra inflection pairs) and
data/es_lm.txt (all entity-level alternatives, one sentence per line, used to
train the default n-gram scorer).

    python3 scripts/gen_toy_corpus.py [out_dir]
"""

import itertools
import json
import sys
from pathlib import Path

# english head -> (masculine NP, feminine NP), both with the definite article
NOUNS = {
    "secretary": ("el secretario", "la secretaria"),
    "boss": ("el jefe", "la jefa"),
    "doctor": ("el doctor", "la doctora"),
    "patient": ("el paciente", "la paciente"),
    "lawyer": ("el abogado", "la abogada"),
    "teacher": ("el maestro", "la maestra"),
    "nurse": ("el enfermero", "la enfermera"),
    "judge": ("el juez", "la jueza"),
    "neighbor": ("el vecino", "la vecina"),
    "director": ("el director", "la directora"),
    "cook": ("el cocinero", "la cocinera"),
    "student": ("el estudiante", "la estudiante"),
    "engineer": ("el ingeniero", "la ingeniera"),
    "baker": ("el panadero", "la panadera"),
    "manager": ("el gerente", "la gerente"),
    "accountant": ("el contador", "la contadora"),
}

ADJECTIVES = {
    "angry": ("enojado", "enojada"),
    "tired": ("cansado", "cansada"),
    "busy": ("ocupado", "ocupada"),
    "happy": ("contento", "contenta"),
    "worried": ("preocupado", "preocupada"),
    "surprised": ("sorprendido", "sorprendida"),
}

EXTRA_LEXICON = [
    ("el", "la"),
    ("un", "una"),
    ("él", "ella"),
    ("del", "de la"),
    ("al", "a la"),
    ("hijo", "hija"),
    ("un jefe", "una jefa"),
    ("un doctor", "una doctora"),
    ("un abogado", "una abogada"),
    ("un maestro", "una maestra"),
    ("un enfermero", "una enfermera"),
    ("un cocinero", "una cocinera"),
]


def cap(phrase):
    return phrase[:1].upper() + phrase[1:]


def np_tokens(noun, g, capital=False, prep=None):
    phrase = NOUNS[noun][0 if g == "M" else 1]
    if prep == "a":
        phrase = phrase.replace("el ", "al ", 1) if phrase.startswith("el ") else "a " + phrase
    elif prep == "de":
        phrase = phrase.replace("el ", "del ", 1) if phrase.startswith("el ") else "de " + phrase
    if capital:
        phrase = cap(phrase)
    return phrase.split()


class Builder:
    """Collects tokens of the masculine and feminine sides piece by piece."""

    def __init__(self):
        self.segments = []  # str or (m_tokens, f_tokens, entity)

    def word(self, *tokens):
        for t in tokens:
            for piece in t.split():
                self.segments.append(piece)
        return self

    def struct(self, m, f, entity):
        self.segments.append((list(m), list(f), entity))
        return self

    def np(self, noun, entity, capital=False, prep=None):
        m = np_tokens(noun, "M", capital, prep)
        f = np_tokens(noun, "F", capital, prep)
        # Shared trailing tokens (el estudiante / la estudiante) stay outside the structure.
        tail = []
        while m and f and m[-1] == f[-1]:
            tail.insert(0, m.pop())
            f.pop()
        self.struct(m, f, entity)
        self.word(*tail)
        return self

    def adj(self, adjective, entity):
        m, f = ADJECTIVES[adjective]
        return self.struct([m], [f], entity)

    def record(self, src, entities):
        tgt, align = [], []
        for seg in self.segments:
            if isinstance(seg, str):
                tgt.append(seg)
            else:
                tgt.append({"m": seg[0], "f": seg[1]})
                align.append(seg[2])
        return {"src": src.split(), "entities": entities, "tgt": tgt, "align": align}


def amb(*heads):
    return [{"i": h, "g": "A"} for h in heads]


def records():
    out = []

    # Worked examples.
    out.append(
        Builder()
        .np("secretary", 0, capital=True).word("estaba").adj("angry", 0).word("con").np("boss", 1).word(".")
        .record("The secretary was angry with the boss .", amb(1, 6))
    )
    out.append(
        Builder()
        .np("doctor", 0, capital=True).word("estaba").adj("angry", 0).word("con").np("patient", 1).word(".")
        .record("The doctor was angry with the patient .", amb(1, 6))
    )
    out.append(
        Builder()
        .word("El abogado luchó para mantener a su").struct(["hijo"], ["hija"], 1)
        .word(", que es").struct(["un"], ["una"], 1).word("gángster , a salvo")
        .struct(["del", "juez"], ["de", "la", "jueza"], 2).word(".")
        .record(
            "The lawyer fought to keep his child , who is a gangster , safe from the judge .",
            [{"i": 1, "g": "M"}, {"i": 6, "g": "A"}, {"i": 16, "g": "A"}],
        )
    )
    out.append({"src": "She is a boss .".split(), "entities": [{"i": 3, "g": "F"}],
                "tgt": "Ella es una jefa .".split(), "align": []})

    # Two entities: "The A was ADJ with the B ."
    pairs = [("teacher", "student", "tired"), ("nurse", "doctor", "worried"), ("judge", "lawyer", "surprised"),
             ("neighbor", "cook", "happy"), ("director", "engineer", "angry"), ("manager", "accountant", "busy"),
             ("baker", "neighbor", "worried"), ("student", "teacher", "surprised")]
    for a, b, adj in pairs:
        out.append(
            Builder()
            .np(a, 0, capital=True).word("estaba").adj(adj, 0).word("con").np(b, 1).word(".")
            .record(f"The {a} was {adj} with the {b} .", amb(1, 6))
        )

    # Two entities, no adjective: "The A and the B arrived late ."
    for a, b in [("doctor", "nurse"), ("boss", "secretary"), ("cook", "baker"), ("lawyer", "judge"),
                 ("engineer", "manager")]:
        out.append(
            Builder()
            .np(a, 0, capital=True).word("y").np(b, 1).word("llegaron tarde .")
            .record(f"The {a} and the {b} arrived late .", amb(1, 4))
        )

    # One entity with an adjective.
    for noun, adj in [("doctor", "tired"), ("teacher", "happy"), ("secretary", "busy"), ("patient", "worried"),
                      ("judge", "angry"), ("accountant", "surprised")]:
        out.append(
            Builder()
            .np(noun, 0, capital=True).word("está").adj(adj, 0).word(".")
            .record(f"The {noun} is {adj} .", amb(1))
        )

    # One entity after a preposition.
    for noun in ["boss", "nurse", "director", "student", "neighbor"]:
        out.append(
            Builder()
            .word("Conocí").np(noun, 0, prep="a").word("ayer .")
            .record(f"I met the {noun} yesterday .", amb(3))
        )

    # Three entities.
    triples = [("boss", "secretary", "lawyer", "busy"), ("doctor", "nurse", "patient", "tired"),
               ("director", "teacher", "student", "worried"), ("manager", "engineer", "cook", "happy")]
    for a, b, c, adj in triples:
        out.append(
            Builder()
            .np(a, 0, capital=True).word("le dijo").np(b, 1, prep="a").word("que").np(c, 2)
            .word("estaba").adj(adj, 2).word(".")
            .record(f"The {a} told the {b} that the {c} was {adj} .", amb(1, 4, 7))
        )

    # Gender known from context: no structures.
    known = [
        ("He is a doctor .", [{"i": 3, "g": "M"}], "Él es un doctor ."),
        ("She is a lawyer .", [{"i": 3, "g": "F"}], "Ella es una abogada ."),
        ("The nurse lost her keys .", [{"i": 1, "g": "F"}], "La enfermera perdió sus llaves ."),
        ("The teacher said he was tired .", [{"i": 1, "g": "M"}], "El maestro dijo que estaba cansado ."),
        ("My mother is a judge .", [{"i": 1, "g": "F"}, {"i": 4, "g": "F"}], "Mi madre es jueza ."),
        ("The king met the queen .", [{"i": 1, "g": "M"}, {"i": 4, "g": "F"}], "El rey conoció a la reina ."),
        ("The cook finished her shift .", [{"i": 1, "g": "F"}], "La cocinera terminó su turno ."),
        ("He thanked the doctor .", [{"i": 3, "g": "A"}], "Él agradeció al médico ."),
    ]
    for src, ents, tgt in known:
        out.append({"src": src.split(), "entities": ents, "tgt": tgt.split(), "align": []})

    # No entities at all.
    for src, tgt in [("It is raining .", "Está lloviendo ."), ("The store opens at nine .", "La tienda abre a las nueve ."),
                     ("We need more time .", "Necesitamos más tiempo ."), ("The train was late .", "El tren llegó tarde ."),
                     ("This book is interesting .", "Este libro es interesante ."),
                     ("The city is beautiful .", "La ciudad es hermosa ."),
                     ("The meeting starts soon .", "La reunión empieza pronto ."),
                     ("The window is open .", "La ventana está abierta ."),
                     ("The coffee is hot .", "El café está caliente .")]:
        out.append({"src": src.split(), "entities": [], "tgt": tgt.split(), "align": []})

    # Mixed: one known, one ambiguous.
    out.append(
        Builder()
        .word("Ella le pidió").np("lawyer", 0, prep="a").word("ayuda .")
        .record("She asked the lawyer for help .", [{"i": 3, "g": "A"}])
    )
    return out


def sides(tgt):
    m, f = [], []
    for seg in tgt:
        if isinstance(seg, str):
            m.append(seg)
            f.append(seg)
        else:
            m += seg["m"]
            f += seg["f"]
    return m, f


def alternatives(rec):
    ents = sorted(set(rec["align"]))
    for choice in itertools.product("MF", repeat=len(ents)):
        g = dict(zip(ents, choice))
        out, si = [], 0
        for seg in rec["tgt"]:
            if isinstance(seg, str):
                out.append(seg)
            else:
                out += seg["m"] if g[rec["align"][si]] == "M" else seg["f"]
                si += 1
        yield out


def main():
    out_dir = Path(sys.argv[1]) if len(sys.argv) > 1 else Path(__file__).resolve().parent.parent / "data"
    out_dir.mkdir(parents=True, exist_ok=True)
    recs = records()
    assert len(recs) == 50, len(recs)

    lexicon = set()
    for r in recs:
        for seg in r["tgt"]:
            if not isinstance(seg, str):
                lexicon.add((" ".join(seg["m"]).lower(), " ".join(seg["f"]).lower()))
    lexicon.update(EXTRA_LEXICON)

    with open(out_dir / "toy_gtrans.jsonl", "w", encoding="utf-8") as f:
        for r in recs:
            f.write(json.dumps(r, ensure_ascii=False) + "\n")
    with open(out_dir / "lexicon.tsv", "w", encoding="utf-8") as f:
        f.write("# masculine\tfeminine\n")
        for m, fem in sorted(lexicon):
            f.write(f"{m}\t{fem}\n")
    with open(out_dir / "es_lm.txt", "w", encoding="utf-8") as f:
        for r in recs:
            for alt in alternatives(r):
                f.write(" ".join(alt) + "\n")


if __name__ == "__main__":
    main()
