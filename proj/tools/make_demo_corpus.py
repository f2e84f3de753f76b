#!/usr/bin/env python3
# Copyright 2026 The pmimask Authors
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#     http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.
"""Writes the bundled demo corpus: topical documents with planted structure.

Each document draws one topic. Tokens are function words, topic words, a
topic-specific two-word name, or a fixed collocation shared by all topics.
Sentences are separated by a [SEP] token.

    python3 tools/make_demo_corpus.py data/demo
"""

import argparse
import os
import random

FILLERS = ("the of and a to in is was for on that with as by it at from "
           "this be are were has had").split()

TOPICS = {
    "sport": ("match team goal season coach league player score stadium "
              "referee fans trophy", ("real", "madrid")),
    "weather": ("rain storm wind forecast cloud snow sunny coast temperature "
                "flood heat front", ("el", "nino")),
    "finance": ("market shares bank profit investor stock bond rate fund "
                "trader price dividend", ("wall", "street")),
    "science": ("cell protein gene experiment lab sample theory molecule "
                "enzyme data dna study", ("marie", "curie")),
    "music": ("album song band guitar concert tour singer chorus drum "
              "record melody stage", ("abbey", "road")),
    "cooking": ("recipe oven flour butter sauce garlic onion salt pepper "
                "dough bake simmer", ("julia", "child")),
    "travel": ("flight hotel airport passport train beach museum ticket "
               "luggage map guide visa", ("lonely", "planet")),
    "politics": ("vote election party senate law policy campaign debate "
                 "minister council budget reform", ("white", "house")),
}

COLLOCATIONS = [("hong", "kong"), ("per", "cent"), ("los", "angeles")]


def vocabulary():
    words = ["[PAD]", "[UNK]", "[MASK]", "[SEP]"] + FILLERS
    for content, entity in TOPICS.values():
        words += content.split() + list(entity)
    for pair in COLLOCATIONS:
        words += list(pair)
    seen = set()
    return [w for w in words if not (w in seen or seen.add(w))]


def sentence(rng, content, entity):
    out = []
    for _ in range(rng.randint(8, 18)):
        u = rng.random()
        if u < 0.55:
            out.append(rng.choice(FILLERS))
        elif u < 0.90:
            out.append(rng.choice(content))
        elif u < 0.95:
            out += entity
        else:
            out += rng.choice(COLLOCATIONS)
    return out


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("out_dir")
    ap.add_argument("--documents", type=int, default=2000)
    ap.add_argument("--seed", type=int, default=2024)
    args = ap.parse_args()

    rng = random.Random(args.seed)
    os.makedirs(args.out_dir, exist_ok=True)
    with open(os.path.join(args.out_dir, "vocab.txt"), "w") as f:
        for tok, role in (("[PAD]", "pad"), ("[UNK]", "unk"), ("[MASK]", "mask"),
                          ("[SEP]", "")):
            f.write(f"#special {tok} {role}".rstrip() + "\n")
        for w in vocabulary():
            f.write(w + "\n")

    topics = list(TOPICS.values())
    with open(os.path.join(args.out_dir, "corpus.txt"), "w") as f:
        for _ in range(args.documents):
            content, entity = rng.choice(topics)
            content = content.split()
            doc = []
            for i in range(rng.randint(3, 6)):
                if i:
                    doc.append("[SEP]")
                doc += sentence(rng, content, list(entity))
            f.write(" ".join(doc) + "\n")


if __name__ == "__main__":
    main()
