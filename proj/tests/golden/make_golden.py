#!/usr/bin/env python3
# Regenerates the golden counts and PMI files for data/mini by direct
# enumeration of window position pairs. Written independently of the C++
# implementation; run it only when the mini corpus or its config changes.

import json
import math
import pathlib
import struct

ROOT = pathlib.Path(__file__).resolve().parents[2]
MINI = ROOT / "data" / "mini"
OUT = pathlib.Path(__file__).resolve().parent


def load_vocab(path):
    tokens, unk = [], None
    specials = []
    for line in path.read_text().splitlines():
        if line.startswith("#special "):
            specials.append(line.split()[1:])
            continue
        tokens.append(line)
    index = {t: i for i, t in enumerate(tokens)}
    for fields in specials:
        if len(fields) > 1 and fields[1] == "unk":
            unk = index[fields[0]]
    return tokens, index, unk


def main():
    config = json.loads((MINI / "config.json").read_text())
    window = config["window"]
    min_count = config["min_count"]
    k = config["pmi_vocab_size"]
    tokens, index, unk = load_vocab(MINI / "vocab.txt")
    v = len(tokens)

    unigram = [0] * v
    pairs = {}
    for line in (MINI / "corpus.txt").read_text().split("\n")[:-1]:
        ids = [index.get(t, unk) for t in line.split()]
        for i, a in enumerate(ids):
            unigram[a] += 1
            for j in range(i + 1, min(len(ids), i + window)):
                b = ids[j]
                key = (min(a, b), max(a, b))
                pairs[key] = pairs.get(key, 0) + 1

    with open(OUT / "mini_counts.bin", "wb") as f:
        f.write(b"CoOC")
        f.write(struct.pack("<IIIQ", 1, v, window, len(pairs)))
        f.write(struct.pack("<%dQ" % v, *unigram))
        for key in sorted(pairs):
            f.write(struct.pack("<IIQ", key[0], key[1], pairs[key]))

    # Ordered-pair sample space: each unordered co-occurrence contributes both
    # orders, so a self-pair fills both slots of one ordered draw.
    total = sum(pairs.values())
    slots = [0] * v
    for (a, b), c in pairs.items():
        slots[a] += c
        slots[b] += c
    order = sorted(range(v), key=lambda i: (-unigram[i], i))
    top = sorted(order[:min(k, v)])
    keep = set(top)
    values = {}
    for (a, b), c in pairs.items():
        if c < min_count or a not in keep or b not in keep:
            continue
        joint = c / total if a == b else c / (2 * total)
        pa = slots[a] / (2 * total)
        pb = slots[b] / (2 * total)
        values[(a, b)] = math.log(joint / (pa * pb))

    with open(OUT / "mini_pmi.bin", "wb") as f:
        f.write(b"PMI1")
        f.write(struct.pack("<IIIQ", 1, len(top), min_count, len(values)))
        f.write(struct.pack("<%dI" % len(top), *top))
        for key in sorted(values):
            f.write(struct.pack("<IIf", key[0], key[1], values[key]))


if __name__ == "__main__":
    main()
