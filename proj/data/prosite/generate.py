#!/usr/bin/env python3
"""Regenerates the bundled protein sample.

Writes sequences.txt (one sequence per line over the 20 amino-acid letters)
and signatures.txt (ID;PATTERN lines). Every signature is planted into a few
sequences, drawing residues from its classes and wildcard lengths from its
ranges, on top of a uniform random background.
"""

import random
import re
from pathlib import Path

AMINO = "ACDEFGHIKLMNPQRSTVWY"
SEED = 20240517
SEQUENCES = 3000
MIN_LEN, MAX_LEN = 150, 400

SIGNATURES = [
    ("SIG01", "R-G-D-x(2,6)-[ST]-W-G"),
    ("SIG02", "[LIVM]-G-G-x(3)-[DE]-K-P-F"),
    ("SIG03", "C-x(2)-C-H-W-x(4,8)-[FY]-x(3)-H"),
    ("SIG04", "G-x-G-x(2)-G-K-S-T"),
    ("SIG05", "[FY]-[LIVM]-D-L-G-x(2,4)-N"),
    ("SIG06", "W-x(9,11)-[VFY]-[FYW]-x(6,7)-[GSTNE]-[GSTQCR]-[FYW]-x(2)-P"),
    ("SIG07", "H-E-x(2)-H-x(3,5)-P-Y-D-[LIVM]"),
    ("SIG08", "N-P-x-Y-x(6,10)-T-Q-E"),
    ("SIG09", "K-D-E-L-x(0,3)-[RK]"),
    ("SIG10", "D-[ST]-G-G-P-x(4)-[LIVM]"),
    ("SIG11", "[AG]-x(4)-G-K-[ST]-x(5,8)-Q-M-W"),
    ("SIG12", "C-W-[ST]-x(3,6)-E-M-Y-C"),
    ("SIG13", "P-P-P-x(2,5)-[DE]-x-R-W-H"),
    ("SIG14", "Y-x(2)-[LIVMF]-G-H-N-x(10,20)-C"),
    # No run of more than two residues: invisible to grams of length three.
    ("SIG15", "C-C-x(2,4)-[ST]-G-x(3)-W"),
    ("SIG16", "H-H-x(3,6)-D-K-x(2)-C"),
    ("SIG17", "[RK]-[RK]-x(2)-[ST]-x(5,9)-W-F"),
    ("SIG18", "M-W-x(4)-C-x(2,3)-Y-H"),
    ("SIG19", "[DE]-W-x(6)-Q-Q-x(3,5)-P"),
    ("SIG20", "G-P-x(2,4)-[FYW]-C-x(2)-N"),
    ("SIG21", "W-C-x(7,9)-[LIVM]-H-x(2)-Y"),
    ("SIG22", "F-Q-x(5,8)-K-W-x-E"),
    ("SIG23", "T-W-x(3)-[NQ]-Y-x(4,6)-M"),
    ("SIG24", "C-Y-x(2,4)-H-M-x(8)-W"),
    # Constructs the query dialect does not express; the harness skips them.
    ("SIG25", "<M-x(2)-C-W"),
    ("SIG26", "C-{P}-x(2)-C-W-H"),
]

TOKEN = re.compile(r"^(x|[A-Z]|\[[A-Z]+\])(?:\((\d+)(?:,(\d+))?\))?$")


def instantiate(pattern, rng):
    out = []
    for element in pattern.split("-"):
        m = TOKEN.match(element)
        if m is None:
            return None
        what, lo, hi = m.group(1), m.group(2), m.group(3)
        lo = int(lo) if lo else 1
        hi = int(hi) if hi else lo
        if what == "x":
            out.extend(rng.choice(AMINO) for _ in range(rng.randint(lo, hi)))
        elif what.startswith("["):
            out.extend(rng.choice(what[1:-1]) for _ in range(lo))
        else:
            out.extend(what for _ in range(lo))
    return "".join(out)


def main():
    rng = random.Random(SEED)
    seqs = [
        [rng.choice(AMINO) for _ in range(rng.randint(MIN_LEN, MAX_LEN))]
        for _ in range(SEQUENCES)
    ]
    for _, pattern in SIGNATURES:
        for target in rng.sample(range(SEQUENCES), rng.randint(10, 25)):
            motif = instantiate(pattern, rng)
            if motif is None:
                continue
            seq = seqs[target]
            at = rng.randint(0, len(seq) - len(motif))
            seq[at:at + len(motif)] = motif

    here = Path(__file__).resolve().parent
    (here / "sequences.txt").write_text("".join("".join(s) + "\n" for s in seqs))
    (here / "signatures.txt").write_text(
        "".join(f"{sid};{pattern}\n" for sid, pattern in SIGNATURES))


if __name__ == "__main__":
    main()
