#!/usr/bin/env python3
"""Render keyboard works and chorale piano reductions from the music21 corpus
into single-track piano MIDI files (tests/data/piano)."""
import pathlib
import sys

from music21 import corpus, instrument, midi, stream, tempo

KEYBOARD = [
    "joplin/maple_leaf_rag.mxl",
    "chopin/mazurka06-2.krn",
    "schumann_clara/polonaise_op1n1.mxl",
    "schumann_clara/polonaise_op1n2.mxl",
    "schumann_clara/polonaise_op1n3.mxl",
    "schumann_clara/polonaise_op1n4.mxl",
    "schumann_clara/opus17/movement3.xml",
    "mozart/k545/movement1_exposition.mxl",
    "schoenberg/opus19/movement2.mxl",
    "schoenberg/opus19/movement6.mxl",
    "cpebach/h186.mxl",
    "schubert/Lindenbaum.xml",
    "schumann_robert/dichterliebe_no2.xml",
    "schumann_robert/opus48no2.mxl",
]
N_CHORALES = 36


def as_piano(score):
    piano = stream.Part()
    piano.insert(0, instrument.Piano())
    flat = score.flatten()
    for mark in flat.getElementsByClass(tempo.MetronomeMark):
        piano.insert(mark.offset, mark)
    for ts in flat.getElementsByClass("TimeSignature"):
        piano.insert(ts.offset, ts)
    for n in flat.notes:
        piano.insert(n.offset, n)
    out = stream.Score()
    out.insert(0, piano)
    return out


def main(out_dir):
    out = pathlib.Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    works = list(KEYBOARD)
    works += [str(p) for p in corpus.getComposer("bach")
              if "bwv" in str(p) and str(p).endswith(".mxl")][:N_CHORALES]
    for w in works:
        s = corpus.parse(w)
        name = w.replace("/", "_").rsplit(".", 1)[0].split("corpus_")[-1]
        name = pathlib.Path(name).name
        mf = midi.translate.streamToMidiFile(as_piano(s))
        mf.open(str(out / f"{name}.mid"), "wb")
        mf.write()
        mf.close()
        print(name, file=sys.stderr)


if __name__ == "__main__":
    main(sys.argv[1] if len(sys.argv) > 1 else "tests/data/piano")
