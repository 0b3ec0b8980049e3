#!/usr/bin/env python3
"""Writes one input per arith edge, named <edge>.bin, built from the record
grammar alone:

    'A' 'R' count record[count]        size must be 3 + 6*count
    record := kind len:u16be caplen:u16be flags

Usage: make_arith_witnesses.py OUTDIR
"""
import os
import struct
import sys

SLOTS = 4
BANDS = 128
BAND_WIDTH = 64


def rec(kind=0, length=0, caplen=0, flags=0):
    return struct.pack(">BHHB", kind, length, caplen, flags)


def packet(records):
    return b"AR" + bytes([len(records)]) + b"".join(records)


def in_slot(slot, record):
    # records before `slot` are plain valid fillers; slot 3 is record 3
    return packet([rec() for _ in range(slot)] + [record])


def witnesses():
    w = {
        "entry": b"",
        "magic_0": b"A",
        "magic_1": b"AR",
        "magic_bad": b"X",
        "no_count": b"AR",
        "zero_records": b"AR\x00",
        "too_many": b"AR\x09",
        "size_short": b"AR\x01",
        "size_long": b"AR\x01" + bytes(7),
        "bug_ari001": packet([rec(3, 6400, 6400)]),
    }
    for c in range(1, 9):
        w[f"count_{c}"] = packet([rec() for _ in range(c)])
    for s in range(SLOTS):
        p = f"r{s}_"
        for k in range(4):
            w[p + f"kind_{k}"] = in_slot(s, rec(kind=k))
        w[p + "caplen_over"] = in_slot(s, rec(length=5, caplen=6))
        w[p + "gap_over"] = in_slot(s, rec(length=65, caplen=0))
        w[p + "gap_0"] = in_slot(s, rec(length=7, caplen=7))
        w[p + "gap_1_16"] = in_slot(s, rec(length=16, caplen=0))
        w[p + "gap_17_32"] = in_slot(s, rec(length=32, caplen=0))
        w[p + "gap_33_64"] = in_slot(s, rec(length=64, caplen=0))
        w[p + "flag_0"] = in_slot(s, rec(flags=1))
        w[p + "flag_1"] = in_slot(s, rec(flags=2))
        for b in range(BANDS):
            length = b * BAND_WIDTH + 63
            w[p + f"band_{b}"] = in_slot(s, rec(length=length, caplen=length - 10))
        w[p + "band_overflow"] = in_slot(s, rec(length=0xFFFF, caplen=0xFFFF))
    return w


def main():
    out = sys.argv[1]
    os.makedirs(out, exist_ok=True)
    for name, data in witnesses().items():
        with open(os.path.join(out, name + ".bin"), "wb") as f:
            f.write(data)


if __name__ == "__main__":
    main()
