#!/usr/bin/env python3
"""Regenerates src/codec/transform_tables.inc.

Forward basis: round(64 * sqrt(N) * orthonormal DCT-II).
Inverse basis: round(2^24 * inverse(forward basis)), so the inverse undoes
the rounded forward basis rather than the ideal DCT.
"""
import numpy as np

INV_BITS = 24


def tables(n):
    k = np.arange(n)[:, None]
    i = np.arange(n)[None, :]
    orth = np.sqrt(2.0 / n) * np.cos(np.pi * (2 * i + 1) * k / (2 * n))
    orth[0] /= np.sqrt(2.0)
    fwd = np.round(64 * np.sqrt(n) * orth).astype(np.int64)
    inv = np.round(np.linalg.inv(fwd.astype(np.float64)) * (1 << INV_BITS)).astype(np.int64)
    return fwd, inv


def emit(name, ctype, mat):
    n = mat.shape[0]
    rows = []
    for r in mat:
        rows.append("  " + ", ".join(str(int(v)) for v in r) + ",")
    return "static const {} {}[{}] = {{\n{}\n}};\n".format(ctype, name, n * n, "\n".join(rows))


def main():
    out = ["// Generated by tools/gen_transform_tables.py. Do not edit.\n"]
    out.append("static constexpr int kInverseBasisBits = {};\n\n".format(INV_BITS))
    for n in (4, 8, 16, 32):
        fwd, inv = tables(n)
        out.append(emit("kForward{}".format(n), "int32_t", fwd))
        out.append(emit("kInverse{}".format(n), "int64_t", inv))
        out.append("\n")
    with open("src/codec/transform_tables.inc", "w") as f:
        f.write("".join(out))


if __name__ == "__main__":
    main()
