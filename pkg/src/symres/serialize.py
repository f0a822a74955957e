"""On-disk formats: text records for symbols, binary blobs for operators.

Symbol records are line-oriented (degree list plus row-major complex sample
arrays, 17 significant digits) so they diff cleanly; operator blobs are a
fixed little-endian header followed by raw complex128 entries, row-major.
"""

from __future__ import annotations

import struct

import numpy as np

from .errors import DomainError
from .manifold import ModelManifold
from .oracle import GridOperator
from .symbols import ClassicalSymbol
from .terms import HomogeneousTerm

_MAGIC = b"SYMRESOP"
_VERSION = 1
_CHUNK = 8  # values per line in symbol records


def format_symbol(p: ClassicalSymbol) -> str:
    man = p.manifold
    lines = [
        "[symbol]",
        f"n = {man.n}",
        f"N = {man.N}",
        f"K = {man.K}",
        f"m = {p.m}",
        f"leading_degree = {p.leading_degree}",
        f"terms = {len(p.terms)}",
    ]
    for i, t in enumerate(p.terms):
        lines.append(f"[term {i}]")
        lines.append(f"degree = {t.degree}")
        flat = t.samples.ravel()
        for part, name in ((flat.real, "re"), (flat.imag, "im")):
            for start in range(0, flat.size, _CHUNK):
                chunk = " ".join(f"{v:.17g}" for v in part[start:start + _CHUNK])
                lines.append(f"{name} {chunk}")
    return "\n".join(lines) + "\n"


def parse_symbol(text: str) -> ClassicalSymbol:
    header: dict[str, int] = {}
    terms: list[tuple[int, list[float], list[float]]] = []
    section = None
    for raw in text.splitlines():
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if line.startswith("["):
            section = line.strip("[]")
            if section.startswith("term"):
                terms.append((0, [], []))
            continue
        if section == "symbol":
            key, _, val = line.partition("=")
            header[key.strip()] = int(val)
        elif section and section.startswith("term"):
            if line.startswith("degree"):
                _, _, val = line.partition("=")
                terms[-1] = (int(val), terms[-1][1], terms[-1][2])
            elif line.startswith("re "):
                terms[-1][1].extend(float(v) for v in line[3:].split())
            elif line.startswith("im "):
                terms[-1][2].extend(float(v) for v in line[3:].split())
    try:
        man = ModelManifold(header["n"], header["N"], header["K"])
        m = header["m"]
    except KeyError as e:
        raise DomainError(f"symbol record missing header field {e}") from e
    shape = man.sample_shape + (m, m)
    out = []
    for deg, re, im in terms:
        a = np.asarray(re, float) + 1j * np.asarray(im, float)
        if a.size != int(np.prod(shape)):
            raise DomainError("symbol record sample count does not match grids")
        out.append(HomogeneousTerm(man, deg, a.reshape(shape)))
    return ClassicalSymbol(man, header["leading_degree"], out)


def write_operator(A: GridOperator, path: str):
    man = A.manifold
    head = struct.pack("<8sIIIIIIQ", _MAGIC, _VERSION, man.n, man.N, man.K,
                       A.n_f, A.m, A.matrix.shape[0])
    with open(path, "wb") as fh:
        fh.write(head)
        fh.write(np.ascontiguousarray(A.matrix, dtype=np.complex128).tobytes())


def read_operator(path: str) -> GridOperator:
    with open(path, "rb") as fh:
        head = fh.read(struct.calcsize("<8sIIIIIIQ"))
        magic, ver, n, N, K, n_f, m, rows = struct.unpack("<8sIIIIIIQ", head)
        if magic != _MAGIC or ver != _VERSION:
            raise DomainError("not a symres operator blob (bad magic/version)")
        data = np.frombuffer(fh.read(), dtype=np.complex128).reshape(rows, rows)
    return GridOperator(data.copy(), ModelManifold(n, N, K), n_f, m)
