"""Plain-text readers and writers.

All floats are written with ``%.17g`` so that a write/read cycle is exact.
Blank lines and ``#`` comments are ignored by every reader.
"""
from __future__ import annotations

import numpy as np

from .errors import FormatError
from .hill import GapReport, HillProblem
from .invariants import PAIRS, SINGLES, InvariantSet
from .lattice import LatticeBasis
from .potential import PotentialCoefficients

FLOAT = "%.17g"


def _f(x) -> str:
    return FLOAT % float(x)


def _lines(text: str):
    for no, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if line:
            yield no, line.split()


def _float(tok: str, no: int) -> float:
    try:
        v = float(tok)
    except ValueError:
        raise FormatError(f"line {no}: {tok!r} is not a number") from None
    if not np.isfinite(v):
        raise FormatError(f"line {no}: non-finite value {tok!r}")
    return v


def _int(tok: str, no: int) -> int:
    try:
        return int(tok)
    except ValueError:
        raise FormatError(f"line {no}: {tok!r} is not an integer") from None


# -- lattice and potential ---------------------------------------------------


def format_lattice(basis: LatticeBasis) -> str:
    return "".join(f"lattice {' '.join(_f(x) for x in g)}\n" for g in basis.vectors)


def format_potential(q: PotentialCoefficients) -> str:
    out = [format_lattice(q.basis)]
    for k in range(1, 14):
        z = q.coef(k)
        out.append(f"coef {k} {_f(z.real)} {_f(z.imag)}\n")
    return "".join(out)


def _parse_lattice_rows(rows):
    if len(rows) != 3:
        raise FormatError(f"expected 3 lattice lines, got {len(rows)}")
    vecs = []
    for no, toks in rows:
        if len(toks) != 4:
            raise FormatError(f"line {no}: lattice line needs 3 coordinates")
        vecs.append([_float(t, no) for t in toks[1:]])
    return LatticeBasis(vecs)


def parse_lattice(text: str) -> LatticeBasis:
    rows = [(no, t) for no, t in _lines(text) if t[0] == "lattice"]
    return _parse_lattice_rows(rows)


def parse_potential(text: str) -> PotentialCoefficients:
    """Read a lattice block followed by 13 ``coef k re im`` lines."""
    lattice_rows, coefs = [], {}
    for no, toks in _lines(text):
        tag = toks[0]
        if tag == "lattice":
            lattice_rows.append((no, toks))
        elif tag == "coef":
            if len(toks) != 4:
                raise FormatError(f"line {no}: coef line needs k, re, im")
            k = _int(toks[1], no)
            if not 1 <= k <= 13:
                raise FormatError(f"line {no}: coefficient index {k} outside 1..13")
            if k in coefs:
                raise FormatError(f"line {no}: duplicate coefficient {k}")
            z = complex(_float(toks[2], no), _float(toks[3], no))
            if z == 0:
                raise FormatError(f"line {no}: coefficient {k} is zero")
            coefs[k] = z
        else:
            raise FormatError(f"line {no}: unknown tag {tag!r}")
    missing = sorted(set(range(1, 14)) - set(coefs))
    if missing:
        raise FormatError(f"missing coefficients {missing}")
    basis = _parse_lattice_rows(lattice_rows)
    return PotentialCoefficients(basis, [coefs[k] for k in range(1, 14)])


# -- invariants --------------------------------------------------------------

# family -> (tag words, key arity)
_INV_TAGS = {
    "I": (("I",), 1),
    "I1_sum": (("I1", "sum"), 2),
    "I1_diff": (("I1", "diff"), 2),
    "I1_gamma": (("I1", "gamma"), 1),
    "I1_refl": (("I1", "refl"), 1),
    "I2_pair": (("I2", "pair"), 2),
    "I2_gamma": (("I2", "gamma"), 1),
}
_TAG_LOOKUP = {words: fam for fam, (words, _) in _INV_TAGS.items()}


def _expected_keys(fam):
    if fam == "I":
        return set(range(1, 14))
    return set(PAIRS) if _INV_TAGS[fam][1] == 2 else set(SINGLES)


def format_invariants(inv: InvariantSet) -> str:
    out = []
    for (fam, key), v in inv.entries():
        words, _ = _INV_TAGS[fam]
        keys = key if isinstance(key, tuple) else (key,)
        out.append(" ".join([*words, *(str(k) for k in keys), _f(v)]) + "\n")
    return "".join(out)


def parse_invariants(text: str, complete: bool = True) -> InvariantSet:
    """Read invariant lines; rejects unknown tags, bad keys and duplicates.

    With ``complete=True`` every entry the reconstruction needs must be present.
    """
    inv = InvariantSet()
    for no, toks in _lines(text):
        fam = _TAG_LOOKUP.get((toks[0],)) if toks[0] == "I" else _TAG_LOOKUP.get(tuple(toks[:2]))
        if fam is None:
            raise FormatError(f"line {no}: unknown tag {' '.join(toks[:2])!r}")
        words, arity = _INV_TAGS[fam]
        body = toks[len(words):]
        if len(body) != arity + 1:
            raise FormatError(f"line {no}: expected {arity} index(es) and a value")
        idx = tuple(_int(t, no) for t in body[:arity])
        key = idx if arity == 2 else idx[0]
        if key not in _expected_keys(fam):
            raise FormatError(f"line {no}: invalid index {key} for {' '.join(words)}")
        d = getattr(inv, fam)
        if key in d:
            raise FormatError(f"line {no}: duplicate entry {' '.join(words)} {key}")
        d[key] = _float(body[-1], no)
    if complete:
        for fam in InvariantSet.FAMILIES:
            missing = _expected_keys(fam) - set(getattr(inv, fam))
            if missing:
                raise FormatError(f"missing {' '.join(_INV_TAGS[fam][0])} entries {sorted(missing)}")
    return inv


# -- Hill blocks and reports -----------------------------------------------


def format_hill(p: HillProblem) -> str:
    out = [f"hill {_f(p.delta_norm)} {_f(p.v)} {p.truncation}\n"]
    for n in sorted(k for k in p.coefficients if k > 0):
        c = p.coefficients[n]
        out.append(f"hcoef {n} {_f(c.real)} {_f(c.imag)}\n")
    return "".join(out)


def parse_hill(text: str) -> HillProblem:
    header, coefs = None, {}
    for no, toks in _lines(text):
        if toks[0] == "hill":
            if header is not None:
                raise FormatError(f"line {no}: second hill header")
            if len(toks) != 4:
                raise FormatError(f"line {no}: hill header needs |delta|, v, N_t")
            header = (_float(toks[1], no), _float(toks[2], no), _int(toks[3], no))
        elif toks[0] == "hcoef":
            if len(toks) != 4:
                raise FormatError(f"line {no}: hcoef line needs n, re, im")
            n = _int(toks[1], no)
            if n in coefs:
                raise FormatError(f"line {no}: duplicate hcoef {n}")
            coefs[n] = complex(_float(toks[2], no), _float(toks[3], no))
        else:
            raise FormatError(f"line {no}: unknown tag {toks[0]!r}")
    if header is None:
        raise FormatError("missing hill header")
    try:
        return HillProblem(header[0], coefs, header[1], header[2])
    except ValueError as e:
        raise FormatError(str(e)) from None


def format_gap_report(report: GapReport) -> str:
    return "".join(
        f"{n} {_f(a)} {_f(b)} {_f(g)}\n" for n, a, b, g in zip(report.n, report.lam1, report.lam2, report.gaps)
    )


def parse_gap_report(text: str) -> list:
    rows = []
    for no, toks in _lines(text):
        if len(toks) != 4:
            raise FormatError(f"line {no}: gap row needs n, lambda_n1, lambda_n2, gap")
        rows.append((_int(toks[0], no), *(_float(t, no) for t in toks[1:])))
    return rows


def format_sweep_rows(rows) -> str:
    return "".join(f"{_f(r)} {_f(m)} {_f(j)} {_f(d)}\n" for r, m, j, d in rows)


def parse_sweep_rows(text: str) -> list:
    rows = []
    for no, toks in _lines(text):
        if len(toks) != 4:
            raise FormatError(f"line {no}: sweep row needs rho, mu_err, J_err, det")
        rows.append(tuple(_float(t, no) for t in toks))
    return rows
