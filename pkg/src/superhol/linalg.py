"""Exact linear algebra over the chart fields.

Vectors are sparse dicts {column: scalar}; matrices are lists of such rows.
Everything reduces to one incremental reduced-echelon structure, which keeps
large, sparse constraint systems (curvature spaces, prolongations) fast while
staying exact.
"""

from __future__ import annotations


class SparseEchelon:
    """Incrementally built reduced row echelon basis of a row space."""

    def __init__(self):
        self.pivot_rows = {}  # pivot column -> row dict with row[pivot] == 1

    def reduce(self, vec: dict) -> dict:
        """Residual of vec after eliminating all current pivots."""
        vec = {c: v for c, v in vec.items() if v}
        while True:
            hit = None
            for c in vec:
                if c in self.pivot_rows:
                    hit = c
                    break
            if hit is None:
                return vec
            coef = vec[hit]
            row = self.pivot_rows[hit]
            for c, v in row.items():
                w = vec.get(c)
                w = -coef * v if w is None else w - coef * v
                if w:
                    vec[c] = w
                else:
                    vec.pop(c, None)

    def insert(self, vec: dict) -> bool:
        """Add a vector; returns True if it enlarged the span."""
        res = self.reduce(vec)
        if not res:
            return False
        pivot = min(res)
        inv = res[pivot]
        row = {c: v / inv for c, v in res.items()}
        # back-substitute into existing rows to keep the form reduced
        for p, other in self.pivot_rows.items():
            coef = other.get(pivot)
            if coef:
                for c, v in row.items():
                    w = other.get(c)
                    w = -coef * v if w is None else w - coef * v
                    if w:
                        other[c] = w
                    else:
                        other.pop(c, None)
        self.pivot_rows[pivot] = row
        return True

    @property
    def rank(self) -> int:
        return len(self.pivot_rows)

    def contains(self, vec: dict) -> bool:
        return not self.reduce(vec)

    def basis(self):
        """Canonical basis rows sorted by pivot column."""
        return [dict(self.pivot_rows[p]) for p in sorted(self.pivot_rows)]


def vec_from_list(values) -> dict:
    return {i: v for i, v in enumerate(values) if v}


def vec_to_list(vec: dict, length: int, zero):
    out = [zero] * length
    for c, v in vec.items():
        out[c] = v
    return out


def span_echelon(vectors) -> SparseEchelon:
    ech = SparseEchelon()
    for v in vectors:
        ech.insert(v)
    return ech


def kernel_basis(rows, ncols: int):
    """Canonical basis of {x : row . x = 0 for all rows}.

    Rows are sparse dicts over columns 0..ncols-1.  The result parametrizes
    free columns in increasing order, each basis vector reduced and with a 1
    at its free column.
    """
    from fractions import Fraction

    ech = span_echelon(rows)
    pivots = sorted(ech.pivot_rows)
    free = [c for c in range(ncols) if c not in ech.pivot_rows]
    basis = []
    for f in free:
        vec = {f: Fraction(1)}
        for p in pivots:
            coef = ech.pivot_rows[p].get(f)
            if coef:
                vec[p] = -coef
        basis.append(vec)
    return basis


def same_span(vectors_a, vectors_b) -> bool:
    ea = span_echelon(vectors_a)
    eb = span_echelon(vectors_b)
    if ea.rank != eb.rank:
        return False
    return all(ea.contains(v) for v in eb.basis())


def intersect_spans(vectors_a, vectors_b, ncols: int):
    """Basis of the intersection of two spans inside dimension ncols.

    Uses the kernel of the stacked coefficient system on (a-coeffs, b-coeffs).
    """
    va = list(vectors_a)
    vb = list(vectors_b)
    if not va or not vb:
        return []
    rows = []
    for col in range(ncols):
        row = {}
        for j, v in enumerate(va):
            if v.get(col):
                row[j] = v[col]
        for j, v in enumerate(vb):
            if v.get(col):
                row[len(va) + j] = -v[col]
        if row:
            rows.append(row)
    combos = kernel_basis(rows, len(va) + len(vb))
    out = SparseEchelon()
    for combo in combos:
        vec = {}
        for j, coef in combo.items():
            if j >= len(va):
                continue
            for c, v in va[j].items():
                w = vec.get(c)
                w = coef * v if w is None else w + coef * v
                if w:
                    vec[c] = w
                else:
                    vec.pop(c, None)
        if vec:
            out.insert(vec)
    return out.basis()
