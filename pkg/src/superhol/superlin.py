"""Exact super linear algebra on a p|q superspace.

Conventions: basis indices A,B = 0..p+q-1 (0-based internally, 1-based in all
serialized forms), parity |A| = 0 for A < p and 1 otherwise.  A matrix acts on
column vectors, entries[A][B] being the coefficient of e_A in M e_B.  Even
matrices preserve parity blocks, odd matrices swap them.
"""

from __future__ import annotations

from .linalg import SparseEchelon, intersect_spans, kernel_basis, span_echelon
from .scalars import RATIONAL, field_one, field_zero, scalar_str, to_field


class SuperDim:
    __slots__ = ("p", "q")

    def __init__(self, p: int, q: int):
        if p < 0 or q < 0:
            raise ValueError("dimensions must be nonnegative")
        self.p = p
        self.q = q

    @property
    def total(self) -> int:
        return self.p + self.q

    def parity(self, index: int) -> int:
        if not 0 <= index < self.total:
            raise IndexError("basis index %d out of range" % index)
        return 0 if index < self.p else 1

    def __eq__(self, other):
        return isinstance(other, SuperDim) and self.p == other.p and self.q == other.q

    def __hash__(self):
        return hash((self.p, self.q))

    def __iter__(self):
        return iter((self.p, self.q))

    def __repr__(self):
        return "%d|%d" % (self.p, self.q)


class SuperMatrix:
    """Parity-graded endomorphism with exact scalar entries."""

    __slots__ = ("dim", "entries", "declared_parity", "field")

    def __init__(self, dim: SuperDim, entries, declared_parity=None, field=RATIONAL):
        t = dim.total
        if len(entries) != t or any(len(row) != t for row in entries):
            raise ValueError("entries must be %dx%d" % (t, t))
        self.dim = dim
        self.entries = [list(row) for row in entries]
        self.field = field
        if declared_parity not in (None, "even", "odd"):
            raise ValueError("declared_parity must be even/odd/None")
        if declared_parity is None:
            declared_parity = self._detect_parity()
        else:
            want = 0 if declared_parity == "even" else 1
            for a in range(t):
                for b in range(t):
                    if self.entries[a][b] and (dim.parity(a) + dim.parity(b)) % 2 != want:
                        raise ValueError(
                            "entry (%d,%d) violates declared %s parity" % (a, b, declared_parity)
                        )
        self.declared_parity = declared_parity

    def _detect_parity(self):
        t = self.dim.total
        seen = set()
        for a in range(t):
            for b in range(t):
                if self.entries[a][b]:
                    seen.add((self.dim.parity(a) + self.dim.parity(b)) % 2)
        if not seen or seen == {0}:
            return "even"
        if seen == {1}:
            return "odd"
        return None

    @property
    def parity(self):
        """0, 1 or None for mixed."""
        if self.declared_parity == "even":
            return 0
        if self.declared_parity == "odd":
            return 1
        return None

    @staticmethod
    def zeros(dim: SuperDim, field=RATIONAL) -> "SuperMatrix":
        z = field_zero(field)
        t = dim.total
        return SuperMatrix(dim, [[z] * t for _ in range(t)], "even", field)

    @staticmethod
    def identity(dim: SuperDim, field=RATIONAL) -> "SuperMatrix":
        m = SuperMatrix.zeros(dim, field)
        one = field_one(field)
        for a in range(dim.total):
            m.entries[a][a] = one
        return m

    @staticmethod
    def unit(dim: SuperDim, a: int, b: int, field=RATIONAL) -> "SuperMatrix":
        """E_{ab}: sends e_b to e_a (0-based)."""
        m = SuperMatrix.zeros(dim, field)
        m.entries[a][b] = field_one(field)
        m.declared_parity = m._detect_parity()
        return m

    def copy(self) -> "SuperMatrix":
        return SuperMatrix(self.dim, self.entries, self.declared_parity, self.field)

    def __eq__(self, other):
        return (
            isinstance(other, SuperMatrix)
            and self.dim == other.dim
            and all(
                self.entries[a][b] == other.entries[a][b]
                for a in range(self.dim.total)
                for b in range(self.dim.total)
            )
        )

    def is_zero(self) -> bool:
        return all(not v for row in self.entries for v in row)

    def __add__(self, other):
        if self.dim != other.dim:
            raise ValueError("dimension mismatch")
        t = self.dim.total
        return SuperMatrix(
            self.dim,
            [[self.entries[a][b] + other.entries[a][b] for b in range(t)] for a in range(t)],
            None,
            self.field,
        )

    def __sub__(self, other):
        return self + other.scale(-1)

    def __neg__(self):
        return self.scale(-1)

    def scale(self, c) -> "SuperMatrix":
        t = self.dim.total
        return SuperMatrix(
            self.dim,
            [[c * self.entries[a][b] for b in range(t)] for a in range(t)],
            self.declared_parity,
            self.field,
        )

    def matmul(self, other: "SuperMatrix") -> "SuperMatrix":
        if self.dim != other.dim:
            raise ValueError("dimension mismatch")
        t = self.dim.total
        z = field_zero(self.field)
        out = [[z] * t for _ in range(t)]
        for a in range(t):
            row = self.entries[a]
            for c in range(t):
                v = row[c]
                if not v:
                    continue
                orow = other.entries[c]
                orow_out = out[a]
                for b in range(t):
                    w = orow[b]
                    if w:
                        orow_out[b] = orow_out[b] + v * w
        return SuperMatrix(self.dim, out, None, self.field)

    def apply(self, vec):
        """Matrix times column vector (list of scalars)."""
        t = self.dim.total
        z = field_zero(self.field)
        out = [z] * t
        for a in range(t):
            row = self.entries[a]
            acc = z
            for b in range(t):
                if vec[b] and row[b]:
                    acc = acc + row[b] * vec[b]
            out[a] = acc
        return out

    def flatten(self) -> dict:
        t = self.dim.total
        out = {}
        for a in range(t):
            for b in range(t):
                v = self.entries[a][b]
                if v:
                    out[a * t + b] = v
        return out

    @staticmethod
    def from_flat(dim: SuperDim, vec: dict, field=RATIONAL) -> "SuperMatrix":
        m = SuperMatrix.zeros(dim, field)
        t = dim.total
        for pos, v in vec.items():
            m.entries[pos // t][pos % t] = v
        m.declared_parity = m._detect_parity()
        return m

    def homogeneous_part(self, parity: int) -> "SuperMatrix":
        t = self.dim.total
        m = SuperMatrix.zeros(self.dim, self.field)
        for a in range(t):
            for b in range(t):
                if (self.dim.parity(a) + self.dim.parity(b)) % 2 == parity:
                    m.entries[a][b] = self.entries[a][b]
        m.declared_parity = m._detect_parity()
        return m

    def supertranspose(self) -> "SuperMatrix":
        """(-1)-graded transpose: (A^st)_{ab} = (-1)^{|a|(|a|+|b|)} A_{ba}."""
        t = self.dim.total
        m = SuperMatrix.zeros(self.dim, self.field)
        for a in range(t):
            for b in range(t):
                v = self.entries[b][a]
                if v:
                    sign = (-1) ** (self.dim.parity(a) * (self.dim.parity(a) + self.dim.parity(b)))
                    m.entries[a][b] = sign * v
        m.declared_parity = m._detect_parity()
        return m

    def to_json(self):
        return [scalar_str(v) for row in self.entries for v in row]

    def __repr__(self):
        rows = ["[" + ", ".join(scalar_str(v) for v in row) + "]" for row in self.entries]
        return "SuperMatrix(%r, [%s])" % (self.dim, "; ".join(rows))


def supertrace(m: SuperMatrix):
    total = field_zero(m.field)
    for a in range(m.dim.total):
        if m.dim.parity(a) == 0:
            total = total + m.entries[a][a]
        else:
            total = total - m.entries[a][a]
    return total


def superbracket(a: SuperMatrix, b: SuperMatrix) -> SuperMatrix:
    """[A,B] = AB - (-1)^{|A||B|} BA for homogeneous A, B."""
    if a.parity is None or b.parity is None:
        raise ValueError("superbracket needs homogeneous matrices")
    ab = a.matmul(b)
    ba = b.matmul(a)
    if a.parity and b.parity:
        return ab + ba
    return ab - ba


class SubSuperalgebra:
    """Echelonized homogeneous basis of a subspace of gl(p|q)."""

    def __init__(self, dim: SuperDim, even_basis, odd_basis, field=RATIONAL, closed=False):
        self.dim = dim
        self.field = field
        self.even_basis = list(even_basis)
        self.odd_basis = list(odd_basis)
        self.closed = closed
        self._even_ech = span_echelon([m.flatten() for m in self.even_basis])
        self._odd_ech = span_echelon([m.flatten() for m in self.odd_basis])

    @staticmethod
    def from_matrices(dim: SuperDim, mats, field=RATIONAL, closed=False) -> "SubSuperalgebra":
        even = SparseEchelon()
        odd = SparseEchelon()
        for m in mats:
            for parity, ech in ((0, even), (1, odd)):
                part = m.homogeneous_part(parity)
                if not part.is_zero():
                    ech.insert(part.flatten())
        return SubSuperalgebra(
            dim,
            [SuperMatrix.from_flat(dim, v, field) for v in even.basis()],
            [SuperMatrix.from_flat(dim, v, field) for v in odd.basis()],
            field,
            closed,
        )

    @staticmethod
    def zero(dim: SuperDim, field=RATIONAL) -> "SubSuperalgebra":
        return SubSuperalgebra(dim, [], [], field, closed=True)

    @property
    def graded_dim(self):
        return (len(self.even_basis), len(self.odd_basis))

    @property
    def total_dim(self) -> int:
        return len(self.even_basis) + len(self.odd_basis)

    def basis(self):
        return self.even_basis + self.odd_basis

    def contains_matrix(self, m: SuperMatrix) -> bool:
        for parity, ech in ((0, self._even_ech), (1, self._odd_ech)):
            part = m.homogeneous_part(parity)
            if not part.is_zero() and not ech.contains(part.flatten()):
                return False
        return True

    def contains_algebra(self, other: "SubSuperalgebra") -> bool:
        return all(self.contains_matrix(m) for m in other.basis())

    def __eq__(self, other):
        if not isinstance(other, SubSuperalgebra):
            return NotImplemented
        if self.dim != other.dim or self.graded_dim != other.graded_dim:
            return False
        return all(
            a == b
            for a, b in zip(self.basis(), other.basis())
        )

    def to_json(self):
        return {
            "dim": {"p": self.dim.p, "q": self.dim.q},
            "even": [m.to_json() for m in self.even_basis],
            "odd": [m.to_json() for m in self.odd_basis],
        }

    def __repr__(self):
        return "SubSuperalgebra(dim %r, graded dim %d|%d)" % (
            self.dim,
            len(self.even_basis),
            len(self.odd_basis),
        )


def generate_subalgebra(generators, dim=None, field=None) -> SubSuperalgebra:
    """Smallest bracket-closed graded subspace containing the generators.

    Mixed-parity generators are split into homogeneous parts.  Each pass
    brackets the newly added basis elements against the whole current basis
    and re-echelonizes until the graded dimension stabilizes.
    """
    generators = list(generators)
    if dim is None:
        if not generators:
            raise ValueError("need explicit dim for empty generator list")
        dim = generators[0].dim
    if field is None:
        field = generators[0].field if generators else RATIONAL
    for g in generators:
        if g.dim != dim:
            raise ValueError("generator dimension mismatch")

    even = SparseEchelon()
    odd = SparseEchelon()
    basis_mats = []

    def push(m: SuperMatrix):
        added = []
        for parity, ech in ((0, even), (1, odd)):
            part = m.homogeneous_part(parity)
            if part.is_zero():
                continue
            if ech.insert(part.flatten()):
                added.append(part)
        basis_mats.extend(added)
        return added

    frontier = []
    for g in generators:
        frontier.extend(push(g))

    while frontier:
        new_frontier = []
        snapshot = list(basis_mats)
        for a in frontier:
            for b in snapshot:
                br = superbracket(a, b)
                if not br.is_zero():
                    new_frontier.extend(push(br))
        frontier = new_frontier

    return SubSuperalgebra(
        dim,
        [SuperMatrix.from_flat(dim, v, field) for v in even.basis()],
        [SuperMatrix.from_flat(dim, v, field) for v in odd.basis()],
        field,
        closed=True,
    )


class StructureTensor:
    """A bilinear form or endomorphism used as a stabilizer target."""

    KINDS = ("even_bilinear_form", "odd_bilinear_form", "even_endomorphism", "odd_endomorphism")
    SYMMETRIES = ("supersymmetric", "super-skew", "none")

    def __init__(self, kind: str, symmetry: str, data: SuperMatrix):
        if kind not in self.KINDS:
            raise ValueError("unknown kind %r" % kind)
        if symmetry not in self.SYMMETRIES:
            raise ValueError("unknown symmetry %r" % symmetry)
        self.kind = kind
        self.symmetry = symmetry
        self.data = data
        self._validate()

    def _validate(self):
        dim = self.data.dim
        t = dim.total
        e = self.data.entries
        form_parity = 0 if self.kind == "even_bilinear_form" else 1
        if self.kind.endswith("endomorphism"):
            want = 0 if self.kind == "even_endomorphism" else 1
            for a in range(t):
                for b in range(t):
                    if e[a][b] and (dim.parity(a) + dim.parity(b)) % 2 != want:
                        raise ValueError("endomorphism block pattern violates %s" % self.kind)
            return
        for a in range(t):
            for b in range(t):
                if e[a][b] and (dim.parity(a) + dim.parity(b)) % 2 != form_parity:
                    raise ValueError("form entries must sit in parity-%d blocks" % form_parity)
        if self.symmetry == "none":
            return
        skew = self.symmetry == "super-skew"
        for a in range(t):
            for b in range(t):
                sign = (-1) ** (dim.parity(a) * dim.parity(b))
                if skew:
                    sign = -sign
                if e[a][b] != sign * e[b][a]:
                    raise ValueError("form violates %s symmetry at (%d,%d)" % (self.symmetry, a, b))


def stabilizer_algebra(tensor: StructureTensor) -> SubSuperalgebra:
    """All homogeneous A annihilating the tensor.

    Forms: g(AX, Y) + (-1)^{|A||X|} g(X, AY) = 0.
    Endomorphisms: [A, J] = 0 in the endomorphism superalgebra.
    """
    data = tensor.data
    dim = data.dim
    t = dim.total
    field = data.field
    mats = []
    for tau in (0, 1):
        cols = [
            (a, b)
            for a in range(t)
            for b in range(t)
            if (dim.parity(a) + dim.parity(b)) % 2 == tau
        ]
        col_of = {ab: j for j, ab in enumerate(cols)}
        rows = []
        if tensor.kind.endswith("bilinear_form"):
            g = data.entries
            for c in range(t):
                sgn = (-1) ** (tau * dim.parity(c))
                for d in range(t):
                    row = {}
                    for b in range(t):
                        j = col_of.get((b, c))
                        if j is not None and g[b][d]:
                            row[j] = row.get(j, 0) + g[b][d]
                        j = col_of.get((b, d))
                        if j is not None and g[c][b]:
                            row[j] = row.get(j, 0) + sgn * g[c][b]
                    row = {k: v for k, v in row.items() if v}
                    if row:
                        rows.append(row)
        else:
            jm = data.entries
            jp = 0 if tensor.kind == "even_endomorphism" else 1
            sgn = (-1) ** (tau * jp)
            for a in range(t):
                for b in range(t):
                    row = {}
                    for c in range(t):
                        j = col_of.get((a, c))
                        if j is not None and jm[c][b]:
                            row[j] = row.get(j, 0) + jm[c][b]
                        j = col_of.get((c, b))
                        if j is not None and jm[a][c]:
                            row[j] = row.get(j, 0) - sgn * jm[a][c]
                    row = {k: v for k, v in row.items() if v}
                    if row:
                        rows.append(row)
        for vec in kernel_basis(rows, len(cols)):
            m = SuperMatrix.zeros(dim, field)
            for j, v in vec.items():
                a, b = cols[j]
                m.entries[a][b] = to_field(v, field)
            m.declared_parity = m._detect_parity()
            mats.append(m)
    return SubSuperalgebra.from_matrices(dim, mats, field, closed=True)


# ------------------------------------------------------- classical algebras


def standard_even_form(p: int, q: int, skew=False, field=RATIONAL) -> StructureTensor:
    """diag(I_p, J_q) supersymmetric, or diag(J_p, I_q) super-skew."""
    dim = SuperDim(p, q)
    m = SuperMatrix.zeros(dim, field)
    one = field_one(field)
    if not skew:
        if q % 2:
            raise ValueError("supersymmetric even form needs even q")
        for a in range(p):
            m.entries[a][a] = one
        for k in range(q // 2):
            m.entries[p + 2 * k][p + 2 * k + 1] = one
            m.entries[p + 2 * k + 1][p + 2 * k] = -one
        return StructureTensor("even_bilinear_form", "supersymmetric", m)
    if p % 2:
        raise ValueError("super-skew even form needs even p")
    for k in range(p // 2):
        m.entries[2 * k][2 * k + 1] = one
        m.entries[2 * k + 1][2 * k] = -one
    for a in range(q):
        m.entries[p + a][p + a] = one
    return StructureTensor("even_bilinear_form", "super-skew", m)


def standard_odd_form(n: int, skew=False, field=RATIONAL) -> StructureTensor:
    """Pairing of the two blocks of an n|n space."""
    dim = SuperDim(n, n)
    m = SuperMatrix.zeros(dim, field)
    one = field_one(field)
    for a in range(n):
        m.entries[a][n + a] = one
        m.entries[n + a][a] = -one if skew else one
    return StructureTensor("odd_bilinear_form", "super-skew" if skew else "supersymmetric", m)


def standard_odd_complex_structure(n: int, field=RATIONAL) -> StructureTensor:
    """Odd J with J^2 = -id on an n|n space."""
    dim = SuperDim(n, n)
    m = SuperMatrix.zeros(dim, field)
    one = field_one(field)
    for a in range(n):
        m.entries[a][n + a] = -one
        m.entries[n + a][a] = one
    return StructureTensor("odd_endomorphism", "none", m)


def full_gl(dim: SuperDim, field=RATIONAL) -> SubSuperalgebra:
    mats = [
        SuperMatrix.unit(dim, a, b, field)
        for a in range(dim.total)
        for b in range(dim.total)
    ]
    return SubSuperalgebra.from_matrices(dim, mats, field, closed=True)


def cut_by_functionals(algebra: SubSuperalgebra, functionals) -> SubSuperalgebra:
    """Subalgebra of elements killed by the given linear maps matrix -> scalar.

    Each functional applies to even basis combinations only when it vanishes
    automatically on odd matrices (e.g. supertrace-type cuts); it is applied
    to both parities regardless, which is correct for linear constraints.
    """
    out = []
    for basis in (algebra.even_basis, algebra.odd_basis):
        if not basis:
            continue
        rows = []
        for fn in functionals:
            row = {}
            for j, m in enumerate(basis):
                v = fn(m)
                if v:
                    row[j] = v
            if row:
                rows.append(row)
        for combo in kernel_basis(rows, len(basis)):
            m = SuperMatrix.zeros(algebra.dim, algebra.field)
            for j, c in combo.items():
                m = m + basis[j].scale(c)
            m.declared_parity = m._detect_parity()
            out.append(m)
    return SubSuperalgebra.from_matrices(algebra.dim, out, algebra.field)


def intersect_algebras(a: SubSuperalgebra, b: SubSuperalgebra) -> SubSuperalgebra:
    if a.dim != b.dim:
        raise ValueError("ambient dimension mismatch")
    t2 = a.dim.total ** 2
    mats = []
    for basis_a, basis_b in ((a.even_basis, b.even_basis), (a.odd_basis, b.odd_basis)):
        vecs = intersect_spans(
            [m.flatten() for m in basis_a], [m.flatten() for m in basis_b], t2
        )
        mats.extend(SuperMatrix.from_flat(a.dim, v, a.field) for v in vecs)
    return SubSuperalgebra.from_matrices(a.dim, mats, a.field)


def classical_superalgebra(name: str, params, field=RATIONAL) -> SubSuperalgebra:
    """Named constructors for the standard matrix superalgebras.

    params: gl/sl/osp/osp_sk take (p, q); pe/spe/q/cpe/cspe take n; cosp takes
    (p, q).  The c-prefixed variants append the identity (center).
    """
    if name in ("gl", "sl", "osp", "osp_sk", "cosp"):
        p, q = params
    else:
        n = params if isinstance(params, int) else params[0]
        p = q = n
    dim = SuperDim(p, q)
    if name == "gl":
        return full_gl(dim, field)
    if name == "sl":
        return cut_by_functionals(full_gl(dim, field), [supertrace])
    if name == "osp":
        return stabilizer_algebra(standard_even_form(p, q, skew=False, field=field))
    if name == "osp_sk":
        return stabilizer_algebra(standard_even_form(p, q, skew=True, field=field))
    if name == "pe":
        return stabilizer_algebra(standard_odd_form(p, skew=False, field=field))
    if name == "spe":
        pe = stabilizer_algebra(standard_odd_form(p, skew=False, field=field))
        return cut_by_functionals(pe, [supertrace])
    if name == "q":
        return stabilizer_algebra(standard_odd_complex_structure(p, field=field))
    if name in ("cosp", "cpe", "cspe"):
        base = classical_superalgebra(name[1:], params, field)
        mats = base.basis() + [SuperMatrix.identity(dim, field)]
        return SubSuperalgebra.from_matrices(dim, mats, field, closed=True)
    raise ValueError("unknown classical superalgebra %r" % name)
