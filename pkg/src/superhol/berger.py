"""Spaces of algebraic curvature tensors, Berger certificates, prolongations.

All solves assemble explicit sparse constraint systems over the exact field
and take kernels; constraints are enumerated over homogeneous basis tuples,
which suffices by multilinearity.  Unknowns for curvature tensors are the
values on canonical argument pairs (a < b, plus a = b when a is odd), with
graded antisymmetry supplying the rest.
"""

from __future__ import annotations

from .linalg import SparseEchelon, kernel_basis, same_span, span_echelon
from .scalars import field_zero, to_field
from .superlin import (
    SubSuperalgebra,
    SuperDim,
    SuperMatrix,
    superbracket,
)


def canonical_pairs(dim: SuperDim):
    t = dim.total
    pairs = []
    for a in range(t):
        for b in range(a, t):
            if a == b and dim.parity(a) == 0:
                continue
            pairs.append((a, b))
    return pairs


def reduce_pair(dim: SuperDim, a: int, b: int):
    """Canonical (pair, sign); sign 0 means the value vanishes identically."""
    if a == b and dim.parity(a) == 0:
        return None, 0
    if a <= b:
        return (a, b), 1
    return (b, a), -((-1) ** (dim.parity(a) * dim.parity(b)))


class CurvatureElement:
    """Algebraic curvature tensor stored on canonical pairs."""

    def __init__(self, dim: SuperDim, parity: int, values, field):
        self.dim = dim
        self.parity = parity
        self.values = values  # {(a,b) canonical: SuperMatrix}
        self.field = field

    def value(self, a: int, b: int) -> SuperMatrix:
        pair, sign = reduce_pair(self.dim, a, b)
        if sign == 0 or pair not in self.values:
            return SuperMatrix.zeros(self.dim, self.field)
        m = self.values[pair]
        return m if sign == 1 else m.scale(-1)

    def is_zero(self) -> bool:
        return all(m.is_zero() for m in self.values.values())

    def flatten(self) -> dict:
        t = self.dim.total
        out = {}
        for idx, pair in enumerate(canonical_pairs(self.dim)):
            m = self.values.get(pair)
            if m is None:
                continue
            for a in range(t):
                for b in range(t):
                    v = m.entries[a][b]
                    if v:
                        out[idx * t * t + a * t + b] = v
        return out


class LinearSolutionSpace:
    def __init__(self, ambient: str, basis, even_dim: int, odd_dim: int):
        self.ambient = ambient
        self.basis = basis
        self.even_dim = even_dim
        self.odd_dim = odd_dim

    @property
    def graded_dim(self):
        return (self.even_dim, self.odd_dim)

    @property
    def total_dim(self):
        return self.even_dim + self.odd_dim

    def __repr__(self):
        return "LinearSolutionSpace(%s, dim %d|%d)" % (self.ambient, self.even_dim, self.odd_dim)


def _sorted_triples(t):
    return [
        (x, y, z)
        for x in range(t)
        for y in range(x, t)
        for z in range(y, t)
    ]


def curvature_space(algebra: SubSuperalgebra) -> LinearSolutionSpace:
    """Solutions of the graded antisymmetry + cyclic identity valued in g."""
    dim = algebra.dim
    t = dim.total
    field = algebra.field
    pairs = canonical_pairs(dim)
    basis = algebra.basis()
    elements = []
    dims = [0, 0]
    for sigma in (0, 1):
        cols = []
        for pi, (a, b) in enumerate(pairs):
            want = (dim.parity(a) + dim.parity(b) + sigma) % 2
            for gi, g in enumerate(basis):
                if g.parity == want:
                    cols.append((pi, gi))
        col_of = {c: j for j, c in enumerate(cols)}

        def term_coeffs(row, u, v, w, comp, scale):
            pair, sign = reduce_pair(dim, u, v)
            if sign == 0:
                return
            pi = pairs.index(pair)
            for gi, g in enumerate(basis):
                j = col_of.get((pi, gi))
                if j is None:
                    continue
                val = g.entries[comp][w]
                if val:
                    row[j] = row.get(j, 0) + scale * sign * val

        rows = []
        for (x, y, z) in _sorted_triples(t):
            px, py, pz = dim.parity(x), dim.parity(y), dim.parity(z)
            s2 = (-1) ** (px * (py + pz))
            s3 = (-1) ** (pz * (px + py))
            for comp in range(t):
                row = {}
                term_coeffs(row, x, y, z, comp, 1)
                term_coeffs(row, y, z, x, comp, s2)
                term_coeffs(row, z, x, y, comp, s3)
                row = {k: v for k, v in row.items() if v}
                if row:
                    rows.append(row)
        for vec in kernel_basis(rows, len(cols)):
            values = {}
            for j, coef in vec.items():
                pi, gi = cols[j]
                add = basis[gi].scale(to_field(coef, field))
                if pairs[pi] in values:
                    values[pairs[pi]] = values[pairs[pi]] + add
                else:
                    values[pairs[pi]] = add
            elements.append(CurvatureElement(dim, sigma, values, field))
            dims[sigma] += 1
    return LinearSolutionSpace("curvature tensors", elements, dims[0], dims[1])


def check_curvature_element(algebra: SubSuperalgebra, elem: CurvatureElement) -> bool:
    """Re-check values-in-g plus the cyclic identity for a single element."""
    dim = algebra.dim
    t = dim.total
    for m in elem.values.values():
        if not algebra.contains_matrix(m):
            return False
    for (x, y, z) in _sorted_triples(t):
        px, py, pz = dim.parity(x), dim.parity(y), dim.parity(z)
        s2 = (-1) ** (px * (py + pz))
        s3 = (-1) ** (pz * (px + py))
        for comp in range(t):
            acc = field_zero(algebra.field)
            for (u, v, w, s) in ((x, y, z, 1), (y, z, x, s2), (z, x, y, s3)):
                acc = acc + s * elem.value(u, v).entries[comp][w]
            if acc:
                return False
    return True


def act_on_curvature(a_mat: SuperMatrix, elem: CurvatureElement) -> CurvatureElement:
    """Module action A . R on curvature tensors."""
    if a_mat.parity is None:
        raise ValueError("action needs a homogeneous matrix")
    dim = elem.dim
    t = dim.total
    tau = a_mat.parity
    rho = elem.parity
    values = {}
    for (a, b) in canonical_pairs(dim):
        rv = elem.value(a, b)
        out = superbracket(a_mat, rv) if rv.parity is not None else a_mat.matmul(rv) - rv.matmul(a_mat)
        for c in range(t):
            coef = a_mat.entries[c][a]
            if coef:
                out = out + elem.value(c, b).scale(-((-1) ** (tau * rho)) * coef)
            coef = a_mat.entries[c][b]
            if coef:
                out = out + elem.value(a, c).scale(
                    -((-1) ** (tau * (rho + dim.parity(a)))) * coef
                )
        values[(a, b)] = out
    return CurvatureElement(dim, (tau + rho) % 2, values, elem.field)


def berger_check(algebra: SubSuperalgebra, rspace: LinearSolutionSpace = None):
    """Span L of curvature values, the Berger property, and the ideal check."""
    if rspace is None:
        rspace = curvature_space(algebra)
    mats = []
    for elem in rspace.basis:
        mats.extend(elem.values.values())
    span = SubSuperalgebra.from_matrices(algebra.dim, mats, algebra.field)
    ideal_ok = True
    for a in algebra.basis():
        for b in span.basis():
            if not span.contains_matrix(superbracket(a, b)):
                ideal_ok = False
    is_berger = span.graded_dim == algebra.graded_dim and algebra.contains_algebra(span)
    return {
        "L": span,
        "is_berger": is_berger,
        "ideal_ok": ideal_ok,
        "R_dim": rspace.graded_dim,
    }


def curvature_derivative_space(algebra: SubSuperalgebra, rspace: LinearSolutionSpace = None) -> LinearSolutionSpace:
    """Solutions S in V* tensor R(g) of the graded cyclic constraint."""
    if rspace is None:
        rspace = curvature_space(algebra)
    dim = algebra.dim
    t = dim.total
    field = algebra.field
    relems = rspace.basis
    out = []
    dims = [0, 0]
    for sigma in (0, 1):
        cols = [
            (d, j)
            for d in range(t)
            for j, r in enumerate(relems)
            if (dim.parity(d) + r.parity) % 2 == sigma % 2
        ]
        col_of = {c: k for k, c in enumerate(cols)}
        rows = []
        for (x, y, z) in _sorted_triples(t):
            px, py, pz = dim.parity(x), dim.parity(y), dim.parity(z)
            s2 = (-1) ** (px * (py + pz))
            s3 = (-1) ** (pz * (px + py))
            for A in range(t):
                for B in range(t):
                    row = {}
                    for (d, u, v, s) in ((x, y, z, 1), (y, z, x, s2), (z, x, y, s3)):
                        for j, r in enumerate(relems):
                            k = col_of.get((d, j))
                            if k is None:
                                continue
                            val = r.value(u, v).entries[A][B]
                            if val:
                                row[k] = row.get(k, 0) + s * val
                    row = {k: v for k, v in row.items() if v}
                    if row:
                        rows.append(row)
        for vec in kernel_basis(rows, len(cols)):
            comps = {}
            for k, coef in vec.items():
                d, j = cols[k]
                comps.setdefault(d, []).append((to_field(coef, field), relems[j]))
            out.append((sigma, comps))
            dims[sigma] += 1
    return LinearSolutionSpace("first curvature derivatives", out, dims[0], dims[1])


def symmetric_berger_check(algebra: SubSuperalgebra):
    rspace = curvature_space(algebra)
    bc = berger_check(algebra, rspace)
    deriv = curvature_derivative_space(algebra, rspace)
    return {
        "is_berger": bc["is_berger"],
        "Rnabla_dim": deriv.graded_dim,
        "is_symmetric_berger": bc["is_berger"] and deriv.total_dim == 0,
    }


# --------------------------------------------------------- prolongations


class ProlongationLevel:
    """Basis of one prolongation level as coordinate multimaps.

    Each element maps a tuple of k direction indices to a matrix in the level
    zero algebra, stored flat as {(d_1,...,d_k, A, B): scalar}.  raw_coords
    are the solver coordinates over (direction, previous-level basis index).
    """

    def __init__(self, k: int, elements, parities, raw_coords):
        self.k = k
        self.elements = elements
        self.parities = parities
        self.raw_coords = raw_coords

    @property
    def graded_dim(self):
        even = sum(1 for p in self.parities if p == 0)
        return (even, len(self.parities) - even)

    @property
    def total_dim(self):
        return len(self.parities)


class ProlongationTower:
    def __init__(self, dim: SuperDim, g0: SubSuperalgebra, levels):
        self.dim = dim
        self.g0 = g0
        self.levels = levels  # list of ProlongationLevel for k = 1..

    def graded_dims(self):
        return [lvl.graded_dim for lvl in self.levels]


def _level0_elements(g0: SubSuperalgebra):
    elems = []
    parities = []
    for m in g0.basis():
        flat = {}
        t = m.dim.total
        for a in range(t):
            for b in range(t):
                if m.entries[a][b]:
                    flat[(a, b)] = m.entries[a][b]
        elems.append(flat)
        parities.append(m.parity)
    return elems, parities


def _apply(elem, k: int, y: int):
    """Apply a level-k multimap to the basis direction y, landing in level k-1."""
    if k == 0:
        return {(key[0],): v for key, v in elem.items() if key[1] == y}
    return {key[1:]: v for key, v in elem.items() if key[0] == y}


def _next_level(dim: SuperDim, prev_elems, prev_parities, k: int):
    """Solve the graded symmetry condition for level k+1 elements."""
    t = dim.total
    new_elems = []
    new_parities = []
    new_raw = []
    for sigma in (0, 1):
        cols = [
            (d, i)
            for d in range(t)
            for i, p in enumerate(prev_parities)
            if (dim.parity(d) + p) % 2 == sigma
        ]
        col_of = {c: j for j, c in enumerate(cols)}
        rows_map = {}

        def add(entry_key, col, val):
            row = rows_map.setdefault(entry_key, {})
            row[col] = row.get(col, 0) + val

        for x in range(t):
            for y in range(x, t):
                sign = (-1) ** (dim.parity(x) * dim.parity(y))
                for i, elem in enumerate(prev_elems):
                    jx = col_of.get((x, i))
                    if jx is not None:
                        for key, v in _apply(elem, k, y).items():
                            add((x, y) + key, jx, v)
                    jy = col_of.get((y, i))
                    if jy is not None:
                        for key, v in _apply(elem, k, x).items():
                            add((x, y) + key, jy, -sign * v)
        rows = [
            {c: v for c, v in row.items() if v}
            for row in rows_map.values()
        ]
        rows = [r for r in rows if r]
        for vec in kernel_basis(rows, len(cols)):
            flat = {}
            for j, coef in vec.items():
                d, i = cols[j]
                for key, v in prev_elems[i].items():
                    full = (d,) + key
                    w = flat.get(full)
                    w = coef * v if w is None else w + coef * v
                    if w:
                        flat[full] = w
                    else:
                        flat.pop(full, None)
            new_elems.append(flat)
            new_parities.append(sigma)
            new_raw.append(vec_with_cols(vec, cols))
    return new_elems, new_parities, new_raw


def vec_with_cols(vec, cols):
    return {cols[j]: v for j, v in vec.items()}


def cartan_prolongation(dim: SuperDim, g0: SubSuperalgebra, order: int) -> ProlongationTower:
    """Levels 1..order of the prolongation tower of g0 acting on V."""
    if order < 1:
        raise ValueError("order must be at least 1")
    prev_elems, prev_parities = _level0_elements(g0)
    levels = []
    for k in range(order):
        elems, parities, raw = _next_level(dim, prev_elems, prev_parities, k)
        levels.append(ProlongationLevel(k + 1, elems, parities, raw))
        prev_elems, prev_parities = elems, parities
        if not elems:
            for k2 in range(k + 1, order):
                levels.append(ProlongationLevel(k2 + 1, [], [], []))
            break
    return ProlongationTower(dim, g0, levels)


# --------------------------------------------------- Spencer rank identity


def spencer_rank_identity(algebra: SubSuperalgebra, tower: ProlongationTower = None, rspace: LinearSolutionSpace = None):
    """Exactness of the prolongation sequence and the derived cohomology rank.

    Builds the map V* tensor g_1 -> curvature space, checks its kernel equals
    the embedded g_2, and reports dim R(g) - rank as the derived quantity.
    """
    dim = algebra.dim
    t = dim.total
    field = algebra.field
    if rspace is None:
        rspace = curvature_space(algebra)
    if tower is None:
        tower = cartan_prolongation(dim, algebra, 2)
    g1 = tower.levels[0]
    g2 = tower.levels[1] if len(tower.levels) > 1 else ProlongationLevel(2, [], [], [])
    pairs = canonical_pairs(dim)

    report = {
        "g1_dim": g1.graded_dim,
        "g2_dim": g2.graded_dim,
        "R_dim": rspace.graded_dim,
    }
    h22 = [0, 0]
    exactness_ok = True
    for sigma in (0, 1):
        cols = [
            (d, j)
            for d in range(t)
            for j, p in enumerate(g1.parities)
            if (dim.parity(d) + p) % 2 == sigma
        ]
        col_of = {c: k for k, c in enumerate(cols)}
        images = []
        for (d, j) in cols:
            alpha = g1.elements[j]
            flat = {}
            for pi, (x, y) in enumerate(pairs):
                mat = {}
                if x == d:
                    for key, v in _apply(alpha, 1, y).items():
                        mat[key[0:2]] = mat.get(key[0:2], 0) + v
                if y == d:
                    sign = -((-1) ** (dim.parity(x) * dim.parity(y)))
                    for key, v in _apply(alpha, 1, x).items():
                        mat[key[0:2]] = mat.get(key[0:2], 0) + sign * v
                for (a, b), v in mat.items():
                    if v:
                        flat[pi * t * t + a * t + b] = v
            images.append(flat)
        # rank of the map and its kernel
        rows = {}
        for k, img in enumerate(images):
            for coord, v in img.items():
                rows.setdefault(coord, {})[k] = v
        ker = kernel_basis(list(rows.values()), len(cols))
        rank = len(cols) - len(ker)
        r_dim_sigma = rspace.graded_dim[sigma]
        h22[sigma] = r_dim_sigma - rank
        # embedded g_2 coordinates
        emb = []
        for j2, raw in enumerate(g2.raw_coords):
            if g2.parities[j2] != sigma:
                continue
            vec = {}
            for (d, i), v in raw.items():
                k = col_of.get((d, i))
                if k is None:
                    exactness_ok = False
                    continue
                vec[k] = v
            emb.append(vec)
        if not same_span(ker, emb):
            exactness_ok = False
        # image must satisfy the curvature space constraints
        rspace_span = span_echelon([e.flatten() for e in rspace.basis])
        for img in images:
            if img and not rspace_span.contains(img):
                exactness_ok = False
    report["exactness_ok"] = exactness_ok
    report["h22_raw"] = tuple(h22)
    report["h22_total"] = h22[0] + h22[1]
    # Table notation reports these modules with a parity shift
    report["h22_pi_twisted"] = (h22[1], h22[0])
    if not exactness_ok:
        raise AssertionError(
            "prolongation sequence failed exactness; the solver implementations disagree"
        )
    return report


# ------------------------------------------------------- abstract algebra


def structure_constants(algebra: SubSuperalgebra):
    """Basis and bracket coordinates; raises if the basis is not closed."""
    basis = algebra.basis()
    flats = [m.flatten() for m in basis]
    n = len(basis)
    table = {}
    for i in range(n):
        for j in range(n):
            br = superbracket(basis[i], basis[j])
            coords = _coordinates(flats, br.flatten())
            if coords is None:
                raise ValueError("algebra basis is not bracket-closed")
            table[(i, j)] = coords
    return basis, table


def _coordinates(columns, target):
    """Solve sum c_i columns_i = target exactly; None if unsolvable."""
    k = len(columns)
    rows = {}
    for i, col in enumerate(columns):
        for coord, v in col.items():
            rows.setdefault(coord, {})[i] = v
    for coord, v in target.items():
        rows.setdefault(coord, {})[k] = -v
    combos = kernel_basis(list(rows.values()), k + 1)
    for combo in combos:
        s = combo.get(k)
        if s:
            return {i: v / s for i, v in combo.items() if i != k and v}
    if not target:
        return {}
    return None


def is_simple(algebra: SubSuperalgebra):
    """Pragmatic simplicity test: exact center and derived checks plus a
    bracket-ideal sweep over basis lines (heuristic, reported as such)."""
    basis = algebra.basis()
    if not basis:
        return False, "zero algebra"
    n = len(basis)
    # center: combinations bracketing to zero with every basis element
    rows = {}
    for i in range(n):
        for j in range(n):
            br = superbracket(basis[i], basis[j])
            for coord, v in br.flatten().items():
                rows.setdefault((j, coord), {})[i] = v
    center = kernel_basis(list(rows.values()), n)
    if center:
        return False, "nontrivial center"
    derived = []
    for i in range(n):
        for j in range(n):
            derived.append(superbracket(basis[i], basis[j]))
    dspan = SubSuperalgebra.from_matrices(algebra.dim, derived, algebra.field)
    if dspan.graded_dim != algebra.graded_dim:
        return False, "derived subalgebra is proper"
    for i in range(n):
        ideal = _ideal_closure(algebra, [basis[i]])
        if 0 < ideal.total_dim < algebra.total_dim:
            return False, "basis line generates a proper ideal"
    return True, "no proper ideal found by the basis-line sweep (heuristic)"


def _ideal_closure(algebra: SubSuperalgebra, seeds):
    ech = SparseEchelon()
    frontier = []
    mats = []
    for s in seeds:
        for parity in (0, 1):
            part = s.homogeneous_part(parity)
            if not part.is_zero() and ech.insert(part.flatten()):
                frontier.append(part)
                mats.append(part)
    basis = algebra.basis()
    while frontier:
        nxt = []
        for f in frontier:
            for b in basis:
                br = superbracket(b, f)
                for parity in (0, 1):
                    part = br.homogeneous_part(parity)
                    if not part.is_zero() and ech.insert(part.flatten()):
                        nxt.append(part)
                        mats.append(part)
        frontier = nxt
    return SubSuperalgebra.from_matrices(algebra.dim, mats, algebra.field)


def pi_adjoint_representation(algebra: SubSuperalgebra):
    """Adjoint action on the parity-reversed algebra as explicit matrices.

    Returns (V dim, representation subalgebra, images of the input basis in
    basis order, reorder map from input basis index to V basis index).
    """
    basis, table = structure_constants(algebra)
    n = len(basis)
    # V basis: parity of Pi(G_j) is |G_j| + 1; even-first ordering
    order = [j for j in range(n) if basis[j].parity == 1] + [
        j for j in range(n) if basis[j].parity == 0
    ]
    pos = {j: k for k, j in enumerate(order)}
    p_v = sum(1 for j in range(n) if basis[j].parity == 1)
    vdim = SuperDim(p_v, n - p_v)
    field = algebra.field
    rep = []
    for i in range(n):
        m = SuperMatrix.zeros(vdim, field)
        for j in range(n):
            for k, v in table[(i, j)].items():
                m.entries[pos[k]][pos[j]] = to_field(v, field)
        m.declared_parity = m._detect_parity()
        rep.append(m)
    rep_alg = SubSuperalgebra.from_matrices(vdim, rep, field, closed=True)
    return vdim, rep_alg, rep, pos


def pi_adjoint_test(algebra: SubSuperalgebra):
    """Prolongation profile of a simple algebra on its parity reversal."""
    simple, why = is_simple(algebra)
    if not simple:
        raise ValueError("input algebra is not simple: %s" % why)
    basis = algebra.basis()
    vdim, rep_alg, rep, pos = pi_adjoint_representation(algebra)
    if rep_alg.total_dim != algebra.total_dim:
        raise AssertionError("adjoint representation is not faithful")
    tower = cartan_prolongation(vdim, rep_alg, 2)
    g1, g2 = tower.levels[0], tower.levels[1]
    # expected generator x -> (-1)^{|x|} Pi(x)
    expected = {}
    for j, g in enumerate(basis):
        sign = (-1) ** (g.parity + 1)
        m = rep[j]
        t = vdim.total
        for a in range(t):
            for b in range(t):
                v = m.entries[a][b]
                if v:
                    expected[(pos[j], a, b)] = sign * v
    generator_matches = False
    if g1.total_dim == 1:
        elem = g1.elements[0]
        generator_matches = _proportional(elem, expected)
    bc = berger_check(rep_alg)
    return {
        "g1_dim": g1.graded_dim,
        "g2_dim": g2.graded_dim,
        "generator_matches": generator_matches,
        "is_berger": bc["is_berger"],
        "simplicity_note": why,
    }


def _proportional(flat_a: dict, flat_b: dict) -> bool:
    if not flat_a or not flat_b:
        return not flat_a and not flat_b
    if set(flat_a) != set(flat_b):
        return False
    key = next(iter(flat_a))
    ratio = flat_a[key] / flat_b[key]
    return all(flat_a[k] == ratio * flat_b[k] for k in flat_b)
