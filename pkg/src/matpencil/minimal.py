"""Minimal bases of polynomial nullspaces and the recovery maps.

A minimal basis of the right (left) rational nullspace of a matrix
polynomial is a polynomial basis of least possible degree sum; the sorted
degrees are the minimal indices. The construction here walks the
nullspaces of the convolution matrices degree by degree and keeps every
candidate whose leading coefficient extends a row-reduced leading matrix,
which certifies minimality as it goes.

The other half of the module moves bases between a polynomial and the
pencils built from it: embedding into the Kronecker tower, projecting an
ansatz member's left nullvectors down, lifting a left nullvector into a
member with full lower-block rank, and the combined recovery driver.
"""

import warnings
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from . import exactla as xla
from .errors import (PreconditionError, SchemaError, StructureError,
                     VerificationError)
from .matpoly import (FIELD_FLOAT, FIELD_RATIONAL, MatPoly, Pencil,
                      eye_matrix, float_rank_tol, lambda_vec, mat_kron,
                      mat_mm, mat_rank, scalar_from_json, scalar_to_json,
                      shear_s, zeros_matrix, _require_keys)
from .reduction import TrimResult, trim
from .spaces import SIDE_L1, SIDE_L2, AnsatzPencil

SIDE_RIGHT = "right"
SIDE_LEFT = "left"

MODE_GLIN_L1 = "glin_L1"
MODE_GLIN_L2 = "glin_L2"
MODE_TRIMMED_L1 = "trimmed_L1"
MODE_TRIMMED_L2 = "trimmed_L2"
RECOVERY_MODES = (MODE_GLIN_L1, MODE_GLIN_L2, MODE_TRIMMED_L1,
                  MODE_TRIMMED_L2)

RESIDUAL_REL_TOL = 1e-9
SPAN_REL_TOL = 1e-8


def _negligible_matrix(a, field, scale, tol):
    if field == FIELD_RATIONAL:
        return xla.is_zero(a)
    if a.size == 0:
        return True
    return float(np.max(np.abs(a))) <= tol * scale


def _negligible_poly(mp: MatPoly, scale, tol) -> bool:
    if mp.field == FIELD_RATIONAL:
        return mp.is_zero()
    big = max((float(np.max(np.abs(c))) for c in mp.coeffs if c.size),
              default=0.0)
    return big <= tol * scale


def _trim_tail(v: MatPoly) -> MatPoly:
    """Drop explicit zero coefficients above the degree."""
    d = max(v.degree, 0)
    return MatPoly([v.coeff(i) for i in range(d + 1)], v.field)


def _clean_float(v: MatPoly, rel=1e-12) -> MatPoly:
    """Zero out float entries that are noise next to the largest one;
    degree tests on the float path are exact-zero tests."""
    if v.field != FIELD_FLOAT:
        return v
    big = max((float(np.max(np.abs(c))) for c in v.coeffs if c.size),
              default=0.0)
    if big == 0.0:
        return v
    thr = rel * big
    return MatPoly([np.where(np.abs(c) <= thr, 0.0, c) for c in v.coeffs],
                   FIELD_FLOAT)


def _stack_columns(vecs, rows, field) -> MatPoly:
    g = max((v.grade for v in vecs), default=0)
    out = []
    for i in range(g + 1):
        c = zeros_matrix(rows, len(vecs), field)
        for j, v in enumerate(vecs):
            c[:, j:j + 1] = v.coeff(i)
        out.append(c)
    return MatPoly(out, field)


class _RowSpan:
    """Incremental independence test for a growing set of vectors."""

    def __init__(self, field: str, tol):
        self.field = field
        self.tol = tol
        self.rows = []

    def add(self, vec) -> bool:
        if self.field == FIELD_RATIONAL:
            w = np.array([Fraction(x) for x in vec], dtype=object)
            for pivot, row in self.rows:
                if w[pivot] != 0:
                    w = w - w[pivot] * row
            for j in range(w.shape[0]):
                if w[j] != 0:
                    self.rows.append((j, w / w[j]))
                    return True
            return False
        w = np.asarray(vec, dtype=float).copy()
        base = float(np.linalg.norm(w))
        if base == 0.0:
            return False
        for _ in range(2):
            for _, row in self.rows:
                w = w - float(row @ w) * row
        nrm = float(np.linalg.norm(w))
        if nrm > self.tol * base:
            self.rows.append((0, w / nrm))
            return True
        return False


@dataclass(frozen=True, eq=False)
class MinimalBasis:
    """Vectors of a minimal nullspace basis with their degrees.

    Vectors are stored as single-column matrix polynomials in ascending
    degree order; indices holds the matching degrees.
    """
    side: str
    vectors: tuple
    indices: tuple
    field: str

    def __post_init__(self):
        if self.side not in (SIDE_LEFT, SIDE_RIGHT):
            raise SchemaError(f"unknown side {self.side!r}")
        vecs = tuple(self.vectors)
        idx = tuple(int(i) for i in self.indices)
        object.__setattr__(self, "vectors", vecs)
        object.__setattr__(self, "indices", idx)
        if len(vecs) != len(idx):
            raise SchemaError("vector and index counts differ")
        for v, e in zip(vecs, idx):
            if not isinstance(v, MatPoly) or v.n != 1:
                raise SchemaError("basis entries must be column vector polynomials")
            if v.field != self.field:
                raise SchemaError("scalar fields differ")
            if e < 0 or v.degree != e:
                raise SchemaError("index does not match the vector degree")
        if vecs and any(a.m != vecs[0].m for a in vecs):
            raise SchemaError("basis vectors differ in length")
        if any(idx[i] > idx[i + 1] for i in range(len(idx) - 1)):
            raise SchemaError("indices must be ascending")

    @property
    def count(self) -> int:
        return len(self.vectors)

    def degree_sum(self) -> int:
        return sum(self.indices)

    def leading_matrix(self):
        """Columns are the coefficient of each vector at its own degree."""
        rows = self.vectors[0].m if self.vectors else 0
        out = zeros_matrix(rows, self.count, self.field)
        for j, (v, e) in enumerate(zip(self.vectors, self.indices)):
            out[:, j:j + 1] = v.coeff(e)
        return out

    def to_json_dict(self) -> dict:
        vecs = []
        for v in self.vectors:
            vecs.append([[scalar_to_json(c[i, 0], self.field)
                          for i in range(v.m)]
                         for c in v.coeffs])
        return {
            "kind": "minimal_basis",
            "side": self.side,
            "field": self.field,
            "entries": self.vectors[0].m if self.vectors else 0,
            "indices": list(self.indices),
            "vectors": vecs,
        }

    @classmethod
    def from_json_dict(cls, d: dict) -> "MinimalBasis":
        _require_keys(d, ("kind", "side", "field", "indices", "vectors"),
                      "minimal basis")
        if d["kind"] != "minimal_basis":
            raise SchemaError("not a minimal basis document")
        field = d["field"]
        if field not in (FIELD_RATIONAL, FIELD_FLOAT):
            raise SchemaError(f"unknown field {field!r}")
        vecs = []
        for coeff_lists in d["vectors"]:
            if not coeff_lists:
                raise SchemaError("a vector needs at least one coefficient")
            rows = len(coeff_lists[0])
            coeffs = []
            for cl in coeff_lists:
                if len(cl) != rows:
                    raise SchemaError("coefficient lengths differ")
                c = zeros_matrix(rows, 1, field)
                for i, s in enumerate(cl):
                    c[i, 0] = scalar_from_json(s, field)
                coeffs.append(c)
            vecs.append(MatPoly(coeffs, field))
        return cls(d["side"], tuple(vecs), tuple(d["indices"]), field)


def _nullspace(a, field, safety):
    if field == FIELD_RATIONAL:
        return xla.nullspace(a)
    u, s, vh = np.linalg.svd(a)
    tol = float_rank_tol(a, safety)
    rank = int(np.sum(s > tol))
    if tol > 0 and np.any((s >= tol / 100.0) & (s <= tol * 100.0)):
        warnings.warn("nullspace rank decision is near the tolerance",
                      RuntimeWarning)
    return np.ascontiguousarray(vh[rank:, :].T)


def minimal_basis(p, side: str, safety=None, tol=SPAN_REL_TOL) -> MinimalBasis:
    """Minimal basis of the chosen rational nullspace of p.

    Walks degrees d = 0, 1, ...; nullvectors of the convolution matrix
    with d+1 block columns are exactly the degree <= d vector polynomials
    killed by p (coefficients stacked highest first). A candidate is kept
    when its degree-d coefficient extends the row-reduced leading matrix
    of the vectors already kept, and the running count is checked against
    the nullity growth at every degree.

    Exact arithmetic is the intended path; the float path applies the
    shared rank tolerance and warns near the cut.
    """
    if isinstance(p, Pencil):
        p = p.to_matpoly()
    if not isinstance(p, MatPoly):
        raise SchemaError("expected a matrix polynomial")
    if side == SIDE_LEFT:
        dual = minimal_basis(p.transpose(), SIDE_RIGHT, safety, tol)
        return MinimalBasis(SIDE_LEFT, dual.vectors, dual.indices, dual.field)
    if side != SIDE_RIGHT:
        raise SchemaError(f"unknown side {side!r}")
    field = p.field
    n = p.n
    want = n - p.normal_rank(safety)
    if want == 0:
        return MinimalBasis(SIDE_RIGHT, (), (), field)
    bound = p.grade * min(p.m, p.n)
    leads = _RowSpan(field, tol)
    chosen = []
    indices = []
    prev_nullity = 0
    d = 0
    while len(chosen) < want:
        if d > bound:
            raise VerificationError(
                "minimal index search passed the degree bound")
        ns = _nullspace(p.conv_matrix(d), field, safety)
        nullity = ns.shape[1]
        for j in range(nullity):
            col = ns[:, j]
            if not leads.add(col[:n]):
                continue
            coeffs = [col[(d - i) * n:(d - i + 1) * n].reshape(n, 1).copy()
                      for i in range(d + 1)]
            chosen.append(MatPoly(coeffs, field))
            indices.append(d)
        if len(chosen) != nullity - prev_nullity:
            raise VerificationError(
                "nullspace growth does not match the selected index profile")
        prev_nullity = nullity
        d += 1
    basis = MinimalBasis(SIDE_RIGHT, tuple(chosen), tuple(indices), field)
    _certify(basis, p, safety, tol)
    return basis


def _certify(basis: MinimalBasis, p: MatPoly, safety, tol):
    """Residuals, independence over the function field, and a row-reduced
    leading matrix; raises on any failure."""
    scale = max(1.0, p.frob_norm()) if p.field == FIELD_FLOAT else None
    for v in basis.vectors:
        res = (p.matmul(v) if basis.side == SIDE_RIGHT
               else v.transpose().matmul(p))
        vs = scale * max(1.0, v.frob_norm()) if scale is not None else None
        if not _negligible_poly(res, vs, RESIDUAL_REL_TOL):
            raise VerificationError("basis vector fails the residual check")
    if basis.count == 0:
        return
    if mat_rank(basis.leading_matrix(), basis.field, safety) != basis.count:
        raise VerificationError("leading coefficient matrix is rank deficient")
    stacked = _stack_columns(basis.vectors, basis.vectors[0].m, basis.field)
    if stacked.normal_rank(safety) != basis.count:
        raise VerificationError("basis is dependent over the function field")


def embed_right(x: MatPoly, k: int) -> MatPoly:
    """Kronecker tower of a right nullvector; degree grows by k-1."""
    if not isinstance(x, MatPoly) or x.n != 1:
        raise SchemaError("expected a column vector polynomial")
    if k < 1:
        raise SchemaError("grade must be positive")
    return lambda_vec(k, 1, x.field).kron(x)


def project_ansatz(v, y: MatPoly, m: int) -> MatPoly:
    """Contract the k blocks of y with the ansatz vector."""
    if not isinstance(y, MatPoly) or y.n != 1:
        raise SchemaError("expected a column vector polynomial")
    field = y.field
    if field == FIELD_RATIONAL:
        vv = v if isinstance(v, np.ndarray) and v.dtype == object \
            else xla.fvec(list(v))
    else:
        vv = np.asarray(v, dtype=float)
    k = vv.shape[0]
    if y.m != k * m:
        raise PreconditionError(
            f"length mismatch: {y.m} entries vs {k} blocks of {m}")
    row = mat_kron(vv.reshape(1, k), eye_matrix(m, field), field)
    return MatPoly([mat_mm(row, c) for c in y.coeffs], field)


def _pinv_full_col(z, field):
    # full column rank assumed; (z^T z)^{-1} z^T
    if field == FIELD_RATIONAL:
        return xla.mm(xla.inv(xla.mm(z.T, z)), z.T)
    return np.linalg.pinv(z)


def _member_pencil(tr: TrimResult) -> Pencil:
    """The row-transformed member (M kron I)L rebuilt from the stored
    blocks, in right-space orientation."""
    k, m, n, field = tr.k, tr.m, tr.n, tr.field
    a = tr.a_block()
    x = zeros_matrix(k * m, k * n, field)
    y = zeros_matrix(k * m, k * n, field)
    x[:m, :] = a.X
    x[m:, n:] = -tr.Z
    y[:m, :] = a.Y
    y[m:, :(k - 1) * n] = tr.Z
    return Pencil(x, y, field)


def _check_trim_matches(tr: TrimResult, p: MatPoly, tol=RESIDUAL_REL_TOL):
    """The stored top strip must reproduce alpha * p when contracted with
    the monomial tower."""
    field = tr.field
    if field != p.field or (tr.m, tr.n, tr.k) != (p.m, p.n, p.grade):
        raise SchemaError("trimming record does not fit this polynomial")
    a = tr.a_block().to_matpoly()
    if tr.side == SIDE_L1:
        got = a.matmul(lambda_vec(tr.k, tr.n, field))
    else:
        got = lambda_vec(tr.k, tr.m, field).transpose().matmul(a)
    diff = got - p.scale(tr.alpha)
    scale = max(1.0, abs(tr.alpha) * p.frob_norm()) \
        if field == FIELD_FLOAT else None
    if not _negligible_poly(diff, scale, tol):
        raise SchemaError("trimming record was built from a different polynomial")


def lift_left(q: MatPoly, tr: TrimResult, p: MatPoly,
              tol=RESIDUAL_REL_TOL) -> MatPoly:
    """Lift a left nullvector of p into the member recorded by tr.

    With the member row-transformed so the lower block pair (-Z, Z) is
    exposed, the complementary component is forced: contracting the top
    strip with the upper-shear tower and the pseudoinverse of Z gives the
    unique tail whose stacked vector annihilates the member. Coefficients
    above deg q are then removed after checking they hit Z trivially, so
    the lifted vector keeps the degree of q.
    """
    if not isinstance(tr, TrimResult):
        raise SchemaError("expected a trimming record")
    if tr.side != SIDE_L1:
        raise PreconditionError("lifting runs on right-space records; "
                                "transpose the problem first")
    if not isinstance(q, MatPoly) or q.n != 1:
        raise SchemaError("expected a column vector polynomial")
    if q.field != p.field:
        raise SchemaError("scalar fields differ")
    if q.m != p.m:
        raise SchemaError("vector length does not match the row count")
    _check_trim_matches(tr, p, tol)
    k, m, n, field = tr.k, tr.m, tr.n, tr.field
    fscale = max(1.0, q.frob_norm() * max(1.0, p.frob_norm())) \
        if field == FIELD_FLOAT else None
    if not _negligible_poly(q.transpose().matmul(p), fscale, tol):
        raise PreconditionError("vector is not in the left nullspace")
    if q.is_zero():
        return MatPoly.zero(k * m, 1, 0, field)

    zdag = _pinv_full_col(tr.Z, field)
    head = q.transpose().matmul(tr.a_block().to_matpoly())
    tail_row = head.matmul(shear_s(k, n, field)) \
                   .matmul(MatPoly([zdag], field)).scale(-1)
    qtil = tail_row.transpose()

    g = max(q.degree, qtil.degree, 0)
    stacked = MatPoly([np.vstack([q.coeff(i), qtil.coeff(i)])
                       for i in range(g + 1)], field)
    delta = q.degree
    zscale = max(1.0, float(np.max(np.abs(tr.Z)))) \
        if field == FIELD_FLOAT else None
    for i in range(stacked.grade, delta, -1):
        t = stacked.coeff(i)[m:, :]
        ts = zscale * max(1.0, float(np.max(np.abs(t)))) \
            if zscale is not None else None
        if not _negligible_matrix(mat_mm(t.T, tr.Z), field, ts, tol):
            raise VerificationError(
                "degree reduction failed; the lift keeps a higher-degree tail")
    stacked = MatPoly([stacked.coeff(i) for i in range(delta + 1)], field)

    res = stacked.transpose().matmul(_member_pencil(tr).to_matpoly())
    mscale = fscale * max(1.0, tr.Lt.frob_norm()) if fscale is not None else None
    if not _negligible_poly(res, mscale, tol):
        raise VerificationError("lifted vector fails the pencil residual")

    mkt = mat_kron(tr.M.T, eye_matrix(m, field), field)
    inv_alpha = (Fraction(1) / tr.alpha if field == FIELD_RATIONAL
                 else 1.0 / tr.alpha)
    y = MatPoly([mat_mm(mkt, c) for c in stacked.coeffs],
                field).scale(inv_alpha)
    if y.degree != delta:
        raise VerificationError("lift changed the degree")
    return y


def special_left_basis(l: AnsatzPencil, tr: TrimResult, safety=None,
                       tol=SPAN_REL_TOL) -> MinimalBasis:
    """Left minimal basis of the member whose constant head spans the
    kernel of the ansatz projection.

    The first removed-row-count vectors are constants built from the
    left-nullspace factor of Z; the rest of a freshly computed minimal
    basis is kept, with its constant vectors greedily swapped in until
    the constant count matches. Minimality of the result is re-verified,
    not assumed.
    """
    if not isinstance(l, AnsatzPencil) or l.side != SIDE_L1:
        raise PreconditionError("needs a right-space member; transpose first")
    if not isinstance(tr, TrimResult) or tr.side != SIDE_L1:
        raise SchemaError("expected a right-space trimming record")
    field = l.field
    k, m = l.k, l.poly.m
    mk = mat_kron(tr.M, eye_matrix(m, field), field)
    member = _member_pencil(tr)
    dx = mat_mm(mk, l.pencil.X) - member.X
    dy = mat_mm(mk, l.pencil.Y) - member.Y
    mscale = max(1.0, l.pencil.frob_norm()) if field == FIELD_FLOAT else None
    if not (_negligible_matrix(dx, field, mscale, RESIDUAL_REL_TOL)
            and _negligible_matrix(dy, field, mscale, RESIDUAL_REL_TOL)):
        raise SchemaError("trimming record does not belong to this member")

    base = minimal_basis(l.pencil.to_matpoly(), SIDE_LEFT, safety, tol)
    c = tr.removed_row_count()
    if c == 0:
        return base

    mkt = mat_kron(tr.M.T, eye_matrix(m, field), field)
    lpoly = l.pencil.to_matpoly()
    kernel = []
    for j in range(tr.Q2.shape[1]):
        col = zeros_matrix(k * m, 1, field)
        col[m:, 0] = tr.Q2[:, j]
        u = MatPoly([mat_mm(mkt, col)], field)
        us = mscale * max(1.0, u.frob_norm()) if mscale is not None else None
        if not _negligible_poly(u.transpose().matmul(lpoly), us,
                                RESIDUAL_REL_TOL):
            raise VerificationError("kernel vector fails the pencil residual")
        kernel.append(u)

    constants = [v for v, e in zip(base.vectors, base.indices) if e == 0]
    higher = [(v, e) for v, e in zip(base.vectors, base.indices) if e > 0]
    span = _RowSpan(field, tol)
    for u in kernel:
        if not span.add(u.coeff(0)[:, 0]):
            raise VerificationError("kernel vectors are dependent")
    picked = []
    for v in constants:
        if len(kernel) + len(picked) == len(constants):
            break
        if span.add(v.coeff(0)[:, 0]):
            picked.append(v)
    if len(kernel) + len(picked) != len(constants):
        raise VerificationError(
            "constant completion failed; no special basis found")

    vectors = tuple(kernel + picked + [v for v, _ in higher])
    indices = tuple([0] * len(constants) + [e for _, e in higher])
    result = MinimalBasis(SIDE_LEFT, vectors, indices, field)
    if mat_rank(result.leading_matrix(), field, safety) != result.count:
        raise VerificationError("special basis is not row reduced")
    stacked = _stack_columns(result.vectors, k * m, field)
    if stacked.normal_rank(safety) != result.count:
        raise VerificationError("special basis is dependent")
    return result


def _flip(side: str) -> str:
    return SIDE_LEFT if side == SIDE_RIGHT else SIDE_RIGHT


def _strip_tower(base: MinimalBasis, p: MatPoly, k: int, safety, tol):
    """Peel Lambda_k kron x off every vector of a right pencil basis."""
    n = p.n
    field = base.field
    xs = []
    for y in base.vectors:
        bottom = _trim_tail(_clean_float(
            MatPoly([cc[(k - 1) * n:, :] for cc in y.coeffs], field)))
        emb = embed_right(bottom, k)
        scale = max(1.0, y.frob_norm()) if field == FIELD_FLOAT else None
        if not _negligible_poly(emb - y, scale, RESIDUAL_REL_TOL):
            raise StructureError("right nullvector lacks the tower form")
        xs.append(bottom)
    return _pack_checked(xs, p, SIDE_RIGHT, safety, tol)


def _pack_checked(vecs, p: MatPoly, side: str, safety, tol) -> MinimalBasis:
    field = p.field
    r = p.normal_rank(safety)
    expected = (p.n if side == SIDE_RIGHT else p.m) - r
    if len(vecs) != expected:
        raise VerificationError(
            f"index count mismatch: got {len(vecs)}, expected {expected}")
    vecs = [_clean_float(v) for v in vecs]
    pairs = sorted(((v.degree, v) for v in vecs), key=lambda t: t[0])
    if pairs and pairs[0][0] < 0:
        raise VerificationError("recovered a zero vector")
    vectors = tuple(_trim_tail(v) for _, v in pairs)
    indices = tuple(d for d, _ in pairs)
    basis = MinimalBasis(side, vectors, indices, field)
    _certify(basis, p, safety, tol)
    return basis


def recover_minimal(source, p, side: str, mode: str, safety=None,
                    tol=SPAN_REL_TOL) -> MinimalBasis:
    """Minimal basis of p read off from a pencil built from it.

    Right bases of right-space members and their trims are Kronecker
    towers and are peeled; left bases go through the special basis and
    the ansatz projection, with the trimming selector transposed in when
    the source is a trimmed pencil. Left-space sources run the same rules
    on the transposed problem.
    """
    if side not in (SIDE_LEFT, SIDE_RIGHT):
        raise SchemaError(f"unknown side {side!r}")
    if mode not in RECOVERY_MODES:
        raise SchemaError(f"unknown recovery mode {mode!r}")
    if isinstance(p, Pencil):
        p = p.to_matpoly()
    if not isinstance(p, MatPoly):
        raise SchemaError("expected a matrix polynomial")

    if mode in (MODE_GLIN_L2, MODE_TRIMMED_L2):
        if not isinstance(source, (AnsatzPencil, TrimResult)):
            raise SchemaError("unsupported source object")
        if source.side != SIDE_L2:
            raise SchemaError("mode expects a left-space source")
        dual_mode = MODE_GLIN_L1 if mode == MODE_GLIN_L2 else MODE_TRIMMED_L1
        dual = recover_minimal(source.transpose(), p.transpose(),
                               _flip(side), dual_mode, safety, tol)
        return MinimalBasis(side, dual.vectors, dual.indices, dual.field)

    if mode == MODE_GLIN_L1:
        if not isinstance(source, AnsatzPencil) or source.side != SIDE_L1:
            raise SchemaError("mode expects a right-space member")
        if not source.poly.equal(p):
            raise SchemaError("member was built from a different polynomial")
        if side == SIDE_RIGHT:
            base = minimal_basis(source.pencil.to_matpoly(), SIDE_RIGHT,
                                 safety, tol)
            return _strip_tower(base, p, source.k, safety, tol)
        tr = trim(source)
        sb = special_left_basis(source, tr, safety, tol)
        kept = sb.vectors[tr.removed_row_count():]
        qs = [project_ansatz(source.ansatz, y, p.m) for y in kept]
        return _pack_checked(qs, p, SIDE_LEFT, safety, tol)

    if not isinstance(source, TrimResult) or source.side != SIDE_L1:
        raise SchemaError("mode expects a right-space trimming record")
    _check_trim_matches(source, p)
    if side == SIDE_RIGHT:
        base = minimal_basis(source.Lt.to_matpoly(), SIDE_RIGHT, safety, tol)
        return _strip_tower(base, p, source.k, safety, tol)
    base = minimal_basis(source.Lt.to_matpoly(), SIDE_LEFT, safety, tol)
    v = source.ansatz()
    dt = source.D.T
    qs = []
    for y in base.vectors:
        lifted = MatPoly([mat_mm(dt, cc) for cc in y.coeffs], p.field)
        qs.append(project_ansatz(v, lifted, p.m))
    return _pack_checked(qs, p, SIDE_LEFT, safety, tol)
