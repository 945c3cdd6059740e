"""Ansatz spaces of km x kn pencils attached to an m x n matrix polynomial.

The right space collects pencils L with L(lambda) * (Lambda_k ⊗ I_n) =
v ⊗ P(lambda); the left space is the transpose dual. Members are fully
parameterized by the ansatz vector plus one free block matrix, which is what
the builders take.
"""

from dataclasses import dataclass
from typing import Optional

import numpy as np

from . import exactla as xla
from .errors import PreconditionError, SchemaError
from .matpoly import (FIELD_FLOAT, FIELD_RATIONAL, MatPoly, Pencil,
                      lambda_vec, matrix_from_json, matrix_to_json,
                      rect_identity, zeros_matrix)

SIDE_L1 = "l1"
SIDE_L2 = "l2"

MEMBERSHIP_REL_TOL = 1e-10


@dataclass(frozen=True, eq=False)
class AnsatzPencil:
    """A pencil together with its space side, ansatz vector, and source
    polynomial."""
    pencil: Pencil
    side: str
    ansatz: np.ndarray
    poly: MatPoly

    @property
    def k(self) -> int:
        return self.poly.grade

    @property
    def field(self) -> str:
        return self.pencil.field

    def transpose(self) -> "AnsatzPencil":
        """The transposed pencil lives in the opposite space of the
        transposed polynomial."""
        other = SIDE_L2 if self.side == SIDE_L1 else SIDE_L1
        return AnsatzPencil(self.pencil.transpose(), other, self.ansatz,
                            self.poly.transpose())

    def reversal_member(self) -> "AnsatzPencil":
        """Reversed pencil times a block flip is a member for the reversed
        polynomial with the same ansatz vector."""
        from .matpoly import flip_r
        rev = self.pencil.reversal()
        if self.side == SIDE_L1:
            flip = flip_r(self.k, self.poly.n, self.field)
            pen = Pencil(xla_mm(rev.X, flip), xla_mm(rev.Y, flip), self.field)
        else:
            flip = flip_r(self.k, self.poly.m, self.field)
            pen = Pencil(xla_mm(flip, rev.X), xla_mm(flip, rev.Y), self.field)
        return AnsatzPencil(pen, self.side, self.ansatz, self.poly.reversal())

    def to_json_dict(self) -> dict:
        return {
            "kind": "ansatz_pencil",
            "side": self.side,
            "field": self.field,
            "ansatz": [matrix_to_json([[x]], self.field)[0][0] for x in self.ansatz],
            "pencil": self.pencil.to_json_dict(),
            "poly": self.poly.to_json_dict(),
        }

    @classmethod
    def from_json_dict(cls, d: dict) -> "AnsatzPencil":
        for key in ("kind", "side", "field", "ansatz", "pencil", "poly"):
            if key not in d:
                raise SchemaError(f"ansatz pencil: missing key {key!r}")
        if d["kind"] != "ansatz_pencil":
            raise SchemaError("not an ansatz pencil payload")
        if d["side"] not in (SIDE_L1, SIDE_L2):
            raise SchemaError(f"unknown side {d['side']!r}")
        poly = MatPoly.from_json_dict(d["poly"])
        pen = Pencil.from_json_dict(d["pencil"], d["field"])
        row = matrix_from_json([d["ansatz"]], d["field"])
        ansatz = row[0, :] if d["field"] == FIELD_RATIONAL else row[0]
        member = cls(pen, d["side"], ansatz, poly)
        residual = ansatz_residual(member)
        if not residual_ok(residual, pen):
            raise SchemaError("payload does not satisfy its ansatz identity")
        return member


def xla_mm(a, b):
    return a.dot(b)


def _as_vector(v, field, k):
    if field == FIELD_RATIONAL:
        vec = v if isinstance(v, np.ndarray) and v.dtype == object else xla.fvec(list(v))
    else:
        vec = np.asarray(v, dtype=float)
    if vec.shape != (k,):
        raise SchemaError(f"ansatz vector must have length {k}")
    return vec


def _kron_vec_mat(v, a, field):
    """v ⊗ A for a plain vector v."""
    m, n = a.shape
    out = zeros_matrix(len(v) * m, n, field)
    for i, vi in enumerate(v):
        out[i * m:(i + 1) * m, :] = a * vi
    return out


def build_l1(p: MatPoly, v, w) -> AnsatzPencil:
    """Member of the right ansatz space from its free parameters.

    X = [v ⊗ A_k | -W], Y = [W + v ⊗ [A_{k-1} ... A_1] | v ⊗ A_0].
    """
    k, m, n = p.grade, p.m, p.n
    if k < 2:
        raise PreconditionError("ansatz spaces need grade >= 2")
    field = p.field
    v = _as_vector(v, field, k)
    if field == FIELD_RATIONAL and not (isinstance(w, np.ndarray) and w.dtype == object):
        w = xla.fmat(w)
    elif field == FIELD_FLOAT:
        w = np.asarray(w, dtype=float)
    if w.shape != (k * m, (k - 1) * n):
        raise SchemaError(f"free block must be {k * m}x{(k - 1) * n}")

    x = zeros_matrix(k * m, k * n, field)
    y = zeros_matrix(k * m, k * n, field)
    x[:, :n] = _kron_vec_mat(v, p.coeffs[k], field)
    x[:, n:] = -w
    mid = zeros_matrix(k * m, (k - 1) * n, field)
    for j in range(k - 1):
        mid[:, j * n:(j + 1) * n] = _kron_vec_mat(v, p.coeffs[k - 1 - j], field)
    y[:, :(k - 1) * n] = w + mid
    y[:, (k - 1) * n:] = _kron_vec_mat(v, p.coeffs[0], field)

    member = AnsatzPencil(Pencil(x, y, field), SIDE_L1, v, p)
    residual = ansatz_residual(member)
    if not residual_ok(residual, member.pencil):
        raise AssertionError("construction violated the ansatz identity")
    return member


def build_l2(p: MatPoly, w, what) -> AnsatzPencil:
    """Member of the left ansatz space, built through the transpose dual."""
    k, m = p.grade, p.m
    if k < 2:
        raise PreconditionError("ansatz spaces need grade >= 2")
    field = p.field
    w = _as_vector(w, field, k)
    if field == FIELD_RATIONAL and not (isinstance(what, np.ndarray) and what.dtype == object):
        what = xla.fmat(what)
    elif field == FIELD_FLOAT:
        what = np.asarray(what, dtype=float)
    if what.shape != ((k - 1) * m, k * p.n):
        raise SchemaError(f"free block must be {(k - 1) * m}x{k * p.n}")
    dual = build_l1(p.transpose(), w, what.T.copy())
    return AnsatzPencil(dual.pencil.transpose(), SIDE_L2, w, p)


def companion_g1(p: MatPoly) -> AnsatzPencil:
    """First companion-style member: ansatz e_1 and the block pattern that
    puts rectangular identities on the lambda diagonal."""
    k, m, n = p.grade, p.m, p.n
    field = p.field
    w = zeros_matrix(k * m, (k - 1) * n, field)
    imn = rect_identity(m, n, field)
    for j in range(k - 1):
        w[(j + 1) * m:(j + 2) * m, j * n:(j + 1) * n] = -imn
    e1 = zeros_matrix(k, 1, field)[:, 0]
    e1[0] = xla.ONE if field == FIELD_RATIONAL else 1.0
    return build_l1(p, e1, w)


def companion_g2(p: MatPoly) -> AnsatzPencil:
    """Second companion-style member (left space)."""
    k, m, n = p.grade, p.m, p.n
    field = p.field
    what = zeros_matrix((k - 1) * m, k * n, field)
    imn = rect_identity(m, n, field)
    for j in range(k - 1):
        what[j * m:(j + 1) * m, (j + 1) * n:(j + 2) * n] = -imn
    e1 = zeros_matrix(k, 1, field)[:, 0]
    e1[0] = xla.ONE if field == FIELD_RATIONAL else 1.0
    return build_l2(p, e1, what)


def shifted_sum(x, y, side: str, block_dims) -> np.ndarray:
    """Column variant: [X | 0] + [0 | Y] on m x n blocks; row variant is the
    vertical analogue."""
    m, n = block_dims
    if x.shape != y.shape:
        raise SchemaError("summands differ in shape")
    rows, cols = x.shape
    if rows % m or cols % n:
        raise SchemaError("shape is not a whole number of blocks")
    field = FIELD_RATIONAL if x.dtype == object else FIELD_FLOAT
    if side == "col":
        out = zeros_matrix(rows, cols + n, field)
        out[:, :cols] = out[:, :cols] + x
        out[:, n:] = out[:, n:] + y
        return out
    if side == "row":
        out = zeros_matrix(rows + m, cols, field)
        out[:rows, :] = out[:rows, :] + x
        out[m:, :] = out[m:, :] + y
        return out
    raise SchemaError(f"unknown shifted-sum side {side!r}")


def ansatz_target(p: MatPoly, v) -> np.ndarray:
    """v ⊗ [A_k A_{k-1} ... A_0], the shifted-sum form of the identity."""
    k, m, n = p.grade, p.m, p.n
    field = p.field
    strip = zeros_matrix(m, (k + 1) * n, field)
    for j in range(k + 1):
        strip[:, j * n:(j + 1) * n] = p.coeffs[k - j]
    return _kron_vec_mat(v, strip, field)


def ansatz_residual(member: AnsatzPencil) -> MatPoly:
    """Symbolic residual of the defining identity; zero iff member is genuine."""
    p = member.poly
    if member.side == SIDE_L1:
        lam = lambda_vec(p.grade, p.n, p.field)
        lhs = member.pencil.to_matpoly().matmul(lam)
        rhs = MatPoly([_kron_vec_mat(member.ansatz, c, p.field) for c in p.coeffs],
                      p.field)
    else:
        lam = lambda_vec(p.grade, p.m, p.field)
        lhs = lam.transpose().matmul(member.pencil.to_matpoly())
        rhs = MatPoly([_kron_vec_mat(member.ansatz, c.T.copy(), p.field).T.copy()
                       for c in p.coeffs], p.field)
    return lhs - rhs


def residual_ok(residual: MatPoly, pencil: Pencil) -> bool:
    if residual.field == FIELD_RATIONAL:
        return residual.is_zero()
    scale = max(pencil.frob_norm(), 1.0)
    return residual.frob_norm() <= MEMBERSHIP_REL_TOL * scale


def ansatz_membership(l: Pencil, p: MatPoly, side: str) -> Optional[np.ndarray]:
    """Recover the unique ansatz vector of a space member, or None.

    Solves block row by block row with an exact least-squares ratio, then
    verifies the full identity. A zero polynomial makes the vector
    non-unique, so the result is None with no attempt to pick one.
    """
    k, m, n = p.grade, p.m, p.n
    if side == SIDE_L2:
        got = ansatz_membership(l.transpose(), p.transpose(), SIDE_L1)
        return got
    if (l.m, l.n) != (k * m, k * n):
        raise SchemaError(f"pencil must be {k * m}x{k * n} for this side")
    if p.is_zero():
        return None
    shifted = shifted_sum(l.X, l.Y, "col", (m, n))
    strip = ansatz_target(p, _unit_like(p, 0))  # e_1 strip, used per block row
    t = strip[:m, :]
    tt = sum(x * x for x in t.flat) if p.field == FIELD_RATIONAL else float(np.sum(t * t))
    entries = []
    for i in range(k):
        block = shifted[i * m:(i + 1) * m, :]
        dot = (sum(a * b for a, b in zip(block.flat, t.flat))
               if p.field == FIELD_RATIONAL else float(np.sum(block * t)))
        entries.append(dot / tt)
    v = (xla.fvec(entries) if p.field == FIELD_RATIONAL
         else np.array(entries, dtype=float))
    member = AnsatzPencil(l, side, v, p)
    if residual_ok(ansatz_residual(member), l):
        return v
    return None


def _unit_like(p: MatPoly, i: int):
    e = zeros_matrix(p.grade, 1, p.field)[:, 0]
    e[i] = xla.ONE if p.field == FIELD_RATIONAL else 1.0
    return e


def space_dimension(m: int, n: int, k: int) -> int:
    if m < 1 or n < 1 or k < 2:
        raise PreconditionError("needs positive sizes and grade >= 2")
    return k * (k - 1) * m * n + k


def generator_matrix(p: MatPoly, side: str) -> np.ndarray:
    """Stacked vectorizations [vec X | vec Y] of the spanning set given by
    unit ansatz vectors and unit free blocks; its rank is the space
    dimension whenever P is nonzero."""
    k, m, n = p.grade, p.m, p.n
    rows = []

    def vec_of(member):
        pen = member.pencil.to_float() if member.field == FIELD_RATIONAL else member.pencil
        return np.concatenate([pen.X.ravel(), pen.Y.ravel()])

    wshape = (k * m, (k - 1) * n) if side == SIDE_L1 else ((k - 1) * m, k * n)
    zero_w = zeros_matrix(*wshape, p.field)
    build = build_l1 if side == SIDE_L1 else build_l2
    for i in range(k):
        rows.append(vec_of(build(p, _unit_like(p, i), zero_w)))
    zero_v = zeros_matrix(k, 1, p.field)[:, 0]
    one = xla.ONE if p.field == FIELD_RATIONAL else 1.0
    for r in range(wshape[0]):
        for c in range(wshape[1]):
            w = zeros_matrix(*wshape, p.field)
            w[r, c] = one
            rows.append(vec_of(build(p, zero_v, w)))
    return np.vstack(rows)
