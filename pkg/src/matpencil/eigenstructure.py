"""Smith normal form over the rational polynomials and complete
eigenstructure reports.

The exact path reduces a matrix polynomial to Smith form with tracked
unimodular transformations, reads finite elementary divisors off the
invariant factors, takes infinite ones from the reversal at zero, and
attaches the minimal indices of both nullspaces.  Linearization claims are
settled by comparing Smith forms against a padded block diagonal target,
which decides the finite structure and the nullspace dimensions in one shot.

The float path only handles regular pencils through the generalized
eigensolver.  It cannot resolve Jordan structure, so every numeric
eigenvalue is reported as a simple divisor.
"""

from dataclasses import dataclass
from fractions import Fraction

import numpy as np
import sympy

from . import exactla as xla
from .errors import PreconditionError, SchemaError, VerificationError
from .matpoly import (
    FIELD_FLOAT,
    FIELD_RATIONAL,
    MatPoly,
    Pencil,
    _require_keys,
    rect_identity,
)
from .minimal import SIDE_LEFT, SIDE_RIGHT, minimal_basis
from .qpoly import QP, pm_det, pm_eye

__all__ = [
    "EigStructure",
    "Verdict",
    "check_g_linearization",
    "check_linearization",
    "complete_eigenstructure",
    "index_sum_check",
    "smith_form",
]


def _as_matpoly(p):
    if isinstance(p, Pencil):
        return p.to_matpoly()
    if isinstance(p, MatPoly):
        return p
    raise SchemaError("expected a matrix polynomial or a pencil")


# ---------------------------------------------------------------------------
# Smith form


def _scale_row(a, u, i, s):
    for c in range(a.shape[1]):
        a[i, c] = a[i, c] * s
    for c in range(u.shape[1]):
        u[i, c] = u[i, c] * s


def _row_op(a, u, r, t, q):
    # row r minus q times row t, mirrored in the transformation
    for c in range(a.shape[1]):
        a[r, c] = a[r, c] - q * a[t, c]
    for c in range(u.shape[1]):
        u[r, c] = u[r, c] - q * u[t, c]


def _col_op(a, v, c, t, q):
    for r in range(a.shape[0]):
        a[r, c] = a[r, c] - q * a[r, t]
    for r in range(v.shape[0]):
        v[r, c] = v[r, c] - q * v[r, t]


def _swap_rows(a, u, i, j):
    a[[i, j], :] = a[[j, i], :]
    u[[i, j], :] = u[[j, i], :]


def _swap_cols(a, v, i, j):
    a[:, [i, j]] = a[:, [j, i]]
    v[:, [i, j]] = v[:, [j, i]]


def _min_degree_entry(a, t):
    """Position of a lowest-degree nonzero entry in the trailing block,
    row-major on ties."""
    best = None
    best_deg = -1
    for i in range(t, a.shape[0]):
        for j in range(t, a.shape[1]):
            e = a[i, j]
            if e.is_zero():
                continue
            d = e.degree
            if best is None or d < best_deg:
                best = (i, j)
                best_deg = d
    return best


def smith_form(p):
    """Smith normal form with its unimodular transformations.

    Returns (U, S, V) with U p V = S, S diagonal with monic invariant
    factors in a divisibility chain.  Pivoting picks a minimal-degree
    entry and keeps pivots monic so coefficient content stays in the
    transformations instead of compounding in the working matrix.
    Rational field only.
    """
    p = _as_matpoly(p)
    if p.field != FIELD_RATIONAL:
        raise PreconditionError("Smith reduction needs the rational field")
    a = p.to_qp_matrix()
    m, n = a.shape
    u = pm_eye(m)
    v = pm_eye(n)
    for t in range(min(m, n)):
        pos = _min_degree_entry(a, t)
        if pos is None:
            break
        while True:
            i, j = pos
            if i != t:
                _swap_rows(a, u, t, i)
            if j != t:
                _swap_cols(a, v, t, j)
            if a[t, t].lc != 1:
                _scale_row(a, u, t, QP(Fraction(1) / a[t, t].lc))
            pos = None
            for r in range(t + 1, m):
                if a[r, t].is_zero():
                    continue
                _row_op(a, u, r, t, a[r, t] // a[t, t])
                if not a[r, t].is_zero():
                    # remainder has lower degree; it becomes the pivot
                    pos = (r, t)
                    break
            if pos is not None:
                continue
            for c in range(t + 1, n):
                if a[t, c].is_zero():
                    continue
                _col_op(a, v, c, t, a[t, c] // a[t, t])
                if not a[t, c].is_zero():
                    pos = (t, c)
                    break
            if pos is not None:
                continue
            pos = None
            for r in range(t + 1, m):
                for c in range(t + 1, n):
                    if not a[t, t].divides(a[r, c]):
                        pos = (r, c)
                        break
                if pos is not None:
                    break
            if pos is None:
                break
            # fold the offending row into the pivot row and go again; the
            # next column pass leaves a lower-degree remainder
            r, _ = pos
            for c in range(n):
                a[t, c] = a[t, c] + a[r, c]
            for c in range(m):
                u[t, c] = u[t, c] + u[r, c]
            pos = (t, t)
    su = MatPoly.from_qp_matrix(u)
    sv = MatPoly.from_qp_matrix(v)
    ss = MatPoly.from_qp_matrix(a)
    _audit_smith(su, p, sv, ss, a)
    return su, ss, sv


def _audit_smith(su, p, sv, ss, a):
    m, n = a.shape
    for i in range(m):
        for j in range(n):
            if i != j and not a[i, j].is_zero():
                raise VerificationError("Smith reduction left an off"
                                        "-diagonal entry")
    prev = None
    for t in range(min(m, n)):
        d = a[t, t]
        if d.is_zero():
            prev = d
            continue
        if prev is not None and (prev.is_zero() or not prev.divides(d)):
            raise VerificationError("invariant factors break the "
                                    "divisibility chain")
        if d.lc != 1:
            raise VerificationError("invariant factor is not monic")
        prev = d
    if pm_det(su.to_qp_matrix()).degree != 0:
        raise VerificationError("row transformation is not unimodular")
    if pm_det(sv.to_qp_matrix()).degree != 0:
        raise VerificationError("column transformation is not unimodular")
    prod = su.matmul(p).matmul(sv)
    if not prod.equal(ss):
        raise VerificationError("Smith reduction lost the transformation "
                                "trail")


def _smith_diag(p):
    """Nonzero invariant factors of p, in chain order."""
    _, s, _ = smith_form(p)
    a = s.to_qp_matrix()
    out = []
    for t in range(min(a.shape)):
        if not a[t, t].is_zero():
            out.append(a[t, t])
    return out


# ---------------------------------------------------------------------------
# Eigenstructure report


def _frac_str(x: Fraction) -> str:
    return str(x.numerator) if x.denominator == 1 else (
        "%d/%d" % (x.numerator, x.denominator))


def _parse_frac(s) -> Fraction:
    return Fraction(str(s))


@dataclass(frozen=True)
class EigStructure:
    """Complete eigenstructure of a matrix polynomial.

    finite holds (factor, exponents) pairs keyed by a monic irreducible
    factor as ascending rational coefficients on the exact path, or a
    numeric eigenvalue on the float path.  infinite is the partition of
    divisor degrees at infinity.  Exponent lists follow the divisibility
    chain, so they are nondecreasing.
    """
    nrank: int
    finite: tuple
    infinite: tuple
    right_indices: tuple
    left_indices: tuple
    field: str = FIELD_RATIONAL

    def __post_init__(self):
        object.__setattr__(self, "finite", tuple(
            (f if self.field == FIELD_FLOAT else tuple(f), tuple(e))
            for f, e in self.finite))
        object.__setattr__(self, "infinite", tuple(self.infinite))
        object.__setattr__(self, "right_indices", tuple(self.right_indices))
        object.__setattr__(self, "left_indices", tuple(self.left_indices))
        if self.nrank < 0:
            raise SchemaError("normal rank cannot be negative")
        for f, exps in self.finite:
            if not exps or any(e <= 0 for e in exps):
                raise SchemaError("finite exponents must be positive")
            if list(exps) != sorted(exps):
                raise SchemaError("finite exponents must follow the chain")
            if self.field == FIELD_RATIONAL:
                if len(f) < 2 or f[-1] != 1:
                    raise SchemaError("finite factor must be monic of "
                                      "positive degree")
        if any(e <= 0 for e in self.infinite):
            raise SchemaError("infinite degrees must be positive")
        if list(self.infinite) != sorted(self.infinite):
            raise SchemaError("infinite degrees must follow the chain")
        for idx in (self.right_indices, self.left_indices):
            if any(e < 0 for e in idx):
                raise SchemaError("minimal indices cannot be negative")
            if list(idx) != sorted(idx):
                raise SchemaError("minimal indices must be ascending")

    def finite_degree_sum(self) -> int:
        total = 0
        for f, exps in self.finite:
            d = 1 if self.field == FIELD_FLOAT else len(f) - 1
            total += d * sum(exps)
        return total

    def structural_sum(self) -> int:
        return (self.finite_degree_sum() + sum(self.infinite)
                + sum(self.right_indices) + sum(self.left_indices))

    def to_json_dict(self) -> dict:
        if self.field == FIELD_FLOAT:
            fin = [{"value": [x.real, x.imag], "exponents": list(e)}
                   for x, e in self.finite]
        else:
            fin = [{"factor": [_frac_str(c) for c in f],
                    "exponents": list(e)} for f, e in self.finite]
        return {
            "kind": "eigstructure",
            "field": self.field,
            "nrank": self.nrank,
            "finite": fin,
            "infinite": list(self.infinite),
            "right_indices": list(self.right_indices),
            "left_indices": list(self.left_indices),
        }

    @classmethod
    def from_json_dict(cls, d: dict) -> "EigStructure":
        _require_keys(d, ("kind", "field", "nrank", "finite", "infinite",
                          "right_indices", "left_indices"),
                      "eigenstructure")
        if d["kind"] != "eigstructure":
            raise SchemaError("not an eigenstructure record")
        field = d["field"]
        fin = []
        for entry in d["finite"]:
            exps = tuple(entry["exponents"])
            if field == FIELD_FLOAT:
                re, im = entry["value"]
                fin.append((complex(re, im), exps))
            else:
                fin.append((tuple(_parse_frac(c) for c in entry["factor"]),
                            exps))
        return cls(nrank=int(d["nrank"]), finite=tuple(fin),
                   infinite=tuple(d["infinite"]),
                   right_indices=tuple(d["right_indices"]),
                   left_indices=tuple(d["left_indices"]), field=field)


def index_sum_check(es: EigStructure) -> bool:
    """Pencil bookkeeping: all structural degrees add up to the normal
    rank."""
    return es.structural_sum() == es.nrank


def _factor_monic(d: QP):
    """Monic irreducible factors of a monic rational polynomial, with
    multiplicities, as ascending coefficient tuples."""
    x = sympy.Symbol("x")
    expr = sum((sympy.Rational(c.numerator, c.denominator) * x ** i
                for i, c in enumerate(d.c)), sympy.Integer(0))
    _, factors = sympy.factor_list(sympy.Poly(expr, x))
    out = []
    for f, e in factors:
        desc = f.all_coeffs()
        lc = desc[0]
        asc = []
        for c in reversed(desc):
            r = sympy.Rational(c, lc)
            asc.append(Fraction(int(r.p), int(r.q)))
        out.append((tuple(asc), int(e)))
    out.sort(key=lambda fe: (len(fe[0]), fe[0]))
    return out


def _valuation_at_zero(d: QP) -> int:
    t = 0
    while t < len(d.c) and d.c[t] == 0:
        t += 1
    return t


def complete_eigenstructure(p, safety=None) -> EigStructure:
    """Finite and infinite elementary divisors plus minimal indices.

    Exact path: Smith form of p for the finite part, Smith form of the
    grade reversal for the degrees at infinity, minimal bases for the
    indices.  Float path: regular pencils only, one simple divisor per
    numeric eigenvalue.
    """
    p = _as_matpoly(p)
    if p.field == FIELD_FLOAT:
        return _float_regular_pencil(p)
    divisors = _smith_diag(p)
    nrank = len(divisors)
    table = {}
    order = []
    for d in divisors:
        if d.degree == 0:
            continue
        for fac, e in _factor_monic(d):
            if fac not in table:
                table[fac] = []
                order.append(fac)
            table[fac].append(e)
    finite = tuple((fac, tuple(table[fac]))
                   for fac in sorted(order, key=lambda f: (len(f), f)))
    rev_divisors = _smith_diag(p.reversal())
    infinite = tuple(t for t in (_valuation_at_zero(d) for d in rev_divisors)
                     if t > 0)
    right = minimal_basis(p, SIDE_RIGHT, safety).indices
    left = minimal_basis(p, SIDE_LEFT, safety).indices
    es = EigStructure(nrank=nrank, finite=finite, infinite=infinite,
                      right_indices=right, left_indices=left, field=p.field)
    if p.grade == 1 and not index_sum_check(es):
        raise VerificationError("structural indices do not add up to the "
                                "normal rank")
    return es


def _float_regular_pencil(p: MatPoly) -> EigStructure:
    import scipy.linalg

    if p.grade != 1:
        raise PreconditionError("float eigenstructure only covers regular "
                                "pencils; use the rational field")
    if p.m != p.n:
        raise PreconditionError("float eigenstructure needs a square "
                                "regular pencil")
    w = scipy.linalg.eigvals(-p.coeffs[0], p.coeffs[1])
    if np.any(np.isnan(w)):
        raise PreconditionError("pencil is numerically singular; use the "
                                "rational field")
    fin = [complex(x) for x in w if np.isfinite(x)]
    fin.sort(key=lambda z: (z.real, z.imag))
    finite = tuple((z, (1,)) for z in fin)
    infinite = (1,) * (len(w) - len(fin))
    return EigStructure(nrank=p.n, finite=finite, infinite=infinite,
                        right_indices=(), left_indices=(), field=FIELD_FLOAT)


# ---------------------------------------------------------------------------
# Linearization checks


@dataclass(frozen=True)
class Verdict:
    ok: bool
    reason: str = ""

    def __bool__(self) -> bool:
        return self.ok

    def to_json_dict(self) -> dict:
        return {"kind": "verdict", "ok": self.ok, "reason": self.reason}


def _as_pencil_matpoly(l):
    if hasattr(l, "pencil") and hasattr(l, "ansatz"):
        l = l.pencil
    if isinstance(l, Pencil):
        return l.to_matpoly()
    if hasattr(l, "Lt"):
        return l.Lt.to_matpoly()
    if isinstance(l, MatPoly):
        if l.grade != 1:
            raise SchemaError("expected a pencil")
        return l
    raise SchemaError("expected a pencil")


def _padded(p: MatPoly, pad) -> MatPoly:
    if pad is None or pad.shape[0] == 0:
        return p
    return p.block_diag(MatPoly.constant(pad, p.field))


def _strip_zero_roots(diag):
    return [QP(d.c[_valuation_at_zero(d):]) for d in diag]


def _finite_verdict(lmat, target) -> Verdict:
    if _smith_diag(lmat) != _smith_diag(target):
        return Verdict(False, "finite structure mismatch")
    return Verdict(True, "")


def _reversal_verdict(rl, rt) -> Verdict:
    d1 = _smith_diag(rl)
    d2 = _smith_diag(rt)
    if d1 != d2:
        if _strip_zero_roots(d1) == _strip_zero_roots(d2):
            return Verdict(False, "infinite eigenvalue mismatch")
        return Verdict(False, "reversal structure mismatch")
    return Verdict(True, "")


def check_g_linearization(l, p, strong: bool = False,
                          safety=None) -> Verdict:
    """Does the pencil carry the complete finite (and, when strong, also
    infinite) structure of p with matching nullspace dimensions?

    The pencil and the padded target share their shape, so equal Smith
    forms already force equal nullspace dimensions on both sides.
    """
    lmat = _as_pencil_matpoly(l)
    p = _as_matpoly(p)
    if p.field != FIELD_RATIONAL or lmat.field != FIELD_RATIONAL:
        raise PreconditionError("linearization checks need the rational "
                                "field")
    k = p.grade
    if (lmat.m, lmat.n) != (k * p.m, k * p.n):
        raise SchemaError("pencil size does not match the grade")
    pad = None
    if k >= 2:
        pad = xla.kron(xla.feye(k - 1), rect_identity(p.m, p.n, p.field))
    verdict = _finite_verdict(lmat, _padded(p, pad))
    if not verdict.ok or not strong:
        return verdict
    return _reversal_verdict(lmat.reversal(), _padded(p.reversal(), pad))


def check_linearization(lt, p, strong: bool = False,
                        safety=None) -> Verdict:
    """Same comparison for trimmed pencils against p padded with a square
    identity block sized by the shape difference."""
    lmat = _as_pencil_matpoly(lt)
    p = _as_matpoly(p)
    if p.field != FIELD_RATIONAL or lmat.field != FIELD_RATIONAL:
        raise PreconditionError("linearization checks need the rational "
                                "field")
    s = lmat.m - p.m
    if s != lmat.n - p.n or s < 0:
        raise SchemaError("pencil size does not match a padded identity")
    pad = xla.feye(s) if s > 0 else None
    verdict = _finite_verdict(lmat, _padded(p, pad))
    if not verdict.ok or not strong:
        return verdict
    return _reversal_verdict(lmat.reversal(), _padded(p.reversal(), pad))
