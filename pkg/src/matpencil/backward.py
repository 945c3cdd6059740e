"""Backward-error machinery for trimmed pencils.

Covers the minimality margin of the shifted block row, completion of the
dual polynomial basis after a perturbation, the perturbed polynomial the
trimmed pencil actually linearizes, the backward-error constants, and a
seeded experiment driver that checks the advertised bound trial by trial.

Trials are independent pure computations; each one draws from its own
generator seeded by (seed, trial index), so execution order cannot leak
between trials and reports are listed in trial order.
"""

import json
import math
from dataclasses import dataclass

import numpy as np

from . import exactla as xla
from .errors import PreconditionError, SchemaError, VerificationError
from .matpoly import (
    FIELD_FLOAT,
    FIELD_RATIONAL,
    MatPoly,
    Pencil,
    _require_keys,
    float_rank,
    float_rank_tol,
    h_dual,
    lambda_vec,
)
from .minimal import _check_trim_matches
from .reduction import TrimResult
from .spaces import SIDE_L2

__all__ = [
    "AppendixMatrices",
    "PerturbReport",
    "appendix_lambda_min",
    "backward_constants",
    "dual_completion",
    "minimality_margin",
    "optimality_check",
    "perturbed_polynomial",
    "reports_to_jsonl",
    "run_experiment",
    "sigma_min_tau",
    "summarize_experiment",
]

RESIDUAL_TOL = 1e-9


def _as_grade_one(x, what: str) -> MatPoly:
    if isinstance(x, Pencil):
        return x.to_matpoly()
    if isinstance(x, MatPoly):
        if x.grade > 1:
            raise SchemaError(what + " must be a pencil")
        if x.grade == 0:
            return MatPoly([x.coeff(0), x.coeff(1)], x.field)
        return x
    raise SchemaError(what + " must be a pencil")


def _fmatrix(a) -> np.ndarray:
    a = np.asarray(a)
    if a.dtype == object:
        return xla.to_float(a)
    return a.astype(float)


def _smin(a) -> float:
    a = _fmatrix(a)
    if min(a.shape) == 0:
        return 0.0
    return float(np.linalg.svd(a, compute_uv=False)[-1])


def _cond2(a) -> float:
    return float(np.linalg.cond(_fmatrix(a), 2))


# ---------------------------------------------------------------------------
# Spectral reference values


class AppendixMatrices:
    """Tridiagonal comparison blocks for the Gram matrix of the shifted
    block row's convolution matrix."""

    @staticmethod
    def d(j: int) -> np.ndarray:
        if j < 1:
            raise PreconditionError("block size must be positive")
        out = 2.0 * np.eye(j)
        out[0, 0] = 1.0
        out[j - 1, j - 1] = 1.0
        return out

    @staticmethod
    def l(j: int) -> np.ndarray:
        if j < 1:
            raise PreconditionError("block size must be positive")
        return np.diag(-np.ones(j - 1), -1)

    @classmethod
    def t(cls, j: int) -> np.ndarray:
        out = cls.d(j) + cls.l(j) + cls.l(j).T
        out[j - 1, j - 1] += 1.0
        return out

    @classmethod
    def t_hat(cls, j: int) -> np.ndarray:
        out = cls.d(j) + cls.l(j) + cls.l(j).T
        out[0, 0] += 1.0
        return out


def appendix_lambda_min(k: int) -> float:
    """Smallest eigenvalue of the leading corner block, closed form."""
    if k < 2:
        raise PreconditionError("grade must be at least 2")
    return 2.0 + 2.0 * math.cos(2.0 * (k - 1) * math.pi / (2 * k - 1))


def sigma_min_tau(k: int, n: int, j: int):
    """Smallest singular value of the j-block convolution matrix of the
    dual shift pencil: the closed form next to an SVD evaluation."""
    if k < 2:
        raise PreconditionError("grade must be at least 2")
    if n < 1:
        raise PreconditionError("block width must be positive")
    if j not in (k - 2, k - 1):
        raise PreconditionError("block count must be k-2 or k-1")
    formula = 2.0 * math.sin(math.pi / (4 * k - 2))
    tau = h_dual(k - 1, n, FIELD_FLOAT)
    computed = float(np.linalg.svd(tau.conv_matrix(j),
                                   compute_uv=False)[-1])
    return formula, computed


# ---------------------------------------------------------------------------
# Minimality and dual completion


def _split_sizes(bp: MatPoly):
    """Recover (k, n) from a (k-1)n x kn block row."""
    rows, cols = bp.m, bp.n
    if cols <= rows or cols % (cols - rows) != 0:
        raise SchemaError("block row shape is not (k-1)n x kn")
    k = cols // (cols - rows)
    if k < 2:
        raise SchemaError("block row shape is not (k-1)n x kn")
    return k, cols - rows


def _is_block_minimal(bp: MatPoly, k: int, safety=None) -> bool:
    c_sq = bp.conv_matrix(k - 2)
    c_row = bp.conv_matrix(k - 1)
    if bp.field == FIELD_RATIONAL:
        return (xla.rank(c_sq) == c_sq.shape[0]
                and xla.rank(c_row) == c_row.shape[0])
    return (float_rank(c_sq, safety) == c_sq.shape[0]
            and float_rank(c_row, safety) == c_row.shape[0])


def minimality_margin(bp, rt, safety=None):
    """Is the (possibly perturbed) block row still a minimal basis with
    every row index equal to one?

    Checks the square convolution matrix for nonsingularity and the next
    one for full row rank.  The margin is the admissible perturbation
    radius 3 sigma_min(rt) / (2 k^(3/2)), returned for reference.
    """
    bp = _as_grade_one(bp, "block row")
    k, _ = _split_sizes(bp)
    margin = 3.0 * _smin(rt) / (2.0 * k ** 1.5)
    return _is_block_minimal(bp, k, safety), margin


def _stack_desc(mp: MatPoly) -> np.ndarray:
    blocks = [mp.coeff(i) for i in range(mp.grade, -1, -1)]
    if mp.field == FIELD_RATIONAL:
        out = xla.fzeros(len(blocks) * mp.m, mp.n)
        for i, b in enumerate(blocks):
            out[i * mp.m:(i + 1) * mp.m, :] = b
        return out
    return np.vstack(blocks)


def dual_completion(bp, k: int, n: int, rt=None, delta_b=None,
                    safety=None) -> MatPoly:
    """Correction of the dual polynomial basis after the block row moved.

    Solves the exact annihilation condition for the perturbed row as a
    linear system in the correction's coefficients, taking the minimum
    norm solution.  When the base triangular factor and the row
    perturbation are supplied, the admissible radius precondition and the
    norm bound on the correction are enforced as well.  The perturbed dual
    pair is verified minimal before returning.
    """
    bp = _as_grade_one(bp, "block row")
    if (bp.m, bp.n) != ((k - 1) * n, k * n):
        raise SchemaError("block row shape is not (k-1)n x kn")
    dbn = None
    if delta_b is not None:
        db = _as_grade_one(delta_b, "row perturbation")
        dbn = db.frob_norm()
    if rt is not None and dbn is not None:
        if not dbn < _smin(rt) / (2.0 * k ** 1.5):
            raise PreconditionError("row perturbation exceeds the dual "
                                    "completion radius")
    lam = lambda_vec(k, n, bp.field)
    conv = bp.conv_matrix(k - 1)
    rhs = _stack_desc(bp.matmul(lam))
    if bp.field == FIELD_RATIONAL:
        gram = xla.mm(conv, conv.T)
        if xla.rank(gram) != gram.shape[0]:
            raise VerificationError("dual completion system is rank "
                                    "deficient")
        x = -xla.mm(conv.T, xla.solve(gram, rhs))
    else:
        x = -np.linalg.lstsq(conv, rhs, rcond=None)[0]
    kn = k * n
    coeffs = [x[(k - 1 - i) * kn:(k - i) * kn, :] for i in range(k)]
    dd = MatPoly([np.ascontiguousarray(c) for c in coeffs], bp.field)
    residual = bp.matmul(lam + dd)
    if bp.field == FIELD_RATIONAL:
        if not residual.is_zero():
            raise VerificationError("dual completion residual is not zero")
    else:
        scale = max(1.0, bp.frob_norm() * (lam + dd).frob_norm())
        if residual.frob_norm() > RESIDUAL_TOL * scale:
            raise VerificationError("dual completion residual above "
                                    "tolerance")
    if rt is not None and dbn is not None:
        limit = k * math.sqrt(2.0) / _smin(rt) * dbn
        if dd.frob_norm() > limit * (1.0 + 1e-12):
            raise VerificationError("dual completion norm bound failed")
    if not _is_block_minimal(bp, k, safety):
        raise VerificationError("perturbed block row is not a minimal "
                                "basis")
    lead = (lam + dd).coeff(k - 1)
    if bp.field == FIELD_RATIONAL:
        lead_ok = xla.rank(lead) == n
    else:
        lead_ok = float_rank(lead, safety) == n
    if not lead_ok:
        raise VerificationError("perturbed dual basis is not column "
                                "reduced")
    return dd


def perturbed_polynomial(a, da, dd, alpha) -> MatPoly:
    """The polynomial the perturbed trimmed pencil actually linearizes,
    relative to the original: (1/alpha) ((A + dA) dD + dA Lambda)."""
    a = _as_grade_one(a, "top strip")
    da = _as_grade_one(da, "strip perturbation")
    if float(alpha) == 0.0:
        raise PreconditionError("scale must be nonzero")
    if (a.m, a.n) != (da.m, da.n) or a.field != da.field:
        raise SchemaError("strip and perturbation shapes differ")
    if dd is None:
        raise SchemaError("dual correction is required; pass a zero "
                          "polynomial of shape kn x n")
    if dd.m != a.n:
        raise SchemaError("dual correction height must match the strip "
                          "width")
    n = dd.n
    if a.n % n != 0:
        raise SchemaError("strip width is not a multiple of the dual "
                          "width")
    k = a.n // n
    lam = lambda_vec(k, n, a.field)
    out = (a + da).matmul(dd) + da.matmul(lam)
    if a.field == FIELD_RATIONAL:
        return out.scale(xla.frac(1) / xla.frac(alpha))
    return out.scale(1.0 / float(alpha))


# ---------------------------------------------------------------------------
# Constants and reports


def backward_constants(tr: TrimResult, p):
    """The two backward-error constants of a trimmed pencil: the
    normalized one and the full one carrying the conditioning of the
    row compression."""
    if not isinstance(tr, TrimResult):
        raise SchemaError("expected a trimming record")
    if isinstance(p, Pencil):
        p = p.to_matpoly()
    if (tr.m, tr.n, tr.k) != (p.m, p.n, p.grade):
        raise SchemaError("trimming record sizes do not match the "
                          "polynomial")
    k = tr.k
    alpha = abs(float(tr.alpha))
    p_norm = float(p.frob_norm())
    lt_hat_norm = float(tr.Lt_hat.frob_norm())
    a_norm = float(tr.a_block().frob_norm())
    sig_r = _smin(tr.Rt)
    c_hat = (lt_hat_norm / p_norm / alpha) * (3.0 + 2.0 * k * a_norm / sig_r)
    c_full = _cond2(tr.Dtilde) * c_hat
    return c_hat, c_full


@dataclass(frozen=True)
class PerturbReport:
    """One perturbation trial: the sampled size, the admissible radius,
    the induced polynomial perturbation, and the bound data."""
    epsilon: float
    bound_rhs: float
    delta_P_norm: float
    ratio: float
    constant_hat: float
    constant_full: float
    kappa_dtilde: float
    kappa_rtilde: float
    sigma_min_rtilde: float
    indices_preserved: bool
    conclusive: bool = True

    def bound_holds(self) -> bool:
        if self.epsilon >= self.bound_rhs:
            return True
        return self.ratio <= self.constant_full

    def to_json_dict(self) -> dict:
        return {
            "kind": "perturb_report",
            "epsilon": self.epsilon,
            "bound_rhs": self.bound_rhs,
            "delta_P_norm": self.delta_P_norm,
            "ratio": self.ratio,
            "constant_hat": self.constant_hat,
            "constant_full": self.constant_full,
            "kappa_dtilde": self.kappa_dtilde,
            "kappa_rtilde": self.kappa_rtilde,
            "sigma_min_rtilde": self.sigma_min_rtilde,
            "indices_preserved": self.indices_preserved,
            "conclusive": self.conclusive,
        }

    @classmethod
    def from_json_dict(cls, d: dict) -> "PerturbReport":
        _require_keys(d, ("kind", "epsilon", "bound_rhs", "delta_P_norm",
                          "ratio", "constant_hat", "constant_full",
                          "kappa_dtilde", "kappa_rtilde",
                          "sigma_min_rtilde", "indices_preserved"),
                      "perturbation report")
        if d["kind"] != "perturb_report":
            raise SchemaError("not a perturbation report")
        return cls(epsilon=d["epsilon"], bound_rhs=d["bound_rhs"],
                   delta_P_norm=d["delta_P_norm"], ratio=d["ratio"],
                   constant_hat=d["constant_hat"],
                   constant_full=d["constant_full"],
                   kappa_dtilde=d["kappa_dtilde"],
                   kappa_rtilde=d["kappa_rtilde"],
                   sigma_min_rtilde=d["sigma_min_rtilde"],
                   indices_preserved=d["indices_preserved"],
                   conclusive=d.get("conclusive", True))


def reports_to_jsonl(reports) -> str:
    return "".join(json.dumps(r.to_json_dict(), sort_keys=True) + "\n"
                   for r in reports)


def summarize_experiment(reports) -> dict:
    ratios = [r.ratio for r in reports]
    return {
        "kind": "experiment_summary",
        "trials": len(reports),
        "max_ratio": max(ratios) if ratios else 0.0,
        "constant_full": reports[0].constant_full if reports else 0.0,
        "bound_violations": sum(1 for r in reports if not r.bound_holds()),
        "all_indices_preserved": all(r.indices_preserved for r in reports),
        "inconclusive": sum(1 for r in reports if not r.conclusive),
    }


# ---------------------------------------------------------------------------
# Index extraction on the float path


def _rank_with_margin(a: np.ndarray, safety=None):
    """Tolerance rank plus a flag telling whether every singular value
    stays a factor ten away from the cut."""
    if a.size == 0:
        return 0, True
    s = np.linalg.svd(a, compute_uv=False)
    tol = float_rank_tol(a, safety)
    if tol == 0.0:
        return 0, True
    rank = int(np.sum(s > tol))
    near = np.any((s >= tol / 10.0) & (s <= tol * 10.0))
    return rank, not near


def _profile_indices(mp: MatPoly, safety=None):
    """Minimal index multiset from the nullity growth of convolution
    matrices (right side)."""
    want = mp.n - mp.normal_rank(safety)
    out = []
    conclusive = True
    bound = mp.grade * min(mp.m, mp.n)
    nu_prev = 0
    g_prev = 0
    d = 0
    while len(out) < want:
        if d > bound:
            raise VerificationError("minimal index search passed the "
                                    "degree bound")
        rank, ok = _rank_with_margin(mp.conv_matrix(d), safety)
        conclusive = conclusive and ok
        nu = (d + 1) * mp.n - rank
        g = nu - nu_prev
        if g < g_prev:
            raise VerificationError("nullity profile is not monotone")
        out.extend([d] * (g - g_prev))
        nu_prev, g_prev = nu, g
        d += 1
    return tuple(out), conclusive


def _float_index_pair(mp: MatPoly, safety=None):
    right, ok_r = _profile_indices(mp, safety)
    left, ok_l = _profile_indices(mp.transpose(), safety)
    return right, left, ok_r and ok_l


# ---------------------------------------------------------------------------
# Experiment driver


def run_experiment(p, tr: TrimResult, eps_fraction: float, trials: int,
                   seed: int, safety=None):
    """Randomized check of the backward-error bound.

    Per trial: sample a pencil perturbation of Frobenius norm
    eps_fraction times the admissible radius, split it through the row
    compression into strip and block-row parts, complete the dual basis,
    build the induced polynomial perturbation, and compare minimal
    indices of the perturbed polynomial against the perturbed pencil
    under the unperturbed shift rules.
    """
    if isinstance(p, Pencil):
        p = p.to_matpoly()
    if not isinstance(tr, TrimResult):
        raise SchemaError("expected a trimming record")
    if tr.side == SIDE_L2:
        tr = tr.transpose()
        p = p.transpose()
    if not 0.0 < eps_fraction < 1.0:
        raise PreconditionError("perturbation fraction must sit strictly "
                                "inside the radius")
    if trials < 1:
        raise PreconditionError("need at least one trial")
    _check_trim_matches(tr, p, RESIDUAL_TOL)
    k, m, n = tr.k, tr.m, tr.n
    pf = p.to_float()
    dt = _fmatrix(tr.Dtilde)
    rt = _fmatrix(tr.Rt)
    af = tr.a_block().to_matpoly().to_float()
    bf = tr.b_block().to_matpoly().to_float()
    ltf = tr.Lt.to_matpoly().to_float()
    alpha = float(tr.alpha)
    sig_r = _smin(rt)
    bound = sig_r * _smin(dt) / (2.0 * k ** 1.5)
    lt_norm = ltf.frob_norm()
    p_norm = pf.frob_norm()
    c_hat, c_full = backward_constants(tr, p)
    kappa_d = _cond2(dt)
    kappa_r = _cond2(rt)
    epsilon = eps_fraction * bound
    rows = m + (k - 1) * n
    reports = []
    for t in range(trials):
        rng = np.random.default_rng([seed, t])
        dx = rng.standard_normal((rows, k * n))
        dy = rng.standard_normal((rows, k * n))
        s = epsilon / math.sqrt(np.sum(dx * dx) + np.sum(dy * dy))
        dx *= s
        dy *= s
        ex = np.linalg.solve(dt, dx)
        ey = np.linalg.solve(dt, dy)
        da = MatPoly([ey[:m], ex[:m]], FIELD_FLOAT)
        db = MatPoly([ey[m:], ex[m:]], FIELD_FLOAT)
        dd = dual_completion(bf + db, k, n, rt=rt, delta_b=db,
                             safety=safety)
        dp = perturbed_polynomial(af, da, dd, alpha)
        dpn = dp.frob_norm()
        ratio = (dpn / p_norm) / (epsilon / lt_norm)
        rp, lp_idx, ok_p = _float_index_pair(pf + dp, safety)
        perturbed_pencil = ltf + MatPoly([dy, dx], FIELD_FLOAT)
        rl, ll, ok_l = _float_index_pair(perturbed_pencil, safety)
        preserved = (rl == tuple(e + k - 1 for e in rp) and ll == lp_idx)
        reports.append(PerturbReport(
            epsilon=epsilon, bound_rhs=bound, delta_P_norm=dpn,
            ratio=ratio, constant_hat=c_hat, constant_full=c_full,
            kappa_dtilde=kappa_d, kappa_rtilde=kappa_r,
            sigma_min_rtilde=sig_r, indices_preserved=preserved,
            conclusive=ok_p and ok_l))
    return reports


def optimality_check(tr: TrimResult, p, factor: float = 10.0) -> dict:
    """Measure how far the trim sits from the well-scaled regime: both
    condition numbers near one and the strip norm near the scaled
    polynomial norm near the smallest singular value of the triangular
    factor."""
    if not isinstance(tr, TrimResult):
        raise SchemaError("expected a trimming record")
    if isinstance(p, Pencil):
        p = p.to_matpoly()
    alpha = abs(float(tr.alpha))
    p_norm = float(p.frob_norm())
    a_norm = float(tr.a_block().frob_norm())
    sig_r = _smin(tr.Rt)
    scaled = alpha * p_norm
    conditions = [
        {"name": "row_compression_conditioning",
         "value": _cond2(tr.Dtilde),
         "passes": _cond2(tr.Dtilde) <= factor},
        {"name": "triangular_factor_conditioning",
         "value": _cond2(tr.Rt),
         "passes": _cond2(tr.Rt) <= factor},
        {"name": "strip_norm_over_scaled_poly_norm",
         "value": a_norm / scaled,
         "passes": 1.0 / factor <= a_norm / scaled <= factor},
        {"name": "smallest_singular_over_scaled_poly_norm",
         "value": sig_r / scaled,
         "passes": 1.0 / factor <= sig_r / scaled <= factor},
    ]
    all_pass = all(c["passes"] for c in conditions)
    report = {
        "kind": "optimality_report",
        "conditions": conditions,
        "all_pass": all_pass,
        "recommendation": "" if all_pass else
        "rescale so the ansatz scale equals one over the polynomial norm",
    }
    return report
