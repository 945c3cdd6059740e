"""Lower-block extraction, witnesses, and trimming, anchored on the three
bundled cases and the companion members."""

import numpy as np
import pytest

from matpencil import exactla as xla
from matpencil.cases import (CASE1_Z, CASE3_M, CASE3_Z, case1_member,
                             case2_member, case2_poly, case2_witnesses,
                             case3_expected_lt, case3_member, case3_published_d,
                             case3_poly)
from matpencil.errors import (PreconditionError, StructureError,
                              VerificationError)
from matpencil.matpoly import (FIELD_FLOAT, FIELD_RATIONAL, MatPoly, Pencil,
                               flip_r, h_dual, lambda_vec, mat_kron, mat_mm,
                               rect_identity, zeros_matrix)
from matpencil.reduction import (TrimResult, full_z_rank, g_lin_witnesses,
                                 kronecker_core, reflector_for, trim,
                                 verify_witnesses, z_block, z_rank)
from matpencil.spaces import (SIDE_L1, build_l1, build_l2, companion_g1,
                              companion_g2)


def rand_poly(rng, m, n, k, field=FIELD_RATIONAL):
    coeffs = [rng.integers(-4, 5, size=(m, n)) for _ in range(k + 1)]
    if field == FIELD_RATIONAL:
        return MatPoly([xla.fmat(c.tolist()) for c in coeffs], field)
    return MatPoly([c.astype(float) for c in coeffs], field)


def rand_member(rng, m, n, k, field=FIELD_RATIONAL):
    p = rand_poly(rng, m, n, k, field)
    v = rng.integers(-3, 4, size=k)
    while not v.any():
        v = rng.integers(-3, 4, size=k)
    w = rng.integers(-4, 5, size=(k * m, (k - 1) * n))
    if field == FIELD_RATIONAL:
        return build_l1(p, v.tolist(), xla.fmat(w.tolist()))
    return build_l1(p, v.astype(float), w.astype(float))


def frobenius_c1(p: MatPoly) -> Pencil:
    """Classical trimmed first companion of a tall polynomial."""
    k, m, n = p.grade, p.m, p.n
    rows = m + (k - 1) * n
    x = zeros_matrix(rows, k * n, p.field)
    y = zeros_matrix(rows, k * n, p.field)
    x[:m, :n] = p.coeff(k)
    for j in range(k - 1):
        x[m + j * n:m + (j + 1) * n, (j + 1) * n:(j + 2) * n] = \
            xla.feye(n) if p.field == FIELD_RATIONAL else np.eye(n)
    for j in range(k):
        y[:m, j * n:(j + 1) * n] = p.coeff(k - 1 - j)
    eye = xla.feye((k - 1) * n) if p.field == FIELD_RATIONAL else np.eye((k - 1) * n)
    y[m:, :(k - 1) * n] = -eye
    return Pencil(x, y, p.field)


class TestReflector:
    def test_unit_vector(self):
        m, a = reflector_for(xla.fvec([1, 0]))
        assert a == 1 and xla.is_zero(m - xla.feye(2))

    def test_row_swap(self):
        m, a = reflector_for(xla.fvec([0, 1]))
        assert a == 1
        assert xla.is_zero(m - xla.fmat([[0, 1], [1, 0]]))

    def test_exact_general(self):
        v = xla.fvec([3, 4])
        m, a = reflector_for(v)
        mv = m.dot(v)
        assert a == 3 and mv[0] == a and mv[1] == 0

    def test_float_householder(self):
        m, a = reflector_for(np.array([3.0, 4.0]))
        assert abs(a - 5.0) < 1e-14
        assert np.allclose(m @ np.array([3.0, 4.0]), [5.0, 0.0])
        assert np.allclose(m @ m.T, np.eye(2))

    def test_float_positive_axis(self):
        m, a = reflector_for(np.array([0.25, 0.0, 0.0]))
        assert np.allclose(m, np.eye(3)) and abs(a - 0.25) < 1e-15

    def test_zero_rejected(self):
        with pytest.raises(PreconditionError):
            reflector_for(xla.fvec([0, 0]))
        with pytest.raises(PreconditionError):
            reflector_for(np.zeros(3))


class TestZBlock:
    def test_companion_is_negated_identity_pattern(self):
        p = case3_poly()
        c1 = companion_g1(p)
        z = z_block(c1, xla.feye(2), xla.ONE)
        assert xla.is_zero(z + rect_identity(3, 2))

    def test_companion_k3(self):
        rng = np.random.default_rng(31)
        p = rand_poly(rng, 4, 2, 3)
        z = z_block(companion_g1(p), xla.feye(3), xla.ONE)
        target = mat_kron(xla.feye(2), rect_identity(4, 2), FIELD_RATIONAL)
        assert xla.is_zero(z + target)

    def test_rank_deficient_case(self):
        member = case1_member()
        m, a = reflector_for(member.ansatz)
        z = z_block(member, m, a)
        assert xla.is_zero(z - xla.fmat(CASE1_Z))
        assert z_rank(member) == 1
        assert not full_z_rank(member)

    def test_walked_example(self):
        member = case3_member()
        m, a = reflector_for(member.ansatz)
        assert xla.is_zero(m - xla.fmat(CASE3_M)) and a == 1
        z = z_block(member, m, a)
        assert xla.is_zero(z - xla.fmat(CASE3_Z))
        assert full_z_rank(member)

    def test_structure_error_on_foreign_pencil(self):
        p = case3_poly()
        c1 = companion_g1(p)
        x = c1.pencil.X.copy()
        x[4, 0] = x[4, 0] + 1  # pollutes the lambda lower-left block
        from matpencil.spaces import AnsatzPencil
        fake = AnsatzPencil(Pencil(x, c1.pencil.Y, p.field), c1.side,
                            c1.ansatz, p)
        with pytest.raises(StructureError):
            z_block(fake, xla.feye(2), xla.ONE)

    def test_rank_invariant_under_m(self):
        rng = np.random.default_rng(32)
        for _ in range(5):
            member = rand_member(rng, 3, 2, 2)
            m1, a1 = reflector_for(member.ansatz)
            s = xla.fmat([[2, 3], [0, 1]])  # fixes the e1 direction
            m2 = s.dot(m1)
            z1 = z_block(member, m1, a1)
            z2 = z_block(member, m2, a1 * 2)
            assert xla.rank(z1) == xla.rank(z2)

    def test_l2_side(self):
        rng = np.random.default_rng(33)
        p = rand_poly(rng, 2, 3, 2)
        c2 = companion_g2(p)
        z = z_block(c2, xla.feye(2), xla.ONE)
        assert z.shape == (2, 3)
        assert xla.is_zero(z + rect_identity(2, 3))
        assert full_z_rank(c2)

    def test_reversal_relation(self):
        rng = np.random.default_rng(34)
        for _ in range(3):
            member = rand_member(rng, 3, 2, 2)
            m1, a1 = reflector_for(member.ansatz)
            z = z_block(member, m1, a1)
            rev = member.reversal_member()
            zr = z_block(rev, m1, a1)
            flip = flip_r(member.k - 1, 2)
            assert xla.is_zero(zr + z.dot(flip))


class TestWitnesses:
    def test_companion_witnesses(self):
        p = case3_poly()
        e, f = g_lin_witnesses(companion_g1(p))
        verify_witnesses(companion_g1(p).pencil, p, e, f)

    def test_bundled_witnesses_verify(self):
        e, f = case2_witnesses()
        verify_witnesses(case2_member().pencil, case2_poly(), e, f)

    def test_tampered_witness_rejected(self):
        e, f = case2_witnesses()
        bad = f.copy()
        bad.coeffs[0][0, 0] = bad.coeffs[0][0, 0] + 1
        with pytest.raises(VerificationError):
            verify_witnesses(case2_member().pencil, case2_poly(), e, bad)

    def test_random_members(self):
        rng = np.random.default_rng(35)
        done = 0
        while done < 3:
            member = rand_member(rng, 3, 2, 2)
            if not full_z_rank(member):
                continue
            e, f = g_lin_witnesses(member)
            prod = e.matmul(member.pencil.to_matpoly()).matmul(f)
            target = member.poly.block_diag(
                MatPoly([rect_identity(3, 2)], FIELD_RATIONAL))
            assert prod.equal(target)
            done += 1

    def test_determinants_constant(self):
        from matpencil.qpoly import pm_det
        member = case3_member()
        e, f = g_lin_witnesses(member)
        de = pm_det(e.to_qp_matrix())
        df = pm_det(f.to_qp_matrix())
        assert de.degree == 0 and not de.is_zero()
        assert df.degree == 0 and not df.is_zero()

    def test_k3_member(self):
        rng = np.random.default_rng(36)
        p = rand_poly(rng, 3, 2, 3)
        e, f = g_lin_witnesses(companion_g1(p))
        verify_witnesses(companion_g1(p).pencil, p, e, f)

    def test_l2_member(self):
        rng = np.random.default_rng(37)
        p = rand_poly(rng, 2, 3, 2)
        c2 = companion_g2(p)
        e, f = g_lin_witnesses(c2)
        verify_witnesses(c2.pencil, p, e, f)

    def test_rank_deficient_refused(self):
        with pytest.raises(PreconditionError):
            g_lin_witnesses(case1_member())


class TestTrim:
    def test_companion_trims_to_frobenius(self):
        p = case3_poly()
        tr = trim(companion_g1(p))
        assert tr.Lt.equal(frobenius_c1(p))
        assert tr.Lt.equal(tr.Lt_hat)
        assert xla.is_zero(tr.Dtilde - xla.feye(5))
        assert xla.is_zero(tr.Rt + xla.feye(2))

    def test_companion_trims_to_frobenius_k3(self):
        rng = np.random.default_rng(38)
        p = rand_poly(rng, 4, 2, 3)
        tr = trim(companion_g1(p))
        assert tr.Lt.equal(frobenius_c1(p))

    def test_walked_example_default(self):
        member = case3_member()
        tr = trim(member)
        assert tr.alpha == 1
        assert xla.is_zero(tr.M - xla.fmat(CASE3_M))
        assert xla.is_zero(tr.Rt - xla.feye(2))
        assert xla.is_zero(tr.Q1 - xla.fmat([[1, 0], [0, 1], [0, 0]]))
        assert xla.is_zero(tr.Q2 - xla.fmat([[0], [0], [1]]))
        assert tr.Lt.m == 5 and tr.Lt.n == 4

    def test_walked_example_user_d(self):
        member = case3_member()
        tr = trim(member, d=case3_published_d())
        assert tr.Lt.equal(case3_expected_lt())
        assert xla.is_zero(tr.Lt.X[4, :]) and xla.is_zero(tr.Lt.Y[4, :])

    def test_bad_user_d_rejected(self):
        member = case3_member()
        d = xla.fzeros(5, 6)  # violates the completion requirement
        with pytest.raises(PreconditionError):
            trim(member, d=d)

    def test_rank_deficient_refused(self):
        with pytest.raises(PreconditionError):
            trim(case1_member())

    def test_square_identity_selector(self):
        rng = np.random.default_rng(39)
        p = rand_poly(rng, 2, 2, 2)
        member = companion_g1(p)
        tr = trim(member, d=xla.feye(4))
        assert tr.Lt.equal(member.pencil)
        assert tr.Q2.shape == (2, 0)
        assert tr.removed_row_count() == 0

    def test_a_block_identity(self):
        rng = np.random.default_rng(40)
        member = rand_member(rng, 3, 2, 2)
        if not full_z_rank(member):
            pytest.skip("unlucky draw")
        tr = trim(member)
        a = tr.a_block().to_matpoly()
        lam = lambda_vec(2, 2)
        prod = a.matmul(lam)
        assert prod.equal(member.poly.scale(tr.alpha))

    def test_b_block_factorization(self):
        rng = np.random.default_rng(41)
        member = rand_member(rng, 3, 2, 3)
        if not full_z_rank(member):
            pytest.skip("unlucky draw")
        tr = trim(member)
        b = tr.b_block().to_matpoly()
        h = h_dual(2, 2)
        target = MatPoly([mat_mm(-tr.Rt, c) for c in h.coeffs], FIELD_RATIONAL)
        assert b.equal(target)

    def test_row_split_reconstructs(self):
        member = case3_member()
        tr = trim(member)
        top = tr.a_block()
        bottom = tr.b_block()
        assert xla.is_zero(np.vstack([top.X, bottom.X]) - tr.Lt_hat.X)
        assert xla.is_zero(np.vstack([top.Y, bottom.Y]) - tr.Lt_hat.Y)

    def test_kronecker_core(self):
        member = case3_member()
        tr = trim(member, d=case3_published_d())
        k = kronecker_core(tr)
        assert k.m == 5 and k.n == 4
        # lower blocks of K carry plain identities
        assert xla.is_zero(k.X[3:, 2:] + xla.feye(2))
        assert xla.is_zero(k.Y[3:, :2] - xla.feye(2))

    def test_kronecker_core_companion_sign(self):
        p = case3_poly()
        tr = trim(companion_g1(p))
        k = kronecker_core(tr)
        c1 = frobenius_c1(p)
        flip = xla.feye(5)
        flip[3, 3] = -xla.ONE
        flip[4, 4] = -xla.ONE
        assert xla.is_zero(k.X - flip.dot(c1.X))
        assert xla.is_zero(k.Y - flip.dot(c1.Y))

    def test_l2_trim_matches_dual(self):
        rng = np.random.default_rng(42)
        p = rand_poly(rng, 2, 3, 2)
        c2 = companion_g2(p)
        tr = trim(c2)
        dual = trim(companion_g1(p.transpose()))
        assert tr.Lt.equal(dual.Lt.transpose())
        assert tr.Lt.m == 4 and tr.Lt.n == 5

    def test_l2_trim_explicit_selector(self):
        rng = np.random.default_rng(43)
        p = rand_poly(rng, 2, 3, 2)
        c2 = companion_g2(p)
        d = zeros_matrix(6, 5, FIELD_RATIONAL)
        d[:3, :3] = xla.feye(3)
        d[3:, 3:] = rect_identity(3, 2)
        tr = trim(c2, d=d)
        assert tr.Lt.equal(trim(c2).Lt)
        assert xla.is_zero(tr.Dtilde - xla.feye(5))

    def test_wide_l1_refused(self):
        rng = np.random.default_rng(44)
        p = rand_poly(rng, 2, 3, 2)
        member = build_l1(p, [1, 0], xla.fzeros(4, 3))
        with pytest.raises(PreconditionError):
            trim(member)

    def test_float_path(self):
        rng = np.random.default_rng(45)
        member = rand_member(rng, 3, 2, 2, field=FIELD_FLOAT)
        if not full_z_rank(member):
            pytest.skip("unlucky draw")
        tr = trim(member)
        assert np.allclose(tr.Q1.T @ tr.Q1, np.eye(2), atol=1e-12)
        assert np.allclose(tr.Q1 @ tr.Rt, tr.Z, atol=1e-10)
        lam = lambda_vec(2, 2, FIELD_FLOAT)
        prod = tr.a_block().to_matpoly().matmul(lam)
        target = member.poly.scale(tr.alpha)
        assert (prod - target).frob_norm() <= 1e-9 * max(1.0, target.frob_norm())
        kronecker_core(tr)

    def test_json_round_trip(self):
        tr = trim(case3_member(), d=case3_published_d())
        back = TrimResult.from_json_dict(tr.to_json_dict())
        assert back.Lt.equal(tr.Lt)
        assert xla.is_zero(back.Dtilde - tr.Dtilde)
        assert back.side == tr.side

    def test_json_tamper_rejected(self):
        tr = trim(case3_member())
        d = tr.to_json_dict()
        d["Dtilde"][0][0] = "7"
        with pytest.raises(VerificationError):
            TrimResult.from_json_dict(d)
