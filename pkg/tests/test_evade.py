import math
from fractions import Fraction

import numpy as np
import pytest

from conftest import brute_obstruction_solutions, frac_mat, random_gamma
from latblock.certificate import BudgetExceeded
from latblock.evade import (BlockingCandidate, InternalConsistencyError, build_B,
                            detB_closed, detB_poly, embed_sln, entry_closed_forms,
                            gen_family, norm_square_obstruction,
                            norm_square_solutions, refute_blocking,
                            replay_certificate)
from latblock.lattice import coset_distance, coset_reduce
from latblock.numeric import det_exact
from latblock.sl2 import Mat2, ModifiedTime, curve_point, time_from_lambda


@pytest.fixture(scope="module")
def unit_rep():
    return coset_reduce(frac_mat([1, 0, 1, 1]))


@pytest.fixture(scope="module")
def unit_family(unit_rep):
    return gen_family(unit_rep, 25)


class TestGenFamily:
    def test_worked_example(self, unit_family):
        first = unit_family.members[0]
        assert first.n == 2
        assert first.gamma.entries() == (4, 1, -9, -2)
        assert first.gamma.det() == 1
        assert first.trace == 3  # z + 2b = 1 + 2

    def test_second_member(self, unit_family):
        assert unit_family.members[1].trace == 4

    def test_empty(self, unit_rep):
        assert gen_family(unit_rep, 0).members == ()

    def test_count_cap(self, unit_rep):
        with pytest.raises(ValueError):
            gen_family(unit_rep, 1001)

    def test_rational_target(self):
        rep = coset_reduce(frac_mat(["2/3", 0, "1/5", "3/2"]))
        fam = gen_family(rep, 30)
        denom = fam.z.denominator
        prev = None
        for m in fam.members:
            assert m.gamma.det() == 1
            assert Fraction(m.g_gamma.trace()) == fam.z + m.n * fam.b
            assert m.trace.denominator == denom
            assert m.trace > 2
            if prev is not None:
                assert m.trace > prev
            prev = m.trace


class TestClosedForms:
    def test_u_example(self, unit_family):
        u, _ = entry_closed_forms(unit_family, 0)
        assert u == 5  # 3*2 - 1; equals x_2 - w_2 = 4 - (-1)

    def test_z_example(self, unit_family):
        for i, member in enumerate(unit_family.members[:5]):
            _, zz = entry_closed_forms(unit_family, i)
            n = member.n
            assert zz == -2 * n * n + 2 * n - 1

    def test_formal_n_zero(self, unit_family):
        # u at n = 0 degenerates to -z
        a, b, z = unit_family.a, unit_family.b, unit_family.z
        assert Fraction((4 * a * b - b) * 0) - z == -z


class TestBMatrix:
    def test_product_relation(self, unit_family, rng):
        g = unit_family.g.g
        for _ in range(30):
            i, j = rng.randrange(8), rng.randrange(8)
            mi, mj = unit_family.members[i], unit_family.members[j]
            ti, tj = rng.uniform(0.05, 0.95), rng.uniform(0.05, 0.95)
            pi = curve_point(g, mi.gamma, ti)
            pj = curve_point(g, mj.gamma, tj)
            product = pi.inverse() * pj
            mt_i = ModifiedTime.from_time(ti, float(mi.trace))
            mt_j = ModifiedTime.from_time(tj, float(mj.trace))
            vec = np.array([mt_i.a_lam * mt_j.a_lam, mt_i.lam * mt_j.a_lam,
                            mt_i.a_lam * mt_j.lam, mt_i.lam * mt_j.lam])
            b = np.array([[float(e) for e in row] for row in build_B(mi, mj)])
            got = b @ vec
            want = np.array([float(e) for e in product.entries()])
            assert np.max(np.abs(got - want)) < 1e-9

    def test_self_product_is_identity(self, unit_family):
        # i = j with equal times: the element times its own inverse
        m = unit_family.members[3]
        mt = ModifiedTime.from_time(0.4, float(m.trace))
        vec = np.array([mt.a_lam ** 2, mt.lam * mt.a_lam,
                        mt.a_lam * mt.lam, mt.lam ** 2])
        b = np.array([[float(e) for e in row] for row in build_B(m, m)])
        assert np.max(np.abs(b @ vec - np.array([1, 0, 0, 1]))) < 1e-9


class TestDetB:
    def test_diagonal_vanishes(self, unit_family):
        for i in (0, 3, 7):
            assert detB_closed(unit_family, i, i) == 0

    def test_matches_direct_determinant(self, unit_family):
        for i in range(6):
            for j in range(6):
                direct = det_exact([list(r) for r in
                                    build_B(unit_family.members[i], unit_family.members[j])])
                assert detB_closed(unit_family, i, j) == direct

    def test_leading_coefficient(self, unit_family):
        # 4th finite difference / 4! of n_j -> detB gives the n_j^4 coefficient
        poly = detB_poly(unit_family)
        ni = Fraction(unit_family.members[0].n)
        vals = [poly(Fraction(k), ni) for k in range(5)]
        lead = sum((-1) ** (4 - r) * math.comb(4, r) * vals[r] for r in range(5))
        lead /= 24
        a, b = unit_family.a, unit_family.b
        assert lead == -Fraction(a * a * b ** 4 * (2 - 4 * a) ** 2)


class TestObstruction:
    def test_small_example(self):
        # constant side 4, bound 2, and no solutions at or beyond it
        assert norm_square_obstruction(1, 2, 1) == 2
        sols = brute_obstruction_solutions(1, 2, 1)
        assert all(x < 2 for x, _ in sols)

    def test_lambda_one_excluded(self):
        with pytest.raises(ValueError):
            norm_square_obstruction(1, 1, 1)

    def test_enumerator_agrees_with_brute_force(self):
        for (k, l, y) in [(2, 3, 2), (1, 5, 3), (3, 7, 1)]:
            assert norm_square_solutions(k, l, y) == brute_obstruction_solutions(k, l, y)

    def test_bound_is_honest(self):
        for (k, l, y) in [(2, 3, 2), (1, 5, 3), (3, 7, 1), (4, 9, 2)]:
            bound = norm_square_obstruction(k, l, y)
            n = 4 * k * (l - k) * y * y
            for x in range(bound, bound + 50):
                t = n + k * k * x * x
                r = math.isqrt(t)
                assert r * r != t


class TestEmbed:
    def test_direct_placement(self):
        got = embed_sln(Mat2(1, 1, 0, 1), 3, 1)
        assert got == ((1, 1, 0), (0, 1, 0), (0, 0, 1))

    def test_identity(self):
        assert embed_sln(Mat2.identity(), 4, 2) == tuple(
            tuple(int(r == c) for c in range(4)) for r in range(4))

    def test_multiplicative(self, rng):
        for _ in range(100):
            g = random_gamma(rng, 30)
            h = random_gamma(rng, 30)
            n = rng.randint(2, 5)
            i = rng.randint(1, n - 1)
            a = np.array(embed_sln(g, n, i), dtype=object)
            b = np.array(embed_sln(h, n, i), dtype=object)
            want = np.array(embed_sln(g * h, n, i), dtype=object)
            assert (a @ b == want).all()

    def test_bad_index(self):
        with pytest.raises(ValueError):
            embed_sln(Mat2.identity(), 3, 3)

    def test_bad_det(self):
        with pytest.raises(ValueError):
            embed_sln(Mat2(2, 0, 0, 1), 3, 1)


class TestRefuter:
    def test_empty_candidate(self, unit_rep):
        cert = refute_blocking(unit_rep, BlockingCandidate((), 1e-3))
        assert cert.gamma_index == 1
        assert cert.t == 0.5
        assert cert.clearances == []

    def test_midpoint_candidate_forces_later_member(self, unit_rep, unit_family):
        mid = curve_point(unit_rep.g, unit_family.members[0].gamma, 0.5)
        cert = refute_blocking(unit_rep, BlockingCandidate((mid,), 1e-3))
        assert cert.gamma_index > 1
        assert min(cert.clearances) > 1e-3

    def test_ten_random_points(self, unit_rep, rng):
        from conftest import random_traceless
        from latblock.sl2 import exp_sl2
        pts = tuple(exp_sl2(random_traceless(rng, 1.0)) for _ in range(10))
        cert = refute_blocking(unit_rep, BlockingCandidate(pts, 1e-3), budget=100)
        assert min(cert.clearances) > 1e-3
        report = replay_certificate(cert)
        assert report["verified"]
        assert report["max_deviation"] <= 1e-12

    def test_endpoint_attestations(self, unit_rep, rng):
        from conftest import random_traceless
        from latblock.sl2 import exp_sl2
        pts = tuple(exp_sl2(random_traceless(rng, 1.0)) for _ in range(3))
        cert = refute_blocking(unit_rep, BlockingCandidate(pts, 1e-3))
        assert cert.attestations["endpoint_start_residual"] < 1e-9
        assert cert.attestations["endpoint_end_residual"] < 1e-9
        assert cert.attestations["det_gamma"] == "1"
        assert cert.attestations["gamma_in_lattice"] is True

    def test_budget_exhaustion(self, unit_rep, unit_family):
        mid = curve_point(unit_rep.g, unit_family.members[0].gamma, 0.5)
        with pytest.raises(BudgetExceeded) as exc:
            refute_blocking(unit_rep, BlockingCandidate((mid,), 1e-3), budget=1)
        assert exc.value.budget == 1
        assert exc.value.best_clearance >= 0

    def test_candidate_on_endpoint_rejected(self, unit_rep):
        with pytest.raises(ValueError, match="identity coset"):
            refute_blocking(unit_rep,
                            BlockingCandidate((Mat2.identity().to_float(),), 1e-3))

    def test_candidate_on_target_rejected(self, rng):
        # a target outside the lattice, so its coset differs from identity
        rep = coset_reduce(frac_mat(["1/2", 0, "1/3", 2]))
        gamma = random_gamma(rng, 20)
        pt = (rep.g * gamma).to_float()
        with pytest.raises(ValueError, match="target coset"):
            refute_blocking(rep, BlockingCandidate((pt,), 1e-3))

    def test_clearances_lower_bound_true_distance(self, unit_rep, rng):
        # stored clearances never exceed the canonical coset distance at
        # the distinguished time
        from conftest import random_traceless
        from latblock.sl2 import exp_sl2
        pts = tuple(exp_sl2(random_traceless(rng, 1.0)) for _ in range(4))
        cert = refute_blocking(unit_rep, BlockingCandidate(pts, 1e-3))
        from latblock.parsing import parse_matrix
        gamma = parse_matrix(cert.gamma["matrix"])
        pt = curve_point(unit_rep.g, gamma, cert.t)
        for p, clearance in zip(pts, cert.clearances):
            assert coset_distance(pt, p) > clearance or clearance <= 1e-3


class TestCandidateValidation:
    def test_too_many_points(self):
        pts = tuple(Mat2.identity().to_float() for _ in range(65))
        with pytest.raises(ValueError, match="at most"):
            BlockingCandidate(pts, 1e-3)

    def test_bad_determinant(self):
        with pytest.raises(ValueError, match="determinant"):
            BlockingCandidate((Mat2(1.2, 0.3, 0.5, 1.0),), 1e-3)

    def test_bad_epsilon(self):
        with pytest.raises(ValueError, match="positive"):
            BlockingCandidate((), 0.0)
