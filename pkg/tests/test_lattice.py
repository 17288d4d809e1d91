import math
from fractions import Fraction

import pytest

from conftest import (brute_coset_distance, frac_mat, random_gamma,
                      random_hyperbolic, unimodular_box)
from latblock.lattice import (CosetRep, SpanSolver, canonical_rep, coset_distance,
                              coset_reduce, dependence_projects_to_times,
                              five_dependence, is_in_gamma, same_coset,
                              span_multiplier, subsequence_nonzero)
from latblock.sl2 import Mat2, curve_point


class TestMembership:
    def test_identity(self):
        assert is_in_gamma(Mat2.identity())

    def test_non_integer(self):
        assert not is_in_gamma(Mat2(Fraction(2), 0, 0, Fraction(1, 2)))

    def test_tolerance_mode(self):
        m = Mat2(1.0, 1.0 + 1e-12, 0.0, 1.0)
        assert is_in_gamma(m, eps=1e-9)
        assert not is_in_gamma(Mat2(1.0, 1.5, 0.0, 1.0), eps=1e-9)

    def test_det_must_be_one(self):
        assert not is_in_gamma(Mat2(1, 0, 0, -1))

    def test_same_coset(self, rng):
        g = frac_mat(["1/2", "1/3", "3/2", "3"])
        assert g.det() == 1
        for _ in range(20):
            gamma = random_gamma(rng, 30)
            assert same_coset(g, g * gamma)
        assert not same_coset(g, g * Mat2(Fraction(2), 0, 0, Fraction(1, 2)))

    def test_family_members_in_distinct_cosets(self, rng):
        from latblock.evade import gen_family
        rep = coset_reduce(frac_mat([1, 0, 1, 1]))
        family = gen_family(rep, 4)
        t = 0.37
        for i in range(3):
            p = curve_point(rep.g, family.members[i].gamma, t)
            q = curve_point(rep.g, family.members[i + 1].gamma, t)
            assert not same_coset(p, q, eps=1e-6)


class TestCosetReduce:
    def test_worked_example(self):
        rep = coset_reduce(frac_mat([1, 2, 1, 3]))
        assert rep.g.entries() == (1, 0, 2, 1)
        assert is_in_gamma(rep.gamma)

    def test_passthrough(self):
        g = Mat2(Fraction(2), Fraction(0), Fraction(5), Fraction(1, 2))
        rep = coset_reduce(g)
        assert rep.g.entries() == g.entries()
        assert rep.gamma.entries() == (1, 0, 0, 1)

    def test_sign_normalization(self):
        rep = coset_reduce(frac_mat([-1, 0, -2, -1]))
        assert rep.g.entries() == (1, 0, 2, 1)

    def test_random_inputs(self, rng):
        for _ in range(1000):
            gamma = random_gamma(rng, 40)
            s = Fraction(rng.randint(1, 9), rng.randint(1, 9))
            z = Fraction(rng.randint(-9, 9), rng.randint(1, 9))
            g = Mat2(s, Fraction(0), z, 1 / s) * gamma
            assert g.det() == 1
            rep = coset_reduce(g)
            assert rep.g.y == 0
            assert rep.x > 0
            assert rep.g.det() == 1
            assert is_in_gamma(g.inverse() * rep.g)

    def test_rejects_bad_det(self):
        with pytest.raises(ValueError):
            coset_reduce(frac_mat([2, 0, 0, 2]))


class TestCanonicalRep:
    def test_identity(self):
        got = canonical_rep(Mat2.identity())
        assert got.fro_dist(Mat2.identity()) < 1e-12

    def test_reduction_of_lattice_translates(self, rng):
        ident = Mat2.identity().to_float()
        for _ in range(200):
            gamma = random_gamma(rng, 50)
            got = canonical_rep(gamma.to_float())
            assert got.fro_dist(ident) < 1e-9

    def test_idempotent(self, rng):
        for _ in range(50):
            g = random_hyperbolic(rng)
            once = canonical_rep(g)
            twice = canonical_rep(once)
            assert once.fro_dist(twice) < 1e-9

    def test_right_invariance(self, rng):
        for _ in range(100):
            g = random_hyperbolic(rng)
            gamma = random_gamma(rng, 1000)
            assert canonical_rep(g * gamma.to_float()).fro_dist(canonical_rep(g)) < 1e-9

    def test_rejects_bad_det(self):
        with pytest.raises(ValueError):
            canonical_rep(Mat2(2.0, 0.0, 0.0, 2.0))


class TestCosetDistance:
    def test_zero_on_same_point(self, rng):
        g = random_hyperbolic(rng)
        assert coset_distance(g, g) < 1e-12

    def test_right_invariance(self, rng):
        for _ in range(50):
            g = random_hyperbolic(rng)
            gamma = random_gamma(rng, 100)
            assert coset_distance(g, g * gamma.to_float()) < 1e-9

    def test_brute_force_example(self):
        box = unimodular_box(20)
        p = Mat2.identity().to_float()
        q = Mat2(math.e, 0.0, 0.0, 1.0 / math.e)
        want = brute_coset_distance(p, q, box)
        got = coset_distance(p, q)
        assert got > 0
        assert abs(got - want) < 1e-9

    def test_symmetry(self, rng):
        for _ in range(50):
            p = random_hyperbolic(rng)
            q = random_hyperbolic(rng)
            assert abs(coset_distance(p, q) - coset_distance(q, p)) < 1e-9

    def test_triangle_near_base_points(self, rng):
        # the chordal distance obeys the triangle inequality to second
        # order, so nearby triples must satisfy it within 1e-6
        from conftest import random_traceless
        from latblock.sl2 import exp_sl2
        for _ in range(50):
            base = random_hyperbolic(rng)
            p, q, r = (base * exp_sl2(random_traceless(rng, 2e-4))
                       for _ in range(3))
            assert coset_distance(p, r) <= (coset_distance(p, q)
                                            + coset_distance(q, r) + 1e-6)


class TestFiveDependence:
    def test_unipotent_powers(self):
        e = Mat2(1, 1, 0, 1)
        elems = [Mat2.identity(), e, e * e, e * e * e, e * e * e * e]
        witness = five_dependence(elems)
        assert witness.coefficients == (1, -2, 1, 0, 0)

    def test_repeated_elements(self, rng):
        g1, g2, g3 = (random_gamma(rng, 20) for _ in range(3))
        witness = five_dependence([Mat2.identity(), Mat2.identity(), g1, g2, g3])
        assert witness.coefficients == (1, -1, 0, 0, 0)

    def test_random_gamma_tuples(self, rng):
        for _ in range(100):
            elems = [random_gamma(rng, 50) for _ in range(5)]
            witness = five_dependence(elems)
            assert any(witness.coefficients)
            assert witness.residual().entries() == (0, 0, 0, 0)

    def test_rational_coset_tuples(self, rng):
        g = frac_mat(["1/2", "1/3", "3/2", "3"])
        for _ in range(50):
            elems = [g * random_gamma(rng, 50) for _ in range(5)]
            witness = five_dependence(elems)
            assert witness.residual().entries() == (0, 0, 0, 0)


class TestSpanMultiplier:
    def test_identity_basis(self):
        solver = span_multiplier([Mat2.identity()])
        assert solver.m0 == 1
        assert solver.solve(Mat2.identity()) == (1,)

    def test_basis_recovery(self, rng):
        basis = [Mat2.identity(), Mat2(1, 1, 0, 1)]
        solver = span_multiplier(basis)
        assert solver.solve(basis[0]) == (solver.m0, 0)

    def test_random_span_elements(self, rng):
        # integer span elements (the lattice side): coefficients must
        # come out integral and re-multiply exactly
        basis = [Mat2.identity(), Mat2(1, 1, 0, 1), Mat2(1, 0, 1, 1)]
        solver = span_multiplier(basis)
        for _ in range(20):
            coeffs = [rng.randint(-9, 9) for _ in basis]
            g = Mat2.zero()
            for c, b in zip(coeffs, basis):
                g = g + c * b
            m = solver.solve(g)
            acc = Mat2.zero()
            for mi, b in zip(m, basis):
                acc = acc + mi * b
            assert acc.entries() == tuple(solver.m0 * e for e in g.entries())

    def test_scaled_lattice_denominators(self):
        # a basis with rational entries forces a nontrivial multiplier
        half = Fraction(1, 2)
        basis = [Mat2(half, 0, 0, half), Mat2(half, half, 0, half)]
        solver = span_multiplier(basis)
        assert solver.m0 != 0
        assert solver.solve(basis[1]) == (0, solver.m0)

    def test_rejects_dependent(self):
        with pytest.raises(ValueError):
            SpanSolver([Mat2.identity(), 2 * Mat2.identity()])

    def test_rejects_outside_span(self):
        solver = span_multiplier([Mat2.identity()])
        with pytest.raises(ValueError):
            solver.solve(Mat2(1, 1, 0, 1))


class TestTimesProjection:
    def test_vacuous(self):
        report = dependence_projects_to_times([0], [0.5], [1.2], [Fraction(1)])
        assert report.ok()

    def test_dependent_duplicates(self):
        import math as _m

        from latblock.evade import gen_family
        from latblock.sl2 import ModifiedTime, time_from_lambda
        rep = coset_reduce(frac_mat([1, 0, 1, 1]))
        fam = gen_family(rep, 2)
        lam = 0.3
        lams, als, ys = [], [], []
        for member in (fam.members[0], fam.members[0], fam.members[1]):
            tr = float(member.trace)
            t = time_from_lambda(lam, _m.acosh(tr / 2))
            mt = ModifiedTime.from_time(t, tr)
            lams.append(mt.lam)
            als.append(mt.a_lam)
            ys.append(member.g_gamma.y)
        report = dependence_projects_to_times([1, -1, 0], lams, als, ys)
        assert report.ok(1e-9)

    def test_corrupted_coefficient_flagged(self):
        report = dependence_projects_to_times([1, -1, 1], [0.4, 0.4, 0.4],
                                              [1.1, 1.1, 1.1], [1, 1, 1])
        assert not report.ok(1e-9)
        assert report.lambda_residual > 1e-3

    def test_precondition(self):
        with pytest.raises(ValueError):
            dependence_projects_to_times([1, 1], [0.1, 0.2], [1.0, 1.1],
                                         [Fraction(1), Fraction(2)])


class TestSubsequence:
    def test_never_zero(self):
        f = subsequence_nonzero(lambda x, y: x, list(range(1, 30)), 10)
        assert f == list(range(10))

    def test_skips_duplicates(self):
        f = subsequence_nonzero(lambda x, y: x - y, [1, 1, 2, 3], 3)
        assert f == [0, 2, 3]

    def test_exhaustion(self):
        with pytest.raises(ValueError):
            subsequence_nonzero(lambda x, y: x - y, [1, 1, 1], 2)

    def test_detb_polynomial(self):
        from latblock.evade import detB_poly, gen_family
        rep = coset_reduce(frac_mat([1, 0, 1, 1]))
        fam = gen_family(rep, 60)
        poly = detB_poly(fam)
        ns = [m.n for m in fam.members]
        picked = subsequence_nonzero(poly, ns, 10)
        assert len(picked) == 10
        for ai in picked:
            for bj in picked:
                if ai != bj:
                    assert poly(ns[ai], ns[bj]) != 0
