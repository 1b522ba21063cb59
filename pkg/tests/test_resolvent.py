"""Resolvent applications, approximating forms, coefficient tables."""

import numpy as np
import pytest

from graphforms import (
    ResolventHandle,
    SolverError,
    assemble,
    build_generator,
    default_alpha_ladder,
    make_path,
    single_vertex,
    truncated_coefficients,
    truncated_form_via_resolvent,
)
from graphforms.corpus import form_corpus, random_cutoff, zero_killing


def single_vertex_handle(**kw):
    return ResolventHandle(assemble(single_vertex(2.0, 3.0)), **kw)


class TestResolventApply:
    def test_single_vertex_scalar(self):
        # L = c/m = 1.5, so G_1 f = f / 2.5
        h = single_vertex_handle()
        assert h.apply(1.0, np.ones(1))[0] == pytest.approx(0.4, abs=1e-14)

    def test_zero_input(self):
        h = single_vertex_handle()
        assert np.all(h.apply(3.0, np.zeros(1)) == 0.0)

    def test_against_dense_inverse(self):
        # path with unit ordered-pair weight: K = [[1,-1],[-1,1]], m = 1
        q = assemble(make_path(2, 1.0))
        h = ResolventHandle(q)
        K = np.array([[1.0, -1.0], [-1.0, 1.0]])
        for alpha in (0.5, 1.0, 4.0):
            expect = np.linalg.solve(K + alpha * np.eye(2), np.array([1.0, -2.0]))
            got = h.apply(alpha, np.array([1.0, -2.0]))
            np.testing.assert_allclose(got, expect, atol=1e-12)

    def test_cg_matches_dense_on_corpus(self):
        rng = np.random.default_rng(0)
        for q, _ in form_corpus(21, 4, n_max=40):
            h_cg = ResolventHandle(q, method="cg")
            h_dn = ResolventHandle(q, method="dense")
            f = rng.uniform(-1, 1, h_cg.dim)
            for alpha in (0.7, 13.0):
                np.testing.assert_allclose(
                    h_cg.apply(alpha, f), h_dn.apply(alpha, f), atol=1e-9, rtol=1e-9
                )

    def test_alpha_must_be_positive(self):
        with pytest.raises(ValueError):
            single_vertex_handle().apply(0.0, np.ones(1))

    def test_nonconvergence_reported(self):
        h = ResolventHandle(assemble(make_path(8, 1.0)), maxiter_factor=0)
        with pytest.raises(SolverError) as exc:
            h.apply(1.0, np.ones(8))
        assert exc.value.achieved_residual > 0


class TestGeneratorOperator:
    def test_energy_matches_form(self):
        rng = np.random.default_rng(1)
        for q, _ in form_corpus(22, 3, n_max=20):
            gen = build_generator(q)
            idx = gen.active_index
            f = np.zeros(q.n)
            g = np.zeros(q.n)
            f[idx] = rng.uniform(-1, 1, gen.dim)
            g[idx] = rng.uniform(-1, 1, gen.dim)
            assert gen.energy(f[idx], g[idx]) == pytest.approx(q.bilinear(f, g), rel=1e-10, abs=1e-10)

    def test_symmetry_and_psd(self):
        rng = np.random.default_rng(2)
        q, _ = form_corpus(23, 1, n_max=20)[0]
        gen = build_generator(q)
        for _ in range(10):
            f = rng.uniform(-1, 1, gen.dim)
            g = rng.uniform(-1, 1, gen.dim)
            lf, lg = gen.apply(f), gen.apply(g)
            a = float(np.sum(gen.mass * lf * g))
            b = float(np.sum(gen.mass * f * lg))
            assert a == pytest.approx(b, rel=1e-12, abs=1e-12)
            assert float(np.sum(gen.mass * lf * f)) >= -1e-12


class TestSubMarkov:
    def test_alpha_resolvent_of_one(self):
        for q, _ in form_corpus(24, 3, n_max=25):
            h = ResolventHandle(q)
            ones = np.ones(h.dim)
            for alpha in (0.5, 1.0, 100.0):
                u = alpha * h.apply(alpha, ones)
                assert float(u.min()) >= -1e-10
                assert float(u.max()) <= 1.0 + 1e-10

    def test_positivity_preserving(self):
        rng = np.random.default_rng(3)
        for q, _ in form_corpus(25, 3, n_max=25):
            h = ResolventHandle(q)
            f = rng.uniform(0, 2, h.dim)
            for alpha in (0.5, 5.0):
                assert float(h.apply(alpha, f).min()) >= -1e-10


class TestApproximatingForm:
    def test_single_vertex_values(self):
        h = single_vertex_handle()
        assert h.approximating_form(1.0, np.ones(1)) == pytest.approx(1.2, abs=1e-13)
        assert h.approximating_form(1.0, np.zeros(1)) == 0.0

    def test_large_alpha_limit(self):
        # alpha E^(alpha)(1) = 3 / (1 + 1.5/alpha) -> Q(1) = 3
        h = single_vertex_handle()
        alpha = 1e6
        assert alpha * h.approximating_form(alpha, np.ones(1)) == pytest.approx(3.0, abs=1e-5)

    def test_monotone_ladder_converges_to_energy(self):
        rng = np.random.default_rng(4)
        for q, _ in form_corpus(26, 3, n_max=12):
            h = ResolventHandle(q, method="dense")
            idx = h.generator.active_index
            f_full = np.zeros(q.n)
            f_full[idx] = rng.uniform(-2, 2, h.dim)
            vals = [a * h.approximating_form(a, f_full[idx]) for a in default_alpha_ladder(h)]
            for a, b in zip(vals, vals[1:]):
                assert b >= a - 1e-10 * max(1.0, abs(a))
            assert vals[-1] == pytest.approx(q.evaluate(f_full), rel=1e-6)

    def test_nonnegative(self):
        rng = np.random.default_rng(5)
        q, _ = form_corpus(27, 1, n_max=15)[0]
        h = ResolventHandle(q)
        for _ in range(5):
            f = rng.uniform(-2, 2, h.dim)
            assert h.approximating_form(2.0, f) >= -1e-12

    def test_resolvent_identity(self):
        q, _ = form_corpus(28, 1, n_max=12)[0]
        h = ResolventHandle(q, method="dense")
        for alpha, beta in ((0.5, 2.0), (1.0, 10.0)):
            Ga, Gb = h.resolvent_matrix(alpha), h.resolvent_matrix(beta)
            np.testing.assert_allclose(Ga - Gb, (beta - alpha) * (Ga @ Gb), atol=1e-8)


class TestTruncatedCoefficients:
    def test_full_cutoff_no_killing_no_rest(self):
        # phi = 1, singleton partition covering all active vertices of a
        # killing-free graph: every c_i and c_i_phi vanishes.
        q = assemble(make_path(4, 1.0))
        h = ResolventHandle(q, method="dense")
        table = truncated_coefficients(
            h, 1.0, np.ones(4), [[f"v{i}"] for i in range(4)]
        )
        np.testing.assert_allclose(table.c, 0.0, atol=1e-12)
        np.testing.assert_allclose(table.c_phi, 0.0, atol=1e-12)
        np.testing.assert_allclose(table.b, table.b_phi, atol=1e-12)

    def test_zero_cutoff(self):
        q = assemble(make_path(3, 1.0))
        h = ResolventHandle(q, method="dense")
        table = truncated_coefficients(h, 1.0, np.zeros(3), [["v0"], ["v1"]])
        np.testing.assert_allclose(table.b_phi, 0.0, atol=1e-15)
        np.testing.assert_allclose(table.c_phi, 0.0, atol=1e-15)

    def test_two_routes_agree(self):
        # coefficient through the CG path vs the dense matrix route
        q = assemble(make_path(2, 1.0))
        h_cg = ResolventHandle(q, method="cg")
        h_dn = ResolventHandle(q, method="dense")
        part = [["v0"], ["v1"]]
        t1 = truncated_coefficients(h_cg, 1.0, np.ones(2), part)
        t2 = truncated_coefficients(h_dn, 1.0, np.ones(2), part)
        assert t1.b[0, 1] == pytest.approx(t2.b[0, 1], abs=1e-10)
        assert t1.b[0, 1] == pytest.approx(t1.b_phi[0, 1], abs=1e-14)

    def test_bounds_and_reconstruction(self):
        rng = np.random.default_rng(6)
        for q, _ in form_corpus(29, 3, n_max=12):
            h = ResolventHandle(q, method="dense")
            act = h.generator.active_index
            k = min(3, len(act))
            chosen = rng.choice(act, size=k, replace=False)
            phi = random_cutoff(rng, q)
            table = truncated_coefficients(h, 2.0, phi, [[int(v)] for v in chosen])
            assert (table.b_phi >= -1e-10).all() and (table.b_phi <= table.b + 1e-10).all()
            assert (table.c_phi >= -1e-10).all() and (table.c_phi <= table.c + 1e-10).all()
            values = rng.uniform(-2, 2, k)
            f = np.zeros(h.dim)
            pos = {v: i for i, v in enumerate(act)}
            for val, v in zip(values, chosen):
                f[pos[int(v)]] = val
            assert table.reconstruct(values) == pytest.approx(
                h.approximating_form(2.0, f), abs=1e-10
            )

    def test_overlapping_partition_rejected(self):
        q = assemble(make_path(3, 1.0))
        h = ResolventHandle(q)
        with pytest.raises(ValueError, match="disjoint"):
            truncated_coefficients(h, 1.0, np.ones(3), [["v0", "v1"], ["v1"]])


class TestLadder:
    def test_full_cutoff_recovers_energy(self):
        rng = np.random.default_rng(7)
        q, _ = form_corpus(30, 1, n_max=10)[0]
        # strip the mask and killing: phi = 1 is then admissible
        q0 = assemble(zero_killing(q.graph))
        h = ResolventHandle(q0, method="dense")
        f = rng.uniform(-2, 2, q0.n)
        res = truncated_form_via_resolvent(h, np.ones(q0.n), f)
        assert res.limit == pytest.approx(q0.evaluate(f), rel=1e-6)
        assert res.converged

    def test_pure_killing_has_zero_truncation(self):
        q = assemble(single_vertex(2.0, 3.0))
        h = ResolventHandle(q, method="dense")
        res = truncated_form_via_resolvent(h, np.ones(1), np.array([1.7]))
        assert all(abs(v) <= 1e-10 for v in res.values)

    def test_zero_function(self):
        q = assemble(make_path(3, 1.0))
        h = ResolventHandle(q, method="dense")
        res = truncated_form_via_resolvent(h, np.ones(3), np.zeros(3))
        assert all(v == 0.0 for v in res.values)
