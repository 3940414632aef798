import math

import numpy as np
import pytest

from qhm import (
    GlueSpec,
    Verdict,
    ascent_oracle,
    classify,
    diameter,
    energy,
    glue,
    glued_invariant,
    glued_m_predict,
    interval_grid,
    invariant_measure,
    m_constant,
    measure,
    potential,
    random_metric,
    regular_polygon_arc,
    sequence_diagnostics,
    sequence_rows_csv,
    subspace,
    uniform,
    validate_metric,
    verify_maximal,
)
from qhm.errors import (
    ChainMismatchError,
    InconsistencyError,
    InvalidInputError,
    NotInvariantInputError,
)

from conftest import random_cloud


class TestInvariantMeasure:
    def test_uniform_three_block(self):
        y = validate_metric([[0, 2, 2], [2, 0, 2], [2, 2, 0]])
        solve = invariant_measure(y)
        assert solve.unique
        assert np.allclose(solve.measure.weights, 1.0 / 3.0, atol=1e-12)
        assert solve.value == pytest.approx(4.0 / 3.0)
        assert solve.residual <= 1e-12

    @pytest.mark.parametrize("d", [1.0, 2.0, 0.8])
    def test_two_point_half_diameter(self, d):
        x = validate_metric([[0, d], [d, 0]])
        solve = invariant_measure(x)
        assert np.allclose(solve.measure.weights, 0.5)
        assert solve.value == pytest.approx(d / 2.0)

    def test_circle_four_not_unique(self):
        solve = invariant_measure(regular_polygon_arc(4))
        assert solve.value == pytest.approx(math.pi / 2.0, abs=1e-12)
        assert not solve.unique
        assert solve.measure.mass == pytest.approx(1.0, abs=1e-12)

    def test_boundary_space_has_no_solution(self, five_point_boundary):
        assert invariant_measure(five_point_boundary) is None

    def test_nonqhm_space_still_solvable(self, five_point_nonqhm):
        # an invariant probability measure can exist without quasihypermetricity
        solve = invariant_measure(five_point_nonqhm)
        assert solve.value == pytest.approx(1.0)
        assert np.allclose(solve.measure.weights, [0.5, 0.5, 0, 0, 0], atol=1e-12)

    def test_single_point(self):
        solve = invariant_measure(validate_metric([[0.0]]))
        assert solve.value == 0.0
        assert solve.measure.weights[0] == pytest.approx(1.0)


class TestMConstant:
    def test_boundary_fixture_infinite_flat_kernel(self, five_point_boundary):
        dec = m_constant(five_point_boundary)
        assert dec.status == "infinite"
        assert dec.reason == "NonzeroFlatKernel"
        pot = potential(five_point_boundary, dec.witness)
        const = pot.mean()
        assert abs(const) > 1e-8
        assert np.abs(pot - const).max() <= 1e-10

    def test_nonqhm_fixture_infinite(self, five_point_nonqhm):
        dec = m_constant(five_point_nonqhm)
        assert dec.status == "infinite"
        assert dec.reason == "NotQuasihypermetric"
        assert energy(five_point_nonqhm, dec.witness) > 0

    @pytest.mark.parametrize("n", [2, 3, 5, 9])
    def test_interval_grids(self, n):
        dec = m_constant(interval_grid(0, 1, n))
        assert dec.finite
        assert dec.value == pytest.approx(0.5, abs=1e-12)
        w = dec.maximal_measure.weights
        assert w[0] == pytest.approx(0.5, abs=1e-9)
        assert w[-1] == pytest.approx(0.5, abs=1e-9)
        assert np.abs(w[1:-1]).max() <= 1e-9 if n > 2 else True

    @pytest.mark.parametrize("n", [2, 4, 6, 8, 16])
    def test_even_polygons(self, n):
        dec = m_constant(regular_polygon_arc(n))
        assert dec.finite
        assert dec.value == pytest.approx(math.pi / 2.0, abs=1e-9)

    def test_single_point(self):
        dec = m_constant(validate_metric([[0.0]]))
        assert dec.finite and dec.value == 0.0

    def test_diagnostics_present(self):
        dec = m_constant(interval_grid(0, 1, 4))
        assert "margin" in dec.diagnostics
        assert dec.diagnostics["flatness"] <= 1e-10


class TestGluedMPredict:
    def test_boundary_unequal_components_infinite(self):
        pred = glued_m_predict(0.5, 8.0 / 15.0, 31.0 / 60.0)
        assert pred.kind == "infinite"

    def test_finite_case_matches_direct_solve(self):
        pred = glued_m_predict(1.0, 1.0, 2.0)
        assert pred.kind == "finite"
        assert pred.value == pytest.approx(1.5)
        two = validate_metric([[0, 2], [2, 0]])
        z = glue(GlueSpec(two, two, 2.0))
        assert m_constant(z).value == pytest.approx(1.5, abs=1e-12)

    def test_two_singletons(self):
        pred = glued_m_predict(0.0, 0.0, 1.0)
        assert pred.kind == "finite"
        assert pred.value == pytest.approx(0.5)

    def test_boundary_equal_components(self):
        pred = glued_m_predict(0.75, 0.75, 0.75)
        assert pred.kind == "boundary"
        assert pred.value == 0.75

    def test_below_boundary_infinite(self):
        assert glued_m_predict(1.0, 1.0, 0.9).kind == "infinite"

    def test_divergence_experiment_operating_point(self):
        # component constant 1 against the distance-2 pair at c = 3/2
        pred = glued_m_predict(1.0, 1.0, 1.5)
        assert pred.kind == "finite"
        assert pred.value == pytest.approx(1.25)

    def test_invalid_inputs(self):
        with pytest.raises(InvalidInputError):
            glued_m_predict(-1.0, 0.5, 1.0)
        with pytest.raises(InvalidInputError):
            glued_m_predict(0.5, math.inf, 1.0)
        with pytest.raises(InvalidInputError):
            glued_m_predict(0.5, 0.5, 0.0)


class TestGluedInvariant:
    def test_boundary_fixture_combination(self):
        x = validate_metric([[0, 1], [1, 0]])
        y = validate_metric([[0, 0.8, 0.8], [0.8, 0, 0.8], [0.8, 0.8, 0]])
        mu1 = measure(x, [0.5, 0.5])
        mu2 = measure(y, [1/3, 1/3, 1/3])
        c = 31.0 / 60.0
        combined = glued_invariant(mu1, mu2, 0.5, 8.0 / 15.0, c)
        expected = np.array([0.5, 0.5, -1/3, -1/3, -1/3]) / 60.0
        assert np.allclose(combined.weights, expected, atol=1e-15)
        pot = potential(combined.space, combined)
        # value m_x m_y - c^2 = 4/15 - (31/60)^2 = -1/3600
        assert np.allclose(pot, -1.0 / 3600.0, atol=1e-12)
        assert combined.mass == pytest.approx(0.5 + 8.0 / 15.0 - 2 * c, abs=1e-12)

    def test_two_singletons(self):
        one_a = validate_metric([[0.0]], name="a")
        one_b = validate_metric([[0.0]], name="b")
        combined = glued_invariant(measure(one_a, [1.0]), measure(one_b, [1.0]),
                                   0.0, 0.0, 1.0)
        assert np.array_equal(combined.weights, [-1.0, -1.0])
        assert np.allclose(potential(combined.space, combined), -1.0)

    def test_equal_pair_blocks(self):
        two = validate_metric([[0, 2], [2, 0]])
        mu = measure(two, [0.5, 0.5])
        combined = glued_invariant(mu, mu, 1.0, 1.0, 2.0)
        assert combined.mass == pytest.approx(-2.0)
        pot = potential(combined.space, combined)
        assert np.allclose(pot, -3.0, atol=1e-12)
        normalized = measure(combined.space, combined.weights / combined.mass)
        assert np.allclose(potential(combined.space, normalized), 1.5)

    def test_rejects_non_invariant_input(self):
        x = interval_grid(0, 1, 3)
        with pytest.raises(NotInvariantInputError):
            glued_invariant(uniform(x), uniform(x), 0.5, 0.5, 1.0)

    def test_consistent_with_prediction_on_random_pairs(self):
        # three routes must agree: the combined measure's constant potential,
        # its normalization, and the closed-form glued constant
        rng = np.random.default_rng(77)
        done = 0
        while done < 10:
            x = random_cloud(rng)
            y = random_cloud(rng)
            dx = m_constant(x)
            dy = m_constant(y)
            c = (dx.value + dy.value) / 2.0 + float(rng.uniform(0.05, 0.8))
            if 2 * c < max(diameter(x), diameter(y)):
                continue
            combined = glued_invariant(dx.maximal_measure, dy.maximal_measure,
                                       dx.value, dy.value, c)
            pot = potential(combined.space, combined)
            const = dx.value * dy.value - c * c
            assert np.abs(pot - const).max() <= 1e-9
            assert combined.mass == pytest.approx(dx.value + dy.value - 2 * c,
                                                  abs=1e-12)
            normalized = measure(combined.space,
                                 combined.weights / combined.mass)
            pred = glued_m_predict(dx.value, dy.value, c)
            assert pred.kind == "finite"
            assert np.allclose(potential(combined.space, normalized),
                               pred.value, atol=1e-8)
            done += 1


class TestAscentOracle:
    def test_interval_converges_to_half(self):
        trace = ascent_oracle(interval_grid(0, 1, 5), iterations=100_000, seed=3)
        assert abs(trace.best_value - 0.5) <= 1e-6

    def test_boundary_fixture_blows_up(self, five_point_boundary):
        trace = ascent_oracle(five_point_boundary, iterations=500_000,
                              blowup=5.0, seed=0)
        assert trace.blown_up
        assert trace.best_value > 5.0

    def test_single_point(self):
        trace = ascent_oracle(validate_metric([[0.0]]), iterations=10)
        assert trace.best_value == 0.0
        assert trace.iterations_run == 0
        assert trace.status == "converged"

    def test_trace_is_monotone(self):
        trace = ascent_oracle(regular_polygon_arc(6), iterations=20_000, seed=1)
        assert (np.diff(trace.best_values) >= 0).all()
        assert trace.iterations[0] == 0

    def test_deterministic_given_seed(self):
        a = ascent_oracle(random_metric(5, 2), iterations=5_000, seed=9)
        b = ascent_oracle(random_metric(5, 2), iterations=5_000, seed=9)
        assert a.best_value == b.best_value
        assert np.array_equal(a.best_measure.weights, b.best_measure.weights)


class TestVerifyMaximal:
    def test_interval_endpoint_measure(self):
        x = interval_grid(0, 1, 3)
        report = verify_maximal(x, measure(x, [0.5, 0.0, 0.5]), 0.5,
                                trials=500, seed=4)
        assert report.flatness <= 1e-15
        assert report.dominance_violations == 0
        assert report.norm_squared == pytest.approx(1.0, abs=1e-12)

    def test_uniform_is_not_maximal_on_interval(self):
        x = interval_grid(0, 1, 3)
        report = verify_maximal(x, uniform(x), 0.5, trials=10, seed=0)
        assert report.flatness == pytest.approx(1.0 / 6.0)

    def test_single_point_atom(self):
        x = validate_metric([[0.0]])
        report = verify_maximal(x, measure(x, [1.0]), 0.0, trials=50)
        assert report.flatness == 0.0
        assert report.dominance_violations == 0
        assert report.norm_squared == pytest.approx(1.0)

    def test_mass_precondition(self):
        x = interval_grid(0, 1, 3)
        with pytest.raises(InvalidInputError):
            verify_maximal(x, measure(x, [1.0, 1.0, 1.0]), 0.5)


class TestSequenceDiagnostics:
    def test_interval_chain_is_stationary(self):
        sizes = [2, 3, 5, 9]
        full = interval_grid(0, 1, 9)
        chains = [[k * (8 // (n - 1)) for k in range(n)] for n in sizes]
        measures = []
        for n in sizes:
            w = np.zeros(n)
            w[0] = w[-1] = 0.5
            measures.append(w)
        rows = sequence_diagnostics(full, chains, measures)
        assert [r.n_k for r in rows] == sizes
        for r in rows:
            assert r.i_mu == pytest.approx(0.5, abs=1e-12)
            assert r.flatness <= 1e-12
            if r.k > 0:
                assert r.seminorm_step <= 1e-6
        assert rows[0].seminorm_step is None

    def test_single_element_chain(self):
        x = interval_grid(0, 1, 3)
        rows = sequence_diagnostics(x, [[0, 1, 2]], [[0.5, 0.0, 0.5]])
        assert len(rows) == 1
        assert rows[0].seminorm_step is None

    def test_chain_mismatch_not_nested(self):
        x = interval_grid(0, 1, 5)
        with pytest.raises(ChainMismatchError):
            sequence_diagnostics(x, [[0, 1], [2, 3, 4]],
                                 [[0.5, 0.5], [0.5, 0.0, 0.5]])

    def test_chain_mismatch_bad_mass(self):
        x = interval_grid(0, 1, 3)
        with pytest.raises(ChainMismatchError):
            sequence_diagnostics(x, [[0, 2]], [[0.5, 0.6]])

    def test_chain_mismatch_wrong_length(self):
        x = interval_grid(0, 1, 3)
        with pytest.raises(ChainMismatchError):
            sequence_diagnostics(x, [[0, 2]], [[1.0]])

    def test_csv_rendering(self):
        x = interval_grid(0, 1, 3)
        rows = sequence_diagnostics(x, [[0, 2], [0, 1, 2]],
                                    [[0.5, 0.5], [0.5, 0.0, 0.5]])
        text = sequence_rows_csv(rows)
        lines = text.strip().split("\n")
        assert lines[0] == "k,n_k,i_mu,flatness,seminorm_step"
        assert lines[1].startswith("0,2,0.5,")
        assert lines[1].endswith(",")  # first row has no step
        assert len(lines) == 3


class TestInconsistencyGuard:
    def test_missing_solution_on_finite_path_raises(self, monkeypatch):
        import qhm.msolver as msolver

        monkeypatch.setattr(msolver, "invariant_measure",
                            lambda space, tol=1e-9: None)
        with pytest.raises(InconsistencyError) as exc:
            msolver.m_constant(interval_grid(0, 1, 3))
        assert "margin" in exc.value.diagnostics


class TestSolverProperties:
    def test_subset_monotonicity(self):
        rng = np.random.default_rng(17)
        for _ in range(25):
            x = random_cloud(rng, n_min=4, n_max=8)
            dec = m_constant(x)
            k = int(rng.integers(2, x.n))
            idx = sorted(rng.choice(x.n, size=k, replace=False).tolist())
            sub_dec = m_constant(subspace(x, idx))
            assert sub_dec.value <= dec.value + 1e-9

    def test_glue_consistency_random_clouds(self):
        rng = np.random.default_rng(99)
        done = 0
        while done < 10:
            x = random_cloud(rng)
            y = random_cloud(rng)
            m_x = m_constant(x).value
            m_y = m_constant(y).value
            c = (m_x + m_y) / 2.0 + rng.uniform(0.05, 1.0)
            if 2 * c < max(diameter(x), diameter(y)):
                continue
            z = glue(GlueSpec(x, y, c))
            direct = m_constant(z).value
            pred = glued_m_predict(m_x, m_y, c)
            assert pred.kind == "finite"
            assert direct == pytest.approx(pred.value, rel=1e-7)
            done += 1

    def test_unique_iff_strict_on_samples(self):
        rng = np.random.default_rng(5)
        for _ in range(20):
            x = random_cloud(rng)
            if classify(x).verdict is Verdict.STRICT:
                assert invariant_measure(x).unique

    def test_maximal_measure_verifies(self):
        rng = np.random.default_rng(55)
        for _ in range(10):
            x = random_cloud(rng)
            dec = m_constant(x)
            report = verify_maximal(x, dec.maximal_measure, dec.value,
                                    trials=1000, seed=7)
            assert report.flatness <= 1e-8 * (1 + dec.value)
            assert report.dominance_violations == 0
            assert report.norm_squared == pytest.approx(1.0, abs=1e-8)

    def test_oracle_agreement_small(self):
        rng = np.random.default_rng(41)
        for _ in range(5):
            x = random_cloud(rng)
            dec = m_constant(x)
            trace = ascent_oracle(x, iterations=100_000, seed=11)
            assert dec.value - 1e-4 <= trace.best_value <= dec.value + 1e-9

    @pytest.mark.parametrize("lam", [0.01, 3.7])
    def test_scaling_covariance(self, lam):
        rng = np.random.default_rng(13)
        for _ in range(10):
            x = random_cloud(rng)
            dec = m_constant(x)
            scaled = validate_metric(x.dist * lam)
            dec_scaled = m_constant(scaled)
            assert dec_scaled.value == pytest.approx(lam * dec.value, rel=1e-9)
            assert np.abs(dec_scaled.maximal_measure.weights
                          - dec.maximal_measure.weights).max() <= 1e-9
