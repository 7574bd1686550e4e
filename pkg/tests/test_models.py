import json

import numpy as np
import pytest
from hypothesis import given, settings as hyp_settings
from hypothesis import strategies as st

from leggettsim import sphere
from leggettsim.models import (
    Coupling,
    LeggettModel,
    OutcomePair,
    SettingsPair,
    SubensembleDistribution,
    conditional_marginals,
    exact_model_correlation,
    exact_model_marginals,
    isotropic_product,
    joint_conditional_law,
    mirrored,
    point_mass,
    sample_outcome_arrays,
    sample_outcomes,
)

X = np.array([1.0, 0.0, 0.0])
Y = np.array([0.0, 1.0, 0.0])
Z = np.array([0.0, 0.0, 1.0])

OUTCOME_VALUES = [(1, 1), (1, -1), (-1, 1), (-1, -1)]


def law_correlation(pa, pb, coupling):
    """Oracle: E(AB) by exhaustive enumeration of the four-outcome law."""
    law = joint_conditional_law(pa, pb, coupling)
    return sum(p * a * b for p, (a, b) in zip(law, OUTCOME_VALUES))


class TestSettingsAndOutcomes:
    def test_settings_require_unit_vectors(self):
        with pytest.raises(ValueError):
            SettingsPair(np.array([2.0, 0.0, 0.0]), Y)

    def test_outcomes_restricted(self):
        with pytest.raises(ValueError):
            OutcomePair(0, 1)


class TestSubensembleDistribution:
    def test_weights_must_sum_to_one(self):
        with pytest.raises(ValueError):
            SubensembleDistribution(np.array([X]), np.array([Y]), [0.9])

    def test_negative_weight_rejected(self):
        with pytest.raises(ValueError):
            SubensembleDistribution(np.array([X, Y]), np.array([X, Y]), [1.5, -0.5])

    def test_zero_weight_atoms_pruned(self):
        d = SubensembleDistribution(np.array([X, Y]), np.array([X, Y]), [1.0, 0.0])
        assert d.n_atoms == 1

    def test_arrays_immutable(self, rng):
        d = isotropic_product(10, rng)
        with pytest.raises(ValueError):
            d.w[0] = 0.5

    def test_empty_rejected(self):
        with pytest.raises(ValueError):
            SubensembleDistribution(np.empty((0, 3)), np.empty((0, 3)), [])


class TestConditionalMarginals:
    def test_orthogonal(self):
        pa, pb = conditional_marginals(X, X, SettingsPair(Y, Y))
        assert pa == 0.5 and pb == 0.5

    def test_aligned(self):
        pa, _ = conditional_marginals(X, Y, SettingsPair(X, Y))
        assert pa == 1.0

    def test_direct_formula(self):
        u = sphere.unit_vector(0.6, 0.8, 0.0)
        pa, _ = conditional_marginals(u, Z, SettingsPair(X, Z))
        assert pa == pytest.approx(0.8, abs=1e-12)


class TestJointConditionalLaw:
    def test_degenerate_marginals(self):
        for coupling in Coupling:
            law = joint_conditional_law(1.0, 1.0, coupling)
            assert law[0] == 1.0 and np.all(law[1:] == 0.0)

    def test_independent_uniform(self):
        law = joint_conditional_law(0.5, 0.5, Coupling.INDEPENDENT)
        assert np.allclose(law, 0.25)

    def test_comonotone_uniform(self):
        # min-coupling: all mass on the diagonal
        law = joint_conditional_law(0.5, 0.5, Coupling.COMONOTONE)
        assert np.allclose(law, [0.5, 0.0, 0.0, 0.5])

    def test_out_of_range_rejected(self):
        with pytest.raises(ValueError):
            joint_conditional_law(1.2, 0.5, Coupling.INDEPENDENT)

    @hyp_settings(max_examples=200, deadline=None)
    @given(
        pa=st.floats(0.0, 1.0),
        pb=st.floats(0.0, 1.0),
        coupling=st.sampled_from(list(Coupling)),
    )
    def test_is_probability_law_with_exact_marginals(self, pa, pb, coupling):
        law = joint_conditional_law(pa, pb, coupling)
        assert np.all(law >= 0.0)
        assert sum(law) == pytest.approx(1.0, abs=1e-12)
        assert law[0] + law[1] == pytest.approx(pa, abs=1e-12)
        assert law[0] + law[2] == pytest.approx(pb, abs=1e-12)

    def test_marginal_exactness_random_configurations(self, rng):
        for _ in range(1000):
            u, v, a, b = sphere.random_unit_vectors(rng, 4)
            coupling = list(Coupling)[int(rng.integers(3))]
            pa, pb = conditional_marginals(u, v, SettingsPair(a, b))
            law = joint_conditional_law(pa, pb, coupling)
            assert abs((law[0] + law[1]) - pa) <= 1e-12
            assert abs((law[0] + law[2]) - pb) <= 1e-12


class TestSampling:
    def test_point_mass_degenerate(self, rng):
        model = LeggettModel(point_mass(X, Y), Coupling.INDEPENDENT)
        s = SettingsPair(X, Y)
        for _ in range(50):
            o = sample_outcomes(model, s, rng)
            assert (o.A, o.B) == (1, 1)

    def test_point_mass_antialigned(self, rng):
        model = LeggettModel(point_mass(-X, Y), Coupling.INDEPENDENT)
        a, _ = sample_outcome_arrays(model, SettingsPair(X, Y), 200, rng)
        assert np.all(a == -1.0)

    def test_isotropic_mean_near_zero(self):
        model = LeggettModel(isotropic_product(1000, sphere.make_rng(11, 0)), Coupling.INDEPENDENT)
        s = SettingsPair(X, Y)
        a, _ = sample_outcome_arrays(model, s, 100_000, sphere.make_rng(11, 1))
        exact_a, _ = exact_model_marginals(model, s)
        se = 1.0 / np.sqrt(100_000)
        assert abs(a.mean() - exact_a) <= 4 * se

    def test_invalid_count(self, rng):
        model = LeggettModel(point_mass(X, Y), Coupling.INDEPENDENT)
        with pytest.raises(ValueError):
            sample_outcome_arrays(model, SettingsPair(X, Y), 0, rng)


class TestExactCorrelation:
    def test_point_mass_aligned(self):
        model = LeggettModel(point_mass(X, Y), Coupling.INDEPENDENT)
        assert exact_model_correlation(model, SettingsPair(X, Y)) == 1.0

    def test_two_atom_symmetry(self):
        d = SubensembleDistribution(np.array([X, -X]), np.array([Y, Y]), [0.5, 0.5])
        model = LeggettModel(d, Coupling.INDEPENDENT)
        assert exact_model_correlation(model, SettingsPair(X, Y)) == 0.0

    def test_product_formula(self):
        # dots (0.5, -0.5) -> -0.25, checked against the enumeration oracle
        u = sphere.unit_vector(0.5, np.sqrt(0.75), 0.0)
        v = sphere.unit_vector(-0.5, 0.0, np.sqrt(0.75))
        model = LeggettModel(point_mass(u, v), Coupling.INDEPENDENT)
        s = SettingsPair(X, X)
        value = exact_model_correlation(model, s)
        assert value == pytest.approx(-0.25, abs=1e-12)
        assert value == pytest.approx(law_correlation(0.75, 0.25, Coupling.INDEPENDENT), abs=1e-12)

    def test_matches_enumeration_oracle(self, rng):
        # the closed form must agree with the exhaustive 4-outcome law, atom by atom
        for _ in range(50):
            u, v, a, b = sphere.random_unit_vectors(rng, 4)
            s = SettingsPair(a, b)
            for coupling in Coupling:
                model = LeggettModel(point_mass(u, v), coupling)
                pa, pb = conditional_marginals(u, v, s)
                assert exact_model_correlation(model, s) == pytest.approx(
                    law_correlation(pa, pb, coupling), abs=1e-12
                )

    def test_mirrored_same_setting(self):
        # v = -u isotropic and a = b gives E(AB) = -E[(u.a)^2] = -1/3
        model = LeggettModel(mirrored(200_000, sphere.make_rng(13, 0)), Coupling.INDEPENDENT)
        assert exact_model_correlation(model, SettingsPair(Z, Z)) == pytest.approx(-1 / 3, abs=5e-3)


class TestSerialization:
    def test_round_trip(self, rng):
        model = LeggettModel(isotropic_product(20, rng), Coupling.ANTIMONOTONE)
        restored = LeggettModel.from_dict(model.to_dict())
        assert np.allclose(restored.distribution.u, model.distribution.u)
        assert np.allclose(restored.distribution.w, model.distribution.w)
        assert restored.coupling is model.coupling

    def test_file_round_trip(self, rng, tmp_path):
        model = LeggettModel(mirrored(5, rng), Coupling.COMONOTONE)
        path = tmp_path / "model.json"
        model.save(path)
        assert LeggettModel.load(path).coupling is Coupling.COMONOTONE

    def test_small_weight_drift_renormalized(self):
        data = {
            "atoms": [
                {"u": list(X), "v": list(Y), "w": 0.5 + 2e-10},
                {"u": list(Y), "v": list(X), "w": 0.5},
            ],
            "coupling": "independent",
        }
        model = LeggettModel.from_dict(data)
        assert model.distribution.w.sum() == pytest.approx(1.0, abs=1e-15)

    def test_large_weight_drift_rejected(self):
        data = {
            "atoms": [{"u": list(X), "v": list(Y), "w": 0.9}],
            "coupling": "independent",
        }
        with pytest.raises(ValueError):
            LeggettModel.from_dict(data)

    def test_json_schema(self, rng):
        text = json.dumps(LeggettModel(point_mass(X, Y), Coupling.INDEPENDENT).to_dict())
        data = json.loads(text)
        assert data["coupling"] == "independent"
        assert data["atoms"][0]["w"] == 1.0
        assert data["atoms"][0]["u"] == [1.0, 0.0, 0.0]
