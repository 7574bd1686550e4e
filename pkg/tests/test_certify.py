import numpy as np
import pytest

from leggettsim import sphere
from leggettsim.bounds import averaged_bounds
from leggettsim.certify import (
    CertStatus,
    FeasibilityCertificate,
    TargetConstraint,
    build_atom_grid,
    build_problem,
    problem_from_dict,
    problem_to_dict,
    solve,
    verify_certificate,
    witness_distribution,
)
from leggettsim.models import (
    Coupling,
    LeggettModel,
    SettingsPair,
    SubensembleDistribution,
    exact_model_correlation,
)

X = np.array([1.0, 0.0, 0.0])
Y = np.array([0.0, 1.0, 0.0])
Z = np.array([0.0, 0.0, 1.0])


def two_atom_infeasible_problem():
    """Hand-checkable system: two settings pairs, each aligned with one of
    the two atoms, targets E = -0.5. The |u.a + v.b| rows have coefficient
    2 on the matching atom and 0 on the other with right side 0.5, so any
    admissible w sums to at most 0.5, conflicting with sum w = 1."""
    u = np.array([X, Y])
    v = np.array([X, Y])
    constraints = [
        TargetConstraint(settings=SettingsPair(X, X), e=-0.5),
        TargetConstraint(settings=SettingsPair(Y, Y), e=-0.5),
    ]
    return build_problem(u, v, constraints)


class TestBuildProblem:
    def test_orthogonal_atom_contributes_zero(self):
        u = np.array([Z])
        v = np.array([Z])
        p = build_problem(u, v, [TargetConstraint(settings=SettingsPair(X, Y), e=0.9)])
        assert np.allclose(p.A_ub[:, 0], 0.0)
        assert np.allclose(p.b_ub, [1.9, 0.1])

    def test_boundary_target(self):
        u = np.array([X, Z])
        v = np.array([X, Z])
        p = build_problem(u, v, [TargetConstraint(settings=SettingsPair(X, X), e=1.0)])
        # second row forces support on atoms with u.a = v.b
        assert p.b_ub[1] == 0.0
        cert = solve(p)
        assert cert.status is CertStatus.FEASIBLE
        assert np.allclose(p.A_ub[1] @ cert.weights, 0.0, atol=1e-9)

    def test_invalid_target_rejected(self):
        with pytest.raises(ValueError):
            TargetConstraint(settings=SettingsPair(X, Y), e=1.5)

    def test_empty_rejected(self):
        with pytest.raises(ValueError):
            build_problem(np.empty((0, 3)), np.empty((0, 3)), [])

    def test_hand_checkable_coefficients(self):
        p = two_atom_infeasible_problem()
        plus_rows = p.A_ub[[0, 2]]
        assert np.allclose(plus_rows, [[2.0, 0.0], [0.0, 2.0]])
        assert np.allclose(p.b_ub[[0, 2]], 0.5)

    def test_marginals_require_targets(self):
        with pytest.raises(ValueError):
            build_problem(
                np.array([X]), np.array([X]),
                [TargetConstraint(settings=SettingsPair(X, X), e=0.0)],
                include_marginals=True,
            )


class TestSolve:
    def test_hand_checkable_infeasible(self):
        p = two_atom_infeasible_problem()
        cert = solve(p)
        assert cert.status is CertStatus.INFEASIBLE
        assert cert.margin >= 0.5
        assert verify_certificate(p, cert)

    def test_single_pair_always_feasible(self, rng):
        u, v = build_atom_grid(8, 8, n_mirrored=8)
        for _ in range(10):
            a, b = sphere.random_unit_vectors(rng, 2)
            e = float(rng.uniform(-1, 1))
            p = build_problem(u, v, [TargetConstraint(settings=SettingsPair(a, b), e=e)])
            assert solve(p).status is CertStatus.FEASIBLE

    def test_self_consistency_with_atomic_model(self, rng):
        # targets generated by a model whose atoms are in the grid must be feasible,
        # and the witness must reproduce them
        u, v = build_atom_grid(6, 6)
        w = rng.random(u.shape[0])
        w /= w.sum()
        model = LeggettModel(SubensembleDistribution(u, v, w), Coupling.INDEPENDENT)
        constraints = []
        for _ in range(4):
            s = SettingsPair(*sphere.random_unit_vectors(rng, 2))
            constraints.append(TargetConstraint(settings=s, e=exact_model_correlation(model, s)))
        p = build_problem(u, v, constraints)
        cert = solve(p)
        assert cert.status is CertStatus.FEASIBLE
        assert verify_certificate(p, cert)
        witness = witness_distribution(p, cert)
        for c in constraints:
            b = averaged_bounds(witness, c.settings)
            assert b.lower - 1e-9 <= c.e <= b.upper + 1e-9

    def test_grid_superset_preserves_feasibility(self, rng):
        small_u, small_v = build_atom_grid(5, 5)
        s = SettingsPair(*sphere.random_unit_vectors(rng, 2))
        cons = [TargetConstraint(settings=s, e=0.3)]
        p_small = build_problem(small_u, small_v, cons)
        if solve(p_small).status is CertStatus.FEASIBLE:
            big_u, big_v = build_atom_grid(5, 5, n_mirrored=20)
            assert solve(build_problem(big_u, big_v, cons)).status is CertStatus.FEASIBLE

    def test_extra_constraint_never_rescues_infeasible(self, rng):
        p = two_atom_infeasible_problem()
        cons = list(p.constraints) + [
            TargetConstraint(settings=SettingsPair(*sphere.random_unit_vectors(rng, 2)), e=0.0)
        ]
        p2 = build_problem(p.u, p.v, cons)
        assert solve(p2).status is CertStatus.INFEASIBLE

    def test_randomized_certificates_verify(self, rng):
        u, v = build_atom_grid(6, 6, n_mirrored=12)
        n_feasible = 0
        n_infeasible = 0
        for _ in range(50):
            k = int(rng.integers(1, 5))
            constraints = []
            for _ in range(k):
                s = SettingsPair(*sphere.random_unit_vectors(rng, 2))
                constraints.append(TargetConstraint(settings=s, e=float(rng.uniform(-1, 1))))
            p = build_problem(u, v, constraints)
            cert = solve(p)
            assert verify_certificate(p, cert)
            if cert.status is CertStatus.FEASIBLE:
                n_feasible += 1
            else:
                n_infeasible += 1
        assert n_feasible > 0 and n_infeasible > 0


class TestVerifyCertificate:
    def test_perturbed_weight_rejected(self):
        u, v = build_atom_grid(4, 4)
        p = build_problem(u, v, [TargetConstraint(settings=SettingsPair(X, Y), e=0.0)])
        cert = solve(p)
        assert cert.status is CertStatus.FEASIBLE
        bad = np.array(cert.weights)
        bad[0] += 0.1
        tampered = FeasibilityCertificate(
            status=CertStatus.FEASIBLE, grid_hash=cert.grid_hash, weights=bad
        )
        assert not verify_certificate(p, tampered)

    def test_flipped_farkas_sign_rejected(self):
        p = two_atom_infeasible_problem()
        cert = solve(p)
        lam = np.array(cert.farkas_ub)
        nz = np.nonzero(lam)[0][0]
        lam[nz] = -lam[nz]
        tampered = FeasibilityCertificate(
            status=CertStatus.INFEASIBLE,
            grid_hash=cert.grid_hash,
            farkas_ub=lam,
            farkas_eq=np.array(cert.farkas_eq),
            margin=cert.margin,
        )
        assert not verify_certificate(p, tampered)

    def test_grid_hash_mismatch_rejected(self):
        p = two_atom_infeasible_problem()
        cert = solve(p)
        other = FeasibilityCertificate(
            status=cert.status,
            grid_hash="0" * 64,
            farkas_ub=cert.farkas_ub,
            farkas_eq=cert.farkas_eq,
            margin=cert.margin,
        )
        assert not verify_certificate(p, other)

    def test_dimension_mismatch_raises(self):
        p = two_atom_infeasible_problem()
        bad = FeasibilityCertificate(
            status=CertStatus.FEASIBLE, grid_hash=p.grid_hash, weights=np.array([1.0])
        )
        with pytest.raises(ValueError):
            verify_certificate(p, bad)


class TestSerialization:
    def test_certificate_round_trip(self, tmp_path):
        p = two_atom_infeasible_problem()
        cert = solve(p)
        path = tmp_path / "cert.json"
        cert.save(path)
        restored = FeasibilityCertificate.load(path)
        assert restored.status is CertStatus.INFEASIBLE
        assert restored.margin == cert.margin
        assert verify_certificate(p, restored)

    def test_problem_round_trip(self):
        p = two_atom_infeasible_problem()
        restored = problem_from_dict(problem_to_dict(p))
        assert restored.grid_hash == p.grid_hash
        assert np.array_equal(restored.A_ub, p.A_ub)
        assert np.array_equal(restored.b_ub, p.b_ub)
