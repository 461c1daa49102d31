"""Grasp matrix, friction cones, and the force-closure certificate."""

import numpy as np
import pytest

from graspforce.closure import (
    ClosureReport,
    Contact,
    build_grasp_matrix,
    can_resist,
    in_friction_cone,
    is_force_closure,
    linearize_cone,
    resistance_oracle,
    sample_unit_wrenches,
)
from graspforce.geometry import adjoint_transform, wrench_basis_apply


def antipodal_pair(mu=0.5, mu_tau=0.005, spacing=0.03):
    return [
        Contact.from_normal((0.0, spacing, 0.0), (0.0, -1.0, 0.0), mu, mu_tau),
        Contact.from_normal((0.0, -spacing, 0.0), (0.0, 1.0, 0.0), mu, mu_tau),
    ]


def random_contacts(rng, count):
    contacts = []
    for _ in range(count):
        normal = rng.standard_normal(3)
        normal /= np.linalg.norm(normal)
        contacts.append(
            Contact.from_normal(
                rng.uniform(-0.05, 0.05, size=3),
                normal,
                mu=rng.uniform(0.1, 1.0),
                mu_tau=rng.uniform(0.0, 0.01),
            )
        )
    return contacts


class TestContact:
    def test_from_normal_sets_third_column(self):
        c = Contact.from_normal((0.0, 0.0, 0.0), (0.0, 0.0, -1.0))
        np.testing.assert_allclose(c.rotation[:, 2], [0.0, 0.0, -1.0], atol=1e-12)

    def test_rejects_non_rotation(self):
        with pytest.raises(ValueError):
            Contact((0.0, 0.0, 0.0), np.ones((3, 3)))

    def test_rejects_negative_friction(self):
        with pytest.raises(ValueError):
            Contact.from_normal((0.0, 0.0, 0.0), (0.0, 0.0, 1.0), mu=-0.1)


class TestGraspMatrix:
    def test_identity_frame_embedding(self):
        c = Contact(np.zeros(3), np.eye(3))
        g = build_grasp_matrix([c])
        expected = np.zeros((6, 4))
        expected[0, 0] = expected[1, 1] = expected[2, 2] = 1.0
        expected[5, 3] = 1.0
        np.testing.assert_allclose(g, expected, atol=1e-15)

    def test_antipodal_squeeze_has_zero_net_wrench(self):
        g = build_grasp_matrix(antipodal_pair())
        squeeze = np.array([0.0, 0.0, 1.0, 0.0, 0.0, 0.0, 1.0, 0.0])
        np.testing.assert_allclose(g @ squeeze, np.zeros(6), atol=1e-12)

    def test_matches_per_contact_summation(self):
        rng = np.random.default_rng(31)
        for _ in range(20):
            contacts = random_contacts(rng, int(rng.integers(1, 5)))
            g = build_grasp_matrix(contacts)
            f = rng.standard_normal(4 * len(contacts))
            total = np.zeros(6)
            for i, c in enumerate(contacts):
                w = adjoint_transform(
                    c.position, c.rotation, wrench_basis_apply(f[4 * i : 4 * i + 4])
                )
                total += w.as_vector()
            np.testing.assert_allclose(g @ f, total, atol=1e-12)

    def test_empty_contacts_rejected(self):
        with pytest.raises(ValueError):
            build_grasp_matrix([])


class TestQuadraticCone:
    def test_pure_normal_force_inside(self):
        assert in_friction_cone((0.0, 0.0, 1.0, 0.0), 0.5, 0.1)

    def test_tangential_overload_outside(self):
        assert not in_friction_cone((0.6, 0.0, 1.0, 0.0), 0.5, 0.1)

    def test_torsional_overload_outside(self):
        assert not in_friction_cone((0.0, 0.0, 1.0, 0.2), 0.5, 0.1)

    def test_pulling_outside(self):
        assert not in_friction_cone((0.0, 0.0, -1.0, 0.0), 0.5, 0.1)

    def test_margin_tightens_the_test(self):
        f = (0.49, 0.0, 1.0, 0.0)
        assert in_friction_cone(f, 0.5, 0.1)
        assert not in_friction_cone(f, 0.5, 0.1, margin=0.02)

    def test_negative_margin_rejected(self):
        with pytest.raises(ValueError):
            in_friction_cone((0.0, 0.0, 1.0, 0.0), 0.5, 0.1, margin=-0.1)


class TestLinearizedCone:
    def test_row_count(self):
        assert linearize_cone(0.5, 0.005, sides=8).shape == (11, 4)

    def test_axis_point_strictly_interior(self):
        rows = linearize_cone(0.5, 0.005, sides=8)
        slack = rows @ np.array([0.0, 0.0, 1.0, 0.0])
        assert np.min(slack) > 0.0

    def test_frictionless_cone_pins_tangentials(self):
        rows = linearize_cone(0.0, 0.005, sides=8)
        assert np.all(rows @ np.array([0.0, 0.0, 1.0, 0.0]) >= 0.0)
        assert np.min(rows @ np.array([1e-6, 0.0, 1.0, 0.0])) < 0.0
        assert np.min(rows @ np.array([0.0, -1e-6, 1.0, 0.0])) < 0.0

    def test_inscribed_soundness(self):
        # Every force accepted by the polyhedral cone must satisfy the
        # quadratic constraints: the approximation is inner, never outer.
        rng = np.random.default_rng(37)
        rows = linearize_cone(0.5, 0.005, sides=8)
        accepted = 0
        while accepted < 2000:
            f = np.array(
                [
                    rng.uniform(-0.7, 0.7),
                    rng.uniform(-0.7, 0.7),
                    rng.uniform(0.0, 1.0),
                    rng.uniform(-0.008, 0.008),
                ]
            )
            if np.all(rows @ f >= 0.0):
                accepted += 1
                assert in_friction_cone(f, 0.5, 0.005)

    def test_too_few_sides_rejected(self):
        with pytest.raises(ValueError):
            linearize_cone(0.5, 0.005, sides=2)


class TestForceClosure:
    def test_antipodal_with_friction_is_closure(self):
        report = is_force_closure(antipodal_pair(mu=0.5))
        assert isinstance(report, ClosureReport)
        assert report.surjective
        assert report.has_strict_internal
        assert report.is_force_closure
        assert report.margin > 0.0

    def test_internal_force_lies_in_the_nullspace_and_cones(self):
        contacts = antipodal_pair(mu=0.5)
        report = is_force_closure(contacts)
        g = build_grasp_matrix(contacts)
        np.testing.assert_allclose(g @ report.internal_force, np.zeros(6), atol=1e-7)
        for i, c in enumerate(contacts):
            assert in_friction_cone(report.internal_force[4 * i : 4 * i + 4], c.mu, c.mu_tau)

    def test_single_contact_is_never_closure(self):
        report = is_force_closure([antipodal_pair()[0]])
        assert not report.surjective
        assert not report.is_force_closure

    def test_frictionless_antipodal_is_not_closure(self):
        report = is_force_closure(antipodal_pair(mu=0.0, mu_tau=0.0))
        assert not report.is_force_closure
        assert report.margin == 0.0
        assert report.internal_force is None

    def test_margin_monotone_in_friction(self):
        margins = [is_force_closure(antipodal_pair(mu=mu)).margin for mu in (0.2, 0.4, 0.8)]
        assert margins[0] > 0.0
        assert margins[0] <= margins[1] + 1e-12
        assert margins[1] <= margins[2] + 1e-12

    def test_verdict_invariant_under_position_scaling(self):
        rng = np.random.default_rng(41)
        for _ in range(5):
            contacts = random_contacts(rng, 3)
            scaled = [
                Contact(10.0 * c.position, c.rotation, c.mu, c.mu_tau) for c in contacts
            ]
            assert is_force_closure(contacts).is_force_closure == is_force_closure(
                scaled
            ).is_force_closure

    def test_coincident_contacts_are_not_surjective(self):
        c = antipodal_pair()[0]
        report = is_force_closure([c, c])
        assert not report.surjective
        assert not report.is_force_closure


class TestOracle:
    def test_zero_wrench_always_resistable(self):
        assert can_resist(antipodal_pair(mu=0.0, mu_tau=0.0), np.zeros(6))

    def test_oracle_confirms_antipodal_closure(self):
        assert resistance_oracle(antipodal_pair(mu=0.5), wrench_samples=200)

    def test_oracle_rejects_frictionless_pair(self):
        assert not resistance_oracle(antipodal_pair(mu=0.0, mu_tau=0.0), wrench_samples=200)

    def test_oracle_rejects_single_contact(self):
        assert not resistance_oracle([antipodal_pair()[0]], wrench_samples=200)

    def test_sampled_wrenches_are_unit_and_deterministic(self):
        a = sample_unit_wrenches(100, seed=3)
        b = sample_unit_wrenches(100, seed=3)
        np.testing.assert_array_equal(a, b)
        np.testing.assert_allclose(np.linalg.norm(a, axis=1), np.ones(100), atol=1e-12)

    def test_three_finger_disk_grasp_agrees_with_oracle(self):
        contacts = []
        for theta in (0.0, 2.0 * np.pi / 3.0, 4.0 * np.pi / 3.0):
            pos = 0.04 * np.array([np.cos(theta), np.sin(theta), 0.0])
            contacts.append(Contact.from_normal(pos, -pos / np.linalg.norm(pos), mu=0.5))
        verdict = is_force_closure(contacts).is_force_closure
        assert verdict == resistance_oracle(contacts, wrench_samples=100)
