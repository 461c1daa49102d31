"""Grasp matrix construction and force-closure certification.

A grasp is a list of soft-finger contacts on a rigid object. Each contact
transmits a 3-D force plus a torque about its inward normal, subject to
Coulomb friction limits. Stacking the per-contact force components gives a
vector f, and the grasp matrix G maps f to the net object wrench. The grasp
is force-closure when G is surjective and some f strictly inside every
friction cone lies in the nullspace of G: then any external wrench can be
balanced by scaling that internal squeeze plus a particular solution.

The certificate solves a small LP over an inner (inscribed) linearization
of the quadratic cones, so a positive margin is sound: it never certifies a
grasp the quadratic model would reject. A brute-force sampling oracle is
included for cross-checking the certificate on test instances.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .geometry import (
    FZ,
    adjoint_transform,
    as_vec3,
    require_rotation,
    rotation_from_normal,
    wrench_basis_apply,
)
from .simplex import solve_lp

RANK_RTOL = 1e-8
MARGIN_TOL = 1e-9
DEFAULT_CONE_SIDES = 8
ORACLE_NORMAL_BOUND = 1e9


@dataclass(frozen=True)
class Contact:
    """One soft-finger contact: a frame on the object surface plus friction.

    The rotation maps the contact frame into the object frame and its third
    column is the inward surface normal. mu bounds tangential force by
    mu * fz; mu_tau bounds the normal torque by mu_tau * fz (mu_tau carries
    a length unit, N*m per N).
    """

    position: np.ndarray
    rotation: np.ndarray
    mu: float = 0.5
    mu_tau: float = 0.005

    def __post_init__(self):
        object.__setattr__(self, "position", as_vec3(self.position))
        object.__setattr__(self, "rotation", np.asarray(self.rotation, dtype=float))
        require_rotation(self.rotation)
        if not (np.isfinite(self.mu) and self.mu >= 0.0):
            raise ValueError(f"mu must be finite and >= 0, got {self.mu}")
        if not (np.isfinite(self.mu_tau) and self.mu_tau >= 0.0):
            raise ValueError(f"mu_tau must be finite and >= 0, got {self.mu_tau}")

    @classmethod
    def from_normal(cls, position, normal, mu=0.5, mu_tau=0.005) -> "Contact":
        """Build a contact from its inward normal, choosing tangents deterministically."""
        return cls(position, rotation_from_normal(normal), mu, mu_tau)


@dataclass(frozen=True)
class ClosureReport:
    """Outcome of the force-closure test.

    margin is the best achievable slack of an internal force against every
    linearized cone face, under the normalization sum(fz) <= 1; it is
    positive exactly when a strict internal force exists. internal_force
    holds that force, stacked 4 components per contact, when it exists.
    """

    surjective: bool
    has_strict_internal: bool
    is_force_closure: bool
    margin: float
    internal_force: np.ndarray | None = None


def build_grasp_matrix(contacts: list[Contact]) -> np.ndarray:
    """Assemble the 6 x 4n map from stacked contact forces to the net wrench.

    Columns 4i..4i+3 are the object-frame wrenches of contact i's unit
    force/torque basis vectors, so G @ f sums the per-contact contributions.
    """
    if not contacts:
        raise ValueError("cannot build a grasp matrix from zero contacts")
    cols = []
    for contact in contacts:
        for j in range(4):
            basis = np.zeros(4)
            basis[j] = 1.0
            w = adjoint_transform(contact.position, contact.rotation, wrench_basis_apply(basis))
            cols.append(np.concatenate([w.force, w.torque]))
    return np.column_stack(cols)


def in_friction_cone(f, mu: float, mu_tau: float, margin: float = 0.0) -> bool:
    """Check the quadratic soft-finger constraints with an optional margin."""
    if margin < 0.0:
        raise ValueError("margin must be >= 0")
    fx, fy, fz, tau = np.asarray(f, dtype=float)
    return (
        fz >= margin
        and np.hypot(fx, fy) <= mu * fz - margin
        and abs(tau) <= mu_tau * fz - margin
    )


def linearize_cone(mu: float, mu_tau: float, sides: int = DEFAULT_CONE_SIDES) -> np.ndarray:
    """Inner polyhedral approximation of the soft-finger cone.

    Returns a matrix A with one half-space per row; f is accepted when
    A @ f >= 0 componentwise. Rows are `sides` tangential faces of a
    regular polygon inscribed in the friction circle, two torsional
    faces, and fz >= 0. Inscribed means every accepted f also satisfies
    the quadratic constraints.
    """
    if sides < 3:
        raise ValueError(f"cone linearization needs at least 3 sides, got {sides}")
    rows = np.zeros((sides + 3, 4))
    apothem = mu * np.cos(np.pi / sides)
    for k in range(sides):
        theta = 2.0 * np.pi * k / sides
        rows[k] = (-np.cos(theta), -np.sin(theta), apothem, 0.0)
    rows[sides] = (0.0, 0.0, mu_tau, -1.0)
    rows[sides + 1] = (0.0, 0.0, mu_tau, 1.0)
    rows[sides + 2] = (0.0, 0.0, 1.0, 0.0)
    return rows


def _stacked_cone_rows(contacts, sides):
    """Block-diagonal cone constraints over the stacked force vector."""
    n = len(contacts)
    blocks = []
    for i, contact in enumerate(contacts):
        a = linearize_cone(contact.mu, contact.mu_tau, sides)
        padded = np.zeros((a.shape[0], 4 * n))
        padded[:, 4 * i : 4 * i + 4] = a
        blocks.append(padded)
    return np.vstack(blocks)


def is_force_closure(contacts: list[Contact], sides: int = DEFAULT_CONE_SIDES) -> ClosureReport:
    """Certify force closure of a contact set.

    Surjectivity of G is decided by singular values (rank 6 up to a
    relative threshold). Strict internal forces are sought by maximizing
    the uniform cone slack t subject to G @ f = 0 and sum(fz) <= 1; the
    grasp is force-closure when both tests pass.
    """
    g = build_grasp_matrix(contacts)
    n = len(contacts)
    sv = np.linalg.svd(g, compute_uv=False)
    surjective = len(sv) >= 6 and sv[5] > RANK_RTOL * sv[0]

    cone = _stacked_cone_rows(contacts, sides)
    nf = 4 * n
    # Variables: stacked f then the slack t. Maximize t.
    c = np.zeros(nf + 1)
    c[-1] = -1.0
    a_eq = np.hstack([g, np.zeros((6, 1))])
    b_eq = np.zeros(6)
    # cone rows: A f >= t  ->  -A f + t <= 0
    a_ub = np.hstack([-cone, np.ones((cone.shape[0], 1))])
    b_ub = np.zeros(cone.shape[0])
    norm_row = np.zeros(nf + 1)
    norm_row[[4 * i + FZ for i in range(n)]] = 1.0
    t_row = np.zeros(nf + 1)
    t_row[-1] = -1.0
    a_ub = np.vstack([a_ub, norm_row, t_row])
    b_ub = np.concatenate([b_ub, [1.0, 0.0]])

    result = solve_lp(c, a_ub=a_ub, b_ub=b_ub, a_eq=a_eq, b_eq=b_eq)
    if result.ok:
        margin = float(result.x[-1])
        internal = result.x[:nf].copy()
    else:
        margin = 0.0
        internal = None
    strict = margin > MARGIN_TOL
    return ClosureReport(
        surjective=surjective,
        has_strict_internal=strict,
        is_force_closure=surjective and strict,
        margin=margin if strict else 0.0,
        internal_force=internal if strict else None,
    )


def can_resist(contacts: list[Contact], wrench, sides: int = DEFAULT_CONE_SIDES) -> bool:
    """Feasibility test: can cone-admissible contact forces balance the wrench.

    Solves for f with G @ f = -wrench inside the linearized cones, with a
    very large (effectively non-binding) bound on total normal force to
    keep the LP bounded.
    """
    g = build_grasp_matrix(contacts)
    n = len(contacts)
    w = np.asarray(wrench, dtype=float).reshape(6)
    cone = _stacked_cone_rows(contacts, sides)
    norm_row = np.zeros(4 * n)
    norm_row[[4 * i + FZ for i in range(n)]] = 1.0
    result = solve_lp(
        np.zeros(4 * n),
        a_ub=np.vstack([-cone, norm_row]),
        b_ub=np.concatenate([np.zeros(cone.shape[0]), [ORACLE_NORMAL_BOUND]]),
        a_eq=g,
        b_eq=-w,
    )
    return result.ok


def sample_unit_wrenches(count: int, seed: int = 0) -> np.ndarray:
    """Quasi-uniform points on the unit 6-sphere from a seeded stream."""
    rng = np.random.default_rng(seed)
    points = np.empty((count, 6))
    filled = 0
    while filled < count:
        draw = rng.standard_normal((count - filled, 6))
        norms = np.linalg.norm(draw, axis=1)
        good = draw[norms > 1e-12] / norms[norms > 1e-12, None]
        points[filled : filled + good.shape[0]] = good
        filled += good.shape[0]
    return points


def resistance_oracle(
    contacts: list[Contact],
    wrench_samples: int = 500,
    sides: int = DEFAULT_CONE_SIDES,
    seed: int = 0,
) -> bool:
    """Brute-force closure check: try to balance many sampled unit wrenches.

    Returns True when every sample is balanced, stopping at the first
    failure. Meant for validating is_force_closure on small instances,
    not as a production certificate.
    """
    if wrench_samples < 1:
        raise ValueError("wrench_samples must be >= 1")
    for wrench in sample_unit_wrenches(wrench_samples, seed):
        if not can_resist(contacts, wrench, sides):
            return False
    return True
