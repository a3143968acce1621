"""Lagrangian side of the constrained dynamics and the sigma-model forms.

Everything here lives on a fiber N(g-, eta-): the canonical 1-form whose
exterior derivative reproduces the restricted symplectic structure, the
mechanical Lagrangian in its equivalent closed forms, the Euler-Lagrange
residual, and the dressing-type bivector entering the first-order form of
the field-theory Lagrangian.
"""

import numpy as np

from . import group as grouplib
from .dynamics import hamiltonian_quadratic, legendre_inverse

__all__ = [
    "r_operator",
    "theta_pairing",
    "dtheta_check",
    "lagrangian_N",
    "el_residual",
    "bivector_pi",
    "operator_identity_check",
    "lagrangian_density",
]


def r_operator(e_op, g, sign=1):
    """R_g(+-) = B_g +- G_g as a coordinate matrix g+ -> g-."""
    gg, bb = e_op.blocks_at(g)
    return bb + sign * gg


def _carrier(space, g_plus, eta_minus):
    """psi_bar(C(g+^{-1}) - eta-), the g+ vector sourcing the twist terms."""
    return space.algebra.psi_bar(space.C.value(g_plus.inv()) - eta_minus)


def theta_pairing(space, p, xi):
    """<Theta, t> = <eta, xi> for a fiber tangent with group slot xi."""
    return float(p.eta @ xi)


def dtheta_check(space, fiber, p, rng, pairs=4, step=1e-4):
    """Max residual of omega_c|_N = -dTheta over random chart directions.

    The fiber is charted by (u, w) -> (g+ exp(sum u_a T_a) g-, eta+ + w).
    Coordinate vector fields commute, so dTheta reduces to antisymmetrized
    partial derivatives of the chart components of Theta.
    """
    a = space.algebra
    space._require_on_fiber(p, fiber)
    gp0 = p.g_plus()
    eta_p0 = p.eta - fiber.eta_minus
    n = space.frame.n

    def chart(u, w):
        gp = gp0.mul(grouplib.exp(a, space.frame.T_plus.T @ u))
        eta_plus = eta_p0.copy()
        eta_plus[a.plus_indices] += w
        return space.fiber_point(fiber, gp, eta_plus)

    def tangent(u, w, direction):
        # central difference of the chart along one coordinate
        du = np.zeros(n)
        dw = np.zeros(n)
        if direction < n:
            du[direction] = step
        else:
            dw[direction - n] = step
        q1 = chart(u + du, w + dw)
        q0 = chart(u - du, w - dw)
        xi = a.mat_to_vec(np.linalg.inv(chart(u, w).g.matrix)
                          @ (q1.g.matrix - q0.g.matrix)) / (2 * step)
        rho = (q1.eta - q0.eta) / (2 * step)
        return xi, rho

    def theta_component(u, w, direction):
        xi, _ = tangent(u, w, direction)
        return theta_pairing(space, chart(u, w), xi)

    worst = 0.0
    for _ in range(pairs):
        i, j = rng.choice(2 * n, size=2, replace=False)
        zu = np.zeros(n)
        ei = np.zeros(2 * n)
        ei[i] = step
        ej = np.zeros(2 * n)
        ej[j] = step
        # d/di Theta_j - d/dj Theta_i by central differences
        didj = (theta_component(zu + ei[:n], ei[n:], j)
                - theta_component(zu - ei[:n], -ei[n:], j)) / (2 * step)
        djdi = (theta_component(zu + ej[:n], ej[n:], i)
                - theta_component(zu - ej[:n], -ej[n:], i)) / (2 * step)
        dtheta = didj - djdi
        ti = tangent(zu, np.zeros(n), i)
        tj = tangent(zu, np.zeros(n), j)
        omega = space.omega_c(p, ti, tj)
        worst = max(worst, abs(omega + dtheta))
    return worst


def lagrangian_N(space, e_op, g_plus, gdot, fiber, route="r-form"):
    """Mechanical Lagrangian on the fiber, gdot = g+^{-1} d/dt g+.

    Routes: "legendre" goes through the inverse Legendre transform and the
    Hamiltonian; "blocks" and "r-form" are the closed expressions in the
    metric/two-form blocks at g+. All three agree on admissible fibers.
    """
    a = space.algebra
    if route == "legendre":
        h = hamiltonian_quadratic(space, e_op)
        p = legendre_inverse(space, e_op, g_plus, gdot, fiber)
        xi = np.linalg.solve(fiber.g_minus.ad_matrix(), gdot)
        return float(p.eta @ xi - h.value(p))
    gg, bb = e_op.blocks_at(g_plus)
    v = _carrier(space, g_plus, fiber.eta_minus)
    if route == "blocks":
        return float(0.5 * a.pair(gg @ gdot, gdot) - a.pair(gdot, bb @ v)
                     - 0.5 * a.pair(v, gg @ v))
    if route == "r-form":
        rp = r_operator(e_op, g_plus, +1)
        return float(0.5 * a.pair(rp @ (gdot - v), gdot + v))
    raise ValueError("unknown route %r" % route)


def el_residual(space, e_op, traj, fiber):
    """Euler-Lagrange residual along a fiber trajectory (interior points).

    The momentum-like quantity G gdot - B psi_bar(C(g+^{-1}) - eta-) is
    differentiated with centered stencils; the force side is evaluated
    exactly, so the residual decays at the order of the stencil.
    """
    a = space.algebra
    dt = traj.times[1] - traj.times[0]
    from .dynamics import legendre_map

    def pieces(p):
        gp = p.g_plus()
        gg, bb = e_op.blocks_at(gp)
        gdot = legendre_map(space, e_op, p, fiber)
        v = _carrier(space, gp, fiber.eta_minus)
        mom = gg @ gdot - bb @ v
        force_a = gg @ gdot - bb @ v
        force_b = bb @ gdot - gg @ v
        em = a.psi_bar(fiber.eta_minus)
        rhs = (-a.project(a.bracket(force_a, force_b), "minus")
               - a.project(a.bracket(em, force_b), "minus")
               - a.psi_bar(space.c2.hat(force_b)))
        return mom, rhs

    moms, rhss = zip(*[pieces(p) for p in traj.points])
    worst = 0.0
    for k in range(1, len(traj.points) - 1):
        lhs = (moms[k + 1] - moms[k - 1]) / (2 * dt)
        worst = max(worst, float(np.abs(lhs - rhss[k]).max()))
    return worst


def bivector_pi(algebra, g_plus):
    """pi_+^R(g+) = -Pi_+ Ad_{g+} Pi_+ Ad_{g+^{-1}} Pi_- as a matrix."""
    sel_p = np.zeros((algebra.dim, algebra.dim))
    sel_p[algebra.plus_indices, algebra.plus_indices] = 1.0
    sel_m = np.eye(algebra.dim) - sel_p
    adg = g_plus.ad_matrix()
    return -sel_p @ adg @ sel_p @ np.linalg.solve(adg, sel_m)


def operator_identity_check(space, e_op, g_plus, sign=1):
    """Residual of the twisting identity relating R_g^{-1} to the bivector.

    Ad_{g+} (R_g)^{-1} Pi_{g-} Ad_{g+^{-1}} Pi_{g-}
        = ((R_e)^{-1} - pi_+^R(g+)) Pi_{g-}
    """
    a = space.algebra
    pi, mi = a.plus_indices, a.minus_indices
    adg = g_plus.ad_matrix()
    sel_m = np.zeros((a.dim, a.dim))
    sel_m[mi, mi] = 1.0

    def r_inv(g):
        r = r_operator(e_op, g, sign)
        out = np.zeros((a.dim, a.dim))
        out[np.ix_(pi, mi)] = np.linalg.inv(r[np.ix_(mi, pi)])
        return out

    lhs = adg @ r_inv(g_plus) @ sel_m @ np.linalg.solve(adg, sel_m)
    rhs = (r_inv(grouplib.identity(a)) - bivector_pi(a, g_plus)) @ sel_m
    return float(np.abs(lhs - rhs).max())


def lagrangian_density(space, e_op, g_plus, gdot, gprime, fiber, k):
    """First-order field Lagrangian density at one site.

    gdot and gprime are the left-trivialized time and space derivatives of
    g+; the light-cone combinations use the lattice velocity k. At k = 0
    (and spatially constant data) this collapses to the mechanical
    Lagrangian on the fiber.
    """
    a = space.algebra
    em = a.psi_bar(fiber.eta_minus)
    aplus = gdot + k * gprime
    aminus = gdot - k * gprime
    rp = r_operator(e_op, g_plus, +1)
    return float(0.5 * a.pair(rp @ (aplus + em), aminus - em))
