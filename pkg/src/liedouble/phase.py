"""Phase space G x g* with the cocycle-extended symplectic form.

Tangent vectors are pairs (xi, rho) in left trivialization: xi = g^{-1}v is
an algebra vector, rho a covector. Differentials are pairs (dF, deltaF) with
dF the left-trivialized group-slot covector and deltaF the fiber-slot algebra
vector. The module provides the extended form omega_c, its Poisson bracket,
the second-class constraint machinery restricting to fibers over a frozen
(g-, eta-), and the momentum maps whose closure witnesses the restored
left-translation symmetry on admissible fibers.
"""

import numpy as np

from . import group as grouplib
from .algebra import TwoCocycle, is_character

__all__ = [
    "PhasePoint",
    "FiberSpec",
    "Observable",
    "Differential",
    "ConstraintFrame",
    "PhaseSpace",
]

ON_FIBER_TOL = 1e-9


class PhasePoint:
    def __init__(self, g, eta):
        self.g = g
        self.eta = np.asarray(eta, dtype=float)

    @property
    def algebra(self):
        return self.g.algebra

    def g_plus(self):
        return self.g.factors()[0]

    def g_minus(self):
        return self.g.factors()[1]


class FiberSpec:
    """The frozen pair (g-, eta-) selecting a constrained submanifold."""

    def __init__(self, g_minus, eta_minus, cocycle=None):
        self.g_minus = g_minus
        self.eta_minus = np.asarray(eta_minus, dtype=float)
        a = g_minus.algebra
        if not g_minus.member("minus"):
            raise ValueError("g_minus is not in the minus factor")
        if np.abs(a.project_dual(self.eta_minus, "plus")).max(initial=0.) > 1e-12:
            raise ValueError("eta_minus has support outside the dual of g-")
        self.is_character = is_character(a, self.eta_minus)
        self.in_kernel = (None if cocycle is None
                          else grouplib.kernel_check(cocycle, g_minus))


class Differential:
    def __init__(self, dF, deltaF):
        self.dF = np.asarray(dF, dtype=float)
        self.deltaF = np.asarray(deltaF, dtype=float)


class Observable:
    """A scalar function of (g, eta) with optional analytic differential."""

    def __init__(self, fn, diff=None, name=None):
        self._fn = fn
        self._diff = diff
        self.name = name

    def value(self, p):
        return float(self._fn(p))

    @property
    def has_analytic_differential(self):
        return self._diff is not None

    def analytic_differential(self, p):
        return self._diff(p)


class ConstraintFrame:
    """Bases {T_a} of g+ and the pairing-dual frame {T^a} of g-.

    The frames are normalized so that (T_a, T^b)_g = delta_a^b, which makes
    the mixed block of the constraint Gram matrix exactly the identity.
    """

    def __init__(self, algebra):
        self.algebra = algebra
        pi, mi = algebra.plus_indices, algebra.minus_indices
        if len(pi) != len(mi):
            raise ValueError("constraint frame needs dim g+ = dim g-")
        self.n = len(pi)
        self.T_plus = np.zeros((self.n, algebra.dim))
        for a, i in enumerate(pi):
            self.T_plus[a, i] = 1.0
        cross = algebra.pairing[np.ix_(pi, mi)]
        minus_coords = np.linalg.inv(cross)
        self.T_minus = np.zeros((self.n, algebra.dim))
        for b in range(self.n):
            self.T_minus[b, mi] = minus_coords[:, b]


class PhaseSpace:
    """Bundles the algebra with a group 1-cocycle and its 2-cocycle."""

    def __init__(self, algebra, group_cocycle=None, two_cocycle=None):
        self.algebra = algebra
        self.C = group_cocycle or grouplib.GroupCocycle.zero(algebra)
        if two_cocycle is None:
            two_cocycle = self.C.infinitesimal()
        self.c2 = two_cocycle
        self.frame = ConstraintFrame(algebra)

    # --- basic geometry -------------------------------------------------

    def point(self, g, eta):
        return PhasePoint(g, eta)

    def fibration(self, p):
        """(g, eta) -> (g-, eta-)."""
        return p.g_minus(), self.algebra.project_dual(p.eta, "minus")

    def fiber(self, g_minus, eta_minus):
        return FiberSpec(g_minus, eta_minus, cocycle=self.C)

    def on_fiber_distance(self, p, fiber):
        gm, em = self.fibration(p)
        return (np.abs(gm.matrix - fiber.g_minus.matrix).max()
                + float(np.linalg.norm(em - fiber.eta_minus)))

    def _require_on_fiber(self, p, fiber):
        d = self.on_fiber_distance(p, fiber)
        if d > ON_FIBER_TOL:
            raise ValueError("point is off the fiber by %.3e" % d)

    def fiber_point(self, fiber, g_plus, eta_plus):
        """Assemble (g+ g-, eta+ + eta-) on the given fiber."""
        eta_plus = self.algebra.project_dual(eta_plus, "plus")
        return PhasePoint(g_plus.mul(fiber.g_minus),
                          eta_plus + fiber.eta_minus)

    def random_fiber_point(self, fiber, rng, scale=0.5):
        a = self.algebra
        gp = grouplib.exp(a, a.project(scale * rng.standard_normal(a.dim),
                                       "plus"))
        etap = a.project_dual(scale * rng.standard_normal(a.dim), "plus")
        return self.fiber_point(fiber, gp, etap)

    # --- symplectic structure -------------------------------------------

    def omega_c(self, p, t1, t2):
        a = self.algebra
        xi1, rho1 = t1
        xi2, rho2 = t2
        adg = p.g.ad_matrix()
        return float(-rho1 @ xi2 + rho2 @ xi1
                     + p.eta @ a.bracket(xi1, xi2)
                     + self.c2.eval(adg @ xi1, adg @ xi2))

    def differential(self, F, p, step=1e-5):
        if F.has_analytic_differential:
            return F.analytic_differential(p)
        a = self.algebra
        dF = np.zeros(a.dim)
        deltaF = np.zeros(a.dim)
        e = np.eye(a.dim)
        for i in range(a.dim):
            h = step * (1.0 + abs(float(p.eta[i])))
            dF[i] = (F.value(PhasePoint(p.g.mul(grouplib.exp(a, e[i], h)),
                                        p.eta))
                     - F.value(PhasePoint(p.g.mul(grouplib.exp(a, e[i], -h)),
                                          p.eta))) / (2 * h)
            deltaF[i] = (F.value(PhasePoint(p.g, p.eta + h * e[i]))
                         - F.value(PhasePoint(p.g, p.eta - h * e[i]))) / (2 * h)
        if not np.all(np.isfinite(dF)) or not np.all(np.isfinite(deltaF)):
            raise ArithmeticError("non-finite differential")
        return Differential(dF, deltaF)

    def ham_vf_full(self, F, p):
        """(g delta F, coad_{delta F} eta - g dF + Ad*_g c_hat(Ad_g delta F))."""
        d = self.differential(F, p)
        return self.ham_vf_from_diff(d, p)

    def ham_vf_from_diff(self, d, p):
        a = self.algebra
        adg = p.g.ad_matrix()
        rho = (a.coad(d.deltaF, p.eta) - d.dF
               + adg.T @ self.c2.hat(adg @ d.deltaF))
        return d.deltaF.copy(), rho

    def poisson_c(self, F, G, p):
        dF = self.differential(F, p)
        dG = self.differential(G, p)
        return self.poisson_from_diff(dF, dG, p)

    def poisson_from_diff(self, dF, dG, p):
        # This is dF applied to the Hamiltonian field of G and needs no
        # cocycle identities; the equivalent rewriting with C(g^{-1}) and
        # the untransported 2-cocycle agrees whenever the group/algebra
        # compatibility identity is exact (see poisson_transported_form).
        a = self.algebra
        adg = p.g.ad_matrix()
        return float(dF.dF @ dG.deltaF - dG.dF @ dF.deltaF
                     - p.eta @ a.bracket(dF.deltaF, dG.deltaF)
                     - self.c2.eval(adg @ dF.deltaF, adg @ dG.deltaF))

    def poisson_transported_form(self, dF, dG, p):
        """Equivalent bracket expression with the cocycle pulled to identity.

        Uses -(eta + C(g^{-1})) <.,[.,.]> - c(.,.); equals poisson_from_diff
        exactly when the cocycle compatibility identity holds exactly.
        """
        a = self.algebra
        cginv = self.C.value(p.g.inv())
        return float(dF.dF @ dG.deltaF - dG.dF @ dF.deltaF
                     - (p.eta + cginv) @ a.bracket(dF.deltaF, dG.deltaF)
                     - self.c2.eval(dF.deltaF, dG.deltaF))

    # --- constraint machinery -------------------------------------------

    def dressed_projector(self, g_minus):
        """Ad_{g-^{-1}} Pi_{g+} Ad_{g-} as a matrix on coordinates.

        Its transpose is the dual-side sandwich Ad*_{g-} Pi_{g+*} Ad*_{g-^{-1}}.
        """
        a = self.algebra
        adm = g_minus.ad_matrix()
        sel = np.zeros((a.dim, a.dim))
        sel[a.plus_indices, a.plus_indices] = 1.0
        return np.linalg.solve(adm, sel @ adm)

    def constraint_differentials(self, p):
        """Differentials of the 2n constraint functions at p.

        First n: left-log coordinates of g- paired with psi(T_a); last n:
        <eta, T^a>. These are exactly the pulled-back frame 1-forms.
        """
        a = self.algebra
        gm = p.g_minus()
        adm = gm.ad_matrix()
        sel = np.zeros((a.dim, a.dim))
        sel[a.minus_indices, a.minus_indices] = 1.0
        slot = np.linalg.solve(adm, sel @ adm)  # Ad_{g-^{-1}} Pi_{g-} Ad_{g-}
        out = []
        for ta in self.frame.T_plus:
            out.append(Differential(slot.T @ a.psi(ta), np.zeros(a.dim)))
        for tb in self.frame.T_minus:
            out.append(Differential(np.zeros(a.dim), tb))
        return out

    def constraint_observables(self, p):
        """The scalar constraints whose differentials the frame realizes.

        Used only as an independent finite-difference cross-check of
        constraint_differentials; evaluation involves a matrix logarithm.
        """
        a = self.algebra
        gm0_inv = p.g_minus().inv()
        obs = []
        for ta in self.frame.T_plus:
            mu = a.psi(ta)
            obs.append(Observable(
                lambda q, mu=mu: mu @ grouplib.log_coords(
                    gm0_inv.mul(q.g_minus()))))
        for tb in self.frame.T_minus:
            obs.append(Observable(lambda q, tb=tb: q.eta @ tb))
        return obs

    def dirac_matrix(self, p):
        """[[0, I], [-I, Omega_c]] in the normalized constraint frame."""
        n = self.frame.n
        a = self.algebra
        cginv = self.C.value(p.g.inv())
        omega = np.zeros((n, n))
        for i in range(n):
            for j in range(n):
                br = a.bracket(self.frame.T_minus[i], self.frame.T_minus[j])
                omega[i, j] = (-(cginv + p.eta) @ br
                               - self.c2.eval(self.frame.T_minus[i],
                                              self.frame.T_minus[j]))
        eye = np.eye(n)
        return np.block([[np.zeros((n, n)), eye], [-eye, omega]])

    @staticmethod
    def dirac_matrix_inverse(dmat):
        n = dmat.shape[0] // 2
        omega = dmat[n:, n:]
        eye = np.eye(n)
        return np.block([[omega, -eye], [eye, np.zeros((n, n))]])

    def dirac_bracket(self, F, G, p, fiber):
        """Closed-form restricted bracket on N(g-, eta-)."""
        self._require_on_fiber(p, fiber)
        dF = self.differential(F, p)
        dG = self.differential(G, p)
        return self._dirac_closed(dF, dG, p, reduced=False)

    def dirac_bracket_reduced(self, F, G, p, fiber):
        """Two-term form, valid when c_hat exchanges the isotropic factors."""
        if not (self.c2.kind == TwoCocycle.ZERO
                or self.c2.is_isotropic_exchanging()):
            raise ValueError("cocycle does not exchange the isotropic factors")
        self._require_on_fiber(p, fiber)
        dF = self.differential(F, p)
        dG = self.differential(G, p)
        return self._dirac_closed(dF, dG, p, reduced=True)

    def _dirac_closed(self, dF, dG, p, reduced):
        a = self.algebra
        gm = p.g_minus()
        adm = gm.ad_matrix()
        proj = self.dressed_projector(gm)
        DF = proj @ dF.deltaF
        DG = proj @ dG.deltaF
        val = (dF.dF @ DG - dG.dF @ DF - p.eta @ a.bracket(DF, DG))
        if not reduced:
            PF = a.project(adm @ dF.deltaF, "plus")
            PG = a.project(adm @ dG.deltaF, "plus")
            val -= self.C.value(p.g_plus().inv()) @ a.bracket(PF, PG)
            val -= self.c2.eval(PF, PG)
        return float(val)

    def dirac_oracle(self, F, G, p):
        """Generic second-class formula {F,G} - {F,phi} K^{-1} {phi,G}."""
        dF = self.differential(F, p)
        dG = self.differential(G, p)
        cons = self.constraint_differentials(p)
        m = len(cons)
        kmat = np.zeros((m, m))
        for i in range(m):
            for j in range(i + 1, m):
                kmat[i, j] = self.poisson_from_diff(cons[i], cons[j], p)
                kmat[j, i] = -kmat[i, j]
        f_phi = np.array([self.poisson_from_diff(dF, c, p) for c in cons])
        phi_g = np.array([self.poisson_from_diff(c, dG, p) for c in cons])
        base = self.poisson_from_diff(dF, dG, p)
        return float(base - f_phi @ np.linalg.solve(kmat, phi_g))

    # --- momentum maps ----------------------------------------------------

    def momentum_left(self, p):
        return grouplib.coadjoint_star(p.g.inv(), p.eta)

    def momentum_ext(self, p):
        return self.momentum_left(p) + self.C.value(p.g), 1.0

    def momentum_fn(self, x, a_ext=0.0, extended=True):
        """The momentum function j_X (extended: plus <C(g),X> + a)."""
        x = np.asarray(x, dtype=float)
        alg = self.algebra

        def fn(p):
            val = p.eta @ grouplib.adjoint(p.g.inv(), x)
            if extended:
                val += self.C.value(p.g) @ x + a_ext
            return val

        def diff(p):
            ax = grouplib.adjoint(p.g.inv(), x)
            dF = alg.coad(ax, p.eta)
            if extended:
                dF = dF + self.c2.hat(ax)
            return Differential(dF, ax)

        return Observable(fn, diff=diff, name="j[%s]" % np.array2string(
            x, precision=2))

    def fiber_generator(self, x, p, fiber):
        """Restricted hamiltonian field of the extended momentum function."""
        self._require_on_fiber(p, fiber)
        a = self.algebra
        gp, gm = p.g.factors()
        adp_inv = gp.inv().ad_matrix()
        adm = gm.ad_matrix()
        w_plus = a.project(adp_inv @ x, "plus")
        w_minus = a.project(adp_inv @ x, "minus")
        xi = np.linalg.solve(adm, w_plus)
        inner = (a.coad(np.linalg.solve(adm, w_minus), p.eta)
                 + self.c2.hat(grouplib.adjoint(p.g.inv(), x)))
        proj = self.dressed_projector(gm)
        rho = -proj.T @ inner
        return xi, rho

    def group_action_d(self, h, p, fiber):
        """The finite fiber action integrating fiber_generator."""
        if not fiber.is_character:
            raise ValueError("eta_minus must be a character of g-")
        if fiber.in_kernel is False:
            raise ValueError("g_minus must lie in the kernel of the cocycle")
        self._require_on_fiber(p, fiber)
        gp, gm = p.g.factors()
        l = gp.inv().mul(h).mul(gp)
        l_plus, l_minus = l.factors()
        g_new = p.g.mul(gm.inv().mul(l_plus).mul(gm))
        # the fiber slot is pinned down by equivariance of the extended
        # momentum map: J(h.p) = Ad*_{h^{-1}} J(p) in the extended coadjoint
        # action, which solves to eta_new = Ad*_{m^{-1}} eta + C(m) with the
        # conjugated minus part m = g-^{-1} l- g-
        m = gm.inv().mul(l_minus).mul(gm)
        eta_new = grouplib.coadjoint_star(m.inv(), p.eta) + self.C.value(m)
        return PhasePoint(g_new, eta_new)
