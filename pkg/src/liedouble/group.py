"""Matrix-group layer over a BasisAlgebra: exponential, adjoints, the global
factorization g = g+ g-, dressing actions, and coadjoint group 1-cocycles."""

import numpy as np
import scipy.linalg

from .algebra import TwoCocycle

__all__ = [
    "GroupPoint",
    "GroupCocycle",
    "identity",
    "exp",
    "adjoint",
    "coadjoint_star",
    "factorize",
    "dressing",
    "kernel_check",
    "random_point",
]

FACTOR_TOL = 1e-10
MEMBER_TOL = 1e-8


class FactorizationError(RuntimeError):
    pass


class GroupPoint:
    """Immutable group element in the registered faithful representation.

    ``matrix`` may be a single (m, m) array or an (N, m, m) stack for lattice
    loop groups; all operations broadcast over the leading axis.
    """

    def __init__(self, algebra, matrix):
        self.algebra = algebra
        self.matrix = np.asarray(matrix)
        self._factors = None
        self._ad = None

    def mul(self, other):
        return GroupPoint(self.algebra, self.matrix @ other.matrix)

    def inv(self):
        return GroupPoint(self.algebra, np.linalg.inv(self.matrix))

    def is_identity(self, tol=1e-12):
        return np.abs(self.matrix - self.algebra.identity_matrix).max() < tol

    # adjoint matrix on algebra coordinates, cached
    def ad_matrix(self):
        if self._ad is None:
            fast = getattr(self.algebra, "group_adjoint_fn", None)
            if fast is not None:
                self._ad = fast(self.matrix)
                return self._ad
            a = self.algebra
            ginv = np.linalg.inv(self.matrix)
            cols = []
            for i in range(a.dim):
                e = np.zeros(a.dim)
                e[i] = 1.0
                cols.append(a.mat_to_vec(self.matrix @ a.vec_to_mat(e) @ ginv))
            self._ad = np.column_stack(cols)
        return self._ad

    def factors(self):
        if self._factors is None:
            gp, gm = self.algebra.factorizer(self.matrix)
            resid = np.abs(gp @ gm - self.matrix).max()
            if not np.isfinite(resid) or resid > FACTOR_TOL:
                raise FactorizationError(
                    "factorization residual %.3e exceeds %.1e"
                    % (resid, FACTOR_TOL))
            self._factors = (GroupPoint(self.algebra, gp),
                             GroupPoint(self.algebra, gm))
        return self._factors

    def member(self, side, tol=MEMBER_TOL):
        pred = self.algebra.group_memberships.get(side)
        if pred is None:
            return True
        m = self.matrix
        if m.ndim == 2:
            return bool(pred(m, tol))
        return all(pred(mj, tol) for mj in m)


def identity(algebra):
    return GroupPoint(algebra, algebra.identity_matrix.copy())


def exp(algebra, x, t=1.0):
    return GroupPoint(algebra, scipy.linalg.expm(t * algebra.vec_to_mat(x)))


def log_coords(g):
    """Algebra coordinates of the matrix logarithm (principal branch)."""
    m = g.matrix
    if m.ndim == 2:
        lg = scipy.linalg.logm(m)
    else:
        lg = np.stack([scipy.linalg.logm(mj) for mj in m])
    return g.algebra.mat_to_vec(lg)


def adjoint(g, x):
    return g.ad_matrix() @ np.asarray(x, dtype=float)


def coadjoint_star(g, eta):
    """Transpose convention: <Ad*_g eta, X> = <eta, Ad_g X>."""
    return g.ad_matrix().T @ np.asarray(eta, dtype=float)


def factorize(g):
    return g.factors()


def dressing(h, g, side="plus"):
    """Pi_{G+-}(h g): the dressing action of the opposite factor."""
    gp, gm = (h.mul(g)).factors()
    return gp if side == "plus" else gm


class GroupCocycle:
    """Coadjoint 1-cocycle C: G -> g* with C(gh) = Ad*_{g^{-1}} C(h) + C(g)."""

    def __init__(self, algebra, kind, mu0=None, level=None, value_fn=None,
                 infinitesimal=None, differential_inv_fn=None):
        self.algebra = algebra
        self.kind = kind
        self.mu0 = None if mu0 is None else np.asarray(mu0, dtype=float)
        self.level = level
        self._value_fn = value_fn
        self._infinitesimal = infinitesimal
        self._differential_inv_fn = differential_inv_fn

    @classmethod
    def zero(cls, algebra):
        return cls(algebra, TwoCocycle.ZERO)

    @classmethod
    def coboundary(cls, algebra, mu0):
        return cls(algebra, TwoCocycle.COBOUNDARY, mu0=mu0)

    def value(self, g):
        if self.kind == TwoCocycle.ZERO:
            return np.zeros(self.algebra.dim)
        if self.kind == TwoCocycle.COBOUNDARY:
            # C(g) = mu0 - Ad*_{g^{-1}} mu0; this sign makes the 1-cocycle
            # property exact and -dC|_e equal to the hat of the 2-cocycle
            return self.mu0 - coadjoint_star(g.inv(), self.mu0)
        return self._value_fn(g)

    def infinitesimal(self):
        """The algebra 2-cocycle with hat = -dC|_e."""
        if self._infinitesimal is not None:
            return self._infinitesimal
        if self.kind == TwoCocycle.ZERO:
            return TwoCocycle.zero(self.algebra)
        if self.kind == TwoCocycle.COBOUNDARY:
            return TwoCocycle.coboundary(self.algebra, self.mu0)
        raise ValueError("no closed-form infinitesimal for kind %r" % self.kind)

    def differential_inv(self, g):
        """Exact derivative of C at the inverse point, as a matrix M.

        M @ X = d/dt C((g exp(tX))^{-1}) at t = 0. When the 1-cocycle
        property holds exactly this equals the closed form
        X -> ad*(X) C(g^{-1}) + hat(X); lattice cocycles, whose property
        only holds to the stencil order, supply the exact derivative of
        their defining expression instead.
        """
        if self._differential_inv_fn is not None:
            return self._differential_inv_fn(g)
        a = self.algebra
        if self.kind == TwoCocycle.ZERO:
            return np.zeros((a.dim, a.dim))
        cg_inv = self.value(g.inv())
        chat = self.infinitesimal().matrix
        cols = np.empty((a.dim, a.dim))
        for i in range(a.dim):
            e = np.zeros(a.dim)
            e[i] = 1.0
            cols[:, i] = a.ad(e).T @ cg_inv
        return cols + chat


def kernel_check(cocycle, g_minus, tol=1e-10):
    return bool(np.abs(cocycle.value(g_minus)).max(initial=0.0) < tol)


def random_point(algebra, rng, scale=0.6):
    """A generic factorizable point: exp(X+) exp(X-) with bounded coords."""
    xp = algebra.project(scale * rng.standard_normal(algebra.dim), "plus")
    xm = algebra.project(scale * rng.standard_normal(algebra.dim), "minus")
    return exp(algebra, xp).mul(exp(algebra, xm))
