"""Manin triples as concrete basis data.

A ``BasisAlgebra`` is a finite-dimensional real Lie algebra g = g+ (+) g-
with an ad-invariant nondegenerate pairing making both summands isotropic.
Vectors and covectors are plain numpy arrays of coordinates in the chosen
basis / dual basis; the pairing of a covector with a vector is the Euclidean
dot of coordinates, so all metric content lives in the ``pairing`` matrix.

Two backends share the interface: a dense one driven by the rank-3 structure
constant tensor, and an implicit one (periodic lattice loop algebras, see
``liedouble.loop``) that supplies a pointwise bracket callable instead.
"""

import json

import numpy as np

__all__ = [
    "BasisAlgebra",
    "TwoCocycle",
    "algebra_from_matrices",
    "algebra_from_declaration",
    "get_algebra",
    "load_algebra",
    "is_character",
    "validate_manin",
    "BUILTIN_ALGEBRAS",
]


class BasisAlgebra:
    """A Lie algebra with a fixed basis adapted to the Manin split.

    Coordinates are ordered so that ``plus_indices`` select the g+ basis
    vectors and ``minus_indices`` the g- ones; together they exhaust the
    basis.
    """

    def __init__(self, name, labels, pairing, plus_indices, minus_indices,
                 structure_constants=None, basis_matrices=None,
                 bracket_fn=None, ad_fn=None,
                 vec_to_mat=None, mat_to_vec=None, identity_matrix=None,
                 group_memberships=None, factorizer=None):
        self.name = name
        self.labels = list(labels)
        self.dim = len(self.labels)
        self.pairing = np.asarray(pairing, dtype=float)
        self.plus_indices = np.asarray(plus_indices, dtype=int)
        self.minus_indices = np.asarray(minus_indices, dtype=int)
        self.structure_constants = (
            None if structure_constants is None
            else np.asarray(structure_constants, dtype=float))
        self.basis_matrices = basis_matrices
        self._bracket_fn = bracket_fn
        self._ad_fn = ad_fn
        self._vec_to_mat = vec_to_mat
        self._mat_to_vec = mat_to_vec
        self.identity_matrix = identity_matrix
        # optional hooks used by the group layer
        self.group_memberships = group_memberships or {}
        self.factorizer = factorizer

        if self.pairing.shape != (self.dim, self.dim):
            raise ValueError("pairing shape does not match dim")
        if self.structure_constants is None and bracket_fn is None:
            raise ValueError("need structure constants or a bracket callable")
        self._pairing_inv = np.linalg.inv(self.pairing)

    # --- core bilinear operations -------------------------------------

    def bracket(self, x, y):
        x = np.asarray(x, dtype=float)
        y = np.asarray(y, dtype=float)
        if x.shape != (self.dim,) or y.shape != (self.dim,):
            raise ValueError("vector length does not match algebra dim")
        if self.structure_constants is not None:
            return np.einsum("ijk,i,j->k", self.structure_constants, x, y)
        return self._bracket_fn(x, y)

    def ad(self, x):
        """Matrix of ad_X on coordinates: ad(x) @ y == bracket(x, y)."""
        x = np.asarray(x, dtype=float)
        if self.structure_constants is not None:
            return np.einsum("ijk,i->jk", self.structure_constants, x).T
        if self._ad_fn is not None:
            return self._ad_fn(x)
        cols = [self._bracket_fn(x, e) for e in np.eye(self.dim)]
        return np.column_stack(cols)

    def pair(self, x, y):
        x = np.asarray(x, dtype=float)
        y = np.asarray(y, dtype=float)
        if x.shape != (self.dim,) or y.shape != (self.dim,):
            raise ValueError("vector length does not match algebra dim")
        return float(x @ self.pairing @ y)

    # --- identifications and projections ------------------------------

    def psi(self, x):
        """g -> g* via the pairing: <psi(x), y> = (x, y)_g."""
        return self.pairing @ np.asarray(x, dtype=float)

    def psi_bar(self, eta):
        """Inverse of psi."""
        return self._pairing_inv @ np.asarray(eta, dtype=float)

    def _side_indices(self, side):
        if side == "plus":
            return self.plus_indices
        if side == "minus":
            return self.minus_indices
        raise ValueError("side must be 'plus' or 'minus'")

    def project(self, x, side):
        out = np.zeros(self.dim)
        idx = self._side_indices(side)
        out[idx] = np.asarray(x, dtype=float)[idx]
        return out

    def project_dual(self, eta, side):
        """Projection g* -> g(+/-)* (covectors vanishing on the other factor)."""
        return self.project(eta, side)

    # --- coadjoint actions ---------------------------------------------

    def ad_star(self, x, eta):
        """<ad_star(x, eta), y> = -<eta, [x, y]>."""
        return -self.ad(x).T @ np.asarray(eta, dtype=float)

    def coad(self, x, eta):
        """Transpose-derivative convention: <coad(x, eta), y> = <eta, [x, y]>.

        This is d/dt|_0 of eta ∘ Ad_{exp(tx)} and is the form the extended
        symplectic machinery uses; ``ad_star`` is its negative.
        """
        return self.ad(x).T @ np.asarray(eta, dtype=float)

    # --- matrix representation hooks -----------------------------------

    def vec_to_mat(self, x):
        if self._vec_to_mat is None:
            raise ValueError("algebra %r has no matrix representation" % self.name)
        return self._vec_to_mat(np.asarray(x, dtype=float))

    def mat_to_vec(self, m):
        if self._mat_to_vec is None:
            raise ValueError("algebra %r has no matrix representation" % self.name)
        return self._mat_to_vec(m)

    @property
    def has_representation(self):
        return self._vec_to_mat is not None


class TwoCocycle:
    """Antisymmetric 2-cocycle c(X,Y) = <c_hat(X), Y> given by its hat matrix."""

    ZERO = "zero"
    COBOUNDARY = "coboundary"
    LATTICE = "lattice-derivative"

    def __init__(self, algebra, kind, matrix, mu0=None, level=None):
        self.algebra = algebra
        self.kind = kind
        self.matrix = np.asarray(matrix, dtype=float)
        self.mu0 = None if mu0 is None else np.asarray(mu0, dtype=float)
        self.level = level

    @classmethod
    def zero(cls, algebra):
        return cls(algebra, cls.ZERO, np.zeros((algebra.dim, algebra.dim)))

    @classmethod
    def coboundary(cls, algebra, mu0):
        mu0 = np.asarray(mu0, dtype=float)
        cols = [algebra.ad_star(e, mu0) for e in np.eye(algebra.dim)]
        return cls(algebra, cls.COBOUNDARY, np.column_stack(cols), mu0=mu0)

    def hat(self, x):
        return self.matrix @ np.asarray(x, dtype=float)

    def eval(self, x, y):
        return float(self.hat(x) @ np.asarray(y, dtype=float))

    def is_isotropic_exchanging(self, tol=1e-12):
        """True if c_hat maps g+- into the dual of the opposite factor.

        This is the hypothesis under which the restricted bracket carries no
        cocycle terms; zero cocycles satisfy it trivially.
        """
        a = self.algebra
        pp = self.matrix[np.ix_(a.plus_indices, a.plus_indices)]
        mm = self.matrix[np.ix_(a.minus_indices, a.minus_indices)]
        return max(np.abs(pp).max(initial=0.0), np.abs(mm).max(initial=0.0)) < tol


def cocycle_identity_residual(cocycle, x, y, z):
    """c([x,y],z) + c([y,z],x) + c([z,x],y)."""
    a = cocycle.algebra
    return (cocycle.eval(a.bracket(x, y), z)
            + cocycle.eval(a.bracket(y, z), x)
            + cocycle.eval(a.bracket(z, x), y))


def is_character(algebra, eta_minus, tol=1e-12):
    """True iff eta_minus vanishes on [g-, g-].

    eta_minus must be supported on the dual of g- (its g+* projection zero).
    """
    eta_minus = np.asarray(eta_minus, dtype=float)
    sup = algebra.project_dual(eta_minus, "plus")
    if np.abs(sup).max(initial=0.0) > tol:
        raise ValueError("eta_minus has support outside the dual of g-")
    emat = np.eye(algebra.dim)
    for i in algebra.minus_indices:
        for j in algebra.minus_indices:
            if j <= i:
                continue
            if abs(eta_minus @ algebra.bracket(emat[i], emat[j])) > tol:
                return False
    return True


# --- validation ---------------------------------------------------------

def _dense_checks(a):
    c = a.structure_constants
    p = a.pairing
    res = {}
    res["bracket_antisymmetry"] = float(np.abs(c + c.transpose(1, 0, 2)).max())
    jac = np.einsum("ijm,mkl->ijkl", c, c)
    res["jacobi"] = float(np.abs(jac + jac.transpose(1, 2, 0, 3)
                                 + jac.transpose(2, 0, 1, 3)).max())
    t = np.einsum("ijm,mk->ijk", c, p)
    res["pairing_ad_invariance"] = float(np.abs(t + t.transpose(0, 2, 1)).max())
    pi, mi = a.plus_indices, a.minus_indices
    res["closure_plus"] = float(np.abs(c[np.ix_(pi, pi, mi)]).max(initial=0.0))
    res["closure_minus"] = float(np.abs(c[np.ix_(mi, mi, pi)]).max(initial=0.0))
    return res


def _sampled_checks(a, rng, samples=24):
    res = {"bracket_antisymmetry": 0.0, "jacobi": 0.0,
           "pairing_ad_invariance": 0.0, "closure_plus": 0.0,
           "closure_minus": 0.0}
    for _ in range(samples):
        x, y, z = rng.standard_normal((3, a.dim))
        res["bracket_antisymmetry"] = max(
            res["bracket_antisymmetry"],
            float(np.abs(a.bracket(x, y) + a.bracket(y, x)).max()))
        jac = (a.bracket(x, a.bracket(y, z)) + a.bracket(y, a.bracket(z, x))
               + a.bracket(z, a.bracket(x, y)))
        res["jacobi"] = max(res["jacobi"], float(np.abs(jac).max()))
        res["pairing_ad_invariance"] = max(
            res["pairing_ad_invariance"],
            abs(a.pair(a.bracket(x, y), z) + a.pair(y, a.bracket(x, z))))
        xp, yp = a.project(x, "plus"), a.project(y, "plus")
        xm, ym = a.project(x, "minus"), a.project(y, "minus")
        res["closure_plus"] = max(
            res["closure_plus"],
            float(np.abs(a.project(a.bracket(xp, yp), "minus")).max()))
        res["closure_minus"] = max(
            res["closure_minus"],
            float(np.abs(a.project(a.bracket(xm, ym), "plus")).max()))
    return res


def validate_manin(a, tol=1e-12, rng=None):
    """Run the structural invariants; returns {check: residual} plus 'passed'."""
    if a.structure_constants is not None and a.dim <= 64:
        res = _dense_checks(a)
    else:
        res = _sampled_checks(a, rng or np.random.default_rng(0))
    p = a.pairing
    res["pairing_symmetry"] = float(np.abs(p - p.T).max())
    res["pairing_condition"] = float(np.linalg.cond(p))
    pi, mi = a.plus_indices, a.minus_indices
    res["isotropy_plus"] = float(np.abs(p[np.ix_(pi, pi)]).max(initial=0.0))
    res["isotropy_minus"] = float(np.abs(p[np.ix_(mi, mi)]).max(initial=0.0))
    res["index_partition"] = float(
        0.0 if sorted(list(pi) + list(mi)) == list(range(a.dim)) else 1.0)
    failures = [k for k, v in res.items()
                if k != "pairing_condition" and v > tol]
    if res["pairing_condition"] > 1e12:
        failures.append("pairing_condition")
    return {"checks": res, "failures": failures, "passed": not failures}


# --- constructors --------------------------------------------------------

def _rep_hooks(basis_matrices):
    mats = np.asarray(basis_matrices)
    dim = mats.shape[0]
    flat = mats.reshape(dim, -1)
    if np.iscomplexobj(mats):
        flat = np.hstack([flat.real, flat.imag])
    pinv = np.linalg.pinv(flat.T)

    def vec_to_mat(x):
        return np.tensordot(x, mats, axes=(0, 0))

    def mat_to_vec(m):
        m = np.asarray(m)
        if m.ndim == 3:
            # batch of matrices -> (batch, dim) coordinate rows
            v = m.reshape(m.shape[0], -1)
            if np.iscomplexobj(mats):
                v = np.concatenate([v.real, v.imag], axis=1)
            else:
                v = v.real
            return v @ pinv.T
        v = m.reshape(-1)
        if np.iscomplexobj(mats):
            v = np.concatenate([v.real, v.imag])
        else:
            v = v.real
        return pinv @ v

    return vec_to_mat, mat_to_vec


def algebra_from_matrices(name, labels, basis_matrices, pairing_fn,
                          plus_indices, minus_indices, **kw):
    """Build a dense BasisAlgebra from a faithful matrix representation.

    Structure constants and the pairing matrix are extracted numerically,
    which guarantees the coordinate bracket matches matrix commutators.
    """
    mats = np.asarray(basis_matrices)
    dim = mats.shape[0]
    vec_to_mat, mat_to_vec = _rep_hooks(mats)
    c = np.zeros((dim, dim, dim))
    for i in range(dim):
        for j in range(dim):
            comm = mats[i] @ mats[j] - mats[j] @ mats[i]
            c[i, j] = mat_to_vec(comm)
    p = np.zeros((dim, dim))
    for i in range(dim):
        for j in range(dim):
            p[i, j] = pairing_fn(mats[i], mats[j])
    return BasisAlgebra(
        name, labels, p, plus_indices, minus_indices,
        structure_constants=c, basis_matrices=mats,
        vec_to_mat=vec_to_mat, mat_to_vec=mat_to_vec,
        identity_matrix=np.eye(mats.shape[1],
                               dtype=complex if np.iscomplexobj(mats) else float),
        **kw)


def _hat3(v):
    return np.array([[0.0, -v[2], v[1]],
                     [v[2], 0.0, -v[0]],
                     [-v[1], v[0], 0.0]])


def _so3_cotangent():
    """Semidirect double so(3) (semidirect) so(3)*: abelian minus factor.

    Represented on 4x4 real matrices [[hat(x), mu], [0, 0]]; the group is
    rotations with translations, factoring globally as g = (R,0)(I, v).
    """
    mats = []
    for i in range(3):
        e = np.zeros(3)
        e[i] = 1.0
        m = np.zeros((4, 4))
        m[:3, :3] = _hat3(e)
        mats.append(m)
    for i in range(3):
        m = np.zeros((4, 4))
        m[i, 3] = 1.0
        mats.append(m)

    def pairing_fn(a, b):
        # ((x, mu), (y, nu)) = <mu, y> + <nu, x>
        xa, ma = _so3_split(a)
        xb, mb = _so3_split(b)
        return float(ma @ xb + mb @ xa)

    labels = ["e1", "e2", "e3", "f1", "f2", "f3"]
    return algebra_from_matrices(
        "so3-cotangent", labels, mats, pairing_fn, [0, 1, 2], [3, 4, 5],
        group_memberships={
            "plus": _so3_member_plus, "minus": _so3_member_minus},
        factorizer=_so3_factorize)


def _so3_split(m):
    a = m[:3, :3]
    x = np.array([a[2, 1], a[0, 2], a[1, 0]])
    return x, m[:3, 3].copy()


def _so3_member_plus(m, tol):
    r = m[:3, :3]
    return (np.abs(m[:3, 3]).max() < tol
            and np.abs(r.T @ r - np.eye(3)).max() < tol
            and abs(np.linalg.det(r) - 1.0) < tol
            and np.abs(m[3] - [0, 0, 0, 1]).max() < tol)


def _so3_member_minus(m, tol):
    return (np.abs(m[:3, :3] - np.eye(3)).max() < tol
            and np.abs(m[3] - [0, 0, 0, 1]).max() < tol)


def _so3_factorize(m):
    r = m[:3, :3]
    gp = np.eye(4)
    gp[:3, :3] = r
    gm = np.eye(4)
    gm[:3, 3] = np.linalg.solve(r, m[:3, 3])
    return gp, gm


_SIGMA = [np.array([[0, 1], [1, 0]], dtype=complex),
          np.array([[0, -1j], [1j, 0]], dtype=complex),
          np.array([[1, 0], [0, -1]], dtype=complex)]


def _sl2c_iwasawa():
    """sl(2,C) as a real algebra: su(2) + upper-triangular real-diagonal part.

    Pairing is -2 Im tr(XY); the group factorization SL(2,C) = SU(2) SB(2,C)
    is global (QR with positive real diagonal).
    """
    mats = [-0.5j * s for s in _SIGMA]
    mats.append(np.array([[0.5, 0], [0, -0.5]], dtype=complex))
    mats.append(np.array([[0, 1], [0, 0]], dtype=complex))
    mats.append(np.array([[0, 1j], [0, 0]], dtype=complex))

    def pairing_fn(a, b):
        return float(-2.0 * np.imag(np.trace(a @ b)))

    labels = ["e1", "e2", "e3", "b1", "b2", "b3"]
    return algebra_from_matrices(
        "sl2c-iwasawa", labels, mats, pairing_fn, [0, 1, 2], [3, 4, 5],
        group_memberships={
            "plus": _su2_member, "minus": _sb2_member},
        factorizer=_sl2c_factorize)


def _su2_member(m, tol):
    return (np.abs(m @ m.conj().T - np.eye(2)).max() < tol
            and abs(np.linalg.det(m) - 1.0) < tol)


def _sb2_member(m, tol):
    return (abs(m[1, 0]) < tol
            and abs(np.linalg.det(m) - 1.0) < tol
            and abs(m[0, 0].imag) < tol and m[0, 0].real > 0)


def _sl2c_factorize(m):
    q, r = np.linalg.qr(m)
    ph = np.diagonal(r).copy()
    ph = ph / np.abs(ph)
    q = q * ph
    r = (1.0 / ph)[:, None] * r
    return q, r


BUILTIN_ALGEBRAS = {
    "so3-cotangent": _so3_cotangent,
    "sl2c-iwasawa": _sl2c_iwasawa,
}


def get_algebra(name):
    try:
        return BUILTIN_ALGEBRAS[name]()
    except KeyError:
        raise KeyError("unknown built-in algebra %r" % name) from None


def algebra_from_declaration(decl):
    """Build a dense algebra from a declaration dict (see README for schema)."""
    required = {"name", "dim", "labels", "structure_constants", "pairing",
                "plus_indices", "minus_indices"}
    unknown = set(decl) - required - {"cocycle"}
    if unknown:
        raise ValueError("unknown declaration keys: %s" % sorted(unknown))
    missing = required - set(decl)
    if missing:
        raise ValueError("missing declaration keys: %s" % sorted(missing))
    dim = int(decl["dim"])
    c = np.zeros((dim, dim, dim))
    for i, j, k, value in decl["structure_constants"]:
        c[int(i), int(j), int(k)] = float(value)
    a = BasisAlgebra(decl["name"], decl["labels"], np.asarray(decl["pairing"]),
                     decl["plus_indices"], decl["minus_indices"],
                     structure_constants=c)
    if len(decl["labels"]) != dim:
        raise ValueError("labels length does not match dim")
    return a


def load_algebra(source):
    """Resolve a built-in name, a declaration dict, or a JSON file path."""
    if isinstance(source, BasisAlgebra):
        return source
    if isinstance(source, dict):
        return algebra_from_declaration(source)
    if source in BUILTIN_ALGEBRAS:
        return get_algebra(source)
    with open(source) as fh:
        return algebra_from_declaration(json.load(fh))
