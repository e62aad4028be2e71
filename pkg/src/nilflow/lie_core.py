"""Two-step metric Lie algebras, their groups in exponential coordinates,
and rational lattices.

Scalars come in two modes: exact (fractions.Fraction) for certificates and
IEEE doubles for dynamics.  Every operation here works in either mode; the
bracket table is stored exactly and converted to a float tensor on demand.
"""

from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from . import linalg_exact as lx


@dataclass
class AlgebraData:
    """A two-step metric Lie algebra n = v (+) z with orthonormal bases.

    bracket_table[p][q] is the z-vector [e_p, e_q] for v-basis vectors
    e_p, e_q; it must be antisymmetric with zero diagonal.
    """

    dim_v: int
    dim_z: int
    v_names: tuple
    z_names: tuple
    bracket_table: tuple  # bracket_table[p][q] -> tuple of dim_z Fractions
    _tensor: np.ndarray = field(default=None, repr=False, compare=False)

    def __post_init__(self):
        if len(self.bracket_table) != self.dim_v:
            raise ValueError("bracket table has wrong v-dimension")
        for p in range(self.dim_v):
            for q in range(self.dim_v):
                row = self.bracket_table[p][q]
                if len(row) != self.dim_z:
                    raise ValueError("bracket table has wrong z-dimension")
                neg = tuple(-x for x in self.bracket_table[q][p])
                if tuple(row) != neg:
                    raise ValueError("bracket table is not antisymmetric")

    @property
    def dim(self):
        return self.dim_v + self.dim_z

    def tensor(self):
        """Float structure tensor T[p, q, r] = <[e_p, e_q], Z_r>."""
        if self._tensor is None:
            t = np.zeros((self.dim_v, self.dim_v, self.dim_z))
            for p in range(self.dim_v):
                for q in range(self.dim_v):
                    t[p, q] = [float(x) for x in self.bracket_table[p][q]]
            self._tensor = t
        return self._tensor


def bracket(alg, a, b):
    """Lie bracket of two full algebra vectors (length dim_v + dim_z).

    Only the v-components contribute; the result lives in z.
    """
    n = alg.dim
    if len(a) != n or len(b) != n:
        raise ValueError(f"expected vectors of dimension {n}")
    out = [0] * alg.dim_z
    for p in range(alg.dim_v):
        ap = a[p]
        if ap == 0:
            continue
        for q in range(alg.dim_v):
            bq = b[q]
            if bq == 0:
                continue
            tab = alg.bracket_table[p][q]
            for r in range(alg.dim_z):
                if tab[r] != 0:
                    out[r] += ap * bq * tab[r]
    return out


def bracket_v(alg, av, bv):
    """Bracket of two v-vectors (length dim_v)."""
    return bracket(alg, list(av) + [0] * alg.dim_z, list(bv) + [0] * alg.dim_z)


def bracket_v_np(alg, av, bv):
    """Float bracket of v-vectors; supports batched leading axes."""
    return np.einsum("...p,...q,pqr->...r", av, bv, alg.tensor())


def j_matrix(alg, z):
    """The skew map j(Z) on v defined by <j(Z)X, Y> = <Z, [X, Y]>."""
    if len(z) != alg.dim_z:
        raise ValueError(f"expected a z-vector of dimension {alg.dim_z}")
    jm = [[0] * alg.dim_v for _ in range(alg.dim_v)]
    for p in range(alg.dim_v):
        for q in range(alg.dim_v):
            tab = alg.bracket_table[p][q]
            jm[q][p] = sum(z[r] * tab[r] for r in range(alg.dim_z))
    return jm


def j_matrix_np(alg, z):
    """Float j(Z); z may carry batch axes on the left."""
    return np.einsum("pqr,...r->...qp", alg.tensor(), np.asarray(z, float))


@dataclass
class GroupElement:
    """An element (v, z) = exp(v + z) of the simply connected group N(j)."""

    alg: AlgebraData
    v: tuple
    z: tuple

    def __post_init__(self):
        if len(self.v) != self.alg.dim_v or len(self.z) != self.alg.dim_z:
            raise ValueError("component dimensions do not match the algebra")


def group_identity(alg):
    return GroupElement(alg, (0,) * alg.dim_v, (0,) * alg.dim_z)


def group_mul(a, b):
    """BCH product (v, z)(v', z') = (v + v', z + z' + [v, v']/2)."""
    if a.alg is not b.alg:
        raise ValueError("elements live over different algebras")
    half = Fraction(1, 2) if _is_exact(a.v) and _is_exact(b.v) else 0.5
    corr = bracket_v(a.alg, a.v, b.v)
    v = tuple(x + y for x, y in zip(a.v, b.v))
    z = tuple(x + y + half * c for x, y, c in zip(a.z, b.z, corr))
    return GroupElement(a.alg, v, z)


def group_inv(a):
    return GroupElement(a.alg, tuple(-x for x in a.v), tuple(-x for x in a.z))


def conjugate(g, h):
    """g h g^{-1} = (v', z' + [v, v']) for g = (v, z), h = (v', z')."""
    if g.alg is not h.alg:
        raise ValueError("elements live over different algebras")
    corr = bracket_v(g.alg, g.v, h.v)
    return GroupElement(g.alg, tuple(h.v), tuple(x + c for x, c in zip(h.z, corr)))


def _is_exact(vec):
    return all(isinstance(x, (int, Fraction)) for x in vec)


@dataclass
class RationalLattice:
    """A rank-r lattice in Q^n given by an exact, independent basis."""

    ambient_dim: int
    basis: tuple  # tuple of basis vectors, each a tuple of Fractions
    _gram: tuple = field(default=None, repr=False, compare=False)

    def __post_init__(self):
        basis = tuple(
            tuple(Fraction(x) for x in vec) for vec in self.basis
        )
        object.__setattr__(self, "basis", basis)
        for vec in basis:
            if len(vec) != self.ambient_dim:
                raise ValueError("basis vector has wrong ambient dimension")
        if basis and lx.rank([list(v) for v in basis]) != len(basis):
            raise ValueError("lattice basis is linearly dependent")

    @property
    def rank(self):
        return len(self.basis)

    def gram(self):
        if self._gram is None:
            g = tuple(
                tuple(sum(a * b for a, b in zip(u, w)) for w in self.basis)
                for u in self.basis
            )
            object.__setattr__(self, "_gram", g)
        return self._gram


def lattice_contains(lat, w):
    """Exact membership: w is an integer combination of the basis."""
    if len(w) != lat.ambient_dim:
        raise ValueError("vector has wrong ambient dimension")
    w = [Fraction(x) for x in w]
    if lat.rank == 0:
        return all(x == 0 for x in w)
    cols = [list(v) for v in zip(*lat.basis)]  # ambient x rank
    x = lx.solve(cols, w)
    if x is None:
        return False
    return all(c.denominator == 1 for c in x)


def lattice_coordinates(lat, w):
    """Exact basis coordinates of w, or None if w is outside the span."""
    w = [Fraction(x) for x in w]
    cols = [list(v) for v in zip(*lat.basis)]
    return lx.solve(cols, w)


def dual_lattice(lat):
    """Dual basis: inverse transpose of the (full-rank) basis matrix."""
    if lat.rank != lat.ambient_dim:
        raise ValueError("dual_lattice requires a full-rank lattice")
    cols = [list(v) for v in zip(*lat.basis)]  # basis vectors as columns
    inv = lx.inverse(cols)
    # rows of inv are the dual basis vectors: <dual_i, b_j> = delta_ij
    return RationalLattice(lat.ambient_dim, tuple(tuple(row) for row in inv))


def integer_lattice(n):
    return RationalLattice(n, tuple(
        tuple(Fraction(1 if i == j else 0) for j in range(n)) for i in range(n)
    ))
