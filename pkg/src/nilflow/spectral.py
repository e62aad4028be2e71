"""Exact spectral machinery: characteristic polynomials, kernels of j(Z),
lattice intersections, length-spectrum slices, and the isospectrality
certificate for the pair (M, M').
"""

from dataclasses import dataclass
from fractions import Fraction
from math import isqrt, lcm

import numpy as np

from . import linalg_exact as lx
from .lie_core import RationalLattice, bracket_v, j_matrix, lattice_contains
from .report import Certificate


@dataclass
class CharPoly:
    """Monic characteristic polynomial, coefficients highest degree first."""

    coefficients: tuple

    @property
    def degree(self):
        return len(self.coefficients) - 1

    def __eq__(self, other):
        return tuple(self.coefficients) == tuple(other.coefficients)

    def evaluate(self, x):
        acc = Fraction(0)
        for c in self.coefficients:
            acc = acc * x + c
        return acc


def char_poly(mat):
    if not mat or any(len(row) != len(mat) for row in mat):
        raise ValueError("char_poly requires a square matrix")
    return CharPoly(tuple(lx.char_poly(mat)))


def char_poly_batch_int(mats):
    """Faddeev-LeVerrier over int64 for a batch of small integer matrices.

    mats: (n, d, d) integer array with entries small enough that the
    recurrence stays inside int64 (checked).  Returns (n, d+1) coefficients,
    highest degree first.
    """
    a = np.asarray(mats, dtype=np.int64)
    n, d, _ = a.shape
    if np.abs(a).max(initial=0) > 80:
        raise OverflowError("entries too large for the int64 fast path")
    coeffs = np.zeros((n, d + 1), dtype=np.int64)
    coeffs[:, 0] = 1
    m = np.zeros_like(a)
    eye = np.eye(d, dtype=np.int64)
    for k in range(1, d + 1):
        m = np.einsum("nij,njk->nik", a, m) + coeffs[:, k - 1, None, None] * eye
        tr = np.einsum("nij,nji->n", a, m)
        q, rem = np.divmod(-tr, k)
        if rem.any():
            raise ArithmeticError("Faddeev-LeVerrier division was not exact")
        coeffs[:, k] = q
    return coeffs


def kernel_subspace(alg, z):
    """Exact rational basis of ker j(Z)."""
    z = [Fraction(x) for x in z]
    return lx.nullspace(j_matrix(alg, z))


def lattice_intersection(lat, subspace_basis):
    """The sublattice of lat lying inside span(subspace_basis), exactly.

    Works through the integer kernel of the orthogonal-complement
    constraints expressed in lattice coordinates.
    """
    if lat.rank == 0 or not subspace_basis:
        return RationalLattice(lat.ambient_dim, ())
    # constraints: x in span(S)  <=>  C^T x = 0 for C a basis of span(S)-perp
    s_rows = [[Fraction(x) for x in v] for v in subspace_basis]
    comp = lx.nullspace(s_rows)  # vectors orthogonal to nothing? no:
    # nullspace of S (rows) gives vectors w with S w = 0, i.e. w ⟂ all rows
    # under the standard pairing; those are exactly the linear functionals
    # vanishing on span(S) since the ambient basis is orthonormal.
    if not comp:
        return lat  # subspace is the whole ambient space
    basis_cols = [list(v) for v in lat.basis]  # rank x ambient
    constraint = [
        [sum(c[i] * b[i] for i in range(lat.ambient_dim)) for b in basis_cols]
        for c in comp
    ]  # (#constraints) x rank, rational
    ints, _ = lx.clear_denominators(constraint)
    kernel = lx.integer_kernel(ints)
    new_basis = []
    for coeffs in kernel:
        vec = [Fraction(0)] * lat.ambient_dim
        for c, b in zip(coeffs, lat.basis):
            for i in range(lat.ambient_dim):
                vec[i] += c * b[i]
        new_basis.append(tuple(vec))
    return RationalLattice(lat.ambient_dim, tuple(new_basis))


@dataclass
class LengthSpectrumSlice:
    """All squared lengths <= cutoff, with multiplicities, sorted ascending."""

    cutoff: Fraction
    entries: tuple  # tuple of (squared_length: Fraction, multiplicity: int)

    def __eq__(self, other):
        return self.entries == other.entries and self.cutoff == other.cutoff


def length_spectrum(lat, r2):
    """Exact enumeration of all lattice vectors with |w|^2 <= r2.

    Integer coordinates are boxed through the diagonal of the inverse Gram
    matrix (exact rationals, no floating square roots); norms are computed
    in scaled integers.
    """
    r2 = Fraction(r2)
    if r2 < 0:
        raise ValueError("cutoff must be nonnegative")
    if lat.rank == 0:
        return LengthSpectrumSlice(r2, ((Fraction(0), 1),))
    ints, den = lx.clear_denominators([list(v) for v in lat.basis])
    b = np.array(ints, dtype=np.int64)  # rank x ambient
    gram = b @ b.T
    gram_frac = [[Fraction(int(x)) for x in row] for row in gram]
    ginv = lx.inverse(gram_frac)
    scaled_r2 = r2 * den * den
    bounds = []
    for i in range(lat.rank):
        # x_i^2 <= scaled_r2 * (G^-1)_ii for any x in the ellipsoid
        lim = scaled_r2 * ginv[i][i]
        bounds.append(isqrt(lim.numerator // lim.denominator))
    counts = {}
    ranges = [np.arange(-m, m + 1, dtype=np.int64) for m in bounds]
    grids = np.meshgrid(*ranges, indexing="ij")
    coords = np.stack([g.ravel() for g in grids], axis=1)
    cutoff_times_den = scaled_r2  # Fraction
    chunk = 200_000
    for start in range(0, coords.shape[0], chunk):
        x = coords[start:start + chunk]
        norms = np.einsum("ni,ij,nj->n", x, gram, x)
        limit = cutoff_times_den
        keep = norms * limit.denominator <= int(limit.numerator)
        vals, mult = np.unique(norms[keep], return_counts=True)
        for v, m in zip(vals.tolist(), mult.tolist()):
            key = Fraction(int(v), den * den)
            counts[key] = counts.get(key, 0) + int(m)
    entries = tuple(sorted(counts.items()))
    return LengthSpectrumSlice(r2, entries)


# ---------------------------------------------------------------------------
# isospectrality certificate for the pair


def _dual_z_points(bound):
    """All Z = Z_c in the dual lattice (2Z)^3 with |coordinates| <= bound."""
    vals = [2 * k for k in range(-(bound // 2), bound // 2 + 1)]
    return [
        (a, b, c)
        for a in vals
        for b in vals
        for c in vals
    ]


def _claimed_coeffs(c):
    """lambda^5 + (c_k^2 + |c|^2) lambda^3 + c_k^2 |c|^2 lambda for integer c."""
    ci, cj, ck = (int(x) for x in c)
    n2 = ci * ci + cj * cj + ck * ck
    return (1, 0, ck * ck + n2, 0, ck * ck * n2, 0)


def _int_j(alg, c):
    jm = j_matrix(alg, [Fraction(x) for x in c])
    return [[int(x) for x in row] for row in jm]


def char_poly_identity_check(alg, alg_p, grid_side=6, n_random=0, rng=None):
    """Exact check that j and j' share the claimed characteristic polynomial.

    Evaluates on a deterministic integer grid of the given side (enough to
    pin down the degree-5-per-variable coefficient polynomials) plus random
    integer points; returns (ok, witness) with witness the first failing c.
    """
    points = [
        (a, b, c)
        for a in range(grid_side)
        for b in range(grid_side)
        for c in range(grid_side)
    ]
    if n_random:
        draws = rng.integers(-9, 10, size=(n_random, 3))
        points = points + [tuple(int(x) for x in row) for row in draws]
    mats = np.array([_int_j(alg, c) for c in points], dtype=np.int64)
    mats_p = np.array([_int_j(alg_p, c) for c in points], dtype=np.int64)
    coeffs = char_poly_batch_int(mats)
    coeffs_p = char_poly_batch_int(mats_p)
    claimed = np.array([_claimed_coeffs(c) for c in points], dtype=np.int64)
    bad = np.nonzero(
        np.any(coeffs != coeffs_p, axis=1) | np.any(coeffs != claimed, axis=1)
    )[0]
    if bad.size:
        return False, points[int(bad[0])]
    return True, None


def gw_certificate(pair, r2, dual_bound, rng=None):
    """Certificate for the isospectrality hypotheses of the pair.

    (a) char-poly equality of j(Z), j'(Z) on a deterministic grid plus all
        dual-lattice Z with bounded coordinates (and random samples when an
        rng is supplied); (b) [M,M] inside 2*Lambda for both brackets,
        exactly; (c) kernel-lattice length-spectrum equality up to r2 for
        bounded dual-lattice Z.
    """
    m_data, mp_data = pair
    alg, alg_p = m_data.alg, mp_data.alg
    cert = Certificate("gordon_wilson_isospectrality", f"{m_data.name}/{mp_data.name}")
    r2 = Fraction(r2)

    n_random = 200 if rng is not None else 0
    ok, witness = char_poly_identity_check(alg, alg_p, 6, n_random, rng)
    cert.add(
        "char_poly_identity_grid",
        ok,
        value=witness,
        note="evidence (sampled) beyond the coefficient-pinning grid",
    )

    dual_pts = _dual_z_points(dual_bound)
    dual_int = [p for p in dual_pts if p != (0, 0, 0)]
    mats = np.array([_int_j(alg, c) for c in dual_int], dtype=np.int64)
    mats_p = np.array([_int_j(alg_p, c) for c in dual_int], dtype=np.int64)
    same = bool(np.array_equal(char_poly_batch_int(mats), char_poly_batch_int(mats_p)))
    cert.add("char_poly_equal_on_dual_lattice", same, value=len(dual_int))

    twice_z = RationalLattice(
        3, tuple(tuple(2 * x for x in b) for b in m_data.lattice_z.basis)
    )
    for data in (m_data, mp_data):
        ok = True
        for a in data.lattice_v.basis:
            for b in data.lattice_v.basis:
                if not lattice_contains(twice_z, bracket_v(data.alg, a, b)):
                    ok = False
        cert.add(f"bracket_of_lattice_in_2Lambda[{data.name}]", ok)

    # kernel-lattice length spectra over the bounded dual-lattice slab
    spectra_checked = 0
    identical_lattices = 0
    for c in _dual_z_points(dual_bound):
        cz = [Fraction(x) for x in c]
        ker = kernel_subspace(alg, cz)
        ker_p = kernel_subspace(alg_p, cz)
        lat = lattice_intersection(m_data.lattice_v, ker)
        lat_p = lattice_intersection(mp_data.lattice_v, ker_p)
        if set(lat.basis) == set(lat_p.basis):
            identical_lattices += 1
            continue
        sp = length_spectrum(lat, r2)
        sp_p = length_spectrum(lat_p, r2)
        spectra_checked += 1
        if sp != sp_p:
            cert.add(
                "kernel_lattice_length_spectra",
                False,
                value={"witness_c": c},
                tolerance=r2,
            )
            return cert
    cert.add(
        "kernel_lattice_length_spectra",
        True,
        value={
            "enumerated": spectra_checked,
            "identical_lattices": identical_lattices,
        },
        tolerance=r2,
        note="finite slice up to R^2; necessary condition for isometry",
    )
    return cert
