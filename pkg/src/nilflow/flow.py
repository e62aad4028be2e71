"""Geodesic flow on the two-step groups, in left-trivialized coordinates.

A tangent state is (v, z, V, Z): base point (v, z) in exponential
coordinates and velocity (V, Z) read in the left-invariant orthonormal
frame.  The geodesic equations are

    v' = V,   z' = Z + [v, V]/2,   V' = j(Z) V,   Z' = 0,

so V precesses by the one-parameter orthogonal group e^{t j(Z)} while Z is
conserved.  For the isospectral pair the precession splits into two
invariant planes (frequencies c_k and |c|) plus the kernel line R Y_c,
which gives a closed-form flow; a batched RK4 integrator covers every
algebra and serves as an independent cross-check.
"""

from dataclasses import dataclass
from math import ceil, cos, hypot, sin, sqrt

import numpy as np

from .lie_core import bracket_v_np, j_matrix_np


@dataclass
class TangentState:
    v: np.ndarray
    z: np.ndarray
    V: np.ndarray
    Z: np.ndarray

    def __post_init__(self):
        self.v = np.asarray(self.v, float)
        self.z = np.asarray(self.z, float)
        self.V = np.asarray(self.V, float)
        self.Z = np.asarray(self.Z, float)

    def flat(self):
        return np.concatenate([self.v, self.z, self.V, self.Z])

    def copy(self):
        return TangentState(self.v.copy(), self.z.copy(), self.V.copy(), self.Z.copy())

    @property
    def speed2(self):
        return float(self.V @ self.V + self.Z @ self.Z)


def state_from_flat(alg, flat):
    flat = np.asarray(flat, float)
    dv, dz = alg.dim_v, alg.dim_z
    if flat.shape[-1] != 2 * (dv + dz):
        raise ValueError(f"expected {2 * (dv + dz)} components")
    return TangentState(
        flat[..., :dv],
        flat[..., dv:dv + dz],
        flat[..., dv + dz:2 * dv + dz],
        flat[..., 2 * dv + dz:],
    )


class DegenerateFrequencyError(ValueError):
    """Raised when the requested Z has collapsed precession frequencies."""


@dataclass
class EigenFrame:
    """Orthonormal invariant-plane frame for j(Z) on the pair's v-space.

    planes: ((U1, U2, theta1), (U3, U4, theta2)) with j(Z) U_a = theta U_b,
    j(Z) U_b = -theta U_a per plane; kernel is the unit kernel vector.
    """

    Z: np.ndarray
    planes: tuple
    kernel: np.ndarray

    def components(self, V):
        """Coefficients (a1, b1, a2, b2, a0) of V in the frame."""
        (u1, u2, _), (u3, u4, _) = self.planes
        return (
            float(V @ u1), float(V @ u2),
            float(V @ u3), float(V @ u4),
            float(V @ self.kernel),
        )

    def assemble(self, a1, b1, a2, b2, a0):
        (u1, u2, _), (u3, u4, _) = self.planes
        return a1 * u1 + b1 * u2 + a2 * u3 + b2 * u4 + a0 * self.kernel

    def rotate(self, V, t):
        """e^{t j(Z)} V in closed form."""
        out = np.zeros_like(np.asarray(V, float))
        for ua, ub, theta in self.planes:
            a, b = float(V @ ua), float(V @ ub)
            c, s = cos(theta * t), sin(theta * t)
            out += (a * c - b * s) * ua + (a * s + b * c) * ub
        out += float(V @ self.kernel) * self.kernel
        return out

    def integrate_rotation(self, V, t):
        """int_0^t e^{s j(Z)} V ds in closed form."""
        out = t * float(V @ self.kernel) * self.kernel
        for ua, ub, theta in self.planes:
            a, b = float(V @ ua), float(V @ ub)
            s, c1 = sin(theta * t) / theta, (1.0 - cos(theta * t)) / theta
            out += (a * s - b * c1) * ua + (a * c1 + b * s) * ub
        return out

    def rotate_many(self, V, ts):
        """e^{t j(Z)} V for an array of times; returns shape (len(ts), dim_v)."""
        ts = np.asarray(ts, float)
        out = np.zeros(ts.shape + (len(self.kernel),))
        for ua, ub, theta in self.planes:
            a, b = float(V @ ua), float(V @ ub)
            c, s = np.cos(theta * ts), np.sin(theta * ts)
            out += np.multiply.outer(a * c - b * s, ua)
            out += np.multiply.outer(a * s + b * c, ub)
        out += np.multiply.outer(np.full_like(ts, V @ self.kernel), self.kernel)
        return out

    def integrate_many(self, V, ts):
        """int_0^t e^{s j(Z)} V ds for an array of times."""
        ts = np.asarray(ts, float)
        out = np.multiply.outer(ts * float(V @ self.kernel), self.kernel)
        for ua, ub, theta in self.planes:
            a, b = float(V @ ua), float(V @ ub)
            s = np.sin(theta * ts) / theta
            c1 = (1.0 - np.cos(theta * ts)) / theta
            out += np.multiply.outer(a * s - b * c1, ua)
            out += np.multiply.outer(a * c1 + b * s, ub)
        return out

    def j_inverse_planar(self, V):
        """Apply j(Z)^{-1} plane by plane; the kernel component is dropped.

        On a plane, j(a U_a + b U_b) = theta (a U_b - b U_a), so
        j^{-1}(a U_a + b U_b) = (b U_a - a U_b) / theta.
        """
        out = np.zeros_like(np.asarray(V, float))
        for ua, ub, theta in self.planes:
            a, b = float(V @ ua), float(V @ ub)
            out += (b * ua - a * ub) / theta
        return out

    def plane_part(self, V, which):
        ua, ub, _ = self.planes[which]
        return float(V @ ua) * ua + float(V @ ub) * ub

    def kernel_part(self, V):
        return float(V @ self.kernel) * self.kernel


def eigenframe(name, Z, tol=1e-12):
    """Analytic eigenframe of j(Z) for manifold "M" or "Mprime".

    Requires a generic Z = c_i Z_i + c_j Z_j + c_k Z_k: both c_k != 0 and
    (c_i, c_j) != 0, so the frequencies c_k and |c| are distinct and
    nonzero and the kernel is the line R Y_c.
    """
    ci, cj, ck = (float(x) for x in Z)
    rho = hypot(ci, cj)
    norm = sqrt(ci * ci + cj * cj + ck * ck)
    if abs(ck) <= tol or rho <= tol:
        raise DegenerateFrequencyError(
            f"degenerate precession for Z={Z!r}: need c_k != 0 and (c_i, c_j) != 0"
        )
    kernel = np.array([0.0, 0.0, ci, cj, ck]) / norm
    u4 = np.array([0.0, 0.0, ck * ci, ck * cj, -rho * rho]) / (rho * norm)
    if name == "M":
        u1 = np.array([ci, cj, 0.0, 0.0, 0.0]) / rho
        u2 = np.array([0.0, 0.0, -cj, ci, 0.0]) / rho
        u3 = np.array([cj, -ci, 0.0, 0.0, 0.0]) / rho
    elif name == "Mprime":
        u1 = np.array([1.0, 0.0, 0.0, 0.0, 0.0])
        u2 = np.array([0.0, 1.0, 0.0, 0.0, 0.0])
        u3 = np.array([0.0, 0.0, cj, -ci, 0.0]) / rho
    else:
        raise ValueError(f"no analytic eigenframe for manifold {name!r}")
    Zf = np.array([ci, cj, ck])
    return EigenFrame(Zf, ((u1, u2, ck), (u3, u4, norm)), kernel)


@dataclass
class SpectralSplit:
    """V = V_ck + V_abs + V_0 along the invariant planes and the kernel,
    with coefficients in the unnormalized printed frame."""

    V_ck: np.ndarray
    V_abs: np.ndarray
    V_0: np.ndarray
    alphas: tuple
    beta: float


def spectral_split(name, Z, V):
    frame = eigenframe(name, Z)
    V = np.asarray(V, float)
    ci, cj, ck = (float(x) for x in Z)
    rho2 = ci * ci + cj * cj
    n2 = rho2 + ck * ck
    v_ck = frame.plane_part(V, 0)
    v_abs = frame.plane_part(V, 1)
    v_0 = frame.kernel_part(V)
    e4 = np.array([0.0, 0.0, ck * ci, ck * cj, -rho2])
    if name == "M":
        e1 = np.array([ci, cj, 0.0, 0.0, 0.0])
        e2 = np.array([0.0, 0.0, -cj, ci, 0.0])
        e3 = sqrt(n2) * np.array([cj, -ci, 0.0, 0.0, 0.0])
        n1 = rho2
    else:
        e1 = np.array([1.0, 0.0, 0.0, 0.0, 0.0])
        e2 = np.array([0.0, 1.0, 0.0, 0.0, 0.0])
        e3 = sqrt(n2) * np.array([0.0, 0.0, cj, -ci, 0.0])
        n1 = 1.0
    alphas = (
        float(V @ e1) / n1, float(V @ e2) / n1,
        float(V @ e3) / (rho2 * n2), float(V @ e4) / (rho2 * n2),
    )
    beta = (ci * V[2] + cj * V[3] + ck * V[4]) / n2
    return SpectralSplit(v_ck, v_abs, v_0, alphas, beta)


def is_generic(name, Z, V, tol=1e-9):
    """The open-dense condition: |c| > |c_k| > 0 and all three spectral
    components of V nonzero."""
    Z = np.asarray(Z, float)
    ck = abs(float(Z[2]))
    norm = float(np.linalg.norm(Z))
    if ck <= tol or norm - ck <= tol:
        return False
    frame = eigenframe(name, Z, tol)
    V = np.asarray(V, float)
    return all(
        float(np.linalg.norm(part)) > tol
        for part in (frame.plane_part(V, 0), frame.plane_part(V, 1),
                     frame.kernel_part(V))
    )


# ---------------------------------------------------------------------------
# integrators


def geodesic_field(alg, v, z, V, Z):
    """Right-hand side of the geodesic equations; batched over leading axes."""
    jm = j_matrix_np(alg, Z)
    dv = V
    dz = Z + 0.5 * bracket_v_np(alg, v, V)
    dV = np.einsum("...qp,...p->...q", jm, V)
    dZ = np.zeros_like(Z)
    return dv, dz, dV, dZ


def default_steps(t, steps_per_unit=1000):
    return max(1, ceil(abs(float(t)) * steps_per_unit))


def _rk4_batch(alg, v, z, V, Z, t, steps):
    # Z is conserved along geodesics (and across RK4 stages, since dZ = 0),
    # so j(Z) is computed once per trajectory batch.
    h = t / steps
    tensor = alg.tensor()
    dv, dz_dim = alg.dim_v, alg.dim_z
    jm = np.einsum("pqr,...r->...qp", tensor, Z)
    jm_t = np.swapaxes(jm, -1, -2)  # row-vector convention: V @ jm_t = jm V
    tmat = tensor.reshape(dv, dv * dz_dim)

    def field(v, V):
        # [v, V]_r = v_p T[p, q, r] V_q as two matmuls
        w = (v @ tmat).reshape(v.shape[:-1] + (dv, dz_dim))
        dz = Z + 0.5 * np.squeeze(V[..., None, :] @ w, -2)
        dV = np.squeeze(V[..., None, :] @ jm_t, -2)
        return V, dz, dV

    for _ in range(steps):
        a1, b1, c1 = field(v, V)
        a2, b2, c2 = field(v + 0.5 * h * a1, V + 0.5 * h * c1)
        a3, b3, c3 = field(v + 0.5 * h * a2, V + 0.5 * h * c2)
        a4, b4, c4 = field(v + h * a3, V + h * c3)
        v = v + (h / 6.0) * (a1 + 2.0 * a2 + 2.0 * a3 + a4)
        z = z + (h / 6.0) * (b1 + 2.0 * b2 + 2.0 * b3 + b4)
        V = V + (h / 6.0) * (c1 + 2.0 * c2 + 2.0 * c3 + c4)
    return v, z, V, Z


def flow_rk4(alg, state, t, steps=None):
    """Classic RK4 with a fixed step; works for every algebra."""
    if steps is None:
        steps = default_steps(t)
    v, z, V, Z = _rk4_batch(alg, state.v, state.z, state.V, state.Z, float(t), steps)
    return TangentState(v, z, V, Z)


def flow_rk4_many(alg, states, t, steps=None):
    """RK4 a stack of flat states, shape (n, 2*(dim_v + dim_z)), in lockstep."""
    if steps is None:
        steps = default_steps(t)
    dv, dz = alg.dim_v, alg.dim_z
    s = np.asarray(states, float)
    v, z = s[:, :dv], s[:, dv:dv + dz]
    V, Z = s[:, dv + dz:2 * dv + dz], s[:, 2 * dv + dz:]
    v, z, V, Z = _rk4_batch(alg, v, z, V, Z, float(t), steps)
    return np.concatenate([v, z, V, Z], axis=1)


def flow_exact_vV(frame, v0, V0, t):
    """Closed-form (v(t), V(t)): V precesses, v integrates the precession."""
    V0 = np.asarray(V0, float)
    return np.asarray(v0, float) + frame.integrate_rotation(V0, t), frame.rotate(V0, t)


def _gauss_legendre_nodes(t, panels, order=10):
    x, w = np.polynomial.legendre.leggauss(order)
    edges = np.linspace(0.0, t, panels + 1)
    mids = 0.5 * (edges[:-1] + edges[1:])
    half = 0.5 * (edges[1:] - edges[:-1])
    nodes = (mids[:, None] + half[:, None] * x[None, :]).ravel()
    weights = (half[:, None] * w[None, :]).ravel()
    return nodes, weights


def flow_exact_state(alg, name, state, t):
    """Closed-form flow of a full state on M or M'.

    v and V are exact trigonometric expressions; z(t) adds t Z plus the
    integral of [v(s), V(s)]/2, evaluated by composite Gauss-Legendre on
    the closed-form integrand (spectrally accurate: the integrand is a
    trigonometric polynomial in the two frequencies).
    """
    frame = eigenframe(name, state.Z)
    t = float(t)
    vt, Vt = flow_exact_vV(frame, state.v, state.V, t)
    max_theta = max(abs(p[2]) for p in frame.planes)
    panels = max(4, ceil(abs(t) * max_theta / 2.0))
    nodes, weights = _gauss_legendre_nodes(t, panels)
    vs = state.v[None, :] + frame.integrate_many(state.V, nodes)
    Vs = frame.rotate_many(state.V, nodes)
    integrand = bracket_v_np(alg, vs, Vs)
    zt = state.z + t * state.Z + 0.5 * np.einsum("n,nr->r", weights, integrand)
    return TangentState(vt, zt, Vt, state.Z.copy())


# ---------------------------------------------------------------------------
# sampling


def sample_generic_Z(rng, min_ck=0.1, min_gap=0.1, min_prod=0.05):
    """Draw Z with well-separated frequencies and c_k |c|^2 bounded away
    from 0, so the transcendental integrals stay numerically alive."""
    while True:
        c = rng.uniform(-2.0, 2.0, size=3)
        ci, cj, ck = c
        norm = sqrt(float(c @ c))
        if abs(ck) < min_ck:
            continue
        if norm - abs(ck) < min_gap:
            continue
        if hypot(ci, cj) < min_gap:
            continue
        if abs(ck) * norm * norm < min_prod:
            continue
        return c


def sample_generic_state(name, rng, min_comp=0.05):
    """A random tangent state with generic Z and V hitting every frame
    direction by at least min_comp."""
    while True:
        Z = sample_generic_Z(rng)
        frame = eigenframe(name, Z)
        V = rng.uniform(-1.0, 1.0, size=5)
        if min(abs(c) for c in frame.components(V)) < min_comp:
            continue
        v = rng.uniform(-1.0, 1.0, size=5)
        z = rng.uniform(-1.0, 1.0, size=3)
        return TangentState(v, z, V, Z)
