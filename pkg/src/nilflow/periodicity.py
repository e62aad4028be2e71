"""Closed geodesics: translational elements, exact constructions dense in
the unit tangent bundle, and the dimension of the continuous families they
sit inside.

The key commensurability fact: for generic Z = Z_c the precession
frequencies are c_k and |c|, so a common rotation period exists exactly
when c_k/|c| = p/q is rational, with minimal period sigma = 2 pi q / |c|.
Choosing c = rho * u with u a *rational point of the unit sphere* makes
both |c| and c_k/|c| rational at once; stereographic projection preserves
rationality, which is what makes such c dense.

Exactness split: the returned lattice element a and the period as a
multiple of pi are exact rationals; the initial state itself is a float
vector (its defining data r, t, P_D, P_W are the exact rationals stored on
the result).
"""

from dataclasses import dataclass
from fractions import Fraction
from math import ceil, hypot, lcm, pi, sqrt

import numpy as np

from .flow import (
    DegenerateFrequencyError,
    TangentState,
    eigenframe,
    flow_exact_state,
    state_from_flat,
)
from .integrals import evaluate_integrals
from .lie_core import bracket_v_np, lattice_contains


class ConstructionError(RuntimeError):
    """The exact closed-geodesic construction could not meet its target."""


# ---------------------------------------------------------------------------
# translational elements


def translational_element(name, alg, state, tau):
    """a = gamma(tau) gamma(0)^{-1} for a rotation period tau, from the
    structure of the flow: only the kernel part of V survives in the
    v-component, and the z-component collects the precession areas.

    Valid when e^{tau j(Z)} = Id; the caller is responsible for tau.
    """
    frame = eigenframe(name, state.Z)
    V = state.V
    v0 = frame.kernel_part(V)
    v_ck = frame.plane_part(V, 0)
    v_nm = frame.plane_part(V, 1)
    vperp = v_ck + v_nm
    jinv = frame.j_inverse_planar
    br = lambda a, b: bracket_v_np(alg, a, b)
    a_v = tau * v0
    a_z = (
        tau * state.Z
        + tau * br(state.v, v0)
        + tau * br(v0, jinv(vperp))
        + 0.5 * tau * br(jinv(v_ck), v_ck)
        + 0.5 * tau * br(jinv(v_nm), v_nm)
    )
    return a_v, a_z


def _frame_coefficients(name, Z, V):
    """(beta, alpha) with V_0 = beta Y_c and V_perp = sum alpha_m E_m for
    the unnormalized invariant frame of the given manifold."""
    ci, cj, ck = (float(x) for x in Z)
    rho2 = ci * ci + cj * cj
    n2 = rho2 + ck * ck
    V = np.asarray(V, float)
    beta = (ci * V[2] + cj * V[3] + ck * V[4]) / n2
    e4 = np.array([0.0, 0.0, ck * ci, ck * cj, -rho2])
    if name == "M":
        e1 = np.array([ci, cj, 0.0, 0.0, 0.0])
        e2 = np.array([0.0, 0.0, -cj, ci, 0.0])
        e3 = sqrt(n2) * np.array([cj, -ci, 0.0, 0.0, 0.0])
    elif name == "Mprime":
        e1 = np.array([1.0, 0.0, 0.0, 0.0, 0.0])
        e2 = np.array([0.0, 1.0, 0.0, 0.0, 0.0])
        e3 = sqrt(n2) * np.array([0.0, 0.0, cj, -ci, 0.0])
    else:
        raise ValueError(f"no frame for manifold {name!r}")
    alphas = [
        float(V @ e1) / (rho2 if name == "M" else 1.0),
        float(V @ e2) / (rho2 if name == "M" else 1.0),
        float(V @ e3) / (rho2 * n2),
        float(V @ e4) / (rho2 * n2),
    ]
    return beta, alphas


def translational_element_expanded(name, state, tau):
    """The same element in closed form, written in the orthogonal z-basis
    (Z_c, D, W) with D = -c_j Z_i + c_i Z_j and
    W = c_k (c_i Z_i + c_j Z_j) - (c_i^2 + c_j^2) Z_k."""
    ci, cj, ck = (float(x) for x in state.Z)
    rho2 = ci * ci + cj * cj
    n2 = rho2 + ck * ck
    beta, al = _frame_coefficients(name, state.Z, state.V)
    v_ck2 = (al[0] ** 2 + al[1] ** 2) * (rho2 if name == "M" else 1.0)
    vperp2 = v_ck2 + (al[2] ** 2 + al[3] ** 2) * rho2 * n2
    xi, xj, yi, yj, yk = (float(x) for x in state.v)
    coef_c = tau * (1.0 + vperp2 / (2.0 * n2))
    if name == "M":
        coef_d = tau * beta * (al[1] - ck / rho2 * (xi * ci + xj * cj))
        coef_w = tau * (
            -v_ck2 / (2.0 * ck * n2)
            + beta * (al[3] - (xi * cj - xj * ci) / rho2)
        )
    else:
        coef_d = tau * beta * (
            -sqrt(n2) * al[2] + yk - ck / rho2 * (yi * ci + yj * cj)
        )
        coef_w = tau * (
            -v_ck2 / (2.0 * ck * n2)
            + beta * (al[3] - (yi * cj - yj * ci) / rho2)
        )
    zc = np.array([ci, cj, ck])
    d = np.array([-cj, ci, 0.0])
    w = np.array([ck * ci, ck * cj, -rho2])
    a_v = tau * beta * np.array([0.0, 0.0, ci, cj, ck])
    a_z = coef_c * zc + coef_d * d + coef_w * w
    return a_v, a_z


# ---------------------------------------------------------------------------
# rational points of the sphere


def rationalize_sphere_direction(u, bound):
    """A rational unit vector near the float unit vector u.

    Stereographic projection preserves rationality, so rounding the
    projected point gives an exactly-unit rational vector.  The result is
    nudged off the degenerate cone (third component 0, or equator
    distance 0) when the rounding lands there.
    """
    u = np.asarray(u, float)
    n = float(np.linalg.norm(u))
    if n == 0.0:
        raise DegenerateFrequencyError("cannot rationalize the zero direction")
    u = u / n
    south = u[2] > 0.5  # project from the pole far from u
    uk = -u[2] if south else u[2]
    a = Fraction(u[0] / (1.0 - uk)).limit_denominator(bound)
    b = Fraction(u[1] / (1.0 - uk)).limit_denominator(bound)
    step = Fraction(1, 2 * bound)
    for _ in range(64):
        s = a * a + b * b
        ui = 2 * a / (s + 1)
        uj = 2 * b / (s + 1)
        uk = (s - 1) / (s + 1)
        if uk != 0 and (ui != 0 or uj != 0):
            break
        a += step
    else:
        raise ConstructionError("could not leave the degenerate cone")
    if south:
        uk = -uk
    assert ui * ui + uj * uj + uk * uk == 1
    return ui, uj, uk


def _approx(x, bound, grid=None):
    """Best rational with denominator <= bound; with grid set, round to the
    fixed grid (1/grid) Z instead so all denominators divide grid (keeps the
    lattice multiple m, hence the period, small)."""
    if grid is not None:
        return Fraction(round(float(x) * grid), grid)
    return Fraction(float(x)).limit_denominator(bound)


# ---------------------------------------------------------------------------
# the exact construction


@dataclass
class ClosedGeodesic:
    """An exactly-certified closed geodesic.

    a_v, a_z are exact rationals; membership of a in the lattice and the
    rotation condition tau c_k, tau |c| in 2 pi Z hold by construction.
    """

    name: str
    c: tuple  # exact rational Z with rational norm
    norm_c: Fraction
    p: int
    q: int
    m: int
    r: Fraction
    t: Fraction
    P_D: Fraction
    P_W: Fraction
    tau_over_pi: Fraction
    a_v: tuple
    a_z: tuple
    state: TangentState

    @property
    def tau(self):
        return pi * float(self.tau_over_pi)

    @property
    def sigma_over_pi(self):
        return Fraction(2 * self.q) / self.norm_c


def _exact_element(c, r, t, P_D, P_W, m):
    ci, cj, ck = c
    rho2 = ci * ci + cj * cj
    a_v = (Fraction(0), Fraction(0), m * r * ci, m * r * cj, m * r * ck)
    zc = (ci, cj, ck)
    d = (-cj, ci, Fraction(0))
    w = (ck * ci, ck * cj, -rho2)
    a_z = tuple(
        m * (t * zc[i] + P_D * d[i] + P_W * w[i]) for i in range(3)
    )
    return a_v, a_z


def construct_closed_geodesic(name, target, epsilon=0.05, lattice_v=None,
                              lattice_z=None, bound=None, grid=None):
    """An exactly closed geodesic within epsilon of the target state.

    target: a TangentState with generic Z (c_k != 0, (c_i, c_j) != 0) and
    any v, z, V.  The free coordinates (z, and the v-coordinates not pinned
    by the construction) are taken from the target unchanged.

    Degenerate targets (on the cone c_k |c| (|c| - |c_k|) = 0) are
    rejected since no commensurable precession exists nearby in a
    quantitative sense.
    """
    zt = np.asarray(target.Z, float)
    if np.linalg.norm(zt) < 1e-9 or hypot(zt[0], zt[1]) < 1e-9 or abs(zt[2]) < 1e-9:
        raise DegenerateFrequencyError(
            "target Z lies on the degenerate cone; no generic closed geodesic "
            "construction applies"
        )
    if bound is None:
        bound = max(16, ceil(4.0 / epsilon))
    last_err = None
    for _ in range(7):
        try:
            geo = _construct_once(name, target, epsilon, bound, grid)
        except ConstructionError as e:
            last_err = e
            bound *= 2
            if grid is not None:
                grid *= 2
            continue
        if geo is not None:
            if lattice_v is not None and not lattice_contains(lattice_v, geo.a_v):
                raise ConstructionError("v-part of a left the lattice")
            if lattice_z is not None and not lattice_contains(lattice_z, geo.a_z):
                raise ConstructionError("z-part of a left the lattice")
            return geo
        bound *= 2
        if grid is not None:
            grid *= 2
    raise ConstructionError(
        f"could not reach epsilon={epsilon} (last: {last_err})"
    )


def _construct_once(name, target, epsilon, bound, grid=None):
    unit = Fraction(1, grid if grid is not None else bound)
    zt = np.asarray(target.Z, float)
    norm_t = float(np.linalg.norm(zt))
    ui, uj, uk = rationalize_sphere_direction(zt, bound)
    rho_s = _approx(norm_t, bound, grid)
    if rho_s <= 0:
        rho_s = unit
    c = (rho_s * ui, rho_s * uj, rho_s * uk)
    norm_c = rho_s
    ratio = Fraction(uk)  # c_k / |c|, already in lowest terms
    p, q = ratio.numerator, ratio.denominator
    c_f = np.array([float(x) for x in c])
    if abs(c_f[2]) < 1e-12 or hypot(c_f[0], c_f[1]) < 1e-12:
        return None
    sigma = 2.0 * pi * q / float(norm_c)
    frame = eigenframe(name, c_f)

    Vt = np.asarray(target.V, float)
    ck_f, n2 = c_f[2], float(c_f @ c_f)
    beta_bar = (c_f[0] * Vt[2] + c_f[1] * Vt[3] + c_f[2] * Vt[4]) / n2
    r = _approx(beta_bar * sigma, bound, grid)
    if r == 0:
        r = unit if beta_bar >= 0 else -unit

    vperp_t = Vt - beta_bar * np.array([0.0, 0.0, c_f[0], c_f[1], c_f[2]])
    vperp2_bar = float(vperp_t @ vperp_t)
    t = _approx(sigma * (1.0 + vperp2_bar / (2.0 * n2)), bound, grid)
    while 2.0 * n2 * (float(t) / sigma - 1.0) <= 0.0:
        t += unit
    vperp2 = 2.0 * n2 * (float(t) / sigma - 1.0)

    v_ck_t = frame.plane_part(Vt, 0)
    vck2_bar = float(v_ck_t @ v_ck_t)
    w1 = _approx(sigma * vck2_bar / (2.0 * ck_f * n2), bound, grid)
    step = unit * (1 if ck_f > 0 else -1)
    tries = 0
    while True:
        vck2 = 2.0 * ck_f * n2 * float(w1) / sigma
        if 0.0 < vck2 < vperp2:
            break
        w1 = w1 + step if vck2 <= 0.0 else w1 - step
        tries += 1
        if tries > 4 * bound:
            raise ConstructionError("no room for the first plane component")
    vnm2 = vperp2 - vck2

    def _unit(vec, fallback):
        nrm = float(np.linalg.norm(vec))
        return vec / nrm if nrm > 1e-9 else fallback

    d1 = _unit(v_ck_t, frame.planes[0][0])
    d2 = _unit(frame.plane_part(Vt, 1), frame.planes[1][0])
    beta = float(r) / sigma
    V = beta * np.array([0.0, 0.0, c_f[0], c_f[1], c_f[2]])
    V = V + sqrt(vck2) * d1 + sqrt(vnm2) * d2

    # pin the base coordinates so the D and W coefficients of a_z become
    # the exact rationals P_D = r g_D and P_W = -w1 + r g_W
    beta_c, al = _frame_coefficients(name, c_f, V)
    rho2 = float(c_f[0] ** 2 + c_f[1] ** 2)
    ci, cj, ck = c_f
    v = np.asarray(target.v, float).copy()
    if name == "M":
        gD_bar = al[1] - ck / rho2 * (v[0] * ci + v[1] * cj)
        gW_bar = al[3] - (v[0] * cj - v[1] * ci) / rho2
        P_D = _approx(float(r) * gD_bar, bound, grid)
        P_W = _approx(-float(w1) + float(r) * gW_bar, bound, grid)
        gD = float(P_D) / float(r)
        gW = (float(P_W) + float(w1)) / float(r)
        rhs1 = rho2 / ck * (al[1] - gD)  # x_i c_i + x_j c_j
        rhs2 = rho2 * (al[3] - gW)      # x_i c_j - x_j c_i
        det = -(rho2)
        v[0] = (-ci * rhs1 - cj * rhs2) / det
        v[1] = (-cj * rhs1 + ci * rhs2) / det
    else:
        gD_bar = (
            -sqrt(n2) * al[2] + v[4] - ck / rho2 * (v[2] * ci + v[3] * cj)
        )
        gW_bar = al[3] - (v[2] * cj - v[3] * ci) / rho2
        P_D = _approx(float(r) * gD_bar, bound, grid)
        P_W = _approx(-float(w1) + float(r) * gW_bar, bound, grid)
        gD = float(P_D) / float(r)
        gW = (float(P_W) + float(w1)) / float(r)
        A = v[2] * ci + v[3] * cj           # kept at the target value
        B = rho2 * (al[3] - gW)             # y_i c_j - y_j c_i
        det = -(rho2)
        v[2] = (-ci * A - cj * B) / det
        v[3] = (-cj * A + ci * B) / det
        v[4] = gD + sqrt(n2) * al[2] + ck / rho2 * A

    # closeness to the target
    errs = (
        float(np.linalg.norm(c_f - zt)),
        float(np.linalg.norm(V - Vt)),
        float(np.linalg.norm(v - np.asarray(target.v, float))),
    )
    if max(errs) > epsilon:
        return None

    # least m making a a lattice element: m r c in Z^5, 2 m a_z-coords in Z^3
    m = 1
    for x in (r * c[0], r * c[1], r * c[2]):
        m = lcm(m, x.denominator)
    av1, az1 = _exact_element(c, r, t, P_D, P_W, 1)
    for x in az1:
        m = lcm(m, (2 * x).denominator)
    for x in av1:
        m = lcm(m, x.denominator)
    a_v, a_z = _exact_element(c, r, t, P_D, P_W, m)
    tau_over_pi = Fraction(2 * m * q) / norm_c

    state = TangentState(v, np.asarray(target.z, float), V, c_f)
    return ClosedGeodesic(
        name, c, norm_c, p, q, m, r, t, P_D, P_W, tau_over_pi,
        a_v, a_z, state,
    )


# ---------------------------------------------------------------------------
# family dimension and invariant fibers


def _closure_constraints(name, alg, geo):
    a_v = np.array([float(x) for x in geo.a_v])
    a_z = np.array([float(x) for x in geo.a_z])
    tau = geo.tau

    def F(flat):
        s = state_from_flat(alg, flat)
        end = flow_exact_state(alg, name, s, tau)
        t_v = end.v - s.v
        t_z = end.z - s.z - 0.5 * bracket_v_np(alg, end.v, s.v)
        frame = eigenframe(name, s.Z)
        rot = frame.rotate(s.V, tau) - s.V
        return np.concatenate([t_v - a_v, t_z - a_z, rot])

    return F


def closure_jacobian(name, alg, geo, h=1e-4):
    """Fourth-order central-difference Jacobian of the 13 closure
    constraints (translational element fixed: 8; velocity rotation: 5)
    with respect to the 16 phase-space coordinates."""
    F = _closure_constraints(name, alg, geo)
    x0 = geo.state.flat()
    n = x0.size
    cols = []
    for i in range(n):
        e = np.zeros(n)
        e[i] = 1.0
        f1 = F(x0 + 2 * h * e)
        f2 = F(x0 + h * e)
        f3 = F(x0 - h * e)
        f4 = F(x0 - 2 * h * e)
        cols.append((-f1 + 8.0 * f2 - 8.0 * f3 + f4) / (12.0 * h))
    return np.stack(cols, axis=1)


def family_dimension(name, alg, geo, h=1e-4, svd_threshold=1e-6):
    """Dimension of the kernel of the closure constraints at the closed
    geodesic = dimension of the continuous family through it (counted in
    the full 16-dimensional phase space)."""
    jac = closure_jacobian(name, alg, geo, h)
    sv = np.linalg.svd(jac, compute_uv=False)
    nullity = int(np.sum(sv <= svd_threshold * sv[0])) + jac.shape[1] - sv.size
    return nullity, sv


def _coordinate_gradients(alg, state, h=1e-6):
    """Plain coordinate-space gradients of the eight integrals, (8, 16)."""
    x0 = state.flat()
    n = x0.size
    grads = np.zeros((8, n))
    for i in range(n):
        e = np.zeros(n)
        e[i] = 1.0
        sp = state_from_flat(alg, x0 + h * e)
        sm = state_from_flat(alg, x0 - h * e)
        grads[:, i] = (evaluate_integrals(sp) - evaluate_integrals(sm)) / (2 * h)
    return grads


def invariant_fiber_codim(name, alg, geo, h=1e-4, svd_threshold=1e-6):
    """Rank of the integral gradients restricted to the family's tangent
    space; 1 means the family is a one-parameter stack of invariant level
    sets.  Also returns the largest projection of the three exact central
    integrals q_W, which must vanish on the family."""
    jac = closure_jacobian(name, alg, geo, h)
    _, sv, vt = np.linalg.svd(jac)
    null_rows = vt[np.concatenate([sv <= svd_threshold * sv[0],
                                   np.ones(vt.shape[0] - sv.size, bool)])]
    grads = _coordinate_gradients(alg, geo.state)
    norms = np.linalg.norm(grads, axis=1)
    grads = grads / np.where(norms > 0, norms, 1.0)[:, None]
    proj = grads @ null_rows.T  # (8, nullity)
    psv = np.linalg.svd(proj, compute_uv=False)
    rank = int(np.sum(psv > 1e-3 * max(psv[0], 1e-30)))
    q_proj = float(np.max(np.abs(proj[:3])))
    return rank, q_proj, psv
