"""Verification suites: one runner per module area, shared between the
CLI `verify` command and the acceptance tests.

Each runner returns a Report whose body is byte-reproducible for a fixed
seed (all randomness flows through a counter-based Philox generator keyed
by (seed, suite)).
"""

from dataclasses import dataclass
from fractions import Fraction
from math import lcm, pi

import numpy as np

from . import spectral
from .catalog import build_deformation, build_pair
from .criteria import (
    butler_nonintegrability_sample,
    canonical_split,
    check_hr_presentation,
    cih_certificate,
)
from .flow import (
    TangentState,
    eigenframe,
    flow_exact_state,
    flow_exact_vV,
    flow_rk4_many,
    sample_generic_state,
)
from .integrals import (
    evaluate_integrals,
    independence_rank,
    poisson_bracket,
    poisson_matrix,
)
from .lie_core import bracket_v_np, lattice_contains
from .periodicity import (
    construct_closed_geodesic,
    family_dimension,
    invariant_fiber_codim,
    translational_element,
    translational_element_expanded,
)
from .report import Report


@dataclass
class Tolerances:
    fd_step: float = 1e-6
    conservation_tol: float = 1e-8
    bracket_tol: float = 1e-6
    svd_threshold: float = 1e-7
    rk4_steps_per_unit: int = 1000


SUITE_NAMES = (
    "algebra", "spectral", "flow", "integrals", "periodicity",
    "criteria", "cih",
)


def _rng(seed, suite):
    idx = SUITE_NAMES.index(suite)
    return np.random.Generator(
        np.random.Philox(np.random.SeedSequence([int(seed), idx]))
    )


def _tol(tol):
    return tol if tol is not None else Tolerances()


# ---------------------------------------------------------------------------
# algebra


def _expected_j(c):
    ci, cj, ck = c
    z = Fraction(0)
    return [
        [z, z, z, -ck, cj],
        [z, z, ck, z, -ci],
        [z, -ck, z, z, z],
        [ck, z, z, z, z],
        [-cj, ci, z, z, z],
    ]


def _expected_jp(c):
    ci, cj, ck = c
    z = Fraction(0)
    return [
        [z, -ck, z, z, z],
        [ck, z, z, z, z],
        [z, z, z, -ck, cj],
        [z, z, ck, z, -ci],
        [z, z, -cj, ci, z],
    ]


def run_algebra(seed, tol=None):
    from .lie_core import j_matrix

    report = Report("algebra", seed, ["M", "Mprime"])
    m, mp = build_pair()
    cs = [(1, 0, 0), (0, 1, 0), (0, 0, 1), (1, 1, 1)]
    ok = True
    for c in cs:
        cf = [Fraction(x) for x in c]
        if j_matrix(m.alg, cf) != _expected_j(cf):
            ok = False
        if j_matrix(mp.alg, cf) != _expected_jp(cf):
            ok = False
    report.add(
        "golden_j_matrices",
        ok,
        value={"c_values": cs},
        note="exact equality with the printed 5x5 matrices",
    )
    return report


# ---------------------------------------------------------------------------
# spectral


def _random_rational_cs(rng, n):
    """n random rational c-vectors, denominator-cleared to primitive
    integer vectors (the characteristic-polynomial identity is scale
    covariant, so clearing denominators loses nothing)."""
    num = rng.integers(-5, 6, size=(n, 3))
    den = rng.integers(1, 5, size=(n, 3))
    out = np.empty((n, 3), dtype=np.int64)
    for i in range(n):
        scale = lcm(*(int(d) for d in den[i]))
        row = [int(num[i, j]) * (scale // int(den[i, j])) for j in range(3)]
        out[i] = row
    return out


def run_spectral(seed, tol=None):
    report = Report("spectral", seed, ["M", "Mprime"])
    rng = _rng(seed, "spectral")
    m, mp = build_pair()

    ok, witness = spectral.char_poly_identity_check(m.alg, mp.alg, 6)
    cs = _random_rational_cs(rng, 10_000)
    mats = np.array([spectral._int_j(m.alg, c) for c in cs], dtype=np.int64)
    mats_p = np.array([spectral._int_j(mp.alg, c) for c in cs], dtype=np.int64)
    co = spectral.char_poly_batch_int(mats)
    co_p = spectral.char_poly_batch_int(mats_p)
    claimed = np.array(
        [spectral._claimed_coeffs(c) for c in cs], dtype=np.int64
    )
    rand_ok = bool(
        np.array_equal(co, co_p) and np.array_equal(co, claimed)
    )
    report.add(
        "char_poly_identity",
        ok and rand_ok,
        value={"grid": "6x6x6", "random_samples": 10_000, "witness": witness},
        note="exact: equals l^5+(ck^2+|c|^2)l^3+ck^2|c|^2 l for both maps",
    )

    cert = spectral.gw_certificate((m, mp), Fraction(100), 6, rng)
    report.add_certificate(cert)
    return report


# ---------------------------------------------------------------------------
# flow


def run_flow(seed, tol=None):
    tol = _tol(tol)
    report = Report("flow", seed, ["M", "Mprime"])
    rng = _rng(seed, "flow")
    m, mp = build_pair()
    t = 10.0
    for data, name in ((m, "M"), (mp, "Mprime")):
        states = [sample_generic_state(name, rng) for _ in range(100)]
        flats = np.stack([s.flat() for s in states])
        steps = int(round(t * tol.rk4_steps_per_unit))
        ends = flow_rk4_many(data.alg, flats, t, steps)
        worst = 0.0
        for s, end in zip(states, ends):
            frame = eigenframe(name, s.Z)
            v_e, V_e = flow_exact_vV(frame, s.v, s.V, t)
            err = max(
                float(np.max(np.abs(v_e - end[:5]))),
                float(np.max(np.abs(V_e - end[8:13]))),
            )
            worst = max(worst, err)
        report.add(
            f"exact_vs_rk4[{name}]",
            worst <= 1e-8,
            value=worst,
            tolerance=1e-8,
            note="(v, V) at t=10, 100 generic states, rk4 step 1e-3",
        )
    return report


# ---------------------------------------------------------------------------
# integrals


def run_integrals(seed, tol=None):
    tol = _tol(tol)
    report = Report("integrals", seed, ["M"])
    rng = _rng(seed, "integrals")
    m, _ = build_pair()
    alg = m.alg

    # conservation along exact trajectories, unit speed
    worst = 0.0
    ts = np.arange(1.0, 21.0)
    for _ in range(1000):
        s = sample_generic_state("M", rng)
        scale = 1.0 / np.sqrt(s.speed2)
        s = TangentState(s.v, s.z, scale * s.V, scale * s.Z)
        frame = eigenframe("M", s.Z)
        vs = s.v[None, :] + frame.integrate_many(s.V, ts)
        Vs = frame.rotate_many(s.V, ts)
        vals = evaluate_integrals(v=vs, V=Vs, Z=np.broadcast_to(s.Z, (20, 3)))
        base = evaluate_integrals(s)
        worst = max(worst, float(np.max(np.abs(vals - base[None, :]))))
    report.add(
        "conservation_drift",
        worst <= tol.conservation_tol,
        value=worst,
        tolerance=tol.conservation_tol,
        note="8 integrals, 10^3 unit-speed generic states, t in 1..20",
    )

    # Poisson commutation of all 28 pairs + a nonzero sanity pair
    worst = 0.0
    for _ in range(1000):
        s = sample_generic_state("M", rng)
        mat = poisson_matrix(alg, s, tol.fd_step)
        iu = np.triu_indices(8, k=1)
        worst = max(worst, float(np.max(np.abs(mat[iu]))))
    report.add(
        "poisson_commutation",
        worst <= tol.bracket_tol,
        value=worst,
        tolerance=tol.bracket_tol,
        note="max |{f_a, f_b}| over 28 pairs, 10^3 generic states",
    )
    s = sample_generic_state("M", rng)
    sanity = poisson_bracket(
        lambda v, z, V, Z: v[0],
        lambda v, z, V, Z: V[0],
        alg, s, tol.fd_step,
    )
    report.add(
        "poisson_sanity_pair",
        abs(sanity - 1.0) <= tol.bracket_tol,
        value=sanity,
        tolerance=tol.bracket_tol,
        note="{x_i coordinate, <V, X_i>} = 1",
    )

    # functional independence
    full = 0
    for _ in range(1000):
        s = sample_generic_state("M", rng)
        if independence_rank(alg, s, tol.fd_step, tol.svd_threshold) == 8:
            full += 1
    report.add(
        "independence_rank_generic",
        full >= 990,
        value={"rank8_count": full, "samples": 1000},
        tolerance="≥ 99%",
    )
    degen_ok = True
    worst_rank = 0
    for _ in range(100):
        ci, cj = rng.uniform(-2, 2, size=2)
        while ci * ci + cj * cj < 0.25:
            ci, cj = rng.uniform(-2, 2, size=2)
        s = TangentState(
            rng.uniform(-1, 1, size=5), rng.uniform(-1, 1, size=3),
            rng.uniform(-1, 1, size=5), np.array([ci, cj, 0.0]),
        )
        rk = independence_rank(alg, s, tol.fd_step, tol.svd_threshold)
        worst_rank = max(worst_rank, rk)
        if rk > 6:
            degen_ok = False
    report.add(
        "independence_rank_degenerate",
        degen_ok,
        value={"max_rank": worst_rank, "samples": 100},
        note="c_k = 0 collapses the transcendental pair",
    )
    return report


# ---------------------------------------------------------------------------
# periodicity


_NICE_TARGET_CS = ((3.0, 0.0, 4.0), (0.0, 3.0, 4.0), (2.0, 1.0, 2.0))


def _nice_geodesic(name, data, rng, c_bar):
    """A closed geodesic with small period: target Z is an exact integer
    vector with |c| and c_k/|c| rational, and the dyadic approximation grid
    keeps the lattice multiple m (hence tau) small."""
    target = sample_generic_state(name, rng)
    target = TangentState(target.v, target.z, target.V, np.array(c_bar))
    return construct_closed_geodesic(
        name, target, epsilon=0.45,
        lattice_v=data.lattice_v, lattice_z=data.lattice_z,
        bound=128, grid=128,
    )


def run_periodicity(seed, tol=None):
    tol = _tol(tol)
    report = Report("periodicity", seed, ["M", "Mprime"])
    rng = _rng(seed, "periodicity")
    m, mp = build_pair()

    # translational elements: proof form vs expanded form vs flow oracle
    worst_forms = 0.0
    worst_flow = 0.0
    for data, name in ((m, "M"), (mp, "Mprime")):
        for c_bar in _NICE_TARGET_CS:
            geo = _nice_geodesic(name, data, rng, c_bar)
            s = geo.state
            a1v, a1z = translational_element(name, data.alg, s, geo.tau)
            a2v, a2z = translational_element_expanded(name, s, geo.tau)
            worst_forms = max(
                worst_forms,
                float(np.max(np.abs(a1v - a2v))),
                float(np.max(np.abs(a1z - a2z))),
            )
            end = flow_exact_state(data.alg, name, s, geo.tau)
            o_v = end.v - s.v
            o_z = end.z - s.z - 0.5 * bracket_v_np(data.alg, end.v, s.v)
            worst_flow = max(
                worst_flow,
                float(np.max(np.abs(a1v - o_v))),
                float(np.max(np.abs(a1z - o_z))),
            )
            # and both match the exact rational element
            ev = np.array([float(x) for x in geo.a_v])
            ez = np.array([float(x) for x in geo.a_z])
            worst_flow = max(
                worst_flow,
                float(np.max(np.abs(a1v - ev))),
                float(np.max(np.abs(a1z - ez))),
            )
    report.add(
        "translational_forms_agree", worst_forms <= 1e-10,
        value=worst_forms, tolerance=1e-10,
    )
    report.add(
        "translational_vs_flow_oracle", worst_flow <= 1e-7,
        value=worst_flow, tolerance=1e-7,
    )

    # density: 100 random targets per the open-dense construction
    successes = 0
    worst_eps = 0.0
    for i in range(100):
        name, data = ("M", m) if i % 2 == 0 else ("Mprime", mp)
        target = sample_generic_state(name, rng)
        geo = construct_closed_geodesic(
            "M" if i % 2 == 0 else "Mprime", target, epsilon=0.1,
            lattice_v=data.lattice_v, lattice_z=data.lattice_z,
        )
        in_gamma = lattice_contains(data.lattice_v, geo.a_v) and \
            lattice_contains(data.lattice_z, geo.a_z)
        rot = (geo.tau_over_pi * geo.c[2] / 2).denominator == 1 and \
            (geo.tau_over_pi * geo.norm_c / 2).denominator == 1
        dist = max(
            float(np.linalg.norm(geo.state.Z - target.Z)),
            float(np.linalg.norm(geo.state.V - target.V)),
            float(np.linalg.norm(geo.state.v - target.v)),
        )
        worst_eps = max(worst_eps, dist)
        if in_gamma and rot and dist <= 0.1:
            successes += 1
    report.add(
        "density_construction",
        successes == 100,
        value={"successes": successes, "worst_distance": worst_eps},
        tolerance=0.1,
        note="exact a in Gamma and exact rotation condition, 100 targets",
    )

    # family dimension and invariant fibers
    for data, name in ((m, "M"), (mp, "Mprime")):
        geo = _nice_geodesic(name, data, rng, _NICE_TARGET_CS[0])
        dims = []
        for h in (1e-4, 1e-5, 1e-6):
            nullity, _ = family_dimension(name, data.alg, geo, h)
            dims.append(nullity)
        report.add(
            f"family_dimension[{name}]",
            dims == [9, 9, 9],
            value=dims,
            note="nullity across FD steps 1e-4/1e-5/1e-6",
        )
        if name == "M":
            rank, q_proj, _ = invariant_fiber_codim(name, data.alg, geo)
            report.add(
                "invariant_fiber_codim[M]",
                rank == 1 and q_proj < 1e-6,
                value={"rank": rank, "q_gradient_projection": q_proj},
                tolerance=1e-6,
            )
    return report


# ---------------------------------------------------------------------------
# criteria and clean intersection


def run_criteria(seed, tol=None):
    report = Report("criteria", seed, ["M", "Mprime"])
    rng = _rng(seed, "criteria")
    m, mp = build_pair()

    cert_m = check_hr_presentation(m.alg, canonical_split(m.alg))
    cert_mp = check_hr_presentation(mp.alg, canonical_split(mp.alg))
    cert_defo = check_hr_presentation(
        build_deformation(Fraction(1, 3)).alg,
        canonical_split(build_deformation(Fraction(1, 3)).alg),
    )
    report.add("hr_presentation_M_passes", cert_m.passed)
    report.add(
        "hr_presentation_Mprime_fails_canonical_split", not cert_mp.passed,
        note=(cert_mp.first_failure().name if not cert_mp.passed else ""),
    )
    report.add("hr_presentation_deformation_passes", cert_defo.passed)

    cert, frac_mp = butler_nonintegrability_sample(mp.alg, 10_000, rng)
    report.add(
        "butler_fraction_Mprime",
        frac_mp >= 0.999,
        value=frac_mp,
        tolerance=0.999,
        note=f"regular pairs: {cert.data['regular_pairs']}",
    )
    cert, frac_m = butler_nonintegrability_sample(m.alg, 10_000, rng)
    report.add(
        "butler_fraction_M",
        frac_m == 0.0,
        value=frac_m,
        note="the Y-block is abelian, commutators of centralizers vanish",
    )
    return report


def run_cih(seed, tol=None):
    report = Report("cih", seed, ["M", "Mprime"])
    rng = _rng(seed, "cih")
    for data in build_pair():
        cert = cih_certificate(data, 3, rng)
        report.add_certificate(cert)
    return report


RUNNERS = {
    "algebra": run_algebra,
    "spectral": run_spectral,
    "flow": run_flow,
    "integrals": run_integrals,
    "periodicity": run_periodicity,
    "criteria": run_criteria,
    "cih": run_cih,
}


def run_suite(name, seed, tol=None):
    if name == "all":
        combined = Report("all", seed, ["M", "Mprime"])
        for sub in SUITE_NAMES:
            rep = RUNNERS[sub](seed, tol)
            for check in rep.checks:
                check.name = f"{sub}.{check.name}"
                combined.checks.append(check)
        return combined
    if name not in RUNNERS:
        raise KeyError(name)
    return RUNNERS[name](seed, tol)
