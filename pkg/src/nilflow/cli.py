"""Command-line entry point.

Subcommands: verify, flow, closed-geodesic, integrals, poisson, criteria,
cih.  Exit codes: 0 pass, 1 check failure, 2 usage, 3 I/O, 4 degenerate
input, 5 construction failure.

State wire format: whitespace-separated labeled fields
`v: 5 floats; z: 3 floats; V: 5 floats; Z: 3 floats` (4 and 2 for the
deformation family).
"""

import argparse
import json
import sys
import time

import numpy as np

from .catalog import get_manifold
from .criteria import (
    butler_nonintegrability_sample,
    canonical_split,
    check_hr_presentation,
    cih_certificate,
)
from .flow import (
    DegenerateFrequencyError,
    TangentState,
    flow_exact_state,
    flow_rk4,
    sample_generic_state,
)
from .integrals import INTEGRAL_NAMES, evaluate_integrals, poisson_matrix
from .lie_core import lattice_contains
from .periodicity import ConstructionError, construct_closed_geodesic
from .report import Report, fmt_value
from .suites import SUITE_NAMES, Tolerances, run_suite

EXIT_PASS = 0
EXIT_CHECK_FAILURE = 1
EXIT_USAGE = 2
EXIT_IO = 3
EXIT_DEGENERATE = 4
EXIT_CONSTRUCTION = 5


def format_state(alg, state):
    f = lambda xs: " ".join(format(float(x), ".17g") for x in xs)
    return (
        f"v: {f(state.v)}; z: {f(state.z)}; "
        f"V: {f(state.V)}; Z: {f(state.Z)}"
    )


def parse_state(alg, text):
    parts = {}
    for chunk in text.split(";"):
        chunk = chunk.strip()
        if not chunk:
            continue
        label, _, rest = chunk.partition(":")
        parts[label.strip()] = [float(x) for x in rest.split()]
    dv, dz = alg.dim_v, alg.dim_z
    for label, n in (("v", dv), ("z", dz), ("V", dv), ("Z", dz)):
        if label not in parts:
            raise ValueError(f"state record missing field {label!r}")
        if len(parts[label]) != n:
            raise ValueError(
                f"field {label!r} needs {n} numbers, got {len(parts[label])}"
            )
    return TangentState(parts["v"], parts["z"], parts["V"], parts["Z"])


def _load_tolerances(path):
    if path is None:
        return Tolerances()
    with open(path) as fh:
        raw = json.load(fh)
    tol = Tolerances()
    for key, val in raw.items():
        if not hasattr(tol, key):
            raise ValueError(f"unknown config key {key!r}")
        setattr(tol, key, type(getattr(tol, key))(val))
    return tol


def _emit(text, out_path):
    if out_path:
        with open(out_path, "w") as fh:
            fh.write(text + "\n")
    else:
        print(text)


def _read_state_arg(alg, args):
    if args.state is not None:
        return parse_state(alg, args.state)
    return parse_state(alg, sys.stdin.read())


def cmd_verify(args):
    tol = _load_tolerances(args.config)
    t0 = time.perf_counter()
    report = run_suite(args.suite, args.seed, tol)
    report.wall_time_s = time.perf_counter() - t0
    _emit(report.to_text(), args.out)
    return EXIT_PASS if report.passed else EXIT_CHECK_FAILURE


def cmd_flow(args):
    data = get_manifold(args.manifold)
    state = _read_state_arg(data.alg, args)
    tol = _load_tolerances(args.config)
    if args.method == "exact":
        end = flow_exact_state(data.alg, args.manifold, state, args.t)
    else:
        from .flow import default_steps

        steps = default_steps(args.t, tol.rk4_steps_per_unit)
        end = flow_rk4(data.alg, state, args.t, steps)
    _emit(format_state(data.alg, end), args.out)
    return EXIT_PASS


def cmd_closed_geodesic(args):
    data = get_manifold(args.manifold)
    if args.target is not None:
        target = parse_state(data.alg, args.target)
    else:
        rng = np.random.Generator(np.random.Philox(args.seed))
        target = sample_generic_state(args.manifold, rng)
    try:
        geo = construct_closed_geodesic(
            args.manifold, target, epsilon=args.epsilon,
            lattice_v=data.lattice_v, lattice_z=data.lattice_z,
            bound=args.bound,
        )
    except DegenerateFrequencyError as e:
        raise ConstructionError(str(e)) from e
    in_gamma = lattice_contains(data.lattice_v, geo.a_v) and \
        lattice_contains(data.lattice_z, geo.a_z)
    rot_exact = (geo.tau_over_pi * geo.c[2] / 2).denominator == 1 and \
        (geo.tau_over_pi * geo.norm_c / 2).denominator == 1
    doc = {
        "manifold": args.manifold,
        "initial_state": format_state(data.alg, geo.state),
        "c": fmt_value(list(geo.c)),
        "norm_c": fmt_value(geo.norm_c),
        "p": geo.p, "q": geo.q, "m": geo.m,
        "tau_over_pi": fmt_value(geo.tau_over_pi),
        "a_v": fmt_value(list(geo.a_v)),
        "a_z": fmt_value(list(geo.a_z)),
        "a_in_gamma": "exact_pass" if in_gamma else "fail",
        "rotation_condition": "exact_pass" if rot_exact else "fail",
    }
    _emit(json.dumps(doc, indent=2), args.out)
    return EXIT_PASS if in_gamma and rot_exact else EXIT_CHECK_FAILURE


def cmd_integrals(args):
    data = get_manifold(args.manifold)
    state = _read_state_arg(data.alg, args)
    vals = evaluate_integrals(state)
    doc = {name: fmt_value(float(x)) for name, x in zip(INTEGRAL_NAMES, vals)}
    _emit(json.dumps(doc, indent=2), args.out)
    return EXIT_PASS


def cmd_poisson(args):
    data = get_manifold(args.manifold)
    state = _read_state_arg(data.alg, args)
    tol = _load_tolerances(args.config)
    mat = poisson_matrix(data.alg, state, tol.fd_step)
    rows = []
    worst = 0.0
    for a in range(8):
        for b in range(a + 1, 8):
            val = float(mat[a, b])
            worst = max(worst, abs(val))
            rows.append({
                "pair": f"{{{INTEGRAL_NAMES[a]}, {INTEGRAL_NAMES[b]}}}",
                "bracket": fmt_value(val),
                "tolerance": fmt_value(tol.bracket_tol),
                "pass": abs(val) <= tol.bracket_tol,
            })
    doc = {"rows": rows, "max_abs": fmt_value(worst)}
    _emit(json.dumps(doc, indent=2), args.out)
    return EXIT_PASS if worst <= tol.bracket_tol else EXIT_CHECK_FAILURE


def cmd_criteria(args):
    report = Report("criteria-cmd", args.seed, [args.manifold])
    data = get_manifold(args.manifold)
    cert = check_hr_presentation(data.alg, canonical_split(data.alg))
    report.add_certificate(cert)
    rng = np.random.Generator(np.random.Philox(args.seed))
    cert, fraction = butler_nonintegrability_sample(data.alg, 1000, rng)
    report.add(
        "butler_positive_dim_fraction", True, value=fraction,
        note="sampled evidence; see certificate data",
    )
    _emit(report.to_text(), args.out)
    return EXIT_PASS


def cmd_cih(args):
    data = get_manifold(args.manifold)
    rng = np.random.Generator(np.random.Philox(args.seed))
    cert = cih_certificate(data, args.bound or 3, rng)
    _emit(json.dumps(cert.to_dict(), indent=2), args.out)
    return EXIT_PASS if cert.passed else EXIT_CHECK_FAILURE


def build_parser():
    p = argparse.ArgumentParser(
        prog="nilflow",
        description="verification laboratory for an isospectral pair of "
                    "two-step nilmanifolds with opposite integrability",
    )
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, manifold=True):
        sp.add_argument("--seed", type=int, default=0)
        sp.add_argument("--out", default=None)
        sp.add_argument("--config", default=None)
        if manifold:
            sp.add_argument("--manifold", default="M")

    sp = sub.add_parser("verify", help="run a verification suite")
    sp.add_argument("--suite", default="all",
                    choices=("all",) + SUITE_NAMES)
    common(sp, manifold=False)

    sp = sub.add_parser("flow", help="propagate a tangent state")
    common(sp)
    sp.add_argument("--t", type=float, default=1.0)
    sp.add_argument("--method", choices=("exact", "rk4"), default="exact")
    sp.add_argument("--state", default=None,
                    help="state record; stdin if omitted")

    sp = sub.add_parser("closed-geodesic",
                        help="construct an exactly closed geodesic")
    common(sp)
    sp.add_argument("--epsilon", type=float, default=0.05)
    sp.add_argument("--bound", type=int, default=None)
    sp.add_argument("--target", default=None,
                    help="target state record; sampled from --seed if omitted")

    sp = sub.add_parser("integrals", help="evaluate the eight integrals")
    common(sp)
    sp.add_argument("--state", default=None)

    sp = sub.add_parser("poisson", help="all pairwise Poisson brackets")
    common(sp)
    sp.add_argument("--state", default=None)

    sp = sub.add_parser("criteria", help="integrability criteria certificates")
    common(sp)

    sp = sub.add_parser("cih", help="clean-intersection certificate")
    common(sp)
    sp.add_argument("--bound", type=int, default=3)
    sp.add_argument("--r2", default=None)

    return p


COMMANDS = {
    "verify": cmd_verify,
    "flow": cmd_flow,
    "closed-geodesic": cmd_closed_geodesic,
    "integrals": cmd_integrals,
    "poisson": cmd_poisson,
    "criteria": cmd_criteria,
    "cih": cmd_cih,
}


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return EXIT_USAGE if e.code not in (0, None) else 0
    try:
        return COMMANDS[args.command](args)
    except DegenerateFrequencyError as e:
        print(f"degenerate input: {e}", file=sys.stderr)
        if getattr(args, "method", None) == "exact":
            print("hint: --method rk4 handles degenerate Z", file=sys.stderr)
        return EXIT_DEGENERATE
    except ConstructionError as e:
        print(f"construction failure: {e}", file=sys.stderr)
        return EXIT_CONSTRUCTION
    except (ValueError, KeyError) as e:
        print(f"usage error: {e}", file=sys.stderr)
        return EXIT_USAGE
    except OSError as e:
        print(f"I/O error: {e}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
