#!/usr/bin/env python3
"""Construct exactly closed geodesics near random targets and show how the
period and lattice multiple respond to the approximation quality epsilon.
"""

import argparse

import numpy as np

from nilflow.catalog import build_pair
from nilflow.flow import sample_generic_state
from nilflow.periodicity import construct_closed_geodesic


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--n", type=int, default=5)
    ap.add_argument("--epsilon", type=float, default=0.1)
    args = ap.parse_args()

    rng = np.random.Generator(np.random.Philox(args.seed))
    for data in build_pair():
        print(f"== {data.name} ==")
        for _ in range(args.n):
            target = sample_generic_state(data.name, rng)
            geo = construct_closed_geodesic(
                data.name, target, epsilon=args.epsilon,
                lattice_v=data.lattice_v, lattice_z=data.lattice_z,
            )
            dist = max(
                float(np.linalg.norm(geo.state.Z - target.Z)),
                float(np.linalg.norm(geo.state.V - target.V)),
                float(np.linalg.norm(geo.state.v - target.v)),
            )
            print(
                f"  |c|={geo.norm_c}  c_k/|c|={geo.p}/{geo.q}  m={geo.m}  "
                f"tau/pi={geo.tau_over_pi}  distance={dist:.4f}"
            )


if __name__ == "__main__":
    main()
