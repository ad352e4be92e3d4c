"""Run the certifier on the reference systems and print a summary table."""

import argparse
import time

from intdelay import benchmark_systems as bs
from intdelay.encirclement import PipelineOptions, full_pipeline

SYSTEMS = {
    "exponential_2x2": bs.exponential_kernel_2x2,
    "linear_gain": bs.linear_gain_kernel,
    "scalar_hat": bs.scalar_hat_kernel,
    "band_demo_2x2": bs.band_demo_2x2,
    "constant_3": bs.constant_kernel,
}


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--no-cluster", action="store_true")
    args = ap.parse_args()
    opts = PipelineOptions(cluster=not args.no_cluster)
    print(f"{'system':<16} {'verdict':<13} {'zeta':>4} {'step':>4} {'rho_T':>8} {'omega_bar':>10} "
          f"{'margin':>9} {'alpha':>5} {'ms':>7}")
    for name, make in SYSTEMS.items():
        t0 = time.perf_counter()
        r = full_pipeline(make(), opts)
        ms = 1e3 * (time.perf_counter() - t0)
        s = r.summary()
        fmt = lambda v, spec: "-" if v is None else format(v, spec)
        print(f"{name:<16} {s['verdict']:<13} {fmt(s['zeta'], 'd'):>4} {s['decided_at_step']:>4} "
              f"{fmt(s['rho_T'], '.4f'):>8} {fmt(s['omega_bar'], '.3f'):>10} "
              f"{fmt(s['min_margin'], '.4f'):>9} {fmt(s['alpha'], 'd'):>5} {ms:7.1f}")


if __name__ == "__main__":
    main()
