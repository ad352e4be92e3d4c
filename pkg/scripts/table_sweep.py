"""Largest certifiable gain radius for the linear-gain kernel at several horizons.

For each horizon the target radius is checked first, then the largest
radius that still yields RobustStable is located by bisection.
"""

import argparse

from intdelay import benchmark_systems as bs
from intdelay.cutoff_check import VerdictKind
from intdelay.encirclement import full_pipeline


def certified(tau_bar: float, h: float, r_c: float) -> bool:
    try:
        res = full_pipeline(bs.linear_gain_kernel(tau_bar=tau_bar, h=h, r_c=r_c))
    except Exception:
        return False
    return res.verdict.kind is VerdictKind.ROBUST_STABLE


def largest_radius(tau_bar: float, h: float, hi: float = 1.0, iters: int = 40) -> float:
    lo = 0.0
    if not certified(tau_bar, h, lo):
        return float("nan")
    for _ in range(iters):
        mid = 0.5 * (lo + hi)
        lo, hi = (mid, hi) if certified(tau_bar, h, mid) else (lo, mid)
    return lo


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--h", type=float, default=0.1)
    args = ap.parse_args()
    print("tau_bar,r_c,verdict,reason,decided_at_step,rho_T,min_margin,largest_certified_r_c")
    for tau_bar, r_c in bs.TABLE_SWEEP:
        r = full_pipeline(bs.linear_gain_kernel(tau_bar=tau_bar, h=args.h, r_c=r_c))
        s = r.summary()
        best = largest_radius(tau_bar, args.h)
        print(f"{tau_bar:g},{r_c:g},{s['verdict']},{s['reason'] or ''},{s['decided_at_step']},"
              f"{s['rho_T']:.6f},{s['min_margin']:.6f},{best:.6f}")


if __name__ == "__main__":
    main()
