"""Renormalized energy E*(lambda) and decay rate over a lambda sweep."""
import argparse

import numpy as np

from quansistor import leads


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--t", type=float, nargs="+", default=[0.05, 0.1, 0.3])
    ap.add_argument("--step", type=float, default=0.25)
    a = ap.parse_args()
    for t in a.t:
        print(f"# t = {t}: threshold {leads.locate_threshold(t):.12f} (2 - t^2 = {2 - t * t:.12f})")
        print(f"{'lambda':>7} {'kind':>10} {'Re E*':>14} {'decay':>12} {'residual':>9}")
        for lam in np.arange(-3.0, 3.0 + 1e-9, a.step):
            fp = leads.fixed_point(lam, t)
            print(f"{lam:7.2f} {fp.kind:>10} {fp.e_star.real:14.9f} {fp.decay_rate:12.4e} {fp.residual:9.1e}")
    val, arg = leads.max_bracket_decay()
    print(f"max (1 - t^2)|Im E*(0)| = {val:.12f} at t^2 = {arg:.9f}")


if __name__ == "__main__":
    main()
