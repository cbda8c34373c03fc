"""Bound and hybridized level pairs of two cores joined by a finite lead."""
import argparse

from quansistor import chain


def pair(L, lam, t):
    states = chain.solve_spectrum(chain.ModeSpec(lam, lam, t, t, L))
    return chain.identified_pair(states)


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--t", type=float, default=0.1)
    a = ap.parse_args()
    print(f"{'L':>3} {'lambda':>7} {'kind':>11} {'E_anti':>13} {'E_sym':>13} {'splitting':>12}")
    for L, lam in [(10, 2.5), (10, 1.4), (11, 2.5), (11, 1.2)]:
        s1, s2 = pair(L, lam, a.t)
        print(f"{L:3d} {lam:7.2f} {s1.kind:>11} {s1.energy:13.9f} {s2.energy:13.9f} "
              f"{abs(s2.energy - s1.energy):12.6e}")
    for L in (10, 11):
        b = chain.pair_splitting(chain.solve_spectrum(chain.ModeSpec(2.5, 2.5, a.t, a.t, L)))
        s1, s2 = pair(L, 1.4 if L == 10 else 1.2, a.t)
        h = abs(s2.energy - s1.energy)
        print(f"L={L}: 1/tau_b {b:.6e}  1/tau_s {h:.6e}  ratio {h / b:.0f}")


if __name__ == "__main__":
    main()
