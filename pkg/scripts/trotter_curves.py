"""Error of the commutator and sum product formulas against n."""
import numpy as np

from quansistor import universality


def main():
    g = universality.build_generators()
    seq = universality.generate_sequence(g)
    ns = [2**k for k in range(4, 15)]
    p, q = (m / np.linalg.norm(m, 2) for m in seq[:2])
    curves = {
        "commutator, raw H1 H2": universality.trotter_errors(seq[0], seq[1], ns, "commutator"),
        "commutator, normalized": universality.trotter_errors(p, q, ns, "commutator"),
        "sum, H1 + Htilde": universality.trotter_errors(g.h1, g.htilde, ns, "sum"),
    }
    print(f"{'n':>6} " + " ".join(f"{k:>24}" for k in curves))
    for i, n in enumerate(ns):
        print(f"{n:6d} " + " ".join(f"{c[i]:24.3e}" for c in curves.values()))
    for k, c in curves.items():
        sl = np.polyfit(np.log(ns[-4:]), np.log(c[-4:]), 1)[0]
        print(f"{k}: tail slope {sl:+.2f}, monotone (10%) {universality.is_monotone(c)}")


if __name__ == "__main__":
    main()
