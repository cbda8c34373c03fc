"""Print the u(4) independence certificate and its two controls."""
import json
import math

from quansistor import universality


def main():
    rows = {
        "generators": universality.independence_certificate(),
        "H16 replaced by H1": universality.independence_certificate(swap_h16_for_h1=True),
        "pi -> 22/7 in H1": universality.independence_certificate(pi_value=22 / 7),
    }
    for name, r in rows.items():
        print(f"{name:>20}: rank {r.rank:2d}  log10|det| {r.log10_abs_det:12.7f}  "
              f"min gaps {r.min_gaps[0]:.4f} {r.min_gaps[1]:.4f}")
    print(json.dumps(rows["generators"].as_dict(), indent=2))
    print(f"closest H1 levels: 2pi - 6 = {2 * math.pi - 6:.6f}")


if __name__ == "__main__":
    main()
