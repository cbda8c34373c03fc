"""sqrt(iSWAP) fidelity of the resonator-mediated coupler against g/Delta."""
from quansistor import logic


def main():
    print(f"{'g/Delta':>8} {'K_quoted':>10} {'K_2nd':>11} {'F 2nd/dressed':>14} {'F quoted/bare':>14}")
    for r in (0.005, 0.01, 0.02, 0.04, 0.06, 0.08):
        cfg = logic.DispersiveConfig(6.0, 5.0, r, r, photon_cutoff=5)
        print(f"{r:8.3f} {logic.k_effective(cfg):10.3e} {logic.k_second_order(cfg):11.3e} "
              f"{logic.sqrt_iswap_fidelity(cfg):14.6f} "
              f"{logic.sqrt_iswap_fidelity(cfg, 'quoted', 'bare'):14.6f}")


if __name__ == "__main__":
    main()
