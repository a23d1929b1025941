"""Channel-resolved rates for parallel and perpendicular alignment.

Writes the spectrum CSV and prints, per channel, the photoelectron energy
and the parallel/perpendicular ratio next to cos^2(R k / 2).

    python3 scripts/channel_spectrum.py configs/h2_r3_2e13.yaml --out spectrum.csv
"""

import argparse
import math

from mosfa.cli import cmd_spectrum
from mosfa.config import parse_config
from mosfa.csvio import parse_table


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("config")
    ap.add_argument("--out", default="spectrum.csv")
    ap.add_argument("--n-max", type=int, help="last channel (default: automatic tail)")
    args = ap.parse_args()

    cfg = parse_config(args.config)
    if args.n_max is not None:
        cfg = cfg.replace("numerics", n_max=args.n_max)
    text = cmd_spectrum(cfg)
    with open(args.out, "w", encoding="utf-8") as fh:
        fh.write(text)

    tab = parse_table(text)
    r = cfg.molecule.R_bohr
    print(f"{'N':>4} {'E (eV)':>9} {'par/perp':>10} {'cos^2(Rk/2)':>12}")
    for n, e_h, e_ev, par, perp in zip(tab["N"], tab["energy_hartree"], tab["energy_eV"],
                                       tab["rate_parallel_au"], tab["rate_perpendicular_au"]):
        k = math.sqrt(2 * e_h)
        ratio = par / perp if perp > 0 else float("nan")
        print(f"{int(n):4d} {e_ev:9.3f} {ratio:10.4f} {math.cos(r * k / 2) ** 2:12.4f}")
    print(f"wrote {args.out}")


if __name__ == "__main__":
    main()
