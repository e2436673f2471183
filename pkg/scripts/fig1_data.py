"""Sum-approximation curves E(n, l) for the Fig. 1 setting, with AIM values alongside.

    python scripts/fig1_data.py [--a 1 --b 0.5 --d 3 --nmax 2 --lmax 10] [--no-aim] [--out fig1.csv]
"""

import argparse
import csv
import sys

from aimspectra.aim import spectrum
from aimspectra.bounds import fig1_curve
from aimspectra.problem import ProblemSpec


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--a", default="1")
    ap.add_argument("--b", default="0.5")
    ap.add_argument("--d", type=int, default=3)
    ap.add_argument("--nmax", type=int, default=2)
    ap.add_argument("--lmax", type=int, default=10)
    ap.add_argument("--no-aim", action="store_true", help="skip the (slower) AIM column")
    ap.add_argument("--out", help="CSV path (default stdout)")
    args = ap.parse_args()

    curve = fig1_curve(args.a, args.b, args.d, range(args.nmax + 1), args.lmax)
    aim = {}
    if not args.no_aim:
        for l in range(args.lmax + 1):
            levels = spectrum(ProblemSpec(args.a, args.b, d=args.d, l=l), args.nmax + 1, digits=40)
            aim.update({(n, l): r.E for n, r in enumerate(levels)})

    fh = open(args.out, "w", newline="") if args.out else sys.stdout
    writer = csv.writer(fh)
    writer.writerow(["n", "l", "E_sum", "E_aim"])
    for n, l, E in curve:
        writer.writerow([n, l, f"{float(E):.12f}",
                         f"{float(aim[(n, l)]):.12f}" if (n, l) in aim else ""])
    if args.out:
        fh.close()


if __name__ == "__main__":
    main()
