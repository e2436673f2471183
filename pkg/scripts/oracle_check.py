"""Cross-check AIM against the finite-difference oracle on a parameter grid.

    python scripts/oracle_check.py [--count 3] [--d 3]

Prints the number of agreeing significant digits for every (a, b, R, n).
"""

import argparse
import itertools
import math

from aimspectra.aim import spectrum
from aimspectra.oracle import fd_eigenvalues
from aimspectra.problem import ProblemSpec


def agreeing_digits(x: float, y: float) -> float:
    diff = abs(x - y) / max(1.0, abs(y))
    return 16.0 if diff == 0 else -math.log10(diff)


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--count", type=int, default=3)
    ap.add_argument("--d", type=int, default=3)
    args = ap.parse_args()

    worst = math.inf
    print(f"{'a':>3} {'b':>4} {'R':>4} {'n':>2} {'E_aim':>22} {'E_fd':>22} digits")
    for a, b, R in itertools.product([-1, 0, 1], ["0.5", "1", "2"], [1, None]):
        spec = ProblemSpec(a, b, d=args.d, R=R)
        ours = spectrum(spec, args.count, digits=40)
        theirs = fd_eigenvalues(spec, count=args.count)
        for n, (x, y) in enumerate(zip(ours, theirs)):
            dig = agreeing_digits(float(y), float(x.E))
            worst = min(worst, dig)
            print(f"{a:>3} {b:>4} {str(R or 'inf'):>4} {n:>2} {float(x.E):>22.15g} "
                  f"{float(y):>22.15g} {dig:5.1f}")
    print(f"worst agreement: {worst:.1f} digits")


if __name__ == "__main__":
    main()
