"""Tabulate the two-curvature closed forms (H^2, mu^2, nu^2) over a parameter grid
and check each row against the trace identities for A, A^2 and c + eps mu nu = 0."""

import math

from pmcv import analysis
from pmcv.errors import FeasibilityError


def main():
    print(f"{'n':>2} {'l':>2} {'c':>5} {'eps':>3} {'lambda':>8} {'sign':>4} {'H^2':>12} {'mu^2':>12} {'nu^2':>12} {'residual':>9}")
    for n in (3, 4, 6):
        for l in range(1, n):
            for c in (-1.0, 1.0):
                for eps in (1, -1):
                    lam = eps * (2 * math.sqrt(l * (n - l)) * abs(c) + 1.0)
                    try:
                        res = analysis.theorem_3_5_values(n, l, c, eps, lam)
                    except FeasibilityError as e:
                        print(f"{n:>2} {l:>2} {c:>5} {eps:>3} {lam:8.4f}  {e}")
                        continue
                    for b in res["branches"]:
                        mu, nu, H = analysis.signed_curvatures(n, l, c, eps, b["mu2"], b["nu2"])
                        r = max(abs(analysis.cartan_identity_residual(mu, nu, c, eps)),
                                abs(l * mu * mu + (n - l) * nu * nu - eps * lam),
                                abs(H * H - b["H2"]))
                        print(f"{n:>2} {l:>2} {c:>5} {eps:>3} {lam:8.4f} {b['sign']:>4} "
                              f"{b['H2']:12.8f} {b['mu2']:12.8f} {b['nu2']:12.8f} {r:9.1e}")


if __name__ == "__main__":
    main()
