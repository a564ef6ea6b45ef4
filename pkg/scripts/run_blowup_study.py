"""Blow-up study across fractional orders: fitted kappa vs both candidates.

For each s on a small grid, fit the limit constant, print which analytic
candidate it matches, and record the convergence rate of sup |v_j - kappa x^s|.
"""

from __future__ import annotations

import argparse
import json
import sys

from caputo_density.blowup import Psi0Profile, check_blowup_convergence, estimate_kappa


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--orders", default="0.25,0.5,0.75", help="comma list of s values")
    parser.add_argument("--j-list", default="4,8,16,32,64")
    args = parser.parse_args()
    profile = Psi0Profile.default_quadratic()
    j_list = tuple(int(j) for j in args.j_list.split(","))
    rows = []
    for s in (float(v) for v in args.orders.split(",")):
        kappa = estimate_kappa(s, profile)
        conv = check_blowup_convergence(s, profile, j_list, kappa=kappa)
        rows.append(
            {
                "s": s,
                "kappa_fitted": kappa.kappa,
                "kappa_a": kappa.kappa_a,
                "kappa_b": kappa.kappa_b,
                "matched": kappa.matched,
                "fit_exponent": kappa.fit_exponent,
                "rate_exponent": conv.rate_exponent,
                "sup_errors": list(conv.sup_errors),
            }
        )
    print(json.dumps(rows, indent=2, sort_keys=True))
    return 0 if all(r["matched"] for r in rows) else 3


if __name__ == "__main__":
    sys.exit(main())
