"""Asymptotic regularity of the Lin map in several l_p norms.

Prints, for a few horizons ``n``, the worst gap ``||F^{n+2}x - F^{n+1}x||``
over random seeds next to ``1/Phi(n) = n^{-1/p}``, and writes an SVG of the
decay curves.

    python3 scripts/ar_decay_lp.py [--seeds 20] [--horizon 400] [--svg ar_decay.svg]
"""
import argparse
from pathlib import Path

import numpy as np

from fpfree.core_seq import Coeffs, SpaceSpec, fundamental_function
from fpfree.lin_map import MonotoneCapK, orbit
from fpfree.report import svg_lines
from fpfree.sampling import cap_point


def main():
    ap = argparse.ArgumentParser(description="Lin map gap decay across p")
    ap.add_argument("--seeds", type=int, default=20)
    ap.add_argument("--horizon", type=int, default=400)
    ap.add_argument("--support", type=int, default=64)
    ap.add_argument("--svg", default="ar_decay.svg")
    args = ap.parse_args()
    rng = np.random.default_rng(0)
    series = {}
    marks = [n for n in (10, 50, 100, 200, 400, 1000) if n < args.horizon]
    for p in (1.5, 2.0, 3.0):
        K = MonotoneCapK(SpaceSpec.lp(p))
        worst = np.zeros(args.horizon)
        for _ in range(args.seeds):
            rec = orbit(Coeffs(cap_point(rng, args.support, p)), K, args.horizon + 1)
            worst = np.maximum(worst, rec.gaps[: args.horizon])
        ns = np.arange(1, args.horizon)
        series[f"gap, p={p:g}"] = (ns, worst[1:])
        cells = ", ".join(f"n={n}: {worst[n]:.4f} vs {1 / fundamental_function(n, K.space):.4f}" for n in marks)
        print(f"p={p:g}  {cells}")
    Path(args.svg).write_text(svg_lines(series, "worst gap over seeds", "n", "gap"), encoding="utf-8")
    print(f"wrote {args.svg}")


if __name__ == "__main__":
    main()
