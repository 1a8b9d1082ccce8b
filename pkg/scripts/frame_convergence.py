"""Step-halving study of the RK4 frame integrator on a constant-coefficient
de Sitter type II frame (exact solution by matrix exponential)."""

import math

import numpy as np
from scipy.linalg import expm

from pmcv import catalog, frames
from pmcv.geometry import SpaceForm


def main(n=4, p=2, t_end=2.0):
    sf = SpaceForm(n + 1, 1, 1.0)
    B = [1.0 if i >= p else 0.0 for i in range(1, n + 1)]
    spec = catalog._spec_4_3(n, B)
    F0 = frames.initial_frame(spec.gram_target, sf.signs)
    M = spec.matrix(0.0)
    print(f"{'step':>10} {'max error':>12} {'order':>6} {'gram drift':>11}")
    prev = None
    for h in (0.2, 0.1, 0.05, 0.025, 0.0125, 1e-3):
        f = frames.integrate_frame(spec, (0.0, t_end), F0, sf.signs, step=h, project=False)
        exact = np.stack([expm(M * t) @ F0 for t in f.t_grid])
        err = float(np.abs(f.frames - exact).max())
        order = "" if prev is None or prev[0] / h != 2 else f"{math.log2(prev[1] / err):.2f}"
        print(f"{h:10.4g} {err:12.3e} {order:>6} {f.gram_drift():11.2e}")
        prev = (h, err)


if __name__ == "__main__":
    main()
