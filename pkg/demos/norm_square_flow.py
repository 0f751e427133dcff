"""The norm-square gradient flow on projective space.

Starting from a few binary cubics, the flow of f = |mu~|^2 / 2 is run to its
limit. The limit norm is compared with the minimum-norm point of the weight
polytope, and the flow is lifted to the group to check x(t) = g(t)^-1 y.
"""

import numpy as np

from gradmap.flows import norm_square_flow, orbit_min_norm
from gradmap.gallery import binary_form_vector, build
from gradmap.repmodel import build_representation


def main():
    R = build_representation(build("sl2_binary_forms(3)"))
    starts = {
        "x^3 + y^3": (1, 0, 0, 1),
        "x^2 y": (0, 1, 0, 0),
        "x^3 + x y^2": (1, 0, 1, 0),
        "random": tuple(np.random.default_rng(7).normal(size=4)),
    }
    for label, coeffs in starts.items():
        y = binary_form_vector(3, coeffs)
        tr = norm_square_flow(R, y)
        mn = orbit_min_norm(R, y)
        print(f"{label:12} steps={len(tr.times):5d} t_end={tr.times[-1]:8.2f} "
              f"|mu~_p(limit)|={tr.limit_mu_norm:.3e} "
              f"torus min norm: polytope {mn.polytope_value:.3e} flow {mn.flow_value:.3e} "
              f"lift error {tr.lift_error:.1e} decay {tr.decay_estimate}")


if __name__ == "__main__":
    main()
