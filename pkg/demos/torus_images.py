"""Orbit closures of a torus and the cones they map onto.

The diagonal torus of GL(3) acts on R^3. For a vector x its orbit closure
splits into finitely many orbits, one per face of the cone spanned by the
weights on the support of x. This script lists them, drives x into each
one with a one-parameter subgroup, and then looks at the null cone of the
torus of SL(3).
"""

import numpy as np

from gradmap.gallery import build
from gradmap.repmodel import build_representation
from gradmap.stability import (classify_point_linear, face_orbit_table, hm_witness,
                               null_cone_decomposition)


def main():
    R = build_representation(build("torus_gl(3)"))
    x = np.array([1.0, -2.0, 0.5])
    print("weights of GL(3) on R^3:\n", R.weights)
    A = classify_point_linear(R, x)
    print(f"\nx = {x}: class {A.cls}, destabilizing xi {A.certificate.get('xi')}")

    print("\nface  ->  limit v_F  ->  mu(v_F)")
    for k, row in enumerate(face_orbit_table(R, x)):
        w = hm_witness(R, x, k)
        print(f"  J={row.face.J!s:10} v_F={np.round(row.v_F, 3)!s:22} mu={np.round(row.mu, 3)!s:18}"
              f" witness xi={np.round(w.xi, 3)} (limit error {w.error:.1e})")

    S = build_representation(build("torus_sl(3)"))
    print("\nnull cone of the SL(3) torus on R^3:")
    for comp in null_cone_decomposition(S).components:
        print(f"  span of basis vectors {comp.Z}, driven to 0 by xi = {np.round(comp.xi, 3)}")
    for y in ([1.0, 1.0, 0.0], [1.0, 1.0, 1.0]):
        print(f"  {y}: {classify_point_linear(S, y).cls}")


if __name__ == "__main__":
    main()
