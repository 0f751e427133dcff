"""Stability of binary quartics under SL(2,R).

Five quartics are classified first with the diagonal torus alone and then
with the whole group. The torus cannot see that (x+y)^4 is unstable because
every torus weight occurs in its support; the norm-square flow finds the
rotated destabilizing direction instead.
"""

import numpy as np

from gradmap.gallery import binary_form_vector, build
from gradmap.repmodel import build_representation
from gradmap.stability import classify_point_projective, destabilize_reductive

QUARTICS = {
    "x^4": (1, 0, 0, 0, 0),
    "x^3 y": (0, 1, 0, 0, 0),
    "x^2 y^2": (0, 0, 1, 0, 0),
    "x^4 + y^4": (1, 0, 0, 0, 1),
    "(x + y)^4": (1, 4, 6, 4, 1),
}


def main():
    R = build_representation(build("sl2_binary_forms(4)"))
    print(f"{'form':12} {'torus verdict':26} {'group verdict':26} route")
    for label, coeffs in QUARTICS.items():
        x = binary_form_vector(4, coeffs)
        torus = classify_point_projective(R, x).cls
        full = classify_point_projective(R, x, reductive=True, seeds=32)
        route = full.certificate.get("route", "-")
        print(f"{label:12} {torus:26} {full.cls:26} {route}")

    x = binary_form_vector(4, QUARTICS["(x + y)^4"])
    res = destabilize_reductive(R, x)
    print(f"\n(x + y)^4 is driven to 0 along xi = {np.round(res.xi, 6) + 0.0} (coordinates on H, X),"
          f" maximal weight {res.lam:.6g}")


if __name__ == "__main__":
    main()
