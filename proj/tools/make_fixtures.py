#!/usr/bin/env python3
"""Regenerates the JSON problem files under tests/fixtures/.

The files mirror the C++ builders in tests/fixtures.hpp; keeping the
generator in the repo documents where the long coefficient lists come
from.  Run from the repository root:

    python3 tools/make_fixtures.py
"""

import json
import math
import os

OUT = os.path.join(os.path.dirname(__file__), "..", "tests", "fixtures")


def const(v):
    """Monomial map for a constant in one space variable."""
    return {"0": v} if v != 0 else {}


def euler_problem(ncoeff=48):
    # d_t u = A(t)(1 + u), u(0) = 0, A(t) = sum_n (-1)^n n! t^{n+1}.
    coeffs = [{}]
    fact = 1.0
    for n in range(ncoeff - 1):
        coeffs.append(const(-fact if n % 2 else fact))
        fact *= n + 1.0
    return {
        "m": 1,
        "n_space": 1,
        "initial": [{}],
        "terms": [
            {"i": 1, "alpha": [0], "A": [[0]], "t_coeffs": coeffs},
            {"i": 1, "alpha": [1], "A": [[0]], "t_coeffs": coeffs},
        ],
        "levels": {"ks": [1.0], "thetas": [0.0]},
    }


def convergent_problem(order=32):
    # d_t u = u, u(0) = 1: solution e^t.
    coeffs = [const(1.0)] + [{} for _ in range(order)]
    return {
        "m": 1,
        "n_space": 1,
        "initial": [const(1.0)],
        "terms": [{"i": 1, "alpha": [1], "A": [[0]], "t_coeffs": coeffs}],
        "levels": {"ks": [1.0], "thetas": [0.0]},
    }


def two_level_problem(ncoeff=40):
    # d_t u = B(t), B(t) = sum_n (-1)^n [n! + Gamma(n/2+1)] t^{n+1}: a data
    # series mixing level-1 and level-2 factorial growth, summable with the
    # level pair k = (1, 2).
    coeffs = [{}]
    for n in range(ncoeff - 1):
        v = math.gamma(n + 1.0) + math.gamma(n / 2.0 + 1.0)
        coeffs.append(const(-v if n % 2 else v))
    return {
        "m": 1,
        "n_space": 1,
        "initial": [{}],
        "terms": [{"i": 1, "alpha": [0], "A": [[0]], "t_coeffs": coeffs}],
        "levels": {"ks": [1.0, 2.0], "thetas": [0.0, 0.0]},
    }


def main():
    os.makedirs(OUT, exist_ok=True)
    for name, data in [
        ("euler.json", euler_problem()),
        ("convergent.json", convergent_problem()),
        ("two_level.json", two_level_problem()),
    ]:
        path = os.path.join(OUT, name)
        with open(path, "w") as f:
            json.dump(data, f, indent=1)
            f.write("\n")
        print("wrote", os.path.normpath(path))


if __name__ == "__main__":
    main()
