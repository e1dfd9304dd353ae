"""Independent exact oracle for the frozen reference values in values.json.

Works from the defining formulas with Fractions and imports nothing from
``simplexgeom``. Rerun with ``python3 compute_oracles.py`` to regenerate.
"""

import itertools
import json
from fractions import Fraction as Fr
from pathlib import Path


def fisher(p, X, Y):
    return sum(x * y / w for w, x, y in zip(p, X, Y))


def a_d(p, X, Y):
    return sum(x * y / (w * w) for w, x, y in zip(p, X, Y))


def a_s(p, X, Y):
    # double-sum form, deliberately not the product of sums
    return sum(X[i] * Y[j] / (p[i] * p[j]) for i in range(len(p)) for j in range(len(p)))


def a_lm(lam, mu):
    return lambda p, X, Y: lam * a_d(p, X, Y) + mu * a_s(p, X, Y)


def z(n, i):
    return [(1 if k == i else 0) - Fr(1, n + 1) for k in range(n + 1)]


def patch_matrix(sigma, a):
    """Columns Q_i = a_i delta_sigma(i) + (1 - a_i) delta_sigma(n+2), 1-based sigma."""
    n1 = len(a)
    M = [[Fr(0)] * n1 for _ in range(n1 + 1)]
    for i, ai in enumerate(a):
        M[sigma[i] - 1][i] += ai
        M[sigma[n1] - 1][i] += 1 - ai
    return M


def matvec(M, v):
    return [sum(M[r][c] * v[c] for c in range(len(v))) for r in range(len(M))]


def gram(T, p):
    n = len(p) - 1
    basis = [[(1 if k == i else 0) - (1 if k == n else 0) for k in range(n + 1)]
             for i in range(n)]
    return [[T(p, bi, bj) for bj in basis] for bi in basis]


def psi(u, alpha, sigma):
    q = [None] * 3
    q[sigma[0] - 1] = alpha * u
    q[sigma[1] - 1] = alpha * (1 - u)
    q[sigma[2] - 1] = 1 - alpha
    return q


def e(i, j, size=3):
    return [(1 if k == i - 1 else 0) - (1 if k == j - 1 else 0) for k in range(size)]


def c1_ratio(T, u, alpha, sigma):
    q = psi(u, alpha, sigma)
    s1, s2, s3 = sigma
    W3, W1, W2 = e(s1, s2), e(s3, s2), e(s1, s3)
    return T(q, W3, W1) / T(q, W3, W2)


def main():
    out = {}
    half = [Fr(1, 2), Fr(1, 2)]
    Z = [Fr(1, 2), Fr(-1, 2)]
    out["fisher_b1_ZZ"] = fisher(half, Z, Z)
    p58 = [Fr(5, 8), Fr(3, 8)]
    out["lm_2_1_p58_ZZ"] = a_lm(2, 1)(p58, Z, Z)
    b2 = [Fr(1, 3)] * 3
    out["gram_fisher_b2"] = gram(fisher, b2)
    out["gram_d_b2"] = gram(a_d, b2)
    out["gram_s_b2"] = gram(a_s, b2)
    out["d_b2_Z1Z1"] = a_d(b2, z(2, 0), z(2, 0))
    out["d_b2_Z1Z2"] = a_d(b2, z(2, 0), z(2, 1))
    third = [Fr(1, 3), Fr(2, 3)]
    out["s_2_25_A1_third"] = Fr(9, 4) * a_s(third, Z, Z)
    out["s_2_25_mu"] = Fr(16, 9) * out["s_2_25_A1_third"]

    M = patch_matrix((1, 2, 3), (Fr(1, 2), Fr(9, 10)))
    q, V = matvec(M, half), matvec(M, Z)
    out["patch_witness_pullback"] = a_d(q, V, V)
    out["patch_witness_base"] = a_d(half, Z, Z)

    # cone metric lambda~ = 1, mu~ = 0 pulled back by dropping the last coordinate
    qc, X = [Fr(3, 10), Fr(3, 10), Fr(2, 5)], [1, -1, 0]
    h = qc[0] + qc[1]
    out["cone_j_witness"] = sum(h / qc[i] * X[i] * X[i] for i in range(2))
    out["cone_j_reference"] = a_d(qc, X, X)

    # fisher under a scalar patch at a fixed rational sample
    alpha = Fr(3, 10)
    M = patch_matrix((2, 3, 1), (alpha, alpha))
    p, X, Y = [Fr(1, 5), Fr(4, 5)], [Fr(1), Fr(-1)], [Fr(2), Fr(-2)]
    out["fisher_patch_ratio"] = fisher(matvec(M, p), matvec(M, X), matvec(M, Y)) / fisher(p, X, Y)

    # C1 ratios on a few grid cells
    us = [Fr(k, 24) for k in (1, 8, 12, 17, 23)]
    cells = []
    for sigma in itertools.permutations((1, 2, 3)):
        for alpha in (Fr(1, 10), Fr(1, 2), Fr(9, 10)):
            for u in us:
                cells.append({"sigma": list(sigma), "alpha": alpha, "u": u,
                              "ratio_d": c1_ratio(a_d, u, alpha, sigma),
                              "ratio_lm11": c1_ratio(a_lm(1, 1), u, alpha, sigma)
                              if a_lm(1, 1)(psi(u, alpha, sigma), e(sigma[0], sigma[1]),
                                            e(sigma[0], sigma[2])) != 0 else None})
    out["c1_cells"] = cells

    # patched factorization example: n = 2, a = (1/2, 9/10, 7/10), j = 1, b = 2/5
    a, b, j = [Fr(1, 2), Fr(9, 10), Fr(7, 10)], Fr(2, 5), 1
    others = [a[i] for i in range(3) if i != j - 1]
    lo = b * a[j - 1] + (1 - b) * min(others)
    hi = b * a[j - 1] + (1 - b) * max(others)
    c = (lo + hi) / 2
    out["patched_interval"] = [lo, hi]
    out["patched_c_mid"] = c
    out["patched_t_mid"] = a + [(1 - c) / b]
    # explicit point of the slice and its image
    p = [b, None, None]
    p[2] = (c - a[0] * b - a[1] * (1 - b)) / (a[2] - a[1])
    p[1] = 1 - b - p[2]
    out["patched_point"] = p
    out["patched_image"] = matvec(patch_matrix((1, 2, 3, 4), a), p)

    def enc(v):
        if isinstance(v, Fr):
            return str(v)
        if isinstance(v, dict):
            return {k: enc(x) for k, x in v.items()}
        if isinstance(v, (list, tuple)):
            return [enc(x) for x in v]
        return v

    path = Path(__file__).with_name("values.json")
    path.write_text(json.dumps(enc(out), indent=1, sort_keys=True) + "\n")


if __name__ == "__main__":
    main()
