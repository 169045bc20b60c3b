"""Evaluate (φ ⊗ φ') on products of arbitrary zero-divisors by point evaluation.

Since V_i^2 = V_i R, writing V_i = R·e_i turns the e_i into commuting
idempotents, and T_{S,d} = R^d e_S.  Polynomials in idempotent e_1..e_{n-1}
are functions on {0,1}^{n-1} with e_S(x) = [S ⊆ x], so products become
pointwise products.  A degree-one class y = rR + Σ v_i V_i becomes the
affine function ŷ(x) = r + Σ v_i x_i.

For a product of N zero-divisors, the bidegree (a, N-a) part at a point
(x, x') is the z^a coefficient of ∏ (z ŷ_i(x) + ŷ_i(x')), which is a single
binomial coefficient.  Truncating supports at size k and applying a
functional that depends on |S| is a Möbius sum, which folds into a weight
on |x|.  Cost is O(4^(n-1)) per product, independent of N.
"""

from __future__ import annotations

from typing import List, Sequence

import numpy as np

from .parity import binom_mod2
from .ring import FunctionalKind, functional_coeff
from .tensor import Factor, H1Vector, check_pair_kinds

MAX_N = 13


def subset_weights(kind: FunctionalKind, n: int, k: int) -> np.ndarray:
    """w(t) = Σ_{s=t}^{k-1} C(n-1-t, s-t) φ(s) mod 2."""
    w = np.zeros(n, dtype=np.int64)
    for t in range(n):
        acc = 0
        for s in range(t, k):
            acc ^= binom_mod2(n - 1 - t, s - t) & functional_coeff(kind, n, k, s)
        w[t] = acc
    return w


def _flatten(factors: Sequence[Factor]) -> List[H1Vector]:
    out = []
    for y, e in factors:
        out.extend([y] * e)
    return out


def pointwise_evaluate(
    kind_left: FunctionalKind,
    kind_right: FunctionalKind,
    factors: Sequence[Factor],
    n: int,
    k: int,
) -> int:
    check_pair_kinds(n, k, kind_left, kind_right)
    if n > MAX_N:
        raise ValueError(f"pointwise evaluation is limited to n <= {MAX_N}")
    ys = _flatten(factors)
    a, b = kind_left.degree(n), kind_right.degree(n)
    N = len(ys)
    if N != a + b:
        return 0
    points = np.arange(1 << (n - 1), dtype=np.int64)
    pop = np.zeros_like(points)
    for j in range(n - 1):
        pop += (points >> j) & 1
    Y = np.empty((points.size, N), dtype=np.float64)
    for i, y in enumerate(ys):
        masked = points & y.vmask
        par = np.zeros_like(points)
        for j in range(n - 1):
            par ^= (masked >> j) & 1
        Y[:, i] = par ^ y.r
    rows = subset_weights(kind_left, n, k)[pop] == 1
    cols = subset_weights(kind_right, n, k)[pop] == 1
    Yl, Yr = Y[rows], Y[cols]
    # a point pair contributes only if no factor vanishes on both sides;
    # then with u, v ones on each side the coefficient is C(u+v-N, v-b)
    both_zero = (1.0 - Yl) @ (1.0 - Yr).T
    alive = (both_zero == 0).astype(np.float64)
    u = Yl.sum(axis=1).astype(np.int64)
    v = Yr.sum(axis=1).astype(np.int64)
    Ul = np.zeros((Yl.shape[0], N + 1))
    Ul[np.arange(u.size), u] = 1.0
    Vr = np.zeros((Yr.shape[0], N + 1))
    Vr[np.arange(v.size), v] = 1.0
    counts = np.rint(Ul.T @ alive @ Vr).astype(np.int64)
    total = 0
    for uu, vv in zip(*np.nonzero(counts & 1)):
        total ^= binom_mod2(int(uu + vv) - N, int(vv) - b)
    return total
