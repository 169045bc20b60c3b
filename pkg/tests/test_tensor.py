import json
import random
from collections import Counter

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from polytc.errors import DomainError
from polytc.oracle import Oracle, t_monomial
from polytc.parity import Case, decompose
from polytc.pointwise import pointwise_evaluate
from polytc.ring import CohomologyRing, FunctionalKind, mask_support
from polytc.tensor import (
    H1Vector,
    TensorElement,
    expand,
    expand_profile,
    factors_from_spec,
    identity,
    pair_evaluate,
    power,
    profile_evaluate,
    reduce_tensor,
    tensor_multiply,
    zero_divisor,
)

PHI1, PHI2, PHI3 = FunctionalKind.PHI1, FunctionalKind.PHI2, FunctionalKind.PHI3
R, V = H1Vector.R, H1Vector.V


def comp(x, a, b):
    return {(c.left.support, c.right.support) for c in x.component(a, b)}


def test_h1_parse_and_str():
    y = H1Vector.parse("R + V2 + V5")
    assert y == R() + V(2) + V(5)
    assert str(y) == "R + V2 + V5"
    assert H1Vector.parse("V3 + V3").is_zero()
    with pytest.raises(ValueError):
        H1Vector.parse("W1")


def test_zero_divisor_examples():
    x = zero_divisor(V(1), 6, 2)
    assert set(x.components) == {(1, 0), (0, 1)}
    assert comp(x, 1, 0) == {((1,), ())}
    assert comp(x, 0, 1) == {((), (1,))}
    r = zero_divisor(R(), 6, 2)
    assert comp(r, 1, 0) == {((), ())} and comp(r, 0, 1) == {((), ())}
    s = zero_divisor(R() + V(2), 6, 2)
    assert len(s.component(1, 0)) == 2 and len(s.component(0, 1)) == 2


def test_zero_divisor_rejects_zero_and_overflow():
    with pytest.raises(ValueError):
        zero_divisor(H1Vector(), 6, 2)
    with pytest.raises(DomainError):
        zero_divisor(V(6), 6, 2)


def test_square_of_zero_divisor_has_no_cross_terms():
    z = zero_divisor(V(1), 8, 3)
    sq = tensor_multiply(z, z)
    assert set(sq.components) == {(2, 0), (0, 2)}
    assert comp(sq, 2, 0) == {((1,), ())}


def test_multiply_by_empty_is_empty():
    z = zero_divisor(V(1), 6, 2)
    empty = TensorElement(6, 2, {})
    assert tensor_multiply(z, empty).is_zero()
    assert tensor_multiply(empty, z).is_zero()


def test_v1_times_v2_at_6_2():
    # V1 V2 = 0 when k = 2, so only the mixed bidegree survives
    x = tensor_multiply(zero_divisor(V(1), 6, 2), zero_divisor(V(2), 6, 2))
    assert set(x.components) == {(1, 1)}
    assert comp(x, 1, 1) == {((1,), (2,)), ((2,), (1,))}
    assert len(x) == 2


def test_power_examples():
    z = zero_divisor(V(1), 6, 2)
    assert power(z, 0) == identity(6, 2)
    assert power(z, 2) == TensorElement(6, 2, {(2, 0): frozenset({(1, 0)}), (0, 2): frozenset({(0, 1)})})
    cube = power(z, 3)
    assert set(cube.components) == {(3, 0), (2, 1), (1, 2), (0, 3)}
    assert all(len(v) == 1 for v in cube.components.values())


def test_power_matches_repeated_multiplication():
    n, k = 36, 4
    for y in [V(1), R(), R() + V(1) + V(2), V(1) + V(3)]:
        z = zero_divisor(y, n, k)
        acc = identity(n, k)
        for e in range(65):
            assert power(z, e) == acc, (str(y), e)
            acc = tensor_multiply(acc, z)


def ring_power(ring, y, e):
    x = ring.element(0, [0])
    base = ring.element(1, y.term_masks())
    for _ in range(e):
        x = ring.multiply(x, base, reduced=False)
    return x


@pytest.mark.parametrize("y", ["V1", "R", "R + V2", "V1 + V2 + V3"])
def test_frobenius(y):
    n, k = 40, 4
    ring = CohomologyRing(n, k)
    y = H1Vector.parse(y)
    for j in range(6):
        e = 2**j
        p = power(zero_divisor(y, n, k), e)
        ye = ring_power(ring, y, e)
        if ye.is_zero():
            assert p.is_zero()
            continue
        assert set(p.components) == {(e, 0), (0, e)}
        assert p.components[(e, 0)] == frozenset((m, 0) for m in ye.masks)
        assert p.components[(0, e)] == frozenset((0, m) for m in ye.masks)


@pytest.mark.parametrize(
    "n,k,spec,a,b,want",
    [
        (6, 2, "V1^3 * R^2", 3, 2, {((1,), (1,)), ((1,), ())}),
        (7, 2, "V1^4 * R^3", 4, 3, {((1,), ())}),
    ],
)
def test_expand_examples(n, k, spec, a, b, want):
    assert comp(expand(factors_from_spec(spec), n, k), a, b) == want


def test_expand_empty_is_identity():
    assert expand([], 6, 2) == identity(6, 2)


def test_expand_beyond_2n_minus_6_vanishes():
    assert expand([(V(1), 3), (V(2), 3), (R(), 1)], 6, 2).is_zero()


def test_pair_evaluate_examples():
    x = expand(factors_from_spec("V1^3 * R^2"), 6, 2)
    assert pair_evaluate(PHI1, PHI2, x) == 1
    y = expand(factors_from_spec("V1^4 * R^3"), 7, 2)
    assert pair_evaluate(PHI1, PHI3, y) == 1
    assert pair_evaluate(PHI1, PHI2, identity(6, 2)) == 0
    with pytest.raises(DomainError):
        pair_evaluate(PHI1, PHI3, x)


def random_factors(rng, n, total, monomial=False):
    out = []
    left = total
    while left:
        e = rng.randint(1, left)
        if monomial:
            g = rng.randrange(n)
            y = R() if g == 0 else V(g)
        else:
            bits = 0
            while not bits:
                bits = rng.getrandbits(n)
            y = H1Vector(bits & 1, bits >> 1)
        out.append((y, e))
        left -= e
    return out


def test_expand_permutation_invariant_and_swap_symmetric():
    rng = random.Random(4)
    for n, k in [(7, 2), (8, 3), (9, 4)]:
        for _ in range(8):
            factors = random_factors(rng, n, rng.randint(1, 2 * n - 7))
            x = expand(factors, n, k)
            shuffled = factors[:]
            rng.shuffle(shuffled)
            assert expand(shuffled, n, k) == x
            assert x.swap() == x


def test_swap_exchanges_pairings():
    for n, k in [(8, 3), (10, 3), (11, 4)]:
        rng = random.Random(n)
        x = expand(random_factors(rng, n, 2 * n - 7), n, k)
        assert pair_evaluate(PHI1, PHI2, x) == pair_evaluate(PHI2, PHI1, x.swap())


def _oracle_canonical(oracle, pairs_by_bidegree):
    """XOR of residue(l) ⊗ residue(r) per bidegree, as a set of index pairs."""
    out = {}
    for (a, b), pairs in pairs_by_bidegree.items():
        sl, sr = oracle.slice(a), oracle.slice(b)
        acc = set()
        for ml, mr in pairs:
            rl = sl.residue({ml})
            rr = sr.residue({mr})
            for i in range(rl.bit_length()):
                if rl >> i & 1:
                    for j in range(rr.bit_length()):
                        if rr >> j & 1:
                            acc ^= {(i, j)}
        if acc:
            out[(a, b)] = frozenset(acc)
    return out


def _untruncated_expansion(factors, n):
    """Every choice of side and term for every factor, no truncation at all."""
    flat = []
    for y, e in factors:
        flat.extend([y] * e)
    gens_of = [([0] if y.r else []) + list(y.v_indices) for y in flat]
    found = Counter()

    def walk(j, left, right):
        if j == len(flat):
            found[(tuple(left), tuple(right))] += 1
            return
        for g in gens_of[j]:
            for side in (left, right):
                side[g] += 1
                walk(j + 1, left, right)
                side[g] -= 1

    walk(0, [0] * n, [0] * n)
    by_bd = {}
    for (l, r), c in found.items():
        if c % 2 == 0:
            continue
        a, b = sum(l), sum(r)
        if a > n - 3 or b > n - 3:
            continue
        by_bd.setdefault((a, b), set()).symmetric_difference_update({(l, r)})
    return by_bd


def test_truncation_soundness_against_oracle():
    rng = random.Random(9)
    for n, k in [(6, 2), (7, 2), (7, 3)]:
        oracle = Oracle(n, k)
        for _ in range(12):
            factors = random_factors(rng, n, rng.randint(1, 2 * n - 6))
            if sum(len(y.term_masks()) * e for y, e in factors) > 14:
                continue
            fast = expand(factors, n, k)
            fast_pairs = {
                bd: {(t_monomial(n, mask_support(l), bd[0]), t_monomial(n, mask_support(r), bd[1])) for l, r in v}
                for bd, v in fast.components.items()
            }
            slow = _untruncated_expansion(factors, n)
            assert _oracle_canonical(oracle, fast_pairs) == _oracle_canonical(oracle, slow)


def _profile_from_generic(x):
    n, k = x.n, x.k
    table = np.zeros((n - 2, k, n - 2, k), dtype=np.uint8)
    for (a, b), pairs in x.components.items():
        for l, r in pairs:
            table[a, l.bit_count(), b, r.bit_count()] ^= 1
    return table


def disjoint_factors(rng, n, total):
    idx = list(range(1, n))
    rng.shuffle(idx)
    out = []
    left = total
    while left and idx:
        e = rng.randint(1, left)
        out.append((V(idx.pop()), e))
        left -= e
    if left:
        out.append((R(), left))
    return out


def test_profile_matches_generic_table():
    rng = random.Random(12)
    for n, k in [(6, 2), (8, 3), (9, 4), (11, 5), (12, 3)]:
        for _ in range(10):
            factors = disjoint_factors(rng, n, rng.randint(1, 2 * n - 6))
            prof = expand_profile(factors, n, k)
            gen = expand(factors, n, k)
            assert np.array_equal(prof.table, _profile_from_generic(gen))


def test_three_engines_agree_on_pairings():
    rng = random.Random(13)
    for n, k in [(7, 2), (8, 3), (9, 3), (10, 4), (11, 5)]:
        case = decompose(n, k).case
        kinds = [(PHI1, PHI2), (PHI2, PHI1), (PHI1, PHI1), (PHI2, PHI2)]
        if case is Case.B_EVEN_D_ZERO:
            kinds.append((PHI1, PHI3))
        for _ in range(6):
            for kl, kr in kinds:
                total = kl.degree(n) + kr.degree(n)
                factors = disjoint_factors(rng, n, total)
                gen = pair_evaluate(kl, kr, expand(factors, n, k))
                assert profile_evaluate(kl, kr, expand_profile(factors, n, k)) == gen
                assert pointwise_evaluate(kl, kr, factors, n, k) == gen
                mixed = random_factors(rng, n, total)
                assert pointwise_evaluate(kl, kr, mixed, n, k) == pair_evaluate(kl, kr, expand(mixed, n, k))


def test_profile_rejects_repeated_generators():
    with pytest.raises(ValueError):
        expand_profile([(V(1), 2), (V(1), 1)], 8, 3)
    with pytest.raises(ValueError):
        expand_profile([(R() + V(1), 2)], 8, 3)


def test_reduce_tensor_is_canonical():
    n, k = 8, 3
    ring = CohomologyRing(n, k)
    x = expand(factors_from_spec("V1^5 * V2 * R^3"), n, k)
    y = reduce_tensor(ring, x)
    assert reduce_tensor(ring, y) == y
    assert pair_evaluate(PHI1, PHI3, x) == pair_evaluate(PHI1, PHI3, y) == 1


def test_json_shape():
    x = tensor_multiply(zero_divisor(V(1), 6, 2), zero_divisor(V(2), 6, 2))
    obj = x.to_json()
    assert obj == {"components": {"1,1": [[[1], [2]], [[2], [1]]]}}
    assert json.loads(json.dumps(obj)) == obj


def test_factors_from_spec_forms_agree():
    assert factors_from_spec("V1^3 * R^2") == factors_from_spec([["V", 1, 3], ["R", 0, 2]])
    assert factors_from_spec("(R + V2)^2 * V3") == [(R() + V(2), 2), (V(3), 1)]


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 2**7 - 1).filter(bool), st.integers(0, 2**7 - 1).filter(bool))
def test_tensor_multiply_commutes(a, b):
    n, k = 8, 3
    ya, yb = H1Vector(a & 1, a >> 1), H1Vector(b & 1, b >> 1)
    za, zb = power(zero_divisor(ya, n, k), 2), zero_divisor(yb, n, k)
    assert tensor_multiply(za, zb) == tensor_multiply(zb, za)
