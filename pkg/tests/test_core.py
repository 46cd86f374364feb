"""Bit array, builders, and query behaviour of BloomMap.

The load-bearing invariants here: a stored key is never reported absent,
a wrong answer for a stored key can only name a less probable value, and
the vectorized write path produces bit-for-bit the same array as the
scalar one.
"""

import dataclasses
import math
import random

import numpy as np
import pytest

from bloommap import (
    BloomMap,
    DuplicateKey,
    FrozenError,
    InvalidEpsilon,
    QueryOutcome,
    UnknownValue,
    build_simple,
    build_tree,
    new_distribution,
    plan_tree_map,
    uniform_distribution,
    zero_fraction,
)
from bloommap.core import BitArray, simple_analytic_bounds, simple_hash_counts
from bloommap.harness import PMapSpec, generate_pmap

LOG2E = math.log2(math.e)

SKEW = new_distribution([0.5, 0.25, 0.125, 0.125], ["a", "b", "c", "d"])


# -- bit array --------------------------------------------------------


def test_bit_layout():
    bits = BitArray(16)
    bits.set_bit(0)
    assert bits.to_bytes() == b"\x01\x00"
    bits.set_bit(9)
    assert bits.to_bytes() == b"\x01\x02"
    assert bits.get_bit(0) == 1
    assert bits.get_bit(9) == 1
    assert bits.get_bit(8) == 0
    assert bits.ones() == 2
    assert bits.zero_fraction() == 14 / 16


def test_bit_array_ctor_validation():
    with pytest.raises(ValueError):
        BitArray(0)
    with pytest.raises(ValueError):
        BitArray(9, data=b"\x00")  # needs two bytes
    bits = BitArray(9, data=b"\x01\x01")
    assert bits.get_bit(0) == 1 and bits.get_bit(8) == 1


def test_set_many_matches_scalar_sets():
    rnd = random.Random(3)
    for m in (1, 7, 64, 1000):
        positions = [rnd.randrange(m) for _ in range(min(m, 200))]
        a = BitArray(m)
        for p in positions:
            a.set_bit(p)
        b = BitArray(m)
        b.set_many(np.array(positions, dtype=np.uint64))
        assert a.to_bytes() == b.to_bytes()
    empty = BitArray(10)
    empty.set_many(np.array([], dtype=np.uint64))
    assert empty.ones() == 0


def test_frozen_bit_array_rejects_writes():
    bits = BitArray(8)
    bits.set_bit(3)
    bits.freeze()
    assert bits.frozen
    with pytest.raises(FrozenError):
        bits.set_bit(4)
    with pytest.raises(FrozenError):
        bits.set_many([1])
    assert bits.get_bit(3) == 1  # reads still fine


# -- outcome type -----------------------------------------------------


def test_outcome_is_immutable():
    out = QueryOutcome(value_index=None, value=None, probes=3, hash_evals=3)
    assert out.is_bottom
    with pytest.raises(dataclasses.FrozenInstanceError):
        out.probes = 5
    hit = QueryOutcome(value_index=1, value=b"b", probes=9, hash_evals=7)
    assert not hit.is_bottom


# -- flat hash counts and sizing --------------------------------------


def test_simple_hash_counts():
    assert simple_hash_counts(SKEW, 2 ** -7) == (8, 9, 10, 10)
    half = new_distribution([1, 1], "xy")
    assert simple_hash_counts(half, 2 ** -4) == (5, 5)
    one = new_distribution([3], ["only"])
    assert simple_hash_counts(one, 2 ** -4) == (4,)
    with pytest.raises(InvalidEpsilon):
        simple_hash_counts(SKEW, 0.0)


def test_simple_analytic_bounds():
    fp, mis = simple_analytic_bounds((8, 9, 10, 10))
    assert fp == 2.0 ** -7
    assert mis == (2.0 ** -8, 2.0 ** -9, 2.0 ** -10, 0.0)


def test_simple_sizing():
    pairs = generate_pmap(PMapSpec(SKEW, 40, seed=11))
    bmap = build_simple(pairs, SKEW, 2 ** -7, seed=1)
    assert bmap.m == 505
    assert bmap.n == 40
    assert bmap.simple_ks == (8, 9, 10, 10)
    assert bmap.family.k == 37
    assert bmap.bits_per_key() == 505 / 40
    # same formula at larger n, checked as arithmetic
    assert math.ceil(100_000 * LOG2E * (7 + 1.75)) == 1_262_359


def test_simple_bits_match_direct_hashing():
    # an independent writer: hash every pair by hand and compare arrays
    pairs = generate_pmap(PMapSpec(SKEW, 120, seed=5))
    bmap = build_simple(pairs, SKEW, 2 ** -6, seed=17)
    ref = BitArray(bmap.m)
    starts = [0]
    for k in bmap.simple_ks:
        starts.append(starts[-1] + k)
    for key, label in pairs:
        i = SKEW.index_of(label)
        for j in range(1, bmap.simple_ks[i] + 1):
            ref.set_bit(bmap.family.base_hash(starts[i] + j, key))
    assert ref.to_bytes() == bmap.bits.to_bytes()


def test_zero_fraction_near_half():
    pairs = generate_pmap(PMapSpec(SKEW, 40, seed=11))
    bmap = build_simple(pairs, SKEW, 2 ** -7, seed=1)
    rho = zero_fraction(bmap)
    assert rho == bmap.bits.zero_fraction()
    assert 0.35 < rho < 0.65


# -- lifecycle errors -------------------------------------------------


def test_store_and_freeze_lifecycle():
    d = new_distribution([1, 1], "xy")
    bmap = plan_tree_map(d, 2 ** -4, seed=2, scheme="fast", counts=(3, 3))
    bmap.store(b"k1", 0)
    bmap.store(b"k1", 0)  # idempotent repeat is a no-op
    with pytest.raises(DuplicateKey):
        bmap.store(b"k1", 1)
    with pytest.raises(ValueError):
        bmap.store(b"k2", 2)  # index out of range
    with pytest.raises(ValueError):
        bmap.query(b"k1")  # not frozen yet
    bmap.freeze()
    assert bmap.n == 1
    with pytest.raises(FrozenError):
        bmap.store(b"k3", 0)
    assert not bmap.query(b"k1").is_bottom


def test_plan_requires_exactly_one_size():
    d = uniform_distribution(2)
    with pytest.raises(ValueError):
        plan_tree_map(d, 2 ** -4, seed=0, scheme="fast")
    with pytest.raises(ValueError):
        plan_tree_map(d, 2 ** -4, seed=0, scheme="fast", n=10, counts=(5, 5))


def test_builder_input_validation():
    with pytest.raises(ValueError):
        build_simple([], SKEW, 2 ** -5, seed=0)
    with pytest.raises(ValueError):
        build_tree([], SKEW, 2 ** -5, seed=0, scheme="fast")
    with pytest.raises(UnknownValue):
        build_simple([(b"k", b"nope")], SKEW, 2 ** -5, seed=0)
    with pytest.raises(DuplicateKey):
        build_tree([(b"k", b"a"), (b"k", b"b")], SKEW, 2 ** -5, seed=0)
    d = new_distribution([1, 1], "xy")
    bmap = build_simple([(b"k", b"x")], d, 2 ** -5, seed=0)
    with pytest.raises(ValueError):
        bmap.store(b"z", 0)  # flat maps are built in one shot
    with pytest.raises(TypeError):
        bmap.query(123)


def test_duplicate_pairs_dedupe_cleanly():
    base = [(f"k{i}".encode(), b"a" if i % 2 else b"b") for i in range(20)]
    doubled = base + base[:7]
    for build in (build_simple, build_tree):
        one = build(base, new_distribution([1, 1], "ab"), 2 ** -5, seed=3)
        two = build(doubled, new_distribution([1, 1], "ab"), 2 ** -5, seed=3)
        assert one.n == two.n == 20
        assert one.bits.to_bytes() == two.bits.to_bytes()


def test_str_keys_are_utf8():
    d = new_distribution([1, 1], "xy")
    bmap = plan_tree_map(d, 2 ** -4, seed=7, scheme="standard", counts=(1, 1))
    bmap.store("alpha", 1)
    bmap.freeze()
    assert bmap.query("alpha") == bmap.query(b"alpha")
    assert bmap.query("alpha").value == b"y"


def test_value_with_no_keys_is_allowed():
    pairs = [(f"k{i}".encode(), b"a" if i % 3 else b"b") for i in range(30)]
    bmap = build_tree(pairs, SKEW, 2 ** -5, seed=4, scheme="standard")
    bmap2 = build_simple(pairs, SKEW, 2 ** -5, seed=4)
    for key, label in pairs:
        for m in (bmap, bmap2):
            out = m.query(key)
            assert out.value_index is not None
            assert out.value_index >= SKEW.index_of(label)


# -- determinism ------------------------------------------------------


def test_builds_are_deterministic_and_seed_sensitive():
    pairs = generate_pmap(PMapSpec(SKEW, 200, seed=9))
    a = build_tree(pairs, SKEW, 2 ** -6, seed=42, scheme="fast")
    b = build_tree(pairs, SKEW, 2 ** -6, seed=42, scheme="fast")
    c = build_tree(pairs, SKEW, 2 ** -6, seed=43, scheme="fast")
    assert a.bits.to_bytes() == b.bits.to_bytes()
    assert a.m == c.m
    assert a.bits.to_bytes() != c.bits.to_bytes()


def test_batch_store_matches_scalar_store():
    pairs = generate_pmap(PMapSpec(SKEW, 300, seed=8))
    counts = tuple(sum(1 for _, lab in pairs if lab == l) for l in SKEW.labels)
    for scheme in ("standard", "fast"):
        fast_path = build_tree(pairs, SKEW, 2 ** -6, seed=5, scheme=scheme)
        slow = plan_tree_map(SKEW, 2 ** -6, seed=5, scheme=scheme, counts=counts)
        for key, label in pairs:
            slow.store(key, SKEW.index_of(label))
        slow.freeze()
        assert slow.m == fast_path.m
        assert slow.bits.to_bytes() == fast_path.bits.to_bytes()


# -- query semantics --------------------------------------------------


class RecordingBits:
    """Wraps a BitArray and logs every probed position in order."""

    def __init__(self, inner):
        self._inner = inner
        self.log = []

    def get_bit(self, i):
        self.log.append(i)
        return self._inner.get_bit(i)

    def __getattr__(self, name):
        return getattr(self._inner, name)


def _node_positions(bmap, node, key):
    fam = bmap.family
    return [
        (fam.base_hash(node.base_start + j, key) + node.offset) % bmap.m
        for j in range(1, node.k + 1)
    ]


def test_saturated_tree_probes_deeper_values_first():
    # with every bit set, the walk must go root, then the deeper-value
    # side, straight down to the last value, and stop there
    d = new_distribution([2, 1, 1], "abc")
    bmap = plan_tree_map(d, 2 ** -4, seed=3, scheme="fast", counts=(4, 2, 2))
    bmap.bits.set_many(np.arange(bmap.m, dtype=np.uint64))
    bmap.freeze()
    rec = RecordingBits(bmap.bits)
    bmap.bits = rec

    tree = bmap.tree
    root = tree.nodes[tree.root]
    inner = tree.nodes[root.right]
    leaf2 = tree.nodes[inner.right]
    key = b"whatever"
    out = bmap.query(key)
    assert out.value_index == 2
    expected = (
        _node_positions(bmap, root, key)
        + _node_positions(bmap, inner, key)
        + _node_positions(bmap, leaf2, key)
    )
    assert rec.log == expected
    assert out.probes == root.k + inner.k + leaf2.k
    assert out.hash_evals == out.probes  # no shared base indices on this walk


def test_saturated_flat_map_scans_every_value():
    pairs = generate_pmap(PMapSpec(SKEW, 50, seed=2))
    bmap = build_simple(pairs, SKEW, 2 ** -5, seed=6)
    full = BitArray(bmap.m, data=b"\xff" * len(bmap.bits.to_bytes()))
    full.freeze()
    bmap.bits = full
    out = bmap.query(b"anything")
    assert out.value_index == SKEW.b - 1  # every block passes; keep the last
    assert out.probes == sum(bmap.simple_ks)


def test_empty_map_rejects_on_first_probe():
    d = new_distribution([1, 1], "xy")
    bmap = plan_tree_map(d, 2 ** -4, seed=1, scheme="standard", counts=(5, 5))
    bmap.freeze()
    out = bmap.query(b"ghost")
    assert out.is_bottom
    assert out.value is None
    assert out.probes == 1
    assert out.hash_evals == 1


def test_hash_reuse_between_sibling_leaves():
    # craft bits so the deeper sibling fails on its third probe and the
    # query falls back to the other leaf, whose base hashes are already
    # cached; probe and evaluation counts are then forced exactly
    d = new_distribution([2, 1, 1], "abc")
    bmap = plan_tree_map(d, 2 ** -3, seed=9, scheme="fast", counts=(2, 1, 1))
    tree = bmap.tree
    root = tree.nodes[tree.root]
    inner = tree.nodes[root.right]
    leaf1 = tree.nodes[inner.left]
    leaf2 = tree.nodes[inner.right]
    assert (root.k, inner.k, leaf1.k, leaf2.k) == (2, 2, 5, 5)
    assert leaf1.base_start == leaf2.base_start

    chosen = None
    for t in range(500):
        key = f"probe-order-{t}".encode()
        to_set = (
            _node_positions(bmap, root, key)
            + _node_positions(bmap, inner, key)
            + _node_positions(bmap, leaf1, key)
            + _node_positions(bmap, leaf2, key)[:2]
        )
        blocker = _node_positions(bmap, leaf2, key)[2]
        if blocker not in to_set and len(set(to_set)) == len(to_set):
            chosen = (key, to_set)
            break
    assert chosen is not None
    key, to_set = chosen
    for p in to_set:
        bmap.bits.set_bit(p)
    bmap.freeze()

    out = bmap.query(key)
    assert out.value_index == 1
    assert out.probes == 2 + 2 + 3 + 5
    # leaf 2 consumed base hashes 1..3 of the shared slice, leaf 1 reuses
    # them and evaluates only its last two
    assert out.hash_evals == 2 + 2 + 3 + 2


def _simple_reference(bmap, key):
    """Bit-level reimplementation of the flat scan for cross-checking."""
    best = None
    probes = 0
    start = 0
    for i, k in enumerate(bmap.simple_ks):
        ok = True
        for j in range(1, k + 1):
            probes += 1
            if not bmap.bits.get_bit(bmap.family.base_hash(start + j, key)):
                ok = False
                break
        if ok:
            best = i
        start += k
    return best, probes


def test_flat_query_matches_reference_scan():
    rnd = random.Random(14)
    pairs = generate_pmap(PMapSpec(SKEW, 500, seed=14))
    bmap = build_simple(pairs, SKEW, 2 ** -4, seed=21)
    probes_for = [key for key, _ in pairs[:100]]
    probes_for += [f"missing-{rnd.random()}".encode() for _ in range(200)]
    for key in probes_for:
        out = bmap.query(key)
        want_index, want_probes = _simple_reference(bmap, key)
        assert out.value_index == want_index
        assert out.probes == want_probes
        assert out.hash_evals == want_probes


# -- answer invariants across many random maps ------------------------


@pytest.mark.parametrize("variant", ["simple", "standard", "fast"])
def test_no_false_negatives_and_monotone_errors(variant):
    rnd = random.Random(hash(variant) & 0xFFFF)
    for trial in range(12):
        b = rnd.randint(1, 6)
        d = new_distribution(
            [rnd.randint(1, 9) for _ in range(b)], [f"v{i}" for i in range(b)]
        )
        n = rnd.randint(30, 200)
        eps = 2.0 ** -rnd.randint(3, 7)
        pairs = generate_pmap(PMapSpec(d, n, seed=1000 + trial))
        if variant == "simple":
            bmap = build_simple(pairs, d, eps, seed=trial)
        else:
            bmap = build_tree(pairs, d, eps, seed=trial, scheme=variant)
        assert bmap.n == n
        for key, label in pairs:
            out = bmap.query(key)
            assert not out.is_bottom, "stored key reported absent"
            assert out.value_index >= d.index_of(label), "error understated the value"
        for t in range(50):
            out = bmap.query(f"fresh-{trial}-{t}".encode())
            if not out.is_bottom:
                assert 0 <= out.value_index < b
