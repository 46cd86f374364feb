"""Bit array and the two map variants.

A map is a single bit array shared by all values.  The flat variant gives
value i its own block of k_i = ceil(log2(1/eps) + log2(1/p_i)) hash
functions; a query tests every block and returns the largest value index
whose block is fully set.  The tree variant hashes each key along its
value's root-to-leaf path in the code tree, so likely values touch few
bits, and the query walks the tree right subtree first, abandoning any
subtree whose node shows a zero bit.  Neither variant can return "not
present" for a stored key.
"""

from __future__ import annotations

import math
from collections import defaultdict
from dataclasses import dataclass

import numpy as np

from . import codetree
from .distribution import ValueDistribution, entropy
from .errors import DuplicateKey, FrozenError, InvalidEpsilon
from .hashing import HashFamily, pack_keys

__all__ = [
    "BitArray",
    "BloomMap",
    "QueryOutcome",
    "build_simple",
    "build_tree",
    "plan_tree_map",
    "simple_hash_counts",
    "simple_analytic_bounds",
    "zero_fraction",
    "TREE_VARIANTS",
]

LOG2E = math.log2(math.e)
TREE_VARIANTS = ("standard", "fast", "custom")


class BitArray:
    """m bits packed 8 per byte, bit j at byte j >> 3, weight 1 << (j & 7).

    Bits only ever flip 0 to 1, and only before freeze().  After freeze
    the array is read-only and safe to share between query threads.
    """

    __slots__ = ("m", "_buf", "_frozen")

    def __init__(self, m: int, data: bytes | None = None):
        if m < 1:
            raise ValueError(f"bit array needs at least one bit, got m={m}")
        nbytes = (m + 7) // 8
        if data is None:
            self._buf = bytearray(nbytes)
        else:
            if len(data) != nbytes:
                raise ValueError(f"expected {nbytes} bytes for m={m}, got {len(data)}")
            self._buf = bytearray(data)
        self.m = m
        self._frozen = False

    def get_bit(self, i: int) -> int:
        return (self._buf[i >> 3] >> (i & 7)) & 1

    def set_bit(self, i: int) -> None:
        if self._frozen:
            raise FrozenError("bit array is frozen")
        self._buf[i >> 3] |= 1 << (i & 7)

    def set_many(self, positions) -> None:
        """Set a batch of positions (any iterable or uint64 array)."""
        if self._frozen:
            raise FrozenError("bit array is frozen")
        pos = np.asarray(positions, dtype=np.uint64)
        if pos.size == 0:
            return
        scratch = np.zeros(self.m, dtype=bool)
        scratch[pos] = True
        packed = np.packbits(scratch, bitorder="little")
        view = np.frombuffer(self._buf, dtype=np.uint8)
        view |= packed

    def freeze(self) -> None:
        self._frozen = True

    @property
    def frozen(self) -> bool:
        return self._frozen

    def ones(self) -> int:
        return int.from_bytes(bytes(self._buf), "little").bit_count()

    def zero_fraction(self) -> float:
        """Fraction of the m bits still zero."""
        return (self.m - self.ones()) / self.m

    def to_bytes(self) -> bytes:
        return bytes(self._buf)


@dataclass(frozen=True)
class QueryOutcome:
    """Result of one lookup.

    value / value_index are None when the key is reported absent.  probes
    counts individual bit reads; hash_evals counts base hash evaluations,
    which can be lower because a query reuses base hashes across subtrees
    that share base indices.
    """

    value_index: int | None
    value: bytes | None
    probes: int
    hash_evals: int

    @property
    def is_bottom(self) -> bool:
        return self.value_index is None


def simple_hash_counts(dist: ValueDistribution, epsilon: float) -> tuple[int, ...]:
    """Per-value hash counts for the flat variant:
    k_i = ceil(log2(1/eps) + log2(1/p_i))."""
    _check_epsilon(epsilon)
    base = math.log2(1.0 / epsilon)
    return tuple(math.ceil(base + math.log2(1.0 / p)) for p in dist.probs)


def simple_analytic_bounds(ks) -> tuple[float, tuple[float, ...]]:
    """(false positive bound, per-value misassignment bounds) for flat
    hash counts, assuming at least half the array stays zero."""
    fp = math.fsum(2.0 ** -k for k in ks)
    mis = tuple(
        math.fsum(2.0 ** -kj for kj in ks[i + 1 :]) for i in range(len(ks))
    )
    return fp, mis


def _check_epsilon(epsilon: float) -> None:
    if not (0.0 < epsilon < 1.0):
        raise InvalidEpsilon(f"error budget must lie in (0, 1), got {epsilon!r}")


def _as_key(key) -> bytes:
    if isinstance(key, bytes):
        return key
    if isinstance(key, str):
        return key.encode("utf-8")
    raise TypeError(f"key must be bytes or str, got {type(key).__name__}")


class BloomMap:
    """One bit array plus the recipe for reading and writing it.

    variant is "simple" for the flat layout or the tree scheme name
    ("standard", "fast", "custom").  Tree maps are created empty, filled
    with store(), and frozen; the flat variant is built in one shot by
    build_simple.  Frozen maps never mutate and may be queried from any
    number of threads.
    """

    def __init__(self, *, variant: str, dist: ValueDistribution, epsilon: float,
                 family: HashFamily, bits: BitArray, tree=None,
                 simple_ks: tuple[int, ...] | None = None, n: int = 0):
        self.variant = variant
        self.dist = dist
        self.epsilon = epsilon
        self.family = family
        self.bits = bits
        self.tree = tree
        self.simple_ks = simple_ks
        self.n = n
        if simple_ks is not None:
            starts = [0]
            for k in simple_ks:
                starts.append(starts[-1] + k)
            self._simple_starts = tuple(starts)
        else:
            self._simple_starts = None
        self._pending: dict[bytes, int] | None = None if bits.frozen else {}

    # -- shared geometry ----------------------------------------------

    @property
    def m(self) -> int:
        return self.bits.m

    @property
    def b(self) -> int:
        return self.dist.b

    @property
    def frozen(self) -> bool:
        return self.bits.frozen

    def bits_per_key(self) -> float:
        if self.n == 0:
            raise ValueError("no keys stored")
        return self.m / self.n

    # -- writing ------------------------------------------------------

    def _note_pair(self, key: bytes, value_index: int) -> bool:
        """Record the pair, returning False for an idempotent repeat."""
        if self._pending is None:
            raise FrozenError("map is frozen")
        if not 0 <= value_index < self.b:
            raise ValueError(f"value index {value_index} outside 0..{self.b - 1}")
        prior = self._pending.get(key)
        if prior is None:
            self._pending[key] = value_index
            return True
        if prior != value_index:
            raise DuplicateKey(
                f"key {key!r} already stored with value index {prior}, not {value_index}"
            )
        return False

    def store(self, key, value_index: int) -> None:
        """Set the bits for one (key, value) pair along the value's path."""
        if self.tree is None:
            raise ValueError("store() applies to tree maps; use build_simple for the flat variant")
        key = _as_key(key)
        if not self._note_pair(key, value_index):
            return
        m = self.family.m
        for w in self.tree.path_ids(value_index):
            node = self.tree.nodes[w]
            for j in range(1, node.k + 1):
                pos = (self.family.base_hash(node.base_start + j, key) + node.offset) % m
                self.bits.set_bit(pos)

    def _store_batch(self, pairs_by_value: dict[int, list[bytes]]) -> None:
        """Vectorized bulk store; bit-identical to repeated store() calls."""
        chunks: list[np.ndarray] = []
        m = self.family.m
        use_batch = m < (1 << 32)
        for value_index, keys in pairs_by_value.items():
            fresh = [k for k in keys if self._note_pair(k, value_index)]
            if not fresh:
                continue
            by_len: dict[int, list[bytes]] = defaultdict(list)
            for k in fresh:
                by_len[len(k)].append(k)
            if self.tree is not None:
                plan = [
                    (self.tree.nodes[w].base_start, self.tree.nodes[w].k,
                     self.tree.nodes[w].offset)
                    for w in self.tree.path_ids(value_index)
                ]
            else:
                start = self._simple_starts[value_index]
                plan = [(start, self.simple_ks[value_index], 0)]
            for bucket in by_len.values():
                if use_batch:
                    words, length = pack_keys(bucket)
                    for base_start, k, offset in plan:
                        off = np.uint64(offset)
                        m64 = np.uint64(m)
                        for j in range(1, k + 1):
                            pos = self.family.base_hash_batch(base_start + j, words, length)
                            if offset:
                                pos = (pos + off) % m64
                            chunks.append(pos)
                else:
                    for key in bucket:
                        for base_start, k, offset in plan:
                            for j in range(1, k + 1):
                                pos = (self.family.base_hash(base_start + j, key) + offset) % m
                                self.bits.set_bit(pos)
        if chunks:
            self.bits.set_many(np.concatenate(chunks))

    def freeze(self) -> None:
        """Stop accepting writes; records the stored key count."""
        if self._pending is not None:
            self.n = len(self._pending)
            self._pending = None
        self.bits.freeze()

    # -- reading ------------------------------------------------------

    def query(self, key) -> QueryOutcome:
        """Look up a key.  Never reports absence for a stored key."""
        if not self.bits.frozen:
            raise ValueError("freeze the map before querying")
        key = _as_key(key)
        if self.tree is not None:
            return self._query_tree(key)
        return self._query_simple(key)

    def _query_simple(self, key: bytes) -> QueryOutcome:
        bits = self.bits
        family = self.family
        probes = 0
        evals = 0
        best = None
        for i in range(self.b):
            start = self._simple_starts[i]
            hit = True
            for j in range(1, self.simple_ks[i] + 1):
                pos = family.base_hash(start + j, key)
                evals += 1
                probes += 1
                if not bits.get_bit(pos):
                    hit = False
                    break
            if hit:
                best = i
        return self._outcome(best, probes, evals)

    def _query_tree(self, key: bytes) -> QueryOutcome:
        bits = self.bits
        family = self.family
        nodes = self.tree.nodes
        m = family.m
        cache: dict[int, int] = {}
        state = [0, 0]  # probes, hash evals

        def base(idx: int) -> int:
            h = cache.get(idx)
            if h is None:
                h = family.base_hash(idx, key)
                state[1] += 1
                cache[idx] = h
            return h

        def visit(idx: int) -> int | None:
            node = nodes[idx]
            for j in range(1, node.k + 1):
                state[0] += 1
                if not bits.get_bit((base(node.base_start + j) + node.offset) % m):
                    return None
            if node.left is None:
                return node.value_index
            found = visit(node.right)
            if found is not None:
                return found
            return visit(node.left)

        found = visit(self.tree.root)
        return self._outcome(found, state[0], state[1])

    def _outcome(self, value_index, probes, evals) -> QueryOutcome:
        label = None if value_index is None else self.dist.labels[value_index]
        return QueryOutcome(
            value_index=value_index, value=label, probes=probes, hash_evals=evals
        )


# -- builders ---------------------------------------------------------


def _index_pairs(pairs, dist: ValueDistribution) -> dict[int, list[bytes]]:
    if not pairs:
        raise ValueError("no pairs to store")
    grouped: dict[int, list[bytes]] = defaultdict(list)
    for key, label in pairs:
        grouped[dist.index_of(label)].append(_as_key(key))
    return grouped


def build_simple(pairs, dist: ValueDistribution, epsilon: float, seed: int) -> BloomMap:
    """Build a flat-variant map in one shot from (key, value label) pairs.

    Sizing follows m = ceil(n * log2(e) * (log2(1/eps) + H)) with H the
    distribution entropy, which keeps roughly half the array zero.
    """
    _check_epsilon(epsilon)
    grouped = _index_pairs(pairs, dist)
    n = len({k for keys in grouped.values() for k in keys})
    ks = simple_hash_counts(dist, epsilon)
    m = math.ceil(n * LOG2E * (math.log2(1.0 / epsilon) + entropy(dist)))
    family = HashFamily(seed, m, sum(ks))
    bmap = BloomMap(
        variant="simple", dist=dist, epsilon=epsilon, family=family,
        bits=BitArray(m), simple_ks=ks,
    )
    bmap._store_batch(grouped)
    bmap.freeze()
    return bmap


def plan_tree_map(dist: ValueDistribution, epsilon: float, seed: int,
                  scheme: str = "standard", *, n: int | None = None,
                  counts=None, custom=None) -> BloomMap:
    """Create an empty, unfrozen tree map sized for the given key counts.

    Pass either n (apportioned across values by the distribution) or an
    explicit per-value counts tuple.  The code tree is built, offset,
    hash-counted, and certified here; the caller then store()s pairs and
    freeze()s the map.
    """
    from .distribution import integer_counts

    _check_epsilon(epsilon)
    if (n is None) == (counts is None):
        raise ValueError("pass exactly one of n or counts")
    if counts is None:
        counts = integer_counts(dist, n)
    tree = codetree.build_alphabetic_tree(dist)
    codetree.assign_offsets(tree)
    codetree.assign_hash_counts(tree, epsilon, scheme, custom=custom)
    geom = codetree.compute_geometry(tree, counts, epsilon)
    family = HashFamily(seed, geom.m, geom.k)
    return BloomMap(
        variant=scheme, dist=dist, epsilon=epsilon, family=family,
        bits=BitArray(geom.m), tree=tree,
    )


def build_tree(pairs, dist: ValueDistribution, epsilon: float, seed: int,
               scheme: str = "standard", *, custom=None) -> BloomMap:
    """Build and freeze a tree map from (key, value label) pairs, sized by
    the actual per-value key tallies."""
    grouped = _index_pairs(pairs, dist)
    counts = tuple(len(set(grouped.get(i, ()))) for i in range(dist.b))
    bmap = plan_tree_map(dist, epsilon, seed, scheme, counts=counts, custom=custom)
    bmap._store_batch(grouped)
    bmap.freeze()
    return bmap


def zero_fraction(bmap: BloomMap) -> float:
    """Fraction of the map's bits still zero.  A well-sized map sits near
    one half; drifting low means the array is overloaded."""
    return bmap.bits.zero_fraction()
