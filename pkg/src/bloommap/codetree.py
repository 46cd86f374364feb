"""Code trees: the shape behind the tree-structured map variant.

Each value gets a leaf of a full binary tree; more probable values sit
nearer the root so their keys touch fewer bits.  The tree is the optimal
alphabetic binary tree for the sorted probability vector (leaves stay in
probability order), built with the Garsia-Wachs algorithm.  Every node
then receives a level-order offset, a hash count k, and a consecutive
slice of base hash indices, and the whole shape is certified against the
requested error budget before any key is stored.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from fractions import Fraction

from .errors import InvalidEpsilon, InvalidScheme

__all__ = [
    "CodeTree",
    "TreeNode",
    "Geometry",
    "CertificationReport",
    "TreePropertyReport",
    "build_alphabetic_tree",
    "tree_from_depths",
    "assign_offsets",
    "assign_hash_counts",
    "certify_error_bounds",
    "compute_geometry",
    "refresh_base_starts",
    "path_nodes",
    "left_branch_count",
    "tree_property_report",
    "SCHEMES",
]

LOG2E = math.log2(math.e)
SCHEMES = ("standard", "fast", "custom")


@dataclass
class TreeNode:
    index: int
    parent: int | None = None
    left: int | None = None
    right: int | None = None
    depth: int = 0
    offset: int = -1       # level-order position, root = 0
    k: int = 0             # hash functions probed at this node
    base_start: int = -1   # base indices used here: base_start+1 .. base_start+k
    value_index: int | None = None

    @property
    def is_leaf(self) -> bool:
        return self.left is None


class CodeTree:
    """A full binary tree over value indices 0..b-1 (leaves, left to right).

    Built once per map, then treated as immutable; queries only read it.
    """

    def __init__(self):
        self.nodes: list[TreeNode] = []
        self.root: int | None = None
        self.leaves: tuple[int, ...] = ()
        self._paths: tuple[tuple[int, ...], ...] = ()
        self.certification: CertificationReport | None = None

    # -- construction -------------------------------------------------

    def new_leaf(self) -> int:
        node = TreeNode(index=len(self.nodes))
        self.nodes.append(node)
        return node.index

    def new_internal(self, left: int, right: int) -> int:
        node = TreeNode(index=len(self.nodes), left=left, right=right)
        self.nodes.append(node)
        self.nodes[left].parent = node.index
        self.nodes[right].parent = node.index
        return node.index

    def seal(self, root: int) -> None:
        """Fix the root, compute depths, and number leaves left to right."""
        self.root = root
        leaves: list[int] = []
        stack = [(root, 0)]
        while stack:
            idx, depth = stack.pop()
            node = self.nodes[idx]
            node.depth = depth
            if node.is_leaf:
                leaves.append(idx)
            else:
                # push right first so the left child pops first
                stack.append((node.right, depth + 1))
                stack.append((node.left, depth + 1))
        for value_index, idx in enumerate(leaves):
            self.nodes[idx].value_index = value_index
        self.leaves = tuple(leaves)
        paths = []
        for idx in leaves:
            path = []
            cur: int | None = idx
            while cur is not None:
                path.append(cur)
                cur = self.nodes[cur].parent
            paths.append(tuple(reversed(path)))
        self._paths = tuple(paths)

    # -- lookups ------------------------------------------------------

    @property
    def b(self) -> int:
        return len(self.leaves)

    def node(self, index: int) -> TreeNode:
        return self.nodes[index]

    def leaf_depths(self) -> tuple[int, ...]:
        return tuple(self.nodes[i].depth for i in self.leaves)

    def path_ids(self, value_index: int) -> tuple[int, ...]:
        """Node indices from the root down to the leaf of this value."""
        return self._paths[value_index]

    def path_weight(self, value_index: int) -> int:
        """Total hash count t_i along the path of value i."""
        return sum(self.nodes[w].k for w in self.path_ids(value_index))

    def preorder(self):
        """Yield nodes root-first, each internal followed by left then right."""
        stack = [self.root]
        while stack:
            node = self.nodes[stack.pop()]
            yield node
            if not node.is_leaf:
                stack.append(node.right)
                stack.append(node.left)


# -- optimal alphabetic construction ----------------------------------


def _garsia_wachs_depths(weights) -> list[int]:
    """Leaf depths of an optimal alphabetic binary tree.

    Classic two-phase Garsia-Wachs: repeatedly combine the leftmost
    adjacent pair whose left member does not exceed the weight two to its
    right, then migrate the combined node left past lighter weights.  The
    depths of the original leaves in the resulting (non-alphabetic)
    combination tree are the optimal alphabetic depths.
    """
    n = len(weights)
    if n == 1:
        return [0]
    INF = math.inf
    # items: [weight, payload]; payload is a leaf index or a (left, right) pair
    seq: list[list] = [[INF, None]]
    seq.extend([w, i] for i, w in enumerate(weights))
    seq.append([INF, None])
    while len(seq) > 3:
        j = 2
        while seq[j - 1][0] > seq[j + 1][0]:
            j += 1
        s = seq[j - 1][0] + seq[j][0]
        merged = [s, (seq[j - 1][1], seq[j][1])]
        del seq[j - 1 : j + 1]
        i = j - 2
        while seq[i][0] < s:
            i -= 1
        seq.insert(i + 1, merged)
    depths = [0] * n
    stack = [(seq[1][1], 0)]
    while stack:
        payload, depth = stack.pop()
        if isinstance(payload, tuple):
            stack.append((payload[0], depth + 1))
            stack.append((payload[1], depth + 1))
        else:
            depths[payload] = depth
    return depths


def tree_from_depths(depths) -> CodeTree:
    """Build the unique full binary tree whose leaves, left to right, sit at
    the given depths.  Raises ValueError if no such tree exists."""
    tree = CodeTree()
    stack: list[tuple[int, int]] = []  # (node index, depth)
    for depth in depths:
        if depth < 0:
            raise ValueError(f"negative leaf depth {depth}")
        stack.append((tree.new_leaf(), depth))
        while len(stack) >= 2 and stack[-1][1] == stack[-2][1] and stack[-1][1] > 0:
            (right, d), (left, _) = stack.pop(), stack.pop()
            stack.append((tree.new_internal(left, right), d - 1))
    if len(stack) != 1 or stack[0][1] != 0:
        raise ValueError(f"depth sequence {tuple(depths)} does not describe a full binary tree")
    tree.seal(stack[0][0])
    return tree


def build_alphabetic_tree(dist) -> CodeTree:
    """Optimal alphabetic binary tree for a ValueDistribution.

    Leaf i (left to right) corresponds to value i of the sorted
    distribution, so the most probable values end up shallowest.  Ties in
    the probabilities can leave the raw depth sequence unsorted; since the
    probabilities are non-increasing, rearranging the same depth multiset
    into non-decreasing order costs no more (and a full tree realizing it
    always exists), so we canonicalize.  The structural guarantees checked
    by tree_property_report assume this shape.
    """
    depths = sorted(_garsia_wachs_depths(dist.probs))
    return tree_from_depths(depths)


# -- offsets and base indices -----------------------------------------


def assign_offsets(tree: CodeTree) -> CodeTree:
    """Number nodes in level order: root 0, then each level left to right."""
    queue = [tree.root]
    counter = 0
    while queue:
        nxt = []
        for idx in queue:
            node = tree.nodes[idx]
            node.offset = counter
            counter += 1
            if not node.is_leaf:
                nxt.append(node.left)
                nxt.append(node.right)
        queue = nxt
    return tree


def refresh_base_starts(tree: CodeTree) -> None:
    """Recompute every node's base index slice from the current hash counts."""
    # base index slices are consecutive down every root-to-leaf path
    order = [tree.root]
    tree.nodes[tree.root].base_start = 0
    while order:
        node = tree.nodes[order.pop()]
        if not node.is_leaf:
            for child in (node.left, node.right):
                tree.nodes[child].base_start = node.base_start + node.k
                order.append(child)


# -- hash count schemes -----------------------------------------------


def _leaf_floor(epsilon: float) -> int:
    return max(math.ceil(math.log2(1.0 / epsilon)), 1)


def _check_epsilon(epsilon: float) -> None:
    if not (0.0 < epsilon < 1.0):
        raise InvalidEpsilon(f"error budget must lie in (0, 1), got {epsilon!r}")


def _scheme_counts(tree: CodeTree, epsilon: float, scheme: str, custom) -> None:
    b = tree.b
    if scheme == "standard":
        # internal nodes get a single probe; leaves absorb the error budget
        # plus a harmonic-number term that pays for the deep right spine
        if b == 1:
            leaf_k = _leaf_floor(epsilon)
        else:
            harmonic = math.fsum(1.0 / r for r in range(1, b + 1))
            leaf_k = math.ceil(math.log2(1.0 / epsilon) + math.log2(harmonic - 1.0) + 1.0)
        internal_k = 1
    elif scheme == "fast":
        # two probes per internal node halve expected traversal work
        leaf_k = math.ceil(math.log2(1.0 / epsilon)) + 2
        internal_k = 2
    elif scheme == "custom":
        if custom is None:
            raise InvalidScheme("custom scheme needs a per-node hash count mapping")
        floor = _leaf_floor(epsilon)
        for node in tree.nodes:
            try:
                k = int(custom[node.index])
            except (KeyError, IndexError):
                raise InvalidScheme(f"custom counts missing node {node.index}") from None
            if k < 1:
                raise InvalidScheme(f"node {node.index}: hash count {k} < 1")
            if node.is_leaf and k < floor:
                raise InvalidScheme(
                    f"leaf {node.index}: hash count {k} below floor {floor}"
                )
            node.k = k
        return
    else:
        raise InvalidScheme(f"unknown scheme {scheme!r}; expected one of {SCHEMES}")
    floor = _leaf_floor(epsilon)
    leaf_k = max(leaf_k, floor)
    for node in tree.nodes:
        node.k = leaf_k if node.is_leaf else internal_k


def assign_hash_counts(tree: CodeTree, epsilon: float, scheme: str = "standard",
                       custom=None) -> CodeTree:
    """Assign per-node hash counts and certify them against epsilon.

    scheme is "standard" (1 probe per internal node), "fast" (2 probes,
    cheaper traversal for more space), or "custom" (explicit counts, e.g.
    to boost the root).  Leaf counts are bumped as needed until the
    analytic false-positive and misassignment bounds fit the budget; the
    certification report lands on tree.certification.
    """
    _check_epsilon(epsilon)
    _scheme_counts(tree, epsilon, scheme, custom)
    tree.certification = certify_error_bounds(tree, epsilon)
    return tree


# -- error bound certification ----------------------------------------


@dataclass(frozen=True)
class CertificationReport:
    """Analytic error bounds for a tree with assigned hash counts.

    false_positive_bound is the sum over values of 2**-t_i.  Entry i of
    misassignment_bounds sums 2**-(path weight outside value i's path)
    over the values that could shadow i.  bumped lists the leaf value
    indices whose counts were raised, in order.
    """

    epsilon: float
    false_positive_bound: float
    misassignment_bounds: tuple[float, ...]
    bumped: tuple[int, ...] = ()

    @property
    def certified(self) -> bool:
        return self.false_positive_bound <= self.epsilon and all(
            x <= self.epsilon for x in self.misassignment_bounds
        )


def _common_prefix_weight(tree: CodeTree, pi, pj) -> int:
    total = 0
    for a, b in zip(pi, pj):
        if a != b:
            break
        total += tree.nodes[a].k
    return total


def analytic_error_bounds(tree: CodeTree) -> tuple[float, tuple[float, ...]]:
    """(false positive bound, per-value misassignment bounds) for the
    current hash counts, from the actual path weights."""
    b = tree.b
    t = [tree.path_weight(i) for i in range(b)]
    fp = math.fsum(2.0 ** -ti for ti in t)
    mis = []
    for i in range(b):
        pi = tree.path_ids(i)
        acc = 0.0
        for j in range(i + 1, b):
            t_ij = t[j] - _common_prefix_weight(tree, pi, tree.path_ids(j))
            acc += 2.0 ** -t_ij
        mis.append(acc)
    return fp, tuple(mis)


def certify_error_bounds(tree: CodeTree, epsilon: float) -> CertificationReport:
    """Check the analytic error bounds against epsilon, raising leaf hash
    counts until both hold.

    Each round finds the most violated constraint and bumps the leaf
    contributing its largest term, so the loop converges quickly (every
    bump at least halves that term).  The returned report always
    satisfies report.certified.
    """
    _check_epsilon(epsilon)
    bumped: list[int] = []
    while True:
        fp, mis = analytic_error_bounds(tree)
        worst_gap = fp - epsilon
        worst_constraint = -1  # -1 means the false positive bound
        for i, bound in enumerate(mis):
            if bound - epsilon > worst_gap:
                worst_gap = bound - epsilon
                worst_constraint = i
        if worst_gap <= 0.0:
            break
        t = [tree.path_weight(i) for i in range(tree.b)]
        if worst_constraint < 0:
            target = min(range(tree.b), key=lambda i: t[i])
        else:
            i = worst_constraint
            pi = tree.path_ids(i)
            target = min(
                range(i + 1, tree.b),
                key=lambda j: t[j] - _common_prefix_weight(tree, pi, tree.path_ids(j)),
            )
        tree.nodes[tree.leaves[target]].k += 1
        bumped.append(target)
    refresh_base_starts(tree)
    return CertificationReport(
        epsilon=epsilon,
        false_positive_bound=fp,
        misassignment_bounds=mis,
        bumped=tuple(bumped),
    )


# -- geometry ---------------------------------------------------------


@dataclass(frozen=True)
class Geometry:
    """Bit array sizing for a tree with counts: m bits, k base functions,
    per-value path weights t, and whether m fits the coarse budget
    2 n log2(e) log2(b / epsilon)."""

    m: int
    k: int
    t: tuple[int, ...]
    budget_limit: float
    budget_ok: bool


def compute_geometry(tree: CodeTree, counts, epsilon: float) -> Geometry:
    """Size the bit array: m = ceil(log2(e) * sum_i count_i * t_i).

    counts are the per-value key counts; t_i is the total hash count on
    value i's root-to-leaf path.  The budget check is advisory only; a
    violation warns and building proceeds.
    """
    _check_epsilon(epsilon)
    if len(counts) != tree.b:
        raise ValueError(f"{len(counts)} counts for {tree.b} leaves")
    if any(c < 0 for c in counts):
        raise ValueError("negative key count")
    n = sum(counts)
    if n == 0:
        raise ValueError("refusing to size an empty map (all counts zero)")
    refresh_base_starts(tree)
    t = tuple(tree.path_weight(i) for i in range(tree.b))
    m = math.ceil(LOG2E * sum(c * ti for c, ti in zip(counts, t)))
    limit = 2.0 * n * LOG2E * math.log2(tree.b / epsilon)
    ok = m <= limit
    if not ok:
        warnings.warn(
            f"bit array of {m} bits exceeds the sizing budget {limit:.0f}; "
            "building anyway",
            stacklevel=2,
        )
    return Geometry(m=m, k=max(t), t=t, budget_limit=limit, budget_ok=ok)


# -- paths ------------------------------------------------------------


def path_nodes(tree: CodeTree, value_index: int) -> tuple[TreeNode, ...]:
    """Nodes from the root down to the leaf of value_index."""
    return tuple(tree.nodes[w] for w in tree.path_ids(value_index))


def left_branch_count(tree: CodeTree, value_index: int) -> int:
    """Number of left turns on the path to value_index's leaf."""
    count = 0
    for above, below in zip(tree.path_ids(value_index), tree.path_ids(value_index)[1:]):
        if tree.nodes[above].left == below:
            count += 1
    return count


# -- structural inequalities ------------------------------------------


@dataclass(frozen=True)
class TreePropertyReport:
    """Results of the structural inequality checks on a full binary tree.

    path_difference_ok: for i < j, the part of value j's path outside
        value i's path has at least log2(sum_{r=i..j} 2**(l_j - l_r))
        nodes.  Only meaningful when leaf depths are non-decreasing left
        to right; otherwise it is skipped and reported as None.
    level_sum_ok: sum over depths d of |nodes at depth d| / 2**d is at
        most 1 + sum_i l_i / 2**l_i.
    left_branch_ok: the path to leaf i (1-based) takes at most
        log2(b - i + 1) left turns.
    """

    path_difference_ok: bool | None
    level_sum_ok: bool
    left_branch_ok: bool

    @property
    def path_difference_skipped(self) -> bool:
        return self.path_difference_ok is None

    @property
    def all_ok(self) -> bool:
        return (
            self.path_difference_ok is not False
            and self.level_sum_ok
            and self.left_branch_ok
        )


def tree_property_report(tree: CodeTree) -> TreePropertyReport:
    """Run the three structural checks in exact arithmetic."""
    depths = tree.leaf_depths()
    b = tree.b

    sorted_depths = all(a <= c for a, c in zip(depths, depths[1:]))
    path_diff: bool | None
    if not sorted_depths:
        path_diff = None
    else:
        path_diff = True
        for i in range(b):
            pi = tree.path_ids(i)
            for j in range(i + 1, b):
                pj = tree.path_ids(j)
                shared = 0
                for a, c in zip(pi, pj):
                    if a != c:
                        break
                    shared += 1
                outside = len(pj) - shared
                total = sum(1 << (depths[j] - depths[r]) for r in range(i, j + 1))
                if (1 << outside) < total:
                    path_diff = False

    by_depth: dict[int, int] = {}
    for node in tree.nodes:
        by_depth[node.depth] = by_depth.get(node.depth, 0) + 1
    lhs = sum(Fraction(cnt, 1 << d) for d, cnt in by_depth.items())
    rhs = 1 + sum(Fraction(l, 1 << l) for l in depths)
    level_sum = lhs <= rhs

    left_branch = all(
        (1 << left_branch_count(tree, i)) <= b - i for i in range(b)
    )

    return TreePropertyReport(
        path_difference_ok=path_diff,
        level_sum_ok=level_sum,
        left_branch_ok=left_branch,
    )
