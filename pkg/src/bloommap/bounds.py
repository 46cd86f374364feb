"""Closed-form space floors and probe cost limits.

Any structure that answers key-value queries with a false positive rate
eps_plus, a misassignment rate eps_star, and a false negative rate
eps_minus needs a minimum number of bits per stored key.  The functions
here evaluate those floors (asymptotic form, vanishing per-key terms
dropped), plus the analytic probe cost limits of the tree traversal.
space_report() lines a concrete map up against them.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

from .distribution import entropy
from .errors import InvalidEpsilon

__all__ = [
    "BoundReport",
    "lb_false_positive_only",
    "lb_general",
    "lb_symmetric",
    "space_report",
    "variant_bits_per_key",
    "standard_negative_probe_limit",
    "fast_negative_probe_limit",
    "fast_positive_probe_limit",
]

LOG2E = math.log2(math.e)


def _xlog2x(x: float) -> float:
    return 0.0 if x == 0.0 else x * math.log2(x)


def lb_false_positive_only(eps_plus: float, entropy_bits: float) -> float:
    """Bits per key any structure needs when only false positives (rate at
    most eps_plus) are tolerated: log2(1/eps_plus) + H."""
    if not (0.0 < eps_plus <= 1.0):
        raise InvalidEpsilon(f"false positive rate must lie in (0, 1], got {eps_plus!r}")
    if entropy_bits < 0.0:
        raise ValueError(f"negative entropy {entropy_bits!r}")
    return math.log2(1.0 / eps_plus) + entropy_bits


def lb_general(eps_plus: float, eps_star: float, eps_minus: float,
               entropy_bits: float) -> float:
    """Bits per key needed when false positives, misassignments, and false
    negatives are all allowed:

        (1 - e-) log2(1/e+) + (1 - e- - e*) H - H(e-, e*, 1 - e- - e*)

    with the ternary entropy using the 0 log 0 = 0 convention.  The
    closed form is a good guide for small rates; a warning fires when any
    rate exceeds 1/8.  With eps_star = eps_minus = 0 this reduces exactly
    to lb_false_positive_only.
    """
    if not (0.0 < eps_plus <= 1.0):
        raise InvalidEpsilon(f"false positive rate must lie in (0, 1], got {eps_plus!r}")
    for name, rate in (("misassignment", eps_star), ("false negative", eps_minus)):
        if not (0.0 <= rate < 1.0):
            raise InvalidEpsilon(f"{name} rate must lie in [0, 1), got {rate!r}")
    if eps_star + eps_minus >= 1.0:
        raise InvalidEpsilon(
            f"misassignment + false negative rates must stay below 1, "
            f"got {eps_star + eps_minus!r}"
        )
    if entropy_bits < 0.0:
        raise ValueError(f"negative entropy {entropy_bits!r}")
    if max(eps_plus, eps_star, eps_minus) > 0.125:
        warnings.warn(
            "error rates above 1/8 stretch the closed-form floor; treat the "
            "result as indicative only",
            stacklevel=2,
        )
    bulk = 1.0 - eps_minus - eps_star
    mix_entropy = -(_xlog2x(eps_minus) + _xlog2x(eps_star) + _xlog2x(bulk))
    return (
        (1.0 - eps_minus) * math.log2(1.0 / eps_plus)
        + bulk * entropy_bits
        - mix_entropy
    )


def lb_symmetric(eps: float, entropy_bits: float) -> float:
    """Relaxed floor for the common case of equal false positive and
    misassignment budgets and no false negatives:

        (1 - eps) (log2(1/eps) + H - (eps + eps**2))
    """
    if not (0.0 < eps < 1.0):
        raise InvalidEpsilon(f"error budget must lie in (0, 1), got {eps!r}")
    if entropy_bits < 0.0:
        raise ValueError(f"negative entropy {entropy_bits!r}")
    return (1.0 - eps) * (math.log2(1.0 / eps) + entropy_bits - (eps + eps * eps))


# -- analytic space for each variant ----------------------------------


def variant_bits_per_key(variant: str, epsilon: float, entropy_bits: float,
                         b: int) -> float | None:
    """Closed-form bits per key for a variant, before integer ceilings.

    Returns None for custom hash count schemes, which have no general
    closed form.
    """
    budget = math.log2(1.0 / epsilon)
    if variant == "simple":
        return LOG2E * (budget + entropy_bits)
    if variant == "standard":
        if b == 1:
            return LOG2E * budget
        harmonic = math.fsum(1.0 / r for r in range(1, b + 1))
        return LOG2E * (budget + entropy_bits + math.log2(harmonic - 1.0) + 1.0)
    if variant == "fast":
        return LOG2E * (budget + 2.0 * entropy_bits + 2.0)
    return None


# -- probe cost limits for the tree traversal -------------------------


def standard_negative_probe_limit(entropy_bits: float) -> float:
    """Expected probes for an absent key, standard scheme: at most H + 2
    (requires at least half the bit array zero)."""
    return entropy_bits + 2.0


def fast_negative_probe_limit() -> float:
    """Expected probes for an absent key, fast scheme: at most 3."""
    return 3.0


def fast_positive_probe_limit(b: int, value_index: int, p: float,
                              epsilon: float) -> float:
    """Expected probes when looking up a stored key of the given value
    (0-based index into the sorted distribution), fast scheme:

        3 log2(values at or right of the leaf) + 2 log2(1/p) + log2(1/eps) + 2

    The first term pays for detours into sibling subtrees entered before
    the true path; the rest is the true path itself.
    """
    remaining = b - value_index
    return (
        3.0 * math.log2(remaining)
        + 2.0 * math.log2(1.0 / p)
        + math.log2(1.0 / epsilon)
        + 2.0
    )


# -- report -----------------------------------------------------------


@dataclass(frozen=True)
class BoundReport:
    """A map's achieved space next to the analytic floors.

    All *_bpk values are bits per stored key.  ratio compares achieved
    space to the symmetric floor; values modestly above 1 are the price
    of hashing (log2(e)) and integer ceilings.  The floors drop vanishing
    per-key terms, as flagged by asymptotic_terms_omitted.
    """

    variant: str
    n: int
    m: int
    b: int
    epsilon: float
    entropy_bits: float
    achieved_bpk: float
    variant_bpk: float | None
    fp_only_lower_bpk: float
    general_lower_bpk: float
    symmetric_lower_bpk: float
    ratio: float
    asymptotic_terms_omitted: bool = True

    _FIELDS = (
        "variant", "n", "m", "b", "epsilon", "entropy_bits", "achieved_bpk",
        "variant_bpk", "fp_only_lower_bpk", "general_lower_bpk",
        "symmetric_lower_bpk", "ratio",
    )

    def _items(self):
        for name in self._FIELDS:
            yield name, getattr(self, name)

    def to_kv_lines(self) -> str:
        """Machine-readable name=value lines."""
        parts = []
        for name, value in self._items():
            if isinstance(value, float):
                parts.append(f"{name}={value:.6g}")
            else:
                parts.append(f"{name}={value if value is not None else 'none'}")
        parts.append("asymptotic_terms_omitted=true")
        return "\n".join(parts)

    def to_table(self) -> str:
        """Aligned two-column text table."""
        rows = []
        for name, value in self._items():
            if isinstance(value, float):
                rows.append((name, f"{value:.6g}"))
            else:
                rows.append((name, str(value) if value is not None else "-"))
        rows.append(("asymptotic_terms_omitted", "true"))
        width = max(len(name) for name, _ in rows)
        return "\n".join(f"{name:<{width}}  {val}" for name, val in rows)


def space_report(bmap) -> BoundReport:
    """Compare a frozen map's bits per key against the analytic floors."""
    h = entropy(bmap.dist)
    eps = bmap.epsilon
    achieved = bmap.bits_per_key()
    symmetric = lb_symmetric(eps, h)
    return BoundReport(
        variant=bmap.variant,
        n=bmap.n,
        m=bmap.m,
        b=bmap.b,
        epsilon=eps,
        entropy_bits=h,
        achieved_bpk=achieved,
        variant_bpk=variant_bits_per_key(bmap.variant, eps, h, bmap.b),
        fp_only_lower_bpk=lb_false_positive_only(eps, h),
        general_lower_bpk=lb_general(eps, eps, 0.0, h),
        symmetric_lower_bpk=symmetric,
        ratio=achieved / symmetric if symmetric > 0 else math.inf,
    )
