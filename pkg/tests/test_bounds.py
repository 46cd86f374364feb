"""Space floors, probe limits, and the comparison report."""

import math

import pytest

from bloommap import (
    InvalidEpsilon,
    build_simple,
    build_tree,
    new_distribution,
    space_report,
)
from bloommap.bounds import (
    fast_negative_probe_limit,
    fast_positive_probe_limit,
    lb_false_positive_only,
    lb_general,
    lb_symmetric,
    standard_negative_probe_limit,
    variant_bits_per_key,
)
from bloommap.harness import PMapSpec, generate_pmap

GRID_EPS = [2.0 ** -t for t in range(3, 11)]
GRID_H = [0.0, 0.5, 1.0, 2.0, 4.0]


def test_fp_only_floor_values():
    assert lb_false_positive_only(0.01, 0.0) == pytest.approx(6.643856189774724, abs=1e-12)
    assert lb_false_positive_only(2 ** -8, 0.0) == 8.0
    assert lb_false_positive_only(2 ** -8, 1.75) == 9.75
    # a full error budget leaves only the entropy to pay for
    assert lb_false_positive_only(1.0, 3.0) == 3.0


def test_general_floor_value():
    got = lb_general(2 ** -7, 1 / 16, 1 / 16, 1.0)
    assert got == pytest.approx(6.768935556800404, abs=1e-12)


def test_general_floor_reduces_to_fp_only():
    for eps in GRID_EPS:
        for h in GRID_H:
            a = lb_general(eps, 0.0, 0.0, h)
            b = lb_false_positive_only(eps, h)
            assert abs(a - b) <= 1e-12


def test_symmetric_floor_values():
    assert lb_symmetric(0.01, 0.0) == pytest.approx(6.567418627876977, abs=1e-12)
    assert lb_symmetric(0.5, 1.0) == pytest.approx(0.625, abs=1e-12)


def test_symmetric_floor_sits_above_the_exact_form():
    # the relaxed two-term floor is slightly larger than the exact
    # closed form it simplifies; the gap has a clean expression and
    # shrinks as eps drops.  Callers comparing maps against
    # symmetric_lower_bpk therefore see a marginally stricter target.
    for eps in GRID_EPS:
        for h in GRID_H:
            gap = lb_symmetric(eps, h) - lb_general(eps, eps, 0.0, h)
            want = (1.0 - eps) * (-(eps + eps * eps) - math.log2(1.0 - eps))
            assert gap == pytest.approx(want, abs=1e-12)
            assert gap > 0.0
    worst = (1.0 - 0.125) * (-(0.125 + 0.125 ** 2) - math.log2(1.0 - 0.125))
    assert worst == pytest.approx(0.045517568199596514, abs=1e-12)


def test_floor_domain_errors():
    with pytest.raises(InvalidEpsilon):
        lb_false_positive_only(0.0, 1.0)
    with pytest.raises(InvalidEpsilon):
        lb_false_positive_only(1.5, 1.0)
    with pytest.raises(ValueError):
        lb_false_positive_only(0.5, -1.0)
    with pytest.raises(InvalidEpsilon):
        lb_general(0.01, 1.0, 0.0, 1.0)
    with pytest.raises(InvalidEpsilon):
        lb_general(0.01, -0.1, 0.0, 1.0)
    with pytest.raises(InvalidEpsilon):
        lb_general(0.01, 0.6, 0.5, 1.0)  # rates sum past one
    for bad in (0.0, 1.0, -2.0):
        with pytest.raises(InvalidEpsilon):
            lb_symmetric(bad, 1.0)


def test_large_rates_warn():
    with pytest.warns(UserWarning):
        lb_general(0.2, 0.0, 0.0, 1.0)
    with pytest.warns(UserWarning):
        lb_general(0.01, 0.0, 0.2, 1.0)
    # 1/8 exactly is still inside the trusted range
    import warnings

    with warnings.catch_warnings():
        warnings.simplefilter("error")
        lb_general(0.125, 0.125, 0.0, 1.0)


def test_variant_closed_forms():
    h = 1.75
    eps = 2 ** -7
    assert variant_bits_per_key("simple", eps, h, 4) == pytest.approx(12.62358160777843, abs=1e-12)
    assert variant_bits_per_key("standard", eps, h, 4) == pytest.approx(14.232875057574793, abs=1e-12)
    assert variant_bits_per_key("fast", eps, h, 4) == pytest.approx(18.03368801111204, abs=1e-12)
    assert variant_bits_per_key("standard", 2 ** -5, 0.0, 1) == pytest.approx(7.213475204444817, abs=1e-12)
    assert variant_bits_per_key("custom", eps, h, 4) is None


def test_probe_limits():
    assert standard_negative_probe_limit(1.75) == 3.75
    assert fast_negative_probe_limit() == 3.0
    assert fast_positive_probe_limit(4, 0, 0.5, 2 ** -7) == 17.0
    # the last value pays no detour term
    assert fast_positive_probe_limit(4, 3, 0.125, 2 ** -7) == 15.0


def _skew():
    return new_distribution([0.5, 0.25, 0.125, 0.125], ["a", "b", "c", "d"])


def test_space_report_fields():
    d = _skew()
    pairs = generate_pmap(PMapSpec(d, 400, seed=6))
    report = space_report(build_simple(pairs, d, 2 ** -7, seed=1))
    assert report.variant == "simple"
    assert report.n == 400
    assert report.b == 4
    assert report.entropy_bits == pytest.approx(1.75)
    assert report.achieved_bpk == pytest.approx(report.m / 400)
    assert report.fp_only_lower_bpk == pytest.approx(8.75)
    assert report.symmetric_lower_bpk == pytest.approx(
        lb_symmetric(2 ** -7, 1.75), abs=1e-12
    )
    assert report.ratio == pytest.approx(report.achieved_bpk / report.symmetric_lower_bpk)
    assert report.asymptotic_terms_omitted

    kv = report.to_kv_lines()
    assert "variant=simple" in kv
    assert "asymptotic_terms_omitted=true" in kv
    assert f"n={report.n}" in kv

    table = report.to_table()
    assert "achieved_bpk" in table
    assert "symmetric_lower_bpk" in table


def test_space_report_custom_has_no_variant_form():
    d = new_distribution([1, 1], "xy")
    pairs = [(f"k{i}".encode(), b"x" if i % 2 else b"y") for i in range(64)]
    tree_probe = build_tree(pairs, d, 2 ** -5, seed=2, scheme="fast")
    custom = {n.index: n.k for n in tree_probe.tree.nodes}
    bmap = build_tree(pairs, d, 2 ** -5, seed=2, scheme="custom", custom=custom)
    report = space_report(bmap)
    assert report.variant_bpk is None
    assert "variant_bpk=none" in report.to_kv_lines()
    assert report.m == tree_probe.m  # same counts, same geometry
