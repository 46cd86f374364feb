"""End-to-end command line coverage, driven through cli_main()."""

import pytest

from bloommap.cli import cli_main


@pytest.fixture
def pairs_tsv(tmp_path):
    lines = []
    for i in range(16):
        label = "a" if i < 8 else "b" if i < 12 else "c" if i < 14 else "d"
        lines.append(f"key-{i:02d}\t{label}")
    path = tmp_path / "pairs.tsv"
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")
    return str(path)


@pytest.fixture
def dist_tsv(tmp_path):
    path = tmp_path / "dist.tsv"
    path.write_text("a\t0.5\nb\t0.3\nc\t0.2\n", encoding="utf-8")
    return str(path)


def _build(pairs_tsv, out, seed="3", variant="fast"):
    return cli_main([
        "build", "--input", pairs_tsv, "--epsilon", "0.03125",
        "--variant", variant, "--seed", seed, "--out", out,
    ])


def test_build_query_inspect_flow(pairs_tsv, tmp_path, capsys):
    out = str(tmp_path / "demo.bmap")
    assert _build(pairs_tsv, out) == 0
    text = capsys.readouterr().out
    assert "built fast map: n=16 b=4" in text
    assert text.strip().endswith(out)

    assert cli_main(["query", out, "--key", "key-03"]) == 0
    assert capsys.readouterr().out.strip() == "a"
    assert cli_main(["query", out, "--key", "key-13", "--probes"]) == 0
    lines = capsys.readouterr().out.splitlines()
    assert lines[0] == "c"
    assert lines[1].startswith("probes=") and "hash_evals=" in lines[1]
    assert cli_main(["query", out, "--key", "never stored"]) == 0
    assert capsys.readouterr().out.strip() == "BOTTOM"

    assert cli_main(["inspect", out]) == 0
    text = capsys.readouterr().out
    for needle in ("variant", "fast", "n", "16", "leaf_depths",
                   "leaf_hash_counts", "false_positive_bound",
                   "max_misassignment_bound", "values"):
        assert needle in text
    assert "a, b, c, d" in text


def test_inspect_flat_map(pairs_tsv, tmp_path, capsys):
    out = str(tmp_path / "flat.bmap")
    assert _build(pairs_tsv, out, variant="simple") == 0
    capsys.readouterr()
    assert cli_main(["inspect", out]) == 0
    text = capsys.readouterr().out
    assert "hash_counts" in text
    assert "leaf_depths" not in text


def test_build_is_deterministic(pairs_tsv, tmp_path, capsys):
    a = tmp_path / "a.bmap"
    b = tmp_path / "b.bmap"
    c = tmp_path / "c.bmap"
    assert _build(pairs_tsv, str(a)) == 0
    assert _build(pairs_tsv, str(b)) == 0
    assert _build(pairs_tsv, str(c), seed="4") == 0
    capsys.readouterr()
    assert a.read_bytes() == b.read_bytes()
    assert a.read_bytes() != c.read_bytes()


def test_bounds_output(capsys):
    assert cli_main(["bounds", "--epsilon-plus", "0.01"]) == 0
    lines = capsys.readouterr().out.splitlines()
    assert lines[0] == "fp_only_lower_bpk=6.64386"
    assert lines[1] == "general_lower_bpk=6.64386"
    assert lines[2] == "symmetric_lower_bpk=6.56742"

    # at a full false positive budget the relaxed floor has no meaning;
    # the closed form still prints, with its out-of-range caution
    with pytest.warns(UserWarning):
        assert cli_main(["bounds", "--epsilon-plus", "1.0", "--entropy", "2.0"]) == 0
    lines = capsys.readouterr().out.splitlines()
    assert lines[0] == "fp_only_lower_bpk=2"
    assert len(lines) == 2


def test_bench_run(dist_tsv, capsys):
    code = cli_main([
        "bench", "--dist", dist_tsv, "--n", "2000", "--epsilon", "0.03125",
        "--variant", "fast", "--neg-samples", "1000", "--seed", "5",
    ])
    assert code == 0
    text = capsys.readouterr().out
    for needle in ("false_positive_rate", "zero_fraction", "neg_probe_mean",
                   "value[0]", "value[2]", "achieved_bpk",
                   "symmetric_lower_bpk", "ratio"):
        assert needle in text


def test_bench_discard(dist_tsv, capsys):
    code = cli_main([
        "bench", "--dist", dist_tsv, "--n", "2000", "--epsilon", "0.0625",
        "--variant", "simple", "--neg-samples", "1000", "--seed", "6",
        "--discard",
    ])
    assert code == 0
    text = capsys.readouterr().out
    assert "false_neg=" in text


def test_usage_errors_exit_1(capsys):
    assert cli_main([]) == 1
    assert cli_main(["build", "--nope"]) == 1
    assert cli_main(["bench", "--dist", "x.tsv"]) == 1  # --n and --epsilon missing
    assert cli_main(["frobnicate"]) == 1
    capsys.readouterr()


def test_data_errors_exit_2(pairs_tsv, tmp_path, capsys):
    out = str(tmp_path / "x.bmap")
    assert cli_main(["build", "--input", str(tmp_path / "nope.tsv"),
                     "--epsilon", "0.01", "--out", out]) == 2
    assert "bloommap:" in capsys.readouterr().err

    bad = tmp_path / "bad.tsv"
    bad.write_text("no tab here\n", encoding="utf-8")
    assert cli_main(["build", "--input", str(bad),
                     "--epsilon", "0.01", "--out", out]) == 2
    err = capsys.readouterr().err
    assert "bad.tsv:1" in err

    assert cli_main(["build", "--input", pairs_tsv,
                     "--epsilon", "1.5", "--out", out]) == 2
    capsys.readouterr()

    assert cli_main(["query", str(tmp_path / "missing.bmap"),
                     "--key", "k"]) == 2
    capsys.readouterr()

    junk = tmp_path / "junk.bmap"
    junk.write_bytes(b"this is not a map file, not even close")
    assert cli_main(["inspect", str(junk)]) == 2
    assert "bloommap:" in capsys.readouterr().err


def test_empty_pairs_file_exit_2(tmp_path, capsys):
    empty = tmp_path / "empty.tsv"
    empty.write_text("\n\n", encoding="utf-8")
    assert cli_main(["build", "--input", str(empty), "--epsilon", "0.01",
                     "--out", str(tmp_path / "x.bmap")]) == 2
    assert "no pairs found" in capsys.readouterr().err
