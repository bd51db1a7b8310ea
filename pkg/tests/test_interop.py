from __future__ import annotations

import sys
from collections import Counter

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from fptarget.errors import FormatError, MatcherError
from fptarget.interop import (
    INNOVATRICS_THRESHOLD,
    VERIFINGER_THRESHOLD,
    BaselineMatcher,
    ExternalMatcher,
    Impression,
    ImpressionSet,
    baseline_match,
    build_score_matrix,
    external_match,
    interop_csv,
    interop_table,
    load_impression_sets,
    make_matcher,
    parse_score,
    read_interop_csv,
    reference_scores,
    score_pairs,
    tar_far,
)
from fptarget.patterns import GrayscaleImage, sine_grating, synth_impression, write_pgm

N = 96
KINDS = [("vertical", 10), ("horizontal", 10), ("circular", 10), ("vertical", 7)]


def make_set(reader, scale, noise, n_targets=3, n_imp=3, seed=0):
    entries = []
    for t, (kind, period) in enumerate(KINDS[:n_targets]):
        src = sine_grating(kind, period, N, N)
        for i in range(n_imp):
            img = synth_impression(src, scale, noise, seed=seed + 100 * t + i)
            entries.append(Impression(reader, f"t{t}", i, img))
    return ImpressionSet(reader, entries)


@pytest.fixture(scope="module")
def sets():
    return [make_set("r1", 1.0, 5, seed=1), make_set("r2", 0.99, 8, seed=2)]


class Recorder:
    """Asymmetric toy matcher: score encodes the pair."""

    def __init__(self):
        self.calls = []

    def score(self, a, b):
        self.calls.append((a.label, b.label))
        return 10.0 * a.index + b.index + (100.0 if a.target_id == b.target_id else 0.0)


# --- tar/far ---------------------------------------------------------------------


def test_tar_far_examples():
    tar, far = tar_far([100, 50, 40], [10, 20, 48.9], 49)
    assert tar == pytest.approx(2 / 3) and far == 0
    assert tar_far([1, 2], [3, 4], -np.inf) == (1.0, 1.0)


def test_tar_far_empty():
    with pytest.raises(ValueError):
        tar_far([], [1.0], 49)
    with pytest.raises(ValueError):
        tar_far([1.0], [], 49)


@settings(max_examples=60)
@given(
    st.lists(st.floats(0, 1000), min_size=1, max_size=40),
    st.lists(st.floats(0, 1000), min_size=1, max_size=40),
    st.floats(0, 1000),
    st.floats(0, 200),
)
def test_tar_far_monotone_and_bruteforce(g, i, t, dt):
    tar, far = tar_far(g, i, t)
    assert tar == sum(s >= t for s in g) / len(g)
    assert far == sum(s >= t for s in i) / len(i)
    tar2, far2 = tar_far(g, i, t + dt)
    assert 0 <= tar2 <= tar <= 1 and 0 <= far2 <= far <= 1


def test_threshold_constants():
    assert INNOVATRICS_THRESHOLD == 49 and VERIFINGER_THRESHOLD == 33


# --- baseline matcher -------------------------------------------------------------


def test_identical_is_max():
    g = sine_grating("circular", 10, N, N)
    assert baseline_match(g, g) == 1000.0


def test_noise_scores_low():
    g = sine_grating("circular", 10, 128, 128)
    noise = GrayscaleImage(np.random.default_rng(2024).integers(0, 256, (128, 128)).astype(np.uint8))
    assert baseline_match(g, noise) < 100


def test_shift_recovered():
    big = synth_impression(sine_grating("circular", 9, 200, 200), 1.0, 3, seed=5).pixels
    a = GrayscaleImage(np.ascontiguousarray(big[40:168, 40:168]))
    b = GrayscaleImage(np.ascontiguousarray(big[40:168, 48:176]))
    assert baseline_match(a, b) > 900


def test_symmetric_exactly(sets):
    m = BaselineMatcher()
    for a in sets[0].entries[:4]:
        for b in sets[1].entries[::2]:
            assert m.score(a, b) == m.score(b, a)


def test_zero_variance_scores_zero():
    g = sine_grating("vertical", 10, N, N)
    flat = GrayscaleImage(np.full((N, N), 128, np.uint8))
    assert baseline_match(g, flat) == 0.0 and baseline_match(flat, flat) == 0.0


def test_size_and_ppi_mismatch():
    a = sine_grating("vertical", 10, N, N)
    with pytest.raises(MatcherError, match="size"):
        baseline_match(a, sine_grating("vertical", 10, N + 2, N))
    with pytest.raises(MatcherError, match="resolution"):
        baseline_match(a, sine_grating("vertical", 10, N, N, ppi=1000))


def test_score_many_matches_single(sets):
    m = BaselineMatcher()
    a = sets[0].entries[0]
    many = m.score_many(a, sets[1].entries)
    single = [BaselineMatcher().score(a, b) for b in sets[1].entries]
    assert np.allclose(many, single, rtol=0, atol=1e-9)


# --- pairing ------------------------------------------------------------------------


def test_counts_and_partition(sets):
    g, i = score_pairs(sets[0], sets[1], Recorder())
    assert len(g) == 3 * 3 * 3 and len(i) == 3 * 2 * 3 * 3
    assert len(g) + len(i) == len(sets[0]) * len(sets[1])


def test_lexicographic_order(sets):
    rec = Recorder()
    score_pairs(sets[0], sets[1], rec)
    keys = [(a.split("/")[1:], b.split("/")[1:]) for a, b in rec.calls]
    assert keys == sorted(keys, key=lambda k: (k[0][0], int(k[0][1]), k[1][0], int(k[1][1])))


def test_genuine_share_target(sets):
    g, i = score_pairs(sets[0], sets[1], Recorder())
    assert np.all(g >= 100) and np.all(i < 100)


def test_identical_impressions_excluded_by_default(sets):
    g, _ = score_pairs(sets[0], sets[0], Recorder())
    assert len(g) == 3 * 3 * 3 - len(sets[0])
    g2, _ = score_pairs(sets[0], sets[0], Recorder(), include_identical=True)
    assert len(g2) == 27


def test_same_file_counts_as_identical(tmp_path):
    p = write_pgm(sine_grating("vertical", 10, 8, 8), tmp_path / "a.pgm")
    a = Impression("r", "t", 0, path=p)
    b = Impression("r", "t", 0, path=tmp_path / "." / "a.pgm")
    assert a.same_capture(b)


def test_self_pairs_max_score():
    s = make_set("r", 1.0, 0, n_targets=2, n_imp=2)
    m = BaselineMatcher()
    for e in s.entries:
        assert m.score(e, e) == 1000.0


def test_role_swap_same_multiset(sets):
    m = BaselineMatcher()
    g1, i1 = score_pairs(sets[0], sets[1], m)
    g2, i2 = score_pairs(sets[1], sets[0], m)
    assert Counter(g1.tolist()) == Counter(g2.tolist())
    assert Counter(i1.tolist()) == Counter(i2.tolist())


def test_matrix_symmetric(sets):
    mat = build_score_matrix(sets, BaselineMatcher())
    assert mat.cell("r1", "r2").mu_genuine == mat.cell("r2", "r1").mu_genuine
    assert mat.cell("r1", "r2").mu_imposter == mat.cell("r2", "r1").mu_imposter


def test_non_finite_score_rejected(sets):
    class Bad:
        def score(self, a, b):
            return float("nan")

    with pytest.raises(MatcherError, match="non-finite"):
        score_pairs(sets[0], sets[1], Bad())


def test_empty_sets_rejected(sets):
    with pytest.raises(ValueError):
        score_pairs(ImpressionSet("x", []), sets[1], Recorder())


def test_duplicate_impressions_rejected():
    img = sine_grating("vertical", 10, 8, 8)
    with pytest.raises(ValueError, match="duplicate"):
        ImpressionSet("r", [Impression("r", "t", 0, img), Impression("r", "t", 0, img)])


def test_baseline_separates_synthetic_targets(sets):
    g, i = score_pairs(sets[0], sets[1], BaselineMatcher())
    assert g.min() > i.max()


# --- external matcher -----------------------------------------------------------------


def script(tmp_path, body, name="m.py"):
    p = tmp_path / name
    p.write_text("import sys, time\n" + body + "\n")
    return f"{sys.executable} {p}"


def test_external_number(tmp_path):
    cmd = script(tmp_path, "print('608')")
    assert external_match(cmd, "a.pgm", "b.pgm") == 608.0


def test_external_parse_error(tmp_path):
    with pytest.raises(MatcherError, match="not a single number"):
        external_match(script(tmp_path, "print('abc')"), "a", "b")


def test_external_exit_status(tmp_path):
    with pytest.raises(MatcherError, match="status 1"):
        external_match(script(tmp_path, "sys.exit(1)"), "a", "b")


def test_external_timeout(tmp_path):
    with pytest.raises(MatcherError, match="timed out"):
        external_match(script(tmp_path, "time.sleep(5)"), "a", "b", timeout_s=0.3)


def test_external_missing_command():
    with pytest.raises(MatcherError, match="cannot run"):
        external_match("/nonexistent/matcher", "a", "b")


def test_external_placeholders(tmp_path):
    m = ExternalMatcher(f"{sys.executable} -c pass --probe {{probe}} --enroll {{enroll}}")
    assert m.argv("e 1.pgm", "p.pgm")[-4:] == ["--probe", "p.pgm", "--enroll", "e 1.pgm"]
    plain = ExternalMatcher("match --fast")
    assert plain.argv("e", "p") == ["match", "--fast", "e", "p"]


def test_parse_score_formats():
    assert parse_score(" 12.5e1\n") == 125.0
    assert parse_score("-3") == -3.0
    with pytest.raises(MatcherError):
        parse_score("1 2")
    with pytest.raises(MatcherError):
        parse_score("inf")


def test_external_in_memory_and_workers(tmp_path, sets):
    # score = file size difference parity; deterministic and cheap
    cmd = script(tmp_path, "import os; print(len(sys.argv[1]) % 7 + len(sys.argv[2]) % 5)")
    m = ExternalMatcher(cmd)
    small_a = ImpressionSet("a", sets[0].entries[:3])
    small_b = ImpressionSet("b", sets[1].entries[:3])
    g1, i1 = score_pairs(small_a, small_b, m, workers=1)
    g4, i4 = score_pairs(small_a, small_b, m, workers=4)
    assert np.array_equal(g1, g4) and np.array_equal(i1, i4)


def test_external_failure_names_pair(tmp_path, sets):
    m = ExternalMatcher(script(tmp_path, "sys.exit(2)"))
    with pytest.raises(MatcherError, match=r"r1/t0/0 vs r2/t0/0"):
        score_pairs(sets[0], sets[1], m)


def test_make_matcher():
    assert isinstance(make_matcher("builtin"), BaselineMatcher)
    assert isinstance(make_matcher("cmd:echo 1"), ExternalMatcher)
    with pytest.raises(ValueError):
        make_matcher("verifinger")


# --- reports --------------------------------------------------------------------------


class Const:
    def score(self, a, b):
        return 80.0 if a.target_id == b.target_id else 20.0 + (a.index + b.index) / 3


def tiny_sets(readers):
    img = sine_grating("vertical", 10, 8, 8)
    return [ImpressionSet(r, [Impression(r, t, i, img) for t in ("a", "b") for i in range(2)]) for r in readers]


def test_report_five_readers():
    readers = [f"reader{k}" for k in range(5)]
    mat = build_score_matrix(tiny_sets(readers), Const())
    rows = read_interop_csv(interop_csv(mat))
    assert len(rows) == 25
    table = interop_table(mat).splitlines()
    assert all(r in table[0] for r in readers)
    assert len(table) == 1 + 2 * 5 + 1


def test_report_single_reader():
    mat = build_score_matrix(tiny_sets(["solo"]), Const(), include_identical=True)
    assert len(mat.cells) == 1 and mat.cell("solo", "solo").genuine.size == 8


def test_csv_roundtrip():
    mat = build_score_matrix(tiny_sets(["a", "b"]), Const(), threshold=21)
    rows = read_interop_csv(interop_csv(mat))
    for row in rows:
        cell = mat.cell(row["enroll_reader"], row["probe_reader"])
        assert row["mu_genuine"] == round(cell.mu_genuine, 2)
        assert row["mu_imposter"] == round(cell.mu_imposter, 2)
        assert row["tar_pct"] == round(100 * cell.tar, 2)
        assert row["far_pct"] == round(100 * cell.far, 2)
        assert row["threshold"] == 21


def test_reference_scores():
    s = make_set("r", 1.0, 0, n_targets=2, n_imp=2)
    refs = {f"t{t}": Impression("ref", f"t{t}", 0, sine_grating(k, p, N, N)) for t, (k, p) in enumerate(KINDS[:2])}
    stats = reference_scores(s, refs, BaselineMatcher())
    assert [x.count for x in stats] == [2, 2]
    assert all(x.mean == pytest.approx(1000.0) for x in stats)
    with pytest.raises(ValueError):
        reference_scores(s, {}, BaselineMatcher())


# --- manifests --------------------------------------------------------------------------


def test_directory_layout(tmp_path):
    for r in ("opt", "cap"):
        for t in ("t1", "t2"):
            d = tmp_path / r / t
            d.mkdir(parents=True)
            for i in range(2):
                write_pgm(sine_grating("vertical", 10, 8, 8), d / f"{i}.pgm")
    sets = load_impression_sets(tmp_path)
    assert [s.reader_id for s in sets] == ["cap", "opt"]
    assert len(sets[0]) == 4 and sets[0].targets == ["t1", "t2"]


def test_csv_manifest(tmp_path):
    write_pgm(sine_grating("vertical", 10, 8, 8), tmp_path / "x.pgm")
    (tmp_path / "m.csv").write_text("reader_id,target_id,index,path\nr,t,0,x.pgm\nr,t,1,x.pgm\n")
    (s,) = load_impression_sets(tmp_path / "m.csv")
    assert len(s) == 2 and s.entries[0].path == tmp_path / "x.pgm"
    (tmp_path / "bad.csv").write_text("reader,target\n")
    with pytest.raises(FormatError):
        load_impression_sets(tmp_path / "bad.csv")
