"""Genuine/imposter scoring across readers, TAR/FAR, and interoperability
reports.

A matcher is anything with ``score(a, b) -> float`` over two
:class:`Impression` objects.  Two are provided: a self-contained
correlation matcher for tests and desk experiments, and a wrapper that runs
an external command per pair.
"""

from __future__ import annotations

import csv
import hashlib
import io
import math
import re
import shlex
import subprocess
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
import scipy.fft as sfft

from .errors import FormatError, MatcherError
from .patterns import GrayscaleImage, load_image

INNOVATRICS_THRESHOLD = 49.0
VERIFINGER_THRESHOLD = 33.0
MAX_SCORE = 1000.0


@dataclass(frozen=True, eq=False)
class Impression:
    reader_id: str
    target_id: str
    index: int
    image: GrayscaleImage | None = None
    path: Path | None = None

    def load(self) -> GrayscaleImage:
        if self.image is not None:
            return self.image
        if self.path is None:
            raise MatcherError(f"impression {self.label} has neither image nor path")
        return load_image(self.path)

    @property
    def label(self) -> str:
        return f"{self.reader_id}/{self.target_id}/{self.index}"

    def same_capture(self, other: "Impression") -> bool:
        """True when both entries refer to one physical capture."""
        if self is other:
            return True
        if self.path is not None and other.path is not None:
            return Path(self.path).resolve() == Path(other.path).resolve()
        return False


@dataclass
class ImpressionSet:
    reader_id: str
    entries: list[Impression] = field(default_factory=list)

    def __post_init__(self):
        seen = set()
        for e in self.entries:
            key = (e.target_id, e.index)
            if key in seen:
                raise ValueError(f"duplicate impression {self.reader_id}/{e.target_id}/{e.index}")
            seen.add(key)
        self.entries.sort(key=lambda e: (e.target_id, e.index))

    def __len__(self):
        return len(self.entries)

    @property
    def targets(self) -> list[str]:
        return sorted({e.target_id for e in self.entries})


# --- matchers -------------------------------------------------------------------------


class BaselineMatcher:
    """Peak normalised cross-correlation over translations, scaled to 0..1000.

    Each image has its global mean removed; for every integer shift within
    ``search_px`` the correlation is normalised by the energies of the
    overlapping parts, and the largest value is the score.  All shifts are
    evaluated at once through the FFT.  Pairs are always evaluated in a
    canonical order so ``score(a, b) == score(b, a)`` exactly.
    """

    name = "builtin"
    symmetric = True

    def __init__(self, search_px: int = 32):
        self.search = int(search_px)
        self._cache: dict[int, _Prepared] = {}

    def _prepared(self, imp: Impression) -> "_Prepared":
        key = id(imp)
        hit = self._cache.get(key)
        if hit is None or hit.owner is not imp:
            hit = _Prepared(imp, imp.load(), self.search)
            self._cache[key] = hit
        return hit

    def score(self, a: Impression, b: Impression) -> float:
        return float(self.score_many(a, [b])[0])

    def score_many(self, a: Impression, others: list[Impression]) -> np.ndarray:
        pa = self._prepared(a)
        preps = [self._prepared(b) for b in others]
        out = np.zeros(len(preps))
        groups: dict[tuple, list[int]] = {}
        for k, pb in enumerate(preps):
            if pb.shape != pa.shape:
                raise MatcherError(f"{a.label} and {others[k].label} differ in size; the baseline matcher needs equal sizes")
            if pb.ppi != pa.ppi:
                raise MatcherError(f"{a.label} and {others[k].label} differ in resolution")
            if pa.flat or pb.flat:
                continue
            groups.setdefault(pa.key <= pb.key, []).append(k)
        for a_first, idx in groups.items():
            firsts = [pa if a_first else preps[k] for k in idx]
            seconds = [preps[k] if a_first else pa for k in idx]
            out[idx] = _ncc_peak(firsts, seconds, self.search)
        return out


class _Prepared:
    def __init__(self, owner: Impression, image: GrayscaleImage, search: int):
        self.owner = owner
        self.ppi = image.ppi
        a = image.pixels.astype(np.float64)
        a -= a.mean()
        self.shape = a.shape
        self.flat = not np.any(a)
        self.key = hashlib.sha1(image.pixels.tobytes()).hexdigest()
        h, w = a.shape
        self.fft_shape = (sfft.next_fast_len(h + search), sfft.next_fast_len(w + search))
        self.spectrum = sfft.rfft2(a, self.fft_shape)
        sq = sfft.rfft2(a * a, self.fft_shape)
        mask = sfft.rfft2(np.ones_like(a), self.fft_shape)
        # overlap energy of this image when it is the first / second of a pair
        self.energy_first = _lags(sfft.irfft2(np.conj(sq) * mask, self.fft_shape), search)
        self.energy_second = _lags(sfft.irfft2(np.conj(mask) * sq, self.fft_shape), search)


def _lags(corr: np.ndarray, search: int) -> np.ndarray:
    """Cut lags -search..search on both axes out of a circular correlation."""
    idx = np.arange(-search, search + 1)
    return corr[..., idx[:, None] % corr.shape[-2], idx[None, :] % corr.shape[-1]]


def _ncc_peak(firsts: list[_Prepared], seconds: list[_Prepared], search: int) -> np.ndarray:
    shape = firsts[0].fft_shape
    prod = np.stack([np.conj(f.spectrum) * s.spectrum for f, s in zip(firsts, seconds)])
    corr = _lags(sfft.irfft2(prod, shape, axes=(-2, -1)), search)
    ea = np.stack([f.energy_first for f in firsts])
    eb = np.stack([s.energy_second for s in seconds])
    denom = np.sqrt(np.clip(ea, 0.0, None) * np.clip(eb, 0.0, None))
    with np.errstate(divide="ignore", invalid="ignore"):
        ncc = np.where(denom > 1e-9, corr / denom, 0.0)
    peak = ncc.reshape(len(firsts), -1).max(axis=1)
    return np.clip(peak, 0.0, 1.0) * MAX_SCORE


def baseline_match(a: GrayscaleImage, b: GrayscaleImage, search_px: int = 32) -> float:
    """Score two images with :class:`BaselineMatcher`."""
    m = BaselineMatcher(search_px)
    return m.score(Impression("a", "a", 0, a), Impression("b", "b", 0, b))


_NUMBER = re.compile(r"^\s*([-+]?(?:\d+\.?\d*|\.\d+)(?:[eE][-+]?\d+)?)\s*$")


class ExternalMatcher:
    """Run a command per pair and read one decimal number from its stdout.

    The template may use ``{enroll}`` and ``{probe}`` placeholders; without
    them the two image paths are appended as the last two arguments.
    In-memory impressions are written to temporary PGM files first.
    """

    name = "external"
    symmetric = False

    def __init__(self, template: str, timeout_s: float = 30.0):
        if not template.strip():
            raise ValueError("empty matcher command")
        self.template = template
        self.timeout = timeout_s
        self._tmp = None

    def _path(self, imp: Impression) -> str:
        if imp.path is not None:
            return str(imp.path)
        import tempfile

        from .patterns import write_pgm

        if self._tmp is None:
            self._tmp = tempfile.TemporaryDirectory(prefix="fptarget-match-")
        p = Path(self._tmp.name) / f"{imp.reader_id}_{imp.target_id}_{imp.index}_{id(imp)}.pgm"
        if not p.exists():
            write_pgm(imp.load(), p)
        return str(p)

    def argv(self, enroll_path: str, probe_path: str) -> list[str]:
        if "{enroll}" in self.template or "{probe}" in self.template:
            cmd = self.template.replace("{enroll}", shlex.quote(enroll_path)).replace("{probe}", shlex.quote(probe_path))
            return shlex.split(cmd)
        return shlex.split(self.template) + [enroll_path, probe_path]

    def score_paths(self, enroll_path: str, probe_path: str) -> float:
        argv = self.argv(enroll_path, probe_path)
        try:
            done = subprocess.run(argv, capture_output=True, text=True, timeout=self.timeout)
        except subprocess.TimeoutExpired as exc:
            raise MatcherError(f"matcher timed out after {self.timeout}s on {enroll_path} vs {probe_path}") from exc
        except OSError as exc:
            raise MatcherError(f"cannot run matcher {argv[0]!r}: {exc}") from exc
        if done.returncode != 0:
            raise MatcherError(
                f"matcher exited with status {done.returncode} on {enroll_path} vs {probe_path}: {done.stderr.strip()[:200]}"
            )
        return parse_score(done.stdout)

    def score(self, a: Impression, b: Impression) -> float:
        try:
            return self.score_paths(self._path(a), self._path(b))
        except MatcherError as exc:
            raise MatcherError(f"{a.label} vs {b.label}: {exc}") from exc


def parse_score(text: str) -> float:
    m = _NUMBER.match(text)
    if not m:
        raise MatcherError(f"matcher output is not a single number: {text.strip()[:80]!r}")
    value = float(m.group(1))
    if not math.isfinite(value):
        raise MatcherError(f"matcher returned a non-finite score {value}")
    return value


def external_match(template: str, path_a, path_b, timeout_s: float = 30.0) -> float:
    return ExternalMatcher(template, timeout_s).score_paths(str(path_a), str(path_b))


def make_matcher(spec: str, timeout_s: float = 30.0):
    """``builtin`` or ``cmd:<command template>``."""
    if spec == "builtin":
        return BaselineMatcher()
    if spec.startswith("cmd:"):
        return ExternalMatcher(spec[4:], timeout_s)
    raise ValueError(f"unknown matcher {spec!r}; use 'builtin' or 'cmd:<command>'")


# --- scoring --------------------------------------------------------------------------


def score_pairs(
    enroll: ImpressionSet,
    probe: ImpressionSet,
    matcher,
    include_identical: bool = False,
    workers: int = 1,
) -> tuple[np.ndarray, np.ndarray]:
    """Score every enroll x probe pair once and split by target identity.

    Scores come out in lexicographic (enroll target, index, probe target,
    index) order.  Pairs of one capture with itself are skipped unless
    ``include_identical``.
    """
    if not len(enroll) or not len(probe):
        raise ValueError("impression sets must be non-empty")
    plan = []
    for e in enroll.entries:
        row = [p for p in probe.entries if include_identical or not e.same_capture(p)]
        plan.append((e, row))

    if hasattr(matcher, "score_many"):
        rows = [matcher.score_many(e, row) if row else np.zeros(0) for e, row in plan]
    else:
        pairs = [(e, p) for e, row in plan for p in row]

        def one(pair):
            return matcher.score(*pair)

        if workers > 1:
            with ThreadPoolExecutor(max_workers=workers) as pool:
                flat = list(pool.map(one, pairs))
        else:
            flat = [one(pr) for pr in pairs]
        rows, k = [], 0
        for _, row in plan:
            rows.append(np.asarray(flat[k : k + len(row)], dtype=np.float64))
            k += len(row)

    genuine, imposter = [], []
    for (e, row), scores in zip(plan, rows):
        for p, s in zip(row, scores):
            s = float(s)
            if not math.isfinite(s):
                raise MatcherError(f"non-finite score for {e.label} vs {p.label}")
            (genuine if p.target_id == e.target_id else imposter).append(s)
    return np.asarray(genuine), np.asarray(imposter)


def tar_far(genuine, imposter, threshold: float) -> tuple[float, float]:
    """Fractions of genuine and imposter scores at or above the threshold."""
    g = np.asarray(genuine, dtype=np.float64)
    i = np.asarray(imposter, dtype=np.float64)
    if not g.size or not i.size:
        raise ValueError("genuine and imposter score lists must be non-empty")
    return float(np.count_nonzero(g >= threshold) / g.size), float(np.count_nonzero(i >= threshold) / i.size)


@dataclass
class CellStats:
    enroll_reader: str
    probe_reader: str
    genuine: np.ndarray
    imposter: np.ndarray
    threshold: float

    @property
    def mu_genuine(self) -> float:
        return float(self.genuine.mean())

    @property
    def mu_imposter(self) -> float:
        return float(self.imposter.mean())

    @property
    def tar(self) -> float:
        return tar_far(self.genuine, self.imposter, self.threshold)[0]

    @property
    def far(self) -> float:
        return tar_far(self.genuine, self.imposter, self.threshold)[1]


@dataclass
class ScoreMatrix:
    readers: list[str]
    cells: dict[tuple[str, str], CellStats]
    threshold: float

    def cell(self, enroll: str, probe: str) -> CellStats:
        return self.cells[(enroll, probe)]


def build_score_matrix(
    sets: list[ImpressionSet],
    matcher,
    threshold: float = INNOVATRICS_THRESHOLD,
    include_identical: bool = False,
    workers: int = 1,
) -> ScoreMatrix:
    """Every reader as enrollment against every reader as probe."""
    by_reader = {s.reader_id: s for s in sets}
    readers = sorted(by_reader)
    cells = {}
    for er in readers:
        for pr in readers:
            g, i = score_pairs(by_reader[er], by_reader[pr], matcher, include_identical, workers)
            cells[(er, pr)] = CellStats(er, pr, g, i, threshold)
    return ScoreMatrix(readers, cells, threshold)


@dataclass
class ReferenceStats:
    reader_id: str
    target_id: str
    mean: float
    std: float
    count: int


def reference_scores(impressions: ImpressionSet, references: dict[str, Impression], matcher) -> list[ReferenceStats]:
    """Score each impression against the source image of its target.

    This is the reproducibility check: impressions of a cast target should
    match the print it was made from well above the operating threshold.
    """
    out = []
    for target in impressions.targets:
        if target not in references:
            raise ValueError(f"no reference image for target {target!r}")
        ref = references[target]
        scores = np.array([matcher.score(ref, e) for e in impressions.entries if e.target_id == target])
        out.append(ReferenceStats(impressions.reader_id, target, float(scores.mean()), float(scores.std()), len(scores)))
    return out


# --- reports --------------------------------------------------------------------------

REPORT_COLUMNS = (
    "enroll_reader",
    "probe_reader",
    "mu_genuine",
    "mu_imposter",
    "tar_pct",
    "far_pct",
    "n_genuine",
    "n_imposter",
    "threshold",
)


def interop_csv(matrix: ScoreMatrix) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(REPORT_COLUMNS)
    for er in matrix.readers:
        for pr in matrix.readers:
            c = matrix.cell(er, pr)
            w.writerow([
                er,
                pr,
                f"{c.mu_genuine:.2f}",
                f"{c.mu_imposter:.2f}",
                f"{100 * c.tar:.2f}",
                f"{100 * c.far:.2f}",
                c.genuine.size,
                c.imposter.size,
                f"{matrix.threshold:g}",
            ])
    return buf.getvalue()


def read_interop_csv(text: str) -> list[dict]:
    rows = list(csv.DictReader(io.StringIO(text)))
    for r in rows:
        for k in ("mu_genuine", "mu_imposter", "tar_pct", "far_pct", "threshold"):
            r[k] = float(r[k])
        for k in ("n_genuine", "n_imposter"):
            r[k] = int(r[k])
    return rows


def interop_table(matrix: ScoreMatrix) -> str:
    """Enrollment readers down, probe readers across; two lines per cell."""
    width = max([24] + [len(r) + 2 for r in matrix.readers])
    col0 = max([len("enroll \\ probe")] + [len(r) for r in matrix.readers]) + 2
    out = ["enroll \\ probe".ljust(col0) + "".join(r.center(width) for r in matrix.readers)]
    for er in matrix.readers:
        top, bottom = [], []
        for pr in matrix.readers:
            c = matrix.cell(er, pr)
            top.append(f"uG={c.mu_genuine:.2f} uI={c.mu_imposter:.2f}".center(width))
            bottom.append(f"TAR={100 * c.tar:.2f}% FAR={100 * c.far:.2f}%".center(width))
        out.append(er.ljust(col0) + "".join(top))
        out.append("".ljust(col0) + "".join(bottom))
    out.append(f"threshold: {matrix.threshold:g}")
    return "\n".join(out) + "\n"


# --- manifests ------------------------------------------------------------------------


def load_impression_sets(source) -> list[ImpressionSet]:
    """Read impressions from a CSV manifest or a ``<reader>/<target>/<index>.pgm`` tree.

    Manifest columns: ``reader_id, target_id, index, path``; relative paths
    resolve against the manifest's directory.
    """
    source = Path(source)
    grouped: dict[str, list[Impression]] = {}
    if source.is_dir():
        for f in sorted(source.glob("*/*/*")):
            if f.suffix.lower() not in (".pgm", ".png"):
                continue
            try:
                index = int(f.stem)
            except ValueError as exc:
                raise FormatError(f"{f}: impression file name must be an integer index") from exc
            reader, target = f.parent.parent.name, f.parent.name
            grouped.setdefault(reader, []).append(Impression(reader, target, index, path=f))
    else:
        with open(source, newline="") as fh:
            reader_csv = csv.DictReader(fh)
            need = {"reader_id", "target_id", "index", "path"}
            if not reader_csv.fieldnames or not need <= set(reader_csv.fieldnames):
                raise FormatError(f"{source}: manifest needs columns {sorted(need)}")
            for line, row in enumerate(reader_csv, 2):
                try:
                    index = int(row["index"])
                except ValueError as exc:
                    raise FormatError(f"{source}:{line}: bad index {row['index']!r}") from exc
                p = Path(row["path"])
                if not p.is_absolute():
                    p = source.parent / p
                grouped.setdefault(row["reader_id"], []).append(Impression(row["reader_id"], row["target_id"], index, path=p))
    if not grouped:
        raise FormatError(f"{source}: no impressions found")
    return [ImpressionSet(r, entries) for r, entries in sorted(grouped.items())]
