"""Input parsing, toned-pinyin validation, and synthetic dataset generation.

Two file formats are understood: a counts CSV ("label,count" per line, '#'
comments, optional "syllable,count" header) and a pairs TSV
("character<TAB>toned_pinyin" per line, one pronunciation per line).
The module also builds the bundled synthetic fixture that reproduces every
published statistic of the toned-syllable dataset, and generates datasets
from any fitted model for round-trip testing.
"""

from __future__ import annotations

import importlib.resources
from dataclasses import dataclass

import numpy as np

from .errors import DataError, FixtureError, ParseError, PinyinError
from .fit import BetaParams, ModelFamily, Params, model_values

STRICT_TONES = frozenset({1, 2, 3, 4})
NEUTRAL_TONES = frozenset({0, 5})
MAX_BASE_LEN = 7

_COUNTS_HEADER = "syllable,count"

# the fifteen most polymorphous toned syllables with their character counts
TOP15 = (
    ("yi4", 83),
    ("xi1", 76),
    ("bi4", 58),
    ("yu4", 57),
    ("fu2", 52),
    ("zhi4", 50),
    ("ji4", 48),
    ("li4", 47),
    ("yu2", 45),
    ("ji1", 43),
    ("qi2", 39),
    ("shi4", 39),
    ("jue2", 36),
    ("ji2", 34),
    ("hui4", 34),
)

# Beta rank curve fitted to the real dataset; shapes the fixture's middle
FIXTURE_BETA = BetaParams(C=5.95e-6, a=0.324, b=1.025)


@dataclass(frozen=True)
class PinyinSyllable:
    """A validated toned syllable; canonical text form is base + tone digit."""

    base: str
    tone: int

    @property
    def canonical(self) -> str:
        return f"{self.base}{self.tone}"


_BASE_INVENTORY: frozenset[str] | None = None


def base_inventory() -> frozenset[str]:
    """The bundled set of standard base syllables (lazy-loaded)."""
    global _BASE_INVENTORY
    if _BASE_INVENTORY is None:
        text = (
            importlib.resources.files("rankspec.data")
            .joinpath("base_syllables.txt")
            .read_text(encoding="utf-8")
        )
        _BASE_INVENTORY = frozenset(
            line.strip()
            for line in text.splitlines()
            if line.strip() and not line.startswith("#")
        )
    return _BASE_INVENTORY


def validate_pinyin(token: str, strict: bool = False) -> PinyinSyllable:
    """Check a toned-pinyin token like "hao3".

    The default mode is purely syntactic: lowercase letters (with "v" or
    "u:" for the umlauted u) followed by one tone digit.  Tones 1-4 are
    always accepted; the neutral tone (0 or 5) only outside strict mode.
    Strict mode additionally requires the base to be in the bundled
    inventory of standard syllables.
    """
    if not token:
        raise PinyinError("empty token")
    if not token[-1].isdigit():
        raise PinyinError(f"{token!r}: missing tone digit")
    base, tone = token[:-1], int(token[-1])
    if any(ch.isdigit() for ch in base):
        raise PinyinError(f"{token!r}: more than one tone digit")
    allowed = STRICT_TONES if strict else STRICT_TONES | NEUTRAL_TONES
    if tone not in allowed:
        raise PinyinError(f"{token!r}: tone digit out of range")
    base = base.replace("u:", "v")
    if not base:
        raise PinyinError(f"{token!r}: empty base syllable")
    if not all("a" <= ch <= "z" for ch in base):
        raise PinyinError(f"{token!r}: base must be lowercase letters")
    if len(base) > MAX_BASE_LEN:
        raise PinyinError(f"{token!r}: base longer than {MAX_BASE_LEN} letters")
    if strict and base not in base_inventory():
        raise PinyinError(f"{token!r}: unknown base syllable {base!r}")
    return PinyinSyllable(base=base, tone=tone)


def parse_counts_file(content: bytes) -> list[tuple[str, int]]:
    """Parse "label,count" lines; '#' comments, blanks, and an optional
    "syllable,count" header are ignored."""
    try:
        text = content.decode("utf-8")
    except UnicodeDecodeError as exc:
        raise ParseError(f"not valid UTF-8: {exc}") from exc
    pairs: list[tuple[str, int]] = []
    seen: set[str] = set()
    saw_data = False
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if not saw_data and line == _COUNTS_HEADER:
            saw_data = True
            continue
        saw_data = True
        label, sep, count_text = line.partition(",")
        label = label.strip()
        count_text = count_text.strip()
        if not sep or not label or not count_text:
            raise ParseError(f"expected 'label,count', got {line!r}", lineno)
        try:
            count = int(count_text)
        except ValueError:
            raise ParseError(f"non-integer count {count_text!r}", lineno) from None
        if label in seen:
            raise ParseError(f"duplicate label {label!r}", lineno)
        seen.add(label)
        pairs.append((label, count))
    return pairs


def write_counts_file(pairs: list[tuple[str, int]]) -> bytes:
    """Serialize pairs as a counts CSV (header plus LF line endings)."""
    lines = [_COUNTS_HEADER]
    lines.extend(f"{label},{count}" for label, count in pairs)
    return ("\n".join(lines) + "\n").encode("utf-8")


def parse_pairs_file(content: bytes, strict: bool = False) -> list[tuple[str, int]]:
    """Aggregate "character<TAB>pinyin" lines into per-syllable counts.

    Each distinct (character, syllable) pair counts once; exact duplicate
    lines collapse.  Labels are canonical toned pinyin, in first-appearance
    order.
    """
    try:
        text = content.decode("utf-8")
    except UnicodeDecodeError as exc:
        raise ParseError(f"not valid UTF-8: {exc}") from exc
    counts: dict[str, int] = {}
    seen_pairs: set[tuple[str, str]] = set()
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.strip("\r\n")
        if not line.strip():
            continue
        parts = line.split("\t")
        if len(parts) != 2 or not parts[0].strip() or not parts[1].strip():
            raise ParseError(
                f"expected 'character<TAB>pinyin', got {line!r}", lineno
            )
        character = parts[0].strip()
        try:
            syllable = validate_pinyin(parts[1].strip(), strict=strict)
        except PinyinError as exc:
            raise ParseError(str(exc), lineno) from exc
        key = (character, syllable.canonical)
        if key in seen_pairs:
            continue
        seen_pairs.add(key)
        counts[syllable.canonical] = counts.get(syllable.canonical, 0) + 1
    return list(counts.items())


@dataclass(frozen=True)
class FixtureSpec:
    """Constraints for the paper-shaped synthetic dataset."""

    n_syllables: int = 1280
    total_characters: int = 9505
    top15: tuple[tuple[str, int], ...] = TOP15
    singleton_count: int = 203
    median_target: int = 5
    mad_target: int = 3
    seed: int = 1


def _count_classes(counts: np.ndarray, median: int, mad: int):
    below_median = int((counts < median).sum())
    at_most_median = int((counts <= median).sum())
    dev = np.abs(counts - median)
    within_mad = int((dev < mad).sum())
    at_most_mad = int((dev <= mad).sum())
    return below_median, at_most_median, within_mad, at_most_mad


def generate_fixture(spec: FixtureSpec = FixtureSpec()) -> list[tuple[str, int]]:
    """Build the deterministic synthetic dataset pinned to the published numbers.

    The fifteen top pairs are verbatim and singleton_count entries hold count
    one.  The middle counts discretize the published Beta curve (stochastic
    rounding under the seed), clipped to [2, 34], then a deterministic repair
    pass enforces the exact total, median, and MAD.  Raises FixtureError if
    the constraints cannot be met.
    """
    top_sum = sum(count for _, count in spec.top15)
    # middles stay strictly below the smallest top-15 count and above 1
    cap = min(count for _, count in spec.top15) - 1
    middle_n = spec.n_syllables - len(spec.top15) - spec.singleton_count
    middle_total = spec.total_characters - top_sum - spec.singleton_count
    if middle_n < 1 or middle_total < 2 * middle_n or middle_total > cap * middle_n:
        raise FixtureError("middle section cannot reach the requested total")

    ranks = np.arange(len(spec.top15) + 1, len(spec.top15) + middle_n + 1)
    curve = model_values(ModelFamily.BETA, FIXTURE_BETA, spec.n_syllables)
    raw = spec.total_characters * curve[ranks - 1]
    rng = np.random.default_rng(spec.seed)
    base = np.floor(raw)
    mids = (base + (rng.random(middle_n) < (raw - base))).astype(np.int64)
    mids = np.clip(mids, 2, cap)

    fixed = np.concatenate(
        [
            np.array([count for _, count in spec.top15], dtype=np.int64),
            np.ones(spec.singleton_count, dtype=np.int64),
        ]
    )
    half = spec.n_syllables // 2  # median sits across positions half, half+1

    def classes():
        return _count_classes(
            np.concatenate([fixed, mids]), spec.median_target, spec.mad_target
        )

    def shift(value_from: int, value_to: int, amount: int) -> int:
        moved = 0
        for i in range(middle_n):
            if moved == amount:
                break
            if mids[i] == value_from:
                mids[i] = value_to
                moved += 1
        return moved

    med = spec.median_target
    mad = spec.mad_target
    # median: need #(c < med) <= half-1 and #(c <= med) >= half+1
    below, at_most, _, _ = classes()
    if below > half - 1:
        need = below - (half - 1)
        for source in (med - 1, med - 2, med - 3):
            if need <= 0 or source < 2:
                break
            need -= shift(source, med, need)
    below, at_most, _, _ = classes()
    if at_most < half + 1:
        need = (half + 1) - at_most
        for source in (med + 1, med + 2):
            if need <= 0:
                break
            need -= shift(source, med, need)
    # MAD: need #(dev < mad) <= half-1 and #(dev <= mad) >= half+1;
    # edge moves leave the median classes untouched
    _, _, within, at_most_dev = classes()
    if within > half - 1:
        need = within - (half - 1)
        if med - mad >= 2:
            need -= shift(med - mad + 1, med - mad, need)
        if need > 0:
            shift(med + mad - 1, med + mad, need)
    _, _, within, at_most_dev = classes()
    if at_most_dev < half + 1:
        need = (half + 1) - at_most_dev
        shift(med + mad + 1, med + mad, need)

    # exact total via counts far above the sensitive classes
    safe_floor = med + mad + 2
    deficit = middle_total - int(mids.sum())
    while deficit != 0:
        moved = False
        for i in range(middle_n):
            if deficit == 0:
                break
            if deficit > 0 and safe_floor <= mids[i] <= cap - 1:
                mids[i] += 1
                deficit -= 1
                moved = True
            elif deficit < 0 and safe_floor + 1 <= mids[i] <= cap:
                mids[i] -= 1
                deficit += 1
                moved = True
        if not moved:
            raise FixtureError("totals unreachable under the clipping bounds")

    below, at_most, within, at_most_dev = classes()
    ok = (
        below <= half - 1
        and at_most >= half + 1
        and within <= half - 1
        and at_most_dev >= half + 1
        and int(mids.sum()) == middle_total
        and int(mids.min()) >= 2
        and int(mids.max()) <= cap
    )
    if not ok:
        raise FixtureError("repair pass could not satisfy median/MAD targets")

    pairs = list(spec.top15)
    pairs.extend((f"s{rank:04d}", int(count)) for rank, count in zip(ranks, mids))
    first_single = len(spec.top15) + middle_n + 1
    pairs.extend(
        (f"s{rank:04d}", 1)
        for rank in range(first_single, first_single + spec.singleton_count)
    )
    return pairs


def generate_from_model(
    family: ModelFamily,
    params: Params,
    n: int,
    total: int,
    noise: str = "none",
    seed: int = 0,
) -> list[tuple[str, int]]:
    """Counts dataset sampled from a model curve scaled to a target total.

    With noise="none" scaled values round half-up to integers of at least 1;
    with noise="poisson" each scaled value is the mean of a Poisson draw and
    zero draws are dropped.
    """
    if n < 4:
        raise ValueError("n must be >= 4")
    noise = noise.lower()
    if noise not in ("none", "poisson"):
        raise ValueError(f"noise must be 'none' or 'poisson', got {noise!r}")
    values = model_values(family, params, n)
    if (values <= 0).any():
        bad = int(np.argmax(values <= 0)) + 1
        raise DataError(f"model evaluates non-positive at rank {bad}")
    scaled = values * (total / float(values.sum()))
    width = max(4, len(str(n)))
    if noise == "none":
        counts = np.maximum(1, np.floor(scaled + 0.5).astype(np.int64))
        return [(f"s{r:0{width}d}", int(c)) for r, c in enumerate(counts, 1)]
    from .resample import poisson_sample  # deferred: avoids cycle at import

    rng = np.random.default_rng(seed)
    pairs = []
    for r, lam in enumerate(scaled, 1):
        draw = poisson_sample(float(lam), rng)
        if draw > 0:
            pairs.append((f"s{r:0{width}d}", draw))
    return pairs
