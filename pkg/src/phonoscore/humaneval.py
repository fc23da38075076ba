"""Rating-study protocol: list construction, rater filtering, aggregation,
and the correlation statistics that relate metric scores to human ratings.
"""

from __future__ import annotations

import csv
import math
import random
import statistics
from dataclasses import dataclass, field

from scipy.special import betainc

from .core import DataError

CONTROL_POLARITIES = ("good", "bad", "none")


@dataclass(frozen=True)
class RatingScale:
    name: str
    min: int
    max: int

    def __post_init__(self) -> None:
        if self.min >= self.max:
            raise DataError(f"scale {self.name}: min must be below max")

    def contains(self, value: int) -> bool:
        return self.min <= value <= self.max


SCALES = {
    "overall": RatingScale("overall", 1, 7),
    "actions": RatingScale("actions", 1, 4),
    "objects": RatingScale("objects", 1, 4),
}


def get_scale(name: str) -> RatingScale:
    try:
        return SCALES[name]
    except KeyError:
        raise DataError(f"unknown rating scale {name!r}") from None


@dataclass(frozen=True)
class ListItem:
    image_id: str
    caption: str
    is_control: bool = False
    control_polarity: str = "none"

    def __post_init__(self) -> None:
        if self.control_polarity not in CONTROL_POLARITIES:
            raise DataError(f"bad control polarity {self.control_polarity!r}")
        if self.is_control != (self.control_polarity != "none"):
            raise DataError("control flag and polarity disagree")


@dataclass(frozen=True)
class EvalList:
    list_id: str
    items: tuple[ListItem, ...]

    def __post_init__(self) -> None:
        polarities = [it.control_polarity for it in self.items if it.is_control]
        if sorted(polarities) != ["bad", "good"]:
            raise DataError(
                f"list {self.list_id}: needs exactly one good and one bad control"
            )
        ids = [it.image_id for it in self.items]
        if len(set(ids)) != len(ids):
            raise DataError(f"list {self.list_id}: duplicate image ids")

    def image_ids(self) -> tuple[str, ...]:
        return tuple(it.image_id for it in self.items)

    def control(self, polarity: str) -> ListItem:
        for item in self.items:
            if item.control_polarity == polarity:
                return item
        raise DataError(f"list {self.list_id}: no {polarity} control")


@dataclass(frozen=True)
class RatingRecord:
    rater_id: str
    list_id: str
    image_id: str
    scale: str
    value: int
    is_control: bool = False
    control_polarity: str = "none"

    def __post_init__(self) -> None:
        if not self.rater_id or not self.list_id or not self.image_id:
            raise DataError("rating record with empty identifier field")
        scale = get_scale(self.scale)
        if not scale.contains(self.value):
            raise DataError(
                f"rating {self.value} outside scale {self.scale} "
                f"[{scale.min}, {scale.max}]"
            )


@dataclass(frozen=True)
class FilterPolicy:
    good_min: int
    bad_max: int

    def __post_init__(self) -> None:
        if self.good_min <= self.bad_max:
            raise DataError("good_min must exceed bad_max")


# 7-point scale: accept good >= 5 and bad <= 3; 4-point: good >= 3, bad <= 2.
DEFAULT_POLICIES = {
    "overall": FilterPolicy(5, 3),
    "actions": FilterPolicy(3, 2),
    "objects": FilterPolicy(3, 2),
}


@dataclass(frozen=True)
class CorrelationResult:
    r: float
    p: float
    n: int


@dataclass(frozen=True)
class RatingSummary:
    scale: str
    per_image: dict[str, tuple[float, int]] = field(hash=False)
    mean: float = 0.0
    sd: float = 0.0
    n_ratings: int = 0

    def means(self) -> dict[str, float]:
        return {image: mean for image, (mean, _) in self.per_image.items()}


@dataclass(frozen=True)
class TypeTokenStats:
    types: int
    tokens: int
    ratio: float


def make_lists(pairs, n_lists: int, list_size: int, controls, seed: int) -> list[EvalList]:
    """Partition (image_id, caption) pairs into rating lists.

    The partition is a seeded shuffle, so the same seed reproduces the
    same lists. Both controls (one good, one bad) are inserted into every
    list at seeded random positions.
    """
    pairs = list(pairs)
    if n_lists < 1 or list_size < 1:
        raise DataError("n_lists and list_size must be >= 1")
    extra = len(pairs) - n_lists * list_size
    if extra != 0:
        raise DataError(
            f"cannot split {len(pairs)} pairs into {n_lists} lists of "
            f"{list_size} (remainder {extra})"
        )
    good, bad = controls
    test_ids = {image_id for image_id, _ in pairs}
    for image_id, _ in (good, bad):
        if image_id in test_ids:
            raise DataError(f"control image {image_id} is also a test item")
    if good[0] == bad[0]:
        raise DataError("good and bad controls must use different images")

    rng = random.Random(seed)
    shuffled = pairs[:]
    rng.shuffle(shuffled)
    width = max(2, len(str(n_lists)))
    lists = []
    for k in range(n_lists):
        chunk = shuffled[k * list_size : (k + 1) * list_size]
        items = [ListItem(image_id, caption) for image_id, caption in chunk]
        items.insert(rng.randrange(len(items) + 1), ListItem(good[0], good[1], True, "good"))
        items.insert(rng.randrange(len(items) + 1), ListItem(bad[0], bad[1], True, "bad"))
        lists.append(EvalList(f"list_{k + 1:0{width}d}", tuple(items)))
    return lists


def filter_raters(ratings, lists, policies=None):
    """Split (rater, list) submissions into accepted and rejected sets.

    Acceptance looks only at completeness and the two control ratings:
    the good control must reach good_min and the bad control must not
    exceed bad_max for the submission's scale. Test-item values never
    influence the decision. Returns (accepted, rejected-with-reasons).
    """
    policies = policies or DEFAULT_POLICIES
    by_list = {el.list_id: el for el in lists}
    submissions: dict[tuple[str, str], dict[str, int]] = {}
    scales: dict[tuple[str, str], str] = {}
    for rec in ratings:
        eval_list = by_list.get(rec.list_id)
        if eval_list is None:
            raise DataError(f"rating references unknown list {rec.list_id!r}")
        if rec.image_id not in eval_list.image_ids():
            raise DataError(
                f"rating for unknown image {rec.image_id!r} in list {rec.list_id}"
            )
        key = (rec.rater_id, rec.list_id)
        sub = submissions.setdefault(key, {})
        if rec.image_id in sub:
            raise DataError(
                f"duplicate rating for image {rec.image_id!r} by rater "
                f"{rec.rater_id!r} in list {rec.list_id}"
            )
        if key in scales and scales[key] != rec.scale:
            raise DataError(f"submission {key} mixes scales")
        scales[key] = rec.scale
        sub[rec.image_id] = rec.value

    accepted: set[tuple[str, str]] = set()
    rejected: dict[tuple[str, str], str] = {}
    for key in sorted(submissions):
        eval_list = by_list[key[1]]
        sub = submissions[key]
        if set(sub) != set(eval_list.image_ids()):
            rejected[key] = "incomplete"
            continue
        scale_name = scales[key]
        policy = policies.get(scale_name)
        if policy is None:
            raise DataError(f"no filter policy for scale {scale_name!r}")
        reasons = []
        if sub[eval_list.control("good").image_id] < policy.good_min:
            reasons.append("good-control too low")
        if sub[eval_list.control("bad").image_id] > policy.bad_max:
            reasons.append("bad-control too high")
        if reasons:
            rejected[key] = "; ".join(reasons)
        else:
            accepted.add(key)
    return accepted, rejected


def select_accepted(ratings, lists, accepted):
    """Test-item records (controls dropped) from accepted submissions."""
    controls = {
        el.list_id: {it.image_id for it in el.items if it.is_control} for el in lists
    }
    out = []
    for rec in ratings:
        if (rec.rater_id, rec.list_id) not in accepted:
            continue
        if rec.image_id in controls.get(rec.list_id, ()):
            continue
        out.append(rec)
    return out


def aggregate_ratings(records, scale: RatingScale) -> RatingSummary:
    """Per-image means plus corpus mean and population standard deviation.

    Expects accepted, non-control records only; the corpus statistics run
    over every individual rating, not over the per-image means.
    """
    values: dict[str, list[int]] = {}
    all_values: list[int] = []
    for rec in records:
        if rec.scale != scale.name:
            raise DataError(
                f"record on scale {rec.scale!r} mixed into {scale.name!r} aggregation"
            )
        values.setdefault(rec.image_id, []).append(rec.value)
        all_values.append(rec.value)
    if not all_values:
        raise DataError(f"no ratings to aggregate on scale {scale.name!r}")
    per_image = {
        image: (sum(vals) / len(vals), len(vals)) for image, vals in values.items()
    }
    return RatingSummary(
        scale.name,
        per_image,
        statistics.fmean(all_values),
        statistics.pstdev(all_values),
        len(all_values),
    )


def pearson_p_value(r: float, n: int) -> float:
    """Two-tailed significance of r under the null of no correlation.

    The t statistic r*sqrt((n-2)/(1-r^2)) has a Student t distribution
    with n-2 degrees of freedom; its two-tailed tail mass equals a
    regularized incomplete beta value.
    """
    if n < 3:
        raise DataError("p-value needs n >= 3")
    if not -1.0 <= r <= 1.0:
        raise DataError("correlation out of [-1, 1]")
    if abs(r) == 1.0:
        return 0.0
    df = n - 2
    t_squared = r * r * df / (1.0 - r * r)
    return float(betainc(df / 2.0, 0.5, df / (df + t_squared)))


def pearson(x, y) -> CorrelationResult:
    """Pearson correlation with two-tailed p-value."""
    x = list(x)
    y = list(y)
    if len(x) != len(y):
        raise DataError("series lengths differ")
    n = len(x)
    if n < 3:
        raise DataError("need at least 3 observations")
    mean_x = math.fsum(x) / n
    mean_y = math.fsum(y) / n
    dx = [v - mean_x for v in x]
    dy = [v - mean_y for v in y]
    sxy = math.fsum(a * b for a, b in zip(dx, dy))
    sxx = math.fsum(a * a for a in dx)
    syy = math.fsum(b * b for b in dy)
    if sxx == 0.0 or syy == 0.0:
        raise DataError("zero variance")
    if sxy * sxy == sxx * syy:
        r = math.copysign(1.0, sxy)
    else:
        r = sxy / math.sqrt(sxx * syy)
        r = max(-1.0, min(1.0, r))
    return CorrelationResult(r, pearson_p_value(r, n), n)


def correlate_metric_with_ratings(per_caption_scores, per_image_ratings) -> CorrelationResult:
    """Correlate metric scores with rating means over the shared images."""
    shared = sorted(set(per_caption_scores) & set(per_image_ratings))
    if len(shared) < 3:
        raise DataError(
            f"only {len(shared)} image(s) shared between scores and ratings; need >= 3"
        )
    return pearson(
        [per_caption_scores[i] for i in shared],
        [per_image_ratings[i] for i in shared],
    )


def type_token_ratio(decodings) -> TypeTokenStats:
    """Distinct words over total word tokens; OOV tokens do not count."""
    types: set[str] = set()
    tokens = 0
    for dec in decodings:
        for seg in dec.segments:
            if seg.is_oov:
                continue
            types.add(seg.token)
            tokens += 1
    if tokens == 0:
        raise DataError("no lexicon-word tokens to count")
    return TypeTokenStats(len(types), tokens, len(types) / tokens)


# ---------------------------------------------------------------------------
# File formats

RATINGS_HEADER = (
    "rater_id", "list_id", "image_id", "scale", "value", "is_control",
    "control_polarity",
)


def write_ratings_file(path, records) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(RATINGS_HEADER)
        for rec in records:
            writer.writerow(_rating_row(rec))


def append_ratings(path, records) -> None:
    """Append records, writing the header first if the file is new or empty."""
    records = list(records)
    try:
        needs_header = not open(path, encoding="utf-8").readline()
    except FileNotFoundError:
        needs_header = True
    with open(path, "a", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        if needs_header:
            writer.writerow(RATINGS_HEADER)
        for rec in records:
            writer.writerow(_rating_row(rec))


def _rating_row(rec: RatingRecord):
    return (
        rec.rater_id, rec.list_id, rec.image_id, rec.scale, str(rec.value),
        "true" if rec.is_control else "false", rec.control_polarity,
    )


def parse_ratings_file(path) -> list[RatingRecord]:
    records = []
    with open(path, encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None:
            raise DataError(f"{path}: empty ratings file")
        if tuple(header) != RATINGS_HEADER:
            raise DataError(f"{path}: unexpected ratings header {header}")
        for lineno, row in enumerate(reader, start=2):
            if not row:
                continue
            if len(row) != len(RATINGS_HEADER):
                raise DataError(f"{path}: malformed row at line {lineno}")
            rater_id, list_id, image_id, scale, value, is_control, polarity = row
            try:
                value_int = int(value)
            except ValueError:
                raise DataError(f"{path}: non-integer value at line {lineno}") from None
            if is_control not in ("true", "false"):
                raise DataError(f"{path}: bad is_control flag at line {lineno}")
            records.append(
                RatingRecord(
                    rater_id, list_id, image_id, scale, value_int,
                    is_control == "true", polarity,
                )
            )
    return records


def write_list_file(path, eval_list: EvalList) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(f"list_id: {eval_list.list_id}\n")
        fh.write("index\timage_id\tcaption\tis_control\tcontrol_polarity\n")
        for idx, item in enumerate(eval_list.items):
            if "\t" in item.caption or "\n" in item.caption:
                raise DataError(f"caption for {item.image_id} contains tab or newline")
            fh.write(
                f"{idx}\t{item.image_id}\t{item.caption}\t"
                f"{'true' if item.is_control else 'false'}\t{item.control_polarity}\n"
            )


def read_list_file(path) -> EvalList:
    with open(path, encoding="utf-8") as fh:
        lines = fh.read().splitlines()
    if not lines or not lines[0].startswith("list_id: "):
        raise DataError(f"{path}: missing list_id line")
    list_id = lines[0][len("list_id: "):].strip()
    items = []
    for line in lines[2:]:
        if not line.strip():
            continue
        fields = line.split("\t")
        if len(fields) != 5:
            raise DataError(f"{path}: malformed item line {line!r}")
        _, image_id, caption, is_control, polarity = fields
        items.append(ListItem(image_id, caption, is_control == "true", polarity))
    return EvalList(list_id, tuple(items))


def write_lists_dir(outdir, lists) -> None:
    """One file per list plus a manifest; byte-stable for a given input."""
    import os

    os.makedirs(outdir, exist_ok=True)
    with open(os.path.join(outdir, "manifest.tsv"), "w", encoding="utf-8") as fh:
        fh.write("list_id\tfile\titems\tcontrols\n")
        for eval_list in lists:
            filename = f"{eval_list.list_id}.tsv"
            write_list_file(os.path.join(outdir, filename), eval_list)
            n_controls = sum(1 for it in eval_list.items if it.is_control)
            fh.write(f"{eval_list.list_id}\t{filename}\t{len(eval_list.items)}\t{n_controls}\n")


def read_lists_dir(indir) -> list[EvalList]:
    import os

    manifest = os.path.join(indir, "manifest.tsv")
    lists = []
    with open(manifest, encoding="utf-8") as fh:
        next(fh)
        for line in fh:
            if not line.strip():
                continue
            _, filename, _, _ = line.rstrip("\n").split("\t")
            lists.append(read_list_file(os.path.join(indir, filename)))
    return lists


def parse_pairs_file(path) -> list[tuple[str, str]]:
    """Read (image_id, caption text) lines: id, tab, free-text caption."""
    pairs = []
    with open(path, encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.rstrip("\r\n")
            if not line.strip():
                continue
            if "\t" not in line:
                raise DataError(f"{path}: missing tab separator at line {lineno}")
            image_id, _, caption = line.partition("\t")
            if not image_id.strip() or not caption.strip():
                raise DataError(f"{path}: empty field at line {lineno}")
            pairs.append((image_id.strip(), caption.strip()))
    return pairs
