"""Command-line surface: score, decode, lists, correlate, serve."""

from __future__ import annotations

import argparse
import sys

from . import __version__
from .core import (
    DataError,
    Inventory,
    group_pairs,
    load_inventory,
    parse_caption_file,
    parse_lexicon,
)
from .humaneval import (
    DEFAULT_POLICIES,
    FilterPolicy,
    SCALES,
    aggregate_ratings,
    correlate_metric_with_ratings,
    filter_raters,
    make_lists,
    parse_pairs_file,
    parse_ratings_file,
    read_lists_dir,
    select_accepted,
    type_token_ratio,
    write_lists_dir,
)
from .lexdecode import build_decoder, decode_corpus, format_decoded_line
from .metrics import AGGREGATION_MODES, ALL_METRICS, score_pairs
from .report import Report, atomic_write_text, sha256_file, timestamp

SCALE_ORDER = ("overall", "actions", "objects")


def _fmt(value: float) -> str:
    return f"{value:.6f}"


def _fmt_p(value: float) -> str:
    return f"{value:.6e}"


def _load_inventory(args) -> Inventory:
    if getattr(args, "inventory", None):
        return load_inventory(args.inventory)
    return Inventory.default()


def _base_report(command: str, inputs: dict[str, str], meta: dict[str, str]) -> Report:
    report = Report(command)
    report.meta["tool_version"] = __version__
    report.meta["generated_at"] = timestamp()
    report.meta.update(meta)
    table = report.section("inputs", ("name", "path", "sha256"))
    for name, path in inputs.items():
        table.add(name, path, sha256_file(path))
    return report


def cmd_score(args) -> int:
    inventory = _load_inventory(args)
    candidates = parse_caption_file(args.candidates, inventory)
    references = parse_caption_file(args.references, inventory)
    pairs = group_pairs(candidates, references, args.max_references)
    metrics = _parse_metric_list(args.metrics)
    scores = score_pairs(pairs, metrics, args.mode, args.epsilon)

    report = _base_report(
        "score",
        {"candidates": args.candidates, "references": args.references},
        {
            "mode": args.mode,
            "epsilon": repr(args.epsilon),
            "metrics": ",".join(metrics),
            "pairs": str(len(pairs)),
        },
    )
    corpus = report.section("corpus_scores", ("metric", "value", "notes"))
    for name in metrics:
        score = scores[name]
        corpus.add(name, _fmt(score.value), "; ".join(score.notes))
    per_caption = report.section("per_caption", ("image_id", *metrics))
    for pair in pairs:
        per_caption.add(
            pair.image, *(_fmt(scores[name].per_caption[pair.image]) for name in metrics)
        )
    report.write(args.out)
    print(f"wrote score report for {len(pairs)} pairs to {args.out}")
    return 0


def _parse_metric_list(spec: str) -> tuple[str, ...]:
    if spec == "all":
        return ALL_METRICS
    names = tuple(name.strip() for name in spec.split(",") if name.strip())
    if not names:
        raise DataError("no metrics selected")
    unknown = [n for n in names if n not in ALL_METRICS]
    if unknown:
        raise DataError(f"unknown metric(s): {', '.join(unknown)}")
    # keep canonical report order
    return tuple(n for n in ALL_METRICS if n in names)


def cmd_decode(args) -> int:
    inventory = _load_inventory(args)
    lexicon = parse_lexicon(args.lexicon, inventory)
    captions = parse_caption_file(args.input, inventory)
    graph = build_decoder(lexicon, args.base, args.oov_cost)
    results, summary = decode_corpus(graph, captions)

    lines = [format_decoded_line(image_id, dec) for image_id, dec in results]
    atomic_write_text(args.out, "".join(line + "\n" for line in lines))

    report = _base_report(
        "decode",
        {"lexicon": args.lexicon, "input": args.input},
        {"base": repr(args.base), "oov_cost": repr(args.oov_cost)},
    )
    table = report.section("decoder_summary", ("key", "value"))
    table.add("captions", summary.captions)
    table.add("full_sentences", summary.full_sentences)
    table.add("with_oov", summary.with_oov)
    table.add("oov_tokens", summary.oov_tokens)
    ttr_table = report.section("type_token", ("key", "value"))
    try:
        stats = type_token_ratio(dec for _, dec in results)
        ttr_table.add("types", stats.types)
        ttr_table.add("tokens", stats.tokens)
        ttr_table.add("ratio", _fmt(stats.ratio))
    except DataError:
        ttr_table.add("types", 0)
        ttr_table.add("tokens", 0)
        ttr_table.add("ratio", "")
    if args.reference_ratio is not None:
        ttr_table.add("reference_ratio", _fmt(args.reference_ratio))
    if args.summary:
        report.write(args.summary)
    print(
        f"decoded {summary.captions} captions to {args.out}: "
        f"{summary.full_sentences} full sentences, {summary.with_oov} with OOV tokens"
    )
    return 0


def cmd_lists(args) -> int:
    pairs = parse_pairs_file(args.pairs)
    controls = _parse_controls_file(args.controls)
    lists = make_lists(pairs, args.n_lists, args.list_size, controls, args.seed)
    write_lists_dir(args.out_dir, lists)
    print(f"wrote {len(lists)} lists of {len(lists[0].items)} items to {args.out_dir}")
    return 0


def _parse_controls_file(path) -> tuple[tuple[str, str], tuple[str, str]]:
    controls: dict[str, tuple[str, str]] = {}
    with open(path, encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.rstrip("\r\n")
            if not line.strip():
                continue
            fields = line.split("\t")
            if len(fields) != 3 or fields[0] not in ("good", "bad"):
                raise DataError(
                    f"{path}: expected 'good|bad<TAB>image_id<TAB>caption' at line {lineno}"
                )
            polarity, image_id, caption = fields
            if polarity in controls:
                raise DataError(f"{path}: duplicate {polarity} control at line {lineno}")
            controls[polarity] = (image_id, caption)
    if set(controls) != {"good", "bad"}:
        raise DataError(f"{path}: needs exactly one good and one bad control")
    return controls["good"], controls["bad"]


def _parse_policies(specs) -> dict[str, FilterPolicy]:
    policies = dict(DEFAULT_POLICIES)
    for spec in specs or ():
        try:
            scale, _, bounds = spec.partition("=")
            good_min, bad_max = bounds.split(":")
            policies[scale] = FilterPolicy(int(good_min), int(bad_max))
        except ValueError as exc:
            raise DataError(f"bad policy {spec!r}: use scale=good_min:bad_max") from exc
        if scale not in SCALES:
            raise DataError(f"bad policy {spec!r}: unknown scale {scale!r}")
    return policies


def cmd_correlate(args) -> int:
    scores_report = Report.read(args.scores)
    ratings = parse_ratings_file(args.ratings)
    lists = read_lists_dir(args.lists_dir)
    policies = _parse_policies(args.policy)

    accepted, rejected = filter_raters(ratings, lists, policies)
    if not accepted:
        raise DataError("no accepted submissions")
    test_records = select_accepted(ratings, lists, accepted)
    summaries = {}
    for scale_name in SCALE_ORDER:
        scale_records = [r for r in test_records if r.scale == scale_name]
        if scale_records:
            summaries[scale_name] = aggregate_ratings(scale_records, SCALES[scale_name])

    if not summaries:
        raise DataError("accepted submissions contain no test-item ratings")

    per_caption = scores_report.sections.get("per_caption")
    corpus = scores_report.sections.get("corpus_scores")
    if per_caption is None or corpus is None:
        raise DataError(f"{args.scores}: not a score report")
    metric_names = list(per_caption.columns[1:])
    images = per_caption.column("image_id")
    metric_scores = {
        name: {
            image: float(value)
            for image, value in zip(images, per_caption.column(name))
        }
        for name in metric_names
    }
    corpus_values = dict(zip(corpus.column("metric"), corpus.column("value")))

    report = _base_report(
        "correlate",
        {"scores": args.scores, "ratings": args.ratings},
        {
            "accepted_submissions": str(len(accepted)),
            "rejected_submissions": str(len(rejected)),
            "scales": ",".join(summaries),
            "sd_definition": "population",
        },
    )
    scale_table = report.section(
        "rating_summary", ("scale", "mean", "sd", "ratings", "images")
    )
    for scale_name, summary in summaries.items():
        scale_table.add(
            scale_name, _fmt(summary.mean), _fmt(summary.sd),
            summary.n_ratings, len(summary.per_image),
        )
    rejected_table = report.section("rejected", ("rater_id", "list_id", "reason"))
    for (rater_id, list_id), reason in sorted(rejected.items()):
        rejected_table.add(rater_id, list_id, reason)

    columns = ["metric", "score"]
    for scale_name in SCALE_ORDER:
        suffix = "" if scale_name == "overall" else f"_{scale_name}"
        columns += [f"r{suffix}", f"p{suffix}", f"n{suffix}"]
    table = report.section("correlations", tuple(columns))

    overall = summaries.get("overall")
    human_row = ["human", _fmt(overall.mean) if overall else ""]
    for scale_name in SCALE_ORDER:
        if scale_name == "overall" or overall is None or scale_name not in summaries:
            human_row += ["", "", ""]
            continue
        result = correlate_metric_with_ratings(
            summaries[scale_name].means(), overall.means()
        )
        human_row += [_fmt(result.r), _fmt_p(result.p), str(result.n)]
    table.add(*human_row)

    for name in metric_names:
        row = [name, corpus_values.get(name, "")]
        for scale_name in SCALE_ORDER:
            summary = summaries.get(scale_name)
            if summary is None:
                row += ["", "", ""]
                continue
            result = correlate_metric_with_ratings(metric_scores[name], summary.means())
            row += [_fmt(result.r), _fmt_p(result.p), str(result.n)]
        table.add(*row)

    report.write(args.out)
    print(
        f"correlated {len(metric_names)} metrics against {len(summaries)} rating "
        f"scale(s); report written to {args.out}"
    )
    return 0


def cmd_serve(args) -> int:
    from .service import RatingService, run_server

    lists = read_lists_dir(args.lists_dir)
    service = RatingService(
        lists,
        args.ratings,
        images_dir=args.images_dir,
        examples_path=args.examples,
    )
    run_server(service, args.host, args.port, static_dir=args.static)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="phonoscore",
        description="Score phoneme captions, decode them to words, and run rating studies.",
    )
    parser.add_argument("--version", action="version", version=f"phonoscore {__version__}")
    sub = parser.add_subparsers(dest="subcommand", required=True)

    p = sub.add_parser("score", help="compute caption metrics over a corpus")
    p.add_argument("--candidates", required=True)
    p.add_argument("--references", required=True)
    p.add_argument("--metrics", default="all", help="comma-separated metric names or 'all'")
    p.add_argument("--mode", choices=AGGREGATION_MODES, default="multi_ref")
    p.add_argument("--epsilon", type=float, default=1e-9)
    p.add_argument("--max-references", type=int, default=5, dest="max_references")
    p.add_argument("--inventory")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_score)

    p = sub.add_parser("decode", help="convert phoneme captions to word sentences")
    p.add_argument("--lexicon", required=True)
    p.add_argument("--input", required=True)
    p.add_argument("--base", type=float, default=2.0)
    p.add_argument("--oov-cost", type=float, default=10.0, dest="oov_cost")
    p.add_argument("--inventory")
    p.add_argument("--reference-ratio", type=float, default=None, dest="reference_ratio",
                   help="known type/token ratio of the reference corpus, stored as annotation")
    p.add_argument("--out", required=True)
    p.add_argument("--summary", help="optional path for the decode summary report")
    p.set_defaults(func=cmd_decode)

    p = sub.add_parser("lists", help="partition caption pairs into rating lists")
    p.add_argument("--pairs", required=True)
    p.add_argument("--n-lists", type=int, required=True, dest="n_lists")
    p.add_argument("--list-size", type=int, required=True, dest="list_size")
    p.add_argument("--controls", required=True)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--out-dir", required=True, dest="out_dir")
    p.set_defaults(func=cmd_lists)

    p = sub.add_parser("correlate", help="correlate metric scores with collected ratings")
    p.add_argument("--scores", required=True, help="report produced by the score command")
    p.add_argument("--ratings", required=True)
    p.add_argument("--lists-dir", required=True, dest="lists_dir")
    p.add_argument("--policy", action="append",
                   help="filter policy override, e.g. overall=5:3 (repeatable)")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_correlate)

    p = sub.add_parser("serve", help="serve rating lists and collect submissions")
    p.add_argument("--lists-dir", required=True, dest="lists_dir")
    p.add_argument("--ratings", required=True, help="append-only ratings store (CSV)")
    p.add_argument("--images-dir", dest="images_dir")
    p.add_argument("--examples", help="instruction example pairs file")
    p.add_argument("--static", help="directory with the rating UI build to serve at /")
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=8321)
    p.set_defaults(func=cmd_serve)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except DataError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except FileNotFoundError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
