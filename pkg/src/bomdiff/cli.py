"""Command-line interface.

Subcommands: inspect, compare, graph, orgs, licenses. Exit codes: 0 success
without differences, 1 success with differences, 2 usage error, 3 parse or
I/O error. Output is byte-reproducible for identical inputs unless
--timestamp is given.
"""

from __future__ import annotations

import argparse
import contextlib
import datetime
import os
import sys
from concurrent.futures import ThreadPoolExecutor

from bomdiff import flatcompare, fuzzy, graphcompare, ingest, report
from bomdiff.flatcompare import FieldSelector
from bomdiff.model import BomFormat

_FIELD_CHOICES = {
    "name": FieldSelector.NAME,
    "purl": FieldSelector.PURL,
    "vendor": FieldSelector.VENDOR,
    "license": FieldSelector.LICENSE,
    "hash": FieldSelector.HASH_DIGEST,
    "org": FieldSelector.ORGANIZATION,
}
_DEFAULT_FIELDS = ("name", "purl", "vendor", "license", "hash", "org")

_FORMAT_CHOICES = {f.value: f for f in BomFormat}

USAGE_ERROR = 2
PARSE_ERROR = 3


def _add_common(p: argparse.ArgumentParser, inputs: int):
    if inputs == 1:
        p.add_argument("file", help="BOM file to read")
    else:
        p.add_argument("left", help="first BOM file")
        p.add_argument("right", help="second BOM file")
    p.add_argument(
        "--format-in",
        choices=sorted(_FORMAT_CHOICES),
        help="input format override (default: detect by content)",
    )
    p.add_argument(
        "--drop-prefix",
        action="append",
        default=[],
        metavar="PREFIX",
        help="drop components whose purl ecosystem equals or name starts "
        "with PREFIX (repeatable)",
    )
    p.add_argument("--no-dedup", action="store_true", help="keep duplicate components")
    p.add_argument(
        "--no-fold", action="store_true", help="keep repeated HBOM rows separate"
    )
    p.add_argument(
        "--timestamp",
        action="store_true",
        help="prepend a generation timestamp (breaks reproducibility)",
    )


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="bomdiff",
        description="Normalize and compare software/hardware bills of materials.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("inspect", help="parse one BOM and print summary counts")
    _add_common(p, inputs=1)

    p = sub.add_parser("compare", help="flat field comparison of two BOMs")
    _add_common(p, inputs=2)
    p.add_argument(
        "--field",
        action="append",
        choices=sorted(_FIELD_CHOICES),
        help="field to compare (repeatable; default: all)",
    )
    p.add_argument("--mode", choices=("list", "set"), default="list")
    p.add_argument("--fuzzy", action="store_true", help="add fuzzy name matching")
    p.add_argument("--threshold", type=float, help="fuzzy score cutoff (0..1)")
    p.add_argument(
        "--exclude-exact",
        action="store_true",
        help="drop equal-name pairs from fuzzy output",
    )
    p.add_argument("--format", choices=("text", "json"), default="text")

    p = sub.add_parser("graph", help="merge two BOM graphs and export")
    _add_common(p, inputs=2)
    p.add_argument("--threshold", type=float, help="fuzzy score cutoff (0..1)")
    p.add_argument("--format", choices=("text", "json", "dot"), default="text")
    p.add_argument("--stats", action="store_true", help="print the stats line only")

    p = sub.add_parser("orgs", help="organization delta between two BOMs")
    _add_common(p, inputs=2)
    p.add_argument(
        "--exclude",
        action="append",
        default=None,
        metavar="PREFIX",
        help="exclude organizations starting with PREFIX "
        "(repeatable; default: the Java standard library namespaces)",
    )
    p.add_argument(
        "--no-default-excludes",
        action="store_true",
        help="start from an empty exclusion list",
    )

    p = sub.add_parser("licenses", help="license comparison with coverage counts")
    _add_common(p, inputs=2)
    p.add_argument("--format", choices=("text", "json"), default="text")

    return parser


def _ingest_options(args) -> ingest.IngestOptions:
    return ingest.IngestOptions(
        dedup=not args.no_dedup,
        fold_quantities=not args.no_fold,
        drop_name_prefixes=tuple(args.drop_prefix),
    )


def _threshold(args) -> float:
    if getattr(args, "threshold", None) is not None:
        return args.threshold
    env = os.environ.get("BOMDIFF_THRESHOLD")
    if env:
        try:
            return float(env)
        except ValueError:
            raise fuzzy.ConfigError(
                f"BOMDIFF_THRESHOLD={env!r} is not a number"
            ) from None
    return 0.85


def _load_two(args, opts) -> tuple:
    hint = _FORMAT_CHOICES[args.format_in] if args.format_in else None
    # Parse both inputs concurrently; results (and errors) surface in
    # left-then-right order regardless of completion order.
    with ThreadPoolExecutor(max_workers=2) as pool:
        futures = [
            pool.submit(ingest.load_document, path, opts, hint)
            for path in (args.left, args.right)
        ]
        return tuple(f.result() for f in futures)


def _emit(out, args, text: str):
    if args.timestamp:
        now = datetime.datetime.now(datetime.timezone.utc).isoformat()
        out.write(f"generated: {now}\n")
    out.write(text)


def _cmd_inspect(args, out) -> int:
    opts = _ingest_options(args)
    hint = _FORMAT_CHOICES[args.format_in] if args.format_in else None
    doc = ingest.load_document(args.file, opts, hint)
    lines = [
        f"source: {doc.source_name}",
        f"format: {doc.format.value}" + (f" {doc.spec_version}" if doc.spec_version else ""),
        f"components: {len(doc.components)}",
        f"relationships: {len(doc.relationships)}",
        f"subject: {doc.subject if doc.subject is not None else '(none)'}",
    ]
    plural = {
        FieldSelector.NAME: "names",
        FieldSelector.PURL: "purls",
        FieldSelector.CPE: "cpes",
        FieldSelector.VENDOR: "vendors",
        FieldSelector.LICENSE: "licenses",
        FieldSelector.HASH_DIGEST: "hashes",
        FieldSelector.ORGANIZATION: "organizations",
    }
    for sel in FieldSelector:
        values = flatcompare.extract_field(doc, sel)
        lines.append(f"unique {plural[sel]}: {len(values)}")
    _emit(out, args, "\n".join(lines) + "\n")
    return 0


def _compare_report(args, left, right) -> report.DiffReport:
    fields = [_FIELD_CHOICES[f] for f in (args.field or _DEFAULT_FIELDS)]
    diff_fn = flatcompare.multiset_diff if args.mode == "list" else flatcompare.set_diff
    field_diffs = {
        sel: diff_fn(
            flatcompare.extract_field(left, sel),
            flatcompare.extract_field(right, sel),
        )
        for sel in fields
    }
    matches = ()
    if args.fuzzy:
        cfg = fuzzy.FuzzyConfig(threshold=_threshold(args))
        matches = tuple(
            fuzzy.all_pairs_matches(
                set(flatcompare.extract_field(left, FieldSelector.NAME)),
                set(flatcompare.extract_field(right, FieldSelector.NAME)),
                cfg,
                exclude_exact=args.exclude_exact,
            )
        )
    return report.DiffReport(
        source_names=(left.source_name, right.source_name),
        field_diffs=field_diffs,
        fuzzy=matches,
        findings=tuple(flatcompare.cross_field_consistency(left, right)),
        hash_coverage=(
            flatcompare.hash_coverage(left),
            flatcompare.hash_coverage(right),
        ),
    )


def _cmd_compare(args, out) -> int:
    left, right = _load_two(args, _ingest_options(args))
    rep = _compare_report(args, left, right)
    if args.format == "json":
        _emit(out, args, report.render_json(rep))
    else:
        text = report.render_table(rep)
        if rep.fuzzy:
            text += "\nfuzzy matches:\n"
            for m in rep.fuzzy:
                text += f"  {m.score:.6f}  {m.left}  ~  {m.right}\n"
        if rep.findings:
            text += "\nconsistency findings:\n"
            for f in rep.findings:
                text += (
                    f"  [{f.category.value}] {f.detail}"
                    f" (left: {', '.join(f.left_ids)}; right: {', '.join(f.right_ids)})\n"
                )
        if rep.hash_coverage is not None:
            (lh, ln), (rh, rn) = rep.hash_coverage
            text += (
                f"\nhash coverage: left {lh}/{lh + ln} components,"
                f" right {rh}/{rh + rn} components\n"
            )
        _emit(out, args, text)
    return 1 if rep.has_differences() else 0


def _cmd_graph(args, out) -> int:
    left, right = _load_two(args, _ingest_options(args))
    cfg = fuzzy.FuzzyConfig(threshold=_threshold(args))
    gl = graphcompare.build_graph(left)
    gr = graphcompare.build_graph(right)
    merged = graphcompare.merge_graphs(gl, gr, cfg)
    stats = graphcompare.match_stats(merged)

    rep = report.DiffReport(
        source_names=(left.source_name, right.source_name), graph=merged
    )
    if args.stats:
        _emit(
            out,
            args,
            f"matched={stats.matched} left_only={stats.left_only} "
            f"right_only={stats.right_only} fuzzy={stats.fuzzy}\n",
        )
    elif args.format == "dot":
        _emit(out, args, report.to_dot(merged))
    elif args.format == "json":
        _emit(out, args, report.render_json(rep))
    else:
        name_l = {n.id: n.name for n in gl.nodes}
        name_r = {n.id: n.name for n in gr.nodes}
        hints = dict(
            ((l, r), h) for h, (l, r) in report.classify_differences(merged)
        )
        lines = [
            f"matched={stats.matched} left_only={stats.left_only} "
            f"right_only={stats.right_only} fuzzy={stats.fuzzy}"
        ]
        if merged.left_only:
            lines.append("left only:")
            lines.extend(f"  {n}" for n in sorted(name_l[i] for i in merged.left_only))
        if merged.right_only:
            lines.append("right only:")
            lines.extend(f"  {n}" for n in sorted(name_r[i] for i in merged.right_only))
        if merged.fuzzy_links:
            lines.append("fuzzy links:")
            lines.extend(
                f"  {score:.6f}  {name_l[l]}  ~  {name_r[r]}"
                f"  [{hints[(l, r)].value}]"
                for l, r, score in merged.fuzzy_links
            )
        _emit(out, args, "\n".join(lines) + "\n")
    return 1 if rep.has_differences() else 0


def _cmd_orgs(args, out) -> int:
    left, right = _load_two(args, _ingest_options(args))
    excludes = [] if args.no_default_excludes else list(
        flatcompare.JAVA_STDLIB_ORG_PREFIXES
    )
    if args.exclude:
        excludes.extend(args.exclude)
    diff = flatcompare.organization_delta(left, right, tuple(excludes))
    rep = report.DiffReport(
        source_names=(left.source_name, right.source_name),
        field_diffs={FieldSelector.ORGANIZATION: diff},
    )
    text = report.render_table(rep)
    if diff.right_only:
        text += "\ngained:\n" + "".join(f"  {o}\n" for o in sorted(diff.right_only))
    if diff.left_only:
        text += "\nlost:\n" + "".join(f"  {o}\n" for o in sorted(diff.left_only))
    _emit(out, args, text)
    return 1 if rep.has_differences() else 0


def _cmd_licenses(args, out) -> int:
    left, right = _load_two(args, _ingest_options(args))
    lvals = flatcompare.extract_field(left, FieldSelector.LICENSE)
    rvals = flatcompare.extract_field(right, FieldSelector.LICENSE)
    rep = report.DiffReport(
        source_names=(left.source_name, right.source_name),
        field_diffs={FieldSelector.LICENSE: flatcompare.multiset_diff(lvals, rvals)},
    )
    if args.format == "json":
        _emit(out, args, report.render_json(rep))
        return 1 if rep.has_differences() else 0

    def coverage(doc):
        n = sum(1 for c in doc.components if c.licenses)
        return n, len(doc.components)

    ln, lt = coverage(left)
    rn, rt = coverage(right)
    text = report.render_table(rep)
    text += (
        f"\nlicense coverage: left {ln}/{lt} components,"
        f" right {rn}/{rt} components\n"
    )
    for label, values in (("left", lvals), ("right", rvals)):
        listing = ", ".join(sorted(values)) if values else "(none)"
        text += f"{label} licenses: {listing}\n"
    _emit(out, args, text)
    return 1 if rep.has_differences() else 0


_COMMANDS = {
    "inspect": _cmd_inspect,
    "compare": _cmd_compare,
    "graph": _cmd_graph,
    "orgs": _cmd_orgs,
    "licenses": _cmd_licenses,
}


def run(argv, stdout=None, stderr=None) -> int:
    out = stdout if stdout is not None else sys.stdout
    err = stderr if stderr is not None else sys.stderr
    parser = _build_parser()
    try:
        with contextlib.redirect_stdout(out), contextlib.redirect_stderr(err):
            args = parser.parse_args(argv)
    except SystemExit as e:
        # argparse already printed usage/help; normalize --help to 0.
        return 0 if e.code == 0 else USAGE_ERROR
    try:
        return _COMMANDS[args.command](args, out)
    except (ingest.ParseError, ingest.UnknownFormatError) as e:
        err.write(f"error: {e}\n")
        return PARSE_ERROR
    except fuzzy.ConfigError as e:
        err.write(f"error: {e}\n")
        return USAGE_ERROR
    except OSError as e:
        err.write(f"error: {e}\n")
        return PARSE_ERROR


def main():
    sys.exit(run(sys.argv[1:]))


if __name__ == "__main__":
    main()
