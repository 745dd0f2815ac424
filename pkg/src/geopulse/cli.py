"""Command line entry point: ingest, analyze, regress, validate-sentiment, synth.

Settings resolve as CLI flag > ``--config`` JSON file > built-in default.
Exit codes: 0 ok, 2 I/O, 3 data mismatch, 4 estimation failure.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import logging
import sys
from dataclasses import asdict
from datetime import date
from pathlib import Path

from . import __version__, analytics, corpus, regression, reports, sentiment, synth
from .geo import PROVINCE_IDS, STATE_IDS
from .pipeline import Resources, attribute_all, filter_window
from .resources import data_path, file_digest, read_rows

log = logging.getLogger("geopulse")

EXIT_OK, EXIT_IO, EXIT_DATA, EXIT_ESTIMATION = 0, 2, 3, 4

DATA_FILES = {
    "states": "states.csv",
    "provinces": "provinces.csv",
    "stoplist": "stoplist.csv",
    "lexicon": "lexicon.csv",
    "surnames": "surnames.txt",
}
DEFAULTS = {
    "inputs": [],
    "corpus": None,
    "external": None,
    "out": ".",
    "threads": 1,
    "window": None,
    "variance": analytics.POPULATION,
    "surname_match": "segment",
    "multi_state": regression.EXPAND,
    **{k: None for k in DATA_FILES},
}
# settings that cannot change report contents stay out of the hash
_UNHASHED = {"inputs", "corpus", "external", "out", "threads"}


class CliError(Exception):
    def __init__(self, code: int, message: str):
        super().__init__(message)
        self.code = code


def parse_window(text):
    if text is None:
        return None
    try:
        a, b = text.split(":")
        start, end = date.fromisoformat(a), date.fromisoformat(b)
    except ValueError:
        raise CliError(EXIT_DATA, f"bad --window {text!r}, expected YYYY-MM-DD:YYYY-MM-DD") from None
    if start > end:
        raise CliError(EXIT_DATA, f"empty window {text!r}")
    return start, end


def resolve_config(args) -> dict:
    cfg = dict(DEFAULTS)
    if args.config:
        try:
            with open(args.config, encoding="utf-8") as fh:
                loaded = json.load(fh)
        except OSError as exc:
            raise CliError(EXIT_IO, f"cannot read config {args.config}: {exc}") from None
        except json.JSONDecodeError as exc:
            raise CliError(EXIT_DATA, f"bad config {args.config}: {exc}") from None
        unknown = set(loaded) - set(DEFAULTS)
        if unknown:
            raise CliError(EXIT_DATA, f"unknown config keys: {sorted(unknown)}")
        cfg.update(loaded)
    for key in DEFAULTS:
        value = getattr(args, key, None)
        if value is not None and value != []:
            cfg[key] = value
    for key in DATA_FILES:
        if cfg[key] is not None and not Path(cfg[key]).is_file():
            raise CliError(EXIT_IO, f"{key} file not found: {cfg[key]}")
    cfg["threads"] = max(1, int(cfg["threads"]))
    cfg["_window"] = parse_window(cfg["window"])
    return cfg


def config_hash(cfg: dict) -> str:
    settled = {k: v for k, v in cfg.items() if k not in _UNHASHED and not k.startswith("_")}
    for key, name in DATA_FILES.items():
        settled[key] = file_digest(cfg[key] or data_path(name))
    blob = json.dumps(settled, sort_keys=True).encode("utf-8")
    return hashlib.sha256(blob).hexdigest()[:16]


def load_resources(cfg) -> Resources:
    try:
        return Resources.load(
            states=cfg["states"], provinces=cfg["provinces"], stoplist=cfg["stoplist"],
            lexicon=cfg["lexicon"], surnames=cfg["surnames"], surname_mode=cfg["surname_match"],
        )
    except (ValueError, KeyError) as exc:
        raise CliError(EXIT_DATA, f"bad data file: {exc}") from None


def out_dir(cfg) -> Path:
    path = Path(cfg["out"])
    try:
        path.mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        raise CliError(EXIT_IO, f"cannot create output directory {path}: {exc}") from None
    return path


def load_records(cfg):
    path = Path(cfg["corpus"] or Path(cfg["out"]) / "corpus.jsonl")
    if not path.is_file():
        raise CliError(EXIT_IO, f"corpus not found: {path} (run `geopulse ingest` first)")
    try:
        records = corpus.load_corpus(path)
    except corpus.RejectedRecord as exc:
        raise CliError(EXIT_DATA, f"corpus {path} is not normalized: {exc}") from None
    return filter_window(records, cfg["_window"])


def cmd_ingest(cfg) -> dict:
    paths = [Path(p) for p in cfg["inputs"]]
    if not paths:
        raise CliError(EXIT_IO, "no input files")
    for p in paths:
        if not p.is_file():
            raise CliError(EXIT_IO, f"cannot read {p}")
    out = out_dir(cfg)
    h = config_hash(cfg)
    try:
        result = corpus.ingest(corpus.read_lines(paths), threads=cfg["threads"])
    except (OSError, UnicodeDecodeError) as exc:
        raise CliError(EXIT_IO, f"cannot read input: {exc}") from None

    with open(out / "corpus.jsonl", "w", encoding="utf-8", newline="\n") as fh:
        for rec in result.records:
            fh.write(corpus.serialize(rec) + "\n")
    reports.write_csv(out / "rejections.csv", ["line_number", "reason"], result.rejections, h)
    summary = result.summary()
    reports.write_json(out / "ingest_summary.json", summary, h)
    return summary


def _external_index(path) -> dict[str, float]:
    try:
        rows = read_rows(path, ("state_id", "value"))
        return {r["state_id"]: float(r["value"]) for r in rows}
    except OSError as exc:
        raise CliError(EXIT_IO, f"cannot read external index {path}: {exc}") from None
    except ValueError as exc:
        raise CliError(EXIT_DATA, f"bad external index {path}: {exc}") from None


def cmd_analyze(cfg) -> dict:
    records = load_records(cfg)
    external = _external_index(cfg["external"]) if cfg["external"] else None
    res = load_resources(cfg)
    att = attribute_all(records, res, threads=cfg["threads"])
    tweets = att.tweets

    counts, summary = analytics.state_counts(tweets)
    corr = None
    if external is not None:
        try:
            corr = analytics.correlate_external(counts, external)
        except analytics.KeyMismatch:
            raise CliError(EXIT_DATA, "external index key mismatch") from None

    out = out_dir(cfg)
    h = config_hash(cfg)
    reports.write_csv(out / "counts.csv", ["state", "count"], counts.items(), h)
    reports.write_csv(out / "counts_summary.csv", ["variable", "mean", "std", "min", "max", "N"],
                      [["tweets", summary.mean, summary.std, summary.min, summary.max, summary.N]], h)

    matrix = analytics.build_matrix(tweets)
    stats = analytics.friendliness_variance(tweets, cfg["variance"])
    by_f = {r.stats.state: r for r in analytics.rank_states(stats, "friendliness", True)}
    by_v = {r.stats.state: r for r in analytics.rank_states(stats, "variance", False)}
    rows = []
    for s in STATE_IDS:
        if s in by_f:
            st, rf, rv = by_f[s].stats, by_f[s], by_v[s]
            rows.append([s, st.n, st.friendliness, st.variance, rf.rank, rv.rank,
                         rf.tied, rv.tied, matrix.top_province(s) or "", ""])
        else:
            rows.append([s, 0, None, None, None, None, None, None, "", "empty"])
    reports.write_csv(out / "state_stats.csv",
                      ["state", "n", "friendliness", "variance", "friendliness_rank",
                       "variance_rank", "friendliness_tied", "variance_tied", "top_province", "flag"],
                      rows, h)

    mrows = []
    for i, s in enumerate(matrix.states):
        flag = "zero" if matrix.row_counts[i] == 0 else ""
        mrows.append([s, int(matrix.row_counts[i]), flag, *map(float, matrix.values[i])])
    reports.write_csv(out / "matrix.csv", ["state", "row_count", "flag", *PROVINCE_IDS], mrows, h)

    reports.write_csv(out / "daily_series.csv", ["date", "mean_polarity", "n"],
                      [[p.date.isoformat(), p.mean_polarity, p.n]
                       for p in analytics.daily_series(tweets)], h)
    if corr is not None:
        reports.write_csv(out / "correlation.csv",
                          ["r", "beta", "beta_se", "intercept", "n", "log_base"],
                          [[corr.r, corr.beta, corr.beta_se, corr.intercept, corr.n, "e"]], h)

    result = {
        "records": len(records),
        "attributed": len(tweets),
        "stopped": att.stopped,
        "unlocated": att.unlocated,
        "matrix_tweets": int(sum(1 for t in tweets if t.provinces)),
        "zero_rows": len(matrix.zero_rows),
    }
    reports.write_json(out / "analyze_summary.json", result, h)
    return result


def cmd_regress(cfg) -> dict:
    records = load_records(cfg)
    res = load_resources(cfg)
    tweets = attribute_all(records, res, threads=cfg["threads"]).tweets
    out = out_dir(cfg)
    h = config_hash(cfg)

    columns = regression.run_table4(tweets, multi_state=cfg["multi_state"])
    status = []
    for col in columns:
        if col.result is None:
            status.append([col.index, col.name, "skipped", col.error, None, None, None])
            continue
        r = col.result
        rows = [[lab, float(r.coef[i]), float(r.se[i]), float(r.t[i]), regression.stars(float(r.p[i]))]
                for i, lab in enumerate(r.labels)]
        reports.write_csv(out / f"regression_col{col.index}.csv",
                          ["term", "coefficient", "se", "t", "stars"], rows, h)
        reports.write_json(out / f"regression_col{col.index}.json", {
            "column": col.index, "name": col.name,
            "n": r.n, "k": r.k, "rss": reports.sig(r.rss), "adj_r2": reports.sig(r.adj_r2),
            "references": col.design.references, "dropped": col.design.dropped,
            "spec": asdict(col.spec),
        }, h)
        status.append([col.index, col.name, "ok", "", r.n, r.k, r.adj_r2])
    reports.write_csv(out / "regression_summary.csv",
                      ["column", "name", "status", "reason", "n", "k", "adj_r2"], status, h)

    col4 = next(c for c in columns if c.index == 4)
    frows = [[fam, f.F, f.df1, f.df2, f.p_value] for fam, f in regression.family_tests(col4)]
    reports.write_csv(out / "ftests.csv", ["family", "F", "df1", "df2", "p"], frows, h)

    ok = sum(1 for c in columns if c.result is not None)
    if ok == 0:
        raise CliError(EXIT_ESTIMATION, "every regression column failed")
    return {"columns_ok": ok, "columns_skipped": len(columns) - ok, "ftests": len(frows)}


def cmd_validate(cfg) -> dict:
    records = load_records(cfg)
    res = load_resources(cfg)
    try:
        m = sentiment.validate_emoticons(records, res.lexicon)
    except ValueError as exc:
        raise CliError(EXIT_DATA, str(exc)) from None
    out = out_dir(cfg)
    rows = [[k, v] for k, v in asdict(m).items()]
    reports.write_csv(out / "validation.csv", ["metric", "value"], rows, config_hash(cfg))
    return asdict(m)


def cmd_synth(args) -> dict:
    lines = synth.raw_tweets(args.n, args.seed, intensity_effect=args.intensity_effect)
    text = "".join(ln + "\n" for ln in lines)
    if args.output == "-":
        sys.stdout.write(text)
        return None
    else:
        Path(args.output).write_text(text, encoding="utf-8")
    return {"written": len(lines)}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="JSON file with default settings")
    common.add_argument("--out", help="output directory (default: .)")
    common.add_argument("--threads", type=int, help="worker threads (results do not depend on it)")
    for key in DATA_FILES:
        common.add_argument(f"--{key}", metavar="PATH", help=f"override bundled {DATA_FILES[key]}")
    common.add_argument("--window", metavar="START:END", help="keep tweets posted in [START, END]")
    common.add_argument("--variance", choices=[analytics.POPULATION, analytics.SAMPLE])
    common.add_argument("--surname-match", dest="surname_match", choices=["segment", "substring"])
    common.add_argument("--multi-state", dest="multi_state",
                        choices=[regression.EXPAND, regression.FIRST_STATE])

    parser = argparse.ArgumentParser(prog="geopulse", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"geopulse {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("ingest", parents=[common], help="parse, validate and dedup NDJSON tweets")
    p.add_argument("inputs", nargs="*", help="NDJSON files, read in order")

    for name, helptext in (("analyze", "state counts, friendliness, matrix, daily series"),
                           ("regress", "the seven fixed-effects regressions and F-tests"),
                           ("validate-sentiment", "emoticon pseudo-label check")):
        p = sub.add_parser(name, parents=[common], help=helptext)
        p.add_argument("--corpus", help="normalized corpus (default: OUT/corpus.jsonl)")
        if name == "analyze":
            p.add_argument("--external", metavar="CSV", help="state_id,value index to correlate")

    p = sub.add_parser("synth", help="write a seeded synthetic raw corpus")
    p.add_argument("--n", type=int, default=200)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--intensity-effect", type=float, default=0.0)
    p.add_argument("-o", "--output", default="-")
    return parser


COMMANDS = {
    "ingest": cmd_ingest,
    "analyze": cmd_analyze,
    "regress": cmd_regress,
    "validate-sentiment": cmd_validate,
}


def main(argv=None) -> int:
    logging.basicConfig(level=logging.WARNING, format="%(levelname)s %(name)s: %(message)s")
    args = build_parser().parse_args(argv)
    try:
        if args.command == "synth":
            summary = cmd_synth(args)
        else:
            summary = COMMANDS[args.command](resolve_config(args))
    except CliError as exc:
        print(f"geopulse {args.command}: {exc}", file=sys.stderr)
        return exc.code
    if summary is not None:
        print(json.dumps(summary, sort_keys=True, default=str))
    return EXIT_OK
