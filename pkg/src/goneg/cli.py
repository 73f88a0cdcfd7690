"""Command-line entry point: ``goneg <subcommand> [flags]``.

Settings resolve in increasing precedence: built-in defaults, a flat
``key = value`` config file (``--config``), ``GONEG_<KEY>`` environment
variables, then command-line flags.

Exit codes: 0 ok, 2 usage, 3 empty result, 4 unparseable input.
"""

from __future__ import annotations

import argparse
import csv
import dataclasses
import hashlib
import logging
import os
import sys
import warnings
from dataclasses import dataclass, field, fields
from typing import Any, Sequence

from . import __version__
from .annotations import EXPERIMENTAL_CODES, AnnotationRelease, align, parse_gaf
from .errors import DomainError, EmptyReleaseWarning, GonegError, ParseError, StructureError
from .evaluation import (DEFAULT_BUDGETS, DEFAULT_K_GRID, DEFAULT_MASK_FRACTION, DEFAULT_REPEATS,
                         eligible_terms, run_benchmark, sweep_k, tune_k)
from .evolution import analyze
from .ontology import BRANCHES, DEFAULT_RELATIONS, OntologyDag, parse_obo
from .selection import METHODS, NSFS_MEASURE, SelectionConfig, candidate_order
from .similarity import MEASURES, SimilarityMatrix, build_matrix, read_matrix, write_matrix, write_matrix_csv

LOGGER = logging.getLogger("goneg")

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_EMPTY = 3
EXIT_PARSE = 4

ENV_PREFIX = "GONEG_"
COMMANDS = ("analyze", "select", "evaluate", "similarity", "parse-check")


class UsageError(Exception):
    """Invalid or incomplete configuration."""


@dataclass
class RunConfig:
    obo: str | None = None
    gaf_old: str | None = None
    gaf_new: str | None = None
    out: str | None = None
    branches: tuple[str, ...] = BRANCHES
    evidence: tuple[str, ...] = tuple(sorted(EXPERIMENTAL_CODES))
    relations: tuple[str, ...] = tuple(sorted(DEFAULT_RELATIONS))
    method: str | None = None
    methods: tuple[str, ...] = ("nsfs-j", "nsfs-l", "sibling", "noancdesc", "snob", "random")
    measures: tuple[str, ...] = MEASURES
    budget: int | None = None
    budgets: tuple[int, ...] = DEFAULT_BUDGETS
    k: float | None = None
    tune_k: bool = False
    k_grid: tuple[float, ...] = DEFAULT_K_GRID
    mask_fraction: float = DEFAULT_MASK_FRACTION
    terms: tuple[str, ...] = ()
    seed: int = 0
    repeats: int = DEFAULT_REPEATS
    fn_mode: str = "closed"
    snob_mode: str = "closed"
    sweep_k: bool = False
    plots: bool = False
    full: bool = False
    threads: int = field(default_factory=lambda: os.cpu_count() or 1)
    cache: bool = False
    cache_dir: str = field(default_factory=lambda: os.path.join(
        os.environ.get("XDG_CACHE_HOME", os.path.expanduser("~/.cache")), "goneg"))

    # flat key = value text

    def to_text(self) -> str:
        lines = []
        for f in fields(self):
            lines.append(f"{f.name} = {_format_value(getattr(self, f.name))}")
        return "\n".join(lines) + "\n"

    @classmethod
    def from_text(cls, text: str, source: str = "config") -> "RunConfig":
        return cls().updated(parse_config_text(text, source))

    def updated(self, values: dict[str, Any]) -> "RunConfig":
        """Copy with raw string or typed values coerced onto the field types."""
        known = {f.name for f in fields(self)}
        unknown = sorted(set(values) - known)
        if unknown:
            raise UsageError(f"unknown setting(s): {', '.join(unknown)}")
        return dataclasses.replace(self, **{k: _coerce(k, v) for k, v in values.items()})


_KINDS: dict[str, str] = {
    "obo": "path", "gaf_old": "path", "gaf_new": "path", "out": "path", "cache_dir": "str",
    "branches": "strs", "evidence": "strs", "relations": "strs", "methods": "strs", "measures": "strs",
    "terms": "strs", "method": "opt_str", "budget": "opt_int", "budgets": "ints", "k": "opt_float",
    "k_grid": "floats", "mask_fraction": "float", "seed": "int", "repeats": "int", "threads": "int",
    "fn_mode": "str", "snob_mode": "str", "tune_k": "bool", "sweep_k": "bool", "plots": "bool",
    "full": "bool", "cache": "bool",
}
_TRUE = {"1", "true", "yes", "on"}
_FALSE = {"0", "false", "no", "off"}


def _format_value(value: Any) -> str:
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, tuple):
        return ",".join(_format_value(v) for v in value)
    if isinstance(value, float):
        return repr(value)
    return str(value)


def _coerce(key: str, value: Any) -> Any:
    if not isinstance(value, str):
        return tuple(value) if isinstance(value, list) else value
    kind = _KINDS[key]
    text = value.strip()
    try:
        if kind in ("path", "opt_str"):
            return text or None
        if kind == "str":
            return text
        if kind == "bool":
            if text.lower() in _TRUE:
                return True
            if text.lower() in _FALSE:
                return False
            raise ValueError(text)
        if kind in ("int", "float"):
            return int(text) if kind == "int" else float(text)
        if kind in ("opt_int", "opt_float"):
            return None if not text else (int(text) if kind == "opt_int" else float(text))
        items = [x.strip() for x in text.split(",") if x.strip()]
        if kind == "ints":
            return tuple(int(x) for x in items)
        if kind == "floats":
            return tuple(float(x) for x in items)
        return tuple(items)
    except ValueError:
        raise UsageError(f"bad value for {key}: {value!r}") from None


def parse_config_text(text: str, source: str = "config") -> dict[str, str]:
    values: dict[str, str] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        key, sep, value = line.partition("=")
        if not sep:
            raise UsageError(f"{source}:{lineno}: expected 'key = value'")
        values[key.strip().replace("-", "_")] = value.strip()
    return values


def env_settings(environ: dict[str, str] | os._Environ = os.environ) -> dict[str, str]:
    known = {f.name for f in fields(RunConfig)}
    out = {}
    for name, value in environ.items():
        if name.startswith(ENV_PREFIX):
            key = name[len(ENV_PREFIX):].lower()
            if key in known:
                out[key] = value
    return out


# argument parsing

def _common(p: argparse.ArgumentParser, *, two_releases: bool, single_release: bool) -> None:
    S = argparse.SUPPRESS
    p.add_argument("--config", default=S, help="flat key = value settings file")
    p.add_argument("--obo", default=S, help="GO structure file (OBO)")
    if two_releases:
        p.add_argument("--gaf-old", dest="gaf_old", default=S, help="older annotation release (GAF)")
        p.add_argument("--gaf-new", dest="gaf_new", default=S, help="newer annotation release (GAF)")
    if single_release:
        p.add_argument("--gaf", "--gaf-old", dest="gaf_old", default=S, help="annotation release (GAF)")
    p.add_argument("--branch", dest="branches", default=S, help="comma-separated subset of BP,MF,CC")
    p.add_argument("--evidence", default=S, help="comma-separated evidence codes to keep")
    p.add_argument("--relations", default=S, help="comma-separated OBO relations used as edges")
    p.add_argument("--threads", default=S, help="worker threads (default: all cores)")
    p.add_argument("--seed", default=S, help="seed for every random choice")
    p.add_argument("--cache", dest="cache", action="store_const", const="true", default=S,
                   help="cache similarity matrices on disk")
    p.add_argument("--no-cache", dest="cache", action="store_const", const="false", default=S)
    p.add_argument("--cache-dir", dest="cache_dir", default=S)
    p.add_argument("-v", "--verbose", action="count", default=0)


def build_parser() -> argparse.ArgumentParser:
    S = argparse.SUPPRESS
    parser = argparse.ArgumentParser(prog="goneg", description="GO annotation evolution and negative selection")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", metavar="COMMAND")
    sub.required = True

    p = sub.add_parser("parse-check", help="parse the inputs and report their contents")
    _common(p, two_releases=True, single_release=False)

    p = sub.add_parser("similarity", help="export a term similarity matrix")
    _common(p, two_releases=False, single_release=True)
    p.add_argument("--measure", dest="measures", default=S, help="lin, jaccard or both (comma-separated)")
    p.add_argument("--full", dest="full", action="store_const", const="true", default=S,
                   help="include never-annotated terms in the CSV")
    p.add_argument("--out", default=S, help="output directory")

    p = sub.add_parser("analyze", help="categorize, rank and fork analysis of novel annotations")
    _common(p, two_releases=True, single_release=False)
    p.add_argument("--out", default=S, help="output directory")
    p.add_argument("--plots", dest="plots", action="store_const", const="true", default=S,
                   help="also write SVG plots (needs matplotlib)")

    p = sub.add_parser("select", help="select negative examples per term")
    _common(p, two_releases=False, single_release=True)
    p.add_argument("--method", default=S, help="|".join(METHODS))
    p.add_argument("--budget", default=S, help="negatives per term")
    p.add_argument("--k", default=S, help="NSFS similarity quantile K")
    p.add_argument("--tune-k", dest="tune_k", action="store_const", const="true", default=S,
                   help="learn K on an internal holdout of the release")
    p.add_argument("--k-grid", dest="k_grid", default=S)
    p.add_argument("--mask-fraction", dest="mask_fraction", default=S)
    p.add_argument("--term", dest="terms", default=S, help="comma-separated terms (default: all annotated)")
    p.add_argument("--snob-mode", dest="snob_mode", default=S, help="closed or direct")
    p.add_argument("--out", default=S, help="output CSV file")

    p = sub.add_parser("evaluate", help="temporal-holdout benchmark of the selection methods")
    _common(p, two_releases=True, single_release=False)
    p.add_argument("--methods", default=S, help="comma-separated methods")
    p.add_argument("--budgets", default=S, help="comma-separated budgets")
    p.add_argument("--k", default=S, help="fixed K for the NSFS methods (default: tuned)")
    p.add_argument("--k-grid", dest="k_grid", default=S)
    p.add_argument("--mask-fraction", dest="mask_fraction", default=S)
    p.add_argument("--repeats", default=S, help="random streams averaged per term")
    p.add_argument("--fn-mode", dest="fn_mode", default=S, help="closed or direct")
    p.add_argument("--snob-mode", dest="snob_mode", default=S, help="closed or direct")
    p.add_argument("--sweep-k", dest="sweep_k", action="store_const", const="true", default=S,
                   help="also report mean FN for every K in the grid")
    p.add_argument("--plots", dest="plots", action="store_const", const="true", default=S)
    p.add_argument("--out", default=S, help="output directory")
    return parser


_FLAG_NAMES = {"gaf_old": "--gaf-old", "gaf_new": "--gaf-new", "obo": "--obo", "out": "--out",
               "method": "--method", "budget": "--budget"}


def resolve_config(args: argparse.Namespace, environ=os.environ) -> RunConfig:
    """Merge defaults, config file, environment and flags (later wins)."""
    flags = {k: v for k, v in vars(args).items() if k not in ("command", "verbose", "config")}
    config = RunConfig()
    path = getattr(args, "config", None) or environ.get(ENV_PREFIX + "CONFIG")
    if path:
        try:
            with open(path, encoding="utf-8") as fh:
                text = fh.read()
        except OSError as exc:
            raise UsageError(f"--config: cannot read {path}: {exc.strerror}") from None
        values = parse_config_text(text, path)
        # relative paths in a config file are relative to the file itself
        base = os.path.dirname(os.path.abspath(path))
        for key in ("obo", "gaf_old", "gaf_new", "out", "cache_dir"):
            if values.get(key) and not os.path.isabs(os.path.expanduser(values[key])):
                values[key] = os.path.join(base, values[key])
        config = config.updated(values)
    config = config.updated(env_settings(environ))
    return config.updated(flags)


def _validate(command: str, cfg: RunConfig) -> None:
    need = {"parse-check": ["obo"], "similarity": ["obo", "gaf_old", "out"],
            "analyze": ["obo", "gaf_old", "gaf_new", "out"], "select": ["obo", "gaf_old", "method", "budget", "out"],
            "evaluate": ["obo", "gaf_old", "gaf_new", "out"]}[command]
    for key in need:
        if getattr(cfg, key) is None:
            flag = "--gaf" if (command in ("select", "similarity") and key == "gaf_old") else _FLAG_NAMES[key]
            raise UsageError(f"{flag} is required")
    for key in ("obo", "gaf_old", "gaf_new"):
        path = getattr(cfg, key)
        if path is not None and not os.path.isfile(path):
            flag = "--gaf" if (command in ("select", "similarity") and key == "gaf_old") else _FLAG_NAMES[key]
            raise UsageError(f"{flag}: no such file: {path}")
    bad = [b for b in cfg.branches if b not in BRANCHES]
    if bad or not cfg.branches:
        raise UsageError(f"--branch: expected a subset of {','.join(BRANCHES)}, got {','.join(cfg.branches)}")
    if cfg.threads < 1:
        raise UsageError("--threads must be at least 1")
    for key in ("fn_mode", "snob_mode"):
        if getattr(cfg, key) not in ("closed", "direct"):
            raise UsageError(f"--{key.replace('_', '-')} must be closed or direct")
    if cfg.k is not None and not 0 < cfg.k < 1:
        raise UsageError("--k must lie strictly between 0 and 1")
    if any(not 0 < K < 1 for K in cfg.k_grid) or not cfg.k_grid:
        raise UsageError("--k-grid values must lie strictly between 0 and 1")
    if command == "similarity":
        bad = [m for m in cfg.measures if m not in MEASURES]
        if bad or not cfg.measures:
            raise UsageError(f"--measure: expected lin and/or jaccard, got {','.join(cfg.measures)}")
    if command == "select":
        if cfg.method not in METHODS:
            raise UsageError(f"--method: expected one of {', '.join(METHODS)}")
        if cfg.budget < 1:
            raise UsageError("--budget must be positive")
        if cfg.method in NSFS_MEASURE and cfg.k is None and not cfg.tune_k:
            raise UsageError(f"--method {cfg.method} needs --k or --tune-k")
        if cfg.method not in NSFS_MEASURE and (cfg.k is not None or cfg.tune_k):
            raise UsageError(f"--k and --tune-k apply only to NSFS methods, not {cfg.method}")
    if command == "evaluate":
        bad = [m for m in cfg.methods if m not in METHODS]
        if bad or not cfg.methods:
            raise UsageError(f"--methods: unknown method(s) {', '.join(bad) or '(none given)'}")
        if not cfg.budgets or min(cfg.budgets) < 1:
            raise UsageError("--budgets must be positive integers")
        if cfg.repeats < 1:
            raise UsageError("--repeats must be at least 1")


# loading with optional matrix cache

def _load_dag(cfg: RunConfig) -> OntologyDag:
    return parse_obo(cfg.obo, relations=cfg.relations)


def _load_release(path: str, dag: OntologyDag, cfg: RunConfig) -> AnnotationRelease:
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", EmptyReleaseWarning)
        release = parse_gaf(path, dag, cfg.evidence, label=os.path.basename(path))
    if not release.direct.nnz:
        LOGGER.warning("%s: no annotations survived filtering", path)
    return release


def _file_digest(path: str) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 20), b""):
            h.update(chunk)
    return h.hexdigest()


def matrix_cache_key(cfg: RunConfig, measure: str, branch: str) -> str:
    h = hashlib.sha256()
    for part in (_file_digest(cfg.obo), _file_digest(cfg.gaf_old), ",".join(sorted(cfg.relations)),
                 ",".join(sorted(cfg.evidence)), measure, branch):
        h.update(part.encode("utf-8"))
        h.update(b"\0")
    return h.hexdigest()


def _matrix(cfg: RunConfig, measure: str, release: AnnotationRelease, dag: OntologyDag,
            branch: str) -> SimilarityMatrix:
    if not cfg.cache:
        return build_matrix(measure, release, dag, branch, cfg.threads)
    path = os.path.join(cfg.cache_dir, f"{matrix_cache_key(cfg, measure, branch)}.sim")
    if not os.path.exists(path):
        os.makedirs(cfg.cache_dir, exist_ok=True)
        built = build_matrix(measure, release, dag, branch, cfg.threads)
        tmp = f"{path}.{os.getpid()}.tmp"
        with open(tmp, "wb") as fh:
            write_matrix(built, fh)
        os.replace(tmp, path)
        LOGGER.info("cached %s %s matrix at %s", measure, branch, path)
    # always serve the stored float32 copy so cold and warm runs agree
    with open(path, "rb") as fh:
        return read_matrix(fh, dag)


# subcommands

def cmd_parse_check(cfg: RunConfig) -> int:
    dag = _load_dag(cfg)
    print(f"ontology: {len(dag)} terms, max level {dag.max_level}, "
          f"{dag.dropped_cross_branch} cross-branch links dropped")
    for b in BRANCHES:
        print(f"  {b}: {len(dag.branch_terms(b))} terms, roots {','.join(dag.roots(b)) or '-'}")
    for flag, path in (("gaf-old", cfg.gaf_old), ("gaf-new", cfg.gaf_new)):
        if path is None:
            continue
        rel = _load_release(path, dag, cfg)
        stats = " ".join(f"{k}={v}" for k, v in sorted(rel.stats.items()))
        print(f"{flag}: {rel.n} proteins, {rel.direct.nnz} annotations ({stats})")
    return EXIT_OK


def cmd_similarity(cfg: RunConfig) -> int:
    dag = _load_dag(cfg)
    release = _load_release(cfg.gaf_old, dag, cfg)
    os.makedirs(cfg.out, exist_ok=True)
    for measure in cfg.measures:
        for branch in cfg.branches:
            matrix = _matrix(cfg, measure, release, dag, branch)
            path = os.path.join(cfg.out, f"similarity_{measure}_{branch}.csv")
            with open(path, "w", encoding="utf-8", newline="") as fh:
                write_matrix_csv(matrix, fh, full=cfg.full)
            LOGGER.info("wrote %s (%d annotated of %d terms)", path, len(matrix.active), matrix.m)
    return EXIT_OK


def cmd_analyze(cfg: RunConfig) -> int:
    dag = _load_dag(cfg)
    old = _load_release(cfg.gaf_old, dag, cfg)
    new = _load_release(cfg.gaf_new, dag, cfg)
    matrices = {(m, b): _matrix(cfg, m, old, dag, b) for m in MEASURES for b in cfg.branches}
    result = analyze(old, new, dag, matrices, cfg.branches, cfg.threads)
    result.write(cfg.out)
    if cfg.plots:
        from .plots import plot_analysis
        plot_analysis(result, cfg.out)
    return EXIT_OK


def _select_terms(cfg: RunConfig, release: AnnotationRelease, dag: OntologyDag) -> list[str]:
    if cfg.terms:
        terms = []
        for t in cfg.terms:
            try:
                term = dag.resolve(t)
            except KeyError:
                raise UsageError(f"--term: {t} is not in the ontology") from None
            if dag.branch(term) in cfg.branches:
                terms.append(term)
        return sorted(set(terms))
    counts = release.closed_counts
    return [t for b in cfg.branches for t in dag.branch_terms(b) if counts[dag.index(t)] > 0]


def cmd_select(cfg: RunConfig) -> int:
    dag = _load_dag(cfg)
    release = _load_release(cfg.gaf_old, dag, cfg)
    terms = _select_terms(cfg, release, dag)
    if not terms:
        raise DomainError("no terms to select negatives for")
    rows: list[tuple[str, str, str]] = []
    for branch in cfg.branches:
        branch_terms = [t for t in terms if dag.branch(t) == branch]
        if not branch_terms:
            continue
        matrix, K = None, None
        measure = NSFS_MEASURE.get(cfg.method)
        if measure is not None:
            matrix = _matrix(cfg, measure, release, dag, branch)
            K = cfg.k
            if K is None:
                K = tune_k(release, dag, matrix, cfg.k_grid, cfg.budget, cfg.seed, cfg.mask_fraction,
                           threads=cfg.threads)
                LOGGER.info("branch %s: tuned K=%s", branch, K)
        SelectionConfig(cfg.method, cfg.budget, K, cfg.seed)  # validates the combination
        for term in branch_terms:
            order = candidate_order(cfg.method, term, release, dag, matrix, K, cfg.seed, 0, cfg.snob_mode)
            chosen = order.order[:cfg.budget]
            for pos, i in enumerate(chosen):
                rows.append((term, release.proteins[i], "heuristic" if pos < order.n_pool else "fill"))
    parent = os.path.dirname(os.path.abspath(cfg.out))
    os.makedirs(parent, exist_ok=True)
    with open(cfg.out, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["term", "protein", "source"])
        writer.writerows(rows)
    return EXIT_OK


def cmd_evaluate(cfg: RunConfig) -> int:
    dag = _load_dag(cfg)
    old = _load_release(cfg.gaf_old, dag, cfg)
    new = _load_release(cfg.gaf_new, dag, cfg)
    old_a, new_a = align(old, new)
    nsfs = [m for m in cfg.methods if m in NSFS_MEASURE]
    matrices = {}
    for branch in cfg.branches:
        if nsfs and eligible_terms(old_a, new_a, branch):
            for m in nsfs:
                matrices[(NSFS_MEASURE[m], branch)] = _matrix(cfg, NSFS_MEASURE[m], old, dag, branch)
    k_values = {m: cfg.k for m in nsfs} if cfg.k is not None else None
    report = run_benchmark(cfg.methods, cfg.budgets, old, new, dag, cfg.seed, cfg.repeats, cfg.branches,
                           k_values, cfg.k_grid, cfg.mask_fraction, matrices, cfg.fn_mode, cfg.snob_mode,
                           cfg.threads)
    report.metadata["settings"] = _config_echo(cfg)
    if cfg.sweep_k:
        sweep: dict[str, dict[str, dict[str, dict[str, float]]]] = {}
        for branch in report.means:
            for m in nsfs:
                measure = NSFS_MEASURE[m]
                res = sweep_k(measure, old, new, dag, branch, cfg.k_grid, cfg.budgets, cfg.seed, cfg.repeats,
                              matrices[(measure, branch)], cfg.threads)
                sweep.setdefault(branch, {})[m] = {repr(K): {str(B): v for B, v in per.items()}
                                                   for K, per in res.items()}
        report.metadata["k_sweep"] = sweep
    report.write(cfg.out)
    if cfg.plots:
        from .plots import plot_report
        plot_report(report, cfg.out)
    return EXIT_OK


def _config_echo(cfg: RunConfig) -> dict[str, Any]:
    """Settings that shape the result; paths reduced to file names, host details left out."""
    skip = {"threads", "cache", "cache_dir", "out", "plots"}
    echo = {}
    for f in fields(cfg):
        if f.name in skip:
            continue
        v = getattr(cfg, f.name)
        if f.name in ("obo", "gaf_old", "gaf_new") and v is not None:
            v = os.path.basename(v)
        echo[f.name] = list(v) if isinstance(v, tuple) else v
    return echo


HANDLERS = {"parse-check": cmd_parse_check, "similarity": cmd_similarity, "analyze": cmd_analyze,
            "select": cmd_select, "evaluate": cmd_evaluate}


def main(argv: Sequence[str] | None = None, environ=None) -> int:
    environ = os.environ if environ is None else environ
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    logging.basicConfig(level=logging.WARNING - 10 * min(args.verbose, 2),
                        format="%(levelname)s %(name)s: %(message)s", stream=sys.stderr)
    prog = f"goneg {args.command}"
    try:
        cfg = resolve_config(args, environ)
        _validate(args.command, cfg)
        return HANDLERS[args.command](cfg)
    except UsageError as exc:
        print(f"{prog}: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (ParseError, StructureError) as exc:
        print(f"{prog}: {_origin(exc)}: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except DomainError as exc:
        print(f"{prog}: {_origin(exc)}: {exc}", file=sys.stderr)
        return EXIT_EMPTY
    except ImportError as exc:
        print(f"{prog}: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except GonegError as exc:  # pragma: no cover - every subclass is handled above
        print(f"{prog}: {exc}", file=sys.stderr)
        return 1


def _origin(exc: BaseException) -> str:
    """Name of the goneg module that raised ``exc``."""
    tb = exc.__traceback__
    origin = "goneg"
    while tb is not None:
        mod = tb.tb_frame.f_globals.get("__name__", "")
        if mod.startswith("goneg.") and mod != "goneg.cli":
            origin = mod.split(".", 1)[1]
        tb = tb.tb_next
    return origin


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
