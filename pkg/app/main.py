# app/main.py
import argparse
import json
import logging
import sys
from pathlib import Path
from typing import Dict, List, Optional, Sequence, TextIO, Tuple

import pandas as pd
from pydantic import ValidationError

from app.core.config import settings
from app.core.exceptions import CiteGrowthError, SynthConfigError
from app.core.logging import setup_logging
from app.models.corpus import Corpus
from app.schemas.corpus import ValidationReport
from app.schemas.distributions import DistributionKind
from app.schemas.powerlaw import DegreeMode
from app.schemas.report import Command, ReportOptions, RunConfig
from app.schemas.synth import PRESETS, Attachment, JournalRegime
from app.services import counts, distributions, export, powerlaw
from app.services.corpus import load_corpus, make_filter, write_corpus
from app.services.synth import generate_with_stats, make_config
from app.tasks.report import run_report

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_DATA = 2

LOG_LEVELS = ["DEBUG", "INFO", "WARNING", "ERROR", "CRITICAL"]


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    """argparse с кодом 1 вместо 2 при ошибке разбора"""

    def error(self, message: str) -> None:
        self.print_usage(sys.stderr)
        raise UsageError(f"{self.prog}: error: {message}")


def _year_list(raw: str) -> List[int]:
    """'1990,1995,2000' или 'start:end[:step]' (конец включительно)"""
    try:
        if ":" in raw:
            parts = [int(p) for p in raw.split(":")]
            start, end = parts[0], parts[1]
            step = parts[2] if len(parts) > 2 else 1
            if step < 1 or len(parts) > 3:
                raise ValueError
            return list(range(start, end + 1, step))
        return [int(p) for p in raw.split(",") if p.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"invalid year list {raw!r}; use 1990,1995 or 1980:2000:5") from None


def _doc_types(raw: Optional[str]) -> Optional[List[str]]:
    """"article,review" -> ["article", "review"]; пустая строка даёт пустой список"""
    if raw is None:
        return None
    return [d for d in raw.split(",") if d.strip()]


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--log-level", type=str.upper, choices=LOG_LEVELS, default=None)

    corpus_args = _Parser(add_help=False)
    corpus_args.add_argument("--papers", type=Path, required=True, help="papers TSV: id, year, venue, doc_type")
    corpus_args.add_argument("--citations", type=Path, required=True, help="citations TSV: citing_id, cited_id")
    corpus_args.add_argument("--year-min", type=int, default=None)
    corpus_args.add_argument("--year-max", type=int, default=None)
    corpus_args.add_argument("--doc-types", default=None, help="comma-separated document types to keep")
    corpus_args.add_argument("--output", "-o", type=Path, default=None, help="output directory (default: stdout)")

    parser = _Parser(prog="citegrowth", description=f"{settings.PROJECT_NAME} citation growth analysis")
    parser.add_argument("--version", action="version", version=f"{settings.PROJECT_NAME} {settings.VERSION}")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    sub.add_parser("validate", parents=[common, corpus_args], help="load a corpus and print the validation report")

    p_counts = sub.add_parser("counts", parents=[common, corpus_args], help="publication and journal counts with fits")
    p_counts.add_argument("--years", type=int, default=None, metavar="STEP", help="keep every STEP-th year")

    for name, help_text in (("refdist", "reference distributions"), ("citedist", "citation distributions")):
        p_dist = sub.add_parser(name, parents=[common, corpus_args], help=f"per-cohort {help_text}")
        p_dist.add_argument("--cohorts", type=_year_list, default=None, help="cohort years (default: all)")
        p_dist.add_argument("--align", action="store_true", help="shift each curve so its peak is at 0")
        if name == "citedist":
            p_dist.add_argument("--normalized", action="store_true", help="weight citations by 1/n_x")

    p_peaks = sub.add_parser("peaks", parents=[common, corpus_args], help="peak year table")
    p_peaks.add_argument("--cohorts", type=_year_list, default=None)
    p_peaks.add_argument("--kind", choices=[k.value for k in DistributionKind], default=None)

    p_power = sub.add_parser("powerlaw", parents=[common, corpus_args], help="exponent sweep over windows")
    p_power.add_argument("--centers", type=_year_list, required=True)
    p_power.add_argument("--half-width", type=int, default=settings.HALF_WIDTH)
    p_power.add_argument("--mode", choices=[m.value for m in DegreeMode], default=DegreeMode.RAW.value)
    p_power.add_argument("--kmin", type=float, default=None)
    p_power.add_argument("--min-tail", type=int, default=settings.MIN_TAIL)

    p_synth = sub.add_parser("synth", parents=[common], help="generate a synthetic corpus")
    p_synth.add_argument("--output", "-o", type=Path, required=True, help="directory for papers.tsv and citations.tsv")
    p_synth.add_argument("--config", type=Path, default=None, help="JSON file with SynthConfig fields")
    p_synth.add_argument("--preset", choices=sorted(PRESETS), default=None)
    p_synth.add_argument("--years", type=int, default=None)
    p_synth.add_argument("--base-papers", type=int, default=None)
    p_synth.add_argument("--growth-rate", type=float, default=None)
    p_synth.add_argument("--refs-mean", type=float, default=None)
    p_synth.add_argument("--refs-growth", type=float, default=None, help="yearly factor of the mean reference count")
    p_synth.add_argument("--late-growth-rate", type=float, default=None)
    p_synth.add_argument("--late-growth-start", type=int, default=None, metavar="OFFSET", help="first year (offset) of late growth")
    p_synth.add_argument("--mode-age", type=int, default=None)
    p_synth.add_argument("--decay", type=float, default=None)
    p_synth.add_argument("--attachment", choices=[a.value for a in Attachment], default=None)
    p_synth.add_argument("--journals", type=int, default=None)
    p_synth.add_argument("--journal-growth", type=int, default=None, help="venues added per year (growing_count)")
    p_synth.add_argument("--seed", type=int, default=None)

    p_report = sub.add_parser("report", parents=[common, corpus_args], help="full analysis into one directory")
    p_report.add_argument("--svg", action="store_true", help="also write SVG line charts")
    p_report.add_argument("--cohort-step", type=int, default=5)
    p_report.add_argument("--keep-edge-cohorts", action="store_true", help="include the first and last corpus year")
    p_report.add_argument("--centers", type=_year_list, default=None)
    p_report.add_argument("--half-width", type=int, default=settings.HALF_WIDTH)
    p_report.add_argument("--kmin", type=float, default=None, help="k_min for the normalized sweep")
    p_report.add_argument("--min-tail", type=int, default=settings.MIN_TAIL)

    return parser


def _run_config(args: argparse.Namespace) -> RunConfig:
    return RunConfig(
        command=args.command,
        papers=getattr(args, "papers", None),
        citations=getattr(args, "citations", None),
        output=getattr(args, "output", None),
        year_min=getattr(args, "year_min", None),
        year_max=getattr(args, "year_max", None),
        doc_types=_doc_types(getattr(args, "doc_types", None)),
        normalized=getattr(args, "normalized", False),
        align=getattr(args, "align", False),
        mode=getattr(args, "mode", DegreeMode.RAW.value),
        seed=getattr(args, "seed", None),
        emit_svg=getattr(args, "svg", False),
    )


def _load(config: RunConfig) -> Tuple[Corpus, ValidationReport]:
    filter_config = make_filter(
        allowed_doc_types=config.doc_types,
        year_min=config.year_min,
        year_max=config.year_max,
    )
    return load_corpus(config.papers, config.citations, filter_config)


def _emit(frames: Dict[str, pd.DataFrame], output: Optional[Path], stdout: TextIO) -> None:
    """Таблицы в файлы директории output или подряд в stdout (через пустую строку)"""
    if output is not None:
        for filename, frame in frames.items():
            export.write_csv(frame, output / filename)
        return
    for i, frame in enumerate(frames.values()):
        if i:
            stdout.write("\n")
        frame.to_csv(stdout, index=False, float_format=settings.CSV_FLOAT_FORMAT, lineterminator="\n")


def _cmd_validate(args, config: RunConfig, stdout: TextIO) -> int:
    _, report = _load(config)
    _emit({"validation.csv": pd.DataFrame(report.to_rows(), columns=["metric", "key", "value"])}, config.output, stdout)
    return EXIT_OK


def _cmd_counts(args, config: RunConfig, stdout: TextIO) -> int:
    corpus, _ = _load(config)
    pub = counts.publication_counts(corpus)
    journals = counts.journal_counts(corpus)
    if args.years:
        pub = counts.sample_years(pub, args.years)
        journals = counts.sample_years(journals, args.years)
    _emit(
        {
            "publication_counts.csv": pub.to_frame(),
            "journal_counts.csv": journals.to_frame(),
            "growth_fits.csv": counts.fit_table({"publications": pub, "journals": journals}),
        },
        config.output,
        stdout,
    )
    return EXIT_OK


def _distribution_kind(args) -> DistributionKind:
    if args.command == Command.REFDIST.value:
        return DistributionKind.REFERENCE
    if getattr(args, "normalized", False):
        return DistributionKind.NORMALIZED_CITATION
    return DistributionKind.CITATION


def _cohort_list(args, corpus: Corpus) -> List[int]:
    if args.cohorts:
        return sorted(set(args.cohorts))
    first, last = corpus.year_range
    return list(range(first, last + 1))


def _cmd_distributions(args, config: RunConfig, stdout: TextIO) -> int:
    corpus, _ = _load(config)
    kind = _distribution_kind(args)
    if corpus.is_empty:
        dists = []
    else:
        matrix = distributions.citation_counts_matrix(corpus)
        dists = distributions.cohort_distributions(
            matrix, _cohort_list(args, corpus), kind, counts.publication_counts(corpus)
        )
    if config.align:
        dists = [distributions.align_to_peak(d) for d in dists]
    filename = f"{kind.value}_distributions{'_aligned' if config.align else ''}.csv"
    _emit({filename: distributions.distributions_frame(dists, aligned=config.align)}, config.output, stdout)
    return EXIT_OK


def _cmd_peaks(args, config: RunConfig, stdout: TextIO) -> int:
    corpus, _ = _load(config)
    kinds = [DistributionKind(args.kind)] if args.kind else list(DistributionKind)
    peaks = []
    if not corpus.is_empty:
        matrix = distributions.citation_counts_matrix(corpus)
        pub = counts.publication_counts(corpus)
        for kind in kinds:
            dists = distributions.cohort_distributions(matrix, _cohort_list(args, corpus), kind, pub)
            peaks.extend(distributions.peak_delta_series(dists).values())
    _emit({"peaks.csv": distributions.peaks_frame(peaks)}, config.output, stdout)
    return EXIT_OK


def _cmd_powerlaw(args, config: RunConfig, stdout: TextIO) -> int:
    corpus, _ = _load(config)
    k_min = args.kmin
    if config.mode == DegreeMode.RAW and k_min is None:
        k_min = settings.DEFAULT_KMIN_RAW
    series = powerlaw.exponent_sweep(
        corpus,
        args.centers,
        half_width=args.half_width,
        mode=config.mode,
        k_min=k_min,
        min_tail=args.min_tail,
    )
    frames = {f"exponents_{config.mode.value}.csv": series.to_frame()}
    try:
        trend = powerlaw.sweep_trend(series)
        frames["exponent_trends.csv"] = pd.DataFrame(
            [{
                "mode": config.mode.value,
                "slope": trend.slope,
                "intercept": trend.intercept,
                "r_squared": trend.r_squared,
                "n_points": trend.n_points,
            }]
        )
    except CiteGrowthError as e:
        logger.warning(f"No exponent trend: {e}")
    _emit(frames, config.output, stdout)
    return EXIT_OK


def _synth_params(args) -> Dict:
    """Параметры генератора: JSON из --config, поверх - явные флаги"""
    if args.config is not None:
        try:
            params = json.loads(Path(args.config).read_text(encoding="utf-8"))
        except json.JSONDecodeError as e:
            raise SynthConfigError(f"{args.config}: invalid JSON: {e}") from e
        if not isinstance(params, dict):
            raise SynthConfigError(f"{args.config}: expected a JSON object")
    else:
        params = {}

    if args.preset:
        params["preset"] = args.preset
    inline = {
        "years": args.years,
        "base_papers": args.base_papers,
        "growth_rate": args.growth_rate,
        "refs_mean": args.refs_mean,
        "refs_growth": args.refs_growth,
        "late_growth_rate": args.late_growth_rate,
        "late_growth_start": args.late_growth_start,
        "attachment": args.attachment,
        "seed": args.seed,
    }
    params.update({key: value for key, value in inline.items() if value is not None})

    if args.mode_age is not None or args.decay is not None:
        kernel = dict(params.get("age_kernel") or {})
        if args.mode_age is not None:
            kernel["mode_age"] = args.mode_age
        if args.decay is not None:
            kernel["decay"] = args.decay
        params["age_kernel"] = kernel

    if args.journals is not None or args.journal_growth is not None:
        try:
            if args.journal_growth:
                regime = JournalRegime.growing_count(args.journals or 50, args.journal_growth)
            else:
                regime = JournalRegime.fixed_count(args.journals or 50)
        except ValidationError as e:
            raise SynthConfigError(f"Invalid journal regime: {e}") from e
        params["journal_regime"] = regime

    if "preset" not in params and not {"years", "base_papers"} <= set(params):
        raise UsageError("synth needs --config, --preset, or both --years and --base-papers")
    return params


def _cmd_synth(args, config: RunConfig, stdout: TextIO) -> int:
    synth_config = make_config(_synth_params(args))
    corpus, stats = generate_with_stats(synth_config)
    output = config.output
    write_corpus(corpus, output / "papers.tsv", output / "citations.tsv")
    description = {"config": synth_config.describe(), "stats": stats.model_dump()}
    export.write_text(json.dumps(description, indent=2, sort_keys=True) + "\n", output / "synth.json")
    stdout.write(f"{corpus.paper_count} papers, {corpus.edge_count} citations -> {output}\n")
    return EXIT_OK


def _cmd_report(args, config: RunConfig, stdout: TextIO) -> int:
    corpus, report = _load(config)
    options = ReportOptions(
        cohort_step=args.cohort_step,
        omit_edge_cohorts=not args.keep_edge_cohorts,
        half_width=args.half_width,
        centers=args.centers,
        kmin_normalized=args.kmin,
        min_tail=args.min_tail,
        emit_svg=config.emit_svg,
    )
    result = run_report(corpus, config.output, options, validation=report)
    stdout.write(f"{len(result['files'])} files written to {config.output}\n")
    return EXIT_OK


COMMANDS = {
    Command.VALIDATE: _cmd_validate,
    Command.COUNTS: _cmd_counts,
    Command.REFDIST: _cmd_distributions,
    Command.CITEDIST: _cmd_distributions,
    Command.PEAKS: _cmd_peaks,
    Command.POWERLAW: _cmd_powerlaw,
    Command.SYNTH: _cmd_synth,
    Command.REPORT: _cmd_report,
}


def run(argv: Optional[Sequence[str]] = None, stdout: Optional[TextIO] = None) -> int:
    """
    Точка входа CLI.

    Returns:
        0 - успех, 1 - ошибка использования, 2 - ошибка данных
    """
    stdout = stdout or sys.stdout
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        config = _run_config(args)
    except UsageError as e:
        print(e, file=sys.stderr)
        return EXIT_USAGE
    except ValidationError as e:
        parser.print_usage(sys.stderr)
        print(f"citegrowth: error: {e.errors()[0]['msg']}", file=sys.stderr)
        return EXIT_USAGE
    except SystemExit as e:
        # --help / --version
        return int(e.code or 0)

    setup_logging(level=args.log_level)
    logger.debug(f"Running {config.command.value}: {config.model_dump(mode='json')}")
    try:
        return COMMANDS[config.command](args, config, stdout)
    except UsageError as e:
        print(f"citegrowth: error: {e}", file=sys.stderr)
        return EXIT_USAGE
    except ValidationError as e:
        print(f"citegrowth: error: {e.errors()[0]['msg']}", file=sys.stderr)
        return EXIT_USAGE
    except (CiteGrowthError, OSError) as e:
        logger.error(f"{config.command.value} failed: {e}")
        print(f"citegrowth: error: {e}", file=sys.stderr)
        return EXIT_DATA


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
