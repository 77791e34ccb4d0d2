# app/tasks/report.py
import logging
from pathlib import Path
from typing import Any, Callable, Dict, List, Optional, Union

import pandas as pd

from app.core.exceptions import CiteGrowthError, ReportError
from app.models.corpus import Corpus
from app.schemas.corpus import ValidationReport
from app.schemas.distributions import DistributionKind
from app.schemas.powerlaw import DegreeMode
from app.schemas.report import ReportOptions
from app.services import counts, distributions, export, powerlaw
from app.services.corpus import validate

logger = logging.getLogger(__name__)

DISTRIBUTION_FILES = {
    DistributionKind.REFERENCE: "reference_distributions",
    DistributionKind.CITATION: "citation_distributions",
    DistributionKind.NORMALIZED_CITATION: "normalized_citation_distributions",
}


def run_report(
    corpus: Corpus,
    output_dir: Union[str, Path],
    options: Optional[ReportOptions] = None,
    validation: Optional[ValidationReport] = None,
) -> Dict[str, Any]:
    """
    Полный отчёт по корпусу в одну директорию.

    Шаги выполняются по очереди; ошибка шага записывается и не прерывает
    остальные. Если хотя бы один шаг упал, после записи всего возможного
    бросается ReportError со списком ошибок.

    Returns:
        {"status": "completed", "files": [...], "errors": {}}
    """
    options = options or ReportOptions()
    output_dir = Path(output_dir)
    output_dir.mkdir(parents=True, exist_ok=True)
    logger.info(f"Starting report for {corpus!r} into {output_dir}")

    files: List[Path] = []
    errors: Dict[str, str] = {}
    results: Dict[str, Any] = {}

    def step(name: str, func: Callable[[], None]) -> None:
        try:
            func()
            logger.info(f"Report step {name} completed")
        except (CiteGrowthError, OSError) as e:
            logger.error(f"Report step {name} failed: {e}")
            errors[name] = str(e)

    def write(frame: pd.DataFrame, filename: str) -> None:
        files.append(export.write_csv(frame, output_dir / filename))

    def validation_step() -> None:
        report = validation or validate(corpus)
        write(pd.DataFrame(report.to_rows(), columns=["metric", "key", "value"]), "validation.csv")

    def counts_step() -> None:
        pub = counts.publication_counts(corpus)
        journals = counts.journal_counts(corpus)
        results["publications"], results["journals"] = pub, journals
        write(pub.to_frame(), "publication_counts.csv")
        write(journals.to_frame(), "journal_counts.csv")
        write(counts.fit_table({"publications": pub, "journals": journals}), "growth_fits.csv")

    def growth_step() -> None:
        if "publications" not in results:
            raise ReportError("publication counts are unavailable")
        summary = counts.growth_summary(results["publications"], results["journals"])
        results["growth"] = summary
        write(summary.to_frame(), "growth_summary.csv")

    def distributions_step() -> None:
        if "publications" not in results:
            raise ReportError("publication counts are unavailable")
        matrix = distributions.citation_counts_matrix(corpus)
        first, last = corpus.year_range
        cohorts = options.cohorts(first, last)
        logger.info(f"Cohorts for distributions: {cohorts}")

        peaks = []
        for kind, filename in DISTRIBUTION_FILES.items():
            dists = distributions.cohort_distributions(matrix, cohorts, kind, results["publications"])
            aligned = [distributions.align_to_peak(d) for d in dists]
            results[kind.value] = aligned
            write(distributions.distributions_frame(dists), f"{filename}.csv")
            write(distributions.distributions_frame(aligned, aligned=True), f"{filename}_aligned.csv")
            peaks.extend(distributions.peak_delta_series(dists).values())
        write(distributions.peaks_frame(peaks), "peaks.csv")

    def exponents_step() -> None:
        first, last = corpus.year_range
        centers = options.sweep_centers(first, last)
        trends = []
        for mode, k_min in ((DegreeMode.RAW, options.kmin_raw), (DegreeMode.NORMALIZED, options.kmin_normalized)):
            series = powerlaw.exponent_sweep(
                corpus,
                centers,
                half_width=options.half_width,
                mode=mode,
                k_min=k_min,
                alpha_max=options.alpha_max,
                min_tail=options.min_tail,
            )
            results[f"exponents_{mode.value}"] = series
            write(series.to_frame(), f"exponents_{mode.value}.csv")
            try:
                trend = powerlaw.sweep_trend(series)
                results[f"trend_{mode.value}"] = trend
                trends.append({
                    "mode": mode.value,
                    "slope": trend.slope,
                    "intercept": trend.intercept,
                    "r_squared": trend.r_squared,
                    "n_points": trend.n_points,
                })
            except CiteGrowthError as e:
                logger.warning(f"No exponent trend for {mode.value} mode: {e}")
        write(pd.DataFrame(trends, columns=["mode", "slope", "intercept", "r_squared", "n_points"]), "exponent_trends.csv")

    def charts_step() -> None:
        files.extend(_write_charts(output_dir, results))

    step("validation", validation_step)
    step("counts", counts_step)
    step("growth", growth_step)
    if corpus.is_empty:
        errors["distributions"] = errors["exponents"] = "corpus is empty"
    else:
        step("distributions", distributions_step)
        step("exponents", exponents_step)
    if options.emit_svg:
        step("charts", charts_step)

    logger.info(f"Report finished: {len(files)} files written, {len(errors)} steps failed")
    if errors:
        raise ReportError(f"Report steps failed: {', '.join(sorted(errors))}", step_errors=errors)

    return {
        "status": "completed",
        "files": [str(path) for path in files],
        "errors": errors,
    }


def _write_charts(output_dir: Path, results: Dict[str, Any]) -> List[Path]:
    """По одному SVG на набор данных; отсутствующие данные пропускаются, прямые МНК - пунктиром"""
    written: List[Path] = []

    pub, journals = results.get("publications"), results.get("journals")
    summary = results.get("growth")
    if pub is not None:
        written.append(export.write_line_chart(
            output_dir / "publication_counts.svg",
            {"publications": (pub.years, pub.values)},
            title="Publications per year",
            xlabel="Year",
            ylabel="Papers",
            log_y=True,
            fits=None if summary is None else {
                "exponential": (pub.years, [summary.publications.predict(y) for y in pub.years]),
            },
        ))
        written.append(export.write_line_chart(
            output_dir / "journal_counts.svg",
            {"journals": (journals.years, journals.values)},
            title="Journals per year",
            xlabel="Year",
            ylabel="Journals",
            fits=None if summary is None else {
                "linear": (journals.years, [summary.journals.predict(y) for y in journals.years]),
            },
        ))

    for kind, filename in DISTRIBUTION_FILES.items():
        dists = results.get(kind.value)
        if not dists:
            continue
        written.append(export.write_line_chart(
            output_dir / f"{filename}_aligned.svg",
            {str(d.cohort_year): (d.support, d.probabilities) for d in dists},
            title=f"{kind.value.replace('_', ' ').capitalize()} distributions",
            xlabel="Year - Peak Year",
            ylabel="Proportion",
        ))

    lines, trends = {}, {}
    for mode in DegreeMode:
        series = results.get(f"exponents_{mode.value}")
        if series is not None and series.fits:
            centers = list(series.fits)
            lines[mode.value] = (centers, [fit.alpha for fit in series.fits.values()])
            trend = results.get(f"trend_{mode.value}")
            if trend is not None:
                trends[mode.value] = (centers, [trend.predict(c) for c in centers])
    if lines:
        written.append(export.write_line_chart(
            output_dir / "exponents.svg",
            lines,
            title="Power-law exponents",
            xlabel="Window center year",
            ylabel="alpha",
            fits=trends,
        ))
    return written
