# app/services/counts.py
import logging
import math
from typing import Dict, Optional, Sequence

import numpy as np
import pandas as pd

from app.core.exceptions import EmptyCorpusError, SeriesError
from app.models.corpus import Corpus
from app.schemas.counts import ExpFit, GrowthRegime, GrowthSummary, LineFit, YearSeries

logger = logging.getLogger(__name__)


def publication_counts(corpus: Corpus) -> YearSeries:
    """n_y для каждого года диапазона корпуса (нули включаются)"""
    if corpus.is_empty:
        raise EmptyCorpusError("Cannot count publications of an empty corpus")

    first, last = corpus.year_range
    counts = np.bincount(corpus.years - first, minlength=last - first + 1)
    return YearSeries(counts={first + i: int(c) for i, c in enumerate(counts)})


def journal_counts(corpus: Corpus) -> YearSeries:
    """Число различных журналов с хотя бы одной статьёй в году"""
    if corpus.is_empty:
        raise EmptyCorpusError("Cannot count journals of an empty corpus")

    first, last = corpus.year_range
    frame = pd.DataFrame({"year": corpus.years, "venue": corpus.venues})
    per_year = frame.drop_duplicates().groupby("year").size()
    per_year = per_year.reindex(range(first, last + 1), fill_value=0)
    return YearSeries(counts={int(y): int(c) for y, c in per_year.items()})


def _least_squares(x: np.ndarray, y: np.ndarray):
    # нормальные уравнения в центрированных координатах
    x_mean, y_mean = x.mean(), y.mean()
    dx, dy = x - x_mean, y - y_mean
    sxx = float(np.dot(dx, dx))
    slope = float(np.dot(dx, dy)) / sxx
    intercept = float(y_mean - slope * x_mean)

    ss_tot = float(np.dot(dy, dy))
    residuals = y - (slope * x + intercept)
    ss_res = float(np.dot(residuals, residuals))
    if ss_tot == 0.0:
        r_squared = 1.0
    else:
        r_squared = min(max(1.0 - ss_res / ss_tot, 0.0), 1.0)
    return slope, intercept, r_squared


def _require_points(series: YearSeries) -> None:
    if len(series) < 2:
        raise SeriesError(f"At least 2 distinct years are required for a fit, got {len(series)}")


def fit_linear(series: YearSeries) -> LineFit:
    """Обычный МНК: count = slope * year + intercept"""
    _require_points(series)
    return fit_linear_points(series.years, series.values)


def fit_linear_points(xs: Sequence[float], ys: Sequence[float]) -> LineFit:
    """То же для произвольных точек (например, показатели alpha по центрам окон)"""
    if len(xs) != len(ys):
        raise SeriesError("x and y must have equal length")
    if len(set(xs)) < 2:
        raise SeriesError(f"At least 2 distinct x values are required for a fit, got {len(set(xs))}")
    x = np.asarray(xs, dtype=float)
    y = np.asarray(ys, dtype=float)
    slope, intercept, r_squared = _least_squares(x, y)
    return LineFit(slope=slope, intercept=intercept, r_squared=r_squared, n_points=len(x))


def fit_exponential(series: YearSeries) -> ExpFit:
    """
    Лог-линейный МНК: ln(count) = ln(amplitude) + (year - first_year) * ln(growth_rate).

    Годы с нулевым числом статей - ошибка; окно лет выбирает вызывающий.
    """
    _require_points(series)
    non_positive = [year for year, count in series.counts.items() if count <= 0]
    if non_positive:
        raise SeriesError(f"Exponential fit needs positive counts; zero in years {non_positive[:5]}")

    base_year = series.years[0]
    x = np.asarray(series.years, dtype=float) - base_year
    y = np.log(np.asarray(series.values, dtype=float))
    slope, intercept, r_squared = _least_squares(x, y)
    return ExpFit(
        amplitude=math.exp(intercept),
        growth_rate=math.exp(slope),
        r_squared_log=r_squared,
        base_year=base_year,
        n_points=len(series),
    )


def sample_years(series: YearSeries, step: int, start: Optional[int] = None) -> YearSeries:
    """Каждый step-й год начиная со start (по умолчанию - первый год ряда)"""
    if step < 1:
        raise SeriesError(f"Sampling step must be positive, got {step}")
    if not len(series):
        return series
    start = series.years[0] if start is None else start
    return YearSeries(counts={y: c for y, c in series.counts.items() if y >= start and (y - start) % step == 0})


def longest_positive_run(series: YearSeries) -> YearSeries:
    """Самый длинный отрезок подряд идущих лет с ненулевым счётом (при равенстве - более ранний)"""
    best = None
    start = previous = None
    for year, count in series.counts.items():
        if count <= 0:
            start = None
        elif start is None or year != previous + 1:
            start = year
        previous = year
        if start is not None and (best is None or year - start > best[1] - best[0]):
            best = (start, year)
    return series.window(*best) if best else YearSeries()


def growth_summary(publications: YearSeries, journals: YearSeries, venue_share_threshold: float = 0.5) -> GrowthSummary:
    """
    Рост за счёт новых журналов или за счёт объёма существующих.

    venue_share = ln(J_last / J_first) / ln(n_last / n_first): какая доля
    (логарифмического) роста публикаций объясняется ростом числа журналов.
    """
    fitted = longest_positive_run(publications)
    if 0 < len(fitted) < len(publications):
        logger.warning(f"Publication counts have empty years; exponential fit uses {fitted.years[0]}-{fitted.years[-1]}")
    pub_fit = fit_exponential(fitted)
    journal_fit = fit_linear(journals)

    first, last = publications.years[0], publications.years[-1]
    if journals.get(first) <= 0 or journals.get(last) <= 0:
        raise SeriesError(f"Journal counts must be positive at both ends of [{first}, {last}]")

    publication_ratio = publications[last] / publications[first]
    journal_ratio = journals[last] / journals[first]
    if publication_ratio > 1.0:
        venue_share = math.log(journal_ratio) / math.log(publication_ratio)
    else:
        venue_share = 0.0

    regime = GrowthRegime.VENUE_GROWTH if venue_share >= venue_share_threshold else GrowthRegime.VOLUME_GROWTH
    logger.info(
        f"Growth {first}-{last}: publications x{publication_ratio:.2f}, journals x{journal_ratio:.2f}, "
        f"venue share {venue_share:.2f} -> {regime.value}"
    )
    return GrowthSummary(
        publications=pub_fit,
        journals=journal_fit,
        publication_ratio=publication_ratio,
        journal_ratio=journal_ratio,
        venue_share=venue_share,
        regime=regime,
        span=(first, last),
    )


FIT_COLUMNS = ["series", "model", "slope", "intercept", "growth_rate", "amplitude", "r_squared", "n_points"]


def fit_table(series_by_name: Dict[str, YearSeries]) -> pd.DataFrame:
    """
    Линейная и экспоненциальная аппроксимации для каждого ряда.

    Аппроксимация, которая не строится (например, нули для exp), пропускается.
    """
    rows = []
    for name, series in series_by_name.items():
        try:
            line = fit_linear(series)
            rows.append({
                "series": name, "model": "linear", "slope": line.slope, "intercept": line.intercept,
                "r_squared": line.r_squared, "n_points": line.n_points,
            })
        except SeriesError as e:
            logger.warning(f"Linear fit of {name} skipped: {e}")
        try:
            exp = fit_exponential(series)
            rows.append({
                "series": name, "model": "exponential", "growth_rate": exp.growth_rate,
                "amplitude": exp.amplitude, "r_squared": exp.r_squared_log, "n_points": exp.n_points,
            })
        except SeriesError as e:
            logger.warning(f"Exponential fit of {name} skipped: {e}")
    return pd.DataFrame(rows, columns=FIT_COLUMNS)
