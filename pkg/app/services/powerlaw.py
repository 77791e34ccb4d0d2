# app/services/powerlaw.py
import logging
import math
from typing import Iterable, Optional

import numpy as np
import pandas as pd
from scipy.optimize import minimize_scalar
from scipy.special import zeta

from app.core.config import settings
from app.core.exceptions import FitError, SeriesError, SweepError, WindowError
from app.models.corpus import Corpus
from app.models.degree import DegreeHistogram, DegreeSample
from app.schemas.counts import LineFit
from app.schemas.powerlaw import DegreeMode, ExponentSeries, PowerLawFit, SweepEntry
from app.services.counts import fit_linear_points

logger = logging.getLogger(__name__)

# alpha -> 1 даёт расходящуюся zeta; нижняя граница интервала поиска
ALPHA_FLOOR = 1.0 + 1e-6
# шаг центральных разностей для производных zeta по alpha
ZETA_STEP = 1e-5
BOUNDARY_TOLERANCE = 1e-3


def indegree_sample(corpus: Corpus, y1: int, y2: int, mode: DegreeMode = DegreeMode.RAW) -> DegreeSample:
    """
    Входящие степени статей, опубликованных в [y1, y2].

    Учитываются только ссылки из статей того же окна. В режиме normalized
    ссылка из года y весит 1/n_y, где n_y - число статей года во всём корпусе.
    """
    if y1 > y2:
        raise WindowError(f"Window start {y1} is after window end {y2}")

    years = corpus.years
    in_window = (years >= y1) & (years <= y2)
    members = np.flatnonzero(in_window)
    if len(members) == 0:
        raise WindowError(f"No papers published in [{y1}, {y2}]")

    citing, cited = corpus.citing_index, corpus.cited_index
    inside = in_window[citing] & in_window[cited]
    n = corpus.paper_count

    if mode == DegreeMode.RAW:
        degrees = np.bincount(cited[inside], minlength=n)[members].astype(np.int64)
    else:
        first = int(years.min())
        pub = np.bincount(years - first)
        weights = 1.0 / pub[corpus.citing_years[inside] - first]
        degrees = np.bincount(cited[inside], weights=weights, minlength=n)[members].astype(float)

    logger.debug(f"Window [{y1}, {y2}] ({mode.value}): {len(members)} papers, {int(inside.sum())} citations")
    return DegreeSample(
        y1=y1,
        y2=y2,
        mode=mode,
        values=degrees,
        paper_ids=corpus.ids[members],
        edge_count=int(inside.sum()),
    )


def degree_histogram(sample: DegreeSample) -> DegreeHistogram:
    """P_{y1y2}(k) = sum_i delta(k_i, k) / n_{y1y2}"""
    if sample.mode != DegreeMode.RAW:
        raise FitError("Degree histogram needs a raw sample; use complementary_cdf for normalized degrees")

    ks, counts = np.unique(sample.values, return_counts=True)
    n = sample.n_papers
    return DegreeHistogram(
        y1=sample.y1,
        y2=sample.y2,
        probabilities={int(k): int(c) / n for k, c in zip(ks, counts)},
        n_papers=n,
    )


def complementary_cdf(sample: DegreeSample) -> pd.DataFrame:
    """P(K >= k) по различным значениям выборки (ранговая форма)"""
    values = np.sort(np.asarray(sample.values, dtype=float))
    ks, first_index = np.unique(values, return_index=True)
    n = len(values)
    return pd.DataFrame({"k": ks, "ccdf": (n - first_index) / n})


def _tail(sample: DegreeSample, k_min: float, min_tail: int) -> np.ndarray:
    tail = np.asarray(sample.values, dtype=float)
    tail = tail[tail >= k_min]
    if len(tail) < min_tail:
        raise FitError(f"Only {len(tail)} values at or above k_min={k_min}; at least {min_tail} required")
    return tail


def _discrete_sigma(alpha: float, k_min: int, n_tail: int) -> Optional[float]:
    # информация Фишера: d2/dalpha2 ln zeta(alpha, k_min)
    h = ZETA_STEP
    z = zeta(alpha, k_min)
    z_plus, z_minus = zeta(alpha + h, k_min), zeta(alpha - h, k_min)
    first = (z_plus - z_minus) / (2 * h)
    second = (z_plus - 2 * z + z_minus) / h ** 2
    information = second / z - (first / z) ** 2
    if not information > 0:
        return None
    return 1.0 / math.sqrt(n_tail * information)


def discrete_log_likelihood(alpha, n_tail: int, log_sum: float, k_min: int):
    """L(alpha) = -n ln zeta(alpha, k_min) - alpha * sum ln k_i"""
    return -n_tail * np.log(zeta(alpha, k_min)) - alpha * log_sum


def fit_power_law_discrete(
    sample: DegreeSample,
    k_min: int = settings.DEFAULT_KMIN_RAW,
    alpha_max: float = settings.ALPHA_MAX,
    min_tail: int = settings.MIN_TAIL,
) -> PowerLawFit:
    """
    ММП для дискретного степенного закона с нормировкой zeta Гурвица.

    Максимум ищется на (1, alpha_max]; если он на границе интервала,
    возвращается alpha_max и converged=False.
    """
    if sample.mode != DegreeMode.RAW:
        raise FitError("Discrete power-law fit needs a raw sample")
    if int(k_min) != k_min or k_min < 1:
        raise FitError(f"Discrete k_min must be a positive integer, got {k_min}")
    k_min = int(k_min)

    tail = _tail(sample, k_min, min_tail)
    n_tail = len(tail)
    log_sum = float(np.log(tail).sum())

    def negative(alpha: float) -> float:
        return -discrete_log_likelihood(alpha, n_tail, log_sum, k_min)

    result = minimize_scalar(
        negative,
        bounds=(ALPHA_FLOOR, alpha_max),
        method="bounded",
        options={"xatol": 1e-8},
    )
    alpha = float(result.x)
    at_boundary = alpha >= alpha_max - BOUNDARY_TOLERANCE or negative(alpha_max) <= result.fun

    if at_boundary:
        logger.warning(f"Discrete fit [{sample.y1}, {sample.y2}] hit alpha_max={alpha_max} (n_tail={n_tail})")
        alpha = alpha_max

    return PowerLawFit(
        alpha=alpha,
        k_min=k_min,
        n_tail=n_tail,
        log_likelihood=float(discrete_log_likelihood(alpha, n_tail, log_sum, k_min)),
        converged=not at_boundary,
        discrete=True,
        sigma=None if at_boundary else _discrete_sigma(alpha, k_min, n_tail),
    )


def smallest_positive(sample: DegreeSample) -> float:
    positive = np.asarray(sample.values, dtype=float)
    positive = positive[positive > 0]
    if len(positive) == 0:
        raise FitError(f"Window [{sample.y1}, {sample.y2}] has no positive degrees")
    return float(positive.min())


def fit_power_law_continuous(
    sample: DegreeSample,
    k_min: Optional[float] = None,
    alpha_max: float = settings.ALPHA_MAX,
    min_tail: int = settings.MIN_TAIL,
) -> PowerLawFit:
    """
    Оценка Хилла: alpha = 1 + n / sum ln(k_i / k_min).

    По умолчанию k_min - наименьшая положительная степень выборки.
    """
    if k_min is None:
        k_min = smallest_positive(sample)
    if not k_min > 0:
        raise FitError(f"Continuous k_min must be positive, got {k_min}")

    tail = _tail(sample, k_min, min_tail)
    n_tail = len(tail)
    log_ratio = np.log(tail / k_min)
    denominator = float(log_ratio.sum())
    if denominator <= 0.0:
        raise FitError(f"All {n_tail} tail values equal k_min={k_min}; the estimator is undefined")

    alpha = 1.0 + n_tail / denominator
    converged = alpha <= alpha_max
    if not converged:
        logger.warning(f"Continuous fit [{sample.y1}, {sample.y2}] gave alpha={alpha:.3f} above alpha_max={alpha_max}")
        alpha = alpha_max

    log_likelihood = n_tail * math.log((alpha - 1.0) / k_min) - alpha * denominator
    return PowerLawFit(
        alpha=alpha,
        k_min=float(k_min),
        n_tail=n_tail,
        log_likelihood=log_likelihood,
        converged=converged,
        discrete=False,
        sigma=(alpha - 1.0) / math.sqrt(n_tail) if converged else None,
    )


def exponent_sweep(
    corpus: Corpus,
    centers: Iterable[int],
    half_width: int = settings.HALF_WIDTH,
    mode: DegreeMode = DegreeMode.RAW,
    k_min: Optional[float] = None,
    alpha_max: float = settings.ALPHA_MAX,
    min_tail: int = settings.MIN_TAIL,
) -> ExponentSeries:
    """
    alpha по окнам [c - half_width, c + half_width] (включительно).

    raw -> дискретная ММП, normalized -> оценка Хилла. Центры, для
    которых оценка не удалась, остаются в ряду без fit и с причиной.
    """
    centers = sorted(set(int(c) for c in centers))
    if not centers:
        raise SweepError("Exponent sweep needs at least one window center")
    if half_width < 0:
        raise SweepError(f"half_width must be non-negative, got {half_width}")

    year_range = corpus.year_range
    entries = []
    for center in centers:
        start, end = center - half_width, center + half_width
        entry = SweepEntry(center=center, window_start=start, window_end=end)

        if year_range is None or end < year_range[0] or start > year_range[1]:
            entry.reason = f"window [{start}, {end}] outside corpus years {year_range}"
            logger.warning(f"Sweep center {center}: {entry.reason}")
            entries.append(entry)
            continue

        try:
            sample = indegree_sample(corpus, start, end, mode)
            if mode == DegreeMode.RAW:
                entry.fit = fit_power_law_discrete(
                    sample,
                    k_min=k_min if k_min is not None else settings.DEFAULT_KMIN_RAW,
                    alpha_max=alpha_max,
                    min_tail=min_tail,
                )
            else:
                entry.fit = fit_power_law_continuous(sample, k_min=k_min, alpha_max=alpha_max, min_tail=min_tail)
            logger.debug(f"Sweep center {center} ({mode.value}): alpha={entry.fit.alpha:.4f}, n_tail={entry.fit.n_tail}")
        except (FitError, WindowError) as e:
            entry.reason = str(e)
            logger.warning(f"Sweep center {center}: {e}")
        entries.append(entry)

    series = ExponentSeries(mode=mode, half_width=half_width, entries=entries)
    logger.info(f"Exponent sweep ({mode.value}): {len(series.fits)} of {len(centers)} centers fitted")
    return series


def sweep_trend(series: ExponentSeries, converged_only: bool = True) -> LineFit:
    """Прямая МНК по alpha(center) - тренд показателя во времени"""
    points = {
        center: fit.alpha
        for center, fit in series.fits.items()
        if fit.converged or not converged_only
    }
    try:
        return fit_linear_points(list(points), list(points.values()))
    except SeriesError as e:
        raise SweepError(f"Not enough fitted centers for a trend: {e}") from e
