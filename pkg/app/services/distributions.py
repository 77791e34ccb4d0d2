# app/services/distributions.py
import logging
import math
from typing import Dict, Iterable, List, Mapping, Optional

import numpy as np
import pandas as pd

from app.core.config import settings
from app.core.exceptions import DistributionError
from app.models.corpus import Corpus
from app.models.matrix import CitationMatrix
from app.schemas.counts import YearSeries
from app.schemas.distributions import CohortDistribution, DistributionKind, PeakStats

logger = logging.getLogger(__name__)

TIE_TOLERANCE = 1e-12


def citation_counts_matrix(corpus: Corpus) -> CitationMatrix:
    """
    n_y^x по всем ссылкам корпуса.

    Пары с x < y - 1 (цитирование задолго до публикации) в ячейки не
    попадают, а только увеличивают счётчик excluded.
    """
    if corpus.edge_count == 0:
        return CitationMatrix()

    cited_years = corpus.cited_years
    citing_years = corpus.citing_years
    valid = citing_years >= cited_years - settings.PREPUB_TOLERANCE
    excluded = int(np.count_nonzero(~valid))

    cited_years, citing_years = cited_years[valid], citing_years[valid]
    cells: Dict = {}
    if len(cited_years):
        base = int(min(cited_years.min(), citing_years.min()))
        span = int(max(cited_years.max(), citing_years.max())) - base + 1
        keys = (cited_years - base) * span + (citing_years - base)
        tally = np.bincount(keys, minlength=span * span)
        for key in np.flatnonzero(tally):
            cited, citing = divmod(int(key), span)
            cells[(cited + base, citing + base)] = int(tally[key])

    if excluded:
        logger.warning(f"{excluded} citations precede the cited paper by more than one year and are excluded")
    logger.debug(f"Citation matrix: {len(cells)} cells, {sum(cells.values())} citations")
    return CitationMatrix(cells=cells, excluded=excluded)


def _normalize(cohort_year: int, kind: DistributionKind, weights: Mapping[int, float]) -> CohortDistribution:
    support = sorted(weights)
    total = math.fsum(weights[x] for x in support)
    return CohortDistribution(
        cohort_year=cohort_year,
        kind=kind,
        support=support,
        probabilities=[weights[x] / total for x in support],
    )


def citation_distribution(matrix: CitationMatrix, y: int) -> CohortDistribution:
    """P_y(x) = n_y^x / sum_{x' >= y-1} n_y^x'"""
    row = matrix.citations_to(y)
    if not row:
        raise DistributionError(f"Cohort {y} received no citations")
    return _normalize(y, DistributionKind.CITATION, row)


def normalized_citation_distribution(matrix: CitationMatrix, pub_counts: YearSeries, y: int) -> CohortDistribution:
    """P̂_y(x): каждая ссылка из года x весит 1/n_x, затем нормировка к 1"""
    row = matrix.citations_to(y)
    if not row:
        raise DistributionError(f"Cohort {y} received no citations")

    weights: Dict[int, float] = {}
    for x, count in row.items():
        n_x = pub_counts.get(x, 0)
        if n_x <= 0:
            raise DistributionError(
                f"Citing year {x} has {count} citations to cohort {y} but no publications in the counts"
            )
        weights[x] = count / n_x
    return _normalize(y, DistributionKind.NORMALIZED_CITATION, weights)


def reference_distribution(matrix: CitationMatrix, y: int) -> CohortDistribution:
    """R_y(x) = n_x^y / sum_{x' <= y+1} n_x'^y - куда ссылается когорта y"""
    column = matrix.references_from(y)
    if not column:
        raise DistributionError(f"Cohort {y} made no in-corpus references")
    return _normalize(y, DistributionKind.REFERENCE, column)


def peak_stats(dist: CohortDistribution, anchor_year: int) -> PeakStats:
    """
    Пик распределения.

    При равных значениях выигрывает год, ближайший к anchor_year, затем
    более ранний.
    """
    if dist.is_empty:
        raise DistributionError(f"Distribution of cohort {dist.cohort_year} is empty")

    top = max(dist.probabilities)
    candidates = [
        x for x, p in zip(dist.support, dist.probabilities)
        if p >= top - TIE_TOLERANCE * top
    ]
    peak_year = min(candidates, key=lambda x: (abs(x - anchor_year), x))
    return PeakStats(
        cohort_year=dist.cohort_year,
        kind=dist.kind,
        peak_year=peak_year,
        peak_value=dist.get(peak_year),
        peak_delta=peak_year - anchor_year,
        anchor_year=anchor_year,
    )


def align_to_peak(dist: CohortDistribution) -> CohortDistribution:
    """Сдвиг носителя так, чтобы пик оказался в нуле ("Cited Year - Peak Year")"""
    if dist.is_empty:
        raise DistributionError(f"Distribution of cohort {dist.cohort_year} is empty")
    if dist.aligned:
        return dist

    peak = peak_stats(dist, dist.cohort_year)
    return dist.model_copy(update={
        "support": [x - peak.peak_year for x in dist.support],
        "aligned": True,
    })


def reference_age_share(dist: CohortDistribution, age: int) -> float:
    """Доля ссылок на статьи возраста `age` (cohort_year - x)"""
    if dist.kind != DistributionKind.REFERENCE or dist.aligned:
        raise DistributionError("Reference age share needs an unaligned reference distribution")
    return dist.get(dist.cohort_year - age)


def cohort_distributions(
    matrix: CitationMatrix,
    cohorts: Iterable[int],
    kind: DistributionKind,
    pub_counts: Optional[YearSeries] = None,
) -> List[CohortDistribution]:
    """Распределения для набора когорт; когорты без данных пропускаются"""
    if kind == DistributionKind.NORMALIZED_CITATION and pub_counts is None:
        raise DistributionError("Normalized citation distributions need publication counts")

    result: List[CohortDistribution] = []
    for y in cohorts:
        try:
            if kind == DistributionKind.CITATION:
                result.append(citation_distribution(matrix, y))
            elif kind == DistributionKind.NORMALIZED_CITATION:
                result.append(normalized_citation_distribution(matrix, pub_counts, y))
            else:
                result.append(reference_distribution(matrix, y))
        except DistributionError as e:
            logger.warning(f"Skipping cohort {y} ({kind.value}): {e}")
    return result


def peak_delta_series(
    distributions: Iterable[CohortDistribution],
    anchors: Optional[Mapping[int, int]] = None,
) -> Dict[int, PeakStats]:
    """cohort_year -> PeakStats; якорь по умолчанию - год когорты"""
    series: Dict[int, PeakStats] = {}
    for dist in distributions:
        anchor = (anchors or {}).get(dist.cohort_year, dist.cohort_year)
        series[dist.cohort_year] = peak_stats(dist, anchor)
    return dict(sorted(series.items()))


def max_pointwise_gap(first: CohortDistribution, second: CohortDistribution) -> float:
    """max |P1(x) - P2(x)| по объединению носителей"""
    p1, p2 = first.as_dict(), second.as_dict()
    return max((abs(p1.get(x, 0.0) - p2.get(x, 0.0)) for x in set(p1) | set(p2)), default=0.0)


def distributions_frame(distributions: Iterable[CohortDistribution], aligned: bool = False) -> pd.DataFrame:
    """Длинная таблица по когортам, строки по (cohort_year, x)"""
    axis = "offset" if aligned else "x"
    columns = ["cohort_year", "kind", axis, "probability"]
    frames = [dist.to_frame() for dist in sorted(distributions, key=lambda d: d.cohort_year)]
    if not frames:
        return pd.DataFrame(columns=columns)
    return pd.concat(frames, ignore_index=True)[columns]


def peaks_frame(peaks: Iterable[PeakStats]) -> pd.DataFrame:
    columns = ["cohort_year", "kind", "peak_year", "peak_value", "peak_delta", "anchor_year"]
    rows = [peak.model_dump(mode="json") for peak in peaks]
    return pd.DataFrame(rows, columns=columns)
