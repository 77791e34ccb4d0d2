# app/services/synth.py
import logging
from typing import Any, Dict, Tuple, Union

import numpy as np
from pydantic import ValidationError

from app.core.exceptions import SynthConfigError
from app.models.corpus import Corpus
from app.schemas.corpus import DocType
from app.schemas.synth import PRESETS, Attachment, SynthConfig, SynthStats

logger = logging.getLogger(__name__)

ConfigLike = Union[SynthConfig, Dict[str, Any]]


def make_config(config: ConfigLike) -> SynthConfig:
    """SynthConfig из словаря (JSON) с переводом ошибок валидации в SynthConfigError"""
    if isinstance(config, SynthConfig):
        return config
    try:
        params = dict(config)
        preset = params.pop("preset", None)
        if preset is None:
            return SynthConfig(**params)
        if preset not in PRESETS:
            raise SynthConfigError(f"Unknown preset {preset!r}; expected one of {sorted(PRESETS)}")
        return PRESETS[preset](**params)
    except ValidationError as e:
        raise SynthConfigError(f"Invalid synth config: {e}") from e
    except TypeError as e:
        raise SynthConfigError(f"Invalid synth config: {e}") from e


def _create_papers(config: SynthConfig, rng: np.random.Generator):
    sizes = np.asarray(config.papers_per_year(), dtype=np.int64)
    offsets = np.concatenate(([0], np.cumsum(sizes)))

    ids, years, venues = [], [], []
    for t, size in enumerate(sizes):
        year = config.start_year + t
        venue_index = rng.integers(0, config.journal_regime.venue_count(t), size=size)
        ids.extend(f"P{year}-{i:06d}" for i in range(size))
        years.append(np.full(size, year, dtype=np.int64))
        venues.extend(f"J{v:04d}" for v in venue_index)

    years = np.concatenate(years) if len(years) else np.empty(0, dtype=np.int64)
    return ids, years, venues, sizes, offsets


def _pick_targets(
    cohorts: np.ndarray,
    sizes: np.ndarray,
    offsets: np.ndarray,
    indegree: np.ndarray,
    attachment: Attachment,
    rng: np.random.Generator,
) -> np.ndarray:
    """Статья внутри выбранной когорты: равномерно или ~ (in-degree + 1)"""
    if attachment == Attachment.UNIFORM:
        return offsets[cohorts] + np.floor(rng.random(len(cohorts)) * sizes[cohorts]).astype(np.int64)

    targets = np.empty(len(cohorts), dtype=np.int64)
    for cohort in np.unique(cohorts):
        slots = np.flatnonzero(cohorts == cohort)
        start, stop = offsets[cohort], offsets[cohort + 1]
        weights = indegree[start:stop] + 1.0
        targets[slots] = start + rng.choice(stop - start, size=len(slots), p=weights / weights.sum())
    return targets


def generate_with_stats(config: ConfigLike) -> Tuple[Corpus, SynthStats]:
    """
    Растущий корпус по SynthConfig и статистика отброшенных ссылок.

    Все статьи создаются заранее; затем по годам: число ссылок ~ Poisson(R * d^t),
    возраст цели из ядра (или -1 с вероятностью epsilon), когорта вне
    корпуса - ссылка отбрасывается без повторной попытки.
    """
    config = make_config(config)
    rng = np.random.default_rng(config.seed)
    logger.info(f"Generating corpus: {config.describe()}")

    ids, years, venues, sizes, offsets = _create_papers(config, rng)
    n_papers = int(offsets[-1])
    age_weights = config.age_kernel.weights(config.years)
    indegree = np.zeros(n_papers, dtype=np.int64)
    stats = SynthStats(papers=n_papers)

    citing_parts, cited_parts = [], []
    for t in range(config.years):
        size = int(sizes[t])
        references = rng.poisson(config.refs_mean_at(t), size=size)
        total = int(references.sum())
        stats.requested_references += total
        if total == 0:
            continue

        citers = np.repeat(np.arange(offsets[t], offsets[t + 1], dtype=np.int64), references)
        ages = rng.choice(config.years, size=total, p=age_weights)
        ages = np.where(rng.random(total) < config.epsilon, -1, ages)

        cohorts = t - ages
        feasible = (cohorts >= 0) & (cohorts < config.years)
        stats.truncated += int((~feasible).sum())
        citers, cohorts = citers[feasible], cohorts[feasible]

        targets = _pick_targets(cohorts, sizes, offsets, indegree, config.attachment, rng)

        not_self = citers != targets
        stats.self_dropped += int((~not_self).sum())
        citers, targets = citers[not_self], targets[not_self]

        pairs = np.unique(citers * n_papers + targets)
        stats.duplicate_dropped += len(citers) - len(pairs)
        citers, targets = pairs // n_papers, pairs % n_papers

        # степени обновляются после года: внутри года веса постоянны
        indegree += np.bincount(targets, minlength=n_papers)
        citing_parts.append(citers)
        cited_parts.append(targets)
        logger.debug(f"Year {config.start_year + t}: {size} papers, {len(citers)} references")

    citing = np.concatenate(citing_parts) if citing_parts else np.empty(0, dtype=np.int64)
    cited = np.concatenate(cited_parts) if cited_parts else np.empty(0, dtype=np.int64)
    stats.emitted = int(len(citing))

    corpus = Corpus.from_arrays(
        ids=ids,
        years=years,
        venues=venues,
        doc_types=[DocType.ARTICLE.value] * n_papers,
        citing=citing,
        cited=cited,
    )
    logger.info(
        f"Generated {corpus.paper_count} papers and {corpus.edge_count} citations "
        f"(requested {stats.requested_references}, truncated {stats.truncated}, "
        f"self {stats.self_dropped}, duplicates {stats.duplicate_dropped})"
    )
    return corpus, stats


def generate(config: ConfigLike) -> Corpus:
    corpus, _ = generate_with_stats(config)
    return corpus
