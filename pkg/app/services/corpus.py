# app/services/corpus.py
import logging
from collections import Counter
from pathlib import Path
from typing import Iterable, List, Optional, Sequence, TextIO, Tuple, Union

import numpy as np
import pandas as pd
from pydantic import ValidationError

from app.core.config import settings
from app.core.exceptions import (
    DanglingEdgeError,
    DuplicatePaperError,
    FilterConfigError,
    MalformedRecordError,
)
from app.models.corpus import CitationEdge, Corpus, PaperRecord
from app.schemas.corpus import DocType, DropReason, FilterConfig, ValidationReport
from app.services.export import atomic_path

logger = logging.getLogger(__name__)

Source = Union[str, Path, TextIO, Iterable[str]]

PAPER_COLUMNS = ["id", "year", "venue", "doc_type"]
CITATION_COLUMNS = ["citing_id", "cited_id"]


def _source_name(source: Source, default: str) -> str:
    if isinstance(source, (str, Path)):
        return str(source)
    return getattr(source, "name", default)


def _read_lines(source: Source) -> List[str]:
    """Чтение источника в список строк (путь, текстовый поток или итерируемое строк)"""
    if isinstance(source, (str, Path)):
        with open(source, encoding="utf-8") as fh:
            return fh.read().splitlines()
    if hasattr(source, "read"):
        return source.read().splitlines()
    return [line.rstrip("\r\n") for line in source]


def _parse_table(lines: Sequence[str], columns: List[str], source_name: str) -> pd.DataFrame:
    """
    Разбор TSV со строкой заголовка.

    Пустые строки и строки, начинающиеся с '#', пропускаются. Возвращает
    DataFrame со столбцами `columns` и `line_number` (нумерация с 1).
    """
    frame = pd.DataFrame({"raw": pd.Series(list(lines), dtype=object)})
    frame["line_number"] = np.arange(1, len(frame) + 1)

    if not frame.empty:
        raw = frame["raw"].astype(str)
        keep = (raw.str.strip() != "") & ~raw.str.startswith("#")
        frame = frame[keep]

    empty = pd.DataFrame({name: pd.Series(dtype=object) for name in columns})
    empty["line_number"] = pd.Series(dtype=np.int64)
    if frame.empty:
        return empty

    # Первая значимая строка - заголовок
    header_line = int(frame["line_number"].iloc[0])
    header = [field.strip().lower() for field in str(frame["raw"].iloc[0]).split("\t")]
    if header != columns:
        expected, found = "\t".join(columns), "\t".join(header)
        raise MalformedRecordError(
            f"header must be {expected!r}, found {found!r}",
            source_name,
            header_line,
        )
    frame = frame.iloc[1:]
    if frame.empty:
        return empty

    field_counts = frame["raw"].str.count("\t") + 1
    bad = frame[field_counts != len(columns)]
    if not bad.empty:
        line_number = int(bad["line_number"].iloc[0])
        found = int(field_counts[bad.index[0]])
        raise MalformedRecordError(
            f"expected {len(columns)} tab-separated fields, found {found}",
            source_name,
            line_number,
        )

    parts = frame["raw"].str.split("\t", expand=True)
    parts.columns = columns
    for name in columns:
        parts[name] = parts[name].str.strip()

    blank = (parts[columns[0]] == "")
    if len(columns) > 1:
        blank |= (parts[columns[1]] == "")
    if blank.any():
        line_number = int(frame.loc[blank[blank].index[0], "line_number"])
        raise MalformedRecordError("empty key field", source_name, line_number)

    parts["line_number"] = frame["line_number"].to_numpy()
    return parts.reset_index(drop=True)


def _parse_years(parts: pd.DataFrame, source_name: str) -> np.ndarray:
    years = pd.to_numeric(parts["year"], errors="coerce")
    invalid = years.isna() | (years != np.floor(years))
    if invalid.any():
        first = invalid[invalid].index[0]
        raise MalformedRecordError(
            f"year {parts.loc[first, 'year']!r} is not an integer",
            source_name,
            int(parts.loc[first, "line_number"]),
        )
    return years.to_numpy(dtype=np.int64)


def _check_filter(filter_config: Optional[FilterConfig]) -> FilterConfig:
    if filter_config is None:
        return FilterConfig()
    if not filter_config.allowed_doc_types:
        raise FilterConfigError("allowed_doc_types must not be empty")
    return filter_config


def make_filter(
    allowed_doc_types: Optional[Iterable[str]] = None,
    year_min: Optional[int] = None,
    year_max: Optional[int] = None,
    drop_dangling: bool = True,
) -> FilterConfig:
    """Построение FilterConfig с переводом ошибок валидации в FilterConfigError"""
    data = {"drop_dangling": drop_dangling}
    if allowed_doc_types is not None:
        data["allowed_doc_types"] = frozenset(DocType.parse(d) for d in allowed_doc_types)
    if year_min is not None:
        data["year_min"] = year_min
    if year_max is not None:
        data["year_max"] = year_max
    try:
        return FilterConfig(**data)
    except ValidationError as e:
        raise FilterConfigError(f"Invalid filter configuration: {e.errors()[0]['msg']}") from e


def _select_papers(
    papers: pd.DataFrame,
    years: np.ndarray,
    filter_config: FilterConfig,
    source_name: str,
) -> Tuple[pd.DataFrame, Counter]:
    """Дедупликация и фильтры по типу документа и году"""
    dropped: Counter = Counter()
    doc_types = papers["doc_type"].str.strip().str.lower()
    doc_types = doc_types.where(doc_types.isin([d.value for d in DocType]), DocType.OTHER.value)
    papers = papers.assign(year=years, doc_type=doc_types)

    dup_mask = papers.duplicated(subset=["id"], keep=False)
    if dup_mask.any():
        dups = papers[dup_mask]
        distinct = dups.drop_duplicates(subset=["id", "year", "venue", "doc_type"])
        conflicting = distinct[distinct.duplicated(subset=["id"], keep=False)]
        if not conflicting.empty:
            paper_id = conflicting["id"].iloc[0]
            rows = conflicting[conflicting["id"] == paper_id]
            first, second = (
                f"line {int(r.line_number)} ({r.year}, {r.venue}, {r.doc_type})"
                for r in rows.iloc[:2].itertuples()
            )
            raise DuplicatePaperError(paper_id, first, second)
        extra = papers.duplicated(subset=["id"], keep="first")
        dropped[DropReason.DUPLICATE.value] += int(extra.sum())
        papers = papers[~extra]

    allowed = {d.value for d in filter_config.allowed_doc_types}
    type_ok = papers["doc_type"].isin(allowed)
    dropped[DropReason.DOC_TYPE.value] += int((~type_ok).sum())
    papers = papers[type_ok]

    year_ok = papers["year"].between(filter_config.year_min, filter_config.year_max)
    dropped[DropReason.YEAR_RANGE.value] += int((~year_ok).sum())
    papers = papers[year_ok]

    return papers.reset_index(drop=True), dropped


def _select_edges(
    edges: pd.DataFrame,
    ids: np.ndarray,
    filter_config: FilterConfig,
) -> Tuple[np.ndarray, np.ndarray, Counter]:
    """Отбор ссылок: петли, висячие концы, дубликаты"""
    dropped: Counter = Counter()
    citing_ids = edges["citing_id"].to_numpy(dtype=object)
    cited_ids = edges["cited_id"].to_numpy(dtype=object)

    self_loop = citing_ids == cited_ids
    dropped[DropReason.SELF_CITATION.value] += int(self_loop.sum())
    citing_ids, cited_ids = citing_ids[~self_loop], cited_ids[~self_loop]

    index = pd.Index(ids)
    citing = index.get_indexer(citing_ids) if len(citing_ids) else np.empty(0, dtype=np.int64)
    cited = index.get_indexer(cited_ids) if len(cited_ids) else np.empty(0, dtype=np.int64)
    dangling = (citing < 0) | (cited < 0)
    if dangling.any():
        if not filter_config.drop_dangling:
            first = int(np.flatnonzero(dangling)[0])
            raise DanglingEdgeError(str(citing_ids[first]), str(cited_ids[first]))
        dropped[DropReason.DANGLING.value] += int(dangling.sum())
        citing, cited = citing[~dangling], cited[~dangling]

    if len(citing):
        keys = citing.astype(np.int64) * max(len(ids), 1) + cited.astype(np.int64)
        _, first_seen = np.unique(keys, return_index=True)
        first_seen.sort()
        dropped[DropReason.DUPLICATE.value] += int(len(keys) - len(first_seen))
        citing, cited = citing[first_seen], cited[first_seen]

    return citing.astype(np.int64), cited.astype(np.int64), dropped


def _count_pre_publication(citing_years: np.ndarray, cited_years: np.ndarray) -> int:
    return int(np.count_nonzero(citing_years < cited_years - settings.PREPUB_TOLERANCE))


def _year_histogram(years: np.ndarray) -> dict:
    values, counts = np.unique(years, return_counts=True)
    return {int(y): int(c) for y, c in zip(values, counts)}


def _nonzero(counter: Counter) -> dict:
    return {reason: count for reason, count in sorted(counter.items()) if count}


def load_corpus(
    papers_source: Source,
    citations_source: Source,
    filter_config: Optional[FilterConfig] = None,
) -> Tuple[Corpus, ValidationReport]:
    """
    Загрузка статей и ссылок в неизменяемый корпус.

    Статьи фильтруются по типу документа и году; ссылки на отброшенные
    статьи удаляются и учитываются в отчёте. Ссылки "из прошлого"
    (citing year < cited year - 1) сохраняются и только подсчитываются.
    """
    filter_config = _check_filter(filter_config)
    papers_name = _source_name(papers_source, "<papers>")
    citations_name = _source_name(citations_source, "<citations>")

    paper_rows = _parse_table(_read_lines(papers_source), PAPER_COLUMNS, papers_name)
    edge_rows = _parse_table(_read_lines(citations_source), CITATION_COLUMNS, citations_name)
    logger.debug(f"Parsed {len(paper_rows)} paper lines and {len(edge_rows)} citation lines")

    years = _parse_years(paper_rows, papers_name)
    papers, dropped_papers = _select_papers(paper_rows, years, filter_config, papers_name)

    ids = papers["id"].to_numpy(dtype=str)
    citing, cited, dropped_edges = _select_edges(edge_rows, ids, filter_config)

    corpus = Corpus.from_arrays(
        ids=ids,
        years=papers["year"].to_numpy(dtype=np.int64),
        venues=papers["venue"].to_numpy(dtype=str),
        doc_types=papers["doc_type"].to_numpy(dtype=str),
        citing=citing,
        cited=cited,
    )

    report = ValidationReport(
        paper_count=corpus.paper_count,
        edge_count=corpus.edge_count,
        input_paper_lines=len(paper_rows),
        input_edge_lines=len(edge_rows),
        dropped_papers_by_reason=_nonzero(dropped_papers),
        dropped_edges_by_reason=_nonzero(dropped_edges),
        pre_publication_edge_count=_count_pre_publication(corpus.citing_years, corpus.cited_years),
        year_histogram=_year_histogram(corpus.years),
    )

    if report.dropped_paper_count or report.dropped_edge_count:
        logger.warning(
            f"Dropped {report.dropped_paper_count} papers {report.dropped_papers_by_reason} "
            f"and {report.dropped_edge_count} citations {report.dropped_edges_by_reason}"
        )
    if report.pre_publication_edge_count:
        logger.warning(f"{report.pre_publication_edge_count} citations precede the cited paper by more than one year")
    logger.info(f"Loaded corpus: {corpus.paper_count} papers, {corpus.edge_count} citations, years {corpus.year_range}")
    return corpus, report


def build_corpus(
    papers: Iterable[PaperRecord],
    edges: Iterable[Union[CitationEdge, Tuple[str, str]]],
    filter_config: Optional[FilterConfig] = None,
) -> Tuple[Corpus, ValidationReport]:
    """Корпус из записей в памяти - тот же путь фильтрации, что и у файлов"""
    paper_lines = ["\t".join(PAPER_COLUMNS)]
    for paper in papers:
        doc_type = paper.doc_type.value if isinstance(paper.doc_type, DocType) else str(paper.doc_type)
        paper_lines.append(f"{paper.id}\t{paper.year}\t{paper.venue}\t{doc_type}")

    edge_lines = ["\t".join(CITATION_COLUMNS)]
    for edge in edges:
        citing, cited = (edge.citing, edge.cited) if isinstance(edge, CitationEdge) else edge
        edge_lines.append(f"{citing}\t{cited}")

    return load_corpus(paper_lines, edge_lines, filter_config)


def validate(corpus: Corpus, filter_config: Optional[FilterConfig] = None) -> ValidationReport:
    """
    Пересчёт отчёта и проверка инвариантов по готовому корпусу.

    Нарушения возвращаются в `violations`, исключения не бросаются.
    """
    filter_config = filter_config or FilterConfig()
    violations: List[str] = []

    n = corpus.paper_count
    if len(np.unique(corpus.ids)) != n:
        violations.append("paper ids are not unique")

    years = corpus.years
    out_of_range = int(np.count_nonzero((years < filter_config.year_min) | (years > filter_config.year_max)))
    if out_of_range:
        violations.append(f"{out_of_range} papers outside years [{filter_config.year_min}, {filter_config.year_max}]")

    allowed = {d.value for d in filter_config.allowed_doc_types}
    bad_types = int(np.count_nonzero(~np.isin(corpus.doc_types, list(allowed)))) if n else 0
    if bad_types:
        violations.append(f"{bad_types} papers with a document type outside {sorted(allowed)}")

    citing, cited = corpus.citing_index, corpus.cited_index
    pre_publication = 0
    if len(citing):
        if citing.min() < 0 or cited.min() < 0 or citing.max() >= n or cited.max() >= n:
            violations.append("citation endpoints outside the paper table")
        else:
            pre_publication = _count_pre_publication(corpus.citing_years, corpus.cited_years)
        loops = int(np.count_nonzero(citing == cited))
        if loops:
            violations.append(f"{loops} self-citations")
        keys = citing * max(n, 1) + cited
        duplicates = len(keys) - len(np.unique(keys))
        if duplicates:
            violations.append(f"{duplicates} duplicate citations")

    for message in violations:
        logger.warning(f"Corpus invariant violated: {message}")

    return ValidationReport(
        paper_count=n,
        edge_count=corpus.edge_count,
        input_paper_lines=n,
        input_edge_lines=corpus.edge_count,
        pre_publication_edge_count=pre_publication,
        year_histogram=_year_histogram(years),
        violations=violations,
    )


def write_corpus(corpus: Corpus, papers_path: Union[str, Path], citations_path: Union[str, Path]) -> None:
    """Запись корпуса в те же форматы, что читает load_corpus"""
    papers = pd.DataFrame({
        "id": corpus.ids,
        "year": corpus.years,
        "venue": corpus.venues,
        "doc_type": corpus.doc_types,
    })
    citations = pd.DataFrame({
        "citing_id": corpus.ids[corpus.citing_index],
        "cited_id": corpus.ids[corpus.cited_index],
    })
    with atomic_path(papers_path) as tmp:
        papers.to_csv(tmp, sep="\t", index=False, lineterminator="\n")
    with atomic_path(citations_path) as tmp:
        citations.to_csv(tmp, sep="\t", index=False, lineterminator="\n")
    logger.info(f"Wrote {corpus.paper_count} papers to {papers_path} and {corpus.edge_count} citations to {citations_path}")
