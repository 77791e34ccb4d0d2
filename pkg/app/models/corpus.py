# app/models/corpus.py
from collections.abc import Mapping
from dataclasses import dataclass
from functools import cached_property
from typing import Dict, Iterator, Optional, Tuple

import numpy as np

from app.schemas.corpus import DocType


@dataclass(frozen=True)
class PaperRecord:
    """Статья корпуса"""
    id: str
    year: int
    venue: str
    doc_type: DocType


@dataclass(frozen=True)
class CitationEdge:
    """Ссылка citing -> cited"""
    citing: str
    cited: str


def _frozen(array: np.ndarray) -> np.ndarray:
    array = np.ascontiguousarray(array)
    array.flags.writeable = False
    return array


class _PaperView(Mapping):
    """Read-only отображение id -> PaperRecord поверх массивов корпуса"""

    def __init__(self, corpus: "Corpus"):
        self._corpus = corpus

    def __getitem__(self, paper_id: str) -> PaperRecord:
        return self._corpus.record(self._corpus.index_of(paper_id))

    def __iter__(self) -> Iterator[str]:
        return (str(paper_id) for paper_id in self._corpus.ids)

    def __len__(self) -> int:
        return self._corpus.paper_count


class Corpus:
    """
    Неизменяемый граф цитирований.

    Статьи хранятся столбцами, отсортированными по id; ссылки - парами
    индексов (citing, cited), отсортированными лексикографически.
    """

    def __init__(
        self,
        ids: np.ndarray,
        years: np.ndarray,
        venues: np.ndarray,
        doc_types: np.ndarray,
        citing: np.ndarray,
        cited: np.ndarray,
    ):
        self._ids = _frozen(ids)
        self._years = _frozen(years.astype(np.int64, copy=False))
        self._venues = _frozen(venues)
        self._doc_types = _frozen(doc_types)
        self._citing = _frozen(citing.astype(np.int64, copy=False))
        self._cited = _frozen(cited.astype(np.int64, copy=False))

    @classmethod
    def from_arrays(
        cls,
        ids,
        years,
        venues,
        doc_types,
        citing=None,
        cited=None,
    ) -> "Corpus":
        """
        Сборка корпуса в каноническом порядке.

        citing/cited - позиции во входных массивах статей (до сортировки).
        Проверки фильтров здесь не выполняются: это делает load_corpus.
        """
        ids = np.asarray(ids, dtype=str)
        years = np.asarray(years, dtype=np.int64)
        venues = np.asarray(venues, dtype=str)
        doc_types = np.asarray([DocType(d).value for d in doc_types], dtype=str) if len(doc_types) else np.asarray([], dtype=str)
        citing = np.asarray(citing if citing is not None else [], dtype=np.int64)
        cited = np.asarray(cited if cited is not None else [], dtype=np.int64)

        order = np.argsort(ids, kind="stable")
        rank = np.empty(len(ids), dtype=np.int64)
        rank[order] = np.arange(len(ids), dtype=np.int64)

        citing = rank[citing] if len(citing) else citing
        cited = rank[cited] if len(cited) else cited
        edge_order = np.lexsort((cited, citing))

        return cls(
            ids=ids[order],
            years=years[order],
            venues=venues[order],
            doc_types=doc_types[order],
            citing=citing[edge_order],
            cited=cited[edge_order],
        )

    # Размеры

    @property
    def paper_count(self) -> int:
        return int(self._ids.shape[0])

    @property
    def edge_count(self) -> int:
        return int(self._citing.shape[0])

    @property
    def is_empty(self) -> bool:
        return self.paper_count == 0

    # Столбцы

    @property
    def ids(self) -> np.ndarray:
        return self._ids

    @property
    def years(self) -> np.ndarray:
        return self._years

    @property
    def venues(self) -> np.ndarray:
        return self._venues

    @property
    def doc_types(self) -> np.ndarray:
        return self._doc_types

    @property
    def citing_index(self) -> np.ndarray:
        return self._citing

    @property
    def cited_index(self) -> np.ndarray:
        return self._cited

    @cached_property
    def citing_years(self) -> np.ndarray:
        return _frozen(self._years[self._citing])

    @cached_property
    def cited_years(self) -> np.ndarray:
        return _frozen(self._years[self._cited])

    @property
    def year_range(self) -> Optional[Tuple[int, int]]:
        if self.is_empty:
            return None
        return int(self._years.min()), int(self._years.max())

    # Доступ к записям

    @cached_property
    def _positions(self) -> Dict[str, int]:
        return {str(paper_id): i for i, paper_id in enumerate(self._ids)}

    def index_of(self, paper_id: str) -> int:
        return self._positions[paper_id]

    def record(self, index: int) -> PaperRecord:
        return PaperRecord(
            id=str(self._ids[index]),
            year=int(self._years[index]),
            venue=str(self._venues[index]),
            doc_type=DocType(str(self._doc_types[index])),
        )

    @cached_property
    def papers(self) -> Mapping:
        return _PaperView(self)

    @cached_property
    def edges(self) -> Tuple[CitationEdge, ...]:
        ids = self._ids
        return tuple(
            CitationEdge(citing=str(ids[i]), cited=str(ids[j]))
            for i, j in zip(self._citing, self._cited)
        )

    @cached_property
    def _year_order(self) -> np.ndarray:
        # индексы статей, упорядоченные по году (внутри года - по id)
        return _frozen(np.argsort(self._years, kind="stable"))

    @cached_property
    def _sorted_years(self) -> np.ndarray:
        return _frozen(self._years[self._year_order])

    def paper_indices_in_year(self, year: int) -> np.ndarray:
        sorted_years = self._sorted_years
        lo = np.searchsorted(sorted_years, year, side="left")
        hi = np.searchsorted(sorted_years, year, side="right")
        return self._year_order[lo:hi]

    def paper_ids_in_year(self, year: int) -> Tuple[str, ...]:
        return tuple(str(paper_id) for paper_id in self._ids[self.paper_indices_in_year(year)])

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Corpus):
            return NotImplemented
        return (
            np.array_equal(self._ids, other._ids)
            and np.array_equal(self._years, other._years)
            and np.array_equal(self._venues, other._venues)
            and np.array_equal(self._doc_types, other._doc_types)
            and np.array_equal(self._citing, other._citing)
            and np.array_equal(self._cited, other._cited)
        )

    __hash__ = None

    def __repr__(self) -> str:
        return f"<Corpus papers={self.paper_count} edges={self.edge_count} years={self.year_range}>"
