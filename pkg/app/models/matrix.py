# app/models/matrix.py
from dataclasses import dataclass, field
from typing import Dict, Tuple

import pandas as pd


@dataclass(frozen=True)
class CitationMatrix:
    """
    Разреженная матрица n_y^x: (cited_year y, citing_year x) -> число ссылок.

    Хранятся только ненулевые ячейки с x >= y - 1; остальные пары
    учитываются в `excluded`.
    """
    cells: Dict[Tuple[int, int], int] = field(default_factory=dict)
    excluded: int = 0

    def __post_init__(self):
        for key, count in self.cells.items():
            if count <= 0:
                raise ValueError(f"Stored cell {key} must be positive, got {count}")
        by_cited: Dict[int, Dict[int, int]] = {}
        by_citing: Dict[int, Dict[int, int]] = {}
        for (cited_year, citing_year), count in sorted(self.cells.items()):
            by_cited.setdefault(cited_year, {})[citing_year] = count
            by_citing.setdefault(citing_year, {})[cited_year] = count
        object.__setattr__(self, "_by_cited", by_cited)
        object.__setattr__(self, "_by_citing", by_citing)

    def cell(self, cited_year: int, citing_year: int) -> int:
        return self.cells.get((cited_year, citing_year), 0)

    def citations_to(self, cited_year: int) -> Dict[int, int]:
        """Строка матрицы: citing_year -> n_y^x для когорты y"""
        return dict(self._by_cited.get(cited_year, {}))

    def references_from(self, citing_year: int) -> Dict[int, int]:
        """Столбец матрицы: cited_year -> n_x^y для ссылок когорты y"""
        return dict(self._by_citing.get(citing_year, {}))

    def cited_total(self, cited_year: int) -> int:
        return sum(self._by_cited.get(cited_year, {}).values())

    def citing_total(self, citing_year: int) -> int:
        return sum(self._by_citing.get(citing_year, {}).values())

    @property
    def total(self) -> int:
        return sum(self.cells.values())

    @property
    def cited_years(self) -> Tuple[int, ...]:
        return tuple(self._by_cited)

    @property
    def citing_years(self) -> Tuple[int, ...]:
        return tuple(self._by_citing)

    def to_frame(self) -> pd.DataFrame:
        """Плотное представление: строки - cited_year, столбцы - citing_year"""
        if not self.cells:
            return pd.DataFrame()
        series = pd.Series(self.cells)
        series.index.names = ["cited_year", "citing_year"]
        return series.unstack(fill_value=0).sort_index().sort_index(axis=1)
