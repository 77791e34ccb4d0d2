# app/models/degree.py
from dataclasses import dataclass
from typing import Dict

import numpy as np

from app.schemas.powerlaw import DegreeMode


@dataclass(frozen=True)
class DegreeSample:
    """
    Входящие степени статей окна [y1, y2].

    raw: k_i - число ссылок из статей того же окна;
    normalized: k̂_i - каждая ссылка из года y весит 1/n_y.
    Статьи без ссылок присутствуют со значением 0.
    """
    y1: int
    y2: int
    mode: DegreeMode
    values: np.ndarray
    paper_ids: np.ndarray
    # число ссылок внутри окна
    edge_count: int = 0

    @property
    def n_papers(self) -> int:
        return int(self.values.shape[0])

    @property
    def width(self) -> int:
        return self.y2 - self.y1 + 1

    def as_dict(self) -> Dict[str, float]:
        cast = int if self.mode == DegreeMode.RAW else float
        return {str(paper_id): cast(value) for paper_id, value in zip(self.paper_ids, self.values)}


@dataclass(frozen=True)
class DegreeHistogram:
    """P_{y1y2}(k) по сырым степеням, включая k = 0"""
    y1: int
    y2: int
    probabilities: Dict[int, float]
    n_papers: int

    def __getitem__(self, k: int) -> float:
        return self.probabilities.get(k, 0.0)

    @property
    def mean(self) -> float:
        return sum(k * p for k, p in self.probabilities.items())
