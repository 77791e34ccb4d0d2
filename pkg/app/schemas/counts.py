# app/schemas/counts.py
from enum import Enum
from typing import Dict, List, Tuple

import pandas as pd
from pydantic import BaseModel, ConfigDict, Field, field_validator


class YearSeries(BaseModel):
    """Год -> неотрицательное количество (n_y, число журналов)"""
    model_config = ConfigDict(frozen=True)

    counts: Dict[int, int] = Field(default_factory=dict)

    @field_validator("counts")
    @classmethod
    def sorted_non_negative(cls, v: Dict[int, int]) -> Dict[int, int]:
        for year, count in v.items():
            if count < 0:
                raise ValueError(f"count for {year} is negative")
        return dict(sorted(v.items()))

    @property
    def years(self) -> List[int]:
        return list(self.counts)

    @property
    def values(self) -> List[int]:
        return list(self.counts.values())

    @property
    def total(self) -> int:
        return sum(self.counts.values())

    def __len__(self) -> int:
        return len(self.counts)

    def __getitem__(self, year: int) -> int:
        return self.counts[year]

    def get(self, year: int, default: int = 0) -> int:
        return self.counts.get(year, default)

    def window(self, first: int, last: int) -> "YearSeries":
        return YearSeries(counts={y: c for y, c in self.counts.items() if first <= y <= last})

    def to_frame(self) -> pd.DataFrame:
        return pd.DataFrame({"year": self.years, "count": self.values}, columns=["year", "count"])

    @classmethod
    def from_frame(cls, frame: pd.DataFrame) -> "YearSeries":
        return cls(counts={int(y): int(c) for y, c in zip(frame["year"], frame["count"])})


class LineFit(BaseModel):
    slope: float
    intercept: float
    r_squared: float = Field(..., ge=0.0, le=1.0)
    n_points: int = 0

    def predict(self, x: float) -> float:
        return self.slope * x + self.intercept


class ExpFit(BaseModel):
    """count(y) = amplitude * growth_rate ** (y - base_year)"""
    amplitude: float = Field(..., gt=0.0)
    growth_rate: float = Field(..., gt=0.0)
    r_squared_log: float = Field(..., ge=0.0, le=1.0)
    base_year: int
    n_points: int = 0

    def predict(self, year: float) -> float:
        return self.amplitude * self.growth_rate ** (year - self.base_year)


class GrowthRegime(str, Enum):
    VENUE_GROWTH = "venue_growth"
    VOLUME_GROWTH = "volume_growth"


class GrowthSummary(BaseModel):
    publications: ExpFit
    journals: LineFit
    publication_ratio: float
    journal_ratio: float
    # доля роста публикаций (в логарифме), объяснённая ростом числа журналов
    venue_share: float
    regime: GrowthRegime
    span: Tuple[int, int]

    def to_frame(self) -> pd.DataFrame:
        rows = [
            ("span_start", self.span[0]),
            ("span_end", self.span[1]),
            ("publication_ratio", self.publication_ratio),
            ("journal_ratio", self.journal_ratio),
            ("venue_share", self.venue_share),
            ("regime", self.regime.value),
        ]
        return pd.DataFrame(rows, columns=["metric", "value"])
