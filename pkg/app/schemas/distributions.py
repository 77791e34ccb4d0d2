# app/schemas/distributions.py
import math
from enum import Enum
from typing import Dict, List

import pandas as pd
from pydantic import BaseModel, ConfigDict, Field, model_validator

from app.core.config import settings

SUM_TOLERANCE = 1e-9


class DistributionKind(str, Enum):
    CITATION = "citation"
    NORMALIZED_CITATION = "normalized_citation"
    REFERENCE = "reference"


class CohortDistribution(BaseModel):
    """
    P_y(x), P̂_y(x) или R_y(x) для когорты y.

    В выровненной форме (aligned=True) support хранит смещения от пикового
    года, а не календарные годы.
    """
    model_config = ConfigDict(frozen=True)

    cohort_year: int
    kind: DistributionKind
    support: List[int]
    probabilities: List[float]
    aligned: bool = False

    @model_validator(mode="after")
    def check_distribution(self):
        if len(self.support) != len(self.probabilities):
            raise ValueError("support and probabilities must have equal length")
        if any(b <= a for a, b in zip(self.support, self.support[1:])):
            raise ValueError("support must be strictly increasing")
        if any(p < 0.0 or p > 1.0 or math.isnan(p) for p in self.probabilities):
            raise ValueError("probabilities must lie in [0, 1]")
        if self.probabilities and abs(math.fsum(self.probabilities) - 1.0) > SUM_TOLERANCE:
            raise ValueError(f"probabilities sum to {math.fsum(self.probabilities)}, expected 1")
        if self.support and not self.aligned:
            tolerance = settings.PREPUB_TOLERANCE
            if self.kind == DistributionKind.REFERENCE:
                if self.support[-1] > self.cohort_year + tolerance:
                    raise ValueError(f"reference support ends after {self.cohort_year + tolerance}")
            elif self.support[0] < self.cohort_year - tolerance:
                raise ValueError(f"citation support starts before {self.cohort_year - tolerance}")
        return self

    @property
    def is_empty(self) -> bool:
        return not self.support

    def as_dict(self) -> Dict[int, float]:
        return dict(zip(self.support, self.probabilities))

    def get(self, x: int, default: float = 0.0) -> float:
        return self.as_dict().get(x, default)

    def to_frame(self) -> pd.DataFrame:
        """CSV-форма: cohort_year,kind,x,probability (offset вместо x для выровненной)"""
        axis = "offset" if self.aligned else "x"
        return pd.DataFrame(
            {
                "cohort_year": [self.cohort_year] * len(self.support),
                "kind": [self.kind.value] * len(self.support),
                axis: self.support,
                "probability": self.probabilities,
            },
            columns=["cohort_year", "kind", axis, "probability"],
        )


class PeakStats(BaseModel):
    cohort_year: int
    kind: DistributionKind
    peak_year: int
    peak_value: float = Field(..., ge=0.0, le=1.0)
    # peak_year - anchor_year
    peak_delta: int
    anchor_year: int
