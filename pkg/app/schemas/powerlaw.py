# app/schemas/powerlaw.py
from enum import Enum
from typing import Dict, List, Optional

import pandas as pd
from pydantic import BaseModel, ConfigDict, Field, model_validator


class DegreeMode(str, Enum):
    RAW = "raw"
    NORMALIZED = "normalized"


class PowerLawFit(BaseModel):
    """Оценка alpha для хвоста P(k) ~ k^-alpha"""
    alpha: float = Field(..., gt=1.0)
    k_min: float = Field(..., gt=0.0)
    n_tail: int = Field(..., ge=1)
    log_likelihood: float
    converged: bool
    discrete: bool
    # асимптотическая стандартная ошибка alpha (None, если не сошлось)
    sigma: Optional[float] = None


class SweepEntry(BaseModel):
    center: int
    window_start: int
    window_end: int
    fit: Optional[PowerLawFit] = None
    reason: Optional[str] = None

    @property
    def present(self) -> bool:
        return self.fit is not None


class ExponentSeries(BaseModel):
    """Показатели alpha по центрам окон"""
    model_config = ConfigDict(frozen=True)

    mode: DegreeMode
    half_width: int = Field(..., ge=0)
    entries: List[SweepEntry] = Field(default_factory=list)

    @model_validator(mode="after")
    def centers_increasing(self):
        centers = [e.center for e in self.entries]
        if any(b <= a for a, b in zip(centers, centers[1:])):
            raise ValueError("sweep centers must be strictly increasing")
        return self

    @property
    def fits(self) -> Dict[int, PowerLawFit]:
        return {e.center: e.fit for e in self.entries if e.fit is not None}

    @property
    def absent(self) -> Dict[int, str]:
        return {e.center: e.reason or "" for e in self.entries if e.fit is None}

    def to_frame(self) -> pd.DataFrame:
        """CSV-форма: center_year,mode,alpha,k_min,n_tail,converged"""
        rows = [
            {
                "center_year": center,
                "mode": self.mode.value,
                "alpha": fit.alpha,
                "k_min": fit.k_min,
                "n_tail": fit.n_tail,
                "converged": fit.converged,
            }
            for center, fit in self.fits.items()
        ]
        return pd.DataFrame(rows, columns=["center_year", "mode", "alpha", "k_min", "n_tail", "converged"])
