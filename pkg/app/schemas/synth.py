# app/schemas/synth.py
import math
from enum import Enum
from typing import Any, Dict, List, Optional

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, model_validator

from app.core.config import settings

U64_MAX = 2 ** 64 - 1


class Attachment(str, Enum):
    UNIFORM = "uniform"
    PREFERENTIAL = "preferential"


class JournalRegimeKind(str, Enum):
    FIXED_COUNT = "fixed_count"
    GROWING_COUNT = "growing_count"


class AgeKernel(BaseModel):
    """Вероятность сослаться на статью возраста a ~ exp(-decay * |a - mode_age|)"""
    model_config = ConfigDict(frozen=True, extra="forbid")

    mode_age: int = Field(2, ge=0)
    decay: float = Field(0.5, gt=0.0)

    def weights(self, max_age: int) -> np.ndarray:
        """Нормированные веса возрастов 0..max_age-1"""
        ages = np.arange(max_age, dtype=float)
        raw = np.exp(-self.decay * np.abs(ages - self.mode_age))
        return raw / raw.sum()


class JournalRegime(BaseModel):
    """
    fixed_count(J): J журналов во все годы;
    growing_count(J0, c): в год t доступно J0 + c*t журналов.
    """
    model_config = ConfigDict(frozen=True, extra="forbid")

    kind: JournalRegimeKind = JournalRegimeKind.FIXED_COUNT
    journals: int = Field(50, ge=1)
    growth: int = Field(0, ge=0)

    @model_validator(mode="after")
    def fixed_has_no_growth(self):
        if self.kind == JournalRegimeKind.FIXED_COUNT and self.growth != 0:
            raise ValueError("fixed_count regime cannot have journal growth")
        return self

    @classmethod
    def fixed_count(cls, journals: int) -> "JournalRegime":
        return cls(kind=JournalRegimeKind.FIXED_COUNT, journals=journals)

    @classmethod
    def growing_count(cls, journals: int, growth: int) -> "JournalRegime":
        return cls(kind=JournalRegimeKind.GROWING_COUNT, journals=journals, growth=growth)

    def venue_count(self, t: int) -> int:
        return self.journals + self.growth * t


class SynthConfig(BaseModel):
    """Параметры генератора растущего корпуса"""
    model_config = ConfigDict(frozen=True, extra="forbid")

    years: int = Field(..., ge=1)
    base_papers: int = Field(..., ge=1)
    growth_rate: float = Field(1.0, ge=1.0)
    refs_mean: float = Field(10.0, ge=0.0)
    # среднее число ссылок в год t: refs_mean * refs_growth^t
    refs_growth: float = Field(1.0, gt=0.0)
    # с года late_growth_start (смещение от start_year) рост идёт с late_growth_rate
    late_growth_rate: Optional[float] = Field(None, ge=1.0)
    late_growth_start: Optional[int] = Field(None, ge=1)
    age_kernel: AgeKernel = Field(default_factory=AgeKernel)
    attachment: Attachment = Attachment.UNIFORM
    journal_regime: JournalRegime = Field(default_factory=JournalRegime)
    # вероятность ссылки на статью следующего года (задержка публикации)
    epsilon: float = Field(0.01, ge=0.0)
    seed: int = Field(0, ge=0, le=U64_MAX)
    start_year: int = Field(default_factory=lambda: settings.SYNTH_START_YEAR)

    @model_validator(mode="after")
    def check_bounds(self):
        if self.epsilon > settings.SYNTH_EPSILON_MAX:
            raise ValueError(f"epsilon must be at most {settings.SYNTH_EPSILON_MAX}")
        rates = (self.growth_rate, self.refs_mean, self.refs_growth, self.late_growth_rate or 1.0)
        if not all(math.isfinite(v) for v in rates):
            raise ValueError("growth_rate, late_growth_rate, refs_mean and refs_growth must be finite")
        if (self.late_growth_rate is None) != (self.late_growth_start is None):
            raise ValueError("late_growth_rate and late_growth_start must be given together")
        if self.late_growth_start is not None and self.late_growth_start >= self.years:
            raise ValueError(f"late_growth_start {self.late_growth_start} is beyond the last year offset {self.years - 1}")
        last_year = self.start_year + self.years - 1
        if self.start_year < settings.YEAR_MIN or last_year > settings.YEAR_MAX:
            raise ValueError(
                f"generated years [{self.start_year}, {last_year}] fall outside "
                f"[{settings.YEAR_MIN}, {settings.YEAR_MAX}]"
            )
        return self

    def growth_rate_at(self, t: int) -> float:
        """Множитель числа статей от года t-1 к году t"""
        if self.late_growth_start is not None and t >= self.late_growth_start:
            return self.late_growth_rate
        return self.growth_rate

    def papers_per_year(self) -> List[int]:
        """round(N0 * g_1 * ... * g_t) для t = 0..T-1; без второй фазы - round(N0 * g^t)"""
        sizes, expected = [], float(self.base_papers)
        for t in range(self.years):
            if t:
                expected *= self.growth_rate_at(t)
            sizes.append(int(round(expected)))
        return sizes

    def refs_mean_at(self, t: int) -> float:
        return self.refs_mean * self.refs_growth ** t

    def describe(self) -> Dict[str, Any]:
        """Параметры вместе с зафиксированными константами реализации"""
        description = self.model_dump(mode="json")
        description["refs_distribution"] = f"poisson(mean={self.refs_mean} * {self.refs_growth}^t)"
        description["age_minus_one_probability"] = self.epsilon
        description["expected_papers"] = sum(self.papers_per_year())
        return description

    @classmethod
    def strong_growth(cls, **overrides) -> "SynthConfig":
        """
        Взрывной рост: 27 лет без роста, затем +50% статей в год и быстрый
        рост числа журналов; доля ссылок внутри корпуса убывает на 1% в год.
        """
        params = dict(
            years=40,
            base_papers=300,
            growth_rate=1.0,
            late_growth_rate=1.5,
            late_growth_start=27,
            refs_mean=10.0,
            refs_growth=0.99,
            attachment=Attachment.PREFERENTIAL,
            journal_regime=JournalRegime.growing_count(10, 8),
        )
        params.update(overrides)
        return cls(**params)

    @classmethod
    def mild_growth(cls, **overrides) -> "SynthConfig":
        """Умеренный рост при постоянном наборе журналов; списки ссылок удлиняются на 1% в год"""
        params = dict(
            years=40,
            base_papers=300,
            growth_rate=1.04,
            refs_mean=10.0,
            refs_growth=1.01,
            attachment=Attachment.PREFERENTIAL,
            journal_regime=JournalRegime.fixed_count(50),
        )
        params.update(overrides)
        return cls(**params)


PRESETS = {
    "strong_growth": SynthConfig.strong_growth,
    "mild_growth": SynthConfig.mild_growth,
}


class SynthStats(BaseModel):
    """Сводка по одному запуску генератора"""
    papers: int = 0
    requested_references: int = 0
    # цель вне корпуса (раньше первого или позже последнего года)
    truncated: int = 0
    self_dropped: int = 0
    duplicate_dropped: int = 0
    emitted: int = 0

    @property
    def dropped(self) -> int:
        return self.truncated + self.self_dropped + self.duplicate_dropped
