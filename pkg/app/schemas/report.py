# app/schemas/report.py
from enum import Enum
from pathlib import Path
from typing import List, Optional

from pydantic import BaseModel, ConfigDict, Field, model_validator

from app.core.config import settings
from app.schemas.powerlaw import DegreeMode


class ReportOptions(BaseModel):
    """
    Параметры полного отчёта.

    По умолчанию - соглашения воспроизведения: крайние когорты опускаются,
    когорты берутся каждые cohort_step лет.
    """
    model_config = ConfigDict(frozen=True)

    cohort_step: int = Field(5, ge=1)
    omit_edge_cohorts: bool = True
    half_width: int = Field(default_factory=lambda: settings.HALF_WIDTH, ge=0)
    # None - все центры, при которых окно целиком внутри корпуса
    centers: Optional[List[int]] = None
    center_step: int = Field(1, ge=1)
    kmin_raw: int = Field(default_factory=lambda: settings.DEFAULT_KMIN_RAW, ge=1)
    kmin_normalized: Optional[float] = Field(None, gt=0.0)
    min_tail: int = Field(default_factory=lambda: settings.MIN_TAIL, ge=1)
    alpha_max: float = Field(default_factory=lambda: settings.ALPHA_MAX, gt=1.0)
    emit_svg: bool = False

    def cohorts(self, first: int, last: int) -> List[int]:
        if self.omit_edge_cohorts:
            return list(range(first + self.cohort_step, last, self.cohort_step))
        return list(range(first, last + 1, self.cohort_step))

    def sweep_centers(self, first: int, last: int) -> List[int]:
        if self.centers is not None:
            return sorted(set(self.centers))
        lo, hi = first + self.half_width, last - self.half_width
        if lo > hi:
            # корпус короче окна: один центр посередине
            return [(first + last) // 2]
        return list(range(lo, hi + 1, self.center_step))


class Command(str, Enum):
    VALIDATE = "validate"
    COUNTS = "counts"
    REFDIST = "refdist"
    CITEDIST = "citedist"
    PEAKS = "peaks"
    POWERLAW = "powerlaw"
    SYNTH = "synth"
    REPORT = "report"


class RunConfig(BaseModel):
    """Разобранные аргументы одного запуска CLI"""
    command: Command
    papers: Optional[Path] = None
    citations: Optional[Path] = None
    output: Optional[Path] = None
    year_min: Optional[int] = None
    year_max: Optional[int] = None
    doc_types: Optional[List[str]] = None
    normalized: bool = False
    align: bool = False
    mode: DegreeMode = DegreeMode.RAW
    seed: Optional[int] = Field(None, ge=0, le=2 ** 64 - 1)
    emit_svg: bool = False

    @model_validator(mode="after")
    def paths_for_command(self):
        if self.command == Command.SYNTH:
            required = {"output": self.output}
        else:
            required = {"papers": self.papers, "citations": self.citations}
        if self.command == Command.REPORT:
            required["output"] = self.output
        missing = [name for name, value in required.items() if value is None or str(value) == ""]
        if missing:
            raise ValueError(f"{self.command.value} needs {', '.join(missing)}")
        return self
