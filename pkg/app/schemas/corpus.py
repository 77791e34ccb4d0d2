# app/schemas/corpus.py
from enum import Enum
from typing import ClassVar, Dict, FrozenSet, List, Tuple

from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from app.core.config import settings


class DocType(str, Enum):
    ARTICLE = "article"
    REVIEW = "review"
    OTHER = "other"

    @classmethod
    def parse(cls, raw: str) -> "DocType":
        """Тип документа без учёта регистра; всё неизвестное -> OTHER"""
        try:
            return cls(raw.strip().lower())
        except ValueError:
            return cls.OTHER


class DropReason(str, Enum):
    DOC_TYPE = "doc_type"
    YEAR_RANGE = "year_range"
    DUPLICATE = "duplicate"
    DANGLING = "dangling"
    SELF_CITATION = "self_citation"


class FilterConfig(BaseModel):
    model_config = ConfigDict(frozen=True)

    allowed_doc_types: FrozenSet[DocType] = frozenset({DocType.ARTICLE, DocType.REVIEW})
    year_min: int = settings.YEAR_MIN
    year_max: int = settings.YEAR_MAX
    drop_dangling: bool = True

    @field_validator("allowed_doc_types")
    @classmethod
    def doc_types_not_empty(cls, v):
        if not v:
            raise ValueError("allowed_doc_types must not be empty")
        return v

    @model_validator(mode="after")
    def year_bounds_ordered(self):
        if self.year_min > self.year_max:
            raise ValueError("year_min must not exceed year_max")
        return self


class ValidationReport(BaseModel):
    """Диагностика загрузки корпуса"""
    paper_count: int = Field(0, ge=0)
    edge_count: int = Field(0, ge=0)
    input_paper_lines: int = Field(0, ge=0)
    input_edge_lines: int = Field(0, ge=0)
    dropped_papers_by_reason: Dict[str, int] = Field(default_factory=dict)
    dropped_edges_by_reason: Dict[str, int] = Field(default_factory=dict)
    # ссылки с citing year < cited year - 1
    pre_publication_edge_count: int = Field(0, ge=0)
    year_histogram: Dict[int, int] = Field(default_factory=dict)
    violations: List[str] = Field(default_factory=list)

    # Поля, которые validate() пересчитывает из самого корпуса
    SHARED_FIELDS: ClassVar[Tuple[str, ...]] = ("paper_count", "edge_count", "pre_publication_edge_count", "year_histogram")

    @property
    def dropped_paper_count(self) -> int:
        return sum(self.dropped_papers_by_reason.values())

    @property
    def dropped_edge_count(self) -> int:
        return sum(self.dropped_edges_by_reason.values())

    @property
    def is_clean(self) -> bool:
        return (
            self.dropped_paper_count == 0
            and self.dropped_edge_count == 0
            and self.pre_publication_edge_count == 0
            and not self.violations
        )

    def shared_view(self) -> Dict[str, object]:
        return {name: getattr(self, name) for name in self.SHARED_FIELDS}

    def to_rows(self) -> List[Dict[str, object]]:
        """Плоское представление для CSV: metric,key,value"""
        rows: List[Dict[str, object]] = [
            {"metric": "paper_count", "key": "", "value": self.paper_count},
            {"metric": "edge_count", "key": "", "value": self.edge_count},
            {"metric": "input_paper_lines", "key": "", "value": self.input_paper_lines},
            {"metric": "input_edge_lines", "key": "", "value": self.input_edge_lines},
            {"metric": "pre_publication_edge_count", "key": "", "value": self.pre_publication_edge_count},
        ]
        for reason in sorted(self.dropped_papers_by_reason):
            rows.append({"metric": "dropped_papers", "key": reason, "value": self.dropped_papers_by_reason[reason]})
        for reason in sorted(self.dropped_edges_by_reason):
            rows.append({"metric": "dropped_edges", "key": reason, "value": self.dropped_edges_by_reason[reason]})
        for year in sorted(self.year_histogram):
            rows.append({"metric": "year_histogram", "key": str(year), "value": self.year_histogram[year]})
        for i, message in enumerate(self.violations):
            rows.append({"metric": "violation", "key": str(i), "value": message})
        return rows
