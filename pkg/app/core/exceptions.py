# app/core/exceptions.py
from typing import Dict, List, Optional


class CiteGrowthError(Exception):
    """Базовое исключение пакета"""
    pass


# Корпус

class CorpusError(CiteGrowthError):
    """Ошибка загрузки или построения корпуса"""
    pass


class MalformedRecordError(CorpusError):
    """Строка входного файла не разбирается"""
    def __init__(self, message: str, source: str, line_number: int):
        self.source = source
        self.line_number = line_number
        super().__init__(f"{source}:{line_number}: {message}")


class DuplicatePaperError(CorpusError):
    """Один и тот же id с разными полями"""
    def __init__(self, paper_id: str, first: Optional[str] = None, second: Optional[str] = None):
        self.paper_id = paper_id
        message = f"Duplicate paper id {paper_id!r} with conflicting fields"
        if first and second:
            message = f"{message}: {first} vs {second}"
        super().__init__(message)


class DanglingEdgeError(CorpusError):
    """Ссылка на отсутствующую статью при drop_dangling=False"""
    def __init__(self, citing: str, cited: str):
        self.citing = citing
        self.cited = cited
        super().__init__(f"Citation {citing} -> {cited} has an endpoint outside the corpus")


class EmptyCorpusError(CorpusError):
    pass


class FilterConfigError(CorpusError):
    pass


# Анализ

class SeriesError(CiteGrowthError):
    """Ошибка построения или аппроксимации временного ряда"""
    pass


class DistributionError(CiteGrowthError):
    """Распределение по когорте не определено"""
    pass


class FitError(CiteGrowthError):
    """Оценка показателя степени невозможна"""
    pass


class SweepError(CiteGrowthError):
    pass


class SynthConfigError(CiteGrowthError):
    pass


class ReportError(CiteGrowthError):
    """Ошибка пайплайна отчёта (с накопленными ошибками шагов)"""
    def __init__(self, message: str, step_errors: Optional[Dict[str, str]] = None):
        self.step_errors: Dict[str, str] = step_errors or {}
        super().__init__(message)

    @property
    def failed_steps(self) -> List[str]:
        return sorted(self.step_errors)


class WindowError(CiteGrowthError):
    """Окно [y1, y2] пусто или задано неверно"""
    pass
