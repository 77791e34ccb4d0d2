import numpy as np
import pytest
from scipy.special import zeta

from app.models.corpus import PaperRecord
from app.schemas.corpus import DocType
from app.services.corpus import build_corpus

PAPERS_HEADER = "id\tyear\tvenue\tdoc_type"
CITATIONS_HEADER = "citing_id\tcited_id"

# хвост дискретного сэмплера после этого k - непрерывное приближение
DISCRETE_TABLE_SIZE = 200_000


@pytest.fixture
def write_corpus_files(tmp_path):
    """Фабрика: строки статей и ссылок -> пути к TSV-файлам (заголовки добавляются)"""
    def _write(paper_rows, citation_rows, header=True, name="corpus"):
        papers = tmp_path / f"{name}_papers.tsv"
        citations = tmp_path / f"{name}_citations.tsv"
        paper_lines = ([PAPERS_HEADER] if header else []) + list(paper_rows)
        citation_lines = ([CITATIONS_HEADER] if header else []) + list(citation_rows)
        papers.write_text("".join(f"{line}\n" for line in paper_lines), encoding="utf-8")
        citations.write_text("".join(f"{line}\n" for line in citation_lines), encoding="utf-8")
        return papers, citations
    return _write


@pytest.fixture
def small_corpus():
    """
    Пять статей 2000-2002 и шесть ссылок.

    A(2000) <- B(2001), C(2001), D(2002), E(2002); B <- D; A -> E (2000 -> 2002, из "будущего" на два года)
    """
    papers = [
        PaperRecord("A", 2000, "J1", DocType.ARTICLE),
        PaperRecord("B", 2001, "J1", DocType.ARTICLE),
        PaperRecord("C", 2001, "J2", DocType.REVIEW),
        PaperRecord("D", 2002, "J2", DocType.ARTICLE),
        PaperRecord("E", 2002, "J3", DocType.ARTICLE),
    ]
    edges = [("B", "A"), ("C", "A"), ("D", "A"), ("E", "A"), ("D", "B"), ("A", "E")]
    corpus, _ = build_corpus(papers, edges)
    return corpus


@pytest.fixture
def random_corpus_factory():
    """Случайный корпус: до 200 статей, до 1000 ссылок, 10 лет"""
    def _make(seed: int, first_year: int = 2000, years: int = 10):
        rng = np.random.default_rng(seed)
        n_papers = int(rng.integers(20, 201))
        paper_years = first_year + rng.integers(0, years, size=n_papers)
        papers = [
            PaperRecord(f"R{i:03d}", int(year), f"J{int(rng.integers(0, 8))}", DocType.ARTICLE)
            for i, year in enumerate(paper_years)
        ]
        n_edges = int(rng.integers(0, 1001))
        citing = rng.integers(0, n_papers, size=n_edges)
        cited = rng.integers(0, n_papers, size=n_edges)
        edges = [(f"R{i:03d}", f"R{j:03d}") for i, j in zip(citing, cited)]
        corpus, _ = build_corpus(papers, edges)
        return corpus
    return _make


@pytest.fixture
def discrete_power_law_sampler():
    """Обратная функция распределения для P(k) = k^-alpha / zeta(alpha, k_min)"""
    def _sample(alpha: float, size: int, seed: int, k_min: int = 1) -> np.ndarray:
        rng = np.random.default_rng(seed)
        ks = np.arange(k_min, k_min + DISCRETE_TABLE_SIZE, dtype=float)
        ccdf = zeta(alpha, ks) / zeta(alpha, k_min)
        u = rng.random(size)
        values = k_min - 1 + np.searchsorted(-ccdf, -u, side="right")
        tail = u < ccdf[-1]
        if tail.any():
            k_last = ks[-1]
            values[tail] = np.floor(k_last * (u[tail] / ccdf[-1]) ** (-1.0 / (alpha - 1.0)))
        return values.astype(np.int64)
    return _sample


@pytest.fixture
def continuous_power_law_sampler():
    def _sample(alpha: float, size: int, seed: int, k_min: float = 1.0) -> np.ndarray:
        rng = np.random.default_rng(seed)
        return k_min * (1.0 - rng.random(size)) ** (-1.0 / (alpha - 1.0))
    return _sample


def pytest_configure(config):
    config.addinivalue_line("markers", "slow: large inputs with time and memory limits")
