"""
Ограничения по времени и памяти на больших входах.

Запуск отдельно: pytest -m slow
"""
import resource
import sys
import time

import numpy as np
import pytest

from app.models.degree import DegreeSample
from app.schemas.powerlaw import DegreeMode
from app.schemas.report import ReportOptions
from app.schemas.synth import SynthConfig
from app.services.powerlaw import fit_power_law_continuous, fit_power_law_discrete
from app.services.synth import generate
from app.tasks.report import run_report

pytestmark = pytest.mark.slow

REPORT_SECONDS = 30.0
REPORT_MEMORY_BYTES = 2 * 1024 ** 3
FIT_SECONDS = 1.0
FIT_SAMPLE_SIZE = 100_000


def _peak_rss_bytes() -> int:
    peak = resource.getrusage(resource.RUSAGE_SELF).ru_maxrss
    # macOS отдаёт байты, Linux - килобайты
    return peak if sys.platform == "darwin" else peak * 1024


def _sample(values, mode):
    values = np.asarray(values, dtype=np.int64 if mode == DegreeMode.RAW else float)
    ids = np.asarray([f"P{i}" for i in range(len(values))])
    return DegreeSample(y1=2000, y2=2010, mode=mode, values=values, paper_ids=ids)


def test_report_on_million_edge_corpus(tmp_path):
    corpus = generate(SynthConfig.strong_growth(seed=7))
    assert corpus.edge_count >= 1_000_000

    started = time.perf_counter()
    result = run_report(corpus, tmp_path, ReportOptions())
    elapsed = time.perf_counter() - started

    assert result["status"] == "completed"
    assert elapsed < REPORT_SECONDS
    assert _peak_rss_bytes() < REPORT_MEMORY_BYTES


def test_discrete_fit_time(discrete_power_law_sampler):
    sample = _sample(discrete_power_law_sampler(2.5, FIT_SAMPLE_SIZE, seed=1), DegreeMode.RAW)
    started = time.perf_counter()
    fit = fit_power_law_discrete(sample, k_min=1)
    assert time.perf_counter() - started < FIT_SECONDS
    assert fit.converged


def test_continuous_fit_time(continuous_power_law_sampler):
    sample = _sample(continuous_power_law_sampler(2.5, FIT_SAMPLE_SIZE, seed=1, k_min=0.01), DegreeMode.NORMALIZED)
    started = time.perf_counter()
    fit = fit_power_law_continuous(sample, k_min=0.01)
    assert time.perf_counter() - started < FIT_SECONDS
    assert fit.converged
