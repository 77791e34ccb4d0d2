import math

import numpy as np
import pytest

from app.core.exceptions import SynthConfigError
from app.schemas.synth import AgeKernel, Attachment, JournalRegime, SynthConfig
from app.services.corpus import load_corpus, validate, write_corpus
from app.services.counts import journal_counts, publication_counts
from app.services.distributions import citation_counts_matrix, peak_stats, reference_distribution
from app.services.synth import generate, generate_with_stats, make_config


def test_constant_growth_gives_constant_counts():
    corpus = generate(SynthConfig(years=5, base_papers=100, growth_rate=1.0, refs_mean=3.0, seed=1))
    counts = publication_counts(corpus)
    assert counts.values == [100] * 5
    assert counts.years == list(range(1975, 1980))


def test_same_seed_same_corpus():
    config = SynthConfig(years=8, base_papers=40, growth_rate=1.1, refs_mean=5.0, attachment=Attachment.PREFERENTIAL, seed=42)
    first, second = generate(config), generate(config)
    assert first == second
    assert first.edges == second.edges

    other = generate(config.model_copy(update={"seed": 43}))
    assert other != first


def test_papers_and_venues_naming():
    corpus = generate(SynthConfig(years=2, base_papers=3, refs_mean=0.0, journal_regime=JournalRegime.fixed_count(2), seed=0))
    assert list(corpus.papers) == ["P1975-000000", "P1975-000001", "P1975-000002", "P1976-000000", "P1976-000001", "P1976-000002"]
    assert set(corpus.venues) <= {"J0000", "J0001"}
    assert corpus.edge_count == 0


def test_edge_count_matches_expectation():
    """T=30, N0=200, g=1.08, R=10: запрошенные ссылки в пределах 3 sigma от R * sum n_t"""
    config = SynthConfig(years=30, base_papers=200, growth_rate=1.08, refs_mean=10.0, seed=2024)
    corpus, stats = generate_with_stats(config)

    papers = sum(config.papers_per_year())
    assert stats.papers == papers == corpus.paper_count
    expected = config.refs_mean * papers
    assert abs(stats.requested_references - expected) <= 3 * math.sqrt(expected)
    assert stats.emitted == corpus.edge_count
    assert stats.emitted == stats.requested_references - stats.dropped
    assert stats.truncated > 0


def test_no_citations_earlier_than_one_year_before_publication():
    corpus = generate(SynthConfig(years=12, base_papers=50, refs_mean=8.0, epsilon=0.05, seed=9))
    gap = corpus.citing_years - corpus.cited_years
    assert gap.min() >= -1
    assert np.count_nonzero(gap == -1) > 0
    assert validate(corpus).pre_publication_edge_count == 0
    assert not np.any(corpus.citing_index == corpus.cited_index)
    keys = corpus.citing_index * corpus.paper_count + corpus.cited_index
    assert len(np.unique(keys)) == corpus.edge_count


def test_zero_epsilon_never_cites_the_future():
    corpus = generate(SynthConfig(years=10, base_papers=30, refs_mean=5.0, epsilon=0.0, seed=4))
    assert np.all(corpus.citing_years >= corpus.cited_years)


def test_journal_regimes_bound_venue_counts():
    fixed = generate(SynthConfig(years=10, base_papers=60, refs_mean=0.0, journal_regime=JournalRegime.fixed_count(7), seed=3))
    assert max(journal_counts(fixed).values) <= 7

    growing = generate(SynthConfig(years=10, base_papers=60, refs_mean=0.0, journal_regime=JournalRegime.growing_count(5, 3), seed=3))
    for t, (year, count) in enumerate(journal_counts(growing).counts.items()):
        assert count <= 5 + 3 * t
    assert journal_counts(growing)[1984] > 5


def test_reference_peak_follows_kernel_mode():
    config = SynthConfig(years=20, base_papers=150, refs_mean=10.0, age_kernel=AgeKernel(mode_age=2, decay=0.8), seed=8)
    matrix = citation_counts_matrix(generate(config))
    dist = reference_distribution(matrix, 1990)
    assert peak_stats(dist, 1990).peak_delta == -2


def test_preferential_attachment_concentrates_citations():
    base = dict(years=15, base_papers=200, refs_mean=10.0, seed=5)
    uniform = generate(SynthConfig(attachment=Attachment.UNIFORM, **base))
    preferential = generate(SynthConfig(attachment=Attachment.PREFERENTIAL, **base))
    top_uniform = np.bincount(uniform.cited_index, minlength=uniform.paper_count).max()
    top_preferential = np.bincount(preferential.cited_index, minlength=preferential.paper_count).max()
    assert top_preferential > top_uniform


def test_generate_write_load_round_trip(tmp_path):
    corpus = generate(SynthConfig(years=10, base_papers=30, growth_rate=1.1, refs_mean=6.0, seed=17))
    write_corpus(corpus, tmp_path / "papers.tsv", tmp_path / "citations.tsv")
    loaded, report = load_corpus(tmp_path / "papers.tsv", tmp_path / "citations.tsv")
    assert loaded == corpus
    assert report.is_clean


@pytest.mark.parametrize(
    "params",
    [
        {"years": 0, "base_papers": 10},
        {"years": 5, "base_papers": 0},
        {"years": 5, "base_papers": 10, "growth_rate": 0.9},
        {"years": 5, "base_papers": 10, "refs_mean": -1},
        {"years": 5, "base_papers": 10, "epsilon": 0.2},
        {"years": 5, "base_papers": 10, "age_kernel": {"mode_age": 2, "decay": 0}},
        {"years": 5, "base_papers": 10, "seed": -1},
        {"years": 5, "base_papers": 10, "journal_regime": {"kind": "fixed_count", "journals": 5, "growth": 2}},
        {"years": 500, "base_papers": 10},
        {"preset": "huge_growth"},
        {"years": 5, "base_papers": 10, "colour": "red"},
        {"years": 5, "base_papers": 10, "late_growth_rate": 1.5},
        {"years": 5, "base_papers": 10, "late_growth_start": 2},
        {"years": 5, "base_papers": 10, "late_growth_rate": 1.5, "late_growth_start": 5},
        {"years": 5, "base_papers": 10, "late_growth_rate": 0.5, "late_growth_start": 2},
        {"years": 5, "base_papers": 10, "refs_growth": 0},
        {"years": 5, "base_papers": 10, "refs_growth": "inf"},
    ],
)
def test_invalid_config(params):
    with pytest.raises(SynthConfigError):
        make_config(params)


def test_presets_and_description():
    strong = make_config({"preset": "strong_growth", "seed": 3})
    assert (strong.growth_rate, strong.years, strong.base_papers) == (1.0, 40, 300)
    assert (strong.late_growth_rate, strong.late_growth_start, strong.refs_growth) == (1.5, 27, 0.99)
    assert strong.seed == 3
    assert make_config({"preset": "mild_growth"}).growth_rate == 1.04

    description = SynthConfig(years=3, base_papers=10, refs_mean=4.0).describe()
    assert description["refs_distribution"] == "poisson(mean=4.0 * 1.0^t)"
    assert description["expected_papers"] == 30


def test_two_phase_growth_schedule():
    config = SynthConfig(years=6, base_papers=100, growth_rate=1.0, late_growth_rate=2.0, late_growth_start=3)
    assert [config.growth_rate_at(t) for t in range(1, 6)] == [1.0, 1.0, 2.0, 2.0, 2.0]
    assert config.papers_per_year() == [100, 100, 100, 200, 400, 800]

    corpus = generate(config.model_copy(update={"refs_mean": 0.0}))
    assert publication_counts(corpus).values == [100, 100, 100, 200, 400, 800]


def test_single_phase_schedule_is_geometric():
    config = SynthConfig(years=4, base_papers=1000, growth_rate=1.1)
    assert config.papers_per_year() == [1000, 1100, 1210, 1331]


def test_reference_mean_trend():
    config = SynthConfig(years=30, base_papers=100, refs_mean=10.0, refs_growth=0.9, seed=11)
    assert config.refs_mean_at(0) == 10.0
    assert config.refs_mean_at(2) == pytest.approx(8.1)

    _, stats = generate_with_stats(config)
    expected = sum(100 * config.refs_mean_at(t) for t in range(config.years))
    assert abs(stats.requested_references - expected) <= 3 * math.sqrt(expected)
