import io

import numpy as np
import pytest

from app.core.exceptions import (
    DanglingEdgeError,
    DuplicatePaperError,
    FilterConfigError,
    MalformedRecordError,
)
from app.models.corpus import CitationEdge, PaperRecord
from app.schemas.corpus import DocType, FilterConfig
from app.services.corpus import build_corpus, load_corpus, make_filter, validate, write_corpus


def test_empty_sources(write_corpus_files):
    """Пустые файлы -> пустой корпус и нулевой отчёт"""
    papers, citations = write_corpus_files([], [], header=False)
    corpus, report = load_corpus(papers, citations)

    assert corpus.paper_count == 0
    assert corpus.edge_count == 0
    assert corpus.year_range is None
    assert report.paper_count == 0
    assert report.edge_count == 0
    assert report.dropped_papers_by_reason == {}
    assert report.dropped_edges_by_reason == {}
    assert report.is_clean

    again = validate(corpus)
    assert again.shared_view() == report.shared_view()


def test_doc_type_filter_drops_paper_and_dangling_edge(write_corpus_files):
    """Статья типа Other отбрасывается вместе со ссылкой на неё"""
    papers, citations = write_corpus_files(
        ["A\t2000\tJ1\tArticle", "B\t2001\tJ1\tReview", "C\t2001\tJ2\tOther"],
        ["B\tA", "C\tA"],
    )
    corpus, report = load_corpus(papers, citations)

    assert report.paper_count == 2
    assert report.edge_count == 1
    assert report.dropped_papers_by_reason == {"doc_type": 1}
    assert report.dropped_edges_by_reason == {"dangling": 1}
    assert report.input_paper_lines == 3
    assert report.input_edge_lines == 2
    assert corpus.edges == (CitationEdge("B", "A"),)

    revalidated = validate(corpus)
    assert revalidated.paper_count == 2
    assert revalidated.edge_count == 1


def test_retained_plus_dropped_equals_input(write_corpus_files):
    papers, citations = write_corpus_files(
        [
            "A\t2000\tJ1\tarticle",
            "B\t1850\tJ1\tarticle",
            "C\t2001\tJ2\tletter",
            "D\t2002\tJ2\tARTICLE",
            "D\t2002\tJ2\tarticle",
        ],
        ["D\tA", "D\tA", "A\tA", "D\tB", "X\tA"],
    )
    corpus, report = load_corpus(papers, citations)

    assert report.paper_count + report.dropped_paper_count == report.input_paper_lines
    assert report.edge_count + report.dropped_edge_count == report.input_edge_lines
    assert report.dropped_papers_by_reason == {"doc_type": 1, "duplicate": 1, "year_range": 1}
    assert report.dropped_edges_by_reason == {"dangling": 2, "duplicate": 1, "self_citation": 1}
    assert sorted(corpus.papers) == ["A", "D"]


def test_pre_publication_edges_are_kept_and_counted(write_corpus_files):
    papers, citations = write_corpus_files(
        ["A\t1998\tJ1\tarticle", "B\t2000\tJ1\tarticle", "C\t1999\tJ1\tarticle"],
        ["A\tB", "C\tB"],
    )
    corpus, report = load_corpus(papers, citations)

    # 1998 -> 2000 нарушает x >= y - 1, 1999 -> 2000 допустимо
    assert report.pre_publication_edge_count == 1
    assert corpus.edge_count == 2
    assert not report.is_clean
    assert validate(corpus).shared_view() == report.shared_view()


def test_comments_and_blank_lines_are_ignored():
    papers = ["# exported 2024", "id\tyear\tvenue\tdoc_type", "", "A\t2000\tJ1\tarticle", "# note", "B\t2001\tJ1\treview"]
    citations = ["citing_id\tcited_id", "#", "B\tA", "   "]
    corpus, report = load_corpus(papers, citations)

    assert corpus.paper_count == 2
    assert corpus.edge_count == 1
    assert report.input_paper_lines == 2


def test_stream_sources():
    papers = io.StringIO("id\tyear\tvenue\tdoc_type\nA\t2000\tJ1\tarticle\nB\t2001\tJ1\tarticle\n")
    citations = io.StringIO("citing_id\tcited_id\nB\tA\n")
    corpus, _ = load_corpus(papers, citations)

    assert corpus.papers["B"] == PaperRecord("B", 2001, "J1", DocType.ARTICLE)


@pytest.mark.parametrize(
    "lines, line_number",
    [
        (["id\tyear\tvenue\tdoc_type", "A\t2000\tJ1"], 2),
        (["id\tyear\tvenue\tdoc_type", "A\t2000\tJ1\tarticle", "B\ttwo\tJ1\tarticle"], 3),
        (["id\tyear\tvenue\tdoc_type", "", "A\t2000.5\tJ1\tarticle"], 3),
        (["id\tyear", "A\t2000"], 1),
        (["id\tyear\tvenue\tdoc_type", "\t2000\tJ1\tarticle"], 2),
    ],
)
def test_malformed_line_reports_line_number(lines, line_number):
    """Ошибка разбора указывает номер строки"""
    with pytest.raises(MalformedRecordError) as exc_info:
        load_corpus(lines, ["citing_id\tcited_id"])
    assert exc_info.value.line_number == line_number
    assert f":{line_number}:" in str(exc_info.value)


@pytest.mark.parametrize(
    "papers, citations, source",
    [
        # первая строка данных вместо заголовка
        (["A\t2000\tJ1\tarticle", "B\t2001\tJ1\tarticle"], ["citing_id\tcited_id", "B\tA"], "<papers>"),
        (["id\tyear\tvenue\tdoc_type", "A\t2000\tJ1\tarticle"], ["B\tA"], "<citations>"),
        (["id\tyear\tjournal\tdoc_type", "A\t2000\tJ1\tarticle"], ["citing_id\tcited_id"], "<papers>"),
        (["id\tyear\tvenue\tdoc_type", "A\t2000\tJ1\tarticle"], ["cited_id\tciting_id"], "<citations>"),
    ],
)
def test_header_names_are_checked(papers, citations, source):
    """Заголовок сверяется по именам столбцов, а не только по их числу"""
    with pytest.raises(MalformedRecordError) as exc_info:
        load_corpus(papers, citations)
    assert exc_info.value.line_number == 1
    assert str(exc_info.value).startswith(f"{source}:1:")


def test_header_names_ignore_case():
    papers = ["ID\tYear\tVenue\tDoc_Type", "A\t2000\tJ1\tarticle", "B\t2001\tJ1\tarticle"]
    corpus, _ = load_corpus(papers, ["Citing_ID\tCited_ID", "B\tA"])
    assert corpus.edge_count == 1


def test_conflicting_duplicate_paper_raises():
    papers = ["id\tyear\tvenue\tdoc_type", "A\t2000\tJ1\tarticle", "A\t2001\tJ1\tarticle"]
    with pytest.raises(DuplicatePaperError) as exc_info:
        load_corpus(papers, ["citing_id\tcited_id"])
    assert exc_info.value.paper_id == "A"


def test_dangling_edge_raises_when_not_dropped():
    papers = ["id\tyear\tvenue\tdoc_type", "A\t2000\tJ1\tarticle"]
    citations = ["citing_id\tcited_id", "A\tZ"]
    with pytest.raises(DanglingEdgeError) as exc_info:
        load_corpus(papers, citations, FilterConfig(drop_dangling=False))
    assert exc_info.value.cited == "Z"


def test_empty_allowed_doc_types_is_rejected():
    with pytest.raises(FilterConfigError):
        make_filter(allowed_doc_types=[])
    with pytest.raises(FilterConfigError):
        make_filter(year_min=2010, year_max=2000)


def test_filter_is_monotone():
    """Расширение набора типов не уменьшает корпус"""
    papers = [
        PaperRecord("A", 2000, "J1", DocType.ARTICLE),
        PaperRecord("B", 2001, "J1", DocType.REVIEW),
        PaperRecord("C", 2001, "J1", DocType.OTHER),
    ]
    edges = [("B", "A"), ("C", "A"), ("C", "B")]
    narrow, _ = build_corpus(papers, edges, make_filter(allowed_doc_types=["article"]))
    default, _ = build_corpus(papers, edges)
    wide, _ = build_corpus(papers, edges, make_filter(allowed_doc_types=["article", "review", "other"]))

    assert narrow.paper_count <= default.paper_count <= wide.paper_count
    assert narrow.edge_count <= default.edge_count <= wide.edge_count
    assert wide.edge_count == 3


def test_input_order_independence():
    papers = ["A\t2000\tJ1\tarticle", "B\t2001\tJ2\tarticle", "C\t2002\tJ1\treview"]
    citations = ["B\tA", "C\tA", "C\tB"]
    header_p, header_c = "id\tyear\tvenue\tdoc_type", "citing_id\tcited_id"

    first, _ = load_corpus([header_p] + papers, [header_c] + citations)
    second, _ = load_corpus([header_p] + papers[::-1], [header_c] + citations[::-1])

    assert first == second
    assert first.edges == second.edges


def test_validate_is_idempotent(random_corpus_factory):
    for seed in range(5):
        corpus = random_corpus_factory(seed)
        report = validate(corpus)
        assert report.violations == []
        assert validate(corpus) == report


def test_corpus_is_read_only(small_corpus):
    with pytest.raises(ValueError):
        small_corpus.years[0] = 1990
    with pytest.raises(TypeError):
        small_corpus.papers["Z"] = PaperRecord("Z", 2000, "J1", DocType.ARTICLE)


def test_corpus_accessors(small_corpus):
    assert small_corpus.year_range == (2000, 2002)
    assert small_corpus.paper_ids_in_year(2001) == ("B", "C")
    assert small_corpus.paper_ids_in_year(1999) == ()
    assert small_corpus.papers["C"].doc_type == DocType.REVIEW
    assert len(small_corpus.papers) == 5
    # канонический порядок ссылок: по (citing, cited)
    assert small_corpus.edges[0] == CitationEdge("A", "E")


def test_write_then_load_round_trip(small_corpus, tmp_path):
    papers_path, citations_path = tmp_path / "out" / "papers.tsv", tmp_path / "out" / "citations.tsv"
    write_corpus(small_corpus, papers_path, citations_path)

    loaded, report = load_corpus(papers_path, citations_path)
    assert loaded == small_corpus
    assert report.dropped_paper_count == 0
    assert report.dropped_edge_count == 0
    assert papers_path.read_text(encoding="utf-8").splitlines()[0] == "id\tyear\tvenue\tdoc_type"
    assert not list((tmp_path / "out").glob("*.tmp"))


def test_validation_report_rows(small_corpus):
    rows = validate(small_corpus).to_rows()
    metrics = {(row["metric"], row["key"]): row["value"] for row in rows}

    assert metrics[("paper_count", "")] == 5
    assert metrics[("edge_count", "")] == 6
    assert metrics[("pre_publication_edge_count", "")] == 1
    assert metrics[("year_histogram", "2002")] == 2
    assert np.sum([v for (m, _), v in metrics.items() if m == "year_histogram"]) == 5
