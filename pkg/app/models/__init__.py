from app.models.corpus import CitationEdge, Corpus, PaperRecord
from app.models.degree import DegreeHistogram, DegreeSample
from app.models.matrix import CitationMatrix

__all__ = ["CitationEdge", "Corpus", "PaperRecord", "DegreeHistogram", "DegreeSample", "CitationMatrix"]
