"""Unsupervised topic detection: Fuzzy ART clusters over TF-IDF vectors,
with a Paragraph Vector classifier for unseen documents."""

from .corpus import Corpus, Document, load_newsgroups_dir, split_corpus
from .evaluation import KNNTopicClassifier, f_measure, map_clusters_majority, prf, vigilance_sweep
from .exceptions import (ClusartError, DegenerateVocabularyError, DomainError, EmptyCorpusError,
                         EmptyVocabularyError, InferenceError, ParameterError)
from .fuzzyart import FuzzyART, complement_code
from .pipeline import ClusART, run_experiment
from .porter import porter_stem
from .pvec import ParagraphVector, ParagraphVectorClassifier
from .synthetic import generate_topic_corpus
from .textprep import TextPreprocessor
from .vectorizer import TopNTfidfVectorizer

__version__ = "0.1.0"

__all__ = [
    "ClusART", "ClusartError", "Corpus", "DegenerateVocabularyError", "Document", "DomainError",
    "EmptyCorpusError", "EmptyVocabularyError", "FuzzyART", "InferenceError",
    "KNNTopicClassifier", "ParagraphVector", "ParagraphVectorClassifier", "ParameterError",
    "TextPreprocessor", "TopNTfidfVectorizer", "complement_code", "f_measure",
    "generate_topic_corpus", "load_newsgroups_dir", "map_clusters_majority", "porter_stem", "prf",
    "run_experiment", "split_corpus", "vigilance_sweep",
]
