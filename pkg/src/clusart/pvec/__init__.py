from .classifier import (ClusterSummary, ParagraphVectorClassifier, TopicPrediction,
                         build_summaries, classify, cosine, load_topics, save_topics)
from .huffman import HuffmanTree, build_huffman
from .model import ParagraphVector, PvModel, infer_vector, train_pv

__all__ = [
    "ClusterSummary", "HuffmanTree", "ParagraphVector", "ParagraphVectorClassifier", "PvModel",
    "TopicPrediction", "build_huffman", "build_summaries", "classify", "cosine", "infer_vector",
    "load_topics", "save_topics", "train_pv",
]
