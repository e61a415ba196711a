"""Generator for a small labelled corpus of vocabulary-disjoint topics.

A document uses every word of its own topic ``uses_per_word`` times, give
or take ``jitter``, plus every shared word about ``shared_uses`` times. The
tokens are shuffled and sprinkled with stopwords and punctuation so the
whole preprocessing chain has something to do.

Shared words occur in every document, so their IDF is zero and they leave
the TF-IDF vectors untouched. They matter for the Paragraph Vector stage:
without them every context window names the topic outright and paragraph
vectors learn nothing topical.

Keeping topic-word counts within a narrow band makes each topic a compact
box in TF-IDF space. With wide counts, slow-learning Fuzzy ART briefly
accepts members that no longer fit once the box has shrunk, and the
category count stops growing monotonically with the vigilance.
"""

from __future__ import annotations

import numpy as np

from .corpus import Corpus, Document

TOPIC_WORDS = {
    "astronomy": ["orbit", "planet", "comet", "telescope", "galaxy", "nebula", "asteroid",
                  "eclipse", "meteor", "satellite", "rocket", "lunar"],
    "cooking": ["recipe", "oven", "flour", "butter", "garlic", "simmer", "pastry", "kitchen",
                "sauce", "onion", "spice", "dough"],
    "hockey": ["puck", "goalie", "skate", "rink", "slapshot", "penalty", "playoff", "defenseman",
               "referee", "hattrick", "overtime", "faceoff"],
    "medicine": ["patient", "doctor", "vaccine", "symptom", "surgery", "diagnosis", "clinic",
                 "therapy", "virus", "dosage", "nurse", "fever"],
}

SHARED_WORDS = ["people", "time", "year", "week", "report", "question", "answer", "number"]

FILLER_STOPWORDS = ["the", "and", "of", "to", "is", "that", "it", "with", "for", "on"]


def generate_topic_corpus(docs_per_topic=50, uses_per_word=6, jitter=1, shared_uses=10,
                          stopword_rate=0.15, seed=0) -> Corpus:
    """Return ``4 * docs_per_topic`` documents ordered topic by topic.

    Ids look like ``astronomy-007``, so the lexicographic id order used by
    the loaders is also the generation order.
    """
    if not 0 <= jitter < uses_per_word:
        raise ValueError("jitter must lie in [0, uses_per_word)")
    if shared_uses < 3:
        raise ValueError("shared_uses must be at least 3")
    rng = np.random.default_rng(seed)
    docs = []
    for topic in sorted(TOPIC_WORDS):
        words = TOPIC_WORDS[topic]
        for i in range(docs_per_topic):
            counts = uses_per_word + rng.integers(-jitter, jitter + 1, size=len(words))
            shared = shared_uses + rng.integers(-2, 3, size=len(SHARED_WORDS))
            tokens = [w for w, c in zip(words + SHARED_WORDS, np.concatenate([counts, shared]))
                      for _ in range(c)]
            tokens = [tokens[k] for k in rng.permutation(len(tokens))]
            out = []
            for tok in tokens:
                out.append(tok)
                if rng.random() < stopword_rate:
                    out.append(FILLER_STOPWORDS[rng.integers(len(FILLER_STOPWORDS))])
            sentences = [" ".join(out[j:j + 8]).capitalize() + "." for j in range(0, len(out), 8)]
            docs.append(Document(f"{topic}-{i:03d}", " ".join(sentences), topic))
    return Corpus(tuple(docs))
