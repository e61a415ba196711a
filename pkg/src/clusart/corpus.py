"""Loading, splitting and persisting newsgroup-style document collections."""

from __future__ import annotations

import json
import logging
import os
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Iterable

import numpy as np

from .exceptions import EmptyCorpusError, ParameterError

logger = logging.getLogger(__name__)

TRAIN = "train"
TEST = "test"
SPLITS = (TRAIN, TEST)


@dataclass(frozen=True)
class Document:
    id: str
    text: str
    gold_label: str | None = None
    split: str | None = None

    def __post_init__(self):
        if not self.id:
            raise ParameterError("document id must be non-empty")
        if self.split is not None and self.split not in SPLITS:
            raise ParameterError(f"split must be one of {SPLITS}, got {self.split!r}")


@dataclass(frozen=True)
class Corpus:
    documents: tuple[Document, ...]
    decode_warnings: int = field(default=0, compare=False)

    def __post_init__(self):
        ids = [d.id for d in self.documents]
        if len(set(ids)) != len(ids):
            raise ParameterError("document ids must be unique within a corpus")

    @property
    def labels(self) -> frozenset[str]:
        return frozenset(d.gold_label for d in self.documents if d.gold_label is not None)

    def __len__(self):
        return len(self.documents)

    def __iter__(self):
        return iter(self.documents)

    def subset(self, split: str) -> Corpus:
        return Corpus(tuple(d for d in self.documents if d.split == split))


def strip_header(text: str) -> str:
    """Drop every line up to and including the first blank line."""
    lines = text.split("\n")
    for i, line in enumerate(lines):
        if not line.strip():
            return "\n".join(lines[i + 1:])
    return text


def _read_text(path: Path) -> tuple[str, bool]:
    raw = path.read_bytes()
    try:
        return raw.decode("utf-8"), False
    except UnicodeDecodeError:
        return raw.decode("utf-8", errors="replace"), True


def _split_of(name: str) -> str | None:
    lowered = name.lower()
    for split in SPLITS:
        if lowered == split or lowered.endswith("-" + split) or lowered.endswith("_" + split):
            return split
    return None


def _load_topic_tree(root: Path, prefix: str, split: str | None,
                     strip_headers: bool) -> tuple[list[Document], int]:
    docs, warnings = [], 0
    for topic in sorted(p for p in os.listdir(root) if (root / p).is_dir()):
        topic_dir = root / topic
        for name in sorted(f for f in os.listdir(topic_dir) if (topic_dir / f).is_file()):
            text, replaced = _read_text(topic_dir / name)
            warnings += replaced
            if strip_headers:
                text = strip_header(text)
            docs.append(Document(f"{prefix}{topic}/{name}", text, topic, split))
    return docs, warnings


def load_newsgroups_dir(path, strip_headers: bool = False) -> Corpus:
    """Load a directory with one subdirectory per topic and one file per document.

    If the immediate subdirectories are a train root and a test root (for
    instance ``20news-bydate-train`` and ``20news-bydate-test``), each is read
    as a topic tree and its documents are tagged with the matching split; ids
    are then prefixed with the root name.

    Bytes that are not valid UTF-8 are replaced with U+FFFD and counted in
    ``Corpus.decode_warnings``.
    """
    root = Path(path)
    if not root.is_dir():
        raise FileNotFoundError(f"corpus directory not found: {root}")
    subdirs = sorted(p for p in os.listdir(root) if (root / p).is_dir())
    split_roots = {_split_of(s): s for s in subdirs}
    docs, warnings = [], 0
    if len(subdirs) == 2 and set(split_roots) == set(SPLITS):
        for split in SPLITS:
            name = split_roots[split]
            part, w = _load_topic_tree(root / name, name + "/", split, strip_headers)
            docs += part
            warnings += w
    else:
        docs, warnings = _load_topic_tree(root, "", None, strip_headers)
    if not docs:
        raise EmptyCorpusError(f"no documents found under {root}")
    if warnings:
        logger.warning("%d document(s) contained undecodable bytes", warnings)
    docs.sort(key=lambda d: d.id.encode("utf-8"))
    return Corpus(tuple(docs), decode_warnings=warnings)


def split_corpus(corpus: Corpus, strategy: str = "random", ratio: float = 0.8,
                 seed: int = 0) -> Corpus:
    """Tag every document with a train/test split.

    ``predefined`` checks that the loader already assigned splits. ``random``
    is stratified: within each label (and among unlabeled documents) a seeded
    permutation picks the train members, and per-label train counts are
    apportioned by largest remainder.
    """
    if strategy == "predefined":
        missing = [d.id for d in corpus if d.split is None]
        if missing:
            raise ParameterError(
                f"predefined split requires a train/test source tree; {len(missing)} "
                f"document(s) have no split (first: {missing[0]})")
        return corpus
    if strategy != "random":
        raise ParameterError(f"unknown split strategy {strategy!r}")
    if not 0.0 < ratio < 1.0:
        raise ParameterError(f"ratio must lie in (0, 1), got {ratio}")

    rng = np.random.default_rng(seed)
    groups: dict[str, list[int]] = {}
    for i, doc in enumerate(corpus.documents):
        groups.setdefault(doc.gold_label or "", []).append(i)
    # largest-remainder quotas: the train total is round(ratio * N) and every
    # label stays within one document of ratio * count
    labels = sorted(groups)
    quota = {lab: ratio * len(groups[lab]) for lab in labels}
    n_train_of = {lab: int(np.floor(quota[lab])) for lab in labels}
    spare = int(np.floor(ratio * len(corpus) + 0.5)) - sum(n_train_of.values())
    for lab in sorted(labels, key=lambda lab: (-(quota[lab] - n_train_of[lab]), lab))[:spare]:
        n_train_of[lab] += 1
    assigned: dict[int, str] = {}
    for label in labels:
        members = groups[label]
        n_train = n_train_of[label]
        order = rng.permutation(len(members))
        for rank, j in enumerate(order):
            assigned[members[j]] = TRAIN if rank < n_train else TEST
    docs = tuple(replace(d, split=assigned[i]) for i, d in enumerate(corpus.documents))
    return Corpus(docs, decode_warnings=corpus.decode_warnings)


def corpus_from_texts(texts: Iterable[str], labels: Iterable[str | None] | None = None,
                      splits: Iterable[str | None] | None = None, prefix: str = "doc") -> Corpus:
    texts = list(texts)
    labels = list(labels) if labels is not None else [None] * len(texts)
    splits = list(splits) if splits is not None else [None] * len(texts)
    width = len(str(max(len(texts) - 1, 0)))
    return Corpus(tuple(Document(f"{prefix}{i:0{width}d}", t, lab, s)
                        for i, (t, lab, s) in enumerate(zip(texts, labels, splits))))


def save_manifest(corpus: Corpus, path) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        for d in corpus:
            fh.write(json.dumps({"id": d.id, "label": d.gold_label, "split": d.split,
                                 "text": d.text}, ensure_ascii=False) + "\n")


def load_manifest(path) -> Corpus:
    docs = []
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            if line.strip():
                rec = json.loads(line)
                docs.append(Document(rec["id"], rec["text"], rec.get("label"), rec.get("split")))
    if not docs:
        raise EmptyCorpusError(f"manifest {path} is empty")
    return Corpus(tuple(docs))
