"""Huffman coding tree for the hierarchical softmax."""

from __future__ import annotations

import heapq
from dataclasses import dataclass
from typing import Mapping

import numpy as np

from ..exceptions import DegenerateVocabularyError


@dataclass(frozen=True)
class HuffmanTree:
    """Binary Huffman tree over a vocabulary.

    ``codes[i]`` is the bit path of ``words[i]`` from the root and
    ``points[i]`` the inner-node indices visited along it (root first). Inner
    nodes are numbered in creation order, so the root is ``n_inner - 1``.
    """

    words: tuple[str, ...]
    counts: tuple[int, ...]
    codes: tuple[tuple[int, ...], ...]
    points: tuple[tuple[int, ...], ...]

    @property
    def n_inner(self) -> int:
        return len(self.words) - 1

    def code_lengths(self) -> np.ndarray:
        return np.asarray([len(c) for c in self.codes])

    def signs(self, i) -> np.ndarray:
        # bit 0 -> +1, bit 1 -> -1
        return 1.0 - 2.0 * np.asarray(self.codes[i], dtype=np.float64)

    def to_dict(self):
        return {"words": list(self.words), "counts": list(self.counts),
                "codes": ["".join(map(str, c)) for c in self.codes],
                "points": [list(p) for p in self.points]}

    @classmethod
    def from_dict(cls, d):
        return cls(tuple(d["words"]), tuple(d["counts"]),
                   tuple(tuple(int(b) for b in c) for c in d["codes"]),
                   tuple(tuple(p) for p in d["points"]))


def build_huffman(word_freqs: Mapping[str, int]) -> HuffmanTree:
    """Standard Huffman construction; equal counts are resolved by term order.

    Words are stored sorted by descending count then term, which is also the
    row order of the word matrix.
    """
    if len(word_freqs) < 2:
        raise DegenerateVocabularyError("a Huffman tree needs at least two distinct words")
    words = sorted(word_freqs, key=lambda w: (-word_freqs[w], w))
    V = len(words)
    # heap entries: (count, kind, key, node); leaves sort before inner nodes
    heap = [(word_freqs[w], 0, w, i) for i, w in enumerate(words)]
    heapq.heapify(heap)
    children = {}
    for inner in range(V - 1):
        c0, _, _, left = heapq.heappop(heap)
        c1, _, _, right = heapq.heappop(heap)
        node = V + inner
        children[node] = (left, right)
        heapq.heappush(heap, (c0 + c1, 1, inner, node))

    codes = [None] * V
    points = [None] * V
    stack = [(2 * V - 2, (), ())]
    while stack:
        node, code, path = stack.pop()
        if node < V:
            codes[node], points[node] = code, path
            continue
        left, right = children[node]
        path = path + (node - V,)
        stack.append((right, code + (1,), path))
        stack.append((left, code + (0,), path))
    return HuffmanTree(tuple(words), tuple(int(word_freqs[w]) for w in words),
                       tuple(codes), tuple(points))
