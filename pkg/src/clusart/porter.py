"""Porter (1980) suffix-stripping stemmer.

Follows the behaviour of Martin Porter's reference implementation, which
differs from the published rule list in two places: step 2 maps ``-bli`` to
``-ble`` (instead of ``-abli`` to ``-able``) and adds ``-logi`` to ``-log``.
Words of length one or two are returned unchanged.
"""

from functools import lru_cache

_VOWELS = frozenset("aeiou")

_STEP2 = {
    "a": (("ational", "ate"), ("tional", "tion")),
    "c": (("enci", "ence"), ("anci", "ance")),
    "e": (("izer", "ize"),),
    "l": (("bli", "ble"), ("alli", "al"), ("entli", "ent"), ("eli", "e"), ("ousli", "ous")),
    "o": (("ization", "ize"), ("ation", "ate"), ("ator", "ate")),
    "s": (("alism", "al"), ("iveness", "ive"), ("fulness", "ful"), ("ousness", "ous")),
    "t": (("aliti", "al"), ("iviti", "ive"), ("biliti", "ble")),
    "g": (("logi", "log"),),
}

# step 3 dispatches on the final letter, steps 2 and 4 on the penultimate one
_STEP3 = {
    "e": (("icate", "ic"), ("ative", ""), ("alize", "al")),
    "i": (("iciti", "ic"),),
    "l": (("ical", "ic"), ("ful", "")),
    "s": (("ness", ""),),
}

_STEP4 = {
    "a": ("al",),
    "c": ("ance", "ence"),
    "e": ("er",),
    "i": ("ic",),
    "l": ("able", "ible"),
    "n": ("ant", "ement", "ment", "ent"),
    "o": ("ion", "ou"),
    "s": ("ism",),
    "t": ("ate", "iti"),
    "u": ("ous",),
    "v": ("ive",),
    "z": ("ize",),
}


def _is_consonant(w, i):
    ch = w[i]
    if ch in _VOWELS:
        return False
    if ch == "y":
        return i == 0 or not _is_consonant(w, i - 1)
    return True


def _measure(stem):
    """Number of VC sequences in ``stem``: [C](VC)^m[V]."""
    m, i, n = 0, 0, len(stem)
    while i < n and _is_consonant(stem, i):
        i += 1
    while i < n:
        while i < n and not _is_consonant(stem, i):
            i += 1
        if i >= n:
            break
        while i < n and _is_consonant(stem, i):
            i += 1
        m += 1
    return m


def _has_vowel(stem):
    return any(not _is_consonant(stem, i) for i in range(len(stem)))


def _ends_double_consonant(w):
    return len(w) >= 2 and w[-1] == w[-2] and _is_consonant(w, len(w) - 1)


def _ends_cvc(w):
    n = len(w)
    if n < 3:
        return False
    return (_is_consonant(w, n - 1) and not _is_consonant(w, n - 2)
            and _is_consonant(w, n - 3) and w[-1] not in "wxy")


def _step1ab(w):
    if w.endswith("s"):
        if w.endswith("sses"):
            w = w[:-2]
        elif w.endswith("ies"):
            w = w[:-2]
        elif not w.endswith("ss"):
            w = w[:-1]
    if w.endswith("eed"):
        if _measure(w[:-3]) > 0:
            w = w[:-1]
        return w
    for suffix in ("ed", "ing"):
        if w.endswith(suffix):
            stem = w[:-len(suffix)]
            if not _has_vowel(stem):
                return w
            w = stem
            if w.endswith(("at", "bl", "iz")):
                return w + "e"
            if _ends_double_consonant(w):
                return w if w[-1] in "lsz" else w[:-1]
            if _measure(w) == 1 and _ends_cvc(w):
                return w + "e"
            return w
    return w


def _step1c(w):
    if w.endswith("y") and _has_vowel(w[:-1]):
        return w[:-1] + "i"
    return w


def _replace_suffix(w, table, key):
    # Only the first matching suffix in the group is considered, even when
    # its measure condition fails.
    if len(w) < 2:
        return w
    for suffix, replacement in table.get(w[key], ()):
        if w.endswith(suffix):
            stem = w[:-len(suffix)]
            return stem + replacement if _measure(stem) > 0 else w
    return w


def _step4(w):
    if len(w) < 2:
        return w
    for suffix in _STEP4.get(w[-2], ()):
        if not w.endswith(suffix):
            continue
        stem = w[:-len(suffix)]
        if suffix == "ion" and not (stem and stem[-1] in "st"):
            continue
        return stem if _measure(stem) > 1 else w
    return w


def _step5(w):
    if w.endswith("e"):
        m = _measure(w[:-1])
        if m > 1 or (m == 1 and not _ends_cvc(w[:-1])):
            w = w[:-1]
    if w.endswith("ll") and _measure(w) > 1:
        w = w[:-1]
    return w


@lru_cache(maxsize=65536)
def porter_stem(word: str) -> str:
    """Return the Porter stem of a lowercase word.

    >>> porter_stem("caresses"), porter_stem("apples"), porter_stem("berries")
    ('caress', 'appl', 'berri')
    """
    if len(word) <= 2:
        return word
    w = _step1ab(word)
    if len(w) > 1:
        w = _step5(_step4(_replace_suffix(_replace_suffix(_step1c(w), _STEP2, -2), _STEP3, -1)))
    return w
