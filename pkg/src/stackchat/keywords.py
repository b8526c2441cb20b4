"""RAKE keyword extraction over normalized token sequences.

Candidate phrases are maximal stopword-free runs. Each word scores
degree/frequency, where degree counts co-occurring words (including the
word itself) within candidate phrases and frequency counts occurrences.
A phrase scores the sum of its member word scores.
"""

from __future__ import annotations

from collections import Counter


def candidate_phrases(tokens: list[str], stopwords: set[str]) -> list[tuple[str, ...]]:
    phrases: list[tuple[str, ...]] = []
    run: list[str] = []
    for tok in tokens:
        if tok in stopwords:
            if run:
                phrases.append(tuple(run))
                run = []
        else:
            run.append(tok)
    if run:
        phrases.append(tuple(run))
    return phrases


def extract_keywords_rake(tokens: list[str], stopwords: set[str]) -> list[tuple[str, float]]:
    """Scored phrases, descending score; ties break lexicographically."""
    phrases = candidate_phrases(tokens, stopwords)
    if not phrases:
        return []
    freq: Counter[str] = Counter()
    degree: Counter[str] = Counter()
    for phrase in phrases:
        for word in phrase:
            freq[word] += 1
            degree[word] += len(phrase)
    word_score = {w: degree[w] / freq[w] for w in freq}
    scored: dict[str, float] = {}
    for phrase in phrases:
        text = " ".join(phrase)
        if text not in scored:
            total = 0.0
            for word in phrase:
                total += word_score[word]
            scored[text] = total
    return sorted(scored.items(), key=lambda kv: (-kv[1], kv[0]))
