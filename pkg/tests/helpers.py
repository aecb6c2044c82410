"""Shared generators and independent oracles for the test suite."""

from __future__ import annotations

import math
from fractions import Fraction
from itertools import product

import numpy as np

from renflow import HistorySpec, SymbolSeries, WordDistribution, count_words


def iid_symbol_series(rng: np.random.Generator, length: int, alphabet: int, label: str = "") -> SymbolSeries:
    return SymbolSeries(
        symbols=rng.integers(0, alphabet, size=length),
        alphabet_size=alphabet,
        label=label,
    )


def random_word_distribution(
    rng: np.random.Generator,
    target_alphabet: int = 3,
    source_alphabet: int = 3,
    m: int = 1,
    l: int = 1,
    max_count: int = 30,
) -> WordDistribution:
    """Random positive counts over a random subset of all possible words."""
    mapping = {}
    words_x = list(product(range(target_alphabet), repeat=m))
    words_y = list(product(range(source_alphabet), repeat=l))
    for x_next in range(target_alphabet):
        for xw in words_x:
            for yw in words_y:
                count = int(rng.integers(0, max_count + 1))
                if count > 0:
                    mapping[(x_next, xw, yw)] = count
    if not mapping:
        mapping[(0, words_x[0], words_y[0])] = 1
    return WordDistribution.from_counts(
        mapping, target_alphabet, source_alphabet, m, l
    )


def noisy_copy_series(
    rng: np.random.Generator, length: int, alphabet: int, fidelity: float,
    label_source: str = "A", label_target: str = "B",
) -> tuple[SymbolSeries, SymbolSeries]:
    """Source is i.i.d. uniform; target copies the source's previous symbol
    with probability `fidelity`, otherwise errs to another symbol uniformly."""
    src = rng.integers(0, alphabet, size=length)
    tgt = np.empty(length, dtype=np.int64)
    tgt[0] = rng.integers(0, alphabet)
    copies = rng.random(length) < fidelity
    errors = rng.integers(1, alphabet, size=length)
    for t in range(1, length):
        tgt[t] = src[t - 1] if copies[t] else (src[t - 1] + errors[t]) % alphabet
    return (
        SymbolSeries(symbols=src, alphabet_size=alphabet, label=label_source),
        SymbolSeries(symbols=tgt, alphabet_size=alphabet, label=label_target),
    )


# -- lag-2 XOR process: the order-2 ground truth --------------------------------

def lag2_xor_series(
    rng: np.random.Generator, length: int, flip_probability: float = 0.25
) -> tuple[SymbolSeries, SymbolSeries]:
    """Binary pair where x_{t+1} = y_t XOR y_{t-1}, flipped with probability p.

    The coupling has source-memory two: histories of length one carry no
    information about the target's next symbol, histories of length two
    carry all of it, and longer histories add nothing.
    """
    padded = rng.integers(0, 2, size=length + 2)
    flips = (rng.random(length) < flip_probability).astype(np.int64)
    x = padded[1 : length + 1] ^ padded[0:length] ^ flips
    y = padded[2:]
    return (
        SymbolSeries(symbols=x, alphabet_size=2, label="X"),
        SymbolSeries(symbols=y, alphabet_size=2, label="Y"),
    )


def lag2_xor_exact_te(q: float, flip_probability: float, m: int) -> float:
    """Closed-form order-q transfer entropy of the lag-2 XOR process at (m, m).

    For m = 1 the source history reveals nothing (the fresh XOR input is
    uniform), so the value is 0.  For m >= 2 the target's next symbol is
    a Bernoulli(p)-corrupted function of the source word:
    S_q(X'|XW) = 1 bit and S_q(X'|XW, YW) = log2(p^q + (1-p)^q)/(1-q).
    """
    if m < 2:
        return 0.0
    p = flip_probability
    if abs(q - 1.0) < 1e-9:
        return 1.0 + p * math.log2(p) + (1 - p) * math.log2(1 - p)
    return 1.0 - math.log2(p**q + (1 - p) ** q) / (1.0 - q)


def lag2_xor_word_distribution(flip_numerator: int = 1, flip_denominator: int = 4) -> WordDistribution:
    """Exact stationary word distribution of the lag-2 XOR process at m = l = 2.

    Enumerates the hidden variables (two older source symbols, three
    noise draws) with exact rational weights and scales to integer
    counts, so library values computed from it are exact up to float
    rounding.  Flip probability is flip_numerator / flip_denominator.
    """
    p = Fraction(flip_numerator, flip_denominator)
    half = Fraction(1, 2)
    weights: dict[tuple, Fraction] = {}
    # Visible: x' = x_{t+1}, xw = (x_{t-1}, x_t), yw = (y_{t-1}, y_t).
    # Hidden: y_{t-2}, y_{t-3}, and the noise bits behind x_{t-1}, x_t, x'.
    for y_t, y_t1, y_t2, y_t3 in product((0, 1), repeat=4):
        base = half**4
        for n_prev, n_cur, n_next in product((0, 1), repeat=3):
            weight = base
            for bit in (n_prev, n_cur, n_next):
                weight *= p if bit else (1 - p)
            x_prev = y_t2 ^ y_t3 ^ n_prev
            x_cur = y_t1 ^ y_t2 ^ n_cur
            x_next = y_t ^ y_t1 ^ n_next
            key = (x_next, (x_prev, x_cur), (y_t1, y_t))
            weights[key] = weights.get(key, Fraction(0)) + weight
    scale = 1
    for w in weights.values():
        scale = scale * w.denominator // math.gcd(scale, w.denominator)
    mapping = {key: int(w * scale) for key, w in weights.items()}
    return WordDistribution.from_counts(mapping, 2, 2, 2, 2)


def estimate_te(x: SymbolSeries, y: SymbolSeries, m: int, l: int, q: float):
    """Convenience: count words and return the order-q transfer entropy value."""
    from renflow import renyi_transfer_entropy, shannon_transfer_entropy

    words = count_words(x, y, HistorySpec(m, l))
    if abs(q - 1.0) < 1e-9:
        return shannon_transfer_entropy(words).value
    return renyi_transfer_entropy(words, q).value
