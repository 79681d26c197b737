"""Approximation toolkit: pruning, quantization, sparse-stream compression.

The compression codec targets post-activation streams, which are mostly
zeros: each encoded pair is a 5-bit zero-run length (0..31) followed by one
16-bit literal, packed big-endian and zero-padded to a byte boundary. A pair
is 21 bits, so a dense stream expands by at most 21/16 while a zero run of
up to 32 words collapses into one pair.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

PAIR_BITS = 21
RUN_BITS = 5
VALUE_BITS = 16
MAX_RUN = (1 << RUN_BITS) - 1
MAX_VALUE = (1 << VALUE_BITS) - 1


@dataclass(frozen=True)
class SparseStats:
    elements: int
    zeros: int

    @property
    def density(self) -> float:
        return 1.0 if self.elements == 0 else 1.0 - self.zeros / self.elements


def sparse_stats(tensor) -> SparseStats:
    arr = np.asarray(tensor)
    return SparseStats(elements=arr.size, zeros=int(np.count_nonzero(arr == 0)))


def prune_magnitude(weights, fraction: float):
    """Zero the floor(fraction * n) smallest-magnitude weights.

    Ties break toward the lower flat index. Returns the pruned copy and the
    boolean keep-mask.
    """
    if not 0.0 <= fraction <= 1.0:
        raise ValueError(f"fraction must be in [0, 1], got {fraction}")
    arr = np.asarray(weights, dtype=float)
    k = int(fraction * arr.size)
    mask = np.ones(arr.size, dtype=bool)
    if k:
        order = np.argsort(np.abs(arr.reshape(-1)), kind="stable")
        mask[order[:k]] = False
    mask = mask.reshape(arr.shape)
    return np.where(mask, arr, 0.0), mask


def prune_network(layer_weights: dict[str, np.ndarray], fraction: float,
                  order: dict[str, float] | None = None):
    """Prune a per-layer weight dictionary to a global fraction.

    With ``order`` absent, magnitudes compete globally across all layers.
    With ``order`` given (for example energy per weight from an energy
    report), layers are drained greedily in descending key order: the most
    expensive layers lose their smallest weights first until the global
    budget floor(fraction * total) is spent.
    """
    if not 0.0 <= fraction <= 1.0:
        raise ValueError(f"fraction must be in [0, 1], got {fraction}")
    arrays = {name: np.asarray(w, dtype=float) for name, w in layer_weights.items()}
    total = sum(a.size for a in arrays.values())
    budget = int(fraction * total)
    out: dict[str, tuple[np.ndarray, np.ndarray]] = {}

    if order is None:
        flat = np.concatenate([a.reshape(-1) for a in arrays.values()]) \
            if arrays else np.empty(0)
        _, mask = prune_magnitude(flat, fraction) if total else (flat, np.ones(0, bool))
        offset = 0
        for name, a in arrays.items():
            m = mask[offset:offset + a.size].reshape(a.shape)
            out[name] = (np.where(m, a, 0.0), m)
            offset += a.size
        return out

    missing = set(arrays) - set(order)
    if missing:
        raise ValueError(f"order lacks keys for layers {sorted(missing)}")
    remaining = budget
    # descending key; name breaks ties deterministically
    for name in sorted(arrays, key=lambda nm: (-order[nm], nm)):
        a = arrays[name]
        k = min(remaining, a.size)
        pruned, mask = prune_magnitude(a, 0.0)
        if k:
            flat_order = np.argsort(np.abs(a.reshape(-1)), kind="stable")
            m = np.ones(a.size, dtype=bool)
            m[flat_order[:k]] = False
            mask = m.reshape(a.shape)
            pruned = np.where(mask, a, 0.0)
        out[name] = (pruned, mask)
        remaining -= k
    return out


def quantize_uniform(tensor, bits: int) -> np.ndarray:
    """Symmetric uniform quantization to 2**(bits-1) - 1 magnitude levels.

    The peak magnitude maps exactly to the top level, so requantizing a
    quantized tensor is the identity. An all-zero tensor stays all zero.
    At bits = 1 the level count degenerates; it is clamped to one level,
    leaving outputs in {-peak, 0, +peak}.
    """
    if not 1 <= bits <= 16:
        raise ValueError(f"bits must be in [1, 16], got {bits}")
    arr = np.asarray(tensor, dtype=float)
    peak = float(np.max(np.abs(arr))) if arr.size else 0.0
    if peak == 0.0:
        return np.zeros_like(arr)
    levels = max((1 << (bits - 1)) - 1, 1)
    delta = peak / levels
    return np.round(arr / delta) * delta


class CodecError(ValueError):
    """Invalid source words or a corrupt encoded stream."""


def _check_words(words: Sequence[int]):
    for value in words:
        if not isinstance(value, (int, np.integer)) or not 0 <= value <= MAX_VALUE:
            raise CodecError(f"stream words must be integers in [0, {MAX_VALUE}], got {value!r}")


def _pairs(words: Sequence[int]):
    """Generate (run, value) pairs; a (31, 0) pair denotes 32 zeros."""
    run = 0
    for value in words:
        if value == 0:
            run += 1
            if run == MAX_RUN + 1:
                yield MAX_RUN, 0
                run = 0
        else:
            yield run, int(value)
            run = 0
    if run:
        # trailing zeros end in a literal zero
        yield run - 1, 0


def rle_pair_count(words: Sequence[int]) -> int:
    _check_words(words)
    return sum(1 for _ in _pairs(words))


def rle_encode(words: Sequence[int]) -> bytes:
    """Encode 16-bit words into the bit-packed run-length stream."""
    _check_words(words)
    out = bytearray()
    acc = 0
    nbits = 0
    for run, value in _pairs(words):
        acc = (acc << PAIR_BITS) | (run << VALUE_BITS) | value
        nbits += PAIR_BITS
        while nbits >= 8:
            nbits -= 8
            out.append((acc >> nbits) & 0xFF)
        acc &= (1 << nbits) - 1
    if nbits:
        out.append((acc << (8 - nbits)) & 0xFF)
    return bytes(out)


def rle_decode(data: bytes) -> list[int]:
    """Invert rle_encode. Rejects streams with dangling or dirty pad bits."""
    total_bits = 8 * len(data)
    npairs = total_bits // PAIR_BITS
    leftover = total_bits - npairs * PAIR_BITS
    if leftover >= 8:
        raise CodecError(f"truncated pair: {leftover} dangling bits")
    value = int.from_bytes(data, "big")
    if leftover and value & ((1 << leftover) - 1):
        raise CodecError("nonzero padding bits")
    words: list[int] = []
    for index in range(npairs):
        shift = total_bits - (index + 1) * PAIR_BITS
        pair = (value >> shift) & ((1 << PAIR_BITS) - 1)
        run = pair >> VALUE_BITS
        words.extend([0] * run)
        words.append(pair & MAX_VALUE)
    return words


def compression_ratio(words: Sequence[int]) -> float:
    """Raw bits over encoded pair bits; byte padding is not charged."""
    n = len(words)
    if n == 0:
        raise CodecError("ratio undefined for an empty stream")
    return (VALUE_BITS * n) / (PAIR_BITS * rle_pair_count(words))
