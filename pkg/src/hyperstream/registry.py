"""Blocks kept sorted by cardinality under unit increments.

Layout (all 0-indexed):

* ``pos_block[p]``   block id stored at position ``p`` of the sorted array
* ``pos_bucket[p]``  bucket covering position ``p``
* ``block_pos[b]``   position of block ``b`` (inverse of ``pos_block``)
* ``bucket_card``, ``bucket_left``, ``bucket_right``  bucket pool records
* ``free_stack``     unused bucket slots; ``meta[0]`` is its height,
  ``meta[1]`` the number of live buckets

The pool has ``k + 1`` slots: with ``k`` live singleton buckets an increment
allocates the new bucket before releasing the emptied one.
"""

from __future__ import annotations

from collections import namedtuple

import numpy as np
from numba import njit

RegistryArrays = namedtuple(
    "RegistryArrays",
    [
        "pos_block",
        "pos_bucket",
        "block_pos",
        "bucket_card",
        "bucket_left",
        "bucket_right",
        "free_stack",
        "meta",
    ],
)


def new_registry_arrays(k: int) -> RegistryArrays:
    if k < 1:
        raise ValueError(f"block count must be >= 1, got {k}")
    slots = k + 1
    pos_block = np.arange(k, dtype=np.int32)
    pos_bucket = np.zeros(k, dtype=np.int32)
    block_pos = np.arange(k, dtype=np.int32)
    bucket_card = np.zeros(slots, dtype=np.int32)
    bucket_left = np.zeros(slots, dtype=np.int32)
    bucket_right = np.zeros(slots, dtype=np.int32)
    bucket_right[0] = k - 1
    # slot 0 is live; slots 1..k are free
    free_stack = np.zeros(slots, dtype=np.int32)
    free_stack[:k] = np.arange(k, 0, -1)
    meta = np.array([k, 1], dtype=np.int32)
    return RegistryArrays(
        pos_block, pos_bucket, block_pos, bucket_card,
        bucket_left, bucket_right, free_stack, meta,
    )


@njit(cache=True, inline="always")
def increment_arrays(pos_block, pos_bucket, block_pos, bucket_card, bucket_left, bucket_right,
                     free_stack, meta, d):
    # loop-free by construction; test_registry asserts this on the source
    p = block_pos[d]
    cur = pos_bucket[p]
    q = bucket_right[cur]
    c = pos_block[q]
    pos_block[p] = c
    pos_block[q] = d
    block_pos[c] = p
    block_pos[d] = q
    bucket_right[cur] = q - 1
    new_card = bucket_card[cur] + 1
    k = pos_block.shape[0]
    # no successor at the right edge counts as +inf cardinality
    if q + 1 < k and bucket_card[pos_bucket[q + 1]] == new_card:
        nxt = pos_bucket[q + 1]
        pos_bucket[q] = nxt
        bucket_left[nxt] = q
    else:
        top = meta[0] - 1
        fresh = free_stack[top]
        meta[0] = top
        pos_bucket[q] = fresh
        bucket_card[fresh] = new_card
        bucket_left[fresh] = q
        bucket_right[fresh] = q
        meta[1] += 1
    if bucket_right[cur] < bucket_left[cur]:
        free_stack[meta[0]] = cur
        meta[0] += 1
        meta[1] -= 1


@njit(cache=True)
def registry_increment(reg, d):
    # kernels should unpack ``reg`` once and call increment_arrays directly:
    # each namedtuple field access costs a refcount round trip
    pb, pk, bp, bc, bl, br, fs, meta = reg
    increment_arrays(pb, pk, bp, bc, bl, br, fs, meta, d)


@njit(cache=True)
def registry_min_block(reg):
    return reg.pos_block[0]


@njit(cache=True)
def registry_cardinality(reg, b):
    return reg.bucket_card[reg.pos_bucket[reg.block_pos[b]]]


@njit(cache=True)
def registry_violations(reg, counts):
    """Count broken invariants against a shadow array of true cardinalities.

    One sweep over the positions checks the bijection, that each position's
    bucket reports the block's true count, that bucket cardinalities strictly
    increase from one run of positions to the next, and that every run is
    exactly ``[left, right]`` of its bucket.  Since the array is a
    permutation of the blocks, this is equivalent to comparing against a
    full sort of ``counts``.
    """
    pos_block, pos_bucket, block_pos, bucket_card, bucket_left, bucket_right, _, meta = reg
    k = pos_block.shape[0]
    top = bucket_card.shape[0] - 1
    bad = 0
    runs = 0
    card = -1
    prev = -1
    for p in range(k):
        # clamped reads keep a corrupted registry from indexing out of bounds
        b = min(max(pos_block[p], 0), k - 1)
        bk = min(max(pos_bucket[p], 0), top)
        if bk != prev:
            c = bucket_card[bk]
            bad += (c <= card) + (bucket_left[bk] != p)
            if prev >= 0:
                bad += bucket_right[prev] != p - 1
            card = c
            prev = bk
            runs += 1
        bad += (block_pos[b] != p) + (card != counts[b])
    if prev >= 0:
        bad += bucket_right[prev] != k - 1
    bad += runs != meta[1]
    bad += (meta[1] > k) + (meta[0] + meta[1] != k + 1)
    return bad


class BlockRegistry:
    """Sorted-by-cardinality view of ``k`` blocks with O(1) increments.

    ``min_block()`` is always a block of globally minimum cardinality.
    Among blocks of equal cardinality the order is whatever the swap
    history produced.
    """

    def __init__(self, k: int):
        self.k = k
        self.arrays = new_registry_arrays(k)

    @classmethod
    def wrap(cls, arrays: RegistryArrays) -> "BlockRegistry":
        """View over arrays owned by a running partitioner."""
        reg = cls.__new__(cls)
        reg.k = len(arrays.pos_block)
        reg.arrays = arrays
        return reg

    def increment(self, block: int) -> None:
        if not 0 <= block < self.k:
            raise IndexError(f"unknown block id {block} (k={self.k})")
        registry_increment(self.arrays, block)

    def min_block(self) -> int:
        return int(self.arrays.pos_block[0])

    def cardinality_of(self, block: int) -> int:
        if not 0 <= block < self.k:
            raise IndexError(f"unknown block id {block} (k={self.k})")
        return int(registry_cardinality(self.arrays, block))

    def position_of(self, block: int) -> int:
        return int(self.arrays.block_pos[block])

    @property
    def order(self) -> list[int]:
        return self.arrays.pos_block.tolist()

    @property
    def live_buckets(self) -> int:
        return int(self.arrays.meta[1])

    def buckets(self) -> list[tuple[int, int, int]]:
        """Live buckets as ``(cardinality, left, right)``, left to right."""
        a = self.arrays
        out = []
        p = 0
        while p < self.k:
            bk = a.pos_bucket[p]
            out.append((int(a.bucket_card[bk]), int(a.bucket_left[bk]), int(a.bucket_right[bk])))
            p = max(int(a.bucket_right[bk]), p) + 1
        return out

    def violations(self, counts) -> int:
        return int(registry_violations(self.arrays, np.asarray(counts, dtype=np.int64)))

    def dump(self) -> str:
        a = self.arrays
        lines = [
            f"{p}:{a.pos_block[p]}:{a.bucket_card[a.pos_bucket[p]]}" for p in range(self.k)
        ]
        return "\n".join(lines) + "\n"
