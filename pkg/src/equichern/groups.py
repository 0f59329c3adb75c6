"""Products of unitary blocks, their block subgroups, and shuffle data.

A group is an ordered tuple of positive block sizes: ``U(2,1)`` is
``(2, 1)``, the torus ``T(m)`` is ``(1,) * m``, and the trivial group is
the empty tuple.  The only subgroups the calculus needs are block
refinements (each block split into consecutive sub-blocks), factor
projections, and composites.  The combinatorics of restricting a
transfer lives in the shuffle permutations, which are constructed from
the piecewise formula and certified against their block-pattern action.
"""

from __future__ import annotations

from dataclasses import dataclass

# Per target block, the tuple of positive consecutive part sizes.
Refinement = tuple[tuple[int, ...], ...]


@dataclass(frozen=True)
class GroupDescriptor:
    blocks: tuple[int, ...]

    def __post_init__(self):
        if any(b < 1 for b in self.blocks):
            raise ValueError("block sizes must be positive; use canonical_block to drop zeros")

    @property
    def dimension(self) -> int:
        return sum(self.blocks)

    @property
    def is_trivial(self) -> bool:
        return not self.blocks

    @property
    def is_torus(self) -> bool:
        return all(b == 1 for b in self.blocks)

    def __str__(self) -> str:
        if self.is_trivial:
            return "1"
        if self.is_torus and len(self.blocks) > 1:
            return f"T({len(self.blocks)})"
        return "U(" + ",".join(str(b) for b in self.blocks) + ")"

    __repr__ = __str__


def unitary(*blocks: int) -> GroupDescriptor:
    return GroupDescriptor(tuple(blocks))


def torus(m: int) -> GroupDescriptor:
    return GroupDescriptor((1,) * m)


def trivial_group() -> GroupDescriptor:
    return GroupDescriptor(())


def canonical_block(entries: tuple[int, ...]) -> tuple[GroupDescriptor, dict[int, int]]:
    """Drop zero blocks; also return the map old position -> new position."""
    if any(e < 0 for e in entries):
        raise ValueError("block sizes must be non-negative")
    positions: dict[int, int] = {}
    blocks = []
    for i, e in enumerate(entries):
        if e > 0:
            positions[i + 1] = len(blocks) + 1
            blocks.append(e)
    return GroupDescriptor(tuple(blocks)), positions


# -- refinements ---------------------------------------------------------


def validate_refinement(group: GroupDescriptor, refinement: Refinement):
    if len(refinement) != len(group.blocks):
        raise ValueError(f"refinement has {len(refinement)} parts for {group}")
    for parts, size in zip(refinement, group.blocks):
        if not parts or any(p < 1 for p in parts):
            raise ValueError("refinement parts must be positive")
        if sum(parts) != size:
            raise ValueError(f"refinement parts {parts} do not sum to block size {size}")


def refinement_subgroup(refinement: Refinement) -> GroupDescriptor:
    return GroupDescriptor(tuple(p for parts in refinement for p in parts))


def trivial_refinement(group: GroupDescriptor) -> Refinement:
    return tuple((b,) for b in group.blocks)


def torus_refinement(group: GroupDescriptor) -> Refinement:
    return tuple((1,) * b for b in group.blocks)


def is_trivial_refinement(refinement: Refinement) -> bool:
    return all(len(parts) == 1 for parts in refinement)


def refinement_from_subgroup(group: GroupDescriptor, sub: GroupDescriptor) -> Refinement:
    """Recover the unique consecutive partition of ``group`` with rows ``sub``.

    Raises ValueError when ``sub`` is not a block refinement: the greedy
    walk is forced, so existence is equivalent to uniqueness.
    """
    parts: list[tuple[int, ...]] = []
    it = iter(sub.blocks)
    pending: list[int] = []
    acc = 0
    for size in group.blocks:
        current: list[int] = []
        while acc < size:
            try:
                nxt = next(it)
            except StopIteration:
                raise ValueError(f"{sub} is not a block refinement of {group}") from None
            current.append(nxt)
            acc += nxt
        if acc != size:
            raise ValueError(f"{sub} is not a block refinement of {group}")
        parts.append(tuple(current))
        acc = 0
        pending.clear()
    if next(it, None) is not None:
        raise ValueError(f"{sub} is not a block refinement of {group}")
    refinement = tuple(parts)
    validate_refinement(group, refinement)
    return refinement


def compose_refinements(outer: Refinement, inner: Refinement) -> Refinement:
    """Refinement-of-refinement: ``inner`` refines the subgroup of ``outer``."""
    sub = refinement_subgroup(outer)
    if len(inner) != len(sub.blocks):
        raise ValueError("inner refinement does not match the subgroup of the outer one")
    composed: list[tuple[int, ...]] = []
    pos = 0
    for parts in outer:
        merged: list[int] = []
        for p in parts:
            if sum(inner[pos]) != p:
                raise ValueError("inner refinement parts do not match outer part sizes")
            merged.extend(inner[pos])
            pos += 1
        composed.append(tuple(merged))
    return tuple(composed)


# -- subgroup arrows ------------------------------------------------------


@dataclass(frozen=True)
class SubgroupArrow:
    """A supported homomorphism ``source -> target``.

    kind "refinement": source is a block refinement of target (an inclusion).
    kind "projection": target is one unitary factor of source.
    kind "composite": a chain of arrows, applied left to right.
    """

    source: GroupDescriptor
    target: GroupDescriptor
    kind: str
    refinement: Refinement | None = None
    factor: int | None = None
    chain: tuple["SubgroupArrow", ...] = ()


def refinement_arrow(target: GroupDescriptor, refinement: Refinement) -> SubgroupArrow:
    validate_refinement(target, refinement)
    return SubgroupArrow(refinement_subgroup(refinement), target, "refinement", refinement=refinement)


def subgroup_arrow(target: GroupDescriptor, source: GroupDescriptor) -> SubgroupArrow:
    return refinement_arrow(target, refinement_from_subgroup(target, source))


def torus_arrow(group: GroupDescriptor) -> SubgroupArrow:
    return refinement_arrow(group, torus_refinement(group))


def projection_arrow(source: GroupDescriptor, factor: int) -> SubgroupArrow:
    if not 0 <= factor < len(source.blocks):
        raise ValueError(f"{source} has no factor {factor}")
    return SubgroupArrow(source, GroupDescriptor((source.blocks[factor],)), "projection", factor=factor)


def compose_arrows(first: SubgroupArrow, second: SubgroupArrow) -> SubgroupArrow:
    """The composite ``first; second`` (so ``second.source == first.target``)."""
    if second.source != first.target:
        raise ValueError("arrows do not compose")
    return SubgroupArrow(first.source, second.target, "composite", chain=(first, second))


# -- double coset combinatorics -------------------------------------------


def dc_index_range(i: int, j: int, k: int, l: int) -> list[int]:
    """The index set of the double coset expansion: max(0,k-j) <= d <= min(i,k)."""
    if min(i, j, k, l) < 0:
        raise ValueError("block sizes must be non-negative")
    if i + j != k + l:
        raise ValueError(f"dimension mismatch: {i}+{j} != {k}+{l}")
    return list(range(max(0, k - j), min(i, k) + 1))


@dataclass(frozen=True)
class Shuffle:
    """The block shuffle appearing in the double coset expansion.

    ``permutation`` maps 1-based positions: position a goes to
    ``permutation[a-1]``.  Construction verifies the certificate that the
    permutation carries the consecutive block pattern
    ``(d, k-d, i-d, l-i+d)`` onto ``(d, i-d, k-d, j-k+d)`` preserving the
    order inside each block; ``block_images`` records where each source
    block lands (source slot -> target slot, 0-based over the 4 slots).
    """

    i: int
    j: int
    k: int
    l: int
    d: int
    permutation: tuple[int, ...]
    block_images: tuple[int, ...]


def shuffle(i: int, j: int, k: int, l: int, d: int) -> Shuffle:
    valid = dc_index_range(i, j, k, l)
    if d not in valid:
        raise ValueError(f"d={d} outside the double coset range {valid}")
    n = i + j

    def chi(a: int) -> int:
        if 1 <= a <= d:
            return a
        if d + 1 <= a <= k:
            return a - d + i
        if k + 1 <= a <= k + i - d:
            return a + d - k
        return a

    permutation = tuple(chi(a) for a in range(1, n + 1))
    if sorted(permutation) != list(range(1, n + 1)):
        raise AssertionError(f"shuffle({i},{j},{k},{l},{d}) is not a bijection")
    source_pattern = (d, k - d, i - d, l - i + d)
    target_pattern = (d, i - d, k - d, j - k + d)
    block_images = _certify_block_action(permutation, source_pattern, target_pattern)
    return Shuffle(i, j, k, l, d, permutation, block_images)


def _consecutive_ranges(pattern: tuple[int, ...]) -> list[range]:
    ranges = []
    start = 1
    for size in pattern:
        ranges.append(range(start, start + size))
        start += size
    return ranges


def _certify_block_action(
    permutation: tuple[int, ...],
    source_pattern: tuple[int, ...],
    target_pattern: tuple[int, ...],
) -> tuple[int, ...]:
    """Check the shuffle maps source blocks onto target blocks order-preservingly."""
    src_ranges = _consecutive_ranges(source_pattern)
    tgt_ranges = _consecutive_ranges(target_pattern)
    images = []
    for slot, rng in enumerate(src_ranges):
        if len(rng) == 0:
            images.append(-1)
            continue
        mapped = [permutation[a - 1] for a in rng]
        if mapped != sorted(mapped):
            raise AssertionError(f"shuffle does not preserve order inside source block {slot}")
        target_slot = None
        for t, trg in enumerate(tgt_ranges):
            if mapped[0] in trg:
                target_slot = t
                break
        if target_slot is None or any(v not in tgt_ranges[target_slot] for v in mapped):
            raise AssertionError(f"source block {slot} is not carried onto one target block")
        if len(mapped) != len(tgt_ranges[target_slot]):
            raise AssertionError(f"source block {slot} and its target block differ in size")
        images.append(target_slot)
    occupied = [s for s in images if s >= 0]
    if len(set(occupied)) != len(occupied):
        raise AssertionError("two source blocks land in the same target block")
    return tuple(images)
