"""Chern classes: constructors, restriction identities, representations.

The k-th Chern class at U(m) is the transferred class

    c_k = tr[U(k,m-k), U(m)](e(k) x 1(m-k)),

with the conventions c_0 = 1, c_m = e(m) and c_k = 0 for k > m.  The
functions here expose the structural identities as executable checks and
map expressions into the completed (power-series) model through the
maximal-torus image and the splitting-principle inverse.
"""

from __future__ import annotations

from dataclasses import dataclass

from . import calculus
from .calculus import ClassExpression, block_factor, external_product, mul_expr
from .coeff import GradedCoefficient
from .groups import GroupDescriptor, SubgroupArrow, trivial_group
from .powerseries import PowerSeries, SymmetryFailure, symmetrize_check


class WhitneyMismatch(AssertionError):
    """The double coset expansion disagreed with the product formula: a defect."""


def chern_class(k: int, m: int) -> ClassExpression:
    """The k-th Chern class at U(m) (at the trivial group when m = 0)."""
    if k < 0 or m < 0:
        raise ValueError("indices must be non-negative")
    if m == 0:
        group = trivial_group()
        return ClassExpression.unit(group) if k == 0 else ClassExpression.zero(group)
    group = GroupDescriptor((m,))
    if k > m:
        return ClassExpression.zero(group)
    if k == 0:
        return ClassExpression.unit(group)
    if k == m:
        return ClassExpression.euler(m)
    refinement = ((k, m - k),)
    word = (block_factor(k, e=1), block_factor(m - k))
    return ClassExpression.transfer(group, refinement, word)


def chern_factor_class(k: int, blocks: tuple[int, ...], factor: int) -> ClassExpression:
    """The class c_k of one unitary factor, inflated to the whole product."""
    return calculus.inflate(chern_class(k, blocks[factor]), blocks, factor)


def whitney_sum(k: int, i: int, j: int) -> ClassExpression:
    """The expected restriction of c_k to U(i,j): sum of c_d x c_{k-d}."""
    if i == 0:
        return chern_class(k, j)
    if j == 0:
        return chern_class(k, i)
    group = GroupDescriptor((i, j))
    total = ClassExpression.zero(group)
    for d in range(0, k + 1):
        left = chern_class(d, i)
        right = chern_class(k - d, j)
        if left.is_zero() or right.is_zero():
            continue
        total = total + external_product(left, right)
    return total


def whitney_restriction(k: int, m: int, split: tuple[int, int], **engine_opts) -> ClassExpression:
    """Restrict c_k at U(m) to U(i,j) and certify the product formula.

    Returns the normalized restriction; raises WhitneyMismatch when the
    rewrite result differs from the expected sum (never silently).
    """
    i, j = split
    if i + j != m or i < 0 or j < 0:
        raise ValueError(f"({i},{j}) is not a split of {m}")
    x = chern_class(k, m)
    if i == 0 or j == 0:
        restricted = calculus.normalize(x)
    else:
        restricted = calculus.restrict_to(x, ((i, j),), **engine_opts)
    expected = whitney_sum(k, i, j)
    if restricted != expected:
        raise WhitneyMismatch(
            f"res to U({i},{j}) of c({k},{m}) gave {restricted}, expected {expected}"
        )
    return restricted


def restrict_to_smaller(k: int, m: int, **engine_opts) -> ClassExpression:
    """Restrict c_k at U(m) along U(m-1) < U(m): drops to c_k, or to 0 at k = m."""
    if m < 1:
        raise ValueError("m must be at least 1")
    if m == 1:
        value = calculus.augment(chern_class(k, 1), **engine_opts)
        group = trivial_group()
        return ClassExpression.scalar(group, value)
    step = calculus.restrict_to(chern_class(k, m), ((m - 1, 1),), **engine_opts)
    return calculus.augment_factor(step, 1, **engine_opts)


def bundling_map(x: ClassExpression, max_degree: int = 12, **engine_opts):
    """Map into the completed model: torus image plus splitting inverse.

    Returns a PowerSeries over the Chern algebra of the ambient product,
    or a SymmetryFailure when the torus image is not blockwise symmetric
    (which signals an unsupported expression, not a mathematical error).
    """
    image = calculus.torus_restrict(x, max_degree, **engine_opts)
    return symmetrize_check(image)


# -- representations ---------------------------------------------------------


@dataclass(frozen=True)
class RepDescriptor:
    """A unitary representation presented as a composite of supported pieces.

    kind "identity": the tautological representation of U(m).
    kind "factor": the factor representation of a product, pulled back
        along the projection onto factor ``index``.
    kind "character": the ``index``-th coordinate character of a torus.
    kind "trivial": a trivial summand of dimension ``dim``.
    kind "sum": the direct sum of ``left`` and ``right`` over one group.
    kind "restriction": a representation of a larger group restricted
        along a supported arrow.
    """

    kind: str
    group: GroupDescriptor
    dim: int
    index: int | None = None
    left: "RepDescriptor | None" = None
    right: "RepDescriptor | None" = None
    arrow: SubgroupArrow | None = None
    inner: "RepDescriptor | None" = None


def identity_rep(m: int) -> RepDescriptor:
    return RepDescriptor("identity", GroupDescriptor((m,)), m)


def factor_rep(blocks: tuple[int, ...], index: int) -> RepDescriptor:
    if not 0 <= index < len(blocks):
        raise ValueError(f"no factor {index} in U{blocks}")
    return RepDescriptor("factor", GroupDescriptor(blocks), blocks[index], index=index)


def character_rep(torus_rank: int, index: int) -> RepDescriptor:
    """The character of T^rank projecting to the index-th circle (1-based)."""
    if not 1 <= index <= torus_rank:
        raise ValueError(f"character index {index} outside 1..{torus_rank}")
    return RepDescriptor("character", GroupDescriptor((1,) * torus_rank), 1, index=index)


def trivial_rep(group: GroupDescriptor, dim: int) -> RepDescriptor:
    return RepDescriptor("trivial", group, dim)


def sum_rep(left: RepDescriptor, right: RepDescriptor) -> RepDescriptor:
    if left.group != right.group:
        raise ValueError("direct summands must share the group")
    return RepDescriptor("sum", left.group, left.dim + right.dim, left=left, right=right)


def restricted_rep(rep: RepDescriptor, arrow: SubgroupArrow) -> RepDescriptor:
    if arrow.target != rep.group:
        raise ValueError("arrow target does not match the representation group")
    return RepDescriptor("restriction", arrow.source, rep.dim, arrow=arrow, inner=rep)


def chern_of_rep(rep: RepDescriptor, k: int, **engine_opts) -> ClassExpression:
    """The k-th Chern class of a representation, computed piecewise.

    Direct sums expand through the product formula, trivial summands are
    dropped, coordinate characters pull the degree-2 class back to their
    Euler class, and restrictions pull back along the arrow.
    """
    if k < 0:
        raise ValueError("k must be non-negative")
    if k > rep.dim:
        return ClassExpression.zero(rep.group)
    if rep.kind == "identity":
        return chern_class(k, rep.dim)
    if rep.kind == "factor":
        return chern_factor_class(k, rep.group.blocks, rep.index)
    if rep.kind == "character":
        if k == 0:
            return ClassExpression.unit(rep.group)
        word = tuple(
            block_factor(1, e=1 if b + 1 == rep.index else 0)
            for b in range(len(rep.group.blocks))
        )
        return ClassExpression.plain_word(rep.group, word)
    if rep.kind == "trivial":
        if k == 0:
            return ClassExpression.unit(rep.group)
        return ClassExpression.zero(rep.group)
    if rep.kind == "sum":
        total = ClassExpression.zero(rep.group)
        for d in range(0, k + 1):
            lhs = chern_of_rep(rep.left, d, **engine_opts)
            rhs = chern_of_rep(rep.right, k - d, **engine_opts)
            if lhs.is_zero() or rhs.is_zero():
                continue
            total = total + mul_expr(lhs, rhs, **engine_opts)
        return total
    if rep.kind == "restriction":
        return calculus.res_expand(chern_of_rep(rep.inner, k, **engine_opts), rep.arrow, **engine_opts)
    raise ValueError(f"unsupported representation piece {rep.kind!r}")


def euler_of_rep(rep: RepDescriptor, **engine_opts) -> ClassExpression:
    """The top Chern class of the representation."""
    return chern_of_rep(rep, rep.dim, **engine_opts)


def total_chern_series(rep: RepDescriptor, max_degree: int = 12, **engine_opts) -> PowerSeries:
    """Torus image of the total class 1 + c_1 + c_2 + ... of a torus representation."""
    total = None
    for k in range(0, rep.dim + 1):
        part = calculus.torus_restrict(chern_of_rep(rep, k, **engine_opts), max_degree, **engine_opts)
        total = part if total is None else total + part
    return total
