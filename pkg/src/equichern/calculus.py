"""Formal transfer-restriction calculus over products of unitary blocks.

An expression is a finite sum of transfer terms

    coefficient * tr[H, G](f_1 x ... x f_s)

where H is a block refinement of G and each word factor ``f_p`` is a
product ``e^p * t^q`` of basic classes on one block of H: the Euler class
``e`` of the tautological representation (degree twice the block size),
the unit ``1``, and the opaque degree-zero class ``t`` modeling the
transferred unit from the maximal-torus normalizer.  ``H = G`` gives a
plain term.  Expressions are kept in canonical form at all times: the
operations below eagerly rewrite restrictions of transfers through the
double coset expansion and products through reciprocity
(``tr(x) * y = tr(x * res(y))``), so equal canonical forms witness
provable equality.

Axioms for the opaque class: ``t`` restricts to the unit along any proper
block refinement (in particular to the maximal torus), and it augments to
the unit; on a 1-block it already is the unit.  No multiplication rule is
imposed: powers of ``t`` stay opaque.

The engine supports two reduction strategies ("innermost" peels block
refinements from the right and lets the left factor absorb products,
"outermost" the opposite); they must produce identical canonical forms,
and the test suite checks this on a randomized corpus.  A step budget
guards against non-terminating rule interactions, which would be a
defect, not an expected outcome.
"""

from __future__ import annotations

from .coeff import GradedCoefficient, INHOMOGENEOUS, ZERO
from .groups import (
    GroupDescriptor,
    Refinement,
    SubgroupArrow,
    compose_refinements,
    dc_index_range,
    is_trivial_refinement,
    refinement_subgroup,
    shuffle,
    torus_refinement,
    trivial_refinement,
    validate_refinement,
)
from .powerseries import PowerSeries, torus_algebra

# One word factor: (block dimension, Euler exponent, opaque exponent).
WordFactor = tuple[int, int, int]
Word = tuple[WordFactor, ...]
TermKey = tuple[Refinement, Word]

STRATEGIES = ("innermost", "outermost")
DEFAULT_DEPTH_BOUND = 10_000


class RewriteDepthExceeded(RuntimeError):
    """The rewrite step budget ran out; signals a defective rule interaction."""


def block_factor(dim: int, e: int = 0, t: int = 0) -> WordFactor:
    if dim < 1 or e < 0 or t < 0:
        raise ValueError(f"invalid word factor ({dim}, {e}, {t})")
    if dim == 1:
        t = 0  # on a 1-block the transferred normalizer unit is the unit
    return (dim, e, t)


def factor_degree(factor: WordFactor) -> int:
    dim, e, _ = factor
    return 2 * dim * e


def word_degree(word: Word) -> int:
    return sum(factor_degree(f) for f in word)


class ClassExpression:
    """A canonical sum of transfer terms over a fixed ambient group."""

    __slots__ = ("group", "terms")

    def __init__(self, group: GroupDescriptor, terms: dict[TermKey, GradedCoefficient] | None = None):
        self.group = group
        clean: dict[TermKey, GradedCoefficient] = {}
        if terms:
            for (refinement, word), coeff in terms.items():
                if coeff.is_zero():
                    continue
                validate_refinement(group, refinement)
                sub = refinement_subgroup(refinement)
                if len(word) != len(sub.blocks):
                    raise ValueError("word length does not match the subgroup blocks")
                word = tuple(
                    block_factor(dim, e, t)
                    for (dim, e, t), size in zip(word, sub.blocks)
                    if _check_dim(dim, size)
                )
                key = (refinement, word)
                if key in clean:
                    merged = clean[key] + coeff
                    if merged.is_zero():
                        del clean[key]
                    else:
                        clean[key] = merged
                else:
                    clean[key] = coeff
        self.terms = clean

    # -- constructors ---------------------------------------------------

    @staticmethod
    def zero(group: GroupDescriptor) -> "ClassExpression":
        return ClassExpression(group)

    @staticmethod
    def unit(group: GroupDescriptor) -> "ClassExpression":
        word = tuple(block_factor(b) for b in group.blocks)
        return ClassExpression(group, {(trivial_refinement(group), word): GradedCoefficient.one()})

    @staticmethod
    def scalar(group: GroupDescriptor, coeff: GradedCoefficient) -> "ClassExpression":
        return ClassExpression.unit(group).scale(coeff)

    @staticmethod
    def plain_word(group: GroupDescriptor, word: Word) -> "ClassExpression":
        return ClassExpression(group, {(trivial_refinement(group), tuple(word)): GradedCoefficient.one()})

    @staticmethod
    def euler(m: int) -> "ClassExpression":
        """The Euler class of the tautological representation of one block."""
        group = GroupDescriptor((m,))
        return ClassExpression.plain_word(group, (block_factor(m, e=1),))

    @staticmethod
    def opaque(m: int) -> "ClassExpression":
        """The transferred normalizer unit t on one block (the unit when m = 1)."""
        group = GroupDescriptor((m,))
        return ClassExpression.plain_word(group, (block_factor(m, t=1),))

    @staticmethod
    def transfer(group: GroupDescriptor, refinement: Refinement, word: Word) -> "ClassExpression":
        return ClassExpression(group, {(tuple(refinement), tuple(word)): GradedCoefficient.one()})

    # -- ring structure ---------------------------------------------------

    def _check_group(self, other: "ClassExpression"):
        if self.group != other.group:
            raise ValueError(f"ambient groups differ: {self.group} vs {other.group}")

    def __add__(self, other: "ClassExpression") -> "ClassExpression":
        self._check_group(other)
        merged = dict(self.terms)
        for key, coeff in other.terms.items():
            if key in merged:
                s = merged[key] + coeff
                if s.is_zero():
                    del merged[key]
                else:
                    merged[key] = s
            else:
                merged[key] = coeff
        return ClassExpression(self.group, merged)

    def __neg__(self) -> "ClassExpression":
        return ClassExpression(self.group, {k: -c for k, c in self.terms.items()})

    def __sub__(self, other: "ClassExpression") -> "ClassExpression":
        return self + (-other)

    def __mul__(self, other: "ClassExpression") -> "ClassExpression":
        return mul_expr(self, other)

    def scale(self, coeff: GradedCoefficient) -> "ClassExpression":
        return ClassExpression(self.group, {k: c * coeff for k, c in self.terms.items()})

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, ClassExpression)
            and self.group == other.group
            and self.terms == other.terms
        )

    def __hash__(self):
        return hash((self.group, frozenset((k, str(c)) for k, c in self.terms.items())))

    def is_zero(self) -> bool:
        return not self.terms

    def degree(self):
        """Common cohomological degree, or ZERO / INHOMOGENEOUS markers."""
        if not self.terms:
            return ZERO
        degrees = set()
        for (refinement, word), coeff in self.terms.items():
            d = coeff.degree()
            if d == INHOMOGENEOUS:
                return INHOMOGENEOUS
            degrees.add(d + word_degree(word))
        return degrees.pop() if len(degrees) == 1 else INHOMOGENEOUS

    def max_word_degree(self) -> int:
        if not self.terms:
            return 0
        return max(word_degree(word) for (_, word) in self.terms)

    def sorted_terms(self) -> list[tuple[TermKey, GradedCoefficient]]:
        return sorted(self.terms.items(), key=lambda item: item[0])

    # -- printing ---------------------------------------------------------

    def __str__(self) -> str:
        if not self.terms:
            return "0"
        pieces = []
        for key, coeff in self.sorted_terms():
            text = _term_text(self.group, key, coeff)
            if not pieces:
                pieces.append(text)
            elif text.startswith("-"):
                pieces.append(f"- {text[1:]}")
            else:
                pieces.append(f"+ {text}")
        return " ".join(pieces)

    def __repr__(self) -> str:
        return f"ClassExpression[{self.group}]({self})"


def _check_dim(dim: int, size: int) -> bool:
    if dim != size:
        raise ValueError(f"word factor dimension {dim} does not match block size {size}")
    return True


def _factor_text(factor: WordFactor) -> str:
    dim, e, t = factor
    pieces = []
    if e:
        pieces.append(f"e({dim})" if e == 1 else f"e({dim})^{e}")
    if t:
        pieces.append(f"t({dim})" if t == 1 else f"t({dim})^{t}")
    if not pieces:
        return f"1({dim})"
    return "*".join(pieces)


def _term_text(group: GroupDescriptor, key: TermKey, coeff: GradedCoefficient) -> str:
    refinement, word = key
    body = " x ".join(_factor_text(f) for f in word)
    if not is_trivial_refinement(refinement):
        body = f"tr[{refinement_subgroup(refinement)},{group}]({body})"
    coeff_text = str(coeff)
    multi = " + " in coeff_text or " - " in coeff_text
    if not body:
        return f"({coeff_text})" if multi else coeff_text
    if coeff.is_one():
        return body
    if coeff == GradedCoefficient.integer(-1):
        return f"-{body}"
    return f"({coeff_text})*{body}" if multi else f"{coeff_text}*{body}"


class Engine:
    """Rewrite engine: eager normalization with a strategy and a step budget."""

    def __init__(self, strategy: str = "innermost", depth_bound: int = DEFAULT_DEPTH_BOUND):
        if strategy not in STRATEGIES:
            raise ValueError(f"unknown strategy {strategy!r}; expected one of {STRATEGIES}")
        self.strategy = strategy
        self.remaining = depth_bound
        self.steps_used = 0

    def _spend(self):
        if self.remaining <= 0:
            raise RewriteDepthExceeded(
                "rewrite step budget exhausted; raise --depth-bound only if the input is genuinely large"
            )
        self.remaining -= 1
        self.steps_used += 1

    # -- restriction ------------------------------------------------------

    def restrict_expression(self, expr: ClassExpression, refinement: Refinement) -> ClassExpression:
        validate_refinement(expr.group, refinement)
        target = refinement_subgroup(refinement)
        if is_trivial_refinement(refinement):
            return ClassExpression(expr.group, dict(expr.terms))
        result = ClassExpression.zero(target)
        for key, coeff in expr.terms.items():
            result = result + self._restrict_term(expr.group, refinement, key).scale(coeff)
        return result

    def _restrict_term(self, group: GroupDescriptor, ref_k: Refinement, key: TermKey) -> ClassExpression:
        refinement, word = key
        pieces: list[ClassExpression] = []
        offset = 0
        for bi, size in enumerate(group.blocks):
            h_parts = refinement[bi]
            word_slice = word[offset : offset + len(h_parts)]
            offset += len(h_parts)
            pieces.append(self._restrict_single_block(size, h_parts, word_slice, ref_k[bi]))
        result = ClassExpression.unit(GroupDescriptor(()))
        for piece in pieces:
            result = external_product(result, piece)
        return result

    def _restrict_single_block(
        self, m: int, h_parts: tuple[int, ...], word: Word, k_parts: tuple[int, ...]
    ) -> ClassExpression:
        group = GroupDescriptor((m,))
        if k_parts == (m,):
            return ClassExpression(group, {((h_parts,), word): GradedCoefficient.one()})
        if len(h_parts) == 1:
            # a plain factor: e restricts by Whitney data, t to the unit
            _, e, _ = word[0]
            target = GroupDescriptor(k_parts)
            new_word = tuple(block_factor(p, e=e) for p in k_parts)
            return ClassExpression.plain_word(target, new_word)
        # both sides proper: peel one two-block layer off each and use the
        # double coset expansion, then recurse
        if self.strategy == "innermost":
            a, b = m - h_parts[-1], h_parts[-1]
            inner_ref = (h_parts[:-1], (h_parts[-1],))
            i, j = m - k_parts[-1], k_parts[-1]
            rest_ref = (k_parts[:-1], (k_parts[-1],))
        else:
            a, b = h_parts[0], m - h_parts[0]
            inner_ref = ((h_parts[0],), h_parts[1:])
            i, j = k_parts[0], m - k_parts[0]
            rest_ref = ((k_parts[0],), k_parts[1:])
        inner = ClassExpression(
            GroupDescriptor((a, b)), {(inner_ref, word): GradedCoefficient.one()}
        )
        step = self._res_tr_atomic(i, j, a, b, inner)
        if len(k_parts) > 2:
            step = self.restrict_expression(step, rest_ref)
        return step

    def _res_tr_atomic(
        self, i: int, j: int, a: int, b: int, inner: ClassExpression
    ) -> ClassExpression:
        """Expand res to U(i,j) of a transfer from U(a,b), both inside U(i+j)."""
        target = GroupDescriptor((i, j))
        result = ClassExpression.zero(target)
        for d in dc_index_range(i, j, a, b):
            self._spend()
            sh = shuffle(i, j, a, b, d)
            src_slots = (d, a - d, i - d, b - i + d)
            parts_a = tuple(p for p in (d, a - d) if p > 0)
            parts_b = tuple(p for p in (i - d, b - i + d) if p > 0)
            restricted = self.restrict_expression(inner, (parts_a, parts_b))
            reordered = _permute_blocks_by_shuffle(restricted, src_slots, sh.block_images)
            outer_ref = (
                tuple(p for p in (d, i - d) if p > 0),
                tuple(p for p in (a - d, b - i + d) if p > 0),
            )
            result = result + _transfer_wrap(target, outer_ref, reordered)
        return result

    # -- multiplication ----------------------------------------------------

    def mul_expressions(self, x: ClassExpression, y: ClassExpression) -> ClassExpression:
        x._check_group(y)
        result = ClassExpression.zero(x.group)
        for key1, c1 in x.terms.items():
            for key2, c2 in y.terms.items():
                result = result + self._mul_terms(x.group, key1, key2).scale(c1 * c2)
        return result

    def _mul_terms(self, group: GroupDescriptor, key1: TermKey, key2: TermKey) -> ClassExpression:
        r1, w1 = key1
        r2, w2 = key2
        plain1 = is_trivial_refinement(r1)
        plain2 = is_trivial_refinement(r2)
        if plain1 and plain2:
            word = tuple(
                block_factor(d1, e1 + e2, t1 + t2)
                for (d1, e1, t1), (_, e2, t2) in zip(w1, w2)
            )
            return ClassExpression.plain_word(group, word)
        if plain1 and not plain2:
            absorb, other = key2, key1
        elif plain2 and not plain1:
            absorb, other = key1, key2
        elif self.strategy == "innermost":
            absorb, other = key1, key2
        else:
            absorb, other = key2, key1
        # reciprocity: tr(w) * y = tr(w * res(y))
        self._spend()
        ref, word = absorb
        sub = refinement_subgroup(ref)
        res_other = self.restrict_expression(
            ClassExpression(group, {other: GradedCoefficient.one()}), ref
        )
        inner = self.mul_expressions(ClassExpression.plain_word(sub, word), res_other)
        return _transfer_wrap(group, ref, inner)


def _permute_blocks_by_shuffle(
    expr: ClassExpression, src_slots: tuple[int, ...], block_images: tuple[int, ...]
) -> ClassExpression:
    """Reorder the external factors of every term per the shuffle's block action."""
    nonzero = [p for p, size in enumerate(src_slots) if size > 0]
    order = sorted(range(len(nonzero)), key=lambda p: block_images[nonzero[p]])
    if order == list(range(len(nonzero))):
        return expr
    new_group = GroupDescriptor(tuple(expr.group.blocks[p] for p in order))
    terms: dict[TermKey, GradedCoefficient] = {}
    for (refinement, word), coeff in expr.terms.items():
        chunks = []
        offset = 0
        for parts in refinement:
            chunks.append(word[offset : offset + len(parts)])
            offset += len(parts)
        new_ref = tuple(refinement[p] for p in order)
        new_word = tuple(f for p in order for f in chunks[p])
        key = (new_ref, new_word)
        terms[key] = terms.get(key, GradedCoefficient.zero()) + coeff
    return ClassExpression(new_group, terms)


def _transfer_wrap(
    target: GroupDescriptor, outer_ref: Refinement, expr: ClassExpression
) -> ClassExpression:
    """Wrap an expression at the subgroup of ``outer_ref`` into a transfer to target."""
    if refinement_subgroup(outer_ref) != expr.group:
        raise AssertionError("transfer wrap: subgroup mismatch")
    terms: dict[TermKey, GradedCoefficient] = {}
    for (refinement, word), coeff in expr.terms.items():
        key = (compose_refinements(outer_ref, refinement), word)
        terms[key] = terms.get(key, GradedCoefficient.zero()) + coeff
    return ClassExpression(target, terms)


# -- public operations ------------------------------------------------------


def normalize(expr: ClassExpression) -> ClassExpression:
    """Re-canonicalize; operations keep expressions normal, so this is cheap."""
    return ClassExpression(expr.group, dict(expr.terms))


def mul_expr(
    x: ClassExpression,
    y: ClassExpression,
    *,
    strategy: str = "innermost",
    depth_bound: int = DEFAULT_DEPTH_BOUND,
) -> ClassExpression:
    return Engine(strategy, depth_bound).mul_expressions(x, y)


def external_product(x: ClassExpression, y: ClassExpression) -> ClassExpression:
    """The pairing onto the product group: concatenate blocks, refinements, words."""
    group = GroupDescriptor(x.group.blocks + y.group.blocks)
    terms: dict[TermKey, GradedCoefficient] = {}
    for (r1, w1), c1 in x.terms.items():
        for (r2, w2), c2 in y.terms.items():
            key = (r1 + r2, w1 + w2)
            coeff = c1 * c2
            if key in terms:
                terms[key] = terms[key] + coeff
            else:
                terms[key] = coeff
    return ClassExpression(group, terms)


def restrict_to(
    x: ClassExpression,
    refinement: Refinement,
    *,
    strategy: str = "innermost",
    depth_bound: int = DEFAULT_DEPTH_BOUND,
) -> ClassExpression:
    return Engine(strategy, depth_bound).restrict_expression(x, refinement)


def inflate(x: ClassExpression, blocks: tuple[int, ...], factor: int) -> ClassExpression:
    """Pull back along the projection of the product onto one factor."""
    if x.group.blocks != (blocks[factor],):
        raise ValueError("expression does not live on the named factor")
    group = GroupDescriptor(blocks)
    terms: dict[TermKey, GradedCoefficient] = {}
    for (refinement, word), coeff in x.terms.items():
        new_ref = tuple(
            refinement[0] if bi == factor else (size,) for bi, size in enumerate(blocks)
        )
        new_word = tuple(
            f
            for bi, size in enumerate(blocks)
            for f in (word if bi == factor else (block_factor(size),))
        )
        terms[(new_ref, new_word)] = coeff
    return ClassExpression(group, terms)


def res_expand(
    x: ClassExpression,
    arrow: SubgroupArrow,
    *,
    strategy: str = "innermost",
    depth_bound: int = DEFAULT_DEPTH_BOUND,
) -> ClassExpression:
    """Pull back along a supported arrow (refinement, projection, composite)."""
    if arrow.kind == "refinement":
        if arrow.target != x.group:
            raise ValueError(f"expression at {x.group} cannot restrict along arrow into {arrow.target}")
        return restrict_to(x, arrow.refinement, strategy=strategy, depth_bound=depth_bound)
    if arrow.kind == "projection":
        if arrow.target != x.group:
            raise ValueError("projection arrow target does not match the expression group")
        return inflate(x, arrow.source.blocks, arrow.factor)
    if arrow.kind == "composite":
        result = x
        for piece in reversed(arrow.chain):
            result = res_expand(result, piece, strategy=strategy, depth_bound=depth_bound)
        return result
    raise ValueError(f"unsupported arrow kind {arrow.kind!r}")


def torus_restrict(
    x: ClassExpression,
    max_degree: int = 12,
    *,
    strategy: str = "innermost",
    depth_bound: int = DEFAULT_DEPTH_BOUND,
) -> PowerSeries:
    """Fully restrict to the maximal torus, landing in the truncated x-algebra.

    This is the evaluation oracle: equal canonical forms always have equal
    torus images, but not conversely (the kernel is witnessed by 1 - t).
    """
    if x.max_word_degree() > max_degree:
        raise ValueError(
            f"truncation bound {max_degree} is too small for an expression of degree {x.max_word_degree()}"
        )
    restricted = restrict_to(
        x, torus_refinement(x.group), strategy=strategy, depth_bound=depth_bound
    )
    algebra = torus_algebra(x.group.blocks, max_degree)
    terms: dict[tuple[int, ...], GradedCoefficient] = {}
    for (refinement, word), coeff in restricted.terms.items():
        if not is_trivial_refinement(refinement):
            raise AssertionError("torus restriction left a transfer term behind")
        mono = tuple(e for (_, e, _) in word)
        if mono in terms:
            terms[mono] = terms[mono] + coeff
        else:
            terms[mono] = coeff
    return PowerSeries(algebra, terms)


def augment(
    x: ClassExpression,
    *,
    strategy: str = "innermost",
    depth_bound: int = DEFAULT_DEPTH_BOUND,
) -> GradedCoefficient:
    """Restriction to the trivial group, through the maximal torus."""
    bound = x.max_word_degree()
    series = torus_restrict(x, bound, strategy=strategy, depth_bound=depth_bound)
    return series.constant_coefficient()


def augment_factor(
    x: ClassExpression,
    factor: int,
    *,
    strategy: str = "innermost",
    depth_bound: int = DEFAULT_DEPTH_BOUND,
) -> ClassExpression:
    """Restrict along the inclusion that omits one factor of the product.

    Splits every term into the named factor times the rest, augments the
    factor part, and keeps the rest scaled by the resulting coefficient.
    """
    blocks = x.group.blocks
    if not 0 <= factor < len(blocks):
        raise ValueError(f"{x.group} has no factor {factor}")
    rest_group = GroupDescriptor(blocks[:factor] + blocks[factor + 1 :])
    result = ClassExpression.zero(rest_group)
    for (refinement, word), coeff in x.terms.items():
        offsets = []
        pos = 0
        for parts in refinement:
            offsets.append((pos, pos + len(parts)))
            pos += len(parts)
        lo, hi = offsets[factor]
        factor_expr = ClassExpression(
            GroupDescriptor((blocks[factor],)),
            {((refinement[factor],), word[lo:hi]): GradedCoefficient.one()},
        )
        value = augment(factor_expr, strategy=strategy, depth_bound=depth_bound)
        if value.is_zero():
            continue
        rest_key = (
            refinement[:factor] + refinement[factor + 1 :],
            word[:lo] + word[hi:],
        )
        result = result + ClassExpression(rest_group, {rest_key: coeff * value})
    return result
