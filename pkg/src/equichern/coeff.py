"""The graded coefficient ring: integer polynomials on formal generators.

The base ring is graded-commutative with all generators in even negative
cohomological degree (``a1, a2, ...`` with ``deg(a_i) = -2*i``), so no
Koszul signs ever appear.  The generators are purely formal: no relations
are imposed.  Values are immutable and canonical: equal elements have
identical term maps and identical serializations.
"""

from __future__ import annotations

from typing import Iterable

# A monomial in the generators: ((index, exponent), ...), index ascending,
# exponents >= 1.  The empty tuple is the constant monomial.
CoeffMonomial = tuple[tuple[int, int], ...]

ZERO = "zero"
INHOMOGENEOUS = "inhomogeneous"


def generator_degree(index: int) -> int:
    return -2 * index


def monomial_degree(monomial: CoeffMonomial) -> int:
    return sum(exp * generator_degree(idx) for idx, exp in monomial)


class GradedCoefficient:
    """An exact element of the base graded ring.

    ``terms`` maps generator monomials to nonzero arbitrary-precision
    integers.  Treat instances as immutable.
    """

    __slots__ = ("terms",)

    def __init__(self, terms: dict[CoeffMonomial, int] | None = None):
        clean: dict[CoeffMonomial, int] = {}
        if terms:
            for mono, n in terms.items():
                if n != 0:
                    clean[mono] = clean.get(mono, 0) + n
                    if clean[mono] == 0:
                        del clean[mono]
        self.terms = clean

    @staticmethod
    def zero() -> "GradedCoefficient":
        return GradedCoefficient()

    @staticmethod
    def one() -> "GradedCoefficient":
        return GradedCoefficient.integer(1)

    @staticmethod
    def integer(n: int) -> "GradedCoefficient":
        return GradedCoefficient({(): n} if n else {})

    @staticmethod
    def generator(index: int) -> "GradedCoefficient":
        if index < 1:
            raise ValueError(f"generator index must be >= 1, got {index}")
        return GradedCoefficient({((index, 1),): 1})

    def is_zero(self) -> bool:
        return not self.terms

    def is_one(self) -> bool:
        return self.terms == {(): 1}

    def constant_term(self) -> int:
        return self.terms.get((), 0)

    def degree(self):
        """Common cohomological degree, or ZERO / INHOMOGENEOUS markers."""
        if not self.terms:
            return ZERO
        degrees = {monomial_degree(mono) for mono in self.terms}
        if len(degrees) == 1:
            return degrees.pop()
        return INHOMOGENEOUS

    def __add__(self, other: "GradedCoefficient") -> "GradedCoefficient":
        merged = dict(self.terms)
        for mono, n in other.terms.items():
            merged[mono] = merged.get(mono, 0) + n
        return GradedCoefficient(merged)

    def __neg__(self) -> "GradedCoefficient":
        return GradedCoefficient({mono: -n for mono, n in self.terms.items()})

    def __sub__(self, other: "GradedCoefficient") -> "GradedCoefficient":
        return self + (-other)

    def __mul__(self, other):
        if isinstance(other, int):
            other = GradedCoefficient.integer(other)
        product: dict[CoeffMonomial, int] = {}
        for m1, n1 in self.terms.items():
            for m2, n2 in other.terms.items():
                mono = _merge_monomials(m1, m2)
                product[mono] = product.get(mono, 0) + n1 * n2
        return GradedCoefficient(product)

    __rmul__ = __mul__

    def __pow__(self, exponent: int) -> "GradedCoefficient":
        if exponent < 0:
            raise ValueError("negative powers are not defined in the coefficient ring")
        result = GradedCoefficient.one()
        for _ in range(exponent):
            result = result * self
        return result

    def __eq__(self, other) -> bool:
        return isinstance(other, GradedCoefficient) and self.terms == other.terms

    def __hash__(self):
        return hash(frozenset(self.terms.items()))

    def __bool__(self) -> bool:
        return bool(self.terms)

    def sorted_terms(self) -> list[tuple[CoeffMonomial, int]]:
        return sorted(self.terms.items(), key=lambda item: (-monomial_degree(item[0]), item[0]))

    def __str__(self) -> str:
        if not self.terms:
            return "0"
        pieces: list[str] = []
        for mono, n in self.sorted_terms():
            body = "*".join(
                f"a{idx}^{exp}" if exp > 1 else f"a{idx}" for idx, exp in mono
            )
            if not body:
                text = str(abs(n))
            elif abs(n) == 1:
                text = body
            else:
                text = f"{abs(n)}*{body}"
            if not pieces:
                pieces.append(text if n > 0 else f"-{text}")
            else:
                pieces.append(f"+ {text}" if n > 0 else f"- {text}")
        return " ".join(pieces)

    def __repr__(self) -> str:
        return f"GradedCoefficient({self})"


def _merge_monomials(m1: CoeffMonomial, m2: CoeffMonomial) -> CoeffMonomial:
    exps: dict[int, int] = {}
    for idx, exp in m1:
        exps[idx] = exps.get(idx, 0) + exp
    for idx, exp in m2:
        exps[idx] = exps.get(idx, 0) + exp
    return tuple(sorted((idx, exp) for idx, exp in exps.items() if exp))


def coeff_sum(values: Iterable[GradedCoefficient]) -> GradedCoefficient:
    total = GradedCoefficient.zero()
    for v in values:
        total = total + v
    return total
