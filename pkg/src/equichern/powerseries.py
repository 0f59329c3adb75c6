"""Truncated graded power-series algebras over the coefficient ring.

Two families of algebras model the completed side of the theory:

* torus algebras on variables ``x1..xm`` (each of degree 2), carrying a
  block partition so one instance can model a product of unitary factors;
* Chern algebras on variables ``c_k`` of degree ``2k`` per factor
  (printed ``c2`` for a single factor, ``c2_1`` for factor 1 of a product).

Every algebra carries a fixed even truncation bound D: monomials of
variable degree above D are dropped by all operations.  The splitting map
sends the Chern variables to blockwise elementary symmetric polynomials;
its (truncation-exact) inverse on symmetric series is computed by an
exact linear solve over the monomial basis.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction

from . import linalg
from .coeff import GradedCoefficient, INHOMOGENEOUS, ZERO

Exponents = tuple[int, ...]


@dataclass(frozen=True)
class SeriesVariable:
    name: str
    degree: int
    block: int


@dataclass(frozen=True)
class SeriesAlgebraDescriptor:
    kind: str  # "torus" | "chern"
    blocks: tuple[int, ...]
    variables: tuple[SeriesVariable, ...]
    max_degree: int

    def __post_init__(self):
        if self.max_degree < 0 or self.max_degree % 2 != 0:
            raise ValueError("truncation bound must be an even non-negative integer")
        for v in self.variables:
            if v.degree <= 0 or v.degree % 2 != 0:
                raise ValueError(f"variable {v.name} must have even positive degree")

    def block_variable_indices(self, block: int) -> list[int]:
        return [i for i, v in enumerate(self.variables) if v.block == block]

    def monomial_degree(self, exponents: Exponents) -> int:
        return sum(e * v.degree for e, v in zip(exponents, self.variables))

    def variable_index(self, name: str) -> int:
        for i, v in enumerate(self.variables):
            if v.name == name:
                return i
        raise KeyError(name)


def torus_algebra(blocks: tuple[int, ...], max_degree: int) -> SeriesAlgebraDescriptor:
    """The algebra on x-variables of degree 2, grouped by unitary factor."""
    variables = []
    n = 0
    for b, size in enumerate(blocks):
        for _ in range(size):
            n += 1
            variables.append(SeriesVariable(f"x{n}", 2, b))
    return SeriesAlgebraDescriptor("torus", tuple(blocks), tuple(variables), max_degree)


def chern_algebra(blocks: tuple[int, ...], max_degree: int) -> SeriesAlgebraDescriptor:
    """The algebra on Chern variables c_k (degree 2k), one family per factor."""
    variables = []
    single = len(blocks) == 1
    for b, size in enumerate(blocks):
        for k in range(1, size + 1):
            name = f"c{k}" if single else f"c{k}_{b + 1}"
            variables.append(SeriesVariable(name, 2 * k, b))
    return SeriesAlgebraDescriptor("chern", tuple(blocks), tuple(variables), max_degree)


class PowerSeries:
    """A truncated series: finite map from exponent tuples to coefficients."""

    __slots__ = ("algebra", "terms")

    def __init__(self, algebra: SeriesAlgebraDescriptor, terms: dict[Exponents, GradedCoefficient] | None = None):
        self.algebra = algebra
        clean: dict[Exponents, GradedCoefficient] = {}
        if terms:
            for mono, coeff in terms.items():
                if len(mono) != len(algebra.variables):
                    raise ValueError("exponent tuple does not match the algebra")
                if algebra.monomial_degree(mono) > algebra.max_degree:
                    continue
                if coeff.is_zero():
                    continue
                if mono in clean:
                    merged = clean[mono] + coeff
                    if merged.is_zero():
                        del clean[mono]
                    else:
                        clean[mono] = merged
                else:
                    clean[mono] = coeff
        self.terms = clean

    # -- constructors -------------------------------------------------

    @staticmethod
    def zero(algebra: SeriesAlgebraDescriptor) -> "PowerSeries":
        return PowerSeries(algebra)

    @staticmethod
    def one(algebra: SeriesAlgebraDescriptor) -> "PowerSeries":
        return PowerSeries.constant(algebra, GradedCoefficient.one())

    @staticmethod
    def constant(algebra: SeriesAlgebraDescriptor, coeff: GradedCoefficient) -> "PowerSeries":
        zero_mono = (0,) * len(algebra.variables)
        return PowerSeries(algebra, {zero_mono: coeff})

    @staticmethod
    def variable(algebra: SeriesAlgebraDescriptor, index: int) -> "PowerSeries":
        mono = tuple(1 if i == index else 0 for i in range(len(algebra.variables)))
        return PowerSeries(algebra, {mono: GradedCoefficient.one()})

    # -- arithmetic ----------------------------------------------------

    def _check_same_algebra(self, other: "PowerSeries"):
        if self.algebra != other.algebra:
            raise ValueError("power series live in different algebras")

    def __add__(self, other: "PowerSeries") -> "PowerSeries":
        self._check_same_algebra(other)
        merged = dict(self.terms)
        for mono, coeff in other.terms.items():
            if mono in merged:
                s = merged[mono] + coeff
                if s.is_zero():
                    del merged[mono]
                else:
                    merged[mono] = s
            else:
                merged[mono] = coeff
        return PowerSeries(self.algebra, merged)

    def __neg__(self) -> "PowerSeries":
        return PowerSeries(self.algebra, {m: -c for m, c in self.terms.items()})

    def __sub__(self, other: "PowerSeries") -> "PowerSeries":
        return self + (-other)

    def __mul__(self, other: "PowerSeries") -> "PowerSeries":
        self._check_same_algebra(other)
        alg = self.algebra
        product: dict[Exponents, GradedCoefficient] = {}
        for m1, c1 in self.terms.items():
            for m2, c2 in other.terms.items():
                mono = tuple(a + b for a, b in zip(m1, m2))
                if alg.monomial_degree(mono) > alg.max_degree:
                    continue
                c = c1 * c2
                if mono in product:
                    s = product[mono] + c
                    if s.is_zero():
                        del product[mono]
                    else:
                        product[mono] = s
                elif not c.is_zero():
                    product[mono] = c
        return PowerSeries(alg, product)

    def scale(self, coeff: GradedCoefficient) -> "PowerSeries":
        return PowerSeries(self.algebra, {m: c * coeff for m, c in self.terms.items()})

    def __pow__(self, exponent: int) -> "PowerSeries":
        if exponent < 0:
            raise ValueError("negative powers not supported")
        result = PowerSeries.one(self.algebra)
        for _ in range(exponent):
            result = result * self
        return result

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, PowerSeries)
            and self.algebra == other.algebra
            and self.terms == other.terms
        )

    def __hash__(self):
        return hash((self.algebra, frozenset((m, str(c)) for m, c in self.terms.items())))

    def is_zero(self) -> bool:
        return not self.terms

    def constant_coefficient(self) -> GradedCoefficient:
        return self.terms.get((0,) * len(self.algebra.variables), GradedCoefficient.zero())

    def degree(self):
        """Common cohomological degree (coefficient plus variable part)."""
        if not self.terms:
            return ZERO
        degrees = set()
        for mono, coeff in self.terms.items():
            d = coeff.degree()
            if d == INHOMOGENEOUS:
                return INHOMOGENEOUS
            degrees.add(d + self.algebra.monomial_degree(mono))
        return degrees.pop() if len(degrees) == 1 else INHOMOGENEOUS

    def max_variable_degree(self) -> int:
        if not self.terms:
            return 0
        return max(self.algebra.monomial_degree(m) for m in self.terms)

    def homogeneous_part(self, var_degree: int) -> dict[Exponents, GradedCoefficient]:
        return {
            m: c for m, c in self.terms.items() if self.algebra.monomial_degree(m) == var_degree
        }

    def sorted_terms(self) -> list[tuple[Exponents, GradedCoefficient]]:
        return sorted(
            self.terms.items(),
            key=lambda t: (self.algebra.monomial_degree(t[0]), tuple(-e for e in t[0])),
        )

    def __str__(self) -> str:
        if not self.terms:
            return "0"
        pieces = []
        for mono, coeff in self.sorted_terms():
            body = "*".join(
                f"{v.name}^{e}" if e > 1 else v.name
                for e, v in zip(mono, self.algebra.variables)
                if e
            )
            text = _scaled_text(coeff, body)
            if not pieces:
                pieces.append(text)
            elif text.startswith("-"):
                pieces.append(f"- {text[1:]}")
            else:
                pieces.append(f"+ {text}")
        return " ".join(pieces)

    def __repr__(self) -> str:
        return f"PowerSeries({self})"


def _scaled_text(coeff: GradedCoefficient, body: str) -> str:
    s = str(coeff)
    multi = " + " in s or " - " in s
    if not body:
        return f"({s})" if multi else s
    if coeff.is_one():
        return body
    if coeff == GradedCoefficient.integer(-1):
        return f"-{body}"
    return f"({s})*{body}" if multi else f"{s}*{body}"


# -- monomial bases ----------------------------------------------------


def monomials_of_degree(algebra: SeriesAlgebraDescriptor, var_degree: int) -> list[Exponents]:
    """All exponent tuples of exact variable degree, in lexicographic order."""
    degrees = [v.degree for v in algebra.variables]

    def build(i: int, remaining: int):
        if i == len(degrees):
            if remaining == 0:
                yield ()
            return
        step = degrees[i]
        for e in range(remaining // step + 1):
            for rest in build(i + 1, remaining - e * step):
                yield (e,) + rest

    if var_degree < 0 or var_degree % 2 != 0:
        return []
    return sorted(build(0, var_degree))


def monomial_basis(algebra: SeriesAlgebraDescriptor, max_degree: int | None = None) -> list[Exponents]:
    """All monomials of variable degree <= max_degree (default: the bound D)."""
    bound = algebra.max_degree if max_degree is None else max_degree
    basis: list[Exponents] = []
    for t in range(0, bound + 1, 2):
        basis.extend(monomials_of_degree(algebra, t))
    return basis


# -- elementary symmetric polynomials and the splitting map -------------


def elementary_symmetric(algebra: SeriesAlgebraDescriptor, k: int, block: int = 0) -> PowerSeries:
    """The k-th elementary symmetric polynomial in one block of x-variables."""
    if k < 0:
        raise ValueError("k must be non-negative")
    if algebra.kind != "torus":
        raise ValueError("elementary symmetric polynomials live in a torus algebra")
    indices = algebra.block_variable_indices(block)
    if k == 0:
        return PowerSeries.one(algebra)
    if k > len(indices):
        return PowerSeries.zero(algebra)
    terms: dict[Exponents, GradedCoefficient] = {}
    for subset in itertools.combinations(indices, k):
        mono = tuple(1 if i in subset else 0 for i in range(len(algebra.variables)))
        terms[mono] = GradedCoefficient.one()
    return PowerSeries(algebra, terms)


def torus_of(algebra: SeriesAlgebraDescriptor) -> SeriesAlgebraDescriptor:
    if algebra.kind != "chern":
        raise ValueError("expected a Chern algebra")
    return torus_algebra(algebra.blocks, algebra.max_degree)


def splitting_map(series: PowerSeries, target: SeriesAlgebraDescriptor | None = None) -> PowerSeries:
    """Substitute each Chern variable by its blockwise elementary symmetric image.

    This is the ring homomorphism realizing the splitting-principle
    embedding of the Chern algebra into the torus algebra.
    """
    alg = series.algebra
    if alg.kind != "chern":
        raise ValueError("splitting map applies to Chern algebras")
    if target is None:
        target = torus_of(alg)
    if alg.max_degree > target.max_degree:
        raise ValueError("source truncation exceeds target truncation")
    images = [
        elementary_symmetric(target, v.degree // 2, v.block) for v in alg.variables
    ]
    result = PowerSeries.zero(target)
    for mono, coeff in series.terms.items():
        image = PowerSeries.one(target)
        for e, img in zip(mono, images):
            for _ in range(e):
                image = image * img
        result = result + image.scale(coeff)
    return result


@dataclass(frozen=True)
class SymmetryFailure:
    """Witness that a series is not blockwise symmetric.

    ``swap`` names two x-variables in the same block whose transposition
    changes the series, and ``monomial`` is an exponent tuple whose
    coefficient differs from that of its swapped image.
    """

    swap: tuple[str, str]
    monomial: Exponents

    def __str__(self) -> str:
        return f"not symmetric under ({self.swap[0]} {self.swap[1]}) at monomial {self.monomial}"


def _swap_monomial(mono: Exponents, i: int, j: int) -> Exponents:
    swapped = list(mono)
    swapped[i], swapped[j] = swapped[j], swapped[i]
    return tuple(swapped)


def symmetry_witness(series: PowerSeries) -> SymmetryFailure | None:
    """A failing adjacent transposition, or None when blockwise symmetric."""
    alg = series.algebra
    if alg.kind != "torus":
        raise ValueError("symmetry is checked in a torus algebra")
    for block in range(len(alg.blocks)):
        indices = alg.block_variable_indices(block)
        for a, b in zip(indices, indices[1:]):
            for mono, coeff in series.terms.items():
                other = series.terms.get(_swap_monomial(mono, a, b), GradedCoefficient.zero())
                if other != coeff:
                    return SymmetryFailure((alg.variables[a].name, alg.variables[b].name), mono)
    return None


def symmetrize_check(series: PowerSeries):
    """Invert the splitting map on a blockwise-symmetric series.

    Returns the unique preimage (a PowerSeries over the matching Chern
    algebra) when the input is symmetric under blockwise permutations of
    its x-variables; otherwise returns a SymmetryFailure witness.  The
    preimage is found degreewise by an exact linear solve against the
    splitting images of the Chern monomial basis; integrality of the
    solution is checked, not assumed.
    """
    alg = series.algebra
    witness = symmetry_witness(series)
    if witness is not None:
        return witness
    target = chern_algebra(alg.blocks, alg.max_degree)
    result_terms: dict[Exponents, GradedCoefficient] = {}
    degrees = sorted({alg.monomial_degree(m) for m in series.terms})
    for t in degrees:
        part = series.homogeneous_part(t)
        c_monos = monomials_of_degree(target, t)
        x_monos = monomials_of_degree(alg, t)
        x_index = {m: i for i, m in enumerate(x_monos)}
        columns = []
        for cm in c_monos:
            image = splitting_map(PowerSeries(target, {cm: GradedCoefficient.one()}), alg)
            col = [0] * len(x_monos)
            for m, c in image.terms.items():
                col[x_index[m]] = c.constant_term()
            columns.append(col)
        matrix = [[columns[j][i] for j in range(len(c_monos))] for i in range(len(x_monos))]
        coeff_monos = sorted({cm for c in part.values() for cm in c.terms})
        for mu in coeff_monos:
            rhs = [part.get(m, GradedCoefficient.zero()).terms.get(mu, 0) for m in x_monos]
            solution = linalg.solve_rational(matrix, rhs)
            if solution is None:
                raise ValueError(
                    f"symmetric series is not in the image of the splitting map in degree {t}"
                )
            for cm, lam in zip(c_monos, solution):
                if lam == 0:
                    continue
                if lam.denominator != 1:
                    raise ValueError("splitting preimage is not integral; bases disagree")
                inc = GradedCoefficient({mu: int(lam)})
                prev = result_terms.get(cm, GradedCoefficient.zero())
                result_terms[cm] = prev + inc
    return PowerSeries(target, result_terms)


def splitting_injectivity_rank(blocks: tuple[int, ...], max_degree: int) -> tuple[int, int]:
    """(rank of the splitting images, number of Chern monomials) up to D.

    Equality certifies that the splitting map is injective at truncation.
    """
    source = chern_algebra(blocks, max_degree)
    target = torus_algebra(blocks, max_degree)
    c_monos = monomial_basis(source)
    x_monos = monomial_basis(target)
    x_index = {m: i for i, m in enumerate(x_monos)}
    matrix = [[0] * len(c_monos) for _ in x_monos]
    for j, cm in enumerate(c_monos):
        image = splitting_map(PowerSeries(source, {cm: GradedCoefficient.one()}), target)
        for m, c in image.terms.items():
            matrix[x_index[m]][j] = c.constant_term()
    return linalg.rank(matrix), len(c_monos)
