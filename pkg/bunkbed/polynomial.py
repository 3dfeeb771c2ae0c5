"""
Connection probabilities of the constant-weight model as exact polynomials in `p`, and a
certified check that a polynomial is nonnegative on `[0, 1]`.

Polynomials come from one enumeration with every edge at a placeholder weight: the tally of
event hits by open-edge count `k` gives `N_k`, and the polynomial is
`sum_k N_k p ** k (1 - p) ** (m - k)`, so coefficients are integers.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from fractions import Fraction
from logging import getLogger
from typing import Iterable, List, Optional, Sequence, Tuple, Union

from xsentinels import Default

from .conf import resolve_setting
from .events import ConnectivityEvent, EdgeStates, connected
from .exact import holding_states, tally_events
from .exceptions import GraphError
from .graph import PercolationGraph, WeightedGraph, build_bunkbed, fraction_str, lower, upper
from .types import RationalLike, VertexId

log = getLogger(__name__)

_PLACEHOLDER = Fraction(1, 2)


@dataclass(frozen=True)
class RationalPolynomial:
    """ Exact polynomial in one variable; `coefficients[i]` multiplies `p ** i`. """

    coefficients: Tuple[Fraction, ...] = ()

    def __post_init__(self):
        coefficients = [Fraction(c) for c in self.coefficients]
        while coefficients and coefficients[-1] == 0:
            coefficients.pop()
        object.__setattr__(self, 'coefficients', tuple(coefficients))

    @classmethod
    def constant(cls, value: RationalLike) -> RationalPolynomial:
        return cls((Fraction(value),))

    @classmethod
    def variable(cls) -> RationalPolynomial:
        return cls((Fraction(0), Fraction(1)))

    @classmethod
    def from_json(cls, document: Sequence[str]) -> RationalPolynomial:
        try:
            return cls(tuple(Fraction(c) for c in document))
        except (TypeError, ValueError, ZeroDivisionError):
            raise GraphError(f"polynomial: invalid coefficient list {document!r}.") from None

    def json(self) -> List[str]:
        return [fraction_str(c) for c in self.coefficients]

    @property
    def degree(self) -> int:
        """ `-1` for the zero polynomial. """
        return len(self.coefficients) - 1

    @property
    def is_zero(self) -> bool:
        return not self.coefficients

    @property
    def leading(self) -> Fraction:
        return self.coefficients[-1] if self.coefficients else Fraction(0)

    @property
    def has_integer_coefficients(self) -> bool:
        return all(c.denominator == 1 for c in self.coefficients)

    def __call__(self, x: RationalLike) -> Fraction:
        x = Fraction(x)
        result = Fraction(0)
        for c in reversed(self.coefficients):
            result = result * x + c
        return result

    def __add__(self, other: RationalPolynomial) -> RationalPolynomial:
        size = max(len(self.coefficients), len(other.coefficients))
        a = self.coefficients + (Fraction(0),) * (size - len(self.coefficients))
        b = other.coefficients + (Fraction(0),) * (size - len(other.coefficients))
        return RationalPolynomial(tuple(x + y for x, y in zip(a, b)))

    def __neg__(self) -> RationalPolynomial:
        return RationalPolynomial(tuple(-c for c in self.coefficients))

    def __sub__(self, other: RationalPolynomial) -> RationalPolynomial:
        return self + (-other)

    def __mul__(self, other: Union[RationalPolynomial, RationalLike]) -> RationalPolynomial:
        if not isinstance(other, RationalPolynomial):
            factor = Fraction(other)
            return RationalPolynomial(tuple(c * factor for c in self.coefficients))
        if self.is_zero or other.is_zero:
            return RationalPolynomial()
        product = [Fraction(0)] * (len(self.coefficients) + len(other.coefficients) - 1)
        for i, a in enumerate(self.coefficients):
            for j, b in enumerate(other.coefficients):
                product[i + j] += a * b
        return RationalPolynomial(tuple(product))

    __rmul__ = __mul__

    def __pow__(self, exponent: int) -> RationalPolynomial:
        result = RationalPolynomial.constant(1)
        for _ in range(exponent):
            result = result * self
        return result

    def derivative(self) -> RationalPolynomial:
        return RationalPolynomial(tuple(i * c for i, c in enumerate(self.coefficients) if i))

    def divmod(self, divisor: RationalPolynomial) -> Tuple[RationalPolynomial, RationalPolynomial]:
        if divisor.is_zero:
            raise ZeroDivisionError("polynomial division by zero")
        remainder = list(self.coefficients)
        quotient = [Fraction(0)] * max(len(remainder) - divisor.degree, 0)
        while len(remainder) > divisor.degree and remainder:
            shift = len(remainder) - 1 - divisor.degree
            factor = remainder[-1] / divisor.leading
            quotient[shift] = factor
            for i, c in enumerate(divisor.coefficients):
                remainder[shift + i] -= factor * c
            remainder.pop()
            while remainder and remainder[-1] == 0:
                remainder.pop()
        return RationalPolynomial(tuple(quotient)), RationalPolynomial(tuple(remainder))

    def __floordiv__(self, divisor: RationalPolynomial) -> RationalPolynomial:
        return self.divmod(divisor)[0]

    def monic(self) -> RationalPolynomial:
        return self * (1 / self.leading) if self.coefficients else self

    def gcd(self, other: RationalPolynomial) -> RationalPolynomial:
        """ Monic greatest common divisor (zero if both are zero). """
        a, b = self, other
        while not b.is_zero:
            a, b = b, a.divmod(b)[1]
        return a.monic()

    def square_free(self) -> RationalPolynomial:
        """ Monic product of the distinct irreducible factors. """
        if self.degree < 1:
            return RationalPolynomial.constant(1) if not self.is_zero else self
        return (self // self.gcd(self.derivative())).monic()

    def multiplicity_factors(self) -> List[RationalPolynomial]:
        """
        `[f1, f2, ...]` with `self = leading * prod(f_i ** i)`, each `f_i` monic and square-free
        (Yun's decomposition).
        """
        if self.degree < 1:
            return []
        derivative = self.derivative()
        common = self.gcd(derivative)
        b = self // common
        c = derivative // common
        d = c - b.derivative()
        factors = []
        while b.degree >= 1:
            a = b.gcd(d)
            factors.append(a)
            b = b // a
            c = d // a
            d = c - b.derivative()
        return factors

    def taylor_shift(self, shift: RationalLike) -> RationalPolynomial:
        """ The polynomial `x -> self(x + shift)`. """
        shift = Fraction(shift)
        coefficients = list(self.coefficients)
        n = len(coefficients)
        for i in range(n):
            for j in range(n - 2, i - 1, -1):
                coefficients[j] += shift * coefficients[j + 1]
        return RationalPolynomial(tuple(coefficients))

    def sign_variations(self) -> int:
        signs = [c > 0 for c in self.coefficients if c != 0]
        return sum(1 for a, b in zip(signs, signs[1:]) if a != b)

    def __str__(self):
        if self.is_zero:
            return '0'
        terms = []
        for i, c in enumerate(self.coefficients):
            if c == 0:
                continue
            power = '' if i == 0 else 'p' if i == 1 else f"p^{i}"
            magnitude = fraction_str(abs(c))
            if not power:
                body = magnitude
            elif magnitude == '1':
                body = power
            else:
                body = f"{magnitude}*{power}"
            terms.append(('-' if c < 0 else '+', body))
        text = ('-' if terms[0][0] == '-' else '') + terms[0][1]
        for sign, body in terms[1:]:
            text += f" {sign} {body}"
        return text


def _binomial_basis(m: int) -> List[RationalPolynomial]:
    """ `p ** k * (1 - p) ** (m - k)` for `k = 0..m`. """
    p = RationalPolynomial.variable()
    q = RationalPolynomial.constant(1) - p
    powers_p = [RationalPolynomial.constant(1)]
    powers_q = [RationalPolynomial.constant(1)]
    for _ in range(m):
        powers_p.append(powers_p[-1] * p)
        powers_q.append(powers_q[-1] * q)
    return [powers_p[k] * powers_q[m - k] for k in range(m + 1)]


def event_polynomials(
    g: PercolationGraph,
    events: Sequence[ConnectivityEvent],
    states: Optional[EdgeStates] = None,
    *,
    cap=Default,
    workers=Default,
) -> List[RationalPolynomial]:
    """
    Each event's probability as a polynomial in `p`, where every positive-weight edge of `g`
    not fixed by `states` is open with probability `p`. Weight-0 edges stay closed; other
    weights of `g` are ignored.

    Raises:
        bunkbed.exceptions.CapExceededError: More free edges than `cap` (default
            `bunkbed_settings.poly_cap`).
    """
    cap = resolve_setting(cap, 'poly_cap')
    structure = g.with_edge_weights(
        {i: _PLACEHOLDER for i, edge in enumerate(g.edges) if edge.p > 0}
    )
    tally = tally_events(
        structure, events, states, cap=cap, workers=workers, what='polynomial tally'
    )
    m = tally.model.free_count
    basis = _binomial_basis(m)
    polynomials = []
    for counts in tally.counts:
        total = RationalPolynomial()
        for key, count in counts.items():
            # One weight class, so the tally key is the open-edge count.
            total = total + basis[int(key)] * count
        polynomials.append(total)
    log.debug(f"Built {len(polynomials)} polynomial(s) over {m} free edges.")
    return polynomials


def connection_polynomial(
    g: PercolationGraph,
    a: VertexId,
    c: VertexId,
    states: Optional[EdgeStates] = None,
    *,
    cap=Default,
    workers=Default,
) -> RationalPolynomial:
    """ `P(a <-> c)` with every (unforced) edge at weight `p`, as an exact polynomial. """
    return event_polynomials(g, [connected(a, c)], states, cap=cap, workers=workers)[0]


def gap_polynomial(
    g: WeightedGraph,
    v: VertexId,
    w: VertexId,
    holding: Optional[Iterable[VertexId]] = None,
    *,
    cap=Default,
    workers=Default,
) -> RationalPolynomial:
    """
    `P_p(v- <-> w-) - P_p(v- <-> w+)` on the bunkbed of `g`'s structure: every
    positive-weight horizontal edge and every vertical edge at `p`, or with `holding` given,
    horizontal edges at `p` and the vertical edges open exactly at the `holding` vertices.
    Weight-0 edges of `g` are absent.
    """
    b = build_bunkbed(g.with_weights(_PLACEHOLDER))
    states = None if holding is None else holding_states(b, holding)
    same, cross = event_polynomials(
        b,
        [connected(lower(v), lower(w)), connected(lower(v), upper(w))],
        states,
        cap=cap,
        workers=workers,
    )
    return same - cross


class VerdictKind(str, enum.Enum):
    NONNEGATIVE = 'nonnegative'
    NEGATIVE = 'negative'
    INCONCLUSIVE = 'inconclusive'


@dataclass(frozen=True)
class Verdict:
    kind: VerdictKind
    witness: Optional[Fraction] = None
    """ For `NEGATIVE`: a rational point of `[0, 1]` where the polynomial is negative. """
    value: Optional[Fraction] = None

    @property
    def nonnegative(self) -> bool:
        return self.kind is VerdictKind.NONNEGATIVE

    def json(self) -> dict:
        document = dict(verdict=self.kind.value)
        if self.witness is not None:
            document['witness'] = fraction_str(self.witness)
            document['value'] = fraction_str(self.value)
        return document


class _TooDeep(Exception):
    pass


def _roots_between(f: RationalPolynomial, lo: Fraction, hi: Fraction) -> int:
    """
    Descartes bound on the number of roots of `f` in the open interval `(lo, hi)`: exact
    when it is 0 or 1.
    """
    if f.degree < 1:
        return 0
    width = hi - lo
    scaled = RationalPolynomial(
        tuple(c * width ** i for i, c in enumerate(f.taylor_shift(lo).coefficients))
    )
    mirrored = RationalPolynomial(tuple(reversed(scaled.coefficients)))
    return mirrored.taylor_shift(1).sign_variations()


def _find_root(
    f: RationalPolynomial, lo: Fraction, hi: Fraction, depth: int
) -> Optional[Union[Fraction, Tuple[Fraction, Fraction]]]:
    """
    A root of square-free `f` in `(lo, hi)`: an exact rational root, or an interval holding
    exactly one root with nonzero ends; `None` if there is none.
    """
    variations = _roots_between(f, lo, hi)
    if variations == 0:
        return None
    if variations == 1:
        return lo, hi
    if depth <= 0:
        raise _TooDeep()
    middle = (lo + hi) / 2
    if f(middle) == 0:
        return middle
    return _find_root(f, lo, middle, depth - 1) or _find_root(f, middle, hi, depth - 1)


def _sign_change_witness(
    poly: RationalPolynomial,
    distinct: RationalPolynomial,
    root: Union[Fraction, Tuple[Fraction, Fraction]],
    odd: RationalPolynomial,
    depth: int,
) -> Verdict:
    """ Around a root of odd multiplicity, finds the side where `poly` is negative. """
    if isinstance(root, Fraction):
        delta = min(root, 1 - root) / 2
        for _ in range(depth):
            lo, hi = root - delta, root + delta
            if (
                distinct(lo) != 0
                and distinct(hi) != 0
                and _roots_between(distinct, lo, root) == 0
                and _roots_between(distinct, root, hi) == 0
            ):
                break
            delta /= 2
        else:
            return Verdict(VerdictKind.INCONCLUSIVE)
    else:
        lo, hi = root
        for _ in range(depth):
            if distinct(lo) != 0 and distinct(hi) != 0 and _roots_between(distinct, lo, hi) == 1:
                break
            middle = (lo + hi) / 2
            if odd(middle) == 0:
                return _sign_change_witness(poly, distinct, middle, odd, depth)
            if _roots_between(odd, lo, middle) % 2:
                hi = middle
            else:
                lo = middle
        else:
            return Verdict(VerdictKind.INCONCLUSIVE)

    for point in (lo, hi):
        value = poly(point)
        if value < 0:
            return Verdict(VerdictKind.NEGATIVE, point, value)
    return Verdict(VerdictKind.INCONCLUSIVE)


def _sample_points() -> Iterable[Fraction]:
    denominator = 2
    while True:
        for numerator in range(1, denominator):
            if math.gcd(numerator, denominator) == 1:
                yield Fraction(numerator, denominator)
        denominator += 1


def nonneg_on_unit_interval(poly: RationalPolynomial, *, max_depth=Default) -> Verdict:
    """
    Certifies `poly >= 0` on `[0, 1]`, or finds a rational witness where it is negative.

    `poly` changes sign only at its roots of odd multiplicity; these are the roots of the
    product of the odd factors of its square-free decomposition, located in `(0, 1)` by
    Descartes sign-variation bisection in exact arithmetic. Without such a root, the sign at
    any interior point where `poly` is nonzero decides.

    `INCONCLUSIVE` is returned only when bisection goes deeper than `max_depth` (default
    `bunkbed_settings.max_bisection_depth`).
    """
    max_depth = resolve_setting(max_depth, 'max_bisection_depth')
    if poly.is_zero:
        return Verdict(VerdictKind.NONNEGATIVE)
    if poly.degree == 0:
        if poly.leading > 0:
            return Verdict(VerdictKind.NONNEGATIVE)
        return Verdict(VerdictKind.NEGATIVE, Fraction(1, 2), poly.leading)

    factors = poly.multiplicity_factors()
    odd = RationalPolynomial.constant(1)
    for multiplicity, factor in enumerate(factors, start=1):
        if multiplicity % 2:
            odd = odd * factor
    distinct = poly.square_free()

    try:
        root = _find_root(odd, Fraction(0), Fraction(1), max_depth)
    except _TooDeep:
        log.warning(f"Root isolation for {poly} exceeded depth {max_depth}.")
        return Verdict(VerdictKind.INCONCLUSIVE)

    if root is not None:
        return _sign_change_witness(poly, distinct, root, odd, max_depth)

    for point in _sample_points():
        value = poly(point)
        if value > 0:
            return Verdict(VerdictKind.NONNEGATIVE)
        if value < 0:
            return Verdict(VerdictKind.NEGATIVE, point, value)
    raise AssertionError('unreachable')  # pragma: no cover
