"""Order-by-order construction of the semiclassical expansion terms.

The stationary kinetic equation, written in position/energy variables
(x, H = p^2/2 + V), turns into a recursion: the x-derivative of each
expansion term is a finite combination of odd potential derivatives,
powers of (H - V) and H-derivatives of the lower-order terms, so every
order is obtained by a single quadrature in x.  Terms are kept
seed-independent: a SeriesTerm maps (H-power m, derivative order j) to an
exact ring element c_{m,j}(x), meaning sum c_{m,j}(x) * H^m * f0^(j)(H).

Each order is only defined up to adding an arbitrary function of H; the
"paper" convention uses the closed form for the first correction and plain
antiderivatives above, while the "uniform" convention pins every correction
to vanish identically at a reference point x_ref.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction
from math import factorial

from .parser import parse_potential
from .ring import Coefficient, RingElem

CONVENTIONS = ("paper", "uniform")


class TermBudgetError(RuntimeError):
    """Series construction exceeded the configured monomial budget."""


class SeriesTerm:
    """One expansion order: finite sum of c_{m,j}(x) * H^m * f0^(j)(H)."""

    __slots__ = ("_cells",)

    def __init__(self, cells: dict[tuple[int, int], RingElem] | None = None):
        self._cells = {mj: c for mj, c in (cells or {}).items() if not c.is_zero()}

    @classmethod
    def zero(cls) -> "SeriesTerm":
        return cls()

    @classmethod
    def unit(cls) -> "SeriesTerm":
        """The abstract seed itself: 1 * H^0 * f0^(0)."""
        return cls({(0, 0): RingElem.one()})

    def cells(self):
        return sorted(self._cells.items(), key=lambda kv: (kv[0][1], kv[0][0]))

    def cell(self, m: int, j: int) -> RingElem:
        return self._cells.get((m, j), RingElem.zero())

    def is_zero(self) -> bool:
        return not self._cells

    def max_deriv_order(self) -> int:
        return max((j for _, j in self._cells), default=0)

    def max_h_power(self) -> int:
        return max((m for m, _ in self._cells), default=0)

    def term_count(self) -> int:
        return sum(c.term_count() for c in self._cells.values())

    def __eq__(self, other):
        if not isinstance(other, SeriesTerm):
            return NotImplemented
        return self._cells == other._cells

    def __add__(self, other):
        cells = dict(self._cells)
        for mj, c in other._cells.items():
            total = cells.get(mj)
            total = c if total is None else total + c
            if total.is_zero():
                cells.pop(mj, None)
            else:
                cells[mj] = total
        return SeriesTerm(cells)

    def __neg__(self):
        return SeriesTerm({mj: -c for mj, c in self._cells.items()})

    def __sub__(self, other):
        return self + (-other)

    def scale(self, factor) -> "SeriesTerm":
        return SeriesTerm({mj: c.scale(factor) for mj, c in self._cells.items()})

    def scale_ring(self, elem: RingElem) -> "SeriesTerm":
        return SeriesTerm({mj: c * elem for mj, c in self._cells.items()})

    def d_dh(self) -> "SeriesTerm":
        """Derivative with respect to the energy variable."""
        cells: dict[tuple[int, int], RingElem] = {}
        for (m, j), c in self._cells.items():
            if m > 0:
                _cell_add(cells, m - 1, j, c.scale(m))
            _cell_add(cells, m, j + 1, c)
        return SeriesTerm(cells)

    def d_dh_power(self, n: int) -> "SeriesTerm":
        out = self
        for _ in range(n):
            out = out.d_dh()
        return out

    def d_dx(self) -> "SeriesTerm":
        return SeriesTerm({mj: c.ddx() for mj, c in self._cells.items()})

    def mul_h_minus_v(self, potential: RingElem, power: int) -> "SeriesTerm":
        """Multiply by (H - V(x))^power via exact binomial expansion."""
        if power == 0:
            return self
        neg_v_pow = [RingElem.one()]
        for _ in range(power):
            neg_v_pow.append(neg_v_pow[-1] * (-potential))
        cells: dict[tuple[int, int], RingElem] = {}
        for (m, j), c in self._cells.items():
            for i in range(power + 1):
                binom = Fraction(factorial(power),
                                 factorial(i) * factorial(power - i))
                _cell_add(cells, m + i, j, (c * neg_v_pow[power - i]).scale(binom))
        return SeriesTerm(cells)

    def evaluate(self, seed, x, h):
        """Numeric value with a concrete seed; numpy-transparent in x and h."""
        total = 0.0
        for (m, j), c in self.cells():
            total = total + c.evaluate(x) * h**m * seed.f0_deriv(j, h)
        return total

    def to_json(self):
        return [{"m": m, "j": j, "ring": c.to_json()}
                for (m, j), c in self.cells()]

    @classmethod
    def from_json(cls, data) -> "SeriesTerm":
        cells = {}
        for rec in data:
            _cell_add(cells, int(rec["m"]), int(rec["j"]),
                      RingElem.from_json(rec["ring"]))
        return cls(cells)

    def __repr__(self):
        body = ", ".join(f"H^{m}*f0^({j}): {c}" for (m, j), c in self.cells())
        return f"SeriesTerm({body})"


def _cell_add(cells: dict, m: int, j: int, c: RingElem) -> None:
    total = cells.get((m, j))
    total = c if total is None else total + c
    if total.is_zero():
        cells.pop((m, j), None)
    else:
        cells[(m, j)] = total


def recursion_weight(j: int, k: int) -> Fraction:
    """Exact weight 1 / (2^(2k) k! (2j - 2k + 1)!) of the (j, k) source term."""
    return Fraction(1, 2 ** (2 * k) * factorial(k) * factorial(2 * j - 2 * k + 1))


def potential_derivatives(potential: RingElem, up_to: int) -> list[RingElem]:
    """[V, V', ..., V^(up_to)] by repeated exact differentiation."""
    derivs = [potential]
    for _ in range(up_to):
        derivs.append(derivs[-1].ddx())
    return derivs


def recursion_rhs(potential: RingElem, terms, l: int,
                  v_derivs: list[RingElem] | None = None) -> SeriesTerm:
    """Exact x-derivative of the order-l term, from orders 0..l-1.

    Implements the source sum over j = 1..l of
    (-1/2)^j V^(2j+1) sum_k w(j,k) (H-V)^(j-k) d^(2j-k+1)/dH^(2j-k+1) f_{l-j}.
    """
    if l < 1:
        raise ValueError("recursion starts at order 1")
    if len(terms) < l:
        raise ValueError(f"need terms 0..{l - 1} to form the order-{l} source")
    if v_derivs is None:
        v_derivs = potential_derivatives(potential, 2 * l + 1)
    total = SeriesTerm.zero()
    for j in range(1, l + 1):
        odd_deriv = v_derivs[2 * j + 1]
        if odd_deriv.is_zero():
            continue
        lower = terms[l - j]
        dh = [lower]
        for _ in range(2 * j + 1):
            dh.append(dh[-1].d_dh())
        part = SeriesTerm.zero()
        for k in range(j + 1):
            contribution = dh[2 * j - k + 1].mul_h_minus_v(potential, j - k)
            part = part + contribution.scale(recursion_weight(j, k))
        total = total + part.scale_ring(odd_deriv).scale(Fraction(-1, 2) ** j)
    return total


def integrate_term(t: SeriesTerm, convention: str = "paper",
                   x_ref: Fraction = Fraction(0)) -> SeriesTerm:
    """Quadrature in x of a source term, fixing the additive function of H.

    Under "paper" the plain antiderivative is kept; under "uniform" the value
    at x_ref is subtracted cell-wise so the result vanishes there identically.
    """
    if convention not in CONVENTIONS:
        raise ValueError(f"unknown convention {convention!r}")
    cells: dict[tuple[int, int], RingElem] = {}
    for (m, j), c in t.cells():
        anti = c.integrate()
        if convention == "uniform":
            at_ref = anti.eval_exact(x_ref)
            if not at_ref.is_zero():
                anti = anti - RingElem.constant(at_ref)
        if not anti.is_zero():
            cells[(m, j)] = anti
    return SeriesTerm(cells)


def closed_form_f1(potential: RingElem) -> SeriesTerm:
    """First correction in closed form (additive function of H set to zero):

    f1 = -(1/2) V'' [ (H - V)/6 * f0^(3) + 1/4 * f0^(2) ] - (1/24) (V')^2 f0^(3)
    """
    v1 = potential.ddx()
    v2 = v1.ddx()
    d3 = SeriesTerm({(0, 3): RingElem.one()})
    d2 = SeriesTerm({(0, 2): RingElem.one()})
    bracket = d3.mul_h_minus_v(potential, 1).scale(Fraction(1, 6)) \
        + d2.scale(Fraction(1, 4))
    return bracket.scale_ring(v2).scale(Fraction(-1, 2)) \
        + SeriesTerm({(0, 3): v1 * v1}).scale(Fraction(-1, 24))


@dataclass(frozen=True)
class WignerSeries:
    """Seed-independent expansion terms for one potential and convention."""

    potential: RingElem
    order: int
    convention: str
    x_ref: Fraction
    terms: tuple[SeriesTerm, ...]

    def max_deriv_order(self) -> int:
        return max(t.max_deriv_order() for t in self.terms)

    def term_count(self) -> int:
        return sum(t.term_count() for t in self.terms)

    def to_json_dict(self) -> dict:
        return {
            "potential": str(self.potential),
            "order": self.order,
            "convention": self.convention,
            "x_ref": str(self.x_ref),
            "terms": [t.to_json() for t in self.terms],
        }

    def to_json(self, **kwargs) -> str:
        return json.dumps(self.to_json_dict(), **kwargs)

    @classmethod
    def from_json_dict(cls, data) -> "WignerSeries":
        terms = tuple(SeriesTerm.from_json(t) for t in data["terms"])
        return cls(
            potential=parse_potential(data["potential"]),
            order=int(data["order"]),
            convention=data["convention"],
            x_ref=Fraction(data["x_ref"]),
            terms=terms,
        )

    @classmethod
    def from_json(cls, text: str) -> "WignerSeries":
        return cls.from_json_dict(json.loads(text))


def build_series(potential: RingElem, order: int, convention: str = "paper",
                 x_ref: Fraction = Fraction(0),
                 term_budget: int = 10**6) -> WignerSeries:
    """Build expansion terms f_0..f_order for a potential.

    The zeroth term is the abstract seed.  Under "paper" the first correction
    uses the closed form and higher orders integrate the recursion source
    as-is; under "uniform" every correction is integrated and pinned to
    vanish at x_ref.  Deterministic and seed-independent.
    """
    if order < 0:
        raise ValueError("order must be nonnegative")
    if convention not in CONVENTIONS:
        raise ValueError(f"unknown convention {convention!r}")
    x_ref = Fraction(x_ref)
    v_derivs = potential_derivatives(potential, 2 * order + 1)
    terms = [SeriesTerm.unit()]
    count = terms[0].term_count()
    for l in range(1, order + 1):
        if convention == "paper" and l == 1:
            f_l = closed_form_f1(potential)
        else:
            source = recursion_rhs(potential, terms, l, v_derivs)
            f_l = integrate_term(source, convention, x_ref)
        if f_l.max_deriv_order() > 3 * l:
            raise AssertionError(
                f"order-{l} term has derivative order {f_l.max_deriv_order()} > {3 * l}")
        count += f_l.term_count()
        if count > term_budget:
            raise TermBudgetError(
                f"series exceeded {term_budget} monomials at order {l}")
        terms.append(f_l)
    return WignerSeries(potential=potential, order=order, convention=convention,
                        x_ref=x_ref, terms=tuple(terms))
