"""Products of mode fields in ordinary and exponential coordinates.

A field here is the generating series of a mode family acting on a vacuum
module, a(x) = sum_m a_m x^(-m-offset).  This module builds two bilinear
products on such fields:

* the residue products a(x)_n b(x), defined by the classical two-sided
  residue formula, and
* the substitution products a(x)_n^e b(x), defined through the change of
  coordinate x1 -> x e^z against a polynomial multiplier p(x1, x) that
  tames the pair's commutator.

Both products are represented extrinsically: a product is an operator
series whose coefficients are computed on demand, each one a finite sum
of compositions of the factor fields.  The finiteness rests on splitting
the auxiliary variable x1 by sign: nonnegative powers are summed with the
right factor applied first, negative powers with the left factor applied
first plus a scalar correction read off the pair's central commutator.

The commutator data itself is carried by a small catalog of closed-form
shapes (delta families and one-sided ratio kernels), verified against the
module action by the identity checks at the bottom of the file.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field as _dcfield
from fractions import Fraction
from math import comb, factorial

from .fock import (
    FieldSlot,
    FockModule,
    FockVector,
    apply_generator,
    pair_vectors,
    annihilation_bound,
    two_point,
)
from .kernels import Factor, exp_pole_kernel, iota_expand, kernel_inv
from .liealg import (
    GeneratorSymbol,
    _directed_binom_power,
    bhatq_commutator_table,
    get_algebra,
    standard_pairing,
)
from .report import FAIL, INCONCLUSIVE, PASS, CheckReport, combine
from .scalar import L, ONE, Q, ZERO, RationalPoint, Scalar
from .series import Cert, TruncatedLaurent, Window, delta_family, \
    series_inverse

__all__ = [
    "VertexError",
    "UnsupportedPairError",
    "MultiplierError",
    "OperatorSeries",
    "GeneratorField",
    "IdentityField",
    "PolyDressedField",
    "DerivativeField",
    "ArgScaledField",
    "SumField",
    "field_of",
    "identity_field",
    "PairPart",
    "PairData",
    "pair_of",
    "Multiplier",
    "ProductExpression",
    "eproduct_n",
    "phi_product_n",
    "psi_map",
    "SpecialBracketForm",
    "SKernel",
    "translate",
    "extract_s_kernel",
    "LawId",
    "LAWS",
    "verify_identity",
    "suite_reports",
]


class VertexError(ValueError):
    pass


class UnsupportedPairError(VertexError):
    """No commutator data is cataloged for the requested pair of fields."""


class MultiplierError(VertexError):
    """The multiplier does not tame the pair's commutator."""


_X12 = ("x1", "x2")


def _frac(a: int, b: int = 1) -> Scalar:
    return Scalar.from_fraction(Fraction(a, b))


_ZPOW_CACHE: dict[tuple[int, int], Scalar] = {}


def _zpow(base: int, j: int) -> Scalar:
    """base**j / j! as an exact scalar; 0**0 counts as 1."""
    key = (base, j)
    out = _ZPOW_CACHE.get(key)
    if out is None:
        out = _ZPOW_CACHE[key] = _frac(base ** j, factorial(j))
    return out


def _falling_binom(n: int, j: int) -> Scalar:
    num = 1
    for t in range(j):
        num *= n - t
    return _frac(num, factorial(j))


# ---------------------------------------------------------------------------
# fields


class OperatorSeries:
    """A formal series of operators on one vacuum module.

    Coefficient e is the operator attached to x^e; mode n is the
    coefficient of x^(-n-offset).  Subclasses implement ``apply_coeff``
    and a support bound ``low_exponent``: coefficients below it act as
    zero on the given vector.
    """

    module: FockModule
    offset: int

    def apply_coeff(self, e: int, v: FockVector) -> FockVector:
        raise NotImplementedError

    def apply_mode(self, n: int, v: FockVector) -> FockVector:
        return self.apply_coeff(-n - self.offset, v)

    def low_exponent(self, v: FockVector) -> int:
        raise NotImplementedError

    def key(self):
        """Hashable identity used by the product caches."""
        raise NotImplementedError


def _module_key(m: FockModule):
    return (m.algebra, m.level, m.zero_mode)


def _state_key(v: FockVector):
    return (_module_key(v.module),
            tuple(sorted(v.terms.items(), key=lambda kv: kv[0])))


class GeneratorField(OperatorSeries):
    """The generating series of one mode family.

    For the shifted algebras the family index rides on the generators and
    the exponent convention is x^(-m-1).  For the unshifted ones the index
    scales the argument instead: coefficient e carries a factor q^(shift*e),
    which is the expansion of a(q^shift x) in powers of x.
    """

    __slots__ = ("module", "offset", "shift", "_scaled")

    def __init__(self, module: FockModule, shift: int = 0):
        spec = module.spec
        self.module = module
        self.shift = shift
        self._scaled = not spec.shifted
        self.offset = 0 if self._scaled else 1

    def apply_mode(self, n: int, v: FockVector) -> FockVector:
        if self._scaled:
            out = apply_generator(GeneratorSymbol(self.module.algebra, n), v)
            if self.shift:
                out = out.scale(Scalar.q_power(-self.shift * n))
            return out
        return apply_generator(
            GeneratorSymbol(self.module.algebra, n, self.shift), v)

    def apply_coeff(self, e: int, v: FockVector) -> FockVector:
        return self.apply_mode(-e - self.offset, v)

    def low_exponent(self, v: FockVector) -> int:
        return 1 - self.offset - annihilation_bound(v)

    def key(self):
        return ("gen", _module_key(self.module), self.shift)

    def __repr__(self):
        return f"GeneratorField({self.module.algebra}, shift={self.shift})"


class IdentityField(OperatorSeries):
    """The constant field: coefficient 0 is the identity, all others zero."""

    __slots__ = ("module", "offset")

    def __init__(self, module: FockModule):
        self.module = module
        self.offset = 1

    def apply_coeff(self, e: int, v: FockVector) -> FockVector:
        return v if e == 0 else self.module.zero()

    def low_exponent(self, v: FockVector) -> int:
        return 0

    def key(self):
        return ("one", _module_key(self.module))

    def __repr__(self):
        return f"IdentityField({self.module.algebra})"


class PolyDressedField(OperatorSeries):
    """A field with every coefficient rescaled by a polynomial in e.

    ``weights`` maps powers t to scalars; coefficient e of the base field
    is multiplied by sum_t weights[t] * e^t.  Applying the base field at
    the substituted argument x e^z and reading off a z power produces
    exactly this shape, which is how vacuum products of a field arise.
    """

    __slots__ = ("module", "offset", "base", "weights")

    def __init__(self, base: OperatorSeries, weights: dict[int, Scalar]):
        self.module = base.module
        self.offset = base.offset
        self.base = base
        self.weights = tuple(sorted(
            (t, c) for t, c in weights.items() if c))

    def weight_at(self, e: int) -> Scalar:
        out = ZERO
        for t, c in self.weights:
            out = out + c * _frac(e ** t)
        return out

    def degree(self) -> int:
        return max((t for t, _c in self.weights), default=0)

    def apply_coeff(self, e: int, v: FockVector) -> FockVector:
        w = self.weight_at(e)
        if not w:
            return self.module.zero()
        return self.base.apply_coeff(e, v).scale(w)

    def low_exponent(self, v: FockVector) -> int:
        return self.base.low_exponent(v)

    def key(self):
        return ("dress", self.base.key(), self.weights)

    def __repr__(self):
        return f"PolyDressedField({self.base!r}, {dict(self.weights)})"


class DerivativeField(OperatorSeries):
    """d/dx of a field: coefficient e becomes (e+1) times coefficient e+1."""

    __slots__ = ("module", "offset", "base")

    def __init__(self, base: OperatorSeries):
        self.module = base.module
        self.offset = base.offset + 1
        self.base = base

    def apply_coeff(self, e: int, v: FockVector) -> FockVector:
        return self.base.apply_coeff(e + 1, v).scale(_frac(e + 1))

    def low_exponent(self, v: FockVector) -> int:
        return self.base.low_exponent(v) - 1

    def key(self):
        return ("ddx", self.base.key())


class ArgScaledField(OperatorSeries):
    """A field evaluated at c*x: coefficient e picks up a factor c^e."""

    __slots__ = ("module", "offset", "base", "c")

    def __init__(self, base: OperatorSeries, c: Scalar):
        self.module = base.module
        self.offset = base.offset
        self.base = base
        self.c = c

    def apply_coeff(self, e: int, v: FockVector) -> FockVector:
        return self.base.apply_coeff(e, v).scale(self.c ** e)

    def low_exponent(self, v: FockVector) -> int:
        return self.base.low_exponent(v)

    def key(self):
        return ("argscale", self.base.key(), self.c)


class SumField(OperatorSeries):
    """A finite linear combination of fields on one module."""

    __slots__ = ("module", "offset", "terms")

    def __init__(self, module: FockModule,
                 terms: list[tuple[Scalar, OperatorSeries]]):
        self.module = module
        self.offset = terms[0][1].offset if terms else 1
        self.terms = tuple((c, f) for c, f in terms if c)

    def apply_coeff(self, e: int, v: FockVector) -> FockVector:
        out = self.module.zero()
        for c, f in self.terms:
            out = out + f.apply_coeff(e, v).scale(c)
        return out

    def low_exponent(self, v: FockVector) -> int:
        return min((f.low_exponent(v) for _c, f in self.terms), default=0)

    def key(self):
        return ("sum",) + tuple((c, f.key()) for c, f in self.terms)


def field_of(module: FockModule, shift: int = 0) -> GeneratorField:
    """The generating field of the module's mode family at one index."""
    return GeneratorField(module, shift)


def identity_field(module: FockModule) -> IdentityField:
    return IdentityField(module)


# ---------------------------------------------------------------------------
# commutator catalog
#
# [a(x1), b(x2)] for a cataloged pair is a central scalar distribution,
# decomposed into named parts.  Delta-supported parts are annihilated by a
# suitable binomial power; one-sided kernel parts have a fixed x1 floor.


@dataclass(frozen=True)
class PairPart:
    kind: str          # plain | euler | dshift | bplain | iratio | iratio_op | ftail
    coeff: Scalar
    c: Scalar = ONE
    d: int = 0

    @property
    def is_delta(self) -> bool:
        return self.kind in ("plain", "euler", "dshift", "bplain")


# multiplicity of (x1 - c x2) needed to kill an undressed delta part
_DELTA_KILL = {"plain": 1, "euler": 2, "dshift": 2, "bplain": 1}
# polynomial degree along the support line of an undressed part
_PART_DEGREE = {"plain": 0, "euler": 1, "dshift": 1, "bplain": 0}
# structural lower bound on x1 exponents of a kernel part
_KERNEL_FLOOR = {"iratio": 1, "iratio_op": None, "ftail": 0}


def _part_table(part: PairPart, w: Window) -> TruncatedLaurent:
    """One part of a commutator on a two-variable window (x1, x2)."""
    kind, c = part.kind, part.c
    if kind in ("plain", "euler", "dshift"):
        t = delta_family(kind, c, w)
    elif kind == "bplain":
        # x1^-1 delta(c x2/x1): entries c^k at (-k-1, k)
        lo1, lo2 = w.lo
        hi1, hi2 = w.hi
        coeffs = {}
        for k in range(max(lo2, -hi1 - 1), min(hi2, -lo1 - 1) + 1):
            coeffs[(-k - 1, k)] = c ** k
        t = TruncatedLaurent.polynomial(w.vars, coeffs).restrict(w)
    elif kind == "iratio":
        # expansion of c*(x1/x2)/(1 - c*x1/x2)^2 in powers of x1/x2
        lo1, lo2 = w.lo
        hi1, hi2 = w.hi
        coeffs = {}
        for k in range(max(1, lo1, -hi2), min(hi1, -lo2) + 1):
            coeffs[(k, -k)] = (c ** k) * _frac(k)
        t = TruncatedLaurent.polynomial(w.vars, coeffs).restrict(w)
    elif kind == "iratio_op":
        # same rational shape expanded the other way, in powers of x2/x1
        lo1, lo2 = w.lo
        hi1, hi2 = w.hi
        coeffs = {}
        for k in range(max(1, lo2, -hi1), min(hi2, -lo1) + 1):
            coeffs[(-k, k)] = (c ** k) * _frac(k)
        t = TruncatedLaurent.polynomial(w.vars, coeffs).restrict(w)
    elif kind == "ftail":
        dd = (1 if part.d == 0 else 0) - (1 if part.d == 1 else 0)
        t = bhatq_commutator_table(part.d, w)
        if dd:
            t = t - delta_family("dshift", ONE, w).scale(_frac(dd))
    else:
        raise VertexError(f"unknown commutator part kind {kind!r}")
    return t if part.coeff == ONE else t.scale(part.coeff)


@dataclass(frozen=True)
class PairData:
    """The central commutator of an ordered pair of cataloged fields.

    ``parts`` describe the undressed bracket; the weight polynomials (in
    the x1 and x2 exponents) account for dressed factors, which rescale
    the table entrywise.
    """

    parts: tuple[PairPart, ...]
    left_weight: tuple[tuple[int, Scalar], ...] = ()
    right_weight: tuple[tuple[int, Scalar], ...] = ()

    def _weight(self, weights, e: int) -> Scalar:
        if not weights:
            return ONE
        out = ZERO
        for t, c in weights:
            out = out + c * _frac(e ** t)
        return out

    def dress_degree(self) -> int:
        dl = max((t for t, _c in self.left_weight), default=0)
        dr = max((t for t, _c in self.right_weight), default=0)
        return dl + dr

    def table(self, w: Window) -> TruncatedLaurent:
        acc = TruncatedLaurent.zero(w.vars).restrict(w)
        for p in self.parts:
            acc = acc + _part_table(p, w)
        if self.left_weight or self.right_weight:
            coeffs = {
                e: self._weight(self.left_weight, e[0])
                * self._weight(self.right_weight, e[1]) * acc.coeff(e, ZERO)
                for e in acc.support()
            }
            acc = TruncatedLaurent.polynomial(w.vars, coeffs).restrict(w)
        return acc

    def delta_parts(self) -> list[PairPart]:
        return [p for p in self.parts if p.is_delta]

    def kernel_floor(self) -> int | None:
        floors = []
        for p in self.parts:
            if not p.is_delta:
                f = _KERNEL_FLOOR[p.kind]
                if f is None:
                    raise VertexError(
                        f"part {p.kind} has no x1 floor; the pair cannot "
                        "be used in substitution products")
                floors.append(f)
        return min(floors) if floors else None


def _base_pair(a: GeneratorField, b: GeneratorField) -> tuple[PairPart, ...]:
    mod = a.module
    if mod != b.module:
        raise UnsupportedPairError("fields act on different modules")
    alg = mod.algebra
    lvl = mod.level
    r, s = a.shift, b.shift
    if alg == "hq":
        inv = ONE / (Q - Scalar.q_power(-1))
        return (PairPart("plain", lvl * inv, Scalar.q_power(s - r + 1)),
                PairPart("plain", -(lvl * inv), Scalar.q_power(s - r - 1)))
    if alg == "htq":
        return (PairPart("iratio", lvl, Scalar.q_power(r - s + 1)),
                PairPart("iratio", -lvl, Scalar.q_power(r - s - 1)),
                PairPart("euler", lvl, Scalar.q_power(s - r)),
                PairPart("euler", -lvl, Scalar.q_power(s - r + 1)))
    if alg == "bhat":
        pairing = standard_pairing(r, s)
        if not pairing:
            return ()
        return (PairPart("bplain", lvl * pairing, ONE),)
    if alg == "bhatq":
        dd = (1 if r == s else 0) - (1 if r == s + 1 else 0)
        parts = [PairPart("ftail", lvl, ONE, d=r - s)]
        if dd:
            parts.insert(0, PairPart("dshift", lvl * _frac(dd), ONE))
        return tuple(parts)
    raise UnsupportedPairError(f"no commutator catalog for algebra {alg!r}")


def pair_of(a: OperatorSeries, b: OperatorSeries) -> PairData:
    """Commutator data for [a(x1), b(x2)], or UnsupportedPairError."""
    lw: tuple = ()
    rw: tuple = ()
    if isinstance(a, PolyDressedField):
        lw, a = a.weights, a.base
    if isinstance(b, PolyDressedField):
        rw, b = b.weights, b.base
    if isinstance(a, IdentityField) or isinstance(b, IdentityField):
        return PairData(())
    if isinstance(a, GeneratorField) and isinstance(b, GeneratorField):
        return PairData(_base_pair(a, b), lw, rw)
    raise UnsupportedPairError(
        f"no commutator data for {type(a).__name__} x {type(b).__name__}")


# ---------------------------------------------------------------------------
# multipliers


@dataclass(frozen=True)
class Multiplier:
    """A homogeneous polynomial unit * prod_i (x1 - c_i x2)^(m_i).

    Homogeneity is what makes the substituted polynomial p(x e^z, x) a
    monomial in x times an invertible-up-to-z^kappa series in z, with
    kappa the multiplicity of the factor at c = 1.
    """

    factors: tuple[tuple[Scalar, int], ...]
    unit: Scalar = ONE

    @classmethod
    def of(cls, *factors: tuple[Scalar, int], unit: Scalar = ONE
           ) -> "Multiplier":
        merged: dict[Scalar, int] = {}
        for c, m in factors:
            if m < 0:
                raise MultiplierError("factor multiplicities must be >= 0")
            merged[c] = merged.get(c, 0) + m
        ordered = tuple(sorted(
            ((c, m) for c, m in merged.items() if m), key=lambda t: str(t[0])))
        if not unit:
            raise MultiplierError("the unit must be nonzero")
        return cls(ordered, unit)

    @property
    def degree(self) -> int:
        return sum(m for _c, m in self.factors)

    @property
    def kappa(self) -> int:
        return sum(m for c, m in self.factors if c == ONE)

    def poly2(self) -> dict[tuple[int, int], Scalar]:
        """Expanded monomials {(x1 exp, x2 exp): coefficient}."""
        acc = {(0, 0): self.unit}
        for c, m in self.factors:
            for _ in range(m):
                nxt: dict[tuple[int, int], Scalar] = {}
                for (i, j), v in acc.items():
                    nxt[(i + 1, j)] = nxt.get((i + 1, j), ZERO) + v
                    nxt[(i, j + 1)] = nxt.get((i, j + 1), ZERO) - v * c
                acc = nxt
        return {e: v for e, v in acc.items() if v}

    def as_table(self, vars=_X12) -> TruncatedLaurent:
        return TruncatedLaurent.polynomial(
            vars, {e: v for e, v in self.poly2().items()})

    @classmethod
    def canonical_for(cls, pair: PairData) -> "Multiplier":
        """The smallest catalog multiplier that kills the delta parts."""
        extra = pair.dress_degree()
        need: dict[Scalar, int] = {}
        for p in pair.delta_parts():
            m = _DELTA_KILL[p.kind] + extra
            need[p.c] = max(need.get(p.c, 0), m)
        return cls.of(*need.items())

    def exp_series(self, order: int) -> list[Scalar]:
        """Coefficients of p(x e^z, x) / x^degree through z^order."""
        t = _one_z(order)
        for c, m in self.factors:
            f = _expz_minus(c, order)
            for _ in range(m):
                t = t * f
        if self.unit != ONE:
            t = t.scale(self.unit)
        return [t.coeff((j,), ZERO) for j in range(order + 1)]

    def inverse_exp(self, zmax: int) -> dict[int, Scalar]:
        """Coefficients of x^degree / p(x e^z, x) for z powers up to zmax.

        The result starts at z^-kappa; the monomial x^-degree is left to
        the caller.
        """
        k = self.kappa
        order = zmax + k
        t = _one_z(order)
        for c, m in self.factors:
            f = _reduced_exp_factor(c, order)
            for _ in range(m):
                t = t * f
        inv = series_inverse(t, order)
        u = ONE / self.unit
        return {j - k: inv.coeff((j,), ZERO) * u for j in range(order + 1)}

    def describe(self) -> str:
        parts = [] if self.unit.is_one() else [f"({self.unit})"]
        for c, m in self.factors:
            f = f"(x1 - ({c}) x2)"
            parts.append(f + (f"^{m}" if m > 1 else ""))
        return "*".join(parts) or "1"


def _zseries(coeffs: dict[int, Scalar], hi: int) -> TruncatedLaurent:
    """A z power series exactly known through z^hi and zero below z^0.

    The support bound in the certificate is what lets these be multiplied
    and inverted, unlike a plain windowed restriction.
    """
    cert = Cert.box((0,), (hi,), suplo=(0,))
    data = {(e,): c for e, c in coeffs.items() if c}
    return TruncatedLaurent(("z",), data, cert, None, _trusted=True)


def _one_z(order: int) -> TruncatedLaurent:
    return _zseries({0: ONE}, order)


def _expz_minus(c: Scalar, order: int) -> TruncatedLaurent:
    """e^z - c as a truncated series."""
    coeffs = {j: _frac(1, factorial(j)) for j in range(1, order + 1)}
    coeffs[0] = ONE - c
    return _zseries(coeffs, order)


def _reduced_exp_factor(c: Scalar, order: int) -> TruncatedLaurent:
    """(e^z - c), divided by z when c = 1 so the constant term survives."""
    if c == ONE:
        return _zseries(
            {j: _frac(1, factorial(j + 1)) for j in range(order + 1)}, order)
    return _expz_minus(c, order)


_SUFFICIENT_CACHE: dict[tuple, bool] = {}


def check_multiplier(mult: Multiplier, pair: PairData) -> None:
    """Raise MultiplierError unless mult kills every delta part of the pair.

    Each delta part, dressed or not, is a geometric pattern times a
    polynomial along its support lines, so vanishing of the product on a
    probe window wide enough for the combined degree certifies vanishing
    everywhere.
    """
    key = (mult, pair)
    ok = _SUFFICIENT_CACHE.get(key)
    if ok is None:
        ok = True
        extra = pair.dress_degree()
        ptab = mult.as_table()
        for part in pair.delta_parts():
            radius = mult.degree + _PART_DEGREE[part.kind] + extra + 3
            w = Window.cube(_X12, radius)
            base = _part_table(part, w)
            dressed = PairData((), pair.left_weight, pair.right_weight)
            if pair.left_weight or pair.right_weight:
                coeffs = {
                    e: dressed._weight(pair.left_weight, e[0])
                    * dressed._weight(pair.right_weight, e[1])
                    * base.coeff(e, ZERO)
                    for e in base.support()
                }
                base = TruncatedLaurent.polynomial(w.vars, coeffs).restrict(w)
            prod = ptab * base
            inner = Window.cube(_X12, radius - mult.degree)
            if not prod.is_zero_on(inner):
                ok = False
                break
        _SUFFICIENT_CACHE[key] = ok
    if not ok:
        raise MultiplierError(
            f"multiplier {mult.describe()} does not kill the delta parts "
            "of the commutator")


# ---------------------------------------------------------------------------
# state tables and the ordered-product engine


class StateTable:
    """Module vectors indexed by an x exponent and an auxiliary order."""

    __slots__ = ("module", "xlo", "xhi", "zlo", "zhi", "data")

    def __init__(self, module: FockModule, xlo: int, xhi: int,
                 zlo: int, zhi: int):
        self.module = module
        self.xlo, self.xhi = xlo, xhi
        self.zlo, self.zhi = zlo, zhi
        self.data: dict[tuple[int, int], FockVector] = {}

    def in_range(self, e: int, j: int) -> bool:
        return self.xlo <= e <= self.xhi and self.zlo <= j <= self.zhi

    def get(self, e: int, j: int) -> FockVector:
        return self.data.get((e, j), self.module.zero())

    def add(self, e: int, j: int, vec: FockVector) -> None:
        if vec.is_zero() or not self.in_range(e, j):
            return
        cur = self.data.get((e, j))
        out = vec if cur is None else cur + vec
        if out.is_zero():
            self.data.pop((e, j), None)
        else:
            self.data[(e, j)] = out

    def entries(self):
        return sorted(self.data.items())


def ordered_core(afield: OperatorSeries, bfield: OperatorSeries,
                 mult: Multiplier, pair: PairData, v: FockVector,
                 xlo: int, xhi: int, zcap: int) -> StateTable:
    """Coefficients of (p(x1, x) a(x1) b(x) v) under x1 -> x e^z.

    Entry (E, J) is the x^E z^J coefficient.  Nonnegative x1 powers are
    summed in the written order (b first); negative ones are reordered
    through the central commutator, whose p-corrected table has an x1
    floor.  Both halves then terminate on the annihilation bounds of the
    factors, making every entry a finite sum.
    """
    check_multiplier(mult, pair)
    module = afield.module
    pmons = sorted(mult.poly2().items())
    min_i = min(i for (i, _j), _c in pmons)
    min_j = min(j for (_i, j), _c in pmons)
    low_a = afield.low_exponent(v)
    low_b = bfield.low_exponent(v)

    # substituted-exponent accumulator: (E, x1 exponent) -> vector
    acc: dict[tuple[int, int], FockVector] = {}

    def bump(key, vec):
        if vec.is_zero():
            return
        cur = acc.get(key)
        acc[key] = vec if cur is None else cur + vec

    # x1^k with k >= 0: p_ij * a_(k-i) (b_(e2) v) lands at E = k + j + e2
    amemo: dict[tuple[int, int], FockVector] = {}
    for e2 in range(low_b, xhi - min_j + 1):
        bv = bfield.apply_coeff(e2, v)
        if bv.is_zero():
            continue
        for (i, j), c in pmons:
            khi = xhi - j - e2
            klo = max(0, xlo - j - e2)
            for k in range(klo, khi + 1):
                u = amemo.get((k - i, e2))
                if u is None:
                    u = amemo[(k - i, e2)] = afield.apply_coeff(k - i, bv)
                if u.is_zero():
                    continue
                bump((k + j + e2, k), u.scale(c))

    # x1^(-k-1): p_ij * b_(e2) (a_(-k-1-i) v) at E = -k-1 + j + e2,
    # plus the scalar correction from the commutator table
    avmemo: dict[int, FockVector] = {}
    bmemo: dict[tuple[int, int], FockVector] = {}
    kop_hi = -1 - min_i - low_a
    for k in range(0, kop_hi + 1):
        for (i, j), c in pmons:
            e1 = -k - 1 - i
            if e1 < low_a:
                continue
            av = avmemo.get(e1)
            if av is None:
                av = avmemo[e1] = afield.apply_coeff(e1, v)
            if av.is_zero():
                continue
            for E in range(xlo, xhi + 1):
                e2 = E + k + 1 - j
                w2 = bmemo.get((e1, e2))
                if w2 is None:
                    w2 = bmemo[(e1, e2)] = bfield.apply_coeff(e2, av)
                if w2.is_zero():
                    continue
                bump((E, -k - 1), w2.scale(c))

    kf = pair.kernel_floor()
    if kf is not None:
        pk_floor = kf + min_i
        if pk_floor <= -1:
            kker_hi = -1 - pk_floor
            max_i = max(i for (i, _j), _c in pmons)
            max_j = max(j for (_i, j), _c in pmons)
            kw = Window(
                _X12,
                (pk_floor - max_i, xlo + 1 - max_j),
                (-1 - min_i, xhi + kker_hi + 1 - min_j),
            )
            ktab = pair.table(kw)
            for k in range(0, kker_hi + 1):
                for E in range(xlo, xhi + 1):
                    val = ZERO
                    for (i, j), c in pmons:
                        val = val + c * ktab.coeff(
                            (-k - 1 - i, E + k + 1 - j), ZERO)
                    if val:
                        bump((E, -k - 1), v.scale(val))

    out = StateTable(module, xlo, xhi, 0, zcap)
    for (E, kbase), vec in acc.items():
        for J in range(zcap + 1):
            s = _zpow(kbase, J)
            if s:
                out.add(E, J, vec.scale(s))
    return out


_STACK_CACHE: dict[tuple, StateTable] = {}


def _product_stack(afield: OperatorSeries, bfield: OperatorSeries,
                   mult: Multiplier, pair: PairData, v: FockVector,
                   xlo: int, xhi: int, zneed: int) -> StateTable:
    """All substitution products at once, applied to one vector.

    Entry (E, t) is the x^E coefficient of z^t in
    iota(1/p(x e^z, x)) * (p a(x1) b(x) v)|_{x1 = x e^z};
    the product at index n sits at t = -n-1, so z exponents run from
    -kappa up to zneed.
    """
    key = (afield.key(), bfield.key(), mult, pair, _state_key(v),
           xlo, xhi, zneed)
    hit = _STACK_CACHE.get(key)
    if hit is not None:
        return hit
    kappa = mult.kappa
    deg = mult.degree
    zcap = zneed + kappa
    core = ordered_core(afield, bfield, mult, pair, v,
                        xlo + deg, xhi + deg, zcap)
    u = mult.inverse_exp(zcap)
    out = StateTable(afield.module, xlo, xhi, -kappa, zneed)
    for (E, J), vec in core.entries():
        for jz, c in u.items():
            if c and -kappa <= J + jz <= zneed:
                out.add(E - deg, J + jz, vec.scale(c))
    _STACK_CACHE[key] = out
    return out


# ---------------------------------------------------------------------------
# product expressions


class ProductExpression(OperatorSeries):
    """The n-th product of two fields, with on-demand coefficients.

    ``kind`` is "res" for the residue product and "exp" for the
    substitution product.  Coefficients are computed through the ordered
    engine and cached per applied vector.
    """

    __slots__ = ("module", "offset", "kind", "left", "right", "n",
                 "mult", "pair", "_memo")

    def __init__(self, kind: str, left: OperatorSeries,
                 right: OperatorSeries, n: int,
                 mult: Multiplier | None = None,
                 pair: PairData | None = None):
        if left.module != right.module:
            raise VertexError("product factors act on different modules")
        self.module = left.module
        self.offset = 1
        self.kind = kind
        self.left = left
        self.right = right
        self.n = n
        self.mult = mult
        self.pair = pair
        self._memo: dict[tuple, FockVector] = {}

    def key(self):
        return ("prod", self.kind, self.left.key(), self.right.key(),
                self.n, self.mult)

    def low_exponent(self, v: FockVector) -> int:
        raise VertexError("products do not expose a support bound; "
                          "apply their coefficients directly")

    def apply_coeff(self, e: int, v: FockVector) -> FockVector:
        mk = (e, _state_key(v))
        hit = self._memo.get(mk)
        if hit is None:
            if self.kind == "exp":
                hit = self._exp_coeff(e, v)
            else:
                hit = self._res_coeff(e, v)
            self._memo[mk] = hit
        return hit

    def _exp_coeff(self, e: int, v: FockVector) -> FockVector:
        zneed = max(0, -self.n - 1)
        stack = _product_stack(self.left, self.right, self.mult, self.pair,
                               v, e, e, zneed)
        return stack.get(e, -self.n - 1)

    def _res_coeff(self, E: int, v: FockVector) -> FockVector:
        a, b, n = self.left, self.right, self.n
        out = self.module.zero()
        # (x1 - x)^n a(x1) b(x) v, x1 residue
        for j in range(0, E - b.low_exponent(v) + 1):
            c = _falling_binom(n, j) * _frac((-1) ** (j % 2))
            if not c:
                continue
            bv = b.apply_coeff(E - j, v)
            if bv.is_zero():
                continue
            out = out + a.apply_coeff(j - n - 1, bv).scale(c)
        # minus (-x + x1)^n b(x) a(x1) v
        for j in range(0, -1 - a.low_exponent(v) + 1):
            c = _falling_binom(n, j) * _frac((-1) ** ((n - j) % 2))
            if not c:
                continue
            av = a.apply_coeff(-1 - j, v)
            if av.is_zero():
                continue
            out = out - b.apply_coeff(E - n + j, av).scale(c)
        return out


def eproduct_n(a: OperatorSeries, b: OperatorSeries, n: int
               ) -> ProductExpression:
    """The residue n-th product a(x)_n b(x)."""
    return ProductExpression("res", a, b, n)


def phi_product_n(a: OperatorSeries, b: OperatorSeries, n: int,
                  mult: Multiplier | None = None) -> ProductExpression:
    """The substitution n-th product along x1 -> x e^z.

    The multiplier defaults to the smallest catalog choice for the pair;
    any other homogeneous multiplier that kills the commutator's delta
    parts yields the same product.
    """
    pair = pair_of(a, b)
    if mult is None:
        mult = Multiplier.canonical_for(pair)
    check_multiplier(mult, pair)
    return ProductExpression("exp", a, b, n, mult, pair)


def vacuum_product_field(base: OperatorSeries, n: int) -> OperatorSeries:
    """base(x)_n^e applied to the constant field, in closed form.

    Substituting x e^z into the base field and reading z^(-n-1) rescales
    coefficient e by e^j/j! with j = -n-1; for n >= 0 the product is zero.
    """
    if n >= 0:
        return SumField(base.module, [])
    j = -n - 1
    return PolyDressedField(base, {j: _frac(1, factorial(j))})


# ---------------------------------------------------------------------------
# realization of vacuum-module vectors as fields


_PSI_TARGET = {"bhat": "hq", "bhatq": "htq"}


def psi_map(v: FockVector, target: FockModule | None = None) -> OperatorSeries:
    """Realize a shifted-algebra vacuum vector as a field on a mode module.

    The family index r goes to the generating field at argument scale q^r,
    and each module generator acts through the substitution product at its
    mode.  Words of length at least three would need commutator data for
    product fields, which the catalog does not carry.
    """
    alg = v.module.algebra
    if alg not in _PSI_TARGET:
        raise UnsupportedPairError(
            f"no field realization is cataloged for algebra {alg!r}")
    if target is None:
        target = FockModule(_PSI_TARGET[alg], level=v.module.level)
    terms: list[tuple[Scalar, OperatorSeries]] = []
    for mono, coeff in sorted(v.terms.items()):
        if len(mono) > 2:
            raise UnsupportedPairError(
                "field realizations of words longer than two generators "
                "would need commutator data for product fields")
        if not mono:
            f: OperatorSeries = IdentityField(target)
        elif len(mono) == 1:
            (m, r), = mono
            f = vacuum_product_field(field_of(target, r), m)
        else:
            (m1, r1), (m2, r2) = mono
            inner = vacuum_product_field(field_of(target, r2), m2)
            f = phi_product_n(field_of(target, r1), inner, m1)
        terms.append((coeff, f))
    return SumField(target, terms)


# ---------------------------------------------------------------------------
# the special bracket shape and its substitution image


@dataclass(frozen=True)
class SpecialBracketForm:
    """A bracket made of ratio kernels plus euler deltas.

    ``ratio_parts`` holds (c, coeff) for coeff * cu/(1-cu)^2 with
    u = x1/x2, expanded in powers of u; ``euler_parts`` holds (c, coeff)
    for coeff * (x2 d/dx2) delta(c x2/x1).  Under the substitution
    products only the euler part at c = 1 survives, as a derivative
    delta; the kernels reappear evaluated at e^(x1-x2).
    """

    ratio_parts: tuple[tuple[Scalar, Scalar], ...]
    euler_parts: tuple[tuple[Scalar, Scalar], ...]

    @classmethod
    def from_pair(cls, pair: PairData) -> "SpecialBracketForm":
        if pair.left_weight or pair.right_weight:
            raise VertexError("the special shape covers undressed pairs")
        ratio = []
        euler = []
        for p in pair.parts:
            if p.kind == "iratio":
                ratio.append((p.c, p.coeff))
            elif p.kind == "euler":
                euler.append((p.c, p.coeff))
            else:
                raise VertexError(
                    f"part {p.kind} is outside the special bracket shape")
        return cls(tuple(ratio), tuple(euler))

    def alpha(self) -> Scalar:
        out = ZERO
        for c, coeff in self.euler_parts:
            if c == ONE:
                out = out + coeff
        return out

    def image_table(self, w: Window) -> TruncatedLaurent:
        """The bracket of the substituted fields on a (x1, x2) window."""
        jmax = max(w.hi[0] + w.hi[1], -2)
        zw = Window(("z",), (-2,), (jmax,))
        series: dict[int, Scalar] = {}
        for c, coeff in self.ratio_parts:
            k = exp_pole_kernel(c)
            t = iota_expand(k, ("z",), zw)
            for j in range(-2, jmax + 1):
                cj = t.coeff((j,), ZERO) * coeff
                if cj:
                    series[j] = series.get(j, ZERO) + cj
        acc = TruncatedLaurent.zero(w.vars).restrict(w)
        for j, cj in sorted(series.items()):
            if cj:
                acc = acc + _directed_binom_power(j, w).scale(cj)
        a = self.alpha()
        if a:
            acc = acc + delta_family("dshift", ONE, w).scale(a)
        return acc


# ---------------------------------------------------------------------------
# skew kernels on a vacuum module


def translate(v: FockVector) -> FockVector:
    """The canonical derivation: sends each generator mode m to m-1,
    weighted by -m, and kills the vacuum."""
    module = v.module
    out = module.zero()
    for mono, coeff in v.terms.items():
        for idx, (m, r) in enumerate(mono):
            new = list(mono)
            new[idx] = (m - 1, r)
            out = out + FockVector(
                module, {tuple(sorted(new)): coeff * _frac(-m)})
    return out


@dataclass(frozen=True)
class SKernel:
    """The scalar correction g_{r,s}(x) in the skew relation between
    a(x) applied to b's vector and the translated, reflected converse."""

    r: int
    s: int
    order: int
    coeffs: tuple[tuple[int, Scalar], ...]

    def g(self, e: int) -> Scalar:
        for ee, c in self.coeffs:
            if ee == e:
                return c
        return ZERO

    def reflected(self, e: int) -> Scalar:
        """Coefficient e of g(-x)."""
        return self.g(e) * _frac((-1) ** (e % 2))


def extract_s_kernel(module: FockModule, r: int, s: int,
                     order: int) -> SKernel:
    """Match a(x) b against e^{xT} (b at -x) a and return the residue.

    The difference of the two sides must be a pure vacuum multiple at
    every order; anything else means the module action does not close
    under the skew relation and raises VertexError.
    """
    if not module.spec.shifted:
        raise VertexError("skew kernels are extracted on shifted algebras")
    fr = field_of(module, r)
    fs = field_of(module, s)
    vr = module.basis_vector((-1, r))
    vs = module.basis_vector((-1, s))
    lo = min(fr.low_exponent(vs), fs.low_exponent(vr))
    rprime = {e: fs.apply_coeff(e, vr).scale(_frac((-1) ** (e % 2)))
              for e in range(lo, order + 1)}
    coeffs = []
    for e in range(lo, order + 1):
        left = fr.apply_coeff(e, vs)
        rhs = module.zero()
        for t in range(0, e - lo + 1):
            term = rprime[e - t]
            for _ in range(t):
                term = translate(term)
            rhs = rhs + term.scale(_frac(1, factorial(t)))
        diff = left - rhs
        rest = diff - module.vacuum().scale(diff.vacuum_component())
        if not rest.is_zero():
            raise VertexError(
                f"skew residue at exponent {e} is not a vacuum multiple: "
                f"{rest}")
        gneg = diff.vacuum_component()
        g = gneg * _frac((-1) ** (e % 2))
        if g:
            coeffs.append((e, g))
    return SKernel(r, s, order, tuple(coeffs))


# ---------------------------------------------------------------------------
# comparison helpers


def _eq_scalar(a: Scalar, b: Scalar, point: RationalPoint | None) -> bool:
    if point is None:
        return a == b
    return a.evaluate(point) == b.evaluate(point)


def _show(a: Scalar, point: RationalPoint | None) -> str:
    if point is None:
        return str(a)
    return str(a.evaluate(point))


def _cmp_tables(name: str, got: TruncatedLaurent, want: TruncatedLaurent,
                w: Window, point: RationalPoint | None,
                max_reported: int = 6) -> CheckReport:
    checked = 0
    unchecked = 0
    failures: list[str] = []
    for e in w.exponents():
        if not (got.certified(e) and want.certified(e)):
            unchecked += 1
            continue
        checked += 1
        ca = got.coeff(e, ZERO)
        cb = want.coeff(e, ZERO)
        if not _eq_scalar(ca, cb, point):
            if len(failures) < max_reported:
                failures.append(
                    f"at {dict(zip(w.vars, e))}: {_show(ca, point)} != "
                    f"{_show(cb, point)}")
            else:
                failures.append("...")
                break
    if failures:
        status = FAIL
    elif checked == 0 or unchecked:
        status = INCONCLUSIVE
    else:
        status = PASS
    return CheckReport(name, status, checked=checked,
                       region=w.describe(), failures=failures)


def _vec_mismatches(got: FockVector, want: FockVector,
                    point: RationalPoint | None) -> list[str]:
    out = []
    monos = sorted(set(got.terms) | set(want.terms))
    for m in monos:
        a = got.terms.get(m, ZERO)
        b = want.terms.get(m, ZERO)
        if not _eq_scalar(a, b, point):
            out.append(f"{m}: {_show(a, point)} != {_show(b, point)}")
    return out


def _transpose2(t: TruncatedLaurent, w: Window) -> TruncatedLaurent:
    """Swap the two variables of a table certified on the swapped window."""
    coeffs = {(e2, e1): t.coeff((e1, e2))
              for (e1, e2) in t.support()}
    return TruncatedLaurent.polynomial(w.vars, coeffs).restrict(w)


def _swap_window(w: Window) -> Window:
    return Window((w.vars[1], w.vars[0]),
                  (w.lo[1], w.lo[0]), (w.hi[1], w.hi[0]))


def _slot_for(module: FockModule, shift: int) -> FieldSlot:
    if module.spec.shifted:
        return FieldSlot(shift=shift)
    return FieldSlot(scale=Scalar.q_power(shift))


def _measured_commutator(module: FockModule, r: int, s: int,
                         w: Window) -> TruncatedLaurent:
    """[a(x1), b(x2)] read off vacuum expectations of the two orders."""
    vac = module.vacuum()
    sa, sb = _slot_for(module, r), _slot_for(module, s)
    fwd = two_point(vac, (sa, sb), vac, w)
    rev = two_point(vac, (sb, sa), vac, _swap_window(w))
    return fwd - _transpose2(rev, w)


def _centrality_report(module: FockModule, r: int, s: int, w: Window,
                       table: TruncatedLaurent,
                       point: RationalPoint | None) -> CheckReport:
    """The commutator acts by the same scalar table between deeper states."""
    sa, sb = _slot_for(module, r), _slot_for(module, s)
    a = module.basis_vector((-1, r) if module.spec.shifted else (-1, 0))
    b = module.basis_vector((-2, s) if module.spec.shifted else (-2, 0))
    parts = []
    for i, (bra, ket) in enumerate(((a, a), (b, a))):
        fwd = two_point(bra, (sa, sb), ket, w)
        rev = two_point(bra, (sb, sa), ket, _swap_window(w))
        got = fwd - _transpose2(rev, w)
        want = table.scale(pair_vectors(bra, ket))
        parts.append(_cmp_tables(f"centrality[{i}]", got, want, w, point))
    return combine("centrality", parts)


# ---------------------------------------------------------------------------
# identity checks


@dataclass(frozen=True)
class LawId:
    """A verifiable identity: a registry name plus its parameters."""

    name: str
    params: tuple[tuple[str, object], ...] = ()


def _law_hq_commutator_delta(window: int, point, r: int = 1, s: int = 0
                             ) -> CheckReport:
    module = FockModule("hq")
    w = Window.cube(_X12, window)
    got = _measured_commutator(module, r, s, w)
    pair = pair_of(field_of(module, r), field_of(module, s))
    want = pair.table(w)
    parts = [
        _cmp_tables("vacuum-table", got, want, w, point),
        _centrality_report(module, r, s, Window.cube(_X12, min(window, 5)),
                           want.restrict(Window.cube(_X12, min(window, 5))),
                           point),
    ]
    return combine(f"hq-commutator-delta[r={r},s={s}]", parts)


def _law_bhat_commutator_delta(window: int, point, r: int = 1, s: int = 0
                               ) -> CheckReport:
    module = FockModule("bhat")
    parts = []
    for rr, ss in ((r, s), (s, r), (r, r)):
        w = Window.cube(_X12, window)
        got = _measured_commutator(module, rr, ss, w)
        want = pair_of(field_of(module, rr),
                       field_of(module, ss)).table(w)
        parts.append(_cmp_tables(f"pair[{rr},{ss}]", got, want, w, point))
    return combine("bhat-commutator-delta", parts)


def _htq_form_table(parts: tuple[PairPart, ...], w: Window
                    ) -> TruncatedLaurent:
    acc = TruncatedLaurent.zero(w.vars).restrict(w)
    for p in parts:
        acc = acc + _part_table(p, w)
    return acc


def _law_htq_euler_form(window: int, point) -> CheckReport:
    module = FockModule("htq")
    w = Window.cube(_X12, window)
    got = _measured_commutator(module, 0, 0, w)
    lvl = module.level
    form = (PairPart("euler", lvl, ONE),
            PairPart("iratio", lvl, Q),
            PairPart("iratio_op", -lvl, Q))
    want = _htq_form_table(form, w)
    parts = [_cmp_tables("euler-form", got, want, w, point)]
    # the two one-sided expansions of the same ratio kernel must differ
    one_sided = _part_table(PairPart("iratio", ONE, Q), w)
    other = _part_table(PairPart("iratio_op", ONE, Q), w)
    same = all(
        _eq_scalar(one_sided.coeff(e, ZERO), other.coeff(e, ZERO), point)
        for e in w.exponents())
    parts.append(CheckReport(
        "direction-difference", FAIL if same else PASS, checked=w.size(),
        region=w.describe(),
        failures=["the two expansion directions coincide"] if same else []))
    return combine("htq-commutator-euler-form", parts)


def _law_htq_kernel_form(window: int, point) -> CheckReport:
    module = FockModule("htq")
    w = Window.cube(_X12, window)
    got = _measured_commutator(module, 0, 0, w)
    pair = pair_of(field_of(module), field_of(module))
    want = pair.table(w)
    parts = [_cmp_tables("kernel-form", got, want, w, point)]
    lvl = module.level
    failures = []
    checked = 0
    for m in range(-window, window + 1):
        checked += 1
        expect = _frac(m) * (ONE - Scalar.q_power(abs(m))) * lvl
        val = got.coeff((-m, m), ZERO)
        if not _eq_scalar(val, expect, point):
            failures.append(f"mode {m}: {_show(val, point)} != "
                            f"{_show(expect, point)}")
    parts.append(CheckReport(
        "mode-constants", FAIL if failures else PASS, checked=checked,
        region=f"|m| <= {window}", failures=failures[:6]))
    return combine("htq-commutator-kernel-form", parts)


def _quasi_locality_inner(alg: str, mult: Multiplier, window: int,
                          point) -> CheckReport:
    """p times (the two orderings' difference minus the one-sided kernel).

    This is the locality shape behind the substitution products: after
    the kernel parts of the commutator are moved to the right-hand side,
    what remains is delta supported and the multiplier must kill it.
    """
    module = FockModule(alg)
    w = Window.cube(_X12, window)
    table = _measured_commutator(module, 0, 0, w)
    pair = pair_of(field_of(module), field_of(module))
    for part in pair.parts:
        if not part.is_delta:
            table = table - _part_table(part, w)
    if window < mult.degree:
        return CheckReport("kill-check", INCONCLUSIVE, checked=0,
                           region=f"cube radius {window}",
                           notes=["window smaller than the multiplier"])
    prod = mult.as_table() * table
    inner = Window.cube(_X12, window - mult.degree)
    zero = TruncatedLaurent.zero(_X12).restrict(inner)
    return _cmp_tables("kill-check", prod.restrict(inner), zero, inner, point)


_HQ_MULT = Multiplier.of((Q, 1), (Scalar.q_power(-1), 1), unit=Q)
_HQ_MULT_CONTROL = Multiplier.of((Q, 1))
_HTQ_MULT = Multiplier.of((ONE, 2), (Q, 2))
_HTQ_MULT_CONTROL = Multiplier.of((ONE, 1), (Q, 1))


def _law_quasi_locality(alg: str, mult: Multiplier):
    def run(window: int, point) -> CheckReport:
        rep = _quasi_locality_inner(alg, mult, window, point)
        return CheckReport(f"{alg}-quasi-locality", rep.status,
                           checked=rep.checked, region=rep.region,
                           failures=rep.failures, notes=rep.notes)
    return run


def _law_quasi_locality_control(alg: str, mult: Multiplier):
    def run(window: int, point) -> CheckReport:
        rep = _quasi_locality_inner(alg, mult, window, point)
        name = f"{alg}-quasi-locality-control"
        if rep.status == INCONCLUSIVE:
            return CheckReport(name, INCONCLUSIVE, checked=0,
                               region=rep.region, notes=rep.notes)
        if rep.status == FAIL:
            return CheckReport(
                name, PASS, checked=rep.checked, region=rep.region,
                notes=["the undersized multiplier leaves a remainder, "
                       "as it must"])
        return CheckReport(
            name, FAIL, checked=rep.checked, region=rep.region,
            failures=["the undersized multiplier unexpectedly kills the "
                      "commutator"])
    return run


def _image_bracket_entries(module: FockModule, r: int, s: int,
                           window: int, xwin: int, states
                           ) -> dict[tuple[int, int, int, int], FockVector]:
    """[(a_n^e), (b_m^e)] applied to the constant field, then to states.

    Returns vectors keyed by (n, m, state index, x exponent).  Both
    orders of products are taken against the closed-form vacuum products
    of the other factor.
    """
    af = field_of(module, r)
    bf = field_of(module, s)
    nlo = mlo = -window - 1
    nhi = mhi = window - 1
    zneed = window
    out: dict[tuple[int, int, int, int], FockVector] = {}

    def stacks(left, right_base, idx_range):
        table = {}
        for m in idx_range:
            fld = vacuum_product_field(right_base, m)
            if isinstance(fld, SumField) and not fld.terms:
                table[m] = None
                continue
            pair = pair_of(left, fld)
            mult = Multiplier.canonical_for(pair)
            table[m] = [
                _product_stack(left, fld, mult, pair, v, -xwin, xwin, zneed)
                for v in states
            ]
        return table

    ab = stacks(af, bf, range(mlo, mhi + 1))
    ba = stacks(bf, af, range(nlo, nhi + 1))
    for n in range(nlo, nhi + 1):
        for m in range(mlo, mhi + 1):
            for si in range(len(states)):
                for E in range(-xwin, xwin + 1):
                    first = (ab[m][si].get(E, -n - 1)
                             if ab[m] is not None else module.zero())
                    second = (ba[n][si].get(E, -m - 1)
                              if ba[n] is not None else module.zero())
                    out[(n, m, si, E)] = first - second
    return out


def _image_bracket_report(name: str, module: FockModule, r: int, s: int,
                          rhs: TruncatedLaurent, window: int, point,
                          xwin: int = 2) -> CheckReport:
    states = [module.vacuum(), module.basis_vector((-1, 0))]
    entries = _image_bracket_entries(module, r, s, window, xwin, states)
    failures = []
    checked = 0
    for (n, m, si, E), got in sorted(entries.items()):
        sigma = rhs.coeff((-n - 1, -m - 1), ZERO)
        want = states[si].scale(sigma) if E == 0 else module.zero()
        checked += 1
        bad = _vec_mismatches(got, want, point)
        if bad and len(failures) < 6:
            failures.append(f"n={n}, m={m}, state {si}, x^{E}: {bad[0]}")
    status = FAIL if failures else PASS
    return CheckReport(name, status, checked=checked,
                       region=f"product indices within |e| <= {window}",
                       failures=failures)


def _law_phi_image_heisenberg(window: int, point, r: int = 1, s: int = 0
                              ) -> CheckReport:
    module = FockModule("hq")
    w = Window.cube(_X12, window + 1)
    rhs = PairData((PairPart("bplain",
                             module.level * standard_pairing(r, s), ONE),)
                   if standard_pairing(r, s) else ()).table(w)
    return _image_bracket_report("phi-image-heisenberg", module, r, s,
                                 rhs, window, point)


def _law_phi_image_bq(window: int, point, r: int = 1, s: int = 0
                      ) -> CheckReport:
    module = FockModule("htq")
    w = Window.cube(_X12, window + 1)
    rhs = bhatq_commutator_table(r - s, w).scale(module.level)
    return _image_bracket_report("phi-image-bq-commutator", module, r, s,
                                 rhs, window, point)


def _law_special_pair_transfer(window: int, point, r: int = 0, s: int = 0
                               ) -> CheckReport:
    module = FockModule("htq")
    pair = pair_of(field_of(module, r), field_of(module, s))
    form = SpecialBracketForm.from_pair(pair)
    w = Window.cube(_X12, window + 1)
    rhs = form.image_table(w)
    return _image_bracket_report("special-pair-transfer", module, r, s,
                                 rhs, window, point)


def _exp_binom_coeff(k: int, u: int, vv: int) -> Scalar:
    """x1^u x2^v coefficient of e^(k(x1-x2))."""
    return _frac(k ** u * (-k) ** vv, factorial(u) * factorial(vv))


def _law_locality_transfer(window: int, point, r: int = 1, s: int = 0
                           ) -> CheckReport:
    module = FockModule("hq")
    xwin = 2
    states = [module.vacuum()]
    entries = _image_bracket_entries(module, r, s, window, xwin, states)
    # scalar table of the image bracket, read off the constant-field part
    table: dict[tuple[int, int], Scalar] = {}
    for (n, m, _si, E), vec in entries.items():
        if E == 0:
            val = vec.vacuum_component()
            if val:
                table[(-n - 1, -m - 1)] = val
    parts = []
    # multiplying by (x1 - x2) must kill the bracket of the images; the
    # loop stays one step inside the window so both lookups are covered
    failures = []
    checked = 0
    for e1 in range(-window + 1, window + 1):
        for e2 in range(-window + 1, window + 1):
            checked += 1
            val = table.get((e1 - 1, e2), ZERO) - table.get((e1, e2 - 1), ZERO)
            if not _eq_scalar(val, ZERO, point):
                failures.append(f"at ({e1}, {e2}): {_show(val, point)}")
                if len(failures) >= 6:
                    break
        if len(failures) >= 6:
            break
    parts.append(CheckReport(
        "binomial-kill", FAIL if failures else PASS, checked=checked,
        region=f"|e| < {window}", failures=failures))
    # the full multiplier evaluated on exponentials: each antidiagonal of
    # the bracket table is constant, which extends it past the window
    mult = Multiplier.canonical_for(pair_of(field_of(module, r),
                                            field_of(module, s)))
    bands: dict[int, Scalar] = {}
    band_fail: list[str] = []
    for (e1, e2), val in sorted(table.items()):
        d = e1 + e2
        if d in bands:
            if not _eq_scalar(bands[d], val, point):
                band_fail.append(f"antidiagonal {d} is not constant")
        else:
            bands[d] = val
    if band_fail:
        parts.append(CheckReport("exp-multiplier-kill", FAIL,
                                 checked=len(table), failures=band_fail[:6]))
    else:
        pm = mult.poly2()
        emons: dict[int, Scalar] = {}
        for (i, _j), c in pm.items():
            emons[i] = emons.get(i, ZERO) + c
        failures = []
        checked = 0
        for E1 in range(-3, 4):
            for E2 in range(-3, 4):
                checked += 1
                val = ZERO
                for d, cval in bands.items():
                    if not cval:
                        continue
                    # entries with e1 <= E1 and e2 = d - e1 <= E2
                    for e1 in range(d - E2, E1 + 1):
                        for k, ak in emons.items():
                            val = val + ak * cval * _exp_binom_coeff(
                                k, E1 - e1, E2 - d + e1)
                if not _eq_scalar(val, ZERO, point):
                    failures.append(f"at ({E1}, {E2}): {_show(val, point)}")
        parts.append(CheckReport(
            "exp-multiplier-kill", FAIL if failures else PASS,
            checked=checked, region="|E| <= 3", failures=failures[:6]))
    return combine("locality-transfer", parts)


_ASSOC_SETUP = {
    "hq": _HQ_MULT,
    "htq": _HTQ_MULT,
}

_ASSOC_SOURCE = {"hq": "bhat", "htq": "bhatq"}


def _assoc_left_fields(module: FockModule) -> list[OperatorSeries]:
    """The generator field and its realized one-generator vacuum vector.

    Only the index-0 vector is usable here: the fixed multiplier matches
    the delta pattern of the unshifted pair alone.
    """
    src = FockModule(_ASSOC_SOURCE[module.algebra], level=module.level)
    realized = psi_map(src.basis_vector((-1, 0)), target=module)
    (_c, composite), = realized.terms
    return [field_of(module, 0), composite]


def _law_weak_associativity(window: int, point, alg: str = "hq",
                            x0_order: int = 6) -> CheckReport:
    module = FockModule(alg)
    mult = _ASSOC_SETUP[alg]
    vf = field_of(module, 0)
    kappa = mult.kappa
    deg = mult.degree
    states = [module.vacuum(), module.basis_vector((-1, 0))]
    pexp = mult.exp_series(x0_order + kappa)
    parts = []
    cases = [(si, w0, ui, uf) for si, w0 in enumerate(states)
             for ui, uf in enumerate(_assoc_left_fields(module))]
    for si, w0, ui, uf in cases:
        pair = pair_of(uf, vf)
        # left side: products summed against x0 powers, then the
        # substituted multiplier
        lhs = StateTable(module, -window, window, -kappa, x0_order)
        stack = _product_stack(uf, vf, mult, pair, w0,
                               -window - deg, window - deg, x0_order)
        for n in range(-(x0_order + 1), kappa):
            for E in range(-window - deg, window - deg + 1):
                vec = stack.get(E, -n - 1)
                if vec.is_zero():
                    continue
                for t, pt in enumerate(pexp):
                    if pt:
                        lhs.add(E + deg, -n - 1 + t, vec.scale(pt))
        # right side: the substituted ordered product, never inverted
        rhs = ordered_core(uf, vf, mult, pair, w0,
                           -window, window, x0_order)
        failures = []
        checked = 0
        for E in range(-window, window + 1):
            for M in range(-kappa, x0_order + 1):
                checked += 1
                got = lhs.get(E, M)
                want = rhs.get(E, M) if M >= 0 else module.zero()
                bad = _vec_mismatches(got, want, point)
                if bad and len(failures) < 6:
                    failures.append(
                        f"state {si}, left {ui}, x^{E} z^{M}: {bad[0]}")
        parts.append(CheckReport(
            f"state[{si}]left[{ui}]", FAIL if failures else PASS,
            checked=checked,
            region=f"|x| <= {window}, z order <= {x0_order}",
            failures=failures))
    return combine(f"phi-weak-associativity[{alg}]", parts)


def _law_scale_covariance(window: int, point) -> CheckReport:
    bmod = FockModule("bhat")
    target = FockModule("hq")
    base_state = bmod.basis_vector((-1, 0), (-1, 1))
    base = psi_map(base_state, target)
    states = [target.vacuum(), target.basis_vector((-1, 0))]
    parts = []
    for nn in range(-2, 3):
        shifted = psi_map(bmod.basis_vector((-1, nn), (-1, 1 + nn)), target)
        scaled = ArgScaledField(base, Scalar.q_power(nn))
        failures = []
        checked = 0
        for si, v in enumerate(states):
            for e in range(-window, window + 1):
                checked += 1
                bad = _vec_mismatches(shifted.apply_coeff(e, v),
                                      scaled.apply_coeff(e, v), point)
                if bad and len(failures) < 6:
                    failures.append(f"shift {nn}, state {si}, x^{e}: {bad[0]}")
        gen_shift = field_of(target, 3 + nn)
        gen_scaled = ArgScaledField(field_of(target, 3), Scalar.q_power(nn))
        for e in range(-window, window + 1):
            checked += 1
            bad = _vec_mismatches(gen_shift.apply_coeff(e, states[1]),
                                  gen_scaled.apply_coeff(e, states[1]), point)
            if bad and len(failures) < 6:
                failures.append(f"generator, shift {nn}, x^{e}: {bad[0]}")
        parts.append(CheckReport(
            f"shift[{nn}]", FAIL if failures else PASS, checked=checked,
            region=f"|x| <= {window}", failures=failures))
    return combine("scale-covariance", parts)


@dataclass(frozen=True)
class _LawSpec:
    runner: object
    default_window: int
    summary: str


LAWS: dict[str, _LawSpec] = {
    "bhat-commutator-delta": _LawSpec(
        _law_bhat_commutator_delta, 8,
        "banded pairing commutator equals its shifted delta table"),
    "hq-commutator-delta": _LawSpec(
        _law_hq_commutator_delta, 10,
        "deformed Heisenberg commutator equals its two-delta table"),
    "hq-quasi-locality": _LawSpec(
        _law_quasi_locality("hq", _HQ_MULT), 10,
        "the quadratic multiplier kills the deformed commutator"),
    "hq-quasi-locality-control": _LawSpec(
        _law_quasi_locality_control("hq", _HQ_MULT_CONTROL), 10,
        "a single binomial must not kill the deformed commutator"),
    "htq-commutator-euler-form": _LawSpec(
        _law_htq_euler_form, 12,
        "euler-delta plus two one-sided kernels, directions differing"),
    "htq-commutator-kernel-form": _LawSpec(
        _law_htq_kernel_form, 12,
        "one-sided kernel pair plus euler-delta difference, with the "
        "closed-form mode constants"),
    "htq-quasi-locality": _LawSpec(
        _law_quasi_locality("htq", _HTQ_MULT), 10,
        "the squared multiplier kills the degenerate commutator minus "
        "its one-sided kernel"),
    "htq-quasi-locality-control": _LawSpec(
        _law_quasi_locality_control("htq", _HTQ_MULT_CONTROL), 10,
        "first powers must not kill the kernel-reduced degenerate "
        "commutator"),
    "locality-transfer": _LawSpec(
        _law_locality_transfer, 5,
        "multipliers transfer to the substituted fields on exponentials"),
    "phi-image-bq-commutator": _LawSpec(
        _law_phi_image_bq, 5,
        "substituted degenerate fields satisfy the exponential-tail "
        "bracket"),
    "phi-image-heisenberg": _LawSpec(
        _law_phi_image_heisenberg, 5,
        "substituted deformed fields satisfy the banded pairing bracket"),
    "phi-weak-associativity": _LawSpec(
        _law_weak_associativity, 6,
        "iterated substitution products match the substituted double "
        "product"),
    "scale-covariance": _LawSpec(
        _law_scale_covariance, 8,
        "index shifts act as argument scalings on realized fields"),
    "special-pair-transfer": _LawSpec(
        _law_special_pair_transfer, 5,
        "ratio-plus-euler brackets transfer with only the derivative "
        "delta surviving"),
}


def verify_identity(name: str, window: int | None = None,
                    point: RationalPoint | None = None,
                    **params) -> CheckReport:
    """Run one registered identity check at the given window."""
    spec = LAWS.get(name)
    if spec is None:
        known = ", ".join(sorted(LAWS))
        raise VertexError(f"unknown law {name!r}; one of {known}")
    if window is None:
        window = spec.default_window
    return spec.runner(window, point, **params)


def suite_reports(window: int | None = None,
                  point: RationalPoint | None = None) -> list[CheckReport]:
    """All registered checks, in name order."""
    return [verify_identity(name, window=window, point=point)
            for name in sorted(LAWS)]
