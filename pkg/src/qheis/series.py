"""Truncated multivariate Laurent distributions with certified windows.

The central object, :class:`TruncatedLaurent`, is a finite coefficient table
standing in for an infinite formal distribution.  Alongside the table it
carries a *certificate* describing exactly which coefficients of the true
object the table is guaranteed to reproduce:

* ``entire``     -- the table IS the whole object (a Laurent polynomial);
* ``suplo[i]``   -- true support satisfies e_i >= suplo[i]  (may be -oo);
* ``band``       -- true support satisfies band[0] <= sum(e) <= band[1];
* ``floors/caps``-- box part of the certified region;
* ``bandcap``    -- diagonal part: certified only where sum(e) <= bandcap.

A coefficient e is *certified* when it lies in the box-and-diagonal region,
or when one of the support bounds forces it to vanish.  All arithmetic
propagates certificates conservatively, so a certified coefficient of any
derived table equals the corresponding coefficient of the true object.

Expansion direction.  Iterated Laurent expansions of one rational function
differ by direction, so every table may carry a ``direction`` tag: the tuple
of variables ordered outermost first (the last variable is the series
variable).  Combining tables with conflicting tags is an error; honest
distributions and polynomials carry ``None`` and mix with anything.

Coefficient values are duck-typed: exact scalars or module vectors, anything
with ``+``, ``-``, ``==``, truthiness, and left-multiplication by a scalar.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from math import inf
from typing import Any, Iterable

from .report import FAIL, INCONCLUSIVE, PASS, CheckReport
from .scalar import Scalar

NEG_INF = -inf
POS_INF = inf

ExtInt = Any  # int or +-inf


class SeriesError(ValueError):
    pass


class DirectionError(SeriesError):
    """Raised when tables with conflicting expansion directions are mixed."""


class CertificationError(SeriesError):
    """Raised when a requested coefficient is outside the certified region."""


def _cap_add(cap: ExtInt, lo: ExtInt) -> ExtInt:
    """Combine a certification cap with a support lower bound."""
    if cap == POS_INF:
        return POS_INF
    if lo == NEG_INF:
        return NEG_INF
    return cap + lo


def _floor_add(floor: ExtInt, hi: ExtInt) -> ExtInt:
    if floor == NEG_INF:
        return NEG_INF
    if hi == POS_INF:
        return POS_INF
    return floor + hi


def _lo_add(a: ExtInt, b: ExtInt) -> ExtInt:
    if a == NEG_INF or b == NEG_INF:
        return NEG_INF
    return a + b


def _hi_add(a: ExtInt, b: ExtInt) -> ExtInt:
    if a == POS_INF or b == POS_INF:
        return POS_INF
    return a + b


@dataclass(frozen=True)
class Window:
    """An inclusive box of exponents over an ordered tuple of variables."""

    vars: tuple[str, ...]
    lo: tuple[int, ...]
    hi: tuple[int, ...]

    def __post_init__(self):
        if len(set(self.vars)) != len(self.vars):
            raise SeriesError(f"duplicate variables in window: {self.vars}")
        if not (len(self.vars) == len(self.lo) == len(self.hi)):
            raise SeriesError("window bounds must align with variables")
        for a, b in zip(self.lo, self.hi):
            if a > b:
                raise SeriesError(f"empty window range [{a}, {b}]")

    @classmethod
    def cube(cls, vars: Iterable[str], radius: int) -> "Window":
        vs = tuple(vars)
        return cls(vs, tuple(-radius for _ in vs), tuple(radius for _ in vs))

    @classmethod
    def of(cls, **ranges: tuple[int, int]) -> "Window":
        vs = tuple(ranges)
        return cls(vs, tuple(r[0] for r in ranges.values()),
                   tuple(r[1] for r in ranges.values()))

    def exponents(self) -> Iterable[tuple[int, ...]]:
        return itertools.product(
            *(range(a, b + 1) for a, b in zip(self.lo, self.hi))
        )

    def __contains__(self, e: tuple[int, ...]) -> bool:
        return all(a <= x <= b for x, a, b in zip(e, self.lo, self.hi))

    def size(self) -> int:
        n = 1
        for a, b in zip(self.lo, self.hi):
            n *= b - a + 1
        return n

    def describe(self) -> str:
        return ", ".join(
            f"{v} in [{a}, {b}]" for v, a, b in zip(self.vars, self.lo, self.hi)
        )


@dataclass(frozen=True)
class Cert:
    """Exactness certificate for a truncated table."""

    entire: bool
    suplo: tuple[ExtInt, ...]
    floors: tuple[ExtInt, ...]
    caps: tuple[ExtInt, ...]
    band: tuple[ExtInt, ExtInt]
    bandcap: ExtInt

    @classmethod
    def full(cls, n: int) -> "Cert":
        return cls(True, (NEG_INF,) * n, (NEG_INF,) * n, (POS_INF,) * n,
                   (NEG_INF, POS_INF), POS_INF)

    @classmethod
    def box(cls, lo: tuple[int, ...], hi: tuple[int, ...],
            suplo: tuple[ExtInt, ...] | None = None,
            band: tuple[ExtInt, ExtInt] = (NEG_INF, POS_INF),
            bandcap: ExtInt = POS_INF) -> "Cert":
        n = len(lo)
        if suplo is None:
            suplo = (NEG_INF,) * n
        floors = tuple(
            NEG_INF if s != NEG_INF and s >= l else l
            for s, l in zip(suplo, lo)
        )
        return cls(False, tuple(suplo), floors, tuple(hi), band, bandcap)

    @classmethod
    def empty(cls, n: int,
              suplo: tuple[ExtInt, ...] | None = None,
              band: tuple[ExtInt, ExtInt] = (NEG_INF, POS_INF)) -> "Cert":
        if suplo is None:
            suplo = (NEG_INF,) * n
        return cls(False, tuple(suplo), (POS_INF,) * n, (NEG_INF,) * n,
                   band, NEG_INF)


class TruncatedLaurent:
    """A certified finite window of a formal Laurent distribution."""

    __slots__ = ("vars", "direction", "coeffs", "cert")

    def __init__(self, vars: tuple[str, ...],
                 coeffs: dict[tuple[int, ...], Any],
                 cert: Cert,
                 direction: tuple[str, ...] | None = None,
                 _trusted: bool = False):
        self.vars = tuple(vars)
        if direction is not None and set(direction) != set(self.vars):
            raise DirectionError(
                f"direction {direction} does not cover variables {vars}")
        self.direction = tuple(direction) if direction else None
        self.cert = cert
        if _trusted:
            self.coeffs = coeffs
        else:
            self.coeffs = {
                e: c for e, c in coeffs.items()
                if c and _certified(cert, e)
            }

    # -- construction --------------------------------------------------------

    @classmethod
    def polynomial(cls, vars: tuple[str, ...],
                   coeffs: dict[tuple[int, ...], Any]) -> "TruncatedLaurent":
        """An exactly-known Laurent polynomial (direction neutral)."""
        coeffs = {e: c for e, c in coeffs.items() if c}
        return cls(vars, coeffs, Cert.full(len(vars)), None, _trusted=True)

    @classmethod
    def zero(cls, vars: tuple[str, ...]) -> "TruncatedLaurent":
        return cls.polynomial(vars, {})

    @classmethod
    def monomial(cls, vars: tuple[str, ...], e: tuple[int, ...],
                 c: Any) -> "TruncatedLaurent":
        return cls.polynomial(vars, {e: c})

    # -- inspection ----------------------------------------------------------

    def certified(self, e: tuple[int, ...]) -> bool:
        return _certified(self.cert, e)

    def get(self, e: tuple[int, ...], default: Any = None) -> Any:
        return self.coeffs.get(e, default)

    def coeff(self, e: tuple[int, ...], zero: Any = None) -> Any:
        """The certified coefficient at e; raises outside the certificate."""
        if not _certified(self.cert, e):
            raise CertificationError(
                f"coefficient {dict(zip(self.vars, e))} is outside the "
                f"certified region")
        c = self.coeffs.get(e)
        if c is not None:
            return c
        return Scalar.from_int(0) if zero is None else zero

    def certifies_window(self, w: Window) -> bool:
        self._align_window(w)
        return all(_certified(self.cert, e) for e in w.exponents())

    def require_certified(self, w: Window) -> None:
        if not self.certifies_window(w):
            raise CertificationError(
                f"window {w.describe()} is not fully certified")

    def _align_window(self, w: Window) -> None:
        if w.vars != self.vars:
            raise SeriesError(
                f"window variables {w.vars} do not match table {self.vars}")

    def support(self) -> list[tuple[int, ...]]:
        return sorted(self.coeffs)

    def is_zero_on(self, w: Window) -> bool:
        return all(not self.coeffs.get(e) for e in w.exponents())

    # -- direction plumbing --------------------------------------------------

    def _merge_direction(self, other: "TruncatedLaurent") ->\
            tuple[str, ...] | None:
        if self.direction is None:
            return other.direction
        if other.direction is None or other.direction == self.direction:
            return self.direction
        raise DirectionError(
            f"cannot combine expansion directions {self.direction} "
            f"and {other.direction}")

    def with_direction(self, direction: tuple[str, ...] | None)\
            -> "TruncatedLaurent":
        return TruncatedLaurent(self.vars, self.coeffs, self.cert,
                                direction, _trusted=True)

    # -- linear structure ----------------------------------------------------

    def __add__(self, other: "TruncatedLaurent") -> "TruncatedLaurent":
        if not isinstance(other, TruncatedLaurent):
            return NotImplemented
        if other.vars != self.vars:
            raise SeriesError(f"variable mismatch: {self.vars} vs {other.vars}")
        direction = self._merge_direction(other)
        cert = _add_cert(self.cert, other.cert)
        coeffs = dict(self.coeffs)
        for e, c in other.coeffs.items():
            s = coeffs.get(e)
            s = c if s is None else s + c
            if s:
                coeffs[e] = s
            else:
                coeffs.pop(e, None)
        return TruncatedLaurent(self.vars, coeffs, cert, direction)

    def __sub__(self, other: "TruncatedLaurent") -> "TruncatedLaurent":
        return self + (-other)

    def __neg__(self) -> "TruncatedLaurent":
        return TruncatedLaurent(
            self.vars, {e: -c for e, c in self.coeffs.items()},
            self.cert, self.direction, _trusted=True)

    def scale(self, s: Scalar) -> "TruncatedLaurent":
        if not s:
            return TruncatedLaurent.zero(self.vars)
        return TruncatedLaurent(
            self.vars, {e: s * c for e, c in self.coeffs.items()},
            self.cert, self.direction, _trusted=True)

    # -- multiplicative structure -------------------------------------------

    def __mul__(self, other: "TruncatedLaurent") -> "TruncatedLaurent":
        """Product with certificate propagation.

        At least one operand must be scalar-valued.  If neither operand is
        entire and either carries a finite certification floor (a purely
        windowed object such as a delta family), the result is certifiable
        only through its support bounds.
        """
        if not isinstance(other, TruncatedLaurent):
            return NotImplemented
        if other.vars != self.vars:
            raise SeriesError(f"variable mismatch: {self.vars} vs {other.vars}")
        direction = self._merge_direction(other)
        cert = _mul_cert(self, other)
        coeffs: dict[tuple[int, ...], Any] = {}
        for ea, ca in self.coeffs.items():
            for eb, cb in other.coeffs.items():
                e = tuple(x + y for x, y in zip(ea, eb))
                if not _certified(cert, e):
                    continue
                term = ca * cb
                s = coeffs.get(e)
                s = term if s is None else s + term
                if s:
                    coeffs[e] = s
                else:
                    coeffs.pop(e, None)
        out = TruncatedLaurent(self.vars, coeffs, cert, direction,
                               _trusted=True)
        if cert.entire:
            return _tighten_entire(out)
        return out

    def shift(self, offsets: dict[str, int], c: Any = None)\
            -> "TruncatedLaurent":
        """Multiply by c * prod(var**offset)."""
        d = tuple(offsets.get(v, 0) for v in self.vars)
        tot = sum(d)
        coeffs = {}
        for e, v in self.coeffs.items():
            coeffs[tuple(x + y for x, y in zip(e, d))] = (
                v if c is None else c * v)
        cert = Cert(
            self.cert.entire,
            tuple(_lo_add(s, x) for s, x in zip(self.cert.suplo, d)),
            tuple(_lo_add(f, x) for f, x in zip(self.cert.floors, d)),
            tuple(_hi_add(s, x) for s, x in zip(self.cert.caps, d)),
            (_lo_add(self.cert.band[0], tot), _hi_add(self.cert.band[1], tot)),
            _hi_add(self.cert.bandcap, tot),
        )
        return TruncatedLaurent(self.vars, coeffs, cert, self.direction,
                                _trusted=True)

    def derivative(self, var: str) -> "TruncatedLaurent":
        i = self.vars.index(var)
        coeffs: dict[tuple[int, ...], Any] = {}
        for e, c in self.coeffs.items():
            if e[i] == 0:
                continue
            ne = tuple(x - (1 if j == i else 0) for j, x in enumerate(e))
            coeffs[ne] = Scalar.from_int(e[i]) * c
        dt = tuple(-1 if j == i else 0 for j in range(len(self.vars)))
        cert = Cert(
            self.cert.entire,
            tuple(_lo_add(s, x) for s, x in zip(self.cert.suplo, dt)),
            tuple(_lo_add(f, x) for f, x in zip(self.cert.floors, dt)),
            tuple(_hi_add(s, x) for s, x in zip(self.cert.caps, dt)),
            (_lo_add(self.cert.band[0], -1), _hi_add(self.cert.band[1], -1)),
            _hi_add(self.cert.bandcap, -1),
        )
        return TruncatedLaurent(self.vars, coeffs, cert, self.direction,
                                _trusted=True)

    def euler(self, var: str) -> "TruncatedLaurent":
        """Apply var * d/dvar (no support shift)."""
        i = self.vars.index(var)
        coeffs = {
            e: Scalar.from_int(e[i]) * c
            for e, c in self.coeffs.items() if e[i]
        }
        return TruncatedLaurent(self.vars, coeffs, self.cert, self.direction,
                                _trusted=True)

    # -- extraction ----------------------------------------------------------

    def extract(self, var: str, k: int) -> "TruncatedLaurent":
        """The coefficient of var**k as a table over the remaining variables."""
        i = self.vars.index(var)
        rest = self.vars[:i] + self.vars[i + 1:]
        coeffs = {
            e[:i] + e[i + 1:]: c for e, c in self.coeffs.items() if e[i] == k
        }
        c = self.cert
        drop = lambda t: t[:i] + t[i + 1:]
        if c.entire:
            return TruncatedLaurent.polynomial(rest, coeffs)
        if c.suplo[i] != NEG_INF and k < c.suplo[i]:
            return TruncatedLaurent.zero(rest)
        band = (_lo_add(c.band[0], -k), _hi_add(c.band[1], -k))
        if c.floors[i] <= k <= c.caps[i]:
            cert = Cert(False, drop(c.suplo), drop(c.floors), drop(c.caps),
                        band, _hi_add(c.bandcap, -k))
        else:
            cert = Cert.empty(len(rest), drop(c.suplo), band)
        direction = None
        if self.direction is not None:
            direction = tuple(v for v in self.direction if v != var)
            if len(direction) < 2:
                direction = None
        return TruncatedLaurent(rest, coeffs, cert, direction, _trusted=True)

    def residue(self, var: str) -> "TruncatedLaurent":
        """The formal residue: coefficient of var**-1."""
        return self.extract(var, -1)

    def restrict(self, w: Window) -> "TruncatedLaurent":
        """Trim storage to a window; the certificate shrinks accordingly."""
        self._align_window(w)
        coeffs = {e: c for e, c in self.coeffs.items() if e in w}
        c = self.cert
        cert = Cert(
            False,
            c.suplo,
            tuple(max(f, l) for f, l in zip(c.floors, w.lo)),
            tuple(min(s, h) for s, h in zip(c.caps, w.hi)),
            c.band,
            c.bandcap,
        )
        return TruncatedLaurent(self.vars, coeffs, cert, self.direction,
                                _trusted=True)

    # -- substitutions -------------------------------------------------------

    def subst_exp(self, var: str, base_var: str, zvar: str,
                  z_order: int) -> "TruncatedLaurent":
        """Substitute var := base_var * exp(zvar), truncating at z_order.

        Each monomial var**n contributes base_var**n * sum_j n^j/j! zvar**j.
        The source table must have jointly lower-bounded support.
        """
        if var not in self.vars or base_var not in self.vars or var == base_var:
            raise SeriesError(f"bad substitution {var} -> {base_var}*e^{zvar}")
        if len(self.vars) != 2:
            raise SeriesError("exponential substitution expects two variables")
        i = self.vars.index(var)
        b = 1 - i
        c = self.cert
        if not c.entire:
            if c.suplo[i] == NEG_INF or c.suplo[b] == NEG_INF:
                raise SeriesError(
                    "substitution requires jointly lower-bounded support")
            if any(f != NEG_INF for f in c.floors):
                raise SeriesError(
                    "substitution source must be certified down to its "
                    "support bound")
        factorials = [1]
        for j in range(1, z_order + 1):
            factorials.append(factorials[-1] * j)
        coeffs: dict[tuple[int, int], Any] = {}
        for e, v in self.coeffs.items():
            n = e[i]
            base_e = e[b] + n
            npow = 1
            for j in range(z_order + 1):
                w = Scalar.from_fraction(Fraction(npow, factorials[j]))
                if w:
                    key = (base_e, j)
                    term = w * v
                    s = coeffs.get(key)
                    s = term if s is None else s + term
                    if s:
                        coeffs[key] = s
                    else:
                        coeffs.pop(key, None)
                npow *= n
        out_vars = (base_var, zvar)
        if c.entire:
            supp = [e[b] + e[i] for e in self.coeffs] or [POS_INF]
            cert = Cert(False, (min(supp), 0), (NEG_INF, NEG_INF),
                        (POS_INF, z_order), (min(supp), POS_INF), POS_INF)
        else:
            cap = min(_cap_add(c.caps[i], c.suplo[b]),
                      _cap_add(c.caps[b], c.suplo[i]))
            cert = Cert(False, (c.suplo[i] + c.suplo[b], 0),
                        (NEG_INF, NEG_INF), (cap, z_order),
                        (c.suplo[i] + c.suplo[b], POS_INF), POS_INF)
        return TruncatedLaurent(out_vars, coeffs, cert, out_vars)

    def subst_shift(self, var: str, base_var: str, zvar: str,
                    z_order: int) -> "TruncatedLaurent":
        """Substitute var := base_var + zvar, expanding in powers of zvar."""
        if var not in self.vars or base_var not in self.vars or var == base_var:
            raise SeriesError(f"bad substitution {var} -> {base_var}+{zvar}")
        if len(self.vars) != 2:
            raise SeriesError("shift substitution expects two variables")
        i = self.vars.index(var)
        b = 1 - i
        c = self.cert
        if not c.entire:
            if c.suplo[i] == NEG_INF or c.suplo[b] == NEG_INF:
                raise SeriesError(
                    "substitution requires jointly lower-bounded support")
            if any(f != NEG_INF for f in c.floors):
                raise SeriesError(
                    "substitution source must be certified down to its "
                    "support bound")
        coeffs: dict[tuple[int, int], Any] = {}
        for e, v in self.coeffs.items():
            n = e[i]
            for j in range(z_order + 1):
                w = Scalar.from_fraction(_gbinom(n, j))
                if w:
                    key = (e[b] + n - j, j)
                    term = w * v
                    s = coeffs.get(key)
                    s = term if s is None else s + term
                    if s:
                        coeffs[key] = s
                    else:
                        coeffs.pop(key, None)
        out_vars = (base_var, zvar)
        if c.entire:
            neg = [e[i] for e in self.coeffs if e[i] < 0]
            if not neg:
                cert = Cert(False,
                            (min((e[b] + e[i] for e in self.coeffs),
                                 default=POS_INF), 0),
                            (NEG_INF, NEG_INF), (POS_INF, z_order),
                            (NEG_INF, POS_INF), POS_INF)
            else:
                tot = [sum(e) for e in self.coeffs]
                cert = Cert(False, (NEG_INF, 0), (NEG_INF, NEG_INF),
                            (POS_INF, z_order), (min(tot), max(tot)), POS_INF)
        else:
            tband = min(_cap_add(c.caps[i], c.suplo[b]),
                        _cap_add(c.caps[b], c.suplo[i]))
            cert = Cert(False, (NEG_INF, 0), (NEG_INF, NEG_INF),
                        (POS_INF, z_order), c.band, tband)
        return TruncatedLaurent(out_vars, coeffs, cert, out_vars)

    # -- display -------------------------------------------------------------

    def __repr__(self) -> str:
        n = len(self.coeffs)
        return (f"<TruncatedLaurent {'/'.join(self.vars)}"
                f"{' dir=' + '>'.join(self.direction) if self.direction else ''}"
                f" terms={n}>")

    def format_terms(self, limit: int = 12) -> str:
        items = sorted(self.coeffs.items())[:limit]
        parts = []
        for e, c in items:
            mono = "*".join(
                f"{v}^{k}" if k != 1 else v
                for v, k in zip(self.vars, e) if k
            ) or "1"
            parts.append(f"({c})*{mono}")
        more = len(self.coeffs) - len(items)
        return " + ".join(parts) + (f" + ... [{more} more]" if more > 0 else "")


def _gbinom(n: int, j: int) -> Fraction:
    """Generalized binomial coefficient C(n, j) for integer n, j >= 0."""
    num = 1
    for t in range(j):
        num *= n - t
    return Fraction(num, _fact(j))


def _fact(j: int) -> int:
    out = 1
    for t in range(2, j + 1):
        out *= t
    return out


def _certified(c: Cert, e: tuple[int, ...]) -> bool:
    if c.entire:
        return True
    for x, s in zip(e, c.suplo):
        if s != NEG_INF and x < s:
            return True
    t = sum(e)
    if t < c.band[0] or t > c.band[1]:
        return True
    if t > c.bandcap:
        return False
    for x, f, cap in zip(e, c.floors, c.caps):
        if x < f or x > cap:
            return False
    return True


def _add_cert(a: Cert, b: Cert) -> Cert:
    if a.entire and b.entire:
        return a
    return Cert(
        False,
        tuple(min(x, y) for x, y in zip(a.suplo, b.suplo)),
        tuple(max(x, y) for x, y in zip(a.floors, b.floors)),
        tuple(min(x, y) for x, y in zip(a.caps, b.caps)),
        (min(a.band[0], b.band[0]), max(a.band[1], b.band[1])),
        min(a.bandcap, b.bandcap),
    )


def _support_stats(t: TruncatedLaurent):
    n = len(t.vars)
    mins = [POS_INF] * n
    maxs = [NEG_INF] * n
    blo, bhi = POS_INF, NEG_INF
    for e in t.coeffs:
        for i, x in enumerate(e):
            mins[i] = min(mins[i], x)
            maxs[i] = max(maxs[i], x)
        s = sum(e)
        blo, bhi = min(blo, s), max(bhi, s)
    return mins, maxs, blo, bhi


def _tighten_entire(t: TruncatedLaurent) -> TruncatedLaurent:
    mins, _maxs, blo, _bhi = _support_stats(t)
    n = len(t.vars)
    cert = Cert(True, tuple(mins), (NEG_INF,) * n, (POS_INF,) * n,
                (blo, POS_INF), POS_INF)
    return TruncatedLaurent(t.vars, t.coeffs, cert, t.direction, _trusted=True)


def _mul_cert(ta: TruncatedLaurent, tb: TruncatedLaurent) -> Cert:
    a, b = ta.cert, tb.cert
    n = len(ta.vars)
    if a.entire and b.entire:
        return Cert.full(n)
    if a.entire or b.entire:
        if b.entire:
            ta, tb = tb, ta
            a, b = b, a
        # ta entire with finite support; tb partial
        mins, maxs, blo, bhi = _support_stats(ta)
        if mins[0] == POS_INF:  # zero polynomial
            return Cert.full(n)
        return Cert(
            False,
            tuple(_lo_add(s, m) for s, m in zip(b.suplo, mins)),
            tuple(_floor_add(f, m) for f, m in zip(b.floors, maxs)),
            tuple(_cap_add(c, m) for c, m in zip(b.caps, mins)),
            (_lo_add(b.band[0], blo), _hi_add(b.band[1], bhi)),
            _cap_add(b.bandcap, blo),
        )
    if any(f != NEG_INF for f in a.floors + b.floors):
        # windowed objects without full knowledge below: only support
        # bounds survive
        return Cert.empty(
            n,
            tuple(_lo_add(x, y) for x, y in zip(a.suplo, b.suplo)),
            (_lo_add(a.band[0], b.band[0]), _hi_add(a.band[1], b.band[1])),
        )
    return Cert(
        False,
        tuple(_lo_add(x, y) for x, y in zip(a.suplo, b.suplo)),
        (NEG_INF,) * n,
        tuple(
            min(_cap_add(ca, sb), _cap_add(cb, sa))
            for ca, sb, cb, sa in zip(a.caps, b.suplo, b.caps, a.suplo)
        ),
        (_lo_add(a.band[0], b.band[0]), _hi_add(a.band[1], b.band[1])),
        min(_cap_add(a.bandcap, b.band[0]), _cap_add(b.bandcap, a.band[0])),
    )


# ---------------------------------------------------------------------------
# delta families
# ---------------------------------------------------------------------------

DELTA_KINDS = ("plain", "euler", "dshift")


def delta_family(kind: str, c: Scalar, window: Window) -> TruncatedLaurent:
    """A two-variable delta distribution restricted to a window.

    With variables (y, x) standing for (first, second) in the window:

    * ``plain``:  sum_k c^k x^k y^-k          (the substitution kernel at x/y)
    * ``euler``:  sum_k k c^k x^k y^-k        (x d/dx applied to plain)
    * ``dshift``: sum_k k c^(k-1) x^(k-1) y^(-k-1)   (d/dx of y^-1 * plain)
    """
    if kind not in DELTA_KINDS:
        raise SeriesError(f"unknown delta kind {kind!r}")
    if len(window.vars) != 2:
        raise SeriesError("delta families are two-variable objects")
    coeffs: dict[tuple[int, int], Scalar] = {}
    (ylo, xlo), (yhi, xhi) = window.lo, window.hi
    if kind == "plain":
        band = (0, 0)
        for k in range(max(xlo, -yhi), min(xhi, -ylo) + 1):
            v = c**k
            if v:
                coeffs[(-k, k)] = v
    elif kind == "euler":
        band = (0, 0)
        for k in range(max(xlo, -yhi), min(xhi, -ylo) + 1):
            v = Scalar.from_int(k) * c**k
            if v:
                coeffs[(-k, k)] = v
    else:  # dshift
        band = (-2, -2)
        for k in range(max(xlo + 1, -yhi - 1), min(xhi + 1, -ylo - 1) + 1):
            v = Scalar.from_int(k) * c ** (k - 1)
            if v:
                coeffs[(-k - 1, k - 1)] = v
    cert = Cert.box(window.lo, window.hi, band=band)
    return TruncatedLaurent(window.vars, coeffs, cert, None, _trusted=True)


# ---------------------------------------------------------------------------
# one-variable series utilities
# ---------------------------------------------------------------------------


def series_inverse(s: TruncatedLaurent, order: int) -> TruncatedLaurent:
    """Multiplicative inverse of a one-variable Laurent series.

    The input must be certified from its leading exponent n0 through
    n0 + order; the result is exact on [-n0, -n0 + order].
    """
    if len(s.vars) != 1:
        raise SeriesError("series_inverse expects a one-variable series")
    if not s.coeffs:
        raise ZeroDivisionError("cannot invert the zero series")
    n0 = min(e[0] for e in s.coeffs)
    c = s.cert
    if not c.entire:
        if c.suplo[0] == NEG_INF or c.floors[0] != NEG_INF:
            raise SeriesError("inverse requires certified leading support")
        if c.suplo[0] < n0:
            # certified support bound says smaller exponents could exist
            # only if they are certified-zero, which they are; n0 stands.
            pass
        if c.caps[0] != POS_INF and c.caps[0] < n0 + order:
            raise SeriesError(
                f"inverse to order {order} needs input certified through "
                f"exponent {n0 + order}, have {c.caps[0]}")
    lead = s.coeffs[(n0,)]
    inv_lead = Scalar.from_int(1) / lead
    b: dict[int, Scalar] = {0: inv_lead}
    for m in range(1, order + 1):
        acc = Scalar.from_int(0)
        for i in range(1, m + 1):
            si = s.coeffs.get((n0 + i,))
            if si and (m - i) in b:
                acc = acc + si * b[m - i]
        if acc:
            b[m] = -inv_lead * acc
    coeffs = {(-n0 + m,): v for m, v in b.items() if v}
    cert = Cert(False, (-n0,), (NEG_INF,), (-n0 + order,),
                (-n0, POS_INF), POS_INF)
    return TruncatedLaurent(s.vars, coeffs, cert, s.direction, _trusted=True)


# ---------------------------------------------------------------------------
# comparison
# ---------------------------------------------------------------------------


def compare_on(name: str, a: TruncatedLaurent, b: TruncatedLaurent,
               w: Window, require_full: bool = True,
               max_reported: int = 6) -> CheckReport:
    """Compare two tables coefficient-by-coefficient over a window.

    Only coefficients certified on both sides are decidable.  Any mismatch
    is a failure; an empty decidable region, or an incomplete one when
    ``require_full`` is set, is inconclusive (never a failure).
    """
    if a.vars != b.vars:
        raise SeriesError(f"variable mismatch: {a.vars} vs {b.vars}")
    a._align_window(w)
    checked = 0
    unchecked = 0
    failures: list[str] = []
    for e in w.exponents():
        if not (a.certified(e) and b.certified(e)):
            unchecked += 1
            continue
        checked += 1
        ca = a.coeffs.get(e)
        cb = b.coeffs.get(e)
        if ca is None and cb is None:
            continue
        if ca is None:
            diff_nonzero = bool(cb)
        elif cb is None:
            diff_nonzero = bool(ca)
        else:
            diff_nonzero = bool(ca - cb)
        if diff_nonzero:
            if len(failures) < max_reported:
                failures.append(
                    f"at {dict(zip(a.vars, e))}: {ca if ca is not None else 0}"
                    f" != {cb if cb is not None else 0}")
            else:
                failures.append("...")
                break
    if failures:
        status = FAIL
    elif checked == 0 or (require_full and unchecked):
        status = INCONCLUSIVE
    else:
        status = PASS
    notes = []
    if unchecked:
        notes.append(f"{unchecked} coefficients outside certified region")
    return CheckReport(name=name, status=status, checked=checked,
                       region=w.describe(), failures=failures, notes=notes)
