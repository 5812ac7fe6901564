"""Exact scalar arithmetic over the field Q(q, l).

Scalars are quotients num/den of integer-coefficient polynomials in the
deformation parameter ``q`` and the level parameter ``l``.  Negative powers
of ``q`` are cleared into the denominator, so a Laurent monomial like
``q**-3`` is stored as ``1/q^3``.

Canonical form (enforced by the constructor):

* ``den`` is nonzero;
* ``gcd(num, den)`` is ``1`` in ``Z[q, l]`` (including integer content);
* the leading coefficient of ``den`` under lexicographic monomial order
  (``q`` before ``l``) is positive.

Equal values therefore have identical representations, and ``==`` / ``hash``
are structural.
"""

from __future__ import annotations

from fractions import Fraction
from math import gcd as _int_gcd

# A polynomial is a dict mapping (q_exponent, l_exponent) -> nonzero int.
Poly = dict[tuple[int, int], int]

_ZERO: Poly = {}
_ONE: Poly = {(0, 0): 1}


class ScalarError(ArithmeticError):
    pass


class EvaluationError(ScalarError):
    """Raised when a substitution makes a denominator vanish."""


# ---------------------------------------------------------------------------
# polynomial helpers (internal)
# ---------------------------------------------------------------------------


def _padd(a: Poly, b: Poly) -> Poly:
    out = dict(a)
    for m, c in b.items():
        s = out.get(m, 0) + c
        if s:
            out[m] = s
        else:
            out.pop(m, None)
    return out


def _pneg(a: Poly) -> Poly:
    return {m: -c for m, c in a.items()}


def _pmul(a: Poly, b: Poly) -> Poly:
    if not a or not b:
        return {}
    out: Poly = {}
    for (ea, la), ca in a.items():
        for (eb, lb), cb in b.items():
            m = (ea + eb, la + lb)
            s = out.get(m, 0) + ca * cb
            if s:
                out[m] = s
            else:
                out.pop(m, None)
    return out


def _pscale(a: Poly, k: int) -> Poly:
    if k == 0:
        return {}
    return {m: c * k for m, c in a.items()}


def _pshift(a: Poly, dq: int, dl: int) -> Poly:
    return {(eq + dq, el + dl): c for (eq, el), c in a.items()}


def _lead(a: Poly) -> tuple[tuple[int, int], int]:
    """Leading (monomial, coefficient) under lex order with q before l."""
    m = max(a)
    return m, a[m]


def _content(a: Poly) -> int:
    g = 0
    for c in a.values():
        g = _int_gcd(g, abs(c))
    return g


def _pdiv_exact(a: Poly, g: Poly) -> Poly:
    """Exact division a / g by lex long division.  Raises if not divisible."""
    if not g:
        raise ZeroDivisionError("polynomial division by zero")
    if not a:
        return {}
    quot: Poly = {}
    rem = dict(a)
    (gq, gl), gc = _lead(g)
    while rem:
        (rq, rl), rc = _lead(rem)
        if rq < gq or rl < gl or rc % gc != 0:
            raise ScalarError("inexact polynomial division")
        t = ((rq - gq, rl - gl), rc // gc)
        quot[t[0]] = t[1]
        rem = _padd(rem, _pneg(_pmul({t[0]: t[1]}, g)))
    return quot


# -- univariate (in q) gcd --------------------------------------------------


def _uq_to_list(a: Poly) -> list[int]:
    d = max(eq for (eq, _l) in a)
    out = [0] * (d + 1)
    for (eq, _l), c in a.items():
        out[eq] = c
    return out


def _uq_from_list(cs: list[int]) -> Poly:
    return {(i, 0): c for i, c in enumerate(cs) if c}


def _sign_norm(a: Poly) -> Poly:
    return _pneg(a) if a and _lead(a)[1] < 0 else dict(a)


def _list_primitive(cs: list[int]) -> list[int]:
    g = 0
    for c in cs:
        g = _int_gcd(g, abs(c))
    if g == 0:
        return cs
    if cs[-1] < 0:
        g = -g
    return [c // g for c in cs]


def _uq_prem(a: list[int], b: list[int]) -> list[int]:
    """Pseudo-remainder of univariate integer polynomials (lists)."""
    db = len(b) - 1
    lb = b[-1]
    r = list(a)
    while True:
        while r and r[-1] == 0:
            r.pop()
        if len(r) - 1 < db or not r:
            return r
        coef = r[-1]
        shift = len(r) - 1 - db
        r = [lb * c for c in r]
        for i, bc in enumerate(b):
            r[shift + i] -= coef * bc
        r.pop()


_PROBE_P = (1 << 31) - 1


def _modp_coprime(a: list[int], b: list[int], p: int) -> bool:
    """True when the mod-p images certify a constant gcd over the rationals.

    Sound because a nonconstant gcd keeps its degree mod p whenever p
    divides neither leading coefficient; a failed precondition just means
    "no certificate", never a wrong answer.
    """
    a = [c % p for c in a]
    b = [c % p for c in b]
    if not a[-1] or not b[-1]:
        return False
    while b:
        inv = pow(b[-1], -1, p)
        db = len(b) - 1
        r = a
        while len(r) > db:
            if r[-1]:
                coef = r[-1] * inv % p
                shift = len(r) - 1 - db
                for i, bc in enumerate(b):
                    r[shift + i] = (r[shift + i] - coef * bc) % p
            r.pop()
        while r and not r[-1]:
            r.pop()
        a, b = b, r
    return len(a) == 1


def _uq_gcd(a: Poly, b: Poly) -> Poly:
    """gcd in Z[q] of two polynomials with zero l-degree (primitive PRS)."""
    if not a:
        return _sign_norm(b)
    if not b:
        return _sign_norm(a)
    ca, cb = _content(a), _content(b)
    A = _list_primitive(_uq_to_list(a))
    B = _list_primitive(_uq_to_list(b))
    if len(A) < len(B):
        A, B = B, A
    if len(B) > 1 and _modp_coprime(A, B, _PROBE_P):
        return {(0, 0): _int_gcd(ca, cb)}
    while any(B):
        A, B = B, _list_primitive(_uq_prem(A, B))
    A = _list_primitive(A)
    return _pscale(_uq_from_list(A), _int_gcd(ca, cb))


# -- multivariate gcd via recursion in l ------------------------------------


def _to_l_rec(a: Poly) -> dict[int, Poly]:
    out: dict[int, Poly] = {}
    for (eq, el), c in a.items():
        out.setdefault(el, {})[(eq, 0)] = c
    return out


def _from_l_rec(a: dict[int, Poly]) -> Poly:
    out: Poly = {}
    for el, qp in a.items():
        for (eq, _z), c in qp.items():
            out[(eq, el)] = c
    return out


def _l_content(a: dict[int, Poly]) -> Poly:
    g: Poly = {}
    for qp in a.values():
        g = _uq_gcd(g, qp)
    return g


def _l_divide(a: dict[int, Poly], d: Poly) -> dict[int, Poly]:
    return {el: _pdiv_exact(qp, d) for el, qp in a.items()}


def _l_prem(a: dict[int, Poly], b: dict[int, Poly]) -> dict[int, Poly]:
    """Pseudo-remainder of a by b with respect to l."""
    da, db = max(a), max(b)
    lb = b[db]
    r = a
    while r and max(r) >= db:
        dr = max(r)
        lr = r[dr]
        # r := lb*r - lr * l^(dr-db) * b
        nr: dict[int, Poly] = {}
        for el, qp in r.items():
            nr[el] = _pmul(qp, lb)
        for el, qp in b.items():
            m = el + dr - db
            nr[m] = _padd(nr.get(m, {}), _pneg(_pmul(qp, lr)))
        r = {el: qp for el, qp in nr.items() if qp}
    return r


def _pgcd(a: Poly, b: Poly) -> Poly:
    """gcd in Z[q, l], primitive with positive leading coefficient."""
    if not a:
        return _sign_norm(b)
    if not b:
        return _sign_norm(a)
    la = _to_l_rec(a)
    lb = _to_l_rec(b)
    if max(la) == 0 and max(lb) == 0:
        return _uq_gcd(a, b)
    ca, cb = _l_content(la), _l_content(lb)
    pa, pb = _l_divide(la, ca), _l_divide(lb, cb)
    while pb:
        pa, pb = pb, _l_prem(pa, pb)
    g = _l_divide(pa, _l_content(pa))
    cg = _uq_gcd(ca, cb)
    out = _from_l_rec({el: _pmul(qp, cg) for el, qp in g.items()})
    return _sign_norm(out)


def _pstr(a: Poly) -> str:
    if not a:
        return "0"
    parts: list[str] = []
    for (eq, el) in sorted(a, reverse=True):
        c = a[(eq, el)]
        atoms: list[str] = []
        if eq == 1:
            atoms.append("q")
        elif eq:
            atoms.append(f"q^{eq}")
        if el == 1:
            atoms.append("l")
        elif el:
            atoms.append(f"l^{el}")
        if not atoms or abs(c) != 1:
            atoms.insert(0, str(abs(c)))
        term = "*".join(atoms)
        if not parts:
            parts.append(term if c > 0 else "-" + term)
        else:
            parts.append(("+ " if c > 0 else "- ") + term)
    return " ".join(parts)


# ---------------------------------------------------------------------------
# Scalar
# ---------------------------------------------------------------------------


class Scalar:
    """An element of Q(q, l) in canonical form.  Immutable."""

    __slots__ = ("num", "den", "_hash")

    def __init__(self, num: Poly, den: Poly, _canonical: bool = False):
        if not den:
            raise ZeroDivisionError("zero denominator")
        if not _canonical:
            num, den = _reduce(num, den)
        self.num = num
        self.den = den
        self._hash: int | None = None

    # -- constructors -------------------------------------------------------

    @classmethod
    def from_int(cls, n: int) -> "Scalar":
        return cls({(0, 0): n} if n else {}, dict(_ONE), _canonical=True)

    @classmethod
    def from_fraction(cls, f: Fraction | int) -> "Scalar":
        f = Fraction(f)
        num = {(0, 0): f.numerator} if f.numerator else {}
        return cls(num, {(0, 0): f.denominator}, _canonical=True)

    @classmethod
    def q_power(cls, k: int) -> "Scalar":
        if k >= 0:
            return cls({(k, 0): 1}, dict(_ONE), _canonical=True)
        return cls(dict(_ONE), {(-k, 0): 1}, _canonical=True)

    @classmethod
    def var_q(cls) -> "Scalar":
        return cls.q_power(1)

    @classmethod
    def var_l(cls) -> "Scalar":
        return cls({(0, 1): 1}, dict(_ONE), _canonical=True)

    # -- predicates ---------------------------------------------------------

    def is_zero(self) -> bool:
        return not self.num

    def __bool__(self) -> bool:
        return bool(self.num)

    def is_one(self) -> bool:
        return self.num == _ONE and self.den == _ONE

    # -- arithmetic ---------------------------------------------------------

    def __add__(self, other: "Scalar") -> "Scalar":
        if not isinstance(other, Scalar):
            return NotImplemented
        if not self.num:
            return other
        if not other.num:
            return self
        if self.den == other.den:
            return Scalar(_padd(self.num, other.num), self.den)
        num = _padd(_pmul(self.num, other.den), _pmul(other.num, self.den))
        return Scalar(num, _pmul(self.den, other.den))

    def __sub__(self, other: "Scalar") -> "Scalar":
        return self.__add__(-other)

    def __neg__(self) -> "Scalar":
        return Scalar(_pneg(self.num), self.den, _canonical=True)

    def __mul__(self, other):
        if isinstance(other, int):
            other = Scalar.from_int(other)
        if not isinstance(other, Scalar):
            return NotImplemented
        if not self.num or not other.num:
            return _S_ZERO
        return Scalar(_pmul(self.num, other.num), _pmul(self.den, other.den))

    __rmul__ = __mul__

    def __truediv__(self, other: "Scalar") -> "Scalar":
        if isinstance(other, int):
            other = Scalar.from_int(other)
        if not isinstance(other, Scalar):
            return NotImplemented
        if not other.num:
            raise ZeroDivisionError("scalar division by zero")
        if not self.num:
            return _S_ZERO
        return Scalar(_pmul(self.num, other.den), _pmul(self.den, other.num))

    def __pow__(self, k: int) -> "Scalar":
        if k < 0:
            return (_S_ONE / self) ** (-k)
        out = _S_ONE
        base = self
        while k:
            if k & 1:
                out = out * base
            base = base * base
            k >>= 1
        return out

    # -- structure ----------------------------------------------------------

    def __eq__(self, other) -> bool:
        if isinstance(other, int):
            other = Scalar.from_int(other)
        if not isinstance(other, Scalar):
            return NotImplemented
        return self.num == other.num and self.den == other.den

    def __hash__(self) -> int:
        if self._hash is None:
            object.__setattr__(
                self,
                "_hash",
                hash((frozenset(self.num.items()), frozenset(self.den.items()))),
            )
        return self._hash

    def __setattr__(self, name, value):
        if name in ("num", "den", "_hash") and not hasattr(self, "_hash"):
            object.__setattr__(self, name, value)
        elif name == "_hash":
            object.__setattr__(self, name, value)
        else:
            raise AttributeError("Scalar is immutable")

    # -- evaluation ---------------------------------------------------------

    def evaluate(self, point: "RationalPoint") -> Fraction:
        den = _peval(self.den, point.q0, point.l0)
        if den == 0:
            raise EvaluationError(
                f"denominator ({_pstr(self.den)}) vanishes at "
                f"q={point.q0}, l={point.l0}"
            )
        return _peval(self.num, point.q0, point.l0) / den

    # -- display ------------------------------------------------------------

    def __str__(self) -> str:
        ns = _pstr(self.num)
        if self.den == _ONE:
            return ns
        if len(self.num) > 1:
            ns = f"({ns})"
        ds = _pstr(self.den)
        (dq, dl), dc = _lead(self.den)
        if len(self.den) > 1 or (dc != 1 and (dq or dl)):
            ds = f"({ds})"
        return f"{ns}/{ds}"

    def __repr__(self) -> str:
        return f"Scalar({self})"


_REDUCE_CACHE: dict[tuple[frozenset, frozenset], tuple[Poly, Poly]] = {}


def _reduce(num: Poly, den: Poly) -> tuple[Poly, Poly]:
    if not num:
        return {}, dict(_ONE)
    # fast path: monomial denominator
    if len(den) == 1:
        (dq, dl), dc = _lead(den)
        mq = min(min(eq for (eq, _l) in num), dq)
        ml = min(min(el for (_q, el) in num), dl)
        g = _int_gcd(_content(num), abs(dc))
        if dc < 0:
            g = -g
        num = {(eq - mq, el - ml): c // g for (eq, el), c in num.items()}
        return num, {(dq - mq, dl - ml): dc // g}
    key = (frozenset(num.items()), frozenset(den.items()))
    hit = _REDUCE_CACHE.get(key)
    if hit is not None:
        return hit
    g = _pgcd(num, den)
    rnum = _pdiv_exact(num, g)
    rden = _pdiv_exact(den, g)
    if _lead(rden)[1] < 0:
        rnum, rden = _pneg(rnum), _pneg(rden)
    if len(_REDUCE_CACHE) > 200_000:
        _REDUCE_CACHE.clear()
    _REDUCE_CACHE[key] = (rnum, rden)
    return rnum, rden


def _peval(a: Poly, q0: Fraction, l0: Fraction) -> Fraction:
    out = Fraction(0)
    for (eq, el), c in a.items():
        out += c * q0**eq * l0**el
    return out


_S_ZERO = Scalar.from_int(0)
_S_ONE = Scalar.from_int(1)

ZERO = _S_ZERO
ONE = _S_ONE
Q = Scalar.var_q()
L = Scalar.var_l()


def qint(m: int) -> Scalar:
    """The symmetric q-integer (q^m - q^-m)/(q - q^-1).

    Antisymmetric in m; qint(0) == 0, qint(1) == 1, qint(2) == q + 1/q.
    """
    if m == 0:
        return _S_ZERO
    if m < 0:
        return -qint(-m)
    num = {(2 * i, 0): 1 for i in range(m)}  # q^(m-1) + q^(m-3) + ... cleared by q^(m-1)
    return Scalar(num, {(m - 1, 0): 1})


class RationalPoint:
    """A rational evaluation point (q0, l0) with q0 outside {0, 1, -1}.

    The excluded values collapse q-integer denominators, so guarded out.
    """

    __slots__ = ("q0", "l0")

    def __init__(self, q0, l0):
        q0 = Fraction(q0)
        l0 = Fraction(l0)
        if q0 in (Fraction(0), Fraction(1), Fraction(-1)):
            raise ValueError(f"q0 must avoid 0, 1, -1; got {q0}")
        object.__setattr__(self, "q0", q0)
        object.__setattr__(self, "l0", l0)

    def __setattr__(self, name, value):
        raise AttributeError("RationalPoint is immutable")

    def __repr__(self) -> str:
        return f"RationalPoint(q0={self.q0}, l0={self.l0})"

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, RationalPoint)
            and self.q0 == other.q0
            and self.l0 == other.l0
        )

    def __hash__(self) -> int:
        return hash((self.q0, self.l0))
