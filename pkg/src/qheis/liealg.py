"""Structure constants for the deformed Heisenberg-type mode algebras.

Every algebra in the catalog is spanned by mode generators together with one
central element, and every bracket of two mode generators is a scalar
multiple of that central element.  This module computes those scalars
exactly.

The catalog (keys of :data:`ALGEBRAS`):

* ``hq``     -- [b_m, b_n] = [m]_q d(m+n) c, with [m]_q the symmetric
  q-integer (q^(m-1) + q^(m-3) + ... + q^(1-m));
* ``htq``    -- [b_m, b_n] = m (1 - q^|m|) d(m+n) c;
* ``bhat``   -- shifted family b^(r)_m with [b^(r)_m, b^(s)_n] =
  <r, s> d(m+n+1) c, where the pairing <r, s> is 1/(q - q^-1) for
  r = s+1, its negative for r = s-1, and zero otherwise;
* ``bhatq``  -- shifted family whose generating-function bracket is

      [b^(r)(x1), b^(s)(x2)] =
          iota_{x2,x1} F_{r-s}(x1 - x2) c
          + (d(r-s) - d(r-s-1)) (d/dx2) x1^-1 delta(x2/x1) c,

  with F_n(z) = g(q^(n+1), z) - g(q^(n-1), z) and
  g(a, z) = a e^z / (1 - a e^z)^2; the mode constants are coefficient
  extractions from that expansion (d(k) is 1 at k = 0, else 0);
* ``graded`` -- the closed-form constants m d(r-s) +
  d(r-s+1) (|m|-m)/2 - d(r-s-1) (|m|+m)/2, times d(m+n).

For ``bhatq`` with mode m >= 0 the exponential tail contributes nothing
(its expansion has only nonnegative powers of x1), so the bracket reduces
to (d(r-s) - d(r-s-1)) m d(m+n) c and is computed in closed form.  For
m <= -1 the constant is read off a certified two-variable expansion of the
right side above, memoised by (r - s, m, n).  The helper series F_n is
exposed through :func:`f_coefficient`.

Levels are not fixed here: brackets return the coefficient of the central
element, and specialising the centre to a level happens in the module
acting on a vacuum space.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import comb

from .kernels import Factor, exp_pole_kernel, iota_expand, kernel_inv
from .report import FAIL, PASS, CheckReport
from .scalar import ONE, ZERO, Scalar, qint
from .series import TruncatedLaurent, Window, delta_family


class LieAlgebraError(ValueError):
    pass


def _d(a: int, b: int) -> int:
    return 1 if a == b else 0


# ---------------------------------------------------------------------------
# catalog


@dataclass(frozen=True)
class AlgebraSpec:
    """One algebra of the catalog.

    ``offset`` fixes the generating-field convention: the field attached to
    the mode family is sum_m b_m x^(-m-offset).  ``shifted`` records whether
    generators carry an integer family index r.
    """

    name: str
    offset: int
    shifted: bool
    summary: str


ALGEBRAS: dict[str, AlgebraSpec] = {
    "hq": AlgebraSpec("hq", 0, False,
                      "symmetric q-integer relations [m]_q d(m+n) c"),
    "htq": AlgebraSpec("htq", 0, False,
                       "relations m (1 - q^|m|) d(m+n) c"),
    "bhat": AlgebraSpec("bhat", 1, True,
                        "banded pairing <r, s> with mode sum -1"),
    "bhatq": AlgebraSpec("bhatq", 1, True,
                         "deformed relations with an exponential tail"),
    "graded": AlgebraSpec("graded", 1, True,
                          "sign-split closed-form constants at mode sum 0"),
}


def get_algebra(alg: str | AlgebraSpec) -> AlgebraSpec:
    if isinstance(alg, AlgebraSpec):
        return alg
    try:
        return ALGEBRAS[alg]
    except KeyError:
        known = ", ".join(sorted(ALGEBRAS))
        raise LieAlgebraError(f"unknown algebra {alg!r}; one of {known}") \
            from None


@dataclass(frozen=True)
class GeneratorSymbol:
    """A mode generator b^(shift)_mode of one algebra, or its central element."""

    algebra: str
    mode: int
    shift: int = 0
    central: bool = False

    def __post_init__(self):
        spec = get_algebra(self.algebra)
        if not spec.shifted and self.shift:
            raise LieAlgebraError(
                f"{spec.name} generators carry no family index")
        if self.central and (self.mode or self.shift):
            raise LieAlgebraError("the central element has no mode or index")

    @classmethod
    def central_element(cls, algebra: str) -> "GeneratorSymbol":
        return cls(algebra, 0, 0, central=True)

    def __str__(self) -> str:
        if self.central:
            return f"c[{self.algebra}]"
        spec = get_algebra(self.algebra)
        if spec.shifted:
            return f"b({self.shift})_{self.mode}[{self.algebra}]"
        return f"b_{self.mode}[{self.algebra}]"


# ---------------------------------------------------------------------------
# the exponential tail F_n


_G_CACHE: dict[tuple[int, int], TruncatedLaurent] = {}
_F_CACHE: dict[tuple[int, int], TruncatedLaurent] = {}


def _g_series(k: int, order: int) -> TruncatedLaurent:
    """Expansion of g(q^k, z) = q^k e^z / (1 - q^k e^z)^2 through z^order."""
    key = (k, order)
    if key not in _G_CACHE:
        w = Window.of(z=(-2, order))
        _G_CACHE[key] = iota_expand(exp_pole_kernel(Scalar.q_power(k)),
                                    ("z",), w)
    return _G_CACHE[key]


def f_series(n: int, order: int) -> TruncatedLaurent:
    """F_n(z) = g(q^(n+1), z) - g(q^(n-1), z) through z^order.

    g(a, z) has a double pole in z exactly when a = 1, so F_n starts at
    z^-2 for n = +-1 and at z^0 otherwise.
    """
    order = max(order, 0)
    order = -(-max(order, 6) // 8) * 8
    key = (n, order)
    if key not in _F_CACHE:
        _F_CACHE[key] = _g_series(n + 1, order) - _g_series(n - 1, order)
    return _F_CACHE[key]


def f_coefficient(n: int, j: int) -> Scalar:
    """The z^j coefficient of F_n(z); requires j >= -2.

    Pole coefficients appear only at j = -2 and only for n = +-1, where
    they are +1 (n = -1) and -1 (n = +1).
    """
    if j < -2:
        raise LieAlgebraError(f"F_n has no z^{j} term; j must be >= -2")
    return f_series(n, max(j, 0)).coeff((j,), ZERO)


# ---------------------------------------------------------------------------
# the two-variable expansion behind the bhatq constants


def _directed_binom_power(j: int, window: Window) -> TruncatedLaurent:
    """iota_{x2,x1} (x1 - x2)^j on a two-variable window."""
    if j >= 0:
        coeffs = {
            (k, j - k): Scalar.from_int((-1) ** (j - k) * comb(j, k))
            for k in range(j + 1)
        }
        return TruncatedLaurent.polynomial(window.vars, coeffs)
    pole = kernel_inv(Factor("binom", "x1", "x2", ONE), -j)
    return iota_expand(pole, ("x2", "x1"), window)


def bhatq_commutator_table(shift_diff: int, window: Window) -> TruncatedLaurent:
    """The full bhatq bracket expansion for b^(r)(x1), b^(s)(x2), r-s fixed.

    Returns iota_{x2,x1} F_{r-s}(x1 - x2) plus the derivative-delta part
    scaled by d(r-s) - d(r-s-1), restricted to the window; the coefficient
    of x1^(-m-1) x2^(-n-1) is the bracket constant for modes (m, n).
    """
    if window.vars != ("x1", "x2"):
        raise LieAlgebraError("the bracket expansion uses variables (x1, x2)")
    dd = _d(shift_diff, 0) - _d(shift_diff, 1)
    acc = delta_family("dshift", ONE, window).scale(Scalar.from_int(dd))
    jmax = window.hi[0] + window.hi[1]
    fs = f_series(shift_diff, max(jmax, 0))
    for j in range(-2, jmax + 1):
        cj = fs.coeff((j,), ZERO)
        if cj:
            acc = acc + _directed_binom_power(j, window).scale(cj)
    return acc.restrict(window)


_BRACKET_MEMO: dict[tuple[int, int, int], Scalar] = {}
_TABLE_CACHE: dict[tuple[int, int], TruncatedLaurent] = {}


def _bhatq_mode_constant(m: int, n: int, r: int, s: int) -> Scalar:
    diff = r - s
    key = (diff, m, n)
    if key not in _BRACKET_MEMO:
        e1, e2 = -m - 1, -n - 1
        radius = -(-max(4, abs(e1), abs(e2)) // 4) * 4
        tkey = (diff, radius)
        if tkey not in _TABLE_CACHE:
            _TABLE_CACHE[tkey] = bhatq_commutator_table(
                diff, Window.cube(("x1", "x2"), radius))
        _BRACKET_MEMO[key] = _TABLE_CACHE[tkey].coeff((e1, e2), ZERO)
    return _BRACKET_MEMO[key]


# ---------------------------------------------------------------------------
# brackets


def bracket_modes(alg: str | AlgebraSpec, m: int, n: int,
                  r: int = 0, s: int = 0) -> Scalar:
    """Coefficient of the central element in [b^(r)_m, b^(s)_n]."""
    spec = get_algebra(alg)
    if not spec.shifted and (r or s):
        raise LieAlgebraError(f"{spec.name} generators carry no family index")
    if spec.name == "hq":
        return qint(m) if m + n == 0 else ZERO
    if spec.name == "htq":
        if m + n:
            return ZERO
        return Scalar.from_int(m) * (ONE - Scalar.q_power(abs(m)))
    if spec.name == "bhat":
        return standard_pairing(r, s) if m + n + 1 == 0 else ZERO
    if spec.name == "graded":
        if m + n:
            return ZERO
        am = abs(m)
        co = (m * _d(r, s) + (am - m) // 2 * _d(r, s - 1)
              - (am + m) // 2 * _d(r, s + 1))
        return Scalar.from_int(co)
    if m >= 0:
        if m + n:
            return ZERO
        return Scalar.from_int((_d(r, s) - _d(r, s + 1)) * m)
    return _bhatq_mode_constant(m, n, r, s)


def bracket_constant(alg: str | AlgebraSpec, a: GeneratorSymbol,
                     b: GeneratorSymbol) -> Scalar:
    """Coefficient of the central element in [a, b]."""
    spec = get_algebra(alg)
    if a.algebra != spec.name or b.algebra != spec.name:
        raise LieAlgebraError(
            f"cross-algebra bracket: [{a}, {b}] in {spec.name}")
    if a.central or b.central:
        return ZERO
    return bracket_modes(spec, a.mode, b.mode, a.shift, b.shift)


def graded_leading_constant(r: int, s: int, m: int, n: int) -> Scalar:
    """The bhatq constant with filtration-raising contributions discarded.

    Under the filtration by minimal mode, the central element sits in
    degree zero, so a bracket [b^(r)_m, b^(s)_n] survives to the graded
    quotient in degree m + n only when m + n = 0.
    """
    if m + n:
        return ZERO
    return bracket_modes("bhatq", m, n, r, s)


# ---------------------------------------------------------------------------
# the pairing on the shifted loop family


def standard_pairing(r: int, s: int) -> Scalar:
    """<b^(r), b^(s)>: +-1/(q - q^-1) on the off-diagonals r = s +- 1."""
    co = _d(r, s + 1) - _d(r, s - 1)
    if not co:
        return ZERO
    return Scalar.from_int(co) / (Scalar.var_q() - Scalar.q_power(-1))


class BilinearForm:
    """A pairing on the shifted family, by default :func:`standard_pairing`."""

    def __init__(self, value_fn=None):
        self._value = value_fn or standard_pairing

    def value(self, r: int, s: int) -> Scalar:
        return self._value(r, s)

    def matrix(self, lo: int, hi: int) -> list[list[Scalar]]:
        rng = range(lo, hi + 1)
        return [[self._value(r, s) for s in rng] for r in rng]

    def check_nondegenerate(self, lo: int, hi: int) -> CheckReport:
        size = hi - lo + 1
        rank = matrix_rank(self.matrix(lo, hi))
        region = f"indices in [{lo}, {hi}]"
        if rank == size:
            return CheckReport("form-nondegenerate", PASS, checked=size * size,
                               region=region)
        return CheckReport("form-nondegenerate", FAIL, checked=size * size,
                           region=region,
                           failures=[f"rank {rank} < size {size}"])

    def check_skew(self, lo: int, hi: int) -> CheckReport:
        failures = []
        checked = 0
        for r in range(lo, hi + 1):
            for s in range(lo, hi + 1):
                checked += 1
                total = self._value(r, s) + self._value(s, r)
                if total:
                    failures.append(f"<{r},{s}> + <{s},{r}> = {total}")
        status = FAIL if failures else PASS
        return CheckReport("form-skew", status, checked=checked,
                           region=f"indices in [{lo}, {hi}]",
                           failures=failures)


def matrix_rank(rows: list[list[Scalar]]) -> int:
    """Rank over the exact scalar field, by Gaussian elimination."""
    rows = [list(r) for r in rows]
    if not rows:
        return 0
    rank = 0
    for col in range(len(rows[0])):
        piv = next((i for i in range(rank, len(rows)) if rows[i][col]), None)
        if piv is None:
            continue
        rows[rank], rows[piv] = rows[piv], rows[rank]
        inv = ONE / rows[rank][col]
        for i in range(rank + 1, len(rows)):
            if rows[i][col]:
                f = rows[i][col] * inv
                rows[i] = [a - f * b for a, b in zip(rows[i], rows[rank])]
        rank += 1
    return rank


# ---------------------------------------------------------------------------
# structural checks


def _shift_pairs(spec: AlgebraSpec, r_range):
    if not spec.shifted:
        return [0]
    if r_range is None:
        raise LieAlgebraError(f"{spec.name} needs a family-index range")
    return range(r_range[0], r_range[1] + 1)


def check_skew_symmetry(alg: str | AlgebraSpec, *, m_range,
                        r_range=None, bracket=None) -> CheckReport:
    """Verify [a, b] = -[b, a] for every mode pair in the given ranges.

    ``bracket`` may replace the catalog bracket (same signature as
    :func:`bracket_modes` without the algebra argument) so that deliberately
    broken variants register as failures.
    """
    spec = get_algebra(alg)
    fn = bracket or (lambda m, n, r, s: bracket_modes(spec, m, n, r, s))
    shifts = _shift_pairs(spec, r_range)
    failures = []
    checked = 0
    for r in shifts:
        for s in shifts:
            for m in range(m_range[0], m_range[1] + 1):
                for n in range(m_range[0], m_range[1] + 1):
                    checked += 1
                    total = fn(m, n, r, s) + fn(n, m, s, r)
                    if total:
                        failures.append(
                            f"(r={r}, s={s}, m={m}, n={n}): "
                            f"[a,b] + [b,a] = {total}")
    region = f"m, n in [{m_range[0]}, {m_range[1]}]"
    if spec.shifted:
        region += f"; r, s in [{r_range[0]}, {r_range[1]}]"
    status = FAIL if failures else PASS
    return CheckReport(f"{spec.name}-skew-symmetry", status, checked=checked,
                       region=region, failures=failures[:12])


def verify_shift_invariance(alg: str | AlgebraSpec, k: int, *, m_range,
                            r_range, bracket=None) -> CheckReport:
    """Verify the brackets are unchanged when both family indices move by k."""
    spec = get_algebra(alg)
    if not spec.shifted:
        raise LieAlgebraError(f"{spec.name} generators carry no family index")
    fn = bracket or (lambda m, n, r, s: bracket_modes(spec, m, n, r, s))
    failures = []
    checked = 0
    for r in range(r_range[0], r_range[1] + 1):
        for s in range(r_range[0], r_range[1] + 1):
            for m in range(m_range[0], m_range[1] + 1):
                for n in range(m_range[0], m_range[1] + 1):
                    checked += 1
                    diff = fn(m, n, r + k, s + k) - fn(m, n, r, s)
                    if diff:
                        failures.append(
                            f"(r={r}, s={s}, m={m}, n={n}): "
                            f"shift by {k} changes bracket by {diff}")
    status = FAIL if failures else PASS
    return CheckReport(f"{spec.name}-shift-invariance", status,
                       checked=checked,
                       region=(f"k={k}; m, n in [{m_range[0]}, {m_range[1]}]; "
                               f"r, s in [{r_range[0]}, {r_range[1]}]"),
                       failures=failures[:12])
