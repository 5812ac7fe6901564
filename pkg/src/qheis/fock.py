"""Vacuum modules over the mode algebras, and the polynomial realization.

Each algebra of the catalog acts on a Fock space induced from a one
dimensional vacuum: annihilation modes (m >= 0, with the mode-0 generator
of the unshifted algebras acting by a configurable central scalar) kill
the vacuum, the centre acts by the level, and the PBW monomials in
creation modes (m <= -1) form a basis.  Normal ordering is exact: every
transposition inserts the central bracket scalar, with the centre already
specialised to the level.

In the deformed shifted algebra even two creation modes can bracket to a
nonzero central scalar, so normal ordering inserts corrections among
creations as well; the sorted monomials remain a basis and the correction
terms always have strictly shorter words.

The polynomial realization acts on C[x_n^(r) | n >= 1, r integer]:
mode 0 acts as zero, mode -n multiplies by x_n^(r), and mode n acts as
l n (d/dx_n^(r) - d/dx_n^(r-1)).  ``reduce_to_vacuum`` implements the
descent that drives any nonzero polynomial to a nonzero multiple of 1 by
annihilators alone, which is the constructive heart of irreducibility at
nonzero level.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .liealg import (
    AlgebraSpec,
    GeneratorSymbol,
    LieAlgebraError,
    bracket_modes,
    get_algebra,
    graded_leading_constant,
)
from .report import FAIL, PASS, CheckReport
from .scalar import L, ONE, ZERO, Scalar
from .series import TruncatedLaurent, Window


class FockError(ValueError):
    pass


# a PBW monomial is a tuple of (mode, shift) pairs, sorted ascending;
# only creation modes (mode <= -1) appear
PBWMonomial = tuple[tuple[int, int], ...]


@dataclass(frozen=True)
class FockModule:
    """Ambient data of a vacuum module: algebra, level, mode-0 scalar.

    ``zero_mode`` is the scalar by which the central mode-0 generator of
    the unshifted algebras acts; it is a free parameter of the
    polarization and defaults to zero.
    """

    algebra: str
    level: Scalar = L
    zero_mode: Scalar = ZERO

    def __post_init__(self):
        get_algebra(self.algebra)

    @property
    def spec(self) -> AlgebraSpec:
        return get_algebra(self.algebra)

    def vacuum(self) -> "FockVector":
        return FockVector(self, {(): ONE})

    def zero(self) -> "FockVector":
        return FockVector(self, {})

    def basis_vector(self, *gens: tuple[int, int]) -> "FockVector":
        """The PBW monomial on the given (mode, shift) creation pairs."""
        mono = tuple(sorted(gens))
        _check_monomial(self, mono)
        return FockVector(self, {mono: ONE})


def _check_monomial(module: FockModule, mono: PBWMonomial):
    shifted = module.spec.shifted
    for mode, shift in mono:
        if mode > -1:
            raise FockError(f"mode {mode} is not a creation mode")
        if shift and not shifted:
            raise FockError(f"{module.algebra} generators carry no family index")


class FockVector:
    """A finite combination of PBW monomials with exact coefficients."""

    __slots__ = ("module", "terms")

    def __init__(self, module: FockModule, terms: dict[PBWMonomial, Scalar]):
        self.module = module
        self.terms = {m: c for m, c in terms.items() if c}

    def __eq__(self, other) -> bool:
        return (isinstance(other, FockVector)
                and self.module == other.module
                and self.terms == other.terms)

    def __hash__(self):
        raise TypeError("FockVector is not hashable")

    def is_zero(self) -> bool:
        return not self.terms

    def __add__(self, other: "FockVector") -> "FockVector":
        if self.module != other.module:
            raise FockError("vectors live in different modules")
        out = dict(self.terms)
        for m, c in other.terms.items():
            out[m] = out.get(m, ZERO) + c
        return FockVector(self.module, out)

    def __sub__(self, other: "FockVector") -> "FockVector":
        return self + other.scale(-ONE)

    def scale(self, s: Scalar) -> "FockVector":
        return FockVector(self.module, {m: c * s for m, c in self.terms.items()})

    def coefficient(self, mono: PBWMonomial) -> Scalar:
        return self.terms.get(tuple(sorted(mono)), ZERO)

    def vacuum_component(self) -> Scalar:
        return self.terms.get((), ZERO)

    def degrees(self) -> set[int]:
        """Total degrees sum(-mode) of the monomials present."""
        return {sum(-m for m, _r in mono) for mono in self.terms}

    def word_lengths(self) -> set[int]:
        return {len(mono) for mono in self.terms}

    def __str__(self) -> str:
        if not self.terms:
            return "0"
        shifted = self.module.spec.shifted
        parts = []
        for mono in sorted(self.terms):
            c = self.terms[mono]
            word = " ".join(
                (f"b({r})_{m}" if shifted else f"b_{m}") for m, r in mono)
            word = f"{word} vac" if word else "vac"
            parts.append(f"({c}) {word}")
        return " + ".join(parts)

    __repr__ = __str__


def pair_vectors(bra: FockVector, ket: FockVector) -> Scalar:
    """Pairing in the monomial basis: sum of products of coefficients."""
    if bra.module != ket.module:
        raise FockError("vectors live in different modules")
    total = ZERO
    small, big = sorted((bra.terms, ket.terms), key=len)
    for m, c in small.items():
        other = big.get(m)
        if other is not None:
            total = total + c * other
    return total


# ---------------------------------------------------------------------------
# the action


def _vacuum_scalar(module: FockModule, mode: int) -> Scalar:
    if module.spec.offset == 0 and mode == 0:
        return module.zero_mode
    return ZERO


def apply_generator(g: GeneratorSymbol, v: FockVector) -> FockVector:
    """Act by a generator and return the PBW normal form of the result."""
    module = v.module
    spec = module.spec
    if g.algebra != spec.name:
        raise FockError(
            f"cannot act by a {g.algebra} generator on a {spec.name} module")
    if g.central:
        return v.scale(module.level)
    if not spec.shifted and g.shift:
        raise FockError(f"{spec.name} generators carry no family index")
    out: dict[PBWMonomial, Scalar] = {}
    if g.mode <= -1:
        for mono, c in v.terms.items():
            _insert_creation(module, mono, (g.mode, g.shift), c, out)
    else:
        for mono, c in v.terms.items():
            _contract_annihilator(module, mono, (g.mode, g.shift), c, out)
    return FockVector(module, out)


def _insert_creation(module: FockModule, mono: PBWMonomial,
                     g: tuple[int, int], scale: Scalar,
                     out: dict[PBWMonomial, Scalar]):
    """Walk g into its sorted slot, inserting central corrections."""
    alg = module.spec
    prefix: list[tuple[int, int]] = []
    rest = list(mono)
    while rest and rest[0] < g:
        h = rest[0]
        br = bracket_modes(alg, g[0], h[0], g[1], h[1])
        if br:
            corr = tuple(prefix + rest[1:])
            val = scale * br * module.level
            out[corr] = out.get(corr, ZERO) + val
        prefix.append(rest.pop(0))
    sorted_mono = tuple(prefix + [g] + rest)
    out[sorted_mono] = out.get(sorted_mono, ZERO) + scale


def _contract_annihilator(module: FockModule, mono: PBWMonomial,
                          g: tuple[int, int], scale: Scalar,
                          out: dict[PBWMonomial, Scalar]):
    """Commute g through the word; each contraction removes one creation."""
    alg = module.spec
    for i, h in enumerate(mono):
        br = bracket_modes(alg, g[0], h[0], g[1], h[1])
        if br:
            corr = mono[:i] + mono[i + 1:]
            val = scale * br * module.level
            out[corr] = out.get(corr, ZERO) + val
    z = _vacuum_scalar(module, g[0])
    if z:
        out[mono] = out.get(mono, ZERO) + scale * z


def apply_word(module: FockModule, word, v: FockVector) -> FockVector:
    """Act by a word of (mode, shift) pairs, rightmost factor first."""
    for mode, shift in reversed(list(word)):
        v = apply_generator(GeneratorSymbol(module.algebra, mode, shift), v)
    return v


def annihilation_bound(v: FockVector) -> int:
    """Least N such that every annihilator of mode >= N kills v.

    For the unshifted algebras a contraction needs mode sums to vanish, so
    the bound is one past the deepest creation mode; the loop-style pairing
    contracts at mode sum -1, lowering the bound by one.
    """
    spec = v.module.spec
    bound = 0
    if spec.offset == 0 and v.module.zero_mode:
        bound = 1
    for mono in v.terms:
        if not mono:
            continue
        depth = max(-m for m, _r in mono)
        bound = max(bound, depth if spec.name == "bhat" else depth + 1)
    return bound


# ---------------------------------------------------------------------------
# matrix elements of products of generating functions


@dataclass(frozen=True)
class FieldSlot:
    """One generating function in a matrix element.

    ``shift`` selects the family index (shifted algebras only) and
    ``scale`` rescales the variable: the field is evaluated at scale*x,
    which multiplies the x^e coefficient by scale^e.
    """

    shift: int = 0
    scale: Scalar = ONE


def two_point(bra: FockVector, slots, ket: FockVector,
              window: Window) -> TruncatedLaurent:
    """Matrix element of a product of generating functions, exactly.

    The i-th slot contributes the field sum_m b^(shift)_m (scale x_i)^(-m-offset)
    applied in written order to the ket.  Each exponent tuple of the window
    selects exactly one mode word, so every coefficient inside the window
    is exact.
    """
    if bra.module != ket.module:
        raise FockError("bra and ket live in different modules")
    slots = [s if isinstance(s, FieldSlot) else FieldSlot(*s) for s in slots]
    if len(slots) > 3:
        raise FockError("at most three fields are supported")
    if len(window.vars) != len(slots):
        raise FockError("window must have one variable per field")
    offset = bra.module.spec.offset
    alg = bra.module.algebra
    coeffs: dict[tuple[int, ...], Scalar] = {}
    for e in window.exponents():
        v = ket
        for ei, slot in zip(reversed(e), reversed(slots)):
            if v.is_zero():
                break
            v = apply_generator(
                GeneratorSymbol(alg, -ei - offset, slot.shift), v)
        val = pair_vectors(bra, v)
        if val:
            for ei, slot in zip(e, slots):
                if not slot.scale.is_one():
                    val = val * slot.scale ** ei
            coeffs[e] = val
    return TruncatedLaurent.polynomial(window.vars, coeffs).restrict(window)


# ---------------------------------------------------------------------------
# polynomial realization


# a polynomial monomial maps (n, r) -> exponent, stored sorted
PolyMonomial = tuple[tuple[tuple[int, int], int], ...]


class PolyState:
    """Sparse polynomial in the variables x_n^(r), n >= 1, r integer."""

    __slots__ = ("terms",)

    def __init__(self, terms: dict[PolyMonomial, Scalar]):
        self.terms = {m: c for m, c in terms.items() if c}

    @classmethod
    def one(cls) -> "PolyState":
        return cls({(): ONE})

    @classmethod
    def variable(cls, n: int, r: int) -> "PolyState":
        if n < 1:
            raise FockError("variable index n must be >= 1")
        return cls({(((n, r), 1),): ONE})

    def is_zero(self) -> bool:
        return not self.terms

    def __eq__(self, other) -> bool:
        return isinstance(other, PolyState) and self.terms == other.terms

    def __hash__(self):
        raise TypeError("PolyState is not hashable")

    def __add__(self, other: "PolyState") -> "PolyState":
        out = dict(self.terms)
        for m, c in other.terms.items():
            out[m] = out.get(m, ZERO) + c
        return PolyState(out)

    def __sub__(self, other: "PolyState") -> "PolyState":
        return self + other.scale(-ONE)

    def scale(self, s: Scalar) -> "PolyState":
        return PolyState({m: c * s for m, c in self.terms.items()})

    def __mul__(self, other: "PolyState") -> "PolyState":
        out: dict[PolyMonomial, Scalar] = {}
        for ma, ca in self.terms.items():
            for mb, cb in other.terms.items():
                exps = dict(ma)
                for v, k in mb:
                    exps[v] = exps.get(v, 0) + k
                key = tuple(sorted(exps.items()))
                out[key] = out.get(key, ZERO) + ca * cb
        return PolyState(out)

    def mul_variable(self, n: int, r: int) -> "PolyState":
        out = {}
        for m, c in self.terms.items():
            exps = dict(m)
            exps[(n, r)] = exps.get((n, r), 0) + 1
            out[tuple(sorted(exps.items()))] = c
        return PolyState(out)

    def derivative(self, n: int, r: int) -> "PolyState":
        out: dict[PolyMonomial, Scalar] = {}
        for m, c in self.terms.items():
            exps = dict(m)
            k = exps.get((n, r), 0)
            if not k:
                continue
            if k == 1:
                del exps[(n, r)]
            else:
                exps[(n, r)] = k - 1
            key = tuple(sorted(exps.items()))
            out[key] = out.get(key, ZERO) + c * Scalar.from_int(k)
        return PolyState(out)

    def degree(self) -> int:
        if not self.terms:
            raise FockError("the zero polynomial has no degree")
        return max(sum(k for _v, k in m) for m in self.terms)

    def __str__(self) -> str:
        if not self.terms:
            return "0"
        parts = []
        for m in sorted(self.terms):
            c = self.terms[m]
            word = " ".join(
                f"x({n},{r})" + (f"^{k}" if k > 1 else "")
                for (n, r), k in m)
            parts.append(f"({c}) {word}" if word else f"({c})")
        return " + ".join(parts)

    __repr__ = __str__


def poly_apply(r: int, m: int, p: PolyState, level: Scalar = L) -> PolyState:
    """Action of the graded mode (r, m) on a polynomial state.

    Mode 0 acts as zero, mode -n (n >= 1) multiplies by x_n^(r), and mode
    n acts as level*n*(d/dx_n^(r) - d/dx_n^(r-1)).
    """
    if m == 0:
        return PolyState({})
    if m < 0:
        return p.mul_variable(-m, r)
    diff = p.derivative(m, r) - p.derivative(m, r - 1)
    return diff.scale(level * Scalar.from_int(m))


def reduce_to_vacuum(p: PolyState, level: Scalar = L) \
        -> tuple[list[tuple[int, int]], Scalar]:
    """Drive a nonzero polynomial to a scalar by annihilators alone.

    Returns the trace of (r, n) mode applications and the final scalar.
    Each step picks the least family index r present, so the
    d/dx^(r-1) branch vanishes and the degree strictly drops.
    """
    if p.is_zero():
        raise FockError("cannot reduce the zero state")
    if not level:
        raise FockError("level-zero: reduction unavailable")
    trace: list[tuple[int, int]] = []
    while p.degree() > 0:
        r_min = min(r for m in p.terms for (_n, r), _k in m)
        n = next(n for m in p.terms for (n, r), _k in m if r == r_min)
        p = poly_apply(r_min, n, p, level)
        trace.append((r_min, n))
    return trace, p.terms[()]


def realization_bracket_check(r: int, s: int, m: int, n: int,
                              samples, level: Scalar = L) -> CheckReport:
    """Compare commutators of the polynomial action with the graded constants."""
    failures = []
    checked = 0
    expected = graded_leading_constant(r, s, m, n) * level
    for p in samples:
        checked += 1
        left = poly_apply(r, m, poly_apply(s, n, p, level), level)
        right = poly_apply(s, n, poly_apply(r, m, p, level), level)
        got = left - right
        want = p.scale(expected)
        if got != want:
            failures.append(
                f"(r={r}, s={s}, m={m}, n={n}) on {p}: got {got}, "
                f"wanted {want}")
    status = FAIL if failures else PASS
    return CheckReport("realization-bracket", status, checked=checked,
                       region=f"r={r}, s={s}, m={m}, n={n}",
                       failures=failures[:8])
