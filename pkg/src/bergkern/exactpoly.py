"""Exact bivariate polynomials over Q and rational functions with
``(1-x)^a (1-y)^b`` denominators.

Rationals are :class:`fractions.Fraction`. A :class:`BiPoly` is stored as a
canonical, lexicographically sorted tuple of ``((i, j), coeff)`` pairs with
no zero coefficients, so exact equality is structural equality.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import reduce
from numbers import Rational
from typing import Iterable, Mapping, Union

from .errors import PoleError

Rat = Fraction
RatLike = Union[int, Fraction, str, float]
Monomial = tuple[int, int]


def as_rat(value: RatLike) -> Fraction:
    """Convert ``value`` to a Fraction; floats convert exactly (binary value)."""
    if isinstance(value, Fraction):
        return value
    if isinstance(value, (int, Rational)):
        return Fraction(value)
    if isinstance(value, float):
        if not math.isfinite(value):
            raise ValueError(f"cannot convert {value!r} to a rational")
        return Fraction(value)
    if isinstance(value, str):
        return Fraction(value.strip())
    raise TypeError(f"cannot convert {type(value).__name__} to a rational")


def rat_str(value: Fraction) -> str:
    """Lossless ``p/q`` string (just ``p`` for integers)."""
    if value.denominator == 1:
        return str(value.numerator)
    return f"{value.numerator}/{value.denominator}"


def _exact_complex(v) -> tuple[Fraction, Fraction]:
    if isinstance(v, complex):
        return Fraction(v.real), Fraction(v.imag)
    return as_rat(v), Fraction(0)


class BiPoly:
    """Immutable polynomial in ``x`` and ``y`` with rational coefficients."""

    __slots__ = ("_terms", "_hash")

    def __init__(self, terms: Mapping[Monomial, RatLike] | Iterable[tuple[Monomial, RatLike]] = ()):
        items = terms.items() if isinstance(terms, Mapping) else terms
        acc: dict[Monomial, Fraction] = {}
        for (i, j), c in items:
            if i < 0 or j < 0:
                raise ValueError(f"negative exponent in monomial {(i, j)}")
            acc[(int(i), int(j))] = acc.get((int(i), int(j)), Fraction(0)) + as_rat(c)
        self._terms = tuple(sorted((m, c) for m, c in acc.items() if c != 0))
        self._hash = None

    # construction helpers
    @classmethod
    def const(cls, c: RatLike) -> BiPoly:
        return cls({(0, 0): c})

    @classmethod
    def x(cls) -> BiPoly:
        return cls({(1, 0): 1})

    @classmethod
    def y(cls) -> BiPoly:
        return cls({(0, 1): 1})

    @staticmethod
    def _coerce(other) -> BiPoly:
        if isinstance(other, BiPoly):
            return other
        return BiPoly.const(other)

    # queries
    @property
    def terms(self) -> tuple[tuple[Monomial, Fraction], ...]:
        return self._terms

    def as_dict(self) -> dict[Monomial, Fraction]:
        return dict(self._terms)

    def coeff(self, i: int, j: int) -> Fraction:
        for m, c in self._terms:
            if m == (i, j):
                return c
        return Fraction(0)

    def is_zero(self) -> bool:
        return not self._terms

    @property
    def degree_x(self) -> int:
        return max((i for (i, _), _ in self._terms), default=-1)

    @property
    def degree_y(self) -> int:
        return max((j for (_, j), _ in self._terms), default=-1)

    @property
    def total_degree(self) -> int:
        return max((i + j for (i, j), _ in self._terms), default=-1)

    # ring operations
    def __add__(self, other) -> BiPoly:
        other = self._coerce(other)
        return BiPoly(list(self._terms) + list(other._terms))

    __radd__ = __add__

    def __neg__(self) -> BiPoly:
        return BiPoly((m, -c) for m, c in self._terms)

    def __sub__(self, other) -> BiPoly:
        return self + (-self._coerce(other))

    def __rsub__(self, other) -> BiPoly:
        return self._coerce(other) - self

    def __mul__(self, other) -> BiPoly:
        if not isinstance(other, BiPoly):
            c = as_rat(other)
            return BiPoly((m, c * v) for m, v in self._terms)
        acc: dict[Monomial, Fraction] = {}
        for (i1, j1), c1 in self._terms:
            for (i2, j2), c2 in other._terms:
                key = (i1 + i2, j1 + j2)
                acc[key] = acc.get(key, Fraction(0)) + c1 * c2
        return BiPoly(acc)

    __rmul__ = __mul__

    def __pow__(self, k: int) -> BiPoly:
        if k < 0:
            raise ValueError("negative power of a polynomial")
        result = BiPoly.const(1)
        base = self
        while k:
            if k & 1:
                result = result * base
            base = base * base
            k >>= 1
        return result

    def __eq__(self, other) -> bool:
        if isinstance(other, BiPoly):
            return self._terms == other._terms
        if isinstance(other, (int, Fraction)):
            return self._terms == BiPoly.const(other)._terms
        return NotImplemented

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash(self._terms)
        return self._hash

    def __repr__(self) -> str:
        return f"BiPoly({self.to_str()})"

    # calculus and substitutions
    def diff(self, var: str) -> BiPoly:
        """Formal partial derivative with respect to ``"x"`` or ``"y"``."""
        if var in ("x", "X"):
            return BiPoly(((i - 1, j), c * i) for (i, j), c in self._terms if i > 0)
        if var in ("y", "Y"):
            return BiPoly(((i, j - 1), c * j) for (i, j), c in self._terms if j > 0)
        raise ValueError(f"unknown variable {var!r}")

    def swap(self) -> BiPoly:
        """The polynomial with x and y exchanged."""
        return BiPoly(((j, i), c) for (i, j), c in self._terms)

    def _by_x_power(self) -> dict[int, dict[int, Fraction]]:
        rows: dict[int, dict[int, Fraction]] = {}
        for (i, j), c in self._terms:
            rows.setdefault(i, {})[j] = c
        return rows

    def at_one(self, var: str) -> BiPoly:
        """Substitute ``var = 1`` (result keeps the other variable)."""
        if var in ("x", "X"):
            return BiPoly(((0, j), c) for (i, j), c in self._terms)
        if var in ("y", "Y"):
            return BiPoly(((i, 0), c) for (i, j), c in self._terms)
        raise ValueError(f"unknown variable {var!r}")

    def divisible_by_one_minus(self, var: str) -> bool:
        return not self.is_zero() and self.at_one(var).is_zero()

    def div_one_minus(self, var: str) -> BiPoly:
        """Exact quotient by ``(1 - var)``; raises ``ValueError`` if inexact."""
        if not self.at_one(var).is_zero():
            raise ValueError(f"polynomial is not divisible by (1 - {var})")
        p = self if var in ("x", "X") else self.swap()
        rows = p._by_x_power()
        top = max(rows, default=0)
        # p_i = q_i - q_{i-1}  =>  q_i = p_0 + ... + p_i
        running: dict[int, Fraction] = {}
        out: dict[Monomial, Fraction] = {}
        for i in range(top):
            for j, c in rows.get(i, {}).items():
                running[j] = running.get(j, Fraction(0)) + c
            for j, c in running.items():
                if c:
                    out[(i, j)] = c
        q = BiPoly(out)
        return q if var in ("x", "X") else q.swap()

    def content(self) -> Fraction:
        """Positive rational c with self/c having coprime integer coefficients."""
        if self.is_zero():
            return Fraction(1)
        nums = [c.numerator for _, c in self._terms]
        dens = [c.denominator for _, c in self._terms]
        g = reduce(math.gcd, nums)
        lcm = reduce(lambda a, b: a * b // math.gcd(a, b), dens)
        return Fraction(abs(g), lcm)

    # evaluation
    def __call__(self, x, y) -> complex:
        return poly_eval(self, x, y)

    def to_str(self, latex: bool = False) -> str:
        if self.is_zero():
            return "0"
        parts = []
        for (i, j), c in sorted(self._terms, key=lambda t: (t[0][0] + t[0][1], t[0])):
            mono = []
            for v, e in (("x", i), ("y", j)):
                if e == 1:
                    mono.append(v)
                elif e > 1:
                    mono.append(f"{v}^{{{e}}}" if latex else f"{v}^{e}")
            mag = abs(c)
            if latex and mag.denominator != 1:
                cs = rf"\frac{{{mag.numerator}}}{{{mag.denominator}}}"
            else:
                cs = rat_str(mag)
            body = " ".join(mono) if latex else "*".join(mono)
            if not mono:
                text = cs
            elif mag == 1:
                text = body
            else:
                text = f"{cs} {body}" if latex else f"{cs}*{body}"
            parts.append(("-" if c < 0 else "+", text))
        sign, first = parts[0]
        out = ("-" if sign == "-" else "") + first
        for sign, text in parts[1:]:
            out += f" {sign} {text}"
        return out


def poly_eval(p: BiPoly, x, y) -> complex:
    """Floating complex evaluation by nested Horner schemes."""
    x = complex(x)
    y = complex(y)
    rows = p._by_x_power()
    if not rows:
        return 0j
    total = 0j
    for i in range(max(rows), -1, -1):
        row = rows.get(i)
        inner = 0j
        if row:
            for j in range(max(row), -1, -1):
                inner = inner * y + float(row.get(j, 0))
        total = total * x + inner
    return total


def poly_eval_exact(p: BiPoly, x, y):
    """Exact evaluation.

    Real rational inputs give a Fraction. Complex inputs are converted to
    their exact binary values and the result is rounded once to complex.
    """
    if not isinstance(x, complex) and not isinstance(y, complex):
        xr, yr = as_rat(x), as_rat(y)
        return sum((c * xr**i * yr**j for (i, j), c in p.terms), Fraction(0))
    xr, xi = _exact_complex(x)
    yr, yi = _exact_complex(y)

    def cmul(a, b):
        return a[0] * b[0] - a[1] * b[1], a[0] * b[1] + a[1] * b[0]

    def cpow(a, k):
        out = (Fraction(1), Fraction(0))
        for _ in range(k):
            out = cmul(out, a)
        return out

    re = im = Fraction(0)
    xpows: dict[int, tuple] = {}
    ypows: dict[int, tuple] = {}
    for (i, j), c in p.terms:
        if i not in xpows:
            xpows[i] = cpow((xr, xi), i)
        if j not in ypows:
            ypows[j] = cpow((yr, yi), j)
        t = cmul(xpows[i], ypows[j])
        re += c * t[0]
        im += c * t[1]
    return complex(float(re), float(im))


def poly_diff(p: BiPoly, var: str) -> BiPoly:
    return p.diff(var)


ONE_MINUS_X = BiPoly({(0, 0): 1, (1, 0): -1})
ONE_MINUS_Y = BiPoly({(0, 0): 1, (0, 1): -1})


@dataclass(frozen=True)
class StructuredRatFun:
    """``numerator / (scale * (1-x)^pow_x * (1-y)^pow_y)``.

    Construction reduces the representation: common ``(1-x)``/``(1-y)``
    factors are cancelled and the numerator is made primitive with integer
    coefficients, the content moving into ``scale``. Two instances are equal
    exactly when they are the same rational function.
    """

    numerator: BiPoly
    scale: Fraction = Fraction(1)
    pow_x: int = 0
    pow_y: int = 0

    def __post_init__(self):
        scale = as_rat(self.scale)
        if scale <= 0:
            raise ValueError("scale must be positive")
        if self.pow_x < 0 or self.pow_y < 0:
            raise ValueError("denominator powers must be nonnegative")
        num, px, py = self.numerator, self.pow_x, self.pow_y
        if num.is_zero():
            scale, px, py = Fraction(1), 0, 0
        else:
            while px > 0 and num.divisible_by_one_minus("x"):
                num, px = num.div_one_minus("x"), px - 1
            while py > 0 and num.divisible_by_one_minus("y"):
                num, py = num.div_one_minus("y"), py - 1
            cont = num.content()
            num = num * (1 / cont)
            scale = scale / cont
        object.__setattr__(self, "numerator", num)
        object.__setattr__(self, "scale", scale)
        object.__setattr__(self, "pow_x", px)
        object.__setattr__(self, "pow_y", py)

    def __call__(self, x, y) -> complex:
        return ratfun_eval(self, x, y)

    def swap(self) -> StructuredRatFun:
        return StructuredRatFun(self.numerator.swap(), self.scale, self.pow_y, self.pow_x)

    def taylor_coefficients(self, max_total_degree: int) -> dict[Monomial, Fraction]:
        """Exact Taylor coefficients at the origin for ``i + j <= max_total_degree``."""
        D = max_total_degree
        # 1/(1-x)^a = sum_k C(a-1+k, k) x^k
        sx = [Fraction(math.comb(self.pow_x - 1 + k, k)) if self.pow_x else Fraction(k == 0) for k in range(D + 1)]
        sy = [Fraction(math.comb(self.pow_y - 1 + k, k)) if self.pow_y else Fraction(k == 0) for k in range(D + 1)]
        out: dict[Monomial, Fraction] = {}
        for (i0, j0), c in self.numerator.terms:
            for di in range(D - i0 - j0 + 1):
                for dj in range(D - i0 - j0 - di + 1):
                    key = (i0 + di, j0 + dj)
                    out[key] = out.get(key, Fraction(0)) + c * sx[di] * sy[dj]
        return {m: v / self.scale for m, v in out.items()}

    def to_latex(self) -> str:
        den = [] if self.scale == 1 else [
            rat_str(self.scale) if self.scale.denominator == 1
            else rf"\frac{{{self.scale.numerator}}}{{{self.scale.denominator}}}"
        ]
        if self.pow_x:
            den.append(f"(1 - x)^{{{self.pow_x}}}")
        if self.pow_y:
            den.append(f"(1 - y)^{{{self.pow_y}}}")
        num = self.numerator.to_str(latex=True)
        if not den:
            return num
        return rf"\frac{{{num}}}{{{' '.join(den)}}}"

    def to_dict(self) -> dict:
        return {
            "numerator": [[i, j, rat_str(c)] for (i, j), c in self.numerator.terms],
            "scale": rat_str(self.scale),
            "pow_x": self.pow_x,
            "pow_y": self.pow_y,
        }

    @classmethod
    def from_dict(cls, data: Mapping) -> StructuredRatFun:
        num = BiPoly(((int(i), int(j)), Fraction(c)) for i, j, c in data["numerator"])
        return cls(num, Fraction(data["scale"]), int(data["pow_x"]), int(data["pow_y"]))


def ratfun_eval(f: StructuredRatFun, x, y, exact: bool = False) -> complex:
    """Evaluate ``f`` at ``(x, y)``; ``exact=True`` evaluates the numerator exactly."""
    if (f.pow_x and x == 1) or (f.pow_y and y == 1):
        raise PoleError(f"pole of (1-x)^{f.pow_x}(1-y)^{f.pow_y} at ({x}, {y})")
    num = poly_eval_exact(f.numerator, x, y) if exact else poly_eval(f.numerator, x, y)
    den = float(f.scale) * (1 - complex(x)) ** f.pow_x * (1 - complex(y)) ** f.pow_y
    return complex(num) / den


def ratfun_apply_recursion(f: StructuredRatFun, step_index: int, q: RatLike, r: RatLike) -> StructuredRatFun:
    """Map ``L_n`` to ``L_{n+1} = (n+1) L_n + (2/q) d/dx(x L_n) + (2/r) d/dy(y L_n)``."""
    if step_index < 1:
        raise ValueError("step_index must be a positive integer")
    q, r = as_rat(q), as_rat(r)
    N, a, b = f.numerator, f.pow_x, f.pow_y
    X, Y = BiPoly.x(), BiPoly.y()
    dx_part = (N + X * N.diff("x")) * ONE_MINUS_X + X * N * a
    dy_part = (N + Y * N.diff("y")) * ONE_MINUS_Y + Y * N * b
    num = (
        N * ONE_MINUS_X * ONE_MINUS_Y * (step_index + 1)
        + ONE_MINUS_Y * dx_part * (2 / q)
        + ONE_MINUS_X * dy_part * (2 / r)
    )
    return StructuredRatFun(num, f.scale, a + 1, b + 1)
