"""Truncated power series in one and two variables.

Everything downstream (germs, frames, reduction, invariants, focal
classification) is exact-to-truncation arithmetic on these objects.
A bivariate series of degree ``r`` stores coefficients ``c[i, j]`` of
``u**i * v**j`` for ``i + j <= r`` in a dense ``(r+1, r+1)`` array;
slots above the anti-diagonal are identically zero.  Values are
immutable after construction and all operations are pure, so instances
can be shared freely between threads.

Binary operators on series of different degrees truncate to the lower
degree, mirroring the usual power-series calculus.  The :func:`arith`
entry point enforces the stricter equal-degree contract and is what the
service layer calls.
"""

from __future__ import annotations

import math
from typing import Iterable, Sequence

import numpy as np
from numpy.polynomial import polynomial as npoly

from .errors import PreconditionError, StructureError

#: Coefficients with absolute value below this are snapped to zero on
#: construction.  Keeps float dust from earlier operations out of
#: structural predicates (divisibility, parity, split checks).
DEFAULT_ZERO_TOL = 1e-12


def _degree_mask(degree: int) -> np.ndarray:
    idx = np.arange(degree + 1)
    return idx[:, None] + idx[None, :] <= degree


class TruncatedSeries2:
    """Bivariate polynomial truncated at total degree ``degree``."""

    __slots__ = ("degree", "coeffs", "zero_tol")

    def __init__(self, degree: int, coeffs=None, zero_tol: float = DEFAULT_ZERO_TOL):
        if degree < 0:
            raise PreconditionError(f"series degree must be >= 0, got {degree}")
        self.degree = int(degree)
        self.zero_tol = float(zero_tol)
        if coeffs is None:
            c = np.zeros((degree + 1, degree + 1))
        else:
            c = np.zeros((degree + 1, degree + 1))
            src = np.asarray(coeffs, dtype=float)
            n = min(src.shape[0], degree + 1)
            m = min(src.shape[1], degree + 1)
            c[:n, :m] = src[:n, :m]
        c[~_degree_mask(degree)] = 0.0
        c[np.abs(c) < self.zero_tol] = 0.0
        c.flags.writeable = False
        self.coeffs = c

    # -- constructors -------------------------------------------------

    @classmethod
    def from_terms(cls, degree: int, terms: Iterable[Sequence], zero_tol: float = DEFAULT_ZERO_TOL):
        c = np.zeros((degree + 1, degree + 1))
        for i, j, value in terms:
            i, j = int(i), int(j)
            if i < 0 or j < 0 or i + j > degree:
                raise PreconditionError(
                    f"term u^{i} v^{j} exceeds truncation degree {degree}"
                )
            c[i, j] += float(value)
        return cls(degree, c, zero_tol)

    @classmethod
    def constant(cls, degree: int, value: float):
        return cls.from_terms(degree, [(0, 0, value)])

    @classmethod
    def monomial(cls, degree: int, i: int, j: int, value: float = 1.0):
        return cls.from_terms(degree, [(i, j, value)])

    @classmethod
    def var_u(cls, degree: int):
        return cls.monomial(degree, 1, 0)

    @classmethod
    def var_v(cls, degree: int):
        return cls.monomial(degree, 0, 1)

    # -- basic queries -------------------------------------------------

    def coefficient(self, i: int, j: int) -> float:
        if i + j > self.degree or i < 0 or j < 0:
            raise PreconditionError(
                f"coefficient u^{i} v^{j} lies beyond truncation degree {self.degree}"
            )
        return float(self.coeffs[i, j])

    def terms(self):
        """Nonzero terms as (i, j, coefficient), graded lexicographic."""
        out = []
        for d in range(self.degree + 1):
            for i in range(d, -1, -1):
                j = d - i
                c = self.coeffs[i, j]
                if c != 0.0:
                    out.append((i, j, float(c)))
        return out

    @property
    def constant_term(self) -> float:
        return float(self.coeffs[0, 0])

    def max_abs(self) -> float:
        return float(np.max(np.abs(self.coeffs)))

    def __repr__(self):
        body = " + ".join(f"{c:g}*u^{i}*v^{j}" for i, j, c in self.terms()) or "0"
        return f"TruncatedSeries2(r={self.degree}: {body})"

    # -- arithmetic ----------------------------------------------------

    def truncate(self, degree: int) -> "TruncatedSeries2":
        return TruncatedSeries2(degree, self.coeffs, self.zero_tol)

    def shift(self, du: int, dv: int) -> "TruncatedSeries2":
        """Multiply by the monomial u^du v^dv.

        Unlike ``*`` this keeps every known order: the product of a
        degree-r jet with a monomial of degree d is known to r + d.
        """
        if du < 0 or dv < 0:
            raise PreconditionError("shift exponents must be nonnegative")
        r = self.degree + du + dv
        out = np.zeros((r + 1, r + 1))
        out[du : du + self.degree + 1, dv : dv + self.degree + 1] = self.coeffs
        return TruncatedSeries2(r, out, self.zero_tol)

    def _common_degree(self, other: "TruncatedSeries2") -> int:
        return min(self.degree, other.degree)

    def __add__(self, other):
        if isinstance(other, TruncatedSeries2):
            r = self._common_degree(other)
            return TruncatedSeries2(
                r, self.coeffs[: r + 1, : r + 1] + other.coeffs[: r + 1, : r + 1]
            )
        return self + TruncatedSeries2.constant(self.degree, float(other))

    __radd__ = __add__

    def __neg__(self):
        return TruncatedSeries2(self.degree, -self.coeffs)

    def __sub__(self, other):
        if isinstance(other, TruncatedSeries2):
            r = self._common_degree(other)
            return TruncatedSeries2(
                r, self.coeffs[: r + 1, : r + 1] - other.coeffs[: r + 1, : r + 1]
            )
        return self - TruncatedSeries2.constant(self.degree, float(other))

    def __rsub__(self, other):
        return -(self - other)

    def __mul__(self, other):
        if not isinstance(other, TruncatedSeries2):
            return TruncatedSeries2(self.degree, self.coeffs * float(other))
        r = self._common_degree(other)
        out = np.zeros((r + 1, r + 1))
        a, b = self.coeffs, other.coeffs
        for i in range(min(self.degree, r) + 1):
            row = a[i]
            nz = np.nonzero(row[: r + 1])[0]
            for j in nz:
                # a[i,j] * b shifted by (i, j), truncated at total degree r
                ni = r + 1 - i
                nj = r + 1 - j
                out[i:, j:] += row[j] * b[:ni, :nj]
        out[~_degree_mask(r)] = 0.0
        return TruncatedSeries2(r, out)

    __rmul__ = __mul__

    def __pow__(self, n: int):
        if not isinstance(n, int) or n < 0:
            raise PreconditionError("series powers must be nonnegative integers")
        result = TruncatedSeries2.constant(self.degree, 1.0)
        for _ in range(n):
            result = result * self
        return result

    # -- calculus ------------------------------------------------------

    def partial(self, var: str) -> "TruncatedSeries2":
        """Formal partial derivative; degree drops by one."""
        r = max(self.degree - 1, 0)
        out = np.zeros((r + 1, r + 1))
        if var == "u":
            for i in range(1, self.degree + 1):
                out[i - 1, : r + 2 - i] = i * self.coeffs[i, : r + 2 - i]
        elif var == "v":
            for j in range(1, self.degree + 1):
                out[: r + 2 - j, j - 1] = j * self.coeffs[: r + 2 - j, j]
        else:
            raise PreconditionError(f"unknown variable {var!r}, expected 'u' or 'v'")
        return TruncatedSeries2(r, out)

    def evaluate(self, point):
        """Value of the truncated polynomial; broadcasts over arrays."""
        u, v = point
        return npoly.polyval2d(np.asarray(u, dtype=float), np.asarray(v, dtype=float), self.coeffs)

    # -- structural helpers -------------------------------------------

    def divide_u(self, tol: float | None = None) -> "TruncatedSeries2":
        """Exact division by u.  Errors if any pure-v monomial survives."""
        tol = self.zero_tol if tol is None else tol
        bad = np.nonzero(np.abs(self.coeffs[0]) > tol)[0]
        if bad.size:
            j = int(bad[0])
            raise StructureError(
                "series is not divisible by u", monomial=(0, j), value=float(self.coeffs[0, j])
            )
        r = max(self.degree - 1, 0)
        return TruncatedSeries2(r, self.coeffs[1 : r + 2, : r + 1])

    def divide_v(self, tol: float | None = None) -> "TruncatedSeries2":
        tol = self.zero_tol if tol is None else tol
        bad = np.nonzero(np.abs(self.coeffs[:, 0]) > tol)[0]
        if bad.size:
            i = int(bad[0])
            raise StructureError(
                "series is not divisible by v", monomial=(i, 0), value=float(self.coeffs[i, 0])
            )
        r = max(self.degree - 1, 0)
        return TruncatedSeries2(r, self.coeffs[: r + 1, 1 : r + 2])

    def restrict_v0(self) -> "TruncatedSeries1":
        """Restriction to the u-axis (v = 0) as a univariate series."""
        return TruncatedSeries1(self.degree, self.coeffs[:, 0])

    def restrict_u0(self) -> "TruncatedSeries1":
        """Restriction to the v-axis (u = 0) as a univariate series."""
        return TruncatedSeries1(self.degree, self.coeffs[0, :])

    def substitute_linear(self, a11: float, a12: float, a21: float, a22: float) -> "TruncatedSeries2":
        """Jet of s(a11*u + a12*v, a21*u + a22*v); exact for linear maps."""
        inner_u = TruncatedSeries2.from_terms(self.degree, [(1, 0, a11), (0, 1, a12)])
        inner_v = TruncatedSeries2.from_terms(self.degree, [(1, 0, a21), (0, 1, a22)])
        return compose2(self, inner_u, inner_v)

    # -- serialization -------------------------------------------------

    def to_json(self) -> dict:
        return {
            "degree": self.degree,
            "terms": [[i, j, c] for i, j, c in self.terms()],
        }

    @classmethod
    def from_json(cls, data: dict) -> "TruncatedSeries2":
        return cls.from_terms(int(data["degree"]), data.get("terms", []))


class TruncatedSeries1:
    """Univariate polynomial truncated at degree ``degree``."""

    __slots__ = ("degree", "coeffs", "zero_tol")

    def __init__(self, degree: int, coeffs=None, zero_tol: float = DEFAULT_ZERO_TOL):
        if degree < 0:
            raise PreconditionError(f"series degree must be >= 0, got {degree}")
        self.degree = int(degree)
        self.zero_tol = float(zero_tol)
        c = np.zeros(degree + 1)
        if coeffs is not None:
            src = np.asarray(coeffs, dtype=float)
            n = min(src.shape[0], degree + 1)
            c[:n] = src[:n]
        c[np.abs(c) < self.zero_tol] = 0.0
        c.flags.writeable = False
        self.coeffs = c

    @classmethod
    def constant(cls, degree: int, value: float):
        c = np.zeros(degree + 1)
        c[0] = value
        return cls(degree, c)

    def coefficient(self, k: int) -> float:
        if k < 0 or k > self.degree:
            raise PreconditionError(f"coefficient t^{k} beyond truncation degree {self.degree}")
        return float(self.coeffs[k])

    @property
    def constant_term(self) -> float:
        return float(self.coeffs[0])

    def truncate(self, degree: int) -> "TruncatedSeries1":
        return TruncatedSeries1(degree, self.coeffs)

    def __add__(self, other):
        if isinstance(other, TruncatedSeries1):
            r = min(self.degree, other.degree)
            return TruncatedSeries1(r, self.coeffs[: r + 1] + other.coeffs[: r + 1])
        c = np.array(self.coeffs)
        c[0] += float(other)
        return TruncatedSeries1(self.degree, c)

    __radd__ = __add__

    def __neg__(self):
        return TruncatedSeries1(self.degree, -self.coeffs)

    def __sub__(self, other):
        if isinstance(other, TruncatedSeries1):
            r = min(self.degree, other.degree)
            return TruncatedSeries1(r, self.coeffs[: r + 1] - other.coeffs[: r + 1])
        return self + (-float(other))

    def __rsub__(self, other):
        return -(self - other)

    def __mul__(self, other):
        if not isinstance(other, TruncatedSeries1):
            return TruncatedSeries1(self.degree, self.coeffs * float(other))
        r = min(self.degree, other.degree)
        full = np.convolve(self.coeffs[: r + 1], other.coeffs[: r + 1])
        return TruncatedSeries1(r, full[: r + 1])

    __rmul__ = __mul__

    def derivative(self) -> "TruncatedSeries1":
        r = max(self.degree - 1, 0)
        if self.degree == 0:
            return TruncatedSeries1(0)
        return TruncatedSeries1(r, self.coeffs[1:] * np.arange(1, self.degree + 1))

    def strip(self, k: int, tol: float = 1e-9) -> "TruncatedSeries1":
        """Exact division by t^k; errors if any lower coefficient survives."""
        if k == 0:
            return self
        low = np.abs(self.coeffs[:k])
        if low.size and np.max(low) > tol:
            raise StructureError(
                f"series is not divisible by t^{k}", monomial=(int(np.argmax(low)), 0),
                value=float(self.coeffs[int(np.argmax(low))]),
            )
        return TruncatedSeries1(max(self.degree - k, 0), self.coeffs[k:])

    def evaluate(self, t):
        return npoly.polyval(np.asarray(t, dtype=float), self.coeffs)

    def sqrt(self) -> "TruncatedSeries1":
        c0 = self.coeffs[0]
        if c0 <= 0:
            raise PreconditionError(f"sqrt needs positive constant term, got {c0!r}")
        out = np.zeros(self.degree + 1)
        out[0] = math.sqrt(c0)
        for d in range(1, self.degree + 1):
            acc = sum(out[k] * out[d - k] for k in range(1, d))
            out[d] = (self.coeffs[d] - acc) / (2.0 * out[0])
        return TruncatedSeries1(self.degree, out)

    def reciprocal(self) -> "TruncatedSeries1":
        c0 = self.coeffs[0]
        if c0 == 0.0:
            raise PreconditionError("reciprocal needs nonzero constant term")
        out = np.zeros(self.degree + 1)
        out[0] = 1.0 / c0
        for d in range(1, self.degree + 1):
            acc = sum(self.coeffs[k] * out[d - k] for k in range(1, d + 1))
            out[d] = -acc / c0
        return TruncatedSeries1(self.degree, out)

    def terms(self):
        return [(k, float(c)) for k, c in enumerate(self.coeffs) if c != 0.0]

    def to_json(self) -> dict:
        return {"degree": self.degree, "coeffs": [float(c) for c in self.coeffs]}

    @classmethod
    def from_json(cls, data: dict) -> "TruncatedSeries1":
        return cls(int(data["degree"]), data.get("coeffs", []))

    def __repr__(self):
        body = " + ".join(f"{c:g}*t^{k}" for k, c in self.terms()) or "0"
        return f"TruncatedSeries1(r={self.degree}: {body})"


# -- module-level operations (the spec'd surface) ----------------------


def arith(lhs: TruncatedSeries2, rhs, kind: str) -> TruncatedSeries2:
    """Strict arithmetic: add | sub | mul require equal degrees, scale takes a scalar."""
    if kind == "scale":
        return lhs * float(rhs)
    if not isinstance(rhs, TruncatedSeries2):
        raise PreconditionError(f"arith({kind!r}) needs two series operands")
    if lhs.degree != rhs.degree:
        raise PreconditionError(
            f"degree mismatch: {lhs.degree} vs {rhs.degree} (truncate explicitly first)"
        )
    if kind == "add":
        return lhs + rhs
    if kind == "sub":
        return lhs - rhs
    if kind == "mul":
        return lhs * rhs
    raise PreconditionError(f"unknown arith kind {kind!r}")


def compose2(
    outer: TruncatedSeries2, inner_u: TruncatedSeries2, inner_v: TruncatedSeries2
) -> TruncatedSeries2:
    """Jet of outer(inner_u, inner_v) at the common truncation degree.

    The inner series must vanish at the origin, otherwise the result
    would depend on coefficients of ``outer`` beyond its truncation.
    """
    r = min(outer.degree, inner_u.degree, inner_v.degree)
    if abs(inner_u.constant_term) > inner_u.zero_tol or abs(inner_v.constant_term) > inner_v.zero_tol:
        raise PreconditionError("compose2 inner series must have zero constant term")
    iu = inner_u.truncate(r)
    iv = inner_v.truncate(r)
    one = TruncatedSeries2.constant(r, 1.0)
    u_pows = [one]
    v_pows = [one]
    for _ in range(r):
        u_pows.append(u_pows[-1] * iu)
        v_pows.append(v_pows[-1] * iv)
    acc = np.zeros((r + 1, r + 1))
    for i in range(r + 1):
        for j in range(r + 1 - i):
            c = outer.coeffs[i, j] if i <= outer.degree and j <= outer.degree else 0.0
            if c != 0.0:
                acc += c * (u_pows[i] * v_pows[j]).coeffs
    return TruncatedSeries2(r, acc)


def sqrt_series(s: TruncatedSeries2) -> TruncatedSeries2:
    """Degree-by-degree square root; exact to truncation.

    Solves (result)**2 = s from the recurrence on homogeneous parts,
    so no iteration tolerance is involved.  Requires s(0,0) > 0.
    """
    c0 = s.constant_term
    if c0 <= 0:
        raise PreconditionError(f"sqrt_series needs positive constant term, got {c0!r}")
    r = s.degree
    out = np.zeros((r + 1, r + 1))
    out[0, 0] = math.sqrt(c0)
    t = TruncatedSeries2(r, out)
    for d in range(1, r + 1):
        sq = (t * t).coeffs
        new = np.array(t.coeffs)
        for i in range(d + 1):
            j = d - i
            new[i, j] = (s.coeffs[i, j] - sq[i, j]) / (2.0 * out[0, 0])
        t = TruncatedSeries2(r, new, zero_tol=0.0)
    return TruncatedSeries2(r, t.coeffs)


def reciprocal(s: TruncatedSeries2) -> TruncatedSeries2:
    """Series inverse 1/s; requires nonzero constant term."""
    c0 = s.constant_term
    if c0 == 0.0:
        raise PreconditionError("reciprocal needs nonzero constant term")
    r = s.degree
    out = np.zeros((r + 1, r + 1))
    out[0, 0] = 1.0 / c0
    t = TruncatedSeries2(r, out, zero_tol=0.0)
    for d in range(1, r + 1):
        prod = (s * t).coeffs
        new = np.array(t.coeffs)
        for i in range(d + 1):
            j = d - i
            new[i, j] = -prod[i, j] / c0
        t = TruncatedSeries2(r, new, zero_tol=0.0)
    return TruncatedSeries2(r, t.coeffs)


def divide(num: TruncatedSeries2, den: TruncatedSeries2) -> TruncatedSeries2:
    return num * reciprocal(den)


def invert_coordinate_change(
    s_u: TruncatedSeries2, s_v: TruncatedSeries2
) -> tuple[TruncatedSeries2, TruncatedSeries2]:
    """Inverse jet of the plane map (u,v) -> (s_u, s_v).

    Solved degree by degree: invert the linear part, then feed the
    higher-order remainder back through the current approximation.
    Composing the result with (s_u, s_v) returns (u, v) to truncation.
    """
    r = min(s_u.degree, s_v.degree)
    for s in (s_u, s_v):
        if abs(s.constant_term) > s.zero_tol:
            raise PreconditionError("coordinate change must fix the origin")
    a11, a12 = s_u.coefficient(1, 0), s_u.coefficient(0, 1)
    a21, a22 = s_v.coefficient(1, 0), s_v.coefficient(0, 1)
    det = a11 * a22 - a12 * a21
    if abs(det) < 1e-14:
        raise PreconditionError("coordinate change has singular linear part")
    b11, b12 = a22 / det, -a12 / det
    b21, b22 = -a21 / det, a11 / det

    def linear_inv(x: TruncatedSeries2, y: TruncatedSeries2):
        return (b11 * x + b12 * y, b21 * x + b22 * y)

    u = TruncatedSeries2.var_u(r)
    v = TruncatedSeries2.var_v(r)
    # higher-order parts of the forward map
    hu = s_u.truncate(r) - TruncatedSeries2.from_terms(r, [(1, 0, a11), (0, 1, a12)])
    hv = s_v.truncate(r) - TruncatedSeries2.from_terms(r, [(1, 0, a21), (0, 1, a22)])
    p, q = linear_inv(u, v)
    for _ in range(r):
        ru = u - compose2(hu, p, q)
        rv = v - compose2(hv, p, q)
        p, q = linear_inv(ru, rv)
    return p, q


def partial(s: TruncatedSeries2, var: str) -> TruncatedSeries2:
    return s.partial(var)


def evaluate(s: TruncatedSeries2, point):
    return s.evaluate(point)


def max_coeff_diff(a: TruncatedSeries2, b: TruncatedSeries2) -> float:
    """Largest absolute coefficient difference on the common degree range."""
    r = min(a.degree, b.degree)
    diff = np.abs(a.coeffs[: r + 1, : r + 1] - b.coeffs[: r + 1, : r + 1])
    return float(np.max(diff[_degree_mask(r)]))
