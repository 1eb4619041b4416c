"""Map germs (R^2,0) -> (R^3,0) and the normal-form coefficient data.

A :class:`MapGerm` is three truncated bivariate series with vanishing
constant terms.  A :class:`NormalFormGerm` holds the data
``(a; b1, b2, b3; c1, c2, c3)`` of the normal form

    f(u, v) = (u^2 - v^2,
               a (u^2 + v^2) + u^3 b1(u) + u^2 v^2 b2(u, v) + v^3 b3(v),
               u^3 c1(u) + u^2 v^2 c2(u, v) + v^3 c3(v)),

where b1, b3, c1, c3 are univariate and b2, c2 bivariate coefficient
functions.  ``expand`` and ``split_bc`` convert between the two
representations and are mutual inverses on structurally valid germs.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ParseError, PreconditionError, StructureError
from .series import TruncatedSeries1, TruncatedSeries2

#: Structural monomials smaller than this are treated as reduction noise.
SPLIT_TOL = 1e-9

#: Smallest truncation degree for which the b2/c2 blocks exist.
MIN_DEGREE = 4


class MapGerm:
    """Polynomial jet of a map germ fixing the origin."""

    __slots__ = ("x", "y", "z", "degree")

    def __init__(self, x: TruncatedSeries2, y: TruncatedSeries2, z: TruncatedSeries2):
        degree = min(x.degree, y.degree, z.degree)
        self.x = x.truncate(degree)
        self.y = y.truncate(degree)
        self.z = z.truncate(degree)
        self.degree = degree
        for name, comp in (("x", self.x), ("y", self.y), ("z", self.z)):
            if abs(comp.constant_term) > comp.zero_tol:
                raise PreconditionError(
                    f"germ component {name} has nonzero constant term {comp.constant_term!r}"
                )

    @property
    def components(self):
        return (self.x, self.y, self.z)

    def truncate(self, degree: int) -> "MapGerm":
        return MapGerm(self.x.truncate(degree), self.y.truncate(degree), self.z.truncate(degree))

    def evaluate(self, point) -> np.ndarray:
        """Image point(s); shape (3,) for scalars, (3, ...) for arrays."""
        return np.array([c.evaluate(point) for c in self.components])

    def rotate(self, matrix) -> "MapGerm":
        """Target rotation: components become linear combinations."""
        m = np.asarray(matrix, dtype=float)
        comps = [
            m[k, 0] * self.x + m[k, 1] * self.y + m[k, 2] * self.z
            for k in range(3)
        ]
        return MapGerm(*comps)

    def compose_source(self, inner_u: TruncatedSeries2, inner_v: TruncatedSeries2) -> "MapGerm":
        """Precompose with a source map fixing the origin."""
        from .series import compose2

        return MapGerm(*(compose2(c, inner_u, inner_v) for c in self.components))

    def substitute_linear(self, a11, a12, a21, a22) -> "MapGerm":
        return MapGerm(*(c.substitute_linear(a11, a12, a21, a22) for c in self.components))

    def __repr__(self):
        return f"MapGerm(degree={self.degree})"


def derivative_series(m: MapGerm, du: int, dv: int):
    """Formal partial d^(du+dv) f / du^du dv^dv as a plain series triple."""
    out = []
    for comp in m.components:
        s = comp
        for _ in range(du):
            s = s.partial("u")
        for _ in range(dv):
            s = s.partial("v")
        out.append(s)
    return tuple(out)


def derivative_at(m: MapGerm, du: int, dv: int, point) -> np.ndarray:
    return np.array([s.evaluate(point) for s in derivative_series(m, du, dv)])


@dataclass(frozen=True)
class NormalFormGerm:
    """Coefficient data of the normal form at truncation degree ``degree``."""

    a: float
    b1: TruncatedSeries1
    b2: TruncatedSeries2
    b3: TruncatedSeries1
    c1: TruncatedSeries1
    c2: TruncatedSeries2
    c3: TruncatedSeries1
    degree: int

    def __post_init__(self):
        if self.degree < MIN_DEGREE:
            raise PreconditionError(f"normal form degree must be >= {MIN_DEGREE}, got {self.degree}")
        if not self.a > 0:
            raise PreconditionError(f"normal form requires a > 0, got {self.a!r}")
        object.__setattr__(self, "a", float(self.a))
        object.__setattr__(self, "b1", self.b1.truncate(self.degree - 3))
        object.__setattr__(self, "b3", self.b3.truncate(self.degree - 3))
        object.__setattr__(self, "c1", self.c1.truncate(self.degree - 3))
        object.__setattr__(self, "c3", self.c3.truncate(self.degree - 3))
        object.__setattr__(self, "b2", self.b2.truncate(self.degree - 4))
        object.__setattr__(self, "c2", self.c2.truncate(self.degree - 4))

    @classmethod
    def from_scalars(cls, a, b1=0.0, b2=0.0, b3=0.0, c1=1.0, c2=0.0, c3=1.0, degree=7):
        """Convenience constructor with constant coefficient functions."""
        mk1 = lambda val: TruncatedSeries1.constant(degree - 3, float(val))
        mk2 = lambda val: TruncatedSeries2.constant(degree - 4, float(val))
        return cls(a, mk1(b1), mk2(b2), mk1(b3), mk1(c1), mk2(c2), mk1(c3), degree)

    def is_canonical(self, strict: bool = False) -> bool:
        """Sign normalization of the reduction; strict positivity is
        what the uniqueness theorem needs."""
        c10, c30 = self.c1.constant_term, self.c3.constant_term
        if strict:
            return c10 > 0 and c30 > 0
        return c10 >= 0 and c30 >= 0

    def is_front(self, tol: float = 1e-12) -> bool:
        return abs(self.c1.constant_term * self.c3.constant_term) > tol


def _embed_u(s: TruncatedSeries1, degree: int, shift: int) -> TruncatedSeries2:
    terms = [(k + shift, 0, c) for k, c in s.terms() if k + shift <= degree]
    return TruncatedSeries2.from_terms(degree, terms)


def _embed_v(s: TruncatedSeries1, degree: int, shift: int) -> TruncatedSeries2:
    terms = [(0, k + shift, c) for k, c in s.terms() if k + shift <= degree]
    return TruncatedSeries2.from_terms(degree, terms)


def _embed_block(s: TruncatedSeries2, degree: int) -> TruncatedSeries2:
    terms = [(i + 2, j + 2, c) for i, j, c in s.terms() if i + j + 4 <= degree]
    return TruncatedSeries2.from_terms(degree, terms)


def assemble_b(nf: NormalFormGerm) -> TruncatedSeries2:
    """The function b(u,v) = u^3 b1(u) + u^2 v^2 b2(u,v) + v^3 b3(v)."""
    r = nf.degree
    return _embed_u(nf.b1, r, 3) + _embed_block(nf.b2, r) + _embed_v(nf.b3, r, 3)


def assemble_c(nf: NormalFormGerm) -> TruncatedSeries2:
    r = nf.degree
    return _embed_u(nf.c1, r, 3) + _embed_block(nf.c2, r) + _embed_v(nf.c3, r, 3)


def expand(nf: NormalFormGerm) -> MapGerm:
    """Literal polynomial assembly of the normal form."""
    r = nf.degree
    x = TruncatedSeries2.from_terms(r, [(2, 0, 1.0), (0, 2, -1.0)])
    quad = TruncatedSeries2.from_terms(r, [(2, 0, nf.a), (0, 2, nf.a)])
    y = quad + assemble_b(nf)
    z = assemble_c(nf)
    return MapGerm(x, y, z)


def _split_structured(s: TruncatedSeries2, tol: float):
    """Split a series into (u-part, block, v-part); error on stray monomials.

    Allowed slots: pure u^i with i >= 3, pure v^j with j >= 3, and the
    u^2 v^2 block (i >= 2 and j >= 2).
    """
    r = s.degree
    part_u = np.zeros(max(r - 3, 0) + 1)
    part_v = np.zeros(max(r - 3, 0) + 1)
    block = np.zeros((max(r - 4, 0) + 1, max(r - 4, 0) + 1))
    for i, j, c in s.terms():
        if j == 0 and i >= 3:
            part_u[i - 3] = c
        elif i == 0 and j >= 3:
            part_v[j - 3] = c
        elif i >= 2 and j >= 2:
            block[i - 2, j - 2] = c
        elif abs(c) > tol:
            raise StructureError("forbidden monomial in structured part", monomial=(i, j), value=c)
    return (
        TruncatedSeries1(max(r - 3, 0), part_u),
        TruncatedSeries2(max(r - 4, 0), block),
        TruncatedSeries1(max(r - 3, 0), part_v),
    )


def split_bc(m: MapGerm, tol: float = SPLIT_TOL, require_positive_a: bool = True) -> NormalFormGerm:
    """Extract (a; b-parts; c-parts) from a germ already in normal shape.

    The first component must be u^2 - v^2, the second a(u^2+v^2) plus a
    structured remainder, the third purely structured.  Violations are
    reported with the offending monomial.
    """
    r = m.degree
    if r < MIN_DEGREE:
        raise PreconditionError(f"split_bc needs degree >= {MIN_DEGREE}, got {r}")
    target = TruncatedSeries2.from_terms(r, [(2, 0, 1.0), (0, 2, -1.0)])
    diff = m.x - target
    if diff.max_abs() > tol:
        bad = max(diff.terms(), key=lambda t: abs(t[2]))
        raise StructureError(
            "first component is not u^2 - v^2", monomial=(bad[0], bad[1]), value=bad[2]
        )

    a = m.y.coefficient(2, 0)
    if require_positive_a and not a > tol:
        raise PreconditionError(f"extracted a = {a!r} is not positive")
    quad = TruncatedSeries2.from_terms(r, [(2, 0, a), (0, 2, a)])
    b_series = m.y - quad
    for i, j in ((1, 0), (0, 1), (1, 1), (2, 0), (0, 2)):
        if abs(b_series.coefficient(i, j)) > tol:
            raise StructureError(
                "second component has non-normal-form low-order terms",
                monomial=(i, j),
                value=b_series.coefficient(i, j),
            )
    b1, b2, b3 = _split_structured(b_series, tol)

    for i, j in ((1, 0), (0, 1), (1, 1), (2, 0), (0, 2)):
        if abs(m.z.coefficient(i, j)) > tol:
            raise StructureError(
                "third component has terms below degree 3", monomial=(i, j), value=m.z.coefficient(i, j)
            )
    c1, c2, c3 = _split_structured(m.z, tol)
    return NormalFormGerm(a, b1, b2, b3, c1, c2, c3, degree=r)


@dataclass(frozen=True)
class TransformRecord:
    """The pair (A, jet of s^{-1}) achieving A o f o s^{-1} = normal form."""

    rotation: np.ndarray
    source_u: TruncatedSeries2
    source_v: TruncatedSeries2

    def __post_init__(self):
        rot = np.asarray(self.rotation, dtype=float)
        object.__setattr__(self, "rotation", rot)
        resid = np.max(np.abs(rot @ rot.T - np.eye(3)))
        if resid > 1e-12:
            raise PreconditionError(f"rotation orthogonality residual {resid:.3e} too large")
        if np.linalg.det(rot) < 0:
            raise PreconditionError("transform rotation must have determinant +1")
        lin = np.array(
            [
                [self.source_u.coefficient(1, 0), self.source_u.coefficient(0, 1)],
                [self.source_v.coefficient(1, 0), self.source_v.coefficient(0, 1)],
            ]
        )
        if abs(np.linalg.det(lin)) < 1e-14:
            raise PreconditionError("source change has singular linear part")

    def apply(self, m: MapGerm) -> MapGerm:
        """A o m o s^{-1}: what the reduction did to the input germ."""
        return m.compose_source(self.source_u, self.source_v).rotate(self.rotation)


# -- JSON ---------------------------------------------------------------


def germ_to_json(m: MapGerm) -> dict:
    return {
        "degree": m.degree,
        "x": m.x.to_json(),
        "y": m.y.to_json(),
        "z": m.z.to_json(),
    }


def germ_from_json(data: dict) -> MapGerm:
    try:
        return MapGerm(
            TruncatedSeries2.from_json(data["x"]),
            TruncatedSeries2.from_json(data["y"]),
            TruncatedSeries2.from_json(data["z"]),
        )
    except KeyError as exc:
        raise ParseError(f"germ JSON missing field {exc}") from exc


def normal_form_to_json(nf: NormalFormGerm) -> dict:
    return {
        "normal_form": {
            "degree": nf.degree,
            "a": nf.a,
            "b1": nf.b1.to_json(),
            "b2": nf.b2.to_json(),
            "b3": nf.b3.to_json(),
            "c1": nf.c1.to_json(),
            "c2": nf.c2.to_json(),
            "c3": nf.c3.to_json(),
        }
    }


def normal_form_from_json(data: dict) -> NormalFormGerm:
    try:
        body = data["normal_form"]
        return NormalFormGerm(
            a=float(body["a"]),
            b1=TruncatedSeries1.from_json(body["b1"]),
            b2=TruncatedSeries2.from_json(body["b2"]),
            b3=TruncatedSeries1.from_json(body["b3"]),
            c1=TruncatedSeries1.from_json(body["c1"]),
            c2=TruncatedSeries2.from_json(body["c2"]),
            c3=TruncatedSeries1.from_json(body["c3"]),
            degree=int(body["degree"]),
        )
    except KeyError as exc:
        raise ParseError(f"normal form JSON missing field {exc}") from exc


def transform_to_json(t: TransformRecord) -> dict:
    return {
        "rotation": [[float(x) for x in row] for row in t.rotation],
        "source_u": t.source_u.to_json(),
        "source_v": t.source_v.to_json(),
    }


def transform_from_json(data: dict) -> TransformRecord:
    try:
        return TransformRecord(
            rotation=np.array(data["rotation"], dtype=float),
            source_u=TruncatedSeries2.from_json(data["source_u"]),
            source_v=TruncatedSeries2.from_json(data["source_v"]),
        )
    except KeyError as exc:
        raise ParseError(f"transform JSON missing field {exc}") from exc
