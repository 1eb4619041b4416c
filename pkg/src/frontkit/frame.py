"""Frame data along a normal-form germ.

The distinguished coordinates make f_u divisible by u and f_v by v, so
the fields phi1 = f_u/u and phi2 = f_v/v are regular and frame the
surface across the singular axes.  Everything here (unit normal,
discriminant, fundamental forms, curvature) is computed from the
literal normal-form polynomial; no constants are imported from outside
the definitions.

Two routes to the curvature are provided on purpose.  ``curvatures``
uses raw derivatives of f at a point and fails on the singular set;
``kh_asymptotics`` factors the singular parts out and returns the jets
of uv*K and uv*H, which are finite at the origin.  Tests compare the
two off the axes.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import PreconditionError
from .germ import NormalFormGerm, expand
from .series import TruncatedSeries2, reciprocal, sqrt_series


# -- 3-vector helpers (duck-typed: series or floats) ---------------------


def cross3(a, b):
    return (
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    )


def dot3(a, b):
    return a[0] * b[0] + a[1] * b[1] + a[2] * b[2]


def det3(a, b, c):
    return dot3(a, cross3(b, c))


@dataclass(frozen=True)
class PhiFields:
    """phi1 = f_u/u, phi2 = f_v/v, phi3 = (phi1)_v / v = (phi2)_u / u."""

    phi1: tuple
    phi2: tuple
    phi3: tuple


@dataclass(frozen=True)
class FrameSeries:
    """All tilde quantities of the curvature factorization, as jets."""

    phi: PhiFields
    ntilde: tuple
    delta: TruncatedSeries2
    nu: tuple
    Et: TruncatedSeries2
    Ft: TruncatedSeries2
    Gt: TruncatedSeries2
    Lt: TruncatedSeries2
    Mt: TruncatedSeries2
    Nt: TruncatedSeries2


@dataclass(frozen=True)
class FundamentalForms:
    """First/second fundamental form scalars at a point, with the normal."""

    E: float
    F: float
    G: float
    L: float
    M: float
    N: float
    nu: np.ndarray

    def __post_init__(self):
        if self.E * self.G - self.F**2 < -1e-10:
            raise PreconditionError("EG - F^2 must be nonnegative")
        if abs(np.linalg.norm(self.nu) - 1.0) > 1e-10:
            raise PreconditionError("unit normal is not unit length")


@dataclass(frozen=True)
class CurvatureAsymptotics:
    """Jets of uv*K and uv*H; both finite at the origin."""

    uvK_series: TruncatedSeries2
    uvH_series: TruncatedSeries2


def phi_fields(nf: NormalFormGerm) -> PhiFields:
    """Series division of f_u by u and f_v by v; lossless by structure."""
    m = expand(nf)
    phi1 = tuple(c.partial("u").divide_u() for c in m.components)
    phi2 = tuple(c.partial("v").divide_v() for c in m.components)
    phi3 = tuple(c.partial("v").divide_v() for c in phi1)
    return PhiFields(phi1, phi2, phi3)


def frame_series(nf: NormalFormGerm) -> FrameSeries:
    phi = phi_fields(nf)
    ntilde = cross3(phi.phi1, phi.phi2)
    delta = sqrt_series(dot3(ntilde, ntilde))
    inv_delta = reciprocal(delta)
    nu = tuple(c * inv_delta for c in ntilde)
    phi1_u = tuple(c.partial("u") for c in phi.phi1)
    phi2_v = tuple(c.partial("v") for c in phi.phi2)
    return FrameSeries(
        phi=phi,
        ntilde=ntilde,
        delta=delta,
        nu=nu,
        Et=dot3(phi.phi1, phi.phi1),
        Ft=dot3(phi.phi1, phi.phi2),
        Gt=dot3(phi.phi2, phi.phi2),
        Lt=det3(phi1_u, phi.phi1, phi.phi2),
        Mt=det3(phi.phi3, phi.phi1, phi.phi2),
        Nt=det3(phi2_v, phi.phi1, phi.phi2),
    )


def unit_normal(nf: NormalFormGerm, point) -> np.ndarray:
    """Unit normal at a source point, oriented so nu(0,0) = (0,0,1)."""
    phi = phi_fields(nf)
    p1 = np.array([c.evaluate(point) for c in phi.phi1])
    p2 = np.array([c.evaluate(point) for c in phi.phi2])
    n = np.cross(p1, p2)
    norm = np.linalg.norm(n)
    if norm < 1e-14:
        raise PreconditionError(f"phi fields degenerate at {point}")
    return n / norm


def unit_normal_series(nf: NormalFormGerm) -> tuple:
    """Jet of the unit normal about the origin."""
    return frame_series(nf).nu


def normal_derivatives_at_origin(nf: NormalFormGerm) -> tuple[np.ndarray, np.ndarray]:
    nu = unit_normal_series(nf)
    nu_u = np.array([c.partial("u").constant_term for c in nu])
    nu_v = np.array([c.partial("v").constant_term for c in nu])
    return nu_u, nu_v


def discriminant(nf: NormalFormGerm) -> TruncatedSeries2:
    """lambda = det(f_u, f_v, nu) as a series; vanishes exactly on {uv=0}."""
    m = expand(nf)
    fu = tuple(c.partial("u") for c in m.components)
    fv = tuple(c.partial("v") for c in m.components)
    nu = unit_normal_series(nf)
    return det3(fu, fv, nu)


@dataclass(frozen=True)
class FrontWitness:
    is_front: bool
    nu_u: np.ndarray
    nu_v: np.ndarray


def is_front_at_origin(nf: NormalFormGerm, tol: float = 1e-9) -> FrontWitness:
    """Front criterion c1(0)*c3(0) != 0 with the rank witness (nu_u, nu_v)."""
    nu_u, nu_v = normal_derivatives_at_origin(nf)
    front = abs(nf.c1.constant_term * nf.c3.constant_term) > tol
    return FrontWitness(front, nu_u, nu_v)


def fundamental_forms(nf: NormalFormGerm, point) -> FundamentalForms:
    u, v = float(point[0]), float(point[1])
    m = expand(nf)
    fu = np.array([c.partial("u").evaluate((u, v)) for c in m.components])
    fv = np.array([c.partial("v").evaluate((u, v)) for c in m.components])
    fuu = np.array([c.partial("u").partial("u").evaluate((u, v)) for c in m.components])
    fuv = np.array([c.partial("u").partial("v").evaluate((u, v)) for c in m.components])
    fvv = np.array([c.partial("v").partial("v").evaluate((u, v)) for c in m.components])
    nu = unit_normal(nf, (u, v))
    return FundamentalForms(
        E=float(fu @ fu),
        F=float(fu @ fv),
        G=float(fv @ fv),
        L=float(fuu @ nu),
        M=float(fuv @ nu),
        N=float(fvv @ nu),
        nu=nu,
    )


def curvatures(nf: NormalFormGerm, point) -> tuple[float, float]:
    """Gaussian and mean curvature at an immersed point (off the axes)."""
    u, v = float(point[0]), float(point[1])
    if u == 0.0 or v == 0.0:
        raise PreconditionError(f"point {point} lies on the singular set uv = 0")
    ff = fundamental_forms(nf, (u, v))
    denom = ff.E * ff.G - ff.F**2
    if denom <= 0.0:
        raise PreconditionError(f"first form degenerate at {point}")
    K = (ff.L * ff.N - ff.M**2) / denom
    H = (ff.E * ff.N - 2.0 * ff.F * ff.M + ff.G * ff.L) / (2.0 * denom)
    return K, H


def kh_asymptotics(nf: NormalFormGerm) -> CurvatureAsymptotics:
    """Jets of uv*K and uv*H from the tilde factorization.

    uv*K = (Lt*Nt - uv*Mt^2) / (delta^2 (Et*Gt - Ft^2))
    uv*H = (u*Et*Nt - 2uv*Ft*Mt + v*Gt*Lt) / (2 delta (Et*Gt - Ft^2))
    """
    fs = frame_series(nf)
    ef = fs.Et * fs.Gt - fs.Ft * fs.Ft
    num_K = fs.Lt * fs.Nt - (fs.Mt * fs.Mt).shift(1, 1)
    uvK = num_K * reciprocal(fs.delta * fs.delta * ef)
    num_H = (
        (fs.Et * fs.Nt).shift(1, 0)
        - 2.0 * (fs.Ft * fs.Mt).shift(1, 1)
        + (fs.Gt * fs.Lt).shift(0, 1)
    )
    uvH = num_H * reciprocal(2.0 * (fs.delta * ef))
    return CurvatureAsymptotics(uvK_series=uvK, uvH_series=uvH)
