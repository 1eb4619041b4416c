"""Extrinsic symmetries of a normal-form germ.

Three isometries can fix the image as a set germ: reflection in the
tangent plane, reflection in the principal plane, and the pi-rotation
about the center line.  At jet level each corresponds to a parity
pattern of the coefficient functions b and c, checked coefficientwise;
for polynomial germs a detected symmetry is an exact identity
T f(sigma(u, v)) = f(u, v), which ``verify_symmetry_on_image`` samples.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import PreconditionError
from .germ import NormalFormGerm, assemble_b, assemble_c, expand

#: symmetry name -> (target matrix diag(e1, 1, e2), source substitution matrix)
MOVES = {
    "tangent_reflection": (np.diag([1.0, 1.0, -1.0]), np.array([[-1.0, 0.0], [0.0, -1.0]])),
    "principal_reflection": (np.diag([-1.0, 1.0, 1.0]), np.array([[0.0, 1.0], [1.0, 0.0]])),
    "center_rotation": (np.diag([-1.0, 1.0, -1.0]), np.array([[0.0, -1.0], [-1.0, 0.0]])),
}


@dataclass(frozen=True)
class GeometricElements:
    """Distinguished planes and lines at the singular point (unit vectors)."""

    tangent_plane_normal: np.ndarray
    normal_plane_normal: np.ndarray
    principal_plane_normal: np.ndarray
    center_line: np.ndarray
    singular_line_1: np.ndarray
    singular_line_2: np.ndarray


@dataclass(frozen=True)
class SymmetryFlags:
    tangent_reflection: bool
    principal_reflection: bool
    center_rotation: bool

    def flag(self, name: str) -> bool:
        if name not in MOVES:
            raise PreconditionError(f"unknown symmetry {name!r}; expected one of {sorted(MOVES)}")
        return getattr(self, name)


def geometric_elements(nf: NormalFormGerm) -> GeometricElements:
    """Computed from the actual second derivatives and unit normal.

    For every valid germ: tangent plane z = 0, singular lines spanned
    by (1, a, 0) and (-1, a, 0), center line the y-axis, normal plane
    y = 0, principal plane x = 0.
    """
    from .edgeinv import singular_curve
    from .frame import unit_normal

    nu0 = unit_normal(nf, (0.0, 0.0))
    d1 = singular_curve(nf, "u").derivative_at(2, 0.0)
    d2 = singular_curve(nf, "v").derivative_at(2, 0.0)
    s1 = d1 / np.linalg.norm(d1)
    s2 = d2 / np.linalg.norm(d2)
    center = s1 + s2
    center = center / np.linalg.norm(center)
    principal = np.cross(nu0, center)
    principal = principal / np.linalg.norm(principal)
    return GeometricElements(
        tangent_plane_normal=nu0,
        normal_plane_normal=center,
        principal_plane_normal=principal,
        center_line=center,
        singular_line_1=s1,
        singular_line_2=s2,
    )


def _parity_residual(series, mode: str) -> float:
    """Worst violation of the coefficient condition for one series."""
    worst = 0.0
    c = series.coeffs
    r = series.degree
    for i in range(r + 1):
        for j in range(r + 1 - i):
            if mode == "even":  # s(u,v) = s(-u,-v)
                if (i + j) % 2 == 1:
                    worst = max(worst, abs(c[i, j]))
            elif mode == "odd":  # s(u,v) = -s(-u,-v)
                if (i + j) % 2 == 0:
                    worst = max(worst, abs(c[i, j]))
            elif mode == "swap":  # s(u,v) = s(v,u)
                worst = max(worst, abs(c[i, j] - c[j, i]))
            elif mode == "antiswap_even":  # s(u,v) = s(-v,-u)
                worst = max(worst, abs(c[i, j] - (-1.0) ** (i + j) * c[j, i]))
            elif mode == "antiswap_odd":  # s(u,v) = -s(-v,-u)
                worst = max(worst, abs(c[i, j] + (-1.0) ** (i + j) * c[j, i]))
            else:
                raise PreconditionError(f"unknown parity mode {mode!r}")
    return worst


def symmetry_residuals(nf: NormalFormGerm) -> dict:
    """Coefficientwise violation of each symmetry's parity condition."""
    b = assemble_b(nf)
    c = assemble_c(nf)
    return {
        "tangent_reflection": max(_parity_residual(b, "even"), _parity_residual(c, "odd")),
        "principal_reflection": max(_parity_residual(b, "swap"), _parity_residual(c, "swap")),
        "center_rotation": max(
            _parity_residual(b, "antiswap_even"), _parity_residual(c, "antiswap_odd")
        ),
    }


def detect_symmetries(nf: NormalFormGerm, tol: float = 1e-9) -> SymmetryFlags:
    """Jet-level symmetry flags; 'symmetric to degree r' for truncated data."""
    res = symmetry_residuals(nf)
    return SymmetryFlags(
        tangent_reflection=bool(res["tangent_reflection"] <= tol),
        principal_reflection=bool(res["principal_reflection"] <= tol),
        center_rotation=bool(res["center_rotation"] <= tol),
    )


def verify_symmetry_on_image(nf: NormalFormGerm, name: str, sample_count: int = 64) -> float:
    """Max over samples of |T f(sigma(u,v)) - f(u,v)| for the named move.

    For polynomial germs whose jet condition holds this is an exact
    identity, so the residual is float noise; for a move that does not
    hold it reports the actual deviation without asserting anything.
    """
    if name not in MOVES:
        raise PreconditionError(f"unknown symmetry {name!r}; expected one of {sorted(MOVES)}")
    T, S = MOVES[name]
    m = expand(nf)
    n_side = max(int(np.sqrt(sample_count)), 2)
    grid = np.linspace(-0.3, 0.3, n_side)
    uu, vv = np.meshgrid(grid, grid)
    pts = np.stack([uu.ravel(), vv.ravel()])
    src = S @ pts
    lhs = T @ m.evaluate((src[0], src[1]))
    rhs = m.evaluate((pts[0], pts[1]))
    return float(np.max(np.abs(lhs - rhs)))
