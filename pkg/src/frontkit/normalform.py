"""Constructive reduction to the normal form.

Pipeline: verify the coordinate hypothesis (f_u = u*phi1, f_v = v*phi2
with independent phi's at 0), rotate the target so the phi directions
land at 2k1(1,a,0) and 2k2(-1,a,0), absorb the first component into
u^2 - v^2 by the square-root coordinate change, kill the u^2 v^2 block
of the second component by the residual gauge moves, and sign-normalize
with the discrete quarter-turn/pi-rotation moves so c1(0) >= 0 and
c3(0) >= 0.  The accumulated (rotation, source jet) pair is returned so
callers can verify A o m o s^{-1} = expand(nf) coefficientwise.

The square-root substitution lands the first component exactly (to
truncation) in one pass; the loop re-splits and repeats only to flush
float residue, capped at the truncation degree.

On the gauge step: source changes (u, v) -> (u sqrt(1 + v^2 h),
v sqrt(1 + u^2 h)) preserve u^2 - v^2 exactly for every h and shift the
second component's u^2 v^2 block by 2a*h + higher order, so that block
is pure gauge, not an invariant.  Normalizing it to zero makes the
remaining data (a; b1, b3; c1, c2, c3) a complete, deterministic
invariant of the germ under source diffeomorphism + target rotation.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import NumericalError, PreconditionError, StructureError
from .germ import (
    MapGerm,
    NormalFormGerm,
    TransformRecord,
    assemble_b,
    assemble_c,
    expand,
    split_bc,
)
from .series import (
    TruncatedSeries2,
    compose2,
    invert_coordinate_change,
    max_coeff_diff,
    sqrt_series,
)

#: Residual below which the first component counts as u^2 - v^2.
FIRST_COMPONENT_TOL = 1e-10

#: Margin for the c1(0) >= 0, c3(0) >= 0 sign normalization.
SIGN_TOL = 1e-9

#: Boundary tolerance for the uniqueness-theorem strict positivity.
CANONICAL_TOL = 1e-9


def check_hypothesis(m: MapGerm):
    """Verify f_u = u*phi1 and f_v = v*phi2 with independent phi(0)'s.

    Returns the quotient fields (phi1, phi2) as series triples.
    """
    try:
        phi1 = tuple(c.partial("u").divide_u() for c in m.components)
    except StructureError as exc:
        raise StructureError(f"f_u is not divisible by u: {exc}") from exc
    try:
        phi2 = tuple(c.partial("v").divide_v() for c in m.components)
    except StructureError as exc:
        raise StructureError(f"f_v is not divisible by v: {exc}") from exc
    w1 = np.array([c.constant_term for c in phi1])
    w2 = np.array([c.constant_term for c in phi2])
    if np.linalg.norm(np.cross(w1, w2)) < 1e-10 * max(1.0, np.linalg.norm(w1) * np.linalg.norm(w2)):
        raise PreconditionError(
            f"phi fields degenerate at the origin: phi1(0)={w1.tolist()}, phi2(0)={w2.tolist()}"
        )
    return phi1, phi2


def target_rotation(w1, w2):
    """Rotation A with A w1 = 2 k1 (1, a, 0) and A w2 = 2 k2 (-1, a, 0).

    The plane of (w1, w2) is rotated onto the xy-plane with the oriented
    normal w1 x w2 going to +e3; the in-plane bisector of the two
    directions goes to +e2.  Then a = cot(half-angle between w1 and w2)
    and 2 k_i = |w_i| sin(half-angle).
    """
    w1 = np.asarray(w1, dtype=float)
    w2 = np.asarray(w2, dtype=float)
    n = np.cross(w1, w2)
    nn = np.linalg.norm(n)
    if nn < 1e-12 * max(1.0, np.linalg.norm(w1) * np.linalg.norm(w2)):
        raise PreconditionError("target_rotation: input vectors are linearly dependent")
    n_hat = n / nn
    u1 = w1 / np.linalg.norm(w1)
    u2 = w2 / np.linalg.norm(w2)
    bis = u1 + u2
    bn = np.linalg.norm(bis)
    if bn < 1e-12:
        # antiparallel unit directions would mean a = 0; dependent anyway
        raise PreconditionError("target_rotation: a = 0 configuration is unsupported")
    m_hat = bis / bn
    t_hat = np.cross(m_hat, n_hat)
    A = np.vstack([t_hat, m_hat, n_hat])

    cos_alpha = float(np.clip(u1 @ m_hat, -1.0, 1.0))
    sin_alpha = float(np.clip(u1 @ t_hat, -1.0, 1.0))
    if sin_alpha <= 0 or cos_alpha <= 0:
        raise NumericalError("target_rotation: bisector construction produced a <= 0")
    a = cos_alpha / sin_alpha
    k1 = np.linalg.norm(w1) * sin_alpha / 2.0
    k2 = np.linalg.norm(w2) * sin_alpha / 2.0

    for w, k, sign in ((w1, k1, 1.0), (w2, k2, -1.0)):
        target = 2.0 * k * np.array([sign, a, 0.0])
        if np.max(np.abs(A @ w - target)) > 1e-9 * max(1.0, np.linalg.norm(w)):
            raise NumericalError("target_rotation: verification of the image directions failed")
    return A, float(k1), float(k2), float(a)


@dataclass(frozen=True)
class ReduceResult:
    normal_form: NormalFormGerm
    transform: TransformRecord
    residual: float
    canonical: bool


def _structured_sqrt_changes(first: TruncatedSeries2, r: int):
    """Coordinate change absorbing k1 u^2 - k2 v^2 + g into u^2 - v^2.

    The square-root arguments are polynomials of degree < r, so padding
    them to degree r is exact and no jet order is lost.
    """
    k1 = first.coefficient(2, 0)
    k2 = -first.coefficient(0, 2)
    if k1 <= 0 or k2 <= 0:
        raise StructureError(f"first component has k1={k1!r}, k2={k2!r}; expected both positive")
    g = first - TruncatedSeries2.from_terms(first.degree, [(2, 0, k1), (0, 2, -k2)])
    # g = u^3 g1(u) + u^2 v^2 g2(u, v) + v^3 g3(v); stray monomials are fatal
    arg_u = np.zeros((r + 1, r + 1))  # k1 + u g1(u) + v^2 g2(u, v)
    arg_v = np.zeros((r + 1, r + 1))  # k2 - v g3(v)
    arg_u[0, 0] = k1
    arg_v[0, 0] = k2
    for i, j, c in g.terms():
        if j == 0 and i >= 3:
            arg_u[i - 2, 0] += c
        elif i == 0 and j >= 3:
            arg_v[0, j - 2] -= c
        elif i >= 2 and j >= 2:
            arg_u[i - 2, j] += c
        else:
            raise StructureError(
                "first component violates the normal-form structure", monomial=(i, j), value=c
            )
    su = sqrt_series(TruncatedSeries2(r, arg_u)).shift(1, 0).truncate(r)
    sv = sqrt_series(TruncatedSeries2(r, arg_v)).shift(0, 1).truncate(r)
    return su, sv


def _gauge_change(h: TruncatedSeries2, r: int):
    """The residual move (u, v) -> (u sqrt(1 + v^2 h), v sqrt(1 + u^2 h)).

    It preserves u^2 - v^2 exactly and shifts the u^2 v^2 block of the
    second component by 2a*h plus higher-order feedback, which is the
    freedom used to normalize that block away.
    """
    one = TruncatedSeries2.constant(r, 1.0)
    su = sqrt_series(one + h.shift(0, 2).truncate(r)).shift(1, 0).truncate(r)
    sv = sqrt_series(one + h.shift(2, 0).truncate(r)).shift(0, 1).truncate(r)
    return su, sv


# the four sign-normalization moves: (source linear map, target rotation)
_ROT_Y_PI = np.diag([-1.0, 1.0, -1.0])
_CANDIDATE_MOVES = (
    ((1.0, 0.0, 0.0, 1.0), np.eye(3)),
    ((-1.0, 0.0, 0.0, -1.0), np.eye(3)),
    ((0.0, 1.0, -1.0, 0.0), _ROT_Y_PI),
    ((0.0, -1.0, 1.0, 0.0), _ROT_Y_PI),
)


def reduce(m: MapGerm, degree: int | None = None) -> ReduceResult:
    """Produce the normal form of a germ satisfying the hypothesis.

    Returns the coefficient data, the achieving transform, the residual
    of the verification A o m o s^{-1} = expand(nf), and whether the
    result is in the strict-uniqueness region (a, c1(0), c3(0) > 0).
    """
    r = m.degree if degree is None else int(degree)
    if r > m.degree:
        raise PreconditionError(f"requested degree {r} exceeds input jet degree {m.degree}")
    work = m.truncate(r)
    phi1, phi2 = check_hypothesis(work)
    w1 = np.array([c.constant_term for c in phi1])
    w2 = np.array([c.constant_term for c in phi2])
    A0, _, _, _ = target_rotation(w1, w2)

    current = work.rotate(A0)
    rotation = np.array(A0)
    sigma_u = TruncatedSeries2.var_u(r)
    sigma_v = TruncatedSeries2.var_v(r)

    target_x = TruncatedSeries2.from_terms(r, [(2, 0, 1.0), (0, 2, -1.0)])
    for _ in range(r):
        if max_coeff_diff(current.x, target_x) <= FIRST_COMPONENT_TOL:
            break
        su, sv = _structured_sqrt_changes(current.x, r)
        p, q = invert_coordinate_change(su, sv)
        current = current.compose_source(p, q)
        sigma_u = compose2(sigma_u, p, q)
        sigma_v = compose2(sigma_v, p, q)
    else:
        resid = max_coeff_diff(current.x, target_x)
        raise NumericalError(
            f"first component failed to reach u^2 - v^2 in {r} passes (residual {resid:.3e})"
        )

    # gauge normalization: the moves of _gauge_change stabilize u^2 - v^2,
    # so the u^2 v^2 block of the second component is not an invariant on
    # its own.  Normalize it to zero (each pass cancels the lowest
    # surviving order; feedback enters strictly higher).
    for _ in range(r):
        split = split_bc(current)
        if split.b2.max_abs() <= FIRST_COMPONENT_TOL:
            break
        h = split.b2 * (-1.0 / (2.0 * split.a))
        su, sv = _gauge_change(h, r)
        current = current.compose_source(su, sv)
        sigma_u = compose2(sigma_u, su, sv)
        sigma_v = compose2(sigma_v, su, sv)
    else:
        raise NumericalError(
            f"u^2 v^2 block failed to normalize in {r} passes "
            f"(residual {split_bc(current).b2.max_abs():.3e})"
        )

    # discrete sign normalization: pick the move giving c1(0), c3(0) >= 0
    chosen = None
    for lin, rot in _CANDIDATE_MOVES:
        candidate = current.substitute_linear(*lin).rotate(rot)
        nf = split_bc(candidate)
        c10, c30 = nf.c1.constant_term, nf.c3.constant_term
        if c10 >= -SIGN_TOL and c30 >= -SIGN_TOL:
            entry = (nf, lin, rot, c10, c30)
            if chosen is None:
                chosen = entry
            else:
                # boundary tie: prefer c1(0) >= c3(0), then lexicographic jets
                _, _, _, p10, p30 = chosen
                if (p10 >= p30) != (c10 >= c30):
                    if c10 >= c30:
                        chosen = entry
                elif tuple(canonical_jet(nf, strict=False)) < tuple(
                    canonical_jet(chosen[0], strict=False)
                ):
                    chosen = entry
    if chosen is None:
        raise NumericalError("sign normalization found no admissible candidate")
    nf, lin, rot, c10, c30 = chosen
    lin_u = TruncatedSeries2.from_terms(r, [(1, 0, lin[0]), (0, 1, lin[1])])
    lin_v = TruncatedSeries2.from_terms(r, [(1, 0, lin[2]), (0, 1, lin[3])])
    sigma_u = compose2(sigma_u, lin_u, lin_v)
    sigma_v = compose2(sigma_v, lin_u, lin_v)
    rotation = rot @ rotation

    transform = TransformRecord(rotation=rotation, source_u=sigma_u, source_v=sigma_v)
    reproduced = transform.apply(work)
    residual = max(
        max_coeff_diff(ca, cb) for ca, cb in zip(reproduced.components, expand(nf).components)
    )
    if residual > 1e-8:
        raise NumericalError(f"transform verification residual {residual:.3e} exceeds 1e-8")
    canonical = c10 > CANONICAL_TOL and c30 > CANONICAL_TOL
    return ReduceResult(normal_form=nf, transform=transform, residual=residual, canonical=canonical)


def canonical_jet(nf: NormalFormGerm, degree: int | None = None, strict: bool = True) -> np.ndarray:
    """Flat invariant vector (a, jet of b, jet of c) in graded-lex order.

    Unique on the strict-positivity region; with ``strict`` the boundary
    cases (where uniqueness is not guaranteed) raise instead of
    returning a vector that silently is not an invariant.
    """
    r = nf.degree if degree is None else int(degree)
    if r > nf.degree:
        raise PreconditionError(f"requested jet degree {r} exceeds stored degree {nf.degree}")
    if strict and not (
        nf.c1.constant_term > CANONICAL_TOL and nf.c3.constant_term > CANONICAL_TOL
    ):
        raise PreconditionError(
            "canonical_jet on the boundary c1(0) = 0 or c3(0) = 0 is not unique; "
            "pass strict=False to get the raw vector"
        )
    b = assemble_b(nf).truncate(r)
    c = assemble_c(nf).truncate(r)
    out = [nf.a]
    for series in (b, c):
        for d in range(r + 1):
            for i in range(d, -1, -1):
                out.append(series.coeffs[i, d - i])
    return np.array(out)


def jets_agree(nf1: NormalFormGerm, nf2: NormalFormGerm, tol: float = 1e-6) -> bool:
    j1 = canonical_jet(nf1, strict=False)
    j2 = canonical_jet(nf2, strict=False)
    n = min(len(j1), len(j2))
    return bool(np.max(np.abs(j1[:n] - j2[:n])) <= tol)
