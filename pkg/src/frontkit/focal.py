"""Distance-squared function machinery and the focal-locus classification.

For a target point x the family member d_x(u, v) = |x - f(u, v)|^2 / 2
has a critical point at the origin; its singularity type stratifies the
focal set.  Two independent routes are implemented:

* ``recognize_function_singularity`` is a general small-corank
  recognizer: Hessian corank, jet-level splitting lemma for corank one
  (read off the A_k order), cubic/quartic discriminants for corank two
  (D4 versus X9).  It never consults the closed forms below.
* ``classify_focal_point`` walks the closed-form decision tree in the
  normal-form coefficients: the Hessian is diag(-2(x1 + a x2),
  2(x1 - a x2)), so the focal locus is the plane pair x1 = -a x2 and
  x1 = +a x2.  On the first plane the Hessian kernel is the u-direction
  and the thresholds read the (b1, c1) data; on the second the kernel is
  the v-direction and (b3, c3) take over.  (The worked example in the
  source lists its A4 threshold for the minus plane, but the u-kernel
  derivation and the recognizer both place that threshold formula with
  the plane's own kernel data; the calibration test pins this.)

Every classification is cross-checked against the recognizer by
default; a disagreement is raised as a diagnostic rather than returned.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import NumericalError, PreconditionError
from .germ import NormalFormGerm, expand
from .series import TruncatedSeries1, TruncatedSeries2, compose2

LABELS = ("A1", "A2", "A3", "A4", "D4", "X9", "Unclassified")

#: relative tolerance for plane membership and threshold equalities
PLANE_TOL = 1e-9

#: |e| in (tol, AMBIGUOUS_FACTOR * tol] is reported instead of guessed
AMBIGUOUS_FACTOR = 10.0


def dist_sq_jet(nf: NormalFormGerm, x, degree: int | None = None) -> TruncatedSeries2:
    """Jet of d_x = |x - f|^2 / 2 minus its constant term.

    Both the gradient terms -x . f and the quadratic remainder |f|^2/2
    are assembled exactly; the gradient at 0 vanishes automatically.
    """
    r = nf.degree if degree is None else int(degree)
    m = expand(nf).truncate(r)
    x = np.asarray(x, dtype=float)
    if x.shape != (3,):
        raise PreconditionError(f"target point must be a 3-vector, got shape {x.shape}")
    acc = TruncatedSeries2(r)
    for xi, comp in zip(x, m.components):
        acc = acc - float(xi) * comp
    for comp in m.components:
        acc = acc + 0.5 * (comp * comp)
    return acc


@dataclass(frozen=True)
class CoeffMatrix:
    """Taylor-coefficient matrix in the staircase layout of the source.

    ``entries[row, col]`` is the coefficient of u^col v^(m - row): the
    first index bounds the v-degree (rows printed from j = m down to 0),
    the second the u-degree.  (The defining display in the source
    transposes its own later usage; this layout is the one the worked
    matrices and the classification actually use.)  Slots beyond the
    jet's truncation are NaN with ``known`` False.
    """

    m: int
    n: int
    entries: np.ndarray
    known: np.ndarray

    def entry(self, i: int, j: int) -> float:
        """Coefficient of u^i v^j; errors when outside or unknown."""
        if not (0 <= i <= self.n and 0 <= j <= self.m):
            raise PreconditionError(f"entry u^{i} v^{j} outside C_{{{self.m},{self.n}}}")
        if not self.known[self.m - j, i]:
            raise PreconditionError(f"entry u^{i} v^{j} lies beyond the jet truncation")
        return float(self.entries[self.m - j, i])


def coeff_matrix(h: TruncatedSeries2, m: int, n: int, strict: bool = True) -> CoeffMatrix:
    """Extract C_{m,n}(h); with strict=True all requested slots must be known."""
    entries = np.full((m + 1, n + 1), np.nan)
    known = np.zeros((m + 1, n + 1), dtype=bool)
    for j in range(m + 1):
        for i in range(n + 1):
            if i + j <= h.degree:
                entries[m - j, i] = h.coefficient(i, j)
                known[m - j, i] = True
    if strict and not known.all():
        raise PreconditionError(
            f"C_{{{m},{n}}} requests entries beyond truncation degree {h.degree}"
        )
    return CoeffMatrix(m=m, n=n, entries=entries, known=known)


@dataclass(frozen=True)
class FocalClass:
    label: str
    witness: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.label not in LABELS:
            raise PreconditionError(f"unknown focal label {self.label!r}")


def _cubic_discriminant(a, b, c, d) -> float:
    return 18 * a * b * c * d - 4 * b**3 * d + b**2 * c**2 - 4 * a * c**3 - 27 * a**2 * d**2


def _quartic_discriminant(a, b, c, d, e) -> float:
    return (
        256 * a**3 * e**3
        - 192 * a**2 * b * d * e**2
        - 128 * a**2 * c**2 * e**2
        + 144 * a**2 * c * d**2 * e
        - 27 * a**2 * d**4
        + 144 * a * b**2 * c * e**2
        - 6 * a * b**2 * d**2 * e
        - 80 * a * b * c**2 * d * e
        + 18 * a * b * c * d**3
        + 16 * a * c**4 * e
        - 4 * a * c**3 * d**2
        - 27 * b**4 * e**2
        + 18 * b**3 * c * d * e
        - 4 * b**3 * d**3
        - 4 * b**2 * c**3 * e
        + b**2 * c**2 * d**2
    )


def _split_off_square(h: TruncatedSeries2, kernel: np.ndarray, tol: float):
    """Jet-level splitting lemma for corank one.

    Rotate the kernel direction onto the v-axis, solve d h / d u = 0
    for u = psi(v) degree by degree, and return the restriction
    g(v) = h(psi(v), v): the residual one-variable singularity.
    """
    r = h.degree
    k = kernel / np.linalg.norm(kernel)
    t = np.array([k[1], -k[0]])  # unit, orthogonal, (t, k) positively oriented
    rotated = h.substitute_linear(t[0], k[0], t[1], k[1])
    du = rotated.partial("u")
    c_lin = du.coefficient(1, 0)
    if abs(c_lin) < tol:
        raise NumericalError("splitting lemma: nondegenerate direction lost below tolerance")
    b_rest = du - TruncatedSeries2.monomial(du.degree, 1, 0, c_lin)
    psi = TruncatedSeries2(r)  # u = psi(v), iterated to fixed point
    vvar = TruncatedSeries2.var_v(r)
    for _ in range(r):
        psi = (-1.0 / c_lin) * compose2(b_rest.truncate(r), psi, vvar)
    g = compose2(rotated, psi, vvar).restrict_u0()
    return g


def recognize_function_singularity(h: TruncatedSeries2, tol: float = 1e-9) -> FocalClass:
    """Label the singularity of a function jet at a critical origin.

    Corank 0 -> A1.  Corank 1 -> split off the square and read the
    order k+1 of the one-variable remainder -> A_k (orders beyond A4 or
    beyond truncation -> Unclassified).  Corank 2 -> nondegenerate
    cubic (three distinct projective roots) -> D4; vanishing cubic with
    a four-distinct-roots quartic -> X9; anything else Unclassified.
    """
    scale = max(1.0, h.max_abs())
    atol = tol * scale
    if abs(h.constant_term) > atol or abs(h.coefficient(1, 0)) > atol or abs(h.coefficient(0, 1)) > atol:
        raise PreconditionError("recognizer needs h(0) = 0 and dh(0) = 0")
    hess = np.array(
        [[2.0 * h.coefficient(2, 0), h.coefficient(1, 1)], [h.coefficient(1, 1), 2.0 * h.coefficient(0, 2)]]
    )
    eigvals, eigvecs = np.linalg.eigh(hess)
    small = np.abs(eigvals) <= atol
    corank = int(small.sum())

    if corank == 0:
        return FocalClass("A1", {"hessian_eigenvalues": eigvals.tolist()})

    if corank == 1:
        kernel = eigvecs[:, int(np.argmin(np.abs(eigvals)))]
        g = _split_off_square(h, kernel, atol)
        for k in range(3, g.degree + 1):
            if abs(g.coefficient(k)) > atol:
                if k <= 5:
                    return FocalClass(
                        f"A{k - 1}", {"residual_order": k, "residual_coefficient": g.coefficient(k)}
                    )
                return FocalClass(
                    "Unclassified", {"residual_order": k, "note": "A-order beyond A4 labels"}
                )
        return FocalClass(
            "Unclassified", {"note": f"residual vanishes to truncation degree {g.degree}"}
        )

    # corank 2: decide by the cubic, then the quartic
    cubic = [h.coefficient(3, 0), h.coefficient(2, 1), h.coefficient(1, 2), h.coefficient(0, 3)]
    cubic_scale = max(abs(v) for v in cubic)
    if cubic_scale > atol:
        disc3 = _cubic_discriminant(*cubic)
        if abs(disc3) > tol * max(1.0, cubic_scale) ** 4:
            return FocalClass("D4", {"cubic_discriminant": disc3})
        return FocalClass("Unclassified", {"note": "degenerate cubic", "cubic_discriminant": disc3})
    quartic = [
        h.coefficient(4, 0),
        h.coefficient(3, 1),
        h.coefficient(2, 2),
        h.coefficient(1, 3),
        h.coefficient(0, 4),
    ]
    quartic_scale = max(abs(v) for v in quartic)
    if quartic_scale > atol:
        disc4 = _quartic_discriminant(*quartic)
        if abs(disc4) > tol * max(1.0, quartic_scale) ** 6:
            return FocalClass("X9", {"quartic_discriminant": disc4})
        return FocalClass(
            "Unclassified", {"note": "degenerate quartic", "quartic_discriminant": disc4}
        )
    return FocalClass("Unclassified", {"note": "cubic and quartic both vanish"})


def focal_planes(nf: NormalFormGerm):
    """Unit normals of the two focal planes x1 = -a x2 and x1 = +a x2."""
    a = nf.a
    n1 = np.array([1.0, a, 0.0])
    n2 = np.array([1.0, -a, 0.0])
    return n1 / np.linalg.norm(n1), n2 / np.linalg.norm(n2)


def _axis_data(series: TruncatedSeries1):
    d0 = series.coefficient(0)
    d1 = series.coefficient(1) if series.degree >= 1 else 0.0
    d2 = 2.0 * series.coefficient(2) if series.degree >= 2 else 0.0
    return d0, d1, d2


def classify_focal_point(
    nf: NormalFormGerm, x, tol: float = PLANE_TOL, cross_check: bool = True
) -> FocalClass:
    """Closed-form focal classification of the target point x.

    Requires the strict-uniqueness region a > 0, c1(0) > 0, c3(0) > 0.
    Membership calls within a factor 10 of the tolerance are reported
    as ambiguous rather than silently resolved.
    """
    if not (nf.c1.constant_term > 0 and nf.c3.constant_term > 0):
        raise PreconditionError("classification needs c1(0) > 0 and c3(0) > 0")
    x = np.asarray(x, dtype=float)
    a = nf.a
    scale = 1.0 + float(np.linalg.norm(x))
    e_minus = x[0] + a * x[1]  # zero on the plane x1 = -a x2 (kernel: u)
    e_plus = x[0] - a * x[1]  # zero on the plane x1 = +a x2 (kernel: v)

    def membership(value):
        if abs(value) <= tol * scale:
            return True
        if abs(value) <= AMBIGUOUS_FACTOR * tol * scale:
            raise PreconditionError(
                f"plane membership ambiguous: |{value:.3e}| within a factor "
                f"{AMBIGUOUS_FACTOR:g} of tolerance"
            )
        return False

    on_minus = membership(e_minus)
    on_plus = membership(e_plus)

    if not on_minus and not on_plus:
        result = FocalClass("A1", {"hessian": [-2.0 * e_minus, 2.0 * e_plus]})
    elif on_minus and on_plus:
        if abs(x[2]) > tol * scale:
            result = FocalClass("D4", {"x3": float(x[2])})
        else:
            alpha = 2.0 * (a * a - 1.0) / (a * a + 1.0)
            result = FocalClass("X9", {"quartic_modulus": alpha})
    else:
        branch = "minus" if on_minus else "plus"
        data = (nf.b1, nf.c1) if on_minus else (nf.b3, nf.c3)
        b0, b0p, b0pp = _axis_data(data[0])
        c0, c0p, c0pp = _axis_data(data[1])
        cubic_coeff = x[1] * b0 + x[2] * c0
        if abs(cubic_coeff) > tol * scale:
            result = FocalClass("A2", {"branch": branch, "cubic_coefficient": float(cubic_coeff)})
        else:
            wronskian = c0 * b0p - b0 * c0p
            gate = 2.0 * wronskian * x[1] - (1.0 + a * a) * c0
            if abs(gate) > tol * scale:
                result = FocalClass("A3", {"branch": branch, "quartic_gate": float(gate)})
            elif abs(wronskian) > tol:
                a4_const = (
                    (1.0 + a * a) * (b0 * c0pp - c0 * b0pp) - 4.0 * a * b0 * (b0 * c0p - c0 * b0p)
                ) / (4.0 * (c0 * b0p - b0 * c0p))
                if abs(a4_const) > tol:
                    result = FocalClass("A4", {"branch": branch, "a4_constant": float(a4_const)})
                else:
                    result = FocalClass("Unclassified", {"branch": branch, "a4_constant": 0.0})
            else:
                result = FocalClass("Unclassified", {"branch": branch, "note": "degenerate gate"})

    if cross_check:
        oracle = recognize_function_singularity(dist_sq_jet(nf, x), tol=tol)
        if oracle.label != result.label:
            raise NumericalError(
                f"focal classification mismatch at x={x.tolist()}: "
                f"closed form {result.label}, recognizer {oracle.label} "
                f"(witnesses {result.witness} vs {oracle.witness})"
            )
    return result


def focal_scan(nf: NormalFormGerm, box, step: float, tol: float = PLANE_TOL):
    """Classify a lattice of targets; rows (x1, x2, x3, label).

    Ambiguous points are labeled 'Ambiguous' rather than dropped so scan
    output has one row per lattice point.
    """
    (x1_lo, x1_hi), (x2_lo, x2_hi), (x3_lo, x3_hi) = box
    if step <= 0:
        raise PreconditionError(f"scan step must be positive, got {step}")
    rows = []
    for x1 in _lattice(x1_lo, x1_hi, step):
        for x2 in _lattice(x2_lo, x2_hi, step):
            for x3 in _lattice(x3_lo, x3_hi, step):
                try:
                    label = classify_focal_point(nf, (x1, x2, x3), tol=tol).label
                except PreconditionError:
                    label = "Ambiguous"
                rows.append((x1, x2, x3, label))
    return rows


def _lattice(lo: float, hi: float, step: float):
    n = int(math.floor((hi - lo) / step + 1e-9))
    return [lo + k * step for k in range(n + 1)]
