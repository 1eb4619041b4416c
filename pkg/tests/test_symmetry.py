"""Symmetry detection tests: parity flags, exact image identities,
geometric elements, group closure."""

import numpy as np
import pytest

from frontkit.errors import PreconditionError
from frontkit.germ import NormalFormGerm, expand, split_bc
from frontkit.normalform import reduce
from frontkit.symmetry import (
    MOVES,
    detect_symmetries,
    geometric_elements,
    symmetry_residuals,
    verify_symmetry_on_image,
)

from conftest import random_normal_form


def test_model_has_all_three(model_nf):
    flags = detect_symmetries(model_nf)
    assert flags.tangent_reflection
    assert flags.principal_reflection
    assert flags.center_rotation


def test_f1_principal_only(f1_nf):
    # b = c = u^3 + v^3: symmetric under (v, u); not under the sign moves
    flags = detect_symmetries(f1_nf)
    assert not flags.tangent_reflection
    assert flags.principal_reflection
    assert not flags.center_rotation


def test_f2_center_only(f2_nf):
    # b = u^3 - v^3 satisfies b(-v,-u) = b; fails the other two
    flags = detect_symmetries(f2_nf)
    assert not flags.tangent_reflection
    assert not flags.principal_reflection
    assert flags.center_rotation


def test_asymmetric_germ_has_none():
    nf = NormalFormGerm.from_scalars(a=1.0, b1=1.0, b3=0.0, c1=1.0, c3=1.0)
    flags = detect_symmetries(nf)
    assert not flags.tangent_reflection
    assert not flags.principal_reflection
    assert not flags.center_rotation


def test_positive_flags_verify_exactly(model_nf, f1_nf, f2_nf):
    for nf, names in [
        (model_nf, ["tangent_reflection", "principal_reflection", "center_rotation"]),
        (f1_nf, ["principal_reflection"]),
        (f2_nf, ["center_rotation"]),
    ]:
        for name in names:
            assert verify_symmetry_on_image(nf, name) <= 1e-10


def test_negative_flag_reports_nonzero(f2_nf):
    assert verify_symmetry_on_image(f2_nf, "principal_reflection") > 1e-3


def test_flag_iff_image_identity(rng):
    # both directions on random germs: flag True <=> residual tiny
    for _ in range(10):
        nf = random_normal_form(rng)
        flags = detect_symmetries(nf)
        for name in MOVES:
            resid = verify_symmetry_on_image(nf, name)
            if flags.flag(name):
                assert resid <= 1e-10
            else:
                assert resid > 1e-10


def test_symmetrized_random_germ_detected(rng):
    # force center-rotation parity on random data, then detect it
    from frontkit.series import TruncatedSeries1, TruncatedSeries2

    degree = 7
    b1 = TruncatedSeries1(degree - 3, rng.uniform(-1, 1, degree - 2))
    c1 = TruncatedSeries1(degree - 3, rng.uniform(0.3, 1.0, degree - 2))
    # center rotation needs b1/b3 and c1/c3 tied by (-1)^k parities
    signs = np.array([(-1.0) ** (k + 3) for k in range(degree - 2)])
    b3 = TruncatedSeries1(degree - 3, b1.coeffs * signs)
    c3 = TruncatedSeries1(degree - 3, -c1.coeffs * signs)
    nf = NormalFormGerm(
        1.4, b1, TruncatedSeries2(degree - 4), b3, c1, TruncatedSeries2(degree - 4), c3, degree
    )
    flags = detect_symmetries(nf)
    assert flags.center_rotation
    assert verify_symmetry_on_image(nf, "center_rotation") <= 1e-10


def test_geometric_elements(rng):
    nf = random_normal_form(rng)
    a = nf.a
    el = geometric_elements(nf)
    assert np.allclose(el.tangent_plane_normal, [0, 0, 1], atol=1e-12)
    assert np.allclose(el.center_line, [0, 1, 0], atol=1e-12)
    assert np.allclose(el.normal_plane_normal, [0, 1, 0], atol=1e-12)
    assert np.allclose(np.abs(el.principal_plane_normal), [1, 0, 0], atol=1e-12)
    norm = np.sqrt(1 + a * a)
    assert np.allclose(el.singular_line_1, [1 / norm, a / norm, 0], atol=1e-10)
    assert np.allclose(el.singular_line_2, [-1 / norm, a / norm, 0], atol=1e-10)


def test_elements_orthogonal_at_a_one(model_nf):
    el = geometric_elements(model_nf)
    assert abs(el.singular_line_1 @ el.singular_line_2) < 1e-12


def test_elements_fixed_under_center_rotation(f2_nf):
    # applying T(-1,-1) with its substitution leaves f2 invariant, so the
    # recomputed elements agree
    T, S = MOVES["center_rotation"]
    m = expand(f2_nf)
    moved = split_bc(m.substitute_linear(S[0, 0], S[0, 1], S[1, 0], S[1, 1]).rotate(T))
    el1 = geometric_elements(f2_nf)
    el2 = geometric_elements(moved)
    assert np.allclose(el1.singular_line_1, el2.singular_line_1, atol=1e-10)
    assert np.allclose(el1.center_line, el2.center_line, atol=1e-10)


def test_group_closure(rng):
    # if two flags hold, composing their isometries gives the third move
    T1, S1 = MOVES["tangent_reflection"]
    T2, S2 = MOVES["principal_reflection"]
    T3, S3 = MOVES["center_rotation"]
    assert np.allclose(T1 @ T2, T3)
    assert np.allclose(S1 @ S2, S3)
    # and on a germ with all three symmetries every composition verifies
    flags_model = detect_symmetries(NormalFormGerm.from_scalars(a=1.0))
    assert flags_model.tangent_reflection and flags_model.principal_reflection


def test_detection_invariant_under_reduction(rng, f2_nf):
    # scrambling by an admissible (rotation, source jet) and reducing
    # returns to the same canonical germ, hence the same flags
    from test_normalform import scrambled

    base_flags = detect_symmetries(f2_nf)
    result = reduce(scrambled(f2_nf, rng))
    flags = detect_symmetries(result.normal_form, tol=1e-7)
    assert flags == type(flags)(
        tangent_reflection=base_flags.tangent_reflection,
        principal_reflection=base_flags.principal_reflection,
        center_rotation=base_flags.center_rotation,
    )


def test_unknown_symmetry_name_rejected(model_nf):
    with pytest.raises(PreconditionError):
        verify_symmetry_on_image(model_nf, "mirror")
    res = symmetry_residuals(model_nf)
    assert set(res) == set(MOVES)
