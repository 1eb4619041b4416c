"""Acceptance suite: one test per criterion, each at its stated tolerance.

Every test prints one PASS/FAIL line (visible with pytest -s or in the
captured output).  Tolerances are pinned here, not deferred: jets are
compared at 1e-6, fitted universal constants at 1e-6 relative spread,
angles at 1e-12, sector residuals at 1e-2 / 2e-3 for meshes 200 / 400,
and the focal classifier must agree with the recognizer on every
sampled point.
"""

import json
import math
import time

import numpy as np
import pytest

from frontkit.edgeinv import (
    boundedness_report,
    edge_invariants_at,
    invariant_asymptotics,
    vertex_angle,
)
from frontkit.errors import PreconditionError
from frontkit.frame import is_front_at_origin, kh_asymptotics, unit_normal
from frontkit.gaussbonnet import QUADRANTS, four_sector_report, measure_boundedness, sector_gauss_bonnet
from frontkit.germ import NormalFormGerm, expand, germ_to_json, normal_form_to_json
from frontkit.normalform import canonical_jet, reduce
from frontkit.series import (
    TruncatedSeries1,
    TruncatedSeries2,
    compose2,
    invert_coordinate_change,
    max_coeff_diff,
    partial,
    sqrt_series,
)
from frontkit.symmetry import MOVES, detect_symmetries, verify_symmetry_on_image

from conftest import random_normal_form, random_series2
from test_focal import sample_focal_targets
from test_normalform import random_axis_preserving_change, random_rotation


def report(number, name, ok, detail):
    status = "PASS" if ok else "FAIL"
    print(f"ACCEPTANCE {number} ({name}): {status} — {detail}")
    assert ok, f"criterion {number} ({name}): {detail}"


def test_criterion_1_normal_form_round_trip():
    rng = np.random.default_rng(101)
    degree = 6
    start = time.monotonic()
    worst = 0.0
    for _ in range(100):
        # the b2 block is gauge and normalized away by the reduction, so
        # the reference germ is generated inside the canonical slice
        nf = random_normal_form(rng, degree=degree, a_range=(0.2, 5.0), coeff_scale=2.0)
        nf = NormalFormGerm(
            nf.a, nf.b1, TruncatedSeries2(degree - 4), nf.b3, nf.c1, nf.c2, nf.c3, degree
        )
        su, sv = random_axis_preserving_change(rng, degree, tangent_to_identity=True)
        m = expand(nf).compose_source(su, sv).rotate(random_rotation(rng))
        got = canonical_jet(reduce(m).normal_form)
        want = canonical_jet(nf)
        worst = max(worst, float(np.max(np.abs(got - want))))
    elapsed = time.monotonic() - start
    ok = worst <= 1e-6 and elapsed <= 10.0
    report(
        1,
        "normal-form round trip",
        ok,
        f"100 germs, max jet error {worst:.2e} (tol 1e-6), {elapsed:.2f}s (limit 10s)",
    )


def test_criterion_2_front_criterion():
    rng = np.random.default_rng(102)
    checked = 0
    degenerate = 0
    h = 1e-5
    for k in range(50):
        if k < 10:
            # force c1(0) = 0 or c3(0) = 0
            nf = random_normal_form(rng, positive_c=False)
            which = "c1" if k % 2 == 0 else "c3"
            coeffs = np.array(getattr(nf, which).coeffs)
            coeffs[0] = 0.0
            kwargs = dict(
                a=nf.a, b1=nf.b1, b2=nf.b2, b3=nf.b3, c1=nf.c1, c2=nf.c2, c3=nf.c3,
                degree=nf.degree,
            )
            kwargs[which] = TruncatedSeries1(nf.degree - 3, coeffs)
            nf = NormalFormGerm(**kwargs)
            degenerate += 1
        else:
            nf = random_normal_form(rng, positive_c=(k % 2 == 0))
        predicate = is_front_at_origin(nf).is_front
        # independent oracle: finite differences of the numeric unit normal
        fd_u = (unit_normal(nf, (h, 0.0)) - unit_normal(nf, (-h, 0.0))) / (2 * h)
        fd_v = (unit_normal(nf, (0.0, h)) - unit_normal(nf, (0.0, -h))) / (2 * h)
        sigma = np.linalg.svd(np.stack([fd_u, fd_v]), compute_uv=False)
        numeric_front = bool(sigma[-1] > 1e-6)
        if predicate != numeric_front:
            report(2, "front criterion", False, f"disagreement on germ {k}")
        checked += 1
    report(
        2,
        "front criterion",
        checked == 50 and degenerate == 10,
        f"{checked} germs checked, {degenerate} with a vanishing c-coefficient",
    )


def test_criterion_3_curvature_structure():
    rng = np.random.default_rng(103)
    k0, hu, hv = [], [], []
    ks_u, kn_u, kt_u, kc_u = [], [], [], []
    ks_v, kn_v, kt_v, kc_v = [], [], [], []
    for _ in range(100):
        nf = random_normal_form(rng, a_range=(0.3, 4.0), c0_range=(0.2, 2.0))
        a = nf.a
        if abs(a - 1.0) < 1e-2:
            continue  # kappa_t leading vanishes at a = 1 by design
        b10, b30 = nf.b1.constant_term, nf.b3.constant_term
        c10, c30 = nf.c1.constant_term, nf.c3.constant_term
        if min(abs(b10), abs(b30)) < 1e-2:
            continue
        ca = kh_asymptotics(nf)
        k0.append(ca.uvK_series.constant_term * a**2 / (c10 * c30))
        hu.append(ca.uvH_series.coefficient(1, 0) * a**2 / ((1 + a**2) * c30))
        hv.append(ca.uvH_series.coefficient(0, 1) * a**2 / ((1 + a**2) * c10))
        asym = invariant_asymptotics(nf)
        axu, axv = asym.axis_u, asym.axis_v
        ks_u.append(axu.leading("t_kappa_s") * (1 + a * a) ** 1.5 / b10)
        kn_u.append(axu.leading("t_kappa_nu") * (1 + a * a) / c10)
        kt_u.append(axu.leading("t_kappa_t") * a * (1 + a * a) / ((1 - a * a) * c10))
        kc_u.append(axu.leading("kappa_c") * (1 + a * a) ** 1.25 / b10)
        ks_v.append(axv.leading("t_kappa_s") * (1 + a * a) ** 1.5 / b30)
        kn_v.append(axv.leading("t_kappa_nu") * (1 + a * a) / c30)
        kt_v.append(axv.leading("t_kappa_t") * a * (1 + a * a) / ((a * a - 1) * c30))
        kc_v.append(axv.leading("kappa_c") * (1 + a * a) ** 1.25 / b30)

    def spread(vals):
        vals = np.array(vals)
        return float(np.max(np.abs(vals - np.mean(vals))) / max(1e-12, abs(np.mean(vals))))

    spreads = {
        "kappa0": spread(k0),
        "H_u": spread(hu),
        "H_v": spread(hv),
        "kappa_s(U)": spread(ks_u),
        "kappa_nu(U)": spread(kn_u),
        "kappa_t(U)": spread(kt_u),
        "kappa_c(U)": spread(kc_u),
        "kappa_s(V)": spread(ks_v),
        "kappa_nu(V)": spread(kn_v),
        "kappa_t(V)": spread(kt_v),
        "kappa_c(V)": spread(kc_v),
    }
    worst = max(spreads.values())
    ratio = float(np.mean(k0)) / (1.0 / 16.0)

    # the torsion ambiguity: the u-axis coefficient tracks c1, not c3
    nf = random_normal_form(rng)
    other = NormalFormGerm(
        nf.a, nf.b1, nf.b2, nf.b3, nf.c1, nf.c2,
        TruncatedSeries1(nf.degree - 3, nf.c3.coeffs * 0.5 + 0.3), degree=nf.degree,
    )
    kt_fixed = abs(
        invariant_asymptotics(nf).axis_u.leading("t_kappa_t")
        - invariant_asymptotics(other).axis_u.leading("t_kappa_t")
    )
    ok = worst <= 1e-6 and kt_fixed < 1e-12
    report(
        3,
        "curvature structure",
        ok,
        f"{len(k0)} germs; fitted kappa0 = {np.mean(k0):.8f} (= 9/64, ratio {ratio:.3f} "
        f"to the displayed 1/16); worst relative spread {worst:.2e} (tol 1e-6); "
        f"u-axis torsion tracks c1 (c3-shift moved it by {kt_fixed:.1e})",
    )


def _observed_unbounded(values):
    # |kappa| growing by ~10x per decade of t marks a 1/t divergence;
    # a factor 50 over three decades separates the two behaviors safely
    return bool(abs(values[-1]) > 50.0 * max(abs(values[0]), 1e-12))


def test_criterion_4_boundedness_suite():
    suite = {
        "b1=0": NormalFormGerm.from_scalars(a=1.7, b1=0.0, b3=0.8, c1=1.1, c3=0.9),
        "a=1": NormalFormGerm.from_scalars(a=1.0, b1=0.7, b3=0.4, c1=1.2, c3=0.8),
        "c3=0": NormalFormGerm.from_scalars(a=1.8, b1=0.7, b3=0.4, c1=1.2, c3=0.0),
        "generic": NormalFormGerm.from_scalars(a=2.2, b1=0.7, b3=-0.6, c1=1.2, c3=0.8),
    }
    ts = [1e-1, 1e-2, 1e-3, 1e-4]
    mismatches = []
    for name, nf in suite.items():
        flags = boundedness_report(nf)
        for axis in ("u", "v"):
            samples = [edge_invariants_at(nf, axis, t) for t in ts]
            observed = {
                "kappa_s": _observed_unbounded([s.kappa_s for s in samples]),
                "kappa_nu": _observed_unbounded([s.kappa_nu for s in samples]),
                "kappa_t": _observed_unbounded([s.kappa_t for s in samples]),
            }
            predicted = {
                "kappa_s": not flags.axis(axis).kappa_s_bounded,
                "kappa_nu": not flags.axis(axis).kappa_nu_bounded,
                "kappa_t": not flags.axis(axis).kappa_t_bounded,
            }
            for key in observed:
                if observed[key] != predicted[key]:
                    mismatches.append((name, axis, key))
            # kappa_c is always bounded; its zero flag matches the samples
            kc_small = abs(samples[-1].kappa_c) < 1e-3
            if kc_small != flags.axis(axis).kappa_c_zero:
                mismatches.append((name, axis, "kappa_c_zero"))
    report(
        4,
        "boundedness corollary",
        not mismatches,
        f"4 designed germs x 2 axes x 4 invariants sampled at t in {ts}; "
        f"mismatches: {mismatches if mismatches else 'none'}",
    )


def test_criterion_5_vertex_angle():
    worst = 0.0
    for a in (0.5, 1.0, 2.0, 10.0):
        nf = NormalFormGerm.from_scalars(a=a)
        theta = vertex_angle(nf)
        closed = math.acos((a * a - 1.0) / (a * a + 1.0))
        worst = max(worst, abs(theta - closed))
    exact_right_angle = abs(vertex_angle(NormalFormGerm.from_scalars(a=1.0)) - math.pi / 2.0)
    ok = worst <= 1e-12 and exact_right_angle <= 1e-12
    report(
        5,
        "vertex angle",
        ok,
        f"a in {{0.5, 1, 2, 10}}: max |theta - arccos((a^2-1)/(a^2+1))| = {worst:.2e} "
        f"(tol 1e-12); a=1 gives pi/2 to {exact_right_angle:.2e}",
    )


def test_criterion_6_symmetry():
    cases = {
        "model": (NormalFormGerm.from_scalars(a=1.0), {"tangent_reflection", "principal_reflection", "center_rotation"}),
        "f1": (NormalFormGerm.from_scalars(a=1.0, b1=1.0, b3=1.0), {"principal_reflection"}),
        "f2": (NormalFormGerm.from_scalars(a=1.0, b1=1.0, b3=-1.0), {"center_rotation"}),
        "asymmetric": (NormalFormGerm.from_scalars(a=1.0, b1=1.0, b3=0.0), set()),
    }
    failures = []
    worst_residual = 0.0
    for name, (nf, expected) in cases.items():
        flags = detect_symmetries(nf)
        got = {m for m in MOVES if flags.flag(m)}
        if got != expected:
            failures.append(f"{name}: {got} != {expected}")
        for move in got:
            resid = verify_symmetry_on_image(nf, move)
            worst_residual = max(worst_residual, resid)
            if resid > 1e-10:
                failures.append(f"{name}/{move}: residual {resid:.2e}")
    report(
        6,
        "symmetry detection",
        not failures,
        f"flag sets as expected; worst image residual {worst_residual:.2e} (tol 1e-10)"
        + (f"; failures: {failures}" if failures else ""),
    )


def test_criterion_7_gauss_bonnet():
    nf = NormalFormGerm.from_scalars(a=1.0)
    start = time.monotonic()
    residuals_200 = {}
    residuals_400 = {}
    for q in QUADRANTS:
        residuals_200[q] = sector_gauss_bonnet(nf, q, 0.3, mesh_n=200).residual
        residuals_400[q] = sector_gauss_bonnet(nf, q, 0.3, mesh_n=400).residual
    agg = four_sector_report(nf, 0.3, mesh_n=200)
    elapsed = time.monotonic() - start
    worst200 = max(residuals_200.values())
    worst400 = max(residuals_400.values())
    order = math.log2(residuals_200["++"] / residuals_400["++"])
    mb = measure_boundedness(nf, ts=(1e-2, 1e-3, 1e-4))
    k_incr = np.abs(np.diff(mb.k_density_diag))
    edge_incr = np.abs(np.diff(mb.edge_density["u"]))
    cauchy_ok = bool(k_incr[-1] < 1e-3 and k_incr[1] < k_incr[0] and edge_incr[-1] < 1e-3)
    ok = (
        worst200 <= 1e-2
        and worst400 <= 2e-3
        and order >= 1.8
        and agg.aggregate_residual <= 2e-3
        and abs(agg.defect) < 1e-12
        and cauchy_ok
        and elapsed <= 60.0
    )
    report(
        7,
        "Gauss-Bonnet sectors",
        ok,
        f"max residual {worst200:.2e} @200 (tol 1e-2), {worst400:.2e} @400 (tol 2e-3), "
        f"observed order {order:.2f} (>= 1.8), aggregate defect residual "
        f"{agg.aggregate_residual:.2e}, densities Cauchy: {cauchy_ok}, {elapsed:.1f}s (limit 60s)",
    )


def test_criterion_8_focal_regression(tmp_path, focal_example_nf):
    from frontkit.cli import main

    germ_file = tmp_path / "focal.json"
    germ_file.write_text(json.dumps(normal_form_to_json(focal_example_nf)), encoding="utf-8")

    # the five strata through the CLI, A4 on the calibrated branch x1 = +2 x2
    cli_cases = [
        ("1,1,1", "A1"),
        ("-2,1,5", "A2"),
        ("-2,1,-1", "A3"),
        (f"{2 * 5 / 6},{5 / 6},{-5 / 6}", "A4"),
        ("0,0,1", "D4"),
        ("0,0,0", "X9"),
    ]
    cli_ok = True
    for xs, expected in cli_cases:
        out = tmp_path / f"{expected}.json"
        rc = main(["focal", "classify", "--in", str(germ_file), f"--x={xs}", "--out", str(out)])
        label = json.loads(out.read_text(encoding="utf-8"))["label"] if rc == 0 else None
        if rc != 0 or label != expected:
            cli_ok = False

    # classifier-versus-recognizer agreement; the cross check inside
    # classify_focal_point raises on any disagreement
    rng = np.random.default_rng(108)
    agreements = 0
    ambiguous = 0
    germs = [focal_example_nf] + [
        random_normal_form(rng, a_range=(0.4, 3.0), c0_range=(0.3, 2.0)) for _ in range(19)
    ]
    from frontkit.focal import classify_focal_point

    for nf in germs:
        for x in sample_focal_targets(rng, nf, 50):
            try:
                classify_focal_point(nf, x)
                agreements += 1
            except PreconditionError:
                ambiguous += 1  # reported, not guessed; does not count as disagreement
    ok = cli_ok and agreements >= 990 and ambiguous <= 10
    report(
        8,
        "focal classification",
        ok,
        f"CLI bullets {'ok' if cli_ok else 'FAILED'} (A4 at x2 = 5/6 on the calibrated "
        f"branch x1 = +2 x2); {agreements} classifier/recognizer agreements, "
        f"0 disagreements, {ambiguous} ambiguous-membership reports",
    )


def test_criterion_9_series_kernel():
    rng = np.random.default_rng(109)
    start = time.monotonic()
    cases = 0
    # ring axioms
    for _ in range(150):
        r = int(rng.integers(2, 7))
        a, b, c = (random_series2(rng, r) for _ in range(3))
        assert max_coeff_diff((a + b) + c, a + (b + c)) < 1e-12
        assert max_coeff_diff(a * b, b * a) < 1e-12
        assert max_coeff_diff((a * b) * c, a * (b * c)) < 1e-10
        assert max_coeff_diff(a * (b + c), a * b + a * c) < 1e-11
        cases += 1
    # sqrt round trip
    for _ in range(100):
        r = int(rng.integers(1, 7))
        s = random_series2(rng, r) + 2.5
        root = sqrt_series(s)
        assert max_coeff_diff(root * root, s) < 1e-10
        cases += 1
    # composition inverse
    for _ in range(100):
        r = int(rng.integers(2, 6))
        coeffs_u = np.array(random_series2(rng, r, zero_constant=True).coeffs)
        coeffs_v = np.array(random_series2(rng, r, zero_constant=True).coeffs)
        coeffs_u[1, 0], coeffs_u[0, 1] = 1.0 + rng.uniform(-0.3, 0.3), rng.uniform(-0.3, 0.3)
        coeffs_v[1, 0], coeffs_v[0, 1] = rng.uniform(-0.3, 0.3), 1.0 + rng.uniform(-0.3, 0.3)
        su = TruncatedSeries2(r, coeffs_u)
        sv = TruncatedSeries2(r, coeffs_v)
        p, q = invert_coordinate_change(su, sv)
        assert max_coeff_diff(compose2(su, p, q), TruncatedSeries2.var_u(r)) < 1e-8
        assert max_coeff_diff(compose2(sv, p, q), TruncatedSeries2.var_v(r)) < 1e-8
        cases += 1
    # derivative versus central finite difference
    h = 1e-4
    for _ in range(150):
        s = random_series2(rng, int(rng.integers(2, 7)))
        pt = rng.uniform(-0.4, 0.4, size=2)
        exact = partial(s, "u").evaluate(pt)
        fd = (s.evaluate((pt[0] + h, pt[1])) - s.evaluate((pt[0] - h, pt[1]))) / (2 * h)
        assert abs(exact - fd) <= 1e-6 * max(1.0, abs(fd))
        cases += 1
    elapsed = time.monotonic() - start
    ok = cases == 500 and elapsed <= 5.0
    report(
        9,
        "series kernel",
        ok,
        f"{cases} randomized property cases in {elapsed:.2f}s (limit 5s)",
    )
