"""Service tests: every endpoint through the ASGI app, plus error mapping."""

import math

import numpy as np
import pytest
from fastapi.testclient import TestClient

from frontkit.germ import expand, germ_to_json, normal_form_to_json
from frontkit.service import app

client = TestClient(app, raise_server_exceptions=False)


def model_germ_json(model_nf):
    return germ_to_json(expand(model_nf))


def test_health():
    resp = client.get("/health")
    assert resp.status_code == 200
    assert resp.json() == {"status": "ok"}


def test_reduce_endpoint(model_nf):
    resp = client.post("/reduce", json={"germ": model_germ_json(model_nf)})
    assert resp.status_code == 200
    body = resp.json()
    assert body["canonical"] is True
    assert abs(body["normal_form"]["a"] - 1.0) < 1e-12
    assert body["residual"] < 1e-10
    rot = np.array(body["transform"]["rotation"])
    assert np.allclose(rot, np.eye(3), atol=1e-12)


def test_reduce_rejects_cuspidal_edge():
    germ = {
        "degree": 5,
        "x": {"degree": 5, "terms": [[1, 0, 1.0]]},
        "y": {"degree": 5, "terms": [[0, 2, 1.0]]},
        "z": {"degree": 5, "terms": [[0, 3, 1.0]]},
    }
    resp = client.post("/reduce", json={"germ": germ})
    assert resp.status_code == 422
    assert resp.json()["error"]["kind"] == "precondition"


def test_malformed_document_is_400():
    resp = client.post("/reduce", json={"germ": {"degree": 5}})
    assert resp.status_code == 400
    assert resp.json()["error"]["kind"] == "parse"


def test_frame_endpoint(model_nf):
    resp = client.post(
        "/frame", json={"germ": normal_form_to_json(model_nf), "point": [0.1, 0.2]}
    )
    assert resp.status_code == 200
    body = resp.json()
    assert abs(np.linalg.norm(body["nu"]) - 1.0) < 1e-10
    assert body["E"] > 0 and body["G"] > 0


def test_frame_on_axis_is_precondition_error(model_nf):
    resp = client.post(
        "/frame", json={"germ": normal_form_to_json(model_nf), "point": [0.0, 0.2]}
    )
    assert resp.status_code == 422
    assert resp.json()["error"]["kind"] == "precondition"


def test_invariants_endpoint(f1_nf):
    resp = client.post(
        "/invariants",
        json={"germ": normal_form_to_json(f1_nf), "samples": [0.05, -0.05]},
    )
    assert resp.status_code == 200
    body = resp.json()
    assert len(body["rows"]) == 4  # two axes x two samples
    by_key = {(r["axis"], r["t"]): r for r in body["rows"]}
    assert by_key[("u", 0.05)]["kappa_s"] > 0
    assert by_key[("u", -0.05)]["kappa_s"] < 0
    assert abs(body["vertex_angle"] - math.pi / 2.0) < 1e-12
    assert body["boundedness"]["u"]["kappa_s_bounded"] is False


def test_symmetry_endpoint(f2_nf):
    resp = client.post("/symmetry", json={"germ": normal_form_to_json(f2_nf)})
    assert resp.status_code == 200
    body = resp.json()
    assert body["flags"] == {
        "tangent_reflection": False,
        "principal_reflection": False,
        "center_rotation": True,
    }
    assert body["image_residuals"]["center_rotation"] <= 1e-10


def test_gb_endpoint(model_nf):
    resp = client.post(
        "/gaussbonnet",
        json={"germ": normal_form_to_json(model_nf), "radius": 0.3, "mesh": 60},
    )
    assert resp.status_code == 200
    body = resp.json()
    assert len(body["sectors"]) == 4
    assert all(s["residual"] < 1e-6 for s in body["sectors"])
    assert abs(body["defect"]) < 1e-12


def test_focal_endpoints(focal_example_nf):
    doc = normal_form_to_json(focal_example_nf)
    resp = client.post("/focal/classify", json={"germ": doc, "x": [0.0, 0.0, 1.0]})
    assert resp.status_code == 200
    assert resp.json()["label"] == "D4"

    step = 5.0 / 6.0
    resp = client.post(
        "/focal/scan",
        json={
            "germ": doc,
            "box": [[-2 * step, 2 * step], [-step, step], [-step, step]],
            "step": step,
        },
    )
    assert resp.status_code == 200
    labels = {row[3] for row in resp.json()["rows"]}
    assert {"A1", "A2", "A3", "A4", "D4", "X9"} <= labels


def test_surface_sample_endpoint(model_nf):
    resp = client.post(
        "/surface/sample", json={"germ": normal_form_to_json(model_nf), "radius": 0.2, "n": 5}
    )
    assert resp.status_code == 200
    rows = resp.json()["rows"]
    assert len(rows) == 25
    u, v, x, y, z = rows[7]
    assert abs(x - (u * u - v * v)) < 1e-12
    assert abs(y - (u * u + v * v)) < 1e-12
    assert abs(z - (u**3 + v**3)) < 1e-12


def test_raw_germ_accepted_by_analysis_endpoints(f2_nf):
    # analysis endpoints reduce raw germs on the fly
    raw = germ_to_json(expand(f2_nf))
    resp = client.post("/symmetry", json={"germ": raw})
    assert resp.status_code == 200
    assert resp.json()["flags"]["center_rotation"] is True


def test_openapi_lists_all_routes():
    spec = client.get("/openapi.json").json()
    paths = set(spec["paths"])
    assert {
        "/reduce",
        "/frame",
        "/invariants",
        "/symmetry",
        "/gaussbonnet",
        "/focal/classify",
        "/focal/scan",
        "/surface/sample",
        "/health",
    } <= paths
