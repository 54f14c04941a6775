import json

import pytest

from legicolor.errors import PlaneFormatError
from legicolor.gf import factor_prime_power, gf_build
from legicolor.plane import (ProjectivePlane, build_pg2, load_plane,
                             save_plane, validate_plane)

from conftest import plane_of_order


@pytest.mark.parametrize("q", [2, 3, 4, 5, 7, 8, 9])
def test_pg2_counts_and_axioms(q):
    plane = plane_of_order(q)
    expected = q * q + q + 1
    assert plane.n_points == expected
    assert plane.n_lines == expected
    assert all(len(line) == q + 1 for line in plane.lines)
    assert all(len(lines) == q + 1 for lines in plane.point_to_lines)
    report = validate_plane(plane)
    assert report.passed and not report.issues


@pytest.mark.parametrize("q", [2, 3, 4, 5, 7, 8, 9])
def test_duality(q):
    plane = plane_of_order(q)
    dual = ProjectivePlane(plane.order,
                           [str(i) for i in range(plane.n_lines)],
                           list(plane.point_to_lines))
    assert validate_plane(dual).passed


def test_deleted_line_fails_point_coverage(fano):
    broken = ProjectivePlane(2, fano.points, list(fano.lines[1:]))
    report = validate_plane(broken)
    assert not report.passed
    axioms = {i.axiom for i in report.issues}
    assert "point-pair-coverage" in axioms
    # each pair of the removed line is now uncovered
    removed = fano.lines[0]
    flagged = {i.ids for i in report.issues if i.axiom == "point-pair-coverage"}
    for a in range(3):
        for b in range(a + 1, 3):
            assert (removed[a], removed[b]) in flagged


def test_duplicated_line_fails_intersection(fano):
    broken = ProjectivePlane(2, fano.points, list(fano.lines) + [fano.lines[0]])
    report = validate_plane(broken)
    assert not report.passed
    assert any(i.axiom == "line-pair-intersection" and i.ids == (0, 7)
               for i in report.issues)


def test_save_load_round_trip(tmp_path):
    p, k = factor_prime_power(5)
    plane = build_pg2(gf_build(p, k))
    path = tmp_path / "pg25.json"
    save_plane(plane, path)
    loaded = load_plane(path)
    assert loaded == plane
    assert loaded.validation.passed


def test_load_defective_plane_reports_but_does_not_abort(tmp_path):
    doc = {"order": 2, "points": [str(i) for i in range(7)],
           "lines": [[0, 1, 2], [0, 3, 4], [0, 5, 6], [1, 3, 5], [1, 4, 6], [2, 3, 6]]}
    path = tmp_path / "defective.json"
    path.write_text(json.dumps(doc))
    plane = load_plane(path)
    assert plane.n_lines == 6
    assert not plane.validation.passed


def test_load_missing_file():
    with pytest.raises(OSError):
        load_plane("/nonexistent/plane.json")


def test_load_malformed_json(tmp_path):
    path = tmp_path / "bad.json"
    path.write_text("{not json")
    with pytest.raises(PlaneFormatError):
        load_plane(path)
    path.write_text(json.dumps({"order": 2, "points": ["a"]}))
    with pytest.raises(PlaneFormatError):
        load_plane(path)


def test_line_arrays_sorted_in_file(tmp_path):
    plane = plane_of_order(3)
    path = tmp_path / "p.json"
    save_plane(plane, path)
    doc = json.loads(path.read_text())
    assert all(line == sorted(line) for line in doc["lines"])
    assert doc["order"] == 3
