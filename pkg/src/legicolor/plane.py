"""Projective planes as incidence structures, with PG(2,q) construction.

A plane of order n has n^2+n+1 points and the same number of lines; every
line carries n+1 points, every point lies on n+1 lines, two distinct points
share exactly one line and two distinct lines meet in exactly one point.
PG(2,q) is built from homogeneous coordinates over GF(q); arbitrary incidence
data (including defective data) can be loaded from the JSON interchange
format and audited with validate_plane.
"""
from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import PlaneFormatError
from .gf import GaloisField

__all__ = [
    "ProjectivePlane", "ValidationIssue", "ValidationReport",
    "build_pg2", "validate_plane", "save_plane", "load_plane",
]


@dataclass(frozen=True)
class ValidationIssue:
    axiom: str
    ids: tuple[int, ...]
    detail: str


@dataclass(frozen=True)
class ValidationReport:
    passed: bool
    issues: tuple[ValidationIssue, ...]

    def summary(self) -> str:
        if self.passed:
            return "plane axioms hold"
        return f"{len(self.issues)} axiom violation(s); first: {self.issues[0].detail}"


class ProjectivePlane:
    """Immutable incidence structure; points and lines are dense integer ids."""

    __slots__ = ("order", "points", "lines", "point_to_lines", "validation")

    def __init__(self, order, points, lines, validation=None):
        object.__setattr__(self, "order", int(order))
        object.__setattr__(self, "points", tuple(points))
        object.__setattr__(self, "lines", tuple(tuple(sorted(l)) for l in lines))
        inverse = [[] for _ in self.points]
        for li, line in enumerate(self.lines):
            for pt in line:
                if not 0 <= pt < len(self.points):
                    raise PlaneFormatError(f"line {li} references unknown point {pt}")
                inverse[pt].append(li)
        object.__setattr__(self, "point_to_lines", tuple(tuple(v) for v in inverse))
        object.__setattr__(self, "validation", validation)

    def __setattr__(self, name, value):
        raise AttributeError("ProjectivePlane is immutable")

    @property
    def n_points(self) -> int:
        return len(self.points)

    @property
    def n_lines(self) -> int:
        return len(self.lines)

    def incidence_matrix(self) -> np.ndarray:
        """Lines x points 0/1 matrix."""
        m = np.zeros((self.n_lines, self.n_points), dtype=np.int8)
        for li, line in enumerate(self.lines):
            m[li, list(line)] = 1
        return m

    def __eq__(self, other):
        return (isinstance(other, ProjectivePlane)
                and self.order == other.order
                and self.points == other.points
                and self.lines == other.lines)

    def __hash__(self):
        return hash((self.order, self.points, self.lines))

    def __repr__(self):
        return f"ProjectivePlane(order={self.order}, points={self.n_points}, lines={self.n_lines})"


def _canonical_triples(q: int):
    """All projective points of PG(2,q) with first nonzero coordinate 1, in
    lexicographic order of the triple (x, y, z)."""
    out = [(0, 0, 1)]
    out.extend((0, 1, z) for z in range(q))
    out.extend((1, y, z) for y in range(q) for z in range(q))
    return out


def build_pg2(fld: GaloisField) -> ProjectivePlane:
    """Classical PG(2,q): points are normalized homogeneous triples, lines the
    dual triples, incidence a*x + b*y + c*z = 0."""
    q = fld.q
    triples = _canonical_triples(q)
    xs = np.array([t[0] for t in triples], dtype=np.int64)
    ys = np.array([t[1] for t in triples], dtype=np.int64)
    zs = np.array([t[2] for t in triples], dtype=np.int64)

    add, mul = fld.add_table.astype(np.int64), fld.mul_table.astype(np.int64)
    lines = []
    for (a, b, c) in triples:
        acc = add[mul[a, xs], mul[b, ys]]
        acc = add[acc, mul[c, zs]]
        members = np.nonzero(acc == 0)[0]
        lines.append(tuple(int(i) for i in members))

    labels = tuple(":".join(str(v) for v in t) for t in triples)
    return ProjectivePlane(q, labels, lines)


def validate_plane(plane: ProjectivePlane) -> ValidationReport:
    """Audit the four plane axioms; every failure is reported, none raised."""
    n = plane.order
    expected = n * n + n + 1
    issues: list[ValidationIssue] = []

    if plane.n_points != expected:
        issues.append(ValidationIssue(
            "element-counts", (), f"expected {expected} points, found {plane.n_points}"))
    if plane.n_lines != expected:
        issues.append(ValidationIssue(
            "element-counts", (), f"expected {expected} lines, found {plane.n_lines}"))

    for li, line in enumerate(plane.lines):
        if len(set(line)) != len(line):
            issues.append(ValidationIssue("line-size", (li,), f"line {li} repeats a point"))
        if len(line) != n + 1:
            issues.append(ValidationIssue(
                "line-size", (li,), f"line {li} has {len(line)} points, expected {n + 1}"))
    for pi, incident in enumerate(plane.point_to_lines):
        if len(incident) != n + 1:
            issues.append(ValidationIssue(
                "point-degree", (pi,), f"point {pi} lies on {len(incident)} lines, expected {n + 1}"))

    m = plane.incidence_matrix().astype(np.int32)
    if plane.n_lines:
        meet = m @ m.T
        np.fill_diagonal(meet, 1)
        for li, lj in zip(*np.nonzero(meet != 1)):
            if li < lj:
                cnt = int(meet[li, lj])
                what = "no common point" if cnt == 0 else f"{cnt} common points"
                issues.append(ValidationIssue(
                    "line-pair-intersection", (int(li), int(lj)),
                    f"lines {li} and {lj} meet in {what}, expected exactly one"))
    if plane.n_points:
        joins = m.T @ m
        np.fill_diagonal(joins, 1)
        for pi, pj in zip(*np.nonzero(joins != 1)):
            if pi < pj:
                cnt = int(joins[pi, pj])
                what = "no common line" if cnt == 0 else f"{cnt} common lines"
                issues.append(ValidationIssue(
                    "point-pair-coverage", (int(pi), int(pj)),
                    f"points {pi} and {pj} lie on {what}, expected exactly one"))

    return ValidationReport(not issues, tuple(issues))


# -- JSON interchange --------------------------------------------------------

def save_plane(plane: ProjectivePlane, destination) -> None:
    """Write the documented interchange JSON; line arrays sorted ascending."""
    doc = {
        "order": plane.order,
        "points": list(plane.points),
        "lines": [list(line) for line in plane.lines],
    }
    if hasattr(destination, "write"):
        json.dump(doc, destination, indent=1)
    else:
        Path(destination).write_text(json.dumps(doc, indent=1) + "\n", encoding="utf-8")


def load_plane(source) -> ProjectivePlane:
    """Parse a plane file; validation runs and the report is attached.

    A failing report does not abort the load (defective inputs can be
    studied); only structurally unreadable files raise PlaneFormatError.
    """
    if hasattr(source, "read"):
        text = source.read()
    else:
        text = Path(source).read_text(encoding="utf-8")
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise PlaneFormatError(f"not valid JSON: {exc}") from exc
    try:
        order = int(doc["order"])
        points = [str(x) for x in doc["points"]]
        lines = [[int(p) for p in line] for line in doc["lines"]]
    except (KeyError, TypeError, ValueError) as exc:
        raise PlaneFormatError(f"missing or malformed field: {exc}") from exc
    plane = ProjectivePlane(order, points, lines)
    report = validate_plane(plane)
    return ProjectivePlane(order, points, lines, validation=report)
