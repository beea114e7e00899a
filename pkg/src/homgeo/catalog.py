"""Built-in jobs for the three-dimensional worked examples, with their expected outcomes."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import subspace_angles

from .lie import abelian, direct_sum, milnor_unimodular

SPAN_ANGLE_TOL = 1e-4
DEFECT_TOL = 1e-9


@dataclass
class CatalogEntry:
    name: str
    config: dict
    # expected geodesic-vector components as lists of spanning vectors
    expected_spans: list[list[list[float]]] | None = None
    expected: dict = field(default_factory=dict)
    note: str = ""
    # lines that must each lie inside some reported component
    contained_lines: list[list[float]] | None = None


def _so3_plus_r() -> list:
    return direct_sum(milnor_unimodular(1, 1, 1), abelian(1)).structure.tolist()


def _unimodular(eps: float, name: str) -> CatalogEntry:
    return CatalogEntry(
        name=name,
        config={"name": name, "command": "geodesic-vectors",
                "algebra": {"frame": {"type": "milnor_unimodular", "lambda": [1.0, 1.0, 1.0]}},
                "drift": [eps, 0.0, 0.0], "solver": {"seeds": 500}},
        expected_spans=[[[1.0, 0.0, 0.0]]],
    )


def catalog() -> list[CatalogEntry]:
    entries = [
        _unimodular(0.3, "example-5.1-unimodular-equal"),
        _unimodular(0.1, "example-5.1-unimodular-equal-eps0.1"),
        _unimodular(0.5, "example-5.1-unimodular-equal-eps0.5"),
        CatalogEntry(
            name="example-5.1-nonunimodular-beta0",
            config={"name": "example-5.1-nonunimodular-beta0", "command": "geodesic-vectors",
                    "algebra": {"frame": {"type": "milnor_nonunimodular",
                                          "params": [2.0, 0.0, 0.0, 0.0]}},
                    "drift": [0.3, 0.0, 0.0], "solver": {"seeds": 500}},
            expected_spans=[[[1.0, 0.0, 0.0], [0.0, 0.0, 1.0]]],
        ),
        CatalogEntry(
            name="example-5.1-nonunimodular-beta2",
            config={"name": "example-5.1-nonunimodular-beta2", "command": "geodesic-vectors",
                    "algebra": {"frame": {"type": "milnor_nonunimodular",
                                          "params": [2.0, 2.0, 0.0, 0.0]}},
                    "drift": [0.3, 0.0, 0.0], "solver": {"seeds": 500}},
            # y2 + y3 = 0 is a whole plane of solutions, so e1 and e2 - e3 share one component
            expected_spans=[[[1.0, 0.0, 0.0], [0.0, 1.0, -1.0]], [[0.0, 0.0, 1.0]]],
            contained_lines=[[1.0, 0.0, 0.0], [0.0, 0.0, 1.0], [0.0, 1.0, -1.0]],
            note=("the lines Span(e1), Span(e3), Span(e2 - e3) are all geodesic, but e1 and "
                  "e2 - e3 lie in the verified plane y2 + y3 = 0"),
        ),
        CatalogEntry(
            name="heisenberg-berwald-negative",
            config={"name": "heisenberg-berwald-negative", "command": "berwald",
                    "algebra": {"frame": {"type": "heisenberg"}}, "drift": [0.0, 0.0, 0.3]},
            expected={"is_berwald": False, "derived_pairing_defect": 0.3},
        ),
        CatalogEntry(
            name="so3+R-berwald-positive",
            config={"name": "so3+R-berwald-positive", "command": "berwald",
                    "algebra": {"name": "so3+R", "structure": _so3_plus_r()},
                    "metric": np.eye(4).tolist(), "drift": [0.0, 0.0, 0.0, 0.3]},
            expected={"is_berwald": True, "drift_residual_max": DEFECT_TOL,
                      "drift_ricci_abs_max": DEFECT_TOL},
        ),
    ]
    return entries


def _as_rows(vectors) -> np.ndarray:
    return np.atleast_2d(np.asarray(vectors, dtype=float))


def compare_components(reported: list[dict], expected_spans, contained_lines=None) -> list[str]:
    """Differences between reported and expected components (empty list when they agree)."""
    diffs = []
    if len(reported) != len(expected_spans):
        diffs.append(f"expected {len(expected_spans)} components, got {len(reported)}: "
                     + ", ".join(f"{c['type']}(dim {c['dim']})" for c in reported))
    unmatched = list(range(len(reported)))
    for span in expected_spans:
        E = _as_rows(span)
        hit = None
        for k in unmatched:
            B = _as_rows(reported[k]["basis"])
            if B.shape[0] != E.shape[0] or reported[k]["type"] != "linear_subspace":
                continue
            if np.max(subspace_angles(E.T, B.T)) <= SPAN_ANGLE_TOL:
                hit = k
                break
        if hit is None:
            diffs.append(f"no verified component matches Span{np.round(E, 6).tolist()}")
        else:
            unmatched.remove(hit)
    for line in contained_lines or []:
        u = np.asarray(line, float)
        u = u / np.linalg.norm(u)
        inside = False
        for comp in reported:
            B = _as_rows(comp["basis"])
            Q, _ = np.linalg.qr(B.T)
            if np.linalg.norm(u - Q @ (Q.T @ u)) <= SPAN_ANGLE_TOL:
                inside = True
        if not inside:
            diffs.append(f"line Span{line} is not contained in any component")
    return diffs


def check_entry(entry: CatalogEntry, results: dict) -> list[str]:
    if entry.expected_spans is not None:
        return compare_components(results["components"], entry.expected_spans, entry.contained_lines)
    diffs = []
    exp = entry.expected
    if "is_berwald" in exp and results["is_berwald"] != exp["is_berwald"]:
        diffs.append(f"is_berwald: expected {exp['is_berwald']}, got {results['is_berwald']}")
    if "derived_pairing_defect" in exp:
        got = results["derived_pairing_defect"]
        if abs(got - exp["derived_pairing_defect"]) > 1e-12:
            diffs.append(f"derived_pairing_defect: expected {exp['derived_pairing_defect']}, got {got}")
    if "drift_residual_max" in exp:
        got = results.get("drift_residual")
        if got is None or got > exp["drift_residual_max"]:
            diffs.append(f"drift residual {got} exceeds {exp['drift_residual_max']}")
    if "drift_ricci_abs_max" in exp:
        got = results.get("drift_ricci")
        if got is None or abs(got) > exp["drift_ricci_abs_max"]:
            diffs.append(f"Ricci in drift direction {got} is not zero")
    return diffs
