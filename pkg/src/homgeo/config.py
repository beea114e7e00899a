"""Job configuration: JSON schema, semantic checks and construction of domain objects."""

from __future__ import annotations

import hashlib
import json
import math
from dataclasses import dataclass, field
from typing import Any

import jsonschema
import numpy as np

from .geodesics import SolverConfig
from .lie import (JACOBI_WARN_TOL, LieAlgebra, LieAlgebraError, abelian, heisenberg,
                  jacobi_defect, milnor_nonunimodular, milnor_unimodular)
from .norms import InnerProduct, NormError, RandersNorm, validate

COMMANDS = ("geodesic-vectors", "berwald", "biinvariance", "ricci", "milnor-lemma",
            "orbit-critical", "classify")

_number = {"type": "number"}
_vector = {"type": "array", "items": _number, "minItems": 1}
_matrix = {"type": "array", "items": _vector, "minItems": 1}

SCHEMA: dict[str, Any] = {
    "type": "object",
    "required": ["command", "algebra"],
    "additionalProperties": False,
    "properties": {
        "name": {"type": "string"},
        "command": {"enum": list(COMMANDS)},
        "algebra": {
            "type": "object",
            "additionalProperties": False,
            "properties": {
                "name": {"type": "string"},
                "structure": {"type": "array", "items": _matrix, "minItems": 1},
                "frame": {
                    "type": "object",
                    "required": ["type"],
                    "additionalProperties": False,
                    "properties": {
                        "type": {"enum": ["milnor_unimodular", "milnor_nonunimodular",
                                          "heisenberg", "abelian"]},
                        "lambda": {**_vector, "minItems": 3, "maxItems": 3},
                        "params": {**_vector, "minItems": 4, "maxItems": 4},
                        "dim": {"type": "integer", "minimum": 1},
                    },
                },
            },
            "oneOf": [{"required": ["structure"]}, {"required": ["frame"]}],
        },
        "metric": _matrix,
        "drift": _vector,
        "vector": _vector,
        "samples": {"type": "integer", "minimum": 1},
        "seed": {"type": "integer", "minimum": 0},
        "solver": {
            "type": "object",
            "additionalProperties": False,
            "properties": {
                "seeds": {"type": "integer", "minimum": 1},
                "tolerance": {"type": "number", "exclusiveMinimum": 0},
                "max_iter": {"type": "integer", "minimum": 1},
                "dedup_angle": {"type": "number", "exclusiveMinimum": 0},
                "subspace_verify_samples": {"type": "integer", "minimum": 1},
                "threads": {"type": "integer", "minimum": 1},
            },
        },
        "output": {"type": "string"},
    },
}


class ConfigError(ValueError):
    """Invalid job configuration; ``path`` points at the offending field."""

    def __init__(self, path: str, message: str):
        super().__init__(f"{path}: {message}" if path else message)
        self.path = path


@dataclass
class JobConfig:
    raw: dict
    command: str
    algebra: LieAlgebra
    norm: RandersNorm
    solver: SolverConfig
    seed: int = 0
    vector: np.ndarray | None = None
    samples: int = 200
    output: str | None = None
    name: str | None = None
    warnings: list[str] = field(default_factory=list)

    @property
    def config_hash(self) -> str:
        return config_hash(self.raw)


def config_hash(raw: dict) -> str:
    canon = json.dumps(raw, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(canon.encode()).hexdigest()


def _merge_triangles(c: np.ndarray) -> np.ndarray:
    """Upper-triangle table in which each pair ``(i, j)`` may be given as either ordering."""
    cT = -c.transpose(1, 0, 2)
    has_c = np.any(c != 0, axis=2)
    has_t = np.any(cT != 0, axis=2)
    clash = has_c & has_t & np.any(np.abs(c - cT) > 1e-12, axis=2)
    if np.any(clash):
        i, j = map(int, np.argwhere(clash)[0])
        raise ConfigError("algebra/structure",
                          f"entries for [e{i + 1}, e{j + 1}] and [e{j + 1}, e{i + 1}] are not antisymmetric")
    return np.where(has_c[:, :, None], c, cT)


def _build_algebra(spec: dict) -> LieAlgebra:
    name = spec.get("name")
    if "structure" in spec:
        c = np.asarray(spec["structure"], dtype=float)
        if c.ndim != 3 or not (c.shape[0] == c.shape[1] == c.shape[2]):
            raise ConfigError("algebra/structure", f"must be an n x n x n array, got shape {c.shape}")
        return LieAlgebra.from_partial(_merge_triangles(c), name=name)
    frame = spec["frame"]
    kind = frame["type"]
    try:
        if kind == "milnor_unimodular":
            if "lambda" not in frame:
                raise ConfigError("algebra/frame/lambda", "required for milnor_unimodular")
            return milnor_unimodular(*frame["lambda"])
        if kind == "milnor_nonunimodular":
            if "params" not in frame:
                raise ConfigError("algebra/frame/params", "required for milnor_nonunimodular")
            return milnor_nonunimodular(*frame["params"])
    except LieAlgebraError as exc:
        raise ConfigError("algebra/frame/params", str(exc)) from exc
    if kind == "heisenberg":
        return heisenberg()
    return abelian(int(frame.get("dim", 3)))


def _finite(path: str, arr: np.ndarray) -> None:
    if not np.all(np.isfinite(arr)):
        raise ConfigError(path, "contains non-finite values")


def parse_config(raw: dict) -> JobConfig:
    """Validate ``raw`` completely and build the job; nothing is computed on failure."""
    try:
        jsonschema.validate(raw, SCHEMA)
    except jsonschema.ValidationError as exc:
        path = "/".join(str(p) for p in exc.absolute_path)
        raise ConfigError(path, exc.message) from None

    algebra = _build_algebra(raw["algebra"])
    n = algebra.dim
    _finite("algebra/structure", algebra.structure)

    metric = np.asarray(raw.get("metric", np.eye(n).tolist()), dtype=float)
    if metric.shape != (n, n):
        raise ConfigError("metric", f"expected shape ({n}, {n}), got {metric.shape}")
    _finite("metric", metric)
    try:
        a = InnerProduct(metric)
    except NormError as exc:
        raise ConfigError("metric", str(exc)) from None

    drift = np.asarray(raw.get("drift", [0.0] * n), dtype=float)
    if drift.shape != (n,):
        raise ConfigError("drift", f"expected length {n}, got {drift.shape[0]}")
    _finite("drift", drift)
    norm = RandersNorm(a, drift)
    try:
        validate(norm)
    except NormError as exc:
        raise ConfigError("drift", str(exc)) from None

    vector = None
    if "vector" in raw:
        vector = np.asarray(raw["vector"], dtype=float)
        if vector.shape != (n,):
            raise ConfigError("vector", f"expected length {n}, got {vector.shape[0]}")
        if not np.any(vector):
            raise ConfigError("vector", "must be nonzero")
    command = raw["command"]
    if command in ("ricci", "milnor-lemma", "orbit-critical") and vector is None:
        raise ConfigError("vector", f"required by command {command!r}")

    seed = int(raw.get("seed", 0))
    solver = SolverConfig(seed=seed, **raw.get("solver", {}))

    warnings = []
    jd = jacobi_defect(algebra)
    if jd > JACOBI_WARN_TOL:
        warnings.append(f"Jacobi identity defect {jd:.3e} exceeds {JACOBI_WARN_TOL:g}; "
                        "structure constants do not define a Lie algebra")
    return JobConfig(raw=raw, command=command, algebra=algebra, norm=norm, solver=solver,
                     seed=seed, vector=vector, samples=int(raw.get("samples", 200)),
                     output=raw.get("output"), name=raw.get("name"), warnings=warnings)


def load_config(path) -> JobConfig:
    with open(path, encoding="utf-8") as fh:
        try:
            raw = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ConfigError("", f"invalid JSON: {exc}") from None
    return parse_config(raw)


def _fmt_float(x: float) -> str:
    if math.isnan(x) or math.isinf(x):
        return json.dumps(str(x))
    text = format(x, ".17g")
    if not any(ch in text for ch in ".en"):
        text += ".0"
    return text


def to_jsonable(obj):
    """Convert numpy containers and scalars to plain Python types."""
    if isinstance(obj, dict):
        return {str(k): to_jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [to_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return to_jsonable(obj.tolist())
    if isinstance(obj, (np.bool_,)):
        return bool(obj)
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, np.floating):
        return float(obj)
    return obj


def dumps(obj, indent: int = 2, _level: int = 0) -> str:
    """JSON text in which every float carries 17 significant digits."""
    obj = to_jsonable(obj) if _level == 0 else obj
    pad = " " * (indent * (_level + 1))
    end = " " * (indent * _level)
    if isinstance(obj, bool) or obj is None:
        return json.dumps(obj)
    if isinstance(obj, float):
        return _fmt_float(obj)
    if isinstance(obj, (int, str)):
        return json.dumps(obj)
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [f"{pad}{json.dumps(k)}: {dumps(v, indent, _level + 1)}" for k, v in obj.items()]
        return "{\n" + ",\n".join(items) + "\n" + end + "}"
    if isinstance(obj, list):
        if not obj:
            return "[]"
        if all(isinstance(v, (int, float)) and not isinstance(v, bool) for v in obj):
            return "[" + ", ".join(dumps(v, indent, _level + 1) for v in obj) + "]"
        items = [pad + dumps(v, indent, _level + 1) for v in obj]
        return "[\n" + ",\n".join(items) + "\n" + end + "]"
    raise TypeError(f"cannot serialize {type(obj).__name__}")
