"""Certification configs: one JSON document per batch."""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

from .errors import ConfigError
from .lie_core import MatrixLieAlgebra, build_catalog_algebra, load_algebra_json
from .recipes import parse_recipe

DEFAULT_MAX_DEGREE = 6
MAX_ALGEBRA_DIM = 120
_DIMENSION = {"sl_real": lambda n: n * n - 1, "so_lorentz": lambda n: n * (n + 1) // 2,
              "su_lorentz": lambda n: n * n + 2 * n}
_TOLERANCE_KEYS = {"gap", "antisymmetry", "antisymmetry_policy", "trials", "max_degree"}


@dataclass(frozen=True)
class CertConfig:
    algebra: dict[str, Any]
    reps: tuple[str, ...]
    degrees: tuple[int, ...]
    seed: int = 0
    gap_tolerance: float = 1e-9
    antisymmetry_tolerance: float = 1e-7
    antisymmetry_policy: str = "warn"
    trials: int = 200
    max_degree: int = DEFAULT_MAX_DEGREE
    output: str | None = None
    source: dict[str, Any] = field(default_factory=dict, repr=False)

    def build_algebra(self) -> MatrixLieAlgebra:
        spec = self.algebra
        if "raw" in spec:
            return load_algebra_json(spec["raw"])
        if "path" in spec:
            return load_algebra_json(spec["path"])
        return build_catalog_algebra(spec["family"], spec["n"])

    def check_degrees(self, p_dim: int) -> None:
        cap = min(p_dim, self.max_degree)
        for p in self.degrees:
            if not 1 <= p <= cap:
                raise ConfigError(f"degree {p} outside 1..{cap} (N={p_dim}, max_degree={self.max_degree})")


def _require(cond: bool, message: str) -> None:
    if not cond:
        raise ConfigError(message)


def _is_int(x) -> bool:
    return isinstance(x, int) and not isinstance(x, bool)


def parse_config(doc: Any) -> CertConfig:
    """Validate a decoded config document; raises ConfigError or ParseError."""
    _require(isinstance(doc, dict), "config must be a JSON object")
    alg = doc.get("algebra")
    _require(isinstance(alg, dict), "'algebra' must be an object")
    if "raw" not in alg and "path" not in alg:
        _require(isinstance(alg.get("family"), str), "'algebra.family' must be a string")
        _require(_is_int(alg.get("n")), "'algebra.n' must be an integer")
        size = _DIMENSION.get(alg["family"], lambda n: 0)(alg["n"])
        _require(size <= MAX_ALGEBRA_DIM, f"algebra dimension {size} exceeds the cap {MAX_ALGEBRA_DIM}")
    reps = doc.get("rep", doc.get("reps"))
    if isinstance(reps, str):
        reps = [reps]
    _require(isinstance(reps, list) and len(reps) > 0, "'rep' must be a recipe string or a nonempty list")
    for r in reps:
        parse_recipe(r)
    degrees = doc.get("degrees", [1])
    _require(isinstance(degrees, list) and len(degrees) > 0 and all(_is_int(p) for p in degrees),
             "'degrees' must be a nonempty list of integers")
    seed = doc.get("seed", 0)
    _require(_is_int(seed) and 0 <= seed < 2**64, "'seed' must be an integer in [0, 2^64)")
    tol = doc.get("tolerances", {})
    _require(isinstance(tol, dict), "'tolerances' must be an object")
    unknown = set(tol) - _TOLERANCE_KEYS
    _require(not unknown, f"unknown tolerance keys {sorted(unknown)}")
    kwargs = {}
    for key, name in (("gap", "gap_tolerance"), ("antisymmetry", "antisymmetry_tolerance")):
        if key in tol:
            v = tol[key]
            _require(isinstance(v, (int, float)) and not isinstance(v, bool) and v >= 0,
                     f"tolerance '{key}' must be a nonnegative number")
            kwargs[name] = float(v)
    if "antisymmetry_policy" in tol:
        _require(tol["antisymmetry_policy"] in ("raise", "warn", "ignore"),
                 "'antisymmetry_policy' must be raise, warn or ignore")
        kwargs["antisymmetry_policy"] = tol["antisymmetry_policy"]
    for key in ("trials", "max_degree"):
        if key in tol:
            _require(_is_int(tol[key]) and tol[key] >= 1, f"'{key}' must be a positive integer")
            kwargs[key] = tol[key]
    output = doc.get("output")
    _require(output is None or isinstance(output, str), "'output' must be a string")
    return CertConfig(algebra=alg, reps=tuple(reps), degrees=tuple(degrees), seed=seed,
                      output=output, source=doc, **kwargs)


def load_config(path) -> CertConfig:
    try:
        doc = json.loads(Path(path).read_text())
    except OSError as exc:
        raise ConfigError(f"cannot read config: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"invalid JSON: {exc}") from exc
    return parse_config(doc)
