"""Run configuration: a TOML file with [model], [family], [command] and [tolerances] tables.

Matrix-valued keys take either a path to a plain-text complex matrix
(relative paths resolve against the config file), an inline list of real
rows, or an inline table {re = [[...]], im = [[...]]}. Complex scalars are
written as [re, im]. Unknown keys are rejected.
"""
from __future__ import annotations

import sys
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Any

import numpy as np

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

from .errors import ConfigParse
from .matrix_io import read_matrix
from .models import FAMILY_KINDS, FamilyRecipe, ModelRecipe, _lattice_family, generate, pinned_two_level
from .operator_model import ExtensionModel, ModelConfig, build_model
from .tolerances import DEFAULT_TOLERANCES, Tolerances
from .weyl_q import AlphaType, Perturbed, ProjectorTheta, QFamily, VWType, smallness_constant

MODEL_KEYS = {"kind", "seed", "n_h", "n_k", "n_sites", "coupling_sites", "boundary", "a0", "tau", "v", "w"}
FAMILY_KEYS = {"kind", "coupling", "perturbation", "n_x", "weyl_variant", "z0", "seed", "base",
               "alpha", "pi", "theta", "basis", "v", "w", "b"}
COMMAND_KEYS = {"grid", "interval", "n_grid", "n_samples", "n_pairs", "seed", "z", "workers"}
SECTIONS = {"model", "family", "command", "tolerances"}
EXPLICIT_FAMILY_KEYS = {"alpha", "pi", "theta", "basis", "v", "w", "b"}


@dataclass(frozen=True)
class CommandParams:
    grid: tuple[float, float, float, float, int, int] | None = None
    interval: tuple[float, float] | None = None
    n_grid: int = 400
    n_samples: int = 100
    n_pairs: int = 25
    seed: int = 0
    z: complex | None = None
    workers: int | None = None


@dataclass(frozen=True)
class RunConfig:
    model: dict
    family: dict
    command: CommandParams = field(default_factory=CommandParams)
    tolerances: Tolerances = DEFAULT_TOLERANCES
    base_dir: Path = Path(".")

    def build(self) -> tuple[ExtensionModel, QFamily]:
        return build_instance(self)


def _check_keys(section: str, table: dict, allowed: set[str]):
    unknown = set(table) - allowed
    if unknown:
        raise ConfigParse(f"unknown key(s) in [{section}]: {sorted(unknown)}")


def _complex(value, name: str) -> complex:
    if isinstance(value, (int, float)):
        return complex(value)
    if isinstance(value, (list, tuple)) and len(value) == 2:
        return complex(float(value[0]), float(value[1]))
    raise ConfigParse(f"{name} must be a number or [re, im]")


def _matrix(value, name: str, base_dir: Path) -> np.ndarray:
    try:
        if isinstance(value, str):
            path = Path(value)
            return read_matrix(path if path.is_absolute() else base_dir / path)
        if isinstance(value, dict):
            if set(value) - {"re", "im"}:
                raise ConfigParse(f"{name}: inline complex matrix takes only 're' and 'im'")
            re = np.array(value.get("re", 0.0), dtype=float)
            im = np.array(value.get("im", np.zeros_like(re)), dtype=float)
            return np.atleast_2d(re + 1j * im)
        return np.atleast_2d(np.array(value, dtype=float)).astype(np.complex128)
    except (OSError, ValueError) as exc:
        if isinstance(exc, ConfigParse):
            raise
        raise ConfigParse(f"cannot read matrix {name!r}: {exc}") from exc


def parse_config(text: str, base_dir: Path = Path(".")) -> RunConfig:
    try:
        data = tomllib.loads(text)
    except tomllib.TOMLDecodeError as exc:
        raise ConfigParse(f"invalid TOML: {exc}") from exc
    _check_keys("<top level>", data, SECTIONS)
    model = data.get("model")
    if not model:
        raise ConfigParse("missing [model] table")
    family = data.get("family", {})
    command = data.get("command", {})
    tols = data.get("tolerances", {})
    _check_keys("model", model, MODEL_KEYS)
    _check_keys("family", family, FAMILY_KEYS)
    _check_keys("command", command, COMMAND_KEYS)
    try:
        tolerances = DEFAULT_TOLERANCES.updated(**{k: float(v) for k, v in tols.items()})
    except (TypeError, ValueError) as exc:
        raise ConfigParse(str(exc)) from exc
    return RunConfig(model=dict(model), family=dict(family), command=_command(command),
                     tolerances=tolerances, base_dir=base_dir)


def _command(table: dict) -> CommandParams:
    kw: dict[str, Any] = {}
    try:
        if "grid" in table:
            kw["grid"] = parse_grid(table["grid"])
        if "interval" in table:
            kw["interval"] = parse_interval(table["interval"])
        if "z" in table:
            kw["z"] = _complex(table["z"], "z")
        for key in ("n_grid", "n_samples", "n_pairs", "seed", "workers"):
            if key in table:
                kw[key] = int(table[key])
    except (TypeError, ValueError) as exc:
        if isinstance(exc, ConfigParse):
            raise
        raise ConfigParse(f"[command]: {exc}") from exc
    return CommandParams(**kw)


def parse_grid(value) -> tuple[float, float, float, float, int, int]:
    parts = value.split(",") if isinstance(value, str) else list(value)
    if len(parts) != 6:
        raise ConfigParse("grid needs re0,re1,im0,im1,nx,ny")
    re0, re1, im0, im1 = (float(p) for p in parts[:4])
    nx, ny = int(parts[4]), int(parts[5])
    return re0, re1, im0, im1, nx, ny


def parse_interval(value) -> tuple[float, float]:
    parts = value.split(",") if isinstance(value, str) else list(value)
    if len(parts) != 2:
        raise ConfigParse("interval needs a,b")
    a, b = float(parts[0]), float(parts[1])
    if not a < b:
        raise ConfigParse("interval needs a < b")
    return a, b


def parse_z(value: str) -> complex:
    parts = value.split(",")
    if len(parts) != 2:
        raise ConfigParse("z needs re,im")
    return complex(float(parts[0]), float(parts[1]))


def load_config(path: str | Path) -> RunConfig:
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise ConfigParse(f"cannot read config {path}: {exc}") from exc
    return parse_config(text, path.parent)


# --------------------------------------------------------------------------- instance assembly


def _family_recipe(fam: dict) -> FamilyRecipe:
    kw: dict[str, Any] = {}
    for key in ("kind", "weyl_variant"):
        if key in fam:
            kw[key] = str(fam[key])
    for key in ("coupling", "perturbation"):
        if key in fam:
            kw[key] = float(fam[key])
    for key in ("n_x", "seed"):
        if key in fam:
            kw[key] = int(fam[key])
    if "z0" in fam:
        kw["z0"] = _complex(fam["z0"], "z0")
    return FamilyRecipe(**kw)


def _explicit_family(kind: str, fam: dict, base_dir: Path, common: dict) -> QFamily:
    def mat(key):
        if key not in fam:
            raise ConfigParse(f"[family] kind {kind} needs key {key!r}")
        return _matrix(fam[key], key, base_dir)

    if kind == "AlphaType":
        return AlphaType(alpha=mat("alpha"), **common)
    if kind == "VWType":
        v = _matrix(fam["v"], "v", base_dir) if "v" in fam else None
        w = mat("w")
        return VWType(v=v if v is not None else w.conj().T, w=w, **common)
    if kind == "ProjectorTheta":
        basis = _matrix(fam["basis"], "basis", base_dir) if "basis" in fam else None
        pi = mat("pi") if "pi" in fam or basis is None else basis.conj().T @ basis
        return ProjectorTheta(pi=pi, theta=mat("theta"), basis=basis, **common)
    if kind == "Perturbed":
        base_kind = str(fam.get("base", "AlphaType"))
        if base_kind == "Perturbed" or base_kind not in FAMILY_KINDS:
            raise ConfigParse(f"invalid base family {base_kind!r}")
        return Perturbed(base=_explicit_family(base_kind, fam, base_dir, common), b=mat("b"))
    raise ConfigParse(f"unknown family kind {kind!r}")


def build_instance(cfg: RunConfig) -> tuple[ExtensionModel, QFamily]:
    m, fam, tol = cfg.model, cfg.family, cfg.tolerances
    try:
        recipe = _family_recipe(fam)
    except (TypeError, ValueError) as exc:
        raise ConfigParse(f"[family]: {exc}") from exc
    explicit = bool(EXPLICIT_FAMILY_KEYS & set(fam))
    kind = str(m.get("kind", "RandomHermitian"))
    if recipe.kind not in FAMILY_KINDS:
        raise ConfigParse(f"unknown family kind {recipe.kind!r}")
    common = dict(weyl_variant=recipe.weyl_variant, z0=recipe.z0)

    if kind in ("RandomHermitian", "LatticeLaplacian1D"):
        if {"a0", "tau", "v", "w"} & set(m):
            raise ConfigParse(f"model kind {kind} takes no explicit matrices")
        try:
            model_recipe = ModelRecipe(
                kind=kind, seed=int(m.get("seed", 0)), n_h=int(m.get("n_h", 8)), n_k=int(m.get("n_k", 2)),
                n_sites=int(m.get("n_sites", 16)),
                coupling_sites=tuple(int(j) for j in m.get("coupling_sites", [int(m.get("n_sites", 16)) // 2])),
                boundary=str(m.get("boundary", "Dirichlet")), family=recipe)
        except (TypeError, ValueError) as exc:
            raise ConfigParse(f"[model]: {exc}") from exc
        model, family = generate(model_recipe, tol)
        if explicit:
            family = replace(_explicit_family(recipe.kind, fam, cfg.base_dir, common), smallness_c=None)
    elif kind == "Pinned2x2":
        model, family = pinned_two_level(tol=tol)
        if explicit or "coupling" in fam:
            family = (_explicit_family(recipe.kind, fam, cfg.base_dir, common) if explicit
                      else _lattice_family(recipe, model.n_k))
    elif kind == "Explicit":
        for key in ("a0", "tau"):
            if key not in m:
                raise ConfigParse(f"explicit model needs {key!r}")
        mats = {key: _matrix(m[key], key, cfg.base_dir) for key in ("a0", "tau", "v", "w") if key in m}
        model = build_model(ModelConfig(**mats), tol)
        family = (_explicit_family(recipe.kind, fam, cfg.base_dir, common) if explicit
                  else _lattice_family(recipe, model.n_k))
    else:
        raise ConfigParse(f"unknown model kind {kind!r}")
    family.validate(model)
    if family.smallness_c is None:
        family = replace(family, smallness_c=smallness_constant(model, family))
    return model, family
