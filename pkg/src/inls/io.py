"""Snapshot files and run configuration.

Snapshot layout (little-endian)::

    offset  size  field
    0       8     magic b"INLSFLD1"
    8       4     version (u32) = 1
    12      4     N (u32)
    16      4     M (u32)
    20      8     L (f64)
    28      8     b (f64)
    36      8     t (f64)
    44      1     cell-centered flag (u8)
    45      19    zero padding
    64      ...   M^N complex samples as (re, im) f64 pairs, row-major
"""

from __future__ import annotations

import json
import math
import struct
from dataclasses import asdict, dataclass, field, fields
from pathlib import Path

import numpy as np

from .evolution import EvolutionConfig
from .model import CartesianGrid, Field, Params, make_params

MAGIC = b"INLSFLD1"
VERSION = 1
HEADER = struct.Struct("<8sIIIdddB19x")
assert HEADER.size == 64


class SnapshotFormatError(ValueError):
    pass


class ConfigError(ValueError):
    """Invalid run configuration; the message names the offending field."""


def write_snapshot(path, u: Field, b: float) -> None:
    g = u.grid
    head = HEADER.pack(MAGIC, VERSION, g.N, g.M, g.L, float(b), float(u.t), int(g.cell_centered))
    data = np.ascontiguousarray(u.values, dtype="<c16")
    with open(path, "wb") as fh:
        fh.write(head)
        fh.write(data.tobytes(order="C"))


def read_snapshot(path) -> tuple[Field, float]:
    """Return the field and the b stored with it."""
    raw = Path(path).read_bytes()
    if len(raw) < HEADER.size:
        raise SnapshotFormatError(f"{path}: file shorter than the 64-byte header")
    magic, version, N, M, L, b, t, centred = HEADER.unpack_from(raw)
    if magic != MAGIC:
        raise SnapshotFormatError(f"{path}: bad magic {magic!r}, expected {MAGIC!r}")
    if version != VERSION:
        raise SnapshotFormatError(f"{path}: unsupported snapshot version {version}")
    expected = HEADER.size + 16 * M**N
    if len(raw) != expected:
        raise SnapshotFormatError(f"{path}: expected {expected} bytes for N={N}, M={M}, found {len(raw)}")
    grid = CartesianGrid(N, L, M, bool(centred))
    values = np.frombuffer(raw, dtype="<c16", offset=HEADER.size).reshape(grid.shape).astype(complex)
    return Field(values, grid, t), b


# ---------------------------------------------------------------------------
# Run configuration
# ---------------------------------------------------------------------------

INITIAL_KINDS = ("ground_state", "s_family", "gaussian", "snapshot")
_INITIAL_KEYS = {
    "ground_state": {"kind", "lambda0", "gamma0"},
    "s_family": {"kind", "T", "lambda0", "gamma0"},
    "gaussian": {"kind", "amplitude", "width"},
    "snapshot": {"kind", "path"},
}


@dataclass(frozen=True)
class InitialCondition:
    kind: str
    T: float = 1.0
    lambda0: float = 1.0
    gamma0: float = 0.0
    amplitude: float = 1.0
    width: float = 1.0
    path: str | None = None

    def to_dict(self) -> dict:
        keys = _INITIAL_KEYS[self.kind]
        return {k: v for k, v in asdict(self).items() if k in keys}


@dataclass(frozen=True)
class Outputs:
    diagnostics: str | None = None
    snapshot_prefix: str | None = None
    snapshot_times: tuple[float, ...] = ()


@dataclass(frozen=True)
class RunConfig:
    params: Params
    grid: CartesianGrid
    initial_condition: InitialCondition
    evolution: EvolutionConfig
    outputs: Outputs = field(default_factory=Outputs)
    seed: int = 0

    def to_dict(self) -> dict:
        evo = asdict(self.evolution)
        evo.pop("snapshot_times")
        return {
            "params": {"N": self.params.N, "b": self.params.b},
            "grid": {"M": self.grid.M, "L": self.grid.L, "cell_centered": self.grid.cell_centered},
            "initial_condition": self.initial_condition.to_dict(),
            "evolution": evo,
            "outputs": {"diagnostics": self.outputs.diagnostics,
                        "snapshot_prefix": self.outputs.snapshot_prefix,
                        "snapshot_times": list(self.outputs.snapshot_times)},
            "seed": self.seed,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, default=_json_number)


def _json_number(x):
    if isinstance(x, (np.floating, np.integer)):
        return x.item()
    raise TypeError(f"not JSON serializable: {type(x).__name__}")


def _check_keys(obj, allowed: set, where: str):
    if not isinstance(obj, dict):
        raise ConfigError(f"{where}: expected an object, got {type(obj).__name__}")
    extra = sorted(set(obj) - allowed)
    if extra:
        raise ConfigError(f"{where}: unknown key(s) {', '.join(extra)}")


def _number(obj, key, where, default=None, kind=float):
    if key not in obj:
        if default is None:
            raise ConfigError(f"{where}.{key}: required")
        return default
    v = obj[key]
    if isinstance(v, bool) or not isinstance(v, (int, float)):
        raise ConfigError(f"{where}.{key}: expected a number, got {v!r}")
    if kind is int:
        if int(v) != v:
            raise ConfigError(f"{where}.{key}: expected an integer, got {v!r}")
        return int(v)
    v = float(v)
    if not math.isfinite(v):
        raise ConfigError(f"{where}.{key}: must be finite")
    return v


def _flag(obj, key, where, default):
    v = obj.get(key, default)
    if not isinstance(v, bool):
        raise ConfigError(f"{where}.{key}: expected true/false, got {v!r}")
    return v


def parse_config(text: str, base_dir: str | Path | None = None) -> RunConfig:
    """Parse and validate a JSON run configuration; unknown keys are rejected."""
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"JSON parse error at line {exc.lineno}, column {exc.colno}: {exc.msg}") from None
    _check_keys(raw, {"params", "grid", "initial_condition", "evolution", "outputs", "seed"}, "config")

    p = raw.get("params")
    if p is None:
        raise ConfigError("params: required")
    _check_keys(p, {"N", "b"}, "params")
    N = _number(p, "N", "params", kind=int)
    b = _number(p, "b", "params")
    try:
        params = make_params(N, b)
    except ValueError as exc:
        raise ConfigError(f"params.b: {exc}") from None

    gr = raw.get("grid", {})
    _check_keys(gr, {"M", "L", "cell_centered"}, "grid")
    try:
        grid = CartesianGrid(N, _number(gr, "L", "grid", 20.0), _number(gr, "M", "grid", 1024, int),
                             _flag(gr, "cell_centered", "grid", True))
    except ValueError as exc:
        raise ConfigError(f"grid: {exc}") from None

    ic = raw.get("initial_condition", {"kind": "ground_state"})
    if not isinstance(ic, dict) or ic.get("kind") not in INITIAL_KINDS:
        raise ConfigError(f"initial_condition.kind: expected one of {INITIAL_KINDS}")
    kind = ic["kind"]
    _check_keys(ic, _INITIAL_KEYS[kind], "initial_condition")
    where = "initial_condition"
    if kind == "snapshot":
        path = ic.get("path")
        if not isinstance(path, str):
            raise ConfigError("initial_condition.path: required string")
        if base_dir is not None and not Path(path).is_absolute():
            path = str(Path(base_dir) / path)
        init = InitialCondition(kind, path=path)
    else:
        init = InitialCondition(kind, T=_number(ic, "T", where, 1.0), lambda0=_number(ic, "lambda0", where, 1.0),
                                gamma0=_number(ic, "gamma0", where, 0.0),
                                amplitude=_number(ic, "amplitude", where, 1.0), width=_number(ic, "width", where, 1.0))
        if init.lambda0 <= 0 or init.width <= 0:
            raise ConfigError(f"{where}: lambda0 and width must be positive")

    ev = raw.get("evolution", {})
    names = {f.name for f in fields(EvolutionConfig)} - {"snapshot_times"}
    _check_keys(ev, names, "evolution")
    defaults = EvolutionConfig()
    try:
        thr = ev.get("grad_blowup_threshold")
        evo = EvolutionConfig(
            dt0=_number(ev, "dt0", "evolution", defaults.dt0),
            t_end=_number(ev, "t_end", "evolution", defaults.t_end),
            grad_blowup_threshold=None if thr is None else _number(ev, "grad_blowup_threshold", "evolution"),
            adapt=_flag(ev, "adapt", "evolution", defaults.adapt),
            record_every=_number(ev, "record_every", "evolution", defaults.record_every, int),
            strict_boundary=_flag(ev, "strict_boundary", "evolution", defaults.strict_boundary),
            conc_radius=_number(ev, "conc_radius", "evolution", defaults.conc_radius),
            boundary_tol=_number(ev, "boundary_tol", "evolution", defaults.boundary_tol),
            precision=ev.get("precision", defaults.precision),
        )
    except ValueError as exc:
        raise ConfigError(f"evolution: {exc}") from None

    out = raw.get("outputs", {})
    _check_keys(out, {"diagnostics", "snapshot_prefix", "snapshot_times"}, "outputs")
    times = out.get("snapshot_times", [])
    if not isinstance(times, list) or not all(isinstance(t, (int, float)) and not isinstance(t, bool) for t in times):
        raise ConfigError("outputs.snapshot_times: expected a list of numbers")
    for key in ("diagnostics", "snapshot_prefix"):
        if out.get(key) is not None and not isinstance(out[key], str):
            raise ConfigError(f"outputs.{key}: expected a string path")
    outputs = Outputs(out.get("diagnostics"), out.get("snapshot_prefix"), tuple(float(t) for t in times))
    evo = EvolutionConfig(**{**asdict(evo), "snapshot_times": outputs.snapshot_times})

    seed = _number(raw, "seed", "config", 0, int)
    return RunConfig(params, grid, init, evo, outputs, seed)
