"""Network container format: a directory of raw tensors plus a manifest.

``manifest.json`` carries ``format_version`` (1), ``kind`` (``mps`` or
``ttn``), the chain length or tree depth, ``phys_dim``, ``bond_dims``,
``dtype`` (always ``c128``) and a table mapping tensor names to their file,
shape, and axis-order string.  Each tensor file holds IEEE-754 little-endian
float64 pairs (re, im) in row-major order.  Axis orders: MPS gamma tensors
are ``(left, phys, right)`` with Schmidt vectors by ascending bond index;
TTN isometries are ``(top, left_child, right_child)``.

Saving is deterministic, so save -> load -> save reproduces byte-identical
files.
"""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np

from .errors import LoadError, ValidationError
from .mps import CANONICAL_TOL, MatrixProductState, canonical_residual
from .ttn import TreeTensorNetwork

FORMAT_VERSION = 1
_DTYPE = np.dtype("<c16")


def _write_tensor(path: Path, array: np.ndarray) -> None:
    path.write_bytes(np.ascontiguousarray(array, dtype=_DTYPE).tobytes())


def _read_tensor(path: Path, shape) -> np.ndarray:
    expected = int(np.prod(shape)) * _DTYPE.itemsize
    try:
        raw = path.read_bytes()
    except OSError as exc:
        raise LoadError(f"cannot read tensor file {path}: {exc}") from exc
    if len(raw) != expected:
        raise LoadError(
            f"tensor file {path.name} holds {len(raw)} bytes, expected {expected}"
        )
    return np.frombuffer(raw, dtype=_DTYPE).reshape(shape).astype(np.complex128)


def save_network(path, state) -> None:
    """Write an MPS or TTN to a container directory (created if missing)."""
    root = Path(path)
    root.mkdir(parents=True, exist_ok=True)
    tensors: dict[str, dict] = {}
    manifest: dict = {"format_version": FORMAT_VERSION, "dtype": "c128"}

    if isinstance(state, MatrixProductState):
        manifest["kind"] = "mps"
        manifest["length"] = state.length
        manifest["phys_dim"] = state.phys_dim
        manifest["bond_dims"] = state.bond_dims
        for n, g in enumerate(state.gammas):
            name = f"gamma_{n:04d}"
            tensors[name] = {
                "file": name + ".bin",
                "shape": list(g.shape),
                "axes": "left,phys,right",
            }
            _write_tensor(root / (name + ".bin"), g)
        for n, s in enumerate(state.schmidt):
            name = f"schmidt_{n:04d}"
            tensors[name] = {
                "file": name + ".bin",
                "shape": [len(s)],
                "axes": "bond",
            }
            _write_tensor(root / (name + ".bin"), s.astype(np.complex128))
    elif isinstance(state, TreeTensorNetwork):
        manifest["kind"] = "ttn"
        manifest["depth"] = state.depth
        manifest["phys_dim"] = state.phys_dim
        manifest["bond_dims"] = [[w.shape[0] for w in layer] for layer in state.layers]
        for k, layer in enumerate(state.layers):
            for p, w in enumerate(layer):
                name = f"iso_{k:02d}_{p:04d}"
                tensors[name] = {
                    "file": name + ".bin",
                    "shape": list(w.shape),
                    "axes": "top,left_child,right_child",
                }
                _write_tensor(root / (name + ".bin"), w)
        tensors["top"] = {
            "file": "top.bin",
            "shape": list(state.top_tensor.shape),
            "axes": "left,right",
        }
        _write_tensor(root / "top.bin", state.top_tensor)
    else:
        raise ValidationError(f"cannot serialize object of type {type(state).__name__}")

    manifest["tensors"] = tensors
    (root / "manifest.json").write_text(
        json.dumps(manifest, indent=2, sort_keys=True) + "\n", encoding="utf-8"
    )


def _manifest(root: Path) -> dict:
    mf = root / "manifest.json"
    if not mf.is_file():
        raise LoadError(f"no manifest.json in {root}")
    try:
        manifest = json.loads(mf.read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError) as exc:
        raise LoadError(f"corrupt manifest in {root}: {exc}") from exc
    version = manifest.get("format_version")
    if version != FORMAT_VERSION:
        raise LoadError(f"unsupported format_version {version!r}")
    if manifest.get("dtype") != "c128":
        raise LoadError(f"unsupported dtype {manifest.get('dtype')!r}")
    for key in ("kind", "phys_dim", "tensors"):
        if key not in manifest:
            raise LoadError(f"manifest missing field {key!r}")
    return manifest


def _load_entry(root: Path, tensors: dict, name: str) -> np.ndarray:
    if name not in tensors:
        raise LoadError(f"manifest missing tensor {name!r}")
    entry = tensors[name]
    return _read_tensor(root / entry["file"], tuple(entry["shape"]))


def load_network(path):
    """Load an MPS or TTN container; raises :class:`LoadError` on any defect."""
    root = Path(path)
    manifest = _manifest(root)
    tensors = manifest["tensors"]
    kind = manifest["kind"]

    if kind == "mps":
        try:
            length = int(manifest["length"])
        except (KeyError, TypeError, ValueError) as exc:
            raise LoadError("mps manifest missing a valid length") from exc
        gammas = [_load_entry(root, tensors, f"gamma_{n:04d}") for n in range(length)]
        schmidt = []
        for n in range(length + 1):
            s = _load_entry(root, tensors, f"schmidt_{n:04d}")
            if np.max(np.abs(s.imag)) > 0:
                raise LoadError(f"schmidt vector {n} has imaginary entries")
            schmidt.append(s.real)
        try:
            state = MatrixProductState(gammas, schmidt, canonical=False)
        except ValidationError as exc:
            raise LoadError(f"inconsistent mps container: {exc}") from exc
        if int(manifest.get("phys_dim", -1)) != state.phys_dim:
            raise LoadError("manifest phys_dim does not match tensors")
        state.canonical = canonical_residual(state) <= CANONICAL_TOL
        return state

    if kind == "ttn":
        try:
            depth = int(manifest["depth"])
        except (KeyError, TypeError, ValueError) as exc:
            raise LoadError("ttn manifest missing a valid depth") from exc
        if depth < 2:
            raise LoadError(f"invalid depth {depth}")
        layers = []
        n_nodes = 2 ** (depth - 1)
        for k in range(depth - 1):
            layers.append(
                [_load_entry(root, tensors, f"iso_{k:02d}_{p:04d}") for p in range(n_nodes)]
            )
            n_nodes //= 2
        top = _load_entry(root, tensors, "top")
        try:
            return TreeTensorNetwork(layers, top, phys_dim=int(manifest["phys_dim"]))
        except ValidationError as exc:
            raise LoadError(f"inconsistent ttn container: {exc}") from exc

    raise LoadError(f"unknown network kind {kind!r}")
