"""Carnot group arithmetic in exponential coordinates of the first kind.

A group of step ``r`` is described by its layer dimensions ``m_1..m_r`` and
sparse structure constants on the concatenated basis ``e_1..e_N``.  The group
law is the Baker-Campbell-Hausdorff product truncated at the step (exact for
nilpotent algebras of step <= 3), the inverse is coordinate negation, and the
homogeneous norm is ``|u| = (sum_j |z_j|^(2r!/j))^(1/2r!)`` with ``|z_j|`` the
Euclidean length of the layer-``j`` block.
"""

from __future__ import annotations

import json
import math
import re
from dataclasses import dataclass
from functools import cached_property
from pathlib import Path

import numpy as np

from .errors import InvalidGroupSpec, InvalidScale, UnsupportedStep

__all__ = [
    "GroupSpec",
    "Point",
    "validate_group_spec",
    "multiply",
    "inverse",
    "dilate",
    "homogeneous_norm",
    "pseudo_distance",
    "euclidean",
    "heisenberg",
    "free_step_two",
    "builtin_group",
    "load_group_spec",
    "group_from_arg",
]

MAX_BCH_STEP = 3
_JACOBI_TOL = 1e-10
_ANTISYM_TOL = 1e-12


def _bracket(tensor: np.ndarray, x: np.ndarray, y: np.ndarray) -> np.ndarray:
    return np.einsum("...i,...j,ijk->...k", x, y, tensor)


@dataclass(frozen=True)
class GroupSpec:
    """Structure data defining one stratified nilpotent group.

    ``brackets`` holds entries ``(i, j, k, c)`` with 1-based basis indices,
    meaning ``[e_i, e_j]`` contains ``c * e_k``.  Entries are taken literally;
    a missing antisymmetric partner is reported as a violation by
    :func:`validate_group_spec`.  Use :meth:`completed` (the file loader does)
    to fill partners automatically.
    """

    step: int
    layer_dims: tuple[int, ...]
    brackets: tuple[tuple[int, int, int, float], ...] = ()
    name: str = ""

    def __post_init__(self):
        if not isinstance(self.step, int) or self.step < 1:
            raise InvalidGroupSpec(f"step must be a positive integer, got {self.step!r}")
        dims = tuple(int(m) for m in self.layer_dims)
        if len(dims) != self.step or any(m < 1 for m in dims):
            raise InvalidGroupSpec(
                f"layer_dims must list {self.step} positive integers, got {self.layer_dims!r}"
            )
        object.__setattr__(self, "layer_dims", dims)
        n = sum(dims)
        cleaned = []
        for entry in self.brackets:
            if len(entry) != 4:
                raise InvalidGroupSpec(f"bracket entry must be (i, j, k, c): {entry!r}")
            i, j, k, c = int(entry[0]), int(entry[1]), int(entry[2]), float(entry[3])
            if not (1 <= i <= n and 1 <= j <= n and 1 <= k <= n):
                raise InvalidGroupSpec(f"bracket indices out of range 1..{n}: {entry!r}")
            cleaned.append((i, j, k, c))
        object.__setattr__(self, "brackets", tuple(cleaned))

    # -- derived structure ------------------------------------------------

    @property
    def dim(self) -> int:
        return sum(self.layer_dims)

    @property
    def homogeneous_dimension(self) -> int:
        return sum((l + 1) * m for l, m in enumerate(self.layer_dims))

    @property
    def norm_exponent(self) -> int:
        """The 2r! exponent of the homogeneous norm."""
        return 2 * math.factorial(self.step)

    @cached_property
    def layer_slices(self) -> tuple[slice, ...]:
        out, start = [], 0
        for m in self.layer_dims:
            out.append(slice(start, start + m))
            start += m
        return tuple(out)

    @cached_property
    def coord_layers(self) -> np.ndarray:
        """1-based layer index of each basis coordinate."""
        return np.repeat(np.arange(1, self.step + 1), self.layer_dims)

    def layer_dim(self, layer: int) -> int:
        if not 1 <= layer <= self.step:
            raise ValueError(f"layer must be in 1..{self.step}, got {layer}")
        return self.layer_dims[layer - 1]

    @cached_property
    def _tensor(self) -> np.ndarray:
        n = self.dim
        tensor = np.zeros((n, n, n))
        for i, j, k, c in self.brackets:
            tensor[i - 1, j - 1, k - 1] += c
        return tensor

    @cached_property
    def _violations(self) -> tuple[str, ...]:
        return tuple(_collect_violations(self))

    def violations(self) -> list[str]:
        return list(self._violations)

    def require_valid(self) -> None:
        if self._violations:
            raise InvalidGroupSpec("; ".join(self._violations))

    def completed(self) -> "GroupSpec":
        """Return a copy with missing antisymmetric partners filled in."""
        present = {(i, j, k) for i, j, k, _ in self.brackets}
        extra = [
            (j, i, k, -c)
            for i, j, k, c in self.brackets
            if (j, i, k) not in present
        ]
        if not extra:
            return self
        return GroupSpec(self.step, self.layer_dims, self.brackets + tuple(extra), self.name)

    # -- group operations --------------------------------------------------

    def identity(self) -> np.ndarray:
        return np.zeros(self.dim)

    def multiply(self, u, v):
        """BCH product, exact for steps 1..3."""
        if self.step > MAX_BCH_STEP:
            raise UnsupportedStep(
                f"group law implemented exactly only for step <= {MAX_BCH_STEP}, got {self.step}"
            )
        self.require_valid()
        a, ua = _coerce(self, u)
        b, ub = _coerce(self, v)
        w = a + b
        if self.step >= 2:
            ab = _bracket(self._tensor, a, b)
            w = w + 0.5 * ab
            if self.step >= 3:
                w = w + (_bracket(self._tensor, a, ab) - _bracket(self._tensor, b, ab)) / 12.0
        return _wrap(self, w, ua and ub)

    def inverse(self, u):
        self.require_valid()
        a, was_point = _coerce(self, u)
        return _wrap(self, -a, was_point)

    def dilate(self, t, u):
        """Anisotropic scaling: layer ``l`` multiplied by ``t**l``."""
        if not np.isscalar(t) or not math.isfinite(float(t)) or t <= 0:
            raise InvalidScale(f"dilation parameter must be a positive real, got {t!r}")
        self.require_valid()
        a, was_point = _coerce(self, u)
        return _wrap(self, a * float(t) ** self.coord_layers, was_point)

    def dilate_each(self, t: np.ndarray, pts: np.ndarray) -> np.ndarray:
        """Dilate a batch of points by a per-point positive scale vector."""
        return pts * np.asarray(t)[..., None] ** self.coord_layers

    def norm(self, u):
        """Homogeneous norm, 1-homogeneous under dilations."""
        self.require_valid()
        a, _ = _coerce(self, u)
        exponent = self.norm_exponent
        gauges = []
        for l, sl in enumerate(self.layer_slices, start=1):
            s = np.sqrt(np.sum(a[..., sl] ** 2, axis=-1))
            gauges.append(s if l == 1 else s ** (1.0 / l))
        stacked = np.stack(gauges, axis=-1)
        top = np.max(stacked, axis=-1)
        # factor out the largest layer gauge so the 2r! powers cannot overflow
        safe = np.where(top > 0, top, 1.0)
        total = safe * np.sum((stacked / safe[..., None]) ** exponent, axis=-1) ** (1.0 / exponent)
        total = np.where(top > 0, total, 0.0)
        return float(total) if total.ndim == 0 else total

    def box_gauge(self, u):
        """max_i |u_i|^(1/layer(i)); the circumscribing-box analog of the norm."""
        a, _ = _coerce(self, u)
        return np.max(np.abs(a) ** (1.0 / self.coord_layers), axis=-1)

    def distance(self, u, v):
        """Left-invariant pseudo-distance d(u, v) = |u^{-1} v|."""
        a, _ = _coerce(self, u)
        b, _ = _coerce(self, v)
        return self.norm(self.multiply(-a, b))

    def random_points(self, rng: np.random.Generator, n: int, scale: float = 1.0) -> np.ndarray:
        return scale * rng.standard_normal((n, self.dim))


@dataclass(frozen=True, eq=False)
class Point:
    """A group element as per-layer coordinate blocks."""

    layers: tuple[np.ndarray, ...]

    def __post_init__(self):
        blocks = tuple(np.atleast_1d(np.asarray(z, dtype=float)) for z in self.layers)
        for z in blocks:
            if z.ndim != 1:
                raise ValueError("each layer block must be a 1-d real vector")
            if not np.all(np.isfinite(z)):
                raise ValueError("point coordinates must be finite")
        object.__setattr__(self, "layers", blocks)

    @cached_property
    def flat(self) -> np.ndarray:
        return np.concatenate(self.layers)

    def z(self, layer: int) -> np.ndarray:
        return self.layers[layer - 1]

    @classmethod
    def from_flat(cls, spec: GroupSpec, values) -> "Point":
        arr = np.asarray(values, dtype=float)
        if arr.shape != (spec.dim,):
            raise ValueError(f"expected {spec.dim} coordinates, got shape {arr.shape}")
        return cls(tuple(arr[sl].copy() for sl in spec.layer_slices))

    @classmethod
    def origin(cls, spec: GroupSpec) -> "Point":
        return cls.from_flat(spec, np.zeros(spec.dim))

    def __repr__(self):
        inner = ", ".join(np.array2string(z, separator=",") for z in self.layers)
        return f"Point({inner})"


def _coerce(spec: GroupSpec, x) -> tuple[np.ndarray, bool]:
    if isinstance(x, Point):
        arr = x.flat
        if arr.shape[-1] != spec.dim:
            raise ValueError(f"point has {arr.shape[-1]} coordinates, group needs {spec.dim}")
        return arr, True
    arr = np.asarray(x, dtype=float)
    if arr.ndim == 0 or arr.shape[-1] != spec.dim:
        raise ValueError(f"coordinate array must have last axis {spec.dim}, got {arr.shape}")
    return arr, False


def _wrap(spec: GroupSpec, arr: np.ndarray, as_point: bool):
    if as_point and arr.ndim == 1:
        return Point.from_flat(spec, arr)
    return arr


# -- validation --------------------------------------------------------------


def _collect_violations(spec: GroupSpec) -> list[str]:
    out: list[str] = []
    tensor = spec._tensor
    layers = spec.coord_layers
    n = spec.dim

    asym = tensor + np.swapaxes(tensor, 0, 1)
    for i, j, k in zip(*np.nonzero(np.abs(asym) > _ANTISYM_TOL)):
        if i <= j:
            out.append(f"antisymmetry violation at ({i + 1}, {j + 1}, {k + 1})")

    for i, j, k in zip(*np.nonzero(tensor)):
        want = layers[i] + layers[j]
        if want > spec.step or layers[k] != want:
            out.append(
                f"grading violation at ({i + 1}, {j + 1}, {k + 1}): "
                f"bracket of layers {layers[i]},{layers[j]} lands in layer {layers[k]}"
            )

    if n <= 64:  # desk-scale groups; avoid an accidental N^4 blow-up
        jac = (
            np.einsum("ijm,mkl->ijkl", tensor, tensor)
            + np.einsum("jkm,mil->ijkl", tensor, tensor)
            + np.einsum("kim,mjl->ijkl", tensor, tensor)
        )
        scale = max(1.0, float(np.max(np.abs(tensor))) ** 2)
        bad = {
            tuple(sorted((int(i) + 1, int(j) + 1, int(k) + 1)))
            for i, j, k, _ in zip(*np.nonzero(np.abs(jac) > _JACOBI_TOL * scale))
        }
        for triple in sorted(bad):
            out.append(f"Jacobi identity violation on basis triple {triple}")
    return out


def validate_group_spec(spec: GroupSpec) -> list[str]:
    """Return every violated axiom (antisymmetry, grading, Jacobi); empty = valid."""
    return spec.violations()


# -- functional aliases ------------------------------------------------------


def multiply(spec: GroupSpec, u, v):
    return spec.multiply(u, v)


def inverse(spec: GroupSpec, u):
    return spec.inverse(u)


def dilate(spec: GroupSpec, t, u):
    return spec.dilate(t, u)


def homogeneous_norm(spec: GroupSpec, u):
    return spec.norm(u)


def pseudo_distance(spec: GroupSpec, u, v):
    return spec.distance(u, v)


# -- built-in groups ---------------------------------------------------------


def euclidean(m: int) -> GroupSpec:
    """Abelian R^m as a step-1 group."""
    spec = GroupSpec(1, (int(m),), (), name=f"R{m}")
    spec.require_valid()
    return spec


def heisenberg(n: int = 1) -> GroupSpec:
    """Heisenberg H^n: layers (2n, 1) with [e_i, e_{n+i}] = e_{2n+1}."""
    n = int(n)
    brackets = tuple((i, n + i, 2 * n + 1, 1.0) for i in range(1, n + 1))
    spec = GroupSpec(2, (2 * n, 1), brackets, name=f"H{n}").completed()
    spec.require_valid()
    return spec


def free_step_two(generators: int = 3) -> GroupSpec:
    """Free step-2 group: layers (g, g(g-1)/2), one bracket per generator pair."""
    g = int(generators)
    brackets = []
    k = g
    for i in range(1, g + 1):
        for j in range(i + 1, g + 1):
            k += 1
            brackets.append((i, j, k, 1.0))
    spec = GroupSpec(2, (g, g * (g - 1) // 2), tuple(brackets), name=f"free2_{g}").completed()
    spec.require_valid()
    return spec


_BUILTIN_PATTERNS = (
    (re.compile(r"^[rR](\d+)$"), lambda m: euclidean(int(m))),
    (re.compile(r"^[hH](\d+)$"), lambda m: heisenberg(int(m))),
    (re.compile(r"^free2?[_-]?(\d+)$"), lambda m: free_step_two(int(m))),
)


def builtin_group(name: str) -> GroupSpec:
    """Resolve a built-in group name: R<m>, H<n>, free<g>."""
    for pattern, factory in _BUILTIN_PATTERNS:
        match = pattern.match(name.strip())
        if match:
            return factory(match.group(1))
    raise KeyError(f"unknown built-in group {name!r} (expected R<m>, H<n> or free<g>)")


def load_group_spec(path) -> GroupSpec:
    """Load a group from a JSON file with fields step, layer_dims, brackets.

    Bracket indices are 1-based over the concatenated basis; antisymmetric
    partners may be omitted and are completed before validation.
    """
    path = Path(path)
    try:
        data = json.loads(path.read_text())
    except json.JSONDecodeError as exc:
        raise InvalidGroupSpec(f"{path}: not valid JSON ({exc})") from exc
    for key in ("step", "layer_dims"):
        if key not in data:
            raise InvalidGroupSpec(f"{path}: missing required field {key!r}")
    spec = GroupSpec(
        step=data["step"],
        layer_dims=tuple(data["layer_dims"]),
        brackets=tuple(tuple(entry) for entry in data.get("brackets", ())),
        name=str(data.get("name", path.stem)),
    ).completed()
    spec.require_valid()
    return spec


def group_from_arg(arg: str) -> GroupSpec:
    """Resolve a CLI group argument: built-in name or spec file path."""
    try:
        return builtin_group(arg)
    except KeyError:
        pass
    path = Path(arg)
    if not path.exists():
        raise InvalidGroupSpec(f"{arg!r} is neither a built-in group name nor an existing file")
    return load_group_spec(path)
