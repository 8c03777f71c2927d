"""Haar-measure Monte-Carlo integration over pseudo-balls with power weights.

Haar measure is Lebesgue measure in exponential coordinates, so integrals are
estimated by importance sampling in coordinates.  Every sampler draws in the
centered coordinates of its own anchor point and left-translates afterwards
(left translation has unit Jacobian), and every sampler knows its own density,
so estimates are unbiased:  E[f(V) w(V) 1_B(V) / p(V)] = integral over B.

Singular power weights get matched proposals:

* ``|z_l|^a`` (a < 0): the layer block is drawn isotropically with radius from
  the power density rho^(a + m_l - 1), which cancels the weight's radial
  factor exactly.
* ``|u|^a`` (a < 0): a box-uniform draw is shrunk by a random dilation with
  scale density t^(a + Q - 1); mixed 50/50 with the plain box draw this keeps
  the weight-to-density ratio bounded on the whole ball.

Seed contract: sample chunk ``k`` uses ``seed XOR k``, and chunk boundaries
depend only on ``n_samples``, so the merged estimate is independent of how
many workers process the chunks and is bit-reproducible for a fixed config.
"""

from __future__ import annotations

import math
import zlib
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace

import numpy as np
from scipy.special import gammaincinv
from scipy.stats import qmc

from .closedforms import sphere_surface
from .errors import (
    BadTau,
    DegenerateSampler,
    InvalidScale,
    NonFiniteSample,
    NonIntegrableWeight,
)
from .groups import GroupSpec, Point

__all__ = [
    "WeightSpec",
    "UNWEIGHTED",
    "SamplerConfig",
    "IntegralEstimate",
    "BallSpec",
    "BallSample",
    "mc_integrate",
    "sample_ball",
    "weighted_lp_norm",
    "haar_scaling_check",
    "doubling_ratio",
    "ball_volume_estimate",
    "ratio_of",
    "power_of",
    "combined_z",
    "derive_seed",
    "BoxUniform",
    "DilatedBox",
    "LayerRadialBox",
    "AnisoExpSampler",
    "Mixture",
]

_SEED_MASK = (1 << 63) - 1
_BOUNDARY_SLACK = 1.0 + 1e-9  # absorbs float noise in back-translation
_MAX_RESAMPLE_ROUNDS = 10

WEIGHT_KINDS = ("unweighted", "full_norm_power", "layer_power")


def derive_seed(seed: int, *tags) -> int:
    """Deterministically derive an independent sub-seed from seed and tags."""
    parts = [int(seed) & _SEED_MASK]
    for tag in tags:
        if isinstance(tag, str):
            parts.append(zlib.crc32(tag.encode()))
        else:
            parts.append(int(tag) & _SEED_MASK)
    return int(np.random.SeedSequence(parts).generate_state(1, np.uint64)[0]) & _SEED_MASK


# -- configuration and result types -------------------------------------------


@dataclass(frozen=True)
class WeightSpec:
    """Power weight: 1, |u|^a (full norm) or |z_l|^a (layer Euclidean norm)."""

    kind: str
    exponent: float = 0.0
    layer: int | None = None

    def __post_init__(self):
        if self.kind not in WEIGHT_KINDS:
            raise ValueError(f"weight kind must be one of {WEIGHT_KINDS}, got {self.kind!r}")
        if self.kind == "layer_power" and self.layer is None:
            raise ValueError("layer_power weight requires a layer index")
        if not math.isfinite(self.exponent):
            raise ValueError("weight exponent must be finite")

    def validate(self, spec: GroupSpec) -> None:
        if self.kind == "layer_power" and not 1 <= self.layer <= spec.step:
            raise ValueError(f"layer must be in 1..{spec.step}, got {self.layer}")

    def is_singular(self) -> bool:
        return self.kind != "unweighted" and self.exponent < 0

    def powered(self, tau: float) -> "WeightSpec":
        return replace(self, exponent=self.exponent * tau)

    def evaluate(self, spec: GroupSpec, pts: np.ndarray) -> np.ndarray:
        if self.kind == "unweighted":
            return np.ones(pts.shape[0])
        if self.kind == "full_norm_power":
            base = spec.norm(pts)
        else:
            sl = spec.layer_slices[self.layer - 1]
            base = np.sqrt(np.sum(pts[..., sl] ** 2, axis=-1))
        with np.errstate(divide="ignore"):
            return base ** self.exponent


UNWEIGHTED = WeightSpec("unweighted")


@dataclass(frozen=True)
class SamplerConfig:
    """Reproducible sampling configuration."""

    n_samples: int = 1_000_000
    seed: int = 0
    scheme: str = "pseudo_random"
    stratify_singularity: bool = True
    n_workers: int = 1
    chunk_size: int = 1 << 17

    def __post_init__(self):
        if self.n_samples < 1:
            raise ValueError("n_samples must be >= 1")
        if self.scheme not in ("pseudo_random", "low_discrepancy"):
            raise ValueError(f"unknown sampling scheme {self.scheme!r}")
        if self.chunk_size < 1:
            raise ValueError("chunk_size must be >= 1")

    def with_seed(self, seed: int) -> "SamplerConfig":
        return replace(self, seed=seed)

    def sub(self, *tags) -> "SamplerConfig":
        return replace(self, seed=derive_seed(self.seed, *tags))

    def with_samples(self, n: int) -> "SamplerConfig":
        return replace(self, n_samples=int(n))


@dataclass(frozen=True)
class IntegralEstimate:
    """Monte-Carlo value with standard error and sample count."""

    value: float
    std_error: float
    n_samples: int
    seed: int | None = None

    def to_dict(self) -> dict:
        return {
            "value": self.value,
            "std_error": self.std_error,
            "n_samples": self.n_samples,
            "seed": self.seed,
        }

    def z_score(self, reference: float) -> float:
        if self.std_error == 0.0:
            return 0.0 if self.value == reference else math.inf
        return (self.value - reference) / self.std_error

    def scaled(self, c: float) -> "IntegralEstimate":
        return replace(self, value=self.value * c, std_error=self.std_error * abs(c))


def ratio_of(num: IntegralEstimate, den: IntegralEstimate) -> IntegralEstimate:
    """Ratio of two independent estimates with first-order error propagation."""
    if den.value == 0.0:
        return IntegralEstimate(math.inf, math.inf, num.n_samples, num.seed)
    value = num.value / den.value
    rel = math.hypot(
        num.std_error / num.value if num.value != 0.0 else 0.0,
        den.std_error / den.value,
    )
    return IntegralEstimate(value, abs(value) * rel, num.n_samples, num.seed)


def power_of(est: IntegralEstimate, p: float) -> IntegralEstimate:
    """Delta-method propagation through x -> x**p for a nonnegative estimate."""
    if est.value <= 0.0:
        se = 0.0 if (est.value == 0.0 and est.std_error == 0.0) else math.inf
        return IntegralEstimate(0.0, se, est.n_samples, est.seed)
    value = est.value ** p
    se = abs(p) * est.value ** (p - 1.0) * est.std_error
    return IntegralEstimate(value, se, est.n_samples, est.seed)


def combined_z(a: IntegralEstimate, b: IntegralEstimate) -> float:
    se = math.hypot(a.std_error, b.std_error)
    if se == 0.0:
        return 0.0 if a.value == b.value else math.inf
    return abs(a.value - b.value) / se


@dataclass(frozen=True)
class BallSpec:
    """Pseudo-ball B(center, radius); center None means the group identity."""

    center: Point | None
    radius: float

    def __post_init__(self):
        if not (math.isfinite(self.radius) and self.radius > 0):
            raise ValueError(f"ball radius must be a positive real, got {self.radius!r}")

    def center_flat(self, spec: GroupSpec) -> np.ndarray | None:
        if self.center is None:
            return None
        arr = self.center.flat
        if arr.shape != (spec.dim,):
            raise ValueError("ball center does not match the group dimension")
        return arr


# -- samplers ------------------------------------------------------------------


class _Sampler:
    """Base: draw in centered coordinates, left-translate, know own density."""

    spec: GroupSpec
    center: np.ndarray | None

    def sample(self, rng: np.random.Generator, n: int, antithetic: bool = False) -> np.ndarray:
        if antithetic:
            if n % 2:
                raise ValueError("antithetic sampling needs an even count")
            w = self._sample_w(rng, n // 2)
            w = np.stack([w, -w], axis=1).reshape(n, self.spec.dim)
        else:
            w = self._sample_w(rng, n)
        return self._translate(w)

    def density(self, pts: np.ndarray) -> np.ndarray:
        return self._density_w(self._back(pts))

    def _translate(self, w: np.ndarray) -> np.ndarray:
        if self.center is None:
            return w
        return self.spec.multiply(self.center, w)

    def _back(self, pts: np.ndarray) -> np.ndarray:
        if self.center is None:
            return pts
        return self.spec.multiply(-self.center, pts)

    def _sample_w(self, rng, n):  # pragma: no cover - abstract
        raise NotImplementedError

    def _density_w(self, w):  # pragma: no cover - abstract
        raise NotImplementedError

    supports_qmc = False


class BoxUniform(_Sampler):
    """Uniform on the anisotropic box |z_l|_inf <= radius**l around center."""

    supports_qmc = True

    def __init__(self, spec: GroupSpec, center: np.ndarray | None, radius: float):
        self.spec = spec
        self.center = None if center is None else np.asarray(center, float)
        self.radius = float(radius)
        self.half_widths = self.radius ** spec.coord_layers.astype(float)
        self.volume = float(np.prod(2.0 * self.half_widths))

    def _sample_w(self, rng, n):
        return (2.0 * rng.random((n, self.spec.dim)) - 1.0) * self.half_widths

    def from_uniforms(self, u: np.ndarray) -> np.ndarray:
        return self._translate((2.0 * u - 1.0) * self.half_widths)

    def _density_w(self, w):
        inside = self.spec.box_gauge(w) <= self.radius * _BOUNDARY_SLACK
        return np.where(inside, 1.0 / self.volume, 0.0)


class DilatedBox(_Sampler):
    """Box-uniform draw shrunk by a random dilation with density t^(a+Q-1).

    The resulting density is proportional to an exact power of the box gauge
    near the origin, which bounds the ratio |u|^a / density for a < 0.
    """

    def __init__(self, spec: GroupSpec, center: np.ndarray | None, radius: float, a: float):
        q = spec.homogeneous_dimension
        if a == 0 or a + q <= 0:
            raise NonIntegrableWeight(f"dilation exponent a={a} needs a != 0 and a + Q > 0")
        self.spec = spec
        self.center = None if center is None else np.asarray(center, float)
        self.radius = float(radius)
        self.a = float(a)
        self._box = BoxUniform(spec, None, radius)
        self._cdf_pow = 1.0 / (a + q)
        self._norm = (a + q) / (self._box.volume * a)

    def _sample_w(self, rng, n):
        x = self._box._sample_w(rng, n)
        t = rng.random(n) ** self._cdf_pow
        return self.spec.dilate_each(t, x)

    def _density_w(self, w):
        g = self.spec.box_gauge(w) / self.radius
        with np.errstate(divide="ignore", invalid="ignore"):
            dens = self._norm * (1.0 - g ** self.a)
        return np.where(g < 1.0, dens, 0.0)


class LayerRadialBox(_Sampler):
    """Box-uniform off the weighted layer; radial power density rho^(a+m-1) on it.

    The layer density is proportional to |z_l|^a, so the weight-to-density
    ratio is exactly constant in the layer block.
    """

    def __init__(self, spec: GroupSpec, center, radius: float, layer: int, a: float):
        m = spec.layer_dim(layer)
        if a + m <= 0:
            raise NonIntegrableWeight(f"layer exponent a={a} needs a + m_l > 0 (m_l={m})")
        self.spec = spec
        self.center = None if center is None else np.asarray(center, float)
        self.radius = float(radius)
        self.layer = layer
        self.a = float(a)
        self.m = m
        self.rho_max = math.sqrt(m) * self.radius ** layer
        self._sl = spec.layer_slices[layer - 1]
        hw = self.radius ** spec.coord_layers.astype(float)
        keep = np.ones(spec.dim, bool)
        keep[self._sl] = False
        self._other_hw = hw[keep]
        self._other_keep = keep
        self._other_vol = float(np.prod(2.0 * self._other_hw)) if keep.any() else 1.0
        self._layer_norm = (a + m) / (sphere_surface(m - 1) * self.rho_max ** (a + m))
        self._cdf_pow = 1.0 / (a + m)

    def _sample_w(self, rng, n):
        w = (2.0 * rng.random((n, self.spec.dim)) - 1.0) * (
            self.radius ** self.spec.coord_layers.astype(float)
        )
        direction = rng.standard_normal((n, self.m))
        direction /= np.linalg.norm(direction, axis=1, keepdims=True)
        rho = self.rho_max * rng.random(n) ** self._cdf_pow
        w[:, self._sl] = direction * rho[:, None]
        return w

    def _density_w(self, w):
        ok = np.all(
            np.abs(w[:, self._other_keep]) <= self._other_hw * _BOUNDARY_SLACK, axis=1
        )
        rho = np.sqrt(np.sum(w[:, self._sl] ** 2, axis=1))
        ok &= rho <= self.rho_max * _BOUNDARY_SLACK
        with np.errstate(divide="ignore"):
            dens = self._layer_norm * rho ** self.a / self._other_vol
        return np.where(ok, dens, 0.0)


class AnisoExpSampler(_Sampler):
    """Normalized density proportional to exp(-sum_j c_j |z_j|^(2r!/j)).

    Layer radii are drawn by the inverse regularized-incomplete-gamma CDF so
    that draws transform exactly under dilations of the rate vector.
    """

    def __init__(self, spec: GroupSpec, center, rates):
        rates = tuple(float(c) for c in rates)
        if len(rates) != spec.step or any(c <= 0 for c in rates):
            raise ValueError(f"need {spec.step} positive decay rates, got {rates!r}")
        self.spec = spec
        self.center = None if center is None else np.asarray(center, float)
        self.rates = rates
        e = spec.norm_exponent
        self._shapes = []
        log_z = 0.0
        for j, (m, c) in enumerate(zip(spec.layer_dims, rates), start=1):
            e_j = e / j
            shape = m / e_j
            self._shapes.append((e_j, shape))
            log_z += (
                math.log(sphere_surface(m - 1))
                + math.lgamma(shape)
                - math.log(e_j)
                - shape * math.log(c)
            )
        self._log_z = log_z

    def _sample_w(self, rng, n):
        w = np.empty((n, self.spec.dim))
        for sl, m, c, (e_j, shape) in zip(
            self.spec.layer_slices, self.spec.layer_dims, self.rates, self._shapes
        ):
            direction = rng.standard_normal((n, m))
            direction /= np.linalg.norm(direction, axis=1, keepdims=True)
            y = gammaincinv(shape, rng.random(n)) / c
            w[:, sl] = direction * (y ** (1.0 / e_j))[:, None]
        return w

    def _density_w(self, w):
        s = np.zeros(w.shape[0])
        for sl, c, (e_j, _) in zip(self.spec.layer_slices, self.rates, self._shapes):
            rho = np.sqrt(np.sum(w[:, sl] ** 2, axis=1))
            s += c * rho ** e_j
        return np.exp(-s - self._log_z)


class Mixture:
    """Finite mixture of samplers; density is the weighted component sum."""

    def __init__(self, components, weights):
        if len(components) != len(weights) or not components:
            raise ValueError("components and weights must be same nonzero length")
        total = float(sum(weights))
        self.components = list(components)
        self.weights = [float(w) / total for w in weights]
        self.spec = components[0].spec
        self._edges = np.cumsum(self.weights)
        self._edges[-1] = 1.0

    supports_qmc = False

    def sample(self, rng: np.random.Generator, n: int, antithetic: bool = False) -> np.ndarray:
        if antithetic:
            if n % 2:
                raise ValueError("antithetic sampling needs an even count")
            slots = n // 2
            sel = np.searchsorted(self._edges, rng.random(slots), side="right")
            out = np.empty((n, self.spec.dim))
            for ci, comp in enumerate(self.components):
                idx = np.flatnonzero(sel == ci)
                if idx.size:
                    pts = comp.sample(rng, 2 * idx.size, antithetic=True)
                    rows = np.column_stack([2 * idx, 2 * idx + 1]).ravel()
                    out[rows] = pts
            return out
        sel = np.searchsorted(self._edges, rng.random(n), side="right")
        out = np.empty((n, self.spec.dim))
        for ci, comp in enumerate(self.components):
            idx = np.flatnonzero(sel == ci)
            if idx.size:
                out[idx] = comp.sample(rng, idx.size)
        return out

    def density(self, pts: np.ndarray) -> np.ndarray:
        dens = np.zeros(pts.shape[0])
        for w, comp in zip(self.weights, self.components):
            dens += w * comp.density(pts)
        return dens


def default_proposal(spec: GroupSpec, domain: BallSpec, weight: WeightSpec, cfg: SamplerConfig):
    """Box-uniform proposal, upgraded to a singularity-matched one when asked.

    Matched proposals are only available for weights singular at the origin,
    hence only for balls centered at the identity.
    """
    center = domain.center_flat(spec)
    box = BoxUniform(spec, center, domain.radius)
    if not (cfg.stratify_singularity and weight.is_singular() and center is None):
        return box
    if weight.kind == "full_norm_power":
        return Mixture(
            [box, DilatedBox(spec, None, domain.radius, weight.exponent)], [0.5, 0.5]
        )
    return LayerRadialBox(spec, None, domain.radius, weight.layer, weight.exponent)


# -- core integrator -----------------------------------------------------------


def _as_callable(spec: GroupSpec, f):
    if hasattr(f, "evaluate"):
        return lambda pts: np.asarray(f.evaluate(spec, pts), float)
    if callable(f):
        return lambda pts: np.asarray(f(pts), float)
    raise TypeError(f"integrand must be callable or have .evaluate(spec, pts): {f!r}")


def _chunk_plan(n: int, size: int) -> list[tuple[int, int]]:
    plan, done, k = [], 0, 0
    while done < n:
        m = min(size, n - done)
        plan.append((k, m))
        done += m
        k += 1
    return plan


def _estimate_from_values(values_chunks, n_points: int, seed: int, antithetic: bool):
    s1 = s2 = 0.0
    count = 0
    for vals in values_chunks:
        if antithetic:
            vals = vals.reshape(-1, 2).mean(axis=1)
        s1 += float(np.sum(vals))
        s2 += float(np.sum(vals * vals))
        count += vals.size
    mean = s1 / count
    if count > 1:
        var = max(s2 - count * mean * mean, 0.0) / (count - 1)
        se = math.sqrt(var / count)
    else:
        se = math.inf
    return IntegralEstimate(mean, se, n_points, seed)


def _mc_values(spec, proposal, domain, integrand_fn, weight, cfg, antithetic):
    """Yield per-chunk contribution arrays for the ball integral."""
    center = domain.center_flat(spec)
    radius = float(domain.radius)

    def values_for(pts):
        dens = proposal.density(pts)
        dist = spec.norm(pts) if center is None else spec.distance(center, pts)
        vals = np.zeros(pts.shape[0])
        idx = np.flatnonzero(dist < radius)
        if idx.size:
            sub = pts[idx]
            with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
                raw = np.broadcast_to(
                    np.asarray(integrand_fn(sub), float)
                    * weight.evaluate(spec, sub)
                    / dens[idx],
                    idx.shape,
                ).copy()
            vals[idx] = raw
        return vals

    def chunk_values(rng, m):
        pts = proposal.sample(rng, m, antithetic)
        vals = values_for(pts)
        bad = np.flatnonzero(~np.isfinite(vals))
        rounds = 0
        while bad.size:
            rounds += 1
            if rounds > _MAX_RESAMPLE_ROUNDS:
                raise NonFiniteSample(
                    f"{bad.size} samples stayed non-finite after "
                    f"{_MAX_RESAMPLE_ROUNDS} resampling rounds"
                )
            vals[bad] = values_for(proposal.sample(rng, bad.size))
            bad = bad[~np.isfinite(vals[bad])]
        return vals

    n = cfg.n_samples
    if antithetic and n % 2:
        n += 1

    if cfg.scheme == "low_discrepancy":
        if not getattr(proposal, "supports_qmc", False):
            raise ValueError(
                "low_discrepancy sampling supports only plain box-uniform proposals"
            )
        if antithetic:
            raise ValueError("antithetic pairing is not supported with low_discrepancy")
        engine = qmc.Halton(d=spec.dim, seed=cfg.seed)
        fallback = np.random.default_rng(derive_seed(cfg.seed, "qmc-resample"))
        out = []
        for _, m in _chunk_plan(n, cfg.chunk_size):
            pts = proposal.from_uniforms(engine.random(m))
            vals = values_for(pts)
            bad = np.flatnonzero(~np.isfinite(vals))
            rounds = 0
            while bad.size:
                rounds += 1
                if rounds > _MAX_RESAMPLE_ROUNDS:
                    raise NonFiniteSample("non-finite integrand under QMC sampling")
                vals[bad] = values_for(proposal.sample(fallback, bad.size))
                bad = bad[~np.isfinite(vals[bad])]
            out.append(vals)
        return out, n

    plan = _chunk_plan(n, cfg.chunk_size)

    def run(item):
        k, m = item
        rng = np.random.default_rng(cfg.seed ^ k)
        return chunk_values(rng, m)

    if cfg.n_workers > 1:
        with ThreadPoolExecutor(max_workers=cfg.n_workers) as pool:
            out = list(pool.map(run, plan))
    else:
        out = [run(item) for item in plan]
    return out, n


def mc_integrate(
    spec: GroupSpec,
    domain: BallSpec,
    integrand,
    weight: WeightSpec = UNWEIGHTED,
    cfg: SamplerConfig = SamplerConfig(),
    proposal=None,
    antithetic: bool = False,
) -> IntegralEstimate:
    """Unbiased estimate of the integral of integrand * weight over the ball."""
    weight.validate(spec)
    prop = proposal if proposal is not None else default_proposal(spec, domain, weight, cfg)
    fn = _as_callable(spec, integrand)
    chunks, n = _mc_values(spec, prop, domain, fn, weight, cfg, antithetic)
    return _estimate_from_values(chunks, n, cfg.seed, antithetic)


# -- derived operations ---------------------------------------------------------


@dataclass(frozen=True)
class BallSample:
    points: np.ndarray
    acceptance_rate: float
    n_proposed: int


def sample_ball(spec: GroupSpec, ball: BallSpec, cfg: SamplerConfig) -> BallSample:
    """Rejection-sample points uniform w.r.t. Haar measure on the ball."""
    center = ball.center_flat(spec)
    radius = float(ball.radius)
    hw = radius ** spec.coord_layers.astype(float)
    engine = None
    if cfg.scheme == "low_discrepancy":
        engine = qmc.Halton(d=spec.dim, seed=cfg.seed)

    accepted: list[np.ndarray] = []
    n_acc = 0
    n_prop = 0
    plan = _chunk_plan(cfg.n_samples, cfg.chunk_size)
    for k, quota in plan:
        rng = np.random.default_rng(cfg.seed ^ k)
        got = 0
        while got < quota:
            m = max(4 * (quota - got), 1024)
            if engine is not None:
                u = engine.random(m)
            else:
                u = rng.random((m, spec.dim))
            w = (2.0 * u - 1.0) * hw
            keep = spec.norm(w) < radius
            n_prop += m
            n_acc += int(keep.sum())
            picked = w[keep][: quota - got]
            got += picked.shape[0]
            accepted.append(picked)
            if n_prop >= 50_000 and n_acc / n_prop < 1e-4:
                raise DegenerateSampler(
                    f"acceptance rate {n_acc / n_prop:.2e} after {n_prop} proposals"
                )
    pts = np.concatenate(accepted, axis=0)
    if center is not None:
        pts = spec.multiply(center, pts)
    return BallSample(pts, n_acc / n_prop, n_prop)


def weighted_lp_norm(
    spec: GroupSpec,
    f,
    p: float,
    weight: WeightSpec = UNWEIGHTED,
    domain: BallSpec = None,
    cfg: SamplerConfig = SamplerConfig(),
    proposal=None,
) -> IntegralEstimate:
    """(integral of |f|^p * weight over the domain ball)^(1/p) with delta-method error."""
    if p < 1:
        raise ValueError(f"L^p norm needs p >= 1, got {p}")
    if domain is None:
        raise ValueError("weighted_lp_norm needs an explicit truncation ball")
    fn = _as_callable(spec, f)
    est = mc_integrate(
        spec, domain, lambda pts: np.abs(fn(pts)) ** p, weight, cfg, proposal=proposal
    )
    return power_of(est, 1.0 / p)


def ball_volume_estimate(spec: GroupSpec, radius: float, cfg: SamplerConfig) -> IntegralEstimate:
    return mc_integrate(spec, BallSpec(None, radius), lambda pts: 1.0, UNWEIGHTED, cfg)


def haar_scaling_check(spec: GroupSpec, t: float, cfg: SamplerConfig) -> IntegralEstimate:
    """Estimate measure(delta_t(unit ball)) / measure(unit ball); exact value t^Q."""
    if not (np.isscalar(t) and math.isfinite(float(t)) and t > 0):
        raise InvalidScale(f"dilation parameter must be positive, got {t!r}")
    num = ball_volume_estimate(spec, float(t), cfg.sub("haar-num"))
    den = ball_volume_estimate(spec, 1.0, cfg.sub("haar-den"))
    return ratio_of(num, den)


def doubling_ratio(
    spec: GroupSpec,
    weight: WeightSpec,
    tau: float,
    radius: float,
    cfg: SamplerConfig = SamplerConfig(),
) -> IntegralEstimate:
    """Estimate integral_{2B} w^tau / integral_B w^tau for centered balls.

    For w = |u|^a the exact value is 2^(Q + a*tau); for w = |z_l|^a it is
    2^(Q + l*a*tau).
    """
    if tau < 1:
        raise BadTau(f"doubling check needs tau >= 1, got {tau}")
    weight.validate(spec)
    powered = weight.powered(tau)
    if powered.kind == "full_norm_power" and powered.exponent <= -spec.homogeneous_dimension:
        raise NonIntegrableWeight(
            f"|u|^{powered.exponent} is not integrable near 0 (needs a*tau > -Q)"
        )
    if powered.kind == "layer_power":
        m = spec.layer_dim(powered.layer)
        if powered.exponent <= -m:
            raise NonIntegrableWeight(
                f"|z_l|^{powered.exponent} is not integrable (needs a*tau > -m_l = -{m})"
            )
    num = mc_integrate(
        spec, BallSpec(None, 2.0 * radius), lambda pts: 1.0, powered, cfg.sub("dbl-2r")
    )
    den = mc_integrate(
        spec, BallSpec(None, float(radius)), lambda pts: 1.0, powered, cfg.sub("dbl-r")
    )
    return ratio_of(num, den)
