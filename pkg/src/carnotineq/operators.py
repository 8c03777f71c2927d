"""Trial-function families and numerical evaluation of the weighted operators.

The operators are the Riesz-type potential ``T f(u) = integral f(v) d(u,v)^-lam``,
its doubly-weighted variant ``S`` (full-norm weights |u|^-alpha, |v|^-beta) and
the layer-weight variant (|z_l|^-alpha, |z'_l|^-beta), plus the bilinear form
pairing two trial functions through the same kernel and weights.

All trial functions are real-valued, so the conjugation in the bilinear form
is the identity.  Estimates sample u and v independently; pass
``couple_kernel=True`` to draw v as a kernel-centered perturbation of u, which
keeps the variance finite when 2*lambda >= Q.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np
from scipy.interpolate import RegularGridInterpolator

from .closedforms import sphere_surface
from .errors import NonFiniteSample, SingularEvaluationPoint, ZeroNorm
from .groups import GroupSpec, Point
from .sampling import (
    AnisoExpSampler,
    BallSpec,
    BoxUniform,
    DilatedBox,
    IntegralEstimate,
    LayerRadialBox,
    Mixture,
    SamplerConfig,
    UNWEIGHTED,
    WeightSpec,
    _chunk_plan,
    _estimate_from_values,
    mc_integrate,
    ratio_of,
    weighted_lp_norm,
)

__all__ = [
    "TrialFunction",
    "AnisoBump",
    "BallIndicator",
    "Tabulated",
    "KernelParams",
    "trial_from_dict",
    "load_tabulated",
    "trial_proposal",
    "eval_T",
    "eval_S",
    "bilinear_form",
    "stein_weiss_ratio",
]


class TrialFunction:
    """Common surface for trial functions: vectorized evaluation + dilation."""

    kind: str

    def evaluate(self, spec: GroupSpec, pts: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def dilated(self, spec: GroupSpec, t: float) -> "TrialFunction":
        """Return u -> f(delta_t(u)) as a member of the same family."""
        raise NotImplementedError

    def to_dict(self) -> dict:
        raise NotImplementedError


@dataclass(frozen=True)
class AnisoBump(TrialFunction):
    """f(u) = amplitude * exp(-sum_j c_j |z_j(center^-1 u)|^(2r!/j)), c_j > 0."""

    rates: tuple[float, ...]
    center: Point | None = None
    amplitude: float = 1.0

    kind = "aniso_bump"

    def __post_init__(self):
        rates = tuple(float(c) for c in self.rates)
        if any(not math.isfinite(c) or c <= 0 for c in rates):
            raise ValueError(f"decay rates must be positive reals, got {rates!r}")
        object.__setattr__(self, "rates", rates)

    def _shifted(self, spec: GroupSpec, pts: np.ndarray) -> np.ndarray:
        if self.center is None:
            return pts
        return spec.multiply(-self.center.flat, pts)

    def evaluate(self, spec: GroupSpec, pts: np.ndarray) -> np.ndarray:
        if len(self.rates) != spec.step:
            raise ValueError(f"bump has {len(self.rates)} rates, group has step {spec.step}")
        w = self._shifted(spec, np.atleast_2d(np.asarray(pts, float)))
        e = spec.norm_exponent
        s = np.zeros(w.shape[0])
        for j, (sl, c) in enumerate(zip(spec.layer_slices, self.rates), start=1):
            rho = np.sqrt(np.sum(w[:, sl] ** 2, axis=1))
            s += c * rho ** (e / j)
        out = self.amplitude * np.exp(-s)
        return out if np.asarray(pts).ndim > 1 else float(out[0])

    def dilated(self, spec: GroupSpec, t: float) -> "AnisoBump":
        e = spec.norm_exponent
        center = None
        if self.center is not None:
            center = Point.from_flat(spec, spec.dilate(1.0 / t, self.center.flat))
        return AnisoBump(tuple(c * t ** e for c in self.rates), center, self.amplitude)

    def lp_norm_exact(self, spec: GroupSpec, p: float) -> float:
        """Closed-form L^p norm: each layer integral is a Gamma integral."""
        e = spec.norm_exponent
        log_total = p * math.log(abs(self.amplitude))
        for j, (m, c) in enumerate(zip(spec.layer_dims, self.rates), start=1):
            e_j = e / j
            shape = m / e_j
            log_total += (
                math.log(sphere_surface(m - 1))
                + math.lgamma(shape)
                - math.log(e_j)
                - shape * math.log(p * c)
            )
        return math.exp(log_total / p)

    def to_dict(self) -> dict:
        return {
            "kind": self.kind,
            "params": {
                "rates": list(self.rates),
                "center": None if self.center is None else [z.tolist() for z in self.center.layers],
                "amplitude": self.amplitude,
            },
        }


@dataclass(frozen=True)
class BallIndicator(TrialFunction):
    """amplitude * indicator of the pseudo-ball B(center, radius)."""

    ball: BallSpec
    amplitude: float = 1.0

    kind = "ball_indicator"

    def evaluate(self, spec: GroupSpec, pts: np.ndarray) -> np.ndarray:
        pts2 = np.atleast_2d(np.asarray(pts, float))
        center = self.ball.center_flat(spec)
        if center is None:
            dist = spec.norm(pts2)
        else:
            dist = spec.distance(center, pts2)
        out = np.where(dist < self.ball.radius, self.amplitude, 0.0)
        return out if np.asarray(pts).ndim > 1 else float(out[0])

    def dilated(self, spec: GroupSpec, t: float) -> "BallIndicator":
        center = None
        if self.ball.center is not None:
            center = Point.from_flat(spec, spec.dilate(1.0 / t, self.ball.center.flat))
        return BallIndicator(BallSpec(center, self.ball.radius / t), self.amplitude)

    def to_dict(self) -> dict:
        center = self.ball.center
        return {
            "kind": self.kind,
            "params": {
                "radius": self.ball.radius,
                "center": None if center is None else [z.tolist() for z in center.layers],
                "amplitude": self.amplitude,
            },
        }


class Tabulated(TrialFunction):
    """Multilinear interpolation of a value grid on a coordinate box; 0 outside."""

    kind = "tabulated"

    def __init__(self, lo, hi, values):
        self.lo = np.asarray(lo, float)
        self.hi = np.asarray(hi, float)
        self.values = np.asarray(values, float)
        if self.lo.shape != self.hi.shape or self.lo.ndim != 1:
            raise ValueError("box bounds must be 1-d arrays of equal length")
        if self.values.ndim != self.lo.size:
            raise ValueError(
                f"value grid has {self.values.ndim} axes, box has {self.lo.size}"
            )
        if not np.all(np.isfinite(self.values)):
            raise ValueError("tabulated grid values must be finite")
        axes = [
            np.linspace(a, b, n)
            for a, b, n in zip(self.lo, self.hi, self.values.shape)
        ]
        self._interp = RegularGridInterpolator(
            axes, self.values, method="linear", bounds_error=False, fill_value=0.0
        )

    def evaluate(self, spec: GroupSpec, pts: np.ndarray) -> np.ndarray:
        pts2 = np.atleast_2d(np.asarray(pts, float))
        if pts2.shape[1] != self.lo.size:
            raise ValueError("tabulated grid dimension does not match the group")
        out = self._interp(pts2)
        return out if np.asarray(pts).ndim > 1 else float(out[0])

    def dilated(self, spec: GroupSpec, t: float) -> "Tabulated":
        scale = (1.0 / t) ** spec.coord_layers.astype(float)
        return Tabulated(self.lo * scale, self.hi * scale, self.values)

    def to_dict(self) -> dict:
        return {
            "kind": self.kind,
            "params": {
                "lo": self.lo.tolist(),
                "hi": self.hi.tolist(),
                "dims": list(self.values.shape),
                "values": self.values.ravel().tolist(),
            },
        }

    def save(self, header_path) -> None:
        """Write the text header plus the row-major float64 binary array."""
        header_path = Path(header_path)
        bin_path = header_path.with_suffix(".bin")
        header = {
            "dims": list(self.values.shape),
            "box": {"lo": self.lo.tolist(), "hi": self.hi.tolist()},
            "dtype": "float64",
            "order": "row-major",
            "data": bin_path.name,
        }
        header_path.write_text(json.dumps(header, indent=2, sort_keys=True) + "\n")
        self.values.astype("<f8").tofile(bin_path)


def load_tabulated(header_path) -> Tabulated:
    """Load a tabulated trial function from its text header + binary array."""
    header_path = Path(header_path)
    header = json.loads(header_path.read_text())
    dims = tuple(int(d) for d in header["dims"])
    bin_path = header_path.parent / header.get("data", header_path.stem + ".bin")
    values = np.fromfile(bin_path, dtype="<f8").reshape(dims)
    return Tabulated(header["box"]["lo"], header["box"]["hi"], values)


def trial_from_dict(data: dict) -> TrialFunction:
    kind = data.get("kind")
    params = data.get("params", {})
    if kind == "aniso_bump":
        center = params.get("center")
        return AnisoBump(
            tuple(params["rates"]),
            None if center is None else Point(tuple(np.asarray(z) for z in center)),
            float(params.get("amplitude", 1.0)),
        )
    if kind == "ball_indicator":
        center = params.get("center")
        ball = BallSpec(
            None if center is None else Point(tuple(np.asarray(z) for z in center)),
            float(params["radius"]),
        )
        return BallIndicator(ball, float(params.get("amplitude", 1.0)))
    if kind == "tabulated":
        values = np.asarray(params["values"], float).reshape(params["dims"])
        return Tabulated(params["lo"], params["hi"], values)
    raise ValueError(f"unknown trial function kind {kind!r}")


@dataclass(frozen=True)
class KernelParams:
    """Kernel exponent and the two weight exponents of the S-type operators."""

    lam: float
    alpha: float = 0.0
    beta: float = 0.0
    weight_kind: str = "full_norm"
    layer: int | None = None

    def __post_init__(self):
        if self.weight_kind not in ("full_norm", "layer"):
            raise ValueError(f"weight_kind must be 'full_norm' or 'layer', got {self.weight_kind!r}")
        if self.weight_kind == "layer" and self.layer is None:
            raise ValueError("layer weights need a layer index")

    def validate(self, spec: GroupSpec) -> None:
        q = spec.homogeneous_dimension
        if not 0 < self.lam < q:
            raise ValueError(f"kernel exponent must satisfy 0 < lambda < Q={q}, got {self.lam}")
        if self.weight_kind == "layer" and not 1 <= self.layer <= spec.step:
            raise ValueError(f"layer must be in 1..{spec.step}")

    def weight(self, exponent: float) -> WeightSpec:
        """|.|^exponent in this parameter set's weight family."""
        if exponent == 0.0:
            return UNWEIGHTED
        if self.weight_kind == "full_norm":
            return WeightSpec("full_norm_power", exponent)
        return WeightSpec("layer_power", exponent, self.layer)

    def point_gauge(self, spec: GroupSpec, pts: np.ndarray) -> np.ndarray:
        if self.weight_kind == "full_norm":
            return spec.norm(pts)
        sl = spec.layer_slices[self.layer - 1]
        return np.sqrt(np.sum(np.atleast_2d(pts)[:, sl] ** 2, axis=1))


# -- proposals matched to trials and kernels -----------------------------------


def trial_proposal(spec: GroupSpec, trial, domain: BallSpec, power: float = 1.0):
    """Proposal adapted to a trial function, mixed with the domain box.

    For bumps the matched component uses half the rates of |f|^power so the
    importance ratio stays a genuine (but low-variance) random variable; for
    indicators the component is the indicator ball's own box.
    """
    box = BoxUniform(spec, domain.center_flat(spec), domain.radius)
    if isinstance(trial, AnisoBump):
        rates = tuple(0.5 * power * c for c in trial.rates)
        center = None if trial.center is None else trial.center.flat
        return Mixture([box, AnisoExpSampler(spec, center, rates)], [0.4, 0.6])
    if isinstance(trial, BallIndicator):
        inner = BoxUniform(spec, trial.ball.center_flat(spec), trial.ball.radius)
        return Mixture([box, inner], [0.3, 0.7])
    return box


def _kernel_component(spec: GroupSpec, at: np.ndarray, radius: float, lam: float):
    return DilatedBox(spec, at, radius, -lam)


def _weight_component(spec: GroupSpec, kp: KernelParams, exponent: float, radius: float):
    if kp.weight_kind == "full_norm":
        return DilatedBox(spec, None, radius, exponent)
    return LayerRadialBox(spec, None, radius, kp.layer, exponent)


# -- operator evaluation ---------------------------------------------------------


def eval_T(
    spec: GroupSpec,
    f,
    lam: float,
    u,
    domain: BallSpec,
    cfg: SamplerConfig = SamplerConfig(),
) -> IntegralEstimate:
    """Riesz-type potential integral of f(v) / d(u, v)^lam over the domain ball."""
    if not 0 < lam < spec.homogeneous_dimension:
        raise ValueError(f"need 0 < lambda < Q, got lambda={lam}")
    u_flat = u.flat if isinstance(u, Point) else np.asarray(u, float)
    box = BoxUniform(spec, domain.center_flat(spec), domain.radius)
    proposal = Mixture(
        [box, _kernel_component(spec, u_flat, domain.radius, lam)], [0.5, 0.5]
    )
    fn = f.evaluate if hasattr(f, "evaluate") else None

    def integrand(pts):
        fv = fn(spec, pts) if fn is not None else f(pts)
        with np.errstate(divide="ignore"):
            return np.asarray(fv, float) * spec.distance(u_flat, pts) ** (-lam)

    return mc_integrate(spec, domain, integrand, UNWEIGHTED, cfg, proposal=proposal)


def eval_S(
    spec: GroupSpec,
    g,
    kp: KernelParams,
    u,
    domain: BallSpec,
    cfg: SamplerConfig = SamplerConfig(),
) -> IntegralEstimate:
    """Weighted potential: the S operator (full-norm) or its layer variant."""
    kp.validate(spec)
    u_flat = u.flat if isinstance(u, Point) else np.asarray(u, float)
    gauge_u = float(kp.point_gauge(spec, u_flat[None, :])[0])
    if gauge_u == 0.0 and kp.alpha > 0:
        raise SingularEvaluationPoint(
            "evaluation point lies on the singular set of the |.|^-alpha weight"
        )
    prefactor = gauge_u ** (-kp.alpha) if kp.alpha != 0.0 else 1.0

    components = [
        BoxUniform(spec, domain.center_flat(spec), domain.radius),
        _kernel_component(spec, u_flat, domain.radius, kp.lam),
    ]
    weights = [0.5, 0.5]
    if kp.beta > 0:
        components.append(_weight_component(spec, kp, -kp.beta, domain.radius))
        weights = [0.4, 0.4, 0.2]
    proposal = Mixture(components, weights)
    fn = g.evaluate if hasattr(g, "evaluate") else None

    def integrand(pts):
        gv = fn(spec, pts) if fn is not None else g(pts)
        with np.errstate(divide="ignore"):
            kern = spec.distance(u_flat, pts) ** (-kp.lam)
            wv = kp.point_gauge(spec, pts) ** (-kp.beta) if kp.beta != 0.0 else 1.0
        return np.asarray(gv, float) * kern * wv

    est = mc_integrate(spec, domain, integrand, UNWEIGHTED, cfg, proposal=proposal)
    return est.scaled(prefactor)


def bilinear_form(
    spec: GroupSpec,
    f,
    g,
    kp: KernelParams,
    domain: BallSpec,
    cfg: SamplerConfig = SamplerConfig(),
    couple_kernel: bool = False,
    antithetic: bool = False,
) -> IntegralEstimate:
    """Double integral of f(u) g(v) / (w_a(u) d(u,v)^lam w_b(v)) over ball x ball.

    u and v are sampled independently per pair unless ``couple_kernel`` draws
    v from a mixture containing a kernel-centered component at u.
    """
    kp.validate(spec)
    f_eval = f.evaluate if hasattr(f, "evaluate") else lambda s, pts: f(pts)
    g_eval = g.evaluate if hasattr(g, "evaluate") else lambda s, pts: g(pts)
    center = domain.center_flat(spec)
    radius = float(domain.radius)
    pu = trial_proposal(spec, f, domain)
    pv = trial_proposal(spec, g, domain)

    n = cfg.n_samples
    if antithetic and n % 2:
        n += 1
    if cfg.scheme == "low_discrepancy":
        raise ValueError("bilinear_form supports pseudo_random sampling only")

    kern_comp = DilatedBox(spec, None, radius, -kp.lam)

    def pair_values(rng, m, anti):
        us = pu.sample(rng, m, anti)
        du = pu.density(us)
        if couple_kernel:
            vs = np.empty_like(us)
            sel = rng.random(m)
            near = np.flatnonzero(sel < 0.5)
            far = np.flatnonzero(sel >= 0.5)
            if far.size:
                vs[far] = pv.sample(rng, far.size)
            if near.size:
                w = kern_comp._sample_w(rng, near.size)
                vs[near] = spec.multiply(us[near], w)
            dv = 0.5 * pv.density(vs) + 0.5 * kern_comp._density_w(
                spec.multiply(-us, vs)
            )
        else:
            vs = pv.sample(rng, m, anti)
            dv = pv.density(vs)

        if center is None:
            in_u = spec.norm(us) < radius
            in_v = spec.norm(vs) < radius
        else:
            in_u = spec.distance(center, us) < radius
            in_v = spec.distance(center, vs) < radius
        vals = np.zeros(m)
        idx = np.flatnonzero(in_u & in_v)
        if idx.size:
            uu, vv = us[idx], vs[idx]
            with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
                num = (
                    np.asarray(f_eval(spec, uu), float)
                    * np.asarray(g_eval(spec, vv), float)
                    * spec.distance(uu, vv) ** (-kp.lam)
                )
                if kp.alpha != 0.0:
                    num = num * kp.point_gauge(spec, uu) ** (-kp.alpha)
                if kp.beta != 0.0:
                    num = num * kp.point_gauge(spec, vv) ** (-kp.beta)
                vals[idx] = num / (du[idx] * dv[idx])
        return vals

    chunks = []
    for k, m in _chunk_plan(n, cfg.chunk_size):
        rng = np.random.default_rng(cfg.seed ^ k)
        vals = pair_values(rng, m, antithetic)
        bad = np.flatnonzero(~np.isfinite(vals))
        rounds = 0
        while bad.size:
            rounds += 1
            if rounds > 10:
                raise NonFiniteSample("bilinear sample stayed non-finite after resampling")
            vals[bad] = pair_values(rng, bad.size, False)
            bad = bad[~np.isfinite(vals[bad])]
        chunks.append(vals)
    return _estimate_from_values(chunks, n, cfg.seed, antithetic)


def stein_weiss_ratio(
    spec: GroupSpec,
    f,
    g,
    kp: KernelParams,
    r_exp: float,
    s_exp: float,
    domain: BallSpec,
    cfg: SamplerConfig = SamplerConfig(),
    couple_kernel: bool = False,
) -> IntegralEstimate:
    """|bilinear form| / (||f||_r ||g||_s): a lower bound on the best constant."""
    bil = bilinear_form(
        spec, f, g, kp, domain, cfg.sub("bilinear"), couple_kernel=couple_kernel
    )
    nf = weighted_lp_norm(
        spec, f, r_exp, UNWEIGHTED, domain, cfg.sub("norm-f"),
        proposal=trial_proposal(spec, f, domain, power=r_exp),
    )
    ng = weighted_lp_norm(
        spec, g, s_exp, UNWEIGHTED, domain, cfg.sub("norm-g"),
        proposal=trial_proposal(spec, g, domain, power=s_exp),
    )
    for name, est in (("f", nf), ("g", ng)):
        if est.value <= 0 or est.value <= 3.0 * est.std_error:
            raise ZeroNorm(f"||{name}|| estimate {est.value} +- {est.std_error} is consistent with 0")
    denom = IntegralEstimate(
        nf.value * ng.value,
        nf.value * ng.value * math.hypot(
            nf.std_error / nf.value, ng.std_error / ng.value
        ),
        nf.n_samples,
        nf.seed,
    )
    numer = IntegralEstimate(abs(bil.value), bil.std_error, bil.n_samples, bil.seed)
    out = ratio_of(numer, denom)
    return IntegralEstimate(out.value, out.std_error, cfg.n_samples, cfg.seed)
