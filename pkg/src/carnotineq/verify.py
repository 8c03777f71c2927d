"""Admissibility checking, Sawyer-Wheeden condition verification, duality and
best-constant search.

The exponent bookkeeping at the heart of the boundedness proofs is checked
numerically: with ``lambda_bar = Q(1/q + 1/p')`` the three ball quantities

    M1 = phi(B) |B|^(1/p' + 1/q)   ~ r^(lambda_bar - lambda)
    M2 = ((1/|B|) int_B w1^tau)^(1/(q tau))   ~ r^(-alpha)   (or r^(-l alpha))
    M3 = ((1/|B|) int_B w2^((1-p')tau))^(1/(p' tau))  ~ r^(-beta)  (or r^(-l beta))

have a product that is radius-independent exactly when the scaling balance
holds, because lambda_bar - lambda - alpha - beta = 0 (and the layer-weight
analog with l*alpha, l*beta).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy import optimize

from .closedforms import Lemma44Params, lemma44_closed_form, unit_ball_volume
from .errors import BadEpsilon, BadTau, DomainError, InadmissibleParams
from .groups import GroupSpec
from .operators import (
    AnisoBump,
    KernelParams,
    bilinear_form,
    eval_S,
    stein_weiss_ratio,
    trial_proposal,
)
from .sampling import (
    BallSpec,
    IntegralEstimate,
    SamplerConfig,
    WeightSpec,
    combined_z,
    derive_seed,
    mc_integrate,
    power_of,
)

__all__ = [
    "ExponentParams",
    "AdmissibilityReport",
    "check_admissible",
    "TriangleConstantEstimate",
    "estimate_triangle_constant",
    "triangle_constant",
    "phi_of_ball",
    "Cond35Report",
    "check_condition_35",
    "Cond36Report",
    "check_condition_36",
    "SWConditionReport",
    "sw_conditions",
    "DualityCheck",
    "duality_check",
    "SearchConfig",
    "BestConstantResult",
    "estimate_best_constant",
]

THEOREMS = ("T2.1", "T2.2", "T3.1", "T4.1")
_BALANCE_TOL = 1e-12


def conjugate_exponent(x: float) -> float:
    if x <= 1:
        raise ValueError(f"conjugate exponent needs x > 1, got {x}")
    return x / (x - 1.0)


@dataclass(frozen=True)
class ExponentParams:
    """The exponent tuple of one theorem instance.

    Dual-pair theorems use (r_exp, s_exp); operator theorems use (p, q).
    """

    lam: float
    alpha: float
    beta: float
    r_exp: float | None = None
    s_exp: float | None = None
    p: float | None = None
    q: float | None = None
    layer: int | None = None


@dataclass(frozen=True)
class AdmissibilityReport:
    theorem: str
    passed: bool
    violated: tuple[str, ...]
    derived: dict
    notes: tuple[str, ...] = ()

    def to_dict(self) -> dict:
        return {
            "theorem": self.theorem,
            "pass": self.passed,
            "violated": list(self.violated),
            "derived": {k: _json_safe(v) for k, v in self.derived.items()},
            "notes": list(self.notes),
        }


def _json_safe(v):
    if isinstance(v, float) and math.isinf(v):
        return "inf"
    return v


def _finite_range(name: str, x: float | None, conditions: list, low: float = 1.0):
    if x is None:
        raise ValueError(f"theorem requires exponent {name!r}")
    conditions.append((f"1 < {name} < inf", x is not None and low < x < math.inf))
    return x


def check_admissible(
    theorem: str,
    params: ExponentParams,
    Q: float,
    m_l: float | None = None,
) -> AdmissibilityReport:
    """Evaluate every printed condition of the selected theorem.

    Equality conditions are checked to |residual| <= 1e-12.  For the layer
    theorems the alpha+beta upper bound with Q = l*m_l is treated as +infinity
    (vacuous) and flagged in the notes.
    """
    if theorem not in THEOREMS:
        raise ValueError(f"unknown theorem id {theorem!r}; expected one of {THEOREMS}")
    lam, alpha, beta = params.lam, params.alpha, params.beta
    conditions: list[tuple[str, bool]] = []
    derived: dict = {"Q": Q}
    notes: list[str] = []

    layered = theorem in ("T2.2", "T4.1")
    l = params.layer
    if layered:
        if l is None or m_l is None:
            raise ValueError(f"{theorem} requires a layer index and its dimension m_l")
        derived["layer"] = l
        derived["m_l"] = m_l
    lsum = l * (alpha + beta) if layered else alpha + beta

    conditions.append(("0 < lambda < Q", 0.0 < lam < Q))

    if theorem in ("T2.1", "T2.2"):
        r = _finite_range("r", params.r_exp, conditions)
        s = _finite_range("s", params.s_exp, conditions)
        r_prime = conjugate_exponent(r) if r > 1 else math.inf
        s_prime = conjugate_exponent(s) if s > 1 else math.inf
        derived["r_prime"] = r_prime
        derived["s_prime"] = s_prime
        residual = 1.0 / r + 1.0 / s + (lam + lsum) / Q - 2.0
        derived["balance_residual"] = residual
        if theorem == "T2.1":
            conditions.append(("alpha + beta >= 0", alpha + beta >= 0.0))
            conditions.append(("lambda + alpha + beta <= Q", lam + alpha + beta <= Q))
            conditions.append(("alpha < Q/r'", alpha < Q / r_prime))
            conditions.append(("beta < Q/s'", beta < Q / s_prime))
            conditions.append(
                ("balance: 1/r + 1/s + (lambda+alpha+beta)/Q = 2", abs(residual) <= _BALANCE_TOL)
            )
        else:
            bound = _layer_sum_bound(lam, Q, l, m_l, notes)
            derived["alpha_beta_upper"] = bound
            conditions.append(("alpha + beta >= 0", alpha + beta >= 0.0))
            conditions.append(
                ("alpha + beta < m_l*lambda/(Q - l*m_l)", alpha + beta < bound)
            )
            conditions.append(
                ("lambda + l*alpha + l*beta <= Q", lam + l * alpha + l * beta <= Q)
            )
            conditions.append(("alpha < m_l/r'", alpha < m_l / r_prime))
            conditions.append(("beta < m_l/s'", beta < m_l / s_prime))
            conditions.append(
                (
                    "balance: 1/r + 1/s + (lambda + l*alpha + l*beta)/Q = 2",
                    abs(residual) <= _BALANCE_TOL,
                )
            )
    else:
        p = _finite_range("p", params.p, conditions)
        q = _finite_range("q", params.q, conditions)
        conditions.append(("p <= q", p <= q))
        p_prime = conjugate_exponent(p) if p > 1 else math.inf
        derived["p_prime"] = p_prime
        residual = 1.0 / q - (1.0 / p + (lam + lsum) / Q - 1.0)
        derived["balance_residual"] = residual
        if theorem == "T3.1":
            conditions.append(("alpha + beta >= 0", alpha + beta >= 0.0))
            conditions.append(("alpha < Q/q", alpha < Q / q))
            conditions.append(("beta < Q/p'", beta < Q / p_prime))
            conditions.append(
                (
                    "scaling: 1/q = 1/p + (lambda+alpha+beta)/Q - 1",
                    abs(residual) <= _BALANCE_TOL,
                )
            )
        else:
            bound = _layer_sum_bound(lam, Q, l, m_l, notes)
            derived["alpha_beta_upper"] = bound
            conditions.append(("alpha + beta >= 0", alpha + beta >= 0.0))
            conditions.append(
                ("alpha + beta < m_l*lambda/(Q - l*m_l)", alpha + beta < bound)
            )
            conditions.append(("alpha < m_l/q", alpha < m_l / q))
            conditions.append(("beta < m_l/p'", beta < m_l / p_prime))
            conditions.append(
                (
                    "scaling: 1/q = 1/p + (lambda + l*alpha + l*beta)/Q - 1",
                    abs(residual) <= _BALANCE_TOL,
                )
            )

    violated = tuple(name for name, ok in conditions if not ok)
    return AdmissibilityReport(theorem, not violated, violated, derived, tuple(notes))


def _layer_sum_bound(lam, Q, l, m_l, notes) -> float:
    denom = Q - l * m_l
    if denom <= 0:
        notes.append(
            "Q <= l*m_l: the alpha+beta upper bound is a division by zero; "
            "treated as +inf (condition vacuous)"
        )
        return math.inf
    return m_l * lam / denom


# -- empirical quasi-triangle constant ----------------------------------------


@dataclass(frozen=True)
class TriangleConstantEstimate:
    value: float
    witness: tuple | None
    n_triples: int
    seed: int

    def __float__(self):
        return self.value


def estimate_triangle_constant(
    spec: GroupSpec, n_triples: int, seed: int = 0
) -> TriangleConstantEstimate:
    """Empirical lower bound on K_G: max of d(u1,u2)/(d(u1,u3)+d(u3,u2)).

    The degenerate triple u3 = u1 realizes ratio 1, so the estimate is seeded
    at 1.  Triples are drawn from a single stream, so enlarging n_triples
    extends (never replays) the sample and the estimate is non-decreasing.
    """
    if n_triples < 1:
        raise ValueError(f"n_triples must be >= 1, got {n_triples}")
    spec.require_valid()
    rng = np.random.default_rng(derive_seed(seed, "triangle"))
    best = 1.0
    witness = None
    batch = 4096
    done = 0
    scales = (0.1, 1.0, 10.0)
    while done < n_triples:
        # always draw a full batch so the triple sequence is a prefix of any
        # longer run with the same seed (keeps the estimate non-decreasing)
        pts = rng.standard_normal((3, batch, spec.dim))
        scale = np.asarray(scales)[rng.integers(0, len(scales), size=batch)]
        m = min(batch, n_triples - done)
        pts = pts[:, :m, :] * scale[None, :m, None]
        u1, u2, u3 = pts
        d12 = spec.distance(u1, u2)
        denom = spec.distance(u1, u3) + spec.distance(u3, u2)
        ok = denom > 1e-300
        ratio = np.where(ok, d12 / np.where(ok, denom, 1.0), 0.0)
        k = int(np.argmax(ratio))
        if ratio[k] > best:
            best = float(ratio[k])
            witness = (u1[k].copy(), u2[k].copy(), u3[k].copy())
        done += m
    return TriangleConstantEstimate(best, witness, n_triples, seed)


@lru_cache(maxsize=64)
def triangle_constant(spec: GroupSpec, n_triples: int = 20_000, seed: int = 0) -> float:
    """Cached empirical K_G for a group (used by the phi(B) computations)."""
    return estimate_triangle_constant(spec, n_triples, seed).value


# -- Sawyer-Wheeden conditions --------------------------------------------------


def phi_of_ball(lam: float, k_g: float, radius: float) -> float:
    """phi(B) = 9^lambda K_G^(4 lambda) r^(-lambda)."""
    if radius <= 0 or not math.isfinite(radius):
        raise DomainError(f"radius must be a positive real, got {radius}")
    if lam < 0:
        raise DomainError(f"phi needs lambda >= 0, got {lam}")
    return 9.0 ** lam * k_g ** (4.0 * lam) * radius ** (-lam)


@dataclass(frozen=True)
class Cond35Pair:
    r_big: float
    r_small: float
    left: float
    simplified: float
    bound: float
    contained: bool
    passed: bool


@dataclass(frozen=True)
class Cond35Report:
    epsilon: float
    bound: float
    pairs: tuple[Cond35Pair, ...]
    passed: bool

    def to_dict(self) -> dict:
        return {
            "epsilon": self.epsilon,
            "bound": self.bound,
            "pass": self.passed,
            "pairs": [vars(p) for p in self.pairs],
        }


def check_condition_35(
    spec: GroupSpec,
    lam: float,
    eps: float,
    ball_pairs,
    k_g: float | None = None,
) -> Cond35Report:
    """Check (r'/r)^(Q-eps) phi(B')/phi(B) <= 4^(Q-lambda-eps) over ball pairs.

    Each pair is (B, B') with B' expected inside 4B; containment is verified
    from centers and radii with the estimated quasi-triangle constant.  The
    algebraic simplification of the left side to (r'/r)^(Q-lambda-eps) is also
    verified to 1e-12 relative.
    """
    q = spec.homogeneous_dimension
    if not 0.0 < eps < q - lam:
        raise BadEpsilon(f"epsilon must lie in (0, Q - lambda) = (0, {q - lam}), got {eps}")
    if k_g is None:
        k_g = triangle_constant(spec)
    bound = 4.0 ** (q - lam - eps)
    rows = []
    all_ok = True
    for big, small in ball_pairs:
        r = float(big.radius)
        r_p = float(small.radius)
        left = (r_p / r) ** (q - eps) * (
            phi_of_ball(lam, k_g, r_p) / phi_of_ball(lam, k_g, r)
        )
        simplified = (r_p / r) ** (q - lam - eps)
        identity_ok = abs(left - simplified) <= 1e-12 * abs(simplified)
        cb = big.center_flat(spec)
        cs = small.center_flat(spec)
        if cb is None and cs is None:
            contained = r_p <= r * 4.0 * (1.0 + 1e-12)
        else:
            zb = np.zeros(spec.dim) if cb is None else cb
            zs = np.zeros(spec.dim) if cs is None else cs
            d = float(spec.distance(zb, zs))
            contained = k_g * (d + r_p) <= 4.0 * r * (1.0 + 1e-12)
        ok = identity_ok and contained and left <= bound * (1.0 + 1e-12)
        all_ok &= ok
        rows.append(Cond35Pair(r, r_p, left, simplified, bound, contained, ok))
    return Cond35Report(eps, bound, tuple(rows), all_ok)


@dataclass(frozen=True)
class Cond36Row:
    radius: float
    m1: IntegralEstimate
    m2: IntegralEstimate
    m3: IntegralEstimate
    product: IntegralEstimate
    closed_ref_w1: float
    closed_ref_z: float


@dataclass(frozen=True)
class Cond36Report:
    tau: float
    lambda_bar: float
    exponent_residual: float
    rows: tuple[Cond36Row, ...]
    max_constancy_z: float
    passed: bool

    def to_dict(self) -> dict:
        return {
            "tau": self.tau,
            "lambda_bar": self.lambda_bar,
            "exponent_residual": self.exponent_residual,
            "max_constancy_z": self.max_constancy_z,
            "pass": self.passed,
            "rows": [
                {
                    "radius": row.radius,
                    "M1": row.m1.to_dict(),
                    "M2": row.m2.to_dict(),
                    "M3": row.m3.to_dict(),
                    "product": row.product.to_dict(),
                    "closed_ref_w1": row.closed_ref_w1,
                    "closed_ref_z": row.closed_ref_z,
                }
                for row in self.rows
            ],
        }


def tau_window(spec: GroupSpec, alpha: float, beta: float, p: float, q: float,
               weight_kind: str, layer: int | None = None) -> tuple[float, float]:
    """Admissible (1, tau_max) window for the doubling exponents."""
    cap = spec.homogeneous_dimension if weight_kind == "full_norm" else spec.layer_dim(layer)
    p_prime = conjugate_exponent(p)
    bounds = []
    if alpha > 0:
        bounds.append(cap / (alpha * q))
    if beta > 0:
        bounds.append(cap / (beta * p_prime))
    return 1.0, min(bounds) if bounds else math.inf


def default_tau(window: tuple[float, float]) -> float:
    lo, hi = window
    if math.isinf(hi):
        return 2.0
    return 0.5 * (lo + hi)


def check_condition_36(
    spec: GroupSpec,
    *,
    alpha: float,
    beta: float,
    p: float,
    q: float,
    radii,
    weight_kind: str = "full_norm",
    layer: int | None = None,
    tau: float | None = None,
    lam: float | None = None,
    cfg: SamplerConfig = SamplerConfig(),
    k_g: float | None = None,
) -> Cond36Report:
    """Evaluate M1*M2*M3 by Monte Carlo across radii and test radius-independence.

    w1 = |.|^(-alpha q), w2 = |.|^(beta p); the tau-powered doubling weights
    are w1^tau and w2^((1-p')tau) = |.|^(-beta p' tau).  Centered-ball weight
    integrals are also cross-checked against the closed form transported by
    the dilation identity.
    """
    window = tau_window(spec, alpha, beta, p, q, weight_kind, layer)
    if window[1] <= window[0]:
        raise BadTau(f"tau window {window} is empty")
    if tau is None:
        tau = default_tau(window)
    if not window[0] < tau < window[1]:
        raise BadTau(f"tau={tau} outside admissible window {window}")
    p_prime = conjugate_exponent(p)
    q_val = spec.homogeneous_dimension
    lambda_bar = q_val * (1.0 / q + 1.0 / p_prime)
    if lam is None:
        lam = lambda_bar
    if k_g is None:
        k_g = triangle_constant(spec)
    scale = 1 if weight_kind == "full_norm" else layer
    residual = lambda_bar - lam - scale * (alpha + beta)

    kind = "full_norm_power" if weight_kind == "full_norm" else "layer_power"
    w2_exp = -beta * p_prime * tau  # w2^((1-p')*tau) since p(1-p') = -p'
    w1_exp = -alpha * q * tau
    weight1 = WeightSpec(kind, w1_exp, layer) if w1_exp != 0 else WeightSpec("unweighted")
    weight2 = WeightSpec(kind, w2_exp, layer) if w2_exp != 0 else WeightSpec("unweighted")

    vol1 = unit_ball_volume(spec)
    rows = []
    prods = []
    for r in radii:
        r = float(r)
        ball = BallSpec(None, r)
        vol = mc_integrate(spec, ball, lambda pts: 1.0, cfg=cfg.sub("vol", int(r * 1e6)))
        i2 = mc_integrate(spec, ball, lambda pts: 1.0, weight1, cfg.sub("w1", int(r * 1e6)))
        i3 = mc_integrate(spec, ball, lambda pts: 1.0, weight2, cfg.sub("w2", int(r * 1e6)))

        phi = phi_of_ball(lam, k_g, r)
        m1 = power_of(vol, 1.0 / p_prime + 1.0 / q).scaled(phi)
        m2 = _normalized_power(i2, vol, 1.0 / (q * tau))
        m3 = _normalized_power(i3, vol, 1.0 / (p_prime * tau))

        x = 1.0 / p_prime + 1.0 / q - 1.0 / (q * tau) - 1.0 / (p_prime * tau)
        log_rel = math.hypot(
            x * _rel(vol),
            math.hypot(_rel(i2) / (q * tau), _rel(i3) / (p_prime * tau)),
        )
        prod_val = (
            phi
            * vol.value ** x
            * i2.value ** (1.0 / (q * tau))
            * i3.value ** (1.0 / (p_prime * tau))
        )
        product = IntegralEstimate(prod_val, abs(prod_val) * log_rel, vol.n_samples, cfg.seed)

        ref1 = _centered_weight_integral(spec, vol1, weight1, r)
        z1 = i2.z_score(ref1)
        rows.append(Cond36Row(r, m1, m2, m3, product, ref1, z1))
        prods.append(product)

    mean = _weighted_mean(prods)
    zs = [abs(p_.value - mean) / p_.std_error if p_.std_error > 0 else 0.0 for p_ in prods]
    max_z = max(zs)
    return Cond36Report(tau, lambda_bar, residual, tuple(rows), max_z, max_z <= 3.0)


def _rel(est: IntegralEstimate) -> float:
    return est.std_error / est.value if est.value != 0 else 0.0


def _normalized_power(integral, vol, expo) -> IntegralEstimate:
    value = (integral.value / vol.value) ** expo
    rel = expo * math.hypot(_rel(integral), _rel(vol))
    return IntegralEstimate(value, abs(value * rel), integral.n_samples, integral.seed)


def _weighted_mean(estimates) -> float:
    weights = [1.0 / e.std_error ** 2 if e.std_error > 0 else 1e30 for e in estimates]
    total = sum(weights)
    return sum(w * e.value for w, e in zip(weights, estimates)) / total


def _centered_weight_integral(spec, vol1, weight, radius) -> float:
    """Closed form of the centered ball weight integral via the dilation identity."""
    q = spec.homogeneous_dimension
    if weight.kind == "unweighted":
        return vol1 * radius ** q
    if weight.kind == "full_norm_power":
        gamma = -weight.exponent
        return radius ** (q - gamma) * vol1 * q / (q - gamma)
    gamma = -weight.exponent
    l = weight.layer
    unit = lemma44_closed_form(Lemma44Params(spec, l, gamma))
    return radius ** (q - l * gamma) * unit


@dataclass(frozen=True)
class SWConditionReport:
    k_g: float
    epsilon: float
    tau: float
    lambda_bar: float
    cond35: Cond35Report
    cond36: Cond36Report

    @property
    def cond35_pass(self) -> bool:
        return self.cond35.passed

    @property
    def cond36_pass(self) -> bool:
        return self.cond36.passed

    def to_dict(self) -> dict:
        return {
            "K_G": self.k_g,
            "epsilon": self.epsilon,
            "tau": self.tau,
            "lambda_bar": self.lambda_bar,
            "cond35": self.cond35.to_dict(),
            "cond36": self.cond36.to_dict(),
            "cond35_pass": self.cond35_pass,
            "cond36_pass": self.cond36_pass,
        }


def sw_conditions(
    spec: GroupSpec,
    *,
    lam: float,
    alpha: float,
    beta: float,
    p: float,
    q: float,
    radii=(0.5, 1.0, 2.0, 4.0),
    weight_kind: str = "full_norm",
    layer: int | None = None,
    eps: float | None = None,
    tau: float | None = None,
    cfg: SamplerConfig = SamplerConfig(),
) -> SWConditionReport:
    """Run both Sawyer-Wheeden checks on a concentric radius grid."""
    q_val = spec.homogeneous_dimension
    k_g = triangle_constant(spec)
    if eps is None:
        eps = 0.5 * (q_val - lam)
    pairs = []
    for r in radii:
        for factor in (0.5, 1.0, 2.0, 4.0):
            pairs.append((BallSpec(None, float(r)), BallSpec(None, float(r) * factor)))
    cond35 = check_condition_35(spec, lam, eps, pairs, k_g)
    cond36 = check_condition_36(
        spec,
        alpha=alpha,
        beta=beta,
        p=p,
        q=q,
        radii=radii,
        weight_kind=weight_kind,
        layer=layer,
        tau=tau,
        lam=lam,
        cfg=cfg,
        k_g=k_g,
    )
    p_prime = conjugate_exponent(p)
    lambda_bar = q_val * (1.0 / q + 1.0 / p_prime)
    return SWConditionReport(k_g, eps, cond36.tau, lambda_bar, cond35, cond36)


# -- duality ---------------------------------------------------------------------


@dataclass(frozen=True)
class DualityCheck:
    bilinear: IntegralEstimate
    inner_product: IntegralEstimate
    z: float

    def to_dict(self) -> dict:
        return {
            "bilinear": self.bilinear.to_dict(),
            "inner_product": self.inner_product.to_dict(),
            "z": self.z,
        }


def duality_check(
    spec: GroupSpec,
    f,
    g,
    kp: KernelParams,
    domain: BallSpec,
    cfg: SamplerConfig = SamplerConfig(),
    n_outer: int = 256,
    couple_kernel: bool = False,
) -> DualityCheck:
    """Compare the bilinear form against the nested integral of f(u) Sg(u).

    The right side is estimated with an outer sample of u points and an
    independent inner operator estimate per point, so the two routes share no
    randomness and exercise the integration stack differently.
    """
    bil = bilinear_form(
        spec, f, g, kp, domain, cfg.sub("dual-lhs"), couple_kernel=couple_kernel
    )
    prop = trial_proposal(spec, f, domain)
    rng = np.random.default_rng(derive_seed(cfg.seed, "dual-outer"))
    us = prop.sample(rng, n_outer)
    dens = prop.density(us)
    center = domain.center_flat(spec)
    if center is None:
        inside = spec.norm(us) < domain.radius
    else:
        inside = spec.distance(center, us) < domain.radius
    f_eval = f.evaluate if hasattr(f, "evaluate") else lambda s, pts: f(pts)
    f_vals = np.asarray(f_eval(spec, us), float)
    n_inner = max(2048, cfg.n_samples // n_outer)
    xs = np.zeros(n_outer)
    for i in range(n_outer):
        if not inside[i] or f_vals[i] == 0.0:
            continue
        inner_cfg = cfg.sub("dual-inner", i).with_samples(n_inner)
        s_est = eval_S(spec, g, kp, us[i], domain, inner_cfg)
        xs[i] = f_vals[i] * s_est.value / dens[i]
    value = float(np.mean(xs))
    se = float(np.std(xs, ddof=1) / math.sqrt(n_outer))
    rhs = IntegralEstimate(value, se, n_outer * n_inner, cfg.seed)
    return DualityCheck(bil, rhs, combined_z(bil, rhs))


# -- best-constant search ---------------------------------------------------------


@dataclass(frozen=True)
class SearchConfig:
    n_restarts: int = 4
    max_iter: int = 60
    n_samples: int = 20_000
    seed: int = 0
    domain_radius: float = 8.0
    reeval_factor: int = 4


@dataclass(frozen=True)
class BestConstantResult:
    constant_lower_bound: float
    bound_std_error: float
    best_f: AnisoBump
    best_g: AnisoBump
    trace: tuple[dict, ...]
    running_best: tuple[float, ...]

    def to_dict(self) -> dict:
        return {
            "constant_lower_bound": self.constant_lower_bound,
            "bound_std_error": self.bound_std_error,
            "best_f": self.best_f.to_dict(),
            "best_g": self.best_g.to_dict(),
            "running_best": list(self.running_best),
            "trace": list(self.trace),
        }


def estimate_best_constant(
    spec: GroupSpec,
    kp: KernelParams,
    r_exp: float,
    s_exp: float,
    search: SearchConfig = SearchConfig(),
) -> BestConstantResult:
    """Maximize the Stein-Weiss ratio over bump decay rates.

    Nelder-Mead over the log decay rates of f and g with seeded random
    restarts.  Each restart's objective uses one fixed sampling seed (common
    random numbers), and each restart's best candidate is re-evaluated with a
    fresh seed and ``reeval_factor`` more samples; the reported bound is the
    running maximum of those re-evaluations, hence certified by evaluation.
    """
    q = spec.homogeneous_dimension
    m_l = spec.layer_dim(kp.layer) if kp.weight_kind == "layer" else None
    theorem = "T2.1" if kp.weight_kind == "full_norm" else "T2.2"
    report = check_admissible(
        theorem,
        ExponentParams(
            kp.lam, kp.alpha, kp.beta, r_exp=r_exp, s_exp=s_exp, layer=kp.layer
        ),
        Q=q,
        m_l=m_l,
    )
    if not report.passed:
        raise InadmissibleParams(report)

    domain = BallSpec(None, search.domain_radius)
    r = spec.step
    trace: list[dict] = []
    running: list[float] = []
    best_value = -math.inf
    best_se = math.inf
    best_pair = None
    couple = 2.0 * kp.lam >= q

    for restart in range(search.n_restarts):
        seed_r = derive_seed(search.seed, "restart", restart)
        rng = np.random.default_rng(seed_r)
        x0 = rng.uniform(math.log(0.3), math.log(3.0), size=2 * r)
        eval_cfg = SamplerConfig(n_samples=search.n_samples, seed=seed_r)
        counter = {"n": 0}

        def objective(x, _restart=restart, _cfg=eval_cfg, _counter=counter):
            rates = np.exp(np.clip(x, -8.0, 8.0))
            fb = AnisoBump(tuple(rates[:r]))
            gb = AnisoBump(tuple(rates[r:]))
            est = stein_weiss_ratio(
                spec, fb, gb, kp, r_exp, s_exp, domain, _cfg, couple_kernel=couple
            )
            _counter["n"] += 1
            trace.append(
                {
                    "restart": _restart,
                    "eval": _counter["n"],
                    "log_rates": [float(v) for v in x],
                    "ratio": est.value,
                    "std_error": est.std_error,
                }
            )
            return -est.value

        res = optimize.minimize(
            objective,
            x0,
            method="Nelder-Mead",
            options={"maxiter": search.max_iter, "xatol": 1e-3, "fatol": 1e-4},
        )
        rates = np.exp(np.clip(res.x, -8.0, 8.0))
        fb = AnisoBump(tuple(rates[:r]))
        gb = AnisoBump(tuple(rates[r:]))
        reeval_cfg = SamplerConfig(
            n_samples=search.n_samples * search.reeval_factor,
            seed=derive_seed(search.seed, "reeval", restart),
        )
        certified = stein_weiss_ratio(
            spec, fb, gb, kp, r_exp, s_exp, domain, reeval_cfg, couple_kernel=couple
        )
        if certified.value > best_value:
            best_value = certified.value
            best_se = certified.std_error
            best_pair = (fb, gb)
        running.append(best_value)

    return BestConstantResult(
        best_value, best_se, best_pair[0], best_pair[1], tuple(trace), tuple(running)
    )
