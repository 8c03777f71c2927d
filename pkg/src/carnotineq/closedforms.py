"""Gamma/Beta special functions and the closed-form layer-weight ball integral.

The central quantity is ``I(l, gamma) = integral of |z_l|^(-gamma) over the
unit pseudo-ball``.  Reducing each layer block to radial coordinates and
substituting ``s_j = rho_j^(2r!/j)`` turns the ball into the standard simplex
``sum s_j < 1``, so the integral is a Dirichlet integral:

    I = (prod_j sigma_{m_j - 1}) * (r! / (2r!)^r) * prod_j Gamma(b_j) / Gamma(1 + sum_j b_j)

with ``b_j = j*m_j/(2r!)`` for ``j != l``, ``b_l = l*(m_l - gamma)/(2r!)`` and
``sigma_{m-1}`` the surface area of the unit sphere in R^m.  Pulling the
``1/b_l`` out of ``Gamma(b_l)`` and telescoping the remaining Gamma factors
yields the equivalent Beta-product form

    I = (prod_j sigma_{m_j-1}) * r!/(l*(2r!)^(r-1)) * 1/(m_l - gamma)
        * prod_{j != l} B(1 + b_l + sum_{i<j, i!=l} b_i,  b_j),

which is what :func:`lemma44_closed_form` evaluates (in log space).  It is
finite exactly when ``gamma < m_l`` and diverges like ``1/(m_l - gamma)`` at
the boundary.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import DomainError
from .groups import GroupSpec

__all__ = [
    "beta",
    "log_beta",
    "sphere_surface",
    "Lemma44Params",
    "lemma44_closed_form",
    "lemma44_oracle",
    "unit_ball_volume",
]


def log_beta(a: float, b: float) -> float:
    if a <= 0 or b <= 0:
        raise DomainError(f"Beta function needs positive arguments, got ({a}, {b})")
    return math.lgamma(a) + math.lgamma(b) - math.lgamma(a + b)


def beta(a: float, b: float) -> float:
    """B(a, b) = Gamma(a)Gamma(b)/Gamma(a+b), evaluated in log space."""
    return math.exp(log_beta(a, b))


def sphere_surface(n: int) -> float:
    """Surface area of the unit sphere S^n in R^(n+1); n = 0 gives 2."""
    if n < 0 or int(n) != n:
        raise DomainError(f"sphere dimension must be a nonnegative integer, got {n!r}")
    half = (n + 1) / 2.0
    return 2.0 * math.pi ** half / math.gamma(half)


@dataclass(frozen=True)
class Lemma44Params:
    """Layer index and weight exponent for the unit-ball integral of |z_l|^(-gamma)."""

    group: GroupSpec
    layer: int
    exponent: float

    def __post_init__(self):
        if not 1 <= self.layer <= self.group.step:
            raise DomainError(f"layer must be in 1..{self.group.step}, got {self.layer}")
        m_l = self.group.layer_dim(self.layer)
        if not self.exponent < m_l:
            raise DomainError(
                f"exponent must satisfy gamma < m_l = {m_l}, got gamma = {self.exponent}"
            )


def _simplex_exponents(spec: GroupSpec, layer: int, gamma: float) -> list[float]:
    e = spec.norm_exponent
    out = []
    for j, m_j in enumerate(spec.layer_dims, start=1):
        if j == layer:
            out.append(j * (m_j - gamma) / e)
        else:
            out.append(j * m_j / e)
    return out


def lemma44_closed_form(params: Lemma44Params) -> float:
    """Exact value of the unit-ball integral of |z_l|^(-gamma)."""
    spec = params.group
    r = spec.step
    e = spec.norm_exponent
    b = _simplex_exponents(spec, params.layer, params.exponent)
    log_value = (
        sum(math.log(sphere_surface(m - 1)) for m in spec.layer_dims)
        + math.lgamma(r + 1)
        - r * math.log(e)
        + sum(math.lgamma(bj) for bj in b)
        - math.lgamma(1.0 + sum(b))
    )
    return math.exp(log_value)


def unit_ball_volume(spec: GroupSpec) -> float:
    """Haar volume of the unit pseudo-ball (the gamma = 0 closed form)."""
    return lemma44_closed_form(Lemma44Params(spec, 1, 0.0))


def lemma44_oracle(params: Lemma44Params, cfg):
    """Independent Monte-Carlo estimate of the same unit-ball integral."""
    from .sampling import BallSpec, WeightSpec, mc_integrate

    weight = WeightSpec("layer_power", -params.exponent, params.layer)
    return mc_integrate(
        params.group,
        BallSpec(None, 1.0),
        lambda pts: 1.0,
        weight=weight,
        cfg=cfg,
    )
