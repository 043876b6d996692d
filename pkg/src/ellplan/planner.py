"""Round-depth planning: three rules for choosing the search depth ell.

For a slack eps > 0, the guarantee rho(ell) >= 1 - 1/e - eps can be bought
at three depths:

    ell_bf      1 + ceil(1/eps)                 classical, fully safe
    ell_ps      ceil(1/(2 e eps))               closed form, near-minimal
    ell_star    min{ell >= 1 : phi(ell) <= 1/e + eps}   exactly minimal

ell_star is located by bisection over [1, ell_ps]: the upper endpoint is
guaranteed feasible by the closed-form bound, phi is strictly decreasing, and
every probe compares an exact rational phi value against a certified
enclosure of 1/e + eps.  The planner never touches floats, so the returned
depths carry a proof rather than an estimate.  For eps >= 1/2 - 1/e the same
path returns ell_star = 1 with no special casing.

The sharp exponential certificate (exp of the three-term exponent against
1 + e*eps) is sufficient but not necessary; certificate_sharp can come back
False for a depth that phi itself accepts.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Union

from ellplan.bounds import phi, rho, sharp_exponent
from ellplan.certified import (
    DEFAULT_POLICY,
    E,
    Enclosure,
    PrecisionExhausted,
    RefinementPolicy,
    Verdict,
    cmp_certified,
    const,
    enclose_e,
    exp_of,
    inv_e,
)

RationalLike = Union[int, Fraction]


@dataclass(frozen=True)
class EpsSpec:
    """A slack value held exactly; floats are refused at the boundary."""

    eps: Fraction

    def __post_init__(self):
        if not isinstance(self.eps, Fraction):
            raise TypeError(f"eps must be a Fraction, got {type(self.eps).__name__}")
        if self.eps <= 0:
            raise ValueError(f"eps must be positive, got {self.eps}")

    @classmethod
    def parse(cls, text: str) -> "EpsSpec":
        """Exact decimal (or p/q) string to EpsSpec: '0.01', '1e-3', '3/20'."""
        try:
            value = Fraction(text.strip())
        except (ValueError, ZeroDivisionError) as exc:
            raise ValueError(f"cannot parse eps from {text!r}") from exc
        return cls(value)

    @classmethod
    def from_rational(cls, value: RationalLike) -> "EpsSpec":
        if isinstance(value, float):
            raise TypeError("refusing float eps; pass a string or Fraction")
        return cls(Fraction(value))

    def __str__(self) -> str:
        return str(self.eps)


def _eps_value(eps: Union[EpsSpec, RationalLike]) -> Fraction:
    if isinstance(eps, EpsSpec):
        return eps.eps
    return EpsSpec.from_rational(eps).eps


def ell_bf(eps: Union[EpsSpec, RationalLike]) -> int:
    """The brute-force depth 1 + ceil(1/eps), computed exactly."""
    value = _eps_value(eps)
    return 1 + math.ceil(1 / value)


def _ell_ps_with_bits(
    value: Fraction, policy: RefinementPolicy
) -> tuple[int, int]:
    # ceil(1/(2 e eps)): refine the enclosure of e until both endpoints of
    # 1/(2 e eps) share a ceiling.  1/(2 e eps) is irrational for rational
    # eps, so this terminates quickly; the cap guard is for safety only.
    for bits in policy.ladder():
        enc = enclose_e(bits)
        lo = 1 / (2 * enc.hi * value)
        hi = 1 / (2 * enc.lo * value)
        cl = math.ceil(lo)
        if cl == math.ceil(hi):
            return max(1, cl), bits
    raise PrecisionExhausted(
        f"ceiling of 1/(2 e eps) still ambiguous at {policy.cap_bits} bits"
    )


def ell_ps(
    eps: Union[EpsSpec, RationalLike],
    policy: RefinementPolicy = DEFAULT_POLICY,
) -> int:
    """The closed-form depth ceil(1/(2 e eps)), certified, at least 1."""
    result, _ = _ell_ps_with_bits(_eps_value(eps), policy)
    return result


def _probe(
    ell: int, target_hint: Fraction, policy: RefinementPolicy
) -> tuple[bool, int]:
    """Certified test of phi(ell) <= 1/e + eps; returns (verdict, bits)."""
    res = cmp_certified(const(phi(ell)), inv_e() + const(target_hint), policy)
    if res.verdict is Verdict.UNRESOLVED:
        raise PrecisionExhausted(
            f"phi({ell}) vs 1/e + {target_hint} unresolved at {policy.cap_bits} bits"
        )
    return res.verdict is Verdict.LESS, res.bits_used


def _ell_star_with_bits(
    value: Fraction, policy: RefinementPolicy
) -> tuple[int, int]:
    ps, bits = _ell_ps_with_bits(value, policy)
    ok, b = _probe(ps, value, policy)
    bits = max(bits, b)
    if not ok:
        # the closed-form bound guarantees feasibility at its own ceiling
        raise AssertionError(f"phi({ps}) > 1/e + {value}: upper bound broken")
    lo, hi = 1, ps
    while lo < hi:
        mid = (lo + hi) // 2
        ok, b = _probe(mid, value, policy)
        bits = max(bits, b)
        if ok:
            hi = mid
        else:
            lo = mid + 1
    return lo, bits


def ell_star(
    eps: Union[EpsSpec, RationalLike],
    policy: RefinementPolicy = DEFAULT_POLICY,
) -> int:
    """The minimal depth with phi(ell) <= 1/e + eps, every probe certified."""
    star, _ = _ell_star_with_bits(_eps_value(eps), policy)
    return star


def certified_minimal(
    ell: int,
    eps: Union[EpsSpec, RationalLike],
    policy: RefinementPolicy = DEFAULT_POLICY,
) -> bool:
    """Direct two-sided minimality check for a claimed depth.

    True iff phi(ell) <= 1/e + eps and, when ell > 1, phi(ell - 1) > 1/e +
    eps, both by certified comparison.  Unlike the bisection this does not
    lean on monotonicity.
    """
    value = _eps_value(eps)
    at, _ = _probe(ell, value, policy)
    if not at:
        return False
    if ell == 1:
        return True
    below, _ = _probe(ell - 1, value, policy)
    return not below


def certificate_sharp(
    ell: int,
    eps: Union[EpsSpec, RationalLike],
    policy: RefinementPolicy = DEFAULT_POLICY,
) -> bool:
    """Sufficient certificate: exp(1/(2l) - 1/(3l^2) + 1/(4l^3)) <= 1 + e*eps.

    True implies phi(ell) <= 1/e + eps.  False implies nothing about phi;
    the certificate is not necessary (try ell=1, eps=3/20).  An unresolved
    comparison raises rather than degrading to False.
    """
    value = _eps_value(eps)
    lhs = exp_of(sharp_exponent(ell))
    rhs = const(1) + E * const(value)
    res = cmp_certified(lhs, rhs, policy)
    if res.verdict is Verdict.UNRESOLVED:
        raise PrecisionExhausted(
            f"certificate at ell={ell}, eps={value} unresolved "
            f"at {policy.cap_bits} bits"
        )
    return res.verdict in (Verdict.LESS, Verdict.EQUAL)


_RESIDUAL_BITS = 128


def asymptotic_residual(
    eps: Union[EpsSpec, RationalLike],
    policy: RefinementPolicy = DEFAULT_POLICY,
) -> Enclosure:
    """Enclosure of ell_star(eps) - (1/(2 e eps) - 5/12), for eps <= 1/10.

    The drift term is linear in eps and the ceiling contributes up to one
    unit, so the residual should land in [-1/2, 3/2] throughout the small-eps
    regime; this function reports the enclosure, it does not police it.
    """
    value = _eps_value(eps)
    if value > Fraction(1, 10):
        raise ValueError(f"asymptotic regime needs eps <= 1/10, got {value}")
    star, _ = _ell_star_with_bits(value, policy)
    enc = enclose_e(max(_RESIDUAL_BITS, policy.start_bits))
    target_lo = 1 / (2 * enc.hi * value) - Fraction(5, 12)
    target_hi = 1 / (2 * enc.lo * value) - Fraction(5, 12)
    return Enclosure(star - target_hi, star - target_lo)


@dataclass(frozen=True)
class EllPlan:
    """The three depths for one slack, plus the certification trail."""

    eps: EpsSpec
    ell_bf: int
    ell_ps: int
    ell_star: int
    rho_star: Fraction
    certificate_holds_at_star: bool
    precision_used: int

    @property
    def gap(self) -> int:
        """ell_ps - ell_star; observed to be 0 or 1 on every tested slack."""
        return self.ell_ps - self.ell_star

    @property
    def ps_within_bf(self) -> bool:
        """Reported, not enforced: the closed form undercuts brute force."""
        return self.ell_ps <= self.ell_bf


def plan(
    eps: Union[EpsSpec, RationalLike, str],
    policy: RefinementPolicy = DEFAULT_POLICY,
) -> EllPlan:
    """Assemble the full depth plan for one slack value.

    Deterministic for a fixed eps: the bisection path and every enclosure
    depend only on eps and the policy ladder.  The minimality of ell_star is
    re-certified directly (both sides) rather than inherited from the search.
    """
    if isinstance(eps, str):
        spec = EpsSpec.parse(eps)
    elif isinstance(eps, EpsSpec):
        spec = eps
    else:
        spec = EpsSpec.from_rational(eps)
    value = spec.eps

    bf = ell_bf(spec)
    ps, ps_bits = _ell_ps_with_bits(value, policy)
    star, star_bits = _ell_star_with_bits(value, policy)
    if star > ps:
        raise AssertionError(f"ell_star {star} exceeded ell_ps {ps}")

    ok_at, at_bits = _probe(star, value, policy)
    if not ok_at:
        raise AssertionError(f"phi({star}) > 1/e + {value} after search")
    prev_bits = 0
    if star > 1:
        ok_prev, prev_bits = _probe(star - 1, value, policy)
        if ok_prev:
            raise AssertionError(f"ell_star {star} is not minimal")

    cert = certificate_sharp(star, spec, policy)
    bits = max(ps_bits, star_bits, at_bits, prev_bits, policy.start_bits)
    return EllPlan(
        eps=spec,
        ell_bf=bf,
        ell_ps=ps,
        ell_star=star,
        rho_star=rho(star),
        certificate_holds_at_star=cert,
        precision_used=bits,
    )
