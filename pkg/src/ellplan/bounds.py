"""The ratio-gap function phi(ell) = (1+1/ell)^(-ell) and its certified bounds.

phi is always evaluated as an exact rational power; the bounds that involve e
stay symbolic until a certified comparison forces them into enclosures.  Four
upper-bound families are supported:

    loose-recip   1/(e(1-1/ell))                          ell >= 2
    loose-linear  (1/e)(1+2/ell)                          ell >= 2
    polya-szego   (1/e)(1+1/(2 ell))                      ell >= 1
    sharp         (1/e)exp(1/(2l) - 1/(3l^2) + 1/(4l^3))  ell >= 1

Of the two loose bounds the reciprocal form is the tighter one: their
e-scaled factors satisfy ell/(ell-1) <= 1 + 2/ell for ell >= 2 with equality
exactly at ell = 2, so the certified chain runs

    sharp <= polya-szego <= loose-recip <= loose-linear      (ell >= 2).
"""

from __future__ import annotations

import functools
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from typing import Callable, Iterable, Optional, Sequence

from ellplan.certified import (
    DEFAULT_POLICY,
    Comparison,
    Enclosure,
    RealExpr,
    RefinementPolicy,
    Verdict,
    cmp_certified,
    const,
    enclose_e,
    enclose_exp,
    enclose_log1p,
    exp_of,
    inv_e,
    log1p_of,
)

_PHI_CACHE_LIMIT = 2048  # cache small values; sweeps recompute the huge ones


def _check_ell(ell: int) -> int:
    if not isinstance(ell, int) or isinstance(ell, bool) or ell < 1:
        raise ValueError(f"ell must be a positive integer, got {ell!r}")
    return ell


def _coprime_fraction(num: int, den: int) -> Fraction:
    # Fraction() always runs a gcd; on the 10^5-digit numerators that show up
    # past ell ~ 10^4 that gcd costs ten times the power itself and is known
    # to be 1 here.  Callers must guarantee coprimality and den > 0.
    f = Fraction.__new__(Fraction)
    f._numerator = num
    f._denominator = den
    return f


@functools.lru_cache(maxsize=None)
def _phi_cached(ell: int) -> Fraction:
    # consecutive integers are coprime, so their ell-th powers are too
    return _coprime_fraction(ell**ell, (ell + 1) ** ell)


def phi(ell: int) -> Fraction:
    """Exact value of (1+1/ell)^(-ell) = ell^ell / (ell+1)^ell."""
    ell = _check_ell(ell)
    if ell <= _PHI_CACHE_LIMIT:
        return _phi_cached(ell)
    return _coprime_fraction(ell**ell, (ell + 1) ** ell)


def rho(ell: int) -> Fraction:
    """The ratio target 1 - phi(ell)."""
    value = phi(ell)
    # gcd(d - n, d) = gcd(n, d) = 1, so skip the redundant normalization
    return _coprime_fraction(value.denominator - value.numerator, value.denominator)


@dataclass(frozen=True)
class PhiValue:
    ell: int
    value: Fraction

    @classmethod
    def at(cls, ell: int) -> "PhiValue":
        return cls(ell, phi(ell))

    @property
    def rho(self) -> Fraction:
        return rho(self.ell)


class BoundKind(Enum):
    LOOSE_RECIP = "loose-recip"
    LOOSE_LINEAR = "loose-linear"
    POLYA_SZEGO = "polya-szego"
    SHARP = "sharp"

    @property
    def min_ell(self) -> int:
        if self in (BoundKind.LOOSE_RECIP, BoundKind.LOOSE_LINEAR):
            return 2
        return 1


def sharp_exponent(ell: int) -> Fraction:
    ell = _check_ell(ell)
    return Fraction(1, 2 * ell) - Fraction(1, 3 * ell**2) + Fraction(1, 4 * ell**3)


def bound_factor(kind: BoundKind, ell: int) -> RealExpr:
    """The bound with its 1/e peeled off; rational for all kinds but sharp."""
    ell = _check_ell(ell)
    if ell < kind.min_ell:
        raise ValueError(f"{kind.value} bound needs ell >= {kind.min_ell}")
    if kind is BoundKind.LOOSE_RECIP:
        return const(Fraction(ell, ell - 1))
    if kind is BoundKind.LOOSE_LINEAR:
        return const(Fraction(ell + 2, ell))
    if kind is BoundKind.POLYA_SZEGO:
        return const(Fraction(2 * ell + 1, 2 * ell))
    return exp_of(sharp_exponent(ell))


def bound_value(kind: BoundKind, ell: int) -> RealExpr:
    """Descriptor of the upper bound itself, comparable to any precision."""
    return bound_factor(kind, ell) * inv_e()


# ---------------------------------------------------------------------------
# sweep reports


@dataclass(frozen=True)
class SweepEntry:
    ell: int
    verdict: Verdict
    bits_used: int
    ok: bool


@dataclass(frozen=True)
class SweepReport:
    label: str
    entries: tuple[SweepEntry, ...]

    @property
    def all_ok(self) -> bool:
        return all(e.ok for e in self.entries)

    @property
    def failures(self) -> tuple[SweepEntry, ...]:
        return tuple(
            e for e in self.entries if not e.ok and e.verdict is not Verdict.UNRESOLVED
        )

    @property
    def inconclusive(self) -> tuple[SweepEntry, ...]:
        return tuple(e for e in self.entries if e.verdict is Verdict.UNRESOLVED)

    def summary(self) -> str:
        n = len(self.entries)
        if self.all_ok:
            return f"{self.label}: {n}/{n} certified"
        bad = ", ".join(str(e.ell) for e in self.failures[:5])
        unres = ", ".join(str(e.ell) for e in self.inconclusive[:5])
        parts = [f"{self.label}: {n - len(self.failures) - len(self.inconclusive)}/{n} certified"]
        if bad:
            parts.append(f"failed at ell = {bad}")
        if unres:
            parts.append(f"unresolved at ell = {unres}")
        return "; ".join(parts)


def _chunk_ranges(lo: int, hi: int, pieces: int) -> list[tuple[int, int]]:
    span = hi - lo + 1
    pieces = max(1, min(pieces, span))
    step = -(-span // pieces)
    return [(a, min(a + step - 1, hi)) for a in range(lo, hi + 1, step)]


def _run_chunked(
    lo: int,
    hi: int,
    job: Callable[[int, int], list],
    worker_count: int = 1,
) -> list:
    if worker_count <= 1:
        return job(lo, hi)
    chunks = _chunk_ranges(lo, hi, worker_count * 8)
    with ThreadPoolExecutor(max_workers=worker_count) as pool:
        parts = list(pool.map(lambda c: job(*c), chunks))
    return [entry for part in parts for entry in part]


def _bound_envelope(kind: BoundKind, ell: int, bits: int) -> Enclosure:
    """Rational interval certified to contain bound(kind, ell)."""
    e_enc = enclose_e(bits)
    if kind is BoundKind.SHARP:
        f_enc = enclose_exp(sharp_exponent(ell), bits)
        return Enclosure(f_enc.lo / e_enc.hi, f_enc.hi / e_enc.lo)
    f = bound_factor(kind, ell).exact()
    return Enclosure(f / e_enc.hi, f / e_enc.lo)


def _phi_vs_bound(
    value: Fraction, kind: BoundKind, ell: int, policy: RefinementPolicy
) -> SweepEntry:
    # Same disjointness semantics as cmp_certified, but the bound is turned
    # into a rational envelope once per rung, which keeps sweeps over 10^4
    # values of ell cheap.
    for bits in policy.ladder():
        env = _bound_envelope(kind, ell, bits)
        if value < env.lo:
            return SweepEntry(ell, Verdict.LESS, bits, True)
        if value > env.hi:
            return SweepEntry(ell, Verdict.GREATER, bits, False)
    return SweepEntry(ell, Verdict.UNRESOLVED, policy.cap_bits, False)


def verify_bounds(
    kinds: Sequence[BoundKind],
    lo: int,
    hi: int,
    policy: RefinementPolicy = DEFAULT_POLICY,
    worker_count: int = 1,
) -> dict[BoundKind, SweepReport]:
    """Certify phi(ell) <= bound(kind, ell) for each kind over [lo, hi].

    One pass computes each phi(ell) once and feeds it to every kind whose
    domain covers that ell, so sweeping several kinds costs little more than
    sweeping one.  Entries are sorted by ell regardless of worker count.
    """
    _check_ell(lo)
    if hi < lo:
        raise ValueError(f"empty range [{lo}, {hi}]")
    kinds = list(kinds)

    def job(a: int, b: int) -> list[tuple[BoundKind, SweepEntry]]:
        out = []
        for ell in range(a, b + 1):
            value = phi(ell)
            for kind in kinds:
                if ell < kind.min_ell:
                    continue
                out.append((kind, _phi_vs_bound(value, kind, ell, policy)))
        return out

    tagged = _run_chunked(lo, hi, job, worker_count)
    return {
        kind: SweepReport(
            label=f"phi <= {kind.value} on [{max(lo, kind.min_ell)}, {hi}]",
            entries=tuple(e for k, e in tagged if k is kind),
        )
        for kind in kinds
    }


def verify_bound(
    kind: BoundKind,
    lo: int,
    hi: int,
    policy: RefinementPolicy = DEFAULT_POLICY,
    worker_count: int = 1,
) -> SweepReport:
    """Certify phi(ell) <= bound(kind, ell) for every ell in [lo, hi]."""
    _check_ell(lo)
    if lo < kind.min_ell:
        raise ValueError(f"{kind.value} bound needs ell >= {kind.min_ell}")
    return verify_bounds([kind], lo, hi, policy, worker_count)[kind]


_ORDER_CHAIN = (
    (BoundKind.SHARP, BoundKind.POLYA_SZEGO),
    (BoundKind.POLYA_SZEGO, BoundKind.LOOSE_RECIP),
    (BoundKind.LOOSE_RECIP, BoundKind.LOOSE_LINEAR),
)


def verify_bound_ordering(
    lo: int,
    hi: int,
    policy: RefinementPolicy = DEFAULT_POLICY,
    worker_count: int = 1,
) -> dict[str, SweepReport]:
    """Certify sharp <= polya-szego <= loose-recip <= loose-linear on [lo, hi].

    Requires lo >= 2.  The links compare e-scaled factors (e > 0, so the
    order is unchanged); all but the sharp link are then exact rational
    comparisons, and the recip/linear link holds with equality at ell = 2.
    The chain genuinely breaks at ell = 1, where sharp exceeds polya-szego;
    see ordering_exception_at_one.
    """
    if lo < 2:
        raise ValueError("ordering sweep needs lo >= 2; ell = 1 is the exception")
    if hi < lo:
        raise ValueError(f"empty range [{lo}, {hi}]")

    def job(a: int, b: int) -> list[tuple[str, SweepEntry]]:
        out = []
        for ell in range(a, b + 1):
            for small, large in _ORDER_CHAIN:
                cmp = cmp_certified(
                    bound_factor(small, ell), bound_factor(large, ell), policy
                )
                ok = cmp.verdict in (Verdict.LESS, Verdict.EQUAL)
                key = f"{small.value} <= {large.value}"
                out.append((key, SweepEntry(ell, cmp.verdict, cmp.bits_used, ok)))
        return out

    tagged = _run_chunked(lo, hi, job, worker_count)
    keys = [f"{s.value} <= {l.value}" for s, l in _ORDER_CHAIN]
    return {
        key: SweepReport(
            label=f"{key} on [{lo}, {hi}]",
            entries=tuple(e for k, e in tagged if k == key),
        )
        for key in keys
    }


def ordering_exception_at_one(policy: RefinementPolicy = DEFAULT_POLICY) -> Comparison:
    """The documented ell = 1 crossover: exp(5/12) > 3/2, i.e. sharp > PS."""
    return cmp_certified(
        bound_factor(BoundKind.SHARP, 1), bound_factor(BoundKind.POLYA_SZEGO, 1), policy
    )


# ---------------------------------------------------------------------------
# logarithm inequalities


@dataclass(frozen=True)
class LogCheck:
    name: str
    argument: Fraction
    verdict: Verdict
    bits_used: int

    @property
    def holds(self) -> bool:
        return self.verdict in (Verdict.LESS, Verdict.EQUAL)


def _log_check(
    name: str, arg, lhs: Fraction, policy: RefinementPolicy
) -> LogCheck:
    arg = Fraction(arg)
    if arg < 0:
        raise ValueError(f"{name} requires a nonnegative argument")
    cmp = cmp_certified(const(lhs), log1p_of(arg), policy)
    return LogCheck(name, arg, cmp.verdict, cmp.bits_used)


def check_log_weak(s, policy: RefinementPolicy = DEFAULT_POLICY) -> LogCheck:
    """s/(1+s) <= log(1+s), with equality exactly at s = 0."""
    s = Fraction(s)
    return _log_check("log_weak", s, s / (1 + s), policy)


def check_log_pade(x, policy: RefinementPolicy = DEFAULT_POLICY) -> LogCheck:
    """2x/(2+x) <= log(1+x), with equality exactly at x = 0."""
    x = Fraction(x)
    return _log_check("log_pade", x, 2 * x / (2 + x), policy)


def check_log_tail4(t, policy: RefinementPolicy = DEFAULT_POLICY) -> LogCheck:
    """t - t^2/2 + t^3/3 - t^4/4 <= log(1+t), with equality exactly at t = 0."""
    t = Fraction(t)
    poly = t - t**2 / 2 + t**3 / 3 - t**4 / 4
    return _log_check("log_tail4", t, poly, policy)


def log_tail4_slack(t, precision_bits: int = 128) -> Enclosure:
    """Enclosure of log(1+t) minus its degree-4 alternating prefix."""
    t = Fraction(t)
    poly = t - t**2 / 2 + t**3 / 3 - t**4 / 4
    return enclose_log1p(t, precision_bits).shift(-poly)


# ---------------------------------------------------------------------------
# asymptotic expansion agreement


def _expansion_prefix(ell: int) -> Fraction:
    return (
        1
        + Fraction(1, 2 * ell)
        - Fraction(5, 24 * ell**2)
        + Fraction(5, 48 * ell**3)
    )


@dataclass(frozen=True)
class ExpansionEntry:
    ell: int
    scaled: Enclosure  # ell^4 * (exp(sharp exponent) - cubic prefix)
    positive: bool
    ok: bool


@dataclass(frozen=True)
class ExpansionReport:
    envelope: Fraction
    entries: tuple[ExpansionEntry, ...]

    @property
    def all_ok(self) -> bool:
        return all(e.ok for e in self.entries)

    def summary(self) -> str:
        lines = []
        for e in self.entries:
            mid = (e.scaled.lo + e.scaled.hi) / 2
            lines.append(
                f"ell={e.ell}: ell^4 * defect in "
                f"[{float(e.scaled.lo):.9f}, {float(e.scaled.hi):.9f}]"
                f" (~{float(mid):.6f}) {'ok' if e.ok else 'EXCEEDS ENVELOPE'}"
            )
        return "\n".join(lines)


def check_expansion_agreement(
    ells: Iterable[int],
    envelope: Fraction = Fraction(1),
    precision_bits: int = 192,
) -> ExpansionReport:
    """Certify that the cubic expansion of e*sharp(ell) has an ell^-4 defect.

    For each ell the defect D(ell) = exp(sharp exponent) - (1 + 1/(2 ell)
    - 5/(24 ell^2) + 5/(48 ell^3)) is enclosed and scaled by ell^4; the entry
    passes when the scaled enclosure sits strictly inside (-envelope,
    envelope).  The envelope value 1 is an empirical choice backed by an
    independent high-precision oracle; the scaled defect in fact increases
    toward 163/1152, roughly 0.1415.
    """
    entries = []
    for ell in ells:
        ell = _check_ell(ell)
        if ell < 10:
            raise ValueError("expansion agreement is meaningful only for ell >= 10")
        defect = enclose_exp(sharp_exponent(ell), precision_bits).shift(
            -_expansion_prefix(ell)
        )
        scaled = defect.scale(ell**4)
        ok = -envelope < scaled.lo and scaled.hi < envelope
        entries.append(ExpansionEntry(ell, scaled, positive=scaled.lo > 0, ok=ok))
    return ExpansionReport(Fraction(envelope), tuple(entries))


# ---------------------------------------------------------------------------
# global shape of phi: strict decrease and the 1/e floor


def phi_step_down_certificate(ell: int) -> bool:
    """Exact-rational proof that phi(ell+1) < phi(ell).

    Cross-multiplying the two exact powers reduces the claim to
    (1 + 1/B)^ell < (ell+2)/(ell+1) with B = ell(ell+2).  The left side is
    bounded above by its first five binomial terms plus a geometric tail
    (term ratio at most ell/B = 1/(ell+2) <= 1/3), so the whole check runs
    in small rational arithmetic regardless of ell.
    """
    ell = _check_ell(ell)
    big_b = ell * (ell + 2)
    upper = Fraction(0)
    for k in range(0, 5):
        upper += Fraction(math.comb(ell, k), big_b**k)
    upper += Fraction(3 * math.comb(ell, 5), 2 * big_b**5)
    return upper < Fraction(ell + 2, ell + 1)


def phi_strictly_decreasing(lo: int, hi: int) -> Optional[int]:
    """Certify phi(ell+1) < phi(ell) for all ell in [lo, hi].

    Returns None on success, else the first ell where the certificate did
    not close (which would disprove strict decrease or expose a bound bug).
    """
    _check_ell(lo)
    for ell in range(lo, hi + 1):
        if not phi_step_down_certificate(ell):
            return ell
    return None


def phi_above_inv_e(
    ell: int, policy: RefinementPolicy = DEFAULT_POLICY
) -> Comparison:
    """Certified comparison of phi(ell) against 1/e (expected: Greater)."""
    return cmp_certified(phi(ell), inv_e(), policy)


def phi_floor_sweep(
    lo: int,
    hi: int,
    policy: RefinementPolicy = DEFAULT_POLICY,
    worker_count: int = 1,
) -> SweepReport:
    """Certify phi(ell) > 1/e for every ell in [lo, hi].

    The reciprocal envelope [1/e_hi, 1/e_lo] is shared by the whole chunk, so
    the per-ell cost is one exact comparison.  The margin phi(ell) - 1/e is
    about 1/(2 e ell), far above 2^-32 for any ell this sweep will see, so
    the first rung almost always certifies.
    """
    _check_ell(lo)
    if hi < lo:
        raise ValueError(f"empty range [{lo}, {hi}]")

    rungs = [
        (bits, Enclosure(1 / enclose_e(bits).hi, 1 / enclose_e(bits).lo))
        for bits in policy.ladder()
    ]

    def classify(ell: int) -> SweepEntry:
        value = phi(ell)
        for bits, env in rungs:
            if value > env.hi:
                return SweepEntry(ell, Verdict.GREATER, bits, True)
            if value < env.lo:
                return SweepEntry(ell, Verdict.LESS, bits, False)
        return SweepEntry(ell, Verdict.UNRESOLVED, policy.cap_bits, False)

    def job(a: int, b: int) -> list[SweepEntry]:
        return [classify(ell) for ell in range(a, b + 1)]

    entries = _run_chunked(lo, hi, job, worker_count)
    return SweepReport(
        label=f"phi > 1/e on [{lo}, {hi}]",
        entries=tuple(entries),
    )
