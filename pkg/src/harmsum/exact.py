"""Exact search over signed reciprocal sums.

Everything here works in integer arithmetic: with den = lcm of the terms
(times the target's denominator), each signed sum sum_i s_i / b_i maps to
an integer sum_i s_i * (den // b_i), so comparisons and differences are
exact and results come back as Fractions.

Sign vectors are encoded as integers: bit i set means the (i+1)-th term is
taken with +, clear means -. Ties between equally good sign choices are
broken toward the smallest encoding, which makes every result reproducible.

`min_signed_sum` splits the terms in half and meets in the middle, so cost
is about 2^(n/2) space and time. `min_gap` and `enumerate_sums` walk all
2^n sums. Caps on n and a memory estimate guard against runaway inputs.
"""

from __future__ import annotations

import math
from bisect import bisect_left
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

import numpy as np

from .errors import CapExceeded, RangeUnreachable, ResourceLimit
from .sequences import SequenceSpec, SequenceTerms, count_up_to, generate

MINSUM_CAP = 48
MINSUM_CAP_FORCED = 60
GAP_CAP = 26
GAP_CAP_FORCED = 30
ENUM_CAP = 24
MEMORY_GIB = 8.0


def parse_exact(text: str) -> Fraction:
    """Parse '7/5', '0.25', '-3' and the like into an exact rational."""
    try:
        return Fraction(text.strip())
    except (ValueError, ZeroDivisionError) as exc:
        raise ValueError(f"cannot parse {text!r} as an exact rational") from exc


@dataclass(frozen=True)
class SignVector:
    """n signs in {-1,+1}, packed into an int (bit i set = term i+1 gets +)."""

    encoding: int
    n: int

    @property
    def signs(self) -> tuple[int, ...]:
        return tuple(1 if (self.encoding >> i) & 1 else -1 for i in range(self.n))

    def __str__(self) -> str:
        return "".join("+" if (self.encoding >> i) & 1 else "-" for i in range(self.n))


@dataclass(frozen=True)
class TritVector:
    """n coefficients in {-1,0,+1}."""

    trits: tuple[int, ...]

    @property
    def n(self) -> int:
        return len(self.trits)

    def __str__(self) -> str:
        return "".join("0" if t == 0 else ("+" if t > 0 else "-") for t in self.trits)


@dataclass(frozen=True)
class SearchResult:
    """Outcome of a minimal signed sum search.

    value = |sum_i s_i/b_i - tau| at the reported witness, and
    value == Fraction(scaled_num, den) exactly.
    """

    value: Fraction
    scaled_num: int
    den: int
    witness: SignVector
    tau: Fraction

    @property
    def n(self) -> int:
        return self.witness.n


@dataclass(frozen=True)
class GapResult:
    """Minimal |sum_i e_i/b_i| over nonzero e in {-1,0,+1}^n.

    gap == Fraction(scaled_num, den) exactly; the witness evaluates to +gap.
    A zero gap means two distinct sign assignments share a sum.
    """

    gap: Fraction
    scaled_num: int
    den: int
    witness: TritVector

    @property
    def n(self) -> int:
        return self.witness.n


@dataclass(frozen=True)
class TwoStageResult:
    """Composite-then-prime refinement: `first` approximates tau on the
    composite terms, `second` approximates the overshoot on the primes."""

    first: SearchResult
    refined_target: Fraction
    second: SearchResult

    @property
    def residual(self) -> Fraction:
        return self.second.value


@dataclass(frozen=True)
class DecayRow:
    n: int
    scaled_num: int
    den: int
    value: Fraction
    log_value: float    # ln(value), -inf when the minimum is exactly 0
    ref_log_sq: float   # -ln(n)^2 reference curve
    ref_power: float    # -n^(1/(2k+1)) reference curve


@dataclass(frozen=True)
class DecayProfile:
    """Minimal signed sums along prefixes plus a log-linear trend.

    The fit regresses ln(value) on ln(n)^2 over rows with nonzero value;
    a clearly negative slope with high r_squared indicates the minima
    shrink at least like exp(-c ln^2 n) over the computed range.
    """

    rows: tuple[DecayRow, ...]
    slope: float
    intercept: float
    r_squared: float


def _as_terms(seq) -> tuple[int, ...]:
    if isinstance(seq, SequenceTerms):
        terms = seq.terms
    else:
        terms = tuple(int(b) for b in seq)
    if not terms:
        raise ValueError("need at least one term")
    prev = 0
    for b in terms:
        if b <= prev:
            raise ValueError("terms must be strictly increasing positive integers")
        prev = b
    return terms


def evaluate_signs(seq, signs) -> Fraction:
    """sum_i signs[i] / b_i, exact."""
    terms = _as_terms(seq)
    if isinstance(signs, SignVector):
        signs = signs.signs
    elif isinstance(signs, TritVector):
        signs = signs.trits
    signs = tuple(signs)
    if len(signs) != len(terms):
        raise ValueError("sign count does not match term count")
    if any(s not in (-1, 0, 1) for s in signs):
        raise ValueError("signs must be -1, 0 or +1")
    den = math.lcm(*terms)
    num = sum(s * (den // b) for s, b in zip(signs, terms))
    return Fraction(num, den)


def _check_cap(n: int, cap: int | None, default: int, forced: int, force: bool) -> None:
    limit = cap if cap is not None else (forced if force else default)
    if n > limit:
        raise CapExceeded(f"n={n} exceeds the cap of {limit}")


def _check_memory(entries: int, den: int, memory_gib: float) -> None:
    int_bytes = 36 + den.bit_length() // 8
    est = entries * (int_bytes + 48)
    if est > memory_gib * 2**30:
        raise ResourceLimit(
            f"estimated {est / 2**30:.1f} GiB exceeds the {memory_gib} GiB budget"
        )


def _signed_half_sums(weights: Sequence[int]) -> list[int]:
    # index doubles as the sign encoding: bit j of the index is the sign of
    # weights[j], so appending the +w copies after the -w copies keeps the
    # encoding aligned as the list grows
    sums = [0]
    for w in weights:
        sums = [s - w for s in sums] + [s + w for s in sums]
    return sums


def min_signed_sum(
    seq,
    tau=0,
    *,
    cap: int | None = None,
    force: bool = False,
    memory_gib: float = MEMORY_GIB,
) -> SearchResult:
    """Minimize |sum_i s_i/b_i - tau| over all 2^n sign choices, exactly.

    Meet in the middle: the first ceil(n/2) terms and the rest are expanded
    separately and matched through binary search. Among optimal sign
    vectors the one with the smallest encoding is returned.
    """
    terms = _as_terms(seq)
    n = len(terms)
    tau = Fraction(tau)
    _check_cap(n, cap, MINSUM_CAP, MINSUM_CAP_FORCED, force)

    den = math.lcm(math.lcm(*terms), tau.denominator)
    target = tau.numerator * (den // tau.denominator)
    half = (n + 1) // 2
    _check_memory(2 ** half + 2 * 2 ** (n - half), den, memory_gib)

    a_sums = _signed_half_sums([den // b for b in terms[:half]])
    b_sums = _signed_half_sums([den // b for b in terms[half:]])

    # first occurrence keeps the smallest encoding for each distinct sum
    first: dict[int, int] = {}
    for enc, s in enumerate(b_sums):
        if s not in first:
            first[s] = enc
    b_vals = sorted(first)
    b_encs = [first[v] for v in b_vals]

    best_d = None
    best_enc = None
    last = len(b_vals) - 1
    for enc_a, sa in enumerate(a_sums):
        pos = bisect_left(b_vals, target - sa)
        for j in (pos - 1, pos):
            if j < 0 or j > last:
                continue
            d = sa + b_vals[j] - target
            if d < 0:
                d = -d
            if best_d is None or d < best_d:
                best_d = d
                best_enc = (b_encs[j] << half) | enc_a
            elif d == best_d:
                enc = (b_encs[j] << half) | enc_a
                if enc < best_enc:
                    best_enc = enc

    witness = SignVector(best_enc, n)
    value = Fraction(best_d, den)
    assert abs(evaluate_signs(terms, witness) - tau) == value
    return SearchResult(value=value, scaled_num=best_d, den=den, witness=witness, tau=tau)


def _scaled_sums(terms: tuple[int, ...], memory_gib: float) -> tuple[int, list[int]]:
    den = math.lcm(*terms)
    _check_memory(2 ** len(terms), den, memory_gib)
    return den, _signed_half_sums([den // b for b in terms])


def enumerate_sums(
    seq,
    *,
    cap: int | None = None,
    force: bool = False,
    memory_gib: float = MEMORY_GIB,
) -> tuple[int, list[tuple[int, SignVector]]]:
    """All 2^n signed sums, scaled by den = lcm(terms).

    Returns (den, rows) where rows hold (scaled sum, witness) for every
    sign vector, sorted by sum and by encoding on ties; multiplicity kept.
    """
    terms = _as_terms(seq)
    n = len(terms)
    _check_cap(n, cap, ENUM_CAP, ENUM_CAP, force)
    den, sums = _scaled_sums(terms, memory_gib)
    order = sorted(range(len(sums)), key=sums.__getitem__)
    return den, [(sums[enc], SignVector(enc, n)) for enc in order]


def min_gap(
    seq,
    *,
    cap: int | None = None,
    force: bool = False,
    memory_gib: float = MEMORY_GIB,
) -> GapResult:
    """Smallest |sum_i e_i/b_i| over nonzero e in {-1,0,+1}^n.

    Every such e is half the difference of two sign vectors, so the answer
    is half the smallest distance between two of the 2^n signed sums; a
    stable sort keeps the reported witness deterministic.
    """
    terms = _as_terms(seq)
    n = len(terms)
    _check_cap(n, cap, GAP_CAP, GAP_CAP_FORCED, force)
    den, sums = _scaled_sums(terms, memory_gib)
    order = sorted(range(len(sums)), key=sums.__getitem__)
    best_d = None
    best_pair = None
    for j in range(len(order) - 1):
        lo, hi = order[j], order[j + 1]
        d = sums[hi] - sums[lo]
        if best_d is None or d < best_d:
            best_d = d
            best_pair = (lo, hi)

    lo, hi = best_pair
    trits = tuple(((hi >> i) & 1) - ((lo >> i) & 1) for i in range(n))
    witness = TritVector(trits)
    # sign-vector differences are twice a trit vector, so d is always even
    assert best_d % 2 == 0
    gap = Fraction(best_d // 2, den)
    assert evaluate_signs(terms, witness) == gap
    return GapResult(gap=gap, scaled_num=best_d // 2, den=den, witness=witness)


def two_stage_approx(
    composite_seq,
    prime_seq,
    tau=0,
    *,
    cap: int | None = None,
    force: bool = False,
    memory_gib: float = MEMORY_GIB,
) -> TwoStageResult:
    """Approximate tau on the composite terms, then chase the overshoot on
    the primes: the second stage targets (first stage sum) - tau.

    The final approximation is sum s/c - sum o/p with first-stage signs s
    and second-stage signs o, and |that - tau| = residual = second.value.
    Requires |tau| <= sum 1/c so the first stage can bracket the target;
    the refined target then always lands in [-1, 1].
    """
    comp = _as_terms(composite_seq)
    tau = Fraction(tau)
    reach = sum(Fraction(1, c) for c in comp)
    if abs(tau) > reach:
        raise RangeUnreachable(
            f"|tau| = {abs(tau)} exceeds the first-stage range {reach}"
        )
    first = min_signed_sum(comp, tau, cap=cap, force=force, memory_gib=memory_gib)
    achieved = evaluate_signs(comp, first.witness)
    refined = achieved - tau
    assert abs(refined) <= 1
    primes = tuple(prime_seq.terms if isinstance(prime_seq, SequenceTerms) else prime_seq)
    if primes:
        second = min_signed_sum(
            primes, refined, cap=cap, force=force, memory_gib=memory_gib
        )
    else:
        # no second stage available; the residual is the refined target itself
        second = SearchResult(
            value=abs(refined),
            scaled_num=abs(refined.numerator),
            den=refined.denominator,
            witness=SignVector(0, 0),
            tau=refined,
        )
    return TwoStageResult(first=first, refined_target=refined, second=second)


def two_stage_for_n(
    n: int,
    tau=0,
    *,
    cap: int | None = None,
    force: bool = False,
    memory_gib: float = MEMORY_GIB,
) -> TwoStageResult:
    """Two-stage approximation over {1..n}: the n - pi(n) nonprime terms
    carry the first stage, the pi(n) primes the second."""
    if n < 1:
        raise ValueError("n must be >= 1")
    n_primes = count_up_to(SequenceSpec.primes(), n)
    comp = generate(SequenceSpec.nonprimes(), n - n_primes)
    primes = (
        generate(SequenceSpec.primes(), n_primes) if n_primes else SequenceTerms(SequenceSpec.primes(), ())
    )
    return two_stage_approx(comp, primes, tau, cap=cap, force=force, memory_gib=memory_gib)


def decay_profile(
    seq,
    ns: Iterable[int] | None = None,
    tau=0,
    *,
    k: int | None = None,
    cap: int | None = None,
    force: bool = False,
    memory_gib: float = MEMORY_GIB,
) -> DecayProfile:
    """Minimal signed sums along prefixes, with reference decay curves.

    Each row carries ln(value) next to -ln(n)^2 and -n^(1/(2k+1)) for
    plotting; k defaults to the sequence's prime-factor count when the
    input carries one, else 1. No asymptotic claim is made, the profile
    just reports the finite-range trend.
    """
    if k is None:
        k = getattr(getattr(seq, "spec", None), "k", None) or 1
    terms = _as_terms(seq)
    if ns is None:
        ns = range(1, len(terms) + 1)
    ns = tuple(int(m) for m in ns)
    if any(m < 1 or m > len(terms) for m in ns):
        raise ValueError("prefix lengths out of range")
    rows = []
    for m in ns:
        res = min_signed_sum(terms[:m], tau, cap=cap, force=force, memory_gib=memory_gib)
        rows.append(
            DecayRow(
                n=m,
                scaled_num=res.scaled_num,
                den=res.den,
                value=res.value,
                log_value=math.log(res.value) if res.value > 0 else float("-inf"),
                ref_log_sq=-math.log(m) ** 2,
                ref_power=-float(m) ** (1.0 / (2 * k + 1)),
            )
        )
    xs = [math.log(r.n) ** 2 for r in rows if r.value > 0]
    ys = [r.log_value for r in rows if r.value > 0]
    if len(xs) < 2:
        raise ValueError("need at least two nonzero values to fit a trend")
    slope, intercept = np.polyfit(xs, ys, 1)
    fitted = np.polyval([slope, intercept], xs)
    ss_res = float(np.sum((np.array(ys) - fitted) ** 2))
    ss_tot = float(np.sum((np.array(ys) - np.mean(ys)) ** 2))
    r2 = 1.0 if ss_tot == 0 else 1.0 - ss_res / ss_tot
    return DecayProfile(
        rows=tuple(rows), slope=float(slope), intercept=float(intercept), r_squared=r2
    )
