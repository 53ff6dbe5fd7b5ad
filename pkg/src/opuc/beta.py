"""Polynomial approximation distances in L2(T, mu) and their explicit bounds.

The central quantity is

    beta(k, n) = min over polynomials pi of degree <= n of || z^{-k} - pi ||,

computed through the orthonormal-polynomial projection formula

    beta(k, n)^2 = 1 - sum_{j<=n} |<z^{-k}, phi_j>|^2,
    <z^{-k}, z^i> = conj(m_{k+i}),

which degrades gracefully under the exponential ill-conditioning of
non-Szego moment systems.  A direct Hermitian Gram solve over an arbitrary
finite exponent set (`gap_distance`) is kept as an independent cross-check
path; the two mechanisms must agree on shifted contiguous blocks because
multiplication by a monomial is an isometry of L2(T, mu).

Key exact identity used as the engine's primary oracle:

    beta(1, n) = ||Phi_{n+1}||  =  prod_{i=0}^{n} (1 - |alpha_i|^2) ^ (1/2).

Tolerance policy: every public entry point reports a solver residual; when
it exceeds 2^-(precision/4), the computation retries at doubled precision
up to ``ceiling`` and then fails loudly instead of returning garbage.
"""

from __future__ import annotations

from bisect import bisect_left
from dataclasses import dataclass
from math import ceil
from typing import Callable, Optional, Sequence

from mpmath import conj, fabs, mp, mpc, mpf

from .exceptions import DegeneracyError, DomainError, PrecisionError
from .markoff import measure_moments
from .measures import MeasureSpec, MomentSequence
from .polynomials import MonicPolynomial, gram_inner, monic_ladder, monic_norm_sq, szego_step
from .precision import (
    DEFAULT_PRECISION,
    PRECISION_CEILING,
    negativity_tolerance,
    residual_threshold,
    to_mpc,
    workprec,
)

__all__ = [
    "BetaResult",
    "BetaEngine",
    "beta",
    "gap_distance",
    "beta_bound_from_coefficients",
    "beta_bound_closed_form",
    "find_min_degree",
    "beta_approximating_check",
    "ApproxRow",
    "ApproxFunctionReport",
]


@dataclass(frozen=True)
class BetaResult:
    """One computed approximation distance.

    ``residual`` is the engine's health metric: the relative defect between
    the Gram-form norm of the top orthonormal polynomial and its exact
    product-form norm (the quantity that blows up first when precision is
    exhausted).  ``rank_deficient`` marks distances that are exactly zero
    because the measure's L2 space is finite dimensional.
    """

    k: int
    n: int
    value: mpf
    precision: int
    residual: mpf
    rank_deficient: bool = False


class BetaEngine:
    """Shared-state evaluator for one measure at one working precision.

    Caches moments, the orthogonal-polynomial ladder and per-exponent
    projection prefix sums, so sweeping a (k, n) grid costs little more
    than the largest single query.  Instances are cheap to build and not
    thread-safe; use one per thread.
    """

    def __init__(self, measure: MeasureSpec, prec: int = DEFAULT_PRECISION):
        self.measure = measure
        self.prec = prec
        self._moments: Optional[MomentSequence] = None
        self._ladder = [MonicPolynomial.one()]
        self._proj = {}        # k -> prefix sums of squared projections
        self._residuals = {0: mpf(0)}
        self._ladder_cap: Optional[int] = None  # highest buildable degree, if finite

    # -- cache maintenance -------------------------------------------------

    def moments(self, order: int) -> MomentSequence:
        if self._moments is None or self._moments.order < order:
            grow = max(order, 2 * (self._moments.order if self._moments else 8))
            self._moments = measure_moments(self.measure, grow, self.prec)
        return self._moments

    def ladder(self, n: int) -> list:
        """Phi_0 .. Phi_n, extended by the reflection pass on cached moments."""
        cap = self._ladder_cap
        if cap is not None and n > cap:
            raise DegeneracyError(cap + 1)
        if len(self._ladder) > n:
            return self._ladder
        moments = self.moments(max(n, 2 * len(self._ladder)))
        with workprec(self.prec):
            threshold = negativity_tolerance(self.prec)
            while len(self._ladder) <= n:
                phi = self._ladder[-1]
                j = phi.degree
                if self._moments.order < j + 1:
                    moments = self.moments(j + 1)
                inner = mp.fsum(
                    to_mpc(phi.coefficients[i]) * moments.moment(i + 1) for i in range(j + 1)
                )
                a = conj(inner) / phi.norm_sq
                if not (1 - (a.real * a.real + a.imag * a.imag)) > threshold:
                    rank = self.measure.rank
                    if rank is not None and j + 1 == rank:
                        self._ladder_cap = rank - 1
                        raise DegeneracyError(rank)
                    raise PrecisionError(
                        j + 1, f"reflection coefficient left the disk at step {j + 1}"
                    )
                self._ladder.append(szego_step(phi, a))
        return self._ladder

    def _projection_prefix(self, k: int, n: int) -> list:
        """Prefix sums  cum[j] = sum_{j'<=j} |<z^{-k}, phi_{j'}>|^2  for j <= n."""
        ladder = self.ladder(n)
        moments = self.moments(k + n)
        cum = self._proj.setdefault(k, [])
        with workprec(self.prec):
            while len(cum) <= n:
                j = len(cum)
                phi = ladder[j]
                inner = mp.fsum(
                    to_mpc(phi.coefficients[i]) * moments.moment(k + i) for i in range(j + 1)
                )
                term = (inner.real * inner.real + inner.imag * inner.imag) / phi.norm_sq
                cum.append((cum[-1] if cum else mpf(0)) + term)
        return cum

    def residual_at(self, n: int) -> mpf:
        """Relative defect |<Phi_n, Phi_n>_moments - prod form| / prod form."""
        if n not in self._residuals:
            ladder = self.ladder(n)
            moments = self.moments(n)
            with workprec(self.prec):
                gram = gram_inner(
                    ladder[n].coefficients, ladder[n].coefficients, moments.moment, self.prec
                )
                self._residuals[n] = fabs(gram - ladder[n].norm_sq) / ladder[n].norm_sq
        return self._residuals[n]

    # -- distances -----------------------------------------------------------

    def beta(self, k: int, n: int) -> BetaResult:
        """beta(k, n) via the orthonormal projection formula."""
        if k < 0 or n < 0:
            raise DomainError("beta needs k >= 0 and n >= 0")
        if k == 0:
            return BetaResult(k, n, mpf(0), self.prec, mpf(0))
        rank = self.measure.rank
        if rank is not None and n >= rank:
            # L2(mu) has dimension rank; polynomials of degree <= n already
            # span everything, so the minimum is attained at zero distance.
            return BetaResult(k, n, mpf(0), self.prec, mpf(0), rank_deficient=True)
        cum = self._projection_prefix(k, n)
        with workprec(self.prec):
            beta_sq = 1 - cum[n]
            if beta_sq < -negativity_tolerance(self.prec):
                raise PrecisionError((k, n), f"computed beta^2 = {beta_sq} is negative")
            value = mp.sqrt(beta_sq) if beta_sq > 0 else mpf(0)
        return BetaResult(k, n, value, self.prec, self.residual_at(n))

    def gap_distance(self, target: int, exponents) -> tuple:
        """Distance of z^target to span{z^s : s in S} for a finite S.

        Solved through the Hermitian Gram system (semidefinite-tolerant
        LDL* factorization), independently of the projection formula.
        Returns ``(value, residual)``.
        """
        exps = _exponent_list(exponents)
        if target < 0:
            raise DomainError("target exponent must be nonnegative")
        if target in exps:
            return mpf(0), mpf(0)
        moments = self.moments(max(exps) + target)
        with workprec(self.prec):
            gram = [[moments.moment(sj - si) for sj in exps] for si in exps]
            rhs = [moments.moment(target - si) for si in exps]
            coeffs, residual = _ldl_solve(gram, rhs, negativity_tolerance(self.prec))
            proj_sq = mp.fsum(conj(c) * v for c, v in zip(coeffs, rhs)).real
            dist_sq = 1 - proj_sq
            if dist_sq < -negativity_tolerance(self.prec):
                raise PrecisionError(target, f"computed distance^2 = {dist_sq} is negative")
            value = mp.sqrt(dist_sq) if dist_sq > 0 else mpf(0)
        return value, residual

    # -- explicit upper bounds ------------------------------------------------

    def bound_from_coefficients(self, k: int, n: int) -> mpf:
        """Upper bound for beta(k, n) built from the reversed-coefficient
        moduli of Phi_{n+1}; see `beta_bound_from_coefficients`."""
        ladder = self.ladder(n + 1)
        return _coefficient_bound(ladder[n + 1], k, n, self.prec)

    def bound_closed_form(self, k: int, n: int) -> mpf:
        """||Phi_{n+1}|| * (2n+2)^(k-1), the coarse closed-form bound."""
        ladder = self.ladder(n + 1)
        with workprec(self.prec):
            return mp.sqrt(ladder[n + 1].norm_sq) * mpf(2 * n + 2) ** (k - 1)


# ---------------------------------------------------------------------------
# module-level operations (escalating wrappers)
# ---------------------------------------------------------------------------

def beta(
    measure: MeasureSpec,
    k: int,
    n: int,
    prec: int = DEFAULT_PRECISION,
    ceiling: int = PRECISION_CEILING,
) -> BetaResult:
    """beta(k, n) for a measure, escalating precision until the solver
    residual clears the 2^-(precision/4) threshold."""
    def attempt(bits):
        result = BetaEngine(measure, bits).beta(k, n)
        return result, result.residual

    return _escalate(attempt, prec, ceiling, f"beta({k}, {n})")


def gap_distance(
    measure: MeasureSpec,
    target: int,
    exponents,
    prec: int = DEFAULT_PRECISION,
    ceiling: int = PRECISION_CEILING,
) -> mpf:
    """Distance of z^target to the span of a finite exponent section.

    Equals 0 when the target lies in the set; never increases as the set
    grows.  Shares the escalation policy of `beta`.
    """
    def attempt(bits):
        value, residual = BetaEngine(measure, bits).gap_distance(target, exponents)
        return value, residual

    return _escalate(attempt, prec, ceiling, f"gap_distance({target})")


def beta_bound_from_coefficients(alphas, k: int, n: int, prec: int = DEFAULT_PRECISION) -> mpf:
    """Upper bound for beta(k, n):

        ||Phi_{n+1}|| * (1 + sum over tuples (j_1..j_i) in [1, n+1]^i,
                          j_1+..+j_i <= k-1, of prod |b_{n+1, n+1-j_s}|).

    The bracket is evaluated by a knapsack-style dynamic program over the
    budget t <= k-1 (F(t) sums the tuple products with total exactly t), so
    the cost is O(k * min(k, n)) instead of enumerating tuples.
    """
    if k < 1 or n < 1:
        raise DomainError("coefficient bound needs k >= 1 and n >= 1")
    phi = monic_ladder(alphas, n + 1, prec)[n + 1]
    return _coefficient_bound(phi, k, n, prec)


def beta_bound_closed_form(alphas, k: int, n: int, prec: int = DEFAULT_PRECISION) -> mpf:
    """The coarse closed-form bound  ||Phi_{n+1}|| * (2n+2)^(k-1)."""
    if k < 1 or n < 1:
        raise DomainError("closed-form bound needs k >= 1 and n >= 1")
    with workprec(prec):
        return mp.sqrt(monic_norm_sq(alphas, n + 1, prec)) * mpf(2 * n + 2) ** (k - 1)


def find_min_degree(
    measure: MeasureSpec,
    k: int,
    tol,
    n_max: int,
    prec: int = DEFAULT_PRECISION,
) -> Optional[int]:
    """Smallest n with beta(k, n) <= tol, or None when n_max is exhausted.

    Binary search over the monotone projection prefix; plateaus resolve to
    the smallest qualifying degree.  A None return is the expected outcome
    for Szego-class measures once tol drops below their norm-product floor.
    """
    tol = mpf(tol)
    if tol <= 0:
        raise DomainError("tolerance must be positive")
    if k == 0:
        return 0
    engine = BetaEngine(measure, prec)
    rank = measure.rank
    top = n_max if rank is None else min(n_max, rank - 1)
    cum = engine._projection_prefix(k, top)
    with workprec(prec):
        # cum is nondecreasing; the first prefix sum >= 1 - tol^2 is the
        # smallest degree with beta <= tol.
        idx = bisect_left(cum, 1 - tol * tol, 0, top + 1)
    if idx <= top:
        return idx
    if rank is not None and rank <= n_max:
        return rank  # distances are exactly zero from the rank onward
    return None


@dataclass(frozen=True)
class ApproxRow:
    k: int
    degree: int
    value: Optional[mpf]
    error: Optional[str] = None


@dataclass(frozen=True)
class ApproxFunctionReport:
    """Empirical table of beta(k, f(k)) along a degree-allocation function f.

    ``verdict`` is True when every row in the top quartile of the k-range
    computed cleanly and landed at or below the threshold -- finite
    evidence for (not proof of) a vanishing tail.
    """

    rows: tuple
    threshold: mpf
    verdict: bool
    betas_nonincreasing: bool


def beta_approximating_check(
    measure: MeasureSpec,
    f: Callable[[int], int],
    k_range: Sequence[int],
    threshold,
    prec: int = DEFAULT_PRECISION,
) -> ApproxFunctionReport:
    """Evaluate beta(k, f(k)) over a finite k-range for a strictly
    increasing degree allocation f.

    Precision failures are annotated per row and disqualify the verdict
    when they hit the top quartile.
    """
    ks = list(k_range)
    if not ks:
        raise DomainError("empty k range")
    if any(k2 <= k1 for k1, k2 in zip(ks, ks[1:])):
        raise DomainError("k range must be strictly increasing")
    degrees = [int(f(k)) for k in ks]
    if any(d2 <= d1 for d1, d2 in zip(degrees, degrees[1:])):
        raise DomainError("degree allocation must be strictly increasing on the range")
    engine = BetaEngine(measure, prec)
    rows = []
    for k, d in zip(ks, degrees):
        try:
            rows.append(ApproxRow(k, d, engine.beta(k, d).value))
        except PrecisionError as exc:
            rows.append(ApproxRow(k, d, None, error=str(exc)))
    threshold = mpf(threshold)
    quartile = rows[-max(1, ceil(len(rows) / 4)):]
    verdict = all(r.error is None and r.value <= threshold for r in quartile)
    computed = [r.value for r in rows if r.error is None]
    nonincreasing = all(b <= a for a, b in zip(computed, computed[1:]))
    return ApproxFunctionReport(tuple(rows), threshold, verdict, nonincreasing)


# ---------------------------------------------------------------------------
# internals
# ---------------------------------------------------------------------------

def _coefficient_bound(phi_top: MonicPolynomial, k: int, n: int, prec: int) -> mpf:
    if k < 1 or n < 1:
        raise DomainError("coefficient bound needs k >= 1 and n >= 1")
    with workprec(prec):
        b = phi_top.coefficients
        mods = [fabs(b[n + 1 - j]) for j in range(1, min(n + 1, k - 1) + 1)]
        table = [mpf(1)]
        for t in range(1, k):
            table.append(mp.fsum(mods[j - 1] * table[t - j] for j in range(1, min(len(mods), t) + 1)))
        bracket = mp.fsum(table)
        return mp.sqrt(phi_top.norm_sq) * bracket


def _ldl_solve(gram, rhs, skip_tol):
    """Solve the Hermitian PSD system G c = v by LDL* with pivot skipping.

    Pivots at or below ``skip_tol`` times the largest diagonal are treated
    as exact rank deficiencies (their coordinate is frozen at zero), which
    is the attained-minimum convention for measures of finite rank.  The
    returned residual is ||G c - v||_2 / max(1, ||v||_2).
    """
    size = len(gram)
    scale = max(g[i].real for i, g in enumerate(gram)) or mpf(1)
    lower = [[mpc(0)] * size for _ in range(size)]
    diag = [mpf(0)] * size
    active = [False] * size
    for j in range(size):
        d = gram[j][j].real - mp.fsum(
            (lower[j][t].real ** 2 + lower[j][t].imag ** 2) * diag[t]
            for t in range(j)
            if active[t]
        )
        if d <= skip_tol * scale:
            continue
        active[j] = True
        diag[j] = d
        for i in range(j + 1, size):
            s = gram[i][j] - mp.fsum(
                lower[i][t] * conj(lower[j][t]) * diag[t] for t in range(j) if active[t]
            )
            lower[i][j] = s / d
    # forward substitution: y = L^-1 v  (unit lower triangular on active set)
    y = [mpc(0)] * size
    for i in range(size):
        y[i] = rhs[i] - mp.fsum(lower[i][t] * y[t] for t in range(i) if active[t])
    z = [y[i] / diag[i] if active[i] else mpc(0) for i in range(size)]
    # back substitution: c = L^-H z
    c = [mpc(0)] * size
    for i in range(size - 1, -1, -1):
        if not active[i]:
            continue
        c[i] = z[i] - mp.fsum(conj(lower[t][i]) * c[t] for t in range(i + 1, size) if active[t])
    defect = [
        mp.fsum(gram[i][j] * c[j] for j in range(size)) - rhs[i] for i in range(size)
    ]
    res_norm = mp.sqrt(mp.fsum(d.real * d.real + d.imag * d.imag for d in defect))
    rhs_norm = mp.sqrt(mp.fsum(v.real * v.real + v.imag * v.imag for v in rhs))
    return c, res_norm / max(mpf(1), rhs_norm)


def _exponent_list(exponents):
    members = getattr(exponents, "members", None)
    exps = sorted(set(members() if callable(members) else exponents))
    if not exps:
        raise DomainError("exponent set must be nonempty")
    if exps[0] < 0:
        raise DomainError("exponents must be nonnegative")
    if len(exps) > 2048:
        raise DomainError(f"{len(exps)} exponents is too large for a dense Gram solve")
    return exps


def _escalate(attempt, prec, ceiling, what):
    bits = prec
    while True:
        failure = None
        try:
            result, residual = attempt(bits)
            if residual <= residual_threshold(bits):
                return result
            failure = f"residual {residual} above threshold at {bits} bits"
        except PrecisionError as exc:
            failure = str(exc)
        if bits >= ceiling:
            raise PrecisionError(what, f"{what}: {failure}; precision ceiling {ceiling} reached")
        bits = min(2 * bits, ceiling)
