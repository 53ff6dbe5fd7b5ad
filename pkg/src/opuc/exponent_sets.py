"""Integer exponent sets as disjoint blocks, with density diagnostics.

An exponent set is a finite union of integer blocks [[a, b]] kept in a
normalized form (sorted, pairwise separated by at least one missing
integer).  Counting against [[1, N]] is pure interval arithmetic, so
density checkpoints are exact rationals even for astronomically large
blocks.

The constructions below produce the block layouts used when testing how
sparse an exponent set can be while the corresponding exponential system
stays dense in L2(T, mu):

* `vanishing_density_blocks` -- starts grow so fast that the prefix
  density at the checkpoint before each new block is at most 1/j.
* `power_law_blocks` -- block lengths floor(k_j^s) for s > 1.
* `loglinear_blocks`  -- block lengths floor(t * C * log(k_j) * k_j) with
  C = -ell / log(1 - eps^2), the allocation adapted to measures whose
  coefficient windows of length ell carry a modulus >= eps.
* `double_exp_gap_complement` -- a complement-of-gaps layout where the
  excluded blocks start at floor(e^(t^j)) and still leave room for a
  power-law family.
* `cofinite_blocks` -- contiguous tiling of everything above a finite
  excluded set.

Every "choose the next start at least X" step takes the minimal admissible
integer, which makes the constructions deterministic and as adversarially
dense as the recursions allow.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Iterable, Optional, Sequence, Tuple

from mpmath import mp, mpf

from .exceptions import DomainError, RangeOverflowError
from .precision import DEFAULT_PRECISION, PRECISION_CEILING, to_mpf, workprec

__all__ = [
    "ExponentSet",
    "DensityReport",
    "union_of_blocks",
    "vanishing_density_blocks",
    "power_law_blocks",
    "loglinear_blocks",
    "double_exp_gap_complement",
    "cofinite_blocks",
    "density_report",
    "divergence_margins",
    "exact_floor_power",
]


@dataclass(frozen=True)
class ExponentSet:
    """A normalized finite union of integer blocks [[a, b]], a <= b.

    ``provenance`` records which construction produced the set; ``params``
    keeps the construction data (including start/length sequences) so
    downstream audits can recompute every claimed inequality.
    """

    intervals: Tuple[Tuple[int, int], ...]
    provenance: str = ""
    params: dict = field(default_factory=dict)

    @classmethod
    def from_intervals(cls, intervals, provenance: str = "", params: Optional[dict] = None) -> "ExponentSet":
        """Normalize arbitrary (possibly overlapping) blocks."""
        cleaned = []
        for a, b in intervals:
            a, b = int(a), int(b)
            if a > b:
                raise DomainError(f"block [{a}, {b}] is empty")
            if a < 0:
                raise DomainError("exponents must be nonnegative")
            cleaned.append((a, b))
        cleaned.sort()
        merged = []
        for a, b in cleaned:
            if merged and a <= merged[-1][1] + 1:
                merged[-1] = (merged[-1][0], max(merged[-1][1], b))
            else:
                merged.append((a, b))
        return cls(tuple(merged), provenance, dict(params or {}))

    def __contains__(self, x: int) -> bool:
        return any(a <= x <= b for a, b in self.intervals)

    def __bool__(self) -> bool:
        return bool(self.intervals)

    @property
    def cardinality(self) -> int:
        return sum(b - a + 1 for a, b in self.intervals)

    @property
    def max_value(self) -> Optional[int]:
        return self.intervals[-1][1] if self.intervals else None

    @property
    def min_value(self) -> Optional[int]:
        return self.intervals[0][0] if self.intervals else None

    def count_in(self, lo: int, hi: int) -> int:
        """|set intersect [[lo, hi]]| by pure interval arithmetic."""
        if hi < lo:
            return 0
        total = 0
        for a, b in self.intervals:
            total += max(0, min(b, hi) - max(a, lo) + 1)
        return total

    def members(self, limit: int = 1_000_000):
        """Iterate the elements in increasing order (guarded against
        accidentally materializing an astronomically large set)."""
        if self.cardinality > limit:
            raise DomainError(f"set has {self.cardinality} members, above the iteration guard {limit}")
        for a, b in self.intervals:
            yield from range(a, b + 1)

    def restrict(self, lo: int, hi: int) -> "ExponentSet":
        """The set intersected with [[lo, hi]]."""
        kept = []
        for a, b in self.intervals:
            a2, b2 = max(a, lo), min(b, hi)
            if a2 <= b2:
                kept.append((a2, b2))
        return ExponentSet(tuple(kept), self.provenance, dict(self.params))

    def intersection(self, other: "ExponentSet") -> "ExponentSet":
        out = []
        for a, b in self.intervals:
            for c, d in other.intervals:
                lo, hi = max(a, c), min(b, d)
                if lo <= hi:
                    out.append((lo, hi))
        return ExponentSet.from_intervals(out)

    def union(self, other: "ExponentSet") -> "ExponentSet":
        return ExponentSet.from_intervals(self.intervals + other.intervals)

    def is_disjoint_from(self, other: "ExponentSet") -> bool:
        return not self.intersection(other).intervals

    def to_payload(self) -> dict:
        return {
            "intervals": [[a, b] for a, b in self.intervals],
            "provenance": self.provenance,
            "params": _plain(self.params),
        }


@dataclass(frozen=True)
class DensityReport:
    """Counting ratios |set intersect [[1, N]]| / N at chosen checkpoints.

    ``checkpoints`` holds (N, count, ratio); counts are exact integers so
    rational comparisons (count/N <= 1/j) can be made without rounding.
    """

    checkpoints: Tuple[Tuple[int, int, float], ...]
    lower_estimate: float
    upper_estimate: float


def union_of_blocks(starts: Sequence[int], lengths: Sequence[int], count: Optional[int] = None) -> ExponentSet:
    """The union of blocks [[k_j, k_j + l_j]] for the first ``count`` pairs.

    Starts must be strictly increasing positive integers, lengths
    nonnegative; overlapping blocks are legal and get merged.
    """
    if count is None:
        count = min(len(starts), len(lengths))
    ks = [int(k) for k in starts[:count]]
    ls = [int(l) for l in lengths[:count]]
    if len(ks) != len(ls) or not ks:
        raise DomainError("need matching nonempty start and length sequences")
    if any(k2 <= k1 for k1, k2 in zip(ks, ks[1:])):
        raise DomainError("block starts must be strictly increasing")
    if ks[0] < 1:
        raise DomainError("block starts must be positive")
    if any(l < 0 for l in ls):
        raise DomainError("block lengths must be nonnegative")
    return ExponentSet.from_intervals(
        [(k, k + l) for k, l in zip(ks, ls)],
        provenance="union_of_blocks",
        params={"starts": tuple(ks), "lengths": tuple(ls)},
    )


def vanishing_density_blocks(f: Callable[[int], int], count: int) -> Tuple[tuple, tuple]:
    """Start/length sequences whose prefix density provably vanishes.

    With k_1 = 1 and the minimal choice

        k_{j+1} = (k_j + f(k_j) + j) * j + 1,      l_j = f(k_j) + j,

    the count of set members below k_{j+1} is at most k_j + l_j, so the
    density checkpoint at N = k_{j+1} - 1 is at most 1/j.  The extra slack
    l_j - f(k_j) = j grows without bound by construction.
    """
    ks, ls = [1], []
    last_f = None
    for j in range(1, count + 1):
        fk = int(f(ks[-1]))
        if fk < 1 or (last_f is not None and fk <= last_f):
            raise DomainError("degree allocation must be positive and strictly increasing")
        last_f = fk
        ls.append(fk + j)
        ks.append((ks[-1] + fk + j) * j + 1)
    return tuple(ks[:count]), tuple(ls)


def power_law_blocks(
    s,
    starts: Optional[Sequence[int]] = None,
    count: Optional[int] = None,
    prec: int = DEFAULT_PRECISION,
) -> ExponentSet:
    """Blocks [[k_j, k_j + floor(k_j^s)]] for s > 1.

    When ``starts`` is omitted the sequence is auto-generated by the
    minimal density recursion k_{j+1} = (k_j + floor(k_j^s)) * j + 1 from
    k_1 = 1, which drives the checkpoint densities below 1/j.
    """
    s = to_mpf(s)
    if not s > 1:
        raise DomainError(f"exponent must satisfy s > 1, got {s}")
    if starts is None:
        if count is None:
            raise DomainError("auto-generated starts need an explicit count")
        ks = [1]
        ls = []
        for j in range(1, count + 1):
            ls.append(exact_floor_power(ks[-1], s, prec))
            ks.append((ks[-1] + ls[-1]) * j + 1)
        ks = ks[:count]
    else:
        ks = [int(k) for k in starts]
        if count is not None:
            ks = ks[:count]
        ls = [exact_floor_power(k, s, prec) for k in ks]
    out = union_of_blocks(ks, ls)
    return ExponentSet(
        out.intervals,
        provenance="power_law_blocks",
        params={"s": float(s), "starts": tuple(ks), "lengths": tuple(ls), "auto": starts is None},
    )


def loglinear_blocks(
    eps,
    ell: int,
    t,
    starts: Sequence[int],
    count: Optional[int] = None,
    prec: int = DEFAULT_PRECISION,
) -> ExponentSet:
    """Blocks with the log-linear length allocation

        l_j = floor(t * C * log(k_j) * k_j),   C = -ell / log(1 - eps^2),

    the budget sufficient for measures whose coefficient windows of length
    ``ell`` always carry a modulus >= eps.  Starts must be >= 2 so the
    logarithm contributes.
    """
    with workprec(prec):
        eps = to_mpf(eps)
        if not (0 < eps < 1):
            raise DomainError(f"eps must lie in (0, 1), got {eps}")
        if int(ell) != ell or ell < 1:
            raise DomainError(f"window budget ell must be a positive integer, got {ell}")
        t = to_mpf(t)
        if not t > 2:
            raise DomainError(f"margin factor must satisfy t > 2, got {t}")
        ks = [int(k) for k in (starts if count is None else starts[:count])]
        if any(k < 2 for k in ks):
            raise DomainError("starts below 2 make the log-linear allocation empty")
        c_const = -mpf(ell) / mp.log(1 - eps * eps)
        ls = [_verified_floor(lambda bits, k=k: t * c_const * mp.log(k) * k, prec) for k in ks]
    out = union_of_blocks(ks, ls)
    return ExponentSet(
        out.intervals,
        provenance="loglinear_blocks",
        params={
            "eps": float(eps),
            "ell": int(ell),
            "t": float(t),
            "c_const": float(c_const),
            "starts": tuple(ks),
            "lengths": tuple(ls),
        },
    )


def double_exp_gap_complement(
    t,
    t_tilde,
    c,
    count: int,
    s=None,
    prec: int = DEFAULT_PRECISION,
) -> Tuple[ExponentSet, ExponentSet, Optional[int]]:
    """Excluded blocks with doubly exponential spacing, and a power-law
    family living in their complement.

    The excluded set is

        Gamma = union_j [[ floor(e^(t^j)), floor(e^(t^j)) + floor(c e^(t_tilde^j)) ]]

    for j = 1 .. count.  With k_j = right end of block j, plus one, the
    power-law blocks [[k_j, k_j + floor(k_j^s)]] fit strictly between
    consecutive excluded blocks once floor(e^(t^(j+1))) >= 2 k_j^s; the
    first index from which that inequality holds through the horizon is
    returned as ``n_start`` (None when the horizon is too short, in which
    case the second set is empty).

    Disjointness of the two sets is re-checked by interval intersection,
    not merely trusted.
    """
    with workprec(prec):
        t = to_mpf(t)
        t_tilde = to_mpf(t_tilde)
        c = to_mpf(c)
        if not (t >= t_tilde > 1):
            raise DomainError("need t >= t_tilde > 1")
        if not c > 0:
            raise DomainError("scale constant must be positive")
        s = (1 + t) / 2 if s is None else to_mpf(s)
        if not (1 < s < t):
            raise DomainError(f"inner exponent must satisfy 1 < s < t, got {s}")

        gamma_intervals = []
        k_seq = []
        exp_floors = []  # floor(e^(t^j)) for j = 1 .. count+1
        for j in range(1, count + 2):
            exp_floors.append(_verified_floor(lambda bits, j=j: mp.e ** (t**j), prec, index=j))
        for j in range(1, count + 1):
            g = exp_floors[j - 1]
            width = _verified_floor(lambda bits, j=j: c * mp.e ** (t_tilde**j), prec, index=j)
            gamma_intervals.append((g, g + width))
            k_seq.append(g + width + 1)

        # admissibility of each candidate power-law block
        admissible = []
        for j in range(1, count + 1):
            k_j = k_seq[j - 1]
            bound = 2 * _power_upper(k_j, s, prec)
            admissible.append(mpf(exp_floors[j]) >= bound)
        n_start = None
        for j in range(count, 0, -1):
            if admissible[j - 1]:
                n_start = j
            else:
                break

        lam_intervals = []
        lengths = []
        if n_start is not None:
            for j in range(n_start, count + 1):
                k_j = k_seq[j - 1]
                width = exact_floor_power(k_j, s, prec)
                lam_intervals.append((k_j, k_j + width))
                lengths.append(width)

    gamma = ExponentSet.from_intervals(
        gamma_intervals,
        provenance="double_exp_gap_complement/excluded",
        params={"t": float(t), "t_tilde": float(t_tilde), "c": float(c), "count": count},
    )
    lam = ExponentSet.from_intervals(
        lam_intervals,
        provenance="double_exp_gap_complement/admitted",
        params={
            "s": float(s),
            "n_start": n_start,
            "starts": tuple(k_seq[(n_start or count + 1) - 1 : count]),
            "lengths": tuple(lengths),
        },
    )
    if not gamma.is_disjoint_from(lam):
        raise RangeOverflowError(count, "admitted blocks collided with the excluded set")
    return gamma, lam, n_start


def cofinite_blocks(gamma: Iterable[int], f: Callable[[int], int], count: int) -> ExponentSet:
    """A contiguous tiling of everything above a finite excluded set.

    With k_1 = max(gamma) + 1 (1 for an empty gamma, recovering the
    classical no-gaps situation) and

        k_{j+1} = k_j + f(k_j) + j,     l_j = f(k_j) + j,

    consecutive blocks share exactly one endpoint, so the union merges to
    the single block [[k_1, k_J + l_J]].
    """
    gamma = sorted(set(int(g) for g in gamma))
    if gamma and gamma[0] < 0:
        raise DomainError("excluded exponents must be nonnegative")
    k1 = (gamma[-1] + 1) if gamma else 1
    ks, ls = [k1], []
    for j in range(1, count + 1):
        fk = int(f(ks[-1]))
        if fk < 1:
            raise DomainError("degree allocation must be positive")
        ls.append(fk + j)
        ks.append(ks[-1] + fk + j)
    out = union_of_blocks(ks[:count], ls)
    result = ExponentSet(
        out.intervals,
        provenance="cofinite_blocks",
        params={"gamma_max": (gamma[-1] if gamma else None), "starts": tuple(ks[:count]), "lengths": tuple(ls)},
    )
    if len(result.intervals) != 1:
        raise DomainError("tiling failed to merge into a single block")
    return result


def density_report(exponents: ExponentSet, checkpoints: Sequence[int]) -> DensityReport:
    """Exact member counts against [[1, N]] at each checkpoint N."""
    ns = [int(n) for n in checkpoints]
    if not ns or any(n < 1 for n in ns) or any(b <= a for a, b in zip(ns, ns[1:])):
        raise DomainError("checkpoints must be positive and strictly increasing")
    rows = []
    for n in ns:
        count = exponents.count_in(1, n)
        rows.append((n, count, count / n))
    ratios = [r for _, _, r in rows]
    return DensityReport(tuple(rows), min(ratios), max(ratios))


def divergence_margins(starts: Sequence[int], lengths: Sequence[int], f: Callable[[int], int]) -> list:
    """The slack l_j - f(k_j) per block, the quantity that must diverge for
    shifted approximants of every fixed target exponent to fit."""
    if len(starts) != len(lengths):
        raise DomainError("start and length sequences must align")
    return [int(l) - int(f(k)) for k, l in zip(starts, lengths)]


# ---------------------------------------------------------------------------
# exact floor extraction
# ---------------------------------------------------------------------------

def exact_floor_power(base: int, exponent, prec: int = DEFAULT_PRECISION) -> int:
    """floor(base^exponent) with the floor verified at increased precision."""
    if base < 1:
        raise DomainError(f"base must be a positive integer, got {base}")
    exponent = to_mpf(exponent)
    return _verified_floor(lambda bits: mpf(base) ** exponent, prec)


def _power_upper(base: int, exponent, prec: int) -> mpf:
    with workprec(prec + 64):
        return mpf(base) ** to_mpf(exponent)


def _verified_floor(compute, prec: int, index: Optional[int] = None) -> int:
    """floor of a positive quantity, recomputed at bumped precision until
    two consecutive floors agree; refusal to converge inside the precision
    ceiling reports the largest feasible index."""
    bits = prec
    with workprec(bits):
        prev = mp.floor(compute(bits))
    while True:
        next_bits = min(bits + 64, PRECISION_CEILING + 64)
        with workprec(next_bits):
            cur = mp.floor(compute(next_bits))
        if cur == prev:
            return int(cur)
        if next_bits > PRECISION_CEILING:
            raise RangeOverflowError(
                (index - 1) if index else 0,
                "floor extraction did not stabilize below the precision ceiling",
            )
        prev, bits = cur, next_bits


def _plain(obj):
    """Recursively convert params to JSON-serializable plain types."""
    if isinstance(obj, dict):
        return {k: _plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_plain(v) for v in obj]
    if isinstance(obj, mpf):
        return float(obj)
    return obj
