"""Measure representations and trigonometric moments m_k = integral of z^k dmu.

Moments are the canonical interchange format: every measure kind (recursion
coefficients, atoms, weight samples) compiles to a `MomentSequence` before
any approximation distance is computed, so the ill-conditioned linear
algebra lives behind a single code path.

Moment conventions: ``m_0 = 1`` exactly (probability measure) and
``m_{-k} = conj(m_k)`` by construction, never recomputed.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

from mpmath import conj, fabs, mp, mpc, mpf

from .exceptions import DegeneracyError, DomainError, PrecisionError, ResolutionError
from .polynomials import MonicPolynomial, szego_step
from .precision import DEFAULT_PRECISION, negativity_tolerance, to_mpc, to_mpf, workprec

__all__ = [
    "MomentSequence",
    "VerblunskySequence",
    "MeasureSpec",
    "moments_from_alphas",
    "alphas_from_moments",
    "moments_from_atoms",
    "moments_from_weight",
    "zhedanov_moments",
    "measure_from_atoms",
    "measure_from_weight",
    "is_strictly_positive_definite",
]

ATOM_WEIGHT_TOLERANCE = mpf("1e-9")
WEIGHT_MEAN_TOLERANCE = mpf("1e-6")


@dataclass(frozen=True)
class MomentSequence:
    """Trigonometric moments m_0 .. m_N of a probability measure.

    Negative orders are served through conjugate symmetry, so the stored
    values fully determine the Hermitian Toeplitz moment matrix of every
    order up to N.
    """

    values: tuple
    precision: int = DEFAULT_PRECISION

    def __post_init__(self):
        if not self.values:
            raise DomainError("a moment sequence needs at least m_0")
        if self.values[0] != 1:
            raise DomainError("m_0 must be exactly 1")

    @property
    def order(self) -> int:
        return len(self.values) - 1

    def moment(self, k: int) -> mpc:
        """m_k for any integer k with |k| <= order."""
        if k < 0:
            return conj(self.values[-k])
        return self.values[k]

    def __getitem__(self, k: int) -> mpc:
        return self.moment(k)

    def toeplitz(self, n: int) -> list:
        """The (n+1) x (n+1) Hermitian moment matrix as nested lists."""
        if n > self.order:
            raise DomainError(f"matrix order {n} exceeds available moments {self.order}")
        return [[self.moment(i - j) for j in range(n + 1)] for i in range(n + 1)]


@dataclass(frozen=True)
class VerblunskySequence:
    """A finite prefix of recursion coefficients, all strictly inside the disk.

    ``generator`` optionally records how to extend the prefix (a
    `GeneratorSpec`); the bijection between non-degenerate measures and
    coefficient sequences makes the prefix a faithful finite window on the
    measure.
    """

    values: tuple
    generator: Optional[object] = None

    def __post_init__(self):
        for j, a in enumerate(self.values):
            a = to_mpc(a)
            if not (a.real * a.real + a.imag * a.imag) < 1:
                raise DomainError(f"|alpha_{j}| >= 1 is outside the open unit disk")

    def __len__(self) -> int:
        return len(self.values)

    def __iter__(self):
        return iter(self.values)

    def __getitem__(self, j):
        return self.values[j]

    def moduli(self) -> tuple:
        return tuple(fabs(a) for a in self.values)


@dataclass(frozen=True)
class MeasureSpec:
    """Declarative description of a probability measure on the circle.

    kind is one of:

    * ``alpha_defined`` -- the measure is identified with its coefficient
      sequence (``generator`` names the family); this is the only route to
      general singular measures.
    * ``atomic`` -- finitely many atoms (angle, weight), weights positive
      and summing to 1 (renormalized when within 1e-9).
    * ``weight_function`` -- a nonnegative density sampled on a uniform
      grid of the circle, with unit mean up to a declared tolerance.
    """

    kind: str
    generator: Optional[object] = None
    atoms: Optional[tuple] = None
    weight_samples: Optional[tuple] = None
    label: str = ""

    def __post_init__(self):
        if self.kind not in ("alpha_defined", "atomic", "weight_function"):
            raise DomainError(f"unknown measure kind {self.kind!r}")
        if self.kind == "alpha_defined" and self.generator is None:
            raise DomainError("alpha_defined measures need a generator")
        if self.kind == "atomic" and not self.atoms:
            raise DomainError("atomic measures need a nonempty atom list")
        if self.kind == "weight_function" and not (self.weight_samples or self.generator):
            raise DomainError("weight_function measures need samples or a density generator")

    @property
    def rank(self) -> Optional[int]:
        """Dimension of L2(mu) when finite (atomic measures), else None."""
        return len(self.atoms) if self.kind == "atomic" else None


def measure_from_atoms(atoms, label: str = "", tolerance=ATOM_WEIGHT_TOLERANCE) -> MeasureSpec:
    """Build an atomic MeasureSpec; weights must be positive and sum to 1
    within ``tolerance`` (they are renormalized exactly at moment time)."""
    return MeasureSpec(kind="atomic", atoms=_validated_atoms(atoms, tolerance), label=label)


def measure_from_weight(samples, label: str = "", mean_tolerance=WEIGHT_MEAN_TOLERANCE) -> MeasureSpec:
    """Build a weight_function MeasureSpec from density samples on a uniform grid."""
    vals = tuple(to_mpf(s) for s in samples)
    if len(vals) < 4:
        raise DomainError("density grid needs at least 4 samples")
    for i, v in enumerate(vals):
        if v < 0:
            raise DomainError(f"negative density sample at grid index {i}")
    with workprec(DEFAULT_PRECISION):
        mean = mp.fsum(vals) / len(vals)
        if fabs(mean - 1) > mean_tolerance:
            raise DomainError(f"density mean {mean} is not 1 within tolerance {mean_tolerance}")
    return MeasureSpec(kind="weight_function", weight_samples=vals, label=label)


def moments_from_alphas(alphas, count: int, prec: int = DEFAULT_PRECISION) -> MomentSequence:
    """Moments m_0 .. m_count generated by a coefficient prefix.

    Each recurrence step determines the next moment from the orthogonality
    of the new polynomial against 1:

        m_{n+1} = -sum_{i=0}^{n} b_{n+1, i} m_i.

    Raises
    ------
    DomainError
        A coefficient lies on or outside the unit circle, or the prefix is
        shorter than ``count``.
    PrecisionError
        A computed moment escapes the closed unit disk by more than the
        precision-scaled tolerance, signalling numerical exhaustion; the
        failing index is reported.
    """
    values = tuple(getattr(alphas, "values", alphas))
    if len(values) < count:
        raise DomainError(f"need {count} coefficients to produce {count + 1} moments")
    with workprec(prec):
        moments = [mpc(1)]
        phi = MonicPolynomial.one()
        slack = negativity_tolerance(prec)
        for n in range(count):
            phi = szego_step(phi, values[n])
            m_next = -mp.fsum(to_mpc(phi.coefficients[i]) * moments[i] for i in range(n + 1))
            if fabs(m_next) > 1 + slack:
                raise PrecisionError(n + 1, f"moment m_{n + 1} left the unit disk: |m| = {fabs(m_next)}")
            moments.append(m_next)
    return MomentSequence(tuple(moments), precision=prec)


def alphas_from_moments(moments: MomentSequence, prec: int = DEFAULT_PRECISION) -> VerblunskySequence:
    """Recursion coefficients alpha_0 .. alpha_{N-1} from moments m_0 .. m_N.

    This is a Levinson-type reflection pass: with Phi_n in hand,
    orthogonality of Phi_{n+1} against 1 forces

        conj(alpha_n) = <z Phi_n, 1> / ||Phi_n||^2,

    and the Szego step advances the polynomial.  Strict positive
    definiteness of the moment matrix through order N is exactly the
    condition that every produced coefficient stays inside the open disk.

    Raises
    ------
    DegeneracyError
        Positive definiteness fails at some order (degenerate or
        numerically exhausted measure); the order is reported.
    """
    n_alphas = moments.order
    with workprec(prec):
        phi = MonicPolynomial.one()
        norm_sq = mpf(1)
        threshold = negativity_tolerance(prec)
        alphas = []
        for n in range(n_alphas):
            inner = mp.fsum(to_mpc(phi.coefficients[i]) * moments.moment(i + 1) for i in range(n + 1))
            a = conj(inner) / norm_sq
            gap = 1 - (a.real * a.real + a.imag * a.imag)
            if gap <= threshold:
                raise DegeneracyError(n + 1)
            alphas.append(a)
            phi = szego_step(phi, a)
            norm_sq *= gap
    return VerblunskySequence(tuple(alphas))


def moments_from_atoms(atoms, count: int, prec: int = DEFAULT_PRECISION) -> MomentSequence:
    """Moments of a finite atomic measure: m_k = sum_j w_j e^{i k theta_j}.

    Weights must be positive and sum to 1 within the atomic tolerance; they
    are renormalized so that m_0 = 1 exactly.  The resulting moment matrix
    is positive semidefinite, strictly definite only through order
    (number of atoms - 1).
    """
    validated = _validated_atoms(atoms, ATOM_WEIGHT_TOLERANCE)
    with workprec(prec):
        angles = [to_mpf(theta) for theta, _ in validated]
        raw = [to_mpf(w) for _, w in validated]
        total = mp.fsum(raw)
        weights = [w / total for w in raw]
        values = [mpc(1)]
        for k in range(1, count + 1):
            values.append(mp.fsum(w * mp.expj(k * t) for w, t in zip(weights, angles)))
    return MomentSequence(tuple(values), precision=prec)


def moments_from_weight(samples, count: int, prec: int = DEFAULT_PRECISION) -> MomentSequence:
    """Moments of an absolutely continuous measure from uniform density samples.

    Uses the periodic trapezoidal rule (plain grid average), which is
    spectrally accurate for smooth densities.  The grid must hold at least
    4x the requested moment count; m_0 is forced to exactly 1 by
    renormalization.

    Raises
    ------
    DomainError
        Negative density sample.
    ResolutionError
        Grid shorter than 4*count, or a computed moment exceeding 1 in
        modulus (aliasing beyond the Nyquist range).
    """
    vals = tuple(to_mpf(s) for s in samples)
    grid = len(vals)
    if count > 0 and grid < 4 * count:
        raise ResolutionError(f"grid of {grid} samples cannot resolve {count} moments (need >= {4 * count})")
    for i, v in enumerate(vals):
        if v < 0:
            raise DomainError(f"negative density sample at grid index {i}")
    with workprec(prec):
        total = mp.fsum(vals)
        if total <= 0:
            raise DomainError("density is identically zero")
        slack = negativity_tolerance(prec)
        values = [mpc(1)]
        step = 2 * mp.pi / grid
        for k in range(1, count + 1):
            m_k = mp.fsum(v * mp.expj(k * step * j) for j, v in enumerate(vals)) / total
            if fabs(m_k) > 1 + slack:
                raise ResolutionError(f"moment m_{k} exceeds 1 in modulus; grid too coarse")
            values.append(m_k)
    return MomentSequence(tuple(values), precision=prec)


def zhedanov_moments(p, theta0, count: int, prec: int = DEFAULT_PRECISION) -> MomentSequence:
    """Closed-form moments of the geometric pure-point measure
    (1-p) sum_n p^n delta_{q^n} with q = e^{i theta0}:

        m_k = (1 - p) / (1 - p q^k).

    The measure has full support (and the intended properties) only when
    theta0 / (2 pi) is irrational; that precondition is documented, not
    checked, since irrationality is undecidable from a numeric literal.
    """
    with workprec(prec):
        p = to_mpf(p)
        if not (0 < p < 1):
            raise DomainError(f"p must lie in (0, 1), got {p}")
        theta0 = to_mpf(theta0)
        values = [mpc(1)]
        for k in range(1, count + 1):
            values.append((1 - p) / (1 - p * mp.expj(k * theta0)))
    return MomentSequence(tuple(values), precision=prec)


def is_strictly_positive_definite(moments: MomentSequence, prec: int = DEFAULT_PRECISION) -> bool:
    """Whether the full Toeplitz moment matrix is strictly positive definite.

    Runs the reflection pass; success is equivalent to every coefficient
    staying inside the open disk.
    """
    try:
        alphas_from_moments(moments, prec=prec)
    except DegeneracyError:
        return False
    return True


def _validated_atoms(atoms, tolerance) -> tuple:
    pairs = [(to_mpf(theta), to_mpf(w)) for theta, w in atoms]
    if not pairs:
        raise DomainError("empty atom list")
    for i, (_, w) in enumerate(pairs):
        if w <= 0:
            raise DomainError(f"atom {i} has non-positive weight {w}")
    with workprec(DEFAULT_PRECISION):
        total = mp.fsum(w for _, w in pairs)
        if fabs(total - 1) > tolerance:
            raise DomainError(f"atom weights sum to {total}, outside tolerance {tolerance} of 1")
    return tuple(pairs)
