"""Markoff-class membership, named coefficient generators, and measure compilation.

A measure is Markoff for parameters (epsilon, ell) when every window of
ell+1 consecutive recursion coefficients contains one of modulus >= epsilon:

    inf_n  max_{n <= j <= n + ell} |alpha_j|  >=  epsilon.

Only prefix verdicts are decidable, so `markoff_membership_prefix` reports
on the windows that fit inside the supplied prefix and never claims
anything about the infinite tail.

The generator registry doubles as the measure library used across tests
and experiments:

    lebesgue                alpha_n = 0
    constant(a_re, a_im)    alpha_n = a
    poisson(r)              alpha = (r, 0, 0, ...); moments r^k
    ell2_szego(c, rho)      alpha_n = c * rho^n  (square-summable, Szego class)
    factorial               alpha_n = 1/sqrt(k) at n = k!, k >= 2, else 0
    zhedanov(p, theta0)     geometric pure-point measure; coefficients are
                            produced numerically from the closed-form
                            moments because only |alpha_n| has a formula
    random_rotinv(profile, seed)
                            modulus drawn from a radial profile, phase
                            independent uniform -- rotation invariant in law
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Mapping, Optional, Tuple

import numpy as np
from mpmath import fabs, mp, mpc, mpf

from .exceptions import DomainError
from .measures import (
    MeasureSpec,
    MomentSequence,
    VerblunskySequence,
    alphas_from_moments,
    measure_from_weight,
    moments_from_alphas,
    moments_from_atoms,
    moments_from_weight,
    zhedanov_moments,
)
from .polynomials import log_weight_quadrature, szego_partial_products
from .precision import DEFAULT_PRECISION, to_mpf, workprec

__all__ = [
    "MarkoffParams",
    "GeneratorSpec",
    "ALPHA_GENERATORS",
    "WEIGHT_GENERATORS",
    "build_measure",
    "measure_alphas",
    "measure_moments",
    "markoff_membership_prefix",
    "markoff_norm_bound",
    "zhedanov_alpha_modulus",
    "truncated_zhedanov_atoms",
    "poisson_kernel_samples",
    "szego_constant",
    "SzegoConstant",
]


@dataclass(frozen=True)
class MarkoffParams:
    """Membership parameters: modulus floor epsilon in (0,1), window length ell >= 0."""

    epsilon: float
    ell: int = 0

    def __post_init__(self):
        if not (0 < float(self.epsilon) < 1):
            raise DomainError(f"epsilon must lie in (0, 1), got {self.epsilon}")
        if int(self.ell) != self.ell or self.ell < 0:
            raise DomainError(f"window length must be a nonnegative integer, got {self.ell}")


@dataclass(frozen=True)
class GeneratorSpec:
    """A named coefficient (or density) generator with its parameters."""

    name: str
    params: Mapping = field(default_factory=dict)

    def param(self, key, default=None):
        return self.params.get(key, default)


ALPHA_GENERATORS = ("lebesgue", "constant", "poisson", "zhedanov", "factorial", "ell2_szego", "random_rotinv")
WEIGHT_GENERATORS = ("poisson_kernel", "uniform", "one_plus_cos")


def build_measure(generator: GeneratorSpec, label: str = "") -> MeasureSpec:
    """A MeasureSpec for a registered generator (validating its parameters).

    Coefficient prefixes of any length come out of `measure_alphas`; the
    result is deterministic for a fixed seed.
    """
    if generator.name in ALPHA_GENERATORS:
        _validate_alpha_generator(generator)
        return MeasureSpec(kind="alpha_defined", generator=generator, label=label or generator.name)
    if generator.name in WEIGHT_GENERATORS:
        samples = _weight_samples(generator, DEFAULT_PRECISION)
        return measure_from_weight(samples, label=label or generator.name)
    raise DomainError(f"unknown generator {generator.name!r}")


def measure_alphas(measure: MeasureSpec, count: int, prec: int = DEFAULT_PRECISION) -> VerblunskySequence:
    """The first ``count`` recursion coefficients of a measure.

    alpha-defined measures evaluate their generator; every other kind goes
    through the moment route (and inherits its degeneracy behaviour, e.g.
    an atomic measure runs out of coefficients at its atom count).
    """
    if count == 0:
        return VerblunskySequence((), generator=measure.generator)
    if measure.kind == "alpha_defined" and measure.generator.name != "zhedanov":
        return _generator_alphas(measure.generator, count, prec)
    moments = measure_moments(measure, count, prec)
    seq = alphas_from_moments(moments, prec=prec)
    return VerblunskySequence(seq.values, generator=measure.generator)


def measure_moments(measure: MeasureSpec, order: int, prec: int = DEFAULT_PRECISION) -> MomentSequence:
    """Moments m_0 .. m_order of a measure, the canonical compile target."""
    if measure.kind == "alpha_defined":
        gen = measure.generator
        if gen.name == "zhedanov":
            return zhedanov_moments(gen.param("p"), gen.param("theta0"), order, prec)
        return moments_from_alphas(_generator_alphas(gen, order, prec), order, prec)
    if measure.kind == "atomic":
        return moments_from_atoms(measure.atoms, order, prec)
    samples = measure.weight_samples or _weight_samples(measure.generator, prec)
    return moments_from_weight(samples, order, prec)


def markoff_membership_prefix(alphas, params: MarkoffParams) -> Tuple[bool, Optional[int]]:
    """Evaluate the window condition on every window inside a finite prefix.

    Returns ``(verdict, witness)`` where witness is the first window start
    whose maximal modulus falls below epsilon (None when all windows pass).
    This is a prefix verdict, not a statement about the infinite sequence.
    """
    values = tuple(getattr(alphas, "values", alphas))
    ell = int(params.ell)
    if len(values) < ell + 1:
        raise DomainError(f"prefix of {len(values)} coefficients holds no window of length {ell + 1}")
    eps = to_mpf(params.epsilon)
    moduli = [fabs(a) for a in values]
    for start in range(len(values) - ell):
        if max(moduli[start : start + ell + 1]) < eps:
            return False, start
    return True, None


def markoff_norm_bound(params: MarkoffParams, n: int, prec: int = DEFAULT_PRECISION) -> mpf:
    """Norm decay guaranteed by membership:

        ||Phi_n||^2 <= (1 - epsilon^2) ^ ((n-1)/(ell+1) - 1).

    The exponent is used in its stated real-valued form (no floor), which
    is the weaker but floor-free variant; values above 1 are vacuous since
    monic norms never exceed 1.
    """
    if n < 1:
        raise DomainError(f"norm bound needs n >= 1, got {n}")
    with workprec(prec):
        eps = to_mpf(params.epsilon)
        exponent = mpf(n - 1) / (params.ell + 1) - 1
        return (1 - eps * eps) ** exponent


def zhedanov_alpha_modulus(p, theta0, n: int, prec: int = DEFAULT_PRECISION) -> mpf:
    """|alpha_n| of the geometric pure-point measure, from the closed form

        |alpha_n|^2 = (1-p)^2 / (1 + p^2 - 2 p cos((n+1) theta0)).

    The value always lies strictly between (1-p)/(1+p) and 1 when
    (n+1) theta0 is not a multiple of 2 pi.
    """
    with workprec(prec):
        p = to_mpf(p)
        if not (0 < p < 1):
            raise DomainError(f"p must lie in (0, 1), got {p}")
        denom = 1 + p * p - 2 * p * mp.cos((n + 1) * to_mpf(theta0))
        return (1 - p) / mp.sqrt(denom)


def truncated_zhedanov_atoms(p, theta0, count: int) -> list:
    """The first ``count`` atoms (angle, weight) of the geometric pure-point
    measure, weights renormalized to sum to 1.

    Truncation error against the closed-form moments is bounded by the
    geometric tail, about 2 p^count.
    """
    if count < 1:
        raise DomainError("need at least one atom")
    with workprec(DEFAULT_PRECISION):
        p = to_mpf(p)
        if not (0 < p < 1):
            raise DomainError(f"p must lie in (0, 1), got {p}")
        theta0 = to_mpf(theta0)
        tail = 1 - p**count
        two_pi = 2 * mp.pi
        atoms = []
        for n in range(count):
            angle = mp.fmod(n * theta0, two_pi)
            atoms.append((angle, (1 - p) * p**n / tail))
    return atoms


def poisson_kernel_samples(r, grid: int = 4096, prec: int = DEFAULT_PRECISION) -> tuple:
    """Uniform-grid samples of the Poisson kernel density
    (1 - r^2) / (1 - 2 r cos(theta) + r^2), whose moments are r^|k|."""
    with workprec(prec):
        r = to_mpf(r)
        if not (-1 < r < 1):
            raise DomainError(f"Poisson kernel needs |r| < 1, got {r}")
        step = 2 * mp.pi / grid
        num = 1 - r * r
        return tuple(num / (1 - 2 * r * mp.cos(step * j) + r * r) for j in range(grid))


@dataclass(frozen=True)
class SzegoConstant:
    """Partial norm products and, for weight measures, the log-quadrature value."""

    partial_products: tuple
    quadrature: Optional[mpf] = None


def szego_constant(measure: MeasureSpec, n_max: int, prec: int = DEFAULT_PRECISION) -> SzegoConstant:
    """Partial products prod_{i<=n} (1 - |alpha_i|^2) for n <= n_max, plus
    exp of the quadrature of log(w) when the measure is a weight function.

    The two agree in the limit: both compute the geometric mean of the
    density.  The quadrature branch requires strictly positive samples.
    """
    alphas = measure_alphas(measure, n_max + 1, prec)
    products = tuple(szego_partial_products(alphas, n_max, prec))
    quadrature = None
    if measure.kind == "weight_function":
        samples = measure.weight_samples or _weight_samples(measure.generator, prec)
        quadrature = log_weight_quadrature(samples, prec)
    return SzegoConstant(partial_products=products, quadrature=quadrature)


# ---------------------------------------------------------------------------
# generator internals
# ---------------------------------------------------------------------------

def _validate_alpha_generator(gen: GeneratorSpec):
    name = gen.name
    if name == "constant":
        a_re = float(gen.param("a_re", 0.0))
        a_im = float(gen.param("a_im", 0.0))
        if a_re * a_re + a_im * a_im >= 1:
            raise DomainError("constant coefficient must satisfy |a| < 1")
    elif name == "poisson":
        r = float(gen.param("r", 0.0))
        if not (-1 < r < 1):
            raise DomainError(f"poisson generator needs |r| < 1, got {r}")
    elif name == "zhedanov":
        p = float(gen.param("p", -1))
        if not (0 < p < 1):
            raise DomainError(f"zhedanov generator needs p in (0, 1), got {p}")
        if gen.param("theta0") is None:
            raise DomainError("zhedanov generator needs theta0")
    elif name == "ell2_szego":
        c = float(gen.param("c", 0.0))
        rho = float(gen.param("rho", 0.0))
        if abs(c) >= 1 or abs(rho) >= 1:
            raise DomainError("ell2_szego generator needs |c| < 1 and |rho| < 1")
    elif name == "random_rotinv":
        profile = gen.param("profile")
        if not profile or any(x < 0 for x in profile) or sum(profile) <= 0:
            raise DomainError("random_rotinv needs a nonnegative, nonzero radial profile")
        if gen.param("seed") is None:
            raise DomainError("random_rotinv needs a seed for determinism")
    elif name not in ("lebesgue", "factorial"):
        raise DomainError(f"unknown generator {name!r}")


def _generator_alphas(gen: GeneratorSpec, count: int, prec: int) -> VerblunskySequence:
    _validate_alpha_generator(gen)
    with workprec(prec):
        if gen.name == "lebesgue":
            values = (mpc(0),) * count
        elif gen.name == "constant":
            a = mpc(to_mpf(gen.param("a_re", 0.0)), to_mpf(gen.param("a_im", 0.0)))
            values = (a,) * count
        elif gen.name == "poisson":
            values = (mpc(to_mpf(gen.param("r"))),) + (mpc(0),) * (count - 1)
        elif gen.name == "ell2_szego":
            c = to_mpf(gen.param("c"))
            rho = to_mpf(gen.param("rho"))
            values = tuple(mpc(c * rho**n) for n in range(count))
        elif gen.name == "factorial":
            values = _factorial_alphas(count)
        elif gen.name == "random_rotinv":
            values = _random_rotinv_alphas(gen, count)
        else:
            raise DomainError(f"generator {gen.name!r} has no direct coefficient form")
    return VerblunskySequence(values, generator=gen)


def _factorial_alphas(count: int) -> tuple:
    # 1/sqrt(k) placed at n = k!; k starts at 2 because 1/sqrt(0) is
    # undefined and 1/sqrt(1) = 1 would leave the open disk (0! = 1! collide
    # anyway).  Not square-summable index-wise sparse, and alpha_n -> 0.
    values = [mpc(0)] * count
    k = 2
    while math.factorial(k) < count:
        values[math.factorial(k)] = mpc(1 / mp.sqrt(k))
        k += 1
    return tuple(values)


def _random_rotinv_alphas(gen: GeneratorSpec, count: int) -> tuple:
    # Modulus drawn from a piecewise-constant radial density on [0, 1)
    # (``profile`` gives the bin weights), phase independent and uniform.
    # The law is rotation invariant by construction.  Whether the profile
    # keeps log(1 - |w|) integrable is the caller's responsibility; profiles
    # piling mass against the unit circle break that guideline.
    profile = np.asarray(gen.param("profile"), dtype=float)
    rng = np.random.default_rng(int(gen.param("seed")))
    bins = rng.choice(len(profile), size=count, p=profile / profile.sum())
    radii = (bins + rng.random(count)) / len(profile)
    phases = rng.random(count) * 2 * math.pi
    return tuple(mpc(to_mpf(r) * mp.expj(to_mpf(t))) for r, t in zip(radii, phases))


def _weight_samples(gen: GeneratorSpec, prec: int) -> tuple:
    if gen is None:
        raise DomainError("weight_function measure lacks both samples and a generator")
    grid = int(gen.param("grid", 4096))
    if grid < 4:
        raise DomainError(f"weight grid must have at least 4 points, got {grid}")
    if gen.name == "poisson_kernel":
        return poisson_kernel_samples(gen.param("r"), grid, prec)
    if gen.name == "uniform":
        return (mpf(1),) * grid
    if gen.name == "one_plus_cos":
        with workprec(prec):
            step = 2 * mp.pi / grid
            return tuple(1 + mp.cos(step * j) for j in range(grid))
    raise DomainError(f"unknown weight generator {gen.name!r}")
