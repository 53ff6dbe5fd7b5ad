"""Monic orthogonal polynomials on the unit circle.

The Szego recurrence

    Phi_{n+1}(z) = z Phi_n(z) - conj(alpha_n) Phi_n*(z)

drives everything in this module.  ``Phi_n*`` is the reversed polynomial
``z^n conj(Phi_n(1/conj(z)))``, whose coefficient ``i`` equals
``conj(b[n-i])``.  The squared norm obeys the exact product identity

    ||Phi_{n+1}||^2 = prod_{i=0}^{n} (1 - |alpha_i|^2),

so norms are carried alongside coefficients instead of being recomputed
from Gram matrices; the Gram form exists only as a verification path
(`gram_inner`), because it is the ill-conditioned one.
"""

from __future__ import annotations

from dataclasses import dataclass

from mpmath import conj, fabs, mp, mpc, mpf

from .exceptions import DomainError
from .precision import DEFAULT_PRECISION, to_mpc, workprec

__all__ = [
    "MonicPolynomial",
    "szego_step",
    "reversed_coefficients",
    "monic_ladder",
    "monic_norm_sq",
    "szego_partial_products",
    "log_weight_quadrature",
    "gram_inner",
]


@dataclass(frozen=True)
class MonicPolynomial:
    """A monic polynomial with its tracked squared L2(mu) norm.

    Attributes
    ----------
    coefficients : tuple of mpc
        Ascending coefficients ``b[0] .. b[n]`` with ``b[n] == 1`` exactly.
    norm_sq : mpf
        ``||Phi_n||^2`` accumulated through the recurrence; equals the
        product of ``1 - |alpha_i|^2`` over the steps that built it.
    """

    coefficients: tuple
    norm_sq: mpf

    def __post_init__(self):
        if not self.coefficients:
            raise DomainError("a polynomial needs at least one coefficient")
        if self.coefficients[-1] != 1:
            raise DomainError("leading coefficient must be exactly 1")

    @property
    def degree(self) -> int:
        return len(self.coefficients) - 1

    @classmethod
    def one(cls) -> "MonicPolynomial":
        """Phi_0 = 1, with ||Phi_0||^2 = m_0 = 1 for a probability measure."""
        return cls((mpc(1),), mpf(1))

    def __call__(self, z):
        acc = mpc(0)
        for b in reversed(self.coefficients):
            acc = acc * z + b
        return acc


def reversed_coefficients(coefficients) -> tuple:
    """Coefficients of the reversed polynomial: entry i is conj(b[n-i])."""
    return tuple(conj(b) for b in reversed(tuple(coefficients)))


def szego_step(phi: MonicPolynomial, alpha) -> MonicPolynomial:
    """One step of the Szego recurrence: returns Phi_{n+1} from Phi_n.

    Raises
    ------
    DomainError
        If ``|alpha| >= 1``; recursion coefficients live in the open disk.
    """
    a = to_mpc(alpha)
    mod_sq = a.real * a.real + a.imag * a.imag
    if not mod_sq < 1:
        raise DomainError(f"recursion coefficient must satisfy |alpha| < 1, got |alpha|^2 = {mod_sq}")
    rev = reversed_coefficients(phi.coefficients)
    ca = conj(a)
    coeffs = [-ca * rev[0]]
    for i in range(1, phi.degree + 1):
        coeffs.append(phi.coefficients[i - 1] - ca * rev[i])
    coeffs.append(phi.coefficients[phi.degree])  # = 1 exactly, untouched
    return MonicPolynomial(tuple(coeffs), phi.norm_sq * (1 - mod_sq))


def monic_ladder(alphas, n_max: int, prec: int = DEFAULT_PRECISION) -> list:
    """All monic orthogonal polynomials Phi_0 .. Phi_{n_max}.

    ``alphas`` must supply at least ``n_max`` coefficients.
    """
    values = _alpha_values(alphas)
    if len(values) < n_max:
        raise DomainError(f"need {n_max} coefficients, got {len(values)}")
    with workprec(prec):
        ladder = [MonicPolynomial.one()]
        for n in range(n_max):
            ladder.append(szego_step(ladder[-1], values[n]))
    return ladder


def monic_norm_sq(alphas, n: int, prec: int = DEFAULT_PRECISION) -> mpf:
    """||Phi_n||^2 = prod_{i=0}^{n-1} (1 - |alpha_i|^2), exactly as a product."""
    values = _alpha_values(alphas)
    if len(values) < n:
        raise DomainError(f"need {n} coefficients, got {len(values)}")
    with workprec(prec):
        acc = mpf(1)
        for i in range(n):
            a = to_mpc(values[i])
            mod_sq = a.real * a.real + a.imag * a.imag
            if not mod_sq < 1:
                raise DomainError(f"|alpha_{i}| >= 1")
            acc *= 1 - mod_sq
    return acc


def szego_partial_products(alphas, n_max: int, prec: int = DEFAULT_PRECISION) -> list:
    """Partial products P_n = prod_{i=0}^{n} (1 - |alpha_i|^2) for n <= n_max.

    ``P_n`` equals ``||Phi_{n+1}||^2``; its limit is the geometric-mean
    (Szego) constant exp(integral of log w dm).
    """
    values = _alpha_values(alphas)
    if len(values) < n_max + 1:
        raise DomainError(f"need {n_max + 1} coefficients, got {len(values)}")
    out = []
    with workprec(prec):
        acc = mpf(1)
        for i in range(n_max + 1):
            a = to_mpc(values[i])
            acc *= 1 - (a.real * a.real + a.imag * a.imag)
            out.append(acc)
    return out


def log_weight_quadrature(samples, prec: int = DEFAULT_PRECISION) -> mpf:
    """exp of the uniform-grid quadrature of log(w), w sampled on the circle.

    The samples are renormalized to unit mean first, so the result is
    comparable with the norm products of the same measure.  Zero or
    negative samples make the logarithm undefined.
    """
    with workprec(prec):
        vals = [mp.mpf(s) if not isinstance(s, (mpf, mpc)) else mp.mpf(s) for s in samples]
        if not vals:
            raise DomainError("empty sample grid")
        mean = mp.fsum(vals) / len(vals)
        total = mpf(0)
        for i, v in enumerate(vals):
            if v <= 0:
                raise DomainError(f"log of non-positive density sample at grid index {i}")
            total += mp.log(v / mean)
        return mp.e ** (total / len(vals))


def gram_inner(f_coeffs, g_coeffs, moment_at, prec: int = DEFAULT_PRECISION) -> mpc:
    """<f, g> in L2(mu) from moments: sum_{a,b} f[a] conj(g[b]) m[a-b].

    ``moment_at(k)`` must return m_k for any integer k (negative orders via
    conjugate symmetry).  This is the slow, ill-conditioned route; it exists
    to cross-check the product-form norms and orthogonality.
    """
    with workprec(prec):
        acc = mpc(0)
        for a, fa in enumerate(f_coeffs):
            if fa == 0:
                continue
            for b, gb in enumerate(g_coeffs):
                if gb == 0:
                    continue
                acc += to_mpc(fa) * conj(to_mpc(gb)) * to_mpc(moment_at(a - b))
    return acc


def _alpha_values(alphas):
    values = getattr(alphas, "values", alphas)
    return tuple(values)
