"""Arbitrary-precision plumbing shared by the numerical modules.

All heavy arithmetic runs on mpmath with an explicit mantissa-bit count.
The default of 256 bits leaves ample headroom over every tolerance used in
the test suite; non-Szego measures make the underlying Toeplitz systems
exponentially ill-conditioned, so hardware doubles are not a safe default.
"""

from __future__ import annotations

from mpmath import mp, mpf, mpc

from .exceptions import DomainError

DEFAULT_PRECISION = 256   # mantissa bits
PRECISION_CEILING = 4096  # escalation stops here
MIN_PRECISION = 53        # hardware-double equivalent


def workprec(bits: int):
    """Context manager setting the working precision to ``bits``."""
    if bits < 2:
        raise DomainError(f"precision must be at least 2 bits, got {bits}")
    return mp.workprec(int(bits))


def to_mpf(x) -> mpf:
    if isinstance(x, mpf):
        return x
    if isinstance(x, mpc):
        if x.imag != 0:
            raise DomainError(f"expected a real number, got {x}")
        return x.real
    return mpf(x)


def to_mpc(x) -> mpc:
    return x if isinstance(x, mpc) else mpc(x)


def residual_threshold(bits: int) -> mpf:
    """Acceptable relative solver residual at ``bits`` of precision."""
    return mpf(2) ** (-(bits // 4))


def negativity_tolerance(bits: int) -> mpf:
    """How far below zero a computed squared distance may dip before the
    result is declared numerically meaningless."""
    return mpf(2) ** (-(bits // 2))
