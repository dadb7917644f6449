"""Real special functions: log-gamma, Pochhammer symbols and Gauss 2F1."""

import math
from dataclasses import dataclass

from . import kernels

DEFAULT_TOL = 1e-10
DEFAULT_MAX_TERMS = 10**7


class DomainError(ValueError):
    """Argument outside the domain of a function or constructor."""


class ConvergenceError(ArithmeticError):
    """A series or quadrature failed to reach its requested accuracy."""


def _is_nonpositive_int(x):
    return x <= 0 and float(x).is_integer()


def log_gamma(x):
    """Natural log of the gamma function for real ``x > 0``.

    Lanczos approximation with a Taylor expansion around the zeros at 1 and
    2, accurate to about 1e-14 relative on (0, 200].
    """
    x = float(x)
    if not math.isfinite(x) or x <= 0.0:
        raise DomainError(f"log_gamma requires finite x > 0, got {x!r}")
    return kernels.lgamma(x)


def gamma_ratio(num, den=()):
    """exp(sum(log_gamma(num)) - sum(log_gamma(den)))."""
    return math.exp(sum(log_gamma(x) for x in num) - sum(log_gamma(x) for x in den))


def pochhammer(a, k):
    """Rising factorial (a)_k = a (a+1) ... (a+k-1), by direct product."""
    k = int(k)
    if k < 0:
        raise DomainError("pochhammer needs k >= 0")
    out = 1.0
    for j in range(k):
        out *= a + j
        if out == 0.0:
            return 0.0
    if not math.isfinite(out):
        raise OverflowError(f"pochhammer({a}, {k}) overflows")
    return out


@dataclass(frozen=True)
class HypParams:
    """Parameters (a, b, c) and argument x of a Gauss 2F1 evaluation."""

    a: float
    b: float
    c: float
    x: float

    def __post_init__(self):
        if _is_nonpositive_int(self.c):
            raise DomainError(f"c = {self.c} is zero or a negative integer")
        if not 0.0 <= self.x <= 1.0:
            raise DomainError(f"x = {self.x} outside [0, 1]")
        if self.x == 1.0 and self.c - self.a - self.b <= 0 and not self.terminates:
            raise DomainError("2F1 at x = 1 needs c - a - b > 0")

    @property
    def terminates(self):
        return _is_nonpositive_int(self.a) or _is_nonpositive_int(self.b)


def _tail_start(a, b, c, x, rho):
    """First index from which every term ratio stays within [0, rho]."""
    # past -a, -b, -c all factors are positive
    start = max(0.0, -a, -b, -c)
    # rho (c+j)(1+j) - x (a+j)(b+j) >= 0 for j beyond the larger root
    qa = rho - x
    qb = rho * (c + 1.0) - x * (a + b)
    qc = rho * c - x * a * b
    disc = qb * qb - 4.0 * qa * qc
    if disc >= 0.0:
        start = max(start, (-qb + math.sqrt(disc)) / (2.0 * qa))
    return math.floor(start) + 1


def hyp2f1_terms(a, b, c, x, tol=DEFAULT_TOL, max_terms=DEFAULT_MAX_TERMS):
    """Sum the 2F1(a, b; c; x) series for x in [0, 1).

    Returns ``(value, terms_used)``. The tail beyond the last term is bounded
    geometrically with ratio ``rho = (1 + x) / 2``, so the absolute truncation
    error is at most ``tol``.
    """
    p = HypParams(a, b, c, x)
    if x >= 1.0 and not p.terminates:
        raise DomainError("use hyp2f1_at_one for x = 1")
    if tol <= 0:
        raise DomainError("tol must be positive")
    rho = 0.5 * (1.0 + x)
    k_bound = _tail_start(a, b, c, x, rho) if x < 1.0 else math.inf
    value, used = kernels.hyp2f1_sum(
        float(a), float(b), float(c), float(x), float(tol), float(k_bound), rho, int(max_terms)
    )
    if used < 0:
        raise ConvergenceError(
            f"2F1({a}, {b}; {c}; {x}) tail bound not reached in {max_terms} terms"
        )
    return value, used


def hyp2f1(a, b, c, x, tol=DEFAULT_TOL, max_terms=DEFAULT_MAX_TERMS):
    """Gauss hypergeometric function 2F1(a, b; c; x) for x in [0, 1)."""
    return hyp2f1_terms(a, b, c, x, tol, max_terms)[0]


def hyp2f1_at_one(a, b, c):
    """2F1(a, b; c; 1).

    Gauss's closed form when c - a - b > 0; the exact finite sum when a or b
    is a non-positive integer.
    """
    p = HypParams(a, b, c, 1.0)
    if p.terminates:
        stop = int(-a) if _is_nonpositive_int(a) else int(-b)
        if _is_nonpositive_int(a) and _is_nonpositive_int(b):
            stop = min(int(-a), int(-b))
        total, term = 1.0, 1.0
        for k in range(stop):
            term *= (a + k) * (b + k) / ((c + k) * (k + 1.0))
            total += term
        return total
    if c <= 0 or c - a <= 0 or c - b <= 0:
        raise DomainError("gamma arguments c, c-a, c-b must be positive")
    return gamma_ratio((c, c - a - b), (c - a, c - b))
