"""Pure numpy/Python implementations of the numerical hot loops.

Every function here has a twin with the same signature in ``_ckernels.pyx``.
The two are kept algorithmically identical so that either backend gives the
same answers to rounding.
"""

import math

import numpy as np

# Lanczos approximation, g = 671/128, 14 terms.
LANCZOS_G = 5.24218750000000000
LANCZOS_C0 = 0.999999999999997092
LANCZOS_COEF = (
    57.1562356658629235,
    -59.5979603554754912,
    14.1360979747417471,
    -0.491913816097620199,
    0.339946499848118887e-4,
    0.465236289270485756e-4,
    -0.983744753048795646e-4,
    0.158088703224912494e-3,
    -0.210264441724104883e-3,
    0.217439618115212643e-3,
    -0.164318106536763890e-3,
    0.844182239838527433e-4,
    -0.261908384015814087e-4,
    0.368991826595316234e-5,
)
SQRT_2PI = 2.5066282746310005

EULER_GAMMA = 0.57721566490153286061
# zeta(k) for k = 2..31
ZETA = (
    1.6449340668482264365, 1.2020569031595942854, 1.0823232337111381915,
    1.0369277551433699263, 1.0173430619844491397, 1.0083492773819228268,
    1.0040773561979443394, 1.0020083928260822144, 1.0009945751278180853,
    1.0004941886041194646, 1.0002460865533080483, 1.0001227133475784891,
    1.0000612481350587048, 1.0000305882363070205, 1.0000152822594086519,
    1.0000076371976378998, 1.0000038172932649998, 1.0000019082127165539,
    1.0000009539620338728, 1.0000004769329867878, 1.0000002384505027277,
    1.0000001192199259653, 1.0000000596081890513, 1.0000000298035035147,
    1.0000000149015548284, 1.0000000074507117898, 1.0000000037253340248,
    1.0000000018626597235, 1.0000000009313274324, 1.0000000004656629065,
)
# Taylor coefficients of ln Gamma(1 + e): a_1 = -gamma, a_k = (-1)^k zeta(k) / k
LGAMMA1P_COEF = (-EULER_GAMMA,) + tuple(
    (-1.0) ** k * z / k for k, z in enumerate(ZETA, start=2)
)


def _lgamma1p(e):
    acc = 0.0
    for c in reversed(LGAMMA1P_COEF):
        acc = acc * e + c
    return acc * e


def lgamma(x):
    """ln Gamma(x) for x > 0 (no argument checking)."""
    # Taylor series around the zeros at 1 and 2 keeps the relative error small.
    if 0.75 <= x <= 1.25:
        return _lgamma1p(x - 1.0)
    if 1.75 <= x <= 2.25:
        e = x - 2.0
        return math.log1p(e) + _lgamma1p(e)
    y = x
    tmp = x + LANCZOS_G
    tmp = (x + 0.5) * math.log(tmp) - tmp
    ser = LANCZOS_C0
    for c in LANCZOS_COEF:
        y += 1.0
        ser += c / y
    return tmp + math.log(SQRT_2PI * ser / x)


def hyp2f1_sum(a, b, c, x, tol, k_bound, rho, max_terms):
    """Sum the 2F1 power series with a geometric tail bound.

    Stops at the first index ``k >= k_bound`` whose term satisfies
    ``|t_k| * rho / (1 - rho) <= tol``. Returns ``(value, terms_used)``;
    ``terms_used`` is -1 when ``max_terms`` was exhausted.
    """
    tail = rho / (1.0 - rho)
    term = 1.0
    total = 1.0
    comp = 0.0
    k = 0
    while k < max_terms:
        if term == 0.0 or (k >= k_bound and abs(term) * tail <= tol):
            return total + comp, k + 1
        term *= (a + k) * (b + k) / ((c + k) * (k + 1.0)) * x
        k += 1
        # Neumaier compensated summation
        t = total + term
        if abs(total) >= abs(term):
            comp += (total - t) + term
        else:
            comp += (term - t) + total
        total = t
    return total + comp, -1


def deriv_integrand(W, z, m, s):
    """conj(w)^m * (1 - <z, w>)^(-s) for every row w of ``W``."""
    t = 1.0 - W.conj() @ z
    out = np.exp(-s * np.log(t))
    for i, mi in enumerate(m):
        if mi:
            out *= np.conj(W[:, i]) ** mi
    return out


def involution(a, W):
    """Apply phi_a to every row of ``W`` (shape (k, n))."""
    aa = float(np.vdot(a, a).real)
    if aa < 1e-30:
        return -W
    wa = W @ a.conj()
    proj = wa[:, None] * a[None, :] / aa
    s = math.sqrt(1.0 - aa)
    return (a[None, :] - proj - s * (W - proj)) / (1.0 - wa)[:, None]
