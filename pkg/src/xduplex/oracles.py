"""
Quadrature references for the special-function kernel.

Each oracle evaluates a textbook integral representation with
``scipy.integrate.quad`` (relative tolerance 1e-12).  Infinite upper
limits are cut where the integrand has fallen below 1e-18 of its peak.
None of them calls into :mod:`xduplex.specfun`, so they can be used to
check it.
"""

import math

from scipy import integrate

from .errors import QuadratureError

REL_TOL = 1e-12
TAIL_RATIO = 1e-18
_LOG_TAIL = -math.log(TAIL_RATIO)


def _quad(f, a, b, points=None):
    val, err, info = integrate.quad(
        f, a, b, epsabs=0.0, epsrel=REL_TOL, limit=400, points=points, full_output=1
    )[:3]
    if abs(err) > 1e3 * REL_TOL * abs(val) and abs(err) > 1e-300:
        raise QuadratureError(
            "oracle quadrature did not converge",
            {"value": val, "abserr": err, "neval": info["neval"]},
        )
    return val


def q_oracle(x):
    """``Pr(N(0,1) > x)`` as ``phi(x) * int_0^inf exp(-x s - s^2/2) ds``."""
    if x < 0:
        return 1.0 - q_oracle(-x)
    # integrand exp(-x s - s^2/2) <= exp(-s^2/2), peak 1 at s = 0
    upper = math.sqrt(2.0 * _LOG_TAIL)
    if x > 0:
        upper = min(upper, _LOG_TAIL / x)
    inner = _quad(lambda s: math.exp(-x * s - 0.5 * s * s), 0.0, upper)
    return math.exp(-0.5 * x * x) / math.sqrt(2.0 * math.pi) * inner


def bessel_k_oracle(order, z):
    """``K_n(z) = int_0^inf exp(-z cosh t) cosh(n t) dt``, n in {0, 1}."""
    # scaled by e^z so the integrand peaks at 1 (order 0) near t = 0
    def f(t):
        return math.exp(-z * (math.cosh(t) - 1.0)) * math.cosh(order * t)

    upper = math.acosh(1.0 + (_LOG_TAIL + order * 60.0) / z)
    if order == 1:
        # cosh(t) growth shifts the tail; extend until the product is small
        while f(upper) > TAIL_RATIO * max(1.0, f(0.0)):
            upper *= 1.25
    return math.exp(-z) * _quad(f, 0.0, upper, points=[min(1.0, upper / 2)])


def gamma_oracle(a):
    """Euler's integral for ``a > 0``, then ``Gamma(a) = Gamma(a+1)/a`` below."""
    if a <= 0:
        return gamma_oracle(a + 1.0) / a
    f = lambda t: t ** (a - 1.0) * math.exp(-t)
    peak_t = max(a - 1.0, 0.0)
    upper = peak_t + 10.0
    log_peak = (a - 1.0) * math.log(peak_t) - peak_t if peak_t > 0 else 0.0
    while (a - 1.0) * math.log(upper) - upper - log_peak > -_LOG_TAIL:
        upper *= 1.5
    pts = [p for p in (min(1.0, upper / 2), peak_t) if 0 < p < upper]
    return _quad(f, 0.0, upper, points=pts or None)


def upper_incomplete_gamma_oracle(a, x):
    """``int_x^inf t^(a-1) e^-t dt`` written as ``e^-x int_0^inf (x+s)^(a-1) e^-s ds``."""
    f = lambda s: (x + s) ** (a - 1.0) * math.exp(-s)
    # (x+s)^(a-1) e^-s is decreasing for a <= 1; for a > 1 the factor grows
    # at most polynomially, so widen until the tail is negligible.
    upper = _LOG_TAIL + 10.0
    head = f(0.0)
    while f(upper) > TAIL_RATIO * max(head, f(max(a - 1.0 - x, 0.0))):
        upper *= 1.5
    pts = [p for p in (x, 1.0, max(a - 1.0 - x, 0.0)) if 0 < p < upper]
    return math.exp(-x) * _quad(f, 0.0, upper, points=sorted(set(pts)) or None)


def parabolic_cylinder_oracle(p, z):
    """
    ``D_p(z)`` for ``p < 0`` from the same integral representation the
    kernel uses, but integrated adaptively in ``t`` rather than by a
    fixed trapezoid in ``log t``.  Returns the scaled value
    ``exp(z^2/4) D_p(z)``.
    """
    v = -p
    t_peak = 0.5 * (-z + math.sqrt(z * z + 4.0 * (v - 1.0))) if v > 1 else 0.0
    t_peak = max(t_peak, 0.0)

    def log_f(t):
        return (v - 1.0) * math.log(t) - z * t - 0.5 * t * t

    log_peak = log_f(t_peak) if t_peak > 0 else 0.0

    def f(t):
        if t == 0.0:
            return 0.0 if v > 1 else (1.0 if v == 1 else math.inf)
        return math.exp(log_f(t) - log_peak)

    scale = 1.0 / (abs(z) + 1.0)
    upper = t_peak + scale
    while log_f(upper) - log_peak > -_LOG_TAIL:
        upper += scale
        scale *= 1.5
    pts = [p_ for p_ in (t_peak, min(upper / 10, 1.0)) if 0 < p_ < upper]
    integral = _quad(f, 0.0, upper, points=sorted(set(pts)) or None)
    return math.exp(log_peak) * integral / math.gamma(v)
