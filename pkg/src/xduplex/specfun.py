"""
Special functions needed by the closed-form relay analysis.

Only the corner of each family that the analysis touches is covered:
real arguments, Bessel K of order 0 and 1, and parabolic cylinder
functions of negative order.  Every routine here has an independent
integral-representation counterpart in :mod:`xduplex.oracles`.
"""

import math
from dataclasses import dataclass

import numpy as np
from scipy import special as _sc

from .errors import DomainError, UnsupportedOrderError

__all__ = [
    "Accuracy",
    "DEFAULT_ACCURACY",
    "q_function",
    "bessel_k",
    "gamma_fn",
    "upper_incomplete_gamma",
    "upper_incomplete_gamma_scaled",
    "parabolic_cylinder_d",
    "parabolic_cylinder_d_scaled",
]

EULER_GAMMA = 0.57721566490153286061


@dataclass(frozen=True)
class Accuracy:
    """Stopping rule for the iterative expansions.

    Parameters
    ----------
    rel_tol : float
        Relative size of the last correction at which a series or
        continued fraction is considered converged.
    max_iter : int
        Iteration cap; exceeding it raises ``ArithmeticError``.
    """

    rel_tol: float = 1e-16
    max_iter: int = 500

    def __post_init__(self):
        if not 0.0 < self.rel_tol <= 1e-6:
            raise ValueError("rel_tol must lie in (0, 1e-6]")
        if self.max_iter < 32:
            raise ValueError("max_iter must be at least 32")


DEFAULT_ACCURACY = Accuracy()


def _scalar_or_array(func, *args):
    """Apply a scalar kernel elementwise, returning a float for scalar input."""
    arrays = [np.asarray(a, dtype=float) for a in args]
    if all(a.ndim == 0 for a in arrays):
        return func(*(float(a) for a in arrays))
    out = np.vectorize(func, otypes=[float])(*arrays)
    return out


# xxxxxxxxxx Gaussian tail xxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxx
def q_function(x):
    """
    Gaussian tail probability ``Pr(N(0, 1) > x)``.

    Accepts scalars or arrays.  Non-finite input raises
    :class:`~xduplex.errors.DomainError`.
    """
    arr = np.asarray(x, dtype=float)
    if not np.all(np.isfinite(arr)):
        raise DomainError("q_function needs finite arguments")
    out = 0.5 * _sc.erfc(arr / math.sqrt(2.0))
    return float(out) if out.ndim == 0 else out


# xxxxxxxxxx Modified Bessel functions of the second kind xxxxxxxxxxxxxxxxxxx
def _bessel_k_series(z, acc):
    # Ascending series, good for z <= 2.
    half = 0.5 * z
    q = half * half
    log_half = math.log(half)

    # K0 = -(ln(z/2) + gamma) I0 + sum_k H_k q^k / (k!)^2
    term = 1.0
    i0 = 1.0
    harm_sum = 0.0
    harmonic = 0.0
    # K1 = 1/z + ln(z/2) I1 - (z/4) sum_k [psi(k+1) + psi(k+2)] q^k / (k!(k+1)!)
    term1 = 1.0
    i1_sum = 1.0
    psi_sum = (-EULER_GAMMA) + (1.0 - EULER_GAMMA)
    k1_sum = psi_sum
    for k in range(1, acc.max_iter):
        term *= q / (k * k)
        harmonic += 1.0 / k
        i0 += term
        harm_sum += harmonic * term

        term1 *= q / (k * (k + 1))
        i1_sum += term1
        psi_sum += 1.0 / k + 1.0 / (k + 1)
        k1_sum += psi_sum * term1
        if term < acc.rel_tol * i0 and term1 * abs(psi_sum) < acc.rel_tol * abs(k1_sum):
            break
    else:
        raise ArithmeticError("Bessel K series did not converge")
    k0 = -(log_half + EULER_GAMMA) * i0 + harm_sum
    i1 = half * i1_sum
    k1 = 1.0 / z + log_half * i1 - 0.5 * half * k1_sum
    return k0, k1


def _bessel_k_cf(z, acc):
    # Steed's method on Temme's CF2 with mu = 0; returns (K0, K1).
    b = 2.0 * (1.0 + z)
    d = 1.0 / b
    h = delh = d
    q1, q2 = 0.0, 1.0
    a1 = 0.25
    q = c = a1
    a = -a1
    s = 1.0 + q * delh
    for i in range(2, acc.max_iter):
        a -= 2 * (i - 1)
        c = -a * c / i
        qnew = (q1 - b * q2) / a
        q1, q2 = q2, qnew
        q += c * qnew
        b += 2.0
        d = 1.0 / (b + a * d)
        delh = (b * d - 1.0) * delh
        h += delh
        dels = q * delh
        s += dels
        if abs(dels / s) < acc.rel_tol:
            break
    else:
        raise ArithmeticError("Bessel K continued fraction did not converge")
    h *= a1
    k0 = math.sqrt(math.pi / (2.0 * z)) * math.exp(-z) / s
    k1 = k0 * (z + 0.5 - h) / z
    return k0, k1


def _bessel_k_scalar(order, z, acc):
    if not z > 0.0 or math.isnan(z):
        raise DomainError(f"bessel_k needs z > 0, got {z!r}")
    if math.isinf(z):
        return 0.0
    k0, k1 = _bessel_k_series(z, acc) if z <= 2.0 else _bessel_k_cf(z, acc)
    return k0 if order == 0 else k1


def bessel_k(order, z, acc=DEFAULT_ACCURACY):
    """
    Modified Bessel function of the second kind, ``K_0(z)`` or ``K_1(z)``.

    Parameters
    ----------
    order : {0, 1}
    z : float or array_like
        Strictly positive argument.
    acc : Accuracy, optional

    Returns
    -------
    float or numpy.ndarray

    Notes
    -----
    The ascending series is used for ``z <= 2`` and Steed's continued
    fraction (Temme's CF2) above that; both give close to machine
    precision over the whole positive axis.
    """
    if order not in (0, 1):
        raise DomainError(f"bessel_k supports orders 0 and 1, got {order!r}")
    return _scalar_or_array(lambda v: _bessel_k_scalar(order, v, acc), z)


# xxxxxxxxxx Gamma family xxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxx
def gamma_fn(a):
    """Euler gamma function; non-positive integers raise DomainError."""
    a = float(a)
    if math.isnan(a) or (a <= 0.0 and a == math.floor(a)):
        raise DomainError(f"gamma_fn has a pole at {a!r}")
    return math.gamma(a)


def _lower_series_scaled(a, x, acc):
    # sum_n x^n / (a (a+1) ... (a+n)); gamma(a, x) = e^-x x^a * sum
    ap = a
    term = total = 1.0 / a
    for _ in range(acc.max_iter):
        ap += 1.0
        term *= x / ap
        total += term
        if abs(term) < abs(total) * acc.rel_tol:
            return total
    raise ArithmeticError("incomplete gamma series did not converge")


def _upper_cf(a, x, acc):
    # Modified Lentz evaluation of the Legendre continued fraction;
    # Gamma(a, x) = e^-x x^a * cf.
    tiny = 1e-300
    b = x + 1.0 - a
    c = 1.0 / tiny
    d = 1.0 / b
    h = d
    for i in range(1, acc.max_iter):
        an = -i * (i - a)
        b += 2.0
        d = an * d + b
        if abs(d) < tiny:
            d = tiny
        c = b + an / c
        if abs(c) < tiny:
            c = tiny
        d = 1.0 / d
        delta = d * c
        h *= delta
        if abs(delta - 1.0) < acc.rel_tol:
            return h
    raise ArithmeticError("incomplete gamma continued fraction did not converge")


def _expint_e1_scaled(x, acc):
    # e^x E1(x) = e^x Gamma(0, x)
    if x <= 1.0:
        term = 1.0
        total = 0.0
        for k in range(1, acc.max_iter):
            term *= -x / k
            total += term / k
            if abs(term / k) < acc.rel_tol * max(abs(total), 1e-300):
                break
        return math.exp(x) * (-EULER_GAMMA - math.log(x) - total)
    return _upper_cf(0.0, x, acc)


def _upper_scaled_positive(a, x, acc):
    if x < a + 1.0:
        log_pref = a * math.log(x)
        return math.exp(x) * math.gamma(a) - math.exp(log_pref) * _lower_series_scaled(a, x, acc)
    return math.exp(a * math.log(x)) * _upper_cf(a, x, acc)


def _upper_scaled_scalar(a, x, acc):
    if math.isnan(a) or math.isnan(x):
        raise DomainError("incomplete gamma of NaN")
    if x < 0.0 or (x == 0.0 and a <= 0.0):
        raise DomainError(f"Gamma({a!r}, {x!r}) is not defined/finite")
    if x == 0.0:
        return math.gamma(a)
    if a > 0.0:
        return _upper_scaled_positive(a, x, acc)
    # Downward recurrence: e^x G(a, x) = (e^x G(a+1, x) - x^a) / a
    steps = int(math.floor(-a)) + 1
    base = a + steps
    if base == 1.0:
        # a is a non-positive integer; start from Gamma(0, x) = E1(x)
        steps -= 1
        base = 0.0
        value = _expint_e1_scaled(x, acc)
    else:
        value = _upper_scaled_positive(base, x, acc)
    for k in range(1, steps + 1):
        ak = base - k
        value = (value - math.exp(ak * math.log(x))) / ak
    return value


def upper_incomplete_gamma_scaled(a, x, acc=DEFAULT_ACCURACY):
    """
    Exponentially scaled upper incomplete gamma, ``exp(x) * Gamma(a, x)``.

    Same domain and algorithm as :func:`upper_incomplete_gamma`; the
    scaling keeps the value representable for large ``x``.
    """
    return _scalar_or_array(lambda aa, xx: _upper_scaled_scalar(aa, xx, acc), a, x)


def upper_incomplete_gamma(a, x, acc=DEFAULT_ACCURACY):
    """
    Upper incomplete gamma function ``Gamma(a, x)``.

    Parameters
    ----------
    a : float
        Any real order.  Non-positive orders are reached by the downward
        recurrence ``Gamma(a, x) = (Gamma(a+1, x) - x**a e**-x) / a``.
    x : float
        Lower integration limit, ``x > 0`` (``x == 0`` allowed for
        ``a > 0``).
    acc : Accuracy, optional

    Returns
    -------
    float or numpy.ndarray

    Notes
    -----
    For positive order the power series of the lower function is used
    when ``x < a + 1`` and the Legendre continued fraction otherwise.
    """
    def scalar(aa, xx):
        scaled = _upper_scaled_scalar(aa, xx, acc)
        return scaled if xx == 0.0 else scaled * math.exp(-xx)

    return _scalar_or_array(scalar, a, x)


# xxxxxxxxxx Parabolic cylinder functions xxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxx
_PCF_STEP = 1.0 / 16.0


def _pcf_integral(v, z):
    """
    ``int_0^inf t^(v-1) exp(-z t - t^2/2) dt`` by the trapezoidal rule in
    ``w = log t``.

    The integrand is analytic in the strip ``|Im w| < pi/4`` and decays
    doubly exponentially on the right and like ``exp(v w)`` on the left,
    so the trapezoidal sum converges geometrically in the step size.
    """
    t_peak = 0.5 * (-z + math.sqrt(z * z + 4.0 * v))
    w_peak = math.log(t_peak)
    g_peak = v * w_peak - z * t_peak - 0.5 * t_peak * t_peak

    # left tail shrinks like exp(v (w - w_peak))
    w_lo = w_peak - 46.0 / v - 1.0
    w_hi = w_peak + 1.0
    while True:
        t_hi = math.exp(w_hi)
        if v * w_hi - z * t_hi - 0.5 * t_hi * t_hi - g_peak < -46.0:
            break
        w_hi += 1.0
    n = int(math.ceil((w_hi - w_lo) / _PCF_STEP))
    w = w_peak + _PCF_STEP * np.arange(
        -int(math.ceil((w_peak - w_lo) / _PCF_STEP)), n + 1
    )
    t = np.exp(w)
    g = v * w - z * t - 0.5 * t * t
    return math.exp(g_peak) * _PCF_STEP * math.fsum(np.exp(g - g_peak))


def _check_order(p):
    if not p < 0.0:
        raise UnsupportedOrderError(
            f"only negative parabolic cylinder orders are supported, got {p!r}"
        )


def _pcd_scaled_scalar(p, z):
    _check_order(p)
    if not math.isfinite(z):
        raise DomainError("parabolic cylinder argument must be finite")
    v = -p
    return _pcf_integral(v, z) / math.gamma(v)


def parabolic_cylinder_d_scaled(p, z):
    """
    ``exp(z**2 / 4) * D_p(z)`` for ``p < 0``.

    This is the form that appears in the SER closed form, where the
    Gaussian factor would otherwise under- and overflow in turn.
    """
    return _scalar_or_array(_pcd_scaled_scalar, p, z)


def parabolic_cylinder_d(p, z):
    """
    Parabolic cylinder function ``D_p(z)`` of negative order.

    Evaluated from the integral representation

    .. math::

        D_{-v}(z) = \\frac{e^{-z^2/4}}{\\Gamma(v)}
                    \\int_0^\\infty t^{v-1} e^{-z t - t^2/2}\\,dt,
        \\qquad v = -p > 0.

    Parameters
    ----------
    p : float
        Order, strictly negative.
    z : float or array_like

    Raises
    ------
    UnsupportedOrderError
        For ``p >= 0``.
    """
    def scalar(pp, zz):
        return _pcd_scaled_scalar(pp, zz) * math.exp(-0.25 * zz * zz)

    return _scalar_or_array(scalar, p, z)
