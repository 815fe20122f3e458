"""
Closed-form (high-SNR) performance of the X-duplex relay.

Branch 1 is antenna configuration A (links 1 and 4, RSI channel 1) and
branch 2 configuration B (links 2 and 3, RSI channel 2).  For a
threshold ``x`` on the equivalent SINR, FD modes must exceed ``x`` and
HD modes must exceed ``y = x**2 + 2 x``, which is the same event on the
half-rate scale.

The expressions are asymptotic.  They are accurate when the transmit
power is well above the noise (see :func:`high_snr_valid`) and can stray
slightly outside ``[0, 1]`` below that; probability outputs are clamped
and every clamp is counted (see :func:`clamp_events`).
"""

import math
from collections import Counter
from dataclasses import dataclass

import numpy as np
from scipy import integrate

from .channel import derive_constants
from .duplex import Scheme, parse_scheme
from .errors import DomainError, PreconditionError, QuadratureError
from . import specfun

__all__ = [
    "BranchTerms",
    "SerTerms",
    "branch_terms",
    "tail_fd",
    "tail_hd",
    "joint_tail_l1_l2",
    "branch_cdf",
    "cdf_xd",
    "outage_branch",
    "outage_xd",
    "f_helper",
    "ser_terms",
    "ser_xd",
    "ser_fd_floor",
    "ser_quadrature",
    "diversity_xd",
    "diversity_baseline",
    "outage_threshold",
    "high_snr_valid",
    "clamp_events",
    "reset_clamp_events",
    "DEGENERACY_EPS",
    "VALIDITY_DB",
]

DEGENERACY_EPS = 1e-5
VALIDITY_DB = 20.0

_CLAMPS = Counter()


def clamp_events():
    """Number of probability outputs clamped into [0, 1], per function."""
    return dict(_CLAMPS)


def reset_clamp_events():
    _CLAMPS.clear()


def _clamp(value, where):
    if value < 0.0 or value > 1.0:
        _CLAMPS[where] += 1
        return min(max(value, 0.0), 1.0)
    return value


def outage_threshold(r0):
    """SINR threshold ``2**r0 - 1`` for a target rate in bit/s/Hz."""
    return 2.0 ** r0 - 1.0


def high_snr_valid(p_t, sigma2=1.0):
    """Whether the asymptotic expressions are in their accuracy regime."""
    return 10.0 * math.log10(p_t / sigma2) >= VALIDITY_DB


# xxxxxxxxxx CDF of the end-to-end SINR xxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxx
@dataclass(frozen=True)
class BranchTerms:
    """Intermediate quantities of one antenna branch at threshold ``x``.

    ``beta0`` is the Bessel argument of the exact HD tail, ``beta1`` and
    ``beta2`` those of the FD tail and of the joint tail, ``beta3`` the
    exponent of the joint tail and ``alpha`` the weight of the ``K_0``
    corrections.  ``i1``/``i2`` are the two bracketed groups of the
    branch CDF ``1 - i1 + i2``.
    """

    beta0: float
    beta1: float
    beta2: float
    beta3: float
    alpha: float
    i1: float
    i2: float


def _branch_setup(branch, params, consts):
    lam1, lam2, lam3, lam4 = params.lambdas
    if branch == 1:
        return lam1, lam4, consts.eta1, consts.c1
    if branch == 2:
        return lam2, lam3, consts.eta2, consts.c2
    raise ValueError(f"branch must be 1 or 2, got {branch!r}")


def _check_x(x):
    if not x > 0.0:
        raise DomainError(f"threshold must be positive, got {x!r}")


def _k0(z):
    return specfun.bessel_k(0, z)


def _k1(z):
    return specfun.bessel_k(1, z)


def branch_terms(branch, x, params, consts=None):
    """Evaluate the Bessel arguments and weights of one branch."""
    _check_x(x)
    consts = consts or derive_constants(params)
    lam_s, lam_d, eta, c = _branch_setup(branch, params, consts)
    p_s, p_r = params.p_s, params.p_r
    y = x * x + 2.0 * x
    denom = lam_s * lam_d * p_s * p_r
    beta0 = 2.0 * math.sqrt((y * y + y) / denom)
    beta1 = 2.0 * math.sqrt((x + x * x) / denom)
    beta2 = 2.0 * math.sqrt((y * y + y + (x + 1.0) * y / eta) / denom)
    beta3 = c * y + (x + 1.0) / (eta * lam_s * p_s)
    alpha = 2.0 * eta * (x * x + x) / (lam_d * p_r * (1.0 + eta * x) ** 2)

    e_fd = math.exp(-c * x)
    e_joint = math.exp(-beta3)
    i1 = (beta1 * _k1(beta1) * e_fd + eta * x * beta2 * _k1(beta2) * e_joint) / (1.0 + eta * x)
    i2 = alpha * (_k0(beta1) * e_fd - _k0(beta2) * e_joint)
    return BranchTerms(beta0, beta1, beta2, beta3, alpha, i1, i2)


def _tails(branch, x, params, consts):
    """Unclamped ``(fd, hd, l1, l2)`` tail pieces of one branch."""
    t = branch_terms(branch, x, params, consts)
    _, _, eta, c = _branch_setup(branch, params, consts)
    y = x * x + 2.0 * x
    e_fd = math.exp(-c * x)
    e3 = math.exp(-t.beta3)
    hd = t.beta0 * _k1(t.beta0) * math.exp(-c * y)
    b2k1 = t.beta2 * _k1(t.beta2)
    fd = t.beta1 * _k1(t.beta1) * e_fd / (1.0 + eta * x) - t.alpha * _k0(t.beta1) * e_fd
    l1 = b2k1 * e3 / (1.0 + eta * x) - t.alpha * _k0(t.beta2) * e3
    l2 = hd - b2k1 * e3
    return fd, hd, l1, l2


def tail_fd(branch, x, params, consts=None):
    """``Pr(gamma_fd > x)`` for the FD mode of ``branch`` (high-SNR form)."""
    consts = consts or derive_constants(params)
    return _clamp(_tails(branch, x, params, consts)[0], "tail_fd")


def tail_hd(branch, x, params, consts=None):
    """``Pr(gamma_hd > x**2 + 2x)``; exact for amplify-and-forward."""
    consts = consts or derive_constants(params)
    return _clamp(_tails(branch, x, params, consts)[1], "tail_hd")


def joint_tail_l1_l2(branch, x, params, consts=None):
    """
    The two pieces ``(L1, L2)`` of ``Pr(gamma_fd > x, gamma_hd > y)``,
    split on whether the RSI gain is above or below the level at which
    the FD constraint becomes the binding one.
    """
    consts = consts or derive_constants(params)
    return _tails(branch, x, params, consts)[2:]


def branch_cdf(branch, x, params, consts=None):
    """
    ``Pr(gamma_fd < x, gamma_hd < y)`` for one branch, assembled by
    inclusion-exclusion as ``1 - tail_fd - tail_hd + L1 + L2``.

    Algebraically this is ``1 - i1 + i2`` of :class:`BranchTerms`.
    """
    consts = consts or derive_constants(params)
    fd, hd, l1, l2 = _tails(branch, x, params, consts)
    return 1.0 - fd - hd + l1 + l2


def _require_identical_rsi(params):
    if not params.identical_rsi:
        raise PreconditionError("closed forms assume identical RSI channels")


def cdf_xd(x, params, consts=None):
    """
    Asymptotic CDF of the X-duplex equivalent SINR.

    The two antenna branches involve disjoint channels, so the CDF is the
    product of the per-branch CDFs.
    """
    _check_x(x)
    _require_identical_rsi(params)
    consts = consts or derive_constants(params)
    value = branch_cdf(1, x, params, consts) * branch_cdf(2, x, params, consts)
    return _clamp(value, "cdf_xd")


def outage_branch(branch, x, params, consts=None):
    """Per-branch factor of :func:`outage_xd`."""
    _check_x(x)
    consts = consts or derive_constants(params)
    lam_s, _, eta, c = _branch_setup(branch, params, consts)
    beta3 = c * (x * x + 2.0 * x) + (x + 1.0) / (eta * lam_s * params.p_s)
    return 1.0 - (math.exp(-c * x) + eta * x * math.exp(-beta3)) / (1.0 + eta * x)


def outage_xd(x, params, consts=None):
    """
    Outage probability with ``x K_1(x) -> 1`` and ``K_0`` dropped.

    Tends to zero as the transmit power grows, unlike any FD-only scheme.
    """
    _check_x(x)
    _require_identical_rsi(params)
    consts = consts or derive_constants(params)
    value = outage_branch(1, x, params, consts) * outage_branch(2, x, params, consts)
    return _clamp(value, "outage_xd")


# xxxxxxxxxx Average SER xxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxx
def f_helper(v, beta, gamma, t):
    """
    ``int_0^inf x^(v-1) (e^(-t x) + t^2 x^2 e^(-5 t x / 3) / 2) e^(-beta x^2 - gamma x) dx``

    in closed form through parabolic cylinder functions.  The bracket is
    the approximation of ``1 / (1 + t x)`` that makes the RSI factor
    integrable.
    """
    if not (beta > 0 and t > 0):
        raise DomainError("f_helper needs beta > 0 and t > 0")
    s = math.sqrt(2.0 * beta)
    first = (2.0 * beta) ** (-0.5 * v) * math.gamma(v) * specfun.parabolic_cylinder_d_scaled(
        -v, (gamma + t) / s
    )
    second = (
        0.5
        * t
        * t
        * (2.0 * beta) ** (-0.5 * v - 1.0)
        * math.gamma(v + 2.0)
        * specfun.parabolic_cylinder_d_scaled(-v - 2.0, (gamma + 5.0 * t / 3.0) / s)
    )
    return first + second


@dataclass(frozen=True)
class SerTerms:
    """
    Pieces of the closed-form SER.

    ``s1`` ... ``s5`` are the integrals of ``exp(-a2 x) / sqrt(x)`` against
    the five groups of the outage expression, so that
    ``SER = a1 sqrt(a2) / (2 sqrt(pi)) * (s1 - s2 - s3 - s4 + s5)``.
    ``f2`` holds the three ``F2`` combinations and ``f3`` the ``F3``
    combination, each already divided by ``eta1 - eta2`` (averaged over
    the two perturbed evaluations when the branches are degenerate).
    """

    mu1: float
    mu1_2: float
    mu2: float
    mu2_2: float
    mu3: float
    f2: tuple
    f3: float
    s1: float
    s2: float
    s3: float
    s4: float
    s5: float
    degenerate: bool


def _exp_gamma_half(x):
    # e^x Gamma(1/2, x)
    return specfun.upper_incomplete_gamma_scaled(0.5, x)


def _mus(a2, c1, c2, e1, e2, lam1, lam2, p_s):
    r1 = 1.0 / (lam1 * p_s * e1)
    r2 = 1.0 / (lam2 * p_s * e2)
    mu1 = 2.0 * c1 + a2 + r1
    mu1_2 = 2.0 * c2 + a2 + r2
    mu3 = 2.0 * c1 + 2.0 * c2 + a2 + r1 + r2
    return mu1, mu1_2, mu1 + c2, mu1_2 + c1, mu3, r1, r2


def _cross_terms(a2, c1, c2, e1, e2, lam1, lam2, p_s):
    """(s5, f2 triple, f3) for distinct eta1 != eta2."""
    _, _, mu2, mu2_2, mu3, r1, r2 = _mus(a2, c1, c2, e1, e2, lam1, lam2, p_s)
    d = e1 - e2
    w = a2 + c1 + c2
    f3 = (math.sqrt(e1) * _exp_gamma_half(w / e1) - math.sqrt(e2) * _exp_gamma_half(w / e2)) / d

    def f2(v, beta, gam):
        return (e1 * f_helper(v, beta, gam, e1) - e2 * f_helper(v, beta, gam, e2)) / d

    f2_triple = (f2(1.5, c1, mu2), f2(1.5, c2, mu2_2), f2(2.5, c1 + c2, mu3))
    s5 = (
        math.sqrt(math.pi) * f3
        + e1 * math.exp(-r1) * f2_triple[0]
        + e2 * math.exp(-r2) * f2_triple[1]
        + e1 * e2 * math.exp(-r1 - r2) * f2_triple[2]
    )
    return s5, f2_triple, f3


def ser_terms(params, mod, consts=None):
    """Evaluate every piece of the closed-form SER (see :class:`SerTerms`)."""
    _require_identical_rsi(params)
    consts = consts or derive_constants(params)
    a2 = mod.a2
    e1, e2, c1, c2 = consts.eta1, consts.eta2, consts.c1, consts.c2
    lam1, lam2 = params.lambdas[0], params.lambdas[1]
    p_s = params.p_s
    mu1, mu1_2, mu2, mu2_2, mu3, r1, r2 = _mus(a2, c1, c2, e1, e2, lam1, lam2, p_s)

    s1 = math.sqrt(math.pi / a2)
    s2 = math.sqrt(math.pi / e1) * _exp_gamma_half((a2 + c1) / e1)
    s3 = e1 * math.exp(-r1) * f_helper(1.5, c1, mu1, e1)
    s4 = math.sqrt(math.pi / e2) * _exp_gamma_half((a2 + c2) / e2) + e2 * math.exp(
        -r2
    ) * f_helper(1.5, c2, mu1_2, e2)

    degenerate = abs(e1 - e2) <= DEGENERACY_EPS * max(e1, e2)
    if degenerate:
        # two-sided perturbation of eta2 around eta1
        evals = [
            _cross_terms(a2, c1, c2, e1, e1 * (1.0 + sgn * DEGENERACY_EPS), lam1, lam2, p_s)
            for sgn in (1.0, -1.0)
        ]
        s5 = 0.5 * (evals[0][0] + evals[1][0])
        f2 = tuple(0.5 * (p + q) for p, q in zip(evals[0][1], evals[1][1]))
        f3 = 0.5 * (evals[0][2] + evals[1][2])
    else:
        s5, f2, f3 = _cross_terms(a2, c1, c2, e1, e2, lam1, lam2, p_s)
    return SerTerms(mu1, mu1_2, mu2, mu2_2, mu3, f2, f3, s1, s2, s3, s4, s5, degenerate)


def ser_xd(params, mod, consts=None):
    """
    Closed-form average SER of X-duplex.

    Integrates the outage expression of :func:`outage_xd` against the
    SER kernel term by term; RSI factors ``1 / (1 + eta x)`` multiplying
    a Gaussian are replaced by ``e^(-u) + u^2 e^(-5u/3) / 2``.
    """
    t = ser_terms(params, mod, consts)
    pref = mod.a1 * math.sqrt(mod.a2) / (2.0 * math.sqrt(math.pi))
    value = pref * (t.s1 - t.s2 - t.s3 - t.s4 + t.s5)
    return _clamp(value, "ser_xd")


def ser_fd_floor(eta, mod):
    """
    High-SNR limit of the SER of a fixed FD mode.

    As the power grows the FD CDF tends to ``eta x / (1 + eta x)``, which
    integrates to this floor.
    """
    if not eta > 0:
        raise DomainError("eta must be positive")
    a1, a2 = mod.a1, mod.a2
    return (
        a1
        * math.sqrt(a2)
        / (2.0 * math.sqrt(math.pi * eta))
        * (0.5 * math.sqrt(math.pi))
        * specfun.upper_incomplete_gamma_scaled(-0.5, a2 / eta)
    )


QUAD_REL_TOL = 1e-10
_QUAD_TAIL = 1e-16


def ser_quadrature(cdf, mod, points=None, rel_tol=QUAD_REL_TOL):
    """
    ``a1 sqrt(a2)/(2 sqrt(pi)) int_0^inf e^(-a2 x) x^(-1/2) F(x) dx`` by
    adaptive quadrature.

    Parameters
    ----------
    cdf : callable
        ``F(x)`` for ``x > 0``, values in ``[0, 1]``.
    mod : Modulation
    points : sequence of float, optional
        Abscissae (in ``x``) where ``F`` is not smooth, e.g. the jumps of
        an empirical CDF.  The range is split there.
    rel_tol : float

    Notes
    -----
    With ``x = t**2`` the integrand becomes ``2 e^(-a2 t^2) F(t^2)``,
    which has no singularity at the origin.  Integration stops at the
    ``t`` beyond which ``2 e^(-a2 t^2)`` (an upper bound of the
    integrand) is below 1e-16 of the integrand's peak.
    """
    a1, a2 = mod.a1, mod.a2

    def g(t):
        return 2.0 * math.exp(-a2 * t * t) * cdf(t * t) if t > 0 else 0.0

    probe_t = np.linspace(0.0, math.sqrt(40.0 / a2), 161)[1:]
    probe = np.array([g(t) for t in probe_t])
    peak = float(probe.max())
    if peak <= 0.0:
        return 0.0
    t_peak = float(probe_t[probe.argmax()])
    t_end = math.sqrt((math.log(2.0) - math.log(_QUAD_TAIL * peak)) / a2)

    breaks = {0.0, t_end}
    if t_peak < t_end:
        breaks.add(t_peak)
    if points is not None:
        breaks.update(math.sqrt(p) for p in points if 0.0 < p and math.sqrt(p) < t_end)
    edges = sorted(breaks)

    pieces = []
    for lo, hi in zip(edges[:-1], edges[1:]):
        res = integrate.quad(g, lo, hi, epsabs=0.0, epsrel=rel_tol, limit=400, full_output=1)
        val, err = res[0], res[1]
        if len(res) > 3 and abs(err) > 10 * rel_tol * abs(val) + 1e-300:
            raise QuadratureError(
                "SER quadrature did not converge",
                {"interval": (lo, hi), "value": val, "abserr": err, "message": res[3]},
            )
        pieces.append(val)
    return a1 * math.sqrt(a2) / (2.0 * math.sqrt(math.pi)) * math.fsum(pieces)


# xxxxxxxxxx Diversity order xxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxx
def _symmetric_setting(params):
    lam = params.lambdas
    if not (lam[0] == lam[1] and lam[2] == lam[3] and params.identical_rsi):
        raise PreconditionError(
            "diversity expressions assume lambda1 = lambda2, lambda3 = lambda4 "
            "and identical RSI channels"
        )
    lam1, lam4 = lam[0], lam[3]
    eta = params.lambda_rsi[0] / lam1  # equal source and relay power
    c3 = 1.0 / lam1 + 1.0 / lam4
    return lam1, eta, c3


def diversity_xd(p_t, x, params):
    """
    Finite-SNR diversity order of X-duplex, ``-d ln P_out / d ln P_t``
    of :func:`outage_xd` with ``P_S = P_R = P_t``.

    Only the link means and RSI mean of ``params`` are used; its powers
    are replaced by ``p_t``.
    """
    _check_x(x)
    if not p_t > 0:
        raise DomainError("p_t must be positive")
    lam1, eta, c3 = _symmetric_setting(params)
    rho1 = c3 * x
    rho2 = c3 * (x * x + 2.0 * x) + (x + 1.0) / (eta * lam1)
    a = 1.0 + eta * x
    e1, e2 = math.exp(-rho1 / p_t), math.exp(-rho2 / p_t)
    m = e1 + eta * x * e2
    dm = (rho1 * e1 + eta * x * rho2 * e2) / (p_t * p_t)
    # a - M without cancellation
    gap = -math.expm1(-rho1 / p_t) - eta * x * math.expm1(-rho2 / p_t)
    num = p_t * (2.0 * a * dm - 2.0 * m * dm)
    return num / (gap * gap)


def diversity_baseline(scheme, p_t, x, params, exact=False):
    """
    Finite-SNR diversity order of HD mode A, FD mode A or HY.

    Parameters
    ----------
    scheme : Scheme or str
        One of ``hd-a``, ``fd-a``, ``hy``.
    p_t, x : float
        Transmit power (both nodes) and SINR threshold.
    params : SystemParams
        Symmetric link and RSI means.
    exact : bool
        For HD/FD, use the log-derivative of the high-SNR outage itself
        instead of its first-order expansion.  HY has only the expanded
        form.
    """
    _check_x(x)
    scheme = parse_scheme(scheme)
    lam1, eta, c3 = _symmetric_setting(params)
    y = x * x + 2.0 * x
    if scheme is Scheme.HD_A_FIXED:
        if exact:
            u = c3 * y / p_t
            return u * math.exp(-u) / -math.expm1(-u)
        return 1.0 - c3 * y / p_t
    if scheme is Scheme.FD_A_FIXED:
        if exact:
            u = c3 * x / p_t
            e = math.exp(-u) / (1.0 + eta * x)
            return u * e / (1.0 - e)
        return (1.0 - x * c3 / p_t) / (1.0 + p_t * eta / c3)
    if scheme is Scheme.HY:
        hd_part = c3 * y + (x + 1.0) / (eta * lam1)
        num = (c3 * x) ** 2 + eta * x * hd_part**2
        den = c3 * x + eta * x * c3 * y + eta * x * (x + 1.0) / (eta * lam1)
        return 1.0 - num / (p_t * den)
    raise ValueError(f"no diversity closed form for scheme {scheme.value!r}")
