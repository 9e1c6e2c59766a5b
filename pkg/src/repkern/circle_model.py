"""Closed forms for the Hua-Pickrell family and its scaling-limit kernels.

The weight e^{(pi - t) tau} sin(t/2)^{2 gamma} (normalized to a probability
measure) admits explicit orthogonal polynomials, Verblunsky coefficients and
trigonometric moments in terms of terminating Gauss sums and Pochhammer
ratios. This module provides those closed forms, the confluent-hypergeometric
kernel that the scaled Christoffel-Darboux ratio converges to, and the
analytic quantities attached to it: the real diagonal profile T, the phase
ratio Theta, the Hermite-Biehler margin, and the inequality checks used by
the property suites.

Everything is binary64 by default; functions with a `prec` argument switch
to mpmath significand arithmetic, which is the path to use once |a| grows
past ~8 and the oscillatory series start cancelling.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import mpmath as mp
import numpy as np

from .errors import PoleError
from .opuc import (
    CircleWeight,
    KernelEvaluation,
    MomentSequence,
    VerblunskyCoefficients,
    kernel_direct,
)
from .special import gamma_complex, hyp1f1, hyp2f1_terminating

DIAGONAL_SWITCH = 1e-6


@dataclass(frozen=True)
class HuaPickrellParams:
    """Weight parameters: singularity exponent gamma > -1/2 and jump exponent tau."""

    gamma: float
    tau: float = 0.0

    def __post_init__(self):
        if not self.gamma > -0.5:
            raise ValueError("gamma must exceed -1/2")

    @property
    def y(self) -> complex:
        return complex(self.gamma, self.tau)

    def weight(self, g=None) -> CircleWeight:
        return CircleWeight(self.gamma, self.tau, g)


@dataclass(frozen=True)
class LimitKernelValue:
    """Scaling-limit kernel value and the branch that produced it."""

    value: complex
    branch: str


def hp_weight(theta, p: HuaPickrellParams):
    """Normalized weight density against dt / (2 pi); infinite endpoints allowed."""
    return p.weight().density(theta)


# ---------------------------------------------------------------------------
# closed forms


def hp_moments(p: HuaPickrellParams, K: int, precision_bits: int = 53) -> MomentSequence:
    """Trigonometric moments c_k = (-1)^k (1+y-k)_k / (1+conj(y))_k, k <= K.

    Computed by the first-order ratio c_k / c_{k-1} = -(y-k+1) / (k+conj(y)),
    which stays bounded at every order.
    """
    if precision_bits <= 53:
        y = p.y
        c = [1.0 + 0j]
        for k in range(1, K + 1):
            c.append(c[-1] * (-(y - k + 1) / (k + y.conjugate())))
        return MomentSequence(tuple(c), 53)
    with mp.workprec(precision_bits):
        y = mp.mpc(p.gamma, p.tau)
        c = [mp.mpc(1)]
        for k in range(1, K + 1):
            c.append(c[-1] * (-(y - k + 1) / (k + mp.conj(y))))
        return MomentSequence(tuple(c), precision_bits)


def modulated_moments(p: HuaPickrellParams, g_coeffs, K: int,
                      precision_bits: int = 53) -> MomentSequence:
    """Moments of g(t) dmu for a trigonometric polynomial g.

    g_coeffs = (g0, g1, ..., gJ) encodes g(t) = g0 + 2 sum_j Re(gj e^{ijt});
    the new moments are the two-sided convolution c^g_k = sum_j ghat_j c_{k-j}
    with ghat_{-j} = conj(ghat_j).
    """
    J = len(g_coeffs) - 1
    base = hp_moments(p, K + J, precision_bits)

    def c_at(l: int):
        if l >= 0:
            return base.c[l]
        return _cj(base.c[-l])

    if precision_bits <= 53:
        ghat = {j: complex(g_coeffs[j]) for j in range(J + 1)}
    else:
        ghat = {j: mp.mpc(g_coeffs[j]) for j in range(J + 1)}
    out = []
    for k in range(K + 1):
        acc = ghat[0] * c_at(k)
        for j in range(1, J + 1):
            acc = acc + ghat[j] * c_at(k - j) + _cj(ghat[j]) * c_at(k + j)
        out.append(acc)
    return MomentSequence(tuple(out), precision_bits)


def _cj(v):
    return mp.conj(v) if isinstance(v, (mp.mpf, mp.mpc)) else complex(v).conjugate()


def hp_verblunsky(p: HuaPickrellParams, n: int,
                  precision_bits: int = 53) -> VerblunskyCoefficients:
    """alpha_k = -(y)_{k+1} / (1+conj(y))_{k+1} for k < n, with kappa chain.

    Uses the stable one-step ratio alpha_k = alpha_{k-1} (y+k) / (1+conj(y)+k)
    rather than separately accumulated Pochhammer products.
    """
    if precision_bits <= 53:
        y = p.y
        alphas = []
        kappas = [1.0]
        prod = 1.0 + 0j
        for k in range(n):
            prod = prod * (y + k) / (1 + y.conjugate() + k)
            alphas.append(-prod)
            kappas.append(kappas[-1] / math.sqrt(1.0 - abs(prod) ** 2))
        return VerblunskyCoefficients(tuple(alphas), tuple(kappas))
    with mp.workprec(precision_bits):
        y = mp.mpc(p.gamma, p.tau)
        alphas = []
        kappas = [mp.mpf(1)]
        prod = mp.mpc(1)
        for k in range(n):
            prod = prod * (y + k) / (1 + mp.conj(y) + k)
            alphas.append(-prod)
            kappas.append(kappas[-1] / mp.sqrt(1 - abs(prod) ** 2))
        return VerblunskyCoefficients(tuple(alphas), tuple(kappas))


def _pochhammer_ratio_prefactor(n: int, num_base, den_base):
    """prod_{j<n} (num_base + j) / (den_base + j) without overflow."""
    out = num_base ** 0
    for j in range(n):
        out = out * (num_base + j) / (den_base + j)
    return out


def hp_monic(n: int, z, p: HuaPickrellParams, prec: int | None = None):
    """Monic orthogonal polynomial Phi_n(z) in closed form."""
    c = 2.0 * p.gamma + 1.0
    if prec is not None:
        with mp.workprec(prec):
            pref = _pochhammer_ratio_prefactor(n, mp.mpf(c), 1 + mp.mpc(p.gamma, p.tau))
            return pref * hyp2f1_terminating(n, 1 + mp.mpc(p.gamma, p.tau), c, 1 - mp.mpc(z), prec=prec)
    pref = _pochhammer_ratio_prefactor(n, complex(c), 1 + p.y)
    return pref * hyp2f1_terminating(n, 1 + p.y, c, 1 - complex(z))


def hp_star(n: int, z, p: HuaPickrellParams, prec: int | None = None):
    """Reversed polynomial Phi*_n(z) = z^n conj(Phi_n(1/conj(z))) in closed form."""
    c = 2.0 * p.gamma + 1.0
    yb = p.y.conjugate()
    if prec is not None:
        with mp.workprec(prec):
            pref = _pochhammer_ratio_prefactor(n, mp.mpf(c), 1 + mp.mpc(yb))
            return pref * hyp2f1_terminating(n, mp.mpc(p.y), c, 1 - mp.mpc(z), prec=prec)
    pref = _pochhammer_ratio_prefactor(n, complex(c), 1 + yb)
    return pref * hyp2f1_terminating(n, p.y, c, 1 - complex(z))


def hp_kappa(n: int, p: HuaPickrellParams) -> float:
    """Leading orthonormal coefficient kappa_n = |(1+y)_n| / sqrt(n! (2 gamma + 1)_n)."""
    out = 1.0
    for j in range(n):
        out *= abs(1 + p.y + j) / math.sqrt((j + 1) * (2.0 * p.gamma + 1.0 + j))
    return out


def hp_monic_coefficients(n: int, p: HuaPickrellParams, precision_bits: int = 212):
    """Power-basis coefficients of Phi_n as mpmath complex, constant term first.

    Expands the terminating Gauss sum in powers of (1 - z) and converts by
    binomials; the conversion cancels heavily, hence the extended default.
    """
    with mp.workprec(precision_bits):
        y = mp.mpc(p.gamma, p.tau)
        c = mp.mpf(2 * p.gamma + 1)
        pref = _pochhammer_ratio_prefactor(n, c, 1 + y)
        # t_k = pref * (-n)_k (1+y)_k / ((c)_k k!)
        t = [pref]
        for k in range(n):
            t.append(t[-1] * (-(n - k)) * (1 + y + k) / ((c + k) * (k + 1)))
        coeffs = [mp.mpc(0)] * (n + 1)
        for j in range(n + 1):
            acc = mp.mpc(0)
            for k in range(j, n + 1):
                acc += t[k] * mp.binomial(k, j) * (-1) ** j
            coeffs[j] = acc
        return coeffs


def hp_kernel_at_one(n: int, p: HuaPickrellParams) -> float:
    """K_n(1, 1) = (2 gamma + 2)_n / n!, by a telescoped running product."""
    j = np.arange(1, n + 1, dtype=float)
    return float(np.prod((2.0 * p.gamma + 1.0 + j) / j))


def hp_kernel(n: int, z, w, p: HuaPickrellParams) -> KernelEvaluation:
    """K_n(z, w) through the recursion seeded with closed-form alpha."""
    vc = hp_verblunsky(p, n)
    base = kernel_direct(vc, n, complex(z), complex(w))
    return KernelEvaluation(base.z, base.w, n, base.value, "closed")


def hp_kernel_grid(n: int, zs, ws, p: HuaPickrellParams):
    """Elementwise K_n(zs[i], ws[i]) for numpy arrays, one vectorized recursion."""
    zs = np.asarray(zs, dtype=complex)
    ws = np.asarray(ws, dtype=complex)
    y = p.y
    pz = np.ones_like(zs)
    pzs = np.ones_like(zs)
    pw = np.ones_like(ws)
    pws = np.ones_like(ws)
    total = pz * np.conj(pw)
    kap2 = 1.0
    prod = 1.0 + 0j
    for k in range(n):
        prod = prod * (y + k) / (1 + y.conjugate() + k)
        a = -prod
        pz, pzs = zs * pz - np.conj(a) * pzs, pzs - a * (zs * pz)
        pw, pws = ws * pw - np.conj(a) * pws, pws - a * (ws * pw)
        kap2 = kap2 / (1.0 - abs(a) ** 2)
        total = total + kap2 * pz * np.conj(pw)
    return total


# ---------------------------------------------------------------------------
# limiting kernel and analytic profiles


def limit_kernel(a, b, p: HuaPickrellParams, prec: int | None = None) -> LimitKernelValue:
    """Scaling limit of K_n(e^{ia/n}, e^{ib/n}) / K_n(1, 1).

    Generic branch:

        (2 gamma + 1) [F(yb; c; -i bbar) F(y; c; i a)
                       - F(1+yb; c; -i bbar) F(1+y; c; i a)] / (i (bbar - a))

    with F = 1F1, c = 2 gamma + 1, y = gamma + i tau, yb = conj(y). Within
    1e-6 of the diagonal bbar = a the quotient form loses about six digits,
    so the continuity value

        F(1+yb; c; -i bbar) F(2+y; c+1; i bbar) (1+y)
        - F(yb; c; -i bbar) F(1+y; c+1; i bbar) y

    is returned instead, tagged branch = "diagonal".
    """
    y = p.y
    yb = y.conjugate()
    c = 2.0 * p.gamma + 1.0
    bbar = _cj(b)
    one = mp.mpc(1) if prec is not None else 1.0 + 0j

    def F(x, cc, zz):
        return hyp1f1(x, cc, zz, prec=prec).value

    if abs(complex(bbar) - complex(a)) < DIAGONAL_SWITCH:
        v = (
            F(1 + yb, c, -1j * bbar) * F(2 + y, c + 1, 1j * bbar) * (1 + y)
            - F(yb, c, -1j * bbar) * F(1 + y, c + 1, 1j * bbar) * y
        )
        return LimitKernelValue(complex(v), "diagonal")
    num = F(yb, c, -1j * bbar) * F(y, c, 1j * a) - F(1 + yb, c, -1j * bbar) * F(1 + y, c, 1j * a)
    v = (c * one) * num / (1j * (bbar - a))
    return LimitKernelValue(complex(v), "generic")


def T_func(a: float, gamma: float, prec: int | None = None) -> float:
    """Real diagonal profile T(a) at tau = 0; positive on the whole line, T(0) = 1."""
    c = 2.0 * gamma + 1.0

    def F(x, cc, zz):
        return hyp1f1(x, cc, zz, prec=prec).value

    v = (
        F(1 + gamma, c, -1j * a) * F(2 + gamma, c + 1, 1j * a) * (1 + gamma)
        - F(gamma, c, -1j * a) * F(1 + gamma, c + 1, 1j * a) * gamma
    )
    return complex(v).real


def zeroo_quotient(a, gamma: float, prec: int | None = None) -> float:
    """(2g+1) (|F(g;2g+1;ia)|^2 - |F(1+g;2g+1;ia)|^2) / (2 Im a), Im a != 0.

    The sign of this quotient is the strict-positivity statement behind the
    phase-ratio maximum principle; for real a use T_func instead.
    """
    a = complex(a)
    if a.imag == 0.0:
        raise ValueError("quotient form needs Im a != 0; use T_func on the real line")
    c = 2.0 * gamma + 1.0
    f0 = hyp1f1(gamma, c, 1j * a, prec=prec).value
    f1 = hyp1f1(1 + gamma, c, 1j * a, prec=prec).value
    return c * (abs(f0) ** 2 - abs(f1) ** 2) / (2.0 * a.imag)


def theta_ratio(a, gamma: float, prec: int | None = None) -> complex:
    """Phase ratio Theta(a) = F(1+g; 2g+1; ia) / F(g; 2g+1; ia).

    Unimodular for real a, strictly inside the unit circle for Im a > 0. For
    Im a < 0 the denominator may vanish, so the value is computed as the
    reciprocal 1 / Theta(-a), whose denominator is zero-free.
    """
    a = complex(a)
    c = 2.0 * gamma + 1.0
    if a.imag < 0.0:
        flipped = theta_ratio(-a, gamma, prec=prec)
        if abs(flipped) < 1e-13:
            raise PoleError("phase ratio has a pole at this point")
        return 1.0 / flipped
    num = hyp1f1(1 + gamma, c, 1j * a, prec=prec).value
    den = hyp1f1(gamma, c, 1j * a, prec=prec).value
    if abs(den) < 1e-13:
        raise PoleError("phase-ratio denominator vanishes to working accuracy")
    return complex(num) / complex(den)


def hb_margin(z, p: HuaPickrellParams, prec: int | None = None) -> float:
    """|E(z)| - |E(conj(z))| for E(z) = F(y; 2 gamma + 1; iz) e^{-iz/2}.

    Nonnegative for Im z > 0: E belongs to the Hermite-Biehler class.
    """
    z = complex(z)
    c = 2.0 * p.gamma + 1.0

    def E(zz):
        return complex(hyp1f1(p.y, c, 1j * zz, prec=prec).value) * cmath.exp(-1j * zz / 2.0)

    return abs(E(z)) - abs(E(z.conjugate()))


def christoffel_limit(a, p: HuaPickrellParams, prec: int | None = None) -> float:
    """Limit of n^{2 gamma + 1} lambda_n(e^{ia/n}): Gamma(2 gamma + 2) / K_lim(a, a)."""
    diag = limit_kernel(a, a, p, prec=prec).value.real
    return gamma_complex(2.0 * p.gamma + 2.0).real / diag


# ---------------------------------------------------------------------------
# inequality sweeps


def fbound_constant(a_values, n_values) -> float:
    """sup of n |e^{ia/n} - 1| over the sampled compact set."""
    worst = 0.0
    for a in a_values:
        for n in n_values:
            worst = max(worst, n * abs(cmath.exp(1j * complex(a) / n) - 1.0))
    return worst


def fbound_check(a, n: int, m: int, p: HuaPickrellParams, C_K: float) -> bool:
    """|2F1(-m, 1+y; 2g+1; 1-e^{ia/n})| <= 2F1(-n, 1+|y|; 2g+1; -C_K/n)."""
    if not 0 <= m <= n:
        raise ValueError("need 0 <= m <= n")
    c = 2.0 * p.gamma + 1.0
    lhs = abs(hyp2f1_terminating(m, 1 + p.y, c, 1.0 - cmath.exp(1j * complex(a) / n)))
    rhs = hyp2f1_terminating(n, 1.0 + abs(p.y), c, -C_K / n).real
    return lhs <= rhs


def or_constant(a_values, n_values) -> float:
    """sup of |(e^{-ia/n} - 1) / (-ia/n)|; the a = 0 limit contributes 1."""
    worst = 1.0
    for a in a_values:
        if complex(a) == 0:
            continue
        for n in n_values:
            x = -1j * complex(a) / n
            worst = max(worst, abs((cmath.exp(x) - 1.0) / x))
    return worst


def or_margin(theta: float, a, n: int, r: float, C_K: float) -> float:
    """e^{C_K r |a| / 2} minus |(e^{i theta} + e^{ia/n}) / (2 e^{ia/n})|^{rn}."""
    a = complex(a)
    lhs = abs((cmath.exp(1j * theta) + cmath.exp(1j * a / n)) / (2.0 * cmath.exp(1j * a / n))) ** (r * n)
    return math.exp(C_K * r * abs(a) / 2.0) - lhs
