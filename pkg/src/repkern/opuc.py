"""Orthogonal polynomials on the unit circle, driven by trigonometric moments.

The engine consumes a moment sequence c_k = int e^{-ik t} w(t) dt / (2 pi),
runs the Szego recursion to produce monic orthogonal polynomials, Verblunsky
coefficients and leading coefficients, and evaluates Christoffel-Darboux
kernels and Christoffel functions. A Gram-matrix route (`christoffel_oracle`)
solves the same extremal problem by Hermitian factorization and serves as an
independent cross-check on the recursion path.

Binary64 and extended precision are both supported; extended paths run in
mpmath at `precision_bits` significand bits.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import mpmath as mp
import numpy as np
from scipy.special import roots_jacobi

from .errors import (
    ConditioningError,
    IndefiniteMatrixError,
    PoleError,
    QuadratureError,
)
from .special import gamma_complex

_INDEFINITE_HINT = (
    "moment matrix is not positive definite at this order; "
    "recompute the moments at a tighter accuracy target or raise precision_bits"
)


def _weight_normalization(gamma: float, tau: float) -> float:
    """Constant making the bare (g = 1) weight a probability density."""
    y = complex(gamma, tau)
    num = 4.0 ** gamma * abs(gamma_complex(1 + y)) ** 2
    return num / gamma_complex(2 * gamma + 1).real


@dataclass(frozen=True)
class CircleWeight:
    """Weight w(t) = N(gamma, tau) g(t) e^{(pi - t) tau} sin(t/2)^{2 gamma} on [0, 2 pi].

    Parameters
    ----------
    gamma : float
        Singularity exponent at t = 0, must exceed -1/2.
    tau : float
        Jump exponent; tau != 0 makes the weight discontinuous at t = 0.
    g : None, sequence, or callable
        Smooth positive factor. None means g = 1. A sequence (g0, g1, ...)
        is read as the cosine-series g(t) = g0 + 2 sum_k Re(gk e^{ikt}).
        A callable is evaluated pointwise and must accept numpy arrays.

    The normalization N makes the g = 1 weight integrate to 1 against
    dt / (2 pi).
    """

    gamma: float
    tau: float = 0.0
    g: object = None

    def __post_init__(self):
        if not self.gamma > -0.5:
            raise ValueError("gamma must exceed -1/2")
        if self.g_at(0.0) <= 0:
            raise ValueError("smooth factor must be positive at t = 0")

    def g_at(self, theta):
        if self.g is None:
            return np.ones_like(np.asarray(theta, dtype=float)) if np.ndim(theta) else 1.0
        if callable(self.g):
            return self.g(theta)
        theta = np.asarray(theta, dtype=float)
        coeffs = list(self.g)
        out = np.full(theta.shape, float(np.real(coeffs[0])))
        for k, ck in enumerate(coeffs[1:], start=1):
            out = out + 2.0 * (np.cos(k * theta) * np.real(ck) - np.sin(k * theta) * np.imag(ck))
        return out if out.shape else float(out)

    def g_coefficients(self):
        """Cosine-series coefficients, or None when g is not a trigonometric polynomial."""
        if self.g is None:
            return [1.0 + 0j]
        if callable(self.g):
            return None
        return [complex(ck) for ck in self.g]

    def density(self, theta):
        """Density of the measure against dt / (2 pi); vectorized over theta."""
        theta = np.asarray(theta, dtype=float)
        norm = _weight_normalization(self.gamma, self.tau)
        with np.errstate(divide="ignore"):
            sing = np.sin(theta / 2.0) ** (2.0 * self.gamma)
        out = norm * np.exp((math.pi - theta) * self.tau) * sing * self.g_at(theta)
        return out if out.shape else float(out)


@dataclass(frozen=True)
class MomentSequence:
    """Trigonometric moments c_k = int e^{-ikt} dmu(t), k = 0..K.

    Entries are python complex at precision_bits = 53 and mpmath complex
    above. Negative indices follow from realness of the weight,
    c_{-k} = conj(c_k).
    """

    c: tuple
    precision_bits: int = 53

    def __post_init__(self):
        if len(self.c) == 0:
            raise ValueError("need at least c_0")
        c0 = self.c[0]
        if not (abs(complex(c0).imag) <= 1e-12 * abs(complex(c0)) and complex(c0).real > 0):
            raise ValueError("c_0 must be real and positive")

    @property
    def order(self) -> int:
        return len(self.c) - 1

    def m(self, l: int):
        """Power moment m_l = int z^l dmu = conj(c_l)."""
        if l >= 0:
            return _conj(self.c[l])
        return self.c[-l]

    def toeplitz_gram(self, order: int):
        """Hermitian Gram matrix G[k, j] = <z^j, z^k> = m_{j-k}, size order + 1."""
        if order > self.order:
            raise ValueError("not enough moments for this order")
        if self.precision_bits <= 53:
            G = np.empty((order + 1, order + 1), dtype=complex)
            for k in range(order + 1):
                for j in range(order + 1):
                    G[k, j] = self.m(j - k)
            return G
        G = mp.matrix(order + 1, order + 1)
        for k in range(order + 1):
            for j in range(order + 1):
                G[k, j] = self.m(j - k)
        return G

    def scaled(self, factor: float) -> "MomentSequence":
        return MomentSequence(tuple(ck * factor for ck in self.c), self.precision_bits)


@dataclass(frozen=True)
class VerblunskyCoefficients:
    """Recursion data: alpha_k for k < n_max and kappa_k for k <= n_max.

    kappa_k is the leading coefficient of the k-th orthonormal polynomial,
    kappa_{k+1} = kappa_k / sqrt(1 - |alpha_k|^2), so kappa is nondecreasing
    whenever all |alpha_k| < 1.
    """

    alpha: tuple
    kappa: tuple

    def __post_init__(self):
        if len(self.kappa) != len(self.alpha) + 1:
            raise ValueError("kappa must be one longer than alpha")

    @property
    def n_max(self) -> int:
        return len(self.alpha)

    def validate(self, strict: bool = True) -> float:
        """Largest |alpha_k|; raises when any coefficient leaves the open disk."""
        worst = 0.0
        for a in self.alpha:
            worst = max(worst, float(abs(a)))
        if strict and worst >= 1.0:
            raise IndefiniteMatrixError(_INDEFINITE_HINT)
        return worst


@dataclass(frozen=True)
class KernelEvaluation:
    """One kernel value K_n(z, w) with the route that produced it."""

    z: complex
    w: complex
    n: int
    value: complex
    path: str


@dataclass(frozen=True)
class QuadratureConfig:
    """Panel layout for weighted quadrature on [0, 2 pi].

    Endpoint panels of width `delta` around t = 0 and t = 2 pi use
    Gauss-Jacobi nodes absorbing the sin(t/2)^{2 gamma} factor; the middle
    panel uses the trapezoid rule refined by Richardson extrapolation.
    """

    delta: float = math.pi / 2
    endpoint_nodes: int | None = None
    mid_initial: int | None = None
    max_doublings: int = 10
    target_rel: float = 1e-12


def _conj(v):
    if isinstance(v, (mp.mpf, mp.mpc)):
        return mp.conj(v)
    return np.conj(v) if isinstance(v, np.generic) else complex(v).conjugate()


# ---------------------------------------------------------------------------
# moments by quadrature


def _romberg(f_vec, a: float, b: float, n0: int, max_doublings: int, target: float):
    """Trapezoid + Richardson table for a vectorized integrand on [a, b]."""
    xs = np.linspace(a, b, n0 + 1)
    h = (b - a) / n0
    vals = f_vec(xs)
    T = h * (np.sum(vals) - 0.5 * (vals[0] + vals[-1]))
    rows = [[T]]
    for level in range(1, max_doublings + 1):
        mids = (xs[:-1] + xs[1:]) / 2.0
        mv = f_vec(mids)
        T = 0.5 * rows[-1][0] + 0.5 * h * np.sum(mv)
        h /= 2.0
        xs = np.sort(np.concatenate([xs, mids]))
        row = [T]
        for j in range(1, level + 1):
            fac = 4.0 ** j
            row.append(row[j - 1] + (row[j - 1] - rows[-1][j - 1]) / (fac - 1.0))
        err = abs(row[-1] - rows[-1][-1])
        rows.append(row)
        if err < target:
            return row[-1], err
    return rows[-1][-1], abs(rows[-1][-1] - rows[-2][-1])


def weighted_quadrature(weight: CircleWeight, f: Callable, quad: QuadratureConfig | None = None):
    """int_0^{2 pi} f(t) dmu(t) with dmu = weight.density(t) dt / (2 pi).

    f must accept numpy arrays of angles. Returns (value, error_estimate).
    """
    quad = quad or QuadratureConfig()
    delta = quad.delta
    two_g = 2.0 * weight.gamma
    n_end = quad.endpoint_nodes or 96
    x, wts = roots_jacobi(n_end, 0.0, two_g)
    # left panel [0, delta]: density = t^{2 gamma} * analytic
    t_left = delta * (1.0 + x) / 2.0
    scale = (delta / 2.0) ** (two_g + 1.0)

    def smooth_part(ts):
        # density with the t^{2 gamma} factor divided out, times f, over 2 pi
        base = weight.density(ts) / ts ** two_g
        return base * f(ts) / (2.0 * math.pi)

    left = scale * np.sum(wts * smooth_part(t_left))
    # right panel [2 pi - delta, 2 pi] via t -> 2 pi - s
    t_right = 2.0 * math.pi - t_left

    def smooth_part_right(ss):
        ts = 2.0 * math.pi - ss
        base = weight.density(ts) / ss ** two_g
        return base * f(ts) / (2.0 * math.pi)

    right = scale * np.sum(wts * smooth_part_right(t_left))

    def mid_f(ts):
        return weight.density(ts) * f(ts) / (2.0 * math.pi)

    n0 = quad.mid_initial or 512
    target = quad.target_rel * max(1.0, abs(left) + abs(right))
    mid_re, err_re = _romberg(lambda ts: np.real(mid_f(ts)), delta, 2.0 * math.pi - delta,
                              n0, quad.max_doublings, target)
    mid_im, err_im = _romberg(lambda ts: np.imag(mid_f(ts)), delta, 2.0 * math.pi - delta,
                              n0, quad.max_doublings, target)
    value = left + right + complex(mid_re, mid_im)
    return value, err_re + err_im


def trig_moments(weight: CircleWeight, K: int, quad: QuadratureConfig | None = None) -> MomentSequence:
    """Moments c_k, k = 0..K, by singularity-aware panel quadrature (binary64).

    Endpoint panels use Gauss-Jacobi nodes with exponent 2 gamma; the middle
    panel uses trapezoid sums under Richardson refinement sized to the
    oscillation of e^{-iKt}. Raises QuadratureError when the refinement
    budget cannot reach the relative target.
    """
    quad = quad or QuadratureConfig()
    n_end = quad.endpoint_nodes or max(96, 2 * K + 32)
    n_mid = quad.mid_initial or max(512, 16 * K)
    cfg = QuadratureConfig(quad.delta, n_end, n_mid, quad.max_doublings, quad.target_rel)
    c = []
    c0 = None
    for k in range(K + 1):
        f = (lambda kk: (lambda ts: np.exp(-1j * kk * ts)))(k)
        val, err = weighted_quadrature(weight, f, cfg)
        if k == 0:
            c0 = abs(val)
        if err > 10.0 * cfg.target_rel * max(c0, 1.0):
            raise QuadratureError(
                f"moment {k}: error estimate {err:.2e} above target; "
                "raise mid_initial or max_doublings"
            )
        c.append(val)
    return MomentSequence(tuple(c), 53)


# ---------------------------------------------------------------------------
# Szego recursion from moments


def monic_from_moments(moms: MomentSequence, n: int):
    """Monic orthogonal polynomials of degree <= n from moments.

    Runs the Szego recursion, solving for each Verblunsky coefficient from
    the orthogonality condition <z Phi_k, 1> = conj(alpha_k) ||Phi_k||^2.
    Returns (VerblunskyCoefficients, tables) with tables[k] the coefficient
    vector of the monic Phi_k. Raises IndefiniteMatrixError when the moments
    fail positive definiteness at the working precision.
    """
    if n > moms.order - 1:
        raise ValueError("need moments to order n + 1")
    if moms.precision_bits <= 53:
        return _monic_float(moms, n)
    with mp.workprec(moms.precision_bits):
        return _monic_mp(moms, n)


def _monic_float(moms: MomentSequence, n: int):
    mvec = np.array([complex(moms.m(l)) for l in range(n + 2)])
    phi = np.array([1.0 + 0j])
    phis = np.array([1.0 + 0j])
    norm2 = float(np.real(moms.m(0)))
    alphas = []
    kappas = [1.0 / math.sqrt(norm2)]
    tables = [phi.copy()]
    for k in range(n):
        ip = np.dot(phi, mvec[1:k + 2])
        a_k = np.conj(ip / norm2)
        zphi = np.concatenate([[0.0], phi])
        phis_p = np.concatenate([phis, [0.0]])
        phi = zphi - np.conj(a_k) * phis_p
        phis = phis_p - a_k * zphi
        shrink = 1.0 - abs(a_k) ** 2
        if shrink <= 0.0:
            raise IndefiniteMatrixError(_INDEFINITE_HINT)
        norm2 *= shrink
        alphas.append(complex(a_k))
        kappas.append(1.0 / math.sqrt(norm2))
        tables.append(phi.copy())
    return VerblunskyCoefficients(tuple(alphas), tuple(kappas)), tables


def _monic_mp(moms: MomentSequence, n: int):
    mvec = [mp.mpc(moms.m(l)) for l in range(n + 2)]
    phi = [mp.mpc(1)]
    phis = [mp.mpc(1)]
    norm2 = mp.re(mp.mpc(moms.m(0)))
    alphas = []
    kappas = [1 / mp.sqrt(norm2)]
    tables = [list(phi)]
    for k in range(n):
        ip = mp.fsum(phi[j] * mvec[j + 1] for j in range(len(phi)))
        a_k = mp.conj(ip / norm2)
        zphi = [mp.mpc(0)] + phi
        phis_p = phis + [mp.mpc(0)]
        phi = [zphi[j] - mp.conj(a_k) * phis_p[j] for j in range(len(zphi))]
        phis = [phis_p[j] - a_k * zphi[j] for j in range(len(zphi))]
        shrink = 1 - abs(a_k) ** 2
        if shrink <= 0:
            raise IndefiniteMatrixError(_INDEFINITE_HINT)
        norm2 = norm2 * shrink
        alphas.append(a_k)
        kappas.append(1 / mp.sqrt(norm2))
        tables.append(list(phi))
    return VerblunskyCoefficients(tuple(alphas), tuple(kappas)), tables


def orthogonality_residual(moms: MomentSequence, tables, max_degree: int | None = None) -> float:
    """Largest normalized |<Phi_i, Phi_j>| over i != j, plus monicity defects."""
    N = (max_degree if max_degree is not None else len(tables) - 1) + 1
    if moms.precision_bits <= 53:
        G = moms.toeplitz_gram(N - 1)
        A = np.zeros((N, N), dtype=complex)
        for i in range(N):
            A[i, : len(tables[i])] = tables[i]
        # <Phi_i, Phi_j> = sum_{a,b} A[i,a] conj(A[j,b]) G[b,a]
        M = A @ G.T @ A.conj().T
        d = np.sqrt(np.abs(np.diag(M)))
        off = M / np.outer(d, d)
        np.fill_diagonal(off, 0.0)
        worst = float(np.max(np.abs(off)))
        for i in range(N):
            worst = max(worst, abs(complex(tables[i][i]) - 1.0))
        return worst
    with mp.workprec(moms.precision_bits):
        worst = mp.mpf(0)
        norms = []
        for i in range(N):
            s = mp.fsum(
                tables[i][a] * mp.conj(tables[i][b]) * moms.m(a - b)
                for a in range(len(tables[i]))
                for b in range(len(tables[i]))
            )
            norms.append(mp.sqrt(abs(s)))
        for i in range(N):
            for j in range(i):
                s = mp.fsum(
                    tables[i][a] * mp.conj(tables[j][b]) * moms.m(a - b)
                    for a in range(len(tables[i]))
                    for b in range(len(tables[j]))
                )
                worst = max(worst, abs(s) / (norms[i] * norms[j]))
            worst = max(worst, abs(tables[i][i] - 1))
        return float(worst)


# ---------------------------------------------------------------------------
# evaluation


def eval_phi_pair(vc: VerblunskyCoefficients, n: int, z):
    """(Phi_n(z), Phi*_n(z)) by the coupled Szego recursion; z may be an array."""
    if n > vc.n_max:
        raise ValueError("recursion data too short for this degree")
    phi = _one_like(z)
    phis = _one_like(z)
    for k in range(n):
        a_k = vc.alpha[k]
        new_phi = z * phi - _conj(a_k) * phis
        phis = phis - a_k * (z * phi)
        phi = new_phi
    return phi, phis


def _one_like(z):
    if isinstance(z, np.ndarray):
        return np.ones_like(z, dtype=complex)
    if isinstance(z, (mp.mpf, mp.mpc)):
        return mp.mpc(1)
    return 1.0 + 0j


def kernel_direct(vc: VerblunskyCoefficients, n: int, z, w) -> KernelEvaluation:
    """K_n(z, w) = sum_{k <= n} kappa_k^2 Phi_k(z) conj(Phi_k(w)).

    Degree-by-degree recursion at both points with compensated accumulation;
    the summation order is fixed, so results are bit-stable run to run.
    """
    if n > vc.n_max:
        raise ValueError("recursion data too short for this degree")
    mp_mode = isinstance(vc.kappa[0], (mp.mpf, mp.mpc)) or isinstance(z, (mp.mpf, mp.mpc))
    pz = _one_like(z)
    pzs = _one_like(z)
    pw = _one_like(w)
    pws = _one_like(w)
    kap2 = vc.kappa[0] ** 2
    if mp_mode:
        total = kap2 * pz * mp.conj(pw)
        for k in range(n):
            a_k = vc.alpha[k]
            pz, pzs = z * pz - mp.conj(a_k) * pzs, pzs - a_k * (z * pz)
            pw, pws = w * pw - mp.conj(a_k) * pws, pws - a_k * (w * pw)
            kap2 = kap2 / (1 - abs(a_k) ** 2)
            total += kap2 * pz * mp.conj(pw)
        return KernelEvaluation(z, w, n, total, "direct")
    sum_re, comp_re = 0.0, 0.0
    sum_im, comp_im = 0.0, 0.0
    term = kap2 * pz * np.conj(pw)
    sum_re, comp_re = _neu(sum_re, comp_re, term.real)
    sum_im, comp_im = _neu(sum_im, comp_im, term.imag)
    for k in range(n):
        a_k = vc.alpha[k]
        pz, pzs = z * pz - np.conj(a_k) * pzs, pzs - a_k * (z * pz)
        pw, pws = w * pw - np.conj(a_k) * pws, pws - a_k * (w * pw)
        kap2 = kap2 / (1.0 - abs(a_k) ** 2)
        term = kap2 * pz * np.conj(pw)
        sum_re, comp_re = _neu(sum_re, comp_re, term.real)
        sum_im, comp_im = _neu(sum_im, comp_im, term.imag)
    value = complex(sum_re + comp_re, sum_im + comp_im)
    return KernelEvaluation(complex(z), complex(w), n, value, "direct")


def _neu(total: float, comp: float, x: float):
    t = total + x
    if abs(total) >= abs(x):
        comp += (total - t) + x
    else:
        comp += (x - t) + total
    return t, comp


def kernel_cd(vc: VerblunskyCoefficients, n: int, z, w) -> KernelEvaluation:
    """K_n(z, w) by the Christoffel-Darboux identity.

    Needs recursion data through degree n + 1 and a well-separated pair:
    raises ConditioningError when |1 - z conj(w)| < 1e-8.
    """
    if n + 1 > vc.n_max:
        raise ValueError("Christoffel-Darboux route needs data through degree n + 1")
    denom = 1.0 - z * _conj(w)
    if abs(denom) < 1e-8:
        raise ConditioningError(
            "z conj(w) too close to 1 for the Christoffel-Darboux form; "
            "use kernel_direct"
        )
    pz, pzs = eval_phi_pair(vc, n + 1, z)
    pw, pws = eval_phi_pair(vc, n + 1, w)
    kap2 = vc.kappa[n + 1] ** 2
    value = kap2 * (pzs * _conj(pws) - pz * _conj(pw)) / denom
    return KernelEvaluation(complex(z), complex(w), n, complex(value), "cd")


def christoffel(vc: VerblunskyCoefficients, n: int, z) -> float:
    """lambda_n(z) = 1 / K_n(z, z), the minimal weighted energy at z."""
    val = kernel_direct(vc, n, z, z).value
    if isinstance(val, (mp.mpf, mp.mpc)):
        return mp.re(val) ** -1
    return 1.0 / val.real


def christoffel_oracle(moms: MomentSequence, n: int, z) -> float:
    """lambda_n(z) by direct Hermitian solve against the Toeplitz Gram matrix.

    Minimizes ||P||^2 over monic-normalized P(z) = 1 using the moment Gram
    matrix, independent of the Szego recursion. Extended precision follows
    moms.precision_bits.
    """
    if n > moms.order:
        raise ValueError("not enough moments for this order")
    if moms.precision_bits <= 53:
        G = moms.toeplitz_gram(n)
        u = np.array([np.conj(complex(z)) ** k for k in range(n + 1)])
        try:
            L = np.linalg.cholesky(G)
        except np.linalg.LinAlgError as exc:
            raise IndefiniteMatrixError(_INDEFINITE_HINT) from exc
        y = np.linalg.solve(L, u)
        quad_form = float(np.real(np.vdot(y, y)))
        return 1.0 / quad_form
    with mp.workprec(moms.precision_bits):
        G = moms.toeplitz_gram(n)
        L = _mp_cholesky(G)
        u = [mp.conj(mp.mpc(z)) ** k for k in range(n + 1)]
        y = _mp_forward_solve(L, u)
        quad_form = mp.re(mp.fsum(yy * mp.conj(yy) for yy in y))
        return 1 / quad_form


def _mp_cholesky(G):
    n = G.rows
    L = mp.matrix(n, n)
    for i in range(n):
        for j in range(i + 1):
            s = G[i, j] - mp.fsum(L[i, k] * mp.conj(L[j, k]) for k in range(j))
            if i == j:
                s = mp.re(s)
                if s <= 0:
                    raise IndefiniteMatrixError(_INDEFINITE_HINT)
                L[i, j] = mp.sqrt(s)
            else:
                L[i, j] = s / L[j, j]
    return L


def _mp_forward_solve(L, b):
    n = L.rows
    y = [mp.mpc(0)] * n
    for i in range(n):
        y[i] = (b[i] - mp.fsum(L[i, k] * y[k] for k in range(i))) / L[i, i]
    return y


def regularity_diagnostic(vc: VerblunskyCoefficients, n: int) -> float:
    """kappa_n^{1/n}; drifts to 1/cap(supp mu) for regular measures."""
    if n < 1:
        raise ValueError("need n >= 1")
    return float(vc.kappa[n]) ** (1.0 / n)
