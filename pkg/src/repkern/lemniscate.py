"""Area-measure orthogonal polynomials on the lemniscate |z^m - 1| < r^m.

The region splits into m congruent components around the m-th roots of
unity when r < 1. Writing w = (z^m - 1)/r^m maps each component onto the
unit disk, and the degree-n monic polynomial for area measure decomposes by
residue class s = n mod m:

  * s = m - 1: exactly z^{m-1} (z^m - 1)^k, with a closed-form norm;
  * s < m - 1: z^s r^{mk} Q_k(w), where Q_k is a quotient built from two
    consecutive monic polynomials of the circle measure
    |dw| / |r^m w + 1|^v, v = 2 - 2/m - 2s/m.

The second branch is stated for all sufficiently large k; the builder pins
the crossover empirically against a Gram-Schmidt oracle and uses the oracle
below it. High-degree evaluation always goes through the w-representation:
expanding these polynomials into z-powers and summing is catastrophically
ill-conditioned past degree a few dozen, while the structural form is
stable at any degree.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import mpmath as mp
import numpy as np
from scipy.special import roots_legendre

from .errors import (
    BelowThresholdError,
    ConditioningError,
    DomainError,
    NonconvergenceError,
)
from .opuc import KernelEvaluation, MomentSequence, monic_from_moments
from .special import hyp1f1


@dataclass(frozen=True)
class LemniscateParams:
    """Region parameters: {z : |z^m - 1| < r^m} with 0 < r < 1, m >= 1."""

    r: float
    m: int

    def __post_init__(self):
        if not 0.0 < self.r < 1.0:
            raise ValueError("need 0 < r < 1 for m disjoint components")
        if not (isinstance(self.m, int) and self.m >= 1):
            raise ValueError("m must be a positive integer")

    @classmethod
    def from_r_pow_m(cls, r_pow_m: float, m: int) -> "LemniscateParams":
        return cls(r_pow_m ** (1.0 / m), m)

    @property
    def rm(self) -> float:
        """r^m, the component radius in the w-plane."""
        return self.r ** self.m


@dataclass(frozen=True)
class BoundaryPoint:
    """Boundary parametrization z0^m = 1 + r^m e^{it} on component j."""

    t: float
    j: int
    z0: complex
    w0: complex


def boundary_point(t: float, j: int, p: LemniscateParams) -> BoundaryPoint:
    """Boundary point z0 = omega^j (1 + r^m e^{it})^{1/m}, w0 = e^{it}."""
    if not 0 <= j < p.m:
        raise ValueError("component index out of range")
    w0 = cmath.exp(1j * t)
    omega = cmath.exp(2j * math.pi * j / p.m)
    z0 = omega * (1.0 + p.rm * w0) ** (1.0 / p.m)
    return BoundaryPoint(t, j, z0, w0)


def component_map(w, j: int, p: LemniscateParams):
    """z_j(w) = omega^j (1 + r^m w)^{1/m}, the w-disk chart of component j."""
    omega = cmath.exp(2j * math.pi * j / p.m)
    return omega * np.power(1.0 + p.rm * np.asarray(w, dtype=complex), 1.0 / p.m)


# ---------------------------------------------------------------------------
# the circle measure |dw| / |r^m w + 1|^q


def gamma_q_weight(w_point, q: float, p: LemniscateParams) -> float:
    """Density |r^m w + 1|^{-q} of the companion circle measure."""
    return float(abs(p.rm * complex(w_point) + 1.0) ** (-q))


def _binomial_coeffs(a: float, count: int):
    """binom(a, j) for j = 0..count-1 by the one-step ratio."""
    out = np.empty(count)
    out[0] = 1.0
    for j in range(1, count):
        out[j] = out[j - 1] * (a - j + 1) / j
    return out


def _series_length(p: LemniscateParams, tol: float = 1e-18) -> int:
    return max(64, int(math.ceil(math.log(tol) / (2.0 * math.log(p.rm)))) + 8)


def gamma_q_moments(p: LemniscateParams, q: float, K: int,
                    precision_bits: int = 53) -> MomentSequence:
    """Moments c_k = sum_l B_{l+k} B_l r^{m(2l+k)} with B_j = binom(-q/2, j).

    This is the double binomial series of |1 + r^m e^{i t}|^{-q} against
    dt / (2 pi); it converges geometrically since r^m < 1.
    """
    L = _series_length(p)
    x = p.rm
    if precision_bits <= 53:
        B = _binomial_coeffs(-q / 2.0, K + L + 1)
        powers = x ** np.arange(2 * (K + L) + 1)
        c = []
        for k in range(K + 1):
            l_idx = np.arange(L)
            terms = B[l_idx + k] * B[l_idx] * powers[2 * l_idx + k]
            c.append(complex(np.sum(terms[::-1])))
        return MomentSequence(tuple(c), 53)
    with mp.workprec(precision_bits):
        xq = mp.mpf(x)
        B = [mp.mpf(1)]
        for j in range(1, K + L + 1):
            B.append(B[-1] * (mp.mpf(-q) / 2 - j + 1) / j)
        c = []
        for k in range(K + 1):
            c.append(mp.mpc(mp.fsum(B[l + k] * B[l] * xq ** (2 * l + k) for l in range(L))))
        return MomentSequence(tuple(c), precision_bits)


def szego_D(z, q: float, p: LemniscateParams) -> complex:
    """Outer function (1 + r^m / z)^{q/2}, principal branch, D(inf) = 1."""
    z = complex(z)
    if abs(z) <= p.rm:
        raise DomainError("outer function is defined only for |z| > r^m")
    return (1.0 + p.rm / z) ** (q / 2.0)


# ---------------------------------------------------------------------------
# circle bank: monic polynomials of gamma^{(v_s)} for each s < m-1


class CircleBank:
    """Monic circle polynomials Phi_k(w; gamma^{(v_s)}) for s = 0..m-2.

    Stores coefficient tables to degree max_k + 1 per residue class, the
    values at w = -r^m, the consecutive ratios rho_k, and the quotient
    coefficients Q_k from dividing Phi_{k+1} - rho_k Phi_k by (w + r^m).
    """

    def __init__(self, p: LemniscateParams, max_k: int, precision_bits: int = 53):
        self.params = p
        self.max_k = max_k
        self.precision_bits = precision_bits
        self.tables = {}
        self.q_tables = {}
        self.rho = {}
        for s in range(p.m - 1):
            v = 2.0 - 2.0 / p.m - 2.0 * s / p.m
            moms = gamma_q_moments(p, v, max_k + 2, precision_bits)
            _, tables = monic_from_moments(moms, max_k + 1)
            if precision_bits > 53:
                tables = [np.array([complex(c) for c in tab]) for tab in tables]
            self.tables[s] = tables
            at = [complex(_horner(tab, -p.rm)) for tab in tables]
            rhos = []
            qs = []
            for k in range(max_k + 1):
                if at[k] == 0.0:
                    raise ConditioningError(
                        "circle polynomial vanishes at -r^m; cannot form the quotient"
                    )
                rho_k = at[k + 1] / at[k]
                rhos.append(rho_k)
                num = np.concatenate([[0.0 + 0j], np.zeros(0)])
                num = np.concatenate([tables[k], [0.0 + 0j]])
                num = tables[k + 1] - rho_k * num
                qs.append(_synthetic_divide(num, -p.rm))
            self.rho[s] = rhos
            self.q_tables[s] = qs

    def phi(self, s: int, k: int, w):
        """Monic Phi_k(w; gamma^{(v_s)}); w may be a numpy array."""
        return _horner(self.tables[s][k], w)


def _horner(coeffs, z):
    """Evaluate a constant-first coefficient vector at z (scalar or array)."""
    acc = np.zeros_like(np.asarray(z, dtype=complex)) if isinstance(z, np.ndarray) else 0.0 + 0j
    for c in reversed(tuple(coeffs)):
        acc = acc * z + c
    return acc


def _synthetic_divide(coeffs, root):
    """Coefficients of coeffs / (w - root); the remainder is dropped.

    The inputs here vanish at `root` by construction, so the remainder is a
    pure rounding residue.
    """
    n = len(coeffs) - 1
    out = np.zeros(n, dtype=complex)
    acc = coeffs[n]
    for j in range(n - 1, -1, -1):
        out[j] = acc
        acc = coeffs[j] + root * acc
    return out


def rho_ratio(s: int, k: int, bank: CircleBank) -> complex:
    """Phi_{k+1}(-r^m) / Phi_k(-r^m); drifts to -r^m (1 - v/(2k)) for large k."""
    return bank.rho[s][k]


# ---------------------------------------------------------------------------
# exact polynomials and norms


def prop72_phi(n: int, z, p: LemniscateParams, bank: CircleBank,
               threshold: int = 0):
    """Structural value of the degree-n monic area polynomial.

    s = m - 1 gives z^{m-1} (z^m - 1)^k at every degree. For s < m - 1 the
    value is z^s r^{mk} Q_k((z^m - 1)/r^m) where Q_k is the exact quotient
    held by the bank; below the crossover index `threshold` these quotients
    are not certified and BelowThresholdError is raised so callers fall back
    to the Gram-Schmidt oracle. The quotient form has no singularity at
    z^m = 1 - r^{2m}: the division is done once on coefficients.
    """
    k, s = divmod(n, p.m)
    z = np.asarray(z, dtype=complex) if isinstance(z, np.ndarray) else complex(z)
    if s == p.m - 1:
        return z ** s * (z ** p.m - 1.0) ** k
    if k < threshold:
        raise BelowThresholdError(
            f"structural branch certified only for k >= {threshold}; got k = {k}"
        )
    if k > bank.max_k:
        raise ValueError("bank too short for this degree")
    w = (z ** p.m - 1.0) / p.rm
    return z ** s * p.rm ** k * _horner(bank.q_tables[s][k], w)


def exact_norm2(n: int, p: LemniscateParams, bank: CircleBank | None = None) -> float:
    """||Phi_n||^2 under area measure from the structural representation.

    Degrees km + m - 1 have the closed form pi r^{2m(k+1)} / (m(k+1)); the
    other classes integrate |Q_k|^2 против the weighted w-disk Gram matrix.
    """
    k, s = divmod(n, p.m)
    if s == p.m - 1:
        return math.pi * p.rm ** (2 * (k + 1)) / (p.m * (k + 1))
    if bank is None:
        raise ValueError("s < m-1 norms need the circle bank")
    W = _disk_gram(s, bank)
    q = bank.q_tables[s][k]
    val = float(np.real(np.conj(q) @ W[: len(q), : len(q)] @ q))
    return p.rm ** (2 * (k + 1)) / p.m * val


_DISK_GRAM_CACHE = {}


def _disk_gram(s: int, bank: CircleBank):
    """G[i, j] = int_{|w|<1} w^i conj(w)^j |1 + r^m w|^{-v_s} dA(w)."""
    p = bank.params
    key = (id(bank), s)
    if key in _DISK_GRAM_CACHE:
        return _DISK_GRAM_CACHE[key]
    K = bank.max_k + 1
    v = 2.0 - 2.0 / p.m - 2.0 * s / p.m
    L = _series_length(p)
    P = K + L
    B = _binomial_coeffs(-v / 2.0, P + 1)
    x = p.rm
    pw = x ** np.arange(2 * P + 2)
    W = np.zeros((K, K))
    i_idx = np.arange(K)
    for d in range(K):
        ps = np.arange(d, P + 1)
        coef = B[ps] * B[ps - d] * pw[2 * ps - d]
        denom = 1.0 / (i_idx[:, None] + ps[None, :] + 1.0)
        col = math.pi * denom @ coef
        for i in range(K - d):
            W[i, i + d] = col[i]
            W[i + d, i] = col[i]
    _DISK_GRAM_CACHE[key] = W
    return W


@dataclass(frozen=True)
class KappaValue:
    """kappa_n^2 target with its provenance kind: exact or asymptotic."""

    value: float
    kind: str


def kappa_asymptotic(n: int, p: LemniscateParams) -> KappaValue:
    """kappa_n^2: exact (mk+m)/(pi r^{2mk+2m}) at degrees km+m-1,
    else the large-k form (mk+1+s)(1 + v/(2k)) / (pi r^{2km+2m})."""
    k, s = divmod(n, p.m)
    if s == p.m - 1:
        return KappaValue((p.m * k + p.m) / (math.pi * p.rm ** (2 * k + 2)), "exact")
    if k < 1:
        raise ValueError("asymptotic form needs k >= 1")
    v = 2.0 - 2.0 / p.m - 2.0 * s / p.m
    val = (p.m * k + 1 + s) * (1.0 + v / (2.0 * k)) / (math.pi * p.rm ** (2 * k + 2))
    return KappaValue(val, "asymptotic")


# ---------------------------------------------------------------------------
# area quadrature and the monomial Gram oracle


def area_quadrature(f, p: LemniscateParams, radial: int = 256, angular: int = 512,
                    target_rel: float = 1e-8, max_refinements: int = 2) -> complex:
    """Integral of f over the lemniscate against area measure.

    Pulls each component back to the unit w-disk, where the Jacobian is
    (r^{2m}/m^2) |1 + r^m w|^{2/m - 2}, and applies a radial Gauss-Legendre
    times angular trapezoid product rule; doubling both resolutions must
    move the value by less than target_rel or NonconvergenceError is raised.
    f must accept numpy arrays of complex points.
    """
    prev = _area_once(f, p, radial, angular)
    for _ in range(max_refinements):
        radial *= 2
        angular *= 2
        cur = _area_once(f, p, radial, angular)
        if abs(cur - prev) <= target_rel * max(1.0, abs(cur)):
            return cur
        prev = cur
    raise NonconvergenceError(
        "area quadrature did not settle under refinement; "
        "raise the resolution or smooth the integrand"
    )


def _area_once(f, p: LemniscateParams, radial: int, angular: int) -> complex:
    x, wts = roots_legendre(radial)
    rho = (x + 1.0) / 2.0
    wr = wts / 2.0
    phi = 2.0 * math.pi * np.arange(angular) / angular
    wa = 2.0 * math.pi / angular
    w = rho[:, None] * np.exp(1j * phi)[None, :]
    jac = (p.rm ** 2 / p.m ** 2) * np.abs(1.0 + p.rm * w) ** (2.0 / p.m - 2.0)
    base = (1.0 + p.rm * w) ** (1.0 / p.m)
    total = 0.0 + 0j
    for j in range(p.m):
        omega = cmath.exp(2j * math.pi * j / p.m)
        vals = f(omega * base) * jac
        radial_part = np.sum(vals * rho[:, None], axis=0) * 0.0
        radial_part = np.einsum("r,ra->a", wr * rho, vals)
        total += wa * np.sum(radial_part)
    return complex(total)


def area_monomial_gram(d1: int, d2: int, p: LemniscateParams,
                       precision_bits: int = 53):
    """<z^{d1}, z^{d2}> under area measure, by the exact binomial series.

    Zero unless d1 = d2 (mod m); otherwise
    (pi r^{2m} / m) sum_p binom(A, p) binom(B, p) r^{2mp} / (p + 1)
    with A = (d1+1)/m - 1, B = (d2+1)/m - 1.
    """
    if (d1 - d2) % p.m != 0:
        return mp.mpf(0) if precision_bits > 53 else 0.0
    A = (d1 + 1.0) / p.m - 1.0
    B = (d2 + 1.0) / p.m - 1.0
    L = _series_length(p) + max(d1, d2) // p.m
    if precision_bits <= 53:
        ba = _binomial_coeffs(A, L)
        bb = _binomial_coeffs(B, L)
        ps = np.arange(L)
        val = math.pi * p.rm ** 2 / p.m * np.sum((ba * bb * p.rm ** (2 * ps) / (ps + 1))[::-1])
        return float(val)
    with mp.workprec(precision_bits):
        x = mp.mpf(p.r) ** p.m
        Am, Bm = mp.mpf(A), mp.mpf(B)
        ba, bb = [mp.mpf(1)], [mp.mpf(1)]
        for jj in range(1, L):
            ba.append(ba[-1] * (Am - jj + 1) / jj)
            bb.append(bb[-1] * (Bm - jj + 1) / jj)
        s = mp.fsum(ba[pp] * bb[pp] * x ** (2 * pp) / (pp + 1) for pp in range(L))
        return mp.pi * x ** 2 / p.m * s


# ---------------------------------------------------------------------------
# bases


@dataclass(frozen=True)
class LemniscateBasis:
    """Monic area-orthogonal basis with per-degree evaluation plans.

    coefficients[d] is the z-power table of Phi_d (constant first) and
    norms[d] = ||Phi_d||^2. plans[d] records how Phi_d is evaluated:
    ("mono", coeffs) below the crossover, ("direct", k) for the s = m-1
    class, ("wpoly", s, k) for the structural quotient branch. source labels
    the construction route of the instance as a whole; prop72_threshold is
    the degree at which the structural branch takes over (max_degree + 1
    when it is never used). oracle_residual is the worst normalized
    off-diagonal Gram entry observed while orthogonalizing.
    """

    params: LemniscateParams
    max_degree: int
    coefficients: tuple
    norms: tuple
    source: str
    prop72_threshold: int
    plans: tuple
    bank: CircleBank | None
    oracle_residual: float

    def phi(self, d: int, z):
        """Phi_d(z); z may be a numpy array. Uses the stable plan, never
        the z-power table at structural degrees."""
        if d > self.max_degree:
            raise ValueError("degree beyond basis range")
        plan = self.plans[d]
        p = self.params
        if plan[0] == "mono":
            return _horner(plan[1], z)
        if plan[0] == "direct":
            k = plan[1]
            zz = np.asarray(z, dtype=complex) if isinstance(z, np.ndarray) else complex(z)
            return zz ** (p.m - 1) * (zz ** p.m - 1.0) ** k
        s, k = plan[1], plan[2]
        zz = np.asarray(z, dtype=complex) if isinstance(z, np.ndarray) else complex(z)
        w = (zz ** p.m - 1.0) / p.rm
        return zz ** s * p.rm ** k * _horner(self.bank.q_tables[s][k], w)

    def kappa2(self, d: int) -> float:
        return 1.0 / self.norms[d]


def gram_schmidt_oracle(max_degree: int, p: LemniscateParams,
                        precision_bits: int = 212) -> LemniscateBasis:
    """Brute-force monic orthogonal basis from the exact monomial Gram.

    Works residue class by residue class (cross-class entries vanish by
    m-fold symmetry), solving the normal equations by extended-precision
    Cholesky. Ground truth for the structural branch and the norm formulas.
    """
    with mp.workprec(precision_bits):
        coeff_tables = [None] * (max_degree + 1)
        norms = [None] * (max_degree + 1)
        worst = mp.mpf(0)
        for s in range(p.m):
            degs = list(range(s, max_degree + 1, p.m))
            if not degs:
                continue
            nclass = len(degs)
            G = mp.matrix(nclass, nclass)
            for i in range(nclass):
                for j in range(nclass):
                    G[i, j] = area_monomial_gram(degs[i], degs[j], p, precision_bits)
            for i, d in enumerate(degs):
                if i == 0:
                    class_coeffs = [mp.mpf(1)]
                    nrm = G[0, 0]
                else:
                    sub = mp.matrix(i, i)
                    for a in range(i):
                        for b in range(i):
                            sub[a, b] = G[a, b]
                    rhs = mp.matrix(i, 1)
                    for a in range(i):
                        rhs[a] = -G[a, i]
                    sol = mp.lu_solve(sub, rhs)
                    class_coeffs = [sol[a] for a in range(i)] + [mp.mpf(1)]
                    nrm = G[i, i] + mp.fsum(sol[a] * G[a, i] for a in range(i))
                    for l in range(i):
                        resid = G[i, l] + mp.fsum(sol[a] * G[a, l] for a in range(i))
                        scale = mp.sqrt(abs(nrm) * abs(G[l, l]))
                        worst = max(worst, abs(resid) / scale)
                tab = np.zeros(d + 1, dtype=complex)
                for jj, cc in enumerate(class_coeffs):
                    tab[s + jj * p.m] = complex(cc)
                coeff_tables[d] = tab
                norms[d] = float(mp.re(nrm))
        plans = tuple(("mono", coeff_tables[d]) for d in range(max_degree + 1))
        return LemniscateBasis(p, max_degree, tuple(coeff_tables), tuple(norms),
                               "oracle", max_degree + 1, plans, None, float(worst))


def detect_threshold(p: LemniscateParams, bank: CircleBank,
                     oracle: LemniscateBasis, tol: float = 1e-6) -> int:
    """Smallest k from which the structural branch matches the oracle.

    Scans every s < m - 1 over the oracle's degree range and returns the
    least k such that all structural coefficient tables with index >= k
    agree with the oracle to tol. Raises ConditioningError when even the
    largest comparable index disagrees.
    """
    if p.m == 1:
        return 0
    worst_by_k = {}
    for s in range(p.m - 1):
        k = 0
        while k * p.m + s <= oracle.max_degree and k <= bank.max_k:
            d = k * p.m + s
            struct = _structural_z_coefficients(d, p, bank)
            diff = np.max(np.abs(struct - oracle.coefficients[d]))
            worst_by_k[k] = max(worst_by_k.get(k, 0.0), float(diff))
            k += 1
    ks = sorted(worst_by_k)
    threshold = None
    for k in ks:
        if all(worst_by_k[kk] <= tol for kk in ks if kk >= k):
            threshold = k
            break
    if threshold is None:
        raise ConditioningError("structural branch never reaches oracle agreement")
    return threshold


def _structural_z_coefficients(d: int, p: LemniscateParams, bank: CircleBank | None):
    """z-power table of the structural Phi_d, by binomial composition."""
    k, s = divmod(d, p.m)
    out = np.zeros(d + 1, dtype=complex)
    if s == p.m - 1:
        binoms = _binomial_coeffs(float(k), k + 1)
        for t in range(k + 1):
            out[s + t * p.m] = binoms[t] * (-1.0) ** (k - t)
        return out
    q = bank.q_tables[s][k]
    for i, qi in enumerate(q):
        binoms = _binomial_coeffs(float(i), i + 1)
        scale = qi * p.rm ** (k - i)
        for t in range(i + 1):
            out[s + t * p.m] += scale * binoms[t] * (-1.0) ** (i - t)
    return out


def build_basis(max_degree: int, p: LemniscateParams, oracle_degree: int | None = None,
                precision_bits: int = 212, bank_bits: int = 53) -> LemniscateBasis:
    """Production basis: oracle coefficients below the crossover, structural
    representations above it, with exact norms on every degree.

    oracle_degree bounds the brute-force range (default: enough classes to
    certify the crossover); the detected crossover is stored on the basis.
    """
    if oracle_degree is None:
        oracle_degree = min(max_degree, 9 * p.m - 1)
    bank = CircleBank(p, max_degree // p.m + 1, bank_bits) if p.m > 1 else None
    oracle = gram_schmidt_oracle(oracle_degree, p, precision_bits)
    threshold_k = detect_threshold(p, bank, oracle) if p.m > 1 else 0
    coeffs = []
    norms = []
    plans = []
    for d in range(max_degree + 1):
        k, s = divmod(d, p.m)
        if d <= oracle.max_degree:
            coeffs.append(oracle.coefficients[d])
            norms.append(oracle.norms[d])
            plans.append(("mono", oracle.coefficients[d]))
        else:
            if s < p.m - 1 and k < threshold_k:
                raise ConditioningError(
                    "crossover exceeds the oracle range; raise oracle_degree"
                )
            coeffs.append(_structural_z_coefficients(d, p, bank))
            norms.append(exact_norm2(d, p, bank))
            if s == p.m - 1:
                plans.append(("direct", k))
            else:
                plans.append(("wpoly", s, k))
    threshold_degree = oracle.max_degree + 1 if max_degree <= oracle.max_degree else oracle.max_degree + 1
    return LemniscateBasis(p, max_degree, tuple(coeffs), tuple(norms), "prop72",
                           threshold_degree, tuple(plans), bank, oracle.oracle_residual)


# ---------------------------------------------------------------------------
# kernels and the limit profile


def mu0_kernel(n: int, z, w, basis: LemniscateBasis) -> KernelEvaluation:
    """K_n(z, w) = sum_{d <= n} Phi_d(z) conj(Phi_d(w)) / ||Phi_d||^2."""
    if n > basis.max_degree:
        raise ValueError("kernel degree beyond basis range")
    total = 0.0 + 0j
    for d in range(n + 1):
        total += basis.phi(d, complex(z)) * np.conj(basis.phi(d, complex(w))) / basis.norms[d]
    return KernelEvaluation(complex(z), complex(w), n, complex(total), "basis")


def mu0_kernel_grid(n: int, zs, ws, basis: LemniscateBasis):
    """Elementwise K_n(zs[i], ws[i]) over numpy arrays of points."""
    zs = np.asarray(zs, dtype=complex)
    ws = np.asarray(ws, dtype=complex)
    total = np.zeros(zs.shape, dtype=complex)
    for d in range(n + 1):
        total += basis.phi(d, zs) * np.conj(basis.phi(d, ws)) / basis.norms[d]
    return total


def H_func(t) -> complex:
    """Limiting kernel profile 2 (e^t (t - 1) + 1) / t^2, regular at t = 0.

    Below |t| = 1e-3 the closed form cancels, so the Maclaurin series of the
    same function takes over; the two branches agree to 1e-12 at the seam.
    """
    t = complex(t)
    if abs(t) >= 1e-3:
        return 2.0 * (cmath.exp(t) * (t - 1.0) + 1.0) / (t * t)
    acc = 0.0 + 0j
    term = 1.0 + 0j
    for k in range(0, 12):
        acc += 2.0 * (k + 1) / (k + 2) * term
        term *= t / (k + 1)
    return acc


def limit_A(a, b, bp: BoundaryPoint, p: LemniscateParams) -> complex:
    """Phase argument (conj(w0) a z0^{m-1} + w0 conj(b) conj(z0)^{m-1}) / r^m."""
    z0, w0 = bp.z0, bp.w0
    return (np.conj(w0) * complex(a) * z0 ** (p.m - 1)
            + w0 * np.conj(complex(b)) * np.conj(z0) ** (p.m - 1)) / p.rm


def christoffel_target(bp: BoundaryPoint, p: LemniscateParams, density: float = 1.0) -> float:
    """Limit of n^2 lambda_n at the boundary: 2 pi mu'(u) r^{2m} / |u|^{2m-2}."""
    return 2.0 * math.pi * density * p.rm ** 2 / abs(bp.z0) ** (2 * p.m - 2)


def derform_margin(P: int, z) -> float:
    """Relative defect of sum_{k<=P} (k+1) z^k against its closed form."""
    z = complex(z)
    if z == 1.0:
        raise ValueError("closed form needs z != 1")
    acc = 0.0 + 0j
    zp = 1.0 + 0j
    for k in range(P + 1):
        acc += (k + 1) * zp
        zp *= z
    closed = -(P + 2) * z ** (P + 1) / (1.0 - z) + (1.0 - z ** (P + 2)) / (1.0 - z) ** 2
    return abs(acc - closed) / max(abs(closed), 1e-300)


def middform_value(L: int, z) -> complex:
    """(2 / L^2) sum_{k<L} (k+1) (1 + z/L)^k; converges to H_func(z)."""
    z = complex(z)
    base = 1.0 + z / L
    acc = 0.0 + 0j
    bp = 1.0 + 0j
    for k in range(L):
        acc += (k + 1) * bp
        bp *= base
    return 2.0 / L ** 2 * acc


def h_quadrature_oracle(t, nodes: int = 200) -> complex:
    """2 int_0^1 x e^{tx} dx by Gauss-Legendre; independent check on H_func."""
    x, wts = roots_legendre(nodes)
    xs = (x + 1.0) / 2.0
    return complex(np.sum(wts / 2.0 * 2.0 * xs * np.exp(complex(t) * xs)))
