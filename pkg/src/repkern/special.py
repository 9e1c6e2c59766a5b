"""Scalar special functions: rising factorials, the complex gamma function,
the confluent series 1F1 and the terminating Gauss sum 2F1(-n, b; c; z).

Everything runs in binary64 by default. The series evaluators accept a
``prec`` argument (significand bits, >= 113 recommended for oracle work)
that switches the arithmetic to mpmath at that precision.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import mpmath as mp

from .errors import NonconvergenceError, PoleError

MAX_SERIES_TERMS = 10 ** 6

# Lanczos approximation, g = 7, 9 terms.
_LANCZOS_G = 7
_LANCZOS = [
    0.99999999999980993,
    676.5203681218851,
    -1259.1392167224028,
    771.32342877765313,
    -176.61502916214059,
    12.507343278686905,
    -0.13857109526572012,
    9.9843695780195716e-6,
    1.5056327351493116e-7,
]

_SQRT_TWO_PI = 2.5066282746310002


@dataclass(frozen=True)
class SeriesValue:
    """Value of a truncated series together with its truncation evidence.

    value is complex in binary64 mode and an mpmath complex in extended
    mode. truncation_bound estimates the magnitude of the discarded tail.
    """

    value: complex
    terms_used: int
    truncation_bound: float


def _is_nonpositive_int(v) -> bool:
    if isinstance(v, complex):
        if v.imag != 0:
            return False
        v = v.real
    if isinstance(v, (mp.mpc,)):
        if v.imag != 0:
            return False
        v = v.real
    try:
        return v <= 0 and v == int(v)
    except (TypeError, OverflowError):
        return False


def rising_factorial(v, n: int):
    """(v)_n = v (v+1) ... (v+n-1), with (v)_0 = 1.

    The result type follows the input type, so Fraction input gives an
    exact rational result and mpmath input stays at mpmath precision.
    """
    if not isinstance(n, int):
        raise TypeError("n must be an integer")
    if n < 0:
        raise ValueError("n must be nonnegative")
    out = v ** 0  # multiplicative identity in the input's own type
    for j in range(n):
        out = out * (v + j)
    return out


def _lanczos_gamma(z: complex) -> complex:
    x = z - 1.0
    acc = _LANCZOS[0]
    for i in range(1, len(_LANCZOS)):
        acc += _LANCZOS[i] / (x + i)
    t = x + _LANCZOS_G + 0.5
    return _SQRT_TWO_PI * t ** (x + 0.5) * cmath.exp(-t) * acc

def gamma_complex(z) -> complex:
    """Gamma(z) for complex z, accurate to at least 12 significant digits
    for Re z in [-5, 20], |Im z| <= 20.

    Uses a fixed rational (Lanczos) approximation, with the reflection
    formula for Re z < 0.5. Raises PoleError at nonpositive integers.
    """
    z = complex(z)
    if _is_nonpositive_int(z):
        raise PoleError(f"gamma pole at z = {z}")
    if z.real < 0.5:
        # Gamma(z) Gamma(1-z) = pi / sin(pi z)
        return cmath.pi / (cmath.sin(cmath.pi * z) * _lanczos_gamma(1.0 - z))
    return _lanczos_gamma(z)


def _series_1f1(a, b, z, tol, one):
    """Shared 1F1 Taylor loop. ``one`` fixes the arithmetic (1.0 or mpf(1))."""
    term = one
    total = one
    small_run = 0
    k = 0
    while k < MAX_SERIES_TERMS:
        term = term * (a + k) / ((b + k) * (k + 1)) * z
        total = total + term
        k += 1
        if abs(term) < tol * max(abs(total), 1e-300):
            small_run += 1
            if small_run == 3:
                break
        else:
            small_run = 0
    else:
        raise NonconvergenceError(
            f"1F1 series did not settle within {MAX_SERIES_TERMS} terms"
        )
    nxt = abs(term * (a + k) / ((b + k) * (k + 1)) * z)
    prev = abs(term)
    if nxt == 0:
        bound = 0.0
    elif prev > 0 and nxt / prev < 0.9:
        r = nxt / prev
        bound = float(nxt / (1 - r))
    else:
        bound = float(nxt) * 10.0
    return total, k + 1, bound


def hyp1f1(a, b, z, tol: float = 1e-14, prec: int | None = None) -> SeriesValue:
    """Confluent hypergeometric series 1F1(a; b; z).

    Terms are summed until three consecutive terms each fall below
    tol times the running partial sum. For Re z < 0 and |z| > 8 the
    series is stabilized through the reflection 1F1(a; b; z) =
    e^z 1F1(b-a; b; -z), which has the same limit but positive-axis
    decay. With ``prec`` set, all arithmetic runs at that many bits.
    """
    if _is_nonpositive_int(b):
        raise PoleError(f"1F1 parameter pole: b = {b} is a nonpositive integer")
    if prec is not None:
        with mp.workprec(prec):
            a_m, b_m, z_m = mp.mpc(a), mp.mpc(b), mp.mpc(z)
            if mp.re(z_m) < 0 and abs(z_m) > 8:
                inner, n_terms, bound = _series_1f1(
                    b_m - a_m, b_m, -z_m, mp.mpf(tol), mp.mpf(1)
                )
                scale = mp.e ** z_m
                return SeriesValue(scale * inner, n_terms, float(abs(scale)) * bound)
            total, n_terms, bound = _series_1f1(a_m, b_m, z_m, mp.mpf(tol), mp.mpf(1))
            return SeriesValue(total, n_terms, bound)
    a_c, b_c, z_c = complex(a), complex(b), complex(z)
    if z_c.real < 0 and abs(z_c) > 8:
        inner, n_terms, bound = _series_1f1(b_c - a_c, b_c, -z_c, tol, 1.0)
        scale = cmath.exp(z_c)
        return SeriesValue(scale * inner, n_terms, abs(scale) * bound)
    total, n_terms, bound = _series_1f1(a_c, b_c, z_c, tol, 1.0)
    return SeriesValue(total, n_terms, bound)


def hyp2f1_terminating(n: int, b, c, z, prec: int | None = None) -> complex:
    """Terminating Gauss sum 2F1(-n, b; c; z) = sum_{k<=n} (-n)_k (b)_k z^k / ((c)_k k!).

    The order is fixed at n + 1 terms; binary64 accumulation is compensated
    so evaluation is deterministic and stable against benign cancellation.
    """
    if not isinstance(n, int) or n < 0:
        raise ValueError("n must be a nonnegative integer")
    if _is_nonpositive_int(c) and -_to_real(c) < n:
        raise PoleError(f"2F1 parameter pole: c = {c} terminates before -n")
    if prec is not None:
        with mp.workprec(prec):
            b_m, c_m, z_m = mp.mpc(b), mp.mpc(c), mp.mpc(z)
            term = mp.mpc(1)
            total = mp.mpc(1)
            for k in range(n):
                term = term * (-(n - k)) * (b_m + k) / ((c_m + k) * (k + 1)) * z_m
                total += term
            return total
    b_c, c_c, z_c = complex(b), complex(c), complex(z)
    term = 1.0 + 0j
    sum_re, comp_re = 1.0, 0.0
    sum_im, comp_im = 0.0, 0.0
    for k in range(n):
        term = term * (-(n - k)) * (b_c + k) / ((c_c + k) * (k + 1)) * z_c
        sum_re, comp_re = _neumaier(sum_re, comp_re, term.real)
        sum_im, comp_im = _neumaier(sum_im, comp_im, term.imag)
    return complex(sum_re + comp_re, sum_im + comp_im)


def _to_real(v) -> float:
    return complex(v).real


def _neumaier(total: float, comp: float, x: float):
    t = total + x
    if abs(total) >= abs(x):
        comp += (total - t) + x
    else:
        comp += (x - t) + total
    return t, comp
