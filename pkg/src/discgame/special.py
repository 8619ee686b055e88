"""Special functions needed by the closed-form solutions.

Jacobi elliptic sn/cn/dn and the complete elliptic integral K come from the
arithmetic-geometric mean (descending Landen recursion), the Kelvin
functions from the Bessel power series at a rotated complex argument, and
Lambert W from Halley iteration.  Every routine can report how hard it
worked via ``full_output=True``.
"""

from dataclasses import dataclass

import numpy as np

from .errors import OutOfDomain

_AGM_TOL = 1e-15
_KELVIN_TERM_TOL = 1e-16
KELVIN_MAX_ARG = 20.0
_LAMBERT_TOL = 1e-14
_LAMBERT_MAX_ITER = 50
_BRANCH_POINT = -np.exp(-1.0)


@dataclass(frozen=True)
class SpecialFnResult:
    """Value(s) of a special function plus convergence evidence."""

    values: tuple
    iterations: int
    certified_error: float


def _maybe(values, iterations, err, full_output):
    if full_output:
        return SpecialFnResult(values=values, iterations=iterations,
                               certified_error=err)
    return values if len(values) > 1 else values[0]


def elliptic_k(m: float, full_output: bool = False):
    """Complete elliptic integral of the first kind, parameter m = k².

    ``K(m) = ∫_0^{π/2} (1 − m sin²φ)^{−1/2} dφ`` computed as
    ``π / (2 agm(1, sqrt(1 − m)))``.
    """
    if not 0.0 <= m < 1.0:
        raise OutOfDomain(f"elliptic_k requires 0 <= m < 1, got {m}")
    a, b = 1.0, np.sqrt(1.0 - m)
    it = 0
    while abs(a - b) > _AGM_TOL * a:
        a, b = 0.5 * (a + b), np.sqrt(a * b)
        it += 1
    return _maybe((float(np.pi / (a + b)),), it, abs(a - b), full_output)


def jacobi_sn_cn_dn(u: float, m: float, full_output: bool = False):
    """Jacobi elliptic functions sn, cn, dn with parameter m = k² in [0, 1).

    Descending Landen transformation: build the AGM ladder down from
    (1, sqrt(1-m)), then unwind the amplitude.  dn is recovered from the
    identity dn² = 1 − m sn², which is exact and keeps dn positive as it
    must be for m < 1.
    """
    if not 0.0 <= m < 1.0:
        raise OutOfDomain(f"jacobi_sn_cn_dn requires 0 <= m < 1, got {m}")
    if m < 4.0 * np.finfo(float).eps:
        return _maybe((float(np.sin(u)), float(np.cos(u)), 1.0), 0, 0.0, full_output)
    a = [1.0]
    b = np.sqrt(1.0 - m)
    c = [np.sqrt(m)]
    while abs(c[-1]) > _AGM_TOL * a[-1]:
        a.append(0.5 * (a[-1] + b))
        c.append(0.5 * (a[-2] - b))
        b = np.sqrt(a[-2] * b)
    n = len(a) - 1
    phi = (2.0 ** n) * a[-1] * u
    for k in range(n, 0, -1):
        phi = 0.5 * (phi + np.arcsin(np.clip(c[k] / a[k] * np.sin(phi), -1.0, 1.0)))
    sn, cn = float(np.sin(phi)), float(np.cos(phi))
    dn = float(np.sqrt(1.0 - m * sn * sn))
    return _maybe((sn, cn, dn), n, abs(c[-1]), full_output)


def _kelvin_series(order: int, x: float):
    """ber_ν + i bei_ν = J_ν(x e^{3πi/4}) by power series; ν in {0, 1}."""
    z_half = 0.5 * x * complex(-1.0, 1.0) / np.sqrt(2.0)
    ratio = -(z_half * z_half)  # equals −(x/2)² i
    term = z_half if order == 1 else complex(1.0, 0.0)
    if order == 1:
        total = term
        k = 0
        while abs(term) > _KELVIN_TERM_TOL * max(1.0, abs(total)):
            k += 1
            term = term * ratio / (k * (k + 1))
            total += term
    else:
        total = term
        k = 0
        while abs(term) > _KELVIN_TERM_TOL * max(1.0, abs(total)):
            k += 1
            term = term * ratio / (k * k)
            total += term
    return total, k, abs(term) / max(1.0, abs(total))


def kelvin_ber1_bei1(x: float, full_output: bool = False):
    """Kelvin functions ber₁ and bei₁ for 0 <= x <= 20.

    Real and imaginary parts of J₁(x e^{3πi/4}).  The series domain is
    deliberately capped: the closed forms that need these never reach
    beyond x = 20.
    """
    if not 0.0 <= x <= KELVIN_MAX_ARG:
        raise OutOfDomain(f"kelvin series domain is 0 <= x <= {KELVIN_MAX_ARG}, got {x}")
    total, terms, tail = _kelvin_series(1, x)
    return _maybe((float(total.real), float(total.imag)), terms, tail, full_output)


def kelvin_ber0_bei0(x: float, full_output: bool = False):
    """Kelvin functions ber and bei (order zero) for 0 <= x <= 20."""
    if not 0.0 <= x <= KELVIN_MAX_ARG:
        raise OutOfDomain(f"kelvin series domain is 0 <= x <= {KELVIN_MAX_ARG}, got {x}")
    total, terms, tail = _kelvin_series(0, x)
    return _maybe((float(total.real), float(total.imag)), terms, tail, full_output)


def lambert_w(x: float, full_output: bool = False):
    """Principal branch of Lambert W: w e^w = x for x >= −1/e.

    Log-based starting guess refined by Halley iteration to residual
    1e−14 (relative) within 50 iterations.
    """
    if not np.isfinite(x) or x < _BRANCH_POINT - 1e-15:
        raise OutOfDomain(f"lambert_w requires x >= -1/e, got {x}")
    if x == 0.0:
        return _maybe((0.0,), 0, 0.0, full_output)
    if x <= _BRANCH_POINT:
        return _maybe((-1.0,), 0, 0.0, full_output)
    if x > np.e:
        lx = np.log(x)
        w = lx - np.log(lx)
    elif x > 0:
        w = x / (1.0 + x)
    elif x > -0.2:
        w = x * (1.0 - x)
    else:
        # near the branch point: leading term of the series in sqrt(2(ex + 1))
        w = -1.0 + np.sqrt(2.0 * (np.e * x + 1.0))
    resid = np.inf
    iterations = _LAMBERT_MAX_ITER
    for k in range(1, _LAMBERT_MAX_ITER + 1):
        ew = np.exp(w)
        f = w * ew - x
        resid = abs(f) / max(abs(x), 1e-300)
        if resid < _LAMBERT_TOL:
            iterations = k
            break
        denom = ew * (w + 1.0) - (w + 2.0) * f / (2.0 * w + 2.0)
        w = w - f / denom
        if w <= -1.0:  # keep iterates on the principal branch
            w = -1.0 + 1e-12
    return _maybe((float(w),), iterations, resid, full_output)


def lambert_w_exp(z):
    """W(e^z), stable for any real z (no overflow for large z), vectorized.

    Solves ``w + log w = z`` by guarded Newton from a piecewise starting
    guess; converges to ~1e−15 relative in a handful of sweeps.
    """
    z = np.asarray(z, dtype=float)
    scalar = z.ndim == 0
    z = np.atleast_1d(z)
    w = np.where(z > 1.0, z - np.log(np.maximum(z, 1.1)),
                 np.exp(np.minimum(z, 1.0)) / (1.0 + 0.5 * np.exp(np.minimum(z, 1.0))))
    tiny = z < -700.0  # W(e^z) = e^z to double precision there
    w = np.where(tiny, np.exp(np.clip(z, -745.0, 0.0)), w)
    active = ~tiny
    for _ in range(_LAMBERT_MAX_ITER):
        wa = np.where(active, w, 1.0)
        g = wa + np.log(wa) - z
        step = g * wa / (wa + 1.0)
        new = np.maximum(wa - step, 0.5 * wa)  # keep iterates positive
        done = np.abs(g) <= 1e-15 * np.maximum(1.0, np.abs(z))
        w = np.where(active & ~done, new, w)
        active = active & ~done
        if not np.any(active):
            break
    return float(w[0]) if scalar else w
