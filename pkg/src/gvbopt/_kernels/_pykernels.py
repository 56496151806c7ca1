"""Pure NumPy kernel backend.

Hot numerical primitives shared by the scheduling and optimization layers:
adaptive Gauss-Legendre mobility integrals, closed-form breakthrough times,
partition volumes, and exhaustive grid scans for two and three slugs.  The
compiled backend (``_core``) implements the same interface; this module is
the fallback and the reference.

Model families are passed as small integer codes so both backends can share
a call signature:

* viscosity: 0 linear ``p0 + p1*c``, 1 exponential ``p0*exp(p1*c)``,
  2 cubic power ``p0*(1 + c**3)**p1``
* flux factor: 0 Koval ``(a*x**0.25 + 1 - a)**-4``, 1 power law ``x**-w``

No argument validation happens here; callers own that.
"""

import numpy as np

VISC_LINEAR = 0
VISC_EXPONENTIAL = 1
VISC_CUBIC_POWER = 2

FLUX_KOVAL = 0
FLUX_POWER_LAW = 1

GL_NODES, GL_WEIGHTS = np.polynomial.legendre.leggauss(32)

_REL_TOL = 1e-12
_MAX_PANELS = 1024


def viscosity_values(vcode, p0, p1, c):
    c = np.asarray(c, dtype=float)
    if vcode == VISC_LINEAR:
        return p0 + p1 * c
    if vcode == VISC_EXPONENTIAL:
        return p0 * np.exp(p1 * c)
    if vcode == VISC_CUBIC_POWER:
        return p0 * (1.0 + c**3) ** p1
    raise ValueError(f"unknown viscosity code {vcode}")


def flux_values(fcode, fpar, x):
    x = np.asarray(x, dtype=float)
    if fcode == FLUX_KOVAL:
        return (fpar * x**0.25 + (1.0 - fpar)) ** -4
    if fcode == FLUX_POWER_LAW:
        return x ** (-fpar)
    raise ValueError(f"unknown flux code {fcode}")


def _batch_composite(g, lo, hi, n_panels):
    """Composite 32-point Gauss-Legendre over each [lo_i, hi_i]."""
    frac = np.linspace(0.0, 1.0, n_panels + 1)
    edges = lo[:, None] + (hi - lo)[:, None] * frac[None, :]
    mid = 0.5 * (edges[:, :-1] + edges[:, 1:])
    half = 0.5 * (edges[:, 1:] - edges[:, :-1])
    pts = mid[:, :, None] + half[:, :, None] * GL_NODES[None, None, :]
    vals = g(pts)
    return np.sum(half[:, :, None] * GL_WEIGHTS[None, None, :] * vals, axis=(1, 2))


def _batch_adaptive(g, lo, hi, rel_tol):
    """Panel-doubling driver: refine until the relative change per interval
    drops below ``rel_tol``, freezing intervals as they converge."""
    lo = np.asarray(lo, dtype=float)
    hi = np.asarray(hi, dtype=float)
    out = np.empty(lo.shape[0])
    pending = np.arange(lo.shape[0])
    prev = _batch_composite(g, lo, hi, 1)
    n_panels = 2
    while pending.size and n_panels <= _MAX_PANELS:
        cur = _batch_composite(g, lo[pending], hi[pending], n_panels)
        done = np.abs(cur - prev) <= rel_tol * np.abs(cur)
        out[pending[done]] = cur[done]
        pending = pending[~done]
        prev = cur[~done]
        n_panels *= 2
    out[pending] = prev
    return out


def integrate_callable(g, a, b, rel_tol=_REL_TOL):
    """Adaptive integral of a vectorized callable on [a, b]."""
    return float(_batch_adaptive(g, np.array([a]), np.array([b]), rel_tol)[0])


def interval_mobility_integrals(vcode, p0, p1, k, lo, hi):
    """Integrals of the mobility k/mu over each interval [lo_i, hi_i]."""
    g = lambda c: k / viscosity_values(vcode, p0, p1, c)
    return _batch_adaptive(g, lo, hi, _REL_TOL)


def mobility_integral(vcode, p0, p1, k, a, b):
    return float(
        interval_mobility_integrals(vcode, p0, p1, k, np.array([a]), np.array([b]))[0]
    )


def times_tfe(vcode, p0, p1, k, c):
    """Breakthrough switch times for a partition under transverse flow
    equilibrium.  ``c`` is the descending concentration vector (length n+1);
    the result has length n+1 with the final chase-water entry pinned to 1."""
    c = np.asarray(c, dtype=float)
    widths = c[:-1] - c[1:]
    integrals = interval_mobility_integrals(vcode, p0, p1, k, c[1:], c[:-1])
    m_top = k / float(viscosity_values(vcode, p0, p1, c[0]))
    t = 1.0 - m_top * widths / integrals
    return np.append(t, 1.0)


def times_gk(fcode, fpar, vcode, p0, p1, k, c):
    """Breakthrough switch times under a generalized Koval model."""
    c = np.asarray(c, dtype=float)
    mu = viscosity_values(vcode, p0, p1, c)
    f = flux_values(fcode, fpar, mu[:-1] / mu[1:])
    lead = np.concatenate(([1.0], np.cumprod(f[:-1] ** 2)))
    t = 1.0 - f * lead
    return np.append(t, 1.0)


def _volume(c, t):
    return float(np.sum((c[:-1] - c[1:]) * t[:-1]) + c[-1])


def partition_volume_tfe(vcode, p0, p1, k, c):
    c = np.asarray(c, dtype=float)
    return _volume(c, times_tfe(vcode, p0, p1, k, c))


def partition_volume_gk(fcode, fpar, vcode, p0, p1, k, c):
    c = np.asarray(c, dtype=float)
    return _volume(c, times_gk(fcode, fpar, vcode, p0, p1, k, c))


# ---------------------------------------------------------------------------
# Exhaustive scans.  The caller supplies per-grid-node data (mobility prefix
# integrals or point mobilities), which keeps the scans independent of how
# the viscosity curve is defined.  Grids are ascending with the domain
# endpoints included; candidates run over interior nodes only.


def scan_two_tfe(grid, prefix, m_top):
    """Two-slug volumes for every interior split point.

    ``prefix[i]`` is the mobility integral from grid[0] to grid[i]; ``m_top``
    the mobility at the full-strength end.  Returns the volume array aligned
    with grid[1:-1].
    """
    grid = np.asarray(grid, dtype=float)
    prefix = np.asarray(prefix, dtype=float)
    c_lo, c_hi = grid[0], grid[-1]
    g = grid[1:-1]
    fi = prefix[1:-1]
    t1 = 1.0 - m_top * (c_hi - g) / (prefix[-1] - fi)
    t2 = 1.0 - m_top * (g - c_lo) / fi
    return (c_hi - g) * t1 + (g - c_lo) * t2 + c_lo


def scan_three_tfe(grid, prefix, m_top):
    """Best three-slug split over all interior grid pairs.

    Returns ``(volume, i, j)`` with i > j the grid indices of the two
    interior concentrations.
    """
    grid = np.asarray(grid, dtype=float)
    prefix = np.asarray(prefix, dtype=float)
    c_lo, c_hi = grid[0], grid[-1]
    f_top = prefix[-1]
    best_v = np.inf
    best_i = best_j = -1
    for i in range(2, grid.shape[0] - 1):
        gi, fi = grid[i], prefix[i]
        gj = grid[1:i]
        fj = prefix[1:i]
        t1 = 1.0 - m_top * (c_hi - gi) / (f_top - fi)
        t2 = 1.0 - m_top * (gi - gj) / (fi - fj)
        t3 = 1.0 - m_top * (gj - c_lo) / fj
        v = (c_hi - gi) * t1 + (gi - gj) * t2 + (gj - c_lo) * t3 + c_lo
        j = int(np.argmin(v))
        if v[j] < best_v:
            best_v = float(v[j])
            best_i, best_j = i, j + 1
    return best_v, best_i, best_j


def _scan_two_gk(f, grid, mob):
    grid = np.asarray(grid, dtype=float)
    mob = np.asarray(mob, dtype=float)
    c_lo, c_hi = grid[0], grid[-1]
    g = grid[1:-1]
    mi = mob[1:-1]
    f1 = f(mi / mob[-1])
    f2 = f(mob[0] / mi)
    t1 = 1.0 - f1
    t2 = 1.0 - f2 * f1**2
    return (c_hi - g) * t1 + (g - c_lo) * t2 + c_lo


def _scan_three_gk(f, grid, mob):
    grid = np.asarray(grid, dtype=float)
    mob = np.asarray(mob, dtype=float)
    c_lo, c_hi = grid[0], grid[-1]
    best_v = np.inf
    best_i = best_j = -1
    for i in range(2, grid.shape[0] - 1):
        gi, mi = grid[i], mob[i]
        gj = grid[1:i]
        mj = mob[1:i]
        f1 = float(f(mi / mob[-1]))
        f2 = f(mj / mi)
        f3 = f(mob[0] / mj)
        t1 = 1.0 - f1
        t2 = 1.0 - f2 * f1**2
        t3 = 1.0 - f3 * (f2 * f1) ** 2
        v = (c_hi - gi) * t1 + (gi - gj) * t2 + (gj - c_lo) * t3 + c_lo
        j = int(np.argmin(v))
        if v[j] < best_v:
            best_v = float(v[j])
            best_i, best_j = i, j + 1
    return best_v, best_i, best_j


def scan_two_gk(fcode, fpar, grid, mob):
    return _scan_two_gk(lambda x: flux_values(fcode, fpar, x), grid, mob)


def scan_three_gk(fcode, fpar, grid, mob):
    return _scan_three_gk(lambda x: flux_values(fcode, fpar, x), grid, mob)


def scan_two_gk_callable(f, grid, mob):
    """Two-slug scan for an arbitrary flux factor (python-only path)."""
    return _scan_two_gk(np.vectorize(f, otypes=[float]), grid, mob)


def scan_three_gk_callable(f, grid, mob):
    return _scan_three_gk(np.vectorize(f, otypes=[float]), grid, mob)
