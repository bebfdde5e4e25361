"""Independent reference values, computed without the package.

Everything here is either a closed form or an mpmath evaluation at 30
digits.  Frozen: tests compare against these and never the other way round.
"""
import mpmath as mp

mp.mp.dps = 30


def doubly_warped_ricci(f1, f2, r):
    """Orthonormal Ricci eigenvalues and s of ``dr^2 + f1^2 dth1^2 + f2^2 dth2^2`` (arclength r)."""
    r = mp.mpf(r)
    a1, b1, c1 = f1(r), mp.diff(f1, r), mp.diff(f1, r, 2)
    a2, b2, c2 = f2(r), mp.diff(f2, r), mp.diff(f2, r, 2)
    k01, k02, k12 = -c1 / a1, -c2 / a2, -b1 * b2 / (a1 * a2)
    ric = (k01 + k02, k01 + k12, k02 + k12)
    return tuple(float(v) for v in ric), float(2 * (k01 + k02 + k12))


def spherical_scalar(f, lapse, x):
    """s of ``N(x)^2 dx^2 + f(x)^2 dS^2``, derivatives taken in arclength by the chain rule."""
    x = mp.mpf(x)
    N = lapse(x)
    fp = mp.diff(f, x) / N
    fpp = (mp.diff(f, x, 2) - mp.diff(lapse, x) * fp) / N ** 2
    F = f(x)
    return float(-4 * fpp / F + 2 * (1 - fp ** 2) / F ** 2)


def dehn_trial(c1=1, c2=1):
    return (lambda r: c1 * mp.tan(r / 2)), (lambda r: c2 * mp.exp(-mp.cos(r)))


def dehn_closed_form(r):
    """The trial pair's scalar curvature as printed in the source."""
    r = mp.mpf(r)
    return float(-2 * (1 + mp.cos(r) + mp.sin(r) ** 2 + mp.mpf(1) / 2 / mp.cos(r / 2) ** 2))


def dehn_volume_integral():
    return mp.quad(lambda r: mp.exp(-mp.cos(r)) * mp.tan(r / 2), [0, mp.pi / 2])


def conformal_end(m):
    """Warping and lapse of ``(1 + 2m/r) delta`` in the coordinate r."""
    return (lambda r: mp.sqrt(r * r + 2 * m * r)), (lambda r: mp.sqrt(1 + 2 * m / r))


def case_i_a_difference(m, R):
    """``1/f(R) - f'(R)/f(R)`` for the conformal end; f' in arclength is ``(R+m)/(R+2m)``."""
    m, R = mp.mpf(m), mp.mpf(R)
    f = mp.sqrt(R * R + 2 * m * R)
    return float(m / ((R + 2 * m) * f))


def cap_c1(m, R):
    """Closed-form ``(delta, D)`` with ``sin(dD) = d f`` and ``cos(dD) = f'``."""
    m, R = mp.mpf(m), mp.mpf(R)
    f = mp.sqrt(R * R + 2 * m * R)
    c = (R + m) / (R + 2 * m)
    delta = mp.sqrt(1 - c * c) / f
    return float(delta), float(mp.acos(c) / delta)


def s3_volume(delta):
    return float(2 * mp.pi ** 2 / mp.mpf(delta) ** 3)


def hyperbolic_ball_volume(R):
    R = mp.mpf(R)
    return float(mp.pi * (mp.sinh(2 * R) - 2 * R))


def cusp_volume(d1, d2, a, t0):
    return float(4 * mp.pi ** 2 * d1 * d2 * mp.sqrt(1 - mp.mpf(a) ** 2) * mp.exp(-2 * mp.mpf(t0)) / 2)


def torus_area(d1, d2, a):
    return float(4 * mp.pi ** 2 * d1 * d2 * mp.sqrt(1 - mp.mpf(a) ** 2))


def conformal_shape_exact(nu_t, delta, nu):
    """Exact shape-operator gap against the rescaled background sphere: ``-nu_t d / psi^3``."""
    psi = mp.sqrt(1 + 2 * mp.mpf(nu) * delta)
    return float(-nu_t * delta / psi ** 3)
