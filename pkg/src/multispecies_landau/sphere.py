"""Carre du champ calculus on the unit sphere S^{d-1} for d = 2, 3.

A positive density ``phi`` is stored through ``Phi = log phi``, so positivity
holds by construction.  Derivatives are taken along the rotation generators
``b_k . grad`` (the skew fields acting on the degree-0 extension of ``Phi``):

    Gamma(Phi)   = sum_k (b_k . grad Phi)^2        = |grad_sigma Phi|^2
    Gamma_2(Phi) = sum_{k,l} (b_l . grad (b_k . grad Phi))^2

On the circle the single generator is ``-d/dtheta`` and the derivatives are
spectral.  On S^2 the generators are ``-i L_z``, ``i L_y`` and ``-i L_x`` in
angular-momentum notation; they act on complex spherical-harmonic
coefficients through the ladder recurrences and never mix degrees, so both
forms are exact for band-limited ``Phi``.  Integrals use a uniform grid on the
circle and Gauss-Legendre latitude nodes times uniform longitudes on S^2.
"""

from dataclasses import dataclass
from functools import lru_cache

import numpy as np
import scipy.optimize
from scipy.special import sph_harm_y
from scipy.spatial.transform import Rotation

from .errors import IndeterminateRatioError, ParameterError

__all__ = [
    "CircleField",
    "HarmonicField",
    "SphereVerdict",
    "ConstantEstimate",
    "sphere_constant",
    "gamma",
    "gamma2",
    "integrals",
    "ratio",
    "check_inequality",
    "random_field",
    "rotate",
    "estimate_constant",
]

# Gamma integrals below this fraction of int phi are treated as phi = const.
RATIO_FLOOR = 1e-20


def sphere_constant(dim, symmetric):
    """``d - 1`` in general, ``d + 3 - 1/(d - 1)`` for antipodally symmetric densities."""
    if dim not in (2, 3):
        raise ParameterError(f"dim must be 2 or 3, got {dim}")
    return dim + 3.0 - 1.0 / (dim - 1) if symmetric else dim - 1.0


@dataclass(frozen=True)
class CircleField:
    """``log phi`` sampled at ``theta_j = 2 pi j / n`` on S^1 (``n`` even).

    With ``antipodal=True`` the samples must be pi-periodic, i.e. only even
    Fourier modes are present.
    """

    log_values: np.ndarray
    antipodal: bool = False

    def __post_init__(self):
        v = np.array(self.log_values, dtype=float)
        if v.ndim != 1 or v.size < 4 or v.size % 2:
            raise ParameterError(f"need an even number (>= 4) of samples, got shape {v.shape}")
        if not np.all(np.isfinite(v)):
            raise ParameterError("log values must be finite")
        if self.antipodal:
            half = v.size // 2
            scale = max(1.0, float(np.abs(v).max()))
            if np.abs(v[:half] - v[half:]).max() > 1e-12 * scale:
                raise ParameterError("antipodal circle field must be pi-periodic")
        v.setflags(write=False)
        object.__setattr__(self, "log_values", v)

    dim = 2

    @property
    def size(self):
        return self.log_values.size

    @property
    def angles(self):
        return 2.0 * np.pi * np.arange(self.size) / self.size

    @property
    def weights(self):
        return np.full(self.size, 2.0 * np.pi / self.size)

    @classmethod
    def from_modes(cls, cos_coeffs, sin_coeffs, n_theta=512, antipodal=False):
        """``sum_k a_k cos(k theta) + b_k sin(k theta)`` for ``k = 1, 2, ...``."""
        theta = 2.0 * np.pi * np.arange(n_theta) / n_theta
        v = np.zeros(n_theta)
        for k, (a, b) in enumerate(zip(cos_coeffs, sin_coeffs), start=1):
            v += a * np.cos(k * theta) + b * np.sin(k * theta)
        if antipodal:
            # Exact pi-periodicity: average the two halves.
            half = n_theta // 2
            v = np.tile(0.5 * (v[:half] + v[half:]), 2)
        return cls(v, antipodal)

    def derivatives(self):
        """First and second angular derivatives by FFT (Nyquist mode dropped)."""
        n = self.size
        hat = np.fft.rfft(self.log_values)
        k = np.arange(hat.size, dtype=float)
        k[-1] = 0.0
        d1 = np.fft.irfft(1j * k * hat, n)
        d2 = np.fft.irfft(-(k**2) * hat, n)
        return d1, d2


# Coefficient layout on S^2: complex a[l, l_max + m] for |m| <= l.


def _real_to_complex(coeffs, lmax):
    """Real orthonormal harmonic coefficients, ordered ``(l, m)`` with ``m = -l..l``, to complex ones."""
    a = np.zeros((lmax + 1, 2 * lmax + 1), dtype=complex)
    idx = 0
    for l in range(lmax + 1):
        block = coeffs[idx : idx + 2 * l + 1]
        idx += 2 * l + 1
        a[l, lmax] = block[l]
        for m in range(1, l + 1):
            x_pos, x_neg = block[l + m], block[l - m]
            am = (-1) ** m * (x_pos - 1j * x_neg) / np.sqrt(2.0)
            a[l, lmax + m] = am
            a[l, lmax - m] = (-1) ** m * np.conj(am)
    return a


def _complex_to_real(a, lmax):
    out = []
    for l in range(lmax + 1):
        block = np.zeros(2 * l + 1)
        block[l] = a[l, lmax].real
        for m in range(1, l + 1):
            am = (-1) ** m * a[l, lmax + m] * np.sqrt(2.0)
            block[l + m] = am.real
            block[l - m] = -am.imag
        out.append(block)
    return np.concatenate(out)


def _ladder(a, lmax, sign):
    """``L_+`` (sign=+1) or ``L_-`` (sign=-1) on complex coefficients."""
    out = np.zeros_like(a)
    for l in range(lmax + 1):
        for m in range(-l, l + 1):
            src = m - sign
            if abs(src) > l:
                continue
            # L_+- Y_l^src = sqrt((l -+ src)(l +- src + 1)) Y_l^{src +- 1}
            c = np.sqrt((l - sign * src) * (l + sign * src + 1.0))
            out[l, lmax + m] = c * a[l, lmax + src]
    return out


def _generators(a, lmax):
    """``b_k . grad`` for the lexicographic skew pairs (0,1), (0,2), (1,2)."""
    m = np.arange(-lmax, lmax + 1)
    Lz = a * m
    Lp = _ladder(a, lmax, +1)
    Lm = _ladder(a, lmax, -1)
    Lx = 0.5 * (Lp + Lm)
    Ly = (Lp - Lm) / 2j
    return [-1j * Lz, 1j * Ly, -1j * Lx]


@lru_cache(maxsize=16)
def _quadrature(lmax, n_lat, n_lon):
    x, w_lat = np.polynomial.legendre.leggauss(n_lat)
    polar = np.arccos(x)
    lon = 2.0 * np.pi * np.arange(n_lon) / n_lon
    P, A = np.meshgrid(polar, lon, indexing="ij")
    weights = np.outer(w_lat, np.full(n_lon, 2.0 * np.pi / n_lon)).ravel()
    basis = np.zeros((P.size, lmax + 1, 2 * lmax + 1), dtype=complex)
    for l in range(lmax + 1):
        for m in range(-l, l + 1):
            basis[:, l, lmax + m] = sph_harm_y(l, m, P.ravel(), A.ravel())
    points = np.stack(
        [np.sin(P) * np.cos(A), np.sin(P) * np.sin(A), np.cos(P)], axis=-1
    ).reshape(-1, 3)
    return basis, weights, points


@dataclass(frozen=True)
class HarmonicField:
    """``log phi`` on S^2 as a real orthonormal spherical-harmonic expansion.

    ``coeffs`` has length ``(l_max + 1)^2`` ordered by degree, then ``m = -l..l``.
    With ``antipodal=True`` every odd-degree coefficient must vanish.
    """

    coeffs: np.ndarray
    antipodal: bool = False
    n_lat: int = 64
    n_lon: int = 128

    def __post_init__(self):
        c = np.array(self.coeffs, dtype=float)
        lmax = int(round(np.sqrt(c.size))) - 1
        if c.ndim != 1 or (lmax + 1) ** 2 != c.size:
            raise ParameterError(f"coefficient count {c.size} is not a square")
        if not np.all(np.isfinite(c)):
            raise ParameterError("coefficients must be finite")
        if self.n_lat <= lmax or self.n_lon <= 2 * lmax:
            raise ParameterError("quadrature too coarse for the expansion degree")
        if self.antipodal:
            for l in range(1, lmax + 1, 2):
                if np.any(c[l * l : (l + 1) ** 2] != 0.0):
                    raise ParameterError("antipodal harmonic field has odd-degree coefficients")
        c.setflags(write=False)
        object.__setattr__(self, "coeffs", c)

    dim = 3

    @property
    def lmax(self):
        return int(round(np.sqrt(self.coeffs.size))) - 1

    def _quad(self):
        return _quadrature(self.lmax, self.n_lat, self.n_lon)

    @property
    def weights(self):
        return self._quad()[1]

    @property
    def points(self):
        return self._quad()[2]

    def complex_coeffs(self):
        return _real_to_complex(self.coeffs, self.lmax)

    def evaluate(self, a=None):
        """Node values of the expansion ``a`` (default: ``log phi`` itself)."""
        a = self.complex_coeffs() if a is None else a
        basis = self._quad()[0]
        return np.einsum("nlm,lm->n", basis, a).real

    @property
    def log_values(self):
        return self.evaluate()


def _phi_and_weights(field):
    return np.exp(field.log_values), field.weights


def gamma(field):
    """``Gamma(log phi)`` at the quadrature nodes."""
    if isinstance(field, CircleField):
        d1, _ = field.derivatives()
        return d1**2
    gens = _generators(field.complex_coeffs(), field.lmax)
    return sum(field.evaluate(g) ** 2 for g in gens)


def gamma2(field):
    """``Gamma_2(log phi)`` at the quadrature nodes."""
    if isinstance(field, CircleField):
        _, d2 = field.derivatives()
        return d2**2
    lmax = field.lmax
    out = 0.0
    for g in _generators(field.complex_coeffs(), lmax):
        out = out + sum(field.evaluate(h) ** 2 for h in _generators(g, lmax))
    return out


def integrals(field):
    """``(int phi, int phi Gamma, int phi Gamma_2)`` by node quadrature."""
    phi, w = _phi_and_weights(field)
    return float(w @ phi), float(w @ (phi * gamma(field))), float(w @ (phi * gamma2(field)))


def ratio(field):
    """``int phi Gamma_2(log phi) / int phi Gamma(log phi)``.

    Raises
    ------
    IndeterminateRatioError
        If the Gamma integral is below ``RATIO_FLOOR`` times ``int phi``.
    """
    mass, g1, g2 = integrals(field)
    if not g1 > RATIO_FLOOR * mass:
        raise IndeterminateRatioError(f"Gamma integral {g1:.3e} too small; phi is nearly constant")
    return g2 / g1


@dataclass(frozen=True)
class SphereVerdict:
    gamma_integral: float
    gamma2_integral: float
    ratio: float
    constant: float
    margin: float
    tolerance: float

    @property
    def passed(self):
        return self.margin >= -self.tolerance


def check_inequality(field, symmetric=False, tolerance=1e-8):
    """Margin ``int phi Gamma_2 - Lambda int phi Gamma`` for the general or antipodal constant.

    ``ratio`` is NaN for (nearly) constant ``phi``.
    """
    if symmetric and not field.antipodal:
        raise ParameterError("symmetric check requested on a field without antipodal symmetry")
    lam = sphere_constant(field.dim, symmetric)
    mass, g1, g2 = integrals(field)
    r = g2 / g1 if g1 > RATIO_FLOOR * mass else float("nan")
    return SphereVerdict(g1, g2, r, lam, g2 - lam * g1, tolerance)


def random_field(dim, rng, symmetric=False, lmax=6, scale=0.5, n_theta=512):
    """Band-limited random ``log phi`` with i.i.d. normal coefficients of standard deviation ``scale``.

    Degrees (or circle modes) ``1..lmax`` are used; ``symmetric`` keeps only even ones.
    """
    if dim == 2:
        keep = np.array([(k % 2 == 0) or not symmetric for k in range(1, lmax + 1)], dtype=float)
        a = scale * rng.standard_normal(lmax) * keep
        b = scale * rng.standard_normal(lmax) * keep
        return CircleField.from_modes(a, b, n_theta, antipodal=symmetric)
    if dim == 3:
        c = scale * rng.standard_normal((lmax + 1) ** 2)
        c[0] = 0.0
        if symmetric:
            for l in range(1, lmax + 1, 2):
                c[l * l : (l + 1) ** 2] = 0.0
        return HarmonicField(c, antipodal=symmetric)
    raise ParameterError(f"dim must be 2 or 3, got {dim}")


def rotate(field, rotation):
    """Field ``sigma -> log phi(R^T sigma)`` for a 3x3 rotation matrix, by quadrature projection."""
    R = np.asarray(rotation, dtype=float)
    basis, w, points = field._quad()
    moved = points @ R  # rows R^T sigma
    polar = np.arccos(np.clip(moved[:, 2], -1.0, 1.0))
    lon = np.arctan2(moved[:, 1], moved[:, 0])
    lmax = field.lmax
    a = field.complex_coeffs()
    vals = np.zeros(points.shape[0])
    for l in range(lmax + 1):
        for m in range(-l, l + 1):
            if a[l, lmax + m] != 0:
                vals += (a[l, lmax + m] * sph_harm_y(l, m, polar, lon)).real
    proj = np.einsum("n,nlm,n->lm", w, np.conj(basis), vals)
    coeffs = _complex_to_real(proj, lmax)
    if field.antipodal:
        # Rotations preserve parity; remove quadrature rounding in odd degrees.
        for l in range(1, lmax + 1, 2):
            coeffs[l * l : (l + 1) ** 2] = 0.0
    return HarmonicField(coeffs, field.antipodal, field.n_lat, field.n_lon)


def random_rotation(rng):
    return Rotation.random(random_state=rng).as_matrix()


@dataclass(frozen=True)
class ConstantEstimate:
    dim: int
    symmetric: bool
    value: float
    field: object
    evaluations: int


def _family(dim, symmetric, lmax, n_theta):
    """Parameter count and builder for the search family (constant mode excluded)."""
    if dim == 2:
        modes = [k for k in range(1, lmax + 1) if k % 2 == 0 or not symmetric]

        def build(x):
            a = np.zeros(lmax)
            b = np.zeros(lmax)
            for idx, k in enumerate(modes):
                a[k - 1] = x[2 * idx]
                b[k - 1] = x[2 * idx + 1]
            return CircleField.from_modes(a, b, n_theta, antipodal=symmetric)

        return 2 * len(modes), build
    degrees = [l for l in range(1, lmax + 1) if l % 2 == 0 or not symmetric]
    slots = np.concatenate([np.arange(l * l, (l + 1) ** 2) for l in degrees])

    def build(x):
        c = np.zeros((lmax + 1) ** 2)
        c[slots] = x
        return HarmonicField(c, antipodal=symmetric, n_lat=2 * lmax + 8, n_lon=4 * lmax + 16)

    return slots.size, build


def estimate_constant(dim, symmetric, lmax=4, restarts=4, seed=0, scale=0.5, min_norm=1e-3, max_evaluations=1500, n_theta=128):
    """Smallest ratio found over band-limited ``log phi`` (exploratory; no target value).

    Restart ``k`` draws random coefficients of size ``scale * 10**-k`` (large
    profiles first, then near-linear ones) and runs Powell's direction-set
    search for at most ``max_evaluations`` ratio evaluations.  Coefficient vectors are rescaled to norm ``min_norm`` if they
    shrink below it, which keeps the ratio well defined.
    """
    rng = np.random.default_rng(seed)
    npar, build = _family(dim, symmetric, lmax, n_theta)
    count = 0

    def clip(x):
        nrm = np.linalg.norm(x)
        return x if nrm >= min_norm else x * (min_norm / max(nrm, 1e-300))

    def objective(x):
        nonlocal count
        count += 1
        return ratio(build(clip(x)))

    best_x, best_val = None, np.inf
    for k in range(restarts):
        x0 = scale * 10.0**-k * rng.standard_normal(npar)
        res = scipy.optimize.minimize(objective, x0, method="Powell", options=dict(maxfev=max_evaluations, xtol=1e-6, ftol=1e-10))
        if res.fun < best_val:
            best_val, best_x = float(res.fun), clip(res.x)
    return ConstantEstimate(dim, symmetric, best_val, build(best_x), count)
