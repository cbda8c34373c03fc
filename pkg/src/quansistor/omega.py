"""Omega-circulant 4-level cores.

A core of class ``q`` is a Hermitian polynomial in the modified shift matrix
``J_w`` (``w = i**q``)::

    H = eps*1 + tau*J + gamma*w*J^2 + conj(tau)*conj(w)^2*J^3

with ``tau = alpha + i*beta``.  For ``q = 0`` this is the ordinary circulant
(class X), for ``q = 1`` the i-circulant (class Y).  Every member of one class
is diagonalized by the same unitary, whose columns are returned by
:func:`fourier_basis`.

Sites ``m`` and mode labels ``k`` both run 1..4, matching the exponent
``exp(i*m*k*pi/2)`` of the eigenvectors.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.integrate import cumulative_trapezoid, trapezoid

from .errors import BadClassIndex, NonzeroMean, ZeroLink
from .linalg import check_hermitian, dagger

SQRT2 = math.sqrt(2.0)

# spectrum = SPECTRUM_MATRIX[q] @ (eps, alpha, beta, gamma)
SPECTRUM_MATRIX = {
    0: np.array([
        [1.0, 0.0, -2.0, -1.0],
        [1.0, -2.0, 0.0, 1.0],
        [1.0, 0.0, 2.0, -1.0],
        [1.0, 2.0, 0.0, 1.0],
    ]),
    1: np.array([
        [1.0, SQRT2, -SQRT2, -1.0],
        [1.0, -SQRT2, -SQRT2, 1.0],
        [1.0, -SQRT2, SQRT2, -1.0],
        [1.0, SQRT2, SQRT2, 1.0],
    ]),
}

# inverse maps, written out as in the closed-form inversion
INVERSE_MATRIX = {
    0: np.array([
        [0.25, 0.25, 0.25, 0.25],
        [0.0, -0.25, 0.0, 0.25],
        [-0.25, 0.0, 0.25, 0.0],
        [-0.25, 0.25, -0.25, 0.25],
    ]),
    1: np.array([
        [0.25, 0.25, 0.25, 0.25],
        [1 / (4 * SQRT2), -1 / (4 * SQRT2), -1 / (4 * SQRT2), 1 / (4 * SQRT2)],
        [-1 / (4 * SQRT2), -1 / (4 * SQRT2), 1 / (4 * SQRT2), 1 / (4 * SQRT2)],
        [-0.25, 0.25, -0.25, 0.25],
    ]),
}

# triangular faces of the tetrahedron and their oriented boundaries; the
# orientation is inherited from the boundary of (1234) so the four fluxes
# cancel identically
FACES = ((1, 2, 3), (1, 2, 4), (1, 3, 4), (2, 3, 4))
_FACE_CYCLES = (
    ((1, 3), (3, 2), (2, 1)),
    ((1, 2), (2, 4), (4, 1)),
    ((1, 4), (4, 3), (3, 1)),
    ((2, 3), (3, 4), (4, 2)),
)
LINKS = ((1, 2), (1, 3), (1, 4), (2, 3), (2, 4), (3, 4))


def _check_q(q) -> int:
    if isinstance(q, bool) or not isinstance(q, (int, np.integer)) or not 0 <= q <= 3:
        raise BadClassIndex(q)
    return int(q)


def omega(q: int) -> complex:
    q = _check_q(q)
    return (1, 1j, -1, -1j)[q]


@dataclass(frozen=True)
class OmegaParams:
    """The four real parameters of an omega-circulant core and its class."""

    epsilon: float
    alpha: float
    beta: float
    gamma: float
    q: int = 0

    def __post_init__(self):
        _check_q(self.q)
        vals = (self.epsilon, self.alpha, self.beta, self.gamma)
        if not all(math.isfinite(float(v)) for v in vals):
            raise ValueError("OmegaParams fields must be finite")

    @property
    def tau(self) -> complex:
        return complex(self.alpha, self.beta)

    @property
    def theta(self) -> float:
        return math.atan2(self.beta, self.alpha)

    @property
    def abs_tau(self) -> float:
        return math.hypot(self.alpha, self.beta)

    @property
    def omega(self) -> complex:
        return omega(self.q)

    def as_vector(self) -> np.ndarray:
        return np.array([self.epsilon, self.alpha, self.beta, self.gamma], dtype=float)

    @classmethod
    def from_vector(cls, g, q: int = 0) -> "OmegaParams":
        e, a, b, c = (float(x) for x in g)
        return cls(e, a, b, c, q)


@dataclass(frozen=True)
class FluxStructure:
    """Plaquette fluxes on faces (123), (124), (134), (234) and the six link phases."""

    plaquette_fluxes: tuple
    link_phases: dict = field(default_factory=dict)

    @property
    def total(self) -> float:
        return float(sum(self.plaquette_fluxes))


def build_shift(q: int) -> np.ndarray:
    w = omega(q)
    j = np.zeros((4, 4), dtype=complex)
    j[0, 1] = 1.0
    j[1, 2] = w
    j[2, 3] = w**2
    j[3, 0] = w**3
    return j


def omega_circ(z, q: int) -> np.ndarray:
    """``sum_s z_s J_w^s`` for four complex coefficients."""
    j = build_shift(q)
    out = np.zeros((4, 4), dtype=complex)
    power = np.eye(4, dtype=complex)
    for zs in z:
        out += zs * power
        power = power @ j
    return out


def build_hamiltonian(p: OmegaParams) -> np.ndarray:
    w = p.omega
    tau = p.tau
    z = (p.epsilon, tau, p.gamma * w, np.conj(tau) * np.conj(w) ** 2)
    h = omega_circ(z, p.q)
    # exact Hermitian symmetrization removes rounding asymmetry
    return 0.5 * (h + dagger(h))


def class_generators(q: int) -> list:
    """Hamiltonians of the unit parameter vectors; ``H(g) = sum_s g_s H_s``."""
    eye = np.eye(4)
    return [build_hamiltonian(OmegaParams.from_vector(eye[s], q)) for s in range(4)]


def spectrum(p: OmegaParams) -> np.ndarray:
    """Closed-form eigenvalues ``lambda_1..lambda_4`` (mode order, not sorted)."""
    if p.q not in SPECTRUM_MATRIX:
        raise BadClassIndex(p.q)
    return SPECTRUM_MATRIX[p.q] @ p.as_vector()


def params_from_spectrum(s, q: int) -> OmegaParams:
    q = _check_q(q)
    if q not in INVERSE_MATRIX:
        raise BadClassIndex(q)
    g = INVERSE_MATRIX[q] @ np.asarray(s, dtype=float)
    return OmegaParams.from_vector(g, q)


def fourier_basis(q: int) -> np.ndarray:
    """Unitary whose column ``k-1`` is the class-``q`` eigenvector with label k."""
    q = _check_q(q)
    d = np.array([np.exp(-1j * np.pi / 4), 1.0, -np.exp(-1j * np.pi / 4), 1.0])
    m = np.arange(1, 5)[:, None]
    k = np.arange(1, 5)[None, :]
    return 0.5 * (np.conj(d)[:, None] ** q) * np.exp(1j * m * k * np.pi / 2)


def eigenvalues(p: OmegaParams) -> np.ndarray:
    """Mode energies for any class, read off the diagonal in the fixed basis."""
    u = fourier_basis(p.q)
    return np.real(np.diag(dagger(u) @ build_hamiltonian(p) @ u))


def mub_overlaps():
    """Overlap magnitudes between the position, class-X and class-Y bases.

    Returns ``(labels, table)`` where ``table[i]`` is the 4x4 array of
    ``|<a_r|b_s>|`` for the basis pair ``labels[i]``.
    """
    bases = {"position": np.eye(4, dtype=complex), "X": fourier_basis(0), "Y": fourier_basis(1)}
    labels = [("position", "X"), ("position", "Y"), ("X", "Y")]
    table = np.array([np.abs(dagger(bases[a]) @ bases[b]) for a, b in labels])
    return labels, table


def _reduce_angle(x):
    """Map onto (-pi, pi]."""
    y = np.mod(np.asarray(x, dtype=float) + np.pi, 2 * np.pi) - np.pi
    return np.where(np.isclose(y, -np.pi, atol=1e-15, rtol=0), np.pi, y)


def flux_structure(h, link_tol: float = 1e-12) -> FluxStructure:
    """Gauge-invariant plaquette fluxes of a 4-site core.

    ``h`` is either a Hermitian 4x4 matrix, for which every off-diagonal link
    must be non-zero, or an :class:`OmegaParams`.  For the latter a structurally
    vanishing ``gamma`` sets the phases of links (1,3) and (2,4) to zero instead
    of raising :class:`ZeroLink`.
    """
    zero_ok = set()
    if isinstance(h, OmegaParams):
        if h.gamma == 0.0:
            zero_ok = {(1, 3), (2, 4)}
        h = build_hamiltonian(h)
    h = check_hermitian(h)
    if h.shape != (4, 4):
        raise ValueError("flux_structure needs a 4x4 core")

    phases = {}
    for j, k in LINKS:
        z = h[j - 1, k - 1]
        if abs(z) <= link_tol:
            if (j, k) in zero_ok:
                phases[(j, k)] = 0.0
                continue
            raise ZeroLink(j, k)
        phases[(j, k)] = float(np.angle(z))

    def theta(a, b):
        return phases[(a, b)] if a < b else -phases[(b, a)]

    fluxes = tuple(float(_reduce_angle(sum(theta(a, b) for a, b in cyc))) for cyc in _FACE_CYCLES)
    return FluxStructure(plaquette_fluxes=fluxes, link_phases=phases)


def floquet_peierls(K: float, v_i, v_j, T: float, mean_tol: float = 1e-8) -> complex:
    """Effective complex hopping ``K <exp(i(w_j - w_i))>_T`` of a driven link.

    ``v_i`` and ``v_j`` are drive samples on a uniform grid covering ``[0, T]``
    with both endpoints included.  ``w(t) = -int_0^t v + <int_0^t v>_T``; all
    integrals use the trapezoidal rule on that grid (hbar = 1).
    """
    v_i = np.asarray(v_i, dtype=float)
    v_j = np.asarray(v_j, dtype=float)
    if v_i.shape != v_j.shape or v_i.ndim != 1 or v_i.size < 2:
        raise ValueError("drives must be 1-d arrays of equal length >= 2")
    t = np.linspace(0.0, T, v_i.size)

    def w(v):
        mean = trapezoid(v, t) / T
        if abs(mean) > mean_tol:
            raise NonzeroMean(f"NonzeroMean: drive average {mean:.3e} exceeds {mean_tol:g}")
        integral = cumulative_trapezoid(v, t, initial=0.0)
        return -integral + trapezoid(integral, t) / T

    phase = np.exp(1j * (w(v_j) - w(v_i)))
    return complex(K * trapezoid(phase, t) / T)


def drive_samples(shape: str, amplitude: float, T: float, samples: int) -> np.ndarray:
    """Zero-mean test drives on the uniform grid used by :func:`floquet_peierls`.

    ``square`` is +A on the first half period and -A on the second, with the
    jump sample set to 0 so the trapezoid mean vanishes exactly (``samples``
    must be odd); ``cosine`` is ``A cos(2 pi t / T)``.
    """
    t = np.linspace(0.0, T, samples)
    if shape == "square":
        if samples % 2 == 0:
            raise ValueError("square drive needs an odd number of samples")
        mid = samples // 2
        v = np.full(samples, float(amplitude))
        v[mid] = 0.0
        v[mid + 1:] = -amplitude
        return v
    if shape == "cosine":
        return amplitude * np.cos(2 * np.pi * t / T)
    raise ValueError(f"unknown drive shape {shape!r}")
