"""Flat classes: commuting Hermitian families with a fixed eigenbasis.

A flat class is spanned by ``n`` commuting Hermitian generators ``H_s`` whose
common eigenbasis gives eigenvalues ``lambda_sr`` forming an invertible
``n x n`` matrix.  Any piecewise-constant schedule ``g(t)`` inside such a class
evolves into ``exp(-i T H(<g>))``, so zero-mean parameter noise drops out.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import omega
from .errors import BiasedNoise, DimensionMismatch, EmptySchedule, FlatnessViolation
from .linalg import (
    DEFAULT_TOL,
    Tolerances,
    check_hermitian,
    commutator,
    dagger,
    expm_hermitian,
    hermitian_eig,
    log10_abs_det,
)

SEED = 20240917


@dataclass(frozen=True)
class FlatClassSpec:
    generators: tuple
    eigenvalue_matrix: np.ndarray | None = None

    @property
    def n(self) -> int:
        return self.generators[0].shape[0]

    def hamiltonian(self, g) -> np.ndarray:
        g = np.asarray(g, dtype=float)
        if g.shape != (len(self.generators),):
            raise DimensionMismatch(f"coefficient vector has shape {g.shape}")
        return sum(gs * hs for gs, hs in zip(g, self.generators))


def omega_class(q: int) -> FlatClassSpec:
    """The class of omega-circulant cores, parametrized by (eps, alpha, beta, gamma)."""
    gens = tuple(omega.class_generators(q))
    lam = None
    if q in omega.SPECTRUM_MATRIX:
        # lam[r, s]: eigenvalue of generator s on mode r
        lam = omega.SPECTRUM_MATRIX[q].copy()
    return FlatClassSpec(gens, lam)


@dataclass
class FlatClassReport:
    is_flat: bool
    commuting: bool
    max_commutator: float
    common_basis: np.ndarray | None
    eigenvalue_matrix: np.ndarray | None
    eigenvalue_matrix_check: float
    log10_abs_det: float
    notes: list = field(default_factory=list)


def verify_flat_class(spec: FlatClassSpec, tol: Tolerances = DEFAULT_TOL,
                      comm_tol: float = 1e-10, seed: int = SEED) -> FlatClassReport:
    gens = [check_hermitian(h, tol) for h in spec.generators]
    n = gens[0].shape[0]
    if any(h.shape != (n, n) for h in gens):
        raise DimensionMismatch("generators differ in dimension")
    if len(gens) != n:
        raise DimensionMismatch(f"need {n} generators for dimension {n}, got {len(gens)}")

    max_comm = max((np.max(np.abs(commutator(a, b))) for i, a in enumerate(gens) for b in gens[i + 1:]),
                   default=0.0)
    notes = []
    if max_comm > comm_tol:
        notes.append(f"generators do not commute (max |[H_s, H_r]| = {max_comm:.3e})")
        return FlatClassReport(False, False, float(max_comm), None, None, np.inf, float("-inf"), notes)

    rng = np.random.default_rng(seed)
    basis = None
    # a generic combination is nondegenerate with probability one; retry if a
    # draw happens to leave a cluster, since the cluster basis would be arbitrary
    for _ in range(8):
        c = rng.uniform(0.5, 1.5, size=n) * rng.choice([-1.0, 1.0], size=n)
        w, v = hermitian_eig(sum(ci * h for ci, h in zip(c, gens)), tol)
        if np.all(np.diff(w) > tol.degeneracy):
            basis = v
            break
    if basis is None:
        notes.append("no nondegenerate combination found; class cannot fix a basis")
        return FlatClassReport(False, True, float(max_comm), None, None, np.inf, float("-inf"), notes)

    diag = np.array([dagger(basis) @ h @ basis for h in gens])
    lam = np.real(np.einsum("srr->rs", diag))  # lam[r, s] = <r|H_s|r>
    off = diag - np.array([np.diag(np.diag(d)) for d in diag])
    check = float(np.max(np.abs(off)))
    ld = log10_abs_det(lam, tol)
    if check > 1e-9:
        notes.append(f"common basis leaves off-diagonal residue {check:.3e}")
    if not np.isfinite(ld):
        notes.append("eigenvalue matrix is singular")
    return FlatClassReport(bool(check <= 1e-9 and np.isfinite(ld)), True, float(max_comm), basis, lam,
                           check, ld, notes)


@dataclass(frozen=True)
class PulseSchedule:
    """Piecewise-constant path ``g(t)`` in a flat class.

    ``coefficients[i]`` is the parameter vector held for ``durations[i]``.
    """

    durations: np.ndarray
    coefficients: np.ndarray
    cls: FlatClassSpec

    def __post_init__(self):
        d = np.atleast_1d(np.asarray(self.durations, dtype=float))
        c = np.atleast_2d(np.asarray(self.coefficients, dtype=float))
        if d.size == 0:
            raise EmptySchedule("EmptySchedule: schedule has no segments")
        if c.shape != (d.size, len(self.cls.generators)):
            raise DimensionMismatch(f"coefficients shape {c.shape} does not match {d.size} segments")
        if np.any(d <= 0) or not np.all(np.isfinite(d)) or not np.all(np.isfinite(c)):
            raise ValueError("durations must be positive and all values finite")
        object.__setattr__(self, "durations", d)
        object.__setattr__(self, "coefficients", c)

    @property
    def total_time(self) -> float:
        return float(self.durations.sum())

    def mean(self) -> np.ndarray:
        return self.durations @ self.coefficients / self.total_time

    def refine(self, m: int) -> "PulseSchedule":
        """Split every segment into ``m`` equal pieces."""
        return PulseSchedule(np.repeat(self.durations / m, m), np.repeat(self.coefficients, m, axis=0), self.cls)


def omega_schedule(durations, params, q: int) -> PulseSchedule:
    """Schedule of omega-circulant segments given as OmegaParams or 4-vectors."""
    rows = [p.as_vector() if isinstance(p, omega.OmegaParams) else np.asarray(p, float) for p in params]
    return PulseSchedule(np.asarray(durations, float), np.array(rows), omega_class(q))


def product_unitary(s: PulseSchedule) -> np.ndarray:
    u = np.eye(s.cls.n, dtype=complex)
    for dt, g in zip(s.durations, s.coefficients):
        u = expm_hermitian(s.cls.hamiltonian(g), dt) @ u
    return u


def average_unitary(s: PulseSchedule) -> np.ndarray:
    return expm_hermitian(s.cls.hamiltonian(s.mean()), s.total_time)


def evolve_schedule(s: PulseSchedule, check: float = 1e-10) -> np.ndarray:
    """Time-ordered product, cross-checked against the averaged Hamiltonian.

    Raises :class:`FlatnessViolation` when the two disagree, which happens
    only if the generators do not commute.
    """
    u = product_unitary(s)
    ua = average_unitary(s)
    scale = 1.0 + s.total_time * max(np.linalg.norm(s.cls.hamiltonian(g), 2) for g in s.coefficients)
    dev = float(np.max(np.abs(u - ua)))
    if dev > check * scale:
        raise FlatnessViolation(f"FlatnessViolation: product and average differ by {dev:.3e}")
    return u


def cnot_schedule(segments: int = 4, q: int = 0) -> PulseSchedule:
    """C-NOT-scale gate: spectrum (1, 1, 1, 3) held for T = pi/2, split evenly.

    In the class eigenbasis the gate is diag(-i, -i, -i, i): a controlled phase
    flip times the global phase -i.
    """
    g = omega.params_from_spectrum([1.0, 1.0, 1.0, 3.0], q).as_vector()
    return omega_schedule(np.full(segments, np.pi / 2 / segments), [g] * segments, q)


def zero_mean_noise(s: PulseSchedule, refine: int, amplitude: float, rng) -> tuple:
    """Random piecewise-constant noise on a uniform refinement of ``s``.

    Returns ``(refined_schedule, noise)`` where ``noise`` has one row per
    refined segment and an exactly zero duration-weighted mean (the refined
    durations are equal within each parent segment, so subtracting the
    weighted mean is exact up to rounding).
    """
    fine = s.refine(refine)
    h = rng.uniform(-amplitude, amplitude, size=fine.coefficients.shape)
    h -= fine.durations @ h / fine.total_time
    return fine, h


def _noise_mean(fine: PulseSchedule, noise: np.ndarray) -> np.ndarray:
    return fine.durations @ noise / fine.total_time


def unitary_deviation(s: PulseSchedule, noise: np.ndarray) -> float:
    """``max|U(g + h) - U(g)|`` without the zero-mean precondition."""
    noisy = PulseSchedule(s.durations, s.coefficients + noise, s.cls)
    return float(np.max(np.abs(product_unitary(noisy) - product_unitary(s))))


def noise_protection_check(s: PulseSchedule, noises, mean_tol: float = 1e-12) -> float:
    """Largest deviation ``max|U(g + h) - U(g)|`` over the supplied noise paths.

    Each noise array must align with the segments of ``s`` (use
    :func:`zero_mean_noise` to build a refinement) and have zero weighted mean.
    """
    worst = 0.0
    u0 = product_unitary(s)
    for h in noises:
        h = np.asarray(h, dtype=float)
        if h.shape != s.coefficients.shape:
            raise DimensionMismatch(f"noise shape {h.shape} does not match schedule {s.coefficients.shape}")
        bias = np.max(np.abs(_noise_mean(s, h)))
        if bias > mean_tol:
            raise BiasedNoise(f"BiasedNoise: weighted noise mean {bias:.3e} exceeds {mean_tol:g}")
        noisy = PulseSchedule(s.durations, s.coefficients + h, s.cls)
        worst = max(worst, float(np.max(np.abs(product_unitary(noisy) - u0))))
    return worst


def biased_deviation(s: PulseSchedule, bias) -> tuple:
    """Deviation caused by a constant offset and the closed-form prediction.

    Returns ``(measured, predicted)``; they agree because only the mean enters.
    """
    bias = np.asarray(bias, dtype=float)
    h = np.tile(bias, (s.durations.size, 1))
    measured = unitary_deviation(s, h)
    shifted = expm_hermitian(s.cls.hamiltonian(s.mean() + bias), s.total_time)
    predicted = float(np.max(np.abs(shifted - average_unitary(s))))
    return measured, predicted
