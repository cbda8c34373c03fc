"""Cores coupled to semi-infinite tight-binding leads (hopping 1).

The lead enters only through its surface Green function ``Sigma(E)``; a core
eigenvalue ``lambda`` coupled with strength ``t`` is renormalized to the
solution of ``E = lambda + t^2 Sigma(E)``.  Outside the band ``[-2, 2]`` that
solution is real (a bound state); inside it is complex and decays.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import minimize_scalar

from . import omega
from .errors import BadCoupling, DimensionMismatch, InsideBand, NoConvergence
from .flat_class import PulseSchedule, omega_schedule
from .linalg import _check_square, dagger

TIE = 1e-9
MARGIN = 0.1


@dataclass(frozen=True)
class LeadSpec:
    t_c: complex
    length: int | None = None  # None marks a semi-infinite lead

    def __post_init__(self):
        if self.length is not None and self.length < 1:
            raise ValueError("lead length must be a positive integer")

    @property
    def semi_infinite(self) -> bool:
        return self.length is None

    @property
    def strength(self) -> float:
        return abs(self.t_c) ** 2


def surface_green(E):
    """Retarded surface Green function of a semi-infinite chain.

    Real ``E`` uses the explicit piecewise branch.  Complex ``E`` uses the
    continuation of the in-band retarded value, ``E/2 - i sqrt(4 - E^2)/2``
    with the principal root: this is the physical function in the upper half
    plane and its second-sheet continuation below the band, where decaying
    fixed points live.
    """
    if isinstance(E, complex) or np.iscomplexobj(E):
        E = complex(E)
        if E.imag == 0.0:
            E = E.real
        else:
            return E / 2 - 1j * np.sqrt(4 - E * E) / 2
    E = float(E)
    # outside the band use 2 / (E + sgn(E) sqrt(E^2 - 4)) to avoid cancellation
    if E > 2.0:
        return complex(2.0 / (E + math.sqrt(E * E - 4.0)))
    if E < -2.0:
        return complex(2.0 / (E - math.sqrt(E * E - 4.0)))
    return complex(E / 2, -math.sqrt(max(4.0 - E * E, 0.0)) / 2)


def _unphysical_green(E: float) -> float:
    """The other root of ``S^2 - E S + 1 = 0`` for real ``|E| >= 2`` (|S| >= 1)."""
    return (E + math.copysign(math.sqrt(E * E - 4.0), E)) / 2


def effective_hamiltonian(h, couplings, E) -> np.ndarray:
    """``h + diag(|t_i|^2) Sigma(E)`` for a core with one lead per site."""
    h = _check_square(h)
    c = np.asarray(couplings, dtype=complex)
    if c.shape != (h.shape[0],):
        raise DimensionMismatch(f"{c.size} couplings for a {h.shape[0]}-site core")
    return h + np.diag(np.abs(c) ** 2) * surface_green(E)


def _check_t(t_c) -> float:
    t = abs(t_c)
    if not 0.0 < t < 1.0:
        raise BadCoupling(f"BadCoupling: |t_c| = {t} is not in (0, 1)")
    return t


@dataclass(frozen=True)
class FixedPoint:
    lam: float
    e_star: complex
    is_real: bool
    kind: str  # "bound", "resonance" or "virtual"
    residual: float

    @property
    def decay_rate(self) -> float:
        return abs(self.e_star.imag)


def reality_threshold(t_c) -> float:
    return 2.0 - abs(t_c) ** 2


def fixed_point(lam: float, t_c, check: float = 1e-10) -> FixedPoint:
    """Solution of ``E = lambda + t^2 Sigma(E)`` in closed form.

    ``|lambda| >= 2 - t^2``: real bound state beyond the band edge, odd in
    lambda.  ``|lambda| < 2 sqrt(1 - t^2)``: complex resonance with negative
    imaginary part.  In the thin window between the two (width ~ t^4/4) the
    closed form is a real virtual state that solves the relation only on the
    unphysical branch of Sigma; it is returned with ``kind="virtual"`` and
    ``is_real=False``.
    """
    t2 = _check_t(t_c) ** 2
    lam = float(lam)
    a = abs(lam)
    thr = 2.0 - t2
    snapped = 0.0
    if a >= thr - TIE:
        if a < thr:
            # within the tie band below threshold: snap onto the band edge, which
            # solves the relation for lambda = thr exactly
            e = 2.0
            snapped = thr - a
        else:
            e = ((1 - t2 / 2) * a - (t2 / 2) * math.sqrt(a * a - 4 * (1 - t2))) / (1 - t2)
        e = math.copysign(e, lam)
        res = abs(e - lam - t2 * surface_green(e))
        kind = "bound"
        e_star = complex(e)
    else:
        disc = a * a - 4 * (1 - t2)
        if disc < 0:
            e_star = ((1 - t2 / 2) * lam - 1j * (t2 / 2) * math.sqrt(-disc)) / (1 - t2)
            res = abs(e_star - lam - t2 * surface_green(complex(e_star)))
            kind = "resonance"
        else:
            # the root that joins continuously onto the bound branch at threshold
            e = ((1 - t2 / 2) * a - (t2 / 2) * math.sqrt(disc)) / (1 - t2)
            e = math.copysign(e, lam)
            res = abs(e - lam - t2 * _unphysical_green(e))
            kind = "virtual"
            e_star = complex(e)
    # Sigma has a square-root branch point at |E| = 2, so rounding in E alone
    # produces a residual of order t^2 eps |E| / sqrt|4 - E^2| close to the edge
    gap = abs(4.0 - abs(e_star) ** 2)
    cond = 8 * np.finfo(float).eps * t2 * abs(e_star) / math.sqrt(gap) if gap > 0 else 0.0
    if not res <= check * (1.0 + a) + cond + snapped:
        raise NoConvergence(f"NoConvergence: fixed-point residual {res:.3e} at lambda={lam}")
    return FixedPoint(lam, e_star, kind == "bound", kind, float(res))


def decay_rate(lam: float, t_c) -> float:
    return fixed_point(lam, t_c).decay_rate


def fixed_point_residual(e, lam: float, t_c) -> float:
    """``|E - lambda - t^2 Sigma(E)|`` with the retarded (physical) Sigma."""
    return float(abs(e - lam - abs(t_c) ** 2 * surface_green(e)))


def invert_fixed_point(e_target: float, t_c) -> float:
    """Bare energy whose bound-state fixed point is ``e_target`` (``|e| >= 2``)."""
    t2 = _check_t(t_c) ** 2
    e = float(e_target)
    if abs(e) < 2.0:
        raise InsideBand(f"InsideBand: |E| = {abs(e)} < 2 has no real preimage")
    root = math.sqrt(max(e * e / 4 - 1.0, 0.0))
    return (1 - t2 / 2) * e + math.copysign(t2 * root, e)


def bound_state_exists(lam: float, t_c) -> bool:
    """Independent test for a real root of ``f(E) = E - lambda - t^2 Sigma(E)``
    with ``|E| >= 2``, using only :func:`surface_green`.

    ``f`` is continuous beyond the edge and positive far out (for lambda of
    either sign after reflection), so a root exists iff ``f`` changes sign
    on the bracket.  A residual test would be ill-conditioned here: near the
    edge ``sqrt(E - 2)`` turns rounding in E into errors of order 1e-8.
    """
    t2 = abs(t_c) ** 2
    sgn = 1.0 if lam >= 0 else -1.0

    def f(x):
        return sgn * (x - lam - t2 * surface_green(x).real)

    edge = 2.0 * sgn
    far = sgn * (abs(lam) + t2 + 2.0)
    if f(far) <= 0:
        raise NoConvergence("NoConvergence: far end of the bracket is not positive")
    return f(edge) <= 0


def locate_threshold(t_c, lo: float = 0.0, hi: float = 3.0, tol: float = 1e-12) -> float:
    """Bisection on :func:`bound_state_exists` for ``lambda >= 0``."""
    if bound_state_exists(lo, t_c) or not bound_state_exists(hi, t_c):
        raise NoConvergence("NoConvergence: threshold not bracketed")
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if bound_state_exists(mid, t_c):
            hi = mid
        else:
            lo = mid
    return 0.5 * (lo + hi)


def band_center_decay(t_c) -> dict:
    """Both readings of the band-centre decay scale for one coupling.

    ``rate`` is ``|Im E*(0)| = t^2 / sqrt(1 - t^2)`` and ``bracket`` is the
    same without the ``1/(1 - t^2)`` prefactor, ``t^2 sqrt(1 - t^2)``.
    """
    t2 = _check_t(t_c) ** 2
    rate = decay_rate(0.0, t_c)
    return {"rate": rate, "bracket": (1 - t2) * rate, "rate_closed": t2 / math.sqrt(1 - t2),
            "bracket_closed": t2 * math.sqrt(1 - t2)}


def max_bracket_decay(xatol: float = 1e-12) -> tuple:
    """Maximize ``(1 - t^2) |Im E*(0, t)|`` over ``t^2`` in (0, 1).

    Returns ``(max_value, argmax_t2)``; analytically ``2/(3 sqrt 3)`` at 2/3.
    """
    res = minimize_scalar(lambda s: -band_center_decay(math.sqrt(s))["bracket"],
                          bounds=(1e-6, 1 - 1e-6), method="bounded", options={"xatol": xatol})
    return -float(res.fun), float(res.x)


@dataclass(frozen=True)
class ProtectedSchedule:
    schedule: PulseSchedule
    scale: int
    shift: float
    t_c: float
    q: int

    @property
    def global_phase(self) -> complex:
        """Phase picked up by the uniform shift; multiply ``U_eff`` by its inverse."""
        return complex(np.exp(-1j * self.shift * self.schedule.total_time * self.scale))


def _segment_spectra(s: PulseSchedule, q: int) -> np.ndarray:
    return np.array([omega.spectrum(omega.OmegaParams.from_vector(g, q)) for g in s.coefficients])


def protected_schedule(target: PulseSchedule, t_c, q: int, margin: float = MARGIN,
                       min_abs: float = 0.05) -> ProtectedSchedule:
    """Lead-compensated version of an omega-circulant schedule.

    Energies are scaled by an integer ``n`` (durations by ``1/n``) until every
    target energy ``n (lambda + s)`` lies at least ``margin`` outside the band,
    then each is replaced by its fixed-point preimage.  A uniform shift ``s``
    is applied when some eigenvalue sits within ``min_abs`` of zero; it only
    contributes the global phase ``exp(-i s T)``.
    """
    _check_t(t_c)
    lam = _segment_spectra(target, q)
    edge = 2.0 + margin
    shift = 0.0
    if np.min(np.abs(lam)) < min_abs:
        shift = 1.0 - float(np.min(lam))
    shifted = lam + shift
    n = max(1, int(math.ceil(edge / float(np.min(np.abs(shifted))))))
    bare = []
    for row in shifted:
        pis = [invert_fixed_point(n * x, t_c) for x in row]
        bare.append(omega.params_from_spectrum(pis, q).as_vector())
    comp = omega_schedule(target.durations / n, bare, q)
    return ProtectedSchedule(comp, n, shift, float(abs(t_c)), q)


def effective_unitary(ps: ProtectedSchedule) -> np.ndarray:
    """Evolution of the compensated schedule under the lead-renormalized energies,
    with the shift phase removed."""
    u_basis = omega.fourier_basis(ps.q)
    u = np.eye(4, dtype=complex)
    for dt, g in zip(ps.schedule.durations, ps.schedule.coefficients):
        pis = omega.spectrum(omega.OmegaParams.from_vector(g, ps.q))
        fps = [fixed_point(x, ps.t_c) for x in pis]
        if not all(fp.is_real for fp in fps):
            raise InsideBand("InsideBand: compensated segment has a decaying mode")
        e = np.array([fp.e_star.real for fp in fps])
        u = (u_basis * np.exp(-1j * dt * e)) @ dagger(u_basis) @ u
    return u / ps.global_phase
