"""Universality certificate for the gate pair {V, W}.

``V = exp(-i H1)`` with H1 a nondegenerate class-X core and
``W = exp(-i Ht / sqrt 2)`` with Ht a nondegenerate class-Y core.  Repeated
commutators of H1 and H2 = W H1 W^dagger generate 16 Hermitian matrices; their
linear independence means the Lie algebra generated is all of u(4).
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .linalg import (
    DEFAULT_TOL,
    column_normalized_rank,
    commutator,
    dagger,
    expm_hermitian,
    hermiticity_residual,
    log10_abs_det,
)
from .omega import OmegaParams, build_hamiltonian, spectrum


@dataclass(frozen=True)
class Generators:
    h1: np.ndarray
    htilde: np.ndarray
    v: np.ndarray
    w: np.ndarray
    p1: OmegaParams
    ptilde: OmegaParams


@dataclass
class CertificateReport:
    rank: int
    real_rank: int
    log10_abs_det: float
    spectra_H1: np.ndarray
    spectra_Htilde: np.ndarray
    nondegenerate: tuple
    min_gaps: tuple
    hermiticity: float

    def as_dict(self) -> dict:
        return {
            "rank": self.rank,
            "real_rank": self.real_rank,
            "log10_abs_det": self.log10_abs_det,
            "spectra_H1": [float(x) for x in self.spectra_H1],
            "spectra_Htilde": [float(x) for x in self.spectra_Htilde],
            "nondegenerate": list(self.nondegenerate),
            "min_gaps": [float(x) for x in self.min_gaps],
            "hermiticity": self.hermiticity,
        }


def build_generators(pi_value: float = np.pi) -> Generators:
    """H1, Ht, V, W.  ``pi_value`` replaces pi in H1 (used for rational controls)."""
    p1 = OmegaParams(1.0, pi_value, 1.0, 2.0, q=0)
    pt = OmegaParams(1.0, np.pi, np.pi / 4, 0.0, q=1)
    h1 = build_hamiltonian(p1)
    ht = build_hamiltonian(pt)
    return Generators(h1, ht, expm_hermitian(h1, 1.0), expm_hermitian(ht, 1.0 / np.sqrt(2.0)), p1, pt)


def generate_sequence(gen: Generators | None = None) -> list:
    """H1..H16 as a list (index 0 holds H1)."""
    g = gen or build_generators()
    h = [g.h1, g.w @ g.h1 @ dagger(g.w)]
    for _ in range(3, 15):
        h.append(1j * commutator(h[0], h[-1]))
    h.append(1j * commutator(h[1], h[2]))  # H15 = i[H2, H3]
    h.append(1j * commutator(h[1], h[4]))  # H16 = i[H2, H5]
    # remove rounding asymmetry accumulated by the nested products
    return [0.5 * (m + dagger(m)) for m in h]


def stack_columns(mats) -> np.ndarray:
    """16x16 matrix whose column j is H_{j+1} read column by column."""
    return np.column_stack([m.flatten(order="F") for m in mats])


def _real_form(m: np.ndarray) -> np.ndarray:
    return np.vstack([m.real, m.imag])


def independence_certificate(pi_value: float = np.pi, swap_h16_for_h1: bool = False) -> CertificateReport:
    gen = build_generators(pi_value)
    seq = generate_sequence(gen)
    herm = max(hermiticity_residual(m) / max(1.0, np.max(np.abs(m))) for m in seq)
    if swap_h16_for_h1:
        seq[15] = seq[0].copy()
    m = stack_columns(seq)
    s1 = np.sort(spectrum(gen.p1))
    st = np.sort(spectrum(gen.ptilde))
    gaps = (float(np.min(np.diff(s1))), float(np.min(np.diff(st))))
    return CertificateReport(
        rank=column_normalized_rank(m),
        real_rank=column_normalized_rank(_real_form(m)),
        log10_abs_det=log10_abs_det(m),
        spectra_H1=spectrum(gen.p1),
        spectra_Htilde=spectrum(gen.ptilde),
        nondegenerate=(gaps[0] > DEFAULT_TOL.degeneracy, gaps[1] > DEFAULT_TOL.degeneracy),
        min_gaps=gaps,
        hermiticity=float(herm),
    )


def trotter_commutator(p: np.ndarray, q: np.ndarray, n: int) -> np.ndarray:
    """``(e^{-iP/sqrt n} e^{iQ/sqrt n} e^{iP/sqrt n} e^{-iQ/sqrt n})^n``, tending to ``e^{[P,Q]}``."""
    if n < 1:
        raise ValueError("n must be >= 1")
    r = 1.0 / np.sqrt(n)
    step = expm_hermitian(p, r) @ expm_hermitian(q, -r) @ expm_hermitian(p, -r) @ expm_hermitian(q, r)
    return np.linalg.matrix_power(step, n)


def commutator_exact(p: np.ndarray, q: np.ndarray) -> np.ndarray:
    """``e^{[P,Q]}``; ``i[P,Q]`` is Hermitian so this is ``expm_hermitian(i[P,Q], 1)``."""
    c = 1j * commutator(p, q)
    return expm_hermitian(0.5 * (c + dagger(c)), 1.0)


def trotter_sum(p: np.ndarray, q: np.ndarray, x: float, y: float, n: int) -> np.ndarray:
    """``(e^{ixP/n} e^{iyQ/n})^n``, tending to ``e^{i(xP + yQ)}``."""
    if n < 1:
        raise ValueError("n must be >= 1")
    step = expm_hermitian(p, -x / n) @ expm_hermitian(q, -y / n)
    return np.linalg.matrix_power(step, n)


def sum_exact(p: np.ndarray, q: np.ndarray, x: float, y: float) -> np.ndarray:
    return expm_hermitian(x * p + y * q, -1.0)


def trotter_errors(p, q, ns, kind: str = "commutator", x: float = 1.0, y: float = 1.0) -> np.ndarray:
    """Max-entry error of the approximant against the exact exponential for each n."""
    if kind == "commutator":
        exact = commutator_exact(p, q)
        return np.array([np.max(np.abs(trotter_commutator(p, q, n) - exact)) for n in ns])
    if kind == "sum":
        exact = sum_exact(p, q, x, y)
        return np.array([np.max(np.abs(trotter_sum(p, q, x, y, n) - exact)) for n in ns])
    raise ValueError(f"unknown kind {kind!r}")


def is_monotone(errors, slack: float = 0.10) -> bool:
    """Each error at most ``(1 + slack)`` times the previous one."""
    e = np.asarray(errors)
    return bool(np.all(e[1:] <= (1.0 + slack) * e[:-1]))
