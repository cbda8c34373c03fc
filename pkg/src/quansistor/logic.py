"""Logical-level pieces: off mode, readout, and the dispersive two-core coupler.

Position states |1>..|4> encode two qubits as |1>=|00>, |2>=|01>, |3>=|10>,
|4>=|11> (first qubit is the more significant bit).
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np

from .errors import DispersiveGuard, NotNormalized, OffsetViolation
from .linalg import dagger, expm_hermitian, hermitian_eig
from .omega import LINKS

# qubit basis (|0>, |1>); sigma_z = |1><1| - |0><0|, sigma^- = |0><1|
SIGMA_Z = np.diag([-1.0, 1.0]).astype(complex)
SIGMA_MINUS = np.array([[0.0, 1.0], [0.0, 0.0]], dtype=complex)
SIGMA_PLUS = SIGMA_MINUS.T.copy()
I2 = np.eye(2, dtype=complex)


@dataclass(frozen=True)
class OffModeParams:
    epsilons: tuple
    hoppings: tuple = (0.0,) * 6  # K_ij on LINKS order (12, 13, 14, 23, 24, 34)
    offset_ratio: float = 10.0

    def validate(self) -> None:
        eps = np.asarray(self.epsilons, dtype=float)
        k = np.asarray(self.hoppings, dtype=float)
        if eps.shape != (4,) or k.shape != (6,):
            raise ValueError("need four energies and six hoppings")
        if np.any(k < 0):
            raise OffsetViolation("OffsetViolation: hoppings must be non-negative")
        gap = min(abs(a - b) for a, b in itertools.combinations(eps, 2))
        if gap <= 0 or gap < self.offset_ratio * float(k.max()):
            raise OffsetViolation(
                f"OffsetViolation: min offset {gap:g} below {self.offset_ratio:g} x max hopping {k.max():g}")


def off_mode_hamiltonian(p: OffModeParams) -> np.ndarray:
    p.validate()
    h = np.diag(np.asarray(p.epsilons, dtype=float)).astype(complex)
    for (i, j), kij in zip(LINKS, p.hoppings):
        h[i - 1, j - 1] = h[j - 1, i - 1] = -kij
    return h


def position_overlaps(h: np.ndarray) -> np.ndarray:
    """Largest |<m|v_k>|^2 for each eigenvector; 1 means position is a good label."""
    _, v = hermitian_eig(h)
    return np.max(np.abs(v) ** 2, axis=0)


def qubit_splitting_check(epsilons, tol: float = 1e-9):
    """Both qubits addressable: e3 - e1 = e4 - e2 (nu1) and e2 - e1 = e4 - e3 (nu2)."""
    e1, e2, e3, e4 = (float(x) for x in epsilons)
    ok = abs((e3 - e1) - (e4 - e2)) <= tol and abs((e2 - e1) - (e4 - e3)) <= tol
    if not ok:
        return False, None, None
    return True, e3 - e1, e2 - e1


def drive_operator(which: str) -> np.ndarray:
    """Real symmetric drive coupling the resonant pairs.

    ``nu1`` flips the first qubit (links 1-3 and 2-4), ``nu2`` the second
    (links 1-2 and 3-4).  The drive shape is a modelling choice.
    """
    pairs = {"nu1": ((0, 2), (1, 3)), "nu2": ((0, 1), (2, 3))}[which]
    d = np.zeros((4, 4))
    for i, j in pairs:
        d[i, j] = d[j, i] = 1.0
    return d


POVM = {
    "first_qubit": (np.diag([1.0, 1.0, 0.0, 0.0]), np.diag([0.0, 0.0, 1.0, 1.0])),
    "second_qubit": (np.diag([1.0, 0.0, 1.0, 0.0]), np.diag([0.0, 1.0, 0.0, 1.0])),
}


def povm_measure(state, which: str = "first_qubit"):
    """Outcome probabilities and renormalized post-measurement states.

    A post-state is ``None`` when its outcome has zero probability.
    """
    psi = np.asarray(state, dtype=complex)
    if psi.shape != (4,) or abs(np.linalg.norm(psi) - 1.0) > 1e-10:
        raise NotNormalized(f"NotNormalized: |psi| = {np.linalg.norm(psi)}")
    probs, posts = [], []
    for e in POVM[which]:
        phi = e @ psi
        p = float(np.real(np.vdot(phi, phi)))
        probs.append(p)
        posts.append(phi / np.sqrt(p) if p > 1e-15 else None)
    return tuple(probs), tuple(posts)


@dataclass(frozen=True)
class DispersiveConfig:
    nu_r: float
    nu_q: float
    g_a: float
    g_b: float
    photon_cutoff: int = 5
    max_ratio: float = 0.1

    def __post_init__(self):
        delta = abs(self.nu_r - self.nu_q)
        if delta <= 0:
            raise DispersiveGuard("DispersiveGuard: resonator and qubits are resonant")
        if max(abs(self.g_a), abs(self.g_b)) / delta > self.max_ratio:
            raise DispersiveGuard(f"DispersiveGuard: g/Delta exceeds {self.max_ratio}")
        if self.photon_cutoff < 2:
            raise DispersiveGuard("DispersiveGuard: photon_cutoff must be >= 2")

    @property
    def delta(self) -> float:
        return abs(self.nu_r - self.nu_q)


def _kron(*ops):
    out = np.array([[1.0 + 0j]])
    for op in ops:
        out = np.kron(out, op)
    return out


def flip_flop() -> np.ndarray:
    """``sigma_A^+ sigma_B^- + sigma_A^- sigma_B^+`` on qubit A (x) qubit B."""
    return _kron(SIGMA_PLUS, SIGMA_MINUS) + _kron(SIGMA_MINUS, SIGMA_PLUS)


def k_effective(cfg: DispersiveConfig) -> float:
    """Flip-flop strength ``2 g_A g_B / Delta`` as quoted for the coupler."""
    return 2.0 * cfg.g_a * cfg.g_b / cfg.delta


def k_second_order(cfg: DispersiveConfig) -> float:
    """Signed flip-flop strength from second-order elimination of the resonator,
    ``g_A g_B / (nu_q - nu_r)``; its magnitude is half of :func:`k_effective`."""
    return cfg.g_a * cfg.g_b / (cfg.nu_q - cfg.nu_r)


def lamb_shifts(cfg: DispersiveConfig) -> tuple:
    """Second-order shifts of each qubit's excited level (vacuum resonator)."""
    d = cfg.nu_q - cfg.nu_r
    return cfg.g_a ** 2 / d, cfg.g_b ** 2 / d


def full_hamiltonian(cfg: DispersiveConfig) -> np.ndarray:
    """Two qubits and a truncated resonator; ordering qubit A (x) qubit B (x) photon."""
    n = cfg.photon_cutoff
    a = np.diag(np.sqrt(np.arange(1, n)), 1).astype(complex)
    ad = dagger(a)
    ip = np.eye(n)
    h = cfg.nu_r * _kron(I2, I2, ad @ a)
    h += cfg.nu_q / 2 * (_kron(SIGMA_Z, I2, ip) + _kron(I2, SIGMA_Z, ip))
    h += cfg.g_a * (_kron(SIGMA_MINUS, I2, ad) + _kron(SIGMA_PLUS, I2, a))
    h += cfg.g_b * (_kron(I2, SIGMA_MINUS, ad) + _kron(I2, SIGMA_PLUS, a))
    return h


def excitation_number(cfg: DispersiveConfig) -> np.ndarray:
    n = cfg.photon_cutoff
    num = np.diag(np.arange(n)).astype(complex)
    up = np.diag([0.0, 1.0]).astype(complex)
    return _kron(I2, I2, num) + _kron(up, I2, np.eye(n)) + _kron(I2, up, np.eye(n))


def effective_hamiltonian(cfg: DispersiveConfig, k: float | None = None) -> np.ndarray:
    k = k_effective(cfg) if k is None else k
    return cfg.nu_q / 2 * (_kron(SIGMA_Z, I2) + _kron(I2, SIGMA_Z)) + k * flip_flop()


def dispersive_effective(cfg: DispersiveConfig):
    """``(K_eff, H_full, H_eff)``."""
    k = k_effective(cfg)
    return k, full_hamiltonian(cfg), effective_hamiltonian(cfg, k)


def sqrt_iswap_target(sign: float = 1.0) -> np.ndarray:
    """``exp(-i sign pi/4 F)``: identity on |00>, |11> and [[c, -i sign s], [-i sign s, c]]
    on |01>, |10> with c = s = 1/sqrt 2."""
    return expm_hermitian(flip_flop(), sign * np.pi / 4)


def gate_fidelity(u: np.ndarray, target: np.ndarray) -> float:
    return float(abs(np.trace(dagger(target) @ u)) / u.shape[0])


def computational_block(cfg: DispersiveConfig, u: np.ndarray) -> np.ndarray:
    """Rows and columns of ``u`` with the resonator in vacuum."""
    idx = [i * cfg.photon_cutoff for i in range(4)]
    return u[np.ix_(idx, idx)]


def sqrt_iswap_fidelity(cfg: DispersiveConfig, coupling: str = "second_order", frame: str = "dressed") -> float:
    """Fidelity of the full resonator model against sqrt(iSWAP).

    The full Hamiltonian is evolved for ``pi/(4|K|)``, the vacuum block is
    taken and the free qubit evolution is removed.  ``coupling`` selects K:
    ``"second_order"`` (default) the signed :func:`k_second_order`,
    ``"quoted"`` the quoted :func:`k_effective`.  ``frame="dressed"`` (default)
    removes free evolution at the Lamb-shifted qubit frequencies, ``"bare"``
    at the bare ones.
    """
    couplings = {"quoted": k_effective, "second_order": k_second_order}
    if coupling not in couplings:
        raise ValueError(f"unknown coupling {coupling!r}")
    k = couplings[coupling](cfg)
    if k == 0:
        raise DispersiveGuard("DispersiveGuard: zero coupling never produces the gate")
    t = np.pi / (4 * abs(k))
    u = computational_block(cfg, expm_hermitian(full_hamiltonian(cfg), t))
    n_a = np.array([0, 0, 1, 1])
    n_b = np.array([0, 1, 0, 1])
    free = cfg.nu_q * (n_a + n_b - 1.0)
    if frame == "dressed":
        la, lb = lamb_shifts(cfg)
        free = free + la * n_a + lb * n_b
    elif frame != "bare":
        raise ValueError(f"unknown frame {frame!r}")
    u = np.diag(np.exp(1j * free * t)) @ u
    return gate_fidelity(u, sqrt_iswap_target(np.sign(k)))


def flip_flop_fidelity(k: float) -> float:
    """Exact flip-flop evolved for pi/(4|K|) against the target (closed 2x2 rotation)."""
    u = expm_hermitian(k * flip_flop(), np.pi / (4 * abs(k)))
    return gate_fidelity(u, sqrt_iswap_target(np.sign(k)))
