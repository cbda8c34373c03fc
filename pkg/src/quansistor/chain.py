"""Two cores joined face to face by four finite leads of L sites.

With both cores in the same omega class the system splits into four
independent modes.  Each mode is a dot of energy ``lambda`` coupled by ``t1``
to an L-site chain (hopping 1) whose far end couples by ``t2`` to a dot of
energy ``mu``.  Mode eigenenergies are the L+2 real roots of the
cross-multiplied constraint, written with Chebyshev polynomials of the second
kind.  Amplitudes use the scaled endpoints ``beta_0 = conj(t1) alpha`` and
``beta_{L+1} = t2 gamma``.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.linalg import solve_banded

from . import omega
from .errors import ClassMismatch, NoPair, NotNormalized, RootCountMismatch, SizeLimit
from .leads import LeadSpec
from .linalg import dagger, fix_phase, hermitian_eig

MAX_SITES = 2000


@dataclass(frozen=True)
class ModeSpec:
    lam: float
    mu: float
    t1: complex
    t2: complex
    L: int

    def __post_init__(self):
        if self.L < 1:
            raise ValueError("lead length L must be >= 1")
        if abs(self.t1) == 0 or abs(self.t2) == 0:
            raise ValueError("couplings must be nonzero")

    @property
    def s1(self) -> float:
        return abs(self.t1) ** 2

    @property
    def s2(self) -> float:
        return abs(self.t2) ** 2

    @property
    def n_sites(self) -> int:
        return self.L + 2

    @property
    def mirror_symmetric(self) -> bool:
        return abs(self.lam - self.mu) <= 1e-12 and abs(self.s1 - self.s2) <= 1e-12


@dataclass
class ChainState:
    energy: float
    beta: np.ndarray  # beta_0 .. beta_{L+1}, consistent with `state`
    state: np.ndarray  # unit vector on the L+2 mode sites
    kind: str = "continuum"  # bound, hybridized or continuum
    parity: str = "none"  # symmetric, antisymmetric or none
    residual: float = 0.0

    @property
    def endpoint_weight(self) -> float:
        return float(abs(self.state[0]) ** 2 + abs(self.state[-1]) ** 2)


@dataclass(frozen=True)
class Expansion:
    """A state written in a mode eigenbasis: ``sum_n c_n |E_n>``."""

    energies: np.ndarray
    coefficients: np.ndarray
    states: tuple = ()


def mode_hamiltonian(m: ModeSpec) -> np.ndarray:
    n = m.n_sites
    if n > MAX_SITES:
        raise SizeLimit(f"SizeLimit: {n} sites exceeds {MAX_SITES}")
    h = np.zeros((n, n), dtype=complex)
    h[0, 0] = m.lam
    h[-1, -1] = m.mu
    h[0, 1] = m.t1
    h[1, 0] = np.conj(m.t1)
    for j in range(1, m.L):
        h[j, j + 1] = h[j + 1, j] = 1.0
    h[m.L, m.L + 1] = m.t2
    h[m.L + 1, m.L] = np.conj(m.t2)
    return h


def dense_oracle(m: ModeSpec):
    """Energies and eigenvectors of the explicit mode matrix."""
    return hermitian_eig(mode_hamiltonian(m))


def mode_decouple(core1: omega.OmegaParams, core2: omega.OmegaParams, leads: LeadSpec,
                  t_c2: complex | None = None) -> list:
    """Four ModeSpec, mode k carrying ``(spectrum(core1)[k], spectrum(core2)[k])``."""
    if core1.q != core2.q:
        raise ClassMismatch(f"ClassMismatch: cores have q={core1.q} and q={core2.q}")
    if leads.length is None:
        raise ValueError("mode_decouple needs a finite lead length")
    lam = omega.eigenvalues(core1)
    mu = omega.eigenvalues(core2)
    t2 = leads.t_c if t_c2 is None else t_c2
    return [ModeSpec(float(a), float(b), leads.t_c, t2, leads.length) for a, b in zip(lam, mu)]


def full_hamiltonian(core1: omega.OmegaParams, core2: omega.OmegaParams, leads: LeadSpec,
                     t_c2: complex | None = None) -> np.ndarray:
    """Single-particle matrix of the whole system, ``8 + 4L`` sites.

    Site order: core 1 (4), lead slice 1 (4), ..., lead slice L (4), core 2 (4);
    within each block the four leads in core-site order.
    """
    L = leads.length
    n = 8 + 4 * L
    if n > MAX_SITES:
        raise SizeLimit(f"SizeLimit: {n} sites exceeds {MAX_SITES}")
    t1 = leads.t_c
    t2 = leads.t_c if t_c2 is None else t_c2
    h = np.zeros((n, n), dtype=complex)
    eye = np.eye(4)
    h[:4, :4] = omega.build_hamiltonian(core1)
    h[-4:, -4:] = omega.build_hamiltonian(core2)
    h[:4, 4:8] = t1 * eye
    for j in range(L - 1):
        a = 4 + 4 * j
        h[a:a + 4, a + 4:a + 8] = eye
    h[-8:-4, -4:] = t2 * eye
    upper = np.triu(h, 1)
    return np.diag(np.diag(h)) + upper + dagger(upper)


def chebyshev_u(n: int, x):
    """U_n(x) by the three-term recursion, with U_{-1} = 0 and U_{-2} = -1."""
    x = np.asarray(x, dtype=float)
    if n == -2:
        return -np.ones_like(x)
    prev, cur = np.zeros_like(x), np.ones_like(x)  # U_{-1}, U_0
    if n == -1:
        return prev
    for _ in range(n):
        prev, cur = cur, 2 * x * cur - prev
    return cur


def _chebyshev_pair(L: int, x: float):
    """(U_{L-2}(x), U_{L-1}(x))."""
    return float(chebyshev_u(L - 2, x)), float(chebyshev_u(L - 1, x))


def constraint_residual(E: float, m: ModeSpec) -> float:
    """Cross-multiplied constraint ``(D Dt E - D - Dt) U_{L-1} - (D Dt - 1) U_{L-2}``
    with ``D = (E - lambda)/|t1|^2`` and ``Dt = (E - mu)/|t2|^2``."""
    d = (E - m.lam) / m.s1
    dt = (E - m.mu) / m.s2
    u2, u1 = _chebyshev_pair(m.L, E / 2)
    return (d * dt * E - d - dt) * u1 - (d * dt - 1) * u2


def constraint_scale(E: float, m: ModeSpec) -> float:
    """Sum of term magnitudes in :func:`constraint_residual`, for relative tests."""
    d = (E - m.lam) / m.s1
    dt = (E - m.mu) / m.s2
    u2, u1 = _chebyshev_pair(m.L, E / 2)
    return (abs(d * dt * E) + abs(d) + abs(dt)) * abs(u1) + (abs(d * dt) + 1) * abs(u2)


def characteristic(E: float, m: ModeSpec) -> float:
    """``det(E - H)`` of the mode matrix; equals ``s1 s2 constraint_residual``."""
    a = E - m.lam
    b = E - m.mu
    u2, u1 = _chebyshev_pair(m.L, E / 2)
    return (a * b * E - a * m.s2 - b * m.s1) * u1 - (a * b - m.s1 * m.s2) * u2


def _tridiagonal(m: ModeSpec):
    diag = np.zeros(m.n_sites)
    diag[0], diag[-1] = m.lam, m.mu
    off = np.ones(m.n_sites - 1)
    off[0], off[-1] = abs(m.t1), abs(m.t2)
    return diag, off


def sturm_count(diag, off, x: float) -> int:
    """Number of eigenvalues of the real symmetric tridiagonal below ``x``."""
    # tiny pivots are replaced by -pivmin, as in LAPACK's bisection
    pivmin = np.finfo(float).tiny * max(1.0, float(np.max(np.asarray(off) ** 2, initial=0.0)))
    count = 0
    d = diag[0] - x
    for k in range(len(diag)):
        if k:
            d = diag[k] - x - off[k - 1] ** 2 / d
        if abs(d) < pivmin:
            d = -pivmin
        if d < 0:
            count += 1
    return count


def _bisect_root(diag, off, k: int, lo: float, hi: float, tol: float) -> float:
    """k-th eigenvalue (0-based) by Sturm bisection inside [lo, hi]."""
    for _ in range(200):
        if hi - lo <= tol * max(1.0, abs(lo), abs(hi)):
            break
        mid = 0.5 * (lo + hi)
        if mid <= lo or mid >= hi:
            break
        if sturm_count(diag, off, mid) > k:
            hi = mid
        else:
            lo = mid
    return 0.5 * (lo + hi)


def _beta_left(E: float, m: ModeSpec) -> np.ndarray:
    d = (E - m.lam) / m.s1
    b = np.empty(m.L + 2)
    b[0], b[1] = 1.0, d
    for j in range(m.L):
        b[j + 2] = E * b[j + 1] - b[j]
    return b


def _beta_right(E: float, m: ModeSpec) -> np.ndarray:
    dt = (E - m.mu) / m.s2
    r = np.empty(m.L + 2)
    r[0], r[1] = 1.0, dt
    for j in range(m.L):
        r[j + 2] = E * r[j + 1] - r[j]
    return r[::-1]


def beta_chebyshev(E: float, m: ModeSpec) -> np.ndarray:
    """``beta_j = D U_{j-1}(E/2) - U_{j-2}(E/2)`` evaluated term by term."""
    d = (E - m.lam) / m.s1
    return np.array([d * chebyshev_u(j - 1, E / 2) - chebyshev_u(j - 2, E / 2) for j in range(m.L + 2)])


def unscale(beta, m: ModeSpec) -> np.ndarray:
    """Site amplitudes ``(beta_0/conj(t1), beta_1..beta_L, beta_{L+1}/t2)``."""
    v = np.array(beta, dtype=complex)
    v[0] = v[0] / np.conj(m.t1)
    v[-1] = v[-1] / m.t2
    return v


def _state_from_beta(E: float, beta: np.ndarray, m: ModeSpec, h: np.ndarray):
    v = unscale(beta, m)
    with np.errstate(over="ignore", invalid="ignore"):
        norm = np.linalg.norm(v)
    if not np.isfinite(norm) or norm == 0:
        return v, np.inf
    v /= norm
    v = fix_phase(v[:, None])[:, 0]
    res = float(np.linalg.norm(h @ v - E * v))
    return v, res


def _rescale_beta(v: np.ndarray, m: ModeSpec) -> np.ndarray:
    b = v.copy()
    b[0] = v[0] * np.conj(m.t1)
    b[-1] = v[-1] * m.t2
    return b


def _parity(beta: np.ndarray, m: ModeSpec, tol: float = 1e-9) -> str:
    if not m.mirror_symmetric:
        return "none"
    scale = np.max(np.abs(beta))
    rev = beta[::-1]
    if np.max(np.abs(rev - beta)) <= tol * scale:
        return "symmetric"
    if np.max(np.abs(rev + beta)) <= tol * scale:
        return "antisymmetric"
    return "none"


def _mirror_parts(beta: np.ndarray) -> tuple:
    rev = beta[::-1]
    return 0.5 * (beta + rev), 0.5 * (beta - rev)


def solve_spectrum(m: ModeSpec, tol: float = 1e-15, check: float = 1e-9) -> list:
    """All L+2 eigenstates of one mode, ascending in energy.

    Roots are isolated one at a time by Sturm-count bisection on the real
    tridiagonal with couplings ``|t1|, 1, ..., 1, |t2|`` (unitarily equivalent
    to the mode matrix); each root is then turned into amplitudes by the
    recursion from whichever end gives the smaller Schroedinger residual,
    polished by inverse iteration when needed.  For mirror-symmetric modes the
    state is projected onto its better parity sector, and roots closer than
    the working precision are split into one even and one odd state.
    """
    diag, off = _tridiagonal(m)
    n = m.n_sites
    bound = max(abs(m.lam), abs(m.mu)) + 2.0 + abs(m.t1) + abs(m.t2) + 1.0
    if sturm_count(diag, off, -bound) != 0 or sturm_count(diag, off, bound) != n:
        raise RootCountMismatch("RootCountMismatch: Gershgorin bracket does not hold all roots")
    energies = np.array([_bisect_root(diag, off, k, -bound, bound, tol) for k in range(n)])
    if len(energies) != n or np.any(np.diff(energies) < 0):
        raise RootCountMismatch(f"RootCountMismatch: found {len(np.unique(energies))} of {n} roots")

    h = mode_hamiltonian(m)
    mirror = m.mirror_symmetric
    states = []
    for e in energies:
        best = None
        with np.errstate(over="ignore", invalid="ignore"):
            cands = (_beta_left(e, m), _beta_right(e, m))
        for beta in cands:
            v, res = _state_from_beta(e, beta, m, h)
            if best is None or res < best[1]:
                best = (v, res)
        v, res = best
        if res > 1e-12:
            v, res = _inverse_iteration(e, v, h, res)
        if mirror:
            # exact eigenstates of a mirror-symmetric mode have definite parity
            v, res = min((_state_from_beta(e, part, m, h) for part in _mirror_parts(_rescale_beta(v, m))),
                         key=lambda x: x[1])
        if res > check:
            raise RootCountMismatch(f"RootCountMismatch: Schroedinger residual {res:.3e} at E={e}")
        beta = _rescale_beta(v, m)
        states.append(ChainState(float(e), beta, v, residual=res, parity=_parity(beta, m)))
    if mirror:
        _split_clusters(states, m, h)
    _classify(states)
    return states


def _inverse_iteration(E: float, v: np.ndarray, h: np.ndarray, res: float, steps: int = 2):
    """Polish an approximate eigenvector with shifted inverse iteration on the tridiagonal."""
    n = h.shape[0]
    ab = np.zeros((3, n), dtype=complex)
    ab[0, 1:] = np.diag(h, 1)
    ab[1] = np.diag(h) - (E + 1e-13 * max(1.0, abs(E)))
    ab[2, :-1] = np.diag(h, -1)
    x = v
    for _ in range(steps):
        try:
            x = solve_banded((1, 1), ab, x)
        except np.linalg.LinAlgError:
            break
        if not np.all(np.isfinite(x)):
            break
        x = fix_phase((x / np.linalg.norm(x))[:, None])[:, 0]
    r = float(np.linalg.norm(h @ x - E * x)) if np.all(np.isfinite(x)) else np.inf
    return (x, r) if r < res else (v, res)


def _split_clusters(states: list, m: ModeSpec, h: np.ndarray, gap: float = 1e-12) -> None:
    """Replace an unresolved pair (same parity, energies within ``gap``) by its even and odd parts."""
    for a, b in zip(states, states[1:]):
        if b.energy - a.energy > gap * max(1.0, abs(a.energy)) or a.parity != b.parity:
            continue
        parts = []
        for beta in _mirror_parts(a.beta):
            v, _ = _state_from_beta(a.energy, beta, m, h)
            parts.append((float(np.real(np.vdot(v, h @ v))), v))
        parts.sort(key=lambda x: x[0])
        for st, (_, v) in zip((a, b), parts):
            st.state = v
            st.residual = float(np.linalg.norm(h @ v - st.energy * v))
            st.beta = _rescale_beta(v, m)
            st.parity = _parity(st.beta, m)


def _classify(states: list) -> None:
    n_bound = 0
    for s in states:
        if abs(s.energy) > 2.0:
            s.kind = "bound"
            n_bound += 1
    want = max(0, 2 - n_bound)
    inband = sorted((s for s in states if s.kind != "bound"), key=lambda s: -s.endpoint_weight)
    for s in inband[:want]:
        s.kind = "hybridized"


def odd_l_small_root(states: list) -> float:
    """Energy of the in-band state closest to zero (the O(lambda t^2) root for odd L)."""
    return min((s.energy for s in states), key=abs)


def identified_pair(states: list) -> tuple:
    """(symmetric-or-lower, other) pair used for memory experiments.

    The bound pair when two bound states exist, otherwise the hybridized pair.
    """
    bound = [s for s in states if s.kind == "bound"]
    pair = bound if len(bound) == 2 else [s for s in states if s.kind == "hybridized"]
    if len(pair) != 2:
        raise NoPair("NoPair: no bound or hybridized pair")
    return tuple(sorted(pair, key=lambda s: s.energy))


def pair_splitting(states: list) -> float:
    a, b = identified_pair(states)
    return b.energy - a.energy


def localize_left(m: ModeSpec, states: list | None = None) -> Expansion:
    """``(|phi_S> + |phi_A>)/sqrt 2`` over the identified pair."""
    states = states if states is not None else solve_spectrum(m)
    a, b = identified_pair(states)
    c = np.array([1.0, 1.0]) / np.sqrt(2.0)
    return Expansion(np.array([a.energy, b.energy]), c, (a.state, b.state))


def expansion_vector(x: Expansion) -> np.ndarray:
    return sum(c * s for c, s in zip(x.coefficients, x.states))


def survival_probability(x: Expansion, t):
    """``|<psi| exp(-i t H) |psi>|^2`` from the eigen-expansion; ``t`` may be an array."""
    c = np.asarray(x.coefficients, dtype=complex)
    norm = float(np.sum(np.abs(c) ** 2))
    if abs(norm - 1.0) > 1e-10:
        raise NotNormalized(f"NotNormalized: sum |c|^2 = {norm}")
    t = np.asarray(t, dtype=float)
    w = np.abs(c) ** 2
    # only energy differences matter; a reference energy keeps the phases small
    e = np.asarray(x.energies, dtype=float)
    e = e - float(w @ e)
    amp = np.exp(-1j * np.multiply.outer(t, e)) @ w
    return np.abs(amp) ** 2


def expand(psi, states: list) -> Expansion:
    """Coefficients of an arbitrary normalized mode vector in the solved eigenbasis."""
    psi = np.asarray(psi, dtype=complex)
    if abs(np.linalg.norm(psi) - 1.0) > 1e-10:
        raise NotNormalized(f"NotNormalized: |psi| = {np.linalg.norm(psi)}")
    vecs = np.array([s.state for s in states]).T
    return Expansion(np.array([s.energy for s in states]), dagger(vecs) @ psi, tuple(s.state for s in states))
