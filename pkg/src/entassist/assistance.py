"""Entanglement of assistance: the best average entanglement over decompositions.

Decompositions of a rank-``r`` state ``rho = sum_j mu_j |e_j><e_j|`` into
``m`` pure members are parametrized by an ``m x m`` unitary ``U`` through
the unnormalized members ``v_k = sum_j U[k, j] sqrt(mu_j) |e_j>``. The
search climbs over ``U`` with two-member complex Givens rotations; a
rotation of members ``(a, b)`` leaves every other member untouched, so each
trial move only re-evaluates two pure states.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import measures
from .measures import MeasureSpec, TANGLE, weighted_values
from .qcore import (RANK_TOL, Bipartition, DensityMatrix, PureState, RngSeed,
                    hermitian_eigensystem, random_unitary)

P_FLOOR = 1e-14
UNITARY_TOL = 1e-10
_SY = np.array([[0, -1j], [1j, 0]])
SPIN_FLIP = np.kron(_SY, _SY)


@dataclass(frozen=True)
class Ensemble:
    members: tuple  # of (probability, PureState)

    @property
    def probabilities(self) -> np.ndarray:
        return np.array([p for p, _ in self.members])

    def density(self) -> np.ndarray:
        return sum(p * np.outer(s.amplitudes, s.amplitudes.conj())
                   for p, s in self.members)

    def average(self, spec: MeasureSpec, cut: Bipartition) -> float:
        return float(sum(p * measures.measure_eval(spec, s, cut)
                         for p, s in self.members))


@dataclass(frozen=True)
class OptimizerConfig:
    """Search settings; ``ensemble_size=None`` means ``rank**2``."""

    ensemble_size: int | None = None
    restarts: int = 8
    max_iterations: int = 200
    step_tolerance: float = 1e-4
    rng: RngSeed = field(default_factory=lambda: RngSeed(0))

    def __post_init__(self):
        if self.ensemble_size is not None and self.ensemble_size < 1:
            raise ValueError("ensemble_size must be positive")
        if self.restarts < 1 or self.max_iterations < 1:
            raise ValueError("restarts and max_iterations must be positive")
        if not self.step_tolerance > 0:
            raise ValueError("step_tolerance must be positive")


def _support(rho: DensityMatrix) -> np.ndarray:
    """Columns ``sqrt(mu_j) e_j`` over the numerically nonzero spectrum."""
    mu, vecs = hermitian_eigensystem(rho)
    mu = np.clip(mu, 0.0, None)
    keep = mu > RANK_TOL
    return vecs[:, keep] * np.sqrt(mu[keep])


def ensemble_from_unitary(rho: DensityMatrix, u: np.ndarray, m: int) -> Ensemble:
    w = _support(rho)
    r = w.shape[1]
    u = np.asarray(u, dtype=complex)
    if m < r:
        raise ValueError(f"ensemble size {m} is below rank {r}")
    if u.shape != (m, m):
        raise ValueError(f"expected a {m}x{m} unitary, got shape {u.shape}")
    if np.max(np.abs(u.conj().T @ u - np.eye(m))) > UNITARY_TOL:
        raise ValueError("u is not unitary")
    # zero-padded eigen-columns contribute nothing, so only u[:, :r] matters
    vectors = u[:, :r] @ w.T
    return _ensemble_from_vectors(vectors, rho.num_parties)


def _ensemble_from_vectors(vectors: np.ndarray, n: int) -> Ensemble:
    members = []
    for v in vectors:
        p = float(np.vdot(v, v).real)
        if p < P_FLOOR:
            continue
        members.append((p, PureState(v / np.sqrt(p), n)))
    total = sum(p for p, _ in members)
    # the HJW sum already equals 1 up to roundoff; rescale the last few ulps
    return Ensemble(tuple((p / total, s) for p, s in members))


def _round_robin(m: int) -> list[tuple[np.ndarray, np.ndarray]]:
    """Disjoint member pairings covering every pair once (circle method)."""
    players = list(range(m)) + ([-1] if m % 2 else [])
    size = len(players)
    rounds = []
    for _ in range(size - 1):
        pairs = [(players[i], players[size - 1 - i]) for i in range(size // 2)]
        pairs = [p for p in pairs if -1 not in p]
        rounds.append((np.array([a for a, _ in pairs]),
                       np.array([b for _, b in pairs])))
        players = [players[0], players[-1]] + players[1:-1]
    return rounds


_PHASES = np.exp(1j * np.arange(8) * np.pi / 4)
_FRACTIONS = (1.0, 0.5)


def _climb(vectors: np.ndarray, spec: MeasureSpec, n: int, left,
           cfg: OptimizerConfig) -> np.ndarray:
    """Hill-climb every restart (leading axis of ``vectors``) in lockstep.

    Returns the best objective reached per restart.
    """
    v = vectors.copy()
    n_restart, m, _ = v.shape
    rounds = _round_robin(m)
    step = np.full(n_restart, np.pi / 4)
    value = weighted_values(spec, v, n, left).sum(axis=1)
    phases = np.concatenate([[1.0], np.tile(_PHASES, len(_FRACTIONS))])
    fracs = np.concatenate([[0.0], np.repeat(_FRACTIONS, len(_PHASES))])
    for _ in range(cfg.max_iterations):
        active = np.flatnonzero(step >= cfg.step_tolerance)
        if active.size == 0:
            break
        va_all = v[active]
        start = value[active]
        theta = step[active, None] * fracs[None, :]          # (A, K)
        c = np.cos(theta)[:, None, :, None]
        s = np.sin(theta)[:, None, :, None]
        e = phases[None, None, :, None]
        for a_idx, b_idx in rounds:
            va = va_all[:, a_idx][:, :, None, :]               # (A, P, 1, d)
            vb = va_all[:, b_idx][:, :, None, :]
            new_a = c * va - s * e.conj() * vb                  # (A, P, K, d)
            new_b = s * e * va + c * vb
            score = (weighted_values(spec, new_a, n, left)
                     + weighted_values(spec, new_b, n, left))
            best = np.argmax(score, axis=-1)                    # identity is index 0
            pick = (np.arange(len(active))[:, None],
                    np.arange(len(a_idx))[None, :], best)
            va_all[:, a_idx] = new_a[pick]
            va_all[:, b_idx] = new_b[pick]
        v[active] = va_all
        new_value = weighted_values(spec, va_all, n, left).sum(axis=1)
        gain = new_value - start
        value[active] = np.maximum(new_value, start)
        # halve the step once a sweep gains less than ~step**2 / 10
        stall = gain < 0.1 * step[active] ** 2
        step[active[stall]] /= 2
    return value


def assisted_measure(rho: DensityMatrix, cut: Bipartition, spec: MeasureSpec,
                     cfg: OptimizerConfig | None = None) -> float:
    """Best found ``sum_k p_k Q(psi_k)`` over pure-state decompositions of ``rho``.

    The value is a certified lower bound on the assistance value: it is
    attained by an explicit decomposition and never falls below the
    eigen-decomposition average. Restart ``i`` draws its starting unitary
    from ``cfg.rng.generator(i)``, so adding restarts cannot lower the result.
    """
    cfg = cfg or OptimizerConfig()
    n = rho.num_parties
    cut.check(n)
    if spec.single_qubit_left and len(cut.left) != 1:
        raise ValueError(f"{spec.kind} needs a single-qubit left side")
    w = _support(rho)
    r = w.shape[1]
    if r == 1:
        psi = PureState(w[:, 0] / np.linalg.norm(w[:, 0]), n)
        return measures.measure_eval(spec, psi, cut)
    m = cfg.ensemble_size or r * r
    if m < r:
        raise ValueError(f"ensemble size {m} is below rank {r}")
    left = sorted(cut.left)
    baseline = float(weighted_values(spec, w.T, n, left).sum())
    starts = np.stack([random_unitary(m, cfg.rng.generator(i))[:, :r] @ w.T
                       for i in range(cfg.restarts)])
    best = _climb(starts, spec, n, left, cfg)
    return float(max(baseline, best.max()))


def tangle_assisted(rho: DensityMatrix, cut: Bipartition,
                    cfg: OptimizerConfig | None = None) -> float:
    return assisted_measure(rho, cut, TANGLE, cfg)


def ca_two_qubit_closed(rho: DensityMatrix) -> float:
    """Two-qubit concurrence of assistance ``sum_i sqrt(eig_i(rho rho~))``.

    With ``rho = W W^dag`` the nonzero eigenvalues of ``rho rho~`` are the
    squared singular values of ``W^T (sy x sy) W``, so the sum is taken
    over those singular values; this avoids square roots of roundoff-level
    eigenvalues of the non-Hermitian product.
    """
    if tuple(rho.subsystem_dims) != (2, 2):
        raise ValueError("closed form needs a two-qubit state (dims [2, 2])")
    w = _support(rho)
    return float(np.linalg.svd(w.T @ SPIN_FLIP @ w, compute_uv=False).sum())


def spin_flip_eigen_sum(rho: DensityMatrix) -> float:
    """Direct evaluation of ``sum sqrt(eig(rho rho~))`` from the product matrix."""
    m = rho.matrix
    ev = np.linalg.eigvals(m @ SPIN_FLIP @ m.conj() @ SPIN_FLIP)
    return float(np.sqrt(np.clip(ev.real, 0.0, None)).sum())


def assistance_value(rho: DensityMatrix, cut: Bipartition, spec: MeasureSpec,
                     cfg: OptimizerConfig | None = None) -> float:
    """Assistance value using the cheapest exact route available.

    Rank-one states give the pure measure, two-qubit concurrence the closed
    form; anything else goes through :func:`assisted_measure`.
    """
    w = _support(rho)
    if w.shape[1] == 1:
        psi = PureState(w[:, 0] / np.linalg.norm(w[:, 0]), rho.num_parties)
        return measures.measure_eval(spec, psi, cut)
    if spec.kind == "concurrence" and tuple(rho.subsystem_dims) == (2, 2):
        return ca_two_qubit_closed(rho)
    return assisted_measure(rho, cut, spec, cfg)
