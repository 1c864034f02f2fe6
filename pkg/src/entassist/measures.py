"""Bipartite entanglement measures of pure states.

Every measure here is a function of the Schmidt spectrum of the state
across the cut (the eigenvalues of either reduced state). The spectrum is
taken from the singular values of the reshaped amplitude tensor, which is
more accurate near product states than diagonalizing ``rho_L``.

Logarithms are base 2 (ebits) for ``eof`` and ``renyi``.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .qcore import Bipartition, PureState, reduced_state

KINDS = ("concurrence", "tangle", "tsallis", "renyi", "eof", "negativity")
# |q - 1| below this sends the Tsallis entropy to its q -> 1 limit
TSALLIS_EOF_BAND = 1e-6


@dataclass(frozen=True)
class MeasureSpec:
    kind: str
    parameter: float | None = None

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown measure kind {self.kind!r}")
        if self.kind in ("tsallis", "renyi"):
            if self.parameter is None or not self.parameter > 0:
                raise ValueError(f"{self.kind} requires a positive parameter")
            if self.kind == "renyi" and self.parameter == 1:
                raise ValueError("renyi requires alpha != 1")
            if self.kind == "tsallis" and self.parameter == 1:
                raise ValueError("tsallis requires q != 1; use eof")
            object.__setattr__(self, "parameter", float(self.parameter))
        elif self.parameter is not None:
            object.__setattr__(self, "parameter", None)

    @classmethod
    def parse(cls, text: str) -> "MeasureSpec":
        """``"concurrence"``, ``"tsallis:2"``, ``"renyi:0.9"`` ..."""
        kind, _, param = text.partition(":")
        return cls(kind.strip(), float(param) if param else None)

    @property
    def label(self) -> str:
        if self.parameter is None:
            return self.kind
        return f"{self.kind}:{self.parameter:g}"

    @property
    def single_qubit_left(self) -> bool:
        return self.kind == "tangle"


CONCURRENCE = MeasureSpec("concurrence")
TANGLE = MeasureSpec("tangle")


# -- spectra ---------------------------------------------------------------

def _check_cut(psi: PureState, cut: Bipartition) -> None:
    cut.check(psi.num_qubits)


def batch_spectra(amps: np.ndarray, num_qubits: int, left) -> np.ndarray:
    """Squared singular values across ``left | rest`` for stacked vectors.

    ``amps`` has shape ``(..., 2**num_qubits)``; vectors need not be
    normalized, so the result sums to each vector's squared norm. The
    trailing axis has length ``min(d_left, d_right)``, sorted descending.
    """
    left = sorted(left)
    right = [i for i in range(num_qubits) if i not in left]
    lead = amps.shape[:-1]
    t = amps.reshape(lead + (2,) * num_qubits)
    off = len(lead)
    t = t.transpose(tuple(range(off)) + tuple(off + i for i in left + right))
    t = t.reshape(lead + (2 ** len(left), 2 ** len(right)))
    if min(t.shape[-2:]) == 2:
        # 2 x d: closed-form eigenvalues of the 2x2 Gram matrix
        if t.shape[-2] != 2:
            t = np.swapaxes(t, -1, -2)
        a = np.einsum("...j,...j->...", t[..., 0, :], t[..., 0, :].conj()).real
        b = np.einsum("...j,...j->...", t[..., 1, :], t[..., 1, :].conj()).real
        c = np.einsum("...j,...j->...", t[..., 0, :], t[..., 1, :].conj())
        s = a + b
        disc = np.sqrt(np.maximum((a - b) ** 2 + 4 * np.abs(c) ** 2, 0.0))
        hi = (s + disc) / 2
        # small root via det / hi avoids cancellation in (s - disc) / 2
        det = np.maximum(a * b - np.abs(c) ** 2, 0.0)
        with np.errstate(divide="ignore", invalid="ignore"):
            lo = np.where(hi > 0, det / hi, 0.0)
        return np.stack([hi, np.minimum(lo, hi)], axis=-1)
    sv = np.linalg.svd(t, compute_uv=False)
    return sv ** 2


def schmidt_spectrum(psi: PureState, cut: Bipartition) -> np.ndarray:
    """Eigenvalues of the reduced state on ``cut.left``, descending, clipped to [0, 1]."""
    _check_cut(psi, cut)
    lam = batch_spectra(psi.amplitudes, psi.num_qubits, cut.left)
    return np.clip(lam, 0.0, 1.0)


def spectrum_value(spec: MeasureSpec, lam: np.ndarray) -> np.ndarray:
    """Measure value from normalized Schmidt spectra ``lam`` (last axis)."""
    lam = np.clip(lam, 0.0, 1.0)
    kind = spec.kind
    if kind in ("concurrence", "tangle"):
        # 1 - sum lam^2 == 2 sum_{i<j} lam_i lam_j, summed without cancellation
        tail = np.cumsum(lam[..., ::-1], axis=-1)[..., ::-1]
        lin = 2 * np.sum(lam[..., :-1] * tail[..., 1:], axis=-1)
        return np.sqrt(2 * lin) if kind == "concurrence" else 2 * lin
    if kind == "eof":
        return _entropy_bits(lam)
    if kind == "tsallis":
        q = spec.parameter
        if abs(q - 1) < TSALLIS_EOF_BAND:
            return _entropy_bits(lam) * np.log(2)
        return (1 - _power_sum(lam, q)) / (q - 1)
    if kind == "renyi":
        alpha = spec.parameter
        return np.maximum(np.log2(_power_sum(lam, alpha)) / (1 - alpha), 0.0)
    if kind == "negativity":
        return (np.sum(np.sqrt(lam), axis=-1) ** 2 - 1) / 2
    raise ValueError(kind)


def _power_sum(lam, p):
    with np.errstate(divide="ignore"):
        return np.sum(np.where(lam > 0, lam ** p, 0.0), axis=-1)


def _entropy_bits(lam):
    with np.errstate(divide="ignore", invalid="ignore"):
        terms = np.where(lam > 0, -lam * np.log2(lam), 0.0)
    return np.maximum(terms.sum(axis=-1), 0.0)


def weighted_values(spec: MeasureSpec, vectors: np.ndarray, num_qubits: int,
                    left, p_floor: float = 1e-14) -> np.ndarray:
    """``p_k * Q(v_k / |v_k|)`` for stacked unnormalized vectors ``v_k``.

    Members with ``p_k = |v_k|^2`` below ``p_floor`` contribute zero.
    """
    lam = batch_spectra(vectors, num_qubits, left)
    p = lam.sum(axis=-1)
    keep = p > p_floor
    safe = np.where(keep, p, 1.0)
    vals = spectrum_value(spec, lam / safe[..., None])
    return np.where(keep, p * vals, 0.0)


# -- named measures ----------------------------------------------------------

def concurrence_pure(psi: PureState, cut: Bipartition) -> float:
    """``sqrt(2 (1 - tr rho_L^2))``; 1 for a Bell pair, 0 on product states."""
    return float(spectrum_value(CONCURRENCE, schmidt_spectrum(psi, cut)))


def tangle_pure(psi: PureState, cut: Bipartition) -> float:
    """``4 det rho_L`` for a single-qubit left side."""
    _check_cut(psi, cut)
    if len(cut.left) != 1:
        raise ValueError("tangle needs a single-qubit left side")
    rho = reduced_state(psi, cut.left).matrix
    det = (rho[0, 0] * rho[1, 1] - rho[0, 1] * rho[1, 0]).real
    return float(max(4 * det, 0.0))


def tsallis_pure(psi: PureState, cut: Bipartition, q: float) -> float:
    """Tsallis-q entropy ``(1 - sum lam^q) / (q - 1)`` of the reduced state.

    For ``0 < |q - 1| < 1e-6`` the q -> 1 limit (von Neumann entropy in nats)
    is returned.
    """
    if not q > 0:
        raise ValueError("tsallis requires q > 0")
    if q == 1:
        raise ValueError("q = 1 is the entanglement of formation; use eof_pure")
    return float(spectrum_value(MeasureSpec("tsallis", q),
                                schmidt_spectrum(psi, cut)))


def renyi_pure(psi: PureState, cut: Bipartition, alpha: float) -> float:
    if not alpha > 0 or alpha == 1:
        raise ValueError("renyi requires alpha > 0 and alpha != 1")
    return float(spectrum_value(MeasureSpec("renyi", alpha),
                                schmidt_spectrum(psi, cut)))


def eof_pure(psi: PureState, cut: Bipartition) -> float:
    """Reduced von Neumann entropy in bits."""
    return float(_entropy_bits(schmidt_spectrum(psi, cut)))


def negativity_pure(psi: PureState, cut: Bipartition) -> float:
    """``(||rho^{T_L}||_1 - 1) / 2`` from the partially transposed projector."""
    _check_cut(psi, cut)
    n = psi.num_qubits
    t = np.multiply.outer(psi.amplitudes, psi.amplitudes.conj())
    t = t.reshape((2,) * (2 * n))
    axes = list(range(2 * n))
    for i in cut.left:
        axes[i], axes[n + i] = axes[n + i], axes[i]
    pt = t.transpose(axes).reshape(2 ** n, 2 ** n)
    trace_norm = np.abs(np.linalg.eigvalsh(pt)).sum()
    return float(max((trace_norm - 1) / 2, 0.0))


def measure_eval(spec: MeasureSpec, psi: PureState, cut: Bipartition) -> float:
    kind = spec.kind
    if kind == "concurrence":
        return concurrence_pure(psi, cut)
    if kind == "tangle":
        return tangle_pure(psi, cut)
    if kind == "tsallis":
        return tsallis_pure(psi, cut, spec.parameter)
    if kind == "renyi":
        return renyi_pure(psi, cut, spec.parameter)
    if kind == "eof":
        return eof_pure(psi, cut)
    return negativity_pure(psi, cut)
