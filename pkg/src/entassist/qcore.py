"""Multi-qubit states, partial traces and seeded random-state generation.

Amplitude indexing puts party ``A_1`` (index 0) on the most significant bit,
so ``|b_0 b_1 ... b_{n-1}>`` lives at index ``sum(b_i * 2**(n-1-i))``.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

NORM_TOL = 1e-12
HERMITIAN_TOL = 1e-12
PSD_TOL = 1e-10
EIG_RECON_TOL = 1e-10
FILE_RENORM_TOL = 1e-8
# eigenvalues below this are treated as exact zeros when forming ensembles
RANK_TOL = 1e-13


def _default_labels(n: int) -> tuple[str, ...]:
    return tuple(f"A{i + 1}" for i in range(n))


@dataclass(frozen=True)
class PureState:
    """Normalized state vector over ``num_qubits`` qubits."""

    amplitudes: np.ndarray
    num_qubits: int
    labels: tuple[str, ...] = ()

    def __post_init__(self):
        amps = np.array(self.amplitudes, dtype=complex).reshape(-1)
        if self.num_qubits < 1:
            raise ValueError("num_qubits must be positive")
        if amps.size != 2 ** self.num_qubits:
            raise ValueError(
                f"expected {2 ** self.num_qubits} amplitudes, got {amps.size}")
        norm = np.linalg.norm(amps)
        if abs(norm - 1.0) > NORM_TOL:
            raise ValueError(f"state is not normalized (norm={norm!r})")
        amps.setflags(write=False)
        object.__setattr__(self, "amplitudes", amps)
        labels = tuple(self.labels) or _default_labels(self.num_qubits)
        if len(labels) != self.num_qubits:
            raise ValueError("one label per qubit required")
        object.__setattr__(self, "labels", labels)

    @classmethod
    def from_amplitudes(cls, amplitudes, normalize: bool = False) -> "PureState":
        amps = np.asarray(amplitudes, dtype=complex).reshape(-1)
        n = int(round(np.log2(amps.size))) if amps.size else 0
        if amps.size == 0 or 2 ** n != amps.size:
            raise ValueError("amplitude count must be a power of two")
        if normalize:
            norm = np.linalg.norm(amps)
            if norm == 0:
                raise ValueError("zero vector cannot be normalized")
            amps = amps / norm
        return cls(amps, n)

    def tensor(self, other: "PureState") -> "PureState":
        return PureState(np.kron(self.amplitudes, other.amplitudes),
                         self.num_qubits + other.num_qubits)


@dataclass(frozen=True)
class DensityMatrix:
    """Unit-trace positive semidefinite operator with its subsystem dims."""

    matrix: np.ndarray
    subsystem_dims: tuple[int, ...]
    validate: bool = field(default=True, repr=False, compare=False)

    def __post_init__(self):
        m = np.array(self.matrix, dtype=complex)
        dims = tuple(int(d) for d in self.subsystem_dims)
        if any(d < 1 for d in dims):
            raise ValueError("subsystem dimensions must be positive")
        dim = int(np.prod(dims))
        if m.shape != (dim, dim):
            raise ValueError(f"matrix shape {m.shape} does not match dims {dims}")
        if self.validate:
            if np.max(np.abs(m - m.conj().T)) > HERMITIAN_TOL:
                raise ValueError("matrix is not Hermitian")
            tr = np.trace(m).real
            if abs(tr - 1.0) > NORM_TOL:
                raise ValueError(f"trace is {tr!r}, expected 1")
            if np.linalg.eigvalsh(m).min() < -PSD_TOL:
                raise ValueError("matrix is not positive semidefinite")
        m.setflags(write=False)
        object.__setattr__(self, "matrix", m)
        object.__setattr__(self, "subsystem_dims", dims)

    @property
    def num_parties(self) -> int:
        return len(self.subsystem_dims)

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    def purity(self) -> float:
        return float(np.real(np.vdot(self.matrix, self.matrix)))


@dataclass(frozen=True)
class Bipartition:
    """Split of party indices into ``left | right``."""

    left: frozenset
    right: frozenset

    def __post_init__(self):
        left, right = frozenset(self.left), frozenset(self.right)
        if not left or not right:
            raise ValueError("both sides of a bipartition must be nonempty")
        if left & right:
            raise ValueError("bipartition sides overlap")
        if any(i < 0 for i in left | right):
            raise ValueError("party indices must be nonnegative")
        object.__setattr__(self, "left", left)
        object.__setattr__(self, "right", right)

    @classmethod
    def split(cls, left: Iterable[int], num_parties: int) -> "Bipartition":
        """``left`` against every other party of an ``num_parties`` system."""
        left = frozenset(left)
        return cls(left, frozenset(range(num_parties)) - left)

    @property
    def parties(self) -> frozenset:
        return self.left | self.right

    def check(self, num_parties: int) -> None:
        if self.parties != frozenset(range(num_parties)):
            raise ValueError(
                f"bipartition {self} does not cover parties 0..{num_parties - 1}")

    def swapped(self) -> "Bipartition":
        return Bipartition(self.right, self.left)

    def __str__(self):
        fmt = lambda s: "".join(f"A{i + 1}" for i in sorted(s))
        return f"{fmt(self.left)}|{fmt(self.right)}"


@dataclass(frozen=True)
class RngSeed:
    """Seed plus stream index; each pair names one reproducible stream.

    Substreams (per restart, per sample) are addressed through extra
    ``spawn_key`` entries, so results do not depend on evaluation order.
    """

    seed: int
    stream_index: int = 0

    def __post_init__(self):
        if not 0 <= self.seed < 2 ** 64:
            raise ValueError("seed must be a 64-bit unsigned integer")
        if self.stream_index < 0:
            raise ValueError("stream_index must be nonnegative")

    def generator(self, *sub: int) -> np.random.Generator:
        ss = np.random.SeedSequence(self.seed,
                                    spawn_key=(self.stream_index, *sub))
        return np.random.default_rng(ss)


def partial_trace(state: DensityMatrix, keep: Iterable[int]) -> DensityMatrix:
    """Reduced state on the parties in ``keep`` (kept in ascending order)."""
    keep = sorted(set(keep))
    n = state.num_parties
    if not keep:
        raise ValueError("keep set must be nonempty")
    if keep[0] < 0 or keep[-1] >= n:
        raise IndexError(f"party index out of range for {n} parties")
    dims = state.subsystem_dims
    traced = [i for i in range(n) if i not in keep]
    t = state.matrix.reshape(dims + dims)
    # move kept row/col axes to the front, traced ones to the back
    perm = keep + traced + [n + i for i in keep] + [n + i for i in traced]
    t = t.transpose(perm)
    dk = int(np.prod([dims[i] for i in keep]))
    dt = int(np.prod([dims[i] for i in traced])) if traced else 1
    t = t.reshape(dk, dt, dk, dt)
    reduced = np.einsum("ijkj->ik", t)
    return DensityMatrix(reduced, tuple(dims[i] for i in keep), validate=False)


def pure_to_density(psi: PureState) -> DensityMatrix:
    a = psi.amplitudes
    return DensityMatrix(np.outer(a, a.conj()), (2,) * psi.num_qubits,
                         validate=False)


def reduced_state(psi: PureState, keep: Iterable[int]) -> DensityMatrix:
    """Reduced density matrix of a pure state without forming the full projector."""
    keep = sorted(set(keep))
    n = psi.num_qubits
    if not keep:
        raise ValueError("keep set must be nonempty")
    if keep[0] < 0 or keep[-1] >= n:
        raise IndexError(f"party index out of range for {n} parties")
    traced = [i for i in range(n) if i not in keep]
    t = psi.amplitudes.reshape((2,) * n).transpose(keep + traced)
    t = t.reshape(2 ** len(keep), -1)
    return DensityMatrix(t @ t.conj().T, (2,) * len(keep), validate=False)


def random_pure_state(num_qubits: int, rng: RngSeed) -> PureState:
    """Haar-random pure state from normalized complex Gaussian amplitudes."""
    if num_qubits < 1:
        raise ValueError("num_qubits must be at least 1")
    gen = rng.generator() if isinstance(rng, RngSeed) else rng
    return PureState(_haar_vector(gen, 2 ** num_qubits), num_qubits)


def _haar_vector(gen: np.random.Generator, dim: int) -> np.ndarray:
    z = gen.standard_normal(dim) + 1j * gen.standard_normal(dim)
    return z / np.linalg.norm(z)


def random_unitary(dim: int, gen: np.random.Generator) -> np.ndarray:
    """Haar unitary via QR of a Ginibre matrix with the phase fix on R."""
    z = (gen.standard_normal((dim, dim))
         + 1j * gen.standard_normal((dim, dim))) / np.sqrt(2)
    q, r = np.linalg.qr(z)
    d = np.diagonal(r)
    return q * (d / np.abs(d))


def random_density_matrix(num_qubits: int, rank: int,
                          gen: np.random.Generator) -> DensityMatrix:
    """Induced-measure mixed state ``G G^dag / tr`` with ``G`` of width ``rank``."""
    dim = 2 ** num_qubits
    if not 1 <= rank <= dim:
        raise ValueError("rank must lie in [1, 2**num_qubits]")
    g = gen.standard_normal((dim, rank)) + 1j * gen.standard_normal((dim, rank))
    rho = g @ g.conj().T
    rho = (rho + rho.conj().T) / 2
    return DensityMatrix(rho / np.trace(rho).real, (2,) * num_qubits)


def hermitian_eigensystem(m: DensityMatrix) -> tuple[np.ndarray, np.ndarray]:
    """Eigenvalues in descending order and matching eigenvector columns."""
    a = m.matrix if isinstance(m, DensityMatrix) else np.asarray(m, dtype=complex)
    if np.max(np.abs(a - a.conj().T)) > HERMITIAN_TOL:
        raise ValueError("matrix is not Hermitian within tolerance")
    w, v = np.linalg.eigh(a)
    return w[::-1].copy(), v[:, ::-1].copy()


# -- state files -----------------------------------------------------------

def state_to_json(psi: PureState) -> dict:
    return {"num_qubits": psi.num_qubits,
            "re": psi.amplitudes.real.tolist(),
            "im": psi.amplitudes.imag.tolist()}


def state_from_json(obj: dict) -> PureState:
    """Parse a state object, renormalizing small norm drift (<= 1e-8)."""
    n = int(obj["num_qubits"])
    re, im = obj["re"], obj["im"]
    if len(re) != 2 ** n or len(im) != 2 ** n:
        raise ValueError(f"state file needs {2 ** n} 're' and 'im' entries")
    amps = np.asarray(re, dtype=float) + 1j * np.asarray(im, dtype=float)
    norm = np.linalg.norm(amps)
    if abs(norm - 1.0) > FILE_RENORM_TOL:
        raise ValueError(f"state norm {norm!r} deviates from 1 by more than 1e-8")
    return PureState(amps / norm, n)


def read_state(path: str | Path) -> PureState:
    with open(path) as fh:
        return state_from_json(json.load(fh))


def write_state(psi: PureState, path: str | Path) -> None:
    with open(path, "w") as fh:
        json.dump(state_to_json(psi), fh)


def basis_state(bits: Sequence[int]) -> PureState:
    """Computational basis state ``|b_0 ... b_{n-1}>``."""
    n = len(bits)
    amps = np.zeros(2 ** n, dtype=complex)
    amps[int("".join(str(int(b)) for b in bits), 2)] = 1.0
    return PureState(amps, n)
