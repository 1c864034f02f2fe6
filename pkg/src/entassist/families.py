"""Closed-form state families: the five-term three-qubit family and W-class states.

Five-term family (qubit order A, B, C; A most significant)::

    l0|000> + l1 e^{i phi}|100> + l2|101> + l3|110> + l4|111>

Here ``l2`` sits on ``|101>`` and therefore links A with C, while ``l3``
links A with B. The pair values below follow that reading, so
``C_a(rho_AB) = 2 l0 sqrt(l3^2 + l4^2)`` and
``C_a(rho_AC) = 2 l0 sqrt(l2^2 + l4^2)``.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

import numpy as np

from .assistance import OptimizerConfig
from .measures import MeasureSpec
from .polygamy import (KSolution, k_solution, nested_level_values,
                       tripartite_values)
from .qcore import NORM_TOL, PureState, random_pure_state

GSD_CONSTRAINTS = ("lambda0_nonzero", "lambda2_nonzero", "lambda2_lt_lambda3")
# "nonzero" for sampled lambdas means above this floor
NONZERO_FLOOR = 1e-12


@dataclass(frozen=True)
class GSDParams:
    lambdas: tuple[float, float, float, float, float]
    phi: float = 0.0

    def __post_init__(self):
        lam = tuple(float(x) for x in self.lambdas)
        if len(lam) != 5:
            raise ValueError("five lambda coefficients required")
        if min(lam) < 0:
            raise ValueError("lambda coefficients must be nonnegative")
        if abs(sum(x * x for x in lam) - 1) > NORM_TOL:
            raise ValueError("sum of squared lambdas must be 1")
        object.__setattr__(self, "lambdas", lam)
        object.__setattr__(self, "phi", float(self.phi))

    def describe(self) -> dict:
        return {"family": "gsd", "lambda": list(self.lambdas), "phi": self.phi}


def gsd_state(p: GSDParams) -> PureState:
    l0, l1, l2, l3, l4 = p.lambdas
    amps = np.zeros(8, dtype=complex)
    amps[0b000] = l0
    amps[0b100] = l1 * np.exp(1j * p.phi)
    amps[0b101] = l2
    amps[0b110] = l3
    amps[0b111] = l4
    return PureState(amps, 3)


def gsd_ca_values(p: GSDParams) -> tuple[float, float, float]:
    """``(C_a(A|BC), C_a(rho_AB), C_a(rho_AC))`` in closed form; independent of phi."""
    l0, _, l2, l3, l4 = p.lambdas
    joint = 2 * l0 * math.sqrt(l2 ** 2 + l3 ** 2 + l4 ** 2)
    ab = 2 * l0 * math.sqrt(l3 ** 2 + l4 ** 2)
    ac = 2 * l0 * math.sqrt(l2 ** 2 + l4 ** 2)
    return joint, ab, ac


def gsd_k(p: GSDParams, mu: float) -> KSolution:
    """k for the family under the ``l2 < l3`` convention.

    Use :func:`~entassist.polygamy.k_solution` on :func:`gsd_ca_values`
    directly for parameters outside the convention.
    """
    l2, l3 = p.lambdas[2], p.lambdas[3]
    if not l2 < l3:
        raise ValueError(
            f"gsd_k assumes lambda2 < lambda3 (got {l2!r} >= {l3!r})")
    joint, ab, ac = gsd_ca_values(p)
    return k_solution(joint, [ab, ac], mu)


def gsd_k_case_formula(p: GSDParams) -> float:
    """Piecewise shortcut ``0`` / ``0`` / ``sqrt(1 + l4^2 / l2^2)``.

    Kept for comparison only: it does not solve the defining k equation in
    general (for ``l = (sqrt(.4), 0, sqrt(.1), sqrt(.2), sqrt(.3))`` it
    gives 2 while the equation gives about 9.37).
    """
    l0, _, l2, _, l4 = p.lambdas
    if l0 == 0 or l2 == 0:
        return 0.0
    return math.sqrt(1 + l4 ** 2 / l2 ** 2)


def gsd_k_exact(p: GSDParams) -> float:
    """Solved k at mu = 1 for ``l0, l2 > 0`` and ``l2 < l3``, rationalized.

    ``sqrt(l2^2 + l4^2) (sqrt(l2^2+l3^2+l4^2) + sqrt(l3^2+l4^2)) / l2^2``;
    algebraically equal to the solved equation but free of the cancellation
    in its denominator.
    """
    _, _, l2, l3, l4 = p.lambdas
    a, b, c = l2 ** 2, l3 ** 2, l4 ** 2
    return math.sqrt(a + c) * (math.sqrt(a + b + c) + math.sqrt(b + c)) / a


def sample_gsd(gen: np.random.Generator,
               constraints: Sequence[str] = (),
               max_tries: int = 100_000) -> GSDParams:
    """Rejection sampling of uniformly (Dirichlet(1,..,1)) drawn ``lambda**2``."""
    unknown = set(constraints) - set(GSD_CONSTRAINTS)
    if unknown:
        raise ValueError(f"unknown constraint(s): {sorted(unknown)}")
    for _ in range(max_tries):
        sq = gen.dirichlet(np.ones(5))
        phi = gen.uniform(0, 2 * np.pi)
        lam = np.sqrt(sq / sq.sum())
        if "lambda0_nonzero" in constraints and lam[0] <= NONZERO_FLOOR:
            continue
        if "lambda2_nonzero" in constraints and lam[2] <= NONZERO_FLOOR:
            continue
        if "lambda2_lt_lambda3" in constraints and not lam[2] < lam[3]:
            continue
        return GSDParams(_renormalized(lam), phi)
    raise RuntimeError("constraint rejection sampling did not terminate")


def _renormalized(lam):
    lam = np.asarray(lam, dtype=float)
    return tuple(lam / math.sqrt(float(np.sum(lam ** 2))))


# -- W class ---------------------------------------------------------------

@dataclass(frozen=True)
class WClassParams:
    a: np.ndarray

    def __post_init__(self):
        a = np.array(self.a, dtype=complex).reshape(-1)
        if a.size < 3:
            raise ValueError("W-class states need at least three qubits")
        if abs(np.sum(np.abs(a) ** 2) - 1) > NORM_TOL:
            raise ValueError("sum |a_i|^2 must be 1")
        a.setflags(write=False)
        object.__setattr__(self, "a", a)

    @property
    def n(self) -> int:
        return self.a.size

    def describe(self) -> dict:
        return {"family": "w", "re": self.a.real.tolist(),
                "im": self.a.imag.tolist()}


def w_state(p: WClassParams) -> PureState:
    n = p.n
    amps = np.zeros(2 ** n, dtype=complex)
    for i, ai in enumerate(p.a):
        amps[1 << (n - 1 - i)] = ai
    return PureState(amps, n)


def w_ca_values(p: WClassParams) -> tuple[float, list[float]]:
    """``(C(A_1 | rest), [C_a(rho_{A_1 A_i}) for i >= 2])``."""
    mod = np.abs(p.a)
    joint = 2 * mod[0] * math.sqrt(float(np.sum(mod[1:] ** 2)))
    return float(joint), [float(2 * mod[0] * m) for m in mod[1:]]


def w_nested_values(p: WClassParams):
    """Closed-form per-level ``(joint, (pair, group))`` along the ``A_1`` chain."""
    mod = [float(x) for x in np.abs(p.a)]
    tail = lambda i: math.sqrt(sum(x * x for x in mod[i:]))
    return [(2 * mod[0] * tail(i), (2 * mod[0] * mod[i], 2 * mod[0] * tail(i + 1)))
            for i in range(1, p.n - 1)]


def sample_w(gen: np.random.Generator, n: int, complex_amplitudes: bool = True
             ) -> WClassParams:
    """Uniformly random point on the unit sphere of single-excitation amplitudes."""
    z = gen.standard_normal(n)
    if complex_amplitudes:
        z = z + 1j * gen.standard_normal(n)
    return WClassParams(z / np.linalg.norm(z))


# -- geometry ----------------------------------------------------------------

@dataclass(frozen=True)
class GeometryRecord:
    kind: str
    quantities: tuple[tuple[str, float], ...]
    defect: float


def geometry_record(values: Sequence[float]) -> GeometryRecord:
    """Pythagorean/de Gua defect ``joint^2 - sum(pairs^2)``.

    Three values read as hypotenuse and two legs of a right triangle; four
    as the slanted face and three right-angle faces of a tri-rectangular
    tetrahedron.
    """
    values = [float(v) for v in values]
    if len(values) == 3:
        kind, names = "right_triangle", ("hypotenuse", "leg_1", "leg_2")
    elif len(values) == 4:
        kind, names = "tetrahedron", ("S_ABC", "S_OAB", "S_OAC", "S_OBC")
    else:
        raise ValueError("geometry records take 3 or 4 values")
    defect = values[0] ** 2 - sum(v * v for v in values[1:])
    return GeometryRecord(kind, tuple(zip(names, values)), defect)


# -- family descriptors and parameter files ---------------------------------

@dataclass(frozen=True)
class FamilySpec:
    """What to sample: ``gsd`` (with constraints), ``w`` (n qubits), ``haar``
    (n qubits) or ``fixed`` (one given state)."""

    name: str
    num_qubits: int = 3
    constraints: tuple[str, ...] = ()
    state: PureState | None = field(default=None, compare=False)

    def __post_init__(self):
        if self.name not in ("gsd", "w", "haar", "fixed"):
            raise ValueError(f"unknown family {self.name!r}")
        if self.constraints and self.name != "gsd":
            raise ValueError("constraints only apply to the gsd family")
        if self.name == "gsd":
            object.__setattr__(self, "num_qubits", 3)
            bad = set(self.constraints) - set(GSD_CONSTRAINTS)
            if bad:
                raise ValueError(f"unknown constraint(s): {sorted(bad)}")
        if self.name == "fixed":
            if self.state is None:
                raise ValueError("fixed family needs a state")
            object.__setattr__(self, "num_qubits", self.state.num_qubits)
        if self.num_qubits < 3:
            raise ValueError("families need at least three qubits")

    @classmethod
    def parse(cls, text: str) -> "FamilySpec":
        """``"gsd"``, ``"gsd:lambda2_lt_lambda3,lambda0_nonzero"``, ``"w:4"``, ``"haar:3"``."""
        name, _, arg = text.partition(":")
        if name == "gsd":
            return cls("gsd", constraints=tuple(c for c in arg.split(",") if c))
        if name in ("w", "haar"):
            return cls(name, int(arg) if arg else 3)
        raise ValueError(f"cannot parse family {text!r}")


def sample_values(family: FamilySpec, spec: MeasureSpec,
                  gen: np.random.Generator,
                  cfg: OptimizerConfig | None = None):
    """Draw one state and return ``(descriptor, joint, (part_1, part_2))``.

    Parts are the assistance values on ``A_1 A_2`` and on the residual
    group; for three qubits that is ``rho_AB`` and ``rho_AC``. Concurrence on
    the gsd and w families uses closed forms.
    """
    closed = spec.kind == "concurrence"
    if family.name == "gsd":
        p = sample_gsd(gen, family.constraints)
        if closed:
            joint, ab, ac = gsd_ca_values(p)
            return p.describe(), joint, (ab, ac)
        psi, desc = gsd_state(p), p.describe()
    elif family.name == "w":
        p = sample_w(gen, family.num_qubits)
        if closed:
            joint, parts = w_nested_values(p)[0]
            return p.describe(), joint, parts
        psi, desc = w_state(p), p.describe()
    elif family.name == "haar":
        psi = random_pure_state(family.num_qubits, gen)
        desc = {"family": "haar", "num_qubits": psi.num_qubits,
                "re": psi.amplitudes.real.tolist(),
                "im": psi.amplitudes.imag.tolist()}
    else:
        psi = family.state
        desc = {"family": "fixed", "num_qubits": psi.num_qubits}
    if psi.num_qubits == 3:
        joint, parts = tripartite_values(psi, spec, cfg)
    else:
        joint, parts = nested_level_values(psi, spec, cfg)[0]
    return desc, joint, parts


def params_from_json(obj: dict):
    fam = obj.get("family")
    if fam == "gsd":
        return GSDParams(tuple(obj["lambda"]), obj.get("phi", 0.0))
    if fam == "w":
        re = np.asarray(obj["re"], dtype=float)
        im = np.asarray(obj.get("im", [0.0] * len(re)), dtype=float)
        if re.shape != im.shape:
            raise ValueError("'re' and 'im' must have equal length")
        return WClassParams(re + 1j * im)
    raise ValueError(f"unknown family {fam!r}")


def read_params(path: str | Path):
    with open(path) as fh:
        return params_from_json(json.load(fh))


def params_state(p) -> PureState:
    return gsd_state(p) if isinstance(p, GSDParams) else w_state(p)
