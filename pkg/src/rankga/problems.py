"""Benchmark problems: De Jong's f1, the multimodal f7 and Euclidean TSP.

Genomes are handled in batches: a population is an ``(N, L)`` array, bits as
``uint8`` for the binary problems and keys in ``[0, 1)`` for the TSP.
"""

from __future__ import annotations

import enum
import hashlib
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from rankga.tsplib import TspInstance, instance_checksum, load_tsplib, wi29, wi29_optimal_tour


class GenomeKind(str, enum.Enum):
    BINARY = "binary"
    RANDOM_KEY = "random_key"


def decode_binary(bits, bits_per_var: int, lo: float, hi: float) -> np.ndarray:
    """Map groups of `bits_per_var` bits (most significant first) linearly onto ``[lo, hi]``.

    Accepts one genome or a batch of genomes; the last axis holds the bits.
    All-zero groups decode to `lo` and all-one groups to `hi` exactly.
    """
    bits = np.asarray(bits)
    length = bits.shape[-1]
    if bits_per_var <= 0 or length % bits_per_var:
        raise ValueError(f"genome length {length} is not a multiple of {bits_per_var}")
    groups = bits.reshape(bits.shape[:-1] + (length // bits_per_var, bits_per_var))
    weights = 1 << np.arange(bits_per_var - 1, -1, -1, dtype=np.int64)
    ints = groups.astype(np.int64) @ weights
    top = (1 << bits_per_var) - 1
    # the last term pins the upper endpoint even when the step does not divide evenly
    return np.where(ints == top, hi, lo + ints * ((hi - lo) / top))


def f1_cost(x) -> np.ndarray | float:
    """Sphere function, sum of squares over the last axis."""
    x = np.asarray(x, dtype=float)
    out = np.sum(x * x, axis=-1)
    return float(out) if out.ndim == 0 else out


def f7_cost(x) -> np.ndarray | float:
    """``s**0.25 * (sin(50 * s**0.1)**2 + 1)`` with ``s = x1**2 + x2**2``; zero at the origin."""
    x = np.asarray(x, dtype=float)
    s = np.sum(x * x, axis=-1)
    out = s**0.25 * (np.sin(50.0 * s**0.1) ** 2 + 1.0)
    return float(out) if out.ndim == 0 else out


def decode_random_key(keys) -> np.ndarray:
    """Visit cities in ascending key order; equal keys keep city-index order.

    >>> decode_random_key([0.3, 0.1, 0.9]).tolist()
    [1, 0, 2]
    """
    return np.argsort(np.asarray(keys, dtype=float), axis=-1, kind="stable")


def tour_cost(tour, instance: TspInstance, rounded: bool = False) -> np.ndarray | float:
    """Length of the closed tour (or batch of tours), return edge included."""
    tour = np.asarray(tour)
    n = instance.dimension
    flat = tour.reshape(-1, tour.shape[-1])
    if flat.shape[-1] != n or np.any(np.sort(flat, axis=-1) != np.arange(n)):
        raise ValueError(f"tour is not a permutation of 0..{n - 1}")
    d = instance.distance_matrix(rounded)
    out = d[tour, np.roll(tour, -1, axis=-1)].sum(axis=-1)
    return float(out) if out.ndim == 0 else out


class Problem:
    """A cost-minimisation problem over fixed-length genomes.

    Subclasses provide `evaluate`, which maps an ``(N, L)`` genome batch to
    ``N`` non-negative costs. An optimum counts as reached when the cost is
    within `tolerance` of `target_cost` (relative tolerance if `relative`).
    """

    name: str
    kind: GenomeKind
    length: int
    target_cost: float
    tolerance: float
    relative: bool = False

    def evaluate(self, genomes: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def cost(self, genome) -> float:
        return float(self.evaluate(np.asarray(genome)[None, :])[0])

    def hits_optimum(self, cost: float) -> bool:
        if self.relative:
            return cost <= self.target_cost * (1.0 + self.tolerance)
        return abs(cost - self.target_cost) <= self.tolerance

    def random_genomes(self, n: int, rng: np.random.Generator) -> np.ndarray:
        if self.kind is GenomeKind.BINARY:
            return rng.integers(0, 2, size=(n, self.length), dtype=np.uint8)
        return rng.random((n, self.length))

    def checksum(self) -> str:
        return hashlib.blake2b(repr(self.describe()).encode(), digest_size=8).hexdigest()

    def describe(self) -> dict:
        return {"name": self.name, "kind": self.kind.value, "length": self.length}


@dataclass(frozen=True)
class BinaryFunctionProblem(Problem):
    """A real function of ``n_vars`` variables, each encoded by ``bits_per_var`` bits."""

    name: str
    function: str
    n_vars: int
    bits_per_var: int
    lo: float
    hi: float
    target_cost: float = 0.0
    tolerance: float = 1e-4

    kind = GenomeKind.BINARY
    relative = False

    @property
    def length(self) -> int:
        return self.n_vars * self.bits_per_var

    def decode(self, genomes) -> np.ndarray:
        return decode_binary(genomes, self.bits_per_var, self.lo, self.hi)

    def evaluate(self, genomes: np.ndarray) -> np.ndarray:
        x = self.decode(genomes)
        return _FUNCTIONS[self.function](x)

    def describe(self) -> dict:
        return {
            "name": self.name,
            "kind": self.kind.value,
            "length": self.length,
            "bits_per_var": self.bits_per_var,
            "domain": [self.lo, self.hi],
            "target_cost": self.target_cost,
            "tolerance": self.tolerance,
        }


_FUNCTIONS = {"f1": f1_cost, "f7": f7_cost}


@dataclass(frozen=True, eq=False)
class TspProblem(Problem):
    """Random-key encoded TSP; the genome is one key per city."""

    instance: TspInstance
    target_cost: float = 0.0
    tolerance: float = 1e-6
    rounded: bool = False

    kind = GenomeKind.RANDOM_KEY
    relative = True

    @property
    def name(self) -> str:
        return f"tsp:{self.instance.name or 'instance'}"

    @property
    def length(self) -> int:
        return self.instance.dimension

    def decode(self, genomes) -> np.ndarray:
        return decode_random_key(genomes)

    def evaluate(self, genomes: np.ndarray) -> np.ndarray:
        tours = decode_random_key(genomes)
        d = self.instance.distance_matrix(self.rounded)
        return d[tours, np.roll(tours, -1, axis=-1)].sum(axis=-1)

    def checksum(self) -> str:
        return instance_checksum(self.instance)

    def describe(self) -> dict:
        return {
            "name": self.name,
            "kind": self.kind.value,
            "length": self.length,
            "target_cost": self.target_cost,
            "tolerance": self.tolerance,
            "rounded": self.rounded,
            "instance_checksum": self.checksum(),
        }


def f1_problem(tolerance: float = 1e-4) -> BinaryFunctionProblem:
    """Sphere function on three variables in [-5.12, 5.12], 10 bits each."""
    return BinaryFunctionProblem("f1", "f1", n_vars=3, bits_per_var=10, lo=-5.12, hi=5.12, tolerance=tolerance)


def f7_problem(tolerance: float = 1e-4) -> BinaryFunctionProblem:
    """Multimodal f7 on two variables in [0, 40.95], 12 bits each."""
    return BinaryFunctionProblem("f7", "f7", n_vars=2, bits_per_var=12, lo=0.0, hi=40.95, tolerance=tolerance)


def tsp_problem(
    instance: TspInstance,
    target_cost: float | None = None,
    tolerance: float = 1e-6,
    rounded: bool = False,
) -> TspProblem:
    """TSP problem over `instance`.

    Without an explicit `target_cost` the bundled wi29 optimum is used for
    the wi29 instance; other instances get a target of 0, which no tour can
    reach.
    """
    if target_cost is None:
        target_cost = 0.0
        if instance == wi29():
            target_cost = tour_cost(wi29_optimal_tour(), instance, rounded)
    return TspProblem(instance, target_cost=target_cost, tolerance=tolerance, rounded=rounded)


def problem_from_name(
    selector: str,
    *,
    target_cost: float | None = None,
    tolerance: float | None = None,
    rounded: bool = False,
) -> Problem:
    """Resolve ``f1``, ``f7``, ``tsp:<path>`` or ``tsp:wi29`` (bundled copy)."""
    key = selector.strip()
    if key.lower() in ("f1", "f7"):
        factory = f1_problem if key.lower() == "f1" else f7_problem
        problem = factory() if tolerance is None else factory(tolerance)
        if target_cost is not None:
            problem = BinaryFunctionProblem(**{**problem.__dict__, "target_cost": target_cost})
        return problem
    if key.lower().startswith("tsp:"):
        source = key[4:]
        if not source:
            raise ValueError("tsp problem needs a path: tsp:<path>")
        if source.lower() == "wi29" and not Path(source).exists():
            instance = wi29()
        else:
            instance = load_tsplib(source)
        kwargs = {} if tolerance is None else {"tolerance": tolerance}
        return tsp_problem(instance, target_cost=target_cost, rounded=rounded, **kwargs)
    raise ValueError(f"unknown problem {selector!r}; expected f1, f7 or tsp:<path>")
