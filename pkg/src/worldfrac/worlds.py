"""Fractions of worlds and their statistics under repeated measurement.

Over a field whose rays have real dimension ``d``, the fraction of worlds
with outcome ``i`` is ``|psi_i|^d / sum_j |psi_j|^d``.  Over C this is the
Born weight ``|psi_i|^2 / |Psi|^2``; over R and H the denominator depends on
how the other outcomes are decomposed.

Repeating a two-outcome measurement N times splits worlds binomially; the
distributions here are exact (saddle-point evaluation in floating point, or
rationals for small N), never sampled.
"""
from __future__ import annotations

import math
from collections.abc import Mapping
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Hashable, Iterator, Sequence, Union

import numpy as np
from scipy.stats import binom

from .fields import ScalarField
from .hilbert import OrthogonalPartition, StateVector, ZeroVectorError, norm_sq, project

SUM_TOL = 1e-12
MAX_N = 1_000_000
MAX_TREE_NODES = 1_000_000
EXACT_N_LIMIT = 64


class FractionTable(Mapping):
    """Outcome label -> fraction of worlds; entries in [0, 1] summing to 1."""

    def __init__(self, entries: Mapping[str, float], tol: float = SUM_TOL):
        entries = {str(k): float(v) for k, v in dict(entries).items()}
        if not entries:
            raise ValueError("fraction table needs at least one outcome")
        for k, v in entries.items():
            if not (-tol <= v <= 1.0 + tol) or math.isnan(v):
                raise ValueError(f"fraction for {k!r} is {v}, outside [0, 1]")
        total = math.fsum(entries.values())
        if abs(total - 1.0) > tol:
            raise ValueError(f"fractions sum to {total!r}, not 1")
        self._entries = entries

    def __getitem__(self, key: str) -> float:
        return self._entries[key]

    def __iter__(self) -> Iterator[str]:
        return iter(self._entries)

    def __len__(self) -> int:
        return len(self._entries)

    def __repr__(self) -> str:
        return f"FractionTable({self._entries!r})"

    def to_json(self) -> dict:
        return dict(self._entries)


def _branch_weights(v: StateVector, partition: OrthogonalPartition) -> dict[str, float]:
    if v.is_zero():
        raise ZeroVectorError("world fractions need a nonzero state")
    partition.check(v.basis)
    half_d = v.field.ray_dim / 2
    return {o: norm_sq(project(v, partition, o)) ** half_d for o in partition.outcomes}


def world_fractions(v: StateVector, partition: OrthogonalPartition | None = None) -> FractionTable:
    """Fraction of worlds per outcome; defaults to one outcome per basis label."""
    partition = partition or OrthogonalPartition.by_label(v.basis)
    weights = _branch_weights(v, partition)
    total = math.fsum(weights.values())
    return FractionTable({o: w / total for o, w in weights.items()})


@dataclass(frozen=True)
class GleasonReport:
    field: ScalarField
    coarse: FractionTable
    fine: FractionTable
    outcome: str = "1"

    @property
    def shift(self) -> float:
        return abs(self.fine[self.outcome] - self.coarse[self.outcome])

    @property
    def depends_on_decomposition(self) -> bool:
        return self.shift > 1e-6

    def to_json(self) -> dict:
        return {"field": self.field.value, "outcome": self.outcome,
                "coarse": self.coarse.to_json(), "fine": self.fine.to_json(),
                "shift": self.shift,
                "depends_on_decomposition": self.depends_on_decomposition}


def gleason_dependence_demo(field: ScalarField | str) -> GleasonReport:
    """Fraction of outcome 1 before and after splitting outcome 2 in two.

    Uses ``psi = psi1 + psi2`` with ``psi1 = e0`` and ``psi2 = (e1 + e2)/sqrt(2)``,
    then refines outcome 2 into ``e1`` and ``e2``.  Only over C does the
    fraction of outcome 1 stay put.
    """
    field = ScalarField.parse(field)
    coeffs = np.zeros((3, field.ray_dim))
    coeffs[:, 0] = [1.0, 1 / math.sqrt(2), 1 / math.sqrt(2)]
    psi = StateVector(field, ("e0", "e1", "e2"), coeffs)
    coarse = OrthogonalPartition({"1": {"e0"}, "2": {"e1", "e2"}})
    fine = coarse.refine("2", {"3": {"e1"}, "4": {"e2"}})
    return GleasonReport(field, world_fractions(psi, coarse), world_fractions(psi, fine))


# -- repeated measurements ---------------------------------------------------

@dataclass(frozen=True, eq=False)
class FrequencyDistribution:
    """World fraction for each up-count ``n`` after ``N`` binary branchings."""

    N: int
    p: float
    masses: np.ndarray  # index n -> fraction, length N + 1
    label: str = ""

    @property
    def mass(self) -> dict[int, float]:
        return {n: float(m) for n, m in enumerate(self.masses)}

    @property
    def frequencies(self) -> np.ndarray:
        return np.arange(self.N + 1) / self.N

    @property
    def mean(self) -> float:
        return float(np.dot(self.frequencies, self.masses))

    @property
    def variance(self) -> float:
        dev = self.frequencies - self.mean
        return float(np.dot(dev * dev, self.masses))

    @property
    def sigma(self) -> float:
        """Standard deviation of the frequency, ``sqrt(p(1-p)/N)``."""
        return math.sqrt(self.p * (1.0 - self.p) / self.N)

    def total(self) -> float:
        return math.fsum(self.masses)

    def rows(self) -> list[tuple[int, float, float]]:
        return [(n, n / self.N, float(m)) for n, m in enumerate(self.masses)]

    def to_json(self) -> dict:
        return {"N": self.N, "p": self.p, "label": self.label,
                "mean": self.mean, "variance": self.variance,
                "rows": [{"n": n, "frequency": f, "fraction": m} for n, f, m in self.rows()]}

    @classmethod
    def from_json(cls, obj: Mapping) -> FrequencyDistribution:
        rows = sorted(obj["rows"], key=lambda r: r["n"])
        N = int(obj["N"])
        if [r["n"] for r in rows] != list(range(N + 1)):
            raise ValueError("rows must cover every count 0..N exactly once")
        return cls(N, float(obj["p"]), np.array([r["fraction"] for r in rows], dtype=float),
                   obj.get("label", ""))


def _check_N(N: int) -> None:
    if not (isinstance(N, (int, np.integer)) and 1 <= N <= MAX_N):
        raise ValueError(f"N must be an integer in [1, {MAX_N}], got {N!r}")


def repeat_distribution(f: float, N: int, label: str = "") -> FrequencyDistribution:
    """Fractions of worlds with ``n`` ups after ``N`` runs of a branching with up-fraction ``f``."""
    _check_N(N)
    f = float(f)
    if not 0.0 <= f <= 1.0:
        raise ValueError(f"fraction must lie in [0, 1], got {f}")
    masses = np.zeros(N + 1)
    if f == 0.0:
        masses[0] = 1.0
    elif f == 1.0:
        masses[N] = 1.0
    else:
        # Loader's saddle-point form: log-space internally, ~1e-14 relative accuracy
        masses = binom.pmf(np.arange(N + 1), N, f)
    return FrequencyDistribution(N, f, masses, label)


def binomial_masses_exact(f: Fraction | int, N: int) -> list[Fraction]:
    """Rational binomial masses for small ``N`` (oracle use)."""
    if not 1 <= N < EXACT_N_LIMIT:
        raise ValueError(f"exact masses are offered for 1 <= N < {EXACT_N_LIMIT}")
    f = Fraction(f)
    return [math.comb(N, n) * f ** n * (1 - f) ** (N - n) for n in range(N + 1)]


def _inside(dist: FrequencyDistribution, center: float, half_width: float) -> np.ndarray:
    # compared in count units with a relative slack so that exact ties count as inside
    n = np.arange(dist.N + 1)
    dev = np.abs(n - dist.N * center)
    limit = dist.N * half_width
    return dev <= limit * (1 + 1e-12) + 1e-9


def window_fraction(dist: FrequencyDistribution, center: float, half_width: float) -> float:
    """Fraction of worlds whose frequency lies within ``center +- half_width``."""
    if half_width < 0:
        raise ValueError("half_width must be non-negative")
    return math.fsum(dist.masses[_inside(dist, center, half_width)])


def tail_fraction(dist: FrequencyDistribution, k_sigma: float) -> float:
    """Fraction of "maverick" worlds, frequency more than ``k_sigma`` sigma from ``p``."""
    if not k_sigma > 0:
        raise ValueError("k_sigma must be positive")
    if dist.p in (0.0, 1.0):
        return 0.0
    if math.isinf(k_sigma):
        return 0.0
    return math.fsum(dist.masses[~_inside(dist, dist.p, k_sigma * dist.sigma)])


def nbc_distribution(outcome_count: int, N: int) -> FrequencyDistribution:
    """Naive branch counting: every run makes one world per outcome."""
    if outcome_count != 2:
        raise ValueError(f"naive branch counting is modelled for 2 outcomes, got {outcome_count}")
    return repeat_distribution(0.5, N, label="NBC")


# -- branch trees ------------------------------------------------------------

Step = Union[Mapping[str, float], Callable[[tuple], Mapping[str, float]]]
CoarseGrain = Union[Mapping[tuple, Hashable], Callable[[tuple], Hashable]]


@dataclass
class BranchTree:
    """Every outcome sequence up to ``depth`` with its fraction of worlds.

    ``nodes`` maps each prefix (including the empty root) to its fraction.
    ``coarse`` holds merged leaf fractions when a coarse-graining was given.
    """

    depth: int
    nodes: dict[tuple, float]
    coarse: dict | None = None

    def level(self, k: int) -> dict[tuple, float]:
        return {s: f for s, f in self.nodes.items() if len(s) == k}

    @property
    def leaves(self) -> dict[tuple, float]:
        return self.level(self.depth)

    def children(self, seq: tuple) -> dict[tuple, float]:
        return {s: f for s, f in self.nodes.items()
                if len(s) == len(seq) + 1 and s[:-1] == seq}

    def merge(self, coarse_grain: CoarseGrain) -> dict:
        key = coarse_grain if callable(coarse_grain) else coarse_grain.__getitem__
        merged: dict = {}
        parts: dict = {}
        for seq, f in self.leaves.items():
            parts.setdefault(key(seq), []).append(f)
        for label, fs in parts.items():
            merged[label] = math.fsum(fs)
        return merged

    def to_json(self) -> dict:
        out = {"depth": self.depth,
               "leaves": [{"sequence": list(s), "fraction": f} for s, f in self.leaves.items()]}
        if self.coarse is not None:
            out["coarse"] = {str(k): v for k, v in self.coarse.items()}
        return out


def count_label(label: str) -> Callable[[tuple], int]:
    """Coarse-graining by how many times ``label`` occurs in a sequence."""
    return lambda seq: sum(1 for s in seq if s == label)


def build_branch_tree(per_step_fractions: Sequence[Step],
                      coarse_grain: CoarseGrain | None = None,
                      max_nodes: int = MAX_TREE_NODES) -> BranchTree:
    """Tree of outcome sequences with products of per-step fractions.

    A step is a fraction table, or a callable taking the prefix so far and
    returning the table for the next branching (for branchings that depend
    on earlier results).
    """
    nodes: dict[tuple, float] = {(): 1.0}
    frontier = [((), 1.0)]
    for step in per_step_fractions:
        nxt = []
        for seq, f in frontier:
            table = step(seq) if callable(step) else step
            if not isinstance(table, FractionTable):
                table = FractionTable(table)
            for label, g in table.items():
                nxt.append((seq + (label,), f * g))
        if len(nxt) > max_nodes:
            raise ValueError(f"tree would have {len(nxt)} leaves, limit is {max_nodes}")
        nodes.update(nxt)
        frontier = nxt
    tree = BranchTree(len(per_step_fractions), nodes)
    if coarse_grain is not None:
        tree.coarse = tree.merge(coarse_grain)
    return tree
