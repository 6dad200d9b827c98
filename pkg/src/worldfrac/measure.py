"""Lebesgue measure on rays and projection factors.

For a nonzero ``v`` and an outcome subspace ``W`` the projection factor is
``|P(U)| / |U|`` for any measurable ``U`` inside the line through ``v``,
where ``P`` projects onto ``W``.  It is computed two ways here:

* analytically, as ``(|Pv| / |v|) ** d`` with ``d`` the ray dimension
  (``|Pv|^2/|v|^2`` over C);
* by Monte Carlo: the image ``P(U)`` is located in an orthonormal frame of
  the image line built from the projected real vectors, its measure is
  hit-counted inside a padded bounding box, and the result is divided by
  the closed-form ``|U|``.

The second route never evaluates the norm formula, so agreement between the
two is a real check.
"""
from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field as dc_field
from typing import Mapping

import numpy as np

from .fields import FieldMismatchError, ScalarField, mul_components
from .hilbert import (OrthogonalPartition, StateVector, ZeroVectorError, norm,
                      norm_sq, project)
from .regions import (Annulus, Ball, Box, DegenerateRegionError, Region,
                      default_box, region_image_bounds)

RegionSpec = Region
DEFAULT_REGION = Annulus(1.0, 2.0)
MIN_SAMPLES = 1000
ANALYTIC_TOL = 1e-12
MC_SIGMAS = 4.0
BOX_PAD = 1.25


@dataclass(frozen=True)
class FactorEstimate:
    value: float
    std_error: float
    n_samples: int
    hits: int = 0

    def z_score(self, reference: float) -> float:
        diff = abs(self.value - reference)
        if self.std_error == 0.0:
            return 0.0 if diff <= ANALYTIC_TOL else math.inf
        return diff / self.std_error

    def consistent_with(self, reference: float, k: float = MC_SIGMAS) -> bool:
        return abs(self.value - reference) <= k * self.std_error + ANALYTIC_TOL

    def to_json(self) -> dict:
        return {"value": self.value, "std_error": self.std_error,
                "n": self.n_samples, "hits": self.hits}


def agree(a: FactorEstimate, b: FactorEstimate, k: float = MC_SIGMAS) -> bool:
    """Two independent estimates agree within ``k`` combined standard errors."""
    combined = math.hypot(a.std_error, b.std_error)
    return abs(a.value - b.value) <= k * combined + ANALYTIC_TOL


def _require_nonzero(v: StateVector) -> None:
    if v.is_zero():
        raise ZeroVectorError("projection factors need a nonzero vector")


def projection_factor_analytic(v: StateVector, partition: OrthogonalPartition,
                               outcome: str) -> float:
    _require_nonzero(v)
    ratio_sq = norm_sq(project(v, partition, outcome)) / norm_sq(v)
    d = v.field.ray_dim
    if d == 2:
        return ratio_sq
    return ratio_sq ** (d / 2)


def linear_map_measure_scale(matrix: np.ndarray) -> float:
    """Factor by which a real-linear map scales d-dimensional Lebesgue measure.

    ``sqrt(det(M^T M))``; for square ``M`` this is ``|det M|``.  Tall
    matrices (an embedding of R^d into a larger space) are accepted.
    """
    m = np.atleast_2d(np.asarray(matrix, dtype=float))
    if m.shape[0] < m.shape[1]:
        raise ValueError(f"map from R^{m.shape[1]} to R^{m.shape[0]} cannot preserve dimension")
    if m.shape[0] == m.shape[1]:
        return float(abs(np.linalg.det(m)))
    return float(math.sqrt(max(np.linalg.det(m.T @ m), 0.0)))


def line_embedding(v: StateVector) -> np.ndarray:
    """Real ``(n*d) x d`` matrix of ``c -> v * c`` (components of c to R^(n*d))."""
    d = v.field.ray_dim
    units = np.eye(d)
    cols = [mul_components(v.field, v.coeffs, units[k]).ravel() for k in range(d)]
    return np.stack(cols, axis=1)


def projection_factor_gram(v: StateVector, partition: OrthogonalPartition,
                           outcome: str) -> float:
    """Projection factor as a ratio of Gram-determinant measure scales."""
    _require_nonzero(v)
    pv = project(v, partition, outcome)
    return (linear_map_measure_scale(line_embedding(pv))
            / linear_map_measure_scale(line_embedding(v)))


def measure_of_region(field: ScalarField, region: Region, line_rep: StateVector) -> float:
    """Lebesgue measure of ``{line_rep * c : c in region}`` inside the line."""
    field = ScalarField.parse(field)
    if line_rep.field is not field:
        raise FieldMismatchError(f"{line_rep.field.value} vector, {field.value} field")
    _require_nonzero(line_rep)
    d = field.ray_dim
    return region.measure(d) * norm(line_rep) ** d


def _random_rotation(d: int, rng: np.random.Generator) -> np.ndarray:
    q, r = np.linalg.qr(rng.standard_normal((d, d)))
    return q * np.sign(np.diag(r))


def _image_frame_map(pv: StateVector, rng: np.random.Generator) -> np.ndarray:
    """``d x d`` matrix sending scalar components c to coordinates of ``pv * c``
    in a randomly oriented orthonormal frame of the image line."""
    emb = line_embedding(pv)
    q, _ = np.linalg.qr(emb)
    q = q @ _random_rotation(q.shape[1], rng)
    return q.T @ emb


def _count_hits(region: Region, a_inv: np.ndarray, lo: np.ndarray, hi: np.ndarray,
                n: int, rng: np.random.Generator, batch: int = 1 << 18) -> int:
    d = len(lo)
    hits = 0
    done = 0
    while done < n:
        m = min(batch, n - done)
        w = lo + (hi - lo) * rng.random((m, d))
        hits += int(np.count_nonzero(region.contains(w @ a_inv.T)))
        done += m
    return hits


def _split(n: int, workers: int) -> list[int]:
    base, extra = divmod(n, workers)
    return [base + (1 if i < extra else 0) for i in range(workers)]


def projection_factor_mc(v: StateVector, partition: OrthogonalPartition, outcome: str,
                         region: Region = DEFAULT_REGION, n: int = 100_000,
                         seed: int = 0, stream: int = 0, workers: int = 1) -> FactorEstimate:
    """Hit-or-miss estimate of ``|P(U)| / |U|``.

    ``U`` is ``{v * c : c in region}``.  Points are drawn uniformly from a
    padded exact bounding box of ``P(U)`` in the image line's own coordinates
    and kept when their preimage scalar lies in ``region``.  Samples are split
    across ``workers`` independent streams keyed by ``(seed, stream, worker)``
    and hit counts are summed, so results depend on ``workers`` but not on
    scheduling.
    """
    _require_nonzero(v)
    if n < MIN_SAMPLES:
        raise ValueError(f"need at least {MIN_SAMPLES} samples, got {n}")
    if workers < 1:
        raise ValueError("workers must be >= 1")
    d = v.field.ray_dim
    region.validate(d)
    u_measure = measure_of_region(v.field, region, v)
    pv = project(v, partition, outcome)
    if pv.is_zero():
        return FactorEstimate(0.0, 0.0, 0, 0)

    frame_rng = np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(stream,)))
    a = _image_frame_map(pv, frame_rng)
    a_inv = np.linalg.inv(a)
    lo, hi = region_image_bounds(region, a)
    # padded so that no shape fills its sampling box
    mid, half = (lo + hi) / 2, (hi - lo) / 2 * BOX_PAD
    lo, hi = mid - half, mid + half
    box_measure = float(np.prod(hi - lo))

    seqs = [np.random.SeedSequence(seed, spawn_key=(stream, w)) for w in range(workers)]
    sizes = _split(n, workers)

    def run(i: int) -> int:
        return _count_hits(region, a_inv, lo, hi, sizes[i], np.random.default_rng(seqs[i]))

    if workers == 1:
        hits = run(0)
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            hits = sum(pool.map(run, range(workers)))

    frac = hits / n
    scale = box_measure / u_measure
    return FactorEstimate(value=scale * frac,
                          std_error=scale * math.sqrt(frac * (1.0 - frac) / n),
                          n_samples=n, hits=hits)


def region_shapes(d: int) -> dict[str, Region]:
    """The three region shapes used for independence-of-U cross-checks."""
    return {"ball": Ball(1.0), "annulus": Annulus(1.0, 2.0), "box": default_box(d)}


def independence_check(v: StateVector, partition: OrthogonalPartition, outcome: str,
                       n: int = 100_000, seed: int = 0,
                       regions: Mapping[str, Region] | None = None) -> dict:
    """Estimate one factor over several region shapes and compare them pairwise."""
    regions = regions or region_shapes(v.field.ray_dim)
    estimates = {name: projection_factor_mc(v, partition, outcome, r, n, seed, stream=k)
                 for k, (name, r) in enumerate(regions.items())}
    names = list(estimates)
    pairs = {f"{a}~{b}": agree(estimates[a], estimates[b])
             for i, a in enumerate(names) for b in names[i + 1:]}
    return {"estimates": estimates, "pairs": pairs, "consistent": all(pairs.values())}


@dataclass
class PythagoreanReport:
    outcomes: list[str]
    analytic: dict[str, float]
    mc: dict[str, FactorEstimate]
    region_measure: float
    image_measures: dict[str, float] = dc_field(default_factory=dict)

    @property
    def analytic_sum(self) -> float:
        return math.fsum(self.analytic.values())

    @property
    def deviation(self) -> float:
        return self.analytic_sum - 1.0

    @property
    def mc_sum(self) -> float:
        return math.fsum(e.value for e in self.mc.values())

    @property
    def mc_std_error(self) -> float:
        return math.sqrt(sum(e.std_error ** 2 for e in self.mc.values()))

    @property
    def mc_consistent(self) -> bool:
        return abs(self.mc_sum - 1.0) <= MC_SIGMAS * self.mc_std_error + ANALYTIC_TOL

    @property
    def holds(self) -> bool:
        return abs(self.deviation) <= ANALYTIC_TOL

    def to_json(self) -> dict:
        return {
            "outcomes": {o: {"analytic": self.analytic[o],
                             "mc_value": self.mc[o].value,
                             "mc_std_error": self.mc[o].std_error,
                             "n": self.mc[o].n_samples} for o in self.outcomes},
            "analytic_sum": self.analytic_sum,
            "deviation": self.deviation,
            "mc_sum": self.mc_sum,
            "mc_std_error": self.mc_std_error,
            "region_measure": self.region_measure,
            "image_measure_sum": math.fsum(self.image_measures.values()),
            "mc_consistent": self.mc_consistent,
        }

    def csv_rows(self) -> list[list]:
        rows: list[list] = [["outcome", "analytic", "mc_value", "mc_std_error", "n"]]
        for o in self.outcomes:
            e = self.mc[o]
            rows.append([o, self.analytic[o], e.value, e.std_error, e.n_samples])
        return rows


def pythagorean_check(v: StateVector, partition: OrthogonalPartition,
                      region: Region = DEFAULT_REGION, n: int = 100_000,
                      seed: int = 0, workers: int = 1) -> PythagoreanReport:
    """Check that the projection factors of a complex line sum to one.

    Each outcome gets an independent Monte Carlo stream, so the per-outcome
    standard errors combine in quadrature.
    """
    if v.field is not ScalarField.COMPLEX:
        raise FieldMismatchError(
            f"the Pythagorean identity holds for complex lines, got a {v.field.value} state")
    _require_nonzero(v)
    partition.check(v.basis)
    outcomes = partition.outcomes
    analytic = {o: projection_factor_analytic(v, partition, o) for o in outcomes}
    mc = {o: projection_factor_mc(v, partition, o, region, n, seed, stream=k, workers=workers)
          for k, o in enumerate(outcomes)}
    u = measure_of_region(v.field, region, v)
    return PythagoreanReport(outcomes, analytic, mc, u,
                             {o: e.value * u for o, e in mc.items()})


__all__ = [
    "RegionSpec", "Ball", "Annulus", "Box", "DegenerateRegionError", "DEFAULT_REGION",
    "FactorEstimate", "agree", "projection_factor_analytic", "projection_factor_gram",
    "linear_map_measure_scale", "line_embedding", "measure_of_region",
    "projection_factor_mc", "region_shapes", "independence_check",
    "PythagoreanReport", "pythagorean_check",
]
