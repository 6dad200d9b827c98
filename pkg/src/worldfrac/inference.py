"""Inference from observed outcome sequences, read as fractions of worlds.

A hypothesis assigns a fraction of worlds to every outcome of a repeated
measurement.  After observing a sequence, the credence in a hypothesis is
the fraction of worlds consistent with the observation that lie in that
hypothesis' branches; it is computed from the same fraction tables as a
branch tree, with no separate probability machinery.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Mapping, Sequence

from .worlds import (FractionTable, nbc_distribution, repeat_distribution,
                     tail_fraction, window_fraction)

UP, DOWN = "↑", "↓"
A_UP, A_DOWN = "A↑", "A↓"
_ALIASES = {"u": UP, "up": UP, "^": UP, "d": DOWN, "down": DOWN, "v": DOWN}


class NoConsistentWorldsError(ValueError):
    """No hypothesis leaves any world in which the observation happens."""


@dataclass(frozen=True)
class Hypothesis:
    name: str
    prior_fraction: float
    per_trial_fractions: FractionTable

    def __post_init__(self):
        if not isinstance(self.per_trial_fractions, FractionTable):
            object.__setattr__(self, "per_trial_fractions",
                               FractionTable(self.per_trial_fractions))
        if not 0.0 <= self.prior_fraction <= 1.0:
            raise ValueError(f"prior of {self.name!r} must lie in [0, 1]")

    def log_likelihood(self, observed: Sequence[str]) -> float:
        total = 0.0
        for o in observed:
            try:
                f = self.per_trial_fractions[o]
            except KeyError:
                raise ValueError(f"hypothesis {self.name!r} has no outcome {o!r}") from None
            if f <= 0.0:
                return -math.inf
            total += math.log(f)
        return total

    def log_weight(self, observed: Sequence[str]) -> float:
        """Log of the absolute fraction of all worlds that are in this
        hypothesis' branches and produced ``observed``."""
        if self.prior_fraction == 0.0:
            return -math.inf
        return math.log(self.prior_fraction) + self.log_likelihood(observed)

    def to_json(self) -> dict:
        return {"name": self.name, "prior": self.prior_fraction,
                "fractions": self.per_trial_fractions.to_json()}


class CredenceTable(FractionTable):
    """Hypothesis name -> fraction of consistent worlds in its branches."""


def alice_bob_hypotheses(prior_up: float = 0.5) -> list[Hypothesis]:
    """Alice's branches: A-up prepares all spins up, A-down prepares |up>+|down>."""
    return [Hypothesis(A_UP, prior_up, FractionTable({UP: 1.0, DOWN: 0.0})),
            Hypothesis(A_DOWN, 1.0 - prior_up, FractionTable({UP: 0.5, DOWN: 0.5}))]


def hypotheses_from_json(items: Sequence[Mapping]) -> list[Hypothesis]:
    return [Hypothesis(str(h["name"]), float(h["prior"]), FractionTable(h["fractions"]))
            for h in items]


def parse_observed(observed: str | Sequence[str], labels: Sequence[str] = (UP, DOWN)) -> list[str]:
    """Outcome sequence from a list, a comma-separated string, or a run of
    single-character labels such as ``"↑↑↓"`` (``u``/``d`` accepted too)."""
    if not isinstance(observed, str):
        return [str(o) for o in observed]
    text = observed.strip()
    if not text:
        return []
    if "," in text:
        parts = [p.strip() for p in text.split(",")]
    elif text in labels or text.lower() in _ALIASES:
        parts = [text]
    else:
        parts = list(text)
    return [p if p in labels else _ALIASES.get(p.lower(), p) for p in parts]


def _check_hypotheses(hypotheses: Sequence[Hypothesis]) -> None:
    if len(hypotheses) < 2:
        raise ValueError("need at least two hypotheses")
    names = [h.name for h in hypotheses]
    if len(set(names)) != len(names):
        raise ValueError("hypothesis names must be unique")
    total = math.fsum(h.prior_fraction for h in hypotheses)
    if abs(total - 1.0) > 1e-12:
        raise ValueError(f"priors sum to {total!r}, not 1")


def _log_weights(hypotheses: Sequence[Hypothesis], observed: Sequence[str]) -> dict[str, float]:
    _check_hypotheses(hypotheses)
    return {h.name: h.log_weight(observed) for h in hypotheses}


def update_credence(hypotheses: Sequence[Hypothesis], observed: str | Sequence[str]) -> CredenceTable:
    observed = parse_observed(observed)
    logw = _log_weights(hypotheses, observed)
    top = max(logw.values())
    if top == -math.inf:
        raise NoConsistentWorldsError(
            f"no hypothesis has worlds producing {''.join(observed)!r}")
    scaled = {k: math.exp(v - top) for k, v in logw.items()}
    total = math.fsum(scaled.values())
    return CredenceTable({k: v / total for k, v in scaled.items()})


def observation_accounting(hypotheses: Sequence[Hypothesis], observed: str | Sequence[str],
                           decided: str) -> dict[str, float]:
    """Split all worlds into misled, correctly decided, and not producing the observation."""
    observed = parse_observed(observed)
    logw = _log_weights(hypotheses, observed)
    if decided not in logw:
        raise ValueError(f"unknown hypothesis {decided!r}")
    if max(logw.values()) == -math.inf:
        raise NoConsistentWorldsError("no worlds produce the observation")
    weights = {k: math.exp(v) for k, v in logw.items()}
    correct = weights[decided]
    misled = math.fsum(w for k, w in weights.items() if k != decided)
    # worlds in each branch that did not produce the sequence: prior * (1 - likelihood)
    non_observing = math.fsum(-h.prior_fraction * math.expm1(h.log_likelihood(observed))
                              for h in hypotheses)
    return {"misled": misled, "correct": correct, "non_observing": non_observing}


def misled_fraction(hypotheses: Sequence[Hypothesis], observed: str | Sequence[str],
                    decided: str) -> float:
    """Fraction of all worlds that produce ``observed`` yet lie outside ``decided``."""
    return observation_accounting(hypotheses, observed, decided)["misled"]


@dataclass(frozen=True)
class CertaintyReport:
    observed: tuple[str, ...]
    credence: CredenceTable
    certain: bool
    hypothesis: str | None

    def to_json(self) -> dict:
        return {"observed": list(self.observed), "credence": self.credence.to_json(),
                "certain": self.certain, "hypothesis": self.hypothesis}


def first_down_certainty(observed: str | Sequence[str],
                         hypotheses: Sequence[Hypothesis] | None = None) -> CertaintyReport:
    """Flags when the observation rules out every hypothesis but one.

    For the Alice/Bob pair any down result does this: A-up leaves no
    worlds with a down, so the credence in A-down is exactly 1.
    """
    hypotheses = hypotheses if hypotheses is not None else alice_bob_hypotheses()
    observed = parse_observed(observed)
    logw = _log_weights(hypotheses, observed)
    credence = update_credence(hypotheses, observed)
    alive = [k for k, v in logw.items() if v > -math.inf]
    certain = len(alive) == 1
    return CertaintyReport(tuple(observed), credence, certain, alive[0] if certain else None)


# -- model comparison ---------------------------------------------------------

@dataclass(frozen=True)
class Model:
    name: str
    up_fraction: float
    kind: str  # what the distribution means under this model
    naive_counting: bool = False

    def distribution(self, N: int):
        if self.naive_counting:
            return nbc_distribution(2, N)
        return repeat_distribution(self.up_fraction, N, label=self.name)


DEFAULT_MODELS = (
    Model("EQM", 0.75, "world fraction"),
    Model("CQM", 0.75, "probability"),
    Model("NBC", 0.5, "world fraction", naive_counting=True),
)


@dataclass
class ComparisonReport:
    N: int
    rows: list[dict]

    def to_json(self) -> dict:
        return {"N": self.N, "scenarios": self.rows}

    def csv_rows(self) -> list[list]:
        out: list[list] = [["scenario", "model", "kind", "window", "support", "rank"]]
        for row in self.rows:
            for m in row["supports"]:
                out.append([row["scenario"], m, row["kinds"][m], row["windows"][m],
                            row["supports"][m], row["ranking"].index(m) + 1])
        return out

    def support(self, scenario: float, model: str) -> float:
        for row in self.rows:
            if row["scenario"] == scenario:
                return row["supports"][model]
        raise KeyError(scenario)


def model_compare(scenarios: Sequence[float], N: int, window: float | None = None,
                  models: Sequence[Model] = DEFAULT_MODELS) -> ComparisonReport:
    """Support each model gives to observing each scenario's up-frequency.

    Support is the fraction of worlds (or, for CQM, the probability) of a
    frequency within ``+- window`` of the scenario value.  Without a window
    each model uses two of its own standard deviations.  Models are ranked
    per scenario; nothing is accepted or rejected.
    """
    if N < 1:
        raise ValueError("N must be at least 1")
    dists = {m.name: m.distribution(N) for m in models}
    rows = []
    for s in scenarios:
        s = float(s)
        if not 0.0 <= s <= 1.0:
            raise ValueError(f"scenario frequency {s} outside [0, 1]")
        windows = {m: (window if window is not None else 2.0 * d.sigma)
                   for m, d in dists.items()}
        supports = {m: window_fraction(d, s, windows[m]) for m, d in dists.items()}
        ranking = sorted(supports, key=lambda m: -supports[m])
        rows.append({"scenario": s, "supports": supports, "windows": windows,
                     "kinds": {m.name: m.kind for m in models}, "ranking": ranking})
    return ComparisonReport(N, rows)


def half_life_report(fraction_decayed_target: float, n_atoms: int,
                     k_sigma: float = 3.0) -> dict:
    """World fractions for a sample of independently branching atoms."""
    p = float(fraction_decayed_target)
    if not 0.0 < p < 1.0:
        raise ValueError("decayed fraction must lie strictly between 0 and 1")
    if n_atoms < 1:
        raise ValueError("need at least one atom")
    dist = repeat_distribution(p, n_atoms, label="decayed")
    return {
        "n_atoms": n_atoms,
        "per_atom": {"decayed": p, "not_decayed": 1.0 - p},
        "k_sigma": k_sigma,
        "sigma": dist.sigma,
        "within_window": 1.0 - tail_fraction(dist, k_sigma),
        "all_decayed": p ** n_atoms,
        "none_decayed": (1.0 - p) ** n_atoms,
    }
