"""Command-line front end.

Exit status: 0 on success, 1 on bad input (the message names the offending
field), 2 when a computed result breaks an invariant it must satisfy.
"""
from __future__ import annotations

import argparse
import json
import sys
from dataclasses import dataclass, field as dc_field
from typing import Sequence

from . import io as fio
from .fields import FieldMismatchError, ScalarField
from .hilbert import BasisMismatchError, UnknownOutcomeError
from .inference import (alice_bob_hypotheses, first_down_certainty, half_life_report,
                        model_compare, observation_accounting, parse_observed,
                        update_credence, NoConsistentWorldsError)
from .measure import (DEFAULT_REGION, MIN_SAMPLES, projection_factor_analytic,
                      projection_factor_mc, pythagorean_check)
from .regions import Annulus, Ball, DegenerateRegionError, default_box
from .worlds import (FractionTable, build_branch_tree, count_label, repeat_distribution,
                     tail_fraction, world_fractions)

DEFAULT_SEED = 20210611
DEFAULT_SAMPLES = 100_000
COMMANDS = ("factor", "pythagoras", "fractions", "repeat", "tree", "infer", "compare", "halflife")
PYTHAGORAS_TOL = 1e-9


class InvariantViolation(RuntimeError):
    pass


@dataclass
class RunConfig:
    command: str
    input_path: str | None = None
    seed: int = DEFAULT_SEED
    n_samples: int = DEFAULT_SAMPLES
    output_format: str = "json"
    output_path: str | None = None
    # inline state
    field: str = "complex"
    basis: list[str] | None = None
    coeffs: str | None = None
    partition: str | None = None
    outcome: str | None = None
    region: str | None = None
    workers: int = 1
    # distributions and inference
    p: float = 0.75
    N: int = 100
    ksigma: float = 3.0
    window: float | None = None
    scenarios: list[float] = dc_field(default_factory=lambda: [0.0, 0.5, 0.75])
    observed: str | None = None
    decided: str | None = None
    depth: int = 2
    merge: str | None = None
    target: float = 0.5
    atoms: int = 100


# -- inputs -------------------------------------------------------------------

def _parse_inline(text: str, what: str):
    try:
        return json.loads(text)
    except json.JSONDecodeError as err:
        raise fio.InputError(what, f"not valid JSON ({err})") from None


def _state_input(cfg: RunConfig) -> dict:
    if cfg.input_path:
        obj = fio.load_json(cfg.input_path)
        if not isinstance(obj, dict):
            raise fio.InputError("<root>", "state file must hold a JSON object")
        return obj
    if cfg.coeffs is None:
        raise fio.InputError("--input", "give a state file or inline --coeffs")
    coeffs = _parse_inline(cfg.coeffs, "--coeffs")
    if not isinstance(coeffs, list):
        raise fio.InputError("--coeffs", "expected a JSON list")
    basis = cfg.basis or [str(i) for i in range(len(coeffs))]
    obj = {"field": cfg.field, "basis": basis, "coeffs": coeffs}
    return obj


def _load_state(cfg: RunConfig):
    obj = _state_input(cfg)
    v = fio.state_from_json(obj)
    part_obj = _parse_inline(cfg.partition, "--partition") if cfg.partition else obj.get("partition")
    partition = fio.partition_from_json(part_obj, v)
    region = _region(cfg, v.field.ray_dim, obj.get("region"))
    return v, partition, region


def _region(cfg: RunConfig, d: int, from_file):
    if cfg.region is None:
        return fio.region_from_input(from_file, DEFAULT_REGION)
    named = {"ball": Ball(1.0), "annulus": Annulus(1.0, 2.0), "box": default_box(d)}
    if cfg.region in named:
        return named[cfg.region]
    return fio.region_from_input(_parse_inline(cfg.region, "--region"), DEFAULT_REGION)


def _check_samples(cfg: RunConfig) -> None:
    if cfg.n_samples < MIN_SAMPLES:
        raise fio.InputError("--samples", f"must be at least {MIN_SAMPLES}")


# -- commands -----------------------------------------------------------------

def _cmd_factor(cfg: RunConfig):
    _check_samples(cfg)
    v, partition, region = _load_state(cfg)
    outcomes = [cfg.outcome] if cfg.outcome else partition.outcomes
    report = {}
    for k, o in enumerate(outcomes):
        if o not in partition.groups:
            raise fio.InputError("--outcome", f"unknown outcome {o!r}")
        est = projection_factor_mc(v, partition, o, region, cfg.n_samples, cfg.seed,
                                   stream=k, workers=cfg.workers)
        report[o] = {"analytic": projection_factor_analytic(v, partition, o),
                     "mc_value": est.value, "mc_std_error": est.std_error,
                     "n": est.n_samples}
    rows = [["outcome", "analytic", "mc_value", "mc_std_error", "n"]]
    rows += [[o, r["analytic"], r["mc_value"], r["mc_std_error"], r["n"]] for o, r in report.items()]
    return report, rows


def _cmd_pythagoras(cfg: RunConfig):
    _check_samples(cfg)
    v, partition, region = _load_state(cfg)
    if v.field is not ScalarField.COMPLEX:
        raise fio.InputError("field", "the Pythagorean check applies to complex states")
    rep = pythagorean_check(v, partition, region, cfg.n_samples, cfg.seed, cfg.workers)
    if abs(rep.deviation) > PYTHAGORAS_TOL:
        raise InvariantViolation(f"factor sum deviates from 1 by {rep.deviation:.3g}")
    return rep.to_json(), rep.csv_rows()


def _cmd_fractions(cfg: RunConfig):
    v, partition, _ = _load_state(cfg)
    table = world_fractions(v, partition)
    return table.to_json(), [["outcome", "fraction"]] + [[o, f] for o, f in table.items()]


def _check_unit(name: str, x: float) -> None:
    if not 0.0 <= x <= 1.0:
        raise fio.InputError(name, f"must lie in [0, 1], got {x}")


def _cmd_repeat(cfg: RunConfig):
    _check_unit("--p", cfg.p)
    try:
        dist = repeat_distribution(cfg.p, cfg.N)
    except ValueError as err:
        raise fio.InputError("--N", str(err)) from None
    if cfg.ksigma <= 0:
        raise fio.InputError("--ksigma", "must be positive")
    out = dist.to_json()
    out["sigma"] = dist.sigma
    out["k_sigma"] = cfg.ksigma
    out["tail_fraction"] = tail_fraction(dist, cfg.ksigma)
    return out, fio.distribution_rows(dist)


def _cmd_tree(cfg: RunConfig):
    if cfg.input_path or cfg.coeffs:
        v, partition, _ = _load_state(cfg)
        step = world_fractions(v, partition)
    else:
        _check_unit("--p", cfg.p)
        step = FractionTable({"↑": cfg.p, "↓": 1.0 - cfg.p})
    if cfg.depth < 1:
        raise fio.InputError("--depth", "must be at least 1")
    merge = None
    if cfg.merge:
        kind, _, label = cfg.merge.partition(":")
        if kind != "count" or label not in step:
            raise fio.InputError("--merge", "expected count:<outcome label>")
        merge = count_label(label)
    try:
        tree = build_branch_tree([step] * cfg.depth, merge)
    except ValueError as err:
        raise fio.InputError("--depth", str(err)) from None
    rows = [["sequence", "fraction"]] + [[" ".join(s), f] for s, f in tree.leaves.items()]
    if tree.coarse is not None:
        rows += [["coarse", "fraction"]] + [[k, f] for k, f in sorted(tree.coarse.items())]
    return tree.to_json(), rows


def _cmd_infer(cfg: RunConfig):
    if cfg.input_path:
        obj = fio.load_json(cfg.input_path)
        hyps, observed = fio.scenario_from_json(obj)
    else:
        hyps, observed = alice_bob_hypotheses(), []
    labels = sorted({o for h in hyps for o in h.per_trial_fractions})
    if cfg.observed is not None:
        observed = parse_observed(cfg.observed, labels)
    for k, o in enumerate(observed):
        if o not in labels:
            raise fio.InputError(f"observed[{k}]", f"unknown outcome {o!r}")
    try:
        credence = update_credence(hyps, observed)
    except NoConsistentWorldsError as err:
        raise fio.InputError("observed", str(err)) from None
    decided = cfg.decided or max(credence, key=credence.get)
    if decided not in credence:
        raise fio.InputError("--decided", f"unknown hypothesis {decided!r}")
    accounting = observation_accounting(hyps, observed, decided)
    certainty = first_down_certainty(observed, hyps)
    out = {"observed": observed, "credence": credence.to_json(), "decided": decided,
           "misled_fraction": accounting["misled"], "accounting": accounting,
           "certain": certainty.certain, "certain_hypothesis": certainty.hypothesis}
    rows = [["hypothesis", "credence"]] + [[h, c] for h, c in credence.items()]
    return out, rows


def _cmd_compare(cfg: RunConfig):
    for k, s in enumerate(cfg.scenarios):
        _check_unit(f"--scenarios[{k}]", s)
    if cfg.N < 1:
        raise fio.InputError("--N", "must be at least 1")
    if cfg.window is not None and cfg.window < 0:
        raise fio.InputError("--window", "must be non-negative")
    rep = model_compare(cfg.scenarios, cfg.N, cfg.window)
    return rep.to_json(), rep.csv_rows()


def _cmd_halflife(cfg: RunConfig):
    if not 0.0 < cfg.target < 1.0:
        raise fio.InputError("--target", "must lie strictly between 0 and 1")
    if cfg.atoms < 1:
        raise fio.InputError("--atoms", "must be at least 1")
    if cfg.ksigma <= 0:
        raise fio.InputError("--ksigma", "must be positive")
    rep = half_life_report(cfg.target, cfg.atoms, cfg.ksigma)
    rows = [["quantity", "value"]] + [[k, v] for k, v in rep.items() if not isinstance(v, dict)]
    rows += [[f"per_atom.{k}", v] for k, v in rep["per_atom"].items()]
    return rep, rows


_DISPATCH = {
    "factor": _cmd_factor, "pythagoras": _cmd_pythagoras, "fractions": _cmd_fractions,
    "repeat": _cmd_repeat, "tree": _cmd_tree, "infer": _cmd_infer,
    "compare": _cmd_compare, "halflife": _cmd_halflife,
}


def render(cfg: RunConfig) -> str:
    """Run a command and return its report text (raises on failure)."""
    if cfg.command not in _DISPATCH:
        raise fio.InputError("command", f"unknown command {cfg.command!r}")
    if cfg.output_format not in ("json", "csv"):
        raise fio.InputError("--format", f"unknown format {cfg.output_format!r}")
    obj, rows = _DISPATCH[cfg.command](cfg)
    return fio.to_json_text(obj) if cfg.output_format == "json" else fio.to_csv_text(rows)


def run(cfg: RunConfig, stdout=None, stderr=None) -> int:
    stdout = stdout if stdout is not None else sys.stdout
    stderr = stderr if stderr is not None else sys.stderr
    try:
        text = render(cfg)
    except fio.InputError as err:
        print(f"error: {err}", file=stderr)
        return 1
    except (FieldMismatchError, BasisMismatchError, DegenerateRegionError) as err:
        print(f"error: input: {err}", file=stderr)
        return 1
    except UnknownOutcomeError as err:
        print(f"error: --outcome: {err.args[0]}", file=stderr)
        return 1
    except InvariantViolation as err:
        print(f"invariant violated: {err}", file=stderr)
        return 2
    if cfg.output_path:
        with open(cfg.output_path, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    else:
        stdout.write(text)
        stdout.flush()
    return 0


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="worldfrac",
        description="Projection factors, fractions of branching worlds, and inference from them.")
    ap.add_argument("command", choices=COMMANDS)
    ap.add_argument("--input", dest="input_path", help="state or scenario JSON file")
    ap.add_argument("--seed", type=int, default=DEFAULT_SEED,
                    help=f"Monte Carlo seed (default {DEFAULT_SEED})")
    ap.add_argument("--samples", dest="n_samples", type=int, default=DEFAULT_SAMPLES,
                    help="Monte Carlo samples per outcome")
    ap.add_argument("--workers", type=int, default=1, help="parallel Monte Carlo streams")
    ap.add_argument("--format", dest="output_format", choices=("json", "csv"), default="json")
    ap.add_argument("--output", dest="output_path", help="write the report here instead of stdout")

    st = ap.add_argument_group("inline state")
    st.add_argument("--field", choices=[f.value for f in ScalarField], default="complex")
    st.add_argument("--basis", type=lambda s: s.split(","), help="comma-separated labels")
    st.add_argument("--coeffs", help='JSON list of components, e.g. "[[0.8,0],[0,0.6]]"')
    st.add_argument("--partition", help='JSON object outcome -> labels')
    st.add_argument("--outcome", help="single outcome for `factor`")
    st.add_argument("--region", help="ball | annulus | box, or a region JSON object")

    dist = ap.add_argument_group("distributions and inference")
    dist.add_argument("--p", type=float, default=0.75, help="per-run up fraction")
    dist.add_argument("--N", type=int, default=100, help="number of runs")
    dist.add_argument("--ksigma", type=float, default=3.0, help="tail / window width in sigmas")
    dist.add_argument("--window", type=float, default=None,
                      help="half-width of the frequency window for `compare` "
                           "(default: 2 sigma of each model)")
    dist.add_argument("--scenarios", type=lambda s: [float(x) for x in s.split(",")],
                      default=[0.0, 0.5, 0.75], help="comma-separated observed frequencies")
    dist.add_argument("--observed", help='outcome sequence, e.g. "↑↑↓" or "up,up,down"')
    dist.add_argument("--decided", help="hypothesis taken as the conclusion for `infer`")
    dist.add_argument("--depth", type=int, default=2, help="tree depth for `tree`")
    dist.add_argument("--merge", help="coarse-grain leaves, e.g. count:↑")
    dist.add_argument("--target", type=float, default=0.5, help="decayed fraction for `halflife`")
    dist.add_argument("--atoms", type=int, default=100)
    return ap


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    cfg = RunConfig(**vars(args))
    if hasattr(sys.stdout, "reconfigure"):
        sys.stdout.reconfigure(encoding="utf-8")
    return run(cfg)


if __name__ == "__main__":
    sys.exit(main())
