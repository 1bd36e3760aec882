"""Suite runners used by the CLI.

Each runner takes a model and validated parameters and returns a
SuiteResult whose ``data`` is JSON-ready (exact values as strings).
``passed`` is None for purely numerical experiments, which never change
the exit status.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

from .algebras import net_report
from .axioms import (
    adjoint_modes,
    gram_scan_model,
    locality_test,
    unitarity_onset,
    unitarity_test,
    vacuum_translation_grading_check,
    virasoro_bracket_check,
    virasoro_operator,
)
from .fields import generator_vector, reconstruct_field
from .graded import GradedVector, IndefiniteGram, OutOfWindow, SingularGram
from .models import Model, VirasoroModel
from .scalar import format_scalar
from .smearing import Bump, TrigPoly, commutator_decay, energy_bound_estimate, smear, standard_bump_pair


@dataclass
class SuiteResult:
    name: str
    passed: bool | None
    data: dict
    csv: dict = field(default_factory=dict)  # file stem -> (header, rows)


def resolve_field(model: Model, name: str) -> GradedVector:
    """'generator', 'conformal', or a generator name such as 'alpha' or 'left:L'."""
    if name == "conformal":
        return model.conformal_vector
    if name == "generator":
        return generator_vector(model)
    if name not in model.generators:
        raise ValueError(f"unknown field {name!r}; choose generator, conformal or one of {list(model.generators)}")
    return generator_vector(model, name)


def _default_order(a: GradedVector, b: GradedVector) -> int:
    return max(1, int(max(a.levels()) + max(b.levels())))


def _out_of_window(exc: OutOfWindow) -> dict:
    return {"out_of_window": str(exc), "required_e_max": exc.required_e_max}


def run_axioms(model: Model, p: dict) -> SuiteResult:
    e_max = model.window.e_max
    cap = p["level_cap"]
    checks = [
        virasoro_bracket_check(model, p["index_range"], cap),
        vacuum_translation_grading_check(model, index_range=6, level_cap=cap),
    ]
    data = {"checks": [c.to_json() for c in checks]}
    pairs = p["locality"]
    if pairs is None:
        pairs = [{"a": "generator", "b": "generator"}, {"a": "conformal", "b": "conformal"}]
    loc = []
    loc_cap = min(8, e_max) if cap is None else cap
    for pair in pairs:
        a, b = resolve_field(model, pair["a"]), resolve_field(model, pair["b"])
        N = pair.get("N")
        if N is None:
            N = _default_order(a, b)
        rep = locality_test(model, a, b, N, p["locality_index_range"], loc_cap)
        entry = rep.to_json()
        entry["fields"] = [pair["a"], pair["b"]]
        loc.append((rep.passed, entry))
    data["locality"] = [e for _, e in loc]
    passed = all(c.passed for c in checks) and all(ok for ok, _ in loc)
    return SuiteResult("axioms", passed, data)


def _scan_json(model: Model, scan) -> dict:
    onset = unitarity_onset(scan)
    return {
        "c": format_scalar(Fraction(model.central_charge)),
        "levels": [r.to_json(model) for r in scan],
        "negative_onset_level": onset,
        "positive_semidefinite": onset is None,
    }


def run_unitarity(model: Model, p: dict) -> SuiteResult:
    levels = range(p["levels"] + 1)
    scan = gram_scan_model(model, levels)
    data = {"gram_scan": _scan_json(model, scan)}
    rows = [(data["gram_scan"]["c"], r.level, r.dim, r.classification, *r.inertia) for r in scan]
    passed = unitarity_onset(scan) is None
    if p["c_sweep"]:
        sweep = []
        for c in p["c_sweep"]:
            vm = VirasoroModel(c, p["levels"])
            sc = gram_scan_model(vm, levels)
            sweep.append(_scan_json(vm, sc))
            rows.extend((sweep[-1]["c"], r.level, r.dim, r.classification, *r.inertia) for r in sc)
        data["c_sweep"] = sweep
    a = resolve_field(model, p["field"])
    try:
        table = adjoint_modes(model, a, p["index_range"], verify=True)
    except SingularGram as exc:
        data["adjoint"] = {"skipped": "Gram form singular on the window", "level": exc.level,
                           "kernel": [[format_scalar(x) for x in v] for v in exc.kernel]}
    else:
        data["adjoint"] = {
            "field": p["field"], "index_range": [-p["index_range"], p["index_range"]],
            "e_max": model.window.e_max, "passed": not table.failures, "failures": table.failures,
        }
        N = _default_order(a, a) if p["N"] is None else p["N"]
        rep = unitarity_test(model, a, a, N, p["index_range"], p["level_cap"])
        data["adjoint_locality"] = rep.to_json()
        passed = passed and not table.failures and rep.passed
    return SuiteResult("unitarity", passed, data, {
        "gram_scan": (("c", "level", "dim", "classification", "positive", "zero", "negative"), rows)})


def run_energy_bounds(model: Model, p: dict) -> SuiteResult:
    a = resolve_field(model, p["field"])
    rep = energy_bound_estimate(model, a, p["s"], p["k"], p["index_range"], tuple(p["windows"]))
    data = rep.to_json()
    m = [rep.m_est[e] for e in sorted(rep.m_est)]
    monotone = all(x <= y * (1 + 1e-12) + 1e-15 for x, y in zip(m, m[1:]))
    data["field"] = p["field"]
    data["monotone_in_e_max"] = monotone
    rows = [(e, rep.m_est[e]) for e in sorted(rep.m_est)]
    return SuiteResult("energy-bounds", monotone, data, {"energy_bounds": (("e_max", "M_est"), rows)})


def _bumps(arcs, bump):
    if bump is None:
        return standard_bump_pair(arcs[0], arcs[1])
    return tuple(Bump(arc, **bump) for arc in arcs)


def run_smearing(model: Model, p: dict) -> SuiteResult:
    a = resolve_field(model, p["field"])
    arc1, arc2 = p["arcs"]
    f, g = _bumps(p["arcs"], p["bump"])
    table = reconstruct_field(model, a)
    identities = []
    if a.is_homogeneous():
        for k in range(-2, 3):
            got = smear(model, a, TrigPoly({k: Fraction(1)}), max(abs(k), 1)).exact
            identities.append({"identity": f"single Fourier mode {k} gives a_{k}",
                               "passed": got.difference_witness(table.shifted_mode(k)) is None})
    nu = model.conformal_vector
    got = smear(model, nu, TrigPoly({0: Fraction(1)}), 1).exact
    identities.append({"identity": "constant function on the conformal vector gives L_0",
                       "passed": got.difference_witness(virasoro_operator(model, 0)) is None})
    rows = commutator_decay(model, a, a, arc1, arc2, f, g, tuple(p["F"]))
    norms = [r.norm for r in rows]
    data = {
        "field": p["field"],
        "arcs": [arc1.to_json(), arc2.to_json()],
        "bump": {"lo": [format_scalar(f.lo), format_scalar(g.lo)],
                 "hi": [format_scalar(f.hi), format_scalar(g.hi)],
                 "samples_log2": f.samples_log2},
        "aliasing_estimate": max(f.aliasing_estimate(max(p["F"])), g.aliasing_estimate(max(p["F"]))),
        "identities": identities,
        "decay": [r.to_json() for r in rows],
        "decreasing": all(x > y for x, y in zip(norms, norms[1:])),
        "norm_products": "untruncated module; norm_projected uses window-projected matrices",
    }
    csv_rows = [(r.cutoff, r.e_max, r.norm, r.norm_projected,
                 abs(r.pairing) if r.pairing is not None else "") for r in rows]
    return SuiteResult("smearing", all(i["passed"] for i in identities), data, {
        "smearing_decay": (("F", "e_max", "norm", "norm_projected", "abs_pairing"), csv_rows)})


def run_net(model: Model, p: dict) -> SuiteResult:
    rep = net_report(model, p["arcs"], p["F"], tuple(p["locality_F"]), p["bump"])
    data = rep.to_json()
    passed = all(x["contained"] for x in rep.isotony) and all(rep.double_commutant.values())
    rows = [(r["F"], rep.e_max, r["norm"], r["norm_projected"]) for r in rep.locality_max]
    return SuiteResult("net", passed, data, {
        "net_locality": (("F", "e_max", "norm", "norm_projected"), rows)})


RUNNERS = {
    "axioms": run_axioms,
    "unitarity": run_unitarity,
    "energy-bounds": run_energy_bounds,
    "smearing": run_smearing,
    "net": run_net,
}


def run_suite(name: str, model: Model, params: dict) -> SuiteResult:
    try:
        return RUNNERS[name](model, params)
    except OutOfWindow as exc:
        return SuiteResult(name, None, _out_of_window(exc))
    except IndefiniteGram as exc:
        # norms need a positive semidefinite form; the model is not unitary
        return SuiteResult(name, False, {"indefinite_gram": str(exc), "level": exc.level})
