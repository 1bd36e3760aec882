"""Exact checks of the VOA axioms and of unitarity on truncated models.

Every check states the region it certifies (index ranges, level caps,
window).  Failures carry an explicit witness that can be re-checked
independently.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from math import comb

from .fields import reconstruct_field
from .graded import GradedOperator, GradedVector
from .linalg import exact_rank, ldl_definiteness
from .models import Model, VirasoroModel
from .scalar import format_scalar, is_exact


def _fmt(x):
    return format_scalar(x) if is_exact(x) else complex(x).real


def _vec_json(model, vec: dict):
    return GradedVector(model, vec).to_json()


# -- formal fields used by the binomial locality test ----------------------

class VertexField:
    """Y(a,z) acting through the untruncated engine."""

    def __init__(self, model: Model, a: GradedVector):
        self.model = model
        self.a = a
        self.weights = sorted(a.levels())

    def shifts(self, p: int):
        return {d - p - 1 for d in self.weights}

    def apply(self, p: int, vec: dict) -> dict:
        return self.model.field_vec(self.a.entries, p, vec)


class AdjointField:
    """The adjoint field Y(a,z)^+ as a formal field: A_{(p)} = a_{(-p-2)}^+."""

    def __init__(self, table: "AdjointTable"):
        self.table = table
        self.model = table.model
        self.weights = table.weights

    def shifts(self, p: int):
        k = -p - 2
        return {-(d - k - 1) for d in self.weights}

    def apply(self, p: int, vec: dict) -> dict:
        op = self.table.mode(-p - 2)
        out = {}
        model = self.model
        for s, c in vec.items():
            for i, w in op.cols.get(model.index(s), {}).items():
                t = model.state_at(i)
                v = out.get(t, 0) + w * c
                if v == 0:
                    out.pop(t, None)
                else:
                    out[t] = v
        return out


# -- locality ----------------------------------------------------------------

@dataclass
class GridOutcome:
    kind: str  # "zero" | "witness" | "out-of-window"
    witness_state: object = None
    witness_value: dict | None = None
    required_e_max: int | None = None
    # source levels actually checked; None means every level up to the cap
    certified_levels: tuple | None = None


@dataclass
class OrderResult:
    order: int
    outcomes: dict  # (m, n) -> GridOutcome

    @property
    def passed(self) -> bool:
        return all(o.kind != "witness" for o in self.outcomes.values())

    @property
    def certified_points(self):
        return sorted(k for k, o in self.outcomes.items() if o.kind != "out-of-window")

    @property
    def out_of_window_points(self):
        return sorted(k for k, o in self.outcomes.items() if o.kind == "out-of-window")

    @property
    def partial_points(self):
        """In-window points certified only on a subset of the source levels."""
        return sorted(k for k, o in self.outcomes.items()
                      if o.kind != "out-of-window" and o.certified_levels is not None)

    @property
    def failures(self):
        return sorted(k for k, o in self.outcomes.items() if o.kind == "witness")


@dataclass
class LocalityReport:
    label: str
    tested_order: int
    m_range: tuple
    n_range: tuple
    level_cap: int
    e_max: int
    orders: dict = field(default_factory=dict)  # order -> OrderResult
    model: Model | None = field(default=None, repr=False)

    @property
    def minimal_order(self):
        """Smallest tested order passing on every certified grid point."""
        for N in sorted(self.orders):
            if self.orders[N].passed:
                return N
        return None

    @property
    def passed(self) -> bool:
        return self.orders[self.tested_order].passed

    @property
    def fully_certified(self) -> bool:
        return all(not r.out_of_window_points and not r.partial_points
                   for r in self.orders.values())

    def to_json(self):
        orders = {}
        for N, res in sorted(self.orders.items()):
            fails = []
            for key in res.failures[:20]:
                o = res.outcomes[key]
                fails.append({
                    "m": key[0], "n": key[1],
                    "witness_state": self.model.state_to_json(o.witness_state),
                    "value": _vec_json(self.model, o.witness_value),
                })
            orders[str(N)] = {
                "passed": res.passed,
                "certified_points": len(res.certified_points),
                "failing_points": len(res.failures),
                "out_of_window": [
                    {"m": m, "n": n, "required_e_max": res.outcomes[(m, n)].required_e_max}
                    for m, n in res.out_of_window_points
                ],
                "partially_certified": [
                    {"m": m, "n": n, "source_levels": list(res.outcomes[(m, n)].certified_levels),
                     "required_e_max": res.outcomes[(m, n)].required_e_max}
                    for m, n in res.partial_points
                ],
                "witnesses": fails,
            }
        return {
            "pair": self.label,
            "tested_order": self.tested_order,
            "minimal_order": self.minimal_order,
            "passed": self.passed,
            "certified_region": {
                "m": list(self.m_range), "n": list(self.n_range),
                "level_cap": self.level_cap, "e_max": self.e_max,
            },
            "orders": orders,
        }


def _touched_levels(fa, fb, p, q, lev):
    top = -1
    for sb in fb.shifts(q):
        if lev + sb < 0:
            continue
        top = max(top, lev + sb)
        for sa in fa.shifts(p):
            if lev + sb + sa >= 0:
                top = max(top, lev + sb + sa)
    for sa in fa.shifts(p):
        if lev + sa < 0:
            continue
        top = max(top, lev + sa)
        for sb in fb.shifts(q):
            if lev + sa + sb >= 0:
                top = max(top, lev + sa + sb)
    return top


def binomial_sum(fa, fb, m: int, n: int, N: int, b0: dict) -> dict:
    """Σ_j (-1)^j C(N,j) [A_{(m+N-j)}, B_{(n+j)}] b0 as an exact vector."""
    out = {}
    for j in range(N + 1):
        coeff = (-1) ** j * comb(N, j)
        p, q = m + N - j, n + j
        x = fa.apply(p, fb.apply(q, b0))
        y = fb.apply(q, fa.apply(p, b0))
        for vec, sgn in ((x, coeff), (y, -coeff)):
            for s, c in vec.items():
                v = out.get(s, 0) + sgn * c
                if v == 0:
                    out.pop(s, None)
                else:
                    out[s] = v
    return out


def _run_grid(model, fa, fb, label, N, index_range, level_cap, search=True):
    e_max = model.window.e_max
    if level_cap > e_max:
        level_cap = e_max
    (m_lo, m_hi), (n_lo, n_hi) = _ranges(index_range)
    report = LocalityReport(label, N, (m_lo, m_hi), (n_lo, n_hi), level_cap, e_max, model=model)
    sources = [s for lv in range(level_cap + 1) for s in model.basis(lv)]
    if fa is None or fb is None:
        orders = [0] if N >= 0 else []
    else:
        orders = range(0, N + 1) if search else [N]
    for order in orders:
        outcomes = {}
        for m in range(m_lo, m_hi + 1):
            for n in range(n_lo, n_hi + 1):
                if fa is None or fb is None:
                    outcomes[(m, n)] = GridOutcome("zero")
                    continue
                need = {
                    lv: max(_touched_levels(fa, fb, m + order - j, n + j, lv)
                            for j in range(order + 1))
                    for lv in range(level_cap + 1)
                }
                ok = tuple(lv for lv, r in need.items() if r <= e_max)
                required = max(need.values(), default=-1)
                if not ok:
                    outcomes[(m, n)] = GridOutcome("out-of-window", required_e_max=required)
                    continue
                partial = len(ok) < len(need)
                result = GridOutcome("zero", required_e_max=required if partial else None,
                                     certified_levels=ok if partial else None)
                for s in sources:
                    if need[model.level(s)] > e_max:
                        continue
                    val = binomial_sum(fa, fb, m, n, order, {s: 1})
                    if val:
                        result = GridOutcome("witness", s, val, result.required_e_max,
                                             result.certified_levels)
                        break
                outcomes[(m, n)] = result
        report.orders[order] = OrderResult(order, outcomes)
    if N not in report.orders:
        report.orders[N] = OrderResult(N, {
            (m, n): GridOutcome("zero") for m in range(m_lo, m_hi + 1) for n in range(n_lo, n_hi + 1)
        })
    return report


def _ranges(index_range):
    if isinstance(index_range, int):
        return (-index_range, index_range), (-index_range, index_range)
    a, b = index_range
    if isinstance(a, int):
        return (a, b), (a, b)
    return tuple(a), tuple(b)


def locality_test(model: Model, a: GradedVector, b: GradedVector, N: int, index_range=6,
                  level_cap: int = 8, search: bool = True) -> LocalityReport:
    """Binomial form of (z-w)^N [Y(a,z), Y(b,w)] = 0 on a finite grid.

    For every (m, n) in the grid and every basis state of level <= level_cap,
    evaluates Σ_j (-1)^j C(N,j) [a_{(m+N-j)}, b_{(n+j)}] exactly.  Grid points
    are checked on the source levels whose evaluation stays inside the
    window; the remaining levels are reported with the e_max they need, and
    points with no checkable level are reported as out-of-window.  With ``search`` every order
    0..N is evaluated so the minimal passing order is known.
    """
    fa = VertexField(model, a) if not a.is_zero() else None
    fb = VertexField(model, b) if not b.is_zero() else None
    label = f"Y({_label(a)}) , Y({_label(b)})"
    return _run_grid(model, fa, fb, label, N, index_range, level_cap, search)


def _label(v: GradedVector) -> str:
    if v.is_zero():
        return "0"
    return " + ".join(f"{format_scalar(c) if is_exact(c) else c}*{list(s)!r}" for s, c in v.items())


# -- Virasoro structure ------------------------------------------------------

def virasoro_operator(model: Model, n: int) -> GradedOperator:
    """Window matrix of L_n: native for the Virasoro model, ν_{(n+1)} otherwise."""
    if isinstance(model, VirasoroModel):
        return model.generator_matrix("L", n)
    return reconstruct_field(model, model.conformal_vector).mode(n + 1)


@dataclass
class CheckReport:
    name: str
    passed: bool
    certified: dict
    failures: list = field(default_factory=list)
    details: dict = field(default_factory=dict)

    def to_json(self):
        return {
            "check": self.name,
            "passed": self.passed,
            "certified_region": self.certified,
            "failures": self.failures,
            **({"details": self.details} if self.details else {}),
        }


def _witness_json(model, wit):
    state, col = wit
    return {"source_state": model.state_to_json(state),
            "difference": _vec_json(model, col)}


def virasoro_bracket_check(model: Model, index_range=4, level_cap: int | None = None,
                           c=None) -> CheckReport:
    """[L_n, L_m] = (n-m) L_{n+m} + c/12 (n^3-n) δ_{n,-m} as window matrices."""
    (n_lo, n_hi), (m_lo, m_hi) = _ranges(index_range)
    e_max = model.window.e_max
    cap = e_max if level_cap is None else min(level_cap, e_max)
    c = model.central_charge if c is None else c
    one = GradedOperator.identity(model)
    failures, certified = [], {}
    for n in range(n_lo, n_hi + 1):
        for m in range(m_lo, m_hi + 1):
            ln, lm = virasoro_operator(model, n), virasoro_operator(model, m)
            lhs = ln @ lm - lm @ ln
            rhs = (n - m) * virasoro_operator(model, n + m)
            if n == -m:
                rhs = rhs + one * (Fraction(c) * (n ** 3 - n) / 12)
            lhs, rhs = lhs.restrict(range(cap + 1)), rhs.restrict(range(cap + 1))
            dom = sorted(lhs.domain & rhs.domain)
            certified[f"{n},{m}"] = dom
            wit = lhs.difference_witness(rhs)
            if wit is not None:
                failures.append({"n": n, "m": m, **_witness_json(model, wit)})
    return CheckReport(
        "virasoro_bracket", not failures,
        {"n": [n_lo, n_hi], "m": [m_lo, m_hi], "level_cap": cap, "e_max": e_max,
         "c": format_scalar(Fraction(c)), "levels_per_pair": certified},
        failures,
    )


def vacuum_translation_grading_check(model: Model, states=None, index_range: int = 6,
                                     level_cap: int | None = None) -> CheckReport:
    """Vacuum, translation, grading and energy-positivity checks, exactly.

    ``states`` defaults to every window basis state of level <= 4.
    """
    e_max = model.window.e_max
    cap = e_max if level_cap is None else min(level_cap, e_max)
    if states is None:
        states = [model.vector({s: 1}) for lv in range(min(4, e_max) + 1) for s in model.basis(lv)]
    omega = model.vacuum_vector
    l_m1 = virasoro_operator(model, -1)
    l_0 = virasoro_operator(model, 0)
    failures = []
    counts = {"vacuum": 0, "creation": 0, "translation": 0, "grading": 0}
    for a in states:
        table = reconstruct_field(model, a)
        label = _label(a)
        got = GradedVector(model, model.field_vec(a.entries, -1, omega.entries))
        counts["vacuum"] += 1
        if got != a:
            failures.append({"check": "a_(-1)Ω = a", "state": label, "got": got.to_json()})
        for n in range(0, index_range + 1):
            counts["creation"] += 1
            img = model.field_vec(a.entries, n, omega.entries)
            if img:
                failures.append({"check": "a_(n)Ω = 0", "state": label, "n": n,
                                 "got": _vec_json(model, img)})
        for n in range(-index_range, index_range + 1):
            an = table.mode(n)
            lhs = (l_m1 @ an - an @ l_m1).restrict(range(cap + 1))
            rhs = (-n) * table.mode(n - 1)
            counts["translation"] += 1
            wit = lhs.difference_witness(rhs.restrict(range(cap + 1)))
            if wit is not None:
                failures.append({"check": "[L_-1, a_(n)] = -n a_(n-1)", "state": label, "n": n,
                                 **_witness_json(model, wit)})
            if a.is_homogeneous() and not a.is_zero():
                d = a.weight
                lhs = (l_0 @ an - an @ l_0).restrict(range(cap + 1))
                counts["grading"] += 1
                wit = lhs.difference_witness((d - n - 1) * an)
                if wit is not None:
                    failures.append({"check": "[L_0, a_(n)] = (d-n-1) a_(n)", "state": label,
                                     "n": n, **_witness_json(model, wit)})
    l0_rows = [[0] * model.dim for _ in range(model.dim)]
    for j, col in l_0.cols.items():
        for i, v in col.items():
            l0_rows[i][j] = v
    kernel_dim = model.dim - exact_rank(l0_rows)
    if kernel_dim != 1:
        failures.append({"check": "dim Ker(L_0) = 1", "got": kernel_dim})
    for lv in range(e_max + 1):
        for idx in range(*model.level_slice(lv)):
            got = l_0.cols.get(idx, {})
            if got != ({idx: lv} if lv else {}):
                failures.append({"check": "L_0 = level on V_n", "level": lv,
                                 "state": model.state_to_json(model.state_at(idx))})
                break
    if any(model.basis(-k) for k in range(1, 4)):
        failures.append({"check": "V_n = 0 for n < 0"})
    return CheckReport(
        "vacuum_translation_grading", not failures,
        {"states": len(states), "index_range": [-index_range, index_range],
         "level_cap": cap, "e_max": e_max},
        failures, {"checks_run": counts, "kernel_L0_dim": kernel_dim},
    )


# -- unitarity ---------------------------------------------------------------

class AdjointTable:
    """Exact adjoints a_{(n)}^+ with respect to the model's Gram form."""

    def __init__(self, model: Model, a: GradedVector):
        self.model = model
        self.a = a
        self.table = reconstruct_field(model, a)
        self.weights = sorted(a.levels())
        self._adj = {}

    def mode(self, n: int) -> GradedOperator:
        op = self._adj.get(n)
        if op is None:
            op = self.table.mode(n).adjoint(self.model.gram)
            self._adj[n] = op
        return op

    def verify(self, n: int):
        """(a_{(n)}^+ b | c) = (b | a_{(n)} c) on window basis pairs; returns first violation."""
        model, gram = self.model, self.model.gram
        x, xp = self.table.mode(n), self.mode(n)
        for t in sorted(xp.domain):
            for b in model.basis(t):
                bv = model.vector({b: 1})
                lhs_vec = xp.apply(bv)
                for s in range(model.window.e_max + 1):
                    if s not in x.domain:
                        continue
                    for c in model.basis(s):
                        cv = model.vector({c: 1})
                        lhs = gram.inner(lhs_vec, cv)
                        rhs = gram.inner(bv, x.apply(cv))
                        if lhs != rhs:
                            return {"n": n, "b": model.state_to_json(b),
                                    "c": model.state_to_json(c),
                                    "lhs": _fmt(lhs), "rhs": _fmt(rhs)}
        return None


def adjoint_modes(model: Model, a: GradedVector, index_range=4, verify: bool = True):
    """Adjoint table for |n| <= index_range, with the defining relation checked exactly.

    Raises SingularGram naming the level and kernel if a Gram block on the
    window is singular.
    """
    for lv in range(model.window.e_max + 1):
        model.gram.inverse(lv)
    table = AdjointTable(model, a)
    lo, hi = (-index_range, index_range) if isinstance(index_range, int) else index_range
    failures = []
    for n in range(lo, hi + 1):
        table.mode(n)
        if verify:
            bad = table.verify(n)
            if bad:
                failures.append(bad)
    table.failures = failures
    return table


def unitarity_test(model: Model, a: GradedVector, b: GradedVector, N: int, index_range=4,
                   level_cap: int = 6, search: bool = True) -> LocalityReport:
    """Mutual locality of the adjoint field Y(a,z)^+ with Y(b,z).

    The adjoint field Σ a_{(n)}^+ z^{n+1} is re-indexed as a formal field
    whose coefficient of z^{-m-1} is a_{(-m-2)}^+, then the binomial test is
    run against Y(b,z).
    """
    if a.is_zero() or b.is_zero():
        fa = fb = None
    else:
        fa = AdjointField(AdjointTable(model, a))
        fb = VertexField(model, b)
    label = f"Y({_label(a)})^+ , Y({_label(b)})"
    return _run_grid(model, fa, fb, label, N, index_range, level_cap, search)


# -- Gram scans --------------------------------------------------------------

@dataclass
class LevelClassification:
    level: int
    dim: int
    classification: str
    inertia: tuple
    kernel: tuple

    def to_json(self, model):
        basis = model.basis(self.level)
        return {
            "level": self.level,
            "dim": self.dim,
            "classification": self.classification,
            "inertia": {"positive": self.inertia[0], "zero": self.inertia[1],
                        "negative": self.inertia[2]},
            "null_vectors": [
                _vec_json(model, {s: c for s, c in zip(basis, vec) if c != 0}) for vec in self.kernel
            ],
        }


def gram_scan_model(model: Model, levels=None) -> list:
    levels = range(model.window.e_max + 1) if levels is None else levels
    out = []
    for lv in levels:
        res = ldl_definiteness(model.gram.block(lv))
        out.append(LevelClassification(lv, len(model.basis(lv)), res.classification,
                                       res.inertia, res.kernel))
    return out


def gram_spectrum_scan(model: Model | None = None, levels=None, c_values=None, e_max=None) -> dict:
    """Exact per-level inertia of the Gram form.

    Either scan one model, or (``c_values``) sweep the universal Virasoro
    module over central charges; returns {c or model kind: (model, [LevelClassification])}.
    """
    if c_values is None:
        return {model.describe().get("c", model.kind): (model, gram_scan_model(model, levels))}
    top = e_max if e_max is not None else max(levels)
    out = {}
    for c in c_values:
        vm = VirasoroModel(c, top)
        out[format_scalar(Fraction(vm.central_charge))] = (vm, gram_scan_model(vm, levels))
    return out


def unitarity_onset(scan: list):
    """First level with a negative pivot, or None."""
    return next((r.level for r in scan if r.inertia[2] > 0), None)
