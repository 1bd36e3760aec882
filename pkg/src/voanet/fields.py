"""State-field correspondence on truncated models."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .graded import GradedOperator, GradedVector, OutOfWindow
from .models import FockModel, Model


@dataclass(frozen=True)
class ModeIndex:
    """A mode index in one of the two conventions.

    unshifted: coefficient of z^{-n-1};  shifted: coefficient of z^{-n-d}
    for a homogeneous state of weight d, so shifted n = unshifted n+d-1.
    """

    value: int
    convention: str = "unshifted"

    def __post_init__(self):
        if self.convention not in ("unshifted", "shifted"):
            raise ValueError(f"unknown mode convention {self.convention!r}")

    def to_unshifted(self, weight: int) -> "ModeIndex":
        if self.convention == "unshifted":
            return self
        return ModeIndex(self.value + weight - 1, "unshifted")

    def to_shifted(self, weight: int) -> "ModeIndex":
        if self.convention == "shifted":
            return self
        return ModeIndex(self.value - weight + 1, "shifted")


class FieldModeTable:
    """Lazily computed window matrices of the modes a_{(n)} of Y(a,z)."""

    def __init__(self, model: Model, state: GradedVector):
        if state.model is not model:
            raise TypeError("state belongs to another model")
        e_max = model.window.e_max
        if state.max_level() > e_max:
            raise OutOfWindow("state lies outside the window", state.max_level())
        self.model = model
        self.state = state
        self.weights = sorted(state.levels())
        self._modes = {}

    @property
    def weight(self):
        return self.state.weight

    def shifts(self, n: int):
        if not self.weights:
            return {0}
        return {d - n - 1 for d in self.weights}

    def validity(self, n: int):
        """Source levels on which the window matrix of a_{(n)} is exact."""
        e_max = self.model.window.e_max
        return [m for m in range(e_max + 1) if all(m + s <= e_max for s in self.shifts(n))]

    def vanishing_index(self, b) -> int:
        """K with a_{(n)} b = 0 for every n >= K (field property, by grading).

        ``b`` is a basis state or a GradedVector.
        """
        top = max(b.levels(), default=0) if isinstance(b, GradedVector) else self.model.level(b)
        return top + max(self.weights, default=0)

    def mode(self, n: int) -> GradedOperator:
        op = self._modes.get(n)
        if op is None:
            entries = self.state.entries
            model = self.model
            if not entries:
                op = GradedOperator.zero(model)
            else:
                op = GradedOperator.from_column_map(
                    model, lambda b: model.field_vec(entries, n, {b: 1}), self.shifts(n)
                )
            self._modes[n] = op
        return op

    def shifted_mode(self, n: int) -> GradedOperator:
        """a_n, extended to inhomogeneous a by linearity over homogeneous parts."""
        if not self.weights:
            return GradedOperator.zero(self.model)
        if len(self.weights) == 1:
            return self.mode(n + self.weights[0] - 1)
        total = None
        for d, comp in self.state.components().items():
            op = reconstruct_field(self.model, comp).mode(n + d - 1)
            total = op if total is None else total + op
        return total

    def apply(self, n: int, b: GradedVector) -> GradedVector:
        """a_{(n)} b computed in the untruncated module, then window-checked."""
        out = self.model.field_vec(self.state.entries, n, b.entries)
        vec = GradedVector(self.model, out)
        if vec.max_level() > self.model.window.e_max:
            raise OutOfWindow(f"a_({n}) b leaves the window", vec.max_level())
        return vec

    def to_json(self, indices) -> dict:
        return {
            "state": self.state.to_json(),
            "modes": {str(n): self.mode(n).to_json() for n in indices},
        }


def reconstruct_field(model: Model, a: GradedVector) -> FieldModeTable:
    """Mode table of Y(a,z); cached per (model, a)."""
    key = frozenset(a.entries.items())
    cache = model.__dict__.setdefault("_field_tables", {})
    table = cache.get(key)
    if table is None:
        with model._lock:
            table = cache.get(key)
            if table is None:
                table = FieldModeTable(model, a)
                cache[key] = table
    return table


def sugawara_vector(model: Model) -> GradedVector:
    """ν = ½ α_{-1}α_{-1}Ω on the Heisenberg model (c = 1)."""
    if not (isinstance(model, FockModel) and model.kind == "heisenberg"):
        raise ValueError("the Sugawara vector is defined for the heisenberg model only")
    return GradedVector(model, {(1, 1): Fraction(1, 2)})


def mode_of(model: Model, a: GradedVector, n: ModeIndex) -> GradedOperator:
    """Window matrix of a_{(n)} or a_n."""
    table = reconstruct_field(model, a)
    if n.convention == "shifted":
        if a.is_zero():
            return GradedOperator.zero(model)
        if not a.is_homogeneous():
            raise ValueError("shifted modes need a homogeneous state")
        n = n.to_unshifted(a.weight)
    return table.mode(n.value)


def generator_vector(model: Model, gen: str | None = None) -> GradedVector:
    """The state α_{-1}Ω / L_{-2}Ω (or its tensor lift) whose field is the generator field."""
    return GradedVector(model, {model.generator_state(gen): 1})
