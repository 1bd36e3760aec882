"""Concrete VOA models on partition-indexed PBW bases.

Heisenberg: states ``α_{-λ1}…α_{-λk}Ω`` for partitions λ.
Virasoro: universal vacuum module V(c,0), states ``L_{-λ1}…L_{-λk}Ω`` with
all parts >= 2.  Tensor: pairs of component states.

The action engine works in the untruncated module: every vector is a
finite combination of basis states at any level, so nothing is ever cut
off internally.  The truncation window only restricts which states are
tabulated and which results public operations may return.
"""

from __future__ import annotations

import threading
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from math import comb

from .graded import GradedOperator, GradedVector, GramForm, OutOfWindow, TruncationWindow
from .scalar import Scalar, parse_scalar

Vacuum = ()


@lru_cache(maxsize=None)
def partitions(n: int, min_part: int = 1, max_part: int | None = None) -> tuple:
    """Partitions of n into parts in [min_part, max_part], lexicographically decreasing."""
    if max_part is None:
        max_part = n
    if n == 0:
        return ((),)
    out = []
    for first in range(min(n, max_part), min_part - 1, -1):
        for rest in partitions(n - first, min_part, first):
            out.append((first,) + rest)
    return tuple(out)


def gbinom(j: int, p: int) -> int:
    """Binomial coefficient C(j, p) for any integer j and p >= 0."""
    if j >= 0:
        return comb(j, p)
    return (-1) ** p * comb(p - j - 1, p)


@dataclass(frozen=True)
class GeneratorAlgebra:
    """Mode algebra of a single generating field.

    ``heisenberg``: [α_m, α_n] = m δ_{m,-n};  ``virasoro``:
    [L_n, L_m] = (n-m) L_{n+m} + c/12 (n^3-n) δ_{n,-m}.
    """

    kind: str
    c: Fraction = Fraction(0)

    @property
    def name(self) -> str:
        return "alpha" if self.kind == "heisenberg" else "L"

    @property
    def weight(self) -> int:
        return 1 if self.kind == "heisenberg" else 2

    @property
    def min_part(self) -> int:
        return self.weight

    def kills_vacuum(self, k: int) -> bool:
        return k >= 1 - self.weight

    def bracket(self, n: int, m: int):
        """Return ({mode: coeff}, central coeff) for [g_n, g_m]."""
        if self.kind == "heisenberg":
            return {}, (n if n == -m else 0)
        modes = {n + m: n - m} if n != m else {}
        central = self.c * (n ** 3 - n) / 12 if n == -m else 0
        return modes, central


def _scale_into(acc: dict, vec: dict, factor):
    for s, c in vec.items():
        v = acc.get(s, 0) + factor * c
        if v == 0:
            acc.pop(s, None)
        else:
            acc[s] = v


class Model:
    """Common window bookkeeping; subclasses provide the algebra."""

    kind = "abstract"

    def __init__(self, e_max: int):
        self.window = TruncationWindow(e_max)
        self._lock = threading.Lock()
        self._window_basis = []
        self._index = {}
        self._offsets = []
        self._level_of = []
        self._matrices = {}
        self._gram = None

    def _build_index(self):
        for lv in range(self.window.e_max + 1):
            self._offsets.append(len(self._window_basis))
            for s in self.basis(lv):
                self._index[s] = len(self._window_basis)
                self._window_basis.append(s)
                self._level_of.append(lv)
        self._offsets.append(len(self._window_basis))

    # -- window indexing ---------------------------------------------------
    @property
    def dim(self) -> int:
        return len(self._window_basis)

    def dims(self) -> list:
        return [len(self.basis(lv)) for lv in range(self.window.e_max + 1)]

    def index(self, state) -> int:
        try:
            return self._index[state]
        except KeyError:
            raise OutOfWindow(f"state {state!r} is not in the window", self.level(state)) from None

    def state_at(self, i: int):
        return self._window_basis[i]

    def level_of_index(self, i: int) -> int:
        return self._level_of[i]

    def level_slice(self, level: int):
        if not 0 <= level <= self.window.e_max:
            return (0, 0)
        return self._offsets[level], self._offsets[level + 1]

    def window_states(self):
        return list(self._window_basis)

    # -- vectors -----------------------------------------------------------
    def vector(self, entries) -> GradedVector:
        return GradedVector(self, entries)

    @property
    def vacuum_vector(self) -> GradedVector:
        return GradedVector(self, {self.vacuum: 1})

    def sort_key(self, state):
        lv = self.level(state)
        return (lv, self._index.get(state, len(self._window_basis)), repr(state))

    @property
    def gram(self) -> GramForm:
        if self._gram is None:
            self._gram = GramForm(self)
        return self._gram

    # -- linear extensions of the engine -----------------------------------
    def act_vec(self, gen, k, vec: dict) -> dict:
        out = {}
        for s, c in vec.items():
            _scale_into(out, self.act(gen, k, s), c)
        return out

    def field_vec(self, a: dict, n: int, b: dict) -> dict:
        """a_{(n)} b for arbitrary vectors (untruncated)."""
        out = {}
        for sa, ca in a.items():
            for sb, cb in b.items():
                _scale_into(out, self.field(sa, n, sb), ca * cb)
        return out

    def virasoro_vec(self, n: int, vec: dict) -> dict:
        out = {}
        for s, c in vec.items():
            _scale_into(out, self.virasoro_mode(n, s), c)
        return out

    def weight_of(self, state) -> int:
        return self.level(state)

    # -- matrices on the window --------------------------------------------
    def generator_matrix(self, gen: str, k: int) -> GradedOperator:
        """Window matrix of the shifted generator mode g_k (level shift -k)."""
        key = ("gen", gen, k)
        if key not in self._matrices:
            self._matrices[key] = GradedOperator.from_column_map(
                self, lambda s: self.act(gen, k, s), {-k}
            )
        return self._matrices[key]

    def virasoro_matrix(self, n: int) -> GradedOperator:
        key = ("vir", n)
        if key not in self._matrices:
            self._matrices[key] = GradedOperator.from_column_map(
                self, lambda s: self.virasoro_mode(n, s), {-n}
            )
        return self._matrices[key]

    def describe(self) -> dict:
        raise NotImplementedError


class FockModel(Model):
    """Model generated by one field, with PBW words as basis."""

    def __init__(self, algebra: GeneratorAlgebra, e_max: int):
        super().__init__(e_max)
        self.algebra = algebra
        self._act_cache = {}
        self._field_cache = {}
        self._gram_cache = {}
        self._build_index()

    @property
    def kind(self):
        return self.algebra.kind

    @property
    def generators(self):
        return (self.algebra.name,)

    vacuum = Vacuum

    def level(self, state) -> int:
        return sum(state)

    def basis(self, level: int) -> tuple:
        if level < 0:
            return ()
        return partitions(level, self.algebra.min_part)

    def validate_state(self, state):
        if not isinstance(state, tuple) or any(
            not isinstance(p, int) or p < self.algebra.min_part for p in state
        ) or list(state) != sorted(state, reverse=True):
            raise ValueError(f"invalid {self.kind} basis state {state!r}")

    def state_to_json(self, state):
        return list(state)

    def state_from_json(self, obj):
        return tuple(int(x) for x in obj)

    def generator_state(self, gen=None):
        if gen is not None and gen != self.algebra.name:
            raise ValueError(f"{self.kind} model has no generator {gen!r}")
        return (self.algebra.weight,)

    # -- generator action by normal ordering -------------------------------
    def act(self, gen, k: int, word: tuple) -> dict:
        """Shifted generator mode g_k applied to a basis word (untruncated)."""
        if gen is not None and gen != self.algebra.name:
            raise ValueError(f"{self.kind} model has no generator {gen!r}")
        key = (k, word)
        hit = self._act_cache.get(key)
        if hit is not None:
            return hit
        res = self._act(k, word)
        self._act_cache[key] = res
        return res

    def _act(self, k: int, word: tuple) -> dict:
        alg = self.algebra
        name = alg.name
        if not word:
            if alg.kills_vacuum(k):
                return {}
            return {(-k,): 1}
        first, rest = word[0], word[1:]
        if -k >= first:
            return {(-k,) + word: 1}
        # g_k g_{-f} w' = g_{-f} (g_k w') + [g_k, g_{-f}] w'
        out = {}
        inner = self.act(name, k, rest)
        for w2, c2 in inner.items():
            _scale_into(out, self.act(name, -first, w2), c2)
        modes, central = alg.bracket(k, -first)
        for mode, coeff in modes.items():
            _scale_into(out, self.act(name, mode, rest), coeff)
        if central:
            _scale_into(out, {rest: 1}, central)
        return out

    def virasoro_mode(self, n: int, state) -> dict:
        if self.algebra.kind == "virasoro":
            return self.act("L", n, state)
        return self.field(self.conformal_state_word, n + 1, state, scale=Fraction(1, 2))

    # -- state-field correspondence ----------------------------------------
    conformal_state_word = (1, 1)

    def field(self, word: tuple, n: int, b: tuple, scale=1) -> dict:
        """Unshifted mode (word)_{(n)} applied to basis state b (untruncated).

        ``word`` lists generator modes g_{-k1} g_{-k2} … applied to Ω, in any
        order, with every k >= weight.  Recursion: peel the leftmost mode
        g_{-k} = (∂^{(p)} g)_{(-1)} with p = k - weight and expand the
        normal-ordered product.
        """
        key = (word, n, b)
        hit = self._field_cache.get(key)
        if hit is None:
            hit = self._field(word, n, b)
            self._field_cache[key] = hit
        if scale != 1:
            return {s: scale * c for s, c in hit.items()}
        return hit

    def _gen_mode(self, j: int, vec: dict) -> dict:
        """Unshifted generator mode g_{(j)} = g_{j-d+1}."""
        return self.act_vec(self.algebra.name, j - self.algebra.weight + 1, vec)

    def _field(self, word: tuple, n: int, b: tuple) -> dict:
        if not word:
            return {b: 1} if n == -1 else {}
        d = self.algebra.weight
        first, rest = word[0], word[1:]
        p = first - d
        if p < 0:
            raise ValueError(f"word {word!r} contains a mode that annihilates the vacuum")
        lb = sum(b)
        wr = sum(rest)
        out = {}
        # j < 0:  u_{(j)} rest_{(n-j-1)} b, with u_{(j)} = (-1)^p C(j,p) g_{(j-p)}
        for j in range(-1, n - lb - wr - 1, -1):
            inner = self.field(rest, n - j - 1, b)
            if inner:
                coeff = (-1) ** p * gbinom(j, p)
                _scale_into(out, self._gen_mode(j - p, inner), coeff)
        # j >= p:  rest_{(n-j-1)} u_{(j)} b
        for j in range(p, lb + d + p):
            gb = self._gen_mode(j - p, {b: 1})
            if not gb:
                continue
            coeff = (-1) ** p * gbinom(j, p)
            for s, c in gb.items():
                _scale_into(out, self.field(rest, n - j - 1, s), coeff * c)
        return out

    # -- scalar product ----------------------------------------------------
    def gram_entry(self, s: tuple, t: tuple):
        """(s|t) via g_k^+ = g_{-k}: (g_{-f} w | t) = (w | g_f t)."""
        if self.level(s) != self.level(t):
            return 0
        key = (s, t)
        hit = self._gram_cache.get(key)
        if hit is not None:
            return hit
        if not s:
            val = 1 if not t else 0
        else:
            img = self.act(self.algebra.name, s[0], t)
            rest = s[1:]
            val = sum((c * self.gram_entry(rest, w) for w, c in img.items()), Fraction(0))
        self._gram_cache[key] = val
        return val

    def inner_vec(self, u: dict, v: dict):
        total = 0
        for s, a in u.items():
            for t, b in v.items():
                if sum(s) == sum(t):
                    total += (a.conjugate() if hasattr(a, "conjugate") else a) * b * self.gram_entry(s, t)
        return total

    @property
    def central_charge(self) -> Fraction:
        return Fraction(1) if self.kind == "heisenberg" else self.algebra.c

    @property
    def conformal_vector(self) -> GradedVector:
        if self.kind == "heisenberg":
            return GradedVector(self, {(1, 1): Fraction(1, 2)})
        return GradedVector(self, {(2,): 1})

    def describe(self) -> dict:
        d = {"kind": self.kind, "e_max": self.window.e_max}
        if self.kind == "virasoro":
            from .scalar import format_scalar
            d["c"] = format_scalar(self.algebra.c)
        return d


class HeisenbergModel(FockModel):
    def __init__(self, e_max: int):
        super().__init__(GeneratorAlgebra("heisenberg"), e_max)


class VirasoroModel(FockModel):
    def __init__(self, c, e_max: int):
        super().__init__(GeneratorAlgebra("virasoro", _rational_c(c)), e_max)


def _rational_c(c) -> Fraction:
    if isinstance(c, str):
        c = parse_scalar(c)
    if isinstance(c, Scalar):
        if c.im != 0:
            raise ValueError("virasoro model requires a real rational central charge")
        c = c.re
    if isinstance(c, bool) or not isinstance(c, (int, Fraction)):
        raise ValueError(f"virasoro model requires a rational central charge, got {c!r}")
    return Fraction(c)


class TensorModel(Model):
    """V_left ⊗ V_right with factor-wise fields; states are pairs."""

    kind = "tensor"

    def __init__(self, left: Model, right: Model):
        if left.window != right.window:
            raise ValueError("tensor factors must share the truncation window")
        super().__init__(left.window.e_max)
        self.left, self.right = left, right
        self._field_cache = {}
        self._basis_cache = {}
        self._build_index()

    @property
    def vacuum(self):
        return (self.left.vacuum, self.right.vacuum)

    @property
    def generators(self):
        return tuple(f"left:{g}" for g in self.left.generators) + tuple(
            f"right:{g}" for g in self.right.generators
        )

    def level(self, state) -> int:
        return self.left.level(state[0]) + self.right.level(state[1])

    def basis(self, level: int) -> tuple:
        if level < 0:
            return ()
        hit = self._basis_cache.get(level)
        if hit is None:
            hit = tuple(
                (s, t)
                for i in range(level, -1, -1)
                for s in self.left.basis(i)
                for t in self.right.basis(level - i)
            )
            self._basis_cache[level] = hit
        return hit

    def validate_state(self, state):
        if not (isinstance(state, tuple) and len(state) == 2):
            raise ValueError(f"invalid tensor basis state {state!r}")
        self.left.validate_state(state[0])
        self.right.validate_state(state[1])

    def state_to_json(self, state):
        return [self.left.state_to_json(state[0]), self.right.state_to_json(state[1])]

    def state_from_json(self, obj):
        return (self.left.state_from_json(obj[0]), self.right.state_from_json(obj[1]))

    def generator_state(self, gen=None):
        side, name = _split_gen(gen or self.generators[0])
        factor = self.left if side == "left" else self.right
        g = factor.generator_state(name)
        return (g, self.right.vacuum) if side == "left" else (self.left.vacuum, g)

    def act(self, gen, k: int, state) -> dict:
        side, name = _split_gen(gen)
        s, t = state
        if side == "left":
            return {(s2, t): c for s2, c in self.left.act(name, k, s).items()}
        return {(s, t2): c for t2, c in self.right.act(name, k, t).items()}

    def virasoro_mode(self, n: int, state) -> dict:
        s, t = state
        out = {(s2, t): c for s2, c in self.left.virasoro_mode(n, s).items()}
        for t2, c in self.right.virasoro_mode(n, t).items():
            _scale_into(out, {(s, t2): 1}, c)
        return out

    def field(self, a, n: int, b) -> dict:
        """(x⊗y)_{(n)}(u⊗v) = Σ_i x_{(i)}u ⊗ y_{(n-1-i)}v."""
        key = (a, n, b)
        hit = self._field_cache.get(key)
        if hit is not None:
            return hit
        (x, y), (u, v) = a, b
        lx, ly = self.left.level(x), self.right.level(y)
        lu, lv = self.left.level(u), self.right.level(v)
        out = {}
        for i in range(n - lv - ly, lu + lx):
            xu = self.left.field(x, i, u)
            if not xu:
                continue
            yv = self.right.field(y, n - 1 - i, v)
            for s, c1 in xu.items():
                for t, c2 in yv.items():
                    _scale_into(out, {(s, t): 1}, c1 * c2)
        self._field_cache[key] = out
        return out

    def gram_entry(self, s, t):
        return self.left.gram_entry(s[0], t[0]) * self.right.gram_entry(s[1], t[1])

    @property
    def central_charge(self) -> Fraction:
        return self.left.central_charge + self.right.central_charge

    @property
    def conformal_vector(self) -> GradedVector:
        out = {}
        for s, c in self.left.conformal_vector.items():
            out[(s, self.right.vacuum)] = c
        for t, c in self.right.conformal_vector.items():
            out[(self.left.vacuum, t)] = c
        return GradedVector(self, out)

    def describe(self) -> dict:
        return {"kind": "tensor", "e_max": self.window.e_max,
                "left": self.left.describe(), "right": self.right.describe()}


def _split_gen(gen: str):
    side, sep, name = (gen or "").partition(":")
    if not sep or side not in ("left", "right"):
        raise ValueError(f"tensor generator must be 'left:<name>' or 'right:<name>', got {gen!r}")
    return side, name


@dataclass(frozen=True)
class ModelSpec:
    kind: str
    e_max: int
    c: object = None
    left: "ModelSpec | None" = None
    right: "ModelSpec | None" = None


def build_model(spec: ModelSpec) -> Model:
    """Construct a model (basis per level up to e_max, lazy mode matrices, Gram form)."""
    if spec.kind == "heisenberg":
        return HeisenbergModel(spec.e_max)
    if spec.kind == "virasoro":
        if spec.c is None:
            raise ValueError("virasoro model requires a central charge c")
        return VirasoroModel(spec.c, spec.e_max)
    if spec.kind == "tensor":
        if spec.left is None or spec.right is None:
            raise ValueError("tensor model requires left and right sub-specs")
        for side in (spec.left, spec.right):
            if side.e_max != spec.e_max:
                raise ValueError("tensor window must equal the component windows")
        return TensorModel(build_model(spec.left), build_model(spec.right))
    raise ValueError(f"unknown model kind {spec.kind!r}")


def apply_generator_mode(model: Model, k: int, b: GradedVector, generator: str | None = None) -> GradedVector:
    """Apply the shifted generator mode g_k to a window vector, exactly."""
    if b.model is not model:
        raise TypeError("vector belongs to another model")
    gen = generator if generator is not None else model.generators[0]
    e_max = model.window.e_max
    for lv in b.levels():
        if lv > e_max:
            raise OutOfWindow(f"input level {lv} exceeds the window", lv)
    top = b.max_level() - k
    if b.items() and top > e_max:
        raise OutOfWindow(f"g_{k} maps level {b.max_level()} to {top}", top)
    return GradedVector(model, model.act_vec(gen, k, b.entries))


def tensor_lift(x: GradedOperator, tensor: TensorModel, side: str = "left") -> GradedOperator:
    """x ⊗ 1 (or 1 ⊗ x) on the tensor window."""
    factor = tensor.left if side == "left" else tensor.right
    if x.model is not factor:
        raise ValueError("operator does not act on that tensor factor")
    if factor.window != tensor.window:
        raise ValueError("window mismatch")
    e_max = tensor.window.e_max
    other = tensor.right if side == "left" else tensor.left
    dom = []
    for L in range(e_max + 1):
        ok = True
        for i in range(L + 1):
            if factor.basis(i) and other.basis(L - i) and i not in x.domain:
                ok = False
        if ok and all(L + d <= e_max for d in x.shifts):
            dom.append(L)
    cols = {}
    for L in dom:
        for st in tensor.basis(L):
            s, t = st if side == "left" else (st[1], st[0])
            col = x.cols.get(factor.index(s), {})
            out = {}
            for i, v in col.items():
                s2 = factor.state_at(i)
                out[tensor.index((s2, t) if side == "left" else (t, s2))] = v
            if out:
                cols[tensor.index(st)] = out
    return GradedOperator(tensor, cols, x.shifts, dom)
