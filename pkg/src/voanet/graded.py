"""Graded vectors and window-truncated graded operators.

A :class:`GradedOperator` stores the columns of a truncated map over the
global window basis of its model (levels ``0..e_max`` concatenated in the
model's basis order).  ``domain`` records the source levels on which the
stored columns are the *exact* images; on other source levels an image
would have left the window, so those columns are absent.  Every
composition, sum and adjoint propagates the domain, so identities checked
on the domain never involve silently truncated data.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Mapping

import numpy as np

from .linalg import abs2, exact_inverse, ldl_definiteness, spectral_norm, sqrt_upper
from .scalar import conj, format_scalar, is_exact


class OutOfWindow(Exception):
    """Raised when an exact result needs levels above the truncation window."""

    def __init__(self, message: str, required_e_max: int):
        super().__init__(f"{message} (requires e_max >= {required_e_max})")
        self.required_e_max = required_e_max


class SingularGram(ValueError):
    """A Gram block is singular, so adjoints are not defined on that level."""

    def __init__(self, level: int, kernel):
        super().__init__(f"Gram form is singular at level {level} (kernel dimension {len(kernel)})")
        self.level = level
        self.kernel = kernel


class IndefiniteGram(ValueError):
    """The Gram form has a negative direction, so there is no Hilbert-space norm."""

    def __init__(self, level: int):
        super().__init__(f"Gram form is indefinite at level {level}; no Hilbert-space norm")
        self.level = level


@dataclass(frozen=True)
class TruncationWindow:
    e_max: int

    def __post_init__(self):
        if not isinstance(self.e_max, int) or self.e_max < 0:
            raise ValueError(f"e_max must be a non-negative integer, got {self.e_max!r}")

    def __contains__(self, level: int) -> bool:
        return 0 <= level <= self.e_max


def _add_into(acc: dict, key, value):
    v = acc.get(key, 0) + value
    if v == 0:
        acc.pop(key, None)
    else:
        acc[key] = v


def vec_add(u: Mapping, v: Mapping, scale=1) -> dict:
    out = dict(u)
    for k, x in v.items():
        _add_into(out, k, scale * x)
    return out


class GradedVector:
    """Finite combination of basis states of a model.

    Entries are keyed by basis-state id (a partition, or a pair of
    partitions for tensor models); the level of each state is derived from
    the model.
    """

    __slots__ = ("model", "_entries")

    def __init__(self, model, entries: Mapping):
        clean = {}
        for state, coeff in entries.items():
            if coeff != 0:
                model.validate_state(state)
                clean[state] = coeff
        self.model = model
        self._entries = clean

    @property
    def entries(self) -> dict:
        return dict(self._entries)

    def items(self):
        return self._entries.items()

    def __getitem__(self, state):
        return self._entries.get(state, 0)

    def __len__(self):
        return len(self._entries)

    def __iter__(self):
        return iter(self._entries)

    def levels(self) -> set:
        return {self.model.level(s) for s in self._entries}

    def max_level(self) -> int:
        return max(self.levels(), default=-1)

    def is_zero(self) -> bool:
        return not self._entries

    def is_homogeneous(self) -> bool:
        return len(self.levels()) <= 1

    @property
    def weight(self):
        """Conformal weight if homogeneous and nonzero, else None."""
        lv = self.levels()
        return next(iter(lv)) if len(lv) == 1 else None

    def component(self, level: int) -> "GradedVector":
        return GradedVector(
            self.model, {s: c for s, c in self._entries.items() if self.model.level(s) == level}
        )

    def components(self) -> dict:
        return {lv: self.component(lv) for lv in sorted(self.levels())}

    def _check(self, other):
        if not isinstance(other, GradedVector) or other.model is not self.model:
            raise TypeError("vectors belong to different models")

    def __add__(self, other):
        self._check(other)
        return GradedVector(self.model, vec_add(self._entries, other._entries))

    def __sub__(self, other):
        self._check(other)
        return GradedVector(self.model, vec_add(self._entries, other._entries, -1))

    def __neg__(self):
        return GradedVector(self.model, {s: -c for s, c in self._entries.items()})

    def __mul__(self, scalar):
        return GradedVector(self.model, {s: scalar * c for s, c in self._entries.items()})

    __rmul__ = __mul__

    def __eq__(self, other):
        if not isinstance(other, GradedVector):
            return NotImplemented
        return self.model is other.model and self._entries == other._entries

    def __hash__(self):
        return hash(frozenset(self._entries.items()))

    def __repr__(self):
        if not self._entries:
            return "0"
        terms = [f"({format_scalar(c) if is_exact(c) else c})*{s!r}" for s, c in self._entries.items()]
        return " + ".join(terms)

    def to_json(self):
        return [
            {"state": self.model.state_to_json(s), "level": self.model.level(s),
             "coeff": format_scalar(c) if is_exact(c) else complex(c).real}
            for s, c in sorted(self._entries.items(), key=lambda sc: self.model.sort_key(sc[0]))
        ]


class GradedOperator:
    """Sparse map on the window of a model, stored by columns.

    ``cols[j]`` is ``{i: value}`` for global window indices.  ``shifts`` is
    the set of level shifts the operator may have (one element for a
    homogeneous operator), ``domain`` the source levels with exact columns.
    """

    __slots__ = ("model", "cols", "shifts", "domain")

    def __init__(self, model, cols: Mapping, shifts, domain):
        self.model = model
        self.shifts = frozenset(shifts)
        self.domain = frozenset(domain)
        lev = model.level_of_index
        self.cols = {
            j: dict(col) for j, col in cols.items() if col and lev(j) in self.domain
        }

    # -- construction ------------------------------------------------------
    @classmethod
    def from_column_map(cls, model, func, shifts, domain=None):
        """Build from ``func(state) -> {state: coeff}`` on every basis state of the domain."""
        e_max = model.window.e_max
        shifts = frozenset(shifts)
        if domain is None:
            domain = [m for m in range(e_max + 1) if all(m + d <= e_max for d in shifts)]
        cols = {}
        for m in domain:
            for state in model.basis(m):
                image = func(state)
                col = {}
                for t, c in image.items():
                    if c == 0:
                        continue
                    lv = model.level(t)
                    if lv > e_max:
                        raise OutOfWindow(f"image of {state!r} reaches level {lv}", lv)
                    col[model.index(t)] = c
                if col:
                    cols[model.index(state)] = col
        return cls(model, cols, shifts, domain)

    @classmethod
    def identity(cls, model):
        return cls(model, {j: {j: 1} for j in range(model.dim)}, {0}, range(model.window.e_max + 1))

    @classmethod
    def zero(cls, model, shift=0):
        return cls(model, {}, {shift}, range(model.window.e_max + 1))

    # -- metadata ----------------------------------------------------------
    @property
    def shift(self):
        """The level shift of a homogeneous operator (None if several)."""
        return next(iter(self.shifts)) if len(self.shifts) == 1 else None

    def is_zero(self) -> bool:
        return not self.cols

    def _check(self, other):
        if not isinstance(other, GradedOperator) or other.model is not self.model:
            raise TypeError("operators act on different windows")

    # -- algebra -----------------------------------------------------------
    def __add__(self, other):
        self._check(other)
        dom = self.domain & other.domain
        cols = {j: dict(c) for j, c in self.cols.items()}
        for j, col in other.cols.items():
            acc = cols.setdefault(j, {})
            for i, v in col.items():
                _add_into(acc, i, v)
        return GradedOperator(self.model, cols, self.shifts | other.shifts, dom)

    def __neg__(self):
        return self * -1

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, scalar):
        if isinstance(scalar, GradedOperator):
            return NotImplemented
        if scalar == 0:
            return GradedOperator(self.model, {}, self.shifts, self.domain)
        cols = {j: {i: scalar * v for i, v in c.items()} for j, c in self.cols.items()}
        return GradedOperator(self.model, cols, self.shifts, self.domain)

    __rmul__ = __mul__

    def __matmul__(self, other):
        """Composition ``self ∘ other``; exact on the propagated domain."""
        self._check(other)
        e_max = self.model.window.e_max
        dom = {
            m for m in other.domain
            if all(m + d < 0 or (m + d <= e_max and m + d in self.domain) for d in other.shifts)
        }
        lev = self.model.level_of_index
        cols = {}
        for j, col in other.cols.items():
            if lev(j) not in dom:
                continue
            acc = {}
            for k, v in col.items():
                for i, w in self.cols.get(k, {}).items():
                    _add_into(acc, i, w * v)
            if acc:
                cols[j] = acc
        shifts = {a + b for a in self.shifts for b in other.shifts}
        return GradedOperator(self.model, cols, shifts, dom)

    def commutator(self, other):
        return self @ other - other @ self

    def apply(self, v: GradedVector) -> GradedVector:
        out = {}
        for s, c in v.items():
            lv = self.model.level(s)
            if lv not in self.domain:
                raise OutOfWindow(f"level {lv} is outside the operator's exact domain",
                                  lv + max(self.shifts, default=0))
            for i, w in self.cols.get(self.model.index(s), {}).items():
                _add_into(out, self.model.state_at(i), w * c)
        return GradedVector(self.model, out)

    def restrict(self, levels):
        return GradedOperator(self.model, self.cols, self.shifts, self.domain & frozenset(levels))

    def equals_on_domain(self, other) -> bool:
        return not self.difference_witness(other)

    def difference_witness(self, other):
        """First basis state (in window order) on the common domain where the two differ."""
        diff = self - other
        if not diff.cols:
            return None
        j = min(diff.cols)
        return self.model.state_at(j), {
            self.model.state_at(i): v for i, v in sorted(diff.cols[j].items())
        }

    # -- blocks and the float bridge ---------------------------------------
    def block(self, target_level: int, source_level: int):
        """Dense exact block V_source -> V_target as a list of rows."""
        t0, t1 = self.model.level_slice(target_level)
        s0, s1 = self.model.level_slice(source_level)
        rows = [[0] * (s1 - s0) for _ in range(t1 - t0)]
        for j in range(s0, s1):
            for i, v in self.cols.get(j, {}).items():
                if t0 <= i < t1:
                    rows[i - t0][j - s0] = v
        return rows

    def block_pairs(self):
        """(target, source) level pairs with possibly nonzero blocks inside the domain."""
        e_max = self.model.window.e_max
        return sorted(
            (m + d, m) for m in self.domain for d in self.shifts if 0 <= m + d <= e_max
        )

    def to_dense(self) -> np.ndarray:
        n = self.model.dim
        out = np.zeros((n, n), dtype=complex)
        for j, col in self.cols.items():
            for i, v in col.items():
                out[i, j] = complex(v)
        return out

    def adjoint(self, gram: "GramForm") -> "GradedOperator":
        """Adjoint with respect to ``gram``: block (s<-t) is G_s^{-1} X(t<-s)^* G_t."""
        model = self.model
        e_max = model.window.e_max
        dom = {
            t for t in range(e_max + 1)
            if all(t - d < 0 or (t - d <= e_max and t - d in self.domain) for d in self.shifts)
        }
        cols = {}
        for t, s in ((t, s) for t in dom for s in sorted({t - d for d in self.shifts})):
            if s < 0:
                continue
            x = self.block(t, s)
            if not x or not x[0] or all(v == 0 for row in x for v in row):
                continue
            g_inv = gram.inverse(s)
            g_t = gram.block(t)
            nt, ns = len(x), len(x[0])
            # y = X^* G_t  (ns x nt)
            y = [[sum((conj(x[k][a]) * g_t[k][b] for k in range(nt)), 0) for b in range(nt)]
                 for a in range(ns)]
            z = [[sum((g_inv[a][k] * y[k][b] for k in range(ns)), 0) for b in range(nt)]
                 for a in range(ns)]
            s0, _ = model.level_slice(s)
            t0, _ = model.level_slice(t)
            for b in range(nt):
                col = cols.setdefault(t0 + b, {})
                for a in range(ns):
                    if z[a][b] != 0:
                        col[s0 + a] = z[a][b]
        return GradedOperator(model, cols, {-d for d in self.shifts}, dom)

    def to_json(self):
        model = self.model
        entries = []
        for j in sorted(self.cols):
            for i in sorted(self.cols[j]):
                v = self.cols[j][i]
                entries.append([i, j, format_scalar(v) if is_exact(v) else complex(v).real])
        return {
            "shifts": sorted(self.shifts),
            "domain": sorted(self.domain),
            "dim": model.dim,
            "entries": entries,
        }


class GramForm:
    """Exact per-level Gram matrices of the model's scalar product."""

    def __init__(self, model):
        self.model = model
        self._blocks = {}
        self._inverses = {}
        self._factors = {}

    def block(self, level: int):
        if level not in self._blocks:
            states = self.model.basis(level)
            g = self.model.gram_entry
            self._blocks[level] = [[g(s, t) for t in states] for s in states]
        return self._blocks[level]

    def inverse(self, level: int):
        if level not in self._inverses:
            blk = self.block(level)
            res = ldl_definiteness(blk)
            if res.zero:
                raise SingularGram(level, res.kernel)
            self._inverses[level] = exact_inverse(blk)
        return self._inverses[level]

    def inner(self, u: GradedVector, v: GradedVector):
        """(u|v), conjugate-linear in u."""
        total = 0
        g = self.model.gram_entry
        for s, a in u.items():
            ls = self.model.level(s)
            for t, b in v.items():
                if self.model.level(t) == ls:
                    total += conj(a) * b * g(s, t)
        return total

    def cholesky(self, level: int) -> np.ndarray:
        """Upper-triangular R with G = R^* R (float), for orthonormal coordinates."""
        blk = self.block(level)
        if not blk:
            return np.zeros((0, 0))
        g = np.array([[complex(x) for x in row] for row in blk])
        return np.linalg.cholesky(g).conj().T

    def factor(self, level: int) -> np.ndarray:
        """R with G = R^* R and rank(G) rows: orthonormal coordinates on the
        quotient by the null vectors.  The rank comes from the exact LDL.

        Raises IndefiniteGram when the form is indefinite on this level, since
        there is no Hilbert-space norm to speak of.
        """
        if level in self._factors:
            return self._factors[level]
        blk = self.block(level)
        if not blk:
            r = np.zeros((0, 0))
        else:
            res = ldl_definiteness(blk)
            if res.negative:
                raise IndefiniteGram(level)
            g = np.array([[complex(x) for x in row] for row in blk])
            if not res.zero:
                r = np.linalg.cholesky(g).conj().T
            else:
                w, u = np.linalg.eigh(g)
                top = np.argsort(w)[::-1][: res.positive]
                r = (u[:, top] * np.sqrt(w[top])).conj().T
        self._factors[level] = r
        return r


def operator_norm(x: GradedOperator, mode: str = "float", gram: GramForm | None = None):
    """Norm of a window operator restricted to its exact domain.

    ``mode="float"``: spectral norm; per (target, source) block and maximised
    over blocks for a homogeneous operator, on the whole domain otherwise.
    With ``gram`` the norm is taken in orthonormal coordinates of the
    scalar product.  ``mode="exact-bound"``: rational upper bound from the
    Frobenius norm of the coordinate matrix.
    """
    if mode == "exact-bound":
        if gram is not None:
            raise ValueError("exact-bound mode uses coordinate norms only")
        total = sum((abs2(v) for col in x.cols.values() for v in col.values()), Fraction(0))
        return sqrt_upper(total)
    if mode != "float":
        raise ValueError(f"unknown norm mode {mode!r}")
    if not x.cols:
        return 0.0
    model = x.model

    def _ortho(level):
        return gram.factor(level) if gram is not None else None

    if x.shift is not None:
        best = 0.0
        for t, s in x.block_pairs():
            blk = x.block(t, s)
            if not blk or not blk[0]:
                continue
            m = np.array([[complex(v) for v in row] for row in blk])
            if gram is not None:
                m = _ortho(t) @ m @ np.linalg.pinv(_ortho(s))
            best = max(best, spectral_norm(m))
        return best
    dense = x.to_dense()
    keep = [j for j in range(model.dim) if model.level_of_index(j) in x.domain]
    dense = dense[:, keep]
    if gram is not None:
        blocks = [_ortho(lv) for lv in range(model.window.e_max + 1)]
        r = _block_diag(blocks)
        r_src = _block_diag([b for lv, b in enumerate(blocks) if lv in x.domain])
        dense = r @ dense @ np.linalg.pinv(r_src)
    return spectral_norm(dense)


def _block_diag(blocks) -> np.ndarray:
    rows = sum(b.shape[0] for b in blocks)
    cols = sum(b.shape[1] for b in blocks)
    out = np.zeros((rows, cols), dtype=complex)
    i = j = 0
    for b in blocks:
        out[i:i + b.shape[0], j:j + b.shape[1]] = b
        i, j = i + b.shape[0], j + b.shape[1]
    return out
