"""Circle arcs, test functions, smeared fields and energy bounds.

Conventions: f(θ) = Σ_n f̂_n e^{inθ}, so f̂_n = (1/2π) ∫ f(θ) e^{-inθ} dθ, and
the smeared field is Y(a,f) = Σ_n f̂_n a_n with shifted modes a_n.  Arc
endpoints are stored in units of π.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .fields import reconstruct_field
from .graded import GradedOperator, GradedVector
from .models import Model, ModelSpec, build_model
from .scalar import format_scalar, is_exact


# -- arcs --------------------------------------------------------------------

def _mod2(x):
    return x % 2


@dataclass(frozen=True)
class Arc:
    """Open counterclockwise arc from start·π to end·π."""

    start: Fraction
    end: Fraction

    def __post_init__(self):
        s, e = self.start, self.end
        if not isinstance(s, (int, Fraction)) or not isinstance(e, (int, Fraction)):
            s, e = float(s), float(e)
        else:
            s, e = Fraction(s), Fraction(e)
        object.__setattr__(self, "start", _mod2(s))
        object.__setattr__(self, "end", e)
        if self.length == 0:
            raise ValueError("an arc needs end != start (mod 2π)")

    @property
    def length(self):
        """Length in units of π, in (0, 2)."""
        return _mod2(self.end - self.start)

    def _rel(self, x):
        return _mod2(x - self.start)

    def contains_point(self, theta_over_pi) -> bool:
        r = self._rel(theta_over_pi)
        return 0 < r < self.length

    def disjoint(self, other: "Arc") -> bool:
        d = self._rel(other.start)
        return d >= self.length and d + other.length <= 2

    def contains(self, other: "Arc") -> bool:
        """other ⊆ self."""
        d = self._rel(other.start)
        return d + other.length <= self.length

    def radians(self):
        return float(self.start) * np.pi, float(self.start + self.length) * np.pi

    def to_json(self):
        def f(x):
            return format_scalar(x) if isinstance(x, Fraction) else float(x)
        return {"start_over_pi": f(self.start), "end_over_pi": f(_mod2(self.end)),
                "length_over_pi": f(self.length)}

    @classmethod
    def parse(cls, start, end):
        """Angles given as multiples of π: numbers or strings like '3/2'."""
        def conv(x):
            if isinstance(x, str):
                return Fraction(x.strip())
            return x
        return cls(conv(start), conv(end))


def arcs_cover_circle(arcs) -> bool:
    """Exact check that the union of open arcs is the whole circle."""
    points = sorted({a.start for a in arcs} | {_mod2(a.start + a.length) for a in arcs})
    probes = list(points)
    for i, p in enumerate(points):
        q = points[(i + 1) % len(points)] + (2 if i + 1 == len(points) else 0)
        probes.append(_mod2((p + q) / 2))
    return all(any(a.contains_point(x) for a in arcs) for x in probes)


# -- test functions -------------------------------------------------------------

class TestFunction:
    exact = False

    def fourier_coefficients(self, cutoff: int) -> dict:
        raise NotImplementedError


@dataclass(frozen=True)
class TrigPoly(TestFunction):
    """Trigonometric polynomial with exact coefficients {n: f̂_n}."""

    coeffs: dict
    exact = True

    def __post_init__(self):
        for n, c in self.coeffs.items():
            if not isinstance(n, int) or not is_exact(c):
                raise TypeError("trig-poly coefficients must be exact and keyed by int")

    def fourier_coefficients(self, cutoff: int) -> dict:
        return {n: self.coeffs.get(n, 0) for n in range(-cutoff, cutoff + 1)}

    def __call__(self, theta):
        return sum(complex(c) * np.exp(1j * n * theta) for n, c in self.coeffs.items())

    def __add__(self, other):
        out = dict(self.coeffs)
        for n, c in other.coeffs.items():
            out[n] = out.get(n, 0) + c
        return TrigPoly({n: c for n, c in out.items() if c != 0})


@dataclass(frozen=True)
class Bump(TestFunction):
    """exp(-1/(1-x^2)) rescaled to a closed portion of an arc.

    The profile occupies the fractions [lo, hi] of the arc (0 < lo < hi < 1),
    so its support is compact inside the open arc.  Coefficients come from
    a DFT on 2**samples_log2 equispaced points.
    """

    arc: Arc
    lo: Fraction = Fraction(1, 16)
    hi: Fraction = Fraction(15, 16)
    samples_log2: int = 9
    amplitude: float = 1.0

    def __post_init__(self):
        if not 0 < self.lo < self.hi < 1:
            raise ValueError("bump portion must satisfy 0 < lo < hi < 1")

    @property
    def support(self) -> Arc:
        length = self.arc.length
        return Arc(self.arc.start + length * self.lo, self.arc.start + length * self.hi)

    def __call__(self, theta):
        theta = np.asarray(theta, dtype=float)
        sup = self.support
        start = float(sup.start) * np.pi
        width = float(sup.length) * np.pi
        rel = np.mod(theta - start, 2 * np.pi)
        x = 2 * rel / width - 1
        out = np.zeros_like(x)
        inside = np.abs(x) < 1
        out[inside] = self.amplitude * np.exp(-1.0 / (1.0 - x[inside] ** 2))
        return out

    def _dft(self, samples: int) -> np.ndarray:
        theta = 2 * np.pi * np.arange(samples) / samples
        return np.fft.fft(self(theta)) / samples

    def fourier_coefficients(self, cutoff: int) -> dict:
        samples = 1 << self.samples_log2
        if samples < 4 * cutoff:
            raise ValueError(
                f"undersampled: {samples} samples cannot resolve cutoff {cutoff} (need >= {4 * cutoff})"
            )
        c = self._dft(samples)
        return {n: complex(c[n % samples]) for n in range(-cutoff, cutoff + 1)}

    def aliasing_estimate(self, cutoff: int) -> float:
        """max_{|n|<=F} |DFT_S(n) - DFT_{4S}(n)|, a computable proxy of Σ_{j≠0} |f̂_{n+jS}|."""
        s = 1 << self.samples_log2
        a, b = self._dft(s), self._dft(4 * s)
        return float(max(abs(a[n % s] - b[n % (4 * s)]) for n in range(-cutoff, cutoff + 1)))


def standard_bump_pair(arc1: Arc, arc2: Arc, samples_log2: int = 9):
    """Reference pair for decay experiments: a centred bump on arc1 and an
    off-centre bump on arc2.

    Two centred symmetric bumps on antipodal arcs give a Heisenberg pairing
    Σ m f̂_m ĝ_{-m} that vanishes identically at every cutoff, so the second
    bump is shifted towards the start of its arc.
    """
    return (Bump(arc1, samples_log2=samples_log2),
            Bump(arc2, Fraction(1, 8), Fraction(5, 8), samples_log2=samples_log2))


def fourier_coefficients(f: TestFunction, cutoff: int) -> dict:
    """{n: f̂_n} for |n| <= cutoff (exact copy for trig-polys, DFT for bumps)."""
    return f.fourier_coefficients(cutoff)


# -- orthonormal coordinates -----------------------------------------------------

def orthonormal_transform(model: Model) -> np.ndarray:
    """Block-diagonal R with G = R^* R, so operators become R X R^+.

    R is square when the Gram form is positive-definite on the window;
    null vectors are dropped otherwise (R has rank(G) rows) and R^+ is the
    pseudo-inverse, which is exact on the quotient because modes preserve
    the null space.
    """
    r = np.zeros((0, model.dim), dtype=complex)
    rows = []
    for lv in range(model.window.e_max + 1):
        a, b = model.level_slice(lv)
        f = model.gram.factor(lv)
        blk = np.zeros((f.shape[0], model.dim), dtype=complex)
        blk[:, a:b] = f
        rows.append(blk)
    return np.vstack(rows) if rows else r


def to_orthonormal(model: Model, x: np.ndarray, r: np.ndarray | None = None) -> np.ndarray:
    """R X R^+ for a dense window matrix X."""
    r = orthonormal_transform(model) if r is None else r
    return r @ x @ np.linalg.pinv(r)


def projected_shifted_mode(model: Model, a: GradedVector, n: int) -> np.ndarray:
    """P a_n P in window coordinates: images above e_max are dropped."""
    out = np.zeros((model.dim, model.dim), dtype=complex)
    e_max = model.window.e_max
    for d, comp in a.components().items():
        ent = comp.entries
        for j, s in enumerate(model.window_states()):
            for t, c in model.field_vec(ent, n + d - 1, {s: 1}).items():
                if model.level(t) <= e_max:
                    out[model.index(t), j] += complex(c)
    return out


# -- smearing ---------------------------------------------------------------------

@dataclass
class SmearedOperator:
    """Σ_{|n|<=F} f̂_n a_n on the window.

    ``exact`` is the sum restricted to the source levels where every term is
    exact (exact entries for trig-polys); ``projected`` is the dense window
    matrix P Y(a,f) P in window coordinates, used for algebra generation.
    """

    state: GradedVector
    function: TestFunction
    cutoff: int
    coefficients: dict
    exact: GradedOperator
    projected: np.ndarray = field(repr=False)

    @property
    def exact_domain(self):
        return sorted(self.exact.domain)

    def orthonormal(self) -> np.ndarray:
        return to_orthonormal(self.state.model, self.projected)


def smear(model: Model, a: GradedVector, f: TestFunction, cutoff: int) -> SmearedOperator:
    coeffs = fourier_coefficients(f, cutoff)
    table = reconstruct_field(model, a)
    exact = None
    projected = np.zeros((model.dim, model.dim), dtype=complex)
    for n, c in sorted(coeffs.items()):
        if c == 0:
            continue
        mode = table.shifted_mode(n)
        exact = mode * c if exact is None else exact + mode * c
        projected += complex(c) * projected_shifted_mode(model, a, n)
    if exact is None:
        exact = GradedOperator.zero(model)
    return SmearedOperator(a, f, cutoff, coeffs, exact, projected)


def smeared_apply(model: Model, a: GradedVector, coeffs: dict, vec: dict) -> dict:
    """Y(a,f) v in the untruncated module (float or exact coefficients)."""
    out = {}
    for d, comp in a.components().items():
        ent = comp.entries
        for n, c in coeffs.items():
            if c == 0:
                continue
            for s, x in model.field_vec(ent, n + d - 1, vec).items():
                v = out.get(s, 0) + c * x
                out[s] = v
    return {s: v for s, v in out.items() if v != 0}


def heisenberg_pairing(f_coeffs: dict, g_coeffs: dict, cutoff: int) -> complex:
    """Σ_{|m|<=F} m f̂_m ĝ_{-m}, the c-number [Y(α,f), Y(α,g)] at cutoff F."""
    return sum(m * complex(f_coeffs.get(m, 0)) * complex(g_coeffs.get(-m, 0))
               for m in range(-cutoff, cutoff + 1))


def _module_gram(model: Model, vecs: list) -> np.ndarray:
    k = len(vecs)
    out = np.zeros((k, k), dtype=complex)
    for i in range(k):
        for j in range(i, k):
            total = 0j
            for s, x in vecs[i].items():
                ls = model.level(s)
                for t, y in vecs[j].items():
                    if model.level(t) == ls:
                        g = model.gram_entry(s, t)
                        if g:
                            total += np.conj(complex(x)) * complex(y) * float(g)
            out[i, j] = total
            out[j, i] = np.conj(total)
    return out


def untruncated_norm(model: Model, images: list) -> float:
    """Norm of the map window -> module sending basis state i to images[i]."""
    k = _module_gram(model, images)
    # W = R^+ whitens the window Gram form: W^* G W = 1 on the quotient
    w = np.linalg.pinv(orthonormal_transform(model))
    vals = np.linalg.eigvalsh(w.conj().T @ k @ w)
    return float(np.sqrt(max(vals.max(), 0.0))) if vals.size else 0.0


def commutator_untruncated(model, a, fa, b, gb):
    """Images of window basis states under [Y(a,f), Y(b,g)], computed without truncation."""
    images = []
    for s in model.window_states():
        v = {s: 1}
        x = smeared_apply(model, a, fa, smeared_apply(model, b, gb, v))
        y = smeared_apply(model, b, gb, smeared_apply(model, a, fa, v))
        for t, c in y.items():
            x[t] = x.get(t, 0) - c
        images.append({t: c for t, c in x.items() if abs(complex(c)) > 0})
    return images


@dataclass
class DecayRow:
    cutoff: int
    e_max: int
    norm: float
    norm_projected: float
    pairing: complex | None = None

    def to_json(self):
        d = {"F": self.cutoff, "e_max": self.e_max, "norm": self.norm,
             "norm_projected": self.norm_projected}
        if self.pairing is not None:
            d["pairing_re"] = self.pairing.real
            d["pairing_im"] = self.pairing.imag
        return d


def commutator_decay(model: Model, a: GradedVector, b: GradedVector, arc1: Arc, arc2: Arc,
                     f: TestFunction | None = None, g: TestFunction | None = None,
                     cutoffs=(8, 16, 32), untruncated: bool = True) -> list:
    """Commutator norms of fields smeared in two disjoint arcs, per Fourier cutoff.

    ``norm`` is the norm of [Y(a,f), Y(b,g)] on window states with products
    formed in the untruncated module (``untruncated=False`` falls back to the
    projected norm); ``norm_projected`` uses window-projected matrices.  For
    a = b = the Heisenberg generator the c-number pairing is also reported.
    """
    if not arc1.disjoint(arc2):
        raise ValueError("commutator_decay needs disjoint arcs")
    if f is None or g is None:
        f0, g0 = standard_bump_pair(arc1, arc2)
        f = f if f is not None else f0
        g = g if g is not None else g0
    r = orthonormal_transform(model)
    r_inv = np.linalg.pinv(r)
    heis_gen = (
        model.kind == "heisenberg"
        and a.entries == {(1,): 1} and b.entries == {(1,): 1}
    )
    rows = []
    for F in cutoffs:
        fc, gc = fourier_coefficients(f, F), fourier_coefficients(g, F)
        sa, sb = smear(model, a, f, F), smear(model, b, g, F)
        pa, pb = r @ sa.projected @ r_inv, r @ sb.projected @ r_inv
        proj = float(np.linalg.norm(pa @ pb - pb @ pa, 2)) if model.dim else 0.0
        if untruncated and not (a.is_zero() or b.is_zero()):
            norm = untruncated_norm(model, commutator_untruncated(model, a, fc, b, gc))
        elif untruncated:
            norm = 0.0
        else:
            norm = proj
        pairing = heisenberg_pairing(fc, gc, F) if heis_gen else None
        rows.append(DecayRow(F, model.window.e_max, norm, proj, pairing))
    return rows


# -- energy bounds -------------------------------------------------------------

@dataclass
class EnergyBoundReport:
    s: int
    k: int
    index_range: tuple
    rows: list  # (e_max, n, ratio, scaled)
    m_est: dict  # e_max -> M_est

    def to_json(self):
        return {
            "s": self.s, "k": self.k, "index_range": list(self.index_range),
            "M_est": {str(e): v for e, v in sorted(self.m_est.items())},
            "rows": [{"e_max": e, "n": n, "ratio": r, "scaled": sc} for e, n, r, sc in self.rows],
        }


def rebuild(model: Model, e_max: int) -> Model:
    """Same model kind and parameters on another window."""

    def spec_of(desc):
        if desc["kind"] == "tensor":
            return ModelSpec("tensor", e_max, left=spec_of(desc["left"]), right=spec_of(desc["right"]))
        return ModelSpec(desc["kind"], e_max, c=desc.get("c"))

    return build_model(spec_of(model.describe()))


def energy_bound_estimate(model: Model, a: GradedVector, s: int, k: int, index_range=6,
                          windows=(4, 6, 8)) -> EnergyBoundReport:
    """M_est = max_n ‖a_n (L_0+1)^{-k}‖ / (|n|+1)^s, per window.

    Norms are taken in orthonormal coordinates of the Gram form, on the
    source levels where a_n is exact, one source level at a time (images
    of distinct source levels are orthogonal) and maximised.
    """
    lo, hi = (-index_range, index_range) if isinstance(index_range, int) else index_range
    rows, m_est = [], {}
    for e in windows:
        m = model if model.window.e_max == e else rebuild(model, e)
        vec = GradedVector(m, {st: c for st, c in a.items()})
        best = 0.0
        if not vec.is_zero():
            table = reconstruct_field(m, vec)
            chol = {lv: m.gram.factor(lv) for lv in range(e + 1)}
            for n in range(lo, hi + 1):
                op = table.shifted_mode(n)
                dense = op.to_dense()
                ratio = 0.0
                for src in sorted(op.domain):
                    s0, s1 = m.level_slice(src)
                    if s1 == s0:
                        continue
                    blocks = []
                    for lv in sorted({src + d for d in op.shifts if 0 <= src + d <= e}):
                        t0, t1 = m.level_slice(lv)
                        if t1 > t0:
                            blocks.append(chol[lv] @ dense[t0:t1, s0:s1])
                    if not blocks:
                        continue
                    x = np.vstack(blocks) @ np.linalg.pinv(chol[src]) / float(src + 1) ** k
                    ratio = max(ratio, float(np.linalg.svd(x, compute_uv=False)[0]))
                scaled = ratio / float(abs(n) + 1) ** s
                rows.append((e, n, ratio, scaled))
                best = max(best, scaled)
        else:
            rows.extend((e, n, 0.0, 0.0) for n in range(lo, hi + 1))
        m_est[e] = best
    return EnergyBoundReport(s, k, (lo, hi), rows, m_est)
