"""Finite-dimensional *-algebras generated by truncated smeared fields.

All matrices here are dense complex arrays in orthonormal coordinates, so
the *-operation is the conjugate transpose and the trace inner product is
<A, B> = tr(A^* B).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations

import numpy as np

from .fields import generator_vector
from .models import Model, TensorModel
from .smearing import Bump, arcs_cover_circle, commutator_decay, orthonormal_transform, smear

RANK_TOL = 1e-9


@dataclass
class MatrixAlgebra:
    """Unital *-algebra given by a trace-orthonormal basis."""

    generators: list
    basis: np.ndarray  # shape (dim, d, d)
    stabilized: bool = True
    iterations: int = 0

    @property
    def dim(self) -> int:
        return int(self.basis.shape[0])

    @property
    def size(self) -> int:
        return int(self.basis.shape[1])

    def _flat(self):
        return self.basis.reshape(self.dim, -1)

    def residual(self, x: np.ndarray) -> float:
        """Relative distance of x from the algebra (trace norm)."""
        v = np.asarray(x, dtype=complex).reshape(-1)
        nrm = np.linalg.norm(v)
        if nrm == 0:
            return 0.0
        q = self._flat()
        r = v - q.T @ (q.conj() @ v)
        return float(np.linalg.norm(r) / nrm)

    def contains(self, x, tol: float = 1e-8) -> bool:
        return self.residual(x) <= tol

    def contains_algebra(self, other: "MatrixAlgebra", tol: float = 1e-8) -> bool:
        return all(self.contains(b, tol) for b in other.basis)

    def same_as(self, other: "MatrixAlgebra", tol: float = 1e-8) -> bool:
        return self.dim == other.dim and self.contains_algebra(other, tol)


class _Orthonormalizer:
    def __init__(self, d: int, tol: float):
        self.rows = []
        self.tol = tol
        self.d = d

    def add(self, x: np.ndarray) -> bool:
        v = np.asarray(x, dtype=complex).reshape(-1).copy()
        nrm = np.linalg.norm(v)
        if nrm == 0:
            return False
        if self.rows:
            q = np.array(self.rows)
            for _ in range(2):
                v -= q.T @ (q.conj() @ v)
        res = np.linalg.norm(v)
        if res <= self.tol * nrm or len(self.rows) >= self.d * self.d:
            return False
        self.rows.append(v / res)
        return True

    def basis(self):
        if not self.rows:
            return np.zeros((0, self.d, self.d), dtype=complex)
        return np.array(self.rows).reshape(-1, self.d, self.d)


def generate_algebra(matrices, limit: int = 64, tol: float = RANK_TOL) -> MatrixAlgebra:
    """Unital *-algebra generated by the matrices.

    Starts from the identity, the generators and their adjoints, then
    left-multiplies each newly found basis element by every generator until
    no new direction appears (Gram-Schmidt under the trace inner product).
    Stops after ``limit`` rounds with ``stabilized=False`` if still growing.
    """
    mats = [np.asarray(m, dtype=complex) for m in matrices]
    if not mats:
        raise ValueError("generate_algebra needs at least one matrix")
    d = mats[0].shape[0]
    if any(m.shape != (d, d) for m in mats):
        raise ValueError("generators must be square matrices of one size")
    gens = []
    for m in mats:
        gens.append(m)
        if not np.allclose(m, m.conj().T, atol=1e-14):
            gens.append(m.conj().T)
    ortho = _Orthonormalizer(d, tol)
    ortho.add(np.eye(d))
    frontier = []
    for g in gens:
        if ortho.add(g):
            frontier.append(ortho.rows[-1].reshape(d, d))
    rounds = 0
    while frontier and rounds < limit:
        rounds += 1
        new = []
        for w in frontier:
            for g in gens:
                if ortho.add(g @ w):
                    new.append(ortho.rows[-1].reshape(d, d))
        frontier = new
    return MatrixAlgebra(mats, ortho.basis(), stabilized=not frontier, iterations=rounds)


def commutant(alg: MatrixAlgebra, tol: float = RANK_TOL) -> MatrixAlgebra:
    """{X : [X, A] = 0 for all generators A and their adjoints}, by a null-space solve."""
    d = alg.size
    eye = np.eye(d)
    gens = list(alg.generators) if alg.generators else list(alg.basis)
    ops = []
    scale = 1.0
    for a in gens:
        for m in (a, a.conj().T):
            # row-major vec: vec(XA) = (I ⊗ A^T) vec X, vec(AX) = (A ⊗ I) vec X
            ops.append(np.kron(eye, m.T) - np.kron(m, eye))
        scale = max(scale, float(np.linalg.norm(a, 2)))
    stacked = np.vstack(ops)
    if stacked.shape[0] < stacked.shape[1]:
        stacked = np.vstack([stacked, np.zeros((stacked.shape[1] - stacked.shape[0], stacked.shape[1]))])
    _, sv, vh = np.linalg.svd(stacked, full_matrices=False)
    rank = int(np.sum(sv > tol * scale))
    ns = vh[rank:].conj().T
    basis = ns.T.reshape(-1, d, d)
    # orthonormal already (trace inner product = Euclidean on vec)
    return MatrixAlgebra(list(basis), basis, stabilized=True, iterations=0)


def double_commutant_holds(alg: MatrixAlgebra, tol: float = 1e-8) -> bool:
    return commutant(commutant(alg)).same_as(alg, tol)


def full_matrix_algebra(d: int) -> MatrixAlgebra:
    units = []
    for i in range(d):
        for j in range(d):
            e = np.zeros((d, d), dtype=complex)
            e[i, j] = 1
            units.append(e)
    return generate_algebra(units)


# -- net diagnostics ---------------------------------------------------------

def _field_states(model: Model) -> list:
    """The generating fields smeared by the net diagnostics."""
    if isinstance(model, TensorModel):
        return [generator_vector(model, g) for g in model.generators]
    return [generator_vector(model)]


@dataclass
class NetReport:
    arcs: list
    cutoff: int
    e_max: int
    window_dim: int
    algebra_dims: dict
    isotony: list
    locality: list
    locality_max: list
    cyclicity_dim: int
    commutant_dim: int
    double_commutant: dict
    metadata: dict = field(default_factory=dict)

    def to_json(self):
        return {
            "arcs": [a.to_json() for a in self.arcs],
            "F": self.cutoff,
            "e_max": self.e_max,
            "window_dim": self.window_dim,
            "algebra_dims": {str(k): v for k, v in self.algebra_dims.items()},
            "isotony": self.isotony,
            "locality": {"pairs": self.locality, "max_over_pairs": self.locality_max},
            "cyclicity": {"dim_algebra_omega": self.cyclicity_dim, "window_dim": self.window_dim},
            "irreducibility": {"commutant_dim": self.commutant_dim},
            "double_commutant": {str(k): v for k, v in self.double_commutant.items()},
            "metadata": self.metadata,
        }


def net_report(model: Model, arcs, cutoff: int = 16, locality_cutoffs=(8, 16, 32),
               bump: dict | None = None, untruncated_locality: bool = True) -> NetReport:
    """Isotony, locality, cyclicity and irreducibility diagnostics at truncation.

    The function family of an arc is the set of bumps on the configured
    arcs contained in it, so nested arcs have nested families.  Algebras are
    generated from window-projected smeared matrices in orthonormal
    coordinates.  Locality is measured on generator pairs of disjoint arcs,
    with products formed in the untruncated module (projected norms are
    reported alongside).
    """
    arcs = list(arcs)
    bumps = [Bump(a, **(bump or {})) for a in arcs]
    states = _field_states(model)
    r = orthonormal_transform(model)
    r_inv = np.linalg.pinv(r)
    smeared = {
        i: [r @ smear(model, st, bumps[i], cutoff).projected @ r_inv for st in states]
        for i in range(len(arcs))
    }
    families = {i: [j for j in range(len(arcs)) if arcs[i].contains(arcs[j])] for i in range(len(arcs))}
    algebras = {
        i: generate_algebra([m for j in fam for m in smeared[j]]) for i, fam in families.items()
    }
    union = generate_algebra([m for i in range(len(arcs)) for m in smeared[i]])

    isotony = []
    for i, j in ((i, j) for i in range(len(arcs)) for j in range(len(arcs))):
        if arcs[j].contains(arcs[i]):
            isotony.append({"inner": i, "outer": j,
                            "contained": algebras[j].contains_algebra(algebras[i])})

    locality = []
    for i, j in combinations(range(len(arcs)), 2):
        if not arcs[i].disjoint(arcs[j]):
            continue
        per_f = {}
        for a in states:
            for b in states:
                rows = commutator_decay(model, a, b, arcs[i], arcs[j], bumps[i], bumps[j],
                                        locality_cutoffs, untruncated=untruncated_locality)
                for row in rows:
                    cur = per_f.setdefault(row.cutoff, [0.0, 0.0])
                    cur[0] = max(cur[0], row.norm)
                    cur[1] = max(cur[1], row.norm_projected)
        locality.append({"arcs": [i, j], "rows": [
            {"F": F, "norm": v[0], "norm_projected": v[1]} for F, v in sorted(per_f.items())
        ]})

    locality_max = {}
    for entry in locality:
        for row in entry["rows"]:
            cur = locality_max.setdefault(row["F"], {"F": row["F"], "norm": 0.0, "norm_projected": 0.0})
            cur["norm"] = max(cur["norm"], row["norm"])
            cur["norm_projected"] = max(cur["norm_projected"], row["norm_projected"])

    omega = np.zeros(model.dim, dtype=complex)
    omega[model.index(model.vacuum)] = 1
    omega = r @ omega
    orbit = np.array([b @ omega for b in union.basis])
    cyc = int(np.linalg.matrix_rank(orbit, tol=RANK_TOL * max(1.0, np.abs(orbit).max()))) if len(orbit) else 0
    comm = commutant(union)
    dc = {i: double_commutant_holds(alg) for i, alg in algebras.items()}
    dc["union"] = double_commutant_holds(union)
    return NetReport(
        arcs, cutoff, model.window.e_max, r.shape[0],
        {**{i: alg.dim for i, alg in algebras.items()}, "union": union.dim},
        isotony, locality, [locality_max[F] for F in sorted(locality_max)], cyc, comm.dim, dc,
        {"products": "window-projected (P Y P) for algebras; locality norms use untruncated products",
         "covers_circle": arcs_cover_circle(arcs), "rank_tol": RANK_TOL,
         "stabilized": all(a.stabilized for a in algebras.values()) and union.stabilized},
    )
