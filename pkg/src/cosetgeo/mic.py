"""Generalized Pauli displacement operators and informationally complete
measurement checks.

A fiducial state |psi> in dimension d is pushed through the d^2
displacement operators D(i,j) = X^i Z^j (cyclic shift X, clock Z); the
measurement it defines is minimal informationally complete (MIC) when
the Gram matrix of the projector orbit has full rank d^2, and symmetric
(SIC) when all off-diagonal overlaps equal 1/(d+1).

``find_fiducials`` searches for fiducials among one-dimensional joint
eigenvectors of small abelian subgroups of a permutation group acting by
permutation matrices.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .permgrp import PermutationGroup, Perm, p_inv, p_is_identity, p_mul

DEFAULT_TOL = 1e-8


@dataclass(frozen=True)
class Fiducial:
    """Unit vector in C^d."""

    dim: int
    amplitudes: tuple[complex, ...]

    def __post_init__(self):
        amps = np.asarray(self.amplitudes, dtype=complex)
        if amps.shape != (self.dim,):
            raise ValueError("amplitude count must equal the dimension")
        norm = float(np.linalg.norm(amps))
        if abs(norm - 1.0) > 1e-6:
            raise ValueError(f"fiducial is not normalized (|psi| = {norm})")
        object.__setattr__(self, "amplitudes", tuple(map(complex, amps)))

    @classmethod
    def from_vector(cls, vector, dim: int | None = None) -> "Fiducial":
        """Normalize an arbitrary non-zero vector."""
        v = np.asarray(vector, dtype=complex).reshape(-1)
        d = dim if dim is not None else v.size
        norm = np.linalg.norm(v)
        if norm == 0:
            raise ValueError("zero vector cannot be a fiducial")
        return cls(dim=d, amplitudes=tuple(map(complex, v / norm)))

    def vector(self) -> np.ndarray:
        return np.asarray(self.amplitudes, dtype=complex)

    def to_json(self) -> list[list[float]]:
        return [[z.real, z.imag] for z in self.amplitudes]

    @classmethod
    def from_json(cls, data) -> "Fiducial":
        v = np.array([complex(re, im) for re, im in data])
        return cls.from_vector(v)


@dataclass(frozen=True)
class FiducialReport:
    dim: int
    gram_rank: int
    pp: int
    is_mic: bool
    is_sic: bool
    angle_set: tuple[float, ...]
    fiducial: Fiducial | None = None

    def to_json(self) -> dict:
        data = {
            "dim": self.dim,
            "gram_rank": self.gram_rank,
            "pp": self.pp,
            "is_mic": self.is_mic,
            "is_sic": self.is_sic,
            "angles": list(self.angle_set),
        }
        if self.fiducial is not None:
            data["fiducial"] = self.fiducial.to_json()
        return data


def displacement_operators(d: int, kind: str = "wh") -> np.ndarray:
    """The d^2 displacement unitaries, D[(i*d)+j] = X^i Z^j.

    ``kind="wh"`` is the single-qudit Weyl-Heisenberg realization for any
    d >= 2; ``kind="tensor"`` gives the multi-qubit tensor realization
    (d must be a power of two).
    """
    if d < 2:
        raise ValueError("dimension must be at least 2")
    if kind == "wh":
        omega = np.exp(2j * np.pi / d)
        shift = np.zeros((d, d), dtype=complex)
        for j in range(d):
            shift[(j + 1) % d, j] = 1.0
        clock = np.diag(omega ** np.arange(d))
        xs = [np.linalg.matrix_power(shift, i) for i in range(d)]
        zs = [np.linalg.matrix_power(clock, j) for j in range(d)]
        return np.stack([xs[i] @ zs[j] for i in range(d) for j in range(d)])
    if kind == "tensor":
        k = d.bit_length() - 1
        if 1 << k != d:
            raise ValueError("tensor realization needs a power-of-two dimension")
        x1 = np.array([[0, 1], [1, 0]], dtype=complex)
        z1 = np.array([[1, 0], [0, -1]], dtype=complex)
        ops = []
        for i in range(d):
            for j in range(d):
                m = np.eye(1, dtype=complex)
                for t in range(k):
                    xi = (i >> t) & 1
                    zi = (j >> t) & 1
                    factor = np.linalg.matrix_power(x1, xi) @ np.linalg.matrix_power(z1, zi)
                    m = np.kron(m, factor)
                ops.append(m)
        return np.stack(ops)
    raise ValueError(f"unknown Pauli realization {kind!r}")


def pauli_orbit(fiducial: Fiducial, kind: str = "wh") -> np.ndarray:
    """Rank-1 projectors D |psi><psi| D^dagger for all d^2 displacements."""
    psi = fiducial.vector()
    disp = displacement_operators(fiducial.dim, kind)
    states = disp @ psi
    return np.einsum("ai,aj->aij", states, states.conj())


def _orbit_states(fiducial: Fiducial, kind: str) -> np.ndarray:
    psi = fiducial.vector()
    return displacement_operators(fiducial.dim, kind) @ psi


def gram_matrix(fiducial: Fiducial, kind: str = "wh") -> np.ndarray:
    """Real symmetric matrix of projector overlaps tr(Pi_a Pi_b)."""
    states = _orbit_states(fiducial, kind)
    overlaps = states @ states.conj().T
    return np.abs(overlaps) ** 2


def gram_rank(fiducial: Fiducial, tol: float = DEFAULT_TOL, kind: str = "wh") -> int:
    """Numerical rank of the Gram matrix (relative singular value cut)."""
    sv = np.linalg.svd(gram_matrix(fiducial, kind), compute_uv=False)
    if sv[0] == 0:
        return 0
    return int(np.sum(sv > tol * sv[0]))


def pairwise_products(
    fiducial: Fiducial, tol: float = DEFAULT_TOL, kind: str = "wh"
) -> tuple[int, tuple[float, ...]]:
    """Distinct off-diagonal Gram values, clustered at absolute ``tol``.

    The count equals the number of distinct Hermitian angles of the orbit
    since tr(Pi_a Pi_b) = |<psi_a|psi_b>|^2.
    """
    g = gram_matrix(fiducial, kind)
    n = g.shape[0]
    off = np.sort(g[~np.eye(n, dtype=bool)])
    values: list[float] = []
    cluster: list[float] = []
    for v in off:
        if cluster and v - cluster[0] > tol:
            values.append(float(np.mean(cluster)))
            cluster = []
        cluster.append(v)
    if cluster:
        values.append(float(np.mean(cluster)))
    return len(values), tuple(values)


def is_mic(fiducial: Fiducial, tol: float = DEFAULT_TOL, kind: str = "wh") -> bool:
    return gram_rank(fiducial, tol, kind) == fiducial.dim**2


def is_sic(fiducial: Fiducial, tol: float = DEFAULT_TOL, kind: str = "wh") -> bool:
    """All off-diagonal overlaps equal to 1/(d+1) within ``tol``."""
    g = gram_matrix(fiducial, kind)
    n = g.shape[0]
    target = 1.0 / (fiducial.dim + 1)
    off = g[~np.eye(n, dtype=bool)]
    return bool(np.all(np.abs(off - target) <= tol))


def hermitian_angles(values) -> tuple[float, ...]:
    return tuple(float(np.sqrt(max(v, 0.0))) for v in values)


def fiducial_report(
    fiducial: Fiducial, tol: float = DEFAULT_TOL, kind: str = "wh", keep_vector: bool = True
) -> FiducialReport:
    rank = gram_rank(fiducial, tol, kind)
    pp, values = pairwise_products(fiducial, tol, kind)
    return FiducialReport(
        dim=fiducial.dim,
        gram_rank=rank,
        pp=pp,
        is_mic=rank == fiducial.dim**2,
        is_sic=is_sic(fiducial, tol, kind),
        angle_set=hermitian_angles(values),
        fiducial=fiducial if keep_vector else None,
    )


def born_probabilities(rho: np.ndarray, fiducial: Fiducial, kind: str = "wh") -> np.ndarray:
    """Outcome probabilities tr(rho E_i) of the POVM E_i = Pi_i / d."""
    projectors = pauli_orbit(fiducial, kind)
    return np.real(np.einsum("aij,ji->a", projectors, rho)) / fiducial.dim


def reconstruct_state(
    probabilities, fiducial: Fiducial, tol: float = DEFAULT_TOL, kind: str = "wh"
) -> np.ndarray:
    """Density matrix from SIC outcome probabilities.

    rho = sum_i [(d+1) p(i) - 1/d] Pi_i; requires a verified SIC fiducial
    and probabilities summing to one.
    """
    if not is_sic(fiducial, tol, kind):
        raise ValueError("state reconstruction requires a SIC fiducial")
    p = np.asarray(probabilities, dtype=float).reshape(-1)
    d = fiducial.dim
    if p.size != d * d:
        raise ValueError(f"need {d * d} probabilities, got {p.size}")
    if abs(p.sum() - 1.0) > 1e-6:
        raise ValueError("probabilities must sum to 1")
    projectors = pauli_orbit(fiducial, kind)
    coeff = (d + 1) * p - 1.0 / d
    return np.einsum("a,aij->ij", coeff, projectors)


# -- fiducial search ----------------------------------------------------------


def permutation_matrix(perm: Perm) -> np.ndarray:
    """M[i, j] = 1 iff the permutation sends j to i (M e_j = e_{j^g})."""
    d = len(perm)
    m = np.zeros((d, d), dtype=complex)
    for j in range(d):
        m[perm[j], j] = 1.0
    return m


def _eig_cluster(values: np.ndarray, tol: float = 1e-6):
    """Group unit-circle eigenvalues by angle; returns index lists."""
    angles = np.mod(np.angle(values), 2 * np.pi)
    order = np.argsort(angles, kind="stable")
    clusters = [[order[0]]]
    for idx in order[1:]:
        if angles[idx] - angles[clusters[-1][0]] <= tol:
            clusters[-1].append(idx)
        else:
            clusters.append([idx])
    # wrap-around: 2*pi - eps belongs with 0
    if len(clusters) > 1 and (2 * np.pi - angles[clusters[-1][0]]) + angles[clusters[0][0]] <= tol:
        clusters[0].extend(clusters.pop())
    return clusters


def _joint_onedim_eigenvectors(mats, d: int) -> list[np.ndarray]:
    """Unit vectors spanning the 1-dimensional joint eigenspaces."""
    spaces = [np.eye(d, dtype=complex)]
    for m in mats:
        refined = []
        for q in spaces:
            if q.shape[1] == 1:
                h = q.conj().T @ m @ q
                refined.append(q)
                continue
            h = q.conj().T @ m @ q
            vals, vecs = np.linalg.eig(h)
            for cluster in _eig_cluster(vals):
                basis = q @ vecs[:, cluster]
                # re-orthonormalize the (possibly skewed) eigenbasis
                qq, _ = np.linalg.qr(basis)
                refined.append(qq)
        spaces = refined
    out = []
    for q in spaces:
        if q.shape[1] == 1:
            v = q[:, 0]
            k = int(np.argmax(np.abs(np.round(v, 10))))
            phase = v[k] / abs(v[k])
            out.append(v / phase)
    return out


def _displacement_equivalent(v1: np.ndarray, v2: np.ndarray, disp: np.ndarray) -> bool:
    """True when v2 is a displacement of v1 up to global phase."""
    overlaps = np.abs((disp @ v2) @ v1.conj())
    return bool(np.max(overlaps) > 1.0 - 1e-8)


def find_fiducials(
    group: PermutationGroup,
    *,
    tol: float = DEFAULT_TOL,
    kind: str = "wh",
    order_cap: int = 2000,
    keep_vectors: bool = True,
) -> list[FiducialReport]:
    """Bounded fiducial search over joint eigenvectors of abelian subgroups.

    All cyclic subgroups are covered, and two-generator abelian subgroups
    are enumerated with the first element ranging over conjugacy-class
    representatives and the second over its centralizer.  Candidate
    vectors are the one-dimensional joint eigenspaces, deduplicated up to
    global phase and displacement equivalence.  Groups larger than
    ``order_cap`` raise ValueError (callers treat that as "not checked").
    """
    d = group.degree
    if d < 2:
        return []
    if group.order() > order_cap:
        raise ValueError(f"group order {group.order()} exceeds the search cap {order_cap}")
    elements = group.elements()
    reps = [g for g in group.conjugacy_class_representatives() if not p_is_identity(g)]
    disp = displacement_operators(d, kind)
    seen_subgroups: set[frozenset] = set()
    kept: list[np.ndarray] = []

    def consider(gens):
        key = frozenset(_closure_two(gens[0], gens[-1]))
        if key in seen_subgroups:
            return
        seen_subgroups.add(key)
        mats = [permutation_matrix(g) for g in gens]
        for v in _joint_onedim_eigenvectors(mats, d):
            if any(_displacement_equivalent(u, v, disp) for u in kept):
                continue
            kept.append(v)

    for g in elements:
        if not p_is_identity(g):
            consider([g])
    for g in reps:
        for h in elements:
            if p_is_identity(h) or h == g:
                continue
            if p_mul(g, h) != p_mul(h, g):
                continue
            consider([g, h])
    reports = [
        fiducial_report(Fiducial.from_vector(v), tol, kind, keep_vector=keep_vectors)
        for v in kept
    ]
    reports.sort(
        key=lambda r: (
            not r.is_mic,
            r.pp,
            tuple(np.round(np.abs(r.fiducial.vector()), 9)) if r.fiducial else (),
        )
    )
    return reports


def _closure_two(g: Perm, h: Perm) -> set[Perm]:
    ident = tuple(range(len(g)))
    seen = {ident}
    queue = [ident]
    qi = 0
    while qi < len(queue):
        p = queue[qi]
        qi += 1
        for s in (g, h):
            q = p_mul(p, s)
            if q not in seen:
                seen.add(q)
                queue.append(q)
    return seen
