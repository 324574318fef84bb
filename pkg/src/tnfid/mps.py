"""Finite open-boundary matrix product states in Schmidt gauge.

A state is stored in Schmidt gauge: one ``gamma`` tensor per site with axes
``(left bond, physical, right bond)`` plus one vector of Schmidt values per
bond (``L + 1`` vectors, the boundary ones being the single entry ``[1.0]``).
Left-orthonormal site tensors are ``S[n] @ gamma[n]``, right-orthonormal ones
``gamma[n] @ S[n+1]``; a state is *canonical* when both families satisfy
their orthogonality condition on every site.

All operations return new states; nothing mutates in place.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import scipy.linalg
import scipy.sparse.linalg

from .errors import (
    DegenerateStateError,
    DimensionError,
    StateError,
    ValidationError,
)
from .tensor import NO_TRUNCATION, TruncationSpec, svd_truncate

#: Schmidt values below this fraction of the largest one on a bond are
#: dropped during canonicalization and gate application, so that gauge
#: inversion (division by Schmidt values) stays well conditioned.
SCHMIDT_FLOOR = 1e-14

#: Residual tolerance for the canonical-form orthogonality conditions.
CANONICAL_TOL = 1e-10


class MatrixProductState:
    """MPS in Schmidt gauge; see module docstring for conventions."""

    __slots__ = ("gammas", "schmidt", "canonical")

    def __init__(self, gammas, schmidt, canonical=False, validate=True):
        self.gammas = [np.asarray(g, dtype=np.complex128) for g in gammas]
        self.schmidt = [np.asarray(s, dtype=np.float64) for s in schmidt]
        self.canonical = bool(canonical)
        if validate:
            self._validate()

    def _validate(self) -> None:
        L = len(self.gammas)
        if L < 1:
            raise ValidationError("MPS needs at least one site")
        if len(self.schmidt) != L + 1:
            raise ValidationError(
                f"need {L + 1} Schmidt vectors for {L} sites, got {len(self.schmidt)}"
            )
        if self.schmidt[0].shape != (1,) or self.schmidt[-1].shape != (1,):
            raise ValidationError("boundary Schmidt vectors must have one entry")
        d = self.gammas[0].shape[1]
        for n, g in enumerate(self.gammas):
            if g.ndim != 3:
                raise ValidationError(f"site tensor {n} must be rank 3, got {g.ndim}")
            if g.shape[1] != d:
                raise DimensionError("physical dimensions differ between sites")
            if g.shape[0] != len(self.schmidt[n]) or g.shape[2] != len(self.schmidt[n + 1]):
                raise DimensionError(
                    f"bond extents at site {n} do not match the Schmidt vectors"
                )
            if not np.all(np.isfinite(g)):
                raise ValidationError(f"non-finite entries in site tensor {n}")
        for n, s in enumerate(self.schmidt):
            if np.any(s < 0) or not np.all(np.isfinite(s)):
                raise ValidationError(f"Schmidt vector {n} has negative or non-finite entries")
            if np.any(np.diff(s) > 0):
                raise ValidationError(f"Schmidt vector {n} is not sorted descending")

    @property
    def length(self) -> int:
        return len(self.gammas)

    @property
    def phys_dim(self) -> int:
        return self.gammas[0].shape[1]

    @property
    def bond_dims(self) -> list[int]:
        return [len(s) for s in self.schmidt]

    @property
    def max_bond(self) -> int:
        return max(self.bond_dims)

    def copy(self) -> "MatrixProductState":
        return MatrixProductState(
            [g.copy() for g in self.gammas],
            [s.copy() for s in self.schmidt],
            canonical=self.canonical,
            validate=False,
        )

    def left_tensor(self, n: int) -> np.ndarray:
        """Left-orthonormal site tensor ``S[n] @ gamma[n]``."""
        return self.gammas[n] * self.schmidt[n][:, None, None]

    def right_tensor(self, n: int) -> np.ndarray:
        """Right-orthonormal site tensor ``gamma[n] @ S[n+1]``."""
        return self.gammas[n] * self.schmidt[n + 1][None, None, :]

    def site_theta(self, n: int) -> np.ndarray:
        """Single-site wavefunction ``S[n] gamma[n] S[n+1]`` (canonical states)."""
        return (
            self.gammas[n]
            * self.schmidt[n][:, None, None]
            * self.schmidt[n + 1][None, None, :]
        )

    def two_site_theta(self, n: int) -> np.ndarray:
        """Two-site wavefunction across bond ``n+1``, axes (l, p1, p2, r)."""
        left = self.left_tensor(n) * self.schmidt[n + 1][None, None, :]
        right = self.gammas[n + 1] * self.schmidt[n + 2][None, None, :]
        return np.tensordot(left, right, axes=(2, 0))


def from_site_tensors(tensors) -> MatrixProductState:
    """Wrap raw site tensors (axes left, phys, right) as a non-canonical MPS.

    Interior Schmidt vectors are set to all-ones placeholders, so the
    represented state is the plain chain contraction of ``tensors``.
    Call :func:`canonicalize` to obtain the Schmidt gauge.
    """
    tensors = [np.asarray(t, dtype=np.complex128) for t in tensors]
    schmidt = [np.ones(1)]
    for t in tensors:
        schmidt.append(np.ones(t.shape[2]))
    return MatrixProductState(tensors, schmidt, canonical=False)


def product_mps(site_vectors) -> MatrixProductState:
    """Normalized product state from one local vector per site."""
    gammas = []
    for v in site_vectors:
        v = np.asarray(v, dtype=np.complex128)
        nrm = np.linalg.norm(v)
        if nrm == 0:
            raise DegenerateStateError("zero site vector in product state")
        gammas.append((v / nrm).reshape(1, -1, 1))
    schmidt = [np.ones(1) for _ in range(len(gammas) + 1)]
    return MatrixProductState(gammas, schmidt, canonical=True)


def random_mps(length: int, phys_dim: int = 2, chi: int = 1, seed: int = 0) -> MatrixProductState:
    """Random canonical normalized MPS, reproducible per seed.

    Bond dimensions follow ``min(chi, d**n, d**(L-n))`` so the requested
    ``chi`` is realized wherever the Hilbert space allows.
    """
    if length < 2:
        raise ValidationError(f"length must be >= 2, got {length}")
    if chi < 1:
        raise ValidationError(f"chi must be >= 1, got {chi}")
    rng = np.random.default_rng(seed)
    dims = [min(chi, phys_dim ** min(n, length - n)) for n in range(length + 1)]
    tensors = []
    for n in range(length):
        shape = (dims[n], phys_dim, dims[n + 1])
        t = rng.standard_normal(shape) + 1j * rng.standard_normal(shape)
        tensors.append(t)
    return canonicalize(from_site_tensors(tensors))


def canonicalize(state: MatrixProductState, schmidt_floor: float = SCHMIDT_FLOOR) -> MatrixProductState:
    """Gauge-transform an MPS into the Schmidt (canonical) gauge.

    Returns a normalized canonical state representing the same ray.  Schmidt
    values below ``schmidt_floor`` times the bond maximum are dropped.
    Raises :class:`DegenerateStateError` for a zero-norm state.
    """
    L = state.length
    d = state.phys_dim

    # Fold the stored Schmidt weights back into plain site tensors.
    raw = [state.left_tensor(n) for n in range(L)]
    raw[-1] = raw[-1] * state.schmidt[L][None, None, :]

    # Left-to-right QR sweep: left-orthonormal tensors, norm ends up in carry.
    a_tensors = []
    carry = np.eye(1, dtype=np.complex128)
    for n in range(L):
        t = np.tensordot(carry, raw[n], axes=(1, 0))
        l, _, r = t.shape
        q, rmat = np.linalg.qr(t.reshape(l * d, r))
        a_tensors.append(q.reshape(l, d, -1))
        carry = rmat
    norm = float(np.abs(carry[0, 0])) if carry.size == 1 else float(np.linalg.norm(carry))
    if norm < 1e-150:
        raise DegenerateStateError("state has zero norm")
    # Retain the phase so the represented ray is preserved exactly.
    carry = carry / norm

    # Right-to-left SVD sweep: collect Schmidt vectors and right-orthonormal
    # tensors, then divide the right bond out to recover the gammas.
    schmidt: list[np.ndarray | None] = [None] * (L + 1)
    schmidt[0] = np.ones(1)
    schmidt[L] = np.ones(1)
    b_tensors: list[np.ndarray | None] = [None] * L
    for n in range(L - 1, 0, -1):
        t = np.tensordot(a_tensors[n], carry, axes=(2, 0))
        l, _, r = t.shape
        res = svd_truncate(t.reshape(l, d * r))
        keep = res.s > schmidt_floor * res.s[0]
        keep[0] = True
        s = res.s[keep]
        s = s / np.linalg.norm(s)
        schmidt[n] = s
        b_tensors[n] = res.v.conj().T[keep].reshape(-1, d, r)
        carry = res.u[:, keep] * res.s[keep]
    t = np.tensordot(a_tensors[0], carry, axes=(2, 0))
    b_tensors[0] = t / np.linalg.norm(t)

    gammas = [b_tensors[n] / schmidt[n + 1][None, None, :] for n in range(L)]
    return MatrixProductState(gammas, schmidt, canonical=True)


def canonical_residual(state: MatrixProductState) -> float:
    """Largest deviation from the canonical-gauge orthogonality conditions.

    Covers left- and right-orthonormality at every site plus the unit
    normalization of every Schmidt vector.
    """
    res = 0.0
    for n in range(state.length):
        a = state.left_tensor(n)
        e = np.tensordot(a.conj(), a, axes=([0, 1], [0, 1]))
        res = max(res, float(np.max(np.abs(e - np.eye(e.shape[0])))))
        b = state.right_tensor(n)
        e = np.tensordot(b, b.conj(), axes=([1, 2], [1, 2]))
        res = max(res, float(np.max(np.abs(e - np.eye(e.shape[0])))))
    for s in state.schmidt:
        res = max(res, abs(float(np.sum(s**2)) - 1.0))
    return res


def is_canonical(state: MatrixProductState, tol: float = CANONICAL_TOL) -> bool:
    return canonical_residual(state) <= tol


def overlap(a: MatrixProductState, b: MatrixProductState) -> complex:
    """Inner product ``<a|b>`` by left-to-right transfer contraction."""
    if a.length != b.length or a.phys_dim != b.phys_dim:
        raise DimensionError("states differ in length or physical dimension")
    env = np.ones((1, 1), dtype=np.complex128)
    for n in range(a.length):
        ta = a.left_tensor(n)
        tb = b.left_tensor(n)
        env = np.einsum("ij,ipk,jpl->kl", env, ta.conj(), tb)
    val = env[0, 0] * a.schmidt[-1][0] * b.schmidt[-1][0]
    return complex(val)


def expect_local(state: MatrixProductState, op, site: int) -> complex:
    """Expectation value of a single-site operator on a canonical state."""
    if not state.canonical:
        raise StateError("expect_local requires a canonical state")
    if not 0 <= site < state.length:
        raise ValidationError(f"site {site} out of range for length {state.length}")
    op = np.asarray(op, dtype=np.complex128)
    d = state.phys_dim
    if op.shape != (d, d):
        raise DimensionError(f"operator must be {d}x{d}, got {op.shape}")
    theta = state.site_theta(site)
    return complex(np.einsum("lqr,qp,lpr->", theta.conj(), op, theta))


def expect_two_point(
    state: MatrixProductState, op1, site1: int, op2, site2: int
) -> complex:
    """Two-point expectation ``<op1_site1 op2_site2>`` on a canonical state."""
    if not state.canonical:
        raise StateError("expect_two_point requires a canonical state")
    if not 0 <= site1 < site2 < state.length:
        raise ValidationError(f"need 0 <= site1 < site2 < L, got {site1}, {site2}")
    op1 = np.asarray(op1, dtype=np.complex128)
    op2 = np.asarray(op2, dtype=np.complex128)
    t = state.left_tensor(site1)
    env = np.einsum("lpa,pq,lqb->ab", t.conj(), op1, t)
    for n in range(site1 + 1, site2):
        t = state.left_tensor(n)
        env = np.einsum("apb,ac,cpd->bd", t.conj(), env, t, optimize=True)
    t = state.left_tensor(site2) * state.schmidt[site2 + 1][None, None, :]
    return complex(np.einsum("apr,pq,ab,bqr->", t.conj(), op2, env, t, optimize=True))


def apply_two_site_gate(
    state: MatrixProductState,
    gate,
    site: int,
    truncation: TruncationSpec = NO_TRUNCATION,
) -> tuple[MatrixProductState, float]:
    """Apply a two-site gate to sites ``(site, site+1)`` of a canonical state.

    The gate has axes ``(out1, out2, in1, in2)``.  The bond is re-split with a
    truncated SVD; the new Schmidt vector is renormalized so the state stays
    normalized.  Returns the new state and the discarded weight (squared sum
    of dropped singular values, relative to the post-gate wavefunction).
    """
    if not state.canonical:
        raise StateError("apply_two_site_gate requires a canonical state")
    L, d = state.length, state.phys_dim
    if not 0 <= site < L - 1:
        raise ValidationError(f"site {site} out of range for a two-site gate")
    gate = np.asarray(gate, dtype=np.complex128)
    if gate.shape != (d, d, d, d):
        raise DimensionError(f"gate must have shape {(d,) * 4}, got {gate.shape}")

    theta = state.two_site_theta(site)  # (l, p1, p2, r)
    l, _, _, r = theta.shape
    theta = np.tensordot(gate, theta, axes=([2, 3], [1, 2]))  # (o1, o2, l, r)
    theta = theta.transpose(2, 0, 1, 3)

    res = svd_truncate(theta.reshape(l * d, d * r), truncation)
    keep = res.s > SCHMIDT_FLOOR * res.s[0] if res.rank else np.zeros(0, dtype=bool)
    discarded = res.discarded_weight + float(np.sum(res.s[~keep] ** 2))
    s = res.s[keep]
    if len(s) == 0:
        raise DegenerateStateError("truncation removed every Schmidt value")
    u = res.u[:, keep].reshape(l, d, -1)
    vh = res.v.conj().T[keep].reshape(-1, d, r)

    gammas = list(state.gammas)
    schmidt = list(state.schmidt)
    gammas[site] = u / schmidt[site][:, None, None]
    gammas[site + 1] = vh / schmidt[site + 2][None, None, :]
    schmidt[site + 1] = s / np.linalg.norm(s)
    return MatrixProductState(gammas, schmidt, canonical=True, validate=False), discarded


@dataclass(frozen=True)
class EvolutionConfig:
    """Parameters for Trotterized time evolution.

    ``dt`` is the per-step factor in ``exp(-dt * h)`` applied to each bond
    term: a positive real part means imaginary-time evolution, a purely
    imaginary ``dt`` a real-time step (``dt = -1j * t`` evolves by
    ``exp(+i t H)``).  For imaginary time the evolution stops early once the
    per-site energy change per step drops below ``convergence_threshold``.
    ``energy_every`` controls how often the energy diagnostic (and the
    convergence test) is evaluated.
    """

    dt: complex
    steps: int
    trotter_order: int = 2
    truncation: TruncationSpec = field(default_factory=TruncationSpec)
    convergence_threshold: float | None = None
    energy_every: int = 1

    def __post_init__(self) -> None:
        if self.dt == 0:
            raise ValidationError("dt must be nonzero")
        if complex(self.dt).real < 0:
            raise ValidationError("dt must not have a negative real part")
        if self.steps < 1:
            raise ValidationError(f"steps must be >= 1, got {self.steps}")
        if self.trotter_order not in (1, 2):
            raise ValidationError(f"trotter_order must be 1 or 2, got {self.trotter_order}")
        if self.energy_every < 1:
            raise ValidationError("energy_every must be >= 1")


@dataclass(frozen=True)
class StepDiagnostics:
    step: int
    energy: float | None
    max_discarded_weight: float
    max_bond_dim: int


def bond_expectation(state: MatrixProductState, term, site: int) -> complex:
    """Expectation of a two-site term (axes out1,out2,in1,in2) on bond ``site``."""
    theta = state.two_site_theta(site)
    return complex(
        np.einsum("labr,abcd,lcdr->", theta.conj(), np.asarray(term), theta, optimize=True)
    )


def chain_energy(state: MatrixProductState, terms) -> float:
    """Total energy of a nearest-neighbor Hamiltonian given as bond terms."""
    total = 0.0
    for n, term in enumerate(terms):
        if term is None:
            continue
        total += bond_expectation(state, term, n).real
    return total


def _bond_gates(terms, factor: complex, d: int) -> list[np.ndarray | None]:
    gates = []
    for term in terms:
        if term is None:
            gates.append(None)
            continue
        h = np.asarray(term, dtype=np.complex128).reshape(d * d, d * d)
        gates.append(scipy.linalg.expm(-factor * h).reshape(d, d, d, d))
    return gates


def tebd_evolve(
    state: MatrixProductState,
    terms,
    config: EvolutionConfig,
) -> tuple[MatrixProductState, list[StepDiagnostics]]:
    """Trotterized evolution of a canonical MPS under nearest-neighbor terms.

    ``terms`` is a list of ``L - 1`` bond tensors (axes out1,out2,in1,in2);
    an entry may be ``None`` for an absent coupling.  The second-order scheme
    is the symmetric even/odd split with consecutive half-steps of the even
    sublattice merged between diagnostics points.
    """
    if not state.canonical:
        raise StateError("tebd_evolve requires a canonical state")
    L, d = state.length, state.phys_dim
    terms = list(terms)
    if len(terms) != L - 1:
        raise DimensionError(f"need {L - 1} bond terms, got {len(terms)}")
    dt = complex(config.dt)
    imaginary = dt.real > 0

    even = list(range(0, L - 1, 2))
    odd = list(range(1, L - 1, 2))
    gates_full = _bond_gates(terms, dt, d)
    gates_half = _bond_gates(terms, dt / 2.0, d) if config.trotter_order == 2 else None

    cur = state
    max_disc = 0.0

    def sweep(bonds, gates):
        nonlocal cur, max_disc
        for n in bonds:
            if gates[n] is None:
                continue
            cur, disc = apply_two_site_gate(cur, gates[n], n, config.truncation)
            max_disc = max(max_disc, disc)

    diagnostics: list[StepDiagnostics] = []
    prev_energy: float | None = None
    prev_energy_step = 0
    half_open = False  # a pending half even-step from second-order merging

    for step in range(1, config.steps + 1):
        if config.trotter_order == 1:
            sweep(odd, gates_full)
            sweep(even, gates_full)
        else:
            if not half_open:
                sweep(even, gates_half)
            else:
                sweep(even, gates_full)
            sweep(odd, gates_full)
            half_open = True

        record_energy = (
            step % config.energy_every == 0 or step == config.steps
        )
        if record_energy and config.trotter_order == 2 and half_open:
            sweep(even, gates_half)
            half_open = False

        energy = None
        if record_energy:
            if imaginary:
                # Non-unitary gates erode the Schmidt gauge; restore it so
                # the energy (and the convergence test) read a clean state.
                cur = canonicalize(cur)
            energy = chain_energy(cur, terms)
        diagnostics.append(
            StepDiagnostics(
                step=step,
                energy=energy,
                max_discarded_weight=max_disc,
                max_bond_dim=cur.max_bond,
            )
        )
        max_disc = 0.0

        if (
            imaginary
            and config.convergence_threshold is not None
            and energy is not None
            and prev_energy is not None
        ):
            per_step = abs(energy - prev_energy) / max(step - prev_energy_step, 1)
            if per_step / L < config.convergence_threshold:
                break
        if energy is not None:
            prev_energy = energy
            prev_energy_step = step

    if half_open:
        sweep(even, gates_half)
    return cur, diagnostics


def correlation_length(state: MatrixProductState, block: int | None = None) -> float:
    """Correlation length from a mid-chain transfer-operator block.

    Builds the mixed transfer operator of ``block`` consecutive
    left-orthonormal bulk tensors (a uniform-chain proxy, approximate for
    inhomogeneous states) and returns ``-block / log|lambda_2 / lambda_1|``
    of its spectrum.  A multi-site block is essential: the Schmidt bases of
    a finite chain carry arbitrary rotations inside degenerate-spectrum
    blocks, which corrupt single-tensor eigenvalues but telescope away
    inside a product.  Returns ``0.0`` for a product state and ``inf`` when
    the two leading eigenvalues degenerate.
    """
    if state.max_bond == 1:
        return 0.0
    L = state.length
    if L < 8:
        raise ValidationError("correlation_length needs at least 8 sites")
    if block is None:
        block = max(L // 4, 2)

    # Center the block on a stretch whose end bonds have equal extents.
    start = None
    for offset in range(L):
        for cand in (L // 2 - block // 2 - offset, L // 2 - block // 2 + offset):
            if 0 <= cand and cand + block <= L:
                if (
                    len(state.schmidt[cand]) == len(state.schmidt[cand + block])
                    and len(state.schmidt[cand]) > 1
                ):
                    start = cand
                    break
        if start is not None:
            break
    if start is None:
        return 0.0
    sites = range(start, start + block)
    chi = len(state.schmidt[start])

    if chi * chi <= 400:
        prod = np.eye(chi * chi, dtype=np.complex128)
        for n in sites:
            a = state.left_tensor(n)
            cl, _, cr = a.shape
            t = np.einsum("lpr,mps->lmrs", a, a.conj()).reshape(cl * cl, cr * cr)
            prod = prod @ t
        lam = np.linalg.eigvals(prod)
    else:
        tensors = [state.left_tensor(n) for n in sites]

        def matvec(v):
            m = v.reshape(chi, chi)
            for a in reversed(tensors):
                out = np.tensordot(a, m, axes=(2, 0))  # (l, p, r')
                m = np.tensordot(out, a.conj(), axes=([1, 2], [1, 2]))
            return m.reshape(-1)

        op = scipy.sparse.linalg.LinearOperator(
            (chi * chi, chi * chi), matvec=matvec, dtype=np.complex128
        )
        v0 = np.ones(chi * chi) / np.sqrt(chi * chi)
        k = min(6, chi * chi - 2)
        lam = scipy.sparse.linalg.eigs(
            op, k=k, which="LM", v0=v0, return_eigenvectors=False
        )
    mags = np.sort(np.abs(lam))[::-1]
    ratio = mags[1] / mags[0]
    if ratio ** (1.0 / block) >= 1.0 - 1e-12:
        return float("inf")
    if ratio <= 0.0:
        return 0.0
    return float(-block / np.log(ratio))
