"""Exact brute-force reference computations at small sizes.

Everything here works on dense statevectors and density matrices and exists
to cross-check the tensor-network fidelity routines: full contraction of MPS
and TTN states, partial traces, the Uhlmann fidelity from matrix square
roots, a purification-based restricted fidelity, and the constructive
purification routines (``rho = x x.conj().T`` factors and their isometric
completions).

A capacity guard of ``2**20`` amplitudes keeps accidental exponential
blowups out of test runs.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass
from typing import TYPE_CHECKING

import numpy as np

from .errors import (
    CapacityError,
    DegenerateStateError,
    DimensionError,
    NumericError,
    ValidationError,
)
from .tensor import (
    hermitian_decompose,
    inner_core,
    optimal_isometry,
    random_isometry,
    trace_norm,
)

if TYPE_CHECKING:
    from .mps import MatrixProductState
    from .ttn import TreeTensorNetwork

#: Largest statevector the oracle will materialize.
CAPACITY_LIMIT = 2**20


def mps_to_statevector(state: "MatrixProductState") -> np.ndarray:
    """Contract an MPS left-to-right into a normalized statevector.

    Amplitude ordering is row-major in the site index (site 0 is the most
    significant digit).
    """
    dim = 1
    for g in state.gammas:
        dim *= g.shape[1]
        if dim > CAPACITY_LIMIT:
            raise CapacityError(f"statevector would exceed {CAPACITY_LIMIT} amplitudes")
    vec = np.ones((1, 1), dtype=np.complex128)
    for n in range(state.length):
        t = state.left_tensor(n)
        vec = np.tensordot(vec, t, axes=(1, 0))
        vec = vec.reshape(-1, t.shape[2])
    vec = (vec * state.schmidt[-1][None, :]).reshape(-1)
    norm = np.linalg.norm(vec)
    if norm < 1e-150:
        raise DegenerateStateError("state has zero norm")
    return vec / norm


def ttn_to_statevector(ttn: "TreeTensorNetwork") -> np.ndarray:
    """Contract a binary TTN bottom-up into a normalized statevector."""
    if ttn.phys_dim**ttn.num_sites > CAPACITY_LIMIT:
        raise CapacityError(f"statevector would exceed {CAPACITY_LIMIT} amplitudes")

    def subtree(level: int, pos: int) -> np.ndarray:
        w = ttn.layers[level][pos]
        if level == 0:
            return w.reshape(w.shape[0], -1)
        left = subtree(level - 1, 2 * pos)
        right = subtree(level - 1, 2 * pos + 1)
        out = np.tensordot(w, left, axes=(1, 0))  # (top, rc, phys_l)
        out = np.tensordot(out, right, axes=(1, 0))  # (top, phys_l, phys_r)
        return out.reshape(w.shape[0], -1)

    top_level = len(ttn.layers) - 1
    left = subtree(top_level, 0)
    right = subtree(top_level, 1)
    vec = np.tensordot(ttn.top_tensor, left, axes=(0, 0))  # (r, phys_l)
    vec = np.tensordot(vec, right, axes=(0, 0)).reshape(-1)  # (phys_l, phys_r)
    norm = np.linalg.norm(vec)
    if norm < 1e-150:
        raise DegenerateStateError("state has zero norm")
    return vec / norm


@dataclass(frozen=True)
class DensityMatrix:
    """Reduced density matrix on a contiguous site window."""

    matrix: np.ndarray
    region: tuple[int, int]


def _as_density_matrix(rho) -> np.ndarray:
    m = np.asarray(rho.matrix if isinstance(rho, DensityMatrix) else rho, dtype=np.complex128)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise DimensionError(f"density matrix must be square, got shape {m.shape}")
    if abs(np.trace(m) - 1.0) > 1e-8:
        raise ValidationError(f"density matrix trace is {np.trace(m):.6g}, expected 1")
    return m


def reduced_density_matrix(vec, length: int, region: tuple[int, int], phys_dim: int = 2) -> DensityMatrix:
    """Partial trace of ``|vec><vec|`` onto the contiguous window ``region``."""
    x0, x1 = region
    if not (0 <= x0 < x1 <= length):
        raise ValidationError(f"region {region} is not a window inside [0, {length}]")
    if x1 - x0 == length:
        raise ValidationError("region covers the full chain; reduce nothing")
    vec = np.asarray(vec, dtype=np.complex128).reshape(-1)
    if vec.size != phys_dim**length:
        raise DimensionError(
            f"vector has {vec.size} amplitudes, expected {phys_dim**length}"
        )
    dl = phys_dim**x0
    dm = phys_dim ** (x1 - x0)
    dr = phys_dim ** (length - x1)
    psi = vec.reshape(dl, dm, dr)
    rho = np.einsum("amb,anb->mn", psi, psi.conj())
    return DensityMatrix(matrix=rho, region=(x0, x1))


def _psd_sqrt(m: np.ndarray) -> np.ndarray:
    w, v = hermitian_decompose(m)
    # Zero the numerical-rank tail: sqrt of roundoff-level eigenvalues would
    # inject sqrt(eps)-sized junk into the null directions.
    w = np.where(w > 1e-14 * max(float(w[0]), 0.0), w, 0.0)
    return (v * np.sqrt(w)) @ v.conj().T


def uhlmann_exact(rho, sigma) -> float:
    """Uhlmann fidelity ``Tr sqrt(sqrt(rho) sigma sqrt(rho))`` of two density matrices.

    Evaluated both through matrix square roots and as the trace norm of
    ``sqrt(sigma) @ sqrt(rho)``; the two routes must agree to 1e-10.
    """
    r = _as_density_matrix(rho)
    s = _as_density_matrix(sigma)
    if r.shape != s.shape:
        raise DimensionError(f"dimension mismatch: {r.shape} vs {s.shape}")
    sqrt_r = _psd_sqrt(r)
    sqrt_s = _psd_sqrt(s)
    f_trace_norm = trace_norm(sqrt_s @ sqrt_r)
    w, _ = hermitian_decompose(sqrt_r @ s @ sqrt_r)
    # Roundoff-level eigenvalues must be zeroed before the square root, or
    # each contributes sqrt(eps)-sized noise to the trace.
    w = np.where(w > 1e-14 * max(float(w[0]), 0.0), w, 0.0)
    f_direct = float(np.sum(np.sqrt(w)))
    if abs(f_trace_norm - f_direct) > 1e-10:
        raise NumericError(
            f"fidelity cross-check failed: {f_trace_norm!r} vs {f_direct!r}"
        )
    return f_trace_norm


def _window_views(vec_a, vec_b, length, window, phys_dim):
    x0, x1 = window
    if not (0 < x0 < x1 < length):
        raise ValidationError(
            f"window {window} must be interior to the chain of length {length}"
        )
    dl = phys_dim**x0
    dm = phys_dim ** (x1 - x0)
    dr = phys_dim ** (length - x1)
    a = np.asarray(vec_a, dtype=np.complex128).reshape(dl, dm, dr)
    b = np.asarray(vec_b, dtype=np.complex128).reshape(dl, dm, dr)
    return a, b


def restricted_fidelity(
    vec_a,
    vec_b,
    length: int,
    window: tuple[int, int],
    mode: str = "joint",
    *,
    restarts: int = 5,
    max_iterations: int = 200,
    tol: float = 1e-12,
    seed: int = 0,
    phys_dim: int = 2,
) -> float:
    """Window fidelity of two pure states via explicit complement rotations.

    ``joint`` mode maximizes ``|<b| (U on the full complement) |a>|`` over
    unitaries, which has the closed-form value
    ``tracenorm(a_mat @ b_mat.conj().T)`` for the window-to-complement
    matricizations; it equals the Uhlmann fidelity of the window reduced
    density matrices.  ``disjoint`` mode restricts the rotation to
    ``U_left (x) U_right`` and maximizes by alternating exact single-factor
    updates, restarted from the identity plus ``restarts - 1`` seeded random
    unitaries.
    """
    a, b = _window_views(vec_a, vec_b, length, window, phys_dim)
    dl, dm, dr = a.shape

    if mode == "joint":
        a_mat = a.transpose(1, 0, 2).reshape(dm, dl * dr)
        b_mat = b.transpose(1, 0, 2).reshape(dm, dl * dr)
        # trace norm of b_mat.conj().T @ a_mat, with the small dimension inside
        return trace_norm(inner_core(a_mat, b_mat))

    if mode != "disjoint":
        raise ValidationError(f"mode must be 'joint' or 'disjoint', got {mode!r}")

    rng = np.random.default_rng(seed)
    best = -np.inf
    any_converged = False
    for restart in range(max(restarts, 1)):
        if restart == 0:
            u_r = np.eye(dr, dtype=np.complex128)
        else:
            u_r = random_isometry(dr, dr, rng)
        value = 0.0
        converged = False
        for _ in range(max_iterations):
            m_l = np.einsum("lmr,kms,sr->lk", a, b.conj(), u_r, optimize=True)
            u_l, _ = optimal_isometry(m_l)
            m_r = np.einsum("lmr,kms,kl->rs", a, b.conj(), u_l, optimize=True)
            u_r, new_value = optimal_isometry(m_r)
            if abs(new_value - value) <= tol * max(new_value, 1e-30):
                value = new_value
                converged = True
                break
            value = new_value
        best = max(best, value)
        any_converged = any_converged or converged
    if not any_converged:
        warnings.warn(
            "disjoint restricted fidelity did not converge; returning best value",
            stacklevel=2,
        )
    return float(best)


def purify(x, w) -> np.ndarray:
    """Purification ``phi = x @ w`` of ``rho = x @ x.conj().T``.

    ``w`` must satisfy ``w @ w.conj().T = 1`` to 1e-10; its column count is
    the ancilla dimension.  The partial trace of the result over the ancilla
    reproduces ``rho`` exactly.
    """
    x = np.asarray(x, dtype=np.complex128)
    w = np.asarray(w, dtype=np.complex128)
    if x.ndim != 2 or w.ndim != 2:
        raise ValidationError("purify expects rank-2 tensors")
    if x.shape[1] != w.shape[0]:
        raise DimensionError(
            f"inner dimensions differ: x has {x.shape[1]} columns, w has {w.shape[0]} rows"
        )
    gram = w @ w.conj().T
    if np.max(np.abs(gram - np.eye(w.shape[0]))) > 1e-10:
        raise ValidationError("w is not isometric (w @ w.conj().T != 1)")
    return x @ w


def purification_decompose(phi, x, *, rank_rtol: float = 1e-8) -> np.ndarray:
    """Recover an isometric ``w`` with ``x @ w = phi`` from a purification.

    Works through the singular bases of ``x`` and ``phi``: the two singular
    spectra coincide because ``phi phi+ = x x+``, and the unitary relating the
    left singular bases is rescaled onto the right ones; degenerate clusters
    are aligned by the least-squares (polar) rotation.  Only ``x @ w = phi``
    is promised, not uniqueness: on the null space of ``x`` the returned ``w``
    is an arbitrary isometric completion.
    """
    phi = np.asarray(phi, dtype=np.complex128)
    x = np.asarray(x, dtype=np.complex128)
    if phi.ndim != 2 or x.ndim != 2 or phi.shape[0] != x.shape[0]:
        raise DimensionError("phi and x must be rank-2 with equal row counts")
    chi_x = x.shape[1]
    chi_phi = phi.shape[1]
    if chi_phi < chi_x:
        raise ValidationError(
            f"ancilla dimension {chi_phi} smaller than the factor width {chi_x}"
        )
    scale = max(float(np.max(np.abs(x @ x.conj().T))), 1e-300)
    residual = float(np.max(np.abs(phi @ phi.conj().T - x @ x.conj().T)))
    if residual > 1e-10 * scale:
        raise ValidationError(
            f"phi is not a purification of x @ x.conj().T (residual {residual:.3e})"
        )

    u_x, s_x, vh_x = np.linalg.svd(x, full_matrices=True)
    u_phi, s_phi, vh_phi = np.linalg.svd(phi, full_matrices=True)

    smax = s_x[0] if len(s_x) else 0.0
    rank = int(np.sum(s_x > rank_rtol * smax)) if smax > 0 else 0

    block = np.eye(chi_x, dtype=np.complex128)
    if rank > 0:
        u = u_x[:, :rank].conj().T @ u_phi[:, :rank]
        core = (u * s_phi[:rank][None, :]) / s_x[:rank][:, None]
        cu, _, cvh = np.linalg.svd(core)
        block[:rank, :rank] = cu @ cvh
    embed = np.eye(chi_x, chi_phi, dtype=np.complex128)
    return vh_x.conj().T @ block @ embed @ vh_phi
