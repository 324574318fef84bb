"""Binary tree tensor networks of isometries.

A network over ``2**depth`` sites stores ``depth - 1`` layers of isometric
tensors with axes ``(top, left_child, right_child)``; ``layers[0]`` sits at
the bottom (children are physical sites) and each tensor in ``layers[k]``
coarse-grains a window of ``2**(k+1)`` contiguous sites.  The two top legs of
the last layer are joined by ``top_tensor`` (axes ``(left, right)``, unit
Frobenius norm).  Every isometry ``w`` satisfies
``w @ w.conj().T = 1`` on its top index after matricizing the children.

Subsystems separable by cutting a single leg are exactly the windows of size
``2**t`` aligned to the tree (``t = 1 .. depth-1``); those are the branches
enumerated by :func:`branch_regions` and fed to :func:`branch_fidelity`.
The ground-state optimizer performs single-tensor updates: each tensor is
replaced by the polar-isometric part of its negated linearized energy
environment, sweeping bottom-up, with the top tensor set to the ground
eigenvector of its effective Hamiltonian.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import (
    DimensionError,
    NumericError,
    ValidationError,
)
from .fidelity import FidelityReport
from .tensor import psd_factor, singular_values, svd_truncate

_EINSUM_OPT = True


class TreeTensorNetwork:
    """Perfect binary TTN; see module docstring for layout and conventions."""

    __slots__ = ("layers", "top_tensor", "phys_dim")

    def __init__(self, layers, top_tensor, phys_dim=2, validate=True):
        self.layers = [[np.asarray(w, dtype=np.complex128) for w in layer] for layer in layers]
        self.top_tensor = np.asarray(top_tensor, dtype=np.complex128)
        self.phys_dim = int(phys_dim)
        if validate:
            self._validate()

    def _validate(self) -> None:
        if len(self.layers) < 1:
            raise ValidationError("TTN needs depth >= 2 (at least one isometry layer)")
        n = len(self.layers[0])
        if n < 2 or n & (n - 1):
            raise ValidationError("bottom layer size must be a power of two >= 2")
        for k, layer in enumerate(self.layers):
            expected = n >> k
            if len(layer) != expected:
                raise ValidationError(
                    f"layer {k} has {len(layer)} tensors, expected {expected}"
                )
            for p, w in enumerate(layer):
                if w.ndim != 3:
                    raise ValidationError(f"isometry ({k},{p}) must be rank 3")
                cl = self.phys_dim if k == 0 else self.layers[k - 1][2 * p].shape[0]
                cr = self.phys_dim if k == 0 else self.layers[k - 1][2 * p + 1].shape[0]
                if w.shape[1] != cl or w.shape[2] != cr:
                    raise DimensionError(
                        f"isometry ({k},{p}) child extents {w.shape[1:]} do not match "
                        f"({cl}, {cr})"
                    )
                if not np.all(np.isfinite(w)):
                    raise ValidationError(f"non-finite entries in isometry ({k},{p})")
        if len(self.layers[-1]) != 2:
            raise ValidationError("top layer must hold exactly two tensors")
        lt, rt = self.layers[-1][0].shape[0], self.layers[-1][1].shape[0]
        if self.top_tensor.shape != (lt, rt):
            raise DimensionError(
                f"top tensor shape {self.top_tensor.shape} does not match ({lt}, {rt})"
            )

    @property
    def depth(self) -> int:
        return len(self.layers) + 1

    @property
    def num_sites(self) -> int:
        return 2 * len(self.layers[0])

    def copy(self) -> "TreeTensorNetwork":
        return TreeTensorNetwork(
            [[w.copy() for w in layer] for layer in self.layers],
            self.top_tensor.copy(),
            phys_dim=self.phys_dim,
            validate=False,
        )

    def same_shape(self, other: "TreeTensorNetwork") -> bool:
        return (
            self.depth == other.depth
            and self.phys_dim == other.phys_dim
        )


@dataclass(frozen=True)
class Branch:
    """Single-cut subsystem: the window of ``2**layer`` sites starting at
    ``position * 2**layer`` (layer 1 holds the two-site windows)."""

    layer: int
    position: int

    @property
    def window(self) -> tuple[int, int]:
        size = 2**self.layer
        return (self.position * size, (self.position + 1) * size)


def isometry_residual(ttn: TreeTensorNetwork) -> float:
    """Largest deviation from isometricity over all tensors.

    For each isometry this is ``max|w w+ - 1|`` on the top index; for the
    top tensor the deviation of its Frobenius norm from one.
    """
    res = 0.0
    for layer in ttn.layers:
        for w in layer:
            m = w.reshape(w.shape[0], -1)
            g = m @ m.conj().T
            res = max(res, float(np.max(np.abs(g - np.eye(g.shape[0])))))
    res = max(res, abs(float(np.linalg.norm(ttn.top_tensor)) - 1.0))
    return res


def random_ttn(depth: int, chi: int, phys_dim: int = 2, seed: int = 0) -> TreeTensorNetwork:
    """Random isometric TTN, reproducible per seed.

    Top-leg dimensions grow as ``min(chi, children_product)`` so every tensor
    can be projected to an exact isometry.
    """
    if depth < 2:
        raise ValidationError(f"depth must be >= 2, got {depth}")
    if chi < 1:
        raise ValidationError(f"chi must be >= 1, got {chi}")
    rng = np.random.default_rng(seed)
    layers = []
    child_dim = phys_dim
    n_nodes = 2 ** (depth - 1)
    for _ in range(depth - 1):
        top_dim = min(chi, child_dim * child_dim)
        layer = []
        for _ in range(n_nodes):
            g = rng.standard_normal((top_dim, child_dim * child_dim)) + 1j * rng.standard_normal(
                (top_dim, child_dim * child_dim)
            )
            res = svd_truncate(g)
            w = (res.u @ res.v.conj().T).reshape(top_dim, child_dim, child_dim)
            layer.append(w)
        layers.append(layer)
        child_dim = top_dim
        n_nodes //= 2
    top = rng.standard_normal((child_dim, child_dim)) + 1j * rng.standard_normal(
        (child_dim, child_dim)
    )
    top = top / np.linalg.norm(top)
    return TreeTensorNetwork(layers, top, phys_dim=phys_dim)


def branch_regions(ttn: TreeTensorNetwork) -> list[Branch]:
    """All proper single-cut branches, smallest windows first.

    The full chain is deliberately not included: it is not separated by an
    internal leg, and its "fidelity" is just the state overlap.
    """
    out = []
    length = ttn.num_sites
    for layer in range(1, ttn.depth):
        size = 2**layer
        if size >= length:
            break
        out.extend(Branch(layer, p) for p in range(length // size))
    return out


def _require_branch(ttn: TreeTensorNetwork, branch: Branch) -> None:
    if not (1 <= branch.layer <= ttn.depth - 1):
        raise ValidationError(f"branch layer {branch.layer} out of range")
    if not (0 <= branch.position < ttn.num_sites // 2**branch.layer):
        raise ValidationError(f"branch position {branch.position} out of range")
    if 2**branch.layer >= ttn.num_sites:
        raise ValidationError("branch covers the full chain; use the state overlap")


def branch_environment(ttn: TreeTensorNetwork, branch: Branch) -> np.ndarray:
    """Reduced density matrix on a branch's cut leg.

    Contracts everything outside the branch, collapsing off-path isometries
    against their conjugates; the result is Hermitian PSD with unit trace.
    """
    _require_branch(ttn, branch)
    k = branch.layer - 1
    pos = branch.position
    top_level = len(ttn.layers) - 1

    omega = ttn.top_tensor
    ancestor = pos >> (top_level - k) if top_level > k else pos
    if ancestor == 0:
        rho = np.einsum("tr,sr->ts", omega, omega.conj())
    else:
        rho = np.einsum("lt,ls->ts", omega, omega.conj())

    for level in range(top_level, k, -1):
        node = pos >> (level - k)
        side = (pos >> (level - k - 1)) & 1
        w = ttn.layers[level][node]
        if side == 0:
            rho = np.einsum("ts,tab,scb->ac", rho, w, w.conj(), optimize=_EINSUM_OPT)
        else:
            rho = np.einsum("ts,tab,sac->bc", rho, w, w.conj(), optimize=_EINSUM_OPT)

    trace = float(np.trace(rho).real)
    if abs(trace - 1.0) > 1e-8:
        raise NumericError(f"branch environment trace {trace!r} deviates from 1")
    return rho


def _branch_transfer(a: TreeTensorNetwork, b: TreeTensorNetwork, branch: Branch) -> np.ndarray:
    """Mixed branch transfer matrix ``B[b_cut, a_cut]``: the branch isometries
    of ``a`` contracted against the conjugated branch isometries of ``b``
    over all physical indices."""

    def node_matrix(level: int, pos: int) -> np.ndarray:
        wa = a.layers[level][pos]
        wb = b.layers[level][pos]
        if level == 0:
            return np.einsum("upq,tpq->ut", wb.conj(), wa)
        ml = node_matrix(level - 1, 2 * pos)
        mr = node_matrix(level - 1, 2 * pos + 1)
        return np.einsum(
            "uab,ac,bd,tcd->ut", wb.conj(), ml, mr, wa, optimize=_EINSUM_OPT
        )

    return node_matrix(branch.layer - 1, branch.position)


def branch_fidelity(a: TreeTensorNetwork, b: TreeTensorNetwork, branch: Branch) -> FidelityReport:
    """Uhlmann fidelity of two TTN states on a single-cut branch window.

    Factors each state's cut-leg density matrix as ``D = C C+`` and returns
    the trace norm of ``C_b+ B C_a`` with ``B`` the mixed branch transfer
    matrix.  Cost ``O(chi**4 * depth)``.
    """
    if not a.same_shape(b):
        raise DimensionError("TTNs differ in tree shape or physical dimension")
    _require_branch(a, branch)
    c_a = psd_factor(branch_environment(a, branch))
    c_b = psd_factor(branch_environment(b, branch))
    core = c_b.conj().T @ _branch_transfer(a, b, branch) @ c_a
    s = singular_values(core)
    return FidelityReport(value=float(np.sum(s)), singular_spectrum=s, method="branch")


# ---------------------------------------------------------------------------
# Energy optimization: operator ascents, density/environment descents, and
# the polar single-tensor update.
# ---------------------------------------------------------------------------


def _term_matrix(term, d: int) -> np.ndarray:
    return np.asarray(term, dtype=np.complex128).reshape(d * d, d * d)


def _sandwich(w, op_l, op_r, pair):
    """Ascend children-leg operators through one isometry: ``W+ O W``."""
    acc = None
    if op_l is not None:
        part = np.einsum("ca,tab->tcb", op_l, w)
        acc = part if acc is None else acc + part
    if op_r is not None:
        part = np.einsum("cb,tab->tac", op_r, w)
        acc = part if acc is None else acc + part
    if pair is not None:
        part = np.einsum("cdab,tab->tcd", pair, w, optimize=_EINSUM_OPT)
        acc = part if acc is None else acc + part
    if acc is None:
        return None
    return np.einsum("ucd,tcd->ut", w.conj(), acc)


def _ascend_cross(w1, w2, pair):
    """Ascend a pair operator straddling two adjacent nodes.

    ``pair`` acts on (right child of node 1, left child of node 2); the
    result acts on the two top legs, axes (out1, out2, in1, in2).
    """
    if pair is None:
        return None
    g1 = np.einsum("uab,tac->utbc", w1.conj(), w1)  # (t1', t1, b', b)
    g2 = np.einsum("uad,tcd->utac", w2.conj(), w2)  # (t2', t2, c', c)
    return np.einsum("utxy,xzyw,vszw->uvts", g1, pair, g2, optimize=_EINSUM_OPT)


def _ascend_operators(ttn: TreeTensorNetwork, terms) -> list[tuple[list, list]]:
    """Coarse-grain bond terms through the tree.

    Returns ``ops[j] = (hloc, hpair)`` for leg levels ``j = 0`` (physical
    sites) through ``j = depth - 1`` (the two top legs): ``hloc[i]`` collects
    every term fully inside leg ``i``'s window, ``hpair[i]`` the term
    crossing between the windows of legs ``i`` and ``i + 1``.
    """
    d = ttn.phys_dim
    length = ttn.num_sites
    if len(terms) != length - 1:
        raise DimensionError(f"need {length - 1} bond terms, got {len(terms)}")
    hloc: list = [None] * length
    hpair: list = [
        None if t is None else np.asarray(t, dtype=np.complex128) for t in terms
    ]
    ops = [(hloc, hpair)]
    for k, layer in enumerate(ttn.layers):
        prev_loc, prev_pair = ops[k]
        n = len(layer)
        hloc = [
            _sandwich(layer[v], prev_loc[2 * v], prev_loc[2 * v + 1], prev_pair[2 * v])
            for v in range(n)
        ]
        hpair = [
            _ascend_cross(layer[v], layer[v + 1], prev_pair[2 * v + 1])
            for v in range(n - 1)
        ]
        ops.append((hloc, hpair))
    return ops


def _top_hamiltonian(ttn: TreeTensorNetwork, ops) -> np.ndarray | None:
    hloc, hpair = ops[-1]
    dl = ttn.layers[-1][0].shape[0]
    dr = ttn.layers[-1][1].shape[0]
    h = None
    if hloc[0] is not None:
        h = np.kron(hloc[0], np.eye(dr))
    if hloc[1] is not None:
        part = np.kron(np.eye(dl), hloc[1])
        h = part if h is None else h + part
    if hpair[0] is not None:
        part = hpair[0].reshape(dl * dr, dl * dr)
        h = part if h is None else h + part
    return h


def ttn_energy(ttn: TreeTensorNetwork, terms) -> float:
    """Energy of a nearest-neighbor Hamiltonian given as bond terms."""
    ops = _ascend_operators(ttn, terms)
    h = _top_hamiltonian(ttn, ops)
    if h is None:
        return 0.0
    vec = ttn.top_tensor.reshape(-1)
    return float((vec.conj() @ h @ vec).real)


def _descend_densities(ttn: TreeTensorNetwork):
    """Single-leg and adjacent-pair reduced density matrices at every level.

    Index conventions: ``rho[t, t']`` with ket first, and
    ``rhopair[t1, t2, t1', t2']`` with both kets first.
    """
    omega = ttn.top_tensor
    top = len(ttn.layers) - 1
    rho = {top: [omega @ omega.conj().T, omega.T @ omega.conj()]}
    rhopair = {top: [np.einsum("ab,cd->abcd", omega, omega.conj())]}
    for k in range(top, 0, -1):
        layer = ttn.layers[k]
        n = len(layer)
        rho_lo: list = [None] * (2 * n)
        pair_lo: list = [None] * (2 * n - 1)
        for v, w in enumerate(layer):
            r = rho[k][v]
            rho_lo[2 * v] = np.einsum("ts,tab,scb->ac", r, w, w.conj(), optimize=_EINSUM_OPT)
            rho_lo[2 * v + 1] = np.einsum("ts,tab,sac->bc", r, w, w.conj(), optimize=_EINSUM_OPT)
            pair_lo[2 * v] = np.einsum("ts,tab,scd->abcd", r, w, w.conj(), optimize=_EINSUM_OPT)
        for v in range(n - 1):
            rp = rhopair[k][v]
            w1, w2 = layer[v], layer[v + 1]
            g1 = np.einsum("tab,sac->tsbc", w1, w1.conj())
            g2 = np.einsum("tcd,sed->tsce", w2, w2.conj())
            pair_lo[2 * v + 1] = np.einsum(
                "tuTU,tTbB,uUcC->bcBC", rp, g1, g2, optimize=_EINSUM_OPT
            )
        rho[k - 1] = rho_lo
        rhopair[k - 1] = pair_lo
    return rho, rhopair


def _descend_outside(ttn: TreeTensorNetwork, ops, rho, rhopair):
    """Outside-term environments ``F[t_bra, t_ket]`` on every leg.

    ``F`` at a leg contracts all tensors and Hamiltonian terms that live
    entirely outside the leg's subtree and do not touch the leg itself.
    """
    omega = ttn.top_tensor
    top = len(ttn.layers) - 1
    hloc_top = ops[top + 1][0]
    f_top_left = (
        np.zeros((omega.shape[0],) * 2, dtype=np.complex128)
        if hloc_top[1] is None
        else np.einsum("ux,xy,ty->ut", omega.conj(), hloc_top[1], omega)
    )
    f_top_right = (
        np.zeros((omega.shape[1],) * 2, dtype=np.complex128)
        if hloc_top[0] is None
        else np.einsum("xu,xy,yt->ut", omega.conj(), hloc_top[0], omega)
    )
    outside = {top: [f_top_left, f_top_right]}
    for k in range(top, 0, -1):
        layer = ttn.layers[k]
        n = len(layer)
        prev_loc, prev_pair = ops[k]
        f_lo: list = [None] * (2 * n)
        for v, w in enumerate(layer):
            f = outside[k][v]
            r = rho[k][v]
            f_lc = np.einsum("ut,tab,ucb->ca", f, w, w.conj(), optimize=_EINSUM_OPT)
            f_rc = np.einsum("ut,tab,uad->db", f, w, w.conj(), optimize=_EINSUM_OPT)
            if prev_loc[2 * v + 1] is not None:
                f_lc = f_lc + np.einsum(
                    "ts,tab,scd,db->ca", r, w, w.conj(), prev_loc[2 * v + 1], optimize=_EINSUM_OPT
                )
            if prev_loc[2 * v] is not None:
                f_rc = f_rc + np.einsum(
                    "ts,tab,scd,ca->db", r, w, w.conj(), prev_loc[2 * v], optimize=_EINSUM_OPT
                )
            if v + 1 < n and prev_pair[2 * v + 1] is not None:
                w2 = layer[v + 1]
                rp = rhopair[k][v]
                g2 = np.einsum("uad,tcd->utac", w2.conj(), w2)
                k2 = np.einsum(
                    "tuTU,UuXY,xXyY->tTxy", rp, g2, prev_pair[2 * v + 1], optimize=_EINSUM_OPT
                )
                f_lc = f_lc + np.einsum("tTxy,tay,Tcx->ca", k2, w, w.conj(), optimize=_EINSUM_OPT)
            if v > 0 and prev_pair[2 * v - 1] is not None:
                w1 = layer[v - 1]
                rp = rhopair[k][v - 1]
                g1 = np.einsum("uab,tac->utbc", w1.conj(), w1)
                k2 = np.einsum(
                    "tuTU,TtXY,XzYc->uUzc", rp, g1, prev_pair[2 * v - 1], optimize=_EINSUM_OPT
                )
                f_rc = f_rc + np.einsum("uUzc,ucd,UzD->Dd", k2, w, w.conj(), optimize=_EINSUM_OPT)
            f_lo[2 * v] = f_lc
            f_lo[2 * v + 1] = f_rc
        outside[k - 1] = f_lo
    return outside


def _node_environment(ttn, ops, rho, rhopair, outside, k, v):
    """Linearized energy environment of isometry ``(k, v)``: the derivative
    of the energy with respect to the conjugated tensor, axes matching
    (top, left_child, right_child)."""
    w = ttn.layers[k][v]
    prev_loc, prev_pair = ops[k]
    r = rho[k][v]
    env = np.zeros_like(w)

    acc = None
    if prev_loc[2 * v] is not None:
        part = np.einsum("ca,tab->tcb", prev_loc[2 * v], w)
        acc = part if acc is None else acc + part
    if prev_loc[2 * v + 1] is not None:
        part = np.einsum("cb,tab->tac", prev_loc[2 * v + 1], w)
        acc = part if acc is None else acc + part
    if prev_pair[2 * v] is not None:
        part = np.einsum("cdab,tab->tcd", prev_pair[2 * v], w, optimize=_EINSUM_OPT)
        acc = part if acc is None else acc + part
    if acc is not None:
        env = env + np.tensordot(r, acc, axes=(0, 0))

    n = len(ttn.layers[k])
    if v > 0 and prev_pair[2 * v - 1] is not None:
        w1 = ttn.layers[k][v - 1]
        rp = rhopair[k][v - 1]
        g1 = np.einsum("uab,tac->utbc", w1.conj(), w1)
        k1 = np.einsum("tuTU,Ttxy->uUxy", rp, g1, optimize=_EINSUM_OPT)
        k2 = np.einsum("uUxy,xzyc->uUzc", k1, prev_pair[2 * v - 1], optimize=_EINSUM_OPT)
        env = env + np.einsum("uUzc,ucd->Uzd", k2, w, optimize=_EINSUM_OPT)
    if v + 1 < n and prev_pair[2 * v + 1] is not None:
        w2 = ttn.layers[k][v + 1]
        rp = rhopair[k][v]
        g2 = np.einsum("uad,tcd->utac", w2.conj(), w2)
        k1 = np.einsum("tuTU,UuXY->tTXY", rp, g2, optimize=_EINSUM_OPT)
        k2 = np.einsum("tTXY,xXyY->tTxy", k1, prev_pair[2 * v + 1], optimize=_EINSUM_OPT)
        env = env + np.einsum("tTxy,tay->Tax", k2, w, optimize=_EINSUM_OPT)

    env = env + np.tensordot(outside[k][v], w, axes=(1, 0))
    return env


def _polar_update(env: np.ndarray) -> np.ndarray | None:
    """Isometry minimizing the linearized energy, or None for a zero environment."""
    mat = env.reshape(env.shape[0], -1)
    if np.max(np.abs(mat)) < 1e-300:
        return None
    res = svd_truncate(mat)
    return (-(res.u @ res.v.conj().T)).reshape(env.shape)


def _shift_terms(terms, d: int):
    """Shift each bond term negative semidefinite: ``h - lambda_max * 1``.

    Polar updates then always point toward lower energy; the total shift is
    added back when reporting energies.
    """
    shifted = []
    total = 0.0
    for t in terms:
        if t is None:
            shifted.append(None)
            continue
        h = _term_matrix(t, d)
        lam = float(np.linalg.eigvalsh(h)[-1])
        total += lam
        s = h - lam * np.eye(h.shape[0])
        if np.max(np.abs(s)) < 1e-300:
            shifted.append(None)
        else:
            shifted.append(s.reshape(d, d, d, d))
    return shifted, total


@dataclass
class OptimizeResult:
    network: TreeTensorNetwork
    energies: list[float]
    snapshots: list[TreeTensorNetwork]


def optimize_ground_state(
    ttn: TreeTensorNetwork,
    terms,
    sweeps: int,
    *,
    keep_snapshots: bool = False,
    callback=None,
    energy_tol: float | None = None,
) -> OptimizeResult:
    """Minimize the energy of nearest-neighbor ``terms`` over isometric TTNs.

    Performs ``sweeps`` bottom-up passes of single-tensor polar updates plus
    a top-tensor eigensolve.  ``energies`` holds the initial energy followed
    by one value per sweep.  ``callback(sweep, network)`` is invoked after
    every sweep with a snapshot copy; ``keep_snapshots`` stores them on the
    result as well.  With ``energy_tol`` set, stops early once the energy
    change stays below it for three consecutive sweeps.
    """
    if sweeps < 0:
        raise ValidationError("sweeps must be >= 0")
    d = ttn.phys_dim
    shifted, shift_total = _shift_terms(terms, d)
    state = ttn.copy()
    energies = [ttn_energy(state, terms)]
    snapshots: list[TreeTensorNetwork] = []
    quiet = 0

    for sweep in range(1, sweeps + 1):
        ops = _ascend_operators(state, shifted)
        rho, rhopair = _descend_densities(state)
        outside = _descend_outside(state, ops, rho, rhopair)
        for k in range(len(state.layers)):
            layer = state.layers[k]
            for v in range(len(layer)):
                env = _node_environment(state, ops, rho, rhopair, outside, k, v)
                new = _polar_update(env)
                if new is not None:
                    layer[v] = new
            prev_loc, prev_pair = ops[k]
            n = len(layer)
            ops[k + 1] = (
                [
                    _sandwich(layer[v], prev_loc[2 * v], prev_loc[2 * v + 1], prev_pair[2 * v])
                    for v in range(n)
                ],
                [
                    _ascend_cross(layer[v], layer[v + 1], prev_pair[2 * v + 1])
                    for v in range(n - 1)
                ],
            )
        h = _top_hamiltonian(state, ops)
        if h is None:
            energy = 0.0 + shift_total
        else:
            wvals, wvecs = np.linalg.eigh((h + h.conj().T) / 2.0)
            vec = wvecs[:, 0]
            state.top_tensor = vec.reshape(state.top_tensor.shape)
            energy = float(wvals[0]) + shift_total
        energies.append(energy)

        if callback is not None or keep_snapshots:
            snap = state.copy()
            if keep_snapshots:
                snapshots.append(snap)
            if callback is not None:
                callback(sweep, snap)

        if energy_tol is not None and len(energies) >= 2:
            if abs(energies[-1] - energies[-2]) < energy_tol:
                quiet += 1
                if quiet >= 3:
                    break
            else:
                quiet = 0

    return OptimizeResult(network=state, energies=energies, snapshots=snapshots)
