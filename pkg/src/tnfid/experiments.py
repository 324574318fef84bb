"""The three fidelity applications on the transverse-field Ising chain.

* local quench: perturb a ground state with a single-site operator, evolve
  in real time, and profile half-system and two-site fidelities against the
  unperturbed state as functions of position;
* scale comparison: window fidelities between ground states at two field
  values as a function of window size, with the discrete derivative and
  both correlation lengths;
* convergence studies: window-fidelity deficits between ground states at
  two bond dimensions, and per-site branch fidelities between TTN
  optimization snapshots ``lag`` sweeps apart.

Every run returns an :class:`ExperimentRecord` whose rows follow one fixed
CSV schema per experiment; records are bitwise reproducible for fixed seeds
and configs in single-threaded mode.  Set the ``TNFID_THREADS`` environment
variable above 1 to parallelize independent probes (values then match the
serial run to ~1e-9).
"""

from __future__ import annotations

import json
import os
import time
from collections import deque
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import __version__
from .errors import ValidationError
from .fidelity import disjoint_window_fidelity, left_mixed_environments, right_mixed_environments
from .ising import PAULI_X, PAULI_Y, PAULI_Z, IsingSpec, ising_terms
from .mps import (
    EvolutionConfig,
    MatrixProductState,
    canonicalize,
    correlation_length,
    expect_local,
    product_mps,
    tebd_evolve,
)
from .tensor import (
    TruncationSpec,
    optimal_isometry,
    random_isometry,
    singular_values,
    trace_norm,
)
from .ttn import Branch, branch_fidelity, optimize_ground_state, random_ttn
from .exact import purification_decompose, purify

THREADS_ENV = "TNFID_THREADS"

PAULI_BY_NAME = {"X": PAULI_X, "Y": PAULI_Y, "Z": PAULI_Z}


def _thread_count() -> int:
    try:
        return max(1, int(os.environ.get(THREADS_ENV, "1")))
    except ValueError:
        return 1


def _map(fn, items):
    n = _thread_count()
    if n <= 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=n) as pool:
        return list(pool.map(fn, items))


@dataclass
class ExperimentRecord:
    """Rows of one experiment plus the configuration that produced them."""

    experiment: str
    parameters: dict
    columns: list[str]
    rows: list[tuple]
    provenance: dict = field(default_factory=dict)

    def _format(self, value) -> str:
        if isinstance(value, (bool, np.bool_)):
            return str(bool(value))
        if isinstance(value, (int, np.integer)):
            return str(int(value))
        if isinstance(value, (float, np.floating)):
            return format(float(value), ".17g")
        return str(value)

    def to_csv(self, path) -> None:
        """Write the rows as UTF-8 CSV plus a ``.meta.json`` sidecar."""
        path = Path(path)
        lines = [",".join(self.columns)]
        for row in self.rows:
            lines.append(",".join(self._format(v) for v in row))
        path.write_text("\n".join(lines) + "\n", encoding="utf-8")
        meta = {
            "experiment": self.experiment,
            "parameters": self.parameters,
            "provenance": self.provenance,
        }
        meta_path = path.with_suffix(".meta.json") if path.suffix else Path(str(path) + ".meta.json")
        meta_path.write_text(json.dumps(meta, indent=2, default=str) + "\n", encoding="utf-8")


def _provenance(**extra) -> dict:
    prov = {"version": __version__, "timestamp": time.strftime("%Y-%m-%dT%H:%M:%S")}
    prov.update(extra)
    return prov


# ---------------------------------------------------------------------------
# Ground-state preparation
# ---------------------------------------------------------------------------

#: Imaginary-time step ladder; each stage runs until the per-site energy
#: change per step falls below the convergence threshold.
DT_SCHEDULE = (0.1, 0.01, 0.001)
GS_THRESHOLD = 1e-10
GS_MAX_STEPS = 30000


def ising_ground_state_mps(
    h: float,
    length: int,
    chi: int,
    *,
    include_offset: bool = True,
    cache: dict | None = None,
) -> MatrixProductState:
    """Ising ground state via imaginary-time evolution at bond dimension ``chi``.

    Runs the full ``dt`` ladder at each bond dimension of an escalating
    sequence (10, 20, ..., chi), so the cheap stages supply the starting
    state for the expensive ones.  With a ``cache`` dict the intermediate
    bond dimensions are stored under ``(h, length, c, include_offset)`` keys
    and reused.
    """
    spec = IsingSpec(h=h, length=length, include_offset=include_offset)
    terms = ising_terms(spec)
    stages = sorted({c for c in (10, 20) if c < chi} | {chi})
    state: MatrixProductState | None = None
    for stage in stages:
        key = (h, length, stage, include_offset)
        if cache is not None and key in cache:
            state = cache[key]
            continue
        if state is None:
            state = product_mps([[1.0, 0.0]] * length)
        trunc = TruncationSpec(max_rank=stage, weight_cutoff=1e-14)
        for dt in DT_SCHEDULE:
            cfg = EvolutionConfig(
                dt=dt,
                steps=GS_MAX_STEPS,
                trotter_order=2,
                truncation=trunc,
                convergence_threshold=GS_THRESHOLD,
                energy_every=10,
            )
            state, _ = tebd_evolve(state, terms, cfg)
        if cache is not None:
            cache[key] = state
    return state


# ---------------------------------------------------------------------------
# Local quench
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class QuenchConfig:
    """Perturbation, sample times, evolution settings and probe kinds.

    ``evolution.dt`` must be purely imaginary (real-time step); sample
    ``times`` must be multiples of the step.  Probe kinds are any subset of
    ``left-half`` (cuts 1..L-1), ``right-half`` (same cuts) and ``two-site``
    (windows ``[x, x+2)``).
    """

    site: int
    times: tuple[float, ...]
    evolution: EvolutionConfig
    operator: np.ndarray = field(default_factory=lambda: PAULI_Z.copy())
    probes: tuple[str, ...] = ("two-site", "left-half", "right-half")

    def __post_init__(self) -> None:
        dt = complex(self.evolution.dt)
        if dt.real != 0 or dt.imag == 0:
            raise ValidationError("quench evolution requires a purely imaginary dt")
        if not self.times or any(t < 0 for t in self.times):
            raise ValidationError("sample times must be nonnegative")
        if list(self.times) != sorted(self.times):
            raise ValidationError("sample times must be ascending")
        for kind in self.probes:
            if kind not in ("two-site", "left-half", "right-half"):
                raise ValidationError(f"unknown probe kind {kind!r}")


def _apply_single_site(state: MatrixProductState, op: np.ndarray, site: int):
    """Apply a single-site operator; non-unitary operators renormalize."""
    op = np.asarray(op, dtype=np.complex128)
    d = state.phys_dim
    unitary = np.max(np.abs(op @ op.conj().T - np.eye(d))) <= 1e-10
    gammas = list(state.gammas)
    gammas[site] = np.einsum("qp,lpr->lqr", op, state.gammas[site])
    out = MatrixProductState(gammas, state.schmidt, canonical=state.canonical and unitary, validate=False)
    if not unitary:
        out = canonicalize(out)
    return out, unitary


def _two_site_fidelities(psi, ref, positions):
    """Two-site window fidelities at many positions, sharing nothing heavy:
    each window core is rank <= d**2 and built via the skinny route."""

    def one(x):
        core = _window_core(psi, ref, (x, x + 2))
        return float(np.sum(singular_values(core)))

    return _map(one, positions)


def _window_core(a, b, window):
    from .fidelity import _window_core_skinny  # small-window fast path

    return _window_core_skinny(a, b, window)


def run_quench(
    ground_state: MatrixProductState,
    terms,
    config: QuenchConfig,
) -> ExperimentRecord:
    """Quench a ground state and profile its fidelities against the original.

    Emits rows ``t, x, probe, fidelity, expect_z`` for every sampled time and
    probe position: ``x`` is the cut bond for half-system probes and the
    window start for two-site probes; ``expect_z`` is the Pauli-Z expectation
    at site ``min(x, L-1)`` of the evolved state.
    """
    L = ground_state.length
    if not 0 < config.site < L - 1:
        raise ValidationError(f"insertion site {config.site} must be interior")
    dt_step = abs(complex(config.evolution.dt).imag)

    psi, unitary = _apply_single_site(ground_state, config.operator, config.site)
    renormalized = not unitary

    front_hits_boundary = max(config.times) >= min(config.site, L - 1 - config.site)

    rows: list[tuple] = []
    t_prev = 0.0
    for t in config.times:
        span = t - t_prev
        steps = round(span / dt_step)
        if abs(steps * dt_step - span) > 1e-9:
            raise ValidationError(
                f"sample time {t} is not a multiple of the step {dt_step}"
            )
        if steps > 0:
            cfg = EvolutionConfig(
                dt=config.evolution.dt,
                steps=steps,
                trotter_order=config.evolution.trotter_order,
                truncation=config.evolution.truncation,
                energy_every=max(steps, 1),
            )
            psi, _ = tebd_evolve(psi, terms, cfg)
        t_prev = t

        z_profile = [expect_local(psi, PAULI_Z, x).real for x in range(L)]
        if "left-half" in config.probes or "right-half" in config.probes:
            left_envs = left_mixed_environments(ground_state, psi)
            right_envs = right_mixed_environments(ground_state, psi)
        for probe in config.probes:
            if probe == "left-half":
                for x in range(1, L):
                    # env rows live on psi's bond, columns on the reference's
                    core = (
                        psi.schmidt[x][:, None]
                        * left_envs[x]
                        * ground_state.schmidt[x][None, :]
                    )
                    value = float(np.sum(singular_values(core)))
                    rows.append((t, x, probe, value, z_profile[min(x, L - 1)]))
            elif probe == "right-half":
                for x in range(1, L):
                    core = (
                        psi.schmidt[x][:, None]
                        * right_envs[x]
                        * ground_state.schmidt[x][None, :]
                    )
                    value = float(np.sum(singular_values(core)))
                    rows.append((t, x, probe, value, z_profile[min(x, L - 1)]))
            else:
                positions = list(range(0, L - 1))
                values = _two_site_fidelities(psi, ground_state, positions)
                for x, value in zip(positions, values):
                    rows.append((t, x, probe, value, z_profile[x]))

    rows.sort(key=lambda r: (r[0], r[2], r[1]))
    return ExperimentRecord(
        experiment="quench",
        parameters={
            "length": L,
            "site": config.site,
            "times": list(config.times),
            "dt": dt_step,
            "probes": list(config.probes),
            "renormalized": renormalized,
            "front_hits_boundary_warning": bool(front_hits_boundary),
        },
        columns=["t", "x", "probe", "fidelity", "expect_z"],
        rows=rows,
        provenance=_provenance(),
    )


# ---------------------------------------------------------------------------
# Window sweeps shared by the scale-compare and convergence experiments
# ---------------------------------------------------------------------------


def window_fidelity_sweep(
    a: MatrixProductState,
    b: MatrixProductState,
    window_sizes,
    *,
    anchor: int | None = None,
    disjoint: bool = True,
    seed: int = 0,
) -> list[tuple[int, float, float]]:
    """Window and disjoint fidelities for growing windows at a fixed left edge.

    The window transfer object is grown one site at a time, so a full sweep
    costs one absorption per site plus one spectrum per requested size.
    Returns ``(size, F, F_d)`` tuples (``F_d`` is NaN when ``disjoint`` is
    off).
    """
    sizes = sorted(set(int(s) for s in window_sizes))
    if sizes[0] < 1:
        raise ValidationError("window sizes must be >= 1")
    L = a.length
    if anchor is None:
        anchor = max((L - sizes[-1]) // 2, 0)
    if anchor + sizes[-1] > L:
        raise ValidationError(
            f"anchor {anchor} plus largest window {sizes[-1]} exceeds the chain"
        )

    sb = b.schmidt[anchor]
    sa = a.schmidt[anchor]
    t = np.einsum("ik,jl,i,j->ijkl", np.eye(len(sb)), np.eye(len(sa)), sb, sa)
    out = []
    pos = anchor
    for size in sizes:
        while pos < anchor + size:
            t = np.tensordot(t, a.right_tensor(pos), axes=([3], [0]))
            t = np.tensordot(t, b.right_tensor(pos).conj(), axes=([2, 3], [0, 1]))
            t = t.transpose(0, 1, 3, 2)
            pos += 1
        bl, al, br, ar = t.shape
        f = float(np.sum(singular_values(t.transpose(0, 2, 1, 3).reshape(bl * br, al * ar))))
        if disjoint:
            fd = disjoint_window_fidelity(a, b, (anchor, anchor + size), transfer=t, seed=seed).value
        else:
            fd = float("nan")
        out.append((size, f, fd))
    return out


def run_scale_compare(
    h1: float,
    h2: float,
    window_sizes,
    *,
    length: int,
    chi: int,
    anchor: int | None = None,
    states: tuple[MatrixProductState, MatrixProductState] | None = None,
    cache: dict | None = None,
    seed: int = 0,
) -> ExperimentRecord:
    """Window fidelities between ground states at two fields, by window size.

    Emits ``window_size, F, F_d, dF_dM, xi_1, xi_2`` where ``dF_dM`` is the
    forward difference of ``F`` (last row repeats the previous slope) and
    the ``xi`` columns are the two states' correlation lengths.
    """
    if states is None:
        a = ising_ground_state_mps(h1, length, chi, cache=cache)
        b = ising_ground_state_mps(h2, length, chi, cache=cache)
    else:
        a, b = states
    xi_1 = correlation_length(a)
    xi_2 = correlation_length(b)
    sweep = window_fidelity_sweep(a, b, window_sizes, anchor=anchor, seed=seed)
    rows = []
    for i, (size, f, fd) in enumerate(sweep):
        if i + 1 < len(sweep):
            nsize, nf, _ = sweep[i + 1]
            slope = (nf - f) / (nsize - size)
        elif len(sweep) > 1:
            slope = rows[-1][3]
        else:
            slope = float("nan")
        rows.append((size, f, fd, slope, xi_1, xi_2))
    return ExperimentRecord(
        experiment="scale-compare",
        parameters={
            "h1": h1,
            "h2": h2,
            "length": length,
            "chi": chi,
            "anchor": anchor,
            "window_sizes": [s for s, _, _ in sweep],
        },
        columns=["window_size", "F", "F_d", "dF_dM", "xi_1", "xi_2"],
        rows=rows,
        provenance=_provenance(seed=seed),
    )


def run_convergence_chi(
    h: float,
    chi_pairs,
    window_sizes,
    *,
    length: int,
    anchor: int | None = None,
    cache: dict | None = None,
    states: dict | None = None,
    seed: int = 0,
) -> ExperimentRecord:
    """Window-fidelity deficits between ground states at paired bond dimensions.

    Emits ``window_size, chi_a, chi_b, one_minus_F, one_minus_Fd`` per pair;
    ``states`` may pre-supply ground states keyed by bond dimension.
    """
    rows = []
    for chi_a, chi_b in chi_pairs:
        if states is not None and chi_a in states:
            a = states[chi_a]
        else:
            a = ising_ground_state_mps(h, length, chi_a, cache=cache)
        if states is not None and chi_b in states:
            b = states[chi_b]
        else:
            b = ising_ground_state_mps(h, length, chi_b, cache=cache)
        for size, f, fd in window_fidelity_sweep(a, b, window_sizes, anchor=anchor, seed=seed):
            rows.append((size, chi_a, chi_b, 1.0 - f, 1.0 - fd))
    return ExperimentRecord(
        experiment="convergence-chi",
        parameters={"h": h, "length": length, "chi_pairs": [list(p) for p in chi_pairs]},
        columns=["window_size", "chi_a", "chi_b", "one_minus_F", "one_minus_Fd"],
        rows=rows,
        provenance=_provenance(seed=seed),
    )


def run_convergence_ttn(
    depth: int,
    chi: int,
    sweeps: int,
    lag: int = 10,
    window_sizes=None,
    *,
    h: float = 1.0,
    seed: int = 0,
) -> ExperimentRecord:
    """Per-site branch fidelities between TTN optimization snapshots.

    Optimizes a random TTN for the Ising ground state at field ``h`` and, for
    every sweep ``m > lag``, compares the snapshot to the one ``lag`` sweeps
    earlier through ``F**(1/|M|)`` of the central branch at each window size.
    The central branch stands in for the position-independent value of a
    translation-invariant tree: branches touching the open boundaries
    converge late for boundary reasons unrelated to the layer ordering.
    Rows with ``m <= lag`` are absent (no earlier snapshot to compare).
    """
    length = 2**depth
    if window_sizes is None:
        window_sizes = [2**t for t in range(1, depth)]
    sizes = sorted(set(int(s) for s in window_sizes))
    for s in sizes:
        if s & (s - 1) or not 2 <= s <= length // 2:
            raise ValidationError(f"window size {s} is not a branch size for depth {depth}")
    terms = ising_terms(IsingSpec(h=h, length=length))
    net = random_ttn(depth, chi, seed=seed)

    history: deque = deque(maxlen=lag)
    rows: list[tuple] = []

    def per_site_central(a, b, size: int) -> float:
        layer = size.bit_length() - 1
        position = (length // size) // 2
        value = branch_fidelity(a, b, Branch(layer, position)).value
        return float(value ** (1.0 / size))

    def on_sweep(m, snapshot):
        if len(history) == lag:
            old = history[0]
            results = _map(lambda size: per_site_central(snapshot, old, size), sizes)
            for size, value in zip(sizes, results):
                rows.append((m, size, value))
        history.append(snapshot)

    result = optimize_ground_state(net, terms, sweeps, callback=on_sweep)
    return ExperimentRecord(
        experiment="convergence-ttn",
        parameters={
            "depth": depth,
            "chi": chi,
            "sweeps": sweeps,
            "lag": lag,
            "h": h,
            "window_sizes": sizes,
            "final_energy": result.energies[-1],
        },
        columns=["iteration", "window_size", "per_site_F"],
        rows=rows,
        provenance=_provenance(seed=seed),
    )


# ---------------------------------------------------------------------------
# Self-test property suites
# ---------------------------------------------------------------------------


def selftest_suites(trials: int = 1000, seed: int = 0) -> list[tuple[str, bool, float]]:
    """Run the purification and isometry-maximality property suites.

    Returns ``(name, passed, worst_residual)`` triples: purification
    soundness (partial trace of ``x w`` returns ``x x+``, 1e-12), the
    decompose round-trip (``x w = phi`` at 1e-9), and trace-norm maximality
    of the closed-form isometry over random competitors (1e-12).
    """
    rng = np.random.default_rng(seed)
    results = []

    worst = 0.0
    for _ in range(trials):
        chi = int(rng.integers(2, 7))
        chi_x = int(rng.integers(1, 7))
        chi_phi = chi_x + int(rng.integers(0, 4))
        x = rng.standard_normal((chi, chi_x)) + 1j * rng.standard_normal((chi, chi_x))
        x /= np.linalg.norm(x)
        w = random_isometry(chi_x, chi_phi, rng)
        phi = purify(x, w)
        res = float(np.max(np.abs(phi @ phi.conj().T - x @ x.conj().T)))
        worst = max(worst, res)
    results.append(("purification-soundness", worst <= 1e-12, worst))

    worst = 0.0
    for _ in range(trials):
        chi = int(rng.integers(2, 7))
        chi_x = int(rng.integers(1, 7))
        chi_phi = chi_x + int(rng.integers(0, 4))
        x = rng.standard_normal((chi, chi_x)) + 1j * rng.standard_normal((chi, chi_x))
        x /= np.linalg.norm(x)
        phi = purify(x, random_isometry(chi_x, chi_phi, rng))
        w = purification_decompose(phi, x)
        res = float(np.max(np.abs(x @ w - phi)))
        res = max(res, float(np.max(np.abs(w @ w.conj().T - np.eye(chi_x)))))
        worst = max(worst, res)
    results.append(("purification-decompose-roundtrip", worst <= 1e-9, worst))

    worst = 0.0
    ok = True
    for _ in range(trials):
        r = int(rng.integers(1, 7))
        c = int(rng.integers(r, 8))
        m = rng.standard_normal((r, c)) + 1j * rng.standard_normal((r, c))
        w_opt, value = optimal_isometry(m)
        worst = max(worst, abs(value - trace_norm(m)))
        for _ in range(3):
            w_rand = random_isometry(c, r, rng)
            if abs(np.trace(w_rand @ m)) > value + 1e-12:
                ok = False
    results.append(("isometry-maximality", ok and worst <= 1e-12, worst))
    return results
