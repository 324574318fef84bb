"""Tests for the Ising terms, serialization container, experiments, and CLI."""

import json
from functools import reduce
from pathlib import Path

import numpy as np
import pytest

from tnfid import exact, fidelity, mps, ttn
from tnfid.cli import main as cli_main
from tnfid.errors import LoadError, ValidationError
from tnfid.experiments import (
    QuenchConfig,
    run_convergence_chi,
    run_convergence_ttn,
    run_quench,
    run_scale_compare,
    selftest_suites,
    window_fidelity_sweep,
)
from tnfid.ising import (
    ENERGY_OFFSET,
    ID2,
    PAULI_X,
    PAULI_Z,
    IsingSpec,
    dense_from_terms,
    ground_state_exact,
    ising_dense,
    ising_terms,
)
from tnfid.mps import EvolutionConfig, chain_energy
from tnfid.serialization import load_network, save_network
from tnfid.tensor import TruncationSpec


# -- Ising terms -------------------------------------------------------------


def test_two_site_chain_single_term():
    terms = ising_terms(IsingSpec(h=0.0, length=2, include_offset=False))
    assert len(terms) == 1
    expected = -0.5 * np.kron(PAULI_X, PAULI_X)
    assert np.max(np.abs(terms[0].reshape(4, 4) - expected)) <= 1e-15
    energy, _ = ground_state_exact(IsingSpec(h=0.0, length=2, include_offset=False))
    assert energy == pytest.approx(-0.5)


def test_strong_field_ground_state_aligns_with_z():
    energy, vec = ground_state_exact(IsingSpec(h=50.0, length=6))
    basis_zero = np.zeros(64)
    basis_zero[0] = 1.0
    assert abs(np.vdot(basis_zero, vec)) >= 0.999


def test_terms_reassemble_the_hamiltonian():
    # Independent assembly straight from the definition: -1/2 sum of XX + hZ
    # minus the offset, one term per site.
    L, h = 5, 1.3
    dim = 2**L
    href = np.zeros((dim, dim), dtype=complex)

    def embed(op, idx):
        mats = [ID2] * L
        mats[idx] = op
        return reduce(np.kron, mats)

    for i in range(L - 1):
        href += -0.5 * (embed(PAULI_X, i) @ embed(PAULI_X, i + 1))
    for i in range(L):
        href += -0.5 * (h * embed(PAULI_Z, i) - ENERGY_OFFSET * np.eye(dim))
    got = dense_from_terms(ising_terms(IsingSpec(h=h, length=L)), L)
    assert np.max(np.abs(got - href)) <= 1e-12


def test_offset_shifts_but_does_not_zero_the_energy():
    # The literal 4/(2pi) constant cancels only half of the bulk energy
    # density (the remainder sits at -1/pi per site), so no absolute-energy
    # claim is made anywhere; this pins the measured effect.
    with_offset, _ = ground_state_exact(IsingSpec(h=1.0, length=12))
    without, _ = ground_state_exact(IsingSpec(h=1.0, length=12, include_offset=False))
    assert with_offset - without == pytest.approx(12 * ENERGY_OFFSET / 2, abs=1e-9)
    assert abs(with_offset / 12 + 1 / np.pi) <= 0.03


def test_dense_ground_energy_matches_tebd(ising_gs):
    spec = IsingSpec(h=1.0, length=12)
    e_exact, _ = ground_state_exact(spec)
    state = ising_gs(1.0, 12, 32)
    assert abs(chain_energy(state, ising_terms(spec)) - e_exact) <= 1e-6


def test_ising_dense_guard():
    from tnfid.errors import CapacityError

    with pytest.raises(CapacityError):
        ising_dense(IsingSpec(h=1.0, length=15))


# -- serialization -----------------------------------------------------------


def _dir_bytes(root: Path) -> dict:
    return {p.name: p.read_bytes() for p in sorted(root.iterdir())}


def test_mps_roundtrip_bit_exact(tmp_path):
    state = mps.random_mps(8, 2, 4, seed=30)
    p1 = tmp_path / "one"
    p2 = tmp_path / "two"
    save_network(p1, state)
    loaded = load_network(p1)
    save_network(p2, loaded)
    assert _dir_bytes(p1) == _dir_bytes(p2)
    assert loaded.canonical
    for ga, gb in zip(state.gammas, loaded.gammas):
        assert np.array_equal(ga, gb)
    assert np.array_equal(
        exact.mps_to_statevector(state), exact.mps_to_statevector(loaded)
    )


def test_ttn_roundtrip_bit_exact(tmp_path):
    net = ttn.random_ttn(3, 4, seed=31)
    p1 = tmp_path / "one"
    p2 = tmp_path / "two"
    save_network(p1, net)
    loaded = load_network(p1)
    save_network(p2, loaded)
    assert _dir_bytes(p1) == _dir_bytes(p2)
    assert np.array_equal(
        exact.ttn_to_statevector(net), exact.ttn_to_statevector(loaded)
    )


def test_fidelity_identical_after_roundtrip(tmp_path):
    a = mps.random_mps(8, 2, 4, seed=32)
    b = mps.random_mps(8, 2, 4, seed=33)
    before = fidelity.half_system_fidelity(a, b, 4).value
    save_network(tmp_path / "a", a)
    save_network(tmp_path / "b", b)
    after = fidelity.half_system_fidelity(
        load_network(tmp_path / "a"), load_network(tmp_path / "b"), 4
    ).value
    assert before == after  # bit-identical inputs, identical value


def test_load_rejects_missing_and_corrupt_containers(tmp_path):
    with pytest.raises(LoadError):
        load_network(tmp_path / "nope")
    root = tmp_path / "bad"
    root.mkdir()
    (root / "manifest.json").write_text("{not json")
    with pytest.raises(LoadError):
        load_network(root)


def test_load_rejects_version_mismatch(tmp_path):
    state = mps.random_mps(4, 2, 2, seed=34)
    save_network(tmp_path / "s", state)
    mf = tmp_path / "s" / "manifest.json"
    manifest = json.loads(mf.read_text())
    manifest["format_version"] = 99
    mf.write_text(json.dumps(manifest))
    with pytest.raises(LoadError):
        load_network(tmp_path / "s")


def test_load_rejects_shape_inconsistency(tmp_path):
    state = mps.random_mps(4, 2, 2, seed=35)
    save_network(tmp_path / "s", state)
    target = tmp_path / "s" / "gamma_0001.bin"
    target.write_bytes(target.read_bytes()[:-16])
    with pytest.raises(LoadError):
        load_network(tmp_path / "s")


# -- experiments --------------------------------------------------------------


@pytest.fixture(scope="module")
def small_gs():
    from tnfid.experiments import ising_ground_state_mps

    return ising_ground_state_mps(1.0, 16, 12)


def quench_config(times, dt=0.05, chi=16, probes=("two-site", "left-half", "right-half")):
    return QuenchConfig(
        site=8,
        times=tuple(times),
        evolution=EvolutionConfig(
            dt=-1j * dt,
            steps=1,
            truncation=TruncationSpec(max_rank=chi, weight_cutoff=1e-14),
        ),
        probes=tuple(probes),
    )


def test_quench_time_zero_probes(small_gs):
    terms = ising_terms(IsingSpec(h=1.0, length=16))
    record = run_quench(small_gs, terms, quench_config([0.0]))
    assert record.columns == ["t", "x", "probe", "fidelity", "expect_z"]
    rows = {(r[2], r[1]): r[3] for r in record.rows}
    # Z barely changes the field-aligned ground state, and the t=0 state is
    # exactly Z|E0> renormalized; probes far from the insertion read 1.
    assert rows[("left-half", 1)] == pytest.approx(1.0, abs=1e-6)
    assert all(0.0 <= r[3] <= 1.0 + 1e-9 for r in record.rows)


def test_quench_profile_properties(small_gs):
    terms = ising_terms(IsingSpec(h=1.0, length=16))
    record = run_quench(small_gs, terms, quench_config([1.0, 2.0], dt=0.05))
    left = {
        (r[0], r[1]): r[3] for r in record.rows if r[2] == "left-half"
    }
    for t in (1.0, 2.0):
        values = [left[(t, x)] for x in range(1, 16)]
        for smaller, larger in zip(values, values[1:]):
            assert larger <= smaller + 1e-6
        assert values[0] == pytest.approx(1.0, abs=1e-6)
    # far-right cut approaches the full overlap
    psi = small_gs  # reference state
    assert record.parameters["front_hits_boundary_warning"] is False


def test_quench_reproducible(small_gs):
    terms = ising_terms(IsingSpec(h=1.0, length=16))
    r1 = run_quench(small_gs, terms, quench_config([1.0]))
    r2 = run_quench(small_gs, terms, quench_config([1.0]))
    assert r1.rows == r2.rows


def test_quench_threaded_matches_serial(small_gs, monkeypatch):
    terms = ising_terms(IsingSpec(h=1.0, length=16))
    serial = run_quench(small_gs, terms, quench_config([1.0]))
    monkeypatch.setenv("TNFID_THREADS", "4")
    threaded = run_quench(small_gs, terms, quench_config([1.0]))
    assert len(serial.rows) == len(threaded.rows)
    for r1, r2 in zip(serial.rows, threaded.rows):
        assert r1[:3] == r2[:3]
        assert abs(r1[3] - r2[3]) <= 1e-9
        assert abs(r1[4] - r2[4]) <= 1e-9


def test_quench_rejects_bad_times(small_gs):
    with pytest.raises(ValidationError):
        quench_config([0.33], dt=0.05)  # not a multiple of dt
        terms = ising_terms(IsingSpec(h=1.0, length=16))
        run_quench(small_gs, terms, quench_config([0.33], dt=0.05))
    with pytest.raises(ValidationError):
        QuenchConfig(
            site=8,
            times=(1.0,),
            evolution=EvolutionConfig(dt=0.05, steps=1),
        )


def test_quench_non_unitary_operator_flagged(small_gs):
    terms = ising_terms(IsingSpec(h=1.0, length=16))
    config = QuenchConfig(
        site=8,
        times=(1.0,),
        evolution=EvolutionConfig(
            dt=-0.05j, steps=1, truncation=TruncationSpec(max_rank=16)
        ),
        operator=np.array([[1.0, 0.0], [0.0, 0.0]]),  # projector
        probes=("left-half",),
    )
    record = run_quench(small_gs, terms, config)
    assert record.parameters["renormalized"] is True


def test_window_sweep_matches_direct_fidelities(small_gs):
    other = mps.random_mps(16, 2, 8, seed=40)
    sweep = window_fidelity_sweep(small_gs, other, [1, 2, 3], anchor=6)
    for size, f, fd in sweep:
        window = (6, 6 + size)
        assert f == pytest.approx(
            fidelity.window_fidelity(small_gs, other, window).value, abs=1e-10
        )
        assert fd <= f + 1e-9


def test_scale_compare_identical_fields(small_gs):
    record = run_scale_compare(
        1.0, 1.0, [1, 2, 4], length=16, chi=12, states=(small_gs, small_gs)
    )
    assert record.columns == ["window_size", "F", "F_d", "dF_dM", "xi_1", "xi_2"]
    for row in record.rows:
        assert row[1] == pytest.approx(1.0, abs=1e-8)
        assert row[2] == pytest.approx(1.0, abs=1e-8)


def test_scale_compare_monotone_in_window_size(small_gs, ising_gs):
    other = ising_gs(1.4, 16, 12)
    record = run_scale_compare(
        1.0, 1.4, range(1, 9), length=16, chi=12, states=(small_gs, other)
    )
    values = [row[1] for row in record.rows]
    for smaller, larger in zip(values, values[1:]):
        assert larger <= smaller + 1e-9


@pytest.mark.slow
def test_scale_compare_derivative_dips_near_correlation_length(ising_gs):
    # Critical vs slightly off-critical ground states: the window-fidelity
    # slope is most negative around the off-critical correlation length.
    a = ising_gs(1.0, 256, 50)
    b = ising_gs(1.05, 256, 50)
    record = run_scale_compare(
        1.0, 1.05, range(1, 65), length=256, chi=50, states=(a, b)
    )
    xi = record.rows[0][5]  # xi_2: the h=1.05 state
    slopes = {row[0]: row[3] for row in record.rows[:-1]}
    argmin = min(slopes, key=slopes.get)
    assert 0.5 * xi <= argmin <= 1.5 * xi
    # fidelity column is monotone non-increasing in the window size
    values = [row[1] for row in record.rows]
    for smaller, larger in zip(values, values[1:]):
        assert larger <= smaller + 1e-9


def test_convergence_chi_identical_states(small_gs):
    record = run_convergence_chi(
        1.0, [(12, 12)], [1, 2, 4], length=16, states={12: small_gs}
    )
    assert record.columns == ["window_size", "chi_a", "chi_b", "one_minus_F", "one_minus_Fd"]
    for row in record.rows:
        assert row[3] <= 1e-8
        assert row[4] >= row[3] - 1e-9  # F_d <= F pointwise


def test_convergence_ttn_record():
    record = run_convergence_ttn(3, 6, sweeps=16, lag=4, h=1.0, seed=3)
    assert record.columns == ["iteration", "window_size", "per_site_F"]
    iterations = sorted({row[0] for row in record.rows})
    assert iterations[0] == 5  # rows with m <= lag are absent
    assert iterations[-1] == 16
    sizes = sorted({row[1] for row in record.rows})
    assert sizes == [2, 4]
    tail = [row for row in record.rows if row[0] == 16]
    for row in tail:
        assert 1.0 - row[2] <= 1e-4  # converged optimization tail


def test_record_csv_roundtrip(tmp_path, small_gs):
    record = run_scale_compare(
        1.0, 1.0, [1, 2], length=16, chi=12, states=(small_gs, small_gs)
    )
    out = tmp_path / "rec.csv"
    record.to_csv(out)
    lines = out.read_text().strip().split("\n")
    assert lines[0] == "window_size,F,F_d,dF_dM,xi_1,xi_2"
    assert len(lines) == 3
    meta = json.loads((tmp_path / "rec.meta.json").read_text())
    assert meta["experiment"] == "scale-compare"


def test_selftest_suites_pass():
    results = selftest_suites(trials=50, seed=1)
    assert [name for name, _, _ in results] == [
        "purification-soundness",
        "purification-decompose-roundtrip",
        "isometry-maximality",
    ]
    assert all(passed for _, passed, _ in results)


# -- CLI -----------------------------------------------------------------------


def test_cli_selftest():
    assert cli_main(["selftest", "--trials", "5"]) == 0


def test_cli_fidelity_roundtrip(tmp_path):
    a = mps.random_mps(8, 2, 4, seed=50)
    b = mps.random_mps(8, 2, 4, seed=51)
    save_network(tmp_path / "a", a)
    save_network(tmp_path / "b", b)
    out = tmp_path / "fid.csv"
    rc = cli_main(
        [
            "fidelity",
            "--state-a",
            str(tmp_path / "a"),
            "--state-b",
            str(tmp_path / "b"),
            "--kind",
            "half",
            "--cut",
            "4",
            "--out",
            str(out),
        ]
    )
    assert rc == 0
    value = float(out.read_text().strip().split("\n")[1].split(",")[1])
    assert value == pytest.approx(fidelity.half_system_fidelity(a, b, 4).value)


def test_cli_fidelity_window_and_disjoint(tmp_path):
    a = mps.random_mps(8, 2, 4, seed=52)
    b = mps.random_mps(8, 2, 4, seed=53)
    save_network(tmp_path / "a", a)
    save_network(tmp_path / "b", b)
    base = [
        "fidelity",
        "--state-a",
        str(tmp_path / "a"),
        "--state-b",
        str(tmp_path / "b"),
    ]
    assert cli_main(base + ["--kind", "window", "--window", "2,6"]) == 0
    assert cli_main(base + ["--kind", "disjoint", "--window", "2,6"]) == 0


def test_cli_fidelity_ttn_branch(tmp_path):
    a = ttn.random_ttn(3, 4, seed=54)
    b = ttn.random_ttn(3, 4, seed=55)
    save_network(tmp_path / "a", a)
    save_network(tmp_path / "b", b)
    rc = cli_main(
        [
            "fidelity",
            "--state-a",
            str(tmp_path / "a"),
            "--state-b",
            str(tmp_path / "b"),
            "--kind",
            "window",
            "--window",
            "0,4",
        ]
    )
    assert rc == 0


def test_cli_validation_error_exit_code(tmp_path):
    rc = cli_main(
        [
            "fidelity",
            "--state-a",
            str(tmp_path / "missing"),
            "--state-b",
            str(tmp_path / "missing"),
            "--kind",
            "half",
            "--cut",
            "1",
        ]
    )
    assert rc == 1


def test_cli_converge_ttn(tmp_path):
    out = tmp_path / "ttn.csv"
    rc = cli_main(
        [
            "converge-ttn",
            "--depth",
            "3",
            "--chi",
            "4",
            "--sweeps",
            "8",
            "--lag",
            "2",
            "--out",
            str(out),
        ]
    )
    assert rc == 0
    assert out.read_text().startswith("iteration,window_size,per_site_F")


def test_cli_gs_and_quench_smoke(tmp_path):
    gs_path = tmp_path / "gs"
    rc = cli_main(
        ["gs", "--h-field", "1.5", "--length", "12", "--chi", "8", "--out", str(gs_path)]
    )
    assert rc == 0
    out = tmp_path / "quench.csv"
    rc = cli_main(
        [
            "quench",
            "--ground-state",
            str(gs_path),
            "--site",
            "6",
            "--t-max",
            "1",
            "--dt",
            "0.1",
            "--chi",
            "8",
            "--h-field",
            "1.5",
            "--out",
            str(out),
        ]
    )
    assert rc == 0
    assert out.read_text().startswith("t,x,probe,fidelity,expect_z")
