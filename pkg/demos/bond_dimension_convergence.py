"""Use window fidelities to judge convergence in bond dimension.

Two MPS approximations of the same ground state, at bond dimensions 8 and
16, compared through window fidelities of growing size.  Off criticality
the deficits stay tiny at every scale; at the critical point the long-range
physics is visibly unconverged while short windows still agree well.
Results go to convergence_chi.csv.
"""

from tnfid.experiments import ising_ground_state_mps, run_convergence_chi

L = 96
CHI_A, CHI_B = 8, 16
SIZES = range(1, 25)

rows = {}
for h in (1.0, 1.2):
    print(f"building ground states at h = {h} with chi = {CHI_A} and {CHI_B} ...")
    states = {
        CHI_A: ising_ground_state_mps(h, L, CHI_A),
        CHI_B: ising_ground_state_mps(h, L, CHI_B),
    }
    record = run_convergence_chi(
        h, [(CHI_A, CHI_B)], SIZES, length=L, states=states
    )
    rows[h] = {row[0]: (row[3], row[4]) for row in record.rows}
    if h == 1.0:
        record.to_csv("convergence_chi.csv")

print(f"\n1 - fidelity between the chi={CHI_A} and chi={CHI_B} states:")
print(f"{'|M|':>4} {'critical 1-F':>14} {'critical 1-Fd':>14} "
      f"{'offcrit 1-F':>14} {'offcrit 1-Fd':>14}")
for size in SIZES:
    c_f, c_fd = rows[1.0][size]
    o_f, o_fd = rows[1.2][size]
    print(f"{size:>4} {c_f:>14.3e} {c_fd:>14.3e} {o_f:>14.3e} {o_fd:>14.3e}")

print("\nThe critical deficits sit orders of magnitude above the off-critical")
print("ones at every size: long-range critical physics needs more bond")
print("dimension, while the gapped state is already converged.")
print("wrote convergence_chi.csv")
