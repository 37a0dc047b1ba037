"""
One forehead-model run, step by step
====================================

Builds a tiny 2x3 input, shows what each player can see, executes a single
broadcast round by hand, then runs the full randomized protocol and compares
the empirical wrong-output rate with the exact per-input oracle.
"""

from fractions import Fraction

from nofkit import (
    InputMatrix,
    MaskVector,
    RandomTape,
    active_budget,
    enumerate_masks,
    exact_gip_error,
    eval_gip,
    gip_base_outcome,
    gip_protocol,
    player_view,
    run,
)

def row_str(r: int, k: int) -> str:
    return "".join(str((r >> (j - 1)) & 1) for j in range(1, k + 1))


x = InputMatrix.from_bits([[1, 1, 1], [0, 1, 1]])
print("input matrix (2 rows, 3 players), columns printed left to right:")
for i, r in enumerate(x.rows, start=1):
    print(f"  row {i}: {row_str(r, x.k)}")

# player 2 sees every column except its own
view = player_view(x, 2)
print("player 2 sees columns", [1, 3])
print("rows with player 2's own column blanked to 0:",
      [row_str(view.masked_row(i), x.k) for i in range(x.n)])

# the target: parity of the all-ones row count
print("row parity target:", eval_gip(x))

# one base run under a hand-picked mask vector; players at the mask's zero
# positions each broadcast a single parity bit
ell = active_budget(x.n, x.k)
print("mask budget ell =", ell, "->", len(list(enumerate_masks(x.k, ell))), "masks")
mask = MaskVector(k=3, bits=0b110)
out, bits = gip_base_outcome(x, mask)
print(f"mask {row_str(mask.bits, 3)} (zero at column {mask.zero_positions[0]}):",
      f"broadcasts {bits} -> output {out}")

# the exact chance a uniform mask lands on a row of x (the untrusted event)
oracle = exact_gip_error(x, ell)
print("exact collision probability:", oracle)

# full protocol: mask drawn from a seeded tape, so reruns are identical
proto = gip_protocol(x.n, x.k)
master = RandomTape(7)
wrong = 0
trials = 4000
for t in range(trials):
    res = run(proto, x, master.sub(f"t{t}"))
    wrong += res.output != eval_gip(x)
print(f"empirical wrong rate over {trials} seeded runs:",
      Fraction(wrong, trials), f"~ {wrong / trials:.4f}")
print("cost of the last run:", res.cost_bits, "bit(s), ceiling",
      proto.cost_ceiling)
