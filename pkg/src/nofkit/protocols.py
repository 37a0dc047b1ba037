"""The three randomized protocols, with bit-exact cost accounting.

All three factories return a ProtocolSpec whose per-execution structure (which
player speaks how many bits, and what each bit means) is derived from the tape
alone, never from the input. Internally a run is described by a *plan*: an
ordered list of slots (player, bit-width, view -> bits) plus an aggregator
from slot values to the output. Message, length, and output rules all read
the same cached plan, which is what keeps the transcript splittable and the
declared cost ceilings honest.

gip_protocol    parity of all-ones rows. Samples a row mask with few zeros;
                the players sitting at the zero positions each broadcast one
                parity bit, and the XOR of the broadcasts telescopes to the
                all-ones row count mod 2 unless some input row equals the
                mask. Rows are split into blocks when 2^k < 3n, and every
                block is repeated for a majority vote.

disj_protocol   set disjointness. Estimates P over random row subsets S of
                [gip on the S-rows = 0]: exactly 1 when the columns are
                disjoint and 1/2 otherwise; declares disjoint when at least
                3/4 of the amplified subcalls answer zero.

mod3_protocol   1 iff the sum of row XORs is divisible by 3. Broadcasts the
                GF(3) sum of a degree-(k-1) polynomial that agrees with XOR
                everywhere except at a secret point, two bits per player.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import ceil, comb, log
from typing import Callable, Optional, Sequence, Union

from .combinatorics import binom_leq, smallest_odd_majority, unrank_combination
from .core import ProtocolSpec, Transcript
from .matrices import InputMatrix, View
from .tape import RandomTape

Rational = Union[int, float, Fraction]

DEFAULT_ERROR = Fraction(1, 3)
GIP_BASE_ERROR = Fraction(1, 3)  # per-mask collision budget the blocks are sized for
DISJ_SUBCALL_ERROR = Fraction(1, 16)
DISJ_ZERO_THRESHOLD = Fraction(3, 4)
DISJ_GAP = Fraction(3, 16)  # distance from 15/16 and 9/16 to the threshold


class InfeasibleParameters(ValueError):
    """The construction does not exist at these (n, k, error) values."""


def active_budget(n: int, k: int, delta: Rational = Fraction(1, 3)) -> int:
    """Smallest ell <= k with binom_leq(k, ell) >= n/delta.

    This is the zero-budget of the sampled mask: at most ell of its k entries
    are zero, so at most ell players speak per base run, while the mask space
    stays large enough that hitting any fixed row has probability <= delta/n.
    Pass delta as a Fraction when equality at the threshold matters.
    """
    if n < 1 or k < 1:
        raise ValueError("need n, k >= 1")
    delta = Fraction(delta)
    if not 0 < delta < 1:
        raise ValueError("need 0 < delta < 1")
    threshold = Fraction(n) / delta
    for ell in range(k + 1):
        if binom_leq(k, ell) >= threshold:
            return ell
    raise InfeasibleParameters(
        f"no mask budget works: 2^{k} = {1 << k} < n/delta = {threshold}"
    )


# ---------------------------------------------------------------------------
# masks


@dataclass(frozen=True)
class MaskVector:
    """A row vector with at most ell zeros, the shared sample of a base run."""

    k: int
    bits: int

    def __post_init__(self):
        if not 0 <= self.bits < (1 << self.k):
            raise ValueError("bits out of range")

    @property
    def zero_positions(self) -> tuple[int, ...]:
        return tuple(j for j in range(1, self.k + 1) if not (self.bits >> (j - 1)) & 1)

    @classmethod
    def from_rank(cls, k: int, ell: int, rank: int) -> "MaskVector":
        """rank in [0, binom_leq(k, ell)) -> mask, ordered by zero count then
        lexicographic zero positions."""
        if not 0 <= rank < binom_leq(k, ell):
            raise ValueError("rank out of range")
        for j in range(ell + 1):
            c = comb(k, j)
            if rank < c:
                bits = (1 << k) - 1
                for z in unrank_combination(rank, k, j):
                    bits &= ~(1 << (z - 1))
                return cls(k=k, bits=bits)
            rank -= c
        raise AssertionError("unreachable")


def enumerate_masks(k: int, ell: int):
    """All masks with at most ell zeros, in rank order."""
    for rank in range(binom_leq(k, ell)):
        yield MaskVector.from_rank(k, ell, rank)


# ---------------------------------------------------------------------------
# plan machinery

Slot = tuple[int, int, Callable[[View], str]]  # (player, bit width, compute)


@dataclass
class _Plan:
    slots: list[Slot]
    output: Callable[[list[str]], int]


def _plan_protocol(
    family: str,
    n: int,
    k: int,
    error: float,
    builder: Callable[[RandomTape, str], _Plan],
    cost_ceiling: Optional[int],
) -> ProtocolSpec:
    cache: dict[tuple[int, str], _Plan] = {}

    def plan_for(tape: RandomTape, ns: str) -> _Plan:
        key = (tape.master_seed, ns)
        if key not in cache:
            if len(cache) >= 256:
                cache.clear()
            cache[key] = builder(tape, ns)
        return cache[key]

    def message_rule(i, view, prefix, tape, ns):
        return "".join(fn(view) for player, _, fn in plan_for(tape, ns).slots if player == i)

    def length_rule(i, tape, ns):
        return sum(width for player, width, _ in plan_for(tape, ns).slots if player == i)

    def output_rule(transcript: Transcript, tape, ns):
        plan = plan_for(tape, ns)
        cursor = {i: 0 for i in range(1, k + 1)}
        per_player = {i: transcript.player_bits(i) for i in cursor}
        values = []
        for player, width, _ in plan.slots:
            at = cursor[player]
            piece = per_player[player][at : at + width]
            if len(piece) != width:
                raise ValueError("transcript shorter than the plan requires")
            cursor[player] = at + width
            values.append(piece)
        return plan.output(values)

    return ProtocolSpec(
        family=family,
        n=n,
        k=k,
        error=float(error),
        simultaneous=True,
        deterministic=False,
        message_rule=message_rule,
        output_rule=output_rule,
        length_rule=length_rule,
        cost_ceiling=cost_ceiling,
    )


# ---------------------------------------------------------------------------
# GIP


def _partition_rows(row_ids: Sequence[int], k: int) -> list[tuple[int, ...]]:
    """One block when 2^k >= 3n, else consecutive blocks of floor(2^k / 3)."""
    n = len(row_ids)
    if 3 * n <= 1 << k:
        return [tuple(row_ids)]
    size = (1 << k) // 3
    if size == 0:
        raise InfeasibleParameters(f"k={k} leaves no room to partition rows")
    return [tuple(row_ids[a : a + size]) for a in range(0, n, size)]


def mask_label(ns: str, block: int, rep: int) -> str:
    return f"{ns}gip/b{block}/r{rep}/mask"


def gip_broadcast_bit(rows: Sequence[int], zeros: Sequence[int], ordinal: int, k: int) -> int:
    """Broadcast bit of the ordinal-th zero-position player (1-based).

    Counts rows that are 0 on the earlier zero positions and 1 everywhere
    else except the player's own column, mod 2. Row values are plain ints;
    callers pass masked rows so the player's own bit is never consulted.
    """
    me = zeros[ordinal - 1]
    lo = 0
    for z in zeros[: ordinal - 1]:
        lo |= 1 << (z - 1)
    rest = ((1 << k) - 1) & ~lo & ~(1 << (me - 1))
    cnt = 0
    for r in rows:
        if r & lo == 0 and r & rest == rest:
            cnt ^= 1
    return cnt


def _gip_rows_plan(
    row_ids: Sequence[int], k: int, eps: Fraction, tape: RandomTape, ns: str
) -> tuple[list[Slot], Callable[[list[str]], int], int]:
    """Slots plus value function computing GIP of the given rows, err <= eps."""
    blocks = _partition_rows(row_ids, k)
    budget = eps / len(blocks)
    slots: list[Slot] = []
    shape: list[list[tuple[int, int]]] = []  # per block, per rep: slot range
    ceiling = 0
    for b, block in enumerate(blocks):
        ell = active_budget(len(block), k, GIP_BASE_ERROR)
        reps = smallest_odd_majority(GIP_BASE_ERROR, budget)
        ceiling += reps * ell
        spans = []
        for r in range(reps):
            rank = tape.randbelow(mask_label(ns, b, r), binom_leq(k, ell))
            mask = MaskVector.from_rank(k, ell, rank)
            zeros = mask.zero_positions
            start = len(slots)
            for ordinal, z in enumerate(zeros, start=1):
                def fn(view, _rows=block, _zeros=zeros, _ord=ordinal, _k=k):
                    masked = [view.masked_row(i) for i in _rows]
                    return str(gip_broadcast_bit(masked, _zeros, _ord, _k))

                slots.append((z, 1, fn))
            spans.append((start, len(slots)))
        shape.append(spans)

    def value(bits: list[str]) -> int:
        total = 0
        for spans in shape:
            votes = 0
            for a, b_ in spans:
                rep = 0
                for s in range(a, b_):
                    rep ^= int(bits[s])
                votes += rep
            total ^= 1 if 2 * votes > len(spans) else 0
        return total

    return slots, value, ceiling


def gip_params(n: int, k: int, eps: Rational = DEFAULT_ERROR) -> dict:
    """Structural parameters of gip_protocol(n, k, eps), without building it."""
    eps = Fraction(eps)
    if not 0 < eps < 1:
        raise ValueError("need 0 < eps < 1")
    if (1 << k) < n:
        raise InfeasibleParameters(f"needs 2^k >= n, got 2^{k} < {n}")
    blocks = _partition_rows(range(n), k)
    budget = eps / len(blocks)
    ells = [active_budget(len(b), k, GIP_BASE_ERROR) for b in blocks]
    reps = [smallest_odd_majority(GIP_BASE_ERROR, budget) for _ in blocks]
    return {
        "blocks": [len(b) for b in blocks],
        "ells": ells,
        "reps": reps,
        "cost_ceiling": sum(t * e for t, e in zip(reps, ells)),
    }


def gip_protocol(n: int, k: int, eps: Rational = DEFAULT_ERROR) -> ProtocolSpec:
    """Randomized simultaneous protocol for the parity of all-ones rows."""
    eps = Fraction(eps)
    params = gip_params(n, k, eps)

    def builder(tape: RandomTape, ns: str) -> _Plan:
        slots, value, _ = _gip_rows_plan(tuple(range(n)), k, eps, tape, ns)
        return _Plan(slots=slots, output=lambda bits: value(bits))

    return _plan_protocol("gip", n, k, float(eps), builder, params["cost_ceiling"])


def exact_gip_error(x: InputMatrix, ell: int) -> Fraction:
    """Probability the sampled mask equals some row of x.

    Counts distinct rows with at most ell zeros over the mask-space size.
    This is exact for the collision event and an upper bound on the chance
    the base run's output is wrong (a row colliding with the mask an even
    number of times leaves the telescoped parity intact).
    """
    if not 0 <= ell <= x.k:
        raise ValueError("need 0 <= ell <= k")
    heavy = {r for r in x.rows if x.k - bin(r).count("1") <= ell}
    return Fraction(len(heavy), binom_leq(x.k, ell))


def gip_base_outcome(x: InputMatrix, mask: MaskVector) -> tuple[int, tuple[int, ...]]:
    """(output, broadcast bits) of a single unamplified run under ``mask``."""
    if mask.k != x.k:
        raise ValueError("mask width must match k")
    zeros = mask.zero_positions
    bits = []
    for ordinal, z in enumerate(zeros, start=1):
        hide = ~(1 << (z - 1))
        masked = [r & hide for r in x.rows]
        bits.append(gip_broadcast_bit(masked, zeros, ordinal, x.k))
    out = 0
    for b in bits:
        out ^= b
    return out, tuple(bits)


# ---------------------------------------------------------------------------
# DISJ


def subset_label(ns: str, trial: int) -> str:
    return f"{ns}disj/t{trial}/subset"


def disj_params(n: int, k: int, eps: Rational = DEFAULT_ERROR) -> dict:
    eps = Fraction(eps)
    if not 0 < eps < 1:
        raise ValueError("need 0 < eps < 1")
    if k < 2:
        raise InfeasibleParameters("subcalls need k >= 2")
    if (1 << k) < n:
        raise InfeasibleParameters(f"needs 2^k >= n, got 2^{k} < {n}")
    trials = ceil(log(1 / float(eps)) / (2 * float(DISJ_GAP) ** 2))
    sub_reps = smallest_odd_majority(GIP_BASE_ERROR, DISJ_SUBCALL_ERROR)
    sub_ceiling = gip_params(n, k, DISJ_SUBCALL_ERROR)["cost_ceiling"]
    return {
        "trials": trials,
        "subcall_reps": sub_reps,
        "subcall_error": DISJ_SUBCALL_ERROR,
        "cost_ceiling": trials * sub_ceiling,
    }


def disj_protocol(n: int, k: int, eps: Rational = DEFAULT_ERROR) -> ProtocolSpec:
    """Randomized simultaneous protocol deciding column disjointness.

    Each trial draws a uniform row subset S and runs the parity protocol on
    those rows with error 1/16; the fraction of zero answers separates
    disjoint (concentrates >= 15/16) from intersecting (<= 9/16) inputs, and
    the 3/4 threshold sits a 3/16 Hoeffding gap from both.
    """
    eps = Fraction(eps)
    params = disj_params(n, k, eps)
    trials = params["trials"]

    def builder(tape: RandomTape, ns: str) -> _Plan:
        slots: list[Slot] = []
        finishers: list[tuple[tuple[int, int], Optional[Callable]]] = []
        for t in range(trials):
            picks = tape.bitvector(subset_label(ns, t), n)
            rows = tuple(i for i in range(n) if picks[i])
            if not rows:
                finishers.append(((len(slots), len(slots)), None))  # empty: gip = 0
                continue
            sub_slots, sub_value, _ = _gip_rows_plan(
                rows, k, DISJ_SUBCALL_ERROR, tape, f"{ns}disj/t{t}/"
            )
            span = (len(slots), len(slots) + len(sub_slots))
            slots.extend(sub_slots)
            finishers.append((span, sub_value))

        def output(bits: list[str]) -> int:
            zeros = 0
            for (a, b), value in finishers:
                ans = 0 if value is None else value(bits[a:b])
                zeros += 1 if ans == 0 else 0
            return 1 if zeros >= DISJ_ZERO_THRESHOLD * trials else 0

        return _Plan(slots=slots, output=output)

    return _plan_protocol("disj", n, k, float(eps), builder, params["cost_ceiling"])


# ---------------------------------------------------------------------------
# MOD3 of row XORs


_GF3_BITS = {0: "00", 1: "01", 2: "10"}


def ceil_log2(m: int) -> int:
    if m < 1:
        raise ValueError("need m >= 1")
    return (m - 1).bit_length()


def parity_poly_eval(point: int, x: int, k: int) -> int:
    """prod(x_i + 1) - prod(x_i + point_i - 1) - 1 over GF(3).

    Equals the XOR of the bits of x whenever x != point.
    """
    if not 0 <= point < (1 << k) or not 0 <= x < (1 << k):
        raise ValueError("inputs out of range")
    prod1 = pow(2, bin(x).count("1"), 3)  # x_i + 1 is 2 at ones, 1 at zeros
    prod2 = 1
    for j in range(k):
        term = ((x >> j) & 1) + ((point >> j) & 1) + 2  # x_j + point_j - 1 mod 3
        prod2 = (prod2 * term) % 3
    return (prod1 - prod2 - 1) % 3


@dataclass(frozen=True)
class Gf3Poly:
    """Multilinear polynomial over GF(3); monomials keyed by column bitmask."""

    k: int
    coeffs: tuple[tuple[int, int], ...]  # (column bitmask, coeff in {1, 2})

    def evaluate(self, x: int) -> int:
        total = 0
        for mask, c in self.coeffs:
            if x & mask == mask:
                total += c
        return total % 3

    def degree(self) -> int:
        return max((bin(m).count("1") for m, _ in self.coeffs), default=0)


def expand_parity_poly(point: int, k: int) -> Gf3Poly:
    """Monomial expansion of parity_poly_eval(point, ., k)."""
    if not 0 <= point < (1 << k):
        raise ValueError("point out of range")

    def multiply_out(consts: list[int]) -> dict[int, int]:
        terms = {0: 1}
        for j, c in enumerate(consts):
            nxt: dict[int, int] = {}
            for mask, coeff in terms.items():
                nxt[mask | (1 << j)] = (nxt.get(mask | (1 << j), 0) + coeff) % 3
                if c:
                    nxt[mask] = (nxt.get(mask, 0) + coeff * c) % 3
            terms = {m: v for m, v in nxt.items() if v}
        return terms

    expanded = multiply_out([1] * k)  # prod (x_j + 1)
    second = multiply_out([(((point >> j) & 1) + 2) % 3 for j in range(k)])
    for mask, coeff in second.items():
        expanded[mask] = (expanded.get(mask, 0) - coeff) % 3
    expanded[0] = (expanded.get(0, 0) - 1) % 3
    coeffs = tuple(sorted((m, c) for m, c in expanded.items() if c))
    poly = Gf3Poly(k=k, coeffs=coeffs)
    if poly.degree() >= k and k > 0:
        raise AssertionError("full monomial should always cancel")
    return poly


def monomial_partition(point: int, k: int) -> dict[int, int]:
    """Map each monomial bitmask of the expansion to its assigned player:
    the lowest-index column the monomial omits."""
    out = {}
    for mask, _ in expand_parity_poly(point, k).coeffs:
        player = next(j for j in range(1, k + 1) if not (mask >> (j - 1)) & 1)
        out[mask] = player
    return out


def mod3_base_value(x: InputMatrix, point: int) -> int:
    """GF(3) value one base run communicates: sum over rows of the parity
    polynomial at ``point``. Equals (sum of row XORs) mod 3 when no row
    equals the point."""
    return sum(parity_poly_eval(point, r, x.k) for r in x.rows) % 3


def exact_mod3_error(x: InputMatrix) -> Fraction:
    """Probability a uniform point of {0,1}^k equals some row of x, which is
    exactly the chance the base run's value is untrusted. Callers pass the
    effective (folded) matrix when columns were folded."""
    return Fraction(len(set(x.rows)), 1 << x.k)


def point_label(ns: str, block: int, rep: int) -> str:
    return f"{ns}mod3/b{block}/r{rep}/point"


def _fold_width(rows: int, k: int) -> int:
    """Effective column count for a block: ceil(log2(3 * rows)), capped by
    feasibility (callers guarantee 3 * rows <= 2^k)."""
    return ceil_log2(3 * rows)


def _effective_row(masked: int, k_eff: int) -> int:
    """Fold columns k_eff..k of a masked row into the single bit k_eff."""
    low = (1 << (k_eff - 1)) - 1
    fold = bin(masked >> (k_eff - 1)).count("1") & 1
    return (masked & low) | (fold << (k_eff - 1))


def fold_rows(rows: Sequence[int], k_eff: int) -> tuple[int, ...]:
    """Fold full (unmasked) rows down to k_eff columns. The folded row keeps
    the overall parity, so the parity-polynomial identity still applies; the
    per-input error oracle measures collisions in the folded space."""
    return tuple(_effective_row(r, k_eff) for r in rows)


def mod3_params(n: int, k: int, eps: Rational = DEFAULT_ERROR) -> dict:
    eps = Fraction(eps)
    if not 0 < eps < 1:
        raise ValueError("need 0 < eps < 1")
    if (1 << k) < n:
        raise InfeasibleParameters(f"needs 2^k >= n, got 2^{k} < {n}")
    blocks = _partition_rows(range(n), k)
    budget = eps / len(blocks)
    k_effs = [_fold_width(len(b), k) for b in blocks]
    if any(ke > k for ke in k_effs):
        raise InfeasibleParameters("block does not fit its effective width")
    reps = [smallest_odd_majority(GIP_BASE_ERROR, budget) for _ in blocks]
    return {
        "blocks": [len(b) for b in blocks],
        "k_effs": k_effs,
        "reps": reps,
        "cost_ceiling": sum(t * 2 * ke for t, ke in zip(reps, k_effs)),
    }


def mod3_protocol(n: int, k: int, eps: Rational = DEFAULT_ERROR) -> ProtocolSpec:
    """Randomized simultaneous protocol for [sum of row XORs divisible by 3].

    Per block and repetition, a shared point u of {0,1}^k_eff is drawn; every
    monomial of the parity polynomial omits some column, so each of players
    1..k_eff broadcasts the GF(3) sum of the monomials assigned to it (two
    bits). Columns k_eff..k are folded by XOR into one virtual column that
    every speaking player can compute from its view. Per-block values are
    plurality-voted across repetitions, summed mod 3, and the output is 1
    iff the sum is 0 (i.e. 1 - value^2 over GF(3)).
    """
    eps = Fraction(eps)
    params = mod3_params(n, k, eps)
    blocks = _partition_rows(range(n), k)
    budget = eps / len(blocks)

    def builder(tape: RandomTape, ns: str) -> _Plan:
        slots: list[Slot] = []
        shape: list[list[tuple[int, int]]] = []
        for b, block in enumerate(blocks):
            k_eff = params["k_effs"][b]
            reps = smallest_odd_majority(GIP_BASE_ERROR, budget)
            spans = []
            for r in range(reps):
                point = tape.randbelow(point_label(ns, b, r), 1 << k_eff)
                assigned: dict[int, list[tuple[int, int]]] = {
                    i: [] for i in range(1, k_eff + 1)
                }
                poly = expand_parity_poly(point, k_eff)
                owners = monomial_partition(point, k_eff)
                for mask, coeff in poly.coeffs:
                    assigned[owners[mask]].append((mask, coeff))
                start = len(slots)
                for i in range(1, k_eff + 1):
                    def fn(view, _rows=block, _items=tuple(assigned[i]), _ke=k_eff):
                        total = 0
                        for ri in _rows:
                            eff = _effective_row(view.masked_row(ri), _ke)
                            for mask, coeff in _items:
                                if eff & mask == mask:
                                    total += coeff
                        return _GF3_BITS[total % 3]

                    slots.append((i, 2, fn))
                spans.append((start, len(slots)))
            shape.append(spans)

        def output(bits: list[str]) -> int:
            total = 0
            for spans in shape:
                votes = [0, 0, 0]
                for a, b_ in spans:
                    val = 0
                    for s in range(a, b_):
                        val += int(bits[s], 2)
                    votes[val % 3] += 1
                best = max(votes)
                total += votes.index(best)  # deterministic tie-break: smallest value
            return 1 if total % 3 == 0 else 0

        return _Plan(slots=slots, output=output)

    return _plan_protocol("mod3", n, k, float(eps), builder, params["cost_ceiling"])
