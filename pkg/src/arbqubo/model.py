"""Encoding of the arbitrage-loop search as a QUBO, and decoding back.

Variables are one-hot assignments "currency c sits at loop position p" over
K positions, where position K is expected to repeat position 1's currency
(the closing conversion is the transition from position K-1 to K).  Five
term families populate the matrix:

  rate         pair (c at k, d at k+1), c != d, weighted by the log-rate of
               the c->d conversion: selects profitable transitions
  one_hot      pair of different currencies at the same position: penalizes
               crowded positions
  endpoint     couples each currency's position-1 and position-K variables:
               with a negative weight, mismatched endpoints cost energy
  consecutive  pair (c at k, c at k+1): prices staying on the same currency,
               a small negative default nudges solutions toward short loops
  fill         linear term on every variable: a negative weight pays for
               occupying positions so none are left empty

With the shipped calibration every constraint-violating bitvector sits
strictly above the best feasible loop, so the ground state is always a
decodable loop; see docs/weight_calibration.md for the derivation.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

from .errors import DimensionError, ModelError, NotFeasible
from .qubo import QuboMatrix
from .rates import LogWeightMatrix, RateMatrix

MULTIPLE_IN_POSITION = "MultipleInPosition"
EMPTY_POSITION = "EmptyPosition"
OPEN_LOOP = "OpenLoop"


@dataclass(frozen=True)
class ProblemShape:
    """Problem dimensions: N currencies, K loop positions.

    K counts the repeated closing currency as its own position, so a
    triangle over 3 currencies needs K = 4.  K = 2 is admitted as a
    degenerate testing shape (the loop [c, c]) and flagged as trivial.
    """

    n_currencies: int
    loop_length: int

    def __post_init__(self) -> None:
        if self.n_currencies < 2:
            raise ModelError(f"need at least 2 currencies, got {self.n_currencies}")
        if self.loop_length < 2:
            raise ModelError(f"loop length must be at least 2, got {self.loop_length}")
        if self.loop_length > self.n_currencies + 1:
            raise ModelError(
                f"loop length {self.loop_length} cannot exceed "
                f"n_currencies + 1 = {self.n_currencies + 1}"
            )

    @property
    def n_vars(self) -> int:
        return self.n_currencies * self.loop_length

    @property
    def is_trivial(self) -> bool:
        """True for the degenerate K=2 shape whose only loops are [c, c]."""
        return self.loop_length == 2


@dataclass(frozen=True)
class HamiltonianWeights:
    """Signed weights of the five term families.

    ``rate`` must be positive (the profit objective has to be active);
    the rest carry whatever sign their role needs -- see module docstring.
    """

    rate: float
    one_hot: float
    endpoint: float
    consecutive: float
    fill: float

    def __post_init__(self) -> None:
        vals = (self.rate, self.one_hot, self.endpoint, self.consecutive, self.fill)
        if not all(math.isfinite(v) for v in vals):
            raise ModelError(f"weights must be finite, got {vals}")
        if not self.rate > 0:
            raise ModelError(f"rate weight must be positive, got {self.rate}")


@dataclass(frozen=True)
class Violation:
    kind: str
    position: int | None = None


@dataclass
class DecodedLoop:
    """A bitvector read back as K positions, with any constraint violations.

    ``positions[k]`` is the single currency at position k+1, or None when
    that position is empty or crowded.  ``profitability`` is attached by
    :func:`profitability` and only ever present on feasible loops.
    """

    positions: list[int | None]
    violations: list[Violation] = field(default_factory=list)
    profitability: float | None = None

    @property
    def feasible(self) -> bool:
        return not self.violations

    @property
    def loop(self) -> list[int]:
        if not self.feasible:
            raise NotFeasible(f"loop has violations: {self.violations}")
        return [c for c in self.positions]  # type: ignore[misc]


def var_index(curr: int, pos: int, shape: ProblemShape) -> int:
    """Flat variable index for currency ``curr`` at 1-based position ``pos``."""
    if not (0 <= curr < shape.n_currencies):
        raise IndexError(f"currency {curr} out of range [0, {shape.n_currencies})")
    if not (1 <= pos <= shape.loop_length):
        raise IndexError(f"position {pos} out of range [1, {shape.loop_length}]")
    return curr * shape.loop_length + (pos - 1)


def var_position(flat: int, shape: ProblemShape) -> tuple[int, int]:
    """Inverse of :func:`var_index`: flat index -> (currency, 1-based position)."""
    if not (0 <= flat < shape.n_vars):
        raise IndexError(f"flat index {flat} out of range [0, {shape.n_vars})")
    return flat // shape.loop_length, flat % shape.loop_length + 1


def default_weights(
    w: LogWeightMatrix, shape: ProblemShape, rate: float = 1.0
) -> HamiltonianWeights:
    """Calibrated weights under which constraint violations never pay off.

    Penalty magnitudes scale with ``rate * (max|w| * K + 1)`` so that the
    largest possible log-rate swing, plus the fill reward itself, cannot
    finance an extra currency in a position, an empty position, or an open
    loop.  The consecutive-repeat reward is kept far below any real profit
    gap so it only breaks ties toward shorter loops.  The exhaustive
    dominance check in the test suite validates the formula rather than
    taking it on faith; docs/weight_calibration.md walks the bound.
    """
    if rate <= 0:
        raise ModelError(f"rate weight must be positive, got {rate}")
    k = shape.loop_length
    max_w = w.max_abs()
    fill_unit = rate * (max_w * (k - 1) + 1.0)
    guard_unit = rate * (max_w * k + 1.0)
    return HamiltonianWeights(
        rate=rate,
        one_hot=4.0 * guard_unit,
        endpoint=-2.0 * guard_unit,
        consecutive=-0.001 * rate,
        fill=-2.0 * fill_unit,
    )


def build_qubo(
    w: LogWeightMatrix, shape: ProblemShape, weights: HamiltonianWeights
) -> QuboMatrix:
    """Assemble the loop-search QUBO over N*K one-hot variables.

    Term placement:
      * rate: for every ordered pair (i, j), i != j, and k in 1..K-1,
        ``rate * w[i][j]`` couples (i at k) with (j at k+1).  Both
        orientations of each pair are priced; real quotes are asymmetric.
      * one_hot: couples every unordered pair of currencies at position k.
      * endpoint: expanding ``C * sum_i (1 - (x_i1 - x_iK)^2)`` gives a
        ``C*N`` constant (tracked in the offset), ``-C`` linear on each
        endpoint variable, and ``+2C`` on the pair.
      * consecutive: couples (i at k) with (i at k+1).
      * fill: linear on every variable.
    """
    if w.n != shape.n_currencies:
        raise ModelError(
            f"weight matrix is {w.n}x{w.n} but shape declares "
            f"{shape.n_currencies} currencies"
        )
    n, k = shape.n_currencies, shape.loop_length
    q = QuboMatrix(shape.n_vars)

    if weights.rate != 0.0:
        for i in range(n):
            for j in range(n):
                if i == j:
                    continue
                coeff = weights.rate * w.w[i, j]
                if coeff == 0.0:
                    continue
                for pos in range(1, k):
                    q.add_coefficient(
                        var_index(i, pos, shape), var_index(j, pos + 1, shape), coeff
                    )

    if weights.one_hot != 0.0:
        for pos in range(1, k + 1):
            for i in range(n):
                for j in range(i + 1, n):
                    q.add_coefficient(
                        var_index(i, pos, shape),
                        var_index(j, pos, shape),
                        weights.one_hot,
                    )

    if weights.endpoint != 0.0:
        c = weights.endpoint
        q.offset += c * n
        for i in range(n):
            first = var_index(i, 1, shape)
            last = var_index(i, k, shape)
            q.add_coefficient(first, first, -c)
            q.add_coefficient(last, last, -c)
            q.add_coefficient(first, last, 2.0 * c)

    if weights.consecutive != 0.0:
        for i in range(n):
            for pos in range(1, k):
                q.add_coefficient(
                    var_index(i, pos, shape),
                    var_index(i, pos + 1, shape),
                    weights.consecutive,
                )

    if weights.fill != 0.0:
        for flat in range(shape.n_vars):
            q.add_coefficient(flat, flat, weights.fill)

    return q


def encode_loop(loop, shape: ProblemShape) -> tuple[int, ...]:
    """Bitvector with exactly K bits set, one per loop position."""
    seq = list(loop)
    if len(seq) != shape.loop_length:
        raise DimensionError(
            f"loop has {len(seq)} positions, shape wants {shape.loop_length}"
        )
    bits = [0] * shape.n_vars
    for pos, curr in enumerate(seq, start=1):
        bits[var_index(curr, pos, shape)] = 1
    return tuple(bits)


def decode(x, shape: ProblemShape) -> DecodedLoop:
    """Read a bitvector back into positions, collecting violations as data.

    Violations recorded: more than one currency in a position, an empty
    position, and (only when both endpoints hold a single currency) a loop
    that does not close.
    """
    bits = tuple(int(b) for b in x)
    if len(bits) != shape.n_vars:
        raise DimensionError(f"state length {len(bits)} != {shape.n_vars}")
    positions: list[int | None] = []
    violations: list[Violation] = []
    per_position: list[list[int]] = []
    for pos in range(1, shape.loop_length + 1):
        present = [
            c
            for c in range(shape.n_currencies)
            if bits[var_index(c, pos, shape)]
        ]
        per_position.append(present)
        if len(present) == 1:
            positions.append(present[0])
        else:
            positions.append(None)
            kind = EMPTY_POSITION if not present else MULTIPLE_IN_POSITION
            violations.append(Violation(kind, pos))
    first, last = per_position[0], per_position[-1]
    if len(first) == 1 and len(last) == 1 and first != last:
        violations.append(Violation(OPEN_LOOP))
    return DecodedLoop(positions=positions, violations=violations)


def profitability(loop: DecodedLoop, rates: RateMatrix) -> float:
    """Product of conversion rates along a feasible loop's K-1 transitions.

    Position K repeats position 1, so the closing conversion is already
    one of those transitions.  The result is attached to the loop; values
    above 1 mean the loop turns a profit.
    """
    if not loop.feasible:
        raise NotFeasible(f"cannot price an infeasible loop: {loop.violations}")
    seq = loop.loop
    product = 1.0
    for a, b in zip(seq, seq[1:]):
        product *= rates.rate[a, b]
    loop.profitability = float(product)
    return loop.profitability


def canonical_rotation(loop) -> list[int]:
    """Rotate a closed loop so the smallest currency index leads.

    Rotations of a closed loop are the same trading cycle; this picks the
    deterministic representative, keeping the closing repeat in place.
    """
    seq = list(loop)
    if len(seq) < 2 or seq[0] != seq[-1]:
        return seq
    body = seq[:-1]
    rotations = [tuple(body[i:] + body[:i]) for i in range(len(body))]
    best = min(rotations)
    return list(best) + [best[0]]


# -- model description interchange -------------------------------------------


def model_to_json(
    shape: ProblemShape, weights: HamiltonianWeights, labels
) -> str:
    """Everything needed to decode a SampleSet without the builder state."""
    return json.dumps(
        {
            "n_currencies": shape.n_currencies,
            "loop_length": shape.loop_length,
            "weights": {
                "rate": weights.rate,
                "one_hot": weights.one_hot,
                "endpoint": weights.endpoint,
                "consecutive": weights.consecutive,
                "fill": weights.fill,
            },
            "labels": list(labels),
        }
    )


def model_from_json(text: str) -> tuple[ProblemShape, HamiltonianWeights, list[str]]:
    obj = json.loads(text)
    shape = ProblemShape(int(obj["n_currencies"]), int(obj["loop_length"]))
    wts = obj["weights"]
    weights = HamiltonianWeights(
        rate=float(wts["rate"]),
        one_hot=float(wts["one_hot"]),
        endpoint=float(wts["endpoint"]),
        consecutive=float(wts["consecutive"]),
        fill=float(wts["fill"]),
    )
    return shape, weights, [str(x) for x in obj["labels"]]
