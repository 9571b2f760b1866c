"""Index over the (1/p, 1/q) square and the lines where it can jump.

In coordinates ``x = 1/p``, ``y = 1/q``:

* ``Q_CUT``: alpha2 = lam, i.e. ``y = ((n+1)/2 - lam)/n`` (horizontal),
* ``P_CUT``: -alpha1 = lam, i.e. ``x = ((n-1)/2 - lam)/n`` (vertical, matters
  only in the second regime),
* ``REGIME``: ``1 + n x - n y = 0``.
"""

from __future__ import annotations

import csv
import enum
import io
import json
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .errors import ConsistencyError, InvalidInputError
from .index_core import ConeProblem, IndexResult, Regime, index_lpq
from .rational import format_rational, parse_rational
from .spectra import Interval, count_eigs, enumerate_eigs


class LocusType(enum.Enum):
    Q_CUT = "Q_CUT"
    P_CUT = "P_CUT"
    REGIME = "REGIME"


@dataclass(frozen=True)
class Locus:
    type: LocusType
    #: boundary eigenvalue producing the cut; None for the regime line
    eigenvalue: Fraction | None
    #: 1/q for Q_CUT, 1/p for P_CUT, None for the regime line (y = x + 1/n)
    coordinate: Fraction | None

    def to_json(self) -> dict:
        return {
            "type": self.type.value,
            "eigenvalue": None if self.eigenvalue is None else format_rational(self.eigenvalue),
            "coordinate": None if self.coordinate is None else format_rational(self.coordinate),
        }


@dataclass(frozen=True)
class PhaseDiagram:
    n: int
    inv_p: tuple[Fraction, ...]
    inv_q: tuple[Fraction, ...]
    #: grid[i][j] is the result at (inv_p[i], inv_q[j])
    grid: tuple[tuple[IndexResult, ...], ...]
    loci: tuple[Locus, ...]

    def cells(self):
        """Row-major iteration over ``(inv_p, inv_q, result)``."""
        for i, x in enumerate(self.inv_p):
            for j, y in enumerate(self.inv_q):
                yield x, y, self.grid[i][j]

    def _separated(self, a: tuple[Fraction, Fraction], b: tuple[Fraction, Fraction]) -> bool:
        (x1, y1), (x2, y2) = a, b
        for locus in self.loci:
            if locus.type is LocusType.Q_CUT and min(y1, y2) <= locus.coordinate <= max(y1, y2):
                return True
            if locus.type is LocusType.P_CUT and min(x1, x2) <= locus.coordinate <= max(x1, x2):
                return True
        inv_n = Fraction(1, self.n)
        return (y1 - x1 - inv_n >= 0) != (y2 - x2 - inv_n >= 0)

    def piecewise_violations(self) -> list[tuple[tuple[Fraction, Fraction], tuple[Fraction, Fraction]]]:
        """Neighbouring cells with different indices and no locus between them."""
        bad = []
        for i, x in enumerate(self.inv_p):
            for j, y in enumerate(self.inv_q):
                here = self.grid[i][j].index
                for di, dj in ((1, 0), (0, 1)):
                    if i + di >= len(self.inv_p) or j + dj >= len(self.inv_q):
                        continue
                    x2, y2 = self.inv_p[i + di], self.inv_q[j + dj]
                    if self.grid[i + di][j + dj].index != here and not self._separated((x, y), (x2, y2)):
                        bad.append(((x, y), (x2, y2)))
        return bad

    def to_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["inv_p", "inv_q", "index", "regime", "variant_agrees"])
        for x, y, r in self.cells():
            writer.writerow(
                [format_rational(x), format_rational(y), r.index, r.regime.value, str(r.variant_agrees).lower()]
            )
        return buf.getvalue()

    def loci_json(self) -> str:
        return json.dumps([locus.to_json() for locus in self.loci], indent=2)


def _inverse_range(r: Sequence[object], name: str) -> tuple[Fraction, Fraction]:
    lo, hi = (parse_rational(v, what=name) for v in r)
    if not 1 < lo < hi:
        raise InvalidInputError(f"{name} must satisfy 1 < lo < hi")
    return 1 / hi, 1 / lo


def compute_loci(prob: ConeProblem, x_range: tuple[Fraction, Fraction], y_range: tuple[Fraction, Fraction]) -> list[Locus]:
    n = prob.n
    half_up, half_down = Fraction(n + 1, 2), Fraction(n - 1, 2)
    (x_lo, x_hi), (y_lo, y_hi) = x_range, y_range
    loci = []
    # y = (half_up - lam)/n in (y_lo, y_hi)  <=>  lam in (half_up - n y_hi, half_up - n y_lo)
    for lam, _ in enumerate_eigs(prob.boundary, Interval.open(half_up - n * y_hi, half_up - n * y_lo)):
        loci.append(Locus(LocusType.Q_CUT, lam, (half_up - lam) / n))
    for lam, _ in enumerate_eigs(prob.boundary, Interval.open(half_down - n * x_hi, half_down - n * x_lo)):
        x = (half_down - lam) / n
        # the second regime y >= x + 1/n must meet the box at this x
        if x + Fraction(1, n) < y_hi:
            loci.append(Locus(LocusType.P_CUT, lam, x))
    # y = x + 1/n crosses the open box
    if x_lo + Fraction(1, n) < y_hi and x_hi + Fraction(1, n) > y_lo:
        loci.append(Locus(LocusType.REGIME, None, None))
    return loci


def _grid(lo: Fraction, hi: Fraction, resolution: int, avoid: set[Fraction]) -> list[Fraction]:
    step = (hi - lo) / resolution
    out = []
    for i in range(resolution):
        v = lo + (i + Fraction(1, 2)) * step
        nudge = 1
        while v in avoid:
            # deterministic walk inside the cell, alternating sides
            v = lo + (i + Fraction(1, 2) + ((-1) ** nudge) * Fraction(nudge, 4 * (nudge + 2))) * step
            nudge += 1
        out.append(v)
    return out


def sweep(
    template: ConeProblem,
    p_range: Sequence[object],
    q_range: Sequence[object],
    resolution: int,
    *,
    on_loci: bool = False,
    threads: int = 1,
) -> PhaseDiagram:
    """Evaluate the index on a ``resolution x resolution`` grid; ``template.p``/``q`` are ignored.

    Grid points are cell midpoints moved off every locus unless ``on_loci``.
    """
    if not isinstance(resolution, int) or resolution < 1:
        raise InvalidInputError("resolution must be a positive integer")
    x_range = _inverse_range(p_range, "p_range")
    y_range = _inverse_range(q_range, "q_range")
    loci = compute_loci(template, x_range, y_range)
    n = template.n
    xs_bad = set() if on_loci else {l.coordinate for l in loci if l.type is LocusType.P_CUT}
    ys_bad = set() if on_loci else {l.coordinate for l in loci if l.type is LocusType.Q_CUT}
    xs = _grid(*x_range, resolution, xs_bad)
    ys = _grid(*y_range, resolution, ys_bad)
    if not on_loci and any(l.type is LocusType.REGIME for l in loci):
        ys = _grid(*y_range, resolution, ys_bad | {x + Fraction(1, n) for x in xs})

    points = [(x, y) for x in xs for y in ys]

    def evaluate(pt: tuple[Fraction, Fraction]) -> IndexResult:
        x, y = pt
        return index_lpq(template.with_exponents(1 / x, 1 / y))

    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            results = list(pool.map(evaluate, points))
    else:
        results = [evaluate(pt) for pt in points]
    grid = tuple(tuple(results[i * len(ys) : (i + 1) * len(ys)]) for i in range(len(xs)))
    return PhaseDiagram(n, tuple(xs), tuple(ys), grid, tuple(loci))


def jump_at(template: ConeProblem, q_before: object, q_after: object, p: object) -> int:
    """Index change between two exponents q at fixed p, both in the first regime.

    Equals ``-N[alpha2(before), alpha2(after))`` when alpha2 increases (and the
    opposite count when it decreases); checked against the direct evaluation.
    """
    before = template.with_exponents(parse_rational(p, what="p"), parse_rational(q_before, what="q_before"))
    after = template.with_exponents(parse_rational(p, what="p"), parse_rational(q_after, what="q_after"))
    if before.regime is not Regime.APS or after.regime is not Regime.APS:
        raise InvalidInputError("jump_at needs both exponents in the first regime")
    a_before, a_after = before.exponents[1], after.exponents[1]
    if a_before <= a_after:
        predicted = -count_eigs(template.boundary, Interval.half_open(a_before, a_after))
    else:
        predicted = count_eigs(template.boundary, Interval.half_open(a_after, a_before))
    jump = index_lpq(after).index - index_lpq(before).index
    if jump != predicted:
        raise ConsistencyError(f"index jump {jump} but eigenvalue count predicts {predicted}")
    return jump
