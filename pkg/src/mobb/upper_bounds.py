"""Incumbent set of mutually nondominated feasible points."""
from __future__ import annotations

import csv
import io
import json
from collections.abc import Sequence
from dataclasses import dataclass, field

from .geometry import weakly_dominates


@dataclass(frozen=True)
class FeasibleSolution:
    image: tuple[int, ...]
    preimage: tuple[int, ...]


@dataclass
class ChangeReport:
    accepted: bool
    removed: list[tuple[int, ...]] = field(default_factory=list)


class UpperBoundSet:
    """Flat list of nondominated solutions, one pre-image per image.

    Linear scans are fine at the front sizes this package targets.
    """

    def __init__(self) -> None:
        self.solutions: list[FeasibleSolution] = []

    def __len__(self) -> int:
        return len(self.solutions)

    def __iter__(self):
        return iter(self.solutions)

    def images(self) -> list[tuple[int, ...]]:
        return [s.image for s in self.solutions]

    def insert(self, sol: FeasibleSolution) -> ChangeReport:
        img = sol.image
        for s in self.solutions:
            if weakly_dominates(s.image, img):
                return ChangeReport(False)
        removed = [s.image for s in self.solutions if weakly_dominates(img, s.image)]
        if removed:
            self.solutions = [s for s in self.solutions if not weakly_dominates(img, s.image)]
        self.solutions.append(sol)
        return ChangeReport(True, removed)

    def snapshot(self) -> tuple[FeasibleSolution, ...]:
        return tuple(self.solutions)

    def sorted_solutions(self) -> list[FeasibleSolution]:
        return sorted(self.solutions, key=lambda s: (s.image, s.preimage))


def reported_image(image: Sequence[int], maximize: Sequence[bool]) -> tuple[int, ...]:
    """Undo the negation applied to maximization objectives."""
    return tuple(-v if mx else v for v, mx in zip(image, maximize))


def front_rows(solutions, maximize: Sequence[bool]) -> list[tuple[tuple[int, ...], tuple[int, ...]]]:
    rows = [(reported_image(s.image, maximize), tuple(s.preimage)) for s in solutions]
    rows.sort()
    return rows


def front_to_csv(solutions, maximize: Sequence[bool]) -> str:
    """One row per point: p objective values (original sense) then n binaries."""
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    rows = front_rows(solutions, maximize)
    p = len(maximize)
    n = len(rows[0][1]) if rows else 0
    w.writerow([f"z{k + 1}" for k in range(p)] + [f"x{j + 1}" for j in range(n)])
    for img, pre in rows:
        w.writerow(list(img) + list(pre))
    return buf.getvalue()


def front_from_csv(text: str, p: int) -> list[FeasibleSolution]:
    reader = csv.reader(io.StringIO(text))
    next(reader, None)
    out = []
    for row in reader:
        if not row:
            continue
        vals = [int(v) for v in row]
        out.append(FeasibleSolution(tuple(vals[:p]), tuple(vals[p:])))
    return out


def front_to_json(solutions, maximize: Sequence[bool]) -> str:
    rows = front_rows(solutions, maximize)
    payload = [{"objectives": list(img), "x": list(pre)} for img, pre in rows]
    return json.dumps(payload, sort_keys=True)
