"""Problem instances: model, text format and builders for KP, UFLP and CFLP.

All objectives are stored for minimization.  A maximization objective is kept
negated and flagged in ``maximize`` so reports can restore the original sign.

Text format (whitespace separated integers, ``#`` starts a comment)::

    p n m
    min c_1 ... c_n          # p objective lines, "min" or "max"
    <= b a_1 ... a_n         # m rows, sense one of <=, >=, =
    tags 0:facility 1:facility   # optional
"""
from __future__ import annotations

import math
from collections.abc import Sequence
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

SENSES = ("<=", ">=", "=")
KINDS = ("kp", "uflp", "cflp")


class InstanceFormatError(ValueError):
    def __init__(self, message: str, line: int | None = None):
        self.line = line
        super().__init__(f"line {line}: {message}" if line is not None else message)


@dataclass(eq=False)
class MoilpInstance:
    C: np.ndarray
    A: np.ndarray
    senses: tuple[str, ...]
    b: np.ndarray
    maximize: tuple[bool, ...] = ()
    labels: tuple[str | None, ...] = ()
    name: str = ""
    meta: dict = field(default_factory=dict)

    def __post_init__(self) -> None:
        self.C = np.asarray(self.C, dtype=np.int64)
        if self.C.ndim != 2:
            raise ValueError("objective matrix must be p x n")
        p, n = self.C.shape
        self.A = np.asarray(self.A, dtype=np.int64).reshape(-1, n)
        self.b = np.asarray(self.b, dtype=np.int64).reshape(-1)
        self.senses = tuple(self.senses)
        if not self.maximize:
            self.maximize = (False,) * p
        self.maximize = tuple(bool(v) for v in self.maximize)
        if not self.labels:
            self.labels = (None,) * n
        self.labels = tuple(self.labels)
        if n < 1:
            raise ValueError("need at least one variable")
        if p < 2:
            raise ValueError("need at least two objectives")
        if len(self.senses) != self.A.shape[0] or self.b.shape[0] != self.A.shape[0]:
            raise ValueError("row data has inconsistent lengths")
        if any(s not in SENSES for s in self.senses):
            raise ValueError(f"unknown row sense in {self.senses}")
        if len(self.maximize) != p or len(self.labels) != n:
            raise ValueError("maximize flags / labels have wrong length")

    @property
    def p(self) -> int:
        return self.C.shape[0]

    @property
    def n(self) -> int:
        return self.C.shape[1]

    @property
    def m(self) -> int:
        return self.A.shape[0]

    @cached_property
    def sense_codes(self) -> np.ndarray:
        return np.array([{"<=": -1, "=": 0, ">=": 1}[s] for s in self.senses], dtype=np.int64)

    @cached_property
    def float_data(self) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """``(C, A, b)`` as contiguous float arrays for the LP code."""
        return (
            np.ascontiguousarray(self.C, dtype=np.float64),
            np.ascontiguousarray(self.A, dtype=np.float64),
            np.ascontiguousarray(self.b, dtype=np.float64),
        )

    def indices_with_label(self, label: str) -> list[int]:
        return [j for j, lab in enumerate(self.labels) if lab == label]

    def is_feasible(self, x: Sequence[int]) -> bool:
        """Exact integer check of every row."""
        x = np.asarray(x, dtype=np.int64)
        act = self.A @ x
        for a, s, rhs in zip(act, self.senses, self.b):
            if s == "<=" and a > rhs:
                return False
            if s == ">=" and a < rhs:
                return False
            if s == "=" and a != rhs:
                return False
        return True

    def image(self, x: Sequence[int]) -> tuple[int, ...]:
        return tuple(int(v) for v in self.C @ np.asarray(x, dtype=np.int64))

    def reported(self, image: Sequence[int]) -> tuple[int, ...]:
        return tuple(-v if mx else v for v, mx in zip(image, self.maximize))

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, MoilpInstance):
            return NotImplemented
        return (
            np.array_equal(self.C, other.C)
            and np.array_equal(self.A, other.A)
            and np.array_equal(self.b, other.b)
            and self.senses == other.senses
            and self.maximize == other.maximize
            and self.labels == other.labels
        )


# --------------------------------------------------------------------------
# builders


def build_kp(weights, capacity, values, *, maximize: bool = True) -> MoilpInstance:
    """Multi-objective knapsack.

    ``values`` is p x n.  With ``maximize`` the values are utilities to be
    maximized (stored negated); otherwise they are costs minimized as given.
    """
    w = np.asarray(weights, dtype=np.int64)
    if np.any(w <= 0):
        raise ValueError("knapsack weights must be positive")
    if capacity <= 0:
        raise ValueError("knapsack capacity must be positive")
    V = np.asarray(values, dtype=np.int64)
    if V.ndim != 2 or V.shape[1] != w.shape[0]:
        raise ValueError("values must be p x n")
    C = -V if maximize else V
    return MoilpInstance(
        C, w.reshape(1, -1), ("<=",), [capacity], maximize=(maximize,) * V.shape[0],
        meta={"kind": "kp"},
    )


def _facility_labels(l: int, r: int, with_z: bool) -> tuple[str, ...]:
    labels = ["facility"] * l + ["assignment"] * (r * l)
    if with_z:
        labels += ["served"] * r
    return tuple(labels)


def build_uflp(assign_costs, open_costs) -> MoilpInstance:
    """Uncapacitated facility location.

    ``assign_costs`` is p x r x l, ``open_costs`` is p x l.  Variables are
    ``y_1..y_l`` followed by ``x_ij`` in customer-major order.
    """
    c = np.asarray(assign_costs, dtype=np.int64)
    f = np.asarray(open_costs, dtype=np.int64)
    p, r, l = c.shape
    if l < 1 or r < 1:
        raise ValueError("need at least one facility and one customer")
    if f.shape != (p, l):
        raise ValueError("opening costs must be p x l")
    n = l + r * l
    C = np.zeros((p, n), dtype=np.int64)
    C[:, :l] = f
    C[:, l:] = c.reshape(p, r * l)
    rows, senses, rhs = [], [], []
    for i in range(r):
        a = np.zeros(n, dtype=np.int64)
        a[l + i * l: l + (i + 1) * l] = 1
        rows.append(a)
        senses.append("=")
        rhs.append(1)
    for i in range(r):
        for j in range(l):
            a = np.zeros(n, dtype=np.int64)
            a[l + i * l + j] = 1
            a[j] = -1
            rows.append(a)
            senses.append("<=")
            rhs.append(0)
    return MoilpInstance(
        C, np.array(rows), tuple(senses), rhs, labels=_facility_labels(l, r, False),
        meta={"kind": "uflp", "l": l, "r": r},
    )


def build_cflp(assign_costs, open_costs, demands, capacities) -> MoilpInstance:
    """Capacitated facility location with optional service (three objectives).

    ``assign_costs`` is r x l, ``open_costs`` has length l.  Objectives: total
    assignment cost (min), total opening cost (min), served demand (max).
    Variables: ``y_j``, then ``x_ij`` customer-major, then ``z_i``.
    """
    c = np.asarray(assign_costs, dtype=np.int64)
    f = np.asarray(open_costs, dtype=np.int64)
    d = np.asarray(demands, dtype=np.int64)
    t = np.asarray(capacities, dtype=np.int64)
    r, l = c.shape
    if np.any(d <= 0):
        raise ValueError("demands must be positive")
    if np.any(t < 0):
        raise ValueError("capacities must be nonnegative")
    n = l + r * l + r
    C = np.zeros((3, n), dtype=np.int64)
    C[0, l:l + r * l] = c.reshape(-1)
    C[1, :l] = f
    C[2, l + r * l:] = -d
    rows, senses, rhs = [], [], []
    for i in range(r):
        a = np.zeros(n, dtype=np.int64)
        a[l + i * l: l + (i + 1) * l] = 1
        a[l + r * l + i] = -1
        rows.append(a)
        senses.append("=")
        rhs.append(0)
    for i in range(r):
        for j in range(l):
            a = np.zeros(n, dtype=np.int64)
            a[l + i * l + j] = 1
            a[j] = -1
            rows.append(a)
            senses.append("<=")
            rhs.append(0)
    for j in range(l):
        a = np.zeros(n, dtype=np.int64)
        for i in range(r):
            a[l + i * l + j] = d[i]
        a[j] = -t[j]
        rows.append(a)
        senses.append("<=")
        rhs.append(0)
    return MoilpInstance(
        C, np.array(rows), tuple(senses), rhs, maximize=(False, False, True),
        labels=_facility_labels(l, r, True), meta={"kind": "cflp", "l": l, "r": r},
    )


# --------------------------------------------------------------------------
# random generators


def _rng(kind: str, p: int, size, seed: int) -> np.random.Generator:
    dims = list(size) if isinstance(size, tuple) else [size]
    return np.random.default_rng([seed, KINDS.index(kind), p, *dims])


def generate_random(kind: str, p: int, size, seed: int) -> MoilpInstance:
    """Reproducible random instance.

    ``size`` is ``n`` for ``kp`` and ``(l, r)`` (facilities, customers) for the
    facility classes.
    """
    kind = kind.lower()
    if kind not in KINDS:
        raise ValueError(f"unsupported instance class {kind!r}")
    rng = _rng(kind, p, size, seed)
    if kind == "kp":
        n = int(size)
        w = rng.integers(10, 101, n)
        V = rng.integers(10, 101, (p, n))
        inst = build_kp(w, math.ceil(int(w.sum()) / 2), V)
    else:
        l, r = size
        if kind == "uflp":
            inst = build_uflp(rng.integers(1, 101, (p, r, l)), rng.integers(1, 101, (p, l)))
        else:
            if p != 3:
                raise ValueError("the CFLP class has exactly three objectives")
            d = rng.integers(5, 21, r)
            cap = max(1, round(0.6 * int(d.sum()) / l))
            inst = build_cflp(rng.integers(1, 101, (r, l)), rng.integers(1, 101, l), d, [cap] * l)
    inst.name = f"{kind}_p{p}_{'x'.join(map(str, size)) if isinstance(size, tuple) else size}_s{seed}"
    inst.meta["seed"] = seed
    return inst


# --------------------------------------------------------------------------
# text format


def write_generic(inst: MoilpInstance) -> str:
    out = []
    if inst.name:
        out.append(f"# {inst.name}")
    out.append(f"{inst.p} {inst.n} {inst.m}")
    for k in range(inst.p):
        coefs = -inst.C[k] if inst.maximize[k] else inst.C[k]
        out.append(("max " if inst.maximize[k] else "min ") + " ".join(str(int(v)) for v in coefs))
    for a, s, rhs in zip(inst.A, inst.senses, inst.b):
        out.append(f"{s} {int(rhs)} " + " ".join(str(int(v)) for v in a))
    tagged = [f"{j}:{lab}" for j, lab in enumerate(inst.labels) if lab]
    if tagged:
        out.append("tags " + " ".join(tagged))
    return "\n".join(out) + "\n"


def _int(tok: str, line: int) -> int:
    try:
        return int(tok)
    except ValueError:
        raise InstanceFormatError(f"expected an integer, got {tok!r}", line) from None


def parse_generic(text: str) -> MoilpInstance:
    lines = []
    for no, raw in enumerate(text.splitlines(), start=1):
        body = raw.split("#", 1)[0].strip()
        if body:
            lines.append((no, body.split()))
    if not lines:
        raise InstanceFormatError("empty file: missing header")
    no, head = lines[0]
    if len(head) != 3:
        raise InstanceFormatError("header must be 'p n m'", no)
    p, n, m = (_int(t, no) for t in head)
    if p < 2 or n < 1 or m < 0:
        raise InstanceFormatError("header values out of range", no)
    pos = 1
    C, maximize = [], []
    for k in range(p):
        if pos >= len(lines):
            raise InstanceFormatError(f"truncated file: missing objective section (objective {k + 1} of {p})")
        no, toks = lines[pos]
        pos += 1
        if toks[0] not in ("min", "max"):
            raise InstanceFormatError("objective line must start with 'min' or 'max'", no)
        if len(toks) != n + 1:
            raise InstanceFormatError(f"objective needs {n} coefficients, got {len(toks) - 1}", no)
        coefs = [_int(t, no) for t in toks[1:]]
        mx = toks[0] == "max"
        C.append([-v for v in coefs] if mx else coefs)
        maximize.append(mx)
    A, senses, b = [], [], []
    for i in range(m):
        if pos >= len(lines):
            raise InstanceFormatError(f"truncated file: missing constraint section (row {i + 1} of {m})")
        no, toks = lines[pos]
        pos += 1
        if toks[0] not in SENSES:
            raise InstanceFormatError(f"unknown row sense {toks[0]!r}", no)
        if len(toks) != n + 2:
            raise InstanceFormatError(f"row needs rhs and {n} coefficients", no)
        senses.append(toks[0])
        b.append(_int(toks[1], no))
        A.append([_int(t, no) for t in toks[2:]])
    labels: list[str | None] = [None] * n
    if pos < len(lines):
        no, toks = lines[pos]
        pos += 1
        if toks[0] != "tags":
            raise InstanceFormatError(f"unexpected content {toks[0]!r}", no)
        for tok in toks[1:]:
            idx, _, lab = tok.partition(":")
            j = _int(idx, no)
            if not 0 <= j < n:
                raise InstanceFormatError(f"tag index {j} out of range", no)
            if not lab:
                raise InstanceFormatError(f"tag {tok!r} has no label", no)
            labels[j] = lab
    if pos < len(lines):
        raise InstanceFormatError("trailing content after tags", lines[pos][0])
    return MoilpInstance(
        np.array(C, dtype=np.int64).reshape(p, n),
        np.array(A, dtype=np.int64).reshape(m, n),
        tuple(senses), b, maximize=tuple(maximize), labels=tuple(labels),
    )


def read_generic(path) -> MoilpInstance:
    with open(path, encoding="utf-8") as fh:
        inst = parse_generic(fh.read())
    return inst
