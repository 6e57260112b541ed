"""Query models over hidden convex bodies.

Three oracles are provided, each logging into a :class:`Transcript`:

* ``membership_query`` -- plain YES/NO membership in a body.
* ``modified_query``   -- for a parallelopiped ``||Ax||_inf <= 1``: YES, or
  the least violated constraint index (1-based) together with the sign of
  ``A_i . q``. Boundary values ``|A_i . q| = 1`` count as satisfied, so a
  row product of exactly -1 raises no violation.
* ``entry_threshold_query`` -- whether a single matrix entry is <= a.

A transcript in the modified model can be folded into a :class:`ProductPart`,
a per-row conjunction of linear constraints over a base domain, which is
exactly the set of matrices consistent with the logged answers. Consistency
is testable by replay, and that equivalence is what the experiment suite
checks by sampling.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Callable, NamedTuple

import numpy as np

from .geom import Parallelopiped, as_matrix, as_vector, ball_volume

__all__ = [
    "QueryAnswer",
    "Transcript",
    "RowRegion",
    "ProductPart",
    "VolumeEstimate",
    "EntryOracle",
    "membership_query",
    "modified_query",
    "modified_query_direct",
    "modified_query_codes",
    "answer_from_code",
    "entry_threshold_query",
    "refine_product_part",
    "part_row_volume",
]


@dataclass(frozen=True)
class QueryAnswer:
    """Answer in the modified query model: YES, or Violation(index, sign)."""

    index: int | None = None  # 1-based least violated constraint, None for YES
    sign: int | None = None  # sign of A_i . q at that constraint

    @classmethod
    def yes(cls) -> "QueryAnswer":
        return cls()

    @classmethod
    def violation(cls, index: int, sign: int) -> "QueryAnswer":
        if index < 1:
            raise ValueError("violation index is 1-based")
        if sign not in (-1, 1):
            raise ValueError("sign must be -1 or +1")
        return cls(index=index, sign=sign)

    @property
    def is_yes(self) -> bool:
        return self.index is None

    def to_json(self):
        return "yes" if self.is_yes else {"index": self.index, "sign": self.sign}

    @classmethod
    def from_json(cls, obj) -> "QueryAnswer":
        if obj == "yes":
            return cls.yes()
        return cls.violation(int(obj["index"]), int(obj["sign"]))


@dataclass
class Transcript:
    """Ordered query/answer history; the counter is the query complexity."""

    records: list = field(default_factory=list)

    @property
    def count(self) -> int:
        return len(self.records)

    def log(self, kind: str, query, answer) -> None:
        self.records.append({"kind": kind, "query": query, "answer": answer})

    def modified_records(self) -> list[tuple[np.ndarray, QueryAnswer]]:
        out = []
        for rec in self.records:
            if rec["kind"] == "modified":
                out.append((np.asarray(rec["query"], dtype=np.float64), rec["answer"]))
        return out

    def to_json(self) -> str:
        payload = []
        for rec in self.records:
            ans = rec["answer"]
            if isinstance(ans, QueryAnswer):
                ans = ans.to_json()
            query = rec["query"]
            if isinstance(query, np.ndarray):
                query = query.tolist()
            payload.append({"kind": rec["kind"], "query": query, "answer": ans})
        return json.dumps(payload)

    @classmethod
    def from_json(cls, text: str) -> "Transcript":
        t = cls()
        for rec in json.loads(text):
            ans = rec["answer"]
            if rec["kind"] == "modified":
                ans = QueryAnswer.from_json(ans)
            t.records.append({"kind": rec["kind"], "query": rec["query"], "answer": ans})
        return t

    def replay_matches(self, body) -> bool:
        """Re-ask every logged query against ``body``; True iff answers agree."""
        for rec in self.records:
            kind, query, logged = rec["kind"], rec["query"], rec["answer"]
            if kind == "membership":
                fresh = body.contains(np.asarray(query, dtype=np.float64))
            elif kind == "modified":
                fresh = modified_query_direct(body, np.asarray(query, dtype=np.float64))
            elif kind == "entry":
                i, j, a = int(query[0]), int(query[1]), float(query[2])
                fresh = bool(body.matrix[i - 1, j - 1] <= a)
            else:
                raise ValueError(f"unknown record kind {kind!r}")
            if fresh != logged:
                return False
        return True


def membership_query(body, q, transcript: Transcript) -> bool:
    """YES iff q is in the body; one query charged to the transcript."""
    q = as_vector(q)
    answer = bool(body.contains(q))
    transcript.log("membership", q, answer)
    return answer


def modified_query_direct(body: Parallelopiped, q: np.ndarray) -> QueryAnswer:
    """The modified oracle's answer, without transcript bookkeeping."""
    z = body.matrix @ q
    violated = np.abs(z) > 1.0
    if not violated.any():
        return QueryAnswer.yes()
    i = int(np.argmax(violated))  # first violated row
    return QueryAnswer.violation(i + 1, 1 if z[i] > 0 else -1)


def modified_query(body: Parallelopiped, q, transcript: Transcript) -> QueryAnswer:
    """Modified oracle: YES if ||Aq||_inf <= 1, else least violated (index, sign)."""
    q = as_vector(q, body.n)
    answer = modified_query_direct(body, q)
    transcript.log("modified", q, answer)
    return answer


def modified_query_codes(matrices: np.ndarray, q: np.ndarray) -> np.ndarray:
    """Vectorized modified-oracle answers for a stack of hidden matrices.

    Returns integer codes in 0..2n: 0 for YES, else 2(i-1)+1 for
    Violation(i, +1) and 2(i-1)+2 for Violation(i, -1).
    """
    z = matrices @ q
    violated = np.abs(z) > 1.0
    any_violation = violated.any(axis=1)
    first = np.argmax(violated, axis=1)
    sign_neg = z[np.arange(z.shape[0]), first] < 0
    codes = np.where(any_violation, 2 * first + 1 + sign_neg, 0)
    return codes.astype(np.int64)


def answer_from_code(code: int) -> QueryAnswer:
    if code == 0:
        return QueryAnswer.yes()
    index = (code - 1) // 2 + 1
    return QueryAnswer.violation(index, 1 if code % 2 == 1 else -1)


def entry_threshold_query(matrix, i: int, j: int, a: float, transcript: Transcript) -> bool:
    """Whether entry (i, j) (1-based) of the hidden matrix is <= a."""
    m = as_matrix(matrix)
    n = m.shape[0]
    if not (1 <= i <= n and 1 <= j <= m.shape[1]):
        raise IndexError(f"entry ({i},{j}) out of range for {n}x{m.shape[1]} matrix")
    answer = bool(m[i - 1, j - 1] <= a)
    transcript.log("entry", (i, j, float(a)), answer)
    return answer


class EntryOracle:
    """Entry-threshold oracle over a hidden matrix, with query counting."""

    def __init__(self, matrix, transcript: Transcript | None = None):
        self.matrix = as_matrix(matrix)
        self.transcript = transcript if transcript is not None else Transcript()

    @property
    def n(self) -> int:
        return self.matrix.shape[0]

    def __call__(self, i: int, j: int, a: float) -> bool:
        return entry_threshold_query(self.matrix, i, j, a, self.transcript)


# --- product sets along rows -------------------------------------------------

_CONSTRAINT_KINDS = ("abs_le", "gt", "lt")  # |v.x| <= 1,  v.x > 1,  v.x < -1


@dataclass(frozen=True)
class RowRegion:
    """A base domain intersected with linear constraints, for one matrix row.

    ``domain`` is ``"ball"`` (radius sqrt(n), the row support of distribution
    D) or ``"cube"`` ([-1, 1]^n, the row support of D'). Constraints are
    (kind, v) pairs with kind one of ``abs_le`` (|v.x| <= 1), ``gt``
    (v.x > 1) and ``lt`` (v.x < -1).
    """

    n: int
    domain: str
    constraints: tuple[tuple[str, np.ndarray], ...] = ()

    def __post_init__(self) -> None:
        if self.domain not in ("ball", "cube"):
            raise ValueError("domain must be 'ball' or 'cube'")
        for kind, _ in self.constraints:
            if kind not in _CONSTRAINT_KINDS:
                raise ValueError(f"unknown constraint kind {kind!r}")

    def with_constraint(self, kind: str, v: np.ndarray) -> "RowRegion":
        v = as_vector(v, self.n).copy()
        v.flags.writeable = False
        return RowRegion(self.n, self.domain, self.constraints + ((kind, v),))

    def domain_volume(self) -> float:
        if self.domain == "ball":
            return ball_volume(self.n, math.sqrt(self.n))
        return 2.0**self.n

    def contains_many(self, xs: np.ndarray) -> np.ndarray:
        xs = np.asarray(xs, dtype=np.float64)
        if self.domain == "ball":
            ok = np.einsum("...i,...i->...", xs, xs) <= self.n
        else:
            ok = np.all(np.abs(xs) <= 1.0, axis=-1)
        for kind, v in self.constraints:
            t = xs @ v
            if kind == "abs_le":
                ok &= np.abs(t) <= 1.0
            elif kind == "gt":
                ok &= t > 1.0
            else:
                ok &= t < -1.0
        return ok

    def contains(self, x) -> bool:
        return bool(self.contains_many(np.asarray(x, dtype=np.float64)[None, :])[0])


@dataclass(frozen=True)
class ProductPart:
    """A product set along rows: one RowRegion per matrix row."""

    rows: tuple[RowRegion, ...]

    @classmethod
    def full(cls, n: int, domain: str = "ball") -> "ProductPart":
        """The unconstrained base domain (empty transcript)."""
        return cls(tuple(RowRegion(n, domain) for _ in range(n)))

    @property
    def n(self) -> int:
        return len(self.rows)

    def contains_matrix(self, m) -> bool:
        a = as_matrix(m)
        return all(self.rows[i].contains(a[i]) for i in range(self.n))

    def contains_many(self, ms: np.ndarray) -> np.ndarray:
        ms = np.asarray(ms, dtype=np.float64)
        ok = np.ones(ms.shape[0], dtype=bool)
        for i, region in enumerate(self.rows):
            ok &= region.contains_many(ms[:, i, :])
        return ok


def refine_product_part(part: ProductPart, q, answer: QueryAnswer) -> ProductPart:
    """Intersect a product part with the matrices consistent with (q, answer).

    YES adds |R_i . q| <= 1 to every row region. Violation(i, s) adds
    |R_j . q| <= 1 for j < i, the one-sided constraint s(R_i . q) > 1 for
    row i, and nothing for rows beyond i.
    """
    q = as_vector(q, part.n)
    rows = list(part.rows)
    if answer.is_yes:
        rows = [r.with_constraint("abs_le", q) for r in rows]
    else:
        i = answer.index
        if not 1 <= i <= part.n:
            raise ValueError(f"violation index {i} out of range")
        for j in range(i - 1):
            rows[j] = rows[j].with_constraint("abs_le", q)
        rows[i - 1] = rows[i - 1].with_constraint("gt" if answer.sign > 0 else "lt", q)
    return ProductPart(tuple(rows))


def fold_transcript(part: ProductPart, transcript: Transcript) -> ProductPart:
    """Fold every modified-oracle record of a transcript into the part."""
    for q, ans in transcript.modified_records():
        part = refine_product_part(part, q, ans)
    return part


class VolumeEstimate(NamedTuple):
    value: float
    stderr: float


def part_row_volume(
    part: ProductPart, i: int, samples: int, rng: np.random.Generator
) -> VolumeEstimate:
    """Unbiased rejection estimate of vol(RowRegion_i), with standard error.

    Row index is 1-based. Proposals are uniform on the row's base domain.
    """
    if samples < 1:
        raise ValueError("samples must be >= 1")
    region = part.rows[i - 1]
    n = region.n
    if region.domain == "ball":
        from .sampling import uniform_ball

        pts = uniform_ball(n, math.sqrt(n), rng, size=samples)
    else:
        pts = rng.uniform(-1.0, 1.0, size=(samples, n))
    hit = region.contains_many(pts)
    p = float(np.mean(hit))
    base = region.domain_volume()
    stderr = base * math.sqrt(max(p * (1.0 - p), 0.0) / samples)
    return VolumeEstimate(base * p, stderr)
