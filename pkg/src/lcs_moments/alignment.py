"""Cell encoding of alignments: vectors, decompositions, scores, breaking.

An alignment of two words is encoded by the integer vector of per-cell
dominant-letter count differences. A cell is the stretch between consecutive
aligned non-dominant letter pairs; inside each cell the maximum number of
dominant letters is aligned, so the vector determines the alignment up to
irrelevant choices. ``decode`` realizes a vector greedily (earliest boundary
pairs first); ``lambda_c`` scores a realization; the score of any admissible
vector never exceeds the LCS length, with equality exactly at the optimal
vectors.

Boundary pairs are chosen minimal in the componentwise order. When several
incomparable minimal pairs exist the componentwise minimum is not unique;
``decode`` then picks the lexicographically smallest pair and flags the tie,
while the enumeration and scoring routines branch over the whole minimal
frontier (any two incomparable satisfying pairs share identical per-strand
dominant counts, so branch choices only affect feasibility further right,
never the current cell's score).
"""

from __future__ import annotations

from bisect import bisect_right
from dataclasses import dataclass, field

import numpy as np

from .kernel import CapExceeded, enumerate_optimal_alignments, lcs_backtrack
from .words import letters_of

AlignmentVector = tuple[int, ...]


@dataclass(frozen=True)
class Inadmissible:
    """Marker value: the greedy construction ran off the end of a word."""

    failed_cell: int  # 1-based index of the first cell that cannot be built

    def __bool__(self) -> bool:
        return False


@dataclass(frozen=True)
class CellDecomposition:
    """A realized alignment vector: boundaries, per-cell counts, trailing run.

    ``pi``/``nu`` hold the 1-based boundary indices including the leading 0;
    ``aligned_dominant[i]`` is the number of dominant letters aligned inside
    cell i+1 (the smaller of the two strand counts); ``trailing`` is the
    number aligned after the last cell.
    """

    v: AlignmentVector
    pi: tuple[int, ...]
    nu: tuple[int, ...]
    aligned_dominant: tuple[int, ...]
    trailing: int
    cell_letters: tuple[int, ...]
    dominant: int
    ties: bool = False

    @property
    def k(self) -> int:
        return len(self.v)

    def to_json_dict(self) -> dict:
        return {
            "pi": list(self.pi),
            "nu": list(self.nu),
            "S": list(self.aligned_dominant),
            "r": self.trailing,
            "lambda": lambda_c(self),
        }


def lambda_c(d: CellDecomposition) -> int:
    """Score of a realized alignment: cells + aligned dominant + trailing."""
    if isinstance(d, Inadmissible):
        raise TypeError("cannot score an inadmissible decomposition")
    return d.k + sum(d.aligned_dominant) + d.trailing


def vector_to_string(v: AlignmentVector) -> str:
    return ",".join(str(c) for c in v)


def vector_from_string(text: str) -> AlignmentVector:
    text = text.strip()
    if not text:
        return ()
    return tuple(int(tok) for tok in text.split(","))


class _Ctx:
    """Per-pair precomputation shared by the alignment routines."""

    def __init__(self, x, y, dominant: int):
        self.xa = letters_of(x)
        self.ya = letters_of(y)
        self.dominant = dominant
        self.nx = int(self.xa.size)
        self.ny = int(self.ya.size)
        self.domx = np.concatenate(([0], np.cumsum(self.xa == dominant)))
        self.domy = np.concatenate(([0], np.cumsum(self.ya == dominant)))
        self.nondom_x = [int(p) for p in (np.flatnonzero(self.xa != dominant) + 1)]
        # non-dominant positions of y keyed by (letter, dominant count before it)
        self.y_slots: dict[tuple[int, int], list[int]] = {}
        for t in (np.flatnonzero(self.ya != dominant) + 1).tolist():
            key = (int(self.ya[t - 1]), int(self.domy[t]))
            self.y_slots.setdefault(key, []).append(t)

    def trailing(self, a: int, b: int) -> int:
        return int(min(self.domx[self.nx] - self.domx[a], self.domy[self.ny] - self.domy[b]))

    def cell_count(self, a: int, s: int, b: int, t: int) -> int:
        return int(min(self.domx[s] - self.domx[a], self.domy[t] - self.domy[b]))

    def frontier(self, a: int, b: int, u: int) -> list[tuple[int, int]]:
        """Minimal satisfying boundary pairs for one cell, ascending in s.

        A pair (s, t) satisfies: s > a, t > b, x[s] == y[t] is non-dominant,
        and the dominant-count difference across the cell equals u. The list
        is the Pareto frontier of the satisfying set; its head is the
        lexicographic minimum.
        """
        out: list[tuple[int, int]] = []
        best_t = self.ny + 1
        domx, domy = self.domx, self.domy
        total_y = int(domy[self.ny])
        base_y = int(domy[b])
        base_x = int(domx[a])
        lo = bisect_right(self.nondom_x, a)
        for s in self.nondom_x[lo:]:
            need = int(domx[s]) - base_x - u
            if need < 0:
                continue
            level = base_y + need
            if level > total_y:
                break  # need only grows with s
            slots = self.y_slots.get((int(self.xa[s - 1]), level))
            if not slots:
                continue
            idx = bisect_right(slots, b)
            if idx >= len(slots):
                continue
            t = slots[idx]
            if t < best_t:
                out.append((s, t))
                best_t = t
                if best_t == b + 1:
                    break
        return out


def _build_decomposition(
    ctx: _Ctx, v: AlignmentVector, boundaries: list[tuple[int, int]], ties: bool
) -> CellDecomposition:
    pi = [0]
    nu = [0]
    counts = []
    letters = []
    a = b = 0
    for s, t in boundaries:
        counts.append(ctx.cell_count(a, s, b, t))
        letters.append(int(ctx.xa[s - 1]))
        pi.append(s)
        nu.append(t)
        a, b = s, t
    return CellDecomposition(
        v=tuple(v),
        pi=tuple(pi),
        nu=tuple(nu),
        aligned_dominant=tuple(counts),
        trailing=ctx.trailing(a, b),
        cell_letters=tuple(letters),
        dominant=ctx.dominant,
        ties=ties,
    )


def decode(x, y, v, dominant: int = 1) -> CellDecomposition | Inadmissible:
    """Realize an alignment vector by the greedy minimal construction.

    Returns :class:`Inadmissible` exactly when some cell has no satisfying
    boundary pair inside the words. Ties between incomparable minimal pairs
    are resolved lexicographically and flagged on the result.
    """
    ctx = _Ctx(x, y, dominant)
    boundaries: list[tuple[int, int]] = []
    ties = False
    a = b = 0
    for i, u in enumerate(v, start=1):
        frontier = ctx.frontier(a, b, int(u))
        if not frontier:
            return Inadmissible(failed_cell=i)
        if len(frontier) > 1:
            ties = True
        a, b = frontier[0]
        boundaries.append((a, b))
    return _build_decomposition(ctx, tuple(int(u) for u in v), boundaries, ties)


def decode_best(x, y, v, dominant: int = 1) -> CellDecomposition | Inadmissible:
    """Best-scoring realization of a vector over all minimal-pair tie choices.

    The greedy construction with a fixed tie rule can strand a vector that a
    different tie choice realizes, so the vector's score is defined as the
    maximum over the minimal-pair branch tree.
    """
    ctx = _Ctx(x, y, dominant)
    vv = tuple(int(u) for u in v)
    memo: dict[tuple[int, int, int], tuple[int, tuple[tuple[int, int], ...]] | None] = {}
    saw_tie = False

    def rec(a: int, b: int, idx: int):
        key = (a, b, idx)
        if key in memo:
            return memo[key]
        if idx == len(vv):
            result = (ctx.trailing(a, b), ())
        else:
            nonlocal saw_tie
            frontier = ctx.frontier(a, b, vv[idx])
            if len(frontier) > 1:
                saw_tie = True
            result = None
            for s, t in frontier:
                sub = rec(s, t, idx + 1)
                if sub is None:
                    continue
                score = 1 + ctx.cell_count(a, s, b, t) + sub[0]
                if result is None or score > result[0]:
                    result = (score, ((s, t),) + sub[1])
        memo[key] = result
        return result

    best = rec(0, 0, 0)
    if best is None:
        # report the deepest cell the lex path reached, matching decode()
        lex = decode(x, y, vv, dominant)
        return lex if isinstance(lex, Inadmissible) else Inadmissible(failed_cell=1)
    return _build_decomposition(ctx, vv, list(best[1]), saw_tie)


@dataclass(frozen=True)
class EnumerationResult:
    """Admissible vectors with their best realization scores."""

    vectors: list[AlignmentVector]
    scores: list[int]
    complete: bool

    def max_score(self) -> int:
        return max(self.scores)

    def score_of(self, v: AlignmentVector) -> int:
        return self.scores[self.vectors.index(tuple(v))]


class _Budget:
    def __init__(self, limit: int):
        self.left = limit

    def spend(self, amount: int) -> bool:
        self.left -= amount
        return self.left >= 0


def enumerate_admissible(
    x, y, k_max: int | None = None, budget: int = 500_000, dominant: int = 1
) -> EnumerationResult:
    """All admissible vectors with at most ``k_max`` cells, plus their scores.

    Works by a budgeted depth-first construction over cell boundaries,
    memoizing the set of admissible suffixes per boundary and branching over
    every minimal satisfying pair. The empty vector (dominant letters only)
    is always included. ``complete=False`` signals budget exhaustion.
    """
    ctx = _Ctx(x, y, dominant)
    if k_max is None:
        k_max = min(len(ctx.nondom_x), ctx.ny)
    budget_state = _Budget(budget)
    memo: dict[tuple[int, int], dict[AlignmentVector, int]] = {}
    exhausted = False

    def rec(a: int, b: int) -> dict[AlignmentVector, int]:
        nonlocal exhausted
        key = (a, b)
        got = memo.get(key)
        if got is not None:
            return got
        entries: dict[AlignmentVector, int] = {(): ctx.trailing(a, b)}
        if not exhausted:
            u_lo = -(int(ctx.domy[ctx.ny]) - int(ctx.domy[b]))
            u_hi = int(ctx.domx[ctx.nx]) - int(ctx.domx[a])
            for u in range(u_lo, u_hi + 1):
                for s, t in ctx.frontier(a, b, u):
                    sub = rec(s, t)
                    head = 1 + ctx.cell_count(a, s, b, t)
                    for suffix, sc in sub.items():
                        if len(suffix) + 1 > k_max:
                            continue
                        vec = (u,) + suffix
                        val = head + sc
                        old = entries.get(vec)
                        if old is None or old < val:
                            entries[vec] = val
                    if exhausted:
                        break
                if exhausted:
                    break
        if not budget_state.spend(len(entries)):
            exhausted = True
        memo[key] = entries
        return entries

    top = rec(0, 0)
    vectors = sorted(top, key=lambda vec: (len(vec), vec))
    return EnumerationResult(
        vectors=vectors,
        scores=[top[vec] for vec in vectors],
        complete=not exhausted,
    )


def cells_from_pairs(x, y, pairs, dominant: int = 1) -> CellDecomposition:
    """Cell decomposition read off a matched alignment's non-dominant pairs."""
    ctx = _Ctx(x, y, dominant)
    boundaries = [
        (int(i), int(j)) for i, j in pairs if int(ctx.xa[int(i) - 1]) != dominant
    ]
    v = []
    pa = pb = 0
    for s, t in boundaries:
        v.append(int(ctx.domx[s] - ctx.domx[pa]) - int(ctx.domy[t] - ctx.domy[pb]))
        pa, pb = s, t
    return _build_decomposition(ctx, tuple(v), boundaries, ties=False)


def encode_optimal(x, y, dominant: int = 1) -> AlignmentVector:
    """Vector encoding of the canonical optimal alignment of a pair."""
    alignment = lcs_backtrack(x, y)
    return cells_from_pairs(x, y, alignment.pairs, dominant).v


@dataclass(frozen=True)
class WeakSideStats:
    """Non-dominant letter counts on the strands with fewer dominant letters."""

    n_v_minus: int
    n_gt1: int
    per_cell: tuple[int, ...]


def count_nondominant(word, dominant: int = 1) -> int:
    arr = letters_of(word)
    return int((arr != dominant).sum())


def weak_side(x, y, d: CellDecomposition) -> WeakSideStats:
    """Weak-side counts per cell: letters available for a favorable swap.

    For a cell with a negative difference the x-strand holds fewer dominant
    letters; its interior non-dominant letters (the closing matched letter
    excluded) are counted. Balanced cells contribute zero.
    """
    xa, ya = letters_of(x), letters_of(y)
    dom = d.dominant
    per_cell = []
    for i in range(1, d.k + 1):
        vi = d.v[i - 1]
        if vi < 0:
            seg = xa[d.pi[i - 1] : d.pi[i] - 1]
        elif vi > 0:
            seg = ya[d.nu[i - 1] : d.nu[i] - 1]
        else:
            per_cell.append(0)
            continue
        per_cell.append(int((seg != dom).sum()))
    n_gt1 = count_nondominant(xa, dom) + count_nondominant(ya, dom)
    return WeakSideStats(
        n_v_minus=int(sum(per_cell)), n_gt1=n_gt1, per_cell=tuple(per_cell)
    )


def _split_points(ctx: _Ctx, d: CellDecomposition, i: int) -> list[tuple[int, int, int]]:
    """Interior matched pairs splitting 0-cell i with a one-dominant imbalance."""
    a, s = d.pi[i - 1], d.pi[i]
    b, t = d.nu[i - 1], d.nu[i]
    out = []
    for j in range(a + 1, s):
        cj = int(ctx.xa[j - 1])
        if cj == ctx.dominant:
            continue
        dx = int(ctx.domx[j - 1] - ctx.domx[a])
        for jp in range(b + 1, t):
            if int(ctx.ya[jp - 1]) != cj:
                continue
            delta = dx - int(ctx.domy[jp - 1] - ctx.domy[b])
            if delta in (1, -1):
                out.append((j, jp, delta))
    return out


def is_breakable(x, y, d: CellDecomposition, i: int) -> bool:
    """Whether balanced cell ``i`` splits at an interior non-dominant match."""
    if not 1 <= i <= d.k:
        raise IndexError(f"cell index {i} out of range 1..{d.k}")
    if d.v[i - 1] != 0:
        raise ValueError(f"cell {i} is not a 0-cell (difference {d.v[i - 1]})")
    ctx = _Ctx(x, y, d.dominant)
    return bool(_split_points(ctx, d, i))


class NotBreakable(ValueError):
    pass


def break_cell(x, y, v, i: int, dominant: int = 1) -> AlignmentVector:
    """Split breakable 0-cell ``i`` of ``v`` into a (+1, -1) or (-1, +1) pair.

    Uses the leftmost qualifying interior match. The score of the resulting
    vector equals the score of the input and the length grows by exactly one.
    """
    d = decode(x, y, v, dominant)
    if isinstance(d, Inadmissible):
        raise ValueError("cannot break a cell of an inadmissible vector")
    if not 1 <= i <= d.k:
        raise IndexError(f"cell index {i} out of range 1..{d.k}")
    if d.v[i - 1] != 0:
        raise ValueError(f"cell {i} is not a 0-cell (difference {d.v[i - 1]})")
    ctx = _Ctx(x, y, dominant)
    points = _split_points(ctx, d, i)
    if not points:
        raise NotBreakable(f"cell {i} has no qualifying interior match")
    _, _, delta = min(points)
    return d.v[: i - 1] + (delta, -delta) + d.v[i:]


def _break_decomposition(
    ctx: _Ctx, d: CellDecomposition, i: int
) -> CellDecomposition | None:
    points = _split_points(ctx, d, i)
    if not points:
        return None
    j, jp, delta = min(points)
    boundaries = list(zip(d.pi[1:], d.nu[1:]))
    boundaries.insert(i - 1, (j, jp))
    v = d.v[: i - 1] + (delta, -delta) + d.v[i:]
    return _build_decomposition(ctx, v, boundaries, d.ties)


@dataclass(frozen=True)
class InBnResult:
    """Outcome of the favorable-swap membership search.

    ``status`` is ``found``, ``exhausted-negative`` (complete search, no
    witness) or ``heuristic-negative`` (budgeted search only: unknown).
    """

    member: bool
    exhaustive: bool
    status: str
    witness: AlignmentVector | None = None
    witness_cells: CellDecomposition | None = None
    n_gt1: int = 0
    checked: int = 0

    def __bool__(self) -> bool:
        return self.member


def _bn_condition(stats: WeakSideStats, k: int, K: float, m: int) -> bool:
    return (
        stats.n_v_minus >= K * stats.n_gt1 / m
        and 2 * k <= K * stats.n_gt1 / (2 * m)
    )


def in_B_n(
    x,
    y,
    K: float,
    m: int,
    search_budget: int = 20_000,
    dominant: int = 1,
) -> InBnResult:
    """Search for an optimal alignment with enough weak-side letters.

    Membership requires some optimal alignment vector v with weak-side count
    at least K*n_gt1/m while 2|v| stays below K*n_gt1/(2m). Exhaustive mode
    enumerates every optimal alignment (deduplicated by cell structure);
    when the enumeration exceeds the budget the search falls back to breaking
    balanced cells of the canonical optimal alignment, and a negative answer
    is then only heuristic.
    """
    ctx = _Ctx(x, y, dominant)
    n_gt1 = count_nondominant(ctx.xa, dominant) + count_nondominant(ctx.ya, dominant)
    if n_gt1 == 0:
        empty = _build_decomposition(ctx, (), [], ties=False)
        return InBnResult(
            member=True, exhaustive=True, status="found",
            witness=(), witness_cells=empty, n_gt1=0, checked=1,
        )

    def check(d: CellDecomposition) -> bool:
        return _bn_condition(weak_side(x, y, d), d.k, K, m)

    try:
        alignments = enumerate_optimal_alignments(x, y, cap=search_budget)
    except CapExceeded:
        alignments = None

    if alignments is not None:
        seen: set[tuple[tuple[int, ...], tuple[int, ...]]] = set()
        checked = 0
        for al in alignments:
            d = cells_from_pairs(x, y, al.pairs, dominant)
            sig = (d.pi, d.nu)
            if sig in seen:
                continue
            seen.add(sig)
            checked += 1
            if check(d):
                return InBnResult(
                    member=True, exhaustive=True, status="found",
                    witness=d.v, witness_cells=d, n_gt1=n_gt1, checked=checked,
                )
        return InBnResult(
            member=False, exhaustive=True, status="exhausted-negative",
            n_gt1=n_gt1, checked=checked,
        )

    # heuristic: break balanced cells of the canonical optimum while the
    # cell-count cap allows, recording the largest weak side reached
    d = cells_from_pairs(x, y, lcs_backtrack(x, y).pairs, dominant)
    checked = 1
    if check(d):
        return InBnResult(
            member=True, exhaustive=False, status="found",
            witness=d.v, witness_cells=d, n_gt1=n_gt1, checked=checked,
        )
    cap_cells = K * n_gt1 / (4.0 * m)  # 2|v| <= K n/2m
    steps = 0
    while steps < search_budget and d.k + 1 <= cap_cells:
        progressed = False
        for i in range(1, d.k + 1):
            if d.v[i - 1] != 0:
                continue
            nd = _break_decomposition(ctx, d, i)
            if nd is None:
                continue
            d = nd
            steps += 1
            checked += 1
            progressed = True
            if check(d):
                return InBnResult(
                    member=True, exhaustive=False, status="found",
                    witness=d.v, witness_cells=d, n_gt1=n_gt1, checked=checked,
                )
            break
        if not progressed:
            break
    return InBnResult(
        member=False, exhaustive=False, status="heuristic-negative",
        n_gt1=n_gt1, checked=checked,
    )
