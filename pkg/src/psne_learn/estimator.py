"""Exact maximum likelihood over candidate PSNE sets.

The per-observation loss depends on a game only through its PSNE set, so
the estimator searches equivalence classes directly: a candidate family is
a deduplicated collection of PSNE sets, and fitting scans the family for
the minimum average scaled NLL with q optimized in closed form.

Families come from three sources: exhaustive enumeration of grid-quantized
polymatrix games under a parent budget (the realizable sets, whose count is
the empirical hypothesis-class size), all subsets up to a size cap, or an
explicit list.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import Iterable, Iterator, Sequence

import numpy as np

from .errors import CapacityError, InputError
from .games import ActionSpace, PolymatrixGame, PsneSet, enumerate_psne
from .mixture import Dataset, MixtureModel, nll_scale

DEFAULT_GRID = (-1.0, 0.0, 1.0)
DEFAULT_GAME_CEILING = 10_000_000
DEFAULT_FAMILY_JOINT_CEILING = 2**16
# the infimum at the open lower endpoint of the q interval is not attained;
# clamp this far above it so the estimator stays total
LOWER_CLAMP_OFFSET = 1e-9


class CandidateFamily:
    """Deduplicated PSNE sets over one action space, in canonical order."""

    __slots__ = ("space", "candidates", "provenance", "_members", "_sizes")

    def __init__(
        self,
        space: ActionSpace,
        candidates: Sequence[PsneSet],
        provenance: str,
    ):
        size = space.joint_size
        seen = {}
        for cand in candidates:
            if not 1 <= len(cand) <= size - 1:
                raise InputError(
                    f"candidate of size {len(cand)} outside 1..{size - 1}"
                )
            if cand.indices[-1] >= size:
                raise InputError("candidate contains out-of-range indices")
            seen[cand.indices] = cand
        ordered = sorted(seen.values(), key=lambda c: (len(c), c.indices))
        self.space = space
        self.candidates = tuple(ordered)
        self.provenance = provenance
        self._members = None
        self._sizes = None

    def __len__(self) -> int:
        return len(self.candidates)

    def __iter__(self):
        return iter(self.candidates)

    def __contains__(self, psne: PsneSet) -> bool:
        return any(c == psne for c in self.candidates)

    def member_matrix(self) -> np.ndarray:
        """Boolean membership matrix, one row per candidate."""
        if self._members is None:
            mat = np.zeros((len(self.candidates), self.space.joint_size), dtype=bool)
            for row, cand in enumerate(self.candidates):
                mat[row, list(cand.indices)] = True
            mat.flags.writeable = False
            self._members = mat
        return self._members

    def sizes(self) -> np.ndarray:
        if self._sizes is None:
            arr = np.asarray([len(c) for c in self.candidates], dtype=np.int64)
            arr.flags.writeable = False
            self._sizes = arr
        return self._sizes


@dataclass(frozen=True)
class FitResult:
    """Winning PSNE set, its fitted q, the objective value, and whether q
    was pushed back inside the admissible interval."""

    psne: PsneSet
    q_hat: float
    objective: float
    clamped: bool


def _normalize_grid(grid) -> tuple[float, ...]:
    vals = tuple(sorted({float(v) for v in grid}))
    if not vals:
        raise InputError("grid must contain at least one value")
    if any(not math.isfinite(v) for v in vals):
        raise InputError("grid values must be finite")
    return vals


def _check_class_params(n: int, k: int, action_sizes) -> tuple[int, ...]:
    if n < 2:
        raise InputError(f"need at least 2 players, got n={n}")
    if not 0 <= k <= n - 1:
        raise InputError(f"parent budget k={k} outside 0..{n - 1}")
    sizes = tuple(int(s) for s in action_sizes)
    if len(sizes) != n:
        raise InputError(f"expected {n} action sizes, got {len(sizes)}")
    return sizes


def _player_structure_count(n, k, sizes, grid, i) -> int:
    g = len(grid)
    si = sizes[i - 1]
    others = [j for j in range(1, n + 1) if j != i]
    per_player = 0
    for psize in range(0, k + 1):
        for parents in itertools.combinations(others, psize):
            combos = g ** (si - 1)
            for j in parents:
                combos *= g ** ((si - 1) * sizes[j - 1]) - 1
            per_player += combos
    return per_player


def count_grid_games(n: int, k: int, action_sizes, grid=DEFAULT_GRID) -> int:
    """Closed-form size of the normalized grid-game stream.

    Per player: every parent set of size <= k, every unary assignment with
    u_ii(1) = 0, and every pairwise table with a zero first row that is not
    identically zero (an all-zero table would duplicate the same game under
    a smaller parent set).
    """
    sizes = _check_class_params(n, k, action_sizes)
    grid = _normalize_grid(grid)
    total = 1
    for i in range(1, n + 1):
        total *= _player_structure_count(n, k, sizes, grid, i)
    return total


def _player_structures(n, k, sizes, grid, i):
    """Yield (parents, unary, {parent: table}) for one player, normalized."""
    si = sizes[i - 1]
    others = [j for j in range(1, n + 1) if j != i]
    unary_choices = []
    for vals in itertools.product(grid, repeat=si - 1):
        u = np.zeros(si)
        u[1:] = vals
        u.flags.writeable = False
        unary_choices.append(u)
    for psize in range(0, k + 1):
        for parents in itertools.combinations(others, psize):
            table_choices = []
            for j in parents:
                sj = sizes[j - 1]
                tables = []
                for vals in itertools.product(grid, repeat=(si - 1) * sj):
                    if all(v == 0.0 for v in vals):
                        continue
                    t = np.zeros((si, sj))
                    t[1:, :] = np.asarray(vals).reshape(si - 1, sj)
                    t.flags.writeable = False
                    tables.append(t)
                table_choices.append(tables)
            for u in unary_choices:
                for combo in itertools.product(*table_choices):
                    yield parents, u, dict(zip(parents, combo))


def enumerate_grid_games(
    n: int,
    k: int,
    action_sizes,
    grid=DEFAULT_GRID,
    *,
    ceiling: int = DEFAULT_GAME_CEILING,
) -> Iterator[PolymatrixGame]:
    """Stream every normalized grid game with at most k parents per player.

    Potentials are canonically normalized (u_ii(1) = 0, zero first pairwise
    row), which does not change any best-response set.  Raises CapacityError
    with the closed-form count when the stream would exceed `ceiling`.
    """
    sizes = _check_class_params(n, k, action_sizes)
    grid = _normalize_grid(grid)
    total = count_grid_games(n, k, sizes, grid)
    if total > ceiling:
        raise CapacityError(
            f"grid-game stream would contain {total} games, ceiling is {ceiling}"
        )
    per_player = [
        list(_player_structures(n, k, sizes, grid, i)) for i in range(1, n + 1)
    ]
    for combo in itertools.product(*per_player):
        neighbors = {i: parents for i, (parents, _, _) in enumerate(combo, start=1)}
        unary = {i: u for i, (_, u, _) in enumerate(combo, start=1)}
        pairwise = {
            (i, j): table
            for i, (_, _, tabs) in enumerate(combo, start=1)
            for j, table in tabs.items()
        }
        yield PolymatrixGame(sizes, neighbors=neighbors, unary=unary, pairwise=pairwise)


def _player_regions(n, k, sizes, grid, i, space: ActionSpace) -> np.ndarray:
    """Distinct acceptance regions for one player, as packed bit rows.

    A region is the set of joint actions where player i's action is a best
    response, for one choice of parents and potentials.  Regions dedupe
    heavily: distinct potentials often induce the same best-response
    pattern.
    """
    size = space.joint_size
    all_idx = np.arange(size, dtype=np.int64)
    digits = {j: space.digit(all_idx, j) for j in range(1, n + 1)}
    rows = set()
    for parents, u, tables in _player_structures(n, k, sizes, grid, i):
        m = math.prod(sizes[j - 1] for j in parents)
        payoff = np.tile(u[:, None], (1, m))
        stride = m
        cfg = np.zeros(size, dtype=np.int64)
        for j in parents:
            sj = sizes[j - 1]
            stride //= sj
            payoff += tables[j][:, (np.arange(m) // stride) % sj]
            cfg += digits[j] * stride
        br = payoff == payoff.max(axis=0, keepdims=True)
        allowed = br[digits[i], cfg]
        rows.add(np.packbits(allowed).tobytes())
    packed = np.frombuffer(b"".join(sorted(rows)), dtype=np.uint8)
    return packed.reshape(len(rows), -1)


def _intersect_all(partials: np.ndarray, regions: np.ndarray, limit: int) -> np.ndarray:
    """All pairwise AND combinations of two packed-row sets, deduplicated."""
    pieces = []
    pending = 0
    out = None
    for start in range(0, partials.shape[0], 2048):
        block = partials[start : start + 2048]
        prod = block[:, None, :] & regions[None, :, :]
        pieces.append(prod.reshape(-1, partials.shape[1]))
        pending += pieces[-1].shape[0]
        if pending >= 4_000_000:
            merged = np.concatenate(pieces if out is None else [out, *pieces])
            out = np.unique(merged, axis=0)
            pieces, pending = [], 0
            if out.shape[0] > limit:
                raise CapacityError(
                    f"intermediate PSNE-set count exceeded {limit}"
                )
    merged = np.concatenate(pieces if out is None else [out, *pieces])
    return np.unique(merged, axis=0)


def enumerate_psne_sets(
    n: int,
    k: int,
    action_sizes,
    grid=DEFAULT_GRID,
    *,
    method: str = "regions",
    joint_ceiling: int = DEFAULT_FAMILY_JOINT_CEILING,
    game_ceiling: int = DEFAULT_GAME_CEILING,
) -> CandidateFamily:
    """Every PSNE set realizable by a grid game under the parent budget.

    The family size is the empirical hypothesis-class count for this grid.
    The default "regions" method enumerates per-player best-response
    regions and intersects them across players (the class is a product over
    players, so this reaches exactly the same sets as mapping the game
    stream through the PSNE enumerator, which remains available as
    method="games").
    """
    sizes = _check_class_params(n, k, action_sizes)
    grid = _normalize_grid(grid)
    space = ActionSpace(sizes)
    if space.joint_size > joint_ceiling:
        raise CapacityError(
            f"joint space has {space.joint_size} actions, "
            f"family ceiling is {joint_ceiling}"
        )
    label = (
        f"grid-games(n={n}, k={k}, actions={','.join(map(str, sizes))}, "
        f"grid={','.join(repr(v) for v in grid)})"
    )
    if method == "games":
        found = {}
        for game in enumerate_grid_games(n, k, sizes, grid, ceiling=game_ceiling):
            psne = enumerate_psne(game)
            if 1 <= len(psne) <= space.joint_size - 1:
                found[psne.indices] = psne
        return CandidateFamily(space, list(found.values()), label)
    if method != "regions":
        raise InputError(f"unknown enumeration method {method!r}")

    per_player_structures = sum(
        _player_structure_count(n, k, sizes, grid, i) for i in range(1, n + 1)
    )
    if per_player_structures > game_ceiling:
        raise CapacityError(
            f"region enumeration needs {per_player_structures} per-player grid "
            f"assignments, ceiling is {game_ceiling}"
        )
    nbytes = (space.joint_size + 7) // 8
    full = np.full((1, nbytes), 255, dtype=np.uint8)
    # mask off the bits past joint_size so packed rows compare cleanly
    tail = space.joint_size % 8
    if tail:
        full[0, -1] = np.packbits(np.ones(tail, dtype=bool))[0]
    partial = full
    limit = 4_000_000
    for i in range(1, n + 1):
        regions = _player_regions(n, k, sizes, grid, i, space)
        partial = _intersect_all(partial, regions, limit)
    candidates = []
    for row in partial:
        members = np.unpackbits(row, count=space.joint_size).astype(bool)
        count = int(members.sum())
        if 1 <= count <= space.joint_size - 1:
            candidates.append(PsneSet(np.flatnonzero(members)))
    return CandidateFamily(space, candidates, label)


def all_subsets_family(
    action_sizes, max_size: int, *, ceiling: int = 2_000_000
) -> CandidateFamily:
    """All PSNE sets up to a size cap, independent of realizability."""
    space = ActionSpace(tuple(action_sizes))
    size = space.joint_size
    max_size = min(int(max_size), size - 1)
    if max_size < 1:
        raise InputError("max_size must be at least 1")
    total = sum(math.comb(size, s) for s in range(1, max_size + 1))
    if total > ceiling:
        raise CapacityError(f"family would contain {total} sets, ceiling {ceiling}")
    candidates = [
        PsneSet(combo)
        for s in range(1, max_size + 1)
        for combo in itertools.combinations(range(size), s)
    ]
    return CandidateFamily(space, candidates, f"all-subsets(max_size={max_size})")


def explicit_family(action_sizes, sets: Iterable[Iterable[int]]) -> CandidateFamily:
    space = ActionSpace(tuple(action_sizes))
    return CandidateFamily(space, [PsneSet(s) for s in sets], "explicit list")


def _clamp_q(q_unconstrained, sizes, joint_size):
    """Push the unconstrained optimizer into the admissible interval."""
    lower = sizes / joint_size + LOWER_CLAMP_OFFSET
    upper = 1.0 - 1.0 / (2.0 * joint_size)
    q = np.clip(q_unconstrained, lower, upper)
    return q, q != q_unconstrained


def optimal_q(psne: PsneSet, data: Dataset) -> tuple[float, bool]:
    """Closed-form q for a fixed PSNE set: the in-set sample fraction,
    clamped to the admissible interval (the average NLL is convex in q with
    unconstrained minimizer s/m)."""
    if data.m == 0:
        raise InputError("cannot fit q on an empty dataset")
    s = int(np.isin(data.indices, psne.as_array()).sum())
    q, clamped = _clamp_q(s / data.m, float(len(psne)), float(data.space.joint_size))
    return float(q), bool(clamped)


def _select(family: CandidateFamily, objective, q, clamped) -> FitResult:
    """Argmin with deterministic ties: smaller set first, then index order."""
    best = float(np.min(objective))
    ties = np.flatnonzero(objective == best)
    winner = min(
        ties, key=lambda t: (len(family.candidates[t]), family.candidates[t].indices)
    )
    return FitResult(
        psne=family.candidates[winner],
        q_hat=float(q[winner]),
        objective=best,
        clamped=bool(clamped[winner]),
    )


def fit_mle(family: CandidateFamily, data: Dataset) -> FitResult:
    """Empirical MLE over the family.

    The dataset enters only through per-candidate in-set counts, taken from
    a histogram of joint indices, so the scan is a single matrix product.
    """
    if len(family) == 0:
        raise InputError("cannot fit over an empty candidate family")
    if data.m == 0:
        raise InputError("cannot fit on an empty dataset")
    if data.space.counts != family.space.counts:
        raise InputError("dataset and family action spaces differ")
    size = family.space.joint_size
    hist = np.bincount(data.indices, minlength=size)
    # integer matmul keeps the sufficient statistic exact and independent
    # of any threaded summation order
    counts = (family.member_matrix().astype(np.int64) @ hist).astype(float)
    sizes = family.sizes().astype(float)
    m = float(data.m)
    q, clamped = _clamp_q(counts / m, sizes, float(size))
    scale = nll_scale(family.space)
    nll_in = (np.log(sizes) - np.log(q)) / scale
    nll_out = (np.log(size - sizes) - np.log1p(-q)) / scale
    objective = (counts * nll_in + (m - counts) * nll_out) / m
    return _select(family, objective, q, clamped)


def population_mle(family: CandidateFamily, truth: MixtureModel) -> FitResult:
    """Expected MLE over the family under a known generating model.

    The probability mass the truth puts on each candidate set plays the
    role of the in-set sample fraction; when the family contains the true
    set, that candidate at q equal to the true parameter is the unique
    minimizer.
    """
    if len(family) == 0:
        raise InputError("cannot fit over an empty candidate family")
    if truth.space.counts != family.space.counts:
        raise InputError("truth model and family action spaces differ")
    size = family.space.joint_size
    truth_indicator = np.zeros(size, dtype=np.int64)
    truth_indicator[list(truth.psne.indices)] = 1
    overlap = (family.member_matrix().astype(np.int64) @ truth_indicator).astype(float)
    sizes = family.sizes().astype(float)
    r_true = float(len(truth.psne))
    mass = truth.q * (overlap / r_true) + (1.0 - truth.q) * (
        (sizes - overlap) / (size - r_true)
    )
    q, clamped = _clamp_q(mass, sizes, float(size))
    scale = nll_scale(family.space)
    nll_in = (np.log(sizes) - np.log(q)) / scale
    nll_out = (np.log(size - sizes) - np.log1p(-q)) / scale
    objective = mass * nll_in + (1.0 - mass) * nll_out
    return _select(family, objective, q, clamped)
