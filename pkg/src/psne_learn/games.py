"""Polymatrix games over finite discrete action sets.

A game has n players, player i choosing from actions 1..|A_i|.  Player i's
payoff is a unary potential on their own action plus one pairwise potential
per parent j in their neighbor set:

    u_i(x) = u_ii(x_i) + sum_{j in N(i)} u_ij(x_i, x_j)

A joint action is a pure-strategy Nash equilibrium (PSNE) when every
player's action attains the maximum payoff against the others; ties count,
so the comparison is >= throughout.  Potentials are expected to be
integer-valued (or otherwise exactly representable) so that equilibrium
checks involve no floating-point tolerance.

Players and actions are 1-based in the public API.  Joint actions are
tuples of per-player actions, or equivalently mixed-radix indices in
0..|A|-1 with player 1 most significant.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

import numpy as np

from .errors import CapacityError, InputError

DEFAULT_JOINT_CEILING = 2**24


@dataclass(frozen=True)
class ActionSpace:
    """Per-player action-set sizes and the induced joint index arithmetic."""

    counts: tuple[int, ...]
    strides: tuple[int, ...] = field(init=False, repr=False, compare=False)
    joint_size: int = field(init=False, compare=False)

    def __post_init__(self) -> None:
        counts = tuple(int(c) for c in self.counts)
        if len(counts) == 0:
            raise InputError("action space needs at least one player")
        if any(c < 2 for c in counts):
            raise InputError(f"every action count must be >= 2, got {counts}")
        object.__setattr__(self, "counts", counts)
        strides = [1] * len(counts)
        for p in range(len(counts) - 2, -1, -1):
            strides[p] = strides[p + 1] * counts[p + 1]
        object.__setattr__(self, "strides", tuple(strides))
        object.__setattr__(self, "joint_size", strides[0] * counts[0])

    @property
    def n(self) -> int:
        return len(self.counts)

    def size(self, player: int) -> int:
        self._check_player(player)
        return self.counts[player - 1]

    def digit(self, index, player: int):
        """Extract player's 0-based action digit from joint indices.

        Accepts a scalar or an integer ndarray; returns the same shape.
        """
        self._check_player(player)
        p = player - 1
        return (index // self.strides[p]) % self.counts[p]

    def _check_player(self, player: int) -> None:
        if not 1 <= player <= self.n:
            raise InputError(f"player {player} out of range 1..{self.n}")


def encode_joint_action(space: ActionSpace, actions: Sequence[int]) -> int:
    """Mixed-radix index of a joint action, player 1 most significant."""
    actions = tuple(int(a) for a in actions)
    if len(actions) != space.n:
        raise InputError(f"expected {space.n} actions, got {len(actions)}")
    index = 0
    for p, (a, s) in enumerate(zip(actions, space.counts)):
        if not 1 <= a <= s:
            raise InputError(f"action {a} for player {p + 1} outside 1..{s}")
        index += (a - 1) * space.strides[p]
    return index


def decode_joint_action(space: ActionSpace, index: int) -> tuple[int, ...]:
    index = int(index)
    if not 0 <= index < space.joint_size:
        raise InputError(f"index {index} outside 0..{space.joint_size - 1}")
    return tuple(
        (index // space.strides[p]) % space.counts[p] + 1 for p in range(space.n)
    )


class PsneSet:
    """A set of joint-action indices: sorted sequence plus O(1) membership."""

    __slots__ = ("indices", "_members", "_array")

    def __init__(self, indices: Iterable[int]):
        idx = tuple(sorted({int(i) for i in indices}))
        if any(i < 0 for i in idx):
            raise InputError("joint-action indices must be nonnegative")
        self.indices = idx
        self._members = frozenset(idx)
        self._array = None

    @property
    def members(self) -> frozenset[int]:
        return self._members

    def as_array(self) -> np.ndarray:
        if self._array is None:
            arr = np.asarray(self.indices, dtype=np.int64)
            arr.flags.writeable = False
            self._array = arr
        return self._array

    def __contains__(self, index) -> bool:
        return int(index) in self._members

    def __len__(self) -> int:
        return len(self.indices)

    def __iter__(self):
        return iter(self.indices)

    def __eq__(self, other) -> bool:
        return isinstance(other, PsneSet) and self.indices == other.indices

    def __hash__(self) -> int:
        return hash(self.indices)

    def __repr__(self) -> str:
        return f"PsneSet({list(self.indices)})"


def _as_readonly(values, shape) -> np.ndarray:
    arr = np.array(values, dtype=float).reshape(shape)
    if not np.all(np.isfinite(arr)):
        raise InputError("potentials must be finite")
    arr.flags.writeable = False
    return arr


class PolymatrixGame:
    """Neighbor structure plus unary and pairwise potential tables.

    Parameters
    ----------
    action_sizes : per-player action counts (each >= 2).
    neighbors : mapping player -> iterable of parent players; players
        absent from the mapping have no parents.
    unary : mapping player -> length-|A_i| sequence; absent players get
        zeros.
    pairwise : mapping (i, j) -> |A_i| x |A_j| table, with a key allowed
        exactly when j is a parent of i; missing edges get zero tables.
    """

    __slots__ = ("space", "_neighbors", "_unary", "_pairwise")

    def __init__(
        self,
        action_sizes: Sequence[int],
        neighbors: Mapping[int, Iterable[int]] | None = None,
        unary: Mapping[int, Sequence[float]] | None = None,
        pairwise: Mapping[tuple[int, int], Sequence[Sequence[float]]] | None = None,
    ):
        self.space = ActionSpace(tuple(action_sizes))
        n = self.space.n
        neighbors = dict(neighbors or {})
        unary = dict(unary or {})
        pairwise = dict(pairwise or {})

        nbr: list[tuple[int, ...]] = []
        for i in range(1, n + 1):
            parents = tuple(sorted({int(j) for j in neighbors.pop(i, ())}))
            for j in parents:
                if not 1 <= j <= n:
                    raise InputError(f"neighbor {j} of player {i} out of range")
            if i in parents:
                raise InputError(f"player {i} cannot be its own parent")
            nbr.append(parents)
        if neighbors:
            raise InputError(f"neighbor keys out of range: {sorted(neighbors)}")
        self._neighbors = tuple(nbr)

        tables: list[np.ndarray] = []
        for i in range(1, n + 1):
            vals = unary.pop(i, None)
            s = self.space.counts[i - 1]
            if vals is None:
                vals = np.zeros(s)
            elif len(vals) != s:
                raise InputError(f"unary table for player {i} must have {s} entries")
            tables.append(_as_readonly(vals, (s,)))
        if unary:
            raise InputError(f"unary keys out of range: {sorted(unary)}")
        self._unary = tuple(tables)

        pw: dict[tuple[int, int], np.ndarray] = {}
        for i in range(1, n + 1):
            si = self.space.counts[i - 1]
            for j in self._neighbors[i - 1]:
                sj = self.space.counts[j - 1]
                vals = pairwise.pop((i, j), None)
                if vals is None:
                    vals = np.zeros((si, sj))
                pw[(i, j)] = _as_readonly(vals, (si, sj))
        if pairwise:
            raise InputError(
                f"pairwise keys without a matching edge: {sorted(pairwise)}"
            )
        self._pairwise = pw

    @property
    def n(self) -> int:
        return self.space.n

    def neighbors(self, i: int) -> tuple[int, ...]:
        self.space._check_player(i)
        return self._neighbors[i - 1]

    def unary_table(self, i: int) -> np.ndarray:
        self.space._check_player(i)
        return self._unary[i - 1]

    def pairwise_table(self, i: int, j: int) -> np.ndarray:
        if (i, j) not in self._pairwise:
            raise InputError(f"no edge ({i}, {j}) in the game")
        return self._pairwise[(i, j)]

    def __eq__(self, other) -> bool:
        if not isinstance(other, PolymatrixGame):
            return NotImplemented
        return (
            self.space == other.space
            and self._neighbors == other._neighbors
            and all(np.array_equal(a, b) for a, b in zip(self._unary, other._unary))
            and self._pairwise.keys() == other._pairwise.keys()
            and all(
                np.array_equal(t, other._pairwise[e])
                for e, t in self._pairwise.items()
            )
        )

    __hash__ = None

    def _check_joint(self, x: Sequence[int]) -> tuple[int, ...]:
        x = tuple(int(a) for a in x)
        if len(x) != self.n:
            raise InputError(f"expected {self.n} actions, got {len(x)}")
        for p, (a, s) in enumerate(zip(x, self.space.counts)):
            if not 1 <= a <= s:
                raise InputError(f"action {a} for player {p + 1} outside 1..{s}")
        return x

    def local_payoffs(self, i: int, x: Sequence[int]) -> np.ndarray:
        """Payoff of every candidate action a for player i against x."""
        self.space._check_player(i)
        x = self._check_joint(x)
        vals = self._unary[i - 1].copy()
        for j in self._neighbors[i - 1]:
            vals += self._pairwise[(i, j)][:, x[j - 1] - 1]
        return vals

    def payoff(self, i: int, x: Sequence[int]) -> float:
        """u_i(x): unary potential plus one pairwise term per parent."""
        return float(self.local_payoffs(i, x)[x[i - 1] - 1])

    def best_responses(self, i: int, x: Sequence[int]) -> frozenset[int]:
        """All payoff-maximizing actions for player i against x (ties kept)."""
        vals = self.local_payoffs(i, x)
        best = vals.max()
        return frozenset(int(a) + 1 for a in np.flatnonzero(vals == best))

    def is_psne(self, x: Sequence[int]) -> bool:
        x = self._check_joint(x)
        return all(
            x[i - 1] in self.best_responses(i, x) for i in range(1, self.n + 1)
        )


def _best_response_grid(game: PolymatrixGame, i: int):
    """Boolean table br[a, cfg] over the parent-configuration grid.

    cfg enumerates the parents of i in ascending player order, first parent
    most significant.  Returns (br, parent players, cfg strides).
    """
    space = game.space
    parents = game.neighbors(i)
    sizes = [space.counts[j - 1] for j in parents]
    m = math.prod(sizes)
    payoff = np.tile(game.unary_table(i)[:, None], (1, m)).astype(float)
    stride = m
    cstrides = []
    for j, sj in zip(parents, sizes):
        stride //= sj
        cstrides.append(stride)
        digit = (np.arange(m) // stride) % sj
        payoff += game.pairwise_table(i, j)[:, digit]
    br = payoff == payoff.max(axis=0, keepdims=True)
    return br, parents, cstrides


def enumerate_psne(
    game: PolymatrixGame,
    *,
    ceiling: int = DEFAULT_JOINT_CEILING,
    chunk: int = 1 << 20,
) -> PsneSet:
    """Exact PSNE set of a game, by sweep over the full joint space.

    The sweep factors through per-player best-response tables over parent
    configurations, then checks every joint index in fixed-size chunks, so
    peak memory stays bounded regardless of the joint-space size (which
    must not exceed `ceiling`).
    """
    space = game.space
    if space.joint_size > ceiling:
        raise CapacityError(
            f"joint space has {space.joint_size} actions, ceiling is {ceiling}"
        )
    grids = [_best_response_grid(game, i) for i in range(1, game.n + 1)]
    found: list[np.ndarray] = []
    for start in range(0, space.joint_size, chunk):
        idx = np.arange(start, min(start + chunk, space.joint_size), dtype=np.int64)
        ok = np.ones(idx.shape, dtype=bool)
        for i, (br, parents, cstrides) in enumerate(grids, start=1):
            xi = space.digit(idx, i)
            cfg = np.zeros(idx.shape, dtype=np.int64)
            for j, cs in zip(parents, cstrides):
                cfg += space.digit(idx, j) * cs
            ok &= br[xi, cfg]
        found.append(idx[ok])
    return PsneSet(np.concatenate(found) if found else ())


class LinearPsneForm:
    """Equilibrium test as a conjunction of linear inequalities.

    For each player i and action a there is a coefficient vector phi(i, a)
    and a 0/1-valued feature vector y(i, x) of dimension
    (1 + |A_i|) * (1 + sum_{j != i} |A_j|), arranged so that

        phi(i, a) . y(i, x) = u_i(x_i, x_N(i)) - u_i(a, x_N(i)).

    A joint action is a PSNE exactly when all sum_i |A_i| dot products are
    nonnegative.  Must agree with PolymatrixGame.is_psne on every input.
    """

    __slots__ = ("space", "_phi")

    def __init__(self, space: ActionSpace, phi: Sequence[np.ndarray]):
        self.space = space
        self._phi = tuple(phi)

    @classmethod
    def from_game(cls, game: PolymatrixGame) -> "LinearPsneForm":
        space = game.space
        n = space.n
        phis = []
        for i in range(1, n + 1):
            si = space.counts[i - 1]
            others = [j for j in range(1, n + 1) if j != i]
            dim = (1 + si) * (1 + sum(space.counts[j - 1] for j in others))
            phi = np.zeros((si, dim))
            nbrs = set(game.neighbors(i))
            # shared prefix: the full potential vector, identical per row
            theta = np.zeros(dim)
            off = 0
            theta[off : off + si] = game.unary_table(i)
            off += si
            pair_off: dict[int, int] = {}
            for j in others:
                sj = space.counts[j - 1]
                pair_off[j] = off
                if j in nbrs:
                    theta[off : off + si * sj] = game.pairwise_table(i, j).ravel()
                off += si * sj
            deviation_base = off  # the -1 slot, then -[x_j = c] slots
            phi[:, :deviation_base] = theta[None, :deviation_base]
            for ai in range(si):
                phi[ai, deviation_base] = game.unary_table(i)[ai]
                off = deviation_base + 1
                for j in others:
                    sj = space.counts[j - 1]
                    if j in nbrs:
                        phi[ai, off : off + sj] = game.pairwise_table(i, j)[ai, :]
                    off += sj
            phi.flags.writeable = False
            phis.append(phi)
        return cls(space, phis)

    def features(self, i: int, x: Sequence[int]) -> np.ndarray:
        """y(i, x) in {-1, 0, 1}: indicators as played, then negated probes."""
        space = self.space
        space._check_player(i)
        x = tuple(int(a) for a in x)
        if len(x) != space.n:
            raise InputError(f"expected {space.n} actions, got {len(x)}")
        for p, (a, s) in enumerate(zip(x, space.counts)):
            if not 1 <= a <= s:
                raise InputError(f"action {a} for player {p + 1} outside 1..{s}")
        si = space.counts[i - 1]
        others = [j for j in range(1, space.n + 1) if j != i]
        dim = (1 + si) * (1 + sum(space.counts[j - 1] for j in others))
        y = np.zeros(dim)
        off = 0
        y[off + x[i - 1] - 1] = 1.0
        off += si
        for j in others:
            sj = space.counts[j - 1]
            y[off + (x[i - 1] - 1) * sj + (x[j - 1] - 1)] = 1.0
            off += si * sj
        y[off] = -1.0
        off += 1
        for j in others:
            sj = space.counts[j - 1]
            y[off + x[j - 1] - 1] = -1.0
            off += sj
        return y

    def margins(self, x: Sequence[int]) -> list[np.ndarray]:
        """Per-player vectors of payoff advantages over each deviation."""
        out = []
        for i in range(1, self.space.n + 1):
            y = self.features(i, x)
            if y.shape[0] != self._phi[i - 1].shape[1]:
                raise InputError("feature/coefficient dimension mismatch")
            out.append(self._phi[i - 1] @ y)
        return out

    def is_psne(self, x: Sequence[int]) -> bool:
        return all((m >= 0.0).all() for m in self.margins(x))


def embed_binary_weight_game(weights) -> PolymatrixGame:
    """Two-action game from a weight matrix over spins {-1, +1}.

    Row i of the matrix gives player i's payoff w_ii * x_i +
    sum_{j != i} w_ij * x_i * x_j with spin values; action 1 stands for
    spin -1 and action 2 for spin +1.  The PSNE set of the returned game
    equals the spin game's.
    """
    w = np.asarray(weights, dtype=float)
    if w.ndim != 2 or w.shape[0] != w.shape[1]:
        raise InputError(f"weight matrix must be square, got shape {w.shape}")
    n = w.shape[0]
    spin = np.array([-1.0, 1.0])
    neighbors = {
        i: [j for j in range(1, n + 1) if j != i and w[i - 1, j - 1] != 0.0]
        for i in range(1, n + 1)
    }
    unary = {i: w[i - 1, i - 1] * spin for i in range(1, n + 1)}
    pairwise = {
        (i, j): w[i - 1, j - 1] * np.outer(spin, spin)
        for i in range(1, n + 1)
        for j in neighbors[i]
    }
    return PolymatrixGame([2] * n, neighbors=neighbors, unary=unary, pairwise=pairwise)
