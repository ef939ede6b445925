"""Build a few small polymatrix games and enumerate their equilibria.

Walks through the three ways to get a game into the library: explicit
potential tables, a binary weight matrix, and the influential-players
construction.  Every equilibrium claim is double-checked by the linear
inequality form of the equilibrium condition.
"""

import numpy as np

from psne_learn import (
    LinearPsneForm,
    PolymatrixGame,
    decode_joint_action,
    embed_binary_weight_game,
    enumerate_psne,
    influence_game,
)


def show(label, game):
    psne = enumerate_psne(game)
    actions = [decode_joint_action(game.space, i) for i in psne]
    print(f"{label}: {len(psne)} equilibria -> {actions}")
    form = LinearPsneForm.from_game(game)
    assert all(form.is_psne(x) for x in actions)
    return psne


# A two-player coordination game: each player is paid 1 for matching the
# other.  Both matched profiles are equilibria.
match = [[1.0, 0.0], [0.0, 1.0]]
coordination = PolymatrixGame(
    [2, 2],
    neighbors={1: [2], 2: [1]},
    pairwise={(1, 2): match, (2, 1): match},
)
show("coordination", coordination)

# The same game through the spin-weight interface (action 1 is spin -1).
weights = np.array([[0.0, 1.0], [1.0, 0.0]])
show("coordination via weights", embed_binary_weight_game(weights))

# Flipping one coupling produces a matching-pennies cycle: no pure
# equilibrium at all.
pennies = np.array([[0.0, 1.0], [-1.0, 0.0]])
show("matching pennies", embed_binary_weight_game(pennies))

# The influential-players construction pins a single equilibrium that
# spells out who the influential players are: they play 1, everyone else
# best-responds with 2.
inst = influence_game(n=5, k=2, pi=[2, 4])
print(f"influence instance pi={inst.pi}: unique equilibrium {inst.psne_action}")
show("influence game", inst.game)
