"""The generative model: signal on the equilibrium set, noise elsewhere.

Samples behave like repeated observations of a population playing a game:
a fraction q of observations sit on equilibria (uniformly), the rest are
uniform noise.  The scaled negative log-likelihood of any model lies in
[0, 1], and its empirical average converges to the closed-form population
value.
"""

import numpy as np

from psne_learn import (
    ActionSpace,
    MixtureModel,
    PsneSet,
    enumerate_psne,
    expected_nll,
    mixture_interval,
    embed_binary_weight_game,
)

# Equilibria of a 3-player majority-style spin game.
weights = np.array(
    [
        [0.0, 1.0, 1.0],
        [1.0, 0.0, 1.0],
        [1.0, 1.0, 0.0],
    ]
)
game = embed_binary_weight_game(weights)
psne = enumerate_psne(game)
space = game.space
print(f"equilibria: {list(psne)} of {space.joint_size} joint actions")

interval = mixture_interval(len(psne), space.joint_size)
print(f"admissible signal levels: ({interval.lower:.4f}, {interval.upper:.4f}]")

model = MixtureModel(space, psne, q=0.8)
print(f"pmf on an equilibrium:  {model.pmf(psne.indices[0]):.4f}")
off = next(i for i in range(space.joint_size) if i not in psne)
print(f"pmf off the equilibria: {model.pmf(off):.4f}")

every = np.arange(space.joint_size)
print(f"total probability mass: {model.pmf(every).sum():.12f}")
losses = model.scaled_nll(every)
print(f"scaled NLL range: [{losses.min():.4f}, {losses.max():.4f}]")

population = expected_nll(model, model)
print(f"\npopulation scaled NLL: {population:.6f}")
for m in (100, 10_000, 1_000_000):
    data = model.sample(m, seed=2024)
    print(f"empirical at m={m:>9,}: {model.empirical_nll(data):.6f}")
