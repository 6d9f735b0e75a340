# %% [markdown]
# # Embedding one game into a conditioned repetition
#
# Fix a strategy for G^n and condition on winning some rounds.  Alice and Bob,
# given one question pair, sample the rest of the repeated game's questions
# with shared randomness and answer with coordinate j of the strategy.  The
# embedded strategy wins G at least Pr[W_j | W_cond] minus the embedding distance.

# %%
from pargame.games import cross_strategy, fortnow, conditioned_value_check, repeat
from pargame.sampling import (conditioned_win_exact, embed_plan, embedded_win_exact,
                              embedding_distance_exact, play_embedded)

g = fortnow()
s = cross_strategy(repeat(g, 2))
plan = embed_plan(g, 2, s, cond=(2,), j=1)
print("Pr[W_2]              =", plan.pr_condition)
print("eps_alice, eps_bob   =", plan.eps_alice, plan.eps_bob)
print("embedding distance   =", embedding_distance_exact(plan))
print("Pr[W_1 | W_2]        =", conditioned_win_exact(plan))
print("embedded win (exact) =", embedded_win_exact(plan))

# %%
rep = play_embedded(plan, 200_000, seed=1)
print("empirical win:", rep.empirical_win, "+-", 4 * rep.sigma)

# %% [markdown]
# The conditioned-value inequality for this instance (its right side exceeds 1
# at this size, so it holds trivially):

# %%
print(conditioned_value_check(g, 2, s, (2,)))
