# %% [markdown]
# # Exact game values
#
# The classical value of a two-prover game is a maximum over deterministic
# strategy pairs; the no-signaling value is a linear program.  Both are
# computed exactly over the rationals.

# %%
from pargame.games import chsh, classical_value, fortnow, repeat, strategy_count
from pargame.nosignaling import is_no_signaling, ns_value

# %% [markdown]
# ## CHSH
# Sixteen strategy pairs; the best wins 3/4 of the time.  No-signaling players
# win always, with the PR box.

# %%
g = chsh()
v, s = classical_value(g)
print("strategy pairs:", strategy_count(g), " value:", v)
v_ns, box = ns_value(g)
print("no-signaling value:", v_ns, " witness is no-signaling:", is_no_signaling(box))
for (x, y), row in box.table.items():
    print(f"  x={x} y={y}:", {ab: str(p) for ab, p in row.items()})

# %% [markdown]
# ## Fortnow's game
# Playing two copies in parallel does not lower the value: v(G) = v(G^2) = 2/3.

# %%
f = fortnow()
f2 = repeat(f, 2)
print("v(G)     =", classical_value(f)[0])
print("v(G^2)   =", classical_value(f2)[0], f"({strategy_count(f2)} strategy pairs)")
print("v_ns(G)  =", ns_value(f)[0])
print("v_ns(G^2)=", ns_value(f2)[0])
