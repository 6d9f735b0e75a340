# %% [markdown]
# # Product covers, factorization and repetition bounds

# %%
from fractions import Fraction as F

from pargame.bounds import BoundQuery, bound_cover, bound_local, bound_ns, recurrence_bound
from pargame.covers import channel_from_tables, factorize, recompose
from pargame.errors import CrossRatioError
from pargame.prob import ConditionalDistribution, Distribution

# %% [markdown]
# A channel P(z|a,b) that splits as f(a,z) g(b,z) is recovered exactly;
# XOR is rejected with a 2x2 witness whose cross products differ.

# %%
A = B = (0, 1)
Z = ("u", "v", "w")
f = {(0, "u"): F(1, 2), (1, "u"): F(1), (0, "v"): F(1, 2), (1, "v"): F(0), (0, "w"): F(1, 2), (1, "w"): F(1)}
g = {(0, "u"): F(2, 3), (1, "u"): F(1), (0, "v"): F(1), (1, "v"): F(1), (0, "w"): F(1, 3), (1, "w"): F(0)}
K = channel_from_tables(A, B, Z, f, g)
fac = factorize(K)
print("recomposes exactly:", recompose(K, fac))

out = (("z", (0, 1)),)
xor = ConditionalDistribution((("a", A), ("b", B)), out,
                              {(a, b): Distribution.point(out, (a ^ b,)) for a in A for b in B})
try:
    factorize(xor)
except CrossRatioError as e:
    print("rejected:", e)

# %% [markdown]
# Closed-form bounds decay only for very large n: the constants are not tuned.

# %%
for n in (10, 10**3, 10**5, 10**7):
    print(n, bound_local(F(2, 3), n, 4), bound_cover(F(2, 3), n, 1), bound_ns(F(2, 3), n))

# %%
trace = recurrence_bound(BoundQuery(F(2, 3), 1000, 2.0, "local"))
print("recurrence minimum", trace.bound, "at m =", trace.m_star)
