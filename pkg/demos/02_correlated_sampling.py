# %% [markdown]
# # Correlated sampling
#
# Two parties hold distributions p and q over one alphabet and read the same
# shared random sequence of (symbol, threshold) pairs.  Each outputs the first
# symbol whose threshold falls below its own probability.  The outputs agree
# with high probability when p and q are close.

# %%
from fractions import Fraction as F

from pargame.prob import Distribution, statistical_distance
from pargame.sampling import coupling_distribution_exact, coupling_report, pairwise_agreement_exact

p = Distribution.from_probs("s", (0, 1), [F(2, 3), F(1, 3)])
q = Distribution.from_probs("s", (0, 1), [F(1, 3), F(2, 3)])
d = statistical_distance(p, q)
print("distance d =", d)
print("(1-d)/(1+d) =", pairwise_agreement_exact(p, q), "(both accept in the same first round)")

# %% [markdown]
# The exact joint law of the two outputs: the common part min(p, q) lands on the
# diagonal, one-sided acceptances are followed by an independent draw.

# %%
joint = coupling_distribution_exact(p, q)
for o, m in joint.items():
    print(o, m)

# %%
rep = coupling_report(p, q, 200_000, seed=0)
print(rep.as_dict())
