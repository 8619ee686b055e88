"""A population tournament that is messy in trait space, simple embedded.

Agents play an iterated prisoner's dilemma with three-parameter reactive
policies; pairwise payout is the (skew) fixation advantage in a small
evolving population.  Embedding the tournament matrix compresses almost
all of the structure into one plane whose phase orders the policies.
"""

import numpy as np

import discgame as dg

n = 30
config = dg.IpdConfig(replicates=100, seed=0)
agents, pm = dg.ipd_population(n, seed=42, config=config)

emb = dg.embed(pm)
print(f"{n} agents, embedded rank {emb.rank}")
print("variance shares of the leading planes:", np.round(emb.shares[:4], 3))
print()

phase = np.arctan2(emb.coords[:, 1], emb.coords[:, 0])
order = np.argsort(phase)
print("agents around the leading cycle (clockwise = advantage):")
print("   phase     |y|     p*     alpha   gamma")
for idx in order[:10]:
    a = agents[idx]
    print(f"  {phase[idx]: .3f}  {np.linalg.norm(emb.coords[idx, :2]):.3f}"
          f"   {a.p_star:.2f}   {a.alpha:.2f}   {a.gamma: .2f}")

mean_gap = np.max(np.abs(dg.reconstruct_matrix(dg.truncate(emb, 2))
                         - pm.entries))
print(f"\nmax payout error of the rank-2 summary: {mean_gap:.3f} "
      f"(payouts live in [-1, 1])")
