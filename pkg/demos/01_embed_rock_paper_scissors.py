"""Embed rock-paper-scissors and read the strategy off the geometry.

The three pure strategies land on an equilateral triangle centered at the
origin: every agent beats the one clockwise from it, and the centered
triangle means no strategy dominates (the fully mixed equilibrium exists).
"""

import numpy as np

import discgame as dg

rps = dg.PayoutMatrix([[0, 1, -1], [-1, 0, 1], [1, -1, 0]],
                      labels=["rock", "paper", "scissors"])
emb = dg.embed(rps)

print("rank:", emb.rank)
print("block frequency:", emb.omegas[0], "(= 1/sqrt(3) for uniform weights)")
print("variance shares:", emb.shares)
print()
print("latent coordinates (one plane):")
for label, y in zip(emb.labels, emb.coords):
    print(f"  {label:9s} -> ({y[0]: .5f}, {y[1]: .5f})   |y| = {np.linalg.norm(y):.5f}")

print()
print("reconstructed payouts (cross products of coordinates):")
print(np.round(dg.reconstruct_matrix(emb), 12))

print()
print("origin inside the hull:", dg.origin_in_hull_interior(emb.coords))
print("accumulated advantage around the clockwise 3-cycle:",
      dg.curl_cycle(emb.coords[[0, 2, 1]]))
