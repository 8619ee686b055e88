"""The recurrence dichotomy and the shape of large orbits.

A cloud whose hull contains the origin hosts a fully mixed equilibrium:
orbits are closed and come back.  Shift the cloud off the origin and the
tilt runs away while the population centroid crawls along the hull
boundary (iterated dominance).  For a square support, large closed orbits
flatten onto the diamond dual to the square.
"""

import numpy as np

import discgame as dg
from discgame.hamiltonian import (
    ParticleCloud,
    ProductMarginals,
    ReplicatorSystem,
    UniformInterval,
)

rng = np.random.default_rng(4)
half = rng.standard_normal((8, 2))
centered = np.concatenate([half, -half])
shifted = rng.standard_normal((12, 2)) * 0.5
shifted[:, 0] = np.abs(shifted[:, 0]) + 0.5

for name, pts in (("centered", centered), ("shifted", shifted)):
    sys_ = ReplicatorSystem(ParticleCloud(pts, np.full(len(pts), 1 / len(pts))),
                            rate_mode="constant")
    interior = dg.origin_in_hull_interior(pts)
    theta_star = dg.find_equilibrium(sys_)
    traj = dg.integrate(sys_, [0.4, 0.0], 400.0, 0.02, record_every=10,
                        divergence_threshold=150.0)
    ret = dg.recurrence_return(traj, np.array([0.4, 0.0]), 0.05)
    print(f"{name} cloud: origin interior = {interior}, "
          f"equilibrium = {None if theta_star is None else np.round(theta_star, 6)}")
    if ret is not None:
        freq = dg.linearization_frequencies(sys_, theta_star)
        print(f"  first return at t = {ret:.3f}; linearized period "
              f"2π/freq = {2 * np.pi / freq[0]:.3f}")
    else:
        dist = dg.boundary_proximity(pts, traj.centroids[-1])
        print(f"  no return (boundary-seeking); final ‖θ‖ = "
              f"{np.linalg.norm(traj.thetas[-1]):.1f}, centroid within "
              f"{abs(dist):.2e} of the hull boundary")
    print()

print("large orbits over a uniform square flatten onto the dual diamond:")
square = ReplicatorSystem(ProductMarginals([UniformInterval(1.0),
                                            UniformInterval(1.0)]),
                          rate_mode="constant")
for amp in (2.0, 8.0, 32.0):
    traj = dg.integrate(square, [amp, 0.0], 6.0 * amp, 0.02, record_every=5)
    pts = traj.thetas / np.max(np.abs(traj.thetas))
    corner = np.max(np.abs(pts).min(axis=1))  # sup-norm radius at the diagonal
    print(f"  amplitude {amp:5.1f}: normalized diagonal crossing at "
          f"{corner:.3f} (diamond: 0.5)")

diamond = dg.dual_polygon(dg.Polygon2D([[1, 1], [-1, 1], [-1, -1], [1, -1]]))
print("polar dual of the square:", diamond.vertices.tolist())
