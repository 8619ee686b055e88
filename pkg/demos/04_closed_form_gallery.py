"""Gallery of exact solutions and their defining flows.

Each closed form is checked here against a quick generic integration of
its own ODE, the same way the test suite does at tighter tolerances.
"""

import numpy as np

import discgame as dg
from discgame.closedform import laplace_period, laplace_population


def rk4(field, y0, t0, t1, n):
    y = np.asarray(y0, float).copy()
    t, h = t0, (t1 - t0) / n
    for _ in range(n):
        k1 = field(t, y)
        k2 = field(t + h / 2, y + h / 2 * k1)
        k3 = field(t + h / 2, y + h / 2 * k2)
        k4 = field(t + h, y + h * k3)
        y = y + h / 6 * (k1 + 2 * k2 + 2 * k3 + k4)
        t += h
    return y


print("== self play: clockwise circles ==")
y0 = np.array([1.0, 0.0])
for t in (np.pi / 2, np.pi, 7.0):
    print(f"  t={t:5.3f}  y={np.round(dg.self_play(y0, t), 6)}")

print("\n== fictitious self play: outward Kelvin spiral ==")
oracle = rk4(lambda t, s: np.concatenate([[s[3], -s[2]], (s[:2] - s[2:]) / t]),
             np.concatenate([dg.fictitious_self_play(1e-8), [0.0, 1.0]]),
             1e-8, 5.0, 200000)
print("  closed form y(5):", np.round(dg.fictitious_self_play(5.0), 8))
print("  integrated  y(5):", np.round(oracle[:2], 8))

print("\n== simultaneous gradient ascent: epicycles (n=3) ==")
ys0 = np.array([[1.0, 0.0], [-0.5, 0.8], [-0.5, -0.8]])
out = dg.sga_epicycles(ys0, 4.0)
print("  centroid turns clockwise, agents orbit it backwards:")
print(np.round(out, 5))

print("\n== transitive game: exponential takeover ==")
w = dg.transitive_density([1.0, 0.0, -1.0], [1 / 3, 1 / 3, 1 / 3], 1.0, 3.0)
print("  weights after t=3:", np.round(w, 6))

print("\n== gaussian closure of a quadratic game ==")
for t in (0.5, 1.0, 3.0):
    xbar, sigma = dg.gaussian_quadratic([0.5], [[1.0]], [0.2], [[-1.0]],
                                        [[0.0]], t)
    print(f"  t={t}: mean {xbar[0]: .6f}, variance {sigma[0, 0]:.6f} "
          f"(= 1/(1+t) = {1 / (1 + t):.6f})")

print("\n== Laplace base measure: elliptic oscillations ==")
for a in (0.2, 0.9):
    total, period = laplace_population(a), laplace_period(a)
    theta = dg.laplace_oscillator(a, total, period / 8)
    print(f"  amplitude {a}: population {total:.4f}, period {period:.4f} "
          f"(π for small a), θ(T/8) = {np.round(theta, 5)}")
