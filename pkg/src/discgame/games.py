"""Example payout generators, from toy constructions to a population game.

The centerpiece is an iterated prisoner's dilemma between agents with
three-parameter autoregressive policies, scored not by raw utility (which
is variable-sum) but by the fixation probability of one type against the
other in a small evolving population — a skew-symmetric payout by
construction.
"""

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .errors import NotSkew, NotSymmetric, OutOfDomain
from .payout import PayoutMatrix, skew_symmetrize
from ._ipd_kernels import U64, fixation_kernel
from . import serialize

_MASK = (1 << 64) - 1
_INV_2_53 = 1.0 / 9007199254740992.0


def _splitmix_u01(state: int):
    """Python twin of the compiled splitmix64 stream (bit-exact)."""
    state = (state + 0x9E3779B97F4A7C15) & _MASK
    z = state
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK
    z = z ^ (z >> 31)
    return state, (z >> 11) * _INV_2_53


@dataclass(frozen=True)
class IpdAgent:
    """Autoregressive prisoner's-dilemma policy.

    ``p_star`` is the innate cooperation probability, ``alpha`` the memory
    rate (how slowly the policy moves), and ``gamma`` the reaction: positive
    imitates the opponent's last action, negative does the opposite, zero
    ignores it.
    """

    p_star: float
    alpha: float
    gamma: float

    def __post_init__(self):
        if not 0.0 <= self.p_star <= 1.0:
            raise OutOfDomain(f"p_star must lie in [0, 1], got {self.p_star}")
        if not 0.0 <= self.alpha <= 1.0:
            raise OutOfDomain(f"alpha must lie in [0, 1], got {self.alpha}")
        if not -1.0 <= self.gamma <= 1.0:
            raise OutOfDomain(f"gamma must lie in [-1, 1], got {self.gamma}")


@dataclass(frozen=True)
class IpdConfig:
    """Match and selection settings for the population game.

    ``payoffs`` is (both-cooperate, both-defect, defector-vs-cooperator,
    cooperator-vs-defector).  ``fitness_mode`` selects whether the softmax
    sees raw cumulative match utility ("sum", the default) or its per-round
    mean ("mean").
    """

    payoffs: tuple = (0.0, -1.0, 1.0, -2.0)
    expected_rounds: float = 50.0
    moran_population: int = 20
    softmax_lambda: float = 1.0
    replicates: int = 200
    seed: int = 0
    fitness_mode: str = "sum"

    def __post_init__(self):
        if self.expected_rounds <= 1:
            raise OutOfDomain("expected_rounds must exceed 1")
        if self.moran_population < 2 or self.moran_population % 2:
            raise OutOfDomain("moran_population must be even and >= 2")
        if self.replicates < 1:
            raise OutOfDomain("replicates must be >= 1")
        if self.fitness_mode not in ("sum", "mean"):
            raise OutOfDomain("fitness_mode must be 'sum' or 'mean'")

    @property
    def continuation_log(self) -> float:
        return math.log(1.0 - 1.0 / self.expected_rounds)


def ipd_match(a: IpdAgent, b: IpdAgent, config: IpdConfig, rng_state: int,
              trace: bool = False):
    """Play one iterated match; returns cumulative utilities (and new state).

    The round count is geometric with the configured mean.  Each round both
    agents cooperate with their current probabilities, then update toward a
    mix of their innate preference and a reaction to the opponent's action.
    With ``trace=True`` the per-round actions and running totals are
    returned as well.
    """
    cc, dd, win, lose = config.payoffs
    log_q = config.continuation_log
    state = int(rng_state) & _MASK
    state, u = _splitmix_u01(state)
    if u <= 0.0:
        u = 5e-324
    n_rounds = 1 + int(math.log(u) / log_q)
    prob_a, prob_b = a.p_star, b.p_star
    ua = ub = 0.0
    history = []
    for _ in range(n_rounds):
        state, u1 = _splitmix_u01(state)
        state, u2 = _splitmix_u01(state)
        a_coop = u1 < prob_a
        b_coop = u2 < prob_b
        if a_coop and b_coop:
            ua += cc
            ub += cc
        elif a_coop:
            ua += lose
            ub += win
        elif b_coop:
            ua += win
            ub += lose
        else:
            ua += dd
            ub += dd
        if trace:
            history.append((("C" if a_coop else "D") + ("C" if b_coop else "D"),
                            ua, ub))
        da = 1.0 if b_coop else -1.0
        db = 1.0 if a_coop else -1.0
        ta = (1.0 - abs(a.gamma)) * a.p_star \
            + abs(a.gamma) * 0.5 * (1.0 + _sign(a.gamma) * da)
        tb = (1.0 - abs(b.gamma)) * b.p_star \
            + abs(b.gamma) * 0.5 * (1.0 + _sign(b.gamma) * db)
        prob_a = a.alpha * prob_a + (1.0 - a.alpha) * ta
        prob_b = b.alpha * prob_b + (1.0 - b.alpha) * tb
    if trace:
        return ua, ub, history
    return ua, ub


def _sign(x: float) -> float:
    return 1.0 if x > 0 else (-1.0 if x < 0 else 0.0)


def _pair_seed(seed: int, i: int, j: int) -> int:
    """Deterministic, collision-safe per-pair stream seed."""
    return int(np.random.SeedSequence([seed & _MASK, i, j]).generate_state(1)[0])


def ipd_fixation_payout(a: IpdAgent, b: IpdAgent, config: IpdConfig) -> float:
    """Skew payout 2 (p̂_fix − ½) from replicated selection contests.

    Starts a population half a, half b; each generation pairs everyone at
    random, scores one match per pair, and redraws the population with
    parent probabilities softmax(λ · score).  A replicate ends at fixation
    (capped at 10 N² generations, counting as half a win).  Antisymmetric
    by construction: the b-versus-a estimate is one minus the a-versus-b
    estimate, and identical agents score exactly zero.
    """
    if a == b:
        return 0.0
    flip = (b.p_star, b.alpha, b.gamma) < (a.p_star, a.alpha, a.gamma)
    first, second = (b, a) if flip else (a, b)
    n = config.moran_population
    p_hat = fixation_kernel(
        np.array([first.p_star, first.alpha, first.gamma]),
        np.array([second.p_star, second.alpha, second.gamma]),
        np.asarray(config.payoffs, dtype=float),
        config.continuation_log, n, config.softmax_lambda,
        config.replicates, 10 * n * n, config.fitness_mode == "mean",
        U64(config.seed & _MASK))
    payout = 2.0 * (p_hat - 0.5)
    return -payout if flip else payout


def _worker_count() -> int:
    env = os.environ.get("DISCGAME_THREADS")
    if env:
        return max(1, int(env))
    return os.cpu_count() or 1


def ipd_population(n: int, seed: int = 0, config: IpdConfig = None,
                   threads: int = None):
    """Sample n agents and fill their pairwise fixation payouts.

    Agent parameters: p* ~ Beta(0.7, 0.7), α ~ Beta(1, 1) and
    γ = 2(η − ½) with η ~ Beta(3, 3).  Each unordered pair gets its own
    deterministic stream derived from (seed, i, j), so the matrix is
    independent of evaluation order and thread count.  Returns
    (agents, PayoutMatrix) with uniform weights.
    """
    if n < 2:
        raise OutOfDomain("need at least two agents")
    if config is None:
        config = IpdConfig()
    rng = np.random.default_rng(seed)
    agents = [IpdAgent(p_star=float(rng.beta(0.7, 0.7)),
                       alpha=float(rng.beta(1.0, 1.0)),
                       gamma=float(2.0 * (rng.beta(3.0, 3.0) - 0.5)))
              for _ in range(n)]
    pairs = [(i, j) for i in range(n) for j in range(i + 1, n)]

    def one(pair):
        i, j = pair
        pair_config = IpdConfig(
            payoffs=config.payoffs, expected_rounds=config.expected_rounds,
            moran_population=config.moran_population,
            softmax_lambda=config.softmax_lambda, replicates=config.replicates,
            seed=_pair_seed(seed, i, j), fitness_mode=config.fitness_mode)
        return ipd_fixation_payout(agents[i], agents[j], pair_config)

    workers = threads if threads is not None else _worker_count()
    entries = np.zeros((n, n))
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            values = list(pool.map(one, pairs))
    else:
        values = [one(p) for p in pairs]
    for (i, j), v in zip(pairs, values):
        entries[i, j] = v
        entries[j, i] = -v
    return agents, PayoutMatrix(entries)


# ---------------------------------------------------------------------------
# deterministic constructors
# ---------------------------------------------------------------------------

def make_normal_form(entries, labels=None, weights=None,
                     auto_symmetrize: bool = False) -> PayoutMatrix:
    """Wrap a raw square matrix, optionally projecting onto its skew part."""
    if auto_symmetrize:
        return skew_symmetrize(entries, labels=labels, weights=weights)
    return PayoutMatrix(entries, labels=labels, weights=weights)


def make_transitive(ratings, labels=None, weights=None) -> PayoutMatrix:
    """Rating-difference payout F[i, j] = r_i − r_j (a single degenerate plane)."""
    r = np.asarray(ratings, dtype=float)
    return PayoutMatrix(r[:, None] - r[None, :], labels=labels, weights=weights)


def make_quadratic(grad, hess_rating, hess_cross, grid) -> PayoutMatrix:
    """Quadratic payout sampled on a grid of trait points.

    ``f(x, x') = r(x) − r(x') + xᵀ C x'`` with r(x) = gᵀx + ½ xᵀ H x;
    H must be symmetric, C skew.  Grid rows are trait vectors; weights are
    uniform over the grid.
    """
    g = np.atleast_1d(np.asarray(grad, dtype=float))
    h = np.atleast_2d(np.asarray(hess_rating, dtype=float))
    c = np.atleast_2d(np.asarray(hess_cross, dtype=float))
    x = np.atleast_2d(np.asarray(grid, dtype=float))
    if np.max(np.abs(h - h.T), initial=0.0) > 1e-12:
        raise NotSymmetric("rating Hessian must be symmetric")
    if np.max(np.abs(c + c.T), initial=0.0) > 1e-12:
        raise NotSkew("cross Hessian must be skew-symmetric")
    ratings = x @ g + 0.5 * np.sum((x @ h) * x, axis=1)
    entries = ratings[:, None] - ratings[None, :] + x @ c @ x.T
    return skew_symmetrize(entries)  # cancel rounding asymmetry exactly


def make_random_lowrank(n: int, rank: int, seed: int = 0,
                        omegas=None) -> PayoutMatrix:
    """Planted low-rank game whose embedding recovers rank and spectrum.

    Builds Σ_k ω_k (u_k v_kᵀ − v_k u_kᵀ) from seeded orthonormal pairs and
    scales so that, under the uniform reference weights, the embedding
    frequencies equal the planted ω exactly.
    """
    if rank % 2 or rank <= 0 or rank > n - (n % 2):
        raise OutOfDomain(f"rank must be even and feasible for n={n}, got {rank}")
    rng = np.random.default_rng(seed)
    if omegas is None:
        omegas = np.sort(rng.uniform(0.3, 1.0, size=rank // 2))[::-1]
    else:
        omegas = np.asarray(omegas, dtype=float)
    q, _ = np.linalg.qr(rng.standard_normal((n, rank)))
    entries = np.zeros((n, n))
    for k, w in enumerate(omegas):
        u, v = q[:, 2 * k], q[:, 2 * k + 1]
        entries += w * (np.outer(u, v) - np.outer(v, u))
    # uniform weights divide the operator by n; pre-scale to compensate
    return PayoutMatrix(n * entries)


# ---------------------------------------------------------------------------
# agents CSV
# ---------------------------------------------------------------------------

def write_agents_csv(agents, path) -> None:
    serialize.write_csv(path, ["p_star", "alpha", "gamma"],
                        [(a.p_star, a.alpha, a.gamma) for a in agents])


def read_agents_csv(path):
    header, data = serialize.read_csv(path)
    if header != ["p_star", "alpha", "gamma"]:
        raise OutOfDomain(f"unexpected agents CSV header {header}")
    return [IpdAgent(p_star=row[0], alpha=row[1], gamma=row[2]) for row in data]
