"""Compiled inner loops for the population prisoner's-dilemma game.

All randomness flows through an explicit splitmix64 state so results are
bit-reproducible and independent of evaluation order or thread count.  The
pure-Python reference implementation in :mod:`discgame.games` consumes the
identical stream; the two are cross-checked for exact equality in the
tests.
"""

import numpy as np
from numba import njit

U64 = np.uint64
_MASK = U64(0xFFFFFFFFFFFFFFFF)
_GAMMA = U64(0x9E3779B97F4A7C15)
_MIX1 = U64(0xBF58476D1CE4E5B9)
_MIX2 = U64(0x94D049BB133111EB)
_INV_2_53 = 1.0 / 9007199254740992.0


@njit(cache=True, nogil=True)
def _u01(state):
    state = (state + _GAMMA) & _MASK
    z = state
    z = (z ^ (z >> U64(30))) * _MIX1
    z = (z ^ (z >> U64(27))) * _MIX2
    z = z ^ (z >> U64(31))
    return state, (z >> U64(11)) * _INV_2_53


@njit(cache=True, nogil=True)
def match_kernel(pa, aa, ga, pb, ab, gb, cc, dd, win, lose, log_q, state):
    """One iterated match; returns (utility_a, utility_b, rounds, state)."""
    state, u = _u01(state)
    if u <= 0.0:
        u = 5e-324
    n_rounds = 1 + int(np.log(u) / log_q)
    prob_a = pa
    prob_b = pb
    ua = 0.0
    ub = 0.0
    for _ in range(n_rounds):
        state, u1 = _u01(state)
        state, u2 = _u01(state)
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
        da = 1.0 if b_coop else -1.0
        db = 1.0 if a_coop else -1.0
        ta = (1.0 - abs(ga)) * pa + abs(ga) * 0.5 * (1.0 + np.sign(ga) * da)
        tb = (1.0 - abs(gb)) * pb + abs(gb) * 0.5 * (1.0 + np.sign(gb) * db)
        prob_a = aa * prob_a + (1.0 - aa) * ta
        prob_b = ab * prob_b + (1.0 - ab) * tb
    return ua, ub, n_rounds, state


@njit(cache=True, nogil=True)
def fixation_kernel(par_a, par_b, payoffs, log_q, n_pop, lam, replicates,
                    gen_cap, fitness_mean, seed):
    """Fraction of replicate populations fixed to type a (capped runs = 1/2).

    Each generation pairs the population at random, scores one match per
    pair, and resamples all individuals with parent probabilities equal to
    the softmax of their match scores.
    """
    state = seed
    wins = 0.0
    types = np.empty(n_pop, np.int8)
    new_types = np.empty(n_pop, np.int8)
    fit = np.empty(n_pop, np.float64)
    probs = np.empty(n_pop, np.float64)
    perm = np.empty(n_pop, np.int64)
    for _ in range(replicates):
        for i in range(n_pop):
            types[i] = 1 if i < n_pop // 2 else 0
        count = n_pop // 2
        gen = 0
        while 0 < count < n_pop and gen < gen_cap:
            for i in range(n_pop):
                perm[i] = i
            for i in range(n_pop - 1, 0, -1):
                state, u = _u01(state)
                j = int(u * (i + 1))
                perm[i], perm[j] = perm[j], perm[i]
            for k in range(n_pop // 2):
                i = perm[2 * k]
                j = perm[2 * k + 1]
                if types[i] == 1:
                    pa, aa, ga = par_a[0], par_a[1], par_a[2]
                else:
                    pa, aa, ga = par_b[0], par_b[1], par_b[2]
                if types[j] == 1:
                    pb, ab, gb = par_a[0], par_a[1], par_a[2]
                else:
                    pb, ab, gb = par_b[0], par_b[1], par_b[2]
                ua, ub, rounds, state = match_kernel(
                    pa, aa, ga, pb, ab, gb,
                    payoffs[0], payoffs[1], payoffs[2], payoffs[3], log_q, state)
                if fitness_mean:
                    ua /= rounds
                    ub /= rounds
                fit[i] = ua
                fit[j] = ub
            fmax = fit[0]
            for i in range(1, n_pop):
                if fit[i] > fmax:
                    fmax = fit[i]
            total = 0.0
            for i in range(n_pop):
                probs[i] = np.exp(lam * (fit[i] - fmax))
                total += probs[i]
            count = 0
            for child in range(n_pop):
                state, u = _u01(state)
                target = u * total
                acc = 0.0
                pick = n_pop - 1
                for i in range(n_pop):
                    acc += probs[i]
                    if target <= acc:
                        pick = i
                        break
                new_types[child] = types[pick]
                count += new_types[child]
            for i in range(n_pop):
                types[i] = new_types[i]
            gen += 1
        if count == n_pop:
            wins += 1.0
        elif 0 < count:
            wins += 0.5
    return wins / replicates
