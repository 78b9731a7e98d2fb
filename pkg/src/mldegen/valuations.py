"""Learning tropical critical points from numerical paths.

Weights u_a(t) = c_a t^(w_a). Each critical point at t = 1 is tracked down a
geometric schedule of t values; the slope of log|p_a| against log t, rounded
to a small-denominator rational, estimates the valuation of p_a.
"""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from fractions import Fraction

import mpmath
import numpy as np

from .critical import LikelihoodSystem
from .linalg import frac

log = logging.getLogger(__name__)

MIN_SAMPLES = 8


def default_schedule(n=25, t0=0.1, ratio=0.8):
    return [t0 * ratio ** j for j in range(n)]


def schedule_to(tmin, t0=0.1, ratio=0.8):
    n = int(math.floor(math.log(tmin / t0) / math.log(ratio))) + 1
    return default_schedule(max(n, MIN_SAMPLES), t0, ratio)


@dataclass
class ParametricWeights:
    c: list          # complex constants
    w: list          # rational exponents

    def __post_init__(self):
        self.w = [frac(x) for x in self.w]
        if len(self.c) != len(self.w):
            raise ValueError("c and w must have the same length")
        if any(complex(x) == 0 for x in self.c):
            raise ValueError("every weight constant must be nonzero")

    def at(self, s):
        """Weights and their s-derivative at s = log t (mpmath values)."""
        u = [mpmath.mpc(complex(c)) * mpmath.exp(mpmath.mpf(w.numerator) / w.denominator * s)
             for c, w in zip(self.c, self.w)]
        du = [ui * (mpmath.mpf(w.numerator) / w.denominator) for ui, w in zip(u, self.w)]
        return u, du


@dataclass
class PathSample:
    t: list
    points: list
    logabs: list                 # one row of log|p_a| per retained sample
    early_exit: bool = False
    dropped: int = 0


def _p_and_terms(sys: LikelihoodSystem, x):
    """|p_a(x)| and the size of its largest term (to measure cancellation)."""
    vals, sizes = [], []
    for comp in sys._p:
        total = mpmath.mpc(0)
        big = mpmath.mpf(0)
        for e, c in comp.exact:
            term = mpmath.mpf(c.numerator) / c.denominator
            for xi, ei in zip(x, e):
                if ei:
                    term *= xi ** ei
            total += term
            big = max(big, abs(term))
        vals.append(abs(total))
        sizes.append(big)
    return vals, sizes


def _correct(sys, x, u, tol, iters=12, first_max=None):
    """Newton until every coordinate p_a moves by less than tol relative to
    itself. Coordinates can be many orders of magnitude apart, so an absolute
    test on x would be meaningless. With first_max, a first correction larger
    than that (relative) counts as failure: the prediction was too far off
    and Newton may be pulled onto a neighbouring path."""
    for it in range(iters):
        ev = sys.mp_eval(x)
        G, J = sys.mp_combine(ev, u)
        try:
            dx = mpmath.lu_solve(mpmath.matrix(J), mpmath.matrix(G))
        except ZeroDivisionError:
            return None
        x = [a - b for a, b in zip(x, dx)]
        P, dP, _ = ev
        moved = max(abs(mpmath.fsum(dP[i][a] * dx[i] for i in range(len(x)))) / abs(P[a])
                    for a in range(len(P)))
        if it == 0 and first_max is not None and moved > first_max:
            return None
        if moved < tol:
            return x
    return None


def _predict(sys, weights, x, s, h, kind):
    def f(xx, ss):
        return _velocity(sys, xx, *weights.at(ss))
    k1 = f(x, s)
    if kind == "euler":
        return [a + h * b for a, b in zip(x, k1)]
    k2 = f([a + h / 2 * b for a, b in zip(x, k1)], s + h / 2)
    k3 = f([a + h / 2 * b for a, b in zip(x, k2)], s + h / 2)
    k4 = f([a + h * b for a, b in zip(x, k3)], s + h)
    return [a + h / 6 * (b1 + 2 * b2 + 2 * b3 + b4) for a, b1, b2, b3, b4 in zip(x, k1, k2, k3, k4)]


def auto_dps(weights: ParametricWeights, tmin, margin=25):
    """Enough digits to resolve coordinates of valuation up to the spread of w."""
    spread = float(max(weights.w) - min(weights.w))
    return margin + int(math.ceil(spread * math.log10(1 / tmin)))


def _velocity(sys, x, u, du):
    ev = sys.mp_eval(x)
    _, J = sys.mp_combine(ev, u)
    b, _ = sys.mp_combine(ev, du, jac=False)
    return [-v for v in mpmath.lu_solve(mpmath.matrix(J), mpmath.matrix(b))]


def track(sys: LikelihoodSystem, weights: ParametricWeights, start, schedule=None,
          dps=None, hmax=0.5, hmin=1e-5, tol=1e-15, first_max=1e-2, predictor="rk4",
          start_tol=1e-6) -> PathSample:
    """Predictor (classical RK4, or explicit Euler) in s = log t, Newton
    corrector at every step. A step is
    rejected when its first correction moves some p_a by more than first_max
    relative to itself. The step grows after successes and halves after failures; below `hmin` the path is
    cut and the samples gathered so far are kept. The path also stops early
    when some p_a has cancelled down to the working precision."""
    schedule = default_schedule() if schedule is None else list(schedule)
    if any(b >= a for a, b in zip(schedule, schedule[1:])) or not 0 < schedule[-1] < schedule[0] <= 1:
        raise ValueError("schedule must be strictly decreasing inside (0, 1]")
    out = PathSample([], [], [])
    dps = auto_dps(weights, schedule[-1]) if dps is None else dps
    with mpmath.workdps(dps):
        lost = mpmath.mpf(10) ** (-(dps - 8))
        x = [mpmath.mpc(complex(v)) for v in start]
        s = mpmath.mpf(0)
        u0 = weights.at(s)[0]
        G, _ = sys.mp_combine(sys.mp_eval(x), u0, jac=False)
        if max(abs(g) for g in G) > start_tol:
            raise ValueError("start is not a critical point for the weights at t = 1")
        x = _correct(sys, x, u0, tol)
        if x is None:
            raise ValueError("Newton does not converge at the start")
        h = hmax / 4
        for target in schedule:
            st = mpmath.log(mpmath.mpf(target))
            while s > st:
                step = min(h, float(s - st))
                try:
                    xp = _predict(sys, weights, x, s, -step, predictor)
                    xn = _correct(sys, xp, weights.at(s - step)[0], tol, first_max=first_max)
                except ZeroDivisionError:
                    xn = None
                if xn is None:
                    h = step / 2
                    if h < hmin:
                        out.dropped = len(schedule) - len(out.t)
                        out.early_exit = True
                        log.info("step underflow before t=%.3g", target)
                        return out
                    continue
                x, s = xn, s - step
                if step == h:
                    h = min(hmax, h * 1.5)
            vals, sizes = _p_and_terms(sys, x)
            if any(v <= lost * sz for v, sz in zip(vals, sizes)):
                out.early_exit = True
                out.dropped = len(schedule) - len(out.t)
                break
            out.t.append(target)
            out.points.append([complex(v) for v in x])
            out.logabs.append([float(mpmath.log(v)) for v in vals])
    return out


# ------------------------------------------------------------ fitting

def convergent(x, cap):
    """Last continued-fraction convergent of x with denominator <= cap."""
    if not math.isfinite(x):
        raise ValueError("slope is not finite")
    h0, h1, k0, k1 = 0, 1, 1, 0
    y = x
    best = Fraction(math.floor(x))
    for _ in range(64):
        a = math.floor(y)
        h0, h1 = h1, a * h1 + h0
        k0, k1 = k1, a * k1 + k0
        if k1 > cap:
            break
        best = Fraction(h1, k1)
        frac_part = y - a
        if frac_part < 1e-12:
            break
        y = 1 / frac_part
    return best


@dataclass
class TropicalResult:
    q: tuple
    rho: float
    slopes: list
    intercepts: list
    untrusted: bool
    reasons: list = field(default_factory=list)


def fit_valuations(sample: PathSample, denom_cap=32, gap=1e-3, reject=1.0) -> TropicalResult:
    if denom_cap < 1:
        raise ValueError("denom_cap must be at least 1")
    if len(sample.t) < MIN_SAMPLES:
        raise ValueError(f"need at least {MIN_SAMPLES} samples, have {len(sample.t)}")
    X = np.log(np.array(sample.t, dtype=float))
    Y = np.array(sample.logabs, dtype=float)          # (samples, coords)
    A = np.stack([X, np.ones_like(X)], axis=1)
    (slopes, intercepts), *_ = np.linalg.lstsq(A, Y, rcond=None)
    q, rhos, reasons = [], [], []
    for a, sl in enumerate(slopes):
        r = convergent(float(sl), denom_cap)
        q.append(r)
        if abs(float(r) - sl) > gap:
            reasons.append(f"coordinate {a}: slope {sl:.5f} is {abs(float(r) - sl):.1e} from {r}")
        c = float(np.mean(Y[:, a] - float(r) * X))
        rhos.append(float(np.sum((Y[:, a] - (c + float(r) * X)) ** 2)))
    rho = max(rhos) if rhos else 0.0
    if rho > reject:
        reasons.append(f"regression error {rho:.3g} above {reject}")
    return TropicalResult(tuple(q), rho, [float(v) for v in slopes], [float(v) for v in intercepts],
                          bool(reasons), reasons)


# ------------------------------------------------------------ Algorithm

@dataclass
class Cluster:
    q: tuple
    multiplicity: int
    max_rho: float
    untrusted: int


@dataclass
class LearnResult:
    clusters: list
    failed: int
    results: list


def _one_path(args):
    sys, weights, start, schedule, denom_cap, dps = args  # dps None selects auto_dps
    try:
        sample = track(sys, weights, start, schedule, dps=dps)
        return fit_valuations(sample, denom_cap)
    except (ValueError, ZeroDivisionError) as exc:
        log.info("path failed: %s", exc)
        return None


def learn(sys: LikelihoodSystem, weights: ParametricWeights, starts, schedule=None, denom_cap=32,
          dps=None, normalize=None, workers=1) -> LearnResult:
    """Track every start, fit valuations and group equal valuation vectors.
    `normalize` maps a valuation vector to its canonical representative
    under a torus action of the model (identity by default)."""
    jobs = [(sys, weights, s, schedule, denom_cap, dps) for s in starts]
    if workers > 1:
        from concurrent.futures import ProcessPoolExecutor
        with ProcessPoolExecutor(workers) as ex:
            results = list(ex.map(_one_path, jobs))
    else:
        results = [_one_path(j) for j in jobs]
    groups = {}
    failed = 0
    for res in results:
        if res is None:
            failed += 1
            continue
        q = tuple(normalize(res.q)) if normalize else res.q
        g = groups.setdefault(q, [0, 0.0, 0])
        g[0] += 1
        g[1] = max(g[1], res.rho)
        g[2] += int(res.untrusted)
    clusters = [Cluster(q, m, r, u) for q, (m, r, u) in sorted(groups.items(), key=lambda kv: (-kv[1][0], kv[0]))]
    return LearnResult(clusters, failed, results)
