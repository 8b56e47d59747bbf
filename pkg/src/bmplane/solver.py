"""Minimax approximation of f = log r by log-radial functions of ellipses.

The deviation ||f - g||_inf <= d is, for fixed d, a pair of linear
inequalities per angle in the trig coefficients (a2, b2, c2):

    exp(-2d - 2f(phi)) <= a2 + b2*cos(2*phi) + c2*sin(2*phi) <= exp(2d - 2f(phi)),

so feasibility at level d is a small linear program (maximize the worst
constraint slack), and the optimal deviation is found by bisection on d,
which is valid because feasibility is monotone in d.  An optional
Remez-style exchange then polishes the bisection output to solver precision:
re-solve the four-point equioscillation system in (a2, b2, c2, d) by Newton,
relocate the extrema, repeat.

Optimality is certified by four angles phi1 < psi1 < phi2 < psi2 < phi1+pi
at which f - g alternately attains +d and -d; such a certificate is
sufficient for global optimality and uniqueness within the ellipse family.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np
from scipy.optimize import linprog

from .ellipse import EllipseParams, in_cone
from .errors import NoAlternance, NoConvergence
from .gauge import Gauge, evaluation_grid

__all__ = [
    "SolverOptions",
    "SolveDiagnostics",
    "AlternanceCertificate",
    "UniformSolution",
    "OneSidedSolution",
    "CertificateVerdict",
    "feasible_at",
    "solve_uniform",
    "extract_certificate",
    "verify_certificate",
    "to_one_sided",
    "distance",
]

_PI = math.pi
_CANONICAL_ANGLES = (0.0, 0.25 * _PI, 0.5 * _PI, 0.75 * _PI)


@dataclass(frozen=True)
class SolverOptions:
    grid_size: int = 4096
    bisect_tol: float = 1e-12
    max_bisect: int = 80
    refine: bool = True
    polish: bool = True
    cert_tol: float = 1e-8
    seed: int = 0

    def __post_init__(self):
        if self.grid_size < 64:
            raise ValueError(f"grid_size must be at least 64, got {self.grid_size}")
        if not (self.bisect_tol > 0.0 and self.cert_tol > 0.0):
            raise ValueError("tolerances must be positive")
        if self.max_bisect < 1:
            raise ValueError("max_bisect must be at least 1")


@dataclass
class SolveDiagnostics:
    bisect_iterations: int = 0
    bracket_width: float = math.inf
    lp_calls: int = 0
    polish_iterations: int = 0
    polished: bool = False
    grid_points: int = 0

    def as_dict(self) -> dict:
        return {
            "bisect_iterations": self.bisect_iterations,
            "bracket_width": self.bracket_width,
            "lp_calls": self.lp_calls,
            "polish_iterations": self.polish_iterations,
            "polished": self.polished,
            "grid_points": self.grid_points,
        }


@dataclass(frozen=True)
class AlternanceCertificate:
    """Four interleaved angles at which f - g alternately attains +d and -d.

    residuals[i] is the deviation at the i-th point minus the defect, in the
    order (phi1, psi1, phi2, psi2); all four are ~0 for a genuine optimum.
    """

    phi1: float
    psi1: float
    phi2: float
    psi2: float
    residuals: tuple[float, float, float, float]

    def angles(self) -> tuple[float, float, float, float]:
        return (self.phi1, self.psi1, self.phi2, self.psi2)

    def interleaved(self) -> bool:
        return self.phi1 < self.psi1 < self.phi2 < self.psi2 < self.phi1 + _PI


@dataclass(frozen=True)
class UniformSolution:
    params: EllipseParams
    defect: float
    certificate: AlternanceCertificate
    diagnostics: SolveDiagnostics


@dataclass(frozen=True)
class OneSidedSolution:
    """Inscribed-side solution: g <= f with max(f - g) = value = 2*defect."""

    params: EllipseParams
    value: float
    max_deviation: float
    min_deviation: float


@dataclass(frozen=True)
class CertificateVerdict:
    ordering_ok: bool
    residuals_ok: tuple[bool, bool, bool, bool]
    sup_ok: bool
    passed: bool
    d_hat: float
    deviations: tuple[float, float, float, float]
    sup_norm: float


def _deviation_fn(gauge: Gauge, params: EllipseParams):
    """f - g as a vectorized callable; g = -0.5*log(trig)."""
    a2, b2, c2 = params.triple()

    def h(phi):
        phi = np.asarray(phi, dtype=float)
        trig = a2 + b2 * np.cos(2.0 * phi) + c2 * np.sin(2.0 * phi)
        return gauge.log_eval(phi) + 0.5 * np.log(trig)

    return h


class _FeasibilityProblem:
    """Max-margin LP over the fixed angle grid, reused across bisection steps."""

    def __init__(self, grid: np.ndarray, fvals: np.ndarray, seed: int = 0):
        self.grid = grid
        self.fvals = fvals
        n = grid.size
        c2, s2 = np.cos(2.0 * grid), np.sin(2.0 * grid)
        one = np.ones(n)
        rows = np.vstack(
            [
                np.column_stack([-one, -c2, -s2, one]),  # lower: R - m >= lo
                np.column_stack([one, c2, s2, one]),  # upper: R + m <= hi
            ]
        )
        self._perm = np.random.default_rng(seed).permutation(2 * n)
        self._rows = rows[self._perm]
        self._objective = np.array([0.0, 0.0, 0.0, -1.0])
        self._bounds = [(None, None)] * 4
        self.lp_calls = 0

    def solve(self, d: float) -> tuple[Optional[EllipseParams], float]:
        """Best margin at level d; params only when the margin is nonnegative."""
        lo = np.exp(-2.0 * d - 2.0 * self.fvals)
        hi = np.exp(2.0 * d - 2.0 * self.fvals)
        b = np.concatenate([-lo, hi])[self._perm]
        self.lp_calls += 1
        res = linprog(
            self._objective,
            A_ub=self._rows,
            b_ub=b,
            bounds=self._bounds,
            method="highs-ds",
        )
        if res.status != 0:
            res = linprog(
                self._objective, A_ub=self._rows, b_ub=b, bounds=self._bounds, method="highs"
            )
        if res.status != 0:
            raise NoConvergence(f"feasibility LP failed at d={d}: {res.message}")
        margin = -float(res.fun)
        if margin < 0.0:
            return None, margin
        a2, b2, c2 = (float(v) for v in res.x[:3])
        if not in_cone(a2, b2, c2):
            return None, margin
        return EllipseParams(a2, b2, c2), margin


def feasible_at(gauge: Gauge, d: float, grid, seed: int = 0) -> Optional[EllipseParams]:
    """Ellipse triple with ||f - g||_inf <= d on the grid, or None.

    ``grid`` is an array of angles, or an int for a uniform grid of that size
    merged with the gauge's kink angles.  The returned triple maximizes the
    minimum constraint slack, so it sits as deep inside the feasible set as
    the level d allows.
    """
    if d < 0.0:
        return None
    if np.ndim(grid) == 0:
        grid = evaluation_grid(gauge, int(grid))
    grid = np.asarray(grid, dtype=float)
    params, _ = _FeasibilityProblem(grid, gauge.log_eval(grid), seed).solve(d)
    return params


def _batched_ternary_max(fun, lo: np.ndarray, hi: np.ndarray, rounds: int = 60):
    """Vectorized ternary maximization on per-element brackets."""
    a = np.array(lo, dtype=float)
    b = np.array(hi, dtype=float)
    for _ in range(rounds):
        third = (b - a) / 3.0
        m1 = a + third
        m2 = b - third
        left = fun(m1) >= fun(m2)
        b = np.where(left, m2, b)
        a = np.where(left, a, m1)
    xm = 0.5 * (a + b)
    return xm, fun(xm)


@dataclass
class _ExtremaScan:
    max_angles: np.ndarray
    max_values: np.ndarray
    min_angles: np.ndarray
    min_values: np.ndarray
    sup: float


def _refined_extrema(h, grid: np.ndarray, hvals: np.ndarray) -> _ExtremaScan:
    """All local extrema of the pi-periodic h, sharpened by ternary search."""
    if float(hvals.max() - hvals.min()) < 1e-13:
        # flat deviation (body is an ellipse of the family): a single token extremum
        i = int(np.argmax(hvals))
        ang = grid[i : i + 1]
        val = hvals[i : i + 1]
        return _ExtremaScan(ang, val, ang, val, float(np.abs(hvals).max()))

    prev = np.roll(hvals, 1)
    nxt = np.roll(hvals, -1)
    lo_bracket = np.roll(grid, 1)
    lo_bracket[0] -= _PI
    hi_bracket = np.roll(grid, -1)
    hi_bracket[-1] += _PI

    imax = np.nonzero((hvals >= prev) & (hvals >= nxt))[0]
    imin = np.nonzero((hvals <= prev) & (hvals <= nxt))[0]
    max_angles, max_values = _batched_ternary_max(h, lo_bracket[imax], hi_bracket[imax])

    def neg(phi):
        return -h(phi)

    min_angles, min_neg = _batched_ternary_max(neg, lo_bracket[imin], hi_bracket[imin])
    min_values = -min_neg

    sup = max(
        float(np.abs(hvals).max()),
        float(max_values.max()) if max_values.size else -math.inf,
        float(-min_values.min()) if min_values.size else -math.inf,
    )
    return _ExtremaScan(
        np.mod(max_angles, _PI), max_values, np.mod(min_angles, _PI), min_values, sup
    )


def _shift_after(base: float, angles: np.ndarray) -> np.ndarray:
    """Representatives of pi-periodic angles inside (base, base + pi]."""
    shifted = base + np.mod(angles - base, _PI)
    return np.where(shifted <= base, shifted + _PI, shifted)


def _alternation_points(scan: _ExtremaScan, tol: float):
    """Locate (phi1, psi1, phi2, psi2) from refined extrema; None if absent."""
    d_est = scan.sup
    top = scan.max_values >= scan.max_values.max() - 1e-13
    phi1 = float(np.min(scan.max_angles[top]))
    if scan.max_values.max() < d_est - tol:
        return None, d_est  # one-sided profile: + side never reaches the defect

    low = scan.min_values <= -(d_est - tol)
    if not np.any(low):
        return None, d_est
    psis = _shift_after(phi1, scan.min_angles[low])
    psi1 = float(psis.min())
    psi2 = float(psis.max())
    if psi2 - psi1 < 1e-12:
        return None, d_est

    cand_angles = _shift_after(phi1, scan.max_angles)
    ok = (
        (cand_angles > psi1)
        & (cand_angles < psi2)
        & (scan.max_values >= d_est - tol)
    )
    if not np.any(ok):
        return None, d_est
    best = scan.max_values[ok].max()
    nearly = ok & (scan.max_values >= best - 1e-13)
    phi2 = float(np.min(cand_angles[nearly]))
    return (phi1, psi1, phi2, psi2), d_est


def _certificate_from_scan(h, scan: _ExtremaScan, tol: float) -> AlternanceCertificate:
    if scan.sup < tol:
        p1, q1, p2, q2 = _CANONICAL_ANGLES
        res = (
            float(h(p1)) - scan.sup,
            -float(h(q1)) - scan.sup,
            float(h(p2)) - scan.sup,
            -float(h(q2)) - scan.sup,
        )
        return AlternanceCertificate(p1, q1, p2, q2, res)

    pts, d_est = _alternation_points(scan, tol)
    if pts is None:
        raise NoAlternance(
            f"no four-point alternation within tolerance {tol} of the deviation "
            f"{d_est}; the candidate ellipse is not optimal"
        )
    phi1, psi1, phi2, psi2 = pts
    res = (
        float(h(phi1)) - d_est,
        -float(h(psi1)) - d_est,
        float(h(phi2)) - d_est,
        -float(h(psi2)) - d_est,
    )
    cert = AlternanceCertificate(phi1, psi1, phi2, psi2, res)
    if not cert.interleaved():
        raise NoAlternance(f"degenerate alternation points {cert.angles()}")
    return cert


def extract_certificate(
    gauge: Gauge, params: EllipseParams, tol: float, grid_size: int = 4096
) -> AlternanceCertificate:
    """Four-point alternance certificate of a (near-)optimal ellipse.

    phi1 is the global maximum of f - g; psi1/psi2 are the outermost points of
    the -d set inside (phi1, phi1 + pi); phi2 is the best +d point between
    them.  All four are sharpened by local search.  For a flat deviation
    (the body is itself an ellipse of the family) the canonical angles
    (0, pi/4, pi/2, 3pi/4) are returned.  Raises NoAlternance when the
    alternation cannot be located within ``tol``.
    """
    grid = evaluation_grid(gauge, grid_size)
    h = _deviation_fn(gauge, params)
    scan = _refined_extrema(h, grid, h(grid))
    return _certificate_from_scan(h, scan, tol)


def verify_certificate(
    gauge: Gauge,
    params: EllipseParams,
    cert: AlternanceCertificate,
    tol: float,
    grid_size: int = 4096,
) -> CertificateVerdict:
    """Re-check a certificate from scratch.

    The implied defect d_hat is the mean of the four signed deviations; the
    verdict requires strict interleaving, each deviation within tol of d_hat,
    and the refined sup-norm of f - g at most d_hat + tol.  A passing verdict
    makes the ellipse the unique minimizer up to those tolerances.
    """
    h = _deviation_fn(gauge, params)
    dev = (
        float(h(cert.phi1)),
        -float(h(cert.psi1)),
        float(h(cert.phi2)),
        -float(h(cert.psi2)),
    )
    d_hat = sum(dev) / 4.0
    residuals_ok = tuple(abs(v - d_hat) <= tol for v in dev)
    ordering_ok = cert.interleaved()
    grid = evaluation_grid(gauge, grid_size)
    sup = _refined_extrema(h, grid, h(grid)).sup
    sup_ok = sup <= d_hat + tol
    passed = ordering_ok and all(residuals_ok) and sup_ok
    return CertificateVerdict(ordering_ok, residuals_ok, sup_ok, passed, d_hat, dev, sup)


def _alternating_reference(scan: _ExtremaScan):
    """Four alternating near-critical extrema (+,-,+,-) for the Remez exchange.

    Local maxima and minima are merged in cyclic angle order, same-sign runs
    compressed to their most critical member, and adjacent opposite-sign pairs
    of least criticality trimmed until four points remain.  Returns the angles
    ordered phi1 < psi1 < phi2 < psi2 < phi1 + pi and the mean criticality,
    or None when no alternating quadruple exists.
    """
    ang = np.concatenate([scan.max_angles, scan.min_angles])
    sign = np.concatenate(
        [np.ones(scan.max_angles.size), -np.ones(scan.min_angles.size)]
    )
    crit = np.concatenate([scan.max_values, -scan.min_values])  # signed criticality
    order = np.argsort(ang, kind="stable")
    ang, sign, crit = ang[order], sign[order], crit[order]

    # compress cyclic same-sign runs, keeping the most critical member
    pts: list[tuple[float, float, float]] = []
    for a, s, c in zip(ang, sign, crit):
        if pts and pts[-1][1] == s:
            if c > pts[-1][2]:
                pts[-1] = (a, s, c)
        else:
            pts.append((a, s, c))
    while len(pts) > 1 and pts[0][1] == pts[-1][1]:
        if pts[0][2] >= pts[-1][2]:
            pts.pop()
        else:
            pts.pop(0)

    while len(pts) > 4:
        n = len(pts)
        pair_score = [max(pts[i][2], pts[(i + 1) % n][2]) for i in range(n)]
        i = int(np.argmin(pair_score))
        if i == n - 1:
            pts = pts[1 : n - 1]
        else:
            pts = pts[:i] + pts[i + 2 :]

    if len(pts) != 4 or min(c for _, _, c in pts) <= 0.0:
        return None
    if pts[0][1] < 0:  # rotate so the cycle starts on a maximum
        pts = pts[1:] + [(pts[0][0] + _PI, pts[0][1], pts[0][2])]
    angles = np.array([p[0] for p in pts])
    if not (angles[0] < angles[1] < angles[2] < angles[3] < angles[0] + _PI):
        return None
    return angles, float(np.mean([c for _, _, c in pts]))


def _newton_equioscillation(fpts: np.ndarray, theta: np.ndarray, x0: np.ndarray):
    """Solve f(theta_i) + 0.5*log R(theta_i) = sigma_i * d for (a2, b2, c2, d)."""
    sigma = np.array([1.0, -1.0, 1.0, -1.0])
    c2 = np.cos(2.0 * theta)
    s2 = np.sin(2.0 * theta)
    x = x0.copy()
    for _ in range(40):
        trig = x[0] + x[1] * c2 + x[2] * s2
        if np.any(trig <= 0.0):
            return None
        resid = fpts + 0.5 * np.log(trig) - sigma * x[3]
        if np.abs(resid).max() < 1e-15:
            return x
        jac = np.column_stack([0.5 / trig, 0.5 * c2 / trig, 0.5 * s2 / trig, -sigma])
        try:
            step = np.linalg.solve(jac, -resid)
        except np.linalg.LinAlgError:
            return None
        # damp until the trig form stays positive at the four points
        for _ in range(50):
            trial = x + step
            if np.all(trial[0] + trial[1] * c2 + trial[2] * s2 > 0.0):
                break
            step *= 0.5
        else:
            return None
        x = trial
        if np.abs(step).max() < 1e-16:
            break
    return x


def _polish(gauge, grid, fvals, params, defect, opts: SolverOptions):
    """Remez-style exchange from the bisection output; returns the better result.

    Each round re-solves the four-point equioscillation system at the current
    alternation points and relocates them globally.  The exchange runs until
    the refined sup-norm of the iterate matches its equioscillation level
    (global optimality, not just a stable level) or the iterate stops moving.
    """
    best_params, best_defect = params, defect
    iterations = 0
    cur = params
    level = None
    for _ in range(30):
        h = _deviation_fn(gauge, cur)
        scan = _refined_extrema(h, grid, fvals + 0.5 * np.log(cur.trig(grid)))
        if scan.sup < best_defect:
            best_params, best_defect = cur, scan.sup
        if level is not None and scan.sup - level <= 0.25 * opts.cert_tol:
            break
        ref = _alternating_reference(scan)
        if ref is None:
            break
        theta, d_est = ref
        x0 = np.array([*cur.triple(), d_est])
        x = _newton_equioscillation(gauge.log_eval(theta), theta, x0)
        iterations += 1
        if x is None or not np.isfinite(x).all() or x[3] < -opts.cert_tol:
            break
        if not in_cone(x[0], x[1], x[2]):
            break
        new = EllipseParams(x[0], x[1], x[2])
        step = max(abs(a - b) for a, b in zip(new.triple(), cur.triple()))
        cur, level = new, max(x[3], 0.0)
        if step <= 1e-15 * max(1.0, cur.a2):
            # fixed point of the exchange; record its honest sup and stop
            h = _deviation_fn(gauge, cur)
            scan = _refined_extrema(h, grid, fvals + 0.5 * np.log(cur.trig(grid)))
            if scan.sup < best_defect:
                best_params, best_defect = cur, scan.sup
            break
    return best_params, best_defect, iterations


def solve_uniform(gauge: Gauge, opts: Optional[SolverOptions] = None) -> UniformSolution:
    """Best uniform approximation of f = log r over the ellipse family.

    Bisects the deviation level d between 0 and the constant-ellipse baseline
    (half the oscillation of f, always feasible), querying the max-margin LP
    at each level.  The feasible-side endpoint and its LP triple are then
    optionally sharpened by extremum refinement and the Remez-style polish,
    and the four-point certificate is attached.
    """
    opts = opts or SolverOptions()
    grid = evaluation_grid(gauge, opts.grid_size)
    fvals = gauge.log_eval(grid)
    diag = SolveDiagnostics(grid_points=grid.size)

    problem = _FeasibilityProblem(grid, fvals, opts.seed)
    d_hi = 0.5 * float(fvals.max() - fvals.min()) * (1.0 + 1e-12) + 1e-15
    params, _ = problem.solve(d_hi)
    if params is None:
        # the baseline is feasible in exact arithmetic; absorb LP rounding
        d_hi += max(1e-12, 1e-9 * d_hi)
        params, _ = problem.solve(d_hi)
    if params is None:
        raise NoConvergence(
            f"constant-ellipse baseline level {d_hi} unexpectedly infeasible"
        )

    lo, hi = 0.0, d_hi
    if d_hi > opts.bisect_tol:
        while hi - lo > opts.bisect_tol:
            if diag.bisect_iterations >= opts.max_bisect:
                diag.lp_calls = problem.lp_calls
                raise NoConvergence(
                    f"bisection bracket {hi - lo:g} still above tolerance "
                    f"{opts.bisect_tol:g} after {opts.max_bisect} iterations"
                )
            mid = 0.5 * (lo + hi)
            cand, _ = problem.solve(mid)
            if cand is not None:
                hi, params = mid, cand
            else:
                lo = mid
            diag.bisect_iterations += 1
    diag.bracket_width = hi - lo
    diag.lp_calls = problem.lp_calls
    defect = hi

    if opts.refine or opts.polish:
        h = _deviation_fn(gauge, params)
        defect = _refined_extrema(h, grid, fvals + 0.5 * np.log(params.trig(grid))).sup

    if opts.polish and defect > opts.cert_tol:
        params, defect, polish_iters = _polish(gauge, grid, fvals, params, defect, opts)
        diag.polish_iterations = polish_iters
        diag.polished = polish_iters > 0

    h = _deviation_fn(gauge, params)
    scan = _refined_extrema(h, grid, fvals + 0.5 * np.log(params.trig(grid)))
    defect = max(defect, scan.sup) if (opts.refine or opts.polish) else defect
    cert = _certificate_from_scan(h, scan, opts.cert_tol)
    return UniformSolution(params, float(defect), cert, diag)


def to_one_sided(gauge: Gauge, sol: UniformSolution, grid_size: int = 4096) -> OneSidedSolution:
    """Shift the uniform solution to the inscribed side: g - d <= f.

    Lowering g by the defect scales the trig triple by exp(2*defect); the
    one-sided value is 2*defect.
    """
    factor = math.exp(2.0 * sol.defect)
    shifted = sol.params.scaled(factor)
    grid = evaluation_grid(gauge, grid_size)
    h = _deviation_fn(gauge, shifted)(grid)
    return OneSidedSolution(
        params=shifted,
        value=2.0 * sol.defect,
        max_deviation=float(h.max()),
        min_deviation=float(h.min()),
    )


def distance(gauge: Gauge, opts: Optional[SolverOptions] = None) -> float:
    """Multiplicative distance of the body's normed plane to the Euclidean plane."""
    return math.exp(2.0 * solve_uniform(gauge, opts).defect)
