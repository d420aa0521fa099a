"""Capacity regions: the two-way rectangle and the MA/DBC region (sum-rate
constraint plus an auxiliary-variable broadcast boundary).

The broadcast boundary is traced by scalarizing the two rates with weights
lambda in [0, 1] and maximizing over the auxiliary input by multi-start
projected coordinate search; an independent simplex-grid oracle guards
against local optima. Membership uses the upper concave envelope of the
sampled boundary, which realizes time sharing.
"""

import json
from dataclasses import dataclass

import numpy as np

from .alphabet import convolve_pmf
from .coding import EnumerationCapError
from .noise import DelayedCopyPair, entropy_rate
from .seeds import derive_rng


class AuxiliaryInput:
    """Cloud law p(u) with conditional input rows p(x3 | u); |U| <= q + 1."""

    def __init__(self, p_u, p_x3_given_u, q=None):
        pu = np.asarray(p_u, dtype=float)
        rows = np.asarray(p_x3_given_u, dtype=float)
        if rows.ndim != 2 or rows.shape[0] != pu.size:
            raise ValueError("conditional table must have one row per auxiliary symbol")
        q = rows.shape[1] if q is None else q
        if rows.shape[1] != q:
            raise ValueError("conditional rows must live on the channel alphabet")
        if pu.size > q + 1:
            raise ValueError(f"auxiliary cardinality {pu.size} exceeds q+1 = {q + 1}")
        if np.any(pu < 0) or abs(pu.sum() - 1.0) > 1e-9:
            raise ValueError("p(u) must be a probability vector")
        if np.any(rows < 0) or np.any(np.abs(rows.sum(axis=1) - 1.0) > 1e-9):
            raise ValueError("every p(x3|u) row must be a probability vector")
        self.p_u = pu / pu.sum()
        self.p_x3_given_u = rows / rows.sum(axis=1, keepdims=True)
        self.q = q

    @property
    def u_card(self):
        return self.p_u.size

    def to_dict(self):
        return {
            "p_u": [float(x) for x in self.p_u],
            "p_x3_given_u": [[float(x) for x in row] for row in self.p_x3_given_u],
        }


@dataclass(frozen=True)
class Rectangle2TWC:
    """Per-direction capacities of the two-way channel (a rectangle)."""

    q: int
    c1: float  # user 1 -> user 2
    c2: float  # user 2 -> user 1

    def contains(self, point, tol=1e-9):
        r1, r2 = point
        return (-tol <= r1 <= self.c1 + tol) and (-tol <= r2 <= self.c2 + tol)

    def to_dict(self):
        return {"kind": "2twc", "q": self.q, "c1": self.c1, "c2": self.c2}


@dataclass(frozen=True)
class BoundaryPoint:
    r31: float
    r32: float
    aux: AuxiliaryInput
    lam: float
    objective: float


class MaDbcRegion:
    """Sum-rate cap for the access direction plus a Pareto-sampled broadcast
    boundary; the two constraint groups share no rate variables."""

    def __init__(self, q, sum_rate, boundary):
        pts = sorted(boundary, key=lambda p: (p.r31, p.r32))
        for p in pts:
            if p.r31 < -1e-12 or p.r32 < -1e-12:
                raise ValueError("boundary rates must be nonnegative")
        for a, b in zip(pts, pts[1:]):
            if b.r32 > a.r32 + 1e-12 and b.r31 >= a.r31 - 1e-12 and (a.r31, a.r32) != (b.r31, b.r32):
                # sorted ascending in r31: r32 must not increase, else a dominates nothing
                raise ValueError("boundary points are not Pareto-consistent")
        self.q = q
        self.sum_rate = float(sum_rate)
        self.boundary = pts
        xy = np.array([[p.r31, p.r32] for p in pts]) if pts else np.zeros((0, 2))
        self._hull = upper_concave_hull(xy)

    def contains(self, point, tol=1e-9):
        r13, r23, r31, r32 = point
        if min(r13, r23, r31, r32) < -tol:
            return False
        if r13 + r23 > self.sum_rate + tol:
            return False
        max_r31 = self._hull[-1, 0] if len(self._hull) else 0.0
        if r31 > max_r31 + tol:
            return False
        return r32 <= hull_value(self._hull, min(r31, max_r31)) + tol

    def to_dict(self):
        return {
            "kind": "madbc",
            "q": self.q,
            "sum_rate": self.sum_rate,
            "boundary": [
                {"r31": p.r31, "r32": p.r32, "lambda": p.lam, **p.aux.to_dict()}
                for p in self.boundary
            ],
        }

    def to_json(self):
        return json.dumps(self.to_dict(), sort_keys=True)


def upper_concave_hull(points):
    """Vertices of the upper concave envelope, sorted by x (monotone chain)."""
    pts = np.asarray(points, dtype=float)
    if len(pts) == 0:
        return np.zeros((0, 2))
    order = np.lexsort((-pts[:, 1], pts[:, 0]))
    pts = pts[order]
    hull = []
    for x, y in pts:
        if hull and hull[-1][0] == x:
            continue  # same abscissa: the sort put the higher y first
        while len(hull) >= 2:
            (x1, y1), (x2, y2) = hull[-2], hull[-1]
            if (x2 - x1) * (y - y1) - (y2 - y1) * (x - x1) >= 0:
                hull.pop()  # middle vertex lies on or below the chord
            else:
                break
        hull.append((x, y))
    return np.array(hull)


def hull_value(hull, x):
    """Envelope height at abscissa x (clamped to the hull's x-range)."""
    if len(hull) == 0:
        return 0.0
    return float(np.interp(x, hull[:, 0], hull[:, 1]))


def pareto_filter(points):
    """Non-dominated subset of an (N, 2) array, sorted by ascending first coord."""
    pts = np.asarray(points, dtype=float)
    if len(pts) == 0:
        return pts
    order = np.lexsort((-pts[:, 1], -pts[:, 0]))
    pts = pts[order]
    keep = []
    best = -np.inf
    for x, y in pts:
        if y > best:
            keep.append((x, y))
            best = y
    return np.array(keep[::-1])


def region_2twc(noise1, noise2=None):
    """Two-way capacity rectangle from the per-direction noise entropy rates.

    Accepts either two noise models or a single DelayedCopyPair (whose
    marginal rates are both log2(q), giving the degenerate (0, 0) rectangle).
    """
    if isinstance(noise1, DelayedCopyPair):
        if noise2 is not None:
            raise ValueError("a DelayedCopyPair already specifies both directions")
        h1, h2 = noise1.marginal_entropy_rates()
        q = noise1.q
    else:
        if noise1.q != noise2.q:
            raise ValueError(f"alphabet mismatch: {noise1.q} vs {noise2.q}")
        h1, h2 = entropy_rate(noise1), entropy_rate(noise2)
        q = noise1.q
    logq = np.log2(q)
    return Rectangle2TWC(q=q, c1=float(logq - h2), c2=float(logq - h1))


def sum_rate_mac(q, noise3):
    """Access-direction sum-rate bound log2(q) - entropy rate of z3."""
    if noise3.q != q:
        raise ValueError("noise alphabet does not match q")
    return float(np.log2(q) - entropy_rate(noise3))


class _DbcKernel:
    """Precomputed tables for fast (r31, r32) evaluation on one noise pair."""

    def __init__(self, q, z1, z12):
        self.q = q
        i = np.arange(q)
        shift = (i[None, :] - i[:, None]) % q  # [x, y] -> y - x
        self.M1 = np.asarray(z1, dtype=float)[shift]
        self.M12 = np.asarray(z12, dtype=float)[shift]
        self.h_z1 = _entropy_rows(np.asarray(z1, dtype=float)[None, :])[0]

    def rate_pair(self, p_u, rows):
        A = rows @ self.M1  # laws of x3 + z1 given u
        B = rows @ self.M12  # laws of x3 + z1 + z2 given u
        r31 = float(p_u @ _entropy_rows(A) - self.h_z1)
        mix = p_u @ B
        r32 = float(_entropy_rows(mix[None, :])[0] - p_u @ _entropy_rows(B))
        return max(0.0, r31), max(0.0, r32)

    def objective(self, lam, p_u, rows):
        r31, r32 = self.rate_pair(p_u, rows)
        return lam * r32 + (1.0 - lam) * r31


def _entropy_rows(P):
    out = np.zeros(P.shape[0])
    mask = P > 0
    logs = np.zeros_like(P)
    logs[mask] = np.log2(P[mask])
    np.negative((P * logs).sum(axis=1), out=out)
    return out


def dbc_rate_pair(aux, pmf_z1, pmf_z2):
    """Rate pair (r31, r32) of one auxiliary input on the degraded pair.

    r31 = I(X3; X3+Z1 | U) and r32 = I(U; X3+Z1+Z2), both in bits.
    """
    if pmf_z1.q != pmf_z2.q or aux.q != pmf_z1.q:
        raise ValueError("alphabet mismatch between auxiliary input and noises")
    z12 = convolve_pmf(pmf_z1, pmf_z2)
    kernel = _DbcKernel(aux.q, pmf_z1.probs, z12.probs)
    return kernel.rate_pair(aux.p_u, aux.p_x3_given_u)


def _project_simplex(v):
    """Euclidean projection onto the probability simplex."""
    u = np.sort(v)[::-1]
    css = np.cumsum(u) - 1.0
    rho = np.nonzero(u * np.arange(1, len(v) + 1) > css)[0][-1]
    theta = css[rho] / (rho + 1.0)
    return np.maximum(v - theta, 0.0)


def _coordinate_search(kernel, lam, p_u, rows, tol=1e-8):
    """Projected coordinatewise pattern search from one starting point."""
    p_u = p_u.copy()
    rows = rows.copy()
    best = kernel.objective(lam, p_u, rows)
    k, q = rows.shape
    delta = 0.25
    while delta > 1e-6:
        improved_at_delta = True
        while improved_at_delta:
            improved_at_delta = False
            for j in range(k):
                for sgn in (1.0, -1.0):
                    cand = p_u.copy()
                    cand[j] += sgn * delta
                    cand = _project_simplex(cand)
                    val = kernel.objective(lam, cand, rows)
                    if val > best + tol:
                        p_u, best, improved_at_delta = cand, val, True
            for u in range(k):
                for x in range(q):
                    for sgn in (1.0, -1.0):
                        cand = rows[u].copy()
                        cand[x] += sgn * delta
                        cand = _project_simplex(cand)
                        val = kernel.objective(lam, p_u, np.vstack([rows[:u], cand[None, :], rows[u + 1 :]]))
                        if val > best + tol:
                            rows = np.vstack([rows[:u], cand[None, :], rows[u + 1 :]])
                            best, improved_at_delta = val, True
        delta *= 0.5
    return p_u, rows, best


def _endpoint_seeds(q, u_card):
    """Analytic optima: constant cloud + uniform input, and cloud = input."""
    seeds = []
    pu = np.zeros(u_card)
    pu[0] = 1.0
    rows = np.full((u_card, q), 1.0 / q)
    seeds.append((pu, rows))
    pu = np.zeros(u_card)
    pu[:q] = 1.0 / q
    rows = np.full((u_card, q), 1.0 / q)
    for u in range(q):
        rows[u] = 0.0
        rows[u, u] = 1.0
    seeds.append((pu, rows))
    return seeds


def dbc_boundary(q, pmf_z1, pmf_z2, lambda_grid=None, n_starts=32, seed=0, u_card=None, tol=1e-8, refine_tol=2e-4, max_refine=48):
    """Pareto-sampled broadcast boundary with achieving distributions.

    For each weight the scalarized rate lam*r32 + (1-lam)*r31 is maximized
    over auxiliary inputs of cardinality q+1 by multi-start projected
    coordinate search (two analytic seeds are always included). With the
    default grid of 21 weights the frontier is then refined sandwich-style:
    wherever the chord between adjacent support points can still be pushed up
    by more than refine_tol, the chord-normal weight is solved as well
    (warm-started from the chord endpoints), up to max_refine extra weights.
    All local optima across all weights are pooled and Pareto-filtered.
    """
    if pmf_z1.q != q or pmf_z2.q != q:
        raise ValueError("noise alphabets must match q")
    base_grid = np.linspace(0.0, 1.0, 21) if lambda_grid is None else np.asarray(lambda_grid, dtype=float)
    u_card = q + 1 if u_card is None else u_card
    z12 = convolve_pmf(pmf_z1, pmf_z2)
    kernel = _DbcKernel(q, pmf_z1.probs, z12.probs)

    candidates = []

    def solve(lam, lam_key, extra_starts=(), randoms=n_starts):
        starts = list(_endpoint_seeds(q, u_card)) + list(extra_starts)
        rng = derive_rng(seed, lam_key)
        for _ in range(randoms):
            starts.append((rng.dirichlet(np.ones(u_card)), rng.dirichlet(np.ones(q), size=u_card)))
        best = None
        for p_u0, rows0 in starts:
            p_u, rows, val = _coordinate_search(
                kernel, lam, np.asarray(p_u0, float), np.asarray(rows0, float), tol=tol
            )
            r31, r32 = kernel.rate_pair(p_u, rows)
            pt = BoundaryPoint(r31, r32, AuxiliaryInput(p_u, rows, q=q), lam, val)
            candidates.append(pt)
            if best is None or val > best.objective:
                best = pt
        return best

    support = [solve(float(lam), li) for li, lam in enumerate(base_grid)]

    if lambda_grid is None and max_refine > 0:
        frontier_pts = sorted({(p.r31, p.r32): p for p in support}.values(), key=lambda p: p.r31)
        work = list(zip(frontier_pts, frontier_pts[1:]))
        budget = max_refine
        key = len(base_grid)
        while work and budget > 0:
            a, b = work.pop()
            dx = b.r31 - a.r31
            if dx < 1e-9:
                continue
            slope = (b.r32 - a.r32) / dx
            if slope >= 0:
                continue
            lam = 1.0 / (1.0 - slope)  # weight whose objective is constant along the chord
            budget -= 1
            new = solve(
                lam,
                key,
                extra_starts=[(a.aux.p_u, a.aux.p_x3_given_u), (b.aux.p_u, b.aux.p_x3_given_u)],
                randoms=min(8, n_starts),
            )
            key += 1
            chord_val = lam * a.r32 + (1.0 - lam) * a.r31
            if new.objective > chord_val + refine_tol and a.r31 < new.r31 < b.r31:
                work.append((a, new))
                work.append((new, b))

    frontier = pareto_filter([[c.r31, c.r32] for c in candidates])
    by_xy = {}
    for c in candidates:
        by_xy.setdefault((c.r31, c.r32), c)
    return [by_xy[(x, y)] for x, y in frontier]


def dbc_brute_force_oracle(q, pmf_z1, pmf_z2, grid_step, u_card=None, max_points=2_000_000):
    """Pareto frontier of auxiliary inputs enumerated on a simplex grid.

    Independent check on dbc_boundary. The cloud alphabet defaults to q
    symbols: for the frontier of a degraded pair no more cloud symbols than
    input letters are needed, and the hull comparison supplies the
    convexification the extra q+1-th symbol would.
    """
    if grid_step < 0.01:
        raise ValueError("grid_step below 0.01 is not supported")
    if pmf_z1.q != q or pmf_z2.q != q:
        raise ValueError("noise alphabets must match q")
    u_card = q if u_card is None else u_card
    z12 = convolve_pmf(pmf_z1, pmf_z2)
    kernel = _DbcKernel(q, pmf_z1.probs, z12.probs)

    rows_grid = _simplex_grid(q, grid_step)  # (Nr, q)
    pu_grid = _simplex_grid(u_card, grid_step)  # (Npu, u_card)
    n_row_combos = len(rows_grid) ** u_card
    total = len(pu_grid) * n_row_combos
    if total > max_points:
        raise EnumerationCapError(
            f"grid enumerates {total} auxiliary inputs, cap is {max_points}"
        )

    HA = _entropy_rows(rows_grid @ kernel.M1)
    B = rows_grid @ kernel.M12
    HB = _entropy_rows(B)

    combo = np.indices((len(rows_grid),) * u_card).reshape(u_card, -1)  # (u_card, Nc)
    ha = HA[combo]  # (u_card, Nc)
    hb = HB[combo]
    frontier = np.zeros((0, 2))
    for pu in pu_grid:
        r31 = pu @ ha - kernel.h_z1
        mix = np.tensordot(pu, B[combo], axes=(0, 0))  # mixture law per combo
        r32 = _entropy_rows(mix) - pu @ hb
        pts = np.column_stack([np.maximum(r31, 0.0), np.maximum(r32, 0.0)])
        frontier = pareto_filter(np.vstack([frontier, pareto_filter(pts)]))
    return frontier


def _simplex_grid(dim, step):
    """All probability vectors of length dim whose entries are multiples of step."""
    m = int(round(1.0 / step))
    if abs(m * step - 1.0) > 1e-9:
        raise ValueError("grid_step must divide 1")
    out = []

    def rec(prefix, remaining, slots):
        if slots == 1:
            out.append(prefix + [remaining])
            return
        for v in range(remaining + 1):
            rec(prefix + [v], remaining - v, slots - 1)

    rec([], m, dim)
    return np.asarray(out, dtype=float) / m


def region_contains(region, point, tol=1e-9):
    """Membership test dispatching on the region kind."""
    if isinstance(region, Rectangle2TWC):
        if len(point) != 2:
            raise ValueError("two-way region points are rate pairs")
        return region.contains(point, tol)
    if isinstance(region, MaDbcRegion):
        if len(point) != 4:
            raise ValueError("MA/DBC region points are rate quadruples")
        return region.contains(point, tol)
    raise TypeError(f"unknown region type {type(region)!r}")


def madbc_region(q, noise3, pmf_z1, pmf_z2, lambda_grid=None, n_starts=32, seed=0):
    """Full MA/DBC region: sum-rate constraint plus sampled broadcast boundary."""
    return MaDbcRegion(
        q,
        sum_rate_mac(q, noise3),
        dbc_boundary(q, pmf_z1, pmf_z2, lambda_grid=lambda_grid, n_starts=n_starts, seed=seed),
    )
