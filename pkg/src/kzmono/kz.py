"""The flat connection on tensor invariants over configuration space, its
algebraic flatness certificate, and braid monodromy by parallel transport.

The connection matrices are A_i(z) = (1/kappa) sum_{j != i} W_ij/(z_i - z_j)
with W_ij the restricted two-site Casimir operators. Flatness is certified
algebraically: [W_ij, W_ik + W_jk] = 0 for distinct i, j, k and [W_ij, W_kl]
= 0 for disjoint pairs, evaluated in exact arithmetic. Transport solves
dF/dt = (sum_i zdot_i A_i(z(t))) F with an embedded 5(4) pair whose step is
additionally capped by a fraction of the current minimum pairwise distance.
"""

from __future__ import annotations

import cmath
import itertools
import math
import warnings
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .errors import ConsistencyError, DomainError, SingularityError
from .invariants import invariant_basis, omega_pair, restrict, tensor_system
from .liealg import weight_form
from .numerics import (
    exact_rank,
    ode_transport,
    rat_commutator,
    rat_add,
    rat_max_abs,
    rat_to_complex,
)
from .reps import casimir_value, irrep, tensor_decompose

# step cap relative to the minimum pairwise distance among the z_i
PROXIMITY_STEP_FACTOR = 0.1
# minimum samples for one full revolution of an arc at tight tolerances
ARC_MIN_SAMPLES = 720


@dataclass(eq=False)
class KZSystem:
    algebra: object
    weights: list
    kappa: complex
    invariant_space: object
    omegas: dict              # (i, j), i < j -> exact restricted matrix
    n: int

    @property
    def dim(self):
        return self.invariant_space.dim

    def omega(self, i, j):
        return self.omegas[(min(i, j), max(i, j))]

    def omega_complex(self, i, j):
        key = (min(i, j), max(i, j))
        cache = getattr(self, "_cplx", None)
        if cache is None:
            cache = {}
            self._cplx = cache
        if key not in cache:
            cache[key] = rat_to_complex(self.omegas[key]) if self.dim else np.zeros((0, 0))
        return cache[key]


def kz_system(alg, weights, kappa, level=None):
    """Assemble the connection data for the given factors at parameter kappa.

    ``level``, when given, only triggers a warning for weights outside the
    level constraint; the connection itself is defined for any weights.
    """
    kappa = complex(kappa)
    if kappa == 0:
        raise DomainError("kappa must be nonzero")
    weights = [tuple(w) for w in weights]
    if level is not None:
        theta = alg.highest_root
        for w in weights:
            if weight_form(alg, w, theta) > level:
                warnings.warn(
                    f"weight {w} exceeds the level-{level} constraint",
                    stacklevel=2,
                )
    reps = [irrep(alg, w) for w in weights]
    sys = tensor_system(reps)
    inv = invariant_basis(sys, "exact")
    omegas = {}
    for i, j in itertools.combinations(range(len(weights)), 2):
        omegas[(i, j)] = restrict(omega_pair(sys, i, j), inv)
    return KZSystem(
        algebra=alg,
        weights=weights,
        kappa=kappa,
        invariant_space=inv,
        omegas=omegas,
        n=len(weights),
    )


# ---------------------------------------------------------------------------
# configuration paths
# ---------------------------------------------------------------------------

@dataclass
class LineSegment:
    start: tuple
    end: tuple

    def at(self, t):
        return tuple(a + t * (b - a) for a, b in zip(self.start, self.end))

    def velocity(self, t):
        return tuple(b - a for a, b in zip(self.start, self.end))

    @property
    def endpoint(self):
        return self.end

    @property
    def startpoint(self):
        return self.start

    def revolutions(self):
        return 0.0


@dataclass
class ArcSegment:
    """One coordinate sweeps a circular arc; the others stand still."""

    fixed: tuple              # full configuration with the moving slot ignored
    moving: int
    center: complex
    radius: float
    angle0: float
    sweep: float

    def at(self, t):
        z = list(self.fixed)
        z[self.moving] = self.center + self.radius * cmath.exp(
            1j * (self.angle0 + t * self.sweep)
        )
        return tuple(z)

    def velocity(self, t):
        v = [0j] * len(self.fixed)
        v[self.moving] = (
            1j
            * self.sweep
            * self.radius
            * cmath.exp(1j * (self.angle0 + t * self.sweep))
        )
        return tuple(v)

    @property
    def startpoint(self):
        return self.at(0.0)

    @property
    def endpoint(self):
        return self.at(1.0)

    def revolutions(self):
        return abs(self.sweep) / (2 * math.pi)


def min_pair_distance(z):
    return min(
        abs(a - b) for a, b in itertools.combinations(z, 2)
    )


@dataclass
class ConfigPath:
    segments: list

    def __post_init__(self):
        if not self.segments:
            raise DomainError("a path needs at least one segment")
        for a, b in zip(self.segments, self.segments[1:]):
            gap = max(abs(x - y) for x, y in zip(a.endpoint, b.startpoint))
            if gap > 1e-9:
                raise DomainError(f"path segments do not chain (gap {gap:.3e})")
        for seg in self.segments:
            for t in [k / 32 for k in range(33)]:
                z = seg.at(t)
                d = min_pair_distance(z)
                if d <= 1e-12:
                    pair = min(
                        itertools.combinations(range(len(z)), 2),
                        key=lambda p: abs(z[p[0]] - z[p[1]]),
                    )
                    raise SingularityError(
                        f"path touches the diagonal z_{pair[0]+1} = z_{pair[1]+1}"
                    )

    @property
    def start(self):
        return self.segments[0].startpoint

    @property
    def end(self):
        return self.segments[-1].endpoint

    def reversed(self):
        return ConfigPath([_reverse_segment(s) for s in reversed(self.segments)])


def _reverse_segment(seg):
    if isinstance(seg, LineSegment):
        return LineSegment(seg.end, seg.start)
    return ArcSegment(
        fixed=seg.fixed,
        moving=seg.moving,
        center=seg.center,
        radius=seg.radius,
        angle0=seg.angle0 + seg.sweep,
        sweep=-seg.sweep,
    )


def path_through(points):
    """Piecewise-linear path through a list of configurations."""
    return ConfigPath(
        [LineSegment(tuple(a), tuple(b)) for a, b in zip(points, points[1:])]
    )


# ---------------------------------------------------------------------------
# connection and transport
# ---------------------------------------------------------------------------

def connection_matrix(sys, i, z):
    """A_i(z) = (1/kappa) sum_{j != i} W_ij / (z_i - z_j), complex dense."""
    z = tuple(complex(x) for x in z)
    if len(z) != sys.n:
        raise DomainError(f"expected {sys.n} coordinates, got {len(z)}")
    for p, q in itertools.combinations(range(sys.n), 2):
        if z[p] == z[q]:
            raise SingularityError(f"coincident coordinates z_{p+1} = z_{q+1}")
    d = sys.dim
    out = np.zeros((d, d), dtype=complex)
    for j in range(sys.n):
        if j == i:
            continue
        out += sys.omega_complex(i, j) / (z[i] - z[j])
    return out / complex(sys.kappa)


def flatness_residual(sys, exact=True):
    """Max norm over the commutator relation set certifying flatness.

    Relations: [W_ij, W_ik + W_jk] for distinct i, j, k, and [W_ij, W_kl]
    for disjoint pairs. Vacuously zero for n = 2.
    """
    d = sys.dim
    if sys.n < 3 or d == 0:
        return Fraction(0) if exact else 0.0

    def om(i, j):
        return sys.omega(i, j) if exact else sys.omega_complex(i, j)

    worst = Fraction(0) if exact else 0.0
    for i, j, k in itertools.combinations(range(sys.n), 3):
        for a, b, c in ((i, j, k), (i, k, j), (j, k, i)):
            if exact:
                comm = rat_commutator(om(a, b), rat_add(om(a, c), om(b, c)))
                worst = max(worst, rat_max_abs(comm))
            else:
                x = om(a, b)
                y = om(a, c) + om(b, c)
                worst = max(worst, float(np.max(np.abs(x @ y - y @ x))))
    for (i, j), (k, l) in itertools.combinations(
        itertools.combinations(range(sys.n), 2), 2
    ):
        if {i, j} & {k, l}:
            continue
        if exact:
            comm = rat_commutator(om(i, j), om(k, l))
            worst = max(worst, rat_max_abs(comm))
        else:
            x, y = om(i, j), om(k, l)
            worst = max(worst, float(np.max(np.abs(x @ y - y @ x))))
    return worst


@dataclass
class HolonomyResult:
    matrix: np.ndarray
    estimated_error: float
    steps_taken: int


def parallel_transport(sys, path, tol):
    """Transport the identity frame along the path.

    Returns the fundamental solution of dF/dt = (sum_i zdot_i A_i) F at the
    endpoint, the accumulated local error estimate and the step count.
    """
    if not (0 < tol <= 1e-2):
        raise DomainError(f"tol must lie in (0, 1e-2], got {tol!r}")
    d = sys.dim
    f = np.eye(d, dtype=complex)
    if d == 0:
        return HolonomyResult(matrix=f, estimated_error=0.0, steps_taken=0)
    err = 0.0
    steps = 0
    seg_tol = tol / len(path.segments)
    kap = complex(sys.kappa)
    for seg in path.segments:

        def field(t, seg=seg):
            z = seg.at(t)
            v = seg.velocity(t)
            mind = min_pair_distance(z)
            if mind <= 1e-12:
                raise SingularityError("transport hit a diagonal")
            a = np.zeros((d, d), dtype=complex)
            for i, j in itertools.combinations(range(sys.n), 2):
                dv = v[i] - v[j]
                if dv != 0:
                    a += sys.omega_complex(i, j) * (dv / (z[i] - z[j]))
            return a / kap

        def cap(t, seg=seg):
            z = seg.at(t)
            v = seg.velocity(t)
            speed = max(abs(x) for x in v)
            if speed == 0:
                return math.inf
            c = PROXIMITY_STEP_FACTOR * min_pair_distance(z) / speed
            rev = seg.revolutions()
            if rev > 0 and tol <= 1e-8:
                c = min(c, 1.0 / (ARC_MIN_SAMPLES * rev))
            return c

        try:
            f, e, s = ode_transport(field, 0.0, 1.0, f, seg_tol, max_step=cap)
        except SingularityError as exc:
            zs = seg.startpoint
            raise SingularityError(
                f"{exc} (segment starting at {zs}, min distance "
                f"{min_pair_distance(zs):.3e})"
            ) from exc
        err += e
        steps += s
    return HolonomyResult(matrix=f, estimated_error=err, steps_taken=steps)


def compose(first, second):
    """Holonomy of 'first then second' as a single result."""
    return HolonomyResult(
        matrix=second.matrix @ first.matrix,
        estimated_error=first.estimated_error + second.estimated_error,
        steps_taken=first.steps_taken + second.steps_taken,
    )


# ---------------------------------------------------------------------------
# braid generators
# ---------------------------------------------------------------------------

def default_basepoint(n):
    return tuple(complex(k) for k in range(1, n + 1))


def _clearance(points, k):
    return 0.5 * min(abs(points[l] - points[k]) for l in range(len(points)) if l != k)


def _detour_segments(points, moving, start, end):
    """Move one coordinate from start to end, arcing below any obstruction.

    Obstructing fixed points get a semicircular detour through their lower
    side, which realizes the standard convention that the travelling strand
    passes in front of intermediate ones.
    """
    obstacles = []
    d = end - start
    length = abs(d)
    if length == 0:
        return []
    u = d / length
    for k, p in enumerate(points):
        if k == moving:
            continue
        s = ((p - start) / u).real
        if 0 < s < length:
            perp = abs(p - (start + s * u))
            r = _clearance(points, k)
            if perp < r:
                obstacles.append((s, k, r))
    obstacles.sort()
    segs = []
    cur = start
    cfg = list(points)

    def line_to(z):
        nonlocal cur
        if abs(z - cur) > 1e-15:
            a = list(cfg)
            b = list(cfg)
            a[moving] = cur
            b[moving] = z
            segs.append(LineSegment(tuple(a), tuple(b)))
            cur = z

    for s, k, r in obstacles:
        p = points[k]
        # chord entry/exit on the clearance circle around the obstacle
        mid = start + s * u
        half = math.sqrt(max(r * r - abs(p - mid) ** 2, 0.0))
        z_in = mid - half * u
        z_out = mid + half * u
        line_to(z_in)
        a_in = cmath.phase(z_in - p)
        a_out = cmath.phase(z_out - p)
        sweep = (a_out - a_in) % (2 * math.pi)
        sweep_ccw = sweep
        sweep_cw = sweep - 2 * math.pi
        # pick the sweep whose midpoint dips lower (below convention)
        mid_ccw = (p + r * cmath.exp(1j * (a_in + sweep_ccw / 2))).imag
        mid_cw = (p + r * cmath.exp(1j * (a_in + sweep_cw / 2))).imag
        sweep = sweep_cw if mid_cw < mid_ccw else sweep_ccw
        segs.append(
            ArcSegment(
                fixed=tuple(cfg),
                moving=moving,
                center=p,
                radius=r,
                angle0=a_in,
                sweep=sweep,
            )
        )
        cur = z_out
    line_to(end)
    return segs


def braid_generator_path(basepoint, i, j):
    """Loop realizing the pure-braid generator: z_j approaches z_i, circles
    it once counterclockwise at half the nearest-neighbor radius, returns."""
    points = tuple(complex(z) for z in basepoint)
    n = len(points)
    if not (0 <= i < n and 0 <= j < n) or i == j:
        raise DomainError("generator needs two distinct valid indices")
    zi, zj = points[i], points[j]
    rho = _clearance(points, i)
    u = (zj - zi) / abs(zj - zi)
    entry = zi + rho * u
    approach = _detour_segments(points, j, zj, entry)
    cfg = list(points)
    cfg[j] = entry
    circle = ArcSegment(
        fixed=tuple(cfg),
        moving=j,
        center=zi,
        radius=rho,
        angle0=cmath.phase(u),
        sweep=2 * math.pi,
    )
    segs = approach + [circle] + [_reverse_segment(s) for s in reversed(approach)]
    return ConfigPath(segs)


def braid_monodromy(sys, i, j, tol, basepoint=None):
    """Holonomy of the standard pure-braid generator around (i, j)."""
    if basepoint is None:
        basepoint = default_basepoint(sys.n)
    path = braid_generator_path(basepoint, i, j)
    return parallel_transport(sys, path, tol)


def exact_local_spectrum(sys, i, j):
    """Eigenvalues (with multiplicity) of the restricted W_ij.

    Candidates mu = (c_nu - c_i - c_j)/2 run over the components nu of
    V_i (x) V_j; multiplicities come from exact rank computations, so the
    spectrum is certified, not floated.
    """
    alg = sys.algebra
    li, lj = sys.weights[i], sys.weights[j]
    comps = tensor_decompose(alg, li, lj)
    ci = casimir_value(alg, li)
    cj = casimir_value(alg, lj)
    d = sys.dim
    if d == 0:
        return []
    mat = sys.omega(i, j)
    cands = sorted({(casimir_value(alg, nu) - ci - cj) / 2 for nu in comps})
    out = []
    total = 0
    for mu in cands:
        shifted = [
            [mat[r][c] - (mu if r == c else 0) for c in range(d)]
            for r in range(d)
        ]
        rows = [
            {c: Fraction(x) for c, x in enumerate(row) if x} for row in shifted
        ]
        mult = d - exact_rank(rows, d)
        if mult:
            out.append((mu, mult))
            total += mult
    if total != d:
        raise ConsistencyError(
            "restricted two-site operator has eigenvalues outside the "
            "tensor-decomposition candidates"
        )
    return out


def eigenvalue_check(sys, i, j, tol, transport_tol=1e-8, basepoint=None):
    """Compare monodromy eigenvalue phases against exp(2 pi i mu / kappa).

    ``mu`` runs over the exact spectrum of the restricted W_ij. Returns a
    report dict with the max phase deviation and the matched pairs.
    """
    spec = exact_local_spectrum(sys, i, j)
    expected = []
    kap = complex(sys.kappa)
    for mu, mult in spec:
        expected.extend([cmath.exp(2j * math.pi * complex(mu) / kap)] * mult)
    if not expected:
        return {"max_deviation": 0.0, "pairs": [], "passed": True}
    hol = braid_monodromy(sys, i, j, transport_tol, basepoint=basepoint)
    got = sorted(np.linalg.eigvals(hol.matrix), key=lambda z: (z.real, z.imag))
    remaining = list(expected)
    pairs = []
    worst = 0.0
    for g in got:
        k = min(range(len(remaining)), key=lambda t: abs(remaining[t] - g))
        e = remaining.pop(k)
        dev = abs(e - g)
        pairs.append((e, complex(g), dev))
        worst = max(worst, dev)
    return {
        "max_deviation": worst,
        "pairs": pairs,
        "passed": worst < tol,
        "transport_error": hol.estimated_error,
    }
