"""Parameter-sweep drivers: witness curves, contours and region maps.

Every sweep evaluates the closed-form witness expansion on a deterministic
grid, refines sign-change boundaries by bisection, and re-verifies a seeded
1% of grid points against the independent direct route (output-state
assembly, partial transposition, LAPACK determinant).  Grid points are
independent pure evaluations; results are ordered by grid index, so reruns
with the same spec and seed are bit-identical.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field

import numpy as np

from .blockdet import adjugate, det2, det2_sum, det4_block, expand_full
from .channels import ChannelMoments, correlation_coefficients
from .errors import DomainError, MisuseError
from .sampling import random_state
from .states import GaussianState, asymmetric_tmsv, displace, partial_transpose, tmsv_state
from .witness import (
    cross_check_direct,
    duan_witness_correlated,
    witness_correlated,
    witness_expansion,
)

__all__ = [
    "SweepResult",
    "squeezing_sweep",
    "displacement_contour",
    "phase_region_map",
    "identity_suite",
]

# Default grid sizes: 1D sweeps, contour rays x radial steps, region maps.
SWEEP_POINTS = 201
CONTOUR_RAYS = 64
CONTOUR_STEPS = 400
REGION_CELLS = 101

_SPOT_FRACTION = 0.01
_SPOT_RTOL = 1e-9
_SPOT_ATOL = 1e-12


def _fmt(x) -> str:
    """Shortest round-trip decimal form; bit-identical across reruns."""
    return repr(float(x))


@dataclass
class SweepResult:
    """Grid axes, per-point value columns, located boundaries, metadata.

    axes maps axis name to its 1D grid; every column has shape
    tuple(len(g) for g in axes.values()), the w_atm column always exists.
    boundary is a list of uniform dicts (one per located root), and
    metadata records the resolved spec (no wall-clock data, so identical
    runs serialize identically).
    """

    axes: dict[str, np.ndarray]
    columns: dict[str, np.ndarray]
    boundary: list[dict] = field(default_factory=list)
    metadata: dict = field(default_factory=dict)

    def __post_init__(self):
        shape = tuple(len(g) for g in self.axes.values())
        for name, col in self.columns.items():
            if tuple(np.shape(col)) != shape:
                raise MisuseError(f"column {name!r} has shape {np.shape(col)}, grid is {shape}")

    @property
    def values(self) -> np.ndarray:
        return self.columns["w_atm"]

    def to_csv(self, path) -> None:
        """One row per grid point: axis values, then the value columns."""
        axis_names = list(self.axes)
        col_names = list(self.columns)
        mesh = np.meshgrid(*self.axes.values(), indexing="ij")
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(axis_names + col_names)
            flat_axes = [m.ravel() for m in mesh]
            flat_cols = [np.asarray(self.columns[c]).ravel() for c in col_names]
            for i in range(flat_axes[0].size):
                writer.writerow(
                    [_fmt(a[i]) for a in flat_axes] + [_fmt(c[i]) for c in flat_cols]
                )

    def boundary_to_csv(self, path) -> None:
        """Companion file with the bisection-refined roots."""
        keys: list[str] = []
        for entry in self.boundary:
            for k in entry:
                if k not in keys:
                    keys.append(k)
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(keys)
            for entry in self.boundary:
                writer.writerow([_fmt(entry.get(k, float("nan"))) for k in keys])


def _bisect(f, lo: float, hi: float, w_lo: float, w_hi: float, tol: float) -> float:
    """Certified bisection on a bracketing pair (signs already opposite)."""
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        w_mid = f(mid)
        if w_mid == 0.0:
            return mid
        if (w_lo < 0.0) != (w_mid < 0.0):
            hi, w_hi = mid, w_mid
        else:
            lo, w_lo = mid, w_mid
    return 0.5 * (lo + hi)


def _spot_check(states_channels, ws, seed: int):
    """Re-verify a seeded 1% of evaluations against the direct route."""
    n = len(ws)
    if n == 0:
        return 0
    k = max(1, int(round(_SPOT_FRACTION * n)))
    rng = np.random.default_rng(seed)
    idx = rng.choice(n, size=min(k, n), replace=False)
    for i in idx:
        state, channel = states_channels(int(i))
        direct = cross_check_direct(state, channel)
        if abs(direct - ws[i]) > max(_SPOT_ATOL, _SPOT_RTOL * max(abs(direct), abs(ws[i]))):
            raise RuntimeError(
                f"internal consistency failure at grid index {i}: "
                f"expansion {ws[i]!r} vs direct {direct!r}"
            )
    return len(idx)


def squeezing_sweep(
    channel: ChannelMoments,
    xi_range: tuple[float, float] = (0.0, 5.0),
    n_points: int = SWEEP_POINTS,
    displacement: tuple[complex, complex] | None = None,
    bisect_tol: float = 1e-8,
    seed: int = 0,
) -> SweepResult:
    """Witness vs squeezing for a (possibly displaced) two-mode squeezed input.

    Locates every sign change of w_atm(xi) on the grid and refines each root
    by bisection.  The metadata verdict distinguishes curves with boundaries
    from all-entangled and never-entangled ones.
    """
    lo, hi = float(xi_range[0]), float(xi_range[1])
    if not (0.0 <= lo < hi <= 10.0):
        raise DomainError(f"xi range must satisfy 0 <= lo < hi <= 10, got {xi_range!r}")
    if n_points < 2:
        raise DomainError("need at least two grid points")
    al, be = displacement if displacement is not None else (0.0, 0.0)

    xi_grid = np.linspace(lo, hi, int(n_points))

    def make_state(xi: float) -> GaussianState:
        return displace(tmsv_state(xi), al, be)

    reports = [witness_expansion(make_state(xi), channel) for xi in xi_grid]
    w = np.array([r.w_atm for r in reports])
    columns = {
        "w_atm": w,
        "term_loss": np.array([r.term_loss for r in reports]),
        "term_N": np.array([r.term_N for r in reports]),
        "term_F": np.array([r.term_F for r in reports]),
        "term_S": np.array([r.term_S for r in reports]),
    }

    def w_of(xi: float) -> float:
        return witness_expansion(make_state(xi), channel).w_atm

    boundary = []
    for i in range(len(xi_grid) - 1):
        if w[i] != 0.0 and w[i + 1] != 0.0 and (w[i] < 0.0) != (w[i + 1] < 0.0):
            root = _bisect(w_of, xi_grid[i], xi_grid[i + 1], w[i], w[i + 1], bisect_tol)
            boundary.append(
                {
                    "xi_star": root,
                    "bracket_lo": xi_grid[i],
                    "bracket_hi": xi_grid[i + 1],
                    "w_lo": w[i],
                    "w_hi": w[i + 1],
                }
            )

    # The vacuum endpoint xi = 0 sits exactly on the witness boundary for
    # undisplaced inputs, so verdicts describe the xi > 0 part of the grid.
    inner = w[xi_grid > 0.0]
    if boundary:
        range_verdict = "boundary found"
    elif np.all(inner < 0.0):
        range_verdict = "entangled on full range"
    elif np.all(inner > 0.0):
        range_verdict = "no entanglement anywhere"
    else:
        range_verdict = "indeterminate"

    checked = _spot_check(lambda i: (make_state(xi_grid[i]), channel), w, seed)
    gamma, dgamma = correlation_coefficients(channel)
    return SweepResult(
        axes={"xi": xi_grid},
        columns=columns,
        boundary=boundary,
        metadata={
            "sweep": "squeezing",
            "channel": {
                "t_a": channel.t_a, "t_b": channel.t_b,
                "t_a2": channel.t_a2, "t_b2": channel.t_b2, "t_ab": channel.t_ab,
            },
            "gamma": gamma,
            "delta_gamma": dgamma,
            "displacement": [
                [complex(al).real, complex(al).imag],
                [complex(be).real, complex(be).imag],
            ],
            "bisect_tol": bisect_tol,
            "range_verdict": range_verdict,
            "seed": seed,
            "spot_checked": checked,
            "witness_scale": 1.0,
        },
    )


def displacement_contour(
    channel: ChannelMoments,
    xi: float = 1.0,
    t2: float = 0.5,
    n_rays: int = CONTOUR_RAYS,
    n_radial: int = CONTOUR_STEPS,
    r_max: float = 10.0,
    bisect_tol: float = 1e-9,
    seed: int = 0,
) -> SweepResult:
    """Root contour of the witness in the complex displacement plane.

    The input family is the beam-splitter state (xi, t2) displaced in mode a
    along each phase ray; per ray the first radial sign change is refined by
    bisection.  Rays without a root inside r_max are reported as unbounded
    in the metadata, not treated as an error.
    """
    if n_rays < 1 or n_radial < 2 or not (r_max > 0.0):
        raise DomainError("contour grid must have rays, radial steps and r_max > 0")
    phases = np.linspace(0.0, 2.0 * np.pi, int(n_rays), endpoint=False)
    radii = np.linspace(0.0, float(r_max), int(n_radial))
    base = asymmetric_tmsv(xi, t2)

    def make_state(phase: float, r: float) -> GaussianState:
        return displace(base, r * np.exp(1j * phase), 0.0)

    w = np.empty((len(phases), len(radii)))
    for i, ph in enumerate(phases):
        for j, r in enumerate(radii):
            w[i, j] = witness_expansion(make_state(ph, r), channel).w_atm

    boundary = []
    unbounded = []
    for i, ph in enumerate(phases):
        root = None
        for j in range(len(radii) - 1):
            if w[i, j] != 0.0 and w[i, j + 1] != 0.0 and (w[i, j] < 0.0) != (w[i, j + 1] < 0.0):

                def w_of(r: float, ph=ph) -> float:
                    return witness_expansion(make_state(ph, r), channel).w_atm

                root = _bisect(w_of, radii[j], radii[j + 1], w[i, j], w[i, j + 1], bisect_tol)
                boundary.append(
                    {
                        "phase": ph,
                        "radius": root,
                        "bracket_lo": radii[j],
                        "bracket_hi": radii[j + 1],
                    }
                )
                break
        if root is None:
            unbounded.append(float(ph))

    def at_index(i: int):
        pi_, ri_ = divmod(i, len(radii))
        return make_state(phases[pi_], radii[ri_]), channel

    checked = _spot_check(at_index, w.ravel(), seed)
    gamma, dgamma = correlation_coefficients(channel)
    return SweepResult(
        axes={"phase": phases, "radius": radii},
        columns={"w_atm": w},
        boundary=boundary,
        metadata={
            "sweep": "displacement-contour",
            "state_family": {"xi": float(xi), "t2": float(t2)},
            "channel": {
                "t_a": channel.t_a, "t_b": channel.t_b,
                "t_a2": channel.t_a2, "t_b2": channel.t_b2, "t_ab": channel.t_ab,
            },
            "gamma": gamma,
            "delta_gamma": dgamma,
            "r_max": float(r_max),
            "bisect_tol": bisect_tol,
            "unbounded_rays": unbounded,
            "seed": seed,
            "spot_checked": checked,
            "witness_scale": 1.0,
        },
    )


def phase_region_map(
    channel: ChannelMoments,
    xi: float = 0.5,
    total_power: float = 50.0,
    n_power: int = REGION_CELLS,
    n_phase: int = REGION_CELLS,
    bisect_tol: float = 1e-8,
    seed: int = 0,
) -> SweepResult:
    """Entanglement map over displacement splitting and phase sum.

    For a perfectly correlated channel, sweep |<a>|^2 from 0 to the total
    power (with |<b>|^2 the remainder) against the phase sum of the two
    displacements, recording the witness, its boolean verdict, and the
    channel-independent persistent-region overlay of the correlated Duan
    test.  Individual phases are fixed to phi = chi = phase_sum / 2; for
    this input family the witness depends on the phases only through their
    sum.
    """
    gamma, dgamma = correlation_coefficients(channel)
    if abs(gamma - 1.0) > 1e-9 or abs(dgamma - 1.0) > 1e-9:
        raise MisuseError(
            f"region map needs a perfectly correlated channel, got "
            f"Gamma={gamma!r}, DeltaGamma={dgamma!r}"
        )
    if not (total_power > 0.0) or n_power < 2 or n_phase < 2:
        raise DomainError("region grid needs total_power > 0 and at least 2x2 cells")

    power_grid = np.linspace(0.0, float(total_power), int(n_power))
    phase_grid = np.linspace(-np.pi, np.pi, int(n_phase))
    base = tmsv_state(xi)

    def make_state(u: float, ps: float) -> GaussianState:
        half = np.exp(0.5j * ps)
        return displace(base, math.sqrt(u) * half, math.sqrt(total_power - u) * half)

    shape = (len(power_grid), len(phase_grid))
    w = np.empty(shape)
    t_loss = np.empty(shape)
    t_s = np.empty(shape)
    duan_val = np.empty(shape)
    duan_persist = np.empty(shape)
    for i, u in enumerate(power_grid):
        for j, ps in enumerate(phase_grid):
            st = make_state(u, ps)
            rep = witness_correlated(st, channel)
            w[i, j] = rep.w_atm
            t_loss[i, j] = rep.term_loss
            t_s[i, j] = rep.term_S
            duan_val[i, j], duan_persist[i, j] = duan_witness_correlated(st, channel)

    entangled = (w < 0.0).astype(int)
    persistent = (duan_persist < 0.0).astype(int)

    boundary = []
    for j, ps in enumerate(phase_grid):
        col = w[:, j]
        for i in range(len(power_grid) - 1):
            if col[i] != 0.0 and col[i + 1] != 0.0 and (col[i] < 0.0) != (col[i + 1] < 0.0):

                def w_of(u: float, ps=ps) -> float:
                    return witness_correlated(make_state(u, ps), channel).w_atm

                root = _bisect(w_of, power_grid[i], power_grid[i + 1], col[i], col[i + 1], bisect_tol)
                boundary.append({"phase_sum": ps, "alpha2": root})

    def at_index(k: int):
        i, j = divmod(k, len(phase_grid))
        return make_state(power_grid[i], phase_grid[j]), channel

    checked = _spot_check(at_index, w.ravel(), seed)
    return SweepResult(
        axes={"alpha2": power_grid, "phase_sum": phase_grid},
        columns={
            "w_atm": w,
            "term_loss": t_loss,
            "term_S": t_s,
            "entangled": entangled,
            "duan_value": duan_val,
            "duan_persistent": duan_persist,
            "persistent": persistent,
        },
        boundary=boundary,
        metadata={
            "sweep": "phase-region",
            "xi": float(xi),
            "total_power": float(total_power),
            "channel": {
                "t_a": channel.t_a, "t_b": channel.t_b,
                "t_a2": channel.t_a2, "t_b2": channel.t_b2, "t_ab": channel.t_ab,
            },
            "gamma": gamma,
            "delta_gamma": dgamma,
            "phase_convention": "phi = chi = phase_sum / 2",
            "bisect_tol": bisect_tol,
            "seed": seed,
            "spot_checked": checked,
            "witness_scale": 1.0,
        },
    )


# ---------------------------------------------------------------------------
# Identity suite: the algebra self-test battery
# ---------------------------------------------------------------------------


def _rand_block(rng) -> np.ndarray:
    return rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2))


def _rand_psd_pair(rng):
    """Random PSD 4x4 built as R_dag R, split into its 2x2 blocks."""
    R = rng.normal(size=(4, 4)) + 1j * rng.normal(size=(4, 4))
    M = R.conj().T @ R
    return M[:2, :2], M[2:, 2:], M[2:, :2]


def identity_suite(n: int = 10_000, n_psd: int = 1_000, seed: int = 0, rtol: float = 1e-10) -> dict:
    """Randomized self-test of the determinant calculus and PT construction.

    Checks the two determinant identities and the full rank-one expansion
    against brute-force determinants, the three positivity lemmas on PSD
    instances, the adjugate identity (including singular blocks), and the
    equality of the two partial-transposition forms on random states.
    Returns a report dict; every check carries its worst error and verdict.
    """
    rng = np.random.default_rng(seed)
    checks: dict[str, dict] = {}

    err = 0.0
    for _ in range(n):
        A, B = _rand_block(rng), _rand_block(rng)
        lhs = np.linalg.det(A + B)
        rhs = det2_sum(A, B)
        err = max(err, abs(lhs - rhs) / max(1.0, abs(lhs)))
    checks["det2_sum"] = {"max_rel_err": float(err), "pass": bool(err <= rtol)}

    err = 0.0
    for _ in range(n):
        A, B, C, D = (_rand_block(rng) for _ in range(4))
        lhs = np.linalg.det(np.block([[A, D], [C, B]]))
        rhs = det4_block(A, B, C, D)
        err = max(err, abs(lhs - rhs) / max(1.0, abs(lhs)))
    checks["det4_block"] = {"max_rel_err": float(err), "pass": bool(err <= rtol)}

    err = 0.0
    for _ in range(n):
        A, B = _rand_block(rng), _rand_block(rng)
        A, B = A + A.conj().T, B + B.conj().T
        C = _rand_block(rng)
        g = complex(rng.normal(), rng.normal()) / 2.0
        h = complex(rng.normal(), rng.normal()) / 2.0
        al = rng.normal(size=2) + 1j * rng.normal(size=2)
        be = rng.normal(size=2) + 1j * rng.normal(size=2)
        lhs = np.linalg.det(
            np.block(
                [
                    [A + np.outer(al, al.conj()), np.conj(g) * C.conj().T + np.conj(h) * np.outer(al, be.conj())],
                    [g * C + h * np.outer(be, al.conj()), B + np.outer(be, be.conj())],
                ]
            )
        )
        rhs = expand_full(A, B, C, g, h, al, be)
        err = max(err, abs(lhs - rhs) / max(1.0, abs(lhs)))
    checks["expand_full"] = {"max_rel_err": float(err), "pass": bool(err <= rtol)}

    floor = -1e-9
    worst = {"damped_cross": np.inf, "block_dets": np.inf, "quadratic_forms": np.inf}
    for _ in range(n_psd):
        A, B, C = _rand_psd_pair(rng)
        g = complex(rng.normal(), rng.normal())
        g /= max(1.0, abs(g))  # |g| <= 1
        M1 = np.block([[A, np.conj(g) * C.conj().T], [g * C, B]])
        worst["damped_cross"] = min(worst["damped_cross"], float(np.linalg.eigvalsh(M1).min()))
        M2 = np.array([[det2(A), np.conj(det2(C))], [det2(C), det2(B)]])
        worst["block_dets"] = min(worst["block_dets"], float(np.linalg.eigvalsh(M2).min()))
        al = rng.normal(size=2) + 1j * rng.normal(size=2)
        be = rng.normal(size=2) + 1j * rng.normal(size=2)
        M3 = np.array(
            [
                [al.conj() @ A @ al, al.conj() @ C.conj().T @ be],
                [be.conj() @ C @ al, be.conj() @ B @ be],
            ]
        )
        worst["quadratic_forms"] = min(worst["quadratic_forms"], float(np.linalg.eigvalsh(M3).min()))
    for name, eigmin in worst.items():
        checks[f"psd_{name}"] = {"min_eigenvalue": float(eigmin), "pass": bool(eigmin >= floor)}

    err = 0.0
    for _ in range(200):
        C = _rand_block(rng)
        err = max(err, float(np.max(np.abs(adjugate(C) @ C - det2(C) * np.eye(2)))))
        v = rng.normal(size=2) + 1j * rng.normal(size=2)
        S = np.outer(v, v.conj())  # singular rank-1
        err = max(err, float(np.max(np.abs(adjugate(S) @ S - det2(S) * np.eye(2)))))
    checks["adjugate"] = {"max_abs_err": float(err), "pass": bool(err <= 1e-12 * 100)}

    err = 0.0
    X = np.array([[0.0, 1.0], [1.0, 0.0]], dtype=complex)
    for _ in range(n):
        st = random_state(rng)
        M = partial_transpose(st).M
        blockwise = np.block(
            [[st.A, st.C.conj().T @ X], [X @ st.C, st.B.T]]
        )
        err = max(err, float(np.max(np.abs(M - blockwise))))
        err = max(err, float(np.max(np.abs(_pt_of_matrix(M) - st.V))))
    checks["partial_transpose_forms"] = {"max_abs_err": float(err), "pass": bool(err <= 1e-10)}

    report = {
        "n_instances": n,
        "n_psd_instances": n_psd,
        "seed": seed,
        "rtol": rtol,
        "checks": checks,
        "pass": all(c["pass"] for c in checks.values()),
    }
    return report


def _pt_of_matrix(V: np.ndarray) -> np.ndarray:
    P = np.eye(4, dtype=complex)
    P[2:, 2:] = np.array([[0.0, 1.0], [1.0, 0.0]])
    return P @ V @ P - np.diag([0.0, 0.0, 1.0, -1.0])
