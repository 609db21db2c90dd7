"""Fading (fluctuating-loss) channels.

A channel acting on two modes is fully described, at the level of second
moments, by five transmittance moments <T_a>, <T_b>, <T_a^2>, <T_b^2>,
<T_a T_b>.  Those can be given directly (ChannelMoments) or computed from a
joint probability distribution of transmittance (PdtModel) by closed form,
quadrature, or sample averages.

The channel acts on normally-ordered moments multiplicatively:
<a_dag^n a^m b_dag^k b^l>_out = <T_a^{n+m} T_b^{k+l}> <a_dag^n a^m b_dag^k b^l>,
which at second order gives the block form implemented by apply_channel.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field

import numpy as np
from scipy import integrate, special, stats

from .errors import ChannelError, MisuseError
from .states import GaussianState

__all__ = [
    "ChannelMoments",
    "correlation_coefficients",
    "Marginal",
    "UniformMarginal",
    "BetaMarginal",
    "LogNormalMarginal",
    "FixedMarginal",
    "PdtModel",
    "DeterministicPdt",
    "MomentsPdt",
    "IndependentProductPdt",
    "EmpiricalPdt",
    "CorrelatedMinPdt",
    "lognormal_pdt",
    "beta_pdt",
    "moments_from_pdt",
    "apply_channel",
    "adaptive_correlate",
    "sample_pdt",
    "empirical_from_csv",
    "empirical_standard_errors",
    "moments_to_dict",
    "moments_from_dict",
    "pdt_from_dict",
    "pdt_to_dict",
]

# Absolute slack for the moment inequalities; covers rounding in moments that
# sit exactly on a boundary (e.g. perfectly correlated channels).
_MOMENT_SLACK = 1e-12

# Variances below this threshold are treated as exactly zero when deciding
# whether the displacement correlation coefficient is defined.
_ZERO_VAR = 1e-14


@dataclass(frozen=True)
class ChannelMoments:
    """The five transmittance moments of a two-mode fading channel.

    All moments refer to amplitude transmittances T in [0, 1], so
    <T>^2 <= <T^2> <= <T> on each mode, the cross moment obeys
    Cauchy-Schwarz, and the covariance is bounded by the standard deviations.
    """

    t_a: float
    t_b: float
    t_a2: float
    t_b2: float
    t_ab: float

    def __post_init__(self):
        vals = {}
        for name in ("t_a", "t_b", "t_a2", "t_b2", "t_ab"):
            v = float(getattr(self, name))
            if not math.isfinite(v):
                raise ChannelError(f"moment {name} must be finite, got {v!r}")
            vals[name] = v
            object.__setattr__(self, name, v)
        for mode in ("a", "b"):
            t1, t2 = vals[f"t_{mode}"], vals[f"t_{mode}2"]
            if not 0.0 <= t1 <= 1.0:
                raise ChannelError(f"<T_{mode}> must lie in [0,1], got {t1!r}")
            if t2 < t1 * t1 - _MOMENT_SLACK:
                raise ChannelError(
                    f"<T_{mode}^2> = {t2!r} below <T_{mode}>^2 = {t1 * t1!r} (negative variance)"
                )
            if t2 > t1 + _MOMENT_SLACK:
                raise ChannelError(
                    f"<T_{mode}^2> = {t2!r} exceeds <T_{mode}> = {t1!r} (impossible for T in [0,1])"
                )
        if self.t_ab < -_MOMENT_SLACK:
            raise ChannelError(f"<T_aT_b> must be >= 0, got {self.t_ab!r}")
        if self.t_ab**2 > self.t_a2 * self.t_b2 + _MOMENT_SLACK:
            raise ChannelError(
                f"Cauchy-Schwarz violated: <T_aT_b>^2 = {self.t_ab**2!r} exceeds "
                f"<T_a^2><T_b^2> = {self.t_a2 * self.t_b2!r}"
            )
        cov_bound = math.sqrt(max(self.var_a, 0.0) * max(self.var_b, 0.0))
        if abs(self.cov) > cov_bound + _MOMENT_SLACK:
            raise ChannelError(
                f"covariance bound violated: |<T_aT_b> - <T_a><T_b>| = {abs(self.cov)!r} "
                f"exceeds sqrt(var_a var_b) = {cov_bound!r}"
            )

    @property
    def var_a(self) -> float:
        return self.t_a2 - self.t_a**2

    @property
    def var_b(self) -> float:
        return self.t_b2 - self.t_b**2

    @property
    def cov(self) -> float:
        return self.t_ab - self.t_a * self.t_b

    def is_uncorrelated(self, tol: float = 1e-12) -> bool:
        return abs(self.cov) <= tol

    def is_deterministic(self, tol: float = _ZERO_VAR) -> bool:
        return self.var_a <= tol and self.var_b <= tol


def correlation_coefficients(m: ChannelMoments) -> tuple[float, float]:
    """(Gamma, DeltaGamma) of a channel.

    Gamma = <T_aT_b> / sqrt(<T_a^2><T_b^2>) scales the cross block of the
    output second moments; DeltaGamma = cov / sqrt(var_a var_b) scales the
    cross displacement term.  When either variance vanishes the displacement
    vectors it multiplies vanish identically, so DeltaGamma is defined as 0.
    """
    if m.t_a2 <= 0.0 or m.t_b2 <= 0.0:
        raise ChannelError("degenerate channel: a second moment <T^2> is zero (complete loss)")
    gamma = m.t_ab / math.sqrt(m.t_a2 * m.t_b2)
    va, vb = m.var_a, m.var_b
    if va <= _ZERO_VAR or vb <= _ZERO_VAR:
        dgamma = 0.0
    else:
        dgamma = m.cov / math.sqrt(va * vb)
    return gamma, dgamma


# ---------------------------------------------------------------------------
# Marginal transmittance distributions on [0, 1]
# ---------------------------------------------------------------------------


class Marginal:
    """A single-mode transmittance distribution on [0, 1]."""

    kind: str = ""

    def pdf(self, t: float) -> float:
        raise NotImplementedError

    def cdf(self, t: float) -> float:
        raise NotImplementedError

    def moment(self, n: int, tol: float = 1e-9) -> float:
        """<T^n>; quadrature unless the subclass has an exact form."""
        val, _ = integrate.quad(
            lambda t: t**n * self.pdf(t), 0.0, 1.0, epsabs=min(tol, 1e-10) * 1e-2,
            epsrel=1e-11, limit=200,
        )
        return val

    def sample(self, n: int, rng: np.random.Generator) -> np.ndarray:
        raise NotImplementedError

    def params(self) -> dict:
        return {}


@dataclass(frozen=True)
class UniformMarginal(Marginal):
    kind: str = field(default="uniform", init=False)

    def pdf(self, t):
        return 1.0 if 0.0 <= t <= 1.0 else 0.0

    def cdf(self, t):
        return min(max(t, 0.0), 1.0)

    def sample(self, n, rng):
        return rng.uniform(0.0, 1.0, size=n)


@dataclass(frozen=True)
class BetaMarginal(Marginal):
    p: float
    q: float
    kind: str = field(default="beta", init=False)

    def __post_init__(self):
        if not (self.p > 0 and self.q > 0 and math.isfinite(self.p) and math.isfinite(self.q)):
            raise ChannelError(f"beta parameters must be positive, got p={self.p!r}, q={self.q!r}")

    def pdf(self, t):
        return float(stats.beta.pdf(t, self.p, self.q))

    def cdf(self, t):
        return float(stats.beta.cdf(t, self.p, self.q))

    def moment(self, n, tol=1e-9):
        # <T^n> = prod_{i<n} (p+i)/(p+q+i), exact.
        val = 1.0
        for i in range(n):
            val *= (self.p + i) / (self.p + self.q + i)
        return val

    def sample(self, n, rng):
        return rng.beta(self.p, self.q, size=n)

    def params(self):
        return {"p": self.p, "q": self.q}


@dataclass(frozen=True)
class LogNormalMarginal(Marginal):
    """log T ~ Normal(mu, sigma^2), truncated to T <= 1 and renormalized."""

    mu: float
    sigma: float
    kind: str = field(default="log-normal", init=False)

    def __post_init__(self):
        if not (self.sigma > 0 and math.isfinite(self.sigma) and math.isfinite(self.mu)):
            raise ChannelError(
                f"log-normal parameters must be finite with sigma > 0, got "
                f"mu={self.mu!r}, sigma={self.sigma!r}"
            )

    @property
    def _trunc_mass(self) -> float:
        # P[T <= 1] = Phi(-mu/sigma) for the untruncated log-normal.
        return float(stats.norm.cdf(-self.mu / self.sigma))

    def pdf(self, t):
        if t <= 0.0 or t > 1.0:
            return 0.0
        z = (math.log(t) - self.mu) / self.sigma
        return math.exp(-0.5 * z * z) / (t * self.sigma * math.sqrt(2.0 * math.pi)) / self._trunc_mass

    def cdf(self, t):
        if t <= 0.0:
            return 0.0
        if t >= 1.0:
            return 1.0
        return float(stats.norm.cdf((math.log(t) - self.mu) / self.sigma)) / self._trunc_mass

    def sample(self, n, rng):
        # Inverse-CDF through the underlying normal: exact truncation.
        u = rng.uniform(0.0, 1.0, size=n)
        z = special.ndtri(u * self._trunc_mass)
        return np.exp(self.mu + self.sigma * z)

    def params(self):
        return {"mu": self.mu, "sigma": self.sigma}


@dataclass(frozen=True)
class FixedMarginal(Marginal):
    """Deterministic transmittance: a point mass at t0."""

    t0: float
    kind: str = field(default="fixed", init=False)

    def __post_init__(self):
        if not 0.0 <= self.t0 <= 1.0:
            raise ChannelError(f"fixed transmittance must lie in [0,1], got {self.t0!r}")

    def pdf(self, t):
        raise MisuseError("point-mass marginal has no density; use moment()/cdf()")

    def cdf(self, t):
        return 1.0 if t >= self.t0 else 0.0

    def moment(self, n, tol=1e-9):
        return self.t0**n

    def sample(self, n, rng):
        return np.full(n, self.t0)

    def params(self):
        return {"t0": self.t0}


_MARGINAL_KINDS = {
    "uniform": UniformMarginal,
    "beta": BetaMarginal,
    "log-normal": LogNormalMarginal,
    "fixed": FixedMarginal,
}


# ---------------------------------------------------------------------------
# Joint transmittance models
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class PdtModel:
    """Base for joint transmittance distribution models on [0,1]^2."""

    kind = ""


@dataclass(frozen=True)
class DeterministicPdt(PdtModel):
    """Point mass at (sqrt(eta_a), sqrt(eta_b)): fiber-style fixed attenuation.

    Moments are exact powers: <T_x^n> = eta_x^{n/2}.
    """

    eta_a: float
    eta_b: float
    kind = "deterministic"

    def __post_init__(self):
        for name in ("eta_a", "eta_b"):
            v = float(getattr(self, name))
            if not 0.0 <= v <= 1.0:
                raise ChannelError(f"{name} must lie in [0,1], got {v!r}")
            object.__setattr__(self, name, v)


@dataclass(frozen=True)
class MomentsPdt(PdtModel):
    """Channel given directly by its five moments (no joint distribution)."""

    moments: ChannelMoments
    kind = "moments"


@dataclass(frozen=True)
class IndependentProductPdt(PdtModel):
    """P(T_a, T_b) = f_a(T_a) f_b(T_b) with independent marginals."""

    marginal_a: Marginal
    marginal_b: Marginal
    quad_tol: float = 1e-9
    kind = "independent-product"


@dataclass(frozen=True)
class EmpiricalPdt(PdtModel):
    """Measured (T_a, T_b) samples; moments are sample averages."""

    samples: np.ndarray
    kind = "empirical-samples"

    def __post_init__(self):
        arr = np.asarray(self.samples, dtype=float)
        if arr.ndim != 2 or arr.shape[1] != 2 or arr.shape[0] == 0:
            raise ChannelError("empirical samples must be a non-empty (n, 2) array")
        if not np.all(np.isfinite(arr)) or arr.min() < 0.0 or arr.max() > 1.0:
            raise ChannelError("empirical samples must lie in [0,1]")
        arr.flags.writeable = False
        object.__setattr__(self, "samples", arr)


@dataclass(frozen=True)
class CorrelatedMinPdt(PdtModel):
    """Perfectly correlated channel T_a = T_b = min of the base model's pair.

    This is what the adaptive protocol realizes: measure both transmittances,
    attenuate the better arm to the worse one.
    """

    base: PdtModel
    kind = "correlated-min"

    def __post_init__(self):
        if isinstance(self.base, MomentsPdt):
            raise MisuseError(
                "the adaptive min-statistic needs a joint distribution; "
                "bare moments do not determine it"
            )


def lognormal_pdt(mu: float, sigma: float, quad_tol: float = 1e-9) -> IndependentProductPdt:
    """Two independent, identically distributed truncated log-normal arms."""
    m = LogNormalMarginal(mu, sigma)
    return IndependentProductPdt(m, m, quad_tol)


def beta_pdt(p: float, q: float, quad_tol: float = 1e-9) -> IndependentProductPdt:
    """Two independent, identically distributed Beta(p, q) arms."""
    m = BetaMarginal(p, q)
    return IndependentProductPdt(m, m, quad_tol)


def _min_moment(ma: Marginal, mb: Marginal, n: int, tol: float) -> float:
    """<min(T_a, T_b)^n> for independent marginals.

    For two continuous marginals this is the order-statistic integral
    int t^n [f_a(t) S_b(t) + f_b(t) S_a(t)] dt with S = 1 - cdf; point
    masses are integrated out exactly.
    """
    fixed_a = isinstance(ma, FixedMarginal)
    fixed_b = isinstance(mb, FixedMarginal)
    if fixed_a and fixed_b:
        return min(ma.t0, mb.t0) ** n
    if fixed_a or fixed_b:
        t0 = ma.t0 if fixed_a else mb.t0
        other = mb if fixed_a else ma
        below, _ = integrate.quad(
            lambda t: t**n * other.pdf(t), 0.0, t0,
            epsabs=min(tol, 1e-10) * 1e-2, epsrel=1e-11, limit=200,
        )
        return below + t0**n * (1.0 - other.cdf(t0))

    def integrand(t):
        return t**n * (
            ma.pdf(t) * (1.0 - mb.cdf(t)) + mb.pdf(t) * (1.0 - ma.cdf(t))
        )

    val, _ = integrate.quad(
        integrand, 0.0, 1.0, epsabs=min(tol, 1e-10) * 1e-2, epsrel=1e-11, limit=200
    )
    return val


def moments_from_pdt(model: PdtModel) -> ChannelMoments:
    """The five channel moments of a joint transmittance model."""
    if isinstance(model, DeterministicPdt):
        ta, tb = math.sqrt(model.eta_a), math.sqrt(model.eta_b)
        return ChannelMoments(ta, tb, model.eta_a, model.eta_b, ta * tb)
    if isinstance(model, MomentsPdt):
        return model.moments
    if isinstance(model, IndependentProductPdt):
        tol = model.quad_tol
        ta = model.marginal_a.moment(1, tol)
        tb = model.marginal_b.moment(1, tol)
        ta2 = model.marginal_a.moment(2, tol)
        tb2 = model.marginal_b.moment(2, tol)
        return ChannelMoments(ta, tb, ta2, tb2, ta * tb)
    if isinstance(model, EmpiricalPdt):
        ta_s, tb_s = model.samples[:, 0], model.samples[:, 1]
        return ChannelMoments(
            float(ta_s.mean()), float(tb_s.mean()),
            float((ta_s**2).mean()), float((tb_s**2).mean()),
            float((ta_s * tb_s).mean()),
        )
    if isinstance(model, CorrelatedMinPdt):
        base = model.base
        if isinstance(base, DeterministicPdt):
            t0 = min(math.sqrt(base.eta_a), math.sqrt(base.eta_b))
            return ChannelMoments(t0, t0, t0 * t0, t0 * t0, t0 * t0)
        if isinstance(base, IndependentProductPdt):
            t1 = _min_moment(base.marginal_a, base.marginal_b, 1, base.quad_tol)
            t2 = _min_moment(base.marginal_a, base.marginal_b, 2, base.quad_tol)
            return ChannelMoments(t1, t1, t2, t2, t2)
        if isinstance(base, EmpiricalPdt):
            mins = np.minimum(base.samples[:, 0], base.samples[:, 1])
            t1, t2 = float(mins.mean()), float((mins**2).mean())
            return ChannelMoments(t1, t1, t2, t2, t2)
        if isinstance(base, CorrelatedMinPdt):
            # min(T, T) = T: same marginal law as the inner model.
            return moments_from_pdt(base)
        raise MisuseError(f"unsupported base model for the min statistic: {base.kind!r}")
    raise MisuseError(f"unknown transmittance model: {model!r}")


def empirical_standard_errors(model: EmpiricalPdt) -> dict:
    """Standard errors of the five sample-average moments."""
    if not isinstance(model, EmpiricalPdt):
        raise MisuseError("standard errors are defined for empirical samples only")
    ta, tb = model.samples[:, 0], model.samples[:, 1]
    n = len(ta)
    if n < 2:
        return {k: float("nan") for k in ("t_a", "t_b", "t_a2", "t_b2", "t_ab")}

    def se(x):
        return float(np.std(x, ddof=1) / math.sqrt(n))

    return {
        "t_a": se(ta), "t_b": se(tb),
        "t_a2": se(ta**2), "t_b2": se(tb**2),
        "t_ab": se(ta * tb), "n_samples": n,
    }


def adaptive_correlate(model: PdtModel) -> PdtModel:
    """The adaptive protocol: realize T_a = T_b = min(T_a, T_b).

    Measure both transmittances, communicate, attenuate the better channel
    down to the worse one.  The result is perfectly correlated: Gamma = 1
    always and DeltaGamma = 1 whenever the min statistic has nonzero
    variance.  Idempotent; rejects moments-only channel descriptions, which
    do not determine the joint distribution.
    """
    if isinstance(model, CorrelatedMinPdt):
        return model
    return CorrelatedMinPdt(model)


def sample_pdt(model: PdtModel, n: int, seed: int | np.random.Generator = 0) -> np.ndarray:
    """n joint (T_a, T_b) samples from the model, shape (n, 2)."""
    rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
    if isinstance(model, DeterministicPdt):
        return np.tile([math.sqrt(model.eta_a), math.sqrt(model.eta_b)], (n, 1))
    if isinstance(model, IndependentProductPdt):
        return np.column_stack(
            [model.marginal_a.sample(n, rng), model.marginal_b.sample(n, rng)]
        )
    if isinstance(model, EmpiricalPdt):
        idx = rng.integers(0, len(model.samples), size=n)
        return model.samples[idx]
    if isinstance(model, CorrelatedMinPdt):
        pair = sample_pdt(model.base, n, rng)
        mins = np.minimum(pair[:, 0], pair[:, 1])
        return np.column_stack([mins, mins])
    raise MisuseError(f"cannot sample from model kind {model.kind!r}")


def empirical_from_csv(path) -> EmpiricalPdt:
    """Load measured samples from a CSV file with header 'Ta,Tb'."""
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None or [h.strip() for h in header] != ["Ta", "Tb"]:
            raise ChannelError(f"expected CSV header 'Ta,Tb' in {path}, got {header!r}")
        rows = []
        for lineno, row in enumerate(reader, start=2):
            if not row:
                continue
            if len(row) != 2:
                raise ChannelError(f"{path}:{lineno}: expected two columns, got {len(row)}")
            try:
                rows.append((float(row[0]), float(row[1])))
            except ValueError as exc:
                raise ChannelError(f"{path}:{lineno}: {exc}") from exc
    if not rows:
        raise ChannelError(f"no samples in {path}")
    return EmpiricalPdt(np.array(rows))


# ---------------------------------------------------------------------------
# Channel action on states
# ---------------------------------------------------------------------------


def apply_channel(state: GaussianState, m: ChannelMoments, method: str = "blocks") -> GaussianState:
    """Propagate a state through the fading channel with the given moments.

    Means attenuate as <T_x><x>.  The second-moment blocks transform as

        A -> <T_a^2> A + (1 - <T_a^2>) diag(0,1) + var(T_a) m_a m_a^dag
        B -> likewise with b moments
        C -> <T_aT_b> C + cov(T_a,T_b) m_b m_a^dag

    with the unscaled moment vectors m_x = (<x^dag>, <x>)^T.  The
    "moment-map" method rebuilds every normally-ordered moment from the
    multiplicative transmittance map instead and re-centers; both methods
    agree to machine precision and the second exists as an independently
    coded validation path.
    """
    if method == "blocks":
        va, vb, cov = m.var_a, m.var_b, m.cov
        ma = np.array([np.conj(state.mean_a), state.mean_a])
        mb = np.array([np.conj(state.mean_b), state.mean_b])
        d01 = np.diag([0.0, 1.0])
        A = m.t_a2 * state.A + (1.0 - m.t_a2) * d01 + va * np.outer(ma, ma.conj())
        B = m.t_b2 * state.B + (1.0 - m.t_b2) * d01 + vb * np.outer(mb, mb.conj())
        C = m.t_ab * state.C + cov * np.outer(mb, ma.conj())
        V = np.block([[A, C.conj().T], [C, B]])
        return GaussianState(m.t_a * state.mean_a, m.t_b * state.mean_b, V)
    if method == "moment-map":
        return _apply_channel_moment_map(state, m)
    raise MisuseError(f"unknown apply_channel method {method!r}")


def _apply_channel_moment_map(state: GaussianState, m: ChannelMoments) -> GaussianState:
    """Entry-by-entry rebuild of the output moments (validation path)."""
    al, be = state.mean_a, state.mean_b
    V = state.V
    # Normally-ordered raw input moments from central ones.
    n_a = V[0, 0] + abs(al) ** 2          # <a_dag a>
    sq_a = V[1, 0] + al * al              # <a a> = <da da> + <a>^2
    n_b = V[2, 2] + abs(be) ** 2
    sq_b = V[3, 2] + be * be
    ab = V[1, 2] + al * be                # <a b> = <da db> + ...
    adb = V[0, 2] + np.conj(al) * be      # <a_dag b>
    # Transmittance map on raw moments, then new means.
    al_o, be_o = m.t_a * al, m.t_b * be
    n_a_o = m.t_a2 * n_a
    sq_a_o = m.t_a2 * sq_a
    n_b_o = m.t_b2 * n_b
    sq_b_o = m.t_b2 * sq_b
    ab_o = m.t_ab * ab
    adb_o = m.t_ab * adb
    # Re-center and assemble.
    out = np.empty((4, 4), dtype=complex)
    out[0, 0] = n_a_o - abs(al_o) ** 2
    out[1, 0] = sq_a_o - al_o * al_o
    out[0, 1] = np.conj(out[1, 0])
    out[1, 1] = out[0, 0] + 1.0
    out[2, 2] = n_b_o - abs(be_o) ** 2
    out[3, 2] = sq_b_o - be_o * be_o
    out[2, 3] = np.conj(out[3, 2])
    out[3, 3] = out[2, 2] + 1.0
    dadb = ab_o - al_o * be_o             # <da db>
    dadgb = adb_o - np.conj(al_o) * be_o  # <da_dag db>
    out[1, 2] = dadb
    out[2, 1] = np.conj(dadb)
    out[0, 2] = dadgb
    out[2, 0] = np.conj(dadgb)
    out[0, 3] = np.conj(dadb)             # <da_dag db_dag>
    out[3, 0] = dadb
    out[1, 3] = np.conj(dadgb)            # <da db_dag>
    out[3, 1] = dadgb
    return GaussianState(al_o, be_o, out)


# ---------------------------------------------------------------------------
# JSON (de)serialization: the channel-spec format
# ---------------------------------------------------------------------------


def moments_to_dict(m: ChannelMoments) -> dict:
    return {"t_a": m.t_a, "t_b": m.t_b, "t_a2": m.t_a2, "t_b2": m.t_b2, "t_ab": m.t_ab}


def moments_from_dict(d: dict) -> ChannelMoments:
    required = {"t_a", "t_b", "t_a2", "t_b2", "t_ab"}
    if not isinstance(d, dict):
        raise ChannelError(f"moments must be an object, got {type(d).__name__}")
    unknown = set(d) - required
    if unknown:
        raise ChannelError(f"unknown moment fields: {sorted(unknown)}")
    missing = required - set(d)
    if missing:
        raise ChannelError(f"missing moment fields: {sorted(missing)}")
    return ChannelMoments(**{k: float(d[k]) for k in required})


def _marginal_from_dict(d: dict) -> Marginal:
    if not isinstance(d, dict) or "kind" not in d:
        raise ChannelError(f"marginal spec must be an object with a 'kind', got {d!r}")
    kind = d["kind"]
    cls = _MARGINAL_KINDS.get(kind)
    if cls is None:
        raise ChannelError(f"unknown marginal kind {kind!r}; expected one of {sorted(_MARGINAL_KINDS)}")
    params = {k: v for k, v in d.items() if k != "kind"}
    try:
        return cls(**params)
    except TypeError as exc:
        raise ChannelError(f"bad parameters for marginal kind {kind!r}: {exc}") from exc


def _marginal_to_dict(m: Marginal) -> dict:
    return {"kind": m.kind, **m.params()}


def pdt_from_dict(d: dict) -> PdtModel:
    """Parse the channel-spec JSON object (strict: unknown fields rejected)."""
    if not isinstance(d, dict):
        raise ChannelError(f"channel spec must be an object, got {type(d).__name__}")
    allowed = {"kind", "params", "quadrature", "mc"}
    unknown = set(d) - allowed
    if unknown:
        raise ChannelError(f"unknown channel-spec fields: {sorted(unknown)}")
    kind = d.get("kind")
    params = d.get("params", {})
    if not isinstance(params, dict):
        raise ChannelError("channel-spec 'params' must be an object")
    quad_tol = 1e-9
    if "quadrature" in d:
        q = d["quadrature"]
        if not isinstance(q, dict) or set(q) - {"tol"}:
            raise ChannelError("channel-spec 'quadrature' must be an object with field 'tol'")
        quad_tol = float(q.get("tol", 1e-9))

    def need(*names):
        missing = set(names) - set(params)
        extra = set(params) - set(names)
        if missing:
            raise ChannelError(f"channel kind {kind!r} missing params: {sorted(missing)}")
        if extra:
            raise ChannelError(f"channel kind {kind!r} has unknown params: {sorted(extra)}")

    if kind == "deterministic":
        need("eta_a", "eta_b")
        return DeterministicPdt(float(params["eta_a"]), float(params["eta_b"]))
    if kind == "moments":
        need("t_a", "t_b", "t_a2", "t_b2", "t_ab")
        return MomentsPdt(moments_from_dict(params))
    if kind == "independent-product":
        need("marginal_a", "marginal_b")
        return IndependentProductPdt(
            _marginal_from_dict(params["marginal_a"]),
            _marginal_from_dict(params["marginal_b"]),
            quad_tol,
        )
    if kind == "log-normal":
        need("mu", "sigma")
        return lognormal_pdt(float(params["mu"]), float(params["sigma"]), quad_tol)
    if kind == "beta":
        need("p", "q")
        return beta_pdt(float(params["p"]), float(params["q"]), quad_tol)
    if kind == "empirical-samples":
        if "csv" in params:
            need("csv")
            return empirical_from_csv(params["csv"])
        need("samples")
        return EmpiricalPdt(np.asarray(params["samples"], dtype=float))
    if kind == "correlated-min":
        need("base")
        return adaptive_correlate(pdt_from_dict(params["base"]))
    raise ChannelError(f"unknown channel kind {kind!r}")


def pdt_to_dict(model: PdtModel) -> dict:
    if isinstance(model, DeterministicPdt):
        return {"kind": model.kind, "params": {"eta_a": model.eta_a, "eta_b": model.eta_b}}
    if isinstance(model, MomentsPdt):
        return {"kind": model.kind, "params": moments_to_dict(model.moments)}
    if isinstance(model, IndependentProductPdt):
        return {
            "kind": model.kind,
            "params": {
                "marginal_a": _marginal_to_dict(model.marginal_a),
                "marginal_b": _marginal_to_dict(model.marginal_b),
            },
            "quadrature": {"tol": model.quad_tol},
        }
    if isinstance(model, EmpiricalPdt):
        return {"kind": model.kind, "params": {"samples": model.samples.tolist()}}
    if isinstance(model, CorrelatedMinPdt):
        return {"kind": model.kind, "params": {"base": pdt_to_dict(model.base)}}
    raise MisuseError(f"cannot serialize model {model!r}")
