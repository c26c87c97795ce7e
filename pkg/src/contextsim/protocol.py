"""Measurement protocols over the band model and Monte Carlo estimation.

Two protocols read one band share per trial:

* non-adaptive (delayed choice): all four outcomes A, A', B, B' come from the
  fixed settings; each CHSH term is a product of two of them.
* adaptive: for every term the A-side setting is re-aligned with the share,
  which needs the context (which of A, A' is measured) to be announced, one
  co-bit per term.  The term product is then ``sgn(cos(s_B - s_A) - x)``.

Estimators draw every variate from the counter-based streams in
:mod:`contextsim.rng`, keyed by seed, tag and trial index, and accumulate
integer sums, so results do not depend on how trials are split over workers.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Callable, Literal, Sequence

import numpy as np
from scipy import integrate

from contextsim import band, peres, urn
from contextsim import rng as _rng
from contextsim.band import BandShare
from contextsim.polytope import CANONICAL_SIGNS

ProtocolKind = Literal["nonadaptive", "adaptive"]
CurveModel = Literal["band-adaptive", "band-uniform", "band-uniform-product", "peres", "urn"]

CURVE_MODELS: tuple[str, ...] = ("band-adaptive", "band-uniform", "band-uniform-product", "peres", "urn")
# models whose analytic law is only defined for theta in [0, pi]
BOUNDED_MODELS = frozenset({"band-uniform", "band-uniform-product", "peres", "urn"})

DEFAULT_CHUNK = 1 << 16


@dataclass(frozen=True)
class SettingsQuad:
    alpha: float
    alpha_prime: float
    beta: float
    beta_prime: float

    def __post_init__(self):
        for name in ("alpha", "alpha_prime", "beta", "beta_prime"):
            v = float(getattr(self, name))
            if not math.isfinite(v):
                raise ValueError(f"{name} must be finite, got {v!r}")
            object.__setattr__(self, name, v)

    def terms(self) -> tuple[tuple[float, float], ...]:
        """(A setting, B setting) for AB, AB', A'B, A'B'."""
        return (
            (self.alpha, self.beta),
            (self.alpha, self.beta_prime),
            (self.alpha_prime, self.beta),
            (self.alpha_prime, self.beta_prime),
        )


CANONICAL_SETTINGS = SettingsQuad(0.0, math.pi / 2, math.pi / 4, -math.pi / 4)


@dataclass(frozen=True)
class TrialRecord:
    protocol: str
    x: float
    outcomes: tuple[int, int, int, int] | None
    products: tuple[int, int, int, int]
    chsh_row: int
    cobits: int


@dataclass(frozen=True)
class CorrelationEstimate:
    mean: float
    stderr: float
    n: int
    analytic: float | None = None
    discarded: int = 0

    def within(self, sigmas: float = 4.0) -> bool:
        if self.analytic is None:
            raise ValueError("no analytic reference attached")
        return abs(self.mean - self.analytic) <= sigmas * self.stderr


@dataclass(frozen=True)
class CommunicationLedger:
    cobits_total: int = 0
    bits_total: int = 0
    term_evaluations: int = 0

    @property
    def cobits_per_term(self) -> float:
        return self.cobits_total / self.term_evaluations if self.term_evaluations else 0.0


def _row_sum(products: Sequence[int]) -> int:
    return int(sum(s * p for s, p in zip(CANONICAL_SIGNS, products)))


def run_nonadaptive_trial(settings: SettingsQuad, share: BandShare) -> TrialRecord:
    a = band.band_outcome(settings.alpha, share)
    ap = band.band_outcome(settings.alpha_prime, share)
    b = band.band_outcome(settings.beta, share)
    bp = band.band_outcome(settings.beta_prime, share)
    products = (a * b, a * bp, ap * b, ap * bp)
    return TrialRecord("nonadaptive", share.x, (a, ap, b, bp), products, _row_sum(products), 0)


def run_adaptive_trial(settings: SettingsQuad, share: BandShare) -> TrialRecord:
    aligned = BandShare(0.0, share.x)
    products = []
    for s_a, s_b in settings.terms():
        # A is turned onto the band, so only the relative angle survives
        a = band.band_outcome(0.0, aligned)
        b = band.band_outcome(s_b - s_a, aligned)
        products.append(a * b)
    products = tuple(products)
    return TrialRecord("adaptive", share.x, None, products, _row_sum(products), len(products))


@dataclass(frozen=True)
class TableRow:
    x: str
    outcomes: tuple[int, int, int, int]
    nonadaptive: tuple[int, int, int, int]
    nonadaptive_chsh: int
    adaptive: tuple[int, int, int, int]
    adaptive_chsh: int

    def signature(self) -> tuple:
        """Everything but x: the part compared against the golden table."""
        return (self.outcomes, self.nonadaptive, self.nonadaptive_chsh, self.adaptive, self.adaptive_chsh)


# breaking points of the 20 printed valuation runs, verbatim
PRINTED_TABLE1_X: tuple[str, ...] = (
    "-0.514823", "-0.832267", "0.920526", "0.013375", "0.444354",
    "0.486249", "-0.760656", "0.425472", "0.973582", "0.626781",
    "-0.35275", "0.988427", "-0.762208", "0.735898", "0.0588852",
    "-0.498925", "-0.53331", "-0.822113", "0.0398871", "-0.226003",
)


def reproduce_table1(x_list: Sequence, settings: SettingsQuad = CANONICAL_SETTINGS) -> list[TableRow]:
    rows = []
    for x in x_list:
        text = x if isinstance(x, str) else repr(float(x))
        share = BandShare(0.0, float(text))
        na = run_nonadaptive_trial(settings, share)
        ad = run_adaptive_trial(settings, share)
        rows.append(TableRow(text, na.outcomes, na.products, na.chsh_row, ad.products, ad.chsh_row))
    return rows


def table1_mean_x(x_list: Sequence) -> float:
    """Sample mean of the breaking points; a diagnostic, not a check."""
    xs = [float(x) for x in x_list]
    return sum(xs) / len(xs) if xs else math.nan


# --- Monte Carlo ---------------------------------------------------------------

# A chunk kernel maps an index array to per-trial integer samples plus the
# number of trials it dropped (ties).
Kernel = Callable[[np.ndarray], tuple[np.ndarray, int]]


def _chunks(n: int, chunk: int) -> list[tuple[int, int]]:
    return [(s, min(s + chunk, n)) for s in range(0, n, chunk)]


def _accumulate(kernel: Kernel, n: int, workers: int = 1, chunk: int = DEFAULT_CHUNK):
    def work(span):
        idx = np.arange(span[0], span[1], dtype=np.uint64)
        samples, dropped = kernel(idx)
        s = samples.astype(np.int64)
        return int(s.sum()), int((s * s).sum()), int(s.size), dropped

    spans = _chunks(n, chunk)
    if workers > 1 and len(spans) > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(work, spans))
    else:
        parts = [work(sp) for sp in spans]
    total = sum(p[0] for p in parts)
    total_sq = sum(p[1] for p in parts)
    count = sum(p[2] for p in parts)
    dropped = sum(p[3] for p in parts)
    return total, total_sq, count, dropped


def estimate_from_sums(total: int, total_sq: int, count: int, analytic=None, discarded: int = 0) -> CorrelationEstimate:
    if count < 1:
        raise ValueError("no trials survived")
    mean = total / count
    if count > 1:
        # exact integer numerator keeps the variance partition-independent
        var = (count * total_sq - total * total) / (count * (count - 1))
        stderr = math.sqrt(max(var, 0.0) / count)
    else:
        stderr = 0.0
    return CorrelationEstimate(mean, stderr, count, analytic, discarded)


def run_estimate(kernel: Kernel, n: int, analytic=None, workers: int = 1, chunk: int = DEFAULT_CHUNK) -> CorrelationEstimate:
    if n < 1:
        raise ValueError(f"trial count must be >= 1, got {n}")
    total, total_sq, count, dropped = _accumulate(kernel, n, workers, chunk)
    return estimate_from_sums(total, total_sq, count, analytic, dropped)


def _sgn_array(values: np.ndarray) -> np.ndarray:
    return np.where(values >= 0, 1, -1).astype(np.int64)


def nonadaptive_analytic(settings: SettingsQuad) -> float:
    return sum(s * band.pair_expectation(a, b) for s, (a, b) in zip(CANONICAL_SIGNS, settings.terms()))


def adaptive_analytic(settings: SettingsQuad) -> float:
    return sum(s * band.adaptive_expectation(b - a) for s, (a, b) in zip(CANONICAL_SIGNS, settings.terms()))


def chsh_kernel(protocol: ProtocolKind, settings: SettingsQuad, seed: int,
                orientation: str = "fixed", fresh_shares: bool = False) -> Kernel:
    terms = settings.terms()
    signs = np.array(CANONICAL_SIGNS, dtype=np.int64)

    if protocol == "nonadaptive":
        def kernel(idx):
            x = _rng.uniform(seed, "chsh/x", idx, -1.0, 1.0)
            if orientation == "uniform":
                phi = _rng.uniform(seed, "chsh/orientation", idx, 0.0, 2.0 * math.pi)
            else:
                phi = 0.0
            outs = {s: band.band_outcome_many(s, phi, x)
                    for s in (settings.alpha, settings.alpha_prime, settings.beta, settings.beta_prime)}
            row = sum(int(sg) * outs[a] * outs[b] for sg, (a, b) in zip(signs, terms))
            return row, 0
        return kernel

    if protocol == "adaptive":
        rel = [math.cos(b - a) for a, b in terms]

        def kernel(idx):
            row = np.zeros(idx.size, dtype=np.int64)
            shared_x = None if fresh_shares else _rng.uniform(seed, "chsh/x", idx, -1.0, 1.0)
            for k, (sg, c) in enumerate(zip(signs, rel)):
                x = shared_x if shared_x is not None else _rng.uniform(seed, f"chsh/x/term{k}", idx, -1.0, 1.0)
                row += int(sg) * _sgn_array(c - x)
            return row, 0
        return kernel

    raise ValueError(f"unknown protocol {protocol!r}")


def estimate_chsh(protocol: ProtocolKind, settings: SettingsQuad = CANONICAL_SETTINGS, n: int = 1_000_000,
                  seed: int = 0, workers: int = 1, orientation: str = "fixed",
                  fresh_shares: bool = False, chunk: int = DEFAULT_CHUNK):
    """Mean CHSH row sum over n trials with x uniform on [-1, 1].

    ``orientation="uniform"`` randomizes the band direction (non-adaptive
    only; no closed form is attached then).  ``fresh_shares`` draws a new
    share for every adaptive term; experimental.
    """
    if orientation not in ("fixed", "uniform"):
        raise ValueError(f"unknown orientation mode {orientation!r}")
    if protocol == "nonadaptive":
        analytic = nonadaptive_analytic(settings) if orientation == "fixed" else None
        ledger = CommunicationLedger(0, 0, 4 * n)
    elif protocol == "adaptive":
        analytic = adaptive_analytic(settings)
        ledger = CommunicationLedger(4 * n, 0, 4 * n)
    else:
        raise ValueError(f"unknown protocol {protocol!r}")
    kernel = chsh_kernel(protocol, settings, seed, orientation, fresh_shares)
    return run_estimate(kernel, n, analytic, workers, chunk), ledger


def uniform_orientation_product_analytic(theta: float) -> float:
    """Average over orientations in [0, pi] of the product correlation."""
    # |cos(phi) - cos(theta - phi)| has its only kink in [0, pi] at phi = theta / 2
    kink = [theta / 2] if 0.0 < theta else None
    val, _ = integrate.quad(
        lambda phi: band.pair_expectation(-phi, theta - phi), 0.0, math.pi, limit=200, points=kink,
    )
    return val / math.pi


def curve_kernel(model: str, theta: float, seed: int, tag: str) -> tuple[Kernel, float]:
    """Per-trial sampler and closed-form reference for one grid point."""
    if model == "band-adaptive":
        c = math.cos(theta)

        def kernel(idx):
            x = _rng.uniform(seed, f"{tag}/x", idx, -1.0, 1.0)
            return _sgn_array(c - x), 0
        return kernel, band.adaptive_expectation(theta)

    if model == "band-uniform":
        analytic = band.uniform_orientation_expectation(theta)

        # 1 + A - B has mean 1 + cos(phi) - cos(phi - theta) given phi:
        # the linear law averaged over the orientation
        def kernel(idx):
            phi = _rng.uniform(seed, f"{tag}/phi", idx, 0.0, math.pi)
            x = _rng.uniform(seed, f"{tag}/x", idx, -1.0, 1.0)
            a = band.band_outcome_many(0.0, phi, x)
            b = band.band_outcome_many(theta, phi, x)
            return 1 + a - b, 0
        return kernel, analytic

    if model == "band-uniform-product":
        band.uniform_orientation_expectation(theta)  # domain check
        analytic = uniform_orientation_product_analytic(theta)

        def kernel(idx):
            phi = _rng.uniform(seed, f"{tag}/phi", idx, 0.0, math.pi)
            x = _rng.uniform(seed, f"{tag}/x", idx, -1.0, 1.0)
            return band.band_outcome_many(0.0, phi, x) * band.band_outcome_many(theta, phi, x), 0
        return kernel, analytic

    if model == "peres":
        analytic = peres.peres_correlation_analytic(theta)
        dir_a = np.array(peres.Z_HAT)
        dir_b = peres.direction_in_xz(theta)

        def kernel(idx):
            js = peres.sample_directions(seed, idx, tag=tag)
            return peres.pair_products(js, dir_a, dir_b)
        return kernel, analytic

    if model == "urn":
        dist = urn.linear_law_distribution(theta)
        analytic = urn.urn_expectations(dist)[0]
        states = np.array([urn.state_products(urn.SingletPair.from_assignment(s))[0]
                           for s in urn.enumerate_assignments()], dtype=np.int64)

        def kernel(idx):
            return states[urn.sample_states(dist, seed, idx, tag=tag)], 0
        return kernel, analytic

    raise ValueError(f"unknown model {model!r}; choose from {', '.join(CURVE_MODELS)}")


def estimate_curve(model: str, theta_grid: Sequence[float], n: int, seed: int = 0,
                   workers: int = 1, chunk: int = DEFAULT_CHUNK) -> list[CorrelationEstimate]:
    grid = [float(t) for t in theta_grid]
    if not grid:
        raise ValueError("theta grid is empty")
    out = []
    for k, theta in enumerate(grid):
        kernel, analytic = curve_kernel(model, theta, seed, f"curve/{model}/{k}")
        out.append(run_estimate(kernel, n, analytic, workers, chunk))
    return out


def single_outcome_estimate(alpha: float, n: int, seed: int = 0, workers: int = 1) -> CorrelationEstimate:
    """Frequency of +1 for one setting over uniform breaking points."""
    def kernel(idx):
        x = _rng.uniform(seed, f"single/{alpha!r}", idx, -1.0, 1.0)
        return (band.band_outcome_many(alpha, 0.0, x) == 1).astype(np.int64), 0
    return run_estimate(kernel, n, band.prob_plus(alpha), workers)


def estimate_peres_chsh(settings: SettingsQuad = CANONICAL_SETTINGS, n: int = 1_000_000, seed: int = 0,
                        workers: int = 1) -> CorrelationEstimate:
    """CHSH row sum for Peres fragments, settings as polar angles in the x-z plane.

    All four terms read the same share; trials where any setting lies
    exactly orthogonal to the share are dropped.
    """
    dirs = {name: peres.direction_in_xz(getattr(settings, name))
            for name in ("alpha", "alpha_prime", "beta", "beta_prime")}
    a_dirs = np.stack([dirs["alpha"], dirs["alpha_prime"]])
    b_dirs = np.stack([dirs["beta"], dirs["beta_prime"]])

    def kernel(idx):
        js = peres.sample_directions(seed, idx, tag="peres-chsh")
        da = js @ a_dirs.T
        db = -(js @ b_dirs.T)
        keep = np.all(da != 0.0, axis=1) & np.all(db != 0.0, axis=1)
        ra = _sgn_array(da[keep])
        rb = _sgn_array(db[keep])
        row = ra[:, 0] * rb[:, 0] + ra[:, 0] * rb[:, 1] + ra[:, 1] * rb[:, 0] - ra[:, 1] * rb[:, 1]
        return row, int(keep.size - np.count_nonzero(keep))

    analytic = sum(
        s * peres.peres_correlation_analytic(abs(b - a) if abs(b - a) <= math.pi else 2 * math.pi - abs(b - a))
        for s, (a, b) in zip(CANONICAL_SIGNS, settings.terms())
    )
    return run_estimate(kernel, n, analytic, workers)
