"""The identity suite: every derived relation becomes a named residual check.

A check takes a scenario plus a run context and returns a CheckReport (or
None when it does not apply to that scenario).  Reports carry the maximum
residual, the local reference scale (the largest individual term entering the
identity) and the tolerance actually applied; a non-witness check passes iff

    max_residual <= tolerance * (1 + scale).

Witness checks assert a *lower* bound instead: the tensor asymmetries, gauge
dependences and non-conservations that are supposed to be there must actually
show up.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace

import numpy as np

from .errors import ConfigError, GateError
from .gauge import gauge_shift
from .geometry import RIEMANN_CONVENTION, first_bianchi_residual
from .lagrangian import (PAIR_COUNTING, catalog_models, dL_dF, dL_dg,
                         dL_dg_directional)
from .scalars import DUAL, DerivativeMode, fd_mode
from .stress import GaugeFrame, ScalarFrame

FLATNESS_THRESHOLD = 1e-10  # max |riemann| below which a scenario counts as flat
OFF_SHELL_FLOOR = 1e-6

DEFAULT_TOLERANCES = {
    "metric-compatibility": 1e-12,
    "riemann-identities": 1e-10,
    "commutator": 1e-10,
    "killing-catalog": 1e-12,
    "field-equations": 1e-8,
    "coincidence": 1e-12,
    "symmetry-canonical": 1e-10,
    "off-shell-identity": 1e-10,
    "bianchi": 1e-10,
    "gauge-invariance": 1e-12,
    "trad-gauge-shift": 0.1,          # witness floor (relative)
    "trad-asymmetry": 0.1,            # witness floor (relative)
    "divergence-canonical": 1e-9,
    "divergence-metric": 1e-9,
    "divergence-traditional": 1e-8,
    "divergence-cross-form": 1e-10,
    "master-identity": 1e-8,
    "current-conservation": 1e-9,
    "current-traditional": 1e-9,
    "scalar-lie": 1e-9,
}

# Checks whose pass condition is a lower bound on a designed nonzero quantity.
PURE_WITNESS_CHECKS = ("trad-gauge-shift", "trad-asymmetry")


@dataclass(frozen=True)
class CheckSpec:
    name: str
    scenario: str
    samples: int
    tolerance: float
    on_shell_required: bool = False
    witness: bool = False

    def __post_init__(self):
        if self.tolerance <= 0:
            raise ConfigError(f"tolerance for {self.name} must be positive")


@dataclass(frozen=True)
class CheckReport:
    name: str
    scenario: str
    max_residual: float
    scale: float
    tolerance: float
    passed: bool
    points: int
    witness: bool = False
    note: str = ""

    def to_dict(self):
        return {
            "name": self.name,
            "scenario": self.scenario,
            "max_residual": self.max_residual,
            "scale": self.scale,
            "tolerance": self.tolerance,
            "pass": self.passed,
            "points": self.points,
            "witness": self.witness,
            "note": self.note,
        }


class RunContext:
    """Shared run configuration plus per-scenario evaluation caches."""

    def __init__(self, mode=DUAL, samples=None, seed=None,
                 tolerance_overrides=None, strict_gates=False):
        self.mode = mode
        self.samples = samples
        self.seed = seed
        self.tolerance_overrides = dict(tolerance_overrides or {})
        self.strict_gates = strict_gates
        self._sessions = {}

    def tolerance(self, check_name):
        tol = self.tolerance_overrides.get(
            check_name, self.tolerance_overrides.get(
                "all", DEFAULT_TOLERANCES[check_name]))
        if self.mode.kind == "fd" and check_name not in PURE_WITNESS_CHECKS:
            # second-order truncation error dominates rounding in fd mode
            tol = max(tol, self.mode.h ** 2)
        return tol

    def session(self, scenario):
        key = (scenario.name, self.mode)
        if key not in self._sessions:
            self._sessions[key] = ScenarioSession(scenario, self)
        return self._sessions[key]


class ScenarioSession:
    """Sample points and cached pointwise frames for one scenario."""

    def __init__(self, scenario, ctx):
        self.scenario = scenario
        self.ctx = ctx
        self.samples = ctx.samples or scenario.samples
        seed = scenario.seed if ctx.seed is None else ctx.seed
        self.points = scenario.chart.sample_points(self.samples, seed)
        self.seed = seed
        self._frames = None

    @property
    def frames(self):
        if self._frames is None:
            sc = self.scenario
            if sc.kind == "gauge":
                self._frames = [GaugeFrame(sc.metric, sc.potential, x, self.ctx.mode)
                                for x in self.points]
            else:
                self._frames = [ScalarFrame(sc.metric, sc.scalar_field,
                                            sc.scalar_model, x, self.ctx.mode)
                                for x in self.points]
        return self._frames

    def subset(self, count):
        return self.frames[:min(count, len(self.frames))]

    def on_shell_residual(self):
        worst = 0.0
        for fr in self.frames:
            if self.scenario.kind == "gauge":
                worst = max(worst, float(np.max(np.abs(
                    fr.field_equation(self.scenario.model)))))
            else:
                worst = max(worst, abs(fr.field_equation()))
        return worst

    def require_on_shell(self, check_name):
        """Returns a failing report if the declared on-shell gate is violated,
        None when everything is fine."""
        tol = self.ctx.tolerance("field-equations")
        resid = self.on_shell_residual()
        if resid > tol:
            message = (f"on-shell precondition failed: field-equation residual "
                       f"{resid:.3e} > {tol:.0e}")
            if self.ctx.strict_gates:
                raise GateError(f"scenario {self.scenario.name!r}: {message}")
            return CheckReport(check_name, self.scenario.name, resid, 0.0,
                               tol, False, len(self.points), note=message)
        return None

    def is_flat(self):
        return all(float(np.max(np.abs(fr.geo.riemann))) < FLATNESS_THRESHOLD
                   for fr in self.subset(8))


def _report(ctx, session, name, residual, scale, witness=False, note=""):
    tol = ctx.tolerance(name)
    passed = residual <= tol * (1.0 + scale)
    return CheckReport(name, session.scenario.name, float(residual),
                       float(scale), tol, bool(passed), len(session.points),
                       witness=witness, note=note)


def _witness_report(ctx, session, name, magnitude, scale, note=""):
    floor_rel = session.scenario.witness_floors.get(name, ctx.tolerance(name))
    floor = floor_rel * scale
    passed = magnitude >= floor
    return CheckReport(name, session.scenario.name, float(magnitude),
                       float(scale), float(floor_rel), bool(passed),
                       len(session.points), witness=True, note=note)


# -- geometry checks ---------------------------------------------------------------

def check_metric_compatibility(scenario, ctx):
    session = ctx.session(scenario)
    worst, scale = 0.0, 0.0
    for fr in session.frames:
        geo = fr.geo
        cd = (geo.dg - np.einsum("dca,db->cab", geo.gamma, geo.g)
              - np.einsum("dcb,ad->cab", geo.gamma, geo.g))
        worst = max(worst, float(np.max(np.abs(cd))))
        scale = max(scale, float(np.max(np.abs(geo.dg))),
                    float(np.max(np.abs(geo.g))))
    return _report(ctx, session, "metric-compatibility", worst, scale)


def check_riemann_identities(scenario, ctx):
    session = ctx.session(scenario)
    worst, scale = 0.0, 0.0
    for fr in session.frames:
        riem = fr.geo.riemann
        worst = max(worst, first_bianchi_residual(riem),
                    float(np.max(np.abs(riem + riem.transpose(0, 1, 3, 2)))))
        scale = max(scale, float(np.max(np.abs(riem))))
    return _report(ctx, session, "riemann-identities", worst, scale)


def check_commutator(scenario, ctx):
    """Antisymmetrized second covariant derivative against the curvature
    contraction; the sign-convention anchor."""
    from .geometry import commutator_residual
    session = ctx.session(scenario)
    if scenario.kind == "gauge":
        oneform = scenario.potential.components
    else:
        oneform = tuple(scenario.scalar_field for _ in range(scenario.chart.dim))
    worst, scale = 0.0, 0.0
    for fr in session.subset(16):
        worst = max(worst, commutator_residual(scenario.metric, oneform,
                                               fr.x, ctx.mode))
        scale = max(scale, float(np.max(np.abs(fr.geo.riemann)))
                    * float(np.max(np.abs(fr.geo.ginv))) + 1.0)
    return _report(ctx, session, "commutator", worst, scale)


def check_killing_catalog(scenario, ctx):
    if not scenario.killing:
        return None
    session = ctx.session(scenario)
    worst, scale = 0.0, 0.0
    for fr in session.frames:
        for xi in scenario.killing:
            _, _, _, _, cd = fr.xi_data(xi)
            worst = max(worst, float(np.max(np.abs(cd + cd.T))))
            scale = max(scale, float(np.max(np.abs(cd))))
    return _report(ctx, session, "killing-catalog", worst, scale,
                   note=f"{len(scenario.killing)} generators")


# -- gauge / model checks ------------------------------------------------------------

def check_field_equations(scenario, ctx):
    session = ctx.session(scenario)
    resid = session.on_shell_residual()
    scale = 0.0
    for fr in session.frames:
        if scenario.kind == "gauge":
            scale = max(scale, float(np.max(np.abs(
                fr.model_data(scenario.model).dP))))
        else:
            scale = max(scale, float(np.max(np.abs(fr.data.dP))))
    tol = ctx.tolerance("field-equations")
    if scenario.on_shell:
        passed = resid <= tol
        note = "declared on-shell"
        witness = False
    elif scenario.on_shell is False:
        passed = resid >= OFF_SHELL_FLOOR
        note = f"declared off-shell; residual must stay above {OFF_SHELL_FLOOR:.0e}"
        witness = True
    else:
        passed = True
        note = "on-shell status undeclared; residual reported only"
        witness = False
    return CheckReport("field-equations", scenario.name, float(resid),
                       float(scale), tol, bool(passed), len(session.points),
                       witness=witness, note=note)


def check_coincidence(scenario, ctx):
    """Canonical vs metric tensor, every model, every point; the metric side
    goes through the seeded derivative so the two routes are independent."""
    session = ctx.session(scenario)
    worst, scale = 0.0, 0.0
    if scenario.kind == "gauge":
        models = catalog_models()
        for fr in session.frames:
            for model in models:
                Tc = fr.canonical(model, with_derivatives=False)
                Tm = fr.metric_seeded(model)
                worst = max(worst, float(np.max(np.abs(Tc - Tm))))
                scale = max(scale, float(np.max(np.abs(Tc))))
        note = "models: " + ", ".join(m.describe() for m in models)
    else:
        for fr in session.frames:
            Tc = fr.canonical()
            Tm = fr.metric_seeded()
            worst = max(worst, float(np.max(np.abs(Tc - Tm))))
            scale = max(scale, float(np.max(np.abs(Tc))))
        note = "model: " + scenario.scalar_model.describe()
    return _report(ctx, session, "coincidence", worst, scale, note=note)


def check_symmetry_canonical(scenario, ctx):
    session = ctx.session(scenario)
    worst, scale = 0.0, 0.0
    for fr in session.frames:
        if scenario.kind == "gauge":
            Tc = fr.canonical(scenario.model, with_derivatives=False)
        else:
            Tc = fr.canonical()
        worst = max(worst, float(np.max(np.abs(Tc - Tc.T))))
        scale = max(scale, float(np.max(np.abs(Tc))))
    return _report(ctx, session, "symmetry-canonical", worst, scale)


def _random_metric(rng, n, signature):
    base = np.diag(np.array(signature, dtype=float))
    while True:
        bump = rng.normal(size=(n, n)) * 0.15
        g = base + bump + bump.T
        if np.linalg.cond(g) < 20.0:
            return g


def check_off_shell_identity(scenario, ctx):
    """(dL/dF_ac) F^b_c + dL/dg_ab on seeded random argument pairs, seeded
    derivative route on both sides."""
    if scenario.kind != "gauge":
        return None
    from .errors import DomainError
    session = ctx.session(scenario)
    n = scenario.chart.dim
    rng = np.random.default_rng(session.seed + 7)
    worst, scale = 0.0, 0.0
    trials = 200 if ctx.samples is None else max(20, ctx.samples)
    for _ in range(trials):
        for _attempt in range(50):
            raw = rng.normal(size=(n, n)) * 0.4
            F = raw - raw.T
            g = _random_metric(rng, n, scenario.signature)
            try:
                scenario.model.check_domain(float(
                    np.einsum("ab,ab", F, np.linalg.inv(g) @ F @ np.linalg.inv(g))))
                break
            except DomainError:
                continue
        else:
            raise ConfigError(
                f"could not draw arguments inside the {scenario.model.describe()} domain")
        P = dL_dF(scenario.model, F, g, method="seeded")
        G = dL_dg(scenario.model, F, g, method="seeded")
        term = np.einsum("ac,bc->ab", P, np.linalg.inv(g) @ F)
        worst = max(worst, float(np.max(np.abs(term + G))),
                    float(np.max(np.abs(term - term.T))) / 2.0)
        scale = max(scale, float(np.max(np.abs(term))))
    return CheckReport("off-shell-identity", scenario.name, float(worst),
                       float(scale), ctx.tolerance("off-shell-identity"),
                       worst <= ctx.tolerance("off-shell-identity") * (1 + scale),
                       trials, note=f"{trials} random argument pairs")


def _random_potential(chart, rng):
    """Mixed polynomial / trigonometric potential with bounded coefficients."""
    n = chart.dim
    comps = []
    for _ in range(n):
        lin = rng.normal(size=n) * 0.3
        quad = rng.normal(size=(n, n)) * 0.15
        trig = rng.normal(size=n) * 0.2
        freq = rng.integers(1, 3, size=n).astype(float)

        def comp(coords, lin=lin, quad=quad, trig=trig, freq=freq):
            total = 0.0
            for i in range(len(coords)):
                total = total + lin[i] * coords[i]
                total = total + trig[i] * _generic_sin(freq[i] * coords[i])
                for j in range(len(coords)):
                    total = total + quad[i, j] * coords[i] * coords[j]
            return total

        comps.append(comp)
    from .gauge import GaugePotential
    return GaugePotential(chart, tuple(comps))


def _generic_sin(x):
    from .scalars import sin
    return sin(x)


def check_bianchi(scenario, ctx, extra_potentials=8):
    """Cyclic covariant derivative of the field strength, for the scenario
    potential and a batch of seeded random potentials on the same chart."""
    if scenario.kind != "gauge":
        return None
    from .gauge import bianchi_residual
    session = ctx.session(scenario)
    rng = np.random.default_rng(session.seed + 11)
    potentials = [scenario.potential] + [
        _random_potential(scenario.chart, rng) for _ in range(extra_potentials)]
    worst, scale = 0.0, 0.0
    for pot in potentials:
        for fr in session.subset(12):
            worst = max(worst, bianchi_residual(pot, scenario.metric, fr.x, ctx.mode))
            scale = max(scale, 1.0)
    return _report(ctx, session, "bianchi", worst, scale,
                   note=f"{len(potentials)} potentials x {min(12, len(session.frames))} points")


def check_gauge_invariance(scenario, ctx):
    """Canonical and metric tensors must not move under A -> A + d(chi)."""
    if scenario.kind != "gauge" or not scenario.gauge_functions:
        return None
    session = ctx.session(scenario)
    worst, scale = 0.0, 0.0
    for chi in scenario.gauge_functions:
        shifted = gauge_shift(scenario.potential, chi)
        for fr in session.subset(16):
            fr2 = GaugeFrame(scenario.metric, shifted, fr.x, ctx.mode)
            Tc = fr.canonical(scenario.model, with_derivatives=False)
            Tc2 = fr2.canonical(scenario.model, with_derivatives=False)
            Tm = fr.metric_seeded(scenario.model)
            Tm2 = fr2.metric_seeded(scenario.model)
            worst = max(worst, float(np.max(np.abs(Tc2 - Tc))),
                        float(np.max(np.abs(Tm2 - Tm))))
            scale = max(scale, float(np.max(np.abs(Tc))))
    return _report(ctx, session, "gauge-invariance", worst, scale,
                   note=f"{len(scenario.gauge_functions)} gauge functions")


def check_trad_gauge_shift(scenario, ctx):
    """Witness: the traditional tensor must move under some gauge shift."""
    if scenario.kind != "gauge" or "trad-gauge-shift" not in scenario.witness_floors:
        return None
    session = ctx.session(scenario)
    best, scale = 0.0, 0.0
    for chi in scenario.gauge_functions:
        shifted = gauge_shift(scenario.potential, chi)
        for fr in session.subset(16):
            fr2 = GaugeFrame(scenario.metric, shifted, fr.x, ctx.mode)
            Tt = fr.traditional(scenario.model, with_derivatives=False)
            Tt2 = fr2.traditional(scenario.model, with_derivatives=False)
            best = max(best, float(np.max(np.abs(Tt2 - Tt))))
            scale = max(scale, float(np.max(np.abs(Tt))))
    return _witness_report(ctx, session, "trad-gauge-shift", best, scale)


def check_trad_asymmetry(scenario, ctx):
    """Witness: the traditional tensor's antisymmetric part must be sizable."""
    if scenario.kind != "gauge" or "trad-asymmetry" not in scenario.witness_floors:
        return None
    session = ctx.session(scenario)
    best, scale = 0.0, 0.0
    for fr in session.frames:
        Tt = fr.traditional(scenario.model, with_derivatives=False)
        best = max(best, float(np.max(np.abs(Tt - Tt.T))) / 2.0)
        scale = max(scale, float(np.max(np.abs(Tt))))
    return _witness_report(ctx, session, "trad-asymmetry", best, scale)


# -- conservation checks --------------------------------------------------------------

def _divergence_scale(fr, T, dT):
    gamma = fr.geo.gamma
    terms = [np.einsum("aab->b", dT),
             np.einsum("aae,eb->b", gamma, T),
             np.einsum("bae,ae->b", gamma, T)]
    return max(float(np.max(np.abs(t))) for t in terms)


def check_divergence_canonical(scenario, ctx):
    session = ctx.session(scenario)
    if not scenario.on_shell:
        return None
    gate = session.require_on_shell("divergence-canonical")
    if gate is not None:
        return gate
    worst, scale = 0.0, 0.0
    for fr in session.frames:
        if scenario.kind == "gauge":
            T, dT = fr.canonical(scenario.model), fr.dcanonical(scenario.model)
        else:
            T, dT = fr.canonical(), fr.dcanonical()
        worst = max(worst, float(np.max(np.abs(fr.divergence(T, dT)))))
        scale = max(scale, _divergence_scale(fr, T, dT))
    return _report(ctx, session, "divergence-canonical", worst, scale)


def check_divergence_metric(scenario, ctx):
    """Divergence of the metric tensor assembled from directionally seeded
    metric derivatives, an independent route from the canonical one."""
    session = ctx.session(scenario)
    if not scenario.on_shell:
        return None
    gate = session.require_on_shell("divergence-metric")
    if gate is not None:
        return gate
    worst, scale = 0.0, 0.0
    frames = session.subset(24)
    for fr in frames:
        geo = fr.geo
        n = fr.n
        if scenario.kind == "gauge":
            d = fr.model_data(scenario.model)
            T = fr.metric_seeded(scenario.model)
            dT = np.empty((n, n, n))
            for c in range(n):
                raw, draw = dL_dg_directional(scenario.model, fr.F, geo.g,
                                              fr.dF[c], geo.dg[c])
                dG = 0.5 * (draw + draw.T)
                dT[c] = (2.0 * dG + d.dL[c] * geo.ginv + d.L * geo.dginv[c])
        else:
            T = fr.metric_seeded()
            dT = fr.dcanonical()  # scalar metric tensor shares the chained derivative
        worst = max(worst, float(np.max(np.abs(fr.divergence(T, dT)))))
        scale = max(scale, _divergence_scale(fr, T, dT))
    return CheckReport("divergence-metric", scenario.name, float(worst),
                       float(scale), ctx.tolerance("divergence-metric"),
                       worst <= ctx.tolerance("divergence-metric") * (1 + scale),
                       len(frames))


def check_divergence_traditional(scenario, ctx):
    """On flat backgrounds the traditional divergence must vanish; on curved
    ones it must match minus the curvature contraction, with both terms
    individually above the witness floor."""
    if scenario.kind != "gauge":
        return None
    session = ctx.session(scenario)
    if not scenario.on_shell:
        return None
    gate = session.require_on_shell("divergence-traditional")
    if gate is not None:
        return gate
    flat = session.is_flat()
    worst_sum, worst_each, witness_mag, scale = 0.0, 0.0, 0.0, 0.0
    for fr in session.frames:
        T, dT = fr.traditional(scenario.model), fr.dtraditional(scenario.model)
        div = fr.divergence(T, dT)
        obs = fr.obstruction_term(scenario.model)
        worst_sum = max(worst_sum, float(np.max(np.abs(div + obs))))
        mags = (float(np.max(np.abs(div))), float(np.max(np.abs(obs))))
        worst_each = max(worst_each, *mags)
        witness_mag = max(witness_mag, min(mags))
        scale = max(scale, *mags, _divergence_scale(fr, T, dT))
    tol = ctx.tolerance("divergence-traditional")
    if flat:
        residual = max(worst_sum, worst_each)
        passed = residual <= max(ctx.tolerance("divergence-cross-form"),
                                 tol * 0.01) * (1.0 + scale)
        note = "flat background: divergence and curvature term both vanish"
        return CheckReport("divergence-traditional", scenario.name,
                           float(residual), float(scale), tol, bool(passed),
                           len(session.points), note=note)
    floor_rel = scenario.witness_floors.get("trad-obstruction", 1e-3)
    passed = (worst_sum <= tol * (1.0 + scale)
              and witness_mag >= floor_rel * scale)
    note = (f"curved background: cancellation residual {worst_sum:.3e}, "
            f"obstruction witness {witness_mag:.3e} vs floor {floor_rel * scale:.3e}")
    return CheckReport("divergence-traditional", scenario.name,
                       float(worst_sum), float(scale), tol, bool(passed),
                       len(session.points), witness=True, note=note)


def check_divergence_cross_form(scenario, ctx):
    session = ctx.session(scenario)
    if not scenario.on_shell:
        return None
    gate = session.require_on_shell("divergence-cross-form")
    if gate is not None:
        return gate
    worst, scale = 0.0, 0.0
    for fr in session.frames:
        if scenario.kind == "gauge":
            T, dT = fr.canonical(scenario.model), fr.dcanonical(scenario.model)
        else:
            T, dT = fr.canonical(), fr.dcanonical()
        direct = fr.divergence(T, dT)
        cross = fr.divergence_cross_form(T, dT)
        worst = max(worst, float(np.max(np.abs(cross - direct))))
        scale = max(scale, _divergence_scale(fr, T, dT))
    return _report(ctx, session, "divergence-cross-form", worst, scale)


def _master_residual(fr, T, dT, Tm, xi):
    div, j = fr.current_divergence(T, dT, xi)
    lie = fr.lie_metric(xi)
    second = 0.5 * float(np.einsum("ab,ab", Tm, lie))
    residual = abs(div - second)
    scale = max(abs(div), abs(second), float(np.max(np.abs(j))))
    return residual, scale, div, second


def check_master_identity(scenario, ctx):
    """D_a(T_c^ab xi_b) = (1/2) T_m^ab (Lie_xi g)_ab for arbitrary xi; for
    Killing xi both sides must vanish separately."""
    session = ctx.session(scenario)
    if not scenario.on_shell:
        return None
    gate = session.require_on_shell("master-identity")
    if gate is not None:
        return gate
    worst, scale = 0.0, 0.0
    vectors = list(scenario.test_vectors) + list(scenario.killing)
    for fr in session.frames:
        if scenario.kind == "gauge":
            T, dT = fr.canonical(scenario.model), fr.dcanonical(scenario.model)
            Tm = fr.metric_chain(scenario.model)
        else:
            T, dT = fr.canonical(), fr.dcanonical()
            Tm = fr.metric_chain()
        for xi in vectors:
            residual, sc, div, second = _master_residual(fr, T, dT, Tm, xi)
            worst = max(worst, residual)
            if xi.kind in ("killing", "constant"):
                worst = max(worst, abs(div), abs(second))
            scale = max(scale, sc)
    return _report(ctx, session, "master-identity", worst, scale,
                   note=f"{len(scenario.test_vectors)} arbitrary + "
                        f"{len(scenario.killing)} Killing generators")


def check_current_conservation(scenario, ctx):
    session = ctx.session(scenario)
    if not scenario.on_shell or not scenario.killing:
        return None
    gate = session.require_on_shell("current-conservation")
    if gate is not None:
        return gate
    worst, scale = 0.0, 0.0
    for fr in session.frames:
        if scenario.kind == "gauge":
            T, dT = fr.canonical(scenario.model), fr.dcanonical(scenario.model)
        else:
            T, dT = fr.canonical(), fr.dcanonical()
        for xi in scenario.killing:
            div, j = fr.current_divergence(T, dT, xi)
            worst = max(worst, abs(div))
            scale = max(scale, float(np.max(np.abs(j))), float(np.max(np.abs(T))))
    return _report(ctx, session, "current-conservation", worst, scale,
                   note=f"{len(scenario.killing)} Killing currents")


def check_current_traditional(scenario, ctx):
    """Traditional-tensor currents: conserved for covariantly constant
    generators, reported (and expected nonzero where a floor is declared)
    for the others."""
    if scenario.kind != "gauge":
        return None
    session = ctx.session(scenario)
    if not scenario.on_shell or not scenario.killing:
        return None
    gate = session.require_on_shell("current-traditional")
    if gate is not None:
        return gate
    worst_const, witness_mag, scale = 0.0, 0.0, 0.0
    n_const = 0
    for fr in session.frames:
        T, dT = fr.traditional(scenario.model), fr.dtraditional(scenario.model)
        for xi in scenario.killing:
            div, j = fr.current_divergence(T, dT, xi)
            scale = max(scale, float(np.max(np.abs(j))), float(np.max(np.abs(T))))
            if xi.kind == "constant":
                worst_const = max(worst_const, abs(div))
            else:
                witness_mag = max(witness_mag, abs(div))
    n_const = sum(1 for xi in scenario.killing if xi.kind == "constant")
    tol = ctx.tolerance("current-traditional")
    passed = worst_const <= tol * (1.0 + scale)
    floor_rel = scenario.witness_floors.get("trad-rotation-current")
    note = (f"{n_const} constant generators conserved; "
            f"largest non-constant current divergence {witness_mag:.3e}")
    witness = False
    if floor_rel is not None:
        witness = True
        passed = passed and witness_mag >= floor_rel * scale
        note += f" (floor {floor_rel * scale:.3e})"
    return CheckReport("current-traditional", scenario.name,
                       float(worst_const), float(scale), tol, bool(passed),
                       len(session.points), witness=witness, note=note)


def check_scalar_lie(scenario, ctx):
    """Lie derivative of the Lagrangian scalar through its tensor arguments
    against the direct transport term; holds for any field configuration."""
    session = ctx.session(scenario)
    worst, scale = 0.0, 0.0
    vectors = list(scenario.test_vectors) + list(scenario.killing)
    if not vectors:
        return None
    for fr in session.frames:
        if scenario.kind == "gauge":
            d = fr.model_data(scenario.model)
            F, dF = fr.F, fr.dF
            for xi in vectors:
                xivals, dxi = xi.jets(fr.x, ctx.mode)
                lieF = (np.einsum("c,cab->ab", xivals, dF)
                        + np.einsum("ac,cb->ab", dxi, F)
                        + np.einsum("bc,ac->ab", dxi, F))
                lie_g = fr.lie_metric(xi)
                chain = (float(np.einsum("ab,ab", d.P, lieF))
                         + float(np.einsum("ab,ab", d.G, lie_g)))
                direct = float(xivals @ d.dL)
                worst = max(worst, abs(chain - direct))
                scale = max(scale, abs(chain), abs(direct))
        else:
            d = fr.data
            for xi in vectors:
                xivals, dxi = xi.jets(fr.x, ctx.mode)
                liev = (np.einsum("c,ca->a", xivals, fr.dv)
                        + np.einsum("ac,c->a", dxi, fr.v))
                lie_g = fr.lie_metric(xi)
                chain = (float(d.P @ liev)
                         + float(np.einsum("ab,ab", d.G, lie_g)))
                direct = float(xivals @ d.dL)
                worst = max(worst, abs(chain - direct))
                scale = max(scale, abs(chain), abs(direct))
    return _report(ctx, session, "scalar-lie", worst, scale)


CHECKS = {
    "metric-compatibility": check_metric_compatibility,
    "riemann-identities": check_riemann_identities,
    "commutator": check_commutator,
    "killing-catalog": check_killing_catalog,
    "field-equations": check_field_equations,
    "coincidence": check_coincidence,
    "symmetry-canonical": check_symmetry_canonical,
    "off-shell-identity": check_off_shell_identity,
    "bianchi": check_bianchi,
    "gauge-invariance": check_gauge_invariance,
    "trad-gauge-shift": check_trad_gauge_shift,
    "trad-asymmetry": check_trad_asymmetry,
    "divergence-canonical": check_divergence_canonical,
    "divergence-metric": check_divergence_metric,
    "divergence-traditional": check_divergence_traditional,
    "divergence-cross-form": check_divergence_cross_form,
    "master-identity": check_master_identity,
    "current-conservation": check_current_conservation,
    "current-traditional": check_current_traditional,
    "scalar-lie": check_scalar_lie,
}


def run_checks(scenarios, check_names, ctx):
    """Run the selected checks over the selected scenarios; reports come back
    in canonical (scenario, check) order regardless of execution order."""
    unknown = [c for c in check_names if c not in CHECKS]
    if unknown:
        raise ConfigError(f"unknown checks: {', '.join(unknown)}; "
                          f"available: {', '.join(sorted(CHECKS))}")
    reports = []
    for scenario in scenarios:
        for name in check_names:
            report = CHECKS[name](scenario, ctx)
            if report is not None:
                reports.append(report)
    reports.sort(key=lambda r: (r.scenario, r.name))
    return reports


# -- convergence study -----------------------------------------------------------------

#: Observable measured per step: "residual" reruns the check in fd mode and
#: takes its residual; "fd-vs-dual" measures the deviation of the check's
#: primary derivative quantity from the dual-mode reference (used where the
#: check residual cancels structurally at any step size).
CONVERGENCE_OBSERVABLES = {
    "divergence-canonical": "residual",
    "divergence-traditional": "residual",
    "master-identity": "residual",
    "current-conservation": "residual",
    "field-equations": "residual",
    "bianchi": "fd-vs-dual",
}


@dataclass(frozen=True)
class ConvergenceReport:
    check: str
    scenario: str
    steps: tuple
    residuals: tuple
    orders: tuple
    dual_reference: float
    observable: str

    def to_dict(self):
        return {
            "check": self.check,
            "scenario": self.scenario,
            "steps": list(self.steps),
            "residuals": list(self.residuals),
            "observed_orders": list(self.orders),
            "dual_reference": self.dual_reference,
            "observable": self.observable,
        }


def _bianchi_fd_vs_dual(scenario, h, points):
    """Max deviation of the covariant field-strength derivative between fd
    and dual engines; the cyclic sum itself cancels identically in both."""
    from .gauge import field_strength_jets
    from .geometry import GeometryFrame
    worst = 0.0
    for x in points:
        geo_d = GeometryFrame(scenario.metric, x, DUAL)
        geo_f = GeometryFrame(scenario.metric, x, fd_mode(h))
        F_d, dF_d = field_strength_jets(scenario.potential, x, DUAL)
        F_f, dF_f = field_strength_jets(scenario.potential, x, fd_mode(h))
        cd_d = (dF_d - np.einsum("dca,db->cab", geo_d.gamma, F_d)
                - np.einsum("dcb,ad->cab", geo_d.gamma, F_d))
        cd_f = (dF_f - np.einsum("dca,db->cab", geo_f.gamma, F_f)
                - np.einsum("dcb,ad->cab", geo_f.gamma, F_f))
        worst = max(worst, float(np.max(np.abs(cd_f - cd_d))))
    return worst


def convergence_study(check_name, scenario, steps=None, samples=8, seed=None):
    """Rerun a check with finite-difference derivatives over a sequence of
    halved steps and report the observed order of accuracy."""
    if check_name not in CONVERGENCE_OBSERVABLES:
        raise ConfigError(
            f"no convergence observable for {check_name!r}; choose one of "
            f"{', '.join(sorted(CONVERGENCE_OBSERVABLES))}")
    steps = tuple(steps if steps is not None else (1e-2, 5e-3, 2.5e-3, 1.25e-3))
    if len(steps) < 3:
        raise ConfigError("convergence studies need at least 3 steps")
    observable = CONVERGENCE_OBSERVABLES[check_name]
    residuals = []
    if observable == "fd-vs-dual":
        points = scenario.chart.sample_points(samples, seed or scenario.seed)
        for h in steps:
            residuals.append(_bianchi_fd_vs_dual(scenario, h, points))
        dual_reference = 0.0
    else:
        for h in steps:
            ctx = RunContext(mode=fd_mode(h), samples=samples, seed=seed)
            report = CHECKS[check_name](scenario, ctx)
            if report is None:
                raise ConfigError(
                    f"check {check_name!r} does not apply to scenario {scenario.name!r}")
            residuals.append(report.max_residual)
        dual_ctx = RunContext(mode=DUAL, samples=samples, seed=seed)
        dual_reference = CHECKS[check_name](scenario, dual_ctx).max_residual
    orders = tuple(
        float(np.log2(residuals[i] / residuals[i + 1]))
        if residuals[i + 1] > 0 else float("nan")
        for i in range(len(residuals) - 1))
    return ConvergenceReport(check_name, scenario.name, steps,
                             tuple(residuals), orders, dual_reference,
                             observable)
