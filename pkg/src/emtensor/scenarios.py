"""Scenario catalog and scenario-file ingestion.

A scenario bundles a chart, a metric, a gauge potential (or scalar field), a
Lagrangian model, the declared isometry generators, arbitrary test vector
fields, gauge functions and witness floors.  Documents are plain JSON; the
built-in catalog is expressed as documents too, so loading a user file and
loading a catalog entry are the same code path and round-tripping is exact.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigError, GateError
from .expressions import parse_expression
from .gauge import GaugePotential, field_equation_residual
from .geometry import (Chart, MetricField, VectorField,
                       covariant_constant_residual, killing_residual)
from .lagrangian import (make_model, make_scalar_model)
from .scalars import DUAL, jet1
from .stress import ScalarFrame

_DEFAULT_BOUND = (-1.2, 1.2)
KILLING_GATE_TOL = 1e-10
CONSTANT_GATE_TOL = 1e-12
ON_SHELL_GATE_TOL = 1e-8
OFF_SHELL_GATE_FLOOR = 1e-6
_GATE_POINTS = 6


@dataclass(frozen=True)
class Scenario:
    name: str
    chart: Chart
    metric: MetricField
    signature: tuple
    model: object
    potential: object  # GaugePotential or None
    scalar_field: object  # smooth map or None
    scalar_model: object
    killing: tuple
    test_vectors: tuple
    gauge_functions: tuple
    on_shell: bool
    witness_floors: dict
    seed: int
    samples: int
    document: dict

    @property
    def kind(self):
        return "scalar" if self.scalar_field is not None else "gauge"

    def sample_points(self, count=None, seed=None):
        return self.chart.sample_points(count or self.samples,
                                        self.seed if seed is None else seed)

    def serialize(self):
        return dict(self.document)


def _require(doc, key, typ, context):
    if key not in doc:
        raise ConfigError(f"{context}: missing required field {key!r}")
    value = doc[key]
    if typ is not None and not isinstance(value, typ):
        raise ConfigError(
            f"{context}: field {key!r} must be {typ.__name__}, got {type(value).__name__}")
    return value


def _parse_vector(entry, chart, context, default_kind="arbitrary"):
    if isinstance(entry, dict):
        comps = entry.get("components")
        kind = entry.get("kind", default_kind)
        name = entry.get("name", "")
    else:
        comps, kind, name = entry, default_kind, ""
    if not isinstance(comps, (list, tuple)) or len(comps) != chart.dim:
        raise ConfigError(f"{context}: needs {chart.dim} components")
    maps = tuple(parse_expression(c, chart.names) for c in comps)
    return VectorField(chart, maps, kind=kind, name=name)


def load_scenario(doc, run_gates=True):
    """Build a Scenario from a document, running every declared gate."""
    if not isinstance(doc, dict):
        raise ConfigError("scenario document must be a JSON object")
    name = _require(doc, "name", str, "scenario")
    ctxt = f"scenario {name!r}"
    n = _require(doc, "dimension", int, ctxt)
    if n < 2:
        raise ConfigError(f"{ctxt}: dimension must be >= 2, got {n}")
    coords = _require(doc, "coordinates", list, ctxt)
    if len(coords) != n:
        raise ConfigError(f"{ctxt}: expected {n} coordinate names, got {len(coords)}")
    bounds_doc = doc.get("bounds", {})
    bounds = tuple(tuple(bounds_doc.get(c, _DEFAULT_BOUND)) for c in coords)
    chart = Chart(tuple(coords), bounds)

    signature = tuple(doc.get("signature", [-1] + [1] * (n - 1)))
    if any(s not in (-1, 1) for s in signature):
        raise ConfigError(f"{ctxt}: signature entries must be +-1")

    metric_doc = _require(doc, "metric", dict, ctxt)
    comp_doc = _require(metric_doc, "components", dict, f"{ctxt} metric")
    comps = {}
    for key, expr in comp_doc.items():
        if len(key) != 2 or not key.isdigit():
            raise ConfigError(f"{ctxt}: metric key {key!r} must be two digits 'ab'")
        a, b = int(key[0]), int(key[1])
        if a > b:
            raise ConfigError(
                f"{ctxt}: metric key {key!r} has a > b; only upper-triangle keys are accepted")
        if b >= n:
            raise ConfigError(f"{ctxt}: metric key {key!r} exceeds dimension {n}")
        comps[(a, b)] = parse_expression(expr, chart.names)
    metric = MetricField(chart, comps, signature)

    has_potential = "potential" in doc
    has_scalar = "scalar_field" in doc
    if has_potential == has_scalar:
        raise ConfigError(f"{ctxt}: exactly one of 'potential' or 'scalar_field' is required")

    potential = None
    scalar_field = None
    scalar_model = None
    model_doc = _require(doc, "model", dict, ctxt)
    model_kind = _require(model_doc, "kind", str, f"{ctxt} model")
    params = {k: v for k, v in model_doc.items() if k != "kind"}
    if has_potential:
        pot_doc = _require(doc, "potential", dict, ctxt)
        pcomps = _require(pot_doc, "components", list, f"{ctxt} potential")
        if len(pcomps) != n:
            raise ConfigError(f"{ctxt}: potential needs {n} components")
        potential = GaugePotential(chart, tuple(
            parse_expression(c, chart.names) for c in pcomps))
        model = make_model(model_kind, params)
    else:
        scalar_field = parse_expression(doc["scalar_field"], chart.names)
        scalar_model = make_scalar_model(model_kind)
        model = None

    killing = tuple(_parse_vector(e, chart, f"{ctxt} killing", "killing")
                    for e in doc.get("killing", []))
    test_vectors = tuple(_parse_vector(e, chart, f"{ctxt} test vector")
                         for e in doc.get("test_vectors", []))
    gauge_functions = tuple(parse_expression(e, chart.names)
                            for e in doc.get("gauge_functions", []))

    on_shell = doc.get("on_shell")  # True / False / None (undeclared)
    if on_shell is not None:
        on_shell = bool(on_shell)
    scenario = Scenario(
        name=name, chart=chart, metric=metric, signature=signature,
        model=model, potential=potential, scalar_field=scalar_field,
        scalar_model=scalar_model, killing=killing, test_vectors=test_vectors,
        gauge_functions=gauge_functions,
        on_shell=on_shell,
        witness_floors=dict(doc.get("witness_floors", {})),
        seed=int(doc.get("seed", 0)), samples=int(doc.get("samples", 64)),
        document=doc)
    if run_gates:
        run_scenario_gates(scenario)
    return scenario


def run_scenario_gates(scenario):
    """Eagerly verify every declared property of a scenario.

    Raises GateError naming the offending field and the measured residual.
    """
    points = scenario.chart.sample_points(_GATE_POINTS, scenario.seed + 90001)
    for idx, xi in enumerate(scenario.killing):
        worst = max(float(np.max(np.abs(killing_residual(scenario.metric, xi, x))))
                    for x in points)
        label = xi.name or f"killing[{idx}]"
        if worst > KILLING_GATE_TOL:
            raise GateError(
                f"scenario {scenario.name!r}: {label} declared Killing but "
                f"residual {worst:.3e} > {KILLING_GATE_TOL:.0e}")
        if xi.kind == "constant":
            for x in points:
                _, dxi = xi.jets(x)
                if float(np.max(np.abs(dxi))) > CONSTANT_GATE_TOL:
                    raise GateError(
                        f"scenario {scenario.name!r}: {label} declared constant but "
                        f"has nonvanishing coordinate partials")
            cc = max(covariant_constant_residual(scenario.metric, xi, x) for x in points)
            if cc > CONSTANT_GATE_TOL:
                raise GateError(
                    f"scenario {scenario.name!r}: {label} declared constant but "
                    f"is not covariantly constant (residual {cc:.3e})")
    if scenario.on_shell is None:
        return  # undeclared: nothing to verify either way
    residual = on_shell_residual(scenario, points)
    if scenario.on_shell and residual > ON_SHELL_GATE_TOL:
        raise GateError(
            f"scenario {scenario.name!r} declared on-shell but field-equation "
            f"residual is {residual:.3e} > {ON_SHELL_GATE_TOL:.0e}")
    if scenario.on_shell is False and residual < OFF_SHELL_GATE_FLOOR:
        raise GateError(
            f"scenario {scenario.name!r} declared off-shell but field-equation "
            f"residual is only {residual:.3e} < {OFF_SHELL_GATE_FLOOR:.0e}")


def on_shell_residual(scenario, points, mode=DUAL):
    worst = 0.0
    for x in points:
        if scenario.kind == "gauge":
            res = field_equation_residual(scenario.model, scenario.potential,
                                          scenario.metric, x, mode)
            worst = max(worst, float(np.max(np.abs(res))))
        else:
            frame = ScalarFrame(scenario.metric, scenario.scalar_field,
                                scenario.scalar_model, x, mode)
            worst = max(worst, abs(frame.field_equation()))
    return worst


# -- built-in catalog -------------------------------------------------------------

def _minkowski_metric(names):
    comps = {"".join((str(i), str(i))): ("-1" if i == 0 else "1")
             for i in range(len(names))}
    return {"components": comps}


_MINK4_KILLING = [
    {"components": ["1", "0", "0", "0"], "kind": "constant", "name": "translation-t"},
    {"components": ["0", "1", "0", "0"], "kind": "constant", "name": "translation-x"},
    {"components": ["0", "0", "1", "0"], "kind": "constant", "name": "translation-y"},
    {"components": ["0", "0", "0", "1"], "kind": "constant", "name": "translation-z"},
    {"components": ["x", "t", "0", "0"], "kind": "killing", "name": "boost-tx"},
    {"components": ["y", "0", "t", "0"], "kind": "killing", "name": "boost-ty"},
    {"components": ["z", "0", "0", "t"], "kind": "killing", "name": "boost-tz"},
    {"components": ["0", "-y", "x", "0"], "kind": "killing", "name": "rotation-xy"},
    {"components": ["0", "-z", "0", "x"], "kind": "killing", "name": "rotation-xz"},
    {"components": ["0", "0", "-z", "y"], "kind": "killing", "name": "rotation-yz"},
]

_MINK4_TEST_VECTORS = [
    {"components": ["x", "sin(t)", "0", "0"], "name": "shear-wave"},
    {"components": ["t*y", "0.3*x^2", "cos(z)", "0.1*t"], "name": "poly-mix"},
    {"components": ["sin(x)", "exp(0.2*y)", "t", "z^2"], "name": "trig-exp"},
    {"components": ["0.5*z", "x*y", "t^2", "cos(x)"], "name": "quadratic"},
    {"components": ["exp(0.1*t)", "0", "sin(y)", "x"], "name": "drift"},
]

_SPHERICAL_KILLING = [
    {"components": ["1", "0", "0", "0"], "kind": "constant", "name": "translation-t"},
    {"components": ["0", "0", "0", "1"], "kind": "killing", "name": "rotation-z"},
    {"components": ["0", "0", "-sin(ph)", "-cos(th)/sin(th)*cos(ph)"],
     "kind": "killing", "name": "rotation-x"},
    {"components": ["0", "0", "cos(ph)", "-cos(th)/sin(th)*sin(ph)"],
     "kind": "killing", "name": "rotation-y"},
]

_SPHERICAL_TEST_VECTORS = [
    {"components": ["r", "sin(t)", "0", "0"], "name": "radial-mix"},
    {"components": ["0.2*t", "0.1*r^2", "cos(ph)*0.1", "0"], "name": "poly"},
    {"components": ["sin(th)", "0", "0.3/r", "0.1*t"], "name": "angular"},
    {"components": ["0", "cos(t)*0.2", "0", "0.2/r"], "name": "breathing"},
    {"components": ["0.1*r*t", "0", "sin(ph)*0.2", "cos(th)*0.1"], "name": "twist"},
]

_SPHERICAL_BOUNDS = {"t": [-1.0, 1.0], "r": [3.0, 7.0],
                     "th": [0.6, 2.5], "ph": [0.3, 5.9]}


CATALOG_DOCUMENTS = [
    {
        "name": "minkowski4-planewave",
        "dimension": 4,
        "signature": [-1, 1, 1, 1],
        "coordinates": ["t", "x", "y", "z"],
        "metric": _minkowski_metric("txyz"),
        "potential": {"components": ["0", "0", "0.3*cos(1.7*(t - x))", "0"]},
        "model": {"kind": "maxwell"},
        "on_shell": True,
        "killing": _MINK4_KILLING,
        "test_vectors": _MINK4_TEST_VECTORS,
        "gauge_functions": ["0.4*t*x", "0.2*x^2 - 0.1*t*y"],
        "seed": 11,
        "samples": 64,
    },
    {
        "name": "minkowski4-planewave-borninfeld",
        "dimension": 4,
        "signature": [-1, 1, 1, 1],
        "coordinates": ["t", "x", "y", "z"],
        "metric": _minkowski_metric("txyz"),
        "potential": {"components": ["0", "0", "0.3*cos(1.7*(t - x))", "0"]},
        "model": {"kind": "born-infeld", "beta": 2.0},
        "on_shell": True,
        "killing": _MINK4_KILLING,
        "test_vectors": _MINK4_TEST_VECTORS,
        "gauge_functions": ["0.4*t*x"],
        "seed": 12,
        "samples": 64,
    },
    {
        # Constant electric field in a gauge chosen to exhibit every negative
        # claim about the traditional tensor: asymmetry, gauge dependence and
        # the non-conserved rotation current.
        "name": "minkowski4-constant-e",
        "dimension": 4,
        "signature": [-1, 1, 1, 1],
        "coordinates": ["t", "x", "y", "z"],
        "metric": _minkowski_metric("txyz"),
        "potential": {"components": ["t + 0.5*y", "-t", "0.5*t", "0"]},
        "model": {"kind": "maxwell"},
        "on_shell": True,
        "killing": _MINK4_KILLING,
        "test_vectors": _MINK4_TEST_VECTORS,
        "gauge_functions": ["0.3*t^2", "0.5*t*x"],
        "witness_floors": {"trad-asymmetry": 0.1, "trad-gauge-shift": 0.1,
                           "trad-rotation-current": 1e-3},
        "seed": 13,
        "samples": 64,
    },
    {
        "name": "minkowski4-constant-e-quartic",
        "dimension": 4,
        "signature": [-1, 1, 1, 1],
        "coordinates": ["t", "x", "y", "z"],
        "metric": _minkowski_metric("txyz"),
        "potential": {"components": ["0", "-t", "0", "0"]},
        "model": {"kind": "power-series", "coeffs": [-0.25, 0.05]},
        "on_shell": True,
        "killing": _MINK4_KILLING,
        "test_vectors": _MINK4_TEST_VECTORS,
        "gauge_functions": ["0.3*t^2"],
        "seed": 14,
        "samples": 64,
    },
    {
        "name": "minkowski4-constant-b",
        "dimension": 4,
        "signature": [-1, 1, 1, 1],
        "coordinates": ["t", "x", "y", "z"],
        "metric": _minkowski_metric("txyz"),
        "potential": {"components": ["0", "0", "0.8*x", "0"]},
        "model": {"kind": "maxwell"},
        "on_shell": True,
        "killing": _MINK4_KILLING,
        "test_vectors": _MINK4_TEST_VECTORS,
        "gauge_functions": ["0.2*x*y"],
        "seed": 15,
        "samples": 64,
    },
    {
        "name": "minkowski4-coulomb-spherical",
        "dimension": 4,
        "signature": [-1, 1, 1, 1],
        "coordinates": ["t", "r", "th", "ph"],
        "bounds": _SPHERICAL_BOUNDS,
        "metric": {"components": {"00": "-1", "11": "1", "22": "r^2",
                                  "33": "r^2*sin(th)^2"}},
        "potential": {"components": ["0.5/r", "0", "0", "0"]},
        "model": {"kind": "maxwell"},
        "on_shell": True,
        "killing": _SPHERICAL_KILLING,
        "test_vectors": _SPHERICAL_TEST_VECTORS,
        "gauge_functions": ["0.3*t*r"],
        "seed": 16,
        "samples": 64,
    },
    {
        "name": "minkowski2-constant-e",
        "dimension": 2,
        "signature": [-1, 1],
        "coordinates": ["t", "x"],
        "metric": {"components": {"00": "-1", "11": "1"}},
        "potential": {"components": ["0", "-0.9*t"]},
        "model": {"kind": "maxwell"},
        "on_shell": True,
        "killing": [
            {"components": ["1", "0"], "kind": "constant", "name": "translation-t"},
            {"components": ["0", "1"], "kind": "constant", "name": "translation-x"},
            {"components": ["x", "t"], "kind": "killing", "name": "boost-tx"},
        ],
        "test_vectors": [
            {"components": ["x", "sin(t)"], "name": "shear"},
            {"components": ["t*x", "0.3*x^2"], "name": "poly"},
            {"components": ["sin(x)", "cos(t)"], "name": "trig"},
            {"components": ["0.5*t^2", "x"], "name": "quad"},
            {"components": ["exp(0.2*x)", "t"], "name": "exp"},
        ],
        "gauge_functions": ["0.4*t*x"],
        "seed": 17,
        "samples": 64,
    },
    {
        "name": "minkowski3-planewave",
        "dimension": 3,
        "signature": [-1, 1, 1],
        "coordinates": ["t", "x", "y"],
        "metric": {"components": {"00": "-1", "11": "1", "22": "1"}},
        "potential": {"components": ["0", "0", "0.4*cos(1.3*(t - x))"]},
        "model": {"kind": "maxwell"},
        "on_shell": True,
        "killing": [
            {"components": ["1", "0", "0"], "kind": "constant", "name": "translation-t"},
            {"components": ["0", "1", "0"], "kind": "constant", "name": "translation-x"},
            {"components": ["0", "0", "1"], "kind": "constant", "name": "translation-y"},
            {"components": ["x", "t", "0"], "kind": "killing", "name": "boost-tx"},
            {"components": ["y", "0", "t"], "kind": "killing", "name": "boost-ty"},
            {"components": ["0", "-y", "x"], "kind": "killing", "name": "rotation-xy"},
        ],
        "test_vectors": [
            {"components": ["x", "sin(t)", "0"], "name": "shear"},
            {"components": ["t*y", "0.3*x^2", "cos(y)"], "name": "poly"},
            {"components": ["sin(x)", "t", "0.1*y"], "name": "trig"},
            {"components": ["0.5*y", "x*y", "t^2"], "name": "quad"},
            {"components": ["exp(0.1*t)", "0", "sin(y)"], "name": "drift"},
        ],
        "gauge_functions": ["0.4*t*x"],
        "seed": 18,
        "samples": 64,
    },
    {
        "name": "schwarzschild-coulomb",
        "dimension": 4,
        "signature": [-1, 1, 1, 1],
        "coordinates": ["t", "r", "th", "ph"],
        "bounds": _SPHERICAL_BOUNDS,
        "metric": {"components": {"00": "-(1 - 2/r)", "11": "1/(1 - 2/r)",
                                  "22": "r^2", "33": "r^2*sin(th)^2"}},
        "potential": {"components": ["0.1/r", "0", "0", "0"]},
        "model": {"kind": "maxwell"},
        "on_shell": True,
        "killing": [
            {"components": ["1", "0", "0", "0"], "kind": "killing", "name": "static-t"},
            {"components": ["0", "0", "0", "1"], "kind": "killing", "name": "rotation-z"},
            {"components": ["0", "0", "-sin(ph)", "-cos(th)/sin(th)*cos(ph)"],
             "kind": "killing", "name": "rotation-x"},
            {"components": ["0", "0", "cos(ph)", "-cos(th)/sin(th)*sin(ph)"],
             "kind": "killing", "name": "rotation-y"},
        ],
        "test_vectors": _SPHERICAL_TEST_VECTORS,
        "gauge_functions": ["0.3*t*r"],
        "witness_floors": {"trad-obstruction": 1e-3},
        "seed": 19,
        "samples": 64,
    },
    {
        "name": "desitter-offshell",
        "dimension": 4,
        "signature": [-1, 1, 1, 1],
        "coordinates": ["t", "r", "th", "ph"],
        "bounds": {"t": [-1.0, 1.0], "r": [0.8, 2.2],
                   "th": [0.6, 2.5], "ph": [0.3, 5.9]},
        "metric": {"components": {"00": "-(1 - 0.09*r^2)", "11": "1/(1 - 0.09*r^2)",
                                  "22": "r^2", "33": "r^2*sin(th)^2"}},
        "potential": {"components": ["0.2*r^2", "0.1*t*r", "0.3*cos(th)",
                                     "0.05*r^2*sin(ph)"]},
        "model": {"kind": "maxwell"},
        "on_shell": False,
        "killing": [
            {"components": ["1", "0", "0", "0"], "kind": "killing", "name": "static-t"},
            {"components": ["0", "0", "0", "1"], "kind": "killing", "name": "rotation-z"},
        ],
        "test_vectors": _SPHERICAL_TEST_VECTORS,
        "gauge_functions": ["0.2*t*r"],
        "seed": 20,
        "samples": 64,
    },
    {
        # Monopole-like field on the unit sphere: a compact curved background
        # in Riemannian signature where the curvature obstruction is order one.
        "name": "sphere2-monopole",
        "dimension": 2,
        "signature": [1, 1],
        "coordinates": ["th", "ph"],
        "bounds": {"th": [0.5, 2.6], "ph": [0.3, 5.9]},
        "metric": {"components": {"00": "1", "11": "sin(th)^2"}},
        "potential": {"components": ["0", "0.7*cos(th)"]},
        "model": {"kind": "maxwell"},
        "on_shell": True,
        "killing": [
            {"components": ["0", "1"], "kind": "killing", "name": "rotation-z"},
            {"components": ["-sin(ph)", "-cos(th)/sin(th)*cos(ph)"],
             "kind": "killing", "name": "rotation-x"},
            {"components": ["cos(ph)", "-cos(th)/sin(th)*sin(ph)"],
             "kind": "killing", "name": "rotation-y"},
        ],
        "test_vectors": [
            {"components": ["th", "sin(ph)"], "name": "drift"},
            {"components": ["sin(th)", "cos(ph)"], "name": "trig"},
            {"components": ["0.2*ph", "0.3*th"], "name": "mix"},
            {"components": ["cos(th)^2", "0.1"], "name": "band"},
            {"components": ["0.1", "th*0.2"], "name": "slide"},
        ],
        "gauge_functions": ["0.2*th*ph"],
        "witness_floors": {"trad-obstruction": 1e-3},
        "seed": 21,
        "samples": 64,
    },
    {
        # No declared isometries at all; off-shell polynomial potential on a
        # gently bumped Lorentzian metric.
        "name": "bumpy-offshell",
        "dimension": 4,
        "signature": [-1, 1, 1, 1],
        "coordinates": ["t", "x", "y", "z"],
        "metric": {"components": {
            "00": "-1 - 0.1*sin(x)*cos(y)",
            "11": "1 + 0.1*cos(x + 0.5*z)",
            "22": "1 + 0.1*sin(y)*sin(t)",
            "33": "1 + 0.1*cos(z)",
            "01": "0.05*sin(y + z)",
            "12": "0.05*cos(t)*sin(x)",
        }},
        "potential": {"components": ["0.2*x*y", "0.1*t^2", "0.3*sin(z)", "0.1*x"]},
        "model": {"kind": "maxwell"},
        "on_shell": False,
        "killing": [],
        "test_vectors": _MINK4_TEST_VECTORS,
        "gauge_functions": ["0.3*t*x"],
        "seed": 22,
        "samples": 64,
    },
    {
        "name": "scalar-wave",
        "dimension": 4,
        "signature": [-1, 1, 1, 1],
        "coordinates": ["t", "x", "y", "z"],
        "metric": _minkowski_metric("txyz"),
        "scalar_field": "0.6*cos(1.1*(t - z))",
        "model": {"kind": "massless-scalar"},
        "on_shell": True,
        "killing": _MINK4_KILLING,
        "test_vectors": _MINK4_TEST_VECTORS,
        "seed": 23,
        "samples": 64,
    },
]


def catalog():
    """Load every built-in scenario, gates included."""
    return [load_scenario(doc) for doc in CATALOG_DOCUMENTS]


def catalog_names():
    return [doc["name"] for doc in CATALOG_DOCUMENTS]


def find_scenario(name):
    for doc in CATALOG_DOCUMENTS:
        if doc["name"] == name:
            return load_scenario(doc)
    raise ConfigError(f"unknown scenario {name!r}; catalog: {', '.join(catalog_names())}")
