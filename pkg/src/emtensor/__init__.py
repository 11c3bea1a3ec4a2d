"""Stress tensors from arbitrary electromagnetic Lagrangians on arbitrary
charts, with a numerical verification suite for the identities that follow
from general covariance."""

from .errors import (ConfigError, DomainError, EmtensorError, ExpressionError,
                     GateError, SingularMetricError)
from .expressions import ExprMap, parse_expression
from .gauge import (FieldStrength, GaugePotential, bianchi_residual,
                    field_equation_residual, field_strength, gauge_shift)
from .geometry import (Chart, Connection, GeometryFrame, MetricField,
                       RiemannValue, TensorField, VectorField, christoffel,
                       commutator_residual, covariant_derivative,
                       killing_residual, lie_derivative_02, riemann)
from .lagrangian import (LagrangianModel, ScalarFieldModel, catalog_models,
                         dL_dF, dL_dg, evaluate, make_model,
                         make_scalar_model, scalar_dL)
from .scalars import (DUAL, DerivativeMode, Dual, FdScheme, fd_mode,
                      fd_partial, jet1, jet2, seed_partial, seed_second)
from .scenarios import Scenario, catalog, catalog_names, find_scenario, load_scenario
from .stress import (GaugeFrame, NoetherCurrent, ScalarFrame, StressResult,
                     canonical_tensor, metric_tensor, noether_current,
                     scalar_canonical_tensor, traditional_tensor)
from .verify import (CheckReport, CheckSpec, RunContext, convergence_study,
                     run_checks)

__version__ = "0.1.0"
