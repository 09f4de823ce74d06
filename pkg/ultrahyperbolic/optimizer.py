# Copyright 2026 The ultrahyperbolic Authors. All Rights Reserved.
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#    http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or  implied.
# See the License for the specific language governing permissions and
# limitations under the License.
# ============================================================================
"""Gradient descent over products of pseudo-hyperboloid points.

Three modes share one descent loop:

  * PSEUDO_RIEMANNIAN steps along exp_x(-eta chi), where
    chi = Pi_x(G Df(x)) and Df(x) = Pi_x(G grad f(x)). Unlike -Df(x), chi is
    always a descent direction: <Df(x), chi>_q = ||Df(x)||^2.
  * EUCLIDEAN_VIA_PHI keeps unconstrained parameters z and runs plain
    gradient descent on f o phi.
  * FLAT runs plain gradient descent in R^k, the Euclidean baseline.
"""

import abc
import dataclasses
import enum
from typing import Callable, List, NamedTuple, Optional, Union

from absl import logging
from google.rpc import code_pb2
import numpy as np

from ultrahyperbolic import error
from ultrahyperbolic import manifold_maps
from ultrahyperbolic import pseudo_geometry

Signature = pseudo_geometry.Signature

_ARMIJO_CONSTANT = 1e-4
_RENORMALIZE_TOLERANCE = 1e-12


class OptimizerMode(enum.Enum):
  PSEUDO_RIEMANNIAN = 'pseudo'
  EUCLIDEAN_VIA_PHI = 'phi'
  FLAT = 'flat'


class StopRule(enum.Enum):
  MAX_ITERATIONS = 'max_iterations'
  CALLBACK = 'callback'


class ObjectiveEvaluation(NamedTuple):
  """Value of an objective and its Euclidean gradient at every point.

  Attributes:
    value: The objective value.
    euclidean_gradients: (n, d) array, one ambient gradient per point.
  """
  value: float
  euclidean_gradients: np.ndarray


class Objective(metaclass=abc.ABCMeta):
  """A differentiable function of a set of points."""

  @abc.abstractmethod
  def evaluate(self, points: np.ndarray) -> ObjectiveEvaluation:
    """Evaluates the objective and its Euclidean gradients at `points`."""

  def begin_iteration(self, iteration: int, rng: np.random.Generator):
    """Called once per iteration before evaluation. Defaults to a no-op."""
    del iteration, rng


class _FunctionObjective(Objective):
  """Adapts a plain callable to the `Objective` interface."""

  def __init__(self, function: Callable[[np.ndarray], ObjectiveEvaluation]):
    self._function = function

  def evaluate(self, points: np.ndarray) -> ObjectiveEvaluation:
    return self._function(points)


ObjectiveLike = Union[Objective, Callable[[np.ndarray], ObjectiveEvaluation]]
# Receives (iteration, points, evaluation) and returns True to stop.
StopCallback = Callable[[int, np.ndarray, ObjectiveEvaluation], bool]


@dataclasses.dataclass(frozen=True)
class OptimizerConfig:
  """Settings of a descent run.

  Attributes:
    step_size: Fixed step size eta, or the initial trial step when
      `line_search` is enabled.
    max_iterations: Maximum number of steps.
    stop_rule: MAX_ITERATIONS, or CALLBACK to additionally consult the stop
      callback after every evaluation.
    seed: Seeds the generator handed to `Objective.begin_iteration`.
    mode: Which descent variant to run.
    renormalize_every: Period, in iterations, of the manifold drift check.
    line_search: Enables Armijo backtracking from `step_size`.
    max_halvings: Backtracking budget per iteration.
  """
  step_size: float = 1e-6
  max_iterations: int = 10000
  stop_rule: StopRule = StopRule.MAX_ITERATIONS
  seed: int = 0
  mode: OptimizerMode = OptimizerMode.PSEUDO_RIEMANNIAN
  renormalize_every: int = 100
  line_search: bool = False
  max_halvings: int = 30

  def __post_init__(self):
    if not np.isfinite(self.step_size) or self.step_size <= 0:
      raise error.invalid_argument(
          f'step_size must be positive, got {self.step_size}.')
    if self.max_iterations < 0:
      raise error.invalid_argument(
          f'max_iterations must be nonnegative, got {self.max_iterations}.')
    if self.renormalize_every < 1:
      raise error.invalid_argument(
          'renormalize_every must be positive, got '
          f'{self.renormalize_every}.')
    if self.max_halvings < 0:
      raise error.invalid_argument(
          f'max_halvings must be nonnegative, got {self.max_halvings}.')


class TraceRecord(NamedTuple):
  """Loss before the step taken at `iteration`."""
  iteration: int
  loss: float
  gradient_norm_sq: float


class OptimizationResult(NamedTuple):
  points: np.ndarray
  trace: List[TraceRecord]
  num_renormalizations: int = 0


def _gradient(x: np.ndarray, grad_f: np.ndarray, sig: Signature) -> np.ndarray:
  g_grad = grad_f * sig.metric_diagonal
  ratio = (pseudo_geometry.unchecked_scalar_product(g_grad, x, sig.q) /
           pseudo_geometry.unchecked_scalar_product(x, x, sig.q))
  return g_grad - ratio[..., None] * x


def _precondition(x: np.ndarray, v: np.ndarray, sig: Signature) -> np.ndarray:
  ratio = (np.sum(x * v, axis=-1) /
           pseudo_geometry.unchecked_scalar_product(x, x, sig.q))
  return v * sig.metric_diagonal - ratio[..., None] * x


def _checked(x, grad_f, sig):
  x = pseudo_geometry.check_manifold_point(x, sig)
  grad_f = pseudo_geometry.as_ambient(grad_f, sig, 'gradient')
  return x, grad_f


def pseudo_riemannian_gradient(x: pseudo_geometry.ArrayLike,
                               grad_f: pseudo_geometry.ArrayLike,
                               sig: Signature) -> np.ndarray:
  """Returns Df(x) = Pi_x(G grad f(x)), a tangent vector at `x`.

  Args:
    x: Point(s) on the manifold.
    grad_f: Euclidean gradient(s) of f at `x`.
    sig: Signature of the manifold.

  Returns:
    The pseudo-Riemannian gradient.
  """
  x, grad_f = _checked(x, grad_f, sig)
  return _gradient(x, grad_f, sig)


def descent_direction(x: pseudo_geometry.ArrayLike,
                      grad_f: pseudo_geometry.ArrayLike,
                      sig: Signature) -> np.ndarray:
  """Returns chi = Pi_x(G Df(x)).

  chi satisfies <Df(x), chi>_q = ||Df(x)||^2 in the Euclidean norm, so
  stepping along -chi decreases f to first order, and chi vanishes iff Df(x)
  does.

  Args:
    x: Point(s) on the manifold.
    grad_f: Euclidean gradient(s) of f at `x`.
    sig: Signature of the manifold.

  Returns:
    The descent direction chi, tangent at `x`.
  """
  x, grad_f = _checked(x, grad_f, sig)
  gradient = _gradient(x, grad_f, sig)
  return _gradient(x, gradient, sig)


def precondition(x: pseudo_geometry.ArrayLike, v: pseudo_geometry.ArrayLike,
                 sig: Signature) -> np.ndarray:
  """Applies P_x = G - x x^T / <x, x>_q, so that chi = P_x Df(x)."""
  x, v = _checked(x, v, sig)
  return _precondition(x, v, sig)


def step(x: pseudo_geometry.ArrayLike, grad_f: pseudo_geometry.ArrayLike,
         step_size: float, sig: Signature) -> np.ndarray:
  """One descent step exp_x(-step_size * chi)."""
  if step_size <= 0:
    raise error.invalid_argument(
        f'step_size must be positive, got {step_size}.')
  x, grad_f = _checked(x, grad_f, sig)
  chi = _precondition(x, _gradient(x, grad_f, sig), sig)
  return manifold_maps.exp_map(x, -step_size * chi, sig, validate=False)


def _as_objective(objective: ObjectiveLike) -> Objective:
  if isinstance(objective, Objective):
    return objective
  return _FunctionObjective(objective)


class _Variant(metaclass=abc.ABCMeta):
  """Mode specific parts of the descent loop over parameters `params`."""

  @abc.abstractmethod
  def points(self, params: np.ndarray) -> np.ndarray:
    """Points the objective is evaluated at."""

  @abc.abstractmethod
  def direction(self, params: np.ndarray, points: np.ndarray,
                gradients: np.ndarray) -> np.ndarray:
    """Direction whose negative is followed; its squared norm is traced."""

  @abc.abstractmethod
  def advance(self, params: np.ndarray, direction: np.ndarray,
              step_size: float) -> np.ndarray:
    """Takes a step of `step_size` against `direction`."""

  def gradient_norm_sq(self, params: np.ndarray, direction: np.ndarray,
                       gradients: np.ndarray) -> float:
    """First-order decrease rate along the step, recorded in the trace."""
    del params, gradients
    return float(np.sum(direction * direction))

  def renormalize(self, params: np.ndarray):
    """Returns (params, number of corrected rows)."""
    return params, 0


class _PseudoRiemannian(_Variant):

  def __init__(self, sig: Signature):
    self._sig = sig

  def points(self, params):
    return params

  def direction(self, params, points, gradients):
    return _precondition(params, _gradient(params, gradients, self._sig),
                         self._sig)

  def gradient_norm_sq(self, params, direction, gradients):
    gradient = _gradient(params, gradients, self._sig)
    return float(np.sum(gradient * gradient))

  def advance(self, params, direction, step_size):
    return manifold_maps.exp_map(params, -step_size * direction, self._sig,
                                 validate=False)

  def renormalize(self, params):
    residual = np.abs(
        pseudo_geometry.unchecked_scalar_product(params, params, self._sig.q) -
        self._sig.beta)
    scale = np.maximum(1., np.sum(params * params, axis=-1))
    drifted = residual > _RENORMALIZE_TOLERANCE * scale
    count = int(np.sum(drifted))
    if count:
      params = np.array(params)
      params[drifted] = pseudo_geometry.normalize_to_manifold(
          params[drifted], self._sig)
    return params, count


class _ViaPhi(_Variant):

  def __init__(self, sig: Signature):
    self._sig = sig

  def points(self, params):
    return manifold_maps.phi(params, self._sig)

  def direction(self, params, points, gradients):
    return manifold_maps.phi_pullback(params, gradients, self._sig)

  def advance(self, params, direction, step_size):
    return params - step_size * direction


class _Flat(_Variant):

  def points(self, params):
    return params

  def direction(self, params, points, gradients):
    return gradients

  def advance(self, params, direction, step_size):
    return params - step_size * direction


def _evaluate(objective: Objective, points: np.ndarray,
              iteration: int) -> ObjectiveEvaluation:
  evaluation = objective.evaluate(points)
  gradients = np.asarray(evaluation.euclidean_gradients, dtype=np.float64)
  if gradients.shape != points.shape:
    raise error.invalid_argument(
        f'Objective returned gradients of shape {gradients.shape} for points '
        f'of shape {points.shape}.')
  if not np.isfinite(evaluation.value) or not np.all(np.isfinite(gradients)):
    raise error.aborted(
        'Optimization diverged: non-finite objective value or gradient.',
        iteration=iteration, loss=str(evaluation.value))
  return ObjectiveEvaluation(float(evaluation.value), gradients)


def _trial_value(objective: Objective, points: np.ndarray) -> float:
  """Objective value at a line search candidate, inf when it is unusable."""
  if not np.all(np.isfinite(points)):
    return np.inf
  try:
    value = float(objective.evaluate(points).value)
  except error.UltrahyperbolicError as e:
    logging.debug('Rejected line search candidate: %s', e)
    return np.inf
  return value if np.isfinite(value) else np.inf


def _descent_loop(variant: _Variant, objective: Objective,
                  params: np.ndarray, config: OptimizerConfig,
                  stop_callback: Optional[StopCallback],
                  rng: np.random.Generator) -> OptimizationResult:
  """Runs the descent loop shared by every mode."""
  if config.stop_rule == StopRule.CALLBACK and stop_callback is None:
    raise error.invalid_argument(
        'StopRule.CALLBACK requires a stop_callback.')
  trace = []
  num_renormalizations = 0
  params = np.array(params, dtype=np.float64)
  for iteration in range(config.max_iterations):
    objective.begin_iteration(iteration, rng)
    points = variant.points(params)
    evaluation = _evaluate(objective, points, iteration)
    direction = variant.direction(params, points,
                                  evaluation.euclidean_gradients)
    gradient_norm_sq = variant.gradient_norm_sq(
        params, direction, evaluation.euclidean_gradients)
    trace.append(TraceRecord(iteration, evaluation.value, gradient_norm_sq))
    logging.log_every_n(
        logging.INFO, 'Iteration %d: loss %g, squared gradient norm %g.', 1000,
        iteration, evaluation.value, gradient_norm_sq)

    if (config.stop_rule == StopRule.CALLBACK and
        stop_callback(iteration, points, evaluation)):
      logging.info('Stop callback triggered at iteration %d.', iteration)
      break

    step_size = config.step_size
    candidate = variant.advance(params, direction, step_size)
    if config.line_search:
      for _ in range(config.max_halvings):
        trial = _trial_value(objective, variant.points(candidate))
        target = (evaluation.value -
                  _ARMIJO_CONSTANT * step_size * gradient_norm_sq)
        if trial <= target:
          break
        step_size /= 2.
        candidate = variant.advance(params, direction, step_size)
    if not np.all(np.isfinite(candidate)):
      raise error.aborted(
          'Optimization diverged: non-finite parameters after a step.',
          iteration=iteration)
    params = candidate

    if (iteration + 1) % config.renormalize_every == 0:
      params, count = variant.renormalize(params)
      if count:
        logging.warning(
            'Renormalized %d points that drifted off the manifold at '
            'iteration %d.', count, iteration)
      num_renormalizations += count

  params, count = variant.renormalize(params)
  num_renormalizations += count
  return OptimizationResult(variant.points(params), trace,
                            num_renormalizations)


def optimize(objective: ObjectiveLike, initial: pseudo_geometry.ArrayLike,
             config: OptimizerConfig, sig: Signature,
             stop_callback: Optional[StopCallback] = None,
             rng: Optional[np.random.Generator] = None) -> OptimizationResult:
  """Minimizes `objective` over points of Q^{p,q}_beta.

  Every iteration evaluates the objective, records the pre-step loss and then
  moves each point along exp_x(-eta chi). Iterates are checked for drift
  every `config.renormalize_every` iterations and at the end, and rescaled
  onto the manifold when needed.

  Args:
    objective: An `Objective`, or a callable mapping an (n, d) array of points
      to an `ObjectiveEvaluation`.
    initial: (n, d) array of starting points.
    config: Optimizer settings. `config.mode` is ignored.
    sig: Signature of the manifold.
    stop_callback: Consulted after every evaluation when
      `config.stop_rule` is CALLBACK.
    rng: Generator handed to `Objective.begin_iteration`. Defaults to one
      seeded with `config.seed`.

  Returns:
    The final points, the trace and the number of renormalized points.

  Raises:
    UltrahyperbolicError: ABORTED with the iteration index when the loss, a
      gradient or an iterate becomes non-finite.
  """
  initial = pseudo_geometry.check_manifold_point(initial, sig)
  if rng is None:
    rng = np.random.default_rng(config.seed)
  return _descent_loop(_PseudoRiemannian(sig), _as_objective(objective),
                       initial, config, stop_callback, rng)


def optimize_via_phi(
    objective: ObjectiveLike, initial_params: pseudo_geometry.ArrayLike,
    config: OptimizerConfig, sig: Signature,
    stop_callback: Optional[StopCallback] = None,
    rng: Optional[np.random.Generator] = None) -> OptimizationResult:
  """Minimizes `objective` o phi by Euclidean descent on parameters z.

  Gradients at phi(z) are pulled back through the Jacobian of phi, assembled
  from d JVPs per point.

  Args:
    objective: As in `optimize`, evaluated at phi(z).
    initial_params: (n, d) array of parameters with nonzero time parts.
    config: Optimizer settings. `config.mode` is ignored.
    sig: Signature of the manifold.
    stop_callback: As in `optimize`.
    rng: As in `optimize`.

  Returns:
    phi of the final parameters, and the trace.

  Raises:
    UltrahyperbolicError: FAILED_PRECONDITION when the time part of a
      parameter collapses to zero, ABORTED on divergence.
  """
  initial_params = pseudo_geometry.as_ambient(initial_params, sig,
                                              'parameters')
  if rng is None:
    rng = np.random.default_rng(config.seed)
  try:
    return _descent_loop(_ViaPhi(sig), _as_objective(objective),
                         initial_params, config, stop_callback, rng)
  except error.UltrahyperbolicError as e:
    if e.code == code_pb2.FAILED_PRECONDITION:
      raise error.failed_precondition(
          'A parameter time part collapsed to zero; phi is singular there.'
      ) from e
    raise


def optimize_euclidean(
    objective: ObjectiveLike, initial: pseudo_geometry.ArrayLike,
    config: OptimizerConfig,
    stop_callback: Optional[StopCallback] = None,
    rng: Optional[np.random.Generator] = None) -> OptimizationResult:
  """Plain gradient descent in R^k, used as the flat baseline."""
  initial = np.asarray(initial, dtype=np.float64)
  if initial.ndim != 2 or not np.all(np.isfinite(initial)):
    raise error.invalid_argument(
        f'Expected a finite (n, k) array of points, got shape {initial.shape}.')
  if rng is None:
    rng = np.random.default_rng(config.seed)
  return _descent_loop(_Flat(), _as_objective(objective), initial, config,
                       stop_callback, rng)
