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
"""Learns node embeddings from a weighted graph with a softmax ranking loss.

Every edge e_k = (i, j) should be closer than each pair of its weaker set
W(e_k): the edges of strictly lower capacity and the pairs joined by no edge.
The loss is

  sum_k -log(exp(-d_ij / tau) / sum_{(a,b) in W(e_k) + {e_k}} exp(-d_ab / tau))

with d the manifold dissimilarity, or the Euclidean distance for the flat
baseline.

Weaker sets are packed into one pair array holding the non-edges followed by
the edges in ascending capacity order. W(e_k) is then a prefix of that array,
so every softmax normalizer is a cumulative log-sum-exp.
"""

import abc
from concurrent import futures
import dataclasses
from typing import Callable, List, NamedTuple, Optional, Tuple

from absl import logging
import numpy as np

from ultrahyperbolic import error
from ultrahyperbolic import graph_utils
from ultrahyperbolic import manifold_maps
from ultrahyperbolic import optimizer
from ultrahyperbolic import pseudo_geometry

Signature = pseudo_geometry.Signature
OptimizerMode = optimizer.OptimizerMode

_PAIR_CHUNK_SIZE = 4096
_FLAT_DISTANCE_GUARD = 1e-12
_MAX_INIT_ATTEMPTS = 1000


class WeakerSets(NamedTuple):
  """Packed weaker sets of every edge.

  Attributes:
    pairs: (P, 2) node pairs: non-edges first, then every edge in ascending
      capacity order (stable in edge index).
    edge_positions: (m,) row of `pairs` holding edge k.
    prefix_lengths: (m,) size of W(e_k); W(e_k) = pairs[:prefix_lengths[k]].
    exact: False when the non-edges are a random sample.
  """
  pairs: np.ndarray
  edge_positions: np.ndarray
  prefix_lengths: np.ndarray
  exact: bool

  def members(self, edge_index: int) -> np.ndarray:
    return self.pairs[:self.prefix_lengths[edge_index]]

  def satisfaction(self, pair_distances: np.ndarray) -> float:
    """Fraction of constraints d(e_k) < d(w), w in W(e_k), that hold.

    Args:
      pair_distances: (P,) dissimilarity of every row of `pairs`.

    Returns:
      The satisfied fraction, or 1.0 when there are no constraints.
    """
    edge_distances = pair_distances[self.edge_positions]
    satisfied = 0
    total = 0
    for length in np.unique(self.prefix_lengths):
      if length == 0:
        continue
      weaker = np.sort(pair_distances[:length])
      members = edge_distances[self.prefix_lengths == length]
      satisfied += int(np.sum(
          length - np.searchsorted(weaker, members, side='right')))
      total += int(length) * len(members)
    return 1. if total == 0 else satisfied / total


def non_edges(graph: graph_utils.WeightedGraph) -> np.ndarray:
  """Returns every unconnected pair (i, j), i < j, in lexicographic order."""
  rows, cols = np.triu_indices(graph.num_nodes, k=1)
  unconnected = ~graph.adjacency[rows, cols]
  return np.stack([rows[unconnected], cols[unconnected]], axis=1)


def pack_weaker_sets(graph: graph_utils.WeightedGraph,
                     unconnected: np.ndarray,
                     exact: bool = True) -> WeakerSets:
  """Packs weaker sets over the given non-edges.

  Args:
    graph: The graph.
    unconnected: (N, 2) non-edges to use, all of them or a sample.
    exact: Whether `unconnected` holds every non-edge.

  Returns:
    The packed weaker sets.
  """
  order = np.argsort(graph.capacities, kind='stable')
  sorted_capacities = graph.capacities[order]
  lower_counts = np.searchsorted(sorted_capacities, graph.capacities,
                                 side='left')
  num_unconnected = len(unconnected)
  edge_positions = np.empty(graph.num_edges, dtype=np.int64)
  edge_positions[order] = num_unconnected + np.arange(graph.num_edges)
  pairs = np.concatenate(
      [np.asarray(unconnected, dtype=np.int64).reshape(-1, 2),
       graph.edges[order]])
  return WeakerSets(pairs, edge_positions, num_unconnected + lower_counts,
                    exact)


def sample_weaker_sets(graph: graph_utils.WeightedGraph,
                       unconnected: np.ndarray, num_samples: int,
                       rng: np.random.Generator) -> WeakerSets:
  """Packs weaker sets over a uniform sample of non-edges.

  The sample is drawn without replacement and shared by every edge.

  Args:
    graph: The graph.
    unconnected: Every non-edge of `graph`.
    num_samples: Number of non-edges to keep.
    rng: Source of randomness.

  Returns:
    Packed weaker sets, exact when `num_samples` covers every non-edge.
  """
  if num_samples >= len(unconnected):
    return pack_weaker_sets(graph, unconnected)
  chosen = np.sort(rng.choice(len(unconnected), size=num_samples,
                              replace=False))
  return pack_weaker_sets(graph, unconnected[chosen], exact=False)


def weaker_set(graph: graph_utils.WeightedGraph, edge_index: int,
               num_samples: Optional[int] = None,
               rng: Optional[np.random.Generator] = None) -> np.ndarray:
  """Returns the pairs ranked below edge `edge_index`.

  Args:
    graph: The graph.
    edge_index: Index of the edge in `graph.edges`.
    num_samples: None to enumerate every non-edge, otherwise the number of
      non-edges sampled uniformly without replacement.
    rng: Source of randomness, required when sampling.

  Returns:
    (w, 2) array of the non-edges followed by the lower-capacity edges.
  """
  if not 0 <= edge_index < graph.num_edges:
    raise error.invalid_argument(
        f'Edge index {edge_index} out of range for {graph.num_edges} edges.')
  unconnected = non_edges(graph)
  if num_samples is None:
    sets = pack_weaker_sets(graph, unconnected)
  else:
    if rng is None:
      raise error.invalid_argument('Sampling weaker sets requires an rng.')
    sets = sample_weaker_sets(graph, unconnected, num_samples, rng)
  return sets.members(edge_index)


@dataclasses.dataclass(frozen=True)
class TrainingConfig:
  """Settings of an embedding run.

  Attributes:
    signature: Manifold of the embeddings. In FLAT mode only its dimension
      p + q is used.
    temperature: Softmax temperature tau.
    epsilon: Half-width of the uniform initial perturbation.
    step_size: Step size eta.
    max_iterations: Iteration budget.
    seed: Seed of the single generator behind initialization and sampling.
    num_negatives: None to use every non-edge. Otherwise the number of
      non-edges sampled per iteration once the graph has more than
      `exact_max_nodes` nodes.
    mode: Optimizer variant.
    exact_max_nodes: Largest graph always trained with exact weaker sets.
    num_threads: Worker threads for loss evaluation.
    line_search: Enables backtracking in the optimizer.
    renormalize_every: Period of the manifold drift check.
    progress_patience: Iterations without improvement of the constraint
      satisfaction before a warning, on unweighted graphs.
  """
  signature: Signature = Signature(p=3, q=1)
  temperature: float = 1e-2
  epsilon: float = 0.1
  step_size: float = 1e-6
  max_iterations: int = 10000
  seed: int = 0
  num_negatives: Optional[int] = None
  mode: OptimizerMode = OptimizerMode.PSEUDO_RIEMANNIAN
  exact_max_nodes: int = 200
  num_threads: int = 1
  line_search: bool = False
  renormalize_every: int = 100
  progress_patience: int = 500

  def __post_init__(self):
    if not np.isfinite(self.temperature) or self.temperature <= 0:
      raise error.invalid_argument(
          f'temperature must be positive, got {self.temperature}.')
    if not np.isfinite(self.epsilon) or self.epsilon <= 0:
      raise error.invalid_argument(
          f'epsilon must be positive, got {self.epsilon}.')
    if (self.mode != OptimizerMode.FLAT and
        self.epsilon >= np.sqrt(self.signature.abs_beta)):
      raise error.invalid_argument(
          f'epsilon must be below sqrt|beta| = '
          f'{np.sqrt(self.signature.abs_beta):g}, got {self.epsilon}.')
    if self.num_negatives is not None and self.num_negatives < 1:
      raise error.invalid_argument(
          f'num_negatives must be positive, got {self.num_negatives}.')
    if self.num_threads < 1:
      raise error.invalid_argument(
          f'num_threads must be positive, got {self.num_threads}.')
    if self.progress_patience < 1:
      raise error.invalid_argument(
          f'progress_patience must be positive, got '
          f'{self.progress_patience}.')
    # Remaining optimizer settings are validated by OptimizerConfig.
    self.optimizer_config()

  def optimizer_config(self) -> optimizer.OptimizerConfig:
    return optimizer.OptimizerConfig(
        step_size=self.step_size,
        max_iterations=self.max_iterations,
        seed=self.seed,
        mode=self.mode,
        renormalize_every=self.renormalize_every,
        line_search=self.line_search)

  @property
  def embedding_signature(self) -> Optional[Signature]:
    """The manifold signature, or None for flat embeddings."""
    return None if self.mode == OptimizerMode.FLAT else self.signature


@dataclasses.dataclass(frozen=True, eq=False)
class EmbeddingSet:
  """Learned embeddings.

  Attributes:
    points: (n, d) points on the manifold, or (n, p + q) flat coordinates
      when `signature` is None.
    signature: Manifold of the points; None for flat embeddings.
    trace: Pre-step loss of every iteration.
    seed: Seed of the run.
  """
  points: np.ndarray
  signature: Optional[Signature]
  trace: Tuple[optimizer.TraceRecord, ...] = ()
  seed: int = 0

  def __post_init__(self):
    if self.signature is None:
      points = np.array(self.points, dtype=np.float64)
      if points.ndim != 2 or not np.all(np.isfinite(points)):
        raise error.invalid_argument(
            f'Expected finite (n, k) flat points, got shape {points.shape}.')
      points.flags.writeable = False
    else:
      points = pseudo_geometry.check_manifold_point(self.points,
                                                    self.signature)
      if points.ndim != 2:
        raise error.invalid_argument(
            f'Expected (n, d) points, got shape {points.shape}.')
    object.__setattr__(self, 'points', points)
    object.__setattr__(self, 'trace', tuple(self.trace))

  @property
  def num_nodes(self) -> int:
    return len(self.points)

  @property
  def final_loss(self) -> Optional[float]:
    return self.trace[-1].loss if self.trace else None


def init_embeddings(num_nodes: int, config: TrainingConfig,
                    rng: Optional[np.random.Generator] = None
                    ) -> EmbeddingSet:
  """Initial embeddings near the positive pole.

  Every coordinate of the pole is perturbed uniformly in [-epsilon, epsilon].
  Rows that are not time-like are redrawn before being rescaled onto the
  manifold. Flat embeddings are the perturbation alone.

  Args:
    num_nodes: Number of embeddings.
    config: Training settings.
    rng: Source of randomness. Defaults to a generator seeded with
      `config.seed`.

  Returns:
    The initial embeddings, with an empty trace.
  """
  if rng is None:
    rng = np.random.default_rng(config.seed)
  sig = config.signature
  if config.mode == OptimizerMode.FLAT:
    points = rng.uniform(-config.epsilon, config.epsilon,
                         size=(num_nodes, sig.manifold_dim))
    return EmbeddingSet(points, None, seed=config.seed)

  z = pseudo_geometry.pole(sig) + rng.uniform(
      -config.epsilon, config.epsilon, size=(num_nodes, sig.d))
  for _ in range(_MAX_INIT_ATTEMPTS):
    redraw = pseudo_geometry.unchecked_scalar_product(z, z, sig.q) >= 0
    if not np.any(redraw):
      break
    z[redraw] = pseudo_geometry.pole(sig) + rng.uniform(
        -config.epsilon, config.epsilon, size=(int(np.sum(redraw)), sig.d))
  else:
    raise error.failed_precondition(
        'Could not draw time-like initial vectors.', epsilon=config.epsilon)
  points = pseudo_geometry.normalize_to_manifold(z, sig)
  return EmbeddingSet(points, sig, seed=config.seed)


class _PairMetric(metaclass=abc.ABCMeta):
  """Dissimilarity between rows of two point arrays and its gradients."""

  @abc.abstractmethod
  def distances(self, a: np.ndarray, b: np.ndarray):
    """Returns (distances, state) where state feeds `gradients`."""

  @abc.abstractmethod
  def gradients(self, a: np.ndarray, b: np.ndarray, state,
                upstream: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    """Returns upstream-weighted gradients with respect to `a` and `b`."""


class _ManifoldPairs(_PairMetric):

  def __init__(self, sig: Signature):
    self._sig = sig

  def distances(self, a, b):
    product = pseudo_geometry.unchecked_scalar_product(a, b, self._sig.q)
    return (np.asarray(manifold_maps.dissimilarity_from_scalar_product(
        product, self._sig)), product)

  def gradients(self, a, b, state, upstream):
    scale = upstream * np.asarray(
        manifold_maps.dissimilarity_derivative(state, self._sig))
    metric = self._sig.metric_diagonal
    return scale[:, None] * b * metric, scale[:, None] * a * metric


class _EuclideanPairs(_PairMetric):

  def distances(self, a, b):
    difference = a - b
    return np.linalg.norm(difference, axis=-1), difference

  def gradients(self, a, b, state, upstream):
    norm = np.linalg.norm(state, axis=-1)
    scale = np.where(norm > _FLAT_DISTANCE_GUARD,
                     upstream / np.maximum(norm, _FLAT_DISTANCE_GUARD), 0.)
    gradient = scale[:, None] * state
    return gradient, -gradient


def _pair_metric(sig: Optional[Signature]) -> _PairMetric:
  return _EuclideanPairs() if sig is None else _ManifoldPairs(sig)


class RankingObjective(optimizer.Objective):
  """The softmax ranking loss of a graph as an optimizer objective.

  Evaluation fans out over fixed chunks of pairs and reduces partial results
  in chunk order, so values do not depend on the number of threads.
  """

  def __init__(self, graph: graph_utils.WeightedGraph, temperature: float,
               sig: Optional[Signature] = None,
               num_negatives: Optional[int] = None,
               exact_max_nodes: int = 200,
               num_threads: int = 1,
               weaker_sets: Optional[WeakerSets] = None):
    """Initializes the objective.

    Args:
      graph: The graph to embed.
      temperature: Softmax temperature tau.
      sig: Manifold of the points, or None for flat Euclidean points.
      num_negatives: As in `TrainingConfig`.
      exact_max_nodes: As in `TrainingConfig`.
      num_threads: Worker threads; 1 evaluates inline.
      weaker_sets: Fixed weaker sets overriding the ones built from `graph`.
    """
    if temperature <= 0:
      raise error.invalid_argument(
          f'temperature must be positive, got {temperature}.')
    self._graph = graph
    self._temperature = float(temperature)
    self._sig = sig
    self._metric = _pair_metric(sig)
    self._unconnected = non_edges(graph)
    self._exact_sets = pack_weaker_sets(graph, self._unconnected)
    self._num_negatives = None
    if (weaker_sets is None and num_negatives is not None and
        graph.num_nodes > exact_max_nodes and
        num_negatives < len(self._unconnected)):
      self._num_negatives = num_negatives
    self._weaker_sets = (
        self._exact_sets if weaker_sets is None else weaker_sets)
    self._executor = None
    if num_threads > 1:
      self._executor = futures.ThreadPoolExecutor(
          max_workers=num_threads, thread_name_prefix='ranking_loss')

  @property
  def weaker_sets(self) -> WeakerSets:
    """Weaker sets used by the next evaluation."""
    return self._weaker_sets

  @property
  def is_sampled(self) -> bool:
    return self._num_negatives is not None

  def begin_iteration(self, iteration: int, rng: np.random.Generator):
    if self.is_sampled:
      self._weaker_sets = sample_weaker_sets(
          self._graph, self._unconnected, self._num_negatives, rng)

  def close(self):
    if self._executor is not None:
      self._executor.shutdown()
      self._executor = None

  def __enter__(self) -> 'RankingObjective':
    return self

  def __exit__(self, *args):
    self.close()

  def _map_chunks(self, function: Callable[[slice], object],
                  num_rows: int) -> List[object]:
    chunks = [slice(start, start + _PAIR_CHUNK_SIZE)
              for start in range(0, num_rows, _PAIR_CHUNK_SIZE)]
    if self._executor is None:
      return [function(chunk) for chunk in chunks]
    return list(self._executor.map(function, chunks))

  def _check_points(self, points: np.ndarray) -> np.ndarray:
    points = np.asarray(points, dtype=np.float64)
    if points.ndim != 2 or len(points) != self._graph.num_nodes:
      raise error.invalid_argument(
          f'Expected {self._graph.num_nodes} points, got shape '
          f'{points.shape}.')
    if self._sig is not None:
      points = pseudo_geometry.as_ambient(points, self._sig, 'points')
    elif not np.all(np.isfinite(points)):
      raise error.invalid_argument('points has non-finite entries.')
    return points

  def pair_distances(self, points: np.ndarray,
                     sets: Optional[WeakerSets] = None):
    """Returns (distances, states) for every row of the packed pairs."""
    if sets is None:
      sets = self._weaker_sets
    pairs = sets.pairs

    def chunk_distances(chunk):
      return self._metric.distances(points[pairs[chunk, 0]],
                                    points[pairs[chunk, 1]])

    results = self._map_chunks(chunk_distances, len(pairs))
    if not results:
      return np.zeros(0), []
    return (np.concatenate([distances for distances, _ in results]),
            [state for _, state in results])

  def _value_and_upstream(self, distances: np.ndarray, sets: WeakerSets):
    logits = -distances / self._temperature
    cumulative = np.concatenate([[-np.inf], np.logaddexp.accumulate(logits)])
    own = logits[sets.edge_positions]
    normalizers = np.logaddexp(cumulative[sets.prefix_lengths], own)
    terms = normalizers - own
    value = float(np.sum(terms))

    # Pair p belongs to W(e_k) iff p < prefix_lengths[k].
    by_length = np.full(len(distances) + 1, -np.inf)
    np.logaddexp.at(by_length, sets.prefix_lengths, -normalizers)
    tails = np.logaddexp.accumulate(by_length[::-1])[::-1]
    upstream = np.exp(logits + tails[1:])
    upstream[sets.edge_positions] += np.expm1(own - normalizers)
    return value, terms, -upstream / self._temperature

  def _check_finite(self, value: float):
    if not np.isfinite(value):
      raise error.aborted('Non-finite ranking loss.',
                          temperature=self._temperature)

  def loss_terms(self, points: np.ndarray) -> np.ndarray:
    """Per-edge loss terms, in edge order."""
    points = self._check_points(points)
    distances, _ = self.pair_distances(points)
    value, terms, _ = self._value_and_upstream(distances, self._weaker_sets)
    self._check_finite(value)
    return terms

  def evaluate(self, points: np.ndarray) -> optimizer.ObjectiveEvaluation:
    points = self._check_points(points)
    sets = self._weaker_sets
    distances, states = self.pair_distances(points, sets)
    value, _, upstream = self._value_and_upstream(distances, sets)
    self._check_finite(value)
    pairs = sets.pairs

    def chunk_gradients(chunk):
      index = chunk.start // _PAIR_CHUNK_SIZE
      rows, cols = pairs[chunk, 0], pairs[chunk, 1]
      from_rows, from_cols = self._metric.gradients(
          points[rows], points[cols], states[index], upstream[chunk])
      partial = np.zeros_like(points)
      np.add.at(partial, rows, from_rows)
      np.add.at(partial, cols, from_cols)
      return partial

    gradients = np.zeros_like(points)
    for partial in self._map_chunks(chunk_gradients, len(pairs)):
      gradients += partial
    if not np.all(np.isfinite(gradients)):
      raise error.aborted('Non-finite ranking loss gradient.',
                          temperature=self._temperature)
    return optimizer.ObjectiveEvaluation(value, gradients)

  def constraint_satisfaction(self, points: np.ndarray) -> float:
    """Satisfied fraction of the ordering constraints over all non-edges."""
    points = self._check_points(points)
    distances, _ = self.pair_distances(points, self._exact_sets)
    return self._exact_sets.satisfaction(distances)


def loss(points: np.ndarray, graph: graph_utils.WeightedGraph,
         temperature: float, sig: Optional[Signature] = None,
         weaker_sets: Optional[WeakerSets] = None) -> float:
  """The ranking loss of `points`, always >= 0.

  Args:
    points: (n, d) embeddings.
    graph: The graph.
    temperature: Softmax temperature tau.
    sig: Manifold of the points, or None for flat points.
    weaker_sets: Defaults to the exact weaker sets of `graph`.

  Returns:
    The loss value.

  Raises:
    UltrahyperbolicError: ABORTED if the value is not finite.
  """
  objective = RankingObjective(graph, temperature, sig,
                               weaker_sets=weaker_sets)
  return objective.evaluate(points).value


def loss_gradients(points: np.ndarray, graph: graph_utils.WeightedGraph,
                   temperature: float, sig: Optional[Signature] = None,
                   weaker_sets: Optional[WeakerSets] = None) -> np.ndarray:
  """Euclidean gradient of `loss` with respect to every point."""
  objective = RankingObjective(graph, temperature, sig,
                               weaker_sets=weaker_sets)
  return objective.evaluate(points).euclidean_gradients


class _SatisfactionStop:
  """Stops once every ordering constraint holds and watches for stalls."""

  def __init__(self, objective: RankingObjective, patience: int):
    self._objective = objective
    self._patience = patience
    self._best = -1.
    self._stalled = 0

  def __call__(self, iteration: int, points: np.ndarray,
               evaluation: optimizer.ObjectiveEvaluation) -> bool:
    del evaluation
    satisfaction = self._objective.constraint_satisfaction(points)
    if satisfaction >= 1.:
      logging.info('All constraints satisfied at iteration %d.', iteration)
      return True
    if satisfaction > self._best:
      self._best = satisfaction
      self._stalled = 0
    else:
      self._stalled += 1
      if self._stalled == self._patience:
        logging.warning(
            'Constraint satisfaction stuck at %.4f for %d iterations '
            '(iteration %d).', self._best, self._patience, iteration)
    return False


def train(graph: graph_utils.WeightedGraph, config: TrainingConfig,
          rng: Optional[np.random.Generator] = None) -> EmbeddingSet:
  """Embeds `graph` by minimizing the ranking loss.

  On unweighted graphs the run also stops as soon as every edge is closer
  than every non-edge.

  Args:
    graph: The graph to embed.
    config: Training settings.
    rng: Generator for initialization and negative sampling. Defaults to one
      seeded with `config.seed`.

  Returns:
    The trained embeddings and the loss trace.

  Raises:
    UltrahyperbolicError: ABORTED when training diverges.
  """
  if rng is None:
    rng = np.random.default_rng(config.seed)
  initial = init_embeddings(graph.num_nodes, config, rng)
  sig = config.embedding_signature
  opt_config = config.optimizer_config()
  logging.info('Training %s on %d nodes, %d edges in %s mode.',
               sig or f'R^{config.signature.manifold_dim}', graph.num_nodes,
               graph.num_edges, config.mode.value)

  with RankingObjective(graph, config.temperature, sig,
                        num_negatives=config.num_negatives,
                        exact_max_nodes=config.exact_max_nodes,
                        num_threads=config.num_threads) as objective:
    stop_callback = None
    if graph.is_unweighted:
      stop_callback = _SatisfactionStop(objective, config.progress_patience)
      opt_config = dataclasses.replace(
          opt_config, stop_rule=optimizer.StopRule.CALLBACK)
    if config.mode == OptimizerMode.PSEUDO_RIEMANNIAN:
      result = optimizer.optimize(objective, initial.points, opt_config,
                                  config.signature, stop_callback, rng)
    elif config.mode == OptimizerMode.EUCLIDEAN_VIA_PHI:
      result = optimizer.optimize_via_phi(objective, initial.points,
                                          opt_config, config.signature,
                                          stop_callback, rng)
    else:
      result = optimizer.optimize_euclidean(objective, initial.points,
                                            opt_config, stop_callback, rng)

  if result.trace:
    logging.info('Finished after %d iterations with loss %g.',
                 len(result.trace), result.trace[-1].loss)
  return EmbeddingSet(result.points, sig, tuple(result.trace), config.seed)
