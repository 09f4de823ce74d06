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
"""Hierarchy extraction metrics for learned embeddings.

Nodes high in a hierarchy are close to most other nodes, so a low sum of
dissimilarities delta_i flags them. Ties are broken by the lowest node index
throughout.
"""

from typing import Dict, NamedTuple, Optional, Sequence

from absl import logging
from google.rpc import code_pb2
import numpy as np
from scipy import stats
from scipy.spatial import distance

from ultrahyperbolic import error
from ultrahyperbolic import graph_embedding
from ultrahyperbolic import graph_utils
from ultrahyperbolic import manifold_maps

EmbeddingSet = graph_embedding.EmbeddingSet


def dissimilarity_matrix(embeddings: EmbeddingSet) -> np.ndarray:
  """Returns the symmetric (n, n) dissimilarities with a zero diagonal.

  Flat embeddings use the Euclidean distance.

  Args:
    embeddings: The embeddings.

  Returns:
    The dissimilarity matrix.
  """
  points = embeddings.points
  sig = embeddings.signature
  if sig is None:
    matrix = distance.cdist(points, points, metric='euclidean')
  else:
    products = (points * sig.metric_diagonal) @ points.T
    products = (products + products.T) / 2.
    matrix = np.asarray(
        manifold_maps.dissimilarity_from_scalar_product(products, sig))
  matrix = np.array(matrix)
  np.fill_diagonal(matrix, 0.)
  return matrix


def _check_sizes(embeddings: EmbeddingSet, graph: graph_utils.WeightedGraph):
  if embeddings.num_nodes != graph.num_nodes:
    raise error.invalid_argument(
        f'Got {embeddings.num_nodes} embeddings for a graph of '
        f'{graph.num_nodes} nodes.')


def constraint_satisfaction(embeddings: EmbeddingSet,
                            graph: graph_utils.WeightedGraph) -> float:
  """Fraction of ordering constraints d(e_k) < d(w), w in W(e_k), that hold.

  Weaker sets are enumerated exactly. A graph without any constraint scores
  1.0.

  Args:
    embeddings: The embeddings.
    graph: The graph they were learned from.

  Returns:
    A fraction in [0, 1].
  """
  _check_sizes(embeddings, graph)
  sets = graph_embedding.pack_weaker_sets(graph,
                                          graph_embedding.non_edges(graph))
  matrix = dissimilarity_matrix(embeddings)
  return sets.satisfaction(matrix[sets.pairs[:, 0], sets.pairs[:, 1]])


def delta_scores(embeddings: EmbeddingSet) -> np.ndarray:
  """Returns delta_i = sum_j d(x_i, x_j), including the zero j = i term."""
  return np.sum(dissimilarity_matrix(embeddings), axis=1)


def norm_scores(embeddings: EmbeddingSet) -> np.ndarray:
  """Euclidean norm of every embedding.

  For hyperbolic embeddings nodes near the origin sit high in the hierarchy,
  so low norms can stand in for low delta scores.
  """
  return np.linalg.norm(embeddings.points, axis=-1)


def leader_ranks(scores: Sequence[float],
                 leaders: Sequence[int]) -> Sequence[int]:
  """1-based ranks of `leaders` when sorting `scores` in ascending order.

  Args:
    scores: Per-node scores, lower meaning more important.
    leaders: Node indices.

  Returns:
    The ranks in ascending order, so the first entry is the best ranked
    leader.

  Raises:
    UltrahyperbolicError: OUT_OF_RANGE for a leader index outside the nodes.
  """
  scores = np.asarray(scores, dtype=np.float64)
  for leader in leaders:
    if not 0 <= leader < len(scores):
      raise error.out_of_range(
          f'Leader {leader} out of range for {len(scores)} nodes.',
          leader=int(leader))
  order = np.argsort(scores, kind='stable')
  ranks = np.empty(len(scores), dtype=np.int64)
  ranks[order] = np.arange(1, len(scores) + 1)
  return sorted(int(ranks[leader]) for leader in leaders)


def spearman_rho(a: Sequence[float], b: Sequence[float]) -> float:
  """Spearman's rank correlation with average ranks for ties.

  Args:
    a: First sample.
    b: Second sample of the same length, at least 2.

  Returns:
    The correlation in [-1, 1].

  Raises:
    UltrahyperbolicError: INVALID_ARGUMENT on mismatched or too short inputs,
      FAILED_PRECONDITION when either input is constant.
  """
  a = np.asarray(a, dtype=np.float64)
  b = np.asarray(b, dtype=np.float64)
  if a.shape != b.shape or a.ndim != 1:
    raise error.invalid_argument(
        f'Expected two samples of equal length, got shapes {a.shape} and '
        f'{b.shape}.')
  if len(a) < 2:
    raise error.invalid_argument(
        f'Need at least 2 observations, got {len(a)}.')
  if np.all(a == a[0]) or np.all(b == b[0]):
    raise error.failed_precondition(
        'Rank correlation is undefined for a constant sample.')
  rho, _ = stats.spearmanr(a, b)
  return float(rho)


def top_k_nodes(scores: Sequence[float], k: int) -> np.ndarray:
  """Indices of the `k` highest scores."""
  scores = np.asarray(scores, dtype=np.float64)
  if not 0 < k <= len(scores):
    raise error.invalid_argument(
        f'k must be in [1, {len(scores)}], got {k}.')
  return np.argsort(-scores, kind='stable')[:k]


def hierarchy_spearman(embeddings: EmbeddingSet,
                       graph: graph_utils.WeightedGraph,
                       top_k: Optional[int] = None,
                       min_strength: Optional[float] = None,
                       importance: Optional[np.ndarray] = None) -> float:
  """Rank correlation between node strengths s_i and -delta_i.

  A perfect hierarchy, where stronger nodes have smaller delta, scores 1.

  Args:
    embeddings: The embeddings.
    graph: The graph they were learned from.
    top_k: Restricts to the `top_k` strongest nodes.
    min_strength: Restricts to nodes with s_i >= min_strength.
    importance: Per-node importance replacing -delta_i.

  Returns:
    The Spearman correlation over the selected nodes.
  """
  _check_sizes(embeddings, graph)
  strengths = graph_utils.node_strengths(graph)
  if importance is None:
    importance = -delta_scores(embeddings)
  selected = np.arange(graph.num_nodes)
  if top_k is not None:
    selected = top_k_nodes(strengths, top_k)
  if min_strength is not None:
    selected = selected[strengths[selected] >= min_strength]
  return spearman_rho(strengths[selected], np.asarray(importance)[selected])


def recall_at_1(embeddings: EmbeddingSet,
                graph: graph_utils.WeightedGraph) -> float:
  """Fraction of nodes whose nearest other node is a graph neighbour."""
  _check_sizes(embeddings, graph)
  if graph.num_nodes < 2:
    raise error.invalid_argument('recall_at_1 needs at least 2 nodes.')
  matrix = dissimilarity_matrix(embeddings)
  np.fill_diagonal(matrix, np.inf)
  nearest = np.argmin(matrix, axis=1)
  return float(np.mean(graph.adjacency[np.arange(graph.num_nodes), nearest]))


class HierarchyReport(NamedTuple):
  """Evaluation summary of one embedding run. Undefined entries are None."""
  leader_ranks: Optional[Sequence[int]]
  norm_leader_ranks: Optional[Sequence[int]]
  spearman_top5: Optional[float]
  spearman_top10: Optional[float]
  spearman_selected: Optional[float]
  spearman_all: Optional[float]
  recall_at_1: float
  constraint_satisfaction: float

  def to_json(self) -> Dict[str, object]:
    return dict(self._asdict())


def _optional_spearman(name: str, embeddings, graph, **kwargs):
  try:
    return hierarchy_spearman(embeddings, graph, **kwargs)
  except error.UltrahyperbolicError as e:
    if e.code not in (code_pb2.FAILED_PRECONDITION, code_pb2.INVALID_ARGUMENT):
      raise
    logging.warning('%s is undefined: %s', name, e.message)
    return None


def hierarchy_report(embeddings: EmbeddingSet,
                     graph: graph_utils.WeightedGraph,
                     leaders: Optional[Sequence[int]] = None,
                     top_k: Optional[int] = None,
                     min_strength: Optional[float] = None) -> HierarchyReport:
  """Computes every hierarchy metric of `embeddings`.

  Args:
    embeddings: The embeddings.
    graph: The graph they were learned from.
    leaders: Nodes whose delta and norm ranks are reported.
    top_k: Size of the extra `spearman_selected` node selection.
    min_strength: Strength threshold of the `spearman_selected` selection.

  Returns:
    The report.
  """
  _check_sizes(embeddings, graph)
  ranks = norm_ranks = None
  if leaders:
    ranks = leader_ranks(delta_scores(embeddings), leaders)
    norm_ranks = leader_ranks(norm_scores(embeddings), leaders)
  selected = None
  if top_k is not None or min_strength is not None:
    selected = _optional_spearman('spearman_selected', embeddings, graph,
                                  top_k=top_k, min_strength=min_strength)
  return HierarchyReport(
      leader_ranks=ranks,
      norm_leader_ranks=norm_ranks,
      spearman_top5=_optional_spearman('spearman_top5', embeddings, graph,
                                       top_k=min(5, graph.num_nodes)),
      spearman_top10=_optional_spearman('spearman_top10', embeddings, graph,
                                        top_k=min(10, graph.num_nodes)),
      spearman_selected=selected,
      spearman_all=_optional_spearman('spearman_all', embeddings, graph),
      recall_at_1=recall_at_1(embeddings, graph),
      constraint_satisfaction=constraint_satisfaction(embeddings, graph))
