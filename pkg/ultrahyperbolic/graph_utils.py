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
"""Capacity-weighted undirected graphs, edge-list I/O and built-in datasets.

Edge-list format: UTF-8 text with one edge per line as `i<TAB>j<TAB>capacity`
(any whitespace separates fields, and a missing capacity means 1). Lines
starting with `#` are comments. Optional `key=value` header lines set the node
count (`n=34`) or declare directed capacity input (`directed=true`), in which
case both orientations of a pair may appear and are summed, S = C + C^T.
"""

import dataclasses
import os
from typing import Dict, List, NamedTuple, Optional, Tuple, Union

from absl import logging
import immutabledict
import networkx as nx
import numpy as np

from ultrahyperbolic import error

_TRUE_VALUES = immutabledict.immutabledict({
    'true': True, '1': True, 'yes': True,
    'false': False, '0': False, 'no': False,
})

KARATE_CLUB_NODES = 34
KARATE_CLUB_EDGES = 78
KARATE_CLUB_PATH = os.path.join(
    os.path.dirname(__file__), 'data', 'zachary_karate_club.tsv')


@dataclasses.dataclass(frozen=True, eq=False)
class WeightedGraph:
  """Undirected graph with positive edge capacities.

  Attributes:
    num_nodes: Number of nodes, labelled 0..num_nodes-1.
    edges: (m, 2) integer array of pairs with i < j, in input order.
    capacities: (m,) array of positive capacities.
  """
  num_nodes: int
  edges: np.ndarray
  capacities: np.ndarray

  def __post_init__(self):
    edges = np.array(self.edges, dtype=np.int64).reshape(-1, 2)
    capacities = np.array(self.capacities, dtype=np.float64).reshape(-1)
    if self.num_nodes < 0:
      raise error.invalid_argument(
          f'num_nodes must be nonnegative, got {self.num_nodes}.')
    if len(edges) != len(capacities):
      raise error.invalid_argument(
          f'Got {len(edges)} edges but {len(capacities)} capacities.')
    if np.any(edges[:, 0] == edges[:, 1]):
      index = int(np.argmax(edges[:, 0] == edges[:, 1]))
      raise error.invalid_argument(
          f'Self-loop on node {edges[index, 0]}.', edge=index)
    if np.any(edges < 0) or np.any(edges >= self.num_nodes):
      raise error.invalid_argument(
          f'Edge endpoints must lie in [0, {self.num_nodes}).')
    if not np.all(np.isfinite(capacities)) or np.any(capacities <= 0):
      raise error.invalid_argument('Capacities must be finite and positive.')
    edges = np.sort(edges, axis=1)
    keys = edges[:, 0] * max(self.num_nodes, 1) + edges[:, 1]
    if len(np.unique(keys)) != len(keys):
      raise error.invalid_argument('Duplicate undirected pair in edge list.')
    edges.flags.writeable = False
    capacities.flags.writeable = False
    object.__setattr__(self, 'num_nodes', int(self.num_nodes))
    object.__setattr__(self, 'edges', edges)
    object.__setattr__(self, 'capacities', capacities)

  @property
  def num_edges(self) -> int:
    return len(self.edges)

  @property
  def is_unweighted(self) -> bool:
    """True when every edge has the same capacity."""
    return bool(np.all(self.capacities == self.capacities[:1]))

  @property
  def adjacency(self) -> np.ndarray:
    adjacency = np.zeros((self.num_nodes, self.num_nodes), dtype=bool)
    adjacency[self.edges[:, 0], self.edges[:, 1]] = True
    adjacency[self.edges[:, 1], self.edges[:, 0]] = True
    return adjacency

  @property
  def capacity_matrix(self) -> np.ndarray:
    """The symmetric capacity matrix S."""
    matrix = np.zeros((self.num_nodes, self.num_nodes))
    matrix[self.edges[:, 0], self.edges[:, 1]] = self.capacities
    matrix[self.edges[:, 1], self.edges[:, 0]] = self.capacities
    return matrix

  def permuted(self, permutation: np.ndarray) -> 'WeightedGraph':
    """Relabels node i as permutation[i]."""
    permutation = np.asarray(permutation)
    return WeightedGraph(self.num_nodes, permutation[self.edges],
                         self.capacities)


def node_strengths(graph: WeightedGraph) -> np.ndarray:
  """Returns s_i = sum_j S_ij for every node."""
  strengths = np.zeros(graph.num_nodes)
  np.add.at(strengths, graph.edges[:, 0], graph.capacities)
  np.add.at(strengths, graph.edges[:, 1], graph.capacities)
  return strengths


def from_capacity_matrix(capacity: np.ndarray,
                         symmetrize: bool = True) -> WeightedGraph:
  """Builds a graph from a capacity matrix.

  Args:
    capacity: (n, n) nonnegative matrix. Zero entries mean no edge.
    symmetrize: Whether `capacity` is a directed matrix C to be turned into
      S = C + C^T. Otherwise it must already be symmetric.

  Returns:
    The graph with an edge for every positive entry of S above the diagonal.
  """
  capacity = np.asarray(capacity, dtype=np.float64)
  if capacity.ndim != 2 or capacity.shape[0] != capacity.shape[1]:
    raise error.invalid_argument(
        f'Expected a square matrix, got shape {capacity.shape}.')
  if np.any(capacity < 0) or np.any(np.diag(capacity) != 0):
    raise error.invalid_argument(
        'Capacities must be nonnegative with a zero diagonal.')
  if symmetrize:
    symmetric = capacity + capacity.T
  else:
    if not np.array_equal(capacity, capacity.T):
      raise error.invalid_argument('Capacity matrix is not symmetric.')
    symmetric = capacity
  rows, cols = np.nonzero(np.triu(symmetric, k=1))
  return WeightedGraph(len(capacity), np.stack([rows, cols], axis=1),
                       symmetric[rows, cols])


def _parse_edge_list(
    text: str) -> Tuple[int, bool, List[Tuple[int, int, int, float]]]:
  """Returns the node count, the directed flag and `(line, i, j, c)` rows."""
  headers: Dict[str, str] = {}
  entries = []
  for line_number, raw in enumerate(text.splitlines(), start=1):
    line = raw.strip()
    if not line or line.startswith('#'):
      continue
    if '=' in line:
      key, _, value = line.partition('=')
      key, value = key.strip(), value.strip()
      if key not in ('n', 'directed') or key in headers:
        raise error.invalid_argument(
            f'Line {line_number}: unknown or repeated header {line!r}.',
            line=line_number)
      headers[key] = value
      continue
    fields = line.split()
    if len(fields) not in (2, 3):
      raise error.invalid_argument(
          f'Line {line_number}: expected "i j capacity", got {line!r}.',
          line=line_number)
    try:
      i, j = int(fields[0]), int(fields[1])
      capacity = float(fields[2]) if len(fields) == 3 else 1.
    except ValueError:
      raise error.invalid_argument(
          f'Line {line_number}: malformed edge {line!r}.',
          line=line_number) from None
    if i < 0 or j < 0:
      raise error.invalid_argument(
          f'Line {line_number}: negative node index.', line=line_number)
    if i == j:
      raise error.invalid_argument(
          f'Line {line_number}: self-loop on node {i}.', line=line_number)
    if not np.isfinite(capacity) or capacity <= 0:
      raise error.invalid_argument(
          f'Line {line_number}: capacity must be positive, got {capacity}.',
          line=line_number)
    entries.append((line_number, i, j, capacity))

  directed = False
  if 'directed' in headers:
    directed = _TRUE_VALUES.get(headers['directed'].lower())
    if directed is None:
      raise error.invalid_argument(
          f'Invalid directed header {headers["directed"]!r}.')
  largest = max((max(i, j) for _, i, j, _ in entries), default=-1)
  if 'n' in headers:
    try:
      num_nodes = int(headers['n'])
    except ValueError:
      raise error.invalid_argument(
          f'Invalid node count {headers["n"]!r}.') from None
    if num_nodes <= largest:
      raise error.invalid_argument(
          f'Node index {largest} out of range for n={num_nodes}.')
  else:
    num_nodes = largest + 1

  seen: Dict[Tuple[int, int], int] = {}
  for line_number, i, j, _ in entries:
    key = (i, j) if directed else (min(i, j), max(i, j))
    if key in seen:
      raise error.invalid_argument(
          f'Line {line_number}: duplicate pair {key}, first seen on line '
          f'{seen[key]}.', line=line_number)
    seen[key] = line_number
  return num_nodes, directed, entries


def load_graph(text: str) -> WeightedGraph:
  """Parses the edge-list format.

  Args:
    text: Edge-list text.

  Returns:
    The parsed graph. The node count is the `n=` header when present,
    otherwise one more than the largest node index.

  Raises:
    UltrahyperbolicError: INVALID_ARGUMENT for malformed lines, self-loops,
      duplicate pairs and nonpositive capacities. The offending line number
      is attached as `line` context.
  """
  num_nodes, _, entries = _parse_edge_list(text)
  totals: Dict[Tuple[int, int], float] = {}
  for _, i, j, capacity in entries:
    pair = (min(i, j), max(i, j))
    totals[pair] = totals.get(pair, 0.) + capacity
  edges = np.array(list(totals.keys()), dtype=np.int64).reshape(-1, 2)
  return WeightedGraph(num_nodes, edges, list(totals.values()))


def load_capacity_matrix(text: str) -> np.ndarray:
  """Parses the edge-list format into a dense capacity matrix.

  Directed input keeps C_ij and C_ji apart. Undirected input fills both.
  """
  num_nodes, directed, entries = _parse_edge_list(text)
  capacity = np.zeros((num_nodes, num_nodes))
  for _, i, j, value in entries:
    capacity[i, j] = value
    if not directed:
      capacity[j, i] = value
  return capacity


def read_graph(path: Union[str, os.PathLike]) -> WeightedGraph:
  """Reads an edge-list file. See `load_graph`."""
  with open(path, 'r', encoding='utf-8') as f:
    return load_graph(f.read())


def read_capacity_matrix(path: Union[str, os.PathLike]) -> np.ndarray:
  """Reads an edge-list file. See `load_capacity_matrix`."""
  with open(path, 'r', encoding='utf-8') as f:
    return load_capacity_matrix(f.read())


def format_graph(graph: WeightedGraph) -> str:
  """Serializes `graph` in the edge-list format with an `n=` header."""
  lines = [f'n={graph.num_nodes}']
  for (i, j), capacity in zip(graph.edges, graph.capacities):
    lines.append(f'{i}\t{j}\t{capacity:.17g}')
  return '\n'.join(lines) + '\n'


def write_graph(graph: WeightedGraph, path: Union[str, os.PathLike]):
  with open(path, 'w', encoding='utf-8') as f:
    f.write(format_graph(graph))


def from_networkx(graph: nx.Graph,
                  weight: Optional[str] = None) -> WeightedGraph:
  """Converts a networkx graph, relabelling nodes 0..n-1 in sorted order.

  Args:
    graph: An undirected networkx graph without self-loops.
    weight: Edge attribute holding the capacity. Capacities are 1 when None
      or when an edge lacks the attribute.

  Returns:
    The equivalent WeightedGraph.
  """
  if graph.is_directed():
    raise error.invalid_argument('Expected an undirected networkx graph.')
  relabelled = nx.convert_node_labels_to_integers(graph, ordering='sorted')
  edges, capacities = [], []
  for i, j, data in relabelled.edges(data=True):
    edges.append((i, j))
    capacities.append(float(data.get(weight, 1.)) if weight else 1.)
  return WeightedGraph(relabelled.number_of_nodes(), edges, capacities)


def karate_club(weighted: bool = True) -> WeightedGraph:
  """Zachary's karate club, 34 members and 78 ties.

  Members 0 and 33 are the two leaders. The checked-in directed capacity
  matrix C is symmetrized into S = C + C^T.

  Args:
    weighted: Use S as capacities. When False every tie has capacity 1.

  Returns:
    The karate club graph.
  """
  graph = read_graph(KARATE_CLUB_PATH)
  if (graph.num_nodes != KARATE_CLUB_NODES or
      graph.num_edges != KARATE_CLUB_EDGES):
    raise error.failed_precondition(
        f'Unexpected karate club size: {graph.num_nodes} nodes, '
        f'{graph.num_edges} edges.')
  capacity = graph.capacity_matrix
  if not np.array_equal(capacity, capacity.T):
    raise error.failed_precondition('Karate club capacities are asymmetric.')
  if weighted:
    return graph
  return WeightedGraph(graph.num_nodes, graph.edges,
                       np.ones(graph.num_edges))


class PlantedHierarchy(NamedTuple):
  """A synthetic graph with known node levels.

  Attributes:
    graph: The weighted graph.
    levels: Level of every node; 0 for roots, 1 for hubs, 2 for leaves.
  """
  graph: WeightedGraph
  levels: np.ndarray


def planted_hierarchy(num_nodes: int = 150, seed: int = 0,
                      cross_link_probability: float = 0.02
                      ) -> PlantedHierarchy:
  """Builds a three level hierarchy with cycles.

  A few roots are joined in a ring. Every hub hangs off a root and every leaf
  off a hub, with capacities decreasing by level. Siblings under the same hub
  are chained into cycles and random cross links join leaves of different
  branches.

  Args:
    num_nodes: Total node count, at least 8.
    seed: Seed of the construction.
    cross_link_probability: Probability of a cross link per leaf pair from
      different hubs.

  Returns:
    The graph and the planted level of every node.
  """
  if num_nodes < 8:
    raise error.invalid_argument(
        f'planted_hierarchy needs at least 8 nodes, got {num_nodes}.')
  rng = np.random.default_rng(seed)
  num_roots = max(2, num_nodes // 50)
  num_hubs = max(num_roots, num_nodes // 10)
  roots = np.arange(num_roots)
  hubs = np.arange(num_roots, num_roots + num_hubs)
  leaves = np.arange(num_roots + num_hubs, num_nodes)

  g = nx.Graph()
  g.add_nodes_from(range(num_nodes))
  for k, root in enumerate(roots):
    g.add_edge(int(root), int(roots[(k + 1) % num_roots]), capacity=4.)
  hub_parent = {}
  for k, hub in enumerate(hubs):
    hub_parent[hub] = roots[k % num_roots]
    g.add_edge(int(hub), int(hub_parent[hub]), capacity=3.)
  leaf_parent = rng.choice(hubs, size=len(leaves))
  for leaf, hub in zip(leaves, leaf_parent):
    g.add_edge(int(leaf), int(hub), capacity=2.)
  for hub in hubs:
    children = leaves[leaf_parent == hub]
    for a, b in zip(children[:-1], children[1:]):
      g.add_edge(int(a), int(b), capacity=1.)
  for a in range(len(leaves)):
    for b in range(a + 1, len(leaves)):
      if (leaf_parent[a] != leaf_parent[b] and
          rng.uniform() < cross_link_probability):
        g.add_edge(int(leaves[a]), int(leaves[b]), capacity=1.)

  levels = np.full(num_nodes, 2)
  levels[roots] = 0
  levels[hubs] = 1
  graph = from_networkx(g, weight='capacity')
  logging.info('Planted hierarchy: %d nodes, %d edges.', graph.num_nodes,
               graph.num_edges)
  return PlantedHierarchy(graph, levels)
