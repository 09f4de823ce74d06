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
"""Micro-benchmark for manifold maps and the ranking loss."""

import abc
import timeit

from absl import app
from absl import flags
import numpy as np

from ultrahyperbolic import graph_embedding
from ultrahyperbolic import graph_utils
from ultrahyperbolic import manifold_maps
from ultrahyperbolic import pseudo_geometry
from ultrahyperbolic.compliance import sampling

flags.DEFINE_integer('repeats', 1000,
                     'Number of times each benchmark will run.')
flags.DEFINE_integer('batch_size', 1024, 'Points per batched map call.')
FLAGS = flags.FLAGS


class _AbstractBenchmark(metaclass=abc.ABCMeta):
  """Base class for benchmarks using timeit."""

  def run(self):
    try:
      time = timeit.timeit(self.statement, setup=self.setup,
                           number=FLAGS.repeats)
    finally:
      self.teardown()
    print(f'{self.name} -- overall: {time:0.2f} s, '
          f'per call: {time/FLAGS.repeats:0.1e} s')

  def setup(self):
    pass

  def teardown(self):
    pass

  @abc.abstractmethod
  def statement(self):
    pass

  @property
  @abc.abstractmethod
  def name(self):
    pass


class _MapBenchmark(_AbstractBenchmark):
  """Benchmark for a batched map between points and tangent vectors."""

  def __init__(self, map_name, sig, validate):
    self._map_name = map_name
    self._sig = sig
    self._validate = validate

  @property
  def name(self):
    checked = 'validated' if self._validate else 'unchecked'
    return f'{self._map_name} {self._sig} {checked}'

  def setup(self):
    rng = np.random.default_rng(0)
    self._x, self._xi, self._y = sampling.random_normal_neighborhood_pairs(
        rng, self._sig, FLAGS.batch_size)

  def statement(self):
    if self._map_name == 'exp':
      manifold_maps.exp_map(self._x, self._xi, self._sig,
                            validate=self._validate)
    elif self._map_name == 'log':
      manifold_maps.log_map(self._x, self._y, self._sig,
                            validate=self._validate)
    else:
      manifold_maps.dissimilarity(self._x, self._y, self._sig,
                                  validate=self._validate)


class _LossBenchmark(_AbstractBenchmark):
  """Benchmark for one loss and gradient evaluation on the karate club."""

  def __init__(self, sig, num_threads):
    self._sig = sig
    self._num_threads = num_threads
    self._objective = None

  @property
  def name(self):
    return f'karate loss {self._sig} threads={self._num_threads}'

  def setup(self):
    graph = graph_utils.karate_club(weighted=True)
    config = graph_embedding.TrainingConfig(signature=self._sig)
    self._points = graph_embedding.init_embeddings(graph.num_nodes,
                                                   config).points
    self._objective = graph_embedding.RankingObjective(
        graph, config.temperature, self._sig, num_threads=self._num_threads)

  def statement(self):
    self._objective.evaluate(self._points)

  def teardown(self):
    if self._objective is not None:
      self._objective.close()
      self._objective = None


def main(argv):
  if len(argv) > 1:
    raise app.UsageError('Too many command-line arguments.')
  small = pseudo_geometry.Signature(p=3, q=1)
  large = pseudo_geometry.Signature(p=8, q=4)
  benchmarks = (
      _MapBenchmark('exp', small, validate=True),
      _MapBenchmark('exp', small, validate=False),
      _MapBenchmark('exp', large, validate=False),
      _MapBenchmark('log', small, validate=True),
      _MapBenchmark('log', large, validate=False),
      _MapBenchmark('dissimilarity', small, validate=False),
      _MapBenchmark('dissimilarity', large, validate=False),
      _LossBenchmark(small, num_threads=1),
      _LossBenchmark(small, num_threads=4),
  )
  for benchmark in benchmarks:
    benchmark.run()


if __name__ == '__main__':
  app.run(main)
