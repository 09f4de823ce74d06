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
"""Command-line entry point: train, eval and distances.

Example usage:
  ultrahyperbolic train --graph=karate.tsv --p=3 --q=1 --beta=-1 \
      --tau=1e-2 --eta=1e-6 --iters=10000 --seed=0 --mode=pseudo
  ultrahyperbolic eval --dataset=karate --embeddings=embeddings.csv \
      --leaders=0,33 --top-k 10
  ultrahyperbolic distances --embeddings=embeddings.csv --output=d.csv

Exit codes are 0 on success, 1 on usage or input errors and 2 when training
diverges. The `UH_THREADS` environment variable caps worker threads.
"""

import contextlib
import dataclasses
import hashlib
import os
import sys
import time
from typing import Any, Dict, Optional, Sequence

from absl import app
from absl import flags
from absl import logging
from google.rpc import code_pb2
import immutabledict

from ultrahyperbolic import embedding_io
from ultrahyperbolic import error
from ultrahyperbolic import graph_embedding
from ultrahyperbolic import graph_utils
from ultrahyperbolic import hierarchy_metrics
from ultrahyperbolic import optimizer
from ultrahyperbolic import pseudo_geometry

EXIT_SUCCESS = 0
EXIT_USAGE = 1
EXIT_DIVERGENCE = 2

THREADS_ENV_VAR = 'UH_THREADS'

_DATASETS = immutabledict.immutabledict({
    'karate': lambda: graph_utils.karate_club(weighted=True),
    'karate_unweighted': lambda: graph_utils.karate_club(weighted=False),
})

_MODES = immutabledict.immutabledict(
    {mode.value: mode for mode in optimizer.OptimizerMode})

flags.DEFINE_string('graph', None, 'Edge-list file of the graph.')
flags.DEFINE_enum('dataset', None, list(_DATASETS),
                  'Built-in graph used when --graph is not set.')
flags.DEFINE_integer('p', 3, 'Number of space dimensions.')
flags.DEFINE_integer('q', 1, 'Number of time dimensions minus one.')
flags.DEFINE_float('beta', -1., 'Negative curvature parameter.')
flags.DEFINE_float('tau', 1e-2, 'Softmax temperature.')
flags.DEFINE_float('eta', 1e-6, 'Step size.')
flags.DEFINE_float('epsilon', 0.1, 'Half-width of the initial perturbation.')
flags.DEFINE_integer('iters', 10000, 'Maximum number of iterations.')
flags.DEFINE_integer('seed', 0, 'Seed of every random draw.')
flags.DEFINE_enum('mode', 'pseudo', list(_MODES), 'Optimizer mode.')
flags.DEFINE_integer('negatives', None,
                     'Non-edges sampled per iteration on large graphs. All '
                     'non-edges are used when unset.')
flags.DEFINE_bool('line_search', False, 'Enables backtracking line search.')
flags.DEFINE_string('output_dir', '.', 'Directory of training artifacts.')
flags.DEFINE_string('embeddings', None, 'Embeddings CSV to evaluate.')
flags.DEFINE_list('leaders', [], 'Node indices whose ranks are reported.')
flags.DEFINE_integer('top_k', None,
                     'Extra Spearman correlation over the top_k strongest '
                     'nodes.')
flags.DEFINE_alias('top-k', 'top_k')
flags.DEFINE_float('min_strength', None,
                   'Extra Spearman correlation over nodes at least this '
                   'strong.')
flags.DEFINE_string('output', None,
                    'Destination of the eval report or distance matrix.')
FLAGS = flags.FLAGS


class CommandError(Exception):
  """A failed command and its exit code."""

  def __init__(self, exit_code: int, message: str):
    super().__init__(message)
    self.exit_code = exit_code


@contextlib.contextmanager
def _convert_errors():
  """Converts library and I/O errors into CommandError."""
  try:
    yield
  except error.UltrahyperbolicError as e:
    if e.code == code_pb2.ABORTED:
      raise CommandError(EXIT_DIVERGENCE, str(e)) from e
    raise CommandError(EXIT_USAGE, str(e)) from e
  except OSError as e:
    raise CommandError(EXIT_USAGE, str(e)) from e


@dataclasses.dataclass
class RunManifest:
  """Everything needed to trace a training run back to its inputs."""
  config: Dict[str, Any]
  input_digests: Dict[str, str]
  outputs: Dict[str, str]
  timings: Dict[str, float]

  def to_json(self) -> Dict[str, Any]:
    return dataclasses.asdict(self)


def num_threads() -> int:
  """Reads the worker thread cap from the environment, default 1."""
  value = os.environ.get(THREADS_ENV_VAR, '1')
  try:
    threads = int(value)
  except ValueError:
    threads = 0
  if threads < 1:
    raise error.invalid_argument(
        f'{THREADS_ENV_VAR} must be a positive integer, got {value!r}.')
  return threads


def _load_graph(flag_values: flags.FlagValues):
  """Returns the graph and the digest of its source."""
  if flag_values.graph:
    return (graph_utils.read_graph(flag_values.graph),
            embedding_io.file_digest(flag_values.graph))
  if flag_values.dataset:
    graph = _DATASETS[flag_values.dataset]()
    text = graph_utils.format_graph(graph).encode('utf-8')
    return graph, 'sha256:' + hashlib.sha256(text).hexdigest()
  raise error.invalid_argument('One of --graph or --dataset is required.')


def _signature(flag_values: flags.FlagValues) -> pseudo_geometry.Signature:
  return pseudo_geometry.Signature(flag_values.p, flag_values.q,
                                   flag_values.beta)


def training_config(flag_values: flags.FlagValues
                   ) -> graph_embedding.TrainingConfig:
  return graph_embedding.TrainingConfig(
      signature=_signature(flag_values),
      temperature=flag_values.tau,
      epsilon=flag_values.epsilon,
      step_size=flag_values.eta,
      max_iterations=flag_values.iters,
      seed=flag_values.seed,
      num_negatives=flag_values.negatives,
      mode=_MODES[flag_values.mode],
      num_threads=num_threads(),
      line_search=flag_values.line_search)


def _config_json(config: graph_embedding.TrainingConfig) -> Dict[str, Any]:
  resolved = {}
  for field in dataclasses.fields(config):
    value = getattr(config, field.name)
    if isinstance(value, pseudo_geometry.Signature):
      value = dataclasses.asdict(value)
    elif isinstance(value, optimizer.OptimizerMode):
      value = value.value
    resolved[field.name] = value
  return resolved


def cmd_train(flag_values: flags.FlagValues = FLAGS) -> int:
  """Trains embeddings and writes embeddings, trace and manifest files."""
  started = time.perf_counter()
  config = training_config(flag_values)
  graph, graph_digest = _load_graph(flag_values)
  if config.signature.q == 0 and config.mode != optimizer.OptimizerMode.FLAT:
    logging.warning('q=0 is the hyperbolic special case of %s.',
                    config.signature)
  loaded = time.perf_counter()

  embeddings = graph_embedding.train(graph, config)
  trained = time.perf_counter()

  os.makedirs(flag_values.output_dir, exist_ok=True)
  outputs = {
      'embeddings': os.path.join(flag_values.output_dir, 'embeddings.csv'),
      'trace': os.path.join(flag_values.output_dir, 'trace.csv'),
      'manifest': os.path.join(flag_values.output_dir, 'manifest.json'),
  }
  outputs['metadata'] = embedding_io.write_embeddings(
      embeddings, outputs['embeddings'], config.mode)
  embedding_io.write_trace(embeddings.trace, outputs['trace'])
  finished = time.perf_counter()

  manifest = RunManifest(
      config=_config_json(config),
      input_digests={'graph': graph_digest},
      outputs=outputs,
      timings={
          'load_seconds': loaded - started,
          'train_seconds': trained - loaded,
          'write_seconds': finished - trained,
      })
  embedding_io.write_json(manifest.to_json(), outputs['manifest'])
  logging.info('Wrote %s.', ', '.join(sorted(outputs.values())))
  return EXIT_SUCCESS


def _leaders(flag_values: flags.FlagValues) -> Sequence[int]:
  try:
    return [int(leader) for leader in flag_values.leaders]
  except ValueError:
    raise error.invalid_argument(
        f'--leaders must be node indices, got {flag_values.leaders}.'
    ) from None


def _require_embeddings(flag_values: flags.FlagValues
                        ) -> graph_embedding.EmbeddingSet:
  if not flag_values.embeddings:
    raise error.invalid_argument('--embeddings is required.')
  return embedding_io.read_embeddings(flag_values.embeddings)


def cmd_eval(flag_values: flags.FlagValues = FLAGS) -> int:
  """Prints the hierarchy report of trained embeddings as JSON."""
  embeddings = _require_embeddings(flag_values)
  graph, _ = _load_graph(flag_values)
  report = hierarchy_metrics.hierarchy_report(
      embeddings, graph, leaders=_leaders(flag_values),
      top_k=flag_values.top_k, min_strength=flag_values.min_strength)
  document = report.to_json()
  if flag_values.output:
    embedding_io.write_json(document, flag_values.output)
  sys.stdout.write(embedding_io.format_json(document))
  return EXIT_SUCCESS


def cmd_distances(flag_values: flags.FlagValues = FLAGS) -> int:
  """Writes the full dissimilarity matrix of trained embeddings."""
  embeddings = _require_embeddings(flag_values)
  output = flag_values.output or os.path.join(flag_values.output_dir,
                                              'distances.csv')
  embedding_io.write_matrix(
      hierarchy_metrics.dissimilarity_matrix(embeddings), output)
  logging.info('Wrote %s.', output)
  return EXIT_SUCCESS


COMMANDS = immutabledict.immutabledict({
    'train': cmd_train,
    'eval': cmd_eval,
    'distances': cmd_distances,
})


def run(command: str, flag_values: flags.FlagValues = FLAGS) -> int:
  """Runs `command` and maps failures to exit codes."""
  try:
    with _convert_errors():
      return COMMANDS[command](flag_values)
  except CommandError as e:
    logging.error('%s failed: %s', command, e)
    return e.exit_code


def main(argv: Sequence[str]) -> Optional[int]:
  if len(argv) != 2 or argv[1] not in COMMANDS:
    raise app.UsageError(
        f'Expected one command out of {", ".join(COMMANDS)}.')
  return run(argv[1])


def run_main():
  app.run(main)


if __name__ == '__main__':
  run_main()
