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
"""Run artifacts: embedding, trace and matrix CSVs and JSON documents.

Floats are written with 17 significant digits so that files round-trip
exactly and identical runs produce identical bytes.
"""

import csv
import hashlib
import io
import json
import os
from typing import Any, Dict, Iterable, Mapping, Union

import numpy as np

from ultrahyperbolic import error
from ultrahyperbolic import graph_embedding
from ultrahyperbolic import optimizer
from ultrahyperbolic import pseudo_geometry

PathLike = Union[str, os.PathLike]

_FLOAT_FORMAT = '{:.17g}'
_SIDECAR_SUFFIX = '.meta.json'
_TRACE_HEADER = ('iteration', 'loss', 'grad_norm_sq')


def _format_float(value: float) -> str:
  return _FLOAT_FORMAT.format(float(value))


def metadata_path(embeddings_path: PathLike) -> str:
  """Path of the metadata sidecar written next to an embeddings CSV."""
  root, _ = os.path.splitext(os.fspath(embeddings_path))
  return root + _SIDECAR_SUFFIX


def format_json(document: Mapping[str, Any]) -> str:
  return json.dumps(document, indent=2, sort_keys=True) + '\n'


def write_json(document: Mapping[str, Any], path: PathLike):
  with open(path, 'w', encoding='utf-8') as f:
    f.write(format_json(document))


def _write_rows(path: PathLike, header, rows: Iterable[Iterable[str]]):
  buffer = io.StringIO()
  writer = csv.writer(buffer, lineterminator='\n')
  if header is not None:
    writer.writerow(header)
  writer.writerows(rows)
  with open(path, 'w', encoding='utf-8', newline='') as f:
    f.write(buffer.getvalue())


def embedding_metadata(
    embeddings: graph_embedding.EmbeddingSet,
    mode: optimizer.OptimizerMode) -> Dict[str, Any]:
  """Describes `embeddings` for the sidecar file."""
  sig = embeddings.signature
  metadata = {
      'num_nodes': embeddings.num_nodes,
      'dimension': int(embeddings.points.shape[1]),
      'mode': mode.value,
      'seed': embeddings.seed,
      'iterations': len(embeddings.trace),
      'final_loss': embeddings.final_loss,
  }
  if sig is not None:
    metadata.update(p=sig.p, q=sig.q, beta=sig.beta, manifold=str(sig))
  return metadata


def write_embeddings(embeddings: graph_embedding.EmbeddingSet,
                     path: PathLike,
                     mode: optimizer.OptimizerMode) -> str:
  """Writes `node,coord_0,...,coord_{d-1}` rows and the metadata sidecar.

  Args:
    embeddings: The embeddings.
    path: Destination of the CSV.
    mode: Optimizer mode that produced the embeddings.

  Returns:
    The path of the sidecar.
  """
  dimension = embeddings.points.shape[1]
  header = ['node'] + [f'coord_{k}' for k in range(dimension)]
  rows = ([str(node)] + [_format_float(value) for value in point]
          for node, point in enumerate(embeddings.points))
  _write_rows(path, header, rows)
  sidecar = metadata_path(path)
  write_json(embedding_metadata(embeddings, mode), sidecar)
  return sidecar


def read_embeddings(path: PathLike) -> graph_embedding.EmbeddingSet:
  """Reads embeddings written by `write_embeddings`.

  The signature comes from the sidecar. Without a sidecar the points are
  treated as flat.

  Args:
    path: The embeddings CSV.

  Returns:
    The embeddings, with an empty trace.

  Raises:
    UltrahyperbolicError: INVALID_ARGUMENT on schema violations, or when the
      points are off the manifold named by the sidecar.
  """
  with open(path, 'r', encoding='utf-8', newline='') as f:
    rows = list(csv.reader(f))
  if not rows or not rows[0] or rows[0][0] != 'node':
    raise error.invalid_argument(
        f'{os.fspath(path)}: missing "node,coord_0,..." header.')
  header = rows[0]
  expected = ['node'] + [f'coord_{k}' for k in range(len(header) - 1)]
  if header != expected:
    raise error.invalid_argument(
        f'{os.fspath(path)}: unexpected header {header}.')
  points = []
  for line_number, row in enumerate(rows[1:], start=2):
    if len(row) != len(header):
      raise error.invalid_argument(
          f'{os.fspath(path)}: line {line_number} has {len(row)} fields, '
          f'expected {len(header)}.', line=line_number)
    try:
      node = int(row[0])
      values = [float(value) for value in row[1:]]
    except ValueError:
      raise error.invalid_argument(
          f'{os.fspath(path)}: malformed line {line_number}.',
          line=line_number) from None
    if node != len(points):
      raise error.invalid_argument(
          f'{os.fspath(path)}: expected node {len(points)} on line '
          f'{line_number}, got {node}.', line=line_number)
    points.append(values)
  points = np.array(points, dtype=np.float64).reshape(-1, len(header) - 1)

  metadata = {}
  sidecar = metadata_path(path)
  if os.path.exists(sidecar):
    with open(sidecar, 'r', encoding='utf-8') as f:
      metadata = json.load(f)
  sig = None
  if 'p' in metadata:
    sig = pseudo_geometry.Signature(
        int(metadata['p']), int(metadata['q']), float(metadata['beta']))
  return graph_embedding.EmbeddingSet(points, sig,
                                      seed=int(metadata.get('seed', 0)))


def write_trace(trace: Iterable[optimizer.TraceRecord], path: PathLike):
  """Writes `iteration,loss,grad_norm_sq` rows."""
  rows = ([str(record.iteration), _format_float(record.loss),
           _format_float(record.gradient_norm_sq)] for record in trace)
  _write_rows(path, _TRACE_HEADER, rows)


def write_matrix(matrix: np.ndarray, path: PathLike):
  """Writes a 2-D array as headerless CSV rows."""
  matrix = np.asarray(matrix, dtype=np.float64)
  if matrix.ndim != 2:
    raise error.invalid_argument(
        f'Expected a matrix, got shape {matrix.shape}.')
  _write_rows(path, None,
              ([_format_float(value) for value in row] for row in matrix))


def read_matrix(path: PathLike) -> np.ndarray:
  with open(path, 'r', encoding='utf-8', newline='') as f:
    return np.array([[float(value) for value in row] for row in csv.reader(f)])


def file_digest(path: PathLike) -> str:
  """Returns 'sha256:<hex digest>' of the file contents."""
  digest = hashlib.sha256()
  with open(path, 'rb') as f:
    for block in iter(lambda: f.read(1 << 16), b''):
      digest.update(block)
  return 'sha256:' + digest.hexdigest()
