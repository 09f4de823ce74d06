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
"""Random points and tangent vectors for property tests."""

import numpy as np

from ultrahyperbolic import manifold_maps
from ultrahyperbolic import pseudo_geometry


def random_points(rng: np.random.Generator, sig: pseudo_geometry.Signature,
                  size: int, scale: float = 1.) -> np.ndarray:
  """Samples `size` points of Q^{p,q}_beta through psi^-1.

  Args:
    rng: Source of randomness.
    sig: Signature of the manifold.
    size: Number of points.
    scale: Standard deviation of the R^p component.

  Returns:
    A (size, d) array of points.
  """
  u = rng.normal(size=(size, sig.time_dims))
  u /= np.linalg.norm(u, axis=-1, keepdims=True)
  v = scale * rng.normal(size=(size, sig.p))
  return manifold_maps.psi_inverse(manifold_maps.SphereCrossEuclidean(u, v),
                                   sig)


def random_tangents(rng: np.random.Generator, x: np.ndarray,
                    sig: pseudo_geometry.Signature,
                    scale: float = 1.) -> np.ndarray:
  """Samples one tangent vector per point of `x`."""
  z = scale * rng.normal(size=x.shape)
  return pseudo_geometry.project_to_tangent(x, z, sig)


def random_normal_neighborhood_pairs(
    rng: np.random.Generator, sig: pseudo_geometry.Signature, size: int,
    margin: float = 1e-3, max_norm: float = 2.):
  """Samples pairs (x, y) with y = exp_x(xi) and <x, y>_q < |beta| - margin.

  Args:
    rng: Source of randomness.
    sig: Signature of the manifold.
    size: Number of pairs.
    margin: Required gap below |beta|.
    max_norm: Tangent vectors are rescaled to a uniform random Euclidean
      norm below this value.

  Returns:
    Arrays (x, xi, y), each of shape (size, d).
  """
  xs, xis, ys = [], [], []
  count = 0
  while count < size:
    x = random_points(rng, sig, size)
    xi = random_tangents(rng, x, sig)
    target = max_norm * rng.uniform(size=size)
    xi *= (target / np.linalg.norm(xi, axis=-1))[:, None]
    y = manifold_maps.exp_map(x, xi, sig, validate=False)
    keep = (pseudo_geometry.scalar_product(x, y, sig) <
            sig.abs_beta - margin)
    xs.append(x[keep])
    xis.append(xi[keep])
    ys.append(y[keep])
    count += int(np.sum(keep))
  return tuple(np.concatenate(part)[:size] for part in (xs, xis, ys))
