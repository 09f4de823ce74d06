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
"""Pseudo-Euclidean ambient space primitives for pseudo-hyperboloids.

The ambient space R^{p,q+1} has d = p + q + 1 coordinates laid out time
first: indices 0..q are time coordinates, indices q+1..p+q are space
coordinates. The scalar product is

  <a, b>_q = -sum_{i <= q} a_i b_i + sum_{j > q} a_j b_j

and the pseudo-hyperboloid Q^{p,q}_beta is the level set <x, x>_q = beta for
some beta < 0.

Vectors are numpy arrays whose trailing axis has length d. Every function
broadcasts over leading axes, so a batch of n points is an (n, d) array.
"""

import dataclasses
from typing import Union

import numpy as np

from ultrahyperbolic import error

MANIFOLD_TOLERANCE = 1e-9
TANGENT_TOLERANCE = 1e-9

ArrayLike = Union[np.ndarray, list, tuple]
Scalar = Union[float, np.ndarray]


@dataclasses.dataclass(frozen=True)
class Signature:
  """The triple (p, q, beta) fixing the manifold Q^{p,q}_beta.

  Attributes:
    p: Number of space dimensions.
    q: Number of time dimensions minus one.
    beta: Strictly negative curvature parameter. Stored as given.
  """
  p: int
  q: int
  beta: float = -1.0

  def __post_init__(self):
    for name in ('p', 'q'):
      value = getattr(self, name)
      if isinstance(value, bool) or not isinstance(value, (int, np.integer)):
        raise error.invalid_argument(
            f'Signature {name} must be an integer, got {value!r}.')
      if value < 0:
        raise error.invalid_argument(
            f'Signature {name} must be nonnegative, got {value}.')
    if self.p + self.q < 1:
      raise error.invalid_argument(
          'Signature must describe a manifold of dimension at least 1, got '
          f'p={self.p}, q={self.q}.')
    if not np.isfinite(self.beta) or self.beta >= 0:
      raise error.invalid_argument(
          f'Signature beta must be finite and negative, got {self.beta}.',
          beta=float(self.beta))

  @property
  def d(self) -> int:
    """Ambient dimension p + q + 1."""
    return self.p + self.q + 1

  @property
  def time_dims(self) -> int:
    return self.q + 1

  @property
  def manifold_dim(self) -> int:
    return self.p + self.q

  @property
  def abs_beta(self) -> float:
    return abs(float(self.beta))

  @property
  def metric_diagonal(self) -> np.ndarray:
    """Diagonal of G = I_{q+1,p}: -1 on time coordinates, +1 on space."""
    diagonal = np.ones(self.d)
    diagonal[:self.time_dims] = -1.
    return diagonal

  def __str__(self):
    return f'Q^{{{self.p},{self.q}}}_{{{self.beta:g}}}'


def as_ambient(
    a: ArrayLike, sig: Signature, name: str = 'vector') -> np.ndarray:
  """Converts `a` to a float array and checks its trailing dimension.

  Args:
    a: Array-like with trailing axis of length `sig.d`.
    sig: Signature of the ambient space.
    name: Used in error messages.

  Returns:
    A float64 numpy array.

  Raises:
    UltrahyperbolicError: INVALID_ARGUMENT on a dimension mismatch or
      non-finite entries.
  """
  array = np.asarray(a, dtype=np.float64)
  if array.ndim == 0 or array.shape[-1] != sig.d:
    raise error.invalid_argument(
        f'Expected {name} with trailing dimension {sig.d} for {sig}, got '
        f'shape {array.shape}.', expected=sig.d, shape=list(array.shape))
  if not np.all(np.isfinite(array)):
    raise error.invalid_argument(f'{name} has non-finite entries.')
  return array


def as_scalar(value: np.ndarray) -> Scalar:
  """Unwraps 0-d results to a Python float."""
  return float(value) if np.ndim(value) == 0 else value


def _readonly(array: np.ndarray) -> np.ndarray:
  array = np.array(array, dtype=np.float64)
  array.flags.writeable = False
  return array


def unchecked_scalar_product(
    a: np.ndarray, b: np.ndarray, q: int) -> np.ndarray:
  """Scalar product with q + 1 time coordinates and no input checks."""
  time = np.sum(a[..., :q + 1] * b[..., :q + 1], axis=-1)
  space = np.sum(a[..., q + 1:] * b[..., q + 1:], axis=-1)
  return space - time


def scalar_product(a: ArrayLike, b: ArrayLike, sig: Signature) -> Scalar:
  """Returns the indefinite scalar product <a, b>_q.

  Args:
    a: Ambient vector(s), trailing dimension `sig.d`.
    b: Ambient vector(s), broadcastable against `a`.
    sig: Signature of the ambient space.

  Returns:
    A float for single vectors, otherwise an array over the batch axes.

  Raises:
    UltrahyperbolicError: INVALID_ARGUMENT on a dimension mismatch.
  """
  a = as_ambient(a, sig, 'a')
  b = as_ambient(b, sig, 'b')
  return as_scalar(unchecked_scalar_product(a, b, sig.q))


def quadratic_norm(a: ArrayLike, sig: Signature) -> Scalar:
  """Returns <a, a>_q, which may be negative, zero or positive."""
  a = as_ambient(a, sig, 'a')
  return as_scalar(unchecked_scalar_product(a, a, sig.q))


def metric_apply(a: ArrayLike, sig: Signature) -> np.ndarray:
  """Applies G: negates the q + 1 time coordinates. G is an involution."""
  a = as_ambient(a, sig, 'a')
  return a * sig.metric_diagonal


def pole(sig: Signature) -> np.ndarray:
  """Returns the positive pole (sqrt|beta|, 0, ..., 0)."""
  x = np.zeros(sig.d)
  x[0] = np.sqrt(sig.abs_beta)
  return _readonly(x)


def manifold_residual(x: ArrayLike, sig: Signature) -> Scalar:
  """Returns <x, x>_q - beta."""
  x = as_ambient(x, sig, 'x')
  return as_scalar(unchecked_scalar_product(x, x, sig.q) - sig.beta)


def check_manifold_point(
    x: ArrayLike, sig: Signature,
    tolerance: float = MANIFOLD_TOLERANCE) -> np.ndarray:
  """Validates that `x` lies on Q^{p,q}_beta.

  The check is |<x, x>_q - beta| <= tolerance * max(1, |beta|).

  Args:
    x: Candidate point(s).
    sig: Signature of the manifold.
    tolerance: Relative tolerance.

  Returns:
    A read-only float64 copy of `x`.

  Raises:
    UltrahyperbolicError: INVALID_ARGUMENT when any point is off the manifold.
  """
  x = as_ambient(x, sig, 'point')
  residual = np.abs(unchecked_scalar_product(x, x, sig.q) - sig.beta)
  bound = tolerance * max(1., sig.abs_beta)
  if np.any(residual > bound):
    raise error.invalid_argument(
        f'Point does not lie on {sig}.',
        residual=float(np.max(residual)), tolerance=bound)
  return _readonly(x)


def check_tangent_vector(
    x: ArrayLike, xi: ArrayLike, sig: Signature,
    tolerance: float = TANGENT_TOLERANCE) -> np.ndarray:
  """Validates that `xi` lies in the tangent space at `x`.

  The check is |<x, xi>_q| <= tolerance * max(1, ||x|| ||xi||) with Euclidean
  norms on the right-hand side.

  Args:
    x: Base point(s) on the manifold.
    xi: Candidate tangent vector(s).
    sig: Signature of the manifold.
    tolerance: Relative tolerance.

  Returns:
    A read-only float64 copy of `xi`.

  Raises:
    UltrahyperbolicError: INVALID_ARGUMENT when any vector is not tangent.
  """
  x = as_ambient(x, sig, 'point')
  xi = as_ambient(xi, sig, 'tangent vector')
  product = np.abs(unchecked_scalar_product(x, xi, sig.q))
  scale = np.maximum(
      1., np.linalg.norm(x, axis=-1) * np.linalg.norm(xi, axis=-1))
  if np.any(product > tolerance * scale):
    raise error.invalid_argument(
        'Vector is not tangent to the manifold at the base point.',
        scalar_product=float(np.max(product)))
  return _readonly(xi)


def project_to_tangent(
    x: ArrayLike, z: ArrayLike, sig: Signature) -> np.ndarray:
  """Orthogonally projects `z` onto the tangent space at `x`.

  Computes z - (<z, x>_q / <x, x>_q) x. Projecting twice is the same as
  projecting once.

  Args:
    x: Point(s) on the manifold.
    z: Arbitrary ambient vector(s).
    sig: Signature of the manifold.

  Returns:
    The tangent component of `z`.
  """
  x = as_ambient(x, sig, 'point')
  z = as_ambient(z, sig, 'z')
  ratio = (unchecked_scalar_product(z, x, sig.q) /
           unchecked_scalar_product(x, x, sig.q))
  return z - ratio[..., None] * x


def normalize_to_manifold(z: ArrayLike, sig: Signature) -> np.ndarray:
  """Rescales a time-like vector onto the manifold.

  Args:
    z: Ambient vector(s) with <z, z>_q < 0.
    sig: Signature of the manifold.

  Returns:
    sqrt|beta| * z / sqrt|<z, z>_q| as a read-only array.

  Raises:
    UltrahyperbolicError: FAILED_PRECONDITION if some <z, z>_q >= 0, since no
      rescaling of a null or space-like vector reaches beta < 0.
  """
  z = as_ambient(z, sig, 'z')
  norm = unchecked_scalar_product(z, z, sig.q)
  if np.any(norm >= 0):
    raise error.failed_precondition(
        'Cannot normalize a non time-like vector onto the manifold.',
        quadratic_norm=float(np.max(norm)))
  x = np.sqrt(sig.abs_beta) * z / np.sqrt(-norm)[..., None]
  if __debug__:
    residual = np.abs(unchecked_scalar_product(x, x, sig.q) - sig.beta)
    scale = np.maximum(1., np.sum(x * x, axis=-1))
    assert np.all(residual <= 1e-9 * scale), residual
  return _readonly(x)
