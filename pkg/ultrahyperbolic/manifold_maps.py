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
"""Closed-form geodesic machinery on pseudo-hyperboloids.

Geodesics, exponential and logarithm maps, geodesic distance, the continuous
dissimilarity used for learning, the diffeomorphisms between Q^{p,q}_beta and
S^q x R^p, and the anti-isometry exchanging Q^{p,q}_beta with
Q^{q+1,p-1}_{-beta}.

Public functions validate their inputs against the manifold and tangent space
invariants. Callers iterating on already validated points may pass
`validate=False`.
"""

import enum
from typing import NamedTuple, Union

import numpy as np

from ultrahyperbolic import error
from ultrahyperbolic import pseudo_geometry

Signature = pseudo_geometry.Signature
ArrayLike = pseudo_geometry.ArrayLike
Scalar = pseudo_geometry.Scalar

CLASSIFICATION_TOLERANCE = 1e-10
LOG_BRANCH_TOLERANCE = 1e-10
GRADIENT_GUARD_TOLERANCE = 1e-9
UNIT_NORM_TOLERANCE = 1e-9

_scalar_product = pseudo_geometry.unchecked_scalar_product


class GeodesicClass(enum.Enum):
  """Causal character of a tangent vector, by the sign of <xi, xi>_q."""
  TIME_LIKE = -1
  NULL = 0
  SPACE_LIKE = 1


class SphereCrossEuclidean(NamedTuple):
  """A point of S^q x R^p.

  Attributes:
    u: Unit vector with q + 1 entries.
    v: Unconstrained vector with p entries.
  """
  u: np.ndarray
  v: np.ndarray


def _points(x: ArrayLike, sig: Signature, validate: bool) -> np.ndarray:
  if validate:
    return pseudo_geometry.check_manifold_point(x, sig)
  return np.asarray(x, dtype=np.float64)


def _null_threshold(xi: np.ndarray) -> np.ndarray:
  return CLASSIFICATION_TOLERANCE * np.maximum(1., np.sum(xi * xi, axis=-1))


def classify_tangent(xi: ArrayLike, sig: Signature) -> GeodesicClass:
  """Classifies a single tangent vector as time-like, null or space-like.

  The vector is null iff |<xi, xi>_q| <= 1e-10 * max(1, ||xi||^2).

  Args:
    xi: A single ambient vector.
    sig: Signature of the ambient space.

  Returns:
    The GeodesicClass of `xi`.
  """
  xi = pseudo_geometry.as_ambient(xi, sig, 'tangent vector')
  if xi.ndim != 1:
    raise error.invalid_argument(
        f'classify_tangent expects a single vector, got shape {xi.shape}.')
  norm = _scalar_product(xi, xi, sig.q)
  if abs(norm) <= _null_threshold(xi):
    return GeodesicClass.NULL
  return GeodesicClass.SPACE_LIKE if norm > 0 else GeodesicClass.TIME_LIKE


def geodesic(x: ArrayLike, xi: ArrayLike, t: Union[float, ArrayLike],
             sig: Signature, validate: bool = True) -> np.ndarray:
  """Evaluates the geodesic through `x` with initial velocity `xi` at `t`.

  The formula branches on the sign of <xi, xi>_q: cosh/sinh for space-like
  vectors, the straight line x + t xi for null vectors and cos/sin for
  time-like vectors. The geodesic is defined for every real `t`.

  Args:
    x: Point(s) on the manifold.
    xi: Tangent vector(s) at `x`.
    t: Geodesic parameter, scalar or broadcastable to the batch shape.
    sig: Signature of the manifold.
    validate: Whether to check the manifold and tangent invariants.

  Returns:
    gamma(t), on the manifold up to round-off.
  """
  x = _points(x, sig, validate)
  if validate:
    xi = pseudo_geometry.check_tangent_vector(x, xi, sig)
  else:
    xi = np.asarray(xi, dtype=np.float64)
  t = np.asarray(t, dtype=np.float64)

  norm = _scalar_product(xi, xi, sig.q)
  null = np.abs(norm) <= _null_threshold(xi)
  speed = np.where(null, 1., np.sqrt(np.abs(norm)))
  sqrt_beta = np.sqrt(sig.abs_beta)
  theta = t * speed / sqrt_beta

  space_like = norm > 0
  along_x = np.where(null, 1., np.where(space_like, np.cosh(theta),
                                        np.cos(theta)))
  along_xi = np.where(
      null, t,
      sqrt_beta / speed * np.where(space_like, np.sinh(theta), np.sin(theta)))
  return along_x[..., None] * x + along_xi[..., None] * xi


def exp_map(x: ArrayLike, xi: ArrayLike, sig: Signature,
            validate: bool = True) -> np.ndarray:
  """Exponential map exp_x(xi) = gamma_{x -> xi}(1)."""
  return geodesic(x, xi, 1., sig, validate=validate)


def _check_normal_neighborhood(product: np.ndarray, sig: Signature):
  if np.any(product >= sig.abs_beta):
    raise error.out_of_range(
        'Point lies outside the normal neighborhood: <x, y>_q >= |beta|, no '
        'geodesic joins the two points.',
        scalar_product=float(np.max(product)), abs_beta=sig.abs_beta)


def log_map(x: ArrayLike, y: ArrayLike, sig: Signature,
            validate: bool = True) -> np.ndarray:
  """Logarithm map log_x(y), inverse of `exp_map` on the normal neighborhood.

  Args:
    x: Base point(s).
    y: Target point(s) with <x, y>_q < |beta|.
    sig: Signature of the manifold.
    validate: Whether to check the manifold invariants.

  Returns:
    The tangent vector at `x` whose exponential is `y`.

  Raises:
    UltrahyperbolicError: OUT_OF_RANGE if <x, y>_q >= |beta|. The offending
      scalar product is attached as `scalar_product` context.
  """
  x = _points(x, sig, validate)
  y = _points(y, sig, validate)
  product = _scalar_product(x, y, sig.q)
  _check_normal_neighborhood(product, sig)

  ratio = product / sig.beta
  middle = np.abs(ratio - 1.) <= LOG_BRANCH_TOLERANCE
  hyperbolic = ratio > 1.
  safe_hyperbolic = np.where(hyperbolic & ~middle, ratio, 2.)
  safe_spherical = np.clip(np.where(hyperbolic | middle, 0., ratio), -1., 1.)
  coefficient = np.where(
      middle, 1.,
      np.where(
          hyperbolic,
          np.arccosh(safe_hyperbolic) / np.sqrt(safe_hyperbolic**2 - 1.),
          np.arccos(safe_spherical) / np.sqrt(1. - safe_spherical**2)))
  direction = y - np.where(middle, 1., ratio)[..., None] * x
  return coefficient[..., None] * direction


def extrinsic_distance(a: ArrayLike, b: ArrayLike, sig: Signature,
                       validate: bool = True) -> Scalar:
  """Returns sqrt|2 beta - 2 <a, b>_q|, the ambient chordal distance."""
  a = _points(a, sig, validate)
  b = _points(b, sig, validate)
  product = _scalar_product(a, b, sig.q)
  return pseudo_geometry.as_scalar(
      np.sqrt(np.abs(2. * sig.beta - 2. * product)))


def _geodesic_distance_from_scalar_product(
    product: np.ndarray, sig: Signature) -> np.ndarray:
  ratio = product / sig.beta
  sqrt_beta = np.sqrt(sig.abs_beta)
  middle = np.abs(ratio - 1.) <= LOG_BRANCH_TOLERANCE
  # Round-off can push boundary ratios marginally outside arccosh / arccos
  # domains.
  hyperbolic = np.arccosh(np.maximum(ratio, 1.))
  spherical = np.arccos(np.clip(ratio, -1., 1.))
  distance = np.where(ratio > 1., hyperbolic, spherical)
  return sqrt_beta * np.where(middle, 0., distance)


def geodesic_distance(x: ArrayLike, y: ArrayLike, sig: Signature,
                      validate: bool = True) -> Scalar:
  """Geodesic "distance" sqrt|<log_x(y), log_x(y)>_q|.

  Args:
    x: Point(s) on the manifold.
    y: Point(s) with <x, y>_q < |beta|.
    sig: Signature of the manifold.
    validate: Whether to check the manifold invariants.

  Returns:
    sqrt|beta| arccosh(r) for r > 1, zero when r = 1 and sqrt|beta| arccos(r)
    for r in (-1, 1), where r = <x, y>_q / beta.

  Raises:
    UltrahyperbolicError: OUT_OF_RANGE if <x, y>_q >= |beta|.
  """
  x = _points(x, sig, validate)
  y = _points(y, sig, validate)
  product = _scalar_product(x, y, sig.q)
  _check_normal_neighborhood(product, sig)
  return pseudo_geometry.as_scalar(
      _geodesic_distance_from_scalar_product(product, sig))


def dissimilarity_from_scalar_product(product: ArrayLike,
                                      sig: Signature) -> Scalar:
  """Dissimilarity as a function of s = <x, y>_q.

  Equals the geodesic distance for s <= 0 and continues linearly as
  sqrt|beta| (pi / 2 + s / |beta|) for s > 0. Both branches give
  sqrt|beta| pi / 2 at s = 0.

  Args:
    product: Scalar product(s) <x, y>_q.
    sig: Signature of the manifold.

  Returns:
    The dissimilarity for every entry of `product`.
  """
  product = np.asarray(product, dtype=np.float64)
  linear = np.sqrt(sig.abs_beta) * (np.pi / 2. + product / sig.abs_beta)
  geodesic_branch = _geodesic_distance_from_scalar_product(
      np.minimum(product, 0.), sig)
  return pseudo_geometry.as_scalar(
      np.where(product > 0., linear, geodesic_branch))


def dissimilarity_derivative(product: ArrayLike, sig: Signature) -> Scalar:
  """Derivative of `dissimilarity_from_scalar_product` with respect to s.

  The arccosh branch has an unbounded derivative as s / beta -> 1. Pairs with
  |s / beta - 1| < 1e-9 contribute a zero derivative.

  Args:
    product: Scalar product(s) <x, y>_q.
    sig: Signature of the manifold.

  Returns:
    d dissimilarity / ds for every entry of `product`.
  """
  product = np.asarray(product, dtype=np.float64)
  ratio = product / sig.beta
  sqrt_beta = np.sqrt(sig.abs_beta)
  guard = np.abs(ratio - 1.) < GRADIENT_GUARD_TOLERANCE
  safe_hyperbolic = np.where((ratio > 1.) & ~guard, ratio, 2.)
  safe_spherical = np.where((ratio < 1.) & ~guard, np.clip(ratio, 0., 1.), 0.)
  hyperbolic = sqrt_beta / np.sqrt(safe_hyperbolic**2 - 1.) / sig.beta
  spherical = -sqrt_beta / np.sqrt(1. - safe_spherical**2) / sig.beta
  derivative = np.where(
      product > 0., 1. / sqrt_beta,
      np.where(guard, 0., np.where(ratio > 1., hyperbolic, spherical)))
  return pseudo_geometry.as_scalar(derivative)


def dissimilarity(x: ArrayLike, y: ArrayLike, sig: Signature,
                  validate: bool = True) -> Scalar:
  """Continuous dissimilarity defined on the whole manifold.

  A symmetric premetric: nonnegative, symmetric and zero on the diagonal, but
  without the triangle inequality or identity of indiscernibles.

  Args:
    x: Point(s) on the manifold.
    y: Point(s) on the manifold.
    sig: Signature of the manifold.
    validate: Whether to check the manifold invariants.

  Returns:
    The dissimilarity between `x` and `y`.
  """
  x = _points(x, sig, validate)
  y = _points(y, sig, validate)
  return dissimilarity_from_scalar_product(_scalar_product(x, y, sig.q), sig)


def psi(x: ArrayLike, sig: Signature,
        validate: bool = True) -> SphereCrossEuclidean:
  """Diffeomorphism Q^{p,q}_beta -> S^q x R^p, x -> (t / ||t||, s / sqrt|beta|).

  `t` are the q + 1 time coordinates of `x` and `s` the p space coordinates.
  The time part never vanishes on the manifold since ||t||^2 = ||s||^2 +
  |beta|.
  """
  x = _points(x, sig, validate)
  time = x[..., :sig.time_dims]
  space = x[..., sig.time_dims:]
  return SphereCrossEuclidean(
      u=time / np.linalg.norm(time, axis=-1, keepdims=True),
      v=space / np.sqrt(sig.abs_beta))


def psi_inverse(z: SphereCrossEuclidean, sig: Signature) -> np.ndarray:
  """Inverse of `psi`: (u, v) -> sqrt|beta| (sqrt(1 + ||v||^2) u, v).

  Args:
    z: Point of S^q x R^p.
    sig: Signature of the manifold.

  Returns:
    The corresponding point of Q^{p,q}_beta.

  Raises:
    UltrahyperbolicError: INVALID_ARGUMENT if `u` is not a unit vector or the
      component sizes do not match `sig`.
  """
  u = np.asarray(z.u, dtype=np.float64)
  v = np.asarray(z.v, dtype=np.float64)
  if u.shape[-1:] != (sig.time_dims,) or v.shape[-1:] != (sig.p,):
    raise error.invalid_argument(
        f'Expected u of size {sig.time_dims} and v of size {sig.p}, got '
        f'shapes {u.shape} and {v.shape}.')
  unit_error = np.abs(np.linalg.norm(u, axis=-1) - 1.)
  if np.any(unit_error > UNIT_NORM_TOLERANCE):
    raise error.invalid_argument(
        'u must have unit Euclidean norm.',
        norm_error=float(np.max(unit_error)))
  radius = np.sqrt(1. + np.sum(v * v, axis=-1, keepdims=True))
  return np.sqrt(sig.abs_beta) * _concatenate_broadcast(radius * u, v)


def _concatenate_broadcast(time: np.ndarray, space: np.ndarray) -> np.ndarray:
  """Concatenates time and space parts whose batch shapes broadcast."""
  batch = np.broadcast_shapes(time.shape[:-1], space.shape[:-1])
  return np.concatenate([
      np.broadcast_to(time, batch + time.shape[-1:]),
      np.broadcast_to(space, batch + space.shape[-1:]),
  ], axis=-1)


def _split_time(z: np.ndarray, sig: Signature):
  time = z[..., :sig.time_dims]
  space = z[..., sig.time_dims:]
  time_norm = np.linalg.norm(time, axis=-1)
  if np.any(time_norm == 0.):
    raise error.failed_precondition(
        'phi is singular where all time coordinates vanish.')
  return time, space, time_norm[..., None]


def phi(z: ArrayLike, sig: Signature) -> np.ndarray:
  """Maps R^{q+1}_* x R^p onto the manifold via psi^-1 o psi.

  Equivalent to (sqrt(|beta| + ||s||^2) t / ||t||, s). Points already on the
  manifold are fixed.

  Args:
    z: Ambient vector(s) with nonzero time part.
    sig: Signature of the manifold.

  Returns:
    phi(z) on Q^{p,q}_beta.

  Raises:
    UltrahyperbolicError: FAILED_PRECONDITION if the time part of some `z` is
      zero.
  """
  z = pseudo_geometry.as_ambient(z, sig, 'z')
  time, space, time_norm = _split_time(z, sig)
  radius = np.sqrt(sig.abs_beta + np.sum(space * space, axis=-1,
                                         keepdims=True))
  return np.concatenate([radius * time / time_norm, space], axis=-1)


def phi_jvp(z: ArrayLike, dz: ArrayLike, sig: Signature) -> np.ndarray:
  """Directional derivative of `phi` at `z` along `dz`.

  With a = sqrt(|beta| + ||s||^2), n = ||t|| and u = t / n:

    d phi_time = (s . ds / a) u + a (dt - u (u . dt)) / n
    d phi_space = ds

  Args:
    z: Ambient vector(s) with nonzero time part.
    dz: Perturbation(s), broadcastable against `z`.
    sig: Signature of the manifold.

  Returns:
    The Jacobian of `phi` at `z` applied to `dz`.
  """
  z = pseudo_geometry.as_ambient(z, sig, 'z')
  dz = pseudo_geometry.as_ambient(dz, sig, 'dz')
  time, space, time_norm = _split_time(z, sig)
  d_time = dz[..., :sig.time_dims]
  d_space = dz[..., sig.time_dims:]
  radius = np.sqrt(sig.abs_beta + np.sum(space * space, axis=-1,
                                         keepdims=True))
  unit = time / time_norm
  d_radius = np.sum(space * d_space, axis=-1, keepdims=True) / radius
  d_unit = (d_time - unit * np.sum(unit * d_time, axis=-1, keepdims=True))
  d_unit = d_unit / time_norm
  return _concatenate_broadcast(d_radius * unit + radius * d_unit, d_space)


def phi_jacobian(z: ArrayLike, sig: Signature) -> np.ndarray:
  """Jacobian of `phi`, shape (..., d, d), assembled from d JVPs."""
  z = pseudo_geometry.as_ambient(z, sig, 'z')
  basis = np.eye(sig.d)
  # Column j is the JVP along basis vector e_j.
  columns = phi_jvp(z[..., None, :], basis, sig)
  return np.swapaxes(columns, -1, -2)


def phi_pullback(z: ArrayLike, gradient: ArrayLike,
                 sig: Signature) -> np.ndarray:
  """Pulls a gradient at phi(z) back to z: J(z)^T gradient."""
  jacobian = phi_jacobian(z, sig)
  gradient = pseudo_geometry.as_ambient(gradient, sig, 'gradient')
  return np.einsum('...ij,...i->...j', jacobian, gradient)


def anti_isometry(x: ArrayLike, sig: Signature) -> np.ndarray:
  """Coordinate reversal sigma(x) = (x_{p+q}, ..., x_0).

  Maps Q^{p,q}_beta onto Q^{q+1,p-1}_{-beta} and negates scalar products. The
  target has positive curvature parameter, so its scalar product is exposed
  through `anti_isometric_scalar_product` rather than a `Signature`.

  Args:
    x: Ambient vector(s).
    sig: Signature of the source manifold.

  Returns:
    The reversed coordinates.

  Raises:
    UltrahyperbolicError: UNIMPLEMENTED when p = 0, since the target would
      have no time dimension.
  """
  if sig.p == 0:
    raise error.unimplemented(
        f'The anti-isometry is not defined for {sig}: it requires p >= 1.')
  x = pseudo_geometry.as_ambient(x, sig, 'x')
  return x[..., ::-1].copy()


def anti_isometric_scalar_product(a: ArrayLike, b: ArrayLike,
                                  sig: Signature) -> Scalar:
  """Scalar product <a, b>_{p-1} of the target space of `anti_isometry`."""
  if sig.p == 0:
    raise error.unimplemented(
        f'The anti-isometry is not defined for {sig}: it requires p >= 1.')
  a = pseudo_geometry.as_ambient(a, sig, 'a')
  b = pseudo_geometry.as_ambient(b, sig, 'b')
  return pseudo_geometry.as_scalar(
      _scalar_product(a, b, sig.p - 1))
