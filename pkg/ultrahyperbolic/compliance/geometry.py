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
"""A base class for geometry property tests of a pseudo-hyperboloid."""

import abc

from absl.testing import absltest
import numpy as np

from ultrahyperbolic import manifold_maps
from ultrahyperbolic import pseudo_geometry
from ultrahyperbolic.compliance import sampling

_GEODESIC_TIMES = (-2., -1., -.1, 0., .1, 1., 2.)


def _scale(*arrays):
  """Per-row magnitude used to turn absolute tolerances into relative ones."""
  squares = [np.sum(a * a, axis=-1) for a in arrays]
  return np.maximum(1., np.sqrt(np.prod(squares, axis=0)))


class GeometryProperties(absltest.TestCase, metaclass=abc.ABCMeta):
  """Closed-form geodesic machinery properties for one signature."""

  num_samples = 1000
  seed = 0

  @property
  @abc.abstractmethod
  def signature(self) -> pseudo_geometry.Signature:
    """Signature of the manifold under test."""
    pass

  def setUp(self):
    super().setUp()
    self.rng = np.random.default_rng(self.seed)

  def points(self, size=None, scale=.5):
    return sampling.random_points(self.rng, self.signature,
                                  size or self.num_samples, scale)

  def unit_tangents(self, x):
    xi = sampling.random_tangents(self.rng, x, self.signature)
    return xi / np.linalg.norm(xi, axis=-1, keepdims=True)

  # pylint: disable=missing-docstring
  def test_points_lie_on_the_manifold(self):
    x = self.points()
    residual = np.abs(pseudo_geometry.manifold_residual(x, self.signature))
    self.assertLessEqual(np.max(residual / _scale(x, x)), 1e-12)

  def test_geodesics_stay_on_the_manifold(self):
    sig = self.signature
    x = self.points()
    xi = self.unit_tangents(x)
    for t in _GEODESIC_TIMES:
      gamma = manifold_maps.geodesic(x, xi, t, sig)
      residual = np.abs(pseudo_geometry.manifold_residual(gamma, sig))
      self.assertLessEqual(np.max(residual / _scale(gamma, gamma)), 1e-8,
                           msg=f't={t}')

  def test_geodesic_initial_conditions(self):
    sig = self.signature
    x = self.points()
    xi = self.unit_tangents(x)
    np.testing.assert_array_equal(x, manifold_maps.geodesic(x, xi, 0., sig))
    errors = []
    for h in (1e-3, 1e-4):
      velocity = (manifold_maps.geodesic(x, xi, h, sig) -
                  manifold_maps.geodesic(x, xi, -h, sig)) / (2. * h)
      errors.append(np.max(np.linalg.norm(velocity - xi, axis=-1) /
                           _scale(x)))
    self.assertLessEqual(errors[0], 1e-5)
    self.assertLessEqual(errors[1], errors[0])

  def test_geodesic_equation(self):
    sig = self.signature
    x = self.points()
    xi = self.unit_tangents(x)
    t, h = .5, 1e-3
    gamma = manifold_maps.geodesic(x, xi, t, sig)
    acceleration = (manifold_maps.geodesic(x, xi, t + h, sig) - 2. * gamma +
                    manifold_maps.geodesic(x, xi, t - h, sig)) / h**2
    expected = (pseudo_geometry.quadratic_norm(xi, sig)[:, None] /
                sig.abs_beta * gamma)
    error = np.linalg.norm(acceleration - expected, axis=-1)
    self.assertLessEqual(np.max(error / _scale(gamma)), 1e-4)
    tangential = pseudo_geometry.project_to_tangent(gamma, acceleration, sig)
    self.assertLessEqual(
        np.max(np.linalg.norm(tangential, axis=-1) / _scale(gamma)), 1e-5)

  def test_exp_inverts_log(self):
    sig = self.signature
    x, _, y = sampling.random_normal_neighborhood_pairs(
        self.rng, sig, self.num_samples)
    xi = manifold_maps.log_map(x, y, sig)
    recovered = manifold_maps.exp_map(x, xi, sig)
    error = np.linalg.norm(recovered - y, axis=-1)
    self.assertLessEqual(np.max(error / _scale(x, y)), 1e-8)

  def test_geodesic_distance_is_the_log_norm(self):
    sig = self.signature
    x, _, y = sampling.random_normal_neighborhood_pairs(
        self.rng, sig, self.num_samples)
    xi = manifold_maps.log_map(x, y, sig)
    np.testing.assert_allclose(
        np.sqrt(np.abs(pseudo_geometry.quadratic_norm(xi, sig))),
        manifold_maps.geodesic_distance(x, y, sig), rtol=1e-8, atol=1e-7)

  def test_dissimilarity_is_a_symmetric_premetric(self):
    sig = self.signature
    x = self.points()
    y = self.points()
    forward = manifold_maps.dissimilarity(x, y, sig)
    np.testing.assert_allclose(forward, manifold_maps.dissimilarity(y, x, sig),
                               rtol=1e-12)
    self.assertTrue(np.all(forward >= 0.))
    np.testing.assert_array_less(manifold_maps.dissimilarity(x, x, sig),
                                 1e-12)

  def test_dissimilarity_branches_meet_at_zero(self):
    sig = self.signature
    products = np.array([-1e-6, -1e-7, 0., 1e-7, 1e-6])
    values = manifold_maps.dissimilarity_from_scalar_product(products, sig)
    np.testing.assert_allclose(values, np.sqrt(sig.abs_beta) * np.pi / 2.,
                               atol=1e-5)

  def test_psi_round_trips(self):
    sig = self.signature
    x = self.points(scale=2.)
    z = manifold_maps.psi(x, sig)
    np.testing.assert_allclose(manifold_maps.psi_inverse(z, sig), x,
                               rtol=1e-12, atol=1e-12)
    np.testing.assert_allclose(np.linalg.norm(z.u, axis=-1), 1., rtol=1e-12)

  def test_phi_fixes_manifold_points(self):
    sig = self.signature
    x = self.points()
    np.testing.assert_allclose(manifold_maps.phi(x, sig), x, rtol=1e-12,
                               atol=1e-12)

  def test_anti_isometry_negates_scalar_products(self):
    sig = self.signature
    if sig.p == 0:
      self.skipTest('The anti-isometry requires p >= 1.')
    x = self.points()
    y = self.points()
    sx = manifold_maps.anti_isometry(x, sig)
    sy = manifold_maps.anti_isometry(y, sig)
    total = (pseudo_geometry.scalar_product(x, y, sig) +
             manifold_maps.anti_isometric_scalar_product(sx, sy, sig))
    self.assertLessEqual(np.max(np.abs(total) / _scale(x, y)), 1e-12)
    np.testing.assert_array_equal(x, manifold_maps.anti_isometry(sx, sig))
  # pylint: enable=missing-docstring
