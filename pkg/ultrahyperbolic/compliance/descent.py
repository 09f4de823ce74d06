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
"""A base class for descent direction property tests."""

import abc

from absl.testing import absltest
import numpy as np

from ultrahyperbolic import manifold_maps
from ultrahyperbolic import optimizer
from ultrahyperbolic import pseudo_geometry
from ultrahyperbolic.compliance import sampling

_STEP_SIZES = (1e-2, 1e-4, 1e-6)


class DescentProperties(absltest.TestCase, metaclass=abc.ABCMeta):
  """Properties of the pseudo-Riemannian gradient and descent direction."""

  num_samples = 1000
  seed = 1

  @property
  @abc.abstractmethod
  def signature(self) -> pseudo_geometry.Signature:
    """Signature of the manifold under test."""
    pass

  def setUp(self):
    super().setUp()
    self.rng = np.random.default_rng(self.seed)

  def points(self, size=None):
    return sampling.random_points(self.rng, self.signature,
                                  size or self.num_samples, scale=.5)

  # pylint: disable=missing-docstring
  def test_descent_identity(self):
    sig = self.signature
    x = self.points()
    grad_f = self.rng.normal(size=x.shape)
    gradient = optimizer.pseudo_riemannian_gradient(x, grad_f, sig)
    chi = optimizer.descent_direction(x, grad_f, sig)
    np.testing.assert_allclose(
        pseudo_geometry.scalar_product(gradient, chi, sig),
        np.sum(gradient * gradient, axis=-1), rtol=1e-10)

  def test_directions_are_tangent(self):
    sig = self.signature
    x = self.points()
    grad_f = self.rng.normal(size=x.shape)
    pseudo_geometry.check_tangent_vector(
        x, optimizer.pseudo_riemannian_gradient(x, grad_f, sig), sig)
    pseudo_geometry.check_tangent_vector(
        x, optimizer.descent_direction(x, grad_f, sig), sig)

  def test_chi_vanishes_at_stationary_points(self):
    sig = self.signature
    x = self.points()
    # A gradient along G x has no tangent component.
    grad_f = (self.rng.normal(size=(len(x), 1)) *
              pseudo_geometry.metric_apply(x, sig))
    gradient = optimizer.pseudo_riemannian_gradient(x, grad_f, sig)
    chi = optimizer.descent_direction(x, grad_f, sig)
    scale = np.sum(x * x, axis=-1) * np.linalg.norm(grad_f, axis=-1)
    self.assertLessEqual(
        np.max(np.linalg.norm(gradient, axis=-1) / np.maximum(1., scale)),
        1e-12)
    self.assertLessEqual(
        np.max(np.linalg.norm(chi, axis=-1) / np.maximum(1., scale)), 1e-12)

  def test_chi_is_nonzero_away_from_stationary_points(self):
    sig = self.signature
    x = self.points()
    grad_f = self.rng.normal(size=x.shape)
    gradient = optimizer.pseudo_riemannian_gradient(x, grad_f, sig)
    chi = optimizer.descent_direction(x, grad_f, sig)
    moving = np.linalg.norm(gradient, axis=-1) > 1e-6
    self.assertTrue(np.all(np.linalg.norm(chi[moving], axis=-1) > 0.))

  def test_step_decreases_a_linear_objective(self):
    sig = self.signature
    x = self.points(100)
    coefficients = self.rng.normal(size=x.shape)
    before = np.sum(coefficients * x, axis=-1)
    decreased = np.zeros(len(x), dtype=bool)
    for step_size in _STEP_SIZES:
      after = np.sum(
          coefficients * optimizer.step(x, coefficients, step_size, sig),
          axis=-1)
      decreased |= after < before
    self.assertTrue(np.all(decreased))

  def test_raw_gradient_step_can_ascend(self):
    sig = self.signature
    if sig.q == 0:
      self.skipTest('Every tangent vector is space-like when q = 0.')
    x = self.points(200)
    xi = sampling.random_tangents(self.rng, x, sig)
    time_like = pseudo_geometry.quadratic_norm(xi, sig) < -1e-3
    x, xi = x[time_like], xi[time_like]
    self.assertNotEmpty(x)
    # f(y) = <xi, y>_q has Df(x) = xi, a time-like vector.
    coefficients = pseudo_geometry.metric_apply(xi, sig)
    np.testing.assert_allclose(
        optimizer.pseudo_riemannian_gradient(x, coefficients, sig), xi,
        rtol=1e-9, atol=1e-12)
    before = np.sum(coefficients * x, axis=-1)
    for step_size in _STEP_SIZES:
      raw = manifold_maps.exp_map(x, -step_size * xi, sig)
      self.assertTrue(np.all(np.sum(coefficients * raw, axis=-1) > before),
                      msg=f'step_size={step_size}')
      preconditioned = optimizer.step(x, coefficients, step_size, sig)
      self.assertTrue(
          np.all(np.sum(coefficients * preconditioned, axis=-1) < before),
          msg=f'step_size={step_size}')

  def test_iterates_stay_on_the_manifold(self):
    sig = self.signature
    x = self.points(20)
    target = self.points(20)
    for _ in range(500):
      x = optimizer.step(x, 2. * (x - target), 1e-3, sig)
    residual = np.abs(pseudo_geometry.manifold_residual(x, sig))
    self.assertLessEqual(
        np.max(residual / np.maximum(1., np.sum(x * x, axis=-1))), 1e-9)
  # pylint: enable=missing-docstring
