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
"""Tests for pseudo_geometry."""

from absl.testing import absltest
from absl.testing import parameterized
from google.rpc import code_pb2
import numpy as np

from ultrahyperbolic import error
from ultrahyperbolic import pseudo_geometry

_SIG = pseudo_geometry.Signature(p=2, q=1, beta=-1.)


class SignatureTest(parameterized.TestCase):

  def test_properties(self):
    sig = pseudo_geometry.Signature(p=3, q=1, beta=-2.)
    self.assertEqual(5, sig.d)
    self.assertEqual(2, sig.time_dims)
    self.assertEqual(4, sig.manifold_dim)
    self.assertEqual(2., sig.abs_beta)
    np.testing.assert_array_equal([-1, -1, 1, 1, 1], sig.metric_diagonal)

  @parameterized.named_parameters(
      ('zero_dimensional', 0, 0, -1.),
      ('negative_p', -1, 2, -1.),
      ('positive_beta', 2, 1, 1.),
      ('zero_beta', 2, 1, 0.),
      ('infinite_beta', 2, 1, -np.inf),
      ('float_p', 2.5, 1, -1.),
  )
  def test_invalid_signature(self, p, q, beta):
    with self.assertRaises(error.UltrahyperbolicError) as context:
      pseudo_geometry.Signature(p=p, q=q, beta=beta)
    self.assertEqual(code_pb2.INVALID_ARGUMENT, context.exception.code)

  def test_is_hashable_and_frozen(self):
    self.assertEqual(hash(_SIG), hash(pseudo_geometry.Signature(2, 1, -1.)))
    with self.assertRaises(AttributeError):
      _SIG.p = 3  # pytype: disable=not-writable


class ScalarProductTest(parameterized.TestCase):

  @parameterized.named_parameters(
      ('single_time_coordinate', [1, 0, 0, 0], [1, 0, 0, 0], -1.),
      ('triplet_pair', [1, 1, 1, 0], [1, 1, 0, 1], -2.),
      ('zero_vector', [3, -1, 2, 5], [0, 0, 0, 0], 0.),
  )
  def test_scalar_product(self, a, b, expected):
    self.assertEqual(expected, pseudo_geometry.scalar_product(a, b, _SIG))

  @parameterized.named_parameters(
      ('on_manifold', [1, 1, 1, 0], -1.),
      ('null', [0, 1, 1, 0], 0.),
      ('space', [0, 0, 1, 0], 1.),
  )
  def test_quadratic_norm(self, a, expected):
    self.assertEqual(expected, pseudo_geometry.quadratic_norm(a, _SIG))

  def test_dimension_mismatch(self):
    with self.assertRaises(error.UltrahyperbolicError) as context:
      pseudo_geometry.scalar_product([1, 0, 0], [1, 0, 0, 0], _SIG)
    self.assertEqual(code_pb2.INVALID_ARGUMENT, context.exception.code)

  def test_non_finite_input(self):
    with self.assertRaises(error.UltrahyperbolicError):
      pseudo_geometry.quadratic_norm([np.nan, 0, 0, 0], _SIG)

  def test_batched(self):
    a = np.array([[1, 0, 0, 0], [1, 1, 1, 0]])
    b = np.array([[1, 0, 0, 0], [1, 1, 0, 1]])
    np.testing.assert_array_equal(
        [-1., -2.], pseudo_geometry.scalar_product(a, b, _SIG))

  def test_bilinear_and_symmetric(self):
    rng = np.random.default_rng(0)
    sig = pseudo_geometry.Signature(3, 2, -1.)
    a, b, c = rng.normal(size=(3, 100, sig.d))
    s, t = rng.normal(size=(2, 100, 1))
    lhs = pseudo_geometry.scalar_product(s * a + t * b, c, sig)
    rhs = (s[:, 0] * pseudo_geometry.scalar_product(a, c, sig) +
           t[:, 0] * pseudo_geometry.scalar_product(b, c, sig))
    scale = np.linalg.norm(a, axis=-1) + np.linalg.norm(b, axis=-1)
    scale *= np.linalg.norm(c, axis=-1) * (np.abs(s[:, 0]) + np.abs(t[:, 0]))
    np.testing.assert_array_less(np.abs(lhs - rhs), 1e-12 * scale)
    np.testing.assert_array_equal(
        pseudo_geometry.scalar_product(a, b, sig),
        pseudo_geometry.scalar_product(b, a, sig))

  def test_matches_euclidean_dot_with_metric(self):
    rng = np.random.default_rng(1)
    a, b = rng.normal(size=(2, 50, _SIG.d))
    expected = np.sum(a * pseudo_geometry.metric_apply(b, _SIG), axis=-1)
    np.testing.assert_allclose(
        expected, pseudo_geometry.scalar_product(a, b, _SIG), atol=1e-14)


class MetricApplyTest(parameterized.TestCase):

  def test_negates_time(self):
    np.testing.assert_array_equal(
        [-1, -2, 3, 4], pseudo_geometry.metric_apply([1, 2, 3, 4], _SIG))

  def test_all_time_signature(self):
    sig = pseudo_geometry.Signature(p=0, q=2, beta=-1.)
    np.testing.assert_array_equal(
        [-1, -2, -3], pseudo_geometry.metric_apply([1, 2, 3], sig))

  def test_involution(self):
    a = np.random.default_rng(2).normal(size=(5, _SIG.d))
    np.testing.assert_array_equal(
        a,
        pseudo_geometry.metric_apply(
            pseudo_geometry.metric_apply(a, _SIG), _SIG))


class ProjectToTangentTest(parameterized.TestCase):

  @parameterized.named_parameters(
      ('already_tangent', [0, 0, 1, 0], [0, 0, 1, 0]),
      ('along_base_point', [1, 0, 0, 0], [0, 0, 0, 0]),
      ('mixed', [1, 0, 1, 0], [0, 0, 1, 0]),
  )
  def test_projection(self, z, expected):
    x = [1., 0., 0., 0.]
    result = pseudo_geometry.project_to_tangent(x, z, _SIG)
    np.testing.assert_allclose(expected, result, atol=1e-15)
    self.assertEqual(0., pseudo_geometry.scalar_product(result, x, _SIG))

  def test_idempotent(self):
    rng = np.random.default_rng(3)
    sig = pseudo_geometry.Signature(2, 2, -1.)
    x = pseudo_geometry.normalize_to_manifold(
        pseudo_geometry.pole(sig) + 0.3 * rng.normal(size=(100, sig.d)), sig)
    z = rng.normal(size=(100, sig.d))
    once = pseudo_geometry.project_to_tangent(x, z, sig)
    twice = pseudo_geometry.project_to_tangent(x, once, sig)
    scale = np.linalg.norm(z, axis=-1, keepdims=True) * np.linalg.norm(
        x, axis=-1, keepdims=True)**2
    np.testing.assert_array_less(np.abs(twice - once), 1e-12 * scale)
    pseudo_geometry.check_tangent_vector(x, once, sig)


class NormalizeToManifoldTest(parameterized.TestCase):

  @parameterized.named_parameters(
      ('pure_scaling', [2, 0, 0, 0], [1, 0, 0, 0]),
      ('fixed_point', [1, 1, 1, 0], [1, 1, 1, 0]),
  )
  def test_normalize(self, z, expected):
    result = pseudo_geometry.normalize_to_manifold(z, _SIG)
    np.testing.assert_allclose(expected, result)
    self.assertFalse(result.flags.writeable)

  @parameterized.named_parameters(
      ('null', [0, 1, 1, 0]),
      ('space_like', [0, 0, 1, 0]),
  )
  def test_non_time_like(self, z):
    with self.assertRaises(error.UltrahyperbolicError) as context:
      pseudo_geometry.normalize_to_manifold(z, _SIG)
    self.assertEqual(code_pb2.FAILED_PRECONDITION, context.exception.code)

  def test_respects_beta(self):
    sig = pseudo_geometry.Signature(2, 1, -4.)
    result = pseudo_geometry.normalize_to_manifold([3, 0, 1, 0], sig)
    self.assertAlmostEqual(-4., pseudo_geometry.quadratic_norm(result, sig))


class ValidationTest(absltest.TestCase):

  def test_pole(self):
    sig = pseudo_geometry.Signature(1, 1, -9.)
    np.testing.assert_array_equal([3, 0, 0], pseudo_geometry.pole(sig))
    self.assertEqual(0., pseudo_geometry.manifold_residual(
        pseudo_geometry.pole(sig), sig))

  def test_check_manifold_point(self):
    point = pseudo_geometry.check_manifold_point([1, 1, 1, 0], _SIG)
    self.assertFalse(point.flags.writeable)
    with self.assertRaises(error.UltrahyperbolicError) as context:
      pseudo_geometry.check_manifold_point([1, 1, 1, 1e-3], _SIG)
    self.assertIn('residual', context.exception.context)

  def test_check_manifold_point_tolerance(self):
    pseudo_geometry.check_manifold_point(
        [1, 1, 1, 1e-3], _SIG, tolerance=1e-5)

  def test_check_tangent_vector(self):
    pseudo_geometry.check_tangent_vector([1, 0, 0, 0], [0, 1, 1, 0], _SIG)
    with self.assertRaises(error.UltrahyperbolicError):
      pseudo_geometry.check_tangent_vector([1, 0, 0, 0], [1, 0, 0, 0], _SIG)


class DefinitenessTest(absltest.TestCase):

  def test_hyperbolic_tangent_spaces_are_positive_definite(self):
    rng = np.random.default_rng(4)
    sig = pseudo_geometry.Signature(p=3, q=0, beta=-1.)
    space = rng.normal(size=(1000, sig.p))
    time = np.sqrt(1. + np.sum(space**2, axis=-1, keepdims=True))
    x = np.concatenate([time, space], axis=-1)
    xi = pseudo_geometry.project_to_tangent(
        x, rng.normal(size=(1000, sig.d)), sig)
    self.assertTrue(np.all(pseudo_geometry.quadratic_norm(xi, sig) > 0))

  def test_indefinite_when_time_and_space_dims_exist(self):
    sig = pseudo_geometry.Signature(p=2, q=1, beta=-1.)
    x = np.array([0., 1., 0., 0.])
    pseudo_geometry.check_manifold_point(x, sig)
    time_like = np.eye(sig.d)[0]
    space_like = np.eye(sig.d)[sig.d - 1]
    pseudo_geometry.check_tangent_vector(x, time_like, sig)
    pseudo_geometry.check_tangent_vector(x, space_like, sig)
    self.assertLess(pseudo_geometry.quadratic_norm(time_like, sig), 0)
    self.assertGreater(pseudo_geometry.quadratic_norm(space_like, sig), 0)


if __name__ == '__main__':
  absltest.main()
