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
"""Tests for manifold_maps."""

import math

from absl.testing import absltest
from absl.testing import parameterized
from google.rpc import code_pb2
import numpy as np

from ultrahyperbolic import error
from ultrahyperbolic import manifold_maps
from ultrahyperbolic import pseudo_geometry
from ultrahyperbolic.compliance import sampling

_SIG = pseudo_geometry.Signature(p=2, q=1, beta=-1.)
_POLE = np.array([1., 0., 0., 0.])
_COSH1 = math.cosh(1.)
_SINH1 = math.sinh(1.)

# Triplet with zero distance from x to both y and z but not between them.
_X = np.array([1., 0., 0., 0.])
_Y = np.array([1., 1., 1., 0.])
_Z = np.array([1., 1., 0., 1.])


def _integrate_geodesic(x, xi, sig, t_end=1., steps=1000):
  """Integrates gamma'' = -(<gamma', gamma'> / <gamma, gamma>) gamma (RK4)."""

  def acceleration(position, velocity):
    ratio = (pseudo_geometry.quadratic_norm(velocity, sig) /
             pseudo_geometry.quadratic_norm(position, sig))
    return -ratio * position

  position, velocity = np.array(x, float), np.array(xi, float)
  h = t_end / steps
  for _ in range(steps):
    k1x, k1v = velocity, acceleration(position, velocity)
    k2x = velocity + h / 2 * k1v
    k2v = acceleration(position + h / 2 * k1x, k2x)
    k3x = velocity + h / 2 * k2v
    k3v = acceleration(position + h / 2 * k2x, k3x)
    k4x = velocity + h * k3v
    k4v = acceleration(position + h * k3x, k4x)
    position = position + h / 6 * (k1x + 2 * k2x + 2 * k3x + k4x)
    velocity = velocity + h / 6 * (k1v + 2 * k2v + 2 * k3v + k4v)
  return position


class ClassifyTangentTest(parameterized.TestCase):

  @parameterized.named_parameters(
      ('space_like', [0, 0, 1, 0], manifold_maps.GeodesicClass.SPACE_LIKE),
      ('null', [0, 1, 1, 0], manifold_maps.GeodesicClass.NULL),
      ('nearly_null', [0, 1, 1 + 1e-12, 0], manifold_maps.GeodesicClass.NULL),
      ('time_like', [0, 1, 0, 0], manifold_maps.GeodesicClass.TIME_LIKE),
  )
  def test_classify(self, xi, expected):
    self.assertEqual(expected, manifold_maps.classify_tangent(xi, _SIG))

  def test_rejects_batches(self):
    with self.assertRaises(error.UltrahyperbolicError):
      manifold_maps.classify_tangent(np.zeros((2, 4)), _SIG)


class GeodesicTest(parameterized.TestCase):

  @parameterized.named_parameters(
      ('space_like', [0, 0, 1, 0], 1., [_COSH1, 0, _SINH1, 0]),
      ('null', [0, 1, 1, 0], 1., [1, 1, 1, 0]),
      ('time_like_antipode', [0, 1, 0, 0], math.pi, [-1, 0, 0, 0]),
  )
  def test_geodesic(self, xi, t, expected):
    result = manifold_maps.geodesic(_POLE, xi, t, _SIG)
    np.testing.assert_allclose(expected, result, atol=1e-15)
    self.assertAlmostEqual(
        -1., pseudo_geometry.quadratic_norm(result, _SIG), places=12)

  def test_space_like_matches_ode_integration(self):
    integrated = _integrate_geodesic(_POLE, [0., 0., 1., 0.], _SIG)
    np.testing.assert_allclose(
        manifold_maps.geodesic(_POLE, [0., 0., 1., 0.], 1., _SIG),
        integrated, atol=1e-9)

  def test_time_like_matches_ode_integration(self):
    x = np.array([_COSH1, 0., _SINH1, 0.])
    xi = pseudo_geometry.project_to_tangent(x, [0.3, 1., -0.2, 0.5], _SIG)
    self.assertEqual(manifold_maps.GeodesicClass.TIME_LIKE,
                     manifold_maps.classify_tangent(xi, _SIG))
    np.testing.assert_allclose(
        manifold_maps.geodesic(x, xi, 1.5, _SIG),
        _integrate_geodesic(x, xi, _SIG, t_end=1.5), atol=1e-8)

  def test_starts_at_base_point(self):
    rng = np.random.default_rng(0)
    x = sampling.random_points(rng, _SIG, 20)
    xi = sampling.random_tangents(rng, x, _SIG)
    np.testing.assert_array_equal(x, manifold_maps.geodesic(x, xi, 0., _SIG))

  def test_rejects_non_tangent_velocity(self):
    with self.assertRaises(error.UltrahyperbolicError):
      manifold_maps.geodesic(_POLE, [1., 0., 0., 0.], 1., _SIG)

  def test_rejects_off_manifold_point(self):
    with self.assertRaises(error.UltrahyperbolicError):
      manifold_maps.geodesic([2., 0., 0., 0.], [0., 0., 1., 0.], 1., _SIG)


class ExpLogTest(parameterized.TestCase):

  def test_exp_of_zero(self):
    np.testing.assert_array_equal(
        _Y, manifold_maps.exp_map(_Y, np.zeros(4), _SIG))

  def test_exp_space_like(self):
    np.testing.assert_allclose(
        [_COSH1, 0, _SINH1, 0],
        manifold_maps.exp_map(_POLE, [0., 0., 1., 0.], _SIG))

  def test_exp_of_scaled_vector_is_geodesic(self):
    rng = np.random.default_rng(1)
    x = sampling.random_points(rng, _SIG, 50)
    xi = sampling.random_tangents(rng, x, _SIG)
    t = rng.uniform(-2., 2., size=50)
    np.testing.assert_allclose(
        manifold_maps.geodesic(x, xi, t, _SIG),
        manifold_maps.exp_map(x, t[:, None] * xi, _SIG),
        rtol=1e-10, atol=1e-10)

  @parameterized.named_parameters(
      ('same_point', _Y, _Y, [0, 0, 0, 0]),
      ('hyperbolic_branch', _POLE, [_COSH1, 0, _SINH1, 0], [0, 0, 1, 0]),
      ('middle_branch', _POLE, _Y, [0, 1, 1, 0]),
      ('spherical_branch', _POLE, [math.cos(1.), math.sin(1.), 0, 0],
       [0, 1, 0, 0]),
  )
  def test_log(self, x, y, expected):
    np.testing.assert_allclose(
        expected, manifold_maps.log_map(x, y, _SIG), atol=1e-12)

  def test_log_outside_normal_neighborhood(self):
    with self.assertRaises(error.UltrahyperbolicError) as context:
      manifold_maps.log_map(_POLE, -_POLE, _SIG)
    self.assertEqual(code_pb2.OUT_OF_RANGE, context.exception.code)
    self.assertEqual(1., context.exception.context['scalar_product'])

  @parameterized.parameters((2, 1), (3, 1), (2, 2), (4, 2))
  def test_exp_inverts_log(self, p, q):
    sig = pseudo_geometry.Signature(p, q, -1.)
    rng = np.random.default_rng(p * 10 + q)
    x, _, y = sampling.random_normal_neighborhood_pairs(rng, sig, 200)
    result = manifold_maps.exp_map(x, manifold_maps.log_map(x, y, sig), sig,
                                   validate=False)
    scale = np.maximum(1., np.linalg.norm(y, axis=-1, keepdims=True))
    np.testing.assert_array_less(np.abs(result - y), 1e-8 * scale)


class DistanceTest(parameterized.TestCase):

  @parameterized.named_parameters(
      ('identical', _Y, _Y, 0.),
      ('triplet', _Y, _Z, math.sqrt(2.)),
      ('antipodes', _POLE, -_POLE, 2.),
  )
  def test_extrinsic_distance(self, a, b, expected):
    self.assertAlmostEqual(
        expected, manifold_maps.extrinsic_distance(a, b, _SIG), places=14)

  @parameterized.named_parameters(
      ('null_separated', _X, _Y, 0.),
      ('hyperbolic', _Y, _Z, math.acosh(2.)),
      ('spherical', _POLE, [math.cos(1.), math.sin(1.), 0., 0.], 1.),
  )
  def test_geodesic_distance(self, x, y, expected):
    self.assertAlmostEqual(
        expected, manifold_maps.geodesic_distance(x, y, _SIG), delta=1e-12)

  def test_zero_distance_is_not_transitive(self):
    self.assertEqual(0., manifold_maps.geodesic_distance(_X, _Y, _SIG))
    self.assertEqual(0., manifold_maps.geodesic_distance(_X, _Z, _SIG))
    self.assertGreater(manifold_maps.geodesic_distance(_Y, _Z, _SIG), 0.)

  def test_geodesic_distance_outside_normal_neighborhood(self):
    with self.assertRaises(error.UltrahyperbolicError) as context:
      manifold_maps.geodesic_distance(_POLE, -_POLE, _SIG)
    self.assertEqual(code_pb2.OUT_OF_RANGE, context.exception.code)

  def test_geodesic_distance_is_norm_of_log(self):
    rng = np.random.default_rng(2)
    x, _, y = sampling.random_normal_neighborhood_pairs(rng, _SIG, 200)
    log = manifold_maps.log_map(x, y, _SIG)
    np.testing.assert_allclose(
        np.sqrt(np.abs(pseudo_geometry.quadratic_norm(log, _SIG))),
        manifold_maps.geodesic_distance(x, y, _SIG), rtol=1e-8, atol=1e-10)

  def test_distance_relations_are_not_preserved(self):
    # Frozen witness: the geodesic order of the two pairs is the opposite of
    # their extrinsic order.
    a, b = _POLE, np.array([3., 0., math.sqrt(8.), 0.])
    c, d = _POLE, np.array([-0.9, math.sqrt(0.19), 0., 0.])
    self.assertLess(manifold_maps.geodesic_distance(a, b, _SIG),
                    manifold_maps.geodesic_distance(c, d, _SIG))
    self.assertGreater(manifold_maps.extrinsic_distance(a, b, _SIG),
                       manifold_maps.extrinsic_distance(c, d, _SIG))

  def test_randomized_search_finds_order_violation(self):
    rng = np.random.default_rng(3)
    x, _, y = sampling.random_normal_neighborhood_pairs(rng, _SIG, 100)
    geodesic = manifold_maps.geodesic_distance(x, y, _SIG)
    extrinsic = manifold_maps.extrinsic_distance(x, y, _SIG)
    violations = ((geodesic[:, None] < geodesic[None, :]) &
                  (extrinsic[:, None] > extrinsic[None, :]))
    self.assertTrue(np.any(violations))

  def test_hyperbolic_special_case(self):
    sig = pseudo_geometry.Signature(p=3, q=0, beta=-1.)
    rng = np.random.default_rng(4)
    a = sampling.random_points(rng, sig, 100)
    b = sampling.random_points(rng, sig, 100)
    # Upper sheet only.
    a[:, 0] = np.abs(a[:, 0])
    b[:, 0] = np.abs(b[:, 0])
    np.testing.assert_allclose(
        np.arccosh(-pseudo_geometry.scalar_product(a, b, sig)),
        manifold_maps.geodesic_distance(a, b, sig), rtol=1e-10, atol=1e-6)

  def test_spherical_special_case(self):
    sig = pseudo_geometry.Signature(p=0, q=2, beta=-1.)
    rng = np.random.default_rng(5)
    a = sampling.random_points(rng, sig, 100)
    b = sampling.random_points(rng, sig, 100)
    np.testing.assert_allclose(
        np.arccos(np.clip(np.sum(a * b, axis=-1), -1., 1.)),
        manifold_maps.geodesic_distance(a, b, sig), atol=1e-10)


class DissimilarityTest(parameterized.TestCase):

  @parameterized.named_parameters(
      ('identical', _Y, _Y, 0.),
      ('linear_branch', _POLE, [-_COSH1, 0., _SINH1, 0.],
       math.pi / 2 + _COSH1),
      ('branch_boundary', _POLE, [0., 1., 0., 0.], math.pi / 2),
      ('antipodes', _POLE, -_POLE, math.pi / 2 + 1.),
      ('hyperbolic', _Y, _Z, math.acosh(2.)),
  )
  def test_dissimilarity(self, x, y, expected):
    self.assertAlmostEqual(
        expected, manifold_maps.dissimilarity(x, y, _SIG), delta=1e-12)

  def test_scales_with_beta(self):
    sig = pseudo_geometry.Signature(2, 1, -4.)
    self.assertAlmostEqual(
        2. * (math.pi / 2 + 1.),
        manifold_maps.dissimilarity([2., 0, 0, 0], [-2., 0, 0, 0], sig))

  def test_continuous_at_branch_boundary(self):
    products = np.array([-1e-6, -1e-9, 0., 1e-9, 1e-6])
    values = manifold_maps.dissimilarity_from_scalar_product(products, _SIG)
    np.testing.assert_allclose(math.pi / 2, values, atol=1e-5)

  @parameterized.parameters(-5., -1.5, -0.5, -0.1, 0.3, 2.)
  def test_derivative_matches_finite_differences(self, product):
    h = 1e-6
    numeric = (
        manifold_maps.dissimilarity_from_scalar_product(product + h, _SIG) -
        manifold_maps.dissimilarity_from_scalar_product(product - h, _SIG))
    numeric /= 2 * h
    self.assertAlmostEqual(
        numeric, manifold_maps.dissimilarity_derivative(product, _SIG),
        delta=1e-6 * max(1., abs(numeric)))

  def test_derivative_guard_at_zero_distance(self):
    self.assertEqual(0., manifold_maps.dissimilarity_derivative(-1., _SIG))
    self.assertEqual(
        0., manifold_maps.dissimilarity_derivative(-1. - 1e-10, _SIG))

  def test_symmetric_premetric(self):
    rng = np.random.default_rng(6)
    sig = pseudo_geometry.Signature(2, 2, -1.)
    x = sampling.random_points(rng, sig, 200, scale=2.)
    y = sampling.random_points(rng, sig, 200, scale=2.)
    forward = manifold_maps.dissimilarity(x, y, sig)
    np.testing.assert_allclose(
        forward, manifold_maps.dissimilarity(y, x, sig), atol=1e-12)
    self.assertTrue(np.all(forward >= 0.))
    np.testing.assert_allclose(
        0., manifold_maps.dissimilarity(x, x, sig), atol=1e-6)


class PsiTest(parameterized.TestCase):

  def test_pole(self):
    u, v = manifold_maps.psi(_POLE, _SIG)
    np.testing.assert_array_equal([1, 0], u)
    np.testing.assert_array_equal([0, 0], v)

  def test_psi(self):
    u, v = manifold_maps.psi([_COSH1, 0., _SINH1, 0.], _SIG)
    np.testing.assert_allclose([1, 0], u)
    np.testing.assert_allclose([_SINH1, 0], v)

  @parameterized.named_parameters(
      ('pole', [1., 0.], [0., 0.], [1, 0, 0, 0]),
      ('off_pole', [1., 0.], [_SINH1, 0.], [_COSH1, 0, _SINH1, 0]),
  )
  def test_psi_inverse(self, u, v, expected):
    result = manifold_maps.psi_inverse(
        manifold_maps.SphereCrossEuclidean(np.array(u), np.array(v)), _SIG)
    np.testing.assert_allclose(expected, result)

  def test_psi_inverse_rejects_non_unit(self):
    with self.assertRaises(error.UltrahyperbolicError) as context:
      manifold_maps.psi_inverse(
          manifold_maps.SphereCrossEuclidean(np.array([2., 0.]),
                                             np.zeros(2)), _SIG)
    self.assertEqual(code_pb2.INVALID_ARGUMENT, context.exception.code)

  def test_round_trips(self):
    rng = np.random.default_rng(7)
    sig = pseudo_geometry.Signature(3, 1, -2.)
    x = sampling.random_points(rng, sig, 1000, scale=3.)
    np.testing.assert_allclose(
        x, manifold_maps.psi_inverse(manifold_maps.psi(x, sig), sig),
        rtol=1e-12, atol=1e-12)
    u = rng.normal(size=(1000, sig.time_dims))
    u /= np.linalg.norm(u, axis=-1, keepdims=True)
    z = manifold_maps.SphereCrossEuclidean(u, rng.normal(size=(1000, sig.p)))
    u_out, v_out = manifold_maps.psi(manifold_maps.psi_inverse(z, sig), sig)
    np.testing.assert_allclose(z.u, u_out, atol=1e-12)
    np.testing.assert_allclose(z.v, v_out, atol=1e-12)


class PhiTest(parameterized.TestCase):

  def test_fixes_manifold_points(self):
    np.testing.assert_allclose(_Y, manifold_maps.phi(_Y, _SIG))

  def test_maps_to_pole(self):
    np.testing.assert_allclose(
        [1, 0, 0, 0], manifold_maps.phi([2., 0., 0., 0.], _SIG))

  def test_lands_on_manifold(self):
    z = np.random.default_rng(8).normal(size=(100, 4))
    pseudo_geometry.check_manifold_point(manifold_maps.phi(z, _SIG), _SIG)

  def test_singular_input(self):
    with self.assertRaises(error.UltrahyperbolicError) as context:
      manifold_maps.phi([0., 0., 1., 0.], _SIG)
    self.assertEqual(code_pb2.FAILED_PRECONDITION, context.exception.code)

  def test_jvp_of_zero(self):
    np.testing.assert_array_equal(
        np.zeros(4), manifold_maps.phi_jvp(_Y, np.zeros(4), _SIG))

  def test_jvp_is_identity_on_tangent_vectors(self):
    rng = np.random.default_rng(9)
    x = sampling.random_points(rng, _SIG, 50)
    xi = sampling.random_tangents(rng, x, _SIG)
    np.testing.assert_allclose(
        xi, manifold_maps.phi_jvp(x, xi, _SIG), rtol=1e-10, atol=1e-10)

  @parameterized.parameters((2, 1), (3, 1), (2, 2), (4, 2), (0, 2), (3, 0))
  def test_jvp_matches_finite_differences(self, p, q):
    sig = pseudo_geometry.Signature(p, q, -1.5)
    rng = np.random.default_rng(p * 10 + q)
    z = rng.normal(size=(50, sig.d))
    dz = rng.normal(size=(50, sig.d))
    h = 1e-6 * np.maximum(1., np.linalg.norm(z, axis=-1, keepdims=True))
    numeric = (manifold_maps.phi(z + h * dz, sig) -
               manifold_maps.phi(z - h * dz, sig)) / (2 * h)
    analytic = manifold_maps.phi_jvp(z, dz, sig)
    relative = (np.linalg.norm(numeric - analytic, axis=-1) /
                np.maximum(1., np.linalg.norm(analytic, axis=-1)))
    np.testing.assert_array_less(relative, 1e-5)

  def test_pullback_matches_finite_differences(self):
    rng = np.random.default_rng(10)
    sig = pseudo_geometry.Signature(3, 1, -1.)
    c = rng.normal(size=sig.d)

    def objective(z):
      x = manifold_maps.phi(z, sig)
      return np.sum(c * x, axis=-1) + 0.5 * np.sum(x * x, axis=-1)

    z = rng.normal(size=(20, sig.d))
    analytic = manifold_maps.phi_pullback(
        z, c + manifold_maps.phi(z, sig), sig)
    h = 1e-6
    numeric = np.stack([
        (objective(z + h * e) - objective(z - h * e)) / (2 * h)
        for e in np.eye(sig.d)
    ], axis=-1)
    np.testing.assert_allclose(numeric, analytic, rtol=1e-5, atol=1e-6)

  def test_jacobian_columns_are_jvps(self):
    z = np.array([0.5, -1., 2., 0.3])
    jacobian = manifold_maps.phi_jacobian(z, _SIG)
    for j, basis in enumerate(np.eye(4)):
      np.testing.assert_allclose(
          manifold_maps.phi_jvp(z, basis, _SIG), jacobian[:, j])


class AntiIsometryTest(absltest.TestCase):

  def test_reverses_coordinates(self):
    np.testing.assert_array_equal(
        [4, 3, 2, 1], manifold_maps.anti_isometry([1., 2., 3., 4.], _SIG))

  def test_involution(self):
    x = np.random.default_rng(11).normal(size=(10, 4))
    np.testing.assert_array_equal(
        x,
        manifold_maps.anti_isometry(
            manifold_maps.anti_isometry(x, _SIG), _SIG))

  def test_negates_scalar_products(self):
    rng = np.random.default_rng(12)
    x = sampling.random_points(rng, _SIG, 100)
    y = sampling.random_points(rng, _SIG, 100)
    source = pseudo_geometry.scalar_product(x, y, _SIG)
    target = manifold_maps.anti_isometric_scalar_product(
        manifold_maps.anti_isometry(x, _SIG),
        manifold_maps.anti_isometry(y, _SIG), _SIG)
    np.testing.assert_allclose(0., source + target, atol=1e-12)
    target_norm = manifold_maps.anti_isometric_scalar_product(
        manifold_maps.anti_isometry(x, _SIG),
        manifold_maps.anti_isometry(x, _SIG), _SIG)
    np.testing.assert_allclose(1., target_norm, atol=1e-12)

  def test_requires_space_dimension(self):
    sig = pseudo_geometry.Signature(p=0, q=2, beta=-1.)
    with self.assertRaises(error.UltrahyperbolicError) as context:
      manifold_maps.anti_isometry([1., 0., 0.], sig)
    self.assertEqual(code_pb2.UNIMPLEMENTED, context.exception.code)


if __name__ == '__main__':
  absltest.main()
