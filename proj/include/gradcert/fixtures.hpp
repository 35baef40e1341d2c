#pragma once

// Named example pairs and Weinstein structures used by the CLI and tests.

#include <optional>
#include <string>
#include <vector>

#include "gradcert/gradlike.hpp"
#include "gradcert/weinstein.hpp"

namespace gradcert::fixtures {

struct Pair {
  std::string name;
  std::vector<std::string> vars;
  Chart chart;
  ScalarField phi;
  VectorField x;
  std::optional<TensorField> g;
};

/// phi = x^3, X = x^4 on [-1, 1]: condition (1) without (2).
Pair cubic_quartic();
/// phi = exp(-1/x^2), X = 2 x^-3 exp(-1/x^2) (x < 0), x^-3 exp(-1/x^2)
/// (x > 0) on [-1, 1]: condition (2) without (3).
Pair bump();
/// phi = (x^4 + y^4)/4, X = (x^3 + x^2 y^2, y^3) on [-1, 1]^2.
Pair eliashberg();
/// phi = (x^2 + y^2)/2, X = (x - y/2, y + x/2) on [-1, 1]^2.
Pair rotated_gradient();

struct Weinstein {
  std::string name;
  std::vector<std::string> vars;
  Chart chart;
  WeinsteinStructure structure;
};

/// omega = dx^dy, X = (x/2, y/2), phi = (x^2 + y^2)/4, g = Id on [-1, 1]^2.
Weinstein radial_plane();
/// T*R^n with coordinates (q_1..q_n, p_1..p_n): lambda = sum p_i dq_i,
/// X = sum p_i d/dp_i, phi = |p|^2/2, g = Id on [-1, 1]^{2n}.
Weinstein cotangent(std::size_t n);

/// B = (1), c = 1, A = (1), a1 = 1, a2 = (z): the tensor [[1, 0], [-z, 1]].
EmbryonicNormalForm embryonic_shear();

/// Names accepted by the CLI `fixture` command.
std::vector<std::string> names();

}  // namespace gradcert::fixtures

namespace gradcert {

/// Same as fixtures::cotangent(n).structure. Throws InvalidArgument for n = 0.
WeinsteinStructure cotangent_fixture(std::size_t n);

}  // namespace gradcert
