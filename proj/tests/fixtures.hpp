#pragma once

#include <random>

#include "nilhodge/model.hpp"

namespace fx {

using nh::cd;

// torus of complex dimension n with the standard J
inline nh::LieAlgebraPresentation torus(int n) {
  nh::LieAlgebraPresentation p;
  p.name = "torus";
  p.dim_real = 2 * n;
  nh::MatR J = nh::MatR::Zero(2 * n, 2 * n);
  for (int j = 0; j < n; ++j) {
    J(2 * j + 1, 2 * j) = 1;
    J(2 * j, 2 * j + 1) = -1;
  }
  p.J = J;
  return p;
}

// de5 = -e13 + e24, de6 = -e14 - e23 (0-based below)
inline nh::LieAlgebraPresentation iwasawa() {
  nh::LieAlgebraPresentation p = torus(3);
  p.name = "iwasawa";
  p.constants = {{4, 0, 2, -1}, {4, 1, 3, 1}, {5, 0, 3, -1}, {5, 1, 2, -1}};
  return p;
}

inline nh::VecC random_vec(std::mt19937_64& rng, int n) {
  std::normal_distribution<double> g;
  nh::VecC v(n);
  for (int i = 0; i < n; ++i) v(i) = cd(g(rng), g(rng));
  return v;
}

inline nh::Form random_form(std::mt19937_64& rng, int n, nh::Bideg b) {
  return nh::Form::block(n, b, random_vec(rng, nh::basis(n).dim(b)));
}

}  // namespace fx

namespace fx {

inline nh::MatC random_metric(std::mt19937_64& rng, int n) {
  nh::MatC m(n, n);
  for (int i = 0; i < n; ++i) m.col(i) = random_vec(rng, n);
  return 0.3 * m * m.adjoint() + nh::MatC::Identity(n, n);
}

}  // namespace fx
