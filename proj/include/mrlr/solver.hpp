// Copyright 2026 The MRLR Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Step solvers for the linearized locality-constrained problem
//
//   min_{x, dtau} |C x|^2 + |e|^2   s.t.  y + J dtau = D x + e,
//
// i.e. least squares on z = [x; dtau] with R = [[D, -J], [C, 0]] and
// u = [y; 0]. `solve_naive` attacks R directly and serves as the oracle;
// `solve_block` eliminates x through the Schur complement of
// T1 = D^T D + C^T C, which is constant while the LCD is fixed.

#pragma once

#include <optional>

#include <Eigen/Core>

#include "mrlr/image.hpp"
#include "mrlr/transform.hpp"

namespace mrlr {

using MatrixRef = Eigen::Ref<const Eigen::MatrixXd>;
using VectorRef = Eigen::Ref<const Eigen::VectorXd>;

/// T1 = D^T D + C^T C and its inverse, built once per LCD.
struct GramCache {
    Eigen::MatrixXd t1;
    Eigen::MatrixXd t1_inv;
    double damping = 0.0;  // lambda added to the diagonal, 0 when undamped

    Eigen::Index size() const { return t1.rows(); }
};

struct StepSolution {
    StepVector delta_tau = StepVector::Zero();
    double objective = 0.0;      // |C x|^2 + |e|^2 at the solution
    double residual_norm = 0.0;  // |u - R z|
    std::optional<Eigen::VectorXd> x;  // only produced by the naive path
};

/// D^T D (symmetric, computed as a rank update).
Eigen::MatrixXd gram_matrix(const MatrixRef& atoms);

GramCache build_gram_cache(const MatrixRef& atoms, const VectorRef& penalties);

/// Same as build_gram_cache but reuses a precomputed D^T D.
GramCache build_gram_cache_from_gram(const MatrixRef& gram, const VectorRef& penalties);

/// Dense least squares through a column-equilibrated SVD of R; returns the
/// minimum-norm solution when R is rank deficient (e.g. J = 0).
StepSolution solve_naive(const MatrixRef& atoms, const VectorRef& penalties,
                         const JacobianMatrix& jac, const VectorRef& y_hat);

/// Block elimination: dtau = Z2^-1 (T2^T T1^-1 D^T y - J^T y) with
/// Z2 = T3 - T2^T T1^-1 T2, T2 = D^T J, T3 = J^T J. x is never formed.
StepSolution solve_block(const MatrixRef& atoms, const VectorRef& penalties,
                         const JacobianMatrix& jac, const VectorRef& y_hat,
                         const GramCache& cache);

/// |C x|^2 + |y - D x + J dtau|^2.
double objective(const MatrixRef& atoms, const VectorRef& penalties, const VectorRef& x,
                 const StepVector& delta_tau, const JacobianMatrix& jac, const VectorRef& y_hat);

}  // namespace mrlr
