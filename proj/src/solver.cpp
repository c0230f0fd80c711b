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

#include "mrlr/solver.hpp"

#include <cmath>
#include <sstream>

#include <Eigen/Cholesky>
#include <Eigen/SVD>

#include "mrlr/error.hpp"

namespace mrlr {

namespace {

constexpr double kMaxCondition = 1e12;
constexpr double kDampingScale = 1e-8;

// Cholesky of a symmetric matrix with diagonal (Jacobi) equilibration, so
// that the condition test is insensitive to per-atom scaling such as very
// large penalties. One damped retry with lambda = 1e-8 * trace / dim.
struct SpdFactor {
    Eigen::LLT<Eigen::MatrixXd> llt;
    Eigen::VectorXd scale;  // A = S^-1 B S^-1 with B = S A S
    double damping = 0.0;

    Eigen::MatrixXd inverse() const {
        const Eigen::Index n = scale.size();
        Eigen::MatrixXd inv = llt.solve(Eigen::MatrixXd::Identity(n, n));
        inv = scale.asDiagonal() * inv * scale.asDiagonal();
        return 0.5 * (inv + inv.transpose());
    }

    template <typename Rhs>
    Eigen::MatrixXd solve(const Rhs& rhs) const {
        return scale.asDiagonal() * llt.solve(scale.asDiagonal() * rhs);
    }
};

enum class FactorStatus { Ok, IllConditioned, Failed };

FactorStatus try_factor(const Eigen::MatrixXd& a, SpdFactor& f) {
    const Eigen::Index n = a.rows();
    f.scale.resize(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        const double d = a(i, i);
        if (!(d > 0.0) || !std::isfinite(d)) return FactorStatus::Failed;
        f.scale[i] = 1.0 / std::sqrt(d);
    }
    const Eigen::MatrixXd b = f.scale.asDiagonal() * a * f.scale.asDiagonal();
    f.llt.compute(b);
    if (f.llt.info() != Eigen::Success) return FactorStatus::Failed;
    const Eigen::VectorXd diag = f.llt.matrixLLT().diagonal();
    const double lo = diag.minCoeff();
    const double hi = diag.maxCoeff();
    if (!(lo > 0.0)) return FactorStatus::Failed;
    const double cond = (hi / lo) * (hi / lo);
    return std::isfinite(cond) && cond <= kMaxCondition ? FactorStatus::Ok
                                                         : FactorStatus::IllConditioned;
}

SpdFactor factor_spd(const Eigen::MatrixXd& a, const char* what) {
    SpdFactor f;
    if (try_factor(a, f) == FactorStatus::Ok) return f;
    const Eigen::Index n = a.rows();
    const double lambda = kDampingScale * a.trace() / static_cast<double>(n);
    if (lambda > 0.0 && std::isfinite(lambda)) {
        Eigen::MatrixXd damped = a;
        damped.diagonal().array() += lambda;
        SpdFactor g;
        if (try_factor(damped, g) != FactorStatus::Failed) {
            g.damping = lambda;
            return g;
        }
    }
    std::ostringstream msg;
    msg << what << " is singular even after damping";
    throw Error(ErrorKind::Singular, msg.str());
}

void check_dims(const MatrixRef& atoms, const VectorRef& penalties, const JacobianMatrix& jac,
                const VectorRef& y_hat) {
    if (penalties.size() != atoms.cols() || jac.rows() != atoms.rows() ||
        y_hat.size() != atoms.rows()) {
        throw Error(ErrorKind::InvalidInput, "step problem dimensions are inconsistent");
    }
    if (atoms.cols() == 0) throw Error(ErrorKind::InvalidInput, "step problem has no atoms");
}

}  // namespace

GramCache build_gram_cache_from_gram(const MatrixRef& gram, const VectorRef& penalties) {
    if (gram.rows() != gram.cols() || gram.rows() != penalties.size()) {
        throw Error(ErrorKind::InvalidInput, "Gram matrix and penalties disagree in size");
    }
    GramCache cache;
    cache.t1 = gram;
    cache.t1.diagonal().array() += penalties.array().square();
    const SpdFactor f = factor_spd(cache.t1, "D^T D + C^T C");
    if (f.damping > 0.0) cache.t1.diagonal().array() += f.damping;
    cache.damping = f.damping;
    cache.t1_inv = f.inverse();
    return cache;
}

Eigen::MatrixXd gram_matrix(const MatrixRef& atoms) {
    Eigen::MatrixXd gram = Eigen::MatrixXd::Zero(atoms.cols(), atoms.cols());
    gram.selfadjointView<Eigen::Lower>().rankUpdate(atoms.transpose());
    gram.triangularView<Eigen::StrictlyUpper>() = gram.transpose();
    return gram;
}

GramCache build_gram_cache(const MatrixRef& atoms, const VectorRef& penalties) {
    if (penalties.size() != atoms.cols()) {
        throw Error(ErrorKind::InvalidInput, "penalty length does not match atom count");
    }
    return build_gram_cache_from_gram(gram_matrix(atoms), penalties);
}

StepSolution solve_naive(const MatrixRef& atoms, const VectorRef& penalties,
                         const JacobianMatrix& jac, const VectorRef& y_hat) {
    check_dims(atoms, penalties, jac, y_hat);
    const Eigen::Index m = atoms.rows();
    const Eigen::Index n = atoms.cols();
    const Eigen::Index q = kTransformParams;

    Eigen::MatrixXd r = Eigen::MatrixXd::Zero(m + n, n + q);
    r.topLeftCorner(m, n) = atoms;
    r.topRightCorner(m, q) = -jac;
    r.bottomLeftCorner(n, n).diagonal() = penalties;
    Eigen::VectorXd u = Eigen::VectorXd::Zero(m + n);
    u.head(m) = y_hat;

    // Unit column norms keep the SVD rank threshold meaningful when some
    // penalties are huge.
    Eigen::VectorXd col_scale(n + q);
    for (Eigen::Index j = 0; j < n + q; ++j) {
        const double nrm = r.col(j).norm();
        col_scale[j] = nrm > 0.0 ? 1.0 / nrm : 1.0;
    }
    r = r * col_scale.asDiagonal();

    Eigen::BDCSVD<Eigen::MatrixXd> svd(r, Eigen::ComputeThinU | Eigen::ComputeThinV);
    if (svd.rank() == 0) {
        throw Error(ErrorKind::Singular, "least-squares matrix R has rank zero");
    }
    const Eigen::VectorXd z = col_scale.asDiagonal() * svd.solve(u);
    if (!z.allFinite()) throw Error(ErrorKind::Singular, "least-squares solution is not finite");

    StepSolution sol;
    sol.x = z.head(n);
    sol.delta_tau = z.tail(q);
    // Recompute the residual in the original (unscaled) coordinates.
    Eigen::VectorXd resid = u;
    resid.head(m) -= atoms * *sol.x - jac * sol.delta_tau;
    resid.tail(n) -= penalties.cwiseProduct(*sol.x);
    sol.residual_norm = resid.norm();
    sol.objective = resid.squaredNorm();
    return sol;
}

StepSolution solve_block(const MatrixRef& atoms, const VectorRef& penalties,
                         const JacobianMatrix& jac, const VectorRef& y_hat,
                         const GramCache& cache) {
    check_dims(atoms, penalties, jac, y_hat);
    if (cache.size() != atoms.cols()) {
        throw Error(ErrorKind::InvalidInput, "Gram cache was built for a different LCD");
    }
    const Eigen::VectorXd g = atoms.transpose() * y_hat;             // D^T y
    const StepVector h = jac.transpose() * y_hat;                    // J^T y
    const Eigen::MatrixXd t2 = atoms.transpose() * jac;              // D^T J
    const Eigen::Matrix4d t3 = jac.transpose() * jac;                // J^T J
    const Eigen::MatrixXd w = cache.t1_inv * t2;                     // T1^-1 T2

    Eigen::Matrix4d schur = t3 - t2.transpose() * w;
    schur = 0.5 * (schur + schur.transpose()).eval();
    const StepVector rhs = w.transpose() * g - h;
    const SpdFactor f = factor_spd(schur, "Schur complement T3 - T2^T T1^-1 T2");

    StepSolution sol;
    sol.delta_tau = f.solve(rhs);
    if (!sol.delta_tau.allFinite()) {
        throw Error(ErrorKind::Singular, "Schur step is not finite");
    }
    // Residual with x eliminated: |y + J dtau|^2 - b^T T1^-1 b, b = D^T (y + J dtau).
    const double yy = y_hat.squaredNorm();
    const double r2 = yy + 2.0 * h.dot(sol.delta_tau) + sol.delta_tau.dot(t3 * sol.delta_tau);
    const Eigen::VectorXd b = g + t2 * sol.delta_tau;
    const double value = std::max(0.0, r2 - b.dot(cache.t1_inv * b));
    sol.objective = value;
    sol.residual_norm = std::sqrt(value);
    return sol;
}

double objective(const MatrixRef& atoms, const VectorRef& penalties, const VectorRef& x,
                 const StepVector& delta_tau, const JacobianMatrix& jac, const VectorRef& y_hat) {
    check_dims(atoms, penalties, jac, y_hat);
    if (x.size() != atoms.cols()) {
        throw Error(ErrorKind::InvalidInput, "coefficient length does not match atom count");
    }
    const Eigen::VectorXd e = y_hat - atoms * x + jac * delta_tau;
    return penalties.cwiseProduct(x).squaredNorm() + e.squaredNorm();
}

}  // namespace mrlr
