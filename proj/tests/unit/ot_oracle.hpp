// Copyright 2026 The bornbench Authors.

// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at

//     http://www.apache.org/licenses/LICENSE-2.0

// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
/**
 * @file
 * Direct minimization of the entropic transport objective
 *
 *   F(U) = sum_ij C_ij U_ij + eps * sum_ij U_ij log(U_ij / (p_i q_j))
 *
 * over the coupling polytope {U >= 0, U 1 = p, U^T 1 = q}, by an
 * equality-constrained Newton method on the primal. This shares nothing with
 * the Sinkhorn fixed-point iteration and is used only as a test oracle.
 */
#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <stdexcept>
#include <vector>

namespace bornbench::oracle {

struct PrimalOtResult {
    double value{0.0};
    Eigen::MatrixXd coupling;
    int iterations{0};
};

inline PrimalOtResult entropic_ot_primal(const std::vector<double> &p, const std::vector<double> &q,
                                         const Eigen::MatrixXd &cost, double eps) {
    const auto n = static_cast<Eigen::Index>(p.size());
    const auto m = static_cast<Eigen::Index>(q.size());
    const Eigen::Index nv = n * m;
    // Drop one column constraint: the row and column constraints share the total mass.
    const Eigen::Index nc = n + m - 1;
    Eigen::MatrixXd a = Eigen::MatrixXd::Zero(nc, nv);
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = 0; j < m; ++j) {
            const Eigen::Index v = i * m + j;
            a(i, v) = 1.0;
            if (j < m - 1) {
                a(n + j, v) = 1.0;
            }
        }
    }
    Eigen::VectorXd ref(nv);
    Eigen::VectorXd c(nv);
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = 0; j < m; ++j) {
            ref(i * m + j) = p[static_cast<std::size_t>(i)] * q[static_cast<std::size_t>(j)];
            c(i * m + j) = cost(i, j);
        }
    }
    const auto objective = [&](const Eigen::VectorXd &u) {
        double f = 0.0;
        for (Eigen::Index v = 0; v < nv; ++v) {
            f += c(v) * u(v) + eps * u(v) * std::log(u(v) / ref(v));
        }
        return f;
    };

    // The product coupling is feasible and strictly positive.
    Eigen::VectorXd u = ref;
    PrimalOtResult out;
    for (int it = 0; it < 200; ++it) {
        Eigen::VectorXd grad(nv);
        Eigen::VectorXd hdiag(nv);
        for (Eigen::Index v = 0; v < nv; ++v) {
            grad(v) = c(v) + eps * (std::log(u(v) / ref(v)) + 1.0);
            hdiag(v) = eps / u(v);
        }
        Eigen::MatrixXd kkt = Eigen::MatrixXd::Zero(nv + nc, nv + nc);
        kkt.topLeftCorner(nv, nv) = hdiag.asDiagonal();
        kkt.topRightCorner(nv, nc) = a.transpose();
        kkt.bottomLeftCorner(nc, nv) = a;
        Eigen::VectorXd rhs = Eigen::VectorXd::Zero(nv + nc);
        rhs.head(nv) = -grad;
        const Eigen::VectorXd sol = kkt.fullPivLu().solve(rhs);
        const Eigen::VectorXd step = sol.head(nv);
        const double decrement = -grad.dot(step);
        out.iterations = it + 1;
        if (decrement < 1e-22) {
            break;
        }
        double t = 1.0;
        const double f0 = objective(u);
        while (true) {
            const Eigen::VectorXd trial = u + t * step;
            if (trial.minCoeff() > 0.0 && objective(trial) <= f0 - 0.25 * t * decrement) {
                u = trial;
                break;
            }
            t *= 0.5;
            if (t < 1e-20) {
                throw std::runtime_error("primal OT line search failed");
            }
        }
    }
    out.value = objective(u);
    out.coupling = Eigen::Map<Eigen::MatrixXd>(u.data(), m, n).transpose();
    return out;
}

} // namespace bornbench::oracle
