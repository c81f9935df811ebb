#include "modeswim/eigensolver.hpp"

#include <Eigen/SparseCholesky>
#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>
#include <random>
#include <sstream>

#include "modeswim/error.hpp"
#include "modeswim/grid.hpp"

namespace modeswim::eigen {

namespace {

using Eigen::MatrixXd;
using Eigen::VectorXd;

constexpr double kTwoPi = 2.0 * std::numbers::pi;
// Pairs closer than this (relative) are treated as one eigenspace when canonicalizing shapes.
constexpr double kExactDegeneracy = 1e-8;

VectorXd restrict(const fem::SystemMatrices& m, const VectorXd& full) {
    VectorXd r(static_cast<Eigen::Index>(m.dofs.size()));
    for (std::size_t k = 0; k < m.dofs.size(); ++k) r[static_cast<Eigen::Index>(k)] = full[static_cast<Eigen::Index>(m.dofs[k])];
    return r;
}

// Sign convention: a fixed, generic weighting of the entries must come out positive.
void fix_sign(VectorXd& v) {
    double s = 0.0;
    for (Eigen::Index i = 0; i < v.size(); ++i) s += v[i] * (1.0 + 0.1 * static_cast<double>(i % 7) + 0.013 * static_cast<double>(i % 11));
    if (std::abs(s) < 1e-12 * v.cwiseAbs().sum()) {
        Eigen::Index arg = 0;
        v.cwiseAbs().maxCoeff(&arg);
        s = v[arg];
    }
    if (s < 0.0) v = -v;
}

// Rotates an exactly degenerate pair so the first shape has the largest mirror autocorrelation.
void canonicalize_pair(VectorXd& a, VectorXd& b, const fem::MirrorMap& mirror) {
    const VectorXd pa = fem::apply_mirror(mirror, a);
    const VectorXd pb = fem::apply_mirror(mirror, b);
    Eigen::Matrix2d s;
    s(0, 0) = a.dot(pa);
    s(1, 1) = b.dot(pb);
    s(0, 1) = s(1, 0) = 0.5 * (a.dot(pb) + b.dot(pa));
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> es(s);
    const auto& ev = es.eigenvalues();
    if (std::abs(ev[1] - ev[0]) <= 1e-9 * (std::abs(ev[0]) + std::abs(ev[1]))) return;
    const Eigen::Vector2d top = es.eigenvectors().col(1);
    const double c = top[0], sn = top[1];
    VectorXd first = c * a + sn * b;
    VectorXd second = -sn * a + c * b;
    a = std::move(first);
    b = std::move(second);
}

struct RitzPairs {
    std::vector<double> values;
    std::vector<VectorXd> vectors;  // reduced DOF space
};

// v^T A v with extended-precision accumulation. Stiff plate matrices lose about eight digits to
// cancellation in a plain double product, which would otherwise show up in the eigenvalues.
long double quadratic_form(const fem::SparseMatrix& a, const VectorXd& v) {
    long double sum = 0.0L;
    for (Eigen::Index j = 0; j < a.outerSize(); ++j) {
        long double col = 0.0L;
        for (fem::SparseMatrix::InnerIterator it(a, j); it; ++it) col += static_cast<long double>(it.value()) * v[it.row()];
        sum += col * v[j];
    }
    return sum;
}

ModalBasis finish(const fem::SystemMatrices& matrices, RitzPairs ritz, int count, const SolveOptions& options) {
    // Eigenvalues are reported as refined Rayleigh quotients of the returned vectors.
    std::vector<double> refined(ritz.values.size());
    for (std::size_t i = 0; i < ritz.values.size(); ++i) {
        auto& v = ritz.vectors[i];
        const long double mass = quadratic_form(matrices.mass, v);
        v /= static_cast<double>(std::sqrt(mass));
        refined[i] = static_cast<double>(quadratic_form(matrices.stiffness, v) / quadratic_form(matrices.mass, v));
    }
    std::vector<std::size_t> order(ritz.values.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](auto i, auto j) { return refined[i] < refined[j]; });

    ModalBasis basis;
    const double scale = diagonal_rayleigh_estimate(matrices);
    for (int k = 0; k < count; ++k) {
        const auto idx = order[static_cast<std::size_t>(k)];
        basis.eigenvalues.push_back(refined[idx]);
        basis.shapes.push_back(matrices.expand(ritz.vectors[idx]));
    }

    // Rigid modes: far below the first elastic eigenvalue.
    double first_elastic = 0.0;
    for (double lam : basis.eigenvalues) {
        if (lam > 1e-10 * scale) {
            first_elastic = lam;
            break;
        }
    }
    const double rigid_limit = first_elastic > 0.0 ? 1e-6 * first_elastic : 1e-10 * scale;
    while (basis.rigid_count < basis.eigenvalues.size() && basis.eigenvalues[basis.rigid_count] < rigid_limit) {
        ++basis.rigid_count;
    }
    for (std::size_t k = 0; k < basis.eigenvalues.size(); ++k) {
        basis.frequencies_hz.push_back(basis.is_rigid(k) ? 0.0 : std::sqrt(std::max(basis.eigenvalues[k], 0.0)) / kTwoPi);
    }

    if (options.mirror) {
        for (std::size_t k = basis.rigid_count; k + 1 < basis.size(); ++k) {
            const double l0 = basis.eigenvalues[k], l1 = basis.eigenvalues[k + 1];
            if (l1 - l0 <= kExactDegeneracy * l0) {
                canonicalize_pair(basis.shapes[k], basis.shapes[k + 1], *options.mirror);
                ++k;
            }
        }
    }
    for (auto& s : basis.shapes) fix_sign(s);
    return basis;
}

void check_request(const fem::SystemMatrices& matrices, int count, const SolveOptions& options) {
    if (count < 1 || static_cast<std::size_t>(count) > matrices.size()) {
        throw DomainError("requested " + std::to_string(count) + " modes from a system with " +
                          std::to_string(matrices.size()) + " DOFs");
    }
    if (!(options.shift_hz >= 0.0) || !std::isfinite(options.shift_hz)) throw DomainError("shift must be >= 0 Hz");
}

// M-orthonormalizes the columns of w against basis v (given mv = M v) and among themselves.
// Columns that collapse are replaced by fresh random directions.
MatrixXd orthonormalize(const fem::SparseMatrix& mass, const MatrixXd& v, const MatrixXd& mv, MatrixXd w,
                        std::mt19937_64& rng) {
    std::normal_distribution<double> normal;
    MatrixXd q(w.rows(), 0);
    MatrixXd mq(w.rows(), 0);
    for (Eigen::Index c = 0; c < w.cols(); ++c) {
        VectorXd x = w.col(c);
        for (int attempt = 0; attempt < 4; ++attempt) {
            const double before = std::sqrt(std::abs(x.dot(mass * x)));
            for (int pass = 0; pass < 2; ++pass) {
                if (v.cols() > 0) x -= v * (mv.transpose() * x);
                if (q.cols() > 0) x -= q * (mq.transpose() * x);
            }
            const VectorXd mx = mass * x;
            const double norm = std::sqrt(std::abs(x.dot(mx)));
            if (norm > 1e-8 * before && norm > 0.0) {
                q.conservativeResize(Eigen::NoChange, q.cols() + 1);
                mq.conservativeResize(Eigen::NoChange, mq.cols() + 1);
                q.col(q.cols() - 1) = x / norm;
                mq.col(mq.cols() - 1) = mx / norm;
                break;
            }
            for (Eigen::Index i = 0; i < x.size(); ++i) x[i] = normal(rng);
        }
    }
    return q;
}

}  // namespace

std::string to_string(Medium m) { return m == Medium::dry ? "dry" : "wet"; }

double diagonal_rayleigh_estimate(const fem::SystemMatrices& matrices) {
    double best = std::numeric_limits<double>::infinity();
    for (Eigen::Index i = 0; i < matrices.stiffness.rows(); ++i) {
        const double k = matrices.stiffness.coeff(i, i);
        const double m = matrices.mass.coeff(i, i);
        if (m > 0.0 && k > 0.0) best = std::min(best, k / m);
    }
    return std::isfinite(best) ? best : 1.0;
}

ModalBasis solve_modes(const fem::SystemMatrices& matrices, int count, const SolveOptions& options) {
    check_request(matrices, count, options);
    const auto n = static_cast<Eigen::Index>(matrices.size());
    const auto& k = matrices.stiffness;
    const auto& m = matrices.mass;

    const double estimate = diagonal_rayleigh_estimate(matrices);
    const double sigma = options.shift_hz > 0.0 ? std::pow(kTwoPi * options.shift_hz, 2) : -1e-6 * estimate;

    fem::SparseMatrix shifted = k - sigma * m;
    Eigen::SimplicialLDLT<fem::SparseMatrix> ldlt;
    ldlt.compute(shifted);
    if (ldlt.info() != Eigen::Success) {
        throw SolverError("factorization of K - sigma M failed at shift " + format_number(options.shift_hz) +
                          " Hz; try a different shift");
    }
    const VectorXd d = ldlt.vectorD();
    const double dmax = d.cwiseAbs().maxCoeff();
    if (!(dmax > 0.0) || d.cwiseAbs().minCoeff() <= 1e-14 * dmax || !d.allFinite()) {
        throw SolverError("factorization of K - sigma M is singular at shift " + format_number(options.shift_hz) +
                          " Hz; try a different shift");
    }

    const Eigen::Index block = std::min<Eigen::Index>(n, std::max(3, std::min(count, 8)));
    const Eigen::Index cap = std::min<Eigen::Index>(n, std::max<Eigen::Index>(3 * count + 4 * block, 90));
    const double lambda_floor = std::max(std::abs(sigma), 1e-12 * estimate);

    std::mt19937_64 rng(0x5eed'cafe'f00dULL);
    std::normal_distribution<double> normal;
    MatrixXd w(n, block);
    for (Eigen::Index j = 0; j < block; ++j) {
        for (Eigen::Index i = 0; i < n; ++i) w(i, j) = normal(rng);
    }

    MatrixXd v(n, 0), mv(n, 0), kv(n, 0);
    double worst = std::numeric_limits<double>::infinity();
    for (int restart = 0; restart <= options.max_restarts; ++restart) {
        while (true) {
            MatrixXd q = orthonormalize(m, v, mv, w, rng);
            if (q.cols() == 0) break;
            const Eigen::Index old = v.cols();
            const Eigen::Index add = std::min<Eigen::Index>(q.cols(), cap - old);
            v.conservativeResize(Eigen::NoChange, old + add);
            mv.conservativeResize(Eigen::NoChange, old + add);
            kv.conservativeResize(Eigen::NoChange, old + add);
            for (Eigen::Index c = 0; c < add; ++c) {
                v.col(old + c) = q.col(c);
                mv.col(old + c) = m * q.col(c);
                kv.col(old + c) = k * q.col(c);
            }
            if (v.cols() >= cap) break;
            w.resize(n, add);
            for (Eigen::Index c = 0; c < add; ++c) w.col(c) = ldlt.solve(mv.col(old + c));
        }

        // Rayleigh-Ritz on the M-orthonormal basis.
        MatrixXd h = v.transpose() * kv;
        h = 0.5 * (h + h.transpose());
        Eigen::SelfAdjointEigenSolver<MatrixXd> es(h);
        const VectorXd theta = es.eigenvalues();
        const MatrixXd y = es.eigenvectors();

        // Residual of the shift-inverted operator: |theta - sigma| * ||(K - sigma M)^-1 M x - x / (theta - sigma)||_M.
        // Unlike ||K x - theta M x|| it has no rounding floor set by the largest stiffness entries.
        worst = 0.0;
        const Eigen::Index wanted = count;
        for (Eigen::Index j = 0; j < wanted; ++j) {
            const VectorXd x = v * y.col(j);
            double shifted_theta = theta[j] - sigma;
            if (std::abs(shifted_theta) < lambda_floor) shifted_theta = std::copysign(lambda_floor, shifted_theta);
            const VectorXd r = ldlt.solve(mv * y.col(j)) * shifted_theta - x;
            worst = std::max(worst, std::sqrt(std::abs(r.dot(m * r))));
        }
        if (worst <= options.tolerance || v.cols() == n) {
            RitzPairs ritz;
            for (Eigen::Index j = 0; j < wanted; ++j) {
                ritz.values.push_back(theta[j]);
                ritz.vectors.emplace_back(v * y.col(j));
            }
            return finish(matrices, std::move(ritz), count, options);
        }

        // Thick restart: keep the lowest Ritz vectors and extend from them.
        const Eigen::Index keep = std::min<Eigen::Index>(v.cols(), wanted + block);
        MatrixXd x = v * y.leftCols(keep);
        v = x;
        mv = m * v;
        kv = k * v;
        w.resize(n, block);
        for (Eigen::Index c = 0; c < block; ++c) w.col(c) = ldlt.solve(mv.col(keep - block + c));
    }

    std::ostringstream msg;
    msg << "eigensolver did not converge after " << options.max_restarts << " restarts; worst relative residual "
        << worst;
    throw ConvergenceError(msg.str());
}

ModalBasis solve_modes_dense(const fem::SystemMatrices& matrices, int count, const SolveOptions& options) {
    check_request(matrices, count, options);
    const MatrixXd k = MatrixXd(matrices.stiffness);
    const MatrixXd m = MatrixXd(matrices.mass);
    Eigen::GeneralizedSelfAdjointEigenSolver<MatrixXd> es(k, m, Eigen::ComputeEigenvectors | Eigen::Ax_lBx);
    if (es.info() != Eigen::Success) throw SolverError("dense generalized eigensolver failed");
    RitzPairs ritz;
    for (int j = 0; j < count; ++j) {
        ritz.values.push_back(es.eigenvalues()[j]);
        ritz.vectors.emplace_back(es.eigenvectors().col(j));
    }
    return finish(matrices, std::move(ritz), count, options);
}

std::vector<std::pair<std::size_t, std::size_t>> detect_degenerate_pairs(const ModalBasis& basis,
                                                                        double relative_tolerance) {
    if (!(relative_tolerance >= 0.0) || relative_tolerance >= 0.1) {
        throw DomainError("degeneracy tolerance must lie in [0, 0.1)");
    }
    std::vector<std::pair<std::size_t, std::size_t>> pairs;
    const auto& f = basis.frequencies_hz;
    for (std::size_t i = basis.rigid_count; i + 1 < f.size(); ++i) {
        if (f[i + 1] - f[i] <= relative_tolerance * f[i]) {
            pairs.emplace_back(i, i + 1);
            ++i;
        }
    }
    return pairs;
}

double max_relative_residual(const fem::SystemMatrices& matrices, const ModalBasis& basis) {
    double worst = 0.0;
    for (std::size_t j = basis.rigid_count; j < basis.size(); ++j) {
        const VectorXd phi = restrict(matrices, basis.shapes[j]);
        const VectorXd kphi = matrices.stiffness * phi;
        // A wet basis keeps the dry shapes, so K phi = lambda_wet * mass_scale * M_dry phi.
        const VectorXd r = kphi - basis.eigenvalues[j] * basis.mass_scale * (matrices.mass * phi);
        worst = std::max(worst, r.norm() / kphi.norm());
    }
    return worst;
}

}  // namespace modeswim::eigen
