#include "torq/spectrum.hpp"

#include "torq/error.hpp"

#include <Eigen/SparseCholesky>

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <sstream>

namespace torq {

namespace {

template <class Scalar>
using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

template <class Scalar>
struct Eigenpairs {
    Eigen::VectorXd values;
    Matrix<Scalar> vectors;
    int iterations = 0;
};

template <class Scalar>
Eigenpairs<Scalar> dense_lowest(const Eigen::SparseMatrix<Scalar>& h, int k) {
    const Matrix<Scalar> dense(h);
    Eigen::SelfAdjointEigenSolver<Matrix<Scalar>> es(dense);
    if (es.info() != Eigen::Success) {
        throw Error(ErrorKind::ConvergenceFailure, "", "dense eigensolver did not converge");
    }
    return {es.eigenvalues().head(k), es.eigenvectors().leftCols(k), 1};
}

template <class Scalar>
double gershgorin_lower_bound(const Eigen::SparseMatrix<Scalar>& h) {
    Eigen::VectorXd diag = Eigen::VectorXd::Zero(h.rows());
    Eigen::VectorXd radius = Eigen::VectorXd::Zero(h.rows());
    for (int col = 0; col < h.outerSize(); ++col) {
        for (typename Eigen::SparseMatrix<Scalar>::InnerIterator it(h, col); it; ++it) {
            if (it.row() == it.col()) {
                diag[it.row()] = std::real(it.value());
            } else {
                radius[it.row()] += std::abs(it.value());
            }
        }
    }
    return (diag - radius).minCoeff();
}

template <class Scalar>
Matrix<Scalar> random_block(int rows, int cols, std::uint64_t seed) {
    std::mt19937_64 gen(seed ^ (static_cast<std::uint64_t>(rows) * 0x9e3779b97f4a7c15ull));
    std::uniform_real_distribution<double> uni(-1.0, 1.0);
    Matrix<Scalar> m(rows, cols);
    for (int j = 0; j < cols; ++j) {
        for (int i = 0; i < rows; ++i) {
            if constexpr (std::is_same_v<Scalar, double>) {
                m(i, j) = uni(gen);
            } else {
                const double re = uni(gen);
                m(i, j) = Scalar(re, uni(gen));
            }
        }
    }
    return m;
}

// Orthogonalizes `w` against the orthonormal columns of `v` and
// then against itself, dropping columns that lose all but 1e-10 of their
// original norm. Returns the kept columns.
template <class Scalar>
Matrix<Scalar> orthonormalize_against(const Matrix<Scalar>& v, Matrix<Scalar> w) {
    const Eigen::VectorXd original = w.colwise().norm().transpose();
    if (v.cols() > 0) {
        w -= v * (v.adjoint() * w);
        // A second pass is needed only after heavy cancellation.
        if ((w.colwise().norm().transpose().array() < 0.7 * original.array()).any()) {
            w -= v * (v.adjoint() * w);
        }
    }
    Matrix<Scalar> kept(w.rows(), w.cols());
    int count = 0;
    for (int j = 0; j < w.cols(); ++j) {
        auto col = w.col(j);
        for (int pass = 0; pass < 2; ++pass) {
            for (int i = 0; i < count; ++i) {
                col -= kept.col(i) * kept.col(i).dot(col);
            }
        }
        const double norm = col.norm();
        if (norm > 1e-10 * original[j] && norm > 1e-300) {
            kept.col(count++) = col / norm;
        }
    }
    return kept.leftCols(count);
}

template <class Scalar>
class ShiftedInverse {
public:
    explicit ShiftedInverse(const Eigen::SparseMatrix<Scalar>& h) : h_(h) {
        identity_.resize(h.rows(), h.cols());
        identity_.setIdentity();
        // The pattern must include the full diagonal, which `h` may lack.
        solver_.analyzePattern(Eigen::SparseMatrix<Scalar>(h_ - identity_));
    }

    /// Factorizes H - sigma I. Returns false unless it is positive definite,
    /// in which case sigma lies below the whole spectrum.
    bool reset(double sigma) {
        const Eigen::SparseMatrix<Scalar> shifted = h_ - Scalar(sigma) * identity_;
        solver_.factorize(shifted);
        if (solver_.info() != Eigen::Success) {
            return false;
        }
        sigma_ = sigma;
        return true;
    }

    Matrix<Scalar> apply(const Matrix<Scalar>& x) const { return solver_.solve(x); }
    double sigma() const { return sigma_; }

private:
    const Eigen::SparseMatrix<Scalar>& h_;
    Eigen::SparseMatrix<Scalar> identity_;
    Eigen::SimplicialLLT<Eigen::SparseMatrix<Scalar>, Eigen::Lower> solver_;
    double sigma_ = 0.0;
};

// Block Davidson iteration with (H - sigma)^-1 as the preconditioner and
// Rayleigh-Ritz on H itself after every step. Because the projection uses H
// and not the inverse, sigma may move between steps: it follows the lowest
// Ritz value from below for as long as H - sigma factorizes as positive
// definite. The basis restarts from the Ritz block once it reaches cycle_dim.
template <class Scalar>
Eigenpairs<Scalar> iterative_lowest(const Eigen::SparseMatrix<Scalar>& h, int k, const SolverOptions& opt) {
    const int n = static_cast<int>(h.rows());
    const int block = std::min(n, k + std::max(1, opt.block_extra));
    const int cycle_dim = std::min(n, std::max(6 * block, 24));
    const int max_steps = opt.max_cycles * std::max(1, cycle_dim / block);

    ShiftedInverse<Scalar> inverse(h);
    const double lower = gershgorin_lower_bound(h);
    if (!inverse.reset(lower - 1e-3 * std::max(1.0, std::abs(lower)))) {
        throw Error(ErrorKind::ConvergenceFailure, "", "factorization below the Gershgorin bound failed");
    }

    Matrix<Scalar> v = orthonormalize_against(Matrix<Scalar>(n, 0), random_block<Scalar>(n, block, opt.seed));
    Matrix<Scalar> hv = h * v;
    Matrix<Scalar> g = v.adjoint() * hv;
    double best = std::numeric_limits<double>::infinity();
    int step = 0;

    for (; step <= max_steps; ++step) {
        g = (0.5 * (g + g.adjoint())).eval();
        Eigen::SelfAdjointEigenSolver<Matrix<Scalar>> rr(g);
        const int keep = std::min<int>(block, static_cast<int>(v.cols()));
        const Eigen::VectorXd theta = rr.eigenvalues().head(keep);
        const Matrix<Scalar> y = rr.eigenvectors().leftCols(keep);
        const Matrix<Scalar> x = v * y;
        const Matrix<Scalar> hx = hv * y;

        bool converged = keep >= k;
        double worst = 0.0;
        for (int i = 0; i < std::min(k, keep); ++i) {
            const double scale = std::max(1.0, std::abs(theta[i]));
            const double res = (hx.col(i) - theta[i] * x.col(i)).norm() / scale;
            worst = std::max(worst, res);
            converged = converged && res <= opt.tolerance;
        }
        best = std::min(best, worst);
        if (converged || v.cols() == n) {
            return {theta.head(k), x.leftCols(k), step};
        }

        const double r0 = (hx.col(0) - theta[0] * x.col(0)).norm();
        const double spread = keep > 1 ? theta[keep - 1] - theta[0] : 0.0;
        const double margin = std::max({0.1 * spread, 10.0 * r0, 1e-8 * std::max(1.0, std::abs(theta[0]))});
        const double candidate = theta[0] - margin;
        // Refactorize only when the distance to the lowest Ritz value at least
        // halves; smaller moves barely change the convergence rate.
        if (theta[0] - candidate < 0.5 * (theta[0] - inverse.sigma())) {
            const double previous = inverse.sigma();
            if (!inverse.reset(candidate)) {
                inverse.reset(previous);
            }
        }

        if (v.cols() + block > cycle_dim) {
            // Thick restart from the lowest 2 * block Ritz vectors, recomputing
            // H v so rounding from the discarded basis does not accumulate.
            const int retain = std::min<int>(2 * block, static_cast<int>(v.cols()));
            v = orthonormalize_against(Matrix<Scalar>(n, 0), Matrix<Scalar>(v * rr.eigenvectors().leftCols(retain)));
            hv = h * v;
            g = v.adjoint() * hv;
        }
        // Expanding with the inverse applied to the residuals, rather than to
        // the Ritz vectors, keeps the new directions accurate once the block
        // is nearly converged.
        const Matrix<Scalar> residual = hx - x * theta.asDiagonal();
        Matrix<Scalar> w = orthonormalize_against(v, inverse.apply(residual));
        if (w.cols() == 0) {
            // The block is invariant under the inverse yet not converged;
            // continue from fresh directions.
            w = orthonormalize_against(v, random_block<Scalar>(n, block, opt.seed + static_cast<std::uint64_t>(step) + 1));
            if (w.cols() == 0) {
                break;
            }
        }
        const Matrix<Scalar> hw = h * w;
        const Matrix<Scalar> cross = v.adjoint() * hw;
        const auto old = v.cols();
        v.conservativeResize(Eigen::NoChange, old + w.cols());
        v.rightCols(w.cols()) = w;
        hv.conservativeResize(Eigen::NoChange, old + w.cols());
        hv.rightCols(w.cols()) = hw;
        Matrix<Scalar> grown(old + w.cols(), old + w.cols());
        grown.topLeftCorner(old, old) = g;
        grown.topRightCorner(old, w.cols()) = cross;
        grown.bottomLeftCorner(w.cols(), old) = cross.adjoint();
        grown.bottomRightCorner(w.cols(), w.cols()) = w.adjoint() * hw;
        g = std::move(grown);
    }

    std::ostringstream msg;
    msg << "iterative eigensolver stalled after " << step << " block steps; best relative residual " << best;
    throw Error(ErrorKind::ConvergenceFailure, "", msg.str());
}

template <class Scalar>
Spectrum finish(Eigenpairs<Scalar> pairs, const Eigen::SparseMatrix<Scalar>& h, const HamiltonianMatrix& source,
                bool iterative) {
    Spectrum s;
    s.basis = source.kind;
    s.discretization = source.discretization;
    s.iterative = iterative;
    s.iterations = pairs.iterations;
    const int k = static_cast<int>(pairs.values.size());
    s.energies.assign(pairs.values.data(), pairs.values.data() + k);
    s.states = pairs.vectors.template cast<std::complex<double>>();

    for (int j = 0; j < k; ++j) {
        auto col = s.states.col(j);
        col.normalize();
        Eigen::Index arg = 0;
        double largest = -1.0;
        for (Eigen::Index i = 0; i < col.size(); ++i) {
            if (const double m = std::abs(col[i]); m > largest) {
                largest = m;
                arg = i;
            }
        }
        col *= std::conj(col[arg]) / largest;
        col[arg] = largest;
    }

    const Matrix<Scalar> hv = h * pairs.vectors;
    for (int j = 0; j < k; ++j) {
        s.residuals.push_back((hv.col(j) - pairs.values[j] * pairs.vectors.col(j)).norm() /
                              pairs.vectors.col(j).norm());
        if (j > 0 && s.energies[j] - s.energies[j - 1] < kDegeneracyTolerance) {
            s.degenerate = true;
        }
    }
    return s;
}

template <class Scalar>
Spectrum solve_typed(const Eigen::SparseMatrix<Scalar>& h, const HamiltonianMatrix& source, int k,
                     const SolverOptions& opt) {
    const bool dense = opt.strategy == SolverStrategy::Dense ||
                       (opt.strategy == SolverStrategy::Auto && source.dimension <= opt.dense_limit) ||
                       k + opt.block_extra >= source.dimension;
    if (dense) {
        return finish(dense_lowest(h, k), h, source, false);
    }
    return finish(iterative_lowest(h, k, opt), h, source, true);
}

}  // namespace

Spectrum solve_lowest(const HamiltonianMatrix& h, int k, const SolverOptions& options) {
    if (k < 1 || k > h.dimension) {
        throw Error(ErrorKind::InvalidArgument, "k",
                    "k must lie in [1, " + std::to_string(h.dimension) + "], got " + std::to_string(k));
    }
    return std::visit([&](const auto& m) { return solve_typed(m, h, k, options); }, h.entries);
}

ConvergenceReport convergence_report(const CircuitParams& p, std::span<const Discretization> ladder,
                                     const SolverOptions& options) {
    if (ladder.size() < 2) {
        throw Error(ErrorKind::InvalidArgument, "ladder", "a convergence ladder needs at least two rungs");
    }
    ConvergenceReport report;
    for (const auto& rung : ladder) {
        const HamiltonianMatrix h = build(p, rung);
        const Spectrum s = solve_lowest(h, 2, options);
        ConvergenceRow row{rung, h.dimension, s.energies[0], s.energies[1], 0.0, 0.0};
        if (!report.rows.empty()) {
            const auto& prev = report.rows.back();
            row.delta_e0 = row.e0 - prev.e0;
            row.delta_e1 = row.e1 - prev.e1;
        }
        report.rows.push_back(row);
    }

    for (std::size_t i = 2; i < report.rows.size(); ++i) {
        const auto& a = report.rows[i - 1];
        const auto& b = report.rows[i];
        auto grows = [](double prev, double next) { return std::abs(next) > 1e-12 && std::abs(next) > std::abs(prev); };
        if (grows(a.delta_e0, b.delta_e0) || grows(a.delta_e1, b.delta_e1)) {
            report.deltas_shrinking = false;
        }
        // Steps below round-off carry no direction.
        auto flips = [](double x, double y) { return std::abs(x) > 1e-13 && std::abs(y) > 1e-13 && x * y < 0.0; };
        if (flips(a.delta_e0, b.delta_e0) || flips(a.delta_e1, b.delta_e1)) {
            report.energies_monotone = false;
        }
    }
    return report;
}

}  // namespace torq
