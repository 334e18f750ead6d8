#pragma once

#include "torq/circuit_model.hpp"
#include "torq/hamiltonian.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <span>
#include <vector>

namespace torq {

/// Consecutive energies closer than this (E_J) are reported as degenerate.
inline constexpr double kDegeneracyTolerance = 1e-10;

enum class SolverStrategy { Auto, Dense, Iterative };

struct SolverOptions {
    SolverStrategy strategy = SolverStrategy::Auto;
    /// Auto uses dense diagonalization up to this dimension.
    int dense_limit = 200;
    /// Convergence when ||H v - E v|| <= tolerance * max(1, |E|) for every pair.
    double tolerance = 1e-11;
    /// Block size is k + block_extra, so degeneracies up to that size are resolved.
    int block_extra = 2;
    int max_cycles = 200;
    std::uint64_t seed = 0x746f7271ull;
};

struct Spectrum {
    std::vector<double> energies;  // ascending, E_J
    /// Column n is eigenvector n; its largest-magnitude component is real and
    /// positive (first such index on exact ties).
    Eigen::MatrixXcd states;
    std::vector<double> residuals;
    BasisKind basis = BasisKind::Charge;
    Discretization discretization;
    bool degenerate = false;
    bool iterative = false;
    int iterations = 0;

    int size() const { return static_cast<int>(energies.size()); }
    double gap() const { return energies.at(1) - energies.at(0); }
};

/// Lowest `k` eigenpairs of `h`. Throws InvalidArgument unless
/// 1 <= k <= dimension, and ConvergenceFailure (naming the iteration count and
/// best residual) if the iterative path stalls.
Spectrum solve_lowest(const HamiltonianMatrix& h, int k, const SolverOptions& options = {});

struct ConvergenceRow {
    Discretization discretization;
    int dimension = 0;
    double e0 = 0.0;
    double e1 = 0.0;
    /// Change against the previous rung; zero on the first row.
    double delta_e0 = 0.0;
    double delta_e1 = 0.0;
};

struct ConvergenceReport {
    std::vector<ConvergenceRow> rows;
    /// |delta| shrinks rung over rung for both levels.
    bool deltas_shrinking = true;
    /// E0 and E1 each move in one direction along the ladder.
    bool energies_monotone = true;

    bool monotone() const { return deltas_shrinking && energies_monotone; }
};

/// Solves at every rung of an ascending discretization ladder. Throws
/// InvalidArgument for fewer than two rungs.
ConvergenceReport convergence_report(const CircuitParams& p, std::span<const Discretization> ladder,
                                     const SolverOptions& options = {});

}  // namespace torq
