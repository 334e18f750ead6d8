#pragma once

// Single-junction oracle: H = e_c (n - n_g)^2 - e_j cos(x) on the circle.
// Two independent discretizations, neither shared with the library:
// a truncated plane-wave (charge) basis and a periodic second-order finite
// difference grid.

#include <Eigen/Dense>

#include <cmath>
#include <numbers>

namespace oracle {

inline Eigen::VectorXd cosine_well_plane_wave(double e_c, double e_j, int n_max, double n_g = 0.0) {
    const int dim = 2 * n_max + 1;
    Eigen::MatrixXd h = Eigen::MatrixXd::Zero(dim, dim);
    for (int i = 0; i < dim; ++i) {
        const double n = i - n_max - n_g;
        h(i, i) = e_c * n * n;
        if (i + 1 < dim) {
            h(i, i + 1) = h(i + 1, i) = -0.5 * e_j;
        }
    }
    return Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(h, Eigen::EigenvaluesOnly).eigenvalues();
}

inline Eigen::VectorXd cosine_well_periodic_fd(double e_c, double e_j, int points) {
    const double h = 2.0 * std::numbers::pi / points;
    const double t = e_c / (h * h);
    Eigen::MatrixXd m = Eigen::MatrixXd::Zero(points, points);
    for (int i = 0; i < points; ++i) {
        const double x = -std::numbers::pi + h * i;
        m(i, i) = 2.0 * t - e_j * std::cos(x);
        m(i, (i + 1) % points) -= t;
        m(i, (i + points - 1) % points) -= t;
    }
    return Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(m, Eigen::EigenvaluesOnly).eigenvalues();
}

}  // namespace oracle
