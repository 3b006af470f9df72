#pragma once

#include <functional>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "semimarkov/grid.hpp"
#include "semimarkov/inversion.hpp"
#include "semimarkov/process.hpp"

namespace semimarkov {

using LaplaceMatrixFn = std::function<Eigen::MatrixXcd(Complex)>;

/// s^{alpha-1} (s^alpha I - G)^{-1}.
Eigen::MatrixXcd laplace_matrix_homogeneous(const Generator& gen, double alpha, Complex s);

/// (1/s) (Lambda - G)^{-1} Lambda with Lambda = diag(s^{alpha_i}).
Eigen::MatrixXcd laplace_matrix_heterogeneous(const Generator& gen, std::span<const double> alphas,
                                              Complex s);

/// Closed-form entry (i, j) of the state-dependent fractional Poisson
/// transform: s^{alpha_j - 1} lambda^{j-i} / prod_{k=i..j} (lambda + s^{alpha_k}); 0 for j < i.
Complex fpp_state_dependent_laplace(int i, int j, double lambda, std::span<const double> alphas,
                                    Complex s);

/// Transform of the model's transition matrix, (F - G)^{-1} F / s with
/// F = diag(f_i(s)); covers Exponential, Mittag-Leffler and general laws.
LaplaceMatrixFn model_laplace_transform(const SemiMarkovModel& model);

/// Inverts fn entrywise at every time; t = 0 returns the identity.
TransitionGrid invert_laplace_matrix(const LaplaceMatrixFn& fn, std::span<const double> times,
                                     const InversionConfig& cfg = {});

}  // namespace semimarkov
