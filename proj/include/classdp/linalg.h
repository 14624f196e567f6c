//
// Copyright 2026 The classdp Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
//

#ifndef CLASSDP_LINALG_H_
#define CLASSDP_LINALG_H_

#include <cstdint>
#include <random>

#include <Eigen/Dense>

namespace classdp {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

// Relative tolerance shared by every symmetric-matrix routine. Symmetry is
// checked entrywise against the largest magnitude entry; eigenvalues in
// [-kEigenClamp * lambda_max, 0) are treated as zero and anything more
// negative is an error.
inline constexpr double kSymmetryTolerance = 1e-12;
inline constexpr double kEigenClamp = 1e-12;

// Eigendecomposition of a symmetric matrix, eigenvalues in ascending order.
// This is the single primitive behind the square root, inverse square root,
// log-determinant and PSD projection below.
struct SymmetricEigen {
  Vector values;
  Matrix vectors;
};

bool IsSymmetric(const Matrix& m, double rel_tol = kSymmetryTolerance);

// Throws std::invalid_argument if `m` is not square and symmetric.
SymmetricEigen EigenSym(const Matrix& m);

// Strict positive definiteness: smallest eigenvalue > kEigenClamp * largest.
bool IsPositiveDefinite(const Matrix& m);

// S symmetric PSD with S * S = M. Throws NumericError when an eigenvalue is
// below the clamp threshold.
Matrix MatrixSqrtSym(const Matrix& m);

// M^{-1/2} and M^{-1} for strictly positive definite M.
Matrix InverseSqrtSym(const Matrix& m);
Matrix InverseSym(const Matrix& m);

// ln|M| for strictly positive definite M.
double LogDetSym(const Matrix& m);

// Nearest symmetric PSD matrix in Frobenius norm. The input is symmetrized
// first; an input that is already PSD is returned unchanged.
Matrix PsdProject(const Matrix& m);

// Factor L with L * L^T = M for a PSD matrix (eigen-based, so singular M is
// fine). Used to draw correlated Gaussian samples.
Matrix PsdFactor(const Matrix& m);

// Standard normal upper tail Q(v) = P(Z > v).
double GaussianTailQ(double v);

// Derives an independent 64-bit stream seed from a root seed and a stream
// index (splitmix64 finalizer over the pair).
std::uint64_t DeriveSeed(std::uint64_t root, std::uint64_t stream);

// Draws mean + factor * z with z standard normal.
Vector SampleGaussian(const Vector& mean, const Matrix& factor,
                      std::mt19937_64& rng);

}  // namespace classdp

#endif  // CLASSDP_LINALG_H_
