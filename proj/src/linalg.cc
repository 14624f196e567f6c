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

#include "classdp/linalg.h"

#include <cmath>
#include <sstream>
#include <stdexcept>

#include "classdp/errors.h"

namespace classdp {
namespace {

double MaxAbs(const Matrix& m) {
  return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff();
}

// Eigenvalues with the clamp policy applied. Throws if any eigenvalue is
// more negative than the allowed threshold.
Vector ClampedEigenvalues(const SymmetricEigen& eig, const char* what) {
  const double lmax = eig.values.size() ? eig.values.maxCoeff() : 0.0;
  const double threshold = -kEigenClamp * std::max(lmax, 0.0);
  Vector clamped = eig.values;
  for (Eigen::Index i = 0; i < clamped.size(); ++i) {
    if (clamped[i] < threshold) {
      std::ostringstream msg;
      msg << what << ": eigenvalue " << clamped[i]
          << " below clamp threshold " << threshold;
      throw NumericError(msg.str());
    }
    if (clamped[i] < 0.0) clamped[i] = 0.0;
  }
  return clamped;
}

SymmetricEigen RequirePositiveDefinite(const Matrix& m,
                                             const char* what) {
  SymmetricEigen eig = EigenSym(m);
  const double lmax = eig.values.maxCoeff();
  if (!(lmax > 0.0) || !(eig.values.minCoeff() > kEigenClamp * lmax)) {
    std::ostringstream msg;
    msg << what << ": matrix is not strictly positive definite (eigenvalues "
        << eig.values.minCoeff() << " .. " << lmax << ")";
    throw NumericError(msg.str());
  }
  return eig;
}

}  // namespace

bool IsSymmetric(const Matrix& m, double rel_tol) {
  if (m.rows() != m.cols()) return false;
  const double scale = MaxAbs(m);
  return MaxAbs(m - m.transpose()) <= rel_tol * scale;
}

SymmetricEigen EigenSym(const Matrix& m) {
  if (m.rows() != m.cols() || m.rows() == 0) {
    throw std::invalid_argument("EigenSym: matrix must be square, non-empty");
  }
  if (!m.allFinite()) {
    throw NumericError("EigenSym: matrix has non-finite entries");
  }
  if (!IsSymmetric(m)) {
    throw std::invalid_argument("EigenSym: matrix is not symmetric");
  }
  const Matrix sym = 0.5 * (m + m.transpose());
  Eigen::SelfAdjointEigenSolver<Matrix> solver(sym);
  if (solver.info() != Eigen::Success) {
    throw NumericError("EigenSym: eigendecomposition did not converge");
  }
  return {solver.eigenvalues(), solver.eigenvectors()};
}

bool IsPositiveDefinite(const Matrix& m) {
  if (m.rows() != m.cols() || m.rows() == 0 || !m.allFinite() ||
      !IsSymmetric(m)) {
    return false;
  }
  Eigen::SelfAdjointEigenSolver<Matrix> solver(0.5 * (m + m.transpose()),
                                               Eigen::EigenvaluesOnly);
  const double lmax = solver.eigenvalues().maxCoeff();
  return lmax > 0.0 && solver.eigenvalues().minCoeff() > kEigenClamp * lmax;
}

Matrix MatrixSqrtSym(const Matrix& m) {
  const SymmetricEigen eig = EigenSym(m);
  const Vector lambda = ClampedEigenvalues(eig, "MatrixSqrtSym");
  return eig.vectors * lambda.cwiseSqrt().asDiagonal() *
         eig.vectors.transpose();
}

Matrix InverseSqrtSym(const Matrix& m) {
  const SymmetricEigen eig = RequirePositiveDefinite(m, "InverseSqrtSym");
  return eig.vectors * eig.values.cwiseSqrt().cwiseInverse().asDiagonal() *
         eig.vectors.transpose();
}

Matrix InverseSym(const Matrix& m) {
  const SymmetricEigen eig = RequirePositiveDefinite(m, "InverseSym");
  return eig.vectors * eig.values.cwiseInverse().asDiagonal() *
         eig.vectors.transpose();
}

double LogDetSym(const Matrix& m) {
  const SymmetricEigen eig = RequirePositiveDefinite(m, "LogDetSym");
  return eig.values.array().log().sum();
}

Matrix PsdProject(const Matrix& m) {
  if (m.rows() != m.cols()) {
    throw std::invalid_argument("PsdProject: matrix must be square");
  }
  const Matrix sym = 0.5 * (m + m.transpose());
  Eigen::SelfAdjointEigenSolver<Matrix> solver(sym);
  if (solver.info() != Eigen::Success) {
    throw NumericError("PsdProject: eigendecomposition did not converge");
  }
  if (solver.eigenvalues().minCoeff() >= 0.0) return sym;
  const Vector clipped = solver.eigenvalues().cwiseMax(0.0);
  Matrix out = solver.eigenvectors() * clipped.asDiagonal() *
               solver.eigenvectors().transpose();
  return 0.5 * (out + out.transpose());
}

Matrix PsdFactor(const Matrix& m) {
  const SymmetricEigen eig = EigenSym(m);
  const Vector lambda = ClampedEigenvalues(eig, "PsdFactor");
  return eig.vectors * lambda.cwiseSqrt().asDiagonal();
}

double GaussianTailQ(double v) { return 0.5 * std::erfc(v / std::sqrt(2.0)); }

std::uint64_t DeriveSeed(std::uint64_t root, std::uint64_t stream) {
  auto mix = [](std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  };
  return mix(mix(root) ^ (stream * 0xd1b54a32d192ed03ULL + 1));
}

Vector SampleGaussian(const Vector& mean, const Matrix& factor,
                      std::mt19937_64& rng) {
  std::normal_distribution<double> normal;
  Vector z(factor.cols());
  for (Eigen::Index i = 0; i < z.size(); ++i) z[i] = normal(rng);
  return mean + factor * z;
}

}  // namespace classdp
