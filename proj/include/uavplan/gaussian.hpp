#pragma once

#include <cmath>

#include <Eigen/Cholesky>
#include <Eigen/Core>
#include <Eigen/Eigenvalues>

#include "uavplan/errors.hpp"

namespace uavplan {

/// Multivariate normal N(mean, covariance) of fixed dimension.
template <typename Scalar, int Dim>
struct Gaussian {
  using Vector = Eigen::Matrix<Scalar, Dim, 1>;
  using Matrix = Eigen::Matrix<Scalar, Dim, Dim>;

  Vector mean = Vector::Zero();
  Matrix covariance = Matrix::Zero();

  static Gaussian zero() { return {}; }
};

/// Belief over (cumulative sum-rate [bit/s], elapsed mission time [s]).
using GaussianBelief = Gaussian<double, 2>;

/// Symmetric with nonnegative eigenvalues, up to a relative tolerance.
template <typename Scalar, int Dim>
bool is_psd(const Eigen::Matrix<Scalar, Dim, Dim>& m) {
  const Scalar scale = std::max<Scalar>(Scalar(1e-300), m.cwiseAbs().maxCoeff());
  if (((m - m.transpose()).cwiseAbs().maxCoeff()) > Scalar(1e-9) * scale) return false;
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix<Scalar, Dim, Dim>> es(m, Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff() >= -Scalar(1e-12) * scale;
}

/// Kalman time update for x' = x + u + eta, eta ~ N(0, Q).
template <typename Scalar, int Dim>
Gaussian<Scalar, Dim> kalman_time_update(const Gaussian<Scalar, Dim>& b,
                                         const Eigen::Matrix<Scalar, Dim, 1>& control,
                                         const Eigen::Matrix<Scalar, Dim, Dim>& process_cov) {
  if (!is_psd(b.covariance)) throw NumericError("kalman predict: covariance is not PSD");
  Gaussian<Scalar, Dim> out;
  out.mean = b.mean + control;
  out.covariance = b.covariance + process_cov;
  return out;
}

/// Predicted observation z = x + nu, nu ~ N(0, R).
template <typename Scalar, int Dim>
Gaussian<Scalar, Dim> observe(const Gaussian<Scalar, Dim>& b,
                              const Eigen::Matrix<Scalar, Dim, Dim>& measurement_cov) {
  return {b.mean, b.covariance + measurement_cov};
}

namespace detail {

template <typename Scalar, int Dim>
Eigen::Matrix<Scalar, Dim, Dim> with_jitter(const Eigen::Matrix<Scalar, Dim, Dim>& m,
                                            Scalar rel) {
  const Scalar tr = m.trace();
  const Scalar eps = tr > Scalar(0) ? rel * tr : rel;
  return m + eps * Eigen::Matrix<Scalar, Dim, Dim>::Identity(m.rows(), m.cols());
}

}  // namespace detail

/// Closed-form Bhattacharyya distance between two Gaussians:
///   1/8 d^T S^-1 d + 1/2 ln(det S / sqrt(det S1 det S2)),  S = (S1 + S2) / 2.
/// Singular covariances receive a 1e-12 * trace jitter; a second failure
/// throws NumericError.
template <typename Scalar, int Dim>
Scalar bhattacharyya_distance(const Gaussian<Scalar, Dim>& a, const Gaussian<Scalar, Dim>& b) {
  using Matrix = Eigen::Matrix<Scalar, Dim, Dim>;
  Matrix s1 = a.covariance;
  Matrix s2 = b.covariance;
  for (int attempt = 0; attempt < 2; ++attempt) {
    const Matrix avg = (s1 + s2) / Scalar(2);
    Eigen::LLT<Matrix> llt_avg(avg), llt1(s1), llt2(s2);
    if (llt_avg.info() == Eigen::Success && llt1.info() == Eigen::Success &&
        llt2.info() == Eigen::Success) {
      const auto diff = (a.mean - b.mean).eval();
      const Scalar maha = diff.dot(llt_avg.solve(diff));
      // log det from Cholesky factors: 2 sum log diag(L).
      auto logdet = [](const Eigen::LLT<Matrix>& f) {
        return Scalar(2) * f.matrixLLT().diagonal().array().log().sum();
      };
      const Scalar d = maha / Scalar(8) +
                       Scalar(0.5) * (logdet(llt_avg) - Scalar(0.5) * (logdet(llt1) + logdet(llt2)));
      if (!std::isfinite(d)) break;
      return std::max(d, Scalar(0));
    }
    s1 = detail::with_jitter(s1, Scalar(1e-12));
    s2 = detail::with_jitter(s2, Scalar(1e-12));
  }
  throw NumericError("bhattacharyya_distance: covariance singular after jitter");
}

}  // namespace uavplan
