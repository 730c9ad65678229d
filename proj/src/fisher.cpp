#include "mlep/fisher.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "mlep/error.hpp"

namespace mlep {

std::string_view to_string(FisherMethod method) {
  switch (method) {
    case FisherMethod::Observed: return "observed";
    case FisherMethod::PlugIn: return "plugin";
    case FisherMethod::Factorized: return "factorized";
  }
  return "observed";
}

FisherMethod fisher_method_from_string(std::string_view name) {
  if (name == "observed") return FisherMethod::Observed;
  if (name == "plugin") return FisherMethod::PlugIn;
  if (name == "factorized") return FisherMethod::Factorized;
  throw std::invalid_argument("unknown Fisher method '" + std::string(name) +
                              "' (expected observed, plugin, factorized)");
}

double i_g(const NoiseDensity& noise) {
  const auto integrand = [&](double u) {
    const double g = noise.density(u);
    if (g == 0.0) return 0.0;
    const double psi = noise.score(u);
    const double value = psi * psi * g;
    if (!std::isfinite(value))
      throw NumericalError("I_g integrand is not finite at u = " + std::to_string(u));
    return value;
  };
  using Quadrature = boost::math::quadrature::gauss_kronrod<double, 61>;
  const double result =
      Quadrature::integrate(integrand, noise.support_lower, noise.support_upper, 15, 1e-12);
  if (!(result > 0.0) || !std::isfinite(result))
    throw NumericalError("I_g quadrature did not produce a positive finite value");
  return result;
}

Matrix fisher_term(FisherMethod method, const Vector& theta, double x_prev, double x_next,
                   const ModelSpec& model, double noise_information) {
  switch (method) {
    case FisherMethod::Observed: return -ell_ddot(theta, x_prev, x_next, model);
    case FisherMethod::PlugIn: {
      const Vector d = ell_dot(theta, x_prev, x_next, model);
      return d * d.transpose();
    }
    case FisherMethod::Factorized: {
      const Vector ds = model.drift.gradient(theta, x_prev);
      return noise_information * (ds * ds.transpose());
    }
  }
  throw std::logic_error("fisher_term: unreachable");
}

FisherMatrix make_fisher_matrix(Matrix average, FisherMethod method, std::size_t sample_size) {
  Matrix sym = 0.5 * (average + average.transpose());
  if (!sym.allFinite())
    throw DegenerateInformationError("Fisher information is not finite", std::move(sym));
  const Eigen::SelfAdjointEigenSolver<Matrix> eig(sym, Eigen::EigenvaluesOnly);
  if (!(eig.eigenvalues().minCoeff() > 0.0))
    throw DegenerateInformationError(
        std::string(to_string(method)) + " Fisher information is not positive-definite over " +
            std::to_string(sample_size) + " transitions",
        std::move(sym));
  return FisherMatrix{std::move(sym), method, sample_size};
}

FisherMatrix estimate_fisher(FisherMethod method, const Vector& theta, const Trajectory& traj,
                             const ScoreWindow& window, const ModelSpec& model) {
  validate(window, traj);
  if (window.length() < static_cast<std::size_t>(model.dim()))
    throw std::invalid_argument("Fisher estimate needs a window of at least d transitions");
  const double ig = method == FisherMethod::Factorized ? i_g(model.noise) : 0.0;
  Matrix sum = Matrix::Zero(model.dim(), model.dim());
  for (std::size_t j = window.start; j <= window.end; ++j)
    sum += fisher_term(method, theta, traj[j - 1], traj[j], model, ig);
  return make_fisher_matrix(sum / static_cast<double>(window.length()), method, window.length());
}

FisherMatrix observed_fisher(const Vector& theta, const Trajectory& traj, const ScoreWindow& window,
                             const ModelSpec& model) {
  return estimate_fisher(FisherMethod::Observed, theta, traj, window, model);
}

FisherMatrix plugin_fisher(const Vector& theta, const Trajectory& traj, const ScoreWindow& window,
                           const ModelSpec& model) {
  return estimate_fisher(FisherMethod::PlugIn, theta, traj, window, model);
}

FisherMatrix factorized_fisher(const Vector& theta, const Trajectory& traj,
                               const ScoreWindow& window, const ModelSpec& model) {
  return estimate_fisher(FisherMethod::Factorized, theta, traj, window, model);
}

Matrix invert(const FisherMatrix& fm) {
  const Matrix& a = fm.matrix;
  if (a.rows() != a.cols() || a.rows() == 0)
    throw std::invalid_argument("invert: Fisher matrix must be square and non-empty");
  const double scale = std::max(a.cwiseAbs().maxCoeff(), 1.0);
  if ((a - a.transpose()).cwiseAbs().maxCoeff() > 1e-12 * scale)
    throw DegenerateInformationError("Fisher matrix is not symmetric", a);

  const Eigen::SelfAdjointEigenSolver<Matrix> eig(a, Eigen::EigenvaluesOnly);
  const double lo = eig.eigenvalues().minCoeff();
  const double hi = eig.eigenvalues().maxCoeff();
  if (!(lo > 0.0)) throw DegenerateInformationError("Fisher matrix is not positive-definite", a);
  if (hi / lo > kMaxConditionNumber)
    throw DegenerateInformationError("Fisher matrix condition number " + std::to_string(hi / lo) +
                                         " exceeds limit",
                                     a);

  const Eigen::LLT<Matrix> llt(a);
  if (llt.info() != Eigen::Success)
    throw DegenerateInformationError("Cholesky factorization failed", a);
  Matrix inv = llt.solve(Matrix::Identity(a.rows(), a.cols()));
  return 0.5 * (inv + inv.transpose());
}

nlohmann::json to_json(const FisherMatrix& fm) {
  std::vector<double> row_major;
  row_major.reserve(static_cast<std::size_t>(fm.matrix.size()));
  for (Eigen::Index r = 0; r < fm.matrix.rows(); ++r)
    for (Eigen::Index c = 0; c < fm.matrix.cols(); ++c) row_major.push_back(fm.matrix(r, c));
  return {{"method", to_string(fm.method)},
          {"sample_size", fm.sample_size},
          {"rows", fm.matrix.rows()},
          {"matrix", row_major}};
}

}  // namespace mlep
