#include "mlep/error.hpp"

#include <sstream>
#include <utility>

namespace mlep {

namespace {

std::string divergence_message(std::size_t step, double value) {
  std::ostringstream os;
  os << "simulation diverged at step " << step << " (state = " << value
     << "); parameter may be non-ergodic";
  return os.str();
}

std::string with_matrix(const std::string& what, const Eigen::MatrixXd& m) {
  std::ostringstream os;
  const Eigen::IOFormat fmt(Eigen::StreamPrecision, Eigen::DontAlignCols, ", ",
                            "; ", "", "", "[", "]");
  os << what << ": " << m.format(fmt);
  return os.str();
}

}  // namespace

DivergenceError::DivergenceError(std::size_t step, double value)
    : Error(divergence_message(step, value)), step_(step) {}

DegenerateInformationError::DegenerateInformationError(const std::string& what,
                                                       Eigen::MatrixXd matrix)
    : Error(with_matrix(what, matrix)), matrix_(std::move(matrix)) {}

}  // namespace mlep
