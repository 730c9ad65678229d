#include "mlep/rng.hpp"

#include <cmath>

namespace mlep {

double standard_normal(Rng& rng) {
  // One variate per accepted pair; the second is discarded so that every
  // draw consumes an independent, self-contained slice of the stream.
  for (;;) {
    const double u = 2.0 * uniform_open(rng) - 1.0;
    const double v = 2.0 * uniform_open(rng) - 1.0;
    const double s = u * u + v * v;
    if (s > 0.0 && s < 1.0) return u * std::sqrt(-2.0 * std::log(s) / s);
  }
}

}  // namespace mlep
