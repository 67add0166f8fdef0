#include "mean/dropout.hpp"

#include <sstream>
#include <stdexcept>
#include <vector>

#include "mean/errors.hpp"
#include "mean/ops.hpp"

namespace mean {

std::string rng_state(const Rng& rng) {
  std::ostringstream os;
  os << rng;
  return os.str();
}

void restore_rng_state(Rng& rng, const std::string& state) {
  std::istringstream is(state);
  is >> rng;
  if (!is) throw ParseError("invalid random engine state");
}

Tensor apply_dropout(const Tensor& x, double rate, Rng& rng, Mode mode) {
  if (!(rate >= 0.0 && rate < 1.0)) {
    throw std::invalid_argument("dropout rate must lie in [0,1), got " + std::to_string(rate));
  }
  if (mode == Mode::Eval || rate == 0.0) return x;
  std::bernoulli_distribution keep(1.0 - rate);
  std::vector<double> mask(x.size());
  for (auto& m : mask) m = keep(rng) ? 1.0 : 0.0;
  return apply_mask(x, mask, 1.0 / (1.0 - rate));
}

}  // namespace mean
