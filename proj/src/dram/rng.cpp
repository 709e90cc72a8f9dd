#include "hxdram/dram/rng.hpp"

#include <sstream>
#include <stdexcept>

namespace hxdram::dram {

std::string Rng::save() const {
  std::ostringstream os;
  os.precision(17);
  os << engine_ << ' ' << normal_ << ' ' << uniform_;
  return os.str();
}

void Rng::restore(const std::string& text) {
  std::istringstream is(text);
  std::mt19937_64 engine;
  std::normal_distribution<double> normal;
  std::uniform_real_distribution<double> uniform;
  is >> engine >> normal >> uniform;
  if (!is) throw std::runtime_error("rng: malformed saved state");
  engine_ = engine;
  normal_ = normal;
  uniform_ = uniform;
}

}  // namespace hxdram::dram
