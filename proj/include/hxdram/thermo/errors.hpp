#pragma once

#include <optional>
#include <stdexcept>
#include <string>

#include "hxdram/thermo/types.hpp"

namespace hxdram::thermo {

enum class ModelErrc {
  invalid_case,
  temperature_cross,
  infeasible_configuration,
  infeasible_geometry,
  diverged,
};

std::string_view to_string(ModelErrc code);

class ModelError : public std::runtime_error {
 public:
  ModelError(ModelErrc code, const std::string& what)
      : std::runtime_error(what), code_(code) {}

  ModelErrc code() const noexcept { return code_; }

  const std::optional<DesignVector>& design() const noexcept { return design_; }
  // Last fixed-point iterate, set for `diverged`.
  const std::optional<SizingResult>& last_iterate() const noexcept { return last_iterate_; }

  ModelError& attach(const DesignVector& x) {
    design_ = x;
    return *this;
  }
  ModelError& attach(const SizingResult& r) {
    last_iterate_ = r;
    return *this;
  }

 private:
  ModelErrc code_;
  std::optional<DesignVector> design_;
  std::optional<SizingResult> last_iterate_;
};

}  // namespace hxdram::thermo
