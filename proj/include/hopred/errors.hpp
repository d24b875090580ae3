#pragma once

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>

namespace hopred {

enum class errc {
  // model validation / input
  non_positive_forward_rate,
  negative_backward_rate,
  empty_model,
  non_positive_step,
  non_positive_scale,
  parse_error,
  schema_error,
  invalid_argument,
  degenerate_horizon,
  // numerical failures
  overflow,
  singular_system,
  quadrature_failure,
  non_convergent,
  simulation_cap_exceeded,
  // reduction
  no_real_factorization,
};

const char* errc_name(errc c);

/// Error with a machine-readable code; validation errors carry the offending
/// rate index, schema errors the field name (in what()).
class Error : public std::runtime_error {
 public:
  Error(errc code, const std::string& message)
      : std::runtime_error(std::string(errc_name(code)) + ": " + message), code_(code) {}
  Error(errc code, const std::string& message, std::size_t index)
      : std::runtime_error(std::string(errc_name(code)) + ": " + message + " (index " +
                           std::to_string(index) + ")"),
        code_(code),
        index_(index) {}

  errc code() const noexcept { return code_; }
  std::optional<std::size_t> index() const noexcept { return index_; }

 private:
  errc code_;
  std::optional<std::size_t> index_;
};

}  // namespace hopred
