#pragma once

#include <stdexcept>
#include <string>

namespace nsm {

/// Machine-readable error codes surfaced by every module. The CLI maps
/// format-class codes to exit 3 and the rest to exit 4.
enum class errc {
  // core
  zero_vector,
  dim_mismatch,
  invalid_dataset,
  // neighbors
  k_too_large,
  // clustering
  too_many_clusters,
  // stability
  empty_set,
  missing_rows,
  all_clusters_empty,
  radius_too_large,
  too_large,
  // baselines
  fewer_than_two_clusters,
  degenerate_diameter_zero,
  coincident_centroids,
  // ivf
  bad_probe_count,
  // stats
  length_mismatch,
  too_short,
  unknown_measure,
  empty_input,
  // generic preconditions
  bad_params,
  // io (format class)
  truncated_record,
  inconsistent_dim,
  non_positive_dim,
  negative_id,
  non_finite_value,
  io_failure,
};

const char* errc_name(errc code) noexcept;

/// True for codes describing malformed input files rather than
/// degenerate or out-of-range in-memory inputs.
bool is_format_error(errc code) noexcept;

class Error : public std::runtime_error {
 public:
  Error(errc code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  errc code() const noexcept { return code_; }
  const char* code_name() const noexcept { return errc_name(code_); }

 private:
  errc code_;
};

[[noreturn]] inline void raise(errc code, const std::string& message) {
  throw Error(code, message);
}

}  // namespace nsm
