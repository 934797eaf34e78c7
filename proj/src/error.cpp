#include "nsm/error.hpp"

namespace nsm {

const char* errc_name(errc code) noexcept {
  switch (code) {
    case errc::zero_vector: return "zero_vector";
    case errc::dim_mismatch: return "dim_mismatch";
    case errc::invalid_dataset: return "invalid_dataset";
    case errc::k_too_large: return "k_too_large";
    case errc::too_many_clusters: return "too_many_clusters";
    case errc::empty_set: return "empty_set";
    case errc::missing_rows: return "missing_rows";
    case errc::all_clusters_empty: return "all_clusters_empty";
    case errc::radius_too_large: return "radius_too_large";
    case errc::too_large: return "too_large";
    case errc::fewer_than_two_clusters: return "fewer_than_two_clusters";
    case errc::degenerate_diameter_zero: return "degenerate_diameter_zero";
    case errc::coincident_centroids: return "coincident_centroids";
    case errc::bad_probe_count: return "bad_probe_count";
    case errc::length_mismatch: return "length_mismatch";
    case errc::too_short: return "too_short";
    case errc::unknown_measure: return "unknown_measure";
    case errc::empty_input: return "empty_input";
    case errc::bad_params: return "bad_params";
    case errc::truncated_record: return "truncated_record";
    case errc::inconsistent_dim: return "inconsistent_dim";
    case errc::non_positive_dim: return "non_positive_dim";
    case errc::negative_id: return "negative_id";
    case errc::non_finite_value: return "non_finite_value";
    case errc::io_failure: return "io_failure";
  }
  return "unknown";
}

bool is_format_error(errc code) noexcept {
  switch (code) {
    case errc::truncated_record:
    case errc::inconsistent_dim:
    case errc::non_positive_dim:
    case errc::negative_id:
    case errc::non_finite_value:
    case errc::io_failure:
      return true;
    default:
      return false;
  }
}

}  // namespace nsm
