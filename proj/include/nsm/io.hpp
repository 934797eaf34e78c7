#pragma once

#include <filesystem>
#include <functional>
#include <string>
#include <vector>

#include "nsm/types.hpp"

namespace nsm {

/// fvecs: per vector a little-endian int32 dimension then that many
/// little-endian float32 values, repeated to EOF; every record must have
/// the same dimension and finite payload.
FloatMatrix read_fvecs(const std::filesystem::path& path);
void write_fvecs(const std::filesystem::path& path, const FloatMatrix& matrix);

/// ivecs: same framing with int32 payload; negative entries are rejected
/// (ids, assignments and ground truth are all nonnegative).
IntTable read_ivecs(const std::filesystem::path& path);
void write_ivecs(const std::filesystem::path& path, const IntTable& table);

// Conversions between file tables and domain types.
IntTable neighbor_ids_table(const NeighborTable& table);
NeighborTable neighbor_table_from_ids(const IntTable& table,
                                      NeighborSource source = NeighborSource::imported);
/// Accepts an m x 1 or 1 x m layout.
std::vector<std::uint32_t> assignment_from_table(const IntTable& table);
IntTable assignment_table(const std::vector<std::uint32_t>& assignment);

/// Writes via a temp file in the same directory plus an atomic rename,
/// so failed runs never leave partial outputs behind.
void atomic_write_file(const std::filesystem::path& path,
                       const std::function<void(std::ostream&)>& writer);

/// Locale-independent shortest round-trip formatting.
std::string format_double(double value);

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
};

void write_csv(const std::filesystem::path& path, const CsvTable& table);
CsvTable read_csv(const std::filesystem::path& path);

}  // namespace nsm
