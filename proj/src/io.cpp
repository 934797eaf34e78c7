#include "nsm/io.hpp"

#include <atomic>
#include <bit>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstring>
#include <fstream>
#include <sstream>

static_assert(std::endian::native == std::endian::little,
              "vecs readers assume a little-endian host");

namespace nsm {

namespace {

std::ifstream open_input(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in)
    raise(errc::io_failure, "cannot open '" + path.string() + "' for reading");
  return in;
}

// Generic vecs reader; Validate checks one payload element.
template <typename T, typename Validate>
void read_vecs(const std::filesystem::path& path, std::size_t& rows,
               std::size_t& cols, std::vector<T>& values, Validate&& validate) {
  auto in = open_input(path);
  rows = 0;
  cols = 0;
  values.clear();
  for (;;) {
    std::int32_t dim = 0;
    in.read(reinterpret_cast<char*>(&dim), sizeof(dim));
    if (in.gcount() == 0 && in.eof()) break;
    if (in.gcount() != sizeof(dim))
      raise(errc::truncated_record,
            "'" + path.string() + "': truncated dimension field");
    if (dim <= 0)
      raise(errc::non_positive_dim, "'" + path.string() + "': record dimension " +
                                        std::to_string(dim));
    if (rows == 0) {
      cols = static_cast<std::size_t>(dim);
    } else if (static_cast<std::size_t>(dim) != cols) {
      raise(errc::inconsistent_dim,
            "'" + path.string() + "': record " + std::to_string(rows) + " has dim " +
                std::to_string(dim) + ", expected " + std::to_string(cols));
    }
    const std::size_t offset = values.size();
    values.resize(offset + cols);
    in.read(reinterpret_cast<char*>(values.data() + offset),
            static_cast<std::streamsize>(cols * sizeof(T)));
    if (static_cast<std::size_t>(in.gcount()) != cols * sizeof(T))
      raise(errc::truncated_record, "'" + path.string() + "': truncated record " +
                                        std::to_string(rows));
    for (std::size_t i = offset; i < values.size(); ++i) validate(values[i]);
    ++rows;
  }
}

std::filesystem::path temp_sibling(const std::filesystem::path& path) {
  static std::atomic<std::uint64_t> counter{0};
  const auto stamp =
      std::chrono::steady_clock::now().time_since_epoch().count();
  std::ostringstream name;
  name << path.filename().string() << ".tmp-" << stamp << "-"
       << counter.fetch_add(1);
  return path.parent_path() / name.str();
}

}  // namespace

FloatMatrix read_fvecs(const std::filesystem::path& path) {
  FloatMatrix matrix;
  read_vecs<float>(path, matrix.rows, matrix.cols, matrix.values, [&](float v) {
    if (!std::isfinite(v))
      raise(errc::non_finite_value,
            "'" + path.string() + "' contains a non-finite value");
  });
  return matrix;
}

void write_fvecs(const std::filesystem::path& path, const FloatMatrix& matrix) {
  atomic_write_file(path, [&](std::ostream& out) {
    const std::int32_t dim = static_cast<std::int32_t>(matrix.cols);
    for (std::size_t r = 0; r < matrix.rows; ++r) {
      out.write(reinterpret_cast<const char*>(&dim), sizeof(dim));
      out.write(reinterpret_cast<const char*>(matrix.row(r).data()),
                static_cast<std::streamsize>(matrix.cols * sizeof(float)));
    }
  });
}

IntTable read_ivecs(const std::filesystem::path& path) {
  IntTable table;
  read_vecs<std::int32_t>(path, table.rows, table.cols, table.values,
                          [&](std::int32_t v) {
                            if (v < 0)
                              raise(errc::negative_id,
                                    "'" + path.string() + "' contains negative id " +
                                        std::to_string(v));
                          });
  return table;
}

void write_ivecs(const std::filesystem::path& path, const IntTable& table) {
  atomic_write_file(path, [&](std::ostream& out) {
    const std::int32_t dim = static_cast<std::int32_t>(table.cols);
    for (std::size_t r = 0; r < table.rows; ++r) {
      out.write(reinterpret_cast<const char*>(&dim), sizeof(dim));
      out.write(reinterpret_cast<const char*>(table.row(r).data()),
                static_cast<std::streamsize>(table.cols * sizeof(std::int32_t)));
    }
  });
}

IntTable neighbor_ids_table(const NeighborTable& table) {
  IntTable out(table.num_points, table.k);
  for (std::size_t i = 0; i < table.ids.size(); ++i)
    out.values[i] = static_cast<std::int32_t>(table.ids[i]);
  return out;
}

NeighborTable neighbor_table_from_ids(const IntTable& table, NeighborSource source) {
  NeighborTable out;
  out.num_points = table.rows;
  out.k = table.cols;
  out.ids.resize(table.values.size());
  for (std::size_t i = 0; i < table.values.size(); ++i)
    out.ids[i] = static_cast<std::uint32_t>(table.values[i]);
  out.source = source;
  return out;
}

std::vector<std::uint32_t> assignment_from_table(const IntTable& table) {
  if (table.rows != 1 && table.cols != 1)
    raise(errc::bad_params,
          "assignment table must be m x 1 or 1 x m, got " +
              std::to_string(table.rows) + " x " + std::to_string(table.cols));
  std::vector<std::uint32_t> assignment(table.values.size());
  for (std::size_t i = 0; i < table.values.size(); ++i)
    assignment[i] = static_cast<std::uint32_t>(table.values[i]);
  return assignment;
}

IntTable assignment_table(const std::vector<std::uint32_t>& assignment) {
  IntTable out(assignment.size(), 1);
  for (std::size_t i = 0; i < assignment.size(); ++i)
    out.values[i] = static_cast<std::int32_t>(assignment[i]);
  return out;
}

void atomic_write_file(const std::filesystem::path& path,
                       const std::function<void(std::ostream&)>& writer) {
  const auto temp = temp_sibling(path);
  {
    std::ofstream out(temp, std::ios::binary | std::ios::trunc);
    if (!out) {
      raise(errc::io_failure, "cannot open '" + temp.string() + "' for writing");
    }
    try {
      writer(out);
      out.flush();
      if (!out) raise(errc::io_failure, "write to '" + temp.string() + "' failed");
    } catch (...) {
      out.close();
      std::error_code ec;
      std::filesystem::remove(temp, ec);
      throw;
    }
  }
  std::error_code ec;
  std::filesystem::rename(temp, path, ec);
  if (ec) {
    std::error_code ignore;
    std::filesystem::remove(temp, ignore);
    raise(errc::io_failure,
          "cannot rename temp file onto '" + path.string() + "': " + ec.message());
  }
}

std::string format_double(double value) {
  char buffer[64];
  const auto [ptr, ec] =
      std::to_chars(buffer, buffer + sizeof(buffer), value);
  if (ec != std::errc())
    raise(errc::io_failure, "failed to format a double");
  return std::string(buffer, ptr);
}

void write_csv(const std::filesystem::path& path, const CsvTable& table) {
  atomic_write_file(path, [&](std::ostream& out) {
    for (std::size_t i = 0; i < table.header.size(); ++i) {
      if (i) out << ',';
      out << table.header[i];
    }
    out << '\n';
    for (const auto& row : table.rows) {
      for (std::size_t i = 0; i < row.size(); ++i) {
        if (i) out << ',';
        out << row[i];
      }
      out << '\n';
    }
  });
}

CsvTable read_csv(const std::filesystem::path& path) {
  auto in = open_input(path);
  CsvTable table;
  std::string line;
  auto split = [](const std::string& text) {
    std::vector<std::string> fields;
    std::size_t start = 0;
    for (;;) {
      const std::size_t comma = text.find(',', start);
      if (comma == std::string::npos) {
        fields.push_back(text.substr(start));
        break;
      }
      fields.push_back(text.substr(start, comma - start));
      start = comma + 1;
    }
    return fields;
  };
  bool first = true;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (first) {
      table.header = split(line);
      first = false;
    } else {
      auto fields = split(line);
      if (fields.size() != table.header.size())
        raise(errc::inconsistent_dim,
              "'" + path.string() + "': row width differs from header");
      table.rows.push_back(std::move(fields));
    }
  }
  if (first) raise(errc::truncated_record, "'" + path.string() + "' has no header");
  return table;
}

}  // namespace nsm
