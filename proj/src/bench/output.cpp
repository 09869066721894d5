#include <charconv>
#include <cmath>
#include <fstream>

#include "dgflow/bench.hpp"
#include "dgflow/error.hpp"

namespace dgflow::bench {

namespace {

void write_rows(std::ostream& out, const Table& t, bool header) {
  auto line = [&](const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) out << (i ? "," : "") << cells[i];
    out << '\n';
  };
  if (header) line(t.header);
  for (const auto& r : t.rows) {
    if (r.size() != t.header.size()) throw Error(ErrorCode::InvalidArgument, "table row width differs from header");
    line(r);
  }
}

std::ofstream open(const std::filesystem::path& path, std::ios::openmode mode) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, mode);
  if (!out) throw Error(ErrorCode::Io, "cannot write " + path.string());
  return out;
}

}  // namespace

std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[40];
  auto [p, ec] = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::scientific, 5);
  return std::string(buf, p);
}

void write_table(const Table& t, const std::filesystem::path& path) {
  auto out = open(path, std::ios::out | std::ios::trunc);
  write_rows(out, t, true);
  if (!out) throw Error(ErrorCode::Io, "write failed: " + path.string());
}

void append_table(const Table& t, const std::filesystem::path& path) {
  const bool fresh = !std::filesystem::exists(path) || std::filesystem::file_size(path) == 0;
  auto out = open(path, std::ios::out | std::ios::app);
  write_rows(out, t, fresh);
  if (!out) throw Error(ErrorCode::Io, "write failed: " + path.string());
}

std::vector<std::string> conservation_header() {
  return {"t", "energy", "momentum_x", "momentum_y", "angular_momentum", "l2_error"};
}

void append_log(const ConservationRecord& r, const std::filesystem::path& path) {
  Table t;
  t.header = conservation_header();
  t.rows.push_back({format_number(r.t), format_number(r.energy), format_number(r.momentum.x()),
                    format_number(r.momentum.y()), format_number(r.angular_momentum),
                    r.l2_error ? format_number(*r.l2_error) : std::string()});
  append_table(t, path);
}

}  // namespace dgflow::bench
