// SPDX-License-Identifier: Apache-2.0
#include "brownflow/io.hpp"

#include <cmath>
#include <cstdio>
#include <ostream>
#include <stdexcept>

#include <json.hpp>

namespace brownflow {

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string csv_field(std::string_view s) {
  if (s.find_first_of(",\"\r\n") == std::string_view::npos) return std::string(s);
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

CsvWriter::CsvWriter(std::ostream& out, std::initializer_list<std::string_view> header)
    : out_(out), columns_(header.size()) {
  for (auto h : header) cell(h);
  end_row();
}

CsvWriter::CsvWriter(std::ostream& out, std::span<const std::string> header)
    : out_(out), columns_(header.size()) {
  for (const auto& h : header) cell(std::string_view(h));
  end_row();
}

void CsvWriter::sep() {
  if (col_ >= columns_) throw std::logic_error("CsvWriter: too many cells in row");
  if (col_ > 0) out_ << ',';
  ++col_;
}

CsvWriter& CsvWriter::cell(double v) {
  sep();
  out_ << format_double(v);
  return *this;
}

CsvWriter& CsvWriter::cell(std::int64_t v) {
  sep();
  out_ << v;
  return *this;
}

CsvWriter& CsvWriter::cell(std::uint64_t v) {
  sep();
  out_ << v;
  return *this;
}

CsvWriter& CsvWriter::cell(std::string_view s) {
  sep();
  out_ << csv_field(s);
  return *this;
}

void CsvWriter::end_row() {
  if (col_ != columns_) throw std::logic_error("CsvWriter: short row");
  out_ << "\r\n";
  col_ = 0;
}

void write_trajectory_csv(std::ostream& out, const NPointPath& path) {
  CsvWriter w(out, {"step", "t", "particle_id", "class_id", "position"});
  for (std::size_t k = 0; k < path.n_samples(); ++k) {
    for (std::size_t p = 0; p < path.n_particles; ++p) {
      w.cell(std::uint64_t{k})
          .cell(path.grid.time_at(k))
          .cell(std::uint64_t{p})
          .cell(std::uint64_t{path.class_of(p, k)})
          .cell(path.position(p, k));
      w.end_row();
    }
  }
}

std::string summary_json(const NPointPath& path, std::uint64_t seed) {
  nlohmann::ordered_json j;
  j["seed"] = seed;
  j["dt"] = path.grid.dt;
  j["n_particles"] = path.n_particles;
  nlohmann::ordered_json times = nlohmann::ordered_json::array();
  for (double t : path.coalescence_times) {
    if (std::isfinite(t)) {
      times.push_back(t);
    } else {
      times.push_back(nullptr);
    }
  }
  j["coalescence_times"] = times;
  return j.dump(2);
}

void write_kernel_csv(std::ostream& out, const KernelEstimate& est) {
  CsvWriter w(out, {"replica", "terminal_position"});
  for (std::size_t m = 0; m < est.support.size(); ++m) {
    w.cell(std::uint64_t{m}).cell(est.support[m]);
    w.end_row();
  }
}

}  // namespace brownflow
