// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <initializer_list>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "brownflow/flow_plus.hpp"
#include "brownflow/flow_pm.hpp"

namespace brownflow {

// Shortest round-trip form with 17 significant digits; "inf", "-inf", "nan".
std::string format_double(double v);

// RFC 4180 quoting when the field needs it.
std::string csv_field(std::string_view s);

class CsvWriter {
 public:
  CsvWriter(std::ostream& out, std::initializer_list<std::string_view> header);
  CsvWriter(std::ostream& out, std::span<const std::string> header);

  CsvWriter& cell(double v);
  CsvWriter& cell(std::int64_t v);
  CsvWriter& cell(std::uint64_t v);
  CsvWriter& cell(std::string_view s);
  void end_row();

 private:
  void sep();
  std::ostream& out_;
  std::size_t columns_;
  std::size_t col_ = 0;
};

// step, t, particle_id, class_id, position
void write_trajectory_csv(std::ostream& out, const NPointPath& path);
// {seed, dt, n_particles, coalescence_times}; never-merged pairs are null
std::string summary_json(const NPointPath& path, std::uint64_t seed);
// replica, terminal_position
void write_kernel_csv(std::ostream& out, const KernelEstimate& est);

}  // namespace brownflow
