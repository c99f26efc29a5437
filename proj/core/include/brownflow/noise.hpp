// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

namespace brownflow {

// Uniform grid on [t_start, t_start + n_steps * dt].
struct TimeGrid {
  double t_start = 0.0;
  double dt = 1.0;
  std::size_t n_steps = 0;

  double time_at(std::size_t k) const { return t_start + static_cast<double>(k) * dt; }
  double t_end() const { return time_at(n_steps); }
  double duration() const { return static_cast<double>(n_steps) * dt; }

  bool operator==(const TimeGrid&) const = default;
};

struct GridFit {
  TimeGrid grid;
  // requested t_end minus grid.t_end()
  double remainder = 0.0;
};

GridFit make_grid(double t_start, double t_end, double dt);

enum class StreamKind : std::uint32_t { w_plus = 0, w_minus = 1, aux = 2, control = 3 };

struct StreamLabel {
  StreamKind kind = StreamKind::w_plus;
  std::uint32_t index = 0;

  static constexpr StreamLabel plus() { return {StreamKind::w_plus, 0}; }
  static constexpr StreamLabel minus() { return {StreamKind::w_minus, 0}; }
  static constexpr StreamLabel aux(std::uint32_t j) { return {StreamKind::aux, j}; }
  // Internal randomness of samplers (bridge splits, uniforms).
  static constexpr StreamLabel control(std::uint32_t j) { return {StreamKind::control, j}; }

  std::uint64_t key() const {
    return (static_cast<std::uint64_t>(kind) << 32) | index;
  }
  std::string to_string() const;

  auto operator<=>(const StreamLabel&) const = default;
};

// All increments and lattice positions are integer multiples of this.
// Sums of lattice values below 2^12 in magnitude are exact in double.
inline constexpr double kLattice = 0x1p-40;
inline constexpr double kLatticeRange = 0x1p12;

double to_lattice(double x);

std::uint64_t mix_seed(std::uint64_t a, std::uint64_t b);
std::uint64_t stream_seed(std::uint64_t seed, StreamLabel label);
// Seed of replica r in a family rooted at `seed`.
std::uint64_t replica_seed(std::uint64_t seed, std::uint64_t replica);

// Sequential N(0, dt) increments of one labeled substream.
class IncrementStream {
 public:
  IncrementStream(std::uint64_t seed, StreamLabel label, double dt);
  ~IncrementStream();
  IncrementStream(IncrementStream&&) noexcept;
  IncrementStream& operator=(IncrementStream&&) noexcept;

  double next();
  // Lattice-rounded N(0, variance); used for bridge refinement.
  double gaussian(double variance);
  double uniform();
  void fill(std::span<double> out);

  double dt() const { return dt_; }

 private:
  struct Engine;
  Engine* engine_;
  double dt_;
  double scale_;
};

class NoiseBundle {
 public:
  NoiseBundle() = default;
  NoiseBundle(TimeGrid grid, std::uint64_t seed, std::vector<StreamLabel> labels,
              std::vector<std::vector<double>> streams);

  const TimeGrid& grid() const { return grid_; }
  std::uint64_t seed() const { return seed_; }
  const std::vector<StreamLabel>& labels() const { return labels_; }

  bool has(StreamLabel label) const;
  // Throws std::out_of_range for a missing label.
  std::span<const double> increments(StreamLabel label) const;

  bool operator==(const NoiseBundle&) const = default;

 private:
  TimeGrid grid_;
  std::uint64_t seed_ = 0;
  std::vector<StreamLabel> labels_;
  std::vector<std::vector<double>> streams_;
};

NoiseBundle sample_bundle(const TimeGrid& grid, std::span<const StreamLabel> labels,
                          std::uint64_t seed);

std::vector<double> cumulate(std::span<const double> stream);

// Little-endian dump: seed u64, dt f64, n_steps u64, label count u64,
// labels as (kind u32, index u32), then one f64 array per label.
void write_bundle(std::ostream& out, const NoiseBundle& bundle);
// The dump carries no t_start; the caller supplies it.
NoiseBundle read_bundle(std::istream& in, double t_start = 0.0);

enum class CovarianceKind { c_pm, c_plus };

inline double e_plus(double x) { return x > 0.0 ? 1.0 : 0.0; }
inline double e_minus(double x) { return x < 0.0 ? 1.0 : 0.0; }

inline double covariance(CovarianceKind kind, double x, double y) {
  const double pp = e_plus(x) * e_plus(y);
  return kind == CovarianceKind::c_pm ? pp + e_minus(x) * e_minus(y) : pp;
}

std::string to_string(CovarianceKind kind);

}  // namespace brownflow
