// SPDX-License-Identifier: Apache-2.0
#include "brownflow/noise.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <istream>
#include <ostream>
#include <random>
#include <stdexcept>

#include <boost/random/normal_distribution.hpp>
#include <boost/random/uniform_01.hpp>

namespace brownflow {

GridFit make_grid(double t_start, double t_end, double dt) {
  if (!std::isfinite(t_start) || !std::isfinite(t_end) || !std::isfinite(dt)) {
    throw std::invalid_argument("make_grid: non-finite bound or step");
  }
  if (dt <= 0.0) throw std::invalid_argument("make_grid: dt must be positive");
  if (t_end < t_start) throw std::invalid_argument("make_grid: t_end < t_start");
  const double steps = std::round((t_end - t_start) / dt);
  GridFit fit;
  fit.grid = TimeGrid{t_start, dt, static_cast<std::size_t>(steps)};
  fit.remainder = t_end - fit.grid.t_end();
  return fit;
}

std::string StreamLabel::to_string() const {
  switch (kind) {
    case StreamKind::w_plus: return "W_PLUS";
    case StreamKind::w_minus: return "W_MINUS";
    case StreamKind::aux: return "AUX(" + std::to_string(index) + ")";
    case StreamKind::control: return "CONTROL(" + std::to_string(index) + ")";
  }
  return "?";
}

std::string to_string(CovarianceKind kind) {
  return kind == CovarianceKind::c_pm ? "C_PM" : "C_PLUS";
}

double to_lattice(double x) {
  return std::nearbyint(x / kLattice) * kLattice;
}

namespace {

std::uint64_t splitmix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

}  // namespace

std::uint64_t mix_seed(std::uint64_t a, std::uint64_t b) {
  return splitmix64(splitmix64(a) ^ (b * 0xd1342543de82ef95ULL + 0x632be59bd9b4e019ULL));
}

std::uint64_t stream_seed(std::uint64_t seed, StreamLabel label) {
  return mix_seed(seed, label.key());
}

std::uint64_t replica_seed(std::uint64_t seed, std::uint64_t replica) {
  return mix_seed(seed ^ 0x5deece66dULL, replica);
}

struct IncrementStream::Engine {
  std::mt19937_64 gen;
  boost::random::normal_distribution<double> normal;
  boost::random::uniform_01<double> unit;
};

IncrementStream::IncrementStream(std::uint64_t seed, StreamLabel label, double dt)
    : engine_(new Engine{std::mt19937_64(stream_seed(seed, label)),
                           boost::random::normal_distribution<double>(),
                           boost::random::uniform_01<double>()}),
      dt_(dt),
      scale_(std::sqrt(dt)) {
  if (!(dt > 0.0)) {
    delete engine_;
    throw std::invalid_argument("IncrementStream: dt must be positive");
  }
}

IncrementStream::~IncrementStream() { delete engine_; }

IncrementStream::IncrementStream(IncrementStream&& other) noexcept
    : engine_(other.engine_), dt_(other.dt_), scale_(other.scale_) {
  other.engine_ = nullptr;
}

IncrementStream& IncrementStream::operator=(IncrementStream&& other) noexcept {
  if (this != &other) {
    delete engine_;
    engine_ = other.engine_;
    dt_ = other.dt_;
    scale_ = other.scale_;
    other.engine_ = nullptr;
  }
  return *this;
}

double IncrementStream::next() {
  return to_lattice(scale_ * engine_->normal(engine_->gen));
}

double IncrementStream::gaussian(double variance) {
  return to_lattice(std::sqrt(variance) * engine_->normal(engine_->gen));
}

double IncrementStream::uniform() { return engine_->unit(engine_->gen); }

void IncrementStream::fill(std::span<double> out) {
  for (double& v : out) v = to_lattice(scale_ * engine_->normal(engine_->gen));
}

NoiseBundle::NoiseBundle(TimeGrid grid, std::uint64_t seed, std::vector<StreamLabel> labels,
                         std::vector<std::vector<double>> streams)
    : grid_(grid), seed_(seed), labels_(std::move(labels)), streams_(std::move(streams)) {
  if (labels_.size() != streams_.size()) {
    throw std::invalid_argument("NoiseBundle: label and stream counts differ");
  }
  for (const auto& s : streams_) {
    if (s.size() != grid_.n_steps) {
      throw std::invalid_argument("NoiseBundle: stream length differs from n_steps");
    }
  }
}

bool NoiseBundle::has(StreamLabel label) const {
  return std::find(labels_.begin(), labels_.end(), label) != labels_.end();
}

std::span<const double> NoiseBundle::increments(StreamLabel label) const {
  const auto it = std::find(labels_.begin(), labels_.end(), label);
  if (it == labels_.end()) {
    throw std::out_of_range("NoiseBundle: missing stream " + label.to_string());
  }
  return streams_[static_cast<std::size_t>(it - labels_.begin())];
}

NoiseBundle sample_bundle(const TimeGrid& grid, std::span<const StreamLabel> labels,
                          std::uint64_t seed) {
  std::vector<StreamLabel> sorted(labels.begin(), labels.end());
  std::sort(sorted.begin(), sorted.end());
  if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) {
    throw std::invalid_argument("sample_bundle: duplicate stream label");
  }
  std::vector<std::vector<double>> streams;
  streams.reserve(labels.size());
  for (const StreamLabel& label : labels) {
    std::vector<double> inc(grid.n_steps);
    IncrementStream(seed, label, grid.dt).fill(inc);
    streams.push_back(std::move(inc));
  }
  return NoiseBundle(grid, seed, {labels.begin(), labels.end()}, std::move(streams));
}

std::vector<double> cumulate(std::span<const double> stream) {
  std::vector<double> path(stream.size() + 1, 0.0);
  for (std::size_t k = 0; k < stream.size(); ++k) path[k + 1] = path[k] + stream[k];
  return path;
}

namespace {

template <class T>
void put_le(std::ostream& out, T value) {
  auto bits = std::bit_cast<std::array<unsigned char, sizeof(T)>>(value);
  if constexpr (std::endian::native == std::endian::big) std::reverse(bits.begin(), bits.end());
  out.write(reinterpret_cast<const char*>(bits.data()), sizeof(T));
}

template <class T>
T get_le(std::istream& in) {
  std::array<unsigned char, sizeof(T)> bits{};
  in.read(reinterpret_cast<char*>(bits.data()), sizeof(T));
  if (!in) throw std::runtime_error("read_bundle: truncated input");
  if constexpr (std::endian::native == std::endian::big) std::reverse(bits.begin(), bits.end());
  return std::bit_cast<T>(bits);
}

}  // namespace

void write_bundle(std::ostream& out, const NoiseBundle& bundle) {
  put_le<std::uint64_t>(out, bundle.seed());
  put_le<double>(out, bundle.grid().dt);
  put_le<std::uint64_t>(out, bundle.grid().n_steps);
  put_le<std::uint64_t>(out, bundle.labels().size());
  for (const StreamLabel& label : bundle.labels()) {
    put_le<std::uint32_t>(out, static_cast<std::uint32_t>(label.kind));
    put_le<std::uint32_t>(out, label.index);
  }
  for (const StreamLabel& label : bundle.labels()) {
    for (double v : bundle.increments(label)) put_le<double>(out, v);
  }
  if (!out) throw std::runtime_error("write_bundle: stream failure");
}

NoiseBundle read_bundle(std::istream& in, double t_start) {
  const auto seed = get_le<std::uint64_t>(in);
  const auto dt = get_le<double>(in);
  const auto n_steps = get_le<std::uint64_t>(in);
  const auto n_labels = get_le<std::uint64_t>(in);
  if (n_labels > 4096) throw std::runtime_error("read_bundle: implausible label count");
  std::vector<StreamLabel> labels(n_labels);
  for (auto& label : labels) {
    const auto kind = get_le<std::uint32_t>(in);
    if (kind > static_cast<std::uint32_t>(StreamKind::control)) {
      throw std::runtime_error("read_bundle: unknown stream kind");
    }
    label.kind = static_cast<StreamKind>(kind);
    label.index = get_le<std::uint32_t>(in);
  }
  std::vector<std::vector<double>> streams(n_labels, std::vector<double>(n_steps));
  for (auto& s : streams) {
    for (double& v : s) v = get_le<double>(in);
  }
  return NoiseBundle(TimeGrid{t_start, dt, n_steps}, seed, std::move(labels), std::move(streams));
}

}  // namespace brownflow
