// SPDX-License-Identifier: Apache-2.0
#include "brownflow_cli/artifacts.hpp"

#include <fstream>
#include <stdexcept>
#include <system_error>

#include <unistd.h>

#include <boost/crc.hpp>

namespace brownflow::cli {

namespace fs = std::filesystem;

std::uint32_t crc32_of(std::string_view bytes) {
  boost::crc_32_type crc;
  crc.process_bytes(bytes.data(), bytes.size());
  return crc.checksum();
}

void write_atomic(const fs::path& dir, const std::string& name, std::string_view content) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw std::runtime_error("cannot create " + dir.string() + ": " + ec.message());
  const fs::path target = dir / name;
  const fs::path tmp = dir / ("." + name + ".tmp." + std::to_string(::getpid()));
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (out) out.write(content.data(), static_cast<std::streamsize>(content.size()));
    out.flush();
    if (!out) {
      fs::remove(tmp, ec);
      throw std::runtime_error("cannot write " + tmp.string());
    }
  }
  fs::rename(tmp, target, ec);
  if (ec) {
    std::error_code ignored;
    fs::remove(tmp, ignored);
    throw std::runtime_error("cannot rename onto " + target.string() + ": " + ec.message());
  }
}

ArtifactSet::ArtifactSet(fs::path dir) : dir_(std::move(dir)) {}

void ArtifactSet::write(const std::string& name, std::string_view content) {
  write_atomic(dir_, name, content);
  entries_.push_back({name, content.size(), crc32_of(content)});
}

}  // namespace brownflow::cli
