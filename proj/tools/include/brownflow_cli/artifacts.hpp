// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace brownflow::cli {

struct ArtifactEntry {
  std::string name;
  std::uint64_t bytes = 0;
  std::uint32_t crc32 = 0;
};

std::uint32_t crc32_of(std::string_view bytes);

// Writes `content` to dir/name through a temporary file and a rename, so
// readers never observe a partial file. Throws std::runtime_error on IO
// failure; the temporary is removed.
void write_atomic(const std::filesystem::path& dir, const std::string& name,
                  std::string_view content);

// Output directory plus a record of what went into it.
class ArtifactSet {
 public:
  explicit ArtifactSet(std::filesystem::path dir);

  void write(const std::string& name, std::string_view content);

  const std::filesystem::path& dir() const { return dir_; }
  const std::vector<ArtifactEntry>& entries() const { return entries_; }

 private:
  std::filesystem::path dir_;
  std::vector<ArtifactEntry> entries_;
};

}  // namespace brownflow::cli
