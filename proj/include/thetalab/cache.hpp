#pragma once

// Append-only on-disk cache of computed coefficients, rooted at
// $THETALAB_CACHE. Layout: <root>/<fingerprint>/<entry>. Entries are written
// to a private temporary file and published with link(2), which fails if the
// entry already exists, so concurrent writers never clobber each other and
// readers never see partial files. Deleting the directory is always safe.

#include <unistd.h>

#include <atomic>
#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <memory>
#include <optional>
#include <random>
#include <sstream>
#include <string>

#include "thetalab/error.hpp"

namespace thetalab {

struct CacheStats {
  std::uint64_t hits = 0;
  std::uint64_t misses = 0;
  std::uint64_t writes = 0;
};

class CoefficientCache {
 public:
  explicit CoefficientCache(std::filesystem::path root) : root_(std::move(root)) {
    std::error_code ec;
    std::filesystem::create_directories(root_, ec);
    if (ec) input_error("cannot create cache directory " + root_.string() + ": " + ec.message());
  }

  /// Cache at $THETALAB_CACHE, or nullptr when the variable is unset or empty.
  static std::unique_ptr<CoefficientCache> from_env() {
    const char* dir = std::getenv("THETALAB_CACHE");
    if (!dir || !*dir) return nullptr;
    return std::make_unique<CoefficientCache>(dir);
  }

  const std::filesystem::path& root() const noexcept { return root_; }

  std::optional<std::string> get(const std::string& fingerprint, const std::string& entry) {
    std::ifstream in(path(fingerprint, entry), std::ios::binary);
    if (!in) {
      ++misses_;
      return std::nullopt;
    }
    std::ostringstream ss;
    ss << in.rdbuf();
    ++hits_;
    return ss.str();
  }

  /// Publishes `content` under `entry` unless it already exists.
  void put(const std::string& fingerprint, const std::string& entry, const std::string& content) {
    const std::filesystem::path target = path(fingerprint, entry);
    std::error_code ec;
    std::filesystem::create_directories(target.parent_path(), ec);
    if (ec) return;
    const std::filesystem::path tmp =
        target.parent_path() / (".tmp." + std::to_string(::getpid()) + "." + random_tag());
    {
      std::ofstream out(tmp, std::ios::binary);
      if (!out) return;
      out << content;
      if (!out.flush()) {
        std::filesystem::remove(tmp, ec);
        return;
      }
    }
    if (::link(tmp.c_str(), target.c_str()) == 0) ++writes_;
    std::filesystem::remove(tmp, ec);
  }

  CacheStats stats() const { return CacheStats{hits_.load(), misses_.load(), writes_.load()}; }

 private:
  std::filesystem::path path(const std::string& fingerprint, const std::string& entry) const {
    return root_ / fingerprint / entry;
  }

  static std::string random_tag() {
    thread_local std::mt19937_64 rng{std::random_device{}()};
    std::ostringstream os;
    os << std::hex << rng();
    return os.str();
  }

  std::filesystem::path root_;
  std::atomic<std::uint64_t> hits_{0}, misses_{0}, writes_{0};
};

}  // namespace thetalab
