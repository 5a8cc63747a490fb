#pragma once

#include <cstdio>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "policylens/core/model.hpp"

namespace policylens::cli {

inline constexpr std::string_view kLockName = ".policylens.lock";
inline constexpr std::string_view kRunManifestName = "run_manifest.json";

/// Exclusive lock on a workspace directory (created if missing), held for the
/// object's lifetime. Throws Error(IoError) when another process holds it.
class WorkspaceLock {
 public:
  explicit WorkspaceLock(std::filesystem::path dir);
  ~WorkspaceLock();
  WorkspaceLock(const WorkspaceLock&) = delete;
  WorkspaceLock& operator=(const WorkspaceLock&) = delete;

 private:
  std::filesystem::path file_;
};

/// Writes through a temporary file and renames it into place.
void write_file(const std::filesystem::path& path, std::string_view content);
std::string read_file(const std::filesystem::path& path);

/// Appends one stage entry to dir/run_manifest.json, creating it if needed.
void append_run_entry(const std::filesystem::path& dir, nlohmann::ordered_json entry);

/// Rejects ids that are not usable as a file stem.
void check_file_stem(const std::string& id);

/// Every *.json policy document in dir, sorted by name; policy_id is the stem.
std::vector<PolicyDocument> load_policy_dir(const std::filesystem::path& dir);

}  // namespace policylens::cli
