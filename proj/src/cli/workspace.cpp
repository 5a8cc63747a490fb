#include "policylens/cli/workspace.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>
#include <unistd.h>

#include "policylens/core/error.hpp"
#include "policylens/core/schema.hpp"

namespace policylens::cli {

WorkspaceLock::WorkspaceLock(std::filesystem::path dir) : file_(std::move(dir) / kLockName) {
  std::filesystem::create_directories(file_.parent_path());
  std::FILE* f = std::fopen(file_.c_str(), "wx");
  if (f == nullptr) {
    const std::string path = file_.string();
    file_.clear();
    throw Error(ErrorCode::IoError, "workspace is locked by another run (" + path + ")");
  }
  std::fprintf(f, "%ld\n", static_cast<long>(::getpid()));
  std::fclose(f);
}

WorkspaceLock::~WorkspaceLock() {
  if (file_.empty()) return;
  std::error_code ec;
  std::filesystem::remove(file_, ec);
}

void write_file(const std::filesystem::path& path, std::string_view content) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    if (!out) throw Error(ErrorCode::IoError, "cannot write " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::IoError, "cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void append_run_entry(const std::filesystem::path& dir, nlohmann::ordered_json entry) {
  const auto path = dir / kRunManifestName;
  nlohmann::ordered_json manifest{{"runs", nlohmann::ordered_json::array()}};
  if (std::filesystem::exists(path)) {
    manifest = nlohmann::ordered_json::parse(read_file(path), nullptr, false);
    if (!manifest.is_object() || !manifest.contains("runs") || !manifest["runs"].is_array()) {
      throw Error(ErrorCode::IoError, path.string() + " is not a run manifest");
    }
  }
  manifest["runs"].push_back(std::move(entry));
  write_file(path, manifest.dump(2) + "\n");
}

void check_file_stem(const std::string& id) {
  if (id.empty() || id.front() == '.' || id.find_first_of("/\\") != std::string::npos) {
    throw Error(ErrorCode::IoError, "document id '" + id + "' cannot be used as a file name");
  }
}

std::vector<PolicyDocument> load_policy_dir(const std::filesystem::path& dir) {
  if (!std::filesystem::is_directory(dir)) throw Error(ErrorCode::IoError, dir.string() + " is not a directory");
  std::vector<std::filesystem::path> files;
  for (const auto& entry : std::filesystem::directory_iterator(dir)) {
    if (entry.is_regular_file() && entry.path().extension() == ".json" &&
        entry.path().filename() != kRunManifestName) {
      files.push_back(entry.path());
    }
  }
  std::sort(files.begin(), files.end());
  std::vector<PolicyDocument> out;
  for (const auto& f : files) {
    try {
      out.push_back(schema::parse_policy(read_file(f), f.stem().string()));
    } catch (const SchemaViolation& e) {
      throw Error(ErrorCode::SchemaViolation, f.string() + ": " + e.what());
    }
  }
  return out;
}

}  // namespace policylens::cli
