#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace sc2dec {

struct ProcessResult {
    int exit_code = -1;     // valid when exited normally
    int term_signal = 0;    // nonzero when killed by a signal
    bool timed_out = false; // wall clock exceeded; process was killed
    bool exec_failed = false;
    std::string out;
    std::string err;

    bool exited_zero() const { return !timed_out && term_signal == 0 && exit_code == 0; }
};

// Runs argv[0] with the given arguments, cwd and wall-clock cap, capturing
// stdout/stderr. The child is placed in its own process group and the whole
// group is killed on timeout.
ProcessResult run_process(const std::vector<std::string>& argv,
                          const std::filesystem::path& cwd,
                          double timeout_s);

// PATH lookup of `name` verbatim; names containing '/' are checked directly.
std::optional<std::filesystem::path> resolve_on_path(const std::string& name);

// Creates a uniquely named directory under the system temp root (or `parent`
// if given) and removes it recursively on destruction.
class TempDir {
  public:
    explicit TempDir(const std::string& tag = "sc2dec",
                     const std::filesystem::path& parent = {});
    ~TempDir();

    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;
    TempDir(TempDir&& other) noexcept;
    TempDir& operator=(TempDir&& other) noexcept;

    const std::filesystem::path& path() const { return path_; }

  private:
    std::filesystem::path path_;
};

}  // namespace sc2dec
