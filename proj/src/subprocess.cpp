#include "sc2dec/subprocess.hpp"

#include <fcntl.h>
#include <poll.h>
#include <signal.h>
#include <sys/stat.h>
#include <sys/wait.h>
#include <unistd.h>

#include <atomic>
#include <cerrno>
#include <chrono>
#include <cstdlib>
#include <cstring>
#include <stdexcept>
#include <thread>

namespace sc2dec {

namespace {

constexpr size_t kMaxCapture = 8u << 20;  // per stream

using Clock = std::chrono::steady_clock;

bool deadline_passed(Clock::time_point deadline) { return Clock::now() >= deadline; }

int ms_until(Clock::time_point deadline) {
    auto left = std::chrono::duration_cast<std::chrono::milliseconds>(deadline - Clock::now());
    if (left.count() <= 0) return 0;
    return static_cast<int>(std::min<long long>(left.count(), 200));
}

// Drains both pipes until EOF or deadline. Returns false on timeout.
bool drain_pipes(int out_fd, int err_fd, Clock::time_point deadline, std::string& out,
                 std::string& err) {
    bool out_open = true, err_open = true;
    char buf[16384];
    while (out_open || err_open) {
        if (deadline_passed(deadline)) return false;
        struct pollfd fds[2];
        int nfds = 0;
        if (out_open) fds[nfds++] = {out_fd, POLLIN, 0};
        if (err_open) fds[nfds++] = {err_fd, POLLIN, 0};
        int rc = ::poll(fds, nfds, ms_until(deadline));
        if (rc < 0) {
            if (errno == EINTR) continue;
            return true;  // treat as EOF; waitpid still runs
        }
        if (rc == 0) continue;
        for (int i = 0; i < nfds; ++i) {
            if (!(fds[i].revents & (POLLIN | POLLHUP | POLLERR))) continue;
            ssize_t n = ::read(fds[i].fd, buf, sizeof buf);
            bool is_out = fds[i].fd == out_fd;
            if (n > 0) {
                std::string& dst = is_out ? out : err;
                if (dst.size() < kMaxCapture) dst.append(buf, static_cast<size_t>(n));
            } else if (n == 0 || (n < 0 && errno != EINTR && errno != EAGAIN)) {
                (is_out ? out_open : err_open) = false;
            }
        }
    }
    return true;
}

void kill_group(pid_t pid) {
    ::kill(-pid, SIGKILL);
    ::kill(pid, SIGKILL);
}

// Reaps with the same deadline; kills the group if the child lingers after
// closing its pipes.
bool wait_with_deadline(pid_t pid, Clock::time_point deadline, int& status) {
    while (true) {
        pid_t r = ::waitpid(pid, &status, WNOHANG);
        if (r == pid) return true;
        if (r < 0 && errno != EINTR) return true;
        if (deadline_passed(deadline)) return false;
        std::this_thread::sleep_for(std::chrono::milliseconds(5));
    }
}

}  // namespace

ProcessResult run_process(const std::vector<std::string>& argv,
                          const std::filesystem::path& cwd, double timeout_s) {
    if (argv.empty()) throw std::invalid_argument("run_process: empty argv");

    int out_pipe[2], err_pipe[2];
    if (::pipe2(out_pipe, O_CLOEXEC) != 0 || ::pipe2(err_pipe, O_CLOEXEC) != 0)
        throw std::runtime_error("pipe2 failed: " + std::string(std::strerror(errno)));

    pid_t pid = ::fork();
    if (pid < 0) throw std::runtime_error("fork failed: " + std::string(std::strerror(errno)));

    if (pid == 0) {
        ::setpgid(0, 0);
        if (!cwd.empty() && ::chdir(cwd.c_str()) != 0) _exit(127);
        ::dup2(out_pipe[1], STDOUT_FILENO);
        ::dup2(err_pipe[1], STDERR_FILENO);
        std::vector<char*> cargv;
        cargv.reserve(argv.size() + 1);
        for (const auto& a : argv) cargv.push_back(const_cast<char*>(a.c_str()));
        cargv.push_back(nullptr);
        ::execvp(cargv[0], cargv.data());
        const char* msg = "exec failed\n";
        ssize_t ignored = ::write(STDERR_FILENO, msg, std::strlen(msg));
        (void)ignored;
        _exit(127);
    }

    ::close(out_pipe[1]);
    ::close(err_pipe[1]);

    ProcessResult result;
    auto deadline = Clock::now() + std::chrono::duration_cast<Clock::duration>(
                                       std::chrono::duration<double>(timeout_s));

    bool drained = drain_pipes(out_pipe[0], err_pipe[0], deadline, result.out, result.err);
    ::close(out_pipe[0]);
    ::close(err_pipe[0]);

    int status = 0;
    bool reaped = drained && wait_with_deadline(pid, deadline, status);
    if (!reaped) {
        kill_group(pid);
        ::waitpid(pid, &status, 0);
        result.timed_out = true;
        return result;
    }

    if (WIFEXITED(status)) {
        result.exit_code = WEXITSTATUS(status);
        if (result.exit_code == 127 && result.err.find("exec failed") != std::string::npos)
            result.exec_failed = true;
    } else if (WIFSIGNALED(status)) {
        result.term_signal = WTERMSIG(status);
    }
    return result;
}

std::optional<std::filesystem::path> resolve_on_path(const std::string& name) {
    namespace fs = std::filesystem;
    auto executable = [](const fs::path& p) {
        std::error_code ec;
        return fs::is_regular_file(p, ec) && ::access(p.c_str(), X_OK) == 0;
    };
    if (name.find('/') != std::string::npos) {
        fs::path p(name);
        if (executable(p)) return fs::absolute(p);
        return std::nullopt;
    }
    const char* path_env = std::getenv("PATH");
    if (!path_env) return std::nullopt;
    std::string paths(path_env);
    size_t pos = 0;
    while (pos <= paths.size()) {
        size_t colon = paths.find(':', pos);
        std::string dir = paths.substr(pos, colon == std::string::npos ? colon : colon - pos);
        if (!dir.empty()) {
            fs::path candidate = fs::path(dir) / name;
            if (executable(candidate)) return candidate;
        }
        if (colon == std::string::npos) break;
        pos = colon + 1;
    }
    return std::nullopt;
}

namespace {
std::atomic<uint64_t> g_tempdir_counter{0};
}

TempDir::TempDir(const std::string& tag, const std::filesystem::path& parent) {
    namespace fs = std::filesystem;
    fs::path base = parent.empty() ? fs::temp_directory_path() : parent;
    fs::create_directories(base);
    uint64_t n = g_tempdir_counter.fetch_add(1);
    path_ = base / (tag + "-" + std::to_string(::getpid()) + "-" + std::to_string(n));
    fs::create_directories(path_);
}

TempDir::~TempDir() {
    if (path_.empty()) return;
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
}

TempDir::TempDir(TempDir&& other) noexcept : path_(std::move(other.path_)) {
    other.path_.clear();
}

TempDir& TempDir::operator=(TempDir&& other) noexcept {
    if (this != &other) {
        if (!path_.empty()) {
            std::error_code ec;
            std::filesystem::remove_all(path_, ec);
        }
        path_ = std::move(other.path_);
        other.path_.clear();
    }
    return *this;
}

}  // namespace sc2dec
