// Copyright (c) 2026 The GFP Authors
// SPDX-License-Identifier: Apache-2.0

#include "gfp/executor.hpp"

#include "gfp/error.hpp"

#include <algorithm>
#include <atomic>
#include <cerrno>
#include <cmath>
#include <cstdlib>
#include <cstring>
#include <exception>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <random>
#include <thread>

#include <fcntl.h>
#include <poll.h>
#include <signal.h>
#include <sys/resource.h>
#include <sys/wait.h>
#include <unistd.h>

namespace gfp {
namespace {

namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;

constexpr std::string_view kScriptName = "prog.py";

// Keeps the last `limit` bytes of a stream.
class TailBuffer {
public:
    explicit TailBuffer(std::size_t limit) : limit_(std::max<std::size_t>(limit, 1)) {}

    void append(const char* data, std::size_t n) {
        buf_.append(data, n);
        if (buf_.size() > 2 * limit_) buf_.erase(0, buf_.size() - limit_);
    }

    std::string take() {
        if (buf_.size() > limit_) buf_.erase(0, buf_.size() - limit_);
        return std::move(buf_);
    }

private:
    std::size_t limit_;
    std::string buf_;
};

class TempDir {
public:
    TempDir() {
        std::string pattern = (fs::temp_directory_path() / "gfp-run-XXXXXX").string();
        if (::mkdtemp(pattern.data()) == nullptr) {
            throw Error(ErrorCode::SandboxSpawnFailure, std::string("mkdtemp failed: ") + std::strerror(errno));
        }
        path_ = pattern;
    }
    ~TempDir() {
        std::error_code ec;
        fs::remove_all(path_, ec);
    }
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;

    const fs::path& path() const { return path_; }

private:
    fs::path path_;
};

class Fd {
public:
    Fd() = default;
    explicit Fd(int fd) : fd_(fd) {}
    ~Fd() { reset(); }
    Fd(Fd&& o) noexcept : fd_(std::exchange(o.fd_, -1)) {}
    Fd& operator=(Fd&& o) noexcept {
        if (this != &o) {
            reset();
            fd_ = std::exchange(o.fd_, -1);
        }
        return *this;
    }
    int get() const { return fd_; }
    void reset() {
        if (fd_ >= 0) ::close(fd_);
        fd_ = -1;
    }

private:
    int fd_ = -1;
};

std::pair<Fd, Fd> make_pipe() {
    int fds[2];
    if (::pipe2(fds, O_CLOEXEC) != 0) {
        throw Error(ErrorCode::SandboxSpawnFailure, std::string("pipe2 failed: ") + std::strerror(errno));
    }
    return {Fd(fds[0]), Fd(fds[1])};
}

std::string random_token() {
    static std::atomic<unsigned long> counter{0};
    thread_local std::mt19937_64 rng{std::random_device{}()};
    char buf[48];
    std::snprintf(buf, sizeof buf, "%d-%lu-%016llx", static_cast<int>(::getpid()), counter++,
                  static_cast<unsigned long long>(rng()));
    return buf;
}

std::string inherited_path() {
    const char* path = std::getenv("PATH");
    return path && *path ? path : "/usr/local/bin:/usr/bin:/bin";
}

// Resolved in the parent so the forked child only makes async-signal-safe calls.
std::string resolve_executable(const std::string& name, const std::string& search_path) {
    if (name.empty()) throw Error(ErrorCode::SandboxSpawnFailure, "interpreter command is empty");
    if (name.find('/') != std::string::npos) {
        if (::access(name.c_str(), X_OK) == 0) return name;
        throw Error(ErrorCode::SandboxSpawnFailure, "interpreter not executable: " + name);
    }
    std::size_t start = 0;
    for (;;) {
        std::size_t end = search_path.find(':', start);
        std::string dir = search_path.substr(start, end == std::string::npos ? end : end - start);
        if (dir.empty()) dir = ".";
        std::string candidate = dir + "/" + name;
        if (::access(candidate.c_str(), X_OK) == 0) return candidate;
        if (end == std::string::npos) break;
        start = end + 1;
    }
    throw Error(ErrorCode::SandboxSpawnFailure, "interpreter not found on PATH: " + name);
}

struct ChildRun {
    bool timed_out = false;
    int exit_code = 0;
    std::string out;
    std::string err;
    std::chrono::duration<double> wall{0};
};

struct ChildSpec {
    std::vector<std::string> argv;
    std::vector<std::string> env;
    fs::path cwd;
    std::chrono::milliseconds timeout;
    std::size_t max_output_bytes;
    std::size_t max_memory_bytes;
};

void set_limit(int resource, rlim_t value) {
    struct rlimit rl;
    rl.rlim_cur = value;
    rl.rlim_max = value;
    ::setrlimit(resource, &rl);
}

ChildRun run_child(const ChildSpec& spec) {
    const std::string exe = resolve_executable(spec.argv.front(), inherited_path());
    std::vector<char*> argv;
    for (const auto& a : spec.argv) argv.push_back(const_cast<char*>(a.c_str()));
    argv.push_back(nullptr);
    std::vector<char*> envp;
    for (const auto& e : spec.env) envp.push_back(const_cast<char*>(e.c_str()));
    envp.push_back(nullptr);
    const std::string cwd = spec.cwd.string();
    const rlim_t cpu_seconds = static_cast<rlim_t>(std::ceil(spec.timeout.count() / 1000.0)) + 1;

    Fd devnull(::open("/dev/null", O_RDONLY | O_CLOEXEC));
    auto [out_r, out_w] = make_pipe();
    auto [err_r, err_w] = make_pipe();
    auto [exec_r, exec_w] = make_pipe();

    const auto started = Clock::now();
    pid_t pid = ::fork();
    if (pid < 0) {
        throw Error(ErrorCode::SandboxSpawnFailure, std::string("fork failed: ") + std::strerror(errno));
    }
    if (pid == 0) {
        ::setpgid(0, 0);
        if (devnull.get() >= 0) ::dup2(devnull.get(), STDIN_FILENO);
        ::dup2(out_w.get(), STDOUT_FILENO);
        ::dup2(err_w.get(), STDERR_FILENO);
        if (::chdir(cwd.c_str()) == 0) {
            if (spec.max_memory_bytes > 0) set_limit(RLIMIT_AS, spec.max_memory_bytes);
            set_limit(RLIMIT_CPU, cpu_seconds);
            set_limit(RLIMIT_CORE, 0);
            set_limit(RLIMIT_FSIZE, 64u << 20);
            ::execve(exe.c_str(), argv.data(), envp.data());
        }
        int code = errno;
        [[maybe_unused]] auto n = ::write(exec_w.get(), &code, sizeof code);
        ::_exit(127);
    }
    ::setpgid(pid, pid);
    out_w.reset();
    err_w.reset();
    exec_w.reset();

    int exec_errno = 0;
    ssize_t got;
    do {
        got = ::read(exec_r.get(), &exec_errno, sizeof exec_errno);
    } while (got < 0 && errno == EINTR);
    if (got > 0) {
        int status;
        ::waitpid(pid, &status, 0);
        throw Error(ErrorCode::SandboxSpawnFailure, "cannot execute " + exe + ": " + std::strerror(exec_errno));
    }

    ChildRun run;
    TailBuffer out(spec.max_output_bytes);
    TailBuffer err(spec.max_output_bytes);
    const auto deadline = started + spec.timeout;
    // Grace period for draining pipes held open by escaped grandchildren.
    const auto hard_stop = deadline + std::chrono::seconds(1);
    bool exited = false;
    bool out_open = true;
    bool err_open = true;
    char chunk[8192];

    for (;;) {
        if (!exited) {
            siginfo_t info{};
            if (::waitid(P_PID, static_cast<id_t>(pid), &info, WEXITED | WNOHANG | WNOWAIT) == 0 && info.si_pid == pid) {
                exited = true;
            }
        }
        const auto now = Clock::now();
        if (!exited && !run.timed_out && now >= deadline) {
            ::killpg(pid, SIGKILL);
            run.timed_out = true;
        }
        if (exited && !out_open && !err_open) break;
        if (now >= hard_stop) break;

        pollfd fds[2];
        nfds_t n = 0;
        if (out_open) fds[n++] = {out_r.get(), POLLIN, 0};
        if (err_open) fds[n++] = {err_r.get(), POLLIN, 0};
        if (n == 0) {
            ::usleep(2000);
            continue;
        }
        auto remaining = std::chrono::duration_cast<std::chrono::milliseconds>((run.timed_out ? hard_stop : deadline) - now);
        int slice = static_cast<int>(std::clamp<long>(remaining.count(), 1, 20));
        if (::poll(fds, n, slice) < 0 && errno != EINTR) break;
        for (nfds_t i = 0; i < n; ++i) {
            if (!(fds[i].revents & (POLLIN | POLLHUP | POLLERR))) continue;
            bool is_out = fds[i].fd == out_r.get();
            ssize_t r = ::read(fds[i].fd, chunk, sizeof chunk);
            if (r > 0) {
                (is_out ? out : err).append(chunk, static_cast<std::size_t>(r));
            } else if (r == 0 || (errno != EINTR && errno != EAGAIN)) {
                (is_out ? out_open : err_open) = false;
            }
        }
    }

    // Take down anything left in the group before the leader is reaped.
    ::killpg(pid, SIGKILL);
    int status = 0;
    while (::waitpid(pid, &status, 0) < 0 && errno == EINTR) {
    }
    run.wall = Clock::now() - started;
    if (WIFEXITED(status)) run.exit_code = WEXITSTATUS(status);
    else if (WIFSIGNALED(status)) run.exit_code = -WTERMSIG(status);
    run.out = out.take();
    run.err = err.take();
    return run;
}

void replace_all(std::string& text, const std::string& from, std::string_view to) {
    if (from.empty()) return;
    for (std::size_t pos = text.find(from); pos != std::string::npos; pos = text.find(from, pos + to.size())) {
        text.replace(pos, from.size(), to);
    }
}

std::string last_nonempty_line(std::string_view text) {
    std::string last;
    std::size_t start = 0;
    while (start <= text.size()) {
        std::size_t end = text.find('\n', start);
        std::string line = trim(text.substr(start, end == std::string_view::npos ? std::string_view::npos : end - start));
        if (!line.empty()) last = std::move(line);
        if (end == std::string_view::npos) break;
        start = end + 1;
    }
    return last;
}

bool looks_like_syntax_error(std::string_view stderr_text) {
    std::string last = last_nonempty_line(stderr_text);
    return last.starts_with("SyntaxError") || last.starts_with("IndentationError") ||
           last.starts_with("TabError");
}

// Payload of the last sentinel line, if any.
std::optional<std::string> find_sentinel_payload(std::string_view out) {
    std::optional<std::string> payload;
    std::size_t start = 0;
    while (start < out.size()) {
        std::size_t end = out.find('\n', start);
        std::string_view line = out.substr(start, end == std::string_view::npos ? std::string_view::npos : end - start);
        if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
        if (line.starts_with(kResultSentinel)) payload = std::string(line.substr(kResultSentinel.size()));
        if (end == std::string_view::npos) break;
        start = end + 1;
    }
    return payload;
}

constexpr std::string_view kEpilogue = R"PY(

# ---- appended by the gfp sandbox: report the value bound to `result` ----
def _gfp_report_result():
    import builtins as _b
    import sys as _sys
    _g = _b.globals()
    if 'result' not in _g:
        return
    _v = _g['result']
    try:
        if _b.isinstance(_v, (_b.bool, _b.str, _b.bytes, _b.complex)):
            _text = _b.repr(_v)
        elif _b.isinstance(_v, _b.int) or _b.hasattr(_b.type(_v), '__index__'):
            _text = _b.repr(_b.int(_v))
        elif _b.hasattr(_b.type(_v), '__float__'):
            _text = _b.repr(_b.float(_v))
        else:
            _text = _b.repr(_v)
    except _b.BaseException:
        _text = '<unrenderable>'
    _text = _text.replace('\r', '\\r').replace('\n', '\\n')
    try:
        _sys.stdout.flush()
    except _b.BaseException:
        pass
    _out = _sys.__stdout__
    _out.write('\nGFP_RESULT_7f3a:' + _text + '\n')
    _out.flush()
_gfp_report_result()
)PY";

std::vector<std::string> child_environment(const fs::path& dir, const std::string& token) {
    const std::string home = dir.string();
    return {
        "PATH=" + inherited_path(),
        "HOME=" + home,
        "TMPDIR=" + home,
        "LANG=C.UTF-8",
        "LC_ALL=C.UTF-8",
        "PYTHONIOENCODING=utf-8",
        "PYTHONHASHSEED=0",
        "PYTHONDONTWRITEBYTECODE=1",
        std::string(kRunMarkerEnv) + "=" + token,
    };
}

} // namespace

unsigned SandboxConfig::default_concurrency() {
    return std::max(1u, std::thread::hardware_concurrency());
}

void SandboxConfig::validate() const {
    if (interpreter_command.empty() || interpreter_command.front().empty()) {
        throw Error(ErrorCode::InvalidArgument, "sandbox interpreter_command is empty");
    }
    if (timeout.count() <= 0) throw Error(ErrorCode::InvalidArgument, "sandbox timeout must be > 0");
    if (max_concurrent < 1) throw Error(ErrorCode::InvalidArgument, "sandbox max_concurrent must be >= 1");
    if (max_output_bytes < 1) throw Error(ErrorCode::InvalidArgument, "sandbox max_output_bytes must be >= 1");
}

std::string_view to_string(ExecStatus status) {
    switch (status) {
    case ExecStatus::Value: return "Value";
    case ExecStatus::CompileError: return "CompileError";
    case ExecStatus::RuntimeError: return "RuntimeError";
    case ExecStatus::Timeout: return "Timeout";
    case ExecStatus::MissingResult: return "MissingResult";
    case ExecStatus::NonNumericResult: return "NonNumericResult";
    }
    return "?";
}

ExecStatus exec_status_from_string(std::string_view name) {
    for (auto s : {ExecStatus::Value, ExecStatus::CompileError, ExecStatus::RuntimeError, ExecStatus::Timeout,
                   ExecStatus::MissingResult, ExecStatus::NonNumericResult}) {
        if (to_string(s) == name) return s;
    }
    throw Error(ErrorCode::SchemaError, "unknown execution status '" + std::string(name) + "'");
}

std::string describe(const ExecOutcome& outcome) {
    if (outcome.is_value()) return "Value(" + outcome.value_text + ")";
    return std::string(to_string(outcome.status));
}

std::string_view result_epilogue() { return kEpilogue; }

ExecOutcome run_program(std::string_view code, const SandboxConfig& cfg) {
    cfg.validate();
    TempDir dir;
    const fs::path script = dir.path() / kScriptName;
    {
        std::ofstream f(script, std::ios::binary);
        if (!f) throw Error(ErrorCode::SandboxSpawnFailure, "cannot write " + script.string());
        f << code << kEpilogue;
        if (!f) throw Error(ErrorCode::SandboxSpawnFailure, "cannot write " + script.string());
    }

    ChildSpec spec;
    spec.env = child_environment(dir.path(), random_token());
    spec.cwd = dir.path();
    spec.timeout = cfg.timeout;
    spec.max_output_bytes = cfg.max_output_bytes;
    spec.max_memory_bytes = cfg.max_memory_bytes;

    const std::string dir_text = dir.path().string();
    auto finish = [&](ExecStatus status, const ChildRun& run) {
        ExecOutcome o;
        o.status = status;
        o.exit_code = run.exit_code;
        o.wall_time = run.wall;
        o.stderr_excerpt = run.err;
        // Tracebacks carry the absolute script path; keep records reproducible.
        replace_all(o.stderr_excerpt, dir_text + "/", "");
        return o;
    };

    if (cfg.syntax_precheck) {
        spec.argv = cfg.interpreter_command;
        spec.argv.push_back("-c");
        spec.argv.push_back("import sys\ncompile(open(sys.argv[1], 'rb').read(), sys.argv[1], 'exec')");
        spec.argv.emplace_back(kScriptName);
        ChildRun check = run_child(spec);
        if (check.timed_out) return finish(ExecStatus::Timeout, check);
        if (check.exit_code != 0) return finish(ExecStatus::CompileError, check);
    }

    spec.argv = cfg.interpreter_command;
    spec.argv.emplace_back(kScriptName);
    ChildRun run = run_child(spec);
    if (run.timed_out) return finish(ExecStatus::Timeout, run);
    if (run.exit_code != 0) {
        bool syntax = !cfg.syntax_precheck && looks_like_syntax_error(run.err);
        return finish(syntax ? ExecStatus::CompileError : ExecStatus::RuntimeError, run);
    }
    auto payload = find_sentinel_payload(run.out);
    if (!payload) return finish(ExecStatus::MissingResult, run);
    ExecOutcome o;
    if (auto value = parse_number(*payload)) {
        o = finish(ExecStatus::Value, run);
        o.value = *value;
    } else {
        o = finish(ExecStatus::NonNumericResult, run);
    }
    o.value_text = trim(*payload);
    return o;
}

std::vector<ExecOutcome> run_batch(const std::vector<std::string>& codes, const SandboxConfig& cfg) {
    cfg.validate();
    std::vector<ExecOutcome> out(codes.size());
    std::atomic<std::size_t> next{0};
    std::atomic<bool> abort{false};
    std::exception_ptr failure;
    std::mutex failure_mutex;

    auto worker = [&] {
        for (std::size_t i = next++; i < codes.size() && !abort; i = next++) {
            try {
                out[i] = run_program(codes[i], cfg);
            } catch (...) {
                std::lock_guard lock(failure_mutex);
                if (!failure) failure = std::current_exception();
                abort = true;
            }
        }
    };
    std::size_t n_workers = std::min<std::size_t>(cfg.max_concurrent, codes.size());
    {
        std::vector<std::jthread> pool;
        for (std::size_t i = 0; i < n_workers; ++i) pool.emplace_back(worker);
    }
    if (failure) std::rethrow_exception(failure);
    return out;
}

std::string_view to_string(ErrorCategory category) {
    switch (category) {
    case ErrorCategory::Correct: return "correct";
    case ErrorCategory::UnderstandingError: return "understanding_error";
    case ErrorCategory::CompilationError: return "compilation_error";
    }
    return "?";
}

ErrorCategory error_category_from_string(std::string_view name) {
    for (auto c : {ErrorCategory::Correct, ErrorCategory::UnderstandingError, ErrorCategory::CompilationError}) {
        if (to_string(c) == name) return c;
    }
    throw Error(ErrorCode::SchemaError, "unknown error category '" + std::string(name) + "'");
}

ErrorCategory error_category(const ExecOutcome& outcome, double gold, const NumericTolerance& tol) {
    switch (outcome.status) {
    case ExecStatus::Value:
        return answer_matches(outcome.value_text, outcome.value, gold, tol) ? ErrorCategory::Correct
                                                                            : ErrorCategory::UnderstandingError;
    case ExecStatus::MissingResult:
    case ExecStatus::NonNumericResult:
        return ErrorCategory::UnderstandingError;
    case ExecStatus::CompileError:
    case ExecStatus::RuntimeError:
    case ExecStatus::Timeout:
        return ErrorCategory::CompilationError;
    }
    return ErrorCategory::CompilationError;
}

ordered_json outcome_to_json(const ExecOutcome& outcome) {
    ordered_json j;
    j["status"] = to_string(outcome.status);
    j["value"] = outcome.is_value() ? number_to_json(outcome.value) : ordered_json(nullptr);
    j["value_text"] = outcome.value_text.empty() ? ordered_json(nullptr) : ordered_json(outcome.value_text);
    j["exit_code"] = outcome.exit_code;
    j["stderr"] = outcome.stderr_excerpt;
    return j;
}

ExecOutcome outcome_from_json(const ordered_json& j) {
    try {
        ExecOutcome o;
        o.status = exec_status_from_string(j.at("status").get<std::string>());
        if (j.contains("value") && j["value"].is_number()) o.value = j["value"].get<double>();
        if (j.contains("value_text") && j["value_text"].is_string()) o.value_text = j["value_text"].get<std::string>();
        if (j.contains("exit_code")) o.exit_code = j["exit_code"].get<int>();
        if (j.contains("stderr") && j["stderr"].is_string()) o.stderr_excerpt = j["stderr"].get<std::string>();
        return o;
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorCode::SchemaError, std::string("bad execution outcome: ") + e.what());
    }
}

} // namespace gfp
