#include "ttubs/process.hpp"

#include <cerrno>
#include <cstring>
#include <fcntl.h>
#include <poll.h>
#include <signal.h>
#include <sys/wait.h>
#include <unistd.h>

namespace ttubs {

std::vector<std::string> split_command(const std::string& cmd)
{
    std::vector<std::string> out;
    std::string cur;
    bool quoted = false;
    bool have = false;
    for (char c : cmd) {
        if (c == '"') {
            quoted = !quoted;
            have = true;
        } else if (!quoted && (c == ' ' || c == '\t' || c == '\n')) {
            if (have) {
                out.push_back(cur);
                cur.clear();
                have = false;
            }
        } else {
            cur += c;
            have = true;
        }
    }
    if (have) {
        out.push_back(cur);
    }
    return out;
}

namespace {

struct Fd {
    int fd = -1;
    Fd() = default;
    explicit Fd(int f) : fd(f) {}
    Fd(const Fd&) = delete;
    Fd& operator=(const Fd&) = delete;
    ~Fd() { reset(); }
    void reset()
    {
        if (fd >= 0) {
            ::close(fd);
            fd = -1;
        }
    }
};

void make_pipe(Fd& r, Fd& w)
{
    int p[2];
    if (::pipe2(p, O_CLOEXEC) != 0) {
        throw SolverError(std::string("pipe: ") + std::strerror(errno));
    }
    r.fd = p[0];
    w.fd = p[1];
}

} // namespace

ProcessResult run_process(const std::vector<std::string>& argv, std::chrono::duration<double> timeout)
{
    if (argv.empty()) {
        throw SolverError("empty solver command");
    }
    std::vector<char*> cargv;
    for (const auto& a : argv) {
        cargv.push_back(const_cast<char*>(a.c_str()));
    }
    cargv.push_back(nullptr);

    Fd out_r, out_w, err_r, err_w;
    make_pipe(out_r, out_w);
    make_pipe(err_r, err_w);

    const auto start = std::chrono::steady_clock::now();
    const pid_t pid = ::fork();
    if (pid < 0) {
        throw SolverError(std::string("fork: ") + std::strerror(errno));
    }
    if (pid == 0) {
        ::dup2(out_w.fd, STDOUT_FILENO);
        ::dup2(out_w.fd, STDERR_FILENO);
        int devnull = ::open("/dev/null", O_RDONLY);
        if (devnull >= 0) {
            ::dup2(devnull, STDIN_FILENO);
        }
        ::execvp(cargv[0], cargv.data());
        const int e = errno;
        [[maybe_unused]] auto n = ::write(err_w.fd, &e, sizeof e);
        ::_exit(127);
    }
    out_w.reset();
    err_w.reset();

    ProcessResult res;
    const auto deadline = start + std::chrono::duration_cast<std::chrono::steady_clock::duration>(timeout);
    char buf[4096];
    bool open = true;
    while (open) {
        const auto now = std::chrono::steady_clock::now();
        if (now >= deadline) {
            res.timed_out = true;
            break;
        }
        const auto left = std::chrono::duration_cast<std::chrono::milliseconds>(deadline - now).count();
        pollfd pfd{out_r.fd, POLLIN, 0};
        const int rc = ::poll(&pfd, 1, static_cast<int>(std::min<long long>(left + 1, 1000)));
        if (rc < 0 && errno != EINTR) {
            break;
        }
        if (rc > 0) {
            const ssize_t n = ::read(out_r.fd, buf, sizeof buf);
            if (n > 0) {
                res.output.append(buf, static_cast<std::size_t>(n));
            } else if (n == 0 || errno != EINTR) {
                open = false;
            }
        }
    }
    if (res.timed_out) {
        ::kill(pid, SIGKILL);
    }
    int status = 0;
    while (::waitpid(pid, &status, 0) < 0 && errno == EINTR) {
    }
    res.elapsed_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (res.elapsed_s > timeout.count()) {
        res.timed_out = true;
    }

    int exec_errno = 0;
    if (::read(err_r.fd, &exec_errno, sizeof exec_errno) == static_cast<ssize_t>(sizeof exec_errno)) {
        throw SolverError("cannot execute '" + argv[0] + "': " + std::strerror(exec_errno));
    }
    if (WIFEXITED(status)) {
        res.exit_code = WEXITSTATUS(status);
    } else if (WIFSIGNALED(status)) {
        res.exit_code = 128 + WTERMSIG(status);
    }
    return res;
}

} // namespace ttubs
