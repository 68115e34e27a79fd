#pragma once

#include <chrono>
#include <stdexcept>
#include <string>
#include <vector>

namespace ttubs {

/// Infrastructure failure talking to a child process.
class SolverError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct ProcessResult {
    int exit_code = -1;
    bool timed_out = false;
    std::string output; // stdout followed by stderr interleaving as written
    double elapsed_s = 0.0;
};

/// Splits a command line on whitespace; double quotes group words.
std::vector<std::string> split_command(const std::string& cmd);

/// Runs argv, collecting stdout and stderr, and kills it once `timeout` elapses.
/// Throws SolverError if the program cannot be started.
ProcessResult run_process(const std::vector<std::string>& argv, std::chrono::duration<double> timeout);

} // namespace ttubs
