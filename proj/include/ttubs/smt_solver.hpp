#pragma once

#include "ttubs/constraints.hpp"
#include "ttubs/process.hpp"
#include "ttubs/schedule.hpp"

#include <map>
#include <optional>
#include <string>
#include <string_view>

namespace ttubs {

class ParseError : public std::runtime_error {
public:
    ParseError(const std::string& msg, int line)
        : std::runtime_error(line > 0 ? "line " + std::to_string(line) + ": " + msg : msg), line_(line)
    {
    }
    [[nodiscard]] int line() const { return line_; }

private:
    int line_;
};

inline constexpr const char* kDefaultSolverCommand = "z3 -smt2";
inline constexpr const char* kSolverEnv = "TTUBS_SOLVER";

/// `explicit_cmd` if non-empty, else $TTUBS_SOLVER, else the default.
std::string resolve_solver_command(const std::string& explicit_cmd = {});

/// SMT-LIB 2 (QF_LIA) document: one Int per variable, one named assertion per
/// ground constraint, plus domain assertions for queue variables.
std::string encode(const ConstraintSet& cs, std::string_view title = {});

/// Reads the model section of a solver reply. Every variable of `cs` must be
/// assigned and no other name may appear.
std::map<std::string, std::int64_t> parse_model(std::string_view text, const ConstraintSet& cs);

enum class SolveStatus { Sat, Unsat, Timeout };
std::string_view to_string(SolveStatus s);

struct SolveRequest {
    Scenario scenario;
    Mode mode = Mode::NFIC;
    double timeout_s = 300.0;
    std::string solver_command; // empty: resolve_solver_command()
};

struct SolveOutcome {
    SolveStatus status = SolveStatus::Unsat;
    std::optional<Schedule> schedule;
    double solve_time_s = 0.0;
    ConstraintCensus census;
};

/// Throws SolverError on process failure or unreadable output.
SolveOutcome solve(const SolveRequest& req);

/// Maps a parsed model back onto the scenario's frame instances.
Schedule schedule_from_model(const Scenario& sc, const ConstraintSet& cs,
                             const std::map<std::string, std::int64_t>& model);

} // namespace ttubs
