#pragma once

#include "ttubs/constraints.hpp"
#include "ttubs/lstb.hpp"
#include "ttubs/net_model.hpp"
#include "ttubs/simulator.hpp"
#include "ttubs/smt_solver.hpp"

#include <array>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace ttubs {

struct ChainSpec {
    int switches = 1;
    int stations_per_switch = 3;
    std::int64_t rate_bps = 1'000'000'000;
    std::vector<Nanos> periods{10 * kNsPerMs, 20 * kNsPerMs};
    std::vector<std::int64_t> sizes{400, 600, 800, 1000, 1500};
    int streams = 5;
    std::uint64_t seed = 1;
};

/// Switches in a line, each with its own end stations; streams between random
/// distinct stations along the only path.
Scenario gen_chain(const ChainSpec& spec);
std::int64_t device_count(const Scenario& sc);

/// Up to 3 switches and 10 streams with microsecond-aligned periods and wire times.
Scenario random_small_scenario(std::uint64_t seed);

/// Exhaustive search over offsets that are multiples of `step`.
std::optional<Schedule> exhaustive_schedule(const Scenario& sc, Mode mode, Nanos step = kNsPerUs);

/// Runs `fn(i)` for i in [0, n) on up to `jobs` threads.
void parallel_for(std::size_t n, int jobs, const std::function<void(std::size_t)>& fn);

struct CensusPlan {
    std::vector<int> switches{1, 2, 3, 4, 5, 6, 7, 8, 9, 10};
    std::vector<int> streams{5, 15, 25, 35, 45, 55, 65, 75, 85, 95};
    int repetitions = 50;
    std::uint64_t seed = 1;
    int jobs = 1;
};

struct CensusCell {
    std::int64_t devices = 0;
    int streams = 0;
    int repetitions = 0;
    std::array<double, kCategoryCount> mean{};
    double mean_total_wa = 0.0;
    double mean_total_nfic = 0.0;
};

std::vector<CensusCell> run_census_study(const CensusPlan& plan);
void write_census_study_csv(std::ostream& os, const std::vector<CensusCell>& cells);

struct SolverPlan {
    std::vector<int> switches{1, 2, 3, 4, 5};
    std::vector<int> streams{10, 20, 30, 40, 50};
    int repetitions = 5;
    std::uint64_t seed = 1;
    double timeout_s = 300.0;
    std::string solver_command;
    bool run_smt = true;
    bool run_lstb = true;
    LstbLimits lstb_limits;
    int jobs = 1;
};

struct SolverRun {
    std::string scenario;
    std::int64_t devices = 0;
    int streams = 0;
    int repetition = 0;
    std::string solver; // "smt" or "lstb"
    Mode mode = Mode::NFIC;
    std::string status;
    double seconds = 0.0;
    std::int64_t backjumps = 0;
    std::int64_t census_total = 0;
    bool valid = false; // schedule passes validate_schedule when status is sat
};

/// Throws SolverError before any cell runs if the SMT solver cannot be started.
void ensure_solver_available(const std::string& command);

std::vector<SolverRun> run_solver_study(const SolverPlan& plan);
void write_solver_study_csv(std::ostream& os, const std::vector<SolverRun>& runs);
std::vector<SolverRun> read_solver_study_csv(std::istream& is);

struct SolverSummary {
    std::string solver;
    Mode mode = Mode::NFIC;
    std::int64_t devices = 0;
    int streams = 0;
    int runs = 0;
    int sat = 0;
    double median_seconds = 0.0;
    double median_backjumps = 0.0;
};

std::vector<SolverSummary> summarize_solver_runs(const std::vector<SolverRun>& runs);
void write_solver_summary_csv(std::ostream& os, const std::vector<SolverSummary>& rows);

enum class Fixture { Table3, Table6Gcl, Table7, Table8 };
Fixture parse_fixture(std::string_view name);
std::string_view to_string(Fixture f);

struct ReplayResult {
    Fixture fixture = Fixture::Table3;
    bool partial = false;
    Mode validated_in = Mode::NFIC;
    std::vector<Violation> violations;
    SimReport report;
    bool requirements_met = false;
};

ReplayResult replay_fixture(Fixture f, EgressMode egress, const std::vector<AttackConfig>& faults,
                            std::uint64_t seed, Nanos duration, std::ostream* trace = nullptr);

/// Normal, frame-loss, 10 us delay and 221 us delay runs of a fixture under TAS and TT-UBS.
struct ReplayRow {
    std::string scenario;
    EgressMode egress = EgressMode::TtUbs;
    StreamMetrics metrics;
};

std::vector<ReplayRow> run_replay_matrix(Fixture f, std::uint64_t seed, Nanos duration, int jobs);
void write_replay_matrix_csv(std::ostream& os, const std::vector<ReplayRow>& rows);

} // namespace ttubs
