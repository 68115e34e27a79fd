#pragma once

#include "ttubs/net_model.hpp"
#include "ttubs/schedule.hpp"

#include <array>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace ttubs {

enum class Category { Frame, Link, FlowTransmission, E2E, FrameIsolation };
constexpr std::size_t kCategoryCount = 5;

std::string_view to_string(Category c);

enum class VarKind { Offset, Queue };

struct Variable {
    VarKind kind = VarKind::Offset;
    StreamIndex stream = 0;
    LinkIndex link = 0;
    std::size_t hop = 0;
    std::int64_t slot = 0; // offsets only
    std::int64_t lo = 0;   // queue domain
    std::int64_t hi = 0;
    std::string name;
};

struct Term {
    std::size_t var = 0;
    std::int64_t coeff = 0;
};

/// Either sum(coeff * var) <= bound, or terms[0].var != terms[1].var.
struct Atom {
    enum class Kind { LessEq, NotEqual };
    Kind kind = Kind::LessEq;
    std::vector<Term> terms;
    std::int64_t bound = 0;

    static Atom less_eq(std::vector<Term> terms, std::int64_t bound);
    static Atom not_equal(std::size_t a, std::size_t b);
};

struct GroundConstraint {
    Category category = Category::Frame;
    /// true: any atom suffices; false: all atoms must hold.
    bool disjunctive = false;
    std::vector<Atom> atoms;
    std::string label;
};

/// Deterministic variable numbering for a scenario. Offset variables follow
/// expand_frame_instances order; queue variables (WA only) follow.
class VariableTable {
public:
    VariableTable(const Scenario& sc, Mode mode);

    [[nodiscard]] const std::vector<Variable>& variables() const { return vars_; }
    [[nodiscard]] std::size_t offset_var(StreamIndex s, std::size_t hop, std::int64_t slot) const;
    [[nodiscard]] std::optional<std::size_t> queue_var(StreamIndex s, std::size_t hop) const;
    [[nodiscard]] const std::vector<Nanos>& horizons() const { return horizons_; }
    [[nodiscard]] std::int64_t slots(StreamIndex s) const;
    [[nodiscard]] std::size_t offset_count() const { return offset_count_; }

private:
    std::vector<Variable> vars_;
    std::vector<Nanos> horizons_;
    std::vector<std::vector<std::size_t>> first_offset_; // [stream][hop]
    std::vector<std::vector<std::optional<std::size_t>>> queue_; // [stream][hop]
    std::vector<Nanos> periods_;
    std::size_t offset_count_ = 0;
};

std::vector<GroundConstraint> build_frame_constraints(const Scenario& sc);
std::vector<GroundConstraint> build_link_constraints(const Scenario& sc);
std::vector<GroundConstraint> build_flow_constraints(const Scenario& sc);
std::vector<GroundConstraint> build_e2e_constraints(const Scenario& sc);
std::vector<GroundConstraint> build_isolation_constraints(const Scenario& sc);

struct ConstraintSet {
    Mode mode = Mode::NFIC;
    std::vector<Variable> variables;
    std::vector<GroundConstraint> constraints;
};

ConstraintSet build_constraint_set(const Scenario& sc, Mode mode);

struct ConstraintCensus {
    std::array<std::int64_t, kCategoryCount> counts{};

    [[nodiscard]] std::int64_t operator[](Category c) const { return counts[static_cast<std::size_t>(c)]; }
    std::int64_t& operator[](Category c) { return counts[static_cast<std::size_t>(c)]; }
    [[nodiscard]] std::int64_t total() const;
    bool operator==(const ConstraintCensus&) const = default;
};

/// Counts without materializing the constraints.
ConstraintCensus census(const Scenario& sc, Mode mode);
ConstraintCensus census_of(const std::vector<GroundConstraint>& constraints);

void write_census_csv_header(std::ostream& os);
void write_census_csv_row(std::ostream& os, const std::string& scenario_id, std::int64_t devices, std::int64_t streams,
                          const ConstraintCensus& c);

/// Values per variable; offsets are slot-relative phi, queues their index.
std::vector<std::int64_t> assignment_from_schedule(const Scenario& sc, const VariableTable& table,
                                                   const Schedule& schedule);

bool holds(const Atom& atom, const std::vector<std::int64_t>& values);
bool holds(const GroundConstraint& c, const std::vector<std::int64_t>& values);

struct Violation {
    std::size_t index = 0;
    GroundConstraint constraint;
};

/// Empty result means the schedule satisfies every constraint of `mode`.
/// Throws InvalidInput if the schedule leaves a variable unassigned.
std::vector<Violation> validate_schedule(const Scenario& sc, const Schedule& schedule, Mode mode);

} // namespace ttubs
