#include "ttubs/smt_solver.hpp"

#include <cctype>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <unistd.h>

namespace ttubs {

std::string resolve_solver_command(const std::string& explicit_cmd)
{
    if (!explicit_cmd.empty()) {
        return explicit_cmd;
    }
    if (const char* env = std::getenv(kSolverEnv); env != nullptr && *env != '\0') {
        return env;
    }
    return kDefaultSolverCommand;
}

std::string_view to_string(SolveStatus s)
{
    switch (s) {
    case SolveStatus::Sat:
        return "sat";
    case SolveStatus::Unsat:
        return "unsat";
    case SolveStatus::Timeout:
        return "timeout";
    }
    return "?";
}

namespace {

void put_int(std::ostream& os, std::int64_t v)
{
    if (v < 0) {
        os << "(- " << (0ULL - static_cast<unsigned long long>(v)) << ')';
    } else {
        os << v;
    }
}

void put_atom(std::ostream& os, const Atom& a, const std::vector<Variable>& vars)
{
    if (a.kind == Atom::Kind::NotEqual) {
        os << "(distinct " << vars[a.terms[0].var].name << ' ' << vars[a.terms[1].var].name << ')';
        return;
    }
    os << "(<= ";
    if (a.terms.empty()) {
        os << '0';
    } else {
        if (a.terms.size() > 1) {
            os << "(+";
        }
        for (std::size_t i = 0; i < a.terms.size(); ++i) {
            const Term& t = a.terms[i];
            if (a.terms.size() > 1) {
                os << ' ';
            }
            const std::string& n = vars[t.var].name;
            if (t.coeff == 1) {
                os << n;
            } else if (t.coeff == -1) {
                os << "(- " << n << ')';
            } else {
                os << "(* ";
                put_int(os, t.coeff);
                os << ' ' << n << ')';
            }
        }
        if (a.terms.size() > 1) {
            os << ')';
        }
    }
    os << ' ';
    put_int(os, a.bound);
    os << ')';
}

std::string_view prefix(Category c)
{
    switch (c) {
    case Category::Frame:
        return "frame_";
    case Category::Link:
        return "link_";
    case Category::FlowTransmission:
        return "flow_";
    case Category::E2E:
        return "e2e_";
    case Category::FrameIsolation:
        return "iso_";
    }
    return "c_";
}

} // namespace

std::string encode(const ConstraintSet& cs, std::string_view title)
{
    std::ostringstream os;
    os << "; ttubs " << to_string(cs.mode);
    if (!title.empty()) {
        os << ' ' << title;
    }
    os << "\n(set-option :produce-models true)\n(set-logic QF_LIA)\n";
    for (const Variable& v : cs.variables) {
        os << "(declare-fun " << v.name << " () Int)\n";
    }
    std::size_t dom = 0;
    for (const Variable& v : cs.variables) {
        if (v.kind == VarKind::Queue) {
            os << "(assert (and (<= " << v.lo << ' ' << v.name << ") (<= " << v.name << ' ' << v.hi
               << "))) ; dom_" << dom++ << '\n';
        }
    }
    std::array<std::size_t, kCategoryCount> seq{};
    for (const GroundConstraint& c : cs.constraints) {
        os << "(assert ";
        if (c.atoms.size() == 1) {
            put_atom(os, c.atoms[0], cs.variables);
        } else {
            os << (c.disjunctive ? "(or" : "(and");
            for (const Atom& a : c.atoms) {
                os << ' ';
                put_atom(os, a, cs.variables);
            }
            os << ')';
        }
        os << ") ; " << prefix(c.category) << seq[static_cast<std::size_t>(c.category)]++ << '\n';
    }
    os << "(check-sat)\n(get-model)\n(exit)\n";
    return os.str();
}

namespace {

struct SExpr {
    bool list = false;
    std::string atom;
    std::vector<SExpr> items;
    int line = 0;
};

class SExprReader {
public:
    explicit SExprReader(std::string_view t) : text_(t) {}

    bool at_end()
    {
        skip();
        return pos_ >= text_.size();
    }

    SExpr read()
    {
        skip();
        if (pos_ >= text_.size()) {
            throw ParseError("unexpected end of solver output", line_);
        }
        SExpr e;
        e.line = line_;
        const char c = text_[pos_];
        if (c == '(') {
            ++pos_;
            e.list = true;
            for (;;) {
                skip();
                if (pos_ >= text_.size()) {
                    throw ParseError("unbalanced parenthesis", e.line);
                }
                if (text_[pos_] == ')') {
                    ++pos_;
                    return e;
                }
                e.items.push_back(read());
            }
        }
        if (c == ')') {
            throw ParseError("unexpected ')'", line_);
        }
        if (c == '"' || c == '|') {
            const char close = c;
            ++pos_;
            while (pos_ < text_.size() && text_[pos_] != close) {
                if (text_[pos_] == '\n') {
                    ++line_;
                }
                e.atom += text_[pos_++];
            }
            if (pos_ >= text_.size()) {
                throw ParseError("unterminated literal", e.line);
            }
            ++pos_;
            return e;
        }
        while (pos_ < text_.size() && !std::isspace(static_cast<unsigned char>(text_[pos_])) && text_[pos_] != '(' &&
               text_[pos_] != ')') {
            e.atom += text_[pos_++];
        }
        return e;
    }

private:
    void skip()
    {
        while (pos_ < text_.size()) {
            const char c = text_[pos_];
            if (c == '\n') {
                ++line_;
                ++pos_;
            } else if (std::isspace(static_cast<unsigned char>(c))) {
                ++pos_;
            } else if (c == ';') {
                while (pos_ < text_.size() && text_[pos_] != '\n') {
                    ++pos_;
                }
            } else {
                break;
            }
        }
    }

    std::string_view text_;
    std::size_t pos_ = 0;
    int line_ = 1;
};

std::int64_t int_value(const SExpr& e)
{
    if (!e.list) {
        std::size_t used = 0;
        long long v = 0;
        try {
            v = std::stoll(e.atom, &used);
        } catch (const std::exception&) {
            used = 0;
        }
        if (used == 0 || used != e.atom.size()) {
            throw ParseError("expected integer, got '" + e.atom + "'", e.line);
        }
        return v;
    }
    if (e.items.size() == 2 && !e.items[0].list && e.items[0].atom == "-") {
        return -int_value(e.items[1]);
    }
    throw ParseError("expected integer literal", e.line);
}

} // namespace

std::map<std::string, std::int64_t> parse_model(std::string_view text, const ConstraintSet& cs)
{
    std::map<std::string, std::int64_t> out;
    std::map<std::string, bool> declared;
    for (const Variable& v : cs.variables) {
        declared[v.name] = false;
    }
    SExprReader r(text);
    if (r.at_end()) {
        throw ParseError("empty solver output", 1);
    }
    SExpr first = r.read();
    if (!first.list && first.atom == "sat") {
        if (r.at_end()) {
            throw ParseError("missing model", first.line);
        }
        first = r.read();
    }
    if (!first.list) {
        throw ParseError("expected model, got '" + first.atom + "'", first.line);
    }
    std::size_t i = 0;
    if (!first.items.empty() && !first.items[0].list && first.items[0].atom == "model") {
        i = 1;
    }
    for (; i < first.items.size(); ++i) {
        const SExpr& d = first.items[i];
        if (!d.list || d.items.size() != 5 || d.items[0].list || d.items[0].atom != "define-fun") {
            throw ParseError("malformed model entry", d.line);
        }
        const std::string& name = d.items[1].atom;
        auto it = declared.find(name);
        if (it == declared.end()) {
            throw ParseError("unknown variable '" + name + "'", d.line);
        }
        if (d.items[3].list || d.items[3].atom != "Int") {
            throw ParseError("variable '" + name + "' is not Int", d.line);
        }
        it->second = true;
        out[name] = int_value(d.items[4]);
    }
    for (const Variable& v : cs.variables) {
        if (!declared[v.name]) {
            throw ParseError("unassigned variable '" + v.name + "'", 0);
        }
    }
    return out;
}

Schedule schedule_from_model(const Scenario& sc, const ConstraintSet& cs,
                             const std::map<std::string, std::int64_t>& model)
{
    Schedule out = Schedule::empty_for(sc);
    for (const Variable& v : cs.variables) {
        const auto it = model.find(v.name);
        if (it == model.end()) {
            throw ParseError("unassigned variable '" + v.name + "'", 0);
        }
        if (v.kind == VarKind::Offset) {
            out.set(v.stream, v.hop, v.slot, it->second + v.slot * sc.streams[v.stream].period);
        } else {
            out.queues[v.stream][v.hop] = static_cast<int>(it->second);
        }
    }
    return out;
}

namespace {

class TempFile {
public:
    explicit TempFile(const std::string& content)
    {
        std::string tmpl = (std::filesystem::temp_directory_path() / "ttubs-XXXXXX.smt2").string();
        const int fd = ::mkstemps(tmpl.data(), 5);
        if (fd < 0) {
            throw SolverError("cannot create temporary file");
        }
        ::close(fd);
        path_ = tmpl;
        std::ofstream(path_, std::ios::binary) << content;
    }
    TempFile(const TempFile&) = delete;
    TempFile& operator=(const TempFile&) = delete;
    ~TempFile()
    {
        std::error_code ec;
        std::filesystem::remove(path_, ec);
    }
    [[nodiscard]] const std::string& path() const { return path_; }

private:
    std::string path_;
};

std::string first_word(const std::string& s)
{
    std::istringstream is(s);
    std::string w;
    is >> w;
    return w;
}

} // namespace

SolveOutcome solve(const SolveRequest& req)
{
    if (!(req.timeout_s > 0)) {
        throw InvalidInput("solve: timeout must be positive");
    }
    require_valid(req.scenario);
    const ConstraintSet cs = build_constraint_set(req.scenario, req.mode);
    SolveOutcome out;
    out.census = census_of(cs.constraints);

    const TempFile file(encode(cs, req.scenario.name));
    auto argv = split_command(resolve_solver_command(req.solver_command));
    argv.push_back(file.path());
    const ProcessResult pr = run_process(argv, std::chrono::duration<double>(req.timeout_s));
    out.solve_time_s = pr.elapsed_s;
    if (pr.timed_out) {
        out.status = SolveStatus::Timeout;
        return out;
    }
    const std::string verdict = first_word(pr.output);
    if (verdict == "unsat") {
        out.status = SolveStatus::Unsat;
        return out;
    }
    if (verdict != "sat") {
        const std::string head = pr.output.substr(0, 200);
        throw SolverError("solver failed (exit " + std::to_string(pr.exit_code) + "): " +
                          (head.empty() ? std::string("no output") : head));
    }
    std::map<std::string, std::int64_t> model;
    try {
        model = parse_model(pr.output, cs);
    } catch (const ParseError& e) {
        throw SolverError(std::string("unreadable model: ") + e.what());
    }
    Schedule sched = schedule_from_model(req.scenario, cs, model);
    if (!validate_schedule(req.scenario, sched, req.mode).empty()) {
        throw SolverError("solver model violates the constraint set");
    }
    out.status = SolveStatus::Sat;
    out.schedule = std::move(sched);
    return out;
}

} // namespace ttubs
