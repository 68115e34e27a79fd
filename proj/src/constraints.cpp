#include "ttubs/constraints.hpp"

#include <algorithm>
#include <map>
#include <ostream>

namespace ttubs {

std::string_view to_string(Category c)
{
    switch (c) {
    case Category::Frame:
        return "Frame";
    case Category::Link:
        return "Link";
    case Category::FlowTransmission:
        return "Flow";
    case Category::E2E:
        return "E2E";
    case Category::FrameIsolation:
        return "Isolation";
    }
    return "?";
}

Atom Atom::less_eq(std::vector<Term> terms, std::int64_t bound)
{
    std::map<std::size_t, std::int64_t> merged;
    for (const Term& t : terms) {
        merged[t.var] += t.coeff;
    }
    Atom a;
    a.kind = Kind::LessEq;
    a.bound = bound;
    // keep caller order for readability of the encoding
    for (const Term& t : terms) {
        auto it = merged.find(t.var);
        if (it != merged.end()) {
            if (it->second != 0) {
                a.terms.push_back({t.var, it->second});
            }
            merged.erase(it);
        }
    }
    return a;
}

Atom Atom::not_equal(std::size_t a, std::size_t b)
{
    Atom out;
    out.kind = Kind::NotEqual;
    out.terms = {{a, 1}, {b, 1}};
    return out;
}

namespace {

/// Links carrying at least two streams.
std::vector<bool> shared_links(const Scenario& sc)
{
    std::vector<int> count(sc.links.size(), 0);
    for (const Stream& st : sc.streams) {
        for (LinkIndex l : st.route) {
            ++count.at(l);
        }
    }
    std::vector<bool> out(sc.links.size());
    for (std::size_t i = 0; i < count.size(); ++i) {
        out[i] = count[i] >= 2;
    }
    return out;
}

std::string frame_tag(const Scenario& sc, StreamIndex s, std::int64_t k)
{
    return sc.streams[s].id + "#" + std::to_string(k);
}

} // namespace

VariableTable::VariableTable(const Scenario& sc, Mode mode) : horizons_(stream_horizons(sc))
{
    const std::size_t n = sc.streams.size();
    first_offset_.resize(n);
    queue_.resize(n);
    periods_.resize(n);
    for (StreamIndex s = 0; s < n; ++s) {
        const Stream& st = sc.streams[s];
        periods_[s] = st.period;
        const std::int64_t slots = horizons_[s] / st.period;
        for (std::size_t h = 0; h < st.route.size(); ++h) {
            first_offset_[s].push_back(vars_.size());
            for (std::int64_t k = 0; k < slots; ++k) {
                Variable v;
                v.kind = VarKind::Offset;
                v.stream = s;
                v.link = st.route[h];
                v.hop = h;
                v.slot = k;
                v.name = "p_s" + std::to_string(s) + "_l" + std::to_string(st.route[h]) + "_k" + std::to_string(k);
                vars_.push_back(std::move(v));
            }
        }
        queue_[s].assign(st.route.size(), std::nullopt);
    }
    offset_count_ = vars_.size();
    if (mode != Mode::WA) {
        return;
    }
    const auto shared = shared_links(sc);
    for (StreamIndex s = 0; s < n; ++s) {
        const Stream& st = sc.streams[s];
        for (std::size_t h = 0; h < st.route.size(); ++h) {
            const LinkIndex l = st.route[h];
            if (!shared[l]) {
                continue;
            }
            Variable v;
            v.kind = VarKind::Queue;
            v.stream = s;
            v.link = l;
            v.hop = h;
            v.lo = 0;
            v.hi = sc.links[l].queue_count - 1;
            v.name = "q_s" + std::to_string(s) + "_l" + std::to_string(l);
            queue_[s][h] = vars_.size();
            vars_.push_back(std::move(v));
        }
    }
}

std::size_t VariableTable::offset_var(StreamIndex s, std::size_t hop, std::int64_t slot) const
{
    return first_offset_.at(s).at(hop) + static_cast<std::size_t>(slot);
}

std::optional<std::size_t> VariableTable::queue_var(StreamIndex s, std::size_t hop) const
{
    return queue_.at(s).at(hop);
}

std::int64_t VariableTable::slots(StreamIndex s) const
{
    return horizons_.at(s) / periods_.at(s);
}

namespace {

class Builder {
public:
    Builder(const Scenario& sc, Mode mode) : sc_(sc), table_(sc, mode) {}

    [[nodiscard]] const VariableTable& table() const { return table_; }

    void frame(std::vector<GroundConstraint>& out) const
    {
        for (StreamIndex s = 0; s < sc_.streams.size(); ++s) {
            const Stream& st = sc_.streams[s];
            for (std::size_t h = 0; h < st.route.size(); ++h) {
                const Nanos dur = frame_duration(sc_, s, st.route[h]);
                const bool pinned = sc_.pin_talker_offsets && h == 0;
                for (std::int64_t k = 0; k < table_.slots(s); ++k) {
                    const std::size_t v = table_.offset_var(s, h, k);
                    GroundConstraint c;
                    c.category = Category::Frame;
                    c.atoms.push_back(Atom::less_eq({{v, -1}}, 0));
                    c.atoms.push_back(Atom::less_eq({{v, 1}}, pinned ? 0 : st.period - dur));
                    c.label = "frame " + frame_tag(sc_, s, k) + " on " + sc_.link_name(st.route[h]);
                    out.push_back(std::move(c));
                }
            }
        }
    }

    void link(std::vector<GroundConstraint>& out) const
    {
        for_each_pair([&](LinkIndex l, StreamIndex i, std::size_t hi, std::int64_t a, StreamIndex j, std::size_t hj,
                          std::int64_t b) {
            const Nanos ti = sc_.streams[i].period;
            const Nanos tj = sc_.streams[j].period;
            const Nanos li = frame_duration(sc_, i, l);
            const Nanos lj = frame_duration(sc_, j, l);
            const std::size_t vi = table_.offset_var(i, hi, a);
            const std::size_t vj = table_.offset_var(j, hj, b);
            GroundConstraint c;
            c.category = Category::Link;
            c.disjunctive = true;
            // i after j, then j after i
            c.atoms.push_back(Atom::less_eq({{vj, 1}, {vi, -1}}, a * ti - b * tj - lj));
            c.atoms.push_back(Atom::less_eq({{vi, 1}, {vj, -1}}, b * tj - a * ti - li));
            c.label = "link " + sc_.link_name(l) + " " + frame_tag(sc_, i, a) + " vs " + frame_tag(sc_, j, b);
            out.push_back(std::move(c));
        });
    }

    void flow(std::vector<GroundConstraint>& out) const
    {
        for (StreamIndex s = 0; s < sc_.streams.size(); ++s) {
            const Stream& st = sc_.streams[s];
            for (std::size_t h = 1; h < st.route.size(); ++h) {
                const LinkIndex up = st.route[h - 1];
                const Link& ul = sc_.links[up];
                const Nanos gap = frame_duration(sc_, s, up) + ul.prop_delay + ul.proc_delay + sc_.sync_precision;
                for (std::int64_t k = 0; k < table_.slots(s); ++k) {
                    GroundConstraint c;
                    c.category = Category::FlowTransmission;
                    c.atoms.push_back(
                        Atom::less_eq({{table_.offset_var(s, h - 1, k), 1}, {table_.offset_var(s, h, k), -1}}, -gap));
                    c.label = "flow " + frame_tag(sc_, s, k) + " " + sc_.link_name(up) + " => " +
                              sc_.link_name(st.route[h]);
                    out.push_back(std::move(c));
                }
            }
        }
    }

    void e2e(std::vector<GroundConstraint>& out) const
    {
        for (StreamIndex s = 0; s < sc_.streams.size(); ++s) {
            const Stream& st = sc_.streams[s];
            const std::size_t last = st.route.size() - 1;
            const Nanos l_last = frame_duration(sc_, s, st.route[last]);
            for (std::int64_t k = 0; k < table_.slots(s); ++k) {
                GroundConstraint c;
                c.category = Category::E2E;
                c.atoms.push_back(Atom::less_eq({{table_.offset_var(s, last, k), 1}, {table_.offset_var(s, 0, k), -1}},
                                                st.e2e_deadline - l_last));
                c.label = "e2e " + frame_tag(sc_, s, k);
                out.push_back(std::move(c));
            }
        }
    }

    void isolation(std::vector<GroundConstraint>& out) const
    {
        for_each_pair([&](LinkIndex l, StreamIndex i, std::size_t hi, std::int64_t a, StreamIndex j, std::size_t hj,
                          std::int64_t b) {
            const auto qi = table_.queue_var(i, hi);
            const auto qj = table_.queue_var(j, hj);
            GroundConstraint c;
            c.category = Category::FrameIsolation;
            c.disjunctive = true;
            c.atoms.push_back(arrives_after(j, hj, b, i, hi, a));
            c.atoms.push_back(arrives_after(i, hi, a, j, hj, b));
            c.atoms.push_back(Atom::not_equal(qi.value(), qj.value()));
            c.label = "isolation " + sc_.link_name(l) + " " + frame_tag(sc_, i, a) + " vs " + frame_tag(sc_, j, b);
            out.push_back(std::move(c));
        });
    }

private:
    /// Frame (x, hx, kx) reaches the egress no earlier than frame (y, hy, ky) starts on it.
    [[nodiscard]] Atom arrives_after(StreamIndex x, std::size_t hx, std::int64_t kx, StreamIndex y, std::size_t hy,
                                     std::int64_t ky) const
    {
        const Nanos tx = sc_.streams[x].period;
        const Nanos ty = sc_.streams[y].period;
        const std::size_t vy = table_.offset_var(y, hy, ky);
        if (hx == 0) {
            return Atom::less_eq({{vy, 1}, {table_.offset_var(x, 0, kx), -1}}, kx * tx - ky * ty);
        }
        const LinkIndex up = sc_.streams[x].route[hx - 1];
        const Nanos lead = frame_duration(sc_, x, up) + sc_.links[up].prop_delay + sc_.sync_precision;
        return Atom::less_eq({{vy, 1}, {table_.offset_var(x, hx - 1, kx), -1}}, kx * tx + lead - ky * ty);
    }

    template <class F>
    void for_each_pair(F&& f) const
    {
        for (LinkIndex l = 0; l < sc_.links.size(); ++l) {
            const auto on = sc_.streams_on_link(l);
            for (std::size_t x = 0; x < on.size(); ++x) {
                for (std::size_t y = x + 1; y < on.size(); ++y) {
                    const StreamIndex i = on[x];
                    const StreamIndex j = on[y];
                    const std::size_t hi = *sc_.hop_of(i, l);
                    const std::size_t hj = *sc_.hop_of(j, l);
                    for (std::int64_t a = 0; a < table_.slots(i); ++a) {
                        for (std::int64_t b = 0; b < table_.slots(j); ++b) {
                            f(l, i, hi, a, j, hj, b);
                        }
                    }
                }
            }
        }
    }

    const Scenario& sc_;
    VariableTable table_;
};

} // namespace

std::vector<GroundConstraint> build_frame_constraints(const Scenario& sc)
{
    std::vector<GroundConstraint> out;
    Builder(sc, Mode::NFIC).frame(out);
    return out;
}

std::vector<GroundConstraint> build_link_constraints(const Scenario& sc)
{
    std::vector<GroundConstraint> out;
    Builder(sc, Mode::NFIC).link(out);
    return out;
}

std::vector<GroundConstraint> build_flow_constraints(const Scenario& sc)
{
    std::vector<GroundConstraint> out;
    Builder(sc, Mode::NFIC).flow(out);
    return out;
}

std::vector<GroundConstraint> build_e2e_constraints(const Scenario& sc)
{
    std::vector<GroundConstraint> out;
    Builder(sc, Mode::NFIC).e2e(out);
    return out;
}

std::vector<GroundConstraint> build_isolation_constraints(const Scenario& sc)
{
    std::vector<GroundConstraint> out;
    Builder(sc, Mode::WA).isolation(out);
    return out;
}

ConstraintSet build_constraint_set(const Scenario& sc, Mode mode)
{
    Builder b(sc, mode);
    ConstraintSet cs;
    cs.mode = mode;
    cs.variables = b.table().variables();
    b.frame(cs.constraints);
    b.link(cs.constraints);
    b.flow(cs.constraints);
    b.e2e(cs.constraints);
    if (mode == Mode::WA) {
        b.isolation(cs.constraints);
    }
    return cs;
}

std::int64_t ConstraintCensus::total() const
{
    std::int64_t t = 0;
    for (auto c : counts) {
        t += c;
    }
    return t;
}

ConstraintCensus census(const Scenario& sc, Mode mode)
{
    const auto horizons = stream_horizons(sc);
    ConstraintCensus out;
    std::vector<std::int64_t> slots(sc.streams.size());
    for (StreamIndex s = 0; s < sc.streams.size(); ++s) {
        const Stream& st = sc.streams[s];
        slots[s] = horizons[s] / st.period;
        const auto hops = static_cast<std::int64_t>(st.route.size());
        out[Category::Frame] += hops * slots[s];
        out[Category::FlowTransmission] += (hops - 1) * slots[s];
        out[Category::E2E] += slots[s];
    }
    std::vector<std::vector<StreamIndex>> on(sc.links.size());
    for (StreamIndex s = 0; s < sc.streams.size(); ++s) {
        for (LinkIndex l : sc.streams[s].route) {
            on.at(l).push_back(s);
        }
    }
    for (const auto& streams : on) {
        std::int64_t seen = 0;
        for (StreamIndex s : streams) {
            out[Category::Link] += seen * slots[s];
            seen += slots[s];
        }
    }
    if (mode == Mode::WA) {
        out[Category::FrameIsolation] = out[Category::Link];
    }
    return out;
}

ConstraintCensus census_of(const std::vector<GroundConstraint>& constraints)
{
    ConstraintCensus out;
    for (const auto& c : constraints) {
        ++out[c.category];
    }
    return out;
}

void write_census_csv_header(std::ostream& os)
{
    os << "scenario,devices,streams,frame,link,flow,e2e,isolation,total\n";
}

void write_census_csv_row(std::ostream& os, const std::string& scenario_id, std::int64_t devices, std::int64_t streams,
                          const ConstraintCensus& c)
{
    os << scenario_id << ',' << devices << ',' << streams;
    for (auto n : c.counts) {
        os << ',' << n;
    }
    os << ',' << c.total() << '\n';
}

std::vector<std::int64_t> assignment_from_schedule(const Scenario& sc, const VariableTable& table,
                                                   const Schedule& schedule)
{
    std::vector<std::int64_t> values(table.variables().size(), 0);
    for (std::size_t i = 0; i < values.size(); ++i) {
        const Variable& v = table.variables()[i];
        if (v.kind == VarKind::Offset) {
            values[i] = schedule.at(v.stream, v.hop, v.slot) - v.slot * sc.streams[v.stream].period;
            continue;
        }
        if (v.stream >= schedule.queues.size() || v.hop >= schedule.queues[v.stream].size()) {
            throw InvalidInput("schedule: no queue for " + sc.streams[v.stream].id + " on " + sc.link_name(v.link));
        }
        const int q = schedule.queues[v.stream][v.hop];
        if (q < v.lo || q > v.hi) {
            throw InvalidInput("schedule: queue " + std::to_string(q) + " out of range for " + sc.streams[v.stream].id +
                               " on " + sc.link_name(v.link));
        }
        values[i] = q;
    }
    return values;
}

bool holds(const Atom& atom, const std::vector<std::int64_t>& values)
{
    if (atom.kind == Atom::Kind::NotEqual) {
        return values.at(atom.terms.at(0).var) != values.at(atom.terms.at(1).var);
    }
    std::int64_t lhs = 0;
    for (const Term& t : atom.terms) {
        lhs += t.coeff * values.at(t.var);
    }
    return lhs <= atom.bound;
}

bool holds(const GroundConstraint& c, const std::vector<std::int64_t>& values)
{
    auto ok = [&](const Atom& a) { return holds(a, values); };
    return c.disjunctive ? std::any_of(c.atoms.begin(), c.atoms.end(), ok)
                         : std::all_of(c.atoms.begin(), c.atoms.end(), ok);
}

std::vector<Violation> validate_schedule(const Scenario& sc, const Schedule& schedule, Mode mode)
{
    Builder b(sc, mode);
    const auto values = assignment_from_schedule(sc, b.table(), schedule);
    std::vector<GroundConstraint> all;
    b.frame(all);
    b.link(all);
    b.flow(all);
    b.e2e(all);
    if (mode == Mode::WA) {
        b.isolation(all);
    }
    std::vector<Violation> out;
    for (std::size_t i = 0; i < all.size(); ++i) {
        if (!holds(all[i], values)) {
            out.push_back({i, std::move(all[i])});
        }
    }
    return out;
}

} // namespace ttubs
