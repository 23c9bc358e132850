#include "nlsgraph/graph.hpp"

#include "nlsgraph/errors.hpp"

#include <json.hpp>

#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace nlsgraph {

void SingleKnotGraph::validate() const {
    if (half_lines < 1) throw std::invalid_argument("graph: needs at least one half-line");
    for (double l : pendant_lengths)
        if (!(l > 0.0)) throw std::invalid_argument("graph: pendant lengths must be positive");
    for (double l : loop_lengths)
        if (!(l > 0.0)) throw std::invalid_argument("graph: loop lengths must be positive");
}

void RegularGraph::validate() const {
    if (H < 1) throw std::invalid_argument("graph: needs at least one half-line");
    if (P < 0 || L < 0) throw std::invalid_argument("graph: negative edge counts");
    if (!(ell > 0.0)) throw std::invalid_argument("graph: ell must be positive");
}

SingleKnotGraph RegularGraph::general() const {
    SingleKnotGraph g;
    g.half_lines = H;
    g.pendant_lengths.assign(static_cast<size_t>(P), ell);
    g.loop_lengths.assign(static_cast<size_t>(L), 2.0 * ell);
    return g;
}

double incidence_index(const RegularGraph& g, const HalfLineSplit& s) {
    g.validate();
    if (s.H_plus < 0 || s.H_minus < 0 || s.H_plus + s.H_minus != g.H)
        throw std::invalid_argument("incidence_index: split does not partition the half-lines");
    if (g.compact_edges() == 0)
        throw UnsupportedTopologyError(
            "incidence_index: star graph (P = L = 0), incidence index undefined");
    return static_cast<double>(s.H_plus - s.H_minus) / g.compact_edges();
}

ExistenceVerdict existence_condition(const SingleKnotGraph& g) {
    g.validate();
    double sum = 0.0;
    for (double l : g.pendant_lengths) sum += std::tanh(l);
    for (double l : g.loop_lengths) sum += 2.0 * std::tanh(0.5 * l);
    ExistenceVerdict v;
    v.tanh_sum = sum;
    for (int n = 0; n <= g.half_lines / 2; ++n) {
        if (std::abs(sum - (g.half_lines - 2 * n)) <= 1e-12) {
            v.holds = false;
            v.violating_n = n;
            return v;
        }
    }
    return v;
}

std::vector<HalfLineSplit> enumerate_splits(int H) {
    if (H < 1) throw std::invalid_argument("enumerate_splits: H must be >= 1");
    std::vector<HalfLineSplit> out;
    out.reserve(H + 1);
    for (int plus = H; plus >= 0; --plus) out.push_back({plus, H - plus});
    return out;
}

RegularGraph normalize_loops(const RegularGraph& g) {
    g.validate();
    RegularGraph out = g;
    out.P = g.P + 2 * g.L;
    out.L = 0;
    return out;
}

namespace {

using nlohmann::json;

void reject_unknown_keys(const json& node, std::initializer_list<const char*> allowed,
                         const char* where) {
    for (auto it = node.begin(); it != node.end(); ++it) {
        bool ok = false;
        for (const char* k : allowed)
            if (it.key() == k) ok = true;
        if (!ok)
            throw std::invalid_argument(std::string("graph file: unknown key \"") + it.key() +
                                        "\" in " + where);
    }
}

} // namespace

SingleKnotGraph parse_graph(const std::string& json_text) {
    json doc;
    try {
        doc = json::parse(json_text);
    } catch (const json::parse_error& e) {
        throw std::invalid_argument(std::string("graph file: not valid JSON: ") + e.what());
    }
    if (!doc.is_object()) throw std::invalid_argument("graph file: top level must be an object");
    reject_unknown_keys(doc, {"regular", "general"}, "top level");

    if (doc.contains("regular") == doc.contains("general"))
        throw std::invalid_argument("graph file: exactly one of \"regular\"/\"general\" required");

    SingleKnotGraph g;
    if (doc.contains("regular")) {
        const json& r = doc["regular"];
        reject_unknown_keys(r, {"H", "P", "L", "ell"}, "\"regular\"");
        RegularGraph rg;
        rg.H = r.at("H").get<int>();
        rg.P = r.at("P").get<int>();
        rg.L = r.at("L").get<int>();
        rg.ell = r.at("ell").get<double>();
        rg.validate();
        g = rg.general();
    } else {
        const json& r = doc["general"];
        reject_unknown_keys(r, {"H", "pendants", "loops"}, "\"general\"");
        g.half_lines = r.at("H").get<int>();
        g.pendant_lengths = r.value("pendants", std::vector<double>{});
        g.loop_lengths = r.value("loops", std::vector<double>{});
    }
    g.validate();
    return g;
}

SingleKnotGraph load_graph(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("graph file: cannot open " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_graph(ss.str());
}

std::optional<RegularGraph> as_regular(const SingleKnotGraph& g, double rel_tol) {
    g.validate();
    double ell = 0.0;
    if (!g.pendant_lengths.empty())
        ell = g.pendant_lengths.front();
    else if (!g.loop_lengths.empty())
        ell = 0.5 * g.loop_lengths.front();
    else
        return std::nullopt; // star graph
    auto close = [&](double a, double b) { return std::abs(a - b) <= rel_tol * std::max(a, b); };
    for (double l : g.pendant_lengths)
        if (!close(l, ell)) return std::nullopt;
    for (double l : g.loop_lengths)
        if (!close(l, 2.0 * ell)) return std::nullopt;
    RegularGraph rg;
    rg.H = g.half_lines;
    rg.P = static_cast<int>(g.pendant_lengths.size());
    rg.L = static_cast<int>(g.loop_lengths.size());
    rg.ell = ell;
    return rg;
}

} // namespace nlsgraph
