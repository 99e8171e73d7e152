#pragma once

#include <charconv>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "dmet/cross_metric.hpp"
#include "dmet/distortion.hpp"
#include "dmet/euclid_ray.hpp"
#include "dmet/partial_bijection.hpp"
#include "dmet/polar_grid.hpp"
#include "dmet/prefix_map.hpp"
#include "dmet/ray_analysis.hpp"
#include "dmet/scale_family.hpp"
#include "dmet/tree.hpp"

// File formats. Numbers travel as decimal strings so integer and dyadic
// fixtures survive a round trip bit for bit and diffs stay readable.

namespace dmet::io {

using nlohmann::json;

struct FormatError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

inline std::string to_decimal(double v) {
    char buf[64];
    auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    if (ec != std::errc()) throw FormatError("unrepresentable number");
    return std::string(buf, end);
}

inline double parse_decimal(const json& j, const std::string& where) {
    if (j.is_number()) return j.get<double>();
    if (!j.is_string()) throw FormatError(where + ": expected a decimal string");
    const std::string& s = j.get_ref<const std::string&>();
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size())
        throw FormatError(where + ": bad decimal string '" + s + "'");
    return v;
}

inline const json& field(const json& j, const std::string& key, const std::string& where) {
    auto it = j.find(key);
    if (it == j.end()) throw FormatError(where + ": missing field '" + key + "'");
    return *it;
}

inline json matrix_to_json(const SquareMatrix& m) {
    json rows = json::array();
    for (int i = 0; i < m.size(); ++i) {
        json row = json::array();
        for (int j = 0; j < m.size(); ++j) row.push_back(to_decimal(m(i, j)));
        rows.push_back(std::move(row));
    }
    return rows;
}

inline SquareMatrix matrix_from_json(const json& j, const std::string& where) {
    if (!j.is_array() || j.empty()) throw FormatError(where + ": expected a non-empty matrix");
    const int n = static_cast<int>(j.size());
    SquareMatrix m(n);
    for (int i = 0; i < n; ++i) {
        if (!j[i].is_array() || static_cast<int>(j[i].size()) != n)
            throw FormatError(where + ": matrix is not square");
        for (int k = 0; k < n; ++k)
            m(i, k) = parse_decimal(j[i][k], where + "[" + std::to_string(i) + "][" +
                                                 std::to_string(k) + "]");
    }
    return m;
}

// ---- space files: {points, basepoint, dist} --------------------------------

inline json space_to_json(const FiniteMetricSpace& s) {
    json j;
    j["points"] = s.point_ids;
    j["basepoint"] = s.point_ids[s.basepoint];
    j["dist"] = matrix_to_json(s.dist);
    return j;
}

inline Checked<FiniteMetricSpace> space_from_json(const json& j) {
    auto points = field(j, "points", "space").get<std::vector<std::string>>();
    auto dist = matrix_from_json(field(j, "dist", "space"), "space.dist");
    if (static_cast<int>(points.size()) != dist.size())
        throw FormatError("space: points and dist disagree on the dimension");
    std::string base = field(j, "basepoint", "space").get<std::string>();
    int bi = -1;
    for (size_t i = 0; i < points.size(); ++i)
        if (points[i] == base) bi = static_cast<int>(i);
    if (bi < 0) throw FormatError("space: basepoint label not among points");
    return validate_space(dist, bi, points);
}

// ---- cross files: {space_ref, cross, min_gap} ------------------------------

inline json cross_to_json(const CrossMetric& c, const std::string& space_ref) {
    json j;
    j["space_ref"] = space_ref;
    j["cross"] = matrix_to_json(c.cross);
    j["min_gap"] = to_decimal(c.min_gap);
    return j;
}

inline json read_json_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw FormatError("cannot open " + path.string());
    return json::parse(in);  // parse_error carries the byte position
}

inline SpacePtr load_space(const std::filesystem::path& path) {
    auto checked = space_from_json(read_json_file(path));
    if (!checked.ok())
        throw std::invalid_argument("space file " + path.string() + " rejected:\n" +
                                    checked.report.summary());
    return std::make_shared<const FiniteMetricSpace>(std::move(*checked.value));
}

inline Checked<CrossMetric> cross_from_json(const json& j, const std::filesystem::path& dir) {
    std::string ref = field(j, "space_ref", "cross").get<std::string>();
    auto space = load_space(dir / ref);
    auto cross = matrix_from_json(field(j, "cross", "cross"), "cross.cross");
    double gap = j.contains("min_gap") ? parse_decimal(j["min_gap"], "cross.min_gap") : 1.0;
    return validate_cross(std::move(space), cross, gap);
}

inline CrossMetric load_cross(const std::filesystem::path& path) {
    auto checked = cross_from_json(read_json_file(path), path.parent_path());
    if (!checked.ok())
        throw std::invalid_argument("cross file " + path.string() + " rejected:\n" +
                                    checked.report.summary());
    return std::move(*checked.value);
}

// ---- family files: {scales, stages, inclusions} ----------------------------

inline json family_to_json(const ScaleFamily& fam) {
    json j;
    json scales = json::array();
    for (double s : fam.scales) scales.push_back(to_decimal(s));
    j["scales"] = std::move(scales);
    json stages = json::array();
    for (const auto& st : fam.stages) {
        json stage;
        stage["space"] = space_to_json(st.space());
        stage["cross"] = {{"cross", matrix_to_json(st.cross.cross)},
                          {"min_gap", to_decimal(st.cross.min_gap)}};
        stages.push_back(std::move(stage));
    }
    j["stages"] = std::move(stages);
    json incs = json::array();
    for (size_t t = 0; t + 1 < fam.stages.size(); ++t) {
        json inc = json::array();
        const auto& next_ids = fam.stages[t + 1].space().point_ids;
        for (int target : fam.stages[t].inclusion) inc.push_back(next_ids[target]);
        incs.push_back(std::move(inc));
    }
    j["inclusions"] = std::move(incs);
    return j;
}

inline ScaleFamily family_from_json(const json& j) {
    ScaleFamily fam;
    for (const auto& s : field(j, "scales", "family"))
        fam.scales.push_back(parse_decimal(s, "family.scales"));
    for (const auto& stage : field(j, "stages", "family")) {
        auto space_checked = space_from_json(field(stage, "space", "family.stage"));
        if (!space_checked.ok())
            throw std::invalid_argument("family stage space rejected:\n" +
                                        space_checked.report.summary());
        auto space = std::make_shared<const FiniteMetricSpace>(std::move(*space_checked.value));
        const auto& cj = field(stage, "cross", "family.stage");
        auto cross = matrix_from_json(field(cj, "cross", "family.stage.cross"), "family cross");
        double gap = cj.contains("min_gap") ? parse_decimal(cj["min_gap"], "min_gap") : 1.0;
        auto checked = validate_cross(space, cross, gap);
        if (!checked.ok())
            throw std::invalid_argument("family stage cross rejected:\n" +
                                        checked.report.summary());
        fam.stages.push_back({std::move(*checked.value), {}});
    }
    const auto& incs = field(j, "inclusions", "family");
    if (incs.size() + 1 != fam.stages.size())
        throw FormatError("family: need one inclusion list per consecutive stage pair");
    for (size_t t = 0; t < incs.size(); ++t) {
        const auto& next = fam.stages[t + 1].space();
        for (const auto& label : incs[t]) {
            int idx = next.index_of(label.get<std::string>());
            if (idx < 0) throw FormatError("family: inclusion label not in the next stage");
            fam.stages[t].inclusion.push_back(idx);
        }
    }
    auto report = validate_family(fam);
    if (!report.ok())
        throw std::invalid_argument("family rejected:\n" + report.summary());
    return fam;
}

// ---- tree files: {depth, children by level} --------------------------------

inline json tree_to_json(const RootedTreeTruncation& t) {
    json j;
    j["depth"] = t.depth();
    json levels = json::array();
    for (int d = 0; d < t.depth(); ++d) {
        json level = json::array();
        for (int v = d == 0 ? 0 : t.nodes_to_depth(d - 1); v < t.nodes_to_depth(d); ++v)
            level.push_back(t.child_count(v));
        levels.push_back(std::move(level));
    }
    j["children"] = std::move(levels);
    return j;
}

inline RootedTreeTruncation tree_from_json(const json& j, int depth_cap = 0) {
    int depth = field(j, "depth", "tree").get<int>();
    const auto& levels = field(j, "children", "tree");
    if (static_cast<int>(levels.size()) != depth)
        throw FormatError("tree: children must list every level up to the depth");
    if (depth_cap > 0 && depth_cap < depth) depth = depth_cap;
    std::vector<std::vector<int>> counts;
    for (int d = 0; d < depth; ++d) counts.push_back(levels[d].get<std::vector<int>>());
    return RootedTreeTruncation::from_child_counts(counts);
}

// ---- prefix map files: {pairs: [{u, v, C}]} --------------------------------

inline json prefix_map_to_json(const PrefixMap& m) {
    json pairs = json::array();
    for (const auto& p : m.pairs)
        pairs.push_back({{"u", RootedTreeTruncation::word_to_string(p.u)},
                         {"v", RootedTreeTruncation::word_to_string(p.v)},
                         {"C", to_decimal(p.C)}});
    return json{{"pairs", std::move(pairs)}};
}

inline PrefixMap prefix_map_from_json(const json& j) {
    PrefixMap m;
    for (const auto& p : field(j, "pairs", "prefix map")) {
        PrefixPair pair;
        pair.u = RootedTreeTruncation::word_from_string(
            field(p, "u", "prefix pair").get<std::string>());
        pair.v = RootedTreeTruncation::word_from_string(
            field(p, "v", "prefix pair").get<std::string>());
        pair.C = parse_decimal(field(p, "C", "prefix pair"), "prefix pair C");
        m.pairs.push_back(std::move(pair));
    }
    return m;
}

// ---- grid files: {n, directions, radii} ------------------------------------

inline json grid_to_json(const PolarGrid& g) {
    json j;
    j["n"] = g.dim;
    json dirs = json::array();
    for (const auto& d : g.directions) {
        json v = json::array();
        for (double x : d) v.push_back(to_decimal(x));
        dirs.push_back(std::move(v));
    }
    j["directions"] = std::move(dirs);
    json radii = json::array();
    for (double r : g.radii) radii.push_back(to_decimal(r));
    j["radii"] = std::move(radii);
    return j;
}

inline PolarGrid grid_from_json(const json& j, double rmax_cap = 0.0) {
    int dim = field(j, "n", "grid").get<int>();
    std::vector<Vec> dirs;
    for (const auto& d : field(j, "directions", "grid")) {
        Vec v;
        for (const auto& x : d) v.push_back(parse_decimal(x, "grid.directions"));
        dirs.push_back(std::move(v));
    }
    std::vector<double> radii;
    for (const auto& r : field(j, "radii", "grid")) {
        double v = parse_decimal(r, "grid.radii");
        if (rmax_cap <= 0.0 || v <= rmax_cap) radii.push_back(v);
    }
    return make_polar_grid(dim, std::move(dirs), std::move(radii));
}

// ---- isometry files: {matrix, strata} --------------------------------------

inline json isometry_to_json(const PartialIsometry& pi) {
    json j;
    json rows = json::array();
    for (const auto& row : pi.matrix) {
        json r = json::array();
        for (double x : row) r.push_back(to_decimal(x));
        rows.push_back(std::move(r));
    }
    j["matrix"] = std::move(rows);
    json strata = json::array();
    for (const auto& s : pi.strata)
        strata.push_back({{"m", s.weight}, {"directions", s.directions}});
    j["strata"] = std::move(strata);
    return j;
}

inline PartialIsometry isometry_from_json(const json& j) {
    PartialIsometry pi;
    for (const auto& row : field(j, "matrix", "isometry")) {
        Vec r;
        for (const auto& x : row) r.push_back(parse_decimal(x, "isometry.matrix"));
        pi.matrix.push_back(std::move(r));
    }
    for (const auto& s : field(j, "strata", "isometry"))
        pi.strata.push_back({field(s, "m", "stratum").get<int>(),
                             field(s, "directions", "stratum").get<std::vector<int>>()});
    return pi;
}

// ---- partial bijections (reports, S_Phi problems); 1-based in files --------

inline json partial_bijection_to_json(const PartialBijection& s) {
    json pairs = json::array();
    for (int i = 0; i < s.universe_size(); ++i)
        if (s.defined_at(i)) pairs.push_back({i + 1, s.apply(i) + 1});
    return json{{"n", s.universe_size()}, {"pairs", std::move(pairs)}};
}

inline PartialBijection partial_bijection_from_json(const json& j) {
    PartialBijection s(field(j, "n", "partial bijection").get<int>());
    for (const auto& p : field(j, "pairs", "partial bijection")) {
        if (!p.is_array() || p.size() != 2) throw FormatError("partial bijection: bad pair");
        s.set(p[0].get<int>() - 1, p[1].get<int>() - 1);
    }
    return s;
}

// ---- verdict and profile rendering -----------------------------------------

inline json verdict_to_json(const EquivalenceVerdict& v) {
    json j;
    j["status"] = to_string(v.status);
    if (v.stabilization_stage) j["stabilization_stage"] = *v.stabilization_stage;
    else j["stabilization_stage"] = nullptr;
    json env;
    json thresholds = json::array();
    for (double t : v.forward.thresholds) thresholds.push_back(to_decimal(t));
    env["thresholds"] = std::move(thresholds);
    json fwd = json::array(), bwd = json::array();
    for (double x : v.forward.envelope()) fwd.push_back(to_decimal(x));
    for (double x : v.backward.envelope()) bwd.push_back(to_decimal(x));
    env["forward"] = std::move(fwd);
    env["backward"] = std::move(bwd);
    j["envelope"] = std::move(env);
    if (!v.note.empty()) j["note"] = v.note;
    return j;
}

inline std::string profile_csv(const ScaleFamily& fam, const DistortionProfile& fwd,
                               const DistortionProfile& bwd) {
    std::ostringstream os;
    os << "scale,threshold,phi_forward,phi_backward\n";
    for (size_t s = 0; s < fwd.values.size(); ++s)
        for (size_t k = 0; k < fwd.thresholds.size(); ++k)
            os << to_decimal(fam.scales[s]) << "," << to_decimal(fwd.thresholds[k]) << ","
               << to_decimal(fwd.values[s][k]) << "," << to_decimal(bwd.values[s][k]) << "\n";
    return os.str();
}

inline std::string ray_csv(const ScaleFamily& fam, const RayStrata& st) {
    std::ostringstream os;
    os << "ray_id,stage,tail_sup,verdict,bound\n";
    for (const auto& est : st.estimates)
        for (size_t s = 0; s < est.tail_sup.size(); ++s)
            os << est.ray_id << "," << to_decimal(fam.scales[s]) << ","
               << to_decimal(est.tail_sup[s]) << ","
               << (est.verdict == RayVerdict::Finite ? "FINITE" : "DIVERGENT") << ","
               << (est.verdict == RayVerdict::Finite ? to_decimal(est.bound) : "") << "\n";
    return os.str();
}

inline json violations_to_json(const ValidationReport& report) {
    json out = json::array();
    for (const auto& v : report.violations) {
        json w = json::array();
        for (int i : v.where)
            if (i >= 0) w.push_back(i);
        out.push_back({{"rule", v.rule}, {"where", std::move(w)}, {"detail", v.detail}});
    }
    return out;
}

// Atomic write: everything is rendered first, then moved into place, so a
// failing run never leaves a truncated artifact behind.
inline void write_file_atomic(const std::filesystem::path& path, const std::string& content) {
    auto tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw std::runtime_error("cannot write " + tmp.string());
        out << content;
    }
    std::filesystem::rename(tmp, path);
}

inline std::string fnv64_hex(const std::string& bytes) {
    unsigned long long h = 1469598103934665603ull;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 1099511628211ull;
    }
    std::ostringstream os;
    os << std::hex << h;
    return os.str();
}

}  // namespace dmet::io
