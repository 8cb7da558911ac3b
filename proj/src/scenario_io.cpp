#include "catchup/scenario_io.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

namespace catchup {

namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& path, const std::string& what) {
    throw scenario_parse_error(path.empty() ? what : path + ": " + what);
}

void expect_keys(const json& j, const std::string& path,
                 std::initializer_list<const char*> allowed) {
    if (!j.is_object()) fail(path, "expected an object");
    std::set<std::string> ok(allowed.begin(), allowed.end());
    for (auto it = j.begin(); it != j.end(); ++it)
        if (!ok.count(it.key())) fail(path + "." + it.key(), "unknown field");
}

double get_number(const json& j, const std::string& path) {
    if (!j.is_number()) fail(path, "expected a number");
    return j.get<double>();
}

double get_number(const json& j, const std::string& path, const char* key,
                  double fallback) {
    if (!j.contains(key)) return fallback;
    return get_number(j.at(key), path + "." + key);
}

int get_int(const json& j, const std::string& path, const char* key, int fallback) {
    if (!j.contains(key)) return fallback;
    const json& v = j.at(key);
    if (!v.is_number_integer()) fail(path + "." + key, "expected an integer");
    return v.get<int>();
}

std::string get_string(const json& j, const std::string& path, const char* key) {
    if (!j.contains(key)) fail(path + "." + key, "missing required field");
    const json& v = j.at(key);
    if (!v.is_string()) fail(path + "." + key, "expected a string");
    return v.get<std::string>();
}

Vec get_vec(const json& j, const std::string& path) {
    if (!j.is_array()) fail(path, "expected an array of numbers");
    Vec v;
    for (std::size_t i = 0; i < j.size(); ++i)
        v.push_back(get_number(j[i], path + "[" + std::to_string(i) + "]"));
    return v;
}

Vec get_vec(const json& j, const std::string& path, const char* key, Vec fallback) {
    if (!j.contains(key)) return fallback;
    return get_vec(j.at(key), path + "." + key);
}

Mat get_mat(const json& j, const std::string& path) {
    if (!j.is_array() || j.empty()) fail(path, "expected a nonempty array of rows");
    std::vector<Vec> rows;
    for (std::size_t i = 0; i < j.size(); ++i)
        rows.push_back(get_vec(j[i], path + "[" + std::to_string(i) + "]"));
    Mat m(rows.size(), rows[0].size());
    for (std::size_t i = 0; i < rows.size(); ++i) {
        if (rows[i].size() != m.cols) fail(path, "ragged matrix rows");
        for (std::size_t k = 0; k < m.cols; ++k) m(i, k) = rows[i][k];
    }
    return m;
}

BVClock parse_clock(const json& j, const std::string& path, double horizon) {
    expect_keys(j, path, {"ac_pieces", "atoms"});
    std::vector<PolyPiece> pieces;
    if (j.contains("ac_pieces")) {
        const json& jp = j.at("ac_pieces");
        if (!jp.is_array()) fail(path + ".ac_pieces", "expected an array");
        for (std::size_t i = 0; i < jp.size(); ++i) {
            const std::string p = path + ".ac_pieces[" + std::to_string(i) + "]";
            expect_keys(jp[i], p, {"start", "coeffs"});
            PolyPiece piece;
            piece.start = get_number(jp[i], p, "start", 0.0);
            if (!jp[i].contains("coeffs")) fail(p + ".coeffs", "missing required field");
            piece.coeffs = get_vec(jp[i].at("coeffs"), p + ".coeffs");
            pieces.push_back(std::move(piece));
        }
    }
    std::vector<ClockAtom> atoms;
    if (j.contains("atoms")) {
        const json& ja = j.at("atoms");
        if (!ja.is_array()) fail(path + ".atoms", "expected an array");
        for (std::size_t i = 0; i < ja.size(); ++i) {
            const std::string p = path + ".atoms[" + std::to_string(i) + "]";
            expect_keys(ja[i], p, {"t", "size"});
            ClockAtom a;
            if (!ja[i].contains("t")) fail(p + ".t", "missing required field");
            if (!ja[i].contains("size")) fail(p + ".size", "missing required field");
            a.time = get_number(ja[i].at("t"), p + ".t");
            a.size = get_number(ja[i].at("size"), p + ".size");
            if (!(a.size > 0.0)) fail(p + ".size", "atom size must be positive");
            atoms.push_back(a);
        }
    }
    try {
        return BVClock(std::move(pieces), std::move(atoms), horizon);
    } catch (const std::exception& e) {
        fail(path, e.what());
    }
}

ConvexSet parse_set(const json& j, const std::string& path) {
    expect_keys(j, path,
                {"kind", "lo", "hi", "center", "radius", "normal", "offset", "g", "h"});
    const std::string kind = get_string(j, path, "kind");
    try {
        if (kind == "box")
            return ConvexSet::box(get_vec(j.at("lo"), path + ".lo"),
                                  get_vec(j.at("hi"), path + ".hi"));
        if (kind == "ball")
            return ConvexSet::ball(get_vec(j.at("center"), path + ".center"),
                                   get_number(j.at("radius"), path + ".radius"));
        if (kind == "half_space")
            return ConvexSet::half_space(get_vec(j.at("normal"), path + ".normal"),
                                         get_number(j.at("offset"), path + ".offset"));
        if (kind == "polyhedron")
            return ConvexSet::polyhedron(get_mat(j.at("g"), path + ".g"),
                                         get_vec(j.at("h"), path + ".h"));
    } catch (const json::exception&) {
        fail(path, "missing parameters for set kind '" + kind + "'");
    } catch (const std::invalid_argument& e) {
        fail(path, e.what());
    }
    fail(path + ".kind", "unknown set kind '" + kind + "'");
}

OperatorFamily parse_operator(const json& j, const std::string& path, const BVClock& clock,
                              double gamma, double c) {
    expect_keys(j, path,
                {"kind", "set", "offset0", "offset_dir", "scale_coef", "state_map",
                 "function", "q", "matrix"});
    const std::string kind = get_string(j, path, "kind");
    try {
        if (kind == "normal_cone") {
            if (!j.contains("set")) fail(path + ".set", "missing required field");
            MovingSetSpec spec{parse_set(j.at("set"), path + ".set"), {}, {}, 0.0, {}};
            spec.offset0 = get_vec(j, path, "offset0", {});
            spec.offset_dir = get_vec(j, path, "offset_dir", {});
            spec.scale_coef = get_number(j, path, "scale_coef", 0.0);
            if (j.contains("state_map"))
                spec.state_map = get_mat(j.at("state_map"), path + ".state_map");
            return OperatorFamily::moving_normal_cone(std::move(spec), clock, gamma, c);
        }
        if (kind == "subdifferential") {
            const std::string fn = get_string(j, path, "function");
            if (fn == "abs") {
                // dimension comes from the scenario top level; patched below
                return OperatorFamily::subdiff_abs(1, clock, c);
            }
            if (fn == "quadratic")
                return OperatorFamily::subdiff_quadratic(get_mat(j.at("q"), path + ".q"),
                                                         clock, c);
            if (fn == "indicator") {
                if (!j.contains("set")) fail(path + ".set", "missing required field");
                return OperatorFamily::subdiff_indicator(parse_set(j.at("set"), path + ".set"),
                                                         clock, c);
            }
            fail(path + ".function", "unknown function '" + fn + "'");
        }
        if (kind == "linear")
            return OperatorFamily::linear(get_mat(j.at("matrix"), path + ".matrix"), clock, c);
    } catch (const json::exception&) {
        fail(path, "missing parameters for operator kind '" + kind + "'");
    } catch (const std::invalid_argument& e) {
        fail(path, e.what());
    }
    fail(path + ".kind", "unknown operator kind '" + kind + "'");
}

Perturbation parse_perturbation(const json& j, const std::string& path, std::size_t dim) {
    expect_keys(j, path, {"e", "l1", "l1_tpoly", "l2", "l2_tpoly", "saturation"});
    std::vector<std::vector<double>> e;
    if (j.contains("e")) {
        const json& je = j.at("e");
        if (!je.is_array()) fail(path + ".e", "expected an array of coefficient lists");
        for (std::size_t i = 0; i < je.size(); ++i)
            e.push_back(get_vec(je[i], path + ".e[" + std::to_string(i) + "]"));
    }
    Mat l1, l2;
    if (j.contains("l1")) l1 = get_mat(j.at("l1"), path + ".l1");
    if (j.contains("l2")) l2 = get_mat(j.at("l2"), path + ".l2");
    std::vector<double> p1 = get_vec(j, path, "l1_tpoly", {});
    std::vector<double> p2 = get_vec(j, path, "l2_tpoly", {});
    std::optional<Saturation> sat;
    if (j.contains("saturation")) {
        const json& js = j.at("saturation");
        const std::string p = path + ".saturation";
        expect_keys(js, p, {"dir", "amp", "alpha", "wx", "wy"});
        Saturation s;
        if (!js.contains("dir")) fail(p + ".dir", "missing required field");
        s.dir = get_vec(js.at("dir"), p + ".dir");
        s.amp = get_number(js, p, "amp", 0.0);
        s.alpha = get_number(js, p, "alpha", 1.0);
        s.wx = get_vec(js, p, "wx", {});
        s.wy = get_vec(js, p, "wy", {});
        sat = std::move(s);
    }
    try {
        return Perturbation(dim, std::move(e), std::move(l1), std::move(p1), std::move(l2),
                            std::move(p2), std::move(sat));
    } catch (const std::invalid_argument& err) {
        fail(path, err.what());
    }
}

json vec_json(const Vec& v) { return json(v); }

json mat_json(const Mat& m) {
    json rows = json::array();
    for (std::size_t i = 0; i < m.rows; ++i) {
        json row = json::array();
        for (std::size_t k = 0; k < m.cols; ++k) row.push_back(m(i, k));
        rows.push_back(std::move(row));
    }
    return rows;
}

json set_json(const ConvexSet& s) {
    json j;
    switch (s.kind()) {
        case SetKind::Box:
            j["kind"] = "box";
            j["lo"] = vec_json(s.box_lo());
            j["hi"] = vec_json(s.box_hi());
            break;
        case SetKind::Ball:
            j["kind"] = "ball";
            j["center"] = vec_json(s.ball_center());
            j["radius"] = s.ball_radius();
            break;
        case SetKind::HalfSpace:
            j["kind"] = "half_space";
            j["normal"] = vec_json(s.hs_normal());
            j["offset"] = s.hs_offset();
            break;
        case SetKind::Polyhedron:
            j["kind"] = "polyhedron";
            j["g"] = mat_json(s.poly_g());
            j["h"] = vec_json(s.poly_h());
            break;
    }
    return j;
}

}  // namespace

Scenario parse_scenario(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        throw scenario_parse_error(std::string("invalid JSON: ") + e.what());
    }
    expect_keys(j, "",
                {"dimension", "horizon", "clock", "operator", "perturbation", "initial",
                 "constants", "schedule", "tolerances"});

    Scenario scn;
    if (!j.contains("dimension")) fail("dimension", "missing required field");
    const int dim = get_int(j, "", "dimension", 0);
    if (dim < 1) fail("dimension", "must be a positive integer");
    scn.dimension = std::size_t(dim);
    if (!j.contains("horizon")) fail("horizon", "missing required field");
    scn.horizon = get_number(j.at("horizon"), "horizon");
    if (!(scn.horizon > 0.0)) fail("horizon", "must be positive");

    scn.clock = j.contains("clock") ? parse_clock(j.at("clock"), "clock", scn.horizon)
                                    : BVClock::trivial(scn.horizon);

    if (j.contains("constants")) {
        const json& jc = j.at("constants");
        expect_keys(jc, "constants", {"gamma", "c", "m", "k_bound"});
        scn.gamma = get_number(jc, "constants", "gamma", 0.0);
        scn.c = get_number(jc, "constants", "c", 0.0);
        scn.m = get_number(jc, "constants", "m", 0.0);
        scn.k_bound = get_number(jc, "constants", "k_bound", 0.0);
        if (scn.gamma < 0 || scn.c < 0 || scn.m < 0 || scn.k_bound < 0)
            fail("constants", "hypothesis constants must be nonnegative");
    }

    if (!j.contains("operator")) fail("operator", "missing required field");
    scn.op = parse_operator(j.at("operator"), "operator", scn.clock, scn.gamma, scn.c);
    if (scn.op.kind() == OperatorKind::SubdiffAbs)
        scn.op = OperatorFamily::subdiff_abs(scn.dimension, scn.clock, scn.c);
    if (scn.op.dim() != scn.dimension)
        fail("operator", "operator dimension " + std::to_string(scn.op.dim()) +
                             " does not match scenario dimension");

    scn.f = j.contains("perturbation")
                ? parse_perturbation(j.at("perturbation"), "perturbation", scn.dimension)
                : Perturbation::zero(scn.dimension);

    if (!j.contains("initial")) fail("initial", "missing required field");
    {
        const json& ji = j.at("initial");
        expect_keys(ji, "initial", {"u0", "v0"});
        if (!ji.contains("u0")) fail("initial.u0", "missing required field");
        if (!ji.contains("v0")) fail("initial.v0", "missing required field");
        scn.u0 = get_vec(ji.at("u0"), "initial.u0");
        scn.v0 = get_vec(ji.at("v0"), "initial.v0");
        if (scn.u0.size() != scn.dimension || scn.v0.size() != scn.dimension)
            fail("initial", "u0/v0 dimension mismatch");
    }

    if (j.contains("schedule")) {
        const json& js = j.at("schedule");
        expect_keys(js, "schedule", {"eps0", "ratio", "levels"});
        scn.schedule.eps0 = get_number(js, "schedule", "eps0", scn.schedule.eps0);
        scn.schedule.ratio = get_number(js, "schedule", "ratio", scn.schedule.ratio);
        scn.schedule.levels = get_int(js, "schedule", "levels", scn.schedule.levels);
        if (!(scn.schedule.eps0 > 0)) fail("schedule.eps0", "must be positive");
        if (!(scn.schedule.ratio > 0 && scn.schedule.ratio < 1))
            fail("schedule.ratio", "must lie in (0, 1)");
        if (scn.schedule.levels < 1) fail("schedule.levels", "must be at least 1");
    }

    if (j.contains("tolerances")) {
        const json& jt = j.at("tolerances");
        expect_keys(jt, "tolerances", {"inclusion", "domain", "cauchy", "vi_base"});
        scn.tol.inclusion = get_number(jt, "tolerances", "inclusion", scn.tol.inclusion);
        scn.tol.domain = get_number(jt, "tolerances", "domain", scn.tol.domain);
        scn.tol.cauchy = get_number(jt, "tolerances", "cauchy", scn.tol.cauchy);
        scn.tol.vi_base = get_number(jt, "tolerances", "vi_base", scn.tol.vi_base);
    }
    return scn;
}

Scenario load_scenario(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw scenario_parse_error("cannot open scenario file: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_scenario(ss.str());
}

std::string serialize_scenario(const Scenario& scn) {
    json j;
    j["dimension"] = scn.dimension;
    j["horizon"] = scn.horizon;

    json clock;
    clock["ac_pieces"] = json::array();
    for (const auto& p : scn.clock.ac_pieces()) {
        json piece;
        piece["start"] = p.start;
        piece["coeffs"] = vec_json(p.coeffs);
        clock["ac_pieces"].push_back(std::move(piece));
    }
    clock["atoms"] = json::array();
    for (const auto& a : scn.clock.atoms()) {
        json atom;
        atom["t"] = a.time;
        atom["size"] = a.size;
        clock["atoms"].push_back(std::move(atom));
    }
    j["clock"] = std::move(clock);

    json op;
    switch (scn.op.kind()) {
        case OperatorKind::MovingNormalCone: {
            const MovingSetSpec& spec = scn.op.moving_spec();
            op["kind"] = "normal_cone";
            op["set"] = set_json(spec.base);
            op["offset0"] = vec_json(spec.offset0);
            op["offset_dir"] = vec_json(spec.offset_dir);
            op["scale_coef"] = spec.scale_coef;
            if (spec.state_map) op["state_map"] = mat_json(*spec.state_map);
            break;
        }
        case OperatorKind::SubdiffAbs:
            op["kind"] = "subdifferential";
            op["function"] = "abs";
            break;
        case OperatorKind::SubdiffQuadratic:
            op["kind"] = "subdifferential";
            op["function"] = "quadratic";
            op["q"] = mat_json(scn.op.quadratic_matrix());
            break;
        case OperatorKind::SubdiffIndicator:
            op["kind"] = "subdifferential";
            op["function"] = "indicator";
            op["set"] = set_json(scn.op.fixed_set());
            break;
        case OperatorKind::Linear:
            op["kind"] = "linear";
            op["matrix"] = mat_json(scn.op.linear_matrix());
            break;
    }
    j["operator"] = std::move(op);

    json f;
    f["e"] = json::array();
    for (const auto& c : scn.f.e_coeffs()) f["e"].push_back(vec_json(c));
    if (!scn.f.l1().empty()) {
        f["l1"] = mat_json(scn.f.l1());
        f["l1_tpoly"] = vec_json(scn.f.l1_tpoly());
    }
    if (!scn.f.l2().empty()) {
        f["l2"] = mat_json(scn.f.l2());
        f["l2_tpoly"] = vec_json(scn.f.l2_tpoly());
    }
    if (scn.f.saturation()) {
        const Saturation& s = *scn.f.saturation();
        json sat;
        sat["dir"] = vec_json(s.dir);
        sat["amp"] = s.amp;
        sat["alpha"] = s.alpha;
        sat["wx"] = vec_json(s.wx);
        sat["wy"] = vec_json(s.wy);
        f["saturation"] = std::move(sat);
    }
    j["perturbation"] = std::move(f);

    j["initial"]["u0"] = vec_json(scn.u0);
    j["initial"]["v0"] = vec_json(scn.v0);
    j["constants"]["gamma"] = scn.gamma;
    j["constants"]["c"] = scn.c;
    j["constants"]["m"] = scn.m;
    j["constants"]["k_bound"] = scn.k_bound;
    j["schedule"]["eps0"] = scn.schedule.eps0;
    j["schedule"]["ratio"] = scn.schedule.ratio;
    j["schedule"]["levels"] = scn.schedule.levels;
    j["tolerances"]["inclusion"] = scn.tol.inclusion;
    j["tolerances"]["domain"] = scn.tol.domain;
    j["tolerances"]["cauchy"] = scn.tol.cauchy;
    j["tolerances"]["vi_base"] = scn.tol.vi_base;
    return j.dump(2) + "\n";
}

}  // namespace catchup
