#include "flagsim/io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "flagsim/errors.hpp"

namespace flagsim::io {

namespace {

json vec_to_json(const Vec& v) { return json(v); }

Vec vec_from_json(const json& j) {
    if (!j.is_array()) throw ParseError("expected a coordinate array");
    return j.get<Vec>();
}

std::vector<Vec> points_from_json(const json& j) {
    std::vector<Vec> out;
    for (const auto& p : j) out.push_back(vec_from_json(p));
    return out;
}

json points_to_json(const std::vector<Vec>& pts) {
    json out = json::array();
    for (const Vec& p : pts) out.push_back(vec_to_json(p));
    return out;
}

}  // namespace

json flag_to_json(const WeightedFlag& flag) {
    json j;
    j["dimension"] = flag.dimension;
    j["nesting_tol"] = flag.nesting_tol;
    json levels = json::array();
    if (flag.is_loop_mode()) {
        const PointsInLoop& lv = flag.pl();
        json pts;
        pts["kind"] = "points";
        pts["positions"] = points_to_json(lv.points.positions);
        pts["weights"] = lv.points.weights;
        levels.push_back(pts);
        json loop;
        loop["kind"] = "loop";
        loop["vertices"] = points_to_json(lv.loop.vertices);
        loop["density"] = lv.loop.density;
        loop["marked"] = lv.loop.marked;
        levels.push_back(loop);
    } else {
        const LoopsInTorus& lv = flag.lt();
        json loops;
        loops["kind"] = "loops";
        loops["columns"] = lv.loops.columns;
        loops["densities"] = lv.loops.densities;
        levels.push_back(loops);
        json torus;
        torus["kind"] = "torus";
        torus["rows"] = lv.torus.rows;
        torus["cols"] = lv.torus.cols;
        torus["grid"] = points_to_json(lv.torus.grid);
        torus["density"] = lv.torus.density;
        torus["marked_columns"] = lv.torus.marked_columns;
        levels.push_back(torus);
    }
    j["levels"] = levels;
    return j;
}

WeightedFlag flag_from_json(const json& j) {
    try {
        WeightedFlag flag;
        flag.dimension = j.at("dimension").get<int>();
        flag.nesting_tol = j.value("nesting_tol", 1e-9);
        const json& levels = j.at("levels");
        if (!levels.is_array() || levels.empty()) throw ParseError("flag: levels missing");
        const std::string kind_last = levels.back().at("kind").get<std::string>();
        if (kind_last == "loop") {
            PointsInLoop lv;
            for (const auto& level : levels) {
                const std::string kind = level.at("kind").get<std::string>();
                if (kind == "points") {
                    lv.points.positions = points_from_json(level.at("positions"));
                    lv.points.weights = level.at("weights").get<std::vector<double>>();
                } else if (kind == "loop") {
                    lv.loop.vertices = points_from_json(level.at("vertices"));
                    lv.loop.density = level.at("density").get<std::vector<double>>();
                    lv.loop.marked = level.value("marked", std::vector<int>{});
                } else {
                    throw ParseError("flag: unknown level kind " + kind);
                }
            }
            flag.levels = std::move(lv);
        } else if (kind_last == "torus") {
            LoopsInTorus lv;
            for (const auto& level : levels) {
                const std::string kind = level.at("kind").get<std::string>();
                if (kind == "loops") {
                    lv.loops.columns = level.at("columns").get<std::vector<int>>();
                    lv.loops.densities =
                        level.at("densities").get<std::vector<std::vector<double>>>();
                } else if (kind == "torus") {
                    lv.torus.rows = level.at("rows").get<int>();
                    lv.torus.cols = level.at("cols").get<int>();
                    lv.torus.grid = points_from_json(level.at("grid"));
                    lv.torus.density = level.at("density").get<std::vector<double>>();
                    lv.torus.marked_columns = level.value("marked_columns", std::vector<int>{});
                } else {
                    throw ParseError("flag: unknown level kind " + kind);
                }
            }
            flag.levels = std::move(lv);
        } else {
            throw ParseError("flag: top level must be a loop or a torus");
        }
        return flag;
    } catch (const json::exception& e) {
        throw ParseError(std::string("flag: ") + e.what());
    }
}

json test_function_to_json(const TestFunction& f) {
    json j;
    json poly = json::array();
    for (const PolyTerm& t : f.poly) {
        json term;
        term["exponents"] = t.exponents;
        term["coeff"] = t.coeff;
        poly.push_back(term);
    }
    j["poly"] = poly;
    json bumps = json::array();
    for (const GaussianBump& b : f.bumps) {
        json bump;
        bump["center"] = vec_to_json(b.center);
        bump["width"] = b.width;
        bump["amp"] = b.amp;
        bumps.push_back(bump);
    }
    j["bumps"] = bumps;
    return j;
}

TestFunction test_function_from_json(const json& j) {
    try {
        TestFunction f;
        for (const auto& term : j.value("poly", json::array())) {
            PolyTerm t;
            t.exponents = term.at("exponents").get<std::vector<int>>();
            t.coeff = term.at("coeff").get<double>();
            f.poly.push_back(std::move(t));
        }
        for (const auto& bump : j.value("bumps", json::array())) {
            GaussianBump b;
            b.center = vec_from_json(bump.at("center"));
            b.width = bump.at("width").get<double>();
            b.amp = bump.at("amp").get<double>();
            if (b.width <= 0.0) throw ParseError("test function: bump width must be positive");
            f.bumps.push_back(std::move(b));
        }
        return f;
    } catch (const json::exception& e) {
        throw ParseError(std::string("test function: ") + e.what());
    }
}

json density_to_json(const DensityFile& d) {
    json j;
    j["n"] = d.values.size();
    j["values"] = d.values;
    j["marked"] = d.marked;
    return j;
}

DensityFile density_from_json(const json& j) {
    try {
        DensityFile d;
        d.values = j.at("values").get<std::vector<double>>();
        d.marked = j.value("marked", std::vector<int>{});
        if (j.contains("n") && j.at("n").get<std::size_t>() != d.values.size())
            throw ParseError("density: declared n does not match the value count");
        return d;
    } catch (const json::exception& e) {
        throw ParseError(std::string("density: ") + e.what());
    }
}

json signature_to_json(const MassSignature& sig) {
    json j;
    j["levels"] = sig.levels;
    j["rational"] = false;
    return j;
}

Rational rational_from_json(const json& entry) {
    if (entry.is_number_integer()) return Rational(entry.get<std::int64_t>());
    if (entry.is_string()) {
        const std::string s = entry.get<std::string>();
        const auto slash = s.find('/');
        try {
            if (slash == std::string::npos) return Rational(std::stoll(s));
            return Rational(std::stoll(s.substr(0, slash)), std::stoll(s.substr(slash + 1)));
        } catch (const std::exception&) {
            throw ParseError("signature: malformed rational '" + s + "'");
        }
    }
    if (entry.is_number_float()) {
        // Every double is an exact dyadic rational; accept the small ones.
        double d = entry.get<double>();
        if (d == 0.0) return Rational(0);
        int e = 0;
        const double m = std::frexp(d, &e);
        const auto mant = static_cast<std::int64_t>(std::ldexp(m, 53));
        const int shift = e - 53;
        if (shift >= 0) {
            if (shift > 10) throw ParseError("signature: rational magnitude too large");
            return Rational(mant << shift);
        }
        if (shift < -62) throw ParseError("signature: rational denominator too large");
        return Rational(mant, static_cast<std::int64_t>(1) << (-shift));
    }
    throw ParseError("signature: rational entries must be integers or 'p/q' strings");
}

SignatureFile signature_from_json(const json& j) {
    try {
        SignatureFile out;
        const bool rational = j.value("rational", false);
        for (const auto& level : j.at("levels")) {
            std::vector<double> row;
            for (const auto& entry : level) {
                if (rational) {
                    const Rational r = rational_from_json(entry);
                    row.push_back(static_cast<double>(r.num) / static_cast<double>(r.den));
                } else {
                    row.push_back(entry.get<double>());
                }
            }
            out.levels.levels.push_back(std::move(row));
        }
        if (rational) {
            RationalSignature rs;
            for (const auto& level : j.at("levels")) {
                std::vector<Rational> row;
                for (const auto& entry : level) row.push_back(rational_from_json(entry));
                rs.levels.push_back(std::move(row));
            }
            out.rational = std::move(rs);
        }
        return out;
    } catch (const json::exception& e) {
        throw ParseError(std::string("signature: ") + e.what());
    }
}

json circle_map_to_json(const CircleMap& map) {
    json j;
    j["n"] = map.targets.size();
    j["targets"] = map.targets;
    j["fixed"] = map.fixed;
    return j;
}

CircleMap circle_map_from_json(const json& j) {
    try {
        CircleMap m;
        m.targets = j.at("targets").get<std::vector<double>>();
        m.fixed = j.value("fixed", std::vector<int>{});
        return m;
    } catch (const json::exception& e) {
        throw ParseError(std::string("circle map: ") + e.what());
    }
}

json diagnostics_to_json(const FlowDiagnostics& d) {
    json j;
    j["steps"] = d.steps;
    j["max_step_displacement"] = d.max_step_displacement;
    j["final_nesting_residual"] = d.final_nesting_residual;
    json drift = json::array();
    for (const DriftRecord& r : d.drift) {
        json rec;
        rec["name"] = r.name;
        rec["initial"] = r.initial;
        rec["final"] = r.final_value;
        rec["relative_drift"] = r.relative_drift;
        drift.push_back(rec);
    }
    j["drift"] = drift;
    return j;
}

std::string format_double(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

void write_trajectory_header(std::ostream& os, int dimension) {
    os << "t,level,index";
    for (int i = 1; i <= dimension; ++i) os << ",x" << i;
    os << ",density\n";
}

void write_trajectory_rows(std::ostream& os, double t, const WeightedFlag& flag) {
    auto row = [&os, t](int level, int index, const Vec& x, double density) {
        os << format_double(t) << ',' << level << ',' << index;
        for (double c : x) os << ',' << format_double(c);
        os << ',' << format_double(density) << '\n';
    };
    if (flag.is_loop_mode()) {
        const PointsInLoop& lv = flag.pl();
        for (int i = 0; i < lv.points.size(); ++i)
            row(1, i, lv.points.positions[i], lv.points.weights[i]);
        for (int i = 0; i < lv.loop.size(); ++i)
            row(2, i, lv.loop.vertices[i], lv.loop.density[i]);
    } else {
        const LoopsInTorus& lv = flag.lt();
        for (int l = 0; l < lv.loops.size(); ++l)
            for (int i = 0; i < lv.torus.rows; ++i)
                row(1, l * lv.torus.rows + i, lv.torus.at(i, lv.loops.columns[l]),
                    lv.loops.densities[l][i]);
        for (int i = 0; i < lv.torus.rows; ++i)
            for (int j = 0; j < lv.torus.cols; ++j)
                row(2, i * lv.torus.cols + j, lv.torus.at(i, j), lv.torus.rho(i, j));
    }
}

std::string dump(const json& j) { return j.dump(2) + "\n"; }

json load_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open " + path);
    try {
        return json::parse(in);
    } catch (const json::exception& e) {
        throw ParseError(path + ": " + e.what());
    }
}

void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ValidationError("cannot write " + path);
    out << content;
}

}  // namespace flagsim::io
