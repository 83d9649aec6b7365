#include "flagsim/cli.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <optional>
#include <sstream>

#include "flagsim/errors.hpp"
#include "flagsim/io.hpp"
#include "flagsim/isodrast.hpp"
#include "flagsim/moment.hpp"
#include "flagsim/moser.hpp"
#include "flagsim/orbits.hpp"
#include "flagsim/suites.hpp"
#include "flagsim/symplectic.hpp"

namespace flagsim::cli {

namespace {

using nlohmann::json;

/// "0..49", "3", or "1,4,9".
std::vector<std::uint64_t> parse_seeds(const std::string& text) {
    std::vector<std::uint64_t> seeds;
    const auto range = text.find("..");
    if (range != std::string::npos) {
        const std::uint64_t lo = std::stoull(text.substr(0, range));
        const std::uint64_t hi = std::stoull(text.substr(range + 2));
        if (hi < lo) throw ValidationError("seed range is reversed: " + text);
        for (std::uint64_t s = lo; s <= hi; ++s) seeds.push_back(s);
        return seeds;
    }
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ','))
        if (!item.empty()) seeds.push_back(std::stoull(item));
    if (seeds.empty()) throw ValidationError("empty seed list: " + text);
    return seeds;
}

std::vector<int> parse_marks(const std::string& text) {
    std::vector<int> marks;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ','))
        if (!item.empty()) marks.push_back(std::stoi(item));
    return marks;
}

void emit(const json& j, const std::string& out_path, std::ostream& out) {
    const std::string text = io::dump(j);
    if (out_path.empty())
        out << text;
    else
        io::write_file(out_path, text);
}

WeightedFlag load_flag(const std::string& path) {
    return build_flag(io::flag_from_json(io::load_json_file(path)));
}

WeightedFlag load_flag_ref(const json& ref, const std::string& scenario_dir) {
    if (ref.is_string()) {
        std::string path = ref.get<std::string>();
        if (!path.empty() && path[0] != '/' && !scenario_dir.empty())
            path = scenario_dir + "/" + path;
        return load_flag(path);
    }
    return build_flag(io::flag_from_json(ref));
}

FlowScheme parse_scheme(const std::string& s) {
    if (s == "rk4") return FlowScheme::rk4;
    if (s == "midpoint") return FlowScheme::midpoint;
    throw ValidationError("unknown scheme: " + s);
}

json invariants_json(const WeightedFlag& flag) {
    json j;
    const MassSignature sig = component_masses(flag);
    j["mass_signature"] = sig.levels;
    j["nesting_residual"] = nesting_residual(flag);
    if (flag.is_loop_mode()) {
        j["action_integral"] = action_integral(flag.pl().loop);
    } else {
        const auto [a1, a2] = meridian_action_pair(flag.lt().torus);
        j["meridian_actions"] = {a1, a2};
        j["isotropy_residual"] = isotropy_residual(flag.lt().torus);
    }
    return j;
}

int cmd_simulate(const std::string& scenario_path, double t_override, double dt_override,
                 const std::string& scheme_override, const std::string& out_prefix,
                 std::ostream& out) {
    const json scen = io::load_json_file(scenario_path);
    std::string dir;
    const auto slash = scenario_path.find_last_of('/');
    if (slash != std::string::npos) dir = scenario_path.substr(0, slash);

    WeightedFlag flag = load_flag_ref(scen.at("flag"), dir);
    const TestFunction f = io::test_function_from_json(scen.at("hamiltonian"));
    const double T = t_override > 0 ? t_override : scen.value("t", 1.0);
    const double dt = dt_override > 0 ? dt_override : scen.value("dt", 1e-3);
    const FlowScheme scheme =
        parse_scheme(!scheme_override.empty() ? scheme_override : scen.value("scheme", "rk4"));
    const int sample_every = scen.value("sample_every", 0);

    const json before = invariants_json(flag);

    std::ostringstream csv;
    io::write_trajectory_header(csv, flag.dimension);
    io::write_trajectory_rows(csv, 0.0, flag);

    FlowDiagnostics total;
    const long n_steps = static_cast<long>(std::ceil(T / dt - 1e-9));
    const long chunk = sample_every > 0 ? sample_every : n_steps;
    long done = 0;
    while (done < n_steps) {
        const long todo = std::min(chunk, n_steps - done);
        const FlowResult res = flow_flag(flag, f, todo * dt, dt, scheme);
        flag = res.flag;
        done += todo;
        io::write_trajectory_rows(csv, done * dt, flag);
        total.steps += res.diagnostics.steps;
        total.max_step_displacement =
            std::max(total.max_step_displacement, res.diagnostics.max_step_displacement);
        total.final_nesting_residual = res.diagnostics.final_nesting_residual;
    }

    // Overall drift table across the whole run.
    const json after = invariants_json(flag);
    json diag = io::diagnostics_to_json(total);
    json drift = json::array();
    auto add_drift = [&drift](const std::string& name, double a, double b) {
        const double scale = std::abs(a) > 0 ? std::abs(a) : 1.0;
        drift.push_back({{"name", name},
                         {"initial", a},
                         {"final", b},
                         {"relative_drift", std::abs(b - a) / scale}});
    };
    if (before.contains("action_integral"))
        add_drift("action_integral", before["action_integral"], after["action_integral"]);
    if (before.contains("meridian_actions")) {
        add_drift("meridian_action_1", before["meridian_actions"][0],
                  after["meridian_actions"][0]);
        add_drift("meridian_action_2", before["meridian_actions"][1],
                  after["meridian_actions"][1]);
    }
    for (std::size_t l = 0; l < before["mass_signature"].size(); ++l)
        for (std::size_t c = 0; c < before["mass_signature"][l].size(); ++c)
            add_drift("mass_" + std::to_string(l) + "_" + std::to_string(c),
                      before["mass_signature"][l][c], after["mass_signature"][l][c]);
    diag["drift"] = drift;
    diag["t"] = T;
    diag["dt"] = dt;

    io::write_file(out_prefix + "trajectory.csv", csv.str());
    io::write_file(out_prefix + "diagnostics.json", io::dump(diag));
    out << "wrote " << out_prefix << "trajectory.csv and " << out_prefix
        << "diagnostics.json\n";
    return 0;
}

SymmetryGroup parse_group(const std::string& name, const io::SignatureFile& a) {
    if (name == "trivial") return SymmetryGroup::trivial();
    if (name == "dihedral")
        return SymmetryGroup::dihedral(static_cast<int>(a.levels.levels.at(0).size()));
    if (name == "hyperoct")
        return SymmetryGroup::hyperoctahedral(static_cast<int>(a.levels.levels.size()));
    if (name == "sl2z") return SymmetryGroup::sl2z_rational();
    throw ValidationError("unknown group: " + name);
}

int cmd_classify(const std::string& a_path, const std::string& b_path, const std::string& group,
                 const std::string& out_path, std::ostream& out) {
    const io::SignatureFile a = io::signature_from_json(io::load_json_file(a_path));
    const io::SignatureFile b = io::signature_from_json(io::load_json_file(b_path));
    const SymmetryGroup g = parse_group(group, a);

    json j;
    j["group"] = group;
    if (g.tag == SymmetryGroup::Tag::sl2z_rational) {
        if (!a.rational || !b.rational)
            throw ValidationError("sl2z classification requires rational signatures");
        j["same_orbit"] = same_orbit(*a.rational, *b.rational, g);
        const RationalPair pa{a.rational->levels.at(0).at(0), a.rational->levels.at(0).at(1)};
        const RationalPair pb{b.rational->levels.at(0).at(0), b.rational->levels.at(0).at(1)};
        j["invariant_a"] = sl2_invariant(pa).str();
        j["invariant_b"] = sl2_invariant(pb).str();
        const Sl2Witness wit = sl2_equivalent(pa, pb, 10);
        if (wit.matrix) j["witness"] = *wit.matrix;
    } else {
        j["same_orbit"] = same_orbit(a.levels, b.levels, g);
        if (g.tag == SymmetryGroup::Tag::dihedral) {
            const auto ca = dihedral_canonicalize(a.levels.levels[0], a.levels.levels[1]);
            const auto cb = dihedral_canonicalize(b.levels.levels[0], b.levels.levels[1]);
            j["canonical_a"] = {ca.gammas, ca.ws};
            j["canonical_b"] = {cb.gammas, cb.ws};
            j["orbit_size_a"] = ca.orbit_size;
            j["orbit_size_b"] = cb.orbit_size;
        }
        if (g.tag == SymmetryGroup::Tag::hyperoctahedral) {
            std::vector<std::pair<double, double>> pa, pb;
            for (const auto& level : a.levels.levels) pa.emplace_back(level[0], level[1]);
            for (const auto& level : b.levels.levels) pb.emplace_back(level[0], level[1]);
            j["orbit_size_a"] = hyperoct_canonicalize(pa).orbit_size;
            j["orbit_size_b"] = hyperoct_canonicalize(pb).orbit_size;
        }
    }
    emit(j, out_path, out);
    return 0;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"weighted nonlinear flags in standard symplectic R^2n"};
    app.require_subcommand(1);

    // simulate
    auto* sim = app.add_subcommand("simulate", "advect a flag along a Hamiltonian flow");
    std::string scenario, sim_out = "./", sim_scheme;
    double sim_t = 0, sim_dt = 0;
    sim->add_option("--scenario", scenario, "scenario JSON")->required();
    sim->add_option("--t", sim_t, "horizon override");
    sim->add_option("--dt", sim_dt, "step override");
    sim->add_option("--scheme", sim_scheme, "rk4 | midpoint");
    sim->add_option("--out", sim_out, "output path prefix");

    // invariants
    auto* inv = app.add_subcommand("invariants", "isodrastic invariants of a flag");
    std::string inv_flag, inv_out;
    inv->add_option("--flag", inv_flag, "flag JSON")->required();
    inv->add_option("--out", inv_out, "output file (default stdout)");

    // classify
    auto* cls = app.add_subcommand("classify", "compare mass signatures under a symmetry group");
    std::string cls_a, cls_b, cls_group = "trivial", cls_out;
    cls->add_option("--a", cls_a, "signature JSON")->required();
    cls->add_option("--b", cls_b, "signature JSON")->required();
    cls->add_option("--group", cls_group, "trivial | dihedral | hyperoct | sl2z");
    cls->add_option("--out", cls_out, "output file (default stdout)");

    // moser
    auto* mos = app.add_subcommand("moser", "cumulative-mass matching map between densities");
    std::string mos_src, mos_tgt, mos_marked, mos_out;
    double mos_tol = 1e-9;
    mos->add_option("--source", mos_src, "density JSON")->required();
    mos->add_option("--target", mos_tgt, "density JSON")->required();
    mos->add_option("--marked", mos_marked, "comma-separated marked indices");
    mos->add_option("--tol", mos_tol, "arc-mass tolerance");
    mos->add_option("--out", mos_out, "output file (default stdout)");

    // pair
    auto* pr = app.add_subcommand("pair", "pair a flag distribution with a test function");
    std::string pr_flag, pr_test, pr_out;
    pr->add_option("--flag", pr_flag, "flag JSON")->required();
    pr->add_option("--test", pr_test, "test function JSON")->required();
    pr->add_option("--out", pr_out, "output file (default stdout)");

    // separate
    auto* sep = app.add_subcommand("separate", "find a bump distinguishing two flags");
    std::string sep_a, sep_b, sep_out;
    int sep_budget = 1000;
    sep->add_option("--a", sep_a, "flag JSON")->required();
    sep->add_option("--b", sep_b, "flag JSON")->required();
    sep->add_option("--budget", sep_budget, "candidate budget");
    sep->add_option("--out", sep_out, "output file (default stdout)");

    // check
    auto* chk = app.add_subcommand("check", "run the property suites");
    std::string chk_suite = "all", chk_seeds, chk_out;
    int chk_nv = 256, chk_threads = 0;
    std::int64_t chk_seed = -1;
    chk->add_option("--suite", chk_suite, "suite name, 'all', or 'symplectic'");
    chk->add_option("--seeds", chk_seeds, "seed range 0..49 or list 1,2,3");
    chk->add_option("--seed", chk_seed, "single seed (shorthand for --seeds N)");
    chk->add_option("--nv", chk_nv, "loop resolution");
    chk->add_option("--threads", chk_threads, "worker cap (also FLAGSIM_THREADS)");
    chk->add_option("--out", chk_out, "report file (default stdout)");

    try {
        std::vector<std::string> argv_rev(args.rbegin(), args.rend());
        app.parse(argv_rev);

        if (sim->parsed()) return cmd_simulate(scenario, sim_t, sim_dt, sim_scheme, sim_out, out);

        if (inv->parsed()) {
            emit(invariants_json(load_flag(inv_flag)), inv_out, out);
            return 0;
        }

        if (cls->parsed()) return cmd_classify(cls_a, cls_b, cls_group, cls_out, out);

        if (mos->parsed()) {
            const io::DensityFile src = io::density_from_json(io::load_json_file(mos_src));
            const io::DensityFile tgt = io::density_from_json(io::load_json_file(mos_tgt));
            const std::vector<int> marked =
                mos_marked.empty() ? src.marked : parse_marks(mos_marked);
            const CircleMap map = moser_map_circle(src.values, tgt.values, marked, mos_tol);
            emit(io::circle_map_to_json(map), mos_out, out);
            return 0;
        }

        if (pr->parsed()) {
            const WeightedFlag flag = load_flag(pr_flag);
            const TestFunction f =
                io::test_function_from_json(io::load_json_file(pr_test));
            emit(json{{"pair", pair(flag, f)}}, pr_out, out);
            return 0;
        }

        if (sep->parsed()) {
            const WeightedFlag a = load_flag(sep_a);
            const WeightedFlag b = load_flag(sep_b);
            const auto wit = separate(a, b, sep_budget);
            json j;
            j["found"] = wit.has_value();
            if (wit) {
                j["bump"] = io::test_function_to_json(wit->bump);
                j["gap"] = wit->gap;
            }
            emit(j, sep_out, out);
            return 0;
        }

        if (chk->parsed()) {
            suites::SuiteOptions opts;
            if (!chk_seeds.empty()) opts.seeds = parse_seeds(chk_seeds);
            if (chk_seed >= 0) opts.seeds = {static_cast<std::uint64_t>(chk_seed)};
            opts.nv = chk_nv;
            opts.threads = chk_threads;
            const auto results = suites::run_suites(suites::expand_suites(chk_suite), opts);
            const json report = suites::report_json(results, opts);
            emit(report, chk_out, out);
            for (const auto& r : results)
                out << (r.pass ? "PASS" : "FAIL") << " criterion " << r.id << " (" << r.name
                    << ")\n";
            return report.at("pass").get<bool>() ? 0 : 2;
        }
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) {  // --help
            out << app.help();
            return 0;
        }
        err << "error: " << e.what() << "\n";
        return 1;
    } catch (const FlagsimError& e) {
        err << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return 1;
    }
    err << "error: no subcommand\n";
    return 1;
}

}  // namespace flagsim::cli
