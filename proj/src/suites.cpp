#include "flagsim/suites.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <set>
#include <sstream>
#include <stdexcept>

#include "flagsim/errors.hpp"
#include "flagsim/io.hpp"
#include "flagsim/isodrast.hpp"
#include "flagsim/moment.hpp"
#include "flagsim/moser.hpp"
#include "flagsim/orbits.hpp"
#include "flagsim/rng.hpp"
#include "flagsim/util.hpp"

namespace flagsim::suites {

using nlohmann::json;

std::vector<std::uint64_t> SuiteOptions::seed_list() const {
    if (!seeds.empty()) return seeds;
    std::vector<std::uint64_t> out(50);
    for (int i = 0; i < 50; ++i) out[i] = i;
    return out;
}

std::vector<std::string> suite_names() {
    return {"moment_identity", "kernel",      "conservation", "orbit_counts", "sl2z",
            "moser",           "injectivity", "integrator",   "determinism"};
}

std::vector<std::string> expand_suites(const std::string& selector) {
    if (selector == "all") return suite_names();
    if (selector == "symplectic")
        return {"moment_identity", "kernel", "conservation", "integrator"};
    const auto names = suite_names();
    if (std::find(names.begin(), names.end(), selector) == names.end())
        throw ValidationError("unknown suite: " + selector);
    return {selector};
}

// ---------------------------------------------------------------------------
// Deterministic case generators.

namespace {

/// Normalized low-order Fourier field with max amplitude 1.
std::vector<double> fourier_field(Rng& rng, int nv, int order) {
    std::vector<double> a, b;
    for (int m = 1; m <= order; ++m) {
        a.push_back(rng.normal() / m);
        b.push_back(rng.normal() / m);
    }
    std::vector<double> f(nv, 0.0);
    double peak = 0.0;
    for (int i = 0; i < nv; ++i) {
        const double theta = grid_theta(i, nv);
        for (int m = 1; m <= order; ++m)
            f[i] += a[m - 1] * std::cos(m * theta) + b[m - 1] * std::sin(m * theta);
        peak = std::max(peak, std::abs(f[i]));
    }
    if (peak > 0.0)
        for (double& x : f) x /= peak;
    return f;
}

}  // namespace

WeightedFlag make_loop_flag(std::uint64_t seed, int nv, const std::vector<double>& mark_fracs,
                            double wobble, double density_amp) {
    Rng rng(seed);
    const std::vector<double> shape = fourier_field(rng, nv, 3);
    const std::vector<double> dens = fourier_field(rng, nv, 2);
    std::vector<double> weights;
    for (std::size_t i = 0; i < mark_fracs.size(); ++i) weights.push_back(rng.uniform(0.5, 2.0));

    WeightedFlag raw;
    raw.dimension = 2;
    raw.nesting_tol = 1e-9;
    PointsInLoop lv;
    for (int i = 0; i < nv; ++i) {
        const double theta = grid_theta(i, nv);
        const double r = 1.0 + wobble * shape[i];
        lv.loop.vertices.push_back({r * std::cos(theta), r * std::sin(theta)});
        lv.loop.density.push_back(1.0 + density_amp * dens[i]);
    }
    for (std::size_t p = 0; p < mark_fracs.size(); ++p) {
        const double idx = mark_fracs[p] * nv;
        const int m = static_cast<int>(std::llround(idx));
        lv.points.positions.push_back(lv.loop.vertices[m]);
        lv.points.weights.push_back(weights[p]);
    }
    raw.levels = std::move(lv);
    return build_flag(raw);
}

TestFunction random_hamiltonian(std::uint64_t seed, int dim, double strength) {
    Rng rng(seed);
    TestFunction f;
    for (int b = 0; b < 2; ++b) {
        GaussianBump bump;
        bump.center.resize(dim);
        for (int c = 0; c < dim; ++c) bump.center[c] = 0.7 * rng.normal();
        bump.width = 1.2 + 0.8 * rng.uniform();
        bump.amp = strength * rng.uniform(0.5, 1.0) * (rng.uniform() < 0.5 ? -1.0 : 1.0);
        f.bumps.push_back(std::move(bump));
    }
    for (int c = 0; c < dim; ++c) {
        PolyTerm lin;
        lin.exponents.assign(dim, 0);
        lin.exponents[c] = 1;
        lin.coeff = 0.3 * strength * rng.normal();
        f.poly.push_back(std::move(lin));
        PolyTerm quad;
        quad.exponents.assign(dim, 0);
        quad.exponents[c] = 2;
        quad.coeff = 0.15 * strength * rng.normal();
        f.poly.push_back(std::move(quad));
    }
    return f;
}

std::vector<double> random_density(std::uint64_t seed, int nv, double amp, int order) {
    Rng rng(seed);
    const std::vector<double> f = fourier_field(rng, nv, order);
    std::vector<double> d(nv);
    for (int i = 0; i < nv; ++i) d[i] = 1.0 + amp * f[i];
    return d;
}

std::vector<double> random_speed_field(std::uint64_t seed, const DiscreteLoop& loop) {
    Rng rng(seed);
    std::vector<double> z = fourier_field(rng, loop.size(), 3);
    return vanish_at_marks(std::move(z), loop.marked);
}

std::vector<double> match_arc_masses(std::vector<double> nu, const std::vector<double>& mu,
                                     const std::vector<int>& marked) {
    const int n = static_cast<int>(nu.size());
    const double dth = grid_step(n);
    const std::vector<double> target = arc_masses(mu, marked);
    const std::vector<double> have = arc_masses(nu, marked);
    if (marked.empty()) {
        const double shift = (target[0] - have[0]) / kTwoPi;
        for (double& d : nu) d += shift;
        return nu;
    }
    const int k = static_cast<int>(marked.size());
    const double pi = kTwoPi / 2.0;
    for (int a = 0; a < k; ++a) {
        const int ia = marked[a];
        const int span = (marked[(a + 1) % k] - ia + n) % n;
        const int len = (span == 0) ? n : span;
        if (len < 2) continue;
        double bump_mass = 0.0;
        for (int s = 1; s < len; ++s) {
            const double b = std::sin(pi * s / len);
            bump_mass += b * b;
        }
        bump_mass *= dth;
        if (bump_mass == 0.0) continue;
        const double c = (target[a] - have[a]) / bump_mass;
        for (int s = 1; s < len; ++s) {
            const double b = std::sin(pi * s / len);
            nu[(ia + s) % n] += c * b * b;
        }
    }
    return nu;
}

// ---------------------------------------------------------------------------
// Criteria.

namespace {

const std::vector<double> kMarkFracs = {0.0, 0.25, 0.625};  // dyadic: exact at 256 and 512

CriterionResult criterion_moment_identity(const SuiteOptions& opts) {
    const auto seeds = opts.seed_list();
    const auto t0 = std::chrono::steady_clock::now();
    std::vector<double> residuals(seeds.size());
    parallel_for(static_cast<int>(seeds.size()), opts.threads, [&](int i) {
        const std::uint64_t s = seeds[i];
        const WeightedFlag flag =
            make_loop_flag(Rng::stream(s, 1), opts.nv, kMarkFracs, 0.15, 0.3);
        const TestFunction f = random_hamiltonian(Rng::stream(s, 2), 2, 0.5);
        const FlagTangent tan = random_tangent(flag, Rng::stream(s, 3));
        residuals[i] = moment_identity_residual(flag, f, tan, 1e-5);
    });
    const double elapsed =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    const double worst = *std::max_element(residuals.begin(), residuals.end());
    CriterionResult r;
    r.id = 1;
    r.name = "moment_identity";
    r.pass = worst < 1e-3 && elapsed < 60.0;
    r.details = {{"cases", seeds.size()},
                 {"max_residual", worst},
                 {"tolerance", 1e-3},
                 {"elapsed_seconds", elapsed}};
    return r;
}

CriterionResult criterion_kernel(const SuiteOptions& opts) {
    const auto all_seeds = opts.seed_list();
    const int cases = std::min<int>(10, static_cast<int>(all_seeds.size()));
    std::vector<double> ratios(cases), controls(cases);
    parallel_for(cases, opts.threads, [&](int i) {
        const std::uint64_t s = all_seeds[i];
        double res[2];
        for (int half = 0; half < 2; ++half) {
            const int nv = half == 0 ? 256 : 512;
            const WeightedFlag flag =
                make_loop_flag(Rng::stream(s, 11), nv, kMarkFracs, 0.15, 0.3);
            const std::vector<double> Z =
                random_speed_field(Rng::stream(s, 12), flag.pl().loop);
            res[half] = kernel_residual(flag, Z, 6, Rng::stream(s, 13));
        }
        ratios[i] = res[0] / res[1];

        // Non-generator control: reparametrization speeds that do not vanish
        // at the marks leave the point terms of Omega uncancelled.
        const WeightedFlag flag = make_loop_flag(Rng::stream(s, 11), 256, kMarkFracs, 0.15, 0.3);
        const DiscreteLoop& loop = flag.pl().loop;
        const int n = loop.size();
        const double dth = grid_step(n);
        FlagTangent bad;
        bad.u.resize(n);
        bad.lambda.resize(n);
        for (int v = 0; v < n; ++v) {
            const double z = 1.0 + 0.2 * std::sin(grid_theta(v, n));
            Vec phi = loop.vertices[(v + 1) % n] - loop.vertices[(v - 1 + n) % n];
            for (double& c : phi) c /= 2.0 * dth;
            bad.u[v] = z * phi;
            bad.lambda[v] = z * loop.density[v];
        }
        double worst = 0.0;
        const double nb = tangent_norm(bad);
        for (int t = 0; t < 6; ++t) {
            const FlagTangent w = random_tangent(flag, Rng::stream(s, 140 + t));
            worst = std::max(worst,
                             std::abs(omega_leafwise(flag, bad, w)) / (nb * tangent_norm(w)));
        }
        controls[i] = worst;
    });
    bool pass = true;
    for (int i = 0; i < cases; ++i)
        pass = pass && ratios[i] > 2.8 && ratios[i] < 5.2 && controls[i] > 1e-3;
    CriterionResult r;
    r.id = 2;
    r.name = "kernel";
    r.pass = pass;
    r.details = {{"cases", cases},
                 {"ratio_band", {2.8, 5.2}},
                 {"ratios", ratios},
                 {"controls", controls},
                 {"control_floor", 1e-3}};
    return r;
}

/// RK4 flow of the linear (non-Hamiltonian) scaling field x' = log(1.1) x.
std::vector<Vec> scale_control_flow(std::vector<Vec> vertices) {
    const double c = std::log(1.1);
    const double dt = 1e-3;
    for (int s = 0; s < 1000; ++s) {
        for (Vec& v : vertices) {
            // RK4 on x' = c x collapses to a scalar factor per step.
            const double k1 = c, k2 = c * (1 + 0.5 * dt * k1), k3 = c * (1 + 0.5 * dt * k2),
                         k4 = c * (1 + dt * k3);
            const double factor = 1.0 + dt / 6.0 * (k1 + 2 * k2 + 2 * k3 + k4);
            for (double& x : v) x *= factor;
        }
    }
    return vertices;
}

CriterionResult criterion_conservation(const SuiteOptions& opts) {
    const auto all_seeds = opts.seed_list();
    const int cases = std::min<int>(20, static_cast<int>(all_seeds.size()));
    constexpr int kNv = 2048;

    struct CaseOut {
        double area_drift = 0.0;
        bool exact_masses = false;
        bool exact_nesting = false;
    };
    std::vector<CaseOut> outs(cases);
    parallel_for(cases, opts.threads, [&](int i) {
        const std::uint64_t s = all_seeds[i];
        const WeightedFlag flag = make_loop_flag(Rng::stream(s, 21), kNv, kMarkFracs, 0.03, 0.3);
        const TestFunction f = random_hamiltonian(Rng::stream(s, 22), 2, 0.08);
        const MassSignature before = component_masses(flag);
        const FlowResult res = flow_flag(flag, f, 1.0, 1e-3, FlowScheme::rk4);
        const MassSignature after = component_masses(res.flag);

        CaseOut& out = outs[i];
        for (const DriftRecord& d : res.diagnostics.drift)
            if (d.name == "action_integral") out.area_drift = d.relative_drift;
        out.exact_masses = before.levels == after.levels;
        out.exact_nesting = res.diagnostics.final_nesting_residual == 0.0;
    });

    double worst_drift = 0.0;
    bool exact = true;
    for (const CaseOut& o : outs) {
        worst_drift = std::max(worst_drift, o.area_drift);
        exact = exact && o.exact_masses && o.exact_nesting;
    }

    // Non-Hamiltonian control: the scaling flow multiplies areas by 1.21.
    const WeightedFlag control_flag =
        make_loop_flag(Rng::stream(all_seeds[0], 21), 256, kMarkFracs, 0.03, 0.3);
    const double area0 = action_integral(control_flag.pl().loop);
    const double area1 = action_integral(scale_control_flow(control_flag.pl().loop.vertices));
    const double factor = area1 / area0;
    const bool control_ok = std::abs(factor - 1.21) < 1e-9;

    CriterionResult r;
    r.id = 3;
    r.name = "conservation";
    r.pass = worst_drift < 1e-6 && exact && control_ok;
    r.details = {{"cases", cases},
                 {"nv", kNv},
                 {"max_area_drift", worst_drift},
                 {"area_drift_tolerance", 1e-6},
                 {"masses_and_nesting_exact", exact},
                 {"scaling_factor", factor},
                 {"scaling_expected", 1.21}};
    return r;
}

CriterionResult criterion_orbit_counts(const SuiteOptions& opts) {
    (void)opts;  // exact combinatorics, no tunables
    Rng rng(0xd1);
    bool pass = true;
    json details;

    // Dihedral orbit sizes against exhaustive enumeration, k <= 6.
    int dihedral_checks = 0;
    for (int k = 1; k <= 6 && pass; ++k) {
        for (int trial = 0; trial < 12 && pass; ++trial) {
            std::vector<double> g(k), w(k);
            const int style = trial % 4;
            for (int i = 0; i < k; ++i) {
                g[i] = style == 0 ? 1.0 : std::floor(rng.uniform(0, 4));
                w[i] = style == 0 ? 2.0 : std::floor(rng.uniform(0, 4));
            }
            const auto canon = dihedral_canonicalize(g, w);

            // Enumerate all 2k images directly.
            std::set<std::pair<std::vector<double>, std::vector<double>>> images;
            for (int refl = 0; refl < 2; ++refl) {
                for (int rot = 0; rot < k; ++rot) {
                    std::vector<double> gi(k), wi(k);
                    for (int i = 0; i < k; ++i) {
                        gi[i] = g[(i + rot) % k];
                        wi[i] = w[(i + rot) % k];
                    }
                    if (refl) {
                        const auto gc = gi;
                        const auto wc = wi;
                        for (int i = 0; i < k; ++i) {
                            gi[i] = gc[(k - i) % k];
                            wi[i] = wc[(k - 1 - i) % k];
                        }
                    }
                    images.insert({gi, wi});
                }
            }
            pass = pass && canon.orbit_size == static_cast<int>(images.size());

            const bool all_equal =
                std::all_of(g.begin(), g.end(), [&](double x) { return x == g[0]; }) &&
                std::all_of(w.begin(), w.end(), [&](double x) { return x == w[0]; });
            pass = pass && ((canon.orbit_size == 1) == all_equal);
            ++dihedral_checks;
        }
    }
    details["dihedral_checks"] = dihedral_checks;

    // Hyperoctahedral orbit sizes 2^s on 100 random sphere signatures.
    int hyper_checks = 0;
    for (int c = 0; c < 100 && pass; ++c) {
        const int levels = 1 + static_cast<int>(rng.below(4));
        std::vector<std::pair<double, double>> pairs;
        int s = 0;
        for (int l = 0; l < levels; ++l) {
            double a = std::floor(rng.uniform(0, 5));
            double b = rng.uniform() < 0.4 ? a : std::floor(rng.uniform(0, 5));
            if (a != b) ++s;
            pairs.emplace_back(a, b);
        }
        const auto canon = hyperoct_canonicalize(pairs);
        pass = pass && canon.orbit_size == (static_cast<std::int64_t>(1) << s);

        // Cross-check by enumerating every swap pattern.
        std::set<std::vector<double>> images;
        for (int mask = 0; mask < (1 << levels); ++mask) {
            std::vector<double> img;
            for (int l = 0; l < levels; ++l) {
                const bool swap = (mask >> l) & 1;
                img.push_back(swap ? pairs[l].second : pairs[l].first);
                img.push_back(swap ? pairs[l].first : pairs[l].second);
            }
            images.insert(img);
        }
        pass = pass && canon.orbit_size == static_cast<std::int64_t>(images.size());
        ++hyper_checks;
    }
    details["hyperoct_checks"] = hyper_checks;

    CriterionResult r;
    r.id = 4;
    r.name = "orbit_counts";
    r.pass = pass;
    r.details = details;
    return r;
}

CriterionResult criterion_sl2z(const SuiteOptions& opts) {
    (void)opts;
    bool pass = true;
    json details;

    // Invariance under 100 random words in the generators, exact arithmetic.
    Rng rng(0x51);
    int words = 0;
    for (int c = 0; c < 100 && pass; ++c) {
        RationalPair p;
        p.a = Rational(static_cast<std::int64_t>(rng.below(41)) - 20,
                       1 + static_cast<std::int64_t>(rng.below(9)));
        p.b = Rational(static_cast<std::int64_t>(rng.below(41)) - 20,
                       1 + static_cast<std::int64_t>(rng.below(9)));
        if (p.a.is_zero() && p.b.is_zero()) p.a = Rational(1);
        const Rational inv0 = sl2_invariant(p);
        RationalPair q = p;
        const int len = 1 + static_cast<int>(rng.below(8));
        for (int w = 0; w < len; ++w) {
            switch (rng.below(4)) {
                case 0: q = {Rational(0) - q.b, q.a}; break;             // S
                case 1: q = {q.b, Rational(0) - q.a}; break;             // S^-1
                case 2: q = {q.a + q.b, q.b}; break;                     // T
                default: q = {q.a - q.b, q.b}; break;                    // T^-1
            }
        }
        pass = pass && sl2_invariant(q) == inv0;
        ++words;
    }
    details["word_checks"] = words;

    // (2,3) ~ (1,1) with an explicit determinant-one witness.
    const RationalPair a{Rational(2), Rational(3)};
    const RationalPair b{Rational(1), Rational(1)};
    const Sl2Witness wit = sl2_equivalent(a, b, 10);
    bool witness_ok = wit.equivalent && wit.matrix.has_value();
    if (witness_ok) {
        const auto& m = *wit.matrix;
        witness_ok = m[0] * m[3] - m[1] * m[2] == 1;
        const Rational va = Rational(m[0]) * a.a + Rational(m[1]) * a.b;
        const Rational vb = Rational(m[2]) * a.a + Rational(m[3]) * a.b;
        witness_ok = witness_ok && va == b.a && vb == b.b;
        details["witness"] = {m[0], m[1], m[2], m[3]};
    }
    pass = pass && witness_ok;

    // (2,4) and (2,3) lie in different orbits (generators 2 vs 1).
    const Sl2Witness neq =
        sl2_equivalent({Rational(2), Rational(4)}, {Rational(2), Rational(3)}, 4);
    pass = pass && !neq.equivalent;

    CriterionResult r;
    r.id = 5;
    r.name = "sl2z";
    r.pass = pass;
    r.details = details;
    return r;
}

CriterionResult criterion_moser(const SuiteOptions& opts) {
    const int nv = opts.nv;

    // Analytic density 1 + amp * (normalized order-2 Fourier field).
    struct Analytic {
        double a1, b1, a2, b2, amp;
        double eval(double th) const {
            return 1.0 + amp * (a1 * std::cos(th) + b1 * std::sin(th) +
                                a2 * std::cos(2 * th) + b2 * std::sin(2 * th));
        }
    };
    auto analytic_density = [](std::uint64_t seed, double amp) {
        Rng rng(seed);
        Analytic d{rng.normal(), rng.normal(), 0.5 * rng.normal(), 0.5 * rng.normal(), amp};
        const double s = std::abs(d.a1) + std::abs(d.b1) + std::abs(d.a2) + std::abs(d.b2);
        d.a1 /= s;
        d.b1 /= s;
        d.a2 /= s;
        d.b2 /= s;
        return d;
    };

    struct CaseOut {
        double err_coarse = 0.0;
        double ratio = 0.0;
        bool equal_accepted = false;
        bool unequal_rejected = false;
    };
    std::vector<CaseOut> outs(100);
    parallel_for(100, opts.threads, [&](int i) {
        CaseOut& out = outs[i];

        // Equal-class pair: nu is the analytic pushforward of mu through a
        // reparametrization g fixing the marks (all at multiples of pi/4, so
        // sin(4 theta) and sin(8 theta) vanish there); the O(h^2) quadrature
        // defect is absorbed by a smooth correction.
        const Analytic A = analytic_density(Rng::stream(i, 61), 0.2);
        Rng grng(Rng::stream(i, 62));
        const double c4 = (grng.uniform() < 0.5 ? -1.0 : 1.0) * grng.uniform(0.008, 0.02);
        const double c8 = (grng.uniform() < 0.5 ? -1.0 : 1.0) * grng.uniform(0.001, 0.003);
        auto g = [&](double th) { return th + c4 * std::sin(4 * th) + c8 * std::sin(8 * th); };
        auto gp = [&](double th) { return 1.0 + 4 * c4 * std::cos(4 * th) + 8 * c8 * std::cos(8 * th); };

        double errs[2];
        for (int half = 0; half < 2; ++half) {
            const int n = half == 0 ? nv : 2 * nv;
            const std::vector<int> marks = {0, n / 4, 5 * n / 8};
            std::vector<double> mu(n), nu(n);
            for (int v = 0; v < n; ++v) {
                const double th = grid_theta(v, n);
                mu[v] = A.eval(th);
                nu[v] = A.eval(g(th)) * gp(th);
            }
            nu = match_arc_masses(std::move(nu), mu, marks);
            try {
                const CircleMap map = moser_map_circle(mu, nu, marks);
                const std::vector<double> pushed = push_density(map, mu);
                double err = 0.0;
                for (int v = 0; v < n; ++v) err = std::max(err, std::abs(pushed[v] - nu[v]));
                errs[half] = err;
                if (half == 0) out.equal_accepted = true;
            } catch (const FlagsimError&) {
                errs[half] = 1.0;
            }
        }
        out.err_coarse = errs[0];
        out.ratio = errs[1] > 0.0 ? errs[0] / errs[1] : 0.0;

        // Bumping one arc's mass by 5% must be rejected as a different class.
        {
            const std::vector<int> marks = {0, nv / 4, 5 * nv / 8};
            std::vector<double> mu(nv), nu(nv);
            for (int v = 0; v < nv; ++v) {
                const double th = grid_theta(v, nv);
                mu[v] = A.eval(th);
                nu[v] = A.eval(g(th)) * gp(th);
            }
            nu = match_arc_masses(std::move(nu), mu, marks);
            std::vector<double> targets = arc_masses(mu, marks);
            targets[i % targets.size()] *= 1.05;
            nu = rescale_arc_masses(std::move(nu), marks, targets);
            try {
                moser_map_circle(mu, nu, marks);
                out.unequal_rejected = false;
            } catch (const MassMismatch&) {
                out.unequal_rejected = true;
            }
        }
    });

    bool pass = true;
    double worst_err = 0.0, worst_ratio = 1e30;
    for (const CaseOut& o : outs) {
        worst_err = std::max(worst_err, o.err_coarse);
        worst_ratio = std::min(worst_ratio, o.ratio);
        pass = pass && o.equal_accepted && o.unequal_rejected && o.err_coarse < 5e-4 &&
               o.ratio > 2.5;
    }

    CriterionResult r;
    r.id = 6;
    r.name = "moser";
    r.pass = pass;
    r.details = {{"cases", 100},
                 {"max_push_error", worst_err},
                 {"error_tolerance", 5e-4},
                 {"min_refinement_ratio", worst_ratio},
                 {"ratio_floor", 2.5}};
    return r;
}

CriterionResult criterion_injectivity(const SuiteOptions& opts) {
    struct CaseOut {
        bool witness_ok = false;
        bool sound = false;
        bool identical_empty = false;
    };
    std::vector<CaseOut> outs(100);
    parallel_for(100, opts.threads, [&](int i) {
        CaseOut& out = outs[i];
        const WeightedFlag a = make_loop_flag(Rng::stream(i, 71), opts.nv, kMarkFracs, 0.15, 0.3);
        WeightedFlag b = a;
        Rng rng(Rng::stream(i, 72));
        switch (i % 3) {
            case 0:  // point weight
                b.pl().points.weights[rng.below(b.pl().points.size())] += 0.05;
                break;
            case 1: {  // density on one arc
                const int n = b.pl().loop.size();
                const int at = static_cast<int>(rng.below(n));
                for (int s = 0; s < n / 8; ++s)
                    b.pl().loop.density[(at + s) % n] *= 1.05;
                break;
            }
            default: {  // geometry: displace one unmarked vertex
                const int n = b.pl().loop.size();
                int v = static_cast<int>(rng.below(n));
                const auto& marks = b.pl().loop.marked;
                while (std::find(marks.begin(), marks.end(), v) != marks.end()) v = (v + 1) % n;
                b.pl().loop.vertices[v][0] += 0.02;
                break;
            }
        }
        const auto wit = separate(a, b, 2000);
        if (wit.has_value()) {
            out.witness_ok = wit->gap > 1e-6;
            const double recomputed = std::abs(pair(a, wit->bump) - pair(b, wit->bump));
            out.sound = std::abs(recomputed - wit->gap) < 1e-12;
        }
        out.identical_empty = !separate(a, a, 2000).has_value();
    });

    bool pass = true;
    for (const CaseOut& o : outs) pass = pass && o.witness_ok && o.sound && o.identical_empty;
    CriterionResult r;
    r.id = 7;
    r.name = "injectivity";
    r.pass = pass;
    r.details = {{"cases", 100}, {"gap_floor", 1e-6}};
    return r;
}

CriterionResult criterion_integrator(const SuiteOptions& opts) {
    const auto all_seeds = opts.seed_list();
    const int cases = std::min<int>(10, static_cast<int>(all_seeds.size()));
    std::vector<double> dets(cases);
    parallel_for(cases, opts.threads, [&](int i) {
        const std::uint64_t s = all_seeds[i];
        const TestFunction f = random_hamiltonian(Rng::stream(s, 81), 2, 0.5);
        Rng rng(Rng::stream(s, 82));
        const Vec x0 = {rng.uniform(-1, 1), rng.uniform(-1, 1)};
        const double h = 1e-5;
        Vec cols[2];
        for (int c = 0; c < 2; ++c) {
            Vec xp = x0, xm = x0;
            xp[c] += h;
            xm[c] -= h;
            const Vec fp = flow_point(f, xp, 1.0, 1e-3, FlowScheme::rk4);
            const Vec fm = flow_point(f, xm, 1.0, 1e-3, FlowScheme::rk4);
            cols[c] = {(fp[0] - fm[0]) / (2 * h), (fp[1] - fm[1]) / (2 * h)};
        }
        dets[i] = cols[0][0] * cols[1][1] - cols[1][0] * cols[0][1];
    });
    double worst = 0.0;
    for (double d : dets) worst = std::max(worst, std::abs(d - 1.0));

    // Inscribed regular 256-gon: the discrete action integral is the exact
    // polygon area (n/2) sin(2 pi / n).
    std::vector<Vec> gon;
    for (int i = 0; i < 256; ++i)
        gon.push_back({std::cos(grid_theta(i, 256)), std::sin(grid_theta(i, 256))});
    const double area = action_integral(gon);
    const double expected = 128.0 * std::sin(kTwoPi / 256.0);
    const bool polygon_ok = std::abs(area - expected) < 1e-12;

    CriterionResult r;
    r.id = 8;
    r.name = "integrator";
    r.pass = worst < 1e-6 && polygon_ok;
    r.details = {{"cases", cases},
                 {"max_det_defect", worst},
                 {"det_tolerance", 1e-6},
                 {"polygon_area", area},
                 {"polygon_expected", expected}};
    return r;
}

std::string determinism_payload(const SuiteOptions& opts) {
    std::ostringstream out;

    // A short simulation emitted as CSV + diagnostics JSON.
    const WeightedFlag flag = make_loop_flag(7, 64, {0.0, 0.5}, 0.1, 0.2);
    TestFunction rot;
    rot.poly.push_back({{2, 0}, 0.5});
    rot.poly.push_back({{0, 2}, 0.5});
    io::write_trajectory_header(out, flag.dimension);
    io::write_trajectory_rows(out, 0.0, flag);
    WeightedFlag cur = flag;
    for (int chunk = 0; chunk < 5; ++chunk) {
        FlowResult res = flow_flag(cur, rot, 0.02, 1e-3, FlowScheme::rk4);
        cur = std::move(res.flag);
        io::write_trajectory_rows(out, 0.02 * (chunk + 1), cur);
        out << io::dump(io::diagnostics_to_json(res.diagnostics));
    }

    // Flag serialization and a cheap suite report.
    out << io::dump(io::flag_to_json(cur));
    SuiteOptions sub = opts;
    sub.seeds = {1, 2, 3};
    const auto results = run_suites({"orbit_counts", "sl2z"}, sub);
    out << io::dump(report_json(results, sub));
    return out.str();
}

CriterionResult criterion_determinism(const SuiteOptions& opts) {
    const std::string first = determinism_payload(opts);
    const std::string second = determinism_payload(opts);
    CriterionResult r;
    r.id = 9;
    r.name = "determinism";
    r.pass = first == second && !first.empty();
    r.details = {{"payload_bytes", first.size()}, {"identical", first == second}};
    return r;
}

}  // namespace

std::vector<CriterionResult> run_suites(const std::vector<std::string>& names,
                                        const SuiteOptions& opts) {
    std::vector<CriterionResult> out;
    for (const std::string& name : names) {
        if (name == "moment_identity") out.push_back(criterion_moment_identity(opts));
        else if (name == "kernel") out.push_back(criterion_kernel(opts));
        else if (name == "conservation") out.push_back(criterion_conservation(opts));
        else if (name == "orbit_counts") out.push_back(criterion_orbit_counts(opts));
        else if (name == "sl2z") out.push_back(criterion_sl2z(opts));
        else if (name == "moser") out.push_back(criterion_moser(opts));
        else if (name == "injectivity") out.push_back(criterion_injectivity(opts));
        else if (name == "integrator") out.push_back(criterion_integrator(opts));
        else if (name == "determinism") out.push_back(criterion_determinism(opts));
        else throw ValidationError("unknown suite: " + name);
    }
    return out;
}

json report_json(const std::vector<CriterionResult>& results, const SuiteOptions& opts) {
    json j;
    json arr = json::array();
    bool pass = true;
    for (const CriterionResult& r : results) {
        arr.push_back({{"id", r.id}, {"name", r.name}, {"pass", r.pass}, {"details", r.details}});
        pass = pass && r.pass;
    }
    j["criteria"] = arr;
    j["pass"] = pass;
    j["nv"] = opts.nv;
    j["seeds"] = opts.seed_list();
    return j;
}

}  // namespace flagsim::suites
