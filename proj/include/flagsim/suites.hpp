#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "flagsim/flag.hpp"
#include "flagsim/symplectic.hpp"

namespace flagsim::suites {

struct SuiteOptions {
    std::vector<std::uint64_t> seeds;  // empty means 0..49
    int nv = 256;
    int threads = 0;  // 0 = FLAGSIM_THREADS / hardware

    std::vector<std::uint64_t> seed_list() const;
};

struct CriterionResult {
    int id = 0;
    std::string name;
    bool pass = false;
    nlohmann::json details;
};

/// Canonical criterion order: moment_identity, kernel, conservation,
/// orbit_counts, sl2z, moser, injectivity, integrator, determinism.
std::vector<std::string> suite_names();

/// Expand a suite selector: a name, "all", or the alias "symplectic"
/// (moment_identity + kernel + conservation + integrator).
std::vector<std::string> expand_suites(const std::string& selector);

std::vector<CriterionResult> run_suites(const std::vector<std::string>& names,
                                        const SuiteOptions& opts);

nlohmann::json report_json(const std::vector<CriterionResult>& results,
                           const SuiteOptions& opts);

// Deterministic case generators, shared with the test suites. Random draws
// never depend on nv, so one seed describes one continuum object at every
// resolution (this is what makes the refinement ratios meaningful).

/// Pointed-loop flag: wobbly circle with marks at the given fractions of the
/// vertex count (frac*nv must be integral) and one weighted point per mark.
WeightedFlag make_loop_flag(std::uint64_t seed, int nv, const std::vector<double>& mark_fracs,
                            double wobble, double density_amp);

/// Gentle Hamiltonian / test function: two Gaussian bumps plus a low-order
/// polynomial, gradients bounded by a small multiple of `strength`.
TestFunction random_hamiltonian(std::uint64_t seed, int dim, double strength);

/// Positive density 1 + amp * (normalized low-order Fourier field).
std::vector<double> random_density(std::uint64_t seed, int nv, double amp, int order = 2);

/// Tangential speed field vanishing exactly at the marked indices.
std::vector<double> random_speed_field(std::uint64_t seed, const DiscreteLoop& loop);

/// Adjust nu so every arc mass equals mu's exactly (to roundoff), adding one
/// smooth sin^2 bump per arc; the result has no kinks at the marks, unlike a
/// plain interior rescale.
std::vector<double> match_arc_masses(std::vector<double> nu, const std::vector<double>& mu,
                                     const std::vector<int>& marked);

}  // namespace flagsim::suites
