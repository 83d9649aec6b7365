#include "flagsim/moser.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <string>

#include "flagsim/errors.hpp"
#include "flagsim/flag.hpp"

namespace flagsim {

namespace {

void check_nowhere_zero(const std::vector<double>& d, const char* what) {
    if (d.empty()) throw ValidationError(std::string(what) + ": empty density");
    for (double x : d)
        if (x == 0.0) throw SignError(std::string(what) + ": density has a zero entry");
    for (double x : d)
        if ((x > 0.0) != (d[0] > 0.0))
            throw SignError(std::string(what) + ": density changes sign");
}

double lin_interp_periodic(const std::vector<double>& values, double t) {
    const int n = static_cast<int>(values.size());
    double u = std::fmod(t, static_cast<double>(n));
    if (u < 0.0) u += n;
    const int i = std::min(static_cast<int>(u), n - 1);
    const double s = u - i;
    return (1.0 - s) * values[i] + s * values[(i + 1) % n];
}

}  // namespace

double CircleMap::apply(double theta) const {
    const int n = size();
    const double dth = grid_step(n);
    double u = std::fmod(theta, kTwoPi);
    if (u < 0.0) u += kTwoPi;
    int i = std::min(static_cast<int>(u / dth), n - 1);
    const double s = (u - i * dth) / dth;
    const double ti = targets[i];
    const double tn = (i + 1 < n) ? targets[i + 1] : targets[0] + kTwoPi;
    return (1.0 - s) * ti + s * tn + (theta - u);
}

double CircleMap::invert(double s) const {
    const int n = size();
    const double dth = grid_step(n);
    const double base = targets[0];
    double v = std::fmod(s - base, kTwoPi);
    if (v < 0.0) v += kTwoPi;
    const double lift = (s - base) - v;  // multiple of 2*pi
    v += base;                           // principal branch [base, base + 2*pi)
    // Binary search for the cell with targets[i] <= v < targets[i+1].
    int lo = 0, hi = n;  // virtual knot n holds targets[0] + 2*pi
    while (hi - lo > 1) {
        const int mid = (lo + hi) / 2;
        const double tm = (mid < n) ? targets[mid] : base + kTwoPi;
        if (tm <= v)
            lo = mid;
        else
            hi = mid;
    }
    const double t_lo = targets[lo];
    const double t_hi = (lo + 1 < n) ? targets[lo + 1] : base + kTwoPi;
    double theta;
    if (v == t_lo) {
        theta = lo * dth;  // exact knot hit
    } else {
        theta = (lo + (v - t_lo) / (t_hi - t_lo)) * dth;
    }
    return theta + lift;
}

std::vector<double> arc_masses(const std::vector<double>& density,
                               const std::vector<int>& marked) {
    const int n = static_cast<int>(density.size());
    const double dth = grid_step(n);
    if (marked.empty()) {
        double total = 0.0;
        for (double d : density) total += d;
        return {total * dth};
    }
    std::vector<double> masses;
    const int k = static_cast<int>(marked.size());
    for (int a = 0; a < k; ++a) {
        const int ia = marked[a];
        const int ib = marked[(a + 1) % k];
        const int span = (ib - ia + n) % n;
        const int len = (span == 0) ? n : span;
        double m = 0.5 * (density[ia] + density[(ia + len) % n]);
        for (int s = 1; s < len; ++s) m += density[(ia + s) % n];
        masses.push_back(m * dth);
    }
    return masses;
}

namespace {

void check_same_class(const std::vector<double>& mu, const std::vector<double>& nu,
                      const std::vector<int>& marked, double tol) {
    if (mu.size() != nu.size()) throw LengthMismatch("densities of different sizes");
    check_nowhere_zero(mu, "mu");
    check_nowhere_zero(nu, "nu");
    if ((mu[0] > 0.0) != (nu[0] > 0.0))
        throw SignMismatch("densities of opposite sign");
    const std::vector<double> am = arc_masses(mu, marked);
    const std::vector<double> an = arc_masses(nu, marked);
    for (std::size_t i = 0; i < am.size(); ++i) {
        const double scale = 0.5 * (std::abs(am[i]) + std::abs(an[i]));
        if (std::abs(am[i] - an[i]) > tol * scale)
            throw MassMismatch("arc " + std::to_string(i) + " mass differs: " +
                               std::to_string(am[i]) + " vs " + std::to_string(an[i]));
    }
}

}  // namespace

CircleMap moser_map_circle(const std::vector<double>& mu, const std::vector<double>& nu,
                           const std::vector<int>& marked, double tol) {
    check_same_class(mu, nu, marked, tol);
    const int n = static_cast<int>(mu.size());
    const double dth = grid_step(n);
    const double sign = mu[0] > 0.0 ? 1.0 : -1.0;

    CircleMap map;
    map.targets.assign(n, 0.0);
    map.fixed = marked;

    // Anchor the single arc at vertex 0 when unmarked.
    const std::vector<int> anchors = marked.empty() ? std::vector<int>{0} : marked;
    const int k = static_cast<int>(anchors.size());

    for (int a = 0; a < k; ++a) {
        const int ia = anchors[a];
        const int span = (anchors[(a + 1) % k] - ia + n) % n;
        const int len = (span == 0) ? n : span;

        // Local cumulative trapezoidal masses along this arc, both densities.
        std::vector<double> cmu(len + 1, 0.0), cnu(len + 1, 0.0);
        for (int s = 0; s < len; ++s) {
            const int i = (ia + s) % n;
            const int j = (ia + s + 1) % n;
            cmu[s + 1] = cmu[s] + sign * 0.5 * dth * (mu[i] + mu[j]);
            cnu[s + 1] = cnu[s] + sign * 0.5 * dth * (nu[i] + nu[j]);
        }

        for (int s = 0; s < len; ++s) {
            const int idx = (ia + s) % n;
            double lifted;
            if (s == 0) {
                lifted = ia * dth;  // marked vertices are exact fixed points
            } else {
                const double target = cmu[s] / cmu[len] * cnu[len];
                int j = static_cast<int>(std::upper_bound(cnu.begin(), cnu.end(), target) -
                                         cnu.begin()) -
                        1;
                j = std::clamp(j, 0, len - 1);
                // Invert the C^1 cumulative mass of nu: inside each cell it is
                // the integral of the linear density, a monotone parabola.
                // Quadratic inversion keeps the map free of cell-scale
                // sawtooth, which downstream derivatives would amplify.
                const double rho0 = sign * nu[(ia + j) % n];
                const double rho1 = sign * nu[(ia + j + 1) % n];
                const double tau = (target - cnu[j]) / dth;
                const double disc = rho0 * rho0 + 2.0 * (rho1 - rho0) * tau;
                const double denom = 0.5 * (rho0 + std::sqrt(std::max(disc, 0.0)));
                const double frac = denom > 0.0 ? std::clamp(tau / denom, 0.0, 1.0) : 0.0;
                lifted = (ia + j + frac) * dth;
            }
            map.targets[idx] = (ia + s < n) ? lifted : lifted - kTwoPi;
        }
    }
    return map;
}

std::vector<double> push_density(const CircleMap& map, const std::vector<double>& mu,
                                 const std::vector<int>& marked) {
    const int n = map.size();
    if (static_cast<int>(mu.size()) != n) throw LengthMismatch("push_density: size mismatch");
    const double dth = grid_step(n);

    // Lifted monotonicity of the target sequence.
    for (int i = 0; i < n; ++i) {
        const double a = map.targets[i];
        const double b = (i + 1 < n) ? map.targets[i + 1] : map.targets[0] + kTwoPi;
        if (b <= a) throw NonMonotone("push_density: circle map is not strictly increasing");
    }

    // Symmetric centered-difference derivative of the lifted map at the grid
    // vertices (fourth-order five-point stencil; the second-order truncation
    // term would dominate the pushforward error).
    auto lifted = [&](int i) {
        double shift = 0.0;
        while (i < 0) {
            i += n;
            shift -= kTwoPi;
        }
        while (i >= n) {
            i -= n;
            shift += kTwoPi;
        }
        return map.targets[i] + shift;
    };
    std::vector<double> gp(n);
    for (int i = 0; i < n; ++i)
        gp[i] = (-lifted(i + 2) + 8.0 * lifted(i + 1) - 8.0 * lifted(i - 1) + lifted(i - 2)) /
                (12.0 * dth);

    // nu(theta_j) = mu(p) / g'(p) at p = g^{-1}(theta_j).
    std::vector<double> nu(n);
    for (int j = 0; j < n; ++j) {
        const double p = map.invert(j * dth);
        const double t = p / dth;  // vertex units
        nu[j] = lin_interp_periodic(mu, t) / lin_interp_periodic(gp, t);
    }

    // Exact per-arc mass restoration (the marks are fixed points of the map,
    // so arcs correspond to themselves).
    const std::vector<int>& arcs = marked.empty() ? map.fixed : marked;
    return rescale_arc_masses(std::move(nu), arcs, arc_masses(mu, arcs));
}

std::vector<double> rescale_arc_masses(std::vector<double> density,
                                       const std::vector<int>& marked,
                                       const std::vector<double>& targets) {
    const int n = static_cast<int>(density.size());
    const double dth = grid_step(n);
    if (marked.empty()) {
        double raw = 0.0;
        for (double d : density) raw += d;
        raw *= dth;
        if (raw != 0.0) {
            const double c = targets.at(0) / raw;
            for (double& d : density) d *= c;
        }
        return density;
    }
    const int k = static_cast<int>(marked.size());
    if (static_cast<int>(targets.size()) != k)
        throw LengthMismatch("rescale_arc_masses: one target per arc required");
    for (int a = 0; a < k; ++a) {
        const int ia = marked[a];
        const int span = (marked[(a + 1) % k] - ia + n) % n;
        const int len = (span == 0) ? n : span;
        if (len < 2) continue;
        const double ends = 0.5 * (density[ia] + density[(ia + len) % n]);
        double interior = 0.0;
        for (int s = 1; s < len; ++s) interior += density[(ia + s) % n];
        if (interior == 0.0) continue;
        const double c = (targets[a] / dth - ends) / interior;
        for (int s = 1; s < len; ++s) density[(ia + s) % n] *= c;
    }
    return density;
}

std::vector<double> interpolation_path(const std::vector<double>& mu,
                                       const std::vector<double>& nu,
                                       const std::vector<int>& marked, double t,
                                       double tol) {
    check_same_class(mu, nu, marked, tol);
    std::vector<double> out(mu.size());
    for (std::size_t i = 0; i < mu.size(); ++i) out[i] = (1.0 - t) * mu[i] + t * nu[i];
    return out;
}

std::vector<double> moser_vector_field(const std::vector<double>& mu,
                                       const std::vector<double>& gamma,
                                       const std::vector<int>& marked) {
    if (mu.size() != gamma.size()) throw LengthMismatch("moser_vector_field: size mismatch");
    for (double x : mu)
        if (x == 0.0) throw SignError("moser_vector_field: mu has a zero");
    for (int m : marked)
        if (gamma[m] != 0.0)
            throw ConstraintViolation("moser_vector_field: gamma nonzero at marked index");
    std::vector<double> X(mu.size());
    for (std::size_t i = 0; i < mu.size(); ++i) X[i] = gamma[i] / mu[i];
    return X;
}

}  // namespace flagsim
