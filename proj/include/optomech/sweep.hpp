#pragma once

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstddef>
#include <ctime>
#include <exception>
#include <mutex>
#include <numbers>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "optomech/dynamics.hpp"
#include "optomech/errors.hpp"
#include "optomech/observables.hpp"
#include "optomech/params.hpp"

namespace optomech {

inline constexpr const char* library_version = "0.1.0";
inline constexpr std::size_t default_sweep_points = 201;

/**
 * One curve: a base parameter set and an axis to vary.
 *
 * Axis "U0" is the bias voltage in volts and needs the physical overlay to
 * convert it into lambda. Every other axis names a field of EffectiveParams
 * (in units of omega_m1); "g_eff", "n_th" and "gamma" set both resonators.
 */
struct SweepSpec {
    std::string name = "sweep";
    EffectiveParams base;
    std::optional<PhysicalParams> physical;
    std::string axis = "U0";
    double start = 0.0;
    double stop = 1.0;
    std::size_t n_points = default_sweep_points;
    // Recompute (chi, theta) = optimal_opa(Delta_a, omega'_m1, kappa) per point.
    bool couple_opa_to_optimal = false;
    // Set Delta_a = omega'_m1 per point, following the lambda shift.
    bool detuning_tracks_mechanics = false;
};

struct SweepRow {
    double axis_value = 0.0;
    double lambda_wm = 0.0;
    bool stable = false;
    double max_real_part = 0.0;
    EffectiveParams params;
    std::optional<ObservablesRecord> observables; // absent when unstable
};

struct SweepMetadata {
    std::string version = library_version;
    std::string timestamp;
};

struct SweepResult {
    SweepSpec spec;
    std::vector<SweepRow> rows;
    SweepMetadata metadata;
};

inline const std::vector<std::string>& sweep_axes() {
    static const std::vector<std::string> axes{
        "U0",     "lambda_mpa", "chi",     "theta", "kappa", "Delta_a", "g_eff",    "g1_eff",
        "g2_eff", "n_th",       "n_th1",   "n_th2", "gamma", "gamma1",  "gamma2",   "omega_m2",
    };
    return axes;
}

inline void validate(const SweepSpec& spec) {
    const auto& axes = sweep_axes();
    if (std::find(axes.begin(), axes.end(), spec.axis) == axes.end()) {
        throw ConfigError("unknown sweep axis '" + spec.axis + "'");
    }
    if (spec.axis == "U0" && !spec.physical) {
        throw ConfigError("axis U0 needs physical parameters");
    }
    if (spec.n_points < 2) {
        throw ConfigError("n_points must be >= 2");
    }
    if (!(spec.start < spec.stop) || !std::isfinite(spec.start) || !std::isfinite(spec.stop)) {
        throw ConfigError("sweep bounds need start < stop");
    }
}

inline double axis_value(const SweepSpec& spec, std::size_t i) {
    if (i + 1 == spec.n_points) {
        return spec.stop;
    }
    const double t = static_cast<double>(i) / static_cast<double>(spec.n_points - 1);
    return spec.start + t * (spec.stop - spec.start);
}

/// Effective parameters for one axis value, with the per-point couplings
/// (detuning tracking, optimal OPA) applied.
inline EffectiveParams params_at(const SweepSpec& spec, double x) {
    EffectiveParams ep = spec.base;
    const std::string& a = spec.axis;
    if (a == "U0") {
        PhysicalParams p = *spec.physical;
        p.U0 = x;
        ep.lambda_mpa = lambda_from_voltage(p) / p.omega_m1;
    } else if (a == "lambda_mpa") {
        ep.lambda_mpa = x;
    } else if (a == "chi") {
        ep.chi = x;
    } else if (a == "theta") {
        ep.theta = wrap_phase(x);
    } else if (a == "kappa") {
        ep.kappa = x;
    } else if (a == "Delta_a") {
        ep.Delta_a = x;
    } else if (a == "g_eff") {
        ep.g1_eff = x;
        ep.g2_eff = x;
    } else if (a == "g1_eff") {
        ep.g1_eff = x;
    } else if (a == "g2_eff") {
        ep.g2_eff = x;
    } else if (a == "n_th") {
        ep.n_th1 = x;
        ep.n_th2 = x;
    } else if (a == "n_th1") {
        ep.n_th1 = x;
    } else if (a == "n_th2") {
        ep.n_th2 = x;
    } else if (a == "gamma") {
        ep.gamma1 = x;
        ep.gamma2 = x;
    } else if (a == "gamma1") {
        ep.gamma1 = x;
    } else if (a == "gamma2") {
        ep.gamma2 = x;
    } else if (a == "omega_m2") {
        ep.omega_m2 = x;
    } else {
        throw ConfigError("unknown sweep axis '" + a + "'");
    }
    if (spec.detuning_tracks_mechanics) {
        ep.Delta_a = ep.omega_m1_prime();
    }
    if (spec.couple_opa_to_optimal) {
        const auto opa = optimal_opa(ep.Delta_a, ep.omega_m1_prime(), ep.kappa);
        ep.chi = opa.chi;
        ep.theta = opa.theta;
    }
    return ep;
}

// Full evaluation of one parameter set; unstable points carry no observables.
inline SweepRow evaluate_point(const EffectiveParams& ep) {
    SweepRow row;
    row.params = ep;
    row.lambda_wm = ep.lambda_mpa;
    const auto drift = build_drift(ep);
    const auto report = stability(drift);
    row.stable = report.stable;
    row.max_real_part = report.max_real_part;
    if (row.stable) {
        const auto cov = steady_state(drift, build_noise(ep));
        row.observables = compute_observables(cov);
    }
    return row;
}

inline SweepRow evaluate_row(const SweepSpec& spec, std::size_t i) {
    const double x = axis_value(spec, i);
    SweepRow row = evaluate_point(params_at(spec, x));
    row.axis_value = x;
    return row;
}

inline std::string utc_timestamp() {
    const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

/**
 * Evaluates every axis point. Rows are independent; with threads > 1 they
 * are computed by a worker pool and stored by index, so the output does not
 * depend on completion order.
 */
inline SweepResult run_sweep(const SweepSpec& spec, unsigned threads = 1) {
    validate(spec);
    SweepResult result;
    result.spec = spec;
    result.metadata.timestamp = utc_timestamp();
    result.rows.resize(spec.n_points);

    const unsigned workers = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(spec.n_points)));
    if (workers == 1) {
        for (std::size_t i = 0; i < spec.n_points; ++i) {
            result.rows[i] = evaluate_row(spec, i);
        }
        return result;
    }

    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    auto work = [&] {
        for (std::size_t i = next++; i < spec.n_points; i = next++) {
            try {
                result.rows[i] = evaluate_row(spec, i);
            } catch (...) {
                std::lock_guard lock(failure_mutex);
                if (!failure) {
                    failure = std::current_exception();
                }
            }
        }
    };
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < workers; ++w) {
        pool.emplace_back(work);
    }
    for (auto& t : pool) {
        t.join();
    }
    if (failure) {
        std::rethrow_exception(failure);
    }
    return result;
}

namespace detail {

// Shared by all three figures: degenerate resonators with g~ = 0.3 omega_m,
// gamma = 1e-6 omega_m, Delta_a = omega'_m tracking the MPA shift, theta = pi.
inline SweepSpec figure_base(double kappa, double n_th, double u_stop) {
    SweepSpec s;
    PhysicalParams p = device_defaults();
    p.kappa = kappa * p.omega_m1;
    s.physical = p;
    s.base.g1_eff = 0.3;
    s.base.g2_eff = 0.3;
    s.base.kappa = kappa;
    s.base.gamma1 = 1.0e-6;
    s.base.gamma2 = 1.0e-6;
    s.base.omega_m1 = 1.0;
    s.base.omega_m2 = 1.0;
    s.base.n_th1 = n_th;
    s.base.n_th2 = n_th;
    s.base.theta = std::numbers::pi;
    s.base.chi = 0.0;
    s.base.Delta_a = 1.0;
    s.axis = "U0";
    s.start = 0.0;
    s.stop = u_stop;
    s.n_points = default_sweep_points;
    s.detuning_tracks_mechanics = true;
    return s;
}

} // namespace detail

/**
 * Parameter sets of the three reference figures, one SweepSpec per curve.
 *   fig1: phonon numbers, kappa = 20, n_th = 1000, curves chi0 and chiopt
 *   fig2: squeezing,      kappa = 20, n_th = 100,  curves chi0 and chiopt
 *   fig3: entanglement,   kappa = 1,  chi = kappa/4, n_th in {100, 500, 1000}
 */
inline std::vector<SweepSpec> figure_preset(const std::string& name) {
    std::vector<SweepSpec> out;
    if (name == "fig1" || name == "fig2") {
        const double n_th = name == "fig1" ? 1000.0 : 100.0;
        const double stop = name == "fig1" ? 0.02 : 0.5;
        SweepSpec off = detail::figure_base(20.0, n_th, stop);
        off.name = name + "_chi0";
        SweepSpec opt = off;
        opt.name = name + "_chiopt";
        opt.couple_opa_to_optimal = true;
        opt.base.chi = 5.0;
        out.push_back(off);
        out.push_back(opt);
    } else if (name == "fig3") {
        for (double n_th : {100.0, 500.0, 1000.0}) {
            SweepSpec s = detail::figure_base(1.0, n_th, 0.5);
            s.name = "fig3_nth" + std::to_string(static_cast<int>(n_th));
            s.couple_opa_to_optimal = true;
            s.base.chi = 0.25;
            out.push_back(s);
        }
    } else {
        throw ConfigError("unknown figure preset '" + name + "'");
    }
    return out;
}

} // namespace optomech
