#pragma once

#include <cmath>
#include <fstream>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"

#include "optomech/constants.hpp"
#include "optomech/errors.hpp"
#include "optomech/params.hpp"
#include "optomech/sweep.hpp"

// JSON run configuration.
//
//   {
//     "physical":  { SI values; frequencies and rates as <key>_hz or <key>_wm },
//     "effective": { overrides in units of omega_m1 (<key>_wm) or Hz (<key>_hz) },
//     "sweep":     { "axis", "start", "stop", "n_points", ... }
//   }
//
// A <key>_hz value f is an ordinary frequency: the angular value is 2 pi f.
// A <key>_wm value is a multiple of the reference frequency omega_m1. Exactly
// one of the two spellings is accepted per key. Unknown keys are rejected.
namespace optomech {

using json = nlohmann::json;

struct RunConfig {
    json source; // the document as given, echoed into CSV output
    std::optional<PhysicalParams> physical;
    EffectiveParams effective;
    bool has_sweep = false;
    SweepSpec sweep; // base/physical mirror the fields above
};

namespace detail {

inline void reject_unknown_keys(const json& obj, const std::set<std::string>& allowed,
                                const std::string& section) {
    if (!obj.is_object()) {
        throw ConfigError("section '" + section + "' must be an object");
    }
    for (const auto& item : obj.items()) {
        if (!allowed.count(item.key())) {
            throw ConfigError("unknown key '" + item.key() + "' in section '" + section + "'");
        }
    }
}

inline std::optional<double> read_number(const json& obj, const std::string& key) {
    if (!obj.contains(key)) {
        return std::nullopt;
    }
    const auto& v = obj.at(key);
    if (!v.is_number()) {
        throw ConfigError("key '" + key + "' must be a number");
    }
    const double d = v.get<double>();
    if (!std::isfinite(d)) {
        throw ConfigError("key '" + key + "' must be finite");
    }
    return d;
}

inline double require_number(const json& obj, const std::string& key, const std::string& section) {
    auto v = read_number(obj, key);
    if (!v) {
        throw ConfigError("missing key '" + key + "' in section '" + section + "'");
    }
    return *v;
}

// Frequency-like key in units of omega_m1. `reference` is omega_m1 in rad/s
// and is needed to convert a _hz spelling.
inline std::optional<double> read_frequency_wm(const json& obj, const std::string& key,
                                               std::optional<double> reference) {
    const auto hz = read_number(obj, key + "_hz");
    const auto wm = read_number(obj, key + "_wm");
    if (hz && wm) {
        throw ConfigError("key '" + key + "' given both as _hz and _wm");
    }
    if (wm) {
        return *wm;
    }
    if (hz) {
        if (!reference) {
            throw ConfigError("key '" + key + "_hz' needs a physical section to set omega_m1");
        }
        return two_pi * *hz / *reference;
    }
    return std::nullopt;
}

inline std::set<std::string> with_units(std::initializer_list<const char*> keys) {
    std::set<std::string> out;
    for (const char* k : keys) {
        out.insert(std::string(k) + "_hz");
        out.insert(std::string(k) + "_wm");
    }
    return out;
}

inline bool read_bool(const json& obj, const std::string& key, bool fallback) {
    if (!obj.contains(key)) {
        return fallback;
    }
    if (!obj.at(key).is_boolean()) {
        throw ConfigError("key '" + key + "' must be a boolean");
    }
    return obj.at(key).get<bool>();
}

} // namespace detail

/**
 * Resolves a configuration document. Physical values set the defaults of
 * the effective parameters (lambda from U0, n_th from T0, rates divided by
 * omega_m1); every key in "effective" then overrides the derived value.
 */
inline RunConfig parse_config(const json& doc) {
    using namespace detail;
    RunConfig cfg;
    cfg.source = doc;
    reject_unknown_keys(doc, {"description", "physical", "effective", "sweep"}, "<root>");
    if (doc.contains("description") && !doc.at("description").is_string()) {
        throw ConfigError("key 'description' must be a string");
    }

    std::optional<double> reference;
    if (doc.contains("physical")) {
        const json& ph = doc.at("physical");
        auto allowed = with_units({"gamma1", "gamma2", "kappa", "omega_m2"});
        allowed.insert({"m1", "m2", "omega_m1_hz", "C0", "U0", "L", "sigma1", "s", "T0"});
        reject_unknown_keys(ph, allowed, "physical");
        PhysicalParams p;
        p.m1 = require_number(ph, "m1", "physical");
        p.m2 = read_number(ph, "m2").value_or(p.m1);
        p.omega_m1 = two_pi * require_number(ph, "omega_m1_hz", "physical");
        if (!(p.omega_m1 > 0.0)) {
            throw ConfigError("omega_m1_hz must be > 0");
        }
        reference = p.omega_m1;
        p.omega_m2 = read_frequency_wm(ph, "omega_m2", reference).value_or(1.0) * p.omega_m1;
        if (auto hz = read_number(ph, "omega_m2_hz")) {
            p.omega_m2 = two_pi * *hz;
        }
        p.C0 = require_number(ph, "C0", "physical");
        p.U0 = read_number(ph, "U0").value_or(0.0);
        p.L = require_number(ph, "L", "physical");
        p.sigma1 = require_number(ph, "sigma1", "physical");
        p.s = require_number(ph, "s", "physical");
        p.T0 = read_number(ph, "T0");

        EffectiveParams& ep = cfg.effective;
        ep.omega_m1 = 1.0;
        ep.omega_m2 = p.omega_m2 / p.omega_m1;
        if (auto wm = read_number(ph, "omega_m2_wm")) {
            ep.omega_m2 = *wm;
        }
        for (auto [key, phys, eff] : {std::tuple{"kappa", &p.kappa, &ep.kappa},
                                      std::tuple{"gamma1", &p.gamma1, &ep.gamma1},
                                      std::tuple{"gamma2", &p.gamma2, &ep.gamma2}}) {
            if (auto v = read_frequency_wm(ph, key, reference)) {
                *eff = *v;
                *phys = *v * p.omega_m1;
                if (auto hz = read_number(ph, std::string(key) + "_hz")) {
                    *phys = two_pi * *hz;
                }
            }
        }
        cfg.physical = p;
    }

    if (doc.contains("effective")) {
        const json& ef = doc.at("effective");
        auto allowed = with_units({"g1_eff", "g2_eff", "delta_a", "kappa", "gamma1", "gamma2",
                                   "lambda_mpa", "chi", "omega_m1", "omega_m2"});
        allowed.insert({"theta", "n_th", "n_th1", "n_th2"});
        reject_unknown_keys(ef, allowed, "effective");
        EffectiveParams& ep = cfg.effective;
        for (auto [key, field] : {std::pair{"g1_eff", &ep.g1_eff}, std::pair{"g2_eff", &ep.g2_eff},
                                  std::pair{"delta_a", &ep.Delta_a}, std::pair{"kappa", &ep.kappa},
                                  std::pair{"gamma1", &ep.gamma1}, std::pair{"gamma2", &ep.gamma2},
                                  std::pair{"lambda_mpa", &ep.lambda_mpa}, std::pair{"chi", &ep.chi},
                                  std::pair{"omega_m1", &ep.omega_m1},
                                  std::pair{"omega_m2", &ep.omega_m2}}) {
            if (auto v = read_frequency_wm(ef, key, reference)) {
                *field = *v;
            }
        }
        if (auto v = read_number(ef, "theta")) {
            ep.theta = wrap_phase(*v);
        }
        if (ef.contains("n_th") && (ef.contains("n_th1") || ef.contains("n_th2"))) {
            throw ConfigError("give either n_th or n_th1/n_th2, not both");
        }
        if (auto v = read_number(ef, "n_th")) {
            ep.n_th1 = *v;
            ep.n_th2 = *v;
        }
        if (auto v = read_number(ef, "n_th1")) {
            ep.n_th1 = *v;
        }
        if (auto v = read_number(ef, "n_th2")) {
            ep.n_th2 = *v;
        }
    }

    if (cfg.physical) {
        PhysicalParams& p = *cfg.physical;
        EffectiveParams& ep = cfg.effective;
        // Rates given only on the effective side still make the physical set complete.
        if (p.kappa == 0.0) p.kappa = ep.kappa * p.omega_m1;
        if (p.gamma1 == 0.0) p.gamma1 = ep.gamma1 * p.omega_m1;
        if (p.gamma2 == 0.0) p.gamma2 = ep.gamma2 * p.omega_m1;
        try {
            p.validate();
        } catch (const InvalidArgument& e) {
            throw ConfigError(std::string("physical: ") + e.what());
        }
        const bool lambda_override = doc.contains("effective") &&
                                     (doc.at("effective").contains("lambda_mpa_wm") ||
                                      doc.at("effective").contains("lambda_mpa_hz"));
        if (!lambda_override) {
            ep.lambda_mpa = lambda_from_voltage(p) / p.omega_m1;
        }
        const json* ef = doc.contains("effective") ? &doc.at("effective") : nullptr;
        const bool nth_override = ef && (ef->contains("n_th") || ef->contains("n_th1") || ef->contains("n_th2"));
        if (p.T0 && !nth_override) {
            ep.n_th1 = n_th_from_temperature(p.omega_m1, *p.T0);
            ep.n_th2 = n_th_from_temperature(p.omega_m2, *p.T0);
        }
    }

    try {
        cfg.effective.validate();
    } catch (const InvalidArgument& e) {
        throw ConfigError(std::string("effective: ") + e.what());
    }

    cfg.sweep.base = cfg.effective;
    cfg.sweep.physical = cfg.physical;
    if (doc.contains("sweep")) {
        const json& sw = doc.at("sweep");
        reject_unknown_keys(sw,
                            {"name", "axis", "start", "stop", "n_points", "couple_opa_to_optimal",
                             "detuning_tracks_mechanics"},
                            "sweep");
        cfg.has_sweep = true;
        if (sw.contains("name")) {
            if (!sw.at("name").is_string()) throw ConfigError("sweep.name must be a string");
            cfg.sweep.name = sw.at("name").get<std::string>();
        }
        if (sw.contains("axis")) {
            if (!sw.at("axis").is_string()) throw ConfigError("sweep.axis must be a string");
            cfg.sweep.axis = sw.at("axis").get<std::string>();
        }
        cfg.sweep.start = require_number(sw, "start", "sweep");
        cfg.sweep.stop = require_number(sw, "stop", "sweep");
        if (sw.contains("n_points")) {
            if (!sw.at("n_points").is_number_integer() || sw.at("n_points").get<long long>() < 2) {
                throw ConfigError("sweep.n_points must be an integer >= 2");
            }
            cfg.sweep.n_points = sw.at("n_points").get<std::size_t>();
        }
        cfg.sweep.couple_opa_to_optimal = read_bool(sw, "couple_opa_to_optimal", false);
        cfg.sweep.detuning_tracks_mechanics = read_bool(sw, "detuning_tracks_mechanics", false);
        validate(cfg.sweep);
    }
    return cfg;
}

inline json read_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw ConfigError("cannot open config file '" + path + "'");
    }
    try {
        return json::parse(in);
    } catch (const json::exception& e) {
        throw ConfigError("invalid JSON in '" + path + "': " + e.what());
    }
}

inline RunConfig load_config(const std::string& path) { return parse_config(read_json_file(path)); }

/**
 * Configuration documents of the reference figures, one per curve. Parsing
 * them gives exactly the specs of figure_preset().
 */
inline std::vector<json> preset_documents(const std::string& name) {
    const auto specs = figure_preset(name); // validates the name
    std::vector<json> docs;
    for (const auto& s : specs) {
        const double kappa = s.base.kappa;
        json doc = {
            {"description", "reference figure curve " + s.name},
            {"physical",
             {{"m1", 20.0e-15},
              {"m2", 20.0e-15},
              {"omega_m1_hz", 134.0e3},
              {"omega_m2_wm", 1.0},
              {"C0", 27.5e-9},
              {"U0", 0.0},
              {"L", 0.1e-3},
              {"sigma1", 1.25e17},
              {"s", 0.08e-12},
              {"gamma1_wm", 1.0e-6},
              {"gamma2_wm", 1.0e-6},
              {"kappa_wm", kappa}}},
            {"effective",
             {{"g1_eff_wm", s.base.g1_eff},
              {"g2_eff_wm", s.base.g2_eff},
              {"delta_a_wm", s.base.Delta_a},
              {"chi_wm", s.base.chi},
              {"theta", s.base.theta},
              {"n_th", s.base.n_th1}}},
            {"sweep",
             {{"name", s.name},
              {"axis", s.axis},
              {"start", s.start},
              {"stop", s.stop},
              {"n_points", s.n_points},
              {"couple_opa_to_optimal", s.couple_opa_to_optimal},
              {"detuning_tracks_mechanics", s.detuning_tracks_mechanics}}},
        };
        docs.push_back(std::move(doc));
    }
    return docs;
}

} // namespace optomech
