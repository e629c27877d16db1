#pragma once

// Campaign configuration: a strict JSON schema with explicit units in
// every key name. Unknown keys are rejected, the version field is
// mandatory, and parse -> serialize -> parse is an identity. Execution
// knobs (output directory, thread count) are deliberately not part of
// the schema so that a config + seed pins the output bytes.

#include <filesystem>
#include <fstream>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "biphoton/drift.hpp"
#include "biphoton/errors.hpp"
#include "biphoton/units.hpp"

namespace biphoton::io {

using nlohmann::json;

enum class WidthConvention { sigma, fwhm };

struct DriftConfig {
    std::string kind = "uniform"; // uniform | random-walk | thermal
    double step_std_rad = 0.0;
    std::vector<ThermalComponent> components;
    // 0 means "derive from the fiber thermal response at run time".
    double sensitivity_rad_per_k = 0.0;
};

struct CampaignConfig {
    std::string version = "1";
    std::string mode; // simulate | estimate | method-a | method-b | theory-curves
    std::uint64_t seed = 1;

    // Physics.
    double pump_wavelength_nm = 780.23;
    double degeneracy_wavelength_nm = 1560.46;
    double sample_length_m = 2.4;
    double d_true_ps_nm_km = 17.0;
    double static_phase_offset_rad = 0.0;
    std::optional<WidthConvention> width_convention;
    std::optional<double> filter_width_nm;
    std::optional<std::vector<double>> filter_widths_nm;

    // Calibration.
    double calibration_width_nm = 0.05;
    double calibration_threshold = 0.99;
    bool skip_calibration = false;

    // Detector.
    double bin_duration_s = 0.1;
    double max_rate_hz = 1e4;
    double accidental_rate_hz = 0.0;

    // Drift.
    DriftConfig drift;

    // Campaign.
    int bins_per_trace = 500;
    int repetitions = 200;
    std::string estimator_variant = "pdf-fit-ml"; // pdf-fit | pdf-fit-ml

    // simulate mode: direct visibility instead of physics-derived.
    std::optional<double> visibility;

    // theory-curves mode.
    std::string curve_shape = "both"; // gaussian | rectangular | both
    double gamma_max = 6.0;
    int curve_points = 241;
};

namespace detail {

inline void require_keys_known(const json& j, const std::set<std::string>& allowed,
                               const std::string& where) {
    for (const auto& [key, value] : j.items()) {
        (void)value;
        if (!allowed.count(key)) throw ConfigError("unknown config key '" + key + "' in " + where);
    }
}

template <typename T>
void read_if(const json& j, const char* key, T& out) {
    if (j.contains(key)) out = j.at(key).get<T>();
}

} // namespace detail

inline json to_json(const DriftConfig& d) {
    json j;
    j["kind"] = d.kind;
    if (d.kind == "random-walk") j["step_std_rad"] = d.step_std_rad;
    if (d.kind == "thermal") {
        json comps = json::array();
        for (const auto& c : d.components)
            comps.push_back({{"amplitude_k", c.amplitude_kelvin},
                             {"frequency_hz", c.frequency_hz},
                             {"phase_rad", c.phase_rad}});
        j["components"] = comps;
        j["sensitivity_rad_per_k"] = d.sensitivity_rad_per_k;
    }
    return j;
}

inline DriftConfig drift_from_json(const json& j) {
    detail::require_keys_known(j, {"kind", "step_std_rad", "components", "sensitivity_rad_per_k"},
                               "drift");
    DriftConfig d;
    detail::read_if(j, "kind", d.kind);
    if (d.kind != "uniform" && d.kind != "random-walk" && d.kind != "thermal")
        throw ConfigError("drift.kind must be uniform, random-walk or thermal");
    detail::read_if(j, "step_std_rad", d.step_std_rad);
    detail::read_if(j, "sensitivity_rad_per_k", d.sensitivity_rad_per_k);
    if (j.contains("components")) {
        for (const auto& c : j.at("components")) {
            detail::require_keys_known(c, {"amplitude_k", "frequency_hz", "phase_rad"},
                                       "drift.components[]");
            ThermalComponent tc;
            detail::read_if(c, "amplitude_k", tc.amplitude_kelvin);
            detail::read_if(c, "frequency_hz", tc.frequency_hz);
            detail::read_if(c, "phase_rad", tc.phase_rad);
            d.components.push_back(tc);
        }
    }
    return d;
}

inline void validate(const CampaignConfig& c);

inline json to_json(const CampaignConfig& c) {
    json j;
    j["version"] = c.version;
    j["mode"] = c.mode;
    j["seed"] = c.seed;
    j["pump_wavelength_nm"] = c.pump_wavelength_nm;
    j["degeneracy_wavelength_nm"] = c.degeneracy_wavelength_nm;
    j["sample_length_m"] = c.sample_length_m;
    j["d_true_ps_nm_km"] = c.d_true_ps_nm_km;
    j["static_phase_offset_rad"] = c.static_phase_offset_rad;
    if (c.width_convention)
        j["width_convention"] = *c.width_convention == WidthConvention::sigma ? "sigma" : "fwhm";
    if (c.filter_width_nm) j["filter_width_nm"] = *c.filter_width_nm;
    if (c.filter_widths_nm) j["filter_widths_nm"] = *c.filter_widths_nm;
    j["calibration_width_nm"] = c.calibration_width_nm;
    j["calibration_threshold"] = c.calibration_threshold;
    j["skip_calibration"] = c.skip_calibration;
    j["detector"] = {{"bin_duration_s", c.bin_duration_s},
                     {"max_rate_hz", c.max_rate_hz},
                     {"accidental_rate_hz", c.accidental_rate_hz}};
    j["drift"] = to_json(c.drift);
    j["bins_per_trace"] = c.bins_per_trace;
    j["repetitions"] = c.repetitions;
    j["estimator_variant"] = c.estimator_variant;
    if (c.visibility) j["visibility"] = *c.visibility;
    if (c.mode == "theory-curves") {
        j["curve_shape"] = c.curve_shape;
        j["gamma_max"] = c.gamma_max;
        j["curve_points"] = c.curve_points;
    }
    return j;
}

inline CampaignConfig config_from_json(const json& j) {
    detail::require_keys_known(
        j,
        {"version", "mode", "seed", "pump_wavelength_nm", "degeneracy_wavelength_nm",
         "sample_length_m", "d_true_ps_nm_km", "static_phase_offset_rad", "width_convention",
         "filter_width_nm", "filter_widths_nm", "calibration_width_nm", "calibration_threshold",
         "skip_calibration", "detector", "drift", "bins_per_trace", "repetitions",
         "estimator_variant", "visibility", "curve_shape", "gamma_max", "curve_points"},
        "config");

    CampaignConfig c;
    if (!j.contains("version")) throw ConfigError("config is missing the version field");
    c.version = j.at("version").get<std::string>();
    if (c.version != "1") throw ConfigError("unsupported config version '" + c.version + "'");
    if (!j.contains("mode")) throw ConfigError("config is missing the mode field");
    c.mode = j.at("mode").get<std::string>();
    static const std::set<std::string> kModes = {"simulate", "estimate", "method-a", "method-b",
                                                 "theory-curves"};
    if (!kModes.count(c.mode)) throw ConfigError("unknown mode '" + c.mode + "'");

    detail::read_if(j, "seed", c.seed);
    detail::read_if(j, "pump_wavelength_nm", c.pump_wavelength_nm);
    detail::read_if(j, "degeneracy_wavelength_nm", c.degeneracy_wavelength_nm);
    detail::read_if(j, "sample_length_m", c.sample_length_m);
    detail::read_if(j, "d_true_ps_nm_km", c.d_true_ps_nm_km);
    detail::read_if(j, "static_phase_offset_rad", c.static_phase_offset_rad);
    if (j.contains("width_convention")) {
        const auto s = j.at("width_convention").get<std::string>();
        if (s == "sigma")
            c.width_convention = WidthConvention::sigma;
        else if (s == "fwhm")
            c.width_convention = WidthConvention::fwhm;
        else
            throw ConfigError("width_convention must be 'sigma' or 'fwhm'");
    }
    if (j.contains("filter_width_nm")) c.filter_width_nm = j.at("filter_width_nm").get<double>();
    if (j.contains("filter_widths_nm"))
        c.filter_widths_nm = j.at("filter_widths_nm").get<std::vector<double>>();
    detail::read_if(j, "calibration_width_nm", c.calibration_width_nm);
    detail::read_if(j, "calibration_threshold", c.calibration_threshold);
    detail::read_if(j, "skip_calibration", c.skip_calibration);
    if (j.contains("detector")) {
        const auto& d = j.at("detector");
        detail::require_keys_known(d, {"bin_duration_s", "max_rate_hz", "accidental_rate_hz"},
                                   "detector");
        detail::read_if(d, "bin_duration_s", c.bin_duration_s);
        detail::read_if(d, "max_rate_hz", c.max_rate_hz);
        detail::read_if(d, "accidental_rate_hz", c.accidental_rate_hz);
    }
    if (j.contains("drift")) c.drift = drift_from_json(j.at("drift"));
    detail::read_if(j, "bins_per_trace", c.bins_per_trace);
    detail::read_if(j, "repetitions", c.repetitions);
    detail::read_if(j, "estimator_variant", c.estimator_variant);
    if (c.estimator_variant != "pdf-fit" && c.estimator_variant != "pdf-fit-ml")
        throw ConfigError("estimator_variant must be 'pdf-fit' or 'pdf-fit-ml'");
    if (j.contains("visibility")) c.visibility = j.at("visibility").get<double>();
    detail::read_if(j, "curve_shape", c.curve_shape);
    detail::read_if(j, "gamma_max", c.gamma_max);
    detail::read_if(j, "curve_points", c.curve_points);

    validate(c);
    return c;
}

inline void validate(const CampaignConfig& c) {
    auto require_positive = [](double v, const char* name) {
        if (!(v > 0.0)) throw ConfigError(std::string(name) + " must be positive");
    };
    require_positive(c.pump_wavelength_nm, "pump_wavelength_nm");
    require_positive(c.degeneracy_wavelength_nm, "degeneracy_wavelength_nm");
    require_positive(c.bin_duration_s, "detector.bin_duration_s");
    if (c.max_rate_hz < 0.0 || c.accidental_rate_hz < 0.0)
        throw ConfigError("detector rates must be >= 0");
    if (c.bins_per_trace < 1) throw ConfigError("bins_per_trace must be >= 1");
    if (c.repetitions < 1) throw ConfigError("repetitions must be >= 1");

    const bool needs_physics = c.mode == "method-a" || c.mode == "method-b" ||
                               (c.mode == "simulate" && !c.visibility);
    if (needs_physics) {
        require_positive(c.sample_length_m, "sample_length_m");
        if (c.mode == "method-a" || c.mode == "simulate") {
            if (!c.filter_width_nm)
                throw ConfigError(c.mode + " requires filter_width_nm (or a direct visibility)");
        }
        if (c.mode == "method-b") {
            if (!c.filter_widths_nm || c.filter_widths_nm->size() < 3)
                throw ConfigError("method-b requires filter_widths_nm with at least 3 entries");
            for (double w : *c.filter_widths_nm) require_positive(w, "filter_widths_nm entry");
        }
        // The sigma-vs-FWHM ambiguity is never resolved silently.
        if (!c.width_convention)
            throw ConfigError("width_convention is required whenever filter widths are given");
    }
    if (c.visibility && (*c.visibility < 0.0 || *c.visibility > 1.0))
        throw ConfigError("visibility must lie in [0, 1]");
    if (c.mode == "theory-curves") {
        if (c.curve_shape != "gaussian" && c.curve_shape != "rectangular" && c.curve_shape != "both")
            throw ConfigError("curve_shape must be gaussian, rectangular or both");
        require_positive(c.gamma_max, "gamma_max");
        if (c.curve_points < 2) throw ConfigError("curve_points must be >= 2");
    }
}

inline CampaignConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config: " + path.string());
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw ConfigError("config parse error in " + path.string() + ": " + e.what());
    }
    return config_from_json(j);
}

// Filter width in nm -> sigma_omega in rad/s honoring the convention.
inline double sigma_omega_from_width(double width_nm, WidthConvention convention,
                                     double degeneracy_wavelength_m) {
    const double sigma_nm =
        convention == WidthConvention::fwhm ? fwhm_to_stddev(width_nm) : width_nm;
    return sigma_lambda_to_omega(sigma_nm * 1e-9, degeneracy_wavelength_m);
}

} // namespace biphoton::io
