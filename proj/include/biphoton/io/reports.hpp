#pragma once

// JSON result schemas (all carry a top-level "schema": 1) and the trace
// sidecar metadata file.

#include <filesystem>
#include <fstream>

#include <json.hpp>

#include "biphoton/cd_methods.hpp"
#include "biphoton/estimators.hpp"
#include "biphoton/io/csv.hpp"
#include "biphoton/trace.hpp"
#include "biphoton/units.hpp"

namespace biphoton::io {

inline json to_json(const DriftProcess& d) {
    json j;
    switch (d.kind) {
        case DriftProcess::Kind::uniform_random_phase:
            j["kind"] = "uniform";
            break;
        case DriftProcess::Kind::random_walk:
            j["kind"] = "random-walk";
            j["step_std_rad"] = d.step_std_rad;
            break;
        case DriftProcess::Kind::thermal_sines: {
            j["kind"] = "thermal";
            json comps = json::array();
            for (const auto& c : d.components)
                comps.push_back({{"amplitude_k", c.amplitude_kelvin},
                                 {"frequency_hz", c.frequency_hz},
                                 {"phase_rad", c.phase_rad}});
            j["components"] = comps;
            j["sensitivity_rad_per_k"] = d.sensitivity_rad_per_kelvin;
            break;
        }
    }
    return j;
}

inline void write_trace_sidecar(const std::filesystem::path& path, const CoincidenceTrace& trace) {
    json j;
    j["schema_version"] = "1";
    j["bin_duration_s"] = trace.bin_duration_s;
    j["n_bins"] = trace.counts.size();
    if (trace.true_visibility) j["true_visibility"] = *trace.true_visibility;
    j["phi0_rad"] = trace.metadata.phi0;
    j["drift"] = to_json(trace.metadata.drift);
    j["detector"] = {{"bin_duration_s", trace.metadata.detector.bin_duration_s},
                     {"max_rate_hz", trace.metadata.detector.max_rate_hz},
                     {"accidental_rate_hz", trace.metadata.detector.accidental_rate_hz},
                     {"seed", trace.metadata.detector.seed}};
    write_text_file(path, j.dump(2) + "\n");
}

// Persist a trace as CSV plus sidecar; stem gets ".csv" / ".json".
inline void save_trace(const std::filesystem::path& stem, const CoincidenceTrace& trace) {
    auto csv = stem;
    csv += ".csv";
    auto sidecar = stem;
    sidecar += ".json";
    write_trace_csv(csv, trace);
    write_trace_sidecar(sidecar, trace);
}

inline CoincidenceTrace load_trace(const std::filesystem::path& csv_path) {
    auto sidecar = csv_path;
    sidecar.replace_extension(".json");
    std::ifstream in(sidecar);
    if (!in) throw IoError("trace sidecar not found: " + sidecar.string());
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw IoError("trace sidecar parse error: " + std::string(e.what()));
    }
    auto trace = read_trace_csv(csv_path, j.at("bin_duration_s").get<double>());
    if (j.contains("true_visibility")) trace.true_visibility = j.at("true_visibility").get<double>();
    return trace;
}

inline json estimation_report(const VisibilityEstimate& est) {
    json j;
    j["schema"] = 1;
    j["method"] = to_string(est.method);
    j["visibility"] = est.visibility;
    j["std_error"] = est.std_error;
    j["n_bins_used"] = est.diagnostics.n_bins_used;
    j["scale"] = est.diagnostics.scale_estimate;
    j["warnings"] = est.diagnostics.warnings;
    return j;
}

inline json cd_result_report(const CdResult& result, double wavelength_m) {
    json j;
    j["schema"] = 1;
    j["method"] = to_string(result.method);
    j["d_ps_nm_km"] = result.d_ps_nm_km;
    j["beta2_s2_m"] = result.beta2;
    j["std_error_ps_nm_km"] = result.std_error_ps_nm_km;
    if (result.method == CdMethod::inflexion_point) {
        j["samples"] = result.samples;
        j["visibilities"] = result.inflexion.visibilities;
        j["excluded"] = result.inflexion.excluded;
        j["sample_mean"] = result.inflexion.sample_mean;
        j["sample_std"] = result.inflexion.sample_std;
        j["gauss_mean"] = result.inflexion.gauss_mean;
        j["gauss_sigma"] = result.inflexion.gauss_sigma;
    } else {
        j["chi2"] = result.multipoint.chi2;
        j["dof"] = result.multipoint.dof;
        json points = json::array();
        for (const auto& p : result.multipoint.points) {
            points.push_back(
                {{"sigma_rad_s", p.sigma_omega},
                 {"sigma_nm", sigma_omega_to_lambda(p.sigma_omega, wavelength_m) * 1e9},
                 {"visibility", p.visibility},
                 {"std_error", p.std_error},
                 {"fit_visibility", p.fit_visibility},
                 {"n_traces", p.n_traces}});
        }
        j["points"] = points;
    }
    return j;
}

} // namespace biphoton::io
