#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "metamat/dispersion.hpp"
#include "metamat/fields.hpp"
#include "metamat/inversion.hpp"

namespace metamat {

inline constexpr int kReportSchemaVersion = 1;

/// Exit codes shared by every subcommand.
enum ExitCode : int { kExitOk = 0, kExitGateFailed = 1, kExitError = 2 };

struct FieldPaths {
    std::filesystem::path descriptor;
    std::filesystem::path values;
};

struct RunConfig {
    FieldPaths n0sq;
    FieldPaths nsq;
    /// Caller-supplied density; chosen from rho_target when absent.
    std::optional<std::filesystem::path> density;
    double c = 1.0;
    double rho_target = kDefaultRhoTarget;
    double radius_a = 0.0;
    double kappa = 1.0;
    std::optional<double> cube_side;
    double absorption_threshold = kDefaultAbsorptionThreshold;
    std::filesystem::path out_dir = "metamat-out";

    void validate() const;
};

/// Relative paths in the JSON are resolved against base_dir.
RunConfig parse_run_config(const nlohmann::json& j, const std::filesystem::path& base_dir);
RunConfig load_run_config(const std::filesystem::path& path);

struct CommandResult {
    int exit_code = kExitOk;
    nlohmann::json report;
};

/// Ingest -> invert -> analyze -> place -> verify. Writes h.grid.json,
/// h.csv, density.json, manifest.json, manifest.csv and design_report.json
/// into out_dir. Exit 0 iff every residual passes and the manifest is
/// planned and verified.
CommandResult run_design(const RunConfig& config);

/// Per-frequency criterion and absorption over all voxels of a target n^2.
nlohmann::json field_dispersion_summary(const SampledField& nsq, double diameter,
                                        double absorption_threshold);

struct DispersionArgs {
    std::string model = "inverse-quadratic";  // or "tabulated"
    double c_param = 1.0;
    std::filesystem::path table;  // CSV omega,n_re,n_im
    FrequencyGrid band;
    bool require_negative = false;
    double diameter = 0.0;
    double absorption_threshold = kDefaultAbsorptionThreshold;
    DerivativeMethod method = DerivativeMethod::automatic;
};

DispersionModel load_tabulated_model(const std::filesystem::path& path);
DispersionModel make_model(const DispersionArgs& args);

CommandResult run_dispersion(const DispersionArgs& args);

CommandResult run_verify(const std::filesystem::path& manifest_path,
                         const std::filesystem::path& density_path);

/// Human-readable digest of a design_report.json document.
std::string summarize_design_report(const nlohmann::json& report);

}  // namespace metamat
