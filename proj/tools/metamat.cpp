#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include "metamat/error.hpp"
#include "metamat/field_io.hpp"
#include "metamat/pipeline.hpp"

namespace fs = std::filesystem;
using namespace metamat;

namespace {

void setup_logging() {
    auto logger = spdlog::stderr_color_mt("metamat");
    spdlog::set_default_logger(logger);
    spdlog::set_pattern("[%l] %v");
    spdlog::set_level(spdlog::level::warn);
    if (const char* level = std::getenv("METAMAT_LOG")) {
        const auto parsed = spdlog::level::from_str(level);
        // from_str maps unknown names to "off"; only honour it when asked for.
        if (parsed != spdlog::level::off || std::string(level) == "off") spdlog::set_level(parsed);
    }
}

void emit(const nlohmann::json& report, const std::optional<fs::path>& out_dir,
          const std::string& file_name) {
    if (out_dir) {
        fs::create_directories(*out_dir);
        write_text_file(*out_dir / file_name, report.dump(2) + "\n");
        std::cout << (*out_dir / file_name).string() << '\n';
    } else {
        std::cout << report.dump(2) << '\n';
    }
}

FrequencyGrid make_band(const std::vector<double>& explicit_freqs, double lo, double hi,
                        std::size_t count) {
    FrequencyGrid band;
    if (!explicit_freqs.empty()) {
        band.samples = explicit_freqs;
    } else {
        if (count < 1) throw Error("--omega-count must be >= 1");
        if (count == 1) {
            band.samples = {lo};
        } else {
            for (std::size_t i = 0; i < count; ++i)
                band.samples.push_back(lo + (hi - lo) * static_cast<double>(i) /
                                                static_cast<double>(count - 1));
            band.samples.back() = hi;
        }
    }
    band.validate();
    return band;
}

}  // namespace

int main(int argc, char** argv) {
    setup_logging();

    CLI::App app{"Acoustic metamaterial design: particle density, impedances, embedding "
                 "manifests and negative-refraction analysis"};
    app.require_subcommand(1);

    // design
    auto* design = app.add_subcommand("design", "Invert a target n^2 into h, N and a manifest");
    fs::path config_path;
    std::optional<fs::path> design_out;
    std::optional<double> rho_target, radius_a, kappa, cube_side, design_threshold;
    design->add_option("--config", config_path, "Run configuration JSON")->required();
    design->add_option("--out", design_out, "Output directory");
    design->add_option("--rho-target", rho_target, "Target density ratio in (0,1)");
    design->add_option("--radius-a", radius_a, "Ball radius a");
    design->add_option("--kappa", kappa, "Spacing factor, d = kappa a^(1/3)");
    design->add_option("--cube-side", cube_side, "Side of the partition cubes");
    design->add_option("--absorption-threshold", design_threshold, "Bound on L |Im n|");

    // dispersion
    auto* dispersion = app.add_subcommand("dispersion", "Evaluate negative refraction over a band");
    DispersionArgs dargs;
    std::vector<double> freqs;
    double omega_min = 1.0, omega_max = 2.0;
    std::size_t omega_count = 16;
    bool force_fd = false;
    std::optional<fs::path> dispersion_out;
    dispersion->add_option("--model", dargs.model, "inverse-quadratic | tabulated")
        ->check(CLI::IsMember({"inverse-quadratic", "tabulated"}));
    dispersion->add_option("--c-param", dargs.c_param, "c in n = 1/(1 + c omega^2)");
    dispersion->add_option("--table", dargs.table, "CSV omega,n_re,n_im for tabulated models");
    dispersion->add_option("--omega-min", omega_min, "Band start");
    dispersion->add_option("--omega-max", omega_max, "Band end");
    dispersion->add_option("--omega-count", omega_count, "Evenly spaced band samples");
    dispersion->add_option("--frequencies", freqs, "Explicit band samples")->delimiter(',');
    dispersion->add_flag("--require-negative", dargs.require_negative,
                         "Exit nonzero unless the criterion holds across the band");
    dispersion->add_option("--diameter", dargs.diameter, "Domain diameter L for L |Im n|");
    dispersion->add_option("--absorption-threshold", dargs.absorption_threshold,
                           "Bound on L |Im n|");
    dispersion->add_flag("--finite-difference", force_fd,
                         "Use finite differences even when a closed form exists");
    dispersion->add_option("--out", dispersion_out, "Write dispersion_report.json here");

    // verify
    auto* verify = app.add_subcommand("verify", "Check a manifest against its density");
    fs::path manifest_path, density_path;
    std::optional<fs::path> verify_out;
    verify->add_option("--manifest", manifest_path, "manifest.json")->required();
    verify->add_option("--density", density_path, "density.json")->required();
    verify->add_option("--out", verify_out, "Write verify_report.json here");

    // report
    auto* report = app.add_subcommand("report", "Summarize a design output directory");
    fs::path report_dir;
    report->add_option("--out", report_dir, "Design output directory")->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (*design) {
            RunConfig config = load_run_config(config_path);
            if (design_out) config.out_dir = *design_out;
            if (rho_target) config.rho_target = *rho_target;
            if (radius_a) config.radius_a = *radius_a;
            if (kappa) config.kappa = *kappa;
            if (cube_side) config.cube_side = *cube_side;
            if (design_threshold) config.absorption_threshold = *design_threshold;
            const CommandResult r = run_design(config);
            std::cout << summarize_design_report(r.report);
            return r.exit_code;
        }
        if (*dispersion) {
            dargs.band = make_band(freqs, omega_min, omega_max, omega_count);
            if (force_fd) dargs.method = DerivativeMethod::finite_difference;
            const CommandResult r = run_dispersion(dargs);
            emit(r.report, dispersion_out, "dispersion_report.json");
            return r.exit_code;
        }
        if (*verify) {
            const CommandResult r = run_verify(manifest_path, density_path);
            emit(r.report, verify_out, "verify_report.json");
            return r.exit_code;
        }
        if (*report) {
            const nlohmann::json doc = read_json_file(report_dir / "design_report.json");
            std::cout << summarize_design_report(doc);
            return doc.value("status", "") == "ok" ? kExitOk : kExitGateFailed;
        }
    } catch (const std::exception& e) {
        spdlog::error("{}", e.what());
        return kExitError;
    }
    return kExitOk;
}
