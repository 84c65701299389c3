#include "metamat/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include <spdlog/spdlog.h>

#include "metamat/error.hpp"
#include "metamat/field_io.hpp"
#include "metamat/placement.hpp"

namespace metamat {

namespace fs = std::filesystem;

namespace {

fs::path resolve(const fs::path& base, const std::string& p) {
    const fs::path path(p);
    return path.is_absolute() ? path : base / path;
}

FieldPaths parse_field_paths(const nlohmann::json& j, const fs::path& base, const char* key) {
    if (!j.contains(key) || !j.at(key).is_object())
        throw Error(std::string("config is missing '") + key + "' {descriptor, values}");
    const auto& f = j.at(key);
    return {resolve(base, f.at("descriptor").get<std::string>()),
            resolve(base, f.at("values").get<std::string>())};
}

nlohmann::json number_or_null(double x) {
    return std::isfinite(x) ? nlohmann::json(x) : nlohmann::json(nullptr);
}

nlohmann::json config_json(const RunConfig& c) {
    nlohmann::json j = {{"c", c.c},
                        {"rho_target", c.rho_target},
                        {"radius_a", c.radius_a},
                        {"kappa", c.kappa},
                        {"absorption_threshold", c.absorption_threshold}};
    j["cube_side"] = c.cube_side ? nlohmann::json(*c.cube_side) : nlohmann::json(nullptr);
    j["density_supplied"] = c.density.has_value();
    return j;
}

nlohmann::json inversion_json(const MaterialDesign& design) {
    const DesignReport& r = design.report;
    nlohmann::json samples = nlohmann::json::array();
    for (std::size_t s = 0; s < r.samples.size(); ++s)
        samples.push_back({{"voxel", s / r.freq_count},
                           {"freq_index", s % r.freq_count},
                           {"rho", r.samples[s].rho},
                           {"residual", r.samples[s].residual}});
    return {{"max_residual", r.max_residual},
            {"max_scaled_residual", r.max_scaled_residual},
            {"residual_tolerance", kRoundTripTolerance},
            {"residuals_pass", r.residuals_pass},
            {"max_rho", r.max_rho},
            {"samples", std::move(samples)}};
}

}  // namespace

void RunConfig::validate() const {
    MediumConstants{c}.validate();
    if (!density && !(rho_target > 0.0 && rho_target < 1.0))
        throw Error("rho_target must lie in (0, 1)");
    if (!(radius_a > 0.0)) throw Error("radius_a must be > 0");
    if (!(kappa > 0.0)) throw Error("kappa must be > 0");
    if (cube_side && !(*cube_side > 0.0)) throw Error("cube_side must be > 0");
    if (!(absorption_threshold > 0.0)) throw Error("absorption_threshold must be > 0");
    for (const fs::path& p : {n0sq.descriptor, n0sq.values, nsq.descriptor, nsq.values})
        if (!fs::exists(p)) throw Error("input file not found: " + p.string());
    if (density && !fs::exists(*density)) throw Error("input file not found: " + density->string());
}

RunConfig parse_run_config(const nlohmann::json& j, const fs::path& base_dir) {
    if (!j.is_object()) throw Error("config must be a JSON object");
    try {
        RunConfig c;
        c.n0sq = parse_field_paths(j, base_dir, "n0sq");
        c.nsq = parse_field_paths(j, base_dir, "nsq");
        if (j.contains("density") && !j.at("density").is_null())
            c.density = resolve(base_dir, j.at("density").get<std::string>());
        c.c = j.value("c", c.c);
        c.rho_target = j.value("rho_target", c.rho_target);
        c.radius_a = j.value("radius_a", c.radius_a);
        c.kappa = j.value("kappa", c.kappa);
        if (j.contains("cube_side") && !j.at("cube_side").is_null())
            c.cube_side = j.at("cube_side").get<double>();
        c.absorption_threshold = j.value("absorption_threshold", c.absorption_threshold);
        if (j.contains("out")) c.out_dir = resolve(base_dir, j.at("out").get<std::string>());
        return c;
    } catch (const nlohmann::json::exception& e) {
        throw Error(std::string("malformed config: ") + e.what());
    }
}

RunConfig load_run_config(const fs::path& path) {
    return parse_run_config(read_json_file(path), path.parent_path());
}

nlohmann::json field_dispersion_summary(const SampledField& nsq, double diameter,
                                        double absorption_threshold) {
    const std::size_t nv = nsq.grid.voxel_count();
    const std::size_t nf = nsq.freqs.size();
    const double inf = std::numeric_limits<double>::infinity();
    std::vector<double> crit_min(nf, inf);
    std::vector<double> crit_max(nf, -inf);
    std::vector<bool> crit_defined(nf, nf >= 2);
    std::vector<double> absorption_max(nf, 0.0);

    for (std::size_t v = 0; v < nv; ++v) {
        const auto samples = nsq.voxel_samples(v);
        const auto absorption = absorption_check(samples, diameter, absorption_threshold);
        std::vector<Complex> n(nf);
        for (std::size_t f = 0; f < nf; ++f) {
            n[f] = absorption[f].n;
            absorption_max[f] = std::max(absorption_max[f], absorption[f].ratio);
        }
        if (nf < 2) continue;
        const DispersionModel model = DispersionModel::tabulated(nsq.freqs.samples, n);
        for (std::size_t f = 0; f < nf; ++f) {
            if (!crit_defined[f]) continue;
            if (!(n[f].real() > 0.0)) {
                crit_defined[f] = false;
                continue;
            }
            const CriterionResult c = negative_refraction_criterion(model, nsq.freqs.samples[f]);
            crit_min[f] = std::min(crit_min[f], c.value);
            crit_max[f] = std::max(crit_max[f], c.value);
        }
    }

    nlohmann::json rows = nlohmann::json::array();
    bool criterion_everywhere = nf >= 2;
    bool absorption_pass = true;
    for (std::size_t f = 0; f < nf; ++f) {
        const bool holds = crit_defined[f] && crit_max[f] < -1.0;
        criterion_everywhere = criterion_everywhere && holds;
        const bool pass = absorption_max[f] < absorption_threshold;
        absorption_pass = absorption_pass && pass;
        rows.push_back({{"omega", nsq.freqs.samples[f]},
                        {"criterion_min", crit_defined[f] ? number_or_null(crit_min[f]) : nullptr},
                        {"criterion_max", crit_defined[f] ? number_or_null(crit_max[f]) : nullptr},
                        {"criterion_holds_everywhere", holds},
                        {"absorption_max_ratio", absorption_max[f]},
                        {"absorption_pass", pass}});
    }
    return {{"domain_diameter", diameter},
            {"absorption_threshold", absorption_threshold},
            {"criterion_holds_across_band", criterion_everywhere},
            {"absorption_pass_all", absorption_pass},
            {"per_frequency", std::move(rows)}};
}

CommandResult run_design(const RunConfig& config) {
    CommandResult result;
    nlohmann::json& report = result.report;
    report["schema_version"] = kReportSchemaVersion;
    report["config"] = config_json(config);

    auto write_report = [&] {
        write_text_file(config.out_dir / "design_report.json", report.dump(2) + "\n");
    };

    try {
        config.validate();
        fs::create_directories(config.out_dir);
    } catch (const std::exception& e) {
        report["status"] = "error";
        report["error"] = e.what();
        result.exit_code = kExitError;
        spdlog::error("{}", e.what());
        return result;
    }

    try {
        spdlog::info("loading target and background fields");
        const SampledField n0sq = load_field(config.n0sq.descriptor, config.n0sq.values);
        const SampledField nsq = load_field(config.nsq.descriptor, config.nsq.values);
        std::optional<DensityField> supplied;
        if (config.density) supplied = load_density(*config.density);

        const MaterialDesign design =
            design_material(n0sq, nsq, MediumConstants{config.c}, config.rho_target, supplied);
        spdlog::info("inversion done: max residual {:.3e}, max rho {:.3f}",
                     design.report.max_residual, design.report.max_rho);

        save_field(design.plan.h, config.out_dir / "h.grid.json", config.out_dir / "h.csv");
        save_density(design.plan.N, config.out_dir / "density.json");
        report["inversion"] = inversion_json(design);
        report["dispersion"] = field_dispersion_summary(nsq, domain_diameter(nsq.grid),
                                                        config.absorption_threshold);

        const EmbeddingManifest manifest = plan_embedding(
            design.plan.N, design.plan.h, config.radius_a, config.kappa, config.cube_side);
        write_text_file(config.out_dir / "manifest.json", manifest_json(manifest).dump(2) + "\n");
        write_text_file(config.out_dir / "manifest.csv", manifest_csv(manifest));
        const ManifestVerification check = verify_manifest(manifest, design.plan.N);
        spdlog::info("manifest: {} cubes, {} balls, verification {}", manifest.cubes.size(),
                     manifest.total_balls(), check.passed ? "passed" : "FAILED");

        report["manifest"] = {{"radius_a", manifest.radius_a},
                              {"spacing_d", manifest.spacing_d},
                              {"kappa", manifest.kappa},
                              {"cube_side", manifest.cube_side},
                              {"cubes", manifest.cubes.size()},
                              {"total_balls", manifest.total_balls()},
                              {"total_deviation", check.total_deviation},
                              {"deviation_bound", check.deviation_bound},
                              {"verification_passed", check.passed},
                              {"issues", check.issues}};

        const bool ok = design.report.residuals_pass && check.passed;
        report["status"] = ok ? "ok" : "gate_failed";
        result.exit_code = ok ? kExitOk : kExitGateFailed;
    } catch (const std::exception& e) {
        report["status"] = "error";
        report["error"] = e.what();
        result.exit_code = kExitError;
        spdlog::error("{}", e.what());
    }
    write_report();
    return result;
}

DispersionModel load_tabulated_model(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open '" + path.string() + "'");
    std::string line;
    if (!std::getline(in, line) || line.rfind("omega,n_re,n_im", 0) != 0)
        throw Error("model file '" + path.string() + "' must start with header omega,n_re,n_im");
    std::vector<double> omega;
    std::vector<Complex> n;
    std::size_t row = 0;
    while (std::getline(in, line)) {
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        ++row;
        std::vector<std::string> cols;
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) cols.push_back(cell);
        try {
            if (cols.size() != 3) throw Error("expected 3 columns");
            const double w = parse_double(cols[0]);
            const Complex value(parse_double(cols[1]), parse_double(cols[2]));
            if (!std::isfinite(w) || !std::isfinite(value.real()) || !std::isfinite(value.imag()))
                throw Error("non-finite value");
            omega.push_back(w);
            n.push_back(value);
        } catch (const Error& e) {
            throw Error("model file '" + path.string() + "' row " + std::to_string(row) + ": " +
                        e.what());
        }
    }
    return DispersionModel::tabulated(std::move(omega), std::move(n));
}

DispersionModel make_model(const DispersionArgs& args) {
    if (args.model == "inverse-quadratic") return DispersionModel::inverse_quadratic(args.c_param);
    if (args.model == "tabulated") return load_tabulated_model(args.table);
    throw Error("unknown model '" + args.model + "' (expected inverse-quadratic or tabulated)");
}

CommandResult run_dispersion(const DispersionArgs& args) {
    CommandResult result;
    nlohmann::json& report = result.report;
    report["schema_version"] = kReportSchemaVersion;
    try {
        const DispersionModel model = make_model(args);
        nlohmann::json model_info = {{"kind", model.kind()}};
        if (model.has_closed_form_derivative()) model_info["c_param"] = args.c_param;
        report["model"] = model_info;

        const auto rows = dispersion_report(model, args.band, args.diameter, args.method);
        nlohmann::json table = nlohmann::json::array();
        bool all_negative = true;
        bool absorption_pass = true;
        for (const auto& row : rows) {
            table.push_back(to_json(row));
            all_negative = all_negative && row.criterion_holds;
            absorption_pass = absorption_pass && row.absorption_ratio < args.absorption_threshold;
        }
        report["rows"] = std::move(table);
        report["criterion_holds_across_band"] = all_negative;
        report["require_negative"] = args.require_negative;
        report["domain_diameter"] = args.diameter;
        report["absorption_threshold"] = args.absorption_threshold;
        report["absorption_pass_all"] = absorption_pass;

        const bool ok = !args.require_negative || all_negative;
        report["status"] = ok ? "ok" : "gate_failed";
        result.exit_code = ok ? kExitOk : kExitGateFailed;
    } catch (const std::exception& e) {
        report["status"] = "error";
        report["error"] = e.what();
        result.exit_code = kExitError;
        spdlog::error("{}", e.what());
    }
    return result;
}

CommandResult run_verify(const fs::path& manifest_path, const fs::path& density_path) {
    CommandResult result;
    try {
        const EmbeddingManifest manifest = parse_manifest(read_json_file(manifest_path));
        const DensityField density = load_density(density_path);
        const ManifestVerification v = verify_manifest(manifest, density);
        result.report = verification_json(v);
        result.report["status"] = v.passed ? "ok" : "gate_failed";
        result.exit_code = v.passed ? kExitOk : kExitGateFailed;
        for (const auto& issue : v.issues) spdlog::warn("{}", issue);
    } catch (const std::exception& e) {
        result.report = {{"schema_version", kReportSchemaVersion},
                         {"status", "error"},
                         {"error", e.what()}};
        result.exit_code = kExitError;
        spdlog::error("{}", e.what());
    }
    return result;
}

std::string summarize_design_report(const nlohmann::json& report) {
    std::ostringstream os;
    os << "status: " << report.value("status", "unknown") << '\n';
    if (report.contains("error")) os << "error: " << report["error"].get<std::string>() << '\n';
    if (report.contains("inversion")) {
        const auto& inv = report["inversion"];
        os << "inversion: max residual " << inv["max_residual"].get<double>() << ", max rho "
           << inv["max_rho"].get<double>()
           << (inv["residuals_pass"].get<bool>() ? " (pass)" : " (FAIL)") << '\n';
    }
    if (report.contains("dispersion")) {
        const auto& d = report["dispersion"];
        os << "negative refraction across band: "
           << (d["criterion_holds_across_band"].get<bool>() ? "yes" : "no") << '\n';
        for (const auto& row : d["per_frequency"]) {
            os << "  omega " << row["omega"].get<double>() << ": criterion ";
            if (row["criterion_max"].is_null())
                os << "n/a";
            else
                os << '[' << row["criterion_min"].get<double>() << ", "
                   << row["criterion_max"].get<double>() << ']';
            os << ", absorption " << row["absorption_max_ratio"].get<double>()
               << (row["absorption_pass"].get<bool>() ? "" : " (FAIL)") << '\n';
        }
    }
    if (report.contains("manifest")) {
        const auto& m = report["manifest"];
        os << "manifest: " << m["cubes"].get<std::size_t>() << " cubes, "
           << m["total_balls"].get<std::uint64_t>() << " balls, a = "
           << m["radius_a"].get<double>() << ", d = " << m["spacing_d"].get<double>()
           << ", verification " << (m["verification_passed"].get<bool>() ? "passed" : "FAILED")
           << '\n';
    }
    return os.str();
}

}  // namespace metamat
