#include "mcqn/cli.hpp"

#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include "CLI11.hpp"

#include "mcqn/config.hpp"
#include "mcqn/jackson.hpp"
#include "mcqn/monotonicity.hpp"
#include "mcqn/region.hpp"

namespace mcqn {

namespace {

struct CommonOptions {
    std::string config;
    std::optional<std::uint64_t> seed;
    std::size_t jobs = 0;
    std::string out;
    std::string format;
    bool trace = false;
};

void add_common(CLI::App& cmd, CommonOptions& o, bool runs_simulation) {
    cmd.add_option("config_pos", o.config, "Experiment config file")
        ->excludes(cmd.add_option("--config", o.config, "Experiment config file"));
    if (!runs_simulation) return;
    cmd.add_option("--seed", o.seed, "Master seed (overrides the config)");
    cmd.add_option("--jobs", o.jobs, "Worker threads; 1 = serial (default: hardware threads)");
    cmd.add_option("--out", o.out, "Result file (default: stdout, or the config's output.path)");
    cmd.add_option("--format", o.format, "csv or json (overrides the config)")
        ->check(CLI::IsMember({"csv", "json"}));
    cmd.add_flag("--trace", o.trace, "Also write iterate or event traces");
}

/// Output stream for results: --out, then the config's output path, then `fallback`.
class Sink {
public:
    Sink(const CommonOptions& o, const ExperimentConfig& cfg, std::ostream& fallback) : stream_(&fallback) {
        if (!o.out.empty())
            path_ = o.out;
        else if (cfg.output_path)
            path_ = *cfg.output_path;
        if (!path_.empty()) {
            file_.open(path_, std::ios::binary);
            if (!file_) throw IoError(path_.string() + ": cannot open for writing");
            stream_ = &file_;
        }
    }
    std::ostream& stream() { return *stream_; }
    /// Side file `<result><suffix>`, or `fallback` when results go to stdout.
    std::ostream& side(const std::string& suffix, std::ostream& fallback) {
        if (path_.empty()) return fallback;
        side_file_.open(path_.string() + suffix, std::ios::binary);
        if (!side_file_) throw IoError(path_.string() + suffix + ": cannot open for writing");
        return side_file_;
    }

private:
    std::filesystem::path path_;
    std::ofstream file_;
    std::ofstream side_file_;
    std::ostream* stream_;
};

ExperimentConfig load(const CommonOptions& o) {
    if (o.config.empty()) throw ConfigError("no config file given");
    auto cfg = load_experiment(o.config);
    if (o.seed) cfg.seed = *o.seed;
    if (!o.format.empty()) cfg.format = parse_output_format(o.format);
    return cfg;
}

RayDirection require_ray(const ExperimentConfig& cfg) {
    if (!cfg.ray) throw ConfigError(cfg.source.string() + ": missing \"ray\"");
    return RayDirection(*cfg.ray);
}

int cmd_validate(const CommonOptions& o, std::ostream& out) {
    if (o.config.empty()) throw ConfigError("no network file given");
    const auto spec = load_network(o.config);
    const auto report = validate(spec);
    for (const auto& c : report.checks)
        out << (c.passed ? "ok    " : "FAIL  ") << c.name << (c.message.empty() ? "" : ": " + c.message) << '\n';
    out << o.config << ": " << (report.ok() ? "valid" : "invalid") << '\n';
    return report.ok() ? exit_ok : exit_domain;
}

int cmd_threshold(const CommonOptions& o, std::ostream& out, std::ostream& err) {
    const auto cfg = load(o);
    const Network network(cfg.network);
    const auto ray = require_ray(cfg);
    const auto estimate = estimate_threshold(network, ray, cfg.schedule, cfg.seed);

    std::optional<OracleRoots> roots;
    if (network.is_jackson()) {
        const auto oracle = JacksonOracle::along_ray(network, ray, cfg.schedule.alpha);
        if (cfg.schedule.epsilon < 1.0) roots = OracleRoots{oracle.theta_star(), oracle.theta_eps(cfg.schedule.epsilon)};
    }
    const auto report = error_decomposition(estimate, roots);

    Sink sink(o, cfg, out);
    auto& s = sink.stream();
    if (cfg.format == OutputFormat::json) {
        nlohmann::json doc{
            {"epsilon", cfg.schedule.epsilon},
            {"ray", ray.direction()},
            {"seed", cfg.seed},
            {"iterations", cfg.schedule.iterations},
            {"theta_bar", estimate.theta_bar},
            {"theta_hat", estimate.theta_hat},
            {"final_iterate", estimate.final_iterate},
            {"clamp_events", estimate.clamp_events},
            {"clamped_fraction", estimate.clamped_fraction},
            {"clamp_warning", estimate.clamp_warning},
            {"total_events", estimate.total_events},
            {"trace_std", report.trace_std},
        };
        if (report.has_oracle)
            doc["oracle"] = {{"theta_star", roots->theta_star},
                             {"theta_eps", roots->theta_eps},
                             {"absolute_error", report.absolute_error},
                             {"random_part", report.random_part},
                             {"deterministic_part", report.deterministic_part}};
        s << doc.dump(2) << '\n';
    } else {
        s.precision(10);
        s << "epsilon,seed,iterations,theta_bar,theta_hat,final_iterate,clamp_events,clamped_fraction,total_events,"
             "theta_star,theta_eps\n";
        s << cfg.schedule.epsilon << ',' << cfg.seed << ',' << cfg.schedule.iterations << ',' << estimate.theta_bar
          << ',' << estimate.theta_hat << ',' << estimate.final_iterate << ',' << estimate.clamp_events << ','
          << estimate.clamped_fraction << ',' << estimate.total_events << ',';
        if (roots) s << roots->theta_star << ',' << roots->theta_eps;
        else s << ',';
        s << '\n';
    }
    if (estimate.clamp_warning) err << "warning: " << estimate.diagnostics() << '\n';
    if (o.trace) write_iterate_trace(sink.side(".trace.csv", err), estimate);
    return exit_ok;
}

int cmd_region(const CommonOptions& o, std::ostream& out, std::ostream& err) {
    const auto cfg = load(o);
    if (!cfg.region) throw ConfigError(cfg.source.string() + ": missing \"region\"");
    const Network network(cfg.network);

    std::vector<RayDirection> rays;
    if (cfg.region->plane) {
        rays = generate_rays(network.class_count(), *cfg.region->plane, cfg.region->count, cfg.region->include_axes);
    } else {
        // Every ray is checked before any simulation starts.
        for (std::size_t j = 0; j < cfg.region->rays.size(); ++j) {
            try {
                rays.emplace_back(cfg.region->rays[j]);
            } catch (const DomainError& e) {
                throw DomainError("region ray " + std::to_string(j + 1) + ": " + e.what());
            }
            if (rays.back().dimension() != network.class_count())
                throw DomainError("region ray " + std::to_string(j + 1) + " has the wrong dimension");
        }
    }
    const auto result = sweep(network, rays, cfg.schedule, cfg.seed, o.jobs);
    for (std::size_t j = 0; j < rays.size(); ++j)
        if (!result.ok(j)) err << "ray " << j + 1 << ": " << result.errors[j] << '\n';

    std::optional<BoundaryPolyline> polyline;
    if (rays.size() - result.failures() >= 2) {
        try {
            polyline = interpolate_boundary(result);
        } catch (const DomainError& e) {
            err << "no boundary polyline: " << e.what() << '\n';
        }
    }
    Sink sink(o, cfg, out);
    if (cfg.format == OutputFormat::json)
        sink.stream() << sweep_json(result, polyline).dump(2) << '\n';
    else
        write_sweep_csv(sink.stream(), result);
    if (o.trace) {
        auto& t = sink.side(".trace.csv", err);
        t << "ray_index,n,theta_n,z_n,b_n,t_n\n";
        const auto precision = t.precision(17);
        for (std::size_t j = 0; j < rays.size(); ++j)
            for (const auto& r : result.thresholds[j].records)
                t << j + 1 << ',' << r.n << ',' << r.theta << ',' << r.z << ',' << r.gain << ',' << r.horizon << '\n';
        t.precision(precision);
    }
    return result.failures() == 0 ? exit_ok : exit_domain;
}

int cmd_monotonicity(const CommonOptions& o, std::ostream& out, std::ostream& err) {
    const auto cfg = load(o);
    if (!cfg.monotonicity) throw ConfigError(cfg.source.string() + ": missing \"monotonicity\"");
    const Network network(cfg.network);
    const auto ray = require_ray(cfg);
    const auto& m = *cfg.monotonicity;
    SurfaceOptions options;
    options.alpha = cfg.schedule.alpha;
    options.event_cap = cfg.schedule.event_cap;
    options.jobs = o.jobs;
    const auto surface = estimate_surface(network, ray, m.theta_grid, m.t_grid, m.replications, cfg.seed, options);
    const auto report = check_monotone(surface, m.noise_multiplier);

    Sink sink(o, cfg, out);
    if (cfg.format == OutputFormat::json) {
        sink.stream() << nlohmann::json{{"surface", surface_json(surface)}, {"audit", verdict_json(report)}}.dump(2)
                      << '\n';
    } else {
        write_surface_csv(sink.stream(), surface);
        sink.side(".verdict.json", err) << verdict_json(report).dump(2) << '\n';
    }
    return report.pass ? exit_ok : exit_domain;
}

int cmd_simulate(const CommonOptions& o, double theta, double horizon, std::ostream& out) {
    const auto cfg = load(o);
    const Network network(cfg.network);
    const auto ray = require_ray(cfg);
    Sink sink(o, cfg, out);
    SimulationOptions options;
    options.alpha = cfg.schedule.alpha;
    options.event_cap = cfg.schedule.event_cap;
    if (o.trace) options.trace = csv_event_trace(sink.stream());
    const auto outcome = simulate(network, ray.at(theta), horizon, cfg.seed, options);
    if (!o.trace) {
        auto& s = sink.stream();
        s.precision(10);
        s << "theta,horizon,seed,events,arrivals,departures,total_jobs,functional_value\n"
          << theta << ',' << horizon << ',' << cfg.seed << ',' << outcome.event_count << ',' << outcome.arrivals << ','
          << outcome.departures << ',' << total_jobs(outcome.terminal_state) << ',' << outcome.functional_value
          << '\n';
    }
    return exit_ok;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Stability regions of multiclass queueing networks by Robbins-Monro over simulated CTMCs", "mcqn"};
    app.require_subcommand(1);
    CommonOptions validate_o, threshold_o, region_o, mono_o, sim_o;
    double sim_theta = 0.0;
    double sim_horizon = 0.0;

    auto* validate_cmd = app.add_subcommand("validate", "Check a network file");
    add_common(*validate_cmd, validate_o, false);
    auto* threshold_cmd = app.add_subcommand("threshold", "Estimate the critical threshold along one ray");
    add_common(*threshold_cmd, threshold_o, true);
    auto* region_cmd = app.add_subcommand("region", "Sweep rays and interpolate the stability boundary");
    add_common(*region_cmd, region_o, true);
    auto* mono_cmd = app.add_subcommand("monotonicity", "Estimate phi_t(theta) on a grid and audit monotonicity");
    add_common(*mono_cmd, mono_o, true);
    auto* sim_cmd = app.add_subcommand("simulate", "One simulation run along the config's ray");
    add_common(*sim_cmd, sim_o, true);
    sim_cmd->add_option("--theta", sim_theta, "Position on the ray")->required();
    sim_cmd->add_option("--horizon", sim_horizon, "Model-time horizon")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? exit_ok : exit_io;
    }

    try {
        if (*validate_cmd) return cmd_validate(validate_o, out);
        if (*threshold_cmd) return cmd_threshold(threshold_o, out, err);
        if (*region_cmd) return cmd_region(region_o, out, err);
        if (*mono_cmd) return cmd_monotonicity(mono_o, out, err);
        if (*sim_cmd) return cmd_simulate(sim_o, sim_theta, sim_horizon, out);
    } catch (const ConfigError& e) {
        err << "error: " << e.what() << '\n';
        return exit_io;
    } catch (const EventBudgetError& e) {
        err << "error: " << e.what() << '\n';
        return exit_budget;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return exit_domain;
    }
    return exit_io;
}

}  // namespace mcqn
