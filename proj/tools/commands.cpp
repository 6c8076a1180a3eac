#include "commands.hpp"

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>

#include "crane3d/errors.hpp"
#include "crane3d/io.hpp"

#ifndef CRANE3D_FIXTURE_DIR
#define CRANE3D_FIXTURE_DIR "fixtures"
#endif

namespace crane3d::cli {

namespace fs = std::filesystem;

namespace {

int exit_code_for(const std::exception& e) {
    if (dynamic_cast<const SchemaError*>(&e)) return 1;
    if (dynamic_cast<const PreconditionError*>(&e)) return 3;
    if (dynamic_cast<const IllConditionedError*>(&e)) return 4;
    return 2;
}

void report(const std::exception& e) { std::fprintf(stderr, "error: %s\n", e.what()); }

} // namespace

std::string fixture_path(const std::string& name) {
    if (const char* env = std::getenv("CRANE3D_FIXTURE_DIR"))
        return (fs::path(env) / name).string();
    return (fs::path(CRANE3D_FIXTURE_DIR) / name).string();
}

int cmd_simulate(const SimulateArgs& args) {
    Scenario sc;
    try {
        sc = load_scenario(args.scenario_path);
        if (args.model) {
            if (*args.model == "hybrid")
                sc.sim.model = SimModel::Hybrid;
            else if (*args.model == "tanh")
                sc.sim.model = SimModel::Tanh;
            else
                throw SchemaError("--model must be 'hybrid' or 'tanh'");
        }
        if (args.tanh_k) sc.sim.tanh_k = *args.tanh_k;
        sc.sim.validate();
    } catch (const std::exception& e) {
        report(e);
        return 1;
    }
    try {
        const auto tic = std::chrono::steady_clock::now();
        const Trajectory traj =
            integrate(sc.initial_state, sc.input, sc.params, sc.sim);
        const double wall =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - tic)
                .count();
        write_trajectory_csv(traj, args.out_csv);
        std::printf("samples: %zu\nevents: %zu\nwall_time_s: %.6f\n", traj.size(),
                    traj.events.size(), wall);
        return 0;
    } catch (const std::exception& e) {
        report(e);
        return 2;
    }
}

int cmd_benchmark(const BenchmarkArgs& args) {
    Scenario sc;
    try {
        const std::string path = args.scenario_path
                                     ? *args.scenario_path
                                     : fixture_path("case" + std::to_string(args.case_id) +
                                                    ".json");
        sc = load_scenario(path);
    } catch (const std::exception& e) {
        report(e);
        return 1;
    }
    if (args.repeats < 5)
        std::fprintf(stderr, "warning: fewer than 5 repeats, timings will be noisy\n");

    BenchmarkOptions opt;
    opt.k_values = args.ks;
    opt.repeats = args.repeats;
    std::vector<BenchmarkRow> rows;
    try {
        rows = run_benchmark(sc, opt);
    } catch (const std::exception& e) {
        report(e);
        return 2;
    }
    bool all_failed = true;
    std::printf("%-16s %14s %14s\n", "model", "t_wall [s]", "RMSE [m/s]");
    for (const auto& r : rows) {
        if (r.failed)
            std::printf("%-16s %14s %14s  (%s)\n", r.model.c_str(), "failed", "-",
                        r.error.c_str());
        else
            std::printf("%-16s %14.4g %14.4g\n", r.model.c_str(), r.wall_time_s, r.rmse);
        all_failed = all_failed && r.failed;
    }
    if (args.out_csv) {
        std::string csv = "model,wall_time_s,rmse,failed\n";
        for (const auto& r : rows) {
            char line[256];
            std::snprintf(line, sizeof line, "%s,%.17g,%.17g,%d\n", r.model.c_str(),
                          r.wall_time_s, r.rmse, r.failed ? 1 : 0);
            csv += line;
        }
        try {
            atomic_write_text(*args.out_csv, csv);
        } catch (const std::exception& e) {
            report(e);
            return 2;
        }
    }
    return all_failed ? 2 : 0;
}

int cmd_estimate(const EstimateArgs& args) {
    PipelineSteps steps{false, false, false};
    for (const auto& s : args.steps) {
        if (s == "all")
            steps = {true, true, true};
        else if (s == "rope")
            steps.rope = true;
        else if (s == "axes")
            steps.axes = true;
        else if (s == "swing")
            steps.swing = true;
        else {
            std::fprintf(stderr, "error: unknown step '%s'\n", s.c_str());
            return 1;
        }
    }
    try {
        const Dataset ds = load_dataset(args.data_dir);
        const PipelineResult res = run_pipeline(ds, steps, PreprocessOptions{});
        save_estimated_params(res, args.out_params);
        if (args.out_diagnostics) save_diagnostics(res, *args.out_diagnostics);
        std::printf("steps done:");
        for (const auto& s : res.steps_done) std::printf(" %s", s.c_str());
        std::printf("\nparameter file %s (%s)\n", args.out_params.c_str(),
                    res.complete ? "complete" : "incomplete");
        return 0;
    } catch (const std::exception& e) {
        report(e);
        return exit_code_for(e);
    }
}

int cmd_synth(const SynthArgs& args) {
    try {
        const ParamsFile pf = load_params_file(args.params_path);
        SuiteOptions opt;
        if (args.spec_path) opt = load_suite_options(*args.spec_path);
        if (args.seed) opt.seed = *args.seed;
        const SynthSuite suite = generate_suite(pf.params, pf.encoder, opt);
        save_dataset(suite, args.out_dir);
        std::printf("dataset written to %s (%zu records, %zu breakaway points, stop: %s)\n",
                    args.out_dir.c_str(), suite.records.size(), suite.breakaway.size(),
                    suite.sampling.stop_reason.c_str());
        return 0;
    } catch (const SchemaError& e) {
        report(e);
        return 1;
    } catch (const std::exception& e) {
        report(e);
        return 2;
    }
}

int cmd_filter(const FilterArgs& args) {
    try {
        const MeasurementRecord rec = read_measurement_csv(args.in_csv);
        PreprocessOptions opt;
        opt.filter = FilterSpec{args.order, args.cutoff_hz};
        opt.mask_window_s = args.mask_window_s;
        opt.min_speed_frac = 0.0;

        struct Ch {
            const char* name;
            const std::vector<double>* raw;
        };
        const Ch channels[] = {{"x_t", &rec.x_t},
                               {"y_t", &rec.y_t},
                               {"L", &rec.L},
                               {"alpha", &rec.alpha},
                               {"beta", &rec.beta}};
        std::string header = "t,u_x,u_y,u_l,x_t,y_t,L,alpha,beta";
        std::vector<ProcessedChannel> processed;
        for (const auto& ch : channels) {
            processed.push_back(preprocess_channel(*ch.raw, rec.dt, opt));
            header += std::string(",") + ch.name + "_filt," + ch.name + "_vel," +
                      ch.name + "_acc," + ch.name + "_mask";
        }
        std::string out = header + "\n";
        char buf[64];
        auto put = [&](double v) {
            std::snprintf(buf, sizeof buf, ",%.17g", v);
            out += buf;
        };
        for (std::size_t i = 0; i < rec.size(); ++i) {
            std::snprintf(buf, sizeof buf, "%.17g", rec.t[i]);
            out += buf;
            put(rec.u_x[i]);
            put(rec.u_y[i]);
            put(rec.u_l[i]);
            put(rec.x_t[i]);
            put(rec.y_t[i]);
            put(rec.L[i]);
            put(rec.alpha[i]);
            put(rec.beta[i]);
            for (const auto& pc : processed) {
                put(pc.pos.values[i]);
                put(pc.vel.values[i]);
                put(pc.acc.values[i]);
                put(pc.mask[i] ? 1.0 : 0.0);
            }
            out += "\n";
        }
        atomic_write_text(args.out_csv, out);
        return 0;
    } catch (const std::exception& e) {
        report(e);
        return 1;
    }
}

} // namespace crane3d::cli
