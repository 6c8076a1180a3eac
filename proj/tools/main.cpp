#include <CLI11.hpp>

#include "commands.hpp"

int main(int argc, char** argv) {
    CLI::App app{"3D overhead crane simulator and parameter estimation toolkit"};
    app.require_subcommand(1);

    crane3d::cli::SimulateArgs sim;
    std::string sim_model;
    double sim_k = 0;
    auto* simulate = app.add_subcommand("simulate", "Simulate a scenario file to CSV");
    simulate->add_option("scenario", sim.scenario_path, "Scenario JSON")->required();
    simulate->add_option("--model", sim_model, "Override model: hybrid|tanh");
    simulate->add_option("--k", sim_k, "Override tanh gain");
    simulate->add_option("--out", sim.out_csv, "Output trajectory CSV")->required();

    crane3d::cli::BenchmarkArgs bench;
    std::string bench_scenario;
    auto* benchmark =
        app.add_subcommand("benchmark", "Hybrid vs tanh timing and RMSE table");
    benchmark->add_option("--case", bench.case_id, "Bundled case: 1 or 2")
        ->check(CLI::Range(1, 2));
    benchmark->add_option("--scenario", bench_scenario, "Custom scenario JSON");
    benchmark->add_option("--ks", bench.ks, "tanh gains to sweep")->delimiter(',');
    benchmark->add_option("--repeats", bench.repeats, "Timed repeats per model");
    std::string bench_out;
    benchmark->add_option("--out", bench_out, "Also write the table as CSV");

    crane3d::cli::EstimateArgs est;
    auto* estimate =
        app.add_subcommand("estimate", "Run the estimation pipeline on a dataset");
    estimate->add_option("--data", est.data_dir, "Dataset directory")->required();
    estimate->add_option("--steps", est.steps, "Steps: rope,axes,swing,all")
        ->delimiter(',');
    estimate->add_option("--out", est.out_params, "Output parameter JSON")->required();
    std::string est_diag;
    estimate->add_option("--diagnostics", est_diag, "Diagnostics JSON");

    crane3d::cli::SynthArgs synth;
    std::string synth_spec;
    std::int64_t synth_seed = -1;
    auto* synthc =
        app.add_subcommand("synth", "Generate a synthetic measurement campaign");
    synthc->add_option("--spec", synth_spec, "Suite options JSON");
    synthc->add_option("--params", synth.params_path, "True parameter JSON")->required();
    synthc->add_option("--out", synth.out_dir, "Output dataset directory")->required();
    synthc->add_option("--seed", synth_seed, "Seed override");

    crane3d::cli::FilterArgs filt;
    auto* filter =
        app.add_subcommand("filter", "Zero-phase filter a measurement CSV");
    filter->add_option("--in", filt.in_csv, "Input measurement CSV")->required();
    filter->add_option("--out", filt.out_csv, "Output CSV")->required();
    filter->add_option("--cutoff", filt.cutoff_hz, "Cutoff frequency [Hz]");
    filter->add_option("--order", filt.order, "Butterworth order");
    filter->add_option("--mask-window", filt.mask_window_s,
                       "Zero-crossing exclusion half-width [s]");

    CLI11_PARSE(app, argc, argv);

    if (simulate->parsed()) {
        if (!sim_model.empty()) sim.model = sim_model;
        if (simulate->count("--k")) sim.tanh_k = sim_k;
        return crane3d::cli::cmd_simulate(sim);
    }
    if (benchmark->parsed()) {
        if (!bench_scenario.empty()) bench.scenario_path = bench_scenario;
        if (!bench_out.empty()) bench.out_csv = bench_out;
        return crane3d::cli::cmd_benchmark(bench);
    }
    if (estimate->parsed()) {
        if (!est_diag.empty()) est.out_diagnostics = est_diag;
        return crane3d::cli::cmd_estimate(est);
    }
    if (synthc->parsed()) {
        if (!synth_spec.empty()) synth.spec_path = synth_spec;
        if (synth_seed >= 0) synth.seed = static_cast<std::uint64_t>(synth_seed);
        return crane3d::cli::cmd_synth(synth);
    }
    if (filter->parsed()) return crane3d::cli::cmd_filter(filt);
    return 0;
}
