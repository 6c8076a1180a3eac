#include "crane3d/bench.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <limits>

namespace crane3d {

namespace {

// Index samples by rounded grid position so the two trajectories align even
// when one of them carries extra event-instant samples.
std::vector<double> grid_velocities(const Trajectory& tr, Axis axis, double dt,
                                    std::size_t n_grid) {
    std::vector<double> v(n_grid, std::numeric_limits<double>::quiet_NaN());
    for (std::size_t i = 0; i < tr.t.size(); ++i) {
        const double k = tr.t[i] / dt;
        const double kr = std::round(k);
        if (std::fabs(k - kr) > 1e-6) continue;  // event-instant sample
        const auto ki = static_cast<std::size_t>(kr);
        if (ki < n_grid) v[ki] = tr.state[i].velocity(axis);
    }
    return v;
}

double median(std::vector<double> xs) {
    std::sort(xs.begin(), xs.end());
    const std::size_t n = xs.size();
    return n % 2 ? xs[n / 2] : 0.5 * (xs[n / 2 - 1] + xs[n / 2]);
}

} // namespace

double velocity_rmse(const Trajectory& a, const Trajectory& b, Axis axis,
                     double output_dt) {
    const double t_last = std::min(a.t.back(), b.t.back());
    const auto n_grid = static_cast<std::size_t>(std::floor(t_last / output_dt)) + 1;
    const auto va = grid_velocities(a, axis, output_dt, n_grid);
    const auto vb = grid_velocities(b, axis, output_dt, n_grid);
    double sum = 0.0;
    std::size_t n = 0;
    for (std::size_t i = 0; i < n_grid; ++i) {
        if (std::isnan(va[i]) || std::isnan(vb[i])) continue;
        const double d = va[i] - vb[i];
        sum += d * d;
        ++n;
    }
    return n ? std::sqrt(sum / static_cast<double>(n)) : 0.0;
}

std::vector<BenchmarkRow> run_benchmark(const Scenario& scenario,
                                        const BenchmarkOptions& opt) {
    using clock = std::chrono::steady_clock;
    std::vector<BenchmarkRow> rows;

    const auto timed_runs = [&](const SimConfig& cfg, Trajectory& out) {
        std::vector<double> times;
        integrate(scenario.initial_state, scenario.input, scenario.params, cfg);  // warm-up
        const int repeats = std::max(1, opt.repeats);
        for (int r = 0; r < repeats; ++r) {
            const auto tic = clock::now();
            Trajectory tr = integrate(scenario.initial_state, scenario.input,
                                      scenario.params, cfg);
            const auto toc = clock::now();
            times.push_back(std::chrono::duration<double>(toc - tic).count());
            if (r == 0) out = std::move(tr);
        }
        return median(times);
    };

    Trajectory reference;
    {
        BenchmarkRow row;
        row.model = "hybrid";
        SimConfig cfg = scenario.sim;
        cfg.model = SimModel::Hybrid;
        try {
            row.wall_time_s = timed_runs(cfg, reference);
            row.rmse = 0.0;  // reference by definition
        } catch (const std::exception& e) {
            row.failed = true;
            row.error = e.what();
        }
        rows.push_back(row);
    }
    if (rows.front().failed) {
        for (double k : opt.k_values) {
            BenchmarkRow row;
            row.model = "tanh(" + std::to_string(k) + ")";
            row.failed = true;
            row.error = "no hybrid reference";
            rows.push_back(row);
        }
        return rows;
    }

    for (double k : opt.k_values) {
        BenchmarkRow row;
        char label[64];
        std::snprintf(label, sizeof label, "tanh(k=%g)", k);
        row.model = label;
        SimConfig cfg = scenario.sim;
        cfg.model = SimModel::Tanh;
        cfg.tanh_k = k;
        try {
            Trajectory tr;
            row.wall_time_s = timed_runs(cfg, tr);
            row.rmse = velocity_rmse(tr, reference, scenario.rmse_axis,
                                     scenario.sim.output_dt);
        } catch (const std::exception& e) {
            row.failed = true;
            row.error = e.what();
        }
        rows.push_back(row);
    }
    return rows;
}

} // namespace crane3d
