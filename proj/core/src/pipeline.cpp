#include "crane3d/pipeline.hpp"

#include <algorithm>
#include <cmath>

#include "crane3d/errors.hpp"

namespace crane3d {

namespace {

std::vector<MeasurementRecord> records_of_kind(const Dataset& ds,
                                               const std::string& kind) {
    std::vector<MeasurementRecord> out;
    for (const auto& r : ds.records)
        if (r.kind == kind) out.push_back(r);
    return out;
}

double encoder_quantum_l(const DatasetInfo& info) {
    if (!info.quantized) return 0.0;
    return info.encoder.scale_l * 2.0 * M_PI / info.encoder.pulses_per_rev;
}

} // namespace

PipelineResult run_pipeline(const Dataset& ds, const PipelineSteps& steps,
                            const PreprocessOptions& pre) {
    PipelineResult res;

    // Known values are carried into the output parameter set unchanged.
    res.params.m_rail = ds.info.m_rail;
    res.params.m_trolley = ds.info.m_trolley;
    res.params.gravity = ds.info.gravity;
    res.params.u_sat = ds.info.u_sat;
    res.params.m_payload = 0.0;
    res.params.x.radius = ds.info.radius_x;
    res.params.x.pos_min = ds.info.x_min;
    res.params.x.pos_max = ds.info.x_max;
    res.params.y.radius = ds.info.radius_y;
    res.params.y.pos_min = ds.info.y_min;
    res.params.y.pos_max = ds.info.y_max;
    res.params.l.radius = ds.info.radius_l;
    res.params.l.pos_min = ds.info.l_min;
    res.params.l.pos_max = ds.info.l_max;

    if (steps.rope) {
        const auto quasi = records_of_kind(ds, "rope_quasistatic");
        const auto noload = records_of_kind(ds, "rope_noload");
        const auto loaded = records_of_kind(ds, "rope_loaded");
        if (quasi.empty() || noload.empty() || loaded.empty())
            throw PreconditionError(
                "rope step needs rope_quasistatic, rope_noload and rope_loaded records");
        res.rope = estimate_rope(quasi, noload.front(), loaded, ds.info.gravity,
                                 encoder_quantum_l(ds.info), pre);
        res.steps_done.push_back("rope");

        const double k_l = 1.0 / res.rope->p4;
        res.params.l.gain = k_l;
        res.params.l.inertia = res.rope->p1 * k_l;
        const double dbar_l = res.rope->p2 * k_l;
        const double cbar_l = res.rope->p3 * k_l;
        res.params.l.friction.viscous_pos = dbar_l;
        res.params.l.friction.viscous_neg = dbar_l;
        res.params.l.friction.coulomb_pos =
            Polynomial4::constant(cbar_l, ds.info.l_min, ds.info.l_max);
        res.params.l.friction.coulomb_neg =
            Polynomial4::constant(cbar_l, ds.info.l_min, ds.info.l_max);
    }

    if (steps.axes) {
        if (!ds.breakaway || ds.breakaway->size() < 3)
            throw PreconditionError("axes step needs the breakaway dataset");
        const auto motion = records_of_kind(ds, "xy_motion");
        if (motion.empty())
            throw PreconditionError("axes step needs an xy_motion record");

        const BreakawayDataset& G = *ds.breakaway;
        struct MapFit {
            GprModel model;
            Polynomial4 poly;
            GprFitDiag diag;
        };
        auto fit_map = [&](const std::vector<double>& pos,
                           const std::vector<double>& volts, double lo, double hi) {
            GprModel m = GprModel::fit(pos, volts);
            GprFitDiag d;
            d.hyper = m.hyper();
            Polynomial4 poly = fit_poly4(m, lo, hi, &d.poly_max_deviation);
            return MapFit{std::move(m), poly, d};
        };
        MapFit xp = fit_map(G.x, G.ux_pos, ds.info.x_min, ds.info.x_max);
        MapFit xn = fit_map(G.x, G.ux_neg, ds.info.x_min, ds.info.x_max);
        MapFit yp = fit_map(G.y, G.uy_pos, ds.info.y_min, ds.info.y_max);
        MapFit yn = fit_map(G.y, G.uy_neg, ds.info.y_min, ds.info.y_max);
        res.p5x_pos = xp.poly;
        res.p5x_neg = xn.poly;
        res.p5y_pos = yp.poly;
        res.p5y_neg = yn.poly;
        res.gpr = {xp.diag, xn.diag, yp.diag, yn.diag};

        res.axis_x = estimate_axis(motion.front(), Axis::X, xp.poly, xn.poly, pre);
        res.axis_y = estimate_axis(motion.front(), Axis::Y, yp.poly, yn.poly, pre);
        res.steps_done.push_back("axes");

        if (res.rope) {
            // Identical drive motors: gains scale with the inverse pulley
            // radius, which pins the per-axis gain from the rope gain.
            const double k_l = res.params.l.gain;
            const double k_x = k_l * ds.info.radius_l / ds.info.radius_x;
            const double k_y = k_l * ds.info.radius_l / ds.info.radius_y;
            auto fill_axis = [&](AxisParams& ax, const AxisEstimate& est,
                                 const Polynomial4& p5p, const Polynomial4& p5n,
                                 double gain, double moving_mass) {
                ax.gain = gain;
                ax.inertia = std::max(0.0, est.acc_coeff * gain - moving_mass);
                ax.friction.viscous_pos = est.p7_pos * gain;
                ax.friction.viscous_neg = est.p7_neg * gain;
                ax.friction.coulomb_pos = p5p;
                ax.friction.coulomb_neg = p5n;
                for (double& c : ax.friction.coulomb_pos.c) c *= gain;
                for (double& c : ax.friction.coulomb_neg.c) c *= gain;
            };
            fill_axis(res.params.x, *res.axis_x, xp.poly, xn.poly, k_x,
                      ds.info.m_trolley + ds.info.m_rail);
            fill_axis(res.params.y, *res.axis_y, yp.poly, yn.poly, k_y,
                      ds.info.m_trolley);
        }
    }

    if (steps.swing) {
        const auto swings = records_of_kind(ds, "free_swing");
        if (swings.empty())
            throw PreconditionError("swing step needs free_swing records");
        const double mass = swings.front().mass;
        res.swing = estimate_swing_damping(swings, mass, ds.info.gravity, pre);
        res.steps_done.push_back("swing");
        res.params.d_alpha = res.swing->d_alpha;
        res.params.d_beta = res.swing->d_beta;
    }

    res.complete = steps.rope && steps.axes && steps.swing && res.rope &&
                   res.axis_x && res.axis_y && res.swing;
    return res;
}

} // namespace crane3d
