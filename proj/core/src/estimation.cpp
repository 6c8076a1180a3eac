#include "crane3d/estimation.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numeric>

#include <Eigen/Dense>

#include "crane3d/errors.hpp"

namespace crane3d {

namespace {

Eigen::MatrixXd to_eigen(const Matrix& m) {
    Eigen::MatrixXd out(m.rows, m.cols);
    for (std::size_t i = 0; i < m.rows; ++i)
        for (std::size_t j = 0; j < m.cols; ++j)
            out(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = m.at(i, j);
    return out;
}

int sgn(double v) { return v > 0 ? 1 : (v < 0 ? -1 : 0); }

} // namespace

double LsResult::max_offdiag() const {
    double m = 0.0;
    for (std::size_t i = 0; i < correlation.rows; ++i)
        for (std::size_t j = 0; j < correlation.cols; ++j)
            if (i != j) m = std::max(m, std::fabs(correlation.at(i, j)));
    return m;
}

LsResult ls_solve(const RegressionProblem& problem) {
    const std::size_t n = problem.phi.rows;
    const std::size_t pcols = problem.phi.cols;
    if (n == 0 || pcols == 0) throw PreconditionError("empty regression problem");
    if (problem.target.size() != n)
        throw PreconditionError("target length does not match regressor rows");

    const Eigen::MatrixXd phi = to_eigen(problem.phi);
    const Eigen::VectorXd y =
        Eigen::Map<const Eigen::VectorXd>(problem.target.data(),
                                          static_cast<Eigen::Index>(n));

    const Eigen::JacobiSVD<Eigen::MatrixXd> svd(phi, Eigen::ComputeThinU |
                                                          Eigen::ComputeThinV);
    const auto& sv = svd.singularValues();
    const double cond = sv(0) / sv(sv.size() - 1);
    if (!(sv(sv.size() - 1) > 0) || cond >= 1e10) {
        // Name the closest-to-collinear column pair for the error message.
        std::size_t bi = 0, bj = 1;
        double best = -1.0;
        for (std::size_t i = 0; i < pcols; ++i)
            for (std::size_t j = i + 1; j < pcols; ++j) {
                const auto ci = phi.col(static_cast<Eigen::Index>(i));
                const auto cj = phi.col(static_cast<Eigen::Index>(j));
                const double denom = ci.norm() * cj.norm();
                const double c = denom > 0 ? std::fabs(ci.dot(cj)) / denom : 1.0;
                if (c > best) {
                    best = c;
                    bi = i;
                    bj = j;
                }
            }
        const auto name = [&](std::size_t k) {
            return k < problem.labels.size() ? problem.labels[k]
                                             : "col" + std::to_string(k);
        };
        throw IllConditionedError("regression ill conditioned (cond=" +
                                  std::to_string(cond) + "); near-collinear columns " +
                                  name(bi) + " and " + name(bj));
    }

    const Eigen::VectorXd theta = svd.solve(y);
    const Eigen::VectorXd resid = y - phi * theta;

    LsResult out;
    out.estimates.assign(theta.data(), theta.data() + theta.size());
    out.residual_rms = std::sqrt(resid.squaredNorm() / static_cast<double>(n));
    out.labels = problem.labels;

    const Eigen::MatrixXd cov = (phi.transpose() * phi).inverse();
    out.correlation = Matrix(pcols, pcols);
    for (std::size_t i = 0; i < pcols; ++i)
        for (std::size_t j = 0; j < pcols; ++j) {
            const double d = std::sqrt(cov(static_cast<Eigen::Index>(i),
                                           static_cast<Eigen::Index>(i)) *
                                       cov(static_cast<Eigen::Index>(j),
                                           static_cast<Eigen::Index>(j)));
            out.correlation.at(i, j) =
                d > 0 ? cov(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) / d
                      : (i == j ? 1.0 : 0.0);
        }
    return out;
}

ProcessedChannel preprocess_channel(const std::vector<double>& raw, double dt,
                                    const PreprocessOptions& opt) {
    SampledSignal sig;
    sig.dt = dt;
    sig.values = raw;
    ProcessedChannel ch;
    ch.pos = butter_filtfilt(sig, opt.filter);
    ch.vel = central_diff_velocity(ch.pos);
    ch.acc = central_diff_accel(ch.pos);
    ch.mask = mask_zero_crossings(ch.vel, opt.mask_window_s);
    if (opt.min_speed_frac > 0) {
        double vmax = 0.0;
        for (double v : ch.vel.values) vmax = std::max(vmax, std::fabs(v));
        const double thr = opt.min_speed_frac * vmax;
        for (std::size_t k = 0; k < ch.mask.size(); ++k)
            if (std::fabs(ch.vel.values[k]) < thr) ch.mask[k] = 0;
    }
    // Acceleration endpoints are invalid too.
    for (std::size_t k = 0; k < ch.mask.size(); ++k)
        if (!ch.acc.is_valid(k)) ch.mask[k] = 0;
    return ch;
}

BreakawayEstimate estimate_breakaway(const std::vector<double>& t,
                                     const std::vector<double>& u,
                                     const std::vector<double>& pos,
                                     double motion_tol) {
    if (t.size() < 2 || t.size() != u.size() || t.size() != pos.size())
        throw PreconditionError("ramp record channels must match and hold >= 2 samples");
    const double p0 = pos.front();
    for (std::size_t k = 1; k < pos.size(); ++k) {
        if (std::fabs(pos[k] - p0) > motion_tol)
            return {u[k - 1], t[k - 1]};
    }
    throw SaturationError("voltage ramp ended without motion");
}

namespace {

// Appends masked rope regression rows from one record.
// Columns: accel, vel, sign(vel), (accel - g) * mass. The caller selects
// which columns enter a given stage.
struct RopeRows {
    std::vector<double> acc, vel, sgn_vel, load, u;
};

void append_rope_rows(const MeasurementRecord& rec, double gravity,
                      const PreprocessOptions& opt, RopeRows& rows) {
    const ProcessedChannel ch = preprocess_channel(rec.L, rec.dt, opt);
    for (std::size_t k = 0; k < rec.size(); ++k) {
        if (!ch.mask[k]) continue;
        rows.acc.push_back(ch.acc.values[k]);
        rows.vel.push_back(ch.vel.values[k]);
        rows.sgn_vel.push_back(sgn(ch.vel.values[k]));
        rows.load.push_back((ch.acc.values[k] - gravity) * rec.mass);
        rows.u.push_back(rec.u_l[k]);
    }
}

} // namespace

RopeEstimate estimate_rope(const std::vector<MeasurementRecord>& quasistatic,
                           const MeasurementRecord& noload,
                           const std::vector<MeasurementRecord>& loaded,
                           double gravity, double encoder_quantum,
                           const PreprocessOptions& opt) {
    if (quasistatic.empty())
        throw PreconditionError("rope estimation needs at least one quasistatic ramp");
    if (noload.mass != 0.0)
        throw PreconditionError("the no-load record must have zero payload mass");

    RopeEstimate est;

    // Stage 1: quasistatic breakaway, both directions averaged.
    const double tol = std::max(2.0 * encoder_quantum, 1e-9);
    for (const auto& rec : quasistatic) {
        const auto b = estimate_breakaway(rec.t, rec.u_l, rec.L, tol);
        est.p3_samples.push_back(std::fabs(b.voltage));
    }
    est.p3 = std::accumulate(est.p3_samples.begin(), est.p3_samples.end(), 0.0) /
             static_cast<double>(est.p3_samples.size());

    // Stage 2: no-load motion, p3 fixed.
    RopeRows nl;
    append_rope_rows(noload, gravity, opt, nl);
    {
        RegressionProblem pr;
        pr.labels = {"P1", "P2"};
        pr.phi = Matrix(nl.u.size(), 2);
        pr.target.resize(nl.u.size());
        for (std::size_t k = 0; k < nl.u.size(); ++k) {
            pr.phi.at(k, 0) = nl.acc[k];
            pr.phi.at(k, 1) = nl.vel[k];
            pr.target[k] = nl.u[k] - est.p3 * nl.sgn_vel[k];
        }
        est.noload = ls_solve(pr);
        est.p1 = est.noload.estimates[0];
        est.p2 = est.noload.estimates[1];
    }

    // Stage 3: loaded residual, single regressor.
    if (!loaded.empty()) {
        RopeRows ld;
        for (const auto& rec : loaded) append_rope_rows(rec, gravity, opt, ld);
        RegressionProblem pr;
        pr.labels = {"P4"};
        pr.phi = Matrix(ld.u.size(), 1);
        pr.target.resize(ld.u.size());
        for (std::size_t k = 0; k < ld.u.size(); ++k) {
            pr.phi.at(k, 0) = ld.load[k];
            pr.target[k] = ld.u[k] - est.p1 * ld.acc[k] - est.p2 * ld.vel[k] -
                           est.p3 * ld.sgn_vel[k];
        }
        est.loaded = ls_solve(pr);
        est.p4 = est.loaded.estimates[0];

        // Joint 4-column variant on the same loaded data, for the
        // correlation diagnostics only.
        RegressionProblem joint;
        joint.labels = {"P1", "P2", "P3", "P4"};
        joint.phi = Matrix(ld.u.size(), 4);
        joint.target = ld.u;
        for (std::size_t k = 0; k < ld.u.size(); ++k) {
            joint.phi.at(k, 0) = ld.acc[k];
            joint.phi.at(k, 1) = ld.vel[k];
            joint.phi.at(k, 2) = ld.sgn_vel[k];
            joint.phi.at(k, 3) = ld.load[k];
        }
        try {
            est.joint = ls_solve(joint);
        } catch (const IllConditionedError&) {
            // Expected with a single payload mass; leave the joint result empty.
        }
    }
    return est;
}

AxisEstimate estimate_axis(const MeasurementRecord& rec, Axis axis,
                           const Polynomial4& p5_pos, const Polynomial4& p5_neg,
                           const PreprocessOptions& opt) {
    if (rec.mass != 0.0)
        throw PreconditionError("axis estimation uses the no-payload record");
    const std::vector<double>& raw = axis == Axis::X ? rec.x_t : rec.y_t;
    const std::vector<double>& u = axis == Axis::X ? rec.u_x : rec.u_y;
    const ProcessedChannel ch = preprocess_channel(raw, rec.dt, opt);

    RegressionProblem pr;
    pr.labels = {"acc", "P7+", "P7-"};
    std::vector<double> acc, vpos, vneg, target;
    for (std::size_t k = 0; k < rec.size(); ++k) {
        if (!ch.mask[k]) continue;
        const double v = ch.vel.values[k];
        const double pos = ch.pos.values[k];
        const int s = sgn(v);
        if (s == 0) continue;
        acc.push_back(ch.acc.values[k]);
        vpos.push_back(s > 0 ? v : 0.0);
        vneg.push_back(s < 0 ? v : 0.0);
        target.push_back(u[k] - (s > 0 ? p5_pos.eval(pos) : -p5_neg.eval(pos)));
    }
    pr.phi = Matrix(acc.size(), 3);
    pr.target = target;
    for (std::size_t k = 0; k < acc.size(); ++k) {
        pr.phi.at(k, 0) = acc[k];
        pr.phi.at(k, 1) = vpos[k];
        pr.phi.at(k, 2) = vneg[k];
    }
    AxisEstimate est;
    est.ls = ls_solve(pr);
    est.acc_coeff = est.ls.estimates[0];
    est.p7_pos = est.ls.estimates[1];
    est.p7_neg = est.ls.estimates[2];
    return est;
}

SwingEstimate estimate_swing_damping(const std::vector<MeasurementRecord>& records,
                                     double payload_mass, double gravity,
                                     const PreprocessOptions& opt) {
    if (records.empty())
        throw PreconditionError("swing estimation needs at least one record");
    if (!(payload_mass > 0))
        throw PreconditionError("swing estimation needs a hanging payload");

    std::vector<double> a_col, a_tgt, b_col, b_tgt;
    const double g = gravity;
    bool any_stationary = false;

    for (const auto& rec : records) {
        const ProcessedChannel cx = preprocess_channel(rec.x_t, rec.dt, opt);
        const ProcessedChannel cy = preprocess_channel(rec.y_t, rec.dt, opt);
        const ProcessedChannel cl = preprocess_channel(rec.L, rec.dt, opt);
        PreprocessOptions angle_opt = opt;
        angle_opt.min_speed_frac = 0.0;  // angle rates legitimately cross zero
        const ProcessedChannel ca = preprocess_channel(rec.alpha, rec.dt, angle_opt);
        const ProcessedChannel cb = preprocess_channel(rec.beta, rec.dt, angle_opt);

        for (std::size_t k = 0; k < rec.size(); ++k) {
            if (!ca.acc.is_valid(k)) continue;
            // Only strictly stationary support segments qualify.
            if (std::fabs(cx.vel.values[k]) > 1e-3 || std::fabs(cy.vel.values[k]) > 1e-3 ||
                std::fabs(cl.vel.values[k]) > 1e-3)
                continue;
            any_stationary = true;
            const double L = cl.pos.values[k];
            const double al = ca.pos.values[k], be = cb.pos.values[k];
            const double dal = ca.vel.values[k], dbe = cb.vel.values[k];
            const double mL2 = payload_mass * L * L;

            if (ca.mask[k]) {
                const double model = g * std::cos(al) * std::cos(be) / L +
                                     std::cos(al) * std::sin(al) * dbe * dbe;
                a_col.push_back(-dal / mL2);
                a_tgt.push_back(ca.acc.values[k] - model);
            }
            if (cb.mask[k] && std::fabs(std::sin(al)) > 1e-3) {
                const double model = (-g * std::sin(be) -
                                      2.0 * std::cos(al) * L * dal * dbe) /
                                     (std::sin(al) * L);
                b_col.push_back(-dbe / mL2);
                b_tgt.push_back(cb.acc.values[k] - model);
            }
        }
    }
    if (!any_stationary)
        throw PreconditionError("no stationary segment found in the swing records");
    if (a_col.empty() || b_col.empty())
        throw PreconditionError("swing records carry no usable oscillation samples");

    SwingEstimate est;
    {
        RegressionProblem pr;
        pr.labels = {"D_alpha"};
        pr.phi = Matrix(a_col.size(), 1);
        pr.target = a_tgt;
        for (std::size_t k = 0; k < a_col.size(); ++k) pr.phi.at(k, 0) = a_col[k];
        est.ls_alpha = ls_solve(pr);
        est.d_alpha = est.ls_alpha.estimates[0];
    }
    {
        RegressionProblem pr;
        pr.labels = {"D_beta"};
        pr.phi = Matrix(b_col.size(), 1);
        pr.target = b_tgt;
        for (std::size_t k = 0; k < b_col.size(); ++k) pr.phi.at(k, 0) = b_col[k];
        est.ls_beta = ls_solve(pr);
        est.d_beta = est.ls_beta.estimates[0];
    }
    return est;
}

ActiveSamplingResult active_sampling(const BreakawayOracle& oracle,
                                     double x_min, double x_max, double y_min,
                                     double y_max, const ActiveSamplingConfig& cfg) {
    using clock = std::chrono::steady_clock;
    const auto t_start = clock::now();

    ActiveSamplingResult res;
    const double xlo = x_min + cfg.margin, xhi = x_max - cfg.margin;
    const double ylo = y_min + cfg.margin, yhi = y_max - cfg.margin;

    auto measure = [&](double px, double py) {
        try {
            const auto v = oracle(px, py);
            res.dataset.x.push_back(px);
            res.dataset.y.push_back(py);
            res.dataset.ux_pos.push_back(v[0]);
            res.dataset.ux_neg.push_back(v[1]);
            res.dataset.uy_pos.push_back(v[2]);
            res.dataset.uy_neg.push_back(v[3]);
            return true;
        } catch (const std::exception&) {
            return false;  // skip the point, keep sampling
        }
    };

    for (int i = 0; i < cfg.initial_points; ++i) {
        const double f = cfg.initial_points == 1
                             ? 0.5
                             : static_cast<double>(i) / (cfg.initial_points - 1);
        measure(xlo + f * (xhi - xlo), ylo + f * (yhi - ylo));
    }

    auto fit_all = [&]() {
        std::vector<GprModel> models;
        models.push_back(GprModel::fit(res.dataset.x, res.dataset.ux_pos));
        models.push_back(GprModel::fit(res.dataset.x, res.dataset.ux_neg));
        models.push_back(GprModel::fit(res.dataset.y, res.dataset.uy_pos));
        models.push_back(GprModel::fit(res.dataset.y, res.dataset.uy_neg));
        return models;
    };

    for (;;) {
        res.models = fit_all();

        // Candidate grid: per axis, highest posterior variance across the two
        // direction models decides the next measurement position.
        double best_x = xlo, best_y = ylo, sx = -1.0, sy = -1.0;
        double max_std = 0.0;
        for (int i = 0; i < cfg.candidate_grid; ++i) {
            const double f = static_cast<double>(i) / (cfg.candidate_grid - 1);
            const double qx = xlo + f * (xhi - xlo);
            const double qy = ylo + f * (yhi - ylo);
            const double vx = std::max(res.models[0].predict(qx).second,
                                       res.models[1].predict(qx).second);
            const double vy = std::max(res.models[2].predict(qy).second,
                                       res.models[3].predict(qy).second);
            if (vx > sx) {
                sx = vx;
                best_x = qx;
            }
            if (vy > sy) {
                sy = vy;
                best_y = qy;
            }
            max_std = std::max({max_std, std::sqrt(vx), std::sqrt(vy)});
        }
        res.max_posterior_std = max_std;

        if (max_std < cfg.std_threshold) {
            res.stop_reason = "std_threshold";
            break;
        }
        if (static_cast<int>(res.dataset.size()) >= cfg.max_points) {
            res.stop_reason = "point_budget";
            break;
        }
        if (std::chrono::duration<double>(clock::now() - t_start).count() >
            cfg.time_budget_s) {
            res.stop_reason = "time_budget";
            break;
        }
        measure(best_x, best_y);
    }
    return res;
}

Polynomial4 fit_poly4(const GprModel& model, double lo, double hi,
                      double* max_deviation) {
    constexpr int kGrid = 201;
    RegressionProblem pr;
    pr.labels = {"c0", "c1", "c2", "c3", "c4"};
    pr.phi = Matrix(kGrid, 5);
    pr.target.resize(kGrid);
    std::vector<double> xs(kGrid);
    for (int i = 0; i < kGrid; ++i) {
        const double x = lo + (hi - lo) * i / (kGrid - 1);
        xs[static_cast<std::size_t>(i)] = x;
        double p = 1.0;
        for (int j = 0; j < 5; ++j) {
            pr.phi.at(static_cast<std::size_t>(i), static_cast<std::size_t>(j)) = p;
            p *= x;
        }
        pr.target[static_cast<std::size_t>(i)] = model.predict(x).first;
    }
    const LsResult ls = ls_solve(pr);
    Polynomial4 poly;
    for (int j = 0; j < 5; ++j)
        poly.c[static_cast<std::size_t>(j)] = ls.estimates[static_cast<std::size_t>(j)];
    poly.pos_min = lo;
    poly.pos_max = hi;
    if (max_deviation) {
        double md = 0.0;
        for (int i = 0; i < kGrid; ++i)
            md = std::max(md, std::fabs(poly.eval(xs[static_cast<std::size_t>(i)]) -
                                        pr.target[static_cast<std::size_t>(i)]));
        *max_deviation = md;
    }
    return poly;
}

} // namespace crane3d
