#include "crane3d/gpr.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>

#include <Eigen/Dense>

#include "crane3d/errors.hpp"

namespace crane3d {

namespace {

constexpr double kJitter = 1e-10;

double se_kernel(double a, double b, const GprHyper& hp) {
    const double d = (a - b) / hp.length;
    return hp.sigma_f * hp.sigma_f * std::exp(-0.5 * d * d);
}

// Log marginal likelihood for given hyperparameters; -inf when the Gram
// matrix fails to factorize.
double lml_for(const std::vector<double>& x, const std::vector<double>& y,
               const GprHyper& hp) {
    const auto n = static_cast<Eigen::Index>(x.size());
    Eigen::MatrixXd K(n, n);
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = 0; j <= i; ++j)
            K(i, j) = K(j, i) = se_kernel(x[static_cast<std::size_t>(i)],
                                          x[static_cast<std::size_t>(j)], hp);
    K.diagonal().array() += hp.sigma_n * hp.sigma_n + kJitter;
    Eigen::LLT<Eigen::MatrixXd> llt(K);
    if (llt.info() != Eigen::Success)
        return -std::numeric_limits<double>::infinity();
    Eigen::VectorXd yv = Eigen::Map<const Eigen::VectorXd>(y.data(), n);
    const Eigen::VectorXd alpha = llt.solve(yv);
    double logdet = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) logdet += std::log(llt.matrixL()(i, i));
    return -0.5 * yv.dot(alpha) - logdet -
           0.5 * static_cast<double>(n) * std::log(2.0 * M_PI);
}

// Nelder-Mead in R^3 with box clamping, deterministic.
std::array<double, 3> nelder_mead(std::function<double(const std::array<double, 3>&)> f,
                                  std::array<double, 3> x0,
                                  const std::array<double, 3>& lo,
                                  const std::array<double, 3>& hi) {
    using P = std::array<double, 3>;
    auto clamp = [&](P p) {
        for (int i = 0; i < 3; ++i) p[i] = std::clamp(p[i], lo[i], hi[i]);
        return p;
    };
    struct Vert {
        P x;
        double fx;
    };
    std::array<Vert, 4> s;
    s[0] = {clamp(x0), 0};
    for (int i = 0; i < 3; ++i) {
        P p = x0;
        p[i] += 0.5 * (hi[i] - lo[i]) * 0.1 + 0.05;
        s[static_cast<std::size_t>(i) + 1] = {clamp(p), 0};
    }
    for (auto& v : s) v.fx = f(v.x);
    auto by_f = [](const Vert& a, const Vert& b) { return a.fx < b.fx; };

    for (int it = 0; it < 200; ++it) {
        std::sort(s.begin(), s.end(), by_f);
        if (std::fabs(s[3].fx - s[0].fx) < 1e-10) break;
        P c{};  // centroid of the best three
        for (int i = 0; i < 3; ++i)
            c[i] = (s[0].x[i] + s[1].x[i] + s[2].x[i]) / 3.0;
        auto lerp = [&](double t) {
            P p;
            for (int i = 0; i < 3; ++i) p[i] = c[i] + t * (s[3].x[i] - c[i]);
            return clamp(p);
        };
        const P xr = lerp(-1.0);
        const double fr = f(xr);
        if (fr < s[0].fx) {
            const P xe = lerp(-2.0);
            const double fe = f(xe);
            s[3] = fe < fr ? Vert{xe, fe} : Vert{xr, fr};
        } else if (fr < s[2].fx) {
            s[3] = {xr, fr};
        } else {
            const P xc = lerp(0.5);
            const double fc = f(xc);
            if (fc < s[3].fx) {
                s[3] = {xc, fc};
            } else {
                for (int i = 1; i < 4; ++i) {
                    for (int d = 0; d < 3; ++d)
                        s[static_cast<std::size_t>(i)].x[d] =
                            s[0].x[d] + 0.5 * (s[static_cast<std::size_t>(i)].x[d] - s[0].x[d]);
                    s[static_cast<std::size_t>(i)].fx = f(s[static_cast<std::size_t>(i)].x);
                }
            }
        }
    }
    std::sort(s.begin(), s.end(), by_f);
    return s[0].x;
}

} // namespace

GprModel::GprModel(std::vector<double> inputs, std::vector<double> targets, GprHyper hp)
    : x_(std::move(inputs)), y_(std::move(targets)), hp_(hp) {
    if (x_.size() != y_.size() || x_.empty())
        throw PreconditionError("GPR needs matching, non-empty inputs and targets");
    if (!(hp_.sigma_f > 0) || !(hp_.length > 0) || !(hp_.sigma_n >= 0))
        throw InvalidParameterError("GPR hyperparameters must be positive");

    const auto n = static_cast<Eigen::Index>(x_.size());
    Eigen::MatrixXd K(n, n);
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = 0; j <= i; ++j)
            K(i, j) = K(j, i) = se_kernel(x_[static_cast<std::size_t>(i)],
                                          x_[static_cast<std::size_t>(j)], hp_);
    K.diagonal().array() += hp_.sigma_n * hp_.sigma_n + kJitter;
    Eigen::LLT<Eigen::MatrixXd> llt(K);
    if (llt.info() != Eigen::Success)
        throw NumericalError("GPR Gram matrix not positive definite after jitter");

    Eigen::VectorXd yv = Eigen::Map<const Eigen::VectorXd>(y_.data(), n);
    Eigen::VectorXd alpha = llt.solve(yv);
    alpha_.assign(alpha.data(), alpha.data() + n);
    Eigen::MatrixXd L = llt.matrixL();
    chol_.resize(static_cast<std::size_t>(n * n));
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = 0; j < n; ++j)
            chol_[static_cast<std::size_t>(i * n + j)] = L(i, j);
    double logdet = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) logdet += std::log(L(i, i));
    lml_ = -0.5 * yv.dot(alpha) - logdet -
           0.5 * static_cast<double>(n) * std::log(2.0 * M_PI);
}

GprModel GprModel::fit(std::vector<double> inputs, std::vector<double> targets) {
    if (inputs.size() < 3)
        throw PreconditionError("GPR hyperparameter fit needs at least 3 samples");
    const auto [mn, mx] = std::minmax_element(inputs.begin(), inputs.end());
    double range = *mx - *mn;
    if (!(range > 0)) range = 1.0;

    const std::array<double, 3> lo{std::log(1e-3), std::log(0.01 * range),
                                   std::log(1e-4)};
    const std::array<double, 3> hi{std::log(1e3), std::log(range), std::log(1.0)};

    auto objective = [&](const std::array<double, 3>& p) {
        GprHyper hp{std::exp(p[0]), std::exp(p[1]), std::exp(p[2])};
        return -lml_for(inputs, targets, hp);
    };

    // Deterministic multi-start: center plus a spread of box corners.
    std::vector<std::array<double, 3>> starts;
    const auto mid = [&](int i) { return 0.5 * (lo[i] + hi[i]); };
    starts.push_back({mid(0), mid(1), mid(2)});
    for (int corner : {0b000, 0b011, 0b101, 0b110, 0b111}) {
        std::array<double, 3> p;
        for (int i = 0; i < 3; ++i) {
            const double f = (corner >> i & 1) ? 0.75 : 0.25;
            p[i] = lo[i] + f * (hi[i] - lo[i]);
        }
        starts.push_back(p);
    }
    // A data-driven guess: signal std from targets, moderate length scale.
    double ymean = 0, y2 = 0;
    for (double v : targets) ymean += v;
    ymean /= static_cast<double>(targets.size());
    for (double v : targets) y2 += (v - ymean) * (v - ymean);
    const double ystd = std::sqrt(y2 / static_cast<double>(targets.size())) + 1e-6;
    starts.push_back({std::clamp(std::log(ystd), lo[0], hi[0]),
                      std::log(0.3 * range), std::log(std::clamp(0.1 * ystd, 1.1e-4, 0.99))});

    double best = std::numeric_limits<double>::infinity();
    std::array<double, 3> best_p = starts.front();
    for (const auto& s : starts) {
        const auto p = nelder_mead(objective, s, lo, hi);
        const double v = objective(p);
        if (v < best) {
            best = v;
            best_p = p;
        }
    }
    return GprModel(std::move(inputs), std::move(targets),
                    GprHyper{std::exp(best_p[0]), std::exp(best_p[1]),
                             std::exp(best_p[2])});
}

std::pair<double, double> GprModel::predict(double x) const {
    const std::size_t n = x_.size();
    std::vector<double> ks(n);
    for (std::size_t i = 0; i < n; ++i) ks[i] = se_kernel(x, x_[i], hp_);
    double mean = 0.0;
    for (std::size_t i = 0; i < n; ++i) mean += ks[i] * alpha_[i];
    // v = L^{-1} k* by forward substitution.
    std::vector<double> v(n);
    for (std::size_t i = 0; i < n; ++i) {
        double s = ks[i];
        for (std::size_t j = 0; j < i; ++j) s -= chol_[i * n + j] * v[j];
        v[i] = s / chol_[i * n + i];
    }
    double var = se_kernel(x, x, hp_) + hp_.sigma_n * hp_.sigma_n;
    for (std::size_t i = 0; i < n; ++i) var -= v[i] * v[i];
    return {mean, std::max(var, 0.0)};
}

} // namespace crane3d
