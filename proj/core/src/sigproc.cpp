#include "crane3d/sigproc.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>

#include <Eigen/Dense>

#include "crane3d/errors.hpp"

namespace crane3d {

namespace {

// Polynomial coefficients (highest degree last) from complex roots; the
// imaginary parts cancel for conjugate-paired root sets.
std::vector<double> poly_from_roots(const std::vector<std::complex<double>>& roots) {
    std::vector<std::complex<double>> c{1.0};
    for (const auto& r : roots) {
        std::vector<std::complex<double>> nc(c.size() + 1, 0.0);
        for (std::size_t i = 0; i < c.size(); ++i) {
            nc[i] += c[i];
            nc[i + 1] -= c[i] * r;
        }
        c = std::move(nc);
    }
    std::vector<double> out(c.size());
    for (std::size_t i = 0; i < c.size(); ++i) out[i] = c[i].real();
    return out;
}

// Steady-state initial filter state for a unit-level input, solved from the
// direct-form-II-transposed update so that filtering a constant produces the
// same constant from the first sample on.
std::vector<double> lfilter_zi(const FilterCoeffs& f) {
    const int n = static_cast<int>(f.a.size()) - 1;
    Eigen::MatrixXd A = Eigen::MatrixXd::Zero(n, n);
    Eigen::VectorXd B(n);
    for (int i = 0; i < n; ++i) {
        A(i, 0) = -f.a[static_cast<std::size_t>(i) + 1];
        if (i + 1 < n) A(i, i + 1) = 1.0;
        B(i) = f.b[static_cast<std::size_t>(i) + 1] -
               f.b[0] * f.a[static_cast<std::size_t>(i) + 1];
    }
    const Eigen::VectorXd zi =
        (Eigen::MatrixXd::Identity(n, n) - A).partialPivLu().solve(B);
    return {zi.data(), zi.data() + n};
}

// Direct form II transposed with explicit initial state.
std::vector<double> lfilter(const FilterCoeffs& f, const std::vector<double>& x,
                            std::vector<double> z) {
    const std::size_t n = f.a.size() - 1;
    std::vector<double> y(x.size());
    for (std::size_t k = 0; k < x.size(); ++k) {
        const double xk = x[k];
        const double yk = f.b[0] * xk + (n ? z[0] : 0.0);
        for (std::size_t i = 0; i + 1 < n; ++i)
            z[i] = f.b[i + 1] * xk + z[i + 1] - f.a[i + 1] * yk;
        if (n) z[n - 1] = f.b[n] * xk - f.a[n] * yk;
        y[k] = yk;
    }
    return y;
}

} // namespace

FilterCoeffs butterworth_coeffs(int order, double cutoff_hz, double dt) {
    if (order < 1) throw SchemaError("filter order must be at least 1");
    if (!(cutoff_hz > 0) || cutoff_hz >= 0.5 / dt)
        throw SchemaError("cutoff must lie strictly below the Nyquist frequency");

    // Analog prototype poles on the left unit semicircle, scaled by the
    // pre-warped cutoff, then mapped with the bilinear transform.
    const double fs2 = 2.0 / dt;
    const double wc = fs2 * std::tan(M_PI * cutoff_hz * dt);
    std::vector<std::complex<double>> zpoles;
    std::complex<double> gain_num(1.0, 0.0);
    std::complex<double> gain_den(1.0, 0.0);
    for (int k = 0; k < order; ++k) {
        const double theta = M_PI * (2.0 * k + order + 1.0) / (2.0 * order);
        const std::complex<double> s = wc * std::complex<double>(std::cos(theta),
                                                                 std::sin(theta));
        zpoles.push_back((fs2 + s) / (fs2 - s));
        gain_num *= wc;
        gain_den *= (fs2 - s);
    }
    FilterCoeffs f;
    f.a = poly_from_roots(zpoles);
    // All digital zeros sit at z = -1.
    std::vector<std::complex<double>> zzeros(static_cast<std::size_t>(order),
                                             std::complex<double>(-1.0, 0.0));
    f.b = poly_from_roots(zzeros);
    const double k0 = (gain_num / gain_den).real();
    for (double& b : f.b) b *= k0;
    return f;
}

SampledSignal butter_filtfilt(const SampledSignal& x, const FilterSpec& spec) {
    const FilterCoeffs f = butterworth_coeffs(spec.order, spec.cutoff_hz, x.dt);
    const std::size_t pad = 3 * (static_cast<std::size_t>(spec.order) + 1);
    if (x.size() <= 3 * static_cast<std::size_t>(spec.order) || x.size() <= pad)
        throw SchemaError("signal too short for zero-phase filtering");

    const std::size_t n = x.size();
    std::vector<double> ext(n + 2 * pad);
    // Odd reflection about the endpoints keeps level and slope continuous.
    for (std::size_t i = 0; i < pad; ++i)
        ext[i] = 2.0 * x.values[0] - x.values[pad - i];
    std::copy(x.values.begin(), x.values.end(), ext.begin() + static_cast<long>(pad));
    for (std::size_t i = 0; i < pad; ++i)
        ext[n + pad + i] = 2.0 * x.values[n - 1] - x.values[n - 2 - i];

    const std::vector<double> zi = lfilter_zi(f);
    auto scale_state = [&](double v) {
        std::vector<double> z = zi;
        for (double& s : z) s *= v;
        return z;
    };

    std::vector<double> fwd = lfilter(f, ext, scale_state(ext.front()));
    std::reverse(fwd.begin(), fwd.end());
    std::vector<double> bwd = lfilter(f, fwd, scale_state(fwd.front()));
    std::reverse(bwd.begin(), bwd.end());

    SampledSignal out = x;
    std::copy(bwd.begin() + static_cast<long>(pad),
              bwd.begin() + static_cast<long>(pad + n), out.values.begin());
    return out;
}

SampledSignal central_diff_velocity(const SampledSignal& x) {
    if (x.size() < 3) throw SchemaError("need at least 3 samples to differentiate");
    SampledSignal out = x;
    const std::size_t n = x.size();
    out.values[0] = 0.0;
    out.values[n - 1] = 0.0;
    for (std::size_t k = 1; k + 1 < n; ++k)
        out.values[k] = (x.values[k + 1] - x.values[k - 1]) / (2.0 * x.dt);
    out.mark_invalid(0);
    out.mark_invalid(n - 1);
    return out;
}

SampledSignal central_diff_accel(const SampledSignal& x) {
    if (x.size() < 3) throw SchemaError("need at least 3 samples to differentiate");
    SampledSignal out = x;
    const std::size_t n = x.size();
    out.values[0] = 0.0;
    out.values[n - 1] = 0.0;
    for (std::size_t k = 1; k + 1 < n; ++k)
        out.values[k] =
            (x.values[k + 1] - 2.0 * x.values[k] + x.values[k - 1]) / (x.dt * x.dt);
    out.mark_invalid(0);
    out.mark_invalid(n - 1);
    return out;
}

std::vector<char> mask_zero_crossings(const SampledSignal& velocity, double window_s) {
    if (window_s < 0) throw SchemaError("mask window must be non-negative");
    const std::size_t n = velocity.size();
    std::vector<char> mask(n, 1);
    const auto w = static_cast<std::size_t>(std::floor(window_s / velocity.dt + 1e-9));
    auto sgn = [](double v) { return v > 0 ? 1 : (v < 0 ? -1 : 0); };
    for (std::size_t k = 0; k + 1 < n; ++k) {
        if (sgn(velocity.values[k]) == sgn(velocity.values[k + 1])) continue;
        const std::size_t lo = k >= w ? k - w : 0;
        const std::size_t hi = std::min(n - 1, k + 1 + w);
        for (std::size_t i = lo; i <= hi; ++i) mask[i] = 0;
    }
    for (std::size_t k = 0; k < n; ++k)
        if (!velocity.is_valid(k)) mask[k] = 0;
    return mask;
}

SampledSignal quantize_encoder(const SampledSignal& x, int pulses_per_rev,
                               double scale) {
    if (pulses_per_rev <= 0) throw SchemaError("pulses_per_rev must be positive");
    const double step = scale * 2.0 * M_PI / pulses_per_rev;
    SampledSignal out = x;
    for (double& v : out.values) {
        const double r = v / step;
        double f = std::floor(r);
        if (r - f > 1.0 - 1e-9) f += 1.0;  // keep exact grid points on the grid
        v = f * step;
    }
    return out;
}

} // namespace crane3d
