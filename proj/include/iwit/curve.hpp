// curve.hpp — sampled rows of the compatibility boundary curve, the data
// behind the gamma-plane region figure.

#pragma once

#include <cstdio>
#include <string>
#include <vector>

#include "iwit/mub.hpp"

namespace iwit {

struct CurveRecord {
    double theta = 0.0;
    double gamma_phi = 0.0;
    double gamma_psi = 0.0;
    double p_prior = 0.0;
    double p_post = 0.0;
    double witness_constant = 0.0;
};

/// One curve row at parameter theta: boundary smearings plus the closed-form
/// guessing probabilities and witness constant of the direction mu(theta).
inline CurveRecord curve_record(int d, double theta) {
    const SmearingVector g = boundary_curve(d, theta);
    const NoiseVector mu = mu_of_theta(d, theta);
    return CurveRecord{theta,          g.gamma_phi,         g.gamma_psi,
                       p_prior_mub(d, mu), p_post_mub(d, mu), mub_witness_constant(d, mu)};
}

/// `samples` rows equispaced over [-theta_0, theta_0), left endpoint included;
/// an even sample count places a row exactly at theta = 0.
inline std::vector<CurveRecord> sample_boundary_curve(int d, int samples) {
    if (samples < 1) throw ThetaOutOfRange("need at least one sample");
    const double t0 = theta0(d);
    std::vector<CurveRecord> out;
    out.reserve(samples);
    for (int i = 0; i < samples; ++i)
        out.push_back(curve_record(d, -t0 + i * (2.0 * t0 / samples)));
    return out;
}

inline constexpr const char* kCurveCsvHeader =
    "theta,gamma_phi,gamma_psi,p_prior,p_post,witness_constant";

/// Fixed float formatting shared by all CSV output: 15 significant digits,
/// lowercase scientific when shorter.
inline std::string format_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.15g", v);
    return buf;
}

inline std::string curve_csv_row(const CurveRecord& r) {
    return format_double(r.theta) + "," + format_double(r.gamma_phi) + "," +
           format_double(r.gamma_psi) + "," + format_double(r.p_prior) + "," +
           format_double(r.p_post) + "," + format_double(r.witness_constant);
}

}  // namespace iwit
