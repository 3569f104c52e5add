#include "mbpcn/mobility.hpp"

#include <cmath>
#include <stdexcept>
#include <utility>

namespace mbpcn {

MobilityModel::MobilityModel(std::string name,
                             std::function<double(double)> value,
                             std::function<double(double)> slope,
                             double range_max, double range_min)
    : kind_(Kind::Custom),
      name_(std::move(name)),
      value_(std::move(value)),
      slope_(std::move(slope)),
      range_max_(range_max),
      range_min_(range_min) {
    if (!value_ || !slope_)
        throw std::invalid_argument("MobilityModel: both M and M' are required");
    if (!(range_max_ >= range_min_) || range_min_ < 0.0)
        throw std::invalid_argument("MobilityModel: need 0 <= range_min <= range_max");
}

MobilityModel MobilityModel::constant(double scale) {
    if (!(scale > 0.0)) throw std::invalid_argument("MobilityModel::constant: scale must be positive");
    MobilityModel m("constant",
                    [scale](double) { return scale; },
                    [](double) { return 0.0; },
                    scale, scale);
    m.kind_ = Kind::Constant;
    m.scale_ = scale;
    return m;
}

MobilityModel MobilityModel::degenerate() {
    MobilityModel m("degenerate",
                    [](double rho) { return 1.0 - rho * rho; },
                    [](double rho) { return -2.0 * rho; },
                    1.0, 0.0);
    m.kind_ = Kind::Degenerate;
    return m;
}

double MobilityModel::operator()(double rho) const {
    switch (kind_) {
        case Kind::Constant: return scale_;
        case Kind::Degenerate: return 1.0 - rho * rho;
        case Kind::Custom: return value_(rho);
    }
    return value_(rho);
}

double MobilityModel::slope(double rho) const {
    switch (kind_) {
        case Kind::Constant: return 0.0;
        case Kind::Degenerate: return -2.0 * rho;
        case Kind::Custom: return slope_(rho);
    }
    return slope_(rho);
}

void MobilityModel::evaluate_field(const CellField& state, CellField& out) const {
    if (out.domain() != state.domain()) out = CellField(state.domain());
    const auto src = state.data();
    auto dst = out.data();
    switch (kind_) {
        case Kind::Constant:
            for (std::size_t k = 0; k < src.size(); ++k) dst[k] = scale_;
            break;
        case Kind::Degenerate:
            for (std::size_t k = 0; k < src.size(); ++k) dst[k] = 1.0 - src[k] * src[k];
            break;
        case Kind::Custom:
            for (std::size_t k = 0; k < src.size(); ++k) dst[k] = value_(src[k]);
            break;
    }
}

double reaction(const MobilityModel& model, double rho) {
    return model(rho) * PotentialModel::derivative(rho);
}

namespace {

// g(rho) = M'(rho)F'(rho) + M(rho)F''(rho), whose max over [-1,1] bounds S1
double stabilizer_integrand(const MobilityModel& model, double rho) {
    return model.slope(rho) * PotentialModel::derivative(rho) +
           model(rho) * PotentialModel::second_derivative(rho);
}

constexpr int kSampleCount = 100001; // 1e5 + 1 uniform points on [-1,1]

double golden_section_max(const std::function<double(double)>& g, double a, double b) {
    constexpr double inv_phi = 0.6180339887498949;
    double x1 = b - inv_phi * (b - a);
    double x2 = a + inv_phi * (b - a);
    double f1 = g(x1);
    double f2 = g(x2);
    while (b - a > 1e-12) {
        if (f1 < f2) {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + inv_phi * (b - a);
            f2 = g(x2);
        } else {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - inv_phi * (b - a);
            f1 = g(x1);
        }
    }
    return std::max(f1, f2);
}

} // namespace

double s1_lower_bound(const MobilityModel& model) {
    const double step = 2.0 / (kSampleCount - 1);
    double best = -std::numeric_limits<double>::infinity();
    int best_idx = 0;
    for (int k = 0; k < kSampleCount; ++k) {
        const double rho = -1.0 + k * step;
        const double g = stabilizer_integrand(model, rho);
        if (!std::isfinite(g))
            throw std::runtime_error("s1_lower_bound: stabilizer integrand is not finite at rho=" +
                                     std::to_string(rho));
        if (g > best) {
            best = g;
            best_idx = k;
        }
    }
    // refine inside the bracketing sample interval
    const double lo = std::max(-1.0, -1.0 + (best_idx - 1) * step);
    const double hi = std::min(1.0, -1.0 + (best_idx + 1) * step);
    const double refined = golden_section_max(
        [&model](double rho) { return stabilizer_integrand(model, rho); }, lo, hi);
    return std::max(best, refined);
}

double s2_lower_bound(double s1, double mobility_max, double eps, double h) {
    if (s1 < 0.0) throw std::invalid_argument("s2_lower_bound: s1 must be nonnegative");
    if (mobility_max < 0.0) throw std::invalid_argument("s2_lower_bound: mobility_max must be nonnegative");
    if (!(eps > 0.0)) throw std::invalid_argument("s2_lower_bound: eps must be positive");
    if (!(h > 0.0)) throw std::invalid_argument("s2_lower_bound: h must be positive");
    const double a = 0.25 * s1 + mobility_max * eps * eps / (h * h);
    return a * a;
}

double tau_max_conditional(double s1, double mobility_max, double eps, double h) {
    if (s1 < 0.0) throw std::invalid_argument("tau_max_conditional: s1 must be nonnegative");
    if (!(eps > 0.0)) throw std::invalid_argument("tau_max_conditional: eps must be positive");
    if (!(h > 0.0)) throw std::invalid_argument("tau_max_conditional: h must be positive");
    const double denom = s1 + 4.0 * mobility_max * eps * eps / (h * h);
    if (!(denom > 0.0)) throw std::invalid_argument("tau_max_conditional: denominator must be positive");
    return 2.0 / denom;
}

StabilizerBoundReport check_stabilized_bound(const MobilityModel& model, double s1) {
    StabilizerBoundReport rep;
    rep.bound = s1;
    const double step = 2.0 / (kSampleCount - 1);
    for (int k = 0; k < kSampleCount; ++k) {
        const double rho = -1.0 + k * step;
        const double dev = std::fabs(s1 * rho - reaction(model, rho));
        if (dev > rep.max_deviation) {
            rep.max_deviation = dev;
            rep.worst_rho = rho;
        }
    }
    rep.pass = rep.max_deviation <= s1 + 1e-12;
    return rep;
}

} // namespace mbpcn
