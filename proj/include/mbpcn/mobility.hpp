#pragma once

#include <functional>
#include <string>

#include "mbpcn/grid.hpp"

namespace mbpcn {

// Fixed double-well potential F(rho) = (1 - rho^2)^2 / 4.
struct PotentialModel {
    static double value(double rho) {
        const double s = 1.0 - rho * rho;
        return 0.25 * s * s;
    }
    static double derivative(double rho) { return rho * rho * rho - rho; }
    static double second_derivative(double rho) { return 3.0 * rho * rho - 1.0; }
};

// Mobility coefficient M(rho) with its derivative and declared range bounds
// on [-1,1]. Models are immutable; evaluation is pure and thread-safe.
class MobilityModel {
public:
    MobilityModel(std::string name,
                  std::function<double(double)> value,
                  std::function<double(double)> slope,
                  double range_max, double range_min);

    static MobilityModel constant(double scale = 1.0);
    static MobilityModel degenerate(); // M(rho) = 1 - rho^2, vanishes at the pure phases

    double operator()(double rho) const;
    double slope(double rho) const; // M'
    double range_max() const { return range_max_; } // max M on [-1,1]
    double range_min() const { return range_min_; } // min M on [-1,1]
    const std::string& name() const { return name_; }

    // out = M(state) entrywise; fast paths for the built-in models
    void evaluate_field(const CellField& state, CellField& out) const;

private:
    enum class Kind { Constant, Degenerate, Custom };

    Kind kind_;
    double scale_ = 1.0; // Constant only
    std::string name_;
    std::function<double(double)> value_;
    std::function<double(double)> slope_;
    double range_max_;
    double range_min_;
};

// f(rho) = M(rho) F'(rho), the mobility-weighted reaction term
double reaction(const MobilityModel& model, double rho);

// Smallest admissible stabilizer: max over [-1,1] of M'F' + MF''.
// Dense sampling plus golden-section refinement around the best sample;
// accurate to ~1e-8 for twice-differentiable mobilities.
double s1_lower_bound(const MobilityModel& model);

// Smallest S2 for unconditional bound preservation: (s1/4 + L eps^2/h^2)^2
double s2_lower_bound(double s1, double mobility_max, double eps, double h);

// Step-size ceiling of the conditional regime (S2 = 0): 2/(s1 + 4 L eps^2/h^2)
double tau_max_conditional(double s1, double mobility_max, double eps, double h);

// Sampled check of |S1 rho - f(rho)| <= S1 on [-1,1].
struct StabilizerBoundReport {
    double max_deviation = 0.0; // max |S1 rho - f(rho)| over the sample grid
    double worst_rho = 0.0;
    double bound = 0.0; // S1
    bool pass = false;  // max_deviation <= S1 + 1e-12
};

StabilizerBoundReport check_stabilized_bound(const MobilityModel& model, double s1);

} // namespace mbpcn
