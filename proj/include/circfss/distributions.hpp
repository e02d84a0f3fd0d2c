#pragma once

#include <optional>
#include <string>
#include <variant>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "circfss/geometry.hpp"
#include "circfss/mean.hpp"
#include "circfss/rng.hpp"

namespace circfss {

/// Mixture of a von Mises mode at 0 (weight beta, concentration kappa) and
/// one at -pi (weight 1-beta, concentration lambda), optionally pushed
/// forward under the cut-and-mirror map of radius cut_radius about -pi.
struct VonMisesMixture {
    double kappa = 0.0;       // >= 0
    double beta = 1.0;        // in [0, 1]
    double lambda = 0.0;      // >= 0
    double cut_radius = 0.0;  // in [0, pi/2]
};

/// Uniform bulk on [-1/2, 1/2] plus antipodal wells 1 - (pi -+ x)^r; the
/// sample mean converges at rate n^{-1/(2(r+1))}.
struct PowerSmeary {
    double order_r = 1.0;  // > 0
};

/// Uniform bulk on [-1/2, 1/2] plus antipodal wells max{1 - G_r'(pi -+ x), 0}
/// with G_r(x) = exp(-1/x^r); the sample mean converges logarithmically.
struct LogSmeary {
    double order_r = 1.0;  // > 0
};

/// Atom at 0 plus piecewise-constant density levels w_i/(2*pi) on the
/// symmetric bands at arc distance (t_{i-1}, t_i] from the antipode.
struct PiecewiseAtom {
    std::vector<double> t;  // increasing, in (0, pi)
    std::vector<double> w;  // in [0, 1], same length as t
};

/// Uniform bulk on [-1/2, 1/2] of mass 1-2w plus atoms of mass w at
/// +-(pi/2 + epsilon).
struct EquatorAtoms {
    double epsilon = 0.0;   // in [-pi/2, pi/2)
    double weight_w = 0.1;  // in (0, 1/4]
};

/// Uniform on [-half_width, half_width]; test fixture for the no-FSS regime.
struct UniformInterval {
    double half_width = 0.5;  // in (0, pi]
};

using DistributionSpec = std::variant<VonMisesMixture, PowerSmeary, LogSmeary,
                                      PiecewiseAtom, EquatorAtoms, UniformInterval>;

/// Throws std::invalid_argument when parameters violate the family
/// constraints (including k(t, w) < 0 for PiecewiseAtom).
void validate(const DistributionSpec& spec);

struct AtomMass {
    Angle location;
    double mass = 0.0;
};

struct DensityValue {
    double continuous = 0.0;      // density w.r.t. arc length at the query point
    std::vector<AtomMass> atoms;  // full atom list of the distribution
};

/// Continuous density at x plus the distribution's atom list.
DensityValue density(const DistributionSpec& spec, const Angle& x);

/// Cuts out a disk of radius r about -pi and mirrors it to the mean:
/// identity on [-pi+r, pi-r), p+pi on [-pi, -pi+r), p-pi on [pi-r, pi).
Angle cut_mirror_map(double r, const Angle& p);

/// n i.i.d. draws.
CircleSample sample(const DistributionSpec& spec, std::size_t n, Rng& rng);

enum class RegimeKind { nonsmeary, power_smeary, log_smeary };

struct Regime {
    RegimeKind kind = RegimeKind::nonsmeary;
    double order = 0.0;  // r for the smeary regimes
};

struct TheoreticalMoments {
    double sigma_sq = 0.0;           // E[d(X, 0)^2]
    double antipodal_density = 0.0;  // f(-pi)
    Regime regime;
    /// sigma_sq / (1 - 2*pi*f(-pi))^2; present only in the nonsmeary regime.
    std::optional<double> asymptotic_scaled_variance;
};

/// Moments of the population with mean at 0 (callers assert uniqueness of
/// the mean for user-supplied parameter combinations).
TheoreticalMoments theoretical_moments(const DistributionSpec& spec);

nlohmann::json spec_to_json(const DistributionSpec& spec);
DistributionSpec spec_from_json(const nlohmann::json& j);
std::string spec_label(const DistributionSpec& spec);

}  // namespace circfss
