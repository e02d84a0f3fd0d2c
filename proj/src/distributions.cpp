#include "circfss/distributions.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include <nlohmann/json.hpp>

#include "circfss/numeric.hpp"

namespace circfss {

namespace {

double vm_density(double x, double kappa) {
    return std::exp(kappa * std::cos(x)) / (kTwoPi * numeric::bessel_i0(kappa));
}

/// Base von Mises mixture density (no cut): mode at 0 with weight beta,
/// mode at -pi with weight 1-beta.
double vmm_base_density(const VonMisesMixture& s, double x) {
    return s.beta * vm_density(x, s.kappa) +
           (1.0 - s.beta) * vm_density(x + kPi, s.lambda);
}

// --- LogSmeary helpers: G_r(t) = exp(-1/t^r) on t > 0 ---

double g_r(double r, double t) {
    if (t <= 0.0) return 0.0;
    return std::exp(-1.0 / std::pow(t, r));
}

double g_r_prime(double r, double t) {
    if (t <= 0.0) return 0.0;
    return r * std::pow(t, -(r + 1.0)) * std::exp(-1.0 / std::pow(t, r));
}

/// Clamp interval (t_a, t_b) where G_r' > 1 within (0, 1/2]; empty when the
/// unimodal G_r' stays below 1.
struct LogSmearyShape {
    bool clamped = false;
    double t_a = 0.0, t_b = 0.0;
    double tail_raw = 0.0;  // integral of max{1 - G_r', 0} over (0, 1/2]
    double c_r = 0.0;       // bulk density level
};

double bisect_gprime_crossing(double r, double lo, double hi, bool rising) {
    for (int i = 0; i < 200; ++i) {
        double mid = 0.5 * (lo + hi);
        bool above = g_r_prime(r, mid) > 1.0;
        if (above == rising) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    return 0.5 * (lo + hi);
}

LogSmearyShape log_smeary_shape(double r) {
    LogSmearyShape sh;
    const double half = 0.5;
    double t_peak = std::min(half, std::pow(r / (r + 1.0), 1.0 / r));
    if (g_r_prime(r, t_peak) > 1.0) {
        sh.clamped = true;
        sh.t_a = bisect_gprime_crossing(r, 1e-12, t_peak, true);
        if (g_r_prime(r, half) > 1.0) {
            sh.t_b = half;
        } else {
            sh.t_b = bisect_gprime_crossing(r, t_peak, half, false);
        }
    }
    if (!sh.clamped) {
        sh.tail_raw = half - g_r(r, half);
    } else {
        sh.tail_raw = (sh.t_a - g_r(r, sh.t_a));
        if (sh.t_b < half) {
            sh.tail_raw += (half - sh.t_b) - (g_r(r, half) - g_r(r, sh.t_b));
        }
    }
    sh.c_r = 1.0 - sh.tail_raw / kPi;
    return sh;
}

/// Integral of max{1 - G_r', 0} over (0, t], t in [0, 1/2].
double log_smeary_raw_cdf(double r, const LogSmearyShape& sh, double t) {
    if (t <= 0.0) return 0.0;
    if (!sh.clamped || t <= sh.t_a) return t - g_r(r, t);
    double base = sh.t_a - g_r(r, sh.t_a);
    if (t <= sh.t_b) return base;
    return base + (t - sh.t_b) - (g_r(r, t) - g_r(r, sh.t_b));
}

double power_smeary_bulk(double r) {
    return (kPi * r + kPi - r) / (kPi * r + kPi);
}

double piecewise_atom_mass(const PiecewiseAtom& s) {
    double acc = 0.0;
    double prev = 0.0;
    for (std::size_t i = 0; i < s.t.size(); ++i) {
        acc += s.w[i] * (s.t[i] - prev);
        prev = s.t[i];
    }
    return 1.0 - acc / kPi;
}

/// Solves target(t) = goal for monotone nondecreasing target on [lo, hi].
template <typename F>
double bisect_monotone(F&& target, double lo, double hi, double goal) {
    for (int i = 0; i < 100; ++i) {
        double mid = 0.5 * (lo + hi);
        if (target(mid) < goal) {
            lo = mid;
        } else {
            hi = mid;
        }
        if (hi - lo < 1e-14) break;
    }
    return 0.5 * (lo + hi);
}

}  // namespace

void validate(const DistributionSpec& spec) {
    std::visit(
        [](const auto& s) {
            using T = std::decay_t<decltype(s)>;
            if constexpr (std::is_same_v<T, VonMisesMixture>) {
                if (!(s.kappa >= 0.0) || !(s.lambda >= 0.0) ||
                    !(s.beta >= 0.0 && s.beta <= 1.0) ||
                    !(s.cut_radius >= 0.0 && s.cut_radius <= kPi / 2.0)) {
                    throw std::invalid_argument("VonMisesMixture: invalid parameters");
                }
            } else if constexpr (std::is_same_v<T, PowerSmeary>) {
                if (!(s.order_r > 0.0)) {
                    throw std::invalid_argument("PowerSmeary: order_r must be > 0");
                }
            } else if constexpr (std::is_same_v<T, LogSmeary>) {
                if (!(s.order_r > 0.0)) {
                    throw std::invalid_argument("LogSmeary: order_r must be > 0");
                }
            } else if constexpr (std::is_same_v<T, PiecewiseAtom>) {
                if (s.t.size() != s.w.size()) {
                    throw std::invalid_argument("PiecewiseAtom: t and w length mismatch");
                }
                double prev = 0.0;
                for (double ti : s.t) {
                    if (!(ti > prev && ti < kPi)) {
                        throw std::invalid_argument(
                            "PiecewiseAtom: t must be increasing in (0, pi)");
                    }
                    prev = ti;
                }
                for (double wi : s.w) {
                    if (!(wi >= 0.0 && wi <= 1.0)) {
                        throw std::invalid_argument("PiecewiseAtom: w must be in [0, 1]");
                    }
                }
                if (piecewise_atom_mass(s) < 0.0) {
                    throw std::invalid_argument(
                        "PiecewiseAtom: infeasible spec, k(t, w) < 0");
                }
            } else if constexpr (std::is_same_v<T, EquatorAtoms>) {
                if (!(s.epsilon >= -kPi / 2.0 && s.epsilon < kPi / 2.0) ||
                    !(s.weight_w > 0.0 && s.weight_w <= 0.25)) {
                    throw std::invalid_argument("EquatorAtoms: invalid parameters");
                }
            } else if constexpr (std::is_same_v<T, UniformInterval>) {
                if (!(s.half_width > 0.0 && s.half_width <= kPi)) {
                    throw std::invalid_argument("UniformInterval: invalid half_width");
                }
            }
        },
        spec);
}

Angle cut_mirror_map(double r, const Angle& p) {
    if (!(r >= 0.0 && r <= kPi / 2.0)) {
        throw std::invalid_argument("cut_mirror_map: r must be in [0, pi/2]");
    }
    double x = p.radians();
    if (x < -kPi + r) return Angle(x + kPi);
    if (x >= kPi - r) return Angle(x - kPi);
    return p;
}

DensityValue density(const DistributionSpec& spec, const Angle& at) {
    validate(spec);
    const double x = at.radians();
    DensityValue out;
    std::visit(
        [&](const auto& s) {
            using T = std::decay_t<decltype(s)>;
            if constexpr (std::is_same_v<T, VonMisesMixture>) {
                const double r = s.cut_radius;
                double f = 0.0;
                if (x >= -kPi + r && x < kPi - r) f += vmm_base_density(s, x);
                if (r > 0.0) {
                    if (x >= 0.0 && x < r) f += vmm_base_density(s, x - kPi);
                    if (x >= -r && x < 0.0) f += vmm_base_density(s, x + kPi);
                }
                out.continuous = f;
            } else if constexpr (std::is_same_v<T, PowerSmeary>) {
                const double a = std::fabs(x);
                if (a <= 0.5) {
                    out.continuous = power_smeary_bulk(s.order_r);
                } else if (a >= kPi - 1.0) {
                    out.continuous =
                        (1.0 - std::pow(kPi - a, s.order_r)) / kTwoPi;
                }
            } else if constexpr (std::is_same_v<T, LogSmeary>) {
                const LogSmearyShape sh = log_smeary_shape(s.order_r);
                const double a = std::fabs(x);
                if (a <= 0.5) {
                    out.continuous = sh.c_r;
                } else if (a >= kPi - 0.5) {
                    out.continuous =
                        std::max(1.0 - g_r_prime(s.order_r, kPi - a), 0.0) / kTwoPi;
                }
            } else if constexpr (std::is_same_v<T, PiecewiseAtom>) {
                const double u = kPi - std::fabs(x);  // arc distance from the antipode
                double prev = 0.0;
                for (std::size_t i = 0; i < s.t.size(); ++i) {
                    if (u >= prev && u < s.t[i]) {
                        out.continuous = s.w[i] / kTwoPi;
                        break;
                    }
                    prev = s.t[i];
                }
                out.atoms.push_back({Angle(0.0), piecewise_atom_mass(s)});
            } else if constexpr (std::is_same_v<T, EquatorAtoms>) {
                if (std::fabs(x) <= 0.5) out.continuous = 1.0 - 2.0 * s.weight_w;
                out.atoms.push_back({Angle(kPi / 2.0 + s.epsilon), s.weight_w});
                out.atoms.push_back({Angle(-(kPi / 2.0 + s.epsilon)), s.weight_w});
            } else if constexpr (std::is_same_v<T, UniformInterval>) {
                if (std::fabs(x) <= s.half_width) {
                    out.continuous = 0.5 / s.half_width;
                }
            }
        },
        spec);
    return out;
}

namespace {

double sample_von_mises(double kappa, Rng& rng) {
    if (kappa == 0.0) return rng.uniform(-kPi, kPi);
    // Envelope rejection against the uniform: accept x ~ U[-pi, pi) with
    // probability exp(kappa (cos x - 1)).
    while (true) {
        double x = rng.uniform(-kPi, kPi);
        double u = rng.uniform();
        if (u < std::exp(kappa * (std::cos(x) - 1.0))) return x;
    }
}

double sample_one(const VonMisesMixture& s, Rng& rng) {
    double x;
    if (rng.uniform() < s.beta) {
        x = sample_von_mises(s.kappa, rng);
    } else {
        x = wrap_radians(sample_von_mises(s.lambda, rng) + kPi);
    }
    if (s.cut_radius > 0.0) {
        return cut_mirror_map(s.cut_radius, Angle(x)).radians();
    }
    return x;
}

double sample_one(const PowerSmeary& s, Rng& rng) {
    const double r = s.order_r;
    const double bulk = power_smeary_bulk(r);  // equals the bulk mass
    double u = rng.uniform();
    if (u < bulk) return rng.uniform(-0.5, 0.5);
    double v = rng.uniform();
    double t = bisect_monotone(
        [&](double tt) {
            return (tt - std::pow(tt, r + 1.0) / (r + 1.0)) * (r + 1.0) / r;
        },
        0.0, 1.0, v);
    double x = kPi - t;
    return (rng.uniform() < 0.5) ? x : -x;
}

double sample_one(const LogSmeary& s, const LogSmearyShape& sh, Rng& rng) {
    double u = rng.uniform();
    if (u < sh.c_r) return rng.uniform(-0.5, 0.5);
    double v = rng.uniform() * sh.tail_raw;
    double t = bisect_monotone(
        [&](double tt) { return log_smeary_raw_cdf(s.order_r, sh, tt); }, 0.0,
        0.5, v);
    double x = kPi - t;
    return (rng.uniform() < 0.5) ? x : -x;
}

double sample_one(const PiecewiseAtom& s, Rng& rng) {
    double u = rng.uniform();
    double acc = piecewise_atom_mass(s);
    if (u < acc) return 0.0;
    double prev = 0.0;
    for (std::size_t i = 0; i < s.t.size(); ++i) {
        double band = s.w[i] * (s.t[i] - prev) / kPi;
        if (u < acc + band) {
            double tt = rng.uniform(prev, s.t[i]);
            double x = kPi - tt;
            return (rng.uniform() < 0.5) ? x : -x;
        }
        acc += band;
        prev = s.t[i];
    }
    // Rounding remainder: attribute to the atom.
    return 0.0;
}

double sample_one(const EquatorAtoms& s, Rng& rng) {
    double u = rng.uniform();
    if (u < s.weight_w) return kPi / 2.0 + s.epsilon;
    if (u < 2.0 * s.weight_w) return -(kPi / 2.0 + s.epsilon);
    return rng.uniform(-0.5, 0.5);
}

double sample_one(const UniformInterval& s, Rng& rng) {
    return rng.uniform(-s.half_width, s.half_width);
}

}  // namespace

CircleSample sample(const DistributionSpec& spec, std::size_t n, Rng& rng) {
    validate(spec);
    if (n < 1) throw std::invalid_argument("sample: n must be >= 1");
    CircleSample out;
    out.points.reserve(n);
    std::visit(
        [&](const auto& s) {
            using T = std::decay_t<decltype(s)>;
            if constexpr (std::is_same_v<T, LogSmeary>) {
                const LogSmearyShape sh = log_smeary_shape(s.order_r);
                for (std::size_t i = 0; i < n; ++i) {
                    out.points.push_back(Angle(sample_one(s, sh, rng)));
                }
            } else {
                for (std::size_t i = 0; i < n; ++i) {
                    out.points.push_back(Angle(sample_one(s, rng)));
                }
            }
        },
        spec);
    return out;
}

namespace {

std::vector<double> density_breakpoints(const DistributionSpec& spec) {
    std::vector<double> bp{-kPi, 0.0, kPi};
    std::visit(
        [&](const auto& s) {
            using T = std::decay_t<decltype(s)>;
            if constexpr (std::is_same_v<T, VonMisesMixture>) {
                if (s.cut_radius > 0.0) {
                    bp.insert(bp.end(), {-kPi + s.cut_radius, -s.cut_radius,
                                         s.cut_radius, kPi - s.cut_radius});
                }
            } else if constexpr (std::is_same_v<T, PowerSmeary>) {
                bp.insert(bp.end(), {-kPi + 1.0, -0.5, 0.5, kPi - 1.0});
            } else if constexpr (std::is_same_v<T, LogSmeary>) {
                bp.insert(bp.end(), {-kPi + 0.5, -0.5, 0.5, kPi - 0.5});
                const LogSmearyShape sh = log_smeary_shape(s.order_r);
                if (sh.clamped) {
                    bp.insert(bp.end(),
                              {-kPi + sh.t_a, -kPi + sh.t_b, kPi - sh.t_b,
                               kPi - sh.t_a});
                }
            } else if constexpr (std::is_same_v<T, PiecewiseAtom>) {
                for (double t : s.t) {
                    bp.insert(bp.end(), {-kPi + t, kPi - t});
                }
            } else if constexpr (std::is_same_v<T, EquatorAtoms>) {
                bp.insert(bp.end(), {-0.5, 0.5});
            } else if constexpr (std::is_same_v<T, UniformInterval>) {
                bp.insert(bp.end(), {-s.half_width, s.half_width});
            }
        },
        spec);
    std::sort(bp.begin(), bp.end());
    bp.erase(std::unique(bp.begin(), bp.end()), bp.end());
    return bp;
}

}  // namespace

TheoreticalMoments theoretical_moments(const DistributionSpec& spec) {
    validate(spec);
    TheoreticalMoments m;

    const std::vector<double> bp = density_breakpoints(spec);
    double sigma_sq = 0.0;
    for (std::size_t i = 0; i + 1 < bp.size(); ++i) {
        sigma_sq += numeric::integrate(
            [&](double x) {
                return x * x * density(spec, Angle(x)).continuous;
            },
            bp[i], bp[i + 1], 1e-12);
    }
    for (const AtomMass& a : density(spec, Angle(0.0)).atoms) {
        double d = std::fabs(a.location.radians());
        sigma_sq += a.mass * d * d;
    }
    m.sigma_sq = sigma_sq;

    std::visit(
        [&](const auto& s) {
            using T = std::decay_t<decltype(s)>;
            if constexpr (std::is_same_v<T, VonMisesMixture>) {
                m.antipodal_density =
                    s.cut_radius > 0.0 ? 0.0 : vmm_base_density(s, -kPi);
            } else if constexpr (std::is_same_v<T, PowerSmeary>) {
                m.antipodal_density = 1.0 / kTwoPi;
                m.regime = {RegimeKind::power_smeary, s.order_r};
            } else if constexpr (std::is_same_v<T, LogSmeary>) {
                m.antipodal_density = 1.0 / kTwoPi;
                m.regime = {RegimeKind::log_smeary, s.order_r};
            } else if constexpr (std::is_same_v<T, PiecewiseAtom>) {
                m.antipodal_density = s.w.empty() ? 0.0 : s.w.front() / kTwoPi;
            } else {
                m.antipodal_density = 0.0;
            }
        },
        spec);

    if (m.regime.kind == RegimeKind::nonsmeary) {
        double h = 1.0 - kTwoPi * m.antipodal_density;
        m.asymptotic_scaled_variance = m.sigma_sq / (h * h);
    }
    return m;
}

nlohmann::json spec_to_json(const DistributionSpec& spec) {
    nlohmann::json j;
    std::visit(
        [&](const auto& s) {
            using T = std::decay_t<decltype(s)>;
            if constexpr (std::is_same_v<T, VonMisesMixture>) {
                j = {{"family", "von_mises_mixture"},
                     {"kappa", s.kappa},
                     {"beta", s.beta},
                     {"lambda", s.lambda},
                     {"cut_radius", s.cut_radius}};
            } else if constexpr (std::is_same_v<T, PowerSmeary>) {
                j = {{"family", "power_smeary"}, {"order_r", s.order_r}};
            } else if constexpr (std::is_same_v<T, LogSmeary>) {
                j = {{"family", "log_smeary"}, {"order_r", s.order_r}};
            } else if constexpr (std::is_same_v<T, PiecewiseAtom>) {
                j = {{"family", "piecewise_atom"}, {"t", s.t}, {"w", s.w}};
            } else if constexpr (std::is_same_v<T, EquatorAtoms>) {
                j = {{"family", "equator_atoms"},
                     {"epsilon", s.epsilon},
                     {"weight_w", s.weight_w}};
            } else if constexpr (std::is_same_v<T, UniformInterval>) {
                j = {{"family", "uniform_interval"},
                     {"half_width", s.half_width}};
            }
        },
        spec);
    return j;
}

DistributionSpec spec_from_json(const nlohmann::json& j) {
    const std::string family = j.at("family").get<std::string>();
    DistributionSpec spec;
    if (family == "von_mises_mixture") {
        spec = VonMisesMixture{j.at("kappa").get<double>(), j.at("beta").get<double>(),
                               j.at("lambda").get<double>(),
                               j.value("cut_radius", 0.0)};
    } else if (family == "power_smeary") {
        spec = PowerSmeary{j.at("order_r").get<double>()};
    } else if (family == "log_smeary") {
        spec = LogSmeary{j.at("order_r").get<double>()};
    } else if (family == "piecewise_atom") {
        spec = PiecewiseAtom{j.at("t").get<std::vector<double>>(),
                             j.at("w").get<std::vector<double>>()};
    } else if (family == "equator_atoms") {
        spec = EquatorAtoms{j.at("epsilon").get<double>(),
                            j.at("weight_w").get<double>()};
    } else if (family == "uniform_interval") {
        spec = UniformInterval{j.at("half_width").get<double>()};
    } else {
        throw std::invalid_argument("spec_from_json: unknown family " + family);
    }
    validate(spec);
    return spec;
}

std::string spec_label(const DistributionSpec& spec) {
    std::ostringstream os;
    std::visit(
        [&](const auto& s) {
            using T = std::decay_t<decltype(s)>;
            if constexpr (std::is_same_v<T, VonMisesMixture>) {
                os << "vMm(kappa=" << s.kappa << ",beta=" << s.beta
                   << ",lambda=" << s.lambda << ",cut=" << s.cut_radius << ")";
            } else if constexpr (std::is_same_v<T, PowerSmeary>) {
                os << "power_smeary(r=" << s.order_r << ")";
            } else if constexpr (std::is_same_v<T, LogSmeary>) {
                os << "log_smeary(r=" << s.order_r << ")";
            } else if constexpr (std::is_same_v<T, PiecewiseAtom>) {
                os << "piecewise_atom(l=" << s.t.size() << ")";
            } else if constexpr (std::is_same_v<T, EquatorAtoms>) {
                os << "equator_atoms(eps=" << s.epsilon << ",w=" << s.weight_w << ")";
            } else if constexpr (std::is_same_v<T, UniformInterval>) {
                os << "uniform(hw=" << s.half_width << ")";
            }
        },
        spec);
    return os.str();
}

}  // namespace circfss
