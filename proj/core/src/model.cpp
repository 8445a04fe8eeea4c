#include "chemoswitch/model.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <stdexcept>
#include <string>

namespace chemoswitch {

namespace {

std::string lowercase(std::string_view s) {
    std::string out(s);
    std::transform(out.begin(), out.end(), out.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return out;
}

void require_positive(double value, const char* name) {
    if (!(value > 0.0) || !std::isfinite(value)) {
        throw std::domain_error(std::string(name) + " must be positive and finite");
    }
}

// 1/(1+exp(-z)) and 1/(1+exp(z)) without overflow.
double logistic(double z) {
    if (z >= 0.0) {
        return 1.0 / (1.0 + std::exp(-z));
    }
    const double e = std::exp(z);
    return e / (1.0 + e);
}

} // namespace

std::string_view to_string(SwitchingCase c) {
    switch (c) {
    case SwitchingCase::NoSwitching: return "none";
    case SwitchingCase::A: return "A";
    case SwitchingCase::B1: return "B1";
    case SwitchingCase::B2: return "B2";
    case SwitchingCase::C1: return "C1";
    case SwitchingCase::C2: return "C2";
    }
    return "?";
}

std::string_view to_string(ModelVariant v) {
    return v == ModelVariant::MinimalKS ? "MinimalKS" : "TwoPhenotype";
}

SwitchingCase parse_switching_case(std::string_view name) {
    const std::string n = lowercase(name);
    if (n == "none" || n == "noswitching") return SwitchingCase::NoSwitching;
    if (n == "a") return SwitchingCase::A;
    if (n == "b1") return SwitchingCase::B1;
    if (n == "b2") return SwitchingCase::B2;
    if (n == "c1") return SwitchingCase::C1;
    if (n == "c2") return SwitchingCase::C2;
    throw std::invalid_argument("unknown switching case '" + std::string(name) + "'");
}

ModelVariant parse_model_variant(std::string_view name) {
    const std::string n = lowercase(name);
    if (n == "twophenotype") return ModelVariant::TwoPhenotype;
    if (n == "minimalks") return ModelVariant::MinimalKS;
    throw std::invalid_argument("unknown model variant '" + std::string(name) + "'");
}

void validate(const SwitchingSpec& spec) {
    if (spec.kind == SwitchingCase::NoSwitching) {
        return;
    }
    if (!(spec.mu > 0.0) || !std::isfinite(spec.mu)) {
        throw std::invalid_argument("switching mu must be positive");
    }
    if (!(spec.q > 0.0) || !std::isfinite(spec.q)) {
        throw std::invalid_argument("switching q must be positive");
    }
    if (!(spec.nbar_ref > 0.0 && spec.nbar_ref < 1.0)) {
        throw std::invalid_argument("nbar_ref must lie in (0, 1)");
    }
}

void validate(const ModelParams& params) {
    if (!(params.D > 0.0) || !std::isfinite(params.D)) {
        throw std::invalid_argument("D must be positive");
    }
    if (!(params.chi >= 0.0) || !std::isfinite(params.chi)) {
        throw std::invalid_argument("chi must be nonnegative");
    }
    if (params.variant == ModelVariant::TwoPhenotype) {
        validate(params.switching);
    }
}

double hill_fraction(double x, double theta, double q) {
    if (x <= 0.0) {
        return 0.0;
    }
    return logistic(q * (std::log(x) - std::log(theta)));
}

SwitchingRates switching_rates(const SwitchingSpec& spec, double rho, double s) {
    if (rho < 0.0 || s < 0.0 || std::isnan(rho) || std::isnan(s)) {
        throw std::domain_error("switching_rates: rho and s must be nonnegative");
    }
    const double mu = spec.mu;
    // Increasing and decreasing Hill branches share one denominator, so
    // up + down == 1 up to rounding.
    auto split = [&](double x, double theta) {
        if (x <= 0.0) {
            return std::pair{0.0, 1.0};
        }
        const double z = spec.q * (std::log(x) - std::log(theta));
        return std::pair{logistic(z), logistic(-z)};
    };
    switch (spec.kind) {
    case SwitchingCase::NoSwitching:
        return {};
    case SwitchingCase::A:
        return {mu, mu};
    case SwitchingCase::B1: {
        const auto [up, down] = split(rho, 1.0);
        return {mu * up, mu * down};
    }
    case SwitchingCase::B2: {
        const auto [up, down] = split(rho, 1.0);
        return {mu * down, mu * up};
    }
    case SwitchingCase::C1: {
        const auto [up, down] = split(s, spec.nbar_ref);
        return {mu * up, mu * down};
    }
    case SwitchingCase::C2: {
        const auto [up, down] = split(s, spec.nbar_ref);
        return {mu * down, mu * up};
    }
    }
    return {};
}

double kinetic_G(const SwitchingSpec& spec, double n0, double n1, double rho, double s) {
    const auto r = switching_rates(spec, rho, s);
    return -r.mu01 * n0 + r.mu10 * n1;
}

NondimResult nondimensionalize(const DimensionalParams& dim) {
    require_positive(dim.D_n, "D_n");
    require_positive(dim.D_s, "D_s");
    require_positive(dim.chi_1, "chi_1");
    require_positive(dim.alpha_0, "alpha_0");
    require_positive(dim.eta, "eta");
    require_positive(dim.sigma, "sigma");

    NondimResult out;
    out.D = dim.D_n / dim.D_s;
    out.chi = dim.chi_1 * dim.alpha_0 * dim.sigma / (dim.eta * dim.D_s);
    out.scales.T = 1.0 / dim.eta;
    out.scales.X = std::sqrt(dim.D_s / dim.eta);
    out.scales.N = dim.sigma;
    out.scales.S = dim.alpha_0 * dim.sigma / dim.eta;
    return out;
}

DimensionalParams redimensionalize(const NondimResult& nd) {
    const auto& sc = nd.scales;
    require_positive(sc.T, "T");
    require_positive(sc.X, "X");
    require_positive(sc.N, "N");
    require_positive(sc.S, "S");

    DimensionalParams dim;
    dim.eta = 1.0 / sc.T;
    dim.D_s = sc.X * sc.X / sc.T;
    dim.sigma = sc.N;
    dim.alpha_0 = sc.S / (sc.N * sc.T);
    dim.D_n = nd.D * dim.D_s;
    dim.chi_1 = nd.chi * dim.eta * dim.D_s / (dim.alpha_0 * dim.sigma);
    return dim;
}

ReactionTerms rhs_reaction(const ModelParams& params, double n0, double n1, double s) {
    if (params.variant == ModelVariant::MinimalKS) {
        return {0.0, 0.0, n0 - s};
    }
    // Accepted steps may undershoot zero by up to the absolute tolerance; the
    // rates are evaluated at the clamped values so the state itself is never
    // modified (which would break conservation).
    const double g = kinetic_G(params.switching, n0, n1, std::max(0.0, n0 + n1), std::max(0.0, s));
    return {g, -g, n0 - s};
}

} // namespace chemoswitch
