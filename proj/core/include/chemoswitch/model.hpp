#pragma once

/**
 * @file model.hpp
 * @brief Two-phenotype chemotaxis model: parameters, switching kinetics and
 *        the dimensional -> dimensionless map.
 *
 * The dimensionless system solved everywhere in this library is
 *
 *   dn0/dt = D lap(n0)                      - mu01(rho,s) n0 + mu10(rho,s) n1
 *   dn1/dt = D lap(n1) - chi div(n1 grad s) + mu01(rho,s) n0 - mu10(rho,s) n1
 *   ds/dt  =   lap(s)  + n0 - s,            rho = n0 + n1
 *
 * with zero-flux boundaries. Phenotype 0 secretes attractant, phenotype 1
 * performs chemotaxis. The minimal Keller-Segel variant keeps a single
 * population (stored in n0) that both secretes and climbs the gradient.
 */

#include <string>
#include <string_view>

namespace chemoswitch {

enum class SwitchingCase { NoSwitching, A, B1, B2, C1, C2 };
enum class ModelVariant { TwoPhenotype, MinimalKS };

std::string_view to_string(SwitchingCase c);
std::string_view to_string(ModelVariant v);
/// Throws std::invalid_argument for unknown names. Accepts "B1"/"b1"/"none" etc.
SwitchingCase parse_switching_case(std::string_view name);
ModelVariant parse_model_variant(std::string_view name);

/**
 * Switching-function family plus its parameters.
 *
 * mu is the maximum switching rate and q the Hill steepness. nbar_ref is the
 * Hill midpoint of the attractant-dependent cases (C1, C2).
 *
 * The dimensional rates gamma = Gamma * gamma_hat enter only through
 * mu = Gamma / eta * gamma_hat; Gamma is never modelled separately.
 */
struct SwitchingSpec {
    SwitchingCase kind = SwitchingCase::A;
    double mu = 1.0;
    double q = 1.0;
    double nbar_ref = 0.5;
};

struct SwitchingRates {
    double mu01 = 0.0; ///< rate 0 -> 1 (secreting -> chemotactic)
    double mu10 = 0.0; ///< rate 1 -> 0
};

struct ModelParams {
    double D = 1.0;
    double chi = 10.0;
    SwitchingSpec switching{};
    ModelVariant variant = ModelVariant::TwoPhenotype;
};

struct DimensionalParams {
    double D_n = 1.0;     ///< cell random motility
    double D_s = 1.0;     ///< attractant diffusivity
    double chi_1 = 1.0;   ///< chemotactic coefficient
    double alpha_0 = 1.0; ///< attractant production per secreting cell
    double eta = 1.0;     ///< attractant decay rate
    double sigma = 1.0;   ///< mean initial total cell density
};

struct NondimScales {
    double X = 1.0; ///< length
    double T = 1.0; ///< time
    double S = 1.0; ///< attractant concentration
    double N = 1.0; ///< cell density
};

struct NondimResult {
    double D = 1.0;
    double chi = 1.0;
    NondimScales scales{};
};

/// Reaction part of the right-hand side (transport is handled by solvers).
struct ReactionTerms {
    double dn0 = 0.0;
    double dn1 = 0.0;
    double ds = 0.0;
};

/// Throws std::invalid_argument when the spec violates mu > 0, q > 0,
/// nbar_ref in (0,1) for an active switching case.
void validate(const SwitchingSpec& spec);
/// Throws std::invalid_argument when D <= 0 or chi < 0 (plus switching checks
/// for the two-phenotype variant).
void validate(const ModelParams& params);

/// Hill fraction x^q / (theta^q + x^q), evaluated as 1/(1+exp(-q ln(x/theta)))
/// so that q = 30 does not overflow. x = 0 maps to 0 exactly.
double hill_fraction(double x, double theta, double q);

/// Switching rates of Table-style cases A/B1/B2/C1/C2. Throws std::domain_error
/// for negative rho or s.
SwitchingRates switching_rates(const SwitchingSpec& spec, double rho, double s);

/// G(n0, n1, rho, s) = -mu01(rho,s) n0 + mu10(rho,s) n1. rho is an independent
/// argument; callers normally pass rho = n0 + n1.
double kinetic_G(const SwitchingSpec& spec, double n0, double n1, double rho, double s);

/// D = D_n/D_s, chi = chi_1 alpha_0 sigma / (eta D_s) and the scale factors
/// T = 1/eta, X = sqrt(D_s/eta), N = sigma, S = alpha_0 N / eta.
/// Throws std::domain_error for nonpositive inputs.
NondimResult nondimensionalize(const DimensionalParams& dim);

/// Inverse of nondimensionalize.
DimensionalParams redimensionalize(const NondimResult& nd);

ReactionTerms rhs_reaction(const ModelParams& params, double n0, double n1, double s);

} // namespace chemoswitch
