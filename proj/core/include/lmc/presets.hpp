#pragma once

#include "lmc/chaos.hpp"
#include "lmc/config.hpp"
#include "lmc/experiments.hpp"
#include "lmc/malliavin.hpp"

#include <memory>
#include <string>
#include <vector>

namespace lmc {

struct PresetParam
{
    std::string name;
    std::string default_value; // config syntax, e.g. "1.5" or "[1, -0.9]"
};

struct PresetInfo
{
    std::string category;
    std::string name;
    std::string description;
    std::vector<PresetParam> params;
};

/// Every named preset, grouped by category and sorted by name.
std::vector<PresetInfo> preset_catalog();
std::vector<std::string> preset_names(std::string const& category);

// Each make_* reads the preset name at `key` (or `fallback` when the key is
// absent) and its parameters at `key.<param>`. Unknown names raise
// ConfigError at `key`.

LevyMeasure make_measure(Config const& cfg, std::string const& key, std::string const& fallback = "poisson");
/// Reads <prefix>.nu, .sigma, .gamma, .horizon; ν is left untruncated.
LevyTriplet make_triplet(Config const& cfg, std::string const& prefix = "triplet");
Kernel make_kernel(Config const& cfg, std::string const& key, std::string const& fallback = "time-power");
TestFunction make_test_function(Config const& cfg, std::string const& key,
                                std::string const& fallback = "linear");
WeightK make_weight(Config const& cfg, std::string const& key, std::string const& fallback = "constant");
LambdaSet make_lambda(Config const& cfg, std::string const& key, std::string const& fallback = "jumps");
JumpSet make_jump_set(Config const& cfg, std::string const& key, std::string const& fallback = "all");
/// Outer function f of F = f(M(h)) with its derivative.
std::pair<RealFn, RealFn> make_outer(Config const& cfg, std::string const& key,
                                     std::string const& fallback = "tanh");
SimplexIntegrand make_integrand(Config const& cfg, std::string const& key, std::size_t arity,
                                std::string const& fallback = "product-exp");

struct SdePreset
{
    AnySDE sde;
    Monotone direction = Monotone::increasing;
    // f increasing on (x0 − radius, x0 + radius) with |f′| ≤ lipschitz.
    double radius = 0.0;
    double lipschitz = 0.0;
};

SdePreset make_sde(Config const& cfg, std::string const& key, std::string const& fallback = "increasing-drift");

//---------------------------------------------------------------------------//
// Duality combinations (F, G, g, Λ, k) with their own triplet
//---------------------------------------------------------------------------//

struct DualityPreset
{
    std::string name;
    std::shared_ptr<LevyTriplet const> triplet;
    SmoothFunctional F;
    // Second functional for the product rule, when the preset has one.
    std::optional<SmoothFunctional> G;
    TestFunction g;
    LambdaSet lambda;
    WeightK k;
};

/// The six built-in combinations, in catalog order.
std::vector<std::string> duality_preset_names();
DualityPreset make_duality_preset(std::string const& name);
/// Combination assembled from config keys (triplet.*, duality.outer,
/// duality.kernel, duality.g, duality.lambda, duality.k).
DualityPreset make_custom_duality(Config const& cfg);

} // namespace lmc
