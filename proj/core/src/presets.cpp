#include "lmc/presets.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <numbers>

namespace lmc {

namespace {

class Params
{
  public:
    Params(Config const& cfg, std::string key, std::vector<PresetParam> const& decls)
        : cfg_(cfg), key_(std::move(key)), decls_(decls)
    {
    }

    std::string field(std::string const& name) const { return key_ + "." + name; }

    double num(std::string const& name) const
    {
        auto const full = field(name);
        if (cfg_.has(full)) {
            return cfg_.get_double(full);
        }
        return parse_double(decl(name).default_value, full);
    }

    double positive(std::string const& name) const
    {
        double const v = num(name);
        if (!(v > 0.0)) {
            throw ConfigError(field(name), "must be positive");
        }
        return v;
    }

    bool flag(std::string const& name) const
    {
        double const v = num(name);
        if (v != 0.0 && v != 1.0) {
            throw ConfigError(field(name), "must be 0 or 1");
        }
        return v == 1.0;
    }

    std::vector<double> nums(std::string const& name) const
    {
        auto const full = field(name);
        if (cfg_.has(full)) {
            return cfg_.get_doubles(full, {});
        }
        return Config::parse("v = " + decl(name).default_value).get_doubles("v", {});
    }

  private:
    PresetParam const& decl(std::string const& name) const
    {
        auto it = std::find_if(decls_.begin(), decls_.end(), [&](auto const& p) { return p.name == name; });
        if (it == decls_.end()) {
            throw std::logic_error("preset parameter '" + name + "' is not declared");
        }
        return *it;
    }

    Config const& cfg_;
    std::string key_;
    std::vector<PresetParam> const& decls_;
};

template<class T>
struct Entry
{
    std::string description;
    std::vector<PresetParam> params;
    std::function<T(Params const&)> build;
};

template<class T>
using Registry = std::map<std::string, Entry<T>>;

template<class T>
T build(Registry<T> const& reg, Config const& cfg, std::string const& key, std::string const& fallback,
        std::string const& category)
{
    auto const name = cfg.get_string(key, fallback);
    auto it = reg.find(name);
    if (it == reg.end()) {
        throw ConfigError(key, "unknown " + category + " preset '" + name + "'");
    }
    try {
        return it->second.build(Params(cfg, key, it->second.params));
    } catch (ConfigError const&) {
        throw;
    } catch (std::invalid_argument const& e) {
        throw ConfigError(key, e.what());
    }
}

double sech2(double z)
{
    double const c = std::cosh(z);
    return 1.0 / (c * c);
}

//---------------------------------------------------------------------------//
// Registries
//---------------------------------------------------------------------------//

Registry<LevyMeasure> const& measures()
{
    static Registry<LevyMeasure> const reg{
        {"none", {"zero measure (no jumps)", {}, [](Params const&) { return LevyMeasure::zero(); }}},
        {"poisson",
         {"rate·δ_size",
          {{"rate", "1"}, {"size", "1"}},
          [](Params const& p) {
              double const size = p.num("size");
              if (size == 0.0) {
                  throw ConfigError(p.field("size"), "must be nonzero");
              }
              return LevyMeasure(DiscreteMeasure{{{size, p.positive("rate")}}});
          }}},
        {"compound-two-atom",
         {"scale·(δ₁ + δ₋₂)",
          {{"scale", "1"}},
          [](Params const& p) {
              double const s = p.positive("scale");
              return LevyMeasure(DiscreteMeasure{{{1.0, s}, {-2.0, s}}});
          }}},
        {"atoms",
         {"Σ masses_i δ_{sizes_i}",
          {{"sizes", "[1, -0.9]"}, {"masses", "[1, 1]"}},
          [](Params const& p) {
              auto const sizes = p.nums("sizes");
              auto const masses = p.nums("masses");
              if (sizes.size() != masses.size() || sizes.empty()) {
                  throw ConfigError(p.field("masses"), "needs one mass per size");
              }
              DiscreteMeasure d;
              for (std::size_t i = 0; i < sizes.size(); ++i) {
                  d.atoms.push_back({sizes[i], masses[i]});
              }
              return LevyMeasure(d);
          }}},
        {"finite-density",
         {"total mass `rate`, density ∝ exp(−|x|/scale) on lo ≤ |x| ≤ cap",
          {{"rate", "2"}, {"scale", "1"}, {"lo", "0.1"}, {"cap", "8"}},
          [](Params const& p) {
              double const rate = p.positive("rate");
              double const b = p.positive("scale");
              double const lo = p.positive("lo");
              double const cap = p.num("cap");
              if (!(cap > lo)) {
                  throw ConfigError(p.field("cap"), "must exceed lo");
              }
              double const side = b * (std::exp(-lo / b) - std::exp(-cap / b));
              double const c = rate / (2.0 * side);
              DensityMeasure d;
              d.density = [c, b](double x) { return c * std::exp(-std::abs(x) / b); };
              d.support = {Interval::closed(-cap, -lo), Interval::closed(lo, cap)};
              return LevyMeasure(d);
          }}},
        {"gamma-like",
         {"infinite activity a·exp(−b x)/x on (0, cap]",
          {{"a", "1"}, {"b", "1"}, {"cap", "10"}},
          [](Params const& p) {
              double const a = p.positive("a");
              double const b = p.positive("b");
              TruncatableMeasure t;
              t.family = "gamma-like";
              t.density = [a, b](double x) { return a * std::exp(-b * x) / x; };
              t.support = {Interval{0.0, p.positive("cap"), false, true}};
              return LevyMeasure(t);
          }}},
        {"symmetric-gamma-like",
         {"infinite activity a·exp(−b|x|)/|x| on 0 < |x| ≤ cap",
          {{"a", "1"}, {"b", "1"}, {"cap", "10"}},
          [](Params const& p) {
              double const a = p.positive("a");
              double const b = p.positive("b");
              double const cap = p.positive("cap");
              TruncatableMeasure t;
              t.family = "symmetric-gamma-like";
              t.density = [a, b](double x) { return a * std::exp(-b * std::abs(x)) / std::abs(x); };
              t.support = {Interval{-cap, 0.0, true, false}, Interval{0.0, cap, false, true}};
              return LevyMeasure(t);
          }}},
    };
    return reg;
}

Registry<Kernel> const& kernels()
{
    static Registry<Kernel> const reg{
        {"time-power",
         {"c·t^a (a = 0 or a ≥ 1)",
          {{"c", "1"}, {"a", "1"}},
          [](Params const& p) {
              double const c = p.num("c");
              double const a = p.num("a");
              if (!(a == 0.0 || a >= 1.0)) {
                  throw ConfigError(p.field("a"), "must be 0 or at least 1");
              }
              Kernel h;
              h.value = [c, a](double t, double) { return a == 0.0 ? c : c * std::pow(t, a); };
              h.dt = [c, a](double t, double) { return a == 0.0 ? 0.0 : c * a * std::pow(t, a - 1.0); };
              h.name = "time-power";
              return h;
          }}},
        {"time-space",
         {"c·t·x",
          {{"c", "1"}},
          [](Params const& p) {
              double const c = p.num("c");
              Kernel h;
              h.value = [c](double t, double x) { return c * t * x; };
              h.dt = [c](double, double x) { return c * x; };
              h.name = "time-space";
              return h;
          }}},
        {"sine-rational",
         {"c·sin(ωt)/(1 + x²)",
          {{"c", "1"}, {"omega", "1"}},
          [](Params const& p) {
              double const c = p.num("c");
              double const w = p.num("omega");
              Kernel h;
              h.value = [c, w](double t, double x) { return c * std::sin(w * t) / (1.0 + x * x); };
              h.dt = [c, w](double t, double x) { return c * w * std::cos(w * t) / (1.0 + x * x); };
              h.name = "sine-rational";
              return h;
          }}},
        {"exp-decay",
         {"c·exp(−rate·t)",
          {{"c", "1"}, {"rate", "1"}},
          [](Params const& p) {
              double const c = p.num("c");
              double const r = p.num("rate");
              Kernel h;
              h.value = [c, r](double t, double) { return c * std::exp(-r * t); };
              h.dt = [c, r](double t, double) { return -r * c * std::exp(-r * t); };
              h.name = "exp-decay";
              return h;
          }}},
    };
    return reg;
}

Registry<TestFunction> const& test_functions()
{
    static Registry<TestFunction> const reg{
        {"constant",
         {"g(t) = c",
          {{"c", "1"}},
          [](Params const& p) {
              double const c = p.num("c");
              return TestFunction{[c](double) { return c; }, [c](double t) { return c * t; }, "constant"};
          }}},
        {"linear",
         {"g(t) = c·t",
          {{"c", "1"}},
          [](Params const& p) {
              double const c = p.num("c");
              return TestFunction{[c](double t) { return c * t; }, [c](double t) { return 0.5 * c * t * t; },
                                  "linear"};
          }}},
        {"sine",
         {"g(t) = sin(ωt)",
          {{"omega", "3.141592653589793"}},
          [](Params const& p) {
              double const w = p.positive("omega");
              return TestFunction{[w](double t) { return std::sin(w * t); },
                                  [w](double t) { return (1.0 - std::cos(w * t)) / w; }, "sine"};
          }}},
        {"indicator",
         {"g = 1 on [a, b]",
          {{"a", "0.25"}, {"b", "0.75"}},
          [](Params const& p) {
              double const a = p.num("a");
              double const b = p.num("b");
              if (!(b > a)) {
                  throw ConfigError(p.field("b"), "must exceed a");
              }
              return TestFunction{[a, b](double t) { return t >= a && t <= b ? 1.0 : 0.0; },
                                  [a, b](double t) { return std::clamp(t, a, b) - a; }, "indicator"};
          }}},
    };
    return reg;
}

Registry<WeightK> const& weights()
{
    static Registry<WeightK> const reg{
        {"constant", {"k = c", {{"c", "1"}}, [](Params const& p) { return constant_weight(p.num("c")); }}},
        {"cos-rational",
         {"k = c·cos(t)/(1 + x²)",
          {{"c", "1"}},
          [](Params const& p) {
              double const c = p.num("c");
              WeightK k;
              k.k = [c](double t, double x) { return c * std::cos(t) / (1.0 + x * x); };
              k.dt = [c](double t, double x) { return -c * std::sin(t) / (1.0 + x * x); };
              k.sup_bound = std::abs(c);
              k.name = "cos-rational";
              return k;
          }}},
        {"sine-squared",
         {"k = c·sin²(ωt)",
          {{"c", "1"}, {"omega", "3.141592653589793"}},
          [](Params const& p) {
              double const c = p.num("c");
              double const w = p.num("omega");
              WeightK k;
              k.k = [c, w](double t, double) { return c * std::sin(w * t) * std::sin(w * t); };
              k.dt = [c, w](double t, double) { return c * w * std::sin(2.0 * w * t); };
              k.sup_bound = std::abs(c);
              k.name = "sine-squared";
              return k;
          }}},
    };
    return reg;
}

Registry<JumpSet> const& jump_sets()
{
    static Registry<JumpSet> const reg{
        {"all", {"ℝ \\ {0}", {}, [](Params const&) { return JumpSet::all_nonzero(); }}},
        {"none", {"empty set", {}, [](Params const&) { return JumpSet{}; }}},
        {"band",
         {"lo < |x| < hi",
          {{"lo", "0.5"}, {"hi", "10"}},
          [](Params const& p) { return JumpSet::symmetric_band(p.positive("lo"), p.positive("hi")); }}},
        {"above",
         {"x > a (a ≥ 0)",
          {{"a", "0"}},
          [](Params const& p) {
              double const a = p.num("a");
              if (a < 0.0) {
                  throw ConfigError(p.field("a"), "must be non-negative");
              }
              return JumpSet{Interval::open(a, kInfinity)};
          }}},
        {"interval",
         {"lo ≤ x ≤ hi, not containing 0",
          {{"lo", "0.5"}, {"hi", "2"}},
          [](Params const& p) {
              double const lo = p.num("lo");
              double const hi = p.num("hi");
              if (!(hi >= lo) || (lo <= 0.0 && hi >= 0.0)) {
                  throw ConfigError(p.field("hi"), "interval must be non-empty and exclude 0");
              }
              return JumpSet{Interval::closed(lo, hi)};
          }}},
        {"point",
         {"{x}",
          {{"x", "1"}},
          [](Params const& p) {
              double const x = p.num("x");
              if (x == 0.0) {
                  throw ConfigError(p.field("x"), "must be nonzero");
              }
              return JumpSet::point(x);
          }}},
    };
    return reg;
}

Registry<std::pair<RealFn, RealFn>> const& outers()
{
    using P = std::pair<RealFn, RealFn>;
    static Registry<P> const reg{
        {"tanh",
         {"tanh(u)", {}, [](Params const&) {
              return P{[](double u) { return std::tanh(u); }, [](double u) { return sech2(u); }};
          }}},
        {"sin",
         {"sin(u)", {}, [](Params const&) {
              return P{[](double u) { return std::sin(u); }, [](double u) { return std::cos(u); }};
          }}},
        {"cos",
         {"cos(u)", {}, [](Params const&) {
              return P{[](double u) { return std::cos(u); }, [](double u) { return -std::sin(u); }};
          }}},
        {"arctan",
         {"arctan(u)", {}, [](Params const&) {
              return P{[](double u) { return std::atan(u); }, [](double u) { return 1.0 / (1.0 + u * u); }};
          }}},
        {"gaussian",
         {"exp(−u²/2)", {}, [](Params const&) {
              return P{[](double u) { return std::exp(-0.5 * u * u); },
                       [](double u) { return -u * std::exp(-0.5 * u * u); }};
          }}},
    };
    return reg;
}

using IntegrandFactory = std::function<SimplexIntegrand(std::size_t)>;

Registry<IntegrandFactory> const& integrands()
{
    static Registry<IntegrandFactory> const reg{
        {"product-exp",
         {"Π exp(−rate·tᵢ)·xᵢ",
          {{"rate", "1"}},
          [](Params const& p) -> IntegrandFactory {
              double const r = p.num("rate");
              Kernel psi;
              psi.value = [r](double t, double x) { return std::exp(-r * t) * x; };
              psi.dt = [r](double t, double x) { return -r * std::exp(-r * t) * x; };
              psi.name = "exp-size";
              return [psi](std::size_t n) { return product_integrand(psi, n); };
          }}},
        {"product-constant",
         {"Π c",
          {{"c", "1"}},
          [](Params const& p) -> IntegrandFactory {
              Kernel psi = time_independent_kernel([c = p.num("c")](double) { return c; }, "constant");
              return [psi](std::size_t n) { return product_integrand(psi, n); };
          }}},
        {"ordered-poly",
         {"Π (1 + i·tᵢ)·xᵢ, simplex only",
          {},
          [](Params const&) -> IntegrandFactory {
              return [](std::size_t n) {
                  SimplexIntegrand phi;
                  phi.arity = n;
                  phi.off_simplex = OffSimplex::reject;
                  phi.name = "ordered-poly";
                  phi.eval = [](Tuple z) {
                      double v = 1.0;
                      for (std::size_t i = 0; i < z.size(); ++i) {
                          v *= (1.0 + static_cast<double>(i + 1) * z[i].time) * z[i].size;
                      }
                      return v;
                  };
                  phi.dt_eval = [](Tuple z, std::size_t slot) {
                      double v = 1.0;
                      for (std::size_t i = 0; i < z.size(); ++i) {
                          double const w = static_cast<double>(i + 1);
                          v *= (i == slot ? w : 1.0 + w * z[i].time) * z[i].size;
                      }
                      return v;
                  };
                  return phi;
              };
          }}},
        {"sine-sum",
         {"sin(Σ tᵢ)·Π xᵢ, symmetric",
          {},
          [](Params const&) -> IntegrandFactory {
              return [](std::size_t n) {
                  SimplexIntegrand phi;
                  phi.arity = n;
                  phi.off_simplex = OffSimplex::native;
                  phi.name = "sine-sum";
                  auto parts = [](Tuple z) {
                      double s = 0.0;
                      double prod = 1.0;
                      for (auto const& j : z) {
                          s += j.time;
                          prod *= j.size;
                      }
                      return std::pair{s, prod};
                  };
                  phi.eval = [parts](Tuple z) {
                      auto const [s, prod] = parts(z);
                      return std::sin(s) * prod;
                  };
                  phi.dt_eval = [parts](Tuple z, std::size_t) {
                      auto const [s, prod] = parts(z);
                      return std::cos(s) * prod;
                  };
                  return phi;
              };
          }}},
    };
    return reg;
}

Registry<SdePreset> const& sdes()
{
    static Registry<SdePreset> const reg{
        {"increasing-drift",
         {"additive: f(z) = a·z + tanh z, h(y) = y",
          {{"a", "1"}, {"x0", "0"}},
          [](Params const& p) {
              double const a = p.num("a");
              if (a < 0.0) {
                  throw ConfigError(p.field("a"), "must be non-negative for an increasing drift");
              }
              SdePreset s;
              s.sde.kind = SdeKind::additive;
              s.sde.additive = {[a](double z) { return a * z + std::tanh(z); },
                                [a](double z) { return a + sech2(z); }, [](double y) { return y; }, p.num("x0"),
                                "increasing-drift"};
              s.direction = Monotone::increasing;
              s.lipschitz = a + 1.0;
              return s;
          }}},
        {"decreasing-drift",
         {"additive: f(z) = −(a·z + tanh z), h(y) = y",
          {{"a", "1"}, {"x0", "0"}},
          [](Params const& p) {
              double const a = p.num("a");
              if (a < 0.0) {
                  throw ConfigError(p.field("a"), "must be non-negative for a decreasing drift");
              }
              SdePreset s;
              s.sde.kind = SdeKind::additive;
              s.sde.additive = {[a](double z) { return -(a * z + std::tanh(z)); },
                                [a](double z) { return -(a + sech2(z)); }, [](double y) { return y; },
                                p.num("x0"), "decreasing-drift"};
              s.direction = Monotone::decreasing;
              s.lipschitz = a + 1.0;
              return s;
          }}},
        {"local-hump",
         {"additive: f(z) = (z − x0)·exp(−(z − x0)²/2), increasing on |z − x0| < 1",
          {{"x0", "0"}},
          [](Params const& p) {
              double const c = p.num("x0");
              SdePreset s;
              s.sde.kind = SdeKind::additive;
              s.sde.additive = {[c](double z) { return (z - c) * std::exp(-0.5 * (z - c) * (z - c)); },
                                [c](double z) { return (1.0 - (z - c) * (z - c)) * std::exp(-0.5 * (z - c) * (z - c)); },
                                [](double y) { return y; }, c, "local-hump"};
              s.direction = Monotone::increasing;
              s.radius = 1.0;
              s.lipschitz = 1.0;
              return s;
          }}},
        {"wronskian-pair",
         {"multiplicative: f = cos, g = sin (W(g,f) = 1), h(y) = y",
          {{"x0", "0"}, {"h_sup", "1"}, {"x_lo", "-10"}, {"x_hi", "10"}},
          [](Params const& p) {
              SdePreset s;
              s.sde.kind = SdeKind::multiplicative;
              auto& m = s.sde.multiplicative;
              m.f = [](double z) { return std::cos(z); };
              m.df = [](double z) { return -std::sin(z); };
              m.d2f = [](double z) { return -std::cos(z); };
              m.g = [](double z) { return std::sin(z); };
              m.dg = [](double z) { return std::cos(z); };
              m.h = [](double y) { return y; };
              m.x0 = p.num("x0");
              m.f2_sup = 1.0;
              m.g_sup = 1.0;
              m.h_sup = p.positive("h_sup");
              m.x_lo = p.num("x_lo");
              m.x_hi = p.num("x_hi");
              if (!(m.x_hi > m.x_lo)) {
                  throw ConfigError(p.field("x_hi"), "must exceed x_lo");
              }
              m.name = "wronskian-pair";
              s.lipschitz = 1.0;
              return s;
          }}},
        {"unit-g",
         {"multiplicative with g ≡ 1: f(z) = a·z + tanh z, h(y) = y",
          {{"a", "1"}, {"x0", "0"}, {"h_sup", "2"}},
          [](Params const& p) {
              double const a = p.num("a");
              SdePreset s;
              s.sde.kind = SdeKind::multiplicative;
              auto& m = s.sde.multiplicative;
              m.f = [a](double z) { return a * z + std::tanh(z); };
              m.df = [a](double z) { return a + sech2(z); };
              m.d2f = [](double z) { return -2.0 * std::tanh(z) * sech2(z); };
              m.g = [](double) { return 1.0; };
              m.dg = [](double) { return 0.0; };
              m.h = [](double y) { return y; };
              m.x0 = p.num("x0");
              m.f2_sup = 4.0 / (3.0 * std::sqrt(3.0));
              m.g_sup = 1.0;
              m.h_sup = p.positive("h_sup");
              m.name = "unit-g";
              s.lipschitz = a + 1.0;
              return s;
          }}},
        {"gbm-jump",
         {"diffusion: b = mu·z, σ(z) = vol·z, jumps add jump·y",
          {{"mu", "0.05"}, {"vol", "0.3"}, {"x0", "1"}, {"jump", "0.1"}},
          [](Params const& p) {
              double const mu = p.num("mu");
              double const vol = p.num("vol");
              double const jump = p.num("jump");
              SdePreset s;
              s.sde.kind = SdeKind::diffusion;
              s.sde.diffusion = {[mu](double z) { return mu * z; }, [mu](double) { return mu; },
                                 [vol](double z) { return vol * z; }, [vol](double) { return vol; },
                                 [jump](double) { return jump; }, p.num("x0"), "gbm-jump"};
              return s;
          }}},
        {"degenerate-start",
         {"diffusion: b = 0, σ(z) = vol·z from x0 = 0, so S is the first jump time",
          {{"vol", "0.5"}, {"jump", "1"}},
          [](Params const& p) {
              double const vol = p.num("vol");
              double const jump = p.num("jump");
              SdePreset s;
              s.sde.kind = SdeKind::diffusion;
              s.sde.diffusion = {[](double) { return 0.0; }, [](double) { return 0.0; },
                                 [vol](double z) { return vol * z; }, [vol](double) { return vol; },
                                 [jump](double) { return jump; }, 0.0, "degenerate-start"};
              return s;
          }}},
    };
    return reg;
}

Registry<LambdaSet> const& lambdas()
{
    static Registry<LambdaSet> const reg{
        {"all", {"{0} ∪ ℝ₀", {}, [](Params const&) { return LambdaSet::all(); }}},
        {"jumps", {"ℝ₀", {}, [](Params const&) { return LambdaSet::jumps_only(); }}},
        {"gaussian", {"{0}", {}, [](Params const&) { return LambdaSet::gaussian_only(); }}},
        {"above",
         {"x > a, plus 0 when zero = 1",
          {{"a", "0.5"}, {"zero", "0"}},
          [](Params const& p) {
              double const a = p.num("a");
              if (a < 0.0) {
                  throw ConfigError(p.field("a"), "must be non-negative");
              }
              return LambdaSet{p.flag("zero"), JumpSet{Interval::open(a, kInfinity)}};
          }}},
        {"band",
         {"lo < |x| < hi, plus 0 when zero = 1",
          {{"lo", "0.5"}, {"hi", "10"}, {"zero", "0"}},
          [](Params const& p) {
              return LambdaSet{p.flag("zero"), JumpSet::symmetric_band(p.positive("lo"), p.positive("hi"))};
          }}},
        {"point",
         {"{x}",
          {{"x", "1"}},
          [](Params const& p) {
              double const x = p.num("x");
              if (x == 0.0) {
                  throw ConfigError(p.field("x"), "must be nonzero; use 'gaussian' for {0}");
              }
              return LambdaSet{false, JumpSet::point(x)};
          }}},
    };
    return reg;
}

template<class T>
void add_catalog(std::vector<PresetInfo>& out, std::string const& category, Registry<T> const& reg)
{
    for (auto const& [name, e] : reg) {
        out.push_back({category, name, e.description, e.params});
    }
}

// Built-in duality combinations, written as config text.
std::vector<std::pair<std::string, std::string>> const& duality_sources()
{
    static std::vector<std::pair<std::string, std::string>> const src{
        {"poisson-tanh", R"(triplet.nu = poisson
triplet.nu.rate = 3
duality.outer = tanh
duality.kernel = time-space
duality.g = linear
duality.lambda = jumps
duality.k = constant
duality.G.outer = sin
duality.G.kernel = time-power
)"},
        {"carlen-pardoux", R"(triplet.nu = poisson
triplet.nu.rate = 2
duality.outer = sin
duality.kernel = time-power
duality.kernel.a = 2
duality.g = indicator
duality.lambda = point
duality.lambda.x = 1
duality.k = constant
duality.k.c = 2
)"},
        {"two-atom-time-weight", R"(triplet.nu = atoms
triplet.nu.sizes = [1, -0.5]
triplet.nu.masses = [1, 2]
duality.outer = tanh-times-cos
duality.kernel = time-power
duality.kernel2 = sine-rational
duality.g = sine
duality.lambda = jumps
duality.k = cos-rational
duality.G.outer = arctan
duality.G.kernel = time-space
)"},
        {"finite-density-local", R"(triplet.nu = finite-density
duality.outer = arctan
duality.kernel = time-power
duality.g = sine
duality.lambda = above
duality.lambda.a = 0.5
duality.k = sine-squared
)"},
        {"brownian-jumps", R"(triplet.nu = poisson
triplet.nu.rate = 2
triplet.sigma = 0.7
duality.outer = tanh
duality.kernel = sine-rational
duality.g = linear
duality.lambda = all
duality.k = constant
)"},
        {"gaussian-only", R"(triplet.nu = none
triplet.sigma = 1.3
duality.outer = sin
duality.kernel = time-power
duality.g = sine
duality.lambda = gaussian
duality.k = constant
)"},
    };
    return src;
}

} // namespace

//---------------------------------------------------------------------------//

std::vector<PresetInfo> preset_catalog()
{
    std::vector<PresetInfo> out;
    add_catalog(out, "measure", measures());
    add_catalog(out, "kernel", kernels());
    add_catalog(out, "test-function", test_functions());
    add_catalog(out, "weight", weights());
    add_catalog(out, "lambda", lambdas());
    add_catalog(out, "jump-set", jump_sets());
    add_catalog(out, "outer", outers());
    out.push_back({"outer", "tanh-times-cos", "tanh(u)·cos(v), two kernels (duality only)", {}});
    add_catalog(out, "integrand", integrands());
    add_catalog(out, "sde", sdes());
    for (auto const& [name, text] : duality_sources()) {
        out.push_back({"duality", name, "built-in (F, g, Λ, k) combination", {}});
    }
    return out;
}

std::vector<std::string> preset_names(std::string const& category)
{
    std::vector<std::string> out;
    for (auto const& p : preset_catalog()) {
        if (p.category == category) {
            out.push_back(p.name);
        }
    }
    return out;
}

LevyMeasure make_measure(Config const& cfg, std::string const& key, std::string const& fallback)
{
    return build(measures(), cfg, key, fallback, "measure");
}

LevyTriplet make_triplet(Config const& cfg, std::string const& prefix)
{
    LevyTriplet t;
    t.nu = make_measure(cfg, prefix + ".nu");
    t.sigma = cfg.get_double(prefix + ".sigma", 0.0);
    t.gamma = cfg.get_double(prefix + ".gamma", 0.0);
    t.horizon = cfg.get_double(prefix + ".horizon", 1.0);
    if (t.sigma < 0.0) {
        throw ConfigError(prefix + ".sigma", "must be non-negative");
    }
    if (!(t.horizon > 0.0)) {
        throw ConfigError(prefix + ".horizon", "must be positive");
    }
    try {
        t.validate();
    } catch (std::invalid_argument const& e) {
        throw ConfigError(prefix, e.what());
    }
    return t;
}

Kernel make_kernel(Config const& cfg, std::string const& key, std::string const& fallback)
{
    return build(kernels(), cfg, key, fallback, "kernel");
}

TestFunction make_test_function(Config const& cfg, std::string const& key, std::string const& fallback)
{
    return build(test_functions(), cfg, key, fallback, "test-function");
}

WeightK make_weight(Config const& cfg, std::string const& key, std::string const& fallback)
{
    return build(weights(), cfg, key, fallback, "weight");
}

LambdaSet make_lambda(Config const& cfg, std::string const& key, std::string const& fallback)
{
    return build(lambdas(), cfg, key, fallback, "lambda");
}

JumpSet make_jump_set(Config const& cfg, std::string const& key, std::string const& fallback)
{
    return build(jump_sets(), cfg, key, fallback, "jump-set");
}

std::pair<RealFn, RealFn> make_outer(Config const& cfg, std::string const& key, std::string const& fallback)
{
    return build(outers(), cfg, key, fallback, "outer");
}

SimplexIntegrand make_integrand(Config const& cfg, std::string const& key, std::size_t arity,
                                std::string const& fallback)
{
    if (arity == 0) {
        throw ConfigError(key, "integrand arity must be at least 1");
    }
    return build(integrands(), cfg, key, fallback, "integrand")(arity);
}

SdePreset make_sde(Config const& cfg, std::string const& key, std::string const& fallback)
{
    return build(sdes(), cfg, key, fallback, "sde");
}

std::vector<std::string> duality_preset_names()
{
    std::vector<std::string> out;
    for (auto const& [name, text] : duality_sources()) {
        out.push_back(name);
    }
    return out;
}

DualityPreset make_duality_preset(std::string const& name)
{
    for (auto const& [n, text] : duality_sources()) {
        if (n == name) {
            auto const cfg = Config::parse(text);
            auto preset = make_custom_duality(cfg);
            cfg.reject_unused();
            preset.name = name;
            return preset;
        }
    }
    throw ConfigError("duality.preset", "unknown duality preset '" + name + "'");
}

DualityPreset make_custom_duality(Config const& cfg)
{
    DualityPreset d;
    d.name = "custom";
    d.triplet = std::make_shared<LevyTriplet const>(make_triplet(cfg));
    if (!d.triplet->nu.finite()) {
        throw ConfigError("triplet.nu", "duality needs a finite measure; use a finite preset");
    }
    auto const outer = cfg.get_string("duality.outer", "tanh");
    if (outer == "tanh-times-cos") {
        SmoothFunctional F;
        F.f = [](std::span<double const> u) { return std::tanh(u[0]) * std::cos(u[1]); };
        F.grad = [](std::span<double const> u) {
            return std::vector<double>{sech2(u[0]) * std::cos(u[1]), -std::tanh(u[0]) * std::sin(u[1])};
        };
        F.kernels = {make_kernel(cfg, "duality.kernel"), make_kernel(cfg, "duality.kernel2")};
        F.name = "tanh-times-cos";
        d.F = std::move(F);
    } else {
        auto [f, df] = make_outer(cfg, "duality.outer");
        d.F = scalar_functional(f, df, make_kernel(cfg, "duality.kernel"), outer);
    }
    if (cfg.has("duality.G.outer")) {
        auto [f, df] = make_outer(cfg, "duality.G.outer");
        d.G = scalar_functional(f, df, make_kernel(cfg, "duality.G.kernel"), cfg.get_string("duality.G.outer"));
    }
    d.g = make_test_function(cfg, "duality.g");
    d.lambda = make_lambda(cfg, "duality.lambda");
    d.k = make_weight(cfg, "duality.k");
    return d;
}

} // namespace lmc
