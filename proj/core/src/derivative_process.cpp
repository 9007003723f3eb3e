#include "lmc/derivative_process.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace lmc {

DerivativeProcess::DerivativeProcess(double horizon) : horizon_(horizon)
{
    if (!(horizon > 0.0)) {
        throw std::invalid_argument("DerivativeProcess: horizon must be positive");
    }
}

DerivativeProcess::DerivativeProcess(double horizon, std::vector<double> continuous,
                                     std::vector<StepTerm> steps)
    : DerivativeProcess(horizon)
{
    if (continuous.size() == 1) {
        throw std::invalid_argument("DerivativeProcess: continuous part needs at least 2 nodes");
    }
    continuous_ = std::move(continuous);
    steps_ = std::move(steps);
    for (auto const& s : steps_) {
        if (!(s.time > 0.0 && s.time <= horizon_)) {
            throw std::invalid_argument("DerivativeProcess: step times must lie in (0, T]");
        }
    }
    normalize();
}

bool DerivativeProcess::empty() const noexcept
{
    return continuous_.empty() && steps_.empty();
}

void DerivativeProcess::normalize()
{
    std::stable_sort(steps_.begin(), steps_.end(),
                     [](StepTerm const& a, StepTerm const& b) { return a.time < b.time; });
    std::vector<StepTerm> merged;
    merged.reserve(steps_.size());
    for (auto const& s : steps_) {
        if (!merged.empty() && merged.back().time == s.time) {
            merged.back().coef += s.coef;
        } else {
            merged.push_back(s);
        }
    }
    steps_ = std::move(merged);
}

double DerivativeProcess::continuous_at(double t) const
{
    if (continuous_.empty()) {
        return 0.0;
    }
    std::size_t const G = continuous_.size() - 1;
    double const pos = t / horizon_ * static_cast<double>(G);
    auto idx = static_cast<std::size_t>(std::max(0.0, std::floor(pos)));
    return continuous_[std::min(idx, G)];
}

double DerivativeProcess::step_at(double t) const
{
    double acc = 0.0;
    for (auto const& s : steps_) {
        acc += s.coef * (s.time / horizon_ - (t <= s.time ? 1.0 : 0.0));
    }
    return acc;
}

DerivativeProcess& DerivativeProcess::operator+=(DerivativeProcess const& other)
{
    if (other.horizon_ != horizon_) {
        throw std::invalid_argument("DerivativeProcess: horizons differ");
    }
    if (!other.continuous_.empty()) {
        if (continuous_.empty()) {
            continuous_ = other.continuous_;
        } else if (continuous_.size() != other.continuous_.size()) {
            throw std::invalid_argument("DerivativeProcess: continuous parts on different grids");
        } else {
            for (std::size_t i = 0; i < continuous_.size(); ++i) {
                continuous_[i] += other.continuous_[i];
            }
        }
    }
    steps_.insert(steps_.end(), other.steps_.begin(), other.steps_.end());
    normalize();
    return *this;
}

DerivativeProcess& DerivativeProcess::operator*=(double a)
{
    for (auto& v : continuous_) {
        v *= a;
    }
    for (auto& s : steps_) {
        s.coef *= a;
    }
    return *this;
}

void DerivativeProcess::add_step(double time, double coef)
{
    if (!(time > 0.0 && time <= horizon_)) {
        throw std::invalid_argument("DerivativeProcess: step times must lie in (0, T]");
    }
    steps_.push_back({time, coef});
    normalize();
}

double DerivativeProcess::step_l1() const
{
    double acc = 0.0;
    for (auto const& s : steps_) {
        acc += std::abs(s.coef);
    }
    return acc;
}

double step_inner(double s, double r, double horizon)
{
    return std::min(s, r) * (1.0 - std::max(s, r) / horizon);
}

namespace {

// ∫_a^b of the step part.
double step_integral(std::span<StepTerm const> steps, double horizon, double a, double b)
{
    double acc = 0.0;
    for (auto const& s : steps) {
        acc += s.coef * (s.time / horizon * (b - a) - std::clamp(s.time - a, 0.0, b - a));
    }
    return acc;
}

} // namespace

double l2_norm_sq(DerivativeProcess const& d)
{
    double const T = d.horizon();
    auto const steps = d.steps();
    double acc = 0.0;
    // Σ_j c_j (1 − s_j/T)(c_j s_j + 2 Σ_{i<j} c_i s_i)
    double prefix = 0.0;
    for (auto const& s : steps) {
        acc += s.coef * (1.0 - s.time / T) * (s.coef * s.time + 2.0 * prefix);
        prefix += s.coef * s.time;
    }
    auto const b = d.continuous();
    if (!b.empty()) {
        std::size_t const G = b.size() - 1;
        double const dt = T / static_cast<double>(G);
        double sq = 0.0;
        double cross = 0.0;
        for (std::size_t i = 0; i < G; ++i) {
            double const a0 = T * static_cast<double>(i) / static_cast<double>(G);
            double const a1 = i + 1 == G ? T : T * static_cast<double>(i + 1) / static_cast<double>(G);
            sq += b[i] * b[i] * dt;
            if (!steps.empty()) {
                cross += b[i] * step_integral(steps, T, a0, a1);
            }
        }
        acc += sq + 2.0 * cross;
    }
    return acc;
}

double time_integral(DerivativeProcess const& d)
{
    double const T = d.horizon();
    double acc = 0.0;
    for (auto const& s : d.steps()) {
        acc += s.coef * (s.time / T * T - s.time);
    }
    auto const b = d.continuous();
    if (!b.empty()) {
        std::size_t const G = b.size() - 1;
        double const dt = T / static_cast<double>(G);
        for (std::size_t i = 0; i < G; ++i) {
            acc += b[i] * dt;
        }
    }
    return acc;
}

double inner_with(DerivativeProcess const& d, TestFunction const& g)
{
    double const T = d.horizon();
    double acc = 0.0;
    if (!d.steps().empty()) {
        double const total = g.primitive(T);
        for (auto const& s : d.steps()) {
            acc += s.coef * (s.time / T * total - g.primitive(s.time));
        }
    }
    auto const b = d.continuous();
    if (!b.empty()) {
        std::size_t const G = b.size() - 1;
        double const dt = T / static_cast<double>(G);
        for (std::size_t i = 0; i < G; ++i) {
            acc += b[i] * g.value(T * static_cast<double>(i) / static_cast<double>(G)) * dt;
        }
    }
    return acc;
}

OrthogonalityResult orthogonality_residual(DerivativeProcess const& d)
{
    OrthogonalityResult out;
    out.applicable = !d.has_continuous();
    out.residual = std::abs(time_integral(d));
    for (auto const& s : d.steps()) {
        out.scale += std::abs(s.coef) * s.time;
    }
    for (double v : d.continuous()) {
        out.scale += std::abs(v) * d.horizon() / static_cast<double>(d.continuous().size() - 1);
    }
    return out;
}

CriterionScale abs_continuity_indicator(DerivativeProcess const& d, double tau)
{
    CriterionScale out;
    out.l2 = l2_norm_sq(d);
    double const l1 = d.step_l1();
    out.scale_sq = d.horizon() * l1 * l1;
    auto const b = d.continuous();
    if (!b.empty()) {
        double const dt = d.horizon() / static_cast<double>(b.size() - 1);
        for (std::size_t i = 0; i + 1 < b.size(); ++i) {
            out.scale_sq += b[i] * b[i] * dt;
        }
    }
    out.positive = out.scale_sq > 0.0 && out.l2 > tau * out.scale_sq;
    return out;
}

} // namespace lmc
