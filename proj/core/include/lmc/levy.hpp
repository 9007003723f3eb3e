#pragma once

#include "lmc/interval_set.hpp"

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

namespace lmc {

using RealFn = std::function<double(double)>;
using SpaceTimeFn = std::function<double(double, double)>;

struct Atom
{
    double size = 0.0;
    double mass = 0.0;
};

/// ν = Σ mass_i δ_{size_i}.
struct DiscreteMeasure
{
    std::vector<Atom> atoms;
};

/// Finite measure with a density on bounded pieces away from 0.
struct DensityMeasure
{
    RealFn density;
    std::vector<Interval> support;
    // Quantile of the normalised measure, u in (0,1) -> x. When empty an
    // inverse-CDF table is built from the density.
    RealFn quantile;
};

/// Infinite-activity measure. Never simulated directly: call truncated(ε).
struct TruncatableMeasure
{
    std::string family;
    RealFn density;
    std::vector<Interval> support;
};

using LevyMeasureSpec = std::variant<DiscreteMeasure, DensityMeasure, TruncatableMeasure>;

class LevyMeasureError : public std::invalid_argument
{
  public:
    using std::invalid_argument::invalid_argument;
};

//---------------------------------------------------------------------------//
/*!
 * A Lévy measure ν on ℝ with ν({0}) = 0.
 *
 * Finite measures can be sampled and integrated; truncatable (infinite
 * activity) measures can only be integrated against ν-integrable functions or
 * converted to a finite measure on {|x| > ε}. Copies share immutable state.
 */
class LevyMeasure
{
  public:
    explicit LevyMeasure(LevyMeasureSpec spec);

    static LevyMeasure zero();

    bool finite() const noexcept;
    bool discrete() const noexcept;
    LevyMeasureSpec const& spec() const noexcept;

    /// ν(ℝ₀); throws for infinite measures.
    double total_mass() const;
    /// ν(Θ); throws when Θ has infinite mass.
    double mass(JumpSet const& theta) const;

    /// Jump size distributed as ν/ν(ℝ₀), from u in (0, 1).
    double sample(double u) const;

    /// ∫ fn(x) ν(dx), optionally restricted to a jump set.
    double integrate(RealFn const& fn, JumpSet const* restrict = nullptr) const;
    /// ∫₀ᵀ ∫ fn(t, x) ν(dx) dt.
    double integrate_time_space(SpaceTimeFn const& fn, double horizon,
                                JumpSet const* restrict = nullptr) const;

    /// Finite restriction of ν to {|x| > eps}.
    LevyMeasure truncated(double eps) const;

    std::string describe() const;

    /// A few jump sizes spread over the support, for sampled invariant checks.
    std::vector<double> representative_sizes(std::size_t per_piece = 8) const;

  private:
    struct Impl;
    std::shared_ptr<Impl const> impl_;
};

struct LevyTriplet
{
    double gamma = 0.0;
    double sigma = 0.0;
    LevyMeasure nu = LevyMeasure::zero();
    double horizon = 1.0;
    // Set when ν was obtained from an infinite-activity family by truncation.
    std::optional<double> truncation;

    void validate() const;
    /// Copy with ν replaced by its restriction to {|x| > eps}.
    LevyTriplet truncated(double eps) const;
};

struct JumpRecord
{
    double time = 0.0;
    double size = 0.0;
    friend bool operator==(JumpRecord const&, JumpRecord const&) = default;
};

//---------------------------------------------------------------------------//
/*!
 * One realised trajectory on [0, T]: Brownian values on a uniform grid and the
 * finite, time-sorted list of jumps. Immutable after construction.
 */
class LevyPath
{
  public:
    LevyPath(std::shared_ptr<LevyTriplet const> triplet, std::vector<double> brownian,
             std::vector<JumpRecord> jumps, std::uint64_t seed);

    /// Path with a zero Brownian part on a `grid_size` grid and the given jumps.
    static LevyPath from_jumps(LevyTriplet const& triplet, std::vector<JumpRecord> jumps,
                               std::size_t grid_size = 2);

    LevyTriplet const& triplet() const noexcept { return *triplet_; }
    std::shared_ptr<LevyTriplet const> const& triplet_ptr() const noexcept { return triplet_; }
    double horizon() const noexcept { return triplet_->horizon; }
    double sigma() const noexcept { return triplet_->sigma; }
    std::size_t grid_size() const noexcept { return brownian_.size() - 1; }
    double grid_step() const noexcept { return horizon() / static_cast<double>(grid_size()); }
    double grid_time(std::size_t i) const noexcept;
    std::vector<double> grid() const;
    std::span<double const> brownian() const noexcept { return brownian_; }
    std::span<JumpRecord const> jumps() const noexcept { return jumps_; }
    std::uint64_t seed() const noexcept { return seed_; }

    /// W(t), linear interpolation between grid nodes.
    double brownian_at(double t) const;

    /// Same Brownian part and seed, different jump configuration.
    LevyPath with_jumps(std::vector<JumpRecord> jumps) const;

  private:
    std::shared_ptr<LevyTriplet const> triplet_;
    std::vector<double> brownian_;
    std::vector<JumpRecord> jumps_;
    std::uint64_t seed_;
};

LevyPath simulate_path(std::shared_ptr<LevyTriplet const> triplet, std::size_t grid_size,
                       std::uint64_t seed);
LevyPath simulate_path(LevyTriplet const& triplet, std::size_t grid_size, std::uint64_t seed);

/// Keep only the jumps whose size lies in theta.
LevyPath restrict_jumps(LevyPath const& path, JumpSet const& theta);

/// X_t from the Lévy–Itô representation, small jumps compensated.
double evaluate_X(LevyPath const& path, double t);

std::size_t count_jumps(LevyPath const& path, JumpSet const& theta);

/// {seed, grid, brownian[], jumps[]} as JSON text.
std::string path_to_json(LevyPath const& path);
LevyPath path_from_json(std::string const& text, LevyTriplet const& triplet);

} // namespace lmc
