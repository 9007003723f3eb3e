#pragma once

#include <initializer_list>
#include <limits>
#include <string>
#include <vector>

namespace lmc {

constexpr double kInfinity = std::numeric_limits<double>::infinity();

struct Interval
{
    double lo = 0.0;
    double hi = 0.0;
    bool lo_closed = false;
    bool hi_closed = false;

    static Interval open(double lo, double hi) { return {lo, hi, false, false}; }
    static Interval closed(double lo, double hi) { return {lo, hi, true, true}; }
    static Interval point(double x) { return {x, x, true, true}; }

    bool contains(double x) const noexcept;
    bool empty() const noexcept;
};

//---------------------------------------------------------------------------//
/*!
 * Finite union of intervals of jump sizes, always excluding 0.
 *
 * Used for the restriction set Θ of multiple integrals and for the nonzero
 * part of the localisation set Λ.
 */
class JumpSet
{
  public:
    JumpSet() = default;
    explicit JumpSet(std::vector<Interval> intervals);
    JumpSet(std::initializer_list<Interval> intervals);

    /// ℝ \ {0}.
    static JumpSet all_nonzero();
    /// {lo < |x| < hi}.
    static JumpSet symmetric_band(double lo, double hi);
    static JumpSet point(double x);

    bool contains(double x) const noexcept;
    bool empty() const noexcept { return intervals_.empty(); }
    std::vector<Interval> const& intervals() const noexcept { return intervals_; }

    /// inf |x| over the set; 0 when the closure touches the origin.
    double distance_from_zero() const noexcept;
    bool bounded_away_from_zero() const noexcept { return distance_from_zero() > 0.0; }
    bool bounded() const noexcept;

    /// True when every point of this set lies in `other`.
    bool subset_of(JumpSet const& other) const;

    std::string describe() const;

  private:
    std::vector<Interval> intervals_;
};

/// Λ ∈ ℬ(ℝ): whether the Gaussian direction 0 is included, plus the jump part.
struct LambdaSet
{
    bool includes_zero = false;
    JumpSet jumps;

    static LambdaSet all() { return {true, JumpSet::all_nonzero()}; }
    static LambdaSet jumps_only() { return {false, JumpSet::all_nonzero()}; }
    static LambdaSet gaussian_only() { return {true, JumpSet{}}; }

    bool contains_jump(double size) const noexcept { return jumps.contains(size); }
};

} // namespace lmc
