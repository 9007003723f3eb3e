#include "lmc/interval_set.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace lmc {

bool Interval::contains(double x) const noexcept
{
    bool const above = lo_closed ? x >= lo : x > lo;
    bool const below = hi_closed ? x <= hi : x < hi;
    return above && below;
}

bool Interval::empty() const noexcept
{
    if (lo < hi) {
        return false;
    }
    return !(lo == hi && lo_closed && hi_closed);
}

JumpSet::JumpSet(std::vector<Interval> intervals)
{
    for (auto const& iv : intervals) {
        if (std::isnan(iv.lo) || std::isnan(iv.hi)) {
            throw std::invalid_argument("JumpSet: NaN interval endpoint");
        }
        if (iv.empty()) {
            continue;
        }
        if (iv.contains(0.0) || (iv.lo < 0.0 && iv.hi > 0.0)) {
            throw std::invalid_argument("JumpSet: intervals of jump sizes must exclude 0");
        }
        intervals_.push_back(iv);
    }
    std::sort(intervals_.begin(), intervals_.end(),
              [](Interval const& a, Interval const& b) { return a.lo < b.lo; });
}

JumpSet::JumpSet(std::initializer_list<Interval> intervals)
    : JumpSet(std::vector<Interval>(intervals))
{
}

JumpSet JumpSet::all_nonzero()
{
    return JumpSet{Interval::open(-kInfinity, 0.0), Interval::open(0.0, kInfinity)};
}

JumpSet JumpSet::symmetric_band(double lo, double hi)
{
    if (!(lo >= 0.0) || !(hi > lo)) {
        throw std::invalid_argument("symmetric_band: need 0 <= lo < hi");
    }
    return JumpSet{Interval::open(-hi, -lo), Interval::open(lo, hi)};
}

JumpSet JumpSet::point(double x)
{
    if (x == 0.0) {
        throw std::invalid_argument("JumpSet::point: jump size must be nonzero");
    }
    return JumpSet{Interval::point(x)};
}

bool JumpSet::contains(double x) const noexcept
{
    if (x == 0.0) {
        return false;
    }
    return std::any_of(intervals_.begin(), intervals_.end(),
                       [x](Interval const& iv) { return iv.contains(x); });
}

double JumpSet::distance_from_zero() const noexcept
{
    if (intervals_.empty()) {
        return kInfinity;
    }
    double best = kInfinity;
    for (auto const& iv : intervals_) {
        double const d = iv.lo >= 0.0 ? iv.lo : -iv.hi;
        best = std::min(best, d);
    }
    return best;
}

bool JumpSet::bounded() const noexcept
{
    return std::all_of(intervals_.begin(), intervals_.end(), [](Interval const& iv) {
        return std::isfinite(iv.lo) && std::isfinite(iv.hi);
    });
}

bool JumpSet::subset_of(JumpSet const& other) const
{
    // Merge `other` into maximal runs, then require each interval of this set
    // to sit inside one run.
    std::vector<Interval> runs;
    for (auto const& iv : other.intervals_) {
        if (!runs.empty()) {
            Interval& last = runs.back();
            bool const touches = iv.lo < last.hi
                                 || (iv.lo == last.hi && (iv.lo_closed || last.hi_closed));
            if (touches) {
                if (iv.hi > last.hi) {
                    last.hi = iv.hi;
                    last.hi_closed = iv.hi_closed;
                } else if (iv.hi == last.hi) {
                    last.hi_closed = last.hi_closed || iv.hi_closed;
                }
                continue;
            }
        }
        runs.push_back(iv);
    }
    for (auto const& iv : intervals_) {
        bool inside = false;
        for (auto const& run : runs) {
            bool const lo_ok = iv.lo > run.lo || (iv.lo == run.lo && (run.lo_closed || !iv.lo_closed));
            bool const hi_ok = iv.hi < run.hi || (iv.hi == run.hi && (run.hi_closed || !iv.hi_closed));
            if (lo_ok && hi_ok) {
                inside = true;
                break;
            }
        }
        if (!inside) {
            return false;
        }
    }
    return true;
}

std::string JumpSet::describe() const
{
    if (intervals_.empty()) {
        return "{}";
    }
    std::ostringstream os;
    for (std::size_t i = 0; i < intervals_.size(); ++i) {
        auto const& iv = intervals_[i];
        if (i) {
            os << " U ";
        }
        os << (iv.lo_closed ? '[' : '(') << iv.lo << ", " << iv.hi << (iv.hi_closed ? ']' : ')');
    }
    return os.str();
}

} // namespace lmc
