#include "lmc/levy.hpp"

#include "lmc/quadrature.hpp"
#include "lmc/rng.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

namespace lmc {
namespace {

struct Segment
{
    double a;
    double b;
};

// Pieces of a density support intersected with an optional restriction.
std::vector<Segment> support_segments(std::vector<Interval> const& support, JumpSet const* restrict)
{
    std::vector<Segment> out;
    for (auto const& s : support) {
        if (!restrict) {
            if (s.lo < s.hi) {
                out.push_back({s.lo, s.hi});
            }
            continue;
        }
        for (auto const& r : restrict->intervals()) {
            double const a = std::max(s.lo, r.lo);
            double const b = std::min(s.hi, r.hi);
            if (a < b) {
                out.push_back({a, b});
            }
        }
    }
    return out;
}

std::vector<Interval> cut_small(std::vector<Interval> const& support, double eps)
{
    std::vector<Interval> out;
    for (auto const& s : support) {
        if (s.hi <= -eps || s.lo >= eps) {
            out.push_back(s);
            continue;
        }
        if (s.lo < -eps) {
            out.push_back({s.lo, -eps, s.lo_closed, false});
        }
        if (s.hi > eps) {
            out.push_back({eps, s.hi, false, s.hi_closed});
        }
    }
    return out;
}

void check_support(std::vector<Interval> const& support, bool allow_touch_zero)
{
    for (auto const& s : support) {
        if (!(s.lo < s.hi)) {
            throw LevyMeasureError("density support pieces must satisfy lo < hi");
        }
        if (s.lo < 0.0 && s.hi > 0.0) {
            throw LevyMeasureError("density support pieces must not straddle 0");
        }
        if (!allow_touch_zero && (s.lo == 0.0 || s.hi == 0.0)) {
            throw LevyMeasureError(
                "finite density measure: support must be bounded away from 0 "
                "(use a truncatable measure for infinite activity)");
        }
        if (!std::isfinite(s.lo) || !std::isfinite(s.hi)) {
            throw LevyMeasureError("density support pieces must be bounded");
        }
    }
}

// Inverse-CDF table over one support piece.
struct QuantileTable
{
    double a = 0.0;
    double b = 0.0;
    std::vector<double> nodes;
    std::vector<double> cdf;

    double invert(double target) const
    {
        auto const it = std::upper_bound(cdf.begin(), cdf.end(), target);
        std::size_t k = static_cast<std::size_t>(std::max<std::ptrdiff_t>(1, it - cdf.begin())) - 1;
        k = std::min(k, nodes.size() - 2);
        double const width = cdf[k + 1] - cdf[k];
        double const frac = width > 0.0 ? (target - cdf[k]) / width : 0.5;
        return nodes[k] + std::clamp(frac, 0.0, 1.0) * (nodes[k + 1] - nodes[k]);
    }
};

QuantileTable build_table(RealFn const& density, double a, double b)
{
    constexpr std::size_t panels = 2048;
    QuantileTable table;
    table.a = a;
    table.b = b;
    table.nodes.resize(panels + 1);
    double const alo = std::min(std::abs(a), std::abs(b));
    double const ahi = std::max(std::abs(a), std::abs(b));
    bool const geometric = alo > 0.0 && ahi / alo > 50.0;
    for (std::size_t k = 0; k <= panels; ++k) {
        double const f = static_cast<double>(k) / static_cast<double>(panels);
        if (geometric) {
            double const mag = alo * std::pow(ahi / alo, a > 0.0 ? f : 1.0 - f);
            table.nodes[k] = a > 0.0 ? mag : -mag;
        } else {
            table.nodes[k] = a + f * (b - a);
        }
    }
    table.nodes.front() = a;
    table.nodes.back() = b;
    table.cdf.assign(panels + 1, 0.0);
    auto const gl = quad::gauss_legendre_20(0.0, 1.0);
    for (std::size_t k = 0; k < panels; ++k) {
        double const x0 = table.nodes[k];
        double const h = table.nodes[k + 1] - x0;
        double m = 0.0;
        for (auto const& [u, w] : gl) {
            m += w * density(x0 + u * h);
        }
        table.cdf[k + 1] = table.cdf[k] + m * h;
    }
    return table;
}

} // namespace

struct LevyMeasure::Impl
{
    LevyMeasureSpec spec;
    bool finite = true;
    double total = 0.0;
    std::vector<double> atom_cdf;
    std::vector<QuantileTable> tables;
    std::vector<double> table_cdf;
};

LevyMeasure::LevyMeasure(LevyMeasureSpec spec)
{
    auto impl = std::make_shared<Impl>();
    impl->spec = std::move(spec);

    if (auto const* d = std::get_if<DiscreteMeasure>(&impl->spec)) {
        double acc = 0.0;
        for (auto const& atom : d->atoms) {
            if (atom.size == 0.0 || !std::isfinite(atom.size)) {
                throw LevyMeasureError("discrete Lévy measure: atoms must have finite nonzero size (ν({0}) = 0)");
            }
            if (!(atom.mass >= 0.0) || !std::isfinite(atom.mass)) {
                throw LevyMeasureError("discrete Lévy measure: atom masses must be finite and nonnegative");
            }
            acc += atom.mass;
            impl->atom_cdf.push_back(acc);
        }
        impl->total = acc;
    } else if (auto const* c = std::get_if<DensityMeasure>(&impl->spec)) {
        if (!c->density) {
            throw LevyMeasureError("density measure without a density function");
        }
        check_support(c->support, false);
        double acc = 0.0;
        for (auto const& seg : support_segments(c->support, nullptr)) {
            for (int k = 0; k <= 64; ++k) {
                double const x = seg.a + (seg.b - seg.a) * (k + 0.5) / 65.0;
                double const rho = c->density(x);
                if (!(rho >= 0.0) || !std::isfinite(rho)) {
                    throw LevyMeasureError("density measure: density must be finite and nonnegative");
                }
            }
            auto table = build_table(c->density, seg.a, seg.b);
            acc += table.cdf.back();
            impl->table_cdf.push_back(acc);
            impl->tables.push_back(std::move(table));
        }
        double total = 0.0;
        for (auto const& seg : support_segments(c->support, nullptr)) {
            total += quad::integrate(c->density, seg.a, seg.b);
        }
        impl->total = total;
    } else {
        auto const& t = std::get<TruncatableMeasure>(impl->spec);
        if (!t.density) {
            throw LevyMeasureError("truncatable measure without a density function");
        }
        check_support(t.support, true);
        impl->finite = false;
    }
    impl_ = std::move(impl);

    // Square- and absolute-integrability of the jump sizes.
    try {
        (void)integrate([](double x) { return x * x; });
        (void)integrate([](double x) { return std::abs(x); });
    } catch (QuadratureError const& e) {
        throw LevyMeasureError(std::string("Lévy measure moments not finite: ") + e.what());
    }

    if (!impl_->finite) {
        // truncated(eps).total_mass must be nonincreasing in eps.
        auto const& t = std::get<TruncatableMeasure>(impl_->spec);
        double lo = kInfinity;
        for (auto const& s : t.support) {
            lo = std::min(lo, std::max(std::abs(s.lo), std::abs(s.hi)));
        }
        double prev = kInfinity;
        for (double frac : {1e-4, 1e-3, 1e-2, 1e-1, 0.5}) {
            double const m = truncated(frac * lo).total_mass();
            if (m > prev * (1.0 + 1e-12)) {
                throw LevyMeasureError("truncatable measure: truncated mass increases with eps");
            }
            prev = m;
        }
    }
}

LevyMeasure LevyMeasure::zero()
{
    return LevyMeasure(DiscreteMeasure{});
}

bool LevyMeasure::finite() const noexcept
{
    return impl_->finite;
}

bool LevyMeasure::discrete() const noexcept
{
    return std::holds_alternative<DiscreteMeasure>(impl_->spec);
}

LevyMeasureSpec const& LevyMeasure::spec() const noexcept
{
    return impl_->spec;
}

double LevyMeasure::total_mass() const
{
    if (!impl_->finite) {
        throw LevyMeasureError("total mass of an infinite-activity Lévy measure is infinite");
    }
    return impl_->total;
}

double LevyMeasure::mass(JumpSet const& theta) const
{
    if (auto const* d = std::get_if<DiscreteMeasure>(&impl_->spec)) {
        double m = 0.0;
        for (auto const& atom : d->atoms) {
            if (theta.contains(atom.size)) {
                m += atom.mass;
            }
        }
        return m;
    }
    if (!impl_->finite && !theta.bounded_away_from_zero()) {
        throw LevyMeasureError("ν(Θ) is infinite: Θ touches 0 under an infinite-activity measure");
    }
    return integrate([](double) { return 1.0; }, &theta);
}

double LevyMeasure::sample(double u) const
{
    if (!impl_->finite) {
        throw LevyMeasureError("cannot sample an infinite-activity Lévy measure; truncate it first");
    }
    if (impl_->total <= 0.0) {
        throw LevyMeasureError("cannot sample jump sizes from the zero measure");
    }
    if (auto const* d = std::get_if<DiscreteMeasure>(&impl_->spec)) {
        double const target = u * impl_->total;
        auto const it = std::upper_bound(impl_->atom_cdf.begin(), impl_->atom_cdf.end(), target);
        std::size_t idx = static_cast<std::size_t>(it - impl_->atom_cdf.begin());
        idx = std::min(idx, d->atoms.size() - 1);
        while (d->atoms[idx].mass == 0.0 && idx > 0) {
            --idx;
        }
        return d->atoms[idx].size;
    }
    auto const& c = std::get<DensityMeasure>(impl_->spec);
    if (c.quantile) {
        return c.quantile(u);
    }
    double const target = u * impl_->table_cdf.back();
    auto const it = std::upper_bound(impl_->table_cdf.begin(), impl_->table_cdf.end(), target);
    std::size_t idx = std::min(static_cast<std::size_t>(it - impl_->table_cdf.begin()),
                               impl_->tables.size() - 1);
    double const before = idx == 0 ? 0.0 : impl_->table_cdf[idx - 1];
    return impl_->tables[idx].invert(target - before);
}

double LevyMeasure::integrate(RealFn const& fn, JumpSet const* restrict) const
{
    if (auto const* d = std::get_if<DiscreteMeasure>(&impl_->spec)) {
        double acc = 0.0;
        for (auto const& atom : d->atoms) {
            if (!restrict || restrict->contains(atom.size)) {
                acc += atom.mass * fn(atom.size);
            }
        }
        return acc;
    }
    RealFn const& density = std::holds_alternative<DensityMeasure>(impl_->spec)
                                ? std::get<DensityMeasure>(impl_->spec).density
                                : std::get<TruncatableMeasure>(impl_->spec).density;
    std::vector<Interval> const& support = std::holds_alternative<DensityMeasure>(impl_->spec)
                                               ? std::get<DensityMeasure>(impl_->spec).support
                                               : std::get<TruncatableMeasure>(impl_->spec).support;
    double acc = 0.0;
    for (auto const& seg : support_segments(support, restrict)) {
        acc += quad::integrate([&](double x) { return fn(x) * density(x); }, seg.a, seg.b);
    }
    return acc;
}

double LevyMeasure::integrate_time_space(SpaceTimeFn const& fn, double horizon,
                                         JumpSet const* restrict) const
{
    auto const time_integral = [&](double x) {
        return quad::integrate([&](double t) { return fn(t, x); }, 0.0, horizon);
    };
    return integrate(time_integral, restrict);
}

LevyMeasure LevyMeasure::truncated(double eps) const
{
    if (!(eps > 0.0)) {
        throw LevyMeasureError("truncation level eps must be positive");
    }
    if (auto const* d = std::get_if<DiscreteMeasure>(&impl_->spec)) {
        DiscreteMeasure out;
        for (auto const& atom : d->atoms) {
            if (std::abs(atom.size) > eps) {
                out.atoms.push_back(atom);
            }
        }
        return LevyMeasure(std::move(out));
    }
    if (auto const* c = std::get_if<DensityMeasure>(&impl_->spec)) {
        return LevyMeasure(DensityMeasure{c->density, cut_small(c->support, eps), {}});
    }
    auto const& t = std::get<TruncatableMeasure>(impl_->spec);
    return LevyMeasure(DensityMeasure{t.density, cut_small(t.support, eps), {}});
}

std::string LevyMeasure::describe() const
{
    std::ostringstream os;
    if (auto const* d = std::get_if<DiscreteMeasure>(&impl_->spec)) {
        os << "discrete{";
        for (std::size_t i = 0; i < d->atoms.size(); ++i) {
            os << (i ? ", " : "") << d->atoms[i].mass << "*delta(" << d->atoms[i].size << ")";
        }
        os << "}";
    } else if (std::holds_alternative<DensityMeasure>(impl_->spec)) {
        os << "density{mass=" << impl_->total << "}";
    } else {
        os << "truncatable{" << std::get<TruncatableMeasure>(impl_->spec).family << "}";
    }
    return os.str();
}

std::vector<double> LevyMeasure::representative_sizes(std::size_t per_piece) const
{
    std::vector<double> out;
    if (auto const* d = std::get_if<DiscreteMeasure>(&impl_->spec)) {
        for (auto const& atom : d->atoms) {
            if (atom.mass > 0.0) {
                out.push_back(atom.size);
            }
        }
        return out;
    }
    std::vector<Interval> const& support = std::holds_alternative<DensityMeasure>(impl_->spec)
                                               ? std::get<DensityMeasure>(impl_->spec).support
                                               : std::get<TruncatableMeasure>(impl_->spec).support;
    for (auto const& s : support) {
        double const a = s.lo;
        double const b = s.hi;
        for (std::size_t k = 0; k < per_piece; ++k) {
            double const f = (static_cast<double>(k) + 0.5) / static_cast<double>(per_piece);
            if (a == 0.0 || b == 0.0) {
                // Geometric spread towards the origin.
                double const far = a == 0.0 ? b : a;
                out.push_back(far * std::pow(1e-3, f));
            } else {
                out.push_back(a + f * (b - a));
            }
        }
    }
    return out;
}

void LevyTriplet::validate() const
{
    if (!(sigma >= 0.0) || !std::isfinite(sigma)) {
        throw std::invalid_argument("LevyTriplet: sigma must be finite and >= 0");
    }
    if (!(horizon > 0.0) || !std::isfinite(horizon)) {
        throw std::invalid_argument("LevyTriplet: horizon T must be finite and > 0");
    }
    if (!std::isfinite(gamma)) {
        throw std::invalid_argument("LevyTriplet: gamma must be finite");
    }
}

LevyTriplet LevyTriplet::truncated(double eps) const
{
    LevyTriplet out = *this;
    out.nu = nu.truncated(eps);
    out.truncation = eps;
    return out;
}

//---------------------------------------------------------------------------//
// LevyPath
//---------------------------------------------------------------------------//

LevyPath::LevyPath(std::shared_ptr<LevyTriplet const> triplet, std::vector<double> brownian,
                   std::vector<JumpRecord> jumps, std::uint64_t seed)
    : triplet_(std::move(triplet)), brownian_(std::move(brownian)), jumps_(std::move(jumps)), seed_(seed)
{
    if (!triplet_) {
        throw std::invalid_argument("LevyPath: null triplet");
    }
    triplet_->validate();
    if (brownian_.size() < 3) {
        throw std::invalid_argument("LevyPath: grid needs at least 2 steps");
    }
    if (brownian_.front() != 0.0) {
        throw std::invalid_argument("LevyPath: W(0) must be 0");
    }
    double const T = triplet_->horizon;
    double prev = 0.0;
    for (auto const& j : jumps_) {
        if (!(j.time > 0.0 && j.time <= T)) {
            throw std::invalid_argument("LevyPath: jump times must lie in (0, T]");
        }
        if (j.size == 0.0 || !std::isfinite(j.size)) {
            throw std::invalid_argument("LevyPath: jump sizes must be finite and nonzero");
        }
        if (!(j.time > prev)) {
            throw std::invalid_argument("LevyPath: jump times must be strictly increasing");
        }
        prev = j.time;
    }
}

LevyPath LevyPath::from_jumps(LevyTriplet const& triplet, std::vector<JumpRecord> jumps,
                              std::size_t grid_size)
{
    return LevyPath(std::make_shared<LevyTriplet const>(triplet),
                    std::vector<double>(grid_size + 1, 0.0), std::move(jumps), 0);
}

double LevyPath::grid_time(std::size_t i) const noexcept
{
    if (i >= grid_size()) {
        return horizon();
    }
    return horizon() * static_cast<double>(i) / static_cast<double>(grid_size());
}

std::vector<double> LevyPath::grid() const
{
    std::vector<double> g(grid_size() + 1);
    for (std::size_t i = 0; i < g.size(); ++i) {
        g[i] = grid_time(i);
    }
    return g;
}

double LevyPath::brownian_at(double t) const
{
    if (!(t >= 0.0 && t <= horizon())) {
        throw std::out_of_range("LevyPath::brownian_at: t outside [0, T]");
    }
    double const pos = t / grid_step();
    auto idx = static_cast<std::size_t>(std::floor(pos));
    if (idx >= grid_size()) {
        return brownian_.back();
    }
    double const frac = pos - static_cast<double>(idx);
    return brownian_[idx] + frac * (brownian_[idx + 1] - brownian_[idx]);
}

LevyPath LevyPath::with_jumps(std::vector<JumpRecord> jumps) const
{
    return LevyPath(triplet_, brownian_, std::move(jumps), seed_);
}

LevyPath simulate_path(std::shared_ptr<LevyTriplet const> triplet, std::size_t grid_size,
                       std::uint64_t seed)
{
    if (!triplet) {
        throw std::invalid_argument("simulate_path: null triplet");
    }
    triplet->validate();
    if (grid_size < 2) {
        throw std::invalid_argument("simulate_path: grid_size must be >= 2");
    }
    if (!triplet->nu.finite()) {
        throw LevyMeasureError(
            "simulate_path: infinite-activity Lévy measure; pass an explicit truncation "
            "level via LevyTriplet::truncated(eps)");
    }
    double const T = triplet->horizon;

    std::vector<double> w(grid_size + 1, 0.0);
    StreamRng bm(seed, Stream::brownian);
    double const sd = std::sqrt(T / static_cast<double>(grid_size));
    for (std::size_t i = 1; i <= grid_size; ++i) {
        w[i] = w[i - 1] + sd * bm.normal();
    }

    std::vector<JumpRecord> jumps;
    double const mass = triplet->nu.total_mass();
    if (mass > 0.0) {
        StreamRng jr(seed, Stream::jumps);
        auto const n = static_cast<std::size_t>(jr.poisson(T * mass));
        std::vector<double> times(n);
        for (;;) {
            for (auto& t : times) {
                t = T * jr.uniform_open();
            }
            std::sort(times.begin(), times.end());
            if (std::adjacent_find(times.begin(), times.end()) == times.end()) {
                break;
            }
        }
        jumps.reserve(n);
        for (double t : times) {
            jumps.push_back({t, triplet->nu.sample(jr.uniform_open())});
        }
    }
    return LevyPath(std::move(triplet), std::move(w), std::move(jumps), seed);
}

LevyPath simulate_path(LevyTriplet const& triplet, std::size_t grid_size, std::uint64_t seed)
{
    return simulate_path(std::make_shared<LevyTriplet const>(triplet), grid_size, seed);
}

LevyPath restrict_jumps(LevyPath const& path, JumpSet const& theta)
{
    std::vector<JumpRecord> kept;
    for (auto const& j : path.jumps()) {
        if (theta.contains(j.size)) {
            kept.push_back(j);
        }
    }
    return path.with_jumps(std::move(kept));
}

double evaluate_X(LevyPath const& path, double t)
{
    auto const& trip = path.triplet();
    if (!(t >= 0.0 && t <= trip.horizon)) {
        throw std::out_of_range("evaluate_X: t outside [0, T]");
    }
    double large = 0.0;
    double small = 0.0;
    for (auto const& j : path.jumps()) {
        if (j.time > t) {
            break;
        }
        (std::abs(j.size) > 1.0 ? large : small) += j.size;
    }
    JumpSet const unit{Interval{-1.0, 0.0, true, false}, Interval{0.0, 1.0, false, true}};
    double const drift_small = trip.nu.integrate([](double x) { return x; }, &unit);
    return trip.gamma * t + trip.sigma * path.brownian_at(t) + large + (small - t * drift_small);
}

std::size_t count_jumps(LevyPath const& path, JumpSet const& theta)
{
    auto const jumps = path.jumps();
    return static_cast<std::size_t>(std::count_if(
        jumps.begin(), jumps.end(), [&](JumpRecord const& j) { return theta.contains(j.size); }));
}

std::string path_to_json(LevyPath const& path)
{
    nlohmann::json j;
    j["seed"] = path.seed();
    j["grid"] = path.grid();
    j["brownian"] = std::vector<double>(path.brownian().begin(), path.brownian().end());
    auto& jumps = j["jumps"] = nlohmann::json::array();
    for (auto const& r : path.jumps()) {
        jumps.push_back({{"time", r.time}, {"size", r.size}});
    }
    return j.dump();
}

LevyPath path_from_json(std::string const& text, LevyTriplet const& triplet)
{
    auto const j = nlohmann::json::parse(text);
    auto const grid = j.at("grid").get<std::vector<double>>();
    auto brownian = j.at("brownian").get<std::vector<double>>();
    if (grid.size() != brownian.size()) {
        throw std::invalid_argument("path JSON: grid and brownian lengths differ");
    }
    if (std::abs(grid.back() - triplet.horizon) > 1e-12 * triplet.horizon) {
        throw std::invalid_argument("path JSON: grid does not end at the triplet horizon");
    }
    std::vector<JumpRecord> jumps;
    for (auto const& r : j.at("jumps")) {
        jumps.push_back({r.at("time").get<double>(), r.at("size").get<double>()});
    }
    return LevyPath(std::make_shared<LevyTriplet const>(triplet), std::move(brownian), std::move(jumps),
                    j.at("seed").get<std::uint64_t>());
}

} // namespace lmc
