#include "lmc/chaos.hpp"

#include "lmc/rng.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>
#include <stdexcept>

namespace lmc {
namespace {

bool increasing(Tuple pts)
{
    for (std::size_t i = 1; i < pts.size(); ++i) {
        if (!(pts[i - 1].time < pts[i].time)) {
            return false;
        }
    }
    return true;
}

std::vector<JumpRecord> without(Tuple pts, std::size_t slot)
{
    std::vector<JumpRecord> out;
    out.reserve(pts.size() - 1);
    for (std::size_t i = 0; i < pts.size(); ++i) {
        if (i != slot) {
            out.push_back(pts[i]);
        }
    }
    return out;
}

OffSimplex derived_policy(SimplexIntegrand const& phi)
{
    return phi.off_simplex == OffSimplex::reject ? OffSimplex::reject : OffSimplex::native;
}

double log_choose(double k, double n)
{
    return std::lgamma(k + 1.0) - std::lgamma(n + 1.0) - std::lgamma(k - n + 1.0);
}

} // namespace

double SimplexIntegrand::operator()(Tuple pts) const
{
    if (pts.size() != arity) {
        throw std::invalid_argument("integrand '" + name + "': wrong number of arguments");
    }
    if (off_simplex == OffSimplex::native || increasing(pts)) {
        return eval(pts);
    }
    if (off_simplex == OffSimplex::reject) {
        throw std::domain_error("integrand '" + name + "' is only defined for increasing times");
    }
    std::vector<JumpRecord> sorted(pts.begin(), pts.end());
    std::stable_sort(sorted.begin(), sorted.end(),
                     [](JumpRecord const& a, JumpRecord const& b) { return a.time < b.time; });
    return eval(sorted);
}

double SimplexIntegrand::dt(Tuple pts, std::size_t slot) const
{
    if (pts.size() != arity || slot >= arity) {
        throw std::invalid_argument("integrand '" + name + "': bad argument count or slot");
    }
    if (off_simplex == OffSimplex::native || increasing(pts)) {
        return dt_eval(pts, slot);
    }
    if (off_simplex == OffSimplex::reject) {
        throw std::domain_error("integrand '" + name + "' is only defined for increasing times");
    }
    std::vector<std::size_t> order(pts.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return pts[a].time < pts[b].time; });
    std::vector<JumpRecord> sorted(pts.size());
    std::size_t moved = 0;
    for (std::size_t i = 0; i < order.size(); ++i) {
        sorted[i] = pts[order[i]];
        if (order[i] == slot) {
            moved = i;
        }
    }
    return dt_eval(sorted, moved);
}

void validate_integrand(SimplexIntegrand const& phi, std::span<std::vector<JumpRecord> const> samples)
{
    if (!phi.eval || !phi.dt_eval) {
        throw std::invalid_argument("integrand '" + phi.name + "': eval and dt_eval must both be set");
    }
    for (auto const& pts : samples) {
        if (pts.size() != phi.arity) {
            throw std::invalid_argument("validate_integrand: sample of wrong arity");
        }
        for (std::size_t j = 0; j < phi.arity; ++j) {
            double gap = kInfinity;
            if (j > 0) {
                gap = std::min(gap, pts[j].time - pts[j - 1].time);
            }
            if (j + 1 < pts.size()) {
                gap = std::min(gap, pts[j + 1].time - pts[j].time);
            }
            double const delta = std::min(1e-5, 0.25 * gap);
            auto up = pts;
            auto down = pts;
            up[j].time += delta;
            down[j].time -= delta;
            double const fd = (phi(up) - phi(down)) / (2.0 * delta);
            double const an = phi.dt(pts, j);
            double const tol = 1e-4 * (1.0 + std::abs(an) + std::abs(phi(pts)));
            if (!(std::abs(fd - an) <= tol)) {
                std::ostringstream os;
                os << "integrand '" << phi.name << "': slot " << j << " time derivative " << an
                   << " disagrees with finite difference " << fd;
                throw std::invalid_argument(os.str());
            }
        }
    }
}

SimplexIntegrand product_integrand(Kernel psi, std::size_t n)
{
    if (n == 0) {
        throw std::invalid_argument("product_integrand: arity must be >= 1");
    }
    SimplexIntegrand phi;
    phi.arity = n;
    phi.eval = [psi](Tuple pts) {
        double acc = 1.0;
        for (auto const& z : pts) {
            acc *= psi.value(z.time, z.size);
        }
        return acc;
    };
    phi.dt_eval = [psi](Tuple pts, std::size_t slot) {
        double acc = 1.0;
        for (std::size_t i = 0; i < pts.size(); ++i) {
            acc *= i == slot ? psi.dt(pts[i].time, pts[i].size) : psi.value(pts[i].time, pts[i].size);
        }
        return acc;
    };
    phi.off_simplex = OffSimplex::native;
    phi.name = "prod(" + psi.name + ")^" + std::to_string(n);
    phi.product_factor = std::move(psi);
    return phi;
}

SimplexIntegrand first_order(Kernel psi)
{
    return product_integrand(std::move(psi), 1);
}

void for_each_tuple(std::span<JumpRecord const> jumps, std::size_t n, std::function<void(Tuple)> const& visit)
{
    std::size_t const N = jumps.size();
    if (n == 0 || n > N) {
        return;
    }
    std::vector<std::size_t> idx(n);
    std::iota(idx.begin(), idx.end(), 0);
    std::vector<JumpRecord> buf(n);
    for (;;) {
        for (std::size_t i = 0; i < n; ++i) {
            buf[i] = jumps[idx[i]];
        }
        visit(buf);
        std::size_t i = n;
        while (i > 0 && idx[i - 1] == N - n + (i - 1)) {
            --i;
        }
        if (i == 0) {
            return;
        }
        ++idx[i - 1];
        for (std::size_t j = i; j < n; ++j) {
            idx[j] = idx[j - 1] + 1;
        }
    }
}

std::vector<JumpRecord> theta_jumps(LevyPath const& path, JumpSet const& theta)
{
    std::vector<JumpRecord> out;
    for (auto const& j : path.jumps()) {
        if (theta.contains(j.size)) {
            out.push_back(j);
        }
    }
    return out;
}

double multiple_integral(LevyPath const& path, JumpSet const& theta, SimplexIntegrand const& phi,
                         ChaosOptions const& opts)
{
    if (phi.arity == 0) {
        throw std::invalid_argument("multiple_integral: n must be >= 1");
    }
    auto const& trip = path.triplet();
    if (!trip.nu.finite()) {
        double const cut = trip.truncation.value_or(0.0);
        double const d = theta.distance_from_zero();
        if (d == 0.0 || d < cut) {
            std::ostringstream os;
            os << "multiple_integral: Theta = " << theta.describe() << " reaches below the truncation level " << cut
               << " of an infinite-activity measure, so nu(Theta) is not finite";
            throw std::invalid_argument(os.str());
        }
    }
    auto const jumps = theta_jumps(path, theta);
    std::size_t const n = phi.arity;
    if (jumps.size() < n) {
        return 0.0;
    }
    double const work = static_cast<double>(n) * log_choose(static_cast<double>(jumps.size()),
                                                            static_cast<double>(n)) / std::log(2.0);
    if (work > opts.work_budget) {
        std::ostringstream os;
        os << "multiple_integral: enumerating C(" << jumps.size() << ", " << n
           << ") tuples exceeds the work budget " << opts.work_budget;
        throw std::runtime_error(os.str());
    }
    double acc = 0.0;
    for_each_tuple(jumps, n, [&](Tuple pts) { acc += phi(pts); });
    return acc;
}

SimplexIntegrand tensor_tilde(SimplexIntegrand const& phi_n, SimplexIntegrand const& phi_1)
{
    if (phi_1.arity != 1) {
        throw std::invalid_argument("tensor_tilde: second factor must have arity 1");
    }
    SimplexIntegrand out;
    out.arity = phi_n.arity + 1;
    out.off_simplex = derived_policy(phi_n);
    out.name = phi_n.name + " (x)~ " + phi_1.name;
    out.eval = [phi_n, phi_1](Tuple pts) {
        double acc = 0.0;
        for (std::size_t j = 0; j < pts.size(); ++j) {
            acc += phi_n(without(pts, j)) * phi_1(pts.subspan(j, 1));
        }
        return acc;
    };
    out.dt_eval = [phi_n, phi_1](Tuple pts, std::size_t slot) {
        double acc = 0.0;
        for (std::size_t j = 0; j < pts.size(); ++j) {
            auto const rest = without(pts, j);
            if (j == slot) {
                acc += phi_n(rest) * phi_1.dt(pts.subspan(j, 1), 0);
            } else {
                std::size_t const moved = slot < j ? slot : slot - 1;
                acc += phi_n.dt(rest, moved) * phi_1(pts.subspan(j, 1));
            }
        }
        return acc;
    };
    return out;
}

SimplexIntegrand star_contract(SimplexIntegrand const& phi_n, SimplexIntegrand const& phi_1)
{
    if (phi_1.arity != 1) {
        throw std::invalid_argument("star_contract: second factor must have arity 1");
    }
    SimplexIntegrand out;
    out.arity = phi_n.arity;
    out.off_simplex = derived_policy(phi_n);
    out.name = phi_n.name + " * " + phi_1.name;
    out.eval = [phi_n, phi_1](Tuple pts) {
        double s = 0.0;
        for (std::size_t j = 0; j < pts.size(); ++j) {
            s += phi_1(pts.subspan(j, 1));
        }
        return phi_n(pts) * s;
    };
    out.dt_eval = [phi_n, phi_1](Tuple pts, std::size_t slot) {
        double s = 0.0;
        for (std::size_t j = 0; j < pts.size(); ++j) {
            s += phi_1(pts.subspan(j, 1));
        }
        return phi_n.dt(pts, slot) * s + phi_n(pts) * phi_1.dt(pts.subspan(slot, 1), 0);
    };
    return out;
}

SimplexIntegrand tensor_product(SimplexIntegrand const& phi_n, SimplexIntegrand const& phi_1)
{
    if (phi_1.arity != 1) {
        throw std::invalid_argument("tensor_product: second factor must have arity 1");
    }
    SimplexIntegrand out;
    out.arity = phi_n.arity + 1;
    out.off_simplex = derived_policy(phi_n);
    out.name = phi_n.name + " (x) " + phi_1.name;
    std::size_t const n = phi_n.arity;
    out.eval = [phi_n, phi_1, n](Tuple pts) {
        return phi_n(pts.first(n)) * phi_1(pts.subspan(n, 1));
    };
    out.dt_eval = [phi_n, phi_1, n](Tuple pts, std::size_t slot) {
        if (slot < n) {
            return phi_n.dt(pts.first(n), slot) * phi_1(pts.subspan(n, 1));
        }
        return phi_n(pts.first(n)) * phi_1.dt(pts.subspan(n, 1), 0);
    };
    return out;
}

SimplexIntegrand symmetrize(SimplexIntegrand const& phi)
{
    if (phi.off_simplex == OffSimplex::reject) {
        throw std::invalid_argument("symmetrize: integrand '" + phi.name
                                    + "' is only defined on the ordered simplex");
    }
    SimplexIntegrand out;
    out.arity = phi.arity;
    out.off_simplex = OffSimplex::native;
    out.name = "sym(" + phi.name + ")";
    out.eval = [phi](Tuple pts) {
        std::vector<std::size_t> perm(pts.size());
        std::iota(perm.begin(), perm.end(), 0);
        std::vector<JumpRecord> buf(pts.size());
        double acc = 0.0;
        double count = 0.0;
        do {
            for (std::size_t i = 0; i < perm.size(); ++i) {
                buf[i] = pts[perm[i]];
            }
            acc += phi(buf);
            count += 1.0;
        } while (std::next_permutation(perm.begin(), perm.end()));
        return acc / count;
    };
    out.dt_eval = [phi](Tuple pts, std::size_t slot) {
        std::vector<std::size_t> perm(pts.size());
        std::iota(perm.begin(), perm.end(), 0);
        std::vector<JumpRecord> buf(pts.size());
        double acc = 0.0;
        double count = 0.0;
        do {
            std::size_t where = 0;
            for (std::size_t i = 0; i < perm.size(); ++i) {
                buf[i] = pts[perm[i]];
                if (perm[i] == slot) {
                    where = i;
                }
            }
            acc += phi.dt(buf, where);
            count += 1.0;
        } while (std::next_permutation(perm.begin(), perm.end()));
        return acc / count;
    };
    return out;
}

ProductIdentity product_identity_residual(LevyPath const& path, JumpSet const& theta,
                                          SimplexIntegrand const& phi_n, SimplexIntegrand const& phi_1)
{
    ProductIdentity out;
    out.lhs = multiple_integral(path, theta, phi_n) * multiple_integral(path, theta, phi_1);
    out.rhs = multiple_integral(path, theta, tensor_tilde(phi_n, phi_1))
              + multiple_integral(path, theta, star_contract(phi_n, phi_1));
    out.residual = std::abs(out.lhs - out.rhs);
    return out;
}

double moment_constant(std::size_t n, double p, double lambda, MomentConstant kind)
{
    if (n == 0 || !(p >= 1.0) || !(lambda >= 0.0)) {
        throw std::invalid_argument("moment_constant: need n >= 1, p >= 1, lambda >= 0");
    }
    auto const log_weight = [&](double k) {
        return kind == MomentConstant::published ? (p - 1.0) * std::log(k)
                                                 : (p - 1.0) * log_choose(k, static_cast<double>(n));
    };
    double const nn = static_cast<double>(n);
    if (lambda == 0.0) {
        return std::exp(log_weight(nn));
    }
    double sum = 0.0;
    double const log_lambda = std::log(lambda);
    for (std::size_t i = 0; i < 100000; ++i) {
        double const k = nn + static_cast<double>(i);
        double const term = std::exp(static_cast<double>(i) * log_lambda - std::lgamma(i + 1.0)
                                     + log_weight(k) - lambda);
        sum += term;
        // The ratio of consecutive terms decreases in i, so once it is below
        // 1/2 the tail is bounded by the current term.
        double const ratio = std::exp(log_lambda - std::log(i + 1.0) + log_weight(k + 1.0) - log_weight(k));
        if (ratio < 0.5 && term < 1e-17 * sum) {
            return sum;
        }
    }
    throw std::runtime_error("moment_constant: series did not converge");
}

SimplexNorm simplex_lp_integral(LevyTriplet const& triplet, JumpSet const& theta,
                                SimplexIntegrand const& phi, double p, std::size_t samples,
                                std::uint64_t seed)
{
    double const T = triplet.horizon;
    std::size_t const n = phi.arity;
    double const log_nfact = std::lgamma(static_cast<double>(n) + 1.0);
    if (phi.product_factor) {
        auto const& psi = *phi.product_factor;
        double const one = triplet.nu.integrate_time_space(
            [&](double t, double x) { return std::pow(std::abs(psi.value(t, x)), p); }, T, &theta);
        return {std::exp(static_cast<double>(n) * std::log(one) - log_nfact), 0.0};
    }
    double const mass = triplet.nu.mass(theta);
    if (mass == 0.0) {
        return {0.0, 0.0};
    }
    double const lambda = T * mass;
    StreamRng rng(seed, Stream::auxiliary);
    std::vector<JumpRecord> pts(n);
    double sum = 0.0;
    double sum_sq = 0.0;
    for (std::size_t s = 0; s < samples; ++s) {
        for (auto& z : pts) {
            z.time = T * rng.uniform_open();
            do {
                z.size = triplet.nu.sample(rng.uniform_open());
            } while (!theta.contains(z.size));
        }
        std::sort(pts.begin(), pts.end(),
                  [](JumpRecord const& a, JumpRecord const& b) { return a.time < b.time; });
        double const v = std::pow(std::abs(phi(pts)), p);
        sum += v;
        sum_sq += v * v;
    }
    double const scale = std::exp(static_cast<double>(n) * std::log(lambda) - log_nfact);
    double const mean = sum / static_cast<double>(samples);
    double const var = std::max(0.0, sum_sq / static_cast<double>(samples) - mean * mean);
    return {scale * mean, scale * std::sqrt(var / static_cast<double>(samples))};
}

} // namespace lmc
