#include "lmc/mc.hpp"

namespace lmc {

double pairwise_sum(std::span<double const> values)
{
    if (values.size() <= 16) {
        double acc = 0.0;
        for (double v : values) {
            acc += v;
        }
        return acc;
    }
    std::size_t const half = values.size() / 2;
    return pairwise_sum(values.first(half)) + pairwise_sum(values.subspan(half));
}

SampleStats sample_stats(std::span<double const> values)
{
    SampleStats s;
    s.n = values.size();
    if (s.n == 0) {
        return s;
    }
    s.mean = pairwise_sum(values) / static_cast<double>(s.n);
    if (s.n > 1) {
        std::vector<double> sq(values.size());
        for (std::size_t i = 0; i < values.size(); ++i) {
            double const d = values[i] - s.mean;
            sq[i] = d * d;
        }
        s.variance = pairwise_sum(sq) / static_cast<double>(s.n - 1);
        s.std_error = std::sqrt(s.variance / static_cast<double>(s.n));
    }
    return s;
}

unsigned resolve_threads(unsigned requested)
{
    if (requested > 0) {
        return requested;
    }
    return std::max(1u, std::thread::hardware_concurrency());
}

} // namespace lmc
