#include "ionsim/readout.hpp"

#include "ionsim/threading.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

namespace ionsim {

namespace {

double log_poisson(uint32_t n, double mu) {
    if (mu <= 0.0)
        return n == 0 ? 0.0 : -std::numeric_limits<double>::infinity();
    return n * std::log(mu) - mu - std::lgamma(static_cast<double>(n) + 1.0);
}

double log_sum_exp(const std::vector<double>& v) {
    double m = -std::numeric_limits<double>::infinity();
    for (double a : v)
        m = std::max(m, a);
    if (!std::isfinite(m))
        return m;
    double s = 0.0;
    for (double a : v)
        s += std::exp(a - m);
    return m + std::log(s);
}

}  // namespace

int DetectionModel::bins() const {
    return static_cast<int>(std::round(detection_duration_s / bin_width_s));
}

void DetectionModel::validate() const {
    if (!(bright_rate_hz > 0.0) || dark_rate_hz < 0.0)
        throw std::invalid_argument("detection: bright rate must be > 0, dark rate >= 0");
    if (!(detection_duration_s > 0.0) || !(bin_width_s > 0.0))
        throw std::invalid_argument("detection: duration and bin width must be > 0");
    if (!(shelf_lifetime_s > 0.0))
        throw std::invalid_argument("detection: shelf lifetime must be > 0");
    const double ratio = detection_duration_s / bin_width_s;
    if (std::abs(ratio - std::round(ratio)) > 1e-9 || std::round(ratio) < 1.0)
        throw std::invalid_argument("detection: bin width must divide detection duration");
}

PhotonTrace simulate_trace(bool truth_dark, const DetectionModel& m, Rng& rng) {
    m.validate();
    const int K = m.bins();
    PhotonTrace trace;
    trace.truth_dark = truth_dark;
    trace.bins.resize(K);
    if (!truth_dark) {
        for (int k = 0; k < K; ++k)
            trace.bins[k] =
                static_cast<uint32_t>(rng.poisson((m.bright_rate_hz + m.dark_rate_hz) * m.bin_width_s));
        return trace;
    }
    const double t_decay = rng.exponential(m.shelf_lifetime_s);
    for (int k = 0; k < K; ++k) {
        const double t0 = k * m.bin_width_s;
        const double t1 = t0 + m.bin_width_s;
        const double bright_span = std::max(0.0, t1 - std::max(t0, t_decay));
        const double mu = m.dark_rate_hz * m.bin_width_s + m.bright_rate_hz * bright_span;
        trace.bins[k] = static_cast<uint32_t>(rng.poisson(mu));
    }
    return trace;
}

Classification classify(const PhotonTrace& trace, const DetectionModel& m) {
    m.validate();
    const int K = m.bins();
    if (static_cast<int>(trace.bins.size()) != K)
        throw std::invalid_argument("classify: trace bins do not match model geometry");
    const double w = m.bin_width_s;
    const double mu_bright = (m.bright_rate_hz + m.dark_rate_hz) * w;
    const double mu_dark = m.dark_rate_hz * w;
    const double mu_mixed = (m.dark_rate_hz + 0.5 * m.bright_rate_hz) * w;

    std::vector<double> lp_bright_bin(K), lp_dark_bin(K), lp_mixed_bin(K);
    for (int k = 0; k < K; ++k) {
        lp_bright_bin[k] = log_poisson(trace.bins[k], mu_bright);
        lp_dark_bin[k] = log_poisson(trace.bins[k], mu_dark);
        lp_mixed_bin[k] = log_poisson(trace.bins[k], mu_mixed);
    }

    Classification out;
    out.log_p_down = 0.0;
    for (int k = 0; k < K; ++k)
        out.log_p_down += lp_bright_bin[k];

    // prefix sums: dark factors before the decay bin, bright factors after
    std::vector<double> dark_prefix(K + 1, 0.0), bright_suffix(K + 1, 0.0);
    for (int k = 0; k < K; ++k)
        dark_prefix[k + 1] = dark_prefix[k] + lp_dark_bin[k];
    for (int k = K - 1; k >= 0; --k)
        bright_suffix[k] = bright_suffix[k + 1] + lp_bright_bin[k];

    std::vector<double> terms;
    terms.reserve(K + 1);
    for (int j = 0; j < K; ++j) {
        const double p_decay_in_bin =
            std::exp(-j * w / m.shelf_lifetime_s) - std::exp(-(j + 1) * w / m.shelf_lifetime_s);
        if (p_decay_in_bin <= 0.0)
            continue;
        terms.push_back(std::log(p_decay_in_bin) + dark_prefix[j] + lp_mixed_bin[j] +
                        bright_suffix[j + 1]);
    }
    // no decay within the detection window
    terms.push_back(-m.detection_duration_s / m.shelf_lifetime_s + dark_prefix[K]);
    out.log_p_up = log_sum_exp(terms);
    out.up = out.log_p_up >= out.log_p_down;
    return out;
}

long long total_count_threshold(const DetectionModel& m) {
    m.validate();
    if (m.dark_rate_hz <= 0.0)
        return 0;  // any photon at all is bright evidence
    const double log_ratio = std::log1p(m.bright_rate_hz / m.dark_rate_hz);
    return static_cast<long long>(
        std::floor(m.bright_rate_hz * m.detection_duration_s / log_ratio));
}

SideErrors poisson_threshold_errors(const DetectionModel& m) {
    const long long nc = total_count_threshold(m);
    const double mu_dark = m.dark_rate_hz * m.detection_duration_s;
    const double mu_bright = (m.bright_rate_hz + m.dark_rate_hz) * m.detection_duration_s;
    // CDF(nc; mu) by direct summation in log space
    auto poisson_cdf = [](long long nc_, double mu) {
        if (nc_ < 0)
            return 0.0;
        double log_term = -mu;  // log P(0)
        double cdf = std::exp(log_term);
        for (long long n = 1; n <= nc_; ++n) {
            log_term += std::log(mu) - std::log(static_cast<double>(n));
            cdf += std::exp(log_term);
        }
        return std::min(cdf, 1.0);
    };
    SideErrors e;
    e.dark_error = 1.0 - poisson_cdf(nc, mu_dark);   // dark trace above threshold
    e.bright_error = poisson_cdf(nc, mu_bright);     // bright trace at/below threshold
    return e;
}

DetectionBudget detection_error_budget(const DetectionModel& m, std::size_t shots_per_side,
                                       uint64_t seed, unsigned threads) {
    m.validate();
    if (shots_per_side == 0)
        throw std::invalid_argument("detection_error_budget: shots must be > 0");
    const unsigned shards = std::max(1u, std::min<unsigned>(threads * 4, 64));
    std::vector<std::size_t> dark_err(shards, 0), bright_err(shards, 0), count(shards, 0);
    parallel_for(shards, threads, [&](std::size_t shard) {
        Rng rng(seed, 0xdecaf, shard);
        const std::size_t lo = shots_per_side * shard / shards;
        const std::size_t hi = shots_per_side * (shard + 1) / shards;
        for (std::size_t i = lo; i < hi; ++i) {
            PhotonTrace dark = simulate_trace(true, m, rng);
            if (!classify(dark, m).up)
                ++dark_err[shard];
            PhotonTrace bright = simulate_trace(false, m, rng);
            if (classify(bright, m).up)
                ++bright_err[shard];
            ++count[shard];
        }
    });
    std::size_t derr = 0, berr = 0;
    for (unsigned s = 0; s < shards; ++s) {
        derr += dark_err[s];
        berr += bright_err[s];
    }
    DetectionBudget out;
    out.shots_per_side = shots_per_side;
    const double n = static_cast<double>(shots_per_side);
    out.errors.dark_error = derr / n;
    out.errors.bright_error = berr / n;
    out.dark_sigma = std::sqrt(std::max(out.errors.dark_error * (1 - out.errors.dark_error), 1.0 / n) / n);
    out.bright_sigma =
        std::sqrt(std::max(out.errors.bright_error * (1 - out.errors.bright_error), 1.0 / n) / n);
    return out;
}

}  // namespace ionsim
