#include "decum/montecarlo.hpp"

#include <cmath>
#include <mutex>
#include <sstream>
#include <thread>
#include <vector>

#include "decum/errors.hpp"

namespace decum {

namespace {

// 64-bit finalizing scramble (xor-shift-multiply).  Bijective and strongly
// avalanching, so per-path seeds derived from consecutive path indices give
// unrelated streams.
std::uint64_t scramble(std::uint64_t z) {
    z ^= z >> 30;
    z *= 0xBF58476D1CE4E5B9ull;
    z ^= z >> 27;
    z *= 0x94D049BB133111EBull;
    z ^= z >> 31;
    return z;
}

// Weyl-sequence generator with the scramble as output function.  Kept
// hand-rolled so results are identical across platforms and standard
// library versions.
class Rng {
public:
    Rng(std::uint64_t seed, std::uint64_t stream)
        : state_(scramble(seed ^ scramble(stream * 0x9E3779B97F4A7C15ull +
                                          0xD1B54A32D192ED03ull))) {}

    std::uint64_t next() {
        state_ += 0x9E3779B97F4A7C15ull;
        return scramble(state_);
    }

    // Uniform on (0, 1]; never 0, so it is safe under log.
    double uniform() { return static_cast<double>((next() >> 11) + 1) * 0x1.0p-53; }

    // Standard normal via the Box-Muller transform, one spare cached.
    double normal() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        double u1 = uniform();
        double u2 = uniform();
        double r = std::sqrt(-2.0 * std::log(u1));
        double a = 2.0 * 3.14159265358979323846 * u2;
        spare_ = r * std::sin(a);
        have_spare_ = true;
        return r * std::cos(a);
    }

    // Unbiased-enough index pick via the high bits of a 128-bit product.
    std::uint64_t below(std::uint64_t n) {
        return static_cast<std::uint64_t>(
            (static_cast<unsigned __int128>(next()) * n) >> 64);
    }

private:
    std::uint64_t state_;
    bool have_spare_ = false;
    double spare_ = 0.0;
};

struct NormalSampler {
    double mean, sd;
    double operator()(Rng& rng) const { return mean + sd * rng.normal(); }
};
struct TwoPointSampler {
    double lo, hi;
    double operator()(Rng& rng) const { return (rng.next() & 1u) ? hi : lo; }
};
struct BootstrapSampler {
    const Eigen::ArrayXd* values;
    double operator()(Rng& rng) const {
        return (*values)[static_cast<Eigen::Index>(
            rng.below(static_cast<std::uint64_t>(values->size())))];
    }
};

constexpr int kMaxAttemptsPerDraw = 100000;

template <class Sampler>
double run_path(Rng& rng, const Sampler& sample, long t, double s,
                std::uint64_t& resampled) {
    double acc = 1.0;     // month-0 withdrawal costs exactly one unit of c
    double prod = 1.0;    // running product of gross returns
    double growth = 1.0;  // (1 + s)^i
    for (long i = 1; i < t; ++i) {
        double r = sample(rng);
        int attempts = 0;
        while (!(r > -1.0)) {
            if (++attempts > kMaxAttemptsPerDraw)
                throw ValidationError(
                    "return model keeps producing r <= -1; giving up on this path");
            ++resampled;
            r = sample(rng);
        }
        growth *= 1.0 + s;
        prod *= 1.0 + r;
        acc += growth / prod;
    }
    return acc;
}

template <class Sampler>
void run_range(const Sampler& sample, std::uint64_t seed, std::size_t begin,
               std::size_t end, long t, double s, std::vector<double>& out,
               std::uint64_t& resampled_out) {
    std::uint64_t resampled = 0;
    for (std::size_t p = begin; p < end; ++p) {
        Rng rng(seed, static_cast<std::uint64_t>(p));
        out[p] = run_path(rng, sample, t, s, resampled);
    }
    resampled_out = resampled;
}

template <class Sampler>
McEstimate run_all(const Sampler& sample, const PlanParams& plan, std::size_t n_paths,
                   std::uint64_t seed, unsigned threads) {
    const long t = *plan.horizon_months;
    const double s = plan.growth;

    if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
    threads = static_cast<unsigned>(
        std::min<std::size_t>(threads, n_paths));

    std::vector<double> wc(n_paths);
    std::vector<std::uint64_t> resampled(threads, 0);

    if (threads <= 1) {
        run_range(sample, seed, 0, n_paths, t, s, wc, resampled[0]);
    } else {
        std::mutex failure_mutex;
        std::exception_ptr failure;
        std::vector<std::thread> pool;
        pool.reserve(threads);
        std::size_t chunk = (n_paths + threads - 1) / threads;
        for (unsigned k = 0; k < threads; ++k) {
            std::size_t b = std::min<std::size_t>(k * chunk, n_paths);
            std::size_t e = std::min<std::size_t>(b + chunk, n_paths);
            pool.emplace_back([&, k, b, e] {
                try {
                    run_range(sample, seed, b, e, t, s, wc, resampled[k]);
                } catch (...) {
                    std::lock_guard<std::mutex> lock(failure_mutex);
                    if (!failure) failure = std::current_exception();
                }
            });
        }
        for (auto& th : pool) th.join();
        if (failure) std::rethrow_exception(failure);
    }

    std::uint64_t total_resampled = 0;
    for (auto c : resampled) total_resampled += c;
    const double needed =
        static_cast<double>(n_paths) * static_cast<double>(t - 1);
    if (needed > 0.0 && static_cast<double>(total_resampled) > 1e-4 * needed) {
        std::ostringstream msg;
        msg << "return model produced r <= -1 on "
            << static_cast<double>(total_resampled) / needed
            << " of draws (limit 1e-4); it is incompatible with compounding";
        throw ValidationError(msg.str());
    }

    // Fixed-order reduction keeps the estimate identical for any thread count.
    double sum = 0.0;
    for (double x : wc) sum += x;
    const double mean = sum / static_cast<double>(n_paths);
    double ss = 0.0;
    for (double x : wc) ss += (x - mean) * (x - mean);
    McEstimate est;
    est.value = mean;
    est.std_error =
        std::sqrt(ss / (static_cast<double>(n_paths - 1) * static_cast<double>(n_paths)));
    est.n_paths = n_paths;
    est.resampled_draws = total_resampled;
    return est;
}

}  // namespace

McEstimate mc_expected_w_over_c(const ReturnModel& model, const PlanParams& plan,
                                std::size_t n_paths, std::uint64_t seed,
                                unsigned threads) {
    if (!plan.horizon_months)
        throw ValidationError("Monte Carlo needs a finite horizon");
    if (*plan.horizon_months < 1)
        throw ValidationError("horizon must be at least 1 month");
    if (!(1.0 + plan.growth > 0.0))
        throw ValidationError("withdrawal growth must exceed -100%");
    if (n_paths < 2)
        throw ValidationError("need at least 2 paths to report a standard error");

    if (const auto* nm = std::get_if<NormalReturns>(&model)) {
        if (nm->variance < 0.0)
            throw ValidationError("normal return variance must be non-negative");
        return run_all(NormalSampler{nm->mean, std::sqrt(nm->variance)}, plan, n_paths,
                       seed, threads);
    }
    if (const auto* tp = std::get_if<TwoPointReturns>(&model)) {
        if (!(tp->lo > -1.0) || !(tp->hi > -1.0))
            throw ValidationError("two-point returns must both exceed -1");
        return run_all(TwoPointSampler{tp->lo, tp->hi}, plan, n_paths, seed, threads);
    }
    const auto& bs = std::get<BootstrapReturns>(model);
    if (bs.values.size() == 0)
        throw ValidationError("bootstrap sample is empty");
    for (Eigen::Index i = 0; i < bs.values.size(); ++i)
        if (!(bs.values[i] > -1.0))
            throw ValidationError("bootstrap sample contains a return at or below -1");
    return run_all(BootstrapSampler{&bs.values}, plan, n_paths, seed, threads);
}

}  // namespace decum
