#include "replaylab/weighting/profile.hpp"

#include "replaylab/errors.hpp"
#include "replaylab/weighting/ere.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <complex>
#include <memory>
#include <mutex>
#include <numeric>

namespace replaylab::weighting {
namespace {

// FFTW planning is not thread-safe; execution on distinct plans is.
std::mutex& planner_mutex() {
    static std::mutex m;
    return m;
}

struct FftwFree {
    void operator()(void* p) const { fftw_free(p); }
};

template <typename T>
using FftwBuffer = std::unique_ptr<T[], FftwFree>;

template <typename T>
FftwBuffer<T> fftw_buffer(std::size_t n) {
    auto* p = static_cast<T*>(fftw_malloc(sizeof(T) * n));
    if (p == nullptr) throw std::bad_alloc();
    return FftwBuffer<T>(p);
}

std::vector<double> fft_convolution(std::span<const double> a, std::span<const double> b) {
    const std::size_t out_len = a.size() + b.size() - 1;
    std::size_t n = 1;
    while (n < out_len) n <<= 1;
    const std::size_t bins = n / 2 + 1;

    auto ra = fftw_buffer<double>(n);
    auto rb = fftw_buffer<double>(n);
    auto fa = fftw_buffer<fftw_complex>(bins);
    auto fb = fftw_buffer<fftw_complex>(bins);

    fftw_plan forward_a, forward_b, inverse;
    {
        std::lock_guard lock(planner_mutex());
        forward_a = fftw_plan_dft_r2c_1d(static_cast<int>(n), ra.get(), fa.get(), FFTW_ESTIMATE);
        forward_b = fftw_plan_dft_r2c_1d(static_cast<int>(n), rb.get(), fb.get(), FFTW_ESTIMATE);
        inverse = fftw_plan_dft_c2r_1d(static_cast<int>(n), fa.get(), ra.get(), FFTW_ESTIMATE);
    }
    std::fill_n(ra.get(), n, 0.0);
    std::fill_n(rb.get(), n, 0.0);
    std::copy(a.begin(), a.end(), ra.get());
    std::copy(b.begin(), b.end(), rb.get());
    fftw_execute(forward_a);
    fftw_execute(forward_b);
    for (std::size_t i = 0; i < bins; ++i) {
        const double re = fa[i][0] * fb[i][0] - fa[i][1] * fb[i][1];
        const double im = fa[i][0] * fb[i][1] + fa[i][1] * fb[i][0];
        fa[i][0] = re;
        fa[i][1] = im;
    }
    fftw_execute(inverse);
    {
        std::lock_guard lock(planner_mutex());
        fftw_destroy_plan(forward_a);
        fftw_destroy_plan(forward_b);
        fftw_destroy_plan(inverse);
    }
    std::vector<double> out(out_len);
    const double scale = 1.0 / static_cast<double>(n);
    for (std::size_t i = 0; i < out_len; ++i) out[i] = ra[i] * scale;
    return out;
}

std::vector<double> direct_convolution(std::span<const double> a, std::span<const double> b) {
    std::vector<double> out(a.size() + b.size() - 1, 0.0);
    for (std::size_t i = 0; i < a.size(); ++i)
        for (std::size_t j = 0; j < b.size(); ++j) out[i + j] += a[i] * b[j];
    return out;
}

// H[k] = 1 + 1/2 + ... + 1/k, H[0] = 0.
std::vector<double> harmonic_numbers(std::int64_t n) {
    std::vector<double> h(static_cast<std::size_t>(n) + 1, 0.0);
    long double acc = 0.0L;
    for (std::int64_t k = 1; k <= n; ++k) {
        acc += 1.0L / static_cast<long double>(k);
        h[static_cast<std::size_t>(k)] = static_cast<double>(acc);
    }
    return h;
}

// Adds `value` to every s in [lo, hi] (1-based) of a difference array.
void add_range(std::vector<double>& diff, std::int64_t lo, std::int64_t hi, double value) {
    if (lo > hi) return;
    diff[static_cast<std::size_t>(lo)] += value;
    diff[static_cast<std::size_t>(hi) + 1] -= value;
}

// tail[s] = sum over n >= s with n - cut[n] >= s of scale[n] / (n - s + 1),
// for s = 1..T (vectors indexed 1..T; index 0 unused). `cut` is non-decreasing
// with cut[n] <= n.
//
// Computed as the full correlation over all n >= s minus the pairs with age
// n - s + 1 <= cut[n]. Those excluded pairs are swept in blocks of n: within a
// block every n excludes at least cut[block start] ages, which is one
// rectangle handled by a single convolution; the few remaining ages are summed
// directly.
std::vector<double> truncated_harmonic_tail(const std::vector<double>& scale,
                                            const std::vector<std::int64_t>& cut,
                                            std::int64_t horizon) {
    const auto T = static_cast<std::size_t>(horizon);
    std::vector<double> tail(T + 1, 0.0);

    std::vector<double> inv_age(T);
    for (std::size_t j = 0; j < T; ++j) inv_age[j] = 1.0 / static_cast<double>(j + 1);

    // Full correlation: reverse the per-step scale and convolve with 1/a.
    std::vector<double> reversed(T);
    for (std::size_t p = 0; p < T; ++p) reversed[p] = scale[T - p];
    const auto full = linear_convolution(reversed, inv_age);
    for (std::size_t s = 1; s <= T; ++s) tail[s] = full[T - s];

    constexpr std::int64_t block = 4096;
    for (std::int64_t n0 = 1; n0 <= horizon; n0 += block) {
        const std::int64_t n1 = std::min(horizon, n0 + block - 1);
        const std::int64_t rect = cut[static_cast<std::size_t>(n0)];
        if (rect > 0) {
            std::vector<double> x(static_cast<std::size_t>(n1 - n0 + 1));
            for (std::int64_t n = n0; n <= n1; ++n)
                x[static_cast<std::size_t>(n - n0)] = scale[static_cast<std::size_t>(n)];
            std::vector<double> kernel(static_cast<std::size_t>(rect));
            for (std::int64_t j = 0; j < rect; ++j)
                kernel[static_cast<std::size_t>(j)] = 1.0 / static_cast<double>(rect - j);
            const auto part = linear_convolution(x, kernel);
            const std::int64_t origin = n0 - rect + 1;
            for (std::size_t q = 0; q < part.size(); ++q)
                tail[static_cast<std::size_t>(origin) + q] -= part[q];
        }
        for (std::int64_t n = n0; n <= n1; ++n) {
            const double sc = scale[static_cast<std::size_t>(n)];
            for (std::int64_t a = rect + 1; a <= cut[static_cast<std::size_t>(n)]; ++a)
                tail[static_cast<std::size_t>(n - a + 1)] -= sc / static_cast<double>(a);
        }
    }
    return tail;
}

SelectionProfile shape_profile(const WeightScheme& scheme, std::int64_t horizon,
                               double draws_per_step) {
    const auto T = static_cast<std::size_t>(horizon);
    const auto harmonic = harmonic_numbers(horizon);

    std::vector<double> diff(T + 2, 0.0);
    std::vector<double> tail_scale(T + 1, 0.0);
    std::vector<std::int64_t> cut(T + 1, 0);
    bool has_tail = false;

    for (std::int64_t n = 1; n <= horizon; ++n) {
        const AgeWeightShape shape = age_weight_shape(scheme, n);
        const std::int64_t plateau_len = std::min(shape.plateau_len, n);
        const std::int64_t bonus_len = std::min(shape.bonus_len, n);
        const double mass =
            static_cast<double>(plateau_len) * shape.plateau +
            shape.tail_scale * (harmonic[static_cast<std::size_t>(n)] -
                                harmonic[static_cast<std::size_t>(plateau_len)]) +
            static_cast<double>(n) * shape.shift + static_cast<double>(bonus_len) * shape.bonus;
        if (!(mass > 0.0)) throw NumericalError("selection weights have no mass at some step");
        const double g = draws_per_step / mass;

        // Age a at step n belongs to the entry inserted at s = n - a + 1.
        add_range(diff, n - plateau_len + 1, n, g * shape.plateau);
        add_range(diff, 1, n, g * shape.shift);
        add_range(diff, n - bonus_len + 1, n, g * shape.bonus);
        tail_scale[static_cast<std::size_t>(n)] = g * shape.tail_scale;
        cut[static_cast<std::size_t>(n)] = plateau_len;
        has_tail = has_tail || shape.tail_scale != 0.0;
    }

    SelectionProfile profile;
    profile.expected_count.resize(T);
    double running = 0.0;
    for (std::size_t s = 1; s <= T; ++s) {
        running += diff[s];
        profile.expected_count[s - 1] = running;
    }
    if (has_tail) {
        const auto tail = truncated_harmonic_tail(tail_scale, cut, horizon);
        for (std::size_t s = 1; s <= T; ++s) profile.expected_count[s - 1] += tail[s];
    }
    return profile;
}

SelectionProfile staged_profile(const WeightScheme& scheme, std::int64_t horizon,
                                double draws_per_step) {
    const auto T = static_cast<std::size_t>(horizon);
    const std::int64_t stages = scheme.updates_per_episode;
    std::vector<double> decay(static_cast<std::size_t>(stages));
    for (std::int64_t k = 1; k <= stages; ++k)
        decay[static_cast<std::size_t>(k - 1)] =
            std::pow(scheme.eta, static_cast<double>(k) * static_cast<double>(scheme.max_horizon) /
                                     static_cast<double>(stages));

    std::vector<double> diff(T + 2, 0.0);
    for (std::int64_t n = 1; n <= horizon; ++n) {
        const std::int64_t c_min = std::min(scheme.min_coverage, n);
        // Every stage contributes c_k * (1 / c_k) = 1 to the total mass.
        const double g = draws_per_step / static_cast<double>(stages);
        std::int64_t k = 0;
        while (k < stages) {
            const auto span = static_cast<std::int64_t>(
                std::llround(static_cast<double>(n) * decay[static_cast<std::size_t>(k)]));
            const std::int64_t c = std::clamp(span, c_min, n);
            // Coverages are non-increasing; merge the run of equal windows.
            std::int64_t run = 1;
            while (k + run < stages) {
                const auto next = static_cast<std::int64_t>(std::llround(
                    static_cast<double>(n) * decay[static_cast<std::size_t>(k + run)]));
                if (std::clamp(next, c_min, n) != c) break;
                ++run;
            }
            add_range(diff, n - c + 1, n, g * static_cast<double>(run) / static_cast<double>(c));
            k += run;
        }
    }
    SelectionProfile profile;
    profile.expected_count.resize(T);
    double running = 0.0;
    for (std::size_t s = 1; s <= T; ++s) {
        running += diff[s];
        profile.expected_count[s - 1] = running;
    }
    return profile;
}

}  // namespace

double AgeWeightShape::at(std::int64_t age) const {
    double w = age <= plateau_len ? plateau : tail_scale / static_cast<double>(age);
    w += shift;
    if (age <= bonus_len) w += bonus;
    return w;
}

AgeWeightShape age_weight_shape(const WeightScheme& scheme, std::int64_t size) {
    AgeWeightShape shape;
    switch (scheme.kind) {
        case SchemeKind::Uniform:
            shape.plateau_len = size;
            shape.plateau = 1.0;
            return shape;
        case SchemeKind::OneOverAge:
            shape.tail_scale = 1.0;
            return shape;
        case SchemeKind::EREExact:
        case SchemeKind::EREApprox: {
            const WeightScheme bound = scheme.bound_to(size);
            bound.validate();
            const double n0 = static_cast<double>(bound.buffer_size);
            const double c_min = static_cast<double>(bound.min_coverage);
            const double l0 = static_cast<double>(bound.max_horizon);
            const double log_eta = std::log(bound.eta);
            const double last_span = n0 * std::exp(l0 * log_eta);
            const double reach = std::max(c_min, last_span);

            double scale = 1.0;
            if (scheme.kind == SchemeKind::EREExact) {
                const double k = static_cast<double>(bound.updates_per_episode);
                scale = 1.0 / -std::expm1(l0 / k * log_eta);
                shape.bonus =
                    k / c_min * std::max(1.0 - std::log(c_min / n0) / (l0 * log_eta), 0.0);
            } else {
                shape.bonus = std::max(std::log(c_min / n0) - l0 * log_eta, 0.0) / c_min;
            }
            shape.plateau_len = static_cast<std::int64_t>(std::floor(reach));
            shape.plateau = scale / reach;
            shape.tail_scale = scale;
            shape.shift = -scale / n0;
            shape.bonus_len = bound.min_coverage;
            return shape;
        }
        case SchemeKind::EREStaged:
        case SchemeKind::PriorityBaseline: break;
    }
    throw ParameterError("scheme has no plateau/tail shape");
}

SelectionProfile expected_selection_profile(const WeightScheme& scheme, std::int64_t horizon,
                                            std::int64_t batch_size,
                                            std::int64_t updates_per_step) {
    if (horizon < 1) throw ParameterError("profile horizon must be >= 1");
    if (batch_size < 1 || updates_per_step < 1)
        throw ParameterError("batch size and updates per step must be >= 1");
    if (scheme.kind == SchemeKind::PriorityBaseline)
        throw ParameterError("priority weights depend on data, not age; no analytic profile");
    scheme.bound_to(1).validate();

    const double draws = static_cast<double>(batch_size) * static_cast<double>(updates_per_step);
    SelectionProfile profile = scheme.kind == SchemeKind::EREStaged
                                   ? staged_profile(scheme, horizon, draws)
                                   : shape_profile(scheme, horizon, draws);
    profile.scheme = scheme;
    profile.horizon = horizon;
    profile.batch_size = batch_size;
    profile.updates_per_step = updates_per_step;
    return profile;
}

double coefficient_of_variation(std::span<const double> values) {
    if (values.empty()) throw ParameterError("coefficient of variation of an empty range");
    const double n = static_cast<double>(values.size());
    const double mean = std::accumulate(values.begin(), values.end(), 0.0) / n;
    double ss = 0.0;
    for (double v : values) ss += (v - mean) * (v - mean);
    return std::sqrt(ss / n) / mean;
}

std::vector<double> linear_convolution(std::span<const double> a, std::span<const double> b) {
    if (a.empty() || b.empty()) return {};
    if (std::min(a.size(), b.size()) <= 32 || a.size() * b.size() <= (1u << 16))
        return direct_convolution(a, b);
    return fft_convolution(a, b);
}

}  // namespace replaylab::weighting
