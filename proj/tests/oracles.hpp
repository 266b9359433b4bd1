#pragma once

// Independent reference implementations used only by the tests. They follow
// the textbook definitions with explicit loops and share no code with the
// library's fast paths.

#include "dwid/image.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

namespace oracle {

struct Stats {
    std::vector<std::vector<double>> mu;    // [rep][pixel]
    std::vector<std::vector<double>> sigma; // [rep][pixel]
};

inline double naive_median(std::vector<double> v) {
    std::sort(v.begin(), v.end());
    const std::size_t n = v.size();
    return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

/// Two-pass mean / population std over the replicate-padded P x P window.
inline Stats brute_patch_stats(const dwid::RepetitionStack& stack, int patch) {
    const int rows = stack.rows();
    const int cols = stack.cols();
    const int h = patch / 2;
    Stats out;
    for (const auto& im : stack.images) {
        std::vector<double> mu(im.size()), sd(im.size());
        for (int r = 0; r < rows; ++r)
            for (int c = 0; c < cols; ++c) {
                std::vector<double> vals;
                for (int dr = -h; dr <= h; ++dr)
                    for (int dc = -h; dc <= h; ++dc) {
                        const int rr = std::min(std::max(r + dr, 0), rows - 1);
                        const int cc = std::min(std::max(c + dc, 0), cols - 1);
                        vals.push_back(im(rr, cc));
                    }
                double m = 0.0;
                for (double v : vals) m += v;
                m /= static_cast<double>(vals.size());
                double ss = 0.0;
                for (double v : vals) ss += (v - m) * (v - m);
                mu[static_cast<std::size_t>(r) * cols + c] = m;
                sd[static_cast<std::size_t>(r) * cols + c] = std::sqrt(ss / static_cast<double>(vals.size()));
            }
        out.mu.push_back(mu);
        out.sigma.push_back(sd);
    }
    return out;
}

/// The two-sigmoid window taken literally, g(d; s) - g(d; -s), evaluated in
/// extended precision to soften the cancellation far from the centre.
inline double literal_window(double d, double s, double nu, double lambda) {
    const long double ld = d, ls = s, lnu = nu, llam = lambda;
    const auto g = [&](long double ss) {
        return 1.0L / (1.0L + std::exp(-(llam / std::fabs(lnu * ls)) * (ld + lnu * ss)));
    };
    return static_cast<double>(g(ls) - g(-ls));
}

/// Full AWA with explicit per-pixel loops; returns weights[rep][pixel].
inline std::vector<std::vector<double>> brute_awa(const dwid::RepetitionStack& stack, const std::vector<bool>& subset,
                                                  int patch, double nu, double lambda) {
    const Stats st = brute_patch_stats(stack, patch);
    const int n = stack.size();
    const std::size_t px = stack.images.front().size();

    std::vector<double> pooled;
    for (const auto& im : stack.images) pooled.insert(pooled.end(), im.data.begin(), im.data.end());
    std::sort(pooled.begin(), pooled.end());
    const auto rank = static_cast<std::size_t>(std::ceil(0.98 * static_cast<double>(pooled.size())));
    const double eps = 1e-12 * std::abs(pooled[rank == 0 ? 0 : rank - 1]);

    std::vector<std::vector<double>> w(static_cast<std::size_t>(n), std::vector<double>(px));
    for (std::size_t i = 0; i < px; ++i) {
        std::vector<double> mus, sds;
        for (int k = 0; k < n; ++k)
            if (subset[k]) {
                mus.push_back(st.mu[k][i]);
                sds.push_back(st.sigma[k][i]);
            }
        const double m = naive_median(mus);
        const double s = naive_median(sds);
        std::vector<double> f(static_cast<std::size_t>(n), 0.0);
        double total = 0.0;
        if (s > eps)
            for (int k = 0; k < n; ++k) total += f[k] = literal_window(st.mu[k][i] - m, s, nu, lambda);
        for (int k = 0; k < n; ++k)
            w[k][i] = (s <= eps || total < 1e-12) ? 1.0 / n : f[k] / total;
    }
    return w;
}

inline dwid::RepetitionStack random_stack(std::mt19937_64& rng, int max_side, int max_reps) {
    std::uniform_int_distribution<int> side(5, max_side);
    std::uniform_int_distribution<int> reps(1, max_reps);
    std::uniform_real_distribution<double> level(10.0, 200.0);
    std::normal_distribution<double> noise(0.0, 1.0);
    dwid::RepetitionStack s;
    s.b_value = 800.0;
    const int rows = side(rng), cols = side(rng), n = reps(rng);
    const double base = level(rng);
    const double sigma = 0.02 * base + 0.5;
    for (int k = 0; k < n; ++k) {
        dwid::Image im(rows, cols);
        const double atten = (rng() % 3 == 0) ? 0.3 : 1.0;
        for (int r = 0; r < rows; ++r)
            for (int c = 0; c < cols; ++c) {
                const bool hit = atten < 1.0 && r < rows / 2;
                im(r, c) = static_cast<float>(std::max(0.0, base * (hit ? atten : 1.0) + sigma * noise(rng)));
            }
        s.images.push_back(std::move(im));
    }
    return s;
}

} // namespace oracle
