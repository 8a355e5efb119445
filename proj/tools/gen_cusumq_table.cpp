// gen_cusumq_table.cpp
// Regenerates the 5% squared-CUSUM boundary half-width table embedded in
// critical_values.hpp. Under the null the squared recursive residuals are
// iid sigma^2 chi^2(1), so the normalized cumulative path is a
// Dirichlet(1/2,...,1/2) partial-sum process; the table entry for f degrees
// of freedom is the 95th percentile of max_t |s_t - t/f| over 10^6 exact
// draws. Seeded, so reruns reproduce the table verbatim.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <vector>

#include "cointkit/rng.hpp"

int main() {
    const int reps = 1000000;
    const std::uint64_t seed = 20240917ULL;
    std::printf("// f = T - k, c0 = 5%% critical half-width\n");
    for (int f = 10; f <= 200; f += 5) {
        std::vector<double> dmax(reps);
        for (int r = 0; r < reps; ++r) {
            double total = 0.0;
            double peak = 0.0;
            std::vector<double> w2(f);
            for (int t = 0; t < f; ++t) {
                const double g = cointkit::counter_gaussian(seed + r, 0, static_cast<std::uint64_t>(f) * 1000 + t);
                w2[t] = g * g;
                total += w2[t];
            }
            double run = 0.0;
            for (int t = 0; t < f; ++t) {
                run += w2[t];
                const double dev = std::fabs(run / total - static_cast<double>(t + 1) / f);
                peak = std::max(peak, dev);
            }
            dmax[r] = peak;
        }
        std::nth_element(dmax.begin(), dmax.begin() + (reps * 95) / 100, dmax.end());
        std::printf("{%d, %.4f},\n", f, dmax[(reps * 95) / 100]);
    }
    return 0;
}
