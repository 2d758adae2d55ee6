// Trace a handful of Hopf fibers, confirm they are parallel great circles,
// and export one of them as CSV.

#include <cstdio>
#include <fstream>

#include "hopftk/fibers.hpp"

using namespace hopftk;

int main() {
    const auto hopf = maps::hopf_complex(1);
    Rng rng(7);

    std::printf("%-28s %-14s %-14s\n", "base point", "gc residual", "points");
    std::vector<fibers::FiberCurve> curves;
    for (int i = 0; i < 4; ++i) {
        const Vec y = rng.unit_vec(3) * 0.5;
        const auto fiber = fibers::trace_fiber(hopf, {y, 0.5}).at(0);
        const auto fit = fibers::fit_great_circle(fiber);
        std::printf("(%+.3f, %+.3f, %+.3f)      %-14.3e %zu\n", y[0], y[1], y[2],
                    fit.max_residual, fiber.points.size());
        curves.push_back(fiber);
    }

    std::printf("\npairwise fiber distances (min / max):\n");
    for (std::size_t i = 0; i < curves.size(); ++i) {
        for (std::size_t j = i + 1; j < curves.size(); ++j) {
            const auto stats = fibers::fiber_distance_stats(curves[i], curves[j]);
            std::printf("  K%zu vs K%zu: %.9f / %.9f  (spread %.1e)\n", i, j,
                        stats.min, stats.max, stats.max - stats.min);
        }
    }

    std::ofstream out("fiber0.csv");
    fibers::write_fiber_csv(out, curves[0]);
    std::printf("\nwrote fiber0.csv\n");
    return 0;
}
