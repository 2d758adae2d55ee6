// Hopf invariants of the power family, with both linking estimates.

#include <cstdio>

#include "hopftk/linking.hpp"

using namespace hopftk;

int main() {
    Vec y(3), yp(3);
    y << 0.2, 0.1, std::sqrt(0.25 - 0.05);
    yp << -0.15, 0.2, -std::sqrt(0.25 - 0.0625);

    std::printf("%-6s %-10s %-12s %-10s\n", "d", "invariant", "gauss raw", "gap");
    for (int d = -2; d <= 3; ++d) {
        const auto m = maps::power_precompose(maps::hopf_complex(1), d);
        const auto res = linking::hopf_invariant(m, {y, 0.5}, {yp, 0.5});
        std::printf("%-6d %-10ld %-12.6f %-10.2e\n", d, res.value,
                    res.gauss_raw_total, res.max_gap);
    }
    return 0;
}
