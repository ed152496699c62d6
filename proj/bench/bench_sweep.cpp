// Wall-clock comparison of the serial reference sweep and the OpenMP sweep.

#include "peit/experiments.hpp"

#include <omp.h>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>

using namespace peit;

namespace
{

template <class F>
double seconds(F&& f, int repeats)
{
    double best = 1e300;
    for (int r = 0; r < repeats; ++r) {
        auto const t0 = std::chrono::steady_clock::now();
        f();
        best = std::min(best, std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count());
    }
    return best;
}

}  // namespace

int main(int argc, char** argv)
{
    int const repeats = argc > 1 ? std::atoi(argv[1]) : 3;
    int const threads = omp_get_max_threads();

    struct Case
    {
        char const* name;
        SweepRequest request;
    };
    Case const cases[] = {
        {"plateau, projector, tau=0.2, 81 deltas, t=80",
         {{Mode::DoubleMod, 0.2}, {1.0, 1.0, 0.0, DecaySpec::projector(1.0)}, SweepAxis::Delta,
          linspace(-0.5, 0.5, 81), SweepObservable::Plateau, 80.0, std::nullopt}},
        {"plateau, lindblad, tau=0.01, 121 deltas, t=8",
         {{Mode::DoubleMod, 0.01}, {std::sqrt(99.0), 1.0, 1.0, DecaySpec::lindblad(2.5, 2.5)}, SweepAxis::Delta,
          linspace(-3.0, 3.0, 121), SweepObservable::Plateau, 8.0, mixed_initial(0.99, 0.01)}},
        {"osc_stats, double, 19 taus, t=100",
         {{Mode::DoubleMod, 0.1}, {1.0, 1.0, 0.0, {}}, SweepAxis::Tau, linspace(0.1, 1.9, 19),
          SweepObservable::OscStats, 100.0, std::nullopt}},
    };

    std::printf("threads=%d repeats=%d\n", threads, repeats);
    std::printf("%-48s %12s %12s %8s %10s\n", "case", "serial_s", "openmp_s", "speedup", "identical");
    for (auto const& c : cases) {
        SweepResult serial;
        SweepResult parallel;
        double const ts = seconds([&] { serial = sweep_serial(c.request); }, repeats);
        double const tp = seconds([&] { parallel = sweep(c.request, threads); }, repeats);
        std::printf("%-48s %12.4f %12.4f %8.2f %10s\n", c.name, ts, tp, ts / tp,
                    serial.values == parallel.values ? "yes" : "NO");
    }
    return 0;
}
