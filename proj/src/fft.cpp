#include "tsl/fft.hpp"

#include <fftw3.h>

#include <map>
#include <mutex>
#include <tuple>
#include <vector>

namespace tsl::fft {

namespace {

using PlanKey = std::tuple<int, int, int>;  // dim, n, sign

std::map<PlanKey, fftw_plan>& plan_cache() {
    static std::map<PlanKey, fftw_plan> cache;
    return cache;
}

std::mutex& plan_mutex() {
    static std::mutex m;
    return m;
}

// FFTW's planner is not thread-safe; execution via the new-array interface is.
// Plans are created FFTW_UNALIGNED so they may run on any caller buffer, and
// FFTW_ESTIMATE so plan selection does not depend on runtime timings.
fftw_plan plan_for(int dim, int n, int sign) {
    std::scoped_lock lock(plan_mutex());
    auto& cache = plan_cache();
    const PlanKey key{dim, n, sign};
    if (auto it = cache.find(key); it != cache.end()) return it->second;

    std::size_t total = 1;
    for (int a = 0; a < dim; ++a) total *= static_cast<std::size_t>(n);
    std::vector<std::complex<double>> scratch(total);
    std::vector<int> dims(static_cast<std::size_t>(dim), n);
    fftw_plan p = fftw_plan_dft(dim, dims.data(),
                                reinterpret_cast<fftw_complex*>(scratch.data()),
                                reinterpret_cast<fftw_complex*>(scratch.data()),
                                sign, FFTW_ESTIMATE | FFTW_UNALIGNED);
    cache.emplace(key, p);
    return p;
}

void execute(int dim, int n, int sign, std::complex<double>* data) {
    fftw_plan p = plan_for(dim, n, sign);
    fftw_execute_dft(p, reinterpret_cast<fftw_complex*>(data),
                     reinterpret_cast<fftw_complex*>(data));
}

}  // namespace

void forward(int dim, int n, std::complex<double>* data) { execute(dim, n, FFTW_FORWARD, data); }
void backward(int dim, int n, std::complex<double>* data) { execute(dim, n, FFTW_BACKWARD, data); }

}  // namespace tsl::fft
