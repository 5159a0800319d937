#include "fourlat/fft.hpp"

#include <fftw3.h>

#include <map>
#include <mutex>
#include <stdexcept>

namespace fourlat {

namespace {

struct PlanKey {
    std::vector<int> shape;
    int sign;
    bool operator<(const PlanKey& o) const {
        if (sign != o.sign) return sign < o.sign;
        return shape < o.shape;
    }
};

std::mutex plan_mutex;
std::map<PlanKey, fftw_plan>& plan_cache() {
    static std::map<PlanKey, fftw_plan> cache;
    return cache;
}

fftw_plan get_plan(const std::vector<int>& shape, int sign) {
    std::lock_guard<std::mutex> lock(plan_mutex);
    PlanKey key{shape, sign};
    auto it = plan_cache().find(key);
    if (it != plan_cache().end()) return it->second;

    // Plan on a scratch buffer with FFTW_UNALIGNED so the plan can later be
    // executed on any caller-owned array of the same shape.
    std::size_t total = 1;
    for (int n : shape) total *= static_cast<std::size_t>(n);
    fftw_complex* scratch = fftw_alloc_complex(total);
    if (!scratch) throw std::bad_alloc();
    fftw_plan plan = fftw_plan_dft(static_cast<int>(shape.size()), shape.data(),
                                   scratch, scratch, sign,
                                   FFTW_ESTIMATE | FFTW_UNALIGNED);
    fftw_free(scratch);
    if (!plan) throw std::runtime_error("fftw_plan_dft failed");
    plan_cache().emplace(key, plan);
    return plan;
}

} // namespace

void fft_unnormalized(std::complex<double>* data, const std::vector<int>& shape, int sign) {
    if (shape.empty()) throw std::invalid_argument("fft: empty shape");
    for (int n : shape)
        if (n <= 0) throw std::invalid_argument("fft: nonpositive extent");
    if (sign != 1 && sign != -1) throw std::invalid_argument("fft: sign must be +1 or -1");
    fftw_plan plan = get_plan(shape, sign);
    auto* raw = reinterpret_cast<fftw_complex*>(data);
    fftw_execute_dft(plan, raw, raw);
}

} // namespace fourlat
