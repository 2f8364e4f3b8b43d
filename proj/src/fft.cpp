#include "nlsphase/fft.hpp"

#include <fftw3.h>

#include <map>
#include <mutex>
#include <stdexcept>
#include <utility>

namespace nlsphase {
namespace {

class PlanCache {
public:
    ~PlanCache() {
        for (auto& [key, plan] : plans_) fftw_destroy_plan(plan);
    }

    fftw_plan get(std::size_t n, int sign) {
        std::lock_guard<std::mutex> lock(mu_);
        const auto key = std::make_pair(n, sign);
        if (auto it = plans_.find(key); it != plans_.end()) return it->second;
        auto* a = fftw_alloc_complex(n);
        auto* b = fftw_alloc_complex(n);
        fftw_plan p = fftw_plan_dft_1d(static_cast<int>(n), a, b, sign,
                                       FFTW_ESTIMATE | FFTW_UNALIGNED);
        fftw_free(a);
        fftw_free(b);
        if (!p) throw std::runtime_error("fftw plan creation failed");
        plans_.emplace(key, p);
        return p;
    }

private:
    std::mutex mu_;
    std::map<std::pair<std::size_t, int>, fftw_plan> plans_;
};

PlanCache& cache() {
    static PlanCache c;
    return c;
}

void run(std::span<const cplx> in, std::span<cplx> out, int sign) {
    if (in.size() != out.size()) throw std::invalid_argument("fft: size mismatch");
    if (in.empty()) return;
    fftw_plan p = cache().get(in.size(), sign);
    // fftw_execute_dft does not modify `in` for out-of-place plans.
    fftw_execute_dft(p, reinterpret_cast<fftw_complex*>(const_cast<cplx*>(in.data())),
                     reinterpret_cast<fftw_complex*>(out.data()));
}

}  // namespace

void fft_forward(std::span<const cplx> in, std::span<cplx> out) { run(in, out, FFTW_FORWARD); }
void fft_backward(std::span<const cplx> in, std::span<cplx> out) { run(in, out, FFTW_BACKWARD); }

}  // namespace nlsphase
