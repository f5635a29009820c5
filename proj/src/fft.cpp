#include "qs4/fft.hpp"

#include <fftw3.h>

#include <map>
#include <mutex>
#include <stdexcept>
#include <utility>

namespace qs4::detail {

namespace {

// Plans are created once per (size, sign) and reused through the new-array
// execute interface. FFTW_ESTIMATE keeps plan choice independent of timing,
// so results are reproducible run to run.
class PlanCache {
public:
    ~PlanCache()
    {
        for (auto& kv : plans_) fftw_destroy_plan(kv.second);
    }

    fftw_plan get(int m, int sign)
    {
        std::lock_guard<std::mutex> lock(mu_);
        auto key = std::make_pair(m, sign);
        auto it = plans_.find(key);
        if (it != plans_.end()) return it->second;
        fftw_complex* tmp = fftw_alloc_complex(static_cast<std::size_t>(m) * m);
        fftw_plan p = fftw_plan_dft_2d(m, m, tmp, tmp, sign < 0 ? FFTW_FORWARD : FFTW_BACKWARD,
                                       FFTW_ESTIMATE | FFTW_UNALIGNED);
        fftw_free(tmp);
        if (!p) throw std::runtime_error("fftw plan creation failed");
        plans_.emplace(key, p);
        return p;
    }

private:
    std::mutex mu_;
    std::map<std::pair<int, int>, fftw_plan> plans_;
};

PlanCache& cache()
{
    static PlanCache c;
    return c;
}

} // namespace

void fft2d(std::vector<std::complex<double>>& a, int m, int sign)
{
    if (a.size() != static_cast<std::size_t>(m) * m)
        throw std::logic_error("fft2d: buffer size mismatch");
    fftw_plan p = cache().get(m, sign);
    auto* d = reinterpret_cast<fftw_complex*>(a.data());
    fftw_execute_dft(p, d, d);
}

} // namespace qs4::detail
