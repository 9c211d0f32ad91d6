#include "ists/fft.hpp"

#include <fftw3.h>

#include <map>
#include <mutex>
#include <utility>

#include "ists/error.hpp"

namespace ists {

namespace {

// The FFTW planner is not thread-safe; plans are created once under a lock
// and executed through the new-array interface, which is.
class PlanCache {
public:
    ~PlanCache() {
        for (auto& [key, plan] : plans_) fftw_destroy_plan(plan);
    }

    fftw_plan get(int height, int width, int sign) {
        std::lock_guard lock(mutex_);
        auto key = std::make_tuple(height, width, sign);
        auto it = plans_.find(key);
        if (it != plans_.end()) return it->second;
        std::vector<Complex> in(static_cast<std::size_t>(height) * width);
        std::vector<Complex> out(in.size());
        fftw_plan plan = fftw_plan_dft_2d(height, width, reinterpret_cast<fftw_complex*>(in.data()),
                                          reinterpret_cast<fftw_complex*>(out.data()), sign,
                                          FFTW_ESTIMATE | FFTW_UNALIGNED);
        if (plan == nullptr) throw Error(ErrorCode::Backend, "fftw plan creation failed");
        plans_.emplace(key, plan);
        return plan;
    }

private:
    std::mutex mutex_;
    std::map<std::tuple<int, int, int>, fftw_plan> plans_;
};

PlanCache& plan_cache() {
    static PlanCache cache;
    return cache;
}

ComplexPlane execute(const ComplexPlane& input, int sign) {
    ComplexPlane out(input.height, input.width);
    ComplexPlane in = input;  // fftw may not take const input
    fftw_execute_dft(plan_cache().get(input.height, input.width, sign),
                     reinterpret_cast<fftw_complex*>(in.values.data()),
                     reinterpret_cast<fftw_complex*>(out.values.data()));
    return out;
}

int wrap(int i, int n) { return ((i % n) + n) % n; }

}  // namespace

ComplexPlane fft2(const ComplexPlane& plane) { return execute(plane, FFTW_FORWARD); }

ComplexPlane ifft2(const ComplexPlane& spectrum) {
    ComplexPlane out = execute(spectrum, FFTW_BACKWARD);
    const double scale = 1.0 / static_cast<double>(out.values.size());
    for (Complex& v : out.values) v *= scale;
    return out;
}

ComplexPlane fft2_centered(std::span<const double> plane, int height, int width) {
    require(plane.size() == static_cast<std::size_t>(height) * width, "fft plane size mismatch");
    ComplexPlane raw(height, width);
    for (std::size_t i = 0; i < plane.size(); ++i) raw.values[i] = plane[i];
    raw = fft2(raw);
    ComplexPlane centered(height, width);
    for (int y = 0; y < height; ++y)
        for (int x = 0; x < width; ++x)
            centered.at(y, x) = raw.at(wrap(y - height / 2, height), wrap(x - width / 2, width));
    return centered;
}

ComplexPlane ifft2_centered(const ComplexPlane& spectrum) {
    ComplexPlane raw(spectrum.height, spectrum.width);
    for (int y = 0; y < spectrum.height; ++y)
        for (int x = 0; x < spectrum.width; ++x)
            raw.at(y, x) = spectrum.at(wrap(y + spectrum.height / 2, spectrum.height),
                                       wrap(x + spectrum.width / 2, spectrum.width));
    return ifft2(raw);
}

}  // namespace ists
