#include "s1flow/sampling.hpp"

namespace s1flow {

FramePointData random_frame_point(std::mt19937_64& rng, double scale, bool integrable) {
    std::uniform_real_distribution<double> any(-scale, scale);
    std::uniform_real_distribution<double> size(0.2, 2.0);
    FramePointData p;
    p.k_tilde = any(rng);
    p.f = size(rng);
    p.f1 = any(rng);
    p.f2 = any(rng);
    p.f11 = any(rng);
    p.f12 = any(rng);
    p.f21 = any(rng);
    p.f22 = any(rng);
    p.c = any(rng);
    p.alpha = any(rng);
    p.beta = any(rng);
    p.eta121 = any(rng);
    p.eta122 = any(rng);
    return integrable ? p.projected_to_integrable() : p;
}

} // namespace s1flow
