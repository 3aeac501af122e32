#include "sgp/harmonics.hpp"

#include <cmath>
#include <numbers>

namespace sgp::harmonics {

HarmonicVector harmonic_encode(double t, double f, int harmonic_count) {
    if (harmonic_count < 1) throw InvalidInputError("harmonic_count must be >= 1");
    if (!(f > 0.0)) throw InvalidInputError("frequency must be positive");
    if (!std::isfinite(t)) throw InvalidInputError("time must be finite");

    // Wrap t into one period before multiplying; keeps the phase argument
    // small for large t.
    const double period = 1.0 / f;
    const double t_wrapped = t - period * std::floor(t / period);
    const double phi = 2.0 * std::numbers::pi * f * t_wrapped;

    HarmonicVector v;
    v.harmonic_count = harmonic_count;
    v.t = t;
    v.f = f;
    v.values.resize(2 * static_cast<std::size_t>(harmonic_count));
    for (int k = 1; k <= harmonic_count; ++k) {
        v.values[2 * static_cast<std::size_t>(k) - 2] = std::sin(k * phi);
        v.values[2 * static_cast<std::size_t>(k) - 1] = std::cos(k * phi);
    }
    return v;
}

std::vector<HarmonicVector> harmonic_encode_batch(const std::vector<double>& times, double f,
                                                  int harmonic_count) {
    std::vector<HarmonicVector> out;
    out.reserve(times.size());
    for (double t : times) out.push_back(harmonic_encode(t, f, harmonic_count));
    return out;
}

}  // namespace sgp::harmonics
