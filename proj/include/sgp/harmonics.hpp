#pragma once

#include <vector>

#include "sgp/errors.hpp"

namespace sgp::harmonics {

// Stacked [sin(k*phi), cos(k*phi)] pairs for k = 1..K, phi = 2*pi*f*t.
struct HarmonicVector {
    std::vector<double> values;  // size 2K
    int harmonic_count = 0;
    double t = 0.0;  // s
    double f = 0.0;  // Hz
};

HarmonicVector harmonic_encode(double t, double f, int harmonic_count);

std::vector<HarmonicVector> harmonic_encode_batch(const std::vector<double>& times, double f,
                                                  int harmonic_count);

}  // namespace sgp::harmonics
