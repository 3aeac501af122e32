#pragma once

#include <complex>
#include <vector>

#include "sgp/errors.hpp"

namespace sgp::dsp {

// A uniformly sampled real signal. Joint angles are in radians.
struct Signal {
    std::vector<double> samples;
    double sample_rate = 0.0;  // Hz

    double duration() const { return static_cast<double>(samples.size()) / sample_rate; }
    double nyquist() const { return 0.5 * sample_rate; }
};

// One-sided power spectrum. Normalization: sum of `power` equals the
// mean square of the time-domain signal (Parseval).
struct Spectrum {
    std::vector<double> bin_frequencies;  // Hz, bin_frequencies[i] = i * resolution
    std::vector<double> power;            // >= 0, same length
    double resolution = 0.0;              // Hz, sample_rate / N
};

// Full complex DFT, X[k] = sum_n x[n] exp(-2*pi*i*k*n/N).
// Radix-2 for power-of-two lengths, Bluestein otherwise.
std::vector<std::complex<double>> dft_forward(const Signal& signal);

// Inverse of dft_forward; returns the real part of the reconstruction.
std::vector<double> dft_inverse(const std::vector<std::complex<double>>& coeffs);

// Complex-to-complex transforms used by the above (exposed for tests).
std::vector<std::complex<double>> fft(const std::vector<std::complex<double>>& input, bool inverse);

Spectrum power_spectral_density(const Signal& signal);

// Spectral zero-padding resampler. Upsampling only; duration is preserved.
Signal fourier_resample(const Signal& signal, double target_rate);

// Least-squares local polynomial smoother. Interior points use the classic
// symmetric window; within half a window of either end the fit window is
// shifted inward and evaluated off-center, so polynomials of degree
// <= poly_order are reproduced exactly everywhere.
Signal savitzky_golay(const Signal& signal, int window, int poly_order);

// Frequency of the strongest bin at or above min_hz, refined by 3-point
// parabolic interpolation in log power. Ties break toward lower frequency.
double dominant_frequency(const Spectrum& spectrum, double min_hz);

// Phase of b relative to a at frequency f, in cycles wrapped to [0, 1).
double phase_offset(const Signal& a, const Signal& b, double f);

// Amplitude of the sinusoidal component at f, via least-squares fit of
// a*sin(2*pi*f*t) + b*cos(2*pi*f*t) + c. A pure tone A*sin(2*pi*f*t)
// returns A to machine precision when f is below Nyquist.
double amplitude_at(const Signal& signal, double f);

}  // namespace sgp::dsp
