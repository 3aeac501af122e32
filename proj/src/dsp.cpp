#include "sgp/dsp.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <numbers>

namespace sgp::dsp {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

bool is_pow2(std::size_t n) { return n != 0 && (n & (n - 1)) == 0; }

std::size_t next_pow2(std::size_t n) {
    std::size_t p = 1;
    while (p < n) p <<= 1;
    return p;
}

// Iterative radix-2 Cooley-Tukey; n must be a power of two.
void fft_pow2_inplace(std::vector<std::complex<double>>& a, bool inverse) {
    const std::size_t n = a.size();
    for (std::size_t i = 1, j = 0; i < n; ++i) {
        std::size_t bit = n >> 1;
        for (; j & bit; bit >>= 1) j ^= bit;
        j ^= bit;
        if (i < j) std::swap(a[i], a[j]);
    }
    for (std::size_t len = 2; len <= n; len <<= 1) {
        const double ang = (inverse ? kTwoPi : -kTwoPi) / static_cast<double>(len);
        for (std::size_t i = 0; i < n; i += len) {
            for (std::size_t k = 0; k < len / 2; ++k) {
                // Recompute the twiddle from an exact angle; repeated
                // multiplication drifts past the 1e-10 roundtrip bound.
                const std::complex<double> w = std::polar(1.0, ang * static_cast<double>(k));
                const std::complex<double> u = a[i + k];
                const std::complex<double> v = a[i + k + len / 2] * w;
                a[i + k] = u + v;
                a[i + k + len / 2] = u - v;
            }
        }
    }
}

// Bluestein's chirp-z transform for arbitrary n. The quadratic phase index
// is reduced modulo 2n so the trig arguments stay small.
std::vector<std::complex<double>> fft_bluestein(const std::vector<std::complex<double>>& x,
                                                bool inverse) {
    const std::size_t n = x.size();
    const std::size_t m = next_pow2(2 * n - 1);
    const double sign = inverse ? 1.0 : -1.0;

    std::vector<std::complex<double>> chirp(n);
    for (std::size_t k = 0; k < n; ++k) {
        const std::size_t k2mod = static_cast<std::size_t>(
            (static_cast<unsigned long long>(k) * k) % (2ull * n));
        chirp[k] = std::polar(1.0, sign * std::numbers::pi * static_cast<double>(k2mod) /
                                       static_cast<double>(n));
    }

    std::vector<std::complex<double>> a(m), b(m);
    for (std::size_t k = 0; k < n; ++k) a[k] = x[k] * chirp[k];
    b[0] = std::conj(chirp[0]);
    for (std::size_t k = 1; k < n; ++k) b[k] = b[m - k] = std::conj(chirp[k]);

    fft_pow2_inplace(a, false);
    fft_pow2_inplace(b, false);
    for (std::size_t k = 0; k < m; ++k) a[k] *= b[k];
    fft_pow2_inplace(a, true);

    std::vector<std::complex<double>> out(n);
    const double scale = 1.0 / static_cast<double>(m);
    for (std::size_t k = 0; k < n; ++k) out[k] = a[k] * scale * chirp[k];
    return out;
}

void require_spectral_input(const Signal& signal) {
    if (signal.sample_rate <= 0.0)
        throw InvalidInputError("signal sample_rate must be positive");
    if (signal.samples.size() < 2)
        throw InvalidInputError("spectral operations need at least 2 samples");
}

}  // namespace

std::vector<std::complex<double>> fft(const std::vector<std::complex<double>>& input,
                                      bool inverse) {
    if (input.size() < 2) throw InvalidInputError("fft needs at least 2 points");
    if (is_pow2(input.size())) {
        std::vector<std::complex<double>> a = input;
        fft_pow2_inplace(a, inverse);
        return a;
    }
    return fft_bluestein(input, inverse);
}

std::vector<std::complex<double>> dft_forward(const Signal& signal) {
    require_spectral_input(signal);
    std::vector<std::complex<double>> x(signal.samples.begin(), signal.samples.end());
    return fft(x, false);
}

std::vector<double> dft_inverse(const std::vector<std::complex<double>>& coeffs) {
    if (coeffs.size() < 2) throw InvalidInputError("dft_inverse needs at least 2 coefficients");
    std::vector<std::complex<double>> y = fft(coeffs, true);
    std::vector<double> out(y.size());
    const double scale = 1.0 / static_cast<double>(y.size());
    for (std::size_t i = 0; i < y.size(); ++i) out[i] = y[i].real() * scale;
    return out;
}

Spectrum power_spectral_density(const Signal& signal) {
    const auto coeffs = dft_forward(signal);
    const std::size_t n = coeffs.size();
    const std::size_t half = n / 2;

    Spectrum spectrum;
    spectrum.resolution = signal.sample_rate / static_cast<double>(n);
    spectrum.bin_frequencies.resize(half + 1);
    spectrum.power.resize(half + 1);
    const double inv_n2 = 1.0 / (static_cast<double>(n) * static_cast<double>(n));
    for (std::size_t k = 0; k <= half; ++k) {
        spectrum.bin_frequencies[k] = static_cast<double>(k) * spectrum.resolution;
        double p = std::norm(coeffs[k]) * inv_n2;
        const bool shared = k > 0 && !(n % 2 == 0 && k == half);
        if (shared) p *= 2.0;  // fold in the conjugate bin
        spectrum.power[k] = p;
    }
    return spectrum;
}

Signal fourier_resample(const Signal& signal, double target_rate) {
    require_spectral_input(signal);
    if (target_rate <= 0.0) throw InvalidInputError("target_rate must be positive");
    if (target_rate < signal.sample_rate)
        throw InvalidInputError("fourier_resample supports upsampling only");
    if (target_rate == signal.sample_rate) return signal;

    const std::size_t n = signal.samples.size();
    const std::size_t m = static_cast<std::size_t>(
        std::llround(static_cast<double>(n) * target_rate / signal.sample_rate));

    const auto x = dft_forward(signal);
    std::vector<std::complex<double>> y(m, {0.0, 0.0});
    const std::size_t half = n / 2;
    for (std::size_t k = 0; k <= half; ++k) {
        if (n % 2 == 0 && k == half) {
            // Split the Nyquist bin so the interpolant stays real.
            y[k] = 0.5 * x[k];
            y[m - k] = 0.5 * std::conj(x[k]);
        } else {
            y[k] = x[k];
            if (k > 0) y[m - k] = x[n - k];
        }
    }
    const double scale = static_cast<double>(m) / static_cast<double>(n);
    for (auto& c : y) c *= scale;

    Signal out;
    out.sample_rate = target_rate;
    out.samples = dft_inverse(y);
    return out;
}

Signal savitzky_golay(const Signal& signal, int window, int poly_order) {
    if (signal.sample_rate <= 0.0)
        throw InvalidInputError("signal sample_rate must be positive");
    if (window % 2 == 0) throw InvalidInputError("savitzky_golay window must be odd");
    if (poly_order < 0 || window <= poly_order)
        throw InvalidInputError("savitzky_golay window must exceed poly_order");
    const int n = static_cast<int>(signal.samples.size());
    if (window > n) throw InvalidInputError("savitzky_golay window exceeds signal length");

    // One weight row per in-window evaluation offset. Row `e` evaluates the
    // degree-poly_order least-squares fit of the window at window position e;
    // interior samples use the central row, boundary samples the shifted ones.
    const int half = window / 2;
    Eigen::MatrixXd vand(window, poly_order + 1);
    for (int i = 0; i < window; ++i) {
        double p = 1.0;
        for (int j = 0; j <= poly_order; ++j) {
            vand(i, j) = p;
            p *= static_cast<double>(i);
        }
    }
    const Eigen::MatrixXd gram = vand.transpose() * vand;
    const Eigen::MatrixXd coeffs =
        vand * gram.ldlt().solve(vand.transpose());  // window x window, row e = weights

    Signal out;
    out.sample_rate = signal.sample_rate;
    out.samples.resize(n);
    for (int i = 0; i < n; ++i) {
        int start = i - half;
        start = std::clamp(start, 0, n - window);
        const int offset = i - start;
        double acc = 0.0;
        for (int j = 0; j < window; ++j) acc += coeffs(offset, j) * signal.samples[start + j];
        out.samples[i] = acc;
    }
    return out;
}

double dominant_frequency(const Spectrum& spectrum, double min_hz) {
    if (spectrum.power.empty()) throw InvalidInputError("empty spectrum");
    if (min_hz < 0.0) throw InvalidInputError("min_hz must be >= 0");

    std::size_t first = 0;
    while (first < spectrum.power.size() && spectrum.bin_frequencies[first] < min_hz) ++first;
    if (first >= spectrum.power.size())
        throw NoDominantFrequencyError("min_hz beyond spectrum range");

    std::size_t peak = first;
    for (std::size_t k = first + 1; k < spectrum.power.size(); ++k)
        if (spectrum.power[k] > spectrum.power[peak]) peak = k;
    if (spectrum.power[peak] <= 0.0)
        throw NoDominantFrequencyError("spectrum has no energy at or above min_hz");

    double delta = 0.0;
    if (peak > first && peak + 1 < spectrum.power.size()) {
        const double floor_p = spectrum.power[peak] * 1e-300;
        const double l = std::log(std::max(spectrum.power[peak - 1], floor_p));
        const double c = std::log(spectrum.power[peak]);
        const double r = std::log(std::max(spectrum.power[peak + 1], floor_p));
        const double denom = l - 2.0 * c + r;
        if (denom < 0.0) delta = std::clamp(0.5 * (l - r) / denom, -0.5, 0.5);
    }
    return (static_cast<double>(peak) + delta) * spectrum.resolution;
}

double phase_offset(const Signal& a, const Signal& b, double f) {
    require_spectral_input(a);
    require_spectral_input(b);
    if (a.samples.size() != b.samples.size() || a.sample_rate != b.sample_rate)
        throw InvalidInputError("phase_offset requires matching lengths and rates");
    if (f <= 0.0) throw InvalidInputError("phase_offset frequency must be positive");

    const auto xa = dft_forward(a);
    const auto xb = dft_forward(b);
    const std::size_t n = xa.size();
    const double resolution = a.sample_rate / static_cast<double>(n);
    const std::size_t bin = static_cast<std::size_t>(std::llround(f / resolution));
    if (bin == 0 || bin > n / 2) throw InvalidInputError("frequency outside spectrum range");

    for (const auto* x : {&xa, &xb}) {
        double total = 0.0;
        for (const auto& c : *x) total += std::norm(c);
        if (total <= 0.0 || std::norm((*x)[bin]) < 1e-12 * total)
            throw UndefinedPhaseError("negligible energy at requested frequency");
    }

    double cycles = (std::arg(xb[bin]) - std::arg(xa[bin])) / kTwoPi;
    cycles -= std::floor(cycles);
    if (cycles >= 1.0) cycles = 0.0;
    return cycles;
}

double amplitude_at(const Signal& signal, double f) {
    require_spectral_input(signal);
    if (f <= 0.0 || f >= signal.nyquist())
        throw InvalidInputError("frequency must lie in (0, Nyquist)");

    const std::size_t n = signal.samples.size();
    Eigen::MatrixXd basis(n, 3);
    Eigen::VectorXd y(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double t = static_cast<double>(i) / signal.sample_rate;
        basis(static_cast<Eigen::Index>(i), 0) = std::sin(kTwoPi * f * t);
        basis(static_cast<Eigen::Index>(i), 1) = std::cos(kTwoPi * f * t);
        basis(static_cast<Eigen::Index>(i), 2) = 1.0;
        y(static_cast<Eigen::Index>(i)) = signal.samples[i];
    }
    const Eigen::Vector3d sol =
        (basis.transpose() * basis).ldlt().solve(basis.transpose() * y);
    return std::hypot(sol(0), sol(1));
}

}  // namespace sgp::dsp
