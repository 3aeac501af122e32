#pragma once

#include <Eigen/Dense>
#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "sgp/errors.hpp"
#include "sgp/harmonics.hpp"
#include "sgp/reflib.hpp"

namespace sgp::prior {

struct Architecture {
    int latent_dim = 8;
    int encoder_hidden = 32;
    std::vector<int> decoder_widths = {128, 128, 128};
    int harmonic_count = 6;
    int output_dim = reflib::kJointCount;
    // Maps the operating band [0.6, 2.3] Hz onto [-1, 1].
    double frequency_mid = 1.45;
    double frequency_half_range = 0.85;

    int context_dim() const { return latent_dim + 1; }
    int input_dim() const { return 2 * harmonic_count; }
};

// All trainable parameters. Decoder hidden layers carry no bias of their
// own; the FiLM offset plays that role.
struct PriorModel {
    Architecture arch;

    Eigen::MatrixXd encoder_w1;  // hidden x 1
    Eigen::VectorXd encoder_b1;
    Eigen::MatrixXd encoder_w2;  // 2*latent x hidden
    Eigen::VectorXd encoder_b2;

    std::vector<Eigen::MatrixXd> film_gamma_w;  // per hidden layer, width x context
    std::vector<Eigen::VectorXd> film_gamma_b;
    std::vector<Eigen::MatrixXd> film_beta_w;
    std::vector<Eigen::VectorXd> film_beta_b;

    std::vector<Eigen::MatrixXd> decoder_w;  // width_l x width_{l-1}
    Eigen::MatrixXd output_w;                // output x width_last
    Eigen::VectorXd output_b;
};

struct LatentSample {
    Eigen::VectorXd mu;
    Eigen::VectorXd log_var;
    Eigen::VectorXd epsilon;
    Eigen::VectorXd z;
};

struct FilmParams {
    Eigen::VectorXd gamma;  // in [0.9, 1.1]
    Eigen::VectorXd beta;   // in [-0.1, 0.1]
};

enum class GenerationMode { mean, sample };

struct TrajectoryBatch {
    double frequency = 0.0;  // Hz
    std::vector<double> times;
    std::array<std::vector<double>, reflib::kJointCount> joints;  // radians
    GenerationMode mode = GenerationMode::mean;
    std::uint64_t seed = 0;
};

constexpr double kLogVarMin = -10.0;
constexpr double kLogVarMax = 4.0;

double silu(double x);

// Uniform +-sqrt(6/(fan_in+fan_out)) weights, zero biases, seeded.
PriorModel init_model(const Architecture& arch, std::uint64_t seed);

double normalized_frequency(const Architecture& arch, double f);

// (mu, log sigma^2); log-variance clamped to [kLogVarMin, kLogVarMax].
std::pair<Eigen::VectorXd, Eigen::VectorXd> encode(const PriorModel& model, double f);

Eigen::VectorXd reparameterize(const Eigen::VectorXd& mu, const Eigen::VectorXd& log_var,
                               const Eigen::VectorXd& epsilon);

std::vector<FilmParams> film_modulation(const PriorModel& model, const Eigen::VectorXd& context);

Eigen::VectorXd decode(const PriorModel& model, const harmonics::HarmonicVector& x,
                       const std::vector<FilmParams>& films);

// Columns of `inputs` are harmonic vectors; returns output_dim x T.
Eigen::MatrixXd decode_batch(const PriorModel& model, const Eigen::MatrixXd& inputs,
                             const std::vector<FilmParams>& films);

Eigen::MatrixXd harmonic_matrix(const std::vector<double>& times, double f, int harmonic_count);

TrajectoryBatch generate_trajectory(const PriorModel& model, double f, double duration,
                                    double rate, GenerationMode mode, std::uint64_t seed = 0);

// Same forward path with a caller-supplied latent; used to audit per-trajectory
// latent constancy.
TrajectoryBatch generate_with_latent(const PriorModel& model, double f,
                                     const std::vector<double>& times, const Eigen::VectorXd& z);

// The latent a generation used (mean-mode mu, or the seeded draw).
Eigen::VectorXd generation_latent(const PriorModel& model, double f, GenerationMode mode,
                                  std::uint64_t seed);

}  // namespace sgp::prior
