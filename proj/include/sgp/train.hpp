#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <vector>

#include "sgp/prior.hpp"
#include "sgp/reflib.hpp"

namespace sgp::train {

struct TrainConfig {
    double beta_kl = 1e-3;
    double learning_rate = 1e-3;
    double beta1 = 0.9;
    double beta2 = 0.999;
    int epochs = 2000;
    int batch_size = 256;  // timesteps per step
    std::uint64_t seed = 0;
    double clip_norm = 5.0;  // global-norm gradient clip

    void validate() const;
};

struct LossBreakdown {
    double total = 0.0;
    double reconstruction = 0.0;
    double kl = 0.0;
};

// Mean squared error over all joints and timesteps; grids must align.
double reconstruction_loss(const prior::TrajectoryBatch& generated,
                           const reflib::MotionSequence& reference);

// KL(N(mu, diag(exp(log_var))) || N(0, I)), closed form.
double kl_loss(const Eigen::VectorXd& mu, const Eigen::VectorXd& log_var);

// One training batch: harmonic inputs and reference targets at a subset of
// timesteps of a single (frequency, sequence) pair, plus the latent noise.
struct BatchSample {
    double frequency = 0.0;
    Eigen::MatrixXd inputs;   // 2K x B
    Eigen::MatrixXd targets;  // output_dim x B
    Eigen::VectorXd epsilon;  // latent_dim
};

// Gradients share the model's shape.
using Gradients = prior::PriorModel;

Gradients zeros_like(const prior::PriorModel& model);

// Composite loss (reconstruction + beta_kl * KL) and its gradients with
// respect to every parameter, via reverse-mode differentiation through
// encoder, reparameterization, FiLM, and decoder.
std::pair<LossBreakdown, Gradients> loss_and_gradients(const prior::PriorModel& model,
                                                       const BatchSample& batch,
                                                       double beta_kl);

struct ParamView {
    std::string name;
    double* data = nullptr;
    std::ptrdiff_t size = 0;
};

// Fixed-order flat views over every parameter tensor; the order defines the
// checkpoint layout and the Adam state alignment.
std::vector<ParamView> parameter_views(prior::PriorModel& model);
std::ptrdiff_t parameter_count(const prior::PriorModel& model);

struct AdamState {
    Eigen::VectorXd first_moment;
    Eigen::VectorXd second_moment;
    long step = 0;
};

// Scales gradients in place so the global norm is at most max_norm; returns
// the pre-clip norm.
double clip_gradients(Gradients& grads, double max_norm);

void optimizer_step(prior::PriorModel& model, const Gradients& grads, AdamState& state,
                    const TrainConfig& config);

struct TrainResult {
    prior::PriorModel model;
    std::vector<LossBreakdown> history;  // one entry per epoch
};

TrainResult train(const reflib::ReferenceLibrary& library, const prior::Architecture& arch,
                  const TrainConfig& config);

struct Checkpoint {
    prior::PriorModel model;
    TrainConfig config;
    int epoch = 0;
    std::vector<LossBreakdown> history;
};

inline constexpr int kCheckpointFormatVersion = 1;

// `.spm` file: little-endian uint64 header length, JSON header, then one
// length-prefixed raw block of little-endian doubles per parameter tensor.
void save_checkpoint(const std::string& path, const Checkpoint& checkpoint);
Checkpoint load_checkpoint(const std::string& path);

void save_loss_history_csv(const std::string& path, const std::vector<LossBreakdown>& history);

}  // namespace sgp::train
