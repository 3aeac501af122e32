// Acceptance suite: one pass/fail line per criterion, exit 0 only if all pass.
#include <array>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "sgp/dsp.hpp"
#include "sgp/metrics.hpp"
#include "sgp/prior.hpp"
#include "sgp/reflib.hpp"
#include "sgp/rewards.hpp"
#include "sgp/train.hpp"

namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;
using sgp::reflib::kJointCount;

namespace {

int g_failures = 0;

void report(int criterion, bool pass, const std::string& description) {
    std::cout << "criterion " << criterion << ": " << (pass ? "PASS" : "FAIL") << " - "
              << description << '\n';
    if (!pass) ++g_failures;
}

double seconds_since(Clock::time_point start) {
    return std::chrono::duration<double>(Clock::now() - start).count();
}

sgp::reflib::ReferenceLibrary canonical_library() {
    std::vector<sgp::reflib::MotionSequence> seqs;
    for (const auto& spec : sgp::reflib::canonical_synth_specs(0))
        seqs.push_back(sgp::reflib::synth_reference(spec));
    return sgp::reflib::build_library(seqs);
}

// --- criterion 1: finite-difference gradient oracle ---------------------------
bool gradient_oracle() {
    sgp::prior::Architecture arch;
    arch.latent_dim = 2;
    arch.encoder_hidden = 4;
    arch.decoder_widths = {8};
    arch.harmonic_count = 2;

    const double step = 1e-5;
    std::mt19937_64 rng(2024);
    std::normal_distribution<double> normal(0.0, 1.0);
    for (int trial = 0; trial < 20; ++trial) {
        sgp::prior::PriorModel model = sgp::prior::init_model(arch, rng());
        sgp::train::BatchSample batch;
        batch.frequency = 0.7 + 0.15 * (trial % 10);
        batch.inputs.resize(arch.input_dim(), 6);
        for (Eigen::Index i = 0; i < batch.inputs.size(); ++i)
            batch.inputs.data()[i] = normal(rng);
        batch.targets.resize(arch.output_dim, 6);
        for (Eigen::Index i = 0; i < batch.targets.size(); ++i)
            batch.targets.data()[i] = 0.3 * normal(rng);
        batch.epsilon.resize(arch.latent_dim);
        for (Eigen::Index i = 0; i < batch.epsilon.size(); ++i) batch.epsilon[i] = normal(rng);

        const double beta_kl = 1e-3;
        auto [loss, grads] = sgp::train::loss_and_gradients(model, batch, beta_kl);
        auto grad_views = sgp::train::parameter_views(grads);
        auto views = sgp::train::parameter_views(model);
        for (std::size_t g = 0; g < views.size(); ++g) {
            for (std::ptrdiff_t i = 0; i < views[g].size; ++i) {
                const double original = views[g].data[i];
                views[g].data[i] = original + step;
                const double up =
                    sgp::train::loss_and_gradients(model, batch, beta_kl).first.total;
                views[g].data[i] = original - step;
                const double down =
                    sgp::train::loss_and_gradients(model, batch, beta_kl).first.total;
                views[g].data[i] = original;
                const double fd = (up - down) / (2.0 * step);
                const double analytic = grad_views[g].data[i];
                const double err = std::abs(analytic - fd);
                if (err <= 1e-6) continue;
                const double rel = err / std::max(std::abs(fd), std::abs(analytic));
                if (rel > 1e-4) {
                    std::cout << "  gradient mismatch: trial " << trial << ", "
                              << views[g].name << "[" << i << "] analytic " << analytic
                              << " vs fd " << fd << '\n';
                    return false;
                }
            }
        }
    }
    return true;
}

// --- criteria 2 and 3: default training run ----------------------------------
struct TrainedEvaluation {
    double l_rec = 0.0;
    double fid = 0.0;
    double e_ba = 0.0;
    double max_rms = 0.0;
    double worst_ratio_low = 1.0;
    double worst_ratio_high = 1.0;
    double train_seconds = 0.0;
    bool diverged = false;
};

double joint_amplitude(const std::vector<double>& samples, double rate) {
    sgp::dsp::Signal signal;
    signal.sample_rate = rate;
    signal.samples = samples;
    const auto psd = sgp::dsp::power_spectral_density(signal);
    const double dominant = sgp::dsp::dominant_frequency(psd, 0.1);
    return sgp::dsp::amplitude_at(signal, dominant);
}

TrainedEvaluation trained_evaluation(const sgp::reflib::ReferenceLibrary& library) {
    TrainedEvaluation out;
    const auto start = Clock::now();
    sgp::prior::Architecture arch;
    sgp::train::TrainConfig config;
    sgp::train::TrainResult result;
    try {
        result = sgp::train::train(library, arch, config);
    } catch (const sgp::DivergedTrainingError&) {
        out.diverged = true;
        return out;
    }
    out.train_seconds = seconds_since(start);
    const auto& model = result.model;

    std::map<double, sgp::prior::TrajectoryBatch> generated;
    for (const auto& [v, f] : library.velocity_frequency_pairs)
        generated[f] = sgp::prior::generate_trajectory(model, f, library.duration,
                                                       library.sample_rate,
                                                       sgp::prior::GenerationMode::mean);
    out.l_rec = sgp::metrics::l_rec_metric(generated, library);
    out.e_ba = sgp::metrics::boundary_amplitude_error(model, library);

    Eigen::MatrixXd gen_frames(kJointCount, 0), ref_frames(kJointCount, 0);
    for (const auto& [f, batch] : generated) {
        const Eigen::MatrixXd frames = sgp::metrics::frames_of(batch);
        gen_frames.conservativeResize(kJointCount, gen_frames.cols() + frames.cols());
        gen_frames.rightCols(frames.cols()) = frames;
    }
    for (const auto& seq : library.sequences) {
        const Eigen::MatrixXd frames = sgp::metrics::frames_of(seq);
        ref_frames.conservativeResize(kJointCount, ref_frames.cols() + frames.cols());
        ref_frames.rightCols(frames.cols()) = frames;
    }
    out.fid = sgp::metrics::fid(sgp::metrics::motion_stats(ref_frames),
                                sgp::metrics::motion_stats(gen_frames));

    // Per-joint RMS deviation at each library frequency.
    for (std::size_t s = 0; s < library.sequences.size(); ++s) {
        const auto& batch = generated.at(library.velocity_frequency_pairs[s].second);
        for (int j = 0; j < kJointCount; ++j) {
            const auto& gen = batch.joints[static_cast<std::size_t>(j)];
            const auto& ref = library.sequences[s].joints[static_cast<std::size_t>(j)];
            double acc = 0.0;
            for (std::size_t i = 0; i < gen.size(); ++i) {
                const double d = gen[i] - ref[i];
                acc += d * d;
            }
            out.max_rms =
                std::max(out.max_rms, std::sqrt(acc / static_cast<double>(gen.size())));
        }
    }

    // Amplitude boundedness at the extrapolated band edges, relative to the
    // nearest-boundary library sequence.
    const std::array<std::pair<double, std::size_t>, 2> extremes = {
        std::pair{0.6, std::size_t{0}}, std::pair{2.3, library.sequences.size() - 1}};
    for (const auto& [f_extreme, boundary_index] : extremes) {
        const auto batch = sgp::prior::generate_trajectory(
            model, f_extreme, library.duration, library.sample_rate,
            sgp::prior::GenerationMode::mean);
        for (int j = 0; j < kJointCount; ++j) {
            const double amp_gen =
                joint_amplitude(batch.joints[static_cast<std::size_t>(j)], library.sample_rate);
            const double amp_ref = joint_amplitude(
                library.sequences[boundary_index].joints[static_cast<std::size_t>(j)],
                library.sample_rate);
            const double ratio = amp_gen / amp_ref;
            out.worst_ratio_low = std::min(out.worst_ratio_low, ratio);
            out.worst_ratio_high = std::max(out.worst_ratio_high, ratio);
        }
    }
    return out;
}

// --- criterion 4: DSP properties ---------------------------------------------
bool dsp_suite() {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> dist(-1.0, 1.0);

    for (std::size_t n : {2u, 3u, 32u, 60u, 127u, 600u, 1024u}) {
        sgp::dsp::Signal s;
        s.sample_rate = 60.0;
        s.samples.resize(n);
        for (auto& v : s.samples) v = dist(rng);
        const auto back = sgp::dsp::dft_inverse(sgp::dsp::dft_forward(s));
        double mean_square = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            if (std::abs(back[i] - s.samples[i]) > 1e-10) return false;
            mean_square += s.samples[i] * s.samples[i];
        }
        mean_square /= static_cast<double>(n);
        double total = 0.0;
        for (double p : sgp::dsp::power_spectral_density(s).power) total += p;
        if (std::abs(total - mean_square) > 1e-9) return false;
    }

    {  // polynomial reproduction
        sgp::dsp::Signal s;
        s.sample_rate = 60.0;
        s.samples.resize(300);
        for (std::size_t i = 0; i < s.samples.size(); ++i) {
            const double t = static_cast<double>(i) / 60.0;
            s.samples[i] = 0.3 * t * t * t - 1.1 * t * t + t - 0.2;
        }
        const auto smoothed = sgp::dsp::savitzky_golay(s, 11, 3);
        for (std::size_t i = 0; i < s.samples.size(); ++i)
            if (std::abs(smoothed.samples[i] - s.samples[i]) > 1e-9) return false;
    }

    {  // band-limited resampling exactness
        sgp::dsp::Signal s;
        s.sample_rate = 30.0;
        s.samples.resize(300);
        for (std::size_t i = 0; i < s.samples.size(); ++i)
            s.samples[i] = std::sin(2.0 * std::numbers::pi * 1.2 * static_cast<double>(i) / 30.0);
        const auto up = sgp::dsp::fourier_resample(s, 60.0);
        for (std::size_t i = 0; i < up.samples.size(); ++i) {
            const double t = static_cast<double>(i) / 60.0;
            if (std::abs(up.samples[i] - std::sin(2.0 * std::numbers::pi * 1.2 * t)) > 1e-9)
                return false;
        }
    }

    {  // off-bin dominant frequency
        for (double f : {1.25, 0.73, 1.97}) {
            sgp::dsp::Signal s;
            s.sample_rate = 60.0;
            s.samples.resize(600);
            for (std::size_t i = 0; i < 600; ++i)
                s.samples[i] =
                    std::sin(2.0 * std::numbers::pi * f * static_cast<double>(i) / 60.0);
            const double found =
                sgp::dsp::dominant_frequency(sgp::dsp::power_spectral_density(s), 0.1);
            if (std::abs(found - f) > 0.03) return false;
        }
    }

    {  // half-cycle phase offset on contralateral pair
        sgp::dsp::Signal a, b;
        a.sample_rate = b.sample_rate = 60.0;
        a.samples.resize(600);
        b.samples.resize(600);
        for (std::size_t i = 0; i < 600; ++i) {
            const double t = static_cast<double>(i) / 60.0;
            a.samples[i] = 0.4 * std::sin(2.0 * std::numbers::pi * 0.68 * t);
            b.samples[i] = 0.4 * std::sin(2.0 * std::numbers::pi * (0.68 * t + 0.5));
        }
        if (std::abs(sgp::dsp::phase_offset(a, b, 0.68) - 0.5) > 0.02) return false;
    }
    return true;
}

// --- criterion 5: metric identities ------------------------------------------
bool metric_identities(const sgp::reflib::ReferenceLibrary& library) {
    std::mt19937_64 rng(9);
    std::normal_distribution<double> normal(0.0, 1.0);

    for (int trial = 0; trial < 5; ++trial) {
        Eigen::MatrixXd a(4, 4);
        for (Eigen::Index i = 0; i < a.size(); ++i) a.data()[i] = normal(rng);
        sgp::metrics::MotionStats stats;
        stats.dimension = 4;
        stats.frame_count = 50;
        stats.mean = Eigen::VectorXd::Random(4);
        stats.covariance = a * a.transpose() + 0.1 * Eigen::MatrixXd::Identity(4, 4);
        if (std::abs(sgp::metrics::fid(stats, stats)) > 1e-8) return false;
    }

    sgp::metrics::MotionStats one_a, one_b;
    one_a.dimension = one_b.dimension = 1;
    one_a.frame_count = one_b.frame_count = 10;
    one_a.mean = Eigen::VectorXd::Zero(1);
    one_b.mean = Eigen::VectorXd::Ones(1);
    one_a.covariance = Eigen::MatrixXd::Ones(1, 1);
    one_b.covariance = Eigen::MatrixXd::Ones(1, 1);
    if (std::abs(sgp::metrics::fid(one_a, one_b) - 1.0) > 1e-10) return false;
    one_b.mean.setZero();
    one_b.covariance(0, 0) = 4.0;
    if (std::abs(sgp::metrics::fid(one_a, one_b) - 1.0) > 1e-10) return false;

    // MSE/MAE metrics against naive loops on randomized library copies.
    std::map<double, sgp::prior::TrajectoryBatch> reference, actual;
    for (std::size_t s = 0; s < library.sequences.size(); ++s) {
        sgp::prior::TrajectoryBatch batch;
        batch.frequency = library.velocity_frequency_pairs[s].second;
        batch.times.resize(library.sequences[s].length());
        for (std::size_t i = 0; i < batch.times.size(); ++i)
            batch.times[i] = static_cast<double>(i) / library.sample_rate;
        batch.joints = library.sequences[s].joints;
        reference[batch.frequency] = batch;
        for (auto& joint : batch.joints)
            for (auto& v : joint) v += 0.05 * normal(rng);
        actual[batch.frequency] = batch;
    }
    double naive_mse = 0.0, naive_mae = 0.0;
    std::size_t count = 0;
    for (const auto& [f, batch] : actual) {
        const auto& ref = reference.at(f);
        for (int j = 0; j < kJointCount; ++j)
            for (std::size_t i = 0; i < batch.times.size(); ++i) {
                const double d = batch.joints[static_cast<std::size_t>(j)][i] -
                                 ref.joints[static_cast<std::size_t>(j)][i];
                naive_mse += d * d;
                naive_mae += std::abs(d);
                ++count;
            }
    }
    naive_mse /= static_cast<double>(count);
    naive_mae /= static_cast<double>(count);
    if (std::abs(sgp::metrics::l_rec_metric(actual, library) - naive_mse) > 1e-12)
        return false;
    if (std::abs(sgp::metrics::imitation_error(actual, reference) - naive_mae) > 1e-12)
        return false;

    sgp::metrics::VelocityTrace trace;
    double naive_vel = 0.0;
    for (int i = 0; i < 61; ++i) {
        trace.commanded.push_back(0.1 * i);
        trace.measured.push_back(0.1 * i + 0.02 * normal(rng));
        naive_vel += std::abs(trace.commanded.back() - trace.measured.back());
    }
    naive_vel /= 61.0;
    if (std::abs(sgp::metrics::velocity_tracking_error(trace) - naive_vel) > 1e-12)
        return false;

    // motion_stats vs two-pass oracle.
    std::vector<Eigen::VectorXd> frames;
    for (int i = 0; i < 30; ++i) {
        Eigen::VectorXd f(3);
        for (int d = 0; d < 3; ++d) f[d] = normal(rng);
        frames.push_back(f);
    }
    Eigen::VectorXd mean = Eigen::VectorXd::Zero(3);
    for (const auto& f : frames) mean += f;
    mean /= static_cast<double>(frames.size());
    Eigen::MatrixXd cov = Eigen::MatrixXd::Zero(3, 3);
    for (const auto& f : frames) cov += (f - mean) * (f - mean).transpose();
    cov /= static_cast<double>(frames.size() - 1);
    const auto stats = sgp::metrics::motion_stats(frames);
    if ((stats.mean - mean).norm() > 1e-10) return false;
    if ((stats.covariance - cov).norm() > 1e-10) return false;
    return true;
}

// --- criterion 6: reward stack -----------------------------------------------
bool reward_stack() {
    using namespace sgp::rewards;
    auto close = [](double a, double b, double tol = 1e-12) { return std::abs(a - b) <= tol; };

    if (!close(filter_command(0.0, 6.0, 2.0, 0.02), 0.04)) return false;
    if (!close(filter_command(5.99, 6.0, 2.0, 0.02), 6.0)) return false;
    if (!close(filter_command(2.5, 2.5, 2.0, 0.02), 2.5)) return false;
    if (!close(lin_vel_reward(2.0, 2.0, 3.0, 0.25), 3.0)) return false;
    if (!close(lin_vel_reward(3.0, 2.5, 3.0, 0.25), 3.0 * std::exp(-1.0))) return false;
    std::array<double, kJointCount> q{}, q_ref{};
    if (!close(prior_guidance_reward(q, q_ref, 2.0, 0.25), 20.0)) return false;
    q[0] = 0.5;  // sqrt(0.25)
    if (!close(prior_guidance_reward(q, q_ref, 2.0, 0.25), 2.0 * (9.0 + std::exp(-1.0))))
        return false;
    if (!close(target_air_time(2.0, 0.4), 0.2)) return false;
    if (!close(target_air_time(0.8, 0.4), 0.5)) return false;
    RobotStateFrame air;
    air.left_foot.contact = true;
    air.right_foot.contact = false;
    air.right_foot.air_time = 0.05;
    if (!close(feet_air_reward(air, 0.2, 2.0), 0.3)) return false;
    if (!close(torso_pitch_penalty(0.05, 0.0, -1.0), 0.0)) return false;
    if (!close(torso_pitch_penalty(0.5, 6.0, -1.0), -0.01)) return false;
    if (!close(torso_pitch_penalty(-0.1, 0.0, -1.0), -0.01)) return false;

    RewardConfig config;
    RobotStateFrame frame;
    frame.left_foot.contact = frame.right_foot.contact = true;
    frame.left_foot.lateral_position = 0.0;
    frame.right_foot.lateral_position = 0.05;
    frame.base_height = 0.62;
    double close_feet = 0.0, base_height = 0.0;
    for (const auto& [name, value] : table_rewards(frame, config)) {
        if (name == "close_feet") close_feet = value;
        if (name == "base_height") base_height = value;
    }
    if (!close(close_feet, -5.0)) return false;
    if (!close(base_height, -0.3)) return false;

    std::mt19937_64 rng(11);
    std::normal_distribution<double> normal(0.0, 1.0);
    std::bernoulli_distribution coin(0.5);
    for (int trial = 0; trial < 10000; ++trial) {
        RobotStateFrame random;
        for (int j = 0; j < kJointCount; ++j) {
            const auto i = static_cast<std::size_t>(j);
            random.joint_positions[i] = 2.0 * normal(rng);
            random.joint_velocities[i] = 5.0 * normal(rng);
            random.joint_accelerations[i] = 50.0 * normal(rng);
            random.joint_torques[i] = 20.0 * normal(rng);
        }
        for (auto& w : random.base_angular_velocity) w = normal(rng);
        random.gravity_x = 0.3 * normal(rng);
        random.base_height = 0.72 + 0.2 * normal(rng);
        random.planar_speed = std::abs(2.0 * normal(rng));
        random.terminated = coin(rng);
        for (FootState* foot : {&random.left_foot, &random.right_foot}) {
            foot->contact = coin(rng);
            foot->height = std::abs(0.1 * normal(rng));
            foot->tangential_speed = std::abs(normal(rng));
            foot->lateral_position = 0.2 * normal(rng);
            foot->air_time = std::abs(0.3 * normal(rng));
            foot->ground_tilt = std::abs(0.2 * normal(rng));
        }
        CommandState command;
        command.raw_velocity = std::abs(2.0 * normal(rng));
        command.filtered_velocity = command.raw_velocity;
        command.yaw_rate = normal(rng);
        command.frequency = 0.6 + std::abs(normal(rng));
        std::array<double, kJointCount> target{};
        for (auto& v : target) v = 0.4 * normal(rng);
        const RewardBreakdown breakdown = total_reward(random, command, target, config);
        double sum = 0.0;
        for (const auto& [name, value] : breakdown.terms) sum += value;
        if (std::abs(breakdown.total - sum) > 1e-12) return false;
    }
    return true;
}

// --- criterion 7: FiLM bound fuzzing -----------------------------------------
bool film_bounds() {
    std::mt19937_64 rng(13);
    std::normal_distribution<double> normal(0.0, 4.0);
    sgp::prior::Architecture arch;
    arch.latent_dim = 2;
    arch.encoder_hidden = 4;
    arch.decoder_widths = {8, 8};
    arch.harmonic_count = 2;
    for (int trial = 0; trial < 10000; ++trial) {
        sgp::prior::PriorModel model = sgp::prior::init_model(arch, rng());
        for (auto& m : model.film_gamma_w) m *= normal(rng);
        for (auto& m : model.film_beta_w) m *= normal(rng);
        Eigen::VectorXd context(arch.context_dim());
        for (Eigen::Index i = 0; i < context.size(); ++i) context[i] = normal(rng);
        for (const auto& film : sgp::prior::film_modulation(model, context)) {
            for (Eigen::Index i = 0; i < film.gamma.size(); ++i) {
                if (film.gamma[i] < 0.9 || film.gamma[i] > 1.1) return false;
                if (film.beta[i] < -0.1 || film.beta[i] > 0.1) return false;
            }
        }
    }
    return true;
}

// --- criterion 8: CLI determinism --------------------------------------------
std::string slurp(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream out;
    out << in.rdbuf();
    return out.str();
}

int run_cli(const std::string& args) {
    const std::string command =
        std::string(SGP_CLI_PATH) + " " + args + " > /dev/null 2>&1";
    const int status = std::system(command.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

bool cli_determinism() {
    const fs::path tmp =
        fs::temp_directory_path() / ("sgp_accept_" + std::to_string(std::random_device{}()));
    fs::create_directories(tmp);
    bool ok = true;

    const fs::path lib = tmp / "lib";
    ok = ok && run_cli("synth --seed 5 --out " + lib.string()) == 0;
    const std::string overrides = " --set epochs=10 --set batch_size=64";
    const fs::path ckpt_a = tmp / "a.spm";
    const fs::path ckpt_b = tmp / "b.spm";
    ok = ok && run_cli("train --seed 5 --library " + lib.string() + " --out " +
                       ckpt_a.string() + overrides) == 0;
    ok = ok && run_cli("train --seed 5 --library " + lib.string() + " --out " +
                       ckpt_b.string() + overrides) == 0;
    ok = ok && slurp(ckpt_a) == slurp(ckpt_b);

    const fs::path gen_a = tmp / "gen_a.csv";
    const fs::path gen_b = tmp / "gen_b.csv";
    ok = ok && run_cli("generate --seed 9 --checkpoint " + ckpt_a.string() +
                       " --freq 1.25 --mode sample --out " + gen_a.string()) == 0;
    ok = ok && run_cli("generate --seed 9 --checkpoint " + ckpt_a.string() +
                       " --freq 1.25 --mode sample --out " + gen_b.string()) == 0;
    ok = ok && slurp(gen_a) == slurp(gen_b);

    // Checkpoint roundtrip is bit-exact.
    if (ok) {
        const auto checkpoint = sgp::train::load_checkpoint(ckpt_a.string());
        const fs::path resaved = tmp / "resaved.spm";
        sgp::train::save_checkpoint(resaved.string(), checkpoint);
        ok = slurp(ckpt_a) == slurp(resaved);
    }
    fs::remove_all(tmp);
    return ok;
}

// --- criterion 9: velocity map -----------------------------------------------
bool velocity_map(const sgp::reflib::ReferenceLibrary& analyzed) {
    sgp::reflib::ReferenceLibrary lib;
    lib.velocity_frequency_pairs = {
        {0.66, 0.68}, {1.10, 0.86}, {2.29, 1.25}, {2.87, 1.36}, {3.40, 1.58}};
    if (sgp::reflib::velocity_to_frequency(lib, 2.29) != 1.25) return false;
    for (double v : {6.0, 6.5, 7.0, 100.0})
        if (sgp::reflib::velocity_to_frequency(lib, v) != 2.3) return false;
    for (const sgp::reflib::ReferenceLibrary* map :
         {static_cast<const sgp::reflib::ReferenceLibrary*>(&lib), &analyzed}) {
        double previous = -1.0;
        for (int i = 0; i <= 700; ++i) {
            const double f = sgp::reflib::velocity_to_frequency(*map, 0.01 * i);
            if (f < previous || f < map->frequency_floor || f > map->frequency_ceiling)
                return false;
            previous = f;
        }
    }
    return true;
}

}  // namespace

int main() {
    std::cout.setf(std::ios::fixed);
    std::cout.precision(6);

    const auto library = canonical_library();

    {
        const auto start = Clock::now();
        const bool pass = gradient_oracle();
        const double elapsed = seconds_since(start);
        report(1, pass && elapsed < 60.0,
               "analytic gradients match central finite differences on 20 tiny models (" +
                   std::to_string(elapsed) + " s)");
    }

    {
        const TrainedEvaluation eval = trained_evaluation(library);
        std::ostringstream detail;
        detail.precision(6);
        detail << "default training run: l_rec " << eval.l_rec << " (<= 2e-3), fid "
               << eval.fid << " (<= 5e-3), e_ba " << eval.e_ba << " (<= 0.10), "
               << eval.train_seconds << " s (<= 600)";
        const bool pass2 = !eval.diverged && eval.l_rec <= 2e-3 && eval.fid <= 5e-3 &&
                           eval.e_ba <= 0.10 && eval.train_seconds <= 600.0;
        report(2, pass2, detail.str());

        std::ostringstream detail3;
        detail3.precision(6);
        detail3 << "per-joint RMS at library frequencies " << eval.max_rms
                << " (<= 0.05 rad); band-edge amplitude ratios in [" << eval.worst_ratio_low
                << ", " << eval.worst_ratio_high << "] (within [0.5, 2])";
        const bool pass3 = !eval.diverged && eval.max_rms <= 0.05 &&
                           eval.worst_ratio_low >= 0.5 && eval.worst_ratio_high <= 2.0;
        report(3, pass3, detail3.str());
    }

    {
        const auto start = Clock::now();
        const bool pass = dsp_suite();
        report(4, pass && seconds_since(start) < 30.0,
               "DFT roundtrip, Parseval, polynomial smoothing, band-limited resampling, "
               "off-bin peaks, half-cycle phase recovery");
    }

    {
        const auto start = Clock::now();
        const bool pass = metric_identities(library);
        report(5, pass && seconds_since(start) < 30.0,
               "metric identities and naive-loop oracles");
    }

    {
        const auto start = Clock::now();
        const bool pass = reward_stack();
        report(6, pass && seconds_since(start) < 30.0,
               "reward examples exact; total equals term sum on 10^4 random frames");
    }

    report(7, film_bounds(), "FiLM bounds hold over 10^4 random contexts and parameters");
    report(8, cli_determinism(),
           "train/generate are bit-deterministic; checkpoint roundtrip is bit-exact");
    report(9, velocity_map(library),
           "velocity map anchors, ceiling clamp, and monotone 0-7 m/s sweep");

    if (g_failures == 0) {
        std::cout << "all acceptance criteria passed\n";
        return 0;
    }
    std::cout << g_failures << " acceptance criteria failed\n";
    return 1;
}
