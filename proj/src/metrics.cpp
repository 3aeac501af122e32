#include "sgp/metrics.hpp"

#include <algorithm>
#include <cmath>

namespace sgp::metrics {

namespace {

// Symmetric PSD square root with eigenvalue clipping at zero.
Eigen::MatrixXd psd_sqrt(const Eigen::MatrixXd& m) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(m);
    Eigen::VectorXd eig = solver.eigenvalues().cwiseMax(0.0);
    return solver.eigenvectors() * eig.cwiseSqrt().asDiagonal() *
           solver.eigenvectors().transpose();
}

void check_stats(const MotionStats& s) {
    if (s.dimension < 1) throw InvalidInputError("empty motion stats");
    const double asym = (s.covariance - s.covariance.transpose()).cwiseAbs().maxCoeff();
    if (asym > 1e-9) throw InvalidInputError("covariance is not symmetric");
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(s.covariance);
    const double scale = std::max(1.0, s.covariance.cwiseAbs().maxCoeff());
    if (solver.eigenvalues().minCoeff() < -1e-8 * scale)
        throw InvalidInputError("covariance is not positive semidefinite");
}

}  // namespace

MotionStats motion_stats(const Eigen::MatrixXd& frames) {
    if (frames.cols() < 2) throw InvalidInputError("motion_stats needs at least 2 frames");
    MotionStats stats;
    stats.dimension = static_cast<int>(frames.rows());
    stats.frame_count = static_cast<int>(frames.cols());
    stats.mean = frames.rowwise().mean();
    const Eigen::MatrixXd centered = frames.colwise() - stats.mean;
    stats.covariance =
        centered * centered.transpose() / static_cast<double>(frames.cols() - 1);
    // Symmetrize away roundoff so downstream eigen-solves stay clean.
    stats.covariance = 0.5 * (stats.covariance + stats.covariance.transpose()).eval();
    return stats;
}

MotionStats motion_stats(const std::vector<Eigen::VectorXd>& frames) {
    if (frames.size() < 2) throw InvalidInputError("motion_stats needs at least 2 frames");
    Eigen::MatrixXd m(frames[0].size(), static_cast<Eigen::Index>(frames.size()));
    for (std::size_t i = 0; i < frames.size(); ++i) {
        if (frames[i].size() != m.rows())
            throw InvalidInputError("motion_stats frame dimension mismatch");
        m.col(static_cast<Eigen::Index>(i)) = frames[i];
    }
    return motion_stats(m);
}

double fid(const MotionStats& a, const MotionStats& b) {
    if (a.dimension != b.dimension) throw InvalidInputError("fid dimension mismatch");
    check_stats(a);
    check_stats(b);

    const Eigen::MatrixXd sqrt_a = psd_sqrt(a.covariance);
    const Eigen::MatrixXd inner = sqrt_a * b.covariance * sqrt_a;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(0.5 *
                                                          (inner + inner.transpose()));
    const double trace_sqrt = solver.eigenvalues().cwiseMax(0.0).cwiseSqrt().sum();

    const double mean_term = (a.mean - b.mean).squaredNorm();
    const double value =
        mean_term + a.covariance.trace() + b.covariance.trace() - 2.0 * trace_sqrt;
    return std::max(value, 0.0);
}

Eigen::MatrixXd frames_of(const prior::TrajectoryBatch& batch) {
    Eigen::MatrixXd frames(reflib::kJointCount,
                           static_cast<Eigen::Index>(batch.times.size()));
    for (int j = 0; j < reflib::kJointCount; ++j)
        for (std::size_t i = 0; i < batch.times.size(); ++i)
            frames(j, static_cast<Eigen::Index>(i)) =
                batch.joints[static_cast<std::size_t>(j)][i];
    return frames;
}

Eigen::MatrixXd frames_of(const reflib::MotionSequence& seq) {
    Eigen::MatrixXd frames(reflib::kJointCount, static_cast<Eigen::Index>(seq.length()));
    for (int j = 0; j < reflib::kJointCount; ++j)
        for (std::size_t i = 0; i < seq.length(); ++i)
            frames(j, static_cast<Eigen::Index>(i)) =
                seq.joints[static_cast<std::size_t>(j)][i];
    return frames;
}

double l_rec_metric(const std::map<double, prior::TrajectoryBatch>& generated,
                    const reflib::ReferenceLibrary& library) {
    if (library.sequences.size() != library.velocity_frequency_pairs.size())
        throw InvalidInputError("library sequences and frequency map are inconsistent");
    double acc = 0.0;
    std::size_t terms = 0;
    for (std::size_t s = 0; s < library.sequences.size(); ++s) {
        const double f = library.velocity_frequency_pairs[s].second;
        const auto it = generated.find(f);
        if (it == generated.end())
            throw InvalidInputError("missing generated trajectory at library frequency");
        const auto& batch = it->second;
        const auto& seq = library.sequences[s];
        if (batch.times.size() != seq.length())
            throw InvalidInputError("generated batch off the library time grid");
        for (int j = 0; j < reflib::kJointCount; ++j) {
            const auto& gen = batch.joints[static_cast<std::size_t>(j)];
            const auto& ref = seq.joints[static_cast<std::size_t>(j)];
            for (std::size_t i = 0; i < gen.size(); ++i) {
                const double d = gen[i] - ref[i];
                acc += d * d;
                ++terms;
            }
        }
    }
    return acc / static_cast<double>(terms);
}

double boundary_amplitude_error(const prior::PriorModel& model,
                                const reflib::ReferenceLibrary& library,
                                const std::vector<double>& extreme_frequencies) {
    if (library.velocity_frequency_pairs.empty())
        throw InvalidInputError("empty library frequency map");
    if (extreme_frequencies.empty()) throw InvalidInputError("no extreme frequencies");

    auto joint_amplitudes = [&](double f) {
        const auto batch = prior::generate_trajectory(model, f, library.duration,
                                                      library.sample_rate,
                                                      prior::GenerationMode::mean);
        std::array<double, reflib::kJointCount> amps{};
        for (int j = 0; j < reflib::kJointCount; ++j) {
            dsp::Signal signal{batch.joints[static_cast<std::size_t>(j)],
                               library.sample_rate};
            // Measure each joint where its energy actually lives.
            double peak;
            try {
                peak = dsp::dominant_frequency(dsp::power_spectral_density(signal), 0.1);
            } catch (const NoDominantFrequencyError&) {
                amps[static_cast<std::size_t>(j)] = 0.0;
                continue;
            }
            amps[static_cast<std::size_t>(j)] = dsp::amplitude_at(signal, peak);
        }
        return amps;
    };

    double acc = 0.0;
    for (double f_extreme : extreme_frequencies) {
        double f_boundary = library.velocity_frequency_pairs.front().second;
        for (const auto& [v, f] : library.velocity_frequency_pairs)
            if (std::abs(f - f_extreme) < std::abs(f_boundary - f_extreme)) f_boundary = f;
        const auto extreme = joint_amplitudes(f_extreme);
        const auto boundary = joint_amplitudes(f_boundary);
        for (int j = 0; j < reflib::kJointCount; ++j)
            acc += std::abs(extreme[static_cast<std::size_t>(j)] -
                            boundary[static_cast<std::size_t>(j)]);
    }
    return acc / (static_cast<double>(reflib::kJointCount) *
                  static_cast<double>(extreme_frequencies.size()));
}

double imitation_error(const std::map<double, prior::TrajectoryBatch>& actual,
                       const std::map<double, prior::TrajectoryBatch>& reference) {
    if (actual.empty() || actual.size() != reference.size())
        throw InvalidInputError("imitation_error command grids differ");
    double acc = 0.0;
    std::size_t terms = 0;
    auto it_a = actual.begin();
    auto it_r = reference.begin();
    for (; it_a != actual.end(); ++it_a, ++it_r) {
        if (it_a->first != it_r->first)
            throw InvalidInputError("imitation_error command grids differ");
        const auto& a = it_a->second;
        const auto& r = it_r->second;
        if (a.times.size() != r.times.size())
            throw InvalidInputError("imitation_error time grids differ");
        for (int j = 0; j < reflib::kJointCount; ++j) {
            const auto& qa = a.joints[static_cast<std::size_t>(j)];
            const auto& qr = r.joints[static_cast<std::size_t>(j)];
            for (std::size_t i = 0; i < qa.size(); ++i) {
                acc += std::abs(qa[i] - qr[i]);
                ++terms;
            }
        }
    }
    return acc / static_cast<double>(terms);
}

double velocity_tracking_error(const VelocityTrace& trace) {
    if (trace.commanded.empty() || trace.commanded.size() != trace.measured.size())
        throw InvalidInputError("velocity trace empty or mismatched");
    double acc = 0.0;
    for (std::size_t i = 0; i < trace.commanded.size(); ++i)
        acc += std::abs(trace.commanded[i] - trace.measured[i]);
    return acc / static_cast<double>(trace.commanded.size());
}

}  // namespace sgp::metrics
