#pragma once

#include <Eigen/Dense>
#include <map>
#include <vector>

#include "sgp/errors.hpp"
#include "sgp/prior.hpp"
#include "sgp/reflib.hpp"

namespace sgp::metrics {

// First two moments of a set of joint-position frames.
struct MotionStats {
    Eigen::VectorXd mean;
    Eigen::MatrixXd covariance;  // unbiased (n-1)
    int dimension = 0;
    int frame_count = 0;
};

struct VelocityTrace {
    std::vector<double> commanded;  // m/s
    std::vector<double> measured;   // m/s
};

// Mean squared error between generated trajectories and the library across
// all library frequencies, joints, and timesteps.
double l_rec_metric(const std::map<double, prior::TrajectoryBatch>& generated,
                    const reflib::ReferenceLibrary& library);

// Mean absolute amplitude discrepancy at the operating-band edge
// frequencies versus the nearest in-library frequency, measured on
// mean-mode generated trajectories at each joint's dominant frequency.
double boundary_amplitude_error(const prior::PriorModel& model,
                                const reflib::ReferenceLibrary& library,
                                const std::vector<double>& extreme_frequencies = {0.6, 2.3});

MotionStats motion_stats(const std::vector<Eigen::VectorXd>& frames);
MotionStats motion_stats(const Eigen::MatrixXd& frames);  // one frame per column

// Frechet distance between the Gaussian summaries. tr((Sa*Sb)^(1/2)) is
// evaluated as the trace square root of the symmetric product
// Sa^(1/2) Sb Sa^(1/2); eigenvalues below zero are clipped.
double fid(const MotionStats& a, const MotionStats& b);

// Stacked frames (10-dim columns) of a trajectory batch / motion sequence.
Eigen::MatrixXd frames_of(const prior::TrajectoryBatch& batch);
Eigen::MatrixXd frames_of(const reflib::MotionSequence& seq);

// Mean absolute error between matched trajectory sets over a shared command
// grid. Keys are commanded velocities.
double imitation_error(const std::map<double, prior::TrajectoryBatch>& actual,
                       const std::map<double, prior::TrajectoryBatch>& reference);

double velocity_tracking_error(const VelocityTrace& trace);

}  // namespace sgp::metrics
