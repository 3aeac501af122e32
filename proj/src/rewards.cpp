#include "sgp/rewards.hpp"

#include <algorithm>
#include <cmath>

namespace sgp::rewards {

std::array<std::pair<double, double>, reflib::kJointCount>
RewardConfig::default_joint_limits() {
    // Wide G1-plausible ranges; override for real logs.
    std::array<std::pair<double, double>, reflib::kJointCount> limits{};
    for (int j = 0; j < reflib::kJointCount; ++j)
        limits[static_cast<std::size_t>(j)] = {-2.8, 2.8};
    return limits;
}

double RewardBreakdown::term(const std::string& name) const {
    for (const auto& [key, value] : terms)
        if (key == name) return value;
    throw InvalidInputError("unknown reward term: " + name);
}

double filter_command(double previous_filtered, double raw_command,
                      double acceleration_limit, double dt) {
    const double bound = acceleration_limit * dt;
    return previous_filtered +
           std::clamp(raw_command - previous_filtered, -bound, bound);
}

double lin_vel_reward(double filtered_command, double actual, double weight, double sigma) {
    if (sigma <= 0.0) throw InvalidInputError("sigma must be positive");
    const double err = filtered_command - actual;
    return weight * std::exp(-(err * err) / sigma);
}

double ang_vel_reward(double commanded, double actual, double weight, double sigma) {
    return lin_vel_reward(commanded, actual, weight, sigma);
}

double prior_guidance_reward(const std::array<double, reflib::kJointCount>& q,
                             const std::array<double, reflib::kJointCount>& q_ref,
                             double weight, double sigma) {
    if (sigma <= 0.0) throw InvalidInputError("sigma must be positive");
    double acc = 0.0;
    for (int j = 0; j < reflib::kJointCount; ++j) {
        const double err = q[static_cast<std::size_t>(j)] - q_ref[static_cast<std::size_t>(j)];
        acc += std::exp(-(err * err) / sigma);
    }
    return weight * acc;
}

double target_air_time(double command_frequency, double duty_swing) {
    if (command_frequency <= 0.0)
        throw InvalidInputError("command frequency must be positive");
    return duty_swing / command_frequency;
}

double feet_air_reward(const RobotStateFrame& frame, double air_time_target, double weight) {
    double acc = 0.0;
    for (const FootState* foot : {&frame.left_foot, &frame.right_foot})
        if (!foot->contact) acc += std::max(0.0, air_time_target - foot->air_time);
    return weight * acc;
}

double torso_pitch_penalty(double gravity_x, double raw_command_velocity, double weight) {
    const double forward_target = 0.1 + 0.05 * raw_command_velocity;
    const double backward_target = 0.0;
    const double violation = std::max(0.0, gravity_x - forward_target) +
                             std::max(0.0, backward_target - gravity_x);
    return weight * violation * violation;
}

std::vector<std::pair<std::string, double>> table_rewards(const RobotStateFrame& frame,
                                                          const RewardConfig& config) {
    std::vector<std::pair<std::string, double>> terms;
    const FootState& left = frame.left_foot;
    const FootState& right = frame.right_foot;

    const double feet_gap = std::abs(left.lateral_position - right.lateral_position);
    terms.emplace_back("close_feet",
                       config.w_close_feet * std::max(0.0, config.min_feet_gap - feet_gap));

    double air_height = 0.0;
    for (const FootState* foot : {&left, &right})
        if (!foot->contact)
            air_height +=
                std::exp(-std::abs(foot->height - config.feet_height_ref) / config.sigma_feet);
    terms.emplace_back("feet_air_height", config.w_feet_air_height * air_height);

    const bool both_air = !left.contact && !right.contact;
    const bool both_ground = left.contact && right.contact;
    terms.emplace_back("low_speed_air",
                       config.w_low_speed_air *
                           ((frame.planar_speed < config.low_speed_threshold && both_air)
                                ? 1.0
                                : 0.0));
    terms.emplace_back("high_speed_ground",
                       config.w_high_speed_ground *
                           ((frame.planar_speed > config.high_speed_threshold && both_ground)
                                ? 1.0
                                : 0.0));

    double parallel = 0.0;
    double slide = 0.0;
    for (const FootState* foot : {&left, &right}) {
        if (foot->contact) {
            parallel += std::exp(-foot->ground_tilt);
            slide += foot->tangential_speed;
        }
    }
    terms.emplace_back("feet_ground_parallel", config.w_ground_parallel * parallel);
    terms.emplace_back("feet_slide", config.w_feet_slide * slide);

    terms.emplace_back("alive", config.w_alive * (frame.terminated ? 0.0 : 1.0));

    double torque_sq = 0.0;
    double accel_sq = 0.0;
    double vel_sq = 0.0;
    double limit_violations = 0.0;
    for (int j = 0; j < reflib::kJointCount; ++j) {
        const auto i = static_cast<std::size_t>(j);
        torque_sq += frame.joint_torques[i] * frame.joint_torques[i];
        accel_sq += frame.joint_accelerations[i] * frame.joint_accelerations[i];
        vel_sq += frame.joint_velocities[i] * frame.joint_velocities[i];
        const auto& [lo, hi] = config.joint_limits[i];
        if (frame.joint_positions[i] < lo || frame.joint_positions[i] > hi)
            limit_violations += 1.0;
    }
    terms.emplace_back("torque", config.w_torque * torque_sq);
    terms.emplace_back("joint_accel", config.w_joint_accel * accel_sq);
    terms.emplace_back("joint_limits", config.w_joint_limits * limit_violations);
    terms.emplace_back("joint_vel", config.w_joint_vel * vel_sq);

    const double rp_sq = frame.base_angular_velocity[0] * frame.base_angular_velocity[0] +
                         frame.base_angular_velocity[1] * frame.base_angular_velocity[1];
    terms.emplace_back("rp_ang_vel", config.w_rp_ang_vel * rp_sq);

    const double dz = frame.base_height - config.base_height_target;
    terms.emplace_back("base_height", config.w_base_height * dz * dz);
    return terms;
}

std::array<double, reflib::kJointCount> compose_target(
    const std::array<double, reflib::kJointCount>& q_ref,
    const std::array<double, reflib::kJointCount>& residual, double gain) {
    std::array<double, reflib::kJointCount> target{};
    for (int j = 0; j < reflib::kJointCount; ++j)
        target[static_cast<std::size_t>(j)] = q_ref[static_cast<std::size_t>(j)] +
                                              gain * residual[static_cast<std::size_t>(j)];
    return target;
}

RewardBreakdown total_reward(const RobotStateFrame& frame, const CommandState& command,
                             const std::array<double, reflib::kJointCount>& q_ref,
                             const RewardConfig& config) {
    RewardBreakdown breakdown;
    breakdown.terms.emplace_back(
        "lin_vel", lin_vel_reward(command.filtered_velocity, frame.planar_speed,
                                  config.w_lin_vel, config.sigma_lin_vel));
    breakdown.terms.emplace_back(
        "ang_vel", ang_vel_reward(command.yaw_rate, frame.base_angular_velocity[2],
                                  config.w_ang_vel, config.sigma_ang_vel));
    breakdown.terms.emplace_back(
        "prior", prior_guidance_reward(frame.joint_positions, q_ref, config.w_prior,
                                       config.sigma_prior));
    breakdown.terms.emplace_back(
        "feet_air_time",
        feet_air_reward(frame, target_air_time(command.frequency, config.duty_swing),
                        config.w_air_time));
    breakdown.terms.emplace_back(
        "torso_pitch",
        torso_pitch_penalty(frame.gravity_x, command.raw_velocity, config.w_torso_pitch));
    for (auto& term : table_rewards(frame, config)) breakdown.terms.push_back(std::move(term));

    breakdown.total = 0.0;
    for (const auto& [name, value] : breakdown.terms) breakdown.total += value;
    return breakdown;
}

}  // namespace sgp::rewards
