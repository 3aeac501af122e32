#pragma once

#include <array>
#include <string>
#include <utility>
#include <vector>

#include "sgp/errors.hpp"
#include "sgp/reflib.hpp"

namespace sgp::rewards {

struct FootState {
    bool contact = false;
    double height = 0.0;               // m
    double tangential_speed = 0.0;     // m/s, magnitude at contact point
    double lateral_position = 0.0;     // m, y in body frame
    double air_time = 0.0;             // s, caller-owned stopwatch
    double ground_tilt = 0.0;          // |g_xy| projected at the foot sole
};

// Per-tick robot state as recorded by the log producer.
struct RobotStateFrame {
    std::array<double, reflib::kJointCount> joint_positions{};      // rad
    std::array<double, reflib::kJointCount> joint_velocities{};     // rad/s
    std::array<double, reflib::kJointCount> joint_accelerations{};  // rad/s^2
    std::array<double, reflib::kJointCount> joint_torques{};        // N*m
    std::array<double, 3> base_angular_velocity{};                  // rad/s
    double gravity_x = 0.0;  // projected gravity, body frame
    double gravity_y = 0.0;
    double base_height = 0.0;  // m
    FootState left_foot;
    FootState right_foot;
    double planar_speed = 0.0;  // m/s, actual
    bool terminated = false;
};

struct CommandState {
    double raw_velocity = 0.0;       // v_x^cmd, m/s
    double filtered_velocity = 0.0;  // smoothed command, m/s
    double yaw_rate = 0.0;           // rad/s
    double frequency = 0.0;          // Hz, from the library velocity map
};

struct RewardConfig {
    // Shaping terms not printed in the reward table; config-owned defaults.
    double w_lin_vel = 3.0;
    double w_ang_vel = 1.0;
    double w_prior = 2.0;
    double w_air_time = 2.0;
    double w_torso_pitch = -1.0;
    double sigma_lin_vel = 0.25;
    double sigma_ang_vel = 0.25;
    double sigma_prior = 0.25;
    double acceleration_limit = 2.0;  // m/s^2
    double dt = 0.02;                 // s
    double residual_gain = 0.25;      // alpha
    double duty_swing = 0.4;
    double min_feet_gap = 0.10;   // m
    double feet_height_ref = 0.12;  // m
    double sigma_feet = 0.05;     // m
    double base_height_target = 0.72;  // m

    // Printed table weights.
    double w_close_feet = -100.0;
    double w_feet_air_height = 5.0;
    double w_low_speed_air = -6.0;
    double w_high_speed_ground = -3.0;
    double w_ground_parallel = 1.0;
    double w_feet_slide = -10.0;
    double w_alive = 1.0;
    double w_torque = -5e-6;
    double w_joint_accel = -2e-8;
    double w_joint_limits = -10.0;
    double w_joint_vel = -5e-4;
    double w_rp_ang_vel = -0.5;
    double w_base_height = -30.0;

    double low_speed_threshold = 1.5;   // m/s
    double high_speed_threshold = 3.0;  // m/s
    std::array<std::pair<double, double>, reflib::kJointCount> joint_limits =
        default_joint_limits();

    static std::array<std::pair<double, double>, reflib::kJointCount> default_joint_limits();
};

struct RewardBreakdown {
    std::vector<std::pair<std::string, double>> terms;
    double total = 0.0;

    double term(const std::string& name) const;
};

// Rate-limited first-order command filter.
double filter_command(double previous_filtered, double raw_command, double acceleration_limit,
                      double dt);

double lin_vel_reward(double filtered_command, double actual, double weight, double sigma);
double ang_vel_reward(double commanded, double actual, double weight, double sigma);

double prior_guidance_reward(const std::array<double, reflib::kJointCount>& q,
                             const std::array<double, reflib::kJointCount>& q_ref,
                             double weight, double sigma);

double target_air_time(double command_frequency, double duty_swing);

double feet_air_reward(const RobotStateFrame& frame, double air_time_target, double weight);

double torso_pitch_penalty(double gravity_x, double raw_command_velocity, double weight);

// Every printed reward-table row, weight applied.
std::vector<std::pair<std::string, double>> table_rewards(const RobotStateFrame& frame,
                                                          const RewardConfig& config);

std::array<double, reflib::kJointCount> compose_target(
    const std::array<double, reflib::kJointCount>& q_ref,
    const std::array<double, reflib::kJointCount>& residual, double gain);

RewardBreakdown total_reward(const RobotStateFrame& frame, const CommandState& command,
                             const std::array<double, reflib::kJointCount>& q_ref,
                             const RewardConfig& config);

}  // namespace sgp::rewards
