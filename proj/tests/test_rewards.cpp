#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "sgp/rewards.hpp"

using namespace sgp::rewards;
using sgp::reflib::kJointCount;

namespace {

// A frame with perfect tracking, compliant feet, and no violations.
RobotStateFrame ideal_frame(const RewardConfig& config) {
    RobotStateFrame frame;
    frame.base_height = config.base_height_target;
    frame.gravity_x = 0.05;
    frame.planar_speed = 2.0;
    frame.left_foot.contact = true;
    frame.left_foot.lateral_position = 0.15;
    frame.left_foot.ground_tilt = 0.0;
    frame.right_foot.contact = false;
    frame.right_foot.lateral_position = -0.15;
    frame.right_foot.height = config.feet_height_ref;
    frame.right_foot.air_time = 10.0;  // past any target
    return frame;
}

RobotStateFrame random_frame(std::mt19937_64& rng) {
    std::normal_distribution<double> normal(0.0, 1.0);
    std::bernoulli_distribution coin(0.5);
    RobotStateFrame frame;
    for (int j = 0; j < kJointCount; ++j) {
        const auto i = static_cast<std::size_t>(j);
        frame.joint_positions[i] = 2.0 * normal(rng);
        frame.joint_velocities[i] = 5.0 * normal(rng);
        frame.joint_accelerations[i] = 50.0 * normal(rng);
        frame.joint_torques[i] = 20.0 * normal(rng);
    }
    for (auto& w : frame.base_angular_velocity) w = normal(rng);
    frame.gravity_x = 0.3 * normal(rng);
    frame.gravity_y = 0.3 * normal(rng);
    frame.base_height = 0.72 + 0.2 * normal(rng);
    frame.planar_speed = std::abs(2.0 * normal(rng));
    frame.terminated = coin(rng);
    for (FootState* foot : {&frame.left_foot, &frame.right_foot}) {
        foot->contact = coin(rng);
        foot->height = std::abs(0.1 * normal(rng));
        foot->tangential_speed = std::abs(normal(rng));
        foot->lateral_position = 0.2 * normal(rng);
        foot->air_time = std::abs(0.3 * normal(rng));
        foot->ground_tilt = std::abs(0.2 * normal(rng));
    }
    return frame;
}

}  // namespace

TEST_CASE("filter_command: clip active, inactive, and fixed point") {
    CHECK(filter_command(0.0, 6.0, 2.0, 0.02) == doctest::Approx(0.04).epsilon(1e-15));
    CHECK(filter_command(5.99, 6.0, 2.0, 0.02) == doctest::Approx(6.0).epsilon(1e-15));
    CHECK(filter_command(2.5, 2.5, 2.0, 0.02) == 2.5);
    CHECK(filter_command(6.0, 0.0, 2.0, 0.02) == doctest::Approx(5.96).epsilon(1e-15));
}

TEST_CASE("filter_command converges to a constant command in the exact step count") {
    const double a = 2.0, dt = 0.02, cmd = 3.0;
    double v = 0.0;
    const int expected_steps =
        static_cast<int>(std::ceil(std::abs(cmd - v) / (a * dt)));
    int steps = 0;
    while (v != cmd) {
        const double prev = v;
        v = filter_command(v, cmd, a, dt);
        CHECK(std::abs(v - prev) <= a * dt + 1e-15);
        ++steps;
        REQUIRE(steps <= expected_steps);
    }
    CHECK(steps == expected_steps);
}

TEST_CASE("velocity tracking kernels: peak, e-folding, and direct evaluation") {
    CHECK(lin_vel_reward(2.0, 2.0, 3.0, 0.25) == doctest::Approx(3.0).epsilon(1e-15));
    CHECK(ang_vel_reward(0.5, 0.5, 1.0, 0.25) == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(lin_vel_reward(0.5, 0.0, 1.0, 0.25) ==
          doctest::Approx(1.0 / std::exp(1.0)).epsilon(1e-12));  // err^2 = sigma
    CHECK(lin_vel_reward(3.0, 2.5, 3.0, 0.25) ==
          doctest::Approx(3.0 * std::exp(-1.0)).epsilon(1e-12));
    CHECK(lin_vel_reward(3.0, 2.5, 3.0, 0.25) == doctest::Approx(1.103638).epsilon(1e-5));
}

TEST_CASE("prior_guidance_reward: peak, single deviation, and naive oracle") {
    std::array<double, kJointCount> q{}, q_ref{};
    for (int j = 0; j < kJointCount; ++j)
        q[static_cast<std::size_t>(j)] = q_ref[static_cast<std::size_t>(j)] = 0.1 * j;
    CHECK(prior_guidance_reward(q, q_ref, 2.0, 0.25) ==
          doctest::Approx(20.0).epsilon(1e-12));

    q[3] += std::sqrt(0.25);
    CHECK(prior_guidance_reward(q, q_ref, 2.0, 0.25) ==
          doctest::Approx(2.0 * (9.0 + std::exp(-1.0))).epsilon(1e-12));

    std::mt19937_64 rng(14);
    std::normal_distribution<double> normal(0.0, 0.4);
    for (auto& v : q) v = normal(rng);
    double naive = 0.0;
    for (int j = 0; j < kJointCount; ++j) {
        const double err = q[static_cast<std::size_t>(j)] - q_ref[static_cast<std::size_t>(j)];
        naive += std::exp(-err * err / 0.25);
    }
    CHECK(prior_guidance_reward(q, q_ref, 2.0, 0.25) ==
          doctest::Approx(2.0 * naive).epsilon(1e-12));
}

TEST_CASE("target_air_time: direct evaluation and error path") {
    CHECK(target_air_time(2.0, 0.4) == doctest::Approx(0.2).epsilon(1e-15));
    CHECK(target_air_time(0.8, 0.4) == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(target_air_time(1.3, 0.0) == 0.0);
    CHECK_THROWS_AS(target_air_time(0.0, 0.4), sgp::InvalidInputError);
}

TEST_CASE("feet_air_reward cases") {
    RobotStateFrame frame;
    frame.left_foot.contact = true;
    frame.right_foot.contact = true;
    CHECK(feet_air_reward(frame, 0.2, 2.0) == 0.0);

    frame.right_foot.contact = false;
    frame.right_foot.air_time = 0.05;
    CHECK(feet_air_reward(frame, 0.2, 2.0) == doctest::Approx(0.3).epsilon(1e-12));

    frame.right_foot.air_time = 0.5;
    CHECK(feet_air_reward(frame, 0.2, 2.0) == 0.0);
}

TEST_CASE("torso_pitch_penalty: dead zone, forward, and backward branches") {
    CHECK(torso_pitch_penalty(0.05, 0.0, -1.0) == 0.0);
    CHECK(torso_pitch_penalty(0.0, 0.0, -1.0) == 0.0);
    CHECK(torso_pitch_penalty(0.1, 0.0, -1.0) == 0.0);
    // v = 6 -> forward target 0.4; g_x = 0.5 exceeds by 0.1.
    CHECK(torso_pitch_penalty(0.5, 6.0, -1.0) == doctest::Approx(-0.01).epsilon(1e-12));
    CHECK(torso_pitch_penalty(-0.1, 0.0, -1.0) == doctest::Approx(-0.01).epsilon(1e-12));
}

TEST_CASE("table_rewards: printed-weight semantics on constructed frames") {
    RewardConfig config;
    RobotStateFrame frame;
    frame.left_foot.contact = true;
    frame.right_foot.contact = true;

    auto term = [&](const char* name) {
        for (const auto& [key, value] : table_rewards(frame, config))
            if (key == name) return value;
        FAIL("missing term " << name);
        return 0.0;
    };

    frame.left_foot.lateral_position = 0.1;
    frame.right_foot.lateral_position = -0.1;
    CHECK(term("close_feet") == 0.0);
    frame.right_foot.lateral_position = 0.05;
    CHECK(term("close_feet") == doctest::Approx(-5.0).epsilon(1e-12));
    frame.right_foot.lateral_position = -0.1;

    frame.planar_speed = 1.0;
    frame.left_foot.contact = frame.right_foot.contact = false;
    CHECK(term("low_speed_air") == doctest::Approx(-6.0).epsilon(1e-12));
    frame.left_foot.contact = frame.right_foot.contact = true;
    CHECK(term("low_speed_air") == 0.0);

    frame.planar_speed = 4.0;
    CHECK(term("high_speed_ground") == doctest::Approx(-3.0).epsilon(1e-12));
    frame.planar_speed = 1.0;

    frame.base_height = 0.62;
    CHECK(term("base_height") == doctest::Approx(-0.3).epsilon(1e-12));
    frame.base_height = config.base_height_target;

    frame.left_foot.tangential_speed = 0.4;
    CHECK(term("feet_slide") == doctest::Approx(-4.0).epsilon(1e-12));
    frame.left_foot.tangential_speed = 0.0;

    frame.joint_torques[0] = 100.0;
    CHECK(term("torque") == doctest::Approx(-5e-6 * 1e4).epsilon(1e-12));
    frame.joint_torques[0] = 0.0;

    frame.joint_positions[2] = 3.0;  // beyond +-2.8 default limit
    CHECK(term("joint_limits") == doctest::Approx(-10.0).epsilon(1e-12));
    frame.joint_positions[2] = 0.0;

    frame.terminated = false;
    CHECK(term("alive") == 1.0);
    frame.terminated = true;
    CHECK(term("alive") == 0.0);
}

TEST_CASE("every table penalty has the sign of its printed weight on violations") {
    RewardConfig config;
    std::mt19937_64 rng(15);
    for (int trial = 0; trial < 200; ++trial) {
        const RobotStateFrame frame = random_frame(rng);
        for (const auto& [name, value] : table_rewards(frame, config)) {
            if (name == "torque" || name == "joint_accel" || name == "joint_vel" ||
                name == "rp_ang_vel" || name == "base_height" || name == "close_feet" ||
                name == "low_speed_air" || name == "high_speed_ground" ||
                name == "feet_slide" || name == "joint_limits")
                CHECK(value <= 0.0);
            else
                CHECK(value >= 0.0);
        }
    }
}

TEST_CASE("compose_target arithmetic") {
    std::array<double, kJointCount> q_ref{}, residual{};
    q_ref.fill(0.3);
    residual.fill(0.2);
    CHECK(compose_target(q_ref, residual, 0.25)[0] == doctest::Approx(0.35).epsilon(1e-15));
    CHECK(compose_target(q_ref, residual, 0.0)[0] == 0.3);
    residual.fill(0.0);
    CHECK(compose_target(q_ref, residual, 0.25)[4] == 0.3);
}

TEST_CASE("total_reward on an ideal frame matches the hand-computed composition") {
    RewardConfig config;
    CommandState command;
    command.raw_velocity = 2.0;
    command.filtered_velocity = 2.0;
    command.yaw_rate = 0.0;
    command.frequency = 1.2;

    RobotStateFrame frame = ideal_frame(config);
    std::array<double, kJointCount> q_ref = frame.joint_positions;

    const RewardBreakdown breakdown = total_reward(frame, command, q_ref, config);
    CHECK(breakdown.term("lin_vel") == doctest::Approx(config.w_lin_vel).epsilon(1e-12));
    CHECK(breakdown.term("ang_vel") == doctest::Approx(config.w_ang_vel).epsilon(1e-12));
    CHECK(breakdown.term("prior") == doctest::Approx(10.0 * config.w_prior).epsilon(1e-12));
    CHECK(breakdown.term("feet_air_time") == 0.0);  // air time already past target
    CHECK(breakdown.term("torso_pitch") == 0.0);
    CHECK(breakdown.term("close_feet") == 0.0);
    CHECK(breakdown.term("feet_slide") == 0.0);
    CHECK(breakdown.term("torque") == 0.0);
    CHECK(breakdown.term("joint_accel") == 0.0);
    CHECK(breakdown.term("joint_limits") == 0.0);
    CHECK(breakdown.term("joint_vel") == 0.0);
    CHECK(breakdown.term("rp_ang_vel") == 0.0);
    CHECK(breakdown.term("base_height") == 0.0);
    CHECK(breakdown.term("alive") == config.w_alive);
    // Airborne foot exactly at the reference height contributes the full kernel.
    CHECK(breakdown.term("feet_air_height") ==
          doctest::Approx(config.w_feet_air_height).epsilon(1e-12));
}

TEST_CASE("terminated frames drop the alive bonus") {
    RewardConfig config;
    CommandState command;
    command.frequency = 1.0;
    RobotStateFrame frame = ideal_frame(config);
    frame.terminated = true;
    const RewardBreakdown breakdown =
        total_reward(frame, command, frame.joint_positions, config);
    CHECK(breakdown.term("alive") == 0.0);
}

TEST_CASE("breakdown total equals the term sum on random frames") {
    RewardConfig config;
    std::mt19937_64 rng(16);
    std::normal_distribution<double> normal(0.0, 1.0);
    for (int trial = 0; trial < 10000; ++trial) {
        const RobotStateFrame frame = random_frame(rng);
        CommandState command;
        command.raw_velocity = std::abs(2.0 * normal(rng));
        command.filtered_velocity = command.raw_velocity + 0.1 * normal(rng);
        command.yaw_rate = normal(rng);
        command.frequency = 0.6 + std::abs(normal(rng));
        std::array<double, kJointCount> q_ref{};
        for (auto& v : q_ref) v = 0.4 * normal(rng);
        const RewardBreakdown breakdown = total_reward(frame, command, q_ref, config);
        double sum = 0.0;
        for (const auto& [name, value] : breakdown.terms) sum += value;
        CHECK(std::abs(breakdown.total - sum) < 1e-12);
    }
}

TEST_CASE("total_reward is a pure function of its inputs") {
    RewardConfig config;
    std::mt19937_64 rng(18);
    const RobotStateFrame frame = random_frame(rng);
    CommandState command;
    command.raw_velocity = 1.7;
    command.filtered_velocity = 1.6;
    command.yaw_rate = 0.2;
    command.frequency = 1.1;
    std::array<double, kJointCount> q_ref{};
    q_ref.fill(0.1);
    const RewardBreakdown a = total_reward(frame, command, q_ref, config);
    const RewardBreakdown b = total_reward(frame, command, q_ref, config);
    CHECK(a.total == b.total);
    REQUIRE(a.terms.size() == b.terms.size());
    for (std::size_t i = 0; i < a.terms.size(); ++i) {
        CHECK(a.terms[i].first == b.terms[i].first);
        CHECK(a.terms[i].second == b.terms[i].second);
    }
}
