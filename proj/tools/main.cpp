#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>

#include "sgp/metrics.hpp"
#include "sgp/prior.hpp"
#include "sgp/reflib.hpp"
#include "sgp/rewards.hpp"
#include "sgp/svg.hpp"
#include "sgp/train.hpp"

namespace fs = std::filesystem;
using sgp::reflib::kJointCount;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitInput = 2;
constexpr int kExitDiverged = 3;

[[noreturn]] void fail_input(const std::string& message) {
    std::cerr << "error: " << message << '\n';
    std::exit(kExitInput);
}

double parse_override_value(const std::string& key, const std::string& text) {
    try {
        std::size_t pos = 0;
        const double v = std::stod(text, &pos);
        if (pos != text.size()) throw std::invalid_argument(text);
        return v;
    } catch (const std::exception&) {
        fail_input("override " + key + ": '" + text + "' is not a number");
    }
}

std::map<std::string, double> parse_overrides(const std::vector<std::string>& sets,
                                              const std::vector<std::string>& valid_keys) {
    std::map<std::string, double> overrides;
    for (const auto& entry : sets) {
        const auto eq = entry.find('=');
        if (eq == std::string::npos) fail_input("--set expects key=value, got '" + entry + "'");
        const std::string key = entry.substr(0, eq);
        if (std::find(valid_keys.begin(), valid_keys.end(), key) == valid_keys.end()) {
            std::string known;
            for (const auto& k : valid_keys) known += (known.empty() ? "" : ", ") + k;
            fail_input("unknown override key '" + key + "'; valid keys: " + known);
        }
        overrides[key] = parse_override_value(key, entry.substr(eq + 1));
    }
    return overrides;
}

const std::vector<std::string> kTrainKeys = {
    "beta_kl",    "learning_rate", "beta1",          "beta2",
    "epochs",     "batch_size",    "clip_norm",      "latent_dim",
    "encoder_hidden", "decoder_width", "decoder_layers", "harmonic_count"};

void apply_train_overrides(const std::map<std::string, double>& o,
                           sgp::train::TrainConfig& config,
                           sgp::prior::Architecture& arch) {
    auto get = [&](const char* key, double fallback) {
        const auto it = o.find(key);
        return it == o.end() ? fallback : it->second;
    };
    config.beta_kl = get("beta_kl", config.beta_kl);
    config.learning_rate = get("learning_rate", config.learning_rate);
    config.beta1 = get("beta1", config.beta1);
    config.beta2 = get("beta2", config.beta2);
    config.epochs = static_cast<int>(get("epochs", config.epochs));
    config.batch_size = static_cast<int>(get("batch_size", config.batch_size));
    config.clip_norm = get("clip_norm", config.clip_norm);
    arch.latent_dim = static_cast<int>(get("latent_dim", arch.latent_dim));
    arch.encoder_hidden = static_cast<int>(get("encoder_hidden", arch.encoder_hidden));
    arch.harmonic_count = static_cast<int>(get("harmonic_count", arch.harmonic_count));
    const int width = static_cast<int>(get("decoder_width", arch.decoder_widths[0]));
    const int layers =
        static_cast<int>(get("decoder_layers", static_cast<double>(arch.decoder_widths.size())));
    if (layers < 1) fail_input("decoder_layers must be >= 1");
    arch.decoder_widths.assign(static_cast<std::size_t>(layers), width);
}

const std::vector<std::string> kRewardKeys = {
    "w_lin_vel",      "w_ang_vel",        "w_prior",       "w_air_time",
    "w_torso_pitch",  "sigma_lin_vel",    "sigma_ang_vel", "sigma_prior",
    "acceleration_limit", "dt",           "residual_gain", "duty_swing",
    "min_feet_gap",   "feet_height_ref",  "sigma_feet",    "base_height_target",
    "w_close_feet",   "w_feet_air_height", "w_low_speed_air", "w_high_speed_ground",
    "w_ground_parallel", "w_feet_slide",  "w_alive",       "w_torque",
    "w_joint_accel",  "w_joint_limits",   "w_joint_vel",   "w_rp_ang_vel",
    "w_base_height"};

void apply_reward_overrides(const std::map<std::string, double>& o,
                            sgp::rewards::RewardConfig& config) {
    const std::map<std::string, double*> fields = {
        {"w_lin_vel", &config.w_lin_vel},
        {"w_ang_vel", &config.w_ang_vel},
        {"w_prior", &config.w_prior},
        {"w_air_time", &config.w_air_time},
        {"w_torso_pitch", &config.w_torso_pitch},
        {"sigma_lin_vel", &config.sigma_lin_vel},
        {"sigma_ang_vel", &config.sigma_ang_vel},
        {"sigma_prior", &config.sigma_prior},
        {"acceleration_limit", &config.acceleration_limit},
        {"dt", &config.dt},
        {"residual_gain", &config.residual_gain},
        {"duty_swing", &config.duty_swing},
        {"min_feet_gap", &config.min_feet_gap},
        {"feet_height_ref", &config.feet_height_ref},
        {"sigma_feet", &config.sigma_feet},
        {"base_height_target", &config.base_height_target},
        {"w_close_feet", &config.w_close_feet},
        {"w_feet_air_height", &config.w_feet_air_height},
        {"w_low_speed_air", &config.w_low_speed_air},
        {"w_high_speed_ground", &config.w_high_speed_ground},
        {"w_ground_parallel", &config.w_ground_parallel},
        {"w_feet_slide", &config.w_feet_slide},
        {"w_alive", &config.w_alive},
        {"w_torque", &config.w_torque},
        {"w_joint_accel", &config.w_joint_accel},
        {"w_joint_limits", &config.w_joint_limits},
        {"w_joint_vel", &config.w_joint_vel},
        {"w_rp_ang_vel", &config.w_rp_ang_vel},
        {"w_base_height", &config.w_base_height},
    };
    for (const auto& [key, value] : o) *fields.at(key) = value;
}

std::vector<sgp::reflib::SynthSpec> load_synth_specs(const std::string& path,
                                                     std::uint64_t seed) {
    if (path.empty()) return sgp::reflib::canonical_synth_specs(seed);
    std::ifstream in(path);
    if (!in) fail_input("cannot open spec file: " + path);
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        fail_input(std::string("malformed spec file: ") + e.what());
    }
    std::vector<sgp::reflib::SynthSpec> specs;
    for (const auto& entry : j.at("sequences")) {
        sgp::reflib::SynthSpec spec;
        spec.name = entry.at("name").get<std::string>();
        spec.velocity = entry.at("velocity_mps").get<double>();
        spec.frequency = entry.at("frequency_hz").get<double>();
        spec.duration = entry.value("duration_s", 10.0);
        spec.sample_rate = entry.value("sample_rate_hz", 60.0);
        spec.noise_amplitude = entry.value("noise_amplitude", 0.0);
        spec.seed = seed + specs.size();
        const auto& joints = entry.at("joints");
        for (int p = 0; p < sgp::reflib::kJointPairCount; ++p) {
            const auto& jj = joints.at(static_cast<std::size_t>(p));
            auto& joint = spec.joints[static_cast<std::size_t>(p)];
            joint.sin_coeffs = jj.at("sin").get<std::vector<double>>();
            joint.cos_coeffs = jj.at("cos").get<std::vector<double>>();
            joint.phase_offset = jj.value("phase_offset", 0.5);
        }
        specs.push_back(std::move(spec));
    }
    return specs;
}

// FNV-1a over the checkpoint's architecture + config JSON, reported with
// every metric row so reports are traceable to a configuration.
std::string config_hash(const sgp::train::Checkpoint& checkpoint) {
    std::ostringstream text;
    text << checkpoint.model.arch.latent_dim << '|' << checkpoint.model.arch.encoder_hidden
         << '|' << checkpoint.model.arch.harmonic_count << '|';
    for (int w : checkpoint.model.arch.decoder_widths) text << w << ',';
    text << '|' << checkpoint.config.beta_kl << '|' << checkpoint.config.learning_rate << '|'
         << checkpoint.config.epochs << '|' << checkpoint.config.seed;
    std::uint64_t hash = 14695981039346656037ull;
    for (char c : text.str()) {
        hash ^= static_cast<unsigned char>(c);
        hash *= 1099511628211ull;
    }
    std::ostringstream out;
    out << std::hex << hash;
    return out.str();
}

void write_generated(const std::string& out_path, const sgp::prior::TrajectoryBatch& batch,
                     double rate, double velocity, bool has_velocity) {
    sgp::reflib::MotionSequence seq;
    seq.name = "generated";
    seq.velocity = has_velocity ? velocity : 0.0;
    seq.sample_rate = rate;
    for (int j = 0; j < kJointCount; ++j)
        seq.joints[static_cast<std::size_t>(j)] = batch.joints[static_cast<std::size_t>(j)];
    sgp::reflib::save_sequence(out_path, seq);

    // Record the generation settings in the sidecar.
    std::string meta_path = out_path;
    if (meta_path.ends_with(".csv")) meta_path.resize(meta_path.size() - 4);
    meta_path += ".meta.json";
    std::ifstream meta_in(meta_path);
    nlohmann::json meta;
    meta_in >> meta;
    meta_in.close();
    meta["frequency_hz"] = batch.frequency;
    meta["mode"] = batch.mode == sgp::prior::GenerationMode::mean ? "mean" : "sample";
    meta["seed"] = batch.seed;
    std::ofstream meta_out(meta_path);
    meta_out << meta.dump(2) << '\n';
}

struct LogColumns {
    std::vector<std::string> names;
    int index_of(const std::string& name) const {
        for (std::size_t i = 0; i < names.size(); ++i)
            if (names[i] == name) return static_cast<int>(i);
        return -1;
    }
};

int run_reward_audit(const std::string& log_path, const std::string& checkpoint_path,
                     const std::string& library_dir, const std::string& out_path,
                     const std::vector<std::string>& sets) {
    sgp::rewards::RewardConfig config;
    apply_reward_overrides(parse_overrides(sets, kRewardKeys), config);

    const auto checkpoint = sgp::train::load_checkpoint(checkpoint_path);
    const auto library = sgp::reflib::load_library(library_dir);

    std::ifstream log(log_path);
    if (!log) fail_input("cannot open log: " + log_path);
    std::string header_line;
    if (!std::getline(log, header_line)) fail_input("empty log: " + log_path);
    LogColumns columns;
    {
        std::stringstream ss(header_line);
        std::string cell;
        while (std::getline(ss, cell, ',')) columns.names.push_back(cell);
    }
    auto require_column = [&](const std::string& name) {
        const int idx = columns.index_of(name);
        if (idx < 0) fail_input("log missing column '" + name + "'");
        return idx;
    };

    const int c_vcmd = require_column("v_cmd");
    const int c_yaw = require_column("yaw_cmd");
    std::array<int, kJointCount> c_q{}, c_dq{}, c_ddq{}, c_tau{};
    for (int j = 0; j < kJointCount; ++j) {
        const std::string name = sgp::reflib::joint_name(sgp::reflib::JointId{j});
        c_q[static_cast<std::size_t>(j)] = require_column("q_" + name);
        c_dq[static_cast<std::size_t>(j)] = require_column("dq_" + name);
        c_ddq[static_cast<std::size_t>(j)] = require_column("ddq_" + name);
        c_tau[static_cast<std::size_t>(j)] = require_column("tau_" + name);
    }
    const int c_wx = require_column("omega_x");
    const int c_wy = require_column("omega_y");
    const int c_wz = require_column("omega_z");
    const int c_gx = require_column("gravity_x");
    const int c_gy = require_column("gravity_y");
    const int c_z = require_column("base_height");
    const int c_v = require_column("planar_speed");
    const int c_term = require_column("terminated");
    std::array<int, 12> c_feet{};
    {
        int k = 0;
        for (const char* side : {"left", "right"})
            for (const char* field :
                 {"contact", "height", "slide_vel", "lateral_y", "air_time", "ground_tilt"})
                c_feet[static_cast<std::size_t>(k++)] =
                    require_column(std::string(side) + "_foot_" + field);
    }

    std::ofstream out(out_path);
    if (!out) fail_input("cannot write: " + out_path);
    out.precision(17);
    bool wrote_header = false;

    double filtered = 0.0;
    bool first = true;
    std::string line;
    std::size_t line_no = 1;
    while (std::getline(log, line)) {
        ++line_no;
        if (line.empty()) continue;
        std::vector<double> cells;
        std::stringstream ss(line);
        std::string cell;
        std::size_t column = 0;
        while (std::getline(ss, cell, ',')) {
            ++column;
            try {
                cells.push_back(std::stod(cell));
            } catch (const std::exception&) {
                fail_input("log line " + std::to_string(line_no) + ", column " +
                           std::to_string(column) + ": non-numeric cell '" + cell + "'");
            }
        }
        if (cells.size() != columns.names.size())
            fail_input("log line " + std::to_string(line_no) + ": expected " +
                       std::to_string(columns.names.size()) + " columns");

        sgp::rewards::RobotStateFrame frame;
        for (int j = 0; j < kJointCount; ++j) {
            const auto i = static_cast<std::size_t>(j);
            frame.joint_positions[i] = cells[static_cast<std::size_t>(c_q[i])];
            frame.joint_velocities[i] = cells[static_cast<std::size_t>(c_dq[i])];
            frame.joint_accelerations[i] = cells[static_cast<std::size_t>(c_ddq[i])];
            frame.joint_torques[i] = cells[static_cast<std::size_t>(c_tau[i])];
        }
        frame.base_angular_velocity = {cells[static_cast<std::size_t>(c_wx)],
                                       cells[static_cast<std::size_t>(c_wy)],
                                       cells[static_cast<std::size_t>(c_wz)]};
        frame.gravity_x = cells[static_cast<std::size_t>(c_gx)];
        frame.gravity_y = cells[static_cast<std::size_t>(c_gy)];
        frame.base_height = cells[static_cast<std::size_t>(c_z)];
        frame.planar_speed = cells[static_cast<std::size_t>(c_v)];
        frame.terminated = cells[static_cast<std::size_t>(c_term)] != 0.0;
        auto fill_foot = [&](sgp::rewards::FootState& foot, int base) {
            foot.contact = cells[static_cast<std::size_t>(c_feet[static_cast<std::size_t>(base)])] != 0.0;
            foot.height = cells[static_cast<std::size_t>(c_feet[static_cast<std::size_t>(base + 1)])];
            foot.tangential_speed = cells[static_cast<std::size_t>(c_feet[static_cast<std::size_t>(base + 2)])];
            foot.lateral_position = cells[static_cast<std::size_t>(c_feet[static_cast<std::size_t>(base + 3)])];
            foot.air_time = cells[static_cast<std::size_t>(c_feet[static_cast<std::size_t>(base + 4)])];
            foot.ground_tilt = cells[static_cast<std::size_t>(c_feet[static_cast<std::size_t>(base + 5)])];
        };
        fill_foot(frame.left_foot, 0);
        fill_foot(frame.right_foot, 6);

        sgp::rewards::CommandState command;
        command.raw_velocity = cells[static_cast<std::size_t>(c_vcmd)];
        if (first) {
            filtered = command.raw_velocity;  // no startup transient
            first = false;
        } else {
            filtered = sgp::rewards::filter_command(filtered, command.raw_velocity,
                                                    config.acceleration_limit, config.dt);
        }
        command.filtered_velocity = filtered;
        command.yaw_rate = cells[static_cast<std::size_t>(c_yaw)];
        command.frequency = sgp::reflib::velocity_to_frequency(library, command.raw_velocity);

        const double t = static_cast<double>(line_no - 2) * config.dt;
        const Eigen::VectorXd z = sgp::prior::generation_latent(
            checkpoint.model, command.frequency, sgp::prior::GenerationMode::mean, 0);
        const auto reference = sgp::prior::generate_with_latent(checkpoint.model,
                                                                command.frequency, {t}, z);
        std::array<double, kJointCount> q_ref{};
        for (int j = 0; j < kJointCount; ++j)
            q_ref[static_cast<std::size_t>(j)] =
                reference.joints[static_cast<std::size_t>(j)][0];

        const auto breakdown = sgp::rewards::total_reward(frame, command, q_ref, config);
        if (!wrote_header) {
            out << "frame";
            for (const auto& [name, value] : breakdown.terms) out << ',' << name;
            out << ",total\n";
            wrote_header = true;
        }
        out << (line_no - 2);
        for (const auto& [name, value] : breakdown.terms) out << ',' << value;
        out << ',' << breakdown.total << '\n';
    }
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Spectral gait prior toolkit: curate periodic joint trajectories, train a "
                 "frequency-conditioned generative prior, and evaluate generated motion."};
    app.require_subcommand(1);
    app.fallthrough();

    std::uint64_t seed = 0;
    app.add_option("--seed", seed, "Seed for all randomized steps");

    // synth
    auto* synth = app.add_subcommand("synth", "Write a synthetic reference library");
    std::string synth_spec_path, synth_out;
    synth->add_option("--spec", synth_spec_path, "Synthesis spec JSON (default: canonical)");
    synth->add_option("--out", synth_out, "Output library directory")->required();

    // curate
    auto* curate = app.add_subcommand("curate", "Build a library from raw sequence CSVs");
    std::vector<std::string> curate_inputs;
    std::string curate_out;
    double curate_duration = 10.0, curate_rate = 60.0;
    curate->add_option("inputs", curate_inputs, "Sequence CSV files")->required();
    curate->add_option("--out", curate_out, "Output library directory")->required();
    curate->add_option("--duration", curate_duration, "Normalized duration, s");
    curate->add_option("--rate", curate_rate, "Normalized sample rate, Hz");

    // train
    auto* train_cmd = app.add_subcommand("train", "Train the spectral prior on a library");
    std::string train_library, train_out;
    std::vector<std::string> train_sets;
    train_cmd->add_option("--library", train_library, "Library directory")->required();
    train_cmd->add_option("--out", train_out, "Output checkpoint (.spm)")->required();
    train_cmd->add_option("--set", train_sets, "Config override key=value");

    // generate
    auto* generate = app.add_subcommand("generate", "Generate a trajectory from a checkpoint");
    std::string gen_checkpoint, gen_out, gen_library, gen_mode = "mean";
    double gen_freq = 0.0, gen_velocity = 0.0, gen_duration = 10.0, gen_rate = 60.0;
    bool gen_plot = false;
    auto* freq_opt = generate->add_option("--freq", gen_freq, "Target frequency, Hz");
    auto* vel_opt = generate->add_option("--velocity", gen_velocity, "Target velocity, m/s");
    freq_opt->excludes(vel_opt);
    vel_opt->excludes(freq_opt);
    generate->add_option("--checkpoint", gen_checkpoint, "Checkpoint path")->required();
    generate->add_option("--library", gen_library,
                         "Library directory (velocity map / plot overlay)");
    generate->add_option("--duration", gen_duration, "Duration, s");
    generate->add_option("--rate", gen_rate, "Sample rate, Hz");
    generate->add_option("--mode", gen_mode, "mean or sample")
        ->check(CLI::IsMember({"mean", "sample"}));
    generate->add_flag("--plot", gen_plot, "Also write per-joint SVG charts");
    generate->add_option("--out", gen_out, "Output trajectory CSV")->required();

    // eval
    auto* eval_cmd = app.add_subcommand("eval", "Evaluate a checkpoint against a library");
    std::string eval_checkpoint, eval_library, eval_out;
    eval_cmd->add_option("--checkpoint", eval_checkpoint, "Checkpoint path")->required();
    eval_cmd->add_option("--library", eval_library, "Library directory")->required();
    eval_cmd->add_option("--out", eval_out, "Output metrics CSV")->required();

    // reward-audit
    auto* audit = app.add_subcommand("reward-audit", "Score a robot state log offline");
    std::string audit_log, audit_checkpoint, audit_library, audit_out;
    std::vector<std::string> audit_sets;
    audit->add_option("--log", audit_log, "Robot state log CSV")->required();
    audit->add_option("--checkpoint", audit_checkpoint, "Checkpoint path")->required();
    audit->add_option("--library", audit_library, "Library directory")->required();
    audit->add_option("--out", audit_out, "Output reward CSV")->required();
    audit->add_option("--set", audit_sets, "Reward override key=value");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitInput;
    }

    try {
        if (*synth) {
            const auto specs = load_synth_specs(synth_spec_path, seed);
            std::vector<sgp::reflib::MotionSequence> sequences;
            for (const auto& spec : specs)
                sequences.push_back(sgp::reflib::synth_reference(spec));
            const auto library = sgp::reflib::build_library(sequences);
            sgp::reflib::save_library(synth_out, library);
            std::cout << "wrote library with " << library.sequences.size()
                      << " sequences to " << synth_out << '\n';
        } else if (*curate) {
            std::vector<sgp::reflib::MotionSequence> sequences;
            for (const auto& path : curate_inputs)
                sequences.push_back(sgp::reflib::load_sequence(path));
            const auto library =
                sgp::reflib::build_library(sequences, curate_duration, curate_rate);
            sgp::reflib::save_library(curate_out, library);

            std::ofstream report(fs::path(curate_out) / "spectral_report.csv");
            report << "sequence,joint,primary_frequency_hz,amplitude_rad,"
                      "contralateral_offset_cycles\n";
            report.precision(17);
            for (const auto& seq : library.sequences) {
                const auto profile = sgp::reflib::analyze_sequence(seq);
                for (int j = 0; j < kJointCount; ++j) {
                    const auto i = static_cast<std::size_t>(j);
                    report << seq.name << ',' << sgp::reflib::joint_name(sgp::reflib::JointId{j})
                           << ',';
                    if (profile.primary_frequency[i]) report << *profile.primary_frequency[i];
                    report << ',';
                    if (profile.amplitude[i]) report << *profile.amplitude[i];
                    report << ',';
                    const int pair_index =
                        static_cast<int>(std::find(sgp::reflib::left_joints().begin(),
                                                   sgp::reflib::left_joints().end(),
                                                   sgp::reflib::JointId{j}) -
                                         sgp::reflib::left_joints().begin());
                    if (pair_index < sgp::reflib::kJointPairCount &&
                        profile.contralateral_offset[static_cast<std::size_t>(pair_index)])
                        report
                            << *profile.contralateral_offset[static_cast<std::size_t>(pair_index)];
                    report << '\n';
                }
            }
            std::cout << "wrote curated library to " << curate_out << '\n';
        } else if (*train_cmd) {
            const auto library = sgp::reflib::load_library(train_library);
            sgp::train::TrainConfig config;
            config.seed = seed;
            sgp::prior::Architecture arch;
            apply_train_overrides(parse_overrides(train_sets, kTrainKeys), config, arch);
            config.validate();

            const auto result = sgp::train::train(library, arch, config);
            sgp::train::Checkpoint checkpoint{result.model, config, config.epochs,
                                              result.history};
            sgp::train::save_checkpoint(train_out, checkpoint);
            std::string history_path = train_out;
            if (history_path.ends_with(".spm")) history_path.resize(history_path.size() - 4);
            sgp::train::save_loss_history_csv(history_path + "_loss.csv", result.history);
            if (!result.history.empty())
                std::cout << "final reconstruction loss "
                          << result.history.back().reconstruction << '\n';
            std::cout << "wrote checkpoint to " << train_out << '\n';
        } else if (*generate) {
            const auto checkpoint = sgp::train::load_checkpoint(gen_checkpoint);
            double frequency = gen_freq;
            const bool has_velocity = vel_opt->count() > 0;
            if (has_velocity) {
                if (gen_library.empty())
                    fail_input("--velocity requires --library for the velocity map");
                frequency = sgp::reflib::velocity_to_frequency(
                    sgp::reflib::load_library(gen_library), gen_velocity);
            } else if (freq_opt->count() == 0) {
                fail_input("one of --freq or --velocity is required");
            }
            const auto mode = gen_mode == "mean" ? sgp::prior::GenerationMode::mean
                                                 : sgp::prior::GenerationMode::sample;
            const auto batch = sgp::prior::generate_trajectory(
                checkpoint.model, frequency, gen_duration, gen_rate, mode, seed);
            write_generated(gen_out, batch, gen_rate, gen_velocity, has_velocity);

            if (gen_plot) {
                const sgp::reflib::MotionSequence* nearest = nullptr;
                sgp::reflib::ReferenceLibrary library;
                if (!gen_library.empty()) {
                    library = sgp::reflib::load_library(gen_library);
                    double best = std::numeric_limits<double>::infinity();
                    for (std::size_t s = 0; s < library.sequences.size(); ++s) {
                        const double d =
                            std::abs(library.velocity_frequency_pairs[s].second - frequency);
                        if (d < best) {
                            best = d;
                            nearest = &library.sequences[s];
                        }
                    }
                }
                std::string base = gen_out;
                if (base.ends_with(".csv")) base.resize(base.size() - 4);
                for (int j = 0; j < kJointCount; ++j) {
                    const auto i = static_cast<std::size_t>(j);
                    const char* joint = sgp::reflib::joint_name(sgp::reflib::JointId{j});
                    std::vector<sgp::svg::Series> series;
                    sgp::svg::Series generated{"generated", "#1f77b4", batch.times,
                                               batch.joints[i]};
                    series.push_back(std::move(generated));
                    if (nearest) {
                        sgp::svg::Series ref{"reference (" + nearest->name + ")", "#d62728",
                                             {}, nearest->joints[i]};
                        ref.x.resize(nearest->length());
                        for (std::size_t k = 0; k < nearest->length(); ++k)
                            ref.x[k] = static_cast<double>(k) / nearest->sample_rate;
                        series.push_back(std::move(ref));
                    }
                    sgp::svg::write_line_chart(base + "_" + joint + ".svg",
                                               std::string(joint) + " @ " +
                                                   std::to_string(frequency) + " Hz",
                                               "time [s]", "angle [rad]", series);
                }
            }
            std::cout << "wrote trajectory at " << frequency << " Hz to " << gen_out << '\n';
        } else if (*eval_cmd) {
            const auto checkpoint = sgp::train::load_checkpoint(eval_checkpoint);
            const auto library = sgp::reflib::load_library(eval_library);

            std::map<double, sgp::prior::TrajectoryBatch> generated;
            for (const auto& [v, f] : library.velocity_frequency_pairs)
                generated[f] = sgp::prior::generate_trajectory(
                    checkpoint.model, f, library.duration, library.sample_rate,
                    sgp::prior::GenerationMode::mean);

            const double l_rec = sgp::metrics::l_rec_metric(generated, library);
            const double e_ba =
                sgp::metrics::boundary_amplitude_error(checkpoint.model, library);

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
            const double fid_value = sgp::metrics::fid(
                sgp::metrics::motion_stats(ref_frames), sgp::metrics::motion_stats(gen_frames));

            std::ofstream out(eval_out);
            if (!out) fail_input("cannot write: " + eval_out);
            out.precision(17);
            const std::string hash = config_hash(checkpoint);
            out << "metric,value,config_hash\n"
                << "l_rec," << l_rec << ',' << hash << '\n'
                << "e_ba," << e_ba << ',' << hash << '\n'
                << "fid," << fid_value << ',' << hash << '\n';
            std::cout << "l_rec=" << l_rec << " e_ba=" << e_ba << " fid=" << fid_value
                      << '\n';
        } else if (*audit) {
            return run_reward_audit(audit_log, audit_checkpoint, audit_library, audit_out,
                                    audit_sets);
        }
    } catch (const sgp::DivergedTrainingError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitDiverged;
    } catch (const sgp::Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitInput;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitInput;
    }
    return kExitOk;
}
