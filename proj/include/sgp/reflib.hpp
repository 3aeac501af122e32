#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "sgp/dsp.hpp"
#include "sgp/errors.hpp"

namespace sgp::reflib {

// The 10-DoF joint subset, in canonical (file-format) order.
enum class JointId : int {
    left_hip_pitch = 0,
    right_hip_pitch,
    left_knee,
    right_knee,
    left_ankle_pitch,
    right_ankle_pitch,
    left_shoulder_pitch,
    right_shoulder_pitch,
    left_elbow,
    right_elbow,
};

inline constexpr int kJointCount = 10;
inline constexpr int kJointPairCount = 5;

const std::array<JointId, kJointCount>& all_joints();
const char* joint_name(JointId id);
JointId contralateral(JointId id);
// Left-side member of each contralateral pair, canonical order.
const std::array<JointId, kJointPairCount>& left_joints();

// One named, velocity-tagged, fixed-rate 10-joint trajectory.
struct MotionSequence {
    std::string name;
    double velocity = 0.0;     // m/s
    double sample_rate = 0.0;  // Hz
    std::array<std::vector<double>, kJointCount> joints;  // radians

    std::size_t length() const { return joints[0].size(); }
    dsp::Signal joint_signal(JointId id) const;
    void validate() const;  // throws InvalidInputError on inconsistency
};

// Raw multi-channel input before joint selection.
struct RawSequence {
    std::string name;
    double velocity = 0.0;
    double sample_rate = 0.0;
    std::vector<std::pair<std::string, std::vector<double>>> channels;
};

struct SpectralProfile {
    // Per-joint; unset where a joint had no usable spectral peak.
    std::array<std::optional<double>, kJointCount> primary_frequency;  // Hz
    std::array<std::optional<double>, kJointCount> amplitude;          // rad
    // Contralateral phase offsets, indexed like left_joints(); cycles in [0, 1).
    std::array<std::optional<double>, kJointPairCount> contralateral_offset;
    double modal_frequency = 0.0;  // Hz, sequence-level primary frequency
};

struct ReferenceLibrary {
    std::vector<MotionSequence> sequences;  // sorted by velocity
    std::vector<std::pair<double, double>> velocity_frequency_pairs;  // (m/s, Hz)
    double duration = 10.0;     // s
    double sample_rate = 60.0;  // Hz
    double frequency_floor = 0.6;    // Hz, extrapolation clamp
    double frequency_ceiling = 2.3;  // Hz
};

// Per-joint harmonic recipe for the synthetic reference generator. The
// right-side partner uses the same coefficients shifted by phase_offset
// cycles of the fundamental.
struct SynthJoint {
    std::vector<double> sin_coeffs;  // a_k, k = 1..K
    std::vector<double> cos_coeffs;  // b_k
    double phase_offset = 0.5;       // cycles between contralateral partners
};

struct SynthSpec {
    std::string name;
    double velocity = 0.0;   // m/s
    double frequency = 0.0;  // Hz
    double duration = 10.0;  // s
    double sample_rate = 60.0;
    double noise_amplitude = 0.0;  // uniform in [-amp, amp]
    std::uint64_t seed = 0;
    std::array<SynthJoint, kJointPairCount> joints;  // indexed like left_joints()
};

MotionSequence select_joints(const RawSequence& raw);

MotionSequence normalize_sequence(const MotionSequence& seq, double target_duration,
                                  double target_rate, int sg_window = 11, int sg_order = 3);

SpectralProfile analyze_sequence(const MotionSequence& seq);

ReferenceLibrary build_library(const std::vector<MotionSequence>& seqs,
                               double duration = 10.0, double rate = 60.0,
                               int sg_window = 11, int sg_order = 3);

double velocity_to_frequency(const ReferenceLibrary& lib, double velocity);

MotionSequence synth_reference(const SynthSpec& spec);

// The five-gait synthetic set with the canonical velocity/frequency pairs.
std::vector<SynthSpec> canonical_synth_specs(std::uint64_t seed = 0);

// File formats: sequence CSV + `.meta.json` sidecar; library directory with
// member CSVs plus `library.json`.
void save_sequence(const std::string& csv_path, const MotionSequence& seq);
MotionSequence load_sequence(const std::string& csv_path);
void save_library(const std::string& dir_path, const ReferenceLibrary& lib);
ReferenceLibrary load_library(const std::string& dir_path);

}  // namespace sgp::reflib
