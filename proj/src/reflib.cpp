#include "sgp/reflib.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <random>
#include <sstream>

#include <json.hpp>

namespace sgp::reflib {

namespace {

constexpr double kMinSearchHz = 0.1;  // skip the DC neighborhood when peak-finding

const std::array<const char*, kJointCount> kJointNames = {
    "left_hip_pitch",  "right_hip_pitch",  "left_knee",          "right_knee",
    "left_ankle_pitch", "right_ankle_pitch", "left_shoulder_pitch", "right_shoulder_pitch",
    "left_elbow",      "right_elbow",
};

std::string format_double(double v) {
    char buf[32];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, ptr);
}

double parse_double(const std::string& cell, std::size_t line, std::size_t column) {
    double v = 0.0;
    const char* begin = cell.data();
    const char* end = begin + cell.size();
    auto [ptr, ec] = std::from_chars(begin, end, v);
    if (ec != std::errc{} || ptr != end)
        throw FormatError("line " + std::to_string(line) + ", column " + std::to_string(column) +
                          ": non-numeric cell '" + cell + "'");
    return v;
}

std::string meta_path_for(const std::string& csv_path) {
    std::string base = csv_path;
    if (base.size() > 4 && base.ends_with(".csv")) base.resize(base.size() - 4);
    return base + ".meta.json";
}

std::string sanitize_filename(const std::string& name) {
    std::string out;
    for (char c : name) out.push_back(std::isalnum(static_cast<unsigned char>(c)) ? c : '_');
    if (out.empty()) out = "sequence";
    return out;
}

}  // namespace

const std::array<JointId, kJointCount>& all_joints() {
    static const std::array<JointId, kJointCount> joints = [] {
        std::array<JointId, kJointCount> a{};
        for (int i = 0; i < kJointCount; ++i) a[static_cast<std::size_t>(i)] = JointId{i};
        return a;
    }();
    return joints;
}

const char* joint_name(JointId id) { return kJointNames[static_cast<std::size_t>(id)]; }

JointId contralateral(JointId id) {
    const int i = static_cast<int>(id);
    return JointId{i % 2 == 0 ? i + 1 : i - 1};
}

const std::array<JointId, kJointPairCount>& left_joints() {
    static const std::array<JointId, kJointPairCount> joints = {
        JointId::left_hip_pitch, JointId::left_knee, JointId::left_ankle_pitch,
        JointId::left_shoulder_pitch, JointId::left_elbow};
    return joints;
}

dsp::Signal MotionSequence::joint_signal(JointId id) const {
    return dsp::Signal{joints[static_cast<std::size_t>(id)], sample_rate};
}

void MotionSequence::validate() const {
    if (sample_rate <= 0.0) throw InvalidInputError("sequence sample_rate must be positive");
    if (velocity < 0.0) throw InvalidInputError("sequence velocity must be >= 0");
    const std::size_t len = joints[0].size();
    for (int i = 0; i < kJointCount; ++i) {
        const auto& samples = joints[static_cast<std::size_t>(i)];
        if (samples.size() != len)
            throw InvalidInputError(std::string("joint length mismatch at ") +
                                    kJointNames[static_cast<std::size_t>(i)]);
        for (double v : samples)
            if (!std::isfinite(v))
                throw InvalidInputError(std::string("non-finite angle in ") +
                                        kJointNames[static_cast<std::size_t>(i)]);
    }
}

MotionSequence select_joints(const RawSequence& raw) {
    MotionSequence seq;
    seq.name = raw.name;
    seq.velocity = raw.velocity;
    seq.sample_rate = raw.sample_rate;
    for (int i = 0; i < kJointCount; ++i) {
        const char* name = kJointNames[static_cast<std::size_t>(i)];
        auto it = std::find_if(raw.channels.begin(), raw.channels.end(),
                               [&](const auto& ch) { return ch.first == name; });
        if (it == raw.channels.end())
            throw InvalidInputError(std::string("missing joint channel: ") + name);
        seq.joints[static_cast<std::size_t>(i)] = it->second;
    }
    seq.validate();
    return seq;
}

MotionSequence normalize_sequence(const MotionSequence& seq, double target_duration,
                                  double target_rate, int sg_window, int sg_order) {
    seq.validate();
    if (target_duration <= 0.0 || target_rate <= 0.0)
        throw InvalidInputError("target duration and rate must be positive");
    if (seq.length() < 2) throw InvalidInputError("sequence too short to normalize");

    const std::size_t src_len =
        static_cast<std::size_t>(std::llround(target_duration * seq.sample_rate));

    MotionSequence out;
    out.name = seq.name;
    out.velocity = seq.velocity;
    out.sample_rate = target_rate;
    for (int j = 0; j < kJointCount; ++j) {
        const auto& cycle = seq.joints[static_cast<std::size_t>(j)];
        dsp::Signal tiled;
        tiled.sample_rate = seq.sample_rate;
        tiled.samples.resize(src_len);
        for (std::size_t i = 0; i < src_len; ++i) tiled.samples[i] = cycle[i % cycle.size()];

        dsp::Signal resampled = seq.sample_rate == target_rate
                                    ? tiled
                                    : dsp::fourier_resample(tiled, target_rate);
        out.joints[static_cast<std::size_t>(j)] =
            dsp::savitzky_golay(resampled, sg_window, sg_order).samples;
    }
    return out;
}

namespace {

// Golden-section refinement of a coarse spectral peak. The periodogram peak is
// biased by leakage when the record holds a non-integer number of cycles, so
// search near the coarse estimate for the frequency whose least-squares
// sinusoid fit captures the most amplitude.
double refine_peak_frequency(const dsp::Signal& signal, double coarse, double halfwidth) {
    const double eps = 1e-9;
    double lo = std::max(coarse - halfwidth, eps);
    double hi = std::min(coarse + halfwidth, signal.nyquist() - eps);
    if (lo >= hi) return coarse;
    const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
    double a = hi - inv_phi * (hi - lo);
    double b = lo + inv_phi * (hi - lo);
    double fa = dsp::amplitude_at(signal, a);
    double fb = dsp::amplitude_at(signal, b);
    for (int it = 0; it < 60 && hi - lo > 1e-7; ++it) {
        if (fa < fb) {
            lo = a;
            a = b;
            fa = fb;
            b = lo + inv_phi * (hi - lo);
            fb = dsp::amplitude_at(signal, b);
        } else {
            hi = b;
            b = a;
            fb = fa;
            a = hi - inv_phi * (hi - lo);
            fa = dsp::amplitude_at(signal, a);
        }
    }
    return 0.5 * (lo + hi);
}

}  // namespace

SpectralProfile analyze_sequence(const MotionSequence& seq) {
    seq.validate();
    SpectralProfile profile;
    std::vector<double> found;
    const double resolution =
        seq.sample_rate / static_cast<double>(std::max<std::size_t>(seq.length(), 1));
    for (int j = 0; j < kJointCount; ++j) {
        const auto signal = seq.joint_signal(JointId{j});
        try {
            double f = dsp::dominant_frequency(dsp::power_spectral_density(signal),
                                               kMinSearchHz);
            f = refine_peak_frequency(signal, f, resolution);
            profile.primary_frequency[static_cast<std::size_t>(j)] = f;
            profile.amplitude[static_cast<std::size_t>(j)] = dsp::amplitude_at(signal, f);
            found.push_back(f);
        } catch (const NoDominantFrequencyError&) {
            // flagged per joint, not fatal
        }
    }
    if (found.empty()) return profile;

    std::sort(found.begin(), found.end());
    profile.modal_frequency = found[found.size() / 2];

    for (int p = 0; p < kJointPairCount; ++p) {
        const JointId left = left_joints()[static_cast<std::size_t>(p)];
        try {
            profile.contralateral_offset[static_cast<std::size_t>(p)] = dsp::phase_offset(
                seq.joint_signal(left), seq.joint_signal(contralateral(left)),
                profile.modal_frequency);
        } catch (const UndefinedPhaseError&) {
        }
    }
    return profile;
}

ReferenceLibrary build_library(const std::vector<MotionSequence>& seqs, double duration,
                               double rate, int sg_window, int sg_order) {
    if (seqs.size() < 2) throw CurationError("library needs at least 2 sequences");

    ReferenceLibrary lib;
    lib.duration = duration;
    lib.sample_rate = rate;
    for (const auto& seq : seqs)
        lib.sequences.push_back(normalize_sequence(seq, duration, rate, sg_window, sg_order));
    std::sort(lib.sequences.begin(), lib.sequences.end(),
              [](const auto& a, const auto& b) { return a.velocity < b.velocity; });

    for (const auto& seq : lib.sequences) {
        const SpectralProfile profile = analyze_sequence(seq);
        if (profile.modal_frequency <= 0.0)
            throw CurationError("sequence '" + seq.name + "' has no dominant frequency");
        lib.velocity_frequency_pairs.emplace_back(seq.velocity, profile.modal_frequency);
    }
    for (std::size_t i = 1; i < lib.velocity_frequency_pairs.size(); ++i) {
        const auto& [v0, f0] = lib.velocity_frequency_pairs[i - 1];
        const auto& [v1, f1] = lib.velocity_frequency_pairs[i];
        if (v1 <= v0) throw CurationError("duplicate or non-increasing velocities in library");
        if (f1 <= f0)
            throw CurationError("velocity-frequency map is not strictly increasing");
    }
    return lib;
}

double velocity_to_frequency(const ReferenceLibrary& lib, double velocity) {
    const auto& pairs = lib.velocity_frequency_pairs;
    if (pairs.size() < 2) throw InvalidInputError("library map needs at least 2 pairs");
    const double v = std::max(velocity, 0.0);

    auto line = [](const std::pair<double, double>& a, const std::pair<double, double>& b,
                   double x) {
        return a.second + (b.second - a.second) * (x - a.first) / (b.first - a.first);
    };

    double f;
    if (v <= pairs.front().first) {
        f = line(pairs[0], pairs[1], v);
    } else if (v >= pairs.back().first) {
        f = line(pairs[pairs.size() - 2], pairs.back(), v);
    } else {
        std::size_t i = 1;
        while (pairs[i].first < v) ++i;
        f = line(pairs[i - 1], pairs[i], v);
    }
    return std::clamp(f, lib.frequency_floor, lib.frequency_ceiling);
}

MotionSequence synth_reference(const SynthSpec& spec) {
    if (spec.frequency <= 0.0) throw InvalidInputError("synth frequency must be positive");
    if (spec.duration <= 0.0 || spec.sample_rate <= 0.0)
        throw InvalidInputError("synth duration and rate must be positive");

    const std::size_t n =
        static_cast<std::size_t>(std::llround(spec.duration * spec.sample_rate));
    std::mt19937_64 rng(spec.seed);
    std::uniform_real_distribution<double> noise(-spec.noise_amplitude, spec.noise_amplitude);

    MotionSequence seq;
    seq.name = spec.name;
    seq.velocity = spec.velocity;
    seq.sample_rate = spec.sample_rate;

    for (int p = 0; p < kJointPairCount; ++p) {
        const SynthJoint& joint = spec.joints[static_cast<std::size_t>(p)];
        for (const auto* coeffs : {&joint.sin_coeffs, &joint.cos_coeffs})
            for (double c : *coeffs)
                if (!std::isfinite(c))
                    throw InvalidInputError("non-finite harmonic coefficient");
        for (bool right : {false, true}) {
            const JointId id = right ? contralateral(left_joints()[static_cast<std::size_t>(p)])
                                     : left_joints()[static_cast<std::size_t>(p)];
            auto& samples = seq.joints[static_cast<std::size_t>(id)];
            samples.resize(n);
            const double shift = right ? joint.phase_offset : 0.0;
            for (std::size_t i = 0; i < n; ++i) {
                const double t = static_cast<double>(i) / spec.sample_rate;
                double value = 0.0;
                const std::size_t harmonics =
                    std::max(joint.sin_coeffs.size(), joint.cos_coeffs.size());
                for (std::size_t k = 1; k <= harmonics; ++k) {
                    const double phi = 2.0 * std::numbers::pi * static_cast<double>(k) *
                                       (spec.frequency * t + shift);
                    if (k <= joint.sin_coeffs.size())
                        value += joint.sin_coeffs[k - 1] * std::sin(phi);
                    if (k <= joint.cos_coeffs.size())
                        value += joint.cos_coeffs[k - 1] * std::cos(phi);
                }
                if (spec.noise_amplitude > 0.0) value += noise(rng);
                samples[i] = value;
            }
        }
    }
    return seq;
}

std::vector<SynthSpec> canonical_synth_specs(std::uint64_t seed) {
    static const std::array<double, 5> velocities = {0.66, 1.10, 2.29, 2.87, 3.40};
    static const std::array<double, 5> frequencies = {0.68, 0.86, 1.25, 1.36, 1.58};
    static const std::array<const char*, 5> names = {"walk_slow", "walk_fast", "jog", "run",
                                                     "sprint"};

    std::vector<SynthSpec> specs;
    for (std::size_t i = 0; i < 5; ++i) {
        SynthSpec spec;
        spec.name = names[i];
        spec.velocity = velocities[i];
        spec.frequency = frequencies[i];
        spec.seed = seed + i;
        // Amplitudes grow gently with gait frequency; the harmonic mix is
        // shared so interpolation across gaits stays smooth.
        const double scale = 0.9 + 0.2 * (frequencies[i] - 0.68) / (1.58 - 0.68);
        auto scaled = [&](std::vector<double> v) {
            for (double& x : v) x *= scale;
            return v;
        };
        spec.joints[0] = {scaled({0.40, 0.08, 0.02}), scaled({0.05, 0.00, 0.00}), 0.5};  // hip
        spec.joints[1] = {scaled({0.30, 0.12, 0.03}), scaled({-0.10, 0.00, 0.00}), 0.5}; // knee
        spec.joints[2] = {scaled({0.18, 0.05}), scaled({0.04, 0.00}), 0.5};   // ankle
        spec.joints[3] = {scaled({0.25, 0.03}), scaled({0.00, 0.00}), 0.5};   // shoulder
        spec.joints[4] = {scaled({0.15, 0.02}), scaled({0.06, 0.00}), 0.5};   // elbow
        specs.push_back(std::move(spec));
    }
    return specs;
}

void save_sequence(const std::string& csv_path, const MotionSequence& seq) {
    seq.validate();
    std::ofstream csv(csv_path);
    if (!csv) throw FormatError("cannot open for writing: " + csv_path);
    csv << "time_s";
    for (const char* name : kJointNames) csv << ',' << name;
    csv << '\n';
    for (std::size_t i = 0; i < seq.length(); ++i) {
        csv << format_double(static_cast<double>(i) / seq.sample_rate);
        for (int j = 0; j < kJointCount; ++j)
            csv << ',' << format_double(seq.joints[static_cast<std::size_t>(j)][i]);
        csv << '\n';
    }

    nlohmann::json meta = {{"name", seq.name},
                           {"velocity_mps", seq.velocity},
                           {"sample_rate_hz", seq.sample_rate},
                           {"format_version", 1}};
    std::ofstream meta_out(meta_path_for(csv_path));
    if (!meta_out) throw FormatError("cannot open for writing: " + meta_path_for(csv_path));
    meta_out << meta.dump(2) << '\n';
}

MotionSequence load_sequence(const std::string& csv_path) {
    std::ifstream csv(csv_path);
    if (!csv) throw FormatError("cannot open: " + csv_path);

    std::string header;
    if (!std::getline(csv, header)) throw FormatError("line 1: empty file " + csv_path);
    {
        std::string expected = "time_s";
        for (const char* name : kJointNames) expected += std::string(",") + name;
        // Tolerate a trailing \r from foreign line endings.
        if (!header.empty() && header.back() == '\r') header.pop_back();
        if (header != expected) {
            for (const char* name : kJointNames)
                if (header.find(name) == std::string::npos)
                    throw FormatError(std::string("line 1: missing joint column ") + name);
            throw FormatError("line 1: malformed header '" + header + "'");
        }
    }

    MotionSequence seq;
    std::string line;
    std::size_t line_no = 1;
    while (std::getline(csv, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        std::stringstream row(line);
        std::string cell;
        std::size_t column = 0;
        while (std::getline(row, cell, ',')) {
            ++column;
            const double value = parse_double(cell, line_no, column);
            if (column > 1) {
                if (column - 2 >= kJointCount)
                    throw FormatError("line " + std::to_string(line_no) + ": too many columns");
                seq.joints[column - 2].push_back(value);
            }
        }
        if (column != kJointCount + 1)
            throw FormatError("line " + std::to_string(line_no) + ": expected " +
                              std::to_string(kJointCount + 1) + " columns, got " +
                              std::to_string(column));
    }

    std::ifstream meta_in(meta_path_for(csv_path));
    if (!meta_in) throw FormatError("missing sidecar: " + meta_path_for(csv_path));
    nlohmann::json meta;
    try {
        meta_in >> meta;
    } catch (const nlohmann::json::exception& e) {
        throw FormatError("malformed sidecar " + meta_path_for(csv_path) + ": " + e.what());
    }
    if (meta.value("format_version", 0) != 1)
        throw FormatError("unsupported sidecar format_version in " + meta_path_for(csv_path));
    seq.name = meta.value("name", "");
    seq.velocity = meta.value("velocity_mps", 0.0);
    seq.sample_rate = meta.value("sample_rate_hz", 0.0);
    seq.validate();
    return seq;
}

void save_library(const std::string& dir_path, const ReferenceLibrary& lib) {
    namespace fs = std::filesystem;
    fs::create_directories(dir_path);

    nlohmann::json index;
    index["format_version"] = 1;
    index["duration_s"] = lib.duration;
    index["sample_rate_hz"] = lib.sample_rate;
    index["frequency_floor_hz"] = lib.frequency_floor;
    index["frequency_ceiling_hz"] = lib.frequency_ceiling;
    index["velocity_frequency_pairs"] = nlohmann::json::array();
    for (const auto& [v, f] : lib.velocity_frequency_pairs)
        index["velocity_frequency_pairs"].push_back({v, f});
    index["sequences"] = nlohmann::json::array();
    for (const auto& seq : lib.sequences) {
        const std::string file = sanitize_filename(seq.name) + ".csv";
        save_sequence((fs::path(dir_path) / file).string(), seq);
        index["sequences"].push_back(file);
    }
    std::ofstream out(fs::path(dir_path) / "library.json");
    if (!out) throw FormatError("cannot write library.json in " + dir_path);
    out << index.dump(2) << '\n';
}

ReferenceLibrary load_library(const std::string& dir_path) {
    namespace fs = std::filesystem;
    std::ifstream in(fs::path(dir_path) / "library.json");
    if (!in) throw FormatError("missing library.json in " + dir_path);
    nlohmann::json index;
    try {
        in >> index;
    } catch (const nlohmann::json::exception& e) {
        throw FormatError(std::string("malformed library.json: ") + e.what());
    }
    if (index.value("format_version", 0) != 1)
        throw FormatError("unsupported library format_version in " + dir_path);

    ReferenceLibrary lib;
    lib.duration = index.value("duration_s", 10.0);
    lib.sample_rate = index.value("sample_rate_hz", 60.0);
    lib.frequency_floor = index.value("frequency_floor_hz", 0.6);
    lib.frequency_ceiling = index.value("frequency_ceiling_hz", 2.3);
    for (const auto& pair : index.at("velocity_frequency_pairs"))
        lib.velocity_frequency_pairs.emplace_back(pair.at(0).get<double>(),
                                                  pair.at(1).get<double>());
    for (const auto& file : index.at("sequences"))
        lib.sequences.push_back(
            load_sequence((fs::path(dir_path) / file.get<std::string>()).string()));
    return lib;
}

}  // namespace sgp::reflib
