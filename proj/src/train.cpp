#include "sgp/train.hpp"

#include <cmath>
#include <cstring>
#include <numbers>
#include <fstream>
#include <random>

#include <json.hpp>

namespace sgp::train {

namespace {

double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

double silu_derivative(double x) {
    const double s = sigmoid(x);
    return s * (1.0 + x * (1.0 - s));
}

nlohmann::json architecture_to_json(const prior::Architecture& arch) {
    return {{"latent_dim", arch.latent_dim},
            {"encoder_hidden", arch.encoder_hidden},
            {"decoder_widths", arch.decoder_widths},
            {"harmonic_count", arch.harmonic_count},
            {"output_dim", arch.output_dim},
            {"frequency_mid", arch.frequency_mid},
            {"frequency_half_range", arch.frequency_half_range}};
}

prior::Architecture architecture_from_json(const nlohmann::json& j) {
    prior::Architecture arch;
    arch.latent_dim = j.at("latent_dim").get<int>();
    arch.encoder_hidden = j.at("encoder_hidden").get<int>();
    arch.decoder_widths = j.at("decoder_widths").get<std::vector<int>>();
    arch.harmonic_count = j.at("harmonic_count").get<int>();
    arch.output_dim = j.at("output_dim").get<int>();
    arch.frequency_mid = j.at("frequency_mid").get<double>();
    arch.frequency_half_range = j.at("frequency_half_range").get<double>();
    return arch;
}

nlohmann::json config_to_json(const TrainConfig& c) {
    return {{"beta_kl", c.beta_kl},       {"learning_rate", c.learning_rate},
            {"beta1", c.beta1},           {"beta2", c.beta2},
            {"epochs", c.epochs},         {"batch_size", c.batch_size},
            {"seed", c.seed},             {"clip_norm", c.clip_norm}};
}

TrainConfig config_from_json(const nlohmann::json& j) {
    TrainConfig c;
    c.beta_kl = j.at("beta_kl").get<double>();
    c.learning_rate = j.at("learning_rate").get<double>();
    c.beta1 = j.at("beta1").get<double>();
    c.beta2 = j.at("beta2").get<double>();
    c.epochs = j.at("epochs").get<int>();
    c.batch_size = j.at("batch_size").get<int>();
    c.seed = j.at("seed").get<std::uint64_t>();
    c.clip_norm = j.at("clip_norm").get<double>();
    return c;
}

}  // namespace

void TrainConfig::validate() const {
    if (beta_kl < 0.0) throw InvalidInputError("beta_kl must be >= 0");
    if (learning_rate <= 0.0) throw InvalidInputError("learning_rate must be positive");
    if (beta1 < 0.0 || beta1 >= 1.0 || beta2 < 0.0 || beta2 >= 1.0)
        throw InvalidInputError("moment decays must lie in [0, 1)");
    if (epochs < 0) throw InvalidInputError("epochs must be >= 0");
    if (batch_size < 1) throw InvalidInputError("batch_size must be >= 1");
    if (clip_norm <= 0.0) throw InvalidInputError("clip_norm must be positive");
}

double reconstruction_loss(const prior::TrajectoryBatch& generated,
                           const reflib::MotionSequence& reference) {
    const std::size_t n = reference.length();
    if (generated.times.size() != n)
        throw InvalidInputError("reconstruction_loss: timestep count mismatch");
    for (std::size_t i = 0; i < n; ++i) {
        const double t_ref = static_cast<double>(i) / reference.sample_rate;
        if (std::abs(generated.times[i] - t_ref) > 1e-9)
            throw InvalidInputError("reconstruction_loss: time grids misaligned");
    }
    double acc = 0.0;
    for (int j = 0; j < reflib::kJointCount; ++j) {
        const auto& gen = generated.joints[static_cast<std::size_t>(j)];
        const auto& ref = reference.joints[static_cast<std::size_t>(j)];
        for (std::size_t i = 0; i < n; ++i) {
            const double d = gen[i] - ref[i];
            acc += d * d;
        }
    }
    return acc / (static_cast<double>(reflib::kJointCount) * static_cast<double>(n));
}

double kl_loss(const Eigen::VectorXd& mu, const Eigen::VectorXd& log_var) {
    if (mu.size() != log_var.size()) throw InvalidInputError("kl_loss shape mismatch");
    return 0.5 * (mu.array().square() + log_var.array().exp() - log_var.array() - 1.0).sum();
}

Gradients zeros_like(const prior::PriorModel& model) {
    Gradients g;
    g.arch = model.arch;
    g.encoder_w1 = Eigen::MatrixXd::Zero(model.encoder_w1.rows(), model.encoder_w1.cols());
    g.encoder_b1 = Eigen::VectorXd::Zero(model.encoder_b1.size());
    g.encoder_w2 = Eigen::MatrixXd::Zero(model.encoder_w2.rows(), model.encoder_w2.cols());
    g.encoder_b2 = Eigen::VectorXd::Zero(model.encoder_b2.size());
    for (std::size_t l = 0; l < model.decoder_w.size(); ++l) {
        g.film_gamma_w.push_back(Eigen::MatrixXd::Zero(model.film_gamma_w[l].rows(),
                                                       model.film_gamma_w[l].cols()));
        g.film_gamma_b.push_back(Eigen::VectorXd::Zero(model.film_gamma_b[l].size()));
        g.film_beta_w.push_back(
            Eigen::MatrixXd::Zero(model.film_beta_w[l].rows(), model.film_beta_w[l].cols()));
        g.film_beta_b.push_back(Eigen::VectorXd::Zero(model.film_beta_b[l].size()));
        g.decoder_w.push_back(
            Eigen::MatrixXd::Zero(model.decoder_w[l].rows(), model.decoder_w[l].cols()));
    }
    g.output_w = Eigen::MatrixXd::Zero(model.output_w.rows(), model.output_w.cols());
    g.output_b = Eigen::VectorXd::Zero(model.output_b.size());
    return g;
}

std::pair<LossBreakdown, Gradients> loss_and_gradients(const prior::PriorModel& model,
                                                       const BatchSample& batch,
                                                       double beta_kl) {
    const auto& arch = model.arch;
    const Eigen::Index b = batch.inputs.cols();
    if (batch.inputs.rows() != arch.input_dim())
        throw InvalidInputError("batch input width mismatch");
    if (batch.targets.rows() != arch.output_dim || batch.targets.cols() != b)
        throw InvalidInputError("batch target shape mismatch");
    if (batch.epsilon.size() != arch.latent_dim)
        throw InvalidInputError("batch epsilon size mismatch");
    if (batch.frequency <= 0.0) throw InvalidInputError("batch frequency must be positive");

    // --- forward, storing every intermediate ---
    const double fn = prior::normalized_frequency(arch, batch.frequency);

    const Eigen::VectorXd enc_pre = model.encoder_w1 * fn + model.encoder_b1;
    const Eigen::VectorXd enc_hidden =
        enc_pre.unaryExpr([](double x) { return prior::silu(x); });
    const Eigen::VectorXd enc_out = model.encoder_w2 * enc_hidden + model.encoder_b2;
    const Eigen::VectorXd mu = enc_out.head(arch.latent_dim);
    const Eigen::VectorXd log_var_raw = enc_out.tail(arch.latent_dim);
    const Eigen::VectorXd log_var =
        log_var_raw.cwiseMax(prior::kLogVarMin).cwiseMin(prior::kLogVarMax);
    const Eigen::VectorXd sigma = (log_var.array() / 2.0).exp();
    const Eigen::VectorXd z = mu.array() + sigma.array() * batch.epsilon.array();

    Eigen::VectorXd context(arch.context_dim());
    context << z, fn;

    const std::size_t layers = model.decoder_w.size();
    std::vector<Eigen::VectorXd> tanh_gamma(layers), tanh_beta(layers);
    std::vector<Eigen::VectorXd> gamma(layers), beta(layers);
    std::vector<Eigen::MatrixXd> lin(layers), pre(layers);
    std::vector<Eigen::MatrixXd> hidden(layers + 1);
    hidden[0] = batch.inputs;
    for (std::size_t l = 0; l < layers; ++l) {
        tanh_gamma[l] = (model.film_gamma_w[l] * context + model.film_gamma_b[l])
                            .array()
                            .tanh();
        tanh_beta[l] =
            (model.film_beta_w[l] * context + model.film_beta_b[l]).array().tanh();
        gamma[l] = 1.0 + 0.1 * tanh_gamma[l].array();
        beta[l] = 0.1 * tanh_beta[l].array();
        lin[l] = model.decoder_w[l] * hidden[l];
        pre[l] = (lin[l].array().colwise() * gamma[l].array()).colwise() + beta[l].array();
        hidden[l + 1] = pre[l].unaryExpr([](double x) { return prior::silu(x); });
    }
    const Eigen::MatrixXd outputs = (model.output_w * hidden[layers]).colwise() + model.output_b;

    const Eigen::MatrixXd residual = outputs - batch.targets;
    const double denom = static_cast<double>(arch.output_dim) * static_cast<double>(b);
    LossBreakdown loss;
    loss.reconstruction = residual.squaredNorm() / denom;
    loss.kl = kl_loss(mu, log_var);
    loss.total = loss.reconstruction + beta_kl * loss.kl;
    if (!std::isfinite(loss.total))
        throw DivergedTrainingError("non-finite loss during forward pass");

    // --- reverse pass ---
    Gradients grads = zeros_like(model);
    Eigen::MatrixXd g_outputs = (2.0 / denom) * residual;
    grads.output_w = g_outputs * hidden[layers].transpose();
    grads.output_b = g_outputs.rowwise().sum();
    Eigen::MatrixXd g_hidden = model.output_w.transpose() * g_outputs;

    Eigen::VectorXd g_context = Eigen::VectorXd::Zero(arch.context_dim());
    for (std::size_t l = layers; l-- > 0;) {
        const Eigen::MatrixXd g_pre =
            g_hidden.array() * pre[l].unaryExpr([](double x) {
                                     return silu_derivative(x);
                                 }).array();
        const Eigen::VectorXd g_beta = g_pre.rowwise().sum();
        const Eigen::VectorXd g_gamma = (g_pre.array() * lin[l].array()).rowwise().sum();
        const Eigen::MatrixXd g_lin = g_pre.array().colwise() * gamma[l].array();
        grads.decoder_w[l] = g_lin * hidden[l].transpose();
        g_hidden = model.decoder_w[l].transpose() * g_lin;

        const Eigen::VectorXd g_gamma_pre =
            g_gamma.array() * 0.1 * (1.0 - tanh_gamma[l].array().square());
        grads.film_gamma_w[l] = g_gamma_pre * context.transpose();
        grads.film_gamma_b[l] = g_gamma_pre;
        g_context += model.film_gamma_w[l].transpose() * g_gamma_pre;

        const Eigen::VectorXd g_beta_pre =
            g_beta.array() * 0.1 * (1.0 - tanh_beta[l].array().square());
        grads.film_beta_w[l] = g_beta_pre * context.transpose();
        grads.film_beta_b[l] = g_beta_pre;
        g_context += model.film_beta_w[l].transpose() * g_beta_pre;
    }

    const Eigen::VectorXd g_z = g_context.head(arch.latent_dim);
    Eigen::VectorXd g_mu = g_z + beta_kl * mu;
    Eigen::VectorXd g_log_var =
        (g_z.array() * batch.epsilon.array() * 0.5 * sigma.array()) +
        beta_kl * 0.5 * (log_var.array().exp() - 1.0);
    // No gradient through the clamp where it is active.
    for (Eigen::Index i = 0; i < g_log_var.size(); ++i)
        if (log_var_raw(i) < prior::kLogVarMin || log_var_raw(i) > prior::kLogVarMax)
            g_log_var(i) = 0.0;

    Eigen::VectorXd g_enc_out(2 * arch.latent_dim);
    g_enc_out << g_mu, g_log_var;
    grads.encoder_w2 = g_enc_out * enc_hidden.transpose();
    grads.encoder_b2 = g_enc_out;
    const Eigen::VectorXd g_enc_hidden = model.encoder_w2.transpose() * g_enc_out;
    const Eigen::VectorXd g_enc_pre =
        g_enc_hidden.array() *
        enc_pre.unaryExpr([](double x) { return silu_derivative(x); }).array();
    grads.encoder_w1 = g_enc_pre * fn;
    grads.encoder_b1 = g_enc_pre;

    return {loss, std::move(grads)};
}

std::vector<ParamView> parameter_views(prior::PriorModel& model) {
    std::vector<ParamView> views;
    auto add_mat = [&](const std::string& name, Eigen::MatrixXd& m) {
        views.push_back({name, m.data(), m.size()});
    };
    auto add_vec = [&](const std::string& name, Eigen::VectorXd& v) {
        views.push_back({name, v.data(), v.size()});
    };
    add_mat("encoder_w1", model.encoder_w1);
    add_vec("encoder_b1", model.encoder_b1);
    add_mat("encoder_w2", model.encoder_w2);
    add_vec("encoder_b2", model.encoder_b2);
    for (std::size_t l = 0; l < model.decoder_w.size(); ++l) {
        const std::string suffix = "_" + std::to_string(l);
        add_mat("film_gamma_w" + suffix, model.film_gamma_w[l]);
        add_vec("film_gamma_b" + suffix, model.film_gamma_b[l]);
        add_mat("film_beta_w" + suffix, model.film_beta_w[l]);
        add_vec("film_beta_b" + suffix, model.film_beta_b[l]);
        add_mat("decoder_w" + suffix, model.decoder_w[l]);
    }
    add_mat("output_w", model.output_w);
    add_vec("output_b", model.output_b);
    return views;
}

std::ptrdiff_t parameter_count(const prior::PriorModel& model) {
    std::ptrdiff_t total = 0;
    for (const auto& view : parameter_views(const_cast<prior::PriorModel&>(model)))
        total += view.size;
    return total;
}

double clip_gradients(Gradients& grads, double max_norm) {
    const auto views = parameter_views(grads);
    double sum_sq = 0.0;
    for (const auto& view : views)
        for (std::ptrdiff_t i = 0; i < view.size; ++i) sum_sq += view.data[i] * view.data[i];
    const double norm = std::sqrt(sum_sq);
    if (norm > max_norm && norm > 0.0) {
        const double scale = max_norm / norm;
        for (const auto& view : views)
            for (std::ptrdiff_t i = 0; i < view.size; ++i) view.data[i] *= scale;
    }
    return norm;
}

void optimizer_step(prior::PriorModel& model, const Gradients& grads, AdamState& state,
                    const TrainConfig& config) {
    const std::ptrdiff_t total = parameter_count(model);
    if (state.first_moment.size() != total) {
        state.first_moment = Eigen::VectorXd::Zero(total);
        state.second_moment = Eigen::VectorXd::Zero(total);
        state.step = 0;
    }
    ++state.step;
    const double bias1 = 1.0 - std::pow(config.beta1, static_cast<double>(state.step));
    const double bias2 = 1.0 - std::pow(config.beta2, static_cast<double>(state.step));
    constexpr double kEpsilon = 1e-8;

    auto param_views = parameter_views(model);
    auto grad_views = parameter_views(const_cast<Gradients&>(grads));
    std::ptrdiff_t offset = 0;
    for (std::size_t v = 0; v < param_views.size(); ++v) {
        for (std::ptrdiff_t i = 0; i < param_views[v].size; ++i, ++offset) {
            const double g = grad_views[v].data[i];
            double& m = state.first_moment(offset);
            double& s = state.second_moment(offset);
            m = config.beta1 * m + (1.0 - config.beta1) * g;
            s = config.beta2 * s + (1.0 - config.beta2) * g * g;
            const double m_hat = m / bias1;
            const double s_hat = s / bias2;
            param_views[v].data[i] -= config.learning_rate * m_hat /
                                      (std::sqrt(s_hat) + kEpsilon);
        }
    }
}

TrainResult train(const reflib::ReferenceLibrary& library, const prior::Architecture& arch,
                  const TrainConfig& config) {
    config.validate();
    if (library.sequences.size() != library.velocity_frequency_pairs.size() ||
        library.sequences.empty())
        throw InvalidInputError("library sequences and frequency map are inconsistent");

    const std::size_t n =
        static_cast<std::size_t>(std::llround(library.duration * library.sample_rate));

    // Precompute full-grid inputs and targets per (frequency, sequence) pair.
    struct Pair {
        double frequency;
        Eigen::MatrixXd inputs;   // 2K x N
        Eigen::MatrixXd targets;  // output_dim x N
    };
    std::vector<double> times(n);
    for (std::size_t i = 0; i < n; ++i)
        times[i] = static_cast<double>(i) / library.sample_rate;
    std::vector<Pair> pairs;
    for (std::size_t s = 0; s < library.sequences.size(); ++s) {
        Pair pair;
        pair.frequency = library.velocity_frequency_pairs[s].second;
        pair.inputs = prior::harmonic_matrix(times, pair.frequency, arch.harmonic_count);
        pair.targets.resize(arch.output_dim, static_cast<Eigen::Index>(n));
        const auto& seq = library.sequences[s];
        if (seq.length() != n) throw InvalidInputError("sequence length off the library grid");
        for (int j = 0; j < arch.output_dim; ++j)
            for (std::size_t i = 0; i < n; ++i)
                pair.targets(j, static_cast<Eigen::Index>(i)) =
                    seq.joints[static_cast<std::size_t>(j)][i];
        pairs.push_back(std::move(pair));
    }

    TrainResult result;
    result.model = prior::init_model(arch, config.seed);
    AdamState adam;
    std::mt19937_64 rng(config.seed);
    std::uniform_int_distribution<std::size_t> pick(0, n - 1);
    std::normal_distribution<double> gauss(0.0, 1.0);

    const Eigen::Index b = std::min<Eigen::Index>(config.batch_size,
                                                  static_cast<Eigen::Index>(n));
    BatchSample batch;
    batch.inputs.resize(arch.input_dim(), b);
    batch.targets.resize(arch.output_dim, b);
    batch.epsilon.resize(arch.latent_dim);

    TrainConfig step_config = config;
    for (int epoch = 0; epoch < config.epochs; ++epoch) {
        // Cosine-decay the learning rate to 1% of its initial value over the
        // run; late-stage minibatch noise otherwise puts a floor on the loss.
        if (config.epochs > 1) {
            const double progress = static_cast<double>(epoch) /
                                    static_cast<double>(config.epochs - 1);
            const double floor = 0.01 * config.learning_rate;
            step_config.learning_rate =
                floor + 0.5 * (config.learning_rate - floor) *
                            (1.0 + std::cos(std::numbers::pi * progress));
        }
        double epoch_rec = 0.0;
        double epoch_kl = 0.0;
        for (const auto& pair : pairs) {
            batch.frequency = pair.frequency;
            for (Eigen::Index col = 0; col < b; ++col) {
                const auto idx = static_cast<Eigen::Index>(pick(rng));
                batch.inputs.col(col) = pair.inputs.col(idx);
                batch.targets.col(col) = pair.targets.col(idx);
            }
            for (Eigen::Index i = 0; i < batch.epsilon.size(); ++i)
                batch.epsilon(i) = gauss(rng);

            auto [loss, grads] = loss_and_gradients(result.model, batch, config.beta_kl);
            clip_gradients(grads, config.clip_norm);
            optimizer_step(result.model, grads, adam, step_config);
            epoch_rec += loss.reconstruction;
            epoch_kl += loss.kl;
        }
        LossBreakdown entry;
        entry.reconstruction = epoch_rec / static_cast<double>(pairs.size());
        entry.kl = epoch_kl / static_cast<double>(pairs.size());
        entry.total = entry.reconstruction + config.beta_kl * entry.kl;
        if (!std::isfinite(entry.total))
            throw DivergedTrainingError("loss diverged at epoch " + std::to_string(epoch));
        result.history.push_back(entry);
    }
    return result;
}

void save_checkpoint(const std::string& path, const Checkpoint& checkpoint) {
    auto views = parameter_views(const_cast<prior::PriorModel&>(checkpoint.model));

    nlohmann::json header;
    header["format_version"] = kCheckpointFormatVersion;
    header["architecture"] = architecture_to_json(checkpoint.model.arch);
    header["config"] = config_to_json(checkpoint.config);
    header["epoch"] = checkpoint.epoch;
    header["loss_history"] = nlohmann::json::array();
    for (const auto& entry : checkpoint.history)
        header["loss_history"].push_back({entry.total, entry.reconstruction, entry.kl});
    header["tensors"] = nlohmann::json::array();
    for (const auto& view : views) header["tensors"].push_back(view.name);

    std::ofstream out(path, std::ios::binary);
    if (!out) throw FormatError("cannot open for writing: " + path);
    const std::string header_text = header.dump();
    const std::uint64_t header_len = header_text.size();
    out.write(reinterpret_cast<const char*>(&header_len), sizeof(header_len));
    out.write(header_text.data(), static_cast<std::streamsize>(header_text.size()));
    for (const auto& view : views) {
        const std::uint64_t count = static_cast<std::uint64_t>(view.size);
        out.write(reinterpret_cast<const char*>(&count), sizeof(count));
        out.write(reinterpret_cast<const char*>(view.data),
                  static_cast<std::streamsize>(count * sizeof(double)));
    }
    if (!out) throw FormatError("write failed: " + path);
}

Checkpoint load_checkpoint(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw FormatError("cannot open: " + path);

    std::uint64_t header_len = 0;
    if (!in.read(reinterpret_cast<char*>(&header_len), sizeof(header_len)))
        throw FormatError("truncated checkpoint header length: " + path);
    if (header_len > (1ull << 30)) throw FormatError("implausible header length: " + path);
    std::string header_text(header_len, '\0');
    if (!in.read(header_text.data(), static_cast<std::streamsize>(header_len)))
        throw FormatError("truncated checkpoint header: " + path);

    nlohmann::json header;
    try {
        header = nlohmann::json::parse(header_text);
    } catch (const nlohmann::json::exception& e) {
        throw FormatError(std::string("malformed checkpoint header: ") + e.what());
    }
    const int version = header.value("format_version", -1);
    if (version != kCheckpointFormatVersion)
        throw FormatError("unsupported checkpoint format_version " + std::to_string(version));

    Checkpoint checkpoint;
    checkpoint.model = prior::init_model(architecture_from_json(header.at("architecture")), 0);
    checkpoint.config = config_from_json(header.at("config"));
    checkpoint.epoch = header.at("epoch").get<int>();
    for (const auto& entry : header.at("loss_history")) {
        LossBreakdown l;
        l.total = entry.at(0).get<double>();
        l.reconstruction = entry.at(1).get<double>();
        l.kl = entry.at(2).get<double>();
        checkpoint.history.push_back(l);
    }

    auto views = parameter_views(checkpoint.model);
    const auto& tensor_names = header.at("tensors");
    if (tensor_names.size() != views.size())
        throw FormatError("checkpoint tensor list does not match architecture");
    for (std::size_t v = 0; v < views.size(); ++v) {
        if (tensor_names[v].get<std::string>() != views[v].name)
            throw FormatError("unexpected tensor '" + tensor_names[v].get<std::string>() +
                              "' in checkpoint");
        std::uint64_t count = 0;
        if (!in.read(reinterpret_cast<char*>(&count), sizeof(count)))
            throw FormatError("truncated tensor length for " + views[v].name);
        if (count != static_cast<std::uint64_t>(views[v].size))
            throw FormatError("tensor size mismatch for " + views[v].name);
        if (!in.read(reinterpret_cast<char*>(views[v].data),
                     static_cast<std::streamsize>(count * sizeof(double))))
            throw FormatError("truncated tensor data for " + views[v].name);
    }
    return checkpoint;
}

void save_loss_history_csv(const std::string& path,
                           const std::vector<LossBreakdown>& history) {
    std::ofstream out(path);
    if (!out) throw FormatError("cannot open for writing: " + path);
    out << "epoch,reconstruction,kl,total\n";
    out.precision(17);
    for (std::size_t i = 0; i < history.size(); ++i)
        out << i << ',' << history[i].reconstruction << ',' << history[i].kl << ','
            << history[i].total << '\n';
}

}  // namespace sgp::train
