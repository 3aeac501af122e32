#include "sgp/prior.hpp"

#include <cmath>
#include <random>

namespace sgp::prior {

namespace {

Eigen::MatrixXd glorot_uniform(int rows, int cols, std::mt19937_64& rng) {
    const double bound = std::sqrt(6.0 / static_cast<double>(rows + cols));
    std::uniform_real_distribution<double> dist(-bound, bound);
    Eigen::MatrixXd m(rows, cols);
    for (int c = 0; c < cols; ++c)
        for (int r = 0; r < rows; ++r) m(r, c) = dist(rng);
    return m;
}

}  // namespace

double silu(double x) { return x / (1.0 + std::exp(-x)); }

PriorModel init_model(const Architecture& arch, std::uint64_t seed) {
    if (arch.latent_dim < 1 || arch.encoder_hidden < 1 || arch.harmonic_count < 1 ||
        arch.decoder_widths.empty())
        throw InvalidInputError("invalid architecture");

    std::mt19937_64 rng(seed);
    PriorModel model;
    model.arch = arch;

    model.encoder_w1 = glorot_uniform(arch.encoder_hidden, 1, rng);
    model.encoder_b1 = Eigen::VectorXd::Zero(arch.encoder_hidden);
    model.encoder_w2 = glorot_uniform(2 * arch.latent_dim, arch.encoder_hidden, rng);
    model.encoder_b2 = Eigen::VectorXd::Zero(2 * arch.latent_dim);
    // Start the posterior nearly deterministic (sigma ~ exp(-3)): large initial
    // sampling noise feeds the modulation path and both slows reconstruction
    // and biases learned amplitudes low.
    model.encoder_b2.tail(arch.latent_dim).setConstant(-6.0);

    int prev = arch.input_dim();
    for (int width : arch.decoder_widths) {
        model.film_gamma_w.push_back(glorot_uniform(width, arch.context_dim(), rng));
        model.film_gamma_b.push_back(Eigen::VectorXd::Zero(width));
        model.film_beta_w.push_back(glorot_uniform(width, arch.context_dim(), rng));
        model.film_beta_b.push_back(Eigen::VectorXd::Zero(width));
        model.decoder_w.push_back(glorot_uniform(width, prev, rng));
        prev = width;
    }
    model.output_w = glorot_uniform(arch.output_dim, prev, rng);
    model.output_b = Eigen::VectorXd::Zero(arch.output_dim);
    return model;
}

double normalized_frequency(const Architecture& arch, double f) {
    return (f - arch.frequency_mid) / arch.frequency_half_range;
}

std::pair<Eigen::VectorXd, Eigen::VectorXd> encode(const PriorModel& model, double f) {
    if (f <= 0.0) throw InvalidInputError("encode frequency must be positive");
    const double fn = normalized_frequency(model.arch, f);
    const Eigen::VectorXd pre = model.encoder_w1 * fn + model.encoder_b1;
    const Eigen::VectorXd hidden = pre.unaryExpr([](double x) { return silu(x); });
    const Eigen::VectorXd out = model.encoder_w2 * hidden + model.encoder_b2;
    Eigen::VectorXd mu = out.head(model.arch.latent_dim);
    Eigen::VectorXd log_var = out.tail(model.arch.latent_dim)
                                  .cwiseMax(kLogVarMin)
                                  .cwiseMin(kLogVarMax);
    return {std::move(mu), std::move(log_var)};
}

Eigen::VectorXd reparameterize(const Eigen::VectorXd& mu, const Eigen::VectorXd& log_var,
                               const Eigen::VectorXd& epsilon) {
    if (mu.size() != log_var.size() || mu.size() != epsilon.size())
        throw InvalidInputError("reparameterize shape mismatch");
    return mu.array() + (log_var.array() / 2.0).exp() * epsilon.array();
}

std::vector<FilmParams> film_modulation(const PriorModel& model,
                                        const Eigen::VectorXd& context) {
    if (context.size() != model.arch.context_dim())
        throw InvalidInputError("FiLM context dimension mismatch");
    std::vector<FilmParams> films;
    films.reserve(model.decoder_w.size());
    for (std::size_t l = 0; l < model.decoder_w.size(); ++l) {
        FilmParams p;
        p.gamma = 1.0 + 0.1 * (model.film_gamma_w[l] * context + model.film_gamma_b[l])
                            .array()
                            .tanh();
        p.beta =
            0.1 * (model.film_beta_w[l] * context + model.film_beta_b[l]).array().tanh();
        films.push_back(std::move(p));
    }
    return films;
}

Eigen::MatrixXd decode_batch(const PriorModel& model, const Eigen::MatrixXd& inputs,
                             const std::vector<FilmParams>& films) {
    if (inputs.rows() != model.arch.input_dim())
        throw InvalidInputError("decode input width mismatch");
    if (films.size() != model.decoder_w.size())
        throw InvalidInputError("decode FiLM layer count mismatch");

    Eigen::MatrixXd h = inputs;
    for (std::size_t l = 0; l < model.decoder_w.size(); ++l) {
        Eigen::MatrixXd u = model.decoder_w[l] * h;
        u = (u.array().colwise() * films[l].gamma.array()).colwise() + films[l].beta.array();
        h = u.unaryExpr([](double x) { return silu(x); });
    }
    return (model.output_w * h).colwise() + model.output_b;
}

Eigen::VectorXd decode(const PriorModel& model, const harmonics::HarmonicVector& x,
                       const std::vector<FilmParams>& films) {
    Eigen::MatrixXd input(x.values.size(), 1);
    for (std::size_t i = 0; i < x.values.size(); ++i)
        input(static_cast<Eigen::Index>(i), 0) = x.values[i];
    return decode_batch(model, input, films).col(0);
}

Eigen::MatrixXd harmonic_matrix(const std::vector<double>& times, double f,
                                int harmonic_count) {
    Eigen::MatrixXd m(2 * harmonic_count, static_cast<Eigen::Index>(times.size()));
    for (std::size_t i = 0; i < times.size(); ++i) {
        const auto v = harmonics::harmonic_encode(times[i], f, harmonic_count);
        for (int r = 0; r < 2 * harmonic_count; ++r)
            m(r, static_cast<Eigen::Index>(i)) = v.values[static_cast<std::size_t>(r)];
    }
    return m;
}

Eigen::VectorXd generation_latent(const PriorModel& model, double f, GenerationMode mode,
                                  std::uint64_t seed) {
    auto [mu, log_var] = encode(model, f);
    if (mode == GenerationMode::mean) return mu;
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    Eigen::VectorXd epsilon(mu.size());
    for (Eigen::Index i = 0; i < epsilon.size(); ++i) epsilon(i) = gauss(rng);
    return reparameterize(mu, log_var, epsilon);
}

TrajectoryBatch generate_with_latent(const PriorModel& model, double f,
                                     const std::vector<double>& times,
                                     const Eigen::VectorXd& z) {
    if (f <= 0.0) throw InvalidInputError("generation frequency must be positive");
    Eigen::VectorXd context(model.arch.context_dim());
    context << z, normalized_frequency(model.arch, f);
    const auto films = film_modulation(model, context);
    const Eigen::MatrixXd inputs = harmonic_matrix(times, f, model.arch.harmonic_count);
    const Eigen::MatrixXd outputs = decode_batch(model, inputs, films);

    TrajectoryBatch batch;
    batch.frequency = f;
    batch.times = times;
    for (int j = 0; j < model.arch.output_dim; ++j) {
        auto& samples = batch.joints[static_cast<std::size_t>(j)];
        samples.resize(times.size());
        for (std::size_t i = 0; i < times.size(); ++i)
            samples[i] = outputs(j, static_cast<Eigen::Index>(i));
    }
    return batch;
}

TrajectoryBatch generate_trajectory(const PriorModel& model, double f, double duration,
                                    double rate, GenerationMode mode, std::uint64_t seed) {
    if (f <= 0.0) throw InvalidInputError("generation frequency must be positive");
    if (duration <= 0.0 || rate <= 0.0)
        throw InvalidInputError("duration and rate must be positive");

    const std::size_t n = static_cast<std::size_t>(std::llround(duration * rate));
    std::vector<double> times(n);
    for (std::size_t i = 0; i < n; ++i) times[i] = static_cast<double>(i) / rate;

    // One latent draw per trajectory; all timesteps share it.
    const Eigen::VectorXd z = generation_latent(model, f, mode, seed);
    TrajectoryBatch batch = generate_with_latent(model, f, times, z);
    batch.mode = mode;
    batch.seed = seed;
    return batch;
}

}  // namespace sgp::prior
