#pragma once

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <vector>

#include "adagamma/numerics/matrix.hpp"
#include "adagamma/numerics/rng.hpp"

namespace adagamma {

/// Forward-pass cache for one batch; required by backward().
struct MlpCache {
    Matrix input; // B x in
    Matrix a1;    // B x h1, post-tanh
    Matrix a2;    // B x h2, post-tanh
    Matrix out;   // B x out
};

/// Two-hidden-layer perceptron, tanh hidden activations, identity output.
/// Parameters live in one flat vector (weights row-major as fan_out x fan_in,
/// followed by the bias) so optimizers and finite-difference checks can treat
/// the net as a plain parameter array.
class Mlp {
public:
    Mlp() = default;

    Mlp(int in, int h1, int h2, int out)
        : in_(in), h1_(h1), h2_(h2), out_(out) {
        if (in < 1 || h1 < 1 || h2 < 1 || out < 1)
            throw std::invalid_argument("Mlp: layer sizes must be positive");
        params_.assign(param_count(), 0.0);
    }

    /// Glorot-uniform weights, zero biases. Weight draw order is layer 0, 1, 2.
    Mlp(int in, int h1, int h2, int out, Rng& rng) : Mlp(in, h1, h2, out) {
        init_layer(w0(), h1_, in_, rng);
        init_layer(w1(), h2_, h1_, rng);
        init_layer(w2(), out_, h2_, rng);
    }

    int input_size() const { return in_; }
    int output_size() const { return out_; }
    int hidden_size() const { return h1_; }
    int hidden2_size() const { return h2_; }

    std::size_t param_count() const {
        return static_cast<std::size_t>((in_ + 1) * h1_ + (h1_ + 1) * h2_ + (h2_ + 1) * out_);
    }

    Vec& params() { return params_; }
    const Vec& params() const { return params_; }

    /// Final-layer weight/bias access, used by callers that pin the initial
    /// output (e.g. discount heads initialized to a fixed value).
    double* last_layer_weights() { return w2(); }
    std::size_t last_layer_weight_count() const { return static_cast<std::size_t>(out_ * h2_); }
    double* last_layer_bias() { return b2(); }

    /// Single-sample forward, no cache.
    Vec forward(const Vec& x) const {
        if (static_cast<int>(x.size()) != in_)
            throw std::invalid_argument("Mlp::forward: input size mismatch");
        Vec a1v(h1_), a2v(h2_), y(out_);
        affine_tanh(x.data(), w0(), b0(), h1_, in_, a1v.data());
        affine_tanh(a1v.data(), w1(), b1(), h2_, h1_, a2v.data());
        affine(a2v.data(), w2(), b2(), out_, h2_, y.data());
        return y;
    }

    /// Batched forward; rows of x are samples. Fills the cache for backward().
    Matrix forward(const Matrix& x, MlpCache& cache) const {
        if (static_cast<int>(x.cols) != in_)
            throw std::invalid_argument("Mlp::forward: input size mismatch");
        const std::size_t b = x.rows;
        cache.input = x;
        cache.a1 = Matrix(b, h1_);
        cache.a2 = Matrix(b, h2_);
        cache.out = Matrix(b, out_);
        for (std::size_t i = 0; i < b; ++i) {
            affine_tanh(x.row(i), w0(), b0(), h1_, in_, cache.a1.row(i));
            affine_tanh(cache.a1.row(i), w1(), b1(), h2_, h1_, cache.a2.row(i));
            affine(cache.a2.row(i), w2(), b2(), out_, h2_, cache.out.row(i));
        }
        return cache.out;
    }

    /// Backprop of a scalar loss through the cached batch. `upstream` holds
    /// dLoss/d(out) per sample (any 1/B factors already applied). Parameter
    /// gradients are accumulated into `grads` (size param_count). When
    /// `input_grad` is non-null it receives dLoss/d(input), B x in.
    void backward(const MlpCache& cache, const Matrix& upstream, Vec& grads,
                  Matrix* input_grad = nullptr) const {
        if (cache.out.rows == 0)
            throw std::logic_error("Mlp::backward: forward cache missing");
        if (upstream.rows != cache.out.rows || static_cast<int>(upstream.cols) != out_)
            throw std::invalid_argument("Mlp::backward: upstream shape mismatch");
        if (grads.size() != param_count())
            throw std::invalid_argument("Mlp::backward: grad buffer size mismatch");
        const std::size_t b = upstream.rows;

        Matrix g2(b, h2_); // d/d a2
        accumulate_layer(upstream, cache.a2, grads.data() + off_w2(), grads.data() + off_b2(),
                         out_, h2_, w2(), &g2);
        // tanh' applied in place
        for (std::size_t i = 0; i < b * static_cast<std::size_t>(h2_); ++i)
            g2.data[i] *= 1.0 - cache.a2.data[i] * cache.a2.data[i];

        Matrix g1(b, h1_);
        accumulate_layer(g2, cache.a1, grads.data() + off_w1(), grads.data() + off_b1(),
                         h2_, h1_, w1(), &g1);
        for (std::size_t i = 0; i < b * static_cast<std::size_t>(h1_); ++i)
            g1.data[i] *= 1.0 - cache.a1.data[i] * cache.a1.data[i];

        if (input_grad) {
            *input_grad = Matrix(b, in_);
            accumulate_layer(g1, cache.input, grads.data() + off_w0(), grads.data() + off_b0(),
                             h1_, in_, w0(), input_grad);
        } else {
            accumulate_layer(g1, cache.input, grads.data() + off_w0(), grads.data() + off_b0(),
                             h1_, in_, w0(), nullptr);
        }
    }

private:
    int in_ = 0, h1_ = 0, h2_ = 0, out_ = 0;
    Vec params_;

    std::size_t off_w0() const { return 0; }
    std::size_t off_b0() const { return static_cast<std::size_t>(h1_ * in_); }
    std::size_t off_w1() const { return off_b0() + h1_; }
    std::size_t off_b1() const { return off_w1() + static_cast<std::size_t>(h2_ * h1_); }
    std::size_t off_w2() const { return off_b1() + h2_; }
    std::size_t off_b2() const { return off_w2() + static_cast<std::size_t>(out_ * h2_); }

    double* w0() { return params_.data() + off_w0(); }
    double* b0() { return params_.data() + off_b0(); }
    double* w1() { return params_.data() + off_w1(); }
    double* b1() { return params_.data() + off_b1(); }
    double* w2() { return params_.data() + off_w2(); }
    double* b2() { return params_.data() + off_b2(); }
    const double* w0() const { return params_.data() + off_w0(); }
    const double* b0() const { return params_.data() + off_b0(); }
    const double* w1() const { return params_.data() + off_w1(); }
    const double* b1() const { return params_.data() + off_b1(); }
    const double* w2() const { return params_.data() + off_w2(); }
    const double* b2() const { return params_.data() + off_b2(); }

    static void init_layer(double* w, int fan_out, int fan_in, Rng& rng) {
        const double limit = std::sqrt(6.0 / (fan_in + fan_out));
        for (int i = 0; i < fan_out * fan_in; ++i) w[i] = rng.uniform(-limit, limit);
    }

    static void affine(const double* x, const double* w, const double* b,
                       int fan_out, int fan_in, double* y) {
        for (int i = 0; i < fan_out; ++i) {
            const double* wi = w + static_cast<std::size_t>(i) * fan_in;
            double acc = b[i];
            for (int j = 0; j < fan_in; ++j) acc += wi[j] * x[j];
            y[i] = acc;
        }
    }

    static void affine_tanh(const double* x, const double* w, const double* b,
                            int fan_out, int fan_in, double* y) {
        affine(x, w, b, fan_out, fan_in, y);
        for (int i = 0; i < fan_out; ++i) y[i] = std::tanh(y[i]);
    }

    /// For layer y = act x W^T + b: given g = dL/dy (B x fan_out) and the layer
    /// input `act` (B x fan_in), accumulate dW, db, and (optionally) the
    /// downstream gradient dL/d(act) = g W.
    static void accumulate_layer(const Matrix& g, const Matrix& act, double* dw, double* db,
                                 int fan_out, int fan_in, const double* w, Matrix* down) {
        const std::size_t b = g.rows;
        for (std::size_t s = 0; s < b; ++s) {
            const double* gs = g.row(s);
            const double* as = act.row(s);
            for (int i = 0; i < fan_out; ++i) {
                const double gi = gs[i];
                if (gi == 0.0) continue;
                db[i] += gi;
                double* dwi = dw + static_cast<std::size_t>(i) * fan_in;
                for (int j = 0; j < fan_in; ++j) dwi[j] += gi * as[j];
            }
            if (down) {
                double* ds = down->row(s);
                for (int i = 0; i < fan_out; ++i) {
                    const double gi = gs[i];
                    if (gi == 0.0) continue;
                    const double* wi = w + static_cast<std::size_t>(i) * fan_in;
                    for (int j = 0; j < fan_in; ++j) ds[j] += gi * wi[j];
                }
            }
        }
    }
};

} // namespace adagamma
