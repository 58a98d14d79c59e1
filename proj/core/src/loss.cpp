#include "aupipe/loss.hpp"

#include <cmath>
#include <string>

namespace aupipe {

namespace {

void check_inputs(const Matrix& x, const Matrix& y, const BoolMatrix& mask) {
    require_same_shape(x, y, "loss");
    require_same_shape(x, mask, "loss");
    if (x.cols != kNumAus)
        throw ShapeError("loss: expected " + std::to_string(kNumAus) + " AU columns, got " +
                         std::to_string(x.cols));
    for (std::size_t i = 0; i < y.size(); ++i) {
        if (mask.data[i] && !(y.data[i] >= 0.0 && y.data[i] <= 1.0))
            throw ValueError("loss: target " + std::to_string(y.data[i]) +
                             " outside [0, 1] at flat index " + std::to_string(i));
    }
}

// Stable per-element BCE on a logit: max(x,0) - x*y + log1p(exp(-|x|)).
double element_loss(double x, double y) {
    return std::max(x, 0.0) - x * y + std::log1p(std::exp(-std::abs(x)));
}

double reduction_factor(const LossConfig& cfg, std::size_t batch) {
    return cfg.batch_reduction == BatchReduction::Mean ? 1.0 / static_cast<double>(batch) : 1.0;
}

}  // namespace

void LossConfig::validate() const {
    for (int k = 0; k < kNumAus; ++k)
        if (!(weights[static_cast<std::size_t>(k)] > 0.0))
            throw ConfigError(std::string("loss weight for ") + kAuNames[static_cast<std::size_t>(k)] +
                              " must be > 0");
    if (!(label_smooth_eps >= 0.0 && label_smooth_eps < 0.5))
        throw ConfigError("label_smooth_eps must lie in [0, 0.5), got " +
                          std::to_string(label_smooth_eps));
    if (!(mll_sample_weight > 0.0)) throw ConfigError("mll_sample_weight must be > 0");
}

double stable_sigmoid(double x) {
    if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
    const double e = std::exp(x);
    return e / (1.0 + e);
}

LossOutput bce_loss(const Matrix& x, const Matrix& y, const BoolMatrix& mask,
                    const LossConfig& cfg) {
    check_inputs(x, y, mask);
    const double factor = reduction_factor(cfg, x.rows);
    LossOutput out;
    out.per_element = Matrix(x.rows, x.cols);
    out.grad = Matrix(x.rows, x.cols);
    double total = 0.0;
    for (std::size_t r = 0; r < x.rows; ++r) {
        double row_sum = 0.0;
        for (std::size_t c = 0; c < x.cols; ++c) {
            if (!mask(r, c)) continue;
            const double w = cfg.weights[c];
            const double e = w * element_loss(x(r, c), y(r, c));
            out.per_element(r, c) = e;
            out.grad(r, c) = factor * w * (stable_sigmoid(x(r, c)) - y(r, c));
            row_sum += e;
        }
        total += row_sum;
    }
    out.value = factor * total;
    return out;
}

LossOutput multi_label_loss(const Matrix& x, const Matrix& y, const BoolMatrix& mask,
                            const LossConfig& cfg) {
    check_inputs(x, y, mask);
    const double factor = reduction_factor(cfg, x.rows);
    const double wn = cfg.mll_sample_weight;
    LossOutput out;
    out.per_element = Matrix(x.rows, x.cols);
    out.grad = Matrix(x.rows, x.cols);
    double total = 0.0;
    for (std::size_t r = 0; r < x.rows; ++r) {
        double row_sum = 0.0;
        for (std::size_t c = 0; c < x.cols; ++c) {
            if (!mask(r, c)) continue;
            const double e = element_loss(x(r, c), y(r, c));
            out.per_element(r, c) = wn * e;
            out.grad(r, c) = factor * wn * (stable_sigmoid(x(r, c)) - y(r, c));
            row_sum += e;
        }
        total += wn * row_sum;
    }
    out.value = factor * total;
    return out;
}

LossOutput total_loss(const Matrix& x, const Matrix& y, const BoolMatrix& mask,
                      const LossConfig& cfg) {
    switch (cfg.components) {
        case LossComponents::BceOnly: return bce_loss(x, y, mask, cfg);
        case LossComponents::MllOnly: return multi_label_loss(x, y, mask, cfg);
        case LossComponents::Sum: break;
    }
    LossOutput bce = bce_loss(x, y, mask, cfg);
    const LossOutput mll = multi_label_loss(x, y, mask, cfg);
    bce.value += mll.value;
    for (std::size_t i = 0; i < bce.grad.size(); ++i) {
        bce.per_element.data[i] += mll.per_element.data[i];
        bce.grad.data[i] += mll.grad.data[i];
    }
    return bce;
}

Matrix smooth_labels(const Matrix& y, const BoolMatrix& mask, double eps) {
    if (!(eps >= 0.0 && eps < 0.5))
        throw ConfigError("label_smooth_eps must lie in [0, 0.5), got " + std::to_string(eps));
    require_same_shape(y, mask, "smooth_labels");
    Matrix out = y;
    for (std::size_t i = 0; i < out.size(); ++i)
        if (mask.data[i]) out.data[i] = y.data[i] * (1.0 - eps) + eps / 2.0;
    return out;
}

}  // namespace aupipe
