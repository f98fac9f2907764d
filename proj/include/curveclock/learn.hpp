#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <string>
#include <utility>
#include <vector>

#include "curveclock/error.hpp"
#include "curveclock/metric.hpp"
#include "curveclock/normalize.hpp"
#include "curveclock/parallel.hpp"
#include "curveclock/reparam.hpp"

namespace curveclock {

/// Axes of the (lambda, n) search grid plus the sample count.
struct GridSpec {
    std::vector<double> lambdas{0.5, 1, 2, 5, 10, 100, 1000, 2000, kArcLengthLambda};
    std::vector<int> sector_counts{0, 2, 3, 4, 5, 7, 9, 10, 20};
    int samples = 1000;

    void validate() const {
        if (lambdas.empty() || sector_counts.empty())
            throw ValidationError("GridSpec: lambda and sector lists must be nonempty");
        if (samples < 3) throw ValidationError("GridSpec: samples must be >= 3");
        for (double l : lambdas)
            if (std::isnan(l) || (!is_arclength_lambda(l) && l <= 0.0))
                throw ValidationError("GridSpec: lambdas must be > 0 or the arc-length sentinel");
        for (int n : sector_counts)
            if (n < 0) throw ValidationError("GridSpec: sector counts must be >= 0");
    }
};

/// Nearest valid sample count for a sector count: n * round(N/n). The Dunn
/// discretization uses dt = 1/N, so a one-sample adjustment at N ~ 1000 is
/// immaterial while keeping the per-sector counts integral.
inline int adapt_samples(int samples, int sectors) {
    if (sectors <= 0) return samples;
    int per = (2 * samples + sectors) / (2 * sectors); // round(samples / sectors)
    if (per < 1) per = 1;
    int n = per * sectors;
    while (n < 3) n += sectors;
    return n;
}

struct GridCell {
    double dunn = 0.0;
    bool ok = false;
    std::string error;
    int samples_used = 0;
};

/// Dunn table indexed (row = sector count, column = lambda) plus the argmax.
struct GridResult {
    std::vector<double> lambdas;
    std::vector<int> sector_counts;
    std::vector<std::vector<GridCell>> cells; // [row][col]
    std::size_t best_row = 0;
    std::size_t best_col = 0;
    bool has_best = false;

    const GridCell& best() const { return cells[best_row][best_col]; }
};

/// Evaluates the Dunn index of the canonicalized training set for every grid
/// cell. Normalization runs once; each cell reparameterizes with its own
/// (lambda, n). Per-cell failures are recorded, not fatal. Argmax ties break
/// toward larger lambda, then smaller n.
inline GridResult grid_search(const LabeledDataset& raw, const NormalizationPlan& plan,
                              const GridSpec& grid, unsigned threads = 0) {
    grid.validate();
    if (raw.contours.size() != raw.labels.size() || raw.contours.empty())
        throw ValidationError("grid_search: malformed dataset");

    const std::size_t m = raw.size();
    std::vector<Contour> normalized(m);
    std::vector<Vec2> refs(m);
    parallel_for(m, threads, [&](std::size_t i) {
        normalized[i] = apply_plan(raw.contours[i], plan);
        refs[i] = reference_point(normalized[i]);
    });

    GridResult result;
    result.lambdas = grid.lambdas;
    result.sector_counts = grid.sector_counts;
    result.cells.assign(grid.sector_counts.size(),
                        std::vector<GridCell>(grid.lambdas.size()));

    for (std::size_t row = 0; row < grid.sector_counts.size(); ++row) {
        for (std::size_t col = 0; col < grid.lambdas.size(); ++col) {
            GridCell& cell = result.cells[row][col];
            ParamFamily fam;
            fam.lambda = grid.lambdas[col];
            fam.sectors = grid.sector_counts[row];
            fam.samples = adapt_samples(grid.samples, fam.sectors);
            cell.samples_used = fam.samples;
            try {
                LabeledDataset canon;
                canon.labels = raw.labels;
                canon.class_count = raw.class_count;
                canon.contours.resize(m);
                parallel_for(m, threads, [&](std::size_t i) {
                    canon.contours[i] = curvature_clock_resample(normalized[i], fam, refs[i]);
                });
                cell.dunn = dunn_index(canon, threads);
                cell.ok = true;
            } catch (const std::exception& e) {
                cell.ok = false;
                cell.error = e.what();
            }
        }
    }

    for (std::size_t row = 0; row < result.cells.size(); ++row) {
        for (std::size_t col = 0; col < result.cells[row].size(); ++col) {
            const GridCell& cell = result.cells[row][col];
            if (!cell.ok) continue;
            if (!result.has_best) {
                result.has_best = true;
                result.best_row = row;
                result.best_col = col;
                continue;
            }
            const GridCell& best = result.best();
            bool better = cell.dunn > best.dunn;
            if (cell.dunn == best.dunn) {
                const double l_new = result.lambdas[col], l_old = result.lambdas[result.best_col];
                if (l_new > l_old) better = true;
                else if (l_new == l_old &&
                         result.sector_counts[row] < result.sector_counts[result.best_row])
                    better = true;
            }
            if (better) { result.best_row = row; result.best_col = col; }
        }
    }
    return result;
}

/// k-nearest-neighbor labels for `test` under l2_distance to `train`.
/// Neighbor order ties break by train index; vote ties break by smaller mean
/// distance among the tied classes, then smaller class id.
inline std::vector<int> knn_classify(const LabeledDataset& train, const LabeledDataset& test,
                                     int k, unsigned threads = 0) {
    train.validate();
    if (k < 1 || static_cast<std::size_t>(k) > train.size())
        throw ValidationError("knn_classify: k must be in [1, train size]");
    std::vector<int> pred(test.size());
    parallel_for(test.size(), threads, [&](std::size_t t) {
        std::vector<std::pair<double, std::size_t>> by_dist(train.size());
        for (std::size_t i = 0; i < train.size(); ++i)
            by_dist[i] = {l2_distance(test.contours[t], train.contours[i]), i};
        std::sort(by_dist.begin(), by_dist.end());

        std::vector<int> votes(static_cast<std::size_t>(train.class_count), 0);
        std::vector<double> dist_sum(static_cast<std::size_t>(train.class_count), 0.0);
        for (int j = 0; j < k; ++j) {
            const auto& [dist, idx] = by_dist[static_cast<std::size_t>(j)];
            const auto cls = static_cast<std::size_t>(train.labels[idx]);
            ++votes[cls];
            dist_sum[cls] += dist;
        }
        int best = -1;
        for (int cls = 0; cls < train.class_count; ++cls) {
            const auto c = static_cast<std::size_t>(cls);
            if (votes[c] == 0) continue;
            if (best < 0) { best = cls; continue; }
            const auto b = static_cast<std::size_t>(best);
            if (votes[c] > votes[b]) { best = cls; continue; }
            if (votes[c] == votes[b]) {
                const double mean_c = dist_sum[c] / votes[c];
                const double mean_b = dist_sum[b] / votes[b];
                if (mean_c < mean_b) best = cls;
            }
        }
        pred[t] = best;
    });
    return pred;
}

/// Multinomial logistic regression on flattened canonical coordinates
/// (2N features per contour), trained by deterministic full-batch gradient
/// descent from zero initialization.
struct LogisticModel {
    int classes = 0;
    int dim = 0;
    std::vector<double> weights; // classes x dim, row-major
    std::vector<double> bias;    // classes
};

namespace detail {

struct LogisticEval {
    double loss = 0.0;
    std::vector<double> grad_w;
    std::vector<double> grad_b;
};

/// Summed cross-entropy + (penalty/2)*|W|^2 (bias unpenalized) and its
/// gradient. Row-major features, one sample per row.
inline LogisticEval logistic_eval(const std::vector<double>& x, const std::vector<int>& y,
                                  std::size_t m, std::size_t dim, std::size_t classes,
                                  const std::vector<double>& w, const std::vector<double>& b,
                                  double penalty, bool want_grad) {
    LogisticEval ev;
    if (want_grad) {
        ev.grad_w.assign(classes * dim, 0.0);
        ev.grad_b.assign(classes, 0.0);
    }
    std::vector<double> logits(classes);
    for (std::size_t i = 0; i < m; ++i) {
        const double* xi = &x[i * dim];
        double max_logit = -std::numeric_limits<double>::infinity();
        for (std::size_t c = 0; c < classes; ++c) {
            double v = b[c];
            const double* wc = &w[c * dim];
            for (std::size_t d = 0; d < dim; ++d) v += wc[d] * xi[d];
            logits[c] = v;
            max_logit = std::max(max_logit, v);
        }
        double z = 0.0;
        for (std::size_t c = 0; c < classes; ++c) {
            logits[c] = std::exp(logits[c] - max_logit);
            z += logits[c];
        }
        const auto yi = static_cast<std::size_t>(y[i]);
        ev.loss += -(std::log(logits[yi]) - std::log(z));
        if (want_grad) {
            for (std::size_t c = 0; c < classes; ++c) {
                const double resid = logits[c] / z - (c == yi ? 1.0 : 0.0);
                double* gw = &ev.grad_w[c * dim];
                for (std::size_t d = 0; d < dim; ++d) gw[d] += resid * xi[d];
                ev.grad_b[c] += resid;
            }
        }
    }
    double reg = 0.0;
    for (double v : w) reg += v * v;
    ev.loss += 0.5 * penalty * reg;
    if (want_grad)
        for (std::size_t j = 0; j < w.size(); ++j) ev.grad_w[j] += penalty * w[j];
    return ev;
}

inline LogisticModel logistic_train_features(const std::vector<double>& x, const std::vector<int>& y,
                                             std::size_t m, std::size_t dim, std::size_t classes,
                                             double penalty, int iters, double step0) {
    LogisticModel model;
    model.classes = static_cast<int>(classes);
    model.dim = static_cast<int>(dim);
    model.weights.assign(classes * dim, 0.0);
    model.bias.assign(classes, 0.0);

    double step = step0;
    LogisticEval ev = logistic_eval(x, y, m, dim, classes, model.weights, model.bias, penalty, true);
    if (!std::isfinite(ev.loss))
        throw NumericError("logistic_train: non-finite loss (bad feature values)");
    for (int it = 0; it < iters; ++it) {
        std::vector<double> w_next(model.weights.size());
        std::vector<double> b_next(model.bias.size());
        bool converged = false;
        for (;;) {
            for (std::size_t j = 0; j < w_next.size(); ++j)
                w_next[j] = model.weights[j] - step * ev.grad_w[j];
            for (std::size_t j = 0; j < b_next.size(); ++j)
                b_next[j] = model.bias[j] - step * ev.grad_b[j];
            const LogisticEval trial =
                logistic_eval(x, y, m, dim, classes, w_next, b_next, penalty, true);
            if (std::isfinite(trial.loss) && trial.loss <= ev.loss) {
                model.weights.swap(w_next);
                model.bias.swap(b_next);
                ev = trial;
                step = std::min(step * 1.25, 1e6);
                break;
            }
            step *= 0.5;
            // No finite step can lower the loss any further: converged to
            // float precision.
            if (step < 1e-18) { converged = true; break; }
        }
        if (converged) break;
    }
    return model;
}

inline std::vector<double> flatten_features(const LabeledDataset& d) {
    const std::size_t dim = 2 * d.contours.front().size();
    std::vector<double> x(d.size() * dim);
    for (std::size_t i = 0; i < d.size(); ++i) {
        for (std::size_t p = 0; p < d.contours[i].size(); ++p) {
            x[i * dim + 2 * p] = d.contours[i][p].x;
            x[i * dim + 2 * p + 1] = d.contours[i][p].y;
        }
    }
    return x;
}

} // namespace detail

inline LogisticModel logistic_train(const LabeledDataset& train, double penalty = 1.0,
                                    int iters = 500, double step0 = 1.0) {
    train.validate();
    if (train.class_count < 2)
        throw ValidationError("logistic_train: need at least two classes");
    const std::vector<double> x = detail::flatten_features(train);
    return detail::logistic_train_features(x, train.labels, train.size(),
                                           2 * train.contours.front().size(),
                                           static_cast<std::size_t>(train.class_count),
                                           penalty, iters, step0);
}

inline int logistic_predict_one(const LogisticModel& model, const Contour& c) {
    const std::size_t dim = static_cast<std::size_t>(model.dim);
    if (2 * c.size() != dim)
        throw ValidationError("logistic_predict: feature dimension mismatch");
    int best = 0;
    double best_v = -std::numeric_limits<double>::infinity();
    for (int cls = 0; cls < model.classes; ++cls) {
        double v = model.bias[static_cast<std::size_t>(cls)];
        const double* wc = &model.weights[static_cast<std::size_t>(cls) * dim];
        for (std::size_t p = 0; p < c.size(); ++p)
            v += wc[2 * p] * c[p].x + wc[2 * p + 1] * c[p].y;
        if (v > best_v) { best_v = v; best = cls; }
    }
    return best;
}

inline std::vector<int> logistic_predict(const LogisticModel& model, const LabeledDataset& test) {
    std::vector<int> pred(test.size());
    for (std::size_t i = 0; i < test.size(); ++i)
        pred[i] = logistic_predict_one(model, test.contours[i]);
    return pred;
}

/// Fraction of exact label matches.
inline double accuracy(const std::vector<int>& truth, const std::vector<int>& pred) {
    if (truth.size() != pred.size())
        throw ValidationError("accuracy: label vectors have different lengths");
    if (truth.empty()) throw ValidationError("accuracy: empty label vectors");
    std::size_t hits = 0;
    for (std::size_t i = 0; i < truth.size(); ++i)
        if (truth[i] == pred[i]) ++hits;
    return static_cast<double>(hits) / static_cast<double>(truth.size());
}

} // namespace curveclock
