// Test-only reference implementations. Everything here favors naive loops
// over the library's vectorized identities so the two routes stay
// independent.
#pragma once

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include <Eigen/Dense>

#include "tempo/dataset.hpp"
#include "tempo/models.hpp"

namespace oracle {

using tempo::Event;
using tempo::EventLog;
using tempo::Matrix;
using tempo::RowVector;
using tempo::Vector;

// -- generic numerics ----------------------------------------------------

inline Matrix naive_gram(const Matrix& m) {
    Matrix g = Matrix::Zero(m.cols(), m.cols());
    for (Eigen::Index a = 0; a < m.cols(); ++a) {
        for (Eigen::Index b = 0; b < m.cols(); ++b) {
            double acc = 0.0;
            for (Eigen::Index row = 0; row < m.rows(); ++row) {
                acc += m(row, a) * m(row, b);
            }
            g(a, b) = acc;
        }
    }
    return g;
}

inline Matrix lu_solve(const Matrix& lhs, const Matrix& rhs) {
    return Eigen::FullPivLU<Matrix>(lhs).solve(rhs);
}

// Closed-form Legendre polynomials up to degree 5.
inline double legendre_closed(int degree, double x) {
    switch (degree) {
        case 0: return 1.0;
        case 1: return x;
        case 2: return (3.0 * x * x - 1.0) / 2.0;
        case 3: return (5.0 * x * x * x - 3.0 * x) / 2.0;
        case 4: return (35.0 * x * x * x * x - 30.0 * x * x + 3.0) / 8.0;
        case 5: return (63.0 * std::pow(x, 5) - 70.0 * std::pow(x, 3) + 15.0 * x) / 8.0;
        default: throw std::runtime_error("legendre_closed: degree too high");
    }
}

inline Vector basis_row_closed(int r, double x) {
    Vector row(r);
    for (int d = 0; d < r; ++d) row[d] = legendre_closed(d, x);
    return row;
}

inline double analytic_g(int i, int j) { return i == j ? 2.0 / (2.0 * i + 1.0) : 0.0; }

// Trapezoidal quadrature of f over [-1, 1].
template <typename F>
double trapezoid(F&& f, int points) {
    const double h = 2.0 / (points - 1);
    double acc = 0.5 * (f(-1.0) + f(1.0));
    for (int j = 1; j + 1 < points; ++j) {
        acc += f(-1.0 + j * h);
    }
    return acc * h;
}

inline double pearson(const std::vector<double>& x, const std::vector<double>& y) {
    const auto n = static_cast<double>(x.size());
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        mx += x[i];
        my += y[i];
    }
    mx /= n;
    my /= n;
    double sxy = 0.0, sxx = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxy += (x[i] - mx) * (y[i] - my);
        sxx += (x[i] - mx) * (x[i] - mx);
        syy += (y[i] - my) * (y[i] - my);
    }
    if (sxx == 0.0 || syy == 0.0) return 0.0;
    return sxy / std::sqrt(sxx * syy);
}

// Kolmogorov-Smirnov statistic against U(lo, hi).
inline double ks_uniform(std::vector<double> samples, double lo, double hi) {
    std::sort(samples.begin(), samples.end());
    const auto n = static_cast<double>(samples.size());
    double stat = 0.0;
    for (std::size_t i = 0; i < samples.size(); ++i) {
        const double cdf = (samples[i] - lo) / (hi - lo);
        stat = std::max(stat, std::abs((i + 1) / n - cdf));
        stat = std::max(stat, std::abs(cdf - i / n));
    }
    return stat;
}

// Lagrange interpolation through (xs, ys), evaluated at x.
inline double lagrange_eval(const std::vector<double>& xs, const std::vector<double>& ys,
                            double x) {
    double acc = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        double term = ys[i];
        for (std::size_t j = 0; j < xs.size(); ++j) {
            if (i != j) term *= (x - xs[j]) / (xs[i] - xs[j]);
        }
        acc += term;
    }
    return acc;
}

// -- datasets -------------------------------------------------------------

inline EventLog toy_log(int n_users, int n_items, int n_events, std::uint64_t seed,
                        std::int64_t t0 = 1600000000, std::int64_t span = 40 * 86400) {
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<int> user(0, n_users - 1);
    std::uniform_int_distribution<int> item(0, n_items - 1);
    std::uniform_int_distribution<std::int64_t> ts(t0, t0 + span);
    std::vector<Event> events;
    events.reserve(n_events);
    // Anchor the range so every toy log spans exactly [t0, t0 + span].
    events.push_back(Event{0, 0, t0});
    events.push_back(Event{n_users - 1, n_items - 1, t0 + span});
    for (int e = 0; e < n_events - 2; ++e) {
        events.push_back(Event{user(rng), item(rng), ts(rng)});
    }
    return EventLog::build(std::move(events));
}

// -- positive-cell weights -------------------------------------------------

inline double event_weight(const EventLog& log, const Event& e, double alpha,
                           std::optional<double> half_life_days) {
    if (!half_life_days) return alpha;
    const double age = static_cast<double>(log.t_max() - e.ts);
    return alpha * std::pow(0.5, age / (*half_life_days * 86400.0));
}

// Dense (user, item) weights; the latest event of a pair wins.
inline Matrix dense_weights_matrix(const EventLog& log, double alpha,
                                   std::optional<double> half_life_days) {
    Matrix w = Matrix::Zero(log.n_users(), log.n_items());
    for (const Event& e : log.events()) {
        w(e.user, e.item) = event_weight(log, e, alpha, half_life_days);
    }
    return w;
}

// Dense (user, item, bin) weights, one matrix per bin.
inline std::vector<Matrix> dense_weights_tensor(const EventLog& log,
                                                const tempo::BinnedLog& binned, double alpha,
                                                std::optional<double> half_life_days) {
    std::vector<Matrix> w(binned.n_bins, Matrix::Zero(log.n_users(), log.n_items()));
    for (std::size_t idx = 0; idx < log.events().size(); ++idx) {
        const Event& e = log.events()[idx];
        w[binned.bins[idx]](e.user, e.item) = event_weight(log, e, alpha, half_life_days);
    }
    return w;
}

// Normalized event times, matching the library's affine map.
inline std::vector<double> normalized_times(const EventLog& log) {
    std::vector<double> t(log.events().size());
    for (std::size_t e = 0; e < t.size(); ++e) {
        t[e] = -1.0 + 2.0 *
                          static_cast<double>(log.events()[e].ts - log.t_min()) /
                          static_cast<double>(log.t_max() - log.t_min());
    }
    return t;
}

// Midpoint kernel moments over [-1, 1], integral convention (means times 2).
struct KernelIntegrals {
    double k2 = 0.0;  // int K^2
    Vector kc;        // int K * C_{t'}
};

inline KernelIntegrals kernel_integrals(int r, double t, double sigma, int samples) {
    KernelIntegrals out;
    out.kc = Vector::Zero(r);
    const double step = 2.0 / samples;
    for (int j = 0; j < samples; ++j) {
        const double tp = -1.0 + (j + 0.5) * step;
        const double z = (t - tp) / sigma;
        const double k = std::exp(-z * z);
        out.k2 += k * k;
        out.kc += k * basis_row_closed(r, tp);
    }
    out.k2 *= 2.0 / samples;
    out.kc *= 2.0 / samples;
    return out;
}

// -- dense block-update oracles --------------------------------------------
// Each assembles one row's normal equations by enumerating every tensor cell.

inline Vector wmf_row_update(const Matrix& weights_for_rows, const Matrix& other, int row,
                             double lambda) {
    const int k = static_cast<int>(other.cols());
    Matrix lhs = lambda * Matrix::Identity(k, k);
    Vector rhs = Vector::Zero(k);
    for (Eigen::Index i = 0; i < other.rows(); ++i) {
        const Vector q = other.row(i).transpose();
        lhs += q * q.transpose();
        const double w = weights_for_rows(row, i);
        if (w > 0.0) {
            lhs += w * q * q.transpose();
            rhs += w * q;
        }
    }
    return lu_solve(lhs, rhs);
}

// iTALS row update: `target_weight(a, b)` gives the positive weight for the
// (other1=a, other2=b) cell of this row.
template <typename WeightFn>
Vector itals_row_update(const Matrix& f1, const Matrix& f2, WeightFn&& weight, double lambda,
                        double inv_l, const Vector& reg_target) {
    const int k = static_cast<int>(f1.cols());
    Matrix lhs = lambda * Matrix::Identity(k, k);
    Vector rhs = reg_target;
    for (Eigen::Index a = 0; a < f1.rows(); ++a) {
        for (Eigen::Index b = 0; b < f2.rows(); ++b) {
            const Vector z = f1.row(a).cwiseProduct(f2.row(b)).transpose();
            lhs += inv_l * z * z.transpose();
            const double w = weight(static_cast<int>(a), static_cast<int>(b));
            if (w > 0.0) {
                lhs += w * z * z.transpose();
                rhs += w * z;
            }
        }
    }
    return lu_solve(lhs, rhs);
}

template <typename WeightFn>
Vector italsx_row_update(const Matrix& f1, const Matrix& f2, WeightFn&& weight, double lambda,
                         double inv_l) {
    const int k = static_cast<int>(f1.cols());
    Matrix lhs = lambda * Matrix::Identity(k, k);
    Vector rhs = Vector::Zero(k);
    for (Eigen::Index a = 0; a < f1.rows(); ++a) {
        for (Eigen::Index b = 0; b < f2.rows(); ++b) {
            const Vector s = (f1.row(a) + f2.row(b)).transpose();
            const double cross = f1.row(a).dot(f2.row(b));
            lhs += inv_l * s * s.transpose();
            rhs -= inv_l * cross * s;
            const double w = weight(static_cast<int>(a), static_cast<int>(b));
            if (w > 0.0) {
                lhs += w * s * s.transpose();
                rhs += w * (1.0 - cross) * s;
            }
        }
    }
    return lu_solve(lhs, rhs);
}

// DTF user/item update with the limit term assembled from the analytic G and
// closed-form basis rows.
struct FitEvent {
    int other = 0;  // item for user rows, user for item rows
    double t = 0.0;
    double w = 1.0;
};

inline Vector dtf_row_update(const Matrix& other, const Matrix& a,
                             const std::vector<FitEvent>& events, double lambda) {
    const int k = static_cast<int>(other.cols());
    const int r = static_cast<int>(a.rows());
    Matrix ag = Matrix::Zero(k, k);
    for (int i = 0; i < r; ++i) {
        for (int j = 0; j < r; ++j) {
            ag += analytic_g(i, j) * a.row(i).transpose() * a.row(j);
        }
    }
    Matrix lhs = lambda * Matrix::Identity(k, k);
    for (Eigen::Index i = 0; i < other.rows(); ++i) {
        const Vector q = other.row(i).transpose();
        lhs += (q * q.transpose()).cwiseProduct(ag);
    }
    Vector rhs = Vector::Zero(k);
    for (const FitEvent& ev : events) {
        const Vector bt = a.transpose() * basis_row_closed(r, ev.t);
        const Vector q = other.row(ev.other).transpose();
        const Vector z = q.cwiseProduct(bt);
        lhs += ev.w * z * z.transpose();
        rhs += ev.w * z;
    }
    return lu_solve(lhs, rhs);
}

inline Vector dtf_kernel_row_update(const Matrix& other, const Matrix& a,
                                    const std::vector<FitEvent>& events, double lambda,
                                    double sigma, int samples) {
    const int k = static_cast<int>(other.cols());
    const int r = static_cast<int>(a.rows());
    Matrix ag = Matrix::Zero(k, k);
    for (int i = 0; i < r; ++i) {
        for (int j = 0; j < r; ++j) {
            ag += analytic_g(i, j) * a.row(i).transpose() * a.row(j);
        }
    }
    Matrix lhs = lambda * Matrix::Identity(k, k);
    for (Eigen::Index i = 0; i < other.rows(); ++i) {
        const Vector q = other.row(i).transpose();
        lhs += (q * q.transpose()).cwiseProduct(ag);
    }
    Vector rhs = Vector::Zero(k);
    for (const FitEvent& ev : events) {
        const Vector q = other.row(ev.other).transpose();
        lhs += ev.w * (q * q.transpose()).cwiseProduct(ag);
        const KernelIntegrals ki = kernel_integrals(r, ev.t, sigma, samples);
        rhs += ev.w * q.cwiseProduct(a.transpose() * ki.kc);
    }
    return lu_solve(lhs, rhs);
}

// Vectorized dense solve of G X M + sum_ev w (C^T C) X (v v^T) + lambda_a X = RHS.
// Row-major flattening: unknown (a, b) lives at index a * k + b.
struct FitSystemEvent {
    Vector c;  // basis row (or kernel-moment row), length r
    Vector v;  // co-factor product, length k
    double w = 1.0;
    bool c_is_rank_one = true;  // false: the quadratic term uses G instead of c c^T
};

inline Matrix fit_solve_vectorized(const Matrix& m_right, const std::vector<FitSystemEvent>& events,
                                   const Matrix& rhs, double lambda_a, int r, int k) {
    const int dim = r * k;
    Matrix t = Matrix::Zero(dim, dim);
    Vector vec_rhs(dim);
    for (int a = 0; a < r; ++a) {
        for (int b = 0; b < k; ++b) {
            const int row = a * k + b;
            vec_rhs[row] = rhs(a, b);
            for (int c = 0; c < r; ++c) {
                for (int d = 0; d < k; ++d) {
                    const int col = c * k + d;
                    double val = analytic_g(a, c) * m_right(d, b);
                    for (const FitSystemEvent& ev : events) {
                        const double quad =
                            ev.c_is_rank_one ? ev.c[a] * ev.c[c] : analytic_g(a, c);
                        val += ev.w * quad * ev.v[d] * ev.v[b];
                    }
                    if (row == col) val += lambda_a;
                    t(row, col) = val;
                }
            }
        }
    }
    const Vector solution = lu_solve(t, vec_rhs);
    Matrix x(r, k);
    for (int a = 0; a < r; ++a) {
        for (int b = 0; b < k; ++b) {
            x(a, b) = solution[a * k + b];
        }
    }
    return x;
}

// -- dense loss oracles ------------------------------------------------------

inline double wmf_dense_loss(const tempo::FactorModel& m, const EventLog& log) {
    const Matrix w = dense_weights_matrix(log, m.cfg.alpha, m.cfg.half_life_days);
    double loss = 0.0;
    for (int u = 0; u < log.n_users(); ++u) {
        for (int i = 0; i < log.n_items(); ++i) {
            const double pred = m.P.row(u).dot(m.Q.row(i));
            if (w(u, i) > 0.0) loss += w(u, i) * (1.0 - pred) * (1.0 - pred);
            loss += pred * pred;
        }
    }
    loss += m.cfg.lambda * (m.P.squaredNorm() + m.Q.squaredNorm());
    return loss;
}

inline double ridge_to_default(const Matrix& f, bool ones) {
    double acc = 0.0;
    for (Eigen::Index i = 0; i < f.rows(); ++i) {
        for (Eigen::Index j = 0; j < f.cols(); ++j) {
            const double d = (ones ? 1.0 : 0.0) - f(i, j);
            acc += d * d;
        }
    }
    return acc;
}

inline double itals_dense_loss(const tempo::FactorModel& m, const EventLog& log) {
    const tempo::BinnedLog binned = tempo::bin_events(log, m.cfg.bin_days);
    const auto w = dense_weights_tensor(log, binned, m.cfg.alpha, m.cfg.half_life_days);
    double loss = 0.0;
    for (int b = 0; b < binned.n_bins; ++b) {
        for (int u = 0; u < log.n_users(); ++u) {
            for (int i = 0; i < log.n_items(); ++i) {
                const double pred =
                    m.P.row(u).cwiseProduct(m.Q.row(i)).dot(m.B.row(b));
                if (w[b](u, i) > 0.0) loss += w[b](u, i) * (1.0 - pred) * (1.0 - pred);
                loss += pred * pred / binned.n_bins;
            }
        }
    }
    loss += m.cfg.lambda * (ridge_to_default(m.P, m.cfg.default_user) +
                            ridge_to_default(m.Q, m.cfg.default_item) +
                            ridge_to_default(m.B, m.cfg.default_time));
    return loss;
}

inline double italsx_dense_loss(const tempo::FactorModel& m, const EventLog& log) {
    const tempo::BinnedLog binned = tempo::bin_events(log, m.cfg.bin_days);
    const auto w = dense_weights_tensor(log, binned, m.cfg.alpha, m.cfg.half_life_days);
    double loss = 0.0;
    for (int b = 0; b < binned.n_bins; ++b) {
        for (int u = 0; u < log.n_users(); ++u) {
            for (int i = 0; i < log.n_items(); ++i) {
                const double pred = m.P.row(u).dot(m.Q.row(i)) + m.P.row(u).dot(m.B.row(b)) +
                                    m.Q.row(i).dot(m.B.row(b));
                if (w[b](u, i) > 0.0) loss += w[b](u, i) * (1.0 - pred) * (1.0 - pred);
                loss += pred * pred / binned.n_bins;
            }
        }
    }
    loss += m.cfg.lambda *
            (m.P.squaredNorm() + m.Q.squaredNorm() + m.B.squaredNorm());
    return loss;
}

inline Matrix analytic_fit_gram(const Matrix& a) {
    Matrix ag = Matrix::Zero(a.cols(), a.cols());
    for (Eigen::Index i = 0; i < a.rows(); ++i) {
        ag += analytic_g(static_cast<int>(i), static_cast<int>(i)) * a.row(i).transpose() *
              a.row(i);
    }
    return ag;
}

inline double dtf_dense_loss(const tempo::FactorModel& m, const EventLog& log) {
    const auto times = normalized_times(log);
    const int r = m.cfg.r;
    double loss = 0.0;
    for (std::size_t e = 0; e < log.events().size(); ++e) {
        const Event& ev = log.events()[e];
        const Vector bt = m.A.transpose() * basis_row_closed(r, times[e]);
        const double pred = m.P.row(ev.user).cwiseProduct(m.Q.row(ev.item)).dot(bt.transpose());
        const double w = event_weight(log, ev, m.cfg.alpha, m.cfg.half_life_days);
        loss += w * (1.0 - pred) * (1.0 - pred);
    }
    const Matrix ag = analytic_fit_gram(m.A);
    for (int u = 0; u < log.n_users(); ++u) {
        for (int i = 0; i < log.n_items(); ++i) {
            const Vector v = m.P.row(u).cwiseProduct(m.Q.row(i)).transpose();
            loss += v.dot(ag * v);
        }
    }
    double fit_reg = 0.0;
    for (int d = 0; d < r; ++d) fit_reg += analytic_g(d, d) * m.A.row(d).squaredNorm();
    loss += m.cfg.lambda * (m.P.squaredNorm() + m.Q.squaredNorm() + fit_reg);
    loss += m.cfg.lambda_a * m.A.squaredNorm();
    return loss;
}

inline double dtf_kernel_dense_loss(const tempo::FactorModel& m, const EventLog& log) {
    const auto times = normalized_times(log);
    const int r = m.cfg.r;
    const Matrix ag = analytic_fit_gram(m.A);
    double loss = 0.0;
    for (std::size_t e = 0; e < log.events().size(); ++e) {
        const Event& ev = log.events()[e];
        const Vector v = m.P.row(ev.user).cwiseProduct(m.Q.row(ev.item)).transpose();
        const KernelIntegrals ki = kernel_integrals(r, times[e], m.cfg.sigma,
                                                    m.cfg.kernel_samples);
        const double w = event_weight(log, ev, m.cfg.alpha, m.cfg.half_life_days);
        loss += w * (ki.k2 - 2.0 * ki.kc.dot(m.A * v) + v.dot(ag * v));
    }
    for (int u = 0; u < log.n_users(); ++u) {
        for (int i = 0; i < log.n_items(); ++i) {
            const Vector v = m.P.row(u).cwiseProduct(m.Q.row(i)).transpose();
            loss += v.dot(ag * v);
        }
    }
    double fit_reg = 0.0;
    for (int d = 0; d < r; ++d) fit_reg += analytic_g(d, d) * m.A.row(d).squaredNorm();
    loss += m.cfg.lambda * (m.P.squaredNorm() + m.Q.squaredNorm() + fit_reg);
    loss += m.cfg.lambda_a * m.A.squaredNorm();
    return loss;
}

inline double dmf_dense_loss(const tempo::FactorModel& m, const EventLog& log) {
    const auto times = normalized_times(log);
    const int r = m.cfg.r;
    double loss = 0.0;
    for (std::size_t e = 0; e < log.events().size(); ++e) {
        const Event& ev = log.events()[e];
        const Vector qt =
            m.item_fits[ev.item].transpose() * basis_row_closed(r, times[e]);
        const double pred = m.P.row(ev.user).dot(qt.transpose());
        const double w = event_weight(log, ev, m.cfg.alpha, m.cfg.half_life_days);
        loss += w * (1.0 - pred) * (1.0 - pred);
    }
    double fit_reg = 0.0;
    double fit_sq = 0.0;
    for (int i = 0; i < static_cast<int>(m.item_fits.size()); ++i) {
        const Matrix ag = analytic_fit_gram(m.item_fits[i]);
        for (int u = 0; u < log.n_users(); ++u) {
            const Vector p = m.P.row(u).transpose();
            loss += p.dot(ag * p);
        }
        for (int d = 0; d < r; ++d) {
            fit_reg += analytic_g(d, d) * m.item_fits[i].row(d).squaredNorm();
        }
        fit_sq += m.item_fits[i].squaredNorm();
    }
    loss += m.cfg.lambda * (m.P.squaredNorm() + fit_reg);
    loss += m.cfg.lambda_a * fit_sq;
    return loss;
}

inline double dense_loss(const tempo::FactorModel& m, const EventLog& log) {
    switch (m.kind) {
        case tempo::ModelKind::WMF: return wmf_dense_loss(m, log);
        case tempo::ModelKind::ITALS: return itals_dense_loss(m, log);
        case tempo::ModelKind::ITALSX: return italsx_dense_loss(m, log);
        case tempo::ModelKind::DTF: return dtf_dense_loss(m, log);
        case tempo::ModelKind::DTF_KERNEL: return dtf_kernel_dense_loss(m, log);
        case tempo::ModelKind::DMF: return dmf_dense_loss(m, log);
        default: throw std::runtime_error("dense_loss: unsupported kind");
    }
}

}  // namespace oracle
