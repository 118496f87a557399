#include "gjrvol/optimize.hpp"

#include "gjrvol/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace gjrvol::opt {

namespace {

struct Simplex {
    std::vector<std::vector<double>> x;
    std::vector<double> f;
};

void order(Simplex& s) {
    std::vector<std::size_t> idx(s.f.size());
    std::iota(idx.begin(), idx.end(), 0);
    // stable keeps ties in insertion order, so runs are reproducible
    std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return s.f[a] < s.f[b]; });
    Simplex out;
    out.x.reserve(idx.size());
    out.f.reserve(idx.size());
    for (auto i : idx) {
        out.x.push_back(std::move(s.x[i]));
        out.f.push_back(s.f[i]);
    }
    s = std::move(out);
}

double diameter(const Simplex& s) {
    double d = 0.0;
    for (std::size_t v = 1; v < s.x.size(); ++v) {
        for (std::size_t i = 0; i < s.x[v].size(); ++i) d = std::max(d, std::abs(s.x[v][i] - s.x[0][i]));
    }
    return d;
}

}  // namespace

NelderMeadResult nelder_mead(const Objective& f, std::vector<double> x0, const std::vector<double>& steps,
                             const NelderMeadOptions& options) {
    const std::size_t n = x0.size();
    NelderMeadResult res;
    auto eval = [&](const std::vector<double>& x) {
        ++res.evaluations;
        const double v = f(x);
        return std::isnan(v) ? std::numeric_limits<double>::infinity() : v;
    };

    res.x = std::move(x0);
    res.f = eval(res.x);
    if (!std::isfinite(res.f) || n == 0) {
        res.converged = std::isfinite(res.f);
        return res;
    }

    for (std::size_t restart = 0; restart <= options.max_restarts; ++restart) {
        Simplex s;
        s.x.push_back(res.x);
        s.f.push_back(res.f);
        for (std::size_t i = 0; i < n; ++i) {
            auto v = res.x;
            v[i] += steps[i];
            double fv = eval(v);
            if (!std::isfinite(fv)) {
                v[i] = res.x[i] - steps[i];
                fv = eval(v);
            }
            s.x.push_back(std::move(v));
            s.f.push_back(fv);
        }

        bool converged = false;
        std::vector<double> centroid(n), xr(n), xe(n), xc(n);
        while (res.iterations < options.max_iterations) {
            order(s);
            if (s.f[n] - s.f[0] < options.f_tolerance && diameter(s) < options.x_tolerance) {
                converged = true;
                break;
            }
            ++res.iterations;

            std::fill(centroid.begin(), centroid.end(), 0.0);
            for (std::size_t v = 0; v < n; ++v) {
                for (std::size_t i = 0; i < n; ++i) centroid[i] += s.x[v][i];
            }
            for (auto& c : centroid) c /= static_cast<double>(n);

            for (std::size_t i = 0; i < n; ++i) xr[i] = centroid[i] + (centroid[i] - s.x[n][i]);
            const double fr = eval(xr);

            if (fr < s.f[0]) {
                for (std::size_t i = 0; i < n; ++i) xe[i] = centroid[i] + 2.0 * (xr[i] - centroid[i]);
                const double fe = eval(xe);
                if (fe < fr) {
                    s.x[n] = xe;
                    s.f[n] = fe;
                } else {
                    s.x[n] = xr;
                    s.f[n] = fr;
                }
            } else if (fr < s.f[n - 1]) {
                s.x[n] = xr;
                s.f[n] = fr;
            } else {
                const bool outside = fr < s.f[n];
                const auto& toward = outside ? xr : s.x[n];
                for (std::size_t i = 0; i < n; ++i) xc[i] = centroid[i] + 0.5 * (toward[i] - centroid[i]);
                const double fc = eval(xc);
                if (fc < (outside ? fr : s.f[n])) {
                    s.x[n] = xc;
                    s.f[n] = fc;
                } else {
                    for (std::size_t v = 1; v <= n; ++v) {
                        for (std::size_t i = 0; i < n; ++i) s.x[v][i] = s.x[0][i] + 0.5 * (s.x[v][i] - s.x[0][i]);
                        s.f[v] = eval(s.x[v]);
                    }
                }
            }
            if (options.record_trace) {
                const double best = *std::min_element(s.f.begin(), s.f.end());
                res.trace.push_back(std::min(best, res.f));
            }
        }
        order(s);

        const double improvement = res.f - s.f[0];
        if (s.f[0] < res.f) {
            res.x = s.x[0];
            res.f = s.f[0];
        }
        res.converged = converged;
        if (!converged || improvement < options.f_tolerance) break;
    }
    return res;
}

Eigen::MatrixXd numerical_hessian(const Objective& f, const std::vector<double>& x, const std::vector<double>& steps) {
    const std::size_t n = x.size();
    Eigen::MatrixXd h(n, n);
    const double f0 = f(x);
    auto at = [&](std::size_t i, double di, std::size_t j, double dj) {
        auto y = x;
        y[i] += di;
        y[j] += dj;
        return f(y);
    };
    for (std::size_t i = 0; i < n; ++i) {
        const double hi = steps[i];
        auto up = x;
        auto dn = x;
        up[i] += hi;
        dn[i] -= hi;
        h(i, i) = (f(up) - 2.0 * f0 + f(dn)) / (hi * hi);
        for (std::size_t j = 0; j < i; ++j) {
            const double hj = steps[j];
            const double v = (at(i, hi, j, hj) - at(i, hi, j, -hj) - at(i, -hi, j, hj) + at(i, -hi, j, -hj)) /
                             (4.0 * hi * hj);
            h(i, j) = v;
            h(j, i) = v;
        }
    }
    return h;
}

CovarianceResult covariance_from_hessian(const Eigen::MatrixXd& hessian) {
    if (!hessian.allFinite()) throw Error(ErrorCode::SingularHessian, "Hessian has non-finite entries");
    const Eigen::MatrixXd sym = 0.5 * (hessian + hessian.transpose());
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(sym);
    if (eig.info() != Eigen::Success) throw Error(ErrorCode::SingularHessian, "eigen-decomposition failed");
    Eigen::VectorXd lambda = eig.eigenvalues();
    const double top = lambda.maxCoeff();
    if (!(top > 0.0)) throw Error(ErrorCode::SingularHessian, "Hessian has no positive eigenvalue");

    CovarianceResult out;
    const double floor = top * 1e-10;
    for (Eigen::Index i = 0; i < lambda.size(); ++i) {
        if (lambda(i) < floor) {
            lambda(i) = floor;
            out.repaired = true;
        }
    }
    const Eigen::MatrixXd& v = eig.eigenvectors();
    out.covariance = v * lambda.cwiseInverse().asDiagonal() * v.transpose();
    return out;
}

}  // namespace gjrvol::opt
