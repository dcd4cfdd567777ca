#include "shipprop/fusion.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace shipprop {

SquareMatrix SquareMatrix::identity(int n) {
    SquareMatrix m(n);
    for (int i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
}

namespace {

double off_diagonal_norm(const SquareMatrix& a) {
    double sum = 0.0;
    for (int r = 0; r < a.size(); ++r) {
        for (int c = 0; c < a.size(); ++c) {
            if (r != c) sum += a(r, c) * a(r, c);
        }
    }
    return std::sqrt(sum);
}

double frobenius_norm(const SquareMatrix& a) {
    double sum = 0.0;
    for (int r = 0; r < a.size(); ++r) {
        for (int c = 0; c < a.size(); ++c) sum += a(r, c) * a(r, c);
    }
    return std::sqrt(sum);
}

// Zeroes a(p, q) with one Jacobi rotation, accumulating it into v.
void rotate(SquareMatrix& a, SquareMatrix& v, int p, int q) {
    const double apq = a(p, q);
    if (apq == 0.0) return;
    const int n = a.size();
    const double theta = (a(q, q) - a(p, p)) / (2.0 * apq);
    const double t = std::copysign(1.0, theta) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
    const double c = 1.0 / std::sqrt(t * t + 1.0);
    const double s = t * c;

    for (int k = 0; k < n; ++k) {
        const double akp = a(k, p);
        const double akq = a(k, q);
        a(k, p) = c * akp - s * akq;
        a(k, q) = s * akp + c * akq;
    }
    for (int k = 0; k < n; ++k) {
        const double apk = a(p, k);
        const double aqk = a(q, k);
        a(p, k) = c * apk - s * aqk;
        a(q, k) = s * apk + c * aqk;
    }
    a(p, q) = 0.0;
    a(q, p) = 0.0;
    for (int k = 0; k < n; ++k) {
        const double vkp = v(k, p);
        const double vkq = v(k, q);
        v(k, p) = c * vkp - s * vkq;
        v(k, q) = s * vkp + c * vkq;
    }
}

}  // namespace

SymmetricEigen jacobi_eigen(const SquareMatrix& symmetric) {
    constexpr int kMaxSweeps = 100;
    const int n = symmetric.size();
    SquareMatrix a = symmetric;
    SquareMatrix v = SquareMatrix::identity(n);
    const double tol = 1e-12 * std::max(1.0, frobenius_norm(symmetric));

    SymmetricEigen result;
    while (result.sweeps < kMaxSweeps && off_diagonal_norm(a) >= tol) {
        for (int p = 0; p < n; ++p) {
            for (int q = p + 1; q < n; ++q) rotate(a, v, p, q);
        }
        ++result.sweeps;
    }

    std::vector<int> order(static_cast<std::size_t>(n));
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](int i, int j) { return a(i, i) > a(j, j); });
    for (int i : order) {
        result.values.push_back(a(i, i));
        std::vector<double> vec(static_cast<std::size_t>(n));
        for (int k = 0; k < n; ++k) vec[static_cast<std::size_t>(k)] = v(k, i);
        result.vectors.push_back(std::move(vec));
    }
    return result;
}

// ---------------------------------------------------------------------------

Band box_downsample(const Band& band, int scale) {
    if (scale < 1 || band.width() % scale != 0 || band.height() % scale != 0) {
        throw InputError("box downsample: dimensions not divisible by scale");
    }
    const int w = band.width() / scale;
    const int h = band.height() / scale;
    Band out(w, h);
    const double inv = 1.0 / (static_cast<double>(scale) * scale);
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            double sum = 0.0;
            for (int dy = 0; dy < scale; ++dy) {
                for (int dx = 0; dx < scale; ++dx) sum += band.at(x * scale + dx, y * scale + dy);
            }
            out.at(x, y) = sum * inv;
        }
    }
    return out;
}

Band bilinear_upsample(const Band& band, int scale) {
    if (scale < 1) throw InputError("upsample scale must be positive");
    const int w = band.width() * scale;
    const int h = band.height() * scale;
    Band out(w, h);
    auto source_coord = [scale](int i, int n) {
        const double s = (i + 0.5) / scale - 0.5;
        return std::clamp(s, 0.0, static_cast<double>(n - 1));
    };
    for (int y = 0; y < h; ++y) {
        const double sy = source_coord(y, band.height());
        const int y0 = static_cast<int>(std::floor(sy));
        const int y1 = std::min(y0 + 1, band.height() - 1);
        const double fy = sy - y0;
        for (int x = 0; x < w; ++x) {
            const double sx = source_coord(x, band.width());
            const int x0 = static_cast<int>(std::floor(sx));
            const int x1 = std::min(x0 + 1, band.width() - 1);
            const double fx = sx - x0;
            const double top = band.at(x0, y0) * (1 - fx) + band.at(x1, y0) * fx;
            const double bottom = band.at(x0, y1) * (1 - fx) + band.at(x1, y1) * fx;
            out.at(x, y) = top * (1 - fy) + bottom * fy;
        }
    }
    return out;
}

SyntheticPanFit fit_synthetic_pan(const Band& pan_low, const MultibandImage& ms) {
    if (pan_low.width() != ms.width() || pan_low.height() != ms.height()) {
        throw InputError("synthetic pan fit: dimension mismatch");
    }
    const int k = static_cast<int>(ms.band_count());
    const int n = k + 1;  // weights + intercept

    // Normal equations G c = r for the design [ms_1 .. ms_K, 1].
    SquareMatrix gram(n);
    std::vector<double> rhs(static_cast<std::size_t>(n), 0.0);
    std::vector<double> row(static_cast<std::size_t>(n), 1.0);
    for (std::size_t i = 0; i < pan_low.size(); ++i) {
        for (int b = 0; b < k; ++b) row[static_cast<std::size_t>(b)] = ms.band(static_cast<std::size_t>(b)).values()[i];
        const double target = pan_low.values()[i];
        for (int r = 0; r < n; ++r) {
            rhs[static_cast<std::size_t>(r)] += row[static_cast<std::size_t>(r)] * target;
            for (int c = 0; c < n; ++c) gram(r, c) += row[static_cast<std::size_t>(r)] * row[static_cast<std::size_t>(c)];
        }
    }

    // Gauss-Jordan with partial pivoting. Columns whose pivot vanishes are
    // linearly dependent on earlier ones; their coefficient is fixed at zero,
    // which still yields a least-squares minimiser.
    double scale = 0.0;
    for (int i = 0; i < n; ++i) scale = std::max(scale, std::abs(gram(i, i)));
    const double tol = 1e-12 * std::max(scale, 1e-300);
    std::vector<double> coef(static_cast<std::size_t>(n), 0.0);
    std::vector<int> pivot_row_of(static_cast<std::size_t>(n), -1);
    std::vector<bool> used(static_cast<std::size_t>(n), false);
    for (int col = 0; col < n; ++col) {
        int best = -1;
        double best_abs = tol;
        for (int r = 0; r < n; ++r) {
            if (!used[static_cast<std::size_t>(r)] && std::abs(gram(r, col)) > best_abs) {
                best = r;
                best_abs = std::abs(gram(r, col));
            }
        }
        if (best < 0) continue;
        used[static_cast<std::size_t>(best)] = true;
        pivot_row_of[static_cast<std::size_t>(col)] = best;
        for (int r = 0; r < n; ++r) {
            if (r == best) continue;
            const double f = gram(r, col) / gram(best, col);
            if (f == 0.0) continue;
            for (int c = 0; c < n; ++c) gram(r, c) -= f * gram(best, c);
            rhs[static_cast<std::size_t>(r)] -= f * rhs[static_cast<std::size_t>(best)];
        }
    }
    for (int col = 0; col < n; ++col) {
        const int r = pivot_row_of[static_cast<std::size_t>(col)];
        if (r >= 0) coef[static_cast<std::size_t>(col)] = rhs[static_cast<std::size_t>(r)] / gram(r, col);
    }

    SyntheticPanFit fit;
    fit.weights.assign(coef.begin(), coef.begin() + k);
    fit.intercept = coef.back();
    return fit;
}

MultibandImage pansharpen(const Band& pan, const MultibandImage& ms, int scale) {
    if (scale < 1) throw InputError("pan-sharpening scale must be >= 1");
    if (pan.width() != ms.width() * scale || pan.height() != ms.height() * scale) {
        throw InputError("pan-sharpening: pan must be exactly scale x the MS dimensions");
    }
    const double pan_max = *std::max_element(pan.values().begin(), pan.values().end());
    if (pan_max <= 0.0) throw DegenerateError("pan-sharpening is degenerate: pan band has no positive values");

    const Band pan_low = box_downsample(pan, scale);
    const SyntheticPanFit fit = fit_synthetic_pan(pan_low, ms);

    const double floor = 1e-6 * pan_max;
    Band synthetic(ms.width(), ms.height(), fit.intercept);
    for (std::size_t k = 0; k < ms.band_count(); ++k) {
        auto src = ms.band(k).values();
        auto dst = synthetic.values();
        for (std::size_t i = 0; i < dst.size(); ++i) dst[i] += fit.weights[k] * src[i];
    }
    for (double& v : synthetic.values()) v = std::max(v, floor);

    const Band synthetic_up = bilinear_upsample(synthetic, scale);
    std::vector<Band> out;
    out.reserve(ms.band_count());
    for (std::size_t k = 0; k < ms.band_count(); ++k) {
        Band up = bilinear_upsample(ms.band(k), scale);
        auto v = up.values();
        for (std::size_t i = 0; i < v.size(); ++i) {
            v[i] = v[i] * pan.values()[i] / std::max(synthetic_up.values()[i], floor);
        }
        out.push_back(std::move(up));
    }
    return MultibandImage(std::move(out), ms.roles());
}

// ---------------------------------------------------------------------------

double first_quartile(std::vector<double> values) {
    if (values.empty()) throw InputError("quartile of an empty set");
    std::sort(values.begin(), values.end());
    const double rank = 0.25 * static_cast<double>(values.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(rank));
    const std::size_t hi = std::min(lo + 1, values.size() - 1);
    const double frac = rank - static_cast<double>(lo);
    return values[lo] + frac * (values[hi] - values[lo]);
}

ContrastReport contrast_report(const Band& band, const BinaryMask& ship_mask, const BinaryMask& background_mask,
                               std::string band_role) {
    if (ship_mask.width() != band.width() || ship_mask.height() != band.height() ||
        background_mask.width() != band.width() || background_mask.height() != band.height()) {
        throw InputError("contrast report: mask dimensions differ from band");
    }
    std::vector<double> ship;
    double bg_sum = 0.0;
    std::size_t bg_count = 0;
    for (std::size_t i = 0; i < band.size(); ++i) {
        const bool s = ship_mask.bits()[i] != 0;
        const bool b = background_mask.bits()[i] != 0;
        if (s && b) throw InputError("contrast report: ship and background masks overlap");
        const double v = band.values()[i];
        if ((s || b) && v <= 0.0) throw InputError("contrast report: masked values must be positive");
        if (s) ship.push_back(v);
        if (b) {
            bg_sum += v;
            ++bg_count;
        }
    }
    if (ship.empty()) throw InputError("contrast report: empty ship mask");
    if (bg_count == 0) throw InputError("contrast report: empty background mask");

    ContrastReport r;
    r.band_role = std::move(band_role);
    r.m_t = std::accumulate(ship.begin(), ship.end(), 0.0) / static_cast<double>(ship.size());
    r.q1_t = first_quartile(std::move(ship));
    r.m_b = bg_sum / static_cast<double>(bg_count);
    if (r.m_b <= 0.0) throw DegenerateError("contrast report: non-positive background mean");
    r.c_m = r.m_t / r.m_b;
    r.c_q1 = r.q1_t / r.m_b;
    return r;
}

// ---------------------------------------------------------------------------

PcaModel fit_pca(const MultibandImage& image) {
    const int k = static_cast<int>(image.band_count());
    const std::size_t n = image.band(0).size();
    const double inv_n = 1.0 / static_cast<double>(n);

    PcaModel model;
    model.mean.resize(static_cast<std::size_t>(k));
    for (int b = 0; b < k; ++b) {
        auto v = image.band(static_cast<std::size_t>(b)).values();
        model.mean[static_cast<std::size_t>(b)] = std::accumulate(v.begin(), v.end(), 0.0) * inv_n;
    }

    SquareMatrix cov(k);
    for (int r = 0; r < k; ++r) {
        auto vr = image.band(static_cast<std::size_t>(r)).values();
        const double mr = model.mean[static_cast<std::size_t>(r)];
        for (int c = r; c < k; ++c) {
            auto vc = image.band(static_cast<std::size_t>(c)).values();
            const double mc = model.mean[static_cast<std::size_t>(c)];
            double sum = 0.0;
            for (std::size_t i = 0; i < n; ++i) sum += (vr[i] - mr) * (vc[i] - mc);
            cov(r, c) = sum * inv_n;
            cov(c, r) = cov(r, c);
        }
    }

    SymmetricEigen eig = jacobi_eigen(cov);
    // Covariance is positive semidefinite; negatives are rounding residue.
    for (double& lambda : eig.values) lambda = std::max(lambda, 0.0);
    for (auto& vec : eig.vectors) {
        std::size_t lead = 0;
        for (std::size_t i = 1; i < vec.size(); ++i) {
            if (std::abs(vec[i]) > std::abs(vec[lead])) lead = i;
        }
        if (vec[lead] < 0.0) {
            for (double& x : vec) x = -x;
        }
    }

    model.eigenvalues = std::move(eig.values);
    model.eigenvectors = std::move(eig.vectors);
    model.covariance = std::move(cov);
    return model;
}

Band first_component(const MultibandImage& image, const PcaModel& model) {
    if (model.dimension() != image.band_count()) {
        throw InputError("PCA model dimension does not match band count");
    }
    const auto& e1 = model.eigenvectors.front();
    Band out(image.width(), image.height());
    auto dst = out.values();
    for (std::size_t b = 0; b < image.band_count(); ++b) {
        auto src = image.band(b).values();
        for (std::size_t i = 0; i < dst.size(); ++i) dst[i] += e1[b] * src[i];
    }
    return out;
}

}  // namespace shipprop
