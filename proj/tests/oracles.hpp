#pragma once

// Independent reference implementations used only by tests. Nothing here
// calls into the code path it is meant to check.

#include <cmath>
#include <deque>
#include <limits>
#include <map>
#include <random>
#include <vector>

#include "lccount/fcn.hpp"
#include "lccount/grid.hpp"
#include "lccount/loss.hpp"

namespace lccount::oracle {

/// Breadth-first flood fill, 8-connectivity, labels in raster order of seeds.
inline LabelGrid flood_fill(const BinaryMask& mask) {
    LabelGrid out(mask.height(), mask.width(), 0);
    int next = 0;
    for (int r = 0; r < mask.height(); ++r) {
        for (int c = 0; c < mask.width(); ++c) {
            if (!mask(r, c) || out(r, c)) continue;
            ++next;
            std::deque<std::pair<int, int>> q{{r, c}};
            out(r, c) = next;
            while (!q.empty()) {
                auto [y, x] = q.front();
                q.pop_front();
                for (int dy = -1; dy <= 1; ++dy)
                    for (int dx = -1; dx <= 1; ++dx) {
                        const int yy = y + dy, xx = x + dx;
                        if (mask.contains(yy, xx) && mask(yy, xx) && !out(yy, xx)) {
                            out(yy, xx) = next;
                            q.emplace_back(yy, xx);
                        }
                    }
            }
        }
    }
    return out;
}

/// True when two label grids induce the same partition (0 must map to 0).
inline bool same_partition(const LabelGrid& a, const LabelGrid& b) {
    if (a.height() != b.height() || a.width() != b.width()) return false;
    std::map<int, int> ab, ba;
    for (std::size_t i = 0; i < a.size(); ++i) {
        if ((a[i] == 0) != (b[i] == 0)) return false;
        auto [it1, new1] = ab.emplace(a[i], b[i]);
        auto [it2, new2] = ba.emplace(b[i], a[i]);
        if (it1->second != b[i] || it2->second != a[i]) return false;
    }
    return true;
}

/// All-pairs Euclidean distance to the nearest false pixel; H + W when the
/// mask has no false pixel.
inline Grid<double> brute_force_distance(const BinaryMask& mask) {
    Grid<double> out(mask.height(), mask.width(), 0.0);
    for (int r = 0; r < mask.height(); ++r)
        for (int c = 0; c < mask.width(); ++c) {
            if (!mask(r, c)) continue;
            double best = mask.height() + mask.width();
            for (int y = 0; y < mask.height(); ++y)
                for (int x = 0; x < mask.width(); ++x)
                    if (!mask(y, x)) best = std::min(best, std::hypot(double(r - y), double(c - x)));
            out(r, c) = best;
        }
    return out;
}

/// Central finite differences of the plan-frozen loss w.r.t. every logit.
inline Volume<double> finite_difference_gradient(const LogitMap& logits, const LossPlan& plan, double h) {
    Volume<double> base = logits.values();
    Volume<double> grad(base.height(), base.width(), base.channels(), 0.0);
    for (std::size_t i = 0; i < base.size(); ++i) {
        Volume<double> plus = base, minus = base;
        plus.values()[i] += h;
        minus.values()[i] -= h;
        const double fp = evaluate_loss(softmax(LogitMap(plus)), plan).total;
        const double fm = evaluate_loss(softmax(LogitMap(minus)), plan).total;
        grad.values()[i] = (fp - fm) / (2.0 * h);
    }
    return grad;
}

/// |a - b| / max(|a|, |b|, floor): relative error with an absolute floor so
/// entries that are numerically zero do not dominate.
inline double relative_error(double a, double b, double floor = 1e-3) {
    return std::abs(a - b) / std::max({std::abs(a), std::abs(b), floor});
}

// Nearest integer to a / b for b > 0, ties away from zero, via remainders.
inline int nearest(long a, long b) {
    long q = a / b, r = a % b;
    if (r < 0) {
        q -= 1;
        r += b;
    }
    // a / b = q + r / b with 0 <= r < b
    if (2 * r > b || (2 * r == b && q >= 0)) ++q;
    return static_cast<int>(q);
}

/// Independent enumeration of line-split candidate segments (pixel lists)
/// for one pair inside blob `id`.
inline std::vector<std::vector<std::pair<int, int>>> line_candidates(const LabelGrid& labels, int id, Point p,
                                                                      Point q) {
    std::vector<std::vector<std::pair<int, int>>> out;
    const long dy = q.row - p.row, dx = q.col - p.col;
    const long n = std::max(std::abs(dy), std::abs(dx));
    const auto in_blob = [&](int y, int x) { return labels.contains(y, x) && labels(y, x) == id; };
    for (long k = 1; k < n; ++k) {
        const int cy = nearest(p.row * n + dy * k, n);
        const int cx = nearest(p.col * n + dx * k, n);
        if (!in_blob(cy, cx)) continue;
        std::vector<std::pair<int, int>> seg;
        // walk the negative side first, collecting in reverse
        std::vector<std::pair<int, int>> neg;
        for (long t = 1;; ++t) {
            const int y = nearest(cy * n + t * dx, n);
            const int x = nearest(cx * n - t * dy, n);
            if (!in_blob(y, x)) break;
            neg.emplace_back(y, x);
        }
        seg.insert(seg.end(), neg.rbegin(), neg.rend());
        seg.emplace_back(cy, cx);
        for (long t = 1;; ++t) {
            const int y = nearest(cy * n - t * dx, n);
            const int x = nearest(cx * n + t * dy, n);
            if (!in_blob(y, x)) break;
            seg.emplace_back(y, x);
        }
        out.push_back(std::move(seg));
    }
    return out;
}

inline double mean_background(const ProbMap& s, const std::vector<std::pair<int, int>>& seg) {
    double sum = 0.0;
    for (auto [y, x] : seg) sum += s(y, x, 0);
    return sum / static_cast<double>(seg.size());
}

/// Central difference of f(params) w.r.t. one parameter entry.
template <class F>
double parameter_difference(FcnParams<double> params, std::size_t block, std::size_t index, double h, F&& f) {
    const double base = params.blocks[block].values[index];
    params.blocks[block].values[index] = base + h;
    const double fp = f(params);
    params.blocks[block].values[index] = base - h;
    const double fm = f(params);
    return (fp - fm) / (2.0 * h);
}

/// sum(logits * upstream), the scalar whose gradient `backward` returns.
inline double logit_inner_product(const FcnParams<double>& params, const InputImage& image,
                                  const Volume<double>& upstream) {
    const LogitMap z = forward(params, image);
    double sum = 0.0;
    for (std::size_t i = 0; i < upstream.size(); ++i) sum += z.values().values()[i] * upstream.values()[i];
    return sum;
}

inline InputImage random_image(std::mt19937_64& rng, int channels, int h, int w) {
    std::uniform_real_distribution<float> u(0.0f, 1.0f);
    InputImage img(channels, h, w);
    for (float& v : img.data) v = u(rng);
    return img;
}

// -- random instance helpers -------------------------------------------------

inline BinaryMask random_mask(std::mt19937_64& rng, int h, int w, double density) {
    std::bernoulli_distribution on(density);
    BinaryMask m(h, w, 0);
    for (auto& v : m.values()) v = on(rng) ? 1 : 0;
    return m;
}

inline LogitMap random_logits(std::mt19937_64& rng, int h, int w, int classes, double scale) {
    std::uniform_real_distribution<double> u(-scale, scale);
    Volume<double> v(h, w, classes);
    for (auto& x : v.values()) x = u(rng);
    return LogitMap(std::move(v));
}

/// Up to `max_points` distinct random annotations with classes in [1, classes).
inline PointAnnotations random_points(std::mt19937_64& rng, int h, int w, int classes, int max_points) {
    std::uniform_int_distribution<int> count(0, max_points);
    std::uniform_int_distribution<int> row(0, h - 1), col(0, w - 1), cls(1, classes - 1);
    std::vector<Point> pts;
    const int n = count(rng);
    for (int i = 0; i < n * 4 && static_cast<int>(pts.size()) < n; ++i) {
        Point p{row(rng), col(rng), cls(rng)};
        bool dup = false;
        for (const Point& q : pts) dup |= (q.row == p.row && q.col == p.col);
        if (!dup) pts.push_back(p);
    }
    return PointAnnotations(h, w, std::move(pts));
}

inline ProbMap probmap_from(int h, int w, int classes, const std::vector<double>& values) {
    Volume<double> v(h, w, classes);
    std::copy(values.begin(), values.end(), v.values().begin());
    return ProbMap(std::move(v));
}

/// Two-class map with the given per-pixel background probabilities.
inline ProbMap background_map(const Grid<double>& bg) {
    Volume<double> v(bg.height(), bg.width(), 2);
    for (int r = 0; r < bg.height(); ++r)
        for (int c = 0; c < bg.width(); ++c) {
            v(r, c, 0) = bg(r, c);
            v(r, c, 1) = 1.0 - bg(r, c);
        }
    return ProbMap(std::move(v));
}

}  // namespace lccount::oracle
