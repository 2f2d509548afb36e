#pragma once

// Connected-component labeling and blob/annotation bookkeeping.

#include <cmath>
#include <numeric>
#include <optional>
#include <vector>

#include "lccount/grid.hpp"

namespace lccount {

namespace detail {

// Union-find over provisional labels; the smaller root wins so that
// resolved labels keep raster order.
class LabelEquivalence {
public:
    int make() {
        parent_.push_back(static_cast<int>(parent_.size()));
        return parent_.back();
    }
    int find(int x) {
        int root = x;
        while (parent_[root] != root) root = parent_[root];
        while (parent_[x] != root) {
            int next = parent_[x];
            parent_[x] = root;
            x = next;
        }
        return root;
    }
    int unite(int a, int b) {
        a = find(a);
        b = find(b);
        if (a == b) return a;
        if (b < a) std::swap(a, b);
        parent_[b] = a;
        return a;
    }
    std::size_t size() const { return parent_.size(); }

private:
    std::vector<int> parent_;
};

}  // namespace detail

struct Blob {
    int id = 0;
    int pixel_count = 0;
    std::vector<Point> points;  // annotations falling inside the blob
};

/// Label grid for one mask (0 = outside every blob, 1..K = blob id) plus
/// per-blob pixel counts and annotation lists.
class BlobLabeling {
public:
    BlobLabeling() = default;
    BlobLabeling(LabelGrid labels, std::vector<Blob> blobs)
        : labels_(std::move(labels)), blobs_(std::move(blobs)) {}

    const LabelGrid& labels() const { return labels_; }
    int height() const { return labels_.height(); }
    int width() const { return labels_.width(); }
    int count() const { return static_cast<int>(blobs_.size()); }

    const std::vector<Blob>& blobs() const { return blobs_; }
    const Blob& blob(int id) const { return blobs_.at(static_cast<std::size_t>(id - 1)); }
    int label_at(int row, int col) const { return labels_(row, col); }

    /// Annotations that landed on a pixel outside every blob.
    const std::vector<Point>& unmatched_points() const { return unmatched_; }

    std::vector<int> singleton_ids() const { return ids_where([](int n) { return n == 1; }); }
    /// Blobs holding two or more annotations.
    std::vector<int> multi_ids() const { return ids_where([](int n) { return n >= 2; }); }
    /// Blobs holding no annotation.
    std::vector<int> false_positive_ids() const { return ids_where([](int n) { return n == 0; }); }

    /// Pixel indices (row * width + col) for each blob, indexed by id - 1.
    std::vector<std::vector<int>> pixels_by_blob() const {
        std::vector<std::vector<int>> out(blobs_.size());
        for (auto& v : out) v.reserve(16);
        for (std::size_t i = 0; i < labels_.size(); ++i)
            if (labels_[i] > 0) out[static_cast<std::size_t>(labels_[i] - 1)].push_back(static_cast<int>(i));
        return out;
    }

private:
    friend BlobLabeling assign_points(const BlobLabeling&, const PointAnnotations&,
                                      std::optional<ClassId>);

    template <class Pred>
    std::vector<int> ids_where(Pred pred) const {
        std::vector<int> out;
        for (const Blob& b : blobs_)
            if (pred(static_cast<int>(b.points.size()))) out.push_back(b.id);
        return out;
    }

    LabelGrid labels_;
    std::vector<Blob> blobs_;
    std::vector<Point> unmatched_;
};

/// Two-pass union-find labeling with 8-connectivity. Ids are dense and
/// ordered by each blob's first pixel in raster order.
inline BlobLabeling connected_components(const BinaryMask& mask) {
    const int h = mask.height();
    const int w = mask.width();
    LabelGrid provisional(h, w, -1);
    detail::LabelEquivalence eq;

    // First pass: the four already-visited neighbours under 8-connectivity.
    constexpr int kPrior[4][2] = {{-1, -1}, {-1, 0}, {-1, 1}, {0, -1}};
    for (int r = 0; r < h; ++r) {
        for (int c = 0; c < w; ++c) {
            if (!mask(r, c)) continue;
            int label = -1;
            for (const auto& d : kPrior) {
                const int rr = r + d[0];
                const int cc = c + d[1];
                if (!mask.contains(rr, cc)) continue;
                const int n = provisional(rr, cc);
                if (n < 0) continue;
                label = label < 0 ? eq.find(n) : eq.unite(label, n);
            }
            provisional(r, c) = label < 0 ? eq.make() : label;
        }
    }

    // Second pass: resolve equivalences and compact to 1..K.
    std::vector<int> dense(eq.size(), 0);
    std::vector<Blob> blobs;
    LabelGrid labels(h, w, 0);
    for (std::size_t i = 0; i < provisional.size(); ++i) {
        if (provisional[i] < 0) continue;
        const int root = eq.find(provisional[i]);
        if (dense[root] == 0) {
            blobs.push_back(Blob{static_cast<int>(blobs.size()) + 1, 0, {}});
            dense[root] = blobs.back().id;
        }
        labels[i] = dense[root];
        ++blobs[static_cast<std::size_t>(dense[root] - 1)].pixel_count;
    }
    return BlobLabeling(std::move(labels), std::move(blobs));
}

/// Attaches annotations to the blobs they fall in. With `only_class`, points
/// of other classes are ignored entirely.
inline BlobLabeling assign_points(const BlobLabeling& blobs, const PointAnnotations& t,
                                  std::optional<ClassId> only_class = std::nullopt) {
    if (!blobs.labels().same_shape(t.height(), t.width()))
        throw InvalidInput("annotation dimensions do not match blob labeling");
    BlobLabeling out = blobs;
    for (Blob& b : out.blobs_) b.points.clear();
    out.unmatched_.clear();
    for (const Point& p : t.points()) {
        if (only_class && p.cls != *only_class) continue;
        const int id = out.labels_(p.row, p.col);
        if (id == 0)
            out.unmatched_.push_back(p);
        else
            out.blobs_[static_cast<std::size_t>(id - 1)].points.push_back(p);
    }
    return out;
}

/// Per-blob pixel centroid, rounded half-up and clamped to the image. The
/// centre of a non-convex blob may fall outside the blob itself.
inline std::vector<Point> blob_centers(const BlobLabeling& blobs, ClassId cls = 1) {
    const int n = blobs.count();
    std::vector<double> row_sum(static_cast<std::size_t>(n), 0.0);
    std::vector<double> col_sum(static_cast<std::size_t>(n), 0.0);
    std::vector<int> count(static_cast<std::size_t>(n), 0);
    const LabelGrid& labels = blobs.labels();
    for (int r = 0; r < labels.height(); ++r) {
        for (int c = 0; c < labels.width(); ++c) {
            const int id = labels(r, c);
            if (id == 0) continue;
            row_sum[id - 1] += r;
            col_sum[id - 1] += c;
            ++count[id - 1];
        }
    }
    std::vector<Point> out;
    out.reserve(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        const auto round_half_up = [](double x) { return static_cast<int>(std::floor(x + 0.5)); };
        int r = round_half_up(row_sum[i] / count[i]);
        int c = round_half_up(col_sum[i] / count[i]);
        r = std::clamp(r, 0, labels.height() - 1);
        c = std::clamp(c, 0, labels.width() - 1);
        out.push_back(Point{r, c, cls});
    }
    return out;
}

}  // namespace lccount
