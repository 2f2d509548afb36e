#pragma once

// Counting and localisation metrics: MAE, GAME(L), blob F-Score and the
// mRMSE family for multi-class counting.

#include <cmath>
#include <cstdlib>
#include <vector>

#include "lccount/blobs.hpp"
#include "lccount/grid.hpp"

namespace lccount {

/// Per-image evaluation inputs. Count vectors are indexed by class (entry 0,
/// background, is unused); `blob_tallies[c - 1]` lists, for each predicted
/// class-c blob, how many class-c annotations it contains.
struct EvalRecord {
    int height = 0;
    int width = 0;
    std::vector<int> true_counts;
    std::vector<int> predicted_counts;
    std::vector<Point> truth;
    std::vector<Point> centers;
    std::vector<std::vector<int>> blob_tallies;

    int classes() const { return static_cast<int>(true_counts.size()); }
};

/// Builds a record from annotations and per-class predicted blobs
/// (`blobs[c - 1]` for class c; points need not be assigned).
inline EvalRecord make_record(const PointAnnotations& truth, const std::vector<BlobLabeling>& blobs) {
    const int classes = static_cast<int>(blobs.size()) + 1;
    EvalRecord rec;
    rec.height = truth.height();
    rec.width = truth.width();
    rec.true_counts.assign(static_cast<std::size_t>(classes), 0);
    rec.predicted_counts.assign(static_cast<std::size_t>(classes), 0);
    rec.truth = truth.points();
    for (const Point& p : truth.points()) {
        if (p.cls >= classes) throw InvalidInput("annotation class exceeds predicted class count");
        ++rec.true_counts[p.cls];
    }
    for (int c = 1; c < classes; ++c) {
        const BlobLabeling assigned = assign_points(blobs[c - 1], truth, c);
        rec.predicted_counts[c] = assigned.count();
        std::vector<int> tallies;
        for (const Blob& b : assigned.blobs()) tallies.push_back(static_cast<int>(b.points.size()));
        rec.blob_tallies.push_back(std::move(tallies));
        for (const Point& center : blob_centers(assigned, c)) rec.centers.push_back(center);
    }
    return rec;
}

namespace detail {

inline void require_records(const std::vector<EvalRecord>& records) {
    if (records.empty()) throw InvalidInput("metric needs at least one record");
    const int classes = records.front().classes();
    for (const EvalRecord& r : records) {
        if (r.classes() != classes || static_cast<int>(r.predicted_counts.size()) != classes)
            throw InvalidInput("records disagree on the number of classes");
        for (int c = 0; c < classes; ++c)
            if (r.true_counts[c] < 0 || r.predicted_counts[c] < 0) throw InvalidInput("negative count in record");
    }
}

inline void require_single_class(const std::vector<EvalRecord>& records) {
    require_records(records);
    if (records.front().classes() != 2) throw InvalidInput("metric expects single-class records");
}

}  // namespace detail

/// Mean absolute count error, single-class.
inline double mae(const std::vector<EvalRecord>& records) {
    detail::require_single_class(records);
    double sum = 0.0;
    for (const EvalRecord& r : records) sum += std::abs(r.predicted_counts[1] - r.true_counts[1]);
    return sum / static_cast<double>(records.size());
}

/// Index of the GAME cell containing coordinate x along an axis of length
/// `extent` at `level`: the axis is halved recursively, the later half taking
/// the odd pixel, so cells at level L + 1 nest inside cells at level L.
inline int game_cell(int x, int extent, int level) {
    int lo = 0, hi = extent, idx = 0;
    for (int l = 0; l < level; ++l) {
        const int mid = lo + (hi - lo) / 2;
        idx *= 2;
        if (x < mid) {
            hi = mid;
        } else {
            lo = mid;
            ++idx;
        }
    }
    return idx;
}

/// Grid average mean absolute error over a 2^L x 2^L partition, counting
/// predicted blob centres against annotations per cell. Single-class.
inline double game(const std::vector<EvalRecord>& records, int level) {
    if (level < 0 || level > 12) throw InvalidInput("GAME level must be in [0, 12]");
    detail::require_single_class(records);
    const int n = 1 << level;
    double total = 0.0;
    for (const EvalRecord& r : records) {
        std::vector<int> diff(static_cast<std::size_t>(n) * n, 0);
        const auto cell = [&](const Point& p) {
            return static_cast<std::size_t>(game_cell(p.row, r.height, level)) * n +
                   static_cast<std::size_t>(game_cell(p.col, r.width, level));
        };
        for (const Point& p : r.centers) ++diff[cell(p)];
        for (const Point& p : r.truth) --diff[cell(p)];
        long err = 0;
        for (int d : diff) err += std::abs(d);
        total += static_cast<double>(err);
    }
    return total / static_cast<double>(records.size());
}

struct DetectionCounts {
    long tp = 0;
    long fp = 0;
    long fn = 0;
};

/// 2TP / (2TP + FP + FN); 1.0 when there is nothing to find and nothing found.
inline double fscore(const DetectionCounts& c) {
    const long denom = 2 * c.tp + c.fp + c.fn;
    if (denom == 0) return 1.0;
    return 2.0 * static_cast<double>(c.tp) / static_cast<double>(denom);
}

/// Aggregate TP/FP/FN for one class: a blob with at least one annotation is
/// a single TP, an empty blob an FP, and FN = annotations - TP.
inline DetectionCounts detection_counts(const std::vector<EvalRecord>& records, ClassId cls) {
    DetectionCounts out;
    long points = 0;
    for (const EvalRecord& r : records) {
        points += r.true_counts.at(cls);
        for (int tally : r.blob_tallies.at(static_cast<std::size_t>(cls - 1)))
            (tally > 0 ? out.tp : out.fp) += 1;
    }
    out.fn = points - out.tp;
    return out;
}

/// Blob-localisation F-Score, per class and averaged over object classes.
inline double fscore(const std::vector<EvalRecord>& records) {
    detail::require_records(records);
    const int classes = records.front().classes();
    double sum = 0.0;
    for (int c = 1; c < classes; ++c) sum += fscore(detection_counts(records, c));
    return sum / static_cast<double>(classes - 1);
}

struct MrmseFamily {
    double mrmse = 0.0;
    double mrmse_nz = 0.0;
    double m_relrmse = 0.0;
    double m_relrmse_nz = 0.0;
};

/// Class-averaged RMSE variants. "-nz" averages each class only over images
/// where it is present (classes never present are skipped); "rel" divides
/// each squared error by (true count + 1).
inline MrmseFamily mrmse_family(const std::vector<EvalRecord>& records) {
    detail::require_records(records);
    const int classes = records.front().classes();
    MrmseFamily out;
    int nz_classes = 0;
    for (int c = 1; c < classes; ++c) {
        double sq = 0.0, rel = 0.0, sq_nz = 0.0, rel_nz = 0.0;
        int nz = 0;
        for (const EvalRecord& r : records) {
            const double e = r.predicted_counts[c] - r.true_counts[c];
            const double relative = e * e / (r.true_counts[c] + 1.0);
            sq += e * e;
            rel += relative;
            if (r.true_counts[c] > 0) {
                sq_nz += e * e;
                rel_nz += relative;
                ++nz;
            }
        }
        const double n = static_cast<double>(records.size());
        out.mrmse += std::sqrt(sq / n);
        out.m_relrmse += std::sqrt(rel / n);
        if (nz > 0) {
            out.mrmse_nz += std::sqrt(sq_nz / nz);
            out.m_relrmse_nz += std::sqrt(rel_nz / nz);
            ++nz_classes;
        }
    }
    out.mrmse /= (classes - 1);
    out.m_relrmse /= (classes - 1);
    if (nz_classes > 0) {
        out.mrmse_nz /= nz_classes;
        out.m_relrmse_nz /= nz_classes;
    }
    return out;
}

}  // namespace lccount
