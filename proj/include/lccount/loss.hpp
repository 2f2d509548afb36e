#pragma once

// Localization-counting loss: image-level, point-level, split-level and
// false-positive terms, with analytic gradients with respect to the logits.
//
// Every term is a weighted sum of -log(S_ic) or -log(1 - S_ic) entries over
// pixel sets derived from the current prediction (argmax pixels, split
// boundary, unmatched blobs). Those sets are built once per forward pass into
// a LossPlan and held fixed when differentiating.

#include <cmath>
#include <string>
#include <vector>

#include "lccount/blobs.hpp"
#include "lccount/grid.hpp"
#include "lccount/instrumentation.hpp"
#include "lccount/line_split.hpp"
#include "lccount/watershed.hpp"

namespace lccount {

inline constexpr double kDefaultEpsilon = 1e-12;

enum class SplitMethod { watershed, line };

inline std::string to_string(SplitMethod m) { return m == SplitMethod::line ? "line" : "watershed"; }

inline SplitMethod parse_split_method(const std::string& s) {
    if (s == "watershed") return SplitMethod::watershed;
    if (s == "line") return SplitMethod::line;
    throw InvalidInput("unknown split method '" + s + "' (expected watershed or line)");
}

struct LossTerms {
    bool image_level = true;
    bool point_level = true;
    bool split_level = true;
    bool false_positive = true;

    static LossTerms none() { return {false, false, false, false}; }
    friend bool operator==(const LossTerms&, const LossTerms&) = default;
};

/// Parses "full" or a '+'-joined subset of li, lp, ls, lf (e.g. "li+lp").
inline LossTerms parse_loss_terms(const std::string& spec) {
    if (spec == "full") return {};
    LossTerms out = LossTerms::none();
    std::size_t start = 0;
    while (start <= spec.size()) {
        const std::size_t end = std::min(spec.find('+', start), spec.size());
        const std::string tok = spec.substr(start, end - start);
        if (tok == "li") out.image_level = true;
        else if (tok == "lp") out.point_level = true;
        else if (tok == "ls") out.split_level = true;
        else if (tok == "lf") out.false_positive = true;
        else throw InvalidInput("unknown loss term '" + tok + "' in '" + spec + "'");
        start = end + 1;
    }
    return out;
}

inline std::string to_string(const LossTerms& t) {
    if (t == LossTerms{}) return "full";
    std::string out;
    const auto add = [&](bool on, const char* name) {
        if (!on) return;
        if (!out.empty()) out += '+';
        out += name;
    };
    add(t.image_level, "li");
    add(t.point_level, "lp");
    add(t.split_level, "ls");
    add(t.false_positive, "lf");
    return out.empty() ? "none" : out;
}

struct LossConfig {
    SplitMethod split_method = SplitMethod::watershed;
    double epsilon = kDefaultEpsilon;
    LossTerms terms;
    // Divide the point, split and false-positive sums by their total weight.
    bool normalize = false;

    void validate() const {
        if (!(epsilon > 0.0 && epsilon <= 1e-6))
            throw InvalidInput("loss epsilon must lie in (0, 1e-6]");
    }
};

struct LossBreakdown {
    double image_level = 0.0;
    double point_level = 0.0;
    double split_level = 0.0;
    double false_positive = 0.0;
    double total = 0.0;
};

/// One weighted log-probability entry: -weight * log(S[pixel, cls]), or
/// -weight * log(1 - S[pixel, cls]) when `complement` is set.
struct LogTerm {
    int pixel = 0;
    int cls = 0;
    double weight = 1.0;
    bool complement = false;
};

/// Frozen pixel sets and weights for one forward pass.
struct LossPlan {
    int height = 0;
    int width = 0;
    int classes = 0;
    double epsilon = kDefaultEpsilon;
    std::vector<LogTerm> image_level;
    std::vector<LogTerm> point_level;
    std::vector<LogTerm> split_level;
    std::vector<LogTerm> false_positive;
};

namespace detail {

inline void check_dims(const ProbMap& s, const PointAnnotations& t) {
    if (s.height() != t.height() || s.width() != t.width())
        throw InvalidInput("probability map and annotations have different dimensions");
}

inline double term_argument(const ProbMap& s, const LogTerm& term) {
    if (!term.complement) return s.at(term.pixel, term.cls);
    // 1 - S_ic summed from the other classes keeps precision near S_ic = 1.
    double rest = 0.0;
    auto row = s.row_of(term.pixel);
    for (int k = 0; k < static_cast<int>(row.size()); ++k)
        if (k != term.cls) rest += row[k];
    return rest;
}

inline double sum_terms(const ProbMap& s, const std::vector<LogTerm>& terms, double eps) {
    double sum = 0.0;
    for (const LogTerm& term : terms) sum -= term.weight * std::log(std::max(term_argument(s, term), eps));
    return sum;
}

inline void accumulate_gradient(const ProbMap& s, const std::vector<LogTerm>& terms, double eps,
                                Volume<double>& grad) {
    const int classes = s.classes();
    for (const LogTerm& term : terms) {
        const double x = term_argument(s, term);
        if (x < eps) continue;  // floored: locally constant
        auto row = s.row_of(term.pixel);
        auto g = grad.row_of(term.pixel);
        if (!term.complement) {
            for (int k = 0; k < classes; ++k) g[k] += term.weight * row[k];
            g[term.cls] -= term.weight;
        } else {
            const double sc = row[term.cls];
            for (int k = 0; k < classes; ++k)
                if (k != term.cls) g[k] -= term.weight * sc * row[k] / x;
            g[term.cls] += term.weight * sc;
        }
    }
}

inline void normalize_weights(std::vector<LogTerm>& terms) {
    double total = 0.0;
    for (const LogTerm& t : terms) total += t.weight;
    if (total <= 0.0) return;
    for (LogTerm& t : terms) t.weight /= total;
}

}  // namespace detail

// -- per-term plan builders --------------------------------------------------

/// Image-level terms. For each class present (background always is), the
/// pixel with the highest probability for that class is pushed up; for each
/// absent class, its highest-probability pixel is pushed down. The absent
/// part is dropped when every class is present.
inline std::vector<LogTerm> image_level_terms(const ProbMap& s, const PointAnnotations& t) {
    detail::check_dims(s, t);
    const ClassPartition part = present_classes(t, s.classes());
    const auto peak_pixel = [&](int cls) {
        int best = 0;
        for (int p = 1; p < s.pixels(); ++p)
            if (s.at(p, cls) > s.at(best, cls)) best = p;
        return best;
    };
    std::vector<LogTerm> out;
    if (s.pixels() == 0) return out;
    for (int c : part.present)
        out.push_back({peak_pixel(c), c, 1.0 / static_cast<double>(part.present.size()), false});
    for (int c : part.absent)
        out.push_back({peak_pixel(c), c, 1.0 / static_cast<double>(part.absent.size()), true});
    return out;
}

inline std::vector<LogTerm> point_level_terms(const ProbMap& s, const PointAnnotations& t) {
    detail::check_dims(s, t);
    std::vector<LogTerm> out;
    for (const Point& p : t.points()) {
        if (p.cls >= s.classes()) throw InvalidInput("annotation class exceeds probability map classes");
        out.push_back({p.row * s.width() + p.col, p.cls, 1.0, false});
    }
    return out;
}

inline std::vector<LogTerm> split_level_terms(const SplitBoundary& boundary) {
    std::vector<LogTerm> out;
    for (const BoundaryPixel& b : boundary.pixels())
        out.push_back({b.row * boundary.width() + b.col, 0, static_cast<double>(b.alpha), false});
    return out;
}

/// Background terms over every pixel of blobs that hold no annotation.
inline std::vector<LogTerm> false_positive_terms(const BlobLabeling& blobs) {
    std::vector<LogTerm> out;
    const LabelGrid& labels = blobs.labels();
    for (std::size_t i = 0; i < labels.size(); ++i) {
        const int id = labels[i];
        if (id > 0 && blobs.blob(id).points.empty()) out.push_back({static_cast<int>(i), 0, 1.0, false});
    }
    return out;
}

/// Per-class blob labelings (index c - 1 for class c), each with that class's
/// annotations assigned.
inline std::vector<BlobLabeling> class_blobs(const Grid<int>& argmax, int classes,
                                             const PointAnnotations& t) {
    std::vector<BlobLabeling> out;
    out.reserve(static_cast<std::size_t>(std::max(classes - 1, 0)));
    for (int c = 1; c < classes; ++c)
        out.push_back(assign_points(connected_components(class_mask(argmax, c)), t, c));
    return out;
}

// -- individual terms --------------------------------------------------------

inline double image_level_loss(const ProbMap& s, const PointAnnotations& t,
                               double eps = kDefaultEpsilon) {
    return detail::sum_terms(s, image_level_terms(s, t), eps);
}

inline double point_level_loss(const ProbMap& s, const PointAnnotations& t,
                               double eps = kDefaultEpsilon) {
    return detail::sum_terms(s, point_level_terms(s, t), eps);
}

inline double split_level_loss(const ProbMap& s, const SplitBoundary& boundary,
                               double eps = kDefaultEpsilon) {
    if (boundary.height() != s.height() || boundary.width() != s.width())
        throw InvalidInput("split boundary and probability map have different dimensions");
    return detail::sum_terms(s, split_level_terms(boundary), eps);
}

inline double false_positive_loss(const ProbMap& s, const BlobLabeling& blobs,
                                  double eps = kDefaultEpsilon) {
    if (!blobs.labels().same_shape(s.height(), s.width()))
        throw InvalidInput("blob labeling and probability map have different dimensions");
    return detail::sum_terms(s, false_positive_terms(blobs), eps);
}

// -- full loss ---------------------------------------------------------------

/// Split boundary for `s` under the configured method.
inline SplitBoundary split_boundary(const ProbMap& s, const PointAnnotations& t, SplitMethod method) {
    detail::check_dims(s, t);
    const BinaryMask mask = foreground_mask(s);
    const BlobLabeling blobs = assign_points(connected_components(mask), t);
    return method == SplitMethod::line ? line_split(s, blobs) : watershed_split(mask, blobs, t);
}

inline LossPlan plan_loss(const ProbMap& s, const PointAnnotations& t, const LossConfig& cfg) {
    cfg.validate();
    detail::check_dims(s, t);
    LossPlan plan;
    plan.height = s.height();
    plan.width = s.width();
    plan.classes = s.classes();
    plan.epsilon = cfg.epsilon;

    if (cfg.terms.image_level) plan.image_level = image_level_terms(s, t);
    if (cfg.terms.point_level) plan.point_level = point_level_terms(s, t);
    if (cfg.terms.split_level) plan.split_level = split_level_terms(split_boundary(s, t, cfg.split_method));
    if (cfg.terms.false_positive) {
        ++instrumentation::false_positive_calls;
        for (const BlobLabeling& blobs : class_blobs(argmax_class(s), s.classes(), t)) {
            auto terms = false_positive_terms(blobs);
            plan.false_positive.insert(plan.false_positive.end(), terms.begin(), terms.end());
        }
    }
    if (cfg.normalize) {
        detail::normalize_weights(plan.point_level);
        detail::normalize_weights(plan.split_level);
        detail::normalize_weights(plan.false_positive);
    }
    return plan;
}

inline LossBreakdown evaluate_loss(const ProbMap& s, const LossPlan& plan) {
    if (s.height() != plan.height || s.width() != plan.width || s.classes() != plan.classes)
        throw InvalidInput("loss plan does not match probability map shape");
    LossBreakdown out;
    out.image_level = detail::sum_terms(s, plan.image_level, plan.epsilon);
    out.point_level = detail::sum_terms(s, plan.point_level, plan.epsilon);
    out.split_level = detail::sum_terms(s, plan.split_level, plan.epsilon);
    out.false_positive = detail::sum_terms(s, plan.false_positive, plan.epsilon);
    out.total = out.image_level + out.point_level + out.split_level + out.false_positive;
    return out;
}

/// Gradient of evaluate_loss(softmax(logits), plan) with respect to the
/// logits, holding the plan fixed. `s` must be softmax(logits).
inline Volume<double> plan_gradient(const ProbMap& s, const LossPlan& plan) {
    if (s.height() != plan.height || s.width() != plan.width || s.classes() != plan.classes)
        throw InvalidInput("loss plan does not match probability map shape");
    Volume<double> grad(s.height(), s.width(), s.classes(), 0.0);
    detail::accumulate_gradient(s, plan.image_level, plan.epsilon, grad);
    detail::accumulate_gradient(s, plan.point_level, plan.epsilon, grad);
    detail::accumulate_gradient(s, plan.split_level, plan.epsilon, grad);
    detail::accumulate_gradient(s, plan.false_positive, plan.epsilon, grad);
    return grad;
}

inline LossBreakdown total_loss(const LogitMap& logits, const PointAnnotations& t,
                                const LossConfig& cfg) {
    const ProbMap s = softmax(logits);
    return evaluate_loss(s, plan_loss(s, t, cfg));
}

inline Volume<double> loss_gradient(const LogitMap& logits, const PointAnnotations& t,
                                    const LossConfig& cfg) {
    const ProbMap s = softmax(logits);
    return plan_gradient(s, plan_loss(s, t, cfg));
}

}  // namespace lccount
