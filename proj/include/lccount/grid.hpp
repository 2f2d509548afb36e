#pragma once

// Dense grid data model: probability/logit volumes, masks, point annotations.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <set>
#include <span>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace lccount {

/// Raised when an input violates a documented precondition.
class InvalidInput : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Raised when a computation produced a non-finite value.
class NumericError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

using ClassId = int;

/// Row-major 2-D grid.
template <class T>
class Grid {
public:
    Grid() = default;
    Grid(int height, int width, T fill = T{})
        : height_(height), width_(width),
          data_(static_cast<std::size_t>(checked_area(height, width)), fill) {}

    int height() const { return height_; }
    int width() const { return width_; }
    std::size_t size() const { return data_.size(); }
    bool empty() const { return data_.empty(); }

    bool contains(int row, int col) const {
        return row >= 0 && col >= 0 && row < height_ && col < width_;
    }
    std::size_t index(int row, int col) const {
        return static_cast<std::size_t>(row) * static_cast<std::size_t>(width_) +
               static_cast<std::size_t>(col);
    }

    T& operator()(int row, int col) { return data_[index(row, col)]; }
    const T& operator()(int row, int col) const { return data_[index(row, col)]; }
    T& operator[](std::size_t i) { return data_[i]; }
    const T& operator[](std::size_t i) const { return data_[i]; }

    std::span<T> values() { return data_; }
    std::span<const T> values() const { return data_; }

    bool same_shape(int h, int w) const { return h == height_ && w == width_; }

    friend bool operator==(const Grid&, const Grid&) = default;

private:
    static long checked_area(int h, int w) {
        if (h < 0 || w < 0) throw InvalidInput("grid dimensions must be non-negative");
        return static_cast<long>(h) * static_cast<long>(w);
    }

    int height_ = 0;
    int width_ = 0;
    std::vector<T> data_;
};

/// Row-major H x W x C volume with the class axis innermost.
template <class T>
class Volume {
public:
    Volume() = default;
    Volume(int height, int width, int channels, T fill = T{})
        : height_(height), width_(width), channels_(channels) {
        if (height < 0 || width < 0 || channels < 0)
            throw InvalidInput("volume dimensions must be non-negative");
        data_.assign(static_cast<std::size_t>(height) * width * channels, fill);
    }

    int height() const { return height_; }
    int width() const { return width_; }
    int channels() const { return channels_; }
    int pixels() const { return height_ * width_; }
    std::size_t size() const { return data_.size(); }

    T& operator()(int row, int col, int ch) {
        return data_[(static_cast<std::size_t>(row) * width_ + col) * channels_ + ch];
    }
    const T& operator()(int row, int col, int ch) const {
        return data_[(static_cast<std::size_t>(row) * width_ + col) * channels_ + ch];
    }
    /// Access by flat pixel index (row * width + col).
    T& at(int pixel, int ch) { return data_[static_cast<std::size_t>(pixel) * channels_ + ch]; }
    const T& at(int pixel, int ch) const {
        return data_[static_cast<std::size_t>(pixel) * channels_ + ch];
    }

    std::span<T> row_of(int pixel) {
        return {data_.data() + static_cast<std::size_t>(pixel) * channels_,
                static_cast<std::size_t>(channels_)};
    }
    std::span<const T> row_of(int pixel) const {
        return {data_.data() + static_cast<std::size_t>(pixel) * channels_,
                static_cast<std::size_t>(channels_)};
    }

    std::span<T> values() { return data_; }
    std::span<const T> values() const { return data_; }

    friend bool operator==(const Volume&, const Volume&) = default;

private:
    int height_ = 0;
    int width_ = 0;
    int channels_ = 0;
    std::vector<T> data_;
};

/// Pre-softmax activations. Class 0 is background.
class LogitMap {
public:
    LogitMap() = default;
    explicit LogitMap(Volume<double> values) : values_(std::move(values)) {
        if (values_.channels() < 2)
            throw InvalidInput("logit map needs at least two classes (background + one object)");
        for (std::size_t i = 0; i < values_.size(); ++i) {
            if (!std::isfinite(values_.values()[i])) {
                std::ostringstream msg;
                msg << "non-finite logit at pixel " << i / values_.channels() << ", class "
                    << i % values_.channels();
                throw InvalidInput(msg.str());
            }
        }
    }

    int height() const { return values_.height(); }
    int width() const { return values_.width(); }
    int classes() const { return values_.channels(); }
    const Volume<double>& values() const { return values_; }
    double operator()(int row, int col, int cls) const { return values_(row, col, cls); }

private:
    Volume<double> values_;
};

/// Per-pixel class distribution. Rows sum to one.
class ProbMap {
public:
    static constexpr double kSumTolerance = 1e-6;

    ProbMap() = default;
    explicit ProbMap(Volume<double> values) : values_(std::move(values)) {
        if (values_.channels() < 2)
            throw InvalidInput("probability map needs at least two classes");
        for (int p = 0; p < values_.pixels(); ++p) {
            double sum = 0.0;
            for (double v : values_.row_of(p)) {
                if (!(v >= 0.0 && v <= 1.0))
                    throw InvalidInput("probability outside [0, 1] at pixel " + std::to_string(p));
                sum += v;
            }
            if (std::abs(sum - 1.0) > kSumTolerance)
                throw InvalidInput("probabilities at pixel " + std::to_string(p) +
                                   " do not sum to one");
        }
    }

    int height() const { return values_.height(); }
    int width() const { return values_.width(); }
    int classes() const { return values_.channels(); }
    int pixels() const { return values_.pixels(); }
    const Volume<double>& values() const { return values_; }
    double operator()(int row, int col, int cls) const { return values_(row, col, cls); }
    double at(int pixel, int cls) const { return values_.at(pixel, cls); }
    std::span<const double> row_of(int pixel) const { return values_.row_of(pixel); }

private:
    Volume<double> values_;
};

using BinaryMask = Grid<std::uint8_t>;
using LabelGrid = Grid<int>;

struct Point {
    int row = 0;
    int col = 0;
    ClassId cls = 1;

    friend bool operator==(const Point&, const Point&) = default;
    friend auto operator<=>(const Point&, const Point&) = default;
};

/// Ground-truth point set for one image, validated against its dimensions.
class PointAnnotations {
public:
    PointAnnotations() = default;
    PointAnnotations(int height, int width, std::vector<Point> points = {})
        : height_(height), width_(width), points_(std::move(points)) {
        if (height < 0 || width < 0) throw InvalidInput("negative annotation image size");
        std::set<std::pair<int, int>> seen;
        for (const Point& p : points_) {
            if (p.row < 0 || p.col < 0 || p.row >= height || p.col >= width) {
                std::ostringstream msg;
                msg << "annotation (" << p.row << ", " << p.col << ") outside " << height << "x"
                    << width << " image";
                throw InvalidInput(msg.str());
            }
            if (p.cls < 1)
                throw InvalidInput("annotation class must be >= 1 (background is never annotated)");
            if (!seen.emplace(p.row, p.col).second) {
                std::ostringstream msg;
                msg << "duplicate annotation at (" << p.row << ", " << p.col << ")";
                throw InvalidInput(msg.str());
            }
        }
    }

    int height() const { return height_; }
    int width() const { return width_; }
    const std::vector<Point>& points() const { return points_; }
    std::size_t size() const { return points_.size(); }
    bool empty() const { return points_.empty(); }

    friend bool operator==(const PointAnnotations&, const PointAnnotations&) = default;

private:
    int height_ = 0;
    int width_ = 0;
    std::vector<Point> points_;
};

inline ProbMap softmax(const LogitMap& logits) {
    const int classes = logits.classes();
    Volume<double> out(logits.height(), logits.width(), classes);
    const Volume<double>& in = logits.values();
    for (int p = 0; p < in.pixels(); ++p) {
        auto src = in.row_of(p);
        auto dst = out.row_of(p);
        const double peak = *std::max_element(src.begin(), src.end());
        double sum = 0.0;
        for (int k = 0; k < classes; ++k) {
            dst[k] = std::exp(src[k] - peak);
            sum += dst[k];
        }
        for (int k = 0; k < classes; ++k) dst[k] /= sum;
    }
    return ProbMap(std::move(out));
}

/// Per-pixel argmax; ties go to the lowest class index.
inline Grid<int> argmax_class(const ProbMap& s) {
    Grid<int> out(s.height(), s.width(), 0);
    for (int p = 0; p < s.pixels(); ++p) {
        auto row = s.row_of(p);
        int best = 0;
        for (int k = 1; k < static_cast<int>(row.size()); ++k)
            if (row[k] > row[best]) best = k;
        out[static_cast<std::size_t>(p)] = best;
    }
    return out;
}

inline BinaryMask class_mask(const Grid<int>& classes, ClassId cls) {
    BinaryMask out(classes.height(), classes.width(), 0);
    for (std::size_t i = 0; i < classes.size(); ++i) out[i] = classes[i] == cls ? 1 : 0;
    return out;
}

inline BinaryMask foreground_mask(const ProbMap& s) {
    Grid<int> classes = argmax_class(s);
    BinaryMask out(s.height(), s.width(), 0);
    for (std::size_t i = 0; i < classes.size(); ++i) out[i] = classes[i] > 0 ? 1 : 0;
    return out;
}

struct ClassPartition {
    std::vector<ClassId> present;  // C_e, always contains 0
    std::vector<ClassId> absent;   // complement of present in {0..C-1}
};

inline ClassPartition present_classes(const PointAnnotations& t, int num_classes) {
    if (num_classes < 2) throw InvalidInput("num_classes must be >= 2");
    std::vector<bool> seen(static_cast<std::size_t>(num_classes), false);
    seen[0] = true;
    for (const Point& p : t.points()) {
        if (p.cls >= num_classes)
            throw InvalidInput("annotation class " + std::to_string(p.cls) +
                               " >= num_classes " + std::to_string(num_classes));
        seen[static_cast<std::size_t>(p.cls)] = true;
    }
    ClassPartition out;
    for (int c = 0; c < num_classes; ++c) (seen[c] ? out.present : out.absent).push_back(c);
    return out;
}

}  // namespace lccount
