#pragma once

// Dataset plumbing: binary PGM/PPM rasters, the line-oriented manifest format,
// the synthetic dot-scatter generator, horizontal flips and overlay rendering.

#include <algorithm>
#include <cmath>
#include <cctype>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "lccount/blobs.hpp"
#include "lccount/fcn.hpp"
#include "lccount/grid.hpp"
#include "lccount/watershed.hpp"

namespace lccount {

namespace fs = std::filesystem;

// -- rasters -----------------------------------------------------------------

/// 8-bit raster, interleaved channels (1 = gray, 3 = RGB).
struct RasterImage {
    int height = 0;
    int width = 0;
    int channels = 1;
    std::vector<std::uint8_t> pixels;

    RasterImage() = default;
    RasterImage(int h, int w, int c, std::uint8_t fill = 0)
        : height(h), width(w), channels(c), pixels(static_cast<std::size_t>(h) * w * c, fill) {}

    std::uint8_t& at(int r, int c, int ch = 0) {
        return pixels[(static_cast<std::size_t>(r) * width + c) * channels + ch];
    }
    std::uint8_t at(int r, int c, int ch = 0) const {
        return pixels[(static_cast<std::size_t>(r) * width + c) * channels + ch];
    }

    friend bool operator==(const RasterImage&, const RasterImage&) = default;
};

namespace io_detail {

inline void skip_pnm_space(std::istream& is) {
    while (true) {
        const int ch = is.peek();
        if (ch == '#') {
            std::string ignored;
            std::getline(is, ignored);
        } else if (ch != EOF && std::isspace(ch)) {
            is.get();
        } else {
            return;
        }
    }
}

inline int read_pnm_int(std::istream& is) {
    skip_pnm_space(is);
    int v = -1;
    if (!(is >> v) || v < 0) throw InvalidInput("malformed PNM header");
    return v;
}

}  // namespace io_detail

/// Reads binary PGM (P5) or PPM (P6) with maxval 255.
inline RasterImage read_pnm(std::istream& is) {
    char magic[2];
    if (!is.read(magic, 2) || magic[0] != 'P' || (magic[1] != '5' && magic[1] != '6'))
        throw InvalidInput("not a binary PGM/PPM image");
    const int w = io_detail::read_pnm_int(is);
    const int h = io_detail::read_pnm_int(is);
    const int maxval = io_detail::read_pnm_int(is);
    if (maxval != 255) throw InvalidInput("only 8-bit PNM images are supported");
    if (w == 0 || h == 0 || w > 1 << 15 || h > 1 << 15) throw InvalidInput("implausible PNM dimensions");
    is.get();  // single whitespace before the raster
    RasterImage img(h, w, magic[1] == '5' ? 1 : 3);
    if (!is.read(reinterpret_cast<char*>(img.pixels.data()), static_cast<std::streamsize>(img.pixels.size())))
        throw InvalidInput("truncated PNM raster");
    return img;
}

inline RasterImage read_pnm(const fs::path& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw InvalidInput("cannot open image '" + path.string() + "'");
    try {
        return read_pnm(is);
    } catch (const InvalidInput& e) {
        throw InvalidInput(path.string() + ": " + e.what());
    }
}

inline void write_pnm(std::ostream& os, const RasterImage& img) {
    if (img.channels != 1 && img.channels != 3) throw InvalidInput("PNM output needs 1 or 3 channels");
    os << (img.channels == 1 ? "P5" : "P6") << "\n" << img.width << " " << img.height << "\n255\n";
    os.write(reinterpret_cast<const char*>(img.pixels.data()), static_cast<std::streamsize>(img.pixels.size()));
}

inline void write_pnm(const fs::path& path, const RasterImage& img) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw InvalidInput("cannot open '" + path.string() + "' for writing");
    write_pnm(os, img);
    if (!os) throw InvalidInput("failed writing '" + path.string() + "'");
}

/// Network input in [0, 1], one plane per channel.
inline InputImage to_input(const RasterImage& img) {
    InputImage out(img.channels, img.height, img.width);
    for (int ch = 0; ch < img.channels; ++ch)
        for (int r = 0; r < img.height; ++r)
            for (int c = 0; c < img.width; ++c) out(ch, r, c) = img.at(r, c, ch) / 255.0f;
    return out;
}

// -- manifest ----------------------------------------------------------------

enum class Split { train, val, test };

inline std::string to_string(Split s) {
    switch (s) {
        case Split::train: return "train";
        case Split::val: return "val";
        case Split::test: return "test";
    }
    return "train";
}

inline Split parse_split(const std::string& s) {
    if (s == "train") return Split::train;
    if (s == "val") return Split::val;
    if (s == "test") return Split::test;
    throw InvalidInput("unknown split '" + s + "'");
}

struct ManifestEntry {
    std::string image;  // relative to the manifest's directory
    Split split = Split::train;
    std::vector<Point> points;

    friend bool operator==(const ManifestEntry&, const ManifestEntry&) = default;
};

struct DatasetManifest {
    fs::path root;  // directory the image paths are relative to
    std::vector<std::string> class_names{"background", "object"};
    std::vector<ManifestEntry> entries;

    int classes() const { return static_cast<int>(class_names.size()); }
    fs::path image_path(const ManifestEntry& e) const { return root / e.image; }

    std::vector<const ManifestEntry*> split(Split s) const {
        std::vector<const ManifestEntry*> out;
        for (const auto& e : entries)
            if (e.split == s) out.push_back(&e);
        return out;
    }
};

namespace io_detail {

inline std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

inline std::vector<std::string> split_on(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::string cur;
    std::istringstream is(s);
    while (std::getline(is, cur, sep)) out.push_back(cur);
    if (!s.empty() && s.back() == sep) out.emplace_back();
    return out;
}

inline std::vector<int> parse_ints(const std::string& s, std::size_t expected) {
    std::vector<int> out;
    for (const std::string& tok : split_on(s, ',')) {
        const std::string t = trim(tok);
        std::size_t used = 0;
        int v = 0;
        try {
            v = std::stoi(t, &used);
        } catch (const std::exception&) {
            throw InvalidInput("expected an integer, got '" + t + "'");
        }
        if (used != t.size()) throw InvalidInput("expected an integer, got '" + t + "'");
        out.push_back(v);
    }
    if (out.size() != expected)
        throw InvalidInput("expected " + std::to_string(expected) + " comma-separated integers in '" + s + "'");
    return out;
}

}  // namespace io_detail

/// Parses one record: `image=<path>; split=<s>; points=r,c,k;r,c,k` or
/// `boxes=r0,c0,r1,c1,k;...` (each box becomes its floor-rounded centre).
inline ManifestEntry parse_manifest_record(const std::string& line) {
    using namespace io_detail;
    std::vector<std::pair<std::string, std::vector<std::string>>> fields;
    for (const std::string& raw : split_on(line, ';')) {
        const std::string tok = trim(raw);
        const auto eq = tok.find('=');
        if (eq != std::string::npos) {
            fields.push_back({trim(tok.substr(0, eq)), {}});
            const std::string value = trim(tok.substr(eq + 1));
            if (!value.empty()) fields.back().second.push_back(value);
        } else if (!tok.empty()) {
            if (fields.empty()) throw InvalidInput("record does not start with key=value");
            fields.back().second.push_back(tok);
        }
    }
    ManifestEntry e;
    bool have_image = false, have_split = false;
    for (const auto& [key, values] : fields) {
        if (key == "image") {
            if (values.size() != 1) throw InvalidInput("image= needs exactly one path");
            e.image = values[0];
            have_image = true;
        } else if (key == "split") {
            if (values.size() != 1) throw InvalidInput("split= needs exactly one value");
            e.split = parse_split(values[0]);
            have_split = true;
        } else if (key == "points") {
            for (const std::string& v : values) {
                const auto n = parse_ints(v, 3);
                e.points.push_back({n[0], n[1], n[2]});
            }
        } else if (key == "boxes") {
            for (const std::string& v : values) {
                const auto n = parse_ints(v, 5);
                if (n[2] < n[0] || n[3] < n[1]) throw InvalidInput("box corners out of order in '" + v + "'");
                e.points.push_back({(n[0] + n[2]) / 2, (n[1] + n[3]) / 2, n[4]});
            }
        } else {
            throw InvalidInput("unknown field '" + key + "'");
        }
    }
    if (!have_image) throw InvalidInput("record has no image=");
    if (!have_split) throw InvalidInput("record has no split=");
    return e;
}

inline std::string format_manifest_record(const ManifestEntry& e) {
    std::ostringstream os;
    os << "image=" << e.image << "; split=" << to_string(e.split) << "; points=";
    for (std::size_t i = 0; i < e.points.size(); ++i) {
        if (i) os << ';';
        os << e.points[i].row << ',' << e.points[i].col << ',' << e.points[i].cls;
    }
    return os.str();
}

/// Parses a manifest. Blank lines and '#' comments are ignored; an optional
/// `classes=name0,name1,...` line names the classes (background first).
/// With `check_images`, every image must decode and contain its points.
inline DatasetManifest parse_manifest(std::istream& is, const fs::path& root, bool check_images = true) {
    DatasetManifest m;
    m.root = root;
    bool named = false;
    int max_class = 0;
    std::string line;
    int lineno = 0;
    std::vector<int> entry_lines;
    while (std::getline(is, line)) {
        ++lineno;
        const std::string t = io_detail::trim(line);
        if (t.empty() || t[0] == '#') continue;
        try {
            if (t.rfind("classes=", 0) == 0) {
                m.class_names.clear();
                for (const auto& n : io_detail::split_on(t.substr(8), ',')) m.class_names.push_back(io_detail::trim(n));
                if (m.class_names.size() < 2) throw InvalidInput("classes= needs background plus at least one class");
                named = true;
                continue;
            }
            ManifestEntry e = parse_manifest_record(t);
            for (const Point& p : e.points) max_class = std::max(max_class, p.cls);
            m.entries.push_back(std::move(e));
            entry_lines.push_back(lineno);
        } catch (const InvalidInput& err) {
            throw InvalidInput("manifest line " + std::to_string(lineno) + ": " + err.what());
        }
    }
    if (!named)
        while (m.classes() <= max_class) m.class_names.push_back("class" + std::to_string(m.classes()));

    for (std::size_t i = 0; i < m.entries.size(); ++i) {
        const ManifestEntry& e = m.entries[i];
        try {
            for (const Point& p : e.points)
                if (p.cls >= m.classes()) throw InvalidInput("class " + std::to_string(p.cls) + " is not in the class table");
            if (check_images) {
                const RasterImage img = read_pnm(m.image_path(e));
                PointAnnotations(img.height, img.width, e.points);
            } else {
                PointAnnotations(std::numeric_limits<int>::max(), std::numeric_limits<int>::max(), e.points);
            }
        } catch (const InvalidInput& err) {
            throw InvalidInput("manifest line " + std::to_string(entry_lines[i]) + ": " + err.what());
        }
    }
    return m;
}

inline DatasetManifest load_manifest(const fs::path& path, bool check_images = true) {
    std::ifstream is(path);
    if (!is) throw InvalidInput("cannot open manifest '" + path.string() + "'");
    return parse_manifest(is, path.parent_path(), check_images);
}

inline void write_manifest(std::ostream& os, const DatasetManifest& m) {
    os << "classes=";
    for (std::size_t i = 0; i < m.class_names.size(); ++i) os << (i ? "," : "") << m.class_names[i];
    os << "\n";
    for (const ManifestEntry& e : m.entries) os << format_manifest_record(e) << "\n";
}

inline void save_manifest(const fs::path& path, const DatasetManifest& m) {
    std::ofstream os(path);
    if (!os) throw InvalidInput("cannot open '" + path.string() + "' for writing");
    write_manifest(os, m);
}

struct Sample {
    std::string name;
    InputImage image;
    PointAnnotations points;
};

inline std::vector<Sample> load_samples(const DatasetManifest& m, Split split) {
    std::vector<Sample> out;
    for (const ManifestEntry* e : m.split(split)) {
        const RasterImage img = read_pnm(m.image_path(*e));
        out.push_back({e->image, to_input(img), PointAnnotations(img.height, img.width, e->points)});
    }
    return out;
}

// -- flips -------------------------------------------------------------------

inline PointAnnotations flip_points(const PointAnnotations& t) {
    std::vector<Point> pts;
    for (Point p : t.points()) {
        p.col = t.width() - 1 - p.col;
        pts.push_back(p);
    }
    return PointAnnotations(t.height(), t.width(), std::move(pts));
}

inline std::pair<RasterImage, PointAnnotations> flip_horizontal(const RasterImage& img, const PointAnnotations& t) {
    if (t.height() != img.height || t.width() != img.width) throw InvalidInput("image/annotation size mismatch");
    RasterImage out(img.height, img.width, img.channels);
    for (int r = 0; r < img.height; ++r)
        for (int c = 0; c < img.width; ++c)
            for (int ch = 0; ch < img.channels; ++ch) out.at(r, img.width - 1 - c, ch) = img.at(r, c, ch);
    return {std::move(out), flip_points(t)};
}

inline std::pair<InputImage, PointAnnotations> flip_horizontal(const InputImage& img, const PointAnnotations& t) {
    if (t.height() != img.height || t.width() != img.width) throw InvalidInput("image/annotation size mismatch");
    InputImage out(img.channels, img.height, img.width);
    for (int ch = 0; ch < img.channels; ++ch)
        for (int r = 0; r < img.height; ++r)
            for (int c = 0; c < img.width; ++c) out(ch, r, img.width - 1 - c) = img(ch, r, c);
    return {std::move(out), flip_points(t)};
}

// -- synthetic dots ----------------------------------------------------------

struct SyntheticSpec {
    int height = 64;
    int width = 64;
    int min_objects = 1;
    int max_objects = 8;
    double min_radius = 2.0;
    double max_radius = 3.5;
    double noise = 0.04;
    // Probability that each dot after the first is placed touching an
    // existing dot (centre distance below the radius sum).
    double overlap = 0.5;
    std::uint64_t seed = 7;
    int classes = 2;
    int train = 200;
    int val = 40;
    int test = 40;

    void validate() const {
        if (height < 8 || width < 8) throw InvalidInput("synthetic images must be at least 8x8");
        if (min_objects < 0 || max_objects < min_objects) throw InvalidInput("invalid object count range");
        if (min_radius < 1.0 || max_radius < min_radius) throw InvalidInput("dot radii must be >= 1 and ordered");
        if (noise < 0.0) throw InvalidInput("noise level must be non-negative");
        if (overlap < 0.0 || overlap > 1.0) throw InvalidInput("overlap fraction must lie in [0, 1]");
        if (classes < 2) throw InvalidInput("need at least one object class");
        if (train < 0 || val < 0 || test < 0) throw InvalidInput("split sizes must be non-negative");
    }
};

struct SyntheticDot {
    Point center;
    double radius = 0.0;
};

struct SyntheticImage {
    RasterImage image;
    std::vector<SyntheticDot> dots;

    PointAnnotations annotations() const {
        std::vector<Point> pts;
        for (const auto& d : dots) pts.push_back(d.center);
        return PointAnnotations(image.height, image.width, std::move(pts));
    }
};

namespace io_detail {

inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ull;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
    return x ^ (x >> 31);
}

}  // namespace io_detail

/// Renders image `index` of the dataset described by `spec`: bright shaded
/// dots on smooth textured noise. Deterministic in (spec.seed, index).
inline SyntheticImage render_synthetic(const SyntheticSpec& spec, std::uint64_t index) {
    spec.validate();
    std::mt19937_64 rng(io_detail::splitmix64(spec.seed * 0x100000001B3ull + index));
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    const auto uniform = [&](double lo, double hi) { return lo + (hi - lo) * unit(rng); };
    const int h = spec.height, w = spec.width;

    const int target = spec.min_objects + static_cast<int>(unit(rng) * (spec.max_objects - spec.min_objects + 1));
    std::vector<SyntheticDot> dots;
    const auto fits = [&](int r, int c, double radius, double min_factor, double slack) {
        if (r < 1 || c < 1 || r > h - 2 || c > w - 2) return false;
        for (const auto& d : dots) {
            const double dist = std::hypot(r - d.center.row, c - d.center.col);
            if (dist < min_factor * (radius + d.radius) + slack || dist < 3.0) return false;
        }
        return true;
    };
    for (int n = 0; n < std::min(target, spec.max_objects); ++n) {
        const double radius = uniform(spec.min_radius, spec.max_radius);
        const ClassId cls = 1 + static_cast<int>(unit(rng) * (spec.classes - 1)) % (spec.classes - 1);
        const bool touch = !dots.empty() && unit(rng) < spec.overlap;
        bool placed = false;
        for (int attempt = 0; attempt < 200 && !placed; ++attempt) {
            int r, c;
            if (touch && attempt < 150) {
                const SyntheticDot& anchor = dots[static_cast<std::size_t>(unit(rng) * dots.size()) % dots.size()];
                const double theta = uniform(0.0, 2.0 * 3.14159265358979323846);
                const double dist = uniform(0.75, 0.95) * (radius + anchor.radius);
                r = static_cast<int>(std::lround(anchor.center.row + dist * std::sin(theta)));
                c = static_cast<int>(std::lround(anchor.center.col + dist * std::cos(theta)));
                // Must touch its anchor but stay apart from everything else.
                const double actual = std::hypot(r - anchor.center.row, c - anchor.center.col);
                if (actual >= radius + anchor.radius || !fits(r, c, radius, 0.7, 0.0)) continue;
            } else {
                const int margin = static_cast<int>(std::ceil(radius));
                r = margin + static_cast<int>(unit(rng) * (h - 2 * margin));
                c = margin + static_cast<int>(unit(rng) * (w - 2 * margin));
                if (!fits(r, c, radius, 1.0, 2.0)) continue;
            }
            dots.push_back({Point{r, c, cls}, radius});
            placed = true;
        }
    }

    // Background: smooth low-frequency texture plus pixel noise.
    const double fy = uniform(0.5, 2.0) * 2.0 * 3.14159265358979323846 / h;
    const double fx = uniform(0.5, 2.0) * 2.0 * 3.14159265358979323846 / w;
    const double phase = uniform(0.0, 6.28318530717958647692);
    const double base = uniform(0.12, 0.25);
    std::normal_distribution<double> gauss(0.0, 1.0);

    SyntheticImage out;
    out.image = RasterImage(h, w, 1);
    for (int r = 0; r < h; ++r) {
        for (int c = 0; c < w; ++c) {
            double v = base + 0.05 * std::sin(fy * r + phase) * std::cos(fx * c - phase);
            double coverage = 0.0, dot_value = 0.0;
            for (const auto& d : dots) {
                const double dist = std::hypot(r - d.center.row, c - d.center.col);
                const double cov = std::clamp(d.radius + 0.5 - dist, 0.0, 1.0);
                if (cov <= coverage) continue;
                const double level = spec.classes == 2 ? 0.8 : 0.55 + 0.4 * (d.center.cls - 1) / (spec.classes - 2);
                const double falloff = 1.0 - 0.35 * std::min(1.0, (dist * dist) / (d.radius * d.radius));
                coverage = cov;
                dot_value = level * falloff;
            }
            v = v * (1.0 - coverage) + dot_value * coverage;
            v += spec.noise * gauss(rng);
            out.image.at(r, c) = static_cast<std::uint8_t>(std::lround(std::clamp(v, 0.0, 1.0) * 255.0));
        }
    }
    out.dots = std::move(dots);
    return out;
}

/// All images of `spec` in manifest order (train, then val, then test).
inline std::vector<SyntheticImage> synthetic_images(const SyntheticSpec& spec) {
    std::vector<SyntheticImage> out;
    const int total = spec.train + spec.val + spec.test;
    for (int i = 0; i < total; ++i) out.push_back(render_synthetic(spec, static_cast<std::uint64_t>(i)));
    return out;
}

inline Split synthetic_split(const SyntheticSpec& spec, int index) {
    if (index < spec.train) return Split::train;
    if (index < spec.train + spec.val) return Split::val;
    return Split::test;
}

inline std::vector<Sample> synthetic_samples(const SyntheticSpec& spec, Split split) {
    std::vector<Sample> out;
    const int total = spec.train + spec.val + spec.test;
    for (int i = 0; i < total; ++i) {
        if (synthetic_split(spec, i) != split) continue;
        SyntheticImage img = render_synthetic(spec, static_cast<std::uint64_t>(i));
        out.push_back({"synthetic_" + std::to_string(i), to_input(img.image), img.annotations()});
    }
    return out;
}

/// Writes images/NNNNN.pgm and manifest.txt under `out_dir`. The tree is
/// built in a sibling staging directory and renamed into place, so a failed
/// run leaves nothing behind. `out_dir` must not already exist.
inline DatasetManifest generate_synthetic(const SyntheticSpec& spec, const fs::path& out_dir) {
    spec.validate();
    if (fs::exists(out_dir)) throw InvalidInput("output directory '" + out_dir.string() + "' already exists");
    const fs::path parent = out_dir.has_parent_path() ? out_dir.parent_path() : fs::path(".");
    const fs::path staging = parent / ("." + out_dir.filename().string() + ".staging");
    std::error_code ec;
    fs::remove_all(staging, ec);
    if (!fs::create_directories(staging / "images", ec) || ec)
        throw InvalidInput("cannot create output under '" + parent.string() + "'");
    try {
        DatasetManifest m;
        m.root = out_dir;
        m.class_names = {"background"};
        for (int c = 1; c < spec.classes; ++c) m.class_names.push_back(spec.classes == 2 ? "dot" : "dot" + std::to_string(c));
        const int total = spec.train + spec.val + spec.test;
        for (int i = 0; i < total; ++i) {
            const SyntheticImage img = render_synthetic(spec, static_cast<std::uint64_t>(i));
            char name[32];
            std::snprintf(name, sizeof name, "images/%05d.pgm", i);
            write_pnm(staging / name, img.image);
            ManifestEntry e{name, synthetic_split(spec, i), {}};
            for (const auto& d : img.dots) e.points.push_back(d.center);
            m.entries.push_back(std::move(e));
        }
        save_manifest(staging / "manifest.txt", m);
        fs::rename(staging, out_dir);
        return m;
    } catch (...) {
        fs::remove_all(staging, ec);
        throw;
    }
}

// -- overlays ----------------------------------------------------------------

struct Rgb {
    std::uint8_t r, g, b;
};

inline constexpr Rgb kMatchedColor{0, 200, 0};
inline constexpr Rgb kMultiColor{230, 220, 0};
inline constexpr Rgb kEmptyColor{220, 0, 0};
inline constexpr Rgb kBoundaryColor{255, 255, 0};
inline constexpr Rgb kPointColor{0, 80, 255};

/// RGB overlay: blobs with one annotation green, with several yellow, with
/// none red (blended at half opacity); split boundary pixels solid yellow;
/// annotations as 3x3 squares. `blobs` must have its points assigned.
inline RasterImage render_overlay(const RasterImage& image, const BlobLabeling& blobs, const std::vector<Point>& points,
                                  const std::optional<SplitBoundary>& boundary = std::nullopt) {
    if (!blobs.labels().same_shape(image.height, image.width)) throw InvalidInput("overlay blob labeling size mismatch");
    RasterImage out(image.height, image.width, 3);
    for (int r = 0; r < image.height; ++r) {
        for (int c = 0; c < image.width; ++c) {
            for (int ch = 0; ch < 3; ++ch) out.at(r, c, ch) = image.at(r, c, image.channels == 3 ? ch : 0);
            const int id = blobs.label_at(r, c);
            if (id == 0) continue;
            const std::size_t n = blobs.blob(id).points.size();
            const Rgb col = n == 1 ? kMatchedColor : (n >= 2 ? kMultiColor : kEmptyColor);
            const std::uint8_t tint[3] = {col.r, col.g, col.b};
            for (int ch = 0; ch < 3; ++ch)
                out.at(r, c, ch) = static_cast<std::uint8_t>((out.at(r, c, ch) + tint[ch] + 1) / 2);
        }
    }
    const auto paint = [&](int r, int c, Rgb col) {
        if (r < 0 || c < 0 || r >= out.height || c >= out.width) return;
        out.at(r, c, 0) = col.r;
        out.at(r, c, 1) = col.g;
        out.at(r, c, 2) = col.b;
    };
    if (boundary)
        for (const BoundaryPixel& b : boundary->pixels()) paint(b.row, b.col, kBoundaryColor);
    for (const Point& p : points)
        for (int dr = -1; dr <= 1; ++dr)
            for (int dc = -1; dc <= 1; ++dc) paint(p.row + dr, p.col + dc, kPointColor);
    return out;
}

}  // namespace lccount
