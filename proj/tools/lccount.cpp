// lccount: dataset generation, training, evaluation, prediction, split
// inspection and loss ablation for the blob-counting network.

#include <CLI11.hpp>

#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "lccount/dataset.hpp"
#include "lccount/loss.hpp"
#include "lccount/metrics.hpp"
#include "lccount/train.hpp"

namespace fs = std::filesystem;
using namespace lccount;

namespace {

enum ExitCode { kOk = 0, kUsage = 1, kData = 2, kNumeric = 3 };

unsigned worker_threads() {
    if (const char* env = std::getenv("LCCOUNT_THREADS")) {
        char* end = nullptr;
        const long n = std::strtol(env, &end, 10);
        if (end != env && *end == '\0' && n >= 1) return static_cast<unsigned>(n);
        std::cerr << "warning: ignoring invalid LCCOUNT_THREADS='" << env << "'\n";
    }
    return std::max(1u, std::thread::hardware_concurrency());
}

struct TrainOptions {
    std::string loss = "full";
    std::string split_method = "watershed";
    double lr = 1e-5;
    double weight_decay = 5e-5;
    double epsilon = kDefaultEpsilon;
    int epochs = 200;
    int patience = 10;
    std::uint64_t seed = 0;
    bool no_flip = false;
    bool normalize = false;

    // Invalid option values are usage errors.
    TrainConfig config() const {
        try {
            return build();
        } catch (const InvalidInput& e) {
            throw CLI::ValidationError(e.what());
        }
    }

    TrainConfig build() const {
        TrainConfig cfg;
        cfg.adam.learning_rate = lr;
        cfg.adam.weight_decay = weight_decay;
        cfg.max_epochs = epochs;
        cfg.patience = patience;
        cfg.seed = seed;
        cfg.flip = !no_flip;
        cfg.loss.terms = parse_loss_terms(loss);
        cfg.loss.split_method = parse_split_method(split_method);
        cfg.loss.epsilon = epsilon;
        cfg.loss.normalize = normalize;
        cfg.validate();
        return cfg;
    }
};

void add_train_options(CLI::App* sub, TrainOptions& o) {
    sub->add_option("--loss", o.loss, "full, or a '+'-joined subset of li, lp, ls, lf")->capture_default_str();
    sub->add_option("--split-method", o.split_method, "watershed or line")
        ->check(CLI::IsMember({"watershed", "line"}))->capture_default_str();
    sub->add_option("--lr", o.lr, "Adam learning rate")->capture_default_str();
    sub->add_option("--weight-decay", o.weight_decay, "L2 weight decay")->capture_default_str();
    sub->add_option("--epsilon", o.epsilon, "probability floor inside the logs")->capture_default_str();
    sub->add_option("--epochs", o.epochs, "maximum number of epochs")->capture_default_str();
    sub->add_option("--patience", o.patience, "epochs without validation improvement before stopping")
        ->capture_default_str();
    sub->add_option("--seed", o.seed, "initialisation and shuffling seed")->capture_default_str();
    sub->add_flag("--no-flip", o.no_flip, "disable horizontal-flip augmentation");
    sub->add_flag("--normalize", o.normalize, "divide each summed loss term by its total weight");
}

void check_compatible(const FcnParams<float>& params, const DatasetManifest& m, const std::vector<Sample>& samples) {
    if (params.shape.classes != m.classes())
        throw InvalidInput("checkpoint predicts " + std::to_string(params.shape.classes) +
                           " classes but the manifest has " + std::to_string(m.classes()));
    for (const Sample& s : samples)
        if (s.image.channels != params.shape.in_channels)
            throw InvalidInput("image '" + s.name + "' has " + std::to_string(s.image.channels) +
                               " channels, checkpoint expects " + std::to_string(params.shape.in_channels));
}

std::vector<Sample> require_split(const DatasetManifest& m, Split split) {
    auto samples = load_samples(m, split);
    if (samples.empty()) throw InvalidInput("manifest has no '" + to_string(split) + "' images");
    return samples;
}

struct Summary {
    double mae = 0.0;
    double fscore = 0.0;
};

Summary summarize(const std::vector<EvalRecord>& records) {
    double sum = 0.0;
    for (const EvalRecord& r : records)
        for (int c = 1; c < r.classes(); ++c) sum += std::abs(r.predicted_counts[c] - r.true_counts[c]);
    return {sum / static_cast<double>(records.size()), fscore(records)};
}

std::string report_text(const std::vector<EvalRecord>& records, Split split, int game_level) {
    std::ostringstream os;
    os << std::fixed << std::setprecision(6);
    const int classes = records.front().classes();
    os << "split=" << to_string(split) << " images=" << records.size() << " classes=" << classes << "\n";
    const Summary s = summarize(records);
    if (classes == 2) {
        os << "MAE " << s.mae << "\n";
        for (int level = 0; level <= game_level; ++level) os << "GAME(" << level << ") " << game(records, level) << "\n";
    } else {
        os << "MAE(all classes) " << s.mae << "\n";
    }
    os << "FScore " << s.fscore << "\n";
    if (classes > 2) {
        const MrmseFamily f = mrmse_family(records);
        os << "mRMSE " << f.mrmse << "\n";
        os << "mRMSE-nz " << f.mrmse_nz << "\n";
        os << "m-relRMSE " << f.m_relrmse << "\n";
        os << "m-relRMSE-nz " << f.m_relrmse_nz << "\n";
    }
    return os.str();
}

// Each annotated point of a prediction manifest becomes a one-pixel blob.
std::vector<EvalRecord> records_from_predictions(const DatasetManifest& truth, const DatasetManifest& predicted,
                                                 Split split) {
    if (truth.classes() != predicted.classes()) throw InvalidInput("prediction manifest class count differs");
    std::vector<EvalRecord> out;
    for (const ManifestEntry* e : truth.split(split)) {
        const auto it = std::find_if(predicted.entries.begin(), predicted.entries.end(),
                                     [&](const ManifestEntry& p) { return p.image == e->image; });
        if (it == predicted.entries.end()) throw InvalidInput("no prediction for image '" + e->image + "'");
        const RasterImage img = read_pnm(truth.image_path(*e));
        std::vector<BlobLabeling> blobs;
        for (int c = 1; c < truth.classes(); ++c) {
            BinaryMask mask(img.height, img.width, 0);
            for (const Point& p : it->points) {
                if (p.row < 0 || p.col < 0 || p.row >= img.height || p.col >= img.width)
                    throw InvalidInput("predicted point outside image '" + e->image + "'");
                if (p.cls == c) mask(p.row, p.col) = 1;
            }
            blobs.push_back(connected_components(mask));
        }
        out.push_back(make_record(PointAnnotations(img.height, img.width, e->points), blobs));
    }
    if (out.empty()) throw InvalidInput("manifest has no '" + to_string(split) + "' images");
    return out;
}

Rgb instance_color(int id) {
    std::uint64_t h = static_cast<std::uint64_t>(id) * 0x9E3779B97F4A7C15ull;
    h ^= h >> 29;
    return {static_cast<std::uint8_t>(64 + (h & 0xBF)), static_cast<std::uint8_t>(64 + ((h >> 8) & 0xBF)),
            static_cast<std::uint8_t>(64 + ((h >> 16) & 0xBF))};
}

// Every predicted blob in its own colour, blended over the image.
RasterImage render_instances(const RasterImage& image, const std::vector<BlobLabeling>& per_class) {
    RasterImage out(image.height, image.width, 3);
    for (int r = 0; r < image.height; ++r)
        for (int c = 0; c < image.width; ++c) {
            for (int ch = 0; ch < 3; ++ch) out.at(r, c, ch) = image.at(r, c, image.channels == 3 ? ch : 0);
            int offset = 0;
            for (const BlobLabeling& b : per_class) {
                const int id = b.label_at(r, c);
                if (id != 0) {
                    const Rgb col = instance_color(offset + id);
                    const std::uint8_t tint[3] = {col.r, col.g, col.b};
                    for (int ch = 0; ch < 3; ++ch)
                        out.at(r, c, ch) = static_cast<std::uint8_t>((out.at(r, c, ch) + tint[ch] + 1) / 2);
                }
                offset += b.count();
            }
        }
    return out;
}

RasterImage side_by_side(const std::vector<RasterImage>& panels, int gap) {
    int width = 0;
    for (const auto& p : panels) width += p.width;
    width += gap * static_cast<int>(panels.size() - 1);
    RasterImage out(panels.front().height, width, 3, 255);
    int x0 = 0;
    for (const auto& p : panels) {
        for (int r = 0; r < p.height; ++r)
            for (int c = 0; c < p.width; ++c)
                for (int ch = 0; ch < 3; ++ch) out.at(r, x0 + c, ch) = p.at(r, c, ch);
        x0 += p.width + gap;
    }
    return out;
}

// Two-class probability map from an 8-bit gray image: background = v / 255.
ProbMap probmap_from_pgm(const fs::path& path) {
    const RasterImage img = read_pnm(path);
    if (img.channels != 1) throw InvalidInput("probability map '" + path.string() + "' must be grayscale");
    Volume<double> v(img.height, img.width, 2);
    for (int r = 0; r < img.height; ++r)
        for (int c = 0; c < img.width; ++c) {
            v(r, c, 0) = img.at(r, c) / 255.0;
            v(r, c, 1) = 1.0 - v(r, c, 0);
        }
    return ProbMap(std::move(v));
}

// Replaces `--config FILE` after the subcommand name with the file's
// key=value pairs as long flags, placed before the remaining arguments so
// explicit flags take precedence.
std::vector<std::string> expand_config(const CLI::App& app, std::vector<std::string> args) {
    if (args.size() < 2) return args;
    const CLI::App* sub = nullptr;
    for (const CLI::App* s : app.get_subcommands({}))
        if (s->get_name() == args[1]) sub = s;
    if (sub == nullptr) return args;

    std::string path;
    for (std::size_t i = 2; i < args.size(); ++i) {
        if (args[i] == "--config" && i + 1 < args.size()) {
            path = args[i + 1];
            args.erase(args.begin() + static_cast<std::ptrdiff_t>(i), args.begin() + static_cast<std::ptrdiff_t>(i + 2));
            break;
        }
        if (args[i].rfind("--config=", 0) == 0) {
            path = args[i].substr(9);
            args.erase(args.begin() + static_cast<std::ptrdiff_t>(i));
            break;
        }
    }
    if (path.empty()) return args;

    std::ifstream is(path);
    if (!is) throw std::runtime_error("cannot read config file '" + path + "'");
    std::vector<std::string> injected;
    std::string line;
    int lineno = 0;
    while (std::getline(is, line)) {
        ++lineno;
        line = io_detail::trim(line.substr(0, line.find('#')));
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw std::runtime_error(path + " line " + std::to_string(lineno) + ": expected key=value");
        const std::string key = io_detail::trim(line.substr(0, eq));
        std::string value = io_detail::trim(line.substr(eq + 1));
        if (value.size() >= 2 && (value.front() == '"' || value.front() == '\'') && value.back() == value.front())
            value = value.substr(1, value.size() - 2);
        const CLI::Option* opt = sub->get_option_no_throw("--" + key);
        if (opt == nullptr || key == "config")
            throw std::runtime_error(path + " line " + std::to_string(lineno) + ": unknown key '" + key + "' for " +
                                     sub->get_name());
        if (opt->get_expected_min() == 0) {
            if (value == "true" || value == "1" || value == "yes" || value == "on") injected.push_back("--" + key);
            else if (!(value == "false" || value == "0" || value == "no" || value == "off"))
                throw std::runtime_error(path + " line " + std::to_string(lineno) + ": '" + key + "' expects a boolean");
        } else {
            injected.push_back("--" + key);
            injected.push_back(value);
        }
    }
    args.insert(args.begin() + 2, injected.begin(), injected.end());
    return args;
}

// -- commands ----------------------------------------------------------------

struct GenerateOptions {
    SyntheticSpec spec;
    std::string out;
    int images = -1;
    int size = 64;
};

int cmd_generate(GenerateOptions o) {
    o.spec.height = o.spec.width = o.size;
    if (o.images >= 0) {
        o.spec.val = o.spec.test = o.images / 7;
        o.spec.train = o.images - 2 * (o.images / 7);
    }
    const DatasetManifest m = generate_synthetic(o.spec, o.out);
    std::cout << "wrote " << m.entries.size() << " images (" << o.spec.train << " train, " << o.spec.val << " val, "
              << o.spec.test << " test) to " << o.out << "\n";
    return kOk;
}

struct TrainCommand {
    std::string manifest;
    std::string out;
    TrainOptions train;
};

int cmd_train(const TrainCommand& o) {
    const TrainConfig cfg = o.train.config();
    const DatasetManifest m = load_manifest(o.manifest);
    const auto train_set = require_split(m, Split::train);
    const auto val_set = require_split(m, Split::val);
    fs::create_directories(o.out);
    const fs::path log_path = fs::path(o.out) / "train_log.csv";
    std::ofstream log(log_path);
    if (!log) throw InvalidInput("cannot write '" + log_path.string() + "'");
    log << "epoch,loss_total,loss_image,loss_point,loss_split,loss_fp,val_mae,val_fscore\n";
    log << std::setprecision(9);
    std::cerr << "training on " << train_set.size() << " images, loss=" << to_string(cfg.loss.terms)
              << " split=" << to_string(cfg.loss.split_method) << "\n";
    const TrainResult r = train(train_set, val_set, m.classes(), cfg, [&](const TrainLogEntry& e) {
        log << e.epoch << ',' << e.mean_loss.total << ',' << e.mean_loss.image_level << ',' << e.mean_loss.point_level
            << ',' << e.mean_loss.split_level << ',' << e.mean_loss.false_positive << ',' << e.val_mae << ','
            << e.val_fscore << std::endl;
        std::cerr << "epoch " << e.epoch << " loss " << e.mean_loss.total << " val_mae " << e.val_mae << " val_f "
                  << e.val_fscore << "\n";
    });
    const fs::path ckpt = fs::path(o.out) / "checkpoint.lcfcn";
    save_checkpoint(ckpt.string(), r.params);
    std::cout << "best_epoch=" << r.best_epoch << " best_val_mae=" << r.best_val_mae << " checkpoint=" << ckpt.string()
              << " log=" << log_path.string() << "\n";
    return kOk;
}

struct EvalOptions {
    std::string checkpoint;
    std::string predictions;
    std::string manifest;
    std::string split = "test";
    std::string report;
    int game_level = 3;
};

int cmd_eval(const EvalOptions& o) {
    const Split split = parse_split(o.split);
    const DatasetManifest m = load_manifest(o.manifest);
    std::vector<EvalRecord> records;
    if (!o.predictions.empty()) {
        records = records_from_predictions(m, load_manifest(o.predictions, false), split);
    } else {
        const FcnParams<float> params = load_checkpoint<float>(o.checkpoint);
        const auto samples = require_split(m, split);
        check_compatible(params, m, samples);
        records = evaluate_samples(params, samples, worker_threads());
    }
    const std::string text = report_text(records, split, o.game_level);
    std::cout << text;
    if (!o.report.empty()) {
        std::ofstream os(o.report);
        if (!(os << text)) throw InvalidInput("cannot write report '" + o.report + "'");
    }
    return kOk;
}

struct PredictOptions {
    std::string checkpoint;
    std::vector<std::string> images;
    std::string overlay_dir = "overlays";
    bool no_overlay = false;
};

int cmd_predict(const PredictOptions& o) {
    const FcnParams<float> params = load_checkpoint<float>(o.checkpoint);
    if (!o.no_overlay) fs::create_directories(o.overlay_dir);
    struct Outcome {
        std::string text;
        std::string warning;
    };
    std::vector<Outcome> outcomes(o.images.size());
    const auto work = [&](std::size_t begin, std::size_t stride) {
        for (std::size_t i = begin; i < o.images.size(); i += stride) {
            const std::string& path = o.images[i];
            try {
                const RasterImage img = read_pnm(path);
                const Prediction p = predict_counts(params, to_input(img));
                std::ostringstream os;
                for (int c = 1; c < params.shape.classes; ++c)
                    os << "image=" << path << " class=" << c << " count=" << p.counts[c] << "\n";
                outcomes[i].text = os.str();
                if (!o.no_overlay) {
                    const fs::path out = fs::path(o.overlay_dir) / (fs::path(path).stem().string() + "_overlay.ppm");
                    write_pnm(out, render_instances(img, p.blobs));
                }
            } catch (const NumericError&) {
                throw;
            } catch (const std::exception& e) {
                outcomes[i].warning = "warning: skipping '" + path + "': " + e.what();
            }
        }
    };
    const unsigned threads = std::max(1u, std::min<unsigned>(worker_threads(), static_cast<unsigned>(o.images.size())));
    {
        std::vector<std::jthread> pool;
        for (unsigned t = 0; t < threads; ++t) pool.emplace_back(work, t, threads);
    }
    int failed = 0;
    for (const Outcome& out : outcomes) {
        std::cout << out.text;
        if (!out.warning.empty()) {
            std::cerr << out.warning << "\n";
            ++failed;
        }
    }
    if (failed > 0) {
        std::cerr << failed << " of " << o.images.size() << " images could not be processed\n";
        return kData;
    }
    return kOk;
}

struct InspectOptions {
    std::string checkpoint;
    std::string probmap;
    std::string image;
    std::string points;
    std::string manifest;
    std::string method = "both";
    std::string out = "splits.ppm";
};

int cmd_inspect_splits(const InspectOptions& o) {
    if (o.checkpoint.empty() == o.probmap.empty()) throw CLI::ValidationError("give exactly one of --checkpoint or --probmap");
    RasterImage img;
    std::vector<Point> pts;
    if (!o.manifest.empty()) {
        const DatasetManifest m = load_manifest(o.manifest);
        const auto it = std::find_if(m.entries.begin(), m.entries.end(),
                                     [&](const ManifestEntry& e) { return e.image == o.image; });
        if (it == m.entries.end()) throw InvalidInput("image '" + o.image + "' is not in the manifest");
        img = read_pnm(m.image_path(*it));
        pts = it->points;
    } else {
        img = read_pnm(o.image);
        if (!o.points.empty()) pts = parse_manifest_record("image=x; split=train; points=" + o.points).points;
    }
    const PointAnnotations t(img.height, img.width, pts);

    ProbMap s;
    if (!o.probmap.empty()) {
        s = probmap_from_pgm(o.probmap);
    } else {
        const FcnParams<float> params = load_checkpoint<float>(o.checkpoint);
        if (params.shape.in_channels != img.channels) throw InvalidInput("image channel count differs from checkpoint");
        s = softmax(forward(params, to_input(img)));
    }
    if (s.height() != img.height || s.width() != img.width)
        throw InvalidInput("probability map size differs from the image");

    std::vector<SplitMethod> methods;
    if (o.method == "both" || o.method == "watershed") methods.push_back(SplitMethod::watershed);
    if (o.method == "both" || o.method == "line") methods.push_back(SplitMethod::line);

    const BlobLabeling blobs = assign_points(connected_components(foreground_mask(s)), t);
    std::vector<RasterImage> panels;
    for (SplitMethod method : methods) {
        const SplitBoundary b = split_boundary(s, t, method);
        panels.push_back(render_overlay(img, blobs, pts, b));
        std::cout << "method=" << to_string(method) << " blobs=" << blobs.count()
                  << " multi=" << blobs.multi_ids().size() << " empty=" << blobs.false_positive_ids().size()
                  << " boundary=" << b.size() << "\n";
    }
    write_pnm(o.out, side_by_side(panels, 4));
    return kOk;
}

struct AblateOptions {
    std::string manifest;
    std::string out;
    std::string configs = "li+lp,li+lp+ls,li+lp+lf,full";
    std::string split = "test";
    TrainOptions train;
};

int cmd_ablate(const AblateOptions& o) {
    const DatasetManifest m = load_manifest(o.manifest);
    const auto train_set = require_split(m, Split::train);
    const auto val_set = require_split(m, Split::val);
    const auto eval_set = require_split(m, parse_split(o.split));
    std::vector<std::string> names;
    std::stringstream list(o.configs);
    for (std::string tok; std::getline(list, tok, ',');)
        if (!tok.empty()) names.push_back(tok);
    if (names.empty()) throw CLI::ValidationError("--configs lists no loss configurations");

    std::ostringstream table;
    table << std::left << std::setw(16) << "loss" << std::setw(12) << "MAE" << "FScore\n";
    std::ostringstream csv;
    csv << "loss,mae,fscore,best_epoch\n";
    for (const std::string& name : names) {
        TrainOptions opts = o.train;
        opts.loss = name;
        const TrainConfig cfg = opts.config();
        std::cerr << "ablation: training " << name << "\n";
        const TrainResult r = train(train_set, val_set, m.classes(), cfg);
        const Summary s = summarize(evaluate_samples(r.params, eval_set, worker_threads()));
        table << std::left << std::setw(16) << name << std::setw(12) << std::fixed << std::setprecision(3) << s.mae
              << s.fscore << "\n";
        csv << name << ',' << s.mae << ',' << s.fscore << ',' << r.best_epoch << "\n";
    }
    std::cout << table.str();
    if (!o.out.empty()) {
        fs::create_directories(o.out);
        std::ofstream os(fs::path(o.out) / "ablation.csv");
        if (!(os << csv.str())) throw InvalidInput("cannot write ablation table under '" + o.out + "'");
    }
    return kOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Blob-based object counting from point annotations"};
    app.require_subcommand(1);
    app.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);

    GenerateOptions gen;
    auto* generate = app.add_subcommand("generate", "write a synthetic dot dataset");
    generate->add_option("--out", gen.out, "output directory (must not exist)")->required();
    generate->add_option("--seed", gen.spec.seed, "generator seed")->capture_default_str();
    auto* images_opt = generate->add_option("--images", gen.images, "total images, split 5:1:1 into train/val/test");
    images_opt->excludes(generate->add_option("--train", gen.spec.train, "training images")->capture_default_str());
    images_opt->excludes(generate->add_option("--val", gen.spec.val, "validation images")->capture_default_str());
    images_opt->excludes(generate->add_option("--test", gen.spec.test, "test images")->capture_default_str());
    generate->add_option("--size", gen.size, "image height and width")->capture_default_str();
    generate->add_option("--min-objects", gen.spec.min_objects)->capture_default_str();
    generate->add_option("--max-objects", gen.spec.max_objects)->capture_default_str();
    generate->add_option("--min-radius", gen.spec.min_radius)->capture_default_str();
    generate->add_option("--max-radius", gen.spec.max_radius)->capture_default_str();
    generate->add_option("--noise", gen.spec.noise, "Gaussian noise level")->capture_default_str();
    generate->add_option("--overlap", gen.spec.overlap, "fraction of dots placed touching another")
        ->capture_default_str();
    generate->add_option("--classes", gen.spec.classes, "classes including background")->capture_default_str();

    TrainCommand tc;
    auto* train_cmd = app.add_subcommand("train", "train a network and write a checkpoint and log");
    train_cmd->add_option("--manifest", tc.manifest, "dataset manifest")->required();
    train_cmd->add_option("--out", tc.out, "output directory for checkpoint.lcfcn and train_log.csv")->required();
    add_train_options(train_cmd, tc.train);

    EvalOptions ev;
    auto* eval = app.add_subcommand("eval", "report counting and localisation metrics");
    auto* ckpt_opt = eval->add_option("--checkpoint", ev.checkpoint, "trained checkpoint");
    auto* pred_opt = eval->add_option("--predictions", ev.predictions, "manifest of predicted points instead of a network");
    ckpt_opt->excludes(pred_opt);
    eval->add_option("--manifest", ev.manifest, "dataset manifest")->required();
    eval->add_option("--split", ev.split, "train, val or test")
        ->check(CLI::IsMember({"train", "val", "test"}))->capture_default_str();
    eval->add_option("--game-level", ev.game_level, "highest GAME level to report")
        ->check(CLI::Range(0, 12))
        ->capture_default_str();
    eval->add_option("--report", ev.report, "also write the report to this file");

    PredictOptions pr;
    auto* predict = app.add_subcommand("predict", "count blobs in images");
    predict->add_option("--checkpoint", pr.checkpoint, "trained checkpoint")->required();
    predict->add_option("images", pr.images, "PGM/PPM images")->required();
    predict->add_option("--overlay-dir", pr.overlay_dir, "where overlays are written")->capture_default_str();
    predict->add_flag("--no-overlay", pr.no_overlay, "do not write overlay images");

    InspectOptions in;
    auto* inspect = app.add_subcommand("inspect-splits", "render blobs and split boundaries");
    inspect->add_option("--checkpoint", in.checkpoint, "trained checkpoint");
    inspect->add_option("--probmap", in.probmap, "8-bit PGM holding background probability x 255");
    inspect->add_option("--image", in.image, "image path (manifest-relative with --manifest)")->required();
    inspect->add_option("--points", in.points, "annotations as r,c,k;r,c,k...");
    inspect->add_option("--manifest", in.manifest, "take the image's annotations from this manifest")
        ->excludes(inspect->get_option("--points"));
    inspect->add_option("--method", in.method, "watershed, line or both")
        ->check(CLI::IsMember({"watershed", "line", "both"}))
        ->capture_default_str();
    inspect->add_option("--out", in.out, "output PPM")->capture_default_str();

    AblateOptions ab;
    auto* ablate = app.add_subcommand("ablate", "train one model per loss configuration and tabulate");
    ablate->add_option("--manifest", ab.manifest, "dataset manifest")->required();
    ablate->add_option("--out", ab.out, "directory for ablation.csv");
    ablate->add_option("--configs", ab.configs, "comma-separated loss configurations")->capture_default_str();
    ablate->add_option("--split", ab.split, "split used for the table")
        ->check(CLI::IsMember({"train", "val", "test"}))->capture_default_str();
    add_train_options(ablate, ab.train);

    std::string config_unused;
    for (CLI::App* sub : {generate, train_cmd, eval, predict, inspect, ablate})
        sub->add_option("--config", config_unused, "flat key=value file mirroring the command's long flags");

    std::vector<std::string> args;
    try {
        args = expand_config(app, std::vector<std::string>(argv, argv + argc));
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kUsage;
    }
    std::vector<char*> cargs;
    for (std::string& a : args) cargs.push_back(a.data());

    try {
        app.parse(static_cast<int>(cargs.size()), cargs.data());
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kOk : kUsage;
    }

    try {
        if (*generate) return cmd_generate(gen);
        if (*train_cmd) return cmd_train(tc);
        if (*eval) {
            if (ev.checkpoint.empty() && ev.predictions.empty())
                throw CLI::ValidationError("eval needs --checkpoint or --predictions");
            return cmd_eval(ev);
        }
        if (*predict) return cmd_predict(pr);
        if (*inspect) return cmd_inspect_splits(in);
        if (*ablate) return cmd_ablate(ab);
    } catch (const CLI::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kUsage;
    } catch (const NumericError& e) {
        std::cerr << "numeric failure: " << e.what() << "\n";
        return kNumeric;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kData;
    }
    return kUsage;
}
