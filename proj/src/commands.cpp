#include "binnet/commands.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <ostream>
#include <sstream>

#include "binnet/errors.hpp"
#include "binnet/explain.hpp"
#include "binnet/rng.hpp"
#include "binnet/routing.hpp"

namespace fs = std::filesystem;

namespace binnet {

namespace {

void write_text_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw io_error("cannot open for writing: " + path);
    out << content;
    if (!out) throw io_error("write failed: " + path);
}

struct TargetData {
    std::vector<LabeledImage> images;
    ClassCatalog catalog;
    std::array<std::int64_t, 3> input_shape;
};

TargetData load_target(const DatasetConfig& d) {
    TargetData t;
    if (d.kind == DatasetConfig::Kind::synthetic) {
        auto ds = synthesize_dataset(d.task, d.n_per_class, d.res_h, d.res_w, d.seed);
        t.images = std::move(ds.images);
        t.catalog = std::move(ds.catalog);
        t.input_shape = {3, d.res_h, d.res_w};
    } else {
        t.catalog = waste_catalog();
        t.images = load_directory_dataset(d.path, t.catalog);
        for (auto& img : t.images)
            if (img.pixels.dim(1) != d.resize_h || img.pixels.dim(2) != d.resize_w)
                img.pixels = resize_bilinear(img.pixels, d.resize_h, d.resize_w);
        t.input_shape = {3, d.resize_h, d.resize_w};
    }
    if (t.images.empty()) throw data_error("dataset produced no images");
    return t;
}

// Transfer source: an existing checkpoint, or a fresh network pre-trained on
// the synthetic source task.
Network acquire_source_net(const RunConfig& cfg,
                           const std::array<std::int64_t, 3>& target_shape,
                           std::ostream& log) {
    const SourceConfig& src = *cfg.source;
    if (!src.checkpoint.empty()) {
        Network net = load_checkpoint(src.checkpoint);
        if (net.input_shape != target_shape)
            throw mismatch_error("source checkpoint input shape does not match the target dataset");
        return net;
    }
    if (src.res_h != target_shape[1] || src.res_w != target_shape[2])
        throw config_error("source resolution must match the target dataset resolution");

    auto ds = synthesize_dataset(SyntheticTask::source, src.n_per_class, src.res_h,
                                 src.res_w, src.seed);
    auto split = stratified_split(ds.images, src.split_seed);
    Network net = build_network(cfg.model.architecture, {3, src.res_h, src.res_w},
                                ds.catalog, cfg.model.init_seed);

    OptimizerConfig pre_opt = cfg.trainer.opt;
    pre_opt.max_epochs = src.epochs;
    log << "pre-training on synthetic source task (" << ds.images.size() << " images, "
        << src.epochs << " epochs)\n";
    auto history = train_full_finetune(net, split, pre_opt, cfg.augment,
                                       Rng::derive(cfg.trainer.seed, 0x5243ULL));
    log << "source pre-training final val accuracy: " << history.back().val_accuracy << "\n";
    return net;
}

} // namespace

std::vector<int> predict(const Network& net, const std::vector<LabeledImage>& images,
                         int batch_size) {
    std::vector<int> out;
    out.reserve(images.size());
    const std::int64_t classes = static_cast<std::int64_t>(net.class_labels.size());
    for (std::size_t start = 0; start < images.size();
         start += static_cast<std::size_t>(batch_size)) {
        const std::size_t end =
            std::min(images.size(), start + static_cast<std::size_t>(batch_size));
        Tensor batch({static_cast<std::int64_t>(end - start), net.input_shape[0],
                      net.input_shape[1], net.input_shape[2]});
        for (std::size_t i = start; i < end; ++i)
            std::copy_n(images[i].pixels.data(), images[i].pixels.size(),
                        batch.data() + static_cast<std::int64_t>(i - start) *
                                           images[i].pixels.size());
        const Tensor logits = forward(net, batch);
        for (std::size_t i = start; i < end; ++i) {
            const float* row = logits.data() + static_cast<std::int64_t>(i - start) * classes;
            int best = 0;
            for (std::int64_t c = 1; c < classes; ++c)
                if (row[c] > row[best]) best = static_cast<int>(c);
            out.push_back(best);
        }
    }
    return out;
}

PipelineResult run_pipeline(const RunConfig& cfg, std::ostream& log) {
    cfg.validate();

    TargetData target = load_target(cfg.dataset);
    PipelineResult result;
    result.catalog = target.catalog;
    result.split = stratified_split(target.images, cfg.dataset.split_seed);
    log << "dataset: " << target.images.size() << " images, " << result.split.train.size()
        << "/" << result.split.validation.size() << "/" << result.split.test.size()
        << " train/validation/test\n";

    const Strategy strategy = cfg.trainer.strategy;
    if (strategy == Strategy::scratch) {
        result.net = build_network(cfg.model.architecture, target.input_shape,
                                   target.catalog, cfg.model.init_seed);
        log << "strategy scratch: training " << cfg.model.architecture << " from random init\n";
        result.history = train_full_finetune(result.net, result.split, cfg.trainer.opt,
                                             cfg.augment, cfg.trainer.seed);
    } else {
        result.net = acquire_source_net(cfg, target.input_shape, log);
        replace_head(result.net, target.catalog, Rng::derive(cfg.model.init_seed, 0x4E455748ULL));
        log << "strategy " << strategy_name(strategy) << ": transferring "
            << result.net.architecture_id << " to the target task\n";
        switch (strategy) {
            case Strategy::feature_extraction:
                result.history = train_feature_extraction(result.net, result.split,
                                                          cfg.trainer.opt, cfg.augment,
                                                          cfg.trainer.schedule.stage1,
                                                          cfg.trainer.seed);
                break;
            case Strategy::full_finetune:
                result.history = train_full_finetune(result.net, result.split,
                                                     cfg.trainer.opt, cfg.augment,
                                                     cfg.trainer.seed);
                break;
            default:
                result.history = hybrid_tune(result.net, result.split, cfg.trainer.opt,
                                             cfg.trainer.schedule, cfg.augment,
                                             cfg.trainer.seed);
                break;
        }
    }

    std::vector<int> truths;
    truths.reserve(result.split.test.size());
    for (const auto& img : result.split.test) truths.push_back(img.label);
    const auto predictions = predict(result.net, result.split.test, cfg.trainer.opt.batch_size);
    result.test_confusion = confusion_matrix(truths, predictions, target.catalog);
    result.test_report = compute_metrics(result.test_confusion);
    log << "trained " << result.history.records.size() << " epochs, test accuracy "
        << result.test_report.accuracy << "\n";
    return result;
}

int cmd_train(const RunConfig& cfg, std::ostream& log) {
    PipelineResult result = run_pipeline(cfg, log);

    std::error_code ec;
    fs::create_directories(cfg.output_dir, ec);
    if (ec) throw io_error("cannot create output directory: " + cfg.output_dir);

    const std::string history_csv = result.history.to_csv();
    const std::string checkpoint_path = cfg.output_dir + "/checkpoint.wnet";
    save_checkpoint(result.net, checkpoint_path, history_csv);
    write_text_file(cfg.output_dir + "/history.csv", history_csv);
    write_text_file(cfg.output_dir + "/manifest.txt",
                    dataset_manifest(result.split, result.catalog));
    write_text_file(cfg.output_dir + "/metrics.csv",
                    metrics_csv(result.test_report, result.catalog));
    write_text_file(cfg.output_dir + "/metrics.txt",
                    render_metrics_text(result.test_report, result.catalog));
    write_text_file(cfg.output_dir + "/confusion.csv", confusion_csv(result.test_confusion));

    log << "wrote " << checkpoint_path << "\n";
    return 0;
}

int cmd_eval(const std::string& checkpoint_path, const std::string& data_dir,
             const std::string& split_name, std::uint64_t split_seed,
             const std::string& out_dir, std::ostream& log) {
    Network net = load_checkpoint(checkpoint_path);
    if (!fs::is_directory(data_dir)) throw data_error("dataset root is not a directory: " + data_dir);
    for (const auto& label : net.class_labels)
        if (!fs::is_directory(fs::path(data_dir) / label))
            throw mismatch_error("dataset is missing a directory for class '" + label +
                                 "' from the checkpoint catalog");

    std::vector<LabeledImage> images = load_directory_dataset(data_dir, net.class_labels);
    if (images.empty()) throw data_error("dataset produced no images");
    for (auto& img : images)
        if (img.pixels.dim(1) != net.input_shape[1] || img.pixels.dim(2) != net.input_shape[2])
            img.pixels = resize_bilinear(img.pixels, net.input_shape[1], net.input_shape[2]);

    std::vector<LabeledImage> selected;
    if (split_name == "all") {
        selected = std::move(images);
    } else {
        DatasetSplit split = stratified_split(images, split_seed);
        if (split_name == "train")
            selected = std::move(split.train);
        else if (split_name == "validation")
            selected = std::move(split.validation);
        else if (split_name == "test")
            selected = std::move(split.test);
        else
            throw config_error("unknown split '" + split_name +
                               "' (expected train, validation, test or all)");
    }
    if (selected.empty()) throw data_error("selected split is empty");

    std::vector<int> truths;
    truths.reserve(selected.size());
    for (const auto& img : selected) truths.push_back(img.label);
    const auto predictions = predict(net, selected, 32);
    const auto matrix = confusion_matrix(truths, predictions, net.class_labels);
    const auto report = compute_metrics(matrix);

    log << render_metrics_text(report, net.class_labels);
    log << "\n" << render_confusion_text(matrix);
    if (!out_dir.empty()) {
        std::error_code ec;
        fs::create_directories(out_dir, ec);
        if (ec) throw io_error("cannot create output directory: " + out_dir);
        write_text_file(out_dir + "/metrics.csv", metrics_csv(report, net.class_labels));
        write_text_file(out_dir + "/metrics.txt", render_metrics_text(report, net.class_labels));
        write_text_file(out_dir + "/confusion.csv", confusion_csv(matrix));
        log << "wrote metrics to " << out_dir << "\n";
    }
    return 0;
}

namespace {

// Shared by infer and explain: image -> network input -> class probabilities.
struct InferenceResult {
    Tensor input;
    std::vector<double> probabilities;
    int predicted;
};

InferenceResult infer_image(const Network& net, const std::string& image_path) {
    Tensor img = read_ppm(image_path);
    if (img.dim(1) != net.input_shape[1] || img.dim(2) != net.input_shape[2])
        img = resize_bilinear(img, net.input_shape[1], net.input_shape[2]);
    const Tensor logits =
        forward(net, img.reshaped({1, img.dim(0), img.dim(1), img.dim(2)}));
    InferenceResult r;
    r.input = std::move(img);
    r.probabilities = softmax_row(logits.data(), logits.dim(1));
    r.predicted = 0;
    for (std::size_t i = 1; i < r.probabilities.size(); ++i)
        if (r.probabilities[i] > r.probabilities[r.predicted])
            r.predicted = static_cast<int>(i);
    return r;
}

} // namespace

int cmd_infer(const std::string& checkpoint_path, const std::string& image_path,
              double threshold, std::ostream& out) {
    Network net = load_checkpoint(checkpoint_path);
    const InferenceResult r = infer_image(net, image_path);
    const RoutingDecision decision = route_waste(r.probabilities, net.class_labels, threshold);
    out << routing_line(decision) << "\n";
    return 0;
}

int cmd_explain(const std::string& checkpoint_path, const std::string& image_path,
                const std::string& class_name, const std::string& out_dir,
                std::ostream& log) {
    Network net = load_checkpoint(checkpoint_path);
    const InferenceResult r = infer_image(net, image_path);

    int target = r.predicted;
    if (!class_name.empty()) {
        const auto it = std::find(net.class_labels.begin(), net.class_labels.end(), class_name);
        if (it == net.class_labels.end())
            throw config_error("class '" + class_name + "' is not in the checkpoint catalog");
        target = static_cast<int>(it - net.class_labels.begin());
    }

    const Heatmap heatmap = grad_cam(net, r.input, target);
    Caption caption;
    caption.predicted = net.class_labels[static_cast<std::size_t>(r.predicted)];
    caption.actual = net.class_labels[static_cast<std::size_t>(target)];
    caption.probability = r.probabilities[static_cast<std::size_t>(target)];
    caption.loss = -std::log(std::max(caption.probability, 1e-300));

    std::error_code ec;
    fs::create_directories(out_dir, ec);
    if (ec) throw io_error("cannot create output directory: " + out_dir);
    const std::string heatmap_path = out_dir + "/heatmap.ppm";
    const std::string caption_path = out_dir + "/caption.txt";
    render_annotated(r.input, heatmap, caption, heatmap_path, caption_path);
    log << "wrote " << heatmap_path << " and " << caption_path << "\n";
    return 0;
}

int cmd_compare(const RunConfig& cfg, const std::vector<std::string>& strategy_names,
                const std::vector<std::uint64_t>& seeds, std::ostream& log) {
    if (strategy_names.size() < 2)
        throw config_error("compare needs at least 2 strategies");
    if (seeds.empty()) throw config_error("compare needs at least 1 seed");
    std::vector<Strategy> strategies;
    for (const auto& name : strategy_names) strategies.push_back(parse_strategy(name));

    struct Row {
        Strategy strategy;
        std::uint64_t seed;
        double accuracy, precision, recall, f1;
        int epochs;
    };
    std::vector<Row> rows;

    for (const Strategy strategy : strategies) {
        for (const std::uint64_t seed : seeds) {
            RunConfig run = cfg;
            run.trainer.strategy = strategy;
            // one benchmark seed fixes every stream; strategies with the same
            // seed see identical data, init and augmentation draws
            run.trainer.seed = Rng::derive(seed, 0x1ULL);
            run.dataset.seed = Rng::derive(seed, 0x2ULL);
            run.dataset.split_seed = Rng::derive(seed, 0x3ULL);
            run.model.init_seed = Rng::derive(seed, 0x4ULL);
            run.augment.seed = Rng::derive(seed, 0x5ULL);
            if (run.source && run.source->checkpoint.empty()) {
                run.source->seed = Rng::derive(seed, 0x6ULL);
                run.source->split_seed = Rng::derive(seed, 0x7ULL);
            }
            run.output_dir = cfg.output_dir + "/compare/" + strategy_name(strategy) +
                             "-seed" + std::to_string(seed);

            log << "=== " << strategy_name(strategy) << " seed " << seed << "\n";
            PipelineResult result = run_pipeline(run, log);

            std::error_code ec;
            fs::create_directories(run.output_dir, ec);
            if (ec) throw io_error("cannot create output directory: " + run.output_dir);
            write_text_file(run.output_dir + "/history.csv", result.history.to_csv());
            write_text_file(run.output_dir + "/metrics.csv",
                            metrics_csv(result.test_report, result.catalog));

            rows.push_back({strategy, seed, result.test_report.accuracy,
                            result.test_report.weighted_precision,
                            result.test_report.weighted_recall, result.test_report.weighted_f1,
                            static_cast<int>(result.history.records.size())});
        }
    }

    struct Aggregate {
        Strategy strategy;
        double accuracy = 0, precision = 0, recall = 0, f1 = 0;
    };
    std::vector<Aggregate> aggregates;
    for (const Strategy strategy : strategies) {
        Aggregate agg;
        agg.strategy = strategy;
        int n = 0;
        for (const auto& row : rows)
            if (row.strategy == strategy) {
                agg.accuracy += row.accuracy;
                agg.precision += row.precision;
                agg.recall += row.recall;
                agg.f1 += row.f1;
                ++n;
            }
        agg.accuracy /= n;
        agg.precision /= n;
        agg.recall /= n;
        agg.f1 /= n;
        aggregates.push_back(agg);
    }
    std::stable_sort(aggregates.begin(), aggregates.end(),
                     [](const Aggregate& a, const Aggregate& b) { return a.accuracy > b.accuracy; });

    std::ostringstream csv;
    csv << "strategy,seed,accuracy,precision,recall,f1,epochs\n";
    char buf[160];
    for (const auto& row : rows) {
        std::snprintf(buf, sizeof buf, "%s,%llu,%.17g,%.17g,%.17g,%.17g,%d\n",
                      strategy_name(row.strategy).c_str(),
                      static_cast<unsigned long long>(row.seed), row.accuracy, row.precision,
                      row.recall, row.f1, row.epochs);
        csv << buf;
    }
    for (const auto& agg : aggregates) {
        std::snprintf(buf, sizeof buf, "%s,mean,%.17g,%.17g,%.17g,%.17g,\n",
                      strategy_name(agg.strategy).c_str(), agg.accuracy, agg.precision,
                      agg.recall, agg.f1);
        csv << buf;
    }

    std::ostringstream text;
    text << "Strategy            Accuracy  Precision  Recall  F1 Score\n";
    for (const auto& agg : aggregates) {
        std::snprintf(buf, sizeof buf, "%-18s  %.3f     %.3f      %.3f   %.3f\n",
                      strategy_name(agg.strategy).c_str(), agg.accuracy, agg.precision,
                      agg.recall, agg.f1);
        text << buf;
    }

    std::error_code ec;
    fs::create_directories(cfg.output_dir, ec);
    if (ec) throw io_error("cannot create output directory: " + cfg.output_dir);
    write_text_file(cfg.output_dir + "/comparison.csv", csv.str());
    write_text_file(cfg.output_dir + "/comparison.txt", text.str());
    log << "\n" << text.str();
    return 0;
}

int cmd_synth_data(const std::string& task_name, const std::string& out_dir, int n_per_class,
                   std::int64_t res_h, std::int64_t res_w, std::uint64_t seed,
                   std::ostream& log) {
    SyntheticTask task;
    if (task_name == "source")
        task = SyntheticTask::source;
    else if (task_name == "target")
        task = SyntheticTask::target;
    else
        throw config_error("task must be 'source' or 'target'");

    auto ds = synthesize_dataset(task, n_per_class, res_h, res_w, seed);
    std::error_code ec;
    fs::create_directories(out_dir, ec);
    if (ec) throw io_error("cannot create output directory: " + out_dir);
    std::vector<int> counters(ds.catalog.size(), 0);
    for (const auto& cls : ds.catalog) {
        fs::create_directories(fs::path(out_dir) / cls, ec);
        if (ec) throw io_error("cannot create class directory under " + out_dir);
    }
    for (const auto& img : ds.images) {
        char name[32];
        std::snprintf(name, sizeof name, "%04d.ppm", counters[static_cast<std::size_t>(img.label)]++);
        write_ppm((fs::path(out_dir) / ds.catalog[static_cast<std::size_t>(img.label)] / name).string(),
                  img.pixels);
    }
    log << "wrote " << ds.images.size() << " images under " << out_dir << "\n";
    return 0;
}

} // namespace binnet
